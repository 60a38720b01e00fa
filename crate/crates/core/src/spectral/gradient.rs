use alloc::vec::Vec;

use super::{polynomial_roots, secular_polynomial, SecularPolynomial, SpectralError};
use crate::expr::{seed_duals, JetValue};
use crate::geometry::{lie_derivative_mv, MultiVectorField, PhasePoint};
use crate::scalar::Dual;

fn polynomial_jets(
    w: &MultiVectorField,
    what: &MultiVectorField,
    x: &PhasePoint,
) -> Result<SecularPolynomial<Dual>, SpectralError> {
    w.expect_degree(2)?;
    what.expect_degree(2)?;
    w.expect_same_space(what)?;
    let seeds = seed_duals(x).map_err(crate::geometry::GeometryError::from)?;
    let wm = w.evaluate_with(&seeds)?.to_matrix();
    let hm = what.evaluate_with(&seeds)?.to_matrix();
    secular_polynomial(&wm, &hm, w.dim())
}

/// `Y(1)..Y(n)` at `x` with exact gradients, propagated through component
/// evaluation, the Pfaffians and the interpolation.
pub fn invariant_jets(
    w: &MultiVectorField,
    what: &MultiVectorField,
    x: &PhasePoint,
) -> Result<Vec<JetValue>, SpectralError> {
    let dim = x.dim();
    let poly = polynomial_jets(w, what, x)?;
    Ok(poly
        .wedge_ratios()
        .into_iter()
        .map(|d| JetValue { value: d.re, gradient: d.gradient(dim).to_vec() })
        .collect())
}

/// Gradient of `x -> Y(l)(x)` for the deformation `Ŵ = [E, W]`.
pub fn invariant_gradient(
    w: &MultiVectorField,
    e: &MultiVectorField,
    l: usize,
    x: &PhasePoint,
) -> Result<Vec<f64>, SpectralError> {
    let what = lie_derivative_mv(e, w)?;
    let jets = invariant_jets(w, &what, x)?;
    let idx = l.checked_sub(1).filter(|&i| i < jets.len()).ok_or_else(|| {
        SpectralError::Geometry(crate::geometry::GeometryError::BadIndex(alloc::vec![l]))
    })?;
    Ok(jets[idx].gradient.clone())
}

/// Secular roots with gradients by implicit differentiation of `P(-c; x) = 0`.
///
/// Returns `None` when the spectrum has a multiple root at `x`, where the
/// roots are not differentiable.
pub fn root_jets(
    w: &MultiVectorField,
    what: &MultiVectorField,
    x: &PhasePoint,
) -> Result<Option<Vec<JetValue>>, SpectralError> {
    let dim = x.dim();
    let poly = polynomial_jets(w, what, x)?;
    // Q(c) = P(-c)
    let q: Vec<Dual> = poly
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, a)| if j % 2 == 0 { *a } else { -*a })
        .collect();
    let primal: Vec<f64> = q.iter().map(|d| d.re).collect();
    let (roots, multiple) = polynomial_roots(&primal)?;
    if multiple.iter().any(|&m| m) {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(roots.len());
    for &c in &roots {
        let mut slope = 0.0;
        let mut dq = alloc::vec![0.0; dim];
        let mut power = 1.0;
        for (j, coeff) in q.iter().enumerate() {
            for (g, e) in dq.iter_mut().zip(coeff.gradient(dim)) {
                *g += e * power;
            }
            if j + 1 < q.len() {
                slope += (j + 1) as f64 * q[j + 1].re * power;
            }
            power *= c;
        }
        let gradient = dq.into_iter().map(|g| -g / slope).collect();
        out.push(JetValue { value: c, gradient });
    }
    Ok(Some(out))
}
