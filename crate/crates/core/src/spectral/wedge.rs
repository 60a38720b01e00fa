use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;

use super::{binomial, pfaffian_with, InvariantVector, SpectralError, REGULARITY_THRESHOLD};
use crate::geometry::{MultiVectorField, PhasePoint};
use crate::scalar::Scalar;

/// Monomial coefficients of `P(t) = Pf(Ŵ + tW) / Pf(W)`, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularPolynomial<S> {
    pub coefficients: Vec<S>,
    pub pf_w: S,
}

impl<S: Scalar> SecularPolynomial<S> {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Y(l) = [t^(n-l)] P / C(n, l)` for `l = 1..n`.
    pub fn wedge_ratios(&self) -> Vec<S> {
        let n = self.degree();
        (1..=n).map(|l| self.coefficients[n - l].scale(1.0 / binomial(n, l))).collect()
    }
}

fn max_abs<S: Scalar>(m: &[S]) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.value().abs()))
}

/// `|Pf(W)| / max|W_ij|^n`, zero for the zero matrix.
pub fn regularity<S: Scalar>(w: &[S], dim: usize) -> f64 {
    let norm = max_abs(w);
    if norm == 0.0 {
        return 0.0;
    }
    let pf = pfaffian_with(w, dim).value();
    (pf / libm::pow(norm, (dim / 2) as f64)).abs()
}

/// Interpolate `P(t)` from `n + 1` Chebyshev nodes scaled by `|Ŵ| / |W|`.
///
/// The interpolation weights are plain `f64`, so jets pass straight through
/// and the coefficients come out with exact gradients.
pub fn secular_polynomial<S: Scalar>(
    w: &[S],
    what: &[S],
    dim: usize,
) -> Result<SecularPolynomial<S>, SpectralError> {
    if w.len() != dim * dim || what.len() != dim * dim {
        return Err(SpectralError::Shape { len: w.len().max(what.len()), dim });
    }
    if !dim.is_multiple_of(2) {
        return Err(SpectralError::OddDimension(dim));
    }
    let ratio = regularity(w, dim);
    if ratio <= REGULARITY_THRESHOLD {
        return Err(SpectralError::Singular { ratio });
    }
    let n = dim / 2;
    let pf_w = pfaffian_with(w, dim);
    let norm_w = max_abs(w);
    let norm_what = max_abs(what);
    let base = if norm_what > 0.0 { norm_what / norm_w } else { 1.0 };

    let nodes: Vec<f64> =
        (0..=n).map(|k| libm::cos((2 * k + 1) as f64 * PI / (2 * (n + 1)) as f64)).collect();
    let vandermonde = DMatrix::from_fn(n + 1, n + 1, |k, j| libm::pow(nodes[k], j as f64));
    let inverse = vandermonde
        .try_inverse()
        .ok_or(SpectralError::IllConditioned { error: f64::INFINITY })?;

    let mut worst = f64::INFINITY;
    let mut shifted = alloc::vec![S::zero(); dim * dim];
    for spread in [1.0, 4.0, 0.25, 16.0, 0.0625] {
        let s = base * spread;
        let values: Vec<S> = nodes
            .iter()
            .map(|&u| {
                let t = u * s;
                for (dst, (&a, &b)) in shifted.iter_mut().zip(what.iter().zip(w.iter())) {
                    *dst = a + b.scale(t);
                }
                pfaffian_with(&shifted, dim) / pf_w
            })
            .collect();
        // coefficients in u = t / s
        let scaled: Vec<S> = (0..=n)
            .map(|j| {
                (0..=n).fold(S::zero(), |acc, k| acc + values[k].scale(inverse[(j, k)]))
            })
            .collect();
        let lead = libm::pow(s, n as f64);
        let size = scaled.iter().fold(lead, |acc, c| acc.max(c.value().abs()));
        let error = (scaled[n].value() - lead).abs() / size;
        if error <= 1e-9 {
            let coefficients = scaled
                .into_iter()
                .enumerate()
                .map(|(j, c)| c.scale(1.0 / libm::pow(s, j as f64)))
                .collect();
            return Ok(SecularPolynomial { coefficients, pf_w });
        }
        worst = worst.min(error);
    }
    Err(SpectralError::IllConditioned { error: worst })
}

/// `Y(l) = Ŵ^l ∧ W^(n-l) / W^n` for `l = 1..n` at `x`.
pub fn mixed_wedge_ratios(
    w: &MultiVectorField,
    what: &MultiVectorField,
    x: &PhasePoint,
) -> Result<InvariantVector, SpectralError> {
    w.expect_degree(2)?;
    what.expect_degree(2)?;
    w.expect_same_space(what)?;
    let dim = w.dim();
    let wm = w.evaluate(x)?.to_matrix();
    let hm = what.evaluate(x)?.to_matrix();
    let poly = secular_polynomial(&wm, &hm, dim)?;
    Ok(InvariantVector { point: x.clone(), values: poly.wedge_ratios() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, PhaseSpace, ScalarExpr};
    use crate::geometry::lie_derivative_mv;
    use alloc::vec;

    fn example(n: usize) -> (MultiVectorField, MultiVectorField) {
        let s = PhaseSpace::canonical(n).unwrap();
        let w = MultiVectorField::bivector(
            &s,
            (1..=n).map(|i| ((s.p(i), s.q(i)), ScalarExpr::coord(s.p(i)))),
        )
        .unwrap();
        let e = MultiVectorField::vector(
            &s,
            (1..=n).map(|i| {
                let text = alloc::format!("(p{i}+q{i})^2");
                (s.q(i), parse(&text, &s).unwrap())
            }),
        )
        .unwrap();
        let what = lie_derivative_mv(&e, &w).unwrap();
        (w, what)
    }

    #[test]
    fn single_dof_example() {
        let (w, what) = example(1);
        let x = PhasePoint::new(vec![1.0, 2.0]).unwrap();
        let y = mixed_wedge_ratios(&w, &what, &x).unwrap();
        assert!((y.values[0] + 6.0).abs() < 1e-12, "{:?}", y.values);
    }

    #[test]
    fn zero_deformation_gives_zero_ratios() {
        let (w, _) = example(3);
        let zero = MultiVectorField::zero(w.space(), 2);
        let x = PhasePoint::new(vec![0.3, -0.2, 0.5, 1.1, 0.7, -1.4]).unwrap();
        let y = mixed_wedge_ratios(&w, &zero, &x).unwrap();
        assert!(y.values.iter().all(|v| v.abs() < 1e-14), "{:?}", y.values);
    }

    #[test]
    fn scalar_multiple_gives_powers() {
        let (w, _) = example(3);
        let lambda = -1.7;
        let x = PhasePoint::new(vec![0.3, -0.2, 0.5, 1.1, 0.7, -1.4]).unwrap();
        let y = mixed_wedge_ratios(&w, &w.scaled(lambda), &x).unwrap();
        for (l, v) in y.values.iter().enumerate() {
            let expected = libm::pow(lambda, (l + 1) as f64);
            assert!((v - expected).abs() < 1e-12 * expected.abs().max(1.0), "l={} {v}", l + 1);
        }
    }

    #[test]
    fn singular_point_is_reported() {
        let (w, what) = example(1);
        let x = PhasePoint::new(vec![1.0, 0.0]).unwrap();
        assert!(matches!(mixed_wedge_ratios(&w, &what, &x), Err(SpectralError::Singular { .. })));
    }

    #[test]
    fn huge_deformation_still_interpolates() {
        let (w, _) = example(2);
        let x = PhasePoint::new(vec![0.3, -0.2, 0.5, 1.1]).unwrap();
        let y = mixed_wedge_ratios(&w, &w.scaled(1e6), &x).unwrap();
        assert!((y.values[0] / 1e6 - 1.0).abs() < 1e-12);
        assert!((y.values[1] / 1e12 - 1.0).abs() < 1e-12);
    }
}
