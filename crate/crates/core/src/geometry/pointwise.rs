//! Bracket formulas evaluated at a single point from component jets.
//!
//! These agree with evaluating the symbolic brackets at the same point but
//! also report the largest absolute product that entered any component, the
//! scale the identity checks divide by.

use super::{increasing_tuples, GeometryError, MultiVectorField, NumericMultiVector};
use crate::expr::seed_duals;
use crate::scalar::Dual;

/// A bracket evaluated at one point, with its term scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseField {
    pub values: NumericMultiVector<f64>,
    /// Largest absolute intermediate product.
    pub scale: f64,
}

impl PointwiseField {
    /// Largest component divided by the term scale floored at one.
    pub fn relative_residual(&self) -> f64 {
        self.values.max_abs() / self.scale.max(1.0)
    }
}

fn jets(a: &MultiVectorField, x: &[f64]) -> Result<NumericMultiVector<Dual>, GeometryError> {
    a.evaluate_with(&seed_duals(x)?)
}

/// [`super::lie_derivative_mv`] evaluated at `x`.
pub fn lie_derivative_at(
    e: &MultiVectorField,
    a: &MultiVectorField,
    x: &[f64],
) -> Result<PointwiseField, GeometryError> {
    e.expect_degree(1)?;
    e.expect_same_space(a)?;
    let dim = a.dim();
    let ej = jets(e, x)?;
    let aj = jets(a, x)?;
    let mut scale = 0.0f64;
    let mut values = NumericMultiVector::zero(dim, a.degree());
    for tuple in increasing_tuples(dim, a.degree()) {
        let mut acc = 0.0;
        let comp = aj.get(&tuple);
        for m in 0..dim {
            let t = ej.get(&[m]).re * comp.eps[m];
            scale = scale.max(t.abs());
            acc += t;
        }
        for s in 0..tuple.len() {
            let grad_e = ej.get(&[tuple[s]]);
            for m in 0..dim {
                let mut moved = tuple.clone();
                moved[s] = m;
                let t = aj.get(&moved).re * grad_e.eps[m];
                scale = scale.max(t.abs());
                acc -= t;
            }
        }
        values.set_increasing(tuple, acc);
    }
    Ok(PointwiseField { values, scale })
}

/// [`super::schouten_bb`] evaluated at `x`.
pub fn schouten_bb_at(
    a: &MultiVectorField,
    b: &MultiVectorField,
    x: &[f64],
) -> Result<PointwiseField, GeometryError> {
    a.expect_degree(2)?;
    b.expect_degree(2)?;
    a.expect_same_space(b)?;
    let dim = a.dim();
    let aj = jets(a, x)?;
    let bj = jets(b, x)?;
    let mut scale = 0.0f64;
    let mut values = NumericMultiVector::zero(dim, 3);
    for tuple in increasing_tuples(dim, 3) {
        let (i, j, k) = (tuple[0], tuple[1], tuple[2]);
        let mut acc = 0.0;
        for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
            let (a_yz, b_yz) = (aj.get(&[y, z]), bj.get(&[y, z]));
            for l in 0..dim {
                for t in [aj.get(&[l, x]).re * b_yz.eps[l], bj.get(&[l, x]).re * a_yz.eps[l]] {
                    scale = scale.max(t.abs());
                    acc += t;
                }
            }
        }
        values.set_increasing(tuple, acc);
    }
    Ok(PointwiseField { values, scale })
}
