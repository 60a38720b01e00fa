//! Multivector fields in a single global chart and the bracket calculus the
//! verifier needs: Lie derivatives along vector fields, the Schouten bracket
//! of two bivectors, Hamiltonian vector fields and Poisson brackets.
//!
//! Components are stored on strictly increasing index tuples only. Reading a
//! permuted tuple returns the stored component times the permutation sign,
//! and tuples with a repeated index read as zero.

mod bracket;
mod pointwise;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use thiserror::Error;

use crate::expr::{ExprError, PhaseSpace, ScalarExpr};
use crate::scalar::Scalar;

pub use bracket::{hamiltonian_vf, lie_derivative_mv, poisson_bracket, schouten_bb};
pub use pointwise::{lie_derivative_at, schouten_bb_at, PointwiseField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("expected a field of degree {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("fields live on different phase spaces")]
    SpaceMismatch,
    #[error("index tuple {0:?} is out of range or has the wrong length")]
    BadIndex(Vec<usize>),
    #[error("invalid point: {0}")]
    BadPoint(alloc::string::String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A point of phase space in canonical coordinate order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct PhasePoint(Vec<f64>);

impl PhasePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(GeometryError::BadPoint(format!(
                "need an even, positive number of coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(GeometryError::BadPoint(format!("coordinate {i} is not finite")));
        }
        Ok(PhasePoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PhasePoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Sort `idx` into increasing order, returning the permutation sign, or
/// `None` when an index repeats.
pub fn normalize_tuple(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut sorted = idx.to_vec();
    let mut sign = 1.0;
    // insertion sort: tuples have length <= 3 in practice
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            sorted.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((sorted, sign))
    }
}

/// All strictly increasing `k`-tuples drawn from `0..dim`, in lexicographic order.
pub fn increasing_tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > dim {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < dim - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Antisymmetric contravariant tensor field of degree `k` with expression
/// components.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVectorField {
    space: PhaseSpace,
    degree: usize,
    components: BTreeMap<Vec<usize>, ScalarExpr>,
}

impl MultiVectorField {
    pub fn zero(space: &PhaseSpace, degree: usize) -> Self {
        MultiVectorField { space: space.clone(), degree, components: BTreeMap::new() }
    }

    /// Degree-0 field holding a single function.
    pub fn scalar(space: &PhaseSpace, f: ScalarExpr) -> Self {
        let mut out = Self::zero(space, 0);
        if !f.is_zero() {
            out.components.insert(Vec::new(), f);
        }
        out
    }

    /// Vector field from `(coordinate index, component)` pairs.
    pub fn vector(
        space: &PhaseSpace,
        comps: impl IntoIterator<Item = (usize, ScalarExpr)>,
    ) -> Result<Self, GeometryError> {
        let mut out = Self::zero(space, 1);
        for (i, e) in comps {
            out.add_to(&[i], e)?;
        }
        Ok(out)
    }

    /// Bivector field from `((i, j), component)` pairs. Unordered pairs are
    /// accepted and folded onto the increasing tuple with the sign flip.
    pub fn bivector(
        space: &PhaseSpace,
        comps: impl IntoIterator<Item = ((usize, usize), ScalarExpr)>,
    ) -> Result<Self, GeometryError> {
        let mut out = Self::zero(space, 2);
        for ((i, j), e) in comps {
            out.add_to(&[i, j], e)?;
        }
        Ok(out)
    }

    pub(crate) fn from_map(
        space: &PhaseSpace,
        degree: usize,
        components: BTreeMap<Vec<usize>, ScalarExpr>,
    ) -> Self {
        let components = components.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        MultiVectorField { space: space.clone(), degree, components }
    }

    /// Add `e` to the component at `idx` (any order).
    pub fn add_to(&mut self, idx: &[usize], e: ScalarExpr) -> Result<(), GeometryError> {
        if idx.len() != self.degree || idx.iter().any(|&i| i >= self.space.dim()) {
            return Err(GeometryError::BadIndex(idx.to_vec()));
        }
        if let Some(max) = e.max_coord() {
            if max >= self.space.dim() {
                return Err(GeometryError::BadIndex(vec![max]));
            }
        }
        let (key, sign) = normalize_tuple(idx).ok_or_else(|| GeometryError::BadIndex(idx.to_vec()))?;
        let signed = if sign < 0.0 { -e } else { e };
        let merged = match self.components.remove(&key) {
            Some(old) => old + signed,
            None => signed,
        };
        if !merged.is_zero() {
            self.components.insert(key, merged);
        }
        Ok(())
    }

    pub fn space(&self) -> &PhaseSpace {
        &self.space
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Structurally zero (no stored components).
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Stored components on increasing tuples.
    pub fn components(&self) -> impl Iterator<Item = (&[usize], &ScalarExpr)> {
        self.components.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Component at an arbitrary tuple, with the permutation sign applied.
    pub fn component(&self, idx: &[usize]) -> ScalarExpr {
        match self.stored(idx) {
            Some((sign, e)) if sign < 0.0 => -e.clone(),
            Some((_, e)) => e.clone(),
            None => ScalarExpr::zero(),
        }
    }

    pub(crate) fn stored(&self, idx: &[usize]) -> Option<(f64, &ScalarExpr)> {
        let (key, sign) = normalize_tuple(idx)?;
        self.components.get(&key).map(|e| (sign, e))
    }

    pub(crate) fn expect_degree(&self, degree: usize) -> Result<(), GeometryError> {
        if self.degree == degree {
            Ok(())
        } else {
            Err(GeometryError::DegreeMismatch { expected: degree, got: self.degree })
        }
    }

    pub(crate) fn expect_same_space(&self, other: &MultiVectorField) -> Result<(), GeometryError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(GeometryError::SpaceMismatch)
        }
    }

    /// Pointwise scalar multiple.
    pub fn scaled(&self, k: f64) -> MultiVectorField {
        let components =
            self.components.iter().map(|(t, e)| (t.clone(), ScalarExpr::num(k) * e.clone())).collect();
        Self::from_map(&self.space, self.degree, components)
    }

    /// Sum of two fields of equal degree.
    pub fn plus(&self, other: &MultiVectorField) -> Result<MultiVectorField, GeometryError> {
        self.expect_same_space(other)?;
        other.expect_degree(self.degree)?;
        let mut out = self.clone();
        for (t, e) in other.components() {
            out.add_to(t, e.clone())?;
        }
        Ok(out)
    }

    /// Evaluate every component at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<NumericMultiVector<f64>, GeometryError> {
        self.evaluate_with(x)
    }

    /// Evaluate every component over an arbitrary scalar type (jets included).
    pub fn evaluate_with<S: Scalar>(&self, x: &[S]) -> Result<NumericMultiVector<S>, GeometryError> {
        if x.len() != self.dim() {
            return Err(GeometryError::BadPoint(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                x.len()
            )));
        }
        let mut values = BTreeMap::new();
        for (k, e) in &self.components {
            values.insert(k.clone(), e.eval_with(x)?);
        }
        Ok(NumericMultiVector { dim: self.dim(), degree: self.degree, values })
    }
}

/// Evaluate `a` at `x`; a free-function spelling of [`MultiVectorField::evaluate`].
pub fn evaluate_mv(a: &MultiVectorField, x: &PhasePoint) -> Result<NumericMultiVector<f64>, GeometryError> {
    a.evaluate(x)
}

/// Antisymmetric numeric array of a given degree.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericMultiVector<S> {
    dim: usize,
    degree: usize,
    values: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> NumericMultiVector<S> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        NumericMultiVector { dim, degree, values: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Entry at an arbitrary tuple, sign applied; repeated indices give zero.
    pub fn get(&self, idx: &[usize]) -> S {
        match normalize_tuple(idx) {
            Some((key, sign)) => match self.values.get(&key) {
                Some(v) if sign < 0.0 => -*v,
                Some(v) => *v,
                None => S::zero(),
            },
            None => S::zero(),
        }
    }

    pub(crate) fn set_increasing(&mut self, key: Vec<usize>, v: S) {
        self.values.insert(key, v);
    }

    /// Largest absolute primal value over all entries.
    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.value().abs()))
    }

    /// Dense row-major `dim x dim` matrix of a bivector.
    pub fn to_matrix(&self) -> Vec<S> {
        assert_eq!(self.degree, 2, "to_matrix needs a bivector");
        let n = self.dim;
        let mut m = vec![S::zero(); n * n];
        for (k, v) in &self.values {
            m[k[0] * n + k[1]] = *v;
            m[k[1] * n + k[0]] = -*v;
        }
        m
    }

    /// Primal values (drops jet lanes).
    pub fn values(&self) -> NumericMultiVector<f64> {
        NumericMultiVector {
            dim: self.dim,
            degree: self.degree,
            values: self.values.iter().map(|(k, v)| (k.clone(), v.value())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn tuple_normalization() {
        assert_eq!(normalize_tuple(&[2, 0, 1]), Some((vec![0, 1, 2], 1.0)));
        assert_eq!(normalize_tuple(&[1, 0]), Some((vec![0, 1], -1.0)));
        assert_eq!(normalize_tuple(&[1, 1]), None);
        assert_eq!(increasing_tuples(4, 2).len(), 6);
        assert_eq!(increasing_tuples(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(increasing_tuples(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn permuted_access_carries_sign() {
        let s = PhaseSpace::canonical(1).unwrap();
        // W = p1 d_p1 ^ d_q1 stored as W^(q1 p1) = -p1
        let w = MultiVectorField::bivector(&s, [((1, 0), parse("p1", &s).unwrap())]).unwrap();
        let v = w.evaluate(&[1.0, 2.0]).unwrap();
        assert_eq!(v.get(&[0, 1]), -2.0);
        assert_eq!(v.get(&[1, 0]), 2.0);
        assert_eq!(v.get(&[0, 0]), 0.0);
        assert_eq!(w.components().count(), 1);
    }

    #[test]
    fn zero_field_evaluates_to_zeros() {
        let s = PhaseSpace::canonical(2).unwrap();
        let z = MultiVectorField::zero(&s, 2).evaluate(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert!(z.to_matrix().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn generator_evaluates_componentwise() {
        let s = PhaseSpace::canonical(1).unwrap();
        let e = MultiVectorField::vector(&s, [(0, parse("(p1+q1)^2", &s).unwrap())]).unwrap();
        let v = e.evaluate(&[1.0, 2.0]).unwrap();
        assert_eq!((v.get(&[0]), v.get(&[1])), (9.0, 0.0));
    }

    #[test]
    fn bad_indices_are_rejected() {
        let s = PhaseSpace::canonical(1).unwrap();
        assert!(MultiVectorField::bivector(&s, [((0, 0), ScalarExpr::num(1.0))]).is_err());
        assert!(MultiVectorField::bivector(&s, [((0, 2), ScalarExpr::num(1.0))]).is_err());
        assert!(MultiVectorField::vector(&s, [(0, ScalarExpr::coord(5))]).is_err());
    }

    #[test]
    fn phase_point_validation() {
        assert!(PhasePoint::new(vec![1.0, f64::NAN]).is_err());
        assert!(PhasePoint::new(vec![1.0]).is_err());
        assert_eq!(PhasePoint::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }
}
