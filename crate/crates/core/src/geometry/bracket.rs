use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{increasing_tuples, GeometryError, MultiVectorField};
use crate::expr::ScalarExpr;

fn sum(terms: impl IntoIterator<Item = ScalarExpr>) -> ScalarExpr {
    terms.into_iter().fold(ScalarExpr::zero(), |acc, t| acc + t)
}

fn product(a: ScalarExpr, b: ScalarExpr) -> Option<ScalarExpr> {
    if a.is_zero() || b.is_zero() {
        None
    } else {
        Some(a * b)
    }
}

/// Lie derivative `L_E A` of a degree-`k` field along the vector field `E`:
///
/// `(L_E A)^{i1..ik} = E^m d_m A^{i1..ik} - sum_s A^{i1..m..ik} d_m E^{is}`.
///
/// For `k = 1` this is the commutator `[E, A]`, for `k = 0` the directional
/// derivative.
pub fn lie_derivative_mv(
    e: &MultiVectorField,
    a: &MultiVectorField,
) -> Result<MultiVectorField, GeometryError> {
    e.expect_degree(1)?;
    e.expect_same_space(a)?;
    let dim = a.dim();
    let flow: Vec<ScalarExpr> = (0..dim).map(|m| e.component(&[m])).collect();
    // dE[i][m] = d_m E^i
    let de: Vec<Vec<ScalarExpr>> =
        flow.iter().map(|ei| (0..dim).map(|m| ei.diff(m)).collect()).collect();

    let mut out = BTreeMap::new();
    for tuple in increasing_tuples(dim, a.degree()) {
        let mut terms = Vec::new();
        if let Some((sign, comp)) = a.stored(&tuple) {
            for (m, em) in flow.iter().enumerate() {
                if let Some(t) = product(em.clone(), comp.diff(m)) {
                    terms.push(if sign < 0.0 { -t } else { t });
                }
            }
        }
        for s in 0..tuple.len() {
            for (m, dm) in de[tuple[s]].iter().enumerate() {
                let mut moved = tuple.clone();
                moved[s] = m;
                if let Some(t) = product(a.component(&moved), dm.clone()) {
                    terms.push(-t);
                }
            }
        }
        out.insert(tuple, sum(terms));
    }
    Ok(MultiVectorField::from_map(a.space(), a.degree(), out))
}

/// Schouten bracket of two bivector fields:
///
/// `[A, B]^{ijk} = sum over cyclic (i,j,k) of A^{li} d_l B^{jk} + B^{li} d_l A^{jk}`.
///
/// With this normalisation `[W, W] = 0` is exactly the Jacobi identity of
/// the bracket `{f, g} = W^{ij} d_i f d_j g`.
pub fn schouten_bb(
    a: &MultiVectorField,
    b: &MultiVectorField,
) -> Result<MultiVectorField, GeometryError> {
    a.expect_degree(2)?;
    b.expect_degree(2)?;
    a.expect_same_space(b)?;
    let dim = a.dim();
    let mut out = BTreeMap::new();
    for tuple in increasing_tuples(dim, 3) {
        let (i, j, k) = (tuple[0], tuple[1], tuple[2]);
        let mut terms = Vec::new();
        for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
            for l in 0..dim {
                let b_yz = b.component(&[y, z]);
                let a_yz = a.component(&[y, z]);
                if let Some(t) = product(a.component(&[l, x]), b_yz.diff(l)) {
                    terms.push(t);
                }
                if let Some(t) = product(b.component(&[l, x]), a_yz.diff(l)) {
                    terms.push(t);
                }
            }
        }
        out.insert(tuple, sum(terms));
    }
    Ok(MultiVectorField::from_map(a.space(), 3, out))
}

/// Hamiltonian vector field `W(f)` with components `W(f)^j = W^{ij} d_i f`,
/// so that `W(f)` applied to `g` is `{f, g}`.
pub fn hamiltonian_vf(
    w: &MultiVectorField,
    f: &ScalarExpr,
) -> Result<MultiVectorField, GeometryError> {
    w.expect_degree(2)?;
    let dim = w.dim();
    let df: Vec<ScalarExpr> = (0..dim).map(|i| f.diff(i)).collect();
    let mut out = BTreeMap::new();
    for j in 0..dim {
        let terms = (0..dim).filter_map(|i| product(w.component(&[i, j]), df[i].clone()));
        out.insert(alloc::vec![j], sum(terms));
    }
    Ok(MultiVectorField::from_map(w.space(), 1, out))
}

/// Poisson bracket `{f, g} = sum_{i<j} V^{ij} (d_i f d_j g - d_j f d_i g)`
/// with respect to an arbitrary bivector `V`.
pub fn poisson_bracket(
    v: &MultiVectorField,
    f: &ScalarExpr,
    g: &ScalarExpr,
) -> Result<ScalarExpr, GeometryError> {
    v.expect_degree(2)?;
    let mut terms = Vec::new();
    for (t, vij) in v.components() {
        let (i, j) = (t[0], t[1]);
        let cross = f.diff(i) * g.diff(j) - f.diff(j) * g.diff(i);
        if let Some(term) = product(vij.clone(), cross) {
            terms.push(term);
        }
    }
    Ok(sum(terms))
}
