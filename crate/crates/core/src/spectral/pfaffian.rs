use alloc::vec::Vec;

use super::SpectralError;
use crate::scalar::Scalar;

/// Pfaffian of a dense row-major antisymmetric `dim x dim` matrix.
///
/// Validates antisymmetry to `1e-12` (relative to the largest entry, floored
/// at one) and an even dimension, then expands along the first row.
pub fn pfaffian(m: &[f64], dim: usize) -> Result<f64, SpectralError> {
    if m.len() != dim * dim {
        return Err(SpectralError::Shape { len: m.len(), dim });
    }
    if !dim.is_multiple_of(2) {
        return Err(SpectralError::OddDimension(dim));
    }
    let largest = m.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut residual = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            residual = residual.max((m[i * dim + j] + m[j * dim + i]).abs());
        }
    }
    if residual > 1e-12 * largest {
        return Err(SpectralError::NotAntisymmetric { residual });
    }
    Ok(pfaffian_with(m, dim))
}

/// Unchecked first-row expansion over any scalar type:
/// `Pf(A) = sum_j (-1)^(j+1) a_{0j} Pf(A without rows/cols 0, j)`.
///
/// Only the upper triangle is read. The empty matrix has Pfaffian one.
pub fn pfaffian_with<S: Scalar>(m: &[S], dim: usize) -> S {
    let idx: Vec<usize> = (0..dim).collect();
    expand(m, dim, &idx)
}

fn expand<S: Scalar>(m: &[S], dim: usize, idx: &[usize]) -> S {
    match idx.len() {
        0 => return S::one(),
        2 => return m[idx[0] * dim + idx[1]],
        _ => {}
    }
    let first = idx[0];
    let mut acc = S::zero();
    let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
    for k in 1..idx.len() {
        let a = m[first * dim + idx[k]];
        if a.is_exact_zero() {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().enumerate().filter(|&(pos, _)| pos + 1 != k).map(|(_, &i)| i));
        let term = a * expand(m, dim, &rest);
        acc = if k % 2 == 1 { acc + term } else { acc - term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn two_by_two() {
        assert_eq!(pfaffian(&[0.0, 1.0, -1.0, 0.0], 2).unwrap(), 1.0);
    }

    #[test]
    fn block_diagonal_multiplies() {
        let (a, b) = (1.7, -0.3);
        let m = vec![
            0.0, a, 0.0, 0.0, //
            -a, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, b, //
            0.0, 0.0, -b, 0.0,
        ];
        assert!((pfaffian(&m, 4).unwrap() - a * b).abs() <= 1e-12);
    }

    #[test]
    fn four_by_four_closed_form() {
        // Pf = a01 a23 - a02 a13 + a03 a12
        let (a01, a02, a03, a12, a13, a23) = (0.5, -1.25, 2.0, 0.75, 1.5, -0.4);
        let m = vec![
            0.0, a01, a02, a03, //
            -a01, 0.0, a12, a13, //
            -a02, -a12, 0.0, a23, //
            -a03, -a13, -a23, 0.0,
        ];
        let expected = a01 * a23 - a02 * a13 + a03 * a12;
        assert!((pfaffian(&m, 4).unwrap() - expected).abs() <= 1e-14);
    }

    #[test]
    fn validation() {
        assert_eq!(pfaffian(&[0.0; 9], 3), Err(SpectralError::OddDimension(3)));
        assert!(matches!(
            pfaffian(&[0.0, 1.0, 1.0, 0.0], 2),
            Err(SpectralError::NotAntisymmetric { .. })
        ));
        assert!(matches!(pfaffian(&[0.0; 3], 2), Err(SpectralError::Shape { .. })));
        assert_eq!(pfaffian(&[], 0).unwrap(), 1.0);
    }
}
