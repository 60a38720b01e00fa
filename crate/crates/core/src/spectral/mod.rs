//! Secular roots and wedge-ratio invariants of a pair of bivectors.
//!
//! For bivectors `W` (regular) and `Ŵ` at a point, the top wedge powers are
//! Pfaffians: `A^n = n! Pf(A) vol`. Expanding `(Ŵ + tW)^n` binomially gives
//!
//! ```text
//! P(t) = Pf(Ŵ + tW) / Pf(W) = sum_l C(n,l) Y(l) t^(n-l) = prod_i (t + c_i)
//! ```
//!
//! so the ratios `Y(l) = Ŵ^l ∧ W^(n-l) / W^n` are coefficients of `P` and the
//! secular roots `c_i` of `(Ŵ - cW)^n = 0` are the zeros of `P(-c)`.
//! [`mixed_wedge_ratios`] reads the coefficients; [`secular_roots`] solves
//! for the zeros and [`y_from_roots`] maps them back through elementary
//! symmetric polynomials.

mod gradient;
mod pfaffian;
mod roots;
mod wedge;

use alloc::vec::Vec;

use thiserror::Error;

use crate::geometry::{GeometryError, PhasePoint};

pub use gradient::{invariant_gradient, invariant_jets, root_jets};
pub use pfaffian::{pfaffian, pfaffian_with};
pub use roots::{polynomial_roots, secular_roots, y_from_roots};
pub use wedge::{mixed_wedge_ratios, regularity, secular_polynomial, SecularPolynomial};

/// `|Pf(W)| / max|W_ij|^n` below this marks a point as singular.
pub const REGULARITY_THRESHOLD: f64 = 1e-6;
/// Imaginary parts below this (times the root scale) are dropped.
pub const IMAGINARY_TOLERANCE: f64 = 1e-8;
/// Adjacent roots closer than this (times the root scale) are flagged multiple.
pub const MULTIPLE_ROOT_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },
    #[error("matrix has odd dimension {0}")]
    OddDimension(usize),
    #[error("matrix length {len} is not {dim}x{dim}")]
    Shape { len: usize, dim: usize },
    #[error("W is singular at this point (|Pf W| / |W|^n = {ratio:e})")]
    Singular { ratio: f64 },
    #[error("secular polynomial interpolation is ill-conditioned (leading-coefficient error {error:e})")]
    IllConditioned { error: f64 },
    #[error("non-real spectrum (largest imaginary part {max_imag:e})")]
    NonRealSpectrum { max_imag: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Roots `c_1 <= .. <= c_n` of the secular equation at a point.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SecularSpectrum {
    pub point: PhasePoint,
    pub roots: Vec<f64>,
    /// Per root: part of a (near-)coincident group.
    pub multiple: Vec<bool>,
}

impl SecularSpectrum {
    pub fn is_simple(&self) -> bool {
        !self.multiple.iter().any(|&m| m)
    }
}

/// `Y(1)..Y(n)` at a point.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InvariantVector {
    pub point: PhasePoint,
    pub values: Vec<f64>,
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
