//! Bundled Hamiltonian systems: phase space, Poisson bivector, Hamiltonian
//! and a candidate symmetry generator.

use alloc::format;
use alloc::string::{String, ToString};

use thiserror::Error;

use crate::expr::{ExprError, PhaseSpace, ScalarExpr};
use crate::geometry::{hamiltonian_vf, GeometryError, MultiVectorField};
use crate::scalar::MAX_DOF;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("unknown built-in system `{0}` (known: {known})", known = BUILTIN_NAMES.join(", "))]
    UnknownBuiltin(String),
    #[error("degrees of freedom must be in 1..={MAX_DOF}, got {0}")]
    DofOutOfRange(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `(W, h, E)` on a phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub name: String,
    pub space: PhaseSpace,
    pub w: MultiVectorField,
    pub h: ScalarExpr,
    pub e: MultiVectorField,
}

impl SystemSpec {
    pub fn new(
        name: impl Into<String>,
        w: MultiVectorField,
        h: ScalarExpr,
        e: MultiVectorField,
    ) -> Result<Self, SystemError> {
        w.expect_degree(2)?;
        e.expect_degree(1)?;
        w.expect_same_space(&e)?;
        let space = w.space().clone();
        if h.max_coord().is_some_and(|i| i >= space.dim()) {
            return Err(GeometryError::SpaceMismatch.into());
        }
        Ok(SystemSpec { name: name.into(), space, w, h, e })
    }

    pub fn dof(&self) -> usize {
        self.space.dof()
    }
}

pub const BUILTIN_NAMES: [&str; 4] =
    ["dissipative", "canonical-noether", "dissipative-linear", "dissipative-misdirected"];

fn sum_over(n: usize, mut term: impl FnMut(usize) -> ScalarExpr) -> ScalarExpr {
    (1..=n).fold(ScalarExpr::zero(), |acc, i| acc + term(i))
}

/// Built-in systems with `n` degrees of freedom.
///
/// * `dissipative`: `W = sum p_i d_pi ^ d_qi`, `h = sum (p_i + q_i)`,
///   `E = sum (p_i + q_i)^2 d_qi`. A particle under linear friction.
/// * `canonical-noether`: canonical `W`, `h = sum (p_i^2 + q_i^2) / 2`,
///   `E` the Hamiltonian field of `(q_1^2 + p_1^2) / 2`. A Noether control.
/// * `dissipative-linear`: the dissipative system with
///   `E = sum (p_i + q_i) d_qi`.
/// * `dissipative-misdirected`: the dissipative system with
///   `E = sum (p_i + q_i)^2 d_pi`, which does not commute with the flow.
pub fn builtin(name: &str, n: usize) -> Result<SystemSpec, SystemError> {
    if !BUILTIN_NAMES.contains(&name) {
        return Err(SystemError::UnknownBuiltin(name.to_string()));
    }
    if n == 0 || n > MAX_DOF {
        return Err(SystemError::DofOutOfRange(n));
    }
    let space = PhaseSpace::canonical(n)?;
    let q = |i: usize| ScalarExpr::coord(space.q(i));
    let p = |i: usize| ScalarExpr::coord(space.p(i));
    let spec = match name {
        "canonical-noether" => {
            let w = MultiVectorField::bivector(
                &space,
                (1..=n).map(|i| ((space.p(i), space.q(i)), ScalarExpr::num(1.0))),
            )?;
            let h = sum_over(n, |i| (p(i).powi(2) + q(i).powi(2)) / ScalarExpr::num(2.0));
            let moment = (q(1).powi(2) + p(1).powi(2)) / ScalarExpr::num(2.0);
            let e = hamiltonian_vf(&w, &moment)?;
            SystemSpec::new(format!("canonical-noether-n{n}"), w, h, e)?
        }
        _ => {
            let w = MultiVectorField::bivector(
                &space,
                (1..=n).map(|i| ((space.p(i), space.q(i)), p(i))),
            )?;
            let h = sum_over(n, |i| p(i) + q(i));
            let e = match name {
                "dissipative" => {
                    MultiVectorField::vector(&space, (1..=n).map(|i| (space.q(i), (p(i) + q(i)).powi(2))))?
                }
                "dissipative-linear" => {
                    MultiVectorField::vector(&space, (1..=n).map(|i| (space.q(i), p(i) + q(i))))?
                }
                _ => MultiVectorField::vector(&space, (1..=n).map(|i| (space.p(i), (p(i) + q(i)).powi(2))))?,
            };
            SystemSpec::new(format!("{name}-n{n}"), w, h, e)?
        }
    };
    Ok(spec)
}
