//! Scalar expressions over phase-space coordinates.
//!
//! Expressions are plain trees indexed by coordinate position; the
//! [`PhaseSpace`] supplies names for parsing and printing. The canonical
//! coordinate order is `q1..qn, p1..pn` and every gradient, matrix and tuple
//! index in the crate follows it.

mod diff;
mod parse;
mod print;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{Dual, Scalar, MAX_DIM, MAX_DOF};

pub use parse::parse;
pub use print::Printer;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("non-integer exponent at position {pos}")]
    NonIntegerExponent { pos: usize },
    #[error("invalid phase space: {0}")]
    InvalidSpace(String),
    #[error("point has dimension {got}, expression needs coordinate index {index}")]
    DimensionMismatch { index: usize, got: usize },
    #[error("{kind} in `{subexpr}`")]
    Domain { kind: DomainKind, subexpr: String },
}

impl ExprError {
    /// Character offset into the parsed text, for parse errors.
    pub fn position(&self) -> Option<usize> {
        match self {
            ExprError::Syntax { pos, .. }
            | ExprError::UnknownIdentifier { pos, .. }
            | ExprError::NonIntegerExponent { pos } => Some(*pos),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
}

impl core::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DomainKind::DivisionByZero => f.write_str("division by zero"),
            DomainKind::LogOfNonPositive => f.write_str("logarithm of a non-positive value"),
        }
    }
}

const RESERVED: [&str; 4] = ["sin", "cos", "exp", "ln"];

/// Coordinate system of a `2n`-dimensional phase space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    dof: usize,
    names: Arc<[String]>,
}

impl PhaseSpace {
    /// Canonical coordinates `q1..qn, p1..pn`.
    pub fn canonical(dof: usize) -> Result<Self, ExprError> {
        let names = (1..=dof)
            .map(|i| format!("q{i}"))
            .chain((1..=dof).map(|i| format!("p{i}")))
            .collect();
        Self::with_names(names)
    }

    /// Custom coordinate names, positions first then momenta.
    pub fn with_names(names: Vec<String>) -> Result<Self, ExprError> {
        if names.is_empty() || !names.len().is_multiple_of(2) {
            return Err(ExprError::InvalidSpace(format!(
                "need a positive even number of coordinates, got {}",
                names.len()
            )));
        }
        let dof = names.len() / 2;
        if dof > MAX_DOF {
            return Err(ExprError::InvalidSpace(format!(
                "at most {MAX_DOF} degrees of freedom supported, got {dof}"
            )));
        }
        for (i, name) in names.iter().enumerate() {
            let mut chars = name.chars();
            let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || RESERVED.contains(&name.as_str()) {
                return Err(ExprError::InvalidSpace(format!("bad coordinate name `{name}`")));
            }
            if names[..i].contains(name) {
                return Err(ExprError::InvalidSpace(format!("duplicate coordinate `{name}`")));
            }
        }
        Ok(PhaseSpace { dof, names: names.into() })
    }

    pub fn dof(&self) -> usize {
        self.dof
    }

    pub fn dim(&self) -> usize {
        2 * self.dof
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of `q_i` (1-based `i`).
    pub fn q(&self, i: usize) -> usize {
        i - 1
    }

    /// Index of `p_i` (1-based `i`).
    pub fn p(&self, i: usize) -> usize {
        self.dof + i - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            _ => None,
        }
    }
}

/// Expression tree. Coordinates are referenced by canonical index.
///
/// The arithmetic operator impls fold constants and drop additive zeros and
/// multiplicative ones, which keeps derivative trees small. They do no other
/// simplification.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Num(f64),
    Coord(usize),
    Neg(Box<ScalarExpr>),
    Add(Box<ScalarExpr>, Box<ScalarExpr>),
    Sub(Box<ScalarExpr>, Box<ScalarExpr>),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
    Pow(Box<ScalarExpr>, i32),
    Call(Func, Box<ScalarExpr>),
}

/// Value and exact gradient of an expression at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct JetValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr::Num(0.0)
    }

    pub fn num(v: f64) -> Self {
        ScalarExpr::Num(v)
    }

    pub fn coord(index: usize) -> Self {
        ScalarExpr::Coord(index)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarExpr::Num(v) if *v == 0.0)
    }

    fn as_num(&self) -> Option<f64> {
        match self {
            ScalarExpr::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn powi(self, k: i32) -> Self {
        match (k, self.as_num()) {
            (0, _) => ScalarExpr::Num(1.0),
            (1, _) => self,
            (_, Some(v)) if v != 0.0 || k > 0 => ScalarExpr::Num(Scalar::powi(v, k)),
            _ => ScalarExpr::Pow(Box::new(self), k),
        }
    }

    pub fn call(f: Func, arg: ScalarExpr) -> Self {
        ScalarExpr::Call(f, Box::new(arg))
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            ScalarExpr::Num(_) => None,
            ScalarExpr::Coord(i) => Some(*i),
            ScalarExpr::Neg(a) | ScalarExpr::Pow(a, _) | ScalarExpr::Call(_, a) => a.max_coord(),
            ScalarExpr::Add(a, b)
            | ScalarExpr::Sub(a, b)
            | ScalarExpr::Mul(a, b)
            | ScalarExpr::Div(a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Evaluate in double precision at `x` (canonical order).
    pub fn eval(&self, x: &[f64]) -> Result<f64, ExprError> {
        self.eval_with(x)
    }

    /// Value and gradient at `x`; the gradient has one entry per coordinate of `x`.
    pub fn eval_jet(&self, x: &[f64]) -> Result<JetValue, ExprError> {
        let seeds = seed_duals(x)?;
        let d = self.eval_with(&seeds)?;
        Ok(JetValue { value: d.re, gradient: d.gradient(x.len()).to_vec() })
    }

    /// Evaluate over any [`Scalar`], with domain checks on the primal value.
    pub fn eval_with<S: Scalar>(&self, x: &[S]) -> Result<S, ExprError> {
        Ok(match self {
            ScalarExpr::Num(v) => S::constant(*v),
            ScalarExpr::Coord(i) => *x
                .get(*i)
                .ok_or(ExprError::DimensionMismatch { index: *i, got: x.len() })?,
            ScalarExpr::Neg(a) => -a.eval_with(x)?,
            ScalarExpr::Add(a, b) => a.eval_with(x)? + b.eval_with(x)?,
            ScalarExpr::Sub(a, b) => a.eval_with(x)? - b.eval_with(x)?,
            ScalarExpr::Mul(a, b) => a.eval_with(x)? * b.eval_with(x)?,
            ScalarExpr::Div(a, b) => {
                let num = a.eval_with(x)?;
                let den = b.eval_with(x)?;
                if den.value() == 0.0 {
                    return Err(self.domain_error(DomainKind::DivisionByZero, x.len()));
                }
                num / den
            }
            ScalarExpr::Pow(a, k) => {
                let base = a.eval_with(x)?;
                if *k < 0 && base.value() == 0.0 {
                    return Err(self.domain_error(DomainKind::DivisionByZero, x.len()));
                }
                base.powi(*k)
            }
            ScalarExpr::Call(f, a) => {
                let arg = a.eval_with(x)?;
                match f {
                    Func::Sin => arg.sin(),
                    Func::Cos => arg.cos(),
                    Func::Exp => arg.exp(),
                    Func::Ln => {
                        if arg.value() <= 0.0 {
                            return Err(self.domain_error(DomainKind::LogOfNonPositive, x.len()));
                        }
                        arg.ln()
                    }
                }
            }
        })
    }

    fn domain_error(&self, kind: DomainKind, dim: usize) -> ExprError {
        let subexpr = match PhaseSpace::canonical(dim / 2) {
            Ok(space) => Printer::new(self, &space).to_string(),
            Err(_) => format!("{self:?}"),
        };
        ExprError::Domain { kind, subexpr }
    }
}

/// Seed one jet lane per coordinate.
pub(crate) fn seed_duals(x: &[f64]) -> Result<Vec<Dual>, ExprError> {
    if x.len() > MAX_DIM {
        return Err(ExprError::InvalidSpace(format!(
            "jets support at most {MAX_DIM} coordinates, got {}",
            x.len()
        )));
    }
    Ok(x.iter().enumerate().map(|(i, &v)| Dual::variable(v, i)).collect())
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_num(), rhs.as_num()) {
            (Some(a), Some(b)) => ScalarExpr::Num(a + b),
            (Some(0.0), _) => rhs,
            (_, Some(0.0)) => self,
            _ => ScalarExpr::Add(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_num(), rhs.as_num()) {
            (Some(a), Some(b)) => ScalarExpr::Num(a - b),
            (Some(0.0), _) => -rhs,
            (_, Some(0.0)) => self,
            _ => ScalarExpr::Sub(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_num(), rhs.as_num()) {
            (Some(a), Some(b)) => ScalarExpr::Num(a * b),
            (Some(0.0), _) | (_, Some(0.0)) => ScalarExpr::zero(),
            (Some(1.0), _) => rhs,
            (_, Some(1.0)) => self,
            (Some(-1.0), _) => -rhs,
            (_, Some(-1.0)) => -self,
            _ => ScalarExpr::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Div for ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        match (self.as_num(), rhs.as_num()) {
            (Some(a), Some(b)) if b != 0.0 => ScalarExpr::Num(a / b),
            (Some(0.0), _) => ScalarExpr::zero(),
            (_, Some(1.0)) => self,
            _ => ScalarExpr::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        match self {
            ScalarExpr::Num(v) => ScalarExpr::Num(-v),
            ScalarExpr::Neg(inner) => *inner,
            other => ScalarExpr::Neg(Box::new(other)),
        }
    }
}
