use core::fmt;

use super::{PhaseSpace, ScalarExpr};

/// Renders an expression in the parser's grammar with the minimal
/// parentheses needed to reproduce the same tree shape.
pub struct Printer<'a> {
    expr: &'a ScalarExpr,
    space: &'a PhaseSpace,
}

impl<'a> Printer<'a> {
    pub fn new(expr: &'a ScalarExpr, space: &'a PhaseSpace) -> Self {
        Printer { expr, space }
    }
}

// Binding strength: sums < products < unary minus < powers < atoms.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn level(e: &ScalarExpr) -> u8 {
    match e {
        ScalarExpr::Num(v) if *v < 0.0 || v.is_sign_negative() => UNARY,
        ScalarExpr::Num(_) | ScalarExpr::Coord(_) | ScalarExpr::Call(..) => ATOM,
        ScalarExpr::Neg(_) => UNARY,
        ScalarExpr::Add(..) | ScalarExpr::Sub(..) => SUM,
        ScalarExpr::Mul(..) | ScalarExpr::Div(..) => PRODUCT,
        ScalarExpr::Pow(..) => POWER,
    }
}

impl Printer<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, e: &ScalarExpr) -> fmt::Result {
        match e {
            ScalarExpr::Num(v) => write!(f, "{v}"),
            ScalarExpr::Coord(i) => match self.space.names().get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{i}"),
            },
            ScalarExpr::Neg(a) => {
                f.write_str("-")?;
                // only a base or a power may follow a unary minus
                self.child(f, a, POWER)
            }
            ScalarExpr::Add(a, b) => self.binary(f, a, " + ", b, SUM),
            ScalarExpr::Sub(a, b) => self.binary(f, a, " - ", b, SUM),
            ScalarExpr::Mul(a, b) => self.binary(f, a, "*", b, PRODUCT),
            ScalarExpr::Div(a, b) => self.binary(f, a, "/", b, PRODUCT),
            ScalarExpr::Pow(a, k) => {
                self.child(f, a, ATOM)?;
                write!(f, "^{k}")
            }
            ScalarExpr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(f, a)?;
                f.write_str(")")
            }
        }
    }

    fn binary(
        &self,
        f: &mut fmt::Formatter<'_>,
        a: &ScalarExpr,
        op: &str,
        b: &ScalarExpr,
        op_level: u8,
    ) -> fmt::Result {
        self.child(f, a, op_level)?;
        f.write_str(op)?;
        // right operands of a left-associative operator need a strictly
        // tighter binding, and a leading minus there reads badly
        let min = if level(b) == UNARY { ATOM } else { op_level + 1 };
        self.child(f, b, min)
    }

    fn child(&self, f: &mut fmt::Formatter<'_>, e: &ScalarExpr, min: u8) -> fmt::Result {
        if level(e) >= min {
            self.write(f, e)
        } else {
            f.write_str("(")?;
            self.write(f, e)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr)
    }
}
