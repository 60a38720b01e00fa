use super::{ExprError, Func, PhaseSpace, ScalarExpr};

impl ScalarExpr {
    /// Exact partial derivative with respect to the coordinate at `coord`.
    pub fn diff(&self, coord: usize) -> ScalarExpr {
        use ScalarExpr as E;
        match self {
            E::Num(_) => E::zero(),
            E::Coord(i) => E::num(if *i == coord { 1.0 } else { 0.0 }),
            E::Neg(a) => -a.diff(coord),
            E::Add(a, b) => a.diff(coord) + b.diff(coord),
            E::Sub(a, b) => a.diff(coord) - b.diff(coord),
            E::Mul(a, b) => {
                a.diff(coord) * (**b).clone() + (**a).clone() * b.diff(coord)
            }
            E::Div(a, b) => {
                let da = a.diff(coord);
                let db = b.diff(coord);
                if db.is_zero() {
                    da / (**b).clone()
                } else {
                    (da * (**b).clone() - (**a).clone() * db) / (**b).clone().powi(2)
                }
            }
            E::Pow(a, k) => {
                let da = a.diff(coord);
                if da.is_zero() {
                    return E::zero();
                }
                E::num(*k as f64) * (**a).clone().powi(k - 1) * da
            }
            E::Call(f, a) => {
                let da = a.diff(coord);
                if da.is_zero() {
                    return E::zero();
                }
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => E::call(Func::Cos, inner),
                    Func::Cos => -E::call(Func::Sin, inner),
                    Func::Exp => E::call(Func::Exp, inner),
                    Func::Ln => return da / inner,
                };
                outer * da
            }
        }
    }

    /// Partial derivative with respect to a named coordinate of `space`.
    pub fn diff_named(&self, name: &str, space: &PhaseSpace) -> Result<ScalarExpr, ExprError> {
        let coord = space
            .index_of(name)
            .ok_or_else(|| ExprError::UnknownIdentifier { pos: 0, name: name.into() })?;
        Ok(self.diff(coord))
    }
}
