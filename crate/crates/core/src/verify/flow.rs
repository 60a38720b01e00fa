use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{CheckConfig, CheckRecord, VerifyError};
use crate::expr::ScalarExpr;
use crate::geometry::{hamiltonian_vf, lie_derivative_mv, MultiVectorField, PhasePoint};
use crate::spectral::{mixed_wedge_ratios, regularity, secular_roots, REGULARITY_THRESHOLD};

/// States of the flow of `W(h)` on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    /// Step-halving estimate of the largest relative global error.
    pub error_estimate: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &PhasePoint)> {
        Some((*self.times.last()?, self.states.last()?))
    }
}

struct Field<'a> {
    flow: &'a MultiVectorField,
    dim: usize,
}

impl Field<'_> {
    fn at(&self, x: &[f64]) -> Result<Vec<f64>, VerifyError> {
        let v = self.flow.evaluate(x)?;
        Ok((0..self.dim).map(|i| v.get(&[i])).collect())
    }

    fn rk4(&self, x: &[f64], h: f64) -> Result<Vec<f64>, VerifyError> {
        let shifted = |k: &[f64], a: f64| -> Vec<f64> {
            x.iter().zip(k).map(|(xi, ki)| xi + a * ki).collect()
        };
        let k1 = self.at(x)?;
        let k2 = self.at(&shifted(&k1, h / 2.0))?;
        let k3 = self.at(&shifted(&k2, h / 2.0))?;
        let k4 = self.at(&shifted(&k3, h))?;
        Ok((0..self.dim)
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect())
    }
}

fn regularity_at(w: &MultiVectorField, x: &[f64]) -> Result<f64, VerifyError> {
    Ok(regularity(&w.evaluate(x)?.to_matrix(), w.dim()))
}

/// Integrate `dx/dt = W(h)` with classical RK4 from `x0` over `cfg.horizon`.
///
/// A second run at half the step gives the error estimate, which must stay
/// under `cfg.flow_error_bound`. If `x0` is regular, regularity is monitored
/// at every step.
pub fn integrate_flow(
    w: &MultiVectorField,
    h: &ScalarExpr,
    x0: &PhasePoint,
    cfg: &CheckConfig,
) -> Result<Trajectory, VerifyError> {
    cfg.validate()?;
    let dim = w.dim();
    if x0.dim() != dim {
        return Err(VerifyError::Config(format!(
            "start point has {} coordinates, system needs {dim}",
            x0.dim()
        )));
    }
    let flow = hamiltonian_vf(w, h)?;
    let field = Field { flow: &flow, dim };
    let steps = libm::round(cfg.horizon / cfg.dt).max(1.0) as usize;
    let dt = cfg.horizon / steps as f64;
    let monitor = regularity_at(w, x0)? > REGULARITY_THRESHOLD;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0.clone());
    let mut coarse = x0.to_vec();
    let mut fine = x0.to_vec();
    let mut error_estimate = 0.0f64;
    for k in 1..=steps {
        let t = k as f64 * dt;
        coarse = field.rk4(&coarse, dt)?;
        fine = field.rk4(&fine, dt / 2.0)?;
        fine = field.rk4(&fine, dt / 2.0)?;
        // global error of the coarse run is about 16/15 of the difference
        let size = coarse.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let diff = coarse.iter().zip(&fine).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        error_estimate = error_estimate.max(16.0 / 15.0 * diff / size);
        if monitor && regularity_at(w, &coarse)? <= REGULARITY_THRESHOLD {
            return Err(VerifyError::RegularityLost { time: t });
        }
        times.push(t);
        states.push(PhasePoint::new(coarse.clone())?);
    }
    if error_estimate > cfg.flow_error_bound {
        return Err(VerifyError::StepError { estimate: error_estimate, bound: cfg.flow_error_bound });
    }
    Ok(Trajectory { times, states, error_estimate })
}

/// Drift of `Y(l)` and of the secular roots along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftAudit {
    /// `max_t |Y(l)(t) - Y(l)(0)| / max(1, |Y(l)(0)|)` for `l = 1..n`.
    pub invariant_drift: Vec<f64>,
    /// The same for the ascending roots `c_1..c_n`.
    pub root_drift: Vec<f64>,
    pub samples: usize,
    pub error_estimate: f64,
}

impl DriftAudit {
    pub fn worst(&self) -> f64 {
        self.invariant_drift.iter().chain(&self.root_drift).copied().fold(0.0, f64::max)
    }

    pub fn record(&self, tolerance: f64) -> CheckRecord {
        let mut r = CheckRecord::new("conservation", "dY(l)/dt = 0, dc_i/dt = 0 along W(h)");
        r.residual = Some(self.worst());
        r.scale = Some(1.0);
        r.points = self.samples;
        r.pass = self.worst() <= tolerance;
        r.notes = format!(
            "Y drift {:?}, root drift {:?}, flow error estimate {:e}",
            self.invariant_drift, self.root_drift, self.error_estimate
        );
        r
    }
}

fn relative_drift(series: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = series.first() else { return Vec::new() };
    let mut drift = vec![0.0f64; first.len()];
    for row in series {
        for (l, (v, v0)) in row.iter().zip(first).enumerate() {
            drift[l] = drift[l].max((v - v0).abs() / v0.abs().max(1.0));
        }
    }
    drift
}

/// Integrate from `x0` and measure how far `Y(l)` and the roots move.
pub fn conservation_drift(
    w: &MultiVectorField,
    e: &MultiVectorField,
    h: &ScalarExpr,
    x0: &PhasePoint,
    cfg: &CheckConfig,
) -> Result<DriftAudit, VerifyError> {
    let what = lie_derivative_mv(e, w)?;
    let trajectory = integrate_flow(w, h, x0, cfg)?;
    let mut ys = Vec::with_capacity(trajectory.len());
    let mut cs = Vec::with_capacity(trajectory.len());
    for x in &trajectory.states {
        ys.push(mixed_wedge_ratios(w, &what, x)?.values);
        cs.push(secular_roots(w, &what, x)?.roots);
    }
    Ok(DriftAudit {
        invariant_drift: relative_drift(&ys),
        root_drift: relative_drift(&cs),
        samples: trajectory.len(),
        error_estimate: trajectory.error_estimate,
    })
}
