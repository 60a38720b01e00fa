//! Pointwise identity checks, flow integration and conservation/involution
//! audits.
//!
//! Every identity is checked numerically at sampled regular points. A
//! residual is the largest component at a point divided by the largest
//! absolute intermediate term there, floored at one; a record keeps the worst
//! point.

mod checks;
mod flow;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, MultiVectorField, PhasePoint};
use crate::spectral::{regularity, SpectralError, REGULARITY_THRESHOLD};

pub use checks::{
    check_compatibility, check_involution, check_jacobi, check_non_noether, check_spectrum,
    check_symmetry, check_yang_baxter, involution_audit, InvolutionAudit, SpectrumSample,
};
pub use flow::{conservation_drift, integrate_flow, DriftAudit, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("found only {found} regular points out of {wanted} wanted ({draws} draws)")]
    Sampling { found: usize, wanted: usize, draws: usize },
    #[error("regularity lost at t = {time}")]
    RegularityLost { time: f64 },
    #[error("step-halving error estimate {estimate:e} exceeds {bound:e}")]
    StepError { estimate: f64, bound: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl From<crate::expr::ExprError> for VerifyError {
    fn from(e: crate::expr::ExprError) -> Self {
        VerifyError::Geometry(e.into())
    }
}

/// Sampling, tolerance and flow settings shared by all checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub samples: usize,
    /// Points are drawn uniformly from `[-half_width, half_width]^(2n)`.
    pub half_width: f64,
    pub seed: u64,
    /// Relative residual tolerance for identity checks.
    pub tolerance: f64,
    /// Flow horizon `T`.
    pub horizon: f64,
    pub dt: f64,
    /// Relative drift tolerance for conserved quantities.
    pub drift_tolerance: f64,
    /// Bound on the step-halving estimate of the relative global error.
    pub flow_error_bound: f64,
    /// Start of the conservation run; a fixed generic point when absent.
    pub start: Option<Vec<f64>>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            samples: 32,
            half_width: 2.0,
            seed: 0x5eed,
            tolerance: 1e-9,
            horizon: 10.0,
            dt: 1e-3,
            drift_tolerance: 1e-6,
            flow_error_bound: 1e-8,
            start: None,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let positive = [
            ("half_width", self.half_width),
            ("tolerance", self.tolerance),
            ("horizon", self.horizon),
            ("dt", self.dt),
            ("drift_tolerance", self.drift_tolerance),
            ("flow_error_bound", self.flow_error_bound),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(VerifyError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.samples < 8 {
            return Err(VerifyError::Config(format!("need at least 8 samples, got {}", self.samples)));
        }
        if self.dt > self.horizon {
            return Err(VerifyError::Config("dt exceeds the horizon".into()));
        }
        Ok(())
    }

    /// The configured start point, or `q_i = 0.1 i`, `p_i = 0.6 + 0.35 (i - 1)`.
    pub fn start_point(&self, dof: usize) -> Result<PhasePoint, VerifyError> {
        let coords = match &self.start {
            Some(v) => v.clone(),
            None => (0..dof)
                .map(|i| 0.1 * (i + 1) as f64)
                .chain((0..dof).map(|i| 0.6 + 0.35 * i as f64))
                .collect(),
        };
        if coords.len() != 2 * dof {
            return Err(VerifyError::Config(format!(
                "start point has {} coordinates, system needs {}",
                coords.len(),
                2 * dof
            )));
        }
        Ok(PhasePoint::new(coords)?)
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The identity or claim being checked.
    pub paper_anchor: String,
    /// Worst relative residual; absent when the check could not run.
    pub residual: Option<f64>,
    /// Term scale at the worst point.
    pub scale: Option<f64>,
    pub pass: bool,
    pub mandatory: bool,
    pub points: usize,
    pub notes: String,
}

impl CheckRecord {
    pub(crate) fn new(id: &str, anchor: &str) -> Self {
        CheckRecord {
            id: id.into(),
            paper_anchor: anchor.into(),
            residual: None,
            scale: None,
            pass: false,
            mandatory: true,
            points: 0,
            notes: String::new(),
        }
    }

    /// A check that failed to run.
    pub fn errored(id: &str, anchor: &str, err: &VerifyError) -> Self {
        let mut r = Self::new(id, anchor);
        r.notes = format!("error: {err}");
        r
    }

    /// A check with nothing to verify.
    pub fn vacuous(id: &str, anchor: &str, why: &str) -> Self {
        let mut r = Self::new(id, anchor);
        r.residual = Some(0.0);
        r.scale = Some(1.0);
        r.pass = true;
        r.notes = format!("vacuous: {why}");
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub config: CheckConfig,
    pub checks: Vec<CheckRecord>,
    pub spectrum_samples: Vec<SpectrumSample>,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn record(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|r| r.id == id)
    }
}

/// Worst residual over points, tracked with the scale where it occurred.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Worst {
    pub residual: f64,
    pub scale: f64,
    pub points: usize,
}

impl Worst {
    pub fn update(&mut self, residual: f64, scale: f64) {
        if self.points == 0 || residual > self.residual {
            self.residual = residual;
            self.scale = scale;
        }
        self.points += 1;
    }

    pub fn into_record(self, mut record: CheckRecord, tolerance: f64) -> CheckRecord {
        record.residual = Some(self.residual);
        record.scale = Some(self.scale);
        record.points = self.points;
        record.pass = self.residual <= tolerance;
        record
    }
}

/// Sampled regular points together with the sampling statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub points: Vec<PhasePoint>,
    pub draws: usize,
    pub min_regularity: f64,
}

/// Draw `cfg.samples` points where `W` evaluates and `|Pf W| / |W|^n`
/// exceeds the regularity threshold. Deterministic in `cfg.seed`.
pub fn sample_points(w: &MultiVectorField, cfg: &CheckConfig) -> Result<Sample, VerifyError> {
    cfg.validate()?;
    w.expect_degree(2)?;
    let dim = w.dim();
    let max_draws = cfg.samples * 200;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut points = Vec::with_capacity(cfg.samples);
    let mut min_regularity = f64::INFINITY;
    let mut draws = 0;
    while points.len() < cfg.samples && draws < max_draws {
        draws += 1;
        let x: Vec<f64> =
            (0..dim).map(|_| rng.random_range(-cfg.half_width..=cfg.half_width)).collect();
        let Ok(values) = w.evaluate(&x) else { continue };
        let ratio = regularity(&values.to_matrix(), dim);
        if ratio > REGULARITY_THRESHOLD {
            min_regularity = min_regularity.min(ratio);
            points.push(PhasePoint::new(x)?);
        }
    }
    if points.len() < cfg.samples {
        return Err(VerifyError::Sampling { found: points.len(), wanted: cfg.samples, draws });
    }
    Ok(Sample { points, draws, min_regularity })
}

/// Regularity record built from a sampling run.
pub fn check_regularity(w: &MultiVectorField, cfg: &CheckConfig) -> CheckRecord {
    const ID: &str = "regularity";
    const ANCHOR: &str = "W^n != 0 (maximal rank)";
    match sample_points(w, cfg) {
        Ok(sample) => {
            let mut r = CheckRecord::new(ID, ANCHOR);
            r.residual = Some((sample.draws - sample.points.len()) as f64 / sample.draws as f64);
            r.scale = Some(1.0);
            r.pass = true;
            r.points = sample.points.len();
            r.notes = format!(
                "{} of {} draws regular; min |Pf W|/|W|^n = {:e}",
                sample.points.len(),
                sample.draws,
                sample.min_regularity
            );
            r
        }
        Err(e) => CheckRecord::errored(ID, ANCHOR, &e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::builtin;

    #[test]
    fn config_validation() {
        assert!(CheckConfig::default().validate().is_ok());
        let bad = CheckConfig { samples: 4, ..CheckConfig::default() };
        assert!(bad.validate().is_err());
        let bad = CheckConfig { dt: -1.0, ..CheckConfig::default() };
        assert!(bad.validate().is_err());
        let bad = CheckConfig { tolerance: f64::NAN, ..CheckConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_regular() {
        let s = builtin("dissipative", 2).unwrap();
        let cfg = CheckConfig::default();
        let a = sample_points(&s.w, &cfg).unwrap();
        let b = sample_points(&s.w, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 32);
        assert!(a.min_regularity > REGULARITY_THRESHOLD);
        let c = sample_points(&s.w, &CheckConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn singular_structure_cannot_be_sampled() {
        let s = builtin("dissipative", 1).unwrap();
        let zero = MultiVectorField::zero(&s.space, 2);
        assert!(matches!(sample_points(&zero, &CheckConfig::default()), Err(VerifyError::Sampling { .. })));
        assert!(!check_regularity(&zero, &CheckConfig::default()).pass);
    }

    #[test]
    fn default_start_point() {
        let p = CheckConfig::default().start_point(2).unwrap();
        assert_eq!(&p[..], &[0.1, 0.2, 0.6, 0.95]);
        let cfg = CheckConfig { start: Some(alloc::vec![1.0, 2.0]), ..CheckConfig::default() };
        assert!(cfg.start_point(2).is_err());
    }
}
