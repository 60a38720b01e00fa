use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{sample_points, CheckConfig, CheckRecord, VerifyError, Worst};
use crate::expr::{JetValue, ScalarExpr};
use crate::geometry::{
    hamiltonian_vf, lie_derivative_at, lie_derivative_mv, schouten_bb_at, MultiVectorField,
    PhasePoint, PointwiseField,
};
use crate::spectral::{
    invariant_jets, mixed_wedge_ratios, root_jets, secular_roots, y_from_roots, SpectralError,
};

fn pointwise_check(
    id: &str,
    anchor: &str,
    w: &MultiVectorField,
    cfg: &CheckConfig,
    mut at: impl FnMut(&PhasePoint) -> Result<PointwiseField, VerifyError>,
) -> Result<CheckRecord, VerifyError> {
    let sample = sample_points(w, cfg)?;
    let mut worst = Worst::default();
    for x in &sample.points {
        let f = at(x)?;
        worst.update(f.relative_residual(), f.scale);
    }
    Ok(worst.into_record(CheckRecord::new(id, anchor), cfg.tolerance))
}

/// `[W, W] = 0` at sampled regular points.
pub fn check_jacobi(w: &MultiVectorField, cfg: &CheckConfig) -> Result<CheckRecord, VerifyError> {
    pointwise_check("jacobi", "[W,W] = 0", w, cfg, |x| Ok(schouten_bb_at(w, w, x)?))
}

/// `[E, W(h)] = 0`: `E` commutes with the evolution field.
pub fn check_symmetry(
    e: &MultiVectorField,
    w: &MultiVectorField,
    h: &ScalarExpr,
    cfg: &CheckConfig,
) -> Result<CheckRecord, VerifyError> {
    let flow = hamiltonian_vf(w, h)?;
    pointwise_check("symmetry", "[E,W(h)] = 0", w, cfg, |x| Ok(lie_derivative_at(e, &flow, x)?))
}

/// Classifies `E`: passes when `Ŵ = [E, W]` is nonzero somewhere, i.e. the
/// generator is non-Noether. Informational, never mandatory.
pub fn check_non_noether(
    e: &MultiVectorField,
    w: &MultiVectorField,
    cfg: &CheckConfig,
) -> Result<CheckRecord, VerifyError> {
    let mut r = pointwise_check("non_noether", "[E,W] != 0", w, cfg, |x| {
        Ok(lie_derivative_at(e, w, x)?)
    })?;
    r.mandatory = false;
    let size = r.residual.unwrap_or(0.0);
    r.pass = size > cfg.tolerance;
    r.notes = if r.pass {
        "non-Noether: [E,W] is nonzero".into()
    } else {
        "Noether: [E,W] vanishes at every sample, invariant checks are vacuous".into()
    };
    Ok(r)
}

/// `[[E,[E,W]], W] = 0`.
pub fn check_yang_baxter(
    e: &MultiVectorField,
    w: &MultiVectorField,
    cfg: &CheckConfig,
) -> Result<CheckRecord, VerifyError> {
    let what = lie_derivative_mv(e, w)?;
    let second = lie_derivative_mv(e, &what)?;
    pointwise_check("yang_baxter", "[[E,[E,W]],W] = 0", w, cfg, |x| {
        Ok(schouten_bb_at(&second, w, x)?)
    })
}

/// `[Ŵ, W] = 0` and `[Ŵ, Ŵ] = 0`, as two records.
pub fn check_compatibility(
    w: &MultiVectorField,
    what: &MultiVectorField,
    cfg: &CheckConfig,
) -> Result<[CheckRecord; 2], VerifyError> {
    let mixed = pointwise_check("compatibility", "[Ŵ,W] = 0", w, cfg, |x| {
        Ok(schouten_bb_at(what, w, x)?)
    })?;
    let own = pointwise_check("hat_jacobi", "[Ŵ,Ŵ] = 0", w, cfg, |x| {
        Ok(schouten_bb_at(what, what, x)?)
    })?;
    Ok([mixed, own])
}

/// Both spectral routes at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub point: Vec<f64>,
    pub roots: Vec<f64>,
    pub multiple: Vec<bool>,
    /// `Y(l)` from the mixed wedge ratios.
    pub from_wedge: Vec<f64>,
    /// `Y(l)` from the elementary symmetric functions of the roots.
    pub from_roots: Vec<f64>,
    pub residual: f64,
}

/// Relative gap between the two routes: `|Δ Y(l)| / max(1, max|c|)^l`.
fn route_gap(wedge: &[f64], roots: &[f64], from_roots: &[f64]) -> (f64, f64) {
    let scale = roots.iter().fold(1.0f64, |acc, c| acc.max(c.abs()));
    let gap = wedge
        .iter()
        .zip(from_roots)
        .enumerate()
        .map(|(l, (a, b))| (a - b).abs() / libm::pow(scale, (l + 1) as f64))
        .fold(0.0, f64::max);
    (gap, scale)
}

/// The secular spectrum is real and the wedge and root routes to `Y(l)`
/// agree at every sampled point.
pub fn check_spectrum(
    w: &MultiVectorField,
    what: &MultiVectorField,
    cfg: &CheckConfig,
) -> Result<(CheckRecord, Vec<SpectrumSample>), VerifyError> {
    let sample = sample_points(w, cfg)?;
    let mut worst = Worst::default();
    let mut samples = Vec::with_capacity(sample.points.len());
    let mut non_real = 0;
    let mut multiple = 0;
    for x in &sample.points {
        let wedge = mixed_wedge_ratios(w, what, x)?;
        let spectrum = match secular_roots(w, what, x) {
            Ok(s) => s,
            Err(SpectralError::NonRealSpectrum { .. }) => {
                non_real += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        if !spectrum.is_simple() {
            multiple += 1;
        }
        let from_roots = y_from_roots(&spectrum).values;
        let (gap, scale) = route_gap(&wedge.values, &spectrum.roots, &from_roots);
        worst.update(gap, scale);
        samples.push(SpectrumSample {
            point: x.to_vec(),
            roots: spectrum.roots,
            multiple: spectrum.multiple,
            from_wedge: wedge.values,
            from_roots,
            residual: gap,
        });
    }
    let mut r = worst.into_record(
        CheckRecord::new("spectrum", "Y(l) = e_l(c)/C(n,l), c real"),
        cfg.tolerance,
    );
    r.points = sample.points.len();
    if non_real > 0 {
        r.pass = false;
    }
    r.notes = format!("{non_real} points with non-real spectrum, {multiple} with a multiple root");
    Ok((r, samples))
}

/// Worst involution brackets over the sampled points.
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionAudit {
    /// `max |{Y(k), Y(l)}_W|`, gradient-scaled.
    pub invariants_w: f64,
    /// `max |{Y(k), Y(l)}_Ŵ|`, gradient-scaled.
    pub invariants_hat: f64,
    /// `max |{c_i, c_j}_W|` over points with a simple spectrum.
    pub roots_w: f64,
    pub roots_hat: f64,
    pub points: usize,
    /// Points where the spectrum had a multiple root and roots were skipped.
    pub root_skipped: usize,
}

impl InvolutionAudit {
    pub fn worst(&self) -> f64 {
        [self.invariants_w, self.invariants_hat, self.roots_w, self.roots_hat]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn record(&self, tolerance: f64) -> CheckRecord {
        let mut r = CheckRecord::new("involution", "{Y(k),Y(l)} = {Y(k),Y(l)}^ = 0");
        r.residual = Some(self.worst());
        r.scale = Some(1.0);
        r.points = self.points;
        r.pass = self.worst() <= tolerance;
        r.notes = format!(
            "Y under W {:e}, under Ŵ {:e}; roots under W {:e}, under Ŵ {:e}; {} points skipped for roots",
            self.invariants_w, self.invariants_hat, self.roots_w, self.roots_hat, self.root_skipped
        );
        r
    }
}

/// `|sum V^ab f_a g_b| / max(1, sum |V^ab f_a g_b|)`.
fn scaled_bracket(v: &[f64], dim: usize, f: &[f64], g: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut size = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            let t = v[a * dim + b] * f[a] * g[b];
            acc += t;
            size += t.abs();
        }
    }
    acc.abs() / size.max(1.0)
}

fn pair_max(v: &[f64], dim: usize, jets: &[JetValue]) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..jets.len() {
        for l in k + 1..jets.len() {
            worst = worst.max(scaled_bracket(v, dim, &jets[k].gradient, &jets[l].gradient));
        }
    }
    worst
}

/// Mutual brackets of the invariants and of the secular roots, under both
/// `W` and `Ŵ = [E, W]`.
pub fn involution_audit(
    w: &MultiVectorField,
    e: &MultiVectorField,
    cfg: &CheckConfig,
) -> Result<InvolutionAudit, VerifyError> {
    let what = lie_derivative_mv(e, w)?;
    let sample = sample_points(w, cfg)?;
    let dim = w.dim();
    let mut audit = InvolutionAudit {
        invariants_w: 0.0,
        invariants_hat: 0.0,
        roots_w: 0.0,
        roots_hat: 0.0,
        points: 0,
        root_skipped: 0,
    };
    for x in &sample.points {
        let wm = w.evaluate(x)?.to_matrix();
        let hm = what.evaluate(x)?.to_matrix();
        let jets = invariant_jets(w, &what, x)?;
        audit.invariants_w = audit.invariants_w.max(pair_max(&wm, dim, &jets));
        audit.invariants_hat = audit.invariants_hat.max(pair_max(&hm, dim, &jets));
        match root_jets(w, &what, x) {
            Ok(Some(roots)) => {
                audit.roots_w = audit.roots_w.max(pair_max(&wm, dim, &roots));
                audit.roots_hat = audit.roots_hat.max(pair_max(&hm, dim, &roots));
            }
            Ok(None) | Err(SpectralError::NonRealSpectrum { .. }) => audit.root_skipped += 1,
            Err(e) => return Err(e.into()),
        }
        audit.points += 1;
    }
    Ok(audit)
}

/// Involution record; vacuous for one degree of freedom.
pub fn check_involution(
    w: &MultiVectorField,
    e: &MultiVectorField,
    cfg: &CheckConfig,
) -> Result<CheckRecord, VerifyError> {
    if w.space().dof() == 1 {
        return Ok(CheckRecord::vacuous(
            "involution",
            "{Y(k),Y(l)} = {Y(k),Y(l)}^ = 0",
            "a single invariant is trivially in involution",
        ));
    }
    Ok(involution_audit(w, e, cfg)?.record(cfg.tolerance))
}
