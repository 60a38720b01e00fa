//! Full verification run over a [`SystemSpec`].

use alloc::vec::Vec;

use crate::geometry::lie_derivative_mv;
use crate::system::SystemSpec;
use crate::verify::{
    check_compatibility, check_involution, check_jacobi, check_non_noether, check_regularity,
    check_spectrum, check_symmetry, check_yang_baxter, conservation_drift, CheckConfig,
    CheckRecord, CheckReport, Verdict, VerifyError,
};

fn recorded(
    id: &str,
    anchor: &str,
    result: Result<CheckRecord, VerifyError>,
) -> CheckRecord {
    result.unwrap_or_else(|e| CheckRecord::errored(id, anchor, &e))
}

/// Run every check in order: Jacobi, regularity, symmetry, non-Noether
/// classification, Yang-Baxter, compatibility, spectrum, conservation and
/// involution. Failures are recorded, never raised. The verdict passes iff
/// every mandatory record passes.
pub fn run_report(spec: &SystemSpec, cfg: &CheckConfig) -> CheckReport {
    let mut checks = Vec::new();
    let mut spectrum_samples = Vec::new();
    let (w, e, h) = (&spec.w, &spec.e, &spec.h);

    checks.push(recorded("jacobi", "[W,W] = 0", check_jacobi(w, cfg)));
    checks.push(check_regularity(w, cfg));
    checks.push(recorded("symmetry", "[E,W(h)] = 0", check_symmetry(e, w, h, cfg)));
    let classification = recorded("non_noether", "[E,W] != 0", check_non_noether(e, w, cfg));
    let noether = !classification.pass;
    checks.push(classification);
    checks.push(recorded("yang_baxter", "[[E,[E,W]],W] = 0", check_yang_baxter(e, w, cfg)));

    match lie_derivative_mv(e, w) {
        Ok(what) => {
            match check_compatibility(w, &what, cfg) {
                Ok(pair) => checks.extend(pair),
                Err(err) => {
                    checks.push(CheckRecord::errored("compatibility", "[Ŵ,W] = 0", &err));
                    checks.push(CheckRecord::errored("hat_jacobi", "[Ŵ,Ŵ] = 0", &err));
                }
            }
            const SPECTRUM: &str = "Y(l) = e_l(c)/C(n,l), c real";
            const CONSERVATION: &str = "dY(l)/dt = 0, dc_i/dt = 0 along W(h)";
            const INVOLUTION: &str = "{Y(k),Y(l)} = {Y(k),Y(l)}^ = 0";
            if noether {
                let why = "Noether generator, [E,W] = 0";
                checks.push(CheckRecord::vacuous("spectrum", SPECTRUM, why));
                checks.push(CheckRecord::vacuous("conservation", CONSERVATION, why));
                checks.push(CheckRecord::vacuous("involution", INVOLUTION, why));
            } else {
                match check_spectrum(w, &what, cfg) {
                    Ok((record, samples)) => {
                        checks.push(record);
                        spectrum_samples = samples;
                    }
                    Err(err) => checks.push(CheckRecord::errored("spectrum", SPECTRUM, &err)),
                }
                let drift = cfg
                    .start_point(spec.dof())
                    .and_then(|x0| conservation_drift(w, e, h, &x0, cfg))
                    .map(|audit| audit.record(cfg.drift_tolerance));
                checks.push(recorded("conservation", CONSERVATION, drift));
                checks.push(recorded("involution", INVOLUTION, check_involution(w, e, cfg)));
            }
        }
        Err(err) => {
            let err = VerifyError::from(err);
            for id in ["compatibility", "hat_jacobi", "spectrum", "conservation", "involution"] {
                checks.push(CheckRecord::errored(id, "", &err));
            }
        }
    }

    let verdict = if checks.iter().filter(|r| r.mandatory).all(|r| r.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    CheckReport { name: spec.name.clone(), config: cfg.clone(), checks, spectrum_samples, verdict }
}
