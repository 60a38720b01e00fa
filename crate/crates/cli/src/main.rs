use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use binoether::{load_system, render_text, to_json};
use binoether_core::geometry::{lie_derivative_mv, PhasePoint};
use binoether_core::pipeline::run_report;
use binoether_core::spectral::{mixed_wedge_ratios, secular_roots, y_from_roots};
use binoether_core::system::{builtin, SystemSpec, BUILTIN_NAMES};
use binoether_core::verify::{conservation_drift, integrate_flow, CheckConfig, Verdict};
use clap::{Args, Parser, Subcommand};

/// Check non-Noether symmetries of Hamiltonian systems and audit the
/// conservation laws they generate.
#[derive(Parser)]
#[command(name = "binoether", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and print a summary. Exits 1 if the verdict fails.
    Check {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Print the secular roots and invariants at a point.
    Invariants {
        #[command(flatten)]
        system: SystemArgs,
        /// Point as `q1=..,p1=..`, every coordinate once.
        #[arg(long)]
        at: String,
    },
    /// Integrate the flow from a point and report conservation drift.
    Flow {
        #[command(flatten)]
        system: SystemArgs,
        /// Start point as `q1=..,p1=..`.
        #[arg(long)]
        from: String,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Print every k-th state (0 prints only the endpoints).
        #[arg(long, default_value_t = 0)]
        every: usize,
        #[arg(long)]
        drift_tol: Option<f64>,
        #[arg(long)]
        flow_error_bound: Option<f64>,
    },
    /// Run the full pipeline and emit the JSON report. Exits 1 if the verdict fails.
    Report {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output path; standard output when absent or `-`.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List the built-in systems.
    Builtins,
}

#[derive(Args)]
struct SystemArgs {
    /// System file.
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Use a built-in system instead of a file.
    #[arg(long)]
    builtin: Option<String>,
    /// Degrees of freedom of the built-in system.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

impl SystemArgs {
    fn load(&self) -> Result<SystemSpec> {
        match (&self.file, &self.builtin) {
            (Some(path), _) => load_system(path).with_context(|| format!("loading {}", path.display())),
            (None, Some(name)) => Ok(builtin(name, self.n)?),
            (None, None) => bail!("give a system file or --builtin NAME"),
        }
    }
}

#[derive(Args)]
struct ConfigArgs {
    /// Number of sampled regular points.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Half-width of the sampling box.
    #[arg(long)]
    half_width: Option<f64>,
    /// Flow horizon for the conservation audit.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    drift_tol: Option<f64>,
    #[arg(long)]
    flow_error_bound: Option<f64>,
    /// Start of the conservation audit as `q1=..,p1=..`.
    #[arg(long)]
    start: Option<String>,
}

impl ConfigArgs {
    fn build(&self, spec: &SystemSpec) -> Result<CheckConfig> {
        let d = CheckConfig::default();
        let cfg = CheckConfig {
            samples: self.points.unwrap_or(d.samples),
            half_width: self.half_width.unwrap_or(d.half_width),
            seed: self.seed.unwrap_or(d.seed),
            tolerance: self.tol.unwrap_or(d.tolerance),
            horizon: self.t_end.unwrap_or(d.horizon),
            dt: self.dt.unwrap_or(d.dt),
            drift_tolerance: self.drift_tol.unwrap_or(d.drift_tolerance),
            flow_error_bound: self.flow_error_bound.unwrap_or(d.flow_error_bound),
            start: match &self.start {
                Some(text) => Some(parse_point(text, spec)?.into_vec()),
                None => None,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_point(text: &str, spec: &SystemSpec) -> Result<PhasePoint> {
    let space = &spec.space;
    let mut coords = vec![None; space.dim()];
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').with_context(|| format!("expected `name=value`, got `{part}`"))?;
        let idx = space
            .index_of(name.trim())
            .with_context(|| format!("unknown coordinate `{}`", name.trim()))?;
        let v: f64 = value.trim().parse().with_context(|| format!("bad number `{}`", value.trim()))?;
        if coords[idx].replace(v).is_some() {
            bail!("coordinate `{}` given twice", name.trim());
        }
    }
    let missing: Vec<&str> = (0..space.dim()).filter(|&i| coords[i].is_none()).map(|i| space.name(i)).collect();
    if !missing.is_empty() {
        bail!("missing coordinates: {}", missing.join(", "));
    }
    Ok(PhasePoint::new(coords.into_iter().flatten().collect())?)
}

fn format_point(x: &[f64], spec: &SystemSpec) -> String {
    x.iter()
        .enumerate()
        .map(|(i, v)| format!("{}={v}", spec.space.name(i)))
        .collect::<Vec<_>>()
        .join(",")
}

fn invariants(spec: &SystemSpec, at: &str) -> Result<()> {
    let x = parse_point(at, spec)?;
    let what = lie_derivative_mv(&spec.e, &spec.w)?;
    let wedge = mixed_wedge_ratios(&spec.w, &what, &x)?;
    let spectrum = secular_roots(&spec.w, &what, &x)?;
    let from_roots = y_from_roots(&spectrum);
    println!("point {}", format_point(&x, spec));
    for (i, (c, m)) in spectrum.roots.iter().zip(&spectrum.multiple).enumerate() {
        println!("  c{} = {c:.12}{}", i + 1, if *m { "  (multiple)" } else { "" });
    }
    for (l, (a, b)) in wedge.values.iter().zip(&from_roots.values).enumerate() {
        println!("  Y({}) = {a:.12}  (from roots {b:.12})", l + 1);
    }
    Ok(())
}

struct FlowArgs<'a> {
    from: &'a str,
    t_end: f64,
    dt: f64,
    every: usize,
    drift_tol: Option<f64>,
    flow_error_bound: Option<f64>,
}

fn flow(spec: &SystemSpec, args: FlowArgs<'_>) -> Result<bool> {
    let x0 = parse_point(args.from, spec)?;
    let d = CheckConfig::default();
    let cfg = CheckConfig {
        horizon: args.t_end,
        dt: args.dt,
        drift_tolerance: args.drift_tol.unwrap_or(d.drift_tolerance),
        flow_error_bound: args.flow_error_bound.unwrap_or(d.flow_error_bound),
        ..d
    };
    cfg.validate()?;
    let tr = integrate_flow(&spec.w, &spec.h, &x0, &cfg)?;
    let last = tr.len() - 1;
    for (k, (t, x)) in tr.times.iter().zip(&tr.states).enumerate() {
        let stride = args.every > 0 && k % args.every == 0;
        if k == 0 || k == last || stride {
            println!("t={t:.6} {}", format_point(x, spec));
        }
    }
    println!("error estimate {:.3e}", tr.error_estimate);
    if lie_derivative_mv(&spec.e, &spec.w)?.is_zero() {
        println!("Noether generator: invariants vanish identically");
        return Ok(true);
    }
    match conservation_drift(&spec.w, &spec.e, &spec.h, &x0, &cfg) {
        Ok(audit) => {
            for (l, v) in audit.invariant_drift.iter().enumerate() {
                println!("drift Y({}) {v:.3e}", l + 1);
            }
            for (i, v) in audit.root_drift.iter().enumerate() {
                println!("drift c{} {v:.3e}", i + 1);
            }
            let pass = audit.worst() <= cfg.drift_tolerance;
            println!("conservation {}", if pass { "PASS" } else { "FAIL" });
            Ok(pass)
        }
        Err(e) => bail!("conservation audit: {e}"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { system, config, json } => {
            let spec = system.load()?;
            let report = run_report(&spec, &config.build(&spec)?);
            print!("{}", render_text(&report));
            if let Some(path) = json {
                std::fs::write(&path, to_json(&report)).with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(report.verdict == Verdict::Pass)
        }
        Command::Report { system, config, json } => {
            let spec = system.load()?;
            let report = run_report(&spec, &config.build(&spec)?);
            let text = to_json(&report);
            match json {
                Some(path) if path.as_os_str() != "-" => {
                    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                }
                _ => print!("{text}"),
            }
            Ok(report.verdict == Verdict::Pass)
        }
        Command::Invariants { system, at } => {
            invariants(&system.load()?, &at)?;
            Ok(true)
        }
        Command::Flow { system, from, t_end, dt, every, drift_tol, flow_error_bound } => {
            let spec = system.load()?;
            flow(&spec, FlowArgs { from: &from, t_end, dt, every, drift_tol, flow_error_bound })
        }
        Command::Builtins => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
