//! The subcommands. Each writes its files into `out.dir` and returns whether every
//! check passed.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::{json, Value as Json};
use szego_core::dynamics::{evolve, EvolutionParams, Nonlinearity, Scheme, TrajectoryRecord};
use szego_core::experiments::{
    initial_data, run_experiment, threshold_scan, Check, Drifts, Experiment, ExperimentConfig, InitialProfile,
    Perturbation, RunReport, Summary, ThresholdFamily,
};
use szego_core::groundstate::{minimize_functional, DescentOptions, FunctionalParams, ReferenceProfileKind};
use szego_core::spectral::szego_project;

use crate::config::{CliConfig, Command};
use crate::output::{checks_json, fmt_f64, read_snapshot, summary_json, write_json, write_run, write_series, write_snapshot, write_table};

pub fn execute(cfg: &CliConfig) -> Result<bool> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    match cfg.command {
        Command::GroundState => groundstate(cfg, &dir),
        Command::Evolve => evolve_cmd(cfg, &dir),
        Command::Stability => experiment(cfg, Experiment::Stability, &dir),
        Command::TravelingWave => experiment(cfg, Experiment::TravelingWave { c: cfg.f64("profile.c") }, &dir),
        Command::Scatter => experiment(cfg, Experiment::Scattering, &dir),
        Command::Threshold => threshold(cfg, &dir),
        Command::Project => project(cfg, &dir),
        Command::Sweep => sweep(cfg, &dir),
    }
}

fn evolution_params(cfg: &CliConfig) -> Result<EvolutionParams> {
    let m = u32::try_from(cfg.u64("functional.m")).context("functional.m is too large")?;
    Ok(EvolutionParams {
        m,
        nonlinearity: Nonlinearity::Focusing,
        dt: cfg.f64("evolve.dt"),
        t_final: cfg.f64("evolve.t_final"),
        scheme: match cfg.text("evolve.scheme") {
            "rk4" => Scheme::Rk4,
            _ => Scheme::Strang,
        },
        snapshot_stride: cfg.usize("out.stride"),
        gamma: cfg.f64("functional.gamma"),
        keep_snapshots: false,
    })
}

fn initial_profile(cfg: &CliConfig) -> InitialProfile {
    match cfg.text("profile.kind") {
        "qc" => InitialProfile::TravelingWave { c: cfg.f64("profile.c") },
        "qc-sampled" => InitialProfile::Reference(ReferenceProfileKind::TravelingQc { c: cfg.f64("profile.c") }),
        "qplus" => InitialProfile::Reference(ReferenceProfileKind::QPlus),
        "gaussian" => InitialProfile::Reference(ReferenceProfileKind::GaussianHardy {
            sigma: cfg.f64("profile.sigma"),
        }),
        "groundstate" => InitialProfile::GroundState {
            gamma: cfg.f64("functional.gamma"),
            width: cfg.f64("profile.width"),
        },
        _ => InitialProfile::Zero,
    }
}

pub fn experiment_config(cfg: &CliConfig) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(evolution_params(cfg)?);
    c.n = cfg.usize("grid.n");
    c.length = cfg.f64("grid.length");
    c.profile = initial_profile(cfg);
    c.mass = cfg.opt_f64("profile.mass");
    c.perturbation = Perturbation {
        delta: cfg.f64("perturb.delta"),
        seed: cfg.u64("perturb.seed"),
        band: (0.0, cfg.f64("perturb.band")),
    };
    c.validate()?;
    Ok(c)
}

fn l6_summary(rec: &TrajectoryRecord) -> (f64, (f64, f64)) {
    let l0 = rec.l6[0];
    if l0 <= 0.0 {
        return (1.0, (1.0, 1.0));
    }
    let (lo, hi) = rec
        .l6
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v / l0), b.max(v / l0)));
    (rec.l6[rec.l6.len() - 1] / l0, (lo, hi))
}

fn groundstate(cfg: &CliConfig, dir: &Path) -> Result<bool> {
    let ec = experiment_config(cfg)?;
    let grid = ec.grid()?;
    let m = ec.evolution.m;
    let gamma = cfg.f64("functional.gamma");
    let params = FunctionalParams::new(m, gamma)?;
    let init = initial_data(&ec, &grid)?;
    info!("minimize m={m} gamma={gamma} n={} length={}", grid.n(), grid.length());
    let r = minimize_functional(&init, &params, &DescentOptions::default())?;
    info!("minimized value={} iterations={} converged={}", r.value, r.iterations, r.converged);
    write_snapshot(&dir.join("minimizer.snap"), r.minimizer.as_field())?;
    write_snapshot(&dir.join("ground_state.snap"), r.ground_state().as_field())?;
    let rows: Vec<Vec<String>> = r
        .history
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt_f64(*v)])
        .collect();
    let series = dir.join("series.csv");
    write_table(&series, &["iteration", "value"], &rows)?;

    let mut checks = vec![Check::at_least("converged", f64::from(u8::from(r.converged)), 1.0)];
    if m == 2 && gamma == 2.0 {
        let exact = 8.0 * PI * PI / 3.0;
        checks.push(Check::at_most("value_error", (r.value - exact).abs() / exact, 1e-3));
    } else if m == 2 && gamma == 0.0 {
        // between the unrestricted minimum and the value at 1/(x + i)
        checks.push(Check::at_least("value_lower", r.value, PI * PI / 4.0));
        checks.push(Check::at_most("value_upper", r.value, 4.0 * PI * PI / 3.0));
    }
    log_checks(&checks);
    let pass = checks.iter().all(|c| c.pass);
    let mu = &r.multipliers;
    let n = &r.norms;
    write_json(
        &dir.join("report.json"),
        &json!({
            "command": "groundstate",
            "config": cfg.to_json(),
            "summary": {
                "value": r.value,
                "iterations": r.iterations,
                "converged": r.converged,
                "gradient_residual": r.gradient_residual,
                "h1_gradient_residual": r.h1_gradient_residual,
                "raw_gradient_residual": r.raw_gradient_residual,
                "norms": {"l2": n.l2, "l2m2": n.l2m2, "hhalf": n.hhalf, "h1": n.h1},
                "multipliers": {
                    "omega": mu.omega,
                    "c": mu.c,
                    "consistency": mu.consistency,
                    "constraint_ok": mu.constraint_ok,
                    "momentum_warning": mu.momentum_warning,
                },
            },
            "checks": checks_json(&checks),
            "series_csv_path": series.display().to_string(),
            "pass": pass,
        }),
    )?;
    Ok(pass)
}

fn evolve_cmd(cfg: &CliConfig, dir: &Path) -> Result<bool> {
    let ec = experiment_config(cfg)?;
    let grid = ec.grid()?;
    let u0 = initial_data(&ec, &grid)?;
    let (steps, dt) = ec.evolution.step_count();
    info!("evolve steps={steps} dt={dt} t_final={}", ec.evolution.t_final);
    let rec = evolve(&u0, &ec.evolution)?;
    write_snapshot(&dir.join("initial.snap"), u0.as_field())?;
    write_snapshot(&dir.join("final.snap"), rec.final_field.as_field())?;
    let series = dir.join("series.csv");
    write_series(&series, &rec, None)?;
    let drifts = Drifts::of(&rec);
    let (l6_ratio, l6_range) = l6_summary(&rec);
    let th = &ec.thresholds;
    let checks = vec![
        Check::at_most("mass_drift", drifts.mass, th.conservation),
        Check::at_most("momentum_drift", drifts.momentum, th.conservation),
        Check::at_most("k_gamma_drift", drifts.k_gamma, th.k_gamma_drift),
    ];
    log_checks(&checks);
    let pass = checks.iter().all(|c| c.pass);
    let summary = Summary {
        drifts,
        l6_ratio,
        l6_range,
        energy: rec.conserved[0].energy,
        ..Summary::default()
    };
    write_json(
        &dir.join("report.json"),
        &json!({
            "command": "evolve",
            "config": cfg.to_json(),
            "summary": summary_json(&summary),
            "checks": checks_json(&checks),
            "series_csv_path": series.display().to_string(),
            "pass": pass,
        }),
    )?;
    Ok(pass)
}

fn log_checks(checks: &[Check]) {
    for c in checks {
        let line = format!("check name={} value={:e} bound={:e} pass={}", c.name, c.value, c.bound, c.pass);
        if c.pass {
            info!("{line}");
        } else {
            warn!("{line}");
        }
    }
}

fn log_report(r: &RunReport) {
    log_checks(&r.checks);
    if let Some(v) = r.summary.verdict {
        info!("verdict={} l6_ratio={}", v.name(), r.summary.l6_ratio);
    }
}

fn experiment(cfg: &CliConfig, kind: Experiment, dir: &Path) -> Result<bool> {
    let ec = experiment_config(cfg)?;
    info!("run experiment={} n={} length={}", kind.name(), ec.n, ec.length);
    let r = run_experiment(kind, &ec)?;
    log_report(&r);
    write_run(dir, config_echo(cfg, &r.config), &r)?;
    Ok(r.pass)
}

/// The resolved keys, with values the run adjusted (the quadrature stride) updated.
fn config_echo(cfg: &CliConfig, used: &ExperimentConfig) -> Json {
    let mut v = cfg.to_json();
    v["out.stride"] = used.evolution.snapshot_stride.into();
    v
}

fn threshold(cfg: &CliConfig, dir: &Path) -> Result<bool> {
    let ec = experiment_config(cfg)?;
    let family = match ec.profile {
        InitialProfile::GroundState { gamma, width } => {
            if gamma != 0.0 {
                bail!("threshold scans use the gamma = 0 ground state, got functional.gamma = {gamma}");
            }
            ThresholdFamily::GroundState { width }
        }
        InitialProfile::Reference(kind) => ThresholdFamily::Reference(kind),
        InitialProfile::TravelingWave { c } => ThresholdFamily::Reference(ReferenceProfileKind::TravelingQc { c }),
        InitialProfile::Zero => bail!("threshold scans need a nonzero profile"),
    };
    let bounds = (cfg.f64("threshold.lo"), cfg.f64("threshold.hi"));
    let iterations = cfg.usize("threshold.iterations");
    info!("threshold lo={} hi={} iterations={iterations}", bounds.0, bounds.1);
    let r = threshold_scan(family, bounds, &ec, iterations)?;
    let rows: Vec<Vec<String>> = r
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| vec![i.to_string(), fmt_f64(s.mass), fmt_f64(s.l6_ratio), s.verdict.name().to_string()])
        .collect();
    let series = dir.join("series.csv");
    write_table(&series, &["step", "mass", "l6_ratio", "verdict"], &rows)?;
    info!(
        "bracket lo={} hi={} threshold_mass={} witness_below_threshold={}",
        r.bracket.0, r.bracket.1, r.threshold_mass, r.witness_below_threshold
    );
    write_json(
        &dir.join("report.json"),
        &json!({
            "command": "threshold",
            "config": cfg.to_json(),
            "summary": {
                "bracket": [r.bracket.0, r.bracket.1],
                "j_hat": r.j_hat,
                "threshold_mass": r.threshold_mass,
                "witness_below_threshold": r.witness_below_threshold,
            },
            "checks": [],
            "series_csv_path": series.display().to_string(),
            "pass": true,
        }),
    )?;
    Ok(true)
}

fn project(cfg: &CliConfig, dir: &Path) -> Result<bool> {
    let input = Path::new(cfg.text("project.input"));
    let f = read_snapshot(input)?;
    let before = f.max_negative_mode();
    let p = szego_project(&f);
    let out = dir.join("projected.snap");
    write_snapshot(&out, p.as_field())?;
    info!("projected input={} output={} removed_l2={}", input.display(), out.display(), (p.as_field() - &f).l2_norm());
    write_json(
        &dir.join("report.json"),
        &json!({
            "command": "project",
            "config": cfg.to_json(),
            "summary": {
                "input_max_negative_mode": before,
                "output_max_negative_mode": p.as_field().max_negative_mode(),
                "output": out.display().to_string(),
            },
            "checks": [],
            "pass": true,
        }),
    )?;
    Ok(true)
}

fn sweep(cfg: &CliConfig, dir: &Path) -> Result<bool> {
    let param = cfg.text("sweep.param").to_string();
    let values = cfg.list("sweep.values").to_vec();
    let runs = values
        .iter()
        .map(|v| {
            let sub = cfg.with(&param, &v.to_string())?;
            let kind = match sub.text("sweep.experiment") {
                "stability" => Experiment::Stability,
                "scatter" => Experiment::Scattering,
                _ => Experiment::TravelingWave { c: sub.f64("profile.c") },
            };
            Ok((sub, kind))
        })
        .collect::<Result<Vec<_>>>()?;
    info!("sweep param={param} runs={} threads={}", runs.len(), rayon::current_num_threads());
    let results: Vec<Result<bool>> = runs
        .par_iter()
        .enumerate()
        .map(|(i, (sub, kind))| {
            let run_dir = dir.join(format!("run-{i:03}"));
            let r = run_experiment(*kind, &experiment_config(sub)?)?;
            write_run(&run_dir, config_echo(sub, &r.config), &r)?;
            Ok(r.pass)
        })
        .collect();
    let mut pass = true;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (i, (v, res)) in values.iter().zip(&results).enumerate() {
        let name = format!("run-{i:03}");
        let (ok, error) = match res {
            Ok(p) => (*p, None),
            Err(e) => {
                warn!("run={name} error={:?}", format!("{e:#}"));
                (false, Some(format!("{e:#}")))
            }
        };
        pass &= ok;
        rows.push(vec![i.to_string(), fmt_f64(*v), ok.to_string(), error.clone().unwrap_or_default()]);
        entries.push(json!({"run": name, "value": v, "pass": ok, "error": error}));
    }
    let series = dir.join("series.csv");
    write_table(&series, &["run", "value", "pass", "error"], &rows)?;
    write_json(
        &dir.join("report.json"),
        &json!({
            "command": "sweep",
            "config": cfg.to_json(),
            "summary": {"param": param, "runs": entries},
            "checks": [],
            "series_csv_path": series.display().to_string(),
            "pass": pass,
        }),
    )?;
    Ok(pass)
}
