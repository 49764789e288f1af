use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use szego_cli::output::{read_snapshot, write_snapshot};
use szego_core::spectral::{Grid, SpectralField};
use szego_core::Complex64;

fn szego(dir: &Path, args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego"))
        .args(args.split_whitespace())
        .current_dir(dir)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|row| row.unwrap()[idx].parse().unwrap()).collect()
}

fn drift(v: &[f64]) -> f64 {
    let scale = if v[0].abs() > 0.0 { v[0].abs() } else { 1.0 };
    v.iter().map(|x| (x - v[0]).abs() / scale).fold(0.0, f64::max)
}

#[test]
fn projecting_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(64, 10.0).unwrap();
    let f = SpectralField::from_spectrum(&g, |k| Complex64::new((-k * k / 4.0).exp(), 0.3 * k));
    write_snapshot(&dir.path().join("in.snap"), &f).unwrap();
    let a = szego(dir.path(), "project --project.input in.snap --out.dir a");
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = szego(dir.path(), "project --project.input a/projected.snap --out.dir b");
    assert!(b.status.success());
    let pa = fs::read(dir.path().join("a/projected.snap")).unwrap();
    let pb = fs::read(dir.path().join("b/projected.snap")).unwrap();
    assert_eq!(pa, pb);
    let p = read_snapshot(&dir.path().join("a/projected.snap")).unwrap();
    assert_eq!(p.max_negative_mode(), 0.0);
    assert!(json(&dir.path().join("a/report.json"))["summary"]["input_max_negative_mode"].as_f64().unwrap() > 0.0);
}

#[test]
fn series_csv_regenerates_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = szego(
        dir.path(),
        "travelingwave --grid.n 1024 --grid.length 100 --evolve.dt 0.002 --evolve.t_final 0.5 --out.stride 25 --out.dir tw",
    );
    assert_ne!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let series = dir.path().join("tw/series.csv");
    let report = json(&dir.path().join("tw/report.json"));
    let s = &report["summary"];
    let err = column(&series, "wave_error").into_iter().fold(0.0, f64::max);
    assert_eq!(err, s["max_wave_error"].as_f64().unwrap());
    for key in ["mass", "momentum", "energy", "k_gamma"] {
        assert_eq!(drift(&column(&series, key)), s["drifts"][key].as_f64().unwrap(), "{key}");
    }
    let l6 = column(&series, "l6");
    assert_eq!(l6[l6.len() - 1] / l6[0], s["l6_ratio"].as_f64().unwrap());
    assert_eq!(column(&series, "t").len(), 11);
    assert_eq!(report["pass"].as_bool().unwrap(), out.status.code() == Some(0));
    for f in ["meta.json", "report.json", "series.csv"] {
        assert!(dir.path().join("tw").join(f).exists(), "{f}");
    }
}

#[test]
fn outputs_are_reproducible() {
    let args = "stability --grid.n 512 --grid.length 100 --evolve.dt 0.01 --evolve.t_final 1 --out.stride 10 \
                --profile.kind qc-sampled --perturb.delta 0.01 --perturb.seed 4 --perturb.band 2 --out.dir run";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = szego(a.path(), args);
    let rb = szego(b.path(), args);
    assert_ne!(ra.status.code(), Some(1), "{}", String::from_utf8_lossy(&ra.stderr));
    assert_eq!(ra.status.code(), rb.status.code());
    for f in ["report.json", "series.csv"] {
        let x = fs::read(a.path().join("run").join(f)).unwrap();
        let y = fs::read(b.path().join("run").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn traveling_wave_does_not_scatter() {
    let dir = tempfile::tempdir().unwrap();
    let out = szego(
        dir.path(),
        "scatter --profile.kind qc --grid.n 4096 --grid.length 400 --evolve.dt 0.01 --evolve.t_final 10 --out.dir sc",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = &json(&dir.path().join("sc/report.json"))["summary"];
    assert_eq!(s["verdict"], "non-scattering-like");
    assert!(s["l6_ratio"].as_f64().unwrap() > 0.99);
    assert!(s["residual_l2"].as_f64().unwrap() < 1e-2);
    assert_eq!(s["backward"]["verdict"], "non-scattering-like");
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    for (args, needle) in [
        ("evolve --grid.n 100", "grid.n"),
        ("evolve --profile.kind banana", "profile.kind"),
        ("threshold --threshold.lo 1", "threshold.hi"),
        ("project", "project.input"),
        ("frobnicate", "frobnicate"),
        ("project --project.input missing.snap", "missing.snap"),
        ("scatter --grid.length 100 --evolve.t_final 50 --profile.mass 0.1 --grid.n 1024", "wrap"),
    ] {
        let out = szego(dir.path(), args);
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(1), "{args}: {err}");
        assert!(err.contains(needle), "{args}: {err}");
        assert!(err.contains("ERROR"), "{args}: {err}");
    }
    let help = szego(dir.path(), "--help");
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("groundstate"));
}

#[test]
fn failed_checks_exit_with_two() {
    // a coarse step breaks the 1e-10 drift bounds
    let dir = tempfile::tempdir().unwrap();
    let out = szego(dir.path(), "evolve --grid.n 1024 --grid.length 100 --evolve.dt 0.05 --evolve.t_final 1 --out.dir e");
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("e/report.json"));
    assert_eq!(report["pass"], false);
    assert!(report["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}

#[test]
fn gamma_zero_ground_state_is_bracketed() {
    let dir = tempfile::tempdir().unwrap();
    let out = szego(
        dir.path(),
        "groundstate --grid.n 4096 --grid.length 200 --functional.gamma 0 --out.dir gs",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = &json(&dir.path().join("gs/report.json"))["summary"];
    let v = s["value"].as_f64().unwrap();
    assert!(v > 2.4 && v < 13.2, "{v}");
    let q = read_snapshot(&dir.path().join("gs/ground_state.snap")).unwrap();
    assert!(((q.l2_norm().powi(4)) / (3.0 * v) - 1.0).abs() < 1e-12);
    let hist = column(&dir.path().join("gs/series.csv"), "value");
    assert_eq!(*hist.last().unwrap(), v);
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = szego(
        dir.path(),
        "sweep --sweep.experiment stability --sweep.param perturb.delta --sweep.values 0.005,0.01,0.02 \
         --profile.kind qc-sampled --perturb.band 2 --grid.n 512 --grid.length 100 --evolve.dt 0.01 \
         --evolve.t_final 1 --out.stride 10 --out.dir sw",
    );
    assert_ne!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let top = json(&dir.path().join("sw/report.json"));
    let runs = top["summary"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    let mut last = 0.0;
    for (i, delta) in [0.005, 0.01, 0.02].into_iter().enumerate() {
        let r = json(&dir.path().join(format!("sw/run-{i:03}/report.json")));
        assert_eq!(r["config"]["perturb.delta"].as_f64().unwrap(), delta);
        let d = r["summary"]["max_orbit_dist"].as_f64().unwrap();
        assert!(d + 1e-4 >= last, "{d} < {last}");
        last = d;
    }
}
