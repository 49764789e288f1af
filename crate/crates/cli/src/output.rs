//! File formats: snapshots, CSV series and JSON reports.
//!
//! Floats in data files are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly, so files regenerate the values they were written from.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value as Json};
use szego_core::dynamics::TrajectoryRecord;
use szego_core::experiments::{Check, RunReport, Summary};
use szego_core::spectral::{Grid, SpectralField};
use szego_core::Complex64;

const SNAPSHOT_MAGIC: &str = "szego-snapshot 1";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the Fourier coefficients of `f` (line-normalized, FFT order), one `re im`
/// pair per line after a three-line header.
pub fn write_snapshot(path: &Path, f: &SpectralField) -> Result<()> {
    let g = f.grid();
    let mut s = String::with_capacity(48 * g.n() + 64);
    s.push_str(SNAPSHOT_MAGIC);
    s.push('\n');
    s.push_str(&format!("n {}\nlength {}\n", g.n(), fmt_f64(g.length())));
    for c in f.coefficients() {
        s.push_str(&fmt_f64(c.re));
        s.push(' ');
        s.push_str(&fmt_f64(c.im));
        s.push('\n');
    }
    fs::write(path, s).with_context(|| format!("writing snapshot {}", path.display()))
}

pub fn read_snapshot(path: &Path) -> Result<SpectralField> {
    let text = fs::read_to_string(path).with_context(|| format!("reading snapshot {}", path.display()))?;
    let bad = |what: &str| anyhow!("snapshot {}: {what}", path.display());
    let mut lines = text.lines();
    if lines.next() != Some(SNAPSHOT_MAGIC) {
        return Err(bad("missing header"));
    }
    let mut field = |name: &str| -> Result<String> {
        let line = lines.next().ok_or_else(|| bad(&format!("missing `{name}` line")))?;
        line.strip_prefix(name)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| bad(&format!("expected `{name} <value>`, got `{line}`")))
    };
    let n: usize = field("n")?.parse().map_err(|_| bad("bad `n`"))?;
    let length: f64 = field("length")?.parse().map_err(|_| bad("bad `length`"))?;
    let grid = Grid::new(n, length).map_err(|e| bad(&e.to_string()))?;
    let mut coeffs = Vec::with_capacity(n);
    for line in lines {
        let mut it = line.split_whitespace();
        let (Some(re), Some(im), None) = (it.next(), it.next(), it.next()) else {
            bail!("snapshot {}: bad coefficient line `{line}`", path.display());
        };
        let re: f64 = re.parse().map_err(|_| bad("bad number"))?;
        let im: f64 = im.parse().map_err(|_| bad("bad number"))?;
        coeffs.push(Complex64::new(re, im));
    }
    SpectralField::from_coefficients(&grid, coeffs).map_err(|e| bad(&e.to_string()))
}

/// `t,mass,momentum,energy,k_gamma,l6,linf,h1,center`, plus one optional extra column.
pub fn write_series(path: &Path, rec: &TrajectoryRecord, extra: Option<(&str, &[f64])>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    let mut header = vec!["t", "mass", "momentum", "energy", "k_gamma", "l6", "linf", "h1", "center"];
    if let Some((name, _)) = extra {
        header.push(name);
    }
    w.write_record(&header)?;
    for i in 0..rec.len() {
        let c = &rec.conserved[i];
        let mut row: Vec<String> = [
            rec.times[i],
            c.mass,
            c.momentum,
            c.energy,
            c.k_gamma,
            rec.l6[i],
            rec.linf[i],
            rec.h1[i],
            rec.center[i],
        ]
        .iter()
        .map(|v| fmt_f64(*v))
        .collect();
        if let Some((_, col)) = extra {
            row.push(fmt_f64(col[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a CSV from a header and rows of preformatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, v: &Json) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, v)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn checks_json(checks: &[Check]) -> Json {
    checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "value": c.value,
                "bound": c.bound,
                "kind": if c.upper { "max" } else { "min" },
                "pass": c.pass,
            })
        })
        .collect()
}

pub fn summary_json(s: &Summary) -> Json {
    json!({
        "max_orbit_dist": s.max_orbit_dist,
        "drifts": {
            "mass": s.drifts.mass,
            "momentum": s.drifts.momentum,
            "energy": s.drifts.energy,
            "k_gamma": s.drifts.k_gamma,
        },
        "l6_ratio": s.l6_ratio,
        "l6_range": [s.l6_range.0, s.l6_range.1],
        "max_wave_error": s.max_wave_error,
        "energy": s.energy,
        "energy_line_estimate": s.energy_line_estimate,
        "residual_l2": s.residual_l2,
        "residual_h1": s.residual_h1,
        "verdict": s.verdict.map(|v| v.name()),
        "backward": s.backward.map(|b| json!({
            "l6_ratio": b.l6_ratio,
            "residual_l2": b.residual_l2,
            "residual_h1": b.residual_h1,
            "verdict": b.verdict.name(),
        })),
    })
}

/// `report.json` and `series.csv` of an experiment run, in `dir`.
pub fn write_run(dir: &Path, config: Json, report: &RunReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let series = dir.join("series.csv");
    let extra = if !report.orbit.is_empty() {
        Some(("orbit_dist", report.orbit.as_slice()))
    } else if !report.wave_error.is_empty() {
        Some(("wave_error", report.wave_error.as_slice()))
    } else {
        None
    };
    write_series(&series, &report.trajectory, extra)?;
    let v = json!({
        "experiment": report.experiment.name(),
        "config": config,
        "summary": summary_json(&report.summary),
        "checks": checks_json(&report.checks),
        "series_csv_path": series.display().to_string(),
        "pass": report.pass,
    });
    write_json(&dir.join("report.json"), &v)
}
