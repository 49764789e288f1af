use super::runs::check_horizon;
use super::*;
use crate::dynamics::evolve;

/// Scattering proxy at a finite horizon, from the `L⁶` decay ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// ratio ≤ 0.25
    ScatteringLike,
    /// ratio ≥ 0.5
    NonScatteringLike,
    Indeterminate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ScatteringLike => "scattering-like",
            Verdict::NonScatteringLike => "non-scattering-like",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Decay below a quarter reads as scattering, staying above a half as not.
pub fn classify_l6_ratio(ratio: f64) -> Verdict {
    if ratio <= 0.25 {
        Verdict::ScatteringLike
    } else if ratio >= 0.5 {
        Verdict::NonScatteringLike
    } else {
        Verdict::Indeterminate
    }
}

/// Shape `F` of the family `{αF}` scanned in mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdFamily {
    /// The computed γ = 0 Hardy ground state at dilation gauge `width`.
    GroundState { width: f64 },
    Reference(ReferenceProfileKind),
}

/// One classified run of the scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanStep {
    /// `L²` norm of the initial data.
    pub mass: f64,
    pub l6_ratio: f64,
    pub verdict: Verdict,
}

/// Result of [`threshold_scan`].
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    /// Final `(scattering side, non-scattering side)` bracket in `L²` norm.
    pub bracket: (f64, f64),
    /// The two end points first, then the bisection steps in order.
    pub steps: Vec<ScanStep>,
    /// The solver's `Ĵ₂^{(0)}` on this grid.
    pub j_hat: f64,
    /// `(3Ĵ₂^{(0)})^{1/4}`, the ground-state `L²` norm.
    pub threshold_mass: f64,
    /// A non-scattering-like run below `threshold_mass` was seen.
    pub witness_below_threshold: bool,
}

struct Family {
    shape: HardyField,
    j_hat: f64,
}

fn family(kind: ThresholdFamily, grid: &Grid) -> Result<Family> {
    let width = match kind {
        ThresholdFamily::GroundState { width } => width,
        ThresholdFamily::Reference(_) => 1.0,
    };
    let gs = resolve_profile(InitialProfile::GroundState { gamma: 0.0, width }, grid)?;
    let j_hat = gs.value.expect("ground states carry their value");
    let shape = match kind {
        ThresholdFamily::GroundState { .. } => gs.field,
        ThresholdFamily::Reference(r) => reference_hardy(r, grid)?,
    };
    Ok(Family { shape, j_hat })
}

fn classify(f: &HardyField, mass: f64, config: &ExperimentConfig) -> Result<ScanStep> {
    let u0 = f.scale_real(mass / f.l2_norm());
    let t = config.evolution.t_final.abs();
    check_horizon(&u0, t)?;
    let mut p = config.evolution.clone();
    p.t_final = t;
    p.keep_snapshots = false;
    p.snapshot_stride = p.step_count().0.max(1);
    let rec = evolve(&u0, &p)?;
    let l6_ratio = l6_stats(&rec).0;
    Ok(ScanStep {
        mass,
        l6_ratio,
        verdict: classify_l6_ratio(l6_ratio),
    })
}

/// Bisection in `L²` norm on `{αF}`, classifying each forward run to
/// `config.evolution.t_final` by its `L⁶` decay ratio.
///
/// The lower bound must not be non-scattering-like and the upper bound must be; an
/// indeterminate midpoint moves the scattering side. After `iterations` steps the
/// bracket is `2^{-iterations}` of the initial one.
pub fn threshold_scan(
    kind: ThresholdFamily,
    bounds: (f64, f64),
    config: &ExperimentConfig,
    iterations: usize,
) -> Result<ThresholdReport> {
    let (lo, hi) = bounds;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::invalid(format!(
            "mass bounds must satisfy 0 < lo < hi, got ({lo}, {hi})"
        )));
    }
    config.evolution.validate()?;
    let grid = config.grid()?;
    let fam = family(kind, &grid)?;
    let a = classify(&fam.shape, lo, config)?;
    let b = classify(&fam.shape, hi, config)?;
    if a.verdict == Verdict::NonScatteringLike || b.verdict != Verdict::NonScatteringLike {
        return Err(Error::invalid(format!(
            "mass bounds do not bracket the change: {lo} is {} (L6 ratio {}), {hi} is {} (L6 ratio {})",
            a.verdict.name(),
            a.l6_ratio,
            b.verdict.name(),
            b.l6_ratio
        )));
    }
    let mut steps = vec![a, b];
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let s = classify(&fam.shape, mid, config)?;
        if s.verdict == Verdict::NonScatteringLike {
            hi = mid;
        } else {
            lo = mid;
        }
        steps.push(s);
    }
    let threshold_mass = (3.0 * fam.j_hat).powf(0.25);
    let witness_below_threshold = steps
        .iter()
        .any(|s| s.verdict == Verdict::NonScatteringLike && s.mass < threshold_mass);
    Ok(ThresholdReport {
        bracket: (lo, hi),
        steps,
        j_hat: fam.j_hat,
        threshold_mass,
        witness_below_threshold,
    })
}

/// Classifies the single member of the family with `L²` norm `mass`.
pub fn classify_mass(kind: ThresholdFamily, mass: f64, config: &ExperimentConfig) -> Result<(ScanStep, f64)> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::invalid(format!("mass must be > 0, got {mass}")));
    }
    config.evolution.validate()?;
    let grid = config.grid()?;
    let fam = family(kind, &grid)?;
    Ok((classify(&fam.shape, mass, config)?, fam.j_hat))
}
