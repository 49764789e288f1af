//! Flat dotted-key configuration: `key=value` files with `--key value` overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Arg, ArgAction, Command as ClapCommand};

/// Subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    GroundState,
    Evolve,
    Stability,
    TravelingWave,
    Scatter,
    Threshold,
    Project,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::GroundState,
        Command::Evolve,
        Command::Stability,
        Command::TravelingWave,
        Command::Scatter,
        Command::Threshold,
        Command::Project,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::GroundState => "groundstate",
            Command::Evolve => "evolve",
            Command::Stability => "stability",
            Command::TravelingWave => "travelingwave",
            Command::Scatter => "scatter",
            Command::Threshold => "threshold",
            Command::Project => "project",
            Command::Sweep => "sweep",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Command::GroundState => "Minimize the Gagliardo-Nirenberg functional over Hardy fields",
            Command::Evolve => "Evolve a profile and record conserved quantities",
            Command::Stability => "Orbital stability run of a perturbed profile",
            Command::TravelingWave => "Compare the evolution of a traveling wave with the exact solution",
            Command::Scatter => "Forward/backward scattering diagnostics",
            Command::Threshold => "Bisection on mass between scattering-like and non-scattering-like runs",
            Command::Project => "Apply the Szego projector to a snapshot file",
            Command::Sweep => "Run one experiment over a list of values of one key, in parallel",
        }
    }

    fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Defaults that differ from the global table.
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            // the γ = 2 value needs L = 1000 to sit within 1e-3 of the line constant
            Command::GroundState => &[
                ("grid.n", "32768"),
                ("grid.length", "1000"),
                ("profile.kind", "gaussian"),
                ("profile.sigma", "2"),
            ],
            Command::Stability => &[("evolve.t_final", "20"), ("perturb.delta", "0.01")],
            Command::Scatter => &[
                ("grid.length", "800"),
                ("evolve.dt", "0.01"),
                ("evolve.t_final", "50"),
                ("profile.kind", "gaussian"),
                ("profile.sigma", "0.5"),
            ],
            Command::Threshold => &[
                ("grid.n", "4096"),
                ("evolve.dt", "0.002"),
                ("evolve.t_final", "20"),
                ("profile.kind", "groundstate"),
                ("functional.gamma", "0"),
            ],
            _ => &[],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    PowerOfTwo,
    Count,
    Seed,
    Float,
    Positive,
    NonNegative,
    Choice(&'static [&'static str]),
    Path,
    FloatList,
    Key,
}

struct KeySpec {
    key: &'static str,
    kind: Kind,
    default: Option<&'static str>,
    help: &'static str,
}

pub const PROFILE_KINDS: &[&str] = &["qc", "qc-sampled", "qplus", "gaussian", "groundstate", "zero"];
pub const SCHEMES: &[&str] = &["strang", "rk4"];
pub const SWEEP_EXPERIMENTS: &[&str] = &["stability", "travelingwave", "scatter"];

const KEYS: &[KeySpec] = &[
    KeySpec { key: "grid.n", kind: Kind::PowerOfTwo, default: Some("8192"), help: "number of grid points (power of two)" },
    KeySpec { key: "grid.length", kind: Kind::Positive, default: Some("400"), help: "period L of the circle" },
    KeySpec { key: "evolve.dt", kind: Kind::Positive, default: Some("0.001"), help: "largest time step" },
    KeySpec { key: "evolve.t_final", kind: Kind::Float, default: Some("5"), help: "horizon; negative runs backward" },
    KeySpec { key: "evolve.scheme", kind: Kind::Choice(SCHEMES), default: Some("strang"), help: "strang or rk4" },
    KeySpec { key: "functional.m", kind: Kind::Count, default: Some("2"), help: "nonlinearity degree m" },
    KeySpec { key: "functional.gamma", kind: Kind::NonNegative, default: Some("2"), help: "momentum weight gamma" },
    KeySpec { key: "profile.kind", kind: Kind::Choice(PROFILE_KINDS), default: Some("qc"), help: "initial profile" },
    KeySpec { key: "profile.c", kind: Kind::Positive, default: Some("1"), help: "traveling wave speed" },
    KeySpec { key: "profile.sigma", kind: Kind::Positive, default: Some("1"), help: "gaussian width" },
    KeySpec { key: "profile.width", kind: Kind::Positive, default: Some("0.5"), help: "pole offset matching the ground-state dilation gauge" },
    KeySpec { key: "profile.mass", kind: Kind::NonNegative, default: None, help: "rescale the profile to this L2 norm" },
    KeySpec { key: "perturb.delta", kind: Kind::NonNegative, default: Some("0"), help: "H1 size of the random perturbation" },
    KeySpec { key: "perturb.seed", kind: Kind::Seed, default: Some("0"), help: "perturbation seed" },
    KeySpec { key: "perturb.band", kind: Kind::Positive, default: Some("4"), help: "perturbation wavenumber band [0, band]" },
    KeySpec { key: "out.dir", kind: Kind::Path, default: Some("out"), help: "output directory" },
    KeySpec { key: "out.stride", kind: Kind::Count, default: Some("100"), help: "record diagnostics every this many steps" },
    KeySpec { key: "threshold.lo", kind: Kind::Positive, default: None, help: "scattering-side L2 norm" },
    KeySpec { key: "threshold.hi", kind: Kind::Positive, default: None, help: "non-scattering-side L2 norm" },
    KeySpec { key: "threshold.iterations", kind: Kind::Count, default: Some("12"), help: "bisection steps" },
    KeySpec { key: "project.input", kind: Kind::Path, default: None, help: "snapshot file to project" },
    KeySpec { key: "sweep.experiment", kind: Kind::Choice(SWEEP_EXPERIMENTS), default: Some("travelingwave"), help: "experiment run for every value" },
    KeySpec { key: "sweep.param", kind: Kind::Key, default: Some("profile.c"), help: "key that is swept" },
    KeySpec { key: "sweep.values", kind: Kind::FloatList, default: None, help: "comma-separated values of the swept key" },
];

fn spec(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|s| s.key == key)
}

/// A typed configuration value.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(u64),
    Float(f64),
    Text(String),
    List(Vec<f64>),
}

impl Value {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Int(v) => (*v).into(),
            Value::Float(v) => (*v).into(),
            Value::Text(s) => s.clone().into(),
            Value::List(v) => v.clone().into(),
        }
    }
}

fn parse_value(key: &str, raw: &str) -> Result<Value> {
    let spec = spec(key).ok_or_else(|| anyhow!("unknown key `{key}`"))?;
    let raw = raw.trim();
    let float = || -> Result<f64> {
        let v: f64 = raw
            .parse()
            .map_err(|_| anyhow!("key `{key}`: expected a number, got `{raw}`"))?;
        if !v.is_finite() {
            bail!("key `{key}`: value must be finite, got `{raw}`");
        }
        Ok(v)
    };
    let int = || -> Result<u64> {
        raw.parse()
            .map_err(|_| anyhow!("key `{key}`: expected a non-negative integer, got `{raw}`"))
    };
    Ok(match spec.kind {
        Kind::PowerOfTwo => {
            let v = int()?;
            if !v.is_power_of_two() || v < 16 {
                bail!("key `{key}`: expected a power of two >= 16, got {v}");
            }
            Value::Int(v)
        }
        Kind::Count => {
            let v = int()?;
            if v == 0 {
                bail!("key `{key}`: expected a positive integer, got 0");
            }
            Value::Int(v)
        }
        Kind::Seed => Value::Int(int()?),
        Kind::Float => Value::Float(float()?),
        Kind::Positive => {
            let v = float()?;
            if v <= 0.0 {
                bail!("key `{key}`: expected a positive number, got {v}");
            }
            Value::Float(v)
        }
        Kind::NonNegative => {
            let v = float()?;
            if v < 0.0 {
                bail!("key `{key}`: expected a non-negative number, got {v}");
            }
            Value::Float(v)
        }
        Kind::Choice(options) => {
            if !options.contains(&raw) {
                bail!("key `{key}`: expected one of {}, got `{raw}`", options.join(", "));
            }
            Value::Text(raw.to_string())
        }
        Kind::Path => {
            if raw.is_empty() {
                bail!("key `{key}`: empty path");
            }
            Value::Text(raw.to_string())
        }
        Kind::FloatList => {
            let v = raw
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| anyhow!("key `{key}`: expected comma-separated numbers, got `{raw}`"))
                })
                .collect::<Result<Vec<_>>>()?;
            Value::List(v)
        }
        Kind::Key => {
            match spec_kind(raw) {
                Some(Kind::Float | Kind::Positive | Kind::NonNegative) => {}
                Some(_) => bail!("key `{key}`: `{raw}` is not a numeric key"),
                None => bail!("key `{key}`: unknown key `{raw}`"),
            }
            Value::Text(raw.to_string())
        }
    })
}

fn spec_kind(key: &str) -> Option<Kind> {
    spec(key).map(|s| s.kind)
}

/// A resolved, validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    values: BTreeMap<&'static str, Value>,
}

impl CliConfig {
    /// Defaults for `command`, then the file, then the flags.
    pub fn resolve(command: Command, file: Option<&str>, flags: &[(String, String)]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for s in KEYS {
            if let Some(d) = s.default {
                values.insert(s.key, parse_value(s.key, d)?);
            }
        }
        for (k, v) in command.defaults() {
            values.insert(spec(k).expect("known key").key, parse_value(k, v)?);
        }
        if let Some(text) = file {
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow!("config line {}: expected `key=value`, got `{line}`", lineno + 1))?;
                let k = k.trim();
                let s = spec(k).ok_or_else(|| anyhow!("config line {}: unknown key `{k}`", lineno + 1))?;
                values.insert(s.key, parse_value(k, v).with_context(|| format!("config line {}", lineno + 1))?);
            }
        }
        for (k, v) in flags {
            let s = spec(k).ok_or_else(|| anyhow!("unknown key `{k}`"))?;
            values.insert(s.key, parse_value(k, v)?);
        }
        let cfg = CliConfig { command, values };
        cfg.check_required()?;
        Ok(cfg)
    }

    fn check_required(&self) -> Result<()> {
        let required: &[&str] = match self.command {
            Command::Threshold => &["threshold.lo", "threshold.hi"],
            Command::Project => &["project.input"],
            Command::Sweep => &["sweep.values"],
            _ => &[],
        };
        for k in required {
            if !self.values.contains_key(k) {
                bail!("missing required key `{k}` for `{}`", self.command);
            }
        }
        Ok(())
    }

    /// Copy with one key replaced.
    pub fn with(&self, key: &str, raw: &str) -> Result<Self> {
        let s = spec(key).ok_or_else(|| anyhow!("unknown key `{key}`"))?;
        let mut out = self.clone();
        out.values.insert(s.key, parse_value(key, raw)?);
        Ok(out)
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.get(key)
    }

    pub fn f64(&self, key: &str) -> f64 {
        match self.values.get(key) {
            Some(Value::Float(v)) => *v,
            Some(Value::Int(v)) => *v as f64,
            other => panic!("key `{key}` is not numeric: {other:?}"),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Option<f64> {
        self.values.contains_key(key).then(|| self.f64(key))
    }

    pub fn u64(&self, key: &str) -> u64 {
        match self.values.get(key) {
            Some(Value::Int(v)) => *v,
            other => panic!("key `{key}` is not an integer: {other:?}"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.u64(key) as usize
    }

    pub fn text(&self, key: &str) -> &str {
        match self.values.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("key `{key}` is not text: {other:?}"),
        }
    }

    pub fn list(&self, key: &str) -> &[f64] {
        match self.values.get(key) {
            Some(Value::List(v)) => v,
            other => panic!("key `{key}` is not a list: {other:?}"),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.text("out.dir"))
    }

    /// Every resolved key, for the report echo.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("command".into(), self.command.name().into());
        for (k, v) in &self.values {
            map.insert((*k).to_string(), v.to_json());
        }
        serde_json::Value::Object(map)
    }
}

/// What the command line asked for.
#[derive(Debug)]
pub enum Invocation {
    Run(CliConfig),
    /// Help or version text, already rendered.
    Info(String),
}

fn clap_command() -> ClapCommand {
    let mut root = ClapCommand::new("szego")
        .about("Simulation and ground states of the focusing NLS-Szego equation")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true);
    for c in Command::ALL {
        let mut sub = ClapCommand::new(c.name()).about(c.about()).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("key=value file; flags override its entries"),
        );
        for s in KEYS {
            sub = sub.arg(
                Arg::new(s.key)
                    .long(s.key)
                    .value_name("VALUE")
                    .help(s.help)
                    .action(ArgAction::Set),
            );
        }
        root = root.subcommand(sub);
    }
    root
}

/// Parses `args` (program name first), reading the `--config` file if given.
pub fn parse_config(args: &[String]) -> Result<Invocation> {
    let matches = match clap_command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Invocation::Info(e.render().to_string())),
                _ => Err(anyhow!("{}", e.render().to_string().trim_end())),
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let command = Command::from_name(name).expect("registered subcommand");
    let file = match sub.get_one::<String>("config") {
        Some(path) => Some(std::fs::read_to_string(path).with_context(|| format!("reading config file {path}"))?),
        None => None,
    };
    let flags: Vec<(String, String)> = KEYS
        .iter()
        .filter_map(|s| sub.get_one::<String>(s.key).map(|v| (s.key.to_string(), v.clone())))
        .collect();
    Ok(Invocation::Run(CliConfig::resolve(command, file.as_deref(), &flags)?))
}
