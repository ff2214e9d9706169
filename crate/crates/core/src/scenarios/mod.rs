//! Named scenarios that reproduce the physical examples as CSV tables plus a
//! JSON summary.
//!
//! Every scenario declares its parameters with defaults and units. Values are
//! resolved from the defaults, then a config file, then command-line flags;
//! the resolved set is echoed into the JSON so every run can be repeated.

mod config;
mod runners;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub use config::{parse_config, ConfigError};
pub use table::Table;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BREMS_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Fig1Crossover,
    FreePacket,
    Interference,
    Harmonic,
    Nparticle,
    ClCompare,
    KernelsDump,
    AbrahamLorentz,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        Self::Fig1Crossover,
        Self::FreePacket,
        Self::Interference,
        Self::Harmonic,
        Self::Nparticle,
        Self::ClCompare,
        Self::KernelsDump,
        Self::AbrahamLorentz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig1Crossover => "fig1_crossover",
            Self::FreePacket => "free_packet",
            Self::Interference => "interference",
            Self::Harmonic => "harmonic",
            Self::Nparticle => "nparticle",
            Self::ClCompare => "cl_compare",
            Self::KernelsDump => "kernels_dump",
            Self::AbrahamLorentz => "abraham_lorentz",
        }
    }

    /// Short names accepted on the command line.
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            Self::Fig1Crossover => &["fig1", "crossover"],
            Self::FreePacket => &["packet"],
            Self::Nparticle => &["n_particle"],
            Self::ClCompare => &["caldeira_leggett"],
            Self::KernelsDump => &["kernels"],
            Self::AbrahamLorentz => &["al"],
            _ => &[],
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Self::Fig1Crossover => "vacuum vs thermal decoherence exponents against t_f/τ_B",
            Self::FreePacket => "spreading of a free Gaussian packet with and without decoherence",
            Self::Interference => "fringes of two colliding packets and their visibility",
            Self::Harmonic => "two packets in a harmonic well: decoherence and damping roots",
            Self::Nparticle => "largest speed of an N-particle superposition keeping D above a target",
            Self::ClCompare => "coherence length against the Caldeira–Leggett thermal length",
            Self::KernelsDump => "dissipation and noise kernels on a time grid",
            Self::AbrahamLorentz => "radiation-damped oscillator trajectory and fitted decay rate",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s || n.aliases().contains(&s.as_str()))
    }

    pub fn params(self) -> &'static [ParamDef] {
        runners::params(self)
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamKind {
    Number,
    Choice(&'static [&'static str]),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDef {
    pub key: &'static str,
    pub default: &'static str,
    pub unit: &'static str,
    pub help: &'static str,
    pub kind: ParamKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Choice(String),
}

impl ParamDef {
    /// Parses a raw value; the error names the offending token.
    pub fn parse(&self, raw: &str) -> Result<ParamValue, String> {
        match self.kind {
            ParamKind::Number => match raw.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(ParamValue::Number(v)),
                _ => Err(format!("malformed number `{raw}` for `{}`", self.key)),
            },
            ParamKind::Choice(opts) => {
                let v = raw.trim().replace('-', "_");
                if opts.contains(&v.as_str()) {
                    Ok(ParamValue::Choice(v))
                } else {
                    Err(format!("`{raw}` is not one of {} for `{}`", opts.join(", "), self.key))
                }
            }
        }
    }
}

/// A fully resolved scenario request.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub parameters: BTreeMap<&'static str, ParamValue>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] crate::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Domain(_) | Self::Io { .. } => 1,
        }
    }
}

impl ScenarioSpec {
    /// Defaults, overridden by `config` entries, overridden by `flags`.
    /// Keys may use `-` or `_`.
    pub fn resolve(
        name: ScenarioName,
        config: &[(String, String)],
        flags: &[(String, String)],
        output_dir: PathBuf,
    ) -> Result<Self, ScenarioError> {
        let defs = name.params();
        let mut parameters = BTreeMap::new();
        for d in defs {
            parameters.insert(d.key, d.parse(d.default).expect("defaults parse"));
        }
        for (key, raw) in config.iter().chain(flags) {
            let key = key.replace('-', "_");
            let d = defs
                .iter()
                .find(|d| d.key == key)
                .ok_or_else(|| ScenarioError::Usage(format!("unknown parameter `{key}` for scenario {name}")))?;
            parameters.insert(d.key, d.parse(raw).map_err(ScenarioError::Usage)?);
        }
        Ok(Self { name, parameters, output_dir })
    }

    pub fn num(&self, key: &str) -> f64 {
        match self.parameters.get(key) {
            Some(ParamValue::Number(v)) => *v,
            _ => panic!("scenario {} has no numeric parameter `{key}`", self.name),
        }
    }

    pub fn choice(&self, key: &str) -> &str {
        match self.parameters.get(key) {
            Some(ParamValue::Choice(v)) => v,
            _ => panic!("scenario {} has no choice parameter `{key}`", self.name),
        }
    }
}

/// Ordered key/value summary of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary(pub Vec<(&'static str, Value)>);

impl Summary {
    pub fn put(&mut self, key: &'static str, value: impl Into<Value>) {
        self.0.push((key, value.into()));
    }

    pub fn put_opt(&mut self, key: &'static str, value: Option<f64>) {
        self.0.push((key, value.map_or(Value::Null, Value::from)));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.0 {
            match v {
                Value::Number(n) => match n.as_f64() {
                    Some(x) if n.is_f64() => writeln!(f, "{k} = {x:.6e}")?,
                    _ => writeln!(f, "{k} = {n}")?,
                },
                other => writeln!(f, "{k} = {other}")?,
            }
        }
        Ok(())
    }
}

/// What a scenario computed, before anything is written.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioData {
    pub table: Table,
    pub summary: Summary,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub json_path: PathBuf,
    pub data: ScenarioData,
}

/// Computes a scenario without touching the file system.
pub fn compute_scenario(spec: &ScenarioSpec) -> Result<ScenarioData, ScenarioError> {
    runners::run(spec)
}

/// Runs a scenario and writes `<name>.csv` and `<name>.json` into the
/// output directory.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunOutput, ScenarioError> {
    let data = compute_scenario(spec)?;
    let dir = &spec.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| ScenarioError::Io { path: dir.clone(), source })?;
    let csv_path = dir.join(format!("{}.csv", spec.name));
    let json_path = dir.join(format!("{}.json", spec.name));
    write(&csv_path, &data.table.to_csv())?;
    write(&json_path, &summary_json(spec, &data))?;
    Ok(RunOutput { csv_path, json_path, data })
}

fn write(path: &Path, text: &str) -> Result<(), ScenarioError> {
    std::fs::write(path, text).map_err(|source| ScenarioError::Io { path: path.to_owned(), source })
}

fn summary_json(spec: &ScenarioSpec, data: &ScenarioData) -> String {
    let results: serde_json::Map<String, Value> =
        data.summary.0.iter().map(|(k, v)| ((*k).to_owned(), v.clone())).collect();
    let doc = serde_json::json!({
        "scenario": spec.name,
        "parameters": spec.parameters,
        "results": results,
        "warnings": data.warnings,
        "columns": data.table.columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
    s.push('\n');
    s
}

/// Least-squares slope of ln|y| against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y != 0.0)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `n` points from `lo` to `hi`, evenly spaced in log.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}
