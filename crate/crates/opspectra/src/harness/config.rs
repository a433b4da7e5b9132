//! Experiment configuration: a flat key-value parameter set merged from an
//! optional JSON file and CLI overrides, validated against the key schema of
//! the selected experiment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::Value;

use crate::laws::EdgeVariant;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    GinibreSpectrum,
    ProductSpectrum,
    PowerSpectrum,
    MapSpectrum,
    MapSingular,
    MapEntropy,
    BakerSpectrum,
    BakerSingular,
    FcDensity,
    FitQ,
    ProductPowerTest,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::GinibreSpectrum,
        Experiment::ProductSpectrum,
        Experiment::PowerSpectrum,
        Experiment::MapSpectrum,
        Experiment::MapSingular,
        Experiment::MapEntropy,
        Experiment::BakerSpectrum,
        Experiment::BakerSingular,
        Experiment::FcDensity,
        Experiment::FitQ,
        Experiment::ProductPowerTest,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::GinibreSpectrum => "ginibre-spectrum",
            Experiment::ProductSpectrum => "product-spectrum",
            Experiment::PowerSpectrum => "power-spectrum",
            Experiment::MapSpectrum => "map-spectrum",
            Experiment::MapSingular => "map-singular",
            Experiment::MapEntropy => "map-entropy",
            Experiment::BakerSpectrum => "baker-spectrum",
            Experiment::BakerSingular => "baker-singular",
            Experiment::FcDensity => "fc-density",
            Experiment::FitQ => "fit-q",
            Experiment::ProductPowerTest => "product-power-test",
        }
    }

    /// Parameter keys this experiment requires beyond the defaults.
    fn required_keys(&self) -> &'static [&'static str] {
        match self {
            Experiment::GinibreSpectrum => &["dim"],
            Experiment::ProductSpectrum | Experiment::PowerSpectrum => &["dim", "steps"],
            Experiment::MapSpectrum => &["d", "env"],
            Experiment::MapSingular | Experiment::MapEntropy => &["d", "env"],
            Experiment::BakerSpectrum | Experiment::BakerSingular => &["d", "env", "L"],
            Experiment::FcDensity => &["order"],
            Experiment::FitQ => &["d", "env", "samples"],
            Experiment::ProductPowerTest => &["dim", "steps"],
        }
    }

    /// Optional keys with experiment-level defaults.
    fn optional_keys(&self) -> &'static [&'static str] {
        match self {
            Experiment::GinibreSpectrum => &["xi", "samples", "seed"],
            Experiment::ProductSpectrum | Experiment::PowerSpectrum => &["xi", "samples", "seed"],
            Experiment::MapSpectrum => &["samples", "seed"],
            Experiment::MapSingular | Experiment::MapEntropy => &["steps", "samples", "seed"],
            Experiment::BakerSpectrum | Experiment::BakerSingular => {
                &["steps", "samples", "seed", "phases"]
            }
            Experiment::FcDensity => &["points", "seed"],
            Experiment::FitQ => &["L", "seed", "bins", "variant", "phases"],
            Experiment::ProductPowerTest => &["samples", "seed"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Baker phase selection: fresh uniform phases per sample, or one fixed pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasesMode {
    Random,
    Fixed(f64, f64),
}

impl fmt::Display for PhasesMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhasesMode::Random => f.write_str("random"),
            PhasesMode::Fixed(p1, p2) => write!(f, "fixed:{p1:?},{p2:?}"),
        }
    }
}

impl FromStr for PhasesMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(PhasesMode::Random);
        }
        if let Some(rest) = s.strip_prefix("fixed:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() == 2 {
                let p1 = parts[0].trim().parse::<f64>();
                let p2 = parts[1].trim().parse::<f64>();
                if let (Ok(p1), Ok(p2)) = (p1, p2) {
                    if (0.0..1.0).contains(&p1) && (0.0..1.0).contains(&p2) {
                        return Ok(PhasesMode::Fixed(p1, p2));
                    }
                }
            }
        }
        Err(Error::Config(format!(
            "phases must be \"random\" or \"fixed:<phi1>,<phi2>\" with phases in [0, 1), got {s:?}"
        )))
    }
}

/// Fully resolved parameters for one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub out: PathBuf,
    pub threads: usize,
    pub dim: Option<usize>,
    pub steps: Option<usize>,
    pub d: Option<usize>,
    pub env: Option<usize>,
    pub l: Option<usize>,
    pub xi: f64,
    pub samples: usize,
    pub bins: Option<usize>,
    pub seed: u64,
    pub phases: PhasesMode,
    pub variant: EdgeVariant,
    pub order: Option<u64>,
    pub points: usize,
}

const KNOWN_KEYS: [&str; 17] = [
    "experiment",
    "out",
    "threads",
    "dim",
    "steps",
    "d",
    "env",
    "L",
    "xi",
    "samples",
    "bins",
    "seed",
    "phases",
    "variant",
    "order",
    "points",
    "config",
];

fn get_usize(map: &BTreeMap<String, Value>, key: &str) -> Result<Option<usize>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| Error::Config(format!("{key} must be a non-negative integer, got {v}"))),
    }
}

fn get_f64(map: &BTreeMap<String, Value>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| Error::Config(format!("{key} must be a number, got {v}"))),
    }
}

fn get_str<'a>(map: &'a BTreeMap<String, Value>, key: &str) -> Result<Option<&'a str>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(Some)
            .ok_or_else(|| Error::Config(format!("{key} must be a string, got {v}"))),
    }
}

impl ExperimentConfig {
    /// Builds and validates a config from the merged key-value set. Unknown
    /// keys, missing required keys, and type mismatches are config errors.
    pub fn resolve(experiment: Experiment, merged: &BTreeMap<String, Value>) -> Result<Self> {
        for key in merged.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("unknown config key {key:?}")));
            }
        }
        if let Some(named) = get_str(merged, "experiment")? {
            if named != experiment.name() {
                return Err(Error::Config(format!(
                    "config file names experiment {named:?} but {} was requested",
                    experiment.name()
                )));
            }
        }
        let allowed: Vec<&str> = experiment
            .required_keys()
            .iter()
            .chain(experiment.optional_keys())
            .copied()
            .collect();
        for key in merged.keys() {
            let global = ["experiment", "out", "threads", "config"].contains(&key.as_str());
            if !global && !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "key {key:?} does not apply to experiment {}",
                    experiment.name()
                )));
            }
        }
        for key in experiment.required_keys() {
            if !merged.contains_key(*key) {
                return Err(Error::Config(format!(
                    "experiment {} requires {key:?}",
                    experiment.name()
                )));
            }
        }
        let out = get_str(merged, "out")?
            .map(PathBuf::from)
            .ok_or_else(|| Error::Config("output path (--out) is required".into()))?;
        let samples = get_usize(merged, "samples")?.unwrap_or(1);
        if samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        let threads = get_usize(merged, "threads")?.unwrap_or(1);
        if threads == 0 {
            return Err(Error::Config("threads must be >= 1".into()));
        }
        let xi = get_f64(merged, "xi")?.unwrap_or(1.0);
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::Config(format!("xi must be positive and finite, got {xi}")));
        }
        let points = get_usize(merged, "points")?.unwrap_or(500);
        if merged.contains_key("points") && points < 2 {
            return Err(Error::Config("points must be >= 2".into()));
        }
        let order = match merged.get("order") {
            None => None,
            Some(v) => {
                let n = v.as_u64().ok_or_else(|| {
                    Error::Config(format!("order must be an integer in 1..=3, got {v}"))
                })?;
                if !(1..=3).contains(&n) {
                    return Err(Error::Config(format!("order must be in 1..=3, got {n}")));
                }
                Some(n)
            }
        };
        let phases = match get_str(merged, "phases")? {
            None => PhasesMode::Random,
            Some(s) => s.parse()?,
        };
        let variant = match get_str(merged, "variant")? {
            None => EdgeVariant::StandardErfc,
            Some(s) => s
                .parse()
                .map_err(|e: Error| Error::Config(e.to_string()))?,
        };
        Ok(ExperimentConfig {
            experiment,
            out,
            threads,
            dim: get_usize(merged, "dim")?,
            steps: get_usize(merged, "steps")?,
            d: get_usize(merged, "d")?,
            env: get_usize(merged, "env")?,
            l: get_usize(merged, "L")?,
            xi,
            samples,
            bins: get_usize(merged, "bins")?,
            seed: get_usize(merged, "seed")?.map(|s| s as u64).unwrap_or(0),
            phases,
            variant,
            order,
            points,
        })
    }

    /// Parses a flat JSON object from a config file into a key-value map.
    pub fn load_file(path: &std::path::Path) -> Result<BTreeMap<String, Value>> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        match value {
            Value::Object(map) => Ok(map.into_iter().collect()),
            _ => Err(Error::Config(format!(
                "config {} must be a flat JSON object",
                path.display()
            ))),
        }
    }

    /// The parameters this experiment consumed, in deterministic order, for
    /// manifests and CSV comment headers. The seed is always present.
    pub fn manifest_params(&self) -> BTreeMap<String, Value> {
        let mut out = BTreeMap::new();
        let keys: Vec<&str> = self
            .experiment
            .required_keys()
            .iter()
            .chain(self.experiment.optional_keys())
            .copied()
            .collect();
        for key in keys {
            let value = match key {
                "dim" => self.dim.map(|v| Value::from(v as u64)),
                "steps" => Some(Value::from(self.steps.unwrap_or(1) as u64)),
                "d" => self.d.map(|v| Value::from(v as u64)),
                "env" => self.env.map(|v| Value::from(v as u64)),
                "L" => self.l.map(|v| Value::from(v as u64)),
                "xi" => Some(Value::from(self.xi)),
                "samples" => Some(Value::from(self.samples as u64)),
                "bins" => self.bins.map(|v| Value::from(v as u64)),
                "seed" => Some(Value::from(self.seed)),
                "phases" => Some(Value::from(self.phases.to_string())),
                "variant" => Some(Value::from(self.variant.to_string())),
                "order" => self.order.map(Value::from),
                "points" => Some(Value::from(self.points as u64)),
                _ => None,
            };
            if let Some(v) = value {
                out.insert(key.to_string(), v);
            }
        }
        out.insert("seed".into(), Value::from(self.seed));
        out.insert("threads".into(), Value::from(self.threads as u64));
        out
    }

    /// "# experiment=... key=value ..." comment line for data CSVs. The
    /// worker count is omitted: parallel and serial runs must produce byte
    /// identical files.
    pub fn csv_header(&self) -> String {
        let mut line = format!("# experiment={}", self.experiment.name());
        for (key, value) in self.manifest_params() {
            if key == "threads" {
                continue;
            }
            let rendered = match value {
                Value::String(s) => s,
                other => other.to_string(),
            };
            line.push_str(&format!(" {key}={rendered}"));
        }
        line
    }

    fn need(&self, value: Option<usize>, key: &str) -> Result<usize> {
        value.ok_or_else(|| {
            Error::Config(format!(
                "experiment {} requires {key:?}",
                self.experiment.name()
            ))
        })
    }

    pub fn need_dim(&self) -> Result<usize> {
        self.need(self.dim, "dim")
    }

    pub fn need_steps(&self) -> Result<usize> {
        let steps = self.need(self.steps, "steps")?;
        if steps == 0 {
            return Err(Error::Config("steps must be >= 1".into()));
        }
        Ok(steps)
    }

    pub fn steps_or_one(&self) -> Result<usize> {
        match self.steps {
            None => Ok(1),
            Some(0) => Err(Error::Config("steps must be >= 1".into())),
            Some(s) => Ok(s),
        }
    }

    pub fn need_d(&self) -> Result<usize> {
        self.need(self.d, "d")
    }

    pub fn need_env(&self) -> Result<usize> {
        self.need(self.env, "env")
    }

    pub fn need_l(&self) -> Result<usize> {
        self.need(self.l, "L")
    }

    pub fn need_order(&self) -> Result<u64> {
        self.order
            .ok_or_else(|| Error::Config("experiment fc-density requires \"order\"".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn experiment_names_roundtrip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("unknown-thing".parse::<Experiment>().is_err());
    }

    #[test]
    fn phases_mode_parsing() {
        assert_eq!("random".parse::<PhasesMode>().unwrap(), PhasesMode::Random);
        assert_eq!(
            "fixed:0.25,0.75".parse::<PhasesMode>().unwrap(),
            PhasesMode::Fixed(0.25, 0.75)
        );
        assert!("fixed:1.5,0.0".parse::<PhasesMode>().is_err());
        assert!("fixed:0.5".parse::<PhasesMode>().is_err());
        assert!("sometimes".parse::<PhasesMode>().is_err());
    }

    #[test]
    fn resolve_validates_keys() {
        let base = map(&[
            ("dim", Value::from(100u64)),
            ("out", Value::from("/tmp/x.csv")),
        ]);
        let cfg = ExperimentConfig::resolve(Experiment::GinibreSpectrum, &base).unwrap();
        assert_eq!(cfg.dim, Some(100));
        assert_eq!(cfg.samples, 1);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.xi, 1.0);

        let missing = map(&[("out", Value::from("/tmp/x.csv"))]);
        assert!(ExperimentConfig::resolve(Experiment::GinibreSpectrum, &missing).is_err());

        let unknown = map(&[
            ("dim", Value::from(100u64)),
            ("out", Value::from("/tmp/x.csv")),
            ("bogus", Value::from(1u64)),
        ]);
        assert!(ExperimentConfig::resolve(Experiment::GinibreSpectrum, &unknown).is_err());

        let misapplied = map(&[
            ("dim", Value::from(100u64)),
            ("order", Value::from(2u64)),
            ("out", Value::from("/tmp/x.csv")),
        ]);
        assert!(ExperimentConfig::resolve(Experiment::GinibreSpectrum, &misapplied).is_err());
    }

    #[test]
    fn header_is_deterministic() {
        let base = map(&[
            ("dim", Value::from(64u64)),
            ("samples", Value::from(3u64)),
            ("seed", Value::from(9u64)),
            ("out", Value::from("/tmp/x.csv")),
        ]);
        let cfg = ExperimentConfig::resolve(Experiment::GinibreSpectrum, &base).unwrap();
        assert_eq!(
            cfg.csv_header(),
            "# experiment=ginibre-spectrum dim=64 samples=3 seed=9 xi=1.0"
        );
    }
}
