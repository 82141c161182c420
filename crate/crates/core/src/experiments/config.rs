//! Flat `key = value` configuration with typed resolution.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::ansatz::GateFamily;
use crate::error::{Error, Result};
use crate::fermion::Encoding;
use crate::pauli::DENSE_QUBIT_LIMIT;
use crate::simulator::MAX_SIM_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Convergence,
    Correlation,
    Plateau,
    Ed,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::Correlation => "correlation",
            Experiment::Plateau => "plateau",
            Experiment::Ed => "ed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    HubbardNnn,
    Tfim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mapping {
    Jw,
    Bk,
    None,
}

impl Mapping {
    pub fn encoding(self) -> Option<Encoding> {
        match self {
            Mapping::Jw => Some(Encoding::JordanWigner),
            Mapping::Bk => Some(Encoding::BravyiKitaev),
            Mapping::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Filling {
    Half,
    Particles(usize),
}

impl Filling {
    pub fn particles(self, n_sites: usize) -> usize {
        match self {
            Filling::Half => n_sites / 2,
            Filling::Particles(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LayerSpec {
    List(Vec<usize>),
    Max(usize),
}

macro_rules! text_enum {
    ($ty:ty, $what:literal, $($variant:expr => $text:literal),+ $(,)?) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($text); })+
                unreachable!()
            }
        }

        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($text => Ok($variant),)+
                    other => Err(Error::Config(format!(
                        concat!("unknown ", $what, " '{}' (expected one of: {})"),
                        other,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
    };
}

text_enum!(ModelKind, "model", ModelKind::HubbardNnn => "hubbard-nnn", ModelKind::Tfim => "tfim");
text_enum!(Mapping, "mapping", Mapping::Jw => "jw", Mapping::Bk => "bk", Mapping::None => "none");
text_enum!(FamilyName, "gate family", FamilyName(GateFamily::MatchGate) => "match",
    FamilyName(GateFamily::GenericEntangler) => "generic");

/// Text form of a [`GateFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyName(pub GateFamily);

impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filling::Half => f.write_str("half"),
            Filling::Particles(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for Filling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "half" => Ok(Filling::Half),
            other => other.parse().map(Filling::Particles).map_err(|_| {
                Error::Config(format!(
                    "filling must be 'half' or a particle count, got '{other}'"
                ))
            }),
        }
    }
}

impl Serialize for Filling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{}' for {key}", value.trim())))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    let items: Vec<usize> = value
        .split(',')
        .map(|s| parse_num(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("{key} needs at least one value")));
    }
    Ok(items)
}

pub fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(Error::Config(format!(
            "invalid value '{other}' for {key} (expected true or false)"
        ))),
    }
}

/// Settings as read from a file and flags, before defaults and validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub model: Option<ModelKind>,
    pub mapping: Option<Mapping>,
    pub family: Option<GateFamily>,
    pub qubits: Option<Vec<usize>>,
    pub layers: Option<LayerSpec>,
    pub t: Option<f64>,
    pub v1: Option<f64>,
    pub v2: Option<f64>,
    pub h: Option<f64>,
    pub periodic: Option<bool>,
    pub filling: Option<Filling>,
    pub samples: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<String>,
}

/// Every key accepted by [`RawConfig::set`].
pub const CONFIG_KEYS: &[&str] = &[
    "model",
    "mapping",
    "family",
    "qubits",
    "layers",
    "max-layers",
    "t",
    "v1",
    "v2",
    "h",
    "periodic",
    "filling",
    "samples",
    "delta",
    "seed",
    "output",
];

impl RawConfig {
    /// Parse `key = value` lines; `#` starts a comment. Later keys win.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                ))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(&e))))?;
        }
        Ok(cfg)
    }

    /// Set one key. Underscores and dashes are interchangeable in keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let k = key.as_str();
        match k {
            "model" => self.model = Some(value.parse()?),
            "mapping" => self.mapping = Some(value.parse()?),
            "family" => self.family = Some(value.parse::<FamilyName>()?.0),
            "qubits" => self.qubits = Some(parse_list(k, value)?),
            "layers" => self.layers = Some(LayerSpec::List(parse_list(k, value)?)),
            "max-layers" => self.layers = Some(LayerSpec::Max(parse_num(k, value)?)),
            "t" => self.t = Some(parse_num(k, value)?),
            "v1" => self.v1 = Some(parse_num(k, value)?),
            "v2" => self.v2 = Some(parse_num(k, value)?),
            "h" => self.h = Some(parse_num(k, value)?),
            "periodic" => self.periodic = Some(parse_bool(k, value)?),
            "filling" => self.filling = Some(value.parse()?),
            "samples" => self.samples = Some(parse_num(k, value)?),
            "delta" => self.delta = Some(parse_num(k, value)?),
            "seed" => self.seed = Some(parse_num(k, value)?),
            "output" => self.output = Some(value.trim().to_string()),
            _ => {
                return Err(Error::Config(format!(
                    "unknown key '{key}' (known keys: {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Fill defaults and check the combination for `experiment`.
    pub fn resolve(&self, experiment: Experiment) -> Result<ExperimentConfig> {
        let model = self.model.unwrap_or(ModelKind::HubbardNnn);
        let mapping = self.mapping.unwrap_or(match model {
            ModelKind::HubbardNnn => Mapping::Jw,
            ModelKind::Tfim => Mapping::None,
        });
        let family = self.family.unwrap_or(match (model, mapping) {
            (ModelKind::HubbardNnn, Mapping::Jw) => GateFamily::MatchGate,
            _ => GateFamily::GenericEntangler,
        });
        let layers = match self.layers.clone().unwrap_or(match experiment {
            Experiment::Plateau => LayerSpec::List(vec![2, 6, 10]),
            _ => LayerSpec::Max(4),
        }) {
            LayerSpec::List(mut v) => {
                v.sort_unstable();
                v.dedup();
                v
            }
            LayerSpec::Max(max) => (0..=max).collect(),
        };
        let layers = match experiment {
            Experiment::Plateau => layers.into_iter().filter(|&l| l > 0).collect(),
            _ => layers,
        };
        let mut qubits = self.qubits.clone().unwrap_or_else(|| vec![4]);
        qubits.sort_unstable();
        qubits.dedup();
        let cfg = ExperimentConfig {
            experiment,
            model,
            mapping,
            family: FamilyName(family),
            qubits,
            layers,
            t: self.t.unwrap_or(1.0),
            v1: self.v1.unwrap_or(2.0),
            v2: self.v2.unwrap_or(1.0),
            h: self.h.unwrap_or(1.0),
            periodic: self.periodic.unwrap_or(true),
            filling: self.filling.unwrap_or(Filling::Half),
            samples: self.samples.unwrap_or(50),
            delta: self.delta.unwrap_or(crate::optimizer::DEFAULT_FD_STEP),
            seed: self.seed.unwrap_or(0),
            output: self.output.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// A complete, validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub model: ModelKind,
    pub mapping: Mapping,
    pub family: FamilyName,
    pub qubits: Vec<usize>,
    /// Depths to report, ascending.
    pub layers: Vec<usize>,
    pub t: f64,
    pub v1: f64,
    pub v2: f64,
    pub h: f64,
    pub periodic: bool,
    pub filling: Filling,
    pub samples: usize,
    pub delta: f64,
    pub seed: u64,
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn gate_family(&self) -> GateFamily {
        self.family.0
    }

    pub fn max_layers(&self) -> usize {
        self.layers.iter().copied().max().unwrap_or(0)
    }

    /// Whether the run stays in a fixed particle-number sector.
    pub fn conserves_particles(&self) -> bool {
        self.model == ModelKind::HubbardNnn
            && self.mapping == Mapping::Jw
            && self.gate_family() == GateFamily::MatchGate
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match (self.model, self.mapping) {
            (ModelKind::Tfim, Mapping::Jw | Mapping::Bk) => {
                return bad(format!(
                    "invalid combination: model tfim is already a qubit model and needs mapping none, got {}",
                    self.mapping
                ))
            }
            (ModelKind::HubbardNnn, Mapping::None) => {
                return bad("invalid combination: mapping none is only valid for model tfim".into())
            }
            _ => {}
        }
        if self.gate_family() == GateFamily::MatchGate
            && !(self.model == ModelKind::HubbardNnn && self.mapping == Mapping::Jw)
        {
            return bad(format!(
                "invalid combination: family match requires model hubbard-nnn with mapping jw, got {} with {}",
                self.model, self.mapping
            ));
        }
        if self.experiment == Experiment::Correlation && !self.conserves_particles() {
            return bad("invalid combination: correlation needs model hubbard-nnn, mapping jw and family match".into());
        }
        if self.qubits.is_empty() {
            return bad("qubits needs at least one value".into());
        }
        let size_limit = match self.experiment {
            Experiment::Plateau => MAX_SIM_QUBITS,
            _ => DENSE_QUBIT_LIMIT,
        };
        for &n in &self.qubits {
            if n < 2 || n > size_limit {
                return bad(format!(
                    "qubit count {n} out of range 2..={size_limit} for {}",
                    self.experiment.name()
                ));
            }
            if self.periodic && n < 3 {
                return bad(format!("a periodic chain needs at least 3 sites, got {n}"));
            }
            if self.filling.particles(n) > n {
                return bad(format!("filling {} exceeds {n} sites", self.filling));
            }
        }
        if self.experiment == Experiment::Plateau && self.layers.is_empty() {
            return bad("plateau needs at least one layer count >= 1".into());
        }
        if ![self.t, self.v1, self.v2, self.h]
            .iter()
            .all(|x| x.is_finite())
        {
            return bad("couplings must be finite".into());
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be > 0, got {}", self.delta));
        }
        if self.samples < 2 {
            return bad(format!("samples must be >= 2, got {}", self.samples));
        }
        Ok(())
    }
}
