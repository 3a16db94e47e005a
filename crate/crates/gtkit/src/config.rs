use serde::{Deserialize, Serialize};

use gtkit_core::noise::NoiseModel;
use gtkit_core::trial::{theory_tests, Algorithm, DefectiveSpec, TrialConfig};

use crate::error::{format_err, Result};

pub const DEFAULT_TRIALS: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Keyword {
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "auto")]
    Auto,
}

/// `"d"`: an integer or `"random"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CountOrKeyword", into = "CountOrKeyword")]
pub enum DefectiveCount {
    Exact(usize),
    Random,
}

/// `"T"`: an integer or `"auto"` (size from the decoder's bound).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "CountOrKeyword", into = "CountOrKeyword")]
pub enum TestCount {
    Exact(usize),
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum CountOrKeyword {
    Count(usize),
    Word(Keyword),
}

impl TryFrom<CountOrKeyword> for DefectiveCount {
    type Error = String;
    fn try_from(v: CountOrKeyword) -> std::result::Result<Self, String> {
        match v {
            CountOrKeyword::Count(d) => Ok(DefectiveCount::Exact(d)),
            CountOrKeyword::Word(Keyword::Random) => Ok(DefectiveCount::Random),
            CountOrKeyword::Word(Keyword::Auto) => Err("\"d\" must be an integer or \"random\"".into()),
        }
    }
}

impl From<DefectiveCount> for CountOrKeyword {
    fn from(v: DefectiveCount) -> Self {
        match v {
            DefectiveCount::Exact(d) => CountOrKeyword::Count(d),
            DefectiveCount::Random => CountOrKeyword::Word(Keyword::Random),
        }
    }
}

impl TryFrom<CountOrKeyword> for TestCount {
    type Error = String;
    fn try_from(v: CountOrKeyword) -> std::result::Result<Self, String> {
        match v {
            CountOrKeyword::Count(t) => Ok(TestCount::Exact(t)),
            CountOrKeyword::Word(Keyword::Auto) => Ok(TestCount::Auto),
            CountOrKeyword::Word(Keyword::Random) => Err("\"T\" must be an integer or \"auto\"".into()),
        }
    }
}

impl From<TestCount> for CountOrKeyword {
    fn from(v: TestCount) -> Self {
        match v {
            TestCount::Exact(t) => CountOrKeyword::Count(t),
            TestCount::Auto => CountOrKeyword::Word(Keyword::Auto),
        }
    }
}

/// The `"noise"` object. Unused fields are ignored for the chosen kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::from(NoiseModel::Noiseless)
    }
}

impl NoiseConfig {
    pub fn to_model(&self) -> Result<NoiseModel> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| format_err(format!("noise kind '{}' needs \"{name}\"", self.kind)))
        };
        let model = match self.kind.as_str() {
            "noiseless" => NoiseModel::Noiseless,
            "bsc" => NoiseModel::Bsc { q: need(self.q, "q")? },
            "asym" => NoiseModel::Asymmetric {
                q0: need(self.q0, "q0")?,
                q1: need(self.q1, "q1")?,
            },
            "activation" => NoiseModel::Activation {
                u: need(self.u, "u")?,
                q0: self.q0.unwrap_or(0.0),
            },
            other => return Err(format_err(format!("unknown noise kind '{other}'"))),
        };
        model.validate()?;
        Ok(model)
    }
}

impl From<NoiseModel> for NoiseConfig {
    fn from(m: NoiseModel) -> Self {
        let mut c = NoiseConfig {
            kind: m.kind().to_string(),
            q: None,
            q0: None,
            q1: None,
            u: None,
        };
        match m {
            NoiseModel::Noiseless => {}
            NoiseModel::Bsc { q } => c.q = Some(q),
            NoiseModel::Asymmetric { q0, q1 } => {
                c.q0 = Some(q0);
                c.q1 = Some(q1);
            }
            NoiseModel::Activation { u, q0 } => {
                c.u = Some(u);
                c.q0 = Some(q0);
            }
        }
        c
    }
}

/// One experiment point, as read from the JSON config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(rename = "D")]
    pub max_defectives: usize,
    /// Defaults to `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<DefectiveCount>,
    pub delta: f64,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub algo: String,
    #[serde(rename = "T", default)]
    pub tests: TestCount,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Column-matching slack for nocoma and nounlipo; `τ*` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Use this defective set in every trial instead of drawing one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defectives: Option<Vec<usize>>,
}

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(crate::error::io_err(path))?;
        Self::from_json(&text)
    }

    pub fn algorithm(&self) -> Result<Algorithm> {
        Algorithm::from_name(&self.algo).ok_or_else(|| format_err(format!("unknown algo '{}'", self.algo)))
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        self.noise.to_model()
    }

    pub fn defective_count(&self) -> DefectiveCount {
        self.d.unwrap_or(DefectiveCount::Exact(self.max_defectives))
    }

    /// `⌈T⌉` from the bound, or `None` when no bound covers this
    /// decoder and noise pair.
    pub fn theory_tests(&self) -> Result<Option<usize>> {
        let algo = self.algorithm()?;
        let noise = self.noise_model()?;
        Ok(theory_tests(self.n, self.max_defectives, self.delta, &noise, algo).ok())
    }

    /// Checks everything and resolves `"auto"`.
    pub fn to_trial_config(&self) -> Result<TrialConfig> {
        if self.trials < 1 {
            return Err(format_err("trials must be at least 1"));
        }
        let algo = self.algorithm()?;
        let noise = self.noise_model()?;
        let tests = match self.tests {
            TestCount::Exact(t) => t,
            TestCount::Auto => theory_tests(self.n, self.max_defectives, self.delta, &noise, algo)?,
        };
        let defectives = match (&self.defectives, self.defective_count()) {
            (Some(set), _) => DefectiveSpec::Fixed(set.clone()),
            (None, DefectiveCount::Exact(d)) => DefectiveSpec::Count(d),
            (None, DefectiveCount::Random) => DefectiveSpec::Random,
        };
        let cfg = TrialConfig {
            n: self.n,
            max_defectives: self.max_defectives,
            defectives,
            delta: self.delta,
            noise,
            algo,
            tests,
            tau: self.tau,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
