use super::HarnessError;
use crate::abstract_sim::SamplingPolicy;
use crate::agents::{AwareFidelity, BotSpec, PartnerChoiceMode, RowingType};
use crate::analytic::{AnalyticParams, AnalyticPolicy};
use crate::boatrace::{EnvConfig, GridMap};
use crate::game::{Color, PayoffMatrix};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const DEFAULT_MASTER_SEED: u64 = 20210705;

/// Everything one run of a subcommand depends on. Every section has
/// defaults, so an empty file is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub matrix: PayoffMatrix,
    pub analytic: AnalyticSection,
    pub oracle: OracleSection,
    pub abstract_sim: AbstractSimSection,
    pub env: EnvConfig,
    /// Boat-race map; the built-in map when absent. Relative paths are
    /// resolved against the config file's directory.
    pub map_file: Option<PathBuf>,
    pub schelling: SchellingSection,
    pub discrimination: DiscriminationSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: DEFAULT_MASTER_SEED,
            output_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            matrix: PayoffMatrix::reference(),
            analytic: AnalyticSection::default(),
            oracle: OracleSection::default(),
            abstract_sim: AbstractSimSection::default(),
            env: EnvConfig::default(),
            map_file: None,
            schelling: SchellingSection::default(),
            discrimination: DiscriminationSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Ndjson,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Ndjson => "ndjson",
        }
    }
}

/// A list of ρ values, or an inclusive arithmetic range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RhoGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl RhoGrid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        RhoGrid::Range { start, stop, step }
    }

    /// The grid values. Range points are `start + i * step`, rounded to 12
    /// decimals so that `0.1 + 0.2` style drift does not leak into output.
    pub fn values(&self) -> Result<Vec<f64>, HarnessError> {
        match *self {
            RhoGrid::List(ref v) => Ok(v.clone()),
            RhoGrid::Range { start, stop, step } => {
                if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                    return Err(HarnessError::Config(format!(
                        "rho range needs start <= stop and a positive step, got {start}..{stop} by {step}"
                    )));
                }
                let n = ((stop - start) / step + 1e-9).floor() as u64 + 1;
                Ok((0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSection {
    pub k: Vec<u32>,
    pub rho: RhoGrid,
    pub policies: Vec<PolicyCode>,
}

impl Default for AnalyticSection {
    fn default() -> Self {
        AnalyticSection { k: vec![2, 8], rho: RhoGrid::range(0.0, 1.0, 0.05), policies: PolicyCode::all() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub k: Vec<u32>,
    pub rho: RhoGrid,
    pub policies: Vec<PolicyCode>,
    pub trials: u64,
    /// Agreement tolerance in standard errors.
    pub sigma: f64,
    /// Added to every closed-form value before comparison. Nonzero values
    /// make the check fail on purpose.
    pub closed_form_offset: f64,
}

/// Below this many trials the standard errors are too noisy to gate on.
pub const MIN_ORACLE_TRIALS: u64 = 1000;

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            k: vec![2, 8],
            rho: RhoGrid::range(0.05, 0.95, 0.05),
            policies: PolicyCode::all(),
            trials: 100_000,
            sigma: 3.0,
            closed_form_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbstractSimSection {
    pub k: Vec<u32>,
    pub rho: RhoGrid,
    pub policies: Vec<PolicyCode>,
    pub trials: u64,
    pub histogram: HistogramSection,
}

impl Default for AbstractSimSection {
    fn default() -> Self {
        AbstractSimSection {
            k: vec![8],
            rho: RhoGrid::List(vec![0.5]),
            policies: PolicyCode::all(),
            trials: 1000,
            histogram: HistogramSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramSection {
    pub samplers: Vec<SamplerName>,
    pub n_sims: u64,
    pub races: u32,
    pub episodes_per_sample: u32,
}

impl Default for HistogramSection {
    fn default() -> Self {
        HistogramSection {
            samplers: vec![
                SamplerName(SamplingPolicy::UniformRandom),
                SamplerName(SamplingPolicy::Visual(Color::Purple)),
                SamplerName(SamplingPolicy::Omniscient),
            ],
            n_sims: 10_000,
            races: 1,
            episodes_per_sample: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchellingSection {
    pub episodes_per_point: u32,
}

impl Default for SchellingSection {
    fn default() -> Self {
        SchellingSection { episodes_per_point: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscriminationSection {
    pub episodes: u32,
    pub focal: BotSpec,
    /// Community parameter: `2n` training bots with bias `1/n`.
    pub community_n: u32,
    pub fidelity: AwareFidelity,
    /// Also write each evaluation episode's event log.
    pub write_logs: bool,
    /// Abstract samplers whose histograms are written next to the
    /// environment results, using the `[abstract_sim.histogram]` sizes.
    pub abstract_samplers: Vec<SamplerName>,
}

impl Default for DiscriminationSection {
    fn default() -> Self {
        DiscriminationSection {
            episodes: 50,
            focal: BotSpec::new(RowingType::Reciprocal, Color::Purple, PartnerChoiceMode::Omniscient),
            community_n: 5,
            fidelity: AwareFidelity::Privileged,
            write_logs: false,
            abstract_samplers: Vec::new(),
        }
    }
}

/// An [`AnalyticPolicy`] written by its short code (`VU`, `VR`, `AR`, `O`,
/// `UC`, `UD`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PolicyCode(pub AnalyticPolicy);

impl PolicyCode {
    pub fn all() -> Vec<PolicyCode> {
        AnalyticPolicy::ALL.into_iter().map(PolicyCode).collect()
    }
}

impl TryFrom<String> for PolicyCode {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse().map(PolicyCode)
    }
}

impl From<PolicyCode> for String {
    fn from(p: PolicyCode) -> String {
        p.0.code().to_owned()
    }
}

/// A [`SamplingPolicy`] written as `random`, `omniscient`, `visual-<color>`
/// or `aware-<color>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SamplerName(pub SamplingPolicy);

impl fmt::Display for SamplerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            SamplingPolicy::UniformRandom => f.write_str("random"),
            SamplingPolicy::Omniscient => f.write_str("omniscient"),
            SamplingPolicy::Visual(c) => write!(f, "visual-{c}"),
            SamplingPolicy::Aware(c) => write!(f, "aware-{c}"),
        }
    }
}

impl FromStr for SamplerName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let policy = match s {
            "random" => SamplingPolicy::UniformRandom,
            "omniscient" => SamplingPolicy::Omniscient,
            _ => match s.split_once('-') {
                Some(("visual", c)) => SamplingPolicy::Visual(c.parse()?),
                Some(("aware", c)) => SamplingPolicy::Aware(c.parse()?),
                _ => {
                    return Err(format!(
                        "unknown sampler `{s}` (expected random, omniscient, visual-<color> or aware-<color>)"
                    ))
                }
            },
        };
        Ok(SamplerName(policy))
    }
}

impl TryFrom<String> for SamplerName {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<SamplerName> for String {
    fn from(s: SamplerName) -> String {
        s.to_string()
    }
}

impl ExperimentConfig {
    /// Parses and validates a config file.
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_owned(), source })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml_str(&text, base)
    }

    /// Parses and validates config text; `base_dir` anchors a relative
    /// `map_file`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, HarnessError> {
        let mut config: ExperimentConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(map) = &config.map_file {
            if map.is_relative() {
                config.map_file = Some(base_dir.join(map));
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// The environment config with the map file loaded.
    pub fn env_config(&self) -> Result<EnvConfig, HarnessError> {
        let mut env = self.env.clone();
        if let Some(path) = &self.map_file {
            env.map =
                Some(GridMap::from_file(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?);
        }
        Ok(env)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let config = |msg: String| Err(HarnessError::Config(msg));
        self.matrix.validate().map_err(|e| HarnessError::Config(format!("matrix: {e}")))?;

        let grid = |name: &str, ks: &[u32], rho: &RhoGrid, policies: &[PolicyCode]| -> Result<(), HarnessError> {
            if ks.is_empty() || policies.is_empty() {
                return Err(HarnessError::Config(format!("{name}: k and policies must be non-empty")));
            }
            let rhos = rho.values()?;
            if rhos.is_empty() {
                return Err(HarnessError::Config(format!("{name}: empty rho grid")));
            }
            for &k in ks {
                for &r in &rhos {
                    AnalyticParams::new(k, r, self.matrix).map_err(|e| HarnessError::Config(format!("{name}: {e}")))?;
                }
            }
            Ok(())
        };
        grid("analytic", &self.analytic.k, &self.analytic.rho, &self.analytic.policies)?;
        grid("oracle", &self.oracle.k, &self.oracle.rho, &self.oracle.policies)?;
        grid("abstract_sim", &self.abstract_sim.k, &self.abstract_sim.rho, &self.abstract_sim.policies)?;

        if self.oracle.trials < 2 {
            return config("oracle: at least two trials are needed for a standard error".into());
        }
        if !(self.oracle.sigma > 0.0) {
            return config(format!("oracle: sigma must be positive, got {}", self.oracle.sigma));
        }
        if !self.oracle.closed_form_offset.is_finite() {
            return config("oracle: closed_form_offset must be finite".into());
        }
        if self.abstract_sim.trials == 0 {
            return config("abstract_sim: trials must be positive".into());
        }
        let h = &self.abstract_sim.histogram;
        if h.n_sims == 0 || h.races == 0 || h.episodes_per_sample == 0 {
            return config("abstract_sim.histogram: n_sims, races and episodes_per_sample must be positive".into());
        }

        self.env.validate().map_err(|e| HarnessError::Config(format!("env: {e}")))?;
        if self.schelling.episodes_per_point == 0 {
            return config("schelling: episodes_per_point must be positive".into());
        }
        let d = &self.discrimination;
        if d.episodes == 0 {
            return config("discrimination: episodes must be positive".into());
        }
        if d.community_n == 0 {
            return config("discrimination: community_n must be positive".into());
        }
        Ok(())
    }
}
