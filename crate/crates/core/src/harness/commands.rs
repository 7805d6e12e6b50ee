use super::config::{ExperimentConfig, SamplerName, MIN_ORACLE_TRIALS};
use super::output::{write_file, write_table, FileHeader};
use super::{HarnessError, RunReport};
use crate::abstract_sim::{
    estimate_policy_payoff, policy_payoff_samples, simulate_sampling_histogram, HistogramConfig, SamplingPolicy,
};
use crate::agents::RowingType;
use crate::analytic::{total_payoff, AnalyticParams, AnalyticPolicy};
use crate::game::{Color, Strategy};
use crate::metrics::{
    aggregate, build_community, community_bias, curve_crossings, evaluate_focal, focal_episode_log, schelling_diagram,
    AssociationMatrix, RaceFilter,
};
use crate::rng::{derive_seed, derive_seed_path};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Stream index for abstract histogram seeds, kept apart from the
/// per-point streams.
const HISTOGRAM_STREAM: u64 = 0x4849_5354;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    AnalyticCurves,
    OracleCheck,
    AbstractSim,
    Schelling,
    Discrimination,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] = [
        Subcommand::AnalyticCurves,
        Subcommand::OracleCheck,
        Subcommand::AbstractSim,
        Subcommand::Schelling,
        Subcommand::Discrimination,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::AnalyticCurves => "analytic-curves",
            Subcommand::OracleCheck => "oracle-check",
            Subcommand::AbstractSim => "abstract-sim",
            Subcommand::Schelling => "schelling",
            Subcommand::Discrimination => "discrimination",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Subcommand::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown subcommand `{s}`"))
    }
}

pub fn run(command: Subcommand, config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    config.validate()?;
    match command {
        Subcommand::AnalyticCurves => analytic_curves(config),
        Subcommand::OracleCheck => oracle_check(config),
        Subcommand::AbstractSim => abstract_sim(config),
        Subcommand::Schelling => schelling(config),
        Subcommand::Discrimination => discrimination(config),
    }
}

fn run_error(e: impl fmt::Display) -> HarnessError {
    HarnessError::Run(e.to_string())
}

fn policy_index(policy: AnalyticPolicy) -> u64 {
    AnalyticPolicy::ALL.iter().position(|&p| p == policy).expect("listed policy") as u64
}

/// Seed of one `(policy, k, rho)` grid point, independent of the order in
/// which the config lists them.
fn point_seed(master: u64, policy: AnalyticPolicy, k: u32, rho_index: usize) -> u64 {
    derive_seed_path(master, &[policy_index(policy), k as u64, rho_index as u64])
}

fn sampler_index(sampler: SamplingPolicy) -> u64 {
    match sampler {
        SamplingPolicy::UniformRandom => 0,
        SamplingPolicy::Omniscient => 1,
        SamplingPolicy::Visual(c) => 2 + c.index() as u64,
        SamplingPolicy::Aware(c) => 4 + c.index() as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticRow {
    pub policy: &'static str,
    pub k: u32,
    pub rho: f64,
    pub total_payoff: f64,
    pub mean_payoff: f64,
}

/// Closed-form payoffs over policies × k × ρ; writes `analytic`.
pub fn analytic_curves(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let section = &config.analytic;
    let rhos = section.rho.values()?;
    let mut rows = Vec::new();
    for policy in &section.policies {
        for &k in &section.k {
            for &rho in &rhos {
                let params =
                    AnalyticParams::new(k, rho, config.matrix).map_err(|e| HarnessError::Config(e.to_string()))?;
                let total = total_payoff(policy.0, &params).map_err(run_error)?.value;
                rows.push(AnalyticRow {
                    policy: policy.0.code(),
                    k,
                    rho,
                    total_payoff: total,
                    mean_payoff: total / k as f64,
                });
            }
        }
    }
    let header = FileHeader::new("analytic", config);
    let path = write_table(&config.output_dir, "analytic", config.format, &header, &rows)?;
    Ok(RunReport { files: vec![path], passed: true, warnings: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub policy: &'static str,
    pub k: u32,
    pub rho: f64,
    pub closed_form: f64,
    pub mc_mean: f64,
    pub std_error: f64,
    /// `(mc_mean - closed_form) / std_error`; zero or infinite when the
    /// Monte Carlo samples are all equal.
    pub z: f64,
    pub pass: bool,
}

/// Compares every closed form with the Monte Carlo oracle; writes
/// `oracle_report`. Fails (exit 1) when any point is further than `sigma`
/// standard errors away, unless the run is flagged underpowered.
pub fn oracle_check(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let section = &config.oracle;
    let rhos = section.rho.values()?;
    let mut rows = Vec::new();
    for policy in &section.policies {
        for &k in &section.k {
            for (i, &rho) in rhos.iter().enumerate() {
                let params =
                    AnalyticParams::new(k, rho, config.matrix).map_err(|e| HarnessError::Config(e.to_string()))?;
                let closed = total_payoff(policy.0, &params).map_err(run_error)?.value + section.closed_form_offset;
                let seed = point_seed(config.master_seed, policy.0, k, i);
                let est = estimate_policy_payoff(policy.0, rho, k, &config.matrix, section.trials, seed)
                    .map_err(run_error)?;
                let diff = est.mean - closed;
                let (z, pass) = if est.std_error > 0.0 {
                    let z = diff / est.std_error;
                    (z, z.abs() <= section.sigma)
                } else if diff.abs() <= 1e-9 * closed.abs().max(1.0) {
                    (0.0, true)
                } else {
                    (diff.signum() * f64::INFINITY, false)
                };
                rows.push(OracleRow {
                    policy: policy.0.code(),
                    k,
                    rho,
                    closed_form: closed,
                    mc_mean: est.mean,
                    std_error: est.std_error,
                    z,
                    pass,
                });
            }
        }
    }
    let failures = rows.iter().filter(|r| !r.pass).count();
    let underpowered = section.trials < MIN_ORACLE_TRIALS;
    let mut warnings = Vec::new();
    if underpowered {
        warnings.push(format!(
            "oracle-check: {} trials per point is below {MIN_ORACLE_TRIALS}; standard errors are unreliable, result flagged underpowered and not gated",
            section.trials
        ));
    }
    if failures > 0 {
        warnings.push(format!(
            "oracle-check: {failures} of {} points outside {} standard errors",
            rows.len(),
            section.sigma
        ));
    }
    let header = FileHeader::new("oracle_report", config)
        .with("points", rows.len())
        .with("failures", failures)
        .with("underpowered", underpowered);
    let path = write_table(&config.output_dir, "oracle_report", config.format, &header, &rows)?;
    Ok(RunReport { files: vec![path], passed: failures == 0 || underpowered, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub policy: &'static str,
    pub rho: f64,
    pub k: u32,
    pub total_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramRow {
    pub d_value: i64,
    pub count: u64,
}

fn histogram_rows(counts: &BTreeMap<i64, u64>) -> Vec<HistogramRow> {
    counts.iter().map(|(&d_value, &count)| HistogramRow { d_value, count }).collect()
}

fn write_abstract_histograms(
    config: &ExperimentConfig,
    samplers: &[SamplerName],
    stem_prefix: &str,
) -> Result<Vec<PathBuf>, HarnessError> {
    let h = &config.abstract_sim.histogram;
    let mut files = Vec::new();
    for sampler in samplers {
        let seed = derive_seed_path(config.master_seed, &[HISTOGRAM_STREAM, sampler_index(sampler.0)]);
        let hist = simulate_sampling_histogram(&HistogramConfig::new(
            sampler.0,
            h.n_sims,
            h.races,
            h.episodes_per_sample,
            seed,
        ));
        let header = FileHeader::new("histogram", config)
            .with("sampler", sampler.to_string())
            .with("n_sims", hist.n_sims)
            .with("mean", hist.mean())
            .with("q025", hist.lower)
            .with("q975", hist.upper);
        let stem = format!("{stem_prefix}{sampler}");
        files.push(write_table(&config.output_dir, &stem, config.format, &header, &histogram_rows(&hist.counts))?);
    }
    Ok(files)
}

/// Per-trial totals of the abstract simulation, plus one discrimination
/// histogram per configured sampler; writes `abstract_sim` and
/// `histogram_<sampler>`.
pub fn abstract_sim(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let section = &config.abstract_sim;
    let rhos = section.rho.values()?;
    let mut rows = Vec::new();
    for policy in &section.policies {
        for &k in &section.k {
            for (i, &rho) in rhos.iter().enumerate() {
                let seed = point_seed(config.master_seed, policy.0, k, i);
                let samples =
                    policy_payoff_samples(policy.0, rho, k, &config.matrix, section.trials, seed).map_err(run_error)?;
                rows.extend(samples.into_iter().enumerate().map(|(trial, total_payoff)| TrialRow {
                    trial: trial as u64,
                    policy: policy.0.code(),
                    rho,
                    k,
                    total_payoff,
                }));
            }
        }
    }
    let header = FileHeader::new("abstract_sim", config);
    let mut files = vec![write_table(&config.output_dir, "abstract_sim", config.format, &header, &rows)?];
    files.extend(write_abstract_histograms(config, &section.histogram.samplers, "histogram_")?);
    Ok(RunReport { files, passed: true, warnings: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchellingRow {
    pub x: u32,
    #[serde(rename = "type")]
    pub kind: RowingType,
    pub mean: f64,
    pub q1: f64,
    pub q3: f64,
    pub n_episodes: u32,
}

/// Focal payoffs against `x` paddling co-players, x = 0..5; writes
/// `schelling`.
pub fn schelling(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let env = config.env_config()?;
    let points = schelling_diagram(&env, config.schelling.episodes_per_point, config.master_seed).map_err(run_error)?;
    let mut rows = Vec::new();
    for kind in [RowingType::Paddler, RowingType::Flailer] {
        for p in &points {
            let s = if kind == RowingType::Paddler { p.paddler } else { p.flailer };
            rows.push(SchellingRow { x: p.x, kind, mean: s.mean, q1: s.q1, q3: s.q3, n_episodes: p.episodes });
        }
    }
    let header = FileHeader::new("schelling", config).with("crossings", curve_crossings(&points));
    let path = write_table(&config.output_dir, "schelling", config.format, &header, &rows)?;
    Ok(RunReport { files: vec![path], passed: true, warnings: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationRow {
    /// Episode index, or `aggregate` for the sum over episodes.
    pub run: String,
    pub race_filter: RaceFilter,
    #[serde(rename = "P_pc")]
    pub purple_cooperate: u64,
    #[serde(rename = "P_pd")]
    pub purple_defect: u64,
    #[serde(rename = "P_tc")]
    pub teal_cooperate: u64,
    #[serde(rename = "P_td")]
    pub teal_defect: u64,
    pub participation: u64,
    pub discrimination_index: i64,
}

impl AssociationRow {
    pub fn new(run: String, race_filter: RaceFilter, m: &AssociationMatrix) -> Self {
        AssociationRow {
            run,
            race_filter,
            purple_cooperate: m.get(Color::Purple, Strategy::Cooperate),
            purple_defect: m.get(Color::Purple, Strategy::Defect),
            teal_cooperate: m.get(Color::Teal, Strategy::Cooperate),
            teal_defect: m.get(Color::Teal, Strategy::Defect),
            participation: m.participation(),
            discrimination_index: m.discrimination_index(),
        }
    }
}

const FILTERS: [RaceFilter; 3] = [RaceFilter::First, RaceFilter::Last, RaceFilter::All];

/// Evaluates the focal controller against a bias-0 community; writes
/// `association` (per episode and aggregate, per race filter) and
/// `histogram` (per-episode index over all races), optionally the episode
/// logs under `episodes/` and abstract histograms.
pub fn discrimination(config: &ExperimentConfig) -> Result<RunReport, HarnessError> {
    let section = &config.discrimination;
    let env = config.env_config()?;
    let community = build_community(section.community_n).map_err(|e| HarnessError::Config(e.to_string()))?;
    let episodes =
        evaluate_focal(section.focal, &community, &env, section.fidelity, section.episodes, config.master_seed)
            .map_err(run_error)?;

    let mut rows = Vec::new();
    for e in &episodes {
        for filter in FILTERS {
            rows.push(AssociationRow::new(e.episode.to_string(), filter, &e.association(filter)));
        }
    }
    for filter in FILTERS {
        rows.push(AssociationRow::new("aggregate".into(), filter, &aggregate(&episodes, filter)));
    }
    let mut histogram = BTreeMap::new();
    for e in &episodes {
        *histogram.entry(e.association(RaceFilter::All).discrimination_index()).or_insert(0u64) += 1;
    }

    let total = aggregate(&episodes, RaceFilter::All);
    let later_penalties: u32 = episodes.iter().map(|e| e.penalties_from_race(1)).sum();
    let disqualified = episodes.iter().filter(|e| e.disqualified).count();
    let mut warnings = Vec::new();
    if disqualified > 0 {
        warnings.push(format!("discrimination: focal disqualified in {disqualified} of {} episodes", episodes.len()));
    }
    let header = FileHeader::new("association", config)
        .with("focal", section.focal.label())
        .with("community_bias", community_bias(section.community_n))
        .with("aggregate_discrimination_index", total.discrimination_index())
        .with("focal_penalties_after_first_race", later_penalties)
        .with("focal_disqualified_episodes", disqualified);
    let mut files = vec![write_table(&config.output_dir, "association", config.format, &header, &rows)?];
    let header = FileHeader::new("histogram", config).with("race_filter", RaceFilter::All).with("unit", "episode");
    files.push(write_table(&config.output_dir, "histogram", config.format, &header, &histogram_rows(&histogram))?);

    if section.write_logs {
        for e in 0..section.episodes {
            let log = focal_episode_log(
                section.focal,
                &community,
                &env,
                section.fidelity,
                derive_seed(config.master_seed, e as u64),
            )
            .map_err(run_error)?;
            let path = config.output_dir.join("episodes").join(format!("episode_{e:03}.ndjson"));
            write_file(&path, log.to_ndjson().as_bytes())?;
            files.push(path);
        }
    }
    files.extend(write_abstract_histograms(config, &section.abstract_samplers, "histogram_abstract_")?);
    Ok(RunReport { files, passed: true, warnings })
}
