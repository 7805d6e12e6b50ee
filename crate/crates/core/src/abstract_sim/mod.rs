//! Agent-based Monte Carlo of the abstract iterated game with partner choice.
//!
//! A focal individual lives through `k` payoff-bearing interactions. Between
//! interactions its partner is kept, or the relationship is ended by a
//! `Terminate` action and a fresh partner is drawn. Terminations consume no
//! step: every one of the `k` steps yields exactly one payoff, matching the
//! step recursion of the closed forms in [`crate::analytic`].
//!
//! Partners come from a [`PartnerSource`]:
//!
//! * [`FinitePopulation`] draws real individuals, never repeating a partner
//!   the focal has already met. When fresh partners run out it either errors
//!   ([`Exhaustion::Strict`]) or falls back to a uniform draw over every
//!   non-focal individual ([`Exhaustion::Fallback`]).
//! * [`BernoulliPool`] emulates an infinite population: each draw is an
//!   independent cooperator with probability `rho` (or 1 once the sampling
//!   rule knows who cooperates). This is the oracle for the closed forms.

mod histogram;

pub use histogram::{simulate_sampling_histogram, DiscriminationHistogram, HistogramConfig};

use crate::analytic::{AnalyticError, AnalyticPolicy};
use crate::game::{BehaviorAction, Color, IndividualId, InteractionRecord, PayoffMatrix, Strategy};
use crate::rng::{derive_seed, make_rng, SimRng};
use crate::stats::mean_and_std_error;
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("no fresh partner left after {partners} draws")]
    PopulationExhausted { partners: u32 },
    #[error("population must contain at least one individual besides the focal")]
    EmptyPopulation,
    #[error("population contains the focal id {0}")]
    FocalInPopulation(IndividualId),
    #[error("iteration count k must be at least 1")]
    ZeroIterations,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// How the next partner is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplingPolicy {
    /// Only individuals of the preferred color, at random when none is left.
    Visual(Color),
    /// Visual until the first interaction completes, cooperators only after.
    Aware(Color),
    /// Cooperators only.
    Omniscient,
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BehaviorPolicy {
    UnconditionalCooperate,
    UnconditionalDefect,
    /// Cooperates in a new relationship, ends it as soon as the partner defects.
    Reciprocator,
}

impl BehaviorPolicy {
    /// Action given the history of the current relationship, as seen from
    /// the acting side: `partner_moves` are the strategies the other side
    /// played so far.
    pub fn respond(self, partner_moves: &[Strategy]) -> BehaviorAction {
        match self {
            BehaviorPolicy::UnconditionalCooperate => BehaviorAction::Cooperate,
            BehaviorPolicy::UnconditionalDefect => BehaviorAction::Defect,
            BehaviorPolicy::Reciprocator => match partner_moves.last() {
                Some(Strategy::Defect) => BehaviorAction::Terminate,
                _ => BehaviorAction::Cooperate,
            },
        }
    }

    /// Whether a fresh relationship with a cooperating focal sees this
    /// behavior cooperate.
    pub fn cooperates(self) -> bool {
        !matches!(self, BehaviorPolicy::UnconditionalDefect)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: IndividualId,
    pub color: Color,
    pub sampling: SamplingPolicy,
    pub behavior: BehaviorPolicy,
    /// Every interaction so far, keyed by partner. Append-only.
    pub history: BTreeMap<IndividualId, Vec<InteractionRecord>>,
}

impl Individual {
    pub fn new(id: IndividualId, color: Color, sampling: SamplingPolicy, behavior: BehaviorPolicy) -> Self {
        Individual { id, color, sampling, behavior, history: BTreeMap::new() }
    }

    /// The focal individual realizing an analytic policy. `preferred` is the
    /// color a visual or aware sampler looks for.
    pub fn for_policy(policy: AnalyticPolicy, preferred: Color) -> Self {
        let (sampling, behavior) = match policy {
            AnalyticPolicy::VisualUnconditional => {
                (SamplingPolicy::Visual(preferred), BehaviorPolicy::UnconditionalCooperate)
            }
            AnalyticPolicy::VisualReciprocator => (SamplingPolicy::Visual(preferred), BehaviorPolicy::Reciprocator),
            AnalyticPolicy::AwareReciprocator => (SamplingPolicy::Aware(preferred), BehaviorPolicy::Reciprocator),
            AnalyticPolicy::Omniscient => (SamplingPolicy::Omniscient, BehaviorPolicy::Reciprocator),
            AnalyticPolicy::UnconditionalCooperate => {
                (SamplingPolicy::UniformRandom, BehaviorPolicy::UnconditionalCooperate)
            }
            AnalyticPolicy::UnconditionalDefect => (SamplingPolicy::UniformRandom, BehaviorPolicy::UnconditionalDefect),
        };
        Individual::new(IndividualId(0), preferred, sampling, behavior)
    }

    fn met(&self, id: IndividualId) -> bool {
        self.history.contains_key(&id)
    }
}

/// A co-player as seen by the focal's sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub id: IndividualId,
    pub color: Color,
    pub behavior: BehaviorPolicy,
}

/// Composition of the population the focal draws partners from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PopulationSpec {
    /// Count per (color, behavior) cell.
    pub counts: BTreeMap<(Color, BehaviorPolicy), u32>,
    /// Explicit members; when present they replace `counts`.
    pub individuals: Option<Vec<Member>>,
}

impl PopulationSpec {
    pub fn from_counts(cells: &[(Color, BehaviorPolicy, u32)]) -> Self {
        let mut counts = BTreeMap::new();
        for &(c, b, n) in cells {
            *counts.entry((c, b)).or_insert(0) += n;
        }
        PopulationSpec { counts, individuals: None }
    }

    pub fn from_members(members: Vec<Member>) -> Self {
        PopulationSpec { counts: BTreeMap::new(), individuals: Some(members) }
    }

    /// Concrete members. Counted cells get ids `1..`, in cell order.
    pub fn members(&self) -> Vec<Member> {
        if let Some(list) = &self.individuals {
            return list.clone();
        }
        let mut out = Vec::new();
        let mut next = 1;
        for (&(color, behavior), &n) in &self.counts {
            for _ in 0..n {
                out.push(Member { id: IndividualId(next), color, behavior });
                next += 1;
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        match &self.individuals {
            Some(list) => list.len(),
            None => self.counts.values().map(|&n| n as usize).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Behavior when the never-repeat rule leaves no eligible partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Exhaustion {
    Strict,
    #[default]
    Fallback,
}

/// Supplies the focal's next partner.
pub trait PartnerSource {
    /// Draws a partner for `focal`. `completed` is the number of interactions
    /// the focal has finished so far.
    fn draw(&mut self, focal: &Individual, completed: u32, rng: &mut SimRng) -> Result<Member, SimError>;
}

pub struct FinitePopulation {
    members: Vec<Member>,
    mode: Exhaustion,
    draws: u32,
}

impl FinitePopulation {
    pub fn new(population: &PopulationSpec, focal: &Individual, mode: Exhaustion) -> Result<Self, SimError> {
        let members = population.members();
        if members.is_empty() {
            return Err(SimError::EmptyPopulation);
        }
        if members.iter().any(|m| m.id == focal.id) {
            return Err(SimError::FocalInPopulation(focal.id));
        }
        Ok(FinitePopulation { members, mode, draws: 0 })
    }

    fn pick<'a>(candidates: &[&'a Member], rng: &mut SimRng) -> Option<&'a Member> {
        candidates.choose(rng).copied()
    }
}

impl PartnerSource for FinitePopulation {
    fn draw(&mut self, focal: &Individual, completed: u32, rng: &mut SimRng) -> Result<Member, SimError> {
        self.draws += 1;
        let fresh: Vec<&Member> = self.members.iter().filter(|m| !focal.met(m.id)).collect();
        let of_color = |c: Color| -> Vec<&Member> { fresh.iter().copied().filter(|m| m.color == c).collect() };
        let cooperators = || -> Vec<&Member> { fresh.iter().copied().filter(|m| m.behavior.cooperates()).collect() };
        let preferred = match focal.sampling {
            SamplingPolicy::Visual(c) => of_color(c),
            SamplingPolicy::Aware(c) if completed == 0 => of_color(c),
            SamplingPolicy::Aware(c) => {
                let coop = cooperators();
                if coop.is_empty() {
                    of_color(c)
                } else {
                    coop
                }
            }
            SamplingPolicy::Omniscient => cooperators(),
            SamplingPolicy::UniformRandom => fresh.clone(),
        };
        if let Some(m) = Self::pick(&preferred, rng).or_else(|| Self::pick(&fresh, rng)) {
            return Ok(*m);
        }
        match self.mode {
            Exhaustion::Strict => Err(SimError::PopulationExhausted { partners: self.draws - 1 }),
            Exhaustion::Fallback => {
                let all: Vec<&Member> = self.members.iter().collect();
                Ok(*Self::pick(&all, rng).expect("population is non-empty"))
            }
        }
    }
}

/// Infinite-population partner source: every draw is a fresh individual who
/// cooperates unconditionally with probability `rho` and defects
/// unconditionally otherwise. Omniscient sampling, and aware sampling after
/// the first interaction, always draw a cooperator.
pub struct BernoulliPool {
    rho: f64,
    next_id: u32,
}

impl BernoulliPool {
    pub fn new(rho: f64) -> Result<Self, SimError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(AnalyticError::RhoOutOfRange(rho).into());
        }
        Ok(BernoulliPool { rho, next_id: 1 })
    }
}

impl PartnerSource for BernoulliPool {
    fn draw(&mut self, focal: &Individual, completed: u32, rng: &mut SimRng) -> Result<Member, SimError> {
        let p = match focal.sampling {
            SamplingPolicy::Omniscient => 1.0,
            SamplingPolicy::Aware(_) if completed > 0 => 1.0,
            _ => self.rho,
        };
        // One uniform per draw keeps the generator stream aligned across
        // sampling rules.
        let u: f64 = rng.random();
        let behavior = if u < p { BehaviorPolicy::UnconditionalCooperate } else { BehaviorPolicy::UnconditionalDefect };
        let color = match focal.sampling {
            SamplingPolicy::Visual(c) | SamplingPolicy::Aware(c) => c,
            _ => focal.color,
        };
        let id = IndividualId(self.next_id);
        self.next_id += 1;
        Ok(Member { id, color, behavior })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub focal_total_payoff: f64,
    pub interactions: Vec<InteractionRecord>,
    pub partners_sampled: u32,
}

/// Plays `k` payoff-bearing steps for `focal` against partners from `source`.
pub fn run_with_source<S: PartnerSource>(
    focal: &Individual,
    source: &mut S,
    k: u32,
    matrix: &PayoffMatrix,
    rng: &mut SimRng,
) -> Result<SimResult, SimError> {
    if k == 0 {
        return Err(SimError::ZeroIterations);
    }
    let mut focal = focal.clone();
    let mut interactions = Vec::with_capacity(k as usize);
    let mut partners_sampled = 0;
    let mut total = 0.0;
    // Current partner and the moves of the current relationship.
    let mut current: Option<Member> = None;
    let mut focal_moves: Vec<Strategy> = Vec::new();
    let mut partner_moves: Vec<Strategy> = Vec::new();
    let mut step = 0;
    while step < k {
        let partner = match current {
            Some(p) => p,
            None => {
                let p = source.draw(&focal, step, rng)?;
                partners_sampled += 1;
                focal_moves.clear();
                partner_moves.clear();
                current = Some(p);
                p
            }
        };
        let own = focal.behavior.respond(&partner_moves);
        let theirs = partner.behavior.respond(&focal_moves);
        let (own, theirs) = match (own, theirs) {
            (BehaviorAction::Terminate, _) | (_, BehaviorAction::Terminate) => {
                // A fresh relationship never opens with Terminate, so this
                // always follows at least one interaction.
                current = None;
                continue;
            }
            (a, b) => (to_strategy(a), to_strategy(b)),
        };
        let record = InteractionRecord::new(matrix, step, own, theirs, partner.id);
        total += record.own_payoff;
        focal.history.entry(partner.id).or_default().push(record);
        interactions.push(record);
        focal_moves.push(own);
        partner_moves.push(theirs);
        step += 1;
    }
    Ok(SimResult { focal_total_payoff: total, interactions, partners_sampled })
}

fn to_strategy(a: BehaviorAction) -> Strategy {
    match a {
        BehaviorAction::Cooperate => Strategy::Cooperate,
        BehaviorAction::Defect => Strategy::Defect,
        BehaviorAction::Terminate => unreachable!("handled by caller"),
    }
}

/// One focal episode against a finite population.
pub fn run_focal_episode(
    focal: &Individual,
    population: &PopulationSpec,
    k: u32,
    matrix: &PayoffMatrix,
    rng_seed: u64,
    mode: Exhaustion,
) -> Result<SimResult, SimError> {
    let mut source = FinitePopulation::new(population, focal, mode)?;
    let mut rng = make_rng(rng_seed);
    run_with_source(focal, &mut source, k, matrix, &mut rng)
}

/// One focal episode in the infinite-population emulation.
pub fn run_bernoulli_episode(
    focal: &Individual,
    rho: f64,
    k: u32,
    matrix: &PayoffMatrix,
    rng_seed: u64,
) -> Result<SimResult, SimError> {
    let mut source = BernoulliPool::new(rho)?;
    let mut rng = make_rng(rng_seed);
    run_with_source(focal, &mut source, k, matrix, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Per-trial totals of `policy` in the infinite-population emulation.
/// Trial `i` uses seed `derive_seed(seed, i)`; results are in trial order.
pub fn policy_payoff_samples(
    policy: AnalyticPolicy,
    rho: f64,
    k: u32,
    matrix: &PayoffMatrix,
    trials: u64,
    seed: u64,
) -> Result<Vec<f64>, SimError> {
    if trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    if k == 0 {
        return Err(SimError::ZeroIterations);
    }
    BernoulliPool::new(rho)?;
    let focal = Individual::for_policy(policy, Color::Purple);
    (0..trials)
        .into_par_iter()
        .map(|i| run_bernoulli_episode(&focal, rho, k, matrix, derive_seed(seed, i)).map(|r| r.focal_total_payoff))
        .collect()
}

/// Monte Carlo mean and standard error of a policy's total payoff.
pub fn estimate_policy_payoff(
    policy: AnalyticPolicy,
    rho: f64,
    k: u32,
    matrix: &PayoffMatrix,
    trials: u64,
    seed: u64,
) -> Result<Estimate, SimError> {
    let samples = policy_payoff_samples(policy, rho, k, matrix, trials, seed)?;
    let (mean, std_error) = mean_and_std_error(&samples);
    Ok(Estimate { mean, std_error, trials })
}

/// Distinct partner ids in a result, in first-meeting order.
pub fn partners_met(result: &SimResult) -> Vec<IndividualId> {
    let mut seen = BTreeSet::new();
    result.interactions.iter().filter_map(|r| seen.insert(r.partner_id).then_some(r.partner_id)).collect()
}
