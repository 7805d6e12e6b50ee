use super::MetricsError;
use crate::agents::{make_controllers, AwareFidelity, BotSpec, PartnerChoiceMode, RowingType};
use crate::boatrace::{run_episode, EnvConfig, RosterEntry, PLAYERS};
use crate::game::Color;
use crate::rng::{derive_seed, derive_seed_path, make_rng};
use crate::stats::{summarize, Summary};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const COPLAYERS: u32 = (PLAYERS - 1) as u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchellingPoint {
    /// Paddlers among the five co-players.
    pub x: u32,
    pub paddler: Summary,
    pub flailer: Summary,
    pub episodes: u32,
}

/// Random-boat roster for one Schelling episode: the focal first, then `x`
/// paddlers and `5 - x` flailers, all of random color.
pub fn schelling_roster(x: u32, focal: RowingType, seed: u64) -> Vec<BotSpec> {
    let mut rng = make_rng(seed);
    let mut color = move || if rng.random::<bool>() { Color::Purple } else { Color::Teal };
    let mut specs = vec![BotSpec::new(focal, color(), PartnerChoiceMode::RandomBoat)];
    for i in 0..COPLAYERS {
        let rowing = if i < x { RowingType::Paddler } else { RowingType::Flailer };
        specs.push(BotSpec::new(rowing, color(), PartnerChoiceMode::RandomBoat));
    }
    specs
}

pub fn roster_entries(specs: &[BotSpec]) -> Vec<RosterEntry> {
    specs.iter().map(|s| RosterEntry { color: s.color, controller: s.label(), strategy: s.rowing.strategy() }).collect()
}

/// Episode reward of the focal (player 0) joining `x` paddlers.
pub fn schelling_episode(env: &EnvConfig, x: u32, focal: RowingType, seed: u64) -> Result<f64, MetricsError> {
    let specs = schelling_roster(x, focal, derive_seed(seed, 0));
    let config = EnvConfig { seed: derive_seed(seed, 1), ..env.clone() };
    let mut controllers = make_controllers(&specs, AwareFidelity::Privileged, derive_seed(seed, 2));
    let log = run_episode(&config, &roster_entries(&specs), &mut controllers)?;
    Ok(log.final_rewards[0])
}

/// Focal payoffs per type for x = 0..=5 co-player paddlers. Episode `e` of
/// point `x` for focal type `j` (0 paddler, 1 flailer) uses seed
/// `derive_seed_path(seed, [x, j, e])`.
pub fn schelling_diagram(
    env: &EnvConfig,
    episodes_per_point: u32,
    seed: u64,
) -> Result<Vec<SchellingPoint>, MetricsError> {
    if episodes_per_point == 0 {
        return Err(MetricsError::ZeroEpisodes);
    }
    env.validate()?;
    let types = [RowingType::Paddler, RowingType::Flailer];
    let jobs: Vec<(u32, usize, u32)> = (0..=COPLAYERS)
        .flat_map(|x| (0..2).flat_map(move |j| (0..episodes_per_point).map(move |e| (x, j, e))))
        .collect();
    let rewards: Vec<f64> = jobs
        .par_iter()
        .map(|&(x, j, e)| schelling_episode(env, x, types[j], derive_seed_path(seed, &[x as u64, j as u64, e as u64])))
        .collect::<Result<_, _>>()?;
    let per_point = 2 * episodes_per_point as usize;
    Ok(rewards
        .chunks(per_point)
        .enumerate()
        .map(|(x, chunk)| {
            let (p, f) = chunk.split_at(episodes_per_point as usize);
            SchellingPoint { x: x as u32, paddler: summarize(p), flailer: summarize(f), episodes: episodes_per_point }
        })
        .collect())
}

/// Number of sign changes of `paddler.mean - flailer.mean` along x. Points
/// where the means tie do not count as a side.
pub fn curve_crossings(points: &[SchellingPoint]) -> usize {
    let signs: Vec<f64> =
        points.iter().map(|p| p.paddler.mean - p.flailer.mean).filter(|d| *d != 0.0).map(f64::signum).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(x: u32, p: f64, f: f64) -> SchellingPoint {
        let s = |m| Summary { mean: m, q1: m, q3: m };
        SchellingPoint { x, paddler: s(p), flailer: s(f), episodes: 1 }
    }

    #[test]
    fn crossing_count() {
        let pts: Vec<_> = (0..6).map(|x| point(x, x as f64, 2.5)).collect();
        assert_eq!(curve_crossings(&pts), 1);
        let zigzag = vec![point(0, 0.0, 1.0), point(1, 2.0, 1.0), point(2, 0.0, 1.0)];
        assert_eq!(curve_crossings(&zigzag), 2);
    }

    #[test]
    fn roster_composition() {
        let r = schelling_roster(3, RowingType::Flailer, 1);
        assert_eq!(r.len(), 6);
        assert_eq!(r[0].rowing, RowingType::Flailer);
        assert_eq!(r[1..].iter().filter(|s| s.rowing == RowingType::Paddler).count(), 3);
        assert!(r.iter().all(|s| s.choice == PartnerChoiceMode::RandomBoat));
    }

    #[test]
    fn rejects_zero_episodes() {
        assert_eq!(schelling_diagram(&EnvConfig::default(), 0, 1), Err(MetricsError::ZeroEpisodes));
    }
}
