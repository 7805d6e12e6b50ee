use super::map::GridMap;
use super::EnvError;
use serde::{Deserialize, Serialize};

/// How simultaneous flails translate into boat motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FlailRule {
    /// Every flail rolls on its own; the boat moves if any roll succeeds,
    /// still at most one cell per step.
    #[default]
    #[serde(rename = "independent")]
    Independent,
    /// One roll per step whenever at least one seated player flails.
    #[serde(rename = "capped-at-0.10")]
    CappedAt010,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub races: u32,
    pub partner_choice_steps: u32,
    pub semaphore_steps: u32,
    pub rowing_steps: u32,
    pub paddle_cooldown: u32,
    pub flail_move_prob: f64,
    pub flail_rule: FlailRule,
    pub mismatch_penalty: f64,
    pub apple_reward: f64,
    pub bank_apple_respawn_prob: f64,
    /// Reject effectful actions from disqualified players instead of
    /// ignoring them.
    pub strict_actions: bool,
    #[serde(skip)]
    pub map: Option<GridMap>,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            races: 8,
            partner_choice_steps: 65,
            semaphore_steps: 5,
            rowing_steps: 230,
            paddle_cooldown: 2,
            flail_move_prob: 0.1,
            flail_rule: FlailRule::Independent,
            mismatch_penalty: -0.5,
            apple_reward: 1.0,
            bank_apple_respawn_prob: 0.1,
            strict_actions: false,
            map: None,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn with_races(races: u32, seed: u64) -> Self {
        EnvConfig { races, seed, ..EnvConfig::default() }
    }

    pub fn race_length(&self) -> u32 {
        self.partner_choice_steps + self.semaphore_steps + self.rowing_steps
    }

    pub fn episode_length(&self) -> u64 {
        self.races as u64 * self.race_length() as u64
    }

    pub fn map(&self) -> GridMap {
        self.map.clone().unwrap_or_else(GridMap::default_map)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |msg: String| Err(EnvError::BadConfig(msg));
        if self.races == 0 {
            return bad("races must be positive".into());
        }
        for (name, v) in [
            ("partner_choice_steps", self.partner_choice_steps),
            ("semaphore_steps", self.semaphore_steps),
            ("rowing_steps", self.rowing_steps),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        for (name, p) in
            [("flail_move_prob", self.flail_move_prob), ("bank_apple_respawn_prob", self.bank_apple_respawn_prob)]
        {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        for (name, v) in [("mismatch_penalty", self.mismatch_penalty), ("apple_reward", self.apple_reward)] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lengths() {
        let c = EnvConfig::default();
        assert_eq!(c.race_length(), 300);
        assert_eq!(c.episode_length(), 2400);
        assert_eq!(EnvConfig::with_races(2, 0).episode_length(), 600);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation() {
        let c = EnvConfig { flail_move_prob: 1.5, ..EnvConfig::default() };
        assert!(matches!(c.validate(), Err(EnvError::BadConfig(_))));
        let c = EnvConfig { rowing_steps: 0, ..EnvConfig::default() };
        assert!(c.validate().is_err());
    }
}
