//! The 2×2 matrix game, strategies and interaction bookkeeping shared by the
//! closed forms and both simulators.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("payoff matrix entry {name} is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("stakes undefined: R equals T ({0})")]
    DegenerateMatrix(f64),
}

/// One of the two strategies available in an interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    Cooperate,
    Defect,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::Cooperate, Strategy::Defect];

    pub fn index(self) -> usize {
        match self {
            Strategy::Cooperate => 0,
            Strategy::Defect => 1,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Cooperate => "C",
            Strategy::Defect => "D",
        })
    }
}

/// Output of a behavior rule: play a strategy, or end the relationship.
///
/// `Terminate` is only meaningful while a relationship exists; a fresh
/// partner is always met with a strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BehaviorAction {
    Cooperate,
    Defect,
    Terminate,
}

impl From<Strategy> for BehaviorAction {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Cooperate => BehaviorAction::Cooperate,
            Strategy::Defect => BehaviorAction::Defect,
        }
    }
}

/// Perceptible attribute of an individual. Fixed for the lifetime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Purple,
    Teal,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Purple, Color::Teal];

    pub fn index(self) -> usize {
        match self {
            Color::Purple => 0,
            Color::Teal => 1,
        }
    }

    pub fn other(self) -> Color {
        match self {
            Color::Purple => Color::Teal,
            Color::Teal => Color::Purple,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Purple => "purple",
            Color::Teal => "teal",
        })
    }
}

impl std::str::FromStr for Color {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "purple" | "p" => Ok(Color::Purple),
            "teal" | "t" => Ok(Color::Teal),
            other => Err(format!("unknown color `{other}`")),
        }
    }
}

/// Row-player payoffs of a role-symmetric 2×2 game.
///
/// Rows are the focal player's strategy, columns the partner's:
///
/// ```text
///        C  D
///   C  ( R  S )
///   D  ( T  P )
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    #[serde(rename = "R")]
    pub reward: f64,
    #[serde(rename = "S")]
    pub sucker: f64,
    #[serde(rename = "T")]
    pub temptation: f64,
    #[serde(rename = "P")]
    pub punishment: f64,
}

impl PayoffMatrix {
    pub fn new(reward: f64, temptation: f64, punishment: f64, sucker: f64) -> Result<Self, GameError> {
        let m = PayoffMatrix { reward, sucker, temptation, punishment };
        m.validate()?;
        Ok(m)
    }

    /// R = 3, T = P = 1, S = 0: the matrix used for the payoff bar charts.
    pub const fn reference() -> Self {
        PayoffMatrix { reward: 3.0, sucker: 0.0, temptation: 1.0, punishment: 1.0 }
    }

    pub fn validate(&self) -> Result<(), GameError> {
        for (name, value) in [("R", self.reward), ("S", self.sucker), ("T", self.temptation), ("P", self.punishment)] {
            if !value.is_finite() {
                return Err(GameError::NonFinite { name, value });
            }
        }
        Ok(())
    }

    /// Payoff to a player using `own` against a partner using `other`.
    pub fn payoff(&self, own: Strategy, other: Strategy) -> f64 {
        match (own, other) {
            (Strategy::Cooperate, Strategy::Cooperate) => self.reward,
            (Strategy::Cooperate, Strategy::Defect) => self.sucker,
            (Strategy::Defect, Strategy::Cooperate) => self.temptation,
            (Strategy::Defect, Strategy::Defect) => self.punishment,
        }
    }

    /// `R > T >= P > S`.
    pub fn is_stag_hunt(&self) -> bool {
        self.reward > self.temptation && self.temptation >= self.punishment && self.punishment > self.sucker
    }

    /// Stakes of interaction, `(P - S) / (R - T)`.
    pub fn stakes(&self) -> Result<f64, GameError> {
        let denom = self.reward - self.temptation;
        if denom == 0.0 {
            return Err(GameError::DegenerateMatrix(self.reward));
        }
        Ok((self.punishment - self.sucker) / denom)
    }

    /// Row-major `[[R, S], [T, P]]`, indexed by [`Strategy::index`].
    pub fn to_array(&self) -> [[f64; 2]; 2] {
        [[self.reward, self.sucker], [self.temptation, self.punishment]]
    }

    pub fn from_array(a: [[f64; 2]; 2]) -> Result<Self, GameError> {
        PayoffMatrix::new(a[0][0], a[1][0], a[1][1], a[0][1])
    }
}

/// Free-function form of [`PayoffMatrix::payoff`].
pub fn payoff(matrix: &PayoffMatrix, own: Strategy, other: Strategy) -> f64 {
    matrix.payoff(own, other)
}

pub fn is_stag_hunt(matrix: &PayoffMatrix) -> bool {
    matrix.is_stag_hunt()
}

pub fn stakes(matrix: &PayoffMatrix) -> Result<f64, GameError> {
    matrix.stakes()
}

/// Opaque identifier of an individual within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndividualId(pub u32);

impl fmt::Display for IndividualId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One payoff-bearing step of the focal individual's history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub step_index: u32,
    pub own_strategy: Strategy,
    pub partner_strategy: Strategy,
    pub own_payoff: f64,
    pub partner_id: IndividualId,
}

impl InteractionRecord {
    pub fn new(
        matrix: &PayoffMatrix,
        step_index: u32,
        own_strategy: Strategy,
        partner_strategy: Strategy,
        partner_id: IndividualId,
    ) -> Self {
        InteractionRecord {
            step_index,
            own_strategy,
            partner_strategy,
            own_payoff: matrix.payoff(own_strategy, partner_strategy),
            partner_id,
        }
    }
}
