//! Scripted controllers for the boat race.
//!
//! Bots realize the policy taxonomy of the abstract model: a rowing type
//! (how they behave in the boat) and a partner-choice mode (whom they try to
//! share a boat with).

mod bot;
mod navigate;

pub use bot::{make_controllers, ClaimsBoard, ScriptedBot, SharedBoard};
pub use navigate::{navigate, navigate_to_nearest};

use crate::boatrace::{Badge, PlayerId, Pos};
use crate::game::{Color, Strategy};
use crate::rng::SimRng;
use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowingType {
    /// Paddles whenever its cooldown allows.
    Paddler,
    /// Flails every step.
    Flailer,
    /// Paddles unless the partner is known or seen to flail, then flails.
    Reciprocal,
}

impl RowingType {
    /// Ground-truth strategy label used for association counting.
    pub fn strategy(self) -> Option<Strategy> {
        match self {
            RowingType::Paddler => Some(Strategy::Cooperate),
            RowingType::Flailer => Some(Strategy::Defect),
            RowingType::Reciprocal => None,
        }
    }

    pub fn cooperates(self) -> bool {
        self != RowingType::Flailer
    }
}

impl fmt::Display for RowingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowingType::Paddler => "paddler",
            RowingType::Flailer => "flailer",
            RowingType::Reciprocal => "reciprocal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", content = "preferred", rename_all = "kebab-case")]
pub enum PartnerChoiceMode {
    RandomBoat,
    VisualUnconditional(Color),
    VisualReciprocator(Color),
    AwareReciprocator(Color),
    Omniscient,
}

impl PartnerChoiceMode {
    pub fn preferred(self) -> Option<Color> {
        match self {
            PartnerChoiceMode::VisualUnconditional(c)
            | PartnerChoiceMode::VisualReciprocator(c)
            | PartnerChoiceMode::AwareReciprocator(c) => Some(c),
            _ => None,
        }
    }

    /// Whether the bot picks a partner itself rather than a random boat.
    pub fn chooses(self) -> bool {
        self != PartnerChoiceMode::RandomBoat
    }
}

impl fmt::Display for PartnerChoiceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartnerChoiceMode::RandomBoat => f.write_str("random-boat"),
            PartnerChoiceMode::VisualUnconditional(c) => write!(f, "visual-unconditional({c})"),
            PartnerChoiceMode::VisualReciprocator(c) => write!(f, "visual-reciprocator({c})"),
            PartnerChoiceMode::AwareReciprocator(c) => write!(f, "aware-reciprocator({c})"),
            PartnerChoiceMode::Omniscient => f.write_str("omniscient"),
        }
    }
}

/// How aware bots learn the rowing of players outside their own boat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AwareFidelity {
    /// Read every seated player's effective rowing action.
    #[default]
    Privileged,
    /// Judge other boats by their displacement per three-step window: one
    /// cell counts as a paddle for both rowers, anything else as a flail.
    Inferred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BotSpec {
    pub rowing: RowingType,
    pub color: Color,
    pub choice: PartnerChoiceMode,
}

impl BotSpec {
    pub fn new(rowing: RowingType, color: Color, choice: PartnerChoiceMode) -> Self {
        BotSpec { rowing, color, choice }
    }

    pub fn label(&self) -> String {
        format!("{}/{}", self.rowing, self.choice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Classification {
    #[default]
    Unknown,
    Cooperator,
    Defector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub races_shared: u32,
    pub paddles: u32,
    pub flails: u32,
    pub classified: Classification,
}

/// Cooperator on a strict majority of paddles, Defector when flails are at
/// least as many as paddles and something was observed, Unknown otherwise.
pub fn classify_partner(entry: &LedgerEntry) -> Classification {
    if entry.paddles > entry.flails {
        Classification::Cooperator
    } else if entry.paddles + entry.flails > 0 {
        Classification::Defector
    } else {
        Classification::Unknown
    }
}

/// What a bot remembers about other players, keyed by badge. Lives for one
/// episode.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PartnerLedger {
    pub entries: BTreeMap<Badge, LedgerEntry>,
    /// Partner of the most recent race the bot rowed in.
    pub last_partner: Option<Badge>,
}

impl PartnerLedger {
    pub fn entry(&mut self, badge: Badge) -> &mut LedgerEntry {
        self.entries.entry(badge).or_default()
    }

    pub fn classification(&self, badge: Badge) -> Classification {
        self.entries.get(&badge).map(|e| e.classified).unwrap_or_default()
    }

    pub fn shared_with(&self, badge: Badge) -> bool {
        self.entries.get(&badge).is_some_and(|e| e.races_shared > 0)
    }

    /// Fixes the classification of every still-unknown entry from its
    /// counts. Already classified entries keep their verdict.
    pub fn settle(&mut self) {
        for e in self.entries.values_mut() {
            if e.classified == Classification::Unknown {
                e.classified = classify_partner(e);
            }
        }
    }
}

/// Another player as considered during partner choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub id: PlayerId,
    pub color: Color,
    pub badge: Badge,
    pub pos: Pos,
    /// True rowing type; only filled for omniscient choosers.
    pub rowing: Option<RowingType>,
}

fn nearest(from: Pos, pool: &[&Candidate]) -> Option<PlayerId> {
    pool.iter().min_by_key(|c| (c.pos.manhattan(from), c.id)).map(|c| c.id)
}

fn random(pool: &[&Candidate], rng: &mut SimRng) -> Option<PlayerId> {
    pool.choose(rng).map(|c| c.id)
}

/// Partner a choosing bot should invite this race. `None` only for
/// `RandomBoat` or when there is nobody to choose.
pub fn choose_target(
    mode: PartnerChoiceMode,
    ledger: &PartnerLedger,
    candidates: &[Candidate],
    race: u32,
    from: Pos,
    rng: &mut SimRng,
) -> Option<PlayerId> {
    let all: Vec<&Candidate> = candidates.iter().collect();
    let of_color = |c: Color| -> Vec<&Candidate> { all.iter().copied().filter(|x| x.color == c).collect() };
    let not_defector: Vec<&Candidate> =
        all.iter().copied().filter(|x| ledger.classification(x.badge) != Classification::Defector).collect();
    let fallback = |rng: &mut SimRng| random(&not_defector, rng).or_else(|| random(&all, rng));
    match mode {
        PartnerChoiceMode::RandomBoat => None,
        PartnerChoiceMode::VisualUnconditional(c) => nearest(from, &of_color(c)).or_else(|| random(&all, rng)),
        PartnerChoiceMode::VisualReciprocator(c) => {
            let previous = ledger.last_partner.filter(|b| ledger.classification(*b) == Classification::Cooperator);
            if let Some(p) = previous.and_then(|b| all.iter().find(|x| x.badge == b)) {
                return Some(p.id);
            }
            let fresh: Vec<&Candidate> = of_color(c).into_iter().filter(|x| !ledger.shared_with(x.badge)).collect();
            nearest(from, &fresh).or_else(|| fallback(rng))
        }
        PartnerChoiceMode::AwareReciprocator(c) => {
            if race > 0 {
                let coop: Vec<&Candidate> = all
                    .iter()
                    .copied()
                    .filter(|x| ledger.classification(x.badge) == Classification::Cooperator)
                    .collect();
                if let Some(p) = nearest(from, &coop) {
                    return Some(p);
                }
                let preferred: Vec<&Candidate> = of_color(c)
                    .into_iter()
                    .filter(|x| ledger.classification(x.badge) != Classification::Defector)
                    .collect();
                return nearest(from, &preferred).or_else(|| fallback(rng));
            }
            nearest(from, &of_color(c)).or_else(|| random(&all, rng))
        }
        PartnerChoiceMode::Omniscient => {
            let coop: Vec<&Candidate> =
                all.iter().copied().filter(|x| x.rowing.is_some_and(RowingType::cooperates)).collect();
            nearest(from, &coop).or_else(|| random(&all, rng))
        }
    }
}
