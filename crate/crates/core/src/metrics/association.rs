use crate::boatrace::{EnvError, EpisodeLog, Event, PlayerId, PLAYERS};
use crate::game::{Color, Strategy};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Counts of boat-sharing events by partner color (rows: purple, teal) and
/// partner strategy (columns: cooperator, defector).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AssociationMatrix {
    pub counts: [[u64; 2]; 2],
}

impl AssociationMatrix {
    pub fn new(counts: [[u64; 2]; 2]) -> Self {
        AssociationMatrix { counts }
    }

    pub fn get(&self, color: Color, strategy: Strategy) -> u64 {
        self.counts[color.index()][strategy.index()]
    }

    pub fn record(&mut self, color: Color, strategy: Strategy) {
        self.counts[color.index()][strategy.index()] += 1;
    }

    pub fn participation(&self) -> u64 {
        participation(self)
    }

    pub fn discrimination_index(&self) -> i64 {
        discrimination_index(self)
    }

    /// `[P_pc, P_pd, P_tc, P_td]`.
    pub fn flat(&self) -> [u64; 4] {
        let [[pc, pd], [tc, td]] = self.counts;
        [pc, pd, tc, td]
    }

    pub fn max_entry(&self) -> u64 {
        self.flat().into_iter().max().unwrap_or(0)
    }

    pub fn swap_rows(&self) -> Self {
        AssociationMatrix::new([self.counts[1], self.counts[0]])
    }

    pub fn swap_columns(&self) -> Self {
        let [[a, b], [c, d]] = self.counts;
        AssociationMatrix::new([[b, a], [d, c]])
    }
}

impl std::ops::Add for AssociationMatrix {
    type Output = AssociationMatrix;

    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out += rhs;
        out
    }
}

impl std::ops::AddAssign for AssociationMatrix {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..2 {
            for j in 0..2 {
                self.counts[i][j] += rhs.counts[i][j];
            }
        }
    }
}

impl std::iter::Sum for AssociationMatrix {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(AssociationMatrix::default(), |a, b| a + b)
    }
}

/// Row difference minus column difference:
/// `|P_pc - P_tc| + |P_pd - P_td| - |P_pc - P_pd| - |P_tc - P_td|`.
/// Positive when partners are sorted by color, negative when by behavior.
pub fn discrimination_index(m: &AssociationMatrix) -> i64 {
    let [pc, pd, tc, td] = m.flat().map(|x| x as i64);
    (pc - tc).abs() + (pd - td).abs() - (pc - pd).abs() - (tc - td).abs()
}

pub fn participation(m: &AssociationMatrix) -> u64 {
    m.flat().iter().sum()
}

/// Which races of an episode to count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RaceFilter {
    First,
    Last,
    #[default]
    All,
}

impl fmt::Display for RaceFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RaceFilter::First => "first",
            RaceFilter::Last => "last",
            RaceFilter::All => "all",
        })
    }
}

impl FromStr for RaceFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(RaceFilter::First),
            "last" => Ok(RaceFilter::Last),
            "all" => Ok(RaceFilter::All),
            other => Err(format!("unknown race filter `{other}`")),
        }
    }
}

impl RaceFilter {
    pub fn admits(self, race: u32, races: u32) -> bool {
        match self {
            RaceFilter::First => race == 0,
            RaceFilter::Last => race + 1 == races,
            RaceFilter::All => true,
        }
    }
}

/// Counts, per race, the partner the focal shared a boat with, using the
/// roster's ground-truth color and strategy. Partners without a strategy
/// label are skipped.
pub fn accumulate_associations(
    log: &EpisodeLog,
    focal: PlayerId,
    race_filter: RaceFilter,
) -> Result<AssociationMatrix, EnvError> {
    if focal >= PLAYERS || focal >= log.header.roster.len() {
        return Err(EnvError::UnknownPlayer(focal));
    }
    let races = log.header.config.races;
    let mut m = AssociationMatrix::default();
    for (_, event) in log.events() {
        let Event::PairFormed { race, players, .. } = *event else { continue };
        if !race_filter.admits(race, races) {
            continue;
        }
        let partner = match players {
            [a, b] if a == focal => b,
            [a, b] if b == focal => a,
            _ => continue,
        };
        let entry = &log.header.roster[partner];
        if let Some(strategy) = entry.strategy {
            m.record(entry.color, strategy);
        }
    }
    Ok(m)
}
