use super::MetricsError;
use crate::agents::{BotSpec, PartnerChoiceMode, RowingType};
use crate::game::Color;
use crate::rng::make_rng;
use rand::seq::index::sample;

pub const COMMUNITY_SIZE: usize = 20;
pub const HALF: u32 = 10;

/// The 20-bot community with `n` purple cooperators, `n` teal defectors,
/// `10 - n` purple defectors and `10 - n` teal cooperators, in that order.
/// Every bot picks its boat at random.
pub fn build_community(n: u32) -> Result<Vec<BotSpec>, MetricsError> {
    if n > HALF {
        return Err(MetricsError::OutOfRange(format!("community parameter n must be in 0..=10, got {n}")));
    }
    let cell = |rowing, color, count: u32| {
        std::iter::repeat_n(BotSpec::new(rowing, color, PartnerChoiceMode::RandomBoat), count as usize)
    };
    Ok(cell(RowingType::Paddler, Color::Purple, n)
        .chain(cell(RowingType::Flailer, Color::Teal, n))
        .chain(cell(RowingType::Flailer, Color::Purple, HALF - n))
        .chain(cell(RowingType::Paddler, Color::Teal, HALF - n))
        .collect())
}

/// How well color predicts strategy: `|2n - 10| / 10`, 0 for an unbiased
/// community and 1 when color determines strategy.
pub fn community_bias(n: u32) -> f64 {
    (2.0 * n as f64 - HALF as f64).abs() / HALF as f64
}

/// Uniform sample of `count` distinct community members, in sampling order.
pub fn sample_coplayers(community: &[BotSpec], count: usize, seed: u64) -> Result<Vec<BotSpec>, MetricsError> {
    if count > community.len() {
        return Err(MetricsError::OutOfRange(format!(
            "cannot draw {count} co-players from a community of {}",
            community.len()
        )));
    }
    let mut rng = make_rng(seed);
    Ok(sample(&mut rng, community.len(), count).into_iter().map(|i| community[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_seed;

    fn count(c: &[BotSpec], rowing: RowingType, color: Color) -> usize {
        c.iter().filter(|b| b.rowing == rowing && b.color == color).count()
    }

    #[test]
    fn compositions() {
        let c = build_community(5).unwrap();
        assert_eq!(c.len(), 20);
        for rowing in [RowingType::Paddler, RowingType::Flailer] {
            for color in Color::ALL {
                assert_eq!(count(&c, rowing, color), 5);
            }
        }
        assert_eq!(community_bias(5), 0.0);
        let c = build_community(10).unwrap();
        assert_eq!(count(&c, RowingType::Paddler, Color::Purple), 10);
        assert_eq!(count(&c, RowingType::Flailer, Color::Teal), 10);
        assert_eq!(community_bias(10), 1.0);
        let c = build_community(0).unwrap();
        assert_eq!(count(&c, RowingType::Flailer, Color::Purple), 10);
        assert_eq!(count(&c, RowingType::Paddler, Color::Teal), 10);
        assert_eq!(community_bias(0), 1.0);
        assert!(matches!(build_community(11), Err(MetricsError::OutOfRange(_))));
    }

    #[test]
    fn invariant_counts_for_every_n() {
        for n in 0..=10 {
            let c = build_community(n).unwrap();
            assert_eq!(c.iter().filter(|b| b.rowing == RowingType::Paddler).count(), 10);
            assert_eq!(c.iter().filter(|b| b.color == Color::Purple).count(), 10);
        }
    }

    #[test]
    fn sampling_without_replacement() {
        let community = build_community(10).unwrap();
        let a = sample_coplayers(&community, 5, 9).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a, sample_coplayers(&community, 5, 9).unwrap());
        assert!(sample_coplayers(&community, 21, 9).is_err());
        let idx = sample(&mut make_rng(9), 20, 5).into_vec();
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 5);
    }

    #[test]
    fn hypergeometric_mean_of_purple_cooperators() {
        // 10 purple cooperators among 20, 5 drawn: mean 2.5, variance
        // 5 * 0.5 * 0.5 * 15 / 19.
        let community = build_community(10).unwrap();
        let trials = 10_000;
        let xs: Vec<f64> = (0..trials)
            .map(|i| {
                let r = sample_coplayers(&community, 5, derive_seed(4, i)).unwrap();
                count(&r, RowingType::Paddler, Color::Purple) as f64
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / trials as f64;
        let sd = (5.0 * 0.25 * 15.0 / 19.0f64).sqrt();
        let se = sd / (trials as f64).sqrt();
        assert!((mean - 2.5).abs() < 3.0 * se, "mean {mean}");
    }
}
