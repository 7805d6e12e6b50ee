//! Closed-form total payoffs of the partner-choice policies and the
//! dominance predicates built on them.
//!
//! `rho` is the probability that a freshly sampled partner cooperates and
//! `k` the number of payoff-bearing interactions the focal individual lives
//! through.

use crate::game::{GameError, PayoffMatrix};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("rho must lie in [0, 1], got {0}")]
    RhoOutOfRange(f64),
    #[error("iteration count k must be at least 1")]
    ZeroIterations,
    #[error("invalid rho for dominance check: rho = {rho}, rho' = {rho_prime}")]
    InvalidRho { rho: f64, rho_prime: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Policies with a closed-form total payoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnalyticPolicy {
    /// Samples one color, always cooperates. Same closed form as
    /// [`AnalyticPolicy::UnconditionalCooperate`].
    VisualUnconditional,
    VisualReciprocator,
    AwareReciprocator,
    Omniscient,
    UnconditionalCooperate,
    UnconditionalDefect,
}

impl AnalyticPolicy {
    /// The four policies of the information-processing ladder, lowest first.
    pub const LADDER: [AnalyticPolicy; 4] = [
        AnalyticPolicy::VisualUnconditional,
        AnalyticPolicy::VisualReciprocator,
        AnalyticPolicy::AwareReciprocator,
        AnalyticPolicy::Omniscient,
    ];

    pub const ALL: [AnalyticPolicy; 6] = [
        AnalyticPolicy::VisualUnconditional,
        AnalyticPolicy::VisualReciprocator,
        AnalyticPolicy::AwareReciprocator,
        AnalyticPolicy::Omniscient,
        AnalyticPolicy::UnconditionalCooperate,
        AnalyticPolicy::UnconditionalDefect,
    ];

    pub fn code(self) -> &'static str {
        match self {
            AnalyticPolicy::VisualUnconditional => "VU",
            AnalyticPolicy::VisualReciprocator => "VR",
            AnalyticPolicy::AwareReciprocator => "AR",
            AnalyticPolicy::Omniscient => "O",
            AnalyticPolicy::UnconditionalCooperate => "UC",
            AnalyticPolicy::UnconditionalDefect => "UD",
        }
    }
}

impl fmt::Display for AnalyticPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for AnalyticPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnalyticPolicy::ALL
            .into_iter()
            .find(|p| p.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown policy `{s}` (expected one of VU, VR, AR, O, UC, UD)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    pub k: u32,
    pub rho: f64,
    pub matrix: PayoffMatrix,
}

impl AnalyticParams {
    pub fn new(k: u32, rho: f64, matrix: PayoffMatrix) -> Result<Self, AnalyticError> {
        let p = AnalyticParams { k, rho, matrix };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        if self.k == 0 {
            return Err(AnalyticError::ZeroIterations);
        }
        check_rho(self.rho)?;
        self.matrix.validate()?;
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<(), AnalyticError> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(AnalyticError::RhoOutOfRange(rho));
    }
    Ok(())
}

/// A closed-form value, flagged when it is the `rho -> 0` limit of the
/// visual reciprocator rather than a direct evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalPayoff {
    pub value: f64,
    pub rho_zero_limit: bool,
}

/// `sum_{i<k} (1 - rho)^i = (1 - (1 - rho)^k) / rho`, the expected number
/// of partners a visual reciprocator draws.
fn geometric_partial_sum(rho: f64, k: u32) -> f64 {
    let q = 1.0 - rho;
    (1.0 - q.powi(k as i32)) / rho
}

/// Total payoff over `k` interactions.
pub fn total_payoff(policy: AnalyticPolicy, params: &AnalyticParams) -> Result<TotalPayoff, AnalyticError> {
    params.validate()?;
    let k = params.k as f64;
    let rho = params.rho;
    let m = &params.matrix;
    let (r, s, t, p) = (m.reward, m.sucker, m.temptation, m.punishment);
    let plain = |value: f64| Ok(TotalPayoff { value, rho_zero_limit: false });
    match policy {
        AnalyticPolicy::VisualUnconditional | AnalyticPolicy::UnconditionalCooperate => {
            plain(k * (rho * r + (1.0 - rho) * s))
        }
        AnalyticPolicy::UnconditionalDefect => plain(rho * k * t + (1.0 - rho) * k * p),
        AnalyticPolicy::VisualReciprocator => {
            if rho == 0.0 {
                // Churns through defectors: S at every step.
                return Ok(TotalPayoff { value: k * s, rho_zero_limit: true });
            }
            let value = k * r - ((1.0 - rho) / rho) * (1.0 - (1.0 - rho).powi(params.k as i32)) * (r - s);
            plain(value)
        }
        AnalyticPolicy::AwareReciprocator => plain((k - 1.0) * r + rho * r + (1.0 - rho) * s),
        AnalyticPolicy::Omniscient => plain(k * r),
    }
}

/// Whether unconditional cooperation beats unconditional defection:
/// `rho / (1 - rho) > (P - S) / (R - T)`.
pub fn cooperation_favored(rho: f64, matrix: &PayoffMatrix) -> Result<bool, AnalyticError> {
    check_rho(rho)?;
    let stakes = matrix.stakes()?;
    if rho == 1.0 {
        return Ok(true);
    }
    Ok(rho / (1.0 - rho) > stakes)
}

/// `k > (1 - (1 - rho)^k) / rho * (1 - rho) / (1 - rho')`: the visual
/// reciprocator sampling with `rho` beats an unconditional cooperator
/// sampling with `rho'`.
pub fn reciprocator_dominates(k: u32, rho: f64, rho_prime: f64) -> Result<bool, AnalyticError> {
    if !(rho > 0.0 && rho <= 1.0) || !(0.0..1.0).contains(&rho_prime) {
        return Err(AnalyticError::InvalidRho { rho, rho_prime });
    }
    let rhs = geometric_partial_sum(rho, k) * (1.0 - rho) / (1.0 - rho_prime);
    Ok((k as f64) > rhs)
}

/// Both raw dominance inequalities, evaluated numerically: the visual
/// reciprocator at `rho` strictly beats unconditional defection and
/// unconditional cooperation at `rho'`.
pub fn reciprocator_dominates_both(
    k: u32,
    rho: f64,
    rho_prime: f64,
    matrix: &PayoffMatrix,
) -> Result<bool, AnalyticError> {
    let recip = total_payoff(AnalyticPolicy::VisualReciprocator, &AnalyticParams::new(k, rho, *matrix)?)?;
    let other = AnalyticParams::new(k, rho_prime, *matrix)?;
    let ud = total_payoff(AnalyticPolicy::UnconditionalDefect, &other)?;
    let uc = total_payoff(AnalyticPolicy::UnconditionalCooperate, &other)?;
    Ok(recip.value > ud.value && recip.value > uc.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub policy: AnalyticPolicy,
    pub total: f64,
    pub mean: f64,
}

/// Per-policy total and per-interaction payoffs, in the order given.
pub fn payoff_curve(
    policies: &[AnalyticPolicy],
    k: u32,
    rho: f64,
    matrix: &PayoffMatrix,
) -> Result<Vec<CurvePoint>, AnalyticError> {
    let params = AnalyticParams::new(k, rho, *matrix)?;
    policies
        .iter()
        .map(|&policy| {
            let total = total_payoff(policy, &params)?.value;
            Ok(CurvePoint { policy, total, mean: total / k as f64 })
        })
        .collect()
}

/// Whether `VU < VR < AR < O` holds strictly at `(k, rho)`.
pub fn ladder_ordered(k: u32, rho: f64, matrix: &PayoffMatrix) -> Result<bool, AnalyticError> {
    let v = payoff_curve(&AnalyticPolicy::LADDER, k, rho, matrix)?;
    Ok(v.windows(2).all(|w| w[0].total < w[1].total))
}

/// Smallest `k* <= k_max` such that the ladder ordering holds for every
/// `k` in `k*..=k_max`; `None` if it fails at `k_max`.
pub fn ladder_threshold(rho: f64, matrix: &PayoffMatrix, k_max: u32) -> Result<Option<u32>, AnalyticError> {
    let mut threshold = None;
    for k in (1..=k_max).rev() {
        if ladder_ordered(k, rho, matrix)? {
            threshold = Some(k);
        } else {
            break;
        }
    }
    Ok(threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use AnalyticPolicy::*;

    fn fig() -> PayoffMatrix {
        PayoffMatrix::reference()
    }

    fn total(policy: AnalyticPolicy, k: u32, rho: f64) -> f64 {
        total_payoff(policy, &AnalyticParams::new(k, rho, fig()).unwrap()).unwrap().value
    }

    /// Expected payoff of the visual reciprocator by the step recursion:
    /// resample at step i with probability of cooperation rho; a cooperating
    /// partner is kept for the remaining steps.
    fn vr_recursion(k: u32, rho: f64, m: &PayoffMatrix) -> f64 {
        (1..=k).fold(0.0, |prev, i| rho * i as f64 * m.reward + (1.0 - rho) * (m.sucker + prev))
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(total(Omniscient, 8, 0.5), 24.0);
        assert_eq!(total(VisualUnconditional, 8, 0.5), 12.0);
        assert_eq!(total(AwareReciprocator, 8, 0.5), 22.5);
        assert_eq!(total(VisualReciprocator, 8, 0.5), 21.01171875);
        assert_eq!(total(VisualReciprocator, 2, 0.5), 3.75);
        assert_eq!(total(UnconditionalDefect, 8, 0.5), 8.0);
        assert_eq!(total(UnconditionalCooperate, 8, 0.5), total(VisualUnconditional, 8, 0.5));
    }

    #[test]
    fn recursion_oracle_agrees_with_visual_reciprocator() {
        let m = PayoffMatrix::new(5.0, 2.0, 1.0, -1.0).unwrap();
        for k in 1..=20 {
            for i in 1..20 {
                let rho = i as f64 / 20.0;
                let closed = total_payoff(VisualReciprocator, &AnalyticParams::new(k, rho, m).unwrap()).unwrap();
                assert_relative_eq!(closed.value, vr_recursion(k, rho, &m), max_relative = 1e-12, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rho_zero_visual_reciprocator_is_flagged_limit() {
        let v = total_payoff(VisualReciprocator, &AnalyticParams::new(8, 0.0, fig()).unwrap()).unwrap();
        assert_eq!(v, TotalPayoff { value: 0.0, rho_zero_limit: true });
        let m = PayoffMatrix::new(3.0, 1.0, 1.0, 0.5).unwrap();
        let v = total_payoff(VisualReciprocator, &AnalyticParams::new(4, 0.0, m).unwrap()).unwrap();
        assert_eq!(v.value, 2.0);
        // The limit is continuous with small rho.
        let near = total_payoff(VisualReciprocator, &AnalyticParams::new(4, 1e-9, m).unwrap()).unwrap();
        assert_relative_eq!(near.value, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn params_validation() {
        assert_eq!(AnalyticParams::new(0, 0.5, fig()), Err(AnalyticError::ZeroIterations));
        assert_eq!(AnalyticParams::new(2, 1.2, fig()), Err(AnalyticError::RhoOutOfRange(1.2)));
        assert!(AnalyticParams::new(2, f64::NAN, fig()).is_err());
    }

    #[test]
    fn cooperation_threshold_examples() {
        assert!(cooperation_favored(0.4, &fig()).unwrap());
        assert!(!cooperation_favored(0.25, &fig()).unwrap());
        assert!(!cooperation_favored(1.0 / 3.0, &fig()).unwrap());
        assert!(cooperation_favored(1.0, &fig()).unwrap());
        let flat = PayoffMatrix::new(3.0, 3.0, 1.0, 0.0).unwrap();
        assert!(matches!(cooperation_favored(0.5, &flat), Err(AnalyticError::Game(GameError::DegenerateMatrix(_)))));
    }

    #[test]
    fn dominance_examples() {
        assert!(reciprocator_dominates(8, 0.5, 0.5).unwrap());
        assert!(!reciprocator_dominates(1, 0.5, 0.5).unwrap());
        assert!(reciprocator_dominates(8, 1.0, 0.0).unwrap());
        assert!(reciprocator_dominates(3, 0.0, 0.5).is_err());
        assert!(reciprocator_dominates(3, 0.5, 1.0).is_err());
    }

    #[test]
    fn dominance_rhs_by_direct_evaluation() {
        // RHS at (8, 1/2, 1/2) is 255/128.
        let rhs = (1.0 - 0.5f64.powi(8)) / 0.5 * 0.5 / 0.5;
        assert_eq!(rhs, 255.0 / 128.0);
    }

    #[test]
    fn dominance_matches_payoff_comparison() {
        // For R > S the simplified inequality is exactly VR(rho) > UC(rho').
        let m = fig();
        for k in 1..12 {
            for i in 1..=10 {
                for j in 0..10 {
                    let (rho, rho_p) = (i as f64 / 10.0, j as f64 / 10.0);
                    let vr = total(VisualReciprocator, k, rho);
                    let uc =
                        total_payoff(UnconditionalCooperate, &AnalyticParams::new(k, rho_p, m).unwrap()).unwrap().value;
                    let lhs = vr - uc;
                    if lhs.abs() > 1e-9 {
                        assert_eq!(
                            reciprocator_dominates(k, rho, rho_p).unwrap(),
                            lhs > 0.0,
                            "k={k} rho={rho} rho'={rho_p}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dominates_both_requires_beating_defection_too() {
        // rho' = 0.9 makes unconditional defection worth k(0.9 + 0.1) = k but
        // unconditional cooperation 2.7k; the visual reciprocator at rho = 0.1
        // beats neither at k = 2.
        assert!(!reciprocator_dominates_both(2, 0.1, 0.9, &fig()).unwrap());
        assert!(reciprocator_dominates_both(8, 0.5, 0.5, &fig()).unwrap());
    }

    #[test]
    fn curve_examples() {
        let k8 = payoff_curve(&AnalyticPolicy::LADDER, 8, 0.5, &fig()).unwrap();
        let means: Vec<f64> = k8.iter().map(|p| p.mean).collect();
        assert_eq!(means, vec![1.5, 21.01171875 / 8.0, 2.8125, 3.0]);
        assert_relative_eq!(means[1], 2.6265, epsilon = 1e-4);
        let k2 = payoff_curve(&AnalyticPolicy::LADDER, 2, 0.5, &fig()).unwrap();
        let means: Vec<f64> = k2.iter().map(|p| p.mean).collect();
        assert_eq!(means, vec![1.5, 1.875, 2.25, 3.0]);
        let o = payoff_curve(&[Omniscient], 5, 0.3, &fig()).unwrap();
        assert_eq!(o[0].mean, 3.0);
    }

    #[test]
    fn ladder_holds_on_grid_and_threshold_is_two() {
        let m = fig();
        for i in 1..=19 {
            let rho = i as f64 * 0.05;
            for k in 2..=32 {
                assert!(ladder_ordered(k, rho, &m).unwrap(), "k={k} rho={rho}");
            }
            // At k = 1 VR and AR coincide with VU, so the ordering starts at 2.
            assert_eq!(ladder_threshold(rho, &m, 32).unwrap(), Some(2));
        }
    }

    #[test]
    fn boundary_collapse_at_rho_one() {
        for policy in AnalyticPolicy::LADDER {
            assert_eq!(total(policy, 7, 1.0), 21.0);
        }
    }

    fn stag_hunt() -> impl Strategy<Value = PayoffMatrix> {
        (-10.0..10.0f64, 0.01..5.0f64, 0.0..5.0f64, 0.01..5.0f64).prop_map(|(s, g1, g2, g3)| {
            let p = s + g1;
            let t = p + g2;
            PayoffMatrix::new(t + g3, t, p, s).unwrap()
        })
    }

    proptest! {
        #[test]
        fn ladder_ordering_for_any_stag_hunt(m in stag_hunt(), rho in 0.05..0.95f64, k in 2u32..=32) {
            let v = payoff_curve(&AnalyticPolicy::LADDER, k, rho, &m).unwrap();
            prop_assert!(v[0].total < v[1].total);
            prop_assert!(v[1].total < v[2].total);
            prop_assert!(v[2].total < v[3].total);
        }

        #[test]
        fn monotone_in_rho(m in stag_hunt(), rho in 0.0..0.99f64, d in 0.001..0.01f64, k in 1u32..=32) {
            let hi = (rho + d).min(1.0);
            for policy in AnalyticPolicy::LADDER {
                let a = total_payoff(policy, &AnalyticParams::new(k, rho, m).unwrap()).unwrap().value;
                let b = total_payoff(policy, &AnalyticParams::new(k, hi, m).unwrap()).unwrap().value;
                prop_assert!(b >= a - 1e-9 * a.abs().max(1.0), "{policy} k={k}: {a} -> {b}");
            }
        }

        #[test]
        fn rho_one_collapses_to_kr(m in stag_hunt(), k in 1u32..=64) {
            for policy in AnalyticPolicy::LADDER {
                let v = total_payoff(policy, &AnalyticParams::new(k, 1.0, m).unwrap()).unwrap().value;
                prop_assert!((v - k as f64 * m.reward).abs() <= 1e-9 * v.abs().max(1.0));
            }
        }
    }
}
