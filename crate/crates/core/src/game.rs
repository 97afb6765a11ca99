//! Satisfaction-form placement game played by the UAVs.
//!
//! Each UAV keeps a probability vector over the seven moves. While its
//! utility stays at or above its threshold it is satisfied and holds both
//! its position and its policy; otherwise it samples a move and reinforces
//! the chosen one with a linear reward-inaction step scaled by the
//! normalized utility.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{Position3D, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameWeights {
    /// Throughput weight.
    pub phi: f64,
    /// Collision penalty weight.
    pub varphi: f64,
    /// Normalizer for the served rate sum, bit/s.
    pub norm: f64,
    /// Largest achievable utility, used to scale the reward.
    pub f_max: f64,
    /// Minimum UAV separation in meters.
    pub d_min: f64,
}

/// Learning rate of the policy update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyLearningRate {
    Constant { value: f64 },
    /// `value * t^(-exponent)`.
    Decaying { value: f64, exponent: f64 },
}

impl Default for PolicyLearningRate {
    fn default() -> Self {
        PolicyLearningRate::Constant { value: 0.1 }
    }
}

impl PolicyLearningRate {
    pub fn at(&self, t: u64) -> f64 {
        match *self {
            PolicyLearningRate::Constant { value } => value,
            PolicyLearningRate::Decaying { value, exponent } => {
                value * (t.max(1) as f64).powf(-exponent)
            }
        }
    }
}

/// Lowers the threshold of a UAV that stays unsatisfied for `window`
/// consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdAdaptation {
    pub window: u32,
    pub decay: f64,
    pub floor: f64,
}

pub type Policy = [f64; Strategy::COUNT];

pub fn uniform_policy() -> Policy {
    [1.0 / Strategy::COUNT as f64; Strategy::COUNT]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavAgent {
    /// Index of the UAV in the network's base station list.
    pub bs_id: usize,
    pub policy: Policy,
    pub threshold: f64,
    pub satisfied: bool,
    pub last_strategy: Strategy,
    pub last_utility: f64,
    pub learning_rate: PolicyLearningRate,
    pub unsatisfied_streak: u32,
}

impl UavAgent {
    pub fn new(bs_id: usize, threshold: f64, learning_rate: PolicyLearningRate) -> Self {
        Self {
            bs_id,
            policy: uniform_policy(),
            threshold,
            satisfied: false,
            last_strategy: Strategy::NoChange,
            last_utility: 0.0,
            learning_rate,
            unsatisfied_streak: 0,
        }
    }
}

/// 1 when any other UAV is strictly closer than `d_min`, else 0.
pub fn activation(own: &Position3D, others: &[Position3D], d_min: f64) -> u8 {
    u8::from(others.iter().any(|o| own.distance(o) < d_min))
}

/// Activation for every UAV against all the others.
pub fn activations(positions: &[Position3D], d_min: f64) -> Vec<u8> {
    (0..positions.len())
        .map(|i| {
            let hit = positions
                .iter()
                .enumerate()
                .any(|(j, p)| j != i && positions[i].distance(p) < d_min);
            u8::from(hit)
        })
        .collect()
}

/// `phi * served_rate_sum / norm - varphi * activation`.
pub fn utility(served_rate_sum: f64, activation: u8, w: &GameWeights) -> f64 {
    w.phi * served_rate_sum / w.norm - w.varphi * f64::from(activation)
}

pub fn is_satisfied(utility: f64, threshold: f64) -> bool {
    utility >= threshold
}

/// Records `utility` on the agent and recomputes its satisfaction flag.
pub fn satisfaction_indicator(agent: &mut UavAgent, utility: f64) -> bool {
    agent.last_utility = utility;
    agent.satisfied = is_satisfied(utility, agent.threshold);
    agent.satisfied
}

/// Inverse-CDF draw from a policy.
pub fn sample_policy<R: Rng + ?Sized>(policy: &Policy, rng: &mut R) -> Strategy {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in policy.iter().enumerate() {
        acc += p;
        if u < acc {
            return Strategy::ALL[i];
        }
    }
    // Rounding left `u` above the cumulative sum; take the last supported move.
    let last = policy.iter().rposition(|&p| p > 0.0).unwrap_or(Strategy::COUNT - 1);
    Strategy::ALL[last]
}

/// A satisfied agent repeats its previous strategy without touching `rng`;
/// an unsatisfied one samples from its policy.
pub fn select_strategy<R: Rng + ?Sized>(agent: &UavAgent, rng: &mut R) -> Strategy {
    if agent.satisfied {
        agent.last_strategy
    } else {
        sample_policy(&agent.policy, rng)
    }
}

/// Reward scaling `(f_max + f - threshold) / (2 f_max)`, clipped to `[0, 1]`.
pub fn q_factor(utility: f64, threshold: f64, f_max: f64) -> f64 {
    ((f_max + utility - threshold) / (2.0 * f_max)).clamp(0.0, 1.0)
}

/// Linear reward step toward `chosen`. Leaves the policy untouched when
/// `satisfied`. `step` is the product of learning rate and reward scale and
/// must lie in `[0, 1]`.
pub fn update_policy(policy: &mut Policy, chosen: Strategy, satisfied: bool, step: f64) {
    if satisfied {
        return;
    }
    debug_assert!((0.0..=1.0).contains(&step), "step {step} outside [0, 1]");
    let step = step.clamp(0.0, 1.0);
    for (i, p) in policy.iter_mut().enumerate() {
        let target = if i == chosen.index() { 1.0 } else { 0.0 };
        *p += step * (target - *p);
    }
}

/// Streak bookkeeping plus threshold decay. Thresholds only ever go down.
pub fn adapt_threshold(agent: &mut UavAgent, rule: &ThresholdAdaptation) -> f64 {
    if agent.satisfied {
        agent.unsatisfied_streak = 0;
        return agent.threshold;
    }
    agent.unsatisfied_streak += 1;
    if agent.unsatisfied_streak >= rule.window {
        agent.threshold = decayed_threshold(agent.threshold, rule);
        agent.unsatisfied_streak = 0;
    }
    agent.threshold
}

pub fn decayed_threshold(threshold: f64, rule: &ThresholdAdaptation) -> f64 {
    (rule.decay * threshold).max(rule.floor).min(threshold)
}

/// True when every agent is satisfied; vacuously true with no agents.
pub fn is_satisfaction_equilibrium(agents: &[UavAgent]) -> bool {
    agents.iter().all(|a| a.satisfied)
}
