//! The formation phase: initiators recruit friends one offer per tick.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{behavior_value, Agent, AgentId, BehaviorVector, Population, PreferenceVector};
use crate::stats::OfferStatistics;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub initiator: AgentId,
    /// Initiator first, then recruits in joining order.
    pub members: Vec<AgentId>,
    pub term_index: usize,
}

impl Group {
    pub fn new(initiator: AgentId, term_index: usize) -> Self {
        Group {
            initiator,
            members: vec![initiator],
            term_index,
        }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Choosiness at tick `t` for a group currently of `group_size` members:
/// `gamma0 * (T - t + |G|) / T`.
pub fn choosiness_gamma(t: usize, ticks: usize, group_size: usize, gamma0: f64) -> f64 {
    gamma0 * (ticks as f64 - t as f64 + group_size as f64) / ticks as f64
}

/// Normalized selection probabilities `v^gamma / sum(v^gamma)`.
///
/// Falls back to uniform when every weight vanishes. `0^0` is taken as 1,
/// so `gamma = 0` is always uniform.
pub fn selection_weights(values: &[f64], gamma: f64) -> Vec<f64> {
    let raw: Vec<f64> = values.iter().map(|v| v.powf(gamma)).collect();
    let total: f64 = raw.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        let u = 1.0 / values.len() as f64;
        return vec![u; values.len()];
    }
    raw.into_iter().map(|w| w / total).collect()
}

/// Picks the friend that receives the initiator's offer. Returns `None` when
/// nobody is eligible.
pub fn select_offer_target<R: Rng + ?Sized>(
    initiator: &Agent,
    eligible: &[&Agent],
    gamma: f64,
    rng: &mut R,
) -> Option<AgentId> {
    if eligible.is_empty() {
        return None;
    }
    let values: Vec<f64> = eligible
        .iter()
        .map(|a| behavior_value(initiator.preference, a.behavior))
        .collect();
    let weights = selection_weights(&values, gamma);
    let dist = WeightedIndex::new(&weights).expect("weights are positive and finite");
    Some(eligible[dist.sample(rng)].id)
}

/// Component-wise mean behaviour of the group, initiator included.
pub fn group_behavior_mean(members: &[AgentId], population: &Population) -> BehaviorVector {
    assert!(!members.is_empty(), "group has at least its initiator");
    let (r, e) = members.iter().fold((0.0, 0.0), |(r, e), &id| {
        let b = population.agent(id).behavior;
        (r + b.r, e + b.e)
    });
    let n = members.len() as f64;
    BehaviorVector { r: r / n, e: e / n }
}

/// `ln(gamma0 * (T - t) / T)`, with `T - t` floored at 1 so the last tick
/// stays finite.
pub fn time_pressure(t: usize, ticks: usize, gamma0: f64) -> f64 {
    let remaining = ticks.saturating_sub(t).max(1) as f64;
    (gamma0 * remaining / ticks as f64).ln()
}

pub fn adjusted_offer_value(
    receiver: PreferenceVector,
    group_mean: BehaviorVector,
    t: usize,
    ticks: usize,
    gamma0: f64,
) -> f64 {
    behavior_value(receiver, group_mean) + time_pressure(t, ticks, gamma0)
}

/// Decides against the history *before* folding the new value in.
pub fn accept_offer(adjusted: f64, stats: OfferStatistics) -> (bool, OfferStatistics) {
    let accepted = stats.clears(adjusted);
    let mut next = stats;
    next.push(adjusted);
    (accepted, next)
}

/// Runs ticks `1..=T`. Each tick the initiators act in a freshly shuffled
/// order; an initiator with eligible friends makes one offer, and an
/// accepted recruit joins at once.
///
/// Receivers' offer statistics are updated in place.
pub fn run_formation_phase<R: Rng + ?Sized>(
    population: &mut Population,
    initiators: &[AgentId],
    ticks: usize,
    gamma0: f64,
    term_index: usize,
    rng: &mut R,
) -> Vec<Group> {
    let mut groups: Vec<Group> = initiators
        .iter()
        .map(|&id| Group::new(id, term_index))
        .collect();
    let mut in_group = vec![false; population.len()];
    for &id in initiators {
        debug_assert!(population.agent(id).alive);
        debug_assert!(!in_group[id.index()], "initiators must be distinct");
        in_group[id.index()] = true;
    }

    let mut order: Vec<usize> = (0..groups.len()).collect();
    for t in 1..=ticks {
        order.shuffle(rng);
        for &g in &order {
            let initiator = population.agent(groups[g].initiator);
            let eligible: Vec<&Agent> = population
                .network
                .friends(initiator.id)
                .iter()
                .map(|&f| population.agent(f))
                .filter(|a| a.alive && !in_group[a.id.index()])
                .collect();
            let gamma = choosiness_gamma(t, ticks, groups[g].size(), gamma0);
            let Some(target) = select_offer_target(initiator, &eligible, gamma, rng) else {
                continue;
            };

            let mean = group_behavior_mean(&groups[g].members, population);
            let receiver = population.agent_mut(target);
            let adjusted = adjusted_offer_value(receiver.preference, mean, t, ticks, gamma0);
            let (accepted, stats) = accept_offer(adjusted, receiver.offer_stats);
            receiver.offer_stats = stats;
            if accepted {
                in_group[target.index()] = true;
                groups[g].members.push(target);
            }
        }
    }
    groups
}
