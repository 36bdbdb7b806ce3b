//! Friendship growth among co-members after the harvest is shared.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::formation::Group;
use crate::model::{behavior_value, Agent, AgentId, Population};
use crate::network::FriendNetwork;
use crate::stats::OfferStatistics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FriendCandidate {
    pub a: AgentId,
    pub b: AgentId,
    pub group: usize,
}

/// Unordered co-member pairs with no edge between them, in member order.
pub fn candidate_pairs(group: &Group, group_index: usize, network: &FriendNetwork) -> Vec<FriendCandidate> {
    let mut out = Vec::new();
    for (i, &a) in group.members.iter().enumerate() {
        for &b in &group.members[i + 1..] {
            if a != b && !network.are_friends(a, b) {
                out.push(FriendCandidate {
                    a,
                    b,
                    group: group_index,
                })
            }
        }
    }
    out
}

/// Spread of `me`'s valuation of its current friends.
pub fn friend_value_stats(me: &Agent, population: &Population, network: &FriendNetwork) -> OfferStatistics {
    network
        .friends(me.id)
        .iter()
        .map(|&f| behavior_value(me.preference, population.agent(f).behavior))
        .collect()
}

/// Accepts `candidate` when it is valued strictly above `mean - 1.5 sd` of
/// the current friends (always, if `me` has none).
pub fn evaluate_candidate(me: &Agent, candidate: &Agent, population: &Population, network: &FriendNetwork) -> bool {
    let stats = friend_value_stats(me, population, network);
    stats.clears(behavior_value(me.preference, candidate.behavior))
}

/// Adds an edge for every candidate pair that accepts in both directions.
/// All decisions read the network as it stood before the call.
pub fn update_friendships(groups: &[Group], population: &mut Population) -> usize {
    let snapshot = &population.network;
    let mut cache: HashMap<AgentId, OfferStatistics> = HashMap::new();
    let mut accepts = |me: AgentId, other: AgentId| {
        let me = population.agent(me);
        let stats = *cache
            .entry(me.id)
            .or_insert_with(|| friend_value_stats(me, population, snapshot));
        stats.clears(behavior_value(me.preference, population.agent(other).behavior))
    };

    let mut new_edges = Vec::new();
    for (gi, group) in groups.iter().enumerate() {
        for c in candidate_pairs(group, gi, snapshot) {
            if !population.agent(c.a).alive || !population.agent(c.b).alive {
                continue;
            }
            if accepts(c.a, c.b) && accepts(c.b, c.a) {
                new_edges.push((c.a, c.b));
            }
        }
    }

    new_edges
        .into_iter()
        .filter(|&(a, b)| population.network.connect(a, b))
        .count()
}
