//! Undirected friendship graph over agent indices.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::AgentId;

/// Symmetric, irreflexive adjacency. Neighbour sets are ordered so that
/// every traversal is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FriendNetwork {
    adjacency: Vec<BTreeSet<AgentId>>,
}

impl FriendNetwork {
    pub fn empty(n: usize) -> Self {
        FriendNetwork {
            adjacency: vec![BTreeSet::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn friends(&self, id: AgentId) -> &BTreeSet<AgentId> {
        &self.adjacency[id.index()]
    }

    pub fn degree(&self, id: AgentId) -> usize {
        self.adjacency[id.index()].len()
    }

    pub fn are_friends(&self, a: AgentId, b: AgentId) -> bool {
        self.adjacency[a.index()].contains(&b)
    }

    /// Adds the edge `a - b`. Returns false for self-loops and existing edges.
    pub fn connect(&mut self, a: AgentId, b: AgentId) -> bool {
        if a == b || self.are_friends(a, b) {
            return false;
        }
        self.adjacency[a.index()].insert(b);
        self.adjacency[b.index()].insert(a);
        true
    }

    /// Drops every edge touching `id`.
    pub fn isolate(&mut self, id: AgentId) {
        let friends = std::mem::take(&mut self.adjacency[id.index()]);
        for f in friends {
            self.adjacency[f.index()].remove(&id);
        }
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as `(low, high)` pairs in ascending order.
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, set)| {
                let a = AgentId::new(i);
                set.range(a..).filter(move |&&b| b != a).map(move |&b| (a, b))
            })
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(i, set)| {
            let a = AgentId::new(i);
            !set.contains(&a) && set.iter().all(|b| self.adjacency[b.index()].contains(&a))
        })
    }
}

/// Maps a linear index in `0..n(n-1)/2` to the unordered pair it enumerates
/// (row-major over the strict upper triangle).
fn pair_from_index(n: usize, mut idx: usize) -> (usize, usize) {
    let mut row = 0;
    let mut row_len = n - 1;
    while idx >= row_len {
        idx -= row_len;
        row += 1;
        row_len -= 1;
    }
    (row, row + 1 + idx)
}

/// Uniform random graph with `round(n * d0 / 2)` edges (capped at the
/// complete graph), sampled without replacement from all vertex pairs.
pub fn init_friend_network<R: Rng + ?Sized>(n: usize, d0: f64, rng: &mut R) -> FriendNetwork {
    let mut net = FriendNetwork::empty(n);
    if n < 2 {
        return net;
    }
    let all_pairs = n * (n - 1) / 2;
    let edges = ((n as f64 * d0 / 2.0).round() as usize).min(all_pairs);
    let mut picked = index::sample(rng, all_pairs, edges).into_vec();
    picked.sort_unstable();
    for idx in picked {
        let (a, b) = pair_from_index(n, idx);
        net.connect(AgentId::new(a), AgentId::new(b));
    }
    net
}
