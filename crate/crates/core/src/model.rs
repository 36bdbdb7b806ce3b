//! Agents, their behaviour and preference vectors, and the population.

use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::network::{init_friend_network, FriendNetwork};
use crate::stats::OfferStatistics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(u32);

impl AgentId {
    pub fn new(index: usize) -> Self {
        AgentId(u32::try_from(index).expect("agent index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Reliability `r` and efficiency `e`, both in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehaviorVector {
    pub r: f64,
    pub e: f64,
}

impl BehaviorVector {
    pub fn new(r: f64, e: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&e) {
            return Err(Error::InvalidArgument(format!(
                "behavior components must lie in [0, 1], got [{r}, {e}]"
            )));
        }
        Ok(BehaviorVector { r, e })
    }
}

/// Weights on reliability and efficiency; `r + e = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceVector {
    pub r: f64,
    pub e: f64,
}

impl PreferenceVector {
    pub fn new(r: f64, e: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&e) || (r + e - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "preference must be a point of the unit simplex, got [{r}, {e}]"
            )));
        }
        Ok(PreferenceVector { r, e })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyClass {
    SimilarPreferring,
    ComplementPreferring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub id: AgentId,
    pub capacity: f64,
    pub behavior: BehaviorVector,
    pub preference: PreferenceVector,
    pub strategy: StrategyClass,
    pub savings: f64,
    pub alive: bool,
    pub offer_stats: OfferStatistics,
}

/// How much an agent with preference `p` values a partner with behaviour `b`.
pub fn behavior_value(p: PreferenceVector, b: BehaviorVector) -> f64 {
    p.r * b.r + p.e * b.e
}

/// Builds the preference vector of an agent with behaviour `b`.
///
/// Complement-preferring agents start from the mirrored shares
/// `[e/(r+e), r/(r+e)]`, similar-preferring ones from `[r/(r+e), e/(r+e)]`.
/// The gap between the two weights is then widened by `(1 - max(r, e)) * alpha`
/// and the result clipped back onto the simplex. When `r == e` the offset
/// goes to the efficiency weight.
pub fn build_preference_vector(
    b: BehaviorVector,
    strategy: StrategyClass,
    alpha: f64,
) -> Result<PreferenceVector> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let total = b.r + b.e;
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "preference undefined for behavior [0, 0]".into(),
        ));
    }
    let (own_r, own_e) = (b.r / total, b.e / total);
    let (base_r, base_e) = match strategy {
        StrategyClass::SimilarPreferring => (own_r, own_e),
        StrategyClass::ComplementPreferring => (own_e, own_r),
    };
    let delta = (1.0 - b.r.max(b.e)) * alpha;
    let r = if base_r > base_e {
        (base_r + delta).min(1.0)
    } else {
        (base_r - delta).max(0.0)
    };
    Ok(PreferenceVector { r, e: 1.0 - r })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub agents: Vec<Agent>,
    pub network: FriendNetwork,
}

/// Mean savings and head count of the alive members of one strategy class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassSummary {
    pub alive: usize,
    pub mean_savings: Option<f64>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn agent(&self, id: AgentId) -> &Agent {
        &self.agents[id.index()]
    }

    pub fn agent_mut(&mut self, id: AgentId) -> &mut Agent {
        &mut self.agents[id.index()]
    }

    pub fn alive_ids(&self) -> Vec<AgentId> {
        self.agents.iter().filter(|a| a.alive).map(|a| a.id).collect()
    }

    pub fn alive_count(&self) -> usize {
        self.agents.iter().filter(|a| a.alive).count()
    }

    pub fn count_strategy(&self, strategy: StrategyClass) -> usize {
        self.agents.iter().filter(|a| a.strategy == strategy).count()
    }

    pub fn summary(&self, strategy: StrategyClass) -> ClassSummary {
        let (alive, total) = self
            .agents
            .iter()
            .filter(|a| a.alive && a.strategy == strategy)
            .fold((0usize, 0.0f64), |(n, s), a| (n + 1, s + a.savings));
        ClassSummary {
            alive,
            mean_savings: (alive > 0).then(|| total / alive as f64),
        }
    }
}

/// Draws a fresh population.
///
/// Random draws happen in a fixed order: behaviour vectors (`r` then `e`,
/// agent by agent), the complement-preferring subset, then the friend network.
pub fn init_population<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<Population> {
    config.validate()?;
    let n = config.n;
    let behaviors: Vec<BehaviorVector> = (0..n)
        .map(|_| {
            let r = rng.random::<f64>();
            let e = rng.random::<f64>();
            BehaviorVector { r, e }
        })
        .collect();
    let complement_count = ((config.beta * n as f64).round() as usize).min(n);
    let mut is_complement = vec![false; n];
    for i in index::sample(rng, n, complement_count) {
        is_complement[i] = true;
    }
    let agents = behaviors
        .into_iter()
        .zip(is_complement)
        .enumerate()
        .map(|(i, (behavior, complement))| {
            let strategy = if complement {
                StrategyClass::ComplementPreferring
            } else {
                StrategyClass::SimilarPreferring
            };
            Ok(Agent {
                id: AgentId::new(i),
                capacity: config.c0,
                behavior,
                preference: build_preference_vector(behavior, strategy, config.alpha)?,
                strategy,
                savings: config.s0,
                alive: true,
                offer_stats: OfferStatistics::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let network = init_friend_network(n, config.d0, rng);
    Ok(Population { agents, network })
}

/// Every alive agent eats `amount`; those left with negative savings die and
/// lose all friendships. Returns the agents culled by this call.
pub fn consume_and_cull(population: &mut Population, amount: f64) -> Vec<AgentId> {
    let mut dead = Vec::new();
    for agent in population.agents.iter_mut().filter(|a| a.alive) {
        agent.savings -= amount;
        if agent.savings < 0.0 {
            agent.alive = false;
            dead.push(agent.id);
        }
    }
    for &id in &dead {
        population.network.isolate(id);
    }
    dead
}
