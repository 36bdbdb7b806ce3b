//! Fields, harvest, award sharing and shortfall punishment.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::formation::Group;
use crate::model::{Agent, AgentId, BehaviorVector, Population};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldAssignment {
    /// Position of the group in the term's group list.
    pub group: usize,
    pub capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarvestOutcome {
    pub agent: AgentId,
    pub gross: f64,
    pub net: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settlement {
    pub agent: AgentId,
    pub award: f64,
    pub penalty: f64,
}

impl Settlement {
    pub fn delta(&self) -> f64 {
        self.award - self.penalty
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TermSettlement {
    pub fields: Vec<FieldAssignment>,
    pub settlements: Vec<Settlement>,
}

fn abs_normal<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> f64 {
    Normal::new(0.0, variance.sqrt())
        .expect("variance is finite and nonnegative")
        .sample(rng)
        .abs()
}

/// `|G| * c0 - |noise|`, floored at zero.
pub fn field_capacity(group_size: usize, c0: f64, noise: f64) -> f64 {
    (group_size as f64 * c0 - noise.abs()).max(0.0)
}

/// Field for a group of at least two, with noise of variance `|G|`.
pub fn assign_field<R: Rng + ?Sized>(group_size: usize, c0: f64, rng: &mut R) -> f64 {
    assert!(group_size >= 2, "only groups of two or more are given a field");
    field_capacity(group_size, c0, abs_normal(group_size as f64, rng))
}

/// Gross and net harvest given the outcome of the reliability draw.
/// An unreliable agent loses `|noise|` of its capacity (floored at zero).
pub fn harvest_amounts(behavior: BehaviorVector, c0: f64, reliable: bool, noise: f64) -> (f64, f64) {
    let gross = if reliable {
        c0
    } else {
        (c0 - noise.abs()).max(0.0)
    };
    (gross, gross * behavior.e)
}

/// One uniform draw decides reliability; a shortfall of variance 2 is drawn
/// only when the agent turns out unreliable.
pub fn harvest_agent<R: Rng + ?Sized>(agent: &Agent, c0: f64, rng: &mut R) -> HarvestOutcome {
    let reliable = rng.random::<f64>() < agent.behavior.r;
    let noise = if reliable { 0.0 } else { abs_normal(2.0, rng) };
    let (gross, net) = harvest_amounts(agent.behavior, c0, reliable, noise);
    HarvestOutcome {
        agent: agent.id,
        gross,
        net,
    }
}

/// `1 + |G| / G_max`.
pub fn size_bonus(group_size: usize, max_group_size: usize) -> f64 {
    1.0 + group_size as f64 / max_group_size as f64
}

/// Each member gets `net_j * gross_j / sum(gross) * bonus`; all zero when
/// nobody harvested anything.
pub fn share_awards(outcomes: &[HarvestOutcome], max_group_size: usize) -> Vec<f64> {
    let total_gross: f64 = outcomes.iter().map(|o| o.gross).sum();
    if total_gross <= 0.0 {
        return vec![0.0; outcomes.len()];
    }
    let bonus = size_bonus(outcomes.len(), max_group_size);
    outcomes
        .iter()
        .map(|o| (o.net * o.gross / total_gross * bonus).max(0.0))
        .collect()
}

/// Equal share of the shortfall penalty.
///
/// The shortfall is detected on gross harvest, but sized from net harvest
/// times the size bonus; a negative size is clamped to zero.
pub fn apply_punishment(outcomes: &[HarvestOutcome], field: f64, max_group_size: usize) -> Vec<f64> {
    let total_gross: f64 = outcomes.iter().map(|o| o.gross).sum();
    if total_gross >= field {
        return vec![0.0; outcomes.len()];
    }
    let size = outcomes.len();
    let total_net: f64 = outcomes.iter().map(|o| o.net).sum();
    let each = ((field - total_net * size_bonus(size, max_group_size)) / size as f64).max(0.0);
    vec![each; size]
}

/// Settles every group of two or more in list order and applies
/// `award - penalty` to each member's savings. Singletons are skipped.
pub fn settle_term<R: Rng + ?Sized>(
    groups: &[Group],
    population: &mut Population,
    c0: f64,
    max_group_size: usize,
    rng: &mut R,
) -> TermSettlement {
    let mut out = TermSettlement::default();
    for (gi, group) in groups.iter().enumerate() {
        if group.size() < 2 {
            continue;
        }
        let field = assign_field(group.size(), c0, rng);
        out.fields.push(FieldAssignment {
            group: gi,
            capacity: field,
        });
        let outcomes: Vec<HarvestOutcome> = group
            .members
            .iter()
            .map(|&id| harvest_agent(population.agent(id), c0, rng))
            .collect();
        let awards = share_awards(&outcomes, max_group_size);
        let penalties = apply_punishment(&outcomes, field, max_group_size);
        for ((o, award), penalty) in outcomes.iter().zip(awards).zip(penalties) {
            let s = Settlement {
                agent: o.agent,
                award,
                penalty,
            };
            population.agent_mut(o.agent).savings += s.delta();
            out.settlements.push(s);
        }
    }
    out
}
