//! The term loop.
//!
//! One term runs the schedule
//!
//! | t        | step                                             |
//! |----------|--------------------------------------------------|
//! | 0        | consumption and deaths, then initiator draw      |
//! | 1..=T    | group formation                                  |
//! | T+1, T+2 | fields, harvest, awards and punishment           |
//! | T+3      | friendship update, groups dissolve               |
//!
//! All randomness comes from a single ChaCha8 stream seeded by
//! `SimConfig::seed`, consumed in the order: population setup, then per term
//! the initiator draw, formation (tick by tick, shuffled initiator order),
//! and settlement (group by group, field before members).

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::economy::{settle_term, TermSettlement};
use crate::error::{Error, Result};
use crate::formation::{run_formation_phase, Group};
use crate::friendship::update_friendships;
use crate::model::{consume_and_cull, init_population, AgentId, Population, StrategyClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub term: usize,
    /// `None` when no agent of the class is alive.
    pub mean_savings_complement: Option<f64>,
    pub mean_savings_similar: Option<f64>,
    pub alive_complement: usize,
    pub alive_similar: usize,
    /// Entry `i` counts groups of size `i + 1`, for sizes `1..=T+1`.
    pub group_size_histogram: Vec<usize>,
    pub edges_added: usize,
    pub deaths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TooFewAlive,
    ComplementExtinct,
    SimilarExtinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarlyStop {
    /// Last term that ran.
    pub term: usize,
    pub reason: StopReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Complement,
    Similar,
    Tie,
    /// Nobody is left alive.
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: SimConfig,
    /// State right after initialization, recorded as term 0.
    pub initial: TermReport,
    pub terms: Vec<TermReport>,
    pub final_winner: Winner,
    pub early_stop: Option<EarlyStop>,
}

impl RunReport {
    pub fn last(&self) -> &TermReport {
        self.terms.last().unwrap_or(&self.initial)
    }

    /// A run that ends with one strategy class entirely dead.
    pub fn is_degenerate(&self) -> bool {
        let last = self.last();
        last.alive_complement == 0 || last.alive_similar == 0
    }

    /// True when complement-preferring agents end with strictly more mean
    /// savings, or are the only class left.
    pub fn complement_wins(&self) -> bool {
        self.final_winner == Winner::Complement
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rows of `term,mean_complement,mean_similar,alive_complement,alive_similar`,
    /// starting with the term-0 snapshot.
    pub fn timeseries_csv(&self) -> String {
        let mut out = String::from("term,mean_complement,mean_similar,alive_complement,alive_similar\n");
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for t in std::iter::once(&self.initial).chain(&self.terms) {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.term,
                fmt(t.mean_savings_complement),
                fmt(t.mean_savings_similar),
                t.alive_complement,
                t.alive_similar
            ));
        }
        out
    }
}

pub fn decide_winner(report: &TermReport) -> Winner {
    match (report.mean_savings_complement, report.mean_savings_similar) {
        (Some(c), Some(s)) if c > s => Winner::Complement,
        (Some(c), Some(s)) if c < s => Winner::Similar,
        (Some(_), Some(_)) => Winner::Tie,
        (Some(_), None) => Winner::Complement,
        (None, Some(_)) => Winner::Similar,
        (None, None) => Winner::Neither,
    }
}

/// Everything produced by one term, for callers that need more than the
/// summary metrics.
#[derive(Debug, Clone)]
pub struct TermDetail {
    pub report: TermReport,
    pub initiators: Vec<AgentId>,
    pub groups: Vec<Group>,
    pub settlement: TermSettlement,
    pub culled: Vec<AgentId>,
}

/// A running simulation: population, RNG stream and term counter.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    population: Population,
    rng: ChaCha8Rng,
    term: usize,
    had_complement: bool,
    had_similar: bool,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let population = init_population(&config, &mut rng)?;
        Ok(Simulation {
            had_complement: population.count_strategy(StrategyClass::ComplementPreferring) > 0,
            had_similar: population.count_strategy(StrategyClass::SimilarPreferring) > 0,
            config,
            population,
            rng,
            term: 0,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    /// Terms completed so far.
    pub fn term(&self) -> usize {
        self.term
    }

    pub fn snapshot(&self, edges_added: usize, deaths: usize, groups: &[Group]) -> TermReport {
        let c = self.population.summary(StrategyClass::ComplementPreferring);
        let s = self.population.summary(StrategyClass::SimilarPreferring);
        let mut histogram = vec![0; self.config.max_group_size()];
        for g in groups {
            histogram[g.size() - 1] += 1;
        }
        TermReport {
            term: self.term,
            mean_savings_complement: c.mean_savings,
            mean_savings_similar: s.mean_savings,
            alive_complement: c.alive,
            alive_similar: s.alive,
            group_size_histogram: histogram,
            edges_added,
            deaths,
        }
    }

    /// Reason the run cannot or should not continue, if any.
    pub fn stop_reason(&self) -> Option<StopReason> {
        let alive = self.population.alive_count();
        if alive < 2 {
            return Some(StopReason::TooFewAlive);
        }
        let c = self.population.summary(StrategyClass::ComplementPreferring).alive;
        let s = self.population.summary(StrategyClass::SimilarPreferring).alive;
        if self.had_complement && c == 0 {
            return Some(StopReason::ComplementExtinct);
        }
        if self.had_similar && s == 0 {
            return Some(StopReason::SimilarExtinct);
        }
        None
    }

    /// Runs one full term. Fails if fewer than two agents are alive.
    pub fn run_term(&mut self) -> Result<TermDetail> {
        if self.population.alive_count() < 2 {
            return Err(Error::InvalidArgument(format!(
                "term {} needs at least 2 alive agents",
                self.term + 1
            )));
        }
        self.term += 1;
        let cfg = &self.config;

        let culled = consume_and_cull(&mut self.population, cfg.consumption);
        let alive = self.population.alive_ids();
        let count = cfg.k.min(alive.len());
        let initiators: Vec<AgentId> = index::sample(&mut self.rng, alive.len(), count)
            .into_iter()
            .map(|i| alive[i])
            .collect();

        let groups = run_formation_phase(
            &mut self.population,
            &initiators,
            cfg.ticks,
            cfg.gamma0,
            self.term,
            &mut self.rng,
        );
        let settlement = settle_term(
            &groups,
            &mut self.population,
            cfg.c0,
            cfg.max_group_size(),
            &mut self.rng,
        );
        let edges_added = update_friendships(&groups, &mut self.population);

        let report = self.snapshot(edges_added, culled.len(), &groups);
        Ok(TermDetail {
            report,
            initiators,
            groups,
            settlement,
            culled,
        })
    }

    /// Runs up to `max_term` terms, stopping early when a class dies out or
    /// fewer than two agents remain.
    pub fn run(mut self) -> RunReport {
        let initial = self.snapshot(0, 0, &[]);
        let mut terms = Vec::with_capacity(self.config.max_term);
        let mut early_stop = None;
        while self.term < self.config.max_term {
            if let Some(reason) = self.stop_reason() {
                early_stop = Some(EarlyStop {
                    term: self.term,
                    reason,
                });
                break;
            }
            let detail = self.run_term().expect("stop_reason guards the alive count");
            terms.push(detail.report);
        }
        if early_stop.is_none() && self.term == self.config.max_term {
            // a class dying on the very last term still counts
            if let Some(reason) = self.stop_reason() {
                early_stop = Some(EarlyStop {
                    term: self.term,
                    reason,
                });
            }
        }
        let final_winner = decide_winner(terms.last().unwrap_or(&initial));
        RunReport {
            config: self.config,
            initial,
            terms,
            final_winner,
            early_stop,
        }
    }
}

pub fn run_simulation(config: SimConfig) -> Result<RunReport> {
    Ok(Simulation::new(config)?.run())
}
