use std::collections::HashSet;

use coopsim::economy::{apply_punishment, assign_field, settle_term, share_awards, HarvestOutcome};
use coopsim::formation::{
    accept_offer, choosiness_gamma, run_formation_phase, select_offer_target, selection_weights, Group,
};
use coopsim::friendship::update_friendships;
use coopsim::model::{behavior_value, build_preference_vector, init_population};
use coopsim::output::{parse_sweep_csv, sweep_csv};
use coopsim::stats::OfferStatistics;
use coopsim::{AgentId, BehaviorVector, Population, PreferenceVector, SimConfig, Simulation, StrategyClass, SweepCell};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn strategy() -> impl Strategy<Value = StrategyClass> {
    prop_oneof![
        Just(StrategyClass::SimilarPreferring),
        Just(StrategyClass::ComplementPreferring)
    ]
}

fn population(n: usize, d0: f64, seed: u64) -> Population {
    let cfg = SimConfig {
        n,
        k: 1,
        d0,
        seed,
        ..SimConfig::default()
    };
    init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #[test]
    fn preference_on_simplex_and_ordered(
        r in 0.0f64..=1.0, e in 0.0f64..=1.0, alpha in 0.0f64..=1.0, s in strategy()
    ) {
        prop_assume!(r + e > 0.0);
        let b = BehaviorVector::new(r, e).unwrap();
        let p = build_preference_vector(b, s, alpha).unwrap();
        prop_assert!((p.r + p.e - 1.0).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&p.r) && (0.0..=1.0).contains(&p.e));
        match s {
            StrategyClass::ComplementPreferring if r > e => prop_assert!(p.r < p.e),
            StrategyClass::ComplementPreferring if r < e => prop_assert!(p.r > p.e),
            StrategyClass::SimilarPreferring if r > e => prop_assert!(p.r > p.e),
            StrategyClass::SimilarPreferring if r < e => prop_assert!(p.r < p.e),
            _ => {}
        }
    }

    #[test]
    fn value_monotone_in_behavior(
        pr in 0.0f64..=1.0, r in 0.0f64..=1.0, e in 0.0f64..=1.0, dr in 0.0f64..=1.0, de in 0.0f64..=1.0
    ) {
        let p = PreferenceVector::new(pr, 1.0 - pr).unwrap();
        let lo = BehaviorVector::new(r, e).unwrap();
        let hi = BehaviorVector::new((r + dr).min(1.0), (e + de).min(1.0)).unwrap();
        let (vl, vh) = (behavior_value(p, lo), behavior_value(p, hi));
        prop_assert!(vl <= vh);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&vh));
    }

    #[test]
    fn selection_weights_normalized(
        values in prop::collection::vec(0.0f64..=1.0, 1..40), gamma in 0.0f64..12.0
    ) {
        let w = selection_weights(&values, gamma);
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn gamma_monotone(ticks in 2usize..20, size in 1usize..20, gamma0 in 0.1f64..10.0) {
        for t in 1..ticks {
            prop_assert!(choosiness_gamma(t + 1, ticks, size, gamma0) < choosiness_gamma(t, ticks, size, gamma0));
        }
        for t in 1..=ticks {
            prop_assert!(choosiness_gamma(t, ticks, size + 1, gamma0) > choosiness_gamma(t, ticks, size, gamma0));
            prop_assert!(choosiness_gamma(t, ticks, size, gamma0) >= 0.0);
        }
    }

    #[test]
    fn accept_offer_tracks_direct_statistics(values in prop::collection::vec(-4.0f64..4.0, 1..100)) {
        let mut stats = OfferStatistics::new();
        let mut history: Vec<f64> = Vec::new();
        for &v in &values {
            let expected = if history.is_empty() {
                true
            } else {
                let n = history.len() as f64;
                let mu = history.iter().sum::<f64>() / n;
                let sd = (history.iter().map(|h| (h - mu).powi(2)).sum::<f64>() / n).sqrt();
                v > mu - 1.5 * sd
            };
            let (ok, next) = accept_offer(v, stats);
            history.push(v);
            let n = history.len() as f64;
            let mu = history.iter().sum::<f64>() / n;
            let sd = (history.iter().map(|h| (h - mu).powi(2)).sum::<f64>() / n).sqrt();
            // decisions that sit on the floor within rounding may legitimately differ
            let floor_gap = if history.len() > 1 { (v - (stats.mean - 1.5 * stats.std_dev())).abs() } else { 1.0 };
            if floor_gap > 1e-9 {
                prop_assert_eq!(ok, expected);
            }
            prop_assert!((next.mean - mu).abs() < 1e-9);
            prop_assert!((next.std_dev() - sd).abs() < 1e-9);
            stats = next;
        }
    }

    #[test]
    fn formation_respects_membership(seed in 0u64..500, k in 1usize..10, d0 in 0.0f64..20.0) {
        let mut pop = population(40, d0, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let initiators: Vec<AgentId> = (0..k).map(|i| AgentId::new(i * 3)).collect();
        let groups = run_formation_phase(&mut pop, &initiators, 8, 3.0, 1, &mut rng);
        let mut seen = HashSet::new();
        prop_assert_eq!(groups.len(), k);
        for (g, &init) in groups.iter().zip(&initiators) {
            prop_assert_eq!(g.members[0], init);
            prop_assert!(g.size() >= 1 && g.size() <= 9);
            for &m in &g.members {
                prop_assert!(seen.insert(m), "agent {} in two groups", m);
                prop_assert!(m == init || pop.network.are_friends(init, m));
            }
        }
    }

    #[test]
    fn awards_and_penalties_nonnegative(
        rows in prop::collection::vec((0.0f64..=10.0, 0.0f64..=1.0), 2..10), field in 0.0f64..100.0
    ) {
        let outcomes: Vec<HarvestOutcome> = rows
            .iter()
            .enumerate()
            .map(|(i, &(g, e))| HarvestOutcome { agent: AgentId::new(i), gross: g, net: g * e })
            .collect();
        let awards = share_awards(&outcomes, 9);
        let penalties = apply_punishment(&outcomes, field, 9);
        prop_assert!(awards.iter().all(|&a| a >= 0.0));
        prop_assert!(penalties.iter().all(|&p| p >= 0.0));
        prop_assert!(penalties.iter().all(|&p| p == penalties[0]));
    }

    #[test]
    fn identical_members_get_identical_awards(size in 2usize..=9, g in 0.1f64..=10.0, e in 0.0f64..=1.0) {
        let outcomes: Vec<HarvestOutcome> = (0..size)
            .map(|i| HarvestOutcome { agent: AgentId::new(i), gross: g, net: g * e })
            .collect();
        let awards = share_awards(&outcomes, 9);
        prop_assert!(awards.iter().all(|&a| a == awards[0]));
        // bonus factor is exactly 1 + |G| / G_max
        let expected = g * e / size as f64 * (1.0 + size as f64 / 9.0);
        prop_assert!((awards[0] - expected).abs() < 1e-9);
    }

    #[test]
    fn friendship_update_is_order_independent(seed in 0u64..300) {
        let mut pop = population(30, 4.0, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let initiators: Vec<AgentId> = (0..6).map(|i| AgentId::new(i * 5)).collect();
        let mut groups = run_formation_phase(&mut pop, &initiators, 8, 3.0, 1, &mut rng);
        let before = pop.network.clone();

        let mut forward = pop.clone();
        let added = update_friendships(&groups, &mut forward);
        groups.shuffle(&mut rng);
        let mut shuffled = pop.clone();
        update_friendships(&groups, &mut shuffled);
        prop_assert_eq!(forward.network.edges(), shuffled.network.edges());
        prop_assert!(forward.network.is_symmetric());
        prop_assert_eq!(forward.network.edge_count(), before.edge_count() + added);

        let co_members: HashSet<(AgentId, AgentId)> = groups
            .iter()
            .flat_map(|g| g.members.iter().flat_map(move |&a| g.members.iter().map(move |&b| (a, b))))
            .collect();
        for (a, b) in forward.network.edges() {
            if !before.are_friends(a, b) {
                prop_assert!(co_members.contains(&(a, b)));
            }
        }
    }

    #[test]
    fn sweep_csv_round_trip(
        cells in prop::collection::vec(
            (0.0f64..=1.0, 0.0f64..=1.0, 1usize..1000, 0usize..1000),
            1..20
        )
    ) {
        let cells: Vec<SweepCell> = cells
            .into_iter()
            .map(|(alpha, beta, reps, wins)| SweepCell {
                alpha,
                beta,
                replications: reps,
                win_rate: (wins % (reps + 1)) as f64 / reps as f64,
                degenerate_runs: wins % (reps + 1),
            })
            .collect();
        let text = sweep_csv(&cells).unwrap();
        prop_assert_eq!(parse_sweep_csv(&text, "mem".as_ref()).unwrap(), cells);
    }
}

#[test]
fn gamma_concentrates_on_best() {
    let mut last = 0.0;
    for gamma in [0.0, 1.0, 3.0, 10.0] {
        let p = selection_weights(&[0.2, 0.8], gamma)[1];
        assert!(p >= last, "gamma={gamma}");
        last = p;
    }
    assert!((selection_weights(&[0.2, 0.8], 0.0)[1] - 0.5).abs() < 1e-12);
}

#[test]
fn gamma_zero_selects_uniformly() {
    let mut pop = population(4, 0.0, 1);
    for (i, r) in [(1, 0.1), (2, 0.5), (3, 0.95)] {
        pop.agents[i].behavior = BehaviorVector::new(r, r).unwrap();
    }
    let eligible: Vec<_> = pop.agents[1..].iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let draws = 90_000;
    let mut counts = [0usize; 3];
    for _ in 0..draws {
        let id = select_offer_target(&pop.agents[0], &eligible, 0.0, &mut rng).unwrap();
        counts[id.index() - 1] += 1;
    }
    let p = 1.0 / 3.0;
    let sd = (draws as f64 * p * (1.0 - p)).sqrt();
    for c in counts {
        assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sd, "{counts:?}");
    }
}

#[test]
fn field_mean_matches_half_normal() {
    // E|N(0, s^2)| = s * sqrt(2 / pi) with s = sqrt(2)
    let expected = 20.0 - 2.0f64.sqrt() * (2.0 / std::f64::consts::PI).sqrt();
    assert!((expected - 18.872).abs() < 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 1_000_000;
    let samples: Vec<f64> = (0..draws).map(|_| assign_field(2, 10.0, &mut rng)).collect();
    assert!(samples.iter().all(|&c| c <= 20.0));
    let mean = samples.iter().sum::<f64>() / draws as f64;
    let var = samples.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    assert!((mean - expected).abs() < 3.0 * se, "mean={mean} expected={expected} se={se}");
}

#[test]
fn perfectly_reliable_groups_are_never_punished() {
    let mut pop = population(20, 0.0, 3);
    for a in &mut pop.agents {
        a.behavior = BehaviorVector::new(1.0, a.behavior.e).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..2000 {
        let groups: Vec<Group> = (0..4)
            .map(|g| Group {
                initiator: AgentId::new(g * 5),
                members: (g * 5..g * 5 + 2 + g).map(AgentId::new).collect(),
                term_index: 1,
            })
            .collect();
        let s = settle_term(&groups, &mut pop, 10.0, 9, &mut rng);
        assert!(s.settlements.iter().all(|x| x.penalty == 0.0));
    }
}

#[test]
fn uniform_team_payout_identity() {
    // All members reliable and fully efficient: gross = net = c0, each share
    // is 1/|G|, so the total award is sum(net) / |G| * (1 + |G| / G_max).
    let mut pop = population(5, 0.0, 8);
    for a in &mut pop.agents {
        a.behavior = BehaviorVector::new(1.0, 1.0).unwrap();
    }
    let group = Group {
        initiator: AgentId::new(0),
        members: (0..5).map(AgentId::new).collect(),
        term_index: 1,
    };
    let before: f64 = pop.agents.iter().map(|a| a.savings).sum();
    let s = settle_term(&[group], &mut pop, 10.0, 9, &mut ChaCha8Rng::seed_from_u64(0));
    let total: f64 = s.settlements.iter().map(|x| x.award).sum();
    assert!((total - 50.0 / 5.0 * (1.0 + 5.0 / 9.0)).abs() < 1e-9);
    assert!(s.settlements.iter().all(|x| x.penalty == 0.0));
    assert!(s.fields[0].capacity <= 50.0);
    let after: f64 = pop.agents.iter().map(|a| a.savings).sum();
    assert!((after - before - total).abs() < 1e-9);
}

#[test]
fn behavior_draws_are_uniform() {
    let cfg = SimConfig {
        n: 10_000,
        k: 1,
        d0: 0.0,
        ..SimConfig::default()
    };
    let pop = init_population(&cfg, &mut ChaCha8Rng::seed_from_u64(21)).unwrap();
    let mean = pop.agents.iter().map(|a| a.behavior.r).sum::<f64>() / 10_000.0;
    assert!((mean - 0.5).abs() <= 0.015, "mean={mean}");
}

#[test]
fn simulation_invariants_hold_every_term() {
    for seed in 0..4 {
        let cfg = SimConfig {
            n: 60,
            k: 12,
            consumption: 3.0,
            max_term: 150,
            seed,
            ..SimConfig::default()
        };
        let mut sim = Simulation::new(cfg.clone()).unwrap();
        let mut alive_prev = sim.population().alive_count();
        while sim.term() < cfg.max_term && sim.stop_reason().is_none() {
            let before = sim.population().clone();
            let edges_before = before.network.edge_count();
            let d = sim.run_term().unwrap();
            let after = sim.population();

            // initiators: distinct and alive after consumption
            let uniq: HashSet<_> = d.initiators.iter().collect();
            assert_eq!(uniq.len(), d.initiators.len());
            assert_eq!(d.initiators.len(), cfg.k.min(after.alive_count()));
            assert!(d.initiators.iter().all(|&i| after.agent(i).alive));
            assert_eq!(d.report.group_size_histogram.iter().sum::<usize>(), d.initiators.len());

            // exclusivity and the T + 1 cap
            let mut seen = HashSet::new();
            for g in &d.groups {
                assert!(g.size() <= cfg.ticks + 1);
                for &m in &g.members {
                    assert!(seen.insert(m));
                    assert!(after.agent(m).alive);
                }
            }

            // savings identity
            for (b, a) in before.agents.iter().zip(&after.agents) {
                if !b.alive {
                    assert_eq!(a.savings, b.savings);
                    continue;
                }
                let delta: f64 = d
                    .settlement
                    .settlements
                    .iter()
                    .filter(|s| s.agent == a.id)
                    .map(|s| s.award - s.penalty)
                    .sum();
                assert!((a.savings - (b.savings - cfg.consumption + delta)).abs() < 1e-9);
            }

            // network: symmetric, dead isolated, growth only by co-membership
            assert!(after.network.is_symmetric());
            for a in &after.agents {
                if !a.alive {
                    assert_eq!(after.network.degree(a.id), 0);
                }
            }
            let culled: HashSet<_> = d.culled.iter().collect();
            let removed = before
                .network
                .edges()
                .iter()
                .filter(|(a, b)| culled.contains(a) || culled.contains(b))
                .count();
            assert_eq!(after.network.edge_count() + removed, edges_before + d.report.edges_added);

            assert!(after.alive_count() <= alive_prev);
            alive_prev = after.alive_count();
        }
    }
}
