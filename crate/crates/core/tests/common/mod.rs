//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the engine except for the plain data types.
#![allow(dead_code)]

use netform::rational::int;
use netform::{AttackerSpec, GameInstance, Rational, Strategy, StrategyProfile};
use proptest::prelude::{any, Just};
use proptest::strategy::{BoxedStrategy, Strategy as _};

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        if a != b {
            adj[a][b] = true;
            adj[b][a] = true;
        }
    }
    adj
}

pub fn profile_adjacency(profile: &StrategyProfile) -> Vec<Vec<bool>> {
    let n = profile.len();
    let mut adj = vec![vec![false; n]; n];
    for (i, s) in profile.strategies().iter().enumerate() {
        for &j in &s.buys {
            adj[i][j] = true;
            adj[j][i] = true;
        }
    }
    adj
}

/// Component label per node among nodes with `alive[v]`; dead nodes get `None`.
pub fn labels(adj: &[Vec<bool>], alive: &[bool]) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut label = vec![None; n];
    let mut next = 0;
    for s in 0..n {
        if !alive[s] || label[s].is_some() {
            continue;
        }
        let mut stack = vec![s];
        label[s] = Some(next);
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v][w] && alive[w] && label[w].is_none() {
                    label[w] = Some(next);
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

pub fn component_sizes(adj: &[Vec<bool>], alive: &[bool]) -> Vec<usize> {
    let label = labels(adj, alive);
    let count = label.iter().flatten().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0; count];
    for l in label.into_iter().flatten() {
        sizes[l] += 1;
    }
    sizes
}

pub fn component_count(adj: &[Vec<bool>], alive: &[bool]) -> usize {
    component_sizes(adj, alive).len()
}

/// Vulnerable regions as sorted node lists, ordered by lowest member.
pub fn regions(adj: &[Vec<bool>], immunized: &[bool]) -> Vec<Vec<usize>> {
    let alive: Vec<bool> = immunized.iter().map(|b| !b).collect();
    let label = labels(adj, &alive);
    let count = label.iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (v, l) in label.into_iter().enumerate() {
        if let Some(l) = l {
            out[l].push(v);
        }
    }
    out
}

fn without(n: usize, region: &[usize]) -> Vec<bool> {
    let mut alive = vec![true; n];
    for &v in region {
        alive[v] = false;
    }
    alive
}

pub fn u_f(f: &[Rational], adj: &[Vec<bool>], region: &[usize]) -> Rational {
    component_sizes(adj, &without(adj.len(), region))
        .into_iter()
        .map(|k| f[k].clone())
        .sum()
}

/// Attack probability of every region.
pub fn distribution(attacker: &AttackerSpec, adj: &[Vec<bool>], immunized: &[bool]) -> Vec<(Vec<usize>, Rational)> {
    let regs = regions(adj, immunized);
    if regs.is_empty() {
        return Vec::new();
    }
    match attacker {
        AttackerSpec::Random => {
            let total: usize = regs.iter().map(Vec::len).sum();
            regs.into_iter()
                .map(|r| {
                    let p = int(r.len() as i64) / int(total as i64);
                    (r, p)
                })
                .collect()
        }
        AttackerSpec::FOpponent(table) => {
            let f = table.values();
            let values: Vec<Rational> = regs.iter().map(|r| u_f(f, adj, r)).collect();
            let best = values.iter().min().unwrap().clone();
            let hits = values.iter().filter(|v| **v == best).count() as i64;
            regs.into_iter()
                .zip(values)
                .map(|(r, v)| (r, if v == best { int(1) / int(hits) } else { int(0) }))
                .collect()
        }
    }
}

pub fn expected_cc(instance: &GameInstance, profile: &StrategyProfile, i: usize) -> Rational {
    let adj = profile_adjacency(profile);
    let n = adj.len();
    let immunized: Vec<bool> = profile.strategies().iter().map(|s| s.immunized).collect();
    let dist = distribution(instance.attacker(), &adj, &immunized);
    let cc = |alive: &[bool]| -> Rational {
        if !alive[i] {
            return int(0);
        }
        let label = labels(&adj, alive);
        int(label.iter().filter(|l| **l == label[i]).count() as i64)
    };
    if dist.is_empty() {
        return cc(&vec![true; n]);
    }
    dist.iter().map(|(r, p)| p * cc(&without(n, r))).sum()
}

pub fn utility(instance: &GameInstance, profile: &StrategyProfile, i: usize) -> Rational {
    let s = profile.get(i);
    let mut u = expected_cc(instance, profile, i) - instance.edge_cost() * int(s.buys.len() as i64);
    if s.immunized {
        u -= instance.immunization_cost();
    }
    u
}

pub fn welfare(instance: &GameInstance, profile: &StrategyProfile) -> Rational {
    (0..profile.len()).map(|i| utility(instance, profile, i)).sum()
}

/// Every strategy of agent `i` in an `n`-agent game.
pub fn all_strategies(n: usize, i: usize) -> Vec<Strategy> {
    let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
    let mut out = Vec::new();
    for mask in 0..1usize << others.len() {
        let buys: Vec<usize> = (0..others.len()).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect();
        for imm in [false, true] {
            out.push(Strategy::new(buys.iter().copied(), imm));
        }
    }
    out
}

/// Best utility of agent `i` over all strategies and the sorted maximizers.
pub fn brute_best_response(instance: &GameInstance, profile: &StrategyProfile, i: usize) -> (Rational, Vec<Strategy>) {
    let scored: Vec<(Strategy, Rational)> = all_strategies(profile.len(), i)
        .into_iter()
        .map(|s| {
            let u = utility(instance, &profile.with(i, s.clone()), i);
            (s, u)
        })
        .collect();
    let best = scored.iter().map(|(_, u)| u).max().unwrap().clone();
    let mut maximizers: Vec<Strategy> = scored.into_iter().filter(|(_, u)| *u == best).map(|(s, _)| s).collect();
    maximizers.sort();
    (best, maximizers)
}

pub fn brute_is_nash(instance: &GameInstance, profile: &StrategyProfile) -> bool {
    (0..profile.len()).all(|i| brute_best_response(instance, profile, i).0 == utility(instance, profile, i))
}

/// Random simple graph on `n` nodes as an edge list.
pub fn arb_graph(max_n: usize) -> BoxedStrategy<(usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let len = pairs.len();
        (Just(n), proptest::collection::vec(any::<bool>(), len)).prop_map(move |(n, keep)| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e).collect();
            (n, edges)
        })
    })
    .boxed()
}

/// Random profile: per ordered pair a purchase flag, per agent an
/// immunization flag.
pub fn arb_profile(min_n: usize, max_n: usize, edge_weight: u32) -> BoxedStrategy<StrategyProfile> {
    (min_n..=max_n).prop_flat_map(move |n| {
        let buys = proptest::collection::vec(proptest::bool::weighted(edge_weight as f64 / 100.0), n * n);
        let imm = proptest::collection::vec(any::<bool>(), n);
        (Just(n), buys, imm).prop_map(|(n, buys, imm)| {
            let strategies = (0..n)
                .map(|i| Strategy::new((0..n).filter(|&j| j != i && buys[i * n + j]), imm[i]))
                .collect();
            StrategyProfile::new(strategies)
        })
    })
    .boxed()
}

/// Case count without on-disk failure persistence.
pub fn config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}
