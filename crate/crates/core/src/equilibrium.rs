//! Best responses, Nash certificates, exhaustive enumeration and
//! best-response dynamics.
//!
//! The exact deviation class ranges over every strategy of an agent
//! (`2^(n-1)` purchase sets times the immunization bit). Candidates are
//! enumerated by number of purchased edges and skipped when the no-attack
//! reach bound `|reach(X)| - |X|·C_E - y·C_I` is strictly below the best
//! utility found so far, which leaves the set of exact maximizers unchanged.
//! Strict improvement is decided by exact rational comparison.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adversary::attack_distribution;
use crate::error::{Error, Result};
use crate::game::{agent_cost, GameInstance, InducedNetwork, Strategy, StrategyProfile};
use crate::graph::{connected_components, ComponentPartition, Graph, NodeId};
use crate::payoff::weighted_connectivity_of;
use crate::rational::Rational;

pub use crate::game::is_nontrivial;

/// Largest `n` for which exact best responses are computed by default.
pub const DEFAULT_EXACT_CAP: usize = 20;
/// Largest `n` for full profile-space enumeration.
pub const ENUMERATION_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationClass {
    /// Every strategy of the agent.
    Exact,
    /// Keep or toggle immunization, combined with no edge change, adding one
    /// edge, dropping one owned edge or swapping one owned edge.
    Local1,
}

impl DeviationClass {
    pub fn name(self) -> &'static str {
        match self {
            DeviationClass::Exact => "exact",
            DeviationClass::Local1 => "local1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    pub current_utility: Rational,
    pub best_utility: Rational,
    /// All maximizers in strategy order.
    pub maximizers: Vec<Strategy>,
}

impl BestResponse {
    pub fn gap(&self) -> Rational {
        &self.best_utility - &self.current_utility
    }

    pub fn improves(&self) -> bool {
        self.best_utility > self.current_utility
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumCertificate {
    pub deviation_class: DeviationClass,
    pub current_utilities: Vec<Rational>,
    /// Best deviation utility minus current utility; never negative.
    pub per_agent_gap: Vec<Rational>,
    /// Lowest maximizing strategy for every agent with a positive gap.
    pub witnesses: Vec<Option<Strategy>>,
    pub is_nash: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentOrder {
    RoundRobin,
    /// A fresh seeded permutation of the agents on every pass.
    SeededRandom(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsMove {
    pub agent: NodeId,
    pub old: Strategy,
    pub new: Strategy,
    pub gain: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub moves: Vec<DynamicsMove>,
    pub passes: usize,
    /// A full pass ended without any move.
    pub converged: bool,
    pub final_profile: StrategyProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub exact_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }
}

/// Fixed view of everyone except agent `i`.
struct AgentView<'a> {
    instance: &'a GameInstance,
    i: NodeId,
    others: Vec<NodeId>,
    base: Graph,
    base_components: ComponentPartition,
    immunized: Vec<bool>,
}

impl<'a> AgentView<'a> {
    fn new(instance: &'a GameInstance, profile: &StrategyProfile, i: NodeId) -> Result<Self> {
        let n = instance.n();
        let mut base = Graph::new(n);
        for (j, s) in profile.strategies().iter().enumerate() {
            if j != i {
                for &k in &s.buys {
                    base.add_edge(j, k)?;
                }
            }
        }
        let base_components = connected_components(&base);
        Ok(Self {
            instance,
            i,
            others: (0..n).filter(|&j| j != i).collect(),
            immunized: profile.strategies().iter().map(|s| s.immunized).collect(),
            base,
            base_components,
        })
    }

    fn utility(&self, candidate: &Strategy) -> Rational {
        let mut graph = self.base.clone();
        for &j in &candidate.buys {
            graph.add_edge(self.i, j).expect("candidate edges are valid");
        }
        let mut immunized = self.immunized.clone();
        immunized[self.i] = candidate.immunized;
        let net = InducedNetwork::from_parts(graph, immunized).expect("sizes match");
        let dist = attack_distribution(self.instance.attacker(), &net);
        let (sum, total) = weighted_connectivity_of(&net, &dist, self.i);
        Rational::new(BigInt::from(sum), BigInt::from(total)) - agent_cost(self.instance, candidate)
    }

    /// Size of `i`'s component when nothing is attacked.
    fn reach(&self, buys: &[NodeId]) -> usize {
        let mut comps: BTreeSet<usize> = buys
            .iter()
            .map(|&j| self.base_components.component_of[j])
            .collect();
        comps.insert(self.base_components.component_of[self.i]);
        comps.iter().map(|&c| self.base_components.sizes[c]).sum()
    }

    fn upper_bound(&self, reach: usize, edges: usize, immunized: bool) -> Rational {
        let s = Strategy {
            buys: BTreeSet::new(),
            immunized,
        };
        Rational::from_integer(BigInt::from(reach))
            - self.instance.edge_cost() * Rational::from_integer(BigInt::from(edges))
            - agent_cost(self.instance, &s)
    }
}

/// Tracks the best utility and all strategies attaining it.
struct Incumbent {
    best: Rational,
    maximizers: BTreeSet<Strategy>,
}

impl Incumbent {
    fn offer(&mut self, utility: Rational, strategy: Strategy) {
        if utility > self.best {
            self.best = utility;
            self.maximizers.clear();
            self.maximizers.insert(strategy);
        } else if utility == self.best {
            self.maximizers.insert(strategy);
        }
    }
}

/// Calls `visit` with every `k`-subset of `items` in lexicographic order;
/// stops early when `visit` returns `false`.
fn for_each_subset<F: FnMut(&[NodeId]) -> bool>(items: &[NodeId], k: usize, mut visit: F) {
    if k > items.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen: Vec<NodeId> = idx.iter().map(|&p| items[p]).collect();
    loop {
        if !visit(&chosen) {
            return;
        }
        // advance to the next combination
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < items.len() - k + pos {
                break;
            }
        }
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
        for q in pos..k {
            chosen[q] = items[idx[q]];
        }
    }
}

fn local1_candidates(view: &AgentView<'_>, current: &Strategy) -> BTreeSet<Strategy> {
    let mut edge_sets: Vec<BTreeSet<NodeId>> = vec![current.buys.clone()];
    let unowned: Vec<NodeId> = view
        .others
        .iter()
        .copied()
        .filter(|j| !current.buys.contains(j))
        .collect();
    for &j in &unowned {
        let mut s = current.buys.clone();
        s.insert(j);
        edge_sets.push(s);
    }
    for &owned in &current.buys {
        let mut dropped = current.buys.clone();
        dropped.remove(&owned);
        for &j in &unowned {
            let mut swapped = dropped.clone();
            swapped.insert(j);
            edge_sets.push(swapped);
        }
        edge_sets.push(dropped);
    }
    edge_sets
        .into_iter()
        .flat_map(|buys| {
            [current.immunized, !current.immunized].map(|immunized| Strategy {
                buys: buys.clone(),
                immunized,
            })
        })
        .collect()
}

impl SolverConfig {
    fn check_cap(&self, instance: &GameInstance, class: DeviationClass) -> Result<()> {
        if class == DeviationClass::Exact && instance.n() > self.exact_cap {
            return Err(Error::CapExceeded {
                what: "exact best responses",
                n: instance.n(),
                cap: self.exact_cap,
            });
        }
        Ok(())
    }

    /// Maximizes agent `i`'s utility over the deviation class with all other
    /// strategies fixed; the attack is recomputed for every candidate.
    pub fn best_response(
        &self,
        instance: &GameInstance,
        profile: &StrategyProfile,
        i: NodeId,
        class: DeviationClass,
    ) -> Result<BestResponse> {
        profile.validate(instance.n())?;
        if i >= instance.n() {
            return Err(Error::AgentOutOfRange(i));
        }
        self.check_cap(instance, class)?;
        let view = AgentView::new(instance, profile, i)?;
        let current = profile.get(i).clone();
        let current_utility = view.utility(&current);
        let mut inc = Incumbent {
            best: current_utility.clone(),
            maximizers: BTreeSet::from([current]),
        };

        match class {
            DeviationClass::Local1 => {
                for candidate in local1_candidates(&view, profile.get(i)) {
                    let u = view.utility(&candidate);
                    inc.offer(u, candidate);
                }
            }
            DeviationClass::Exact => {
                let n = instance.n();
                for k in 0..n {
                    if view.upper_bound(n, k, false) < inc.best {
                        break;
                    }
                    for_each_subset(&view.others, k, |buys| {
                        let reach = view.reach(buys);
                        for immunized in [false, true] {
                            if view.upper_bound(reach, k, immunized) < inc.best {
                                continue;
                            }
                            let candidate = Strategy {
                                buys: buys.iter().copied().collect(),
                                immunized,
                            };
                            let u = view.utility(&candidate);
                            inc.offer(u, candidate);
                        }
                        true
                    });
                }
            }
        }

        Ok(BestResponse {
            current_utility,
            best_utility: inc.best,
            maximizers: inc.maximizers.into_iter().collect(),
        })
    }

    pub fn is_nash(
        &self,
        instance: &GameInstance,
        profile: &StrategyProfile,
        class: DeviationClass,
    ) -> Result<EquilibriumCertificate> {
        profile.validate(instance.n())?;
        self.check_cap(instance, class)?;
        let responses: Vec<BestResponse> = (0..instance.n())
            .into_par_iter()
            .map(|i| self.best_response(instance, profile, i, class))
            .collect::<Result<_>>()?;
        let per_agent_gap: Vec<Rational> = responses.iter().map(BestResponse::gap).collect();
        let witnesses = responses
            .iter()
            .map(|br| br.improves().then(|| br.maximizers[0].clone()))
            .collect();
        Ok(EquilibriumCertificate {
            deviation_class: class,
            is_nash: per_agent_gap.iter().all(Zero::is_zero),
            current_utilities: responses.into_iter().map(|br| br.current_utility).collect(),
            per_agent_gap,
            witnesses,
        })
    }

    /// Repeatedly lets agents switch to a best response when it is a strict
    /// improvement. A move picks the lowest maximizing strategy. Stops after a
    /// pass without moves or after `max_passes` passes.
    pub fn br_dynamics(
        &self,
        instance: &GameInstance,
        initial: &StrategyProfile,
        class: DeviationClass,
        order: AgentOrder,
        max_passes: usize,
    ) -> Result<DynamicsTrace> {
        initial.validate(instance.n())?;
        self.check_cap(instance, class)?;
        let n = instance.n();
        let mut rng = match order {
            AgentOrder::SeededRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            AgentOrder::RoundRobin => None,
        };
        let mut profile = initial.clone();
        let mut moves = Vec::new();
        let mut passes = 0;
        let mut converged = false;
        while passes < max_passes {
            let mut agents: Vec<NodeId> = (0..n).collect();
            if let Some(rng) = rng.as_mut() {
                agents.shuffle(rng);
            }
            passes += 1;
            let mut moved = false;
            for i in agents {
                let br = self.best_response(instance, &profile, i, class)?;
                if br.improves() {
                    let new = br.maximizers[0].clone();
                    moves.push(DynamicsMove {
                        agent: i,
                        old: profile.get(i).clone(),
                        new: new.clone(),
                        gain: br.gap(),
                    });
                    profile.set(i, new);
                    moved = true;
                }
            }
            if !moved {
                converged = true;
                break;
            }
        }
        Ok(DynamicsTrace {
            moves,
            passes,
            converged,
            final_profile: profile,
        })
    }
}

pub fn best_response(
    instance: &GameInstance,
    profile: &StrategyProfile,
    i: NodeId,
    class: DeviationClass,
) -> Result<BestResponse> {
    SolverConfig::default().best_response(instance, profile, i, class)
}

pub fn is_nash(
    instance: &GameInstance,
    profile: &StrategyProfile,
    class: DeviationClass,
) -> Result<EquilibriumCertificate> {
    SolverConfig::default().is_nash(instance, profile, class)
}

pub fn br_dynamics(
    instance: &GameInstance,
    initial: &StrategyProfile,
    class: DeviationClass,
    order: AgentOrder,
    max_passes: usize,
) -> Result<DynamicsTrace> {
    SolverConfig::default().br_dynamics(instance, initial, class, order, max_passes)
}

/// Decodes strategy number `code` of agent `i`: bit 0 is immunization, bit
/// `b ≥ 1` buys the `b`-th other agent.
fn decode_strategy(n: usize, i: NodeId, code: usize) -> Strategy {
    let buys = (0..n)
        .filter(|&j| j != i)
        .enumerate()
        .filter(|(b, _)| code >> (b + 1) & 1 == 1)
        .map(|(_, j)| j)
        .collect();
    Strategy {
        buys,
        immunized: code & 1 == 1,
    }
}

/// Every Nash profile of the instance (optionally only non-trivial ones), in
/// enumeration order. Profiles differing only in edge ownership are distinct.
pub fn enumerate_equilibria(
    instance: &GameInstance,
    class: DeviationClass,
    nontrivial_only: bool,
) -> Result<Vec<StrategyProfile>> {
    let n = instance.n();
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "equilibrium enumeration",
            n,
            cap: ENUMERATION_CAP,
        });
    }
    let per_agent = 1usize << n;
    let total = per_agent.pow(n as u32);
    let solver = SolverConfig::default();
    let found: Vec<Option<StrategyProfile>> = (0..total)
        .into_par_iter()
        .map(|mut index| {
            let strategies = (0..n)
                .map(|i| {
                    let code = index % per_agent;
                    index /= per_agent;
                    decode_strategy(n, i, code)
                })
                .collect();
            let profile = StrategyProfile::new(strategies);
            if nontrivial_only && !is_nontrivial(&profile) {
                return Ok(None);
            }
            for i in 0..n {
                if solver.best_response(instance, &profile, i, class)?.improves() {
                    return Ok(None);
                }
            }
            Ok(Some(profile))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}
