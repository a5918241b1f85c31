//! Game instances, strategies and the network a profile induces.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::adversary::AttackerSpec;
use crate::error::{Error, Result};
use crate::graph::{induced_components, Graph, NodeId, NodeSet};
use crate::rational::Rational;

/// The tuple `(n, C_E, C_I, attacker)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameInstance {
    n: usize,
    edge_cost: Rational,
    immunization_cost: Rational,
    attacker: AttackerSpec,
}

impl GameInstance {
    pub fn new(
        n: usize,
        edge_cost: Rational,
        immunization_cost: Rational,
        attacker: AttackerSpec,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("n must be at least 1".into()));
        }
        if edge_cost <= Rational::one() {
            return Err(Error::InvalidInstance(format!("edge cost {edge_cost} must exceed 1")));
        }
        if immunization_cost <= Rational::zero() {
            return Err(Error::InvalidInstance(format!(
                "immunization cost {immunization_cost} must be positive"
            )));
        }
        if let AttackerSpec::FOpponent(f) = &attacker {
            if f.max_size() != n {
                return Err(Error::InvalidInstance(format!(
                    "f-table covers sizes 0..={} but n = {n}",
                    f.max_size()
                )));
            }
        }
        Ok(Self {
            n,
            edge_cost,
            immunization_cost,
            attacker,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_cost(&self) -> &Rational {
        &self.edge_cost
    }

    pub fn immunization_cost(&self) -> &Rational {
        &self.immunization_cost
    }

    pub fn attacker(&self) -> &AttackerSpec {
        &self.attacker
    }
}

/// One agent's choice: the nodes it buys edges to and whether it immunizes.
///
/// Ordering is lexicographic on the sorted purchase list, then on the
/// immunization bit; it is the tie-break order used by the solvers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Strategy {
    pub buys: BTreeSet<NodeId>,
    pub immunized: bool,
}

impl Strategy {
    pub fn new<I: IntoIterator<Item = NodeId>>(buys: I, immunized: bool) -> Self {
        Self {
            buys: buys.into_iter().collect(),
            immunized,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn immunized() -> Self {
        Self::new([], true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyProfile {
    strategies: Vec<Strategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        Self { strategies }
    }

    /// All agents vulnerable, nobody buys anything.
    pub fn empty(n: usize) -> Self {
        Self::new(vec![Strategy::empty(); n])
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn get(&self, i: NodeId) -> &Strategy {
        &self.strategies[i]
    }

    pub fn set(&mut self, i: NodeId, strategy: Strategy) {
        self.strategies[i] = strategy;
    }

    /// Copy of the profile with agent `i` switched to `strategy`.
    pub fn with(&self, i: NodeId, strategy: Strategy) -> Self {
        let mut out = self.clone();
        out.strategies[i] = strategy;
        out
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.strategies.len() != n {
            return Err(Error::ProfileLength {
                expected: n,
                got: self.strategies.len(),
            });
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if s.buys.contains(&i) {
                return Err(Error::SelfPurchase(i));
            }
            if let Some(&j) = s.buys.iter().find(|&&j| j >= n) {
                return Err(Error::NodeOutOfRange {
                    node: j,
                    node_count: n,
                });
            }
        }
        Ok(())
    }
}

/// The network `G(s)` with its immunized/vulnerable partition and regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedNetwork {
    graph: Graph,
    immunized: Vec<bool>,
    vulnerable_regions: Vec<Vec<NodeId>>,
    immunized_regions: Vec<Vec<NodeId>>,
    region_of: Vec<Option<usize>>,
}

impl InducedNetwork {
    /// Builds the network from a graph and immunization flags.
    pub fn from_parts(graph: Graph, immunized: Vec<bool>) -> Result<Self> {
        if immunized.len() != graph.node_count() {
            return Err(Error::ProfileLength {
                expected: graph.node_count(),
                got: immunized.len(),
            });
        }
        let vulnerable: Vec<bool> = immunized.iter().map(|b| !b).collect();
        let vulnerable_regions = induced_components(&graph, &vulnerable);
        let immunized_regions = induced_components(&graph, &immunized);
        let mut region_of = vec![None; graph.node_count()];
        for (r, region) in vulnerable_regions.iter().enumerate() {
            for &v in region {
                region_of[v] = Some(r);
            }
        }
        Ok(Self {
            graph,
            immunized,
            vulnerable_regions,
            immunized_regions,
            region_of,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn is_immunized(&self, v: NodeId) -> bool {
        self.immunized[v]
    }

    pub fn immunized_flags(&self) -> &[bool] {
        &self.immunized
    }

    pub fn immunized_set(&self) -> NodeSet {
        (0..self.node_count()).filter(|&v| self.immunized[v]).collect()
    }

    pub fn vulnerable_set(&self) -> NodeSet {
        (0..self.node_count()).filter(|&v| !self.immunized[v]).collect()
    }

    pub fn vulnerable_count(&self) -> usize {
        self.immunized.iter().filter(|b| !**b).count()
    }

    /// Vulnerable regions, each sorted, ordered by lowest contained node.
    pub fn vulnerable_regions(&self) -> &[Vec<NodeId>] {
        &self.vulnerable_regions
    }

    pub fn immunized_regions(&self) -> &[Vec<NodeId>] {
        &self.immunized_regions
    }

    pub fn region(&self, index: usize) -> Result<&[NodeId]> {
        self.vulnerable_regions
            .get(index)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidRegion(index))
    }

    /// Index of the vulnerable region containing `v`, if `v` is vulnerable.
    pub fn region_of(&self, v: NodeId) -> Option<usize> {
        self.region_of[v]
    }

    /// Removal mask for the nodes of region `index`.
    pub fn removal_mask(&self, index: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.node_count()];
        for &v in self.region(index)? {
            mask[v] = true;
        }
        Ok(mask)
    }
}

/// Builds `G(s)`: `{i, j}` is an edge iff `j ∈ X_i` or `i ∈ X_j`.
pub fn induce_network(instance: &GameInstance, profile: &StrategyProfile) -> Result<InducedNetwork> {
    profile.validate(instance.n())?;
    induce_unchecked(profile)
}

pub(crate) fn induce_unchecked(profile: &StrategyProfile) -> Result<InducedNetwork> {
    let n = profile.len();
    let mut graph = Graph::new(n);
    for (i, s) in profile.strategies().iter().enumerate() {
        for &j in &s.buys {
            graph.add_edge(i, j)?;
        }
    }
    let immunized = profile.strategies().iter().map(|s| s.immunized).collect();
    InducedNetwork::from_parts(graph, immunized)
}

/// The regions of `net`; see [`InducedNetwork::vulnerable_regions`].
pub fn vulnerable_regions(net: &InducedNetwork) -> Vec<Vec<NodeId>> {
    net.vulnerable_regions().to_vec()
}

/// `|X_i|·C_E + y_i·C_I`.
pub fn agent_cost(instance: &GameInstance, strategy: &Strategy) -> Rational {
    let mut cost = instance.edge_cost() * Rational::from_integer(strategy.buys.len().into());
    if strategy.immunized {
        cost += instance.immunization_cost();
    }
    cost
}

/// True iff `G(s)` has an edge and at least one agent is immunized.
pub fn is_nontrivial(profile: &StrategyProfile) -> bool {
    let any_edge = profile.strategies().iter().any(|s| !s.buys.is_empty());
    let any_immunized = profile.strategies().iter().any(|s| s.immunized);
    any_edge && any_immunized
}
