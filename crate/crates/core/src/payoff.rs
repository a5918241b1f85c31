//! Post-attack connectivity, utilities and social welfare.
//!
//! Costs are paid in every outcome, including those in which the agent is
//! destroyed: `u_i = E[CC_i] - |X_i|·C_E - y_i·C_I`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::adversary::{attack_distribution, AttackDistribution};
use crate::error::{Error, Result};
use crate::game::{agent_cost, induce_network, GameInstance, InducedNetwork, StrategyProfile};
use crate::graph::{components_excluding, connected_components, NodeId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityReport {
    pub agent: NodeId,
    pub expected_connectivity: Rational,
    pub cost: Rational,
    pub utility: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareReport {
    pub per_agent: Vec<UtilityReport>,
    pub total: Rational,
}

/// `CC_i(T)`: 0 if `i ∈ T`, else the size of `i`'s component in `G − T`.
pub fn post_attack_component_size(net: &InducedNetwork, region: usize, i: NodeId) -> Result<usize> {
    let mask = net.removal_mask(region)?;
    Ok(components_excluding(net.graph(), &mask).size_of(i))
}

/// Integer weighted sums `Σ_T w_T · CC_v(T)` for every agent `v`, plus the
/// total weight. With an empty distribution the plain component sizes are
/// returned with weight 1.
pub(crate) fn weighted_connectivity(net: &InducedNetwork, dist: &AttackDistribution) -> (Vec<u64>, u64) {
    let n = net.node_count();
    if dist.is_empty() {
        let cc = connected_components(net.graph());
        return ((0..n).map(|v| cc.size_of(v) as u64).collect(), 1);
    }
    let mut sums = vec![0u64; n];
    for &(region, weight) in dist.weights() {
        let mask = net.removal_mask(region).expect("support is valid");
        let labels = components_excluding(net.graph(), &mask);
        for (v, sum) in sums.iter_mut().enumerate() {
            *sum += weight * labels.size_of(v) as u64;
        }
    }
    (sums, dist.total_weight())
}

/// Weighted connectivity for one agent only.
pub(crate) fn weighted_connectivity_of(
    net: &InducedNetwork,
    dist: &AttackDistribution,
    i: NodeId,
) -> (u64, u64) {
    if dist.is_empty() {
        let labels = components_excluding(net.graph(), &vec![false; net.node_count()]);
        return (labels.size_of(i) as u64, 1);
    }
    let mut sum = 0;
    for &(region, weight) in dist.weights() {
        if net.region_of(i) == Some(region) {
            continue;
        }
        let mask = net.removal_mask(region).expect("support is valid");
        sum += weight * components_excluding(net.graph(), &mask).size_of(i) as u64;
    }
    (sum, dist.total_weight())
}

fn ratio(numer: u64, denom: u64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `E[CC_i] = Σ_T P[T]·CC_i(T)`; the plain component size when nothing is
/// attacked.
pub fn expected_connectivity(net: &InducedNetwork, dist: &AttackDistribution, i: NodeId) -> Rational {
    let (sum, total) = weighted_connectivity_of(net, dist, i);
    ratio(sum, total)
}

pub fn utility(instance: &GameInstance, profile: &StrategyProfile, i: NodeId) -> Result<UtilityReport> {
    if i >= instance.n() {
        return Err(Error::AgentOutOfRange(i));
    }
    let net = induce_network(instance, profile)?;
    let dist = attack_distribution(instance.attacker(), &net);
    let expected_connectivity = expected_connectivity(&net, &dist, i);
    let cost = agent_cost(instance, profile.get(i));
    Ok(UtilityReport {
        agent: i,
        utility: &expected_connectivity - &cost,
        expected_connectivity,
        cost,
    })
}

pub fn social_welfare(instance: &GameInstance, profile: &StrategyProfile) -> Result<WelfareReport> {
    let net = induce_network(instance, profile)?;
    let dist = attack_distribution(instance.attacker(), &net);
    let (sums, total) = weighted_connectivity(&net, &dist);
    let per_agent: Vec<UtilityReport> = sums
        .iter()
        .enumerate()
        .map(|(i, &sum)| {
            let expected_connectivity = ratio(sum, total);
            let cost = agent_cost(instance, profile.get(i));
            UtilityReport {
                agent: i,
                utility: &expected_connectivity - &cost,
                expected_connectivity,
                cost,
            }
        })
        .collect();
    let total = per_agent.iter().fold(Rational::zero(), |acc, r| acc + &r.utility);
    Ok(WelfareReport { per_agent, total })
}

/// Welfare through the identity `Σ_i CC_i(T) = Σ_K |K|²`:
/// `E_T[Σ_K |K|²]` minus all costs. Independent of the per-agent route.
pub fn welfare_via_square_sums(instance: &GameInstance, profile: &StrategyProfile) -> Result<Rational> {
    let net = induce_network(instance, profile)?;
    let dist = attack_distribution(instance.attacker(), &net);
    let square_sum = |mask: &[bool]| -> u64 {
        components_excluding(net.graph(), mask)
            .sizes
            .iter()
            .map(|&k| (k * k) as u64)
            .sum()
    };
    let expected = if dist.is_empty() {
        ratio(square_sum(&vec![false; net.node_count()]), 1)
    } else {
        let weighted: u64 = dist
            .weights()
            .iter()
            .map(|&(r, w)| w * square_sum(&net.removal_mask(r).expect("support is valid")))
            .sum();
        ratio(weighted, dist.total_weight())
    };
    let costs = profile
        .strategies()
        .iter()
        .fold(Rational::zero(), |acc, s| acc + agent_cost(instance, s));
    Ok(expected - costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{AttackerSpec, FTable};
    use crate::game::Strategy;
    use crate::rational::{frac, int};

    #[test]
    fn empty_network_under_random_attack() {
        let inst = GameInstance::new(5, int(2), int(1), AttackerSpec::Random).unwrap();
        let profile = StrategyProfile::empty(5);
        let w = social_welfare(&inst, &profile).unwrap();
        assert_eq!(w.total, int(4));
        assert_eq!(w.per_agent[0].expected_connectivity, frac(4, 5));
        assert_eq!(welfare_via_square_sums(&inst, &profile).unwrap(), int(4));
    }

    #[test]
    fn immunized_clique_is_never_attacked() {
        let inst = GameInstance::new(4, int(2), int(1), AttackerSpec::Random).unwrap();
        let profile = StrategyProfile::new(vec![
            Strategy::new([1, 2, 3], true),
            Strategy::new([2, 3], true),
            Strategy::new([3], true),
            Strategy::immunized(),
        ]);
        let net = induce_network(&inst, &profile).unwrap();
        let dist = attack_distribution(inst.attacker(), &net);
        for i in 0..4 {
            assert_eq!(expected_connectivity(&net, &dist, i), int(4));
        }
    }

    #[test]
    fn immunized_tree_welfare() {
        let n = 6;
        let f = FTable::monomial(2, n).unwrap();
        let inst = GameInstance::new(n, int(3), int(2), AttackerSpec::FOpponent(f)).unwrap();
        let mut strategies = vec![Strategy::immunized()];
        strategies.extend((1..n).map(|v| Strategy::new([v - 1], true)));
        let profile = StrategyProfile::new(strategies);
        let w = social_welfare(&inst, &profile).unwrap();
        let n = n as i64;
        assert_eq!(w.total, int(n * n - (n - 1) * 3 - n * 2));
    }

    #[test]
    fn destroyed_agents_still_pay() {
        let inst = GameInstance::new(1, int(2), int(3), AttackerSpec::Random).unwrap();
        let profile = StrategyProfile::empty(1);
        let u = utility(&inst, &profile, 0).unwrap();
        assert_eq!(u.utility, int(0));
        let inst = GameInstance::new(2, int(2), int(3), AttackerSpec::Random).unwrap();
        let profile = StrategyProfile::new(vec![Strategy::new([1], false), Strategy::empty()]);
        assert_eq!(utility(&inst, &profile, 0).unwrap().utility, int(-2));
        assert_eq!(utility(&inst, &profile, 2), Err(Error::AgentOutOfRange(2)));
    }
}
