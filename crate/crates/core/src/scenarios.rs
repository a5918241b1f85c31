//! Concrete game instances and seeded random inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{targeted_regions, u_f_of_attack, AttackerSpec, FTable};
use crate::error::{Error, Result};
use crate::game::{induce_network, GameInstance, Strategy, StrategyProfile};
use crate::graph::NodeId;
use crate::payoff::utility;
use crate::rational::{frac, int, Rational};

/// An instance, a profile, and the exact values the profile is documented to
/// produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioBundle {
    pub name: String,
    pub instance: GameInstance,
    pub profile: StrategyProfile,
    pub expected_facts: BTreeMap<String, Rational>,
}

/// Center of the tailored equilibrium's star.
pub const BAD_NASH_CENTER: NodeId = 0;
/// Inner ray nodes (adjacent to the center).
pub const BAD_NASH_INNER: [NodeId; 4] = [1, 2, 3, 4];
/// Outer ray nodes; `BAD_NASH_OUTER[r]` hangs off `BAD_NASH_INNER[r]`.
pub const BAD_NASH_OUTER: [NodeId; 4] = [5, 6, 7, 8];

/// The low-welfare equilibrium of the tailored opponent: `C_E = C_I = 6`,
/// an immunized center with four two-node vulnerable rays (every edge bought
/// by the endpoint further from the center) and `n - 9` isolated vulnerable
/// agents `9..n`.
pub fn make_bad_nash(n: usize) -> Result<ScenarioBundle> {
    if n < 10 {
        return Err(Error::InvalidParameter(format!("bad equilibrium needs n >= 10, got {n}")));
    }
    let instance = GameInstance::new(n, int(6), int(6), AttackerSpec::FOpponent(FTable::tailored(n)?))?;
    let mut strategies = vec![Strategy::empty(); n];
    strategies[BAD_NASH_CENTER] = Strategy::immunized();
    for r in 0..4 {
        strategies[BAD_NASH_INNER[r]] = Strategy::new([BAD_NASH_CENTER], false);
        strategies[BAD_NASH_OUTER[r]] = Strategy::new([BAD_NASH_INNER[r]], false);
    }
    let m = n as i64;
    let facts = [
        ("welfare", int(m + 17)),
        ("utility_center", int(3)),
        ("utility_ray", int(3)),
        ("utility_isolated", frac(m - 10, m - 9)),
        ("vulnerable_regions", int(m - 5)),
        ("targeted_regions", int(m - 9)),
    ];
    Ok(ScenarioBundle {
        name: format!("bad_nash_{n}"),
        instance,
        profile: StrategyProfile::new(strategies),
        expected_facts: facts.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    })
}

/// The maximum-disruption fixture: profile `s` and `s'` (with edge `e = {i, j}`
/// bought by `i`), vulnerable regions `A`, `B` (size 7) and `C = {k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisruptionFixture {
    pub bundle: ScenarioBundle,
    pub with_edge: StrategyProfile,
    pub agent_i: NodeId,
    pub agent_j: NodeId,
    pub agent_k: NodeId,
    pub region_a: Vec<NodeId>,
    pub region_b: Vec<NodeId>,
}

/// 25 agents under the `x²` opponent with `C_E = 17/2`, `C_I = 1`.
///
/// Layout: `k = 0` (vulnerable) buys edges to `i = 1` and to node 3. Node 2
/// (immunized) buys an edge to `i`, so `{1, 2}` is the two-node piece left
/// when `k` is destroyed. Nodes 3..=10 form an immunized path (the 8-node
/// piece). `A = 11..=17` and `B = 18..=24` are vulnerable paths forming their
/// own components; `j = 11`.
///
/// The constructor checks every documented value and fails otherwise.
pub fn make_fig1_fixture() -> Result<DisruptionFixture> {
    let n = 25;
    let (k, i, j) = (0, 1, 11);
    let instance = GameInstance::new(n, frac(17, 2), int(1), AttackerSpec::FOpponent(FTable::monomial(2, n)?))?;
    let mut strategies = vec![Strategy::empty(); n];
    strategies[k] = Strategy::new([1, 3], false);
    strategies[i] = Strategy::immunized();
    strategies[2] = Strategy::new([1], true);
    for v in 3..=10 {
        strategies[v] = if v == 3 { Strategy::immunized() } else { Strategy::new([v - 1], true) };
    }
    for v in (12..=17).chain(19..=24) {
        strategies[v] = Strategy::new([v - 1], false);
    }
    let profile = StrategyProfile::new(strategies);
    let mut with_edge = profile.clone();
    with_edge.set(i, Strategy::new([j], true));

    let region_a: Vec<NodeId> = (11..=17).collect();
    let region_b: Vec<NodeId> = (18..=24).collect();
    let f = FTable::monomial(2, n)?;
    let ce = instance.edge_cost().clone();
    let ci = instance.immunization_cost().clone();

    let s = induce_network(&instance, &profile)?;
    let s2 = induce_network(&instance, &with_edge)?;
    let index = |net: &crate::game::InducedNetwork, region: &[NodeId]| -> Result<usize> {
        let r = net
            .region_of(region[0])
            .ok_or_else(|| Error::FixtureCheck("region start is immunized".into()))?;
        if net.region(r)? != region {
            return Err(Error::FixtureCheck(format!("region {region:?} differs from {:?}", net.region(r)?)));
        }
        Ok(r)
    };
    let (c_s, a_s, b_s) = (index(&s, &[k])?, index(&s, &region_a)?, index(&s, &region_b)?);
    let (c_s2, a_s2) = (index(&s2, &[k])?, index(&s2, &region_a)?);

    let checks: [(&str, Rational, Rational); 6] = [
        ("U(C, s)", u_f_of_attack(&f, &s, c_s)?, int(166)),
        ("U(A, s)", u_f_of_attack(&f, &s, a_s)?, int(170)),
        ("U(C, s')", u_f_of_attack(&f, &s2, c_s2)?, int(194)),
        ("U(A, s')", u_f_of_attack(&f, &s2, a_s2)?, int(170)),
        ("u_i(s)", utility(&instance, &profile, i)?.utility, int(2) - &ci),
        ("u_i(s')", utility(&instance, &with_edge, i)?.utility, int(11) - &ce - &ci),
    ];
    for (name, got, want) in &checks {
        if got != want {
            return Err(Error::FixtureCheck(format!("{name} = {got}, expected {want}")));
        }
    }
    if targeted_regions(&f, &s) != vec![c_s] {
        return Err(Error::FixtureCheck("C is not the unique target in s".into()));
    }
    if targeted_regions(&f, &s2) != vec![a_s2] {
        return Err(Error::FixtureCheck("A is not the unique target in s'".into()));
    }
    if s.region(b_s)?.len() != 7 {
        return Err(Error::FixtureCheck("B must have size 7".into()));
    }

    let expected_facts = checks
        .iter()
        .map(|(name, got, _)| (name.to_string(), got.clone()))
        .collect();
    Ok(DisruptionFixture {
        bundle: ScenarioBundle {
            name: "disruption_fixture".into(),
            instance,
            profile,
            expected_facts,
        },
        with_edge,
        agent_i: i,
        agent_j: j,
        agent_k: k,
        region_a,
        region_b,
    })
}

/// Everybody vulnerable and edgeless.
pub fn make_empty(
    n: usize,
    edge_cost: Rational,
    immunization_cost: Rational,
    attacker: AttackerSpec,
) -> Result<ScenarioBundle> {
    let is_random = attacker == AttackerSpec::Random;
    let instance = GameInstance::new(n, edge_cost, immunization_cost, attacker)?;
    let mut expected_facts = BTreeMap::from([("edges".to_string(), int(0))]);
    if is_random {
        expected_facts.insert("welfare".into(), int(n as i64 - 1));
    }
    Ok(ScenarioBundle {
        name: format!("empty_{n}"),
        instance,
        profile: StrategyProfile::empty(n),
        expected_facts,
    })
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

/// Seeded random profile: for every `i < j`, agent `i` buys `{i, j}` with
/// probability `edge_probability`; then every agent immunizes independently.
pub fn random_profile(
    n: usize,
    edge_probability: f64,
    immunize_probability: f64,
    seed: u64,
) -> Result<StrategyProfile> {
    check_probability("edge probability", edge_probability)?;
    check_probability("immunization probability", immunize_probability)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strategies = vec![Strategy::empty(); n];
    for (i, s) in strategies.iter_mut().enumerate() {
        for j in i + 1..n {
            if rng.gen_bool(edge_probability) {
                s.buys.insert(j);
            }
        }
    }
    for s in &mut strategies {
        s.immunized = rng.gen_bool(immunize_probability);
    }
    Ok(StrategyProfile::new(strategies))
}

/// `f(x) = Σ_{r=2..=4} c_r·x^r` with random non-negative rational
/// coefficients, `c_2 > 0`. Always super-quadratic.
pub fn random_polynomial_table(n: usize, seed: u64) -> Result<FTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c2 = frac(rng.gen_range(1..=6), rng.gen_range(1..=4));
    let c3 = frac(rng.gen_range(0..=3), rng.gen_range(1..=5));
    let c4 = if rng.gen_bool(0.3) { frac(1, rng.gen_range(1..=50)) } else { int(0) };
    let values = (0..=n as i64)
        .map(|x| &c2 * int(x * x) + &c3 * int(x * x * x) + &c4 * int(x * x * x * x))
        .collect();
    FTable::new(values)
}

/// Random convex table: `f(0) = 0` and strictly increasing random
/// increments. Only some of these satisfy the ratio condition.
pub fn random_convex_table(n: usize, seed: u64) -> Result<FTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![int(0)];
    let mut step = frac(rng.gen_range(0..=3), rng.gen_range(1..=3));
    for _ in 0..n {
        let next = values.last().expect("non-empty") + &step;
        values.push(next);
        step += frac(rng.gen_range(1..=6), rng.gen_range(1..=3));
    }
    FTable::new(values)
}

/// Random non-negative table with `f(0) = 0`, no shape constraints.
pub fn random_table(n: usize, seed: u64) -> Result<FTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![int(0)];
    values.extend((0..n).map(|_| frac(rng.gen_range(0..=40), rng.gen_range(1..=4))));
    FTable::new(values)
}
