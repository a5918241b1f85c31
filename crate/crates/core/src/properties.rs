//! Structural checks for equilibrium networks and shape checks for f-tables.
//!
//! Every check is total on valid input. A check whose preconditions do not
//! hold reports [`Outcome::Inapplicable`] with the reason; a failing check
//! carries a [`Witness`]. Preconditions that can be decided mechanically
//! (attacker class, costs, non-triviality, isolated nodes) are decided here;
//! whether the input is an equilibrium is the caller's business, see
//! [`run_suite`].

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::adversary::{attack_distribution, classify_sqd, g_value, sum_f, u_f_of_attack, FTable};
use crate::equilibrium::{DeviationClass, SolverConfig};
use crate::error::Result;
use crate::game::{induce_network, GameInstance, InducedNetwork, StrategyProfile};
use crate::graph::{block_cut_tree, components_excluding, connected_components, NodeId};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub description: String,
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Inapplicable(String),
    Pass,
    Fail(Witness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub outcome: Outcome,
}

impl CheckResult {
    fn new(name: &'static str, outcome: Outcome) -> Self {
        Self { name, outcome }
    }

    fn inapplicable(name: &'static str, reason: impl Into<String>) -> Self {
        Self::new(name, Outcome::Inapplicable(reason.into()))
    }

    fn fail(name: &'static str, description: String, nodes: Vec<NodeId>) -> Self {
        Self::new(name, Outcome::Fail(Witness { description, nodes }))
    }

    pub fn is_applicable(&self) -> bool {
        !matches!(self.outcome, Outcome::Inapplicable(_))
    }

    /// `None` when inapplicable.
    pub fn passed(&self) -> Option<bool> {
        match self.outcome {
            Outcome::Inapplicable(_) => None,
            Outcome::Pass => Some(true),
            Outcome::Fail(_) => Some(false),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.passed() == Some(false)
    }
}

fn rat(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Reason the SQD lemmas do not apply, if any: the attacker must be an
/// SQD opponent and both costs must exceed 1.
fn sqd_gate(instance: &GameInstance) -> Option<String> {
    if !instance.attacker().is_sqd() {
        return Some("attacker is not an SQD opponent".into());
    }
    if *instance.immunization_cost() <= Rational::one() {
        return Some("SQD results assume C_I > 1".into());
    }
    None
}

fn carnage_gate(instance: &GameInstance) -> Option<String> {
    (!instance.attacker().is_carnage_or_random())
        .then(|| "attacker is neither maximum carnage nor random".to_string())
}

fn nontrivial(net: &InducedNetwork) -> bool {
    net.graph().edge_count() > 0 && net.vulnerable_count() < net.node_count()
}

/// Regions hit with positive probability, flagged per region.
fn targeted_flags(instance: &GameInstance, net: &InducedNetwork) -> Vec<bool> {
    let mut flags = vec![false; net.vulnerable_regions().len()];
    for r in attack_distribution(instance.attacker(), net).support() {
        flags[r] = true;
    }
    flags
}

/// Every vulnerable region induces a tree.
pub fn check_regions_are_trees(net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "regions_are_trees";
    for region in net.vulnerable_regions() {
        let set = region.iter().copied().collect();
        let edges = net.graph().edges_within(&set);
        if edges + 1 != region.len() {
            return CheckResult::fail(
                NAME,
                format!("region of {} nodes spans {edges} edges", region.len()),
                region.clone(),
            );
        }
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// `|E| ≤ 2n - 4` for `n ≥ 4`.
pub fn check_edge_bound(net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "edge_bound";
    let n = net.node_count();
    if n < 4 {
        return CheckResult::inapplicable(NAME, "needs n >= 4");
    }
    let m = net.graph().edge_count();
    if m > 2 * n - 4 {
        return CheckResult::fail(NAME, format!("{m} edges exceed 2n - 4 = {}", 2 * n - 4), Vec::new());
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// Targeted regions are singletons inside qualifying components: any
/// component with an immunized node (SQD), or with an immunized node and an
/// edge in a non-trivial network (maximum carnage, random attack).
pub fn check_targeted_singletons(instance: &GameInstance, net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "targeted_singletons";
    let sqd = sqd_gate(instance);
    let carnage = carnage_gate(instance);
    let needs_edge = match (&sqd, &carnage) {
        (None, _) => false,
        (Some(_), None) if nontrivial(net) => true,
        (Some(_), None) => return CheckResult::inapplicable(NAME, "network is trivial"),
        (Some(a), Some(b)) => return CheckResult::inapplicable(NAME, format!("{a}; {b}")),
    };
    let cc = connected_components(net.graph());
    let mut has_immunized = vec![false; cc.count()];
    let mut has_edge = vec![false; cc.count()];
    for v in 0..net.node_count() {
        let c = cc.component_of[v];
        has_immunized[c] |= net.is_immunized(v);
        has_edge[c] |= net.graph().degree(v) > 0;
    }
    let targeted = targeted_flags(instance, net);
    for (r, region) in net.vulnerable_regions().iter().enumerate() {
        let c = cc.component_of[region[0]];
        let qualifies = has_immunized[c] && (!needs_edge || has_edge[c]);
        if qualifies && targeted[r] && region.len() > 1 {
            return CheckResult::fail(
                NAME,
                format!("targeted region of size {} in a component with an immunized node", region.len()),
                region.clone(),
            );
        }
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// Component sizes are 1 or at least `C_E + 1` (SQD).
pub fn check_component_sizes(instance: &GameInstance, net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "component_sizes";
    if let Some(reason) = sqd_gate(instance) {
        return CheckResult::inapplicable(NAME, reason);
    }
    let threshold = instance.edge_cost() + Rational::one();
    for members in connected_components(net.graph()).members() {
        let size = members.len();
        if size > 1 && rat(size) < threshold {
            return CheckResult::fail(NAME, format!("component of size {size} is below C_E + 1 = {threshold}"), members);
        }
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// At most `C_E + C_I + 2` components when there are no isolated nodes (SQD).
pub fn check_component_count(instance: &GameInstance, net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "component_count";
    if let Some(reason) = sqd_gate(instance) {
        return CheckResult::inapplicable(NAME, reason);
    }
    let g = net.graph();
    if let Some(v) = (0..g.node_count()).find(|&v| g.degree(v) == 0) {
        return CheckResult::inapplicable(NAME, format!("node {v} is isolated"));
    }
    let count = connected_components(g).count();
    let bound = instance.edge_cost() + instance.immunization_cost() + int(2);
    if rat(count) > bound {
        return CheckResult::fail(NAME, format!("{count} components exceed C_E + C_I + 2 = {bound}"), Vec::new());
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// On every block-cut-tree path between two blocks that contain immunized
/// nodes, at most `2C_E + 1` cut-vertices are vulnerable (maximum carnage,
/// random attack).
pub fn check_path_vulnerable_cuts(instance: &GameInstance, net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "path_vulnerable_cuts";
    if let Some(reason) = carnage_gate(instance) {
        return CheckResult::inapplicable(NAME, reason);
    }
    let bct = block_cut_tree(net.graph());
    let ends: Vec<usize> = (0..bct.blocks.len())
        .filter(|&b| bct.blocks[b].iter().any(|&v| net.is_immunized(v)))
        .collect();
    let bound = int(2) * instance.edge_cost() + Rational::one();
    let mut any_path = false;
    for (idx, &from) in ends.iter().enumerate() {
        for &to in &ends[idx + 1..] {
            let Some(cuts) = bct.path_cut_vertices(from, to) else {
                continue;
            };
            any_path = true;
            let vulnerable: Vec<NodeId> = cuts.into_iter().filter(|&c| !net.is_immunized(c)).collect();
            if rat(vulnerable.len()) > bound {
                return CheckResult::fail(
                    NAME,
                    format!("{} vulnerable cut-vertices exceed 2C_E + 1 = {bound}", vulnerable.len()),
                    vulnerable,
                );
            }
        }
    }
    if !any_path {
        return CheckResult::inapplicable(NAME, "no block-cut path joins two blocks with immunized nodes");
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// No vulnerable agents or at least `n / (2C_I)` of them (non-trivial,
/// maximum carnage or random attack).
pub fn check_vulnerable_count(instance: &GameInstance, net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "vulnerable_count";
    if let Some(reason) = carnage_gate(instance) {
        return CheckResult::inapplicable(NAME, reason);
    }
    if !nontrivial(net) {
        return CheckResult::inapplicable(NAME, "network is trivial");
    }
    let u = net.vulnerable_count();
    let n = net.node_count();
    if u > 0 && int(2) * instance.immunization_cost() * rat(u) < rat(n) {
        return CheckResult::fail(
            NAME,
            format!("{u} vulnerable agents, fewer than n / (2C_I) = {}", rat(n) / (int(2) * instance.immunization_cost())),
            net.vulnerable_set().into_iter().collect(),
        );
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// For a cut-vertex `u` that bought all `k` of its edges into a component
/// `Z` of `G - u`: `|Z| ≥ k·C_E`, strictly when `u` is targeted (SQD).
///
/// A pair `(u, Z)` qualifies when some targeted region lies outside `Z`
/// (disjoint from it) or no targeted region lies inside `Z`.
pub fn check_size_after_edge(instance: &GameInstance, profile: &StrategyProfile, net: &InducedNetwork) -> CheckResult {
    const NAME: &str = "size_after_edge";
    if let Some(reason) = sqd_gate(instance) {
        return CheckResult::inapplicable(NAME, reason);
    }
    let g = net.graph();
    let n = g.node_count();
    let targeted = targeted_flags(instance, net);
    let targeted_regions: Vec<&Vec<NodeId>> = net
        .vulnerable_regions()
        .iter()
        .enumerate()
        .filter(|(r, _)| targeted[*r])
        .map(|(_, region)| region)
        .collect();
    for u in 0..n {
        let mut mask = vec![false; n];
        mask[u] = true;
        let rest = components_excluding(g, &mask);
        let mut sides: Vec<usize> = g.neighbors(u).iter().map(|&w| rest.component_of[w]).collect();
        sides.sort_unstable();
        sides.dedup();
        if sides.len() < 2 {
            continue;
        }
        let u_targeted = net.region_of(u).is_some_and(|r| targeted[r]);
        for side in sides {
            let in_side = |v: NodeId| rest.component_of[v] == side;
            let links: Vec<NodeId> = g.neighbors(u).iter().copied().filter(|&w| in_side(w)).collect();
            if !links.iter().all(|w| profile.get(u).buys.contains(w)) {
                continue;
            }
            let outside = targeted_regions.iter().any(|t| t.iter().all(|&v| !in_side(v)));
            let inside = targeted_regions.iter().any(|t| t.iter().all(|&v| in_side(v)));
            if !outside && inside {
                continue;
            }
            let size = rat(rest.sizes[side]);
            let need = rat(links.len()) * instance.edge_cost();
            let ok = if u_targeted { size > need } else { size >= need };
            if !ok {
                let mut nodes = vec![u];
                nodes.extend((0..n).filter(|&v| in_side(v)));
                let relation = if u_targeted { ">" } else { ">=" };
                return CheckResult::fail(
                    NAME,
                    format!("cut-vertex {u} bought {} edges into a component of size {} but needs |Z| {relation} {need}", links.len(), rest.sizes[side]),
                    nodes,
                );
            }
        }
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// What is known about whether a profile is a Nash equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumStatus {
    /// Certified by the exact best-response solver.
    Verified,
    /// Not certified, treated as an equilibrium on request.
    Assumed,
    /// The exact solver found an improving deviation.
    NotNash,
    /// Too large to certify and not assumed.
    Unknown,
}

impl EquilibriumStatus {
    fn usable(self) -> bool {
        matches!(self, EquilibriumStatus::Verified | EquilibriumStatus::Assumed)
    }

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumStatus::Verified => "verified",
            EquilibriumStatus::Assumed => "assumed",
            EquilibriumStatus::NotNash => "not_nash",
            EquilibriumStatus::Unknown => "unknown",
        }
    }
}

/// Certifies the profile with the exact solver when `n` is within the cap.
pub fn equilibrium_status(
    config: &SolverConfig,
    instance: &GameInstance,
    profile: &StrategyProfile,
) -> Result<EquilibriumStatus> {
    if instance.n() > config.exact_cap {
        return Ok(EquilibriumStatus::Unknown);
    }
    let cert = config.is_nash(instance, profile, DeviationClass::Exact)?;
    Ok(if cert.is_nash {
        EquilibriumStatus::Verified
    } else {
        EquilibriumStatus::NotNash
    })
}

/// Runs every structural check. All of them presuppose an equilibrium, so
/// with an unusable status they are all reported inapplicable.
pub fn run_suite(
    instance: &GameInstance,
    profile: &StrategyProfile,
    status: EquilibriumStatus,
) -> Result<Vec<CheckResult>> {
    let net = induce_network(instance, profile)?;
    type Check = fn(&GameInstance, &StrategyProfile, &InducedNetwork) -> CheckResult;
    let checks: [(&'static str, Check); 8] = [
        ("regions_are_trees", |_, _, net| check_regions_are_trees(net)),
        ("edge_bound", |_, _, net| check_edge_bound(net)),
        ("targeted_singletons", |i, _, net| check_targeted_singletons(i, net)),
        ("component_sizes", |i, _, net| check_component_sizes(i, net)),
        ("component_count", |i, _, net| check_component_count(i, net)),
        ("path_vulnerable_cuts", |i, _, net| check_path_vulnerable_cuts(i, net)),
        ("vulnerable_count", |i, _, net| check_vulnerable_count(i, net)),
        ("size_after_edge", check_size_after_edge),
    ];
    if !status.usable() {
        let reason = format!("equilibrium status is {}", status.name());
        return Ok(checks
            .iter()
            .map(|(name, _)| CheckResult::inapplicable(name, reason.clone()))
            .collect());
    }
    Ok(checks
        .par_iter()
        .map(|(_, check)| check(instance, profile, &net))
        .collect())
}

/// `x ↦ f(x)/x` strictly increasing on `1..=n` (SQD tables).
pub fn check_ratio_increasing(f: &FTable) -> CheckResult {
    const NAME: &str = "ratio_increasing";
    if !classify_sqd(f).is_sqd {
        return CheckResult::inapplicable(NAME, "table is not SQD");
    }
    let values = f.values();
    for x in 1..f.max_size() {
        let (a, b) = (&values[x] / rat(x), &values[x + 1] / rat(x + 1));
        if b <= a {
            return CheckResult::fail(NAME, format!("f({})/{} = {b} is not above f({x})/{x} = {a}", x + 1, x + 1), vec![x, x + 1]);
        }
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// `g(x, y) = f(x+y) - f(x) - f(y)` strictly increasing in `x` for every
/// `y > 0` within the table (SQD tables).
pub fn check_g_increase(f: &FTable) -> CheckResult {
    const NAME: &str = "g_increase";
    if !classify_sqd(f).is_sqd {
        return CheckResult::inapplicable(NAME, "table is not SQD");
    }
    let n = f.max_size();
    for y in 1..n {
        let mut prev = g_value(f, 0, y).expect("in range");
        for x in 1..=n - y {
            let next = g_value(f, x, y).expect("in range");
            if next <= prev {
                return CheckResult::fail(NAME, format!("g({x}, {y}) = {next} is not above g({}, {y}) = {prev}", x - 1), vec![x, y]);
            }
            prev = next;
        }
    }
    CheckResult::new(NAME, Outcome::Pass)
}

/// Per-agent component sizes for a multiset of component sizes, padded with
/// zeros (destroyed agents) to `len`, sorted descending.
fn agent_vector(components: &[usize], len: usize) -> Vec<usize> {
    let mut out: Vec<usize> = components.iter().flat_map(|&k| std::iter::repeat_n(k, k)).collect();
    out.resize(len.max(out.len()), 0);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Monotonicity of `U_f` in the per-agent size vector: if the sorted
/// per-agent sizes of `larger` dominate those of `smaller` entrywise then
/// `sum_f(larger) ≥ sum_f(smaller)`, strictly when some pair differs with
/// the smaller entry at least 1. Applies to strictly convex `f` with
/// `f(0) = 0` and dominating inputs.
pub fn check_uf_monotone(f: &FTable, larger: &[usize], smaller: &[usize]) -> Result<CheckResult> {
    const NAME: &str = "uf_monotone";
    let shape = classify_sqd(f);
    if !(shape.f0_is_zero && shape.strictly_convex) {
        return Ok(CheckResult::inapplicable(NAME, "table is not strictly convex with f(0) = 0"));
    }
    let len = larger.iter().sum::<usize>().max(smaller.iter().sum());
    let (a, b) = (agent_vector(larger, len), agent_vector(smaller, len));
    if a.iter().zip(&b).any(|(x, y)| x < y) {
        return Ok(CheckResult::inapplicable(NAME, "first vector does not dominate the second"));
    }
    let strict = a.iter().zip(&b).any(|(x, y)| x > y && *y >= 1);
    let (ua, ub) = (sum_f(f, larger)?, sum_f(f, smaller)?);
    let ok = if strict { ua > ub } else { ua >= ub };
    if !ok {
        let mut nodes = larger.to_vec();
        nodes.extend(smaller);
        return Ok(CheckResult::fail(NAME, format!("U_f {ua} vs {ub} (strict: {strict})"), nodes));
    }
    Ok(CheckResult::new(NAME, Outcome::Pass))
}

/// Equal-size regions in one component, one separating the rest of the
/// component and one not: the separating region has the smaller `U_f`
/// (SQD tables).
pub fn check_cut_vs_leaf(f: &FTable, net: &InducedNetwork, cut: usize, leaf: usize) -> Result<CheckResult> {
    const NAME: &str = "cut_vs_leaf";
    if !classify_sqd(f).is_sqd {
        return Ok(CheckResult::inapplicable(NAME, "table is not SQD"));
    }
    let (tc, tl) = (net.region(cut)?, net.region(leaf)?);
    if cut == leaf || tc.len() != tl.len() {
        return Ok(CheckResult::inapplicable(NAME, "regions must be distinct and of equal size"));
    }
    let cc = connected_components(net.graph());
    if cc.component_of[tc[0]] != cc.component_of[tl[0]] {
        return Ok(CheckResult::inapplicable(NAME, "regions lie in different components"));
    }
    let component = cc.component_of[tc[0]];
    let pieces = |region: usize| -> Result<usize> {
        let removed = components_excluding(net.graph(), &net.removal_mask(region)?);
        let mut labels: Vec<usize> = (0..net.node_count())
            .filter(|&v| cc.component_of[v] == component && removed.component_of[v] != crate::graph::Removed::LABEL)
            .map(|v| removed.component_of[v])
            .collect();
        labels.sort_unstable();
        labels.dedup();
        Ok(labels.len())
    };
    if pieces(cut)? < 2 || pieces(leaf)? > 1 {
        return Ok(CheckResult::inapplicable(NAME, "first region must separate its component and the second must not"));
    }
    let (uc, ul) = (u_f_of_attack(f, net, cut)?, u_f_of_attack(f, net, leaf)?);
    if uc >= ul {
        let mut nodes = tc.to_vec();
        nodes.extend(tl);
        return Ok(CheckResult::fail(NAME, format!("U_f(cut) = {uc} is not below U_f(leaf) = {ul}"), nodes));
    }
    Ok(CheckResult::new(NAME, Outcome::Pass))
}

/// Deleting edges incident to the region `T` of `u` and/or immunizing nodes
/// of `T` never lowers `U_f` of the region that still contains `u`
/// (SQD tables). `after` must arise from `before` by exactly such changes.
pub fn check_edge_aversion(f: &FTable, before: &InducedNetwork, after: &InducedNetwork, u: NodeId) -> Result<CheckResult> {
    const NAME: &str = "edge_aversion";
    if !classify_sqd(f).is_sqd {
        return Ok(CheckResult::inapplicable(NAME, "table is not SQD"));
    }
    let (Some(t), Some(t2)) = (before.region_of(u), after.region_of(u)) else {
        return Ok(CheckResult::inapplicable(NAME, "u must be vulnerable in both networks"));
    };
    let region = before.region(t)?;
    let in_t = |v: NodeId| region.binary_search(&v).is_ok();
    let n = before.node_count();
    let edges_ok = after.node_count() == n
        && after.graph().edges().all(|(a, b)| before.graph().has_edge(a, b))
        && before
            .graph()
            .edges()
            .filter(|&(a, b)| !after.graph().has_edge(a, b))
            .all(|(a, b)| in_t(a) || in_t(b));
    let immunization_ok = (0..n).all(|v| before.is_immunized(v) == after.is_immunized(v) || (in_t(v) && after.is_immunized(v)));
    if !edges_ok || !immunization_ok {
        return Ok(CheckResult::inapplicable(NAME, "second network is not a sell/immunize mutation of the first"));
    }
    let (ub, ua) = (u_f_of_attack(f, before, t)?, u_f_of_attack(f, after, t2)?);
    if ua < ub {
        return Ok(CheckResult::fail(NAME, format!("U_f dropped from {ub} to {ua}"), vec![u]));
    }
    Ok(CheckResult::new(NAME, Outcome::Pass))
}

/// Descriptive comparison of welfare against `n² - c·n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareTrend {
    /// `(n, welfare, n² - welfare)`.
    pub points: Vec<(usize, Rational, Rational)>,
    /// Smallest `c` with `n² - welfare ≤ c·n` at every point.
    pub fitted_c: Rational,
    /// Least-squares slope of `n² - welfare` against `n`.
    pub slope: f64,
}

pub fn welfare_trend(samples: &[(usize, Rational)]) -> WelfareTrend {
    let points: Vec<(usize, Rational, Rational)> = samples
        .iter()
        .map(|(n, w)| (*n, w.clone(), rat(n * n) - w))
        .collect();
    let fitted_c = points
        .iter()
        .map(|(n, _, gap)| gap / rat(*n))
        .max()
        .unwrap_or_else(Rational::zero);
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| crate::rational::to_f64(&p.2)).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    WelfareTrend { points, fitted_c, slope }
}
