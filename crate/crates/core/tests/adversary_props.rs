mod common;

use common::{arb_profile, distribution, profile_adjacency, regions, u_f};
use netform::adversary::{attack_distribution, classify_sqd, sum_f, targeted_regions};
use netform::game::induce_network;
use netform::properties::{
    check_cut_vs_leaf, check_edge_aversion, check_g_increase, check_ratio_increasing, check_uf_monotone, Outcome,
};
use netform::rational::{frac, int};
use netform::scenarios::{random_convex_table, random_polynomial_table, random_table};
use netform::{AttackerSpec, FTable, GameInstance, Rational, Strategy, StrategyProfile};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn instance_for(profile: &StrategyProfile, attacker: AttackerSpec) -> GameInstance {
    GameInstance::new(profile.len(), int(2), int(2), attacker).unwrap()
}

fn arb_attacker(n: usize) -> impl proptest::strategy::Strategy<Value = AttackerSpec> {
    prop_oneof![
        Just(AttackerSpec::Random),
        (1u32..=3).prop_map(move |r| AttackerSpec::FOpponent(FTable::monomial(r, n).unwrap())),
        any::<u64>().prop_map(move |seed| AttackerSpec::FOpponent(random_table(n, seed).unwrap())),
    ]
}

proptest! {
    #![proptest_config(common::config(300))]

    #[test]
    fn carnage_targets_largest_regions(profile in arb_profile(1, 8, 30)) {
        let n = profile.len();
        let inst = instance_for(&profile, AttackerSpec::FOpponent(FTable::monomial(1, n).unwrap()));
        let net = induce_network(&inst, &profile).unwrap();
        let largest = net.vulnerable_regions().iter().map(Vec::len).max();
        let want: Vec<usize> = (0..net.vulnerable_regions().len())
            .filter(|&r| Some(net.vulnerable_regions()[r].len()) == largest)
            .collect();
        prop_assert_eq!(targeted_regions(inst.attacker().table().unwrap(), &net), want);
    }

    #[test]
    fn distribution_matches_oracle(
        (profile, attacker) in arb_profile(1, 8, 25).prop_flat_map(|p| {
            let n = p.len();
            (Just(p), arb_attacker(n))
        })
    ) {
        let inst = instance_for(&profile, attacker);
        let net = induce_network(&inst, &profile).unwrap();
        let adj = profile_adjacency(&profile);
        let imm: Vec<bool> = profile.strategies().iter().map(|s| s.immunized).collect();
        prop_assert_eq!(net.vulnerable_regions().to_vec(), regions(&adj, &imm));
        let dist = attack_distribution(inst.attacker(), &net);
        let oracle = distribution(inst.attacker(), &adj, &imm);
        let mut total = Rational::zero();
        for (r, (region, p)) in oracle.iter().enumerate() {
            prop_assert_eq!(&net.vulnerable_regions()[r], region);
            prop_assert_eq!(&dist.probability(r), p);
            total += dist.probability(r);
        }
        if oracle.is_empty() {
            prop_assert!(dist.is_empty());
        } else {
            prop_assert_eq!(total, int(1));
        }
        if let Some(f) = inst.attacker().table() {
            for (r, region) in oracle.iter().enumerate() {
                prop_assert_eq!(netform::adversary::u_f_of_attack(f, &net, r).unwrap(), u_f(f.values(), &adj, &region.0));
            }
        }
    }

    #[test]
    fn sqd_tables_satisfy_table_lemmas(n in 1usize..=20, seed in any::<u64>()) {
        let f = random_polynomial_table(n, seed).unwrap();
        prop_assert!(classify_sqd(&f).is_sqd);
        prop_assert_eq!(check_ratio_increasing(&f).passed(), Some(true));
        prop_assert_eq!(check_g_increase(&f).passed(), Some(true));
    }

    #[test]
    fn convex_tables_classified_by_definition(n in 1usize..=15, seed in any::<u64>()) {
        let f = random_convex_table(n, seed).unwrap();
        let report = classify_sqd(&f);
        prop_assert!(report.f0_is_zero && report.strictly_convex);
        let v = f.values();
        let ratio_ok = (1..n).all(|x| &v[x + 1] / int(((x + 1) * (x + 1)) as i64) >= &v[x] / int((x * x) as i64));
        prop_assert_eq!(report.is_sqd, ratio_ok);
        // the f(n)/n lemma needs only convexity and f(0) = 0
        for x in 1..n {
            prop_assert!(&v[x + 1] / int(x as i64 + 1) > &v[x] / int(x as i64));
        }
    }

    /// Shrinking and splitting components never raises `U_f`.
    #[test]
    fn uf_monotone_under_shrink_and_split(
        sizes in proptest::collection::vec(1usize..=6, 1..6),
        ops in proptest::collection::vec((any::<prop::sample::Index>(), any::<bool>(), 1usize..6), 1..5),
        seed in any::<u64>(),
    ) {
        let n: usize = sizes.iter().sum();
        let f = random_convex_table(n, seed).unwrap();
        let mut smaller = sizes.clone();
        let mut changed = false;
        for (ix, split, amount) in ops {
            let k = ix.index(smaller.len());
            let size = smaller[k];
            if split && size >= 2 {
                let a = 1 + amount % (size - 1);
                smaller[k] = a;
                smaller.push(size - a);
                changed = true;
            } else if size >= 1 {
                smaller[k] = size - 1.min(size);
                changed = true;
            }
        }
        smaller.retain(|&k| k > 0);
        let r = check_uf_monotone(&f, &sizes, &smaller).unwrap();
        prop_assert!(r.is_applicable());
        prop_assert_eq!(r.passed(), Some(true), "{:?}", r);
        if changed {
            // some agent lost connectivity and still has a component of size >= 1,
            // or some agent was destroyed; either way the sum does not grow
            prop_assert!(sum_f(&f, &smaller).unwrap() <= sum_f(&f, &sizes).unwrap());
        }
    }

    /// Selling edges at the region of `u` or immunizing its members never
    /// lowers `U_f` of `u`'s region.
    #[test]
    fn edge_aversion_over_mutations(
        profile in arb_profile(2, 8, 30),
        pick in any::<prop::sample::Index>(),
        drops in proptest::collection::vec(any::<bool>(), 64),
        immunize in proptest::collection::vec(any::<bool>(), 8),
        seed in any::<u64>(),
    ) {
        let n = profile.len();
        let f = random_polynomial_table(n, seed).unwrap();
        let inst = instance_for(&profile, AttackerSpec::FOpponent(f.clone()));
        let before = induce_network(&inst, &profile).unwrap();
        let vulnerable: Vec<usize> = before.vulnerable_set().into_iter().collect();
        prop_assume!(!vulnerable.is_empty());
        let u = vulnerable[pick.index(vulnerable.len())];
        let region = before.region(before.region_of(u).unwrap()).unwrap().to_vec();
        let mut mutated = profile.clone();
        let mut k = 0;
        for i in 0..n {
            let mut s = mutated.get(i).clone();
            s.buys.retain(|&j| {
                k += 1;
                !((region.contains(&i) || region.contains(&j)) && drops[k % drops.len()])
            });
            if region.contains(&i) && i != u && immunize[i] {
                s.immunized = true;
            }
            mutated.set(i, s);
        }
        let after = induce_network(&inst, &mutated).unwrap();
        let r = check_edge_aversion(&f, &before, &after, u).unwrap();
        prop_assert_eq!(r.passed(), Some(true), "{:?}", r);
    }
}

/// Two equal regions in one component: a separating one and a pendant one.
/// Path `x - a - y - b` with immunized `x`, `y` and vulnerable singletons
/// `a` (separating) and `b` (pendant), plus `k` immunized nodes hung on `x`.
#[test]
fn cut_region_beats_leaf_region() {
    for k in 0..4 {
        let n = 4 + k;
        let mut s = vec![Strategy::new([1], true), Strategy::new([2], false), Strategy::new([3], true), Strategy::empty()];
        for _ in 4..n {
            s.push(Strategy::new([0], true));
        }
        let profile = StrategyProfile::new(s);
        for f in [FTable::monomial(2, n).unwrap(), random_polynomial_table(n, k as u64).unwrap()] {
            let inst = GameInstance::new(n, int(2), int(2), AttackerSpec::FOpponent(f.clone())).unwrap();
            let net = induce_network(&inst, &profile).unwrap();
            let (cut, leaf) = (net.region_of(1).unwrap(), net.region_of(3).unwrap());
            assert_eq!(check_cut_vs_leaf(&f, &net, cut, leaf).unwrap().outcome, Outcome::Pass);
            assert_eq!(targeted_regions(&f, &net), vec![cut]);
        }
    }
}

#[test]
fn disruption_square_sums() {
    let f = FTable::monomial(2, 25).unwrap();
    assert_eq!(sum_f(&f, &[7, 2, 8, 7]).unwrap(), int(166));
    assert_eq!(sum_f(&f, &[11, 7]).unwrap(), int(170));
    assert_eq!(sum_f(&f, &[9, 8, 7]).unwrap(), int(194));
    assert_eq!(sum_f(&f, &[]).unwrap(), int(0));
    assert_eq!(sum_f(&FTable::new(vec![int(0), frac(1, 3)]).unwrap(), &[1, 1, 1]).unwrap(), int(1));
}
