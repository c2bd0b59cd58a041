mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use tcm_core::finset::FinSet;
use tcm_core::logic::{
    lewis_counterfactual, outcome_atom, outcome_valuation, NeighborhoodSystem, Prop,
};
use tcm_core::tcm::{potential_outcome, solve, Intervention};
use tcm_core::Error;

fn worlds(n: usize) -> FinSet {
    common::set("w", n)
}

fn bits(mask: u32) -> BTreeSet<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Lists of at most three distinct subsets of `n` worlds, as bitmasks.
fn neighborhood_lists(n: usize) -> Vec<Vec<u32>> {
    let m = 1u32 << n;
    let mut out = vec![vec![]];
    for a in 0..m {
        out.push(vec![a]);
        for b in a + 1..m {
            out.push(vec![a, b]);
            for c in b + 1..m {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

/// The scan over bitmasks: `alpha` and `beta` are the sets of worlds where each holds.
fn oracle(ns: &[u32], alpha: u32, beta: u32) -> bool {
    let reach = ns.iter().fold(0, |acc, n| acc | n);
    if reach & alpha == 0 {
        return true;
    }
    ns.iter().any(|&n| n & alpha != 0 && n & alpha & !beta == 0)
}

fn system(n: usize, lists: Vec<Vec<u32>>, a: u32, b: u32) -> NeighborhoodSystem {
    let ns = lists
        .into_iter()
        .map(|l| l.into_iter().map(bits).collect())
        .collect();
    let val = BTreeMap::from([("a".to_string(), bits(a)), ("b".to_string(), bits(b))]);
    NeighborhoodSystem::new(worlds(n), ns, val).unwrap()
}

#[test]
fn matches_the_scan_on_every_small_system() {
    let (a, b) = (Prop::atom("a"), Prop::atom("b"));
    let compound = [
        (Prop::or(a.clone(), b.clone()), !a.clone()),
        (
            Prop::and(a.clone(), !b.clone()),
            Prop::implies(b.clone(), a.clone()),
        ),
    ];
    let mut checked = 0u64;
    for n in 1..=4 {
        let m = 1u32 << n;
        let lists = neighborhood_lists(n);
        for u in 0..n {
            for list in &lists {
                // Every other world gets the full set as its only neighborhood.
                let mut all = vec![vec![m - 1]; n];
                all[u] = list.clone();
                let base = system(n, all, 0, 0);
                let world = base.worlds().atom(u).to_string();
                for va in 0..m {
                    for vb in 0..m {
                        let sys = NeighborhoodSystem::new(
                            base.worlds().clone(),
                            (0..n).map(|w| base.neighborhoods(w).to_vec()).collect(),
                            BTreeMap::from([("a".into(), bits(va)), ("b".into(), bits(vb))]),
                        )
                        .unwrap();
                        assert_eq!(
                            lewis_counterfactual(&sys, &world, &a, &b).unwrap(),
                            oracle(list, va, vb),
                            "n={n} u={u} {list:?} a={va:b} b={vb:b}"
                        );
                        for (p, q) in &compound {
                            let ext = |f: &Prop| {
                                (0..n)
                                    .filter(|&w| sys.satisfies(w, f))
                                    .fold(0u32, |acc, w| acc | 1 << w)
                            };
                            assert_eq!(
                                lewis_counterfactual(&sys, &world, p, q).unwrap(),
                                oracle(list, ext(p), ext(q))
                            );
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 700_000);
}

#[test]
fn three_world_example() {
    let w = FinSet::ordered("W", ["u", "v", "w"]).unwrap();
    let (a, b) = (Prop::atom("a"), Prop::atom("b"));
    let sys = NeighborhoodSystem::from_atoms(
        w.clone(),
        &[("u", vec![vec!["u"], vec!["v", "w"]])],
        &[("a", vec!["v"]), ("b", vec!["v", "w"])],
    )
    .unwrap();
    assert!(lewis_counterfactual(&sys, "u", &a, &b).unwrap());
    // Putting an a-world without b into the only a-neighborhood breaks it.
    let sys = NeighborhoodSystem::from_atoms(
        w,
        &[("u", vec![vec!["u"], vec!["v", "w"]])],
        &[("a", vec!["v", "w"]), ("b", vec!["v"])],
    )
    .unwrap();
    assert!(!lewis_counterfactual(&sys, "u", &a, &b).unwrap());
}

#[test]
fn one_neighborhood_gives_strict_implication() {
    for n in 1..=4usize {
        let m = 1u32 << n;
        for acc in 0..m {
            for va in 0..m {
                for vb in 0..m {
                    let mut lists = vec![vec![]; n];
                    lists[0] = vec![acc];
                    let sys = system(n, lists, va, vb);
                    let strict = bits(acc)
                        .iter()
                        .all(|&w| va >> w & 1 == 0 || vb >> w & 1 == 1);
                    assert_eq!(
                        lewis_counterfactual(&sys, "w0", &Prop::atom("a"), &Prop::atom("b"))
                            .unwrap(),
                        strict
                    );
                }
            }
        }
    }
}

#[test]
fn singleton_neighborhoods_need_one_witness() {
    // With {w} for each accessible w, one a-and-b world is enough.
    let w = worlds(3);
    let single = vec![
        vec![BTreeSet::from([1]), BTreeSet::from([2])],
        vec![],
        vec![],
    ];
    let val = BTreeMap::from([
        ("a".to_string(), BTreeSet::from([1, 2])),
        ("b".to_string(), BTreeSet::from([1])),
    ]);
    let sys = NeighborhoodSystem::new(w, single, val).unwrap();
    assert!(lewis_counterfactual(&sys, "w0", &Prop::atom("a"), &Prop::atom("b")).unwrap());
}

#[test]
fn malformed_systems_are_rejected() {
    let bad = NeighborhoodSystem::new(
        worlds(2),
        vec![vec![BTreeSet::from([5])], vec![]],
        BTreeMap::new(),
    );
    assert!(matches!(bad, Err(Error::UnknownWorld(_))));
    let short = NeighborhoodSystem::new(worlds(2), vec![vec![]], BTreeMap::new());
    assert!(matches!(short, Err(Error::InvalidShape(_))));
    let sys = system(2, vec![vec![3], vec![]], 1, 2);
    assert!(matches!(
        lewis_counterfactual(&sys, "w0", &Prop::atom("c"), &Prop::True),
        Err(Error::UnknownVariable(_))
    ));
}

#[test]
fn outcome_valuations_come_from_potential_outcomes() {
    let limits = common::limits();
    let model = &common::binary_scm_corpus(2)[5];
    let m = solve(model, &limits).unwrap();
    let x = Intervention::new([("A", "1")]);
    let queries = vec![
        ("C".to_string(), "1".to_string(), x.clone()),
        ("B".to_string(), "0".to_string(), Intervention::empty()),
    ];
    let val = outcome_valuation(&m, &queries, &limits).unwrap();
    assert_eq!(val.len(), 2);
    for (y, v, i) in &queries {
        let ws = &val[&outcome_atom(y, v, i)];
        for (k, u) in m.exogenous().elements().iter().enumerate() {
            assert_eq!(
                ws.contains(&k),
                potential_outcome(&m, y, i, u, &limits).unwrap() == *v
            );
        }
    }
    assert_eq!(outcome_atom("C", "1", &x), "C=1 under do(A=1)");
}

proptest! {
    #[test]
    fn other_worlds_do_not_matter(seed in any::<u64>()) {
        use rand::Rng;
        let mut r = common::rng(seed);
        let n = 4;
        let mut random_lists = || -> Vec<Vec<u32>> { (0..n).map(|_| (0..r.gen_range(0..=3)).map(|_| r.gen_range(0..16)).collect()).collect() };
        let (l1, mut l2) = (random_lists(), random_lists());
        l2[0] = l1[0].clone();
        let (va, vb) = (seed as u32 & 15, (seed >> 4) as u32 & 15);
        let (s1, s2) = (system(n, l1, va, vb), system(n, l2, va, vb));
        let (a, b) = (Prop::atom("a"), Prop::atom("b"));
        prop_assert_eq!(lewis_counterfactual(&s1, "w0", &a, &b).unwrap(), lewis_counterfactual(&s2, "w0", &a, &b).unwrap());
    }
}
