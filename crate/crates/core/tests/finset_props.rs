use proptest::prelude::*;

use tcm_core::finset::*;
use tcm_core::Limits;

fn set(name: &str, n: usize) -> FinSet {
    FinSet::ordered(name, (0..n).map(|i| format!("{name}{i}"))).unwrap()
}

prop_compose! {
    fn function(max_dom: usize, max_cod: usize)(n in 0..=max_dom, m in 1..=max_cod)
        (table in proptest::collection::vec(0..m, n), m in Just(m)) -> FinFunction {
        FinFunction::new(set("a", table.len()), set("b", m), table).unwrap()
    }
}

prop_compose! {
    fn parallel_pair()(n in 0..=4usize, m in 1..=4usize)
        (f in proptest::collection::vec(0..m, n), g in proptest::collection::vec(0..m, n), m in Just(m)) -> (FinFunction, FinFunction) {
        let (a, b) = (set("a", f.len()), set("b", m));
        (FinFunction::new(a.clone(), b.clone(), f).unwrap(), FinFunction::new(a, b, g).unwrap())
    }
}

/// Connected components of the graph on `0..n` with the given edges.
fn components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut label: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for &(x, y) in edges {
            let m = label[x].min(label[y]);
            for v in [x, y] {
                if label[v] != m {
                    label[v] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut roots: Vec<usize> = label.clone();
    roots.sort();
    roots.dedup();
    roots.len()
}

proptest! {
    #[test]
    fn composition_is_associative_and_unital(f in function(4, 4), t2 in proptest::collection::vec(0..3usize, 4), t3 in proptest::collection::vec(0..2usize, 3)) {
        let g = FinFunction::new(f.cod().clone(), set("c", 3), t2[..f.cod().len()].to_vec()).unwrap();
        let h = FinFunction::new(g.cod().clone(), set("d", 2), t3).unwrap();
        let left = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let right = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        prop_assert_eq!(left.table(), right.table());
        prop_assert_eq!(compose(&f, &FinFunction::identity(f.dom())).unwrap().table().to_vec(), f.table().to_vec());
        prop_assert_eq!(compose(&FinFunction::identity(f.cod()), &f).unwrap().table().to_vec(), f.table().to_vec());
    }

    #[test]
    fn equalizer_is_the_agreement_set((f, g) in parallel_pair()) {
        let e = equalizer(&f, &g).unwrap();
        let oracle: Vec<usize> = (0..f.dom().len()).filter(|&x| f.apply(x) == g.apply(x)).collect();
        prop_assert_eq!(e.include.table(), oracle.as_slice());
        prop_assert!(e.include.is_injective());
    }

    #[test]
    fn coequalizer_counts_components((f, g) in parallel_pair()) {
        let q = coequalizer(&f, &g).unwrap();
        let edges: Vec<(usize, usize)> = (0..f.dom().len()).map(|x| (f.apply(x), g.apply(x))).collect();
        prop_assert_eq!(q.set.len(), components(f.cod().len(), &edges));
        prop_assert!(q.map.is_surjective());
        for x in 0..f.dom().len() {
            prop_assert_eq!(q.map.apply(f.apply(x)), q.map.apply(g.apply(x)));
        }
    }

    #[test]
    fn pullback_and_pushout_sizes((f, g) in parallel_pair()) {
        let pb = pullback(&f, &g).unwrap();
        let oracle = (0..f.dom().len()).flat_map(|x| (0..g.dom().len()).map(move |y| (x, y))).filter(|&(x, y)| f.apply(x) == g.apply(y)).count();
        prop_assert_eq!(pb.set.len(), oracle);
        let po = pushout(&f, &g).unwrap();
        let n = f.cod().len();
        let edges: Vec<(usize, usize)> = (0..f.dom().len()).map(|x| (f.apply(x), n + g.apply(x))).collect();
        prop_assert_eq!(po.set.len(), components(2 * n, &edges));
    }

    #[test]
    fn exponential_curry_round_trip(na in 0..=3usize, nb in 1..=3usize, nx in 0..=3usize, seed in any::<u64>()) {
        let (a, b, x) = (set("a", na), set("b", nb), set("x", nx));
        let e = exponential(&a, &b, &Limits::default()).unwrap();
        prop_assert_eq!(e.set.len(), nb.pow(na as u32));
        let xa = product(&x, &a).set;
        let table: Vec<usize> = (0..xa.len()).map(|k| (seed as usize).wrapping_add(k * 7919) % nb).collect();
        let h = FinFunction::new(xa, b.clone(), table).unwrap();
        let k = e.curry(&h, &x).unwrap();
        prop_assert_eq!(e.uncurry(&k).unwrap().table().to_vec(), h.table().to_vec());
        for i in 0..e.set.len() {
            prop_assert_eq!(e.index_of(&e.function_at(i)).unwrap(), i);
        }
    }

    #[test]
    fn subsets_match_characteristic_maps(n in 0..=5usize, bits in any::<u32>()) {
        let s = set("s", n);
        let sub = SubSet::new(s.clone(), (0..n).filter(|i| bits >> i & 1 == 1)).unwrap();
        let chi = characteristic(&sub);
        prop_assert_eq!(classified_subset(&chi).unwrap().members().clone(), sub.members().clone());
    }
}

#[test]
fn exponential_respects_the_cap() {
    let err = exponential(&set("a", 21), &set("b", 2), &Limits::default()).unwrap_err();
    assert!(matches!(err, tcm_core::Error::SizeLimit { .. }));
}
