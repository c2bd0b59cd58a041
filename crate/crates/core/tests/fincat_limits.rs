mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::{set, ShapeKind};
use tcm_core::fincat::*;
use tcm_core::finset::{self, FinFunction};
use tcm_core::Limits;

fn cospan(f: Vec<usize>, g: Vec<usize>, nz: usize) -> SetDiagram {
    let (x, y, z) = (set("x", f.len()), set("y", g.len()), set("z", nz));
    let f = FinFunction::new(x.clone(), z.clone(), f).unwrap();
    let g = FinFunction::new(y.clone(), z.clone(), g).unwrap();
    SetDiagram::on_free_shape(
        Arc::new(shapes::pullback()),
        vec![x, y, z],
        &[("f", f), ("g", g)],
    )
    .unwrap()
}

prop_compose! {
    fn random_cospan()(nz in 1..=3usize)(f in proptest::collection::vec(0..nz, 0..=3), g in proptest::collection::vec(0..nz, 0..=3), nz in Just(nz)) -> SetDiagram {
        cospan(f, g, nz)
    }
}

proptest! {
    #[test]
    fn pullback_limit_matches_set_pullback(d in random_cospan()) {
        let cone = limit(&d, &Limits::default()).unwrap();
        let pb = finset::pullback(d.arrow(d.shape().arrow("f").unwrap()), d.arrow(d.shape().arrow("g").unwrap())).unwrap();
        prop_assert_eq!(cone.apex.len(), pb.set.len());
        prop_assert!(is_universal_cone(&cone, &Limits::default()).unwrap());
    }

    #[test]
    fn mediator_factors_every_cone(d in random_cospan(), seed in any::<u64>()) {
        let cone = limit(&d, &Limits::default()).unwrap();
        let mut r = common::rng(seed);
        // Restrict the limit along a random map to get another cone.
        let t = set("t", 2);
        if let Some(h) = common::random_function(&mut r, &t, &cone.apex) {
            let legs = cone.legs.iter().map(|l| finset::compose(l, &h).unwrap()).collect();
            let other = Cone { diagram: d.clone(), apex: t, legs, direction: Direction::Over };
            let m = mediating_morphism(&cone, &other).unwrap();
            prop_assert_eq!(m.table(), h.table());
        }
    }

    #[test]
    fn colimit_of_a_span_is_universal(nz in 0..=3usize, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (x, y, z) = (set("x", 2), set("y", 2), set("z", nz));
        let f = common::random_function(&mut r, &z, &x).unwrap();
        let g = common::random_function(&mut r, &z, &y).unwrap();
        let d = SetDiagram::on_free_shape(Arc::new(shapes::pushout()), vec![x, y, z], &[("f", f.clone()), ("g", g.clone())]).unwrap();
        let co = colimit(&d);
        prop_assert_eq!(co.apex.len(), finset::pushout(&f, &g).unwrap().set.len());
        prop_assert!(is_universal_cone(&co, &Limits::default()).unwrap());
    }
}

#[test]
fn every_small_diagram_has_universal_cones() {
    let limits = Limits {
        cone_apex_bound: 2,
        ..Limits::default()
    };
    for kind in ShapeKind::ALL {
        for d in common::all_diagrams(kind, 2) {
            let cone = if kind.is_limit() {
                limit(&d, &limits).unwrap()
            } else {
                colimit(&d)
            };
            assert!(is_universal_cone(&cone, &limits).unwrap(), "{kind:?}");
        }
    }
}

#[test]
fn a_non_universal_cone_is_reported() {
    let d = cospan(vec![0, 0], vec![0], 1);
    let cone = limit(&d, &Limits::default()).unwrap();
    // Dropping one element of the apex loses universality.
    let apex = set("w", 1);
    let legs = cone
        .legs
        .iter()
        .map(|l| FinFunction::new(apex.clone(), l.cod().clone(), vec![l.apply(0)]).unwrap())
        .collect();
    let small = Cone {
        diagram: d,
        apex,
        legs,
        direction: Direction::Over,
    };
    let report = universality_report(&small, &Limits::default()).unwrap();
    let failure = report.failure.expect("a witness cone");
    assert_eq!(failure.mediators, 0);
}

#[test]
fn shapes_validate() {
    for c in [
        shapes::terminal(),
        shapes::interval(),
        shapes::pullback(),
        shapes::pushout(),
        shapes::parallel_pair(),
        shapes::graph_base(),
        shapes::idempotent(),
        shapes::vee(),
    ] {
        assert!(c.validate().is_ok(), "{}", c.name());
        let op = c.opposite();
        assert!(op.validate().is_ok());
        assert_eq!(op.opposite().arrows().len(), c.arrows().len());
    }
}
