mod common;

use std::collections::BTreeSet;

use tcm_core::graphtopos::*;
use tcm_core::presheaf::{classify, yoneda, HeytingOp};
use tcm_core::Limits;

fn single_edge() -> FinGraph {
    FinGraph::from_edges(&["a", "b"], &[("e", "a", "b")]).unwrap()
}

/// Pairs of vertex and edge subsets where every kept edge keeps its endpoints.
fn brute_subgraphs(g: &FinGraph) -> Vec<(BTreeSet<usize>, BTreeSet<usize>)> {
    let (nv, ne) = (g.vertices.len(), g.edges.len());
    let mut out = Vec::new();
    for vm in 0u32..1 << nv {
        for em in 0u32..1 << ne {
            let vs: BTreeSet<usize> = (0..nv).filter(|i| vm >> i & 1 == 1).collect();
            let es: BTreeSet<usize> = (0..ne).filter(|i| em >> i & 1 == 1).collect();
            if es
                .iter()
                .all(|&e| vs.contains(&g.src.apply(e)) && vs.contains(&g.tgt.apply(e)))
            {
                out.push((vs, es));
            }
        }
    }
    out
}

#[test]
fn classifier_has_two_vertices_and_five_edges() {
    let om = graph_omega().unwrap();
    assert_eq!(om.graph.vertices.len(), 2);
    assert_eq!(om.graph.edges.len(), 5);
    let triples: BTreeSet<(String, String, String)> = om
        .graph
        .edge_triples()
        .into_iter()
        .map(|(e, s, t)| (e.into(), s.into(), t.into()))
        .collect();
    let want: BTreeSet<(String, String, String)> = [
        ("0_E", "0_V", "0_V"),
        ("s", "V", "0_V"),
        ("t", "0_V", "V"),
        ("st", "V", "V"),
        ("1_E", "V", "V"),
    ]
    .into_iter()
    .map(|(e, s, t)| (e.into(), s.into(), t.into()))
    .collect();
    assert_eq!(triples, want);
}

#[test]
fn representables() {
    let base = graph_base();
    let v = base.object("V").unwrap();
    let e = base.object("E").unwrap();
    let names = |p: &tcm_core::presheaf::Presheaf, c: usize| p.at(c).elements().to_vec();
    let yv = yoneda(&base, v).unwrap();
    let ye = yoneda(&base, e).unwrap();
    assert_eq!(names(&yv, v), ["1_V"]);
    assert!(names(&yv, e).is_empty());
    assert_eq!(names(&ye, v), ["s", "t"]);
    assert_eq!(names(&ye, e), ["1_E"]);
    // As graphs: a lone vertex, and a single edge s → t.
    let g = FinGraph::from_presheaf(&ye).unwrap();
    assert_eq!(g.edge_triples(), [("1_E", "s", "t")]);
}

#[test]
fn five_edge_cases() {
    let g = single_edge();
    let om = graph_omega().unwrap();
    let cases = [
        (&["a", "b"][..], &["e"][..], "1_E"),
        (&["a", "b"], &[], "st"),
        (&["a"], &[], "s"),
        (&["b"], &[], "t"),
        (&[], &[], "0_E"),
    ];
    for (vs, es, label) in cases {
        let s = SubGraph::from_atoms(g.clone(), vs, es).unwrap();
        let chi = classify_subgraph(&s, &om);
        assert_eq!(om.graph.edges.atom(chi.edge_map.apply(0)), label);
        assert_eq!(classified_subgraph(&chi, &om).unwrap(), s);
    }
}

#[test]
fn subgraphs_round_trip_on_small_graphs() {
    let om = graph_omega().unwrap();
    let limits = Limits::default();
    for g in common::all_graphs(3, 2) {
        let subs = subgraphs(&g, &limits).unwrap();
        let mut got: Vec<_> = subs
            .iter()
            .map(|s| (s.vertices().clone(), s.edges().clone()))
            .collect();
        let mut want = brute_subgraphs(&g);
        got.sort();
        want.sort();
        assert_eq!(got, want);
        assert_eq!(
            graph_homs(&g, &om.graph, &limits).unwrap().len(),
            subs.len()
        );
        for s in &subs {
            let chi = classify_subgraph(s, &om);
            assert!(chi.check().is_ok());
            assert_eq!(&classified_subgraph(&chi, &om).unwrap(), s);
            assert_eq!(&SubGraph::from_subpresheaf(&s.to_subpresheaf()).unwrap(), s);
            let via_sieves = classify(&s.to_subpresheaf(), &om.omega).unwrap();
            assert_eq!(
                via_sieves.components(),
                chi.as_presheaf_morphism().components()
            );
        }
    }
}

#[test]
fn excluded_middle_fails_for_a_bare_vertex_in_a_loop() {
    let g = FinGraph::from_edges(&["v"], &[("l", "v", "v")]).unwrap();
    let s = SubGraph::from_atoms(g.clone(), &["v"], &[]).unwrap();
    let not_s = subgraph_heyting(HeytingOp::Not, &s, None).unwrap();
    assert!(not_s.vertices().is_empty());
    let lem = subgraph_heyting(HeytingOp::Join, &s, Some(&not_s)).unwrap();
    assert!(!lem.is_full());
    let nn = subgraph_heyting(HeytingOp::Not, &not_s, None).unwrap();
    assert!(nn.is_full());
}

#[test]
fn limits_and_colimits_of_graphs() {
    let limits = Limits::default();
    let p = single_edge();
    let q = FinGraph::from_edges(
        &["x", "y", "z"],
        &[("f", "x", "y"), ("g", "y", "z"), ("h", "z", "z")],
    )
    .unwrap();
    let prod = graph_product(&p, &q, &limits).unwrap();
    assert_eq!(prod.apex.vertices.len(), 6);
    assert_eq!(prod.apex.edges.len(), 3);
    let sum = graph_coproduct(&p, &q).unwrap();
    assert_eq!(sum.apex.vertices.len(), 5);
    assert_eq!(sum.apex.edges.len(), 4);
    for leg in prod.legs.iter().chain(&sum.legs) {
        assert!(leg.check().is_ok());
    }
    // A pullback over the terminal graph is the product.
    let one = terminal_graph();
    let to_one = |g: &FinGraph| graph_homs(g, &one, &limits).unwrap().remove(0);
    let pb = graph_pullback(&to_one(&p), &to_one(&q), &limits).unwrap();
    assert_eq!(pb.apex.vertices.len(), prod.apex.vertices.len());
    assert_eq!(pb.apex.edges.len(), prod.apex.edges.len());
    assert!(tcm_core::fincat::is_universal_cone(&pb.vertex_cone, &limits).unwrap());
    assert!(tcm_core::fincat::is_universal_cone(&pb.edge_cone, &limits).unwrap());
}

#[test]
fn dot_export_lists_edges() {
    let dot = single_edge().to_dot("G");
    assert!(dot.starts_with("digraph \"G\" {"));
    assert!(dot.contains("\"a\" -> \"b\""));
}
