//! One line per acceptance criterion, with its runtime against a fixed budget.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use tcm_core::fincat::{colimit, is_universal_cone, limit};
use tcm_core::finset::{tuple_atom as tuple, FinFunction, FinSet};
use tcm_core::graphtopos::*;
use tcm_core::logic::{
    self, ClauseMode, ClauseOptions, Context, ForcingContext, NeighborhoodSystem, Prop,
};
use tcm_core::presheaf::{
    self as psh, count_homs, homs, omega, subobjects, GrothendieckTopology, HeytingOp, Presheaf,
};
use tcm_core::tcm::{self, interval_base, TcmObject, TcmSquare};
use tcm_core::Limits;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    let took = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if took <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over budget")),
        Err(e) => (false, e),
    };
    println!(
        "{} {id}. {name}: {detail} [{:.2}s, budget {}s]",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        budget.as_secs()
    );
    ok
}

fn topos_axioms() -> Check {
    let base = interval_base();
    let (a, b) = (base.object("a").unwrap(), base.object("b").unwrap());
    let om = omega(&base).unwrap();
    // Presheaves on this base put exogenous tuples at `b` and endogenous ones at `a`.
    ensure(om.len(b) == 3 && om.len(a) == 2, || {
        format!("|Ω(b)| = {}, |Ω(a)| = {}", om.len(b), om.len(a))
    })?;
    let u = base.arrow("u").unwrap();
    let t: Vec<(bool, bool)> = (0..3)
        .map(|i| {
            (
                om.sieve(b, i).arrows.is_empty(),
                om.is_top(a, om.restrict(u, i)),
            )
        })
        .collect();
    let table_ok = t.iter().all(|&(empty, top)| empty != top);
    ensure(table_ok, || format!("structure map {t:?}"))?;
    let limits = Limits::default();
    let mut corpus = presheaf_corpus(101, 0);
    let mut r = rng(101);
    while corpus.len() < 24 {
        let (_, base) = &bases()[corpus.len() % 6];
        corpus.push(random_presheaf(&mut r, base, 0, 3));
    }
    for x in &corpus {
        let om = omega(x.base()).unwrap();
        let subs = subobjects(x, &limits).unwrap().len() as u64;
        let maps = count_homs(x, om.presheaf(), &limits).unwrap();
        ensure(subs == maps, || {
            format!("|Sub| = {subs} but |Hom(X, Ω)| = {maps}")
        })?;
    }
    Ok(format!("3 truth values over exogenous tuples, 2 over endogenous; t(∅)=∅, t(mid)=t(max)=max; bijection on {} presheaves", corpus.len()))
}

fn completeness() -> Check {
    let limits = Limits {
        cone_apex_bound: 3,
        ..Limits::default()
    };
    let mut count = 0;
    for kind in ShapeKind::ALL {
        for d in all_diagrams(kind, 3) {
            let cone = if kind.is_limit() {
                limit(&d, &limits).unwrap()
            } else {
                colimit(&d)
            };
            ensure(is_universal_cone(&cone, &limits).unwrap(), || {
                format!("{kind:?} diagram not universal")
            })?;
            count += 1;
        }
    }
    let mut r = rng(7);
    let mut cubes = 0;
    while cubes < 12 {
        let c = random_object(&mut r, 3, 2, "c");
        let a = random_object(&mut r, 2, 2, "a");
        let b = random_object(&mut r, 3, 2, "b");
        if let (Some(s1), Some(s2)) = (random_square(&mut r, &a, &c), random_square(&mut r, &b, &c))
        {
            let pb = tcm::tcm_pullback(&s1, &s2).unwrap();
            for (face, ok) in tcm::pullback_cube_faces(&s1, &s2, &pb) {
                ensure(ok, || format!("cube face {face} fails"))?;
            }
            cubes += 1;
        }
    }
    Ok(format!(
        "{count} diagrams universal with apexes ≤ 3; {cubes} pullback cubes commute"
    ))
}

fn graph_suite() -> Check {
    let om = graph_omega().unwrap();
    ensure(
        om.graph.vertices.len() == 2 && om.graph.edges.len() == 5,
        || "classifier size".into(),
    )?;
    let base = graph_base();
    let (v, e) = (base.object("V").unwrap(), base.object("E").unwrap());
    let yv = psh::yoneda(&base, v).unwrap();
    let ye = psh::yoneda(&base, e).unwrap();
    let hom = |p: &Presheaf, c: usize| p.at(c).elements().to_vec();
    ensure(
        hom(&yv, v) == ["1_V"]
            && hom(&yv, e).is_empty()
            && hom(&ye, v) == ["s", "t"]
            && hom(&ye, e) == ["1_E"],
        || "representables".into(),
    )?;
    let g = FinGraph::from_edges(&["a", "b"], &[("e", "a", "b")]).unwrap();
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
        let got = om.graph.edges.atom(chi.edge_map.apply(0));
        ensure(got == label, || {
            format!("{vs:?}/{es:?} classified as {got}")
        })?;
    }
    let limits = Limits::default();
    let (mut graphs, mut subs) = (0, 0);
    for g in all_graphs(3, 3) {
        for s in subgraphs(&g, &limits).unwrap() {
            let chi = classify_subgraph(&s, &om);
            ensure(classified_subgraph(&chi, &om).unwrap() == s, || {
                "round trip".into()
            })?;
            subs += 1;
        }
        graphs += 1;
    }
    Ok(format!("Ω has 2 vertices and 5 edges; representables and five edge cases match; {subs} subgraphs of {graphs} graphs round-trip"))
}

fn heyting_suite() -> Check {
    let limits = Limits::default();
    let corpus: Vec<Presheaf> = presheaf_corpus(55, 1)
        .into_iter()
        .filter(|x| x.total_size() <= 5)
        .take(8)
        .collect();
    ensure(corpus.len() >= 5, || "corpus too small".into())?;
    let mut triples = 0u64;
    for x in &corpus {
        let subs = subobjects(x, &limits).unwrap();
        for a in &subs {
            let nn = psh::heyting(
                HeytingOp::Not,
                &psh::heyting(HeytingOp::Not, a, None).unwrap(),
                None,
            )
            .unwrap();
            ensure(a.leq(&nn).unwrap(), || "A ≰ ¬¬A".into())?;
            for b in &subs {
                let imp = psh::heyting(HeytingOp::Implies, a, Some(b)).unwrap();
                for z in &subs {
                    let lhs = z.leq(&imp).unwrap();
                    let rhs = psh::heyting(HeytingOp::Meet, z, Some(a))
                        .unwrap()
                        .leq(b)
                        .unwrap();
                    ensure(lhs == rhs, || "adjunction fails".into())?;
                    triples += 1;
                }
            }
        }
    }
    let g = FinGraph::from_edges(&["v"], &[("l", "v", "v")]).unwrap();
    let s = SubGraph::from_atoms(g, &["v"], &[]).unwrap();
    let not_s = subgraph_heyting(HeytingOp::Not, &s, None).unwrap();
    let lem = subgraph_heyting(HeytingOp::Join, &s, Some(&not_s)).unwrap();
    ensure(!lem.is_full(), || "no excluded-middle witness".into())?;
    Ok(format!(
        "adjunction on {triples} triples over {} presheaves; S ∨ ¬S misses the loop edge",
        corpus.len()
    ))
}

fn do_calculus() -> Check {
    let limits = Limits::default();
    let (mut triples, mut squares) = (0, 0);
    for model in binary_scm_corpus(2024) {
        let m = tcm::solve(&model, &limits).unwrap();
        let xs = small_interventions(&model);
        for x in &xs {
            for u in exogenous_assignments(&model) {
                let refs: Vec<&str> = u.iter().map(String::as_str).collect();
                let want = brute_solve(&model, x, &refs);
                for (i, var) in model.endogenous().iter().enumerate() {
                    let got =
                        tcm::potential_outcome(&m, &var.name, x, &tuple(&u), &limits).unwrap();
                    ensure(got == want[i], || {
                        format!("{} {x} {}", model.name(), var.name)
                    })?;
                    triples += 1;
                }
            }
            let once = tcm::intervene(&m, x, &limits).unwrap();
            let twice = tcm::intervene(&once.model, x, &limits).unwrap();
            ensure(once.model.global == twice.model.global, || {
                format!("{x} not idempotent")
            })?;
            for y in &xs {
                if let Ok(xy) = x.union(y) {
                    let seq = tcm::intervene(&once.model, y, &limits).unwrap().model;
                    ensure(
                        seq.global == tcm::intervene(&m, &xy, &limits).unwrap().model.global,
                        || format!("{x} then {y}"),
                    )?;
                }
            }
            let c = tcm::classify_submodel(&once.square).unwrap();
            ensure(c.commutes_with(&m), || "classification square".into())?;
            let (hu, kv) = c.recovered();
            ensure(
                hu == once.square.h.table() && kv == once.square.k.table(),
                || format!("{x} not recovered"),
            )?;
            let one_set = FinSet::singleton("1", "*");
            let one = TcmObject::from_function(FinFunction::identity(&one_set));
            let om = TcmObject::from_function(
                FinFunction::new(tcm::three_values(), FinSet::truth_values(), vec![0, 1, 1])
                    .unwrap(),
            );
            let top = TcmSquare::new(
                one,
                om.clone(),
                FinFunction::new(one_set.clone(), tcm::three_values(), vec![2]).unwrap(),
                FinFunction::new(one_set, FinSet::truth_values(), vec![1]).unwrap(),
            )
            .unwrap();
            let pb = tcm::tcm_pullback(
                &TcmSquare::new(m.clone(), om, c.psi.clone(), c.chi.clone()).unwrap(),
                &top,
            )
            .unwrap();
            ensure(
                pb.object.exogenous().len() == hu.len() && pb.object.endogenous().len() == kv.len(),
                || "pullback of true".into(),
            )?;
            squares += 1;
        }
    }
    Ok(format!("{triples} outcome triples agree; laws hold; {squares} classification squares recover their submodels"))
}

fn logic_suite() -> Check {
    let formulas = FormulaGen::new(2718).corpus(200, 4);
    let max_depth = formulas.iter().map(depth).max().unwrap_or(0);
    ensure(max_depth <= 4, || format!("depth {max_depth}"))?;
    let mut counts = BTreeMap::<&str, u64>::new();
    let toposes = logic_toposes(31);
    for (_, t) in &toposes {
        let ctx = Context::new(t, FormulaGen::context()).unwrap();
        let trivial = GrothendieckTopology::trivial(t.base());
        let reps: Vec<Presheaf> = (0..t.base().object_count())
            .map(|c| psh::yoneda(t.base(), c).unwrap())
            .collect();
        let elements: Vec<ForcingContext> = stages(t.base())
            .iter()
            .flat_map(|n| homs(n, ctx.presheaf(), &Limits::default()).unwrap())
            .map(|a| ForcingContext::new(ctx.clone(), a).unwrap())
            .collect();
        for phi in &formulas {
            let native = logic::comprehension_in(t, &ctx, phi).unwrap();
            let lst = logic::comprehension_in(t, &ctx, &logic::desugar_lst(phi)).unwrap();
            ensure(native.flags() == lst.flags(), || {
                format!("desugaring changes {}", phi.to_sexpr())
            })?;
            let inside = |fc: &ForcingContext| {
                let n = fc.stage();
                (0..t.base().object_count())
                    .all(|c| (0..n.at(c).len()).all(|x| native.contains(c, fc.element.apply(c, x))))
            };
            for fc in &elements {
                let want = logic::forces(t, fc, phi).unwrap();
                ensure(want == inside(fc), || {
                    format!("forcing is not image containment for {}", phi.to_sexpr())
                })?;
                let site = logic::forces_by_clauses(t, fc, phi, ClauseOptions::default())
                    .unwrap()
                    .holds;
                let with_j = logic::forces_by_clauses(
                    t,
                    fc,
                    phi,
                    ClauseOptions {
                        topology: Some(&trivial),
                        ..Default::default()
                    },
                )
                .unwrap()
                .holds;
                let epi = logic::forces_by_clauses(
                    t,
                    fc,
                    phi,
                    ClauseOptions {
                        mode: ClauseMode::EpiSearch,
                        ..Default::default()
                    },
                )
                .unwrap()
                .holds;
                ensure(site == want && with_j == want && epi == want, || {
                    format!("clauses disagree on {}", phi.to_sexpr())
                })?;
                *counts.entry("clause").or_default() += 1;
                let mut local = true;
                for r in &reps {
                    for f in homs(r, fc.stage(), &Limits::default()).unwrap() {
                        let there = inside(&fc.along(&f).unwrap());
                        ensure(!want || there, || {
                            format!("monotonicity fails for {}", phi.to_sexpr())
                        })?;
                        local &= there;
                    }
                }
                ensure(want == local, || {
                    format!("local character fails for {}", phi.to_sexpr())
                })?;
            }
        }
    }
    Ok(format!(
        "{} formulas (depth ≤ {max_depth}) on {} toposes; {} forcing checks agree in all forms",
        formulas.len(),
        toposes.len(),
        counts["clause"]
    ))
}

fn depth(t: &tcm_core::logic::term::Term) -> usize {
    use tcm_core::logic::term::Term::*;
    match t {
        And(a, b) | Or(a, b) | Implies(a, b) => 1 + depth(a).max(depth(b)),
        Not(a) => 1 + depth(a),
        Forall { body, .. } | Exists { body, .. } => 1 + depth(body),
        _ => 0,
    }
}

fn lewis_oracle(ns: &[u32], alpha: u32, beta: u32) -> bool {
    let reach = ns.iter().fold(0, |acc, n| acc | n);
    reach & alpha == 0 || ns.iter().any(|&n| n & alpha != 0 && n & alpha & !beta == 0)
}

fn lewis_suite() -> Check {
    let bits = |m: u32| (0..4).filter(|i| m >> i & 1 == 1).collect();
    let (a, b) = (Prop::atom("a"), Prop::atom("b"));
    let mut checked = 0u64;
    for n in 1..=4usize {
        let m = 1u32 << n;
        let worlds = set("w", n);
        let mut lists: Vec<Vec<u32>> = vec![vec![]];
        for x in 0..m {
            lists.push(vec![x]);
            for y in x + 1..m {
                lists.push(vec![x, y]);
                for z in y + 1..m {
                    lists.push(vec![x, y, z]);
                }
            }
        }
        for u in 0..n {
            for list in &lists {
                let mut ns = vec![vec![bits(m - 1)]; n];
                ns[u] = list.iter().map(|&x| bits(x)).collect();
                for va in 0..m {
                    for vb in 0..m {
                        let val = BTreeMap::from([
                            ("a".to_string(), bits(va)),
                            ("b".to_string(), bits(vb)),
                        ]);
                        let sys = NeighborhoodSystem::new(worlds.clone(), ns.clone(), val).unwrap();
                        let got =
                            logic::lewis_counterfactual(&sys, worlds.atom(u), &a, &b).unwrap();
                        ensure(got == lewis_oracle(list, va, vb), || {
                            format!("n={n} u={u} {list:?} a={va:b} b={vb:b}")
                        })?;
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{checked} systems and valuations agree with the scan"
    ))
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let total = Instant::now();
    let results = [
        run(1, "topos axioms", s(10), topos_axioms),
        run(2, "(co)completeness", s(60), completeness),
        run(3, "graph topos", s(60), graph_suite),
        run(4, "Heyting algebra", s(60), heyting_suite),
        run(5, "do-calculus", s(60), do_calculus),
        run(6, "Kripke-Joyal forcing", s(120), logic_suite),
        run(7, "Lewis counterfactual", s(60), lewis_suite),
    ];
    let took = total.elapsed();
    let passed = results.iter().filter(|&&r| r).count();
    let in_time = took <= s(300);
    println!(
        "{} total: {passed}/{} criteria [{:.2}s, budget 300s]",
        if passed == results.len() && in_time {
            "PASS"
        } else {
            "FAIL"
        },
        results.len(),
        took.as_secs_f64()
    );
    if passed == results.len() && in_time {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
