//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tcm_core::fincat::{shapes, FinCategory};
use tcm_core::finset::{tuple_atom, FinFunction, FinSet};
use tcm_core::logic::term::{self as tm, Term, Type};
use tcm_core::presheaf::{yoneda, Presheaf};
use tcm_core::tcm::{interval_base, CausalModel, Intervention, TcmObject, TcmSquare};
use tcm_core::Limits;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The small bases used throughout: every one has at most three objects.
pub fn bases() -> Vec<(&'static str, Arc<FinCategory>)> {
    vec![
        ("terminal", Arc::new(shapes::terminal())),
        ("interval", interval_base()),
        ("graph", Arc::new(shapes::graph_base())),
        ("discrete", Arc::new(shapes::discrete(&["p", "q"]))),
        ("idempotent", Arc::new(shapes::idempotent())),
        ("vee", Arc::new(shapes::vee())),
    ]
}

pub fn set(name: &str, n: usize) -> FinSet {
    FinSet::ordered(name, (0..n).map(|i| format!("{name}{i}"))).unwrap()
}

pub fn random_function(rng: &mut ChaCha8Rng, dom: &FinSet, cod: &FinSet) -> Option<FinFunction> {
    if cod.is_empty() && !dom.is_empty() {
        return None;
    }
    let table = (0..dom.len())
        .map(|_| rng.gen_range(0..cod.len()))
        .collect();
    Some(FinFunction::new(dom.clone(), cod.clone(), table).unwrap())
}

/// A random presheaf with stalks of size `min..=max`, by rejection sampling
/// of the non-identity restrictions.
pub fn random_presheaf(
    rng: &mut ChaCha8Rng,
    base: &Arc<FinCategory>,
    min: usize,
    max: usize,
) -> Presheaf {
    loop {
        let at: Vec<FinSet> = (0..base.object_count())
            .map(|c| {
                set(
                    &format!("x{}_", base.object_name(c)),
                    rng.gen_range(min..=max),
                )
            })
            .collect();
        let mut restrict = Vec::new();
        let mut ok = true;
        for f in 0..base.arrow_count() {
            let (d, c) = (base.src(f), base.tgt(f));
            if base.is_identity(f) {
                restrict.push(FinFunction::identity(&at[d]));
            } else {
                match random_function(rng, &at[c], &at[d]) {
                    Some(r) => restrict.push(r),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            if let Ok(p) = Presheaf::new(base.clone(), at, restrict) {
                return p;
            }
        }
    }
}

/// Presheaves over every base: representables plus random ones with stalks ≤ 3.
pub fn presheaf_corpus(seed: u64, per_base: usize) -> Vec<Presheaf> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for (_, base) in bases() {
        for c in 0..base.object_count() {
            out.push(yoneda(&base, c).unwrap());
        }
        for _ in 0..per_base {
            out.push(random_presheaf(&mut r, &base, 0, 3));
        }
    }
    out
}

/// Three binary endogenous variables `A < B < C`, one exogenous parent each,
/// over every DAG compatible with that order and random mechanism tables.
pub fn binary_scm_corpus(seed: u64) -> Vec<CausalModel> {
    let mut r = rng(seed);
    let bits = ["0", "1"];
    let mut out = Vec::new();
    for mask in 0u8..8 {
        let edges = [
            (mask & 1 != 0, "A", "B"),
            (mask & 2 != 0, "A", "C"),
            (mask & 4 != 0, "B", "C"),
        ];
        let mut b = CausalModel::builder(&format!("scm{mask}"));
        for v in ["A", "B", "C"] {
            b = b.exogenous(&format!("U{v}"), &bits).endogenous(v, &bits);
        }
        for v in ["A", "B", "C"] {
            let mut parents = vec![format!("U{v}")];
            parents.extend(
                edges
                    .iter()
                    .filter(|(on, _, t)| *on && *t == v)
                    .map(|(_, s, _)| s.to_string()),
            );
            let rows: Vec<(Vec<&str>, &str)> = (0..1usize << parents.len())
                .map(|k| {
                    (
                        (0..parents.len())
                            .map(|i| bits[(k >> (parents.len() - 1 - i)) & 1])
                            .collect(),
                        *bits.choose(&mut r).unwrap(),
                    )
                })
                .collect();
            let rows_ref: Vec<(&[&str], &str)> =
                rows.iter().map(|(ps, v)| (ps.as_slice(), *v)).collect();
            let pref: Vec<&str> = parents.iter().map(String::as_str).collect();
            b = b.mechanism_rows(v, &pref, &rows_ref);
        }
        out.push(b.build().unwrap());
    }
    out
}

/// Solves `F_x` for one exogenous assignment by naive fixed-point iteration,
/// reading the mechanism tables through their atoms.
pub fn brute_solve(model: &CausalModel, x: &Intervention, exo: &[&str]) -> Vec<String> {
    let endo = model.endogenous();
    let mut vals: Vec<String> = endo.iter().map(|v| v.domain.atom(0).to_string()).collect();
    let lookup = |name: &str, vals: &[String]| -> String {
        if let Some(i) = endo.iter().position(|v| v.name == name) {
            return vals[i].clone();
        }
        let k = model
            .exogenous()
            .iter()
            .position(|v| v.name == name)
            .unwrap();
        exo[k].to_string()
    };
    for _ in 0..=endo.len() {
        let next: Vec<String> = endo
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if let Some(val) = x.values.get(&v.name) {
                    return val.clone();
                }
                let m = &model.mechanisms()[i];
                let parts: Vec<String> = m.parents.iter().map(|p| lookup(p, &vals)).collect();
                m.table.apply_atom(&tuple_atom(&parts)).unwrap().to_string()
            })
            .collect();
        vals = next;
    }
    vals
}

/// Every exogenous assignment of `model`, as atoms.
pub fn exogenous_assignments(model: &CausalModel) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for v in model.exogenous() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<String>| {
                v.domain
                    .elements()
                    .iter()
                    .map(move |a| [p.clone(), vec![a.clone()]].concat())
            })
            .collect();
    }
    out
}

/// Every intervention setting at most two distinct variables.
pub fn small_interventions(model: &CausalModel) -> Vec<Intervention> {
    let endo = model.endogenous();
    let mut out = vec![Intervention::empty()];
    for (i, a) in endo.iter().enumerate() {
        for va in a.domain.elements() {
            out.push(Intervention::new([(a.name.clone(), va.clone())]));
            for b in &endo[i + 1..] {
                for vb in b.domain.elements() {
                    out.push(Intervention::new([
                        (a.name.clone(), va.clone()),
                        (b.name.clone(), vb.clone()),
                    ]));
                }
            }
        }
    }
    out
}

/// Random formulas over `x: M` and `p: Ω` with connective depth at most
/// `depth`. Bound variables are `y0, y1, …` of type M and `q0, …` of type Ω.
pub struct FormulaGen {
    rng: ChaCha8Rng,
    counter: usize,
}

impl FormulaGen {
    pub fn new(seed: u64) -> Self {
        FormulaGen {
            rng: rng(seed),
            counter: 0,
        }
    }

    pub fn m() -> Type {
        Type::object("M")
    }

    pub fn context() -> Vec<(String, Type)> {
        vec![("x".into(), Self::m()), ("p".into(), Type::Omega)]
    }

    fn atom(&mut self, ms: &[String], omegas: &[String]) -> Term {
        let m = Self::m();
        let mterm = |g: &mut Self| -> Term {
            let name = ms.choose(&mut g.rng).unwrap();
            tm::var(name, m.clone())
        };
        match self.rng.gen_range(0..7) {
            0 => Term::True,
            1 => Term::False,
            2 | 3 => {
                let name = omegas.choose(&mut self.rng).unwrap();
                tm::var(name, Type::Omega)
            }
            _ => {
                let (a, b) = (mterm(self), mterm(self));
                tm::eq(a, b)
            }
        }
    }

    fn go(&mut self, depth: usize, ms: &mut Vec<String>, omegas: &mut Vec<String>) -> Term {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return self.atom(ms, omegas);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..7) {
            0 => tm::and(self.go(d, ms, omegas), self.go(d, ms, omegas)),
            1 => tm::or(self.go(d, ms, omegas), self.go(d, ms, omegas)),
            2 => tm::implies(self.go(d, ms, omegas), self.go(d, ms, omegas)),
            3 => tm::not(self.go(d, ms, omegas)),
            k => {
                let omega_binder = k == 6;
                let name = format!("{}{}", if omega_binder { "q" } else { "y" }, self.counter);
                self.counter += 1;
                let (ty, pool) = if omega_binder {
                    (Type::Omega, &mut *omegas)
                } else {
                    (Self::m(), &mut *ms)
                };
                pool.push(name.clone());
                let body = self.go(d, ms, omegas);
                if omega_binder {
                    omegas.pop();
                } else {
                    ms.pop();
                }
                if k == 4 {
                    tm::forall(&name, ty, body)
                } else {
                    tm::exists(&name, ty, body)
                }
            }
        }
    }

    pub fn formula(&mut self, depth: usize) -> Term {
        self.go(depth, &mut vec!["x".into()], &mut vec!["p".into()])
    }

    /// `count` distinct formulas.
    pub fn corpus(&mut self, count: usize, depth: usize) -> Vec<Term> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        while out.len() < count {
            let f = self.formula(depth);
            if seen.insert(f.to_sexpr()) {
                out.push(f);
            }
        }
        out
    }
}

pub fn limits() -> Limits {
    Limits::default()
}

/// The six finite shapes whose (co)limits are checked exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Pullback,
    Pushout,
    Equalizer,
    Coequalizer,
    Product,
    Coproduct,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 6] = [
        ShapeKind::Pullback,
        ShapeKind::Pushout,
        ShapeKind::Equalizer,
        ShapeKind::Coequalizer,
        ShapeKind::Product,
        ShapeKind::Coproduct,
    ];

    pub fn shape(self) -> Arc<FinCategory> {
        Arc::new(match self {
            ShapeKind::Pullback => shapes::pullback(),
            ShapeKind::Pushout => shapes::pushout(),
            ShapeKind::Equalizer | ShapeKind::Coequalizer => shapes::parallel_pair(),
            ShapeKind::Product | ShapeKind::Coproduct => shapes::discrete(&["x", "y"]),
        })
    }

    pub fn is_limit(self) -> bool {
        matches!(
            self,
            ShapeKind::Pullback | ShapeKind::Equalizer | ShapeKind::Product
        )
    }

    /// Generators as `(name, source object, target object)` indices.
    fn generators(self, shape: &FinCategory) -> Vec<(String, usize, usize)> {
        shape
            .arrows()
            .iter()
            .enumerate()
            .filter(|(i, a)| !shape.is_identity(*i) && !a.name.contains('∘'))
            .map(|(_, a)| (a.name.clone(), a.src, a.tgt))
            .collect()
    }
}

fn all_tables(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| (0..m).map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    if m == 0 && n > 0 {
        return Vec::new();
    }
    out
}

/// Every diagram of the given shape whose sets have at most `max` elements.
pub fn all_diagrams(kind: ShapeKind, max: usize) -> Vec<tcm_core::fincat::SetDiagram> {
    let shape = kind.shape();
    let gens = kind.generators(&shape);
    let n = shape.object_count();
    let mut sizes = vec![Vec::new()];
    for _ in 0..n {
        sizes = sizes
            .into_iter()
            .flat_map(|s: Vec<usize>| (0..=max).map(move |k| [s.clone(), vec![k]].concat()))
            .collect();
    }
    let mut out = Vec::new();
    for sz in sizes {
        let sets: Vec<FinSet> = (0..n).map(|j| set(shape.object_name(j), sz[j])).collect();
        let mut choices: Vec<Vec<(String, FinFunction)>> = vec![Vec::new()];
        for (name, s, t) in &gens {
            let fs: Vec<FinFunction> = all_tables(sz[*s], sz[*t])
                .into_iter()
                .map(|tb| FinFunction::new(sets[*s].clone(), sets[*t].clone(), tb).unwrap())
                .collect();
            choices = choices
                .into_iter()
                .flat_map(|c| {
                    fs.iter()
                        .map(move |f| [c.clone(), vec![(name.clone(), f.clone())]].concat())
                })
                .collect();
        }
        for c in choices {
            let g: Vec<(&str, FinFunction)> =
                c.iter().map(|(n, f)| (n.as_str(), f.clone())).collect();
            out.push(
                tcm_core::fincat::SetDiagram::on_free_shape(shape.clone(), sets.clone(), &g)
                    .unwrap(),
            );
        }
    }
    out
}

/// Every graph on vertices `v0..` and edges `e0..` with at most the given
/// numbers of each.
pub fn all_graphs(max_v: usize, max_e: usize) -> Vec<tcm_core::graphtopos::FinGraph> {
    let mut out = Vec::new();
    for nv in 0..=max_v {
        let vs: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
        for ne in 0..=max_e {
            for ends in all_tables(2 * ne, nv) {
                let edges: Vec<(String, String, String)> = (0..ne)
                    .map(|i| {
                        (
                            format!("e{i}"),
                            vs[ends[2 * i]].clone(),
                            vs[ends[2 * i + 1]].clone(),
                        )
                    })
                    .collect();
                out.push(tcm_core::graphtopos::FinGraph::from_edges(&vs, &edges).unwrap());
            }
        }
    }
    out
}

/// One topos per base, each with an object `M` whose stalks have one or two
/// elements.
pub fn logic_toposes(seed: u64) -> Vec<(&'static str, tcm_core::logic::Topos)> {
    let mut r = rng(seed);
    bases()
        .into_iter()
        .map(|(name, base)| {
            let mut t = tcm_core::logic::Topos::new(base.clone(), Limits::default()).unwrap();
            t.add_object("M", random_presheaf(&mut r, &base, 1, 2))
                .unwrap();
            (name, t)
        })
        .collect()
}

/// The representables and the terminal presheaf.
pub fn stages(base: &Arc<FinCategory>) -> Vec<Presheaf> {
    let mut out: Vec<Presheaf> = (0..base.object_count())
        .map(|c| yoneda(base, c).unwrap())
        .collect();
    out.push(tcm_core::presheaf::terminal(base));
    out
}

pub fn random_object(r: &mut ChaCha8Rng, nu: usize, nv: usize, tag: &str) -> TcmObject {
    let u = set(&format!("u{tag}"), nu);
    let v = set(&format!("v{tag}"), nv);
    TcmObject::from_function(random_function(r, &u, &v).unwrap())
}

/// A random square into `dst`, or `None` when the sampled `k` admits no `h`.
pub fn random_square(r: &mut ChaCha8Rng, src: &TcmObject, dst: &TcmObject) -> Option<TcmSquare> {
    let k = random_function(r, src.endogenous(), dst.endogenous())?;
    let mut table = Vec::new();
    for x in 0..src.exogenous().len() {
        let fibre: Vec<usize> = (0..dst.exogenous().len())
            .filter(|&y| dst.global.apply(y) == k.apply(src.global.apply(x)))
            .collect();
        table.push(*fibre.choose(r)?);
    }
    let h = FinFunction::new(src.exogenous().clone(), dst.exogenous().clone(), table).unwrap();
    Some(TcmSquare::new(src.clone(), dst.clone(), h, k).unwrap())
}
