//! Kripke-Joyal forcing by recursion on the formula.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use super::eval::{eval_at, restrict_env, Binding, Env, ForcingContext};
use super::term::{Term, Type};
use super::topos::{typecheck, Resolved, Topos, Typed};
use crate::presheaf::{
    self, check_topology, subobjects, yoneda, yoneda_arrow, GrothendieckTopology, Presheaf, Sieve,
    SubPresheaf,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClauseMode {
    /// Clauses at objects of the base, with covering sieves for `∨`, `∃`, `¬`.
    #[default]
    Site,
    /// Clauses at arbitrary stages, searching jointly epic covers for `∨`, `∃`.
    EpiSearch,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClauseOptions<'a> {
    pub topology: Option<&'a GrothendieckTopology>,
    pub mode: ClauseMode,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub clause: String,
    pub stage: String,
    pub element: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseResult {
    pub holds: bool,
    pub trace: Vec<TraceNode>,
}

fn clause_name(t: &Term) -> &'static str {
    match t {
        Term::And(..) => "and",
        Term::Or(..) => "or",
        Term::Implies(..) => "implies",
        Term::Not(..) => "not",
        Term::Forall { .. } => "forall",
        Term::Exists { .. } => "exists",
        Term::True => "true",
        Term::False => "false",
        _ => "atomic",
    }
}

struct Site<'t> {
    topos: &'t Topos,
    topology: Option<&'t GrothendieckTopology>,
    trace: bool,
}

impl<'t> Site<'t> {
    fn covers(&self, c: usize, arrows: BTreeSet<usize>) -> bool {
        match self.topology {
            None => arrows.contains(&self.topos.base().id(c)),
            Some(j) => j.covers(&Sieve { on: c, arrows }),
        }
    }

    fn covering(&self, c: usize) -> Vec<Sieve> {
        match self.topology {
            None => vec![Sieve::maximal(self.topos.base(), c)],
            Some(j) => j.covering_sieves(c),
        }
    }

    fn describe(&self, c: usize, env: &Env<'_>) -> String {
        let parts: Vec<String> = env
            .iter()
            .map(|b| format!("{}={}", b.name, b.ty.presheaf.at(c).atom(b.value)))
            .collect();
        parts.join(", ")
    }

    fn force<'a>(&self, t: &'a Typed, c: usize, env: &Env<'a>) -> (bool, Option<TraceNode>) {
        let mut kids = Vec::new();
        let holds = self.clause(t, c, env, &mut kids);
        let node = self.trace.then(|| TraceNode {
            clause: clause_name(&t.term).into(),
            stage: self.topos.base().object_name(c).into(),
            element: self.describe(c, env),
            holds,
            children: kids,
        });
        (holds, node)
    }

    fn rec<'a>(&self, t: &'a Typed, c: usize, env: &Env<'a>, kids: &mut Vec<TraceNode>) -> bool {
        let (holds, node) = self.force(t, c, env);
        kids.extend(node);
        holds
    }

    fn clause<'a>(&self, t: &'a Typed, c: usize, env: &Env<'a>, kids: &mut Vec<TraceNode>) -> bool {
        let base = self.topos.base();
        let ch = &t.children;
        match &t.term {
            Term::True => true,
            Term::False => self.covers(c, BTreeSet::new()),
            Term::And(..) => self.rec(&ch[0], c, env, kids) && self.rec(&ch[1], c, env, kids),
            Term::Or(..) => match self.topology {
                None => self.rec(&ch[0], c, env, kids) || self.rec(&ch[1], c, env, kids),
                Some(_) => self.covering(c).iter().any(|s| {
                    s.arrows.iter().all(|&f| {
                        let renv = restrict_env(env, f);
                        let d = base.src(f);
                        self.rec(&ch[0], d, &renv, kids) || self.rec(&ch[1], d, &renv, kids)
                    })
                }),
            },
            Term::Implies(..) => base.arrows_into(c).into_iter().all(|f| {
                let renv = restrict_env(env, f);
                let d = base.src(f);
                !self.rec(&ch[0], d, &renv, kids) || self.rec(&ch[1], d, &renv, kids)
            }),
            Term::Not(..) => base.arrows_into(c).into_iter().all(|f| {
                let d = base.src(f);
                !self.rec(&ch[0], d, &restrict_env(env, f), kids) || self.covers(d, BTreeSet::new())
            }),
            Term::Exists { var, .. } => {
                let bty = t.binder.as_ref().expect("binder type");
                let witness = |d: usize, renv: &Env<'a>, kids: &mut Vec<TraceNode>| {
                    (0..bty.presheaf.at(d).len()).any(|b| {
                        let mut e = renv.clone();
                        e.push(Binding {
                            name: var,
                            ty: bty.clone(),
                            value: b,
                        });
                        self.rec(&ch[0], d, &e, kids)
                    })
                };
                match self.topology {
                    None => witness(c, env, kids),
                    Some(_) => self.covering(c).iter().any(|s| {
                        s.arrows
                            .iter()
                            .all(|&f| witness(base.src(f), &restrict_env(env, f), kids))
                    }),
                }
            }
            Term::Forall { var, .. } => {
                let bty = t.binder.as_ref().expect("binder type");
                base.arrows_into(c).into_iter().all(|f| {
                    let d = base.src(f);
                    let renv = restrict_env(env, f);
                    (0..bty.presheaf.at(d).len()).all(|b| {
                        let mut e = renv.clone();
                        e.push(Binding {
                            name: var,
                            ty: bty.clone(),
                            value: b,
                        });
                        self.rec(&ch[0], d, &e, kids)
                    })
                })
            }
            _ => {
                let v = eval_at(self.topos, t, c, env);
                self.covers(c, self.topos.omega().sieve(c, v).arrows.clone())
            }
        }
    }
}

/// A stage `N` with the context values of `α` at every element.
struct Stage {
    presheaf: Presheaf,
    values: Vec<Vec<Vec<usize>>>,
}

/// The closure of `points` under restriction.
fn generated(x: &Presheaf, points: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<bool>> {
    let base = x.base();
    let mut flags: Vec<Vec<bool>> = (0..base.object_count())
        .map(|c| vec![false; x.at(c).len()])
        .collect();
    for (c, k) in points {
        for f in base.arrows_into(c) {
            flags[base.src(f)][x.res(f, k)] = true;
        }
    }
    flags
}

/// Subobjects of `N × B` generated by one witness over each element of a
/// generating set of `N`. Every jointly epic subobject contains one of these.
fn witness_covers(
    n: &Presheaf,
    p: &presheaf::PresheafProduct,
    cap: u64,
) -> Result<Vec<SubPresheaf>> {
    let base = n.base();
    let mut elems: Vec<(usize, usize, usize)> = Vec::new();
    for c in 0..base.object_count() {
        for x in 0..n.at(c).len() {
            let size = generated(n, [(c, x)])
                .iter()
                .flatten()
                .filter(|&&b| b)
                .count();
            elems.push((size, c, x));
        }
    }
    elems.sort_by_key(|e| std::cmp::Reverse(e.0));
    let mut covered: Vec<Vec<bool>> = (0..base.object_count())
        .map(|c| vec![false; n.at(c).len()])
        .collect();
    let mut gens = Vec::new();
    for (_, c, x) in elems {
        if !covered[c][x] {
            for (d, row) in generated(n, [(c, x)]).into_iter().enumerate() {
                for (y, b) in row.into_iter().enumerate() {
                    covered[d][y] |= b;
                }
            }
            gens.push((c, x));
        }
    }
    let options: Vec<Vec<usize>> = gens
        .iter()
        .map(|&(c, x)| {
            (0..p.presheaf.at(c).len())
                .filter(|&k| p.proj1.apply(c, k) == x)
                .collect()
        })
        .collect();
    let total = options.iter().try_fold(1u64, |acc, o| {
        acc.checked_mul(o.len() as u64).filter(|&t| t <= cap)
    });
    let Some(total) = total else {
        return Err(Error::size_limit("witness choices", format!(">{cap}"), cap));
    };
    let mut out = Vec::with_capacity(total as usize);
    let mut pick = vec![0usize; gens.len()];
    if options.iter().any(|o| o.is_empty()) {
        return Ok(out);
    }
    loop {
        let points = gens
            .iter()
            .zip(&pick)
            .zip(&options)
            .map(|((&(c, _), &i), o)| (c, o[i]));
        out.push(SubPresheaf::from_parts(
            p.presheaf.clone(),
            generated(&p.presheaf, points),
        ));
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

struct Epi<'t> {
    topos: &'t Topos,
    representables: Vec<Presheaf>,
}

type Vars<'a> = Vec<(&'a str, Arc<Resolved>)>;

impl<'t> Epi<'t> {
    fn new(topos: &'t Topos) -> Result<Self> {
        let base = topos.base();
        let representables = (0..base.object_count())
            .map(|d| yoneda(base, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Epi {
            topos,
            representables,
        })
    }

    fn env<'a>(vars: &Vars<'a>, values: &[usize]) -> Env<'a> {
        vars.iter()
            .zip(values)
            .map(|((name, ty), &value)| Binding {
                name,
                ty: ty.clone(),
                value,
            })
            .collect()
    }

    /// `y(d)` with the element `α∘n̂` for `α(n) = values`.
    fn representable(&self, vars: &Vars<'_>, d: usize, values: &[usize]) -> Stage {
        let y = &self.representables[d];
        let base = self.topos.base();
        let vals = (0..base.object_count())
            .map(|e| {
                (0..y.at(e).len())
                    .map(|k| {
                        let g = yoneda_arrow(y, e, k);
                        vars.iter()
                            .zip(values)
                            .map(|((_, ty), &v)| ty.presheaf.res(g, v))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Stage {
            presheaf: y.clone(),
            values: vals,
        }
    }

    fn for_elements(
        &self,
        stage: &Stage,
        mut f: impl FnMut(usize, usize) -> Result<bool>,
    ) -> Result<bool> {
        for c in 0..self.topos.base().object_count() {
            for n in 0..stage.presheaf.at(c).len() {
                if !f(c, n)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn force<'a>(&self, t: &'a Typed, vars: &Vars<'a>, stage: &Stage) -> Result<bool> {
        let ch = &t.children;
        let om = self.topos.omega();
        match &t.term {
            Term::And(..) => {
                Ok(self.force(&ch[0], vars, stage)? && self.force(&ch[1], vars, stage)?)
            }
            Term::Or(..) => {
                let subs = subobjects(&stage.presheaf, self.topos.limits())?;
                let mut left = Vec::new();
                let mut right = Vec::new();
                for s in &subs {
                    let (sub, incl) = s.to_presheaf();
                    let values = (0..incl.components().len())
                        .map(|c| {
                            incl.component(c)
                                .iter()
                                .map(|&x| stage.values[c][x].clone())
                                .collect()
                        })
                        .collect();
                    let restricted = Stage {
                        presheaf: sub,
                        values,
                    };
                    if self.force(&ch[0], vars, &restricted)? {
                        left.push(s.flags());
                    }
                    if self.force(&ch[1], vars, &restricted)? {
                        right.push(s.flags());
                    }
                }
                Ok(left.iter().any(|a| {
                    right.iter().any(|b| {
                        a.iter()
                            .zip(b.iter())
                            .all(|(p, q)| p.iter().zip(q).all(|(&x, &y)| x || y))
                    })
                }))
            }
            Term::Implies(..) | Term::Not(..) => self.for_elements(stage, |d, n| {
                let r = self.representable(vars, d, &stage.values[d][n]);
                let antecedent = self.force(&ch[0], vars, &r)?;
                Ok(!antecedent
                    || (matches!(t.term, Term::Implies(..)) && self.force(&ch[1], vars, &r)?))
            }),
            Term::Exists { var, .. } => {
                let bty = t.binder.clone().expect("binder type");
                let p = presheaf::product(&stage.presheaf, &bty.presheaf)?;
                let mut ext = vars.clone();
                ext.push((var.as_str(), bty.clone()));
                let mut seen = BTreeSet::new();
                for r in witness_covers(&stage.presheaf, &p, self.topos.limits().max_enum)? {
                    if !seen.insert(r.flags().to_vec()) {
                        continue;
                    }
                    let (sub, incl) = r.to_presheaf();
                    let values = (0..incl.components().len())
                        .map(|c| {
                            incl.component(c)
                                .iter()
                                .map(|&k| {
                                    let mut v = stage.values[c][p.proj1.apply(c, k)].clone();
                                    v.push(p.proj2.apply(c, k));
                                    v
                                })
                                .collect()
                        })
                        .collect();
                    if self.force(
                        &ch[0],
                        &ext,
                        &Stage {
                            presheaf: sub,
                            values,
                        },
                    )? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Term::Forall { var, .. } => {
                let bty = t.binder.clone().expect("binder type");
                let mut ext = vars.clone();
                ext.push((var.as_str(), bty.clone()));
                self.for_elements(stage, |d, n| {
                    for b in 0..bty.presheaf.at(d).len() {
                        let mut v = stage.values[d][n].clone();
                        v.push(b);
                        if !self.force(&ch[0], &ext, &self.representable(&ext, d, &v))? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })
            }
            _ => self.for_elements(stage, |c, n| {
                Ok(om.is_top(
                    c,
                    eval_at(self.topos, t, c, &Self::env(vars, &stage.values[c][n])),
                ))
            }),
        }
    }
}

/// `N ⊩ φ(α)` by the forcing clauses; agrees with [`super::forces`].
pub fn forces_by_clauses(
    topos: &Topos,
    fc: &ForcingContext,
    phi: &Term,
    opts: ClauseOptions<'_>,
) -> Result<ClauseResult> {
    fc.context.covers(phi)?;
    let typed = typecheck(topos, phi)?;
    if !typed.is_formula() {
        return Err(Error::TypeMismatch {
            term: phi.to_sexpr(),
            expected: Type::Omega.to_string(),
            found: typed.ty.to_string(),
        });
    }
    if let Some(j) = opts.topology {
        let report = check_topology(j)?;
        if !report.is_ok() {
            return Err(Error::InvalidShape(format!(
                "not a Grothendieck topology: {:?}",
                report.violations
            )));
        }
    }
    let base = topos.base();
    let n = fc.stage();
    match opts.mode {
        ClauseMode::Site => {
            let site = Site {
                topos,
                topology: opts.topology,
                trace: opts.trace,
            };
            let mut trace = Vec::new();
            let mut holds = true;
            'outer: for c in 0..base.object_count() {
                for x in 0..n.at(c).len() {
                    let k = fc.element.apply(c, x);
                    let env = fc.context.env(c, k);
                    let (h, node) = site.force(&typed, c, &env);
                    if let Some(mut node) = node {
                        node.element = format!("{} ↦ {}", n.at(c).atom(x), node.element);
                        trace.push(node);
                    }
                    if !h {
                        holds = false;
                        if !opts.trace {
                            break 'outer;
                        }
                    }
                }
            }
            Ok(ClauseResult { holds, trace })
        }
        ClauseMode::EpiSearch => {
            if opts.topology.is_some() {
                return Err(Error::DomainError(
                    "the epi-search form uses the trivial topology".into(),
                ));
            }
            let epi = Epi::new(topos)?;
            let vars: Vars<'_> = fc
                .context
                .vars()
                .iter()
                .map(|(name, ty)| Ok((name.as_str(), topos.resolve(ty)?)))
                .collect::<Result<_>>()?;
            let values = (0..base.object_count())
                .map(|c| (0..n.at(c).len()).map(|x| fc.values(c, x)).collect())
                .collect();
            let holds = epi.force(
                &typed,
                &vars,
                &Stage {
                    presheaf: n.clone(),
                    values,
                },
            )?;
            Ok(ClauseResult {
                holds,
                trace: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::eval::{forces, Context};
    use super::super::term::*;
    use super::*;
    use crate::fincat::shapes;
    use crate::presheaf::{homs, PresheafMorphism};
    use crate::Limits;

    #[test]
    fn clauses_agree_on_small_formulas() {
        let base = Arc::new(shapes::interval());
        let mut t = Topos::new(base.clone(), Limits::default()).unwrap();
        t.add_object("M", yoneda(&base, 1).unwrap()).unwrap();
        let m = Type::object("M");
        let x = var("x", m.clone());
        let y = var("y", m.clone());
        let p = var("p", Type::Omega);
        let formulas = [
            p.clone(),
            or(p.clone(), not(p.clone())),
            not(not(p.clone())),
            implies(not(not(p.clone())), p.clone()),
            exists("y", m.clone(), eq(x.clone(), y.clone())),
            forall("y", m.clone(), eq(x.clone(), y.clone())),
        ];
        let trivial = GrothendieckTopology::trivial(&base);
        for stage in [yoneda(&base, 0).unwrap(), yoneda(&base, 1).unwrap()] {
            let ctx =
                Context::new(&t, vec![("x".into(), m.clone()), ("p".into(), Type::Omega)]).unwrap();
            for alpha in homs(&stage, ctx.presheaf(), &Limits::default()).unwrap() {
                let fc = ForcingContext::new(ctx.clone(), alpha).unwrap();
                for phi in &formulas {
                    let want = forces(&t, &fc, phi).unwrap();
                    for opts in [
                        ClauseOptions::default(),
                        ClauseOptions {
                            topology: Some(&trivial),
                            ..Default::default()
                        },
                        ClauseOptions {
                            mode: ClauseMode::EpiSearch,
                            ..Default::default()
                        },
                    ] {
                        assert_eq!(
                            forces_by_clauses(&t, &fc, phi, opts).unwrap().holds,
                            want,
                            "{phi} with {:?}",
                            opts.mode
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn trace_records_clauses() {
        let base = Arc::new(shapes::terminal());
        let t = Topos::new(base.clone(), Limits::default()).unwrap();
        let ctx = Context::new(&t, vec![]).unwrap();
        let fc =
            ForcingContext::new(ctx.clone(), PresheafMorphism::identity(ctx.presheaf())).unwrap();
        let r = forces_by_clauses(
            &t,
            &fc,
            &and(Term::True, not(Term::False)),
            ClauseOptions {
                trace: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.holds);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.trace[0].clause, "and");
        assert_eq!(r.trace[0].children.len(), 2);
    }
}
