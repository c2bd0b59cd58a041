use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::term::{Term, Type};
use super::topos::{typecheck, Aux, Resolved, Structure, Topos, Typed};
use crate::finset::{tuple_atom, FinFunction, FinSet, TupleIndexer};
use crate::presheaf::{self, Presheaf, PresheafMorphism, SubPresheaf};
use crate::{Error, Result};

/// A variable's value at the current stage.
#[derive(Clone)]
pub struct Binding<'a> {
    pub name: &'a str,
    pub ty: Arc<Resolved>,
    pub value: usize,
}

pub type Env<'a> = Vec<Binding<'a>>;

/// The environment restricted along `f: d → c`.
pub fn restrict_env<'a>(env: &Env<'a>, f: usize) -> Env<'a> {
    env.iter()
        .map(|b| Binding {
            name: b.name,
            ty: b.ty.clone(),
            value: b.ty.presheaf.res(f, b.value),
        })
        .collect()
}

fn extend<'a>(mut env: Env<'a>, name: &'a str, ty: &Arc<Resolved>, value: usize) -> Env<'a> {
    env.push(Binding {
        name,
        ty: ty.clone(),
        value,
    });
    env
}

/// The sieve on `c` of arrows satisfying `pred`, as an element of `Ω(c)`.
pub(crate) fn sieve_where(topos: &Topos, c: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let arrows: BTreeSet<usize> = topos
        .base()
        .arrows_into(c)
        .into_iter()
        .filter(|&f| pred(f))
        .collect();
    topos
        .omega()
        .index_of_arrows(c, &arrows)
        .expect("pointwise semantics yields sieves")
}

/// `[[t]]_c(env)`, an element of `[[T]](c)`.
pub fn eval_at<'a>(topos: &Topos, t: &'a Typed, c: usize, env: &Env<'a>) -> usize {
    Evaluator::new(topos).eval(t, c, env)
}

/// Evaluates terms with a table of values already computed, keyed by the
/// subterm's structure, the stage and the values of its free variables.
pub struct Evaluator<'t, 'a> {
    topos: &'t Topos,
    ids: HashMap<*const Typed, usize>,
    interned: HashMap<&'a Term, usize>,
    free: Vec<Vec<String>>,
    memo: HashMap<(usize, usize, Vec<usize>), usize>,
}

impl<'t, 'a> Evaluator<'t, 'a> {
    pub fn new(topos: &'t Topos) -> Self {
        Evaluator {
            topos,
            ids: HashMap::new(),
            interned: HashMap::new(),
            free: Vec::new(),
            memo: HashMap::new(),
        }
    }

    fn id(&mut self, t: &'a Typed) -> usize {
        if let Some(&i) = self.ids.get(&(t as *const Typed)) {
            return i;
        }
        let next = self.interned.len();
        let i = *self.interned.entry(&t.term).or_insert(next);
        if i == next {
            self.free.push(
                t.term
                    .free_vars()
                    .expect("typechecked terms are well scoped")
                    .into_iter()
                    .map(|(n, _)| n)
                    .collect(),
            );
        }
        self.ids.insert(t, i);
        i
    }

    pub fn eval(&mut self, t: &'a Typed, c: usize, env: &Env<'a>) -> usize {
        match &t.term {
            Term::Var { name, .. } => {
                return env
                    .iter()
                    .rev()
                    .find(|b| b.name == name)
                    .expect("typechecked variables are bound")
                    .value
            }
            Term::Star => return 0,
            _ => {}
        }
        let id = self.id(t);
        let values = self.free[id]
            .iter()
            .map(|n| {
                env.iter()
                    .rev()
                    .find(|b| b.name == n)
                    .expect("free variables are bound")
                    .value
            })
            .collect();
        let key = (id, c, values);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.compute(t, c, env);
        self.memo.insert(key, v);
        v
    }

    fn compute(&mut self, t: &'a Typed, c: usize, env: &Env<'a>) -> usize {
        let topos = self.topos;
        let om = topos.omega();
        let base = topos.base();
        let ch = &t.children;
        match &t.term {
            Term::Var { name, .. } => {
                env.iter()
                    .rev()
                    .find(|b| b.name == name)
                    .expect("typechecked variables are bound")
                    .value
            }
            Term::Star => 0,
            Term::True => om.top(c),
            Term::False => om.bottom(c),
            Term::Pair(..) => match &t.resolved.structure {
                Structure::Product(p) => {
                    p.pair(c, self.eval(&ch[0], c, env), self.eval(&ch[1], c, env))
                }
                _ => unreachable!("pairs have product type"),
            },
            Term::Proj(i, _) => match &ch[0].resolved.structure {
                Structure::Product(p) => {
                    let k = self.eval(&ch[0], c, env);
                    if *i == 1 {
                        p.proj1.apply(c, k)
                    } else {
                        p.proj2.apply(c, k)
                    }
                }
                _ => unreachable!("projections act on products"),
            },
            Term::Eq(..) => {
                let (x, y) = (self.eval(&ch[0], c, env), self.eval(&ch[1], c, env));
                let p = &ch[0].resolved.presheaf;
                sieve_where(topos, c, |f| p.res(f, x) == p.res(f, y))
            }
            Term::Apply { .. } => match &t.aux {
                Aux::Arrow(m) => m.apply(c, self.eval(&ch[0], c, env)),
                _ => unreachable!("arrows are fetched at typecheck"),
            },
            Term::Eval(..) => match &ch[0].resolved.structure {
                Structure::Exp(e) => {
                    e.evaluate(c, self.eval(&ch[0], c, env), self.eval(&ch[1], c, env))
                }
                _ => unreachable!("evaluation acts on exponentials"),
            },
            Term::Member(..) => match &ch[1].resolved.structure {
                Structure::Power(pw) => {
                    let (x, s) = (self.eval(&ch[0], c, env), self.eval(&ch[1], c, env));
                    let a = &ch[0].resolved.presheaf;
                    sieve_where(topos, c, |f| pw.holds(c, s, f, a.res(f, x)))
                }
                _ => unreachable!("membership targets power types"),
            },
            Term::Lambda { var, .. } => match &t.resolved.structure {
                Structure::Exp(e) => {
                    let bty = t.binder.as_ref().expect("binder type");
                    e.lookup(c, |d, g, a| {
                        self.eval(&ch[0], d, &extend(restrict_env(env, g), var, bty, a))
                    })
                    .expect("abstractions are natural")
                }
                _ => unreachable!("abstractions have exponential type"),
            },
            Term::Comprehension { var, .. } => match &t.resolved.structure {
                Structure::Power(pw) => {
                    let bty = t.binder.as_ref().expect("binder type");
                    pw.lookup(c, |d, g, a| {
                        om.is_top(
                            d,
                            self.eval(&ch[0], d, &extend(restrict_env(env, g), var, bty, a)),
                        )
                    })
                    .expect("comprehensions are restriction-closed")
                }
                _ => unreachable!("comprehensions have power type"),
            },
            Term::And(..) => om.meet(c, self.eval(&ch[0], c, env), self.eval(&ch[1], c, env)),
            Term::Or(..) => om.join(c, self.eval(&ch[0], c, env), self.eval(&ch[1], c, env)),
            Term::Implies(..) => {
                om.implies(c, self.eval(&ch[0], c, env), self.eval(&ch[1], c, env))
            }
            Term::Not(..) => om.not(c, self.eval(&ch[0], c, env)),
            Term::Forall { var, .. } => {
                let bty = t.binder.as_ref().expect("binder type");
                let into = base.arrows_into(c);
                // h: e → c is good when the body is true at e for every value.
                let good: BTreeSet<usize> = into
                    .iter()
                    .copied()
                    .filter(|&h| {
                        let e = base.src(h);
                        let renv = restrict_env(env, h);
                        (0..bty.presheaf.at(e).len()).all(|b| {
                            om.is_top(e, self.eval(&ch[0], e, &extend(renv.clone(), var, bty, b)))
                        })
                    })
                    .collect();
                sieve_where(topos, c, |f| {
                    base.arrows_into(base.src(f))
                        .into_iter()
                        .all(|g| good.contains(&base.comp(f, g)))
                })
            }
            Term::Exists { var, .. } => {
                let bty = t.binder.as_ref().expect("binder type");
                sieve_where(topos, c, |f| {
                    let d = base.src(f);
                    let renv = restrict_env(env, f);
                    (0..bty.presheaf.at(d).len()).any(|b| {
                        om.is_top(d, self.eval(&ch[0], d, &extend(renv.clone(), var, bty, b)))
                    })
                })
            }
            Term::Causal { .. } => match &t.aux {
                Aux::Causal(s) => {
                    let x = self.eval(&ch[0], c, env);
                    let p = &ch[0].resolved.presheaf;
                    sieve_where(topos, c, |f| s.contains(base.src(f), p.res(f, x)))
                }
                _ => unreachable!("causal atoms are fetched at typecheck"),
            },
        }
    }
}

/// An ordered list of typed variables and the product presheaf of their types.
#[derive(Debug, Clone)]
pub struct Context {
    vars: Vec<(String, Type)>,
    resolved: Vec<Arc<Resolved>>,
    presheaf: Presheaf,
    indexers: Vec<TupleIndexer>,
}

impl Context {
    /// One variable gives its own type; none gives the terminal object.
    pub fn new(topos: &Topos, vars: Vec<(String, Type)>) -> Result<Self> {
        let resolved = vars
            .iter()
            .map(|(_, ty)| topos.resolve(ty))
            .collect::<Result<Vec<_>>>()?;
        let base = topos.base();
        let n = base.object_count();
        let indexers: Vec<TupleIndexer> = (0..n)
            .map(|c| TupleIndexer::new(resolved.iter().map(|r| r.presheaf.at(c).len()).collect()))
            .collect();
        let presheaf = match resolved.len() {
            0 => presheaf::terminal(base),
            1 => resolved[0].presheaf.clone(),
            _ => {
                let size: u64 = indexers.iter().map(|ix| ix.size() as u64).sum();
                if size > topos.limits().max_enum {
                    return Err(Error::size_limit("context", size, topos.limits().max_enum));
                }
                let at: Vec<FinSet> = (0..n)
                    .map(|c| {
                        let atoms = (0..indexers[c].size()).map(|k| {
                            let parts: Vec<&str> = indexers[c]
                                .decode(k)
                                .iter()
                                .zip(&resolved)
                                .map(|(&v, r)| r.presheaf.at(c).atom(v))
                                .collect();
                            tuple_atom(&parts)
                        });
                        FinSet::ordered(
                            format!("Γ({})", base.object_name(c)),
                            atoms.collect::<Vec<_>>(),
                        )
                        .expect("tuples are distinct")
                    })
                    .collect();
                let restrict = (0..base.arrow_count())
                    .map(|f| {
                        let (d, c) = (base.src(f), base.tgt(f));
                        let table = (0..indexers[c].size())
                            .map(|k| {
                                let vals: Vec<usize> = indexers[c]
                                    .decode(k)
                                    .iter()
                                    .zip(&resolved)
                                    .map(|(&v, r)| r.presheaf.res(f, v))
                                    .collect();
                                indexers[d].encode(&vals)
                            })
                            .collect();
                        FinFunction::new(at[c].clone(), at[d].clone(), table)
                            .expect("context restriction")
                    })
                    .collect();
                Presheaf::from_parts(base.clone(), at, restrict)
            }
        };
        Ok(Context {
            vars,
            resolved,
            presheaf,
            indexers,
        })
    }

    /// The free variables of `t`, in order of first occurrence.
    pub fn of_term(topos: &Topos, t: &Term) -> Result<Self> {
        Context::new(topos, t.free_vars()?)
    }

    pub fn vars(&self) -> &[(String, Type)] {
        &self.vars
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn decode(&self, c: usize, k: usize) -> Vec<usize> {
        if self.vars.len() == 1 {
            vec![k]
        } else {
            self.indexers[c].decode(k)
        }
    }

    pub fn encode(&self, c: usize, values: &[usize]) -> usize {
        if self.vars.len() == 1 {
            values[0]
        } else {
            self.indexers[c].encode(values)
        }
    }

    pub fn env(&self, c: usize, k: usize) -> Env<'_> {
        self.decode(c, k)
            .into_iter()
            .zip(&self.vars)
            .zip(&self.resolved)
            .map(|((value, (name, _)), ty)| Binding {
                name,
                ty: ty.clone(),
                value,
            })
            .collect()
    }

    /// Human-readable `x=a, y=b` for element `k` at stage `c`.
    pub fn describe(&self, c: usize, k: usize) -> String {
        let parts: Vec<String> = self
            .decode(c, k)
            .iter()
            .zip(&self.vars)
            .zip(&self.resolved)
            .map(|((&v, (n, _)), r)| format!("{n}={}", r.presheaf.at(c).atom(v)))
            .collect();
        parts.join(", ")
    }

    /// Errors unless every free variable of `t` is declared with the same type.
    pub fn covers(&self, t: &Term) -> Result<()> {
        for (name, ty) in t.free_vars()? {
            match self.vars.iter().find(|(n, _)| *n == name) {
                None => return Err(Error::UnknownVariable(name)),
                Some((_, declared)) if *declared != ty => {
                    return Err(Error::TypeMismatch {
                        term: name,
                        expected: declared.to_string(),
                        found: ty.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// `[[t]]: [[Γ]] → [[T]]` for a context covering the free variables of `t`.
pub fn interpret_in(topos: &Topos, ctx: &Context, t: &Term) -> Result<PresheafMorphism> {
    ctx.covers(t)?;
    let typed = typecheck(topos, t)?;
    let base = topos.base();
    let mut ev = Evaluator::new(topos);
    let comps = (0..base.object_count())
        .map(|c| {
            (0..ctx.presheaf.at(c).len())
                .map(|k| ev.eval(&typed, c, &ctx.env(c, k)))
                .collect()
        })
        .collect();
    PresheafMorphism::new(ctx.presheaf.clone(), typed.resolved.presheaf.clone(), comps)
}

pub fn interpret(topos: &Topos, t: &Term) -> Result<(Context, PresheafMorphism)> {
    let ctx = Context::of_term(topos, t)?;
    let m = interpret_in(topos, &ctx, t)?;
    Ok((ctx, m))
}

fn require_formula(topos: &Topos, phi: &Term) -> Result<Typed> {
    let typed = typecheck(topos, phi)?;
    if !typed.is_formula() {
        return Err(Error::TypeMismatch {
            term: phi.to_sexpr(),
            expected: Type::Omega.to_string(),
            found: typed.ty.to_string(),
        });
    }
    Ok(typed)
}

/// `{x | φ}` as a subobject of the context.
pub fn comprehension_in(topos: &Topos, ctx: &Context, phi: &Term) -> Result<SubPresheaf> {
    ctx.covers(phi)?;
    let typed = require_formula(topos, phi)?;
    let om = topos.omega();
    let mut ev = Evaluator::new(topos);
    let members = (0..topos.base().object_count())
        .map(|c| {
            (0..ctx.presheaf.at(c).len())
                .filter(|&k| om.is_top(c, ev.eval(&typed, c, &ctx.env(c, k))))
                .collect::<BTreeSet<_>>()
        })
        .collect();
    SubPresheaf::new(ctx.presheaf.clone(), members)
}

/// `{x | φ(x)}` for a formula with at most one free variable.
pub fn comprehension(topos: &Topos, phi: &Term) -> Result<SubPresheaf> {
    let fv = phi.free_vars()?;
    if fv.len() > 1 {
        return Err(Error::MultipleFreeVars(
            fv.into_iter().map(|(n, _)| n).collect(),
        ));
    }
    comprehension_in(topos, &Context::new(topos, fv)?, phi)
}

/// A generalized element `α: N → [[Γ]]`.
#[derive(Debug, Clone)]
pub struct ForcingContext {
    pub context: Context,
    pub element: PresheafMorphism,
}

impl ForcingContext {
    pub fn new(context: Context, element: PresheafMorphism) -> Result<Self> {
        if element.target() != context.presheaf() {
            return Err(Error::TypeMismatch {
                term: "α".into(),
                expected: "a map into the context".into(),
                found: format!("{:?}", element.target()),
            });
        }
        Ok(ForcingContext { context, element })
    }

    pub fn stage(&self) -> &Presheaf {
        self.element.source()
    }

    /// Context values of `α(n)` for `n ∈ N(c)`.
    pub fn values(&self, c: usize, n: usize) -> Vec<usize> {
        self.context.decode(c, self.element.apply(c, n))
    }

    /// `α ∘ f` for `f: N' → N`.
    pub fn along(&self, f: &PresheafMorphism) -> Result<ForcingContext> {
        ForcingContext::new(self.context.clone(), self.element.after(f)?)
    }
}

/// `N ⊩ φ(α)` iff the image of `α` lies in `{x | φ(x)}`.
pub fn forces(topos: &Topos, fc: &ForcingContext, phi: &Term) -> Result<bool> {
    let s = comprehension_in(topos, &fc.context, phi)?;
    let n = fc.stage();
    Ok((0..topos.base().object_count())
        .all(|c| (0..n.at(c).len()).all(|x| s.contains(c, fc.element.apply(c, x)))))
}

#[cfg(test)]
mod tests {
    use super::super::term::{and, eq, not, var, Term, Type};
    use super::*;
    use crate::fincat::shapes;
    use crate::presheaf::{heyting, HeytingOp};
    use crate::Limits;

    fn interval_topos() -> Topos {
        let base = Arc::new(shapes::interval());
        let mut t = Topos::new(base.clone(), Limits::default()).unwrap();
        t.add_object("M", presheaf::yoneda(&base, 1).unwrap())
            .unwrap();
        t
    }

    #[test]
    fn variables_interpret_as_identities() {
        let t = interval_topos();
        let (_, m) = interpret(&t, &var("x", Type::object("M"))).unwrap();
        assert_eq!(m, PresheafMorphism::identity(m.source()));
        let x = var("x", Type::object("M"));
        let (_, refl) = interpret(&t, &eq(x.clone(), x)).unwrap();
        assert!((0..2).all(|c| refl.component(c).iter().all(|&v| t.omega().is_top(c, v))));
    }

    #[test]
    fn meet_matches_heyting_meet() {
        let t = interval_topos();
        let om = t.omega().clone();
        let p = var("p", Type::Omega);
        let q = var("q", Type::Omega);
        let ctx = Context::new(
            &t,
            vec![("p".into(), Type::Omega), ("q".into(), Type::Omega)],
        )
        .unwrap();
        let m = interpret_in(&t, &ctx, &and(p, q)).unwrap();
        for c in 0..2 {
            for k in 0..ctx.presheaf().at(c).len() {
                let v = ctx.decode(c, k);
                let s: BTreeSet<usize> = om
                    .sieve(c, v[0])
                    .arrows
                    .intersection(&om.sieve(c, v[1]).arrows)
                    .copied()
                    .collect();
                assert_eq!(m.apply(c, k), om.index_of_arrows(c, &s).unwrap());
            }
        }
    }

    #[test]
    fn comprehension_examples() {
        let t = interval_topos();
        let m = Type::object("M");
        let x = var("x", m.clone());
        let full = comprehension_in(
            &t,
            &Context::new(&t, vec![("x".into(), m.clone())]).unwrap(),
            &Term::True,
        )
        .unwrap();
        assert!(full.is_full());
        let a = comprehension(&t, &eq(x.clone(), x.clone())).unwrap();
        let b = comprehension(&t, &not(eq(x.clone(), x.clone()))).unwrap();
        let both = comprehension(
            &t,
            &and(eq(x.clone(), x.clone()), not(eq(x.clone(), x.clone()))),
        )
        .unwrap();
        assert_eq!(both, heyting(HeytingOp::Meet, &a, Some(&b)).unwrap());
        let two = eq(x, var("y", m));
        assert!(matches!(
            comprehension(&t, &two),
            Err(Error::MultipleFreeVars(_))
        ));
    }

    #[test]
    fn forcing_true_and_false() {
        let t = interval_topos();
        let m = Type::object("M");
        let ctx = Context::new(&t, vec![("x".into(), m)]).unwrap();
        let id = PresheafMorphism::identity(ctx.presheaf());
        let fc = ForcingContext::new(ctx, id).unwrap();
        assert!(forces(&t, &fc, &Term::True).unwrap());
        assert!(!forces(&t, &fc, &Term::False).unwrap());
        assert!(matches!(
            forces(&t, &fc, &Term::Star),
            Err(Error::TypeMismatch { .. })
        ));
    }
}
