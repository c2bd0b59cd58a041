use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use super::term::{CausalAtom, Term, Type};
use crate::fincat::FinCategory;
use crate::presheaf::{
    self, omega, power_object, product, psh_exponential, Exponential, Omega, PowerObject, Presheaf,
    PresheafMorphism, PresheafProduct, SubPresheaf,
};
use crate::tcm::{self, Intervention, TcmObject};
use crate::{Error, Limits, Result};

/// A type together with the structure its terms are evaluated against.
#[derive(Debug)]
pub struct Resolved {
    pub presheaf: Presheaf,
    pub structure: Structure,
}

#[derive(Debug)]
pub enum Structure {
    Plain,
    Product(PresheafProduct),
    Power(PowerObject),
    Exp(Exponential),
}

#[derive(Debug, Clone)]
pub struct NamedArrow {
    pub dom: Type,
    pub cod: Type,
    pub morphism: PresheafMorphism,
}

/// A presheaf topos with named objects, arrows and causal models.
#[derive(Debug)]
pub struct Topos {
    base: Arc<FinCategory>,
    limits: Limits,
    omega: Omega,
    objects: BTreeMap<String, Presheaf>,
    arrows: BTreeMap<String, NamedArrow>,
    models: BTreeMap<String, TcmObject>,
    types: Mutex<HashMap<Type, Arc<Resolved>>>,
    causal: Mutex<HashMap<(String, CausalAtom), Arc<SubPresheaf>>>,
}

impl Topos {
    pub fn new(base: Arc<FinCategory>, limits: Limits) -> Result<Self> {
        let omega = omega(&base)?;
        Ok(Topos {
            base,
            limits,
            omega,
            objects: BTreeMap::new(),
            arrows: BTreeMap::new(),
            models: BTreeMap::new(),
            types: Mutex::new(HashMap::new()),
            causal: Mutex::new(HashMap::new()),
        })
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn objects(&self) -> &BTreeMap<String, Presheaf> {
        &self.objects
    }

    pub fn arrows(&self) -> &BTreeMap<String, NamedArrow> {
        &self.arrows
    }

    pub fn add_object(&mut self, name: &str, p: Presheaf) -> Result<()> {
        if !p.same_base(self.omega.presheaf()) {
            return Err(Error::InvalidPresheaf(format!(
                "`{name}` lives over a different base"
            )));
        }
        self.objects.insert(name.into(), p);
        Ok(())
    }

    pub fn add_arrow(
        &mut self,
        name: &str,
        dom: Type,
        cod: Type,
        morphism: PresheafMorphism,
    ) -> Result<()> {
        let (d, c) = (self.resolve(&dom)?, self.resolve(&cod)?);
        if morphism.source() != &d.presheaf || morphism.target() != &c.presheaf {
            return Err(Error::TypeMismatch {
                term: name.into(),
                expected: format!("{dom} → {cod}"),
                found: "a morphism between other presheaves".into(),
            });
        }
        self.arrows
            .insert(name.into(), NamedArrow { dom, cod, morphism });
        Ok(())
    }

    /// Registers `obj` as an object named `name` whose causal atoms can be used.
    pub fn add_model(&mut self, name: &str, obj: TcmObject) -> Result<()> {
        if obj.model.is_none() {
            return Err(Error::DomainError(format!("`{name}` has no causal model")));
        }
        let p = obj.as_presheaf(&self.base)?;
        self.add_object(name, p)?;
        self.models.insert(name.into(), obj);
        Ok(())
    }

    pub fn model(&self, name: &str) -> Result<&TcmObject> {
        self.models
            .get(name)
            .ok_or_else(|| Error::UnknownObject(name.into()))
    }

    pub fn resolve(&self, ty: &Type) -> Result<Arc<Resolved>> {
        if let Some(r) = self.types.lock().expect("type cache").get(ty) {
            return Ok(r.clone());
        }
        let resolved = match ty {
            Type::Object(n) => Resolved {
                presheaf: self
                    .objects
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::UnknownObject(n.clone()))?,
                structure: Structure::Plain,
            },
            Type::Unit => Resolved {
                presheaf: presheaf::terminal(&self.base),
                structure: Structure::Plain,
            },
            Type::Omega => Resolved {
                presheaf: self.omega.presheaf().clone(),
                structure: Structure::Plain,
            },
            Type::Product(a, b) => {
                let p = product(&self.resolve(a)?.presheaf, &self.resolve(b)?.presheaf)?;
                Resolved {
                    presheaf: p.presheaf.clone(),
                    structure: Structure::Product(p),
                }
            }
            Type::Power(a) => {
                let p = power_object(&self.resolve(a)?.presheaf, &self.limits)?;
                Resolved {
                    presheaf: p.presheaf.clone(),
                    structure: Structure::Power(p),
                }
            }
            Type::Exp(b, c) => {
                let e = psh_exponential(
                    &self.resolve(c)?.presheaf,
                    &self.resolve(b)?.presheaf,
                    &self.limits,
                )?;
                Resolved {
                    presheaf: e.presheaf.clone(),
                    structure: Structure::Exp(e),
                }
            }
        };
        let r = Arc::new(resolved);
        self.types
            .lock()
            .expect("type cache")
            .insert(ty.clone(), r.clone());
        Ok(r)
    }

    /// The subobject of a model's object picked out by a causal atom.
    ///
    /// Value atoms hold of exogenous tuples whose solution has the value and
    /// of endogenous tuples with the value. Outcome atoms hold of exogenous
    /// tuples whose potential outcome has the value, and of the solutions of
    /// those tuples in the unintervened model.
    pub fn causal_subobject(&self, model: &str, atom: &CausalAtom) -> Result<Arc<SubPresheaf>> {
        let key = (model.to_string(), atom.clone());
        if let Some(s) = self.causal.lock().expect("causal cache").get(&key) {
            return Ok(s.clone());
        }
        let obj = self.model(model)?;
        let m = obj
            .model
            .as_ref()
            .expect("registered models carry a causal model");
        let v_tuples = m.endogenous_tuples(&self.limits)?;
        let (a, b) = (self.base.object("a")?, self.base.object("b")?);
        let lookup = |var: &str, value: &str| -> Result<(usize, usize)> {
            let i = m
                .endogenous_index(var)
                .ok_or_else(|| Error::UnknownVariable(var.into()))?;
            let v = m.endogenous()[i].domain.index_of(value).ok_or_else(|| {
                Error::ValueOutOfDomain {
                    var: var.into(),
                    value: value.into(),
                }
            })?;
            Ok((i, v))
        };
        let mut members: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); 2];
        match atom {
            CausalAtom::Value { var, value } => {
                let (i, v) = lookup(var, value)?;
                members[a] = (0..v_tuples.set.len())
                    .filter(|&t| v_tuples.indexer.decode(t)[i] == v)
                    .collect();
                members[b] = (0..obj.exogenous().len())
                    .filter(|&u| v_tuples.indexer.decode(obj.global.apply(u))[i] == v)
                    .collect();
            }
            CausalAtom::Outcome {
                var,
                value,
                intervention,
            } => {
                let (i, v) = lookup(var, value)?;
                let x = Intervention {
                    values: intervention.clone(),
                };
                let mx = tcm::solve(&m.with_intervention(&x)?, &self.limits)?;
                members[b] = (0..obj.exogenous().len())
                    .filter(|&u| v_tuples.indexer.decode(mx.global.apply(u))[i] == v)
                    .collect();
                members[a] = members[b].iter().map(|&u| obj.global.apply(u)).collect();
            }
        }
        let s = Arc::new(SubPresheaf::new(obj.as_presheaf(&self.base)?, members)?);
        self.causal
            .lock()
            .expect("causal cache")
            .insert(key, s.clone());
        Ok(s)
    }
}

/// A term with every subterm annotated by its type.
#[derive(Debug, Clone)]
pub struct Typed {
    pub term: Term,
    pub ty: Type,
    pub resolved: Arc<Resolved>,
    /// The bound variable's type, for binders.
    pub binder: Option<Arc<Resolved>>,
    pub aux: Aux,
    pub children: Vec<Typed>,
}

/// Data fetched once at typecheck time.
#[derive(Debug, Clone)]
pub enum Aux {
    None,
    Arrow(PresheafMorphism),
    Causal(Arc<SubPresheaf>),
}

impl Typed {
    pub fn is_formula(&self) -> bool {
        self.ty == Type::Omega
    }
}

fn mismatch(t: &Term, expected: impl ToString, found: &Type) -> Error {
    Error::TypeMismatch {
        term: t.to_sexpr(),
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Annotates `t` with types, resolving every type that evaluation will need.
pub fn typecheck(topos: &Topos, t: &Term) -> Result<Typed> {
    t.free_vars()?;
    check(topos, t, &mut Vec::new())
}

fn check(topos: &Topos, t: &Term, bound: &mut Vec<(String, Type)>) -> Result<Typed> {
    let binder = match t.binder() {
        Some((_, ty)) => Some(topos.resolve(ty)?),
        None => None,
    };
    let aux = match t {
        Term::Apply { arrow, .. } => Aux::Arrow(
            topos
                .arrows
                .get(arrow)
                .ok_or_else(|| Error::UnknownArrow(arrow.clone()))?
                .morphism
                .clone(),
        ),
        Term::Causal { model, atom, .. } => Aux::Causal(topos.causal_subobject(model, atom)?),
        _ => Aux::None,
    };
    let node = |ty: Type, children: Vec<Typed>| -> Result<Typed> {
        let resolved = topos.resolve(&ty)?;
        Ok(Typed {
            term: t.clone(),
            ty,
            resolved,
            binder,
            aux,
            children,
        })
    };
    match t {
        Term::Var { name, ty } => {
            if let Some((_, bty)) = bound.iter().rev().find(|(n, _)| n == name) {
                if bty != ty {
                    return Err(mismatch(t, bty, ty));
                }
            }
            node(ty.clone(), vec![])
        }
        Term::Star => node(Type::Unit, vec![]),
        Term::True | Term::False => node(Type::Omega, vec![]),
        Term::Pair(a, b) => {
            let (ta, tb) = (check(topos, a, bound)?, check(topos, b, bound)?);
            node(Type::product(ta.ty.clone(), tb.ty.clone()), vec![ta, tb])
        }
        Term::Proj(i, p) => {
            let tp = check(topos, p, bound)?;
            let ty = match (&tp.ty, i) {
                (Type::Product(a, _), 1) => (**a).clone(),
                (Type::Product(_, b), 2) => (**b).clone(),
                _ => return Err(mismatch(t, "a product and index 1 or 2", &tp.ty)),
            };
            node(ty, vec![tp])
        }
        Term::Eq(a, b) => {
            let (ta, tb) = (check(topos, a, bound)?, check(topos, b, bound)?);
            if ta.ty != tb.ty {
                return Err(mismatch(b, &ta.ty, &tb.ty));
            }
            node(Type::Omega, vec![ta, tb])
        }
        Term::Apply { arrow, arg } => {
            let f = topos
                .arrows
                .get(arrow)
                .ok_or_else(|| Error::UnknownArrow(arrow.clone()))?;
            let ta = check(topos, arg, bound)?;
            if ta.ty != f.dom {
                return Err(mismatch(arg, &f.dom, &ta.ty));
            }
            node(f.cod.clone(), vec![ta])
        }
        Term::Eval(theta, sigma) => {
            let (tt, ts) = (check(topos, theta, bound)?, check(topos, sigma, bound)?);
            match &tt.ty {
                Type::Exp(b, c) if **c == ts.ty => node((**b).clone(), vec![tt, ts]),
                Type::Exp(_, c) => Err(mismatch(sigma, c, &ts.ty)),
                other => Err(mismatch(theta, "an exponential", other)),
            }
        }
        Term::Member(a, s) => {
            let (ta, ts) = (check(topos, a, bound)?, check(topos, s, bound)?);
            match &ts.ty {
                Type::Power(el) if **el == ta.ty => node(Type::Omega, vec![ta, ts]),
                Type::Power(el) => Err(mismatch(a, el, &ta.ty)),
                other => Err(mismatch(s, "a power type", other)),
            }
        }
        Term::Lambda { var, ty, body } => {
            bound.push((var.clone(), ty.clone()));
            let tb = check(topos, body, bound);
            bound.pop();
            let tb = tb?;
            node(Type::exp(tb.ty.clone(), ty.clone()), vec![tb])
        }
        Term::Comprehension { var, ty, body }
        | Term::Forall { var, ty, body }
        | Term::Exists { var, ty, body } => {
            bound.push((var.clone(), ty.clone()));
            let tb = check(topos, body, bound);
            bound.pop();
            let tb = tb?;
            if tb.ty != Type::Omega {
                return Err(mismatch(body, Type::Omega, &tb.ty));
            }
            let out = if matches!(t, Term::Comprehension { .. }) {
                Type::power(ty.clone())
            } else {
                Type::Omega
            };
            node(out, vec![tb])
        }
        Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) => {
            let (ta, tb) = (check(topos, a, bound)?, check(topos, b, bound)?);
            for (c, tc) in [(a, &ta), (b, &tb)] {
                if tc.ty != Type::Omega {
                    return Err(mismatch(c, Type::Omega, &tc.ty));
                }
            }
            node(Type::Omega, vec![ta, tb])
        }
        Term::Not(a) => {
            let ta = check(topos, a, bound)?;
            if ta.ty != Type::Omega {
                return Err(mismatch(a, Type::Omega, &ta.ty));
            }
            node(Type::Omega, vec![ta])
        }
        Term::Causal { model, arg, .. } => {
            let ta = check(topos, arg, bound)?;
            let want = Type::object(model);
            if ta.ty != want {
                return Err(mismatch(arg, want, &ta.ty));
            }
            node(Type::Omega, vec![ta])
        }
    }
}
