//! Structural causal models as objects of the arrow category.
//!
//! A model with exogenous variables `U` and endogenous variables `V` solves
//! to a single function from exogenous tuples to endogenous tuples. Maps of
//! models are commuting squares, interventions are monic squares, and
//! submodels are classified by a three-valued map on exogenous tuples and a
//! two-valued map on endogenous tuples.
//!
//! As presheaves on the interval `u: a → b`, an object `F: U → V` is the
//! presheaf with `X(b) = U`, `X(a) = V` and restriction `F` along `u`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::fincat::{shapes, FinCategory};
use crate::finset::{self, function_atom, tuple_product, FinFunction, FinSet, TupleSet};
use crate::presheaf::Presheaf;
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub domain: FinSet,
}

/// A local function `f_i` from the tuple of its parents' values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    pub parents: Vec<String>,
    pub table: FinFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalModel {
    name: String,
    exogenous: Vec<Variable>,
    endogenous: Vec<Variable>,
    mechanisms: Vec<Mechanism>,
}

type MechanismFn = Box<dyn Fn(&[&str]) -> String>;

enum MechanismSource {
    Rows(Vec<(Vec<String>, String)>),
    Fn(MechanismFn),
}

/// Incremental construction of a [`CausalModel`].
pub struct ModelBuilder {
    name: String,
    exogenous: Vec<(String, Vec<String>)>,
    endogenous: Vec<(String, Vec<String>)>,
    mechanisms: Vec<(String, Vec<String>, MechanismSource)>,
}

impl ModelBuilder {
    pub fn exogenous(mut self, name: &str, domain: &[&str]) -> Self {
        self.exogenous
            .push((name.into(), domain.iter().map(|s| s.to_string()).collect()));
        self
    }

    pub fn endogenous(mut self, name: &str, domain: &[&str]) -> Self {
        self.endogenous
            .push((name.into(), domain.iter().map(|s| s.to_string()).collect()));
        self
    }

    /// A mechanism given by rows `(parent values, value)`.
    pub fn mechanism_rows(mut self, var: &str, parents: &[&str], rows: &[(&[&str], &str)]) -> Self {
        let rows = rows
            .iter()
            .map(|(ps, v)| (ps.iter().map(|s| s.to_string()).collect(), v.to_string()))
            .collect();
        self.mechanisms.push((
            var.into(),
            parents.iter().map(|s| s.to_string()).collect(),
            MechanismSource::Rows(rows),
        ));
        self
    }

    /// A mechanism computed from the parent values, in parent order.
    pub fn mechanism_fn(
        mut self,
        var: &str,
        parents: &[&str],
        f: impl Fn(&[&str]) -> String + 'static,
    ) -> Self {
        self.mechanisms.push((
            var.into(),
            parents.iter().map(|s| s.to_string()).collect(),
            MechanismSource::Fn(Box::new(f)),
        ));
        self
    }

    pub fn build(self) -> Result<CausalModel> {
        let set = |n: &str, d: Vec<String>| FinSet::new(n, d);
        let exogenous = self
            .exogenous
            .into_iter()
            .map(|(n, d)| {
                Ok(Variable {
                    domain: set(&n, d)?,
                    name: n,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let endogenous = self
            .endogenous
            .into_iter()
            .map(|(n, d)| {
                Ok(Variable {
                    domain: set(&n, d)?,
                    name: n,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let domains: HashMap<String, FinSet> = exogenous
            .iter()
            .chain(&endogenous)
            .map(|v| (v.name.clone(), v.domain.clone()))
            .collect();
        let limits = Limits::default();
        let mut mechs = Vec::new();
        for (var, parents, source) in self.mechanisms {
            let parent_domains = parents
                .iter()
                .map(|p| {
                    domains
                        .get(p)
                        .cloned()
                        .ok_or_else(|| Error::UnknownVariable(p.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            let dom = tuple_product(format!("pa({var})"), &parent_domains, &limits)?;
            let cod = domains
                .get(&var)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(var.clone()))?;
            let table = match source {
                MechanismSource::Rows(rows) => {
                    let pairs = rows.into_iter().map(|(ps, v)| (finset::tuple_atom(&ps), v));
                    FinFunction::from_pairs(dom.set.clone(), cod, pairs)?
                }
                MechanismSource::Fn(f) => {
                    let pairs = (0..dom.set.len())
                        .map(|k| {
                            let digits = dom.indexer.decode(k);
                            let vals: Vec<&str> = digits
                                .iter()
                                .zip(&parent_domains)
                                .map(|(&d, s)| s.atom(d))
                                .collect();
                            (dom.set.atom(k).to_string(), f(&vals))
                        })
                        .collect::<Vec<_>>();
                    FinFunction::from_pairs(dom.set.clone(), cod, pairs)?
                }
            };
            mechs.push((var, Mechanism { parents, table }));
        }
        CausalModel::new(self.name, exogenous, endogenous, mechs)
    }
}

impl CausalModel {
    pub fn builder(name: &str) -> ModelBuilder {
        ModelBuilder {
            name: name.into(),
            exogenous: Vec::new(),
            endogenous: Vec::new(),
            mechanisms: Vec::new(),
        }
    }

    /// Checks that every endogenous variable has exactly one mechanism whose
    /// table is typed by its parents. Cycles are only detected by [`solve`].
    pub fn new(
        name: impl Into<String>,
        exogenous: Vec<Variable>,
        endogenous: Vec<Variable>,
        mechanisms: Vec<(String, Mechanism)>,
    ) -> Result<Self> {
        let mut seen = HashMap::new();
        for v in exogenous.iter().chain(&endogenous) {
            if seen.insert(v.name.clone(), v.domain.clone()).is_some() {
                return Err(Error::DomainError(format!(
                    "variable `{}` declared twice",
                    v.name
                )));
            }
        }
        let mut by_var: BTreeMap<String, Mechanism> = BTreeMap::new();
        for (var, m) in mechanisms {
            if !endogenous.iter().any(|v| v.name == var) {
                return Err(if seen.contains_key(&var) {
                    Error::DomainError(format!(
                        "exogenous variable `{var}` cannot have a mechanism"
                    ))
                } else {
                    Error::UnknownVariable(var)
                });
            }
            if by_var.contains_key(&var) {
                return Err(Error::DomainError(format!(
                    "`{var}` has more than one mechanism"
                )));
            }
            by_var.insert(var, m);
        }
        let limits = Limits::default();
        let mut ordered = Vec::with_capacity(endogenous.len());
        for v in &endogenous {
            let m = by_var
                .remove(&v.name)
                .ok_or_else(|| Error::DomainError(format!("`{}` has no mechanism", v.name)))?;
            let mut pdoms = Vec::with_capacity(m.parents.len());
            for p in &m.parents {
                if p == &v.name {
                    return Err(Error::DomainError(format!(
                        "`{}` lists itself as a parent",
                        v.name
                    )));
                }
                pdoms.push(
                    seen.get(p)
                        .cloned()
                        .ok_or_else(|| Error::UnknownVariable(p.clone()))?,
                );
            }
            let expected = tuple_product("pa", &pdoms, &limits)?;
            if !m.table.dom().same_elements(&expected.set)
                || !m.table.cod().same_elements(&v.domain)
            {
                return Err(Error::DomainError(format!(
                    "mechanism for `{}` is not typed by its parents",
                    v.name
                )));
            }
            ordered.push(m);
        }
        Ok(CausalModel {
            name: name.into(),
            exogenous,
            endogenous,
            mechanisms: ordered,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exogenous(&self) -> &[Variable] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> &[Variable] {
        &self.endogenous
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }

    pub fn mechanism(&self, var: &str) -> Option<&Mechanism> {
        self.endogenous_index(var).map(|i| &self.mechanisms[i])
    }

    pub fn endogenous_index(&self, var: &str) -> Option<usize> {
        self.endogenous.iter().position(|v| v.name == var)
    }

    pub fn exogenous_tuples(&self, limits: &Limits) -> Result<TupleSet> {
        let doms: Vec<FinSet> = self.exogenous.iter().map(|v| v.domain.clone()).collect();
        tuple_product("U", &doms, limits)
    }

    pub fn endogenous_tuples(&self, limits: &Limits) -> Result<TupleSet> {
        let doms: Vec<FinSet> = self.endogenous.iter().map(|v| v.domain.clone()).collect();
        tuple_product("V", &doms, limits)
    }

    /// Endogenous variables in a dependency-respecting order (Kahn), or the
    /// cycle that prevents one.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.endogenous.len();
        let mut indegree = vec![0usize; n];
        let mut children = vec![Vec::new(); n];
        for (i, m) in self.mechanisms.iter().enumerate() {
            for p in &m.parents {
                if let Some(j) = self.endogenous_index(p) {
                    indegree[i] += 1;
                    children[j].push(i);
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            for &c in &children[i] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        Err(Error::CyclicModel {
            cycle: self.find_cycle(&indegree),
        })
    }

    fn find_cycle(&self, indegree: &[usize]) -> Vec<String> {
        // Walk parent links among the unresolved variables until one repeats.
        let start = indegree
            .iter()
            .position(|&d| d > 0)
            .expect("an unresolved variable");
        let parent_of = |i: usize| {
            self.mechanisms[i]
                .parents
                .iter()
                .filter_map(|p| self.endogenous_index(p))
                .find(|&j| indegree[j] > 0)
                .expect("unresolved variables have an unresolved parent")
        };
        let mut path = vec![start];
        let mut cur = start;
        loop {
            cur = parent_of(cur);
            if let Some(pos) = path.iter().position(|&p| p == cur) {
                let mut cycle: Vec<String> = path[pos..]
                    .iter()
                    .rev()
                    .map(|&i| self.endogenous[i].name.clone())
                    .collect();
                cycle.push(cycle[0].clone());
                return cycle;
            }
            path.push(cur);
        }
    }

    /// `F_x`: targets get constant mechanisms.
    pub fn with_intervention(&self, intervention: &Intervention) -> Result<CausalModel> {
        intervention.validate(self)?;
        let mut m = self.clone();
        for (var, value) in &intervention.values {
            let i = self.endogenous_index(var).expect("validated");
            let unit = FinSet::ordered("pa", ["()"]).expect("unit");
            let domain = &self.endogenous[i].domain;
            let table = FinFunction::new(
                unit,
                domain.clone(),
                vec![domain.index_of(value).expect("validated")],
            )?;
            m.mechanisms[i] = Mechanism {
                parents: Vec::new(),
                table,
            };
        }
        Ok(m)
    }

    /// Solves the equations for one exogenous tuple, given as value indices.
    pub fn solve_tuple(&self, order: &[usize], exo: &[usize]) -> Vec<usize> {
        let mut endo = vec![usize::MAX; self.endogenous.len()];
        for &i in order {
            let m = &self.mechanisms[i];
            let parts: Vec<&str> = m
                .parents
                .iter()
                .map(|p| match self.endogenous_index(p) {
                    Some(j) => self.endogenous[j].domain.atom(endo[j]),
                    None => {
                        let k = self
                            .exogenous
                            .iter()
                            .position(|v| &v.name == p)
                            .expect("validated parent");
                        self.exogenous[k].domain.atom(exo[k])
                    }
                })
                .collect();
            let arg = m
                .table
                .dom()
                .index_of(&finset::tuple_atom(&parts))
                .expect("typed mechanism");
            endo[i] = m.table.apply(arg);
        }
        endo
    }
}

impl fmt::Display for CausalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// An object of the arrow category. `model` is present when the object came
/// from solving an SCM.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcmObject {
    pub model: Option<CausalModel>,
    pub global: FinFunction,
}

impl TcmObject {
    pub fn from_function(global: FinFunction) -> Self {
        TcmObject {
            model: None,
            global,
        }
    }

    pub fn exogenous(&self) -> &FinSet {
        self.global.dom()
    }

    pub fn endogenous(&self) -> &FinSet {
        self.global.cod()
    }

    /// The presheaf on the interval with `b ↦ U`, `a ↦ V`.
    pub fn as_presheaf(&self, base: &Arc<FinCategory>) -> Result<Presheaf> {
        Presheaf::from_generators(
            base.clone(),
            vec![self.endogenous().clone(), self.exogenous().clone()],
            &[("u", self.global.clone())],
        )
    }

    pub fn from_presheaf(p: &Presheaf) -> Result<Self> {
        let base = p.base();
        let u = base.arrow("u")?;
        Ok(TcmObject::from_function(p.restriction(u).clone()))
    }
}

/// The base `u: a → b` on which arrow-category objects live as presheaves.
pub fn interval_base() -> Arc<FinCategory> {
    Arc::new(shapes::interval())
}

pub fn solve(model: &CausalModel, limits: &Limits) -> Result<TcmObject> {
    let order = model.topological_order()?;
    let u = model.exogenous_tuples(limits)?;
    let v = model.endogenous_tuples(limits)?;
    let table = (0..u.set.len())
        .map(|k| {
            v.indexer
                .encode(&model.solve_tuple(&order, &u.indexer.decode(k)))
        })
        .collect();
    Ok(TcmObject {
        model: Some(model.clone()),
        global: FinFunction::new(u.set, v.set, table)?,
    })
}

/// `do(X = x)`: values keyed by target variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Intervention {
    pub values: BTreeMap<String, String>,
}

impl Intervention {
    pub fn new<I, K, V>(values: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Intervention {
            values: values
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        }
    }

    pub fn empty() -> Self {
        Intervention::default()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self, model: &CausalModel) -> Result<()> {
        for (var, value) in &self.values {
            let i = model
                .endogenous_index(var)
                .ok_or_else(|| Error::UnknownVariable(var.clone()))?;
            if !model.endogenous[i].domain.contains(value) {
                return Err(Error::ValueOutOfDomain {
                    var: var.clone(),
                    value: value.clone(),
                });
            }
        }
        Ok(())
    }

    /// Union of interventions on disjoint targets.
    pub fn union(&self, other: &Intervention) -> Result<Intervention> {
        let mut values = self.values.clone();
        for (k, v) in &other.values {
            if values.insert(k.clone(), v.clone()).is_some() {
                return Err(Error::DomainError(format!("`{k}` is targeted twice")));
            }
        }
        Ok(Intervention { values })
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(f, "do({})", parts.join(","))
    }
}

/// A map of arrow-category objects: `k ∘ src.global = dst.global ∘ h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcmSquare {
    pub src: TcmObject,
    pub dst: TcmObject,
    pub h: FinFunction,
    pub k: FinFunction,
}

impl TcmSquare {
    pub fn new(src: TcmObject, dst: TcmObject, h: FinFunction, k: FinFunction) -> Result<Self> {
        let sq = TcmSquare { src, dst, h, k };
        sq.check()?;
        Ok(sq)
    }

    pub fn identity(obj: &TcmObject) -> Self {
        TcmSquare {
            src: obj.clone(),
            dst: obj.clone(),
            h: FinFunction::identity(obj.exogenous()),
            k: FinFunction::identity(obj.endogenous()),
        }
    }

    pub fn check(&self) -> Result<()> {
        let typed = self.h.dom().same_elements(self.src.exogenous())
            && self.h.cod().same_elements(self.dst.exogenous())
            && self.k.dom().same_elements(self.src.endogenous())
            && self.k.cod().same_elements(self.dst.endogenous());
        if !typed {
            return Err(Error::DomainMismatch {
                expected: "h: U → U', k: V → V'".into(),
                found: format!("{:?} / {:?}", self.h, self.k),
            });
        }
        for x in 0..self.src.exogenous().len() {
            if self.k.apply(self.src.global.apply(x)) != self.dst.global.apply(self.h.apply(x)) {
                return Err(Error::NotCommuting(format!(
                    "at exogenous tuple {}",
                    self.src.exogenous().atom(x)
                )));
            }
        }
        Ok(())
    }

    pub fn is_monic(&self) -> bool {
        self.h.is_injective() && self.k.is_injective()
    }
}

/// The intervened model `M_x` and the monic square that exhibits it as a
/// submodel of `M`.
///
/// The square's source restricts `M_x` to the exogenous tuples on which it
/// agrees with `M`, and to the endogenous tuples that satisfy `X = x`; `h`
/// and `k` are inclusions. The empty intervention gives the identity square.
#[derive(Debug, Clone)]
pub struct InterventionResult {
    pub model: TcmObject,
    pub square: TcmSquare,
}

pub fn intervene(
    m: &TcmObject,
    intervention: &Intervention,
    limits: &Limits,
) -> Result<InterventionResult> {
    let model = m
        .model
        .as_ref()
        .ok_or_else(|| Error::DomainError("object has no causal model to intervene on".into()))?;
    let mx_model = model.with_intervention(intervention)?;
    let mx = solve(&mx_model, limits)?;
    let v = model.endogenous_tuples(limits)?;
    let targets: Vec<(usize, usize)> = intervention
        .values
        .iter()
        .map(|(var, val)| {
            let i = model.endogenous_index(var).expect("validated");
            (
                i,
                model.endogenous[i].domain.index_of(val).expect("validated"),
            )
        })
        .collect();
    let agree = finset::SubSet::new(
        m.exogenous().clone(),
        (0..m.exogenous().len()).filter(|&x| mx.global.apply(x) == m.global.apply(x)),
    )?;
    let satisfying = finset::SubSet::new(
        v.set.clone(),
        (0..v.set.len()).filter(|&t| {
            let digits = v.indexer.decode(t);
            targets.iter().all(|&(i, val)| digits[i] == val)
        }),
    )?;
    let h = agree.inclusion(format!("U[{intervention}]"));
    let k = satisfying.inclusion(format!("V[{intervention}]"));
    let src_table = agree.members().iter().map(|&x| {
        let y = mx.global.apply(x);
        k.table()
            .iter()
            .position(|&t| t == y)
            .expect("M_x satisfies its own intervention")
    });
    let src = TcmObject {
        model: Some(mx_model),
        global: FinFunction::new(h.dom().clone(), k.dom().clone(), src_table.collect())?,
    };
    let square = TcmSquare::new(src, m.clone(), h, k)?;
    Ok(InterventionResult { model: mx, square })
}

/// `Y_x(u)`.
pub fn potential_outcome(
    m: &TcmObject,
    y: &str,
    intervention: &Intervention,
    u: &str,
    limits: &Limits,
) -> Result<String> {
    let model = m
        .model
        .as_ref()
        .ok_or_else(|| Error::DomainError("object has no causal model".into()))?;
    let yi = model
        .endogenous_index(y)
        .ok_or_else(|| Error::UnknownVariable(y.to_string()))?;
    let x = m
        .exogenous()
        .index_of(u)
        .ok_or_else(|| Error::UnknownTuple(u.to_string()))?;
    let mx = solve(&model.with_intervention(intervention)?, limits)?;
    let v = model.endogenous_tuples(limits)?;
    let digits = v.indexer.decode(mx.global.apply(x));
    Ok(model.endogenous[yi].domain.atom(digits[yi]).to_string())
}

/// `{0, 1/2, 1}`, the exogenous stalk of the classifier.
pub fn three_values() -> FinSet {
    FinSet::ordered("Ω(b)", ["0", "1/2", "1"]).expect("three values")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmodelClassification {
    /// `U_dst → {0, 1/2, 1}`.
    pub psi: FinFunction,
    /// `V_dst → {0, 1}`.
    pub chi: FinFunction,
}

impl SubmodelClassification {
    /// `t: {0, 1/2, 1} → {0, 1}` sends both nonzero values to 1.
    pub fn t(value: usize) -> usize {
        usize::from(value > 0)
    }

    /// `chi(global(x)) = t(psi(x))` for every exogenous tuple.
    pub fn commutes_with(&self, dst: &TcmObject) -> bool {
        (0..dst.exogenous().len())
            .all(|x| self.chi.apply(dst.global.apply(x)) == Self::t(self.psi.apply(x)))
    }

    /// Pullback of `true` along `(psi, chi)`: the exogenous tuples with
    /// value 1 and the endogenous tuples with value 1.
    pub fn recovered(&self) -> (Vec<usize>, Vec<usize>) {
        let u = (0..self.psi.dom().len())
            .filter(|&x| self.psi.apply(x) == 2)
            .collect();
        let v = (0..self.chi.dom().len())
            .filter(|&y| self.chi.apply(y) == 1)
            .collect();
        (u, v)
    }
}

pub fn classify_submodel(sq: &TcmSquare) -> Result<SubmodelClassification> {
    if !sq.h.is_injective() {
        return Err(Error::NotMonic("h".into()));
    }
    if !sq.k.is_injective() {
        return Err(Error::NotMonic("k".into()));
    }
    let im_h = sq.h.image();
    let im_k = sq.k.image();
    let dst = &sq.dst;
    let psi_table = (0..dst.exogenous().len())
        .map(|x| {
            if im_h.contains(&x) {
                2
            } else if im_k.contains(&dst.global.apply(x)) {
                1
            } else {
                0
            }
        })
        .collect();
    let chi_table = (0..dst.endogenous().len())
        .map(|y| usize::from(im_k.contains(&y)))
        .collect();
    Ok(SubmodelClassification {
        psi: FinFunction::new(dst.exogenous().clone(), three_values(), psi_table)?,
        chi: FinFunction::new(dst.endogenous().clone(), FinSet::truth_values(), chi_table)?,
    })
}

#[derive(Debug, Clone)]
pub struct TcmPullback {
    pub object: TcmObject,
    pub p1: TcmSquare,
    pub p2: TcmSquare,
}

pub fn tcm_pullback(sq1: &TcmSquare, sq2: &TcmSquare) -> Result<TcmPullback> {
    if sq1.dst.global != sq2.dst.global {
        return Err(Error::CodomainMismatch {
            left: format!("{:?}", sq1.dst.global),
            right: format!("{:?}", sq2.dst.global),
        });
    }
    let pu = finset::pullback(&sq1.h, &sq2.h)?;
    let pv = finset::pullback(&sq1.k, &sq2.k)?;
    let lookup: HashMap<(usize, usize), usize> = (0..pv.set.len())
        .map(|i| ((pv.p1.apply(i), pv.p2.apply(i)), i))
        .collect();
    let table = (0..pu.set.len())
        .map(|i| {
            let key = (
                sq1.src.global.apply(pu.p1.apply(i)),
                sq2.src.global.apply(pu.p2.apply(i)),
            );
            lookup.get(&key).copied().ok_or_else(|| {
                Error::NotCommuting("induced global map leaves the endogenous pullback".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let object = TcmObject::from_function(FinFunction::new(pu.set.clone(), pv.set.clone(), table)?);
    let p1 = TcmSquare::new(
        object.clone(),
        sq1.src.clone(),
        pu.p1.clone(),
        pv.p1.clone(),
    )?;
    let p2 = TcmSquare::new(object.clone(), sq2.src.clone(), pu.p2, pv.p2)?;
    Ok(TcmPullback { object, p1, p2 })
}

/// The six faces of the pullback cube, each with whether it commutes.
pub fn pullback_cube_faces(
    sq1: &TcmSquare,
    sq2: &TcmSquare,
    pb: &TcmPullback,
) -> Vec<(&'static str, bool)> {
    let eq = |f: &FinFunction, g: &FinFunction| f.table() == g.table();
    let comp = |g: &FinFunction, f: &FinFunction| finset::compose(g, f).ok();
    let face = |a: Option<FinFunction>, b: Option<FinFunction>| matches!((a, b), (Some(a), Some(b)) if eq(&a, &b));
    vec![
        (
            "exogenous pullback",
            face(comp(&sq1.h, &pb.p1.h), comp(&sq2.h, &pb.p2.h)),
        ),
        (
            "endogenous pullback",
            face(comp(&sq1.k, &pb.p1.k), comp(&sq2.k, &pb.p2.k)),
        ),
        ("first projection", pb.p1.check().is_ok()),
        ("second projection", pb.p2.check().is_ok()),
        ("first leg", sq1.check().is_ok()),
        ("second leg", sq2.check().is_ok()),
    ]
}

/// Componentwise product `(f × g)(u, u') = (f u, g u')`.
pub fn tcm_product(f: &TcmObject, g: &TcmObject) -> TcmObject {
    let pu = finset::product(f.exogenous(), g.exogenous());
    let pv = finset::product(f.endogenous(), g.endogenous());
    let ng = g.exogenous().len().max(1);
    let nv = g.endogenous().len();
    let table = (0..pu.set.len())
        .map(|k| f.global.apply(k / ng) * nv + g.global.apply(k % ng))
        .collect();
    TcmObject::from_function(FinFunction::new(pu.set, pv.set, table).expect("product global"))
}

/// Every commuting square `f → g`, ordered by `k` then by `h`.
pub fn tcm_homs(
    f: &TcmObject,
    g: &TcmObject,
    limits: &Limits,
) -> Result<Vec<(FinFunction, FinFunction)>> {
    let ks = finset::all_functions(f.endogenous(), g.endogenous(), limits)?;
    let nu = f.exogenous().len();
    let mut out = Vec::new();
    let mut visited = 0u64;
    for k in ks {
        // h(x) must lie in the fibre of g over k(f(x)).
        let choices: Vec<Vec<usize>> = (0..nu)
            .map(|x| {
                (0..g.exogenous().len())
                    .filter(|&y| g.global.apply(y) == k.apply(f.global.apply(x)))
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) && nu > 0 {
            continue;
        }
        let indexer = finset::TupleIndexer::new(choices.iter().map(Vec::len).collect());
        for code in 0..indexer.size() {
            visited += 1;
            if visited > limits.max_enum {
                return Err(Error::size_limit(
                    "arrow-category squares",
                    visited,
                    limits.max_enum,
                ));
            }
            let table = indexer
                .decode(code)
                .iter()
                .zip(&choices)
                .map(|(&d, c)| c[d])
                .collect();
            out.push((
                FinFunction::new(f.exogenous().clone(), g.exogenous().clone(), table)?,
                k.clone(),
            ));
        }
    }
    Ok(out)
}

/// `g^f: X → Y` with `Y = V'^V`, `X` the commuting pairs `⟨h, k⟩`, and
/// structure map `⟨h, k⟩ ↦ k`.
#[derive(Debug, Clone)]
pub struct TcmExponential {
    pub object: TcmObject,
    pub pairs: Vec<(FinFunction, FinFunction)>,
    pub functions: finset::Exponential,
}

pub fn tcm_exponential(f: &TcmObject, g: &TcmObject, limits: &Limits) -> Result<TcmExponential> {
    let functions = finset::exponential(f.endogenous(), g.endogenous(), limits)?;
    let pairs = tcm_homs(f, g, limits)?;
    let atoms = pairs
        .iter()
        .map(|(h, k)| format!("<{},{}>", function_atom(h), function_atom(k)));
    let x = FinSet::ordered(
        format!("{}^{}[U]", g.exogenous().name(), f.exogenous().name()),
        atoms.collect::<Vec<_>>(),
    )?;
    let table = pairs
        .iter()
        .map(|(_, k)| functions.index_of(k))
        .collect::<Result<Vec<_>>>()?;
    let object = TcmObject::from_function(FinFunction::new(x, functions.set.clone(), table)?);
    Ok(TcmExponential {
        object,
        pairs,
        functions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> CausalModel {
        CausalModel::builder("neg-chain")
            .exogenous("U", &["0", "1"])
            .endogenous("A", &["0", "1"])
            .endogenous("B", &["0", "1"])
            .endogenous("C", &["0", "1"])
            .mechanism_fn("A", &["U"], |p| p[0].to_string())
            .mechanism_rows("B", &["A"], &[(&["0"], "1"), (&["1"], "0")])
            .mechanism_fn("C", &["A", "B"], |p| {
                if p == ["1", "1"] {
                    "1".into()
                } else {
                    "0".into()
                }
            })
            .build()
            .unwrap()
    }

    fn value(obj: &TcmObject, var: &str, u: &str) -> String {
        let model = obj.model.as_ref().unwrap();
        let v = obj.global.apply_atom(u).unwrap();
        let i = model.endogenous_index(var).unwrap();
        let inner = &v[1..v.len() - 1];
        inner.split(',').nth(i).unwrap().to_string()
    }

    #[test]
    fn solve_examples() {
        let limits = Limits::default();
        let empty = CausalModel::builder("none")
            .exogenous("U", &["0", "1"])
            .build()
            .unwrap();
        let obj = solve(&empty, &limits).unwrap();
        assert_eq!(obj.endogenous().elements(), ["()"]);

        let copy = CausalModel::builder("copy")
            .exogenous("U", &["0", "1"])
            .endogenous("A", &["0", "1"])
            .endogenous("B", &["0", "1"])
            .mechanism_fn("A", &["U"], |p| p[0].to_string())
            .mechanism_fn("B", &["A"], |p| p[0].to_string())
            .build()
            .unwrap();
        let obj = solve(&copy, &limits).unwrap();
        assert_eq!(
            obj.global.pairs().collect::<Vec<_>>(),
            [("(0)", "(0,0)"), ("(1)", "(1,1)")]
        );

        let obj = solve(&chain(), &limits).unwrap();
        for u in ["(0)", "(1)"] {
            assert_eq!(value(&obj, "C", u), "0");
        }
    }

    #[test]
    fn cycles_are_rejected_with_witness() {
        let m = CausalModel::builder("loop")
            .exogenous("U", &["0"])
            .endogenous("A", &["0", "1"])
            .endogenous("B", &["0", "1"])
            .mechanism_fn("A", &["B"], |p| p[0].to_string())
            .mechanism_fn("B", &["A"], |p| p[0].to_string())
            .build()
            .unwrap();
        match solve(&m, &Limits::default()) {
            Err(Error::CyclicModel { cycle }) => {
                assert_eq!(cycle.first(), cycle.last());
                assert_eq!(cycle.len(), 3);
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn intervention_examples() {
        let limits = Limits::default();
        let m = solve(&chain(), &limits).unwrap();
        let same = intervene(&m, &Intervention::empty(), &limits).unwrap();
        assert_eq!(same.model.global, m.global);
        assert_eq!(
            same.square.h.table(),
            FinFunction::identity(m.exogenous()).table()
        );
        assert_eq!(
            same.square.k.table(),
            FinFunction::identity(m.endogenous()).table()
        );

        let b1 = intervene(&m, &Intervention::new([("B", "1")]), &limits).unwrap();
        for u in ["(0)", "(1)"] {
            assert_eq!(value(&b1.model, "B", u), "1");
        }
        assert!(b1.square.is_monic());

        let all = Intervention::new([("A", "0"), ("B", "0"), ("C", "1")]);
        let r = intervene(&m, &all, &limits).unwrap();
        assert!(r
            .model
            .global
            .table()
            .iter()
            .all(|&y| y == r.model.global.apply(0)));

        assert!(matches!(
            intervene(&m, &Intervention::new([("Z", "1")]), &limits),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(
            intervene(&m, &Intervention::new([("B", "2")]), &limits),
            Err(Error::ValueOutOfDomain { .. })
        ));
    }

    #[test]
    fn potential_outcome_examples() {
        let limits = Limits::default();
        let m = solve(&chain(), &limits).unwrap();
        assert_eq!(
            potential_outcome(&m, "B", &Intervention::empty(), "(1)", &limits).unwrap(),
            "0"
        );
        for u in ["(0)", "(1)"] {
            assert_eq!(
                potential_outcome(&m, "B", &Intervention::new([("B", "1")]), u, &limits).unwrap(),
                "1"
            );
        }
        assert_eq!(
            potential_outcome(&m, "C", &Intervention::new([("B", "1")]), "(1)", &limits).unwrap(),
            "1"
        );
        assert!(matches!(
            potential_outcome(&m, "C", &Intervention::empty(), "(7)", &limits),
            Err(Error::UnknownTuple(_))
        ));
    }

    #[test]
    fn classification_cases() {
        let limits = Limits::default();
        let m = solve(&chain(), &limits).unwrap();
        let id = classify_submodel(&TcmSquare::identity(&m)).unwrap();
        assert!(id.psi.table().iter().all(|&v| v == 2));

        let empty_src = TcmObject::from_function(FinFunction::empty(&FinSet::empty("∅")));
        let sq = TcmSquare::new(
            empty_src,
            m.clone(),
            FinFunction::empty(m.exogenous()),
            FinFunction::empty(m.endogenous()),
        )
        .unwrap();
        let c = classify_submodel(&sq).unwrap();
        assert!(c.psi.table().iter().all(|&v| v == 0));

        // A hand-made monic square that reaches the middle value: keep only the
        // endogenous tuple hit by u = (1) but no exogenous tuple.
        let target = m.global.apply(1);
        let v_only = FinSet::ordered("V'", [m.endogenous().atom(target)]).unwrap();
        let sq = TcmSquare::new(
            TcmObject::from_function(FinFunction::empty(&v_only)),
            m.clone(),
            FinFunction::empty(m.exogenous()),
            FinFunction::new(v_only, m.endogenous().clone(), vec![target]).unwrap(),
        )
        .unwrap();
        let c = classify_submodel(&sq).unwrap();
        assert_eq!(c.psi.apply(1), 1);
        assert!(c.commutes_with(&m));

        let b1 = intervene(&m, &Intervention::new([("B", "1")]), &limits).unwrap();
        let c = classify_submodel(&b1.square).unwrap();
        assert!(c.commutes_with(&m));
        let (u, v) = c.recovered();
        assert_eq!(u, b1.square.h.table());
        assert_eq!(v, b1.square.k.table());
    }

    #[test]
    fn non_monic_squares_are_rejected() {
        let limits = Limits::default();
        let m = solve(&chain(), &limits).unwrap();
        let one = TcmObject::from_function(
            FinFunction::constant(
                &FinSet::new("U", ["0", "1"]).unwrap(),
                m.endogenous(),
                m.global.apply(0),
            )
            .unwrap(),
        );
        let h = FinFunction::constant(one.exogenous(), m.exogenous(), 0).unwrap();
        let sq = TcmSquare::new(one, m.clone(), h, FinFunction::identity(m.endogenous())).unwrap();
        assert!(matches!(classify_submodel(&sq), Err(Error::NotMonic(_))));
    }

    #[test]
    fn pullback_of_two_interventions() {
        let limits = Limits::default();
        let m = solve(&chain(), &limits).unwrap();
        let a = intervene(&m, &Intervention::new([("A", "1")]), &limits).unwrap();
        let b = intervene(&m, &Intervention::new([("B", "0")]), &limits).unwrap();
        let pb = tcm_pullback(&a.square, &b.square).unwrap();
        assert!(pullback_cube_faces(&a.square, &b.square, &pb)
            .iter()
            .all(|(_, ok)| *ok));
        let id = TcmSquare::identity(&m);
        let along_id = tcm_pullback(&a.square, &id).unwrap();
        assert_eq!(
            along_id.object.exogenous().len(),
            a.square.src.exogenous().len()
        );
    }

    #[test]
    fn exponential_codomain_side() {
        let limits = Limits::default();
        let f = TcmObject::from_function(
            FinFunction::new(
                FinSet::new("U", ["a"]).unwrap(),
                FinSet::new("V", ["p"]).unwrap(),
                vec![0],
            )
            .unwrap(),
        );
        let g = TcmObject::from_function(
            FinFunction::new(
                FinSet::new("U'", ["x"]).unwrap(),
                FinSet::new("V'", ["p", "q"]).unwrap(),
                vec![0],
            )
            .unwrap(),
        );
        let e = tcm_exponential(&f, &g, &limits).unwrap();
        assert_eq!(e.object.endogenous().len(), 2);
        assert_eq!(e.object.exogenous().len(), 1);
    }
}
