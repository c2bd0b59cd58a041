//! Presheaf toposes over a finite base category.
//!
//! A presheaf assigns a finite set to every base object and, to every base
//! arrow `f: c → d`, a restriction function `at(d) → at(c)`.

mod exponential;
mod sieve;
mod subobject;
mod topology;

pub use exponential::{power_object, psh_exponential, Exponential, PowerObject};
pub use sieve::{omega, sieve_pullback, sieves_on, Omega, Sieve};
pub use subobject::{classified_subobject, classify, heyting, subobjects, HeytingOp, SubPresheaf};
pub use topology::{
    check_topology, is_sheaf, GrothendieckTopology, MatchingFamily, SheafFailure, SheafReport,
    TopologyReport, TopologyViolation,
};

use std::fmt;
use std::sync::Arc;

use crate::fincat::FinCategory;
use crate::finset::{pair_atom, FinFunction, FinSet};
use crate::{Error, Limits, Result};

#[derive(Clone)]
pub struct Presheaf {
    base: Arc<FinCategory>,
    at: Vec<FinSet>,
    restrict: Vec<FinFunction>,
}

impl Presheaf {
    /// Validates endpoints and contravariant functoriality.
    pub fn new(
        base: Arc<FinCategory>,
        at: Vec<FinSet>,
        restrict: Vec<FinFunction>,
    ) -> Result<Self> {
        let p = Presheaf { base, at, restrict };
        p.check()?;
        Ok(p)
    }

    pub(crate) fn from_parts(
        base: Arc<FinCategory>,
        at: Vec<FinSet>,
        restrict: Vec<FinFunction>,
    ) -> Self {
        debug_assert!(Presheaf {
            base: base.clone(),
            at: at.clone(),
            restrict: restrict.clone()
        }
        .check()
        .is_ok());
        Presheaf { base, at, restrict }
    }

    /// Builds a presheaf from the restrictions along some arrows; identities
    /// are filled in, and any other arrow `g∘h` with both factors known is
    /// restricted as `h* ∘ g*`.
    pub fn from_generators(
        base: Arc<FinCategory>,
        at: Vec<FinSet>,
        generators: &[(&str, FinFunction)],
    ) -> Result<Self> {
        if at.len() != base.object_count() {
            return Err(Error::InvalidPresheaf(format!(
                "expected {} stalks, got {}",
                base.object_count(),
                at.len()
            )));
        }
        let mut restrict: Vec<Option<FinFunction>> = vec![None; base.arrow_count()];
        for (name, f) in generators {
            restrict[base.arrow(name)?] = Some(f.clone());
        }
        for (i, a) in base.arrows().iter().enumerate() {
            if restrict[i].is_none() && base.is_identity(i) {
                restrict[i] = Some(FinFunction::identity(&at[a.src]));
            }
        }
        loop {
            let mut progress = false;
            for i in 0..base.arrow_count() {
                if restrict[i].is_some() {
                    continue;
                }
                let found = (0..base.arrow_count()).find_map(|g| {
                    let (rg, h) = (
                        restrict[g].as_ref()?,
                        base.arrows_into(base.src(g))
                            .into_iter()
                            .find(|&h| base.comp(g, h) == i && restrict[h].is_some())?,
                    );
                    Some(crate::finset::compose(
                        restrict[h].as_ref().expect("known factor"),
                        rg,
                    ))
                });
                if let Some(r) = found {
                    restrict[i] = Some(r?);
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        let restrict = restrict
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| {
                    Error::InvalidPresheaf(format!(
                        "no restriction given for `{}`",
                        base.arrows()[i].name
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, at, restrict)
    }

    fn check(&self) -> Result<()> {
        let c = &self.base;
        if self.at.len() != c.object_count() || self.restrict.len() != c.arrow_count() {
            return Err(Error::InvalidPresheaf(
                "stalk or restriction count does not match the base".into(),
            ));
        }
        for (i, a) in c.arrows().iter().enumerate() {
            let r = &self.restrict[i];
            if !r.dom().same_elements(&self.at[a.tgt]) || !r.cod().same_elements(&self.at[a.src]) {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction along `{}` has wrong endpoints",
                    a.name
                )));
            }
        }
        for x in 0..c.object_count() {
            if self.restrict[c.id(x)]
                .table()
                .iter()
                .enumerate()
                .any(|(i, &j)| i != j)
            {
                return Err(Error::InvalidPresheaf(format!(
                    "restriction along id_{} is not the identity",
                    c.object_name(x)
                )));
            }
        }
        for f in 0..c.arrow_count() {
            for g in c.arrows_from(c.tgt(f)) {
                let gf = c.compose(g, f).ok_or_else(|| {
                    Error::InvalidShape(format!(
                        "missing composite {}∘{}",
                        c.arrow_name(g),
                        c.arrow_name(f)
                    ))
                })?;
                let ok = (0..self.at[c.tgt(g)].len()).all(|x| {
                    self.restrict[gf].apply(x) == self.restrict[f].apply(self.restrict[g].apply(x))
                });
                if !ok {
                    return Err(Error::InvalidPresheaf(format!(
                        "restriction along {}∘{} is not contravariant",
                        c.arrow_name(g),
                        c.arrow_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn at(&self, c: usize) -> &FinSet {
        &self.at[c]
    }

    pub fn stalks(&self) -> &[FinSet] {
        &self.at
    }

    /// Restriction along `f: c → d`, as a function `at(d) → at(c)`.
    pub fn restriction(&self, f: usize) -> &FinFunction {
        &self.restrict[f]
    }

    pub fn restrictions(&self) -> &[FinFunction] {
        &self.restrict
    }

    /// `x · f` for `x ∈ at(cod f)`.
    pub fn res(&self, f: usize, x: usize) -> usize {
        self.restrict[f].apply(x)
    }

    pub fn total_size(&self) -> usize {
        self.at.iter().map(FinSet::len).sum()
    }

    pub fn same_base(&self, other: &Presheaf) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base
    }

    pub(crate) fn require_same_base(&self, other: &Presheaf) -> Result<()> {
        if self.same_base(other) {
            Ok(())
        } else {
            Err(Error::InvalidPresheaf(format!(
                "base mismatch: {} vs {}",
                self.base.name(),
                other.base.name()
            )))
        }
    }

    /// Flat indexing of all elements `(c, x)`.
    pub fn offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.at.len() + 1);
        let mut acc = 0;
        for s in &self.at {
            offsets.push(acc);
            acc += s.len();
        }
        offsets.push(acc);
        offsets
    }

    pub fn renamed_stalks(&self, prefix: &str) -> Presheaf {
        let at: Vec<FinSet> = self
            .at
            .iter()
            .enumerate()
            .map(|(c, s)| s.renamed(format!("{prefix}({})", self.base.object_name(c))))
            .collect();
        let restrict = self
            .restrict
            .iter()
            .enumerate()
            .map(|(f, r)| {
                r.with_sets(at[self.base.tgt(f)].clone(), at[self.base.src(f)].clone())
                    .expect("same sizes")
            })
            .collect();
        Presheaf {
            base: self.base.clone(),
            at,
            restrict,
        }
    }
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.same_base(other)
            && self.at == other.at
            && self
                .restrict
                .iter()
                .zip(&other.restrict)
                .all(|(a, b)| a.table() == b.table())
    }
}

impl Eq for Presheaf {}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presheaf on {} [", self.base.name())?;
        for (c, s) in self.at.iter().enumerate() {
            if c > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} ↦ {s}", self.base.object_name(c))?;
        }
        write!(f, "]")
    }
}

/// A natural transformation between presheaves, stored as one table per
/// base object.
#[derive(Clone, PartialEq, Eq)]
pub struct PresheafMorphism {
    source: Presheaf,
    target: Presheaf,
    components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn new(source: Presheaf, target: Presheaf, components: Vec<Vec<usize>>) -> Result<Self> {
        source.require_same_base(&target)?;
        let m = PresheafMorphism {
            source,
            target,
            components,
        };
        m.check()?;
        Ok(m)
    }

    pub(crate) fn from_parts(
        source: Presheaf,
        target: Presheaf,
        components: Vec<Vec<usize>>,
    ) -> Self {
        PresheafMorphism {
            source,
            target,
            components,
        }
    }

    fn check(&self) -> Result<()> {
        let c = self.source.base();
        if self.components.len() != c.object_count() {
            return Err(Error::InvalidPresheaf("wrong number of components".into()));
        }
        for (o, comp) in self.components.iter().enumerate() {
            if comp.len() != self.source.at(o).len()
                || comp.iter().any(|&y| y >= self.target.at(o).len())
            {
                return Err(Error::DomainMismatch {
                    expected: format!("{:?}", self.source.at(o)),
                    found: format!("{comp:?}"),
                });
            }
        }
        for f in 0..c.arrow_count() {
            let (s, t) = (c.src(f), c.tgt(f));
            for x in 0..self.source.at(t).len() {
                if self.components[s][self.source.res(f, x)]
                    != self.target.res(f, self.components[t][x])
                {
                    return Err(Error::NotCommuting(format!(
                        "naturality at `{}`",
                        c.arrow_name(f)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(p: &Presheaf) -> Self {
        PresheafMorphism {
            source: p.clone(),
            target: p.clone(),
            components: p.at.iter().map(|s| (0..s.len()).collect()).collect(),
        }
    }

    pub fn source(&self) -> &Presheaf {
        &self.source
    }

    pub fn target(&self) -> &Presheaf {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[usize] {
        &self.components[c]
    }

    pub fn apply(&self, c: usize, x: usize) -> usize {
        self.components[c][x]
    }

    pub fn component_function(&self, c: usize) -> FinFunction {
        FinFunction::new(
            self.source.at(c).clone(),
            self.target.at(c).clone(),
            self.components[c].clone(),
        )
        .expect("valid component")
    }

    /// `self ∘ other`.
    pub fn after(&self, other: &PresheafMorphism) -> Result<PresheafMorphism> {
        if other.target != self.source {
            return Err(Error::DomainMismatch {
                expected: format!("{:?}", self.source),
                found: format!("{:?}", other.target),
            });
        }
        let components = other
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().map(|&y| self.components[c][y]).collect())
            .collect();
        Ok(PresheafMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().all(|comp| {
            let mut seen = comp.clone();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn is_epi(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut hit = vec![false; self.target.at(c).len()];
            comp.iter().for_each(|&y| hit[y] = true);
            hit.into_iter().all(|b| b)
        })
    }

    /// The image as a subobject of the target.
    pub fn image(&self) -> SubPresheaf {
        let members = self
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| {
                let mut m = vec![false; self.target.at(c).len()];
                comp.iter().for_each(|&y| m[y] = true);
                m
            })
            .collect();
        SubPresheaf::from_parts(self.target.clone(), members)
    }

    /// Preimage of a subobject of the target.
    pub fn pullback_sub(&self, s: &SubPresheaf) -> Result<SubPresheaf> {
        if *s.parent() != self.target {
            return Err(Error::ParentMismatch);
        }
        let members = self
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().map(|&y| s.contains(c, y)).collect())
            .collect();
        Ok(SubPresheaf::from_parts(self.source.clone(), members))
    }
}

impl fmt::Debug for PresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PresheafMorphism {:?}", self.components)
    }
}

/// Visits every natural transformation `x → y` (as flat component tables in
/// object order) by backtracking with naturality pruning.
pub fn for_each_hom(
    x: &Presheaf,
    y: &Presheaf,
    limits: &Limits,
    mut visit: impl FnMut(&[Vec<usize>]) -> bool,
) -> Result<()> {
    x.require_same_base(y)?;
    let c = x.base();
    let offsets = x.offsets();
    let total = *offsets.last().unwrap_or(&0);
    let mut owner = Vec::with_capacity(total);
    for o in 0..c.object_count() {
        owner.extend(std::iter::repeat_n(o, x.at(o).len()));
    }
    // For f: s → t and e ∈ x(t): α_s(e·f) = α_t(e)·f, checked once both
    // positions are assigned.
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); total];
    for f in 0..c.arrow_count() {
        let (s, t) = (c.src(f), c.tgt(f));
        for e in 0..x.at(t).len() {
            let p = offsets[t] + e;
            let q = offsets[s] + x.res(f, e);
            checks[p.max(q)].push((p, q, f));
        }
    }
    let mut assign = vec![0usize; total];
    let mut visited: u64 = 0;
    let mut stop = false;

    struct Ctx<'a> {
        y: &'a Presheaf,
        owner: &'a [usize],
        checks: &'a [Vec<(usize, usize, usize)>],
        offsets: &'a [usize],
        cap: u64,
    }

    fn go(
        p: usize,
        ctx: &Ctx,
        assign: &mut Vec<usize>,
        visited: &mut u64,
        stop: &mut bool,
        visit: &mut dyn FnMut(&[Vec<usize>]) -> bool,
    ) -> Result<()> {
        if p == assign.len() {
            let comps: Vec<Vec<usize>> = ctx
                .offsets
                .windows(2)
                .map(|w| assign[w[0]..w[1]].to_vec())
                .collect();
            if !visit(&comps) {
                *stop = true;
            }
            return Ok(());
        }
        for v in 0..ctx.y.at(ctx.owner[p]).len() {
            *visited += 1;
            if *visited > ctx.cap {
                return Err(Error::size_limit(
                    "natural transformations",
                    *visited,
                    ctx.cap,
                ));
            }
            assign[p] = v;
            if ctx.checks[p]
                .iter()
                .all(|&(a, b, f)| ctx.y.res(f, assign[a]) == assign[b])
            {
                go(p + 1, ctx, assign, visited, stop, visit)?;
                if *stop {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    let ctx = Ctx {
        y,
        owner: &owner,
        checks: &checks,
        offsets: &offsets,
        cap: limits.max_enum,
    };
    go(0, &ctx, &mut assign, &mut visited, &mut stop, &mut visit)
}

/// All natural transformations `x → y`.
pub fn homs(x: &Presheaf, y: &Presheaf, limits: &Limits) -> Result<Vec<PresheafMorphism>> {
    let mut out = Vec::new();
    for_each_hom(x, y, limits, |comps| {
        out.push(PresheafMorphism::from_parts(
            x.clone(),
            y.clone(),
            comps.to_vec(),
        ));
        true
    })?;
    Ok(out)
}

pub fn count_homs(x: &Presheaf, y: &Presheaf, limits: &Limits) -> Result<u64> {
    let mut n = 0u64;
    for_each_hom(x, y, limits, |_| {
        n += 1;
        true
    })?;
    Ok(n)
}

/// The representable `C(-, x)`; elements are arrow names in sorted order.
pub fn yoneda(base: &Arc<FinCategory>, x: usize) -> Result<Presheaf> {
    if x >= base.object_count() {
        return Err(Error::UnknownObject(format!("#{x}")));
    }
    let homs: Vec<Vec<usize>> = (0..base.object_count())
        .map(|d| {
            let mut h = base.hom(d, x);
            h.sort_by(|&a, &b| base.arrow_name(a).cmp(base.arrow_name(b)));
            h
        })
        .collect();
    let at: Vec<FinSet> = homs
        .iter()
        .enumerate()
        .map(|(d, h)| {
            FinSet::ordered(
                format!("y{}({})", base.object_name(x), base.object_name(d)),
                h.iter().map(|&a| base.arrow_name(a).to_string()),
            )
            .expect("arrow names are distinct")
        })
        .collect();
    let restrict = (0..base.arrow_count())
        .map(|f| {
            let (s, t) = (base.src(f), base.tgt(f));
            let table = homs[t]
                .iter()
                .map(|&g| {
                    homs[s]
                        .iter()
                        .position(|&k| k == base.comp(g, f))
                        .expect("composite lies in the hom-set")
                })
                .collect();
            FinFunction::new(at[t].clone(), at[s].clone(), table).expect("yoneda restriction")
        })
        .collect();
    Ok(Presheaf::from_parts(base.clone(), at, restrict))
}

/// Index of arrow `f` inside the stalk `yoneda(base, x).at(dom f)`.
pub fn yoneda_index(y: &Presheaf, f: usize) -> usize {
    let base = y.base();
    y.at(base.src(f))
        .index_of(base.arrow_name(f))
        .expect("arrow lies in its representable")
}

/// The arrow named by an element of a representable.
pub fn yoneda_arrow(y: &Presheaf, d: usize, e: usize) -> usize {
    y.base()
        .arrow(y.at(d).atom(e))
        .expect("representable elements are arrows")
}

pub fn terminal(base: &Arc<FinCategory>) -> Presheaf {
    let at: Vec<FinSet> = (0..base.object_count())
        .map(|_| FinSet::singleton("1", "*"))
        .collect();
    let restrict = (0..base.arrow_count())
        .map(|f| FinFunction::identity(&at[base.src(f)]))
        .collect();
    Presheaf::from_parts(base.clone(), at, restrict)
}

pub fn initial(base: &Arc<FinCategory>) -> Presheaf {
    let at: Vec<FinSet> = (0..base.object_count())
        .map(|_| FinSet::empty("0"))
        .collect();
    let restrict = (0..base.arrow_count())
        .map(|f| FinFunction::identity(&at[base.src(f)]))
        .collect();
    Presheaf::from_parts(base.clone(), at, restrict)
}

/// Pointwise product with its projections.
#[derive(Clone, Debug)]
pub struct PresheafProduct {
    pub presheaf: Presheaf,
    pub proj1: PresheafMorphism,
    pub proj2: PresheafMorphism,
}

impl PresheafProduct {
    /// Index of `(a, b)` at stage `c`.
    pub fn pair(&self, c: usize, a: usize, b: usize) -> usize {
        a * self.proj2.target().at(c).len() + b
    }

    /// `⟨f, g⟩: z → a × b`.
    pub fn tuple(&self, f: &PresheafMorphism, g: &PresheafMorphism) -> Result<PresheafMorphism> {
        if f.source() != g.source() {
            return Err(Error::DomainMismatch {
                expected: format!("{:?}", f.source()),
                found: format!("{:?}", g.source()),
            });
        }
        let comps = (0..f.components.len())
            .map(|c| {
                f.components[c]
                    .iter()
                    .zip(&g.components[c])
                    .map(|(&a, &b)| self.pair(c, a, b))
                    .collect()
            })
            .collect();
        PresheafMorphism::new(f.source().clone(), self.presheaf.clone(), comps)
    }
}

pub fn product(a: &Presheaf, b: &Presheaf) -> Result<PresheafProduct> {
    a.require_same_base(b)?;
    let base = a.base().clone();
    let at: Vec<FinSet> = (0..base.object_count())
        .map(|c| {
            let atoms = a
                .at(c)
                .elements()
                .iter()
                .flat_map(|x| b.at(c).elements().iter().map(move |y| pair_atom(x, y)));
            FinSet::ordered(
                format!("{}×{}", a.at(c).name(), b.at(c).name()),
                atoms.collect::<Vec<_>>(),
            )
            .expect("pairs are distinct")
        })
        .collect();
    let restrict = (0..base.arrow_count())
        .map(|f| {
            let (s, t) = (base.src(f), base.tgt(f));
            let nb_t = b.at(t).len();
            let nb_s = b.at(s).len();
            let table = (0..at[t].len())
                .map(|k| a.res(f, k / nb_t.max(1)) * nb_s + b.res(f, k % nb_t.max(1)))
                .collect();
            FinFunction::new(at[t].clone(), at[s].clone(), table).expect("product restriction")
        })
        .collect();
    let p = Presheaf::from_parts(base.clone(), at, restrict);
    let proj1 = (0..base.object_count())
        .map(|c| {
            (0..p.at(c).len())
                .map(|k| k / b.at(c).len().max(1))
                .collect()
        })
        .collect();
    let proj2 = (0..base.object_count())
        .map(|c| {
            (0..p.at(c).len())
                .map(|k| k % b.at(c).len().max(1))
                .collect()
        })
        .collect();
    Ok(PresheafProduct {
        proj1: PresheafMorphism::from_parts(p.clone(), a.clone(), proj1),
        proj2: PresheafMorphism::from_parts(p.clone(), b.clone(), proj2),
        presheaf: p,
    })
}

/// A presheaf from stalks and raw restriction tables, one per base arrow.
pub fn from_tables(
    base: &Arc<FinCategory>,
    at: Vec<FinSet>,
    tables: Vec<Vec<usize>>,
) -> Result<Presheaf> {
    if tables.len() != base.arrow_count() || at.len() != base.object_count() {
        return Err(Error::InvalidPresheaf(
            "table count does not match the base".into(),
        ));
    }
    let restrict = tables
        .into_iter()
        .enumerate()
        .map(|(f, t)| FinFunction::new(at[base.tgt(f)].clone(), at[base.src(f)].clone(), t))
        .collect::<Result<Vec<_>>>()?;
    Presheaf::new(base.clone(), at, restrict)
}
