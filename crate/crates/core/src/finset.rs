//! Finite sets, total functions, and the limit/colimit constructions of the
//! category of finite sets.
//!
//! Elements are atom strings. Primitive sets keep their atoms in
//! lexicographic order; derived sets (products, quotients, exponentials)
//! keep the order induced by their components. Every derived atom uses a
//! fixed textual encoding: `(a,b)` for pairs and tuples, `L:a`/`R:b` for
//! coproduct tags, `q:<min member>` for quotient classes and
//! `{a->p,b->q}` for elements of exponentials.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::{Error, Limits, Result};

/// A named finite set of distinct atoms in canonical order.
#[derive(Clone)]
pub struct FinSet {
    name: Arc<str>,
    elements: Arc<[String]>,
    index: Arc<HashMap<String, usize>>,
}

impl FinSet {
    /// A primitive set; atoms are sorted lexicographically.
    pub fn new<I, S>(name: impl Into<String>, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        atoms.sort();
        Self::ordered(name, atoms)
    }

    /// A set that keeps the given atom order.
    pub fn ordered<I, S>(name: impl Into<String>, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name: String = name.into();
        let elements: Vec<String> = atoms.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, atom) in elements.iter().enumerate() {
            if index.insert(atom.clone(), i).is_some() {
                return Err(Error::DuplicateElement {
                    set: name,
                    atom: atom.clone(),
                });
            }
        }
        Ok(FinSet {
            name: name.into(),
            elements: elements.into(),
            index: Arc::new(index),
        })
    }

    pub fn empty(name: impl Into<String>) -> Self {
        Self::ordered(name, Vec::<String>::new()).expect("empty set")
    }

    pub fn singleton(name: impl Into<String>, atom: impl Into<String>) -> Self {
        Self::ordered(name, [atom.into()]).expect("singleton")
    }

    /// `{0, 1}`, the subobject classifier of finite sets.
    pub fn truth_values() -> Self {
        Self::ordered("2", ["0", "1"]).expect("truth values")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        FinSet {
            name: name.into().into(),
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn atom(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.index.get(atom).copied()
    }

    pub fn contains(&self, atom: &str) -> bool {
        self.index.contains_key(atom)
    }

    pub(crate) fn require(&self, atom: &str) -> Result<usize> {
        self.index_of(atom).ok_or_else(|| Error::UnknownElement {
            set: self.name.to_string(),
            atom: atom.to_string(),
        })
    }

    /// Same atoms in the same order; names are labels only.
    pub fn same_elements(&self, other: &FinSet) -> bool {
        Arc::ptr_eq(&self.elements, &other.elements) || self.elements == other.elements
    }
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        self.same_elements(other)
    }
}

impl Eq for FinSet {}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name, self.elements.join(","))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.elements.join(","))
    }
}

/// A total function between finite sets, tabulated by element index.
#[derive(Clone, PartialEq, Eq)]
pub struct FinFunction {
    dom: FinSet,
    cod: FinSet,
    table: Vec<usize>,
}

impl FinFunction {
    pub fn new(dom: FinSet, cod: FinSet, table: Vec<usize>) -> Result<Self> {
        if table.len() != dom.len() {
            let atom = dom.elements().get(table.len()).cloned().unwrap_or_default();
            return Err(Error::NotTotal {
                set: dom.name().to_string(),
                atom,
            });
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.len()) {
            return Err(Error::UnknownElement {
                set: cod.name().to_string(),
                atom: format!("#{bad}"),
            });
        }
        Ok(FinFunction { dom, cod, table })
    }

    /// Builds a function from `(argument, image)` atom pairs; every domain
    /// atom must appear exactly once.
    pub fn from_pairs<I, A, B>(dom: FinSet, cod: FinSet, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut table = vec![None; dom.len()];
        for (x, y) in pairs {
            let i = dom.require(x.as_ref())?;
            let j = cod.require(y.as_ref())?;
            if table[i].replace(j).is_some() {
                return Err(Error::DuplicateElement {
                    set: dom.name().to_string(),
                    atom: x.as_ref().to_string(),
                });
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, y)| {
                y.ok_or_else(|| Error::NotTotal {
                    set: dom.name().to_string(),
                    atom: dom.atom(i).to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinFunction { dom, cod, table })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFunction {
            dom: set.clone(),
            cod: set.clone(),
            table: (0..set.len()).collect(),
        }
    }

    pub fn constant(dom: &FinSet, cod: &FinSet, value: usize) -> Result<Self> {
        Self::new(dom.clone(), cod.clone(), vec![value; dom.len()])
    }

    /// The unique function out of the empty set.
    pub fn empty(cod: &FinSet) -> Self {
        FinFunction {
            dom: FinSet::empty("∅"),
            cod: cod.clone(),
            table: Vec::new(),
        }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn apply_atom(&self, atom: &str) -> Option<&str> {
        self.dom
            .index_of(atom)
            .map(|i| self.cod.atom(self.table[i]))
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.table.iter().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.table.len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.cod.len()
    }

    /// Same tables with the domain and codomain relabelled.
    pub fn with_sets(&self, dom: FinSet, cod: FinSet) -> Result<Self> {
        Self::new(dom, cod, self.table.clone())
    }

    /// Atom pairs in domain order.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.table
            .iter()
            .enumerate()
            .map(|(i, &j)| (self.dom.atom(i), self.cod.atom(j)))
    }
}

impl fmt::Debug for FinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{} [", self.dom.name(), self.cod.name())?;
        for (k, (x, y)) in self.pairs().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}↦{y}")?;
        }
        write!(f, "]")
    }
}

/// A subset of a finite set, stored as member indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubSet {
    parent: FinSet,
    members: BTreeSet<usize>,
}

impl SubSet {
    pub fn new(parent: FinSet, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&m| m >= parent.len()) {
            return Err(Error::UnknownElement {
                set: parent.name().to_string(),
                atom: format!("#{bad}"),
            });
        }
        Ok(SubSet { parent, members })
    }

    pub fn from_atoms<I, S>(parent: FinSet, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let members = atoms
            .into_iter()
            .map(|a| parent.require(a.as_ref()))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(SubSet { parent, members })
    }

    pub fn parent(&self) -> &FinSet {
        &self.parent
    }

    pub fn members(&self) -> &BTreeSet<usize> {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    /// The members as a set of their own, in parent order.
    pub fn to_finset(&self, name: impl Into<String>) -> FinSet {
        FinSet::ordered(
            name,
            self.members
                .iter()
                .map(|&m| self.parent.atom(m).to_string()),
        )
        .expect("distinct members")
    }

    pub fn inclusion(&self, name: impl Into<String>) -> FinFunction {
        FinFunction {
            dom: self.to_finset(name),
            cod: self.parent.clone(),
            table: self.members.iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismClass {
    pub monic: bool,
    pub epic: bool,
    pub iso: bool,
}

/// `g ∘ f`.
pub fn compose(g: &FinFunction, f: &FinFunction) -> Result<FinFunction> {
    if !f.cod.same_elements(&g.dom) {
        return Err(Error::DomainMismatch {
            expected: format!("{:?}", f.cod),
            found: format!("{:?}", g.dom),
        });
    }
    Ok(FinFunction {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        table: f.table.iter().map(|&y| g.table[y]).collect(),
    })
}

pub fn morphism_class(f: &FinFunction) -> MorphismClass {
    let monic = f.is_injective();
    let epic = f.is_surjective();
    MorphismClass {
        monic,
        epic,
        iso: monic && epic,
    }
}

pub fn pair_atom(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

pub fn tuple_atom<S: AsRef<str>>(parts: &[S]) -> String {
    let inner: Vec<&str> = parts.iter().map(AsRef::as_ref).collect();
    format!("({})", inner.join(","))
}

/// Binary product with its projections.
#[derive(Clone, Debug)]
pub struct Product {
    pub set: FinSet,
    pub proj1: FinFunction,
    pub proj2: FinFunction,
}

impl Product {
    /// Index of the pair `(i, j)`.
    pub fn pair(&self, i: usize, j: usize) -> usize {
        i * self.proj2.cod.len() + j
    }
}

pub fn product(a: &FinSet, b: &FinSet) -> Product {
    let atoms = a
        .elements()
        .iter()
        .flat_map(|x| b.elements().iter().map(move |y| pair_atom(x, y)));
    let set = FinSet::ordered(format!("{}×{}", a.name(), b.name()), atoms)
        .expect("pair atoms are distinct");
    let nb = b.len();
    let proj1 = FinFunction {
        dom: set.clone(),
        cod: a.clone(),
        table: (0..set.len()).map(|k| k / nb.max(1)).collect(),
    };
    let proj2 = FinFunction {
        dom: set.clone(),
        cod: b.clone(),
        table: (0..set.len()).map(|k| k % nb.max(1)).collect(),
    };
    Product { set, proj1, proj2 }
}

/// Mixed-radix indexing of tuples over a list of factor sizes; the first
/// factor is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleIndexer {
    radices: Vec<usize>,
}

impl TupleIndexer {
    pub fn new(radices: Vec<usize>) -> Self {
        TupleIndexer { radices }
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn size(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.radices.len()];
        for (slot, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
        digits
    }
}

/// n-ary product with tuple atoms `(x1,...,xn)`.
#[derive(Clone, Debug)]
pub struct TupleSet {
    pub set: FinSet,
    pub projections: Vec<FinFunction>,
    pub indexer: TupleIndexer,
}

pub fn tuple_product(
    name: impl Into<String>,
    factors: &[FinSet],
    limits: &Limits,
) -> Result<TupleSet> {
    limits.checked_product("tuple product", factors.iter().map(FinSet::len))?;
    let indexer = TupleIndexer::new(factors.iter().map(FinSet::len).collect());
    let size = indexer.size();
    let mut atoms = Vec::with_capacity(size);
    for k in 0..size {
        let digits = indexer.decode(k);
        let parts: Vec<&str> = digits
            .iter()
            .zip(factors)
            .map(|(&d, s)| s.atom(d))
            .collect();
        atoms.push(tuple_atom(&parts));
    }
    let set = FinSet::ordered(name, atoms)?;
    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, s)| FinFunction {
            dom: set.clone(),
            cod: s.clone(),
            table: (0..size).map(|k| indexer.decode(k)[i]).collect(),
        })
        .collect();
    Ok(TupleSet {
        set,
        projections,
        indexer,
    })
}

#[derive(Clone, Debug)]
pub struct Coproduct {
    pub set: FinSet,
    pub inj1: FinFunction,
    pub inj2: FinFunction,
}

pub fn coproduct(a: &FinSet, b: &FinSet) -> Coproduct {
    let atoms = a
        .elements()
        .iter()
        .map(|x| format!("L:{x}"))
        .chain(b.elements().iter().map(|y| format!("R:{y}")));
    let set = FinSet::ordered(format!("{}+{}", a.name(), b.name()), atoms)
        .expect("tagged atoms are distinct");
    let inj1 = FinFunction {
        dom: a.clone(),
        cod: set.clone(),
        table: (0..a.len()).collect(),
    };
    let inj2 = FinFunction {
        dom: b.clone(),
        cod: set.clone(),
        table: (a.len()..a.len() + b.len()).collect(),
    };
    Coproduct { set, inj1, inj2 }
}

fn check_parallel(f: &FinFunction, g: &FinFunction) -> Result<()> {
    if f.dom.same_elements(&g.dom) && f.cod.same_elements(&g.cod) {
        Ok(())
    } else {
        Err(Error::NotParallel(format!("{f:?} vs {g:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Equalizer {
    pub subset: SubSet,
    pub include: FinFunction,
}

pub fn equalizer(f: &FinFunction, g: &FinFunction) -> Result<Equalizer> {
    check_parallel(f, g)?;
    let subset = SubSet::new(
        f.dom.clone(),
        (0..f.dom.len()).filter(|&x| f.table[x] == g.table[x]),
    )?;
    let include = subset.inclusion(format!("Eq({})", f.dom.name()));
    Ok(Equalizer { subset, include })
}

/// A quotient of a set together with its (epic) quotient map.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub set: FinSet,
    pub map: FinFunction,
}

/// Quotient of `set` by the equivalence relation generated by `pairs`.
/// Classes are named `q:<least member>` and ordered by their least member.
pub fn quotient(
    set: &FinSet,
    pairs: impl IntoIterator<Item = (usize, usize)>,
    name: impl Into<String>,
) -> Quotient {
    let mut uf = UnionFind::new(set.len());
    for (x, y) in pairs {
        uf.union(x, y);
    }
    let mut class_of_root = HashMap::new();
    let mut atoms = Vec::new();
    let mut table = Vec::with_capacity(set.len());
    for x in 0..set.len() {
        let root = uf.find(x);
        let class = *class_of_root.entry(root).or_insert_with(|| {
            // x is the least member of its class, since members are visited in order.
            atoms.push(format!("q:{}", set.atom(x)));
            atoms.len() - 1
        });
        table.push(class);
    }
    let qset = FinSet::ordered(name, atoms).expect("class names are distinct");
    Quotient {
        map: FinFunction {
            dom: set.clone(),
            cod: qset.clone(),
            table,
        },
        set: qset,
    }
}

pub fn coequalizer(f: &FinFunction, g: &FinFunction) -> Result<Quotient> {
    check_parallel(f, g)?;
    let pairs: Vec<(usize, usize)> = f
        .table
        .iter()
        .copied()
        .zip(g.table.iter().copied())
        .collect();
    Ok(quotient(&f.cod, pairs, format!("{}/~", f.cod.name())))
}

#[derive(Clone, Debug)]
pub struct Pullback {
    pub set: FinSet,
    pub p1: FinFunction,
    pub p2: FinFunction,
}

/// `{(x, y) | f(x) = g(y)}` with its two projections.
pub fn pullback(f: &FinFunction, g: &FinFunction) -> Result<Pullback> {
    if !f.cod.same_elements(&g.cod) {
        return Err(Error::CodomainMismatch {
            left: format!("{:?}", f.cod),
            right: format!("{:?}", g.cod),
        });
    }
    let mut atoms = Vec::new();
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for x in 0..f.dom.len() {
        for y in 0..g.dom.len() {
            if f.table[x] == g.table[y] {
                atoms.push(pair_atom(f.dom.atom(x), g.dom.atom(y)));
                t1.push(x);
                t2.push(y);
            }
        }
    }
    let set = FinSet::ordered(
        format!("{}×_{}{}", f.dom.name(), f.cod.name(), g.dom.name()),
        atoms,
    )?;
    Ok(Pullback {
        p1: FinFunction {
            dom: set.clone(),
            cod: f.dom.clone(),
            table: t1,
        },
        p2: FinFunction {
            dom: set.clone(),
            cod: g.dom.clone(),
            table: t2,
        },
        set,
    })
}

#[derive(Clone, Debug)]
pub struct Pushout {
    pub set: FinSet,
    pub i1: FinFunction,
    pub i2: FinFunction,
}

/// Coproduct of the codomains modulo `f(x) ~ g(x)`.
pub fn pushout(f: &FinFunction, g: &FinFunction) -> Result<Pushout> {
    if !f.dom.same_elements(&g.dom) {
        return Err(Error::DomainMismatch {
            expected: format!("{:?}", f.dom),
            found: format!("{:?}", g.dom),
        });
    }
    let co = coproduct(&f.cod, &g.cod);
    let offset = f.cod.len();
    let pairs: Vec<(usize, usize)> = (0..f.dom.len())
        .map(|x| (f.table[x], offset + g.table[x]))
        .collect();
    let q = quotient(&co.set, pairs, format!("{}⊔{}", f.cod.name(), g.cod.name()));
    Ok(Pushout {
        i1: compose(&q.map, &co.inj1)?,
        i2: compose(&q.map, &co.inj2)?,
        set: q.set,
    })
}

/// `B^A` with its evaluation map `B^A × A → B`.
///
/// The element at index `k` is the function whose table, read as a base-`|B|`
/// numeral with the first argument most significant, equals `k`.
#[derive(Clone, Debug)]
pub struct Exponential {
    pub set: FinSet,
    pub eval: FinFunction,
    base: FinSet,
    target: FinSet,
}

impl Exponential {
    pub fn base(&self) -> &FinSet {
        &self.base
    }

    pub fn target(&self) -> &FinSet {
        &self.target
    }

    pub fn function_at(&self, k: usize) -> FinFunction {
        let indexer = TupleIndexer::new(vec![self.target.len(); self.base.len()]);
        FinFunction {
            dom: self.base.clone(),
            cod: self.target.clone(),
            table: indexer.decode(k),
        }
    }

    pub fn index_of(&self, f: &FinFunction) -> Result<usize> {
        if !f.dom.same_elements(&self.base) || !f.cod.same_elements(&self.target) {
            return Err(Error::DomainMismatch {
                expected: self.set.name().to_string(),
                found: format!("{f:?}"),
            });
        }
        Ok(TupleIndexer::new(vec![self.target.len(); self.base.len()]).encode(&f.table))
    }

    /// Transpose of `h: X × A → B` into `X → B^A`.
    pub fn curry(&self, h: &FinFunction, x: &FinSet) -> Result<FinFunction> {
        let na = self.base.len();
        if h.dom.len() != x.len() * na || !h.cod.same_elements(&self.target) {
            return Err(Error::DomainMismatch {
                expected: format!("{}×{}", x.name(), self.base.name()),
                found: format!("{:?}", h.dom),
            });
        }
        let indexer = TupleIndexer::new(vec![self.target.len(); na]);
        let table = (0..x.len())
            .map(|i| indexer.encode(&h.table[i * na..(i + 1) * na]))
            .collect();
        FinFunction::new(x.clone(), self.set.clone(), table)
    }

    /// Inverse of [`Exponential::curry`]: `X → B^A` back to `X × A → B`.
    pub fn uncurry(&self, k: &FinFunction) -> Result<FinFunction> {
        if !k.cod.same_elements(&self.set) {
            return Err(Error::DomainMismatch {
                expected: self.set.name().to_string(),
                found: format!("{:?}", k.cod),
            });
        }
        let dom = product(&k.dom, &self.base).set;
        let table = k
            .table
            .iter()
            .flat_map(|&code| self.function_at(code).table)
            .collect();
        FinFunction::new(dom, self.target.clone(), table)
    }
}

pub fn function_atom(f: &FinFunction) -> String {
    let parts: Vec<String> = f.pairs().map(|(x, y)| format!("{x}->{y}")).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn exponential(a: &FinSet, b: &FinSet, limits: &Limits) -> Result<Exponential> {
    let count = limits.checked_pow("exponential", b.len(), a.len())? as usize;
    let indexer = TupleIndexer::new(vec![b.len(); a.len()]);
    let mut atoms = Vec::with_capacity(count);
    for k in 0..count {
        let f = FinFunction {
            dom: a.clone(),
            cod: b.clone(),
            table: indexer.decode(k),
        };
        atoms.push(function_atom(&f));
    }
    let set = FinSet::ordered(format!("{}^{}", b.name(), a.name()), atoms)?;
    let ev_dom = product(&set, a).set;
    let na = a.len();
    let table = (0..ev_dom.len())
        .map(|k| indexer.decode(k / na)[k % na])
        .collect();
    let eval = FinFunction {
        dom: ev_dom,
        cod: b.clone(),
        table,
    };
    Ok(Exponential {
        set,
        eval,
        base: a.clone(),
        target: b.clone(),
    })
}

/// Every function `a → b`, in exponential order.
pub fn all_functions(a: &FinSet, b: &FinSet, limits: &Limits) -> Result<Vec<FinFunction>> {
    let count = limits.checked_pow("function enumeration", b.len(), a.len())? as usize;
    let indexer = TupleIndexer::new(vec![b.len(); a.len()]);
    Ok((0..count)
        .map(|k| FinFunction {
            dom: a.clone(),
            cod: b.clone(),
            table: indexer.decode(k),
        })
        .collect())
}

/// Classifying map `parent → {0,1}` of a subset.
pub fn characteristic(s: &SubSet) -> FinFunction {
    let table = (0..s.parent.len())
        .map(|x| usize::from(s.contains(x)))
        .collect();
    FinFunction {
        dom: s.parent.clone(),
        cod: FinSet::truth_values(),
        table,
    }
}

/// `true: 1 → 2`.
pub fn true_point() -> FinFunction {
    FinFunction {
        dom: FinSet::singleton("1", "*"),
        cod: FinSet::truth_values(),
        table: vec![1],
    }
}

/// The subset classified by `chi: X → 2`, i.e. the pullback of `true`.
pub fn classified_subset(chi: &FinFunction) -> Result<SubSet> {
    let pb = pullback(chi, &true_point())?;
    SubSet::new(chi.dom.clone(), pb.p1.table.iter().copied())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        // Keep the smaller index as root so class order is stable.
        if rx < ry {
            self.parent[ry] = rx;
        } else if ry < rx {
            self.parent[rx] = ry;
        }
    }
}
