//! Finite categories, set-valued diagrams, cones, and limits/colimits.
//!
//! Categories are index-based: objects and arrows are numbered in the order
//! given, and the composition table stores `g ∘ f` under the key `(g, f)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::finset::{quotient, tuple_atom, FinFunction, FinSet};
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, PartialEq, Eq)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<usize>,
    composition: Vec<Option<usize>>,
    object_index: HashMap<String, usize>,
    arrow_index: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CategoryViolation {
    /// A composable pair without a table entry.
    Closure {
        g: String,
        f: String,
    },
    /// A table entry whose endpoints are wrong or whose arguments do not compose.
    BadEntry {
        g: String,
        f: String,
        result: String,
    },
    Identity {
        object: String,
        arrow: String,
    },
    Associativity {
        h: String,
        g: String,
        f: String,
    },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoryViolation::Closure { g, f: ff } => write!(f, "closure: no entry for {g}∘{ff}"),
            CategoryViolation::BadEntry { g, f: ff, result } => {
                write!(f, "bad entry: {g}∘{ff} = {result}")
            }
            CategoryViolation::Identity { object, arrow } => {
                write!(f, "identity law fails for id_{object} with {arrow}")
            }
            CategoryViolation::Associativity { h, g, f: ff } => {
                write!(f, "associativity fails for ({h},{g},{ff})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryReport {
    pub violations: Vec<CategoryViolation>,
}

impl CategoryReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FinCategory {
    /// Builds a category from named data. Only references are checked here;
    /// use [`FinCategory::validate`] for the axioms.
    pub fn new(
        name: impl Into<String>,
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        identities: Vec<(String, String)>,
        composition: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let object_index = index_names(&objects, "object")?;
        let mut arrow_list = Vec::with_capacity(arrows.len());
        for (a, s, t) in arrows {
            let src = *object_index
                .get(&s)
                .ok_or_else(|| Error::UnknownObject(s.clone()))?;
            let tgt = *object_index
                .get(&t)
                .ok_or_else(|| Error::UnknownObject(t.clone()))?;
            arrow_list.push(Arrow { name: a, src, tgt });
        }
        let names: Vec<String> = arrow_list.iter().map(|a| a.name.clone()).collect();
        let arrow_index = index_names(&names, "arrow")?;
        let lookup = |a: &str| {
            arrow_index
                .get(a)
                .copied()
                .ok_or_else(|| Error::UnknownArrow(a.to_string()))
        };

        let mut ids = vec![None; objects.len()];
        for (o, a) in identities {
            let oi = *object_index
                .get(&o)
                .ok_or_else(|| Error::UnknownObject(o.clone()))?;
            ids[oi] = Some(lookup(&a)?);
        }
        let identities = ids
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                a.ok_or_else(|| {
                    Error::InvalidShape(format!("object `{}` has no identity", objects[i]))
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let n = arrow_list.len();
        let mut table = vec![None; n * n];
        for (g, f, gf) in composition {
            let (g, f, gf) = (lookup(&g)?, lookup(&f)?, lookup(&gf)?);
            table[g * n + f] = Some(gf);
        }
        Ok(FinCategory {
            name: name.into(),
            objects,
            arrows: arrow_list,
            identities,
            composition: table,
            object_index,
            arrow_index,
        })
    }

    /// [`FinCategory::new`] followed by a full axiom check.
    pub fn checked(
        name: impl Into<String>,
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        identities: Vec<(String, String)>,
        composition: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let c = Self::new(name, objects, arrows, identities, composition)?;
        let report = c.validate();
        match report.violations.first() {
            None => Ok(c),
            Some(v) => Err(Error::InvalidShape(format!("{}: {v}", c.name))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn object(&self, name: &str) -> Result<usize> {
        self.object_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<usize> {
        self.arrow_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownArrow(name.to_string()))
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn arrow_name(&self, f: usize) -> &str {
        &self.arrows[f].name
    }

    pub fn src(&self, f: usize) -> usize {
        self.arrows[f].src
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.arrows[f].tgt
    }

    pub fn id(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.arrows[f].src] == f
    }

    /// `g ∘ f`, if the pair composes and the table has an entry.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.arrows[f].tgt != self.arrows[g].src {
            return None;
        }
        self.composition[g * self.arrows.len() + f]
    }

    /// `g ∘ f` on a category that passed validation.
    pub(crate) fn comp(&self, g: usize, f: usize) -> usize {
        self.compose(g, f)
            .expect("composable pair in a validated category")
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| self.arrows[f].src == x && self.arrows[f].tgt == y)
            .collect()
    }

    pub fn arrows_into(&self, x: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| self.arrows[f].tgt == x)
            .collect()
    }

    pub fn arrows_from(&self, x: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&f| self.arrows[f].src == x)
            .collect()
    }

    pub fn validate(&self) -> CategoryReport {
        let mut violations = Vec::new();
        let n = self.arrows.len();
        let name = |f: usize| self.arrows[f].name.clone();
        for (x, &i) in self.identities.iter().enumerate() {
            if self.arrows[i].src != x || self.arrows[i].tgt != x {
                violations.push(CategoryViolation::BadEntry {
                    g: name(i),
                    f: name(i),
                    result: format!("identity of {} has wrong endpoints", self.objects[x]),
                });
            }
        }
        for g in 0..n {
            for f in 0..n {
                let entry = self.composition[g * n + f];
                let composable = self.arrows[f].tgt == self.arrows[g].src;
                match (composable, entry) {
                    (true, None) => violations.push(CategoryViolation::Closure {
                        g: name(g),
                        f: name(f),
                    }),
                    (false, Some(h)) => violations.push(CategoryViolation::BadEntry {
                        g: name(g),
                        f: name(f),
                        result: name(h),
                    }),
                    (true, Some(h))
                        if self.arrows[h].src != self.arrows[f].src
                            || self.arrows[h].tgt != self.arrows[g].tgt =>
                    {
                        violations.push(CategoryViolation::BadEntry {
                            g: name(g),
                            f: name(f),
                            result: name(h),
                        })
                    }
                    _ => {}
                }
            }
        }
        if !violations.is_empty() {
            return CategoryReport { violations };
        }
        for f in 0..n {
            let (s, t) = (self.arrows[f].src, self.arrows[f].tgt);
            if self.compose(f, self.identities[s]) != Some(f) {
                violations.push(CategoryViolation::Identity {
                    object: self.objects[s].clone(),
                    arrow: name(f),
                });
            }
            if self.compose(self.identities[t], f) != Some(f) {
                violations.push(CategoryViolation::Identity {
                    object: self.objects[t].clone(),
                    arrow: name(f),
                });
            }
        }
        for f in 0..n {
            for g in self.arrows_from(self.arrows[f].tgt) {
                let gf = self.comp(g, f);
                for h in self.arrows_from(self.arrows[g].tgt) {
                    if self.compose(h, gf) != self.compose(self.comp(h, g), f) {
                        violations.push(CategoryViolation::Associativity {
                            h: name(h),
                            g: name(g),
                            f: name(f),
                        });
                    }
                }
            }
        }
        CategoryReport { violations }
    }

    pub fn opposite(&self) -> FinCategory {
        let n = self.arrows.len();
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow {
                name: a.name.clone(),
                src: a.tgt,
                tgt: a.src,
            })
            .collect();
        let mut composition = vec![None; n * n];
        for g in 0..n {
            for f in 0..n {
                composition[g * n + f] = self.composition[f * n + g];
            }
        }
        FinCategory {
            name: format!("{}^op", self.name),
            objects: self.objects.clone(),
            arrows,
            identities: self.identities.clone(),
            composition,
            object_index: self.object_index.clone(),
            arrow_index: self.arrow_index.clone(),
        }
    }

    /// The free category on a directed graph: arrows are paths, named by
    /// their generators in composition order (`g∘f` for `f` then `g`).
    /// Graphs with a directed cycle have infinitely many paths and are rejected.
    pub fn free(
        name: impl Into<String>,
        objects: &[&str],
        generators: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let name = name.into();
        let objects: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
        let object_index = index_names(&objects, "object")?;
        let gens = generators
            .iter()
            .map(|&(g, s, t)| {
                let s = *object_index
                    .get(s)
                    .ok_or_else(|| Error::UnknownObject(s.to_string()))?;
                let t = *object_index
                    .get(t)
                    .ok_or_else(|| Error::UnknownObject(t.to_string()))?;
                Ok((g.to_string(), s, t))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(cycle) = find_cycle(objects.len(), &gens) {
            return Err(Error::InvalidShape(format!(
                "generator graph has a cycle through {}",
                objects[cycle]
            )));
        }

        // Paths as generator sequences in application order; identities are empty paths.
        let mut paths: Vec<(usize, Vec<usize>, usize)> =
            (0..objects.len()).map(|x| (x, Vec::new(), x)).collect();
        let mut frontier: Vec<usize> = (0..objects.len()).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                let (s, seq, t) = paths[p].clone();
                for (gi, (_, gs, gt)) in gens.iter().enumerate() {
                    if *gs == t {
                        let mut ext = seq.clone();
                        ext.push(gi);
                        paths.push((s, ext, *gt));
                        next.push(paths.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        let path_name = |seq: &[usize], s: usize| -> String {
            if seq.is_empty() {
                format!("id_{}", objects[s])
            } else {
                seq.iter()
                    .rev()
                    .map(|&g| gens[g].0.as_str())
                    .collect::<Vec<_>>()
                    .join("∘")
            }
        };
        let arrows: Vec<Arrow> = paths
            .iter()
            .map(|(s, seq, t)| Arrow {
                name: path_name(seq, *s),
                src: *s,
                tgt: *t,
            })
            .collect();
        let names: Vec<String> = arrows.iter().map(|a| a.name.clone()).collect();
        let arrow_index = index_names(&names, "arrow")?;
        let by_seq: HashMap<(usize, Vec<usize>), usize> = paths
            .iter()
            .enumerate()
            .map(|(i, (s, seq, _))| ((*s, seq.clone()), i))
            .collect();
        let n = arrows.len();
        let mut composition = vec![None; n * n];
        for (f, (fs, fseq, ft)) in paths.iter().enumerate() {
            for (g, (gs, gseq, _)) in paths.iter().enumerate() {
                if gs == ft {
                    let mut seq = fseq.clone();
                    seq.extend(gseq);
                    composition[g * n + f] = Some(by_seq[&(*fs, seq)]);
                }
            }
        }
        Ok(FinCategory {
            name,
            identities: (0..objects.len()).collect(),
            objects,
            arrows,
            composition,
            object_index,
            arrow_index,
        })
    }

    /// The poset generated by `x ≤ y` pairs, as a thin category with arrows
    /// `id_x` and `x<=y`. Fails if the generated preorder is not antisymmetric.
    pub fn poset(name: impl Into<String>, elements: &[&str], leq: &[(&str, &str)]) -> Result<Self> {
        let objects: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let object_index = index_names(&objects, "object")?;
        let n = objects.len();
        let mut rel = vec![vec![false; n]; n];
        for (x, row) in rel.iter_mut().enumerate() {
            row[x] = true;
        }
        for &(x, y) in leq {
            let x = *object_index
                .get(x)
                .ok_or_else(|| Error::UnknownObject(x.to_string()))?;
            let y = *object_index
                .get(y)
                .ok_or_else(|| Error::UnknownObject(y.to_string()))?;
            rel[x][y] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if rel[i][k] && rel[k][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rel[i][j] && rel[j][i] {
                    return Err(Error::InvalidShape(format!(
                        "{} and {} are identified by the order",
                        objects[i], objects[j]
                    )));
                }
            }
        }
        let mut arrows = Vec::new();
        let mut arrow_of = HashMap::new();
        let mut identities = vec![0; n];
        for i in 0..n {
            for j in 0..n {
                if rel[i][j] {
                    let name = if i == j {
                        format!("id_{}", objects[i])
                    } else {
                        format!("{}<={}", objects[i], objects[j])
                    };
                    if i == j {
                        identities[i] = arrows.len();
                    }
                    arrow_of.insert((i, j), arrows.len());
                    arrows.push(Arrow {
                        name,
                        src: i,
                        tgt: j,
                    });
                }
            }
        }
        let m = arrows.len();
        let mut composition = vec![None; m * m];
        for (f, af) in arrows.iter().enumerate() {
            for (g, ag) in arrows.iter().enumerate() {
                if af.tgt == ag.src {
                    composition[g * m + f] = Some(arrow_of[&(af.src, ag.tgt)]);
                }
            }
        }
        let names: Vec<String> = arrows.iter().map(|a| a.name.clone()).collect();
        let arrow_index = index_names(&names, "arrow")?;
        Ok(FinCategory {
            name: name.into(),
            objects,
            arrows,
            identities,
            composition,
            object_index,
            arrow_index,
        })
    }

    /// `x ≤ y` in a thin category.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        !self.hom(x, y).is_empty()
    }
}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinCategory({}: objects {:?}, arrows [",
            self.name, self.objects
        )?;
        for (i, a) in self.arrows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{}: {}→{}",
                a.name, self.objects[a.src], self.objects[a.tgt]
            )?;
        }
        write!(f, "])")
    }
}

fn index_names(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::InvalidShape(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(index)
}

fn find_cycle(n: usize, gens: &[(String, usize, usize)]) -> Option<usize> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(x: usize, gens: &[(String, usize, usize)], state: &mut [u8]) -> Option<usize> {
        state[x] = 1;
        for (_, s, t) in gens {
            if *s == x {
                match state[*t] {
                    1 => return Some(*t),
                    0 => {
                        if let Some(c) = visit(*t, gens, state) {
                            return Some(c);
                        }
                    }
                    _ => {}
                }
            }
        }
        state[x] = 2;
        None
    }
    let mut state = vec![0u8; n];
    (0..n).find_map(|x| {
        if state[x] == 0 {
            visit(x, gens, &mut state)
        } else {
            None
        }
    })
}

/// Standard indexing shapes.
pub mod shapes {
    use super::*;

    /// One object, one arrow.
    pub fn terminal() -> FinCategory {
        FinCategory::free("1", &["*"], &[]).expect("terminal shape")
    }

    pub fn empty() -> FinCategory {
        FinCategory::free("0", &[], &[]).expect("empty shape")
    }

    pub fn discrete(objects: &[&str]) -> FinCategory {
        FinCategory::free("discrete", objects, &[]).expect("discrete shape")
    }

    /// `u: a → b`.
    pub fn interval() -> FinCategory {
        FinCategory::free("2", &["a", "b"], &[("u", "a", "b")]).expect("interval shape")
    }

    /// `f: x → z ← y: g`.
    pub fn pullback() -> FinCategory {
        FinCategory::free(
            "cospan",
            &["x", "y", "z"],
            &[("f", "x", "z"), ("g", "y", "z")],
        )
        .expect("cospan shape")
    }

    /// `f: z → x`, `g: z → y`.
    pub fn pushout() -> FinCategory {
        FinCategory::free(
            "span",
            &["x", "y", "z"],
            &[("f", "z", "x"), ("g", "z", "y")],
        )
        .expect("span shape")
    }

    /// `f, g: s ⇉ t`.
    pub fn parallel_pair() -> FinCategory {
        FinCategory::free("parallel", &["s", "t"], &[("f", "s", "t"), ("g", "s", "t")])
            .expect("parallel shape")
    }

    /// Base of the graph topos: `s, t: V → E`, so a presheaf sends an edge
    /// to its source and target vertex.
    pub fn graph_base() -> FinCategory {
        FinCategory::new(
            "Γ",
            vec!["V".into(), "E".into()],
            vec![
                ("1_V".into(), "V".into(), "V".into()),
                ("1_E".into(), "E".into(), "E".into()),
                ("s".into(), "V".into(), "E".into()),
                ("t".into(), "V".into(), "E".into()),
            ],
            vec![("V".into(), "1_V".into()), ("E".into(), "1_E".into())],
            vec![
                ("1_V".into(), "1_V".into(), "1_V".into()),
                ("1_E".into(), "1_E".into(), "1_E".into()),
                ("s".into(), "1_V".into(), "s".into()),
                ("t".into(), "1_V".into(), "t".into()),
                ("1_E".into(), "s".into(), "s".into()),
                ("1_E".into(), "t".into(), "t".into()),
            ],
        )
        .expect("graph base")
    }

    /// One object with an idempotent `e ∘ e = e`.
    pub fn idempotent() -> FinCategory {
        let s = |x: &str| x.to_string();
        FinCategory::new(
            "idem",
            vec![s("*")],
            vec![(s("id"), s("*"), s("*")), (s("e"), s("*"), s("*"))],
            vec![(s("*"), s("id"))],
            vec![
                (s("id"), s("id"), s("id")),
                (s("id"), s("e"), s("e")),
                (s("e"), s("id"), s("e")),
                (s("e"), s("e"), s("e")),
            ],
        )
        .expect("idempotent monoid")
    }

    /// `l ≤ t ≥ r`.
    pub fn vee() -> FinCategory {
        FinCategory::poset("vee", &["l", "r", "t"], &[("l", "t"), ("r", "t")]).expect("vee poset")
    }
}

/// A functor from a finite shape into finite sets.
#[derive(Clone, Debug)]
pub struct SetDiagram {
    shape: Arc<FinCategory>,
    objects: Vec<FinSet>,
    arrows: Vec<FinFunction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagramViolation {
    Endpoints { arrow: String },
    Identity { object: String },
    Composition { g: String, f: String },
}

impl fmt::Display for DiagramViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramViolation::Endpoints { arrow } => {
                write!(f, "image of {arrow} has wrong domain or codomain")
            }
            DiagramViolation::Identity { object } => {
                write!(f, "identity on {object} is not sent to an identity")
            }
            DiagramViolation::Composition { g, f: ff } => {
                write!(f, "image of {g}∘{ff} is not the composite of images")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiagramReport {
    pub violations: Vec<DiagramViolation>,
}

impl DiagramReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SetDiagram {
    pub fn new(
        shape: Arc<FinCategory>,
        objects: Vec<FinSet>,
        arrows: Vec<FinFunction>,
    ) -> Result<Self> {
        if objects.len() != shape.object_count() || arrows.len() != shape.arrow_count() {
            return Err(Error::InvalidDiagram(format!(
                "shape {} needs {} sets and {} functions, got {} and {}",
                shape.name(),
                shape.object_count(),
                shape.arrow_count(),
                objects.len(),
                arrows.len()
            )));
        }
        Ok(SetDiagram {
            shape,
            objects,
            arrows,
        })
    }

    /// A diagram on a free shape given only the images of the generators;
    /// composites and identities are filled in.
    pub fn on_free_shape(
        shape: Arc<FinCategory>,
        objects: Vec<FinSet>,
        generators: &[(&str, FinFunction)],
    ) -> Result<Self> {
        let gens: HashMap<&str, &FinFunction> = generators.iter().map(|(n, f)| (*n, f)).collect();
        let mut arrows = Vec::with_capacity(shape.arrow_count());
        for (i, a) in shape.arrows().iter().enumerate() {
            if shape.is_identity(i) {
                arrows.push(FinFunction::identity(&objects[a.src]));
                continue;
            }
            let mut acc = FinFunction::identity(&objects[a.src]);
            for part in a.name.split('∘').rev() {
                let g = gens
                    .get(part)
                    .ok_or_else(|| Error::UnknownArrow(part.to_string()))?;
                acc = crate::finset::compose(g, &acc)?;
            }
            arrows.push(acc);
        }
        Self::new(shape, objects, arrows)
    }

    pub fn shape(&self) -> &Arc<FinCategory> {
        &self.shape
    }

    pub fn object(&self, j: usize) -> &FinSet {
        &self.objects[j]
    }

    pub fn objects(&self) -> &[FinSet] {
        &self.objects
    }

    pub fn arrow(&self, f: usize) -> &FinFunction {
        &self.arrows[f]
    }

    pub fn arrows(&self) -> &[FinFunction] {
        &self.arrows
    }

    pub fn validate(&self) -> Result<DiagramReport> {
        let shape_report = self.shape.validate();
        if let Some(v) = shape_report.violations.first() {
            return Err(Error::InvalidShape(v.to_string()));
        }
        let c = &self.shape;
        let mut violations = Vec::new();
        for (i, a) in c.arrows().iter().enumerate() {
            let f = &self.arrows[i];
            if !f.dom().same_elements(&self.objects[a.src])
                || !f.cod().same_elements(&self.objects[a.tgt])
            {
                violations.push(DiagramViolation::Endpoints {
                    arrow: a.name.clone(),
                });
            }
        }
        if !violations.is_empty() {
            return Ok(DiagramReport { violations });
        }
        for x in 0..c.object_count() {
            if self.arrows[c.id(x)].table() != FinFunction::identity(&self.objects[x]).table() {
                violations.push(DiagramViolation::Identity {
                    object: c.object_name(x).to_string(),
                });
            }
        }
        for f in 0..c.arrow_count() {
            for g in c.arrows_from(c.tgt(f)) {
                let gf = c.comp(g, f);
                let lhs = self.arrows[gf].table();
                let rhs: Vec<usize> = self.arrows[f]
                    .table()
                    .iter()
                    .map(|&y| self.arrows[g].apply(y))
                    .collect();
                if lhs != rhs.as_slice() {
                    violations.push(DiagramViolation::Composition {
                        g: c.arrow_name(g).to_string(),
                        f: c.arrow_name(f).to_string(),
                    });
                }
            }
        }
        Ok(DiagramReport { violations })
    }

    fn same_as(&self, other: &SetDiagram) -> bool {
        (Arc::ptr_eq(&self.shape, &other.shape) || *self.shape == *other.shape)
            && self.objects == other.objects
            && self
                .arrows
                .iter()
                .zip(&other.arrows)
                .all(|(a, b)| a.table() == b.table())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// A cone over the diagram: legs go from the apex into the diagram.
    Over,
    /// A cocone under the diagram: legs go from the diagram to the nadir.
    Under,
}

#[derive(Clone, Debug)]
pub struct Cone {
    pub diagram: SetDiagram,
    pub apex: FinSet,
    pub legs: Vec<FinFunction>,
    pub direction: Direction,
}

impl Cone {
    /// Checks endpoints and commuting triangles.
    pub fn check(&self) -> Result<()> {
        let d = &self.diagram;
        let c = d.shape();
        if self.legs.len() != c.object_count() {
            return Err(Error::NotACone(format!(
                "expected {} legs, got {}",
                c.object_count(),
                self.legs.len()
            )));
        }
        for (j, leg) in self.legs.iter().enumerate() {
            let ok = match self.direction {
                Direction::Over => {
                    leg.dom().same_elements(&self.apex) && leg.cod().same_elements(d.object(j))
                }
                Direction::Under => {
                    leg.dom().same_elements(d.object(j)) && leg.cod().same_elements(&self.apex)
                }
            };
            if !ok {
                return Err(Error::NotACone(format!(
                    "leg at {} has wrong endpoints",
                    c.object_name(j)
                )));
            }
        }
        for (f, a) in c.arrows().iter().enumerate() {
            let df = d.arrow(f);
            let commutes = match self.direction {
                Direction::Over => (0..self.apex.len())
                    .all(|z| df.apply(self.legs[a.src].apply(z)) == self.legs[a.tgt].apply(z)),
                Direction::Under => (0..d.object(a.src).len())
                    .all(|x| self.legs[a.tgt].apply(df.apply(x)) == self.legs[a.src].apply(x)),
            };
            if !commutes {
                return Err(Error::NotACone(format!(
                    "triangle at {} does not commute",
                    a.name
                )));
            }
        }
        Ok(())
    }
}

/// A natural transformation between two diagrams of the same shape.
#[derive(Clone, Debug)]
pub struct NatTransformation {
    pub source: SetDiagram,
    pub target: SetDiagram,
    pub components: Vec<FinFunction>,
}

impl NatTransformation {
    pub fn new(
        source: SetDiagram,
        target: SetDiagram,
        components: Vec<FinFunction>,
    ) -> Result<Self> {
        let nt = NatTransformation {
            source,
            target,
            components,
        };
        nt.check()?;
        Ok(nt)
    }

    pub fn check(&self) -> Result<()> {
        let c = self.source.shape();
        if *c.as_ref() != *self.target.shape().as_ref() || self.components.len() != c.object_count()
        {
            return Err(Error::InvalidDiagram(
                "natural transformation between different shapes".into(),
            ));
        }
        for (j, a) in self.components.iter().enumerate() {
            if !a.dom().same_elements(self.source.object(j))
                || !a.cod().same_elements(self.target.object(j))
            {
                return Err(Error::DomainMismatch {
                    expected: c.object_name(j).to_string(),
                    found: format!("{a:?}"),
                });
            }
        }
        for (f, arrow) in c.arrows().iter().enumerate() {
            let ok = (0..self.source.object(arrow.src).len()).all(|x| {
                self.components[arrow.tgt].apply(self.source.arrow(f).apply(x))
                    == self
                        .target
                        .arrow(f)
                        .apply(self.components[arrow.src].apply(x))
            });
            if !ok {
                return Err(Error::NotCommuting(format!(
                    "naturality square at {}",
                    arrow.name
                )));
            }
        }
        Ok(())
    }
}

/// Calls `visit` on every compatible family `(x_j)` of the diagram, with
/// pruning as soon as an arrow between assigned objects is violated.
fn compatible_families(
    d: &SetDiagram,
    limits: &Limits,
    mut visit: impl FnMut(&[usize]),
) -> Result<()> {
    let c = d.shape();
    let n = c.object_count();
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, a) in c.arrows().iter().enumerate() {
        checks[a.src.max(a.tgt)].push(f);
    }
    let mut assignment = vec![0usize; n];
    let mut visited: u64 = 0;

    fn go(
        j: usize,
        d: &SetDiagram,
        checks: &[Vec<usize>],
        assignment: &mut Vec<usize>,
        visited: &mut u64,
        cap: u64,
        visit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        if j == assignment.len() {
            visit(assignment);
            return Ok(());
        }
        let c = d.shape();
        for x in 0..d.object(j).len() {
            *visited += 1;
            if *visited > cap {
                return Err(Error::size_limit("limit candidates", *visited, cap));
            }
            assignment[j] = x;
            let ok = checks[j]
                .iter()
                .all(|&f| d.arrow(f).apply(assignment[c.src(f)]) == assignment[c.tgt(f)]);
            if ok {
                go(j + 1, d, checks, assignment, visited, cap, visit)?;
            }
        }
        Ok(())
    }
    go(
        0,
        d,
        &checks,
        &mut assignment,
        &mut visited,
        limits.max_enum,
        &mut visit,
    )
}

/// The limit cone: compatible tuples with projection legs.
pub fn limit(d: &SetDiagram, limits: &Limits) -> Result<Cone> {
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    compatible_families(d, limits, |t| tuples.push(t.to_vec()))?;
    let atoms = tuples.iter().map(|t| {
        let parts: Vec<&str> = t
            .iter()
            .enumerate()
            .map(|(j, &x)| d.object(j).atom(x))
            .collect();
        tuple_atom(&parts)
    });
    let apex = FinSet::ordered(
        format!("lim {}", d.shape().name()),
        atoms.collect::<Vec<_>>(),
    )?;
    let legs = (0..d.shape().object_count())
        .map(|j| {
            FinFunction::new(
                apex.clone(),
                d.object(j).clone(),
                tuples.iter().map(|t| t[j]).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cone {
        diagram: d.clone(),
        apex,
        legs,
        direction: Direction::Over,
    })
}

/// Offsets of each object's block inside the tagged disjoint union.
fn tagged_offsets(d: &SetDiagram) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(d.objects().len() + 1);
    let mut acc = 0;
    for s in d.objects() {
        offsets.push(acc);
        acc += s.len();
    }
    offsets.push(acc);
    offsets
}

/// The colimit cocone: tagged union `<object>:<atom>` modulo the arrows.
pub fn colimit(d: &SetDiagram) -> Cone {
    let c = d.shape();
    let offsets = tagged_offsets(d);
    let atoms: Vec<String> = d
        .objects()
        .iter()
        .enumerate()
        .flat_map(|(j, s)| {
            s.elements()
                .iter()
                .map(move |x| format!("{}:{x}", c.object_name(j)))
        })
        .collect();
    let union =
        FinSet::ordered("⊔", atoms).expect("object names are distinct, so tagged atoms are too");
    let mut pairs = Vec::new();
    for (f, a) in c.arrows().iter().enumerate() {
        for x in 0..d.object(a.src).len() {
            pairs.push((offsets[a.src] + x, offsets[a.tgt] + d.arrow(f).apply(x)));
        }
    }
    let q = quotient(&union, pairs, format!("colim {}", c.name()));
    let legs = (0..c.object_count())
        .map(|j| {
            FinFunction::new(
                d.object(j).clone(),
                q.set.clone(),
                (0..d.object(j).len())
                    .map(|x| q.map.apply(offsets[j] + x))
                    .collect(),
            )
            .expect("quotient legs")
        })
        .collect();
    Cone {
        diagram: d.clone(),
        apex: q.set,
        legs,
        direction: Direction::Under,
    }
}

/// Number of mediating maps from `candidate` into `universal` (over), or out
/// of `universal` into `candidate` (under). Both must be cones on the same diagram.
fn mediator_choices(universal: &Cone, candidate: &Cone) -> Vec<Vec<usize>> {
    match universal.direction {
        Direction::Over => (0..candidate.apex.len())
            .map(|z| {
                (0..universal.apex.len())
                    .filter(|&w| {
                        universal
                            .legs
                            .iter()
                            .zip(&candidate.legs)
                            .all(|(lu, lc)| lu.apply(w) == lc.apply(z))
                    })
                    .collect()
            })
            .collect(),
        Direction::Under => {
            let mut allowed: Vec<Option<BTreeSet<usize>>> = vec![None; universal.apex.len()];
            for (lu, lc) in universal.legs.iter().zip(&candidate.legs) {
                for x in 0..lu.dom().len() {
                    let slot = &mut allowed[lu.apply(x)];
                    let want = lc.apply(x);
                    match slot {
                        None => *slot = Some(BTreeSet::from([want])),
                        Some(s) => s.retain(|&y| y == want),
                    }
                }
            }
            allowed
                .into_iter()
                .map(|s| {
                    s.map_or_else(
                        || (0..candidate.apex.len()).collect(),
                        |s| s.into_iter().collect(),
                    )
                })
                .collect()
        }
    }
}

fn choice_count(choices: &[Vec<usize>]) -> u64 {
    choices
        .iter()
        .fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64))
}

/// The unique map factoring `candidate` through `universal`.
pub fn mediating_morphism(universal: &Cone, candidate: &Cone) -> Result<FinFunction> {
    if universal.direction != candidate.direction {
        return Err(Error::NotACone(
            "cones point in different directions".into(),
        ));
    }
    if !universal.diagram.same_as(&candidate.diagram) {
        return Err(Error::NotACone("cones are over different diagrams".into()));
    }
    universal.check()?;
    candidate.check()?;
    let choices = mediator_choices(universal, candidate);
    let count = choice_count(&choices);
    if count != 1 {
        return Err(Error::NoFactorization(format!("{count} mediating maps")));
    }
    let table = choices.iter().map(|c| c[0]).collect();
    match universal.direction {
        Direction::Over => FinFunction::new(candidate.apex.clone(), universal.apex.clone(), table),
        Direction::Under => FinFunction::new(universal.apex.clone(), candidate.apex.clone(), table),
    }
}

/// The first cone that witnessed a universality failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalityFailure {
    pub apex_size: usize,
    /// Leg tables of the offending cone, one per shape object.
    pub legs: Vec<Vec<usize>>,
    pub mediators: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalityReport {
    pub cones_checked: u64,
    pub failure: Option<UniversalityFailure>,
}

impl UniversalityReport {
    pub fn is_universal(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn is_universal_cone(c: &Cone, limits: &Limits) -> Result<bool> {
    Ok(universality_report(c, limits)?.is_universal())
}

/// Enumerates every cone (or cocone) on the diagram with apex sizes
/// `0..=limits.cone_apex_bound` and counts its mediating maps.
pub fn universality_report(c: &Cone, limits: &Limits) -> Result<UniversalityReport> {
    c.check()?;
    let mut report = UniversalityReport {
        cones_checked: 0,
        failure: None,
    };
    for n in 0..=limits.cone_apex_bound {
        let apex = FinSet::ordered(format!("T{n}"), (0..n).map(|i| format!("t{i}")))?;
        let found = match c.direction {
            Direction::Over => check_over_cones(c, &apex, limits, &mut report.cones_checked)?,
            Direction::Under => check_under_cones(c, &apex, limits, &mut report.cones_checked)?,
        };
        if let Some((legs, mediators)) = found {
            report.failure = Some(UniversalityFailure {
                apex_size: n,
                legs,
                mediators,
            });
            return Ok(report);
        }
    }
    Ok(report)
}

fn bump(counter: &mut u64, limits: &Limits) -> Result<()> {
    *counter += 1;
    if *counter > limits.max_enum {
        return Err(Error::size_limit(
            "candidate cones",
            *counter,
            limits.max_enum,
        ));
    }
    Ok(())
}

type Witness = Option<(Vec<Vec<usize>>, u64)>;

fn check_over_cones(
    c: &Cone,
    apex: &FinSet,
    limits: &Limits,
    counter: &mut u64,
) -> Result<Witness> {
    let d = &c.diagram;
    let shape = d.shape();
    let n_obj = shape.object_count();
    // Compatible families by a plain filter over the full product, independent
    // of the pruned search used by `limit`.
    let sizes: Vec<usize> = d.objects().iter().map(FinSet::len).collect();
    let total = limits.checked_product("cone families", sizes.iter().copied())? as usize;
    let indexer = crate::finset::TupleIndexer::new(sizes);
    let families: Vec<Vec<usize>> = (0..total)
        .map(|k| indexer.decode(k))
        .filter(|t| {
            shape
                .arrows()
                .iter()
                .enumerate()
                .all(|(f, a)| d.arrow(f).apply(t[a.src]) == t[a.tgt])
        })
        .collect();
    let hits: Vec<u64> = families
        .iter()
        .map(|t| {
            (0..c.apex.len())
                .filter(|&w| (0..n_obj).all(|j| c.legs[j].apply(w) == t[j]))
                .count() as u64
        })
        .collect();
    let n = apex.len();
    limits.checked_pow("candidate cones", families.len(), n)?;
    let mut pick = vec![0usize; n];
    loop {
        if n > 0 && families.is_empty() {
            return Ok(None);
        }
        bump(counter, limits)?;
        let mediators = pick.iter().fold(1u64, |acc, &i| acc * hits[i]);
        if mediators != 1 {
            let legs = (0..n_obj)
                .map(|j| pick.iter().map(|&i| families[i][j]).collect())
                .collect();
            return Ok(Some((legs, mediators)));
        }
        // Advance the odometer over families^n.
        let mut k = 0;
        while k < n {
            pick[k] += 1;
            if pick[k] < families.len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
        if k == n {
            return Ok(None);
        }
    }
}

fn check_under_cones(
    c: &Cone,
    nadir: &FinSet,
    limits: &Limits,
    counter: &mut u64,
) -> Result<Witness> {
    let d = &c.diagram;
    let shape = d.shape();
    let offsets = tagged_offsets(d);
    let total = *offsets.last().unwrap_or(&0);
    let n = nadir.len();
    // Constraints closed at each tagged position: for
    // f: j → k and x ∈ D(j), leg_k(D(f)(x)) = leg_j(x). Each constraint is
    // checked once both tagged positions are assigned.
    let mut closes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); total];
    for (f, a) in shape.arrows().iter().enumerate() {
        for x in 0..d.object(a.src).len() {
            let p = offsets[a.src] + x;
            let q = offsets[a.tgt] + d.arrow(f).apply(x);
            closes[p.max(q)].push((p, q));
        }
    }
    let cocone_legs = |assign: &[usize]| -> Vec<Vec<usize>> {
        (0..shape.object_count())
            .map(|j| assign[offsets[j]..offsets[j + 1]].to_vec())
            .collect()
    };

    let mut assign = vec![0usize; total];
    let mut result: Witness = None;

    fn go(
        p: usize,
        n: usize,
        assign: &mut Vec<usize>,
        closes: &[Vec<(usize, usize)>],
        on_complete: &mut dyn FnMut(&[usize]) -> Result<bool>,
    ) -> Result<bool> {
        if p == assign.len() {
            return on_complete(assign);
        }
        for y in 0..n {
            assign[p] = y;
            if closes[p].iter().all(|&(a, b)| assign[a] == assign[b])
                && go(p + 1, n, assign, closes, on_complete)?
            {
                return Ok(true);
            }
        }
        Ok(false)
    }

    let mut on_complete = |assign: &[usize]| -> Result<bool> {
        bump(counter, limits)?;
        let mut allowed: Vec<Option<usize>> = vec![None; c.apex.len()];
        let mut conflict = vec![false; c.apex.len()];
        for j in 0..shape.object_count() {
            for x in 0..d.object(j).len() {
                let w = c.legs[j].apply(x);
                let y = assign[offsets[j] + x];
                match allowed[w] {
                    None => allowed[w] = Some(y),
                    Some(prev) if prev != y => conflict[w] = true,
                    _ => {}
                }
            }
        }
        let mediators = (0..c.apex.len()).fold(1u64, |acc, w| {
            let k = if conflict[w] {
                0
            } else if allowed[w].is_some() {
                1
            } else {
                n as u64
            };
            acc.saturating_mul(k)
        });
        if mediators != 1 {
            result = Some((cocone_legs(assign), mediators));
            return Ok(true);
        }
        Ok(false)
    };
    go(0, n, &mut assign, &closes, &mut on_complete)?;
    Ok(result)
}
