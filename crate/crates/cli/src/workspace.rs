//! Loading, validating and re-serializing collections of documents.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::value::RawValue;

use tcm_core::fincat::{shapes, FinCategory, SetDiagram};
use tcm_core::finset::{FinFunction, FinSet};
use tcm_core::graphtopos::{self, FinGraph, SubGraph};
use tcm_core::logic::term::{Term, Type};
use tcm_core::logic::{parse_term, parse_type, typecheck, Context as LogicContext, Topos};
use tcm_core::presheaf::{
    check_topology, GrothendieckTopology, Presheaf, PresheafMorphism, Sieve, SubPresheaf,
};
use tcm_core::tcm::{self, CausalModel};
use tcm_core::Limits;

use crate::error::{CliError, Issue, Result};
use crate::schema::*;

/// Names accepted wherever a base category or diagram shape is expected.
pub const BUILTIN_BASES: [&str; 8] = [
    "terminal",
    "interval",
    "graph",
    "pullback",
    "pushout",
    "parallel-pair",
    "idempotent",
    "vee",
];

fn builtin(name: &str) -> Option<Arc<FinCategory>> {
    Some(match name {
        "terminal" => Arc::new(shapes::terminal()),
        "interval" => tcm::interval_base(),
        "graph" => graphtopos::graph_base(),
        "pullback" => Arc::new(shapes::pullback()),
        "pushout" => Arc::new(shapes::pushout()),
        "parallel-pair" => Arc::new(shapes::parallel_pair()),
        "idempotent" => Arc::new(shapes::idempotent()),
        "vee" => Arc::new(shapes::vee()),
        _ => return None,
    })
}

/// A formula document together with its topos, context and parsed term.
pub struct CompiledFormula {
    pub topos: Topos,
    pub context: Vec<(String, Type)>,
    pub term: Term,
}

/// Every document of a load, with the objects they denote.
#[derive(Default)]
pub struct Workspace {
    limits: Limits,
    documents: BTreeMap<String, Document>,
    bases: BTreeMap<String, Arc<FinCategory>>,
    sets: BTreeMap<String, FinSet>,
    presheaves: BTreeMap<String, Presheaf>,
    morphisms: BTreeMap<String, PresheafMorphism>,
    subobjects: BTreeMap<String, SubPresheaf>,
    graphs: BTreeMap<String, FinGraph>,
    subgraphs: BTreeMap<String, SubGraph>,
    diagrams: BTreeMap<String, SetDiagram>,
    models: BTreeMap<String, CausalModel>,
    topologies: BTreeMap<String, GrothendieckTopology>,
    formulas: BTreeMap<String, CompiledFormula>,
}

/// Parses a file holding one document or an array of them, or every `.json`
/// file directly inside a directory, in name order.
pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(read_documents(&f)?);
        }
        return Ok(out);
    }
    let text = fs::read_to_string(path).map_err(io)?;
    parse_documents(&text, path)
}

pub fn parse_documents(text: &str, path: &Path) -> Result<Vec<Document>> {
    // Errors inside a tagged document carry no position; fall back to where the document starts.
    let located = |offset: usize, e: serde_json::Error| {
        let before = &text[..offset];
        let line0 = before.matches('\n').count() + 1;
        let col0 = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        let (line, col) = match e.line() {
            0 => (line0, col0),
            1 => (line0, col0 + e.column() - 1),
            l => (line0 + l - 1, e.column()),
        };
        let full = e.to_string();
        let msg = full
            .rsplit_once(" at line ")
            .map_or(full.as_str(), |(m, _)| m)
            .to_string();
        CliError::Parse {
            file: path.to_path_buf(),
            line,
            col,
            msg,
        }
    };
    let start = text.len() - text.trim_start().len();
    if !text[start..].starts_with('[') {
        return serde_json::from_str::<Document>(text)
            .map(|d| vec![d])
            .map_err(|e| located(start, e));
    }
    let raws: Vec<&RawValue> = serde_json::from_str(text).map_err(|e| located(0, e))?;
    raws.iter()
        .map(|raw| {
            let offset = raw.get().as_ptr() as usize - text.as_ptr() as usize;
            serde_json::from_str::<Document>(raw.get()).map_err(|e| located(offset, e))
        })
        .collect()
}

/// Why one document failed to compile.
enum Failure {
    Invalid(String),
    /// An enumeration cap was hit; this aborts the whole load.
    Size(tcm_core::Error),
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure::Invalid(msg)
    }
}

fn failure(context: impl Into<String>) -> impl FnOnce(tcm_core::Error) -> Failure {
    let context = context.into();
    move |e| match e {
        tcm_core::Error::SizeLimit { .. } => Failure::Size(e),
        other => Failure::Invalid(format!("{context}{other}")),
    }
}

fn pairs(table: &Table) -> impl Iterator<Item = (&str, &str)> {
    table.iter().map(|(a, b)| (a.as_str(), b.as_str()))
}

impl Workspace {
    pub fn load(path: &Path, limits: Limits) -> Result<Self> {
        Self::from_documents(read_documents(path)?, limits)
    }

    pub fn load_all(paths: &[PathBuf], limits: Limits) -> Result<Self> {
        let mut docs = Vec::new();
        for p in paths {
            docs.extend(read_documents(p)?);
        }
        Self::from_documents(docs, limits)
    }

    /// Validates every document, collecting all failures.
    pub fn from_documents(docs: Vec<Document>, limits: Limits) -> Result<Self> {
        let mut ws = Workspace {
            limits,
            ..Workspace::default()
        };
        let mut issues = Vec::new();
        let mut sorted = docs;
        sorted.sort_by_key(|d| d.rank());
        for doc in sorted {
            let issue = |message: String| Issue {
                kind: doc.kind().into(),
                name: doc.name().into(),
                message,
            };
            if ws.documents.contains_key(doc.name()) || builtin(doc.name()).is_some() {
                issues.push(issue("name is already taken".into()));
                continue;
            }
            match ws.compile(&doc) {
                Ok(()) => {
                    ws.documents.insert(doc.name().to_string(), doc);
                }
                Err(Failure::Invalid(msg)) => issues.push(issue(msg)),
                Err(Failure::Size(e)) => {
                    return Err(CliError::core(
                        format!("{} `{}`", doc.kind(), doc.name()),
                        e,
                    ))
                }
            }
        }
        if issues.is_empty() {
            Ok(ws)
        } else {
            Err(CliError::Validation { issues })
        }
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.documents.values()
    }

    /// All documents as one JSON array, ordered by load rank and then name.
    pub fn to_json(&self) -> String {
        let mut docs: Vec<&Document> = self.documents.values().collect();
        docs.sort_by(|a, b| (a.rank(), a.name()).cmp(&(b.rank(), b.name())));
        serde_json::to_string_pretty(&docs).expect("documents serialize")
    }

    pub fn base(&self, name: &str) -> std::result::Result<Arc<FinCategory>, String> {
        if let Some(b) = self.bases.get(name) {
            return Ok(b.clone());
        }
        builtin(name).ok_or_else(|| {
            format!(
                "unknown base `{name}`; use a category document or one of {}",
                BUILTIN_BASES.join(", ")
            )
        })
    }

    fn elements(&self, e: &Elements, name: String) -> std::result::Result<FinSet, String> {
        let s = match e {
            Elements::Inline(xs) => FinSet::ordered(name, xs.clone()),
            Elements::Named(n) => {
                return self
                    .sets
                    .get(n)
                    .map(|s| s.renamed(name))
                    .ok_or_else(|| format!("unknown set `{n}`"))
            }
        };
        s.map_err(|e| e.to_string())
    }

    fn compile(&mut self, doc: &Document) -> std::result::Result<(), Failure> {
        let err = |e: tcm_core::Error| e.to_string();
        match doc {
            Document::Set(d) => {
                self.sets.insert(
                    d.name.clone(),
                    FinSet::ordered(d.name.clone(), d.elements.clone()).map_err(err)?,
                );
            }
            Document::Category(d) => {
                let c = compile_category(d)?;
                self.bases.insert(d.name.clone(), Arc::new(c));
            }
            Document::Presheaf(d) => {
                let base = self.base(&d.base)?;
                let p = self.compile_presheaf(d, &base)?;
                self.presheaves.insert(d.name.clone(), p);
            }
            Document::Graph(d) => {
                let edges: Vec<(String, String, String)> = d
                    .edges
                    .iter()
                    .map(|e| (e.name.clone(), e.src.clone(), e.tgt.clone()))
                    .collect();
                self.graphs.insert(
                    d.name.clone(),
                    FinGraph::from_edges(&d.vertices, &edges).map_err(err)?,
                );
            }
            Document::Diagram(d) => {
                let shape = self.base(&d.shape)?;
                let sets = (0..shape.object_count())
                    .map(|j| {
                        let o = shape.object_name(j);
                        let e = d
                            .sets
                            .get(o)
                            .ok_or_else(|| format!("no set for object `{o}`"))?;
                        self.elements(e, format!("{}({o})", d.name))
                    })
                    .collect::<std::result::Result<Vec<_>, String>>()?;
                let mut gens = Vec::new();
                for (a, table) in &d.arrows {
                    let f = shape.arrow(a).map_err(err)?;
                    let tf = FinFunction::from_pairs(
                        sets[shape.src(f)].clone(),
                        sets[shape.tgt(f)].clone(),
                        pairs(table),
                    )
                    .map_err(|e| format!("arrow `{a}`: {e}"))?;
                    gens.push((a.as_str(), tf));
                }
                let diagram = SetDiagram::on_free_shape(shape, sets, &gens).map_err(err)?;
                let report = diagram.validate().map_err(err)?;
                if !report.is_ok() {
                    return Err(format!("{:?}", report.violations).into());
                }
                self.diagrams.insert(d.name.clone(), diagram);
            }
            Document::Scm(d) => {
                let model = compile_scm(d)?;
                model.topological_order().map_err(err)?;
                self.models.insert(d.name.clone(), model);
            }
            Document::Topology(d) => {
                let base = self.base(&d.base)?;
                let j = match d.preset.as_deref() {
                    Some("trivial") => GrothendieckTopology::trivial(&base),
                    Some("degenerate") => GrothendieckTopology::degenerate(&base).map_err(err)?,
                    Some(other) => return Err(format!("unknown preset `{other}`").into()),
                    None => {
                        let covers = (0..base.object_count())
                            .map(|x| {
                                let listed = d
                                    .covers
                                    .get(base.object_name(x))
                                    .map(Vec::as_slice)
                                    .unwrap_or_default();
                                listed
                                    .iter()
                                    .map(|names| Sieve::from_names(&base, x, names))
                                    .collect::<tcm_core::Result<Vec<_>>>()
                            })
                            .collect::<tcm_core::Result<Vec<_>>>()
                            .map_err(err)?;
                        GrothendieckTopology::new(base, covers).map_err(err)?
                    }
                };
                let report = check_topology(&j).map_err(err)?;
                if !report.is_ok() {
                    let v: Vec<String> =
                        report.violations.iter().map(|v| format!("{v:?}")).collect();
                    return Err(format!("not a Grothendieck topology: {}", v.join("; ")).into());
                }
                self.topologies.insert(d.name.clone(), j);
            }
            Document::Morphism(d) => {
                let (s, t) = (
                    self.presheaf(&d.source).map_err(|e| e.to_string())?,
                    self.presheaf(&d.target).map_err(|e| e.to_string())?,
                );
                let base = s.base().clone();
                let comps = (0..base.object_count())
                    .map(|c| {
                        let o = base.object_name(c);
                        let empty = Table::new();
                        let table = d.components.get(o).unwrap_or(&empty);
                        FinFunction::from_pairs(s.at(c).clone(), t.at(c).clone(), pairs(table))
                            .map(|f| f.table().to_vec())
                            .map_err(|e| format!("component at `{o}`: {e}"))
                    })
                    .collect::<std::result::Result<Vec<_>, String>>()?;
                let m = PresheafMorphism::new(s.clone(), t.clone(), comps).map_err(err)?;
                self.morphisms.insert(d.name.clone(), m);
            }
            Document::Subobject(d) => {
                let p = self.presheaf(&d.parent).map_err(|e| e.to_string())?.clone();
                let base = p.base().clone();
                if let Some(bad) = d.members.keys().find(|o| base.object(o).is_err()) {
                    return Err(format!("unknown object `{bad}`").into());
                }
                let members: Vec<Vec<String>> = (0..base.object_count())
                    .map(|c| {
                        d.members
                            .get(base.object_name(c))
                            .cloned()
                            .unwrap_or_default()
                    })
                    .collect();
                self.subobjects.insert(
                    d.name.clone(),
                    SubPresheaf::from_atoms(p, &members).map_err(err)?,
                );
            }
            Document::Subgraph(d) => {
                let g = self.graph(&d.parent).map_err(|e| e.to_string())?.clone();
                self.subgraphs.insert(
                    d.name.clone(),
                    SubGraph::from_atoms(g, &d.vertices, &d.edges).map_err(err)?,
                );
            }
            Document::Formula(d) => {
                let f = self.compile_formula(d)?;
                self.formulas.insert(d.name.clone(), f);
            }
        }
        Ok(())
    }

    fn compile_presheaf(
        &self,
        d: &PresheafDoc,
        base: &Arc<FinCategory>,
    ) -> std::result::Result<Presheaf, String> {
        if let Some(bad) = d.stalks.keys().find(|o| base.object(o).is_err()) {
            return Err(format!("unknown object `{bad}` in stalks"));
        }
        let at = (0..base.object_count())
            .map(|c| {
                let o = base.object_name(c);
                match d.stalks.get(o) {
                    Some(e) => self.elements(e, format!("{}({o})", d.name)),
                    None => Ok(FinSet::empty(format!("{}({o})", d.name))),
                }
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        let mut gens = Vec::new();
        for (a, table) in &d.restrictions {
            let f = base.arrow(a).map_err(|e| e.to_string())?;
            let r = FinFunction::from_pairs(
                at[base.tgt(f)].clone(),
                at[base.src(f)].clone(),
                pairs(table),
            )
            .map_err(|e| format!("restriction along `{a}`: {e}"))?;
            gens.push((a.as_str(), r));
        }
        Presheaf::from_generators(base.clone(), at, &gens).map_err(|e| e.to_string())
    }

    fn compile_formula(&self, d: &FormulaDoc) -> std::result::Result<CompiledFormula, Failure> {
        let base = self.base(&d.base)?;
        let mut topos = Topos::new(base, self.limits).map_err(failure(""))?;
        for (ty, obj) in &d.objects {
            if let Some(p) = self.presheaves.get(obj) {
                topos
                    .add_object(ty, p.clone())
                    .map_err(failure(format!("object `{ty}`: ")))?;
            } else if let Some(m) = self.models.get(obj) {
                let solved =
                    tcm::solve(m, &self.limits).map_err(failure(format!("model `{obj}`: ")))?;
                topos
                    .add_model(ty, solved)
                    .map_err(failure(format!("model `{ty}`: ")))?;
            } else {
                return Err(format!(
                    "`{ty}` refers to `{obj}`, which is neither a presheaf nor a causal model"
                )
                .into());
            }
        }
        for (name, a) in &d.arrows {
            let m = self
                .morphisms
                .get(&a.morphism)
                .ok_or_else(|| format!("unknown morphism `{}`", a.morphism))?;
            let dom = parse_type(&a.dom).map_err(failure(""))?;
            let cod = parse_type(&a.cod).map_err(failure(""))?;
            topos
                .add_arrow(name, dom, cod, m.clone())
                .map_err(failure(format!("arrow `{name}`: ")))?;
        }
        let context = d
            .context
            .iter()
            .map(|(v, ty)| {
                Ok((
                    v.clone(),
                    parse_type(ty).map_err(failure(format!("type of `{v}`: ")))?,
                ))
            })
            .collect::<std::result::Result<Vec<_>, Failure>>()?;
        let term = parse_term(&d.term, &context).map_err(failure(""))?;
        let ctx = LogicContext::new(&topos, context.clone()).map_err(failure(""))?;
        ctx.covers(&term).map_err(failure(""))?;
        let typed = typecheck(&topos, &term).map_err(failure(""))?;
        if !typed.is_formula() {
            return Err(format!("term has type {}, not Ω", typed.ty).into());
        }
        Ok(CompiledFormula {
            topos,
            context,
            term,
        })
    }

    fn lookup<'a, T>(
        map: &'a BTreeMap<String, T>,
        kind: &'static str,
        name: &str,
    ) -> Result<&'a T> {
        map.get(name).ok_or_else(|| CliError::UnknownName {
            kind,
            name: name.into(),
        })
    }

    pub fn set(&self, name: &str) -> Result<&FinSet> {
        Self::lookup(&self.sets, "set", name)
    }

    pub fn presheaf(&self, name: &str) -> Result<&Presheaf> {
        Self::lookup(&self.presheaves, "presheaf", name)
    }

    pub fn morphism(&self, name: &str) -> Result<&PresheafMorphism> {
        Self::lookup(&self.morphisms, "morphism", name)
    }

    pub fn subobject(&self, name: &str) -> Result<&SubPresheaf> {
        Self::lookup(&self.subobjects, "subobject", name)
    }

    pub fn graph(&self, name: &str) -> Result<&FinGraph> {
        Self::lookup(&self.graphs, "graph", name)
    }

    pub fn subgraph(&self, name: &str) -> Result<&SubGraph> {
        Self::lookup(&self.subgraphs, "subgraph", name)
    }

    pub fn diagram(&self, name: &str) -> Result<&SetDiagram> {
        Self::lookup(&self.diagrams, "diagram", name)
    }

    pub fn model(&self, name: &str) -> Result<&CausalModel> {
        Self::lookup(&self.models, "scm", name)
    }

    pub fn topology(&self, name: &str) -> Result<&GrothendieckTopology> {
        Self::lookup(&self.topologies, "topology", name)
    }

    pub fn formula(&self, name: &str) -> Result<&CompiledFormula> {
        Self::lookup(&self.formulas, "formula", name)
    }

    pub fn document(&self, name: &str) -> Option<&Document> {
        self.documents.get(name)
    }
}

fn compile_category(d: &CategoryDoc) -> std::result::Result<FinCategory, String> {
    let err = |e: tcm_core::Error| e.to_string();
    let objs: Vec<&str> = d.objects.iter().map(String::as_str).collect();
    let used = [
        !d.generators.is_empty(),
        !d.leq.is_empty(),
        !d.arrows.is_empty(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if used > 1 {
        return Err("give only one of `generators`, `leq` or `arrows`".into());
    }
    if !d.leq.is_empty() {
        let leq: Vec<(&str, &str)> = d
            .leq
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        return FinCategory::poset(d.name.clone(), &objs, &leq).map_err(err);
    }
    if d.arrows.is_empty() {
        let gens: Vec<(&str, &str, &str)> = d
            .generators
            .iter()
            .map(|a| (a.name.as_str(), a.src.as_str(), a.tgt.as_str()))
            .collect();
        return FinCategory::free(d.name.clone(), &objs, &gens).map_err(err);
    }
    let id = |o: &str| format!("id_{o}");
    let mut arrows: Vec<(String, String, String)> = d
        .objects
        .iter()
        .map(|o| (id(o), o.clone(), o.clone()))
        .collect();
    arrows.extend(
        d.arrows
            .iter()
            .map(|a| (a.name.clone(), a.src.clone(), a.tgt.clone())),
    );
    let identities = d.objects.iter().map(|o| (o.clone(), id(o))).collect();
    let mut composition: Vec<(String, String, String)> = Vec::new();
    for (name, s, t) in &arrows {
        composition.push((id(t), name.clone(), name.clone()));
        if id(s) != *name {
            composition.push((name.clone(), id(s), name.clone()));
        }
    }
    composition.extend(d.composition.iter().cloned());
    FinCategory::checked(
        d.name.clone(),
        d.objects.clone(),
        arrows,
        identities,
        composition,
    )
    .map_err(err)
}

fn compile_scm(d: &ScmDoc) -> std::result::Result<CausalModel, String> {
    let mut b = CausalModel::builder(&d.name);
    for v in &d.exogenous {
        let dom: Vec<&str> = v.domain.iter().map(String::as_str).collect();
        b = b.exogenous(&v.name, &dom);
    }
    for v in &d.endogenous {
        let dom: Vec<&str> = v.domain.iter().map(String::as_str).collect();
        b = b.endogenous(&v.name, &dom);
    }
    for m in &d.mechanisms {
        let keys: Vec<Vec<&str>> = m
            .table
            .keys()
            .map(|k| {
                if k.is_empty() {
                    Vec::new()
                } else {
                    k.split(',').map(str::trim).collect()
                }
            })
            .collect();
        let rows: Vec<(&[&str], &str)> = keys
            .iter()
            .zip(m.table.values())
            .map(|(k, v)| (k.as_slice(), v.as_str()))
            .collect();
        let parents: Vec<&str> = m.parents.iter().map(String::as_str).collect();
        b = b.mechanism_rows(&m.var, &parents, &rows);
    }
    b.build().map_err(|e| e.to_string())
}
