//! On-disk JSON documents. Every document carries a `kind` discriminator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    Set(SetDoc),
    Category(CategoryDoc),
    Presheaf(PresheafDoc),
    Morphism(MorphismDoc),
    Subobject(SubobjectDoc),
    Graph(GraphDoc),
    Subgraph(SubgraphDoc),
    Diagram(DiagramDoc),
    Scm(ScmDoc),
    Topology(TopologyDoc),
    Formula(FormulaDoc),
}

impl Document {
    pub fn name(&self) -> &str {
        match self {
            Document::Set(d) => &d.name,
            Document::Category(d) => &d.name,
            Document::Presheaf(d) => &d.name,
            Document::Morphism(d) => &d.name,
            Document::Subobject(d) => &d.name,
            Document::Graph(d) => &d.name,
            Document::Subgraph(d) => &d.name,
            Document::Diagram(d) => &d.name,
            Document::Scm(d) => &d.name,
            Document::Topology(d) => &d.name,
            Document::Formula(d) => &d.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Set(_) => "set",
            Document::Category(_) => "category",
            Document::Presheaf(_) => "presheaf",
            Document::Morphism(_) => "morphism",
            Document::Subobject(_) => "subobject",
            Document::Graph(_) => "graph",
            Document::Subgraph(_) => "subgraph",
            Document::Diagram(_) => "diagram",
            Document::Scm(_) => "scm",
            Document::Topology(_) => "topology",
            Document::Formula(_) => "formula",
        }
    }

    /// Load order: a document only refers to kinds of lower rank.
    pub(crate) fn rank(&self) -> u8 {
        match self {
            Document::Set(_) => 0,
            Document::Category(_) => 1,
            Document::Presheaf(_)
            | Document::Graph(_)
            | Document::Diagram(_)
            | Document::Scm(_) => 2,
            Document::Topology(_)
            | Document::Morphism(_)
            | Document::Subobject(_)
            | Document::Subgraph(_) => 3,
            Document::Formula(_) => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDoc {
    pub name: String,
    pub elements: Vec<String>,
}

/// Elements listed inline or taken from a named `set` document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Elements {
    Named(String),
    Inline(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowDoc {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// A finite category, presented in one of three ways: the free category on
/// `generators`, the poset generated by `leq`, or explicit non-identity
/// `arrows` with a `composition` table of `[g, f, g∘f]` rows. Identities
/// are named `id_<object>` and need not be listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDoc {
    pub name: String,
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<ArrowDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leq: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arrows: Vec<ArrowDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub composition: Vec<(String, String, String)>,
}

/// A map between element names.
pub type Table = BTreeMap<String, String>;

/// A presheaf on `base`. `restrictions[f]` sends elements over the target of
/// `f` to elements over its source; arrows not listed are composites or
/// identities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafDoc {
    pub name: String,
    pub base: String,
    pub stalks: BTreeMap<String, Elements>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, Table>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub name: String,
    pub source: String,
    pub target: String,
    pub components: BTreeMap<String, Table>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubobjectDoc {
    pub name: String,
    pub parent: String,
    pub members: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<ArrowDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphDoc {
    pub name: String,
    pub parent: String,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<String>,
}

/// A covariant diagram of sets on `shape`, given on generating arrows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub name: String,
    pub shape: String,
    pub sets: BTreeMap<String, Elements>,
    #[serde(default)]
    pub arrows: BTreeMap<String, Table>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDoc {
    pub name: String,
    pub domain: Vec<String>,
}

/// `table` is keyed by the parent values joined with commas, in `parents`
/// order; a mechanism without parents uses the key `""`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismDoc {
    pub var: String,
    #[serde(default)]
    pub parents: Vec<String>,
    pub table: Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScmDoc {
    pub name: String,
    pub exogenous: Vec<VariableDoc>,
    pub endogenous: Vec<VariableDoc>,
    pub mechanisms: Vec<MechanismDoc>,
}

/// Covering sieves by arrow names, or a `preset` of `trivial` or `degenerate`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyDoc {
    pub name: String,
    pub base: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub covers: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowBinding {
    pub morphism: String,
    pub dom: String,
    pub cod: String,
}

/// A formula over the topos of presheaves on `base`. `objects` names the
/// presheaves (or causal models, on the interval base) that interpret each
/// base type; `term` is an s-expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaDoc {
    pub name: String,
    pub base: String,
    #[serde(default)]
    pub objects: BTreeMap<String, String>,
    #[serde(default)]
    pub arrows: BTreeMap<String, ArrowBinding>,
    #[serde(default)]
    pub context: Vec<(String, String)>,
    pub term: String,
}
