//! Directed graphs as presheaves on `s, t: V → E`.
//!
//! A graph restricts each edge to its source along `s` and to its target
//! along `t`. The classifier has two vertex values `0_V`, `V` and five edge
//! values `0_E`, `s`, `t`, `st`, `1_E`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::fincat::{self, shapes, Cone, FinCategory, SetDiagram};
use crate::finset::{FinFunction, FinSet};
use crate::presheaf::{
    self, heyting, omega, HeytingOp, Omega, Presheaf, PresheafMorphism, SubPresheaf,
};
use crate::{Error, Limits, Result};

const V: usize = 0;
const E: usize = 1;

pub fn graph_base() -> Arc<FinCategory> {
    Arc::new(shapes::graph_base())
}

/// The same base with `s, t: E → V`, for reading graphs as covariant functors.
pub fn covariant_base() -> Arc<FinCategory> {
    Arc::new(shapes::graph_base().opposite())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGraph {
    pub vertices: FinSet,
    pub edges: FinSet,
    pub src: FinFunction,
    pub tgt: FinFunction,
}

impl FinGraph {
    pub fn new(
        vertices: FinSet,
        edges: FinSet,
        src: FinFunction,
        tgt: FinFunction,
    ) -> Result<Self> {
        for (name, f) in [("src", &src), ("tgt", &tgt)] {
            if !f.dom().same_elements(&edges) || !f.cod().same_elements(&vertices) {
                return Err(Error::DomainMismatch {
                    expected: "edges → vertices".into(),
                    found: format!("{name}: {f:?}"),
                });
            }
        }
        Ok(FinGraph {
            vertices,
            edges,
            src,
            tgt,
        })
    }

    /// Edges as `(id, src, tgt)`.
    pub fn from_edges<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Self> {
        let vs = FinSet::new("V", vertices.iter().map(|v| v.as_ref().to_string()))?;
        let es = FinSet::new("E", edges.iter().map(|e| e.0.as_ref().to_string()))?;
        let src = FinFunction::from_pairs(
            es.clone(),
            vs.clone(),
            edges.iter().map(|e| (e.0.as_ref(), e.1.as_ref())),
        )?;
        let tgt = FinFunction::from_pairs(
            es.clone(),
            vs.clone(),
            edges.iter().map(|e| (e.0.as_ref(), e.2.as_ref())),
        )?;
        FinGraph::new(vs, es, src, tgt)
    }

    pub fn empty() -> Self {
        let none = FinSet::empty("V");
        FinGraph {
            vertices: none.clone(),
            edges: FinSet::empty("E"),
            src: FinFunction::empty(&none),
            tgt: FinFunction::empty(&none),
        }
    }

    /// Edges as `(id, src, tgt)` atoms.
    pub fn edge_triples(&self) -> Vec<(&str, &str, &str)> {
        (0..self.edges.len())
            .map(|e| {
                (
                    self.edges.atom(e),
                    self.vertices.atom(self.src.apply(e)),
                    self.vertices.atom(self.tgt.apply(e)),
                )
            })
            .collect()
    }

    pub fn as_presheaf(&self) -> Presheaf {
        Presheaf::from_generators(
            graph_base(),
            vec![self.vertices.clone(), self.edges.clone()],
            &[("s", self.src.clone()), ("t", self.tgt.clone())],
        )
        .expect("a typed graph is a presheaf")
    }

    pub fn from_presheaf(p: &Presheaf) -> Result<Self> {
        let base = p.base();
        let (v, e) = (base.object("V")?, base.object("E")?);
        let (s, t) = (base.arrow("s")?, base.arrow("t")?);
        if base.src(s) != v || base.tgt(s) != e || base.src(t) != v || base.tgt(t) != e {
            return Err(Error::InvalidShape("expected s, t: V → E".into()));
        }
        FinGraph::new(
            p.at(v).clone(),
            p.at(e).clone(),
            p.restriction(s).clone(),
            p.restriction(t).clone(),
        )
    }

    /// The graph as a functor on [`covariant_base`]: objects and arrow images.
    pub fn as_covariant_diagram(&self) -> Result<SetDiagram> {
        SetDiagram::on_free_shape(
            covariant_base(),
            vec![self.vertices.clone(), self.edges.clone()],
            &[("s", self.src.clone()), ("t", self.tgt.clone())],
        )
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n");
        for v in self.vertices.elements() {
            let _ = writeln!(out, "  \"{v}\";");
        }
        for (e, s, t) in self.edge_triples() {
            let _ = writeln!(out, "  \"{s}\" -> \"{t}\" [label=\"{e}\"];");
        }
        out.push_str("}\n");
        out
    }
}

/// A graph homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphHom {
    pub source: FinGraph,
    pub target: FinGraph,
    pub vertex_map: FinFunction,
    pub edge_map: FinFunction,
}

impl GraphHom {
    pub fn new(
        source: FinGraph,
        target: FinGraph,
        vertex_map: FinFunction,
        edge_map: FinFunction,
    ) -> Result<Self> {
        let hom = GraphHom {
            source,
            target,
            vertex_map,
            edge_map,
        };
        hom.check()?;
        Ok(hom)
    }

    pub fn identity(g: &FinGraph) -> Self {
        GraphHom {
            source: g.clone(),
            target: g.clone(),
            vertex_map: FinFunction::identity(&g.vertices),
            edge_map: FinFunction::identity(&g.edges),
        }
    }

    pub fn check(&self) -> Result<()> {
        let (a, b) = (&self.source, &self.target);
        if !self.vertex_map.dom().same_elements(&a.vertices)
            || !self.vertex_map.cod().same_elements(&b.vertices)
            || !self.edge_map.dom().same_elements(&a.edges)
            || !self.edge_map.cod().same_elements(&b.edges)
        {
            return Err(Error::DomainMismatch {
                expected: "maps between the graphs' vertices and edges".into(),
                found: format!("{self:?}"),
            });
        }
        for e in 0..a.edges.len() {
            let f = self.edge_map.apply(e);
            if self.vertex_map.apply(a.src.apply(e)) != b.src.apply(f)
                || self.vertex_map.apply(a.tgt.apply(e)) != b.tgt.apply(f)
            {
                return Err(Error::NotCommuting(format!(
                    "edge {} is not sent to an edge between the image endpoints",
                    a.edges.atom(e)
                )));
            }
        }
        Ok(())
    }

    pub fn as_presheaf_morphism(&self) -> PresheafMorphism {
        PresheafMorphism::new(
            self.source.as_presheaf(),
            self.target.as_presheaf(),
            vec![
                self.vertex_map.table().to_vec(),
                self.edge_map.table().to_vec(),
            ],
        )
        .expect("graph homomorphisms are natural")
    }

    pub fn from_presheaf_morphism(m: &PresheafMorphism) -> Result<Self> {
        let source = FinGraph::from_presheaf(m.source())?;
        let target = FinGraph::from_presheaf(m.target())?;
        let base = m.source().base();
        let (v, e) = (base.object("V")?, base.object("E")?);
        GraphHom::new(
            source,
            target,
            m.component_function(v),
            m.component_function(e),
        )
    }
}

pub fn graph_homs(g: &FinGraph, h: &FinGraph, limits: &Limits) -> Result<Vec<GraphHom>> {
    presheaf::homs(&g.as_presheaf(), &h.as_presheaf(), limits)?
        .iter()
        .map(GraphHom::from_presheaf_morphism)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubGraph {
    parent: FinGraph,
    vertices: BTreeSet<usize>,
    edges: BTreeSet<usize>,
}

impl SubGraph {
    pub fn new(
        parent: FinGraph,
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let edges: BTreeSet<usize> = edges.into_iter().collect();
        if let Some(&v) = vertices.iter().find(|&&v| v >= parent.vertices.len()) {
            return Err(Error::UnknownElement {
                set: "V".into(),
                atom: format!("#{v}"),
            });
        }
        if let Some(&e) = edges.iter().find(|&&e| e >= parent.edges.len()) {
            return Err(Error::UnknownElement {
                set: "E".into(),
                atom: format!("#{e}"),
            });
        }
        for &e in &edges {
            if !vertices.contains(&parent.src.apply(e)) || !vertices.contains(&parent.tgt.apply(e))
            {
                return Err(Error::NotClosed(format!(
                    "edge {} has an endpoint outside the subgraph",
                    parent.edges.atom(e)
                )));
            }
        }
        Ok(SubGraph {
            parent,
            vertices,
            edges,
        })
    }

    pub fn from_atoms<S: AsRef<str>>(
        parent: FinGraph,
        vertices: &[S],
        edges: &[S],
    ) -> Result<Self> {
        let vs = vertices
            .iter()
            .map(|v| parent.vertices.require(v.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let es = edges
            .iter()
            .map(|e| parent.edges.require(e.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        SubGraph::new(parent, vs, es)
    }

    pub fn full(parent: &FinGraph) -> Self {
        SubGraph {
            parent: parent.clone(),
            vertices: (0..parent.vertices.len()).collect(),
            edges: (0..parent.edges.len()).collect(),
        }
    }

    pub fn parent(&self) -> &FinGraph {
        &self.parent
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<usize> {
        &self.edges
    }

    pub fn is_full(&self) -> bool {
        self.vertices.len() == self.parent.vertices.len()
            && self.edges.len() == self.parent.edges.len()
    }

    /// The parent graph, with the parts outside the subgraph dashed.
    pub fn to_dot(&self, name: &str) -> String {
        let style = |inside: bool| {
            if inside {
                ""
            } else {
                " [style=dashed, color=gray]"
            }
        };
        let mut out = format!("digraph \"{name}\" {{\n");
        for (i, v) in self.parent.vertices.elements().iter().enumerate() {
            let _ = writeln!(out, "  \"{v}\"{};", style(self.vertices.contains(&i)));
        }
        for (i, (e, s, t)) in self.parent.edge_triples().into_iter().enumerate() {
            let extra = if self.edges.contains(&i) {
                String::new()
            } else {
                ", style=dashed, color=gray".into()
            };
            let _ = writeln!(out, "  \"{s}\" -> \"{t}\" [label=\"{e}\"{extra}];");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_subpresheaf(&self) -> SubPresheaf {
        SubPresheaf::new(
            self.parent.as_presheaf(),
            vec![self.vertices.clone(), self.edges.clone()],
        )
        .expect("subgraphs are closed")
    }

    pub fn from_subpresheaf(s: &SubPresheaf) -> Result<Self> {
        let parent = FinGraph::from_presheaf(s.parent())?;
        SubGraph::new(parent, s.members(V), s.members(E))
    }
}

pub fn subgraphs(g: &FinGraph, limits: &Limits) -> Result<Vec<SubGraph>> {
    presheaf::subobjects(&g.as_presheaf(), limits)?
        .iter()
        .map(SubGraph::from_subpresheaf)
        .collect()
}

pub fn subgraph_heyting(op: HeytingOp, a: &SubGraph, b: Option<&SubGraph>) -> Result<SubGraph> {
    let b = b.map(SubGraph::to_subpresheaf);
    SubGraph::from_subpresheaf(&heyting(op, &a.to_subpresheaf(), b.as_ref())?)
}

/// The classifier as a labelled graph, with the sieves behind each label.
#[derive(Debug, Clone)]
pub struct GraphOmega {
    pub graph: FinGraph,
    pub omega: Omega,
}

impl GraphOmega {
    pub fn vertex(&self, label: &str) -> usize {
        self.graph
            .vertices
            .index_of(label)
            .expect("classifier vertex label")
    }

    pub fn edge(&self, label: &str) -> usize {
        self.graph
            .edges
            .index_of(label)
            .expect("classifier edge label")
    }

    /// `(V, 1_E)`.
    pub fn true_point(&self) -> (usize, usize) {
        (self.vertex("V"), self.edge("1_E"))
    }
}

fn edge_label(base: &FinCategory, arrows: &BTreeSet<usize>) -> &'static str {
    let names: BTreeSet<&str> = arrows.iter().map(|&f| base.arrow_name(f)).collect();
    match (
        names.contains("1_E"),
        names.contains("s"),
        names.contains("t"),
    ) {
        (true, _, _) => "1_E",
        (false, true, true) => "st",
        (false, true, false) => "s",
        (false, false, true) => "t",
        (false, false, false) => "0_E",
    }
}

pub fn graph_omega() -> Result<GraphOmega> {
    let base = graph_base();
    let om = omega(&base)?;
    let vlabels: Vec<&str> = (0..om.len(V))
        .map(|i| if om.is_top(V, i) { "V" } else { "0_V" })
        .collect();
    let elabels: Vec<&str> = om
        .sieves(E)
        .iter()
        .map(|s| edge_label(&base, &s.arrows))
        .collect();
    let vs = FinSet::ordered("Ω_V", vlabels)?;
    let es = FinSet::ordered("Ω_E", elabels)?;
    let (s, t) = (base.arrow("s")?, base.arrow("t")?);
    let src = FinFunction::new(
        es.clone(),
        vs.clone(),
        (0..om.len(E)).map(|i| om.restrict(s, i)).collect(),
    )?;
    let tgt = FinFunction::new(
        es.clone(),
        vs.clone(),
        (0..om.len(E)).map(|i| om.restrict(t, i)).collect(),
    )?;
    Ok(GraphOmega {
        graph: FinGraph::new(vs, es, src, tgt)?,
        omega: om,
    })
}

/// The characteristic homomorphism of a subgraph, by cases on each edge.
pub fn classify_subgraph(s: &SubGraph, om: &GraphOmega) -> GraphHom {
    let g = &s.parent;
    let vertex_map = (0..g.vertices.len())
        .map(|v| om.vertex(if s.vertices.contains(&v) { "V" } else { "0_V" }))
        .collect();
    let edge_map = (0..g.edges.len())
        .map(|e| {
            let label = if s.edges.contains(&e) {
                "1_E"
            } else {
                match (
                    s.vertices.contains(&g.src.apply(e)),
                    s.vertices.contains(&g.tgt.apply(e)),
                ) {
                    (true, true) => "st",
                    (true, false) => "s",
                    (false, true) => "t",
                    (false, false) => "0_E",
                }
            };
            om.edge(label)
        })
        .collect();
    GraphHom {
        source: g.clone(),
        target: om.graph.clone(),
        vertex_map: FinFunction::new(g.vertices.clone(), om.graph.vertices.clone(), vertex_map)
            .expect("vertex classification"),
        edge_map: FinFunction::new(g.edges.clone(), om.graph.edges.clone(), edge_map)
            .expect("edge classification"),
    }
}

/// Pullback of `(V, 1_E)` along a homomorphism into the classifier.
pub fn classified_subgraph(chi: &GraphHom, om: &GraphOmega) -> Result<SubGraph> {
    if chi.target != om.graph {
        return Err(Error::DomainMismatch {
            expected: "a map into Ω".into(),
            found: format!("{:?}", chi.target),
        });
    }
    let (tv, te) = om.true_point();
    let vs = (0..chi.source.vertices.len()).filter(|&v| chi.vertex_map.apply(v) == tv);
    let es = (0..chi.source.edges.len()).filter(|&e| chi.edge_map.apply(e) == te);
    SubGraph::new(chi.source.clone(), vs, es)
}

/// A diagram of graphs: one set diagram for vertices and one for edges.
#[derive(Debug, Clone)]
pub struct GraphDiagram {
    pub graphs: Vec<FinGraph>,
    pub vertices: SetDiagram,
    pub edges: SetDiagram,
}

impl GraphDiagram {
    /// Homomorphisms given for the generators of a free shape.
    pub fn on_free_shape(
        shape: Arc<FinCategory>,
        graphs: Vec<FinGraph>,
        generators: &[(&str, GraphHom)],
    ) -> Result<Self> {
        for (name, h) in generators {
            let f = shape.arrow(name)?;
            if h.source != graphs[shape.src(f)] || h.target != graphs[shape.tgt(f)] {
                return Err(Error::InvalidDiagram(format!(
                    "{name} does not connect the assigned graphs"
                )));
            }
        }
        let vgens: Vec<(&str, FinFunction)> = generators
            .iter()
            .map(|(n, h)| (*n, h.vertex_map.clone()))
            .collect();
        let egens: Vec<(&str, FinFunction)> = generators
            .iter()
            .map(|(n, h)| (*n, h.edge_map.clone()))
            .collect();
        let vertices = SetDiagram::on_free_shape(
            shape.clone(),
            graphs.iter().map(|g| g.vertices.clone()).collect(),
            &vgens,
        )?;
        let edges = SetDiagram::on_free_shape(
            shape,
            graphs.iter().map(|g| g.edges.clone()).collect(),
            &egens,
        )?;
        Ok(GraphDiagram {
            graphs,
            vertices,
            edges,
        })
    }
}

/// A (co)cone of graphs together with its two componentwise (co)cones.
#[derive(Debug, Clone)]
pub struct GraphCone {
    pub apex: FinGraph,
    pub legs: Vec<GraphHom>,
    pub vertex_cone: Cone,
    pub edge_cone: Cone,
}

fn assemble(
    d: &GraphDiagram,
    vertex_cone: Cone,
    edge_cone: Cone,
    src: FinFunction,
    tgt: FinFunction,
    over: bool,
) -> Result<GraphCone> {
    let apex = FinGraph::new(vertex_cone.apex.clone(), edge_cone.apex.clone(), src, tgt)?;
    let legs = d
        .graphs
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let (vm, em) = (vertex_cone.legs[j].clone(), edge_cone.legs[j].clone());
            if over {
                GraphHom::new(apex.clone(), g.clone(), vm, em)
            } else {
                GraphHom::new(g.clone(), apex.clone(), vm, em)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphCone {
        apex,
        legs,
        vertex_cone,
        edge_cone,
    })
}

pub fn graph_limit(d: &GraphDiagram, limits: &Limits) -> Result<GraphCone> {
    let vc = fincat::limit(&d.vertices, limits)?;
    let ec = fincat::limit(&d.edges, limits)?;
    let endpoint = |pick: fn(&FinGraph) -> &FinFunction| -> Result<FinFunction> {
        let legs = d
            .graphs
            .iter()
            .zip(&ec.legs)
            .map(|(g, l)| crate::finset::compose(pick(g), l))
            .collect::<Result<Vec<_>>>()?;
        let cone = Cone {
            diagram: d.vertices.clone(),
            apex: ec.apex.clone(),
            legs,
            direction: fincat::Direction::Over,
        };
        fincat::mediating_morphism(&vc, &cone)
    };
    let src = endpoint(|g| &g.src)?;
    let tgt = endpoint(|g| &g.tgt)?;
    assemble(d, vc, ec, src, tgt, true)
}

pub fn graph_colimit(d: &GraphDiagram) -> Result<GraphCone> {
    let vc = fincat::colimit(&d.vertices);
    let ec = fincat::colimit(&d.edges);
    let endpoint = |pick: fn(&FinGraph) -> &FinFunction| -> Result<FinFunction> {
        let legs = d
            .graphs
            .iter()
            .zip(&vc.legs)
            .map(|(g, l)| crate::finset::compose(l, pick(g)))
            .collect::<Result<Vec<_>>>()?;
        let cocone = Cone {
            diagram: d.edges.clone(),
            apex: vc.apex.clone(),
            legs,
            direction: fincat::Direction::Under,
        };
        fincat::mediating_morphism(&ec, &cocone)
    };
    let src = endpoint(|g| &g.src)?;
    let tgt = endpoint(|g| &g.tgt)?;
    assemble(d, vc, ec, src, tgt, false)
}

pub fn graph_product(a: &FinGraph, b: &FinGraph, limits: &Limits) -> Result<GraphCone> {
    let d = GraphDiagram::on_free_shape(
        Arc::new(shapes::discrete(&["l", "r"])),
        vec![a.clone(), b.clone()],
        &[],
    )?;
    graph_limit(&d, limits)
}

pub fn graph_coproduct(a: &FinGraph, b: &FinGraph) -> Result<GraphCone> {
    let d = GraphDiagram::on_free_shape(
        Arc::new(shapes::discrete(&["l", "r"])),
        vec![a.clone(), b.clone()],
        &[],
    )?;
    graph_colimit(&d)
}

pub fn graph_pullback(f: &GraphHom, g: &GraphHom, limits: &Limits) -> Result<GraphCone> {
    let d = GraphDiagram::on_free_shape(
        Arc::new(shapes::pullback()),
        vec![f.source.clone(), g.source.clone(), f.target.clone()],
        &[("f", f.clone()), ("g", g.clone())],
    )?;
    graph_limit(&d, limits)
}

/// One vertex with one loop.
pub fn terminal_graph() -> FinGraph {
    FinGraph::from_edges(&["*"], &[("*", "*", "*")]).expect("terminal graph")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge() -> FinGraph {
        FinGraph::from_edges(&["a", "b"], &[("e", "a", "b")]).unwrap()
    }

    #[test]
    fn presheaf_round_trip() {
        for g in [FinGraph::empty(), terminal_graph(), edge()] {
            let p = g.as_presheaf();
            assert_eq!(FinGraph::from_presheaf(&p).unwrap(), g);
        }
        assert_eq!(FinGraph::empty().as_presheaf().total_size(), 0);
        assert_eq!(subgraphs(&edge(), &Limits::default()).unwrap().len(), 5);
        let d = edge().as_covariant_diagram().unwrap();
        assert!(d.validate().unwrap().is_ok());
    }

    #[test]
    fn classifier_shape() {
        let om = graph_omega().unwrap();
        assert_eq!(om.graph.vertices.len(), 2);
        assert_eq!(om.graph.edges.len(), 5);
        let ends = |l: &str| {
            let e = om.edge(l);
            (
                om.graph.vertices.atom(om.graph.src.apply(e)),
                om.graph.vertices.atom(om.graph.tgt.apply(e)),
            )
        };
        assert_eq!(ends("0_E"), ("0_V", "0_V"));
        assert_eq!(ends("s"), ("V", "0_V"));
        assert_eq!(ends("t"), ("0_V", "V"));
        assert_eq!(ends("st"), ("V", "V"));
        assert_eq!(ends("1_E"), ("V", "V"));
    }

    #[test]
    fn classify_cases_on_one_edge() {
        let om = graph_omega().unwrap();
        let g = edge();
        let cases: [(&[&str], &[&str], &str); 5] = [
            (&[], &[], "0_E"),
            (&["a"], &[], "s"),
            (&["b"], &[], "t"),
            (&["a", "b"], &[], "st"),
            (&["a", "b"], &["e"], "1_E"),
        ];
        for (vs, es, label) in cases {
            let s = SubGraph::from_atoms(g.clone(), vs, es).unwrap();
            let chi = classify_subgraph(&s, &om);
            chi.check().unwrap();
            assert_eq!(om.graph.edges.atom(chi.edge_map.apply(0)), label);
            assert_eq!(classified_subgraph(&chi, &om).unwrap(), s);
            let via_sieves = presheaf::classify(&s.to_subpresheaf(), &om.omega).unwrap();
            assert_eq!(
                via_sieves.components(),
                chi.as_presheaf_morphism().components()
            );
        }
    }

    #[test]
    fn excluded_middle_fails() {
        let g = edge();
        let s = SubGraph::from_atoms(g.clone(), &["a"], &[]).unwrap();
        let not_s = subgraph_heyting(HeytingOp::Not, &s, None).unwrap();
        let lem = subgraph_heyting(HeytingOp::Join, &s, Some(&not_s)).unwrap();
        assert!(!lem.is_full());
    }

    #[test]
    fn componentwise_limits() {
        let limits = Limits::default();
        let g = edge();
        let p = graph_product(&g, &g, &limits).unwrap();
        assert_eq!((p.apex.vertices.len(), p.apex.edges.len()), (4, 1));
        let c = graph_coproduct(&g, &terminal_graph()).unwrap();
        assert_eq!((c.apex.vertices.len(), c.apex.edges.len()), (3, 2));
        let one = terminal_graph();
        let bang = |h: &FinGraph| {
            GraphHom::new(
                h.clone(),
                one.clone(),
                FinFunction::constant(&h.vertices, &one.vertices, 0).unwrap(),
                FinFunction::constant(&h.edges, &one.edges, 0).unwrap(),
            )
            .unwrap()
        };
        let pb = graph_pullback(&bang(&g), &bang(&g), &limits).unwrap();
        assert_eq!((pb.apex.vertices.len(), pb.apex.edges.len()), (4, 1));
    }
}
