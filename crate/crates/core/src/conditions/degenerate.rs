use serde_json::{json, Value};

use super::{Certificate, Condition, ConditionReport, Verdict};
use crate::epset::EpSet;
use crate::path::Point;
use crate::ultragraph::{EdgeRef, EdgeSet, Ultragraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum DegeneracyKind {
    IE1,
    IE2,
    V1,
    V2,
    V3,
}

impl DegeneracyKind {
    pub fn name(self) -> &'static str {
        match self {
            DegeneracyKind::IE1 => "IE1",
            DegeneracyKind::IE2 => "IE2",
            DegeneracyKind::V1 => "V1",
            DegeneracyKind::V2 => "V2",
            DegeneracyKind::V3 => "V3",
        }
    }
}

/// A degenerate minimal infinite emitter or vertex, with a point whose orbit
/// has at most two elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Degeneracy {
    pub kind: DegeneracyKind,
    /// `Some(k)` for `mie#k`, `None` for a vertex.
    pub mie: Option<usize>,
    pub vertex: Option<u64>,
    pub edges: Vec<EdgeRef>,
    pub point: Point,
}

impl Degeneracy {
    pub fn describe(&self, g: &Ultragraph) -> String {
        let edges: Vec<String> = self.edges.iter().map(|&e| g.edge_label(e)).collect();
        let what = match (self.mie, self.vertex) {
            (Some(k), _) => format!("mie#{k}"),
            (None, Some(v)) => format!("vertex {v}"),
            (None, None) => "?".into(),
        };
        format!(
            "{} {what} (edges {{{}}}, point {})",
            self.kind.name(),
            edges.join(", "),
            self.point.display(g)
        )
    }

    pub fn to_json(&self, g: &Ultragraph) -> Value {
        json!({
            "tag": self.kind.name(),
            "mie": self.mie.map(|k| format!("mie#{k}")),
            "vertex": self.vertex,
            "edges": self.edges.iter().map(|&e| g.edge_label(e)).collect::<Vec<_>>(),
            "point": self.point.display(g),
        })
    }
}

fn single(set: &EdgeSet) -> Option<EdgeRef> {
    (set.count() == Some(1)).then(|| set.iter_capped(1).next().expect("one edge"))
}

fn pair(set: &EdgeSet) -> Option<[EdgeRef; 2]> {
    (set.count() == Some(2)).then(|| {
        let v: Vec<EdgeRef> = set.iter_capped(2).collect();
        [v[0], v[1]]
    })
}

/// Degenerate minimal infinite emitters (all of them) and degenerate vertices
/// among the sampled vertices.
pub fn degenerate_catalog(g: &Ultragraph) -> Vec<Degeneracy> {
    let sources = g.sources();
    let mut out = Vec::new();
    for (k, a) in g.mies().iter().enumerate() {
        let fin = Point::Fin {
            prefix: Vec::new(),
            mie: k,
        };
        let hit = a.difference(&sources);
        if hit.is_empty() {
            out.push(Degeneracy {
                kind: DegeneracyKind::IE1,
                mie: Some(k),
                vertex: None,
                edges: Vec::new(),
                point: fin,
            });
        } else if hit.cardinality() == Some(1) {
            let v = hit.min_elem().expect("one vertex");
            if let Some(e) = single(&g.edges_into(v)) {
                if sources.contains(g.source(e)) {
                    out.push(Degeneracy {
                        kind: DegeneracyKind::IE2,
                        mie: Some(k),
                        vertex: Some(v),
                        edges: vec![e],
                        point: fin,
                    });
                }
            }
        }
    }
    for v in g.sample_vertices() {
        if let Some(d) = degenerate_vertex(g, v, &sources) {
            out.push(d);
        }
    }
    out
}

fn degenerate_vertex(g: &Ultragraph, v: u64, sources: &EpSet) -> Option<Degeneracy> {
    let into = g.edges_into(v);
    let vertex = Some(v);
    if let Some(e) = single(&into) {
        if g.source(e) == v {
            return Some(Degeneracy {
                kind: DegeneracyKind::V1,
                mie: None,
                vertex,
                edges: vec![e],
                point: Point::evper_unchecked(Vec::new(), vec![e]),
            });
        }
        let f = e;
        let w = g.source(f);
        if let Some(e) = single(&g.edges_into(w)) {
            if g.source(e) == v {
                return Some(Degeneracy {
                    kind: DegeneracyKind::V3,
                    mie: None,
                    vertex,
                    edges: vec![e, f],
                    point: Point::evper_unchecked(Vec::new(), vec![e, f]),
                });
            }
        }
    }
    if let Some([a, b]) = pair(&into) {
        for (e, f) in [(a, b), (b, a)] {
            if g.source(e) == v && sources.contains(g.source(f)) {
                return Some(Degeneracy {
                    kind: DegeneracyKind::V2,
                    mie: None,
                    vertex,
                    edges: vec![e, f],
                    point: Point::evper_unchecked(Vec::new(), vec![e]),
                });
            }
        }
    }
    None
}

/// Condition (ND).
pub fn check_nd(g: &Ultragraph) -> ConditionReport {
    let catalog = degenerate_catalog(g);
    if catalog.is_empty() {
        ConditionReport::new(
            Condition::ND,
            Verdict::Holds,
            0,
            Certificate::Note(format!(
                "no degenerate minimal infinite emitter; no degenerate vertex below {}",
                g.structural_bound()
            )),
        )
    } else {
        ConditionReport::new(Condition::ND, Verdict::Fails, 0, Certificate::Degenerate(catalog))
    }
}
