//! Certificate-producing checkers for the graph conditions (L), (K), (T),
//! (ND), (∞) and (W).

use std::fmt;

use serde_json::{json, Value};

use crate::epset::EpSet;
use crate::path::{format_path, Path};
use crate::ultragraph::{EdgeRef, EdgeSet, Ultragraph};

mod degenerate;
mod infinite;
mod loops;
mod search;
mod wander;

pub use degenerate::{check_nd, degenerate_catalog, Degeneracy, DegeneracyKind};
pub use infinite::check_infty;
pub use loops::{check_k, check_l, check_t, enumerate_simple_loops, exits_of_loop};
pub use wander::{check_w, semi_tail_chain, Chain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    L,
    K,
    T,
    ND,
    INF,
    W,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::L,
        Condition::K,
        Condition::T,
        Condition::ND,
        Condition::INF,
        Condition::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::L => "L",
            Condition::K => "K",
            Condition::T => "T",
            Condition::ND => "ND",
            Condition::INF => "INF",
            Condition::W => "W",
        }
    }

    pub fn parse(s: &str) -> Option<Condition> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::Holds => Some(true),
            Verdict::Fails => Some(false),
            Verdict::Unknown => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        }
    }
}

/// Witness attached to a verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    None,
    /// A loop without exits.
    Loop(Path),
    /// A vertex whose only simple loop is `path`.
    SingleLoop { vertex: u64, path: Path },
    /// A vertex reaching every vertex along at most one path.
    NoDoublePath { vertex: u64, chain: Option<Chain> },
    Degenerate(Vec<Degeneracy>),
    /// For the minimal infinite emitter `mie`: the vertices `ret` from which
    /// a path returns onto it, and the edges of ε(A) whose range meets `ret`.
    Return {
        mie: usize,
        ret: EpSet,
        qualifying: EdgeSet,
    },
    /// A branch-free wandering path through the members of one schema.
    Chain(Chain),
    Note(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub bound: usize,
    pub certificate: Certificate,
}

impl ConditionReport {
    pub fn new(
        condition: Condition,
        verdict: Verdict,
        bound: usize,
        certificate: Certificate,
    ) -> ConditionReport {
        ConditionReport {
            condition,
            verdict,
            bound,
            certificate,
        }
    }

    pub fn unknown(condition: Condition, bound: usize, note: &str) -> ConditionReport {
        ConditionReport::new(
            condition,
            Verdict::Unknown,
            bound,
            Certificate::Note(note.to_string()),
        )
    }

    pub fn to_json(&self, g: &Ultragraph) -> Value {
        json!({
            "condition": self.condition.name(),
            "verdict": self.verdict.name(),
            "bound": self.bound,
            "certificate": certificate_json(g, &self.certificate),
        })
    }

    /// One-line summary for terminal output.
    pub fn summary(&self, g: &Ultragraph) -> String {
        let detail = match &self.certificate {
            Certificate::None => String::new(),
            Certificate::Loop(p) => format!("loop {}", format_path(g, p)),
            Certificate::SingleLoop { vertex, path } => {
                format!("vertex {vertex} has the single simple loop {}", format_path(g, path))
            }
            Certificate::NoDoublePath { vertex, .. } => {
                format!("vertex {vertex} reaches every vertex along at most one path")
            }
            Certificate::Degenerate(list) => list
                .iter()
                .map(|d| d.describe(g))
                .collect::<Vec<_>>()
                .join("; "),
            Certificate::Return { mie, ret, qualifying } => format!(
                "mie#{mie}: return set {ret}, {} returning edges",
                match qualifying.count() {
                    Some(n) => n.to_string(),
                    None => "infinitely many".into(),
                }
            ),
            Certificate::Chain(c) => c.describe(g),
            Certificate::Note(s) => s.clone(),
        };
        format!("{:<3} {:<8} {}", self.condition.name(), self.verdict.name(), detail)
    }
}

pub(crate) fn edge_set_json(g: &Ultragraph, set: &EdgeSet) -> Value {
    let mut out = serde_json::Map::new();
    for (i, s) in set.per_schema.iter().enumerate() {
        if !s.is_empty() {
            out.insert(g.schemas()[i].name.clone(), json!(s.to_string()));
        }
    }
    Value::Object(out)
}

fn certificate_json(g: &Ultragraph, c: &Certificate) -> Value {
    match c {
        Certificate::None => Value::Null,
        Certificate::Loop(p) => json!({"kind": "loop", "path": format_path(g, p)}),
        Certificate::SingleLoop { vertex, path } => json!({
            "kind": "single_loop", "vertex": vertex, "path": format_path(g, path)
        }),
        Certificate::NoDoublePath { vertex, chain } => json!({
            "kind": "no_double_path",
            "vertex": vertex,
            "chain": chain.as_ref().map(|c| c.to_json(g)),
        }),
        Certificate::Degenerate(list) => json!({
            "kind": "degenerate",
            "objects": list.iter().map(|d| d.to_json(g)).collect::<Vec<_>>(),
        }),
        Certificate::Return { mie, ret, qualifying } => json!({
            "kind": "return",
            "mie": format!("mie#{mie}"),
            "return_set": ret.to_string(),
            "qualifying": edge_set_json(g, qualifying),
            "qualifying_infinite": !qualifying.is_finite(),
        }),
        Certificate::Chain(c) => c.to_json(g),
        Certificate::Note(s) => json!({"kind": "note", "text": s}),
    }
}

/// Runs one checker. `bound` limits path lengths in the bounded searches.
pub fn check(g: &Ultragraph, c: Condition, bound: usize) -> ConditionReport {
    match c {
        Condition::L => check_l(g, bound),
        Condition::K => check_k(g, bound),
        Condition::T => check_t(g, bound),
        Condition::ND => check_nd(g),
        Condition::INF => check_infty(g, bound),
        Condition::W => check_w(g, bound),
    }
}

/// Whether a path of edges is a simple loop at the source of its first edge.
pub fn is_simple_loop(g: &Ultragraph, path: &[EdgeRef]) -> bool {
    let Some(&first) = path.first() else {
        return false;
    };
    let v = g.source(first);
    crate::path::is_composable(g, path)
        && g.range(*path.last().expect("nonempty")).contains(v)
        && path[1..].iter().all(|&e| g.source(e) != v)
}
