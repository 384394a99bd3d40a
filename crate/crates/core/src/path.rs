//! Finite paths, ultrapaths, boundary points and the shift map.

use std::fmt::Write;

use serde::Serialize;

use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::ultragraph::{EdgeRef, Ultragraph};

pub type Path = Vec<EdgeRef>;

pub fn is_composable(g: &Ultragraph, path: &[EdgeRef]) -> bool {
    path.iter().all(|&e| g.edge_exists(e))
        && path
            .windows(2)
            .all(|w| g.range(w[0]).contains(g.source(w[1])))
}

/// `α < β`: `a` is a proper initial segment of `b`.
pub fn is_initial_segment(a: &[EdgeRef], b: &[EdgeRef]) -> bool {
    a.len() < b.len() && b.starts_with(a)
}

/// Different paths, neither extending the other.
pub fn paths_disjoint(a: &[EdgeRef], b: &[EdgeRef]) -> bool {
    !a.starts_with(b) && !b.starts_with(a)
}

pub fn format_path(g: &Ultragraph, path: &[EdgeRef]) -> String {
    let mut out = String::new();
    for (i, &e) in path.iter().enumerate() {
        if i > 0 {
            out.push('.');
        }
        out.push_str(&g.edge_label(e));
    }
    out
}

/// Range of the last edge, or `None` for the empty path.
pub fn path_range(g: &Ultragraph, path: &[EdgeRef]) -> Option<EpSet> {
    path.last().map(|&e| g.range(e))
}

/// An element `(α, A)` of 𝔭; the empty path stands for `(A, A)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ultrapath {
    pub path: Path,
    pub comp: EpSet,
}

impl Ultrapath {
    pub fn new(g: &Ultragraph, path: Path, comp: EpSet) -> Result<Ultrapath> {
        if !is_composable(g, &path) {
            return Err(UgkError::Undefined(format!(
                "path {} is not composable",
                format_path(g, &path)
            )));
        }
        if comp.is_empty() {
            return Err(UgkError::Undefined("empty component".into()));
        }
        if let Some(r) = path_range(g, &path) {
            if !comp.is_subset(&r) {
                return Err(UgkError::Undefined(format!(
                    "component {comp} is not inside r({})",
                    format_path(g, &path)
                )));
            }
        }
        g.rfum_decompose(&comp)?;
        Ok(Ultrapath { path, comp })
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    /// The source vertex set: `s(α_1)` as a singleton, or `A` when `|α| = 0`.
    pub fn source_set(&self, g: &Ultragraph) -> EpSet {
        match self.path.first() {
            Some(&e) => EpSet::singleton(g.source(e)),
            None => self.comp.clone(),
        }
    }
}

/// `x·y` following the three displayed cases plus the general one.
pub fn concat(g: &Ultragraph, x: &Ultrapath, y: &Ultrapath) -> Result<Ultrapath> {
    match (x.is_empty(), y.is_empty()) {
        (true, true) => {
            let c = x.comp.intersect(&y.comp);
            if c.is_empty() {
                return Err(UgkError::Undefined("disjoint vertex sets".into()));
            }
            Ok(Ultrapath {
                path: Vec::new(),
                comp: c,
            })
        }
        (true, false) => {
            if x.comp.contains(g.source(y.path[0])) {
                Ok(y.clone())
            } else {
                Err(UgkError::Undefined("s(y) is not in x".into()))
            }
        }
        (false, true) => {
            let c = x.comp.intersect(&y.comp);
            if c.is_empty() {
                return Err(UgkError::Undefined("r(x) does not meet y".into()));
            }
            Ok(Ultrapath {
                path: x.path.clone(),
                comp: c,
            })
        }
        (false, false) => {
            if !x.comp.contains(g.source(y.path[0])) {
                return Err(UgkError::Undefined("s(y) is not in r(x)".into()));
            }
            let mut path = x.path.clone();
            path.extend_from_slice(&y.path);
            Ok(Ultrapath {
                path,
                comp: y.comp.clone(),
            })
        }
    }
}

pub fn ultrapath_disjoint(g: &Ultragraph, x: &Ultrapath, y: &Ultrapath) -> bool {
    if x.path == y.path {
        return x.comp.is_disjoint(&y.comp);
    }
    if is_initial_segment(&x.path, &y.path) {
        return !x.comp.contains(g.source(y.path[x.len()]));
    }
    if is_initial_segment(&y.path, &x.path) {
        return !y.comp.contains(g.source(x.path[y.len()]));
    }
    true
}

/// A finitely presented element of the boundary space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Point {
    /// `(α, A)` with `A` the minimal infinite emitter `mie#k` inside `r(α)`.
    Fin { prefix: Path, mie: usize },
    /// `head · cycle^∞`, kept in canonical form.
    EvPer { head: Path, cycle: Path },
}

impl Serialize for EdgeRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.schema, self.index).serialize(s)
    }
}

fn primitive_root(cycle: &[EdgeRef]) -> &[EdgeRef] {
    let n = cycle.len();
    for d in 1..=n {
        if n % d == 0 && (d..n).all(|i| cycle[i] == cycle[i - d]) {
            return &cycle[..d];
        }
    }
    cycle
}

impl Point {
    pub fn fin(g: &Ultragraph, prefix: Path, mie: usize) -> Result<Point> {
        if !is_composable(g, &prefix) {
            return Err(UgkError::Undefined(format!(
                "path {} is not composable",
                format_path(g, &prefix)
            )));
        }
        if !g.m_alpha(&prefix).contains(&mie) {
            return Err(UgkError::Undefined(format!(
                "mie#{mie} is not a minimal infinite emitter inside r({})",
                format_path(g, &prefix)
            )));
        }
        Ok(Point::Fin { prefix, mie })
    }

    pub fn evper(g: &Ultragraph, head: Path, cycle: Path) -> Result<Point> {
        if cycle.is_empty() {
            return Err(UgkError::Undefined("empty cycle".into()));
        }
        let mut whole = head.clone();
        whole.extend_from_slice(&cycle);
        whole.push(cycle[0]);
        if !is_composable(g, &whole) {
            return Err(UgkError::Undefined(format!(
                "{}({})^∞ is not a path",
                format_path(g, &head),
                format_path(g, &cycle)
            )));
        }
        Ok(Point::evper_unchecked(head, cycle))
    }

    /// Canonical form: primitive cycle, then the shortest head.
    pub(crate) fn evper_unchecked(mut head: Path, cycle: Path) -> Point {
        let mut cycle = primitive_root(&cycle).to_vec();
        while let (Some(h), Some(c)) = (head.last(), cycle.last()) {
            if h != c {
                break;
            }
            head.pop();
            cycle.rotate_right(1);
        }
        Point::EvPer { head, cycle }
    }

    /// Number of edges, `None` for infinite points.
    pub fn length(&self) -> Option<usize> {
        match self {
            Point::Fin { prefix, .. } => Some(prefix.len()),
            Point::EvPer { .. } => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::EvPer { .. })
    }

    /// The `i`-th edge (0-based) if the point is that long.
    pub fn edge(&self, i: usize) -> Option<EdgeRef> {
        match self {
            Point::Fin { prefix, .. } => prefix.get(i).copied(),
            Point::EvPer { head, cycle } => Some(if i < head.len() {
                head[i]
            } else {
                cycle[(i - head.len()) % cycle.len()]
            }),
        }
    }

    /// The first `min(k, length)` edges.
    pub fn unroll(&self, k: usize) -> Path {
        (0..k).map_while(|i| self.edge(i)).collect()
    }

    /// Removes the first `k` edges of an infinite point.
    pub fn drop_edges(&self, k: usize) -> Point {
        match self {
            Point::Fin { prefix, mie } => Point::Fin {
                prefix: prefix[k.min(prefix.len())..].to_vec(),
                mie: *mie,
            },
            Point::EvPer { head, cycle } => {
                if k <= head.len() {
                    Point::evper_unchecked(head[k..].to_vec(), cycle.clone())
                } else {
                    let mut c = cycle.clone();
                    c.rotate_left((k - head.len()) % cycle.len());
                    Point::evper_unchecked(Vec::new(), c)
                }
            }
        }
    }

    /// Prepends `alpha`; composability is the caller's concern.
    pub fn prepend(&self, alpha: &[EdgeRef]) -> Point {
        match self {
            Point::Fin { prefix, mie } => {
                let mut p = alpha.to_vec();
                p.extend_from_slice(prefix);
                Point::Fin {
                    prefix: p,
                    mie: *mie,
                }
            }
            Point::EvPer { head, cycle } => {
                let mut h = alpha.to_vec();
                h.extend_from_slice(head);
                Point::evper_unchecked(h, cycle.clone())
            }
        }
    }

    /// σ(x).
    pub fn shift(&self) -> Result<Point> {
        if self.length() == Some(0) {
            return Err(UgkError::UndefinedOnLengthZero);
        }
        Ok(self.drop_edges(1))
    }

    /// Source vertex set: `{s(x_1)}`, or the emitter itself at length zero.
    pub fn source_set(&self, g: &Ultragraph) -> EpSet {
        match self.edge(0) {
            Some(e) => EpSet::singleton(g.source(e)),
            None => match self {
                Point::Fin { mie, .. } => g.mies()[*mie].clone(),
                Point::EvPer { .. } => unreachable!(),
            },
        }
    }

    /// Size measure used by exhaustive enumeration.
    pub fn complexity(&self) -> usize {
        match self {
            Point::Fin { prefix, .. } => prefix.len() + 1,
            Point::EvPer { head, cycle } => head.len() + cycle.len(),
        }
    }

    pub fn display(&self, g: &Ultragraph) -> String {
        let mut s = String::new();
        match self {
            Point::Fin { prefix, mie } => {
                let _ = write!(s, "fin({}; mie#{mie})", format_path(g, prefix));
            }
            Point::EvPer { head, cycle } => {
                let _ = write!(
                    s,
                    "evp({}; {})",
                    format_path(g, head),
                    format_path(g, cycle)
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Ultragraph {
        Ultragraph::parse(
            "universe ap(1,1)\nedge e1 : src 1 -> { all \\ {0,2} }\n\
             edge e2 : src 2 -> { all \\ {0,1} }\n\
             family en(n) for n in ap(3,1) : src n -> { n-2, n }",
        )
        .unwrap()
    }

    fn e(g: &Ultragraph, name: &str, k: Option<u64>) -> EdgeRef {
        g.edge_by_name(name, k).unwrap()
    }

    #[test]
    fn concatenation_cases() {
        let g = example();
        let e1 = e(&g, "e1", None);
        let a = Ultrapath::new(&g, vec![], EpSet::finite([1, 3, 4])).unwrap();
        let b = Ultrapath::new(&g, vec![], EpSet::finite([3, 4, 7])).unwrap();
        assert_eq!(concat(&g, &a, &b).unwrap().comp, EpSet::finite([3, 4]));
        let x = Ultrapath::new(&g, vec![e1], g.range(e1)).unwrap();
        let xy = concat(&g, &x, &b).unwrap();
        assert_eq!((xy.path, xy.comp), (vec![e1], EpSet::finite([3, 4, 7])));
        let en5 = e(&g, "en", Some(5));
        let y = Ultrapath::new(&g, vec![en5], EpSet::singleton(3)).unwrap();
        let small = Ultrapath::new(&g, vec![e1], EpSet::singleton(4)).unwrap();
        assert!(concat(&g, &small, &y).is_err());
        assert_eq!(concat(&g, &x, &y).unwrap().path, vec![e1, en5]);
        let one = Ultrapath::new(&g, vec![], EpSet::singleton(1)).unwrap();
        assert!(concat(&g, &one, &b).is_err());
    }

    #[test]
    fn disjointness_cases() {
        let g = example();
        let e1 = e(&g, "e1", None);
        let en5 = e(&g, "en", Some(5));
        let en3 = e(&g, "en", Some(3));
        let u = |p: Path, c: EpSet| Ultrapath::new(&g, p, c).unwrap();
        assert!(ultrapath_disjoint(&g, &u(vec![e1], EpSet::singleton(3)), &u(vec![e1], EpSet::singleton(4))));
        assert!(!ultrapath_disjoint(&g, &u(vec![e1], EpSet::finite([5, 6])), &u(vec![e1, en5], EpSet::singleton(3))));
        assert!(ultrapath_disjoint(&g, &u(vec![e1], EpSet::finite([6])), &u(vec![e1, en5], EpSet::singleton(3))));
        assert!(ultrapath_disjoint(&g, &u(vec![en5], EpSet::singleton(3)), &u(vec![en3], EpSet::singleton(3))));
        assert!(is_initial_segment(&[e1], &[e1, en5]));
        assert!(!is_initial_segment(&[e1], &[e1]));
    }

    #[test]
    fn evper_canonical_form() {
        let g = example();
        let en5 = e(&g, "en", Some(5));
        let en3 = e(&g, "en", Some(3));
        let e1 = e(&g, "e1", None);
        let p = Point::evper(&g, vec![en5, en3, e1], vec![en3, e1]).unwrap();
        let q = Point::evper(&g, vec![en5], vec![en3, e1, en3, e1]).unwrap();
        assert_eq!(p, q);
        assert_eq!(p, Point::EvPer { head: vec![en5], cycle: vec![en3, e1] });
        let loop5 = Point::evper(&g, vec![], vec![en5]).unwrap();
        assert_eq!(loop5.shift().unwrap(), loop5);
        assert!(Point::evper(&g, vec![], vec![en5, e(&g, "en", Some(4))]).is_err());
    }

    #[test]
    fn shift_drops_edges() {
        let g = example();
        let e1 = e(&g, "e1", None);
        let en5 = e(&g, "en", Some(5));
        let en3 = e(&g, "en", Some(3));
        let f = Point::fin(&g, vec![e1], 0).unwrap();
        assert_eq!(f.shift().unwrap(), Point::Fin { prefix: vec![], mie: 0 });
        assert_eq!(f.shift().unwrap().shift(), Err(UgkError::UndefinedOnLengthZero));
        let x = Point::evper(&g, vec![en5, en3], vec![e1, en3]).unwrap();
        let mut y = x.clone();
        for _ in 0..2 {
            y = y.shift().unwrap();
        }
        assert_eq!(y, Point::evper(&g, vec![], vec![e1, en3]).unwrap());
        assert!(Point::fin(&g, vec![en5], 0).is_err());
    }
}
