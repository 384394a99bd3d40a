//! Cylinder sets `D_{(β,B),F}` and finite disjoint unions of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::path::{format_path, is_composable, is_initial_segment, path_range, Path, Point};
use crate::ultragraph::{EdgeRef, Ultragraph};

/// Upper bound on the number of parts any clopen computation may produce.
pub const MAX_PARTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub prefix: Path,
    pub comp: EpSet,
    pub excl: BTreeSet<EdgeRef>,
}

/// A finite union of pairwise disjoint cylinders.
pub type Clopen = Vec<Cylinder>;

impl Cylinder {
    /// Checked constructor: `(prefix, comp)` must be an ultrapath and every
    /// excluded edge must start in `comp`.
    pub fn new(
        g: &Ultragraph,
        prefix: Path,
        comp: EpSet,
        excl: BTreeSet<EdgeRef>,
    ) -> Result<Cylinder> {
        if !is_composable(g, &prefix) {
            return Err(UgkError::Undefined(format!(
                "path {} is not composable",
                format_path(g, &prefix)
            )));
        }
        if comp.is_empty() {
            return Err(UgkError::Undefined("empty component".into()));
        }
        if let Some(r) = path_range(g, &prefix) {
            if !comp.is_subset(&r) {
                return Err(UgkError::Undefined(format!(
                    "component {comp} is not inside r({})",
                    format_path(g, &prefix)
                )));
            }
        }
        g.rfum_decompose(&comp)?;
        if let Some(e) = excl.iter().find(|&&e| !g.edge_exists(e) || !comp.contains(g.source(e))) {
            return Err(UgkError::Undefined(format!(
                "excluded edge {} does not start in the component",
                if g.edge_exists(*e) { g.edge_label(*e) } else { format!("{e:?}") }
            )));
        }
        Ok(Cylinder { prefix, comp, excl })
    }

    /// `D_{(β,r(β_last))}` or `D_{(A,A)}`.
    pub fn basic(g: &Ultragraph, prefix: Path, comp: EpSet) -> Result<Cylinder> {
        Cylinder::new(g, prefix, comp, BTreeSet::new())
    }

    /// Builds without checks, trimming exclusions to edges starting in `comp`.
    pub(crate) fn raw(g: &Ultragraph, prefix: Path, comp: EpSet, excl: BTreeSet<EdgeRef>) -> Cylinder {
        let excl = excl
            .into_iter()
            .filter(|&e| comp.contains(g.source(e)))
            .collect();
        Cylinder { prefix, comp, excl }
    }

    /// `e` may follow the prefix inside this cylinder.
    pub fn allows(&self, g: &Ultragraph, e: EdgeRef) -> bool {
        self.comp.contains(g.source(e)) && !self.excl.contains(&e)
    }

    pub fn contains(&self, g: &Ultragraph, p: &Point) -> bool {
        let b = self.prefix.len();
        if let Point::Fin { prefix, mie } = p {
            if prefix.len() < b {
                return false;
            }
            if prefix.len() == b {
                return *prefix == self.prefix && g.mies()[*mie].is_subset(&self.comp);
            }
        }
        let head = p.unroll(b + 1);
        head.len() == b + 1 && head[..b] == self.prefix[..] && self.allows(g, head[b])
    }

    pub fn is_empty(&self, g: &Ultragraph) -> bool {
        g.mies_within(&self.comp).is_empty()
            && g.epsilon(&self.comp)
                .to_vec()
                .is_some_and(|es| es.iter().all(|e| self.excl.contains(e)))
    }

    pub fn display(&self, g: &Ultragraph) -> String {
        let mut s = format!("D({}; {}; {{", format_path(g, &self.prefix), comp_label(g, &self.comp));
        for (i, &e) in self.excl.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            let _ = write!(s, "{}", g.edge_label(e));
        }
        s.push_str("})");
        s
    }

    /// `σ^{|β|}(D_{(β,B),F}) = D_{(B,B),F}`.
    pub fn shift_image(&self) -> Result<Cylinder> {
        if self.prefix.is_empty() {
            return Err(UgkError::UndefinedOnLengthZero);
        }
        Ok(Cylinder {
            prefix: Vec::new(),
            comp: self.comp.clone(),
            excl: self.excl.clone(),
        })
    }
}

/// `mie#k` when the set is a minimal infinite emitter, else the EP literal.
pub fn comp_label(g: &Ultragraph, comp: &EpSet) -> String {
    match g.mie_index(comp) {
        Some(k) => format!("mie#{k}"),
        None => comp.to_string(),
    }
}

fn edges_from_set(g: &Ultragraph, a: &EpSet) -> BTreeSet<EdgeRef> {
    g.epsilon(a)
        .to_vec()
        .expect("finite vertex sets of finite emitters have finitely many edges")
        .into_iter()
        .collect()
}

pub fn intersect(g: &Ultragraph, a: &Cylinder, b: &Cylinder) -> Option<Cylinder> {
    let out = if a.prefix == b.prefix {
        let comp = a.comp.intersect(&b.comp);
        if comp.is_empty() {
            return None;
        }
        Cylinder::raw(g, a.prefix.clone(), comp, a.excl.union(&b.excl).copied().collect())
    } else if is_initial_segment(&a.prefix, &b.prefix) {
        if !a.allows(g, b.prefix[a.prefix.len()]) {
            return None;
        }
        b.clone()
    } else if is_initial_segment(&b.prefix, &a.prefix) {
        if !b.allows(g, a.prefix[b.prefix.len()]) {
            return None;
        }
        a.clone()
    } else {
        return None;
    };
    (!out.is_empty(g)).then_some(out)
}

/// The union of two cylinders sharing a prefix. An edge stays excluded
/// exactly when every cylinder whose component holds its source excludes it.
pub fn union_same_prefix(g: &Ultragraph, a: &Cylinder, b: &Cylinder) -> Result<Cylinder> {
    if a.prefix != b.prefix {
        return Err(UgkError::PrefixMismatch);
    }
    let excl = a
        .excl
        .iter()
        .filter(|&&e| b.excl.contains(&e) || !b.comp.contains(g.source(e)))
        .chain(b.excl.iter().filter(|&&e| !a.comp.contains(g.source(e))))
        .copied()
        .collect();
    Ok(Cylinder {
        prefix: a.prefix.clone(),
        comp: a.comp.union(&b.comp),
        excl,
    })
}

fn push_nonempty(g: &Ultragraph, out: &mut Clopen, c: Cylinder) -> Result<()> {
    if !c.is_empty(g) {
        out.push(c);
        if out.len() > MAX_PARTS {
            return Err(UgkError::NormalizationOverflow(MAX_PARTS));
        }
    }
    Ok(())
}

/// `a ∖ b` as disjoint cylinders.
pub fn difference(g: &Ultragraph, a: &Cylinder, b: &Cylinder) -> Result<Clopen> {
    let mut out = Vec::new();
    diff_into(g, a, b, &mut out)?;
    Ok(out)
}

fn diff_into(g: &Ultragraph, a: &Cylinder, b: &Cylinder, out: &mut Clopen) -> Result<()> {
    let (la, lb) = (a.prefix.len(), b.prefix.len());
    if a.prefix == b.prefix {
        return diff_same_prefix(g, a, b, out);
    }
    if is_initial_segment(&b.prefix, &a.prefix) {
        if !b.allows(g, a.prefix[lb]) {
            push_nonempty(g, out, a.clone())?;
        }
        return Ok(());
    }
    if is_initial_segment(&a.prefix, &b.prefix) {
        let e = b.prefix[la];
        if !a.allows(g, e) {
            return push_nonempty(g, out, a.clone());
        }
        let mut excl = a.excl.clone();
        excl.insert(e);
        push_nonempty(
            g,
            out,
            Cylinder {
                prefix: a.prefix.clone(),
                comp: a.comp.clone(),
                excl,
            },
        )?;
        let mut prefix = a.prefix.clone();
        prefix.push(e);
        let through = Cylinder {
            prefix,
            comp: g.range(e),
            excl: BTreeSet::new(),
        };
        return diff_into(g, &through, b, out);
    }
    push_nonempty(g, out, a.clone())
}

/// Equal prefixes. Minimal infinite emitters of `B` not inside `C` are kept
/// whole; their finitely many vertices in `C` get all of their edges
/// excluded. Excluded edges of the subtrahend are rescued one level down.
fn diff_same_prefix(g: &Ultragraph, a: &Cylinder, b: &Cylinder, out: &mut Clopen) -> Result<()> {
    let (bb, cc) = (&a.comp, &b.comp);
    let leak = g
        .mies_within(bb)
        .into_iter()
        .map(|k| &g.mies()[k])
        .filter(|m| !m.is_subset(cc))
        .fold(EpSet::empty(), |acc, m| acc.union(&m.intersect(cc)));
    let comp = bb.difference(cc).union(&leak);
    if !comp.is_empty() {
        let mut excl: BTreeSet<EdgeRef> = a
            .excl
            .iter()
            .filter(|&&e| comp.contains(g.source(e)))
            .copied()
            .collect();
        excl.extend(edges_from_set(g, &leak));
        push_nonempty(
            g,
            out,
            Cylinder {
                prefix: a.prefix.clone(),
                comp,
                excl,
            },
        )?;
    }
    let shared = bb.intersect(cc);
    for &e in &b.excl {
        if shared.contains(g.source(e)) && !a.excl.contains(&e) {
            let mut prefix = a.prefix.clone();
            prefix.push(e);
            push_nonempty(
                g,
                out,
                Cylinder {
                    prefix,
                    comp: g.range(e),
                    excl: BTreeSet::new(),
                },
            )?;
        }
    }
    Ok(())
}

/// `a ∖ (b_1 ∪ … ∪ b_n)`.
pub fn difference_all(g: &Ultragraph, a: &Cylinder, bs: &[Cylinder]) -> Result<Clopen> {
    let mut pieces = vec![a.clone()];
    for b in bs {
        let mut next = Vec::new();
        for p in &pieces {
            diff_into(g, p, b, &mut next)?;
            if next.len() > MAX_PARTS {
                return Err(UgkError::NormalizationOverflow(MAX_PARTS));
            }
        }
        pieces = next;
        if pieces.is_empty() {
            break;
        }
    }
    Ok(pieces)
}

pub fn clopen_difference(g: &Ultragraph, a: &[Cylinder], b: &[Cylinder]) -> Result<Clopen> {
    let mut out = Vec::new();
    for p in a {
        out.extend(difference_all(g, p, b)?);
        if out.len() > MAX_PARTS {
            return Err(UgkError::NormalizationOverflow(MAX_PARTS));
        }
    }
    Ok(out)
}

pub fn clopen_intersect(g: &Ultragraph, a: &[Cylinder], b: &[Cylinder]) -> Clopen {
    a.iter()
        .flat_map(|x| b.iter().filter_map(move |y| intersect(g, x, y)))
        .collect()
}

pub fn clopen_contains(g: &Ultragraph, a: &[Cylinder], p: &Point) -> bool {
    a.iter().any(|c| c.contains(g, p))
}

/// Disjoint cylinders covering the union of `parts`, merged per prefix.
pub fn normalize(g: &Ultragraph, parts: &[Cylinder]) -> Result<Clopen> {
    let mut disjoint: Clopen = Vec::new();
    for c in parts {
        let fresh = difference_all(g, c, &disjoint)?;
        disjoint.extend(fresh);
        if disjoint.len() > MAX_PARTS {
            return Err(UgkError::NormalizationOverflow(MAX_PARTS));
        }
    }
    let mut by_prefix: BTreeMap<Path, Cylinder> = BTreeMap::new();
    for c in disjoint {
        match by_prefix.remove(&c.prefix) {
            Some(prev) => {
                let merged = union_same_prefix(g, &prev, &c)?;
                by_prefix.insert(c.prefix.clone(), merged);
            }
            None => {
                by_prefix.insert(c.prefix.clone(), c);
            }
        }
    }
    Ok(by_prefix.into_values().collect())
}

pub fn is_subset(g: &Ultragraph, a: &[Cylinder], b: &[Cylinder]) -> Result<bool> {
    Ok(clopen_difference(g, a, b)?.is_empty())
}

pub fn equals(g: &Ultragraph, a: &[Cylinder], b: &[Cylinder]) -> Result<bool> {
    Ok(is_subset(g, a, b)? && is_subset(g, b, a)?)
}

pub fn pairwise_disjoint(g: &Ultragraph, a: &[Cylinder]) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, x)| a[i + 1..].iter().all(|y| intersect(g, x, y).is_none()))
}

pub fn display_clopen(g: &Ultragraph, a: &[Cylinder]) -> String {
    if a.is_empty() {
        return "empty".into();
    }
    a.iter()
        .map(|c| c.display(g))
        .collect::<Vec<_>>()
        .join(" + ")
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

    fn ed(g: &Ultragraph, name: &str, k: Option<u64>) -> EdgeRef {
        g.edge_by_name(name, k).unwrap()
    }

    fn sample_points(g: &Ultragraph) -> Vec<Point> {
        let e1 = ed(g, "e1", None);
        let e2 = ed(g, "e2", None);
        let en = |k| ed(g, "en", Some(k));
        vec![
            Point::fin(g, vec![], 0).unwrap(),
            Point::fin(g, vec![e1], 0).unwrap(),
            Point::fin(g, vec![e2], 0).unwrap(),
            Point::fin(g, vec![e1, e1], 0).unwrap(),
            Point::evper(g, vec![], vec![e1]).unwrap(),
            Point::evper(g, vec![e1], vec![en(4), e2]).unwrap(),
            Point::evper(g, vec![e1, en(3)], vec![e1]).unwrap(),
            Point::evper(g, vec![e1], vec![en(5)]).unwrap(),
            Point::evper(g, vec![e1], vec![en(6), en(4), e2]).unwrap(),
            Point::evper(g, vec![], vec![en(3), e1]).unwrap(),
            Point::evper(g, vec![e2, en(5)], vec![en(3)]).unwrap(),
        ]
    }

    #[test]
    fn finite_points_ignore_exclusions() {
        let g = example();
        let e1 = ed(&g, "e1", None);
        let en5 = ed(&g, "en", Some(5));
        let c = Cylinder::new(&g, vec![e1], g.range(e1), [en5].into()).unwrap();
        assert!(c.contains(&g, &Point::fin(&g, vec![e1], 0).unwrap()));
        assert!(!c.contains(&g, &Point::evper(&g, vec![e1], vec![en5]).unwrap()));
    }

    #[test]
    fn intersection_cases() {
        let g = example();
        let e1 = ed(&g, "e1", None);
        let en5 = ed(&g, "en", Some(5));
        let a = Cylinder::new(&g, vec![e1], EpSet::finite([4, 5]), BTreeSet::new()).unwrap();
        let b = Cylinder::new(&g, vec![e1], EpSet::finite([5, 6]), [en5].into()).unwrap();
        let ab = intersect(&g, &a, &b);
        assert!(ab.is_none(), "only vertex 5 is shared and its only edge is excluded");
        let c = Cylinder::basic(&g, vec![e1, en5], g.range(en5)).unwrap();
        assert_eq!(intersect(&g, &a, &c), Some(c.clone()));
        assert_eq!(intersect(&g, &b, &c), None);
        assert_eq!(intersect(&g, &a, &a), Some(a.clone()));
    }

    #[test]
    fn removing_a_branch_adds_an_exclusion() {
        let g = example();
        let e1 = ed(&g, "e1", None);
        let en5 = ed(&g, "en", Some(5));
        let whole = Cylinder::basic(&g, vec![e1], g.range(e1)).unwrap();
        let branch = Cylinder::basic(&g, vec![e1, en5], g.range(en5)).unwrap();
        let d = difference(&g, &whole, &branch).unwrap();
        assert_eq!(d, vec![Cylinder::new(&g, vec![e1], g.range(e1), [en5].into()).unwrap()]);
        assert!(difference(&g, &whole, &whole).unwrap().is_empty());
    }

    #[test]
    fn difference_partitions_membership() {
        let g = example();
        let e1 = ed(&g, "e1", None);
        let e2 = ed(&g, "e2", None);
        let en4 = ed(&g, "en", Some(4));
        let en5 = ed(&g, "en", Some(5));
        let cyls = vec![
            Cylinder::basic(&g, vec![], EpSet::cofinite([0, 2])).unwrap(),
            Cylinder::basic(&g, vec![e1], g.range(e1)).unwrap(),
            Cylinder::new(&g, vec![e1], EpSet::finite([1, 4, 5]), [en5].into()).unwrap(),
            Cylinder::basic(&g, vec![e1], g.mies()[0].clone()).unwrap(),
            Cylinder::basic(&g, vec![e1, en4], EpSet::singleton(2)).unwrap(),
            Cylinder::new(&g, vec![], EpSet::finite([1, 2]), [e2].into()).unwrap(),
        ];
        let pts = sample_points(&g);
        for a in &cyls {
            for b in &cyls {
                let d = difference(&g, a, b).unwrap();
                assert!(pairwise_disjoint(&g, &d));
                let i = intersect(&g, a, b);
                let u = union_same_prefix(&g, a, b);
                for p in &pts {
                    let (ia, ib) = (a.contains(&g, p), b.contains(&g, p));
                    assert_eq!(clopen_contains(&g, &d, p), ia && !ib, "{} - {} at {}", a.display(&g), b.display(&g), p.display(&g));
                    assert_eq!(i.as_ref().is_some_and(|c| c.contains(&g, p)), ia && ib);
                    if let Ok(u) = &u {
                        assert_eq!(u.contains(&g, p), ia || ib);
                    }
                }
            }
        }
    }

    #[test]
    fn shift_images_match_for_equal_components() {
        let g = example();
        let e1 = ed(&g, "e1", None);
        let e2 = ed(&g, "e2", None);
        let a = g.mies()[0].clone();
        let x = Cylinder::basic(&g, vec![e1], a.clone()).unwrap();
        let y = Cylinder::basic(&g, vec![e2, e2], a.clone()).unwrap();
        let (sx, sy) = (x.shift_image().unwrap(), y.shift_image().unwrap());
        assert!(equals(&g, &[sx.clone()], &[sy]).unwrap());
        let z = Cylinder::basic(&g, vec![e1], a.union(&EpSet::singleton(1))).unwrap();
        assert!(!equals(&g, &[sx], &[z.shift_image().unwrap()]).unwrap());
        let root = Cylinder::basic(&g, vec![], a).unwrap();
        assert_eq!(root.shift_image(), Err(UgkError::UndefinedOnLengthZero));
    }

    #[test]
    fn normalize_merges_and_separates() {
        let g = example();
        let e1 = ed(&g, "e1", None);
        let a = Cylinder::basic(&g, vec![e1], EpSet::finite([1, 3])).unwrap();
        let b = Cylinder::basic(&g, vec![e1], EpSet::finite([3, 4])).unwrap();
        let n = normalize(&g, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(n.len(), 1);
        assert_eq!(n[0].comp, EpSet::finite([1, 3, 4]));
        assert!(equals(&g, &n, &[a, b]).unwrap());
    }
}
