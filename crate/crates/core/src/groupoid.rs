//! Basic compact open bisections `Z(α,β,A,F)` of the boundary-path groupoid,
//! arrows between presentable points, orbits and isolated points.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::conditions::{self, ConditionReport};
use crate::cylinder::{comp_label, Cylinder};
use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::path::{format_path, is_initial_segment, Path, Point};
use crate::ultragraph::{EdgeRef, Ultragraph};

/// `Z(α,β,A,F) = {(αξ, |α|−|β|, βξ)}`: maps `D_{(β,A),F}` onto `D_{(α,A),F}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bisection {
    pub out: Path,
    pub inn: Path,
    pub comp: EpSet,
    pub excl: BTreeSet<EdgeRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub x: Point,
    pub k: i64,
    pub y: Point,
}

impl Bisection {
    pub fn new(
        g: &Ultragraph,
        out: Path,
        inn: Path,
        comp: EpSet,
        excl: BTreeSet<EdgeRef>,
    ) -> Result<Bisection> {
        Cylinder::new(g, out.clone(), comp.clone(), excl.clone())?;
        Cylinder::new(g, inn.clone(), comp.clone(), excl.clone())?;
        Ok(Bisection {
            out,
            inn,
            comp,
            excl,
        })
    }

    pub(crate) fn raw(g: &Ultragraph, out: Path, inn: Path, comp: EpSet, excl: BTreeSet<EdgeRef>) -> Bisection {
        let c = Cylinder::raw(g, inn, comp, excl);
        Bisection {
            out,
            inn: c.prefix,
            comp: c.comp,
            excl: c.excl,
        }
    }

    pub fn source(&self) -> Cylinder {
        Cylinder {
            prefix: self.inn.clone(),
            comp: self.comp.clone(),
            excl: self.excl.clone(),
        }
    }

    pub fn range(&self) -> Cylinder {
        Cylinder {
            prefix: self.out.clone(),
            comp: self.comp.clone(),
            excl: self.excl.clone(),
        }
    }

    pub fn inverse(&self) -> Bisection {
        Bisection {
            out: self.inn.clone(),
            inn: self.out.clone(),
            comp: self.comp.clone(),
            excl: self.excl.clone(),
        }
    }

    pub fn lag(&self) -> i64 {
        self.out.len() as i64 - self.inn.len() as i64
    }

    pub fn is_empty(&self, g: &Ultragraph) -> bool {
        self.source().is_empty(g)
    }

    pub fn apply(&self, g: &Ultragraph, p: &Point) -> Result<Point> {
        if !self.source().contains(g, p) {
            return Err(UgkError::NotInSource);
        }
        Ok(p.drop_edges(self.inn.len()).prepend(&self.out))
    }

    /// Restriction to the part of the source inside `piece`, where `piece`
    /// lies in the source cylinder and its prefix extends `β`.
    pub(crate) fn restrict_source(&self, piece: &Cylinder) -> Bisection {
        let tail = &piece.prefix[self.inn.len()..];
        let mut out = self.out.clone();
        out.extend_from_slice(tail);
        Bisection {
            out,
            inn: piece.prefix.clone(),
            comp: piece.comp.clone(),
            excl: piece.excl.clone(),
        }
    }

    pub(crate) fn restrict_range(&self, piece: &Cylinder) -> Bisection {
        self.inverse().restrict_source(piece).inverse()
    }

    pub fn contains_arrow(&self, g: &Ultragraph, a: &Arrow) -> bool {
        a.k == self.lag()
            && self
                .apply(g, &a.y)
                .is_ok_and(|x| x == a.x)
    }

    pub fn display(&self, g: &Ultragraph) -> String {
        let excl: Vec<String> = self.excl.iter().map(|&e| g.edge_label(e)).collect();
        format!(
            "Z({}; {}; {}; {{{}}})",
            format_path(g, &self.out),
            format_path(g, &self.inn),
            comp_label(g, &self.comp),
            excl.join(", ")
        )
    }
}

/// Intersection of two basic bisections; the prefixes on both sides must be
/// equal or extend each other by the same suffix.
pub fn intersect(g: &Ultragraph, a: &Bisection, b: &Bisection) -> Option<Bisection> {
    let out = if a.out == b.out && a.inn == b.inn {
        let comp = a.comp.intersect(&b.comp);
        if comp.is_empty() {
            return None;
        }
        Bisection::raw(g, a.out.clone(), a.inn.clone(), comp, a.excl.union(&b.excl).copied().collect())
    } else if let Some(z) = nested(g, a, b) {
        z
    } else if let Some(z) = nested(g, b, a) {
        z
    } else {
        return None;
    };
    (!out.is_empty(g)).then_some(out)
}

fn nested(g: &Ultragraph, coarse: &Bisection, fine: &Bisection) -> Option<Bisection> {
    if !is_initial_segment(&coarse.out, &fine.out) || !is_initial_segment(&coarse.inn, &fine.inn) {
        return None;
    }
    let s1 = &fine.out[coarse.out.len()..];
    let s2 = &fine.inn[coarse.inn.len()..];
    (s1 == s2 && coarse.source().allows(g, s1[0])).then(|| fine.clone())
}

/// The product set `a·b`: arrows `(x, k+l, z)` with `(x,k,y) ∈ a`, `(y,l,z) ∈ b`.
pub fn compose(g: &Ultragraph, a: &Bisection, b: &Bisection) -> Option<Bisection> {
    let out = if a.inn == b.out {
        let comp = a.comp.intersect(&b.comp);
        if comp.is_empty() {
            return None;
        }
        Bisection::raw(g, a.out.clone(), b.inn.clone(), comp, a.excl.union(&b.excl).copied().collect())
    } else if is_initial_segment(&a.inn, &b.out) {
        let delta = &b.out[a.inn.len()..];
        if !a.source().allows(g, delta[0]) {
            return None;
        }
        let mut out = a.out.clone();
        out.extend_from_slice(delta);
        Bisection {
            out,
            inn: b.inn.clone(),
            comp: b.comp.clone(),
            excl: b.excl.clone(),
        }
    } else if is_initial_segment(&b.out, &a.inn) {
        let delta = &a.inn[b.out.len()..];
        if !b.range().allows(g, delta[0]) {
            return None;
        }
        let mut inn = b.inn.clone();
        inn.extend_from_slice(delta);
        Bisection {
            out: a.out.clone(),
            inn,
            comp: a.comp.clone(),
            excl: a.excl.clone(),
        }
    } else {
        return None;
    };
    (!out.is_empty(g)).then_some(out)
}

/// Default cap on the number of points returned by [`orbit_enumerate`].
pub const ORBIT_CAP: usize = 4096;

/// Points sharing a tail with `p`: every re-prefixing by a path of length at
/// most `budget`, taking at most `budget` incoming members per schema.
pub fn orbit_enumerate(g: &Ultragraph, p: &Point, budget: usize) -> Vec<Point> {
    orbit_enumerate_capped(g, p, budget, ORBIT_CAP)
}

pub fn orbit_enumerate_capped(g: &Ultragraph, p: &Point, budget: usize, cap: usize) -> Vec<Point> {
    let mut found: BTreeSet<Point> = BTreeSet::new();
    match p {
        Point::Fin { mie, .. } => {
            let base = Point::Fin {
                prefix: Vec::new(),
                mie: *mie,
            };
            let first = g
                .edges_with_range_containing(&g.mies()[*mie])
                .iter_capped(budget.max(1))
                .collect::<Vec<_>>();
            backward(g, &base, first, budget, cap, &mut found);
        }
        Point::EvPer { head, cycle } => {
            let tail = p.drop_edges(head.len());
            for j in 0..cycle.len() {
                let base = tail.drop_edges(j);
                let v = g.source(base.edge(0).expect("infinite point"));
                let first = g.edges_into(v).iter_capped(budget.max(1)).collect();
                backward(g, &base, first, budget, cap, &mut found);
            }
        }
    }
    found.into_iter().collect()
}

fn backward(
    g: &Ultragraph,
    base: &Point,
    first: Vec<EdgeRef>,
    budget: usize,
    cap: usize,
    found: &mut BTreeSet<Point>,
) {
    found.insert(base.clone());
    let mut queue: VecDeque<(Path, Vec<EdgeRef>)> = VecDeque::new();
    queue.push_back((Vec::new(), first));
    while let Some((rho, preds)) = queue.pop_front() {
        if rho.len() >= budget {
            continue;
        }
        for e in preds {
            if found.len() >= cap {
                return;
            }
            let mut next = vec![e];
            next.extend_from_slice(&rho);
            found.insert(base.prepend(&next));
            let into = g.edges_into(g.source(e)).iter_capped(budget.max(1)).collect();
            queue.push_back((next, into));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Isolation {
    pub isolated: bool,
    /// An exit of the cycle, when one exists.
    pub exit: Option<EdgeRef>,
}

/// An eventually periodic point is isolated exactly when its cycle has no
/// exit; finite-type points never are.
pub fn is_isolated(g: &Ultragraph, p: &Point) -> Isolation {
    match p {
        Point::Fin { mie, .. } => Isolation {
            isolated: false,
            exit: g.epsilon(&g.mies()[*mie]).iter_capped(1).next(),
        },
        Point::EvPer { cycle, .. } => {
            let exit = conditions::exits_of_loop(g, cycle).iter_capped(1).next();
            Isolation {
                isolated: exit.is_none(),
                exit,
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EffectivenessReport {
    pub effective: Option<bool>,
    pub condition_l: ConditionReport,
    pub statements: Vec<&'static str>,
}

/// Effectiveness, Condition (L), density of non-eventually-periodic points and
/// topological principality are equivalent; the verdict comes from (L).
pub fn effectiveness_report(g: &Ultragraph, bound: usize) -> EffectivenessReport {
    let l = conditions::check_l(g, bound);
    EffectivenessReport {
        effective: l.verdict.as_bool(),
        condition_l: l,
        statements: vec![
            "the groupoid is effective",
            "every loop has an exit (condition L)",
            "points that are not eventually periodic are dense",
            "the groupoid is topologically principal",
        ],
    }
}

impl EffectivenessReport {
    pub fn to_json(&self, g: &Ultragraph) -> serde_json::Value {
        serde_json::json!({
            "effective": self.effective,
            "condition_l": self.condition_l.to_json(g),
            "equivalent_statements": self.statements,
        })
    }
}

/// `(x, k, y)` is an arrow when `σ^m(x) = σ^n(y)` for some `m − n = k`.
pub fn is_arrow(x: &Point, k: i64, y: &Point, search: usize) -> bool {
    for n in 0..=search {
        let m = n as i64 + k;
        if m < 0 {
            continue;
        }
        let (m, n) = (m as usize, n);
        let long_enough = |p: &Point, l: usize| p.length().is_none_or(|len| len >= l);
        if long_enough(x, m) && long_enough(y, n) && x.drop_edges(m) == y.drop_edges(n) {
            return true;
        }
    }
    false
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

    #[test]
    fn apply_reprefixes() {
        let g = example();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let e2 = g.edge_by_name("e2", None).unwrap();
        let en5 = g.edge_by_name("en", Some(5)).unwrap();
        let a = g.mies()[0].clone();
        let z = Bisection::new(&g, vec![e1], vec![e2], a.clone(), BTreeSet::new()).unwrap();
        let p = Point::fin(&g, vec![e2], 0).unwrap();
        assert_eq!(z.apply(&g, &p).unwrap(), Point::fin(&g, vec![e1], 0).unwrap());
        let q = Point::evper(&g, vec![e2], vec![en5]).unwrap();
        assert_eq!(z.apply(&g, &q).unwrap(), Point::evper(&g, vec![e1], vec![en5]).unwrap());
        assert_eq!(z.apply(&g, &Point::fin(&g, vec![e1], 0).unwrap()), Err(UgkError::NotInSource));
        assert_eq!(z.inverse().inverse(), z);
        assert_eq!(z.inverse().source(), z.range());
    }

    #[test]
    fn composition_and_intersection() {
        let g = example();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let e2 = g.edge_by_name("e2", None).unwrap();
        let en5 = g.edge_by_name("en", Some(5)).unwrap();
        let a = g.mies()[0].clone();
        let z = Bisection::new(&g, vec![e1], vec![e2], a.clone(), BTreeSet::new()).unwrap();
        let diag = compose(&g, &z, &z.inverse()).unwrap();
        assert_eq!(diag.out, diag.inn);
        let fine = Bisection::new(&g, vec![e1, en5], vec![e2, en5], g.range(en5), BTreeSet::new()).unwrap();
        assert_eq!(intersect(&g, &z, &fine), Some(fine.clone()));
        assert_eq!(intersect(&g, &z, &z), Some(z.clone()));
        let w = Bisection::new(&g, vec![e2], vec![e1, en5], g.range(en5), BTreeSet::new()).unwrap();
        let zw = compose(&g, &z, &w).unwrap();
        assert_eq!((zw.out, zw.inn, zw.comp), (vec![e1], vec![e1, en5], g.range(en5)));
        let zf = compose(&g, &z.inverse(), &fine).unwrap();
        assert_eq!((zf.out, zf.inn), (vec![e2, en5], vec![e2, en5]));
    }

    #[test]
    fn arrows_follow_shifts() {
        let g = example();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let en5 = g.edge_by_name("en", Some(5)).unwrap();
        let x = Point::evper(&g, vec![e1], vec![en5]).unwrap();
        let y = Point::evper(&g, vec![], vec![en5]).unwrap();
        assert!(is_arrow(&x, 1, &y, 4));
        assert!(is_arrow(&x, 3, &y, 4));
        let z = Bisection::new(&g, vec![e1], vec![], EpSet::finite([5]), BTreeSet::new()).unwrap();
        assert!(z.contains_arrow(&g, &Arrow { x: x.clone(), k: 1, y: y.clone() }));
    }

    #[test]
    fn orbit_of_a_finite_point() {
        let g = example();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let orb = orbit_enumerate(&g, &Point::fin(&g, vec![e1], 0).unwrap(), 3);
        assert!(orb.contains(&Point::Fin { prefix: vec![], mie: 0 }));
        assert!(orb.contains(&Point::Fin { prefix: vec![e1, e1, e1], mie: 0 }));
        assert!(orb.iter().all(|p| matches!(p, Point::Fin { prefix, .. } if prefix.len() <= 3)));
    }

    #[test]
    fn isolation_needs_an_exit_free_cycle() {
        let g = Ultragraph::parse("universe {0}\nedge e : src 0 -> {0}").unwrap();
        let e = g.edge_by_name("e", None).unwrap();
        let p = Point::evper(&g, vec![], vec![e]).unwrap();
        assert!(is_isolated(&g, &p).isolated);
        let h = Ultragraph::parse("universe {0,1}\nedge e : src 0 -> {0,1}\nedge f : src 1 -> {0}").unwrap();
        let e = h.edge_by_name("e", None).unwrap();
        let q = Point::evper(&h, vec![], vec![e]).unwrap();
        let iso = is_isolated(&h, &q);
        assert!(!iso.isolated);
        assert_eq!(iso.exit, Some(h.edge_by_name("f", None).unwrap()));
    }
}
