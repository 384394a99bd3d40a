//! Brute-force differential oracle. Vertices and edge indices are cut off
//! at `N`, lattice elements and boundary points are enumerated exhaustively,
//! and membership is decided from first principles on the truncation.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cylinder::{self, Cylinder};
use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::path::{Path, Point};
use crate::ultragraph::{EdgeRef, EdgeSchema, Ultragraph};

/// Bit width of the vertex masks used for membership tests.
const MASK_BITS: u32 = 64;

/// The presentation restricted to vertices and edge indices below `n`.
#[derive(Clone, Debug)]
pub struct TruncatedUniverse<'a> {
    pub g: &'a Ultragraph,
    pub n: u64,
    pub vertices: Vec<u64>,
    /// Edges with index and source below `n`, in schema then index order.
    pub edges: Vec<EdgeRef>,
}

fn mask(set: &EpSet) -> u64 {
    set.truncated_mask(MASK_BITS)
}

impl<'a> TruncatedUniverse<'a> {
    pub fn new(g: &'a Ultragraph, n: u64) -> Result<TruncatedUniverse<'a>> {
        if n > MASK_BITS as u64 {
            return Err(UgkError::BudgetExceeded(format!(
                "truncation {n} exceeds {MASK_BITS}"
            )));
        }
        let vertices = g.universe().enumerate_up_to(n);
        let mut edges = Vec::new();
        for (i, s) in g.schemas().iter().enumerate() {
            for idx in s.domain.enumerate_up_to(n) {
                if s.source.eval(idx) < n {
                    edges.push(EdgeRef {
                        schema: i as u32,
                        index: idx,
                    });
                }
            }
        }
        Ok(TruncatedUniverse { g, n, vertices, edges })
    }

    fn src(&self, e: EdgeRef) -> u64 {
        let s: &EdgeSchema = &self.g.schemas()[e.schema as usize];
        s.source.eval(e.index)
    }

    fn range_mask(&self, e: EdgeRef) -> u64 {
        let s = &self.g.schemas()[e.schema as usize];
        let mut m = mask(&s.range_const);
        for t in &s.range_affine {
            let v = t.eval(e.index);
            if v < MASK_BITS as u64 {
                m |= 1 << v;
            }
        }
        m
    }

    /// Materialised edges that may follow `e`.
    fn successors(&self, e: EdgeRef) -> Vec<EdgeRef> {
        let r = self.range_mask(e);
        self.edges
            .iter()
            .copied()
            .filter(|&f| r >> self.src(f) & 1 == 1)
            .collect()
    }

    /// Vertices emitting more edges below `2n` than below `n`; a heuristic
    /// stand-in for emitting infinitely many.
    pub fn heuristic_infinite_emitters(&self) -> u64 {
        let mut m = 0u64;
        for &v in &self.vertices {
            let mut lo = 0;
            let mut hi = 0;
            for s in self.g.schemas() {
                for idx in s.domain.enumerate_up_to(2 * self.n) {
                    if s.source.eval(idx) == v {
                        hi += 1;
                        if idx < self.n {
                            lo += 1;
                        }
                    }
                }
            }
            if hi > lo && lo > 0 {
                m |= 1 << v;
            }
        }
        m
    }

    /// Minimal infinite emitters of the lattice generated by the ranges of
    /// edges with index below `2n`, as masks over `[0, n)`.
    pub fn lattice_mies(&self) -> Vec<u64> {
        let low = if self.n >= 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let ie = self.heuristic_infinite_emitters();
        let mut gens: BTreeSet<EpSet> = BTreeSet::new();
        for s in self.g.schemas() {
            for idx in s.domain.enumerate_up_to(2 * self.n) {
                let r = s.range_at(idx);
                if !r.is_finite() {
                    gens.insert(r);
                }
            }
        }
        let mut closed = gens.clone();
        let mut frontier: Vec<EpSet> = gens.iter().cloned().collect();
        while let Some(a) = frontier.pop() {
            for b in &gens {
                let c = a.intersect(b);
                if !c.is_finite() && closed.insert(c.clone()) {
                    frontier.push(c);
                }
            }
        }
        let cands: BTreeSet<u64> = closed
            .iter()
            .map(|c| mask(c) & low)
            .filter(|m| m & ie == 0)
            .collect();
        let mut out: BTreeSet<u64> = (0..self.n).filter(|v| ie >> v & 1 == 1).map(|v| 1 << v).collect();
        for &m in &cands {
            if cands.iter().all(|&o| o == m || o & !m != 0) {
                out.insert(m);
            }
        }
        out.into_iter().collect()
    }

    fn paths(&self, max_len: usize) -> Vec<Path> {
        let mut out: Vec<Path> = self.edges.iter().map(|&e| vec![e]).collect();
        let mut layer = out.clone();
        for _ in 1..max_len {
            let mut next = Vec::new();
            for p in &layer {
                for f in self.successors(*p.last().expect("nonempty")) {
                    let mut q = p.clone();
                    q.push(f);
                    next.push(q);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// Every finite-type point with at most `complexity − 1` edges and every
    /// eventually periodic point with `|head| + |cycle| ≤ complexity`.
    pub fn point_enum(&self, complexity: usize) -> Vec<Point> {
        let g = self.g;
        let mut out = BTreeSet::new();
        for k in 0..g.mies().len() {
            let a = mask(&g.mies()[k]);
            out.insert(Point::Fin { prefix: Vec::new(), mie: k });
            for p in self.paths(complexity.saturating_sub(1)) {
                if a & !self.range_mask(*p.last().expect("nonempty")) == 0 {
                    out.insert(Point::Fin { prefix: p, mie: k });
                }
            }
        }
        let all = self.paths(complexity);
        let mut by_len: Vec<Vec<&Path>> = vec![Vec::new(); complexity + 1];
        for p in &all {
            by_len[p.len()].push(p);
        }
        for c in &all {
            let v = self.src(c[0]);
            if self.range_mask(*c.last().expect("nonempty")) >> v & 1 == 0 {
                continue;
            }
            out.insert(Point::evper_unchecked(Vec::new(), c.clone()));
            for heads in &by_len[1..=complexity - c.len()] {
                for h in heads {
                    if self.range_mask(*h.last().expect("nonempty")) >> v & 1 == 1 {
                        out.insert(Point::evper_unchecked((*h).clone(), c.clone()));
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

/// The largest truncation in `2..=8` whose point enumeration at
/// `complexity` stays within `cap`.
pub fn auto_truncation(g: &Ultragraph, complexity: usize, cap: usize) -> u64 {
    let mut best = 2;
    for n in 2..=8 {
        match TruncatedUniverse::new(g, n) {
            Ok(t) if t.point_enum(complexity).len() <= cap => best = n,
            _ => break,
        }
    }
    best
}

/// Production MIEs as sorted masks over `[0, n)`.
pub fn production_mie_masks(g: &Ultragraph, n: u32) -> Vec<u64> {
    let mut v: Vec<u64> = g.mies().iter().map(|m| m.truncated_mask(n)).collect();
    v.sort_unstable();
    v
}

/// Whether the production MIEs agree with [`TruncatedUniverse::lattice_mies`]
/// on `[0, n)`.
pub fn mie_agreement(g: &Ultragraph, n: u64) -> Result<(Vec<u64>, Vec<u64>)> {
    let t = TruncatedUniverse::new(g, n)?;
    Ok((production_mie_masks(g, n as u32), t.lattice_mies()))
}

/// Set expressions over cylinders.
#[derive(Clone, Debug)]
pub enum SetExpr {
    Cyl(Cylinder),
    Union(Vec<SetExpr>),
    Inter(Box<SetExpr>, Box<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
}

/// Membership straight from the definition of `D_{(β,B),F}`.
pub fn member_cylinder(g: &Ultragraph, c: &Cylinder, p: &Point) -> bool {
    let b = c.prefix.len();
    if let Point::Fin { prefix, mie } = p {
        if prefix.len() == b {
            return *prefix == c.prefix && mask(&g.mies()[*mie]) & !mask(&c.comp) == 0;
        }
        if prefix.len() < b {
            return false;
        }
    }
    let next = p.edge(b).expect("long enough");
    (0..b).all(|i| p.edge(i) == Some(c.prefix[i]))
        && mask(&c.comp) >> g.source(next) & 1 == 1
        && !c.excl.contains(&next)
}

pub fn member(g: &Ultragraph, e: &SetExpr, p: &Point) -> bool {
    match e {
        SetExpr::Cyl(c) => member_cylinder(g, c, p),
        SetExpr::Union(v) => v.iter().any(|x| member(g, x, p)),
        SetExpr::Inter(a, b) => member(g, a, p) && member(g, b, p),
        SetExpr::Diff(a, b) => member(g, a, p) && !member(g, b, p),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DiffReport {
    pub trials: usize,
    pub points: usize,
    pub checks: u64,
    pub divergences: usize,
    pub first: Vec<String>,
}

impl DiffReport {
    fn diverge(&mut self, msg: String) {
        self.divergences += 1;
        if self.first.len() < 5 {
            self.first.push(msg);
        }
    }
}

/// A random valid cylinder on the truncation; `near` steers the prefix.
pub fn random_cylinder(t: &TruncatedUniverse, rng: &mut ChaCha8Rng, near: Option<&Cylinder>) -> Cylinder {
    let g = t.g;
    loop {
        let mut prefix: Path = match near {
            Some(c) if rng.random_bool(0.5) => c.prefix.clone(),
            _ => Vec::new(),
        };
        let extra = rng.random_range(0..=2);
        for _ in 0..extra {
            let next: Vec<EdgeRef> = match prefix.last() {
                None => t.edges.clone(),
                Some(&e) => t.successors(e),
            };
            match next.choose(rng) {
                Some(&e) => prefix.push(e),
                None => break,
            }
        }
        let whole = match prefix.last() {
            Some(&e) => g.range(e),
            None => g.universe().clone(),
        };
        let low: Vec<u64> = whole.enumerate_up_to(t.n);
        let mut choices: Vec<EpSet> = Vec::new();
        if !prefix.is_empty() {
            choices.push(whole.clone());
        }
        if let Some(&w) = low.choose(rng) {
            choices.push(EpSet::singleton(w));
            if let Some(&w2) = low.choose(rng) {
                choices.push(EpSet::finite([w, w2]));
            }
        }
        for k in g.mies_within(&whole) {
            let m = g.mies()[k].clone();
            if let Some(&w) = low.choose(rng) {
                choices.push(m.union(&EpSet::singleton(w)));
            }
            choices.push(m);
        }
        if let Some(&e) = t.edges.choose(rng) {
            let meet = whole.intersect(&g.range(e));
            if !meet.is_empty() {
                choices.push(meet);
            }
        }
        let Some(comp) = choices.choose(rng).cloned() else {
            continue;
        };
        if !g.is_generalized_vertex(&comp) {
            continue;
        }
        let from: Vec<EdgeRef> = g
            .epsilon(&comp)
            .iter_capped(t.n as usize)
            .filter(|e| t.edges.contains(e))
            .collect();
        let mut excl = BTreeSet::new();
        for _ in 0..rng.random_range(0..=2) {
            if let Some(&e) = from.choose(rng) {
                excl.insert(e);
            }
        }
        if let Ok(c) = Cylinder::new(g, prefix, comp, excl) {
            return c;
        }
    }
}

/// Compares intersect, union, difference and normalize against [`member`]
/// on every enumerated point for `trials` random cylinder pairs.
pub fn diff_test(g: &Ultragraph, seed: u64, trials: usize, n: u64, complexity: usize) -> Result<DiffReport> {
    let t = TruncatedUniverse::new(g, n)?;
    let points = t.point_enum(complexity);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = DiffReport {
        trials,
        points: points.len(),
        ..DiffReport::default()
    };
    for trial in 0..trials {
        let a = random_cylinder(&t, &mut rng, None);
        let b = random_cylinder(&t, &mut rng, Some(&a));
        let ea = SetExpr::Cyl(a.clone());
        let eb = SetExpr::Cyl(b.clone());
        let meet = cylinder::intersect(g, &a, &b);
        let union = (a.prefix == b.prefix).then(|| cylinder::union_same_prefix(g, &a, &b)).transpose()?;
        let diff = cylinder::difference(g, &a, &b)?;
        let norm = cylinder::normalize(g, &[a.clone(), b.clone()])?;
        let want_meet = SetExpr::Inter(Box::new(ea.clone()), Box::new(eb.clone()));
        let want_union = SetExpr::Union(vec![ea.clone(), eb.clone()]);
        let want_diff = SetExpr::Diff(Box::new(ea), Box::new(eb));
        let label = |what: &str, p: &Point| {
            format!(
                "trial {trial}: {what} at {} for {} and {}",
                p.display(g),
                a.display(g),
                b.display(g)
            )
        };
        for p in &points {
            rep.checks += 4;
            let got = meet.as_ref().is_some_and(|c| c.contains(g, p));
            if got != member(g, &want_meet, p) {
                rep.diverge(label("intersect", p));
            }
            if let Some(u) = &union {
                if u.contains(g, p) != member(g, &want_union, p) {
                    rep.diverge(label("union", p));
                }
            }
            let hits = diff.iter().filter(|c| c.contains(g, p)).count();
            if hits > 1 || (hits == 1) != member(g, &want_diff, p) {
                rep.diverge(label("difference", p));
            }
            let hits = norm.iter().filter(|c| c.contains(g, p)).count();
            if hits > 1 || (hits == 1) != member(g, &want_union, p) {
                rep.diverge(label("normalize", p));
            }
        }
    }
    Ok(rep)
}

/// A random presentation with a self-loop family guaranteeing no sinks, or
/// `None` when the draw is invalid.
pub fn random_presentation(seed: u64) -> Option<Ultragraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rand_set = |rng: &mut ChaCha8Rng| -> EpSet {
        match rng.random_range(0..4) {
            0 => EpSet::ap(rng.random_range(0..6), rng.random_range(1..4)),
            1 => EpSet::cofinite((0..rng.random_range(1..5)).map(|_| rng.random_range(0..8))),
            2 => EpSet::finite((0..rng.random_range(1..4)).map(|_| rng.random_range(0..10))),
            _ => EpSet::ap(rng.random_range(0..4), 1).difference(&EpSet::finite([rng.random_range(0..8)])),
        }
    };
    let mut text = String::from("universe all\nfamily z(n) for n in all : src n -> { n }\n");
    for i in 0..rng.random_range(1..4) {
        let constant = rand_set(&mut rng);
        let src = if rng.random_bool(0.5) {
            rng.random_range(0..6).to_string()
        } else {
            "n".to_string()
        };
        let domain = if rng.random_bool(0.3) {
            EpSet::finite([rng.random_range(0..6)])
        } else {
            rand_set(&mut rng)
        };
        let term = if rng.random_bool(0.5) { ", n+1" } else { "" };
        text.push_str(&format!(
            "family f{i}(n) for n in {domain} : src {src} -> {{ {constant}{term} }}\n"
        ));
    }
    Ultragraph::parse(&text).ok()
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
    fn example_lattice_has_one_pattern() {
        let g = example();
        let t = TruncatedUniverse::new(&g, 40).unwrap();
        let want = EpSet::ap(3, 1).truncated_mask(40);
        assert_eq!(t.lattice_mies(), vec![want]);
    }

    #[test]
    fn graph_truncation_detects_bundles() {
        let g = Ultragraph::parse("universe {0,1}\nfamily g(n) for n in all : src 0 -> { 1 }\nedge h : src 1 -> { 0 }")
            .unwrap();
        let t = TruncatedUniverse::new(&g, 20).unwrap();
        assert_eq!(t.lattice_mies(), vec![1]);
    }

    #[test]
    fn small_diff_test_is_clean() {
        let g = example();
        let rep = diff_test(&g, 7, 40, 7, 4).unwrap();
        assert!(rep.points > 0);
        assert_eq!(rep.divergences, 0, "{:?}", rep.first);
    }
}
