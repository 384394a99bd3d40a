use std::collections::BTreeMap;

use super::search::Explorer;
use super::{Certificate, Condition, ConditionReport, Verdict};
use crate::epset::EpSet;
use crate::path::Path;
use crate::ultragraph::{Affine, EdgeRef, EdgeSchema, EdgeSet, Ultragraph};

/// Simple loops based at `v` with length at most `bound`.
pub fn enumerate_simple_loops(g: &Ultragraph, v: u64, bound: usize) -> Vec<Path> {
    Explorer::new(g).simple_loops(v, bound, usize::MAX).loops
}

/// Edges `e` with `s(e) ∈ r(γ_i)` and `e ≠ γ_{i+1}` (indices taken cyclically).
pub fn exits_of_loop(g: &Ultragraph, cycle: &[EdgeRef]) -> EdgeSet {
    let n = cycle.len();
    let mut out = EdgeSet::empty(g.num_schemas());
    for i in 0..n {
        let next = cycle[(i + 1) % n];
        let leaving = g.epsilon(&g.range(cycle[i])).without(&[next].into());
        out = out.union(&leaving);
    }
    out
}

/// Indices `n` at which the range of `s` is a single vertex.
fn singleton_range_indices(s: &EdgeSchema) -> EpSet {
    match s.range_const.cardinality() {
        Some(1) => {
            let x = s.range_const.clone();
            s.range_affine
                .iter()
                .fold(s.domain.clone(), |acc, t| acc.intersect(&t.preimage(&x)))
        }
        Some(0) => match s.range_affine.as_slice() {
            [] => EpSet::empty(),
            [_] => s.domain.clone(),
            [t0, rest @ ..] => {
                let mut hits = Vec::new();
                for t in rest {
                    let (da, db) = (t0.coef as i128 - t.coef as i128, t.off as i128 - t0.off as i128);
                    if da != 0 && db % da == 0 && db / da >= 0 {
                        hits.push((db / da) as u64);
                    }
                }
                EpSet::finite(hits.into_iter().filter(|&n| {
                    s.domain.contains(n) && s.range_affine.iter().all(|t| t.eval(n) == t0.eval(n))
                }))
            }
        },
        _ => EpSet::empty(),
    }
}

/// Vertices emitting exactly one edge.
fn out_degree_one(g: &Ultragraph) -> EpSet {
    let moving: Vec<EpSet> = g
        .schemas()
        .iter()
        .filter(|s| !s.source.is_constant())
        .map(|s| s.sources())
        .collect();
    let mut once = EpSet::empty();
    for (i, a) in moving.iter().enumerate() {
        let others = moving
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(EpSet::empty(), |acc, (_, b)| acc.union(b));
        once = once.union(&a.difference(&others));
    }
    let fixed = EpSet::finite(
        g.schemas()
            .iter()
            .filter(|s| s.source.is_constant())
            .map(|s| s.source.eval(0)),
    );
    let fixed_once = EpSet::finite(fixed.iter().filter(|&c| g.edges_from(c).count() == Some(1)));
    once.difference(&fixed).union(&fixed_once)
}

/// `{n : t(n) ≤ s(n)}`.
fn at_most(t: Affine, s: Affine) -> EpSet {
    let a = t.coef as i128 - s.coef as i128;
    let d = s.off as i128 - t.off as i128;
    match a.signum() {
        1 if d < 0 => EpSet::empty(),
        1 => EpSet::finite(0..=(d / a) as u64),
        0 if d >= 0 => EpSet::all(),
        0 => EpSet::empty(),
        _ if d >= 0 => EpSet::all(),
        _ => EpSet::ap(((-d + (-a) - 1) / (-a)) as u64, 1),
    }
}

/// The single-vertex target of `s` on `idx` as an affine map.
fn singleton_target(s: &EdgeSchema) -> Affine {
    match s.range_const.min_elem() {
        Some(c) => Affine::constant(c),
        None => s.range_affine[0],
    }
}

/// Condition (L). A loop without exits is a cycle of edges whose ranges are
/// single vertices emitting exactly the next edge of the cycle.
pub fn check_l(g: &Ultragraph, bound: usize) -> ConditionReport {
    let deg1 = out_degree_one(g);
    let per: Vec<EpSet> = g
        .schemas()
        .iter()
        .map(|s| {
            let idx = singleton_range_indices(s);
            match s.range_const.min_elem() {
                Some(c) if deg1.contains(c) => idx,
                Some(_) => EpSet::empty(),
                None => idx.intersect(&s.range_affine[0].preimage(&deg1)),
            }
            .intersect(&s.source.preimage(&deg1))
        })
        .collect();
    let mut exact = per.iter().all(EpSet::is_finite);
    let mut per = per;
    if !exact {
        let falling: Vec<EpSet> = g
            .schemas()
            .iter()
            .zip(&per)
            .map(|(s, idx)| idx.intersect(&at_most(singleton_target(s), s.source)))
            .collect();
        if falling.iter().all(EpSet::is_finite) {
            let top = g
                .schemas()
                .iter()
                .zip(&falling)
                .flat_map(|(s, idx)| idx.iter().map(|n| s.source.eval(n)).collect::<Vec<_>>())
                .max();
            let window = match top {
                Some(b) => EpSet::finite(0..=b),
                None => EpSet::empty(),
            };
            per = g
                .schemas()
                .iter()
                .zip(&per)
                .map(|(s, idx)| idx.intersect(&s.source.preimage(&window)))
                .collect();
            exact = per.iter().all(EpSet::is_finite);
        }
    }
    let cutoff = g.structural_bound();
    let candidates = EdgeSet { per_schema: per };
    let mut step: BTreeMap<EdgeRef, EdgeRef> = BTreeMap::new();
    for e in candidates.iter_capped(if exact { usize::MAX } else { cutoff as usize }) {
        let w = g.range(e).min_elem().expect("nonempty range");
        let out = g.edges_from(w);
        if out.count() == Some(1) {
            let next = out.iter_capped(1).next().expect("one edge");
            if candidates.contains(next) {
                step.insert(e, next);
            }
        }
    }
    for &start in step.keys() {
        let mut cur = start;
        let mut path = vec![start];
        for _ in 0..=step.len() {
            match step.get(&cur) {
                Some(&n) if n == start => {
                    return ConditionReport::new(
                        Condition::L,
                        Verdict::Fails,
                        bound,
                        Certificate::Loop(path),
                    );
                }
                Some(&n) => {
                    cur = n;
                    path.push(n);
                }
                None => break,
            }
            if path.len() > bound.max(step.len()) + 1 {
                break;
            }
        }
    }
    if exact {
        ConditionReport::new(
            Condition::L,
            Verdict::Holds,
            bound,
            Certificate::Note(
                "no cycle of exit-free edges: every loop has an exit".into(),
            ),
        )
    } else {
        ConditionReport::unknown(
            Condition::L,
            bound,
            "infinitely many edges have a single-vertex range; no exit-free loop found in the sample",
        )
    }
}

/// Condition (K) over the sampled vertices: no simple loop or at least two.
pub fn check_k(g: &Ultragraph, bound: usize) -> ConditionReport {
    let ex = Explorer::new(g);
    let mut unknown = None;
    for v in g.sample_vertices() {
        let found = ex.simple_loops(v, bound, 2);
        match (found.loops.len(), found.exhaustive) {
            (n, _) if n >= 2 => {}
            (0, true) => {}
            (1, true) => {
                return ConditionReport::new(
                    Condition::K,
                    Verdict::Fails,
                    bound,
                    Certificate::SingleLoop {
                        vertex: v,
                        path: found.loops[0].clone(),
                    },
                );
            }
            _ => {
                unknown.get_or_insert(v);
            }
        }
    }
    match unknown {
        Some(v) => ConditionReport::unknown(
            Condition::K,
            bound,
            &format!("vertex {v}: fewer than two simple loops found and the search was cut off"),
        ),
        None => ConditionReport::new(
            Condition::K,
            Verdict::Holds,
            bound,
            Certificate::Note(format!(
                "every vertex below {} has no simple loop or at least two",
                g.structural_bound()
            )),
        ),
    }
}

/// Condition (T): from each vertex there are two distinct paths whose ranges
/// share a vertex `w`.
pub fn check_t(g: &Ultragraph, bound: usize) -> ConditionReport {
    let ex = Explorer::new(g);
    if let Some(chain) = super::wander::semi_tail_chain(g) {
        let v = g.source(EdgeRef {
            schema: chain.schema,
            index: chain.start,
        });
        return ConditionReport::new(
            Condition::T,
            Verdict::Fails,
            bound,
            Certificate::NoDoublePath { vertex: v, chain: Some(chain) },
        );
    }
    let mut unknown = None;
    for v in g.sample_vertices() {
        let (paths, _) = ex.paths_from(v, bound, 5_000);
        let ranges: Vec<EpSet> = paths.iter().map(|p| g.range(*p.last().expect("nonempty"))).collect();
        let twice = (0..ranges.len())
            .any(|i| (0..i).any(|j| !ranges[i].is_disjoint(&ranges[j])));
        if !twice {
            unknown.get_or_insert(v);
        }
    }
    match unknown {
        Some(v) => ConditionReport::unknown(
            Condition::T,
            bound,
            &format!("vertex {v}: no two paths with a common range vertex found"),
        ),
        None => ConditionReport::new(
            Condition::T,
            Verdict::Holds,
            bound,
            Certificate::Note(format!(
                "every vertex below {} reaches some vertex along two paths",
                g.structural_bound()
            )),
        ),
    }
}
