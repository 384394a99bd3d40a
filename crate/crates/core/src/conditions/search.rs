use std::collections::{BTreeSet, VecDeque};

use crate::epset::EpSet;
use crate::path::Path;
use crate::ultragraph::{EdgeRef, Ultragraph};

/// Caps shared by the bounded searches. Every result records whether a cap
/// was reached; only untruncated searches are reported as exhaustive.
pub(crate) struct Explorer<'a> {
    pub g: &'a Ultragraph,
    pub cutoff: u64,
    pub cap: usize,
    pub max_steps: usize,
}

pub(crate) struct LoopSearch {
    pub loops: Vec<Path>,
    pub exhaustive: bool,
}

impl<'a> Explorer<'a> {
    pub fn new(g: &'a Ultragraph) -> Explorer<'a> {
        Explorer {
            g,
            cutoff: g.structural_bound(),
            cap: 8,
            max_steps: 200_000,
        }
    }

    pub fn out_edges(&self, v: u64) -> (Vec<EdgeRef>, bool) {
        let es = self.g.edges_from(v);
        (es.iter_capped(self.cap).collect(), es.is_finite())
    }

    /// Elements of `set` inside the universe; infinite sets are cut at the sample bound.
    pub fn vertices_in(&self, set: &EpSet) -> (Vec<u64>, bool) {
        let set = set.intersect(self.g.universe());
        if set.is_finite() {
            (set.iter().collect(), true)
        } else {
            (set.enumerate_up_to(self.cutoff), false)
        }
    }

    /// Vertices from which `v` can be reached by a path (including `v`).
    pub fn coreach(&self, v: u64) -> (BTreeSet<u64>, bool) {
        let mut seen = BTreeSet::from([v]);
        let mut exact = true;
        let mut queue = VecDeque::from([v]);
        while let Some(w) = queue.pop_front() {
            let into = self.g.edges_into(w);
            if !into.is_finite() {
                exact = false;
            }
            for e in into.iter_capped(self.cap) {
                let u = self.g.source(e);
                if u >= self.cutoff {
                    exact = false;
                    continue;
                }
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        (seen, exact)
    }

    /// Simple loops based at `v` of length at most `bound`, shortest first,
    /// stopping once `want` loops are known.
    pub fn simple_loops(&self, v: u64, bound: usize, want: usize) -> LoopSearch {
        let g = self.g;
        let (co, co_exact) = self.coreach(v);
        let (first, mut exhaustive) = self.out_edges(v);
        let mut loops = Vec::new();
        let mut queue: VecDeque<Path> = first.into_iter().map(|e| vec![e]).collect();
        let mut steps = 0;
        while let Some(path) = queue.pop_front() {
            steps += 1;
            if steps > self.max_steps {
                return LoopSearch {
                    loops,
                    exhaustive: false,
                };
            }
            let r = g.range(*path.last().expect("nonempty"));
            if r.contains(v) {
                loops.push(path.clone());
                if loops.len() >= want {
                    return LoopSearch {
                        loops,
                        exhaustive: false,
                    };
                }
            }
            let rest = r.difference(&EpSet::singleton(v));
            let (next, exact) = if co_exact {
                (
                    co.iter().copied().filter(|&w| rest.contains(w)).collect(),
                    true,
                )
            } else {
                self.vertices_in(&rest)
            };
            exhaustive &= exact;
            if next.is_empty() {
                continue;
            }
            if path.len() >= bound {
                exhaustive = false;
                continue;
            }
            for w in next {
                let (out, exact) = self.out_edges(w);
                exhaustive &= exact;
                for e in out {
                    let mut p = path.clone();
                    p.push(e);
                    queue.push_back(p);
                }
            }
        }
        LoopSearch {
            loops,
            exhaustive: exhaustive && co_exact,
        }
    }

    /// Paths starting at `v`, breadth first, up to length `bound`. The flag
    /// reports whether the enumeration was complete.
    pub fn paths_from(&self, v: u64, bound: usize, limit: usize) -> (Vec<Path>, bool) {
        let (first, mut complete) = self.out_edges(v);
        let mut out = Vec::new();
        let mut queue: VecDeque<Path> = first.into_iter().map(|e| vec![e]).collect();
        while let Some(path) = queue.pop_front() {
            if out.len() >= limit {
                return (out, false);
            }
            out.push(path.clone());
            if path.len() >= bound {
                complete = false;
                continue;
            }
            let (next, exact) = self.vertices_in(&self.g.range(*path.last().expect("nonempty")));
            complete &= exact;
            for w in next {
                let (es, exact) = self.out_edges(w);
                complete &= exact;
                for e in es {
                    let mut p = path.clone();
                    p.push(e);
                    queue.push_back(p);
                }
            }
        }
        (out, complete)
    }
}
