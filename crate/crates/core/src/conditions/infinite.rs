use super::{Certificate, Condition, ConditionReport, Verdict};
use crate::epset::EpSet;
use crate::ultragraph::{Affine, EdgeSet, Ultragraph};

/// Indices `n` with `t(n) < s(n)`.
fn below_source(t: &Affine, s: &Affine) -> EpSet {
    let threshold = (t.off - s.off).unsigned_abs() + 1;
    let at = |a: &Affine, n: u64| a.coef as i128 * n as i128 + a.off as i128;
    EpSet::from_fn(threshold, 1, |n| at(t, n) < at(s, n))
}

/// Sources of edges that have a range vertex in `r` strictly below their source.
fn descending_sources(g: &Ultragraph, r: &EpSet) -> EpSet {
    let mut out = EpSet::empty();
    for s in g.schemas() {
        let hit = s.range_const.intersect(r);
        if let Some(m) = hit.min_elem() {
            let above = s.source.preimage(&EpSet::cofinite(0..=m));
            out = out.union(&s.source.image(&s.domain.intersect(&above)));
        }
        for t in &s.range_affine {
            let idx = s.domain.intersect(&t.preimage(r)).intersect(&below_source(t, &s.source));
            out = out.union(&s.source.image(&idx));
        }
    }
    out
}

/// Sources of the edges in `set`.
fn sources_of(g: &Ultragraph, set: &EdgeSet) -> EpSet {
    g.schemas()
        .iter()
        .zip(&set.per_schema)
        .fold(EpSet::empty(), |acc, (s, idx)| acc.union(&s.source.image(idx)))
}

/// Vertices from which some path of length at least one ends in an edge
/// whose range contains `a`, computed on the sample and extended periodically.
fn return_set(g: &Ultragraph, base: &EpSet) -> EpSet {
    let p = g.structural_period();
    let t = g.structural_bound() - 2 * p;
    let window: Vec<u64> = g.universe().enumerate_up_to(t + p);
    let mut found = base.intersect(&EpSet::finite(0..t + p));
    loop {
        let into = g.edges_into_set(&found);
        let mut grew = false;
        for &v in &window {
            if !found.contains(v) && !g.edges_from(v).intersect(&into).is_empty() {
                found = found.union(&EpSet::singleton(v));
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    EpSet::from_fn(t, p, |n| found.contains(n)).intersect(g.universe())
}

/// Condition (∞): for every minimal infinite emitter `A`, infinitely many
/// edges of ε(A) have a range from which a path returns to a range containing `A`.
pub fn check_infty(g: &Ultragraph, bound: usize) -> ConditionReport {
    let mut last = None;
    for (k, a) in g.mies().iter().enumerate() {
        let base = sources_of(g, &g.edges_with_range_containing(a));
        let r = return_set(g, &base);
        let sound = r.is_subset(&base.union(&descending_sources(g, &r)));
        let qualifying = g.epsilon(a).intersect(&g.edges_into_set(&r));
        if sound && !qualifying.is_finite() {
            last = Some(Certificate::Return {
                mie: k,
                ret: r,
                qualifying,
            });
            continue;
        }
        let closed = base.is_subset(&r) && sources_of(g, &g.edges_into_set(&r)).is_subset(&r);
        if closed && qualifying.is_finite() {
            return ConditionReport::new(
                Condition::INF,
                Verdict::Fails,
                bound,
                Certificate::Return {
                    mie: k,
                    ret: r,
                    qualifying,
                },
            );
        }
        return ConditionReport::unknown(
            Condition::INF,
            bound,
            &format!("mie#{k}: the return set could not be certified"),
        );
    }
    ConditionReport::new(
        Condition::INF,
        Verdict::Holds,
        bound,
        last.unwrap_or_else(|| Certificate::Note("no minimal infinite emitter".into())),
    )
}
