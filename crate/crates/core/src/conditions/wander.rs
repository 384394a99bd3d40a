use serde_json::{json, Value};

use super::{Certificate, Condition, ConditionReport, Verdict};
use crate::epset::EpSet;
use crate::ultragraph::{EdgeRef, EdgeSet, Ultragraph};

/// The infinite path `f[start] f[start+step] f[start+2·step] …` through one
/// family, where each range is the single source of the next member and each
/// visited vertex emits only the next member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub schema: u32,
    pub start: u64,
    pub step: u64,
}

impl Chain {
    pub fn indices(&self) -> EpSet {
        EpSet::ap(self.start, self.step)
    }

    pub fn edge(&self, k: u64) -> EdgeRef {
        EdgeRef {
            schema: self.schema,
            index: self.start + k * self.step,
        }
    }

    /// Re-checks the certificate against the presentation.
    pub fn verify(&self, g: &Ultragraph) -> bool {
        let Some(s) = g.schemas().get(self.schema as usize) else {
            return false;
        };
        if self.step == 0 || s.source.is_constant() || !s.range_const.is_empty() {
            return false;
        }
        let [t] = s.range_affine.as_slice() else {
            return false;
        };
        let idx = self.indices();
        if !idx.is_subset(&s.domain) {
            return false;
        }
        let shift = s.source.coef * self.step;
        if t.coef != s.source.coef || t.off != s.source.off + shift as i64 {
            return false;
        }
        let mut own = EdgeSet::empty(g.num_schemas());
        own.per_schema[self.schema as usize] = idx.clone();
        g.epsilon(&s.source.image(&idx)) == own
    }

    pub fn describe(&self, g: &Ultragraph) -> String {
        format!(
            "branch-free wandering path {}[{}] {}[{}] … (index step {})",
            g.schemas()[self.schema as usize].name,
            self.start,
            g.schemas()[self.schema as usize].name,
            self.start + self.step,
            self.step
        )
    }

    pub fn to_json(&self, g: &Ultragraph) -> Value {
        json!({
            "kind": "chain",
            "schema": g.schemas()[self.schema as usize].name,
            "start": self.start,
            "step": self.step,
            "first_edges": (0..3).map(|k| g.edge_label(self.edge(k))).collect::<Vec<_>>(),
        })
    }
}

/// Looks for a [`Chain`] among the families with a single affine range term
/// `t(n) = s(n + δ)`.
pub fn semi_tail_chain(g: &Ultragraph) -> Option<Chain> {
    let limit = g.structural_bound();
    for (i, s) in g.schemas().iter().enumerate() {
        if s.source.is_constant() || !s.range_const.is_empty() || s.domain.is_finite() {
            continue;
        }
        let [t] = s.range_affine.as_slice() else {
            continue;
        };
        let diff = t.off - s.source.off;
        if t.coef != s.source.coef || diff <= 0 || diff % s.source.coef as i64 != 0 {
            continue;
        }
        let step = (diff / s.source.coef as i64) as u64;
        for start in s.domain.enumerate_up_to(limit) {
            let c = Chain {
                schema: i as u32,
                start,
                step,
            };
            if c.verify(g) {
                return Some(c);
            }
        }
    }
    None
}

/// Every wandering path eventually follows edges of families with a
/// non-constant source; when those never climb, no path wanders.
fn no_wandering_path(g: &Ultragraph) -> bool {
    g.schemas().iter().all(|s| {
        s.domain.is_finite()
            || s.source.is_constant()
            || (s.range_const.is_finite()
                && s.range_affine.iter().all(|t| {
                    t.coef < s.source.coef || (t.coef == s.source.coef && t.off <= s.source.off)
                }))
    })
}

/// Condition (W).
pub fn check_w(g: &Ultragraph, bound: usize) -> ConditionReport {
    if no_wandering_path(g) {
        return ConditionReport::new(
            Condition::W,
            Verdict::Holds,
            bound,
            Certificate::Note(
                "no wandering path: every family with a moving source has a finite constant range and non-increasing range terms".into(),
            ),
        );
    }
    if let Some(c) = semi_tail_chain(g) {
        return ConditionReport::new(Condition::W, Verdict::Fails, bound, Certificate::Chain(c));
    }
    ConditionReport::unknown(
        Condition::W,
        bound,
        "wandering paths may exist and no branch-free one was found",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_has_a_branch_free_tail() {
        let g = Ultragraph::parse("family f(n) for n in all : src n -> { n+1 }").unwrap();
        let r = check_w(&g, 10);
        assert_eq!(r.verdict, Verdict::Fails);
        let Certificate::Chain(c) = r.certificate else { panic!() };
        assert!(c.verify(&g));
        assert_eq!((c.start, c.step), (0, 1));
    }

    #[test]
    fn branching_ray_is_unknown() {
        let g = Ultragraph::parse(
            "family f(n) for n in all : src n -> { n+1 }\nfamily h(n) for n in all : src n -> { 0 }",
        )
        .unwrap();
        assert_eq!(check_w(&g, 10).verdict, Verdict::Unknown);
    }
}
