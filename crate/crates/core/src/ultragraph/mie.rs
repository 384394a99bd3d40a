use std::collections::BTreeSet;

use super::Ultragraph;
use crate::epset::EpSet;
use crate::error::{Result, UgkError};

/// Constant sources of schemas with infinite index domains.
pub(super) fn infinite_emitter_vertices(g: &Ultragraph) -> EpSet {
    EpSet::finite(
        g.schemas
            .iter()
            .filter(|s| !s.domain.is_finite() && s.source.is_constant())
            .map(|s| s.source.off as u64),
    )
}

/// Infinite sets generating the infinite part of the ∩-semilattice of ranges:
/// constant range parts of infinite families, and every infinite range of a
/// finite family.
fn infinite_generators(g: &Ultragraph) -> BTreeSet<EpSet> {
    let mut out = BTreeSet::new();
    for s in &g.schemas {
        if s.domain.is_finite() {
            for n in s.domain.iter() {
                let r = s.range_at(n);
                if !r.is_finite() {
                    out.insert(r);
                }
            }
        } else if !s.range_const.is_finite() {
            out.insert(s.range_const.clone());
        }
    }
    out
}

fn infinite_meet_closure(gens: BTreeSet<EpSet>) -> BTreeSet<EpSet> {
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
    closed
}

pub(super) fn minimal_infinite_emitters(g: &Ultragraph) -> Result<Vec<EpSet>> {
    let closure = infinite_meet_closure(infinite_generators(g));
    let ie = &g.ie_vertices;
    let mut mies: Vec<EpSet> = ie.iter().map(EpSet::singleton).collect();
    for k in &closure {
        if !k.is_disjoint(ie) {
            continue;
        }
        let minimal = closure.iter().all(|o| o == k || !o.is_subset(k));
        if minimal {
            mies.push(k.clone());
        }
    }
    mies.sort();
    for (i, a) in mies.iter().enumerate() {
        for b in &mies[i + 1..] {
            if !a.intersect(b).is_finite() {
                return Err(UgkError::Internal(format!(
                    "minimal infinite emitters {a} and {b} have infinite intersection"
                )));
            }
        }
    }
    Ok(mies)
}

fn remainder(g: &Ultragraph, b: &EpSet) -> EpSet {
    g.mies
        .iter()
        .filter(|m| m.is_subset(b))
        .fold(b.clone(), |acc, m| acc.difference(m))
}

/// Every finite-family range, and the constant part of every infinite family,
/// must be a union of minimal infinite emitters plus finitely many vertices.
pub(super) fn rfum_check(g: &Ultragraph) -> Result<()> {
    for s in &g.schemas {
        let checks: Vec<(String, EpSet)> = if s.domain.is_finite() {
            s.domain
                .iter()
                .map(|n| {
                    let label = if s.family {
                        format!("{}[{n}]", s.name)
                    } else {
                        s.name.clone()
                    };
                    (label, s.range_at(n))
                })
                .collect()
        } else {
            vec![(s.name.clone(), s.range_const.clone())]
        };
        for (edge, b) in checks {
            let rem = remainder(g, &b);
            if !rem.is_finite() {
                return Err(UgkError::RfumViolation {
                    edge,
                    remainder: rem,
                });
            }
        }
    }
    Ok(())
}
