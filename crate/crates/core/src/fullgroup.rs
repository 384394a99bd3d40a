//! Elements of the topological full group as finite tables of basic
//! bisections with disjoint sources and disjoint ranges.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cylinder::{self, union_same_prefix, Clopen, Cylinder};
use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::groupoid::{self, Bisection};
use crate::path::{paths_disjoint, Path, Point};
use crate::ultragraph::Ultragraph;

/// A homeomorphism of the boundary space acting by `βξ ↦ αξ` on the source
/// cylinder of each row and as the identity elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullGroupElement {
    pub rows: Vec<Bisection>,
}

impl FullGroupElement {
    pub fn identity() -> FullGroupElement {
        FullGroupElement { rows: Vec::new() }
    }

    /// Checked constructor.
    pub fn from_rows(g: &Ultragraph, rows: Vec<Bisection>) -> Result<FullGroupElement> {
        let e = canonical(g, rows)?;
        e.check(g)?;
        Ok(e)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sources(&self) -> Clopen {
        self.rows.iter().map(Bisection::source).collect()
    }

    pub fn ranges(&self) -> Clopen {
        self.rows.iter().map(Bisection::range).collect()
    }

    /// Verifies disjointness of sources and of ranges, distinct prefixes in
    /// every row, and equality of the source and range unions.
    pub fn check(&self, g: &Ultragraph) -> Result<()> {
        if let Some(z) = self.rows.iter().find(|z| z.out == z.inn) {
            return Err(UgkError::PreconditionViolated(format!(
                "row {} has equal prefixes",
                z.display(g)
            )));
        }
        for (name, parts) in [("source", self.sources()), ("range", self.ranges())] {
            if !cylinder::pairwise_disjoint(g, &parts) {
                return Err(UgkError::PreconditionViolated(format!(
                    "{name} cylinders overlap"
                )));
            }
        }
        if !cylinder::equals(g, &self.sources(), &self.ranges())? {
            return Err(UgkError::PreconditionViolated(
                "union of sources differs from union of ranges".into(),
            ));
        }
        Ok(())
    }

    pub fn apply(&self, g: &Ultragraph, p: &Point) -> Point {
        for z in &self.rows {
            if let Ok(q) = z.apply(g, p) {
                return q;
            }
        }
        p.clone()
    }

    pub fn inverse(&self) -> FullGroupElement {
        let mut rows: Vec<Bisection> = self.rows.iter().map(Bisection::inverse).collect();
        rows.sort();
        FullGroupElement { rows }
    }

    /// Disjoint cylinders covering the points moved by some row.
    pub fn support(&self, g: &Ultragraph) -> Result<Clopen> {
        cylinder::normalize(g, &self.sources())
    }

    pub fn display(&self, g: &Ultragraph) -> String {
        if self.rows.is_empty() {
            return "id".into();
        }
        self.rows
            .iter()
            .map(|z| z.display(g))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Drops rows with equal prefixes and merges rows sharing both prefixes.
fn canonical(g: &Ultragraph, rows: Vec<Bisection>) -> Result<FullGroupElement> {
    let mut merged: BTreeMap<(Path, Path), Bisection> = BTreeMap::new();
    for z in rows {
        if z.out == z.inn || z.is_empty(g) {
            continue;
        }
        let key = (z.out.clone(), z.inn.clone());
        let z = match merged.remove(&key) {
            Some(prev) => {
                let c = union_same_prefix(g, &prev.source(), &z.source())?;
                Bisection {
                    out: z.out,
                    inn: c.prefix,
                    comp: c.comp,
                    excl: c.excl,
                }
            }
            None => z,
        };
        merged.insert(key, z);
    }
    Ok(FullGroupElement {
        rows: merged.into_values().collect(),
    })
}

/// `a ∘ b`: first `b`, then `a`.
pub fn compose(g: &Ultragraph, a: &FullGroupElement, b: &FullGroupElement) -> Result<FullGroupElement> {
    let a_src = a.sources();
    let b_src = b.sources();
    let mut rows = Vec::new();
    for zb in &b.rows {
        for za in &a.rows {
            if let Some(z) = groupoid::compose(g, za, zb) {
                rows.push(z);
            }
        }
        for piece in cylinder::difference_all(g, &zb.range(), &a_src)? {
            rows.push(zb.restrict_range(&piece));
        }
    }
    for za in &a.rows {
        for piece in cylinder::difference_all(g, &za.source(), &b_src)? {
            rows.push(za.restrict_source(&piece));
        }
    }
    if rows.len() > cylinder::MAX_PARTS {
        return Err(UgkError::NormalizationOverflow(cylinder::MAX_PARTS));
    }
    canonical(g, rows)
}

/// Extensional equality: `a ∘ b⁻¹` moves no point.
pub fn equals(g: &Ultragraph, a: &FullGroupElement, b: &FullGroupElement) -> Result<bool> {
    Ok(compose(g, a, &b.inverse())?.is_identity())
}

pub fn power(g: &Ultragraph, a: &FullGroupElement, k: i64) -> Result<FullGroupElement> {
    let base = if k < 0 { a.inverse() } else { a.clone() };
    let mut out = FullGroupElement::identity();
    for _ in 0..k.unsigned_abs() {
        out = compose(g, &out, &base)?;
    }
    Ok(out)
}

/// `[a,b] = a⁻¹ b⁻¹ a b`.
pub fn commutator(g: &Ultragraph, a: &FullGroupElement, b: &FullGroupElement) -> Result<FullGroupElement> {
    let ab = compose(g, a, b)?;
    let ba_inv = compose(g, &a.inverse(), &b.inverse())?;
    compose(g, &ba_inv, &ab)
}

pub fn is_involution(g: &Ultragraph, a: &FullGroupElement) -> Result<bool> {
    Ok(!a.is_identity() && compose(g, a, a)?.is_identity())
}

/// The least `k ≥ 1` with `a^k = id`, or `None` when it exceeds `max`.
pub fn order(g: &Ultragraph, a: &FullGroupElement, max: usize) -> Result<Option<usize>> {
    let mut p = a.clone();
    for k in 1..=max {
        if p.is_identity() {
            return Ok(Some(k));
        }
        p = compose(g, &p, a)?;
    }
    Ok(None)
}

fn check_disjoint(g: &Ultragraph, what: &str, parts: &[Cylinder]) -> Result<()> {
    for (i, x) in parts.iter().enumerate() {
        for y in &parts[i + 1..] {
            if let Some(c) = cylinder::intersect(g, x, y) {
                return Err(UgkError::PreconditionViolated(format!(
                    "{what} overlap in {}",
                    c.display(g)
                )));
            }
        }
    }
    Ok(())
}

/// The element acting as `V` on `s(V) = r(V)` and as the identity elsewhere.
pub fn pi_tilde(g: &Ultragraph, v: &[Bisection]) -> Result<FullGroupElement> {
    let src: Clopen = v.iter().map(Bisection::source).collect();
    let rng: Clopen = v.iter().map(Bisection::range).collect();
    check_disjoint(g, "sources", &src)?;
    check_disjoint(g, "ranges", &rng)?;
    if !cylinder::equals(g, &src, &rng)? {
        return Err(UgkError::PreconditionViolated(
            "the sources and ranges of V cover different sets".into(),
        ));
    }
    canonical(g, v.to_vec())
}

/// The involution acting as `V` on `s(V)`, as `V⁻¹` on `r(V)` and as the
/// identity elsewhere; requires `s(V) ∩ r(V) = ∅`.
pub fn pi_hat(g: &Ultragraph, v: &[Bisection]) -> Result<FullGroupElement> {
    let src: Clopen = v.iter().map(Bisection::source).collect();
    let rng: Clopen = v.iter().map(Bisection::range).collect();
    check_disjoint(g, "sources", &src)?;
    check_disjoint(g, "ranges", &rng)?;
    if let Some(c) = cylinder::clopen_intersect(g, &src, &rng).first() {
        return Err(UgkError::PreconditionViolated(format!(
            "source and range of V meet in {}",
            c.display(g)
        )));
    }
    let rows = v.iter().cloned().chain(v.iter().map(Bisection::inverse)).collect();
    canonical(g, rows)
}

fn random_path(g: &Ultragraph, rng: &mut ChaCha8Rng, start: u64, len: usize) -> Path {
    let mut path = Vec::new();
    let mut v = start;
    for _ in 0..len {
        let out: Vec<_> = g.edges_from(v).iter_capped(4).collect();
        let Some(&e) = out.choose(rng) else { break };
        path.push(e);
        let next = g.range(e).enumerate_up_to(g.structural_bound());
        match next.choose(rng) {
            Some(&w) => v = w,
            None => break,
        }
    }
    path
}

/// A random basic bisection `Z(α, β, C, ∅)` between disjoint paths, or `None`
/// when the attempt hits a dead end.
pub fn random_bisection(g: &Ultragraph, rng: &mut ChaCha8Rng) -> Option<Bisection> {
    let verts = g.sample_vertices();
    let len_a = rng.random_range(1..=3);
    let len_b = rng.random_range(1..=3);
    let (va, vb) = (*verts.choose(rng)?, *verts.choose(rng)?);
    let a = random_path(g, rng, va, len_a);
    let b = random_path(g, rng, vb, len_b);
    if a.is_empty() || b.is_empty() || !paths_disjoint(&a, &b) {
        return None;
    }
    let shared = g.range(*a.last()?).intersect(&g.range(*b.last()?));
    let mut choices: Vec<EpSet> = shared
        .enumerate_up_to(g.structural_bound())
        .into_iter()
        .take(4)
        .map(EpSet::singleton)
        .collect();
    choices.extend(g.mies_within(&shared).into_iter().map(|k| g.mies()[k].clone()));
    if g.is_generalized_vertex(&shared) && !shared.is_empty() {
        choices.push(shared);
    }
    let comp = choices.choose(rng)?.clone();
    let z = Bisection::new(g, a, b, comp, BTreeSet::new()).ok()?;
    (!z.is_empty(g)).then_some(z)
}

/// A product of `factors` random involutions `pi_hat(Z)`, reproducible from `seed`.
pub fn random_element(g: &Ultragraph, factors: usize, seed: u64) -> Result<FullGroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FullGroupElement::identity();
    let mut made = 0;
    let mut attempts = 0;
    while made < factors && attempts < 64 * (factors + 1) {
        attempts += 1;
        if let Some(z) = random_bisection(g, &mut rng) {
            out = compose(g, &out, &pi_hat(g, &[z])?)?;
            made += 1;
        }
    }
    Ok(out)
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
    fn swap_is_an_involution() {
        let g = example();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let e2 = g.edge_by_name("e2", None).unwrap();
        let a = g.mies()[0].clone();
        let z = Bisection::new(&g, vec![e1], vec![e2], a, BTreeSet::new()).unwrap();
        let s = pi_hat(&g, &[z]).unwrap();
        s.check(&g).unwrap();
        assert!(is_involution(&g, &s).unwrap());
        assert_eq!(order(&g, &s, 10).unwrap(), Some(2));
        let p = Point::fin(&g, vec![e2], 0).unwrap();
        assert_eq!(s.apply(&g, &p), Point::fin(&g, vec![e1], 0).unwrap());
        assert!(equals(&g, &s, &s.inverse()).unwrap());
        assert!(commutator(&g, &s, &FullGroupElement::identity()).unwrap().is_identity());
    }

    #[test]
    fn overlapping_pi_hat_is_rejected() {
        let g = example();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let en3 = g.edge_by_name("en", Some(3)).unwrap();
        let z = Bisection::new(&g, vec![e1], vec![e1, en3], EpSet::finite([3]), BTreeSet::new()).unwrap();
        assert!(matches!(pi_hat(&g, &[z]), Err(UgkError::PreconditionViolated(_))));
    }

    #[test]
    fn random_elements_are_reproducible_and_valid() {
        let g = example();
        for seed in 0..10 {
            let a = random_element(&g, 2, seed).unwrap();
            assert_eq!(a, random_element(&g, 2, seed).unwrap());
            a.check(&g).unwrap();
            assert!(compose(&g, &a, &a.inverse()).unwrap().is_identity());
        }
    }
}
