//! Eventually periodic subsets of the naturals.
//!
//! An [`EpSet`] stores an explicit bitmask below its threshold and a residue
//! bitmask (modulo the period) at and above it. Every constructor returns the
//! canonical form: the threshold and the period are both minimal, so two sets
//! are equal exactly when their fields are equal.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Canonical eventually periodic subset of ℕ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EpSet {
    threshold: u64,
    base: Vec<bool>,
    cycle: Vec<bool>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl EpSet {
    /// Builds a set from a membership predicate that is known to be periodic
    /// with `period` from `threshold` on.
    pub fn from_fn(threshold: u64, period: u64, f: impl Fn(u64) -> bool) -> EpSet {
        assert!(period > 0, "period must be positive");
        let base = (0..threshold).map(&f).collect();
        let cycle = (0..period)
            .map(|r| {
                let shift = (r + period - threshold % period) % period;
                f(threshold + shift)
            })
            .collect();
        EpSet { threshold, base, cycle }.canonical()
    }

    /// Builds a set from raw fields, canonicalizing them. `base` must have
    /// `threshold` entries and `cycle` must be nonempty.
    pub fn from_parts(base: Vec<bool>, cycle: Vec<bool>) -> EpSet {
        assert!(!cycle.is_empty(), "cycle must be nonempty");
        EpSet {
            threshold: base.len() as u64,
            base,
            cycle,
        }
        .canonical()
    }

    fn canonical(mut self) -> EpSet {
        let p = self.cycle.len();
        let mut d = 1;
        while d < p {
            if p % d == 0 && (0..p).all(|i| self.cycle[i] == self.cycle[i % d]) {
                break;
            }
            d += 1;
        }
        // cycle[i] is indexed by n mod p, so the residues mod d are consistent
        self.cycle.truncate(d);
        while let Some(&last) = self.base.last() {
            let n = self.base.len() - 1;
            if last != self.cycle[n % d] {
                break;
            }
            self.base.pop();
        }
        self.threshold = self.base.len() as u64;
        self
    }

    pub fn empty() -> EpSet {
        EpSet {
            threshold: 0,
            base: Vec::new(),
            cycle: vec![false],
        }
    }

    pub fn all() -> EpSet {
        EpSet {
            threshold: 0,
            base: Vec::new(),
            cycle: vec![true],
        }
    }

    pub fn singleton(n: u64) -> EpSet {
        EpSet::finite([n])
    }

    pub fn finite(elems: impl IntoIterator<Item = u64>) -> EpSet {
        let elems: Vec<u64> = elems.into_iter().collect();
        let t = elems.iter().max().map_or(0, |m| m + 1);
        let mut base = vec![false; t as usize];
        for e in elems {
            base[e as usize] = true;
        }
        EpSet::from_parts(base, vec![false])
    }

    /// ℕ minus the given finite set.
    pub fn cofinite(excluded: impl IntoIterator<Item = u64>) -> EpSet {
        EpSet::finite(excluded).complement()
    }

    /// Arithmetic progression `{start, start+step, …}`; a zero step gives `{start}`.
    pub fn ap(start: u64, step: u64) -> EpSet {
        if step == 0 {
            return EpSet::singleton(start);
        }
        EpSet::from_fn(start, step, |n| n >= start && (n - start) % step == 0)
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.cycle.len() as u64
    }

    pub fn base_bits(&self) -> &[bool] {
        &self.base
    }

    pub fn cycle_bits(&self) -> &[bool] {
        &self.cycle
    }

    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.base[n as usize]
        } else {
            self.cycle[(n % self.period()) as usize]
        }
    }

    fn combine(&self, other: &EpSet, op: impl Fn(bool, bool) -> bool) -> EpSet {
        let t = self.threshold.max(other.threshold);
        let p = lcm(self.period(), other.period());
        EpSet::from_fn(t, p, |n| op(self.contains(n), other.contains(n)))
    }

    pub fn union(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> EpSet {
        EpSet {
            threshold: self.threshold,
            base: self.base.iter().map(|b| !b).collect(),
            cycle: self.cycle.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.base.iter().chain(&self.cycle).any(|&b| b)
    }

    pub fn is_finite(&self) -> bool {
        !self.cycle.iter().any(|&b| b)
    }

    /// `None` when the set is infinite.
    pub fn cardinality(&self) -> Option<u64> {
        self.is_finite()
            .then(|| self.base.iter().filter(|&&b| b).count() as u64)
    }

    pub fn is_subset(&self, other: &EpSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &EpSet) -> bool {
        self.intersect(other).is_empty()
    }

    pub fn min_elem(&self) -> Option<u64> {
        self.iter().next()
    }

    /// Largest element of a finite set.
    pub fn max_elem(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.base.iter().rposition(|&b| b).map(|i| i as u64)
    }

    /// Sorted elements below `bound`.
    pub fn enumerate_up_to(&self, bound: u64) -> Vec<u64> {
        self.iter().take_while(|&n| n < bound).collect()
    }

    /// Elements in increasing order; infinite for infinite sets.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let finite_end = if self.is_finite() {
            Some(self.threshold)
        } else {
            None
        };
        (0u64..)
            .take_while(move |&n| finite_end.is_none_or(|end| n < end))
            .filter(move |&n| self.contains(n))
    }

    /// Bitmask of the elements below 64 (bit i set iff i is a member and i < `n`).
    pub fn truncated_mask(&self, n: u32) -> u64 {
        (0..n.min(64))
            .filter(|&i| self.contains(i as u64))
            .fold(0u64, |m, i| m | (1 << i))
    }

    /// `{coef·n + off : n ∈ self}`, dropping negative values.
    pub fn affine_image(&self, coef: u64, off: i64) -> EpSet {
        if coef == 0 {
            return match self.min_elem() {
                Some(_) if off >= 0 => EpSet::singleton(off as u64),
                _ => EpSet::empty(),
            };
        }
        let c = coef as i64;
        let t = (c * self.threshold as i64 + off).max(0) as u64;
        EpSet::from_fn(t, coef * self.period(), |m| {
            let d = m as i64 - off;
            d >= 0 && d % c == 0 && self.contains((d / c) as u64)
        })
    }

    /// `{n : coef·n + off ∈ self}`.
    pub fn affine_preimage(&self, coef: u64, off: i64) -> EpSet {
        if coef == 0 {
            return if off >= 0 && self.contains(off as u64) {
                EpSet::all()
            } else {
                EpSet::empty()
            };
        }
        let c = coef as i64;
        let need = self.threshold as i64 - off;
        let t = if need <= 0 {
            0
        } else {
            ((need + c - 1) / c) as u64
        };
        EpSet::from_fn(t, self.period(), |n| {
            let m = c * n as i64 + off;
            m >= 0 && self.contains(m as u64)
        })
    }

    /// Bound past which extensional comparison of `self` and `other` is
    /// conclusive.
    pub fn comparison_bound(&self, other: &EpSet) -> u64 {
        self.threshold.max(other.threshold) + 2 * lcm(self.period(), other.period())
    }
}

impl PartialOrd for EpSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on (threshold, period, base, cycle).
impl Ord for EpSet {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.threshold, self.period(), &self.base, &self.cycle).cmp(&(
            other.threshold,
            other.period(),
            &other.base,
            &other.cycle,
        ))
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, elems: &[u64]) -> fmt::Result {
    write!(f, "{{")?;
    for (i, e) in elems.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{e}")?;
    }
    write!(f, "}}")
}

/// Prints a literal that parses back to the same set.
impl fmt::Display for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            return write_list(f, &self.enumerate_up_to(self.threshold));
        }
        let comp = self.complement();
        if comp.is_finite() {
            if comp.is_empty() {
                return write!(f, "all");
            }
            write!(f, "all \\ ")?;
            return write_list(f, &comp.enumerate_up_to(comp.threshold));
        }
        let mut pieces = Vec::new();
        let below: Vec<u64> = self.enumerate_up_to(self.threshold);
        if !below.is_empty() {
            let mut s = String::new();
            s.push('{');
            s.push_str(
                &below
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            );
            s.push('}');
            pieces.push(s);
        }
        let p = self.period();
        for k in 0..p {
            let n = self.threshold + k;
            if self.contains(n) {
                pieces.push(format!("ap({n},{p})"));
            }
        }
        write!(f, "{}", pieces.join(" | "))
    }
}

impl fmt::Debug for EpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpSet({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct EpSetJson {
    threshold: u64,
    period: u64,
    base: Vec<u8>,
    cycle: Vec<u8>,
}

impl Serialize for EpSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        EpSetJson {
            threshold: self.threshold,
            period: self.period(),
            base: self.base.iter().map(|&b| b as u8).collect(),
            cycle: self.cycle.iter().map(|&b| b as u8).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EpSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = EpSetJson::deserialize(d)?;
        if raw.base.len() as u64 != raw.threshold || raw.cycle.len() as u64 != raw.period {
            return Err(D::Error::custom("bit arrays do not match threshold/period"));
        }
        if raw.period == 0 || raw.base.iter().chain(&raw.cycle).any(|&b| b > 1) {
            return Err(D::Error::custom("malformed EP-set bits"));
        }
        let set = EpSet::from_parts(
            raw.base.iter().map(|&b| b == 1).collect(),
            raw.cycle.iter().map(|&b| b == 1).collect(),
        );
        if set.threshold != raw.threshold || set.period() != raw.period {
            return Err(D::Error::custom("EP-set is not in canonical form"));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(set: &EpSet, bound: u64) -> Vec<bool> {
        (0..bound).map(|n| set.contains(n)).collect()
    }

    #[test]
    fn union_absorbs_overlapping_finite_part() {
        let a = EpSet::finite([1, 2]);
        let b = EpSet::cofinite([1, 2, 3]);
        assert_eq!(a.union(&b), EpSet::cofinite([3]));
    }

    #[test]
    fn set_and_complement_are_disjoint() {
        let a = EpSet::ap(3, 2).union(&EpSet::finite([0, 10]));
        assert!(a.intersect(&a.complement()).is_empty());
    }

    #[test]
    fn progression_meets_cofinite() {
        let got = EpSet::ap(3, 2).intersect(&EpSet::cofinite([5]));
        // enumeration oracle on [0, 200)
        for n in 0..200 {
            let expected = n == 3 || (n >= 7 && n % 2 == 1);
            assert_eq!(got.contains(n), expected, "n = {n}");
        }
        assert_eq!(got.threshold(), 6);
        assert_eq!(got.period(), 2);
        assert_eq!(got.base_bits(), &[false, false, false, true, false, false]);
        assert_eq!(got.cycle_bits(), &[false, true]);
        assert_eq!(got, EpSet::singleton(3).union(&EpSet::ap(7, 2)));
    }

    #[test]
    fn finiteness_queries() {
        assert!(!EpSet::cofinite([2]).is_finite());
        assert_eq!(EpSet::finite([1, 3, 9]).cardinality(), Some(3));
        assert_eq!(EpSet::ap(0, 5).cardinality(), None);
        assert!(EpSet::ap(3, 2).is_subset(&EpSet::cofinite([4])));
        assert!(!EpSet::ap(3, 1).is_subset(&EpSet::cofinite([4])));
        assert_eq!(EpSet::ap(2, 3).enumerate_up_to(12), vec![2, 5, 8, 11]);
    }

    #[test]
    fn affine_maps() {
        assert_eq!(EpSet::all().affine_image(1, 0), EpSet::all());
        assert_eq!(
            EpSet::cofinite([2]).affine_preimage(1, 0),
            EpSet::cofinite([2])
        );
        let img = EpSet::ap(3, 1).affine_image(2, 1);
        for m in 0..100 {
            assert_eq!(img.contains(m), m >= 7 && m % 2 == 1);
        }
        assert_eq!(img, EpSet::ap(7, 2));
        assert_eq!(EpSet::ap(4, 1).affine_image(0, 9), EpSet::singleton(9));
        assert_eq!(EpSet::empty().affine_image(0, 9), EpSet::empty());
        // n - 2 on {3, 4, …}
        assert_eq!(EpSet::ap(3, 1).affine_image(1, -2), EpSet::ap(1, 1));
        assert_eq!(EpSet::ap(1, 1).affine_preimage(1, -2), EpSet::ap(3, 1));
    }

    #[test]
    fn display_round_trips_through_literal_shapes() {
        assert_eq!(EpSet::all().to_string(), "all");
        assert_eq!(EpSet::finite([1, 4]).to_string(), "{1,4}");
        assert_eq!(EpSet::cofinite([0, 2]).to_string(), "all \\ {0,2}");
        assert_eq!(
            EpSet::singleton(3).union(&EpSet::ap(7, 2)).to_string(),
            "{3} | ap(7,2)"
        );
        assert_eq!(EpSet::empty().to_string(), "{}");
    }

    #[test]
    fn json_form_is_canonical() {
        let s = EpSet::ap(3, 2);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"threshold":2,"period":2,"base":[0,0],"cycle":[0,1]}"#);
        let back: EpSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"threshold":1,"period":1,"base":[1],"cycle":[1]}"#;
        assert!(serde_json::from_str::<EpSet>(bad).is_err());
    }

    pub(crate) fn arb_epset() -> impl Strategy<Value = EpSet> {
        (
            proptest::collection::vec(any::<bool>(), 0..8),
            proptest::collection::vec(any::<bool>(), 1..5),
        )
            .prop_map(|(b, c)| EpSet::from_parts(b, c))
    }

    proptest! {
        #[test]
        fn boolean_laws_hold(a in arb_epset(), b in arb_epset(), c in arb_epset()) {
            let bound = a.comparison_bound(&b).max(b.comparison_bound(&c)) + 2 * lcm(a.period(), c.period());
            let same = |x: &EpSet, y: &EpSet| brute(x, bound) == brute(y, bound);
            prop_assert!(same(&a.union(&b.union(&c)), &a.union(&b).union(&c)));
            prop_assert!(same(&a.intersect(&b.union(&c)), &a.intersect(&b).union(&a.intersect(&c))));
            prop_assert!(same(&a.union(&b).complement(), &a.complement().intersect(&b.complement())));
            prop_assert_eq!(a.union(&b.union(&c)), a.union(&b).union(&c));
            prop_assert_eq!(a.difference(&b), a.intersect(&b.complement()));
        }

        #[test]
        fn canonical_form_is_extensional(a in arb_epset(), b in arb_epset()) {
            let bound = a.comparison_bound(&b);
            prop_assert_eq!(a == b, brute(&a, bound) == brute(&b, bound));
            let again = EpSet::from_parts(a.base_bits().to_vec(), a.cycle_bits().to_vec());
            prop_assert_eq!(again, a);
        }

        #[test]
        fn affine_image_matches_enumeration(a in arb_epset(), coef in 0u64..4, off in -3i64..6) {
            let img = a.affine_image(coef, off);
            let bound = 4 * (a.threshold() + 4 * a.period() + 10);
            for m in 0..bound {
                let witness = (0..bound + 4).any(|n| a.contains(n) && coef as i64 * n as i64 + off == m as i64);
                prop_assert_eq!(img.contains(m), witness, "m = {}", m);
            }
            let pre = a.affine_preimage(coef, off);
            for n in 0..bound {
                let v = coef as i64 * n as i64 + off;
                prop_assert_eq!(pre.contains(n), v >= 0 && a.contains(v as u64));
            }
        }
    }
}
