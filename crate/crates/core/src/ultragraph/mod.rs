//! Finitely presented ultragraphs: affine edge schemas over EP index domains,
//! validation, ε-sets, minimal infinite emitters and RFUM decompositions.

mod dsl;
mod mie;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::epset::EpSet;
use crate::error::{Result, UgkError};

/// The map `n ↦ coef·n + off`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Affine {
    pub coef: u64,
    pub off: i64,
}

impl Affine {
    pub fn constant(c: u64) -> Affine {
        Affine {
            coef: 0,
            off: c as i64,
        }
    }

    pub fn identity() -> Affine {
        Affine { coef: 1, off: 0 }
    }

    pub fn is_constant(&self) -> bool {
        self.coef == 0
    }

    /// Value at `n`; callers guarantee `n` lies in a domain on which the map is nonnegative.
    pub fn eval(&self, n: u64) -> u64 {
        let v = self.coef as i128 * n as i128 + self.off as i128;
        debug_assert!(v >= 0);
        v as u64
    }

    pub fn image(&self, s: &EpSet) -> EpSet {
        s.affine_image(self.coef, self.off)
    }

    pub fn preimage(&self, s: &EpSet) -> EpSet {
        s.affine_preimage(self.coef, self.off)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coef, self.off) {
            (0, c) => write!(f, "{c}"),
            (1, 0) => write!(f, "n"),
            (a, 0) => write!(f, "{a}*n"),
            (1, b) if b > 0 => write!(f, "n+{b}"),
            (1, b) => write!(f, "n-{}", -b),
            (a, b) if b > 0 => write!(f, "{a}*n+{b}"),
            (a, b) => write!(f, "{a}*n-{}", -b),
        }
    }
}

/// One declaration of the presentation. Single edges use the domain `{0}`
/// and constant maps only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSchema {
    pub name: String,
    pub family: bool,
    pub domain: EpSet,
    pub source: Affine,
    pub range_affine: Vec<Affine>,
    pub range_const: EpSet,
}

impl EdgeSchema {
    pub fn single(name: &str, source: u64, range: EpSet) -> EdgeSchema {
        EdgeSchema {
            name: name.to_string(),
            family: false,
            domain: EpSet::singleton(0),
            source: Affine::constant(source),
            range_affine: Vec::new(),
            range_const: range,
        }
    }

    pub fn family(
        name: &str,
        domain: EpSet,
        source: Affine,
        range_affine: Vec<Affine>,
        range_const: EpSet,
    ) -> EdgeSchema {
        EdgeSchema {
            name: name.to_string(),
            family: true,
            domain,
            source,
            range_affine,
            range_const,
        }
    }

    pub fn range_at(&self, n: u64) -> EpSet {
        self.range_const
            .union(&EpSet::finite(self.range_affine.iter().map(|t| t.eval(n))))
    }

    /// All sources, `source(domain)`.
    pub fn sources(&self) -> EpSet {
        self.source.image(&self.domain)
    }
}

/// An element of G¹: member `index` of schema number `schema`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub schema: u32,
    pub index: u64,
}

/// A set of edges, stored as one index set per schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    pub per_schema: Vec<EpSet>,
}

impl EdgeSet {
    pub fn empty(schemas: usize) -> EdgeSet {
        EdgeSet {
            per_schema: vec![EpSet::empty(); schemas],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.per_schema.iter().all(EpSet::is_empty)
    }

    pub fn is_finite(&self) -> bool {
        self.per_schema.iter().all(EpSet::is_finite)
    }

    pub fn count(&self) -> Option<u64> {
        self.per_schema.iter().map(EpSet::cardinality).sum()
    }

    pub fn contains(&self, e: EdgeRef) -> bool {
        self.per_schema
            .get(e.schema as usize)
            .is_some_and(|s| s.contains(e.index))
    }

    fn zip(&self, other: &EdgeSet, f: impl Fn(&EpSet, &EpSet) -> EpSet) -> EdgeSet {
        EdgeSet {
            per_schema: self
                .per_schema
                .iter()
                .zip(&other.per_schema)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        self.zip(other, EpSet::union)
    }

    pub fn intersect(&self, other: &EdgeSet) -> EdgeSet {
        self.zip(other, EpSet::intersect)
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        self.zip(other, EpSet::difference)
    }

    pub fn without(&self, f: &BTreeSet<EdgeRef>) -> EdgeSet {
        let mut out = self.clone();
        for e in f {
            if let Some(s) = out.per_schema.get_mut(e.schema as usize) {
                *s = s.difference(&EpSet::singleton(e.index));
            }
        }
        out
    }

    pub fn from_edges(schemas: usize, edges: impl IntoIterator<Item = EdgeRef>) -> EdgeSet {
        let mut per: Vec<Vec<u64>> = vec![Vec::new(); schemas];
        for e in edges {
            per[e.schema as usize].push(e.index);
        }
        EdgeSet {
            per_schema: per.into_iter().map(EpSet::finite).collect(),
        }
    }

    /// Edges in schema order then index order; per schema at most `cap` indices.
    pub fn iter_capped(&self, cap: usize) -> impl Iterator<Item = EdgeRef> + '_ {
        self.per_schema.iter().enumerate().flat_map(move |(s, set)| {
            set.iter().take(cap).map(move |index| EdgeRef {
                schema: s as u32,
                index,
            })
        })
    }

    /// All edges, or `None` when the set is infinite.
    pub fn to_vec(&self) -> Option<Vec<EdgeRef>> {
        self.is_finite()
            .then(|| self.iter_capped(usize::MAX).collect())
    }
}

/// A set in G⁰ together with its decomposition into minimal infinite
/// emitters and a finite set of vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralizedVertex {
    pub set: EpSet,
    pub mies: Vec<usize>,
    pub finite: EpSet,
}

#[derive(Clone, Debug)]
pub struct Ultragraph {
    universe: EpSet,
    schemas: Vec<EdgeSchema>,
    ie_vertices: EpSet,
    mies: Vec<EpSet>,
}

impl Ultragraph {
    /// Validates the presentation and computes its minimal infinite emitters.
    pub fn new(universe: EpSet, schemas: Vec<EdgeSchema>) -> Result<Ultragraph> {
        let mut names = BTreeSet::new();
        for s in &schemas {
            if !names.insert(s.name.as_str()) {
                return Err(UgkError::InvalidPresentation(format!(
                    "duplicate edge name '{}'",
                    s.name
                )));
            }
            check_schema(&universe, s)?;
        }
        let sources = schemas
            .iter()
            .fold(EpSet::empty(), |acc, s| acc.union(&s.sources()));
        if let Some(v) = universe.difference(&sources).min_elem() {
            return Err(UgkError::NoSink { vertex: v });
        }
        let mut g = Ultragraph {
            universe,
            schemas,
            ie_vertices: EpSet::empty(),
            mies: Vec::new(),
        };
        g.ie_vertices = mie::infinite_emitter_vertices(&g);
        g.mies = mie::minimal_infinite_emitters(&g)?;
        mie::rfum_check(&g)?;
        Ok(g)
    }

    pub fn parse(text: &str) -> Result<Ultragraph> {
        let (universe, schemas) = dsl::parse(text)?;
        Ultragraph::new(universe, schemas)
    }

    pub fn to_dsl(&self) -> String {
        dsl::pretty(&self.universe, &self.schemas)
    }

    pub fn universe(&self) -> &EpSet {
        &self.universe
    }

    pub fn schemas(&self) -> &[EdgeSchema] {
        &self.schemas
    }

    pub fn schema(&self, e: EdgeRef) -> &EdgeSchema {
        &self.schemas[e.schema as usize]
    }

    pub fn num_schemas(&self) -> usize {
        self.schemas.len()
    }

    /// Vertices emitting infinitely many edges.
    pub fn ie_vertices(&self) -> &EpSet {
        &self.ie_vertices
    }

    pub fn mies(&self) -> &[EpSet] {
        &self.mies
    }

    pub fn mie(&self, k: usize) -> Option<&EpSet> {
        self.mies.get(k)
    }

    pub fn mie_index(&self, set: &EpSet) -> Option<usize> {
        self.mies.iter().position(|m| m == set)
    }

    pub fn edge_exists(&self, e: EdgeRef) -> bool {
        self.schemas
            .get(e.schema as usize)
            .is_some_and(|s| s.domain.contains(e.index))
    }

    pub fn source(&self, e: EdgeRef) -> u64 {
        self.schema(e).source.eval(e.index)
    }

    pub fn range(&self, e: EdgeRef) -> EpSet {
        self.schema(e).range_at(e.index)
    }

    pub fn edge_label(&self, e: EdgeRef) -> String {
        let s = self.schema(e);
        if s.family {
            format!("{}[{}]", s.name, e.index)
        } else {
            s.name.clone()
        }
    }

    /// Resolves `name` or `name[k]`.
    pub fn edge_by_name(&self, name: &str, index: Option<u64>) -> Result<EdgeRef> {
        let pos = self
            .schemas
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| UgkError::InvalidPresentation(format!("unknown edge '{name}'")))?;
        let s = &self.schemas[pos];
        let index = match (s.family, index) {
            (false, None) => 0,
            (true, Some(k)) => k,
            (false, Some(_)) => {
                return Err(UgkError::InvalidPresentation(format!(
                    "'{name}' is a single edge and takes no index"
                )))
            }
            (true, None) => {
                return Err(UgkError::InvalidPresentation(format!(
                    "'{name}' is a family and needs an index"
                )))
            }
        };
        let e = EdgeRef {
            schema: pos as u32,
            index,
        };
        if !self.edge_exists(e) {
            return Err(UgkError::InvalidPresentation(format!(
                "index {index} is outside the domain of '{name}'"
            )));
        }
        Ok(e)
    }

    /// ε(A): the edges whose source lies in `a`.
    pub fn epsilon(&self, a: &EpSet) -> EdgeSet {
        EdgeSet {
            per_schema: self
                .schemas
                .iter()
                .map(|s| s.domain.intersect(&s.source.preimage(a)))
                .collect(),
        }
    }

    pub fn epsilon_is_infinite(&self, a: &EpSet) -> bool {
        !self.epsilon(a).is_finite()
    }

    /// With no sinks, a set is an infinite emitter iff it is infinite or
    /// contains a vertex emitting infinitely many edges.
    pub fn is_infinite_emitter(&self, a: &EpSet) -> bool {
        !a.is_finite() || !a.is_disjoint(&self.ie_vertices)
    }

    pub fn edges_from(&self, v: u64) -> EdgeSet {
        self.epsilon(&EpSet::singleton(v))
    }

    /// G¹v: edges whose range contains `v`.
    pub fn edges_into(&self, v: u64) -> EdgeSet {
        let target = EpSet::singleton(v);
        EdgeSet {
            per_schema: self
                .schemas
                .iter()
                .map(|s| {
                    if s.range_const.contains(v) {
                        s.domain.clone()
                    } else {
                        s.range_affine.iter().fold(EpSet::empty(), |acc, t| {
                            acc.union(&s.domain.intersect(&t.preimage(&target)))
                        })
                    }
                })
                .collect(),
        }
    }

    /// Edges whose range meets `a`.
    pub fn edges_into_set(&self, a: &EpSet) -> EdgeSet {
        EdgeSet {
            per_schema: self
                .schemas
                .iter()
                .map(|s| {
                    if !s.range_const.is_disjoint(a) {
                        s.domain.clone()
                    } else {
                        s.range_affine.iter().fold(EpSet::empty(), |acc, t| {
                            acc.union(&s.domain.intersect(&t.preimage(a)))
                        })
                    }
                })
                .collect(),
        }
    }

    /// Edges whose range contains all of `a`.
    pub fn edges_with_range_containing(&self, a: &EpSet) -> EdgeSet {
        EdgeSet {
            per_schema: self
                .schemas
                .iter()
                .map(|s| {
                    let rest = a.difference(&s.range_const);
                    if !rest.is_finite() {
                        return EpSet::empty();
                    }
                    rest.iter().fold(s.domain.clone(), |acc, v| {
                        let hit = s.range_affine.iter().fold(EpSet::empty(), |h, t| {
                            h.union(&t.preimage(&EpSet::singleton(v)))
                        });
                        acc.intersect(&hit)
                    })
                })
                .collect(),
        }
    }

    pub fn edges_between(&self, v: u64, w: u64) -> EdgeSet {
        self.edges_from(v).intersect(&self.edges_into(w))
    }

    /// Identifiers of the minimal infinite emitters inside `r(α)`; all of
    /// them for the empty path.
    pub fn m_alpha(&self, path: &[EdgeRef]) -> Vec<usize> {
        match path.last() {
            None => (0..self.mies.len()).collect(),
            Some(&e) => self.mies_within(&self.range(e)),
        }
    }

    pub fn mies_within(&self, b: &EpSet) -> Vec<usize> {
        (0..self.mies.len())
            .filter(|&k| self.mies[k].is_subset(b))
            .collect()
    }

    /// Writes `b` as a union of minimal infinite emitters plus a finite set.
    pub fn rfum_decompose(&self, b: &EpSet) -> Result<GeneralizedVertex> {
        let mies = self.mies_within(b);
        let covered = mies
            .iter()
            .fold(EpSet::empty(), |acc, &k| acc.union(&self.mies[k]));
        let finite = b.difference(&covered);
        if !finite.is_finite() || !b.is_subset(&self.universe) {
            return Err(UgkError::NotGeneralizedVertex(b.clone()));
        }
        Ok(GeneralizedVertex {
            set: b.clone(),
            mies,
            finite,
        })
    }

    pub fn is_generalized_vertex(&self, b: &EpSet) -> bool {
        self.rfum_decompose(b).is_ok()
    }

    /// A common period of the universe, all domains, constant ranges and
    /// affine coefficients.
    pub fn structural_period(&self) -> u64 {
        let mut p = self.universe.period();
        for s in &self.schemas {
            p = crate::epset::lcm(p, s.domain.period());
            p = crate::epset::lcm(p, s.range_const.period());
            for a in std::iter::once(&s.source).chain(&s.range_affine) {
                if a.coef > 0 {
                    p = crate::epset::lcm(p, a.coef);
                }
            }
        }
        p
    }

    /// A vertex bound past which the presentation behaves periodically; the
    /// sample `[0, structural_bound)` covers two full periods beyond it.
    pub fn structural_bound(&self) -> u64 {
        let mut t = self.universe.threshold();
        let mut off = 0u64;
        let mut coef = 1u64;
        for s in &self.schemas {
            t = t.max(s.domain.threshold()).max(s.range_const.threshold());
            for a in std::iter::once(&s.source).chain(&s.range_affine) {
                off = off.max(a.off.unsigned_abs());
                coef = coef.max(a.coef);
            }
        }
        (t + off + 1) * coef + 2 * self.structural_period()
    }

    /// Vertices of the universe below [`Ultragraph::structural_bound`].
    pub fn sample_vertices(&self) -> Vec<u64> {
        self.universe.enumerate_up_to(self.structural_bound())
    }

    /// Vertices receiving no edge.
    pub fn sources(&self) -> EpSet {
        let hit = self.schemas.iter().fold(EpSet::empty(), |acc, s| {
            s.range_affine
                .iter()
                .fold(acc.union(&s.range_const), |a, t| a.union(&t.image(&s.domain)))
        });
        self.universe.difference(&hit)
    }
}

fn check_schema(universe: &EpSet, s: &EdgeSchema) -> Result<()> {
    let bad = |m: String| Err(UgkError::InvalidPresentation(format!("edge '{}': {m}", s.name)));
    let Some(n0) = s.domain.min_elem() else {
        return bad("empty index domain".into());
    };
    for a in std::iter::once(&s.source).chain(&s.range_affine) {
        if (a.coef as i128) * (n0 as i128) + (a.off as i128) < 0 {
            return bad(format!("map {a} is negative at index {n0}"));
        }
    }
    if !s.sources().is_subset(universe) {
        return bad("source outside the universe".into());
    }
    if !s.range_const.is_subset(universe) {
        return bad("range outside the universe".into());
    }
    for a in &s.range_affine {
        if !a.image(&s.domain).is_subset(universe) {
            return bad(format!("range term {a} leaves the universe"));
        }
    }
    if s.range_affine.is_empty() && s.range_const.is_empty() {
        return bad("empty range".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = "\
universe ap(1,1)
edge e1 : src 1 -> { all \\ {0,2} }
edge e2 : src 2 -> { all \\ {0,1} }
family en(n) for n in ap(3,1) : src n -> { n-2, n }
";

    #[test]
    fn example_has_one_mie() {
        let g = Ultragraph::parse(EXAMPLE).unwrap();
        assert_eq!(g.mies(), &[EpSet::cofinite([0, 1, 2])]);
        let e1 = g.edge_by_name("e1", None).unwrap();
        let e2 = g.edge_by_name("e2", None).unwrap();
        assert_eq!(g.mies()[0], g.range(e1).intersect(&g.range(e2)));
        assert_eq!(g.m_alpha(&[e1]), vec![0]);
    }

    #[test]
    fn example_epsilon_and_edges_into() {
        let g = Ultragraph::parse(EXAMPLE).unwrap();
        let eps = g.epsilon(&EpSet::cofinite([0, 1, 2]));
        assert_eq!(eps.per_schema[2], EpSet::ap(3, 1));
        assert!(g.epsilon_is_infinite(&EpSet::cofinite([0, 1, 2])));
        assert!(g.epsilon(&EpSet::empty()).is_empty());
        // edges whose range holds vertex 3: e1, e2, en[3], en[5]
        let into = g.edges_into(3).to_vec().unwrap();
        let labels: Vec<String> = into.iter().map(|&e| g.edge_label(e)).collect();
        assert_eq!(labels, ["e1", "e2", "en[3]", "en[5]"]);
    }

    #[test]
    fn example_rfum_decomposition() {
        let g = Ultragraph::parse(EXAMPLE).unwrap();
        let e1 = g.edge_by_name("e1", None).unwrap();
        let d = g.rfum_decompose(&g.range(e1)).unwrap();
        assert_eq!(d.mies, vec![0]);
        assert_eq!(d.finite, EpSet::singleton(1));
        let en4 = g.edge_by_name("en", Some(4)).unwrap();
        let d = g.rfum_decompose(&g.range(en4)).unwrap();
        assert!(d.mies.is_empty());
        assert_eq!(d.finite, EpSet::finite([2, 4]));
        let whole = g.rfum_decompose(&g.mies()[0]).unwrap();
        assert_eq!((whole.mies, whole.finite), (vec![0], EpSet::empty()));
    }

    #[test]
    fn sinks_are_rejected() {
        assert_eq!(
            Ultragraph::parse("").unwrap_err(),
            UgkError::NoSink { vertex: 0 }
        );
        let e = Ultragraph::parse("universe {0,1}\nedge a : src 0 -> {1}").unwrap_err();
        assert_eq!(e, UgkError::NoSink { vertex: 1 });
    }

    #[test]
    fn bundle_vertex_is_an_infinite_emitter() {
        let g = Ultragraph::parse(
            "universe {0,1}\nfamily g(n) for n in all : src 0 -> {1}\nedge h : src 1 -> {0}",
        )
        .unwrap();
        assert!(g.epsilon_is_infinite(&EpSet::singleton(0)));
        assert_eq!(g.mies(), &[EpSet::singleton(0)]);
    }

    #[test]
    fn overlapping_cofinite_ranges_meet_in_one_mie() {
        let g = Ultragraph::parse(
            "universe all\nedge a : src 0 -> { cof{1} }\nedge b : src 1 -> { cof{2} }\n\
             family c(n) for n in ap(2,1) : src n -> { n }",
        )
        .unwrap();
        assert_eq!(g.mies(), &[EpSet::cofinite([1, 2])]);
    }

    #[test]
    fn rfum_violation_is_reported() {
        // the odd vertices of r(a) are covered by no minimal infinite emitter
        let err = Ultragraph::parse(
            "universe all\nedge a : src 0 -> { all }\nedge b : src 1 -> { ap(0,2) }\n\
             family c(n) for n in ap(2,1) : src n -> { n }",
        );
        match err {
            Err(UgkError::RfumViolation { edge, remainder }) => {
                assert_eq!(edge, "a");
                assert_eq!(remainder, EpSet::ap(1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dsl_round_trips() {
        let g = Ultragraph::parse(EXAMPLE).unwrap();
        let text = g.to_dsl();
        let h = Ultragraph::parse(&text).unwrap();
        assert_eq!(g.schemas(), h.schemas());
        assert_eq!(g.universe(), h.universe());
        assert_eq!(text, h.to_dsl());
    }
}
