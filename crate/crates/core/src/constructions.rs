//! Disjoint loops and paths, and the full-group witnesses built from them:
//! an element of order three inside any clopen set, an involution moving a
//! given point inside a neighbourhood, and a commutator agreeing with a given
//! involution on a prescribed set.

use std::collections::{BTreeSet, VecDeque};

use crate::cylinder::{self, Clopen, Cylinder};
use crate::epset::EpSet;
use crate::error::{Result, UgkError};
use crate::fullgroup::{self, commutator, pi_hat, FullGroupElement};
use crate::groupoid::Bisection;
use crate::path::{format_path, ultrapath_disjoint, Path, Point, Ultrapath};
use crate::ultragraph::{EdgeRef, Ultragraph};

/// Paths `prefix·m` for `m` in `members`, all carrying the component `comp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointFamily {
    pub prefix: Path,
    pub members: Vec<Path>,
    pub comp: EpSet,
}

impl DisjointFamily {
    pub fn ultrapaths(&self) -> Vec<Ultrapath> {
        self.members
            .iter()
            .map(|m| {
                let mut p = self.prefix.clone();
                p.extend_from_slice(m);
                Ultrapath {
                    path: p,
                    comp: self.comp.clone(),
                }
            })
            .collect()
    }

    /// Pairwise disjointness and `comp ⊆ r(member)` for every member.
    pub fn verify(&self, g: &Ultragraph) -> bool {
        let ups = self.ultrapaths();
        !self.comp.is_empty()
            && ups.iter().all(|u| {
                crate::path::is_composable(g, &u.path)
                    && u.path
                        .last()
                        .is_some_and(|&e| self.comp.is_subset(&g.range(e)))
            })
            && ups
                .iter()
                .enumerate()
                .all(|(i, x)| ups[i + 1..].iter().all(|y| ultrapath_disjoint(g, x, y)))
    }

    pub fn display(&self, g: &Ultragraph) -> String {
        let m: Vec<String> = self.members.iter().map(|p| format_path(g, p)).collect();
        format!("[{}] after '{}' on {}", m.join(", "), format_path(g, &self.prefix), self.comp)
    }
}

/// A full-group element together with the data it was built from.
#[derive(Clone, Debug)]
pub struct Witness {
    pub element: FullGroupElement,
    pub v: Vec<Bisection>,
    pub w: Vec<Bisection>,
    /// Normalisation steps performed while building the witness.
    pub notes: Vec<String>,
}

const PATH_LIMIT: usize = 4000;

/// Paths of length `1..=bound` starting in `starts`, breadth first in edge order.
fn paths_from(g: &Ultragraph, starts: &[u64], skip: &BTreeSet<EdgeRef>, bound: usize) -> Vec<Path> {
    let cutoff = g.structural_bound();
    let mut out = Vec::new();
    let mut queue: VecDeque<Path> = VecDeque::new();
    for &v in starts {
        for e in g.edges_from(v).iter_capped(6) {
            if !skip.contains(&e) {
                queue.push_back(vec![e]);
            }
        }
    }
    while let Some(p) = queue.pop_front() {
        if out.len() >= PATH_LIMIT {
            break;
        }
        if p.len() < bound {
            let r = g.range(*p.last().expect("nonempty"));
            for w in r.iter().take_while(|&w| w < cutoff).take(6) {
                for e in g.edges_from(w).iter_capped(4) {
                    let mut q = p.clone();
                    q.push(e);
                    queue.push_back(q);
                }
            }
        }
        out.push(p);
    }
    out
}

/// Chooses `k` members of `cands` that are pairwise compatible, extending
/// `chosen`, by depth-first search in candidate order.
fn pick<T: Clone>(cands: &[T], k: usize, chosen: &mut Vec<T>, ok: &dyn Fn(&T, &T) -> bool) -> bool {
    if chosen.len() == k {
        return true;
    }
    let mut steps = 0;
    for (i, c) in cands.iter().enumerate() {
        if chosen.iter().all(|d| ok(c, d)) {
            chosen.push(c.clone());
            if pick(&cands[i + 1..], k, chosen, ok) {
                return true;
            }
            chosen.pop();
            steps += 1;
            if steps > 200 {
                break;
            }
        }
    }
    false
}

fn up(path: Path, comp: &EpSet) -> Ultrapath {
    Ultrapath {
        path,
        comp: comp.clone(),
    }
}

/// `k` pairwise disjoint loops at `s(ρ)`, as ultrapaths with component
/// `{s(ρ)}`. Powers `τ₂ⁿτ₁` of two disjoint simple loops are tried first.
pub fn disjoint_loops(g: &Ultragraph, rho: &[EdgeRef], k: usize, bound: usize) -> Result<DisjointFamily> {
    let first = *rho.first().ok_or_else(|| UgkError::PreconditionViolated("empty loop".into()))?;
    let v = g.source(first);
    if !g.range(*rho.last().expect("nonempty")).contains(v) {
        return Err(UgkError::PreconditionViolated(format!(
            "{} is not a loop",
            format_path(g, rho)
        )));
    }
    let comp = EpSet::singleton(v);
    let family = |members: Vec<Path>| DisjointFamily {
        prefix: Vec::new(),
        members,
        comp: comp.clone(),
    };
    let simple = crate::conditions::enumerate_simple_loops(g, v, bound);
    for (i, t1) in simple.iter().enumerate() {
        for t2 in &simple[i + 1..] {
            if !crate::path::paths_disjoint(t1, t2) {
                continue;
            }
            let members: Vec<Path> = (0..k)
                .map(|n| {
                    let mut p: Path = std::iter::repeat_n(t2.iter().copied(), n).flatten().collect();
                    p.extend_from_slice(t1);
                    p
                })
                .collect();
            let f = family(members);
            if f.verify(g) {
                return Ok(f);
            }
        }
    }
    let loops: Vec<Path> = paths_from(g, &[v], &BTreeSet::new(), bound)
        .into_iter()
        .filter(|p| g.range(*p.last().expect("nonempty")).contains(v))
        .collect();
    let mut chosen = Vec::new();
    let ok = |a: &Path, b: &Path| ultrapath_disjoint(g, &up(a.clone(), &comp), &up(b.clone(), &comp));
    if pick(&loops, k, &mut chosen, &ok) {
        return Ok(family(chosen));
    }
    Err(UgkError::InsufficientLoops { bound })
}

/// `N+1` disjoint ultrapaths from `s(α)` whose components are a vertex
/// `s(α_{n+1})` on the finite path `α`, one of them an initial segment of `α`.
/// Returns the family and `n`.
pub fn disjoint_paths_w(g: &Ultragraph, alpha: &[EdgeRef], big_n: usize, bound: usize) -> Result<(DisjointFamily, usize)> {
    let not_found = || UgkError::WitnessNotFound {
        what: format!("{} disjoint paths along {}", big_n + 1, format_path(g, alpha)),
        bound,
    };
    if alpha.len() < 2 || !crate::path::is_composable(g, alpha) {
        return Err(not_found());
    }
    let src = |i: usize| g.source(alpha[i]);
    let mut n = 1;
    let mut members: Vec<Path> = vec![alpha[..1].to_vec()];
    while members.len() < big_n + 1 {
        let mut advanced = false;
        'm: for m in n + 1..alpha.len() {
            let w = src(m);
            let comp = EpSet::singleton(w);
            let seg = &alpha[n..m];
            for gamma in paths_from(g, &[src(n)], &BTreeSet::new(), bound) {
                if gamma == seg || !g.range(*gamma.last().expect("nonempty")).contains(w) {
                    continue;
                }
                let mut next: Vec<Path> = members
                    .iter()
                    .map(|b| [b.as_slice(), seg].concat())
                    .collect();
                next.push([&alpha[..n], gamma.as_slice()].concat());
                let f = DisjointFamily {
                    prefix: Vec::new(),
                    members: next,
                    comp: comp.clone(),
                };
                if f.verify(g) {
                    members = f.members;
                    n = m;
                    advanced = true;
                    break 'm;
                }
            }
        }
        if !advanced {
            return Err(not_found());
        }
    }
    Ok((
        DisjointFamily {
            prefix: Vec::new(),
            members,
            comp: EpSet::singleton(src(n)),
        },
        n,
    ))
}

/// For an infinite point `x` and `n`, finds `m > n` and paths `α₁ = x_{n+1}…x_m`,
/// `α₂, α₃, α₄` from `s(x_{n+1})` whose ranges contain `s(x_{m+1})`, with the
/// ultrapaths `(x_1…x_n α_i, {s(x_{m+1})})` mutually disjoint.
pub fn four_disjoint_paths(g: &Ultragraph, x: &Point, n: usize, bound: usize) -> Result<(usize, DisjointFamily)> {
    if !x.is_infinite() {
        return Err(UgkError::PreconditionViolated("the point must be an infinite path".into()));
    }
    let prefix = x.unroll(n);
    let start = g.source(x.edge(n).expect("infinite"));
    let cands = paths_from(g, &[start], &BTreeSet::new(), bound);
    for m in n + 1..=n + bound {
        let w = g.source(x.edge(m).expect("infinite"));
        let comp = EpSet::singleton(w);
        let own: Path = (n..m).map(|i| x.edge(i).expect("infinite")).collect();
        let hits: Vec<Path> = cands
            .iter()
            .filter(|p| **p != own && g.range(*p.last().expect("nonempty")).contains(w))
            .cloned()
            .collect();
        let full = |p: &Path| up([prefix.as_slice(), p.as_slice()].concat(), &comp);
        let ok = |a: &Path, b: &Path| ultrapath_disjoint(g, &full(a), &full(b));
        let mut chosen = vec![own];
        if pick(&hits, 4, &mut chosen, &ok) {
            let f = DisjointFamily {
                prefix,
                members: chosen,
                comp,
            };
            debug_assert!(f.verify(g));
            return Ok((m, f));
        }
    }
    Err(UgkError::WitnessNotFound {
        what: format!("four disjoint paths after {} edges of {}", n, x.display(g)),
        bound,
    })
}

fn bis(g: &Ultragraph, out: Path, inn: Path, comp: &EpSet, excl: &BTreeSet<EdgeRef>) -> Result<Bisection> {
    Bisection::new(g, out, inn, comp.clone(), excl.clone())
}

fn concat(a: &[EdgeRef], b: &[EdgeRef]) -> Path {
    [a, b].concat()
}

/// A basic cylinder `D_{(βe, r(e))}` inside the first nonempty part of `a`.
fn shrink(g: &Ultragraph, a: &[Cylinder]) -> Result<(Cylinder, String)> {
    for c in a {
        if c.is_empty(g) {
            continue;
        }
        let Some(e) = g
            .epsilon(&c.comp)
            .iter_capped(16)
            .find(|e| !c.excl.contains(e))
        else {
            continue;
        };
        let prefix = concat(&c.prefix, &[e]);
        let note = format!(
            "shrunk {} to D({}; {}) to drop excluded edges",
            c.display(g),
            format_path(g, &prefix),
            g.range(e)
        );
        return Ok((Cylinder::basic(g, prefix, g.range(e))?, note));
    }
    Err(UgkError::PreconditionViolated("the clopen set is empty".into()))
}

/// `k` paths from vertices of `base` with a common range vertex `w` such that
/// the ultrapaths `(prefix·α_i, {w})` are mutually disjoint.
fn disjoint_from_set(
    g: &Ultragraph,
    prefix: &[EdgeRef],
    base: &EpSet,
    k: usize,
    bound: usize,
) -> Result<DisjointFamily> {
    let starts: Vec<u64> = base.iter().take_while(|&v| v < g.structural_bound()).take(4).collect();
    let cands = paths_from(g, &starts, &BTreeSet::new(), bound);
    let mut targets: Vec<u64> = Vec::new();
    for p in cands.iter().take(64) {
        for w in g.range(*p.last().expect("nonempty")).iter().take(3) {
            if !targets.contains(&w) {
                targets.push(w);
            }
        }
    }
    for w in targets {
        let comp = EpSet::singleton(w);
        let hits: Vec<Path> = cands
            .iter()
            .filter(|p| g.range(*p.last().expect("nonempty")).contains(w))
            .cloned()
            .collect();
        let full = |p: &Path| up(concat(prefix, p), &comp);
        let ok = |a: &Path, b: &Path| ultrapath_disjoint(g, &full(a), &full(b));
        let mut chosen = Vec::new();
        if pick(&hits, k, &mut chosen, &ok) {
            return Ok(DisjointFamily {
                prefix: prefix.to_vec(),
                members: chosen,
                comp,
            });
        }
    }
    Err(UgkError::WitnessNotFound {
        what: format!("{k} disjoint paths from {base}"),
        bound,
    })
}

/// An element `Λ = [π_V̂, π_Ŵ]` of order three with support inside `a`.
pub fn f3_witness(g: &Ultragraph, a: &[Cylinder], bound: usize) -> Result<Witness> {
    let (c, note) = shrink(g, a)?;
    let fam = disjoint_from_set(g, &c.prefix, &c.comp, 3, bound)?;
    let p: Vec<Path> = fam.members.iter().map(|m| concat(&c.prefix, m)).collect();
    let none = BTreeSet::new();
    let v = vec![bis(g, p[0].clone(), p[1].clone(), &fam.comp, &none)?];
    let w = vec![bis(g, p[1].clone(), p[2].clone(), &fam.comp, &none)?];
    let element = commutator(g, &pi_hat(g, &v)?, &pi_hat(g, &w)?)?;
    Ok(Witness {
        element,
        v,
        w,
        notes: vec![note, format!("disjoint paths {}", fam.display(g))],
    })
}

/// The smallest `n ≥ 1` with `D_{(x_1…x_n, r(x_n))} ⊆ a`.
fn neighbourhood_depth(g: &Ultragraph, x: &Point, a: &[Cylinder]) -> Result<usize> {
    let longest = a.iter().map(|c| c.prefix.len()).max().unwrap_or(0);
    for n in 1..=longest + 2 {
        let head = x.unroll(n);
        let c = Cylinder::basic(g, head.clone(), g.range(head[n - 1]))?;
        if cylinder::is_subset(g, &[c], a)? {
            return Ok(n);
        }
    }
    Err(UgkError::PreconditionViolated(format!(
        "no cylinder around {} lies in the given set",
        x.display(g)
    )))
}

/// Excluded edges `F` with `D_{(β,B),F} ⊆ a`, for the finite point `(β,B)`.
fn finite_neighbourhood(g: &Ultragraph, beta: &[EdgeRef], b: &EpSet, a: &[Cylinder]) -> Result<BTreeSet<EdgeRef>> {
    let whole = Cylinder::basic(g, beta.to_vec(), b.clone())?;
    let mut f = BTreeSet::new();
    for piece in cylinder::clopen_difference(g, &[whole], a)? {
        if piece.prefix.len() > beta.len() {
            f.insert(piece.prefix[beta.len()]);
        } else {
            let meet = piece.comp.intersect(b);
            let es = g.epsilon(&meet).without(&piece.excl).to_vec().ok_or_else(|| {
                UgkError::PreconditionViolated("the point is not inside the given set".into())
            })?;
            f.extend(es);
        }
    }
    let c = Cylinder::new(g, beta.to_vec(), b.clone(), f.clone())?;
    if !cylinder::is_subset(g, &[c], a)? {
        return Err(UgkError::PreconditionViolated(
            "the point is not inside the given set".into(),
        ));
    }
    Ok(f)
}

/// An involution `π = [π_V̂, π_Ŵ]` with `x ∈ supp(π) ⊆ a`.
pub fn f1_witness(g: &Ultragraph, x: &Point, a: &[Cylinder], bound: usize) -> Result<Witness> {
    if !cylinder::clopen_contains(g, a, x) {
        return Err(UgkError::PreconditionViolated(format!(
            "{} is not in the given set",
            x.display(g)
        )));
    }
    match x {
        Point::EvPer { .. } => {
            let n = neighbourhood_depth(g, x, a)?;
            let (m, fam) = four_disjoint_paths(g, x, n, bound)?;
            let al: Vec<Path> = fam.members.iter().map(|p| concat(&fam.prefix, p)).collect();
            let none = BTreeSet::new();
            let b = &fam.comp;
            let v = vec![
                bis(g, al[0].clone(), al[1].clone(), b, &none)?,
                bis(g, al[2].clone(), al[3].clone(), b, &none)?,
            ];
            let w = vec![bis(g, al[0].clone(), al[2].clone(), b, &none)?];
            let element = commutator(g, &pi_hat(g, &v)?, &pi_hat(g, &w)?)?;
            Ok(Witness {
                element,
                v,
                w,
                notes: vec![
                    format!("neighbourhood D({}) at depth {n}", format_path(g, &x.unroll(n))),
                    format!("m = {m}; component normalised to {b}"),
                    format!("paths {}", fam.display(g)),
                ],
            })
        }
        Point::Fin { prefix, mie } => {
            let b = g.mies()[*mie].clone();
            let f = finite_neighbourhood(g, prefix, &b, a)?;
            let starts: Vec<u64> = b.iter().take_while(|&v| v < g.structural_bound()).take(6).collect();
            let loops: Vec<Path> = paths_from(g, &starts, &f, bound)
                .into_iter()
                .filter(|p| b.is_subset(&g.range(*p.last().expect("nonempty"))))
                .collect();
            let ok = |p: &Path, q: &Path| crate::path::paths_disjoint(p, q) && p[0] != q[0];
            let mut chosen = Vec::new();
            if !pick(&loops, 3, &mut chosen, &ok) {
                return Err(UgkError::WitnessNotFound {
                    what: format!("three disjoint returns to mie#{mie}"),
                    bound,
                });
            }
            let mut h = f.clone();
            h.extend(chosen.iter().map(|p| p[0]));
            let q: Vec<Path> = chosen.iter().map(|p| concat(prefix, p)).collect();
            let v = vec![
                bis(g, q[0].clone(), prefix.clone(), &b, &h)?,
                bis(g, q[1].clone(), q[2].clone(), &b, &h)?,
            ];
            let w = vec![bis(g, q[0].clone(), q[1].clone(), &b, &h)?];
            let element = commutator(g, &pi_hat(g, &v)?, &pi_hat(g, &w)?)?;
            let labels: Vec<String> = h.iter().map(|&e| g.edge_label(e)).collect();
            Ok(Witness {
                element,
                v,
                w,
                notes: vec![format!("excluded edges {{{}}}", labels.join(", "))],
            })
        }
    }
}

/// For an involution `τ` and a nonempty clopen `a ⊆ supp(τ)`, an element
/// `ψ = [π_V̂, π_Ŵ]` with `supp(ψ) ⊆ a ∪ τ(a)` agreeing with `τ` on its support.
pub fn f2_witness(g: &Ultragraph, tau: &FullGroupElement, a: &[Cylinder], bound: usize) -> Result<Witness> {
    if !fullgroup::is_involution(g, tau)? {
        return Err(UgkError::PreconditionViolated("τ is not an involution".into()));
    }
    let supp = tau.support(g)?;
    if !cylinder::is_subset(g, a, &supp)? {
        return Err(UgkError::PreconditionViolated("the set is not inside supp(τ)".into()));
    }
    for row in &tau.rows {
        let meet: Clopen = cylinder::clopen_intersect(g, a, &[row.source()]);
        let Ok((c, note)) = shrink(g, &meet) else {
            continue;
        };
        let mut notes = vec![note];
        let (gamma, comp) = if c.prefix.len() > row.inn.len() {
            (c.prefix.clone(), c.comp.clone())
        } else {
            let (d, n2) = shrink(g, &[c])?;
            notes.push(n2);
            (d.prefix, d.comp)
        };
        let rho = &gamma[row.inn.len()..];
        let fam = match disjoint_from_set(g, &gamma, &comp, 2, bound) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let (l1, l2) = (&fam.members[0], &fam.members[1]);
        let bj = |l: &Path| concat(&concat(&row.inn, rho), l);
        let aj = |l: &Path| concat(&concat(&row.out, rho), l);
        let none = BTreeSet::new();
        let cc = &fam.comp;
        let v = vec![
            bis(g, bj(l1), bj(l2), cc, &none)?,
            bis(g, aj(l1), aj(l2), cc, &none)?,
        ];
        let w = vec![bis(g, aj(l2), bj(l2), cc, &none)?];
        let element = commutator(g, &pi_hat(g, &v)?, &pi_hat(g, &w)?)?;
        notes.push(format!("row {} with ρ = '{}'", row.display(g), format_path(g, rho)));
        return Ok(Witness { element, v, w, notes });
    }
    Err(UgkError::WitnessNotFound {
        what: "a cylinder of the set inside a row of τ".into(),
        bound,
    })
}

/// Image of a clopen set under a full-group element.
pub fn image(g: &Ultragraph, t: &FullGroupElement, a: &[Cylinder]) -> Result<Clopen> {
    let mut out = Vec::new();
    let src = t.sources();
    for c in a {
        for z in &t.rows {
            if let Some(piece) = cylinder::intersect(g, c, &z.source()) {
                out.push(z.restrict_source(&piece).range());
            }
        }
        out.extend(cylinder::difference_all(g, c, &src)?);
    }
    cylinder::normalize(g, &out)
}
