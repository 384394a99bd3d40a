use std::collections::BTreeSet;

use ugk::constructions::{disjoint_loops, disjoint_paths_w, f2_witness, f3_witness, four_disjoint_paths, image};
use ugk::cylinder::{self, Cylinder};
use ugk::fullgroup::{self, compose, equals, order, pi_hat, pi_tilde, random_element, FullGroupElement};
use ugk::groupoid::{self, effectiveness_report, orbit_enumerate, Bisection};
use ugk::oracle::TruncatedUniverse;
use ugk::path::Point;
use ugk::script::{parse_bisection, parse_clopen, parse_point};
use ugk::ultragraph::Ultragraph;
use ugk::UgkError;

fn fixture(name: &str) -> Ultragraph {
    let path = format!("{}/../../fixtures/{name}.ug", env!("CARGO_MANIFEST_DIR"));
    Ultragraph::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bisection_inverse_and_apply() {
    let g = fixture("example");
    let z = parse_bisection(&g, "Z(e1; e2; mie#0)").unwrap();
    assert_eq!(z.inverse().inverse(), z);
    assert_eq!(z.inverse().source(), z.range());
    let x = parse_point(&g, "fin(e2.en[3]; mie#0)");
    assert!(x.is_err(), "r(en[3]) holds no mie");
    let x = parse_point(&g, "evp(e2; en[3])").unwrap();
    assert_eq!(z.apply(&g, &x).unwrap(), parse_point(&g, "evp(e1; en[3])").unwrap());
    let y = parse_point(&g, "evp(e1; en[3])").unwrap();
    assert_eq!(z.apply(&g, &y), Err(UgkError::NotInSource));
}

#[test]
fn bisection_meets_and_products() {
    let g = fixture("example");
    let z = parse_bisection(&g, "Z(e1; e2; mie#0)").unwrap();
    assert_eq!(groupoid::intersect(&g, &z, &z), Some(z.clone()));
    let w = parse_bisection(&g, "Z(e1; e2; {3,4})").unwrap();
    let meet = groupoid::intersect(&g, &z, &w).unwrap();
    assert_eq!(meet.comp, ugk::EpSet::finite([3, 4]));
    let diag = groupoid::compose(&g, &z, &z.inverse()).unwrap();
    assert_eq!(diag.out, diag.inn);
    let other = parse_bisection(&g, "Z(en[3]; en[5]; {3})").unwrap();
    assert!(groupoid::compose(&g, &z, &other).is_none());
}

#[test]
fn orbit_of_a_finite_point_contains_its_reprefixings() {
    let g = fixture("example");
    let x = parse_point(&g, "fin(e1; mie#0)").unwrap();
    let orbit = orbit_enumerate(&g, &x, 3);
    assert!(orbit.contains(&parse_point(&g, "fin(; mie#0)").unwrap()));
    assert!(orbit.contains(&x));
    assert!(orbit.contains(&parse_point(&g, "fin(e1.e1; mie#0)").unwrap()));
    assert!(orbit.iter().all(|p| p.length().unwrap() <= 3));
}

#[test]
fn effectiveness_examples() {
    assert_eq!(effectiveness_report(&fixture("example"), 8).effective, Some(true));
    assert_eq!(effectiveness_report(&fixture("ray"), 8).effective, Some(true));
    let lp = effectiveness_report(&fixture("loop"), 8);
    assert_eq!(lp.effective, Some(false));
}

#[test]
fn involutions_and_their_supports() {
    let g = fixture("example");
    let z = parse_bisection(&g, "Z(e1; e2; mie#0)").unwrap();
    let p = pi_hat(&g, &[z.clone()]).unwrap();
    assert_eq!(order(&g, &p, 10).unwrap(), Some(2));
    let supp = p.support(&g).unwrap();
    assert!(cylinder::is_subset(&g, &supp, &[z.source(), z.range()]).unwrap());
    assert!(pi_tilde(&g, &[]).unwrap().is_identity());
    assert_eq!(order(&g, &FullGroupElement::identity(), 10).unwrap(), Some(1));
    let inv = pi_hat(&g, &[z.inverse()]).unwrap();
    assert!(equals(&g, &p.inverse(), &inv).unwrap());
}

#[test]
fn overlapping_pi_tilde_is_rejected() {
    let g = fixture("example");
    let z = parse_bisection(&g, "Z(e1; e2; mie#0)").unwrap();
    let w = parse_bisection(&g, "Z(e1; e1.en[3]; {3})").unwrap();
    assert!(matches!(pi_tilde(&g, &[z, w]), Err(UgkError::PreconditionViolated(_))));
}

#[test]
fn f3_element_moves_the_third_path_to_the_second() {
    let g = fixture("example");
    let a = parse_clopen(&g, "D(; mie#0)").unwrap();
    let w = f3_witness(&g, &a, 16).unwrap();
    let (p2, p3) = (&w.w[0].out, &w.w[0].inn);
    let lambda = &w.element;
    let t = TruncatedUniverse::new(&g, 5).unwrap();
    let comp = &w.v[0].comp;
    let mut seen = 0;
    for y in t.point_enum(3) {
        let moved = y.prepend(p3);
        let Ok(pt) = Point::evper(&g, moved.unroll(p3.len()), Vec::new()).map(|_| ()) else {
            let cyl = Cylinder::basic(&g, p3.clone(), comp.clone()).unwrap();
            if cyl.contains(&g, &moved) {
                assert_eq!(lambda.apply(&g, &moved), y.prepend(p2));
                seen += 1;
            }
            continue;
        };
        let _ = pt;
    }
    assert!(seen > 0);
    assert_eq!(order(&g, lambda, 10).unwrap(), Some(3));
}

#[test]
fn f2_agrees_with_the_involution_on_its_support() {
    let g = fixture("example");
    let tau = pi_hat(&g, &[parse_bisection(&g, "Z(e1; e2; mie#0)").unwrap()]).unwrap();
    let a = parse_clopen(&g, "D(e2; mie#0)").unwrap();
    let w = f2_witness(&g, &tau, &a, 16).unwrap();
    let psi = &w.element;
    assert!(fullgroup::is_involution(&g, psi).unwrap());
    let supp = psi.support(&g).unwrap();
    let mut target = a.clone();
    target.extend(image(&g, &tau, &a).unwrap());
    assert!(cylinder::is_subset(&g, &supp, &target).unwrap());
    let t = TruncatedUniverse::new(&g, 6).unwrap();
    for x in t.point_enum(5) {
        if cylinder::clopen_contains(&g, &supp, &x) {
            assert_eq!(psi.apply(&g, &x), tau.apply(&g, &x), "{}", x.display(&g));
        }
    }
}

#[test]
fn disjoint_families() {
    let g = fixture("two_loops");
    let e1 = g.edge_by_name("e1", None).unwrap();
    for k in 1..=4 {
        let f = disjoint_loops(&g, &[e1], k, 8).unwrap();
        assert_eq!(f.members.len(), k);
        assert!(f.verify(&g));
    }
    let g = fixture("example");
    let en5 = g.edge_by_name("en", Some(5)).unwrap();
    let x = Point::evper(&g, vec![], vec![en5]).unwrap();
    let (m, f) = four_disjoint_paths(&g, &x, 1, 8).unwrap();
    assert!(m > 1);
    assert!(f.verify(&g));
    let e1 = g.edge_by_name("e1", None).unwrap();
    let (f, _) = disjoint_paths_w(&g, &[e1, e1], 0, 8).unwrap();
    assert_eq!(f.members.len(), 1);
}

#[test]
fn single_loop_has_no_disjoint_family() {
    let g = fixture("loop");
    let a = g.edge_by_name("a", None).unwrap();
    let b = g.edge_by_name("b", None).unwrap();
    let c = g.edge_by_name("c", None).unwrap();
    assert!(disjoint_loops(&g, &[a, b, c], 2, 8).is_err());
}

#[test]
fn random_elements_are_valid_and_seed_stable() {
    for name in ["example", "two_vertex", "bundle_return"] {
        let g = fixture(name);
        for seed in 0..20 {
            let a = random_element(&g, 3, seed).unwrap();
            a.check(&g).unwrap();
            assert_eq!(a, random_element(&g, 3, seed).unwrap());
            let id = compose(&g, &a.inverse(), &a).unwrap();
            assert!(id.is_identity());
            let rows: BTreeSet<_> = a.rows.iter().map(Bisection::source).collect();
            assert_eq!(rows.len(), a.rows.len());
        }
    }
}
