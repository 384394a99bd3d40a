use ugk::oracle::{
    auto_truncation, diff_test, member, mie_agreement, random_cylinder, random_presentation, SetExpr,
    TruncatedUniverse,
};
use ugk::ultragraph::Ultragraph;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIXTURES: [&str; 12] = [
    "example",
    "two_vertex",
    "bundle_return",
    "ie1",
    "ie2",
    "v1",
    "v2",
    "v3",
    "loop",
    "loop_exit",
    "two_loops",
    "ray",
];

fn fixture(name: &str) -> Ultragraph {
    let path = format!("{}/../../fixtures/{name}.ug", env!("CARGO_MANIFEST_DIR"));
    Ultragraph::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn cylinder_algebra_matches_membership() {
    for f in FIXTURES {
        let g = fixture(f);
        let n = auto_truncation(&g, 5, 1500);
        let rep = diff_test(&g, 11, 60, n, 5).unwrap();
        assert_eq!(rep.divergences, 0, "{f}: {:?}", rep.first);
    }
}

#[test]
fn contains_agrees_with_definition() {
    let g = fixture("example");
    let t = TruncatedUniverse::new(&g, 6).unwrap();
    let points = t.point_enum(5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let c = random_cylinder(&t, &mut rng, None);
        let e = SetExpr::Cyl(c.clone());
        for p in &points {
            assert_eq!(c.contains(&g, p), member(&g, &e, p), "{} {}", c.display(&g), p.display(&g));
        }
    }
}

#[test]
fn mies_match_lattice_on_fixtures() {
    for f in FIXTURES {
        let (prod, lattice) = mie_agreement(&fixture(f), 40).unwrap();
        assert_eq!(prod, lattice, "{f}");
    }
}

#[test]
fn mies_match_lattice_on_random_presentations() {
    let graphs: Vec<Ultragraph> = (0..200).filter_map(random_presentation).take(20).collect();
    assert_eq!(graphs.len(), 20);
    for g in &graphs {
        let (prod, lattice) = mie_agreement(g, 40).unwrap();
        assert_eq!(prod, lattice);
    }
}

#[test]
fn random_presentations_are_deterministic() {
    let a = random_presentation(5).map(|g| g.mies().to_vec());
    let b = random_presentation(5).map(|g| g.mies().to_vec());
    assert_eq!(a, b);
}
