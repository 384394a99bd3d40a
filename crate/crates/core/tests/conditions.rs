use ugk::conditions::{
    check, check_infty, check_k, check_l, check_nd, check_t, check_w, degenerate_catalog,
    enumerate_simple_loops, exits_of_loop, is_simple_loop, Certificate, Condition, DegeneracyKind,
    Verdict,
};
use ugk::ultragraph::Ultragraph;

fn fixture(name: &str) -> Ultragraph {
    let path = format!("{}/../../fixtures/{name}.ug", env!("CARGO_MANIFEST_DIR"));
    Ultragraph::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn example_satisfies_k_infinity_and_w() {
    let g = fixture("example");
    assert_eq!(check_k(&g, 8).verdict, Verdict::Holds);
    assert_eq!(check_infty(&g, 8).verdict, Verdict::Holds);
    assert_eq!(check_w(&g, 10).verdict, Verdict::Holds);
    assert_eq!(check_l(&g, 8).verdict, Verdict::Holds);
    assert_eq!(check_nd(&g).verdict, Verdict::Holds);
    assert_eq!(check_t(&g, 6).verdict, Verdict::Holds);
}

#[test]
fn simple_loops_at_v5() {
    let g = fixture("example");
    let e1 = g.edge_by_name("e1", None).unwrap();
    let en3 = g.edge_by_name("en", Some(3)).unwrap();
    let en5 = g.edge_by_name("en", Some(5)).unwrap();
    let loops = enumerate_simple_loops(&g, 5, 4);
    assert!(loops.contains(&vec![en5]));
    assert!(loops.contains(&vec![en5, en3, e1]));
    assert!(loops.iter().all(|l| is_simple_loop(&g, l) && l.len() <= 4));
}

#[test]
fn exit_free_loop_fails_l() {
    let g = fixture("loop");
    let r = check_l(&g, 8);
    assert_eq!(r.verdict, Verdict::Fails);
    let Certificate::Loop(cycle) = &r.certificate else { panic!("{r:?}") };
    assert_eq!(cycle.len(), 3);
    assert!(exits_of_loop(&g, cycle).is_empty());
    assert_eq!(check_l(&fixture("loop_exit"), 8).verdict, Verdict::Holds);
}

#[test]
fn single_self_loop_fails_k() {
    let g = fixture("v1");
    let r = check_k(&g, 8);
    assert_eq!(r.verdict, Verdict::Fails);
    let Certificate::SingleLoop { vertex, path } = &r.certificate else { panic!() };
    assert_eq!(enumerate_simple_loops(&g, *vertex, 8), vec![path.clone()]);
}

#[test]
fn overlapping_simple_loops_satisfy_k() {
    let g = fixture("two_loops");
    let e1 = g.edge_by_name("e1", None).unwrap();
    let e2 = g.edge_by_name("e2", None).unwrap();
    let loops = enumerate_simple_loops(&g, 1, 2);
    assert!(loops.contains(&vec![e1]) && loops.contains(&vec![e1, e2]));
    assert_eq!(check_k(&g, 8).verdict, Verdict::Holds);
}

#[test]
fn degenerate_fixtures_are_tagged() {
    for (name, kind) in [
        ("v1", DegeneracyKind::V1),
        ("v2", DegeneracyKind::V2),
        ("v3", DegeneracyKind::V3),
        ("ie1", DegeneracyKind::IE1),
        ("ie2", DegeneracyKind::IE2),
    ] {
        let g = fixture(name);
        let cat = degenerate_catalog(&g);
        assert!(cat.iter().any(|d| d.kind == kind), "{name}: {cat:?}");
        assert_eq!(check_nd(&g).verdict, Verdict::Fails, "{name}");
    }
    for name in ["example", "two_vertex", "bundle_return"] {
        assert!(degenerate_catalog(&fixture(name)).is_empty(), "{name}");
    }
}

#[test]
fn synthetic_fixtures_satisfy_k_w_infinity() {
    for name in ["two_vertex", "bundle_return"] {
        let g = fixture(name);
        for c in [Condition::K, Condition::W, Condition::INF, Condition::L] {
            assert_eq!(check(&g, c, 8).verdict, Verdict::Holds, "{name} {c}");
        }
    }
}

#[test]
fn ray_fails_w_and_t() {
    let g = fixture("ray");
    assert_eq!(check_w(&g, 10).verdict, Verdict::Fails);
    assert_eq!(check_t(&g, 10).verdict, Verdict::Fails);
}

#[test]
fn source_only_emitter_fails_infinity() {
    let g = fixture("ie1");
    let r = check_infty(&g, 8);
    assert_eq!(r.verdict, Verdict::Fails, "{r:?}");
}

#[test]
fn json_report_uses_edge_labels() {
    let g = fixture("loop");
    let j = check_l(&g, 8).to_json(&g);
    assert_eq!(j["condition"], "L");
    assert_eq!(j["verdict"], "fails");
    assert_eq!(j["certificate"]["path"], "a.b.c");
}
