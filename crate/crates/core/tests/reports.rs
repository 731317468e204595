//! Report encoding and graph ingestion.

use grd_core::deaconu::{Graph, LocalSystem};
use grd_core::experiments::{cuntz_growth, growth_report, GrowthMode, SystemSpec};
use grd_core::growth;
use grd_core::{CheckReport, CheckRow, EvPeriodicPoint, Point};

#[test]
fn written_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    cuntz_growth(5).unwrap().write_json(&a).unwrap();
    cuntz_growth(5).unwrap().write_json(&b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn rows_sort_and_failures_show_negative_slack() {
    let mut rep = CheckReport::new("demo");
    rep.push(CheckRow::leq("z", "b", 2.0, 1.0, 0.0));
    rep.push(CheckRow::leq("a", "x", 0.1 + 0.2, 0.3, 1e-12));
    let json = rep.to_json();
    assert!(json.find("\"check\": \"a\"").unwrap() < json.find("\"check\": \"z\"").unwrap());
    assert!(json.contains("\"slack\": -1"));
    assert!(json.contains("\"summary\": \"fail\""));
    assert_eq!(rep.failures().count(), 1);
}

#[test]
fn numbers_are_rounded_to_fifteen_digits() {
    let mut rep = CheckReport::new("digits");
    rep.param("x", 0.1 + 0.2);
    assert!(rep.to_json().contains("\"x\": 0.3"), "{}", rep.to_json());
}

#[test]
fn single_loop_counts_are_odd_numbers() {
    let g = Graph::from_json(r#"{"vertices":["v"],"edges":[{"src":"v","dst":"v","label":"e"}]}"#).unwrap();
    let (_, table, _) = growth_report(&SystemSpec::Graph(g), GrowthMode::Fiber, 8, 1).unwrap();
    let expect: Vec<u64> = (0..=8).map(|n| 2 * n + 1).collect();
    assert_eq!(table.max_counts(), expect);
}

#[test]
fn bouquet_reproduces_full_shift() {
    for d in [2usize, 3] {
        let g = LocalSystem::Graph(Graph::bouquet(d));
        let s = LocalSystem::full_shift(d as u32).unwrap();
        let gt = growth::dr_ball_counts(&g, &g.sample_points(1), 5);
        let st = growth::dr_ball_counts(&s, &[Point::Seq(EvPeriodicPoint::constant(0))], 5);
        assert_eq!(gt.max_counts(), st.max_counts(), "d={d}");
    }
}

#[test]
fn sinks_are_rejected_by_name() {
    let err = Graph::from_json(r#"{"vertices":["u","w"],"edges":[{"src":"u","dst":"w","label":"e"}]}"#).unwrap_err();
    assert!(err.to_string().contains('w'), "{err}");
    assert!(Graph::from_json("[1,2").is_err());
}
