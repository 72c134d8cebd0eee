use std::fs;

use gaitlab::harness::{export_trace, parse_scenario, run_scenario, Scenario, CONTINUOUS_HEADER, STEPS_HEADER};

fn export_to(s: &Scenario, dir: &std::path::Path) -> Vec<Vec<u8>> {
    let (trace, summary) = run_scenario(s).unwrap();
    export_trace(&trace, &summary, dir).unwrap().iter().map(|p| fs::read(p).unwrap()).collect()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let s = Scenario::benchmark("cop", false, 0.9).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = export_to(&s, a.path());
    let second = export_to(&s, b.path());
    assert_eq!(first.len(), 3);
    assert_eq!(first, second);
}

#[test]
fn continuous_rows_cover_the_run() {
    let s = Scenario::benchmark("cop", false, 0.9).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_to(&s, dir.path());
    let text = fs::read_to_string(dir.path().join("continuous.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CONTINUOUS_HEADER));
    let rows = lines.count();
    let expected = (s.setup.n_steps as f64 * s.cycle().t_c / s.setup.dt).round() as usize;
    assert!(rows.abs_diff(expected) <= s.setup.n_steps + 1, "{rows} rows, expected about {expected}");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["controller"], "cop");
    assert_eq!(summary["converged"], true);
}

#[test]
fn open_loop_steps_keep_the_cycle_length() {
    let s = parse_scenario("controller = openloop\nimpulse.scale = 0\nsim.n_steps = 3\n", "inline").unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_to(&s, dir.path());
    let text = fs::read_to_string(dir.path().join("steps.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(STEPS_HEADER));
    let body: Vec<_> = lines.collect();
    assert!(!body.is_empty());
    for row in body {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 11);
        assert_eq!(cols[1], "0.5");
        assert_eq!(cols[2], "0.4");
    }
}
