mod common;

use std::fs;

use vqe_partition::baranyai::{build_schedule, build_schedule_with, FlowEngine};
use vqe_partition::oracles::{validate_schedule, ScheduleViolation};
use vqe_partition::partition::{
    load_coefficients, load_schedule, partition, save_schedule, schedule_to_json, PartitionError,
};

#[test]
fn table_fixture_is_a_valid_schedule() {
    let table = common::reference_schedule_fixture();
    assert_eq!(table.rounds.len(), 35);
    let report = validate_schedule(&table);
    assert!(report.passed, "{report:?}");
}

#[test]
fn built_schedule_differs_only_in_order_from_any_valid_table() {
    let ours = build_schedule(8).unwrap();
    let table = common::reference_schedule_fixture();
    let mut a: Vec<_> = ours.subsets().copied().collect();
    let mut b: Vec<_> = table.subsets().copied().collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn save_then_load_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    for n in [4, 8, 12] {
        let s = build_schedule(n).unwrap();
        save_schedule(&s, &path).unwrap();
        assert_eq!(load_schedule(&path, Some(n)).unwrap(), s);
    }
}

#[test]
fn saved_bytes_are_stable() {
    let a = schedule_to_json(&build_schedule(12).unwrap());
    let b = schedule_to_json(&build_schedule(12).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with("{\"n\": 12, \"rounds\": [[["));
    assert!(a.ends_with("]]]}\n"));
}

#[test]
fn duplicated_subset_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dup.json");
    let mut text = schedule_to_json(&build_schedule(8).unwrap());
    // Replace the second round's first subset with a copy of the first round's first subset.
    let s = build_schedule(8).unwrap();
    let first = s.rounds[0].subsets[0].elements();
    let second = s.rounds[1].subsets[0].elements();
    let fmt = |e: [usize; 4]| format!("[{},{},{},{}]", e[0], e[1], e[2], e[3]);
    let at = text.find(&fmt(second)).unwrap();
    text.replace_range(at..at + fmt(second).len(), &fmt(first));
    fs::write(&path, text).unwrap();
    let err = load_schedule(&path, Some(8)).unwrap_err();
    assert!(matches!(err, PartitionError::Validation(_)), "{err}");

    let tampered = vqe_partition::partition::read_schedule_unchecked(&path).unwrap();
    let report = validate_schedule(&tampered);
    assert!(!report.passed);
    assert!(matches!(
        report.first_violation,
        Some(ScheduleViolation::Duplicate { .. })
            | Some(ScheduleViolation::Overlap { .. })
            | Some(ScheduleViolation::Missing { .. })
    ));
}

#[test]
fn load_rejects_wrong_n_and_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    save_schedule(&build_schedule(8).unwrap(), &path).unwrap();
    assert!(matches!(
        load_schedule(&path, Some(12)),
        Err(PartitionError::ModeMismatch {
            expected: 12,
            found: 8
        })
    ));
    fs::write(&path, "{\"n\": 8, \"rounds\": [[[7,5,3]]]}").unwrap();
    assert!(load_schedule(&path, None).is_err());
    fs::write(&path, "not json").unwrap();
    assert!(matches!(
        load_schedule(&path, None),
        Err(PartitionError::Json { .. })
    ));
    assert!(matches!(
        load_schedule(&dir.path().join("missing.json"), None),
        Err(PartitionError::Io { .. })
    ));
}

#[test]
fn baseline_engine_also_validates() {
    let s = build_schedule_with(8, FlowEngine::Baseline).unwrap();
    assert!(validate_schedule(&s).passed);
    assert_eq!(s.rounds.len(), 35);
}

#[test]
fn coefficients_file_filters_dominant_terms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    fs::write(
        &path,
        r#"{"n": 8, "one_body": [{"pq": [1, 0], "value": -0.5}], "two_body": [{"pqrs": [7,5,3,0], "value": 0.125}]}"#,
    )
    .unwrap();
    let coeffs = load_coefficients(&path).unwrap();
    let report = partition(&build_schedule(8).unwrap(), Some(&coeffs)).unwrap();
    let provenance: Vec<Vec<usize>> = report
        .families
        .iter()
        .flat_map(|f| f.provenance.iter().map(|t| t.indices()))
        .collect();
    assert!(provenance.contains(&vec![7, 5, 3, 0]));
    assert!(!provenance.contains(&vec![6, 4, 2, 1]));
    assert!(provenance.contains(&vec![1, 0]));
    assert_eq!(report.summary.dominant_string_count, 16);
    assert_eq!(report.summary.residual_string_count, 4);
}
