use qfourier_core::io::{
    corpus, graph_report, parse_graph, parse_kraus, parse_ring, run_batch, run_rings, serialize_ring, TaskStatus,
};
use qfourier_core::{PsdPolicy, RunConfig, VerdictStatus};
use std::path::{Path, PathBuf};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn ring_paths() -> Vec<PathBuf> {
    corpus::RINGS.iter().map(|(name, _)| corpus_dir().join(name)).collect()
}

#[test]
fn ring_files_on_disk_are_canonical() {
    for path in ring_paths() {
        let ring = parse_ring(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(serialize_ring(&ring), text, "{}", path.display());
        assert!(ring.validate().is_valid());
    }
}

#[test]
fn batch_over_paths_matches_bundled_run() {
    let cfg = RunConfig { n_max: 2, subset_cap: 2, ..RunConfig::default() };
    let from_disk = run_batch(&ring_paths(), &cfg);
    let bundled = run_rings(&corpus::ring_files(), &cfg);
    assert_eq!(from_disk.internal_errors(), 0);
    let strip = |r: &qfourier_core::Report| serde_json::to_value(&r.records).unwrap();
    assert_eq!(strip(&from_disk), strip(&bundled));
    assert_eq!(from_disk.rings.len(), corpus::RINGS.len());
    assert!(from_disk.rings.iter().all(|s| s.source.is_some()));
}

#[test]
fn missing_file_is_reported_not_fatal() {
    let mut paths = ring_paths()[..2].to_vec();
    paths.push(corpus_dir().join("does_not_exist.ring"));
    let report = run_batch(&paths, &RunConfig { n_max: 1, ..RunConfig::default() });
    assert_eq!(report.rings.len(), 3);
    assert!(report.rings.iter().filter(|s| s.error.is_some()).count() == 1);
    assert!(report.records.iter().all(|r| r.status != TaskStatus::Error));
}

#[test]
fn d5_graph_file_is_obstructed() {
    let file = parse_graph(&corpus_dir().join("d5.graph")).unwrap();
    let rep = graph_report(&file, 1, &PsdPolicy::default()).unwrap();
    let delta = (2.0 + 2f64.sqrt()).sqrt();
    assert!((rep.delta - delta).abs() < 1e-12);
    assert!(rep.vertices.iter().all(|v| v.weight > 0.0));
    let check = &rep.local_checks[0].check;
    assert_eq!(check.verdict.status, VerdictStatus::Fails);
    assert!(check.determinant.unwrap() < 0.0);
    assert!(rep.conclusion.is_some());
}

#[test]
fn kraus_files_on_disk() {
    let damp = parse_kraus(&corpus_dir().join("full_damp.kraus.json")).unwrap();
    assert!(damp.is_trace_preserving() && !damp.is_unital());
    let pinch = parse_kraus(&corpus_dir().join("pinching3.kraus.json")).unwrap();
    assert_eq!(pinch.dim(), 3);
    assert!(pinch.is_trace_preserving() && pinch.is_unital());
}
