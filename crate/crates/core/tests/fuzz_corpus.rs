//! Replays the checked-in fuzz seeds through the same entry points and
//! invariants as the fuzz targets.

use std::fs;
use std::path::{Path, PathBuf};

use cnroots::analyze::CfGrid;
use cnroots::config::RunConfig;
use cnroots::construct::Blueprint;
use cnroots::family::PhaseVector;
use cnroots::support::SupportSpec;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn support_spec_seeds() {
    let mut accepted = 0;
    for (path, bytes) in seeds("parse_support_spec") {
        if let Ok(spec) = SupportSpec::from_json(std::str::from_utf8(&bytes).unwrap()) {
            assert_eq!(
                SupportSpec::from_json(&spec.to_json()).unwrap(),
                spec,
                "{path:?}"
            );
            accepted += 1;
        }
    }
    assert_eq!(accepted, 4);
}

#[test]
fn run_config_seeds() {
    for (path, bytes) in seeds("parse_run_config") {
        let c = RunConfig::from_json(std::str::from_utf8(&bytes).unwrap());
        assert!(c.is_ok(), "{path:?}: {c:?}");
    }
}

#[test]
fn curve_csv_seeds() {
    let mut accepted = 0;
    for (_, bytes) in seeds("parse_curve_csv") {
        if let Ok(grid) = CfGrid::from_csv(std::str::from_utf8(&bytes).unwrap()) {
            assert_eq!(CfGrid::from_csv(&grid.to_csv()).unwrap(), grid);
            accepted += 1;
        }
    }
    assert_eq!(accepted, 2);
}

#[test]
fn blueprint_seeds() {
    for (path, bytes) in seeds("parse_blueprint") {
        let bp = Blueprint::from_json(std::str::from_utf8(&bytes).unwrap())
            .unwrap_or_else(|e| panic!("{path:?}: {e}"));
        assert_eq!(bp.eval_unnormalized(0.0), bp.normalizer());
    }
}

#[test]
fn phase_vector_seeds() {
    for (path, bytes) in seeds("parse_phase_vector") {
        let (&n, rest) = bytes.split_first().unwrap();
        let omega = PhaseVector::parse(std::str::from_utf8(rest).unwrap(), n as u32);
        assert!(omega.is_ok(), "{path:?}: {omega:?}");
    }
}
