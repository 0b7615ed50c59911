use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cnroots(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cnroots"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("CNROOTS_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("config.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_reports_components_and_rho() {
    let dir = TempDir::new().unwrap();
    let o = cnroots(dir.path(), &["validate", &config("single_pair.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "comp=3 rho=1");
}

#[test]
fn validate_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let overlapping = write_config(
        &dir,
        "{\n  \"b0\": 1,\n  \"positives\": [[2, 4], [3, 5]]\n}",
    );
    let o = cnroots(dir.path(), &["validate", &overlapping]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let missing = write_config(&dir, "{\"positives\": []}");
    assert_eq!(
        cnroots(dir.path(), &["validate", &missing]).status.code(),
        Some(2)
    );

    let nowhere = dir.path().join("absent.json");
    let o = cnroots(dir.path(), &["validate", nowhere.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn family_manifest_has_nine_members() {
    let dir = TempDir::new().unwrap();
    let cfg = config("two_components.json");
    assert_eq!(cnroots(dir.path(), &["build", &cfg]).status.code(), Some(0));
    let o = cnroots(dir.path(), &["family", &cfg, "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["members"].as_array().unwrap().len(), 9);
    assert_eq!(m["certificate"]["all_distinct"], true);
    let bp = fs::read_to_string(dir.path().join("blueprint.json")).unwrap();
    assert!(cnroots::construct::Blueprint::from_json(&bp).is_ok());
}

#[test]
fn family_respects_the_enumeration_cap() {
    let dir = TempDir::new().unwrap();
    let o = cnroots(
        dir.path(),
        &["family", &config("two_components.json"), "--cap", "5"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_for_every_member() {
    let dir = TempDir::new().unwrap();
    let o = cnroots(dir.path(), &["verify", &config("two_components.json")]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r["all_passed"], true);
    // kernel + 5 checks for each of the 9 members
    assert_eq!(r["checks"].as_array().unwrap().len(), 46);
}

#[test]
fn verify_exit_code_follows_the_checks() {
    let dir = TempDir::new().unwrap();
    let cfg = config("single_pair.json");
    let o = cnroots(dir.path(), &["verify", &cfg, "--omega", "1"]);
    assert_eq!(o.status.code(), Some(0));
    // a zero floor as large as max|g| cannot separate support from gaps
    let o = cnroots(
        dir.path(),
        &["verify", &cfg, "--omega", "1", "--tol", "zero_rel=1"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("w1/support"));
    let o = cnroots(dir.path(), &["verify", &cfg, "--omega", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wrong_order_breaks_the_power_identity() {
    let dir = TempDir::new().unwrap();
    let cfg = config("single_pair.json");
    assert_eq!(
        cnroots(dir.path(), &["density", &cfg, "--omega", "1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        cnroots(dir.path(), &["density", &cfg]).status.code(),
        Some(0)
    );
    let f = dir.path().join("cf_w0.csv");
    let g = dir.path().join("cf_w1.csv");
    let o = cnroots(
        dir.path(),
        &[
            "phase",
            &cfg,
            "--f",
            f.to_str().unwrap(),
            "--g",
            g.to_str().unwrap(),
            "--n",
            "4",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn phase_roundtrip_recovers_omega() {
    let dir = TempDir::new().unwrap();
    let cfg = config("two_components.json");
    assert_eq!(
        cnroots(dir.path(), &["density", &cfg]).status.code(),
        Some(0)
    );
    assert_eq!(
        cnroots(dir.path(), &["density", &cfg, "--omega", "1,2"])
            .status
            .code(),
        Some(0)
    );
    let f = dir.path().join("cf_w0-0.csv");
    let g = dir.path().join("cf_w1-2.csv");
    let o = cnroots(
        dir.path(),
        &[
            "phase",
            &cfg,
            "--f",
            f.to_str().unwrap(),
            "--g",
            g.to_str().unwrap(),
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("roots=(1,2)"));
    let p: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("profile.json")).unwrap())
            .unwrap();
    assert_eq!(p["roots"], serde_json::json!([1, 2]));
    let lambda1 = &p["components"][3]["lambda"];
    let (re, im) = (lambda1[0].as_f64().unwrap(), lambda1[1].as_f64().unwrap());
    let angle = 2.0 * std::f64::consts::PI / 3.0;
    assert!((re - angle.cos()).abs() < 1e-10 && (im - angle.sin()).abs() < 1e-10);
}

#[test]
fn explore_on_the_triangle_is_trivial() {
    let dir = TempDir::new().unwrap();
    let cfg = config("triangle.json");
    assert_eq!(
        cnroots(dir.path(), &["density", &cfg]).status.code(),
        Some(0)
    );
    let f = dir.path().join("cf_w.csv");
    let o = cnroots(dir.path(), &["explore", &cfg, "--f", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("candidates=1 passing=1"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let cfg = config("single_pair.json");
    for dir in [&a, &b] {
        for args in [
            vec!["build", &cfg],
            vec!["family", &cfg],
            vec!["density", &cfg, "--omega", "2"],
            vec!["sample", &cfg, "--omega", "2", "--count", "500"],
            vec!["classic", "--max-harmonic", "21"],
        ] {
            assert_eq!(
                cnroots(dir.path(), &args).status.code(),
                Some(0),
                "{args:?}"
            );
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
    }
    let samples = fs::read_to_string(a.path().join("samples_w2.csv")).unwrap();
    assert!(samples.starts_with("# seed=7 count=500 n=3 omega=2\nt\n"));
    assert_eq!(samples.lines().count(), 502);
}

#[test]
fn output_directory_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cnroots"))
        .args(["classic", "--max-harmonic", "3"])
        .env("CNROOTS_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("classic_curves.csv").exists());
    let atoms = fs::read_to_string(dir.path().join("classic_atoms_f.csv")).unwrap();
    assert_eq!(atoms.lines().next(), Some("location,weight"));
    assert_eq!(atoms.lines().count(), 1 + 5);
}
