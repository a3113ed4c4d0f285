//! End-to-end tests of the binary: exit codes, report files, determinism
//! across worker counts, and the deliberately failing fixture.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cylproc"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn out_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn list_experiments_names_all_kinds() {
    let out = bin().arg("list-experiments").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in [
        "tail_compare",
        "mean_check",
        "capacity_check",
        "bound_curves",
        "scaling_probe",
        "coeff_dump",
    ] {
        assert!(text.contains(kind), "missing {kind}");
    }
}

#[test]
fn validate_accepts_all_fixtures() {
    for name in [
        "reference_tail.json",
        "mean_check.json",
        "surface_check.json",
        "capacity_check.json",
        "bound_curves.json",
        "scaling_probe.json",
        "coeff_dump.json",
        "failing_probe.json",
    ] {
        let out = bin().arg("validate").arg(fixture(name)).output().unwrap();
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn validate_rejects_bad_k_with_diagnostic() {
    let out = bin()
        .arg("validate")
        .arg(fixture("invalid_k.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0 ≤ k ≤ d−1"), "{err}");
}

#[test]
fn mean_check_passes_and_writes_reports() {
    let dir = out_dir("mean_check");
    let out = bin()
        .arg("run")
        .arg(fixture("mean_check.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], serde_json::Value::Bool(true));
    assert_eq!(summary["experiment"], "mean_check");
    // Every reported statistic is provenance-labelled.
    let mean = &summary["statistics"]["replicate_mean"];
    assert_eq!(mean["provenance"], "empirical");
    assert!(mean["se"].as_f64().unwrap() > 0.0);
    assert_eq!(
        summary["constants"]["mean_volume"]["provenance"],
        "closed_form:volume_fraction"
    );
    let csv = std::fs::read_to_string(dir.join("curves.csv")).unwrap();
    assert!(csv.starts_with("replicate,value\n"));
    assert_eq!(csv.lines().count(), 301);
}

#[test]
fn tail_compare_emits_svg_and_dominating_bounds() {
    let dir = out_dir("tail_compare");
    let out = bin()
        .arg("run")
        .arg(fixture("reference_tail.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = std::fs::read_to_string(dir.join("curves.csv")).unwrap();
    assert!(csv.starts_with(
        "r,emp_upper,wilson_upper,emp_lower,wilson_lower,log_bound_upper,log_bound_lower,log_poisson_reference\n"
    ));
    let svg = std::fs::read_to_string(dir.join("curves.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("poisson reference"));
}

#[test]
fn bound_curves_include_kflat_and_reference_paths() {
    let dir = out_dir("bound_curves");
    let out = bin()
        .arg("run")
        .arg(fixture("bound_curves.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("curves.csv")).unwrap();
    assert!(csv.starts_with("r,log_upper,log_lower,path,se\n"));
    assert!(csv.contains("closed_form:rotated_base"));
    assert!(csv.contains("reference:poisson_tail"));
    assert!(csv.contains("closed_form:kflat"));
}

#[test]
fn scaling_probe_passes_and_failing_fixture_fails() {
    let dir = out_dir("scaling_probe");
    let out = bin()
        .arg("run")
        .arg(fixture("scaling_probe.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    // Same probe, absurd tolerance: exit code 1 and pass=false in the report.
    let dir = out_dir("failing_probe");
    let out = bin()
        .arg("run")
        .arg(fixture("failing_probe.json"))
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], serde_json::Value::Bool(false));
}

#[test]
fn capacity_check_and_coeff_dump_pass() {
    for name in [
        "capacity_check.json",
        "coeff_dump.json",
        "surface_check.json",
    ] {
        let dir = out_dir(name.trim_end_matches(".json"));
        let out = bin()
            .arg("run")
            .arg(fixture(name))
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let dir1 = out_dir("threads1");
    let dir4 = out_dir("threads4");
    for (dir, threads) in [(&dir1, "1"), (&dir4, "4")] {
        let out = bin()
            .arg("run")
            .arg(fixture("reference_tail.json"))
            .arg("--threads")
            .arg(threads)
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let csv1 = std::fs::read(dir1.join("curves.csv")).unwrap();
    let csv4 = std::fs::read(dir4.join("curves.csv")).unwrap();
    assert_eq!(csv1, csv4, "curves.csv differs across worker counts");
    let s1 = std::fs::read(dir1.join("summary.json")).unwrap();
    let s4 = std::fs::read(dir4.join("summary.json")).unwrap();
    assert_eq!(s1, s4, "summary.json differs across worker counts");
}

#[test]
fn seed_override_changes_statistics() {
    let dir_a = out_dir("seed_a");
    let dir_b = out_dir("seed_b");
    for (dir, seed) in [(&dir_a, "42"), (&dir_b, "43")] {
        let out = bin()
            .arg("run")
            .arg(fixture("mean_check.json"))
            .arg("--seed")
            .arg(seed)
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read(dir_a.join("curves.csv")).unwrap();
    let b = std::fs::read(dir_b.join("curves.csv")).unwrap();
    assert_ne!(a, b);
}
