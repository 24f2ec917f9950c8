//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line with the measured margins. Criteria 1 through 8 are the
//! library's built-in checks (the same ones `spectra-forge verify` runs);
//! criterion 9 drives the compiled binary end to end.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use spectra_forge::suite::{self, CriterionResult};

fn report(r: &CriterionResult) {
    let status = if r.passed { "PASS" } else { "FAIL" };
    println!("{status} criterion {} {}: {}", r.id, r.name, r.detail);
    assert!(
        r.passed,
        "criterion {} ({}) failed: {}",
        r.id, r.name, r.detail
    );
}

#[test]
fn acceptance_1_oscillator_baseline() {
    report(&suite::criterion_1());
}

#[test]
fn acceptance_2_first_order_shifted_ladder() {
    report(&suite::criterion_2());
}

#[test]
fn acceptance_3_error_function_branch() {
    report(&suite::criterion_3());
}

#[test]
fn acceptance_4_second_order_placement() {
    report(&suite::criterion_4());
}

#[test]
fn acceptance_5_scaled_first_family() {
    report(&suite::criterion_5());
}

#[test]
fn acceptance_6_scaled_second_family() {
    report(&suite::criterion_6());
}

#[test]
fn acceptance_7_scaled_second_locked() {
    report(&suite::criterion_7());
}

#[test]
fn acceptance_8_property_suites() {
    report(&suite::criterion_8());
}

/// The CLI must aggregate criteria 1..8 under `verify` (exit 0) and produce
/// byte-identical CSV from two identical `generate` invocations.
#[test]
fn acceptance_9_cli_round_trip() {
    use std::process::Command;

    let bin = env!("CARGO_BIN_EXE_spectra-forge");
    let dir = tempfile::tempdir().expect("tempdir");

    let verify = Command::new(bin)
        .arg("verify")
        .current_dir(dir.path())
        .output()
        .expect("spawn verify");
    let verify_ok = verify.status.code() == Some(0);

    let gen = |name: &str| {
        let out = Command::new(bin)
            .args([
                "generate",
                "--kind",
                "scaled-first",
                "--eps1",
                "-0.25",
                "--nu1",
                "0",
                "--q1",
                "0.70710678118654752",
                "--out",
                name,
            ])
            .current_dir(dir.path())
            .output()
            .expect("spawn generate");
        assert_eq!(
            out.status.code(),
            Some(0),
            "generate failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read(dir.path().join(name)).expect("csv written")
    };
    let a = gen("a.csv");
    let b = gen("b.csv");
    let identical = a == b;

    let passed = verify_ok && identical;
    let status = if passed { "PASS" } else { "FAIL" };
    println!(
        "{status} criterion 9 cli_round_trip: verify_exit={:?} csv_bytes_identical={identical} ({} bytes)",
        verify.status.code(),
        a.len()
    );
    if !verify_ok {
        println!(
            "verify stdout:\n{}",
            String::from_utf8_lossy(&verify.stdout)
        );
        println!(
            "verify stderr:\n{}",
            String::from_utf8_lossy(&verify.stderr)
        );
    }
    assert!(passed, "criterion 9 failed");
}
