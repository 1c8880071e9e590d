//! End-to-end checks of the binary: exit codes, report envelopes,
//! determinism and the transform/recover round trip.

use serde_json::Value;
use sgia_core::instances;
use sgia_core::solver::{brute_force_equilibria, EnumerationOptions};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sgia"));
    c.env_remove("SGIA_THREADS");
    c
}

fn fixture(dir: &Path, name: &str, inst: &sgia_core::Instance) -> PathBuf {
    let path = dir.join(name);
    sgia_core::save_instance(&path, inst).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn verified_equilibrium_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "dilemma.json", &instances::repeated_dilemma());
    let out = bin().arg("verify").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["is_ppme"], Value::Bool(true));
    assert_eq!(doc["manifest"]["command"], "verify");
    assert_eq!(doc["manifest"]["config"]["mode"], "direct");
    assert_eq!(doc["manifest"]["input_sha256"].as_str().unwrap().len(), 64);
    assert!(doc["manifest"]["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn broken_action_rows_exit_two_with_a_simplex_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = instances::repeated_dilemma();
    bad.profile.pi[0][0] = 0.6;
    bad.profile.pi[0][1] = 0.6;
    let input = fixture(dir.path(), "bad_sum.json", &bad);
    let out = bin().arg("verify").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_text(&out);
    assert!(err.contains("PI_ROW_SUM"), "{err}");
    assert!(err.contains("FE2"), "{err}");
}

#[test]
fn parse_errors_exit_two_and_carry_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("broken.json");
    std::fs::write(&input, "{ \"schema\": oops").unwrap();
    let out = bin().arg("validate").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_text(&out);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn non_equilibria_exit_three_under_every_mode() {
    let dir = tempfile::tempdir().unwrap();
    // Cooperating everywhere is dominated, so no check should accept it.
    let mut coop = instances::repeated_dilemma();
    for row in coop.profile.pi.iter_mut() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = if k % 2 == 0 { 1.0 } else { 0.0 };
        }
    }
    let input = fixture(dir.path(), "coop.json", &coop);
    for mode in ["direct", "opt", "gfpa", "cross"] {
        let out = bin()
            .args(["verify", "--mode", mode])
            .arg(&input)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(3), "mode {mode}");
    }
}

#[test]
fn enumeration_matches_the_library_count() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instances::repeated_dilemma();
    let input = fixture(dir.path(), "dilemma.json", &inst);
    let out = bin()
        .args(["solve", "--mode", "enumerate"])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let doc = stdout_json(&out);
    let expected = brute_force_equilibria(
        &inst.game,
        &inst.family,
        &inst.scheme,
        &EnumerationOptions::default(),
    )
    .unwrap();
    assert_eq!(doc["report"]["count"].as_u64().unwrap() as usize, expected.len());
    assert!(!expected.is_empty());
    assert_eq!(
        doc["report"]["equilibria"].as_array().unwrap().len(),
        expected.len()
    );
}

#[test]
fn canonical_rewrite_is_a_byte_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "pennies.json", &instances::pennies_signal());
    let rewritten = dir.path().join("rewritten.json");
    let out = bin()
        .arg("validate")
        .arg("--rewrite")
        .arg(&rewritten)
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    assert_eq!(
        std::fs::read(&input).unwrap(),
        std::fs::read(&rewritten).unwrap()
    );
}

#[test]
fn same_seed_reports_are_byte_identical_modulo_wall_clock() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "sgiid.json", &instances::state_guess_iid());
    let run = || {
        let out = bin()
            .args(["simulate", "--episodes", "300", "--seed", "7"])
            .arg(&input)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
        let mut doc = stdout_json(&out);
        doc["manifest"]
            .as_object_mut()
            .unwrap()
            .remove("wall_clock_seconds")
            .unwrap();
        sgia_core::canonical_json(&doc).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn penalty_trace_rows_match_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "dilemma.json", &instances::repeated_dilemma());
    let trace = dir.path().join("trace.csv");
    let out = bin()
        .args(["solve", "--mode", "penalty", "--seed", "3", "--trace"])
        .arg(&trace)
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["converged"], Value::Bool(true));
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,z_gfpa,max_violation,step"));
    let rows = lines.count();
    assert_eq!(rows, doc["report"]["trace"].as_array().unwrap().len());
    assert!(rows >= 1);
}

#[test]
fn stalled_searches_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "markov.json", &instances::state_guess_markov());
    let out = bin()
        .args([
            "solve",
            "--mode",
            "penalty",
            "--seed",
            "10",
            "--restarts",
            "2",
            "--max-iters",
            "40",
        ])
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["converged"], Value::Bool(false));
}

#[test]
fn transform_emits_a_recoverable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "trigger.json", &instances::coordination_trigger());
    let emitted = dir.path().join("trigger_pi.json");
    let out = bin()
        .arg("transform-pi")
        .arg("--emit")
        .arg(&emitted)
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["input_is_ppme"], Value::Bool(true));
    assert_eq!(
        doc["report"]["equivalence"]["within_tolerance"],
        Value::Bool(true)
    );

    let check = bin().arg("validate").arg(&emitted).output().unwrap();
    assert_eq!(check.status.code(), Some(0), "{}", stderr_text(&check));

    let recover = bin()
        .args(["recover-ppme", "--reading", "per-state"])
        .arg(&emitted)
        .output()
        .unwrap();
    assert_eq!(recover.status.code(), Some(0), "{}", stderr_text(&recover));
    let rec = stdout_json(&recover);
    assert_eq!(rec["report"]["converged"], Value::Bool(true));
    assert_eq!(rec["report"]["verification"]["is_ppme"], Value::Bool(true));
}

#[test]
fn evaluate_matches_the_library_values() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instances::coordination_trigger();
    let input = fixture(dir.path(), "trigger.json", &inst);
    let out = bin().arg("evaluate").arg(&input).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    let doc = stdout_json(&out);
    let triple =
        sgia_core::value::evaluate_policy(&inst.game, &inst.family, &inst.scheme, &inst.profile)
            .unwrap();
    for (i, ji) in triple.j.iter().enumerate() {
        for (h, &expected) in ji.iter().enumerate() {
            let got = doc["report"]["values"]["j"][i][h].as_f64().unwrap();
            assert_eq!(got.to_bits(), expected.to_bits(), "j[{i}][{h}]");
        }
    }
    assert!(doc["report"]["worst_bellman_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "dilemma.json", &instances::repeated_dilemma());
    let ok = bin()
        .env("SGIA_THREADS", "1")
        .arg("verify")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", stderr_text(&ok));
    let bad = bin()
        .env("SGIA_THREADS", "zero")
        .arg("verify")
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr_text(&bad).contains("SGIA_THREADS"));
}

#[test]
fn out_flag_writes_the_report_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "dilemma.json", &instances::repeated_dilemma());
    let report = dir.path().join("report.json");
    let out = bin()
        .arg("verify")
        .arg("--out")
        .arg(&report)
        .arg(&input)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_text(&out));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(doc["report"]["is_ppme"], Value::Bool(true));
}
