//! Black-box tests of the `qs` binary: golden outputs, the exit-code
//! contract, JSON output shapes, config-file and environment precedence.

use std::io::Write;
use std::process::Command;

fn qs() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qs"));
    // Keep runs hermetic: the ambient environment must not change depths.
    cmd.env_remove("QS_DEPTH");
    cmd
}

/// Runs the binary and returns (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let out = qs().args(args).output().expect("failed to spawn qs");
    (
        out.status.code().expect("qs was killed by a signal"),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_temp(name: &str, contents: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).expect("create temp file");
    f.write_all(contents.as_bytes()).expect("write temp file");
    (dir, path)
}

// ---------------------------------------------------------------------------
// Golden outputs
// ---------------------------------------------------------------------------

#[test]
fn normalize_golden_fixed_parameter() {
    let (code, stdout, _) = run(&["normalize", "--n", "1", "--q", "1/3", "z0' z0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1 - (1/9) z1 z1'\n");
}

#[test]
fn normalize_golden_symbolic() {
    let (code, stdout, _) = run(&["normalize", "--n", "1", "z0' z0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1 - q^2 z1 z1'\n");
}

#[test]
fn star_golden() {
    let (code, stdout, _) = run(&["star", "--n", "2", "z0 z1"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "z1' z0'\n");

    let (code, stdout, _) = run(&["star", "--basis", "e(2,1,0)"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "e(-2,0,1)\n");
}

#[test]
fn basis_and_filtration_golden() {
    let (code, stdout, _) = run(&["basis", "z1 z0 z1'"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "q e(1,1,1)\n");

    let (code, stdout, _) = run(&["filtration", "e(3,1,2) + e(0,0,1)"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "1\n");

    let (code, stdout, _) = run(&["filtration", "0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "infinity\n");
}

#[test]
fn circle_projection_golden() {
    let (code, stdout, _) = run(&["circle", "--n", "1", "z0 z0 + z1 z1'"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "u^2\n");
}

// ---------------------------------------------------------------------------
// Exit-code contract
// ---------------------------------------------------------------------------

#[test]
fn exit_codes_follow_the_contract() {
    // Mathematical negative verdicts exit 1.
    let (code, stdout, _) = run(&["unitary", "u + u^2"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("not unitary"), "stdout: {stdout}");

    let (code, _, _) = run(&["unitary", "u^-3"]);
    assert_eq!(code, 0);

    // The commutator ideal does not contain circle-visible elements.
    let (code, stdout, _) = run(&["ideal-cert", "--n", "1", "z0"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("not certifiable"), "stdout: {stdout}");

    // Usage errors exit 2.
    let (code, _, stderr) = run(&["normalize", "--frobnicate", "z0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unexpected argument"), "stderr: {stderr}");

    // Domain errors (generator out of range) exit 2.
    let (code, _, stderr) = run(&["normalize", "--n", "1", "z5"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());

    // Parse errors in expressions exit 2.
    let (code, _, _) = run(&["filtration", "e(1,2"]);
    assert_eq!(code, 2);

    // Invalid deformation parameters exit 2.
    let (code, _, stderr) = run(&["normalize", "--n", "1", "--q", "3/2", "z0"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());

    // --help exits 0.
    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn confluence_verdict_exit_codes() {
    // The symbolic system joins every critical pair.
    let (code, stdout, _) = run(&["confluence", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("all joined"), "stdout: {stdout}");

    // At q = 0 the sphere-unit rule genuinely breaks local confluence.
    let (code, stdout, _) = run(&["confluence", "--n", "1", "--q", "0"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("unjoined"), "stdout: {stdout}");
}

// ---------------------------------------------------------------------------
// JSON output
// ---------------------------------------------------------------------------

#[test]
fn normalize_json_shape() {
    let (code, stdout, _) = run(&["normalize", "--n", "1", "--q", "1/3", "--json", "z0' z0"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["input"], "z0' z0");
    assert_eq!(v["text"], "1 - (1/9) z1 z1'");
    assert_eq!(v["normal_form"]["q"], "1/3");
    assert!(v["steps"].as_u64().unwrap() >= 1);
}

#[test]
fn descent_defaults_to_json_and_text_opts_out() {
    let (code, stdout, _) = run(&[
        "descent", "--q", "1/3", "--qprime", "1/2", "--case", "A", "--y", "e(0,1,0)",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["outcome"], "zero-certificate");
    assert_eq!(v["case"], "alpha");
    assert_eq!(v["depth"], 4);
    assert_eq!(v["fully_annihilated"], true);
    assert_eq!(v["steps"][0]["conditions"][0]["factor"], "1/6");

    let (code, stdout, _) = run(&[
        "descent", "--q", "1/3", "--qprime", "1/2", "--case", "A", "--y", "e(0,1,0)", "--text",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("zero certificate"), "stdout: {stdout}");

    // A parameter collision stalls the descent: verdict exit 1.
    let (code, stdout, _) = run(&[
        "descent", "--q", "1/2", "--qprime", "1/2", "--case", "alpha", "--y", "e(0,1,0)",
    ]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["outcome"], "stalled");
    assert_eq!(v["stalled_at"]["m"], 1);
}

#[test]
fn unitary_json_shape() {
    let (code, stdout, _) = run(&["unitary", "--json", "(3/5 + (4/5)i) u^-2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["unitary"], true);
    assert_eq!(v["exponent"], -2);
    assert_eq!(v["lambda"], "3/5+(4/5)i");
}

// ---------------------------------------------------------------------------
// Homomorphism specs and the obstruction pipeline
// ---------------------------------------------------------------------------

const IDENTITY_SPEC: &str = r#"{
  "source": { "n": 1, "q": "1/2" },
  "target": "suq2",
  "target_q": "1/2",
  "images": { "z0": "e(1,0,0)", "z1": "e(0,1,0)" }
}"#;

const NAIVE_SPEC: &str = r#"{
  "source": { "n": 1, "q": "1/3" },
  "target": "suq2",
  "target_q": "1/2",
  "images": { "z0": "e(1,0,0)", "z1": "e(0,1,0)" }
}"#;

const CANDIDATE_SPEC_N2: &str = r#"{
  "source": { "n": 2, "q": "1/3" },
  "target": "suq2",
  "target_q": "1/2",
  "images": {
    "z0": "e(1,0,0) + e(0,1,1)",
    "z1": "e(0,1,0) + e(2,1,1)",
    "z2": "e(-1,2,0) + e(1,1,2)"
  }
}"#;

#[test]
fn check_hom_accepts_and_rejects() {
    let (_dir, path) = write_temp("identity.json", IDENTITY_SPEC);
    let (code, stdout, _) = run(&["check-hom", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("holds"), "stdout: {stdout}");

    let (_dir, path) = write_temp("naive.json", NAIVE_SPEC);
    let (code, stdout, _) = run(&["check-hom", "--spec", path.to_str().unwrap(), "--json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["holds"], false);
    let violations = v["violations"].as_array().unwrap();
    let star0 = violations
        .iter()
        .find(|w| w["relation"] == "star-exchange(0)")
        .expect("star-exchange(0) violated");
    assert_eq!(star0["residue"], "-(5/36) e(0,1,1)");
}

#[test]
fn check_hom_rejects_malformed_specs() {
    // Missing generator image.
    let (_dir, path) = write_temp(
        "missing.json",
        r#"{ "source": { "n": 1, "q": "1/2" }, "target": "suq2",
             "target_q": "1/2", "images": { "z0": "e(1,0,0)" } }"#,
    );
    let (code, _, stderr) = run(&["check-hom", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("z1"), "stderr: {stderr}");

    // Missing file.
    let (code, _, _) = run(&["check-hom", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(code, 2);
}

#[test]
fn obstruct_reports_every_stage() {
    // Identity-type map: relations hold but the parameters collide.
    let (_dir, path) = write_temp("identity.json", IDENTITY_SPEC);
    let (code, stdout, _) = run(&["obstruct", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["hom"]["holds"], true);
    assert_eq!(v["power"], 1);
    assert_eq!(v["decomposition"]["form"], "shift");
    assert_eq!(v["conclusion"]["kind"], "power-relation");
    assert_eq!(v["obstructed"], false);
    // Stage 4 still ran and recorded the stall.
    assert_eq!(v["descents"][0]["descent"]["outcome"], "stalled");

    // Parameter-mismatched map: first failure is the relation check, yet
    // the later stages are still reported.
    let (_dir, path) = write_temp("naive.json", NAIVE_SPEC);
    let (code, stdout, _) = run(&["obstruct", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["hom"]["holds"], false);
    assert_eq!(v["conclusion"]["kind"], "not-a-homomorphism");
    assert!(v["power"].is_null());
    assert_eq!(v["descents"][0]["descent"]["outcome"], "zero-certificate");
    assert_eq!(v["descents"][0]["descent"]["fully_annihilated"], true);
}

#[test]
fn obstruct_forces_higher_generator_images_to_zero() {
    let (_dir, path) = write_temp("candidate.json", CANDIDATE_SPEC_N2);
    let (code, stdout, _) = run(&["obstruct", "--spec", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["decomposition"]["form"], "shift");
    assert_eq!(v["decomposition"]["case"], "alpha");
    assert_eq!(v["decomposition"]["lambda"], "1");
    let descents = v["descents"].as_array().unwrap();
    assert_eq!(descents.len(), 2);
    for d in descents {
        assert_eq!(d["kind"], "descent");
        assert_eq!(d["descent"]["outcome"], "zero-certificate");
        assert_eq!(d["descent"]["fully_annihilated"], true);
    }
}

// ---------------------------------------------------------------------------
// Verification suites from the command line
// ---------------------------------------------------------------------------

#[test]
fn verify_lemmas_single_suite_and_skip() {
    let (code, stdout, _) = run(&["verify-lemmas", "--suite", "alpha-products"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("PASS alpha-products"), "stdout: {stdout}");

    // Unsupported parameter: the suite is skipped, not failed.
    let (code, stdout, _) = run(&["verify-lemmas", "--q", "0", "--suite", "basis"]);
    assert_eq!(code, 0);
    assert!(
        stdout.contains("SKIPPED basis: q = 0 unsupported for basis"),
        "stdout: {stdout}"
    );

    // Unknown suite names are usage errors.
    let (code, _, stderr) = run(&["verify-lemmas", "--suite", "nonsense"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown suite"), "stderr: {stderr}");
}

#[test]
fn verify_lemmas_seed_does_not_change_verdicts() {
    for seed in ["1", "2"] {
        let (code, stdout, _) =
            run(&["verify-lemmas", "--suite", "circle-unitaries", "--seed", seed]);
        assert_eq!(code, 0, "seed {seed}: {stdout}");
        assert!(stdout.starts_with("PASS circle-unitaries"), "stdout: {stdout}");
    }
}

#[test]
fn verify_lemmas_json_shape() {
    let (code, stdout, _) = run(&["verify-lemmas", "--json", "--suite", "relations", "--n", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["reports"][0]["suite"], "relations");
    assert_eq!(v["reports"][0]["verdict"], "pass");
}

// ---------------------------------------------------------------------------
// Configuration precedence
// ---------------------------------------------------------------------------

#[test]
fn config_file_applies_and_flags_override() {
    let (_dir, path) = write_temp("cfg.json", r#"{ "n": 2, "q": "1/4", "output": "json" }"#);
    let cfg = path.to_str().unwrap();

    let (code, stdout, _) = run(&["normalize", "--config", cfg, "z1 z0"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["normal_form"]["n"], 2);
    assert_eq!(v["normal_form"]["q"], "1/4");

    // A flag beats the config file.
    let (code, stdout, _) = run(&["normalize", "--config", cfg, "--q", "1/2", "z1 z0"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(v["normal_form"]["q"], "1/2");
    assert_eq!(v["text"], "(1/2) z0 z1");

    // Unknown config keys are rejected.
    let (_dir2, bad) = write_temp("bad.json", r#"{ "bogus": 1 }"#);
    let (code, _, stderr) = run(&["normalize", "--config", bad.to_str().unwrap(), "z0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bogus"), "stderr: {stderr}");
}

#[test]
fn depth_env_sets_default_and_flag_wins() {
    let args = [
        "descent", "--q", "1/3", "--qprime", "1/2", "--case", "A", "--y", "e(0,1,0)",
    ];

    let out = qs().env("QS_DEPTH", "2").args(args).output().expect("spawn qs");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).expect("valid JSON");
    assert_eq!(v["depth"], 2);

    let out = qs()
        .env("QS_DEPTH", "2")
        .args(args)
        .arg("--depth")
        .arg("3")
        .output()
        .expect("spawn qs");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).expect("valid JSON");
    assert_eq!(v["depth"], 3);

    let out = qs().env("QS_DEPTH", "zero").args(args).output().expect("spawn qs");
    assert_eq!(out.status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// DTO round-trips (in-process)
// ---------------------------------------------------------------------------

#[test]
fn dto_round_trips_preserve_values() {
    use qsphere_cli::json::{BasisDto, LaurentDto, PolyDto};
    use qsphere_core::coeffq::{rat, QMode};
    use qsphere_core::parser::{parse_poly, ExprContext};
    use qsphere_core::quotients::LaurentPoly;
    use qsphere_core::suq2::BasisVector;

    let qm = QMode::Fixed(rat(1, 3));

    let ctx = ExprContext::new(2, true);
    let p = parse_poly("(1/2 + (2/7)i) z0 z1' z2 - 3 z1", &ctx).unwrap();
    let dto = PolyDto::from_core(&p, &qm);
    let text = serde_json::to_string(&dto).unwrap();
    let back: PolyDto = serde_json::from_str(&text).unwrap();
    let (p2, _) = back.to_core().unwrap();
    assert_eq!(p, p2);

    let v = BasisVector::parse("e(-2,1,3) - (5/9) e(0,0,1)", qm.clone(), true).unwrap();
    let dto = BasisDto::from_core(&v);
    let text = serde_json::to_string(&dto).unwrap();
    let back: BasisDto = serde_json::from_str(&text).unwrap();
    let v2 = back.to_core().unwrap();
    assert_eq!(v.to_poly(), v2.to_poly());

    let a = LaurentPoly::parse("u^-2 + (3/5 + (4/5)i) - 2 u^4", true).unwrap();
    let dto = LaurentDto::from_core(&a);
    let text = serde_json::to_string(&dto).unwrap();
    let back: LaurentDto = serde_json::from_str(&text).unwrap();
    assert_eq!(a, back.to_core().unwrap());
}

#[test]
fn poly_dto_rejects_out_of_range_letters() {
    use qsphere_cli::json::PolyDto;

    let raw = r#"{ "n": 1, "q": "symbolic",
                   "terms": [ { "coeff": "1", "word": [[4, false]] } ] }"#;
    let dto: PolyDto = serde_json::from_str(raw).unwrap();
    assert!(dto.to_core().is_err());
}
