//! End-to-end tests of the `ekelab` binary: exit codes, file outputs, and
//! the run -> attack round trip.

use std::path::Path;
use std::process::{Command, Output};

fn ekelab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ekelab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn nokey_worked_fixture_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = ekelab(
        &[
            "run", "--variant", "nokey", "--q", "23", "--g", "5", "--key", "9", "--a", "5",
            "--b", "7", "--seed", "1", "--out", "fx",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("keys match"));
    let transcript = std::fs::read_to_string(dir.path().join("fx/transcript.jsonl")).unwrap();
    assert_eq!(
        transcript,
        "{\"seq\":0,\"dir\":\"AB\",\"tag\":1,\"payload_hex\":\"014108\"}\n\
         {\"seq\":1,\"dir\":\"BA\",\"tag\":2,\"payload_hex\":\"0c\"}\n\
         {\"seq\":2,\"dir\":\"AB\",\"tag\":3,\"payload_hex\":\"04\"}\n",
        "wire carries 8, 12, 4"
    );
    let outcome: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fx/outcome.json")).unwrap())
            .unwrap();
    assert_eq!(outcome["responder"]["exchange_key"], "9");
}

#[test]
fn identical_seeds_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["r1", "r2"] {
        let out = ekelab(
            &[
                "run", "--variant", "dh-eke", "--bits", "18", "--password-bits", "10", "--seed",
                "42", "--out", sub,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
    }
    let t1 = std::fs::read(dir.path().join("r1/transcript.jsonl")).unwrap();
    let t2 = std::fs::read(dir.path().join("r2/transcript.jsonl")).unwrap();
    assert_eq!(t1, t2);
    let o1 = std::fs::read(dir.path().join("r1/outcome.json")).unwrap();
    let o2 = std::fs::read(dir.path().join("r2/outcome.json")).unwrap();
    assert_eq!(o1, o2);
}

#[test]
fn run_attack_round_trip_recovers_password() {
    let dir = tempfile::tempdir().unwrap();
    let out = ekelab(
        &[
            "run", "--variant", "dh-eke", "--encrypt-first-flow", "--bits", "18",
            "--password-bits", "10", "--seed", "9", "--out", "cap",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let out = ekelab(
        &[
            "attack", "--transcript", "cap/transcript.jsonl", "--space-bits", "10", "--expect",
            "recover", "--seed", "9", "--workers", "3", "--out", "cap",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("dlogs=1024 guesses=1024 per_guess=1"), "{text}");
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("cap/attack_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["recovered_count"], 1);
    assert_eq!(report["variant"], "dh-eke");
    assert_eq!(report.as_object().unwrap().len(), 7, "pinned field set");
}

#[test]
fn simplified_attack_keeps_the_full_space() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ekelab(
            &[
                "run", "--variant", "simplified-eke", "--bits", "16", "--password-bits", "8",
                "--seed", "3", "--out", "s",
            ],
            dir.path(),
        )),
        0
    );
    let out = ekelab(
        &[
            "attack", "--transcript", "s/transcript.jsonl", "--space-bits", "8", "--expect",
            "full-space", "--seed", "3", "--out", "s",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("every candidate survives"));
}

#[test]
fn failed_expectation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ekelab(
            &[
                "run", "--variant", "dh-eke", "--bits", "16", "--password-bits", "8", "--seed",
                "5", "--out", "x",
            ],
            dir.path(),
        )),
        0
    );
    let out = ekelab(
        &[
            "attack", "--transcript", "x/transcript.jsonl", "--space-bits", "8", "--expect",
            "no-recover", "--seed", "5", "--out", "x",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 4, "{out:?}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // unknown variant
    let out = ekelab(
        &["run", "--variant", "bogus", "--bits", "16", "--seed", "1"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    // no seed
    let out = ekelab(
        &["run", "--variant", "nokey", "--bits", "16"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    // oversized exhaustive space
    assert_eq!(
        code(&ekelab(
            &[
                "run", "--variant", "dh-eke", "--bits", "16", "--password-bits", "8", "--seed",
                "5", "--out", "g",
            ],
            dir.path(),
        )),
        0
    );
    let out = ekelab(
        &[
            "attack", "--transcript", "g/transcript.jsonl", "--space-bits", "30", "--seed", "5",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2, "{out:?}");
    // no passive attack for the plain no-key protocol
    assert_eq!(
        code(&ekelab(
            &["run", "--variant", "nokey", "--bits", "16", "--seed", "6", "--out", "nk"],
            dir.path(),
        )),
        0
    );
    let out = ekelab(
        &[
            "attack", "--transcript", "nk/transcript.jsonl", "--space-bits", "8", "--seed", "6",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2, "{out:?}");
}

#[test]
fn protocol_abort_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // exponent 2 is not a unit mod 22
    let out = ekelab(
        &[
            "run", "--variant", "nokey", "--q", "23", "--g", "5", "--a", "2", "--seed", "1",
            "--out", "ab",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{out:?}");
}

#[test]
fn mitm_outcomes_and_expectations() {
    let dir = tempfile::tempdir().unwrap();
    let out = ekelab(
        &["mitm", "--variant", "nokey", "--bits", "16", "--seed", "2", "--out", "m1"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("success=true"));
    let out = ekelab(
        &[
            "mitm", "--variant", "enc-nokey", "--bits", "16", "--password-bits", "8", "--seed",
            "2", "--out", "m2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("success=false"));
    let out = ekelab(
        &[
            "mitm", "--variant", "enc-nokey", "--bits", "16", "--password-bits", "8", "--seed",
            "2", "--give-eve-password", "--out", "m3",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("success=true"));
    // mitm only targets the no-key protocols
    let out = ekelab(
        &["mitm", "--variant", "dh-eke", "--bits", "16", "--seed", "2"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn margin_check_paper_passes_and_bogus_profile_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = ekelab(
        &[
            "margin", "--profile", "ion-trap", "--computers", "2", "--check-paper", "--out", "mg",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("required password bits      40"), "{text}");
    assert!(text.contains("ok: earth-surface fleet"));
    assert!(dir.path().join("mg/margin_report.json").exists());

    let out = ekelab(&["margin", "--profile", "warp-core"], dir.path());
    assert_eq!(code(&out), 2);

    // universal profile lands on 68 bits for two machines
    let out = ekelab(
        &["margin", "--profile", "universal", "--computers", "2", "--out", "mg2"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("required password bits      68"));
}

#[test]
fn config_file_drives_a_scenario_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "seed": 77,
        "out": "from-config",
        "variant": "enc-nokey",
        "group": {"bits": 16, "seed": 4},
        "password": {"bits": 8},
        "attack": {"space_bits": 8, "expect": "recover"},
    });
    std::fs::write(
        dir.path().join("scenario.json"),
        serde_json::to_string_pretty(&config).unwrap(),
    )
    .unwrap();
    let out = ekelab(&["run", "--config", "scenario.json"], dir.path());
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(dir.path().join("from-config/transcript.jsonl").exists());
    let out = ekelab(
        &[
            "attack", "--config", "scenario.json", "--transcript",
            "from-config/transcript.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("expectation held"));
    // a flag overrides the config's output directory
    let out = ekelab(
        &["run", "--config", "scenario.json", "--out", "flag-wins"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("flag-wins/transcript.jsonl").exists());
}

#[test]
fn enhanced_attack_via_cli_reports_stages() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ekelab(
            &[
                "run", "--variant", "enhanced-eke", "--bits", "18", "--password-bits", "8",
                "--seed", "21", "--out", "en",
            ],
            dir.path(),
        )),
        0
    );
    let out = ekelab(
        &[
            "attack", "--transcript", "en/transcript.jsonl", "--space-bits", "8",
            "--key-space-bits", "9", "--expect", "recover", "--seed", "21", "--out", "en",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("dlogs=0"), "stage 1 line: {text}");
    assert!(text.contains("dlogs=256 guesses=256 per_guess=1"), "{text}");
}

#[test]
fn dictionary_attack_works() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&ekelab(
            &[
                "run", "--variant", "dh-eke", "--bits", "16", "--password", "opensesame",
                "--seed", "8", "--out", "d",
            ],
            dir.path(),
        )),
        0
    );
    std::fs::write(dir.path().join("words.txt"), "letmein\nopensesame\nhunter2\n").unwrap();
    let out = ekelab(
        &[
            "attack", "--transcript", "d/transcript.jsonl", "--dictionary", "words.txt",
            "--expect", "recover", "--seed", "8", "--out", "d",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{out:?}");
    assert!(stdout(&out).contains("guesses=3"));
}
