//! Black-box tests for the command-line interface: golden outputs on the
//! bundled example systems, byte-for-byte determinism, and the exit-code
//! contract (0 success, 1 domain error, 2 usage error, 3 verification
//! mismatch).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../systems")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-ifs"))
        .args(args)
        .output()
        .expect("binary should launch")
}

fn run_on(command: &str, file: &str, extra: &[&str]) -> Output {
    let path = fixture(file);
    let mut args = vec![command, path.to_str().expect("utf-8 path")];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

#[test]
fn analyze_is_deterministic_and_matches_golden_values() {
    let first = run_on("analyze", "negative-scale.json", &[]);
    let second = run_on("analyze", "negative-scale.json", &[]);
    assert_eq!(first.stdout, second.stdout, "repeat runs are byte-identical");
    let text = stdout(&first);
    for line in [
        "transducer states: 6",
        "nfa states: 12",
        "minimal dfa states: 10",
        "essential classes: 1 (unique)",
        "spectral radius: 1.618034",
        "dimension: 0.298994",
        "full dimension: no",
    ] {
        assert!(text.contains(line), "missing {line:?} in:\n{text}");
    }
}

#[test]
fn analyze_reports_per_class_dimensions_for_automaton_input() {
    let text = stdout(&run_on("analyze", "branching-paths.automaton.json", &[]));
    for line in [
        "automaton states: 3",
        "essential classes: 2",
        "essential class dimensions: 0.430677, 0.430677",
        "spectral radius: 3.000000",
        "dimension: 0.682606",
    ] {
        assert!(text.contains(line), "missing {line:?} in:\n{text}");
    }
}

#[test]
fn analyze_verify_checks_prefixes_against_enumeration() {
    let text = stdout(&run_on(
        "analyze",
        "third-offset-pair.json",
        &["--verify", "--depth", "5"],
    ));
    assert!(
        text.contains("verify: prefixes match enumeration to depth 5 (32 prefixes)"),
        "unexpected verify line:\n{text}"
    );
}

#[test]
fn analyze_json_is_one_sorted_object() {
    let text = stdout(&run_on("analyze", "cantor.json", &["--json"]));
    assert_eq!(text.lines().count(), 1, "one line of JSON");
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");
    let dim = value["dimension"].as_f64().expect("dimension field");
    assert!((dim - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert_eq!(value["minimal_states"], serde_json::json!(1));
    assert_eq!(value["essential_classes"], serde_json::json!(1));
    assert_eq!(value["full_dimension"], serde_json::json!(false));
}

#[test]
fn analyze_writes_dot_files() {
    let dir = std::env::temp_dir().join(format!("padic-ifs-dot-{}", std::process::id()));
    let output = run_on(
        "analyze",
        "negative-scale.json",
        &["--dot", dir.to_str().expect("utf-8 path")],
    );
    stdout(&output);
    for name in ["transducer.dot", "nfa.dot", "dfa.dot", "minimal.dot"] {
        let text = std::fs::read_to_string(dir.join(name)).expect(name);
        assert!(text.starts_with("digraph"), "{name} is a dot graph");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn decimate_reports_strided_dimensions() {
    let even = stdout(&run_on("decimate", "even-digits.json", &["--k", "2", "--j", "0"]));
    assert!(even.contains("decimation k=2 j=0: states 1, dimension 0.000000"), "{even}");
    let odd = stdout(&run_on("decimate", "even-digits.json", &["--k", "2", "--j", "1"]));
    assert!(odd.contains("decimation k=2 j=1: states 1, dimension 0.630930"), "{odd}");

    let profile = stdout(&run_on("decimate", "even-digits.json", &["--profile", "2", "1"]));
    for line in ["plateau value:", "coprime cycles (class 0): no", " k\\j"] {
        assert!(profile.contains(line), "missing {line:?} in:\n{profile}");
    }
}

#[test]
fn measure_golden_outputs() {
    let mass = stdout(&run_on("measure", "cantor.json", &["--cylinder", "0,0"]));
    assert!(mass.contains("cylinder 0,0: mass = 1/4 (0.250000)"), "{mass}");

    let local = stdout(&run_on(
        "measure",
        "overlap-three.json",
        &["--localdim", "-1/8"],
    ));
    assert!(
        local.contains("local dimension: exact 0.684535"),
        "unexpected local dimension:\n{local}"
    );

    let spectrum = stdout(&run_on("measure", "overlap-three.json", &["--spectrum", "4"]));
    assert!(
        spectrum.contains("I = 0.666667, S = 1.000000"),
        "unexpected spectrum bounds:\n{spectrum}"
    );
}

#[test]
fn normalize_reports_the_conjugated_system() {
    let text = stdout(&run_on("normalize", "shifted-pair.json", &[]));
    for line in [
        "input: p = 5, {A: 5x+1/2, B: 5x+1/3}",
        "normalized: p = 5, {A: 5x+1, B: 5x}",
        "witness: a = 1/12, c = 6",
    ] {
        assert!(text.contains(line), "missing {line:?} in:\n{text}");
    }
}

#[test]
fn oracle_lists_prefixes_in_order() {
    let text = stdout(&run_on("oracle", "cantor.json", &["--depth", "2"]));
    assert_eq!(text, "depth 2: 4 prefixes\n0,0\n0,2\n2,0\n2,2\n");
}

#[cfg(unix)]
#[test]
fn closing_the_output_pipe_ends_the_process_quietly() {
    use std::io::Read;
    use std::os::unix::process::ExitStatusExt;
    use std::process::Stdio;

    // 5^7 prefix lines are far more than a pipe buffer holds, so the child is
    // guaranteed to block writing until we close our end.
    let path = fixture("haar-5.json");
    let mut child = Command::new(env!("CARGO_BIN_EXE_padic-ifs"))
        .args(["oracle", path.to_str().expect("utf-8 path"), "--depth", "7"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary should launch");

    let mut stdout = child.stdout.take().expect("stdout pipe");
    let mut first = [0u8; 64];
    stdout.read_exact(&mut first).expect("some output");
    drop(stdout);

    let status = child.wait().expect("child finishes");
    let mut stderr = String::new();
    child
        .stderr
        .take()
        .expect("stderr pipe")
        .read_to_string(&mut stderr)
        .expect("read stderr");
    assert!(
        !stderr.contains("panicked"),
        "no panic on a closed pipe:\n{stderr}"
    );
    assert_eq!(
        status.signal(),
        Some(13),
        "the process should end on SIGPIPE, got {status:?}"
    );
}

#[test]
fn exit_codes_follow_the_contract() {
    // Success.
    assert_eq!(run_on("analyze", "cantor.json", &[]).status.code(), Some(0));

    // Usage errors: unreadable input, invalid JSON, bad flag values, and a
    // verification request against an automaton file (no system to enumerate).
    assert_eq!(run(&["analyze", "no-such-file.json"]).status.code(), Some(2));

    let bad = std::env::temp_dir().join(format!("padic-ifs-bad-{}.json", std::process::id()));
    std::fs::write(&bad, "{ not json").expect("write temp file");
    assert_eq!(
        run(&["analyze", bad.to_str().expect("utf-8 path")]).status.code(),
        Some(2)
    );
    std::fs::remove_file(&bad).ok();

    assert_eq!(
        run_on("decimate", "cantor.json", &["--k", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run_on("analyze", "branching-paths.automaton.json", &["--verify"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["analyze"]).status.code(), Some(2), "clap usage error");

    // Domain error: the measure construction rejects maps whose scale
    // exponent is not 1.
    let domain = run_on("measure", "negative-scale.json", &[]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&domain.stderr).starts_with("error: "),
        "domain errors report on stderr"
    );
}
