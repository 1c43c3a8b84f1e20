//! End-to-end runs of every subcommand against committed outputs in
//! `tests/golden/cli`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use integrator_reach::cli::run_with;
use serde_json::Value;

const FIG: &str = "examples/figures";
const INPUTS: &str = "tests/golden/inputs";

struct Case {
    name: &'static str,
    args: Vec<String>,
    exit: i32,
}

fn case(name: &'static str, exit: i32, args: &str) -> Case {
    let args = args
        .replace("$FIG", FIG)
        .replace("$IN", INPUTS)
        .split_whitespace()
        .map(String::from)
        .collect();
    Case { name, args, exit }
}

fn cases() -> Vec<Case> {
    vec![
        case("support", 0, "support --spec $FIG/fig1.json --dirs $IN/dirs_r2.csv"),
        case("support_empty", 0, "support --spec $FIG/fig1.json --dirs $IN/dirs_empty.csv"),
        case("boundary_fig2", 0, "boundary --spec $FIG/fig2.json --grid 6"),
        case("boundary_fig3", 0, "boundary --spec $FIG/fig3.json --grid 5"),
        case("implicit_r3", 0, "implicit --r 3"),
        case("implicit_fig6a", 0, "implicit --spec $FIG/fig6a.json"),
        case("lines_fig6a", 0, "lines --spec $FIG/fig6a.json --samples 5 --seed 6"),
        case("membership", 0, "membership --spec $FIG/fig1.json --points $IN/points_r2.csv"),
        case("simulate", 0, "simulate --spec $FIG/fig1.json --schedule $IN/schedule_r2.json"),
        case("cloud", 0, "cloud --spec $FIG/fig4_left_l2.json --samples 8 --seed 4"),
        case("audit", 0, "audit --spec $FIG/fig4_right_linf.json --samples 50 --seed 4 --tol 1e-9"),
        case("volume", 0, "volume --spec $FIG/fig6a.json --samples 2000 --seed 2"),
        case("bench", 0, "bench --spec $FIG/fig6a.json --samples 200 --seed 3"),
        case("bad_spec", 2, "support --spec $IN/bad_spec.json --dirs $IN/dirs_r2.csv"),
        case("missing_spec", 2, "boundary --spec $IN/no_such_file.json"),
        case("degenerate_lines", 3, "lines --spec $IN/degenerate.json --samples 3"),
    ]
}

fn run(args: &[String]) -> (i32, Vec<u8>, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("intreach".to_string()).chain(args.iter().cloned());
    let code = run_with(argv, &mut out, &mut err);
    (code, out, err)
}

/// Wall-clock timings are replaced by `null`; everything else is compared
/// byte for byte.
fn scrub(name: &str, out: Vec<u8>) -> String {
    let text = String::from_utf8(out).expect("utf-8 output");
    if !name.starts_with("bench") {
        return text;
    }
    let mut v: Value = serde_json::from_str(&text).expect("bench emits JSON");
    v["data"]["timings"] = Value::Null;
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(format!("tests/golden/cli/{name}.out"))
}

#[test]
fn subcommands_match_golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut failures = Vec::new();
    for c in cases() {
        let (code, out, err) = run(&c.args);
        let got = format!(
            "exit {code}\n--- stdout\n{}--- stderr\n{}",
            scrub(c.name, out),
            String::from_utf8(err).unwrap()
        );
        if code != c.exit {
            failures.push(format!("{}: exit {code}, expected {}\n{got}", c.name, c.exit));
            continue;
        }
        let path = golden_path(c.name);
        if update {
            fs::write(&path, &got).unwrap();
            continue;
        }
        match fs::read_to_string(&path) {
            Ok(want) if want == got => {}
            Ok(_) => failures.push(format!("{}: differs from {}", c.name, path.display())),
            Err(e) => failures.push(format!("{}: {e}", c.name)),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn empty_direction_list_gives_header_only() {
    let (code, out, _) = run(&case("", 0, "support --spec $FIG/fig1.json --dirs $IN/dirs_empty.csv").args);
    assert_eq!(code, 0);
    let text = String::from_utf8(out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1, "{text}");
}

#[test]
fn errors_are_machine_readable() {
    for (args, exit) in [
        ("support --spec $IN/bad_spec.json --dirs $IN/dirs_r2.csv", 2),
        ("lines --spec $IN/degenerate.json --samples 3", 3),
    ] {
        let (code, out, err) = run(&case("", exit, args).args);
        assert_eq!(code, exit);
        assert!(out.is_empty());
        let v: Value = serde_json::from_slice(&err).expect("error JSON");
        assert_eq!(v["exit_code"], exit);
        assert!(v["error"].is_string() && v["message"].is_string());
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, _, err) = run(&["frobnicate".to_string()]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn unknown_spec_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.json");
    fs::write(
        &path,
        r#"{"blocks": [{"r": 1, "x0": [0.0], "alpha": -1, "beta": 1, "colour": "red"}], "t": 1.0}"#,
    )
    .unwrap();
    let args = vec![
        "boundary".to_string(),
        "--spec".to_string(),
        path.display().to_string(),
    ];
    assert_eq!(run(&args).0, 2);
}

/// Same configuration and seed give the same bytes, including files written
/// with `--out`.
#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        "cloud --spec $FIG/fig4_right_l2.json --samples 300 --seed 9",
        "audit --spec $FIG/fig4_left_linf.json --samples 300 --seed 9 --method sampled --directions 64",
        "volume --spec $FIG/fig3.json --samples 5000 --seed 9",
        "lines --spec $FIG/fig6b.json --samples 4 --seed 9",
    ] {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let file = dir.path().join(format!("run{k}"));
            let mut a = case("", 0, args).args;
            a.push("--out".into());
            a.push(file.display().to_string());
            assert_eq!(run(&a).0, 0, "{args}");
            outputs.push(fs::read(&file).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{args}");
    }
}
