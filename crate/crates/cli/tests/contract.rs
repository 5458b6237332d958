mod common;

use std::path::PathBuf;

use clap::CommandFactory;
use common::{expand, fixture, invoke, manifest_dir};
use ricalc::Cli;
use ricalc_core::levy::{parse_triple, transform_multi};
use serde_json::Value;

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run_in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = ricalc::run(
        std::iter::once("ricalc").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn input_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &[],
        &["coeffs"],
        &["coeffs", "1", "abc"],
        &["coeffs", "0"],
        &["--format", "xml", "coeffs", "1"],
        &["law", "1,2", "--grid", "0,1,1"],
        &["law", "1,2", "--eval", "0.5", "--sample", "3"],
        &["law", "1x2.5"],
        &["law", "1,2", "--sample", "0", "--seed", "1"],
        &[
            "--format",
            "csv",
            "transform",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1",
        ],
        &[
            "--mode",
            "exact",
            "transform",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1",
        ],
        &[
            "transform",
            "--triple",
            "{fixtures}/missing.json",
            "--betas",
            "1",
        ],
        &[
            "transform",
            "--triple",
            "{fixtures}/truncated.json",
            "--betas",
            "1",
        ],
        &[
            "transform",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1",
            "--radii",
            "-1",
        ],
        &["verify", "--suite", "mc", "--samples", "10", "--seed", "1"],
        &[
            "simulate",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1,2",
            "--paths",
            "999",
            "--seed",
            "1",
        ],
        &[
            "simulate",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1,2",
            "--grid",
            "8",
            "--seed",
            "1",
        ],
        &[
            "simulate",
            "--triple",
            "{fixtures}/truncated.json",
            "--betas",
            "1,2",
            "--seed",
            "1",
        ],
        &[
            "simulate",
            "--triple",
            "{fixtures}/gaussian.json",
            "--betas",
            "1",
            "--direction",
            "1,0,0",
            "--seed",
            "1",
        ],
    ];
    for args in cases {
        let (code, stdout, stderr) = invoke(&expand(args));
        assert_eq!(code, 2, "{args:?}: {stderr}");
        assert!(stdout.is_empty(), "{args:?}");
        assert!(!stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn schema_errors_name_the_field() {
    let (_, _, stderr) = invoke(&expand(&[
        "transform",
        "--triple",
        "{fixtures}/unknown_field.json",
        "--betas",
        "1",
    ]));
    assert!(stderr.contains("'atom'"), "{stderr}");
    let (_, _, stderr) = invoke(&expand(&[
        "transform",
        "--triple",
        "{fixtures}/truncated.json",
        "--betas",
        "1",
    ]));
    assert!(stderr.contains("line 4"), "{stderr}");
}

#[test]
fn failed_comparison_exits_1() {
    let args = expand(&[
        "simulate",
        "--triple",
        "{fixtures}/standard.json",
        "--betas",
        "1,2",
        "--paths",
        "1000",
        "--grid",
        "64",
        "--seed",
        "3",
        "--z",
        "1e-6",
    ]);
    let (code, stdout, _) = invoke(&args);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["pass"], false);
    assert!(report["points"]
        .as_array()
        .unwrap()
        .iter()
        .any(|p| p["pass"] == false));
}

#[test]
fn simulation_is_seed_deterministic_and_zero_triple_matches() {
    let args = expand(&[
        "simulate",
        "--triple",
        "{fixtures}/standard.json",
        "--betas",
        "1,2",
        "--paths",
        "2000",
        "--grid",
        "64",
        "--seed",
        "11",
    ]);
    let first = invoke(&args);
    assert_eq!(first.0, 0, "{}", first.2);
    assert_eq!(first, invoke(&args));
    let report: Value = serde_json::from_str(&first.1).unwrap();
    assert_eq!(report["seed"], 11);
    assert_eq!(report["points"].as_array().unwrap().len(), 21);
    assert!(report["truncated_mass"].as_f64().unwrap() > 0.0);

    let zero = tmp("zero.json");
    std::fs::write(&zero, r#"{"dim": 1, "shift": [0], "covariance": [0]}"#).unwrap();
    let (code, stdout, _) = invoke(&[
        "simulate".into(),
        "--triple".into(),
        zero.display().to_string(),
        "--betas".into(),
        "1,2".into(),
        "--paths".into(),
        "1000".into(),
        "--seed".into(),
        "5".into(),
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["max_deviation"], 0.0);
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let (code, stdout, stderr) = run_in_process(&["law", "1,2", "--sample", "5"]);
    assert_eq!(code, 0);
    let seed: u64 = stderr
        .trim()
        .strip_prefix("seed: ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(stdout.starts_with(&format!("# multiset=1,2 seed={seed}\n")));
    let replay = run_in_process(&["law", "1,2", "--sample", "5", "--seed", &seed.to_string()]);
    assert_eq!(replay.1, stdout);
}

#[test]
fn samples_csv_round_trips_exactly() {
    let path = tmp("samples.csv");
    let args = expand(&[
        "simulate",
        "--triple",
        "{fixtures}/planar.json",
        "--betas",
        "1,2x2",
        "--paths",
        "1000",
        "--grid",
        "64",
        "--seed",
        "9",
        "--direction",
        "1,-1",
        "--samples-csv",
    ]);
    let args: Vec<String> = args
        .into_iter()
        .chain([path.display().to_string()])
        .collect();
    let (code, stdout, stderr) = invoke(&args);
    assert_eq!(code, 0, "{stderr}");
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# multiset=1,2x2 seed=9"));
    assert_eq!(lines.next(), Some("x1,x2"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1000);
    let mean0 = rows.iter().map(|r| r[0]).sum::<f64>() / 1000.0;
    assert!((mean0 - report["mean"][0].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn law_csv_values_round_trip() {
    let (code, stdout, _) = run_in_process(&["law", "0.5,3x2", "--grid", "0.05,1,20"]);
    assert_eq!(code, 0);
    let law = ricalc_core::build_law(&"0.5,3x2".parse::<ricalc_core::Multiset64>().unwrap());
    for line in stdout.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[1], law.pdf(v[0]).unwrap());
        assert_eq!(v[2], law.cdf(v[0]));
    }
}

#[test]
fn transformed_triple_reparses() {
    let (code, stdout, _) = invoke(&expand(&[
        "transform",
        "--triple",
        "{fixtures}/planar.json",
        "--betas",
        "0.5,2x2",
    ]));
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let emitted = parse_triple(&report["triple"].to_string()).unwrap();
    let base = parse_triple(&std::fs::read_to_string(fixture("planar.json")).unwrap()).unwrap();
    assert_eq!(
        emitted,
        transform_multi(&base, &"0.5,2x2".parse().unwrap()).unwrap()
    );
}

#[test]
fn output_flag_writes_file() {
    let path = tmp("coeffs.json");
    let (code, stdout, _) =
        run_in_process(&["--output", path.to_str().unwrap(), "coeffs", "1", "2", "3"]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["C"], serde_json::json!([3.0, -3.0, 1.0]));
}

#[test]
fn help_and_version_exit_0() {
    let (code, stdout, _) = run_in_process(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("simulate"));
    assert_eq!(run_in_process(&["--version"]).0, 0);
}

fn render_page(cmd: clap::Command, title: &str) -> Vec<u8> {
    let mut buf = Vec::new();
    clap_mangen::Man::new(cmd)
        .title(title.to_string())
        .render(&mut buf)
        .unwrap();
    buf
}

/// The pages in `docs/` are generated from the argument definitions.
#[test]
fn manual_pages_are_current() {
    let docs = manifest_dir().join("../../docs");
    let cmd = Cli::command();
    let mut pages = vec![("ricalc.1".to_string(), render_page(cmd.clone(), "ricalc"))];
    for sub in cmd.get_subcommands() {
        let name = format!("ricalc-{}", sub.get_name());
        pages.push((
            format!("{name}.1"),
            render_page(
                sub.clone().bin_name(format!("ricalc {}", sub.get_name())),
                &name,
            ),
        ));
    }
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (file, page) in pages {
        let path = docs.join(&file);
        if update {
            std::fs::create_dir_all(&docs).unwrap();
            std::fs::write(&path, &page).unwrap();
        } else {
            let current = std::fs::read(&path).unwrap_or_default();
            assert!(
                current == page,
                "{file} is stale; rerun with UPDATE_GOLDEN=1"
            );
        }
    }
}
