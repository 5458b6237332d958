//! Golden-file cases for the `ricalc` binary. Each golden file holds the exit
//! code on its first line followed by the exact standard output. Set
//! `UPDATE_GOLDEN=1` to rewrite them.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const CASES: &[Case] = &[
    Case {
        name: "coeffs_float",
        args: &["coeffs", "1", "2"],
        exit: 0,
    },
    Case {
        name: "coeffs_single",
        args: &["coeffs", "1"],
        exit: 0,
    },
    Case {
        name: "coeffs_exact",
        args: &["--mode", "exact", "coeffs", "1/3", "2", "5"],
        exit: 0,
    },
    Case {
        name: "coeffs_csv",
        args: &["--format", "csv", "coeffs", "0.5", "1.5", "4"],
        exit: 0,
    },
    Case {
        name: "coeffs_duplicate",
        args: &["coeffs", "1", "1"],
        exit: 2,
    },
    Case {
        name: "coeffs_negative",
        args: &["coeffs", "-1", "2"],
        exit: 2,
    },
    Case {
        name: "law_eval",
        args: &["law", "1,2", "--eval", "0.5"],
        exit: 0,
    },
    Case {
        name: "law_eval_block",
        args: &["law", "1x2", "--eval", "0.367879441"],
        exit: 0,
    },
    Case {
        name: "law_eval_one",
        args: &["--format", "json", "law", "1", "--eval", "1"],
        exit: 0,
    },
    Case {
        name: "law_grid",
        args: &["law", "2x3", "--grid", "0,1,11"],
        exit: 0,
    },
    Case {
        name: "law_default_grid",
        args: &["law", "0.5,1,2"],
        exit: 0,
    },
    Case {
        name: "law_exact_json",
        args: &[
            "--mode", "exact", "--format", "json", "law", "1/2,3x2", "--grid", "0.25,1,4",
        ],
        exit: 0,
    },
    Case {
        name: "law_sample",
        args: &["law", "0.5,2x2", "--sample", "20", "--seed", "7"],
        exit: 0,
    },
    Case {
        name: "law_bad_multiset",
        args: &["law", "1,x2"],
        exit: 2,
    },
    Case {
        name: "law_bad_grid",
        args: &["law", "1,2", "--grid", "1,0,5"],
        exit: 2,
    },
    Case {
        name: "transform_check",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1,2",
            "--radii",
            "0.25,0.5,1,1.5",
            "--check",
        ],
        exit: 0,
    },
    Case {
        name: "transform_planar",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/planar.json",
            "--betas",
            "0.5,1,3",
            "--radii",
            "0.3,1,2",
            "--check",
        ],
        exit: 0,
    },
    Case {
        name: "transform_gaussian",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/gaussian.json",
            "--betas",
            "2",
        ],
        exit: 0,
    },
    Case {
        name: "transform_shift_only",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/shift_only.json",
            "--betas",
            "1,2,3",
        ],
        exit: 0,
    },
    Case {
        name: "transform_repeated",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "2x3",
            "--radii",
            "1",
        ],
        exit: 0,
    },
    Case {
        name: "transform_unknown_field",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/unknown_field.json",
            "--betas",
            "1",
        ],
        exit: 2,
    },
    Case {
        name: "transform_not_psd",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/not_psd.json",
            "--betas",
            "1",
        ],
        exit: 2,
    },
    Case {
        name: "transform_check_repeated",
        args: &[
            "transform",
            "--triple",
            "{fixtures}/standard.json",
            "--betas",
            "1x2",
            "--check",
        ],
        exit: 2,
    },
    Case {
        name: "verify_identities",
        args: &["verify", "--suite", "identities", "--seed", "42"],
        exit: 0,
    },
    Case {
        name: "verify_mc",
        args: &[
            "verify",
            "--suite",
            "mc",
            "--seed",
            "42",
            "--samples",
            "20000",
        ],
        exit: 0,
    },
    Case {
        name: "verify_bad_suite",
        args: &["verify", "--suite", "everything"],
        exit: 2,
    },
];

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures").join(name)
}

fn golden_path(name: &str) -> PathBuf {
    manifest_dir()
        .join("tests/golden")
        .join(format!("{name}.out"))
}

pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_ricalc")
}

pub fn expand(args: &[&str]) -> Vec<String> {
    let fixtures = manifest_dir().join("tests/fixtures");
    args.iter()
        .map(|a| a.replace("{fixtures}", &fixtures.display().to_string()))
        .collect()
}

/// Runs the binary and returns `(exit code, stdout, stderr)`.
pub fn invoke(args: &[String]) -> (i32, String, String) {
    let out = Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    (
        code,
        String::from_utf8(out.stdout).expect("utf-8"),
        String::from_utf8(out.stderr).expect("utf-8"),
    )
}

fn render(code: i32, stdout: &str) -> String {
    format!("exit: {code}\n{stdout}")
}

/// Runs `case` twice and compares both runs with each other and with its golden file.
pub fn check_case(case: &Case) -> Result<(), String> {
    let args = expand(case.args);
    let (code, stdout, stderr) = invoke(&args);
    if code != case.exit {
        return Err(format!(
            "{}: exit {code}, expected {} (stderr: {stderr})",
            case.name, case.exit
        ));
    }
    if case.exit == 2 && stderr.is_empty() {
        return Err(format!("{}: input error without a message", case.name));
    }
    let (code2, stdout2, _) = invoke(&args);
    if (code2, &stdout2) != (code, &stdout) {
        return Err(format!("{}: second run differs", case.name));
    }
    let actual = render(code, &stdout);
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| {
        format!(
            "{}: {e} (run with UPDATE_GOLDEN=1 to create)",
            path.display()
        )
    })?;
    if expected != actual {
        return Err(format!(
            "{}: output differs from {}",
            case.name,
            first_difference(&expected, &actual, &path)
        ));
    }
    Ok(())
}

fn first_difference(expected: &str, actual: &str, path: &Path) -> String {
    for (i, (e, a)) in expected.lines().zip(actual.lines()).enumerate() {
        if e != a {
            return format!(
                "{} at line {}:\n  expected {e}\n  actual   {a}",
                path.display(),
                i + 1
            );
        }
    }
    format!(
        "{} (line counts {} vs {})",
        path.display(),
        expected.lines().count(),
        actual.lines().count()
    )
}
