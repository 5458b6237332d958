use std::io::Write;
use std::path::Path;

use ricalc_core::coefficients::{big_c, little_c, CoefficientVector};
use ricalc_core::integral::{
    cf_compare, empirical_cf, exponent_of, logcf_quadrature, simulate_integral, CfReport,
    IntegralSpec,
};
use ricalc_core::levy::{
    measure_eval, parse_triple, transform_multi, BallComplement, Decomposition, TripleDoc,
};
use ricalc_core::product_law::sample;
use ricalc_core::scalar::parse_rational;
use ricalc_core::{build_law, Exact, ExactMultiset, Law64, Multiset64, Scalar, Triple64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Format, Mode, Suite};
use crate::checks::{run_suite, Check, TRANSFORM_TOLERANCE};
use crate::format::{csv_number, json, parse_grid};
use crate::{CliError, Outcome};

const DEFAULT_LAW_GRID: &str = "0.01,1,100";
const DEFAULT_CHECK_RADII: [f64; 3] = [0.5, 1.0, 2.0];
pub const MIN_PATHS: usize = 1000;

type CmdResult = Result<Outcome, CliError>;

fn done(text: String) -> CmdResult {
    Ok(Outcome { text, passed: true })
}

pub fn dispatch(cli: &Cli, stderr: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Coeffs { betas } => coeffs(betas, cli.mode, format_or(cli, Format::Json)),
        Command::Law {
            multiset,
            eval,
            grid,
            sample,
        } => {
            let format = format_or(cli, Format::Csv);
            match (eval, sample) {
                (Some(t), _) => law_eval(multiset, *t, cli.mode, format),
                (None, Some(n)) => law_sample(multiset, *n, resolve_seed(cli.seed, stderr), format),
                (None, None) => law_table(
                    multiset,
                    &parse_grid("--grid", grid.as_deref().unwrap_or(DEFAULT_LAW_GRID))?,
                    cli.mode,
                    format,
                ),
            }
        }
        Command::Transform {
            triple,
            betas,
            radii,
            check,
        } => {
            json_only(cli, "transform")?;
            float_only(cli, "transform")?;
            transform(triple, betas, radii, *check)
        }
        Command::Verify { suite, samples } => {
            json_only(cli, "verify")?;
            float_only(cli, "verify")?;
            verify(*suite, resolve_seed(cli.seed, stderr), *samples)
        }
        Command::Simulate {
            triple,
            betas,
            paths,
            grid,
            y_grid,
            direction,
            z,
            samples_csv,
        } => {
            json_only(cli, "simulate")?;
            float_only(cli, "simulate")?;
            let opts = SimulateOptions {
                paths: *paths,
                grid: *grid,
                y_grid: parse_grid("--y-grid", y_grid)?,
                direction: direction.clone(),
                z: *z,
                samples_csv: samples_csv.as_deref(),
            };
            simulate(triple, betas, opts, resolve_seed(cli.seed, stderr))
        }
    }
}

fn format_or(cli: &Cli, default: Format) -> Format {
    cli.format.unwrap_or(default)
}

fn json_only(cli: &Cli, command: &str) -> Result<(), CliError> {
    match cli.format {
        Some(Format::Csv) => Err(CliError::Input(format!("{command} emits JSON only"))),
        _ => Ok(()),
    }
}

fn float_only(cli: &Cli, command: &str) -> Result<(), CliError> {
    match cli.mode {
        Mode::Exact => Err(CliError::Input(format!(
            "{command} supports --mode float only"
        ))),
        Mode::Float => Ok(()),
    }
}

fn resolve_seed(seed: Option<u64>, stderr: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        let _ = writeln!(stderr, "seed: {s}");
        s
    })
}

fn parse_float(text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Input(format!("cannot parse exponent '{text}'")))
}

fn parse_exact(text: &str) -> Result<Exact, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Input(format!("cannot parse exponent '{text}'")))
}

fn parse_multiset(text: &str) -> Result<Multiset64, CliError> {
    text.parse::<Multiset64>()
        .map_err(|e| CliError::Input(format!("multiset '{text}': {e}")))
}

fn coeff_rows<T: Scalar>(
    big: &CoefficientVector<T>,
    little: &CoefficientVector<T>,
) -> Vec<[String; 3]> {
    big.exponents
        .iter()
        .zip(&big.values)
        .zip(&little.values)
        .map(|((b, cb), cl)| [b.to_string(), cb.to_string(), cl.to_string()])
        .collect()
}

fn coeffs(betas: &[String], mode: Mode, format: Format) -> CmdResult {
    match mode {
        Mode::Float => {
            let values = betas
                .iter()
                .map(|b| parse_float(b))
                .collect::<Result<Vec<_>, _>>()?;
            let (big, little) = (big_c(&values)?, little_c(&values)?);
            match format {
                Format::Json => done(json(&json!({
                    "mode": "float",
                    "exponents": big.exponents,
                    "C": big.values,
                    "c": little.values,
                    "sum_C": big.sum(),
                }))?),
                Format::Csv => {
                    let sum = csv_number(big.sum());
                    let mut out = String::from("beta,C,c,sum_C\n");
                    for ((b, cb), cl) in big.exponents.iter().zip(&big.values).zip(&little.values) {
                        out += &format!(
                            "{},{},{},{sum}\n",
                            csv_number(*b),
                            csv_number(*cb),
                            csv_number(*cl)
                        );
                    }
                    done(out)
                }
            }
        }
        Mode::Exact => {
            let values = betas
                .iter()
                .map(|b| parse_exact(b))
                .collect::<Result<Vec<_>, _>>()?;
            let (big, little) = (big_c(&values)?, little_c(&values)?);
            let rows = coeff_rows(&big, &little);
            let sum = big.sum().to_string();
            match format {
                Format::Json => done(json(&json!({
                    "mode": "exact",
                    "exponents": rows.iter().map(|r| &r[0]).collect::<Vec<_>>(),
                    "C": rows.iter().map(|r| &r[1]).collect::<Vec<_>>(),
                    "c": rows.iter().map(|r| &r[2]).collect::<Vec<_>>(),
                    "sum_C": sum,
                }))?),
                Format::Csv => {
                    let mut out = String::from("beta,C,c,sum_C\n");
                    for [b, cb, cl] in rows {
                        out += &format!("{b},{cb},{cl},{sum}\n");
                    }
                    done(out)
                }
            }
        }
    }
}

/// The float law used for evaluation plus, in exact mode, the exact term list.
fn resolve_law(text: &str, mode: Mode) -> Result<(Multiset64, Law64, Option<Value>), CliError> {
    match mode {
        Mode::Float => {
            let ms = parse_multiset(text)?;
            let law = build_law(&ms);
            Ok((ms, law, None))
        }
        Mode::Exact => {
            let exact = text
                .parse::<ExactMultiset>()
                .map_err(|e| CliError::Input(format!("multiset '{text}': {e}")))?;
            let terms: Vec<Value> = build_law(&exact)
                .terms()
                .iter()
                .map(|t| json!({"coef": t.coef.to_string(), "exponent": t.exponent.to_string(), "logpow": t.logpow}))
                .collect();
            let ms = exact.to_f64();
            let law = build_law(&ms);
            Ok((ms, law, Some(Value::Array(terms))))
        }
    }
}

fn pdf_or_none(law: &Law64, t: f64) -> Option<f64> {
    law.pdf(t).ok()
}

fn law_rows(law: &Law64, grid: &[f64]) -> Vec<(f64, Option<f64>, f64)> {
    grid.iter()
        .map(|&t| (t, pdf_or_none(law, t), law.cdf(t)))
        .collect()
}

fn law_output(
    ms: &Multiset64,
    terms: Option<Value>,
    rows: &[(f64, Option<f64>, f64)],
    format: Format,
) -> CmdResult {
    match format {
        Format::Csv => {
            let mut out = String::from("t,pdf,cdf\n");
            for (t, pdf, cdf) in rows {
                let pdf = pdf.map(csv_number).unwrap_or_default();
                out += &format!("{},{pdf},{}\n", csv_number(*t), csv_number(*cdf));
            }
            done(out)
        }
        Format::Json => {
            let mut doc = json!({
                "multiset": ms.to_string(),
                "points": rows.iter().map(|(t, pdf, cdf)| json!({"t": t, "pdf": pdf, "cdf": cdf})).collect::<Vec<_>>(),
            });
            if let Some(terms) = terms {
                doc["terms"] = terms;
            }
            done(json(&doc)?)
        }
    }
}

fn law_eval(text: &str, t: f64, mode: Mode, format: Format) -> CmdResult {
    if !t.is_finite() {
        return Err(CliError::Input(format!("--eval {t} is not finite")));
    }
    let (ms, law, terms) = resolve_law(text, mode)?;
    law_output(&ms, terms, &law_rows(&law, &[t]), format)
}

fn law_table(text: &str, grid: &[f64], mode: Mode, format: Format) -> CmdResult {
    let (ms, law, terms) = resolve_law(text, mode)?;
    law_output(&ms, terms, &law_rows(&law, grid), format)
}

fn law_sample(text: &str, n: usize, seed: u64, format: Format) -> CmdResult {
    let ms = parse_multiset(text)?;
    let batch = sample(&ms, n, seed, 0)?;
    match format {
        Format::Csv => {
            let mut out = format!("# multiset={ms} seed={seed}\nvalue\n");
            for v in &batch.values {
                out += &csv_number(*v);
                out.push('\n');
            }
            done(out)
        }
        Format::Json => done(json(
            &json!({"multiset": ms.to_string(), "seed": seed, "samples": batch.values}),
        )?),
    }
}

fn read_triple(path: &Path) -> Result<Triple64, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_triple(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct MassRow {
    radius: f64,
    mass: f64,
}

#[derive(Serialize)]
struct TransformCheck {
    radii: Vec<f64>,
    shift_residual: f64,
    covariance_residual: f64,
    mass_residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct TransformReport {
    multiset: String,
    triple: TripleDoc,
    masses: Vec<MassRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<TransformCheck>,
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn transform(path: &Path, betas: &str, radii: &[f64], check: bool) -> CmdResult {
    let base = read_triple(path)?;
    let ms = parse_multiset(betas)?;
    if check && !ms.is_all_distinct() {
        return Err(CliError::Input(format!(
            "--check needs distinct exponents, got {ms}"
        )));
    }
    let sets = radii
        .iter()
        .map(|&r| BallComplement::new(r))
        .collect::<Result<Vec<_>, _>>()?;
    let out = transform_multi(&base, &ms)?;
    let masses = sets
        .iter()
        .map(|s| MassRow {
            radius: s.radius(),
            mass: measure_eval(out.measure(), s),
        })
        .collect();
    let check = if check {
        let split = Decomposition::new(&base, &ms.distinct_values())?;
        let radii = if radii.is_empty() {
            DEFAULT_CHECK_RADII.to_vec()
        } else {
            radii.to_vec()
        };
        let mut mass_residual = 0.0f64;
        for &r in &radii {
            let set = BallComplement::new(r)?;
            mass_residual = mass_residual
                .max((measure_eval(out.measure(), &set) - split.measure_eval(&set)).abs());
        }
        let shift_residual = max_gap(out.shift(), &split.shift());
        let covariance_residual = max_gap(out.covariance(), &split.covariance());
        let pass = [shift_residual, covariance_residual, mass_residual]
            .iter()
            .all(|r| *r <= TRANSFORM_TOLERANCE);
        Some(TransformCheck {
            radii,
            shift_residual,
            covariance_residual,
            mass_residual,
            tolerance: TRANSFORM_TOLERANCE,
            pass,
        })
    } else {
        None
    };
    let passed = check.as_ref().is_none_or(|c| c.pass);
    let report = TransformReport {
        multiset: ms.to_string(),
        triple: TripleDoc::from_triple(&out)?,
        masses,
        check,
    };
    Ok(Outcome {
        text: json(&report)?,
        passed,
    })
}

#[derive(Serialize)]
struct VerifyReport {
    suite: &'static str,
    seed: u64,
    samples: usize,
    pass: bool,
    checks: Vec<Check>,
}

fn verify(suite: Suite, seed: u64, samples: usize) -> CmdResult {
    if matches!(suite, Suite::Mc | Suite::All) && samples < 1000 {
        return Err(CliError::Input(format!(
            "--samples {samples} is below the minimum 1000"
        )));
    }
    let checks = run_suite(suite, seed, samples);
    let pass = checks.iter().all(|c| c.pass);
    let name = match suite {
        Suite::Identities => "identities",
        Suite::Mc => "mc",
        Suite::Compose => "compose",
        Suite::All => "all",
    };
    let report = VerifyReport {
        suite: name,
        seed,
        samples,
        pass,
        checks,
    };
    Ok(Outcome {
        text: json(&report)?,
        passed: pass,
    })
}

struct SimulateOptions<'a> {
    paths: usize,
    grid: usize,
    y_grid: Vec<f64>,
    direction: Vec<f64>,
    z: f64,
    samples_csv: Option<&'a Path>,
}

#[derive(Serialize)]
struct SimulateReport {
    multiset: String,
    grid: usize,
    truncated_mass: f64,
    mean: Vec<f64>,
    mean_standard_error: Vec<f64>,
    #[serde(flatten)]
    comparison: CfReport,
}

fn simulate(path: &Path, betas: &str, opts: SimulateOptions<'_>, seed: u64) -> CmdResult {
    let triple = read_triple(path)?;
    let ms = parse_multiset(betas)?;
    if opts.paths < MIN_PATHS {
        return Err(CliError::Input(format!(
            "--paths {} is below the minimum {MIN_PATHS}",
            opts.paths
        )));
    }
    if !(opts.z.is_finite() && opts.z > 0.0) {
        return Err(CliError::Input(format!("--z {} must be positive", opts.z)));
    }
    let dim = triple.dim();
    let direction = if opts.direction.is_empty() {
        (0..dim).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
    } else if opts.direction.len() == dim {
        opts.direction
    } else {
        return Err(CliError::Input(format!(
            "--direction has {} coordinates, the triple has dim {dim}",
            opts.direction.len()
        )));
    };
    let ys: Vec<Vec<f64>> = opts
        .y_grid
        .iter()
        .map(|&t| direction.iter().map(|d| d * t).collect())
        .collect();
    let spec = IntegralSpec::canonical(&ms);
    let batch = simulate_integral(&triple, &spec, opts.paths, opts.grid, seed)?;
    if let Some(csv_path) = opts.samples_csv {
        write_samples(csv_path, &batch.samples, dim, &ms, seed)?;
    }
    let emp = empirical_cf(&batch.samples, dim, &ys, Some(seed))?;
    let exponent = exponent_of(&triple);
    let comparison = cf_compare(&emp, &mut |y| logcf_quadrature(&exponent, &spec, y), opts.z)?;
    let passed = comparison.pass;
    let report = SimulateReport {
        multiset: ms.to_string(),
        grid: opts.grid,
        truncated_mass: batch.truncated_mass,
        mean: batch.mean(),
        mean_standard_error: batch.standard_error(),
        comparison,
    };
    Ok(Outcome {
        text: json(&report)?,
        passed,
    })
}

fn write_samples(
    path: &Path,
    samples: &[f64],
    dim: usize,
    ms: &Multiset64,
    seed: u64,
) -> Result<(), CliError> {
    let header: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    let mut out = format!("# multiset={ms} seed={seed}\n{}\n", header.join(","));
    for row in samples.chunks_exact(dim) {
        out += &row
            .iter()
            .map(|v| csv_number(*v))
            .collect::<Vec<_>>()
            .join(",");
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}
