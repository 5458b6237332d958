//! Verification checks shared by `ricalc verify` and the acceptance harness.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::Rng;
use ricalc_core::coefficients::{big_c, lagrange_identity_check, two_block_unity};
use ricalc_core::integral::{compose_residual, exponent_of, logcf_quadrature, IntegralSpec};
use ricalc_core::levy::{measure_eval, transform_multi, Atom, BallComplement, Decomposition};
use ricalc_core::product_law::{
    case_law, distinct_law, repeated_cdf_gamma, repeated_law, sample, CaseSpec,
};
use ricalc_core::rng::stream_rng;
use ricalc_core::{
    build_law, BetaMultiset, ClosedFormLaw, Exact, Law64, LevyMeasure, Multiset64, Result, Scalar,
    Term, Triple64,
};
use serde::Serialize;

use crate::args::Suite;

pub const CASE_TOLERANCE: f64 = 1e-10;
pub const GAMMA_TOLERANCE: f64 = 1e-12;
pub const LAGRANGE_TOLERANCE: f64 = 1e-10;
pub const PARTITION_TOLERANCE: f64 = 1e-8;
pub const TRANSFORM_TOLERANCE: f64 = 1e-10;
pub const LOGCF_TOLERANCE: f64 = 1e-8;

/// Sup-distance allowed at 10^6 samples; scales as `1/sqrt(n)`.
pub const DKW_AT_MILLION: f64 = 0.002;

pub const COMPOSE_VALUES: [f64; 4] = [0.5, 1.0, 2.0, 3.5];

pub const DKW_MULTISETS: [&str; 10] = [
    "1",
    "0.5,2",
    "1x2,3",
    "2x3",
    "0.5,1,2,3.5",
    "1x2,2x2",
    "0.7,1.3x2,4",
    "3x5",
    "0.5x2,1,2x2,5",
    "1,1.5,2,2.5,3,3.5",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn within(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: None,
        }
    }

    fn failed(name: impl Into<String>, tolerance: f64, err: impl ToString) -> Self {
        Self {
            name: name.into(),
            residual: f64::NAN,
            tolerance,
            pass: false,
            detail: Some(err.to_string()),
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

fn settle(name: &str, tolerance: f64, result: Result<Check>) -> Check {
    result.unwrap_or_else(|e| Check::failed(name, tolerance, e))
}

/// `a = 0.2`, `R = 1`, one atom of mass 0.8 at 1.5.
pub fn standard_triple() -> Triple64 {
    Triple64::new(
        vec![0.2],
        vec![1.0],
        LevyMeasure::FiniteAtomic(vec![Atom {
            point: vec![1.5],
            mass: 0.8,
        }]),
    )
    .expect("valid triple")
}

/// 21 equally spaced points of `[-3, 3]` on the real line.
pub fn y_grid() -> Vec<Vec<f64>> {
    (0..21).map(|i| vec![-3.0 + 0.3 * i as f64]).collect()
}

fn rational(rng: &mut impl Rng, max_num: i64, max_den: i64) -> Exact {
    Exact::new(
        rng.random_range(1..=max_num).into(),
        rng.random_range(1..=max_den).into(),
    )
}

fn distinct_rationals(rng: &mut impl Rng, n: usize, max_num: i64, max_den: i64) -> Vec<Exact> {
    let mut out: Vec<Exact> = Vec::with_capacity(n);
    while out.len() < n {
        let r = rational(rng, max_num, max_den);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

fn to_f64(r: &Exact) -> f64 {
    r.to_f64_lossy()
}

/// Exact and floating-point partition of unity over random rational exponent sets.
pub fn partition_of_unity(seed: u64) -> Vec<Check> {
    let mut rng = stream_rng(seed, 1);
    let mut exact_worst = 0.0f64;
    let mut float_worst = 0.0f64;
    let mut failure = None;
    for _ in 0..200 {
        let n = rng.random_range(1..=10);
        let betas = distinct_rationals(&mut rng, n, 60, 12);
        match big_c(&betas) {
            Ok(c) => exact_worst = exact_worst.max((to_f64(&c.sum()) - 1.0).abs()),
            Err(e) => failure = Some(e),
        }
        let floats: Vec<f64> = betas.iter().map(to_f64).collect();
        match big_c(&floats) {
            Ok(c) => float_worst = float_worst.max((c.sum() - 1.0).abs() / c.max_abs()),
            Err(e) => failure = Some(e),
        }
    }
    if let Some(e) = failure {
        return vec![Check::failed("partition of unity", 0.0, e)];
    }
    vec![
        Check::within("partition of unity (exact)", exact_worst, 0.0),
        Check::within(
            "partition of unity (float, relative to max|C|)",
            float_worst,
            PARTITION_TOLERANCE,
        ),
    ]
}

/// Canonical decomposition of one at random complex nodes with pairwise gap at least 0.1.
pub fn lagrange(seed: u64) -> Check {
    let mut rng = stream_rng(seed, 2);
    let name = "Lagrange identity (relative)";
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let mut zs: Vec<Complex<f64>> = Vec::with_capacity(n);
        while zs.len() < n {
            let z = Complex::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if zs.iter().all(|w| (w - z).norm() >= 0.1) {
                zs.push(z);
            }
        }
        let z = Complex::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        match lagrange_identity_check(&zs, z) {
            Ok(c) => worst = worst.max(c.relative()),
            Err(e) => return Check::failed(name, LAGRANGE_TOLERANCE, e),
        }
    }
    Check::within(name, worst, LAGRANGE_TOLERANCE)
}

/// Two-block bracket identity in exact arithmetic for `1 <= k, l <= 8`.
pub fn two_block_identity(seed: u64) -> Check {
    let mut rng = stream_rng(seed, 3);
    let name = "two-block identity (exact)";
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let pair = distinct_rationals(&mut rng, 2, 20, 6);
        for k in 1..=8 {
            for l in 1..=8 {
                match two_block_unity(&pair[0], &pair[1], k, l) {
                    Ok(v) => worst = worst.max((to_f64(&v) - 1.0).abs()),
                    Err(e) => return Check::failed(name, 0.0, e),
                }
            }
        }
    }
    Check::within(name, worst, 0.0)
}

/// Distinct quarter-integer indices `i` (exponent `i/4`) in `[0.5, 10]`.
fn quarter_indices(rng: &mut impl Rng, n: usize) -> Vec<i64> {
    let mut pool: Vec<i64> = (2..=40).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool
}

/// A special multiset, exponents as quarter-integer indices.
#[derive(Clone, Debug)]
enum CaseConfig {
    Repeated(i64, u32),
    Distinct(Vec<i64>),
    Block(CaseSpec<i64>),
}

fn case_configs(seed: u64) -> Vec<CaseConfig> {
    let mut rng = stream_rng(seed, 4);
    let mut out = Vec::new();
    for _ in 0..12 {
        let v = quarter_indices(&mut rng, 6);
        out.push(CaseConfig::Repeated(v[0], rng.random_range(1..=6)));
        out.push(CaseConfig::Distinct(v[..rng.random_range(2..=5)].to_vec()));
        out.push(CaseConfig::Block(CaseSpec::DistinctPlusBlock {
            betas: v[..rng.random_range(1..=3)].to_vec(),
            alpha: v[3],
            m: rng.random_range(1..=4),
        }));
        out.push(CaseConfig::Block(CaseSpec::TwoBlocks {
            alpha: v[0],
            k: rng.random_range(1..=4),
            gamma: v[1],
            l: rng.random_range(1..=4),
        }));
        out.push(CaseConfig::Block(CaseSpec::DistinctPlusTwoBlocks {
            betas: v[..rng.random_range(1..=2)].to_vec(),
            alpha: v[3],
            m: rng.random_range(1..=3),
            gamma: v[4],
            l: rng.random_range(1..=3),
        }));
    }
    out
}

/// `(multiset, case-formula law, built law)` with exponent index `i` mapped to `q(i)`.
fn case_pair<T: Scalar>(
    config: &CaseConfig,
    q: impl Fn(i64) -> T,
) -> Result<(BetaMultiset<T>, ClosedFormLaw<T>, ClosedFormLaw<T>)> {
    let (ms, case) = match config {
        CaseConfig::Repeated(a, m) => {
            (BetaMultiset::repeated(q(*a), *m)?, repeated_law(q(*a), *m)?)
        }
        CaseConfig::Distinct(v) => {
            let betas: Vec<T> = v.iter().map(|&i| q(i)).collect();
            (
                BetaMultiset::from_values(betas.clone())?,
                distinct_law(&betas)?,
            )
        }
        CaseConfig::Block(spec) => {
            let betas = |v: &Vec<i64>| v.iter().map(|&i| q(i)).collect::<Vec<T>>();
            let spec = match spec {
                CaseSpec::DistinctPlusBlock { betas: b, alpha, m } => CaseSpec::DistinctPlusBlock {
                    betas: betas(b),
                    alpha: q(*alpha),
                    m: *m,
                },
                CaseSpec::TwoBlocks { alpha, k, gamma, l } => CaseSpec::TwoBlocks {
                    alpha: q(*alpha),
                    k: *k,
                    gamma: q(*gamma),
                    l: *l,
                },
                CaseSpec::DistinctPlusTwoBlocks {
                    betas: b,
                    alpha,
                    m,
                    gamma,
                    l,
                } => CaseSpec::DistinctPlusTwoBlocks {
                    betas: betas(b),
                    alpha: q(*alpha),
                    m: *m,
                    gamma: q(*gamma),
                    l: *l,
                },
            };
            (spec.multiset()?, case_law(&spec)?)
        }
    };
    let built = build_law(&ms);
    Ok((ms, case, built))
}

fn to_float_law(law: &ClosedFormLaw<Exact>) -> Result<Law64> {
    Law64::from_terms(law.terms().iter().map(|t| Term {
        coef: to_f64(&t.coef),
        exponent: to_f64(&t.exponent),
        logpow: t.logpow,
    }))
}

/// `sum |term|` of the density and of the antiderivative at `t`.
fn term_scale(law: &Law64, t: f64) -> Result<(f64, f64)> {
    let mut pdf = 0.0;
    let mut cdf = 0.0;
    for term in law.terms() {
        let single = Law64::from_terms([term.clone()])?;
        pdf += single.pdf(t)?.abs();
        cdf += single.primitive(t).abs();
    }
    Ok((pdf, cdf))
}

fn grid_100() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 100.0).collect()
}

/// Every explicit case formula against the general builder, pdf and cdf at 100
/// points. The exact check builds both sides over the rationals, requires equal
/// term lists and compares the evaluated values; the float check builds both in
/// `f64` and measures the gap against the summed term magnitudes.
pub fn case_formulas(seed: u64) -> Vec<Check> {
    let exact_name = "case formulas vs builder (exact construction)";
    let float_name = "case formulas vs builder (float construction, relative to term scale)";
    let configs = case_configs(seed);
    vec![
        settle(
            exact_name,
            CASE_TOLERANCE,
            case_formulas_exact(&configs, exact_name),
        ),
        settle(
            float_name,
            CASE_TOLERANCE,
            case_formulas_float(&configs, float_name),
        ),
    ]
}

fn case_formulas_exact(configs: &[CaseConfig], name: &str) -> Result<Check> {
    let q = |i: i64| Exact::new(i.into(), 4.into());
    let mut worst = 0.0f64;
    let mut mismatched = Vec::new();
    for config in configs {
        let (ms, case, built) = case_pair(config, q)?;
        if case.terms() != built.terms() {
            mismatched.push(ms.to_string());
        }
        let (case, built) = (to_float_law(&case)?, to_float_law(&built)?);
        for t in grid_100() {
            worst = worst
                .max((case.pdf(t)? - built.pdf(t)?).abs())
                .max((case.cdf(t) - built.cdf(t)).abs());
        }
    }
    let check = Check::within(name, worst, CASE_TOLERANCE);
    Ok(if mismatched.is_empty() {
        check.with_detail(format!(
            "{} configurations, all term lists identical",
            configs.len()
        ))
    } else {
        Check {
            pass: false,
            ..check
        }
        .with_detail(format!("term lists differ for {}", mismatched.join("; ")))
    })
}

fn case_formulas_float(configs: &[CaseConfig], name: &str) -> Result<Check> {
    let q = |i: i64| i as f64 / 4.0;
    let mut worst = 0.0f64;
    let mut worst_absolute = 0.0f64;
    let mut worst_config = String::new();
    for config in configs {
        let (ms, case, built) = case_pair(config, q)?;
        for t in grid_100() {
            let (pdf_scale, cdf_scale) = term_scale(&built, t)?;
            let dp = (case.pdf(t)? - built.pdf(t)?).abs();
            let dc = (case.cdf(t) - built.cdf(t)).abs();
            worst_absolute = worst_absolute.max(dp).max(dc);
            let rel = (dp / pdf_scale.max(1.0)).max(dc / cdf_scale.max(1.0));
            if rel > worst {
                worst = rel;
                worst_config = ms.to_string();
            }
        }
    }
    Ok(
        Check::within(name, worst, CASE_TOLERANCE).with_detail(format!(
            "{} configurations, worst {{{worst_config}}}, largest absolute gap {worst_absolute:e}",
            configs.len()
        )),
    )
}

/// Repeated-exponent CDF against the regularized upper incomplete gamma function.
pub fn gamma_cross_check() -> Check {
    let name = "repeated-exponent cdf vs incomplete gamma";
    settle(name, GAMMA_TOLERANCE, gamma_inner(name))
}

fn gamma_inner(name: &str) -> Result<Check> {
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 3.0] {
        for m in 1..=10 {
            let law = build_law(&BetaMultiset::repeated(alpha, m)?);
            for i in 1..=50 {
                let t = i as f64 / 50.0;
                worst = worst.max((law.cdf(t) - repeated_cdf_gamma(m, alpha, t)?).abs());
            }
        }
    }
    Ok(Check::within(name, worst, GAMMA_TOLERANCE))
}

pub fn dkw_tolerance(samples: usize) -> f64 {
    DKW_AT_MILLION * (1e6 / samples as f64).sqrt()
}

/// Kolmogorov distance between sampled products of uniform powers and the closed-form cdf.
pub fn dkw(seed: u64, samples: usize) -> Vec<Check> {
    let tolerance = dkw_tolerance(samples);
    DKW_MULTISETS
        .iter()
        .enumerate()
        .map(|(i, text)| {
            let name = format!("sampler sup-distance {{{text}}}");
            let result = text.parse::<Multiset64>().and_then(|ms| {
                let law = build_law(&ms);
                let batch = sample(&ms, samples, seed, i as u64)?;
                Ok(Check::within(
                    name.clone(),
                    batch.ks_distance(|t| law.cdf(t)),
                    tolerance,
                ))
            });
            settle(&name, tolerance, result)
        })
        .collect()
}

fn random_distinct(rng: &mut impl Rng, max_len: usize) -> Result<Multiset64> {
    let n = rng.random_range(1..=max_len);
    let mut pool: Vec<f64> = (2..=20).map(|i| i as f64 / 4.0).collect();
    pool.shuffle(rng);
    Multiset64::from_values(pool[..n].to_vec())
}

/// Direct time-change route against the coefficient decomposition for the standard triple.
pub fn transform_consistency(seed: u64) -> Check {
    let name = "transform: direct vs decomposition";
    settle(
        name,
        TRANSFORM_TOLERANCE,
        transform_consistency_inner(seed, name),
    )
}

fn transform_consistency_inner(seed: u64, name: &str) -> Result<Check> {
    let mut rng = stream_rng(seed, 5);
    let base = standard_triple();
    let radii: Vec<f64> = (1..=20).map(|i| 0.08 * i as f64).collect();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ms = random_distinct(&mut rng, 4)?;
        let direct = transform_multi(&base, &ms)?;
        let split = Decomposition::new(&base, &ms.distinct_values())?;
        for (a, b) in direct.shift().iter().zip(split.shift()) {
            worst = worst.max((a - b).abs());
        }
        for (a, b) in direct.covariance().iter().zip(split.covariance()) {
            worst = worst.max((a - b).abs());
        }
        for &r in &radii {
            let set = BallComplement::new(r)?;
            worst =
                worst.max((measure_eval(direct.measure(), &set) - split.measure_eval(&set)).abs());
        }
    }
    Ok(Check::within(name, worst, TRANSFORM_TOLERANCE))
}

/// `sum_j C_j Phi_j(y)` against the single quadrature over the product law.
pub fn weighted_logcf(seed: u64) -> Check {
    let name = "log-cf: coefficient sum vs quadrature";
    settle(name, LOGCF_TOLERANCE, weighted_logcf_inner(seed, name))
}

fn weighted_logcf_inner(seed: u64, name: &str) -> Result<Check> {
    let mut rng = stream_rng(seed, 6);
    let base = standard_triple();
    let exponent = exponent_of(&base);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let ms = random_distinct(&mut rng, 4)?;
        let split = Decomposition::new(&base, &ms.distinct_values())?;
        let spec = IntegralSpec::canonical(&ms);
        for y in y_grid() {
            worst =
                worst.max((split.exponent(&y)? - logcf_quadrature(&exponent, &spec, &y)?).norm());
        }
    }
    Ok(Check::within(name, worst, LOGCF_TOLERANCE))
}

/// All ordered lists of length 1 to 4 over [`COMPOSE_VALUES`].
pub fn compose_lists() -> Vec<Vec<f64>> {
    let mut lists: Vec<Vec<f64>> = vec![Vec::new()];
    let mut out = Vec::new();
    for _ in 0..4 {
        lists = lists
            .iter()
            .flat_map(|l| {
                COMPOSE_VALUES
                    .iter()
                    .map(move |&b| [l.as_slice(), &[b]].concat())
            })
            .collect();
        out.extend(lists.iter().cloned());
    }
    out
}

/// One mapping at a time against a single integral over the product law.
pub fn compose() -> Check {
    let name = "composition: nested vs single integral";
    let base = standard_triple();
    let ys = y_grid();
    let mut worst = 0.0f64;
    let mut worst_list = Vec::new();
    let lists = compose_lists();
    for list in &lists {
        match compose_residual(&base, list, &ys) {
            Ok(r) if r > worst || r.is_nan() => {
                worst = r;
                worst_list = list.clone();
            }
            Ok(_) => {}
            Err(e) => return Check::failed(name, LOGCF_TOLERANCE, format!("{list:?}: {e}")),
        }
    }
    Check::within(name, worst, LOGCF_TOLERANCE).with_detail(format!(
        "{} ordered lists, worst {worst_list:?}",
        lists.len()
    ))
}

pub fn run_suite(suite: Suite, seed: u64, samples: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Identities | Suite::All) {
        checks.extend(partition_of_unity(seed));
        checks.push(lagrange(seed));
        checks.push(two_block_identity(seed));
        checks.extend(case_formulas(seed));
        checks.push(gamma_cross_check());
        checks.push(transform_consistency(seed));
        checks.push(weighted_logcf(seed));
    }
    if matches!(suite, Suite::Mc | Suite::All) {
        checks.extend(dkw(seed, samples));
    }
    if matches!(suite, Suite::Compose | Suite::All) {
        checks.push(compose());
    }
    checks
}
