//! Empirical characteristic functions and their comparison with analytic log-cfs.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::levy::dot;
use crate::scalar::Scalar;

pub const MIN_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCf {
    pub ys: Vec<Vec<f64>>,
    pub estimates: Vec<Complex<f64>>,
    /// `1/sqrt(n)`, a bound on the standard error of each component.
    pub standard_errors: Vec<f64>,
    pub paths: usize,
    pub seed: Option<u64>,
}

/// Mean of `e^{i<y, X>}` over rows of `samples` (row-major, `dim` columns).
pub fn empirical_cf(
    samples: &[f64],
    dim: usize,
    ys: &[Vec<f64>],
    seed: Option<u64>,
) -> Result<EmpiricalCf> {
    if dim == 0 || samples.len() % dim != 0 {
        return Err(invalid(format!(
            "{} sample values do not split into rows of {dim}",
            samples.len()
        )));
    }
    let n = samples.len() / dim;
    if n < MIN_SAMPLES {
        return Err(invalid(format!(
            "empirical cf needs at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    let mut estimates = Vec::with_capacity(ys.len());
    for y in ys {
        if y.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: y.len(),
            });
        }
        let phases: Vec<f64> = samples.chunks_exact(dim).map(|x| dot(y, x)).collect();
        let re = f64::sum_all(phases.iter().map(|p| p.cos())) / n as f64;
        let im = f64::sum_all(phases.iter().map(|p| p.sin())) / n as f64;
        estimates.push(Complex::new(re, im));
    }
    let se = 1.0 / (n as f64).sqrt();
    Ok(EmpiricalCf {
        ys: ys.to_vec(),
        estimates,
        standard_errors: vec![se; ys.len()],
        paths: n,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CfPoint {
    pub y: Vec<f64>,
    /// `[re, im]`.
    pub estimate: [f64; 2],
    pub standard_error: f64,
    /// `exp(log-cf)` as `[re, im]`.
    pub analytic: [f64; 2],
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CfReport {
    pub paths: usize,
    pub seed: Option<u64>,
    pub z: f64,
    pub max_deviation: f64,
    pub pass: bool,
    pub points: Vec<CfPoint>,
}

/// Flags every grid point with `|estimate - exp(logcf(y))| > z * SE`.
pub fn cf_compare(
    emp: &EmpiricalCf,
    logcf: &mut dyn FnMut(&[f64]) -> Result<Complex<f64>>,
    z: f64,
) -> Result<CfReport> {
    let mut points = Vec::with_capacity(emp.ys.len());
    for ((y, est), se) in emp.ys.iter().zip(&emp.estimates).zip(&emp.standard_errors) {
        let analytic = logcf(y)?.exp();
        let deviation = (est - analytic).norm() / se;
        points.push(CfPoint {
            y: y.clone(),
            estimate: [est.re, est.im],
            standard_error: *se,
            analytic: [analytic.re, analytic.im],
            deviation,
            pass: deviation <= z,
        });
    }
    let max_deviation = points.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let pass = points.iter().all(|p| p.pass);
    Ok(CfReport {
        paths: emp.paths,
        seed: emp.seed,
        z,
        max_deviation,
        pass,
        points,
    })
}
