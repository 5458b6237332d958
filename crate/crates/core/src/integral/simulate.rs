//! Path simulation of `∫_(0,1] h(t) dY(r(t))` for finite atomic Lévy measures.
//!
//! The interval is cut into `N` cells of width `1/N`. The first cell is dropped
//! (its time-change mass `r(1/N)` is reported); on each remaining cell the
//! increment of `Y` over `Δr` is drawn exactly: drift `(a - sum_{|x|<=1} c x) Δr`,
//! a Gaussian with covariance `Δr R`, and a Poisson(`c Δr`) number of copies of
//! each atom `x`. The increment is weighted by `h` at the cell midpoint.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use super::IntegralSpec;
use crate::error::{invalid, Error, Result};
use crate::levy::{norm, LevyMeasure, LevyTriple};
use crate::rng::stream_rng;
use crate::scalar::Scalar;

pub const MIN_GRID: usize = 64;

/// Simulated integrals, one row of `dim` coordinates per path.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationBatch {
    pub dim: usize,
    pub samples: Vec<f64>,
    pub seed: u64,
    pub grid: usize,
    /// `r(1/N)`, the time-change mass of the dropped first cell.
    pub truncated_mass: f64,
}

impl SimulationBatch {
    pub fn paths(&self) -> usize {
        self.samples.len() / self.dim
    }

    pub fn path(&self, i: usize) -> &[f64] {
        &self.samples[i * self.dim..(i + 1) * self.dim]
    }

    /// Compensated per-coordinate mean.
    pub fn mean(&self) -> Vec<f64> {
        let n = self.paths() as f64;
        (0..self.dim)
            .map(|k| f64::sum_all((0..self.paths()).map(|i| self.samples[i * self.dim + k])) / n)
            .collect()
    }

    /// Per-coordinate standard error of the mean.
    pub fn standard_error(&self) -> Vec<f64> {
        let n = self.paths() as f64;
        self.mean()
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let ss = f64::sum_all(
                    (0..self.paths()).map(|i| (self.samples[i * self.dim + k] - m).powi(2)),
                );
                (ss / (n - 1.0)).sqrt() / n.sqrt()
            })
            .collect()
    }
}

/// Lower-triangular `L` with `L L^T = R` for a positive semidefinite `R`;
/// columns with a vanishing pivot are zeroed.
fn cholesky(dim: usize, r: &[f64]) -> Vec<f64> {
    let mut l = vec![0.0f64; dim * dim];
    for j in 0..dim {
        let diag = r[j * dim + j] - (0..j).map(|k| l[j * dim + k].powi(2)).sum::<f64>();
        if diag <= 1e-14 * r[j * dim + j].abs().max(f64::MIN_POSITIVE) {
            continue;
        }
        let d = diag.sqrt();
        l[j * dim + j] = d;
        for i in j + 1..dim {
            let s = r[i * dim + j] - (0..j).map(|k| l[i * dim + k] * l[j * dim + k]).sum::<f64>();
            l[i * dim + j] = s / d;
        }
    }
    l
}

struct Cell {
    h: f64,
    sd: f64,
    dr: f64,
    poisson: Vec<Option<Poisson<f64>>>,
}

/// Simulates `paths` realizations; path `i` uses the stream `(seed, i)`, so the
/// result does not depend on how paths are scheduled across threads.
pub fn simulate_integral(
    triple: &LevyTriple<f64>,
    spec: &IntegralSpec<f64>,
    paths: usize,
    grid: usize,
    seed: u64,
) -> Result<SimulationBatch> {
    if grid < MIN_GRID {
        return Err(invalid(format!(
            "grid size {grid} is below the minimum {MIN_GRID}"
        )));
    }
    if paths == 0 {
        return Err(invalid("path count must be at least 1"));
    }
    let LevyMeasure::FiniteAtomic(atoms) = triple.measure() else {
        return Err(Error::Unsupported(
            "simulation needs a finite atomic Lévy measure".into(),
        ));
    };
    let dim = triple.dim();
    let mut drift = triple.shift().to_vec();
    for a in atoms {
        if norm(&a.point) <= 1.0 {
            for (d, x) in drift.iter_mut().zip(&a.point) {
                *d -= a.mass * x;
            }
        }
    }
    let chol = cholesky(dim, triple.covariance());
    let has_gaussian = chol.iter().any(|&v| v != 0.0);
    let r = spec.timechange();
    let n = grid as f64;
    let mut cells = Vec::with_capacity(grid - 1);
    for i in 1..grid {
        let (lo, hi) = (i as f64 / n, (i + 1) as f64 / n);
        let dr = (r.cdf(hi) - r.cdf(lo)).max(0.0);
        let poisson = atoms
            .iter()
            .map(|a| {
                let rate = a.mass * dr;
                if rate > 0.0 {
                    Poisson::new(rate)
                        .map(Some)
                        .map_err(|e| Error::Numeric(format!("Poisson rate {rate}: {e}")))
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<_>>()?;
        cells.push(Cell {
            h: spec.h(0.5 * (lo + hi)),
            sd: dr.sqrt(),
            dr,
            poisson,
        });
    }
    let truncated_mass = r.cdf(1.0 / n);

    let rows: Vec<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = stream_rng(seed, path as u64);
            let mut acc = vec![0.0; dim];
            let mut z = vec![0.0; dim];
            let mut inc = vec![0.0; dim];
            for cell in &cells {
                for (v, d) in inc.iter_mut().zip(&drift) {
                    *v = d * cell.dr;
                }
                if has_gaussian {
                    for zk in z.iter_mut() {
                        *zk = rng.sample::<f64, _>(StandardNormal);
                    }
                    for i in 0..dim {
                        let g: f64 = (0..=i).map(|k| chol[i * dim + k] * z[k]).sum();
                        inc[i] += cell.sd * g;
                    }
                }
                for (a, p) in atoms.iter().zip(&cell.poisson) {
                    if let Some(p) = p {
                        let count = p.sample(&mut rng);
                        if count > 0.0 {
                            for (v, x) in inc.iter_mut().zip(&a.point) {
                                *v += count * x;
                            }
                        }
                    }
                }
                for (s, v) in acc.iter_mut().zip(&inc) {
                    *s += cell.h * v;
                }
            }
            acc
        })
        .collect();
    let samples: Vec<f64> = rows.into_iter().flatten().collect();
    if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!(
            "non-finite simulated value on path {}",
            bad / dim
        )));
    }
    Ok(SimulationBatch {
        dim,
        samples,
        seed,
        grid,
        truncated_mass,
    })
}
