//! Coefficient families of the time-change laws and the Lagrange-type
//! identities they satisfy.
//!
//! Everything here is generic over [`Scalar`]: with [`BigRational`] inputs the
//! results are exact, with `f64` inputs sums use compensated addition and
//! clustered exponents are rejected (see [`CoefficientOptions`]).
//!
//! [`BigRational`]: num_rational::BigRational

use num_complex::Complex;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::multiset::BetaMultiset;
use crate::scalar::{factorial, pochhammer, Real, Scalar};

/// Coefficients aligned index-for-index with the distinct exponents they weight.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector<T> {
    pub exponents: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> CoefficientVector<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> T {
        T::sum_all(self.values.iter().cloned())
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(Scalar::magnitude)
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientOptions {
    /// Smallest admissible `|b_i - b_j| / max(b_i, b_j)` in floating-point mode.
    /// Ignored for exact scalars.
    pub min_relative_gap: f64,
}

impl Default for CoefficientOptions {
    fn default() -> Self {
        Self {
            min_relative_gap: 1e-9,
        }
    }
}

fn validate_distinct<T: Scalar>(betas: &[T], opts: &CoefficientOptions) -> Result<()> {
    if betas.is_empty() {
        return Err(invalid("exponent list is empty"));
    }
    for b in betas {
        if !b.is_positive_value() {
            return Err(invalid(format!("exponent {b} is not strictly positive")));
        }
    }
    for (i, a) in betas.iter().enumerate() {
        for b in &betas[i + 1..] {
            if a == b {
                return Err(invalid(format!("duplicate exponent {a}")));
            }
            if !T::EXACT {
                let (x, y) = (a.to_f64_lossy(), b.to_f64_lossy());
                let gap = (x - y).abs() / x.abs().max(y.abs());
                if gap < opts.min_relative_gap {
                    return Err(Error::Clustered {
                        first: x,
                        second: y,
                        min_gap: opts.min_relative_gap,
                    });
                }
            }
        }
    }
    Ok(())
}

/// `C_j = prod_{k != j} b_k / (b_k - b_j)`; these sum to one.
pub fn big_c<T: Scalar>(betas: &[T]) -> Result<CoefficientVector<T>> {
    big_c_with(betas, &CoefficientOptions::default())
}

pub fn big_c_with<T: Scalar>(
    betas: &[T],
    opts: &CoefficientOptions,
) -> Result<CoefficientVector<T>> {
    validate_distinct(betas, opts)?;
    Ok(CoefficientVector {
        exponents: betas.to_vec(),
        values: big_c_unchecked(betas),
    })
}

fn big_c_unchecked<T: Scalar>(betas: &[T]) -> Vec<T> {
    (0..betas.len())
        .map(|j| {
            betas
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(T::one(), |acc, (_, bk)| {
                    acc * bk.clone() / (bk.clone() - betas[j].clone())
                })
        })
        .collect()
}

/// `c_j = prod_{k != j} 1 / (b_k - b_j)`.
pub fn little_c<T: Scalar>(betas: &[T]) -> Result<CoefficientVector<T>> {
    little_c_with(betas, &CoefficientOptions::default())
}

pub fn little_c_with<T: Scalar>(
    betas: &[T],
    opts: &CoefficientOptions,
) -> Result<CoefficientVector<T>> {
    validate_distinct(betas, opts)?;
    let values = (0..betas.len())
        .map(|j| {
            betas
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(T::one(), |acc, (_, bk)| {
                    acc / (bk.clone() - betas[j].clone())
                })
        })
        .collect();
    Ok(CoefficientVector {
        exponents: betas.to_vec(),
        values,
    })
}

/// `d_j^{(l)} = C_j (alpha / (alpha - b_j))^l`.
pub fn d_coeff<T: Scalar>(betas: &[T], alpha: &T, l: u32) -> Result<CoefficientVector<T>> {
    let c = big_c(betas)?;
    if !alpha.is_positive_value() {
        return Err(invalid(format!("alpha {alpha} is not strictly positive")));
    }
    if let Some(b) = betas.iter().find(|b| *b == alpha) {
        return Err(invalid(format!(
            "alpha {alpha} coincides with exponent {b}"
        )));
    }
    let values = c
        .values
        .into_iter()
        .zip(betas)
        .map(|(cj, bj)| cj * (alpha.clone() / (alpha.clone() - bj.clone())).powi_int(l))
        .collect();
    Ok(CoefficientVector {
        exponents: betas.to_vec(),
        values,
    })
}

/// `e_{r,k+l}` for `r = 1 ..= k+l-1` (index 0 holds `r = 1`).
pub fn e_coeff<T: Scalar>(k: u32, l: u32) -> Result<Vec<T>> {
    if k < 1 || l < 1 {
        return Err(invalid(format!(
            "e coefficients need k, l >= 1 (got k={k}, l={l})"
        )));
    }
    let lt = T::from_int(l as i64);
    Ok((1..k + l)
        .map(|r| {
            let terms = (1..=r.min(k)).map(|s| {
                let st = T::from_int(s as i64);
                let mag = pochhammer(&st, r - s) / factorial::<T>(r - s) * pochhammer(&lt, k - s)
                    / factorial::<T>(k - s);
                if s % 2 == 1 {
                    -mag
                } else {
                    mag
                }
            });
            T::sum_all(terms)
        })
        .collect())
}

/// `rho(b) = prod_{c != b} c / (c - b)` over the multiset, counting multiplicity.
pub fn rho_at<T: Scalar>(multiset: &BetaMultiset<T>, b: &T) -> Result<T> {
    if multiset.multiplicity_of(b) == 0 {
        return Err(invalid(format!(
            "{b} is not an element of the multiset {multiset}"
        )));
    }
    Ok(multiset
        .entries()
        .iter()
        .filter(|(c, _)| c != b)
        .fold(T::one(), |acc, (c, m)| {
            acc * (c.clone() / (c.clone() - b.clone())).powi_int(*m)
        }))
}

/// `rho` at every distinct value, in canonical order.
pub fn rho<T: Scalar>(multiset: &BetaMultiset<T>) -> Vec<(T, T)> {
    multiset
        .distinct_values()
        .into_iter()
        .map(|b| {
            let r = rho_at(multiset, &b).expect("value taken from the multiset");
            (b, r)
        })
        .collect()
}

/// The bracketed two-block expression that equals one for every `k, l >= 1`
/// and distinct positive `alpha`, `gamma`.
pub fn two_block_unity<T: Scalar>(alpha: &T, gamma: &T, k: u32, l: u32) -> Result<T> {
    if alpha == gamma {
        return Err(invalid(format!(
            "alpha and gamma must differ (both {alpha})"
        )));
    }
    if !alpha.is_positive_value() || !gamma.is_positive_value() {
        return Err(invalid("alpha and gamma must be strictly positive"));
    }
    let e = e_coeff::<T>(k, l)?;
    let (a, g) = (alpha.clone(), gamma.clone());
    let lt = T::from_int(l as i64);
    let prefactor = (a.clone() / (a.clone() - g.clone())).powi_int(k)
        * (g.clone() / (g.clone() - a.clone())).powi_int(l);
    let alpha_ratio = (a.clone() - g.clone()) / a.clone();
    let gamma_ratio = (g.clone() - a.clone()) / g.clone();
    let first = T::sum_all(
        (1..=k).map(|s| pochhammer(&lt, k - s) / factorial::<T>(k - s) * alpha_ratio.powi_int(s)),
    );
    let second = T::sum_all(
        e.iter()
            .enumerate()
            .map(|(i, er)| er.clone() * gamma_ratio.powi_int(i as u32 + 1)),
    );
    Ok(prefactor * (first - second))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangeCheck<T> {
    /// `|sum_i prod_{k != i} (z_k - z) / (z_k - z_i) - 1|`.
    pub residual: T,
    /// `sum_i |prod_{k != i} ...|`, the scale for a relative bound.
    pub scale: T,
}

impl<T: Real> LagrangeCheck<T> {
    pub fn relative(&self) -> T {
        self.residual / Float::max(self.scale, T::one())
    }
}

pub fn lagrange_identity_check<T: Real>(
    zs: &[Complex<T>],
    z: Complex<T>,
) -> Result<LagrangeCheck<T>> {
    if zs.is_empty() {
        return Err(invalid("node list is empty"));
    }
    for (i, a) in zs.iter().enumerate() {
        if let Some(b) = zs[i + 1..].iter().find(|b| *b == a) {
            return Err(invalid(format!("duplicate node {b}")));
        }
    }
    let terms: Vec<Complex<T>> = (0..zs.len())
        .map(|i| {
            zs.iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .fold(Complex::new(T::one(), T::zero()), |acc, (_, zk)| {
                    acc * (zk - z) / (zk - zs[i])
                })
        })
        .collect();
    let re = T::sum_all(terms.iter().map(|t| t.re));
    let im = T::sum_all(terms.iter().map(|t| t.im));
    let residual = Complex::new(re - T::one(), im).norm();
    let scale = T::sum_all(terms.iter().map(|t| t.norm()));
    Ok(LagrangeCheck { residual, scale })
}

/// Residual of the canonical decomposition of one; zero in exact arithmetic.
pub fn lagrange_identity_residual<T: Real>(zs: &[Complex<T>], z: Complex<T>) -> Result<T> {
    lagrange_identity_check(zs, z).map(|c| c.residual)
}
