//! Explicit formulas for special multisets, used to cross-check [`build_law`](super::build_law).

use num_traits::Float;

use super::{ClosedFormLaw, Term};
use crate::coefficients::{big_c, d_coeff, e_coeff};
use crate::error::{invalid, Result};
use crate::multiset::BetaMultiset;
use crate::scalar::{factorial, pochhammer, Real, Scalar};

/// Multisets with a known closed-form density.
#[derive(Clone, Debug, PartialEq)]
pub enum CaseSpec<T> {
    /// Distinct `betas` plus `alpha` repeated `m` times.
    DistinctPlusBlock { betas: Vec<T>, alpha: T, m: u32 },
    /// `alpha` repeated `k` times and `gamma` repeated `l` times.
    TwoBlocks { alpha: T, k: u32, gamma: T, l: u32 },
    /// Distinct `betas`, `alpha` repeated `m` times, `gamma` repeated `l` times.
    DistinctPlusTwoBlocks {
        betas: Vec<T>,
        alpha: T,
        m: u32,
        gamma: T,
        l: u32,
    },
}

impl<T: Scalar> CaseSpec<T> {
    pub fn multiset(&self) -> Result<BetaMultiset<T>> {
        let mut entries: Vec<(T, u32)> = Vec::new();
        match self {
            CaseSpec::DistinctPlusBlock { betas, alpha, m } => {
                entries.extend(betas.iter().map(|b| (b.clone(), 1)));
                entries.push((alpha.clone(), *m));
            }
            CaseSpec::TwoBlocks { alpha, k, gamma, l } => {
                entries.push((alpha.clone(), *k));
                entries.push((gamma.clone(), *l));
            }
            CaseSpec::DistinctPlusTwoBlocks {
                betas,
                alpha,
                m,
                gamma,
                l,
            } => {
                entries.extend(betas.iter().map(|b| (b.clone(), 1)));
                entries.push((alpha.clone(), *m));
                entries.push((gamma.clone(), *l));
            }
        }
        BetaMultiset::new(entries)
    }
}

fn block<T: Scalar>(a: &T, m: u32) -> Result<ClosedFormLaw<T>> {
    Ok(ClosedFormLaw::repeated_density(a.clone(), m)?.untagged())
}

fn require_distinct<T: Scalar>(values: &[&T]) -> Result<()> {
    for (i, a) in values.iter().enumerate() {
        if !a.is_positive_value() {
            return Err(invalid(format!("exponent {a} is not strictly positive")));
        }
        if values[..i].contains(a) {
            return Err(invalid(format!(
                "exponent {a} appears in more than one role"
            )));
        }
    }
    Ok(())
}

fn sum_laws<T: Scalar>(
    parts: impl IntoIterator<Item = ClosedFormLaw<T>>,
) -> Result<ClosedFormLaw<T>> {
    let terms: Vec<Term<T>> = parts.into_iter().flat_map(|p| p.terms().to_vec()).collect();
    ClosedFormLaw::from_terms(terms)
}

/// `alpha x^(alpha-1) (-alpha log x)^(m-1) / (m-1)!`.
pub fn repeated_law<T: Scalar>(alpha: T, m: u32) -> Result<ClosedFormLaw<T>> {
    require_distinct(&[&alpha])?;
    ClosedFormLaw::repeated_density(alpha, m)
}

/// `sum_j C_j beta_j x^(beta_j - 1)` for distinct exponents.
pub fn distinct_law<T: Scalar>(betas: &[T]) -> Result<ClosedFormLaw<T>> {
    let c = big_c(betas)?;
    let law = ClosedFormLaw::from_terms(betas.iter().zip(c.values).map(|(b, cj)| Term {
        coef: cj * b.clone(),
        exponent: b.clone(),
        logpow: 0,
    }))?;
    Ok(law.tagged(BetaMultiset::from_values(betas.iter().cloned())?))
}

/// Distinct `betas` plus the block `alpha x m`:
/// `sum_j d_j^(m) f_{beta_j} - alpha^-1 sum_{k<m} (sum_j beta_j d_j^(m-k)) f_{alpha x (k+1)}`.
pub fn distinct_plus_block<T: Scalar>(betas: &[T], alpha: &T, m: u32) -> Result<ClosedFormLaw<T>> {
    distinct_plus_block_with(betas, alpha, m, |a, s| block(a, s))
}

/// The same recursion with every `f_{.}` replaced by `f_{., gamma x l}`.
pub fn distinct_plus_two_blocks<T: Scalar>(
    betas: &[T],
    alpha: &T,
    m: u32,
    gamma: &T,
    l: u32,
) -> Result<ClosedFormLaw<T>> {
    let mut roles: Vec<&T> = betas.iter().collect();
    roles.push(alpha);
    roles.push(gamma);
    require_distinct(&roles)?;
    if l == 0 {
        return Err(invalid("block multiplicity must be at least 1"));
    }
    distinct_plus_block_with(betas, alpha, m, |a, s| {
        two_blocks(a, s, gamma, l).map(ClosedFormLaw::untagged)
    })
}

fn distinct_plus_block_with<T: Scalar>(
    betas: &[T],
    alpha: &T,
    m: u32,
    mut f_alpha_block: impl FnMut(&T, u32) -> Result<ClosedFormLaw<T>>,
) -> Result<ClosedFormLaw<T>> {
    let mut roles: Vec<&T> = betas.iter().collect();
    roles.push(alpha);
    require_distinct(&roles)?;
    if betas.is_empty() || m == 0 {
        return Err(invalid(
            "need at least one distinct exponent and a block of size at least 1",
        ));
    }
    let mut parts = Vec::new();
    let dm = d_coeff(betas, alpha, m)?;
    for (b, d) in betas.iter().zip(&dm.values) {
        parts.push(f_alpha_block(b, 1)?.scaled(d));
    }
    for k in 0..m {
        let d = d_coeff(betas, alpha, m - k)?;
        let weight = T::sum_all(betas.iter().zip(d.values).map(|(b, dj)| b.clone() * dj));
        parts.push(f_alpha_block(alpha, k + 1)?.scaled(&(-(weight / alpha.clone()))));
    }
    let mut all = betas.to_vec();
    all.extend(std::iter::repeat_n(alpha.clone(), m as usize));
    Ok(sum_laws(parts)?.tagged(BetaMultiset::from_values(all)?))
}

/// Two repeated blocks `alpha x k` and `gamma x l`, via the `e_{r,k+l}` coefficients.
pub fn two_blocks<T: Scalar>(alpha: &T, k: u32, gamma: &T, l: u32) -> Result<ClosedFormLaw<T>> {
    require_distinct(&[alpha, gamma])?;
    let e = e_coeff::<T>(k, l)?;
    let a = alpha.clone();
    let g = gamma.clone();
    let prefactor = (a.clone() / (a.clone() - g.clone())).powi_int(k)
        * (g.clone() / (g.clone() - a.clone())).powi_int(l);
    let ratio_a = (a.clone() - g.clone()) / a.clone();
    let ratio_g = (g.clone() - a.clone()) / g.clone();
    let l_t = T::from_int(l as i64);
    let mut parts = Vec::new();
    for s in 1..=k {
        let w = pochhammer(&l_t, k - s) / factorial::<T>(k - s) * ratio_a.powi_int(s);
        parts.push(block(alpha, s)?.scaled(&(w * prefactor.clone())));
    }
    for (i, er) in e.into_iter().enumerate() {
        let r = i as u32 + 1;
        let w = er * ratio_g.powi_int(r);
        parts.push(block(gamma, r)?.scaled(&(-(w * prefactor.clone()))));
    }
    let source = BetaMultiset::new([(a, k), (g, l)])?;
    Ok(sum_laws(parts)?.tagged(source))
}

pub fn case_law<T: Scalar>(spec: &CaseSpec<T>) -> Result<ClosedFormLaw<T>> {
    match spec {
        CaseSpec::DistinctPlusBlock { betas, alpha, m } => distinct_plus_block(betas, alpha, *m),
        CaseSpec::TwoBlocks { alpha, k, gamma, l } => two_blocks(alpha, *k, gamma, *l),
        CaseSpec::DistinctPlusTwoBlocks {
            betas,
            alpha,
            m,
            gamma,
            l,
        } => distinct_plus_two_blocks(betas, alpha, *m, gamma, *l),
    }
}

fn product_precheck<T: Scalar>(a: &T, b: &T, p: u32, q: u32) -> Result<T> {
    if p == 0 || q == 0 {
        return Err(invalid("block sizes must be at least 1"));
    }
    if *a == T::zero() || *b == T::zero() {
        return Err(invalid("block exponents must be nonzero"));
    }
    let s = a.clone() + b.clone();
    if s == T::zero() {
        return Err(invalid(format!("exponents {a} and {b} sum to zero")));
    }
    Ok(s)
}

/// Expands `f_{a x p} * F_{b x q}` into the term family:
/// `(a/(a+b))^p sum_{j<q} (p)_j / j! (b/(a+b))^j f_{(a+b) x (p+j)}`.
pub fn pdf_cdf_product_expansion<T: Scalar>(
    a: &T,
    p: u32,
    b: &T,
    q: u32,
) -> Result<ClosedFormLaw<T>> {
    let s = product_precheck(a, b, p, q)?;
    let lead = (a.clone() / s.clone()).powi_int(p);
    let ratio = b.clone() / s.clone();
    let p_t = T::from_int(p as i64);
    let parts = (0..q)
        .map(|j| {
            let w = lead.clone() * pochhammer(&p_t, j) / factorial::<T>(j) * ratio.powi_int(j);
            Ok(block(&s, p + j)?.scaled(&w))
        })
        .collect::<Result<Vec<_>>>()?;
    sum_laws(parts)
}

/// The equivalent re-indexed form
/// `(a/b)^p sum_{j=p}^{p+q-1} (p)_{j-p} / (j-p)! (b/(a+b))^j f_{(a+b) x j}`.
pub fn pdf_cdf_product_expansion_shifted<T: Scalar>(
    a: &T,
    p: u32,
    b: &T,
    q: u32,
) -> Result<ClosedFormLaw<T>> {
    let s = product_precheck(a, b, p, q)?;
    let lead = (a.clone() / b.clone()).powi_int(p);
    let ratio = b.clone() / s.clone();
    let p_t = T::from_int(p as i64);
    let parts = (p..p + q)
        .map(|j| {
            let w =
                lead.clone() * pochhammer(&p_t, j - p) / factorial::<T>(j - p) * ratio.powi_int(j);
            Ok(block(&s, j)?.scaled(&w))
        })
        .collect::<Result<Vec<_>>>()?;
    sum_laws(parts)
}

/// Maximum deviations of two alternative CDF expressions for the
/// distinct-plus-block multiset from the built CDF.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitBlockDiscrepancy<T> {
    /// `sum_j d_j^(m) F_{beta_j} + F_{alpha x m} - sum_j d_j^(m) F_{beta_j} F_{(alpha-beta_j) x m}`.
    pub factored: T,
    /// The same with `F_{beta_j}` in the last product replaced by `F_{alpha}`.
    pub as_printed: T,
}

/// Compares both factored CDF forms against the built law on `grid`.
pub fn split_block_cdf_discrepancy<T: Real>(
    betas: &[T],
    alpha: T,
    m: u32,
    grid: &[T],
) -> Result<SplitBlockDiscrepancy<T>> {
    let reference = distinct_plus_block(betas, &alpha, m)?;
    let d = d_coeff(betas, &alpha, m)?;
    let alpha_block = block(&alpha, m)?;
    let single_alpha = block(&alpha, 1)?;
    let mut out = SplitBlockDiscrepancy {
        factored: T::zero(),
        as_printed: T::zero(),
    };
    for &s in grid {
        let exact = reference.cdf(s);
        let mut factored = alpha_block.primitive(s);
        let mut printed = factored;
        for (b, dj) in betas.iter().zip(&d.values) {
            let fb = block(b, 1)?.primitive(s);
            let shifted = block(&(alpha - *b), m)?.primitive(s);
            factored = factored + *dj * fb - *dj * fb * shifted;
            printed = printed + *dj * fb - *dj * shifted * single_alpha.primitive(s);
        }
        out.factored = Float::max(out.factored, Float::abs(factored - exact));
        out.as_printed = Float::max(out.as_printed, Float::abs(printed - exact));
    }
    Ok(out)
}
