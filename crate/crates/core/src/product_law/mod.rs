//! Closed-form laws of products of powers of independent uniforms.
//!
//! A [`ClosedFormLaw`] is a density on `(0, 1]` of the form
//!
//! ```text
//! f(x) = sum_i coef_i * x^(exponent_i - 1) * (-log x)^(logpow_i)
//! ```
//!
//! The family is closed under the mixing step `f -> b x^(b-1) ∫_x^1 f(t) t^(-b) dt`,
//! which is the density of `X * U^(1/b)` when `X` has density `f`. Starting
//! from `b x^(b-1)` and mixing one exponent at a time yields the exact law of
//! `U_1^(1/b_1) ... U_K^(1/b_K)` for any multiset, repeated values included.
//! Its CDF is the time change `r` of the composed random integral mapping.

mod cases;
mod oracle;
mod sample;

pub use cases::{
    case_law, distinct_law, distinct_plus_block, distinct_plus_two_blocks,
    pdf_cdf_product_expansion, pdf_cdf_product_expansion_shifted, repeated_law,
    split_block_cdf_discrepancy, two_blocks, CaseSpec,
};
pub use oracle::{pdf_numeric_oracle, repeated_cdf_gamma};
pub use sample::{sample, SampleBatch};

use std::cmp::Ordering;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::multiset::BetaMultiset;
use crate::quadrature::{AdaptiveQuadrature, QuadEstimate, QuadValue};
use crate::scalar::{factorial, Real, Scalar};

/// Power `k = SUBSTITUTION_POWER + j` in the per-term substitution `s = u^(k/e)`.
const SUBSTITUTION_POWER: i32 = 2;

/// One summand `coef * x^(exponent - 1) * (-log x)^logpow`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<T> {
    pub coef: T,
    pub exponent: T,
    pub logpow: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormLaw<T> {
    terms: Vec<Term<T>>,
    source: Option<BetaMultiset<T>>,
}

fn term_order<T: Scalar>(a: &Term<T>, b: &Term<T>) -> Ordering {
    a.exponent
        .partial_cmp(&b.exponent)
        .unwrap_or(Ordering::Equal)
        .then(a.logpow.cmp(&b.logpow))
}

impl<T: Scalar> ClosedFormLaw<T> {
    /// Auxiliary (untagged) combination of terms. Terms sharing an
    /// `(exponent, logpow)` pair are merged; exact zeros are dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = Term<T>>) -> Result<Self> {
        let terms: Vec<Term<T>> = terms.into_iter().collect();
        if let Some(t) = terms.iter().find(|t| t.exponent == T::zero()) {
            return Err(invalid(format!(
                "term exponent must be nonzero (coefficient {})",
                t.coef
            )));
        }
        Ok(Self {
            terms: merge(terms),
            source: None,
        })
    }

    fn genuine(terms: Vec<Term<T>>, source: BetaMultiset<T>) -> Self {
        Self {
            terms: merge(terms),
            source: Some(source),
        }
    }

    /// Density `alpha x^(alpha-1)` of `U^(1/alpha)`.
    pub fn single(alpha: T) -> Result<Self> {
        let source = BetaMultiset::single(alpha.clone())?;
        Ok(Self::genuine(
            vec![Term {
                coef: alpha.clone(),
                exponent: alpha,
                logpow: 0,
            }],
            source,
        ))
    }

    /// The function `a x^(a-1) (-a log x)^(m-1) / (m-1)!`. Genuine for `a > 0`;
    /// for negative `a` it is the auxiliary function with the same formula.
    pub fn repeated_density(a: T, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(invalid("block multiplicity must be at least 1"));
        }
        let term = Term {
            coef: a.powi_int(m) / factorial::<T>(m - 1),
            exponent: a.clone(),
            logpow: m - 1,
        };
        if a.is_positive_value() {
            Ok(Self::genuine(vec![term], BetaMultiset::repeated(a, m)?))
        } else {
            Self::from_terms([term])
        }
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    /// The multiset whose product law this is, when built as one.
    pub fn source(&self) -> Option<&BetaMultiset<T>> {
        self.source.as_ref()
    }

    pub fn is_genuine(&self) -> bool {
        self.source.is_some()
    }

    /// Drops the genuine-law tag.
    pub fn untagged(mut self) -> Self {
        self.source = None;
        self
    }

    pub(crate) fn tagged(mut self, source: BetaMultiset<T>) -> Self {
        self.source = Some(source);
        self
    }

    pub fn scaled(&self, factor: &T) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coef: t.coef.clone() * factor.clone(),
                ..t.clone()
            })
            .collect();
        Self {
            terms: merge(terms),
            source: None,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .cloned()
            .collect();
        Self {
            terms: merge(terms),
            source: None,
        }
    }

    /// `∫_0^1 f`, in closed form; requires every exponent to be positive.
    pub fn total_mass(&self) -> Result<T> {
        if let Some(t) = self.terms.iter().find(|t| !t.exponent.is_positive_value()) {
            return Err(invalid(format!(
                "total mass diverges for exponent {}",
                t.exponent
            )));
        }
        Ok(T::sum_all(self.terms.iter().map(|t| {
            t.coef.clone() * factorial::<T>(t.logpow) / t.exponent.powi_int(t.logpow + 1)
        })))
    }

    /// `Σ ∫_0^1 |term|`. Floating-point evaluations of the density lose about
    /// `eps` times this relative to the unit mass.
    pub fn absolute_mass(&self) -> Result<T> {
        if let Some(t) = self.terms.iter().find(|t| !t.exponent.is_positive_value()) {
            return Err(invalid(format!(
                "absolute mass diverges for exponent {}",
                t.exponent
            )));
        }
        Ok(T::sum_all(self.terms.iter().map(|t| {
            t.coef.magnitude() * factorial::<T>(t.logpow) / t.exponent.powi_int(t.logpow + 1)
        })))
    }

    /// `∫_0^1 x^k f(x) dx`; with `k = 1` this is the mean.
    pub fn moment(&self, k: &T) -> Result<T> {
        self.shifted(k)?.total_mass()
    }

    /// The function `x^k f(x)`, whose antiderivative gives partial moments.
    pub fn shifted(&self, k: &T) -> Result<Self> {
        Self::from_terms(self.terms.iter().map(|t| Term {
            exponent: t.exponent.clone() + k.clone(),
            ..t.clone()
        }))
    }

    /// Density of `X * U^(1/beta)` where `X` has this density and `U` is an independent uniform.
    pub fn mix_in(&self, beta: &T) -> Result<Self> {
        if !beta.is_positive_value() {
            return Err(invalid(format!("exponent {beta} is not strictly positive")));
        }
        let mut out = Vec::with_capacity(self.terms.len() * 3);
        for t in &self.terms {
            let a = t.exponent.clone() - beta.clone();
            let cb = t.coef.clone() * beta.clone();
            if a == T::zero() {
                let j1 = t.logpow + 1;
                out.push(Term {
                    coef: cb / T::from_int(j1 as i64),
                    exponent: beta.clone(),
                    logpow: j1,
                });
                continue;
            }
            let jf = factorial::<T>(t.logpow);
            out.push(Term {
                coef: cb.clone() * jf.clone() / a.powi_int(t.logpow + 1),
                exponent: beta.clone(),
                logpow: 0,
            });
            for k in 0..=t.logpow {
                out.push(Term {
                    coef: -(cb.clone() * jf.clone()
                        / (factorial::<T>(k) * a.powi_int(t.logpow + 1 - k))),
                    exponent: t.exponent.clone(),
                    logpow: k,
                });
            }
        }
        let source = match &self.source {
            Some(s) => Some(s.union(&BetaMultiset::single(beta.clone())?)),
            None => None,
        };
        Ok(Self {
            terms: merge(out),
            source,
        })
    }
}

fn merge<T: Scalar>(mut terms: Vec<Term<T>>) -> Vec<Term<T>> {
    terms.sort_by(term_order);
    let mut out: Vec<Term<T>> = Vec::with_capacity(terms.len());
    let mut run: Vec<T> = Vec::new();
    let flush = |out: &mut Vec<Term<T>>, run: &mut Vec<T>| {
        if let Some(last) = out.last_mut() {
            last.coef = T::sum_all(run.drain(..));
            if T::EXACT && last.coef == T::zero() {
                out.pop();
            }
        }
    };
    for t in terms {
        let same = out
            .last()
            .is_some_and(|l| l.exponent == t.exponent && l.logpow == t.logpow);
        if !same {
            flush(&mut out, &mut run);
            out.push(Term {
                coef: T::zero(),
                ..t.clone()
            });
        }
        run.push(t.coef);
    }
    flush(&mut out, &mut run);
    out
}

/// Exact law of the product over the multiset, mixing values in ascending order.
pub fn build_law<T: Scalar>(multiset: &BetaMultiset<T>) -> ClosedFormLaw<T> {
    build_law_ordered(&multiset.expanded()).expect("multiset values are valid exponents")
}

/// Same law, mixing exponents in the given order. The result does not depend
/// on the order beyond floating-point rounding.
pub fn build_law_ordered<T: Scalar>(values: &[T]) -> Result<ClosedFormLaw<T>> {
    let (first, rest) = values
        .split_first()
        .ok_or_else(|| invalid("exponent list is empty"))?;
    let mut law = ClosedFormLaw::single(first.clone())?;
    for b in rest {
        law = law.mix_in(b)?;
    }
    let source = BetaMultiset::from_values(values.iter().cloned())?;
    Ok(law.tagged(source))
}

impl<T: Real> ClosedFormLaw<T> {
    /// Density at `x` in `(0, 1]`. Terms with exponent below one are unbounded near zero.
    pub fn pdf(&self, x: T) -> Result<T> {
        if !(x > T::zero() && x <= T::one()) {
            return Err(Error::Domain {
                what: "x",
                value: x.to_f64_lossy(),
                domain: "(0, 1]",
            });
        }
        Ok(self.pdf_unchecked(x))
    }

    pub(crate) fn pdf_unchecked(&self, x: T) -> T {
        let neg_log = -Float::ln(x);
        T::sum_all(self.terms.iter().map(|t| {
            t.coef * Float::powf(x, t.exponent - T::one()) * Float::powi(neg_log, t.logpow as i32)
        }))
    }

    /// Term-wise antiderivative `G` with `G(x) -> 0` as `x -> 0+` for positive
    /// exponents; for negative exponents it is the analogous auxiliary function.
    pub fn primitive(&self, t: T) -> T {
        let neg_log = -Float::ln(t);
        T::sum_all(self.terms.iter().map(|term| {
            let e = term.exponent;
            let j = term.logpow;
            let u = e * neg_log;
            let mut poly = T::zero();
            let mut power = T::one();
            let mut fact = T::one();
            for k in 0..=j {
                if k > 0 {
                    power = power * u;
                    fact = fact * T::from_int(k as i64);
                }
                poly = poly + power / fact;
            }
            term.coef * factorial::<T>(j) / Float::powi(e, j as i32 + 1) * Float::powf(t, e) * poly
        }))
    }

    /// CDF: `0` for `t <= 0`, `1` for `t >= 1`, the closed-form antiderivative in between.
    pub fn cdf(&self, t: T) -> T {
        if t <= T::zero() {
            T::zero()
        } else if t >= T::one() {
            T::one()
        } else {
            self.primitive(t)
        }
    }

    /// `∫_0^1 g(s) f(s) ds`, term by term. The term `c s^(e-1) (-log s)^j` becomes
    /// `c (k/e)^(j+1) u^(k-1) (-log u)^j` under `s = u^(k/e)`, which removes the
    /// algebraic endpoint singularity; growing `k` with `j` also flattens the
    /// logarithmic one. The tolerance is split evenly across terms.
    pub fn integrate_against<V: QuadValue<T>>(
        &self,
        mut g: impl FnMut(T) -> V,
        quad: &AdaptiveQuadrature<T>,
    ) -> Result<QuadEstimate<V, T>> {
        if let Some(t) = self.terms.iter().find(|t| t.exponent <= T::zero()) {
            return Err(invalid(format!(
                "cannot integrate against a term with exponent {}",
                t.exponent
            )));
        }
        let per_term =
            quad.with_tolerance(quad.abs_tol / T::from_int(self.terms.len().max(1) as i64));
        let mut total = QuadEstimate {
            value: V::zero(),
            error: T::zero(),
            intervals: 0,
        };
        for term in &self.terms {
            let power = SUBSTITUTION_POWER + term.logpow as i32;
            let scale = T::from_int(power as i64) / term.exponent;
            let weight = term.coef * Float::powi(scale, term.logpow as i32 + 1);
            let est = per_term.integrate(
                |u: T| {
                    if u == T::zero() {
                        return V::zero();
                    }
                    let jac =
                        Float::powi(u, power - 1) * Float::powi(-Float::ln(u), term.logpow as i32);
                    g(Float::powf(u, scale)) * (jac * weight)
                },
                T::zero(),
                T::one(),
            )?;
            total.value = total.value + est.value;
            total.error = total.error + est.error;
            total.intervals += est.intervals;
        }
        Ok(total)
    }

    /// `∫_0^t s^k f(s) ds`.
    pub fn partial_moment(&self, k: T, t: T) -> Result<T> {
        let shifted = self.shifted(&k)?;
        if shifted.terms.iter().any(|term| term.exponent <= T::zero()) {
            return Err(invalid("partial moment diverges at zero"));
        }
        if t <= T::zero() {
            return Ok(T::zero());
        }
        Ok(shifted.primitive(Float::min(t, T::one())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn law(values: &[f64]) -> ClosedFormLaw<f64> {
        build_law(&BetaMultiset::from_values(values.iter().copied()).unwrap())
    }

    #[test]
    fn single_exponent_law() {
        let l = law(&[2.5]);
        assert_eq!(
            l.terms(),
            &[Term {
                coef: 2.5,
                exponent: 2.5,
                logpow: 0
            }]
        );
        assert!(l.is_genuine());
    }

    #[test]
    fn repeated_block_matches_gamma_shape() {
        let m = BetaMultiset::repeated(q(3, 2), 3).unwrap();
        let l = build_law(&m);
        // alpha x^(alpha-1) (-alpha log x)^2 / 2!
        assert_eq!(
            l.terms(),
            &[Term {
                coef: q(27, 16),
                exponent: q(3, 2),
                logpow: 2
            }]
        );
    }

    #[test]
    fn one_two_law_is_two_minus_two_x() {
        let m = BetaMultiset::from_values([q(1, 1), q(2, 1)]).unwrap();
        let l = build_law(&m);
        assert_eq!(
            l.terms(),
            &[
                Term {
                    coef: q(2, 1),
                    exponent: q(1, 1),
                    logpow: 0
                },
                Term {
                    coef: q(-2, 1),
                    exponent: q(2, 1),
                    logpow: 0
                }
            ]
        );
        let f = law(&[1.0, 2.0]);
        assert!((f.pdf(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((f.cdf(0.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn pdf_examples() {
        let u = law(&[1.0]);
        for x in [1e-6, 0.3, 1.0] {
            assert_eq!(u.pdf(x).unwrap(), 1.0);
        }
        let single = build_law(&BetaMultiset::repeated(2.5, 1).unwrap());
        assert_eq!(single.pdf(1.0).unwrap(), 2.5);
        // for a block of size >= 2 the log factor vanishes at x = 1
        let block = build_law(&BetaMultiset::repeated(2.5, 4).unwrap());
        assert_eq!(block.pdf(1.0).unwrap(), 0.0);
        assert!(u.pdf(0.0).is_err());
        assert!(u.pdf(1.5).is_err());
        assert!(u.pdf(f64::NAN).is_err());
    }

    #[test]
    fn cdf_examples() {
        let block = build_law(&BetaMultiset::repeated(1.0, 2).unwrap());
        let t = (-1.0f64).exp();
        assert!((block.cdf(t) - 2.0 * t).abs() < 1e-15);
        assert!((block.cdf(t) - 0.735_758_882_342_884_6).abs() < 1e-15);
        for l in [law(&[0.5, 3.0]), block.clone(), law(&[7.0])] {
            assert_eq!(l.cdf(1.0), 1.0);
            assert_eq!(l.cdf(2.0), 1.0);
            assert_eq!(l.cdf(0.0), 0.0);
            assert_eq!(l.cdf(-1.0), 0.0);
        }
    }

    #[test]
    fn exact_total_mass_is_one() {
        let m =
            BetaMultiset::new([(q(1, 2), 2), (q(3, 1), 1), (q(7, 3), 3), (q(5, 1), 1)]).unwrap();
        let l = build_law(&m);
        assert_eq!(l.total_mass().unwrap(), q(1, 1));
        assert_eq!(l.moment(&q(1, 1)).unwrap(), m.moment(&q(1, 1)));
        assert_eq!(l.moment(&q(2, 1)).unwrap(), m.moment(&q(2, 1)));
    }

    #[test]
    fn partial_moment_of_single_law() {
        // ∫_0^t s * b s^(b-1) ds = b/(b+1) t^(b+1)
        let l = law(&[2.0]);
        let v = l.partial_moment(1.0, 0.5).unwrap();
        assert!((v - 2.0 / 3.0 * 0.125).abs() < 1e-16);
        assert_eq!(l.partial_moment(1.0, 0.0).unwrap(), 0.0);
        assert!((l.partial_moment(1.0, 3.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn negative_exponent_auxiliary_functions() {
        let aux = ClosedFormLaw::repeated_density(-1.5, 2).unwrap();
        assert!(!aux.is_genuine());
        // the derivative of the primitive is the function itself
        let x = 0.4;
        let h = 1e-6;
        let fd = (aux.primitive(x + h) - aux.primitive(x - h)) / (2.0 * h);
        assert!((fd - aux.pdf(x).unwrap()).abs() < 1e-6);
        assert!(aux.total_mass().is_err());
        assert!(ClosedFormLaw::<f64>::from_terms([Term {
            coef: 1.0,
            exponent: 0.0,
            logpow: 0
        }])
        .is_err());
    }

    #[test]
    fn merge_combines_and_drops_exact_zeros() {
        let a = ClosedFormLaw::from_terms([
            Term {
                coef: q(1, 1),
                exponent: q(2, 1),
                logpow: 0,
            },
            Term {
                coef: q(-1, 1),
                exponent: q(2, 1),
                logpow: 0,
            },
            Term {
                coef: q(3, 1),
                exponent: q(1, 1),
                logpow: 1,
            },
            Term {
                coef: q(1, 2),
                exponent: q(1, 1),
                logpow: 1,
            },
        ])
        .unwrap();
        assert_eq!(
            a.terms(),
            &[Term {
                coef: q(7, 2),
                exponent: q(1, 1),
                logpow: 1
            }]
        );
    }

    #[test]
    fn cdf_derivative_is_pdf() {
        for values in [
            vec![0.5, 1.0, 2.0],
            vec![1.0, 1.0, 3.0],
            vec![2.0, 2.0, 2.0, 0.75],
        ] {
            let l = law(&values);
            for i in 1..99 {
                let x = i as f64 / 100.0;
                let h = 1e-6;
                let fd = (l.cdf(x + h) - l.cdf(x - h)) / (2.0 * h);
                assert!((fd - l.pdf(x).unwrap()).abs() < 1e-6, "{values:?} at {x}");
            }
        }
    }

    #[test]
    fn cdf_is_monotone_on_fine_grid() {
        let l = law(&[0.5, 0.5, 1.0, 4.0, 9.0]);
        let mut prev = 0.0;
        for i in 1..=10_000 {
            let c = l.cdf(i as f64 / 10_000.0);
            assert!(c >= prev - 1e-15, "cdf decreased at step {i}");
            prev = c;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn integration_against_law_matches_moments() {
        let quad = AdaptiveQuadrature::new(1e-12);
        for values in [
            vec![0.5, 1.0, 2.0, 3.5],
            vec![3.5, 3.5, 3.5, 3.5],
            vec![0.5, 0.5, 2.0],
        ] {
            let l = law(&values);
            let m = BetaMultiset::from_values(values.iter().copied()).unwrap();
            for k in [1.0, 2.0, 0.5] {
                let est = l.integrate_against(|s: f64| s.powf(k), &quad).unwrap();
                assert!(
                    (est.value - m.moment(&k)).abs() < 1e-12,
                    "{values:?} k={k}: {}",
                    est.value - m.moment(&k)
                );
            }
            let mass = l.integrate_against(|_| 1.0, &quad).unwrap();
            assert!((mass.value - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn insertion_order_does_not_matter(
            values in proptest::collection::vec(1i64..6, 1..6),
            rot in 0usize..6,
        ) {
            let vals: Vec<BigRational> = values.iter().map(|&v| q(v, 2)).collect();
            let mut rotated = vals.clone();
            let len = rotated.len();
            rotated.rotate_left(rot % len);
            rotated.reverse();
            let a = build_law_ordered(&vals).unwrap();
            let b = build_law_ordered(&rotated).unwrap();
            prop_assert_eq!(a.terms(), b.terms());
            prop_assert_eq!(a.source(), b.source());
            prop_assert_eq!(a.total_mass().unwrap(), q(1, 1));
        }
    }
}
