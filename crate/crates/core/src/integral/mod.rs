//! Log-characteristic functions of random integrals `∫ h(t) dY(r(t))` and checks
//! of the composition law.
//!
//! For `h(t) = t^p` and a time change `r` with density `f`,
//!
//! ```text
//! log E[e^{i<y, ∫ h dY(r)>}] = ∫_0^1 Phi(h(s) y) dr(s)
//! ```
//!
//! which [`logcf_quadrature`] evaluates term by term over the closed form of `f`.

mod ecf;
mod simulate;

pub use ecf::{cf_compare, empirical_cf, CfPoint, CfReport, EmpiricalCf};
pub use simulate::{simulate_integral, SimulationBatch};

use num_complex::Complex;
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::interp::ChebyshevInterpolant;
use crate::levy::{levy_exponent_with, LevyTriple};
use crate::multiset::BetaMultiset;
use crate::product_law::{build_law, build_law_ordered, ClosedFormLaw};
use crate::quadrature::AdaptiveQuadrature;
use crate::scalar::Real;

/// Nodes of the Chebyshev interpolants carrying the intermediate layers of the nested route.
pub const LAYER_NODES: usize = 48;

/// `∫_(0,1] t^power dY(r(t))` with `r` the CDF of a genuine product law.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSpec<T> {
    power: T,
    timechange: ClosedFormLaw<T>,
}

impl<T: Real> IntegralSpec<T> {
    pub fn new(power: T, timechange: ClosedFormLaw<T>) -> Result<Self> {
        if !(power > T::zero() && power.is_finite()) {
            return Err(Error::Unsupported(format!(
                "integrand t^{power}: only positive powers are supported"
            )));
        }
        if !timechange.is_genuine() {
            return Err(invalid(
                "integral time change must be a genuine product law",
            ));
        }
        Ok(Self { power, timechange })
    }

    /// `∫ t dY(r_A(t))`, the composed mapping over `A`.
    pub fn canonical(multiset: &BetaMultiset<T>) -> Self {
        Self {
            power: T::one(),
            timechange: build_law(multiset),
        }
    }

    pub fn power(&self) -> T {
        self.power
    }

    pub fn timechange(&self) -> &ClosedFormLaw<T> {
        &self.timechange
    }

    pub fn h(&self, t: T) -> T {
        if self.power == T::one() {
            t
        } else {
            Float::powf(t, self.power)
        }
    }

    /// The multiset whose product law is the law of `h(X)` for `X ~ r`.
    pub fn image_multiset(&self) -> Result<BetaMultiset<T>> {
        let source = self
            .timechange
            .source()
            .ok_or_else(|| invalid("time change has no source multiset"))?;
        source.divided_by(&self.power)
    }
}

/// Default quadrature for log-cf integrals: absolute tolerance `1e-10`.
pub fn logcf_quadrature_rule<T: Real>() -> AdaptiveQuadrature<T> {
    AdaptiveQuadrature::new(T::lit(1e-10))
}

/// Lévy exponent of a triple as an evaluator.
pub fn exponent_of<T: Real>(triple: &LevyTriple<T>) -> impl Fn(&[T]) -> Result<Complex<T>> + '_ {
    let quad = AdaptiveQuadrature::new(T::lit(1e-13));
    move |y: &[T]| levy_exponent_with(triple, y, &quad)
}

fn scaled<T: Real>(y: &[T], s: T) -> Vec<T> {
    y.iter().map(|&v| v * s).collect()
}

/// Integrates `g` against `law`, surfacing the first error raised by `g`.
fn integrate_fallible<T: Real>(
    law: &ClosedFormLaw<T>,
    quad: &AdaptiveQuadrature<T>,
    mut g: impl FnMut(T) -> Result<Complex<T>>,
) -> Result<Complex<T>> {
    let mut failure = None;
    let est = law.integrate_against(
        |s| match g(s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex::new(T::zero(), T::zero())
            }
        },
        quad,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}

/// `∫_0^1 Phi(h(s) y) dr(s)`.
pub fn logcf_quadrature<T: Real>(
    exponent: &dyn Fn(&[T]) -> Result<Complex<T>>,
    spec: &IntegralSpec<T>,
    y: &[T],
) -> Result<Complex<T>> {
    logcf_quadrature_with(exponent, spec, y, &logcf_quadrature_rule())
}

pub fn logcf_quadrature_with<T: Real>(
    exponent: &dyn Fn(&[T]) -> Result<Complex<T>>,
    spec: &IntegralSpec<T>,
    y: &[T],
    quad: &AdaptiveQuadrature<T>,
) -> Result<Complex<T>> {
    if y.iter().all(|v| v.is_zero()) {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    integrate_fallible(&spec.timechange, quad, |s| exponent(&scaled(y, spec.h(s))))
}

/// Log-cf of `J^{b_m} ∘ ... ∘ J^{b_1}(nu)` at `y`, applying one mapping at a
/// time: `g_k(t) = ∫_0^1 g_{k-1}(s t) d(s^{b_k})` with `g_0(t) = Phi(t y)`.
/// Intermediate layers are carried as Chebyshev interpolants on `[0, 1]`.
pub fn nested_logcf<T: Real>(
    exponent: &dyn Fn(&[T]) -> Result<Complex<T>>,
    betas: &[T],
    y: &[T],
    quad: &AdaptiveQuadrature<T>,
) -> Result<Complex<T>> {
    let (last, inner) = betas
        .split_last()
        .ok_or_else(|| invalid("exponent list is empty"))?;
    let mut layer: Option<ChebyshevInterpolant<T, Complex<T>>> = None;
    for beta in inner {
        let law = ClosedFormLaw::single(*beta)?;
        let prev = layer.take();
        let next = ChebyshevInterpolant::sample(LAYER_NODES, |t: T| {
            integrate_fallible(&law, quad, |s| match &prev {
                None => exponent(&scaled(y, s * t)),
                Some(p) => Ok(p.eval(s * t)),
            })
        })?;
        layer = Some(next);
    }
    let law = ClosedFormLaw::single(*last)?;
    integrate_fallible(&law, quad, |s| match &layer {
        None => exponent(&scaled(y, s)),
        Some(p) => Ok(p.eval(s)),
    })
}

/// Largest `|nested - single|` over the grid, where the nested route applies the
/// mappings in the given order and the single route integrates once against `r_A`.
pub fn compose_residual<T: Real>(triple: &LevyTriple<T>, betas: &[T], ys: &[Vec<T>]) -> Result<T> {
    let exponent = exponent_of(triple);
    compose_residual_with(&exponent, betas, ys, &logcf_quadrature_rule())
}

pub fn compose_residual_with<T: Real>(
    exponent: &dyn Fn(&[T]) -> Result<Complex<T>>,
    betas: &[T],
    ys: &[Vec<T>],
    quad: &AdaptiveQuadrature<T>,
) -> Result<T> {
    let spec = IntegralSpec::new(T::one(), build_law_ordered(betas)?)?;
    let mut worst = T::zero();
    for y in ys {
        let nested = nested_logcf(exponent, betas, y, quad)?;
        let single = logcf_quadrature_with(exponent, &spec, y, quad)?;
        worst = Float::max(worst, (nested - single).norm());
    }
    Ok(worst)
}

/// `E[Phi(h1(X1) h2(X2) y)]` by double quadrature, `X1 ~ r1`, `X2 ~ r2` independent.
pub fn double_logcf<T: Real>(
    exponent: &dyn Fn(&[T]) -> Result<Complex<T>>,
    spec1: &IntegralSpec<T>,
    spec2: &IntegralSpec<T>,
    y: &[T],
    quad: &AdaptiveQuadrature<T>,
) -> Result<Complex<T>> {
    integrate_fallible(&spec2.timechange, quad, |s2| {
        let outer = spec2.h(s2);
        integrate_fallible(&spec1.timechange, quad, |s1| {
            exponent(&scaled(y, spec1.h(s1) * outer))
        })
    })
}

/// Largest deviation between the double quadrature and the single integral with
/// `r3` the law of `h1(X1) h2(X2)`, built symbolically from the image multisets.
pub fn general_compose_residual<T: Real>(
    spec1: &IntegralSpec<T>,
    spec2: &IntegralSpec<T>,
    exponent: &dyn Fn(&[T]) -> Result<Complex<T>>,
    ys: &[Vec<T>],
) -> Result<T> {
    let quad = logcf_quadrature_rule();
    let combined = spec1.image_multiset()?.union(&spec2.image_multiset()?);
    let single = IntegralSpec::canonical(&combined);
    let mut worst = T::zero();
    for y in ys {
        let a = double_logcf(exponent, spec1, spec2, y, &quad)?;
        let b = logcf_quadrature_with(exponent, &single, y, &quad)?;
        worst = Float::max(worst, (a - b).norm());
    }
    Ok(worst)
}
