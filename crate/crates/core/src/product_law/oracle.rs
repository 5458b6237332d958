//! Independent oracles for the closed-form laws.

use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::multiset::BetaMultiset;
use crate::quadrature::AdaptiveQuadrature;

/// `P[exp(-G) <= t]` for `G ~ Gamma(m, rate alpha)`, i.e. the regularized upper
/// incomplete gamma function at `(m, -alpha log t)`.
pub fn repeated_cdf_gamma(m: u32, alpha: f64, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "block multiplicity must be at least 1".into(),
        ));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain {
            what: "alpha",
            value: alpha,
            domain: "(0, inf)",
        });
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            domain: "(0, 1]",
        });
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    Ok(gamma_ur(m as f64, -alpha * t.ln()))
}

const ORACLE_MAX_SIZE: usize = 4;

/// Density by nested quadrature of `f_{A}(x) = ∫_x^1 f_{A - b}(x/t) t^-1 f_b(t) dt`.
pub fn pdf_numeric_oracle(multiset: &BetaMultiset<f64>, x: f64) -> Result<f64> {
    if multiset.len() > ORACLE_MAX_SIZE {
        return Err(Error::Unsupported(format!(
            "numeric density oracle handles at most {ORACLE_MAX_SIZE} exponents, got {}",
            multiset.len()
        )));
    }
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "(0, 1]",
        });
    }
    let quad = AdaptiveQuadrature::new(1e-13);
    nested(&multiset.expanded(), x, &quad)
}

fn nested(values: &[f64], x: f64, quad: &AdaptiveQuadrature<f64>) -> Result<f64> {
    let (&b, rest) = values.split_last().expect("nonempty multiset");
    if rest.is_empty() {
        return Ok(b * x.powf(b - 1.0));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    let est = quad.integrate(
        |t: f64| match nested(rest, x / t, quad) {
            Ok(inner) => inner / t * b * t.powf(b - 1.0),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        x,
        1.0,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(est.value),
    }
}
