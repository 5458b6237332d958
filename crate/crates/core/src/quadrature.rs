//! Globally adaptive Gauss–Legendre quadrature with interval bisection.
//!
//! Each interval is integrated with a 20-point and a 10-point rule; their
//! difference is the interval's error estimate. The interval with the largest
//! estimate is bisected until the summed estimate meets the tolerance or every
//! remaining candidate sits at the depth limit.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values a quadrature rule can accumulate: reals and complex numbers.
pub trait QuadValue<T>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self>
{
    fn modulus(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn modulus(&self) -> T {
        Float::abs(*self)
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn modulus(&self) -> T {
        self.norm()
    }
}

/// Fixed-order Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let nf = T::from_int(n as i64);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let half = T::lit(0.5);
        let eps = T::epsilon() * T::lit(4.0);
        for i in 0..n.div_ceil(2) {
            let mut x =
                Float::cos(T::PI() * (T::from_int(i as i64 + 1) - T::lit(0.25)) / (nf + half));
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if Float::abs(dx) <= eps {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn apply<V: QuadValue<T>>(&self, f: &mut impl FnMut(T) -> V, a: T, b: T) -> V {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = V::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * *x) * *w;
        }
        acc * half
    }
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_int(k as i64);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::from_int(n as i64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate<V, T> {
    pub value: V,
    pub error: T,
    pub intervals: usize,
}

#[derive(Clone, Debug)]
pub struct AdaptiveQuadrature<T> {
    high: GaussLegendre<T>,
    low: GaussLegendre<T>,
    pub abs_tol: T,
    /// Relative floor guarding against asking for accuracy below round-off.
    pub rel_tol: T,
    pub max_depth: u32,
    pub max_intervals: usize,
}

struct Panel<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
    depth: u32,
}

impl<T: Real> AdaptiveQuadrature<T> {
    pub fn new(abs_tol: T) -> Self {
        Self {
            high: GaussLegendre::new(20),
            low: GaussLegendre::new(10),
            abs_tol,
            rel_tol: T::epsilon() * T::lit(64.0),
            max_depth: 20,
            max_intervals: 4000,
        }
    }

    pub fn with_tolerance(&self, abs_tol: T) -> Self {
        Self {
            abs_tol,
            ..self.clone()
        }
    }

    fn panel<V: QuadValue<T>>(
        &self,
        f: &mut impl FnMut(T) -> V,
        a: T,
        b: T,
        depth: u32,
    ) -> Panel<V, T> {
        let hi = self.high.apply(f, a, b);
        let lo = self.low.apply(f, a, b);
        Panel {
            a,
            b,
            value: hi,
            error: (hi - lo).modulus(),
            depth,
        }
    }

    pub fn integrate<V: QuadValue<T>>(
        &self,
        mut f: impl FnMut(T) -> V,
        a: T,
        b: T,
    ) -> Result<QuadEstimate<V, T>> {
        let mut panels = vec![self.panel(&mut f, a, b, 0)];
        loop {
            let value = panels.iter().fold(V::zero(), |acc, p| acc + p.value);
            let error = panels.iter().fold(T::zero(), |acc, p| acc + p.error);
            let magnitude = panels
                .iter()
                .fold(T::zero(), |acc, p| acc + p.value.modulus());
            let target = Float::max(self.abs_tol, self.rel_tol * magnitude);
            if !(error.is_finite() && value.modulus().is_finite()) {
                return Err(Error::Numeric("non-finite integrand value".into()));
            }
            if error <= target {
                return Ok(QuadEstimate {
                    value,
                    error,
                    intervals: panels.len(),
                });
            }
            let worst = panels
                .iter()
                .enumerate()
                .filter(|(_, p)| p.depth < self.max_depth)
                .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).expect("finite errors"))
                .map(|(i, _)| i);
            let Some(i) = worst.filter(|_| panels.len() < self.max_intervals) else {
                return Err(Error::NonConvergence {
                    estimate: error.to_f64().unwrap_or(f64::INFINITY),
                    tolerance: target.to_f64().unwrap_or(0.0),
                });
            };
            let p = panels.swap_remove(i);
            let mid = (p.a + p.b) * T::lit(0.5);
            panels.push(self.panel(&mut f, p.a, mid, p.depth + 1));
            panels.push(self.panel(&mut f, mid, p.b, p.depth + 1));
        }
    }
}
