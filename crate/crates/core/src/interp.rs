//! Barycentric interpolation at Chebyshev points of the second kind on `[0, 1]`.

use crate::quadrature::QuadValue;
use crate::scalar::Real;
use num_traits::Float;

#[derive(Clone, Debug)]
pub struct ChebyshevInterpolant<T, V> {
    nodes: Vec<T>,
    weights: Vec<T>,
    values: Vec<V>,
}

/// Chebyshev–Lobatto points mapped to `[0, 1]`, ascending, endpoints included.
pub fn chebyshev_nodes<T: Real>(count: usize) -> Vec<T> {
    assert!(count >= 2, "need at least two interpolation nodes");
    let n = T::from_int(count as i64 - 1);
    (0..count)
        .map(|j| {
            let theta = T::PI() * T::from_int(j as i64) / n;
            (T::one() - Float::cos(theta)) * T::lit(0.5)
        })
        .collect()
}

impl<T: Real, V: QuadValue<T>> ChebyshevInterpolant<T, V> {
    /// Samples `f` at `count` Chebyshev–Lobatto points of `[0, 1]`.
    pub fn sample<E>(count: usize, mut f: impl FnMut(T) -> Result<V, E>) -> Result<Self, E> {
        let nodes = chebyshev_nodes::<T>(count);
        let values = nodes.iter().map(|&t| f(t)).collect::<Result<Vec<_>, E>>()?;
        let weights = (0..count)
            .map(|j| {
                let w = if j % 2 == 0 { T::one() } else { -T::one() };
                if j == 0 || j == count - 1 {
                    w * T::lit(0.5)
                } else {
                    w
                }
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            values,
        })
    }

    pub fn eval(&self, t: T) -> V {
        let mut num = V::zero();
        let mut den = T::zero();
        for ((x, w), v) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let d = t - *x;
            if d == T::zero() {
                return *v;
            }
            let c = *w / d;
            num = num + *v * c;
            den = den + c;
        }
        num * (T::one() / den)
    }
}
