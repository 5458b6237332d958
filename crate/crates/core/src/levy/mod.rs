//! Lévy–Khintchine triples `[a, R, M]` on `R^d` (`d <= 3`) and their transforms
//! under the random integral mappings.
//!
//! The Lévy exponent is
//!
//! ```text
//! Phi(y) = i<y,a> - <y,Ry>/2 + ∫ (e^{i<y,x>} - 1 - i<y,x> 1_B(x)) M(dx)
//! ```
//!
//! with `B` the closed Euclidean unit ball. Measures are finite sums of point
//! masses, or the lazy image of such a sum under a time change `r`: an atom
//! `(x0, c)` is spread along the segment `{s x0 : 0 < s <= 1}` with law `dr(s)`.

mod json;

pub use json::{parse_triple, triple_to_json, TripleDoc};

use num_complex::Complex;
use num_traits::Float;

use crate::coefficients::{big_c, CoefficientVector};
use crate::error::{invalid, Error, Result};
use crate::multiset::BetaMultiset;
use crate::product_law::{build_law, ClosedFormLaw};
use crate::quadrature::AdaptiveQuadrature;
use crate::scalar::Real;

pub const MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub point: Vec<T>,
    pub mass: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LevyMeasure<T> {
    FiniteAtomic(Vec<Atom<T>>),
    Transformed {
        base: Vec<Atom<T>>,
        timechange: ClosedFormLaw<T>,
    },
}

/// The set `{y : |y| > radius}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallComplement<T> {
    radius: T,
}

impl<T: Real> BallComplement<T> {
    pub fn new(radius: T) -> Result<Self> {
        if !(radius > T::zero() && radius.is_finite()) {
            return Err(Error::Domain {
                what: "radius",
                value: radius.to_f64_lossy(),
                domain: "(0, inf)",
            });
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> T {
        self.radius
    }
}

pub(crate) fn norm<T: Real>(v: &[T]) -> T {
    Float::sqrt(v.iter().map(|&x| x * x).sum::<T>())
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn default_quadrature<T: Real>() -> AdaptiveQuadrature<T> {
    AdaptiveQuadrature::new(T::lit(1e-13))
}

fn validate_atoms<T: Real>(atoms: &[Atom<T>]) -> Result<()> {
    for (i, a) in atoms.iter().enumerate() {
        if a.point.iter().any(|x| !x.is_finite()) || !a.mass.is_finite() {
            return Err(invalid(format!(
                "atom {i} has a non-finite coordinate or mass"
            )));
        }
        if a.point.iter().all(|x| x.is_zero()) {
            return Err(invalid(format!("atom {i} sits at the origin")));
        }
        if !(a.mass > T::zero()) {
            return Err(invalid(format!(
                "atom {i} has non-positive mass {}",
                a.mass
            )));
        }
    }
    Ok(())
}

/// `∫ min(1, |x|^2) M(dx)` after validating the measure. The flag is the
/// spectral-measure criterion; for the finite measures handled here it is always set.
pub fn levy_measure_valid<T: Real>(measure: &LevyMeasure<T>) -> Result<(bool, T)> {
    measure.validate()?;
    let integral = match measure {
        LevyMeasure::FiniteAtomic(atoms) => atoms
            .iter()
            .map(|a| {
                let n = norm(&a.point);
                a.mass * Float::min(T::one(), n * n)
            })
            .sum(),
        LevyMeasure::Transformed { base, timechange } => {
            let mut acc = T::zero();
            for a in base {
                let n = norm(&a.point);
                let cut = Float::min(T::one(), T::one() / n);
                let inside = n * n * timechange.partial_moment(T::lit(2.0), cut)?;
                acc = acc + a.mass * (inside + T::one() - timechange.cdf(cut));
            }
            acc
        }
    };
    Ok((integral.is_finite(), integral))
}

impl<T: Real> LevyMeasure<T> {
    pub fn zero() -> Self {
        LevyMeasure::FiniteAtomic(Vec::new())
    }

    pub fn base_atoms(&self) -> &[Atom<T>] {
        match self {
            LevyMeasure::FiniteAtomic(atoms) => atoms,
            LevyMeasure::Transformed { base, .. } => base,
        }
    }

    pub fn timechange(&self) -> Option<&ClosedFormLaw<T>> {
        match self {
            LevyMeasure::FiniteAtomic(_) => None,
            LevyMeasure::Transformed { timechange, .. } => Some(timechange),
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_atoms(self.base_atoms())?;
        if let Some(r) = self.timechange() {
            if !r.is_genuine() {
                return Err(invalid(
                    "time change of a transformed measure must be a genuine product law",
                ));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> T {
        self.base_atoms().iter().map(|a| a.mass).sum()
    }

    fn atomic(&self, op: &str) -> Result<&[Atom<T>]> {
        match self {
            LevyMeasure::FiniteAtomic(atoms) => Ok(atoms),
            LevyMeasure::Transformed { .. } => Err(Error::Unsupported(format!(
                "{op} needs a finite atomic measure; compose the transforms on the original triple instead"
            ))),
        }
    }

    /// Integral term of the Lévy exponent at `y`.
    pub fn exponent_integral(&self, y: &[T], quad: &AdaptiveQuadrature<T>) -> Result<Complex<T>> {
        let mut acc = Complex::new(T::zero(), T::zero());
        match self {
            LevyMeasure::FiniteAtomic(atoms) => {
                for a in atoms {
                    let w = dot(y, &a.point);
                    let comp = if norm(&a.point) <= T::one() {
                        w
                    } else {
                        T::zero()
                    };
                    let e = Complex::new(T::zero(), w).exp() - Complex::new(T::one(), comp);
                    acc = acc + e * a.mass;
                }
            }
            LevyMeasure::Transformed { base, timechange } => {
                for a in base {
                    let w = dot(y, &a.point);
                    let n = norm(&a.point);
                    let jumps = timechange
                        .integrate_against(
                            |s: T| Complex::new(T::zero(), s * w).exp() - T::one(),
                            quad,
                        )?
                        .value;
                    let pm =
                        timechange.partial_moment(T::one(), Float::min(T::one(), T::one() / n))?;
                    acc = acc + (jumps - Complex::new(T::zero(), w * pm)) * a.mass;
                }
            }
        }
        Ok(acc)
    }
}

/// Mass of `set` under `measure`.
pub fn measure_eval<T: Real>(measure: &LevyMeasure<T>, set: &BallComplement<T>) -> T {
    match measure {
        LevyMeasure::FiniteAtomic(atoms) => atoms
            .iter()
            .filter(|a| norm(&a.point) > set.radius)
            .map(|a| a.mass)
            .sum(),
        LevyMeasure::Transformed { base, timechange } => base
            .iter()
            .map(|a| {
                let n = norm(&a.point);
                a.mass * (T::one() - timechange.cdf(Float::min(T::one(), set.radius / n)))
            })
            .sum(),
    }
}

/// `b_{M,beta} = sum over atoms with |x| > 1 of c x |x|^(-1-beta)`.
pub fn b_m<T: Real>(measure: &LevyMeasure<T>, dim: usize, beta: T) -> Result<Vec<T>> {
    let atoms = measure.atomic("b_M")?;
    let mut out = vec![T::zero(); dim];
    for a in atoms {
        check_dim(dim, a.point.len())?;
        let n = norm(&a.point);
        if n > T::one() {
            let w = a.mass * Float::powf(n, -T::one() - beta);
            for (o, &x) in out.iter_mut().zip(&a.point) {
                *o = *o + w * x;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevyTriple<T> {
    dim: usize,
    shift: Vec<T>,
    covariance: Vec<T>,
    measure: LevyMeasure<T>,
}

impl<T: Real> LevyTriple<T> {
    pub fn new(shift: Vec<T>, covariance: Vec<T>, measure: LevyMeasure<T>) -> Result<Self> {
        let dim = shift.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Unsupported(format!(
                "dimension {dim} (supported: 1..={MAX_DIM})"
            )));
        }
        check_dim(dim * dim, covariance.len())?;
        for a in measure.base_atoms() {
            check_dim(dim, a.point.len())?;
        }
        if shift.iter().chain(&covariance).any(|x| !x.is_finite()) {
            return Err(invalid("shift and covariance entries must be finite"));
        }
        check_covariance(dim, &covariance)?;
        measure.validate()?;
        Ok(Self {
            dim,
            shift,
            covariance,
            measure,
        })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(
            vec![T::zero(); dim],
            vec![T::zero(); dim * dim],
            LevyMeasure::zero(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shift(&self) -> &[T] {
        &self.shift
    }

    /// Row-major `d x d` covariance.
    pub fn covariance(&self) -> &[T] {
        &self.covariance
    }

    pub fn measure(&self) -> &LevyMeasure<T> {
        &self.measure
    }

    pub fn quadratic_form(&self, y: &[T]) -> T {
        let d = self.dim;
        let mut acc = T::zero();
        for i in 0..d {
            for j in 0..d {
                acc = acc + y[i] * self.covariance[i * d + j] * y[j];
            }
        }
        acc
    }

    /// The triple of `s X`, so that its exponent at `y` equals `Phi(s y)`.
    pub fn rescaled(&self, s: T) -> Result<Self> {
        if s.is_zero() || !s.is_finite() {
            return Err(Error::Domain {
                what: "s",
                value: s.to_f64_lossy(),
                domain: "nonzero reals",
            });
        }
        let atoms = self.measure.atomic("rescaling")?;
        let mut shift = self.shift.clone();
        for a in atoms {
            let n = norm(&a.point);
            let inside_after = Float::abs(s) * n <= T::one();
            let inside_before = n <= T::one();
            let delta = match (inside_after, inside_before) {
                (true, false) => T::one(),
                (false, true) => -T::one(),
                _ => T::zero(),
            };
            for (o, &x) in shift.iter_mut().zip(&a.point) {
                *o = *o + delta * a.mass * x;
            }
        }
        let shift = shift.into_iter().map(|x| x * s).collect();
        let covariance = self.covariance.iter().map(|&r| r * s * s).collect();
        let moved = atoms
            .iter()
            .map(|a| Atom {
                point: a.point.iter().map(|&x| x * s).collect(),
                mass: a.mass,
            })
            .collect();
        Self::new(shift, covariance, LevyMeasure::FiniteAtomic(moved))
    }
}

/// Symmetric within `1e-12` (relative to the largest entry) and smallest
/// eigenvalue at least `-1e-10 * trace`.
fn check_covariance<T: Real>(dim: usize, r: &[T]) -> Result<()> {
    let scale = r
        .iter()
        .fold(T::one(), |m, &x| Float::max(m, Float::abs(x)));
    for i in 0..dim {
        for j in 0..i {
            if Float::abs(r[i * dim + j] - r[j * dim + i]) > T::lit(1e-12) * scale {
                return Err(invalid(format!(
                    "covariance is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let trace: T = (0..dim).map(|i| r[i * dim + i]).sum();
    let min_eig = min_eigenvalue(dim, r);
    if min_eig < -T::lit(1e-10) * Float::max(Float::abs(trace), T::min_positive_value()) {
        return Err(invalid(format!(
            "covariance is not positive semidefinite (eigenvalue {min_eig})"
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of a symmetric matrix of size at most 3, in closed form.
fn min_eigenvalue<T: Real>(dim: usize, r: &[T]) -> T {
    let half = T::lit(0.5);
    match dim {
        1 => r[0],
        2 => {
            let (a, b, d) = (r[0], half * (r[1] + r[2]), r[3]);
            let mean = half * (a + d);
            let rad = Float::sqrt(Float::powi(half * (a - d), 2) + b * b);
            mean - rad
        }
        _ => {
            let s = |i: usize, j: usize| half * (r[i * 3 + j] + r[j * 3 + i]);
            let p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
            let q = (s(0, 0) + s(1, 1) + s(2, 2)) / T::lit(3.0);
            let p2 = Float::powi(s(0, 0) - q, 2)
                + Float::powi(s(1, 1) - q, 2)
                + Float::powi(s(2, 2) - q, 2)
                + T::lit(2.0) * p1;
            let p = Float::sqrt(p2 / T::lit(6.0));
            if p.is_zero() {
                return q;
            }
            let b = |i: usize, j: usize| (s(i, j) - if i == j { q } else { T::zero() }) / p;
            let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
                - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
                + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
            let phi =
                Float::acos(Float::max(-T::one(), Float::min(T::one(), half * det))) / T::lit(3.0);
            q + T::lit(2.0) * p * Float::cos(phi + T::lit(2.0) * T::PI() / T::lit(3.0))
        }
    }
}

/// `Phi(y)` for the triple.
pub fn levy_exponent<T: Real>(triple: &LevyTriple<T>, y: &[T]) -> Result<Complex<T>> {
    levy_exponent_with(triple, y, &default_quadrature())
}

pub fn levy_exponent_with<T: Real>(
    triple: &LevyTriple<T>,
    y: &[T],
    quad: &AdaptiveQuadrature<T>,
) -> Result<Complex<T>> {
    check_dim(triple.dim, y.len())?;
    let linear = Complex::new(
        -half::<T>() * triple.quadratic_form(y),
        dot(y, &triple.shift),
    );
    Ok(linear + triple.measure.exponent_integral(y, quad)?)
}

fn half<T: Real>() -> T {
    T::lit(0.5)
}

/// Triple of `J^{beta}(nu)`: `a^b = b/(b+1) (a + b_{M,b})`, `R^b = b/(b+2) R`,
/// and `M^b` the image of `M` under the time change `t^b`.
pub fn transform_single<T: Real>(triple: &LevyTriple<T>, beta: T) -> Result<LevyTriple<T>> {
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(invalid(format!("exponent {beta} is not strictly positive")));
    }
    let atoms = triple.measure.atomic("transform_single")?.to_vec();
    let b = b_m(&triple.measure, triple.dim, beta)?;
    let factor = beta / (beta + T::one());
    let shift = triple
        .shift
        .iter()
        .zip(&b)
        .map(|(&a, &bi)| factor * (a + bi))
        .collect();
    let cov_factor = beta / (beta + T::lit(2.0));
    let covariance = triple.covariance.iter().map(|&r| r * cov_factor).collect();
    let measure = LevyMeasure::Transformed {
        base: atoms,
        timechange: ClosedFormLaw::single(beta)?,
    };
    LevyTriple::new(shift, covariance, measure)
}

/// Triple of the composed mapping over the multiset `A`, from its time change
/// `r_A`: `R^A = E[T^2] R`, `a^A = E[T] a + sum_{|x0|>1} c x0 ∫_0^{1/|x0|} s dr_A(s)`,
/// `M^A` the image of `M` under `r_A`. Repeated values are allowed.
pub fn transform_multi<T: Real>(
    triple: &LevyTriple<T>,
    multiset: &BetaMultiset<T>,
) -> Result<LevyTriple<T>> {
    transform_with_law(triple, build_law(multiset))
}

pub(crate) fn transform_with_law<T: Real>(
    triple: &LevyTriple<T>,
    law: ClosedFormLaw<T>,
) -> Result<LevyTriple<T>> {
    let atoms = triple.measure.atomic("transform_multi")?.to_vec();
    let mean = law.moment(&T::one())?;
    let second = law.moment(&T::lit(2.0))?;
    let mut shift: Vec<T> = triple.shift.iter().map(|&a| a * mean).collect();
    for a in &atoms {
        let n = norm(&a.point);
        if n > T::one() {
            let w = a.mass * law.partial_moment(T::one(), T::one() / n)?;
            for (o, &x) in shift.iter_mut().zip(&a.point) {
                *o = *o + w * x;
            }
        }
    }
    let covariance = triple.covariance.iter().map(|&r| r * second).collect();
    LevyTriple::new(
        shift,
        covariance,
        LevyMeasure::Transformed {
            base: atoms,
            timechange: law,
        },
    )
}

/// `sum_j C_j J^{beta_j}(nu)` for distinct exponents, the convolution-power
/// decomposition of the composed mapping.
#[derive(Clone, Debug)]
pub struct Decomposition<T> {
    pub coefficients: CoefficientVector<T>,
    pub components: Vec<LevyTriple<T>>,
}

impl<T: Real> Decomposition<T> {
    pub fn new(triple: &LevyTriple<T>, betas: &[T]) -> Result<Self> {
        let coefficients = big_c(betas)?;
        let components = betas
            .iter()
            .map(|&b| transform_single(triple, b))
            .collect::<Result<_>>()?;
        Ok(Self {
            coefficients,
            components,
        })
    }

    fn combine(&self, pick: impl Fn(&LevyTriple<T>) -> &[T]) -> Vec<T> {
        let len = pick(&self.components[0]).len();
        (0..len)
            .map(|i| {
                T::sum_all(
                    self.coefficients
                        .values
                        .iter()
                        .zip(&self.components)
                        .map(|(&c, t)| c * pick(t)[i]),
                )
            })
            .collect()
    }

    pub fn shift(&self) -> Vec<T> {
        self.combine(|t| t.shift())
    }

    pub fn covariance(&self) -> Vec<T> {
        self.combine(|t| t.covariance())
    }

    pub fn measure_eval(&self, set: &BallComplement<T>) -> T {
        T::sum_all(
            self.coefficients
                .values
                .iter()
                .zip(&self.components)
                .map(|(&c, t)| c * measure_eval(t.measure(), set)),
        )
    }

    pub fn exponent(&self, y: &[T]) -> Result<Complex<T>> {
        logcf_weighted(&self.components, &self.coefficients, y)
    }
}

/// `sum_j C_j Phi_j(y)`.
pub fn logcf_weighted<T: Real>(
    triples: &[LevyTriple<T>],
    coefficients: &CoefficientVector<T>,
    y: &[T],
) -> Result<Complex<T>> {
    check_dim(triples.len(), coefficients.len())?;
    let quad = default_quadrature();
    let mut re = Vec::with_capacity(triples.len());
    let mut im = Vec::with_capacity(triples.len());
    for (t, &c) in triples.iter().zip(&coefficients.values) {
        let phi = levy_exponent_with(t, y, &quad)?;
        re.push(phi.re * c);
        im.push(phi.im * c);
    }
    Ok(Complex::new(T::sum_all(re), T::sum_all(im)))
}
