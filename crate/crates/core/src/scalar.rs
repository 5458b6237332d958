//! Scalar abstractions.
//!
//! Coefficient families and closed-form laws are pure field arithmetic, so they
//! are written against [`Scalar`] and run unchanged on `f32`, `f64` and
//! [`BigRational`]. Anything that needs `exp`, `log` or `powf` is written
//! against [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field element usable by the coefficient and law builders.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Num
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// Lossy conversion used for diagnostics and gap checks.
    fn to_f64_lossy(&self) -> f64;

    fn magnitude(&self) -> Self;

    /// Sum with Neumaier compensation in floating point, plain addition when exact.
    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self;

    fn is_positive_value(&self) -> bool {
        *self > Self::zero()
    }

    fn powi_int(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

/// Floating-point scalar with transcendental functions.
pub trait Real: Scalar + Float + FloatConst + FromPrimitive + Sum + Copy {
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }
}

fn neumaier<T: Float>(items: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t) + x);
        } else {
            comp = comp + ((x - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_int(n: i64) -> Self {
                n as $t
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            fn magnitude(&self) -> Self {
                self.abs()
            }

            fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
                neumaier(items)
            }
        }

        impl Real for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> Self {
        self.abs()
    }

    fn sum_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc + x)
    }
}

/// Rising factorial `w (w+1) ... (w+m-1)`, `(w)_0 = 1`, by iterated product.
pub fn pochhammer<T: Scalar>(w: &T, m: u32) -> T {
    let mut acc = T::one();
    let mut factor = w.clone();
    for _ in 0..m {
        acc = acc * factor.clone();
        factor = factor + T::one();
    }
    acc
}

pub fn factorial<T: Scalar>(n: u32) -> T {
    pochhammer(&T::one(), n)
}

/// Parses `"3"`, `"-1/4"`, `"0.125"` or `"2.5e-1"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(joined.parse::<BigInt>().ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value = value * num_traits::pow(ten, scale as usize);
    } else {
        value = value / num_traits::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}
