//! Finite multisets of positive exponents.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use crate::error::{invalid, Error, Result};
use crate::scalar::{parse_rational, Scalar};

/// Canonical multiset of positive exponents: distinct values in ascending
/// order, each with a multiplicity of at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaMultiset<T> {
    entries: Vec<(T, u32)>,
}

impl<T: Scalar> BetaMultiset<T> {
    /// Builds from `(value, multiplicity)` pairs in any order; equal values are merged.
    pub fn new(entries: impl IntoIterator<Item = (T, u32)>) -> Result<Self> {
        let mut merged: Vec<(T, u32)> = Vec::new();
        for (value, mult) in entries {
            if !value.is_positive_value() {
                return Err(invalid(format!(
                    "exponent {value} is not strictly positive"
                )));
            }
            if mult == 0 {
                return Err(invalid(format!("exponent {value} has multiplicity 0")));
            }
            match merged.iter_mut().find(|(v, _)| *v == value) {
                Some(slot) => slot.1 += mult,
                None => merged.push((value, mult)),
            }
        }
        if merged.is_empty() {
            return Err(invalid("exponent multiset is empty"));
        }
        merged.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("positive values are ordered"));
        Ok(Self { entries: merged })
    }

    /// Builds from an expanded list such as `[2, 1, 2]`.
    pub fn from_values(values: impl IntoIterator<Item = T>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| (v, 1)))
    }

    pub fn single(value: T) -> Result<Self> {
        Self::new([(value, 1)])
    }

    pub fn repeated(value: T, mult: u32) -> Result<Self> {
        Self::new([(value, mult)])
    }

    pub fn entries(&self) -> &[(T, u32)] {
        &self.entries
    }

    pub fn distinct_values(&self) -> Vec<T> {
        self.entries.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn multiplicity_of(&self, value: &T) -> u32 {
        self.entries
            .iter()
            .find(|(v, _)| v == value)
            .map_or(0, |(_, m)| *m)
    }

    /// Total size counted with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, m)| *m as usize).sum()
    }

    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_all_distinct(&self) -> bool {
        self.entries.iter().all(|(_, m)| *m == 1)
    }

    /// Expanded list in ascending order.
    pub fn expanded(&self) -> Vec<T> {
        self.entries
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(v.clone(), *m as usize))
            .collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.entries.iter().chain(other.entries.iter()).cloned())
            .expect("union of valid multisets is valid")
    }

    /// Multiset of `value / p`: the law of `X^p` when `X` has the product law of `self`.
    pub fn divided_by(&self, p: &T) -> Result<Self> {
        if !p.is_positive_value() {
            return Err(invalid(format!("power {p} is not strictly positive")));
        }
        Self::new(
            self.entries
                .iter()
                .map(|(v, m)| (v.clone() / p.clone(), *m)),
        )
    }

    /// `E[T^k] = prod (b / (b + k))^mult` for the product law of this multiset.
    pub fn moment(&self, k: &T) -> T {
        self.entries.iter().fold(T::one(), |acc, (v, m)| {
            acc * (v.clone() / (v.clone() + k.clone())).powi_int(*m)
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Result<BetaMultiset<U>> {
        BetaMultiset::new(self.entries.iter().map(|(v, m)| (f(v), *m)))
    }

    pub fn to_f64(&self) -> BetaMultiset<f64> {
        self.map(|v| v.to_f64_lossy())
            .expect("positive values stay positive")
    }

    /// Parses the `v1,v2,...` / `vxm` grammar with a caller-supplied value parser.
    pub fn parse_with(text: &str, parse_value: impl Fn(&str) -> Option<T>) -> Result<Self> {
        let mut entries = Vec::new();
        for raw in text.split(',') {
            let item = raw.trim();
            if item.is_empty() {
                return Err(invalid(format!("empty item in multiset '{text}'")));
            }
            let (value_text, mult) = match item.split_once(['x', 'X']) {
                Some((v, m)) => {
                    let m: u32 = m.trim().parse().map_err(|_| {
                        invalid(format!(
                            "multiplicity '{}' in '{item}' is not a positive integer",
                            m.trim()
                        ))
                    })?;
                    (v.trim(), m)
                }
                None => (item, 1),
            };
            let value = parse_value(value_text)
                .ok_or_else(|| invalid(format!("cannot parse exponent '{value_text}'")))?;
            entries.push((value, mult));
        }
        Self::new(entries)
    }
}

impl FromStr for BetaMultiset<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
    }
}

impl FromStr for BetaMultiset<BigRational> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, parse_rational)
    }
}

impl<T: Scalar> fmt::Display for BetaMultiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, m)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if *m == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}x{m}")?;
            }
        }
        Ok(())
    }
}
