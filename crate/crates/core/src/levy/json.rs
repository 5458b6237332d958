//! JSON documents for triples.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "shift": [0.2, 0.0],
//!   "covariance": [1.0, 0.0, 0.0, 1.0],
//!   "atoms": [[[1.5, 0.0], 0.8]],
//!   "timechange": {"multiset": [[1.0, 1], [2.0, 2]]}
//! }
//! ```
//!
//! `covariance` is row-major. `timechange` is optional; when present the atoms
//! are the base of a transformed measure whose time change is the product law
//! of the listed `[value, multiplicity]` pairs.

use serde::{Deserialize, Serialize};

use super::{Atom, LevyMeasure, LevyTriple};
use crate::error::{invalid, Error, Result};
use crate::multiset::BetaMultiset;
use crate::product_law::build_law;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDoc {
    pub dim: usize,
    pub shift: Vec<f64>,
    pub covariance: Vec<f64>,
    #[serde(default)]
    pub atoms: Vec<(Vec<f64>, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timechange: Option<TimechangeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimechangeDoc {
    pub multiset: Vec<(f64, u32)>,
}

impl TripleDoc {
    pub fn into_triple(self) -> Result<LevyTriple<f64>> {
        if self.shift.len() != self.dim {
            return Err(invalid(format!(
                "shift: expected {} entries, found {}",
                self.dim,
                self.shift.len()
            )));
        }
        if self.covariance.len() != self.dim * self.dim {
            return Err(invalid(format!(
                "covariance: expected {} entries (row-major {d}x{d}), found {}",
                self.dim * self.dim,
                self.covariance.len(),
                d = self.dim
            )));
        }
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (i, (point, mass)) in self.atoms.into_iter().enumerate() {
            if point.len() != self.dim {
                return Err(invalid(format!(
                    "atoms[{i}]: point has {} coordinates, expected {}",
                    point.len(),
                    self.dim
                )));
            }
            atoms.push(Atom { point, mass });
        }
        let measure = match self.timechange {
            None => LevyMeasure::FiniteAtomic(atoms),
            Some(tc) => {
                let multiset = BetaMultiset::new(tc.multiset)
                    .map_err(|e| invalid(format!("timechange.multiset: {e}")))?;
                LevyMeasure::Transformed {
                    base: atoms,
                    timechange: build_law(&multiset),
                }
            }
        };
        LevyTriple::new(self.shift, self.covariance, measure)
    }

    pub fn from_triple(triple: &LevyTriple<f64>) -> Result<Self> {
        let timechange = match triple.measure().timechange() {
            None => None,
            Some(law) => {
                let source = law.source().ok_or_else(|| {
                    Error::Unsupported("time change without a source multiset".into())
                })?;
                Some(TimechangeDoc {
                    multiset: source.entries().to_vec(),
                })
            }
        };
        Ok(Self {
            dim: triple.dim(),
            shift: triple.shift().to_vec(),
            covariance: triple.covariance().to_vec(),
            atoms: triple
                .measure()
                .base_atoms()
                .iter()
                .map(|a| (a.point.clone(), a.mass))
                .collect(),
            timechange,
        })
    }
}

/// Parses and validates a triple document. Errors name the offending field
/// path, and the line and column for syntax and type errors.
pub fn parse_triple(text: &str) -> Result<LevyTriple<f64>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: TripleDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        invalid(format!("triple document at '{path}': {inner}"))
    })?;
    doc.into_triple()
}

pub fn triple_to_json(triple: &LevyTriple<f64>) -> Result<serde_json::Value> {
    serde_json::to_value(TripleDoc::from_triple(triple)?).map_err(|e| Error::Numeric(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{levy_exponent, transform_multi};

    const STANDARD: &str =
        r#"{"dim": 1, "shift": [0.2], "covariance": [1.0], "atoms": [[[1.5], 0.8]]}"#;

    #[test]
    fn parses_standard_triple() {
        let t = parse_triple(STANDARD).unwrap();
        assert_eq!(t.shift(), &[0.2]);
        assert_eq!(t.measure().base_atoms()[0].point, vec![1.5]);
    }

    #[test]
    fn reports_field_paths() {
        let err = parse_triple(r#"{"dim": 1, "shift": [0.2], "covariance": ["x"], "atoms": []}"#)
            .unwrap_err();
        assert!(err.to_string().contains("covariance[0]"), "{err}");
        let err = parse_triple(r#"{"dim": 1, "shift": [0.2], "covariance": [1.0], "extra": 1}"#)
            .unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
        let err = parse_triple(r#"{"dim": 2, "shift": [0.2], "covariance": [1.0]}"#).unwrap_err();
        assert!(err.to_string().contains("shift"), "{err}");
        let err = parse_triple(
            r#"{"dim": 1, "shift": [0.2], "covariance": [1.0], "atoms": [[[0.0], 1.0]]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("origin"), "{err}");
        let err = parse_triple("{\"dim\": 1,\n \"shift\": [0.2,}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn transformed_triples_round_trip() {
        let t = parse_triple(STANDARD).unwrap();
        let m = transform_multi(&t, &"1,2x2".parse().unwrap()).unwrap();
        let text = serde_json::to_string(&triple_to_json(&m).unwrap()).unwrap();
        let back = parse_triple(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(
            levy_exponent(&back, &[1.3]).unwrap(),
            levy_exponent(&m, &[1.3]).unwrap()
        );
    }
}
