//! JSON mask documents with exact rational coefficient strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::scalar::CRat;
use crate::seq::MatSeq;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn is_empty(&self) -> bool {
        *self == Metadata::default()
    }
}

/// `coeffs[k][i][j]` is entry `(i, j)` of `a(offset + k)`, rendered as
/// `p/q` or `p/q±r/s i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskDocument {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: i64,
    pub coeffs: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Metadata::is_empty")]
    pub metadata: Metadata,
}

impl MaskDocument {
    pub fn from_seq(name: &str, a: &MatSeq, metadata: Metadata) -> Self {
        let coeffs = a
            .coeffs()
            .iter()
            .map(|c| {
                (0..c.rows())
                    .map(|i| (0..c.cols()).map(|j| c[(i, j)].to_string()).collect())
                    .collect()
            })
            .collect();
        MaskDocument {
            name: name.to_string(),
            rows: a.rows(),
            cols: a.cols(),
            offset: a.offset(),
            coeffs,
            metadata,
        }
    }

    pub fn to_seq(&self) -> Result<MatSeq> {
        let mut mats = Vec::with_capacity(self.coeffs.len());
        for (k, grid) in self.coeffs.iter().enumerate() {
            if grid.len() != self.rows || grid.iter().any(|row| row.len() != self.cols) {
                return Err(Error::Parse(format!(
                    "coefficient {k} is not {}×{}",
                    self.rows, self.cols
                )));
            }
            let rows = grid
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| s.parse::<CRat>())
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            mats.push(if self.rows == 0 {
                CMat::zeros(0, self.cols)
            } else {
                CMat::from_rows(rows)?
            });
        }
        MatSeq::new(self.rows, self.cols, self.offset, mats)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MaskDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("mask document: {e}")))?;
        doc.to_seq()?;
        Ok(doc)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::tests::arb_seq;
    use proptest::prelude::*;

    #[test]
    fn known_document() {
        let a = MatSeq::from_ratios(0, &[(1, 4), (1, 2), (1, 4)]);
        let doc = MaskDocument::from_seq("hat", &a, Metadata::default());
        let text = doc.to_json();
        assert!(text.contains("\"1/4\""));
        assert!(!text.contains("metadata"));
        assert_eq!(MaskDocument::from_json(&text).unwrap().to_seq().unwrap(), a);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = r#"{"name":"x","rows":1,"cols":1,"offset":0,"coeffs":[[["1/0"]]]}"#;
        assert!(MaskDocument::from_json(bad).is_err());
        let shape = r#"{"name":"x","rows":2,"cols":1,"offset":0,"coeffs":[[["1"]]]}"#;
        assert!(MaskDocument::from_json(shape).is_err());
        let extra = r#"{"name":"x","rows":1,"cols":1,"offset":0,"coeffs":[],"bogus":1}"#;
        assert!(MaskDocument::from_json(extra).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(a in arb_seq(2, 2), acc in proptest::option::of(0usize..6)) {
            let meta = Metadata { source: Some("test".into()), accuracy: acc, notes: vec!["n".into()] };
            let doc = MaskDocument::from_seq("m", &a, meta);
            let text = doc.to_json();
            let back = MaskDocument::from_json(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(back.to_json(), text);
            prop_assert_eq!(back.to_seq().unwrap(), a);
        }
    }
}
