//! Built-in masks shipped as JSON documents under `masks/`.

use crate::error::{Error, Result};
use crate::mask_file::{MaskDocument, Metadata};
use crate::scalar::{binomial, CRat};
use crate::seq::MatSeq;
use crate::sum_rules::{construct_hermite_mask, ConstructOptions};

const FILES: &[(&str, &str)] = &[
    ("bspline-1", include_str!("../masks/bspline-1.json")),
    ("bspline-2", include_str!("../masks/bspline-2.json")),
    ("bspline-3", include_str!("../masks/bspline-3.json")),
    ("bspline-4", include_str!("../masks/bspline-4.json")),
    ("bspline-5", include_str!("../masks/bspline-5.json")),
    ("bspline-6", include_str!("../masks/bspline-6.json")),
    ("dirac", include_str!("../masks/dirac.json")),
    ("hermite-cubic", include_str!("../masks/hermite-cubic.json")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

/// Shipped file text for a built-in mask.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn builtin(name: &str) -> Option<MaskDocument> {
    builtin_text(name).map(|t| MaskDocument::from_json(t).expect("shipped masks parse"))
}

/// `a_mᴮ = 2^{−m} (1 + z)^m` on `[0, m]`.
pub fn bspline_mask(m: usize) -> MatSeq {
    let scale = CRat::pow2(-(m as i64));
    MatSeq::scalar(0, (0..=m).map(|k| &binomial(m, k) * &scale).collect())
}

/// Recomputes a built-in mask document from its defining construction.
pub fn generate(name: &str) -> Result<MaskDocument> {
    if let Some(m) = name
        .strip_prefix("bspline-")
        .and_then(|s| s.parse::<usize>().ok())
    {
        let meta = Metadata {
            source: Some(format!("B-spline of order {m}")),
            accuracy: Some(m),
            notes: Vec::new(),
        };
        return Ok(MaskDocument::from_seq(name, &bspline_mask(m), meta));
    }
    match name {
        "dirac" => Ok(MaskDocument::from_seq(
            name,
            &MatSeq::delta(1),
            Metadata {
                source: Some("identity mask".into()),
                accuracy: Some(0),
                notes: Vec::new(),
            },
        )),
        "hermite-cubic" => {
            let opts = ConstructOptions {
                interpolatory: true,
                ..Default::default()
            };
            let c = construct_hermite_mask(2, 3, (-1, 1), &opts)?;
            Ok(MaskDocument::from_seq(
                name,
                &c.mask,
                Metadata {
                    source: Some("construct --r 2 --m 3 --support -1:1 --interpolatory".into()),
                    accuracy: Some(4),
                    notes: vec!["two-point cubic Hermite interpolation".into()],
                },
            ))
        }
        _ => Err(Error::Parse(format!("unknown built-in mask '{name}'"))),
    }
}
