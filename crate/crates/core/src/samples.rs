//! Matrix-valued samples on a dyadic grid.

use std::fmt::Write as _;

use crate::matrix::CMat;
use crate::scalar::CRat;

/// Values at every point `k/2ⁿ` of `[A, B]`, `A, B` integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicSamples {
    level: usize,
    window: (i64, i64),
    values: Vec<CMat>,
}

impl DyadicSamples {
    /// Samples `f(k)` for `k = A·2ⁿ ..= B·2ⁿ`.
    pub fn from_fn(level: usize, window: (i64, i64), f: impl FnMut(i64) -> CMat) -> Self {
        let scale = 1i64 << level;
        let values = (window.0 * scale..=window.1 * scale).map(f).collect();
        DyadicSamples {
            level,
            window,
            values,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn window(&self) -> (i64, i64) {
        self.window
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn first(&self) -> i64 {
        self.window.0 << self.level
    }

    /// `(k, value at k/2ⁿ)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &CMat)> {
        let first = self.first();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (first + i as i64, v))
    }

    /// Value at `k/2ⁿ`, if inside the window.
    pub fn get(&self, k: i64) -> Option<&CMat> {
        let i = k - self.first();
        (i >= 0).then(|| self.values.get(i as usize)).flatten()
    }

    /// Samples on a sub-window, zero where `self` has no value.
    pub fn restrict(&self, window: (i64, i64)) -> DyadicSamples {
        let zero = self
            .values
            .first()
            .map_or(CMat::zeros(0, 0), |v| CMat::zeros(v.rows(), v.cols()));
        DyadicSamples::from_fn(self.level, window, |k| {
            self.get(k).cloned().unwrap_or_else(|| zero.clone())
        })
    }

    /// Exact abscissa `k/2ⁿ`.
    pub fn abscissa(&self, k: i64) -> CRat {
        &CRat::from_int(k) * &CRat::pow2(-(self.level as i64))
    }

    /// CSV with a header `x,v_1_1,v_1_2,…` and matrix entries row-major.
    /// Values are exact rationals unless `float` is set, in which case they
    /// use 17 significant digits.
    pub fn to_csv(&self, float: bool) -> String {
        let mut out = String::from("x");
        let (rows, cols) = self.values.first().map_or((0, 0), CMat::shape);
        for p in 1..=rows {
            for q in 1..=cols {
                write!(out, ",v_{p}_{q}").unwrap();
            }
        }
        out.push('\n');
        let render = |z: &CRat| {
            if float {
                z.to_decimal_string()
            } else {
                z.to_string()
            }
        };
        for (k, v) in self.iter() {
            out.push_str(&render(&self.abscissa(k)));
            for z in v.entries() {
                out.push(',');
                out.push_str(&render(z));
            }
            out.push('\n');
        }
        out
    }
}
