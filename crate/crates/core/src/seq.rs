//! Finitely supported matrix-valued sequences and their symbols.
//!
//! A [`MatSeq`] `a: Z → C^{s×r}` is stored as a contiguous coefficient block
//! `a(L), …, a(R)` with `a(L) ≠ 0 ≠ a(R)`. Its symbol is the Laurent
//! polynomial `â(ξ) = Σ a(k) z^k` with `z = e^{−iξ}`.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Point};
use crate::matrix::CMat;
use crate::scalar::CRat;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatSeq {
    rows: usize,
    cols: usize,
    offset: i64,
    coeffs: Vec<CMat>,
}

impl MatSeq {
    pub fn new(rows: usize, cols: usize, offset: i64, coeffs: Vec<CMat>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(
                "sequence shape must be positive".into(),
            ));
        }
        if let Some(c) = coeffs.iter().find(|c| c.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient of shape {:?} in a {}x{} sequence",
                c.shape(),
                rows,
                cols
            )));
        }
        Ok(Self::trimmed(rows, cols, offset, coeffs))
    }

    fn trimmed(rows: usize, cols: usize, mut offset: i64, mut coeffs: Vec<CMat>) -> Self {
        while coeffs.last().is_some_and(CMat::is_zero) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        offset += lead as i64;
        if coeffs.is_empty() {
            offset = 0;
        }
        MatSeq {
            rows,
            cols,
            offset,
            coeffs,
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        MatSeq {
            rows,
            cols,
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    /// `δ·I_r`.
    pub fn delta(r: usize) -> Self {
        Self::monomial(CMat::identity(r), 0)
    }

    /// The sequence equal to `c` at index `k` and zero elsewhere.
    pub fn monomial(c: CMat, k: i64) -> Self {
        Self::trimmed(c.rows(), c.cols(), k, vec![c])
    }

    /// Scalar sequence with values `v[0], v[1], …` starting at `offset`.
    pub fn scalar(offset: i64, values: Vec<CRat>) -> Self {
        Self::trimmed(1, 1, offset, values.into_iter().map(CMat::scalar).collect())
    }

    /// Scalar sequence from integer ratios `(num, den)`.
    pub fn from_ratios(offset: i64, values: &[(i64, i64)]) -> Self {
        Self::scalar(
            offset,
            values.iter().map(|&(n, d)| CRat::ratio(n, d)).collect(),
        )
    }

    /// Assembles an `s×r` sequence from a grid of scalar sequences.
    pub fn from_entries(grid: &[Vec<MatSeq>]) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || grid.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged entry grid".into()));
        }
        if grid.iter().flatten().any(|e| e.shape() != (1, 1)) {
            return Err(Error::DimensionMismatch(
                "entries must be scalar sequences".into(),
            ));
        }
        let Some((lo, hi)) = grid
            .iter()
            .flatten()
            .filter_map(MatSeq::support)
            .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
        else {
            return Ok(Self::zero(rows, cols));
        };
        let coeffs = (lo..=hi)
            .map(|k| {
                let mut m = CMat::zeros(rows, cols);
                for (p, row) in grid.iter().enumerate() {
                    for (q, e) in row.iter().enumerate() {
                        if let Some(c) = e.coeff(k) {
                            m[(p, q)] = c[(0, 0)].clone();
                        }
                    }
                }
                m
            })
            .collect();
        Ok(Self::trimmed(rows, cols, lo, coeffs))
    }

    /// Assembles a sequence from column sequences of equal height.
    pub fn from_columns(cols: &[MatSeq]) -> Result<Self> {
        let grid: Vec<Vec<MatSeq>> = (0..cols.first().map_or(0, MatSeq::rows))
            .map(|p| cols.iter().map(|c| c.entry(p, 0)).collect())
            .collect();
        if cols.iter().any(|c| c.cols != 1 || c.rows != cols[0].rows) {
            return Err(Error::DimensionMismatch(
                "columns must be s×1 of equal height".into(),
            ));
        }
        Self::from_entries(&grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Index of the first stored coefficient (0 for the zero sequence).
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `fsupp(a) = [L, R]`, or `None` for the zero sequence.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.coeffs.is_empty()).then(|| (self.offset, self.offset + self.coeffs.len() as i64 - 1))
    }

    /// Coefficient at `k` if it lies in the stored block.
    pub fn coeff(&self, k: i64) -> Option<&CMat> {
        let idx = k - self.offset;
        if idx < 0 {
            return None;
        }
        self.coeffs.get(idx as usize)
    }

    /// Coefficient at `k`, zero outside the support.
    pub fn at(&self, k: i64) -> CMat {
        self.coeff(k)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    /// Nonzero `(k, a(k))` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &CMat)> {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.offset + i as i64, c))
            .filter(|(_, c)| !c.is_zero())
    }

    /// Entry `(p, q)` as a scalar sequence.
    pub fn entry(&self, p: usize, q: usize) -> MatSeq {
        Self::trimmed(
            1,
            1,
            self.offset,
            self.coeffs
                .iter()
                .map(|c| CMat::scalar(c[(p, q)].clone()))
                .collect(),
        )
    }

    pub fn column(&self, q: usize) -> MatSeq {
        Self::trimmed(
            self.rows,
            1,
            self.offset,
            self.coeffs.iter().map(|c| c.column(q)).collect(),
        )
    }

    pub fn row(&self, p: usize) -> MatSeq {
        Self::trimmed(
            1,
            self.cols,
            self.offset,
            self.coeffs
                .iter()
                .map(|c| CMat::from_rows(vec![c.row(p).to_vec()]).unwrap())
                .collect(),
        )
    }

    /// Pointwise map over coefficients; the shape may change.
    pub fn map(&self, rows: usize, cols: usize, f: impl Fn(&CMat) -> CMat) -> MatSeq {
        Self::trimmed(rows, cols, self.offset, self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, c: &CRat) -> MatSeq {
        self.map(self.rows, self.cols, |m| m.scale(c))
    }

    /// `k ↦ m · a(k)`.
    pub fn left_mul(&self, m: &CMat) -> Result<MatSeq> {
        if m.cols() != self.rows {
            return Err(Error::DimensionMismatch("left factor width".into()));
        }
        Ok(self.map(m.rows(), self.cols, |c| m * c))
    }

    /// `k ↦ a(k) · m`.
    pub fn right_mul(&self, m: &CMat) -> Result<MatSeq> {
        if m.rows() != self.cols {
            return Err(Error::DimensionMismatch("right factor height".into()));
        }
        Ok(self.map(self.rows, m.cols(), |c| c * m))
    }

    pub fn add(&self, o: &MatSeq) -> Result<MatSeq> {
        self.combine(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &MatSeq) -> Result<MatSeq> {
        self.combine(o, |a, b| a - b)
    }

    fn combine(&self, o: &MatSeq, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<MatSeq> {
        if self.shape() != o.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                o.shape()
            )));
        }
        let (lo, hi) = match (self.support(), o.support()) {
            (None, None) => return Ok(self.clone()),
            (Some(s), None) | (None, Some(s)) => s,
            (Some((a, b)), Some((c, d))) => (a.min(c), b.max(d)),
        };
        let coeffs = (lo..=hi).map(|k| f(&self.at(k), &o.at(k))).collect();
        Ok(Self::trimmed(self.rows, self.cols, lo, coeffs))
    }

    /// `(u * v)(n) = Σ_k u(k) v(n−k)`.
    pub fn convolve(&self, v: &MatSeq) -> Result<MatSeq> {
        if self.cols != v.rows {
            return Err(Error::DimensionMismatch(format!(
                "convolution of {}x{} with {}x{}",
                self.rows, self.cols, v.rows, v.cols
            )));
        }
        if self.is_zero() || v.is_zero() {
            return Ok(Self::zero(self.rows, v.cols));
        }
        let len = self.coeffs.len() + v.coeffs.len() - 1;
        let mut out = vec![CMat::zeros(self.rows, v.cols); len];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in v.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j].add_mul_assign(x, y);
                }
            }
        }
        Ok(Self::trimmed(
            self.rows,
            v.cols,
            self.offset + v.offset,
            out,
        ))
    }

    /// `n ↦ a(n − k)`.
    pub fn shift(&self, k: i64) -> MatSeq {
        let mut s = self.clone();
        if !s.is_zero() {
            s.offset += k;
        }
        s
    }

    /// `b(f·k) = a(k)`, zero off the multiples of `f`; symbol `â(fξ)`.
    pub fn upsample(&self, f: usize) -> MatSeq {
        assert!(f >= 1, "upsampling factor must be positive");
        if self.is_zero() || f == 1 {
            return self.clone();
        }
        let len = (self.coeffs.len() - 1) * f + 1;
        let mut out = vec![CMat::zeros(self.rows, self.cols); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * f] = c.clone();
        }
        Self::trimmed(self.rows, self.cols, self.offset * f as i64, out)
    }

    /// `k ↦ a(γ + 2k)`.
    pub fn coset(&self, gamma: i64) -> MatSeq {
        let Some((lo, hi)) = self.support() else {
            return self.clone();
        };
        let kmin = (lo - gamma).div_euclid(2) + i64::from((lo - gamma).rem_euclid(2) != 0);
        let kmax = (hi - gamma).div_euclid(2);
        if kmin > kmax {
            return Self::zero(self.rows, self.cols);
        }
        let coeffs = (kmin..=kmax).map(|k| self.at(gamma + 2 * k)).collect();
        Self::trimmed(self.rows, self.cols, kmin, coeffs)
    }

    /// Inverse of the coset split: `a(2k) = even(k)`, `a(2k+1) = odd(k)`.
    pub fn interleave(even: &MatSeq, odd: &MatSeq) -> Result<MatSeq> {
        even.upsample(2).add(&odd.upsample(2).shift(1))
    }

    /// Derivatives of the symbol at `point` through `order`:
    /// `â^{(j)}(0) = Σ_k a(k) (−ik)^j`, with an extra `(−1)^k` at `π`.
    pub fn symbol_jet(&self, point: Point, order: usize) -> Jet {
        let mut derivs = vec![CMat::zeros(self.rows, self.cols); order + 1];
        for (k, c) in self.iter() {
            let base = -(CRat::from_int(k) * CRat::i());
            let mut w = if point == Point::Pi && k.rem_euclid(2) == 1 {
                -CRat::one()
            } else {
                CRat::one()
            };
            for d in derivs.iter_mut() {
                if !w.is_zero() {
                    d.add_assign_ref(&c.scale(&w));
                }
                w = &w * &base;
            }
        }
        Jet::new(point, derivs).expect("uniform shapes")
    }

    /// `∇ⁿ a` with symbol `(1 − z)ⁿ â`.
    pub fn difference_power(&self, n: usize) -> MatSeq {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.sub(&out.shift(1)).expect("same shape");
        }
        out
    }

    /// Numerical value of the symbol at real `ξ`.
    pub fn symbol_at(&self, xi: f64) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.cols]; self.rows];
        for (k, c) in self.iter() {
            let z = Complex64::from_polar(1.0, -(k as f64) * xi);
            for (p, row) in out.iter_mut().enumerate() {
                for (q, v) in row.iter_mut().enumerate() {
                    *v += c[(p, q)].to_complex() * z;
                }
            }
        }
        out
    }

    /// Determinant of the symbol of a square sequence, as a scalar sequence.
    pub fn determinant(&self) -> Result<MatSeq> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square sequence".into(),
            ));
        }
        let grid: Vec<Vec<MatSeq>> = (0..self.rows)
            .map(|p| (0..self.cols).map(|q| self.entry(p, q)).collect())
            .collect();
        Ok(laurent_det(&grid))
    }

    /// Laurent-polynomial inverse, defined iff the determinant is a nonzero monomial.
    pub fn strong_inverse(&self) -> Result<MatSeq> {
        let det = self.determinant()?;
        let (lo, hi) = det
            .support()
            .ok_or_else(|| Error::NotStronglyInvertible("0".into()))?;
        if lo != hi {
            return Err(Error::NotStronglyInvertible(format!(
                "{} nonzero Laurent coefficients",
                det.iter().count()
            )));
        }
        let r = self.rows;
        let inv_c = det.at(lo)[(0, 0)].inv().expect("nonzero");
        let grid: Vec<Vec<MatSeq>> = (0..r)
            .map(|p| (0..r).map(|q| self.entry(p, q)).collect())
            .collect();
        // adj(U)[p][q] = (−1)^{p+q} det(minor with row q and column p removed)
        let adj: Vec<Vec<MatSeq>> = (0..r)
            .map(|p| {
                (0..r)
                    .map(|q| {
                        let c = if r == 1 {
                            MatSeq::delta(1)
                        } else {
                            laurent_det(&minor(&grid, q, p))
                        };
                        if (p + q) % 2 == 1 {
                            c.scale(&-CRat::one())
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(MatSeq::from_entries(&adj)?.scale(&inv_c).shift(-lo))
    }
}

fn minor(grid: &[Vec<MatSeq>], row: usize, col: usize) -> Vec<Vec<MatSeq>> {
    grid.iter()
        .enumerate()
        .filter(|(p, _)| *p != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(q, _)| *q != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

fn laurent_det(grid: &[Vec<MatSeq>]) -> MatSeq {
    let n = grid.len();
    if n == 1 {
        return grid[0][0].clone();
    }
    let mut acc = MatSeq::zero(1, 1);
    for (q, e) in grid[0].iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let term = e.convolve(&laurent_det(&minor(grid, 0, q))).unwrap();
        acc = if q % 2 == 0 {
            acc.add(&term).unwrap()
        } else {
            acc.sub(&term).unwrap()
        };
    }
    acc
}

/// Default interpolation window for a jet of order `m`: `m+1` consecutive
/// integers centred at 0, shifted left on a tie.
pub fn centered_support(m: usize) -> (i64, i64) {
    let lo = -(m as i64 + 1) / 2;
    (lo, lo + m as i64)
}

/// Scalar sequence `c` supported in `support` with `ĉ^{(j)}(0) = target[j]`
/// for `j = 0..m`. Longer windows are resolved with free coefficients zero.
pub fn jet_interpolate(target: &Jet, support: Option<(i64, i64)>) -> Result<MatSeq> {
    if target.shape() != (1, 1) {
        return Err(Error::DimensionMismatch(
            "jet_interpolate needs a scalar jet".into(),
        ));
    }
    let m = target.order();
    let (lo, hi) = support.unwrap_or_else(|| centered_support(m));
    let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
    if len < m + 1 {
        return Err(Error::SupportTooShort { len, order: m });
    }
    let mut sys = CMat::zeros(m + 1, len);
    let mut rhs = CMat::zeros(m + 1, 1);
    for (c, k) in (lo..=hi).enumerate() {
        let base = -(CRat::from_int(k) * CRat::i());
        let mut w = CRat::one();
        for j in 0..=m {
            sys[(j, c)] = w.clone();
            w = &w * &base;
        }
    }
    for j in 0..=m {
        rhs[(j, 0)] = target.value(j).clone();
    }
    let x = sys
        .solve(&rhs)
        .expect("rows are linearly independent on distinct integers");
    Ok(MatSeq::scalar(
        lo,
        (0..len).map(|c| x[(c, 0)].clone()).collect(),
    ))
}

/// Minimum of `|ĉ(ξ)|` over `samples` equispaced points of `[−π, π)`.
pub fn sampled_min_modulus(c: &MatSeq, samples: usize) -> f64 {
    (0..samples)
        .map(|t| {
            let xi = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * t as f64 / samples as f64;
            c.symbol_at(xi)[0][0].norm()
        })
        .fold(f64::INFINITY, f64::min)
}
