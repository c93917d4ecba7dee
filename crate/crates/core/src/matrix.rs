//! Dense matrices over [`CRat`] and exact Gaussian elimination.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::CRat;

/// Row-major dense matrix of exact complex rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<CRat>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![CRat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = CRat::one();
        }
        m
    }

    pub fn diag(entries: &[CRat]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (k, e) in entries.iter().enumerate() {
            m[(k, k)] = e.clone();
        }
        m
    }

    pub fn scalar(c: CRat) -> Self {
        CMat {
            rows: 1,
            cols: 1,
            data: vec![c],
        }
    }

    pub fn from_rows(rows: Vec<Vec<CRat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "matrix rows must be nonempty and of equal length".into(),
            ));
        }
        Ok(CMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer ratios `(num, den)`.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        let v = rows
            .iter()
            .map(|row| row.iter().map(|&(n, d)| CRat::ratio(n, d)).collect())
            .collect();
        Self::from_rows(v).expect("well-formed literal")
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, r: usize) -> &[CRat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &CRat> {
        self.data.iter()
    }

    pub fn to_rows(&self) -> Vec<Vec<CRat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> CMat {
        let mut out = CMat::zeros(self.rows, 1);
        for r in 0..self.rows {
            out[(r, 0)] = self[(r, c)].clone();
        }
        out
    }

    pub fn transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn scale(&self, s: &CRat) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn try_mul(&self, o: &CMat) -> Result<CMat> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(self.mul_unchecked(o))
    }

    fn mul_unchecked(&self, o: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = &o[(k, c)];
                    if !b.is_zero() {
                        out.data[r * o.cols + c] += &(a * b);
                    }
                }
            }
        }
        out
    }

    /// `self += a * b`, skipping zero work.
    pub fn add_mul_assign(&mut self, a: &CMat, b: &CMat) {
        debug_assert_eq!(a.cols, b.rows);
        debug_assert_eq!((self.rows, self.cols), (a.rows, b.cols));
        for r in 0..a.rows {
            for k in 0..a.cols {
                let x = &a[(r, k)];
                if x.is_zero() {
                    continue;
                }
                for c in 0..b.cols {
                    let y = &b[(k, c)];
                    if !y.is_zero() {
                        self.data[r * b.cols + c] += &(x * y);
                    }
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, o: &CMat) {
        debug_assert_eq!(self.shape(), o.shape());
        for (x, y) in self.data.iter_mut().zip(&o.data) {
            *x += y;
        }
    }

    pub fn pow(&self, e: u32) -> CMat {
        let mut out = CMat::identity(self.rows);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Reduced row echelon form with deterministic pivoting: the pivot column
    /// is the leftmost column with a nonzero entry at or below the current
    /// row, and the pivot row is the smallest such row index. Returns the
    /// pivot columns.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self[(row, col)].inv().unwrap();
            for c in col..self.cols {
                let v = &self[(row, c)] * &inv;
                self[(row, c)] = v;
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let f = self[(r, col)].clone();
                for c in col..self.cols {
                    if self[(row, c)].is_zero() {
                        continue;
                    }
                    let d = &f * &self[(row, c)];
                    self[(r, c)] -= &d;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of the right nullspace `{x : self x = 0}` as columns, one per
    /// free variable (free variable set to 1, the others to 0).
    pub fn nullspace(&self) -> Vec<CMat> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = CMat::zeros(self.cols, 1);
                x[(f, 0)] = CRat::one();
                for (r, &p) in pivots.iter().enumerate() {
                    x[(p, 0)] = -m[(r, f)].clone();
                }
                x
            })
            .collect()
    }

    /// Solves `self x = rhs` (rhs a column). Free variables are set to zero.
    /// Returns `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &CMat) -> Option<CMat> {
        assert_eq!(rhs.shape(), (self.rows, 1));
        let mut aug = CMat::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = rhs[(r, 0)].clone();
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = CMat::zeros(self.cols, 1);
        for (r, &p) in pivots.iter().enumerate() {
            x[(p, 0)] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Exact inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<CMat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = CMat::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = CRat::one();
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = CMat::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = aug[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    /// Coefficients `c_0..c_n` of `det(λI - self) = Σ c_k λ^k` (monic),
    /// computed by the Faddeev–LeVerrier recursion in exact arithmetic.
    pub fn char_poly(&self) -> Vec<CRat> {
        assert_eq!(self.rows, self.cols, "char_poly of a non-square matrix");
        let n = self.rows;
        let mut coeffs = vec![CRat::zero(); n + 1];
        coeffs[n] = CRat::one();
        let mut mk = CMat::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self * &mk;
            for d in 0..n {
                next[(d, d)] += &coeffs[n - k + 1];
            }
            mk = next;
            let am = self * &mk;
            let tr = (0..n).fold(CRat::zero(), |acc, d| &acc + &am[(d, d)]);
            coeffs[n - k] = -(&tr / &CRat::from_int(k as i64));
        }
        coeffs
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = CRat;
    fn index(&self, (r, c): (usize, usize)) -> &CRat {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut CRat {
        &mut self.data[r * self.cols + c]
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    /// Panics on a shape mismatch; use [`CMat::try_mul`] for a checked product.
    fn mul(self, o: &CMat) -> CMat {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        self.mul_unchecked(o)
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, o: &CMat) -> CMat {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, o: &CMat) -> CMat {
        assert_eq!(self.shape(), o.shape(), "matrix difference shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Display for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}
