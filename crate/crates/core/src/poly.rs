//! Vector polynomials, their convolution with sequences, and polynomial
//! reproduction by subdivision.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Point};
use crate::matrix::CMat;
use crate::scalar::{factorial, CRat};
use crate::seq::MatSeq;

/// Largest degree accepted by [`VecPoly`].
pub const MAX_DEGREE: usize = 16;

/// Row of `r` polynomials, `p(x)_ℓ = Σ_j c[j][ℓ] x^j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VecPoly {
    cols: usize,
    // coeffs[j] is the 1×r coefficient row of x^j; no trailing zero rows.
    coeffs: Vec<CMat>,
}

impl VecPoly {
    pub fn zero(cols: usize) -> Self {
        VecPoly {
            cols,
            coeffs: Vec::new(),
        }
    }

    /// From coefficient rows `c[j]` (each `1×r`) of `x^j`.
    pub fn new(cols: usize, mut coeffs: Vec<CMat>) -> Result<Self> {
        if coeffs.iter().any(|c| c.shape() != (1, cols)) {
            return Err(Error::DimensionMismatch(
                "polynomial coefficient rows".into(),
            ));
        }
        while coeffs.last().is_some_and(CMat::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::DegreeTooLarge(coeffs.len() - 1));
        }
        Ok(VecPoly { cols, coeffs })
    }

    /// Scalar polynomial from ascending coefficients.
    pub fn scalar(coeffs: Vec<CRat>) -> Result<Self> {
        Self::new(1, coeffs.into_iter().map(CMat::scalar).collect())
    }

    /// `x^j / j!`.
    pub fn normalized_monomial(j: usize) -> Result<Self> {
        let mut c = vec![CRat::zero(); j + 1];
        c[j] = factorial(j).inv().unwrap();
        Self::scalar(c)
    }

    /// Stacks scalar polynomials into a row.
    pub fn from_components(parts: &[VecPoly]) -> Result<Self> {
        if parts.iter().any(|p| p.cols != 1) {
            return Err(Error::DimensionMismatch("components must be scalar".into()));
        }
        let len = parts.iter().map(|p| p.coeffs.len()).max().unwrap_or(0);
        let rows = (0..len)
            .map(|j| {
                let row = parts.iter().map(|p| p.coeff(j, 0)).collect();
                CMat::from_rows(vec![row]).unwrap()
            })
            .collect();
        Self::new(parts.len(), rows)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, j: usize, l: usize) -> CRat {
        self.coeffs
            .get(j)
            .map_or_else(CRat::zero, |c| c[(0, l)].clone())
    }

    pub fn component(&self, l: usize) -> VecPoly {
        VecPoly::scalar((0..self.coeffs.len()).map(|j| self.coeff(j, l)).collect()).unwrap()
    }

    pub fn eval(&self, x: &CRat) -> CMat {
        let mut acc = CMat::zeros(1, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(x) + c;
        }
        acc
    }

    /// `k`-th derivative.
    pub fn derivative(&self, k: usize) -> VecPoly {
        if k >= self.coeffs.len() {
            return Self::zero(self.cols);
        }
        let coeffs = (k..self.coeffs.len())
            .map(|j| {
                let f = &factorial(j) / &factorial(j - k);
                self.coeffs[j].scale(&f)
            })
            .collect();
        VecPoly {
            cols: self.cols,
            coeffs,
        }
    }

    /// `x ↦ p(s·x)`.
    pub fn dilate(&self, s: &CRat) -> VecPoly {
        let mut w = CRat::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c.scale(&w);
                w = &w * s;
                out
            })
            .collect();
        Self::new(self.cols, coeffs).unwrap()
    }

    /// `x ↦ p(x − τ)`.
    pub fn translate(&self, tau: &CRat) -> VecPoly {
        // Horner in (x − τ).
        let lin = VecPoly::scalar(vec![-tau, CRat::one()]).unwrap();
        let mut acc = Self::zero(self.cols);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul_scalar_poly(&lin)
                .add(&VecPoly::new(self.cols, vec![c.clone()]).unwrap());
        }
        acc
    }

    pub fn add(&self, o: &VecPoly) -> VecPoly {
        assert_eq!(self.cols, o.cols, "polynomial widths differ");
        let len = self.coeffs.len().max(o.coeffs.len());
        let z = CMat::zeros(1, self.cols);
        let coeffs = (0..len)
            .map(|j| self.coeffs.get(j).unwrap_or(&z) + o.coeffs.get(j).unwrap_or(&z))
            .collect();
        Self::new(self.cols, coeffs).unwrap()
    }

    pub fn scale(&self, s: &CRat) -> VecPoly {
        Self::new(self.cols, self.coeffs.iter().map(|c| c.scale(s)).collect()).unwrap()
    }

    /// `x ↦ p(x) M` for a constant `r×t` matrix.
    pub fn right_mul(&self, m: &CMat) -> VecPoly {
        assert_eq!(self.cols, m.rows(), "polynomial times matrix shape");
        Self::new(m.cols(), self.coeffs.iter().map(|c| c * m).collect()).unwrap()
    }

    /// Product with a scalar polynomial `s(x)`.
    pub fn mul_scalar_poly(&self, s: &VecPoly) -> VecPoly {
        assert_eq!(s.cols, 1, "multiplier must be scalar");
        if self.is_zero() || s.is_zero() {
            return Self::zero(self.cols);
        }
        let mut coeffs = vec![CMat::zeros(1, self.cols); self.coeffs.len() + s.coeffs.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, d) in s.coeffs.iter().enumerate() {
                coeffs[i + j].add_assign_ref(&c.scale(&d[(0, 0)]));
            }
        }
        Self::new(self.cols, coeffs).expect("degree within bound")
    }

    /// Restriction to the integers `lo..=hi` as a `1×r` sequence.
    pub fn restrict(&self, lo: i64, hi: i64) -> MatSeq {
        let vals = (lo..=hi).map(|k| self.eval(&CRat::from_int(k))).collect();
        MatSeq::new(1, self.cols, lo, vals).unwrap()
    }
}

/// `(p * v)(x) = Σ_k p(x − k) v(k) = Σ_j ((−i)^j/j!) p^{(j)}(x) v̂^{(j)}(0)`.
pub fn poly_conv(p: &VecPoly, v: &MatSeq) -> Result<VecPoly> {
    if p.cols != 1 || v.rows() != 1 {
        return Err(Error::DimensionMismatch(
            "poly_conv needs a scalar polynomial and a row sequence".into(),
        ));
    }
    let m = p.degree().unwrap_or(0);
    let jet = v.symbol_jet(Point::Zero, m);
    let mut acc = VecPoly::zero(v.cols());
    for j in 0..=m {
        let c = &CRat::neg_i_pow(j as u32) / &factorial(j);
        let term = p.derivative(j).scale(&c).right_mul(jet.get(j));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `p_j(x) = Σ_{k≤j} ((−i)^k / (k!(j−k)!)) x^{j−k} ŷ^{(k)}(0)` for `j = 0..m`.
pub fn eigen_polys(matching: &Jet) -> Result<Vec<VecPoly>> {
    if matching.shape().0 != 1 {
        return Err(Error::DimensionMismatch(
            "matching jet must be a row".into(),
        ));
    }
    if matching.get(0).is_zero() {
        return Err(Error::ZeroMatchingValue);
    }
    let r = matching.shape().1;
    (0..=matching.order())
        .map(|j| {
            let coeffs = (0..=j)
                .map(|d| {
                    // coefficient of x^d comes from k = j − d
                    let k = j - d;
                    let c = &CRat::neg_i_pow(k as u32) / &(&factorial(k) * &factorial(d));
                    matching.get(k).scale(&c)
                })
                .collect();
            VecPoly::new(r, coeffs)
        })
        .collect()
}

/// Row jet `v̂^{(j)}(0) = j! i^j q^{(m−j)}(0)`, `m = deg q`, so that
/// `q = (·)^m/m! * v`.
pub fn matching_jet_from_poly(q: &VecPoly) -> Result<Jet> {
    let m = q.degree().ok_or(Error::ZeroMatchingValue)?;
    let derivs = (0..=m)
        .map(|j| {
            let c = &factorial(j) * &CRat::i_pow(j as u32);
            q.derivative(m - j).eval(&CRat::zero()).scale(&c)
        })
        .collect();
    Jet::new(Point::Zero, derivs)
}

/// Whether `v̂(2ξ) â(ξ+π) = O(|ξ|^{m+1})` with `v` recovered from `q`.
fn poly_precondition(a: &MatSeq, v: &Jet) -> Result<bool> {
    let m = v.order();
    Ok(v.dilate(1).mul(&a.symbol_jet(Point::Pi, m))?.is_zero())
}

/// The polynomial equal to `S_a q` on the integers:
/// `Σ_k ((−i)^k/(k! 2^k)) q^{(k)}(x/2) â^{(k)}(0)`.
pub fn subdivide_poly(a: &MatSeq, q: &VecPoly) -> Result<VecPoly> {
    if a.rows() != a.cols() || q.cols != a.rows() {
        return Err(Error::DimensionMismatch(
            "mask and polynomial widths differ".into(),
        ));
    }
    let Some(m) = q.degree() else {
        return Ok(q.clone());
    };
    let v = matching_jet_from_poly(q)?;
    if !poly_precondition(a, &v)? {
        return Err(Error::PreconditionViolated(format!(
            "the subdivided degree-{m} polynomial is not a polynomial on Z"
        )));
    }
    let jet = a.symbol_jet(Point::Zero, m);
    let half = CRat::ratio(1, 2);
    let mut acc = VecPoly::zero(q.cols);
    for k in 0..=m {
        let c = &CRat::neg_i_pow(k as u32) / &(&factorial(k) * &CRat::pow2(k as i64));
        let dk = q.derivative(k).dilate(&half);
        acc = acc.add(&dk.scale(&c).right_mul(jet.get(k)));
    }
    Ok(acc)
}

/// For each level `n`, whether `v̂_n(ξ+π) = O(|ξ|^{m+1})` where
/// `v̂_n(ξ) = v̂(2ⁿξ) â₁(2^{n−1}ξ) ⋯ â_n(ξ)`.
pub fn check_poly_invariance(a_list: &[MatSeq], v: &MatSeq, m: usize) -> Result<Vec<bool>> {
    let v0 = v.symbol_jet(Point::Zero, m);
    if v0.get(0).is_zero() {
        return Err(Error::ZeroMatchingValue);
    }
    let zero_jets: Vec<Jet> = a_list
        .iter()
        .map(|a| a.symbol_jet(Point::Zero, m))
        .collect();
    let mut out = Vec::with_capacity(a_list.len());
    for n in 1..=a_list.len() {
        // Every factor but the last is 2π-periodic at a multiple of 2π.
        let mut acc = v0.dilate(n as u32);
        for (k, jet) in zero_jets.iter().enumerate().take(n - 1) {
            acc = acc.mul(&jet.dilate((n - 1 - k) as u32))?;
        }
        acc = acc.mul(&a_list[n - 1].symbol_jet(Point::Pi, m))?;
        out.push(acc.is_zero());
    }
    Ok(out)
}
