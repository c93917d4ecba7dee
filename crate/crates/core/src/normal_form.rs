//! Normal form of a matrix mask and the factorization `â(ξ) = V̂(2ξ) b̂(ξ) V̂(ξ)⁻¹`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Point};
use crate::matrix::CMat;
use crate::scalar::CRat;
use crate::seq::{jet_interpolate, MatSeq};
use crate::sum_rules::sum_rules_order;

/// A strongly invertible `U` with `ŷÛ = (1 + O(|ξ|), O(|ξ|^{m+1}), …)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    pub u: MatSeq,
    /// Column swapped with the first one when `ŷ(0)e₁ = 0`.
    pub swapped: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub u: MatSeq,
    pub u_inv: MatSeq,
    pub a_ring: MatSeq,
    pub v: MatSeq,
    pub b: MatSeq,
    /// Jet order used; the mask has `m+1` sum rules.
    pub m: usize,
    pub swapped: Option<usize>,
}

fn swap_matrix(r: usize, p: usize) -> CMat {
    let mut s = CMat::identity(r);
    s[(0, 0)] = CRat::zero();
    s[(p, p)] = CRat::zero();
    s[(0, p)] = CRat::one();
    s[(p, 0)] = CRat::one();
    s
}

/// `U = P·(1/ŷ₁(0)) [[δ, −u₂, …, −u_r], [0, I]]` where `û_ℓ` matches
/// `ŷ_ℓ/ŷ₁` through order `m` on `support_hint` (default `[0, m]`), and `P`
/// swaps a nonzero entry of `ŷ(0)` into first position if needed.
pub fn build_u(matching: &Jet, support_hint: Option<(i64, i64)>) -> Result<Transform> {
    let (rows, r) = matching.shape();
    if rows != 1 {
        return Err(Error::DimensionMismatch(
            "matching jet must be a row".into(),
        ));
    }
    let m = matching.order();
    let y0 = matching.get(0);
    let first = (0..r)
        .find(|&p| !y0[(0, p)].is_zero())
        .ok_or(Error::ZeroMatchingValue)?;
    let swapped = (first != 0).then_some(first);
    let perm = swap_matrix(r, first);
    let y = Jet::new(
        Point::Zero,
        matching.derivs().iter().map(|d| d * &perm).collect(),
    )?;
    let y1 = y.entry(0, 0);
    let scale = y1.value(0).inv().expect("nonzero");
    let hint = support_hint.unwrap_or((0, m as i64));
    let zero = MatSeq::zero(1, 1);
    let d = MatSeq::delta(1);
    let mut grid = vec![vec![zero.clone(); r]; r];
    grid[0][0] = d.clone();
    for (l, slot) in grid[0].iter_mut().enumerate().skip(1) {
        let target = y.entry(0, l).div_scalar(&y1)?;
        *slot = jet_interpolate(&target, Some(hint))?.scale(&-CRat::one());
    }
    for (l, row) in grid.iter_mut().enumerate().skip(1) {
        row[l] = d.clone();
    }
    let u = MatSeq::from_entries(&grid)?.scale(&scale).left_mul(&perm)?;
    Ok(Transform { u, swapped })
}

/// `å` with `å̂(ξ) = Û(2ξ)⁻¹ â(ξ) Û(ξ)`.
pub fn transform_mask(a: &MatSeq, u: &MatSeq) -> Result<MatSeq> {
    let u_inv = u.strong_inverse()?;
    u_inv.upsample(2).convolve(a)?.convolve(u)
}

/// Divides every entry by `1 − z²` exactly.
fn div_one_minus_z2(p: &MatSeq) -> Result<MatSeq> {
    let Some((lo, hi)) = p.support() else {
        return Ok(p.clone());
    };
    // q(k) − q(k−2) = p(k)
    let mut q: Vec<CMat> = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let i = (k - lo) as usize;
        let mut v = p.at(k);
        if i >= 2 {
            v.add_assign_ref(&q[i - 2]);
        }
        q.push(v);
    }
    let n = q.len();
    if q[n.saturating_sub(2)..].iter().any(|c| !c.is_zero()) {
        return Err(Error::DivisionNotExact(format!(
            "division by 1 - z^2 of a sequence on [{lo}, {hi}]"
        )));
    }
    MatSeq::new(p.rows(), p.cols(), lo, q)
}

/// Jet checks on `å`: `å₁₁(0) = 1` and `å₁₂ = O(|ξ|^{m+1})` at 0; with
/// `at_pi`, also the whole top row is `O(|ξ|^{m+1})` at `π`.
pub fn check_normal_form(
    a_ring: &MatSeq,
    m: usize,
    at_pi: bool,
) -> std::result::Result<(), String> {
    let j0 = a_ring.symbol_jet(Point::Zero, m);
    if j0.get(0)[(0, 0)] != CRat::one() {
        return Err(format!("top-left symbol at 0 is {}", j0.get(0)[(0, 0)]));
    }
    for (j, d) in j0.derivs().iter().enumerate() {
        if let Some(q) = (1..a_ring.cols()).find(|&q| !d[(0, q)].is_zero()) {
            return Err(format!(
                "top-right block derivative {j} at 0 is nonzero in column {}",
                q + 1
            ));
        }
    }
    if at_pi {
        let jp = a_ring.symbol_jet(Point::Pi, m);
        for (j, d) in jp.derivs().iter().enumerate() {
            if (0..a_ring.cols()).any(|q| !d[(0, q)].is_zero()) {
                return Err(format!("top row derivative {j} at pi is nonzero"));
            }
        }
    }
    Ok(())
}

/// Factorizes `a` assuming `m_plus_1` sum rules.
pub fn factorize(a: &MatSeq, m_plus_1: usize) -> Result<NormalForm> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("mask must be square".into()));
    }
    let report = sum_rules_order(a, Some(m_plus_1))?;
    if m_plus_1 == 0 || report.order < m_plus_1 {
        return Err(Error::InsufficientSumRules {
            have: report.order,
            need: m_plus_1.max(1),
        });
    }
    let m = m_plus_1 - 1;
    let jet = report.matching.expect("order >= 1");
    let Transform { u, swapped } = build_u(&jet, None)?;
    let u_inv = u.strong_inverse()?;
    let a_ring = u_inv.upsample(2).convolve(a)?.convolve(&u)?;
    check_normal_form(&a_ring, m, true).map_err(Error::DivisionNotExact)?;

    let r = a.rows();
    let mut v_cols: Vec<MatSeq> = (0..r).map(|q| u.column(q)).collect();
    v_cols[0] = v_cols[0].difference_power(m_plus_1);
    let v = MatSeq::from_columns(&v_cols)?;

    let mut b_cols: Vec<MatSeq> = (0..r).map(|q| a_ring.column(q)).collect();
    b_cols[0] = b_cols[0].difference_power(m_plus_1);
    let b0 = MatSeq::from_columns(&b_cols)?;
    let mut top = b0.row(0);
    for _ in 0..m_plus_1 {
        top = div_one_minus_z2(&top)?;
    }
    let grid: Vec<Vec<MatSeq>> = (0..r)
        .map(|p| {
            (0..r)
                .map(|q| {
                    if p == 0 {
                        top.entry(0, q)
                    } else {
                        b0.entry(p, q)
                    }
                })
                .collect()
        })
        .collect();
    let b = MatSeq::from_entries(&grid)?;
    if v.upsample(2).convolve(&b)? != a.convolve(&v)? {
        return Err(Error::DivisionNotExact(
            "V(2ξ)b(ξ) differs from a(ξ)V(ξ)".into(),
        ));
    }
    Ok(NormalForm {
        u,
        u_inv,
        a_ring,
        v,
        b,
        m,
        swapped,
    })
}

/// Outcome of the exact identities behind a factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    /// `U * U⁻¹ = δI`.
    pub inverse: bool,
    /// `Û(2ξ) å̂(ξ) = â(ξ) Û(ξ)`.
    pub conjugation: bool,
    /// `V̂(2ξ) b̂(ξ) = â(ξ) V̂(ξ)`.
    pub factorization: bool,
    /// Normal-form jet checks on `å`, including the conditions at `π`.
    pub normal_form: bool,
    /// `ŷ(ξ) V̂(ξ) = O(|ξ|^{m+1})` column by column.
    pub dual_space: bool,
}

impl Verification {
    pub fn all(&self) -> bool {
        self.inverse
            && self.conjugation
            && self.factorization
            && self.normal_form
            && self.dual_space
    }
}

pub fn verify(a: &MatSeq, nf: &NormalForm, matching: &Jet) -> Result<Verification> {
    let r = a.rows();
    let y = matching.truncate(nf.m);
    Ok(Verification {
        inverse: nf.u.convolve(&nf.u_inv)? == MatSeq::delta(r),
        conjugation: nf.u.upsample(2).convolve(&nf.a_ring)? == a.convolve(&nf.u)?,
        factorization: nf.v.upsample(2).convolve(&nf.b)? == a.convolve(&nf.v)?,
        normal_form: check_normal_form(&nf.a_ring, nf.m, true).is_ok(),
        dual_space: y.mul(&nf.v.symbol_jet(Point::Zero, nf.m))?.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::iterate_mask;

    fn bspline(m: usize) -> MatSeq {
        let half = MatSeq::from_ratios(0, &[(1, 2), (1, 2)]);
        (0..m).fold(MatSeq::delta(1), |a, _| a.convolve(&half).unwrap())
    }

    #[test]
    fn scalar_factorizations() {
        let nf = factorize(&bspline(2), 2).unwrap();
        assert_eq!(nf.u, MatSeq::delta(1));
        assert_eq!(nf.v, MatSeq::from_ratios(0, &[(1, 1), (-2, 1), (1, 1)]));
        assert_eq!(nf.b, MatSeq::from_ratios(0, &[(1, 4)]));
        let nf = factorize(&bspline(1), 1).unwrap();
        assert_eq!(nf.b, MatSeq::from_ratios(0, &[(1, 2)]));
        assert!(matches!(
            factorize(&bspline(2), 3),
            Err(Error::InsufficientSumRules { have: 2, need: 3 })
        ));
    }

    #[test]
    fn hermite_row_transform() {
        let t = build_u(&Jet::hermite_row(2, 1), Some((0, 1))).unwrap();
        assert_eq!(t.swapped, None);
        // û₂ has jet (0, i): u₂ = δ − δ(·−1) = ∇δ.
        let want = MatSeq::from_entries(&[
            vec![MatSeq::delta(1), MatSeq::from_ratios(0, &[(-1, 1), (1, 1)])],
            vec![MatSeq::zero(1, 1), MatSeq::delta(1)],
        ])
        .unwrap();
        assert_eq!(t.u, want);
        let y = Jet::hermite_row(2, 1);
        let prod = y.mul(&t.u.symbol_jet(Point::Zero, 1)).unwrap();
        assert_eq!(prod.get(0)[(0, 0)], CRat::one());
        assert!((0..=1).all(|j| prod.get(j)[(0, 1)].is_zero()));
    }

    #[test]
    fn swapped_transform() {
        let y = Jet::new(
            Point::Zero,
            vec![
                CMat::from_ratios(&[&[(0, 1), (1, 1)]]),
                CMat::from_ratios(&[&[(1, 1), (0, 1)]]),
            ],
        )
        .unwrap();
        let t = build_u(&y, None).unwrap();
        assert_eq!(t.swapped, Some(1));
        let prod = y.mul(&t.u.symbol_jet(Point::Zero, 1)).unwrap();
        assert_eq!(prod.get(0)[(0, 0)], CRat::one());
        assert!((0..=1).all(|j| prod.get(j)[(0, 1)].is_zero()));
        assert!(t.u.strong_inverse().is_ok());
    }

    #[test]
    fn exact_division() {
        let p = MatSeq::from_ratios(0, &[(1, 1), (0, 1), (-1, 1)]);
        assert_eq!(div_one_minus_z2(&p).unwrap(), MatSeq::delta(1));
        let bad = MatSeq::from_ratios(0, &[(1, 1), (1, 1)]);
        assert!(matches!(
            div_one_minus_z2(&bad),
            Err(Error::DivisionNotExact(_))
        ));
    }

    #[test]
    fn iterated_factorization() {
        let a = bspline(3);
        let nf = factorize(&a, 3).unwrap();
        for n in 1..=4 {
            let an = iterate_mask(&a, n).unwrap();
            let bn = iterate_mask(&nf.b, n).unwrap();
            assert_eq!(
                an.convolve(&nf.v).unwrap(),
                nf.v.upsample(1 << n).convolve(&bn).unwrap()
            );
        }
    }
}
