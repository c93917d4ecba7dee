//! The vector subdivision operator, iterated masks and Hermite refinement.

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::samples::DyadicSamples;
use crate::scalar::CRat;
use crate::seq::MatSeq;

/// `(S_a v)(j) = 2 Σ_k v(k) a(j − 2k)`, i.e. `2 v̂(2ξ) â(ξ)`.
pub fn apply_subdivision(a: &MatSeq, v: &MatSeq) -> Result<MatSeq> {
    check_square(a)?;
    Ok(v.upsample(2).convolve(a)?.scale(&CRat::from_int(2)))
}

/// `a_n` with `â_n(ξ) = â(2^{n−1}ξ) ⋯ â(2ξ) â(ξ)`.
pub fn iterate_mask(a: &MatSeq, n: usize) -> Result<MatSeq> {
    check_square(a)?;
    assert!(n >= 1, "iterate_mask needs n >= 1");
    let mut an = a.clone();
    for _ in 1..n {
        an = an.upsample(2).convolve(a)?;
    }
    Ok(an)
}

/// `D^{−n} = diag(1, 2^n, …, 2^{(r−1)n})`.
pub fn d_inv_pow(r: usize, n: i64) -> CMat {
    let d: Vec<CRat> = (0..r).map(|l| CRat::pow2(l as i64 * n)).collect();
    CMat::diag(&d)
}

/// Hermite data `w_n` at refinement level `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteData {
    pub level: usize,
    pub values: MatSeq,
}

/// `w_n = (S_aⁿ w₀) D^{−n}`.
pub fn hermite_refine(a: &MatSeq, w0: &MatSeq, n: usize) -> Result<HermiteData> {
    check_square(a)?;
    if w0.cols() != a.rows() {
        return Err(Error::DimensionMismatch(
            "initial data width must match the mask".into(),
        ));
    }
    let mut v = w0.clone();
    for _ in 0..n {
        v = apply_subdivision(a, &v)?;
    }
    let values = v.right_mul(&d_inv_pow(a.rows(), n as i64))?;
    Ok(HermiteData { level: n, values })
}

/// `a(0) = diag(2^{−1}, …, 2^{−r})` and `a(2k) = 0` for `k ≠ 0`.
pub fn is_interpolatory(a: &MatSeq) -> bool {
    if a.rows() != a.cols() {
        return false;
    }
    let d: Vec<CRat> = (1..=a.rows()).map(|l| CRat::pow2(-(l as i64))).collect();
    a.at(0) == CMat::diag(&d) && a.iter().all(|(k, _)| k == 0 || k % 2 != 0)
}

/// Samples `2ⁿ a_n(k) D^{−n}` at `x = k/2ⁿ` for `x` in `window`
/// (default `fsupp(a)`). Column `ℓ+1` tracks the `ℓ`-th derivative.
pub fn basis_samples(a: &MatSeq, n: usize, window: Option<(i64, i64)>) -> Result<DyadicSamples> {
    let an = iterate_mask(a, n)?;
    let scale = d_inv_pow(a.rows(), n as i64).scale(&CRat::pow2(n as i64));
    let window = window.or(a.support()).unwrap_or((0, 0));
    Ok(DyadicSamples::from_fn(n, window, |k| &an.at(k) * &scale))
}

fn check_square(a: &MatSeq) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("mask must be square".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::tests::arb_seq;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn quad() -> MatSeq {
        MatSeq::from_ratios(0, &[(1, 4), (1, 2), (1, 4)])
    }

    #[test]
    fn subdivision_examples() {
        let a = quad();
        assert_eq!(
            apply_subdivision(&a, &MatSeq::delta(1)).unwrap(),
            a.scale(&CRat::from_int(2))
        );
        let half = MatSeq::delta(2).scale(&CRat::ratio(1, 2));
        let v = MatSeq::new(
            1,
            2,
            -1,
            vec![
                CMat::from_ratios(&[&[(1, 1), (2, 1)]]),
                CMat::from_ratios(&[&[(3, 1), (-1, 2)]]),
            ],
        )
        .unwrap();
        let s = apply_subdivision(&half, &v).unwrap();
        assert_eq!(s, v.upsample(2));
        // Constant data stays constant away from the boundary.
        let ones = MatSeq::scalar(-10, vec![CRat::one(); 21]);
        let s = apply_subdivision(&a, &ones).unwrap();
        for j in -15..=15 {
            assert_eq!(s.at(j)[(0, 0)], CRat::one());
        }
    }

    #[test]
    fn iterated_quadratic_bspline() {
        let a2 = iterate_mask(&quad(), 2).unwrap();
        assert_eq!(
            a2,
            MatSeq::from_ratios(
                0,
                &[
                    (1, 16),
                    (2, 16),
                    (3, 16),
                    (4, 16),
                    (3, 16),
                    (2, 16),
                    (1, 16)
                ]
            )
        );
        assert_eq!(iterate_mask(&quad(), 1).unwrap(), quad());
    }

    #[test]
    fn interpolatory_detection() {
        assert!(is_interpolatory(&MatSeq::from_ratios(
            -1,
            &[(1, 4), (1, 2), (1, 4)]
        )));
        assert!(!is_interpolatory(&quad()));
        let a = MatSeq::new(
            2,
            2,
            -1,
            vec![
                CMat::from_ratios(&[&[(1, 3), (5, 1)], &[(2, 1), (7, 1)]]),
                CMat::from_ratios(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 4)]]),
                CMat::from_ratios(&[&[(1, 1), (1, 1)], &[(1, 1), (1, 1)]]),
            ],
        )
        .unwrap();
        assert!(is_interpolatory(&a));
    }

    #[test]
    fn hat_samples_lag_by_one_grid_step() {
        // 2ⁿ a_n(k) = hat((k+1)/2ⁿ) exactly, so the deviation from hat(k/2ⁿ) is 2⁻ⁿ.
        let s = basis_samples(&quad(), 8, None).unwrap();
        assert_eq!(s.len(), 2 * 256 + 1);
        let hat = |k: i64| CRat::ratio((256 - (k - 256).abs()).max(0), 256);
        let mut dev = CRat::zero();
        for (k, v) in s.iter() {
            assert_eq!(v[(0, 0)], hat(k + 1));
            let d = &v[(0, 0)] - &hat(k);
            if d.norm_sqr() > dev.norm_sqr() {
                dev = d;
            }
        }
        assert_eq!(dev.norm_sqr(), CRat::ratio(1, 256 * 256).re);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn iterated_mask_matches_repeated_subdivision(a in arb_seq(2, 2), n in 1usize..=4) {
            let an = iterate_mask(&a, n).unwrap();
            let mut v = MatSeq::delta(2);
            for _ in 0..n {
                v = apply_subdivision(&a, &v).unwrap();
            }
            prop_assert_eq!(v, an.scale(&CRat::pow2(n as i64)));
        }

        #[test]
        fn cocycle(a in arb_seq(1, 1), m in 1usize..=3, n in 1usize..=3) {
            let lhs = iterate_mask(&a, m + n).unwrap();
            let am = iterate_mask(&a, m).unwrap().upsample(1 << n);
            let rhs = am.convolve(&iterate_mask(&a, n).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn level_dependent_form(a in arb_seq(2, 2), w in arb_seq(1, 2), n in 1usize..=4) {
            let prev = hermite_refine(&a, &w, n - 1).unwrap().values;
            let an = a
                .left_mul(&d_inv_pow(2, -(n as i64 - 1))).unwrap()
                .right_mul(&d_inv_pow(2, n as i64)).unwrap();
            let next = apply_subdivision(&an, &prev).unwrap();
            prop_assert_eq!(next, hermite_refine(&a, &w, n).unwrap().values);
        }
    }
}
