//! Sum rules, matching filters, Hermite-mask verification and construction.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Point};
use crate::matrix::CMat;
use crate::scalar::{binomial, factorial, CRat};
use crate::seq::MatSeq;
use crate::subdivision::is_interpolatory;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    NoSimpleEigenvalueOne,
    /// `1 − 2^j â(0)` is singular.
    ResonantEigenvalue(usize),
    /// `ŷ(2ξ)â(ξ+π)` has a nonzero derivative of order `j` at 0.
    PiConditionFails(usize),
    /// `ŷ(2ξ)â(ξ) − ŷ(ξ)` has a nonzero derivative of order `j` at 0.
    ZeroConditionFails(usize),
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureReason::NoSimpleEigenvalueOne => {
                write!(f, "1 is not a simple eigenvalue of a^(0)")
            }
            FailureReason::ResonantEigenvalue(j) => {
                write!(f, "resonant eigenvalue 2^-{j} of a^(0)")
            }
            FailureReason::PiConditionFails(j) => {
                write!(f, "condition at pi fails at derivative {j}")
            }
            FailureReason::ZeroConditionFails(j) => {
                write!(f, "condition at 0 fails at derivative {j}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumRuleReport {
    /// Number of sum rules (the `m+1`).
    pub order: usize,
    /// Matching jet through order `order − 1`, present iff `order ≥ 1`.
    pub matching: Option<Jet>,
    /// Why the probe stopped; `None` if it reached `max_probe`.
    pub failure: Option<FailureReason>,
}

/// Whether 1 is an algebraically simple eigenvalue of `m`.
pub fn has_simple_eigenvalue_one(m: &CMat) -> bool {
    let r = m.rows();
    let shifted = m - &CMat::identity(r);
    shifted.pow(r as u32).rank() + 1 == r
}

/// Left 1-eigenvector of `a0`, scaled so its first nonzero entry is 1, or so
/// that `y · w = 1` when `normalization = Some(w)`.
pub fn left_eigenvector_one(a0: &CMat, normalization: Option<&CMat>) -> Result<CMat> {
    if !has_simple_eigenvalue_one(a0) {
        return Err(Error::NoSimpleEigenvalueOne);
    }
    let r = a0.rows();
    let ns = (a0 - &CMat::identity(r)).transpose().nullspace();
    let y = ns[0].transpose();
    let s = match normalization {
        Some(w) => (&y * w)[(0, 0)].clone(),
        None => y.entries().find(|e| !e.is_zero()).unwrap().clone(),
    };
    let inv = s.inv().ok_or(Error::ZeroMatchingValue)?;
    Ok(y.scale(&inv))
}

/// `Σ_{k<j} C(j,k) 2^k ŷ^{(k)} â^{(j−k)}(0)`.
fn recursion_rhs(y: &[CMat], a0: &Jet, j: usize) -> CMat {
    let mut acc = CMat::zeros(1, a0.shape().1);
    for (k, yk) in y.iter().enumerate().take(j) {
        let c = &binomial(j, k) * &CRat::pow2(k as i64);
        acc.add_mul_assign(&yk.scale(&c), a0.get(j - k));
    }
    acc
}

/// Derivative `j` of `ŷ(2ξ) â(ξ+π)` at 0.
fn pi_term(y: &[CMat], api: &Jet, j: usize) -> CMat {
    let mut acc = CMat::zeros(1, api.shape().1);
    for (k, yk) in y.iter().enumerate().take(j + 1) {
        let c = &binomial(j, k) * &CRat::pow2(k as i64);
        acc.add_mul_assign(&yk.scale(&c), api.get(j - k));
    }
    acc
}

fn next_matching_deriv(y: &[CMat], a0: &Jet, j: usize) -> std::result::Result<CMat, FailureReason> {
    let r = a0.shape().0;
    let m = &CMat::identity(r) - &a0.get(0).scale(&CRat::pow2(j as i64));
    let inv = m.inverse().ok_or(FailureReason::ResonantEigenvalue(j))?;
    Ok(&recursion_rhs(y, a0, j) * &inv)
}

/// Jet of the matching filter through order `m`: `ŷ(0)` is the left
/// 1-eigenvector of `â(0)` and
/// `ŷ^{(j)} = [Σ_{k<j} C(j,k) 2^k ŷ^{(k)} â^{(j−k)}(0)] (I − 2^j â(0))^{−1}`.
pub fn matching_filter_jet(a: &MatSeq, m: usize, normalization: Option<&CMat>) -> Result<Jet> {
    square(a)?;
    let a0 = a.symbol_jet(Point::Zero, m);
    let mut y = vec![left_eigenvector_one(a0.get(0), normalization)?];
    for j in 1..=m {
        let d = next_matching_deriv(&y, &a0, j).map_err(|_| Error::SingularResonance(j))?;
        y.push(d);
    }
    Jet::new(Point::Zero, y)
}

/// `2·(support length) + 2`.
pub fn default_max_probe(a: &MatSeq) -> usize {
    let len = a.support().map_or(0, |(l, r)| (r - l + 1) as usize);
    2 * len + 2
}

/// A prescribed matching-jet entry `ŷ^{(j)}(0) e_{l+1} = value`.
type Pin = (usize, usize, CRat);

/// Solves the sum-rule conditions through order `m` for the jets
/// `ŷ^{(1)}, …, ŷ^{(m)}` given `ŷ(0) = y0`, as one exact linear system.
/// Where `1 − 2^j â(0)` is invertible the solution is the unique recursion
/// value; at a resonance the free entries are set to zero.
fn solve_matching(
    a0: &Jet,
    api: &Jet,
    y0: &CMat,
    m: usize,
    pins: &[Pin],
) -> std::result::Result<Jet, FailureReason> {
    let r = y0.cols();
    if !(y0 * api.get(0)).is_zero() {
        return Err(FailureReason::PiConditionFails(0));
    }
    for (_, l, v) in pins.iter().filter(|p| p.0 == 0) {
        if y0[(0, *l)] != *v {
            return Err(FailureReason::ZeroConditionFails(0));
        }
    }
    if m == 0 {
        return Ok(Jet::new(Point::Zero, vec![y0.clone()]).unwrap());
    }
    let n = r * m;
    let var = |j: usize, p: usize| (j - 1) * r + p;
    // Rows: zero conditions, then π conditions, then pins.
    let mut zero_rows: Vec<(Vec<CRat>, CRat)> = Vec::new();
    let mut pi_rows: Vec<(Vec<CRat>, CRat)> = Vec::new();
    for j in 1..=m {
        for l in 0..r {
            for (pi, jet) in [(false, a0), (true, api)] {
                let mut row = vec![CRat::zero(); n];
                let mut rhs = CRat::zero();
                for k in 0..=j {
                    let c = &binomial(j, k) * &CRat::pow2(k as i64);
                    let d = jet.get(j - k);
                    if k == 0 {
                        for p in 0..r {
                            rhs -= &(&(&c * &y0[(0, p)]) * &d[(p, l)]);
                        }
                    } else {
                        for p in 0..r {
                            row[var(k, p)] += &(&c * &d[(p, l)]);
                        }
                    }
                }
                if pi {
                    pi_rows.push((row, rhs));
                } else {
                    row[var(j, l)] -= &CRat::one();
                    zero_rows.push((row, rhs));
                }
            }
        }
    }
    let pin_rows: Vec<(Vec<CRat>, CRat)> = pins
        .iter()
        .filter(|p| p.0 >= 1 && p.0 <= m)
        .map(|(j, l, v)| {
            let mut row = vec![CRat::zero(); n];
            row[var(*j, *l)] = CRat::one();
            (row, v.clone())
        })
        .collect();
    let solve = |rows: &[&(Vec<CRat>, CRat)]| {
        let mut sys = CMat::zeros(rows.len(), n);
        let mut rhs = CMat::zeros(rows.len(), 1);
        for (i, (row, b)) in rows.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                sys[(i, c)] = x.clone();
            }
            rhs[(i, 0)] = b.clone();
        }
        sys.solve(&rhs)
    };
    let all: Vec<&(Vec<CRat>, CRat)> = zero_rows.iter().chain(&pi_rows).chain(&pin_rows).collect();
    let Some(x) = solve(&all) else {
        let zeros: Vec<_> = zero_rows.iter().collect();
        return Err(if solve(&zeros).is_none() {
            FailureReason::ResonantEigenvalue(m)
        } else if pin_rows.is_empty()
            || solve(&zero_rows.iter().chain(&pi_rows).collect::<Vec<_>>()).is_none()
        {
            FailureReason::PiConditionFails(m)
        } else {
            FailureReason::ZeroConditionFails(m)
        });
    };
    let mut derivs = vec![y0.clone()];
    for j in 1..=m {
        let mut row = CMat::zeros(1, r);
        for p in 0..r {
            row[(0, p)] = x[(var(j, p), 0)].clone();
        }
        derivs.push(row);
    }
    Ok(Jet::new(Point::Zero, derivs).unwrap())
}

/// Probes `m = 0, 1, …` and reports the number of sum rules, i.e. the first
/// `m` for which no matching jet through order `m` exists, capped at
/// `max_probe` (default [`default_max_probe`]).
pub fn sum_rules_order(a: &MatSeq, max_probe: Option<usize>) -> Result<SumRuleReport> {
    probe_with_pins(a, max_probe, &[])
}

fn probe_with_pins(a: &MatSeq, max_probe: Option<usize>, pins: &[Pin]) -> Result<SumRuleReport> {
    square(a)?;
    let probe = max_probe.unwrap_or_else(|| default_max_probe(a));
    let top = probe.max(1);
    let a0 = a.symbol_jet(Point::Zero, top);
    let api = a.symbol_jet(Point::Pi, top);
    let Ok(y0) = left_eigenvector_one(a0.get(0), None) else {
        return Ok(SumRuleReport {
            order: 0,
            matching: None,
            failure: Some(FailureReason::NoSimpleEigenvalueOne),
        });
    };
    let mut matching = None;
    for m in 0..probe {
        match solve_matching(&a0, &api, &y0, m, pins) {
            Ok(jet) => matching = Some(jet),
            Err(reason) => {
                return Ok(SumRuleReport {
                    order: m,
                    matching,
                    failure: Some(reason),
                })
            }
        }
    }
    Ok(SumRuleReport {
        order: probe,
        matching,
        failure: None,
    })
}

/// Checks both sum-rule conditions of `a` against a given row jet `v`
/// through `v.order()`.
pub fn check_sum_rules(a: &MatSeq, v: &Jet) -> std::result::Result<(), FailureReason> {
    let m = v.order();
    let a0 = a.symbol_jet(Point::Zero, m);
    let api = a.symbol_jet(Point::Pi, m);
    let y = v.derivs();
    for j in 0..=m {
        let lhs = &(&recursion_rhs(y, &a0, j) + &(&y[j].scale(&CRat::pow2(j as i64)) * a0.get(0)))
            - &y[j];
        if !lhs.is_zero() {
            return Err(FailureReason::ZeroConditionFails(j));
        }
        if !pi_term(y, &api, j).is_zero() {
            return Err(FailureReason::PiConditionFails(j));
        }
    }
    Ok(())
}

/// Verifies that `a` is a Hermite mask of accuracy order `accuracy = m+1`;
/// returns the normalized matching jet on success.
pub fn hermite_mask_check(a: &MatSeq, accuracy: usize) -> std::result::Result<Jet, String> {
    let r = a.rows();
    if accuracy < r {
        return Err(format!("accuracy {accuracy} is below the order r = {r}"));
    }
    let pins: Vec<Pin> = (0..r)
        .flat_map(|l| {
            (0..=l).map(move |j| {
                let v = if j == l {
                    &factorial(l) * &CRat::i_pow(l as u32)
                } else {
                    CRat::zero()
                };
                (j, l, v)
            })
        })
        .collect();
    let plain = sum_rules_order(a, Some(accuracy)).map_err(|e| e.to_string())?;
    if plain.order < accuracy {
        let why = plain.failure.map(|f| format!(": {f}")).unwrap_or_default();
        return Err(format!("only {} sum rules{why}", plain.order));
    }
    let pinned = probe_with_pins(a, Some(accuracy), &pins).map_err(|e| e.to_string())?;
    if pinned.order < accuracy {
        return Err(format!(
            "no matching filter of the form (1, iξ, …, (iξ)^{}) + O(|ξ|^{{ℓ+1}}) beyond order {}",
            r - 1,
            pinned.order
        ));
    }
    Ok(pinned.matching.expect("order >= 1"))
}

pub fn is_hermite_mask(a: &MatSeq, accuracy: usize) -> bool {
    hermite_mask_check(a, accuracy).is_ok()
}

/// A linear equation `Σ c · a(k)[p][q] = rhs` on mask coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<((i64, usize, usize), CRat)>,
    pub rhs: CRat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructOptions {
    pub interpolatory: bool,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub mask: MatSeq,
    /// Normalized matching jet of the result through order `m`.
    pub matching: Jet,
    /// Jet of the scalar factor `ĉ` with `v̂_H(2ξ)â(ξ) = ĉ(ξ)v̂_H(ξ) + O(|ξ|^{m+1})`.
    pub factor_jet: Jet,
}

/// Solves for a mask on `support` with `m+1` sum rules with respect to a
/// matching filter `d̂ · v̂_H`, `v̂_H = (1, iξ, …, (iξ)^{r−1})`, for some
/// scalar `d` with `d̂(0) = 1`.
///
/// The unknowns are the mask coefficients and the jet of
/// `ĉ(ξ) = d̂(ξ)/d̂(2ξ)`, making the system linear:
/// `v̂_H(2ξ)â(ξ) = ĉ(ξ)v̂_H(ξ)` and `v̂_H(2ξ)â(ξ+π) = 0`, both to order `m`.
pub fn construct_hermite_mask(
    r: usize,
    m: usize,
    support: (i64, i64),
    options: &ConstructOptions,
) -> Result<Construction> {
    if r == 0 || m + 1 < r {
        return Err(Error::PreconditionViolated(format!(
            "need m >= r - 1 (r = {r}, m = {m})"
        )));
    }
    let (lo, hi) = support;
    if hi < lo {
        return Err(Error::Infeasible("empty support".into()));
    }
    let len = (hi - lo + 1) as usize;
    let n_mask = len * r * r;
    let n = n_mask + m;
    let var = |k: i64, p: usize, q: usize| (k - lo) as usize * r * r + p * r + q;
    let cvar = |t: usize| n_mask + t - 1;
    let v = Jet::hermite_row(r, m);
    // weights (−ik)^t, and (−1)^k (−ik)^t at π
    let weight = |k: i64, t: usize, pi: bool| {
        let mut w = (-(CRat::from_int(k) * CRat::i())).pow(t as u32);
        if pi && k.rem_euclid(2) == 1 {
            w = -w;
        }
        w
    };

    let mut rows: Vec<(Vec<CRat>, CRat)> = Vec::new();
    for j in 0..=m {
        for l in 0..r {
            // zero condition
            let mut row = vec![CRat::zero(); n];
            let mut rhs = CRat::zero();
            for k in 0..=j {
                let c = &binomial(j, k) * &CRat::pow2(k as i64);
                for p in 0..r {
                    let vk = &v.get(k)[(0, p)];
                    if vk.is_zero() {
                        continue;
                    }
                    for kk in lo..=hi {
                        let w = &(&c * vk) * &weight(kk, j - k, false);
                        row[var(kk, p, l)] += &w;
                    }
                }
                let vkl = &v.get(k)[(0, l)];
                if vkl.is_zero() {
                    continue;
                }
                if j == k {
                    rhs += vkl;
                } else {
                    row[cvar(j - k)] -= &(&binomial(j, k) * vkl);
                }
            }
            rows.push((row, rhs));
            // condition at π
            let mut row = vec![CRat::zero(); n];
            for k in 0..=j {
                let c = &binomial(j, k) * &CRat::pow2(k as i64);
                for p in 0..r {
                    let vk = &v.get(k)[(0, p)];
                    if vk.is_zero() {
                        continue;
                    }
                    for kk in lo..=hi {
                        row[var(kk, p, l)] += &(&(&c * vk) * &weight(kk, j - k, true));
                    }
                }
            }
            rows.push((row, CRat::zero()));
        }
    }
    if options.interpolatory {
        if !(lo..=hi).contains(&0) {
            return Err(Error::Infeasible(
                "interpolatory mask needs 0 in the support".into(),
            ));
        }
        for kk in (lo..=hi).filter(|k| k % 2 == 0) {
            for p in 0..r {
                for q in 0..r {
                    let mut row = vec![CRat::zero(); n];
                    row[var(kk, p, q)] = CRat::one();
                    let rhs = if kk == 0 && p == q {
                        CRat::pow2(-(p as i64 + 1))
                    } else {
                        CRat::zero()
                    };
                    rows.push((row, rhs));
                }
            }
        }
    }
    for c in &options.constraints {
        let mut row = vec![CRat::zero(); n];
        for ((k, p, q), w) in &c.terms {
            if !(lo..=hi).contains(k) || *p >= r || *q >= r {
                return Err(Error::Infeasible(format!(
                    "constraint refers to a({k})[{p}][{q}] outside the unknowns"
                )));
            }
            row[var(*k, *p, *q)] += w;
        }
        rows.push((row, c.rhs.clone()));
    }

    let eqs = rows.len();
    let mut sys = CMat::zeros(eqs, n);
    let mut rhs = CMat::zeros(eqs, 1);
    for (i, (row, b)) in rows.into_iter().enumerate() {
        for (c, x) in row.into_iter().enumerate() {
            sys[(i, c)] = x;
        }
        rhs[(i, 0)] = b;
    }
    let Some(x) = sys.solve(&rhs) else {
        let rank = sys.rank();
        return Err(Error::Infeasible(format!(
            "{eqs} equations in {n} unknowns are inconsistent (coefficient rank {rank}, \
             {} constraints beyond what the support can satisfy)",
            eqs - rank
        )));
    };
    let coeffs = (lo..=hi)
        .map(|k| {
            let mut c = CMat::zeros(r, r);
            for p in 0..r {
                for q in 0..r {
                    c[(p, q)] = x[(var(k, p, q), 0)].clone();
                }
            }
            c
        })
        .collect();
    let mask = MatSeq::new(r, r, lo, coeffs)?;
    let mut cj = vec![CRat::one()];
    cj.extend((1..=m).map(|t| x[(cvar(t), 0)].clone()));
    let factor_jet = Jet::scalar(Point::Zero, cj)?;
    let matching = hermite_mask_check(&mask, m + 1).map_err(|why| {
        Error::Infeasible(format!(
            "solution of the linear system is not a Hermite mask: {why}"
        ))
    })?;
    if options.interpolatory {
        debug_assert!(is_interpolatory(&mask));
    }
    Ok(Construction {
        mask,
        matching,
        factor_jet,
    })
}

fn square(a: &MatSeq) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("mask must be square".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bspline(m: usize) -> MatSeq {
        let half = MatSeq::from_ratios(0, &[(1, 2), (1, 2)]);
        (0..m).fold(MatSeq::delta(1), |a, _| a.convolve(&half).unwrap())
    }

    fn diag2(a: &MatSeq, b: &MatSeq) -> MatSeq {
        let z = MatSeq::zero(1, 1);
        MatSeq::from_entries(&[vec![a.clone(), z.clone()], vec![z, b.clone()]]).unwrap()
    }

    #[test]
    fn bspline_orders() {
        for m in 1..=6 {
            let rep = sum_rules_order(&bspline(m), None).unwrap();
            assert_eq!(rep.order, m);
            assert_eq!(rep.failure, Some(FailureReason::PiConditionFails(m)));
        }
        let rep = sum_rules_order(&MatSeq::delta(1), None).unwrap();
        assert_eq!(rep.order, 0);
        assert!(rep.matching.is_none());
    }

    #[test]
    fn hat_matching_jet() {
        let j = matching_filter_jet(&bspline(2), 1, None).unwrap();
        assert_eq!(j.value(0), &CRat::one());
        assert_eq!(j.value(1), &CRat::i());
    }

    #[test]
    fn identity_mask_has_no_simple_eigenvalue() {
        assert_eq!(
            matching_filter_jet(&MatSeq::delta(2), 0, None),
            Err(Error::NoSimpleEigenvalueOne)
        );
        assert!(!is_hermite_mask(&diag2(&bspline(2), &bspline(2)), 2));
    }

    #[test]
    fn negative_control() {
        let a = diag2(&bspline(1), &bspline(1).scale(&CRat::ratio(1, 2)));
        let rep = sum_rules_order(&a, None).unwrap();
        assert_eq!(rep.order, 1);
    }

    #[test]
    fn scalar_constructions() {
        let c = construct_hermite_mask(1, 1, (0, 2), &ConstructOptions::default()).unwrap();
        assert_eq!(c.mask, bspline(2));
        let c = construct_hermite_mask(1, 0, (0, 1), &ConstructOptions::default()).unwrap();
        assert_eq!(c.mask, bspline(1));
        assert!(is_hermite_mask(&bspline(2), 2));
    }

    #[test]
    fn infeasible_construction() {
        let opts = ConstructOptions::default();
        assert!(matches!(
            construct_hermite_mask(2, 3, (0, 0), &opts),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn cubic_hermite_construction() {
        let opts = ConstructOptions {
            interpolatory: true,
            constraints: Vec::new(),
        };
        let c = construct_hermite_mask(2, 3, (-1, 1), &opts).unwrap();
        assert!(is_interpolatory(&c.mask));
        assert!(is_hermite_mask(&c.mask, 4));
        assert_eq!(c.matching, Jet::hermite_row(2, 3));
        assert!(c.factor_jet.is_identity());
        assert_eq!(check_sum_rules(&c.mask, &Jet::hermite_row(2, 3)), Ok(()));
    }

    #[test]
    fn user_constraints_are_imposed() {
        // Pin a(3) = 1/8 on a wider support.
        let opts = ConstructOptions {
            interpolatory: false,
            constraints: vec![LinearConstraint {
                terms: vec![((3, 0, 0), CRat::one())],
                rhs: CRat::ratio(1, 8),
            }],
        };
        let c = construct_hermite_mask(1, 1, (0, 3), &opts).unwrap();
        assert_eq!(c.mask.at(3)[(0, 0)], CRat::ratio(1, 8));
        assert!(sum_rules_order(&c.mask, None).unwrap().order >= 2);
    }
}
