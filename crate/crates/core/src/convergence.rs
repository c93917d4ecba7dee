//! Eigenvalue condition, the norm-growth rate `ρ`, the smoothness exponent
//! `sm_p(a) = 1/p − log₂ ρ`, and the Hermite convergence decision.

use std::fmt;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::normal_form::factorize;
use crate::scalar::{log2_abs, CRat};
use crate::seq::MatSeq;
use crate::subdivision::iterate_mask;
use crate::sum_rules::{has_simple_eigenvalue_one, is_hermite_mask, sum_rules_order};

/// Slack subtracted from `2^{−m}` in the eigenvalue modulus test.
pub const EIGEN_TOL: f64 = 1e-9;
/// Default margin by which `sm∞` must exceed `m` to certify `C^m`.
pub const DEFAULT_MARGIN: f64 = 0.05;
/// Default number of `ρ` levels.
pub const DEFAULT_LEVELS: usize = 10;

/// Sequence norm exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Norm {
    Inf,
    P(f64),
}

impl Norm {
    /// `1/p`, zero for `p = ∞`.
    pub fn inv_p(self) -> f64 {
        match self {
            Norm::Inf => 0.0,
            Norm::P(p) => 1.0 / p,
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Inf => write!(f, "inf"),
            Norm::P(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Norm::Inf),
            _ => match s.parse::<f64>() {
                Ok(p) if p >= 1.0 && p.is_finite() => Ok(Norm::P(p)),
                Ok(p) if p.is_infinite() => Ok(Norm::Inf),
                _ => Err(Error::Parse(format!(
                    "norm exponent must be inf or >= 1, got {s}"
                ))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenCheck {
    pub m: usize,
    /// Exact test: 1 is an algebraically simple eigenvalue of `â(0)`.
    pub simple_one: bool,
    /// Eigenvalues other than the simple eigenvalue 1 (all of them if 1 is
    /// not simple).
    pub others: Vec<Complex64>,
    pub pass: bool,
}

/// Roots of the monic polynomial `Σ c_k λ^k` (ascending, `c_n = 1`).
fn monic_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i];
    }
    let mut roots: Vec<Complex64> = Schur::new(comp)
        .eigenvalues()
        .expect("complex Schur form is triangular")
        .iter()
        .copied()
        .collect();
    roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    roots
}

/// 1 simple and every other eigenvalue of `â(0)` below `2^{−m}` in modulus.
pub fn eigen_check(a: &MatSeq, m: usize) -> EigenCheck {
    let r = a.rows();
    let a0 = a.coeffs().iter().fold(CMat::zeros(r, r), |acc, c| &acc + c);
    let simple_one = has_simple_eigenvalue_one(&a0);
    let mut cp = a0.char_poly();
    if simple_one {
        // Exact deflation of (λ − 1).
        let n = cp.len() - 1;
        let mut q = vec![CRat::zero(); n];
        let mut carry = CRat::zero();
        for k in (1..=n).rev() {
            carry = &cp[k] + &carry;
            q[k - 1] = carry.clone();
        }
        debug_assert!((&cp[0] + &carry).is_zero());
        cp = q;
    }
    let others = monic_roots(&cp.iter().map(CRat::to_complex).collect::<Vec<_>>());
    let bound = (-(m as f64)).exp2() - EIGEN_TOL;
    let pass = simple_one && others.iter().all(|z| z.norm() < bound);
    EigenCheck {
        m,
        simple_one,
        others,
        pass,
    }
}

/// `log₂ ‖s‖`, where `‖s‖` is the maximum over columns of the entrywise
/// `ℓ_p` norm of the column sequence; `−∞` for the zero sequence.
pub fn log2_norm(s: &MatSeq, p: Norm) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for q in 0..s.cols() {
        let val = match p {
            Norm::Inf => {
                let mut max = None::<num_rational::BigRational>;
                for (_, c) in s.iter() {
                    for i in 0..s.rows() {
                        let n = c[(i, q)].norm_sqr();
                        if max.as_ref().is_none_or(|m| n > *m) {
                            max = Some(n);
                        }
                    }
                }
                match max {
                    Some(m) if !m.is_zero() => 0.5 * log2_abs(&m),
                    _ => f64::NEG_INFINITY,
                }
            }
            Norm::P(pp) => {
                let logs: Vec<f64> = s
                    .iter()
                    .flat_map(|(_, c)| (0..s.rows()).map(move |i| c[(i, q)].norm_sqr()))
                    .filter(|n| !n.is_zero())
                    .map(|n| 0.5 * log2_abs(&n))
                    .collect();
                let Some(lmax) = logs.iter().copied().reduce(f64::max) else {
                    continue;
                };
                let sum: f64 = logs.iter().map(|l| (pp * (l - lmax)).exp2()).sum();
                lmax + sum.log2() / pp
            }
        };
        best = best.max(val);
    }
    best
}

/// `log₂ ρ_n` with `ρ_n = 2 ‖b_n‖^{1/n}` for `n = 1..=levels`.
pub fn rho_log2_estimates(b: &MatSeq, levels: usize, p: Norm) -> Vec<f64> {
    assert!(levels >= 1, "need at least one level");
    let mut out = Vec::with_capacity(levels);
    let mut bn = b.clone();
    for n in 1..=levels {
        if n > 1 {
            bn = bn.upsample(2).convolve(b).expect("square mask");
        }
        out.push(1.0 + log2_norm(&bn, p) / n as f64);
    }
    out
}

/// `ρ_n = 2 ‖b_n‖^{1/n}` for `n = 1..=levels`.
pub fn rho_estimate(b: &MatSeq, levels: usize, p: Norm) -> Vec<f64> {
    rho_log2_estimates(b, levels, p)
        .into_iter()
        .map(f64::exp2)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    /// The Hermite scheme converges with `C^m` limits.
    ConvergentInC(usize),
    NotDecided,
    FailsNecessaryCondition,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::ConvergentInC(m) => write!(f, "ConvergentInC^{m}"),
            Decision::NotDecided => write!(f, "NotDecided"),
            Decision::FailsNecessaryCondition => write!(f, "FailsNecessaryCondition"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessReport {
    pub sum_rule_order: usize,
    pub p: Norm,
    /// Eigenvalue check at `m = sum_rule_order − 1` (or 0).
    pub eigencheck: EigenCheck,
    pub rho_estimates: Vec<f64>,
    /// `1/p − log₂ ρ_n` for each level.
    pub sm_levels: Vec<f64>,
    /// Value at the largest level; `None` without sum rules.
    pub sm_estimate: Option<f64>,
}

/// Sum rules → matching jet → `U` → factorization at the highest order →
/// `ρ` table → `sm_p(a)`.
pub fn smoothness_estimate(a: &MatSeq, levels: usize, p: Norm) -> Result<SmoothnessReport> {
    let report = sum_rules_order(a, None).map_err(|e| e.at("sum rules"))?;
    let order = report.order;
    let eigencheck = eigen_check(a, order.saturating_sub(1));
    if order == 0 {
        return Ok(SmoothnessReport {
            sum_rule_order: 0,
            p,
            eigencheck,
            rho_estimates: Vec::new(),
            sm_levels: Vec::new(),
            sm_estimate: None,
        });
    }
    let nf = factorize(a, order).map_err(|e| e.at("factorization"))?;
    let logs = rho_log2_estimates(&nf.b, levels, p);
    let sm_levels: Vec<f64> = logs.iter().map(|l| p.inv_p() - l).collect();
    Ok(SmoothnessReport {
        sum_rule_order: order,
        p,
        eigencheck,
        rho_estimates: logs.iter().map(|l| l.exp2()).collect(),
        sm_estimate: sm_levels.last().copied(),
        sm_levels,
    })
}

/// Decision rule given a precomputed `sm∞` estimate.
pub fn decide(a: &MatSeq, m_target: usize, sm: Option<f64>, margin: f64) -> Decision {
    if !is_hermite_mask(a, m_target + 1) || !eigen_check(a, m_target).pass {
        return Decision::FailsNecessaryCondition;
    }
    match sm {
        Some(s) if s > m_target as f64 + margin => Decision::ConvergentInC(m_target),
        _ => Decision::NotDecided,
    }
}

/// Decides `C^{m_target}` convergence of the Hermite scheme of `a`.
pub fn hermite_convergence_decision(
    a: &MatSeq,
    m_target: usize,
    levels: usize,
    margin: f64,
) -> Result<Decision> {
    if !is_hermite_mask(a, m_target + 1) || !eigen_check(a, m_target).pass {
        return Ok(Decision::FailsNecessaryCondition);
    }
    let rep = smoothness_estimate(a, levels, Norm::Inf)?;
    Ok(decide(a, m_target, rep.sm_estimate, margin))
}

/// Largest `‖b_n(k)‖` summed over `k`: the constant in `‖b_{2n}‖ ≤ C‖b_n‖`.
pub fn coefficient_mass(b: &MatSeq, n: usize) -> f64 {
    let bn = iterate_mask(b, n).expect("square");
    bn.iter()
        .map(|(_, c)| {
            (0..c.cols())
                .map(|q| {
                    (0..c.rows())
                        .map(|i| c[(i, q)].to_complex().norm())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn bspline(m: usize) -> MatSeq {
        let half = MatSeq::from_ratios(0, &[(1, 2), (1, 2)]);
        (0..m).fold(MatSeq::delta(1), |a, _| a.convolve(&half).unwrap())
    }

    #[test]
    fn eigen_examples() {
        for m in 0..4 {
            assert!(eigen_check(&bspline(2), m).pass);
        }
        let d = MatSeq::monomial(CMat::diag(&[CRat::one(), CRat::ratio(1, 2)]), 0);
        assert!(eigen_check(&d, 0).pass);
        assert!(!eigen_check(&d, 1).pass);
        let e = eigen_check(&MatSeq::delta(2), 0);
        assert!(!e.simple_one && !e.pass);
    }

    #[test]
    fn complex_eigenvalues() {
        let a0 = CMat::from_rows(vec![
            vec![CRat::one(), CRat::zero(), CRat::zero()],
            vec![CRat::zero(), CRat::zero(), CRat::ratio(-1, 4)],
            vec![CRat::zero(), CRat::ratio(1, 4), CRat::zero()],
        ])
        .unwrap();
        let e = eigen_check(&MatSeq::monomial(a0, 0), 1);
        assert_eq!(e.others.len(), 2);
        for z in &e.others {
            assert!((z.norm() - 0.25).abs() < 1e-12);
        }
        assert!(e.pass);
    }

    #[test]
    fn rho_of_scaled_dirac() {
        let b = MatSeq::from_ratios(0, &[(1, 4)]);
        assert!(rho_estimate(&b, 6, Norm::Inf).iter().all(|&r| r == 0.5));
        let b = MatSeq::from_ratios(0, &[(1, 2)]);
        assert!(rho_estimate(&b, 6, Norm::Inf).iter().all(|&r| r == 1.0));
        let b = MatSeq::from_ratios(3, &[(-3, 5)]);
        for r in rho_estimate(&b, 5, Norm::P(2.0)) {
            assert!((r - 1.2).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_p_norm() {
        // ‖(3, 4)‖₂ = 5
        let s = MatSeq::from_ratios(0, &[(3, 1), (4, 1)]);
        assert!((log2_norm(&s, Norm::P(2.0)) - 5f64.log2()).abs() < 1e-12);
        assert_eq!(log2_norm(&s, Norm::Inf), 2.0);
    }

    #[test]
    fn bspline_smoothness() {
        for m in 1..=6 {
            let rep = smoothness_estimate(&bspline(m), 8, Norm::Inf).unwrap();
            assert_eq!(rep.sum_rule_order, m);
            assert!(rep.sm_levels.iter().all(|&s| s == (m - 1) as f64));
        }
    }

    #[test]
    fn decisions() {
        assert_eq!(
            hermite_convergence_decision(&bspline(2), 0, 8, DEFAULT_MARGIN).unwrap(),
            Decision::ConvergentInC(0)
        );
        assert_eq!(
            hermite_convergence_decision(&bspline(1), 0, 8, DEFAULT_MARGIN).unwrap(),
            Decision::NotDecided
        );
        assert_eq!(
            hermite_convergence_decision(&MatSeq::delta(1), 0, 8, DEFAULT_MARGIN).unwrap(),
            Decision::FailsNecessaryCondition
        );
        let rep = smoothness_estimate(&MatSeq::delta(1), 8, Norm::Inf).unwrap();
        assert_eq!(rep.sum_rule_order, 0);
        assert_eq!(rep.sm_estimate, None);
    }
}
