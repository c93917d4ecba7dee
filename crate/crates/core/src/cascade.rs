//! Cascade algorithm on dyadic grids, the Hermite interpolants `θ_ℓ`, and
//! the interpolating initial vector function built from them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::jet::{Jet, Point};
use crate::matrix::CMat;
use crate::samples::DyadicSamples;
use crate::scalar::{binomial, factorial, CRat};
use crate::seq::{jet_interpolate, MatSeq};
use crate::subdivision::d_inv_pow;

type Poly = Vec<CRat>;

fn p_trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(CRat::is_zero) {
        p.pop();
    }
    p
}

fn p_eval(p: &[CRat], x: &CRat) -> CRat {
    p.iter().rev().fold(CRat::zero(), |acc, c| &(&acc * x) + c)
}

fn p_deriv(p: &[CRat]) -> Poly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * &CRat::from_int(k as i64))
        .collect()
}

fn p_add(p: &[CRat], q: &[CRat]) -> Poly {
    let n = p.len().max(q.len());
    let z = CRat::zero();
    p_trim(
        (0..n)
            .map(|k| p.get(k).unwrap_or(&z) + q.get(k).unwrap_or(&z))
            .collect(),
    )
}

fn p_mul(p: &[CRat], q: &[CRat]) -> Poly {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![CRat::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += &(a * b);
        }
    }
    p_trim(out)
}

fn p_pow(p: &[CRat], e: usize) -> Poly {
    (0..e).fold(vec![CRat::one()], |acc, _| p_mul(&acc, p))
}

/// `q(x) = p(x − k)`.
fn p_translate(p: &[CRat], k: &CRat) -> Poly {
    let lin = vec![-k.clone(), CRat::one()];
    p.iter().rev().fold(Vec::new(), |acc, c| {
        p_add(&p_mul(&acc, &lin), std::slice::from_ref(c))
    })
}

/// Compactly supported piecewise polynomial: `pieces[i]` (ascending
/// coefficients in `x`) lives on `[breaks[i], breaks[i+1])`; zero outside
/// `[breaks[0], breaks[last]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    breaks: Vec<BigRational>,
    pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<BigRational>, pieces: Vec<Vec<CRat>>) -> Result<Self> {
        if breaks.len() != pieces.len() + 1 || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::DimensionMismatch(
                "breakpoints must increase and bracket every piece".into(),
            ));
        }
        Ok(PiecewisePoly {
            breaks,
            pieces: pieces.into_iter().map(p_trim).collect(),
        })
    }

    pub fn zero() -> Self {
        PiecewisePoly {
            breaks: vec![BigRational::zero(), BigRational::one()],
            pieces: vec![Vec::new()],
        }
    }

    pub fn breaks(&self) -> &[BigRational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<CRat>] {
        &self.pieces
    }

    /// `[first, last]` breakpoint.
    pub fn extent(&self) -> (BigRational, BigRational) {
        (
            self.breaks[0].clone(),
            self.breaks[self.breaks.len() - 1].clone(),
        )
    }

    /// Index of the piece used at `x` from the right (from the left when
    /// `left`), `None` outside the extent.
    fn piece_index(&self, x: &BigRational, left: bool) -> Option<usize> {
        let last = self.breaks.len() - 1;
        if left {
            (1..=last)
                .find(|&i| self.breaks[i - 1] < *x && *x <= self.breaks[i])
                .map(|i| i - 1)
        } else {
            (0..last).find(|&i| self.breaks[i] <= *x && *x < self.breaks[i + 1])
        }
    }

    fn eval_side(&self, x: &BigRational, j: usize, left: bool) -> CRat {
        match self.piece_index(x, left) {
            Some(i) => {
                let mut p = self.pieces[i].clone();
                for _ in 0..j {
                    p = p_deriv(&p);
                }
                p_eval(&p, &CRat::real(x.clone()))
            }
            None => CRat::zero(),
        }
    }

    /// `j`-th derivative at `x`, right-continuous except at the right end,
    /// where the left piece is used.
    pub fn eval_deriv(&self, x: &BigRational, j: usize) -> CRat {
        let left = *x == self.breaks[self.breaks.len() - 1];
        self.eval_side(x, j, left)
    }

    pub fn eval(&self, x: &BigRational) -> CRat {
        self.eval_deriv(x, 0)
    }

    /// Jump of the `j`-th derivative across `x`.
    pub fn jump(&self, x: &BigRational, j: usize) -> CRat {
        &self.eval_side(x, j, false) - &self.eval_side(x, j, true)
    }

    /// Largest `s` such that derivatives `0..=s` are continuous everywhere
    /// (capped at the degree bound); `None` if the function itself jumps.
    pub fn smoothness(&self) -> Option<usize> {
        let cap = self.pieces.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = None;
        for j in 0..=cap {
            if self.breaks.iter().any(|b| !self.jump(b, j).is_zero()) {
                break;
            }
            s = Some(j);
        }
        s
    }

    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self.pieces.iter().map(|p| p_deriv(p)).collect(),
        }
    }

    pub fn scale(&self, c: &CRat) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p_trim(p.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }

    /// `x ↦ f(x − k)`.
    pub fn translate(&self, k: i64) -> PiecewisePoly {
        let kk = BigRational::from_integer(BigInt::from(k));
        let kc = CRat::from_int(k);
        PiecewisePoly {
            breaks: self.breaks.iter().map(|b| b + &kk).collect(),
            pieces: self.pieces.iter().map(|p| p_translate(p, &kc)).collect(),
        }
    }

    fn piece_on(&self, lo: &BigRational, hi: &BigRational) -> Poly {
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        self.piece_index(&mid, false)
            .map(|i| self.pieces[i].clone())
            .unwrap_or_default()
    }

    pub fn add(&self, o: &PiecewisePoly) -> PiecewisePoly {
        let mut breaks: Vec<BigRational> = self.breaks.iter().chain(&o.breaks).cloned().collect();
        breaks.sort();
        breaks.dedup();
        let pieces = breaks
            .windows(2)
            .map(|w| p_add(&self.piece_on(&w[0], &w[1]), &o.piece_on(&w[0], &w[1])))
            .collect();
        PiecewisePoly { breaks, pieces }
    }

    /// `c * f = Σ_k c(k) f(· − k)` for a scalar sequence `c`.
    pub fn convolve_seq(&self, c: &MatSeq) -> PiecewisePoly {
        c.iter()
            .map(|(k, ck)| self.translate(k).scale(&ck[(0, 0)]))
            .reduce(|acc, t| acc.add(&t))
            .unwrap_or_else(PiecewisePoly::zero)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(m+j)!/(m! j!)`.
fn theta_weight(m: usize, j: usize) -> CRat {
    binomial(m + j, j)
}

/// `θ_ℓ(x)` for the order-`m+1` Hermite interpolant, evaluated directly.
pub fn theta_eval(l: usize, m: usize, x: &BigRational) -> CRat {
    assert!(l <= m, "theta index exceeds m");
    if x.abs() > BigRational::one() {
        return CRat::zero();
    }
    let xc = CRat::real(x.clone());
    let (base, sx) = if x.is_negative() {
        (&CRat::one() + &xc, -xc.clone())
    } else {
        (&CRat::one() - &xc, xc.clone())
    };
    let sum = (0..=m - l).fold(CRat::zero(), |acc, j| {
        &acc + &(&theta_weight(m, j) * &sx.pow(j as u32))
    });
    let lead = &base.pow(m as u32 + 1) * &xc.pow(l as u32);
    &(&lead * &sum) * &factorial(l).inv().expect("nonzero")
}

/// `θ_ℓ` as a piecewise polynomial on `[−1, 0, 1]`.
pub fn theta(l: usize, m: usize) -> PiecewisePoly {
    assert!(l <= m, "theta index exceeds m");
    let mono: Poly = {
        let mut p = vec![CRat::zero(); l + 1];
        p[l] = factorial(l).inv().expect("nonzero");
        p
    };
    let side = |sign: i64| -> Poly {
        let base = p_pow(&[CRat::one(), CRat::from_int(-sign)], m + 1);
        let sum: Poly = (0..=m - l)
            .map(|j| &theta_weight(m, j) * &CRat::from_int(sign).pow(j as u32))
            .collect();
        p_mul(&p_mul(&base, &mono), &sum)
    };
    PiecewisePoly::new(vec![rat(-1), rat(0), rat(1)], vec![side(-1), side(1)])
        .expect("fixed breakpoints")
}

/// Vector function `h = (h₁, …, h_r)` evaluated together with its first
/// derivatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialFunction {
    pub components: Vec<PiecewisePoly>,
}

impl InitialFunction {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `[h, h′, …, h^{(cols−1)}](x)`: entry `(i, j)` is `h_i^{(j)}(x)`.
    pub fn jet_matrix(&self, x: &BigRational, cols: usize) -> CMat {
        let mut out = CMat::zeros(self.len(), cols);
        for (i, h) in self.components.iter().enumerate() {
            for j in 0..cols {
                out[(i, j)] = h.eval_deriv(x, j);
            }
        }
        out
    }

    /// Smallest integer window containing every component's support.
    pub fn window(&self) -> (i64, i64) {
        let lo = self
            .components
            .iter()
            .map(|h| h.extent().0.floor().to_integer())
            .min();
        let hi = self
            .components
            .iter()
            .map(|h| h.extent().1.ceil().to_integer())
            .max();
        let conv =
            |b: Option<BigInt>| -> i64 { b.and_then(|v| i64::try_from(v).ok()).unwrap_or(0) };
        (conv(lo), conv(hi))
    }

    /// `[h, …, h^{(cols−1)}]` on the level-`level` grid of `window()`.
    pub fn samples(&self, level: usize, cols: usize) -> DyadicSamples {
        let den = BigInt::one() << level;
        DyadicSamples::from_fn(level, self.window(), |k| {
            self.jet_matrix(&BigRational::new(BigInt::from(k), den.clone()), cols)
        })
    }
}

/// Scalar jet of `g = f / (iξ)^p`, one order shorter per power removed.
fn divide_monomial(f: &Jet, p: usize) -> Result<Jet> {
    if f.order() < p {
        return Err(Error::PreconditionViolated(
            "matching jet too short for the requested accuracy".into(),
        ));
    }
    let vals = (0..=f.order() - p)
        .map(|j| {
            let d = &(&binomial(j + p, p) * &factorial(p)) * &CRat::i_pow(p as u32);
            f.value(j + p) * &d.inv().expect("nonzero")
        })
        .collect();
    Jet::scalar(Point::Zero, vals)
}

/// `h = (θ₀ + Σ_{ℓ=r}^m u_ℓ*θ_ℓ, θ₁, …, θ_{r−1})` with `û_ℓ = (iξ)^ℓ +
/// O(|ξ|^{m+1})`, so `[h, …, h^{(r−1)}](k) = δ(k) I_r`. With a matching
/// jet `(ĉ₁, ĉ₂ iξ, …)`, each `h_ℓ` is further convolved with `d_ℓ`,
/// `d̂_ℓ = 1/ĉ_ℓ` to the available order.
pub fn build_initial(r: usize, m: usize, matching: Option<&Jet>) -> Result<InitialFunction> {
    if r == 0 || m + 1 < r {
        return Err(Error::PreconditionViolated(format!(
            "need m >= r-1, got r={r}, m={m}"
        )));
    }
    let mut h1 = theta(0, m);
    for l in r..=m {
        let u = jet_interpolate(&Jet::monomial(Point::Zero, l, m), None)?;
        h1 = h1.add(&theta(l, m).convolve_seq(&u));
    }
    let mut components = vec![h1];
    components.extend((1..r).map(|l| theta(l, m)));
    if let Some(v) = matching {
        if v.shape() != (1, r) || v.point() != Point::Zero {
            return Err(Error::DimensionMismatch(
                "matching jet must be 1×r at 0".into(),
            ));
        }
        for (l, h) in components.iter_mut().enumerate() {
            let c = divide_monomial(&v.entry(0, l), l)?;
            let one = Jet::constant(Point::Zero, CMat::scalar(CRat::one()), c.order());
            let d = jet_interpolate(&one.div_scalar(&c)?, None)?;
            *h = h.convolve_seq(&d);
        }
    }
    Ok(InitialFunction { components })
}

/// `F_n(x) = 2 Σ_k a(k) F_{n−1}(2x − k) D^{−1}` on dyadic grids. `f0`
/// holds `[f, f′, …]` at level `L`, zero outside its window; the result is
/// at level `L + n` on `window` (default `fsupp(a)` padded by 1).
pub fn cascade_run(
    a: &MatSeq,
    f0: &DyadicSamples,
    n: usize,
    window: Option<(i64, i64)>,
) -> Result<DyadicSamples> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch("mask must be square".into()));
    }
    let Some((_, first)) = f0.iter().next() else {
        return Err(Error::DimensionMismatch("initial samples are empty".into()));
    };
    let (rows, cols) = first.shape();
    if rows != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "initial function has {rows} components, mask has {}",
            a.rows()
        )));
    }
    let level0 = f0.level();
    let start = f0.iter().next().map_or(0, |(k, _)| k);
    let mut f = MatSeq::new(
        rows,
        cols,
        start,
        f0.iter().map(|(_, v)| v.clone()).collect(),
    )?;
    let dinv = d_inv_pow(cols, 1).scale(&CRat::from_int(2));
    for step in 1..=n {
        let s = 1usize << (step - 1 + level0);
        f = a.upsample(s).convolve(&f)?.right_mul(&dinv)?;
    }
    let window = window.unwrap_or_else(|| {
        let (lo, hi) = a.support().unwrap_or((0, 0));
        (lo - 1, hi + 1)
    });
    Ok(DyadicSamples::from_fn(level0 + n, window, |k| f.at(k)))
}

/// `max |f_n − f_{n−1}|` over the abscissae common to both grids.
pub fn level_difference(fine: &DyadicSamples, coarse: &DyadicSamples) -> f64 {
    assert_eq!(fine.level(), coarse.level() + 1, "levels must be adjacent");
    coarse
        .iter()
        .filter_map(|(k, c)| fine.get(2 * k).map(|f| (f, c)))
        .map(|(f, c)| {
            let d = f - c;
            d.entries()
                .map(|z| z.to_complex().norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Exact `x = k/2ⁿ` as a rational.
pub fn dyadic(k: i64, n: usize) -> BigRational {
    let den = BigInt::one() << n;
    let g = BigInt::from(k).gcd(&den);
    BigRational::new(BigInt::from(k) / &g, den / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::iterate_mask;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta_eval(0, 1, &q(1, 2)), CRat::ratio(1, 2));
        for m in 0..5 {
            for l in 0..=m {
                for k in -3..=3 {
                    let want = if l == 0 && k == 0 { 1 } else { 0 };
                    assert_eq!(
                        theta_eval(l, m, &rat(k)),
                        CRat::from_int(want),
                        "l={l} m={m} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn theta_hermite_property() {
        for m in 0..5 {
            for l in 0..=m {
                let t = theta(l, m);
                assert_eq!(t.smoothness(), Some(m), "θ_{l} for m={m} is exactly C^m");
                for j in 0..=m {
                    for k in -2..=2 {
                        let want = if j == l && k == 0 { 1 } else { 0 };
                        assert_eq!(t.eval_deriv(&rat(k), j), CRat::from_int(want));
                    }
                }
            }
        }
    }

    #[test]
    fn theta_symmetry() {
        for k in -8..=8 {
            let x = q(k, 8);
            assert_eq!(theta_eval(0, 1, &x), theta_eval(0, 1, &-x.clone()));
            assert_eq!(theta_eval(1, 1, &x), -theta_eval(1, 1, &-x.clone()));
        }
    }

    proptest! {
        #[test]
        fn theta_piecewise_matches_formula(l in 0usize..4, extra in 0usize..3, k in -40i64..=40, d in 1i64..17) {
            let m = l + extra;
            let x = q(k, d);
            prop_assert_eq!(theta(l, m).eval(&x), theta_eval(l, m, &x));
        }
    }

    #[test]
    fn translate_and_add() {
        let t = theta(0, 1);
        let s = t.translate(1).add(&t);
        for k in -4..=8 {
            let x = q(k, 4);
            let want = &theta_eval(0, 1, &(x.clone() - rat(1))) + &theta_eval(0, 1, &x);
            assert_eq!(s.eval(&x), want);
        }
        // Partition of unity of the hat.
        let hat = theta(0, 0);
        let sum = (-3..=3)
            .map(|k| hat.translate(k))
            .reduce(|a, b| a.add(&b))
            .unwrap();
        for k in -8..=8 {
            assert_eq!(sum.eval(&q(k, 4)), CRat::one());
        }
    }

    fn check_interpolant(h: &InitialFunction, r: usize) {
        for k in -4..=4 {
            let want = if k == 0 {
                CMat::identity(r)
            } else {
                CMat::zeros(r, r)
            };
            assert_eq!(h.jet_matrix(&rat(k), r), want, "k={k}");
        }
    }

    #[test]
    fn initial_functions() {
        let h = build_initial(2, 1, None).unwrap();
        assert_eq!(h.components, vec![theta(0, 1), theta(1, 1)]);
        check_interpolant(&h, 2);

        let h = build_initial(1, 1, None).unwrap();
        let u = jet_interpolate(&Jet::monomial(Point::Zero, 1, 1), None).unwrap();
        assert_eq!(u.symbol_jet(Point::Zero, 1).value(1), &CRat::i());
        check_interpolant(&h, 1);
        assert_ne!(h.components[0], theta(0, 1));

        let h = build_initial(2, 3, None).unwrap();
        check_interpolant(&h, 2);
        assert_eq!(h.components[0].smoothness(), Some(3));
        assert!(build_initial(3, 1, None).is_err());
    }

    #[test]
    fn matching_correction_is_identity_for_hermite_row() {
        let v = Jet::hermite_row(2, 3);
        assert_eq!(
            build_initial(2, 3, Some(&v)).unwrap(),
            build_initial(2, 3, None).unwrap()
        );
        let doubled = v.scale(&CRat::from_int(2));
        let h = build_initial(2, 3, Some(&doubled)).unwrap();
        assert_eq!(h.jet_matrix(&rat(0), 1)[(0, 0)], CRat::ratio(1, 2));
    }

    fn hat_mask() -> MatSeq {
        MatSeq::from_ratios(0, &[(1, 4), (1, 2), (1, 4)])
    }

    #[test]
    fn hat_is_a_fixed_point() {
        let hat = InitialFunction {
            components: vec![theta(0, 0).translate(1)],
        };
        for level in 0..3 {
            let f0 = hat.samples(level, 1);
            for n in 1..=5 {
                let fnn = cascade_run(&hat_mask(), &f0, n, Some((-1, 3))).unwrap();
                assert_eq!(fnn, hat.samples(level + n, 1).restrict((-1, 3)));
            }
        }
    }

    #[test]
    fn grid_matches_iterated_mask() {
        let h = build_initial(1, 0, None).unwrap();
        let a = hat_mask();
        for n in 1..=5 {
            let fnn = cascade_run(&a, &h.samples(0, 1), n, None).unwrap();
            let an = iterate_mask(&a, n).unwrap();
            for (k, v) in fnn.iter() {
                assert_eq!(*v, an.at(k).scale(&CRat::pow2(n as i64)));
            }
        }
    }

    #[test]
    fn collapse_control() {
        // a = δ/2: F_n(x) = F_0(2ⁿx), the support collapses to 0.
        let a = MatSeq::from_ratios(0, &[(1, 2)]);
        let hat = InitialFunction {
            components: vec![theta(0, 0)],
        };
        let fnn = cascade_run(&a, &hat.samples(2, 1), 3, Some((-1, 1))).unwrap();
        for (k, v) in fnn.iter() {
            let want = theta_eval(0, 0, &dyadic(k * 8, 5));
            assert_eq!(v[(0, 0)], want);
        }
    }

    #[test]
    fn differences_decay_for_hat() {
        let f0 = InitialFunction {
            components: vec![theta(0, 3).translate(1)],
        }
        .samples(2, 1);
        let levels: Vec<_> = (1..=7)
            .map(|n| cascade_run(&hat_mask(), &f0, n, None).unwrap())
            .collect();
        let diffs: Vec<f64> = levels
            .windows(2)
            .map(|w| level_difference(&w[1], &w[0]))
            .collect();
        assert!(diffs[0] > 0.0);
        assert!(diffs[5] < diffs[0] / 8.0, "{diffs:?}");
    }
}
