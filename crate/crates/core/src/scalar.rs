//! Exact Gaussian rationals.
//!
//! Every coefficient, jet entry and polynomial coefficient in the crate is a
//! [`CRat`]: a complex number whose real and imaginary parts are arbitrary
//! precision rationals. Equality is exact.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact complex rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRat {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` as a real number. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// `(-i)^k`.
    pub fn neg_i_pow(k: u32) -> Self {
        match k % 4 {
            0 => CRat::one(),
            1 => -CRat::i(),
            2 => -CRat::one(),
            _ => CRat::i(),
        }
    }

    /// `i^k`.
    pub fn i_pow(k: u32) -> Self {
        match k % 4 {
            0 => CRat::one(),
            1 => CRat::i(),
            2 => -CRat::one(),
            _ => -CRat::i(),
        }
    }

    /// `2^e` for any integer exponent.
    pub fn pow2(e: i64) -> Self {
        let p = BigInt::one() << e.unsigned_abs();
        if e >= 0 {
            Self::real(BigRational::from_integer(p))
        } else {
            Self::real(BigRational::new(BigInt::one(), p))
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        CRat {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = CRat::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Multiplicative inverse, or `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(CRat::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(CRat {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let (re, im) = self.to_f64_pair();
        num_complex::Complex64::new(re, im)
    }

    /// Decimal rendering with 17 significant digits (`re` or `re+im i`).
    pub fn to_decimal_string(&self) -> String {
        let (re, im) = self.to_f64_pair();
        if self.im.is_zero() {
            format!("{:.16e}", re)
        } else {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{:.16e}{}{:.16e} i", re, sign, im.abs())
        }
    }
}

/// Converts a big rational to the nearest `f64`.
pub fn rat_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    // Fall back to the exponent split for very large or very small values.
    let l = log2_abs(r);
    let s = if r.is_negative() { -1.0 } else { 1.0 };
    s * l.exp2()
}

/// `log2 |r|` for nonzero `r`; exact whenever `|r|` is a power of two.
pub fn log2_abs(r: &BigRational) -> f64 {
    log2_bigint(r.numer()) - log2_bigint(r.denom())
}

fn log2_bigint(n: &BigInt) -> f64 {
    let n = n.abs();
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().unwrap().log2();
    }
    let shift = bits - 53;
    let top: BigInt = &n >> shift;
    // Exact for powers of two: top = 2^52 and the remainder is zero.
    let rem_zero = (&top << shift) == n;
    let t = top.to_f64().unwrap();
    if rem_zero && t == 4503599627370496.0 {
        return (bits - 1) as f64;
    }
    t.log2() + shift as f64
}

/// `n!` as an exact scalar.
pub fn factorial(n: usize) -> CRat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    CRat::real(BigRational::from_integer(acc))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> CRat {
    if k > n {
        return CRat::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    CRat::real(BigRational::from_integer(acc))
}

impl Zero for CRat {
    fn zero() -> Self {
        CRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for CRat {
    fn one() -> Self {
        CRat::real(BigRational::one())
    }
}

impl<'a> Add<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Add for CRat {
    type Output = CRat;
    fn add(self, o: CRat) -> CRat {
        &self + &o
    }
}

impl AddAssign<&CRat> for CRat {
    fn add_assign(&mut self, o: &CRat) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl<'a> Sub<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Sub for CRat {
    type Output = CRat;
    fn sub(self, o: CRat) -> CRat {
        &self - &o
    }
}

impl SubAssign<&CRat> for CRat {
    fn sub_assign(&mut self, o: &CRat) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl<'a> Mul<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        if self.is_zero() || o.is_zero() {
            return CRat::zero();
        }
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => CRat::real(&self.re * &o.re),
            (true, false) => CRat {
                re: &self.re * &o.re,
                im: &self.re * &o.im,
            },
            (false, true) => CRat {
                re: &self.re * &o.re,
                im: &self.im * &o.re,
            },
            (false, false) => CRat {
                re: &self.re * &o.re - &self.im * &o.im,
                im: &self.re * &o.im + &self.im * &o.re,
            },
        }
    }
}

impl Mul for CRat {
    type Output = CRat;
    fn mul(self, o: CRat) -> CRat {
        &self * &o
    }
}

impl MulAssign<&CRat> for CRat {
    fn mul_assign(&mut self, o: &CRat) {
        *self = &*self * o;
    }
}

impl<'a> Div<&'a CRat> for &'a CRat {
    type Output = CRat;
    /// Panics on division by zero, like the integer types.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &CRat) -> CRat {
        self * &o.inv().expect("division by zero CRat")
    }
}

impl Div for CRat {
    type Output = CRat;
    fn div(self, o: CRat) -> CRat {
        &self / &o
    }
}

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl From<i64> for CRat {
    fn from(n: i64) -> Self {
        CRat::from_int(n)
    }
}

impl From<BigRational> for CRat {
    fn from(r: BigRational) -> Self {
        CRat::real(r)
    }
}

/// Canonical text form: `p/q`, `p/q+r/s i`, `p/q-r/s i`. Integers drop the
/// denominator. This is the rendering used by the mask file format.
impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{}-{} i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{} i", self.re, self.im)
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// Parses `p/q`, `p`, `p/q+r/s i`, `p/q-r/s i`, or a pure imaginary `r/s i`.
impl FromStr for CRat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let Some(body) = t.strip_suffix('i') else {
            return Ok(CRat::real(parse_rational(t)?));
        };
        let body = body.trim_end();
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = im.trim();
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(CRat::new(parse_rational(re)?, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("1/2".parse::<CRat>().unwrap(), CRat::ratio(1, 2));
        assert_eq!("-3".parse::<CRat>().unwrap(), CRat::from_int(-3));
        let z: CRat = "1/2+3/4 i".parse().unwrap();
        assert_eq!(z, CRat::new(CRat::ratio(1, 2).re, CRat::ratio(3, 4).re));
        let w: CRat = "-1/2-3 i".parse().unwrap();
        assert_eq!(w, CRat::ratio(-1, 2) - CRat::from_int(3) * CRat::i());
        assert_eq!(
            "2/3 i".parse::<CRat>().unwrap(),
            CRat::ratio(2, 3) * CRat::i()
        );
        assert_eq!("-i".parse::<CRat>().unwrap(), -CRat::i());
        assert!("1/0".parse::<CRat>().is_err());
        assert!("abc".parse::<CRat>().is_err());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(CRat::ratio(2, 4).to_string(), "1/2");
        assert_eq!(CRat::from_int(5).to_string(), "5");
        let z = CRat::ratio(1, 3) - CRat::ratio(1, 7) * CRat::i();
        assert_eq!(z.to_string(), "1/3-1/7 i");
        assert_eq!(z.to_string().parse::<CRat>().unwrap(), z);
    }

    #[test]
    fn field_ops() {
        let z = CRat::ratio(1, 2) + CRat::i();
        let zi = z.inv().unwrap();
        assert_eq!(&z * &zi, CRat::one());
        assert_eq!(CRat::i() * CRat::i(), -CRat::one());
        assert_eq!(CRat::neg_i_pow(3), CRat::i());
        assert_eq!(CRat::i_pow(2), -CRat::one());
        assert_eq!(CRat::pow2(-3), CRat::ratio(1, 8));
        assert!(CRat::zero().inv().is_none());
    }

    #[test]
    fn log2_is_exact_on_powers_of_two() {
        let r = CRat::pow2(-200).re;
        assert_eq!(log2_abs(&r), -200.0);
        let r = CRat::pow2(77).re;
        assert_eq!(log2_abs(&r), 77.0);
        assert!((log2_abs(&CRat::ratio(3, 1).re) - 3f64.log2()).abs() < 1e-15);
    }
}
