//! Truncated derivative lists of symbols at `ξ = 0` or `ξ = π`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::CMat;
use crate::scalar::{binomial, CRat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Zero,
    Pi,
}

/// Derivatives `f^{(0)}, …, f^{(m)}` of a matrix-valued symbol at a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Jet {
    point: Point,
    derivs: Vec<CMat>,
}

impl Jet {
    pub fn new(point: Point, derivs: Vec<CMat>) -> Result<Self> {
        let Some(first) = derivs.first() else {
            return Err(Error::DimensionMismatch(
                "a jet needs at least one entry".into(),
            ));
        };
        let shape = first.shape();
        if derivs.iter().any(|d| d.shape() != shape) {
            return Err(Error::DimensionMismatch(
                "jet entries differ in shape".into(),
            ));
        }
        Ok(Jet { point, derivs })
    }

    /// Scalar jet from its entries.
    pub fn scalar(point: Point, values: Vec<CRat>) -> Result<Self> {
        Self::new(point, values.into_iter().map(CMat::scalar).collect())
    }

    /// Jet of the constant `c` through `order`.
    pub fn constant(point: Point, c: CMat, order: usize) -> Self {
        let z = CMat::zeros(c.rows(), c.cols());
        let mut derivs = vec![c];
        derivs.extend(std::iter::repeat_n(z, order));
        Jet { point, derivs }
    }

    pub fn point(&self) -> Point {
        self.point
    }

    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        self.derivs[0].shape()
    }

    pub fn derivs(&self) -> &[CMat] {
        &self.derivs
    }

    pub fn get(&self, j: usize) -> &CMat {
        &self.derivs[j]
    }

    /// Entry `(0,0)` of derivative `j`; intended for scalar jets.
    pub fn value(&self, j: usize) -> &CRat {
        &self.derivs[j][(0, 0)]
    }

    pub fn into_derivs(self) -> Vec<CMat> {
        self.derivs
    }

    pub fn is_zero(&self) -> bool {
        self.derivs.iter().all(CMat::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order(), "cannot extend a jet by truncation");
        Jet {
            point: self.point,
            derivs: self.derivs[..=order].to_vec(),
        }
    }

    /// Jet of `ξ ↦ f(2^s ξ)` about the same base point: entry `j` scaled by `2^{sj}`.
    pub fn dilate(&self, s: u32) -> Jet {
        let derivs = self
            .derivs
            .iter()
            .enumerate()
            .map(|(j, d)| d.scale(&CRat::pow2((s as usize * j) as i64)))
            .collect();
        Jet {
            point: self.point,
            derivs,
        }
    }

    /// Leibniz product `(f g)^{(j)} = Σ C(j,k) f^{(k)} g^{(j−k)}`, to the
    /// smaller of the two orders. The result carries the point of `g`.
    pub fn mul(&self, g: &Jet) -> Result<Jet> {
        if self.shape().1 != g.shape().0 {
            return Err(Error::DimensionMismatch(format!(
                "jet product {:?} times {:?}",
                self.shape(),
                g.shape()
            )));
        }
        let m = self.order().min(g.order());
        let derivs = (0..=m)
            .map(|j| {
                let mut acc = CMat::zeros(self.shape().0, g.shape().1);
                for k in 0..=j {
                    let c = binomial(j, k);
                    acc.add_mul_assign(&self.derivs[k].scale(&c), &g.derivs[j - k]);
                }
                acc
            })
            .collect();
        Ok(Jet {
            point: g.point,
            derivs,
        })
    }

    pub fn scale(&self, c: &CRat) -> Jet {
        Jet {
            point: self.point,
            derivs: self.derivs.iter().map(|d| d.scale(c)).collect(),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let m = self.order().min(o.order());
        Jet {
            point: self.point,
            derivs: (0..=m).map(|j| &self.derivs[j] - &o.derivs[j]).collect(),
        }
    }

    /// Entry `(r, c)` as a scalar jet.
    pub fn entry(&self, r: usize, c: usize) -> Jet {
        Jet {
            point: self.point,
            derivs: self
                .derivs
                .iter()
                .map(|d| CMat::scalar(d[(r, c)].clone()))
                .collect(),
        }
    }

    /// Quotient `f / g` of scalar jets; requires `g^{(0)} ≠ 0`.
    pub fn div_scalar(&self, g: &Jet) -> Result<Jet> {
        let g0 = g.value(0).inv().ok_or(Error::ZeroMatchingValue)?;
        let m = self.order().min(g.order());
        let mut q: Vec<CRat> = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let mut acc = self.value(j).clone();
            for (k, qk) in q.iter().enumerate() {
                acc -= &(&binomial(j, k) * &(qk * g.value(j - k)));
            }
            q.push(&acc * &g0);
        }
        Jet::scalar(self.point, q)
    }

    /// Scalar jet of `ξ ↦ (iξ)^ℓ` through `order`.
    pub fn monomial(point: Point, l: usize, order: usize) -> Jet {
        let derivs = (0..=order)
            .map(|j| {
                if j == l {
                    crate::scalar::factorial(l) * CRat::i_pow(l as u32)
                } else {
                    CRat::zero()
                }
            })
            .map(CMat::scalar)
            .collect();
        Jet { point, derivs }
    }

    /// Jet of the `1×r` Hermite row `(1, iξ, …, (iξ)^{r−1})` at 0.
    pub fn hermite_row(r: usize, order: usize) -> Jet {
        let derivs = (0..=order)
            .map(|j| {
                let mut row = CMat::zeros(1, r);
                if j < r {
                    row[(0, j)] = crate::scalar::factorial(j) * CRat::i_pow(j as u32);
                }
                row
            })
            .collect();
        Jet {
            point: Point::Zero,
            derivs,
        }
    }

    /// Is this the jet of the identity matrix (value `I`, higher entries zero)?
    pub fn is_identity(&self) -> bool {
        let (r, c) = self.shape();
        r == c && self.derivs[0] == CMat::identity(r) && self.derivs[1..].iter().all(CMat::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn sj(v: &[(i64, i64, i64)]) -> Jet {
        // (re_num, im_num, den)
        Jet::scalar(
            Point::Zero,
            v.iter()
                .map(|&(a, b, d)| CRat::ratio(a, d) + CRat::ratio(b, d) * CRat::i())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn division_inverts_product() {
        let f = sj(&[(1, 0, 1), (0, 1, 1), (3, 0, 2), (0, -1, 3)]);
        let g = sj(&[(2, 0, 1), (1, 1, 1), (0, 0, 1), (5, 0, 1)]);
        let fg = f.mul(&g).unwrap();
        assert_eq!(fg.div_scalar(&g).unwrap(), f);
    }

    #[test]
    fn dilation_scales_by_powers_of_two() {
        let f = sj(&[(1, 0, 1), (1, 0, 1), (1, 0, 1)]);
        let d = f.dilate(2);
        assert_eq!(d.value(1), &CRat::from_int(4));
        assert_eq!(d.value(2), &CRat::from_int(16));
    }

    #[test]
    fn hermite_row_entries() {
        let h = Jet::hermite_row(3, 3);
        assert_eq!(h.get(0)[(0, 0)], CRat::one());
        assert_eq!(h.get(1)[(0, 1)], CRat::i());
        assert_eq!(h.get(2)[(0, 2)], CRat::from_int(-2));
        assert!(h.get(3).is_zero());
    }
}
