//! Exact gauge values.
//!
//! Gauges of ℓ₂ balls and ellipsoids are square roots of rationals, those of
//! ℓ_p balls with integer `p` are `p`-th roots. An [`ExactNorm`] keeps the
//! radicand and root index so that comparisons stay exact.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{from_f64, to_f64, Q};

/// The nonnegative real `radicand^(1/index)`.
#[derive(Clone, Debug)]
pub struct ExactNorm {
    radicand: Q,
    index: u32,
}

impl ExactNorm {
    pub fn rational(x: Q) -> Self {
        assert!(!x.is_negative());
        ExactNorm { radicand: x, index: 1 }
    }

    pub fn root(radicand: Q, index: u32) -> Self {
        assert!(index >= 1 && !radicand.is_negative());
        ExactNorm { radicand, index }
    }

    pub fn sqrt(radicand: Q) -> Self {
        Self::root(radicand, 2)
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.radicand.is_zero()
    }

    pub fn radicand(&self) -> &Q {
        &self.radicand
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// The value raised to `k`, exact when `k` is a multiple of the index.
    fn power_of(&self, k: u32) -> Q {
        debug_assert_eq!(k % self.index, 0);
        num_traits::pow(self.radicand.clone(), (k / self.index) as usize)
    }

    /// Multiplies the value by a nonnegative rational.
    pub fn scaled(&self, c: &Q) -> Self {
        assert!(!c.is_negative());
        ExactNorm { radicand: &self.radicand * num_traits::pow(c.clone(), self.index as usize), index: self.index }
    }

    /// Exact comparison with a nonnegative rational.
    pub fn cmp_q(&self, x: &Q) -> Ordering {
        if x.is_negative() {
            return Ordering::Greater;
        }
        self.radicand.cmp(&num_traits::pow(x.clone(), self.index as usize))
    }

    pub fn le_q(&self, x: &Q) -> bool {
        self.cmp_q(x) != Ordering::Greater
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.radicand).powf(1.0 / self.index as f64)
    }

    /// A rational within `tol` of the value (from below).
    pub fn approx(&self, tol: &Q) -> Q {
        if self.index == 1 {
            return self.radicand.clone();
        }
        // k / m with k = floor(root(radicand * m^index)).
        let m = (Q::one() / tol).ceil().to_integer() + BigInt::one();
        let scaled =
            (&self.radicand * Q::from_integer(num_traits::pow(m.clone(), self.index as usize))).floor().to_integer();
        Q::new(scaled.nth_root(self.index), m)
    }

    /// Rational upper bound within `tol` of the value.
    pub fn approx_upper(&self, tol: &Q) -> Q {
        let lo = self.approx(tol);
        if self.cmp_q(&lo) == Ordering::Equal {
            lo
        } else {
            let m = (Q::one() / tol).ceil().to_integer() + BigInt::one();
            lo + Q::new(BigInt::one(), m)
        }
    }
}

impl PartialEq for ExactNorm {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactNorm {}

impl PartialOrd for ExactNorm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactNorm {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.index == other.index {
            return self.radicand.cmp(&other.radicand);
        }
        let k = num_integer::lcm(self.index, other.index);
        self.power_of(k).cmp(&other.power_of(k))
    }
}

impl fmt::Display for ExactNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = crate::rational::fmt_q(&self.radicand);
        match self.index {
            1 => write!(f, "{r}"),
            2 => write!(f, "sqrt({r})"),
            k => write!(f, "root{k}({r})"),
        }
    }
}

/// Rational enclosure of a double gauge computed with relative error at most
/// `rel_err`.
pub fn enclose_f64(value: f64, rel_err: f64) -> (Q, Q) {
    let pad = value.abs() * rel_err + f64::MIN_POSITIVE;
    (from_f64((value - pad).max(0.0)), from_f64(value + pad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn compares_across_indices() {
        let s2 = ExactNorm::sqrt(q(2));
        let c3 = ExactNorm::root(q(3), 3);
        assert!(s2 < ExactNorm::rational(qr(3, 2)));
        assert!(c3 > ExactNorm::rational(q(1)));
        // 2^(1/2) = 1.414 < 3^(1/3) = 1.442
        assert!(s2 < c3);
        assert_eq!(ExactNorm::sqrt(q(4)), ExactNorm::rational(q(2)));
    }

    #[test]
    fn scaling_and_approximation() {
        let s = ExactNorm::sqrt(q(2)).scaled(&q(3));
        assert_eq!(s, ExactNorm::sqrt(q(18)));
        let tol = qr(1, 10_000);
        let a = s.approx(&tol);
        assert!(s.cmp_q(&a) != Ordering::Less);
        assert!(s.cmp_q(&(&a + &tol)) == Ordering::Less);
        assert!(s.le_q(&s.approx_upper(&tol)));
    }
}
