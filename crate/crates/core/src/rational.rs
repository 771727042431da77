//! Exact rationals, rational vectors and their string encoding.
//!
//! Every rational that crosses a file boundary is written as `"num/den"`
//! (or a bare integer) so values survive serialization unchanged.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form.
pub type Q = BigRational;
/// Vector of exact rationals.
pub type QVec = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| q(x)).collect()
}

/// Exact conversion of a finite double (every double is a dyadic rational).
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).expect("non-finite float has no rational value")
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Very large numerators/denominators: fall back to scaled division.
        let n = x.numer().to_f64().unwrap_or(f64::MAX);
        let d = x.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

pub fn vec_from_f64(v: &[f64]) -> QVec {
    v.iter().map(|&x| from_f64(x)).collect()
}

pub fn vec_to_f64(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Parses `"a"`, `"a/b"` or a decimal such as `"0.75"` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Canonical string form: integers without a denominator.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Q], c: &Q) -> QVec {
    a.iter().map(|x| x * c).collect()
}

pub fn neg(a: &[Q]) -> QVec {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn norm2_sq(a: &[Q]) -> Q {
    dot(a, a)
}

/// Largest rational of the form `k/m` that is at most `sqrt(x)`, with
/// `m = ceil(1/tol)`; the result is within `tol` of `sqrt(x)` from below.
pub fn sqrt_floor(x: &Q, tol: &Q) -> Q {
    assert!(!x.is_negative(), "square root of a negative rational");
    assert!(tol.is_positive());
    let m = (Q::one() / tol).ceil().to_integer() + BigInt::one();
    let scaled = (x * Q::from_integer(&m * &m)).floor().to_integer();
    Q::new(scaled.sqrt(), m)
}

/// Smallest rational `k/m` that is at least `sqrt(x)`, within `tol` above.
pub fn sqrt_ceil(x: &Q, tol: &Q) -> Q {
    let lo = sqrt_floor(x, tol);
    if &(&lo * &lo) == x {
        lo
    } else {
        let m = (Q::one() / tol).ceil().to_integer() + BigInt::one();
        lo + Q::new(BigInt::one(), m)
    }
}

/// Rational upper bound on a nonnegative double, at most a relative
/// `1e-12` above it.
pub fn upper_bound_f64(x: f64) -> Q {
    from_f64(x * (1.0 + 1e-12) + f64::MIN_POSITIVE)
}

/// Rational lower bound on a positive double, at most a relative `1e-12`
/// below it.
pub fn lower_bound_f64(x: f64) -> Q {
    from_f64(x * (1.0 - 1e-12))
}

pub fn round_half_up(x: &Q) -> BigInt {
    (x + qr(1, 2)).floor().to_integer()
}

pub mod serde_q {
    //! Serde adapters writing rationals as strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = RawQ::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }

    /// Accepts `"3/4"`, `"2"` or a JSON integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawQ {
        Str(String),
        Int(i64),
    }

    impl RawQ {
        pub(crate) fn into_q(self) -> Result<Q> {
            match self {
                RawQ::Str(s) => parse_q(&s),
                RawQ::Int(i) => Ok(q(i)),
            }
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<QVec, D::Error> {
            let raw = Vec::<RawQ>::deserialize(d)?;
            raw.into_iter().map(|r| r.into_q().map_err(serde::de::Error::custom)).collect()
        }
    }

    pub mod mat {
        use super::*;

        pub fn serialize<S: Serializer>(m: &[QVec], s: S) -> std::result::Result<S::Ok, S::Error> {
            let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
            serde::Serialize::serialize(&rows, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<QVec>, D::Error> {
            let raw = Vec::<Vec<RawQ>>::deserialize(d)?;
            raw.into_iter()
                .map(|row| row.into_iter().map(|r| r.into_q().map_err(serde::de::Error::custom)).collect())
                .collect()
        }
    }
}

pub fn vec_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

pub fn int_vec_to_q(v: &[BigInt]) -> QVec {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}
