use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{PadicInt, Prime};
use crate::error::{Error, Result};

/// A non-negative integer used as a basis index, read in base `p` on demand.
/// Serialized as a decimal string so that indices beyond `u64` survive JSON.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NaturalIndex(BigUint);

impl Serialize for NaturalIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for NaturalIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<BigUint>()
            .map(NaturalIndex)
            .map_err(serde::de::Error::custom)
    }
}

impl NaturalIndex {
    pub fn new(value: BigUint) -> Self {
        NaturalIndex(value)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// Base-`p` digits, least significant first; empty for zero.
    pub fn base_digits(&self, p: Prime) -> Vec<u32> {
        let mut digits = Vec::new();
        if let Some(mut v) = self.0.to_u128() {
            let p = p.get() as u128;
            while v > 0 {
                digits.push((v % p) as u32);
                v /= p;
            }
        } else {
            let mut v = self.0.clone();
            let pb = p.to_biguint();
            while !v.is_zero() {
                let (q, r) = v.div_rem(&pb);
                digits.push(r.to_u32().unwrap_or(0));
                v = q;
            }
        }
        digits
    }

    /// `s(m) = floor(log_p m)`: the position of the top nonzero digit.
    pub fn floor_log_p(&self, p: Prime) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::LogOfZero);
        }
        Ok(self.base_digits(p).len() - 1)
    }

    /// `floor(log_p m)` with the convention that it is `0` for every `m < p`,
    /// including `m = 0`. This is the exponent used in all coefficient bounds.
    pub fn level(&self, p: Prime) -> usize {
        self.floor_log_p(p).unwrap_or(0)
    }

    /// `m*`: `m` with its top base-`p` digit removed. Defined for `m >= p`.
    pub fn m_star(&self, p: Prime) -> Result<NaturalIndex> {
        let s = self.level(p);
        if s == 0 {
            return Err(Error::UndefinedMStar(self.0.to_string()));
        }
        Ok(NaturalIndex(&self.0 % p.pow(s)))
    }

    /// `m >= p`, i.e. `m*` exists.
    pub fn has_star(&self, p: Prime) -> bool {
        self.0 >= p.to_biguint()
    }
}

impl From<u64> for NaturalIndex {
    fn from(v: u64) -> Self {
        NaturalIndex(BigUint::from(v))
    }
}

impl From<BigUint> for NaturalIndex {
    fn from(v: BigUint) -> Self {
        NaturalIndex(v)
    }
}

impl fmt::Display for NaturalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `m ◁ x`: `m` is one of the partial sums `x_0 + ... + x_k p^k`.
///
/// For `m >= 1` this is `x ≡ m (mod p^(s(m)+1))`; for `m = 0` it is `x_0 = 0`.
/// Errors when `x` carries fewer than `s(m)+1` digits.
pub fn initial_part(m: &NaturalIndex, x: &PadicInt) -> Result<bool> {
    let p = x.prime();
    let digits = m.base_digits(p);
    if digits.is_empty() {
        return Ok(x.digits()[0] == 0);
    }
    if digits.len() > x.precision() {
        return Err(Error::PrecisionExhausted {
            needed: digits.len(),
            available: x.precision(),
        });
    }
    Ok(x.digits()[..digits.len()] == digits[..])
}
