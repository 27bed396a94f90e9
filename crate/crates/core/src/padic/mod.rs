//! Fixed-precision arithmetic on `Z_p` and `Z_p^n`.
//!
//! A [`PadicInt`] stores the first `N` base-`p` digits of a p-adic integer,
//! least significant first. Equality means equality of those `N` digits; the
//! tail beyond the precision is unknown. Norms and valuations are exact: a
//! norm is always `0` or an integral power of `p`.

mod index;
mod int;
mod point;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use index::{initial_part, NaturalIndex};
pub use int::PadicInt;
pub use point::PadicPoint;

/// A validated prime, small enough that digit products fit in `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    /// Checks primality by trial division.
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p as u64) {
            Ok(Prime(p))
        } else {
            Err(Error::InvalidPrime(p as u64))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_u64(self) -> u64 {
        self.0 as u64
    }

    pub fn to_biguint(self) -> BigUint {
        BigUint::from(self.0)
    }

    /// `p^e` as a big integer.
    pub fn pow(self, e: usize) -> BigUint {
        num_traits::pow(self.to_biguint(), e)
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic order at finite precision.
///
/// `Infinite` is the marker for an all-zero digit string: the true order is
/// at least the precision, and is `+inf` when the value is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(usize),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    /// `ord >= k`, with the infinite marker counting as "at least anything".
    pub fn at_least(self, k: i64) -> bool {
        match self {
            Valuation::Finite(v) => v as i64 >= k,
            Valuation::Infinite => true,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// An exact p-adic absolute value: either zero or `p^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Zero,
    Power { prime: u32, exponent: i64 },
}

impl Norm {
    pub fn one(prime: Prime) -> Self {
        Norm::Power {
            prime: prime.get(),
            exponent: 0,
        }
    }

    pub fn power(prime: Prime, exponent: i64) -> Self {
        Norm::Power {
            prime: prime.get(),
            exponent,
        }
    }

    pub fn from_valuation(prime: Prime, v: Valuation) -> Self {
        match v {
            Valuation::Finite(k) => Norm::power(prime, -(k as i64)),
            Valuation::Infinite => Norm::Zero,
        }
    }

    pub fn exponent(self) -> Option<i64> {
        match self {
            Norm::Zero => None,
            Norm::Power { exponent, .. } => Some(exponent),
        }
    }

    /// Numerator and denominator of the norm as a reduced fraction.
    pub fn to_fraction(self) -> (BigUint, BigUint) {
        match self {
            Norm::Zero => (BigUint::from(0u32), BigUint::from(1u32)),
            Norm::Power { prime, exponent } => {
                let pk = num_traits::pow(BigUint::from(prime), exponent.unsigned_abs() as usize);
                if exponent >= 0 {
                    (pk, BigUint::from(1u32))
                } else {
                    (BigUint::from(1u32), pk)
                }
            }
        }
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Norms of different primes never meet in practice; compare exponents only.
impl Ord for Norm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Norm::Zero, Norm::Zero) => Ordering::Equal,
            (Norm::Zero, _) => Ordering::Less,
            (_, Norm::Zero) => Ordering::Greater,
            (Norm::Power { exponent: a, .. }, Norm::Power { exponent: b, .. }) => a.cmp(b),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.to_fraction();
        if den == BigUint::from(1u32) {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
