use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Norm, Prime, Valuation};
use crate::error::{Error, Result};

/// An element of `Z_p` known to `precision()` base-`p` digits.
///
/// Digit `i` is the coefficient of `p^i`. Arithmetic results carry the
/// minimum of the operand precisions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    prime: Prime,
    digits: Vec<u32>,
}

impl PadicInt {
    pub fn new(prime: Prime, digits: Vec<u32>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::ZeroPrecision);
        }
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d >= prime.get()) {
            return Err(Error::InvalidDigit {
                digit,
                position,
                prime: prime.get(),
            });
        }
        Ok(PadicInt { prime, digits })
    }

    pub fn zero(prime: Prime, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(PadicInt {
            prime,
            digits: vec![0; precision],
        })
    }

    pub fn one(prime: Prime, precision: usize) -> Result<Self> {
        let mut x = Self::zero(prime, precision)?;
        x.digits[0] = 1;
        Ok(x)
    }

    /// Canonical embedding of a non-negative integer, truncated to `precision` digits.
    pub fn from_integer(k: u64, p: u32, precision: usize) -> Result<Self> {
        Self::from_biguint(&BigUint::from(k), Prime::new(p)?, precision)
    }

    pub fn from_biguint(k: &BigUint, prime: Prime, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        let p = prime.get();
        let mut digits = Vec::with_capacity(precision);
        if let Some(mut v) = k.to_u128() {
            let p = p as u128;
            for _ in 0..precision {
                digits.push((v % p) as u32);
                v /= p;
            }
        } else {
            let mut v = k.clone();
            for _ in 0..precision {
                let (q, r) = v.div_rem(&BigUint::from(p));
                digits.push(r.to_u32().unwrap_or(0));
                v = q;
            }
        }
        Ok(PadicInt { prime, digits })
    }

    /// Embeds a signed integer, reducing it modulo `p^precision`.
    pub fn from_bigint(k: &BigInt, prime: Prime, precision: usize) -> Result<Self> {
        let modulus = BigInt::from(prime.pow(precision));
        let reduced = k.mod_floor(&modulus);
        Self::from_biguint(reduced.magnitude(), prime, precision)
    }

    /// Embeds `num / den` for a denominator coprime to `p`, by inverting `den`
    /// modulo `p^precision`.
    pub fn from_rational(num: &BigInt, den: &BigInt, prime: Prime, precision: usize) -> Result<Self> {
        let p = BigInt::from(prime.get());
        if den.is_zero() || den.mod_floor(&p).is_zero() {
            return Err(Error::NonIntegralConstant(format!("{num}/{den}")));
        }
        let modulus = BigInt::from(prime.pow(precision));
        let egcd = den.mod_floor(&modulus).extended_gcd(&modulus);
        debug_assert!(egcd.gcd.is_one());
        let inv = egcd.x.mod_floor(&modulus);
        Self::from_bigint(&(num * inv), prime, precision)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn digit(&self, i: usize) -> Option<u32> {
        self.digits.get(i).copied()
    }

    /// The representative in `[0, p^N)`.
    pub fn to_biguint(&self) -> BigUint {
        let p = BigUint::from(self.prime.get());
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &p + BigUint::from(d))
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// Index of the first nonzero digit, or the infinite marker.
    pub fn valuation(&self) -> Valuation {
        match self.digits.iter().position(|&d| d != 0) {
            Some(i) => Valuation::Finite(i),
            None => Valuation::Infinite,
        }
    }

    pub fn norm(&self) -> Norm {
        Norm::from_valuation(self.prime, self.valuation())
    }

    fn check_prime(&self, other: &PadicInt) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), other.prime.get()));
        }
        Ok(())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_prime(other)?;
        let p = self.prime.as_u64();
        let n = self.precision().min(other.precision());
        let mut digits = Vec::with_capacity(n);
        let mut carry = 0u64;
        for i in 0..n {
            let s = self.digits[i] as u64 + other.digits[i] as u64 + carry;
            digits.push((s % p) as u32);
            carry = s / p;
        }
        Ok(PadicInt {
            prime: self.prime,
            digits,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_prime(other)?;
        let p = self.prime.as_u64() as i64;
        let n = self.precision().min(other.precision());
        let mut digits = Vec::with_capacity(n);
        let mut borrow = 0i64;
        for i in 0..n {
            let mut d = self.digits[i] as i64 - other.digits[i] as i64 - borrow;
            if d < 0 {
                d += p;
                borrow = 1;
            } else {
                borrow = 0;
            }
            digits.push(d as u32);
        }
        Ok(PadicInt {
            prime: self.prime,
            digits,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(&self) -> PadicInt {
        let zero = PadicInt {
            prime: self.prime,
            digits: vec![0; self.precision()],
        };
        zero.sub(self).expect("same prime")
    }

    /// Schoolbook product truncated to `min` precision.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check_prime(other)?;
        let p = self.prime.as_u64() as u128;
        let n = self.precision().min(other.precision());
        let mut acc = vec![0u128; n];
        for (i, &a) in self.digits[..n].iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.digits[..n - i].iter().enumerate() {
                acc[i + j] += a as u128 * b as u128;
            }
        }
        let mut digits = Vec::with_capacity(n);
        let mut carry = 0u128;
        for v in acc {
            let s = v + carry;
            digits.push((s % p) as u32);
            carry = s / p;
        }
        Ok(PadicInt {
            prime: self.prime,
            digits,
        })
    }

    pub fn pow(&self, mut e: u64) -> PadicInt {
        let mut result = PadicInt::one(self.prime, self.precision()).expect("nonzero precision");
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same prime");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same prime");
            }
        }
        result
    }

    /// Divides by `p^e`, which must divide the value at the current precision.
    /// The precision drops by `e`.
    pub fn exact_div_p(&self, e: usize) -> Result<PadicInt> {
        if e == 0 {
            return Ok(self.clone());
        }
        let n = self.precision();
        if self.digits[..e.min(n)].iter().any(|&d| d != 0) {
            return Err(Error::InexactDivision { exponent: e });
        }
        if e >= n {
            return Err(Error::PrecisionExhausted {
                needed: e + 1,
                available: n,
            });
        }
        Ok(PadicInt {
            prime: self.prime,
            digits: self.digits[e..].to_vec(),
        })
    }

    /// Multiplies by `p^e`. The low `e` digits become known zeros, so the
    /// precision grows by `e`.
    pub fn mul_p_pow(&self, e: usize) -> PadicInt {
        let mut digits = vec![0; e];
        digits.extend_from_slice(&self.digits);
        PadicInt {
            prime: self.prime,
            digits,
        }
    }

    /// Keeps the first `precision` digits.
    pub fn truncate(&self, precision: usize) -> Result<PadicInt> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if precision > self.precision() {
            return Err(Error::PrecisionExhausted {
                needed: precision,
                available: self.precision(),
            });
        }
        Ok(PadicInt {
            prime: self.prime,
            digits: self.digits[..precision].to_vec(),
        })
    }

    /// `x_0 + x_1 p + ... + x_k p^k`.
    pub fn standard_seq(&self, k: usize) -> Result<BigUint> {
        if k >= self.precision() {
            return Err(Error::IndexOutOfRange {
                index: k,
                precision: self.precision(),
            });
        }
        self.residue(k + 1)
    }

    /// The value modulo `p^k`, as an integer in `[0, p^k)`.
    pub fn residue(&self, k: usize) -> Result<BigUint> {
        if k > self.precision() {
            return Err(Error::PrecisionExhausted {
                needed: k,
                available: self.precision(),
            });
        }
        let p = BigUint::from(self.prime.get());
        Ok(self.digits[..k]
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &p + BigUint::from(d)))
    }

    /// Whether `p^k` divides the value. Errors when fewer than `k` digits are known.
    pub fn divisible_by_p_pow(&self, k: usize) -> Result<bool> {
        if k > self.precision() {
            return Err(Error::PrecisionExhausted {
                needed: k,
                available: self.precision(),
            });
        }
        Ok(self.digits[..k].iter().all(|&d| d == 0))
    }

    /// Signed representative: the value read as an integer in `(-p^N/2, p^N/2]`.
    pub fn to_bigint_centered(&self) -> BigInt {
        let v = BigInt::from(self.to_biguint());
        let modulus = BigInt::from(self.prime.pow(self.precision()));
        if &v * 2 > modulus {
            v - modulus
        } else {
            v
        }
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, " | p={} N={}", self.prime, self.precision())
    }
}

#[derive(Serialize, Deserialize)]
struct PadicIntRepr {
    p: u32,
    precision: usize,
    digits: Vec<u32>,
}

impl Serialize for PadicInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PadicIntRepr {
            p: self.prime.get(),
            precision: self.precision(),
            digits: self.digits.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PadicIntRepr::deserialize(d)?;
        if repr.precision != repr.digits.len() {
            return Err(D::Error::custom(format!(
                "precision {} does not match {} digits",
                repr.precision,
                repr.digits.len()
            )));
        }
        let prime = Prime::new(repr.p).map_err(D::Error::custom)?;
        PadicInt::new(prime, repr.digits).map_err(D::Error::custom)
    }
}
