use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::{Norm, PadicInt, Prime, Valuation};
use crate::error::{Error, Result};

/// A point of `Z_p^n`; all coordinates share one prime and one precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PadicPoint {
    coords: Vec<PadicInt>,
}

impl PadicPoint {
    pub fn new(coords: Vec<PadicInt>) -> Result<Self> {
        let first = coords.first().ok_or(Error::ArityMismatch {
            expected: 1,
            got: 0,
        })?;
        for c in &coords[1..] {
            if c.prime() != first.prime() {
                return Err(Error::PrimeMismatch(first.prime().get(), c.prime().get()));
            }
        }
        // Mixed precisions collapse to the smallest one.
        let n = coords.iter().map(PadicInt::precision).min().unwrap_or(1);
        let coords = coords
            .into_iter()
            .map(|c| if c.precision() == n { Ok(c) } else { c.truncate(n) })
            .collect::<Result<Vec<_>>>()?;
        Ok(PadicPoint { coords })
    }

    pub fn single(x: PadicInt) -> Self {
        PadicPoint { coords: vec![x] }
    }

    pub fn from_naturals(values: &[BigUint], prime: Prime, precision: usize) -> Result<Self> {
        let coords = values
            .iter()
            .map(|v| PadicInt::from_biguint(v, prime, precision))
            .collect::<Result<Vec<_>>>()?;
        PadicPoint::new(coords)
    }

    pub fn from_u64s(values: &[u64], prime: Prime, precision: usize) -> Result<Self> {
        let values: Vec<BigUint> = values.iter().map(|&v| BigUint::from(v)).collect();
        Self::from_naturals(&values, prime, precision)
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn prime(&self) -> Prime {
        self.coords[0].prime()
    }

    pub fn precision(&self) -> usize {
        self.coords[0].precision()
    }

    pub fn coords(&self) -> &[PadicInt] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> Result<&PadicInt> {
        self.coords.get(i).ok_or(Error::CoordinateOutOfRange {
            coordinate: i,
            arity: self.arity(),
        })
    }

    /// Replaces coordinate `i`.
    pub fn with_coord(&self, i: usize, value: PadicInt) -> Result<PadicPoint> {
        if i >= self.arity() {
            return Err(Error::CoordinateOutOfRange {
                coordinate: i,
                arity: self.arity(),
            });
        }
        let mut coords = self.coords.clone();
        coords[i] = value;
        PadicPoint::new(coords)
    }

    pub fn sub(&self, other: &PadicPoint) -> Result<PadicPoint> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: other.arity(),
            });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        PadicPoint::new(coords)
    }

    /// `ord(x) = min_i ord(x_i)`.
    pub fn valuation(&self) -> Valuation {
        self.coords
            .iter()
            .map(PadicInt::valuation)
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// `||x||_p = max_i |x_i|_p`.
    pub fn vec_norm(&self) -> Norm {
        self.coords
            .iter()
            .map(PadicInt::norm)
            .max()
            .unwrap_or(Norm::Zero)
    }
}

impl fmt::Display for PadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl<'de> Deserialize<'de> for PadicPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let coords = Vec::<PadicInt>::deserialize(d)?;
        PadicPoint::new(coords).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn vec_norm_examples() {
        let zero = PadicPoint::from_u64s(&[0, 0], p(3), 4).unwrap();
        assert_eq!(zero.vec_norm(), Norm::Zero);
        // ords (2, 0) for p = 5
        let x = PadicPoint::from_u64s(&[25, 3], p(5), 4).unwrap();
        assert_eq!(x.vec_norm().to_string(), "1");
        // ords (3, 1) for p = 2: max(1/8, 1/2)
        let y = PadicPoint::from_u64s(&[8, 2], p(2), 6).unwrap();
        assert_eq!(y.vec_norm().to_string(), "1/2");
        assert_eq!(y.valuation(), Valuation::Finite(1));
    }

    #[test]
    fn construction_checks() {
        assert!(PadicPoint::new(vec![]).is_err());
        let a = PadicInt::from_integer(1, 3, 4).unwrap();
        let b = PadicInt::from_integer(1, 5, 4).unwrap();
        assert_eq!(PadicPoint::new(vec![a.clone(), b]), Err(Error::PrimeMismatch(3, 5)));
        let c = PadicInt::from_integer(2, 3, 2).unwrap();
        let pt = PadicPoint::new(vec![a, c]).unwrap();
        assert_eq!(pt.precision(), 2);
        assert!(pt.coord(2).is_err());
    }
}
