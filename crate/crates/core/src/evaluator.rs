//! Functions `Z_p^n -> Z_p` as seen by the expansion, verification and
//! lifting code.
//!
//! Everything downstream only needs to evaluate a function at points; the
//! [`Evaluator`] trait is that interface. DSL functions, coefficient tables,
//! projections and plain closures all implement it.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::padic::{NaturalIndex, PadicInt, PadicPoint, Prime};

pub trait Evaluator: Sync {
    fn prime(&self) -> Prime;

    fn arity(&self) -> usize;

    /// Number of digits used when embedding integer arguments.
    fn precision(&self) -> usize;

    fn eval(&self, point: &PadicPoint) -> Result<PadicInt>;

    /// Evaluates at a point with non-negative integer coordinates.
    fn eval_naturals(&self, args: &[BigUint]) -> Result<PadicInt> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: args.len(),
            });
        }
        let point = PadicPoint::from_naturals(args, self.prime(), self.precision())?;
        self.eval(&point)
    }

    fn eval_indices(&self, args: &[NaturalIndex]) -> Result<PadicInt> {
        let args: Vec<BigUint> = args.iter().map(|m| m.value().clone()).collect();
        self.eval_naturals(&args)
    }
}

impl<E: Evaluator + ?Sized> Evaluator for &E {
    fn prime(&self) -> Prime {
        (**self).prime()
    }

    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn precision(&self) -> usize {
        (**self).precision()
    }

    fn eval(&self, point: &PadicPoint) -> Result<PadicInt> {
        (**self).eval(point)
    }
}

/// Adapts a closure into an [`Evaluator`].
pub struct FnEvaluator<F> {
    prime: Prime,
    arity: usize,
    precision: usize,
    f: F,
}

impl<F> FnEvaluator<F>
where
    F: Fn(&PadicPoint) -> Result<PadicInt> + Sync,
{
    pub fn new(prime: Prime, arity: usize, precision: usize, f: F) -> Self {
        FnEvaluator {
            prime,
            arity,
            precision,
            f,
        }
    }
}

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(&PadicPoint) -> Result<PadicInt> + Sync,
{
    fn prime(&self) -> Prime {
        self.prime
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn precision(&self) -> usize {
        self.precision
    }

    fn eval(&self, point: &PadicPoint) -> Result<PadicInt> {
        if point.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.arity(),
            });
        }
        (self.f)(point)
    }
}

/// The univariate slice `z -> F(x_1, .., z, .., x_n)` with every coordinate
/// except `slot` held fixed.
pub struct Projection<'a, E: ?Sized> {
    inner: &'a E,
    slot: usize,
    fixed: Vec<PadicInt>,
}

impl<'a, E: Evaluator + ?Sized> Projection<'a, E> {
    /// `fixed` holds the `n - 1` coordinates other than `slot` (0-based), in order.
    pub fn new(inner: &'a E, slot: usize, fixed: Vec<PadicInt>) -> Result<Self> {
        let n = inner.arity();
        if slot >= n {
            return Err(Error::CoordinateOutOfRange {
                coordinate: slot,
                arity: n,
            });
        }
        if fixed.len() + 1 != n {
            return Err(Error::ArityMismatch {
                expected: n - 1,
                got: fixed.len(),
            });
        }
        Ok(Projection { inner, slot, fixed })
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn fixed(&self) -> &[PadicInt] {
        &self.fixed
    }
}

impl<E: Evaluator + ?Sized> Evaluator for Projection<'_, E> {
    fn prime(&self) -> Prime {
        self.inner.prime()
    }

    fn arity(&self) -> usize {
        1
    }

    fn precision(&self) -> usize {
        self.inner.precision()
    }

    fn eval(&self, point: &PadicPoint) -> Result<PadicInt> {
        if point.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: point.arity(),
            });
        }
        let mut coords = self.fixed.clone();
        coords.insert(self.slot, point.coords()[0].clone());
        self.inner.eval(&PadicPoint::new(coords)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_fixes_other_coordinates() {
        let p = Prime::new(5).unwrap();
        let sum = FnEvaluator::new(p, 2, 6, |x: &PadicPoint| x.coords()[0].add(&x.coords()[1]));
        let c = PadicInt::from_integer(3, 5, 6).unwrap();
        let proj = Projection::new(&sum, 0, vec![c]).unwrap();
        let v = proj.eval_naturals(&[BigUint::from(4u32)]).unwrap();
        assert_eq!(v, PadicInt::from_integer(7, 5, 6).unwrap());
        assert!(matches!(
            Projection::new(&sum, 2, vec![]),
            Err(Error::CoordinateOutOfRange { .. })
        ));
        assert!(matches!(
            Projection::new(&sum, 1, vec![]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn arity_is_checked() {
        let p = Prime::new(3).unwrap();
        let id = FnEvaluator::new(p, 1, 4, |x: &PadicPoint| Ok(x.coords()[0].clone()));
        assert!(id.eval_naturals(&[BigUint::from(1u32), BigUint::from(2u32)]).is_err());
    }
}
