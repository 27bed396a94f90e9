//! A small expression language for functions `Z_p^n -> Z_p`.
//!
//! Expressions are polynomials with p-integral rational constants, extended
//! with exact division by powers of `p` (`divp`) and weighted digit sums
//! (`digitsum`). Parsing is independent of the prime; binding an expression
//! to a prime and a working precision yields a [`DslFunction`].

mod ast;
mod parser;
pub mod sample;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use ast::{Expr, ExprKind, IntPoly, Span};
pub use parser::parse;

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::padic::{PadicInt, PadicPoint, Prime};
use crate::sampling::random_point;

/// On-disk function definition:
/// `{"arity":1,"alpha":[0],"body":"-5 + digitsum(x1, 4+7*i^3, 5)"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuncDef {
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<u32>>,
    pub body: String,
}

impl FuncDef {
    pub fn new(arity: usize, body: impl Into<String>) -> Self {
        FuncDef {
            arity,
            alpha: None,
            body: body.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.arity == 0 {
            return Err(Error::ArityMismatch { expected: 1, got: 0 });
        }
        if let Some(alpha) = &self.alpha {
            if alpha.len() != self.arity {
                return Err(Error::ArityMismatch {
                    expected: self.arity,
                    got: alpha.len(),
                });
            }
        }
        Ok(())
    }

    pub fn parse(&self) -> Result<Expr> {
        self.validate()?;
        parse(&self.body, self.arity)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let def: FuncDef =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        def.validate()?;
        Ok(def)
    }
}

/// A parsed expression bound to a prime and a working precision.
#[derive(Debug, Clone)]
pub struct DslFunction {
    expr: Expr,
    arity: usize,
    prime: Prime,
    precision: usize,
}

impl DslFunction {
    pub fn new(expr: Expr, arity: usize, prime: Prime, precision: usize) -> Result<Self> {
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if expr.max_var() > arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: expr.max_var(),
            });
        }
        let mut rationals = Vec::new();
        expr.visit_rationals(&mut rationals);
        let p = BigInt::from(prime.get());
        for (n, d, span) in rationals {
            if d.mod_floor(&p).is_zero() {
                return Err(Error::NonIntegralConstant(format!(
                    "{n}/{d} at {}:{}",
                    span.line, span.column
                )));
            }
        }
        Ok(DslFunction {
            expr,
            arity,
            prime,
            precision,
        })
    }

    /// Parses `text` and binds it.
    pub fn parse(text: &str, arity: usize, prime: Prime, precision: usize) -> Result<Self> {
        Self::new(parse(text, arity)?, arity, prime, precision)
    }

    pub fn from_def(def: &FuncDef, prime: Prime, precision: usize) -> Result<Self> {
        Self::new(def.parse()?, def.arity, prime, precision)
    }

    /// Working precision chosen so that values are known to `target` digits
    /// after every `divp` on the worst path.
    pub fn with_target_precision(expr: Expr, arity: usize, prime: Prime, target: usize) -> Result<Self> {
        let loss = expr.precision_loss();
        Self::new(expr, arity, prime, target + loss)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn precision_loss(&self) -> usize {
        self.expr.precision_loss()
    }

    /// Same function at a different working precision.
    pub fn at_precision(&self, precision: usize) -> Result<Self> {
        Self::new(self.expr.clone(), self.arity, self.prime, precision)
    }
}

impl Evaluator for DslFunction {
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
        if point.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), point.prime().get()));
        }
        eval(&self.expr, point)
    }
}

/// Evaluates `expr` at `point`. The result's precision is the point's
/// precision minus the `divp` exponents met on the way.
pub fn eval(expr: &Expr, point: &PadicPoint) -> Result<PadicInt> {
    let prime = point.prime();
    let n = point.precision();
    match &expr.kind {
        ExprKind::Int(k) => PadicInt::from_bigint(k, prime, n),
        ExprKind::Rational(num, den) => PadicInt::from_rational(num, den, prime, n),
        ExprKind::Var(i) => point.coord(i - 1).cloned(),
        ExprKind::Neg(a) => Ok(eval(a, point)?.neg()),
        ExprKind::Add(a, b) => eval(a, point)?.add(&eval(b, point)?),
        ExprKind::Sub(a, b) => eval(a, point)?.sub(&eval(b, point)?),
        ExprKind::Mul(a, b) => eval(a, point)?.mul(&eval(b, point)?),
        ExprKind::Pow(a, e) => Ok(eval(a, point)?.pow(*e as u64)),
        ExprKind::DivP(a, e) => eval(a, point)?.exact_div_p(*e as usize),
        ExprKind::DigitSum { var, coeff, exponent } => {
            let x = point.coord(var - 1)?;
            digit_sum(x, coeff, *exponent)
        }
    }
}

/// `sum_{i < N} p^i * a(i) * x_i^e  mod p^N`.
fn digit_sum(x: &PadicInt, coeff: &IntPoly, exponent: u32) -> Result<PadicInt> {
    let prime = x.prime();
    let n = x.precision();
    let modulus = prime.pow(n);
    let e = BigUint::from(exponent);
    let mut sum = BigInt::zero();
    let mut p_i = BigInt::from(1u32);
    for (i, &d) in x.digits().iter().enumerate() {
        if d != 0 {
            let power = BigUint::from(d).modpow(&e, &modulus);
            sum += &p_i * coeff.eval(i as u64) * BigInt::from(power);
        }
        p_i *= prime.get();
    }
    PadicInt::from_bigint(&sum, prime, n)
}

/// Outcome of randomly probing a function for failed exact divisions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WellDefinedReport {
    pub samples: usize,
    pub seed: u64,
    pub inexact_divisions: usize,
    pub other_failures: usize,
    pub first_failure: Option<PadicPoint>,
}

impl WellDefinedReport {
    pub fn passed(&self) -> bool {
        self.inexact_divisions == 0 && self.other_failures == 0
    }
}

/// Evaluates `f` at `samples` random points of `Z_p^n` (at the function's
/// working precision) and counts inexact divisions. Zero failures is
/// evidence, not proof.
pub fn well_defined_check<E: Evaluator + ?Sized>(f: &E, samples: usize, seed: u64) -> Result<WellDefinedReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = WellDefinedReport {
        samples,
        seed,
        inexact_divisions: 0,
        other_failures: 0,
        first_failure: None,
    };
    for _ in 0..samples {
        let point = random_point(&mut rng, f.prime(), f.arity(), f.precision())?;
        match f.eval(&point) {
            Ok(_) => continue,
            Err(Error::InexactDivision { .. }) => report.inexact_divisions += 1,
            Err(_) => report.other_failures += 1,
        }
        if report.first_failure.is_none() {
            report.first_failure = Some(point);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn identity_returns_coordinate() {
        let f = DslFunction::parse("x1", 1, prime(5), 6).unwrap();
        let x = PadicInt::from_integer(1234, 5, 6).unwrap();
        assert_eq!(f.eval(&PadicPoint::single(x.clone())).unwrap(), x);
    }

    #[test]
    fn fermat_quotient_at_two() {
        let n = 6;
        let f = DslFunction::parse("divp(x1 - x1^7, 1)", 1, prime(7), n).unwrap();
        let v = f.eval_naturals(&[BigUint::from(2u32)]).unwrap();
        assert_eq!(v.precision(), n - 1);
        // (2 - 2^7) / 7 = -18
        assert_eq!(v, PadicInt::from_bigint(&BigInt::from(-18), prime(7), n - 1).unwrap());
    }

    #[test]
    fn digit_sum_example_vanishes_mod_7_at_5() {
        let f = DslFunction::parse("-5 + digitsum(x1, 4+7*i^3, 5)", 1, prime(7), 8).unwrap();
        let v = f.eval_naturals(&[BigUint::from(5u32)]).unwrap();
        assert_eq!(v.digit(0), Some(0));
        // only digit 0 is nonzero: -5 + 4 * 5^5 = 12495
        assert_eq!(v, PadicInt::from_integer(12495, 7, 8).unwrap());
    }

    #[test]
    fn digit_sum_uses_every_digit() {
        // x = 3 + 2*7, a(i) = 4 + 7 i^3, e = 5
        let f = DslFunction::parse("digitsum(x1, 4+7*i^3, 5)", 1, prime(7), 5).unwrap();
        let v = f.eval_naturals(&[BigUint::from(17u32)]).unwrap();
        let expected = BigInt::from(4 * 3i64.pow(5)) + BigInt::from(7 * 11 * 2i64.pow(5));
        assert_eq!(v, PadicInt::from_bigint(&expected, prime(7), 5).unwrap());
    }

    #[test]
    fn digit_sum_identity_exhaustive() {
        let f = DslFunction::parse("digitsum(x1, 1, 1)", 1, prime(3), 4).unwrap();
        for k in 0..81u64 {
            let x = PadicInt::from_integer(k, 3, 4).unwrap();
            assert_eq!(f.eval(&PadicPoint::single(x.clone())).unwrap(), x);
        }
    }

    #[test]
    fn polynomials_agree_with_integer_arithmetic_mod_27() {
        let text = "2*x1^3 - 5*x1*x2 + x2^2 + 7";
        let f = DslFunction::parse(text, 2, prime(3), 3).unwrap();
        for a in 0..27i64 {
            for b in 0..27i64 {
                let v = f.eval_naturals(&[BigUint::from(a as u64), BigUint::from(b as u64)]).unwrap();
                let expected = (2 * a.pow(3) - 5 * a * b + b * b + 7).rem_euclid(27);
                assert_eq!(v.to_biguint().to_i64(), Some(expected));
            }
        }
    }

    #[test]
    fn rational_constants() {
        let f = DslFunction::parse("1/2 * x1", 1, prime(5), 4).unwrap();
        let v = f.eval_naturals(&[BigUint::from(2u32)]).unwrap();
        assert_eq!(v, PadicInt::one(prime(5), 4).unwrap());
        assert!(matches!(
            DslFunction::parse("1/5 * x1", 1, prime(5), 4),
            Err(Error::NonIntegralConstant(_))
        ));
    }

    #[test]
    fn inexact_division_is_reported() {
        let f = DslFunction::parse("divp(x1, 1)", 1, prime(7), 4).unwrap();
        assert_eq!(
            f.eval_naturals(&[BigUint::from(3u32)]),
            Err(Error::InexactDivision { exponent: 1 })
        );
        assert!(f.eval_naturals(&[BigUint::from(14u32)]).is_ok());
    }

    #[test]
    fn well_defined_reports() {
        let fermat = DslFunction::parse("divp(x1 - x1^7, 1)", 1, prime(7), 6).unwrap();
        let r = well_defined_check(&fermat, 500, 1).unwrap();
        assert!(r.passed());

        let bad = DslFunction::parse("divp(x1, 1)", 1, prime(7), 6).unwrap();
        let r = well_defined_check(&bad, 500, 1).unwrap();
        assert!(r.inexact_divisions > 0);
        let witness = r.first_failure.unwrap();
        assert_ne!(witness.coords()[0].digit(0), Some(0));

        let square = DslFunction::parse("x1^2", 1, prime(7), 6).unwrap();
        assert!(well_defined_check(&square, 200, 1).unwrap().passed());
    }

    #[test]
    fn func_def_json() {
        let text = r#"{"arity":1,"alpha":[0],"body":"-5 + digitsum(x1, 4+7*i^3, 5)"}"#;
        let def = FuncDef::from_json(text).unwrap();
        assert_eq!(def.alpha, Some(vec![0]));
        assert_eq!(serde_json::to_string(&def).unwrap(), text);
        assert!(def.parse().is_ok());
        let bad = r#"{"arity":2,"alpha":[0],"body":"x1"}"#;
        assert!(FuncDef::from_json(bad).is_err());
    }
}
