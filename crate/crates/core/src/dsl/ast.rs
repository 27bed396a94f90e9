use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Source position of a node (1-based line and column).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

/// Integer polynomial in the digit-position symbol `i`, low degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The polynomial `i`.
    pub fn symbol() -> Self {
        IntPoly::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, i: u64) -> BigInt {
        let i = BigInt::from(i);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &i + c)
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).cloned().unwrap_or_default();
                let b = other.coeffs.get(k).cloned().unwrap_or_default();
                a + b
            })
            .collect();
        IntPoly::new(coeffs)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return IntPoly::default();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a_deg, a) in self.coeffs.iter().enumerate() {
            for (b_deg, b) in other.coeffs.iter().enumerate() {
                coeffs[a_deg + b_deg] += a * b;
            }
        }
        IntPoly::new(coeffs)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        (0..e).fold(IntPoly::constant(BigInt::one()), |acc, _| acc.mul(self))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            first = false;
            let mag = c.abs();
            match deg {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*i")?,
                _ => write!(f, "{mag}*i^{deg}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    /// `num / den`; the denominator must be a unit mod p.
    Rational(BigInt, BigInt),
    /// 1-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    /// Exact division by `p^e`, `e >= 1`.
    DivP(Box<Expr>, u32),
    /// `sum_i p^i * a(i) * x_i^e` over the digits `x_i` of variable `var`.
    DigitSum {
        var: usize,
        coeff: IntPoly,
        exponent: u32,
    },
}

// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(BigInt::from(v)))
    }

    pub fn var(i: usize) -> Self {
        Expr::new(ExprKind::Var(i))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Add(Box::new(a), Box::new(b)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Sub(Box::new(a), Box::new(b)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::new(ExprKind::Mul(Box::new(a), Box::new(b)))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Self {
        Expr::new(ExprKind::Neg(Box::new(a)))
    }

    pub fn pow(a: Expr, e: u32) -> Self {
        Expr::new(ExprKind::Pow(Box::new(a), e))
    }

    pub fn divp(a: Expr, e: u32) -> Self {
        Expr::new(ExprKind::DivP(Box::new(a), e))
    }

    pub fn digit_sum(var: usize, coeff: IntPoly, exponent: u32) -> Self {
        Expr::new(ExprKind::DigitSum {
            var,
            coeff,
            exponent,
        })
    }

    /// Worst-case number of digits lost to exact `p`-divisions on any
    /// evaluation path.
    pub fn precision_loss(&self) -> usize {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Rational(..) | ExprKind::Var(_) | ExprKind::DigitSum { .. } => 0,
            ExprKind::Neg(a) | ExprKind::Pow(a, _) => a.precision_loss(),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
                a.precision_loss().max(b.precision_loss())
            }
            ExprKind::DivP(a, e) => a.precision_loss() + *e as usize,
        }
    }

    /// Largest variable index referenced, 0 for constants.
    pub fn max_var(&self) -> usize {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Rational(..) => 0,
            ExprKind::Var(i) | ExprKind::DigitSum { var: i, .. } => *i,
            ExprKind::Neg(a) | ExprKind::Pow(a, _) | ExprKind::DivP(a, _) => a.max_var(),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => a.max_var().max(b.max_var()),
        }
    }

    pub fn contains_divp(&self) -> bool {
        match &self.kind {
            ExprKind::DivP(..) => true,
            ExprKind::Int(_) | ExprKind::Rational(..) | ExprKind::Var(_) | ExprKind::DigitSum { .. } => false,
            ExprKind::Neg(a) | ExprKind::Pow(a, _) => a.contains_divp(),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
                a.contains_divp() || b.contains_divp()
            }
        }
    }

    pub(crate) fn visit_rationals<'a>(&'a self, out: &mut Vec<(&'a BigInt, &'a BigInt, Span)>) {
        match &self.kind {
            ExprKind::Rational(n, d) => out.push((n, d, self.span)),
            ExprKind::Int(_) | ExprKind::Var(_) | ExprKind::DigitSum { .. } => {}
            ExprKind::Neg(a) | ExprKind::Pow(a, _) | ExprKind::DivP(a, _) => a.visit_rationals(out),
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
                a.visit_rationals(out);
                b.visit_rationals(out);
            }
        }
    }
}

/// Fully parenthesised rendering that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Int(v) if v.is_negative() => write!(f, "(-{})", v.abs()),
            ExprKind::Int(v) => write!(f, "{v}"),
            ExprKind::Rational(n, d) => {
                // the grammar has no signed denominators; fold the sign into the numerator
                let (n, d) = if d.is_negative() { (-n, -d) } else { (n.clone(), d.clone()) };
                if n.is_negative() {
                    write!(f, "(-{}/{})", n.abs(), d)
                } else {
                    write!(f, "({n}/{d})")
                }
            }
            ExprKind::Var(i) => write!(f, "x{i}"),
            ExprKind::Neg(a) if matches!(a.kind, ExprKind::Int(_) | ExprKind::Rational(..)) => {
                write!(f, "(-({a}))")
            }
            ExprKind::Neg(a) => write!(f, "(-{a})"),
            ExprKind::Add(a, b) => write!(f, "({a} + {b})"),
            ExprKind::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprKind::Mul(a, b) => write!(f, "({a} * {b})"),
            ExprKind::Pow(a, e) => write!(f, "({a})^{e}"),
            ExprKind::DivP(a, e) => write!(f, "divp({a}, {e})"),
            ExprKind::DigitSum { var, coeff, exponent } => {
                write!(f, "digitsum(x{var}, {coeff}, {exponent})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic() {
        let i = IntPoly::symbol();
        let p = IntPoly::constant(BigInt::from(4)).add(&i.pow(3).mul(&IntPoly::constant(BigInt::from(7))));
        assert_eq!(p.eval(0), BigInt::from(4));
        assert_eq!(p.eval(2), BigInt::from(60));
        assert_eq!(p.to_string(), "4 + 7*i^3");
        assert_eq!(p.neg().to_string(), "-4 - 7*i^3");
        assert_eq!(IntPoly::default().to_string(), "0");
        assert_eq!(i.add(&i.neg()), IntPoly::default());
    }

    #[test]
    fn precision_loss_is_worst_path() {
        let inner = Expr::divp(Expr::sub(Expr::var(1), Expr::pow(Expr::var(1), 7)), 1);
        let e = Expr::add(Expr::divp(inner.clone(), 2), Expr::var(1));
        assert_eq!(inner.precision_loss(), 1);
        assert_eq!(e.precision_loss(), 3);
        assert!(e.contains_divp());
        assert_eq!(e.max_var(), 1);
    }
}
