//! Recursive-descent parser for the function language.
//!
//! ```text
//! expr     = term , { ("+" | "-") , term } ;
//! term     = factor , { "*" , factor } ;
//! factor   = "-" , factor | base , [ "^" , natural ] ;
//! base     = integer | integer "/" integer | variable | "(" expr ")"
//!          | "divp" "(" expr "," natural ")"
//!          | "digitsum" "(" variable "," ipoly "," natural ")" ;
//! variable = "x" natural ;
//! ```
//!
//! A minus sign directly in front of an integer or rational literal is folded
//! into the literal, so `-5` is the constant `-5` rather than `neg(5)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::ast::{Expr, ExprKind, IntPoly, Span};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            column += i - start;
            let value = digits.parse::<BigUint>().map_err(|e| Error::parse(span.line, span.column, e.to_string()))?;
            tokens.push(Token {
                tok: Tok::Int(value),
                span,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            tokens.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                span,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            other => {
                return Err(Error::parse(line, column, format!("unexpected character '{other}'")));
            }
        };
        tokens.push(Token { tok, span });
        i += 1;
        column += 1;
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span { line, column },
    });
    Ok(tokens)
}

/// Parses `text` as a function of `arity` variables `x1 .. xn`.
pub fn parse(text: &str, arity: usize) -> Result<Expr> {
    if arity == 0 {
        return Err(Error::parse(1, 1, "arity must be at least 1"));
    }
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        arity,
    };
    let expr = parser.expr()?;
    parser.expect(Tok::Eof)?;
    Ok(expr)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    arity: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let span = self.peek().span;
        Error::parse(span.line, span.column, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<Span> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().tok.describe()
            )))
        }
    }

    fn natural(&mut self, what: &str) -> Result<u32> {
        let span = self.peek().span;
        match self.bump().tok {
            Tok::Int(v) => v
                .to_u32()
                .ok_or_else(|| Error::parse(span.line, span.column, format!("{what} {v} is too large"))),
            other => Err(Error::parse(
                span.line,
                span.column,
                format!("expected {what}, found {}", other.describe()),
            )),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let span = self.peek().span;
            let kind = match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    ExprKind::Add(Box::new(lhs), Box::new(self.term()?))
                }
                Tok::Minus => {
                    self.bump();
                    ExprKind::Sub(Box::new(lhs), Box::new(self.term()?))
                }
                _ => return Ok(lhs),
            };
            lhs = Expr { kind, span };
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.peek().tok == Tok::Star {
            let span = self.bump().span;
            let rhs = self.factor()?;
            lhs = Expr {
                kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
        Ok(lhs)
    }

    /// Whether the tokens after a unary minus form a bare literal that is not
    /// raised to a power.
    fn negative_literal_ahead(&self) -> bool {
        if !matches!(self.peek_at(1), Tok::Int(_)) {
            return false;
        }
        let after = if matches!(self.peek_at(2), Tok::Slash) && matches!(self.peek_at(3), Tok::Int(_)) {
            self.peek_at(4)
        } else {
            self.peek_at(2)
        };
        *after != Tok::Caret
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Minus {
            if self.negative_literal_ahead() {
                let span = self.bump().span;
                let lit = self.literal(span)?;
                let kind = match lit.kind {
                    ExprKind::Int(v) => ExprKind::Int(-v),
                    ExprKind::Rational(n, d) => ExprKind::Rational(-n, d),
                    other => other,
                };
                return Ok(Expr { kind, span });
            }
            let span = self.bump().span;
            let inner = self.factor()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span,
            });
        }
        let base = self.base()?;
        if self.peek().tok == Tok::Caret {
            let span = self.bump().span;
            let e = self.natural("exponent")?;
            return Ok(Expr {
                kind: ExprKind::Pow(Box::new(base), e),
                span,
            });
        }
        Ok(base)
    }

    fn literal(&mut self, span: Span) -> Result<Expr> {
        let num = match self.bump().tok {
            Tok::Int(v) => BigInt::from(v),
            other => return Err(Error::parse(span.line, span.column, format!("expected integer, found {}", other.describe()))),
        };
        if self.peek().tok == Tok::Slash {
            self.bump();
            let den_span = self.peek().span;
            let den = match self.bump().tok {
                Tok::Int(v) => BigInt::from(v),
                other => {
                    return Err(Error::parse(
                        den_span.line,
                        den_span.column,
                        format!("expected denominator, found {}", other.describe()),
                    ))
                }
            };
            if den.is_zero() {
                return Err(Error::parse(den_span.line, den_span.column, "zero denominator"));
            }
            return Ok(Expr {
                kind: ExprKind::Rational(num, den),
                span,
            });
        }
        Ok(Expr {
            kind: ExprKind::Int(num),
            span,
        })
    }

    fn variable(&mut self) -> Result<(usize, Span)> {
        let span = self.peek().span;
        match self.bump().tok {
            Tok::Ident(name) => {
                let index = name
                    .strip_prefix('x')
                    .filter(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
                    .and_then(|rest| rest.parse::<usize>().ok())
                    .ok_or_else(|| Error::parse(span.line, span.column, format!("unknown identifier '{name}'")))?;
                if index == 0 || index > self.arity {
                    return Err(Error::parse(
                        span.line,
                        span.column,
                        format!("variable x{index} out of range for arity {}", self.arity),
                    ));
                }
                Ok((index, span))
            }
            other => Err(Error::parse(
                span.line,
                span.column,
                format!("expected variable, found {}", other.describe()),
            )),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let span = self.peek().span;
        match self.peek().tok.clone() {
            Tok::Int(_) => self.literal(span),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "divp" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(Tok::Comma)?;
                let e_span = self.peek().span;
                let e = self.natural("division exponent")?;
                if e == 0 {
                    return Err(Error::parse(e_span.line, e_span.column, "divp exponent must be at least 1"));
                }
                self.expect(Tok::RParen)?;
                Ok(Expr {
                    kind: ExprKind::DivP(Box::new(inner), e),
                    span,
                })
            }
            Tok::Ident(name) if name == "digitsum" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let (var, _) = self.variable()?;
                self.expect(Tok::Comma)?;
                let coeff = self.poly_expr()?;
                self.expect(Tok::Comma)?;
                let e_span = self.peek().span;
                let exponent = self.natural("digit exponent")?;
                if exponent == 0 {
                    return Err(Error::parse(e_span.line, e_span.column, "digitsum exponent must be at least 1"));
                }
                self.expect(Tok::RParen)?;
                Ok(Expr {
                    kind: ExprKind::DigitSum { var, coeff, exponent },
                    span,
                })
            }
            Tok::Ident(_) => {
                let (index, span) = self.variable()?;
                Ok(Expr {
                    kind: ExprKind::Var(index),
                    span,
                })
            }
            other => Err(self.error_here(format!("expected an operand, found {}", other.describe()))),
        }
    }

    // Integer polynomials in `i` for digitsum coefficients.

    fn poly_expr(&mut self) -> Result<IntPoly> {
        let mut acc = self.poly_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.poly_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.add(&self.poly_term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn poly_term(&mut self) -> Result<IntPoly> {
        let mut acc = self.poly_factor()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            acc = acc.mul(&self.poly_factor()?);
        }
        Ok(acc)
    }

    fn poly_factor(&mut self) -> Result<IntPoly> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(self.poly_factor()?.neg());
        }
        let base = match self.peek().tok.clone() {
            Tok::Int(v) => {
                self.bump();
                if self.peek().tok == Tok::Slash {
                    return Err(self.error_here("digitsum coefficient must have integer coefficients"));
                }
                IntPoly::constant(BigInt::from(v))
            }
            Tok::Ident(name) if name == "i" => {
                self.bump();
                IntPoly::symbol()
            }
            Tok::LParen => {
                self.bump();
                let p = self.poly_expr()?;
                self.expect(Tok::RParen)?;
                p
            }
            Tok::Ident(name) => {
                return Err(self.error_here(format!(
                    "digitsum coefficient must be an integer polynomial in i, found '{name}'"
                )))
            }
            other => {
                return Err(self.error_here(format!(
                    "expected integer polynomial in i, found {}",
                    other.describe()
                )))
            }
        };
        if self.peek().tok == Tok::Caret {
            self.bump();
            let e = self.natural("exponent")?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[i64]) -> IntPoly {
        IntPoly::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn parses_sum_of_variables() {
        let e = parse("x1 + x2", 2).unwrap();
        assert_eq!(e, Expr::add(Expr::var(1), Expr::var(2)));
    }

    #[test]
    fn parses_scaled_fermat_quotient() {
        let e = parse("divp(x1 - x1^7, 1)", 1).unwrap();
        assert_eq!(
            e,
            Expr::divp(Expr::sub(Expr::var(1), Expr::pow(Expr::var(1), 7)), 1)
        );
        assert_eq!(e.precision_loss(), 1);
    }

    #[test]
    fn parses_digit_sum_example() {
        let e = parse("-5 + digitsum(x1, 4 + 7*i^3, 5)", 1).unwrap();
        assert_eq!(
            e,
            Expr::add(Expr::int(-5), Expr::digit_sum(1, poly(&[4, 0, 0, 7]), 5))
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse("-2^2", 1).unwrap(), Expr::neg(Expr::pow(Expr::int(2), 2)));
        assert_eq!(parse("-x1", 1).unwrap(), Expr::neg(Expr::var(1)));
        assert_eq!(parse("3 - -2", 1).unwrap(), Expr::sub(Expr::int(3), Expr::int(-2)));
    }

    #[test]
    fn precedence_and_rationals() {
        let e = parse("1/2 + x1*x1^2", 1).unwrap();
        assert_eq!(
            e,
            Expr::add(
                Expr::new(ExprKind::Rational(BigInt::from(1), BigInt::from(2))),
                Expr::mul(Expr::var(1), Expr::pow(Expr::var(1), 2))
            )
        );
        assert_eq!(
            parse("-3/4", 1).unwrap(),
            Expr::new(ExprKind::Rational(BigInt::from(-3), BigInt::from(4)))
        );
    }

    #[test]
    fn poly_coefficients_expand() {
        let e = parse("digitsum(x2, (i + 1)^2 - 2*i, 1)", 2).unwrap();
        assert_eq!(e, Expr::digit_sum(2, poly(&[1, 0, 1]), 1));
    }

    fn parse_err(text: &str, arity: usize) -> (usize, usize, String) {
        match parse(text, arity) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_positions() {
        let (line, col, msg) = parse_err("x1 + \n  x3", 2);
        assert_eq!((line, col), (2, 3));
        assert!(msg.contains("out of range"), "{msg}");

        let (_, col, msg) = parse_err("x1 + y", 1);
        assert_eq!(col, 6);
        assert!(msg.contains("unknown identifier"), "{msg}");

        let (_, col, _) = parse_err("x1 +", 1);
        assert_eq!(col, 5);

        let (_, _, msg) = parse_err("digitsum(x1, x1 + 1, 2)", 1);
        assert!(msg.contains("integer polynomial"), "{msg}");

        let (_, _, msg) = parse_err("digitsum(x1, 1/2, 2)", 1);
        assert!(msg.contains("integer coefficients"), "{msg}");

        let (_, _, msg) = parse_err("divp(x1, 0)", 1);
        assert!(msg.contains("at least 1"), "{msg}");

        let (_, _, msg) = parse_err("x1 $ 2", 1);
        assert!(msg.contains("unexpected character"), "{msg}");

        let (_, _, msg) = parse_err("1/0", 1);
        assert!(msg.contains("zero denominator"), "{msg}");

        assert!(parse("x0", 1).is_err());
        assert!(parse("(x1", 1).is_err());
        assert!(parse("x1 x1", 1).is_err());
        assert!(parse("x1", 0).is_err());
    }
}
