//! Random well-defined expressions, for property tests and fuzzing.
//!
//! Every generated expression is total on `Z_p^n`: the only `divp` produced is
//! the Fermat quotient `divp(x - x^p, 1)`, which always divides exactly.

use num_bigint::BigInt;
use rand::Rng;

use super::ast::{Expr, ExprKind, IntPoly};
use crate::padic::Prime;

/// Builds a random expression in `arity` variables of depth at most `depth`.
pub fn random_expr<R: Rng + ?Sized>(rng: &mut R, prime: Prime, arity: usize, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_leaf(rng, prime, arity);
    }
    match rng.gen_range(0..6) {
        0 => Expr::add(random_expr(rng, prime, arity, depth - 1), random_expr(rng, prime, arity, depth - 1)),
        1 => Expr::sub(random_expr(rng, prime, arity, depth - 1), random_expr(rng, prime, arity, depth - 1)),
        2 | 3 => Expr::mul(random_expr(rng, prime, arity, depth - 1), random_expr(rng, prime, arity, depth - 1)),
        4 => Expr::pow(random_expr(rng, prime, arity, depth - 1), rng.gen_range(2..=3)),
        _ => Expr::neg(random_expr(rng, prime, arity, depth - 1)),
    }
}

fn random_leaf<R: Rng + ?Sized>(rng: &mut R, prime: Prime, arity: usize) -> Expr {
    let var = rng.gen_range(1..=arity);
    match rng.gen_range(0..7) {
        0 => Expr::int(rng.gen_range(-6..=6)),
        1 => {
            let den = loop {
                let d: i64 = rng.gen_range(1..=6);
                if d % prime.get() as i64 != 0 {
                    break d;
                }
            };
            Expr::new(ExprKind::Rational(BigInt::from(rng.gen_range(0..=6)), BigInt::from(den)))
        }
        2 | 3 => Expr::var(var),
        4 | 5 => {
            let coeff = IntPoly::new((0..rng.gen_range(1..=3)).map(|_| BigInt::from(rng.gen_range(-4..=4))).collect());
            Expr::digit_sum(var, coeff, rng.gen_range(1..=3))
        }
        _ => {
            let x = Expr::var(var);
            Expr::divp(Expr::sub(x.clone(), Expr::pow(x, prime.get())), 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse, well_defined_check, DslFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_expressions_are_total_and_reparse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2u32, 3, 5, 7] {
            let prime = Prime::new(p).unwrap();
            for _ in 0..20 {
                let e = random_expr(&mut rng, prime, 2, 3);
                assert_eq!(parse(&e.to_string(), 2).unwrap(), e, "{e}");
                let f = DslFunction::with_target_precision(e, 2, prime, 6).unwrap();
                assert!(well_defined_check(&f, 30, 1).unwrap().passed());
            }
        }
    }
}
