//! Univariate van der Put expansions.
//!
//! A continuous `f: Z_p -> Z_p` expands as `f(x) = sum_m B_m e_m(x)` where
//! `e_m` is the indicator of `m ◁ x` and `B_m = f(m) - f(m*)` for `m >= p`,
//! `B_m = f(m)` otherwise. Tables are truncated at `m < p^K`.
//!
//! `f` is `p^α`-Lipschitz exactly when `|B_m|_p <= p^(α - s(m))` for every
//! `m`, with `s(m) = floor(log_p m)` and the convention `s(m) = 0` for `m < p`.

use std::fmt;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::padic::{initial_part, NaturalIndex, Norm, PadicInt, PadicPoint, Prime, Valuation};
use crate::sampling::{random_neighbour, random_padic};

/// `e_m(x)`: 1 when `m ◁ x`, else 0.
pub fn basis_indicator(m: &NaturalIndex, x: &PadicInt) -> Result<u8> {
    Ok(initial_part(m, x)? as u8)
}

/// `B_m` for a univariate function.
pub fn coefficient<E: Evaluator + ?Sized>(f: &E, m: &NaturalIndex) -> Result<PadicInt> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: f.arity(),
        });
    }
    let p = f.prime();
    let value = f.eval_indices(std::slice::from_ref(m))?;
    if !m.has_star(p) {
        return Ok(value);
    }
    let star = m.m_star(p)?;
    value.sub(&f.eval_indices(&[star])?)
}

/// Number of table entries `p^K`, when it fits a `u64`.
pub fn table_len(prime: Prime, level: usize) -> Result<u64> {
    (prime.as_u64())
        .checked_pow(level as u32)
        .ok_or(Error::BudgetExceeded {
            needed: u128::MAX,
            budget: u64::MAX as u128,
        })
}

/// Expands `f` to level `K`: all `B_m` with `m < p^K`.
pub fn expand<E: Evaluator + ?Sized>(f: &E, level: usize) -> Result<VdpTable1> {
    if level == 0 {
        return Err(Error::Precondition("expansion level must be at least 1".into()));
    }
    if f.precision() < level {
        return Err(Error::PrecisionExhausted {
            needed: level,
            available: f.precision(),
        });
    }
    let len = table_len(f.prime(), level)?;
    let coeffs = (0..len)
        .into_par_iter()
        .map(|m| coefficient(f, &NaturalIndex::from(m)))
        .collect::<Result<Vec<_>>>()?;
    VdpTable1::new(f.prime(), level, f.precision(), coeffs)
}

/// Coefficients `b^α_m = p^(α - s(m)) B_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedCoeffs {
    pub alpha: u32,
    pub coeffs: Vec<PadicInt>,
}

/// A truncated univariate van der Put table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VdpTable1 {
    prime: Prime,
    level: usize,
    precision: usize,
    coeffs: Vec<PadicInt>,
    normalized: Option<NormalizedCoeffs>,
}

impl VdpTable1 {
    pub fn new(prime: Prime, level: usize, precision: usize, coeffs: Vec<PadicInt>) -> Result<Self> {
        let len = table_len(prime, level)?;
        if level == 0 || coeffs.len() as u64 != len {
            return Err(Error::InvalidTable(format!(
                "expected {len} coefficients for level {level}, got {}",
                coeffs.len()
            )));
        }
        if precision < level {
            return Err(Error::PrecisionExhausted {
                needed: level,
                available: precision,
            });
        }
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::PrimeMismatch(prime.get(), c.prime().get()));
        }
        Ok(VdpTable1 {
            prime,
            level,
            precision,
            coeffs,
            normalized: None,
        })
    }

    /// Rebuilds `B_m = p^(s(m) - α) b^α_m` from normalized coefficients.
    pub fn from_normalized(prime: Prime, level: usize, precision: usize, alpha: u32, b: Vec<PadicInt>) -> Result<Self> {
        let coeffs = b
            .iter()
            .enumerate()
            .map(|(m, bm)| {
                let shift = NaturalIndex::from(m as u64).level(prime) as i64 - alpha as i64;
                if shift >= 0 {
                    Ok(bm.mul_p_pow(shift as usize))
                } else {
                    bm.exact_div_p((-shift) as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = VdpTable1::new(prime, level, precision, coeffs)?;
        t.normalized = Some(NormalizedCoeffs { alpha, coeffs: b });
        Ok(t)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    pub fn coeff(&self, m: u64) -> Option<&PadicInt> {
        self.coeffs.get(m as usize)
    }

    pub fn normalized(&self) -> Option<&NormalizedCoeffs> {
        self.normalized.as_ref()
    }

    /// Partial sum `sum_{m ◁ x, m < p^K} B_m`.
    pub fn eval(&self, x: &PadicInt) -> Result<PadicInt> {
        if x.prime() != self.prime {
            return Err(Error::PrimeMismatch(self.prime.get(), x.prime().get()));
        }
        if x.precision() < self.level {
            return Err(Error::PrecisionExhausted {
                needed: self.level,
                available: x.precision(),
            });
        }
        let p = self.prime.as_u64();
        let mut indices = Vec::with_capacity(self.level);
        let mut partial = 0u64;
        let mut power = 1u64;
        for k in 0..self.level {
            partial += x.digits()[k] as u64 * power;
            power *= p;
            if indices.last() != Some(&partial) {
                indices.push(partial);
            }
        }
        let mut iter = indices.into_iter().map(|m| &self.coeffs[m as usize]);
        let first = iter.next().expect("level >= 1").clone();
        iter.try_fold(first, |acc, c| acc.add(c))
    }

    /// `max_m |B_m|_p`.
    pub fn sup_norm(&self) -> Norm {
        self.coeffs.iter().map(PadicInt::norm).max().unwrap_or(Norm::Zero)
    }

    /// Attaches `b^α_m`. Fails with [`Error::BoundViolated`] when the
    /// `Lip_α` bound does not hold.
    pub fn normalize(&self, alpha: u32) -> Result<VdpTable1> {
        let b = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, bm)| {
                let shift = NaturalIndex::from(m as u64).level(self.prime) as i64 - alpha as i64;
                if shift > 0 {
                    bm.exact_div_p(shift as usize).map_err(|e| match e {
                        Error::InexactDivision { .. } => Error::BoundViolated { index: m.to_string() },
                        other => other,
                    })
                } else {
                    Ok(bm.mul_p_pow((-shift) as usize))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = self.clone();
        t.normalized = Some(NormalizedCoeffs { alpha, coeffs: b });
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableRepr::from(self)).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: TableRepr =
            serde_json::from_str(text).map_err(|e| Error::InvalidTable(e.to_string()))?;
        repr.try_into()
    }
}

impl Evaluator for VdpTable1 {
    fn prime(&self) -> Prime {
        self.prime
    }

    fn arity(&self) -> usize {
        1
    }

    fn precision(&self) -> usize {
        self.precision
    }

    fn eval(&self, point: &PadicPoint) -> Result<PadicInt> {
        if point.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: point.arity(),
            });
        }
        VdpTable1::eval(self, &point.coords()[0])
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    p: u32,
    #[serde(rename = "K")]
    level: usize,
    #[serde(rename = "N")]
    precision: usize,
    #[serde(rename = "B")]
    coeffs: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<u32>>>,
}

impl From<&VdpTable1> for TableRepr {
    fn from(t: &VdpTable1) -> Self {
        TableRepr {
            p: t.prime.get(),
            level: t.level,
            precision: t.precision,
            coeffs: t.coeffs.iter().map(|c| c.digits().to_vec()).collect(),
            alpha: t.normalized.as_ref().map(|n| n.alpha),
            b: t
                .normalized
                .as_ref()
                .map(|n| n.coeffs.iter().map(|c| c.digits().to_vec()).collect()),
        }
    }
}

impl TryFrom<TableRepr> for VdpTable1 {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        let prime = Prime::new(r.p)?;
        let coeffs = r
            .coeffs
            .into_iter()
            .map(|d| PadicInt::new(prime, d))
            .collect::<Result<Vec<_>>>()?;
        let mut table = VdpTable1::new(prime, r.level, r.precision, coeffs)?;
        match (r.alpha, r.b) {
            (Some(alpha), Some(b)) => {
                let b = b
                    .into_iter()
                    .map(|d| PadicInt::new(prime, d))
                    .collect::<Result<Vec<_>>>()?;
                let rebuilt = VdpTable1::from_normalized(prime, r.level, r.precision, alpha, b)?;
                if rebuilt.coeffs != table.coeffs {
                    return Err(Error::InvalidTable("normalized coefficients disagree with B".into()));
                }
                table.normalized = rebuilt.normalized;
            }
            (None, None) => {}
            _ => return Err(Error::InvalidTable("alpha and b must appear together".into())),
        }
        Ok(table)
    }
}

/// Result of the coefficient criterion at a finite level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LipVerdict {
    /// Every `m < p^K` satisfies the bound.
    HoldsAtLevel { level: usize },
    /// First index whose coefficient has order below `s(m) - α`.
    ViolatedAt {
        index: u64,
        #[serde(serialize_with = "ser_valuation")]
        valuation: Valuation,
        required: i64,
    },
}

impl LipVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LipVerdict::HoldsAtLevel { .. })
    }
}

impl fmt::Display for LipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LipVerdict::HoldsAtLevel { level } => write!(f, "holds at level {level}"),
            LipVerdict::ViolatedAt {
                index,
                valuation,
                required,
            } => write!(f, "violated at m={index} (ord {valuation} < {required})"),
        }
    }
}

pub(crate) fn ser_valuation<S: serde::Serializer>(v: &Valuation, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Valuation::Finite(k) => s.serialize_u64(*k as u64),
        Valuation::Infinite => s.serialize_str("inf"),
    }
}

/// Checks `|B_m|_p <= p^(α - s(m))` for every entry of the table.
pub fn lip_alpha_check(table: &VdpTable1, alpha: u32) -> LipVerdict {
    let p = table.prime;
    for (m, bm) in table.coeffs.iter().enumerate() {
        let required = NaturalIndex::from(m as u64).level(p) as i64 - alpha as i64;
        let v = bm.valuation();
        if !v.at_least(required) {
            return LipVerdict::ViolatedAt {
                index: m as u64,
                valuation: v,
                required,
            };
        }
    }
    LipVerdict::HoldsAtLevel { level: table.level }
}

/// A pair `(x, y)` with `|f(x) - f(y)|_p > p^α |x - y|_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LipViolation {
    pub x: PadicPoint,
    pub y: PadicPoint,
    #[serde(serialize_with = "ser_valuation")]
    pub value_valuation: Valuation,
    pub required: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampledLipReport {
    pub samples: usize,
    pub seed: u64,
    pub alpha: Vec<u32>,
    pub violations: usize,
    pub evaluation_failures: usize,
    pub first_violation: Option<LipViolation>,
}

impl SampledLipReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.evaluation_failures == 0
    }
}

/// Samples pairs `x, y` at random distances and looks for
/// `ord(f(x) - f(y)) < ord(x - y) - α`.
///
/// Only orders determined at the available precision count as violations.
pub fn sampled_lip_check<E: Evaluator + ?Sized>(f: &E, alpha: u32, samples: usize, seed: u64) -> Result<SampledLipReport> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: f.arity(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SampledLipReport {
        samples,
        seed,
        alpha: vec![alpha],
        violations: 0,
        evaluation_failures: 0,
        first_violation: None,
    };
    for _ in 0..samples {
        let x = random_padic(&mut rng, f.prime(), f.precision())?;
        let y = random_neighbour(&mut rng, &x)?;
        let Some(dist) = x.sub(&y)?.valuation().finite() else {
            continue;
        };
        let (x, y) = (PadicPoint::single(x), PadicPoint::single(y));
        let (fx, fy) = match (f.eval(&x), f.eval(&y)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                report.evaluation_failures += 1;
                continue;
            }
        };
        let required = dist as i64 - alpha as i64;
        let v = fx.sub(&fy)?.valuation();
        if !v.at_least(required) {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(LipViolation {
                    x,
                    y,
                    value_valuation: v,
                    required,
                });
            }
        }
    }
    Ok(report)
}

/// `max_{m < p^K} |f(m)|_p`, the sup norm of `f` on the level-`K` grid.
pub fn grid_sup_norm<E: Evaluator + ?Sized>(f: &E, level: usize) -> Result<Norm> {
    let len = table_len(f.prime(), level)?;
    (0..len)
        .into_par_iter()
        .map(|m| f.eval_naturals(&[BigUint::from(m)]).map(|v| v.norm()))
        .try_reduce(|| Norm::Zero, |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::DslFunction;
    use crate::evaluator::FnEvaluator;

    fn prime(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    fn dsl(text: &str, p: u32, n: usize) -> DslFunction {
        DslFunction::parse(text, 1, prime(p), n).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let zero = PadicInt::from_integer(0, 7, 4).unwrap();
        assert_eq!(basis_indicator(&NaturalIndex::from(0), &zero).unwrap(), 1);
        let five = PadicInt::from_integer(5, 7, 4).unwrap();
        assert_eq!(basis_indicator(&NaturalIndex::from(5), &five).unwrap(), 1);
        let x = PadicInt::from_integer(3 + 2 * 9, 3, 4).unwrap();
        assert_eq!(basis_indicator(&NaturalIndex::from(3), &x).unwrap(), 1);
        let four = PadicInt::from_integer(4, 3, 4).unwrap();
        assert_eq!(basis_indicator(&NaturalIndex::from(3), &four).unwrap(), 0);
    }

    #[test]
    fn coefficient_examples() {
        let id = dsl("x1", 3, 6);
        for m in 0..3u64 {
            assert_eq!(
                coefficient(&id, &NaturalIndex::from(m)).unwrap(),
                PadicInt::from_integer(m, 3, 6).unwrap()
            );
        }
        assert_eq!(
            coefficient(&id, &NaturalIndex::from(10)).unwrap(),
            PadicInt::from_integer(9, 3, 6).unwrap()
        );
        let c = dsl("4", 3, 6);
        for m in 3..30u64 {
            assert!(coefficient(&c, &NaturalIndex::from(m)).unwrap().is_zero());
        }
    }

    /// Brute-force expansion of an indicator: solve `f(m) = sum_{j ◁ m} B_j`
    /// for `B` by forward substitution over `m` in increasing order.
    fn brute_force_coeffs(values: &[i64], p: u64) -> Vec<i64> {
        let mut b = vec![0i64; values.len()];
        for m in 0..values.len() as u64 {
            let mut partial = 0;
            let mut prefix = 0u64;
            let mut power = 1u64;
            let mut seen = Vec::new();
            let mut v = m;
            while v > 0 || prefix == 0 && seen.is_empty() {
                prefix += (v % p) * power;
                power *= p;
                v /= p;
                if !seen.contains(&prefix) {
                    seen.push(prefix);
                }
                if v == 0 {
                    break;
                }
            }
            for &j in &seen {
                if j != m {
                    partial += b[j as usize];
                }
            }
            b[m as usize] = values[m as usize] - partial;
        }
        b
    }

    #[test]
    fn indicator_function_expands_to_itself() {
        let p = prime(7);
        let n = 5;
        let e7 = FnEvaluator::new(p, 1, n, move |x: &PadicPoint| {
            let v = basis_indicator(&NaturalIndex::from(7), &x.coords()[0])?;
            PadicInt::from_integer(v as u64, 7, n)
        });
        let table = expand(&e7, 2).unwrap();
        let values: Vec<i64> = (0..49u64)
            .map(|m| i64::from(m % 7 == 0 && m / 7 == 1))
            .collect();
        let oracle = brute_force_coeffs(&values, 7);
        for (m, c) in table.coeffs().iter().enumerate() {
            assert_eq!(c.to_bigint_centered(), oracle[m].into(), "m = {m}");
        }
        assert_eq!(table.coeff(7).unwrap(), &PadicInt::one(p, n).unwrap());
        assert_eq!(table.coeffs().iter().filter(|c| !c.is_zero()).count(), 1);
    }

    #[test]
    fn zero_function_expands_to_zero() {
        let t = expand(&dsl("0", 5, 4), 2).unwrap();
        assert!(t.coeffs().iter().all(PadicInt::is_zero));
        assert_eq!(t.sup_norm(), Norm::Zero);
    }

    #[test]
    fn digit_sum_example_first_level() {
        let n = 8;
        let f = dsl("-5 + digitsum(x1, 4+7*i^3, 5)", 7, n);
        let t = expand(&f, 1).unwrap();
        for m in 0..7i64 {
            let expected = PadicInt::from_bigint(&(-5 + 4 * m.pow(5)).into(), prime(7), n).unwrap();
            assert_eq!(t.coeff(m as u64).unwrap(), &expected);
        }
    }

    #[test]
    fn reconstruction_at_integers() {
        let f = dsl("3*x1^3 - digitsum(x1, i + 2, 2) + divp(x1 - x1^3, 1)", 3, 8);
        let t = expand(&f, 3).unwrap();
        for m in 0..27u64 {
            let x = PadicInt::from_integer(m, 3, 8).unwrap();
            let direct = f.eval(&PadicPoint::single(x.clone())).unwrap();
            assert_eq!(t.eval(&x).unwrap(), direct);
        }
    }

    #[test]
    fn identity_table_truncates() {
        let t = expand(&dsl("x1", 5, 6), 2).unwrap();
        let x = PadicInt::from_integer(3 + 4 * 5 + 2 * 25 + 125, 5, 6).unwrap();
        assert_eq!(t.eval(&x).unwrap(), PadicInt::from_integer(23, 5, 6).unwrap());
        let short = PadicInt::from_integer(3, 5, 1).unwrap();
        assert!(matches!(t.eval(&short), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn constant_beyond_b0() {
        let p = prime(3);
        let mut coeffs = vec![PadicInt::zero(p, 4).unwrap(); 9];
        coeffs[0] = PadicInt::from_integer(5, 3, 4).unwrap();
        let t = VdpTable1::new(p, 2, 4, coeffs).unwrap();
        for m in [0u64, 3, 6, 9, 12, 24] {
            let x = PadicInt::from_integer(m, 3, 4).unwrap();
            assert_eq!(t.eval(&x).unwrap(), PadicInt::from_integer(5, 3, 4).unwrap());
        }
        let x = PadicInt::from_integer(1, 3, 4).unwrap();
        assert!(t.eval(&x).unwrap().is_zero());
    }

    #[test]
    fn lipschitz_criterion_examples() {
        let id = expand(&dsl("x1", 3, 6), 3).unwrap();
        assert!(lip_alpha_check(&id, 0).holds());

        let fermat = expand(&dsl("divp(x1 - x1^7, 1)", 7, 6), 2).unwrap();
        assert!(lip_alpha_check(&fermat, 1).holds());
        assert!(!lip_alpha_check(&fermat, 0).holds());

        let p = prime(5);
        let mut coeffs = vec![PadicInt::zero(p, 4).unwrap(); 25];
        coeffs[5] = PadicInt::one(p, 4).unwrap();
        let t = VdpTable1::new(p, 2, 4, coeffs).unwrap();
        assert_eq!(
            lip_alpha_check(&t, 0),
            LipVerdict::ViolatedAt {
                index: 5,
                valuation: Valuation::Finite(0),
                required: 1
            }
        );
        assert!(lip_alpha_check(&t, 1).holds());
    }

    #[test]
    fn normalization() {
        let id = expand(&dsl("x1", 3, 6), 3).unwrap();
        let n0 = id.normalize(0).unwrap();
        let b = &n0.normalized().unwrap().coeffs;
        assert_eq!(b[2], PadicInt::from_integer(2, 3, 6).unwrap());
        // s(10) = 2 and B_10 = 9, so b_10 = 1
        assert_eq!(b[10].to_biguint(), BigUint::from(1u32));
        assert_eq!(b[10].precision(), 4);
        let back = VdpTable1::from_normalized(id.prime(), 3, 6, 0, b.clone()).unwrap();
        assert_eq!(back.coeffs(), id.coeffs());

        let fermat = expand(&dsl("divp(x1 - x1^7, 1)", 7, 6), 2).unwrap();
        let n1 = fermat.normalize(1).unwrap();
        let b1 = &n1.normalized().unwrap().coeffs;
        // s(7) = 1 = α: no shift
        assert_eq!(b1[7], fermat.coeffs()[7]);
        // m < p: shifted up by α
        assert_eq!(b1[3], fermat.coeffs()[3].mul_p_pow(1));
        assert!(matches!(fermat.normalize(0), Err(Error::BoundViolated { .. })));
    }

    #[test]
    fn json_round_trip() {
        let t = expand(&dsl("x1^2 + 1", 3, 4), 2).unwrap();
        let json = t.to_json();
        assert!(json.starts_with(r#"{"p":3,"K":2,"N":4,"B":[[1,0,0,0],"#), "{json}");
        assert_eq!(VdpTable1::from_json(&json).unwrap(), t);
        let normalized = t.normalize(0).unwrap();
        assert_eq!(VdpTable1::from_json(&normalized.to_json()).unwrap(), normalized);
        assert!(VdpTable1::from_json(r#"{"p":3,"K":2,"N":4,"B":[[1]]}"#).is_err());
    }

    #[test]
    fn sampled_checks() {
        let c = dsl("3", 5, 8);
        assert!(sampled_lip_check(&c, 0, 300, 4).unwrap().passed());
        let ex = dsl("-5 + digitsum(x1, 4+7*i^3, 5)", 7, 8);
        assert!(sampled_lip_check(&ex, 0, 1000, 4).unwrap().passed());
        let fermat = dsl("divp(x1 - x1^7, 1)", 7, 8);
        assert!(sampled_lip_check(&fermat, 1, 1000, 4).unwrap().passed());
        let r = sampled_lip_check(&fermat, 0, 1000, 4).unwrap();
        assert!(r.violations > 0);
    }

    #[test]
    fn sup_norm_matches_grid() {
        let f = dsl("9*x1^2 + 3*digitsum(x1, 1, 1)", 3, 6);
        let t = expand(&f, 2).unwrap();
        assert_eq!(t.sup_norm(), grid_sup_norm(&f, 2).unwrap());
        assert_eq!(t.sup_norm().to_string(), "1/3");
    }
}
