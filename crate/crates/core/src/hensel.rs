//! Derivative-free root finding and lifting.
//!
//! A root modulo `p^l` is extended one digit at a time. At level `l` the
//! residual digit is `t = f(z) / p^l mod p` and the candidate digits `r`
//! have normalized differences `c_r = (f(z + r p^l) - f(z)) / p^l mod p`.
//! When `r -> c_r` hits every unit mod `p`, exactly one `r` cancels `t`.
//! The condition is checked along the path actually taken, not for every
//! `m ≡ z`, so a successful trace is path-verified.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, Projection};
use crate::padic::{NaturalIndex, PadicInt, PadicPoint, Prime};
use crate::sampling::random_padic;

/// Which coordinate a multivariate lift extends at each level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordinatePolicy {
    /// Always the given 0-based coordinate.
    Fixed(usize),
    /// The first coordinate whose condition set is complete at that level.
    Auto,
}

impl fmt::Display for CoordinatePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordinatePolicy::Fixed(j) => write!(f, "fixed({})", j + 1),
            CoordinatePolicy::Auto => f.write_str("auto"),
        }
    }
}

/// One level of a lift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftLevel {
    pub level: usize,
    /// 1-based coordinate that received the new digit.
    pub coordinate: usize,
    /// The root modulo `p^level` before this step.
    pub partial_root: Vec<NaturalIndex>,
    pub residual_digit: u32,
    /// `c_r` for `r = 1, ..., p-1`; `None` when the difference is not divisible by `p^level`.
    pub condition_set: Vec<Option<u32>>,
    pub condition_holds: bool,
    /// 1-based coordinates tried first and rejected under the automatic policy.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rejected_coordinates: Vec<usize>,
    pub digit: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LiftStatus {
    Lifted,
    /// The normalized differences miss some unit at this level.
    ConditionFailed { level: usize },
    /// `f` at the partial root is not divisible by `p^level`.
    ResidualNonliftable { level: usize },
}

impl fmt::Display for LiftStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftStatus::Lifted => f.write_str("lifted"),
            LiftStatus::ConditionFailed { level } => write!(f, "condition-failed at level {level}"),
            LiftStatus::ResidualNonliftable { level } => write!(f, "residual-nonliftable at level {level}"),
        }
    }
}

/// Audited record of a lifting run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftTrace {
    pub prime: u32,
    pub alpha: Vec<u32>,
    pub start: Vec<NaturalIndex>,
    /// The start is a root modulo `p^(l0 + α_k)` in coordinate `k`.
    pub start_exponents: Vec<usize>,
    pub l0: usize,
    pub target_precision: usize,
    pub policy: String,
    pub levels: Vec<LiftLevel>,
    #[serde(flatten)]
    pub status: LiftStatus,
    /// The root is determined modulo `p^reached_precision`.
    pub reached_precision: usize,
    pub root: Vec<NaturalIndex>,
    /// Base-`p` digits of each root coordinate, least significant first.
    pub root_digits: Vec<Vec<u32>>,
    pub verification: &'static str,
}

impl LiftTrace {
    pub fn lifted(&self) -> bool {
        self.status == LiftStatus::Lifted
    }

    pub fn root_point(&self) -> Result<PadicPoint> {
        let prime = Prime::new(self.prime)?;
        PadicPoint::from_naturals(
            &self.root.iter().map(|r| r.value().clone()).collect::<Vec<_>>(),
            prime,
            self.reached_precision.max(1),
        )
    }
}

fn check_shape<E: Evaluator + ?Sized>(f: &E, alpha: &[u32], start: &[BigUint]) -> Result<()> {
    for len in [alpha.len(), start.len()] {
        if len != f.arity() {
            return Err(Error::ArityMismatch {
                expected: f.arity(),
                got: len,
            });
        }
    }
    Ok(())
}

/// Lifts a univariate root `z` of `f` modulo `p^(l0 + α)` to a root modulo `p^N`.
pub fn hensel_lift_uni<E: Evaluator + ?Sized>(f: &E, alpha: u32, z: &BigUint, l0: usize, target: usize) -> Result<LiftTrace> {
    hensel_lift_multi(f, &[alpha], std::slice::from_ref(z), l0, CoordinatePolicy::Fixed(0), target)
}

/// Lifts a root of `F` modulo `p^(l0 + α_k)` (per coordinate) to a root modulo `p^N`.
///
/// Lifting starts at level `l0 + max α`. Every lifted trace is replayed
/// before it is returned.
pub fn hensel_lift_multi<E: Evaluator + ?Sized>(
    f: &E,
    alpha: &[u32],
    start: &[BigUint],
    l0: usize,
    policy: CoordinatePolicy,
    target: usize,
) -> Result<LiftTrace> {
    check_shape(f, alpha, start)?;
    let n = f.arity();
    let prime = f.prime();
    let p = prime.get();
    if let CoordinatePolicy::Fixed(j) = policy {
        if j >= n {
            return Err(Error::CoordinateOutOfRange {
                coordinate: j + 1,
                arity: n,
            });
        }
    }
    if l0 == 0 {
        return Err(Error::Precondition("l0 must be at least 1".into()));
    }
    let start_exponents: Vec<usize> = alpha.iter().map(|&a| l0 + a as usize).collect();
    for (k, (z, &e)) in start.iter().zip(&start_exponents).enumerate() {
        if z >= &prime.pow(e) {
            return Err(Error::Precondition(format!(
                "start coordinate {} = {z} is not below {p}^{e}",
                k + 1
            )));
        }
    }
    let min_exponent = *start_exponents.iter().min().expect("arity >= 1");
    let first_level = *start_exponents.iter().max().expect("arity >= 1");
    if target < first_level {
        return Err(Error::Precondition(format!(
            "target precision {target} is below the starting level {first_level}"
        )));
    }

    let mut root: Vec<BigUint> = start.to_vec();
    let mut value = f.eval_naturals(&root)?;
    if !value.divisible_by_p_pow(min_exponent)? {
        return Err(Error::Precondition(format!(
            "the start is not a root modulo {p}^{min_exponent}"
        )));
    }
    // the evaluator must resolve the final congruence
    value.divisible_by_p_pow(target)?;

    let mut levels = Vec::new();
    let mut status = LiftStatus::Lifted;
    for level in first_level..target {
        if !value.divisible_by_p_pow(level)? {
            status = LiftStatus::ResidualNonliftable { level };
            break;
        }
        let residual = value.digit(level).ok_or(Error::PrecisionExhausted {
            needed: level + 1,
            available: value.precision(),
        })?;
        let step = prime.pow(level);
        let candidates: Vec<usize> = match policy {
            CoordinatePolicy::Fixed(j) => vec![j],
            CoordinatePolicy::Auto => (0..n).collect(),
        };
        let mut rejected = Vec::new();
        let mut chosen = None;
        let mut last = None;
        for j in candidates {
            let (set, values) = condition_set(f, &root, j, &step, &value, level)?;
            let holds = set_is_complete(&set, p);
            if holds {
                chosen = Some((j, set, values));
                break;
            }
            rejected.push(j + 1);
            last = Some((j, set));
        }
        let partial_root: Vec<NaturalIndex> = root.iter().cloned().map(NaturalIndex::new).collect();
        match chosen {
            Some((j, set, mut values)) => {
                let digit = if residual == 0 {
                    0
                } else {
                    (1..p)
                        .find(|&r| set[(r - 1) as usize].is_some_and(|c| (residual + c) % p == 0))
                        .expect("a complete condition set reaches every unit")
                };
                if digit != 0 {
                    root[j] += &step * digit;
                    value = values.swap_remove((digit - 1) as usize);
                }
                if policy == CoordinatePolicy::Auto {
                    rejected.retain(|&c| c != j + 1);
                }
                levels.push(LiftLevel {
                    level,
                    coordinate: j + 1,
                    partial_root,
                    residual_digit: residual,
                    condition_set: set,
                    condition_holds: true,
                    rejected_coordinates: rejected,
                    digit: Some(digit),
                });
            }
            None => {
                let (j, set) = last.expect("at least one candidate");
                rejected.retain(|&c| c != j + 1);
                levels.push(LiftLevel {
                    level,
                    coordinate: j + 1,
                    partial_root,
                    residual_digit: residual,
                    condition_set: set,
                    condition_holds: false,
                    rejected_coordinates: rejected,
                    digit: None,
                });
                status = LiftStatus::ConditionFailed { level };
                break;
            }
        }
    }

    let reached = match status {
        LiftStatus::Lifted => target,
        LiftStatus::ConditionFailed { level } | LiftStatus::ResidualNonliftable { level } => level,
    };
    let root_digits = root
        .iter()
        .map(|r| PadicInt::from_biguint(r, prime, reached.max(1)).map(|x| x.digits().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let trace = LiftTrace {
        prime: p,
        alpha: alpha.to_vec(),
        start: start.iter().cloned().map(NaturalIndex::new).collect(),
        start_exponents,
        l0,
        target_precision: target,
        policy: policy.to_string(),
        levels,
        status,
        reached_precision: reached,
        root: root.into_iter().map(NaturalIndex::new).collect(),
        root_digits,
        verification: "path-verified",
    };
    replay(f, &trace)?;
    Ok(trace)
}

/// Normalized differences along coordinate `j` together with the shifted values.
fn condition_set<E: Evaluator + ?Sized>(
    f: &E,
    root: &[BigUint],
    j: usize,
    step: &BigUint,
    value: &PadicInt,
    level: usize,
) -> Result<(Vec<Option<u32>>, Vec<PadicInt>)> {
    let p = f.prime().get();
    let results = (1..p)
        .into_par_iter()
        .map(|r| {
            let mut shifted = root.to_vec();
            shifted[j] += step * r;
            let shifted_value = f.eval_naturals(&shifted)?;
            let diff = shifted_value.sub(value)?;
            let c = if diff.divisible_by_p_pow(level)? {
                Some(diff.digit(level).ok_or(Error::PrecisionExhausted {
                    needed: level + 1,
                    available: diff.precision(),
                })?)
            } else {
                None
            };
            Ok((c, shifted_value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().unzip())
}

fn set_is_complete(set: &[Option<u32>], p: u32) -> bool {
    let mut seen = vec![false; p as usize];
    for c in set.iter().flatten() {
        seen[*c as usize] = true;
    }
    seen[1..].iter().all(|&s| s)
}

/// Re-checks a trace against `f`: start congruences, level-to-level
/// consistency, each recorded residual and digit, and for a lifted trace
/// `F(root) ≡ 0 mod p^N`.
pub fn replay<E: Evaluator + ?Sized>(f: &E, trace: &LiftTrace) -> Result<()> {
    let fail = |msg: String| Err(Error::ReplayFailed(msg));
    let prime = f.prime();
    if prime.get() != trace.prime || trace.root.len() != f.arity() {
        return fail("trace does not match the function".into());
    }
    let root: Vec<BigUint> = trace.root.iter().map(|r| r.value().clone()).collect();
    for (k, ((r, s), &e)) in root.iter().zip(&trace.start).zip(&trace.start_exponents).enumerate() {
        let modulus = prime.pow(e);
        if r % &modulus != s.value() % &modulus {
            return fail(format!("coordinate {} left its start residue", k + 1));
        }
    }
    for (i, lvl) in trace.levels.iter().enumerate() {
        let modulus = prime.pow(lvl.level);
        let partial: Vec<BigUint> = lvl.partial_root.iter().map(|r| r.value().clone()).collect();
        let next: Vec<BigUint> = match trace.levels.get(i + 1) {
            Some(n) => n.partial_root.iter().map(|r| r.value().clone()).collect(),
            None => root.clone(),
        };
        for (a, b) in partial.iter().zip(&next) {
            if a % &modulus != b % &modulus {
                return fail(format!("levels {} and {} disagree", lvl.level, lvl.level + 1));
            }
        }
        let value = f.eval_naturals(&partial)?;
        if !value.divisible_by_p_pow(lvl.level)? || value.digit(lvl.level) != Some(lvl.residual_digit) {
            return fail(format!("residual at level {} does not replay", lvl.level));
        }
        if let Some(d) = lvl.digit {
            let mut expected = partial.clone();
            expected[lvl.coordinate - 1] += &modulus * d;
            if expected != next {
                return fail(format!("digit at level {} does not replay", lvl.level));
            }
            if !f.eval_naturals(&next)?.divisible_by_p_pow(lvl.level + 1)? {
                return fail(format!("level {} does not reach a root modulo p^{}", lvl.level, lvl.level + 1));
            }
        }
    }
    if trace.lifted() && !f.eval_naturals(&root)?.divisible_by_p_pow(trace.target_precision)? {
        return fail(format!("root is not a root modulo p^{}", trace.target_precision));
    }
    Ok(())
}

fn guard(prime: Prime, exponent: usize, budget: u128) -> Result<u64> {
    let needed = prime.pow(exponent);
    match needed.to_u128() {
        Some(n) if n <= budget => Ok(n as u64),
        other => Err(Error::BudgetExceeded {
            needed: other.unwrap_or(u128::MAX),
            budget,
        }),
    }
}

/// All `x` in `[0, p^k)` with `f(x) ≡ 0 mod p^(k - α)`.
pub fn roots_mod_uni<E: Evaluator + ?Sized>(f: &E, alpha: u32, k: usize, budget: u128) -> Result<Vec<u64>> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: f.arity(),
        });
    }
    if k < 1 + alpha as usize {
        return Err(Error::Precondition(format!("level {k} must be at least 1 + α = {}", 1 + alpha)));
    }
    let len = guard(f.prime(), k, budget)?;
    let exponent = k - alpha as usize;
    let hits = (0..len)
        .into_par_iter()
        .map(|x| {
            f.eval_naturals(&[BigUint::from(x)])?
                .divisible_by_p_pow(exponent)
                .map(|hit| hit.then_some(x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// All points of `[0, p^k)^n` with `F(x) ≡ 0 mod p^(k - max α)`.
pub fn brute_force_roots_multi<E: Evaluator + ?Sized>(f: &E, k: usize, alpha: &[u32], budget: u128) -> Result<Vec<Vec<u64>>> {
    let n = f.arity();
    if alpha.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    let max_alpha = *alpha.iter().max().expect("arity >= 1") as usize;
    if k < 1 + max_alpha {
        return Err(Error::Precondition(format!(
            "level {k} must be at least 1 + max α = {}",
            1 + max_alpha
        )));
    }
    let side = guard(f.prime(), k, budget)?;
    let len = guard(f.prime(), k * n, budget)?;
    let exponent = k - max_alpha;
    let hits = (0..len)
        .into_par_iter()
        .map(|flat| {
            let mut point = vec![0u64; n];
            let mut rest = flat;
            for slot in point.iter_mut().rev() {
                *slot = rest % side;
                rest /= side;
            }
            let args: Vec<BigUint> = point.iter().map(|&v| BigUint::from(v)).collect();
            f.eval_naturals(&args)?
                .divisible_by_p_pow(exponent)
                .map(|hit| hit.then_some(point))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Lifts of one residue that disagree modulo `p^(k - α)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueWitness {
    pub residue: u64,
    pub lift: PadicInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueCheckReport {
    pub level: usize,
    pub alpha: u32,
    pub seed: u64,
    pub lifts_per_residue: usize,
    pub checked: usize,
    pub witness: Option<ResidueWitness>,
}

impl ResidueCheckReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Samples lifts `y ≡ x mod p^k` of every residue `x < p^k` and checks that
/// `f(y) ≡ f(x) mod p^(k - α)`.
pub fn well_defined_residue_check<E: Evaluator + ?Sized>(
    f: &E,
    alpha: u32,
    k: usize,
    lifts_per_residue: usize,
    seed: u64,
    budget: u128,
) -> Result<ResidueCheckReport> {
    if f.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: f.arity(),
        });
    }
    if k < 1 + alpha as usize {
        return Err(Error::Precondition(format!("level {k} must be at least 1 + α = {}", 1 + alpha)));
    }
    let n = f.precision();
    if n <= k {
        return Err(Error::PrecisionExhausted {
            needed: k + 1,
            available: n,
        });
    }
    let len = guard(f.prime(), k, budget.saturating_div(lifts_per_residue.max(1) as u128))?;
    let exponent = k - alpha as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ResidueCheckReport {
        level: k,
        alpha,
        seed,
        lifts_per_residue,
        checked: 0,
        witness: None,
    };
    for x in 0..len {
        let base = PadicInt::from_integer(x, f.prime().get(), n)?;
        let fx = f.eval(&PadicPoint::single(base.clone()))?;
        for _ in 0..lifts_per_residue {
            let tail = random_padic(&mut rng, f.prime(), n - k)?.mul_p_pow(k);
            let y = base.add(&tail)?;
            let fy = f.eval(&PadicPoint::single(y.clone()))?;
            report.checked += 1;
            if !fy.sub(&fx)?.divisible_by_p_pow(exponent)? {
                report.witness = Some(ResidueWitness { residue: x, lift: y });
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRoots {
    pub level: usize,
    pub roots: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionRootReport {
    /// 1-based free coordinate.
    pub coordinate: usize,
    pub fixed: Vec<PadicInt>,
    pub levels: Vec<LevelRoots>,
    /// Roots at every level are compatible with lifting; this is evidence, not proof.
    pub nonempty_at_all_levels: bool,
}

/// Enumerates residue roots of the projection `z -> F(..., z, ...)` with the
/// other coordinates fixed, at each level in `levels`.
pub fn root_exists_via_projection<E: Evaluator + ?Sized>(
    f: &E,
    coordinate: usize,
    fixed: Vec<PadicInt>,
    alpha: u32,
    levels: std::ops::RangeInclusive<usize>,
    budget: u128,
) -> Result<ProjectionRootReport> {
    let projection = Projection::new(f, coordinate, fixed.clone())?;
    let levels = levels
        .map(|k| {
            roots_mod_uni(&projection, alpha, k, budget).map(|roots| LevelRoots { level: k, roots })
        })
        .collect::<Result<Vec<_>>>()?;
    let nonempty = levels.iter().all(|l| !l.roots.is_empty());
    Ok(ProjectionRootReport {
        coordinate: coordinate + 1,
        fixed,
        levels,
        nonempty_at_all_levels: nonempty,
    })
}

/// `true` when `x ≡ z (mod p^e)`.
pub fn congruent(x: &BigUint, z: &BigUint, prime: Prime, e: usize) -> bool {
    let m = prime.pow(e);
    if m.is_zero() {
        return x == z;
    }
    x % &m == z % &m
}
