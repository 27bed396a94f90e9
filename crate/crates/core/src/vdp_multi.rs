//! Multivariate van der Put expansions on `Z_p^n`.
//!
//! The basis functions are products `E_m(x) = e_{m_1}(x_1) ... e_{m_n}(x_n)`.
//! With `I(m)` the set of coordinates where `m_i >= p`, the coefficient is the
//! alternating sum over `S ⊆ I(m)` of `(-1)^|S| F(m with m_i -> m_i* for i in S)`.
//! The same value comes out of differencing one coordinate of `I(m)` at a
//! time, in any order; that recursive form is kept as a cross-check.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, Projection};
use crate::padic::{initial_part, NaturalIndex, Norm, PadicInt, PadicPoint, Prime, Valuation};
use crate::sampling::{random_neighbour, random_padic, random_point};
use crate::vdp_uni::{self, ser_valuation, LipVerdict, LipViolation, SampledLipReport};

/// A multi-index `(m_1, ..., m_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<NaturalIndex>);

impl MultiIndex {
    pub fn new(entries: Vec<NaturalIndex>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ArityMismatch { expected: 1, got: 0 });
        }
        Ok(MultiIndex(entries))
    }

    pub fn from_u64s(entries: &[u64]) -> Result<Self> {
        Self::new(entries.iter().map(|&m| NaturalIndex::from(m)).collect())
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[NaturalIndex] {
        &self.0
    }

    /// Coordinates (0-based) with `m_i >= p`.
    pub fn index_set(&self, p: Prime) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, m)| m.has_star(p))
            .map(|(i, _)| i)
            .collect()
    }

    /// Weighted exponent `max_{i in I(m)} (s(m_i) - α_i)`, or 0 when `I(m)` is empty.
    pub fn weighted_exponent(&self, p: Prime, alpha: &[u32]) -> i64 {
        self.index_set(p)
            .into_iter()
            .map(|i| self.0[i].level(p) as i64 - alpha[i] as i64)
            .max()
            .unwrap_or(0)
    }

    fn values(&self) -> Vec<BigUint> {
        self.0.iter().map(|m| m.value().clone()).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidTable(format!("malformed multi-index {text:?}")))?;
        let entries = inner
            .split(',')
            .map(|part| {
                part.trim()
                    .parse::<BigUint>()
                    .map(NaturalIndex::new)
                    .map_err(|_| Error::InvalidTable(format!("malformed multi-index {text:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        MultiIndex::new(entries)
    }
}

/// Coordinates (0-based) with `m_i >= p`; see [`MultiIndex::index_set`].
pub fn index_set(m: &MultiIndex, p: Prime) -> Vec<usize> {
    m.index_set(p)
}

/// `E_m(x)`: 1 when `m_i ◁ x_i` for every coordinate.
pub fn basis_indicator(m: &MultiIndex, x: &PadicPoint) -> Result<u8> {
    if m.arity() != x.arity() {
        return Err(Error::ArityMismatch {
            expected: m.arity(),
            got: x.arity(),
        });
    }
    for (mi, xi) in m.0.iter().zip(x.coords()) {
        if !initial_part(mi, xi)? {
            return Ok(0);
        }
    }
    Ok(1)
}

fn check_arity<E: Evaluator + ?Sized>(f: &E, m: &MultiIndex) -> Result<()> {
    if f.arity() != m.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: m.arity(),
        });
    }
    Ok(())
}

/// `A_m` by inclusion-exclusion over the subsets of `I(m)`.
pub fn coefficient<E: Evaluator + ?Sized>(f: &E, m: &MultiIndex) -> Result<PadicInt> {
    check_arity(f, m)?;
    let p = f.prime();
    let set = m.index_set(p);
    let stars = set
        .iter()
        .map(|&i| m.0[i].m_star(p).map(NaturalIndex::into_inner))
        .collect::<Result<Vec<_>>>()?;
    let base = m.values();
    let mut total: Option<PadicInt> = None;
    for mask in 0u64..(1u64 << set.len()) {
        let mut point = base.clone();
        for (bit, (&i, star)) in set.iter().zip(&stars).enumerate() {
            if mask >> bit & 1 == 1 {
                point[i] = star.clone();
            }
        }
        let value = f.eval_naturals(&point)?;
        let negative = mask.count_ones() % 2 == 1;
        total = Some(match total {
            None if negative => value.neg(),
            None => value,
            Some(acc) if negative => acc.sub(&value)?,
            Some(acc) => acc.add(&value)?,
        });
    }
    Ok(total.expect("at least the empty subset"))
}

/// `A_m` by nested single-coordinate differences over `I(m)` in increasing order.
pub fn coefficient_recursive<E: Evaluator + ?Sized>(f: &E, m: &MultiIndex) -> Result<PadicInt> {
    let order = m.index_set(f.prime());
    coefficient_recursive_ordered(f, m, &order)
}

/// `A_m` by nested differences, coordinate `order[0]` first.
/// `order` must be a permutation of `I(m)`.
pub fn coefficient_recursive_ordered<E: Evaluator + ?Sized>(f: &E, m: &MultiIndex, order: &[usize]) -> Result<PadicInt> {
    check_arity(f, m)?;
    let p = f.prime();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != m.index_set(p) {
        return Err(Error::Precondition(format!(
            "differencing order {order:?} is not a permutation of the starred coordinates of {m}"
        )));
    }
    let stars = order
        .iter()
        .map(|&i| m.0[i].m_star(p).map(NaturalIndex::into_inner))
        .collect::<Result<Vec<_>>>()?;
    nested_difference(f, order, &stars, order.len(), m.values())
}

/// `phi_k(pt) = phi_{k-1}(pt) - phi_{k-1}(pt with coordinate order[k-1] starred)`,
/// with `phi_0 = f`.
fn nested_difference<E: Evaluator + ?Sized>(
    f: &E,
    order: &[usize],
    stars: &[BigUint],
    k: usize,
    point: Vec<BigUint>,
) -> Result<PadicInt> {
    if k == 0 {
        return f.eval_naturals(&point);
    }
    let mut starred = point.clone();
    starred[order[k - 1]] = stars[k - 1].clone();
    let a = nested_difference(f, order, stars, k - 1, point)?;
    let b = nested_difference(f, order, stars, k - 1, starred)?;
    a.sub(&b)
}

/// Number of table entries `p^(Kn)`, when it fits a `u64`.
pub fn table_len(prime: Prime, arity: usize, level: usize) -> Result<u64> {
    let side = vdp_uni::table_len(prime, level)?;
    side.checked_pow(arity as u32).ok_or(Error::BudgetExceeded {
        needed: u128::MAX,
        budget: u64::MAX as u128,
    })
}

/// Expands `f` over the grid `[0, p^K)^n`.
pub fn expand<E: Evaluator + ?Sized>(f: &E, level: usize) -> Result<VdpTableN> {
    if level == 0 {
        return Err(Error::Precondition("expansion level must be at least 1".into()));
    }
    let len = table_len(f.prime(), f.arity(), level)?;
    let side = vdp_uni::table_len(f.prime(), level)?;
    let n = f.arity();
    let coeffs = (0..len)
        .into_par_iter()
        .map(|flat| coefficient(f, &MultiIndex::from_u64s(&unflatten(flat, side, n))?))
        .collect::<Result<Vec<_>>>()?;
    VdpTableN::new(f.prime(), n, level, f.precision(), coeffs)
}

/// Row-major position to multi-index; the first coordinate varies slowest.
fn unflatten(mut flat: u64, side: u64, arity: usize) -> Vec<u64> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = flat % side;
        flat /= side;
    }
    out
}

fn flatten(index: &[u64], side: u64) -> u64 {
    index.iter().fold(0, |acc, &m| acc * side + m)
}

/// Coefficients `a_m = p^(-e(m)) A_m` with `e(m)` the weighted exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedCoeffsN {
    pub alpha: Vec<u32>,
    pub coeffs: Vec<PadicInt>,
}

/// A truncated multivariate van der Put table, stored densely in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VdpTableN {
    prime: Prime,
    arity: usize,
    level: usize,
    precision: usize,
    coeffs: Vec<PadicInt>,
    normalized: Option<NormalizedCoeffsN>,
}

impl VdpTableN {
    pub fn new(prime: Prime, arity: usize, level: usize, precision: usize, coeffs: Vec<PadicInt>) -> Result<Self> {
        if arity == 0 || level == 0 {
            return Err(Error::InvalidTable("arity and level must be positive".into()));
        }
        let len = table_len(prime, arity, level)?;
        if coeffs.len() as u64 != len {
            return Err(Error::InvalidTable(format!(
                "expected {len} coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::PrimeMismatch(prime.get(), c.prime().get()));
        }
        Ok(VdpTableN {
            prime,
            arity,
            level,
            precision,
            coeffs,
            normalized: None,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn arity(&self) -> usize {
        self.arity
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

    pub fn normalized(&self) -> Option<&NormalizedCoeffsN> {
        self.normalized.as_ref()
    }

    fn side(&self) -> u64 {
        self.prime.as_u64().pow(self.level as u32)
    }

    /// All multi-indices of the table with their coefficients, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<u64>, &PadicInt)> + '_ {
        let side = self.side();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(flat, c)| (unflatten(flat as u64, side, self.arity), c))
    }

    pub fn coeff(&self, index: &[u64]) -> Option<&PadicInt> {
        let side = self.side();
        if index.len() != self.arity || index.iter().any(|&m| m >= side) {
            return None;
        }
        self.coeffs.get(flatten(index, side) as usize)
    }

    /// `sum A_m` over the `m` in the table with `m_i ◁ x_i` for every `i`.
    pub fn eval(&self, x: &PadicPoint) -> Result<PadicInt> {
        if x.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: x.arity(),
            });
        }
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
        let per_coord: Vec<Vec<u64>> = x
            .coords()
            .iter()
            .map(|xi| {
                let mut parts: Vec<u64> = Vec::with_capacity(self.level);
                let (mut partial, mut power) = (0u64, 1u64);
                for k in 0..self.level {
                    partial += xi.digits()[k] as u64 * power;
                    power *= p;
                    if parts.last() != Some(&partial) {
                        parts.push(partial);
                    }
                }
                parts
            })
            .collect();
        let side = self.side();
        let mut total: Option<PadicInt> = None;
        let mut cursor = vec![0usize; self.arity];
        loop {
            let index: Vec<u64> = cursor.iter().zip(&per_coord).map(|(&c, parts)| parts[c]).collect();
            let c = &self.coeffs[flatten(&index, side) as usize];
            total = Some(match total {
                None => c.clone(),
                Some(acc) => acc.add(c)?,
            });
            // odometer over the Cartesian product
            let mut slot = self.arity;
            loop {
                if slot == 0 {
                    return Ok(total.expect("nonempty product"));
                }
                slot -= 1;
                cursor[slot] += 1;
                if cursor[slot] < per_coord[slot].len() {
                    break;
                }
                cursor[slot] = 0;
            }
        }
    }

    /// `max_m |A_m|_p`.
    pub fn sup_norm(&self) -> Norm {
        self.coeffs.iter().map(PadicInt::norm).max().unwrap_or(Norm::Zero)
    }

    /// Attaches `a_m = p^(-e(m)) A_m`. Fails with [`Error::BoundViolated`]
    /// when some `A_m` is not divisible by `p^e(m)`.
    pub fn normalize(&self, alpha: &[u32]) -> Result<VdpTableN> {
        self.check_weight(alpha)?;
        let a = self
            .entries()
            .map(|(index, c)| {
                let e = MultiIndex::from_u64s(&index)?.weighted_exponent(self.prime, alpha);
                if e > 0 {
                    c.exact_div_p(e as usize).map_err(|err| match err {
                        Error::InexactDivision { .. } => Error::BoundViolated {
                            index: MultiIndex::from_u64s(&index).map(|m| m.to_string()).unwrap_or_default(),
                        },
                        other => other,
                    })
                } else {
                    Ok(c.mul_p_pow((-e) as usize))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = self.clone();
        t.normalized = Some(NormalizedCoeffsN {
            alpha: alpha.to_vec(),
            coeffs: a,
        });
        Ok(t)
    }

    /// Rebuilds `A_m = p^e(m) a_m` from normalized coefficients.
    pub fn from_normalized(
        prime: Prime,
        arity: usize,
        level: usize,
        precision: usize,
        alpha: Vec<u32>,
        a: Vec<PadicInt>,
    ) -> Result<Self> {
        let side = vdp_uni::table_len(prime, level)?;
        if alpha.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                got: alpha.len(),
            });
        }
        let coeffs = a
            .iter()
            .enumerate()
            .map(|(flat, am)| {
                let e = MultiIndex::from_u64s(&unflatten(flat as u64, side, arity))?.weighted_exponent(prime, &alpha);
                if e >= 0 {
                    Ok(am.mul_p_pow(e as usize))
                } else {
                    am.exact_div_p((-e) as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut t = VdpTableN::new(prime, arity, level, precision, coeffs)?;
        t.normalized = Some(NormalizedCoeffsN { alpha, coeffs: a });
        Ok(t)
    }

    fn check_weight(&self, alpha: &[u32]) -> Result<()> {
        if alpha.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: alpha.len(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableNRepr::from(self)).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: TableNRepr =
            serde_json::from_str(text).map_err(|e| Error::InvalidTable(e.to_string()))?;
        repr.try_into()
    }
}

impl Evaluator for VdpTableN {
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
        VdpTableN::eval(self, point)
    }
}

/// Keys are kept in row-major order rather than lexicographic string order.
#[derive(Serialize, Deserialize)]
struct TableNRepr {
    p: u32,
    n: usize,
    #[serde(rename = "K")]
    level: usize,
    #[serde(rename = "N")]
    precision: usize,
    #[serde(rename = "A")]
    coeffs: OrderedCoeffs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<OrderedCoeffs>,
}

struct OrderedCoeffs(Vec<(String, Vec<u32>)>);

impl Serialize for OrderedCoeffs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for OrderedCoeffs {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, Vec<u32>>::deserialize(d)?;
        Ok(OrderedCoeffs(map.into_iter().collect()))
    }
}

fn ordered(t: &VdpTableN, coeffs: &[PadicInt]) -> OrderedCoeffs {
    let side = t.side();
    OrderedCoeffs(
        coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| {
                let index = MultiIndex::from_u64s(&unflatten(flat as u64, side, t.arity)).expect("arity >= 1");
                (index.to_string(), c.digits().to_vec())
            })
            .collect(),
    )
}

impl From<&VdpTableN> for TableNRepr {
    fn from(t: &VdpTableN) -> Self {
        TableNRepr {
            p: t.prime.get(),
            n: t.arity,
            level: t.level,
            precision: t.precision,
            coeffs: ordered(t, &t.coeffs),
            alpha: t.normalized.as_ref().map(|n| n.alpha.clone()),
            a: t.normalized.as_ref().map(|n| ordered(t, &n.coeffs)),
        }
    }
}

fn dense(prime: Prime, arity: usize, level: usize, entries: OrderedCoeffs) -> Result<Vec<PadicInt>> {
    let len = table_len(prime, arity, level)?;
    let side = vdp_uni::table_len(prime, level)?;
    let mut slots: Vec<Option<PadicInt>> = vec![None; len as usize];
    for (key, digits) in entries.0 {
        let index: MultiIndex = key.parse()?;
        let values: Vec<u64> = index
            .entries()
            .iter()
            .map(|m| m.to_u64().filter(|&v| v < side))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvalidTable(format!("index {key} outside the table")))?;
        if values.len() != arity {
            return Err(Error::InvalidTable(format!("index {key} has the wrong arity")));
        }
        let slot = &mut slots[flatten(&values, side) as usize];
        if slot.is_some() {
            return Err(Error::InvalidTable(format!("duplicate index {key}")));
        }
        *slot = Some(PadicInt::new(prime, digits)?);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(flat, c)| {
            c.ok_or_else(|| Error::InvalidTable(format!("missing index at position {flat}")))
        })
        .collect()
}

impl TryFrom<TableNRepr> for VdpTableN {
    type Error = Error;

    fn try_from(r: TableNRepr) -> Result<Self> {
        let prime = Prime::new(r.p)?;
        let coeffs = dense(prime, r.n, r.level, r.coeffs)?;
        let mut table = VdpTableN::new(prime, r.n, r.level, r.precision, coeffs)?;
        match (r.alpha, r.a) {
            (Some(alpha), Some(a)) => {
                let a = dense(prime, r.n, r.level, a)?;
                let rebuilt = VdpTableN::from_normalized(prime, r.n, r.level, r.precision, alpha, a)?;
                if rebuilt.coeffs != table.coeffs {
                    return Err(Error::InvalidTable("normalized coefficients disagree with A".into()));
                }
                table.normalized = rebuilt.normalized;
            }
            (None, None) => {}
            _ => return Err(Error::InvalidTable("alpha and a must appear together".into())),
        }
        Ok(table)
    }
}

/// Result of the necessary coefficient bound for weighted Lipschitz functions.
/// A pass is evidence only; a violation rules the weight out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum BoundVerdict {
    NecessaryConditionHolds { level: usize },
    ViolatedAt {
        index: MultiIndex,
        #[serde(serialize_with = "ser_valuation")]
        valuation: Valuation,
        required: i64,
    },
}

impl BoundVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, BoundVerdict::NecessaryConditionHolds { .. })
    }
}

impl fmt::Display for BoundVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundVerdict::NecessaryConditionHolds { level } => {
                write!(f, "necessary bound holds at level {level}")
            }
            BoundVerdict::ViolatedAt {
                index,
                valuation,
                required,
            } => write!(f, "bound violated at {index} (ord {valuation} < {required})"),
        }
    }
}

/// Checks `ord(A_m) >= max_{i in I(m)} (s(m_i) - α_i)` over the table.
pub fn weighted_lip_bound_check(table: &VdpTableN, alpha: &[u32]) -> Result<BoundVerdict> {
    table.check_weight(alpha)?;
    for (index, c) in table.entries() {
        let m = MultiIndex::from_u64s(&index)?;
        let required = m.weighted_exponent(table.prime, alpha);
        let v = c.valuation();
        if !v.at_least(required) {
            return Ok(BoundVerdict::ViolatedAt {
                index: m,
                valuation: v,
                required,
            });
        }
    }
    Ok(BoundVerdict::NecessaryConditionHolds { level: table.level })
}

/// One projection that failed the univariate criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionFailure {
    /// 1-based coordinate that was left free.
    pub coordinate: usize,
    pub fixed: PadicPoint,
    pub verdict: LipVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub level: usize,
    pub seed: u64,
    /// Fixed-coordinate samples drawn per free coordinate. The property
    /// quantifies over all fixed values, so a pass is sampled evidence only.
    pub samples_per_coordinate: usize,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<ProjectionFailure>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Expands projections `z -> F(..., z, ...)` at sampled fixed coordinates and
/// runs the univariate criterion with weight `α_l` on each.
pub fn projection_lip_check<E: Evaluator + ?Sized>(
    f: &E,
    alpha: &[u32],
    level: usize,
    samples: usize,
    seed: u64,
) -> Result<ProjectionReport> {
    if alpha.len() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: alpha.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProjectionReport {
        level,
        seed,
        samples_per_coordinate: samples,
        checked: 0,
        failures: 0,
        first_failure: None,
    };
    for (slot, &weight) in alpha.iter().enumerate() {
        for _ in 0..samples {
            let fixed = (0..f.arity() - 1)
                .map(|_| random_padic(&mut rng, f.prime(), f.precision()))
                .collect::<Result<Vec<_>>>()?;
            let projection = Projection::new(f, slot, fixed.clone())?;
            let table = vdp_uni::expand(&projection, level)?;
            let verdict = vdp_uni::lip_alpha_check(&table, weight);
            report.checked += 1;
            if !verdict.holds() {
                report.failures += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some(ProjectionFailure {
                        coordinate: slot + 1,
                        fixed: PadicPoint::new(fixed)
                            .unwrap_or_else(|_| PadicPoint::single(PadicInt::zero(f.prime(), 1).expect("precision 1"))),
                        verdict,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Samples pairs and looks for `ord(F(x) - F(y)) < min_i (ord(x_i - y_i) - α_i)`.
/// Half of the pairs differ in a single coordinate.
pub fn sampled_weighted_lip_check<E: Evaluator + ?Sized>(
    f: &E,
    alpha: &[u32],
    samples: usize,
    seed: u64,
) -> Result<SampledLipReport> {
    let n = f.arity();
    if alpha.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: alpha.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SampledLipReport {
        samples,
        seed,
        alpha: alpha.to_vec(),
        violations: 0,
        evaluation_failures: 0,
        first_violation: None,
    };
    for _ in 0..samples {
        let x = random_point(&mut rng, f.prime(), n, f.precision())?;
        let single = if rng.gen_bool(0.5) { Some(rng.gen_range(0..n)) } else { None };
        let y = PadicPoint::new(
            x.coords()
                .iter()
                .enumerate()
                .map(|(i, xi)| match single {
                    Some(j) if j != i => Ok(xi.clone()),
                    _ => random_neighbour(&mut rng, xi),
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        let mut required: Option<i64> = None;
        for (i, (xi, yi)) in x.coords().iter().zip(y.coords()).enumerate() {
            if let Some(d) = xi.sub(yi)?.valuation().finite() {
                let r = d as i64 - alpha[i] as i64;
                required = Some(required.map_or(r, |c| c.min(r)));
            }
        }
        let Some(required) = required else { continue };
        let (fx, fy) = match (f.eval(&x), f.eval(&y)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                report.evaluation_failures += 1;
                continue;
            }
        };
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

/// `max |F(m)|_p` over the grid `[0, p^K)^n`.
pub fn grid_sup_norm<E: Evaluator + ?Sized>(f: &E, level: usize) -> Result<Norm> {
    let len = table_len(f.prime(), f.arity(), level)?;
    let side = vdp_uni::table_len(f.prime(), level)?;
    let n = f.arity();
    (0..len)
        .into_par_iter()
        .map(|flat| {
            let point: Vec<BigUint> = unflatten(flat, side, n).into_iter().map(BigUint::from).collect();
            f.eval_naturals(&point).map(|v| v.norm())
        })
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

    fn dsl(text: &str, arity: usize, p: u32, n: usize) -> DslFunction {
        DslFunction::parse(text, arity, prime(p), n).unwrap()
    }

    fn mi(v: &[u64]) -> MultiIndex {
        MultiIndex::from_u64s(v).unwrap()
    }

    #[test]
    fn index_sets() {
        let p = prime(3);
        assert_eq!(index_set(&mi(&[2, 9]), p), vec![1]);
        assert!(index_set(&mi(&[0, 0, 0]), p).is_empty());
        assert_eq!(index_set(&mi(&[3, 3]), p), vec![0, 1]);
        assert_eq!(mi(&[3, 10]).to_string(), "(3,10)");
        assert_eq!("(3, 10)".parse::<MultiIndex>().unwrap(), mi(&[3, 10]));
    }

    #[test]
    fn indicator_is_product() {
        let x = PadicPoint::from_u64s(&[12, 1], prime(3), 4).unwrap();
        assert_eq!(basis_indicator(&mi(&[3, 1]), &x).unwrap(), 1);
        assert_eq!(basis_indicator(&mi(&[3, 2]), &x).unwrap(), 0);
        assert!(basis_indicator(&mi(&[3]), &x).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let sum = dsl("x1 + x2", 2, 3, 6);
        assert!(coefficient(&sum, &mi(&[4, 7])).unwrap().is_zero());
        let product = dsl("x1 * x2", 2, 3, 6);
        // (4 - 1) * (7 - 1)
        assert_eq!(
            coefficient(&product, &mi(&[4, 7])).unwrap(),
            PadicInt::from_integer(18, 3, 6).unwrap()
        );
        assert_eq!(
            coefficient(&product, &mi(&[2, 2])).unwrap(),
            PadicInt::from_integer(4, 3, 6).unwrap()
        );
        let one = dsl("x1^2 + 3", 1, 5, 6);
        for m in 0..60u64 {
            assert_eq!(
                coefficient(&one, &mi(&[m])).unwrap(),
                vdp_uni::coefficient(&one, &NaturalIndex::from(m)).unwrap()
            );
        }
    }

    #[test]
    fn four_variable_nested_difference() {
        let p = prime(2);
        let f = dsl("x1^3*x2 + digitsum(x3, i+1, 2)*x1 + x4*x2*x3", 4, 2, 8);
        let m = [5u64, 2, 3, 1];
        let stars = [1u64, 0, 1];
        let at = |a: u64, b: u64, c: u64| f.eval_naturals(&[a, b, c, m[3]].map(BigUint::from)).unwrap();
        let (m1, m2, m3) = (m[0], m[1], m[2]);
        let (s1, s2, s3) = (stars[0], stars[1], stars[2]);
        let plus = [at(m1, m2, m3), at(s1, s2, m3), at(s1, m2, s3), at(m1, s2, s3)];
        let minus = [at(s1, m2, m3), at(m1, s2, m3), at(m1, m2, s3), at(s1, s2, s3)];
        let mut expected = PadicInt::zero(p, 8).unwrap();
        for v in &plus {
            expected = expected.add(v).unwrap();
        }
        for v in &minus {
            expected = expected.sub(v).unwrap();
        }
        let index = mi(&m);
        assert_eq!(index.index_set(p), vec![0, 1, 2]);
        assert_eq!(coefficient_recursive(&f, &index).unwrap(), expected);
        assert_eq!(coefficient(&f, &index).unwrap(), expected);
    }

    #[test]
    fn every_ordering_agrees() {
        let f = dsl("x1*x2^2*x3 + 2*x1*x3 - digitsum(x2, i, 1)*x3^2", 3, 3, 8);
        let m = mi(&[4, 17, 5]);
        let ie = coefficient(&f, &m).unwrap();
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            assert_eq!(coefficient_recursive_ordered(&f, &m, &order).unwrap(), ie);
        }
        assert!(coefficient_recursive_ordered(&f, &m, &[0, 1]).is_err());
    }

    #[test]
    fn reconstruction_and_zero() {
        let f = dsl("x1*x2 + digitsum(x2, 1, 2) - 2*x1^2", 2, 3, 6);
        let t = expand(&f, 2).unwrap();
        assert_eq!(t.coeffs().len(), 81);
        for a in 0..9u64 {
            for b in 0..9u64 {
                let x = PadicPoint::from_u64s(&[a, b], prime(3), 6).unwrap();
                assert_eq!(t.eval(&x).unwrap(), f.eval(&x).unwrap(), "({a},{b})");
            }
        }
        let zero = expand(&dsl("0", 2, 3, 4), 2).unwrap();
        assert!(zero.coeffs().iter().all(PadicInt::is_zero));
    }

    #[test]
    fn product_of_indicators() {
        let p = prime(3);
        let f = FnEvaluator::new(p, 2, 4, |x: &PadicPoint| {
            let v = basis_indicator(&mi(&[3, 1]), x)?;
            PadicInt::from_integer(v as u64, 3, 4)
        });
        let t = expand(&f, 2).unwrap();
        for (index, c) in t.entries() {
            let expected = u64::from(index == [3, 1]);
            assert_eq!(c, &PadicInt::from_integer(expected, 3, 4).unwrap(), "{index:?}");
        }
    }

    #[test]
    fn weighted_bound() {
        let f = dsl("divp(x1 - x1^7, 1) + x2", 2, 7, 6);
        let t = expand(&f, 2).unwrap();
        assert!(weighted_lip_bound_check(&t, &[1, 0]).unwrap().holds());
        assert!(!weighted_lip_bound_check(&t, &[0, 0]).unwrap().holds());

        let p = prime(3);
        let mut coeffs = vec![PadicInt::zero(p, 4).unwrap(); 81];
        coeffs[flatten(&[3, 0], 9) as usize] = PadicInt::one(p, 4).unwrap();
        let unit = VdpTableN::new(p, 2, 2, 4, coeffs).unwrap();
        assert_eq!(
            weighted_lip_bound_check(&unit, &[0, 0]).unwrap(),
            BoundVerdict::ViolatedAt {
                index: mi(&[3, 0]),
                valuation: Valuation::Finite(0),
                required: 1
            }
        );
        let mut low = vec![PadicInt::zero(p, 4).unwrap(); 81];
        low[flatten(&[2, 1], 9) as usize] = PadicInt::one(p, 4).unwrap();
        let low = VdpTableN::new(p, 2, 2, 4, low).unwrap();
        assert!(weighted_lip_bound_check(&low, &[0, 0]).unwrap().holds());
    }

    #[test]
    fn normalize_round_trip_and_json() {
        let f = dsl("divp(x1 - x1^3, 1) * x2 + 9*x2^2", 2, 3, 6);
        let t = expand(&f, 2).unwrap();
        let n = t.normalize(&[1, 0]).unwrap();
        let back = VdpTableN::from_normalized(
            t.prime(),
            2,
            2,
            t.precision(),
            vec![1, 0],
            n.normalized().unwrap().coeffs.clone(),
        )
        .unwrap();
        assert_eq!(back.coeffs(), t.coeffs());
        let json = t.to_json();
        assert!(json.starts_with(r#"{"p":3,"n":2,"K":2,"N":6,"A":{"(0,0)":"#), "{json}");
        assert_eq!(VdpTableN::from_json(&json).unwrap(), t);
        assert_eq!(VdpTableN::from_json(&n.to_json()).unwrap(), n);
        assert!(t.normalize(&[0, 0]).is_err());
    }

    #[test]
    fn projections_and_pairs() {
        let good = dsl("divp(x1 - x1^7, 1) + x2", 2, 7, 6);
        assert!(projection_lip_check(&good, &[1, 0], 2, 3, 1).unwrap().passed());
        let r = projection_lip_check(&good, &[0, 0], 2, 3, 1).unwrap();
        assert_eq!(r.first_failure.unwrap().coordinate, 1);
        assert!(sampled_weighted_lip_check(&good, &[1, 0], 2000, 5).unwrap().passed());
        let bad = sampled_weighted_lip_check(&good, &[0, 0], 2000, 5).unwrap();
        assert!(bad.violations > 0);
        let c = dsl("4", 2, 7, 6);
        assert!(sampled_weighted_lip_check(&c, &[0, 0], 500, 5).unwrap().passed());
        let sum = dsl("x1 + x2", 2, 3, 4);
        let proj = Projection::new(&sum, 0, vec![PadicInt::from_integer(2, 3, 4).unwrap()]).unwrap();
        let z = PadicPoint::from_u64s(&[5], prime(3), 4).unwrap();
        assert_eq!(proj.eval(&z).unwrap(), PadicInt::from_integer(7, 3, 4).unwrap());
    }

    #[test]
    fn sup_norm_identity() {
        let f = dsl("3*x1*x2 + 9*digitsum(x1, 1, 1)", 2, 3, 6);
        let t = expand(&f, 2).unwrap();
        assert_eq!(t.sup_norm(), grid_sup_norm(&f, 2).unwrap());
    }
}
