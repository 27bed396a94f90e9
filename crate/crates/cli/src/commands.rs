//! Subcommand implementations. Each returns the JSON and text renderings of
//! its result and whether the verdict is negative.

use std::fmt::Write as _;
use std::fs;

use num_bigint::BigUint;
use padic_vdp::dsl::well_defined_check;
use padic_vdp::hensel::{self, CoordinatePolicy};
use padic_vdp::vdp_multi;
use padic_vdp::vdp_uni;
use padic_vdp::{Error, Evaluator, Norm, PadicInt, PadicPoint, Result};
use serde::Serialize;
use serde_json::value::RawValue;
use serde_json::{json, Value};

use crate::input::{self, Loaded, Source};
use crate::{Command, GlobalArgs};

pub struct Outcome {
    pub json: String,
    pub text: String,
    pub negative: bool,
}

fn outcome(value: &impl Serialize, text: String, negative: bool) -> Outcome {
    Outcome {
        json: serde_json::to_string(value).expect("report serializes"),
        text,
        negative,
    }
}

pub fn run(g: &GlobalArgs, command: &Command) -> Result<Outcome> {
    if g.precision == 0 {
        return Err(Error::ZeroPrecision);
    }
    match command {
        Command::Expand => expand(g),
        Command::Eval { at } => eval(g, at),
        Command::Lipschitz {
            samples,
            projection_samples,
        } => lipschitz(g, *samples, *projection_samples),
        Command::Roots { project, fixed } => roots(g, *project, fixed.as_deref()),
        Command::Lift {
            start,
            l0,
            target_precision,
            coordinate,
            auto_coordinate,
        } => lift(g, start, *l0, target_precision.unwrap_or(g.precision), *coordinate, *auto_coordinate),
        Command::Wellposed { samples, lifts } => wellposed(g, *samples, *lifts),
    }
}

fn load(g: &GlobalArgs, precision: usize) -> Result<Loaded> {
    let source = Source {
        expr: g.expr.as_deref(),
        func: g.func.as_deref(),
        table: g.table.as_deref(),
    };
    input::load(&source, g.prime, g.vars, precision)
}

fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// `p^e`, saturating.
fn power(p: u32, e: usize) -> u128 {
    (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

/// Evaluations needed to expand an `n`-variable function at level `K`.
fn expansion_cost(p: u32, n: usize, level: usize) -> u128 {
    power(p, level * n).saturating_mul(1 << n.min(64))
}

#[derive(Serialize)]
struct ExpandReport<'a> {
    command: &'static str,
    function: String,
    p: u32,
    n: usize,
    #[serde(rename = "K")]
    level: usize,
    #[serde(rename = "N")]
    precision: usize,
    entries: usize,
    sup_norm: Norm,
    reconstruction_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<&'a RawValue>,
}

/// Grid points used to re-check an expansion: all of them when few, else a
/// deterministic spread.
fn spot_check_indices(total: u64, limit: u64) -> Vec<u64> {
    if total <= limit {
        (0..total).collect()
    } else {
        (0..limit).map(|i| i * total / limit).collect()
    }
}

fn expand(g: &GlobalArgs) -> Result<Outcome> {
    let loaded = load(g, g.precision)?;
    let f = &loaded.function;
    let (p, n) = (f.prime().get(), f.arity());
    check_budget(expansion_cost(p, n, g.level), g.budget)?;
    let side = power(p, g.level) as u64;
    let (json, entries, sup_norm, checked) = if n == 1 {
        let table = vdp_uni::expand(f, g.level)?;
        let points = spot_check_indices(side, 64);
        for &m in &points {
            let x = PadicInt::from_integer(m, p, f.precision())?;
            if table.eval(&x)? != f.eval(&PadicPoint::single(x))? {
                return Err(Error::ReplayFailed(format!("expansion does not reconstruct f({m})")));
            }
        }
        (table.to_json(), table.coeffs().len(), table.sup_norm(), points.len())
    } else {
        let table = vdp_multi::expand(f, g.level)?;
        let total = table.coeffs().len() as u64;
        let points = spot_check_indices(total, 64);
        for &flat in &points {
            let mut coords = vec![0u64; n];
            let mut rest = flat;
            for c in coords.iter_mut().rev() {
                *c = rest % side;
                rest /= side;
            }
            let x = PadicPoint::from_u64s(&coords, f.prime(), f.precision())?;
            if table.eval(&x)? != f.eval(&x)? {
                return Err(Error::ReplayFailed(format!("expansion does not reconstruct F{coords:?}")));
            }
        }
        (table.to_json(), table.coeffs().len(), table.sup_norm(), points.len())
    };
    let raw = RawValue::from_string(json.clone()).expect("table JSON is valid");
    let output = match &g.output {
        Some(path) => {
            fs::write(path, &json)
                .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let report = ExpandReport {
        command: "expand",
        function: f.description(),
        p,
        n,
        level: g.level,
        precision: f.precision(),
        entries,
        sup_norm,
        reconstruction_points: checked,
        table: if output.is_none() { Some(&raw) } else { None },
        output,
    };
    let mut text = format!(
        "expanded {} over p={p}, n={n}, K={}: {entries} coefficients\nsup norm {sup_norm}\nreconstruction re-checked at {checked} grid points\n",
        f.description(),
        g.level
    );
    match &report.output {
        Some(path) => writeln!(text, "table written to {path}").unwrap(),
        None => writeln!(text, "{json}").unwrap(),
    }
    Ok(outcome(&report, text, false))
}

fn eval(g: &GlobalArgs, at: &str) -> Result<Outcome> {
    let loaded = load(g, g.precision)?;
    let f = &loaded.function;
    let point = input::parse_point(at, f.prime(), f.precision())?;
    let value = f.eval(&point)?;
    let report = json!({
        "command": "eval",
        "function": f.description(),
        "point": point,
        "value": value,
        "integer": value.to_bigint_centered().to_string(),
        "norm": value.norm(),
    });
    let text = format!(
        "f({at}) = {value}\n  as integer {}\n  norm {}\n",
        value.to_bigint_centered(),
        value.norm()
    );
    Ok(outcome(&report, text, false))
}

fn tier_status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "violated"
    }
}

fn lipschitz(g: &GlobalArgs, samples: usize, projection_samples: usize) -> Result<Outcome> {
    let loaded = load(g, g.precision)?;
    let f = &loaded.function;
    let (p, n) = (f.prime().get(), f.arity());
    let alpha = input::resolve_alpha(g.alpha.as_deref(), loaded.declared_alpha, n)?;
    let projection_cost = if n > 1 {
        power(p, g.level).saturating_mul(2 * n as u128 * projection_samples as u128)
    } else {
        0
    };
    check_budget(
        expansion_cost(p, n, g.level)
            .saturating_add(projection_cost)
            .saturating_add(2 * samples as u128),
        g.budget,
    )?;
    let mut text = String::new();
    let mut negative = false;
    let bound: Value;
    let projection: Value;
    if n == 1 {
        let table = vdp_uni::expand(f, g.level)?;
        let verdict = vdp_uni::lip_alpha_check(&table, alpha[0]);
        negative |= !verdict.holds();
        writeln!(text, "necessary-bound: {verdict}").unwrap();
        bound = json!({
            "status": tier_status(verdict.holds()),
            "scope": "coefficient criterion in one variable (necessary and sufficient), checked for m < p^K",
            "result": verdict,
        });
        projection = json!({"status": "not-applicable"});
        writeln!(text, "projection-sampled: not applicable in one variable").unwrap();
    } else {
        let table = vdp_multi::expand(f, g.level)?;
        let verdict = vdp_multi::weighted_lip_bound_check(&table, &alpha)?;
        negative |= !verdict.holds();
        writeln!(text, "necessary-bound: {verdict}").unwrap();
        bound = json!({
            "status": tier_status(verdict.holds()),
            "scope": "necessary condition only; a pass is evidence, a violation rules the weight out",
            "result": verdict,
        });
        let report = vdp_multi::projection_lip_check(f, &alpha, g.level, projection_samples, g.seed)?;
        negative |= !report.passed();
        writeln!(
            text,
            "projection-sampled: {} ({} projections, {} failures, fixed coordinates sampled)",
            tier_status(report.passed()),
            report.checked,
            report.failures
        )
        .unwrap();
        projection = json!({
            "status": tier_status(report.passed()),
            "scope": "fixed coordinates are sampled, not exhausted",
            "result": report,
        });
    }
    let pairs = if n == 1 {
        vdp_uni::sampled_lip_check(f, alpha[0], samples, g.seed)?
    } else {
        vdp_multi::sampled_weighted_lip_check(f, &alpha, samples, g.seed)?
    };
    negative |= !pairs.passed();
    writeln!(
        text,
        "pair-sampled: {} ({} pairs, {} violations)",
        tier_status(pairs.passed()),
        pairs.samples,
        pairs.violations
    )
    .unwrap();
    let report = json!({
        "command": "lipschitz",
        "function": f.description(),
        "p": p,
        "n": n,
        "K": g.level,
        "alpha": alpha,
        "seed": g.seed,
        "verdict": if negative { "violated" } else { "pass" },
        "tiers": {
            "necessary-bound": bound,
            "projection-sampled": projection,
            "pair-sampled": {"status": tier_status(pairs.passed()), "result": pairs},
        },
    });
    Ok(outcome(&report, text, negative))
}

fn roots(g: &GlobalArgs, project: Option<usize>, fixed: Option<&str>) -> Result<Outcome> {
    let loaded = load(g, g.precision)?;
    let f = &loaded.function;
    let (p, n) = (f.prime().get(), f.arity());
    let alpha = input::resolve_alpha(g.alpha.as_deref(), loaded.declared_alpha, n)?;
    let k = g.level;
    if let (Some(j), Some(fixed)) = (project, fixed) {
        if j == 0 || j > n {
            return Err(Error::CoordinateOutOfRange { coordinate: j, arity: n });
        }
        check_budget(power(p, k).saturating_mul(k as u128), g.budget)?;
        let fixed = input::parse_point(fixed, f.prime(), f.precision())?.coords().to_vec();
        let report = hensel::root_exists_via_projection(f, j - 1, fixed, alpha[j - 1], 1..=k, g.budget)?;
        let mut text = String::new();
        for level in &report.levels {
            writeln!(text, "level {}: {:?}", level.level, level.roots).unwrap();
        }
        let value = json!({"command": "roots", "p": p, "alpha": alpha, "projection": report});
        return Ok(outcome(&value, text, false));
    }
    let roots: Vec<Value> = if n == 1 {
        hensel::roots_mod_uni(f, alpha[0], k, g.budget)?
            .into_iter()
            .map(Value::from)
            .collect()
    } else {
        hensel::brute_force_roots_multi(f, k, &alpha, g.budget)?
            .into_iter()
            .map(Value::from)
            .collect()
    };
    let max_alpha = *alpha.iter().max().expect("arity >= 1") as usize;
    let text = format!(
        "{} roots modulo {p}^{} among residues below {p}^{k}\n{}\n",
        roots.len(),
        k - max_alpha,
        serde_json::to_string(&roots).expect("serializes")
    );
    let value = json!({
        "command": "roots",
        "function": f.description(),
        "p": p,
        "n": n,
        "level": k,
        "alpha": alpha,
        "roots": roots,
    });
    Ok(outcome(&value, text, false))
}

fn lift(
    g: &GlobalArgs,
    start: &str,
    l0: usize,
    target: usize,
    coordinate: Option<usize>,
    auto: bool,
) -> Result<Outcome> {
    let loaded = load(g, g.precision.max(target))?;
    let f = &loaded.function;
    let (p, n) = (f.prime().get(), f.arity());
    let alpha = input::resolve_alpha(g.alpha.as_deref(), loaded.declared_alpha, n)?;
    let start = start
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::Precondition(format!("start must be non-negative integers, got {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let policy = match (coordinate, auto) {
        (_, true) => CoordinatePolicy::Auto,
        (Some(0), _) => return Err(Error::CoordinateOutOfRange { coordinate: 0, arity: n }),
        (Some(j), _) => CoordinatePolicy::Fixed(j - 1),
        (None, false) => CoordinatePolicy::Fixed(0),
    };
    let per_level = if auto { n as u128 } else { 1 } * (p as u128 - 1);
    check_budget((target as u128).saturating_mul(per_level).saturating_add(1), g.budget)?;
    let trace = hensel::hensel_lift_multi(f, &alpha, &start, l0, policy, target)?;
    hensel::replay(f, &trace)?;
    let mut text = format!("status: {}\n", trace.status);
    for level in &trace.levels {
        let set: Vec<String> = level
            .condition_set
            .iter()
            .map(|c| c.map_or("-".to_string(), |v| v.to_string()))
            .collect();
        writeln!(
            text,
            "level {:>3}  coordinate {}  residual {}  condition [{}]  digit {}",
            level.level,
            level.coordinate,
            level.residual_digit,
            set.join(" "),
            level.digit.map_or("-".to_string(), |d| d.to_string())
        )
        .unwrap();
    }
    let root: Vec<String> = trace.root.iter().map(|r| r.to_string()).collect();
    writeln!(
        text,
        "root ({}) modulo {p}^{} ({})",
        root.join(", "),
        trace.reached_precision,
        trace.verification
    )
    .unwrap();
    let negative = !trace.lifted();
    let value = json!({"command": "lift", "function": f.description(), "trace": trace});
    Ok(outcome(&value, text, negative))
}

fn wellposed(g: &GlobalArgs, samples: usize, lifts: usize) -> Result<Outcome> {
    let loaded = load(g, g.precision)?;
    let f = &loaded.function;
    let (p, n) = (f.prime().get(), f.arity());
    let alpha = input::resolve_alpha(g.alpha.as_deref(), loaded.declared_alpha, n)?;
    check_budget(samples as u128, g.budget)?;
    let divisions = well_defined_check(f, samples, g.seed)?;
    let mut negative = !divisions.passed();
    let mut text = format!(
        "exact divisions: {} ({} samples, {} inexact, {} other failures)\n",
        tier_status(divisions.passed()),
        divisions.samples,
        divisions.inexact_divisions,
        divisions.other_failures
    );
    let residue = if !divisions.passed() {
        writeln!(text, "residue classes: skipped (function is not defined everywhere)").unwrap();
        json!({"status": "skipped"})
    } else if n == 1 && g.level > alpha[0] as usize {
        let report = hensel::well_defined_residue_check(f, alpha[0], g.level, lifts, g.seed, g.budget)?;
        negative |= !report.passed();
        writeln!(
            text,
            "residue classes mod {p}^{}: {} ({} lifts checked)",
            g.level,
            tier_status(report.passed()),
            report.checked
        )
        .unwrap();
        json!({"status": tier_status(report.passed()), "result": report})
    } else {
        writeln!(text, "residue classes: skipped (needs one variable and K > α)").unwrap();
        json!({"status": "skipped"})
    };
    let value = json!({
        "command": "wellposed",
        "function": f.description(),
        "p": p,
        "n": n,
        "alpha": alpha,
        "seed": g.seed,
        "verdict": if negative { "violated" } else { "pass" },
        "exact-divisions": {"status": tier_status(divisions.passed()), "result": divisions},
        "residue-classes": residue,
    });
    Ok(outcome(&value, text, negative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_checks_cover_small_grids() {
        assert_eq!(spot_check_indices(5, 64), vec![0, 1, 2, 3, 4]);
        let spread = spot_check_indices(1000, 10);
        assert_eq!(spread.len(), 10);
        assert_eq!(spread[1], 100);
    }

    #[test]
    fn costs_saturate() {
        assert_eq!(expansion_cost(3, 2, 2), 81 * 4);
        assert_eq!(power(7, 100), u128::MAX);
    }
}
