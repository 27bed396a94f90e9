//! Loading the function a command operates on.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use padic_vdp::{
    DslFunction, Error, Evaluator, FuncDef, PadicInt, PadicPoint, Prime, Result, VdpTable1, VdpTableN,
};

/// A function given inline, as a definition file, or as a coefficient table.
pub enum Function {
    Dsl(DslFunction),
    Table1(VdpTable1),
    TableN(VdpTableN),
}

impl Evaluator for Function {
    fn prime(&self) -> Prime {
        match self {
            Function::Dsl(f) => f.prime(),
            Function::Table1(t) => Evaluator::prime(t),
            Function::TableN(t) => Evaluator::prime(t),
        }
    }

    fn arity(&self) -> usize {
        match self {
            Function::Dsl(f) => f.arity(),
            Function::Table1(t) => Evaluator::arity(t),
            Function::TableN(t) => Evaluator::arity(t),
        }
    }

    fn precision(&self) -> usize {
        match self {
            Function::Dsl(f) => f.precision(),
            Function::Table1(t) => Evaluator::precision(t),
            Function::TableN(t) => Evaluator::precision(t),
        }
    }

    fn eval(&self, point: &PadicPoint) -> Result<PadicInt> {
        match self {
            Function::Dsl(f) => f.eval(point),
            Function::Table1(t) => Evaluator::eval(t, point),
            Function::TableN(t) => Evaluator::eval(t, point),
        }
    }
}

impl Function {
    pub fn description(&self) -> String {
        match self {
            Function::Dsl(f) => f.expr().to_string(),
            Function::Table1(t) => format!("table(level {})", t.level()),
            Function::TableN(t) => format!("table(arity {}, level {})", t.arity(), t.level()),
        }
    }
}

pub struct Source<'a> {
    pub expr: Option<&'a str>,
    pub func: Option<&'a Path>,
    pub table: Option<&'a Path>,
}

pub struct Loaded {
    pub function: Function,
    /// Weight declared in a definition file, if any.
    pub declared_alpha: Option<Vec<u32>>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

/// Loads the function. `precision` is the number of digits every value must
/// carry; DSL functions get extra working digits for their exact divisions.
pub fn load(source: &Source, prime: Option<u32>, arity: Option<usize>, precision: usize) -> Result<Loaded> {
    let given = [source.expr.is_some(), source.func.is_some(), source.table.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(Error::Precondition(
            "give exactly one of --expr, --func, --table".into(),
        ));
    }
    if let Some(path) = source.table {
        let text = read(path)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::InvalidTable(e.to_string()))?;
        let function = if value.get("n").is_some() {
            Function::TableN(VdpTableN::from_json(&text)?)
        } else {
            Function::Table1(VdpTable1::from_json(&text)?)
        };
        if let Some(p) = prime {
            if p != function.prime().get() {
                return Err(Error::PrimeMismatch(p, function.prime().get()));
            }
        }
        if let Some(n) = arity {
            if n != function.arity() {
                return Err(Error::ArityMismatch {
                    expected: n,
                    got: function.arity(),
                });
            }
        }
        return Ok(Loaded {
            function,
            declared_alpha: None,
        });
    }
    let prime = Prime::new(prime.ok_or_else(|| Error::Precondition("--prime is required".into()))?)?;
    let def = match (source.expr, source.func) {
        (Some(body), _) => FuncDef::new(arity.unwrap_or(1), body),
        (_, Some(path)) => {
            let def = FuncDef::from_json(&read(path)?)?;
            if let Some(n) = arity {
                if n != def.arity {
                    return Err(Error::ArityMismatch {
                        expected: n,
                        got: def.arity,
                    });
                }
            }
            def
        }
        _ => unreachable!("exactly one source is set"),
    };
    let expr = def.parse()?;
    let function = DslFunction::with_target_precision(expr, def.arity, prime, precision)?;
    Ok(Loaded {
        function: Function::Dsl(function),
        declared_alpha: def.alpha,
    })
}

/// Parses `a,b,...` into non-negative integers.
pub fn parse_u32_list(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::Precondition(format!("expected non-negative integers, got {text:?}")))
        })
        .collect()
}

/// Weight vector of length `arity`; a single value applies to every coordinate.
pub fn resolve_alpha(flag: Option<&str>, declared: Option<Vec<u32>>, arity: usize) -> Result<Vec<u32>> {
    let alpha = match (flag, declared) {
        (Some(text), _) => parse_u32_list(text)?,
        (None, Some(a)) => a,
        (None, None) => vec![0],
    };
    match alpha.len() {
        1 => Ok(vec![alpha[0]; arity]),
        n if n == arity => Ok(alpha),
        n => Err(Error::ArityMismatch {
            expected: arity,
            got: n,
        }),
    }
}

/// Parses a point `a,b,...` of integers or `num/den` rationals.
pub fn parse_point(text: &str, prime: Prime, precision: usize) -> Result<PadicPoint> {
    let coords = text
        .split(',')
        .map(|part| {
            let part = part.trim();
            let bad = || Error::Precondition(format!("cannot read {part:?} as an integer or fraction"));
            match part.split_once('/') {
                Some((n, d)) => {
                    let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                    let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                    PadicInt::from_rational(&n, &d, prime, precision)
                }
                None => PadicInt::from_bigint(&part.parse().map_err(|_| bad())?, prime, precision),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PadicPoint::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_resolution() {
        assert_eq!(resolve_alpha(Some("1,0"), None, 2).unwrap(), vec![1, 0]);
        assert_eq!(resolve_alpha(Some("2"), None, 3).unwrap(), vec![2, 2, 2]);
        assert_eq!(resolve_alpha(None, Some(vec![1]), 1).unwrap(), vec![1]);
        assert_eq!(resolve_alpha(None, None, 2).unwrap(), vec![0, 0]);
        assert!(resolve_alpha(Some("1,2"), None, 3).is_err());
        assert!(resolve_alpha(Some("x"), None, 1).is_err());
    }

    #[test]
    fn points() {
        let p = Prime::new(5).unwrap();
        let x = parse_point("3, -1, 1/2", p, 4).unwrap();
        assert_eq!(x.arity(), 3);
        assert_eq!(x.coords()[1], PadicInt::from_bigint(&BigInt::from(-1), p, 4).unwrap());
        assert!(parse_point("1/5", p, 4).is_err());
        assert!(parse_point("abc", p, 4).is_err());
    }
}
