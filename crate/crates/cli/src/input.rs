use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use nashlab::families;
use nashlab::{AffineSemigroup, Int, LatticeVector};
use serde_json::Value;

/// Reads a semigroup from a JSON file, `-` for stdin, or `example:<preset>`.
pub fn load(source: &str) -> Result<AffineSemigroup> {
    if let Some(name) = source.strip_prefix("example:") {
        return preset(name);
    }
    let text = if source == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(source).with_context(|| format!("reading {source}"))?
    };
    parse(&text)
}

/// Parses `{ "rank": d, "generators": [[...], ...] }`. Entries may be integers or
/// decimal strings for values beyond 64 bits.
pub fn parse(text: &str) -> Result<AffineSemigroup> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| anyhow!("malformed JSON at line {}, column {}: {}", e.line(), e.column(), e))?;
    let obj = value.as_object().ok_or_else(|| anyhow!("expected a JSON object with rank and generators"))?;
    let rank = obj
        .get("rank")
        .and_then(Value::as_u64)
        .ok_or_else(|| anyhow!("\"rank\" must be a nonnegative integer"))? as usize;
    let gens = obj
        .get("generators")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("\"generators\" must be an array of integer vectors"))?;
    let gens: Vec<LatticeVector> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let entries = g.as_array().ok_or_else(|| anyhow!("generator {i} is not an array"))?;
            if entries.len() != rank {
                bail!("generator {i} has {} entries but rank is {rank}", entries.len());
            }
            entries.iter().map(|x| integer(x).with_context(|| format!("generator {i}"))).collect()
        })
        .collect::<Result<_>>()?;
    Ok(AffineSemigroup::canonicalize(&gens)?)
}

fn integer(x: &Value) -> Result<Int> {
    match x {
        Value::Number(n) => n.as_i64().map(Int::from).ok_or_else(|| anyhow!("{n} is not an integer")),
        Value::String(s) => s.parse::<Int>().map_err(|_| anyhow!("{s:?} is not an integer")),
        other => bail!("{other} is not an integer"),
    }
}

fn numbers(args: &str) -> Result<Vec<i64>> {
    args.split(',').map(|a| a.trim().parse::<i64>().map_err(|_| anyhow!("bad preset parameter {a:?}"))).collect()
}

pub const PRESETS: &str = "nobile, a1, cdll, rebassoo:p,q,r, reeve:q, cyclic:a,b, numerical:g1,g2,...";

pub fn preset(name: &str) -> Result<AffineSemigroup> {
    let (head, args) = name.split_once(':').unwrap_or((name, ""));
    let s = match (head, args) {
        ("nobile", "") => families::numerical(&[2, 3])?,
        ("a1", "") => families::cyclic_quotient(1, 2)?,
        ("cdll", "") => families::counterexample_x()?,
        ("rebassoo", a) => match numbers(a)?[..] {
            [p, q, r] => families::rebassoo(p, q, r)?,
            _ => bail!("rebassoo takes three parameters, e.g. rebassoo:1,2,3"),
        },
        ("reeve", a) => match numbers(a)?[..] {
            [q] => families::reeve(q)?,
            _ => bail!("reeve takes one parameter, e.g. reeve:2"),
        },
        ("cyclic", a) => match numbers(a)?[..] {
            [a, b] => families::cyclic_quotient(a, b)?,
            _ => bail!("cyclic takes two parameters, e.g. cyclic:2,5"),
        },
        ("numerical", a) => {
            let gens = numbers(a)?;
            if gens.iter().any(|&g| g < 1) {
                bail!("numerical generators must be positive");
            }
            families::numerical(&gens.iter().map(|&g| g as u64).collect::<Vec<_>>())?
        }
        _ => bail!("unknown preset {name:?}; available: {PRESETS}"),
    };
    Ok(s)
}
