//! CPLEX LP text output and a reader for `name value` solution files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{LinearModel, Sense, VarKind};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, terms: impl Iterator<Item = (i64, String)>) {
    for (idx, (coef, name)) in terms.enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if coef < 0 { "-" } else { "+" };
        let mag = coef.unsigned_abs();
        match (idx, mag) {
            (0, 1) if coef > 0 => write!(out, " {name}"),
            (0, _) if coef > 0 => write!(out, " {mag} {name}"),
            (_, 1) => write!(out, " {sign} {name}"),
            _ => write!(out, " {sign} {mag} {name}"),
        }
        .expect("write to string");
    }
}

/// The model in CPLEX LP format. Output is a pure function of the model.
pub fn write_lp(model: &LinearModel) -> String {
    let name = |v: usize| model.variables[v].name.clone();
    let mut out = String::new();
    out.push_str("\\ integrated quay and yard crane scheduling\n");
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, model.objective.iter().map(|&v| (1, name(v))));
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        write!(out, " {}:", row.name).expect("write to string");
        push_terms(&mut out, row.terms.iter().map(|&(v, c)| (c, name(v))));
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {sense} {}", row.rhs).expect("write to string");
    }
    out.push_str("Bounds\n");
    for v in model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Continuous)
    {
        writeln!(out, " {} >= 0", v.name).expect("write to string");
    }
    out.push_str("Binaries\n");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Binary) {
        writeln!(out, " {}", v.name).expect("write to string");
    }
    out.push_str("End\n");
    out
}

/// Reads `name value` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_values(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [name, value] = parts[..] else {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected `name value`, found {line:?}"),
            });
        };
        let value: f64 = value.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("value of {name} is not a number: {value:?}"),
        })?;
        out.insert(name.to_string(), value);
    }
    Ok(out)
}
