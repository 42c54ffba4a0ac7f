//! Problem spec files (TOML) and table learner files.
//!
//! ```toml
//! points = ["z0", "z1"]
//! hypotheses = ["h0", "h1"]
//!
//! [loss.h0]
//! z0 = "0"
//! z1 = "1"
//!
//! [loss.h1]
//! z0 = "1"
//! z1 = 0
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use pacdecide::algebra::{format_rational, parse_rational, Rational};
use pacdecide::model::{sample_count, sample_index, Learner, LearningProblem};
use serde::Deserialize;

/// Name accepted by `--problem` for the two-point EMX problem when no file
/// of that name exists.
pub const BUILTIN_BINARY_EMX: &str = "binemx";

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{path}: {key}: {message}")]
    Key { path: String, key: String, message: String },
    #[error("{path}:{line}: {message}")]
    Line { path: String, line: usize, message: String },
    #[error("{0}")]
    Invalid(#[from] pacdecide::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    points: Vec<String>,
    hypotheses: Vec<String>,
    loss: BTreeMap<String, BTreeMap<String, RawLoss>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLoss {
    Int(i64),
    Text(String),
}

/// Reads a problem from a spec file, or the builtin binary EMX problem.
pub fn load_problem(arg: &str) -> Result<LearningProblem, SpecError> {
    if arg == BUILTIN_BINARY_EMX && !Path::new(arg).exists() {
        return Ok(LearningProblem::binary_emx());
    }
    let text = std::fs::read_to_string(arg).map_err(|source| SpecError::Io {
        path: arg.to_string(),
        source,
    })?;
    parse_problem(&text, arg)
}

/// Parses spec text; `origin` names the source in error messages.
pub fn parse_problem(text: &str, origin: &str) -> Result<LearningProblem, SpecError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError::Parse {
        path: origin.to_string(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let key_err = |key: String, message: String| SpecError::Key {
        path: origin.to_string(),
        key,
        message,
    };
    for h in raw.loss.keys() {
        if !raw.hypotheses.contains(h) {
            return Err(key_err(format!("loss.{h}"), "not a listed hypothesis".into()));
        }
    }
    let mut loss = Vec::with_capacity(raw.hypotheses.len());
    for h in &raw.hypotheses {
        let row = raw
            .loss
            .get(h)
            .ok_or_else(|| key_err(format!("loss.{h}"), "missing loss row".into()))?;
        for z in row.keys() {
            if !raw.points.contains(z) {
                return Err(key_err(format!("loss.{h}.{z}"), "not a listed point".into()));
            }
        }
        let mut values = Vec::with_capacity(raw.points.len());
        for z in &raw.points {
            let key = format!("loss.{h}.{z}");
            let v = match row.get(z) {
                None => return Err(key_err(key, "missing loss value".into())),
                Some(RawLoss::Int(i)) => Rational::from_integer((*i).into()),
                Some(RawLoss::Text(s)) => parse_rational(s).map_err(|e| key_err(key.clone(), e.to_string()))?,
            };
            values.push(v);
        }
        loss.push(values);
    }
    Ok(LearningProblem::new(raw.points, raw.hypotheses, loss)?)
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Canonical spec text: listed order, every loss as a quoted rational.
pub fn emit_problem(problem: &LearningProblem) -> String {
    let list = |xs: &[String]| xs.iter().map(|x| quoted(x)).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    writeln!(out, "points = [{}]", list(problem.points())).unwrap();
    writeln!(out, "hypotheses = [{}]", list(problem.hypotheses())).unwrap();
    for (h, name) in problem.hypotheses().iter().enumerate() {
        writeln!(out, "\n[loss.{}]", quoted(name)).unwrap();
        for (z, point) in problem.points().iter().enumerate() {
            let v = format_rational(problem.loss(h, z));
            writeln!(out, "{} = {}", quoted(point), quoted(&v)).unwrap();
        }
    }
    out
}

/// Reads a table learner: one `z_a z_b ... -> h` line per sample of length
/// `m`. Blank lines and `#` comments are skipped; every sample must appear
/// exactly once.
pub fn load_table(path: &str, problem: &LearningProblem, m: usize, cap: u64) -> Result<Learner, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_string(),
        source,
    })?;
    parse_table(&text, path, problem, m, cap)
}

pub fn parse_table(
    text: &str,
    origin: &str,
    problem: &LearningProblem,
    m: usize,
    cap: u64,
) -> Result<Learner, SpecError> {
    let n = problem.n_points();
    let total = sample_count(n, m, cap)?;
    let points: HashMap<&str, usize> = problem.points().iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
    let hyps: HashMap<&str, usize> = problem
        .hypotheses()
        .iter()
        .enumerate()
        .map(|(i, h)| (h.as_str(), i))
        .collect();
    let mut entries: Vec<Option<usize>> = vec![None; total as usize];
    for (i, raw) in text.lines().enumerate() {
        let line_err = |message: String| SpecError::Line {
            path: origin.to_string(),
            line: i + 1,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| line_err("expected `points -> hypothesis`".into()))?;
        let sample = lhs
            .split_whitespace()
            .map(|p| points.get(p).copied().ok_or_else(|| line_err(format!("unknown point `{p}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if sample.len() != m {
            return Err(line_err(format!("sample has {} points, expected {m}", sample.len())));
        }
        let h = rhs.trim();
        let h = *hyps.get(h).ok_or_else(|| line_err(format!("unknown hypothesis `{h}`")))?;
        let slot = &mut entries[sample_index(n, &sample) as usize];
        if slot.is_some() {
            return Err(line_err("sample listed twice".into()));
        }
        *slot = Some(h);
    }
    let missing = entries.iter().filter(|e| e.is_none()).count();
    if missing > 0 {
        return Err(SpecError::Parse {
            path: origin.to_string(),
            message: format!("partial table: {missing} of {total} samples have no entry"),
        });
    }
    Ok(Learner::table(problem, m, entries.into_iter().flatten().collect())?)
}

/// Table lines in sample order, as accepted by [`parse_table`].
pub fn emit_table(problem: &LearningProblem, learner: &Learner) -> Vec<String> {
    use pacdecide::model::{sample_at, Policy};
    let Policy::Table(t) = &learner.policy else {
        return Vec::new();
    };
    t.iter()
        .enumerate()
        .map(|(i, &h)| {
            let s = sample_at(problem.n_points(), learner.m, i as u64);
            let pts: Vec<&str> = s.iter().map(|&z| problem.points()[z].as_str()).collect();
            format!("{} -> {}", pts.join(" "), problem.hypotheses()[h])
        })
        .collect()
}
