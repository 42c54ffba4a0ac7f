//! Finite learning problems, risk forms and learners.
//!
//! A problem with `n` points lives on the probability simplex in the free
//! variables `q1..q(n-1)`; the last point's mass is `1 - q1 - ... - q(n-1)`.

use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::algebra::{MPoly, Rational};
use crate::error::{Error, Resource, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearningProblem {
    points: Vec<String>,
    hypotheses: Vec<String>,
    /// `loss[h][z]`.
    loss: Vec<Vec<Rational>>,
}

fn check_unique(kind: &str, names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::InvalidInput(format!("no {kind}s given")));
    }
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::InvalidInput(format!("duplicate {kind} `{n}`")));
        }
    }
    Ok(())
}

impl LearningProblem {
    pub fn new(
        points: Vec<String>,
        hypotheses: Vec<String>,
        loss: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        check_unique("point", &points)?;
        check_unique("hypothesis", &hypotheses)?;
        if loss.len() != hypotheses.len() {
            return Err(Error::InvalidInput(format!(
                "loss table has {} rows for {} hypotheses",
                loss.len(),
                hypotheses.len()
            )));
        }
        for (h, row) in loss.iter().enumerate() {
            if row.len() != points.len() {
                return Err(Error::InvalidInput(format!(
                    "loss row of `{}` has {} entries for {} points",
                    hypotheses[h],
                    row.len(),
                    points.len()
                )));
            }
            if let Some(z) = row.iter().position(|l| *l < Rational::zero()) {
                return Err(Error::InvalidInput(format!(
                    "negative loss for `{}` at `{}`",
                    hypotheses[h], points[z]
                )));
            }
        }
        Ok(LearningProblem {
            points,
            hypotheses,
            loss,
        })
    }

    /// Each hypothesis is a set of point indices; loss is 1 at the points
    /// it does not cover.
    pub fn emx(points: &[&str], sets: &[(&str, &[usize])]) -> Result<Self> {
        let loss = sets
            .iter()
            .map(|(_, cover)| {
                (0..points.len())
                    .map(|z| {
                        if cover.contains(&z) {
                            Rational::zero()
                        } else {
                            Rational::one()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(
            points.iter().map(|s| s.to_string()).collect(),
            sets.iter().map(|(h, _)| h.to_string()).collect(),
            loss,
        )
    }

    /// Two points and the singletons `h0 = {z0}`, `h1 = {z1}`.
    pub fn binary_emx() -> Self {
        Self::emx(&["z0", "z1"], &[("h0", &[0]), ("h1", &[1])]).expect("well formed")
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn hypotheses(&self) -> &[String] {
        &self.hypotheses
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_hypotheses(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn loss(&self, h: usize, z: usize) -> &Rational {
        &self.loss[h][z]
    }

    pub fn loss_row(&self, h: usize) -> &[Rational] {
        &self.loss[h]
    }

    /// Number of free simplex variables, `n - 1`.
    pub fn nvars(&self) -> usize {
        self.points.len() - 1
    }

    pub fn variable_names(&self) -> Vec<String> {
        (1..self.points.len()).map(|i| format!("q{i}")).collect()
    }

    /// The mass of point `z` as a polynomial in the free variables.
    pub fn mass(&self, z: usize) -> MPoly {
        let k = self.nvars();
        if z < k {
            return MPoly::var(k, z);
        }
        let mut last = MPoly::one(k);
        for i in 0..k {
            last = &last - &MPoly::var(k, i);
        }
        last
    }

    /// Expected loss of `h` as a linear form in the free variables.
    pub fn risk_form(&self, h: usize) -> MPoly {
        let mut acc = MPoly::zero(self.nvars());
        for (z, l) in self.loss[h].iter().enumerate() {
            if !l.is_zero() {
                acc = &acc + &self.mass(z).scale(l);
            }
        }
        acc
    }

    /// Largest difference between two losses at the same point; no excess
    /// risk reaches this value.
    pub fn max_spread(&self) -> Rational {
        let mut best = Rational::zero();
        for z in 0..self.n_points() {
            let col = self.loss.iter().map(|row| &row[z]);
            let hi = col.clone().max().expect("nonempty");
            let lo = col.min().expect("nonempty");
            best = best.max(hi - lo);
        }
        best
    }

    /// Empirical risk minimizer from per-point counts; lowest index wins ties.
    pub fn erm_counts(&self, counts: &[u64]) -> usize {
        let mut best = 0;
        let mut best_risk: Option<Rational> = None;
        for h in 0..self.n_hypotheses() {
            let r = counts
                .iter()
                .zip(&self.loss[h])
                .filter(|(c, _)| **c > 0)
                .fold(Rational::zero(), |acc, (c, l)| {
                    acc + l * Rational::from_integer((*c).into())
                });
            if best_risk.as_ref().is_none_or(|b| r < *b) {
                best = h;
                best_risk = Some(r);
            }
        }
        best
    }

    /// Empirical risk minimizer of a sample of point indices.
    pub fn erm(&self, sample: &[usize]) -> usize {
        self.erm_counts(&counts_of(self.n_points(), sample))
    }
}

pub fn counts_of(n: usize, sample: &[usize]) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for &z in sample {
        c[z] += 1;
    }
    c
}

/// `n^m`, or a resource error when it exceeds `cap`.
pub fn sample_count(n: usize, m: usize, cap: u64) -> Result<u64> {
    let total = (n as u64).checked_pow(m as u32);
    match total {
        Some(t) if t <= cap => Ok(t),
        _ => Err(Error::ResourceExceeded {
            resource: Resource::Enumeration,
            limit: cap,
            observed: total.unwrap_or(u64::MAX),
        }),
    }
}

/// The sample with lexicographic rank `index` (first draw most significant).
pub fn sample_at(n: usize, m: usize, mut index: u64) -> Vec<usize> {
    let mut s = vec![0; m];
    for slot in s.iter_mut().rev() {
        *slot = (index % n as u64) as usize;
        index /= n as u64;
    }
    s
}

pub fn sample_index(n: usize, sample: &[usize]) -> u64 {
    sample.iter().fold(0, |acc, &z| acc * n as u64 + z as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    Erm,
    /// Output hypothesis per sample, samples in lexicographic order.
    Table(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Learner {
    pub m: usize,
    pub policy: Policy,
}

impl Learner {
    pub fn erm(m: usize) -> Self {
        Learner {
            m,
            policy: Policy::Erm,
        }
    }

    pub fn table(problem: &LearningProblem, m: usize, entries: Vec<usize>) -> Result<Self> {
        let l = Learner {
            m,
            policy: Policy::Table(entries),
        };
        l.validate(problem)?;
        Ok(l)
    }

    pub fn validate(&self, problem: &LearningProblem) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidInput("sample size must be positive".into()));
        }
        if let Policy::Table(t) = &self.policy {
            let want = sample_count(problem.n_points(), self.m, u64::MAX)?;
            if t.len() as u64 != want {
                return Err(Error::InvalidInput(format!(
                    "learner table has {} entries, expected {want}",
                    t.len()
                )));
            }
            if let Some(&h) = t.iter().find(|&&h| h >= problem.n_hypotheses()) {
                return Err(Error::InvalidInput(format!(
                    "learner table refers to hypothesis {h}"
                )));
            }
        }
        Ok(())
    }

    pub fn apply(&self, problem: &LearningProblem, sample: &[usize]) -> usize {
        debug_assert_eq!(sample.len(), self.m);
        match &self.policy {
            Policy::Erm => problem.erm(sample),
            Policy::Table(t) => t[sample_index(problem.n_points(), sample) as usize],
        }
    }

    /// Hypotheses the learner can output, ascending.
    pub fn image(&self, problem: &LearningProblem) -> Vec<usize> {
        let mut seen = vec![false; problem.n_hypotheses()];
        match &self.policy {
            Policy::Erm => {
                for c in compositions(self.m as u64, problem.n_points()) {
                    seen[problem.erm_counts(&c)] = true;
                }
            }
            Policy::Table(t) => t.iter().for_each(|&h| seen[h] = true),
        }
        (0..seen.len()).filter(|&h| seen[h]).collect()
    }
}

/// All ways to write `total` as an ordered sum of `parts` nonnegative
/// integers, lexicographically.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(left - c, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Every table learner of sample size `m`, in lexicographic order of tables.
pub fn enumerate_learners(
    problem: &LearningProblem,
    m: usize,
    cap: u64,
) -> Result<impl Iterator<Item = Learner>> {
    let samples = sample_count(problem.n_points(), m, cap)?;
    let k = problem.n_hypotheses() as u64;
    let total = u32::try_from(samples)
        .ok()
        .and_then(|s| k.checked_pow(s))
        .filter(|&t| t <= cap);
    let Some(total) = total else {
        return Err(Error::ResourceExceeded {
            resource: Resource::Enumeration,
            limit: cap,
            observed: u64::MAX,
        });
    };
    Ok((0..total).map(move |i| Learner {
        m,
        policy: Policy::Table(sample_at(k as usize, samples as usize, i)),
    }))
}
