//! Violation systems: polynomial sign conditions over the simplex whose
//! satisfiability says a learner fails against a comparison hypothesis.
//!
//! The excess-risk condition of a sample only depends on the hypothesis the
//! learner outputs, so instead of labelling systems by sets of samples they
//! are labelled by sets `B` of output hypotheses. `direct_a_systems` keeps
//! the sample-set form for cross-checking.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{MPoly, Rational};
use crate::error::{Error, Resource, Result};
use crate::model::{compositions, counts_of, sample_at, sample_count, Learner, LearningProblem, Policy};
use crate::realdecide::{Relation, SignCondition, System};

#[derive(Debug, Clone)]
pub struct ViolationInstance {
    pub problem: LearningProblem,
    pub learner: Learner,
    pub h_prime: usize,
    pub eps: Rational,
    pub delta: Rational,
}

impl ViolationInstance {
    pub fn new(
        problem: LearningProblem,
        learner: Learner,
        h_prime: usize,
        eps: Rational,
        delta: Rational,
    ) -> Result<Self> {
        learner.validate(&problem)?;
        if h_prime >= problem.n_hypotheses() {
            return Err(Error::InvalidInput(format!("no hypothesis {h_prime}")));
        }
        check_positive("eps", &eps)?;
        check_positive("delta", &delta)?;
        Ok(ViolationInstance {
            problem,
            learner,
            h_prime,
            eps,
            delta,
        })
    }

    pub fn m(&self) -> usize {
        self.learner.m
    }
}

pub(crate) fn check_positive(name: &str, v: &Rational) -> Result<()> {
    if *v > Rational::zero() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive")))
    }
}

/// One violation system together with its hypothesis label set.
#[derive(Debug, Clone)]
pub struct LabeledSystem {
    /// Output hypotheses whose excess risk is required to exceed `eps`.
    pub b: Vec<usize>,
    pub system: System,
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn multinomial(counts: &[u64]) -> BigInt {
    let mut total = 0;
    let mut acc = BigInt::one();
    for &c in counts {
        total += c;
        acc *= binomial(total, c);
    }
    acc
}

/// Powers of the last point's mass, `0..=m`.
fn last_mass_powers(problem: &LearningProblem, m: usize) -> Vec<MPoly> {
    let s = problem.mass(problem.n_points() - 1);
    let mut out = vec![MPoly::one(problem.nvars())];
    for i in 0..m {
        out.push(&out[i] * &s);
    }
    out
}

/// `mult * prod_z mass(z)^counts[z]`.
fn sample_monomial(problem: &LearningProblem, pows: &[MPoly], counts: &[u64], mult: &BigInt) -> MPoly {
    let k = problem.nvars();
    let exps: Vec<u32> = counts[..k].iter().map(|&c| c as u32).collect();
    let mono = MPoly::monomial(exps, Rational::from_integer(mult.clone()));
    &mono * &pows[counts[k] as usize]
}

/// For each hypothesis `h`, the probability over i.i.d. samples that the
/// learner outputs `h`, as a polynomial in the free simplex variables.
///
/// ERM is handled through per-point count vectors; tables are enumerated
/// sample by sample, subject to `cap` on `n^m`.
pub fn output_polynomials(problem: &LearningProblem, learner: &Learner, cap: u64) -> Result<Vec<MPoly>> {
    let n = problem.n_points();
    let m = learner.m;
    // (hypothesis, counts) -> number of samples
    let mut groups: BTreeMap<(usize, Vec<u64>), BigInt> = BTreeMap::new();
    match &learner.policy {
        Policy::Erm => {
            for c in compositions(m as u64, n) {
                let h = problem.erm_counts(&c);
                let mult = multinomial(&c);
                groups.insert((h, c), mult);
            }
        }
        Policy::Table(t) => {
            let total = sample_count(n, m, cap)?;
            for i in 0..total {
                let c = counts_of(n, &sample_at(n, m, i));
                *groups.entry((t[i as usize], c)).or_default() += 1;
            }
        }
    }
    let pows = last_mass_powers(problem, m);
    let mut out = vec![MPoly::zero(problem.nvars()); problem.n_hypotheses()];
    for ((h, c), mult) in &groups {
        out[*h] = &out[*h] + &sample_monomial(problem, &pows, c, mult);
    }
    Ok(out)
}

/// Probability that the learner's output lies in `b`.
pub fn delta_polynomial(problem: &LearningProblem, learner: &Learner, b: &[usize], cap: u64) -> Result<MPoly> {
    let outs = output_polynomials(problem, learner, cap)?;
    Ok(b.iter().fold(MPoly::zero(problem.nvars()), |acc, &h| &acc + &outs[h]))
}

/// `excess(h) = risk(h) - risk(h') - eps`.
fn excess_form(inst: &ViolationInstance, h: usize) -> MPoly {
    let p = &inst.problem;
    let diff = &p.risk_form(h) - &p.risk_form(inst.h_prime);
    &diff - &MPoly::constant(p.nvars(), inst.eps.clone())
}

fn simplex_conditions(problem: &LearningProblem) -> Vec<SignCondition> {
    (0..problem.n_points())
        .map(|z| SignCondition::new(problem.mass(z), Relation::Ge))
        .collect()
}

/// One system per subset `B` of the learner's image, subsets in binary
/// counting order over the ascending image (so `B = {}` comes first).
pub fn violation_systems(inst: &ViolationInstance, cap: u64) -> Result<Vec<LabeledSystem>> {
    let p = &inst.problem;
    let image = inst.learner.image(p);
    if image.len() >= 32 {
        return Err(Error::ResourceExceeded {
            resource: Resource::Enumeration,
            limit: 31,
            observed: image.len() as u64,
        });
    }
    let outs = output_polynomials(p, &inst.learner, cap)?;
    let excess: Vec<MPoly> = image.iter().map(|&h| excess_form(inst, h)).collect();
    let delta = MPoly::constant(p.nvars(), inst.delta.clone());
    let mut systems = Vec::with_capacity(1 << image.len());
    for mask in 0u32..1 << image.len() {
        let mut conds = Vec::new();
        let mut b = Vec::new();
        let mut mass = MPoly::zero(p.nvars());
        for (i, &h) in image.iter().enumerate() {
            if mask & (1 << i) != 0 {
                b.push(h);
                mass = &mass + &outs[h];
                conds.push(SignCondition::new(excess[i].clone(), Relation::Gt));
            } else {
                conds.push(SignCondition::new(excess[i].clone(), Relation::Le));
            }
        }
        conds.push(SignCondition::new(&mass - &delta, Relation::Gt));
        conds.extend(simplex_conditions(p));
        systems.push(LabeledSystem {
            b,
            system: System::new(p.variable_names(), conds)?,
        });
    }
    Ok(systems)
}

/// One system per set `A` of samples, written sample by sample: every
/// sample in `A` has excess risk, every other sample has none, and `A` has
/// probability above `delta`. Exponential in `n^m`; `cap` bounds `n^m`.
pub fn direct_a_systems(inst: &ViolationInstance, cap: u64) -> Result<Vec<System>> {
    let p = &inst.problem;
    let (n, m) = (p.n_points(), inst.m());
    let total = sample_count(n, m, cap.min(31))?;
    let pows = last_mass_powers(p, m);
    let samples: Vec<(MPoly, MPoly)> = (0..total)
        .map(|i| {
            let s = sample_at(n, m, i);
            let h = inst.learner.apply(p, &s);
            let prob = sample_monomial(p, &pows, &counts_of(n, &s), &BigInt::one());
            (excess_form(inst, h), prob)
        })
        .collect();
    let delta = MPoly::constant(p.nvars(), inst.delta.clone());
    let mut systems = Vec::with_capacity(1 << total);
    for mask in 0u32..1 << total {
        let mut conds = Vec::new();
        let mut mass = MPoly::zero(p.nvars());
        for (i, (ex, prob)) in samples.iter().enumerate() {
            if mask & (1 << i) != 0 {
                mass = &mass + prob;
                conds.push(SignCondition::new(ex.clone(), Relation::Gt));
            } else {
                conds.push(SignCondition::new(ex.clone(), Relation::Le));
            }
        }
        conds.push(SignCondition::new(&mass - &delta, Relation::Gt));
        conds.extend(simplex_conditions(p));
        systems.push(System::new(p.variable_names(), conds)?);
    }
    Ok(systems)
}
