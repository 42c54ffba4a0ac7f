//! Learner verdicts and exact sample complexity.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::rational::frac;
use crate::algebra::Rational;
use crate::error::{Error, Resource, Result};
use crate::model::{enumerate_learners, Learner, LearningProblem};
use crate::oracle::exact_violation_prob;
use crate::realdecide::{decide_with, DecideStats, Limits};
use crate::systems::{check_positive, violation_systems, ViolationInstance};

/// Budgets shared by every decision a query makes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub limits: Limits,
    /// Bound on enumerated samples (`n^m`) and learners (`|H|^(n^m)`).
    pub enum_cap: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            limits: Limits::default(),
            enum_cap: 1 << 20,
        }
    }
}

/// Interval `[lo, hi]` around `ln x` for rational `x > 0`, using `terms`
/// terms of the `atanh` series.
fn ln_bounds(x: &Rational, terms: u32) -> (Rational, Rational) {
    // x = 2^k * y with y in [1, 2)
    let two = Rational::from_integer(2.into());
    let mut y = x.clone();
    let mut k: i64 = 0;
    while y >= two {
        y /= &two;
        k += 1;
    }
    while y < Rational::one() {
        y *= &two;
        k -= 1;
    }
    // ln y = 2 atanh((y-1)/(y+1)), ln 2 = 2 atanh(1/3)
    let (ly_lo, ly_hi) = atanh2_bounds(&((&y - Rational::one()) / (&y + Rational::one())), terms);
    let (l2_lo, l2_hi) = atanh2_bounds(&frac(1, 3), terms);
    let kr = Rational::from_integer(k.into());
    if k >= 0 {
        (&kr * l2_lo + ly_lo, &kr * l2_hi + ly_hi)
    } else {
        (&kr * l2_hi + ly_lo, &kr * l2_lo + ly_hi)
    }
}

/// Bounds on `2 atanh(t)` for `0 <= t <= 1/3`.
fn atanh2_bounds(t: &Rational, terms: u32) -> (Rational, Rational) {
    let t2 = t * t;
    let mut pow = t.clone();
    let mut sum = Rational::zero();
    for j in 0..terms {
        sum += &pow / Rational::from_integer((2 * j + 1).into());
        pow *= &t2;
    }
    // remaining terms are at most pow / (2 terms + 1) / (1 - t^2)
    let tail = &pow / Rational::from_integer((2 * terms + 1).into()) / (Rational::one() - &t2);
    let two = Rational::from_integer(2.into());
    (&sum * &two, (sum + tail) * two)
}

/// `ceil(2 ln(2 h_size / delta) / eps^2)`, at least 1.
pub fn hoeffding_bound(eps: &Rational, delta: &Rational, h_size: usize) -> Result<u64> {
    check_positive("eps", eps)?;
    check_positive("delta", delta)?;
    if h_size == 0 {
        return Err(Error::InvalidInput("hypothesis count must be positive".into()));
    }
    let x = Rational::from_integer((2 * h_size).into()) / delta;
    if x <= Rational::one() {
        return Ok(1);
    }
    // ln x is irrational for rational x != 1, so the ceiling is eventually
    // pinned down by narrowing
    let scale = Rational::from_integer(2.into()) / (eps * eps);
    let mut terms = 16;
    loop {
        let (lo, hi) = ln_bounds(&x, terms);
        let (lo, hi) = (lo * &scale, hi * &scale);
        let (clo, chi) = (lo.ceil(), hi.ceil());
        if clo == chi {
            let c = clo.to_integer().max(BigInt::one());
            return c.to_u64().ok_or_else(|| Error::InvalidInput("bound does not fit in 64 bits".into()));
        }
        terms *= 2;
    }
}

/// A violating distribution of a learner, as found by the decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub h_prime: usize,
    /// Output hypotheses with excess risk above `eps`.
    pub b: Vec<usize>,
    /// Probability of each point.
    pub witness: Vec<Rational>,
    /// Exact violation probability at the witness, recomputed by the oracle.
    pub violation_prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerVerdict {
    pub is_learner: bool,
    pub counterexample: Option<Counterexample>,
    pub stats: DecideStats,
    /// Systems decided before the verdict was settled.
    pub systems: u64,
}

/// Decides whether `learner` is an `(m, eps, delta)`-learner over every
/// distribution on the problem's points.
///
/// Systems are decided in parallel in chunks, but results are scanned in
/// the fixed `(h', B)` order: the first SAT system or error settles the
/// verdict, so the outcome does not depend on scheduling.
pub fn is_learner(
    problem: &LearningProblem,
    learner: &Learner,
    eps: &Rational,
    delta: &Rational,
    cfg: &Config,
) -> Result<LearnerVerdict> {
    let mut jobs = Vec::new();
    for h_prime in 0..problem.n_hypotheses() {
        let inst = ViolationInstance::new(problem.clone(), learner.clone(), h_prime, eps.clone(), delta.clone())?;
        for s in violation_systems(&inst, cfg.enum_cap)? {
            jobs.push((h_prime, s));
        }
    }
    let chunk = 2 * rayon::current_num_threads().max(1);
    let mut stats = DecideStats::default();
    let mut decided = 0;
    for batch in jobs.chunks(chunk) {
        let results: Vec<_> = batch
            .par_iter()
            .map(|(_, s)| decide_with(&s.system, &cfg.limits))
            .collect();
        for ((h_prime, s), r) in batch.iter().zip(results) {
            let v = r?;
            decided += 1;
            stats.absorb(&v.stats);
            if !v.is_sat() {
                continue;
            }
            let Some(q) = v.witness else {
                // only reachable when closed linear conditions were not split
                return Err(Error::ResourceExceeded {
                    resource: Resource::FaceSplit,
                    limit: cfg.limits.max_face_split as u64,
                    observed: s.system.conditions().len() as u64,
                });
            };
            let mut witness = q.clone();
            witness.push(Rational::one() - q.iter().fold(Rational::zero(), |a, b| a + b));
            let prob = exact_violation_prob(problem, learner, eps, &witness, cfg.enum_cap)?;
            assert!(
                prob > *delta,
                "witness {witness:?} of system B = {:?} has violation probability {prob} <= {delta}",
                s.b
            );
            return Ok(LearnerVerdict {
                is_learner: false,
                counterexample: Some(Counterexample {
                    h_prime: *h_prime,
                    b: s.b.clone(),
                    witness,
                    violation_prob: prob,
                }),
                stats,
                systems: decided,
            });
        }
    }
    Ok(LearnerVerdict {
        is_learner: true,
        counterexample: None,
        stats,
        systems: decided,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnerPolicy {
    /// Empirical risk minimization with lowest-index tie-breaking.
    ErmOnly,
    /// Any deterministic learner; ERM is tried first at each `m`.
    ExistsLearner,
}

#[derive(Debug, Clone)]
pub struct ComplexityQuery {
    pub problem: LearningProblem,
    pub eps: Rational,
    pub delta: Rational,
    pub policy: LearnerPolicy,
    /// ErmOnly: after finding the answer, also decide every larger `m` up to
    /// the Hoeffding bound and report the failures.
    pub verify_range: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityReport {
    pub m: usize,
    pub hoeffding: u64,
    /// Sample sizes above `m` (up to the bound) where ERM is not a learner;
    /// only filled when the range was verified.
    pub non_monotone: Vec<usize>,
    /// A learner achieving `m` (ERM, or a table under ExistsLearner).
    pub learner: Learner,
    pub stats: DecideStats,
    pub systems: u64,
}

fn aborted(completed_through: usize, e: Error) -> Error {
    Error::ScanAborted {
        completed_through,
        source: Box::new(e),
    }
}

/// Least sample size admitting a learner under the query's policy.
pub fn sample_complexity(q: &ComplexityQuery, cfg: &Config) -> Result<ComplexityReport> {
    let bound = hoeffding_bound(&q.eps, &q.delta, q.problem.n_hypotheses())?;
    let mut stats = DecideStats::default();
    let mut systems = 0;
    let check = |l: &Learner, stats: &mut DecideStats, systems: &mut u64| -> Result<bool> {
        let v = is_learner(&q.problem, l, &q.eps, &q.delta, cfg)?;
        stats.absorb(&v.stats);
        *systems += v.systems;
        Ok(v.is_learner)
    };
    for m in 1..=bound as usize {
        let erm = Learner::erm(m);
        let found = if check(&erm, &mut stats, &mut systems).map_err(|e| aborted(m - 1, e))? {
            Some(erm)
        } else if q.policy == LearnerPolicy::ExistsLearner {
            let mut hit = None;
            for l in enumerate_learners(&q.problem, m, cfg.enum_cap).map_err(|e| aborted(m - 1, e))? {
                if check(&l, &mut stats, &mut systems).map_err(|e| aborted(m - 1, e))? {
                    hit = Some(l);
                    break;
                }
            }
            hit
        } else {
            None
        };
        let Some(learner) = found else { continue };
        let mut non_monotone = Vec::new();
        if q.verify_range && q.policy == LearnerPolicy::ErmOnly {
            for m2 in m + 1..=bound as usize {
                if !check(&Learner::erm(m2), &mut stats, &mut systems).map_err(|e| aborted(m2 - 1, e))? {
                    non_monotone.push(m2);
                }
            }
        }
        return Ok(ComplexityReport {
            m,
            hoeffding: bound,
            non_monotone,
            learner,
            stats,
            systems,
        });
    }
    // ERM at the Hoeffding bound is always a learner
    unreachable!("no learner up to the Hoeffding bound {bound}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn hoeffding_examples() {
        assert_eq!(hoeffding_bound(&rat(1, 3), &rat(1, 3), 2).unwrap(), 45);
        assert_eq!(hoeffding_bound(&rat(1, 10), &rat(1, 100), 2).unwrap(), 1199);
        assert_eq!(hoeffding_bound(&int(1), &int(1), 2).unwrap(), 3);
        assert_eq!(hoeffding_bound(&int(1), &int(4), 2).unwrap(), 1);
        assert_eq!(hoeffding_bound(&int(10), &int(1), 1).unwrap(), 1);
        assert!(hoeffding_bound(&int(0), &int(1), 1).is_err());
    }

    #[test]
    fn ln_bounds_bracket_known_values() {
        let (lo, hi) = ln_bounds(&int(12), 30);
        // ln 12 = 2.484906649788...
        assert!(lo < rat(2484906649789, 1_000_000_000_000));
        assert!(hi > rat(2484906649788, 1_000_000_000_000));
        let (lo, hi) = ln_bounds(&rat(1, 3), 30);
        assert!(lo < rat(-10986122886, 10_000_000_000) && hi > rat(-10986122887, 10_000_000_000));
    }

    #[test]
    fn small_example_is_learner() {
        let p = LearningProblem::binary_emx();
        let v = is_learner(&p, &Learner::erm(1), &rat(1, 3), &rat(1, 3), &Config::default()).unwrap();
        assert!(v.is_learner);
    }

    #[test]
    fn negative_verdict_carries_verified_witness() {
        let p = LearningProblem::binary_emx();
        let v = is_learner(&p, &Learner::erm(1), &rat(1, 4), &rat(1, 5), &Config::default()).unwrap();
        assert!(!v.is_learner);
        let c = v.counterexample.unwrap();
        assert!(c.violation_prob > rat(1, 5));
        let q = &c.witness[0];
        assert!((*q > rat(1, 5) && *q < rat(3, 8)) || (*q > rat(5, 8) && *q < rat(4, 5)));
    }

    #[test]
    fn small_spread_means_every_learner_succeeds() {
        let p = LearningProblem::new(
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into()],
            vec![vec![rat(1, 2); 2]; 2],
        )
        .unwrap();
        for l in enumerate_learners(&p, 1, 100).unwrap() {
            assert!(is_learner(&p, &l, &rat(1, 2), &rat(1, 10), &Config::default()).unwrap().is_learner);
        }
    }

    #[test]
    fn complexity_examples() {
        let q = ComplexityQuery {
            problem: LearningProblem::binary_emx(),
            eps: rat(1, 3),
            delta: rat(1, 3),
            policy: LearnerPolicy::ErmOnly,
            verify_range: false,
        };
        assert_eq!(sample_complexity(&q, &Config::default()).unwrap().m, 1);
        let q = ComplexityQuery { eps: rat(3, 2), ..q };
        assert_eq!(sample_complexity(&q, &Config::default()).unwrap().m, 1);
    }

    #[test]
    fn exists_learner_never_exceeds_erm() {
        for delta in [rat(1, 3), rat(2, 5)] {
            let q = ComplexityQuery {
                problem: LearningProblem::binary_emx(),
                eps: rat(1, 4),
                delta,
                policy: LearnerPolicy::ErmOnly,
                verify_range: false,
            };
            let erm = sample_complexity(&q, &Config::default()).unwrap();
            let q = ComplexityQuery {
                policy: LearnerPolicy::ExistsLearner,
                ..q
            };
            let any = sample_complexity(&q, &Config::default()).unwrap();
            assert!(any.m <= erm.m);
        }
    }

    #[test]
    fn learner_enumeration_respects_cap() {
        let q = ComplexityQuery {
            problem: LearningProblem::binary_emx(),
            eps: rat(1, 4),
            delta: rat(1, 5),
            policy: LearnerPolicy::ExistsLearner,
            verify_range: false,
        };
        let cfg = Config {
            enum_cap: 300,
            ..Config::default()
        };
        let e = sample_complexity(&q, &cfg).unwrap_err();
        assert!(matches!(e, Error::ScanAborted { .. }));
        assert_eq!(e.resource().map(|r| r.0), Some(Resource::Enumeration));
    }

    #[test]
    fn cell_budget_surfaces_as_resource_error() {
        let p = LearningProblem::binary_emx();
        let cfg = Config {
            limits: Limits {
                max_cells: 1,
                ..Limits::default()
            },
            ..Config::default()
        };
        let e = is_learner(&p, &Learner::erm(2), &rat(1, 4), &rat(1, 5), &cfg).unwrap_err();
        assert!(e.is_resource());
    }
}
