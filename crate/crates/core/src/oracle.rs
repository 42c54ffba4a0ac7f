//! Brute-force falsifier. Computes violation probabilities by enumerating
//! samples (or, for ERM, sorted samples weighted by their orderings) at a
//! concrete rational distribution, sharing nothing with the polynomial
//! pipeline beyond the learner under test.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::Rational;
use crate::error::{Error, Resource, Result};
use crate::model::{Learner, LearningProblem, Policy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub grid_denominator: u64,
    pub random_trials: u64,
    pub seed: u64,
    /// Bound on `n^m`.
    pub sample_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_denominator: 64,
            random_trials: 200,
            seed: 0,
            sample_cap: 1 << 20,
        }
    }
}

/// ERM runs over every sample up to this many; beyond, over count vectors.
const FULL_ERM_SAMPLES: u64 = 1 << 12;

/// Learner outputs over all samples of length `m`: either every sample
/// individually, or (for ERM beyond the enumeration cap) one representative
/// per count vector with its number of orderings. ERM past a few thousand
/// samples always takes the count-vector route.
enum SampleTable {
    Samples(Vec<(Vec<usize>, usize)>),
    Counts(Vec<(Vec<u64>, BigUint, usize)>),
}

impl SampleTable {
    fn build(problem: &LearningProblem, learner: &Learner, cap: u64) -> Result<Self> {
        let n = problem.n_points();
        let total = (n as u64).checked_pow(learner.m as u32).filter(|&t| t <= cap);
        match (total, &learner.policy) {
            (Some(t), Policy::Erm) if t > FULL_ERM_SAMPLES => Self::count_vectors(problem, learner, cap),
            (Some(_), _) => Ok(Self::all_samples(problem, learner)),
            (None, Policy::Erm) => Self::count_vectors(problem, learner, cap),
            (None, Policy::Table(_)) => Err(Error::ResourceExceeded {
                resource: Resource::Enumeration,
                limit: cap,
                observed: u64::MAX,
            }),
        }
    }

    fn all_samples(problem: &LearningProblem, learner: &Learner) -> Self {
        let n = problem.n_points();
        let mut samples = Vec::new();
        let mut cur = vec![0usize; learner.m];
        loop {
            samples.push((cur.clone(), learner.apply(problem, &cur)));
            // odometer, last draw fastest
            let Some(pos) = cur.iter().rposition(|&z| z + 1 < n) else {
                break;
            };
            cur[pos] += 1;
            cur[pos + 1..].iter_mut().for_each(|z| *z = 0);
        }
        SampleTable::Samples(samples)
    }

    /// ERM only looks at counts, so a sorted representative stands for all
    /// orderings of it.
    fn count_vectors(problem: &LearningProblem, learner: &Learner, cap: u64) -> Result<Self> {
        let n = problem.n_points();
        let m = learner.m;
        let mut out = Vec::new();
        let mut counts = vec![0u64; n];
        counts[n - 1] = m as u64;
        loop {
            if out.len() as u64 >= cap {
                return Err(Error::ResourceExceeded {
                    resource: Resource::Enumeration,
                    limit: cap,
                    observed: cap + 1,
                });
            }
            let rep: Vec<usize> = counts
                .iter()
                .enumerate()
                .flat_map(|(z, &c)| std::iter::repeat_n(z, c as usize))
                .collect();
            let h = learner.apply(problem, &rep);
            out.push((counts.clone(), orderings(&counts), h));
            // next composition of m into n parts, lexicographically
            let Some(pos) = (0..n - 1).rev().find(|&i| counts[i + 1..].iter().sum::<u64>() > 0) else {
                break;
            };
            let rest: u64 = counts[pos + 1..].iter().sum();
            counts[pos] += 1;
            counts[pos + 1..].iter_mut().for_each(|c| *c = 0);
            counts[n - 1] = rest - 1;
        }
        Ok(SampleTable::Counts(out))
    }

    fn violation_prob(&self, problem: &LearningProblem, eps: &Rational, p: &[Rational]) -> Rational {
        let risks: Vec<Rational> = (0..problem.n_hypotheses())
            .map(|h| {
                problem
                    .loss_row(h)
                    .iter()
                    .zip(p)
                    .map(|(l, w)| l * w)
                    .fold(Rational::zero(), |a, b| a + b)
            })
            .collect();
        let best = risks.iter().min().expect("nonempty").clone();
        let bad: Vec<bool> = risks.iter().map(|r| *r > &best + eps).collect();
        let mut total = Rational::zero();
        match self {
            SampleTable::Samples(samples) => {
                for (s, h) in samples {
                    if bad[*h] {
                        total += s.iter().fold(Rational::one(), |acc, &z| acc * &p[z]);
                    }
                }
            }
            SampleTable::Counts(groups) => {
                for (c, mult, h) in groups {
                    if bad[*h] {
                        let prob = c
                            .iter()
                            .zip(p)
                            .fold(Rational::one(), |acc, (&k, w)| acc * num_traits::pow(w.clone(), k as usize));
                        total += prob * Rational::from_integer(BigInt::from(mult.clone()));
                    }
                }
            }
        }
        total
    }
}

/// Number of distinct orderings of a sample with these counts.
fn orderings(counts: &[u64]) -> BigUint {
    let mut num = BigUint::one();
    let mut placed = 0u64;
    for &c in counts {
        for i in 1..=c {
            placed += 1;
            num = num * placed / i;
        }
    }
    num
}

fn check_distribution(problem: &LearningProblem, p: &[Rational]) -> Result<()> {
    if p.len() != problem.n_points() {
        return Err(Error::InvalidInput(format!(
            "distribution has {} entries for {} points",
            p.len(),
            problem.n_points()
        )));
    }
    if p.iter().any(|w| *w < Rational::zero()) {
        return Err(Error::InvalidInput("negative probability".into()));
    }
    if p.iter().fold(Rational::zero(), |a, b| a + b) != Rational::one() {
        return Err(Error::InvalidInput("probabilities do not sum to 1".into()));
    }
    Ok(())
}

/// Probability under `p^m` that the learner outputs a hypothesis whose risk
/// exceeds the best risk in the class by more than `eps`.
pub fn exact_violation_prob(
    problem: &LearningProblem,
    learner: &Learner,
    eps: &Rational,
    p: &[Rational],
    cap: u64,
) -> Result<Rational> {
    check_distribution(problem, p)?;
    Ok(SampleTable::build(problem, learner, cap)?.violation_prob(problem, eps, p))
}

/// Lattice points of the simplex with denominator `d`, lexicographically.
pub fn simplex_grid(n: usize, d: u64) -> Vec<Vec<Rational>> {
    fn rec(left: u64, slots: usize, d: u64, cur: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        if slots == 1 {
            cur.push(Rational::new(left.into(), d.into()));
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(Rational::new(k.into(), d.into()));
            rec(left - k, slots - 1, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, n, d, &mut Vec::new(), &mut out);
    out
}

fn random_points(n: usize, trials: u64, seed: u64) -> Vec<Vec<Rational>> {
    const SCALE: u64 = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials as usize);
    while (out.len() as u64) < trials {
        let w: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=SCALE)).collect();
        let total: u64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        out.push(w.iter().map(|&x| Rational::new(x.into(), total.into())).collect());
    }
    out
}

/// First distribution, grid points before random ones, whose violation
/// probability exceeds `delta`. Finding nothing proves nothing.
pub fn falsify(
    problem: &LearningProblem,
    learner: &Learner,
    eps: &Rational,
    delta: &Rational,
    cfg: &SearchConfig,
) -> Result<Option<Vec<Rational>>> {
    if cfg.grid_denominator == 0 {
        return Err(Error::InvalidInput("grid denominator must be positive".into()));
    }
    let table = SampleTable::build(problem, learner, cfg.sample_cap)?;
    let n = problem.n_points();
    let candidates = simplex_grid(n, cfg.grid_denominator)
        .into_iter()
        .chain(random_points(n, cfg.random_trials, cfg.seed));
    let candidates: Vec<Vec<Rational>> = candidates.collect();
    // find_first keeps the lowest index regardless of scheduling
    Ok(candidates
        .into_par_iter()
        .find_first(|p| table.violation_prob(problem, eps, p) > *delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    const CAP: u64 = 1 << 20;

    #[test]
    fn violation_probability_examples() {
        let p = LearningProblem::binary_emx();
        let erm = Learner::erm(1);
        assert_eq!(
            exact_violation_prob(&p, &erm, &rat(1, 4), &[rat(3, 10), rat(7, 10)], CAP).unwrap(),
            rat(3, 10)
        );
        assert_eq!(
            exact_violation_prob(&p, &erm, &rat(1, 3), &[rat(1, 2), rat(1, 2)], CAP).unwrap(),
            int(0)
        );
        assert_eq!(
            exact_violation_prob(&p, &erm, &int(1), &[rat(1, 10), rat(9, 10)], CAP).unwrap(),
            int(0)
        );
    }

    #[test]
    fn always_true_event_has_probability_one() {
        let p = LearningProblem::emx(&["a", "b", "c"], &[("x", &[0]), ("y", &[1, 2])]).unwrap();
        for m in 1..4 {
            let v = exact_violation_prob(&p, &Learner::erm(m), &int(-1), &[rat(1, 6), rat(1, 3), rat(1, 2)], CAP);
            assert_eq!(v.unwrap(), int(1));
        }
    }

    #[test]
    fn rejects_non_distributions() {
        let p = LearningProblem::binary_emx();
        let erm = Learner::erm(1);
        assert!(exact_violation_prob(&p, &erm, &int(0), &[rat(1, 2), rat(1, 3)], CAP).is_err());
        assert!(exact_violation_prob(&p, &erm, &int(0), &[int(2), int(-1)], CAP).is_err());
        assert!(exact_violation_prob(&p, &erm, &int(0), &[int(1)], CAP).is_err());
    }

    #[test]
    fn falsify_examples() {
        let p = LearningProblem::binary_emx();
        let erm = Learner::erm(1);
        let cfg = SearchConfig {
            grid_denominator: 20,
            random_trials: 0,
            ..SearchConfig::default()
        };
        let hit = falsify(&p, &erm, &rat(1, 4), &rat(1, 5), &cfg).unwrap().unwrap();
        assert!(hit[0] > rat(1, 5) && hit[0] < rat(3, 8));
        // lowest grid point in the violating range
        assert_eq!(hit[0], rat(1, 4));

        let cfg = SearchConfig::default();
        assert!(falsify(&p, &erm, &rat(1, 3), &rat(1, 3), &cfg).unwrap().is_none());
        assert!(falsify(&p, &erm, &rat(1, 100), &int(1), &cfg).unwrap().is_none());
    }

    #[test]
    fn count_vectors_match_full_enumeration() {
        let p = LearningProblem::emx(&["a", "b", "c"], &[("x", &[0]), ("y", &[1, 2]), ("z", &[2])]).unwrap();
        let dist = [rat(1, 7), rat(2, 7), rat(4, 7)];
        for m in 1..7 {
            let erm = Learner::erm(m);
            let full = SampleTable::all_samples(&p, &erm).violation_prob(&p, &rat(1, 10), &dist);
            let grouped = SampleTable::count_vectors(&p, &erm, CAP)
                .unwrap()
                .violation_prob(&p, &rat(1, 10), &dist);
            assert_eq!(full, grouped, "m = {m}");
        }
    }

    #[test]
    fn grid_size() {
        assert_eq!(simplex_grid(3, 4).len(), 15);
        assert_eq!(simplex_grid(1, 7), vec![vec![int(1)]]);
    }
}
