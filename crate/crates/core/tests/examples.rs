use pacdecide::algebra::rat;
use pacdecide::driver::{hoeffding_bound, is_learner, sample_complexity, ComplexityQuery, Config, LearnerPolicy};
use pacdecide::model::{Learner, LearningProblem};
use pacdecide::oracle::{exact_violation_prob, falsify, SearchConfig};

const CAP: u64 = 1 << 20;

#[test]
fn two_point_problem_has_complexity_one() {
    let q = ComplexityQuery {
        problem: LearningProblem::binary_emx(),
        eps: rat(1, 3),
        delta: rat(1, 3),
        policy: LearnerPolicy::ErmOnly,
        verify_range: false,
    };
    let r = sample_complexity(&q, &Config::default()).unwrap();
    assert_eq!(r.m, 1);
    assert_eq!(r.hoeffding, 45);
}

#[test]
fn hoeffding_values() {
    assert_eq!(hoeffding_bound(&rat(1, 3), &rat(1, 3), 2).unwrap(), 45);
    assert_eq!(hoeffding_bound(&rat(1, 10), &rat(1, 100), 2).unwrap(), 1199);
}

#[test]
fn exact_violation_examples() {
    let p = LearningProblem::binary_emx();
    let erm = Learner::erm(1);
    assert_eq!(
        exact_violation_prob(&p, &erm, &rat(1, 4), &[rat(3, 10), rat(7, 10)], CAP).unwrap(),
        rat(3, 10)
    );
    assert_eq!(
        exact_violation_prob(&p, &erm, &rat(1, 3), &[rat(1, 2), rat(1, 2)], CAP).unwrap(),
        rat(0, 1)
    );
    assert_eq!(
        exact_violation_prob(&p, &erm, &rat(1, 1), &[rat(1, 5), rat(4, 5)], CAP).unwrap(),
        rat(0, 1)
    );
}

#[test]
fn falsifier_examples() {
    let p = LearningProblem::binary_emx();
    let erm = Learner::erm(1);
    let grid = |d| SearchConfig {
        grid_denominator: d,
        random_trials: 0,
        ..SearchConfig::default()
    };
    let hit = falsify(&p, &erm, &rat(1, 4), &rat(1, 5), &grid(20)).unwrap().unwrap();
    assert!(hit[0] > rat(1, 5) && hit[0] < rat(3, 8), "{hit:?}");
    assert!(falsify(&p, &erm, &rat(1, 3), &rat(1, 3), &grid(64)).unwrap().is_none());
    assert!(falsify(&p, &erm, &rat(1, 100), &rat(1, 1), &SearchConfig::default())
        .unwrap()
        .is_none());
}

#[test]
fn negative_verdict_witness_reverifies() {
    let p = LearningProblem::binary_emx();
    let v = is_learner(&p, &Learner::erm(1), &rat(1, 4), &rat(1, 5), &Config::default()).unwrap();
    assert!(!v.is_learner);
    let c = v.counterexample.unwrap();
    let prob = exact_violation_prob(&p, &Learner::erm(1), &rat(1, 4), &c.witness, CAP).unwrap();
    assert!(prob > rat(1, 5));
    assert_eq!(prob, c.violation_prob);
}

#[test]
fn erm_is_not_monotone_in_sample_size() {
    // ties at even m go to the first hypothesis and can make ERM fail
    let p = LearningProblem::binary_emx();
    let cfg = Config::default();
    let at = |m| is_learner(&p, &Learner::erm(m), &rat(1, 4), &rat(1, 3), &cfg).unwrap().is_learner;
    assert!(at(3));
    assert!(!at(4));
}
