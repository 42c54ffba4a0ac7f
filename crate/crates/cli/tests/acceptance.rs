//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are printed even when everything passes.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use pacdecide::algebra::{parse_rational, rat, Rational, UPoly};
use pacdecide::driver::{hoeffding_bound, is_learner, Config};
use pacdecide::model::{sample_count, Learner, LearningProblem};
use pacdecide::oracle::{exact_violation_prob, falsify, SearchConfig};
use pacdecide::realdecide::{count_roots_in, decide_conjunction, isolate_real_roots};
use pacdecide::systems::{direct_a_systems, violation_systems, ViolationInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_pacdecide"))
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report)
}

fn rational_field(v: &Value) -> Rational {
    parse_rational(v.as_str().expect("rational string")).unwrap()
}

fn witness_vector(report: &Value, problem: &LearningProblem) -> Vec<Rational> {
    problem
        .points()
        .iter()
        .map(|z| rational_field(&report["witness"][z]))
        .collect()
}

fn small_example() -> Result<(), String> {
    let (code, r) = cli(&["complexity", "--problem", "binemx", "--eps", "1/3", "--delta", "1/3"]);
    if code != 0 || r["value"] != 1 {
        return Err(format!("complexity: exit {code}, value {}", r["value"]));
    }
    let (code, r) = cli(&["decide", "--problem", "binemx", "--learner", "erm", "--m", "1", "--eps", "1/3", "--delta", "1/3"]);
    if code != 0 || r["status"] != "learner" {
        return Err(format!("decide: exit {code}, status {}", r["status"]));
    }
    Ok(())
}

fn hoeffding() -> Result<(), String> {
    for (eps, delta, want) in [("1/3", "1/3", 45u64), ("1/10", "1/100", 1199)] {
        let lib = hoeffding_bound(&parse_rational(eps).unwrap(), &parse_rational(delta).unwrap(), 2).unwrap();
        let (code, r) = cli(&["hoeffding", "--eps", eps, "--delta", delta, "--hsize", "2"]);
        if lib != want || code != 0 || r["value"] != want {
            return Err(format!("({eps}, {delta}): library {lib}, cli {} (exit {code})", r["value"]));
        }
    }
    Ok(())
}

fn negative_verdict() -> Result<(), String> {
    let (code, r) = cli(&["decide", "--problem", "binemx", "--m", "1", "--eps", "1/4", "--delta", "1/5"]);
    if code != 0 || r["status"] != "not-learner" {
        return Err(format!("exit {code}, status {}", r["status"]));
    }
    let p = LearningProblem::binary_emx();
    let w = witness_vector(&r, &p);
    let prob = exact_violation_prob(&p, &Learner::erm(1), &rat(1, 4), &w, 1 << 20).unwrap();
    if prob <= rat(1, 5) || prob != rational_field(&r["violation_prob"]) {
        return Err(format!("witness {w:?} has violation probability {prob}"));
    }
    Ok(())
}

fn any_sat(systems: impl IntoIterator<Item = pacdecide::realdecide::System>) -> bool {
    systems
        .into_iter()
        .any(|s| decide_conjunction(&s).unwrap().is_sat())
}

fn reduction_equivalence() -> Result<(), String> {
    let three = LearningProblem::emx(&["a", "b", "c"], &[("x", &[0, 1]), ("y", &[2])]).unwrap();
    let cases = [
        (LearningProblem::binary_emx(), 1),
        (LearningProblem::binary_emx(), 2),
        (three, 1),
    ];
    let grid = [rat(1, 10), rat(1, 4), rat(1, 3), rat(1, 2), rat(3, 4)];
    let mut checked = 0;
    for (p, m) in &cases {
        for eps in &grid {
            for delta in &grid {
                for h in 0..p.n_hypotheses() {
                    let inst = ViolationInstance::new(p.clone(), Learner::erm(*m), h, eps.clone(), delta.clone()).unwrap();
                    let by_b = any_sat(violation_systems(&inst, 1 << 20).unwrap().into_iter().map(|s| s.system));
                    let by_a = any_sat(direct_a_systems(&inst, 1 << 20).unwrap());
                    if by_b != by_a {
                        return Err(format!("m={m} eps={eps} delta={delta} h'={h}: B-form {by_b}, A-form {by_a}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    println!("    {checked} instances agree");
    Ok(())
}

fn random_problem(rng: &mut ChaCha8Rng) -> LearningProblem {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(1..=3);
    let loss = (0..k)
        .map(|_| (0..n).map(|_| rat(rng.gen_range(0..=4), 4)).collect())
        .collect();
    LearningProblem::new(
        (0..n).map(|z| format!("z{z}")).collect(),
        (0..k).map(|h| format!("h{h}")).collect(),
        loss,
    )
    .unwrap()
}

fn decider_oracle_agreement() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid = [rat(1, 10), rat(1, 5), rat(1, 4), rat(1, 3), rat(1, 2)];
    let search = SearchConfig {
        grid_denominator: 64,
        random_trials: 200,
        ..SearchConfig::default()
    };
    let (mut learners, mut violated) = (0, 0);
    for i in 0..50 {
        let p = random_problem(&mut rng);
        let m = rng.gen_range(1..=2);
        let learner = if rng.gen_bool(0.5) {
            Learner::erm(m)
        } else {
            let total = sample_count(p.n_points(), m, 1 << 20).unwrap();
            let table = (0..total).map(|_| rng.gen_range(0..p.n_hypotheses())).collect();
            Learner::table(&p, m, table).unwrap()
        };
        let eps = grid[rng.gen_range(0..grid.len())].clone();
        let delta = grid[rng.gen_range(0..grid.len())].clone();
        let v = is_learner(&p, &learner, &eps, &delta, &Config::default()).map_err(|e| format!("problem {i}: {e}"))?;
        if v.is_learner {
            learners += 1;
            if let Some(w) = falsify(&p, &learner, &eps, &delta, &search).unwrap() {
                return Err(format!("problem {i}: learner verdict, but falsifier found {w:?}"));
            }
        } else {
            violated += 1;
            let c = v.counterexample.expect("negative verdict carries a witness");
            let prob = exact_violation_prob(&p, &learner, &eps, &c.witness, 1 << 20).unwrap();
            if prob <= delta {
                return Err(format!("problem {i}: witness {:?} gives {prob} <= {delta}", c.witness));
            }
        }
    }
    println!("    {learners} learner verdicts survived falsification, {violated} witnesses re-verified");
    Ok(())
}

fn root_kernel() -> Result<(), String> {
    let check = |name: &str, p: UPoly, roots: &[Rational], sq: Option<i64>| -> Result<(), String> {
        let iso = isolate_real_roots(&p).unwrap();
        let want = sq.map_or(roots.len(), |_| 2);
        if iso.len() != want {
            return Err(format!("{name}: {} roots, expected {want}", iso.len()));
        }
        for (i, a) in iso.iter().enumerate() {
            let ok = match sq {
                // closed interval contains -sqrt(s) (first) or sqrt(s) (second)
                Some(s) => {
                    let s = Rational::from_integer(s.into());
                    let zero = Rational::zero();
                    let (lo, hi) = (a.lo(), a.hi());
                    if i == 0 {
                        *lo <= zero && lo * lo >= s && (*hi >= zero || hi * hi <= s)
                    } else {
                        *hi >= zero && hi * hi >= s && (*lo <= zero || lo * lo <= s)
                    }
                }
                None => a.contains(&roots[i]),
            };
            if !ok {
                return Err(format!("{name}: root {i} isolated as {a}"));
            }
        }
        Ok(())
    };
    check("x^2 - 2", UPoly::from_ints(&[-2, 0, 1]), &[], Some(2))?;
    check("(x - 1)^2", UPoly::from_ints(&[1, -2, 1]), &[rat(1, 1)], None)?;
    check("x^2 + 1", UPoly::from_ints(&[1, 0, 1]), &[], None)?;
    let sevenths: Vec<Rational> = (1..=5).map(|k| rat(k, 7)).collect();
    check("prod (x - k/7)", UPoly::from_roots(&sevenths), &sevenths, None)?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let mut roots: Vec<Rational> = Vec::new();
        while roots.len() < 3 {
            let r = rat(rng.gen_range(-40..=40), rng.gen_range(1..=6));
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let lead = rat(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let p = UPoly::from_roots(&roots).scale(&lead);
        // endpoints have denominator 13, so never hit a root
        let mut ends: Vec<Rational> = (0..3).map(|_| rat(rng.gen_range(-120..=120) * 2 + 1, 26)).collect();
        ends.sort();
        ends.dedup();
        if ends.len() < 3 {
            continue;
        }
        let (a, c, b) = (&ends[0], &ends[1], &ends[2]);
        let whole = count_roots_in(&p, a, b).unwrap();
        let split = count_roots_in(&p, a, c).unwrap() + count_roots_in(&p, c, b).unwrap();
        let truth = roots.iter().filter(|r| a < *r && *r < b).count();
        if whole != split || whole != truth {
            return Err(format!("cubic {trial}: ({a}, {b}) counts {whole}, split {split}, true {truth}"));
        }
    }
    Ok(())
}

/// `sum_{j >= t} C(m, j) a^j b^(m-j)`, term by term with exact small-integer
/// ratio updates.
fn upper_tail(m: u64, t: u64, a: u64, b: u64) -> BigUint {
    if t > m {
        return BigUint::zero();
    }
    let mut binom = BigUint::one();
    for i in 0..t {
        binom = binom * (m - i) / (i + 1);
    }
    let mut term = binom * BigUint::from(a).pow(t as u32) * BigUint::from(b).pow((m - t) as u32);
    let mut sum = BigUint::zero();
    for j in t..=m {
        sum += &term;
        if j < m {
            term = term * ((m - j) * a) / ((j + 1) * b);
        }
    }
    sum
}

/// Largest wrong-majority probability of ERM on the two-point problem over
/// `P = (k/10000, 1 - k/10000)`; true when it exceeds `delta_inv^-1`.
fn binomial_tail_violates(m: u64, eps: (u64, u64), delta_inv: u64) -> bool {
    const D: u64 = 10_000;
    let denom = BigUint::from(D).pow(m as u32);
    (1..D).any(|k| {
        // risk(h0) - risk(h1) = 1 - 2q; ERM picks h0 when #z0 >= #z1
        let diff = 2 * k as i64 - D as i64;
        let gap_h0 = -diff * eps.1 as i64 > (eps.0 * D) as i64;
        let gap_h1 = diff * eps.1 as i64 > (eps.0 * D) as i64;
        let tail = if gap_h0 {
            upper_tail(m, m.div_ceil(2), k, D - k)
        } else if gap_h1 {
            upper_tail(m, m / 2 + 1, D - k, k)
        } else {
            return false;
        };
        tail * delta_inv > denom
    })
}

fn large_example() -> Result<(), String> {
    for (m, want) in [(538u64, true), (539, false)] {
        if binomial_tail_violates(m, (1, 10), 100) != want {
            return Err(format!("binomial tail at m={m}: violation {}, expected {want}", !want));
        }
    }
    let p = LearningProblem::binary_emx();
    for (m, want) in [(538usize, false), (539, true)] {
        let t = Instant::now();
        let v = is_learner(&p, &Learner::erm(m), &rat(1, 10), &rat(1, 100), &Config::default()).map_err(|e| e.to_string())?;
        println!("    decided m={m} in {:.1?}: learner = {}", t.elapsed(), v.is_learner);
        if v.is_learner != want {
            return Err(format!("m={m}: learner = {}, expected {want}", v.is_learner));
        }
    }
    Ok(())
}

fn resource_limits() -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!("pacdecide-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut aborted = 0;
    for i in 0..30 {
        let p = random_problem(&mut rng);
        let path = dir.join(format!("p{i}.toml"));
        std::fs::write(&path, pacdecide_cli::spec::emit_problem(&p)).unwrap();
        let m = rng.gen_range(1..=2).to_string();
        let limit = rng.gen_range(0..=2u64);
        let base = [
            "decide", "--problem", path.to_str().unwrap(), "--m", &m, "--eps", "1/10", "--delta", "1/10",
        ];
        let (code, r) = cli(&[&base[..], &["--max-cells", &limit.to_string()]].concat());
        let (free_code, free) = cli(&base);
        let status = r["status"].as_str().unwrap_or("");
        match (code, status) {
            (3, "unknown-resource") => {
                aborted += 1;
                if r["error"]["resource"] != "cells" || !r["witness"].is_null() || r["error"]["observed"].as_u64() <= Some(limit) {
                    return Err(format!("case {i}: malformed resource report {r}"));
                }
            }
            (0, "learner" | "not-learner") => {
                if free_code != 0 || free["status"] != status {
                    return Err(format!("case {i}: budget changed the verdict ({status} vs {})", free["status"]));
                }
            }
            _ => return Err(format!("case {i}: exit {code} with status {status:?}")),
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    // a run that must visit more than one cell
    let (code, r) = cli(&[
        "decide", "--problem", "binemx", "--m", "2", "--eps", "1/4", "--delta", "1/5", "--max-cells", "0",
    ]);
    if code != 3 || r["status"] != "unknown-resource" {
        return Err(format!("forced limit: exit {code}, status {}", r["status"]));
    }
    println!("    {aborted} of 30 random runs stopped at the cell budget");
    Ok(())
}

type Check = fn() -> Result<(), String>;

fn main() {
    let criteria: [(&str, Check); 8] = [
        ("1 binary EMX, eps = delta = 1/3: complexity 1, learner at m = 1", small_example),
        ("2 Hoeffding bounds 45 and 1199", hoeffding),
        ("3 not-learner at m = 1, eps 1/4, delta 1/5 with verified witness", negative_verdict),
        ("4 hypothesis-set and sample-set systems agree", reduction_equivalence),
        ("5 decider and oracle agree on 50 random problems", decider_oracle_agreement),
        ("6 real-root isolation and counting", root_kernel),
        ("7 binary EMX, eps 1/10, delta 1/100: ERM fails at 538, learns at 539", large_example),
        ("8 cell budget exhaustion exits 3 with unknown-resource", resource_limits),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({:.1?})", t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
