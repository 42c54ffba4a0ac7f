//! Command-line front end: problem files in, JSON verdict reports out.
//!
//! Exit codes: 0 when a verdict or value was computed (including
//! not-learner), 2 for usage or validation errors, 3 when a resource limit
//! stopped the computation.

pub mod report;
pub mod spec;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pacdecide::algebra::{format_rational, parse_rational, Rational};
use pacdecide::driver::{hoeffding_bound, is_learner, sample_complexity, ComplexityQuery, Config, LearnerPolicy};
use pacdecide::model::{Learner, LearningProblem, Policy};
use pacdecide::oracle::{exact_violation_prob, falsify, SearchConfig};
use pacdecide::realdecide::Limits;

use report::{CounterexampleInfo, ErrorInfo, Inputs, Report, Resources, Status};
use spec::SpecError;

#[derive(Debug, Parser)]
#[command(name = "pacdecide", version, about = "Exact agnostic PAC sample complexity for finite problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a learner is an (m, eps, delta)-learner.
    Decide {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        budget: Budget,
    },
    /// Least sample size admitting a learner.
    Complexity {
        /// Problem spec file, or `binemx`.
        #[arg(long)]
        problem: String,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[arg(long, value_enum, default_value_t = PolicyArg::Erm)]
        policy: PolicyArg,
        /// With `erm`: also decide every larger m up to the Hoeffding bound.
        #[arg(long)]
        verify_range: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Search grid and random distributions for a violation.
    Falsify {
        #[command(flatten)]
        target: Target,
        /// Grid denominator.
        #[arg(long, default_value_t = 64)]
        grid: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: Budget,
    },
    /// Sample size at which ERM is guaranteed to succeed.
    Hoeffding {
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[arg(long, value_parser = rational_arg)]
        delta: Rational,
        #[arg(long)]
        hsize: usize,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    /// Problem spec file, or `binemx`.
    #[arg(long)]
    pub problem: String,
    /// `erm` or `table:PATH`.
    #[arg(long, default_value = "erm")]
    pub learner: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = rational_arg)]
    pub eps: Rational,
    #[arg(long, value_parser = rational_arg)]
    pub delta: Rational,
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Sample points visited per decided system.
    #[arg(long)]
    pub max_cells: Option<u64>,
    /// Total degree of projection polynomials.
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Coefficient bit size in projection polynomials.
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Enumerated samples (n^m) and learners.
    #[arg(long)]
    pub enum_cap: Option<u64>,
    /// Closed linear conditions split into faces per decision.
    #[arg(long)]
    pub max_face_split: Option<usize>,
}

impl Budget {
    pub fn config(&self) -> Config {
        let d = Config::default();
        let l = Limits::default();
        Config {
            limits: Limits {
                max_cells: self.max_cells.unwrap_or(l.max_cells),
                max_degree: self.max_degree.unwrap_or(l.max_degree),
                max_bits: self.max_bits.unwrap_or(l.max_bits),
                max_face_split: self.max_face_split.unwrap_or(l.max_face_split),
            },
            enum_cap: self.enum_cap.unwrap_or(d.enum_cap),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Erm,
    Exists,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Parses the arguments, runs the command and returns the report.
pub fn execute(cli: &Cli) -> Report {
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Decide { target, budget } => decide(target, &budget.config()),
        Command::Complexity {
            problem,
            eps,
            delta,
            policy,
            verify_range,
            budget,
        } => complexity(problem, eps, delta, *policy, *verify_range, &budget.config()),
        Command::Falsify {
            target,
            grid,
            trials,
            seed,
            budget,
        } => {
            let cfg = SearchConfig {
                grid_denominator: *grid,
                random_trials: *trials,
                seed: *seed,
                sample_cap: budget.config().enum_cap,
            };
            search(target, &cfg, &budget.config())
        }
        Command::Hoeffding { eps, delta, hsize } => hoeffding(eps, delta, *hsize),
    };
    let delta = match &cli.command {
        Command::Decide { target, .. } | Command::Falsify { target, .. } => Some(&target.delta),
        Command::Complexity { delta, .. } => Some(delta),
        Command::Hoeffding { .. } => None,
    };
    if delta.is_some_and(|d| *d >= Rational::from_integer(1.into())) {
        report
            .notes
            .push("delta >= 1: no distribution can exceed it, every learner qualifies".into());
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn target_inputs(t: &Target) -> Inputs {
    Inputs {
        problem: Some(t.problem.clone()),
        learner: Some(t.learner.clone()),
        m: Some(t.m),
        eps: Some(format_rational(&t.eps)),
        delta: Some(format_rational(&t.delta)),
        ..Inputs::default()
    }
}

enum Failure {
    Spec(SpecError),
    Core(pacdecide::Error),
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        match e {
            SpecError::Invalid(e) => Failure::Core(e),
            e => Failure::Spec(e),
        }
    }
}

impl From<pacdecide::Error> for Failure {
    fn from(e: pacdecide::Error) -> Self {
        Failure::Core(e)
    }
}

fn failure_report(command: &str, inputs: Inputs, f: Failure) -> Report {
    let (status, error) = match f {
        Failure::Spec(e) => (
            Status::InvalidInput,
            ErrorInfo {
                message: e.to_string(),
                resource: None,
                limit: None,
                observed: None,
                completed_through: None,
            },
        ),
        Failure::Core(e) => {
            let resource = e.resource();
            let completed_through = match &e {
                pacdecide::Error::ScanAborted { completed_through, .. } => Some(*completed_through),
                _ => None,
            };
            (
                if resource.is_some() {
                    Status::UnknownResource
                } else {
                    Status::InvalidInput
                },
                ErrorInfo {
                    message: e.to_string(),
                    resource: resource.map(|r| r.0.to_string()),
                    limit: resource.map(|r| r.1),
                    observed: resource.map(|r| r.2),
                    completed_through,
                },
            )
        }
    };
    let mut r = Report::new(command, inputs, status);
    r.error = Some(error);
    r
}

fn load_learner(t: &Target, problem: &LearningProblem, cfg: &Config) -> Result<Learner, Failure> {
    match t.learner.as_str() {
        "erm" => Ok(Learner::erm(t.m)),
        s => match s.strip_prefix("table:") {
            Some(path) => Ok(spec::load_table(path, problem, t.m, cfg.enum_cap)?),
            None => Err(Failure::Core(pacdecide::Error::InvalidInput(format!(
                "learner must be `erm` or `table:PATH`, got `{s}`"
            )))),
        },
    }
}

fn decide(t: &Target, cfg: &Config) -> Report {
    let inputs = target_inputs(t);
    let run = || -> Result<Report, Failure> {
        let problem = spec::load_problem(&t.problem)?;
        let learner = load_learner(t, &problem, cfg)?;
        let v = is_learner(&problem, &learner, &t.eps, &t.delta, cfg)?;
        let status = if v.is_learner {
            Status::Learner
        } else {
            Status::NotLearner
        };
        let mut r = Report::new("decide", inputs.clone(), status);
        r.resources = Some(Resources::new(&v.stats, v.systems));
        if let Some(c) = v.counterexample {
            // independent re-evaluation before anything is printed
            let p = exact_violation_prob(&problem, &learner, &t.eps, &c.witness, cfg.enum_cap)?;
            assert!(p > t.delta && p == c.violation_prob, "witness failed re-verification");
            let hyp = |h: usize| problem.hypotheses()[h].clone();
            r.witness = Some(report::witness_map(problem.points(), &c.witness));
            r.counterexample = Some(CounterexampleInfo {
                h_prime: hyp(c.h_prime),
                b: c.b.iter().map(|&h| hyp(h)).collect(),
            });
            r.violation_prob = Some(format_rational(&p));
        }
        Ok(r)
    };
    run().unwrap_or_else(|f| failure_report("decide", inputs, f))
}

fn complexity(
    problem_arg: &str,
    eps: &Rational,
    delta: &Rational,
    policy: PolicyArg,
    verify_range: bool,
    cfg: &Config,
) -> Report {
    let inputs = Inputs {
        problem: Some(problem_arg.to_string()),
        eps: Some(format_rational(eps)),
        delta: Some(format_rational(delta)),
        policy: Some(
            match policy {
                PolicyArg::Erm => "erm",
                PolicyArg::Exists => "exists",
            }
            .to_string(),
        ),
        ..Inputs::default()
    };
    let run = || -> Result<Report, Failure> {
        let problem = spec::load_problem(problem_arg)?;
        let q = ComplexityQuery {
            problem: problem.clone(),
            eps: eps.clone(),
            delta: delta.clone(),
            policy: match policy {
                PolicyArg::Erm => LearnerPolicy::ErmOnly,
                PolicyArg::Exists => LearnerPolicy::ExistsLearner,
            },
            verify_range,
        };
        let c = sample_complexity(&q, cfg)?;
        let mut r = Report::new("complexity", inputs.clone(), Status::Complexity);
        r.value = Some(c.m as u64);
        r.hoeffding = Some(c.hoeffding);
        if verify_range {
            r.non_monotone = Some(c.non_monotone.clone());
        }
        r.learner = Some(match &c.learner.policy {
            Policy::Erm => "erm".into(),
            Policy::Table(_) => spec::emit_table(&problem, &c.learner).into(),
        });
        r.resources = Some(Resources::new(&c.stats, c.systems));
        Ok(r)
    };
    run().unwrap_or_else(|f| failure_report("complexity", inputs, f))
}

fn search(t: &Target, scfg: &SearchConfig, cfg: &Config) -> Report {
    let inputs = Inputs {
        grid: Some(scfg.grid_denominator),
        trials: Some(scfg.random_trials),
        seed: Some(scfg.seed),
        ..target_inputs(t)
    };
    let run = || -> Result<Report, Failure> {
        let problem = spec::load_problem(&t.problem)?;
        let learner = load_learner(t, &problem, cfg)?;
        pacdecide::systems::ViolationInstance::new(problem.clone(), learner.clone(), 0, t.eps.clone(), t.delta.clone())?;
        let found = falsify(&problem, &learner, &t.eps, &t.delta, scfg)?;
        Ok(match found {
            None => Report::new("falsify", inputs.clone(), Status::NoViolationFound),
            Some(p) => {
                let prob = exact_violation_prob(&problem, &learner, &t.eps, &p, scfg.sample_cap)?;
                assert!(prob > t.delta, "falsifier hit failed re-verification");
                let mut r = Report::new("falsify", inputs.clone(), Status::NotLearner);
                r.witness = Some(report::witness_map(problem.points(), &p));
                r.violation_prob = Some(format_rational(&prob));
                r
            }
        })
    };
    run().unwrap_or_else(|f| failure_report("falsify", inputs, f))
}

fn hoeffding(eps: &Rational, delta: &Rational, hsize: usize) -> Report {
    let inputs = Inputs {
        eps: Some(format_rational(eps)),
        delta: Some(format_rational(delta)),
        hsize: Some(hsize),
        ..Inputs::default()
    };
    match hoeffding_bound(eps, delta, hsize) {
        Ok(b) => {
            let mut r = Report::new("hoeffding", inputs, Status::Bound);
            r.value = Some(b);
            r
        }
        Err(e) => failure_report("hoeffding", inputs, Failure::Core(e)),
    }
}
