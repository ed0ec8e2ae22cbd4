//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the PASS/FAIL lines are always printed; exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use homtaylor::fd::fd_tensor;
use homtaylor::homfun::HomogeneousFunction;
use homtaylor::riskagg::Portfolio;
use homtaylor::sampling::{sample_pair, sample_point, sample_point_away_from_origin, trial_rng};
use homtaylor::taylor::{
    alternating_binomial_sum, derivative_tensors, taylor_collapsed, taylor_power_collapsed, taylor_standard,
};
use homtaylor::tensor_close;
use homtaylor::verify::{catalog_cases, degree_one_cases, random_portfolio, theorem_cases, Case};

const SEED: u64 = 42;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    summary: String,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self { pass, summary: summary.into() }
    }
}

/// Max of residual/bound over a set of trials, with the first violation kept.
#[derive(Default)]
struct Worst {
    ratio: f64,
    checks: usize,
    first_violation: Option<String>,
}

impl Worst {
    fn record(&mut self, residual: f64, bound: f64, context: impl FnOnce() -> String) {
        self.checks += 1;
        let ratio = residual / bound;
        let within = ratio <= 1.0;
        if !within && self.first_violation.is_none() {
            self.first_violation = Some(format!("{} (residual {residual:e}, bound {bound:e})", context()));
        }
        if ratio.is_nan() || ratio > self.ratio {
            self.ratio = ratio;
        }
    }

    fn ok(&self) -> bool {
        self.first_violation.is_none()
    }

    fn describe(&self) -> String {
        let mut s = format!("{} checks, worst residual/bound {:.3e}", self.checks, self.ratio);
        if let Some(v) = &self.first_violation {
            s.push_str(&format!("; first violation: {v}"));
        }
        s
    }
}

fn timed(budget: Option<Duration>, body: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let v = body();
    let elapsed = start.elapsed();
    match budget {
        Some(limit) => Verdict::new(
            v.pass && elapsed < limit,
            format!("{}; {:.2}s (limit {}s)", v.summary, elapsed.as_secs_f64(), limit.as_secs()),
        ),
        None => Verdict::new(v.pass, format!("{}; {:.2}s", v.summary, elapsed.as_secs_f64())),
    }
}

fn identity_trials(worst: &mut Worst, case: &Case, m: usize, power: bool) {
    let f = &case.function;
    for trial in 0..100 {
        let (a, b) = sample_pair(f, case.dim, &mut trial_rng(SEED, trial));
        let context = || format!("{} m={m} trial={trial} a={a:?} b={b:?}", f.name());
        let (standard, collapsed, fa, fb) = if power {
            let g = HomogeneousFunction::power(f.clone(), m as u32).unwrap();
            (
                taylor_standard(&g, &a, &b, m).unwrap(),
                taylor_power_collapsed(f, &a, &b, m).unwrap(),
                g.evaluate(&a).unwrap(),
                g.evaluate(&b).unwrap(),
            )
        } else {
            (
                taylor_standard(f, &a, &b, m).unwrap(),
                taylor_collapsed(f, &a, &b, m).unwrap(),
                f.evaluate(&a).unwrap(),
                f.evaluate(&b).unwrap(),
            )
        };
        worst.record((standard - collapsed).abs(), 1e-8 * (1.0 + fa.abs() + fb.abs()), context);
    }
}

fn criterion_1() -> Verdict {
    timed(Some(Duration::from_secs(10)), || {
        let mut worst = Worst::default();
        for case in theorem_cases(SEED).unwrap() {
            let m = case.function.integer_degree().expect("integer degree");
            identity_trials(&mut worst, &case, m, false);
        }
        Verdict::new(worst.ok(), worst.describe())
    })
}

fn criterion_2() -> Verdict {
    timed(Some(Duration::from_secs(30)), || {
        let mut worst = Worst::default();
        for case in degree_one_cases(SEED).unwrap() {
            for m in 1..=6 {
                identity_trials(&mut worst, &case, m, true);
            }
        }
        Verdict::new(worst.ok(), worst.describe())
    })
}

fn criterion_3() -> Verdict {
    timed(None, || {
        let mut worst = Worst::default();
        for case in catalog_cases(SEED).unwrap() {
            let f = &case.function;
            let degree = f.degree();
            let levels = (degree.floor() as usize).max(1);
            for trial in 0..20 {
                let a = sample_point(f, case.dim, &mut trial_rng(SEED, trial));
                let d = derivative_tensors(f, &a, levels).unwrap();
                for k in 1..=levels {
                    let lhs = d[k].contract(&a).unwrap();
                    let rhs = d[k - 1].scaled(degree - k as f64 + 1.0);
                    let cl = tensor_close(&lhs, &rhs, 1e-9).unwrap();
                    worst.record(cl.relative_residual, 1e-9, || format!("{} k={k} a={a:?}", f.name()));
                }
            }
        }
        Verdict::new(worst.ok(), worst.describe())
    })
}

fn criterion_4() -> Verdict {
    timed(None, || {
        let mut pairs = 0;
        let mut wrong = Vec::new();
        for m in 0..=12u32 {
            for q in 0..=m {
                pairs += 1;
                let got = alternating_binomial_sum(m, q).unwrap();
                if got != i128::from(q == m) {
                    wrong.push(format!("(m={m}, q={q}) -> {got}"));
                }
            }
        }
        Verdict::new(wrong.is_empty() && pairs == 91, format!("{pairs} pairs, {} mismatches {wrong:?}", wrong.len()))
    })
}

fn criterion_5() -> Verdict {
    timed(None, || {
        let mut worst = Worst::default();
        for case in catalog_cases(SEED).unwrap() {
            let f = &case.function;
            for trial in 0..20 {
                let a = sample_point_away_from_origin(f, case.dim, 0.5, &mut trial_rng(SEED, trial));
                let jets = derivative_tensors(f, &a, 3).unwrap();
                for (k, jet) in jets.iter().enumerate().skip(1) {
                    let fd = fd_tensor(f, &a, k, None).unwrap();
                    let cl = tensor_close(jet, &fd, 1e-4).unwrap();
                    worst.record(cl.relative_residual, 1e-4, || format!("{} k={k} a={a:?}", f.name()));
                }
            }
        }
        Verdict::new(worst.ok(), worst.describe())
    })
}

fn monomial_value(alpha: &[f64], x: &[f64]) -> f64 {
    alpha.iter().zip(x).map(|(&p, &v)| v.powi(p as i32)).product()
}

fn criterion_6() -> Verdict {
    timed(None, || {
        let mut worst = Worst::default();
        for alpha in [vec![2.0], vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0, 1.0], vec![2.0, 2.0, 1.0, 1.0]] {
            let f = HomogeneousFunction::monomial(alpha.clone()).unwrap();
            let m = f.integer_degree().unwrap();
            for trial in 0..100 {
                let (a, b) = sample_pair(&f, alpha.len(), &mut trial_rng(SEED, trial));
                let fb = monomial_value(&alpha, &b);
                let remainder = fb - taylor_standard(&f, &a, &b, m).unwrap();
                worst.record(remainder.abs(), 1e-10 * (1.0 + fb.abs()), || format!("{} a={a:?} b={b:?}", f.name()));
            }
        }
        Verdict::new(worst.ok(), worst.describe())
    })
}

fn criterion_7() -> Verdict {
    timed(None, || {
        let mut alloc = Worst::default();
        let mut ident = Worst::default();
        for trial in 0..100 {
            let (p, target) = random_portfolio(SEED, trial).unwrap();
            let capital = p.aggregate_capital().unwrap();
            let total: f64 = p.euler_allocation().unwrap().iter().sum();
            alloc.record((total - capital).abs(), 1e-12 * capital, || format!("portfolio {trial}"));

            let r = p.capital_quadratic_identity(&target).unwrap();
            let btrb: f64 = (0..target.len())
                .map(|i| (0..target.len()).map(|j| target[i] * p.matrix[i][j] * target[j]).sum::<f64>())
                .sum();
            ident.record((r.lhs - btrb).abs(), 1e-10 * (1.0 + btrb), || format!("pair {trial}"));
        }
        let worked = Portfolio::new(vec![vec![1.0, 0.5], vec![0.5, 1.0]], vec![1.0, 1.0], None)
            .unwrap()
            .aggregate_capital()
            .unwrap();
        let worked_err = (worked - 3f64.sqrt()).abs();
        Verdict::new(
            alloc.ok() && ident.ok() && worked_err <= 1e-9,
            format!(
                "allocation: {}; identity: {}; worked capital {worked:.10} (error {worked_err:.1e})",
                alloc.describe(),
                ident.describe()
            ),
        )
    })
}

fn criterion_8() -> Verdict {
    timed(None, || {
        let f = HomogeneousFunction::euclidean(2).unwrap();
        let a = [3.0, 4.0];
        let b = [1.0, 0.0];
        let remainder = |t: f64| {
            let bt: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect();
            f.evaluate(&bt).unwrap() - taylor_standard(&f, &a, &bt, 1).unwrap()
        };
        let ratios: Vec<(f64, f64)> =
            [0.1, 0.05].into_iter().map(|t| (t, remainder(t / 2.0).abs() / remainder(t).abs())).collect();
        let pass = ratios.iter().all(|&(_, r)| (0.15..=0.45).contains(&r));
        Verdict::new(pass, format!("ratios {ratios:?} within [0.15, 0.45]"))
    })
}

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_homtaylor")).args(args).output().expect("spawn homtaylor")
}

fn criterion_9() -> Verdict {
    timed(None, || {
        let mut problems = Vec::new();
        let euclid = ["taylor", "--family", "euclidean", "--a", "3,4", "--b", "1,0", "--order", "1", "--json"];
        let o = run_bin(&euclid);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap_or_default();
        let near = |key: &str, want: f64| v[key].as_f64().is_some_and(|x| (x - want).abs() <= 1e-12);
        if o.status.code() != Some(0) || !near("taylor_standard", 0.6) || !near("taylor_collapsed", 0.6) {
            problems.push("euclidean example".to_string());
        }

        let mono =
            ["taylor", "--family", "monomial", "--alpha", "2,1", "--a", "1,1", "--b", "2,1", "--order", "3", "--json"];
        let o = run_bin(&mono);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap_or_default();
        if o.status.code() != Some(0) || !v["remainder"].as_f64().is_some_and(|r| r.abs() <= 1e-12) {
            problems.push("monomial example".to_string());
        }

        let o = run_bin(&["taylor", "--family", "euclidean", "--a", "1,0", "--b", "-1,0", "--order", "1"]);
        if o.status.code() != Some(3) {
            problems.push(format!("segment example exited {:?}", o.status.code()));
        }

        for args in [&euclid[..], &mono[..], &["verify", "--suite", "all", "--trials", "5", "--json"][..]] {
            if run_bin(args).stdout != run_bin(args).stdout {
                problems.push(format!("non-deterministic JSON for {}", args[0]));
            }
        }
        Verdict::new(
            problems.is_empty(),
            if problems.is_empty() {
                "3 taylor examples and JSON determinism".to_string()
            } else {
                problems.join("; ")
            },
        )
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 collapsed identity, degree m", criterion_1),
        ("2 collapsed identity, powers of degree-1 f", criterion_2),
        ("3 Euler chain", criterion_3),
        ("4 alternating binomial identity", criterion_4),
        ("5 jet vs finite differences", criterion_5),
        ("6 polynomial exactness", criterion_6),
        ("7 risk aggregation", criterion_7),
        ("8 remainder scaling", criterion_8),
        ("9 CLI contract", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
