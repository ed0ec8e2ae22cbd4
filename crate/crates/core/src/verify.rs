//! Seeded property suites over the function catalog.
//!
//! Each suite returns a [`SuiteOutcome`] with the largest normalized residual
//! it saw and every instance that exceeded its bound. Trials are independent
//! (trial i draws from the stream seeded with `seed + i`) and run in parallel;
//! results are collected in trial order, so outcomes are reproducible.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fd::fd_tensor;
use crate::homfun::{catalog, HomogeneousFunction};
use crate::riskagg::Portfolio;
use crate::sampling::{
    random_pd_matrix, random_vector, sample_pair, sample_point, sample_point_away_from_origin, trial_rng,
};
use crate::symtensor::tensor_close;
use crate::taylor::{alternating_binomial_sum, build_report, derivative_tensors, euler_chain_residuals, Mode};

/// Identity bound: |standard − collapsed| ≤ tol · (1 + |f(a)| + |f(b)|).
pub const IDENTITY_TOL: f64 = 1e-8;
pub const EULER_TOL: f64 = 1e-9;
pub const HOMOGENEITY_TOL: f64 = 1e-10;
pub const FD_TOL: f64 = 1e-4;
pub const EXACTNESS_TOL: f64 = 1e-10;
pub const ALLOCATION_TOL: f64 = 1e-12;
pub const QUADRATIC_IDENTITY_TOL: f64 = 1e-10;

/// FD checks on √(xᵀRx)-type functions keep this distance from the origin,
/// where higher derivatives blow up and the O(h²) truncation dominates.
pub const FD_MIN_NORM: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Central,
    Corollary,
    Euler,
    Homogeneity,
    Fd,
    Exactness,
    Binomial,
    Risk,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Central,
        Suite::Corollary,
        Suite::Euler,
        Suite::Homogeneity,
        Suite::Fd,
        Suite::Exactness,
        Suite::Binomial,
        Suite::Risk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Central => "central",
            Suite::Corollary => "corollary",
            Suite::Euler => "euler",
            Suite::Homogeneity => "homogeneity",
            Suite::Fd => "fd",
            Suite::Exactness => "exactness",
            Suite::Binomial => "binomial",
            Suite::Risk => "risk",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// One instance that exceeded its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub function: String,
    pub seed: u64,
    pub trial: u64,
    pub a: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    pub detail: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checks: usize,
    /// Largest residual, normalized the same way as the bound it is held to.
    pub max_residual: f64,
    pub tolerance: f64,
    pub failures: Vec<Failure>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// What one trial contributes to a suite outcome.
struct Check {
    residual: f64,
    failure: Option<Failure>,
}

struct Collector {
    suite: Suite,
    tolerance: f64,
    checks: Vec<Check>,
}

impl Collector {
    fn new(suite: Suite, tolerance: f64) -> Self {
        Self { suite, tolerance, checks: Vec::new() }
    }

    fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    fn finish(self) -> SuiteOutcome {
        let max_residual =
            self.checks.iter().fold(0.0f64, |m, c| if c.residual.is_nan() { f64::NAN } else { m.max(c.residual) });
        SuiteOutcome {
            suite: self.suite,
            checks: self.checks.len(),
            max_residual,
            tolerance: self.tolerance,
            failures: self.checks.into_iter().filter_map(|c| c.failure).collect(),
        }
    }
}

fn check(
    residual: f64,
    tol: f64,
    f: &HomogeneousFunction,
    seed: u64,
    trial: u64,
    a: &[f64],
    b: Option<&[f64]>,
    detail: impl FnOnce() -> String,
) -> Check {
    let failure = (!(residual <= tol)).then(|| Failure {
        function: f.name().to_string(),
        seed,
        trial,
        a: a.to_vec(),
        b: b.map(<[f64]>::to_vec),
        detail: detail(),
        residual,
    });
    Check { residual, failure }
}

fn errored(f: &HomogeneousFunction, seed: u64, trial: u64, a: &[f64], err: crate::Error) -> Check {
    Check {
        residual: f64::INFINITY,
        failure: Some(Failure {
            function: f.name().to_string(),
            seed,
            trial,
            a: a.to_vec(),
            b: None,
            detail: format!("error: {err}"),
            residual: f64::INFINITY,
        }),
    }
}

/// RNG for function parameters (PD matrices), separate from the trial streams.
pub fn parameter_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// A function under test with the dimension to sample points in.
#[derive(Debug, Clone)]
pub struct Case {
    pub function: HomogeneousFunction,
    pub dim: usize,
}

impl Case {
    fn new(function: HomogeneousFunction, dim: usize) -> Self {
        Self { function, dim }
    }
}

/// Instances for the central identity: quadratic roots of three random PD
/// matrices (n = 2, 3, 5) squared; monomials of degree 2–4; p-norm powers
/// m = 1–4; the Euclidean norm itself.
pub fn theorem_cases(seed: u64) -> Result<Vec<Case>> {
    let mut rng = parameter_rng(seed);
    let mut cases = Vec::new();
    for n in [2, 3, 5] {
        let q = HomogeneousFunction::quadratic_root(random_pd_matrix(n, &mut rng))?;
        cases.push(Case::new(HomogeneousFunction::power(q, 2)?, n));
    }
    for alpha in
        [vec![1.0, 1.0], vec![1.5, 0.5], vec![2.0, 1.0], vec![1.0, 1.0, 1.0], vec![2.0, 1.0, 1.0], vec![2.5, 0.5, 1.0]]
    {
        let n = alpha.len();
        cases.push(Case::new(HomogeneousFunction::monomial(alpha)?, n));
    }
    for m in 1..=4 {
        let p = HomogeneousFunction::pnorm(3.0)?;
        cases.push(Case::new(HomogeneousFunction::power(p, m)?, 3));
    }
    cases.push(Case::new(HomogeneousFunction::euclidean(2)?, 2));
    Ok(cases)
}

/// Degree-1 functions whose powers fᵐ, m = 1..=6, are checked.
pub fn degree_one_cases(seed: u64) -> Result<Vec<Case>> {
    let mut rng = parameter_rng(seed);
    Ok(vec![
        Case::new(HomogeneousFunction::euclidean(3)?, 3),
        Case::new(HomogeneousFunction::quadratic_root(random_pd_matrix(3, &mut rng))?, 3),
        Case::new(HomogeneousFunction::pnorm(3.0)?, 3),
        Case::new(HomogeneousFunction::pnorm(2.5)?, 2),
    ])
}

/// The catalog on ℝ¹, ℝ² and ℝ³.
pub fn catalog_cases(seed: u64) -> Result<Vec<Case>> {
    let mut rng = parameter_rng(seed);
    let mut out = Vec::new();
    for n in 1..=3 {
        out.extend(catalog(n, &mut rng)?.into_iter().map(|f| Case::new(f, n)));
    }
    Ok(out)
}

fn identity_checks(instances: &[(&Case, usize)], mode: Mode, seed: u64, trials: u64, tol: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for &(case, m) in instances {
        let f = &case.function;
        let checks: Vec<Check> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, trial);
                let (a, b) = sample_pair(f, case.dim, &mut rng);
                match build_report(f, &a, &b, m, mode) {
                    Ok(r) => {
                        let scale = 1.0 + r.f_a.abs() + r.f_b.abs();
                        check(r.identity_gap / scale, tol, f, seed, trial, &a, Some(&b), || {
                            format!(
                                "m={m} standard={} collapsed={} gap={}",
                                r.taylor_standard, r.taylor_collapsed, r.identity_gap
                            )
                        })
                    }
                    Err(e) => errored(f, seed, trial, &a, e),
                }
            })
            .collect();
        out.extend(checks);
    }
    out
}

/// |standard − collapsed| / (1 + |f(a)| + |f(b)|) over the theorem cases.
pub fn central_suite(seed: u64, trials: u64, tol: f64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Central, tol);
    let cases = theorem_cases(seed)?;
    let instances: Vec<(&Case, usize)> =
        cases.iter().map(|c| (c, c.function.integer_degree().expect("integer degree"))).collect();
    c.extend(identity_checks(&instances, Mode::Theorem, seed, trials, tol));
    Ok(c.finish())
}

/// Same bound for fᵐ, f of degree 1, m = 1..=6.
pub fn corollary_suite(seed: u64, trials: u64, tol: f64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Corollary, tol);
    let cases = degree_one_cases(seed)?;
    let instances: Vec<(&Case, usize)> = cases.iter().flat_map(|c| (1..=6).map(move |m| (c, m))).collect();
    c.extend(identity_checks(&instances, Mode::Corollary, seed, trials, tol));
    Ok(c.finish())
}

/// Dᵏf(a)·a = (m − k + 1) Dᵏ⁻¹f(a) for k = 1..=⌊m⌋ (at least 1).
pub fn euler_suite(seed: u64, points: u64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Euler, EULER_TOL);
    for case in catalog_cases(seed)? {
        let f = &case.function;
        let levels = (f.degree().floor() as usize).max(1);
        let checks: Vec<Check> = (0..points)
            .into_par_iter()
            .map(|trial| {
                let a = sample_point(f, case.dim, &mut trial_rng(seed, trial));
                match euler_chain_residuals(f, &a, levels) {
                    Ok(res) => {
                        let worst = res.iter().cloned().fold(0.0, f64::max);
                        check(worst, EULER_TOL, f, seed, trial, &a, None, || format!("per-level residuals {res:?}"))
                    }
                    Err(e) => errored(f, seed, trial, &a, e),
                }
            })
            .collect();
        c.extend(checks);
    }
    Ok(c.finish())
}

/// |f(λx) − λᵐf(x)| / (1 + |f(x)|) for λ ∈ (0, 4], catalog on ℝ¹..ℝ⁴.
pub fn homogeneity_suite(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Homogeneity, HOMOGENEITY_TOL);
    let mut rng = parameter_rng(seed);
    let mut cases = Vec::new();
    for n in 1..=4 {
        cases.extend(catalog(n, &mut rng)?.into_iter().map(|f| Case::new(f, n)));
    }
    for case in &cases {
        let f = &case.function;
        let checks: Vec<Check> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, trial);
                let x = sample_point(f, case.dim, &mut rng);
                let lambda: f64 = rng.gen_range(1e-3..=4.0);
                match (f.evaluate(&x), f.homogeneity_residual(&x, lambda)) {
                    (Ok(fx), Ok(res)) => {
                        check(res / (1.0 + fx.abs()), HOMOGENEITY_TOL, f, seed, trial, &x, None, || {
                            format!("lambda={lambda}")
                        })
                    }
                    (Err(e), _) | (_, Err(e)) => errored(f, seed, trial, &x, e),
                }
            })
            .collect();
        c.extend(checks);
    }
    Ok(c.finish())
}

/// Jet tensors against central differences, k = 1..=3, n ≤ 3.
pub fn fd_suite(seed: u64, points: u64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Fd, FD_TOL);
    for case in catalog_cases(seed)? {
        let f = &case.function;
        let checks: Vec<Check> = (0..points)
            .into_par_iter()
            .flat_map_iter(|trial| {
                let a = sample_point_away_from_origin(f, case.dim, FD_MIN_NORM, &mut trial_rng(seed, trial));
                let jets = derivative_tensors(f, &a, 3);
                (1..=3)
                    .map(|k| {
                        let jet_t = match &jets {
                            Ok(t) => &t[k],
                            Err(e) => return errored(f, seed, trial, &a, e.clone()),
                        };
                        match fd_tensor(f, &a, k, None).and_then(|fd_t| tensor_close(jet_t, &fd_t, FD_TOL)) {
                            Ok(cl) => check(cl.relative_residual, FD_TOL, f, seed, trial, &a, None, || {
                                format!("order {k}: max abs diff {}", cl.max_residual)
                            }),
                            Err(e) => errored(f, seed, trial, &a, e),
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        c.extend(checks);
    }
    Ok(c.finish())
}

/// Integer monomials of degree m: T⁽ᵐ⁾ reproduces f(b), so the remainder vanishes.
pub fn exactness_suite(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Exactness, EXACTNESS_TOL);
    let cases: Vec<Case> =
        [vec![2.0], vec![1.0, 1.0], vec![2.0, 1.0], vec![3.0, 1.0], vec![1.0, 2.0, 1.0], vec![2.0, 2.0, 1.0, 1.0]]
            .into_iter()
            .map(|alpha| {
                let n = alpha.len();
                HomogeneousFunction::monomial(alpha).map(|f| Case::new(f, n))
            })
            .collect::<Result<_>>()?;
    for case in &cases {
        let f = &case.function;
        let m = f.integer_degree().expect("integer exponents");
        let checks: Vec<Check> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let (a, b) = sample_pair(f, case.dim, &mut trial_rng(seed, trial));
                match build_report(f, &a, &b, m, Mode::Theorem) {
                    Ok(r) => check(
                        r.remainder.abs() / (1.0 + r.f_b.abs()),
                        EXACTNESS_TOL,
                        f,
                        seed,
                        trial,
                        &a,
                        Some(&b),
                        || format!("remainder {}", r.remainder),
                    ),
                    Err(e) => errored(f, seed, trial, &a, e),
                }
            })
            .collect();
        c.extend(checks);
    }
    Ok(c.finish())
}

/// Every (m, q) with 0 ≤ q ≤ m ≤ max_m must give δ_{qm} exactly.
pub fn binomial_suite(max_m: u32) -> Result<SuiteOutcome> {
    let mut checks = 0;
    let mut failures = Vec::new();
    for m in 0..=max_m {
        for q in 0..=m {
            checks += 1;
            let got = alternating_binomial_sum(m, q)?;
            let expected = i128::from(q == m);
            if got != expected {
                failures.push(Failure {
                    function: "alternating_binomial_sum".into(),
                    seed: 0,
                    trial: 0,
                    a: vec![m as f64, q as f64],
                    b: None,
                    detail: format!("m={m} q={q}: got {got}, expected {expected}"),
                    residual: (got - expected).abs() as f64,
                });
            }
        }
    }
    Ok(SuiteOutcome {
        suite: Suite::Binomial,
        checks,
        max_residual: failures.iter().fold(0.0, |m, f| f64::max(m, f.residual)),
        tolerance: 0.0,
        failures,
    })
}

/// A random PD portfolio of dimension 1..=8 with exposures in [0.5, 2] and a
/// random target in the same box.
pub fn random_portfolio(seed: u64, trial: u64) -> Result<(Portfolio, Vec<f64>)> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(1..=8);
    let r = random_pd_matrix(n, &mut rng);
    let x = random_vector(n, 0.5, 2.0, &mut rng);
    let target = random_vector(n, 0.5, 2.0, &mut rng);
    Ok((Portfolio::new(r, x, None)?, target))
}

/// Allocation sum gap (relative to capital) and the quadratic identity gap
/// (relative to 1 + bᵀRb); the reported maximum is over both ratios, each
/// divided by its own bound.
pub fn risk_suite(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let mut c = Collector::new(Suite::Risk, 1.0);
    let checks: Vec<Check> = (0..trials)
        .into_par_iter()
        .flat_map_iter(|trial| {
            let (p, target) = match random_portfolio(seed, trial) {
                Ok(v) => v,
                Err(e) => {
                    let f = HomogeneousFunction::euclidean(1).expect("n = 1");
                    return vec![errored(&f, seed, trial, &[], e)];
                }
            };
            let f = p.capital_function().expect("validated portfolio");
            let alloc = p.allocation_report();
            let ident = p.capital_quadratic_identity(&target);
            let mut out = Vec::new();
            match alloc {
                Ok(r) => out.push(check(
                    r.check_sum_gap / r.capital / ALLOCATION_TOL,
                    1.0,
                    &f,
                    seed,
                    trial,
                    &p.exposures,
                    None,
                    || format!("allocation sum gap {}", r.check_sum_gap),
                )),
                Err(e) => out.push(errored(&f, seed, trial, &p.exposures, e)),
            }
            match ident {
                Ok(r) => out.push(check(
                    r.gap / (1.0 + r.rhs) / QUADRATIC_IDENTITY_TOL,
                    1.0,
                    &f,
                    seed,
                    trial,
                    &p.exposures,
                    Some(&target),
                    || format!("lhs={} rhs={}", r.lhs, r.rhs),
                )),
                Err(e) => out.push(errored(&f, seed, trial, &p.exposures, e)),
            }
            out
        })
        .collect();
    c.extend(checks);
    Ok(c.finish())
}

/// Euler and FD suites use at most this many points per function.
pub const POINTS_PER_FUNCTION: u64 = 20;

pub fn run_suite(suite: Suite, seed: u64, trials: u64, tol: f64, max_m: u32) -> Result<SuiteOutcome> {
    let points = trials.min(POINTS_PER_FUNCTION);
    match suite {
        Suite::Central => central_suite(seed, trials, tol),
        Suite::Corollary => corollary_suite(seed, trials, tol),
        Suite::Euler => euler_suite(seed, points),
        Suite::Homogeneity => homogeneity_suite(seed, trials.min(50)),
        Suite::Fd => fd_suite(seed, points),
        Suite::Exactness => exactness_suite(seed, trials),
        Suite::Binomial => binomial_suite(max_m),
        Suite::Risk => risk_suite(seed, trials),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn binomial_suite_counts_pairs() {
        let o = binomial_suite(12).unwrap();
        assert_eq!(o.checks, 91);
        assert!(o.passed());
    }

    #[test]
    fn small_runs_pass() {
        for s in Suite::ALL {
            let o = run_suite(s, 7, 5, IDENTITY_TOL, 6).unwrap();
            assert!(o.passed(), "{s}: {:?}", o.failures.first());
            assert!(o.checks > 0);
        }
    }

    #[test]
    fn theorem_cases_have_integer_degree() {
        for c in theorem_cases(42).unwrap() {
            assert!(c.function.integer_degree().is_some(), "{}", c.function.name());
        }
    }

    #[test]
    fn outcomes_are_reproducible() {
        let a = central_suite(11, 10, IDENTITY_TOL).unwrap();
        let b = central_suite(11, 10, IDENTITY_TOL).unwrap();
        assert_eq!(a, b);
    }
}
