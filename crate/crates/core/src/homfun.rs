//! Positively homogeneous functions: f(λx) = λᵐ f(x) for λ > 0.
//!
//! Every function carries its degree m, a smooth-domain predicate (an open
//! cone on which all derivatives exist) and a single evaluator that is generic
//! over [`Scalar`], so the same code produces values and jets.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{jet_variable, Jet};
use crate::sampling::random_pd_matrix;
use crate::scalar::Scalar;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    QuadraticRoot,
    Monomial,
    Pnorm,
    Power,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::QuadraticRoot => "quadratic_root",
            Family::Monomial => "monomial",
            Family::Pnorm => "pnorm",
            Family::Power => "power",
        };
        f.write_str(s)
    }
}

/// Declarative description of a catalog function, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub family: Family,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<FunctionSpec>>,
}

impl FunctionSpec {
    fn bare(family: Family) -> Self {
        Self { family, r: None, alpha: None, p: None, power: None, inner: None }
    }

    pub fn quadratic_root(r: Vec<Vec<f64>>) -> Self {
        Self { r: Some(r), ..Self::bare(Family::QuadraticRoot) }
    }

    pub fn monomial(alpha: Vec<f64>) -> Self {
        Self { alpha: Some(alpha), ..Self::bare(Family::Monomial) }
    }

    pub fn pnorm(p: f64) -> Self {
        Self { p: Some(p), ..Self::bare(Family::Pnorm) }
    }

    pub fn power(inner: FunctionSpec, power: u32) -> Self {
        Self { power: Some(power), inner: Some(Box::new(inner)), ..Self::bare(Family::Power) }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    QuadraticRoot { r: Vec<Vec<f64>> },
    Monomial { alpha: Vec<f64> },
    Pnorm { p: f64 },
    Power { inner: Box<HomogeneousFunction>, power: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousFunction {
    name: String,
    degree: f64,
    kind: Kind,
}

/// Builds a function from its spec, validating the family invariants.
pub fn make_function(spec: &FunctionSpec) -> Result<HomogeneousFunction> {
    let missing = |field: &str| Error::InvalidSpec(format!("{} needs \"{field}\"", spec.family));
    match spec.family {
        Family::QuadraticRoot => HomogeneousFunction::quadratic_root(spec.r.clone().ok_or_else(|| missing("R"))?),
        Family::Monomial => HomogeneousFunction::monomial(spec.alpha.clone().ok_or_else(|| missing("alpha"))?),
        Family::Pnorm => HomogeneousFunction::pnorm(spec.p.ok_or_else(|| missing("p"))?),
        Family::Power => {
            let inner = spec.inner.as_deref().ok_or_else(|| missing("inner"))?;
            let power = spec.power.ok_or_else(|| missing("power"))?;
            HomogeneousFunction::power(make_function(inner)?, power)
        }
    }
}

/// Checks that `r` is square, symmetric to 1e-12 and strictly positive definite.
pub fn check_positive_definite(r: &[Vec<f64>]) -> Result<()> {
    let n = r.len();
    if n == 0 || r.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidSpec("R must be a non-empty square matrix".into()));
    }
    if r.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec("R has non-finite entries".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if (r[i][j] - r[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidSpec(format!("R is not symmetric at ({i},{j})")));
            }
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| r[i][j]);
    match m.cholesky() {
        Some(c) if c.l().diagonal().iter().all(|&d| d > 0.0) => Ok(()),
        _ => Err(Error::NotPositiveDefinite),
    }
}

impl HomogeneousFunction {
    /// √(xᵀRx) for strictly positive definite R; degree 1, domain x ≠ 0.
    pub fn quadratic_root(r: Vec<Vec<f64>>) -> Result<Self> {
        check_positive_definite(&r)?;
        Ok(Self { name: format!("quadratic_root(n={})", r.len()), degree: 1.0, kind: Kind::QuadraticRoot { r } })
    }

    /// Euclidean norm on ℝⁿ, the quadratic root with R = I.
    pub fn euclidean(n: usize) -> Result<Self> {
        let r = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let mut f = Self::quadratic_root(r)?;
        f.name = format!("euclidean(n={n})");
        Ok(f)
    }

    /// Π xᵢ^αᵢ; degree Σαᵢ.
    pub fn monomial(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidSpec("monomial needs at least one exponent".into()));
        }
        if alpha.iter().any(|&a| !(a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidSpec("monomial exponents must be finite and >= 0".into()));
        }
        let degree = alpha.iter().sum();
        Ok(Self { name: format!("monomial{alpha:?}"), degree, kind: Kind::Monomial { alpha } })
    }

    /// (Σ xᵢᵖ)^{1/p} on the strictly positive orthant; degree 1.
    pub fn pnorm(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidSpec(format!("pnorm needs finite p > 1, got {p}")));
        }
        Ok(Self { name: format!("pnorm(p={p})"), degree: 1.0, kind: Kind::Pnorm { p } })
    }

    /// innerᵐ for a degree-1 inner function; degree m.
    pub fn power(inner: HomogeneousFunction, power: u32) -> Result<Self> {
        if inner.degree != 1.0 {
            return Err(Error::InvalidSpec(format!(
                "power needs a degree-1 inner function, {} has degree {}",
                inner.name, inner.degree
            )));
        }
        if power < 1 {
            return Err(Error::InvalidSpec("power must be >= 1".into()));
        }
        Ok(Self {
            name: format!("power({}, {power})", inner.name),
            degree: power as f64,
            kind: Kind::Power { inner: Box::new(inner), power },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    /// Degree as an integer order, if it is one.
    pub fn integer_degree(&self) -> Option<usize> {
        (self.degree.fract() == 0.0 && self.degree >= 0.0).then_some(self.degree as usize)
    }

    pub fn family(&self) -> Family {
        match self.kind {
            Kind::QuadraticRoot { .. } => Family::QuadraticRoot,
            Kind::Monomial { .. } => Family::Monomial,
            Kind::Pnorm { .. } => Family::Pnorm,
            Kind::Power { .. } => Family::Power,
        }
    }

    /// Family of the innermost function (looks through `power`).
    pub fn base_family(&self) -> Family {
        match &self.kind {
            Kind::Power { inner, .. } => inner.base_family(),
            _ => self.family(),
        }
    }

    /// Fixed dimension, or `None` for families defined on every ℝⁿ.
    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::QuadraticRoot { r } => Some(r.len()),
            Kind::Monomial { alpha } => Some(alpha.len()),
            Kind::Pnorm { .. } => None,
            Kind::Power { inner, .. } => inner.dim(),
        }
    }

    /// Whether the domain is (contained in) the strictly positive orthant.
    pub fn positive_orthant_domain(&self) -> bool {
        match &self.kind {
            Kind::QuadraticRoot { .. } => false,
            Kind::Monomial { alpha } => alpha.iter().any(|a| a.fract() != 0.0),
            Kind::Pnorm { .. } => true,
            Kind::Power { inner, .. } => inner.positive_orthant_domain(),
        }
    }

    fn dim_matches(&self, n: usize) -> bool {
        n >= 1 && self.dim().is_none_or(|d| d == n)
    }

    /// Membership in the open smooth domain U.
    pub fn in_domain(&self, x: &[f64]) -> bool {
        if !self.dim_matches(x.len()) || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            Kind::QuadraticRoot { .. } => x.iter().any(|&v| v != 0.0),
            Kind::Monomial { .. } | Kind::Pnorm { .. } => !self.positive_orthant_domain() || x.iter().all(|&v| v > 0.0),
            Kind::Power { inner, .. } => inner.in_domain(x),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if !self.dim_matches(x.len()) {
            return Err(Error::DimensionMismatch { expected: self.dim().unwrap_or(x.len().max(1)), got: x.len() });
        }
        if !self.in_domain(x) {
            return Err(Error::Domain(format!("{x:?} is outside the domain of {}", self.name)));
        }
        Ok(())
    }

    /// The scalar-generic evaluator. Callers are expected to have checked the
    /// domain; real powers of non-positive values still surface as errors.
    pub fn eval_generic<S: Scalar>(&self, x: &[S]) -> Result<S> {
        match &self.kind {
            Kind::QuadraticRoot { r } => quadratic_form(r, x).powf(0.5),
            Kind::Monomial { alpha } => {
                let mut acc = x[0].constant_like(1.0);
                for (xi, &a) in x.iter().zip(alpha) {
                    if a == 0.0 {
                        continue;
                    }
                    let factor = if a.fract() == 0.0 { xi.powi(a as u32) } else { xi.powf(a)? };
                    acc = acc.times(&factor);
                }
                Ok(acc)
            }
            Kind::Pnorm { p } => {
                let mut s = x[0].powf(*p)?;
                for xi in &x[1..] {
                    s = s.plus(&xi.powf(*p)?);
                }
                s.powf(1.0 / p)
            }
            Kind::Power { inner, power } => match &inner.kind {
                // (√q)ᵐ = q^{m/2}: even powers stay polynomial
                Kind::QuadraticRoot { r } => {
                    let q = quadratic_form(r, x);
                    let even = q.powi(power / 2);
                    if power % 2 == 0 {
                        Ok(even)
                    } else {
                        Ok(even.times(&q.powf(0.5)?))
                    }
                }
                _ => Ok(inner.eval_generic(x)?.powi(*power)),
            },
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.eval_generic(x)
    }

    /// Jet of f around `a`, truncated at total degree `max_degree`.
    pub fn jet(&self, a: &[f64], max_degree: usize) -> Result<Jet> {
        self.check_point(a)?;
        let vars = jet_variable(a, max_degree)?;
        self.eval_generic(&vars)
    }

    /// |f(λx) − λᵐ f(x)|.
    pub fn homogeneity_residual(&self, x: &[f64], lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("scale factor must be positive, got {lambda}")));
        }
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let fx = self.evaluate(x)?;
        let fl = self.evaluate(&scaled)?;
        Ok((fl - lambda.powf(self.degree) * fx).abs())
    }

    /// Samples `samples` equally spaced points of [a, b], endpoints included,
    /// and checks each against the domain predicate.
    pub fn segment_in_domain(&self, a: &[f64], b: &[f64], samples: usize) -> bool {
        if samples < 2 || a.len() != b.len() {
            return false;
        }
        let last = (samples - 1) as f64;
        (0..samples).all(|i| {
            let t = i as f64 / last;
            let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
            self.in_domain(&p)
        })
    }
}

/// xᵀRx as Σᵢ xᵢ (Rx)ᵢ.
fn quadratic_form<S: Scalar>(r: &[Vec<f64>], x: &[S]) -> S {
    let mut q: Option<S> = None;
    for (xi, row) in x.iter().zip(r) {
        let mut y = x[0].scaled(row[0]);
        for (xj, &rij) in x.iter().zip(row).skip(1) {
            y = y.plus(&xj.scaled(rij));
        }
        let term = xi.times(&y);
        q = Some(match q {
            None => term,
            Some(acc) => acc.plus(&term),
        });
    }
    q.expect("non-empty matrix")
}

/// Default sample count for [`HomogeneousFunction::segment_in_domain`].
pub const SEGMENT_SAMPLES: usize = 101;

/// The standard set of test functions on ℝⁿ. Random parameters (the PD
/// matrices) are drawn from `rng`.
pub fn catalog<R: Rng>(n: usize, rng: &mut R) -> Result<Vec<HomogeneousFunction>> {
    let int_alpha: Vec<f64> = (0..n).map(|i| [2.0, 1.0, 1.0][i % 3]).collect();
    let frac_alpha: Vec<f64> = if n == 1 { vec![2.5] } else { (0..n).map(|i| [1.5, 0.5, 1.0][i % 3]).collect() };
    let pd = random_pd_matrix(n, rng);
    let pd2 = random_pd_matrix(n, rng);
    Ok(vec![
        HomogeneousFunction::euclidean(n)?,
        HomogeneousFunction::quadratic_root(pd)?,
        HomogeneousFunction::monomial(int_alpha)?,
        HomogeneousFunction::monomial(frac_alpha)?,
        HomogeneousFunction::pnorm(3.0)?,
        HomogeneousFunction::pnorm(2.5)?,
        HomogeneousFunction::power(HomogeneousFunction::pnorm(3.0)?, 2)?,
        HomogeneousFunction::power(HomogeneousFunction::quadratic_root(pd2)?, 3)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn make_function_examples() {
        let f = make_function(&FunctionSpec::quadratic_root(vec![vec![1.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert_eq!(f.degree(), 1.0);
        assert!(close(f.evaluate(&[3.0, 4.0]).unwrap(), 5.0, 1e-15));

        let g = make_function(&FunctionSpec::monomial(vec![2.0, 1.0])).unwrap();
        assert_eq!(g.evaluate(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(g.degree(), 3.0);

        let h = make_function(&FunctionSpec::pnorm(3.0)).unwrap();
        let expected = 2f64.cbrt();
        assert!(close(h.evaluate(&[1.0, 1.0]).unwrap(), expected, 1e-15));
        assert!(close(expected, 1.259921, 1e-6));
    }

    #[test]
    fn make_function_errors() {
        let non_pd = FunctionSpec::quadratic_root(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert_eq!(make_function(&non_pd), Err(Error::NotPositiveDefinite));
        let psd = FunctionSpec::quadratic_root(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(make_function(&psd), Err(Error::NotPositiveDefinite));
        let asym = FunctionSpec::quadratic_root(vec![vec![1.0, 0.1], vec![0.0, 1.0]]);
        assert!(matches!(make_function(&asym), Err(Error::InvalidSpec(_))));
        assert!(matches!(make_function(&FunctionSpec::pnorm(1.0)), Err(Error::InvalidSpec(_))));
        assert!(matches!(make_function(&FunctionSpec::monomial(vec![-1.0])), Err(Error::InvalidSpec(_))));
        let bad_power = FunctionSpec::power(FunctionSpec::monomial(vec![2.0, 1.0]), 2);
        assert!(matches!(make_function(&bad_power), Err(Error::InvalidSpec(_))));
        let zero_power = FunctionSpec::power(FunctionSpec::pnorm(3.0), 0);
        assert!(matches!(make_function(&zero_power), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn evaluate_examples() {
        let f = HomogeneousFunction::quadratic_root(vec![vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        assert!(close(f.evaluate(&[1.0, 1.0]).unwrap(), 3f64.sqrt(), 1e-15));
        assert!(close(f.evaluate(&[1.0, 1.0]).unwrap(), 1.7320508, 1e-7));

        let sq = HomogeneousFunction::power(HomogeneousFunction::euclidean(2).unwrap(), 2).unwrap();
        assert!(close(sq.evaluate(&[1.0, 2.0]).unwrap(), 5.0, 1e-14));

        let m = HomogeneousFunction::monomial(vec![2.0, 1.0]).unwrap();
        assert_eq!(m.evaluate(&[2.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn evaluate_rejects_outside_domain() {
        let f = HomogeneousFunction::euclidean(2).unwrap();
        assert!(matches!(f.evaluate(&[0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate(&[1.0]), Err(Error::DimensionMismatch { .. })));
        let p = HomogeneousFunction::pnorm(3.0).unwrap();
        assert!(matches!(p.evaluate(&[1.0, -1.0]), Err(Error::Domain(_))));
        let frac = HomogeneousFunction::monomial(vec![1.5, 0.5]).unwrap();
        assert!(matches!(frac.evaluate(&[1.0, 0.0]), Err(Error::Domain(_))));
        let int = HomogeneousFunction::monomial(vec![2.0, 1.0]).unwrap();
        assert_eq!(int.evaluate(&[-1.0, 2.0]).unwrap(), 2.0);
    }

    #[test]
    fn homogeneity_examples() {
        let f = HomogeneousFunction::euclidean(2).unwrap();
        assert!(f.homogeneity_residual(&[3.0, 4.0], 2.0).unwrap() <= 1e-12);
        let m = HomogeneousFunction::monomial(vec![2.0, 1.0]).unwrap();
        assert!(m.homogeneity_residual(&[1.0, 1.0], 3.0).unwrap() <= 1e-12);
        let p = HomogeneousFunction::pnorm(3.0).unwrap();
        assert!(p.homogeneity_residual(&[1.0, 2.0], 0.5).unwrap() <= 1e-12);
        assert!(p.homogeneity_residual(&[1.0, 2.0], 0.0).is_err());
        assert!(f.homogeneity_residual(&[0.0, 0.0], 2.0).is_err());
    }

    #[test]
    fn segment_examples() {
        let f = HomogeneousFunction::euclidean(2).unwrap();
        assert!(f.segment_in_domain(&[3.0, 4.0], &[1.0, 0.0], 101));
        assert!(!f.segment_in_domain(&[1.0, 0.0], &[-1.0, 0.0], 101));
        let p = HomogeneousFunction::pnorm(3.0).unwrap();
        assert!(p.segment_in_domain(&[1.0, 1.0], &[2.0, 3.0], 101));
        assert!(!p.segment_in_domain(&[1.0, 1.0], &[2.0, 3.0], 1));
        assert!(!p.segment_in_domain(&[1.0, 1.0], &[2.0], 101));
    }

    #[test]
    fn spec_json_field_names() {
        let spec = FunctionSpec::power(FunctionSpec::quadratic_root(vec![vec![2.0]]), 2);
        let v = serde_json::to_value(&spec).unwrap();
        assert_eq!(v["family"], "power");
        assert_eq!(v["power"], 2);
        assert_eq!(v["inner"]["family"], "quadratic_root");
        assert_eq!(v["inner"]["R"], serde_json::json!([[2.0]]));

        let parsed: FunctionSpec = serde_json::from_str(r#"{"family": "monomial", "alpha": [2, 1]}"#).unwrap();
        assert_eq!(parsed, FunctionSpec::monomial(vec![2.0, 1.0]));
        assert!(serde_json::from_str::<FunctionSpec>(r#"{"family": "cubic"}"#).is_err());
    }

    #[test]
    fn evaluator_matches_jet_constant_term_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for f in catalog(n, &mut rng).unwrap() {
                let x: Vec<f64> = (0..n).map(|i| 0.7 + 0.3 * i as f64).collect();
                let v = f.evaluate(&x).unwrap();
                let j = f.jet(&x, 3).unwrap();
                assert_eq!(v.to_bits(), j.value().to_bits(), "{}", f.name());
            }
        }
    }

    #[test]
    fn catalog_is_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=4 {
            for f in catalog(n, &mut rng).unwrap() {
                let (lo, hi) = if f.positive_orthant_domain() { (0.5, 2.0) } else { (-2.0, 2.0) };
                for _ in 0..50 {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
                    let lambda = rng.gen_range(1e-3..=4.0);
                    if !f.in_domain(&x) {
                        continue;
                    }
                    let fx = f.evaluate(&x).unwrap();
                    let res = f.homogeneity_residual(&x, lambda).unwrap();
                    assert!(res <= 1e-10 * (1.0 + fx.abs()), "{} at {x:?}: {res}", f.name());
                }
            }
        }
    }

    #[test]
    fn domains_are_cones() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for f in catalog(3, &mut rng).unwrap() {
            let x = [0.4, 1.3, 0.9];
            assert!(f.in_domain(&x));
            for lambda in [1e-6, 0.5, 3.0, 1e6] {
                let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                assert!(f.in_domain(&y), "{}", f.name());
            }
        }
    }
}
