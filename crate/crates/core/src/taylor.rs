//! Standard and collapsed Taylor polynomials of homogeneous functions, the
//! Euler derivative chain, and the alternating binomial identity.
//!
//! For f positively homogeneous of integer degree m,
//!
//! ```text
//! f(a) + Σ_{k=1}^{m} dᵏf(a; b−a)/k!  =  dᵐf(a; b)/m!
//! ```
//!
//! where the right-hand side contracts the m-th derivative tensor at a with b
//! itself, not with b − a.

use serde::{Deserialize, Serialize};

use crate::combinat::{binomial, factorial, MAX_ORDER};
use crate::error::{Error, Result};
use crate::homfun::HomogeneousFunction;
use crate::symtensor::{tensor_close, SymmetricTensor};

/// Largest m accepted by [`alternating_binomial_sum`].
pub const MAX_BINOMIAL_ORDER: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// f itself has degree m.
    Theorem,
    /// f has degree 1 and the identity is checked for fᵐ.
    Corollary,
}

/// Results of one standard-vs-collapsed comparison. In corollary mode every
/// value refers to fᵐ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorReport {
    pub f_a: f64,
    pub f_b: f64,
    pub taylor_standard: f64,
    pub taylor_collapsed: f64,
    pub identity_gap: f64,
    pub remainder: f64,
    pub euler_residuals: Vec<f64>,
    pub order: usize,
    pub mode: Mode,
}

fn check_order(m: usize) -> Result<()> {
    if m == 0 || m > MAX_ORDER {
        return Err(Error::Range(format!("order {m} not in 1..={MAX_ORDER}")));
    }
    Ok(())
}

fn require_degree(f: &HomogeneousFunction, m: usize) -> Result<()> {
    if f.degree() != m as f64 {
        return Err(Error::DegreeMismatch { degree: f.degree(), order: m });
    }
    Ok(())
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(())
}

/// D⁰f(a), …, Dᵐf(a) extracted from one degree-m jet.
pub fn derivative_tensors(f: &HomogeneousFunction, a: &[f64], m: usize) -> Result<Vec<SymmetricTensor>> {
    let jet = f.jet(a, m)?;
    (0..=m).map(|k| jet.extract_tensor(k)).collect()
}

fn standard_from_tensors(tensors: &[SymmetricTensor], a: &[f64], b: &[f64]) -> Result<f64> {
    let step: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let mut total = tensors[0].coeffs()[0];
    for (k, t) in tensors.iter().enumerate().skip(1) {
        total += t.apply_uniform(&step)? / factorial(k as u32) as f64;
    }
    Ok(total)
}

fn collapsed_from_tensor(top: &SymmetricTensor, b: &[f64]) -> Result<f64> {
    Ok(top.apply_uniform(b)? / factorial(top.order() as u32) as f64)
}

/// T⁽ᵐ⁾f(a; b−a) = f(a) + Σ_{k=1}^{m} dᵏf(a; b−a)/k!.
pub fn taylor_standard(f: &HomogeneousFunction, a: &[f64], b: &[f64], m: usize) -> Result<f64> {
    check_order(m)?;
    check_dims(a, b)?;
    f.evaluate(b)?;
    standard_from_tensors(&derivative_tensors(f, a, m)?, a, b)
}

/// dᵐf(a; b)/m!, valid when f has degree m.
pub fn taylor_collapsed(f: &HomogeneousFunction, a: &[f64], b: &[f64], m: usize) -> Result<f64> {
    check_order(m)?;
    require_degree(f, m)?;
    check_dims(a, b)?;
    f.evaluate(b)?;
    let jet = f.jet(a, m)?;
    collapsed_from_tensor(&jet.extract_tensor(m)?, b)
}

/// dᵐ(fᵐ)(a; b)/m! for a degree-1 function f.
pub fn taylor_power_collapsed(f: &HomogeneousFunction, a: &[f64], b: &[f64], m: usize) -> Result<f64> {
    require_degree(f, 1)?;
    check_order(m)?;
    let g = HomogeneousFunction::power(f.clone(), m as u32)?;
    taylor_collapsed(&g, a, b, m)
}

/// Relative residual of Dᵏf(a)·a = (d − k + 1)·Dᵏ⁻¹f(a) for k = 1..=max_level,
/// where d is the (possibly non-integer) degree of f.
pub fn euler_chain_residuals(f: &HomogeneousFunction, a: &[f64], max_level: usize) -> Result<Vec<f64>> {
    if max_level == 0 || max_level > MAX_ORDER {
        return Err(Error::Range(format!("level {max_level} not in 1..={MAX_ORDER}")));
    }
    let tensors = derivative_tensors(f, a, max_level)?;
    chain_from_tensors(&tensors, a, f.degree())
}

fn chain_from_tensors(tensors: &[SymmetricTensor], a: &[f64], degree: f64) -> Result<Vec<f64>> {
    (1..tensors.len())
        .map(|k| {
            let lhs = tensors[k].contract(a)?;
            let rhs = tensors[k - 1].scaled(degree - k as f64 + 1.0);
            Ok(tensor_close(&lhs, &rhs, 0.0)?.relative_residual)
        })
        .collect()
}

/// Euler chain residual at level k for a function of declared degree m.
///
/// Levels above m are accepted: the chain continues with factor m − k + 1,
/// which is zero at k = m + 1.
pub fn euler_chain_residual(f: &HomogeneousFunction, a: &[f64], m: usize, k: usize) -> Result<f64> {
    require_degree(f, m)?;
    if k == 0 || k > MAX_ORDER {
        return Err(Error::Range(format!("level {k} not in 1..={MAX_ORDER}")));
    }
    Ok(euler_chain_residuals(f, a, k)?[k - 1])
}

/// Σ_{k=q}^{m} (−1)^{k−q} C(m, k) C(k, k−q) in exact integers.
pub fn alternating_binomial_sum(m: u32, q: u32) -> Result<i128> {
    if m > MAX_BINOMIAL_ORDER || q > m {
        return Err(Error::Range(format!("need 0 <= q <= m <= {MAX_BINOMIAL_ORDER}, got m={m}, q={q}")));
    }
    let (m, q) = (m as u64, q as u64);
    Ok((q..=m)
        .map(|k| {
            let term = (binomial(m, k) * binomial(k, k - q)) as i128;
            if (k - q) % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum())
}

/// Runs both Taylor forms and the Euler chain for f (theorem mode) or fᵐ
/// (corollary mode) from a single jet at `a`.
pub fn build_report(f: &HomogeneousFunction, a: &[f64], b: &[f64], m: usize, mode: Mode) -> Result<TaylorReport> {
    check_order(m)?;
    check_dims(a, b)?;
    let g = match mode {
        Mode::Theorem => {
            require_degree(f, m)?;
            f.clone()
        }
        Mode::Corollary => {
            require_degree(f, 1)?;
            HomogeneousFunction::power(f.clone(), m as u32)?
        }
    };
    let f_b = g.evaluate(b)?;
    let tensors = derivative_tensors(&g, a, m)?;
    let f_a = tensors[0].coeffs()[0];
    let taylor_standard = standard_from_tensors(&tensors, a, b)?;
    let taylor_collapsed = collapsed_from_tensor(&tensors[m], b)?;
    let euler_residuals = chain_from_tensors(&tensors, a, m as f64)?;
    Ok(TaylorReport {
        f_a,
        f_b,
        taylor_standard,
        taylor_collapsed,
        identity_gap: (taylor_standard - taylor_collapsed).abs(),
        remainder: f_b - taylor_standard,
        euler_residuals,
        order: m,
        mode,
    })
}
