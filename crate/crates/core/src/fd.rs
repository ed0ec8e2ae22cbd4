//! Central finite-difference derivative tensors, used only as an independent
//! check on the jet engine.

use crate::combinat::{binomial, multiset_to_exponent};
use crate::error::{Error, Result};
use crate::homfun::HomogeneousFunction;
use crate::symtensor::SymmetricTensor;

/// Highest order the stencils are built for.
pub const MAX_FD_ORDER: usize = 4;

/// h = ε^{1/(k+2)} · (1 + ‖a‖∞).
pub fn auto_step(a: &[f64], k: usize) -> f64 {
    let norm_inf = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * (1.0 + norm_inf)
}

/// One-dimensional central stencil for the j-th derivative with spacing h:
/// offsets (j/2 − i)·h with weights (−1)ⁱ C(j, i), i = 0..=j.
fn stencil(order: u8) -> Vec<(f64, f64)> {
    let j = order as u64;
    (0..=j)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            (j as f64 / 2.0 - i as f64, sign * binomial(j, i) as f64)
        })
        .collect()
}

/// Order-k tensor of central differences of `f` at `a`.
///
/// Each entry D^α f is the tensor product of one-dimensional central stencils,
/// one per coordinate with αᵢ > 0, so an entry is computed once per multiset
/// and shared by all its permutations. Truncation error is O(h²).
pub fn fd_tensor(f: &HomogeneousFunction, a: &[f64], k: usize, h: Option<f64>) -> Result<SymmetricTensor> {
    if k > MAX_FD_ORDER {
        return Err(Error::Range(format!("finite-difference order {k} exceeds {MAX_FD_ORDER}")));
    }
    let h = h.unwrap_or_else(|| auto_step(a, k));
    if !(h > 0.0) {
        return Err(Error::Range(format!("step must be positive, got {h}")));
    }
    let n = a.len();
    let shape = SymmetricTensor::zeros(k, n)?;
    let mut coeffs = Vec::with_capacity(shape.coeffs().len());
    for ms in shape.multi_indices() {
        let alpha = multiset_to_exponent(&ms, n);
        let axes: Vec<(usize, Vec<(f64, f64)>)> =
            alpha.iter().enumerate().filter(|(_, &ai)| ai > 0).map(|(i, &ai)| (i, stencil(ai))).collect();
        let mut sum = 0.0;
        let mut point = a.to_vec();
        accumulate(f, &axes, 0, 1.0, h, &mut point, &mut sum)?;
        coeffs.push(sum / h.powi(k as i32));
    }
    SymmetricTensor::from_coeffs(k, n, coeffs)
}

fn accumulate(
    f: &HomogeneousFunction,
    axes: &[(usize, Vec<(f64, f64)>)],
    depth: usize,
    weight: f64,
    h: f64,
    point: &mut Vec<f64>,
    sum: &mut f64,
) -> Result<()> {
    if depth == axes.len() {
        if !f.in_domain(point) {
            return Err(Error::Domain(format!("stencil point {point:?} leaves the domain of {}", f.name())));
        }
        *sum += weight * f.evaluate(point)?;
        return Ok(());
    }
    let (axis, ref taps) = axes[depth];
    let base = point[axis];
    for &(offset, w) in taps {
        point[axis] = base + offset * h;
        accumulate(f, axes, depth + 1, weight * w, h, point, sum)?;
    }
    point[axis] = base;
    Ok(())
}
