//! Fully symmetric tensors stored once per index multiset.
//!
//! An order-k tensor over ℝⁿ keeps exactly C(n+k-1, k) coefficients, one per
//! non-decreasing index tuple, laid out in lexicographic order. The stored
//! value is the tensor entry itself (not weighted by the number of orderings),
//! so reading `(1, 0)` and `(0, 1)` hits the same slot.

use serde::{Deserialize, Serialize};

use crate::combinat::{check_guards, multiset_count, multiset_rank, multisets};
use crate::error::{Error, Result};

/// A sorted multi-index of order k over dimension n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    indices: Vec<usize>,
    dim: usize,
}

impl MultiIndex {
    /// Builds the multi-index from indices given in any order.
    pub fn new(mut indices: Vec<usize>, dim: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        indices.sort_unstable();
        Ok(Self { indices, dim })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTensor {
    order: usize,
    dim: usize,
    coeffs: Vec<f64>,
}

impl SymmetricTensor {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        check_guards(dim, order)?;
        Ok(Self { order, dim, coeffs: vec![0.0; multiset_count(dim, order)] })
    }

    pub fn scalar(value: f64) -> Self {
        Self { order: 0, dim: 1, coeffs: vec![value] }
    }

    /// Order-0 tensor carrying a dimension, so it can be compared against
    /// contraction results of that dimension.
    pub fn scalar_with_dim(value: f64, dim: usize) -> Result<Self> {
        let mut t = Self::zeros(0, dim)?;
        t.coeffs[0] = value;
        Ok(t)
    }

    /// Builds a tensor from coefficients in canonical multiset order.
    pub fn from_coeffs(order: usize, dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_guards(dim, order)?;
        let expected = multiset_count(dim, order);
        if coeffs.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "order-{order} dim-{dim} tensor needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { order, dim, coeffs })
    }

    /// Builds a tensor from a function of the sorted multi-index.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        check_guards(dim, order)?;
        let coeffs = multisets(dim, order).iter().map(|ms| f(ms)).collect();
        Ok(Self { order, dim, coeffs })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients in canonical (lexicographic multiset) order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Sorted multi-indices matching [`coeffs`](Self::coeffs) position by position.
    pub fn multi_indices(&self) -> Vec<Vec<usize>> {
        multisets(self.dim, self.order)
    }

    fn slot(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order {
            return Err(Error::Arity { expected: self.order, got: idx.len() });
        }
        let mi = MultiIndex::new(idx.to_vec(), self.dim)?;
        Ok(multiset_rank(mi.indices(), self.dim))
    }

    /// Entry at `idx`, given in any order.
    pub fn get(&self, idx: &[usize]) -> Result<f64> {
        Ok(self.coeffs[self.slot(idx)?])
    }

    /// Writes the value shared by every permutation of `idx`.
    pub fn set(&mut self, idx: &[usize], value: f64) -> Result<()> {
        let slot = self.slot(idx)?;
        self.coeffs[slot] = value;
        Ok(())
    }

    /// Single contraction with `v`: result_{ν} = Σ_μ t_{ν μ} v_μ.
    ///
    /// Each stored multiset S feeds the children S∖{i} for every distinct i in
    /// S with weight vᵢ; every (child, μ) pair arises from exactly one such
    /// (S, i), so no extra multiplicity weight is needed here. Parents are
    /// visited in canonical order, making the summation order deterministic.
    pub fn contract(&self, v: &[f64]) -> Result<SymmetricTensor> {
        if self.order == 0 {
            return Err(Error::ContractScalar);
        }
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        let mut out = Self::zeros(self.order - 1, self.dim)?;
        let mut child = Vec::with_capacity(self.order - 1);
        for (parent, &value) in multisets(self.dim, self.order).iter().zip(&self.coeffs) {
            for (pos, &i) in parent.iter().enumerate() {
                if pos > 0 && parent[pos - 1] == i {
                    continue;
                }
                child.clear();
                child.extend_from_slice(&parent[..pos]);
                child.extend_from_slice(&parent[pos + 1..]);
                out.coeffs[multiset_rank(&child, self.dim)] += value * v[i];
            }
        }
        Ok(out)
    }

    /// Full contraction with k copies of `u`, i.e. the k-th differential
    /// dᵏf(x; u) when `self` holds the k-th derivatives.
    pub fn apply_uniform(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: u.len() });
        }
        let mut t = self.clone();
        while t.order > 0 {
            t = t.contract(u)?;
        }
        Ok(t.coeffs[0])
    }

    pub fn scaled(&self, factor: f64) -> SymmetricTensor {
        Self { order: self.order, dim: self.dim, coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Outcome of [`tensor_close`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closeness {
    pub close: bool,
    /// Largest absolute coefficient difference.
    pub max_residual: f64,
    /// `max_residual / (1 + max |coeff|)` over both tensors.
    pub relative_residual: f64,
}

/// Compares two tensors coefficient-wise against `rel_tol · (1 + max |coeff|)`.
pub fn tensor_close(a: &SymmetricTensor, b: &SymmetricTensor, rel_tol: f64) -> Result<Closeness> {
    if a.order != b.order || a.dim != b.dim {
        return Err(Error::ShapeMismatch(format!(
            "order {}/dim {} vs order {}/dim {}",
            a.order, a.dim, b.order, b.dim
        )));
    }
    let max_residual = a.coeffs.iter().zip(&b.coeffs).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = 1.0 + a.max_abs().max(b.max_abs());
    Ok(Closeness { close: max_residual <= rel_tol * scale, max_residual, relative_residual: max_residual / scale })
}
