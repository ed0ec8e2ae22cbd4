//! Truncated multivariate power series ("jets").
//!
//! A jet of degree m around a point a holds the coefficients c_α of
//! f(a + t) = Σ_{|α| ≤ m} c_α t^α, densely over all C(n+m, m) exponents in
//! lexicographic order. Arithmetic on jets propagates derivatives exactly up
//! to rounding, and D^α f(a) = α! · c_α recovers the derivative tensors.

use std::sync::Arc;

use crate::combinat::{exponent_factorial, generalized_binomial, multiset_to_exponent, ExponentSet};
use crate::error::{Error, Result};
use crate::symtensor::SymmetricTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    shape: Arc<ExponentSet>,
    coeffs: Vec<f64>,
}

/// One coordinate jet xᵢ = aᵢ + tᵢ per component of `a`, sharing one shape.
pub fn jet_variable(a: &[f64], max_degree: usize) -> Result<Vec<Jet>> {
    let shape = Arc::new(ExponentSet::new(a.len(), max_degree)?);
    Ok(a.iter()
        .enumerate()
        .map(|(i, &ai)| {
            let mut jet = Jet::constant(&shape, ai);
            if max_degree >= 1 {
                let mut e = vec![0u8; a.len()];
                e[i] = 1;
                let slot = shape.rank(&e).expect("unit exponent within degree");
                jet.coeffs[slot] = 1.0;
            }
            jet
        })
        .collect())
}

impl Jet {
    pub fn constant(shape: &Arc<ExponentSet>, value: f64) -> Self {
        let mut coeffs = vec![0.0; shape.len()];
        coeffs[0] = value;
        Self { shape: Arc::clone(shape), coeffs }
    }

    /// Jet from raw coefficients in the shape's lexicographic exponent order.
    pub fn from_coeffs(shape: &Arc<ExponentSet>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!("jet needs {} coefficients, got {}", shape.len(), coeffs.len())));
        }
        Ok(Self { shape: Arc::clone(shape), coeffs })
    }

    pub fn shape(&self) -> &Arc<ExponentSet> {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn max_degree(&self) -> usize {
        self.shape.max_degree()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// The degree-0 coefficient, i.e. the function value at the expansion point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of t^α; zero when |α| exceeds the jet degree.
    pub fn coeff(&self, alpha: &[u8]) -> Result<f64> {
        if alpha.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: alpha.len() });
        }
        Ok(self.shape.rank(alpha).map_or(0.0, |r| self.coeffs[r]))
    }

    fn check_same_shape(&self, other: &Jet) -> Result<()> {
        if Arc::ptr_eq(&self.shape, &other.shape)
            || (self.dim() == other.dim() && self.max_degree() == other.max_degree())
        {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "jets of dim {}/degree {} and dim {}/degree {}",
                self.dim(),
                self.max_degree(),
                other.dim(),
                other.max_degree()
            )))
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Result<Jet> {
        self.check_same_shape(other)?;
        Ok(Jet {
            shape: Arc::clone(&self.shape),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&x, &y)| f(x, y)).collect(),
        })
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, factor: f64) -> Jet {
        Jet { shape: Arc::clone(&self.shape), coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn add_constant(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Cauchy product truncated to total degree ≤ m.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_same_shape(other)?;
        let shape = &self.shape;
        let m = shape.max_degree();
        let mut out = vec![0.0; shape.len()];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let room = m - shape.degree(i);
            for (j, &y) in other.coeffs.iter().enumerate() {
                if y == 0.0 || shape.degree(j) > room {
                    continue;
                }
                let slot = shape.rank_of_sum(i, j).expect("degree checked");
                out[slot] += x * y;
            }
        }
        Ok(Jet { shape: Arc::clone(shape), coeffs: out })
    }

    /// u^p via the binomial series around the constant term:
    /// u₀^p · Σ_{j≤m} C(p, j) wʲ with w = u/u₀ − 1.
    ///
    /// w has no constant term, so wʲ vanishes beyond degree m and the series
    /// truncates exactly; for integer 0 ≤ p ≤ m the coefficients C(p, j) also
    /// vanish past j = p.
    pub fn powf(&self, p: f64) -> Result<Jet> {
        let u0 = self.value();
        if !(u0 > 0.0) || !u0.is_finite() {
            return Err(Error::Domain(format!("real power needs a positive constant term, got {u0}")));
        }
        let mut w = self.scale(1.0 / u0);
        w.coeffs[0] = 0.0;
        let m = self.max_degree();
        // Horner: acc = C(p,m); acc = acc·w + C(p,j) for j = m-1 .. 0
        let mut acc = Jet::constant(&self.shape, generalized_binomial(p, m));
        for j in (0..m).rev() {
            acc = acc.mul(&w)?.add_constant(generalized_binomial(p, j));
        }
        Ok(acc.scale(u0.powf(p)))
    }

    /// k-th derivative tensor at the expansion point: D^α f(a) = α! · c_α.
    pub fn extract_tensor(&self, k: usize) -> Result<SymmetricTensor> {
        if k > self.max_degree() {
            return Err(Error::Range(format!("tensor order {k} exceeds jet degree {}", self.max_degree())));
        }
        let n = self.dim();
        SymmetricTensor::from_fn(k, n, |ms| {
            let alpha = multiset_to_exponent(ms, n);
            let slot = self.shape.rank(&alpha).expect("|α| = k ≤ m");
            exponent_factorial(&alpha) as f64 * self.coeffs[slot]
        })
    }
}
