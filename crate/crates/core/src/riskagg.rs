//! Square-root risk aggregation √(xᵀRx), its Euler allocation and the exact
//! quadratic Taylor identity for the squared capital.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homfun::{check_positive_definite, HomogeneousFunction, SEGMENT_SAMPLES};
use crate::taylor::taylor_power_collapsed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Portfolio {
    #[serde(rename = "R")]
    pub matrix: Vec<Vec<f64>>,
    pub exposures: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationReport {
    pub capital: f64,
    pub allocations: Vec<f64>,
    /// |Σ allocations − capital|
    pub check_sum_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticIdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

fn quadratic_form(r: &[Vec<f64>], x: &[f64]) -> (Vec<f64>, f64) {
    let rx: Vec<f64> = r.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
    let q = x.iter().zip(&rx).map(|(a, b)| a * b).sum();
    (rx, q)
}

impl Portfolio {
    pub fn new(matrix: Vec<Vec<f64>>, exposures: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        let p = Self { matrix, exposures, labels };
        p.validate()?;
        Ok(p)
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, PortfolioParseError> {
        let p: Portfolio = serde_json::from_str(text).map_err(PortfolioParseError::Json)?;
        p.validate().map_err(PortfolioParseError::Invalid)?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.len() != self.exposures.len() {
            return Err(Error::DimensionMismatch { expected: self.matrix.len(), got: self.exposures.len() });
        }
        if let Some(labels) = &self.labels {
            if labels.len() != self.exposures.len() {
                return Err(Error::DimensionMismatch { expected: self.exposures.len(), got: labels.len() });
            }
        }
        if self.exposures.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("exposures must be finite".into()));
        }
        check_positive_definite(&self.matrix)
    }

    pub fn dim(&self) -> usize {
        self.exposures.len()
    }

    /// The capital function √(xᵀRx) as a catalog function.
    pub fn capital_function(&self) -> Result<HomogeneousFunction> {
        HomogeneousFunction::quadratic_root(self.matrix.clone())
    }

    /// √(xᵀRx); the origin is outside the smooth domain.
    pub fn aggregate_capital(&self) -> Result<f64> {
        if self.exposures.iter().all(|&v| v == 0.0) {
            return Err(Error::Domain("zero exposure vector".into()));
        }
        let (_, q) = quadratic_form(&self.matrix, &self.exposures);
        Ok(q.sqrt())
    }

    /// allocᵢ = xᵢ (Rx)ᵢ / √(xᵀRx), summing to the aggregate capital.
    pub fn euler_allocation(&self) -> Result<Vec<f64>> {
        let (rx, q) = quadratic_form(&self.matrix, &self.exposures);
        let capital = q.sqrt();
        if !(capital > 0.0) {
            return Err(Error::ZeroCapital);
        }
        Ok(self.exposures.iter().zip(&rx).map(|(x, y)| x * y / capital).collect())
    }

    pub fn allocation_report(&self) -> Result<AllocationReport> {
        let capital = self.aggregate_capital()?;
        let allocations = self.euler_allocation()?;
        let total: f64 = allocations.iter().sum();
        Ok(AllocationReport { capital, allocations, check_sum_gap: (total - capital).abs() })
    }

    /// Second-order Taylor polynomial of the squared capital around the
    /// exposures, in collapsed form, against bᵀRb at `target`.
    pub fn capital_quadratic_identity(&self, target: &[f64]) -> Result<QuadraticIdentityReport> {
        let f = self.capital_function()?;
        if target.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: target.len() });
        }
        if !f.segment_in_domain(&self.exposures, target, SEGMENT_SAMPLES) {
            return Err(Error::Domain("segment from exposures to target passes through the origin".into()));
        }
        let lhs = taylor_power_collapsed(&f, &self.exposures, target, 2)?;
        let (_, rhs) = quadratic_form(&self.matrix, target);
        Ok(QuadraticIdentityReport { lhs, rhs, gap: (lhs - rhs).abs() })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PortfolioParseError {
    #[error("malformed portfolio JSON: {0}")]
    Json(serde_json::Error),
    #[error(transparent)]
    Invalid(Error),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.5], vec![0.5, 1.0]]
    }

    fn ident() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0], vec![0.0, 1.0]]
    }

    #[test]
    fn capital_examples() {
        let p = Portfolio::new(ident(), vec![3.0, 4.0], None).unwrap();
        assert_eq!(p.aggregate_capital().unwrap(), 5.0);
        let p = Portfolio::new(corr(), vec![1.0, 1.0], None).unwrap();
        assert!((p.aggregate_capital().unwrap() - 1.7320508).abs() < 1e-7);
        let p = Portfolio::new(corr(), vec![0.0, 0.0], None).unwrap();
        assert!(matches!(p.aggregate_capital(), Err(Error::Domain(_))));
        assert_eq!(p.euler_allocation(), Err(Error::ZeroCapital));
    }

    #[test]
    fn allocation_examples() {
        let p = Portfolio::new(corr(), vec![1.0, 1.0], None).unwrap();
        let a = p.euler_allocation().unwrap();
        // Rx = (1.5, 1.5), capital √3
        for v in &a {
            assert!((v - 1.5 / 3f64.sqrt()).abs() < 1e-15);
            assert!((v - 0.8660254).abs() < 1e-7);
        }

        let p = Portfolio::new(ident(), vec![3.0, 4.0], None).unwrap();
        let a = p.euler_allocation().unwrap();
        assert!((a[0] - 1.8).abs() < 1e-15);
        assert!((a[1] - 3.2).abs() < 1e-15);

        let p = Portfolio::new(vec![vec![1.0]], vec![7.0], None).unwrap();
        assert_eq!(p.euler_allocation().unwrap(), vec![7.0]);
    }

    #[test]
    fn identity_examples() {
        let p = Portfolio::new(ident(), vec![3.0, 4.0], None).unwrap();
        let r = p.capital_quadratic_identity(&[1.0, 2.0]).unwrap();
        assert_eq!(r.rhs, 5.0);
        assert!(r.gap <= 1e-10 * (1.0 + r.rhs));

        let p = Portfolio::new(corr(), vec![1.0, 1.0], None).unwrap();
        let r = p.capital_quadratic_identity(&[2.0, 0.0]).unwrap();
        assert_eq!(r.rhs, 4.0);
        assert!(r.gap <= 1e-10 * (1.0 + r.rhs));

        let r = p.capital_quadratic_identity(&[1.0, 1.0]).unwrap();
        assert_eq!(r.rhs, 3.0);
        assert!(r.gap <= 1e-10 * (1.0 + r.rhs));

        assert!(matches!(p.capital_quadratic_identity(&[-1.0, -1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn validation() {
        assert_eq!(
            Portfolio::new(vec![vec![1.0, 2.0], vec![2.0, 1.0]], vec![1.0, 1.0], None),
            Err(Error::NotPositiveDefinite)
        );
        assert!(matches!(Portfolio::new(corr(), vec![1.0], None), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            Portfolio::new(corr(), vec![1.0, 2.0], Some(vec!["a".into()])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let text = r#"{"R": [[1, 0.5], [0.5, 1]], "exposures": [1, 1], "labels": ["fx", "ir"]}"#;
        let p = Portfolio::from_json(text).unwrap();
        assert_eq!(p.labels.as_deref(), Some(&["fx".to_string(), "ir".to_string()][..]));
        assert!(matches!(Portfolio::from_json("{"), Err(PortfolioParseError::Json(_))));
        assert!(matches!(
            Portfolio::from_json(r#"{"R": [[1, 2], [2, 1]], "exposures": [1, 1]}"#),
            Err(PortfolioParseError::Invalid(Error::NotPositiveDefinite))
        ));

        let report = p.allocation_report().unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert!(v.get("capital").is_some());
        assert!(v.get("allocations").is_some());
        assert!(v.get("check_sum_gap").is_some());
    }
}
