use crate::error::{Error, Result};
use crate::jet::Jet;

/// Arithmetic needed by the homogeneous-function evaluators, implemented for
/// plain `f64` and for [`Jet`] so one routine yields both values and jets.
///
/// Operands are assumed to come from the same evaluation (same jet shape);
/// mixing shapes is a programming error and panics.
pub trait Scalar: Clone {
    fn constant_like(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, c: f64) -> Self;
    /// Real power; requires a positive value.
    fn powf(&self, p: f64) -> Result<Self>;

    /// Integer power by left-to-right repeated multiplication, so that the
    /// `f64` result equals the constant term of the jet result bit for bit.
    fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return self.constant_like(1.0);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.times(self);
        }
        acc
    }
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn scaled(&self, c: f64) -> Self {
        self * c
    }

    fn powf(&self, p: f64) -> Result<Self> {
        if !(*self > 0.0) || !self.is_finite() {
            return Err(Error::Domain(format!("real power needs a positive base, got {self}")));
        }
        Ok(f64::powf(*self, p))
    }
}

impl Scalar for Jet {
    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.shape(), c)
    }

    fn value(&self) -> f64 {
        Jet::value(self)
    }

    fn plus(&self, other: &Self) -> Self {
        self.add(other).expect("jets from one evaluation share a shape")
    }

    fn times(&self, other: &Self) -> Self {
        self.mul(other).expect("jets from one evaluation share a shape")
    }

    fn scaled(&self, c: f64) -> Self {
        self.scale(c)
    }

    fn powf(&self, p: f64) -> Result<Self> {
        Jet::powf(self, p)
    }
}
