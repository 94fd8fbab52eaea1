//! Positive reals stored as their natural logarithm.

use std::cmp::Ordering;
use std::ops::{Div, Mul};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogScaleReal {
    pub ln_value: f64,
}

impl LogScaleReal {
    pub const ONE: Self = Self { ln_value: 0.0 };

    pub const fn from_ln(ln_value: f64) -> Self {
        Self { ln_value }
    }

    pub fn new(x: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("log-scale value must be positive and finite, got {x}")));
        }
        Ok(Self { ln_value: x.ln() })
    }

    /// `exp(exp(k))`.
    pub fn double_exp(k: f64) -> Self {
        Self { ln_value: k.exp() }
    }

    pub fn ln(self) -> f64 {
        self.ln_value
    }

    /// `ln ln x`; requires `x > 1`.
    pub fn ln_ln(self) -> Result<f64> {
        if self.ln_value <= 0.0 {
            return Err(Error::Domain("ln ln x needs x > 1".into()));
        }
        Ok(self.ln_value.ln())
    }

    /// The represented value; `inf` or `0` outside the f64 range.
    pub fn to_f64(self) -> f64 {
        self.ln_value.exp()
    }

    pub fn powf(self, p: f64) -> Self {
        Self { ln_value: self.ln_value * p }
    }

    pub fn scale(self, c: f64) -> Result<Self> {
        Ok(self * Self::new(c)?)
    }

    /// `self + other` by log-sum-exp.
    pub fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.ln_value >= other.ln_value { (self, other) } else { (other, self) };
        Self { ln_value: hi.ln_value + (lo.ln_value - hi.ln_value).exp().ln_1p() }
    }

    /// `self - other`, defined when `self > other`.
    pub fn sub(self, other: Self) -> Result<Self> {
        if !(self.ln_value > other.ln_value) {
            return Err(Error::Domain("log-scale difference would be non-positive".into()));
        }
        Ok(Self { ln_value: self.ln_value + (-(other.ln_value - self.ln_value).exp()).ln_1p() })
    }

    pub fn add_f64(self, c: f64) -> Result<Self> {
        Ok(self.add(Self::new(c)?))
    }
}

impl Mul for LogScaleReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self { ln_value: self.ln_value + rhs.ln_value }
    }
}

impl Div for LogScaleReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self { ln_value: self.ln_value - rhs.ln_value }
    }
}

impl PartialOrd for LogScaleReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln_value.partial_cmp(&other.ln_value)
    }
}
