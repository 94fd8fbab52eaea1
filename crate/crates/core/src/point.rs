use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A point `s = sigma + i t` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !sigma.is_finite() || !t.is_finite() {
            return Err(Error::Domain(format!("non-finite point {sigma} + {t}i")));
        }
        Ok(Self { sigma, t })
    }

    /// Construct without the finiteness check; for literals known to be finite.
    pub const fn at(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    pub fn conj(self) -> Self {
        Self { sigma: self.sigma, t: -self.t }
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

/// A computed complex value together with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluatedValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub abs_error: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut tup = s.serialize_tuple(2)?;
    tup.serialize_element(&z.re)?;
    tup.serialize_element(&z.im)?;
    tup.end()
}
