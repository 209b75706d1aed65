//! Values on the Riemann sphere: finite complex numbers plus a single point
//! at infinity, with the chordal metric that treats both uniformly.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magnitudes above this are collapsed to the point at infinity during
/// evaluation, before f64 overflow can produce NaNs downstream. It sits high
/// enough that Newton refinement right next to a pole still sees finite
/// values: an order-3 pole approached to 1e-20 evaluates near 1e60, and
/// collapsing that to infinity would hide the very residual being measured.
pub const MAGNITUDE_CAP: f64 = 1e100;

/// A point on the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComplexValue {
    Finite(Complex64),
    Infinity,
}

impl ComplexValue {
    pub fn finite(re: f64, im: f64) -> Result<Self> {
        let z = Complex64::new(re, im);
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Domain(format!(
                "components of a finite value must be finite, got {re} + {im}i"
            )));
        }
        Ok(Self::clamped(z))
    }

    /// Classify a raw f64 pair: NaN/overflow and anything beyond the
    /// magnitude cap become the point at infinity.
    pub fn clamped(z: Complex64) -> Self {
        if !z.re.is_finite() || !z.im.is_finite() || z.norm_sqr() > MAGNITUDE_CAP * MAGNITUDE_CAP {
            ComplexValue::Infinity
        } else {
            ComplexValue::Finite(z)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ComplexValue::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ComplexValue::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ComplexValue::Finite(z) => Some(*z),
            ComplexValue::Infinity => None,
        }
    }

    /// Finite part or an error; used where infinity is a precondition violation.
    pub fn require_finite(&self, what: &str) -> Result<Complex64> {
        self.as_finite()
            .ok_or_else(|| Error::Domain(format!("{what} must be finite")))
    }

    /// Chordal distance on the Riemann sphere (diameter-2 normalization):
    /// d(a, b) = 2|a - b| / sqrt((1 + |a|^2)(1 + |b|^2)), d(a, inf) = 2 / sqrt(1 + |a|^2).
    pub fn chordal_distance(&self, other: &ComplexValue) -> f64 {
        match (self, other) {
            (ComplexValue::Finite(a), ComplexValue::Finite(b)) => {
                // Square roots taken separately: the product of the two
                // norm-squared factors can overflow for values near the cap.
                2.0 * (a - b).norm()
                    / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
            (ComplexValue::Finite(a), ComplexValue::Infinity)
            | (ComplexValue::Infinity, ComplexValue::Finite(a)) => {
                2.0 / (1.0 + a.norm_sqr()).sqrt()
            }
            (ComplexValue::Infinity, ComplexValue::Infinity) => 0.0,
        }
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue::clamped(z)
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexValue::Finite(z) => write!(f, "{z}"),
            ComplexValue::Infinity => write!(f, "inf"),
        }
    }
}

// JSON: finite values as [re, im], infinity as the string "inf".
/// Serialize a bare `Complex64` as a `[re, im]` pair, matching the finite
/// arm of `ComplexValue`.
pub(crate) fn serialize_c64<S: Serializer>(
    z: &Complex64,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(2))?;
    seq.serialize_element(&z.re)?;
    seq.serialize_element(&z.im)?;
    seq.end()
}

/// Serialize a slice of `Complex64` as a list of `[re, im]` pairs.
pub(crate) fn serialize_c64_slice<S: Serializer>(
    zs: &[Complex64],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl Serialize for ComplexValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ComplexValue::Finite(z) => {
                let mut seq = serializer.serialize_seq(Some(2))?;
                seq.serialize_element(&z.re)?;
                seq.serialize_element(&z.im)?;
                seq.end()
            }
            ComplexValue::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ValueVisitor;

        impl<'de> Visitor<'de> for ValueVisitor {
            type Value = ComplexValue;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a [re, im] pair or the string \"inf\"")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<ComplexValue, E> {
                match s {
                    "inf" | "infinity" => Ok(ComplexValue::Infinity),
                    other => Err(E::custom(format!("unknown point: {other:?}"))),
                }
            }

            fn visit_seq<A: de::SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<ComplexValue, A::Error> {
                let re: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                ComplexValue::finite(re, im).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(ValueVisitor)
    }
}
