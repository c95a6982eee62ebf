//! Scalar abstraction shared by every engine.
//!
//! All inference code is written against [`Prob`] so the same algorithms run
//! in `f64` (the default everywhere) or `f32`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A real number type usable as a probability.
pub trait Prob:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Absolute tolerance used for row-sum validation and comparisons.
    fn tolerance() -> Self;

    /// Converts an `f64` literal. Every `Prob` type can represent an
    /// approximation of any finite `f64`.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite probability")
    }
}

impl Prob for f64 {
    fn tolerance() -> f64 {
        1e-9
    }
}

impl Prob for f32 {
    fn tolerance() -> f32 {
        1e-5
    }
}
