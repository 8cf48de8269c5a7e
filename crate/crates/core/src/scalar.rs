//! Scalar types accepted as matrix entries.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Num, Signed};

/// An ordered ring element usable as a nonnegative matrix entry.
///
/// Only the zero pattern of a matrix matters to the support computations,
/// so exact types (integers, rationals) and floats are treated alike.
/// Floats additionally carry a floor below which a nonzero entry is
/// rejected, since its support membership would hinge on rounding.
pub trait Entry: Num + PartialOrd + Copy + Debug + Display + Send + Sync {
    /// Smallest nonzero magnitude accepted, if the type needs one.
    fn ambiguity_floor() -> Option<Self> {
        None
    }
}

impl Entry for f64 {
    fn ambiguity_floor() -> Option<Self> {
        Some(1e-12)
    }
}

impl Entry for f32 {
    fn ambiguity_floor() -> Option<Self> {
        Some(1e-12)
    }
}

impl Entry for u32 {}
impl Entry for u64 {}
impl Entry for i32 {}
impl Entry for i64 {}

impl<T> Entry for Ratio<T> where T: num_integer::Integer + Signed + Clone + Copy + Debug + Display + Send + Sync {}
