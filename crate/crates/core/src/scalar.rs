use std::fmt::{Debug, Display};

use nalgebra as na;
use num_traits as nt;

/// Floating-point scalar used by the numerical core.
pub trait Real:
    na::RealField + Copy + nt::FromPrimitive + nt::FloatConst + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding if `Self` is narrower.
    fn of(x: f64) -> Self {
        na::convert(x)
    }

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn to_f64(self) -> f64 {
        self.to_subset().unwrap_or(f64::NAN)
    }

    /// Tolerance for "normalized" checks: 1e-12 in double precision, a few
    /// hundred ulps otherwise.
    fn norm_tolerance() -> Self {
        let floor = Self::default_epsilon() * Self::of(512.0);
        let target = Self::of(1e-12);
        if target > floor {
            target
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
