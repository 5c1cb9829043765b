use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type used for log probabilities: `f32` or `f64`.
pub trait LogFloat:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    fn from_f32_lossy(v: f32) -> Self {
        Self::from_f32(v).unwrap_or_else(Self::nan)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl LogFloat for f32 {}
impl LogFloat for f64 {}

/// `ln(exp(a) + exp(b))` without overflow; handles `-inf` operands.
pub fn log_add<F: LogFloat>(a: F, b: F) -> F {
    if a == F::neg_infinity() {
        return b;
    }
    if b == F::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(Σ exp(x))` over an iterator.
pub fn log_sum<F: LogFloat, I: IntoIterator<Item = F>>(xs: I) -> F {
    xs.into_iter().fold(F::neg_infinity(), log_add)
}
