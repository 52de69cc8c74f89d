//! Integer backings for the exact rationals used by the series math.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive};

/// Signed integer type that can back a `Ratio` for the pricing series.
///
/// Implemented for `i64`, `i128` and `BigInt`. The fixed-width types are
/// exact as long as nothing overflows; `BigInt` never does.
pub trait ExactInt:
    Integer + Signed + Clone + From<i64> + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

impl ExactInt for i64 {}
impl ExactInt for i128 {}
impl ExactInt for BigInt {}

pub fn ratio<I: ExactInt>(num: i64, den: i64) -> Ratio<I> {
    Ratio::new(I::from(num), I::from(den))
}

pub fn integer<I: ExactInt>(value: i64) -> Ratio<I> {
    Ratio::from_integer(I::from(value))
}

/// Largest integer `<= x`, as `i64`. Panics if it does not fit.
pub fn floor_i64<I: ExactInt>(x: &Ratio<I>) -> i64 {
    x.floor()
        .to_integer()
        .to_i64()
        .expect("floor does not fit in i64")
}

/// Smallest integer `>= x`, as `i64`. Panics if it does not fit.
pub fn ceil_i64<I: ExactInt>(x: &Ratio<I>) -> i64 {
    x.ceil()
        .to_integer()
        .to_i64()
        .expect("ceil does not fit in i64")
}

/// Half-up rounding: `floor(x + 1/2)`.
pub fn round_half_up_i64<I: ExactInt>(x: &Ratio<I>) -> i64 {
    floor_i64(&(x + ratio::<I>(1, 2)))
}

/// Renders as `num/den`, or just `num` when the value is an integer.
pub fn to_fraction_string<I: ExactInt>(x: &Ratio<I>) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Converts between backings. Used to compare fixed-width results against
/// the arbitrary-precision reference.
pub fn to_big<I: ExactInt>(x: &Ratio<I>) -> Ratio<BigInt> {
    let numer: BigInt = x.numer().to_string().parse().expect("integer display");
    let denom: BigInt = x.denom().to_string().parse().expect("integer display");
    Ratio::new(numer, denom)
}
