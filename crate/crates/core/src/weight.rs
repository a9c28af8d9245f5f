//! Integer edge weights.
//!
//! Every distance comparison in the crate is exact, so weights are unsigned
//! primitive integers. Bound checks widen to `u128` (or to big rationals) and
//! never round.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{PrimInt, Unsigned};
use serde::ser::SerializeStruct;
use serde::Serialize;

pub trait Weight:
    PrimInt + Unsigned + Hash + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    fn widen(self) -> u128 {
        self.to_u128().expect("unsigned weight fits in u128")
    }

    /// Converts back from `u128`, clamping at `Self::max_value()`.
    fn narrow_saturating(x: u128) -> Self {
        <Self as num_traits::NumCast>::from(x).unwrap_or_else(Self::max_value)
    }
}

impl<T> Weight for T where
    T: PrimInt + Unsigned + Hash + Debug + Display + FromStr + Default + Send + Sync + 'static
{
}

/// `base^exp` in `u128`, saturating.
pub fn pow_sat(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// `ceil(log2(x))` for `x >= 1`; `0` for `x <= 1`.
pub fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// Exact non-negative ratio, serialized as `{"num": .., "den": ..}` in
/// lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Ratio<u128>);

impl Fraction {
    pub fn new(num: u128, den: u128) -> Self {
        Fraction(Ratio::new(num, den))
    }

    pub fn num(&self) -> u128 {
        *self.0.numer()
    }

    pub fn den(&self) -> u128 {
        *self.0.denom()
    }

    pub fn ceil(&self) -> u128 {
        self.0.ceil().to_integer()
    }
}

impl Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Fraction", 2)?;
        st.serialize_field("num", &self.num())?;
        st.serialize_field("den", &self.den())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_reduce() {
        let f = Fraction::new(6, 4);
        assert_eq!((f.num(), f.den()), (3, 2));
        assert_eq!(f.ceil(), 2);
        assert_eq!(f.to_string(), "3/2");
        assert!(Fraction::new(1, 3) < Fraction::new(1, 2));
    }

    #[test]
    fn ceil_log2_small_values() {
        let expect = [(1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (128, 7)];
        for (x, l) in expect {
            assert_eq!(ceil_log2(x), l, "x = {x}");
        }
    }

    #[test]
    fn narrow_saturates() {
        assert_eq!(u8::narrow_saturating(300), 255);
        assert_eq!(u32::narrow_saturating(7), 7);
        assert_eq!(pow_sat(u128::MAX, 2), u128::MAX);
    }
}
