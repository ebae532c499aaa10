use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A half-integer quantum number stored as twice its value, so `3/2` is `HalfInt(3)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice_value: i32) -> Self {
        HalfInt(twice_value)
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.0 - other.0) % 2 == 0
    }

    pub const fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    /// The integer value, if this is an integer.
    pub fn to_integer(self) -> Option<i32> {
        self.is_integer().then_some(self.0 / 2)
    }

    /// Checks that `(self, m)` is a valid spin/projection pair.
    pub fn check_projection(self, m: HalfInt) -> Result<()> {
        if self.0 < 0 {
            return Err(domain!("negative spin {self}"));
        }
        if !self.same_parity(m) {
            return Err(domain!("spin {self} and projection {m} differ in parity"));
        }
        if m.abs() > self {
            return Err(domain!("|m| = {} exceeds j = {self}", m.abs()));
        }
        Ok(())
    }

    /// Projections `j, j-1, ..., -j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        (0..=self.0.max(-1)).map(move |k| HalfInt(self.0 - 2 * k))
    }

    /// `lo, lo+1, ..., hi` (empty when `hi < lo`).
    pub fn range_inclusive(
        lo: HalfInt,
        hi: HalfInt,
    ) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let steps = if hi.0 >= lo.0 {
            (hi.0 - lo.0) / 2 + 1
        } else {
            0
        };
        (0..steps).map(move |k| HalfInt(lo.0 + 2 * k))
    }

    /// Dimension `2j + 1` of the spin-j representation.
    pub fn multiplet_dim(self) -> usize {
        debug_assert!(self.0 >= 0);
        (self.0 + 1) as usize
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Parses `"p/2"` or `"p/1"` as a fraction and a bare integer as a twice-value
    /// (`"3"` is `3/2`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<i32>()
                .map_err(|e| Error::Parse(format!("bad half-integer {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((num, den)) => match parse(den)? {
                1 => Ok(HalfInt(2 * parse(num)?)),
                2 => Ok(HalfInt(parse(num)?)),
                d => Err(Error::Parse(format!(
                    "denominator {d} in {s:?}; expected 1 or 2"
                ))),
            },
            None => Ok(HalfInt(parse(s)?)),
        }
    }
}
