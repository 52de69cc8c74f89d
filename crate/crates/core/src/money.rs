//! Integer cup-cents. One cup is 100 cup-cents.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

pub const CENTS_PER_CUP: i64 = 100;

/// A signed amount of cup-cents. Balances, debits and plan deltas all use it.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Cents(pub i64);

impl Cents {
    pub const ZERO: Cents = Cents(0);

    pub fn get(self) -> i64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn from_cups(cups: i64) -> Cents {
        Cents(cups * CENTS_PER_CUP)
    }

    /// Parses non-negative decimal cups with at most two fraction digits.
    pub fn parse_cups(text: &str) -> Option<Cents> {
        let (whole, frac) = text.split_once('.').unwrap_or((text, ""));
        let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if !digits(whole) || (text.contains('.') && !digits(frac)) || frac.len() > 2 {
            return None;
        }
        let frac = format!("{frac:0<2}").parse::<i64>().ok()?;
        whole
            .parse::<i64>()
            .ok()?
            .checked_mul(CENTS_PER_CUP)?
            .checked_add(frac)
            .map(Cents)
    }

    /// Decimal cups with trailing zeros trimmed: `120` → `1.2`, `1000` → `10`.
    pub fn to_cups_string(self) -> String {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / CENTS_PER_CUP as u64;
        let frac = abs % CENTS_PER_CUP as u64;
        match frac {
            0 => format!("{sign}{whole}"),
            f if f % 10 == 0 => format!("{sign}{whole}.{}", f / 10),
            f => format!("{sign}{whole}.{f:02}"),
        }
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}c", self.0)
    }
}

impl Add for Cents {
    type Output = Cents;
    fn add(self, rhs: Cents) -> Cents {
        Cents(self.0 + rhs.0)
    }
}

impl Sub for Cents {
    type Output = Cents;
    fn sub(self, rhs: Cents) -> Cents {
        Cents(self.0 - rhs.0)
    }
}

impl Neg for Cents {
    type Output = Cents;
    fn neg(self) -> Cents {
        Cents(-self.0)
    }
}

impl AddAssign for Cents {
    fn add_assign(&mut self, rhs: Cents) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Cents {
    fn sub_assign(&mut self, rhs: Cents) {
        self.0 -= rhs.0;
    }
}

impl Sum for Cents {
    fn sum<It: Iterator<Item = Cents>>(iter: It) -> Cents {
        Cents(iter.map(|c| c.0).sum())
    }
}

impl<'a> Sum<&'a Cents> for Cents {
    fn sum<It: Iterator<Item = &'a Cents>>(iter: It) -> Cents {
        iter.copied().sum()
    }
}
