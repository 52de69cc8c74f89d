//! Income and price series of a bounded-income listing.
//!
//! With first price `P1`, income ceiling `I∞` and coefficient `ξ ∈ [0, 1]`:
//!
//! ```text
//! I(n) = min(P1 · (1 + ξ(n − 1)), I∞)      P(n) = I(n) / n
//! ```
//!
//! Each purchase `n ≥ 2` pays `P(n)`, which is split into the seller's income
//! growth `I(n) − I(n−1)` and an equal refund `P(n−1) − P(n)` to each of the
//! `n − 1` earlier buyers. Everything here is exact; rounding to cents lives
//! in [`crate::settlement`].

use serde::{Deserialize, Serialize};

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::frac::{Fraction, FractionError};
use crate::money::{Cents, CENTS_PER_CUP};
use crate::scalar::{self, ExactInt};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PricingError {
    #[error("first price must be at least one cent, got {0}")]
    FirstPriceTooSmall(Cents),
    #[error("income ceiling {i_inf} is below the first price {p1}")]
    CeilingBelowFirstPrice { p1: Cents, i_inf: Cents },
    #[error("coefficient {0} is outside [0, 1]")]
    XiOutOfRange(Fraction),
    #[error(transparent)]
    Fraction(#[from] FractionError),
    #[error("empty or reversed interval {from}..{to}")]
    EmptyInterval { from: u64, to: u64 },
    #[error("buyer joined at {join} after the interval start {from}")]
    JoinAfterInterval { join: u64, from: u64 },
}

/// The income/redistribution balance coefficient, a fraction in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Xi(Fraction);

impl Xi {
    pub const ZERO: Xi = Xi(Fraction::from_reduced(0, 1));
    pub const ONE: Xi = Xi(Fraction::from_reduced(1, 1));

    pub fn new(num: u64, den: u64) -> Result<Self, PricingError> {
        Self::from_fraction(Fraction::new(num, den)?)
    }

    pub fn from_fraction(f: Fraction) -> Result<Self, PricingError> {
        if f.num() > f.den() {
            return Err(PricingError::XiOutOfRange(f));
        }
        Ok(Xi(f))
    }

    pub fn parse(text: &str) -> Result<Self, PricingError> {
        Self::from_fraction(Fraction::parse(text)?)
    }

    pub fn num(&self) -> u64 {
        self.0.num()
    }

    pub fn den(&self) -> u64 {
        self.0.den()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.num() == self.0.den()
    }

    pub fn to_ratio<I: ExactInt>(&self) -> Ratio<I> {
        // Fraction terms are bounded by i64::MAX.
        scalar::ratio(self.num() as i64, self.den() as i64)
    }
}

impl std::fmt::Display for Xi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::str::FromStr for Xi {
    type Err = PricingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Xi::parse(s)
    }
}

impl<'de> Deserialize<'de> for Xi {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = Fraction::deserialize(d)?;
        Xi::from_fraction(f).map_err(serde::de::Error::custom)
    }
}

/// How exact prices are turned into whole cents for the paying buyer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingMode {
    /// Pay the ceiling. Flows stay closed with a non-negative escrow, but
    /// nobody ever pays less than one cent.
    #[default]
    CeilStrict,
    /// Half-up rounding. Late buyers pay nothing once the price drops under
    /// half a cent; the escrow is signed.
    Nearest,
}

impl std::str::FromStr for RoundingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ceil" | "ceil_strict" => Ok(RoundingMode::CeilStrict),
            "nearest" => Ok(RoundingMode::Nearest),
            other => Err(format!(
                "unknown rounding mode {other:?}, expected ceil or nearest"
            )),
        }
    }
}

/// `(P1, I∞, ξ)` plus the rounding mode. Always valid once constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct PriceParams {
    p1: Cents,
    i_inf: Cents,
    xi: Xi,
    #[serde(default)]
    rounding_mode: RoundingMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    p1: Cents,
    i_inf: Cents,
    xi: Xi,
    #[serde(default)]
    rounding_mode: RoundingMode,
}

impl TryFrom<RawParams> for PriceParams {
    type Error = PricingError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        PriceParams::new(raw.p1, raw.i_inf, raw.xi, raw.rounding_mode)
    }
}

impl PriceParams {
    pub fn new(
        p1: Cents,
        i_inf: Cents,
        xi: Xi,
        rounding_mode: RoundingMode,
    ) -> Result<Self, PricingError> {
        if p1.get() < 1 {
            return Err(PricingError::FirstPriceTooSmall(p1));
        }
        if i_inf < p1 {
            return Err(PricingError::CeilingBelowFirstPrice { p1, i_inf });
        }
        Ok(Self {
            p1,
            i_inf,
            xi,
            rounding_mode,
        })
    }

    /// Shorthand for whole-cup prices with the default rounding mode.
    pub fn cups(p1: i64, i_inf: i64, xi: Xi) -> Result<Self, PricingError> {
        Self::new(
            Cents::from_cups(p1),
            Cents::from_cups(i_inf),
            xi,
            RoundingMode::CeilStrict,
        )
    }

    pub fn p1(&self) -> Cents {
        self.p1
    }

    pub fn i_inf(&self) -> Cents {
        self.i_inf
    }

    pub fn xi(&self) -> Xi {
        self.xi
    }

    pub fn rounding_mode(&self) -> RoundingMode {
        self.rounding_mode
    }

    pub fn with_rounding(mut self, mode: RoundingMode) -> Self {
        self.rounding_mode = mode;
        self
    }

    /// Smallest buyer count at which income reaches the ceiling, or `None`
    /// when it never does (`ξ = 0` with `I∞ > P1`).
    pub fn cap_index(&self) -> Option<u64> {
        if self.i_inf == self.p1 {
            return Some(1);
        }
        if self.xi.is_zero() {
            return None;
        }
        // 1 + ceil((I∞ − P1) · den / (num · P1))
        let gap = (self.i_inf - self.p1).get() as u128 * self.xi.den() as u128;
        let step = self.xi.num() as u128 * self.p1.get() as u128;
        Some(1 + gap.div_ceil(step) as u64)
    }
}

/// The series of one parameter set, evaluated over `Ratio<I>`.
///
/// All amounts are in cups. `*_cents` variants scale by 100 without rounding.
#[derive(Debug, Clone)]
pub struct Curve<I: ExactInt> {
    params: PriceParams,
    p1: Ratio<I>,
    i_inf: Ratio<I>,
    xi: Ratio<I>,
}

impl<I: ExactInt> Curve<I> {
    pub fn new(params: PriceParams) -> Self {
        Self {
            p1: scalar::ratio(params.p1.get(), CENTS_PER_CUP),
            i_inf: scalar::ratio(params.i_inf.get(), CENTS_PER_CUP),
            xi: params.xi.to_ratio(),
            params,
        }
    }

    pub fn params(&self) -> &PriceParams {
        &self.params
    }

    fn count(n: u64) -> Ratio<I> {
        scalar::integer(i64::try_from(n).expect("buyer count fits in i64"))
    }

    /// Cumulative seller income after `n ≥ 1` purchases.
    pub fn income(&self, n: u64) -> Ratio<I> {
        assert!(n >= 1, "income is defined for n >= 1");
        let growth = Ratio::one() + &self.xi * Self::count(n - 1);
        let uncapped = &self.p1 * growth;
        if uncapped < self.i_inf {
            uncapped
        } else {
            self.i_inf.clone()
        }
    }

    /// Price every one of the first `n ≥ 1` buyers has paid once `n` have bought.
    pub fn price(&self, n: u64) -> Ratio<I> {
        self.income(n) / Self::count(n)
    }

    /// Seller income growth from purchase `n ≥ 2`: `ξP1` before the cap,
    /// the remainder up to `I∞` on the crossing purchase, zero after.
    pub fn seller_delta(&self, n: u64) -> Ratio<I> {
        assert!(n >= 2, "the first purchase has no delta");
        self.income(n) - self.income(n - 1)
    }

    /// Refund owed to each earlier buyer by purchase `n ≥ 2`.
    pub fn refund_per_buyer(&self, n: u64) -> Ratio<I> {
        assert!(n >= 2, "the first purchase refunds nobody");
        self.price(n - 1) - self.price(n)
    }

    /// Seller income accrued while the count moves from `from_n` to `to_n`.
    /// `from_n = 0` means before the first sale, so the first price is included.
    pub fn seller_delta_batch(&self, from_n: u64, to_n: u64) -> Result<Ratio<I>, PricingError> {
        if from_n >= to_n {
            return Err(PricingError::EmptyInterval {
                from: from_n,
                to: to_n,
            });
        }
        let start = if from_n == 0 {
            Ratio::zero()
        } else {
            self.income(from_n)
        };
        Ok(self.income(to_n) - start)
    }

    /// Refund accrued by a holder who joined at `join_n` while the count moved
    /// from `from_n` to `to_n`. An empty interval yields zero.
    pub fn refund_batch(
        &self,
        join_n: u64,
        from_n: u64,
        to_n: u64,
    ) -> Result<Ratio<I>, PricingError> {
        if join_n == 0 || from_n > to_n {
            return Err(PricingError::EmptyInterval {
                from: from_n,
                to: to_n,
            });
        }
        if join_n > from_n {
            return Err(PricingError::JoinAfterInterval {
                join: join_n,
                from: from_n,
            });
        }
        Ok(self.price(from_n) - self.price(to_n))
    }

    pub fn income_cents(&self, n: u64) -> Ratio<I> {
        self.income(n) * scalar::integer::<I>(CENTS_PER_CUP)
    }

    pub fn price_cents(&self, n: u64) -> Ratio<I> {
        self.price(n) * scalar::integer::<I>(CENTS_PER_CUP)
    }
}
