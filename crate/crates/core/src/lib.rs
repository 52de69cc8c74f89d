//! Settlement engine and event-sourced ledger for 1-to-n sales of intangible
//! goods.
//!
//! A seller lists a good with a first-buyer price `P1` and a lifetime income
//! ceiling `I∞`. Every new purchase is split between the seller (until the
//! ceiling is reached) and refunds to everyone who bought earlier, so at any
//! moment all buyers have paid the same price and that price falls towards
//! zero as the buyer count grows.
//!
//! Layers, bottom-up:
//!
//! - [`pricing`]: exact income/price series, generic over the integer type
//!   backing the rationals ([`ExactCurve`] for arbitrary precision,
//!   [`Curve128`] for a fixed-width fast path).
//! - [`settlement`]: materialization into integer cup-cents, escrow dust and
//!   sum-zero [`SettlementPlan`]s.
//! - [`ledger`]: accounts, listings, holdings, the append-only event log,
//!   replay and audit.
//! - [`exchange`]: bank mint/redeem with an authority-set rate spread.
//! - [`pricetag`]: the `1.2cup^18000@2012-10-18#345` notation.
//! - [`cli`]: the `cupnet` command-line front end.

pub mod canonical;
pub mod cli;
pub mod exchange;
pub mod frac;
pub mod id;
pub mod ledger;
pub mod money;
pub mod pricetag;
pub mod pricing;
pub mod scalar;
pub mod settlement;

use num_bigint::BigInt;
use num_rational::Ratio;

pub use ledger::{Ledger, LedgerError, LedgerEvent};
pub use money::Cents;
pub use pricing::{Curve, PriceParams, RoundingMode, Xi};
pub use settlement::SettlementPlan;

/// Arbitrary-precision rational amount of cups.
pub type ExactAmount = Ratio<BigInt>;

/// Series over arbitrary-precision rationals. The reference path.
pub type ExactCurve = Curve<BigInt>;

/// Series over 128-bit rationals. Overflow panics when overflow checks are
/// on, so it is only suitable for moderate parameters.
pub type Curve128 = Curve<i128>;

/// Series over 64-bit rationals.
pub type Curve64 = Curve<i64>;
