use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::canonical;
use crate::exchange::Voucher;
use crate::frac::Fraction;
use crate::id::{AccountId, ListingId};
use crate::money::Cents;
use crate::pricing::PriceParams;
use crate::settlement::{SettleMode, SettlementPlan};

use super::Role;

/// One entry of the append-only log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEvent {
    pub seq: u64,
    /// Caller-supplied logical date; non-decreasing along the log.
    pub at: NaiveDate,
    pub event: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    AccountOpened {
        account: AccountId,
        role: Role,
    },
    RateSet {
        authority: AccountId,
        buy_rate: Fraction,
        sell_rate: Fraction,
    },
    ListingCreated {
        listing: ListingId,
        seller: AccountId,
        params: PriceParams,
        birth_date: NaiveDate,
    },
    Purchase {
        listing: ListingId,
        buyer: AccountId,
        mode: SettleMode,
        plan: SettlementPlan,
    },
    BatchSettle {
        listing: ListingId,
        from_n: u64,
        to_n: u64,
        plan: SettlementPlan,
    },
    Mint {
        bank: AccountId,
        person: AccountId,
        fiat_cents: i64,
        cup_cents: Cents,
        #[serde(with = "canonical::exact")]
        residue: Ratio<BigInt>,
        plan: SettlementPlan,
    },
    Redeem {
        bank: AccountId,
        person: AccountId,
        cup_cents: Cents,
        #[serde(with = "canonical::exact")]
        spread: Ratio<BigInt>,
        #[serde(with = "canonical::exact")]
        residue: Ratio<BigInt>,
        voucher: Voucher,
        plan: SettlementPlan,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::AccountOpened { .. } => "account_opened",
            Payload::RateSet { .. } => "rate_set",
            Payload::ListingCreated { .. } => "listing_created",
            Payload::Purchase { .. } => "purchase",
            Payload::BatchSettle { .. } => "batch_settle",
            Payload::Mint { .. } => "mint",
            Payload::Redeem { .. } => "redeem",
        }
    }

    pub fn plan(&self) -> Option<&SettlementPlan> {
        match self {
            Payload::Purchase { plan, .. }
            | Payload::BatchSettle { plan, .. }
            | Payload::Mint { plan, .. }
            | Payload::Redeem { plan, .. } => Some(plan),
            _ => None,
        }
    }

    pub fn plan_mut(&mut self) -> Option<&mut SettlementPlan> {
        match self {
            Payload::Purchase { plan, .. }
            | Payload::BatchSettle { plan, .. }
            | Payload::Mint { plan, .. }
            | Payload::Redeem { plan, .. } => Some(plan),
            _ => None,
        }
    }
}
