//! Event-sourced system of record.
//!
//! Every state change is a [`LedgerEvent`] appended to one totally ordered
//! log. Commands are validated against the current state, turned into an
//! event (including its settlement plan) and only then applied, so replaying
//! the log re-executes each command and checks that it produces the recorded
//! event byte for byte.

mod audit;
mod event;
pub mod log;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::canonical;
use crate::exchange::{RateTable, TaxLedger, Voucher};
use crate::id::{AccountId, ListingId};
use crate::money::Cents;
use crate::pricing::{PriceParams, PricingError};
use crate::settlement::{Book, Holding, Party, SettleMode, SettlementError, SettlementPlan};

pub use audit::{audit_log, AuditReport, InvariantCheck};
pub use event::{LedgerEvent, Payload};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Person,
    Bank,
    Authority,
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "person" => Ok(Role::Person),
            "bank" => Ok(Role::Bank),
            "authority" => Ok(Role::Authority),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Person => "person",
            Role::Bank => "bank",
            Role::Authority => "authority",
        })
    }
}

/// A cup account. Balances never earn interest and a person's balance never
/// goes below zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Account {
    pub id: AccountId,
    pub role: Role,
    pub balance: Cents,
}

/// One intangible good for sale.
#[derive(Debug, Clone, Serialize)]
pub struct Listing {
    pub id: ListingId,
    pub birth_date: NaiveDate,
    #[serde(flatten)]
    pub book: Book,
}

impl Listing {
    pub fn seller(&self) -> &AccountId {
        self.book.seller()
    }

    pub fn params(&self) -> &PriceParams {
        self.book.params()
    }

    pub fn buyer_count(&self) -> u64 {
        self.book.buyer_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    #[error("unknown account {0}")]
    UnknownAccount(AccountId),
    #[error("account {0} already exists")]
    DuplicateAccount(AccountId),
    #[error("unknown listing {0}")]
    UnknownListing(ListingId),
    #[error("invalid params: {0}")]
    InvalidParams(#[from] PricingError),
    #[error("invalid rate: {0}")]
    InvalidRate(String),
    #[error("insufficient funds: {account} needs {needed} but has {available}")]
    InsufficientFunds {
        account: AccountId,
        needed: Cents,
        available: Cents,
    },
    #[error("{buyer} already holds {listing}")]
    DuplicateHolder {
        buyer: AccountId,
        listing: ListingId,
    },
    #[error("{buyer} cannot buy their own listing {listing}")]
    SelfPurchase {
        buyer: AccountId,
        listing: ListingId,
    },
    #[error("{requester} may not access {resource}")]
    AccessDenied {
        requester: AccountId,
        resource: String,
    },
    #[error("{account} is a {actual}, expected a {expected}")]
    WrongRole {
        account: AccountId,
        expected: Role,
        actual: Role,
    },
    #[error("no exchange rates have been set")]
    NoRatesSet,
    #[error("date {requested} is before the ledger clock {clock}")]
    ClockRegression {
        clock: NaiveDate,
        requested: NaiveDate,
    },
    #[error("cannot settle {listing} to {to_n}: settled to {settled_n} of {buyer_count}")]
    SettleOutOfRange {
        listing: ListingId,
        to_n: u64,
        settled_n: u64,
        buyer_count: u64,
    },
    #[error("amount must be positive, got {0}")]
    NonPositiveAmount(i64),
    #[error("corrupt log at sequence {seq}: {reason}")]
    CorruptLog { seq: u64, reason: String },
}

impl LedgerError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            LedgerError::UnknownAccount(_) => "UnknownAccount",
            LedgerError::DuplicateAccount(_) => "DuplicateAccount",
            LedgerError::UnknownListing(_) => "UnknownListing",
            LedgerError::InvalidParams(_) => "InvalidParams",
            LedgerError::InvalidRate(_) => "InvalidRate",
            LedgerError::InsufficientFunds { .. } => "InsufficientFunds",
            LedgerError::DuplicateHolder { .. } => "DuplicateHolder",
            LedgerError::SelfPurchase { .. } => "SelfPurchase",
            LedgerError::AccessDenied { .. } => "AccessDenied",
            LedgerError::WrongRole { .. } => "WrongRole",
            LedgerError::NoRatesSet => "NoRatesSet",
            LedgerError::ClockRegression { .. } => "ClockRegression",
            LedgerError::SettleOutOfRange { .. } => "SettleOutOfRange",
            LedgerError::NonPositiveAmount(_) => "NonPositiveAmount",
            LedgerError::CorruptLog { .. } => "CorruptLog",
        }
    }

    fn from_settlement(err: SettlementError, listing: &ListingId) -> Self {
        match err {
            SettlementError::DuplicateHolder { buyer } => LedgerError::DuplicateHolder {
                buyer,
                listing: listing.clone(),
            },
            SettlementError::SelfPurchase { buyer } => LedgerError::SelfPurchase {
                buyer,
                listing: listing.clone(),
            },
            SettlementError::InsufficientFunds {
                account,
                needed,
                available,
            } => LedgerError::InsufficientFunds {
                account,
                needed,
                available,
            },
            SettlementError::SettleOutOfRange {
                to_n,
                settled_n,
                buyer_count,
            } => LedgerError::SettleOutOfRange {
                listing: listing.clone(),
                to_n,
                settled_n,
                buyer_count,
            },
        }
    }
}

/// One row of a buyer's purchase history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryRow {
    pub listing: ListingId,
    pub join_index: u64,
    pub date: NaiveDate,
    pub gross_debit: Cents,
    /// Refunds accrued so far, whether or not a batch has paid them out yet.
    pub refunds: Cents,
    pub net_cost: Cents,
}

/// One row of a listing's buyer registry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuyerRow {
    pub buyer: AccountId,
    pub join_index: u64,
    pub joined: NaiveDate,
}

pub const GENESIS_DATE: NaiveDate = match NaiveDate::from_ymd_opt(1970, 1, 1) {
    Some(d) => d,
    None => panic!("valid date"),
};

#[derive(Debug, Clone)]
pub struct Ledger {
    pub(crate) accounts: BTreeMap<AccountId, Account>,
    pub(crate) listings: BTreeMap<ListingId, Listing>,
    pub(crate) purchases_by_buyer: BTreeMap<AccountId, Vec<ListingId>>,
    pub(crate) listings_by_seller: BTreeMap<AccountId, Vec<ListingId>>,
    pub(crate) rates: Option<RateTable>,
    pub(crate) tax: TaxLedger,
    /// Counter-account of the supply: always minus the cups in circulation.
    pub(crate) issuance: Cents,
    pub(crate) vouchers: Vec<Voucher>,
    pub(crate) events: Vec<LedgerEvent>,
    pub(crate) clock: NaiveDate,
}

impl Default for Ledger {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Serialize)]
struct Snapshot<'a> {
    accounts: Vec<&'a Account>,
    issuance: Cents,
    listings: Vec<&'a Listing>,
    rates: &'a Option<RateTable>,
    tax: &'a TaxLedger,
    vouchers: &'a [Voucher],
}

impl Ledger {
    pub fn new() -> Self {
        Self {
            accounts: BTreeMap::new(),
            listings: BTreeMap::new(),
            purchases_by_buyer: BTreeMap::new(),
            listings_by_seller: BTreeMap::new(),
            rates: None,
            tax: TaxLedger::default(),
            issuance: Cents::ZERO,
            vouchers: Vec::new(),
            events: Vec::new(),
            clock: GENESIS_DATE,
        }
    }

    // ---- clock and log ---------------------------------------------------

    pub fn clock(&self) -> NaiveDate {
        self.clock
    }

    /// Moves the logical clock forward. Dates never go backwards.
    pub fn advance_to(&mut self, date: NaiveDate) -> Result<(), LedgerError> {
        if date < self.clock {
            return Err(LedgerError::ClockRegression {
                clock: self.clock,
                requested: date,
            });
        }
        self.clock = date;
        Ok(())
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    pub fn next_seq(&self) -> u64 {
        self.events.len() as u64 + 1
    }

    pub fn last_seq(&self) -> u64 {
        self.events.len() as u64
    }

    pub fn to_log_text(&self) -> String {
        log::encode(&self.events)
    }

    /// SHA-256 over the canonical serialization of the ledger state.
    ///
    /// Log metadata (sequence numbers of purchases, settlement boundaries,
    /// the clock) is not part of the state, so two logs with the same
    /// purchases settled in different batches digest identically.
    pub fn digest(&self) -> String {
        canonical::digest_of(&Snapshot {
            accounts: self.accounts.values().collect(),
            issuance: self.issuance,
            listings: self.listings.values().collect(),
            rates: &self.rates,
            tax: &self.tax,
            vouchers: &self.vouchers,
        })
    }

    // ---- read access (operator level) -------------------------------------

    pub fn account(&self, id: &AccountId) -> Option<&Account> {
        self.accounts.get(id)
    }

    pub fn accounts(&self) -> impl Iterator<Item = &Account> {
        self.accounts.values()
    }

    pub fn listing(&self, id: &ListingId) -> Option<&Listing> {
        self.listings.get(id)
    }

    pub fn listings(&self) -> impl Iterator<Item = &Listing> {
        self.listings.values()
    }

    pub fn rates(&self) -> Option<&RateTable> {
        self.rates.as_ref()
    }

    pub fn tax(&self) -> &TaxLedger {
        &self.tax
    }

    pub fn vouchers(&self) -> &[Voucher] {
        &self.vouchers
    }

    /// Cups in circulation.
    pub fn supply(&self) -> Cents {
        -self.issuance
    }

    pub fn total_escrow(&self) -> Cents {
        self.listings.values().map(|l| l.book.escrow()).sum()
    }

    pub fn total_balances(&self) -> Cents {
        self.accounts.values().map(|a| a.balance).sum()
    }

    fn role_of(&self, id: &AccountId) -> Result<Role, LedgerError> {
        self.accounts
            .get(id)
            .map(|a| a.role)
            .ok_or_else(|| LedgerError::UnknownAccount(id.clone()))
    }

    pub(crate) fn require_role(&self, id: &AccountId, expected: Role) -> Result<(), LedgerError> {
        let actual = self.role_of(id)?;
        if actual != expected {
            return Err(LedgerError::WrongRole {
                account: id.clone(),
                expected,
                actual,
            });
        }
        Ok(())
    }

    fn listing_or_err(&self, id: &ListingId) -> Result<&Listing, LedgerError> {
        self.listings
            .get(id)
            .ok_or_else(|| LedgerError::UnknownListing(id.clone()))
    }

    // ---- access-scoped queries --------------------------------------------

    fn is_authority(&self, id: &AccountId) -> bool {
        matches!(self.role_of(id), Ok(Role::Authority))
    }

    fn guard(
        &self,
        owner: &AccountId,
        requester: &AccountId,
        resource: String,
    ) -> Result<(), LedgerError> {
        self.role_of(requester)?;
        if requester == owner || self.is_authority(requester) {
            Ok(())
        } else {
            Err(LedgerError::AccessDenied {
                requester: requester.clone(),
                resource,
            })
        }
    }

    /// Balance including refunds and seller income accrued in listings whose
    /// last batch has not been settled yet. Each listing contributes in O(1).
    pub fn balance_of(
        &self,
        account: &AccountId,
        as_seen_by: &AccountId,
    ) -> Result<Cents, LedgerError> {
        self.guard(account, as_seen_by, format!("balance of {account}"))?;
        let settled = self.account(account).expect("guarded").balance;
        let refunds: Cents = self
            .purchases_by_buyer
            .get(account)
            .into_iter()
            .flatten()
            .map(|l| self.listings[l].book.pending_refund(account))
            .sum();
        let income: Cents = self
            .listings_by_seller
            .get(account)
            .into_iter()
            .flatten()
            .map(|l| self.listings[l].book.pending_seller())
            .sum();
        Ok(settled + refunds + income)
    }

    /// Balance that can be spent right now: accruals become spendable once
    /// settled.
    pub fn spendable_balance(
        &self,
        account: &AccountId,
        as_seen_by: &AccountId,
    ) -> Result<Cents, LedgerError> {
        self.guard(account, as_seen_by, format!("balance of {account}"))?;
        Ok(self.account(account).expect("guarded").balance)
    }

    pub fn purchase_history(
        &self,
        buyer: &AccountId,
        as_seen_by: &AccountId,
    ) -> Result<Vec<HistoryRow>, LedgerError> {
        self.guard(buyer, as_seen_by, format!("purchase history of {buyer}"))?;
        let rows = self
            .purchases_by_buyer
            .get(buyer)
            .into_iter()
            .flatten()
            .map(|id| {
                let book = &self.listings[id].book;
                let h = book.holding(buyer).expect("indexed holding");
                let refunds = h.refunds_materialized + book.pending_refund(buyer);
                HistoryRow {
                    listing: id.clone(),
                    join_index: h.join_index,
                    date: h.joined,
                    gross_debit: h.gross_debit,
                    refunds,
                    net_cost: h.gross_debit - refunds,
                }
            })
            .collect();
        Ok(rows)
    }

    pub fn buyer_list(
        &self,
        listing: &ListingId,
        as_seen_by: &AccountId,
    ) -> Result<Vec<BuyerRow>, LedgerError> {
        let l = self.listing_or_err(listing)?;
        self.guard(l.seller(), as_seen_by, format!("buyers of {listing}"))?;
        Ok(l.book
            .holdings()
            .iter()
            .map(|h| BuyerRow {
                buyer: h.buyer.clone(),
                join_index: h.join_index,
                joined: h.joined,
            })
            .collect())
    }

    // ---- commands -----------------------------------------------------------

    pub fn open_account(
        &mut self,
        account: AccountId,
        role: Role,
    ) -> Result<&LedgerEvent, LedgerError> {
        let payload = self.prepare_open(account, role)?;
        Ok(self.commit(payload))
    }

    fn prepare_open(&self, account: AccountId, role: Role) -> Result<Payload, LedgerError> {
        if self.accounts.contains_key(&account) {
            return Err(LedgerError::DuplicateAccount(account));
        }
        Ok(Payload::AccountOpened { account, role })
    }

    /// Lists a good. Listing ids are assigned in creation order.
    pub fn create_listing(
        &mut self,
        seller: &AccountId,
        params: PriceParams,
        birth_date: NaiveDate,
    ) -> Result<ListingId, LedgerError> {
        let payload = self.prepare_listing(seller, params, birth_date)?;
        match &self.commit(payload).event {
            Payload::ListingCreated { listing, .. } => Ok(listing.clone()),
            _ => unreachable!(),
        }
    }

    fn prepare_listing(
        &self,
        seller: &AccountId,
        params: PriceParams,
        birth_date: NaiveDate,
    ) -> Result<Payload, LedgerError> {
        self.require_role(seller, Role::Person)?;
        // Re-validate: params may come from a decoded log.
        let params = PriceParams::new(
            params.p1(),
            params.i_inf(),
            params.xi(),
            params.rounding_mode(),
        )?;
        let listing =
            ListingId::new(&format!("ig-{:06}", self.listings.len() + 1)).expect("valid id");
        Ok(Payload::ListingCreated {
            listing,
            seller: seller.clone(),
            params,
            birth_date,
        })
    }

    /// Immediate purchase: the buyer pays and every earlier holder and the
    /// seller are credited in the same event.
    pub fn purchase(
        &mut self,
        listing: &ListingId,
        buyer: &AccountId,
    ) -> Result<&LedgerEvent, LedgerError> {
        self.purchase_with(listing, buyer, SettleMode::Immediate)
    }

    pub fn purchase_with(
        &mut self,
        listing: &ListingId,
        buyer: &AccountId,
        mode: SettleMode,
    ) -> Result<&LedgerEvent, LedgerError> {
        let payload = self.prepare_purchase(listing, buyer, mode)?;
        Ok(self.commit(payload))
    }

    fn prepare_purchase(
        &self,
        listing: &ListingId,
        buyer: &AccountId,
        mode: SettleMode,
    ) -> Result<Payload, LedgerError> {
        self.require_role(buyer, Role::Person)?;
        let l = self.listing_or_err(listing)?;
        let available = self.accounts[buyer].balance;
        let plan = l
            .book
            .plan_purchase(buyer, available, mode, self.next_seq())
            .map_err(|e| LedgerError::from_settlement(e, listing))?;
        Ok(Payload::Purchase {
            listing: listing.clone(),
            buyer: buyer.clone(),
            mode,
            plan,
        })
    }

    /// Pays out everything accrued on `listing` up to `to_n` (default: the
    /// current buyer count). Returns `None` when there is nothing to settle.
    pub fn settle_batch(
        &mut self,
        listing: &ListingId,
        to_n: Option<u64>,
    ) -> Result<Option<&LedgerEvent>, LedgerError> {
        match self.prepare_settle(listing, to_n)? {
            Some(payload) => Ok(Some(self.commit(payload))),
            None => Ok(None),
        }
    }

    fn prepare_settle(
        &self,
        listing: &ListingId,
        to_n: Option<u64>,
    ) -> Result<Option<Payload>, LedgerError> {
        let l = self.listing_or_err(listing)?;
        let to_n = to_n.unwrap_or(l.buyer_count());
        let plan = l
            .book
            .plan_batch_settle(to_n, self.next_seq())
            .map_err(|e| LedgerError::from_settlement(e, listing))?;
        if to_n == l.book.settled_n() {
            return Ok(None);
        }
        Ok(Some(Payload::BatchSettle {
            listing: listing.clone(),
            from_n: l.book.settled_n(),
            to_n,
            plan,
        }))
    }

    // ---- applying events ------------------------------------------------------

    pub(crate) fn commit(&mut self, payload: Payload) -> &LedgerEvent {
        self.apply(&payload);
        self.events.push(LedgerEvent {
            seq: self.next_seq(),
            at: self.clock,
            event: payload,
        });
        self.events.last().expect("just pushed")
    }

    fn apply_accounts(&mut self, plan: &SettlementPlan) {
        for entry in &plan.entries {
            match &entry.party {
                Party::Account(id) => {
                    self.accounts
                        .get_mut(id)
                        .expect("validated account")
                        .balance += entry.delta;
                }
                Party::Issuance => self.issuance += entry.delta,
                Party::Escrow(_) => {}
            }
        }
    }

    fn apply(&mut self, payload: &Payload) {
        match payload {
            Payload::AccountOpened { account, role } => {
                self.accounts.insert(
                    account.clone(),
                    Account {
                        id: account.clone(),
                        role: *role,
                        balance: Cents::ZERO,
                    },
                );
            }
            Payload::RateSet {
                authority,
                buy_rate,
                sell_rate,
            } => {
                self.rates = Some(RateTable {
                    buy_rate: *buy_rate,
                    sell_rate: *sell_rate,
                    set_by: authority.clone(),
                    effective_from: self.next_seq(),
                });
            }
            Payload::ListingCreated {
                listing,
                seller,
                params,
                birth_date,
            } => {
                self.listings.insert(
                    listing.clone(),
                    Listing {
                        id: listing.clone(),
                        birth_date: *birth_date,
                        book: Book::new(listing.clone(), seller.clone(), *params),
                    },
                );
                self.listings_by_seller
                    .entry(seller.clone())
                    .or_default()
                    .push(listing.clone());
            }
            Payload::Purchase {
                listing,
                buyer,
                mode,
                plan,
            } => {
                self.apply_accounts(plan);
                let clock = self.clock;
                let l = self.listings.get_mut(listing).expect("validated listing");
                l.book.apply_purchase(buyer, clock, plan, *mode);
                self.purchases_by_buyer
                    .entry(buyer.clone())
                    .or_default()
                    .push(listing.clone());
            }
            Payload::BatchSettle {
                listing,
                to_n,
                plan,
                ..
            } => {
                self.apply_accounts(plan);
                let l = self.listings.get_mut(listing).expect("validated listing");
                l.book.apply_settle(*to_n, plan);
            }
            Payload::Mint {
                fiat_cents,
                cup_cents,
                residue,
                plan,
                ..
            } => {
                self.apply_accounts(plan);
                self.tax.record_mint(
                    *fiat_cents,
                    &crate::exchange::MintQuote {
                        cups: *cup_cents,
                        residue: residue.clone(),
                    },
                );
            }
            Payload::Redeem {
                cup_cents,
                spread,
                residue,
                voucher,
                plan,
                ..
            } => {
                self.apply_accounts(plan);
                self.tax.record_redeem(
                    *cup_cents,
                    &crate::exchange::RedeemQuote {
                        fiat_cents: voucher.fiat_cents,
                        spread: spread.clone(),
                        residue: residue.clone(),
                    },
                );
                self.vouchers.push(voucher.clone());
            }
        }
    }

    // ---- replay ------------------------------------------------------------------

    /// Re-executes `events` from genesis, checking each one.
    pub fn replay(events: &[LedgerEvent]) -> Result<Ledger, LedgerError> {
        let mut ledger = Ledger::new();
        for e in events {
            ledger.replay_one(e)?;
        }
        Ok(ledger)
    }

    /// Decodes log text (checking the hash chain) and replays it.
    pub fn from_log_text(text: &str) -> Result<Ledger, LedgerError> {
        Ledger::replay(&log::decode(text)?)
    }

    pub(crate) fn replay_one(&mut self, e: &LedgerEvent) -> Result<(), LedgerError> {
        let corrupt = |reason: String| LedgerError::CorruptLog { seq: e.seq, reason };
        if e.seq != self.next_seq() {
            return Err(corrupt(format!(
                "sequence {} where {} was expected",
                e.seq,
                self.next_seq()
            )));
        }
        self.advance_to(e.at)
            .map_err(|err| corrupt(err.to_string()))?;
        if let Some(plan) = e.event.plan() {
            if !plan.is_balanced() {
                return Err(corrupt(format!(
                    "plan sums to {} instead of zero",
                    plan.sum()
                )));
            }
        }
        let expected = self
            .reexecute(&e.event)
            .map_err(|err| corrupt(err.to_string()))?;
        if expected != e.event {
            return Err(corrupt(format!(
                "recorded {} differs from re-execution",
                e.event.kind()
            )));
        }
        self.commit(expected);
        Ok(())
    }

    fn reexecute(&self, recorded: &Payload) -> Result<Payload, LedgerError> {
        match recorded {
            Payload::AccountOpened { account, role } => self.prepare_open(account.clone(), *role),
            Payload::RateSet {
                authority,
                buy_rate,
                sell_rate,
            } => self.prepare_rates(authority, *buy_rate, *sell_rate),
            Payload::ListingCreated {
                seller,
                params,
                birth_date,
                ..
            } => self.prepare_listing(seller, *params, *birth_date),
            Payload::Purchase {
                listing,
                buyer,
                mode,
                ..
            } => self.prepare_purchase(listing, buyer, *mode),
            Payload::BatchSettle { listing, to_n, .. } => self
                .prepare_settle(listing, Some(*to_n))?
                .ok_or_else(|| LedgerError::SettleOutOfRange {
                    listing: listing.clone(),
                    to_n: *to_n,
                    settled_n: *to_n,
                    buyer_count: self.listings[listing].buyer_count(),
                }),
            Payload::Mint {
                bank,
                person,
                fiat_cents,
                ..
            } => self.prepare_mint(bank, person, *fiat_cents),
            Payload::Redeem {
                bank,
                person,
                cup_cents,
                ..
            } => self.prepare_redeem(bank, person, *cup_cents),
        }
    }

    /// Holdings of `buyer` in purchase order. Operator-level access.
    pub fn holdings_of(&self, buyer: &AccountId) -> Vec<(&ListingId, &Holding)> {
        self.purchases_by_buyer
            .get(buyer)
            .into_iter()
            .flatten()
            .map(|id| (id, self.listings[id].book.holding(buyer).expect("indexed")))
            .collect()
    }
}
