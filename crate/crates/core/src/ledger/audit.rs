//! Invariant audit of a log file, tolerant of damage.
//!
//! Unlike [`Ledger::from_log_text`], the audit does not stop at the first
//! problem. It applies recorded plans to a shadow book of balances so money
//! invariants can still be checked after a bad event, and it re-executes the
//! log in a strict ledger for as long as the log stays consistent.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use num_bigint::BigInt;
use num_rational::Ratio;
use serde::Serialize;

use crate::canonical::ZERO_DIGEST;
use crate::exchange::Voucher;
use crate::id::{AccountId, ListingId};
use crate::money::Cents;
use crate::pricing::RoundingMode;
use crate::settlement::Party;

use super::log::{self, LineCheck};
use super::{Ledger, LedgerEvent, Payload, Role};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub description: &'static str,
    /// First offending event and what was wrong with it.
    pub first_violation: Option<(u64, String)>,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub events: u64,
    pub checks: Vec<InvariantCheck>,
    /// The state digest, when the whole log re-executed cleanly.
    pub digest: Option<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(InvariantCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&InvariantCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const CHECKS: &[(&str, &str)] = &[
    (
        "hash-chain",
        "every line is canonical, contiguous and chained to the previous hash",
    ),
    ("date-monotonic", "event dates never go backwards"),
    ("plan-conservation", "every settlement plan sums to zero"),
    (
        "supply-conservation",
        "balances plus escrows equal minted minus redeemed cups",
    ),
    ("no-negative-balance", "no person balance is ever negative"),
    (
        "no-bank-commission",
        "bank and authority balances never change",
    ),
    (
        "plan-derivation",
        "re-executing each command reproduces the recorded event",
    ),
    (
        "escrow-bounds",
        "a settled listing's escrow stays within its rounding bounds",
    ),
    (
        "equal-net-cost",
        "every synced holder's net cost is within one cent of the exact price",
    ),
    (
        "holding-consistency",
        "refunds never exceed debits and escrow reconciles with the holdings",
    ),
    (
        "voucher-chain",
        "vouchers are digest-chained and match their rate",
    ),
];

struct Auditor {
    checks: Vec<InvariantCheck>,
    roles: BTreeMap<AccountId, Role>,
    balances: BTreeMap<Party, Cents>,
    supply: Cents,
    last_date: Option<NaiveDate>,
    last_voucher: String,
    strict: Option<Ledger>,
}

impl Auditor {
    fn new() -> Self {
        Self {
            checks: CHECKS
                .iter()
                .map(|&(name, description)| InvariantCheck {
                    name,
                    description,
                    first_violation: None,
                })
                .collect(),
            roles: BTreeMap::new(),
            balances: BTreeMap::new(),
            supply: Cents::ZERO,
            last_date: None,
            last_voucher: ZERO_DIGEST.to_string(),
            strict: Some(Ledger::new()),
        }
    }

    fn fail(&mut self, name: &str, seq: u64, detail: impl Into<String>) {
        let check = self
            .checks
            .iter_mut()
            .find(|c| c.name == name)
            .expect("known invariant");
        if check.first_violation.is_none() {
            check.first_violation = Some((seq, detail.into()));
        }
    }

    fn visit(&mut self, e: &LedgerEvent) {
        let seq = e.seq;
        if let Some(last) = self.last_date {
            if e.at < last {
                self.fail("date-monotonic", seq, format!("{} after {}", e.at, last));
            }
        }
        self.last_date = Some(self.last_date.map_or(e.at, |d| d.max(e.at)));

        match &e.event {
            Payload::AccountOpened { account, role } => {
                self.roles.insert(account.clone(), *role);
            }
            Payload::Mint { cup_cents, .. } => self.supply += *cup_cents,
            Payload::Redeem {
                cup_cents, voucher, ..
            } => {
                self.supply -= *cup_cents;
                self.check_voucher(seq, voucher);
            }
            _ => {}
        }

        if let Some(plan) = e.event.plan() {
            if !plan.is_balanced() {
                self.fail(
                    "plan-conservation",
                    seq,
                    format!("plan sums to {}", plan.sum()),
                );
            }
            for entry in &plan.entries {
                *self.balances.entry(entry.party.clone()).or_default() += entry.delta;
                if let Party::Account(id) = &entry.party {
                    match self.roles.get(id) {
                        Some(Role::Person) => {
                            if self.balances[&entry.party] < Cents::ZERO {
                                self.fail(
                                    "no-negative-balance",
                                    seq,
                                    format!("{id} went negative"),
                                );
                            }
                        }
                        Some(role) => self.fail(
                            "no-bank-commission",
                            seq,
                            format!("{role} {id} received {}", entry.delta),
                        ),
                        None => self.fail("plan-derivation", seq, format!("unknown account {id}")),
                    }
                }
            }
            let held: Cents = self
                .balances
                .iter()
                .filter(|(p, _)| !matches!(p, Party::Issuance))
                .map(|(_, c)| *c)
                .sum();
            if held != self.supply {
                self.fail(
                    "supply-conservation",
                    seq,
                    format!(
                        "balances and escrows hold {held}, supply is {}",
                        self.supply
                    ),
                );
            }
        }

        if let Some(mut strict) = self.strict.take() {
            match strict.replay_one(e) {
                Ok(()) => {
                    if let Payload::Purchase { listing, .. }
                    | Payload::BatchSettle { listing, .. } = &e.event
                    {
                        self.check_listing(&strict, listing, seq);
                    }
                    self.strict = Some(strict);
                }
                Err(err) => self.fail("plan-derivation", seq, err.to_string()),
            }
        }
    }

    fn check_voucher(&mut self, seq: u64, v: &Voucher) {
        let exact = Ratio::from_integer(BigInt::from(v.cup_cents.get()))
            * Ratio::new(BigInt::from(v.rate.num()), BigInt::from(v.rate.den()));
        let rate_ok = crate::scalar::floor_i64(&exact) == v.fiat_cents;
        if v.prev_digest != self.last_voucher || v.compute_digest() != v.digest || !rate_ok {
            self.fail(
                "voucher-chain",
                seq,
                format!("voucher {} does not verify", v.voucher_id),
            );
        }
        self.last_voucher = v.digest.clone();
    }

    fn check_listing(&mut self, ledger: &Ledger, id: &ListingId, seq: u64) {
        let book = &ledger.listing(id).expect("replayed listing").book;
        if !book.escrow_reconciles() {
            self.fail(
                "holding-consistency",
                seq,
                format!("{id} escrow does not reconcile"),
            );
        }
        if book
            .holdings()
            .iter()
            .any(|h| h.refunds_materialized > h.gross_debit)
        {
            self.fail(
                "holding-consistency",
                seq,
                format!("{id} refunds exceed a debit"),
            );
        }
        let n = book.buyer_count();
        if book.settled_n() != n || n == 0 {
            return;
        }
        let escrow = book.escrow().get();
        let bounded = match book.params().rounding_mode() {
            RoundingMode::CeilStrict => (0..=n as i64).contains(&escrow),
            RoundingMode::Nearest => escrow.unsigned_abs() <= n,
        };
        if !bounded {
            self.fail(
                "escrow-bounds",
                seq,
                format!("{id} escrow {escrow} with {n} buyers"),
            );
        }
        let exact = book.exact_price_cents(n);
        let one = Ratio::from_integer(BigInt::from(1));
        for h in book.holdings() {
            let net = Ratio::from_integer(BigInt::from(h.net_cost().get()));
            let gap = if net > exact {
                &net - &exact
            } else {
                &exact - &net
            };
            if gap >= one {
                self.fail(
                    "equal-net-cost",
                    seq,
                    format!(
                        "{} on {id} nets {} against exact {}",
                        h.buyer,
                        h.net_cost(),
                        exact
                    ),
                );
                break;
            }
        }
    }
}

/// Audits log text against every ledger invariant.
pub fn audit_log(text: &str) -> AuditReport {
    let mut auditor = Auditor::new();
    let mut events = 0;
    for (i, line) in log::check_lines(text).into_iter().enumerate() {
        let seq = i as u64 + 1;
        events = seq;
        match line {
            LineCheck::Ok(e) => auditor.visit(&e),
            LineCheck::Broken(e, reason) => {
                auditor.fail("hash-chain", seq, reason);
                auditor.visit(&e);
            }
            LineCheck::Unparseable(reason) => {
                auditor.fail("hash-chain", seq, reason);
                if auditor.strict.take().is_some() {
                    auditor.fail("plan-derivation", seq, "unreadable event");
                }
            }
        }
    }
    let digest = auditor.strict.as_ref().map(Ledger::digest);
    AuditReport {
        events,
        checks: auditor.checks,
        digest,
    }
}
