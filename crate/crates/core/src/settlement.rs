//! Turning exact entitlements into whole cup-cents.
//!
//! A buyer pays the rounded price of their purchase. From then on the total
//! they are owed back is `gross_debit − round(P(n))` cents at count `n`, with
//! the listing's rounding mode, so every synced holder's net cost is the same
//! rounded price. The seller is owed `floor(I(n))` cents in total. Whatever
//! dust is left over stays in the listing's escrow: never negative under
//! ceiling rounding, signed under nearest rounding.
//!
//! Refunds are materialized from that cumulative figure rather than rounded
//! per purchase, which makes any batching of settlements land on the same
//! numbers as settling after every purchase.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::id::{AccountId, ListingId};
use crate::money::Cents;
use crate::pricing::{PriceParams, RoundingMode};
use crate::scalar;
use crate::ExactCurve;

/// Who a plan entry moves money to or from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    Account(AccountId),
    /// The per-listing dust account.
    Escrow(ListingId),
    /// Counter-account of the circulating supply. Mints draw from it and
    /// redemptions return to it.
    Issuance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanEntry {
    pub party: Party,
    pub delta: Cents,
}

/// An ordered list of signed transfers that must sum to zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettlementPlan {
    /// Sequence number of the event this plan belongs to.
    pub cause: u64,
    pub entries: Vec<PlanEntry>,
}

impl SettlementPlan {
    pub fn new(cause: u64) -> Self {
        Self {
            cause,
            entries: Vec::new(),
        }
    }

    /// Appends a transfer, dropping zero deltas.
    pub fn push(&mut self, party: Party, delta: Cents) {
        if !delta.is_zero() {
            self.entries.push(PlanEntry { party, delta });
        }
    }

    pub fn sum(&self) -> Cents {
        self.entries.iter().map(|e| e.delta).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.sum().is_zero()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn delta_for(&self, party: &Party) -> Cents {
        self.entries
            .iter()
            .filter(|e| &e.party == party)
            .map(|e| e.delta)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SettlementError {
    #[error("{buyer} already holds this listing")]
    DuplicateHolder { buyer: AccountId },
    #[error("{buyer} is the seller of this listing")]
    SelfPurchase { buyer: AccountId },
    #[error("{account} needs {needed} but has {available}")]
    InsufficientFunds {
        account: AccountId,
        needed: Cents,
        available: Cents,
    },
    #[error("cannot settle to {to_n}: settled up to {settled_n} with {buyer_count} buyers")]
    SettleOutOfRange {
        to_n: u64,
        settled_n: u64,
        buyer_count: u64,
    },
}

/// Whether a purchase distributes its proceeds right away or leaves them in
/// escrow for a later batch settlement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SettleMode {
    #[default]
    Immediate,
    Deferred,
}

/// Rounded amount buyer `n` pays.
pub fn materialize_debit(params: &PriceParams, n: u64) -> Cents {
    debit_from_curve(&ExactCurve::new(*params), n)
}

fn debit_from_curve(curve: &ExactCurve, n: u64) -> Cents {
    let mode = curve.params().rounding_mode();
    if let Some(c) =
        price_parts(curve.params(), n).and_then(|(num, den)| round_parts(num, den, mode))
    {
        return Cents(c);
    }
    let exact = curve.price_cents(n);
    Cents(match mode {
        RoundingMode::CeilStrict => scalar::ceil_i64(&exact),
        RoundingMode::Nearest => scalar::round_half_up_i64(&exact),
    })
}

fn floor_income(curve: &ExactCurve, n: u64) -> Cents {
    match income_parts(curve.params(), n) {
        Some((num, den)) => Cents((num / den) as i64),
        None => Cents(scalar::floor_i64(&curve.income_cents(n))),
    }
}

/// `I(n)` in cents as an unreduced non-negative `num / den`, or `None` when
/// an intermediate overflows `i128`.
fn income_parts(params: &PriceParams, n: u64) -> Option<(i128, i128)> {
    let (num, den) = (params.xi().num() as i128, params.xi().den() as i128);
    let growth = den.checked_add(num.checked_mul(n.checked_sub(1)? as i128)?)?;
    let uncapped = (params.p1().get() as i128).checked_mul(growth)?;
    let cap = (params.i_inf().get() as i128).checked_mul(den)?;
    Some((uncapped.min(cap), den))
}

fn price_parts(params: &PriceParams, n: u64) -> Option<(i128, i128)> {
    let (num, den) = income_parts(params, n)?;
    Some((num, den.checked_mul(n as i128)?))
}

fn round_parts(num: i128, den: i128, mode: RoundingMode) -> Option<i64> {
    let r = match mode {
        RoundingMode::CeilStrict => num.checked_add(den - 1)? / den,
        RoundingMode::Nearest => num.checked_mul(2)?.checked_add(den)? / den.checked_mul(2)?,
    };
    i64::try_from(r).ok()
}

/// Net cost of every synced holder at count `n`: `P(n)` rounded the same
/// way as the debit, so the newest buyer is never owed anything.
pub fn synced_net_cost(params: &PriceParams, n: u64) -> Cents {
    debit_from_curve(&ExactCurve::new(*params), n)
}

/// `floor(I(n))` in cents; zero before the first sale.
pub fn seller_income_materialized(params: &PriceParams, n: u64) -> Cents {
    if n == 0 {
        return Cents::ZERO;
    }
    floor_income(&ExactCurve::new(*params), n)
}

fn owed_back(gross_debit: Cents, net_cost: Cents) -> Cents {
    (gross_debit - net_cost).max(Cents::ZERO)
}

/// Refund not yet paid out to a holder who joined at `join_n`, evaluated at
/// count `current_n`, given what has already been credited to them.
pub fn holder_entitlement(
    params: &PriceParams,
    join_n: u64,
    current_n: u64,
    already_materialized: Cents,
) -> Cents {
    assert!(
        join_n >= 1 && join_n <= current_n,
        "holder joined after the count"
    );
    let owed = owed_back(
        materialize_debit(params, join_n),
        synced_net_cost(params, current_n),
    );
    debug_assert!(already_materialized <= owed);
    (owed - already_materialized).max(Cents::ZERO)
}

/// One buyer's position in a listing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Holding {
    pub buyer: AccountId,
    pub join_index: u64,
    pub joined: NaiveDate,
    pub gross_debit: Cents,
    pub refunds_materialized: Cents,
}

impl Holding {
    pub fn net_cost(&self) -> Cents {
        self.gross_debit - self.refunds_materialized
    }
}

/// Settlement-relevant state of one listing: who paid what, what has been
/// credited back, and the escrowed dust.
#[derive(Debug, Clone, Serialize)]
pub struct Book {
    listing: ListingId,
    seller: AccountId,
    params: PriceParams,
    escrow: Cents,
    settled_n: u64,
    holdings: Vec<Holding>,
    #[serde(skip)]
    index: BTreeMap<AccountId, usize>,
    #[serde(skip)]
    curve: ExactCurve,
    /// Synced net cost at `settled_n`, zero while nothing is settled.
    #[serde(skip)]
    settled_net: Cents,
}

impl Book {
    pub fn new(listing: ListingId, seller: AccountId, params: PriceParams) -> Self {
        Self {
            listing,
            seller,
            curve: ExactCurve::new(params),
            params,
            escrow: Cents::ZERO,
            settled_n: 0,
            holdings: Vec::new(),
            index: BTreeMap::new(),
            settled_net: Cents::ZERO,
        }
    }

    pub fn listing(&self) -> &ListingId {
        &self.listing
    }

    pub fn seller(&self) -> &AccountId {
        &self.seller
    }

    pub fn params(&self) -> &PriceParams {
        &self.params
    }

    pub fn curve(&self) -> &ExactCurve {
        &self.curve
    }

    pub fn escrow(&self) -> Cents {
        self.escrow
    }

    pub fn buyer_count(&self) -> u64 {
        self.holdings.len() as u64
    }

    /// Count up to which every holder and the seller have been paid out.
    pub fn settled_n(&self) -> u64 {
        self.settled_n
    }

    pub fn holdings(&self) -> &[Holding] {
        &self.holdings
    }

    pub fn holding(&self, buyer: &AccountId) -> Option<&Holding> {
        self.index.get(buyer).map(|&i| &self.holdings[i])
    }

    pub fn is_holder(&self, buyer: &AccountId) -> bool {
        self.index.contains_key(buyer)
    }

    /// What the next buyer would pay.
    pub fn next_debit(&self) -> Cents {
        debit_from_curve(&self.curve, self.buyer_count() + 1)
    }

    fn net_at(&self, n: u64) -> Cents {
        if n == 0 {
            Cents::ZERO
        } else {
            debit_from_curve(&self.curve, n)
        }
    }

    fn income_at(&self, n: u64) -> Cents {
        if n == 0 {
            Cents::ZERO
        } else {
            floor_income(&self.curve, n)
        }
    }

    /// Seller income accrued but not yet settled.
    pub fn pending_seller(&self) -> Cents {
        self.income_at(self.buyer_count()) - self.income_at(self.settled_n)
    }

    /// Refund accrued by `buyer` but not yet settled, at the current count.
    pub fn pending_refund(&self, buyer: &AccountId) -> Cents {
        match self.holding(buyer) {
            Some(h) => self.pending_for(h, self.net_at(self.buyer_count())),
            None => Cents::ZERO,
        }
    }

    fn pending_for(&self, h: &Holding, net: Cents) -> Cents {
        owed_back(h.gross_debit, net) - h.refunds_materialized
    }

    pub fn check_buyer(
        &self,
        buyer: &AccountId,
        available: Cents,
    ) -> Result<Cents, SettlementError> {
        if buyer == &self.seller {
            return Err(SettlementError::SelfPurchase {
                buyer: buyer.clone(),
            });
        }
        if self.is_holder(buyer) {
            return Err(SettlementError::DuplicateHolder {
                buyer: buyer.clone(),
            });
        }
        let needed = self.next_debit();
        if available < needed {
            return Err(SettlementError::InsufficientFunds {
                account: buyer.clone(),
                needed,
                available,
            });
        }
        Ok(needed)
    }

    /// Plan for `buyer` becoming holder number `buyer_count + 1`.
    ///
    /// Immediate mode also settles everything outstanding up to the new
    /// count; deferred mode only moves the debit into escrow.
    pub fn plan_purchase(
        &self,
        buyer: &AccountId,
        available: Cents,
        mode: SettleMode,
        cause: u64,
    ) -> Result<SettlementPlan, SettlementError> {
        let debit = self.check_buyer(buyer, available)?;
        let mut plan = SettlementPlan::new(cause);
        plan.push(Party::Account(buyer.clone()), -debit);
        match mode {
            SettleMode::Deferred => plan.push(Party::Escrow(self.listing.clone()), debit),
            SettleMode::Immediate => {
                // The new holder is owed nothing at their own count, so the
                // payout scan never needs to include them.
                let n = self.buyer_count() + 1;
                let paid_out = self.push_payouts(&mut plan, n, self.holdings.len());
                plan.push(Party::Escrow(self.listing.clone()), debit - paid_out);
            }
        }
        Ok(plan)
    }

    /// Plan paying out everything accrued while the count moved from
    /// `settled_n` to `to_n`, drawing on the escrowed debits.
    pub fn plan_batch_settle(
        &self,
        to_n: u64,
        cause: u64,
    ) -> Result<SettlementPlan, SettlementError> {
        if to_n < self.settled_n || to_n > self.buyer_count() {
            return Err(SettlementError::SettleOutOfRange {
                to_n,
                settled_n: self.settled_n,
                buyer_count: self.buyer_count(),
            });
        }
        let mut plan = SettlementPlan::new(cause);
        if to_n == self.settled_n {
            return Ok(plan);
        }
        let paid_out = self.push_payouts(&mut plan, to_n, to_n as usize);
        plan.push(Party::Escrow(self.listing.clone()), -paid_out);
        Ok(plan)
    }

    /// Seller and refund credits for moving the settled count to `to_n`,
    /// considering holders `..holders_end`. Returns their total.
    fn push_payouts(&self, plan: &mut SettlementPlan, to_n: u64, holders_end: usize) -> Cents {
        let mut total = Cents::ZERO;
        let seller = self.income_at(to_n) - self.income_at(self.settled_n);
        plan.push(Party::Account(self.seller.clone()), seller);
        total += seller;

        let net = self.net_at(to_n);
        // Holders already synced at `settled_n` are owed nothing new unless
        // the rounded net cost moved.
        let first = if self.settled_n > 0 && net == self.settled_net {
            self.settled_n as usize
        } else {
            0
        };
        for h in &self.holdings[first.min(holders_end)..holders_end] {
            let credit = self.pending_for(h, net);
            debug_assert!(credit >= Cents::ZERO);
            plan.push(Party::Account(h.buyer.clone()), credit);
            total += credit;
        }
        total
    }

    /// Applies a purchase plan produced by [`Book::plan_purchase`].
    pub fn apply_purchase(
        &mut self,
        buyer: &AccountId,
        joined: NaiveDate,
        plan: &SettlementPlan,
        mode: SettleMode,
    ) {
        let buyer_party = Party::Account(buyer.clone());
        let gross_debit = -plan.delta_for(&buyer_party);
        let join_index = self.buyer_count() + 1;
        self.index.insert(buyer.clone(), self.holdings.len());
        self.holdings.push(Holding {
            buyer: buyer.clone(),
            join_index,
            joined,
            gross_debit,
            refunds_materialized: Cents::ZERO,
        });
        self.apply_credits(plan, Some(&buyer_party));
        if mode == SettleMode::Immediate {
            self.mark_settled(join_index);
        }
    }

    /// Applies a plan produced by [`Book::plan_batch_settle`].
    pub fn apply_settle(&mut self, to_n: u64, plan: &SettlementPlan) {
        self.apply_credits(plan, None);
        self.mark_settled(to_n);
    }

    fn apply_credits(&mut self, plan: &SettlementPlan, skip: Option<&Party>) {
        for entry in &plan.entries {
            if Some(&entry.party) == skip {
                continue;
            }
            match &entry.party {
                Party::Escrow(id) if id == &self.listing => self.escrow += entry.delta,
                Party::Account(id) if id != &self.seller => {
                    if let Some(&i) = self.index.get(id) {
                        self.holdings[i].refunds_materialized += entry.delta;
                    }
                }
                _ => {}
            }
        }
    }

    fn mark_settled(&mut self, n: u64) {
        self.settled_n = n;
        self.settled_net = self.net_at(n);
    }

    /// Seller income paid out so far.
    pub fn seller_materialized(&self) -> Cents {
        self.income_at(self.settled_n)
    }

    /// Exact effective escrow once all pending payouts are made, in O(n).
    pub fn escrow_after_settle(&self) -> Cents {
        let net = self.net_at(self.buyer_count());
        let pending: Cents = self.holdings.iter().map(|h| self.pending_for(h, net)).sum();
        self.escrow - self.pending_seller() - pending
    }

    /// Whether `Σ debits − seller − Σ refunds` matches the escrow.
    pub fn escrow_reconciles(&self) -> bool {
        let debits: Cents = self.holdings.iter().map(|h| h.gross_debit).sum();
        let refunds: Cents = self.holdings.iter().map(|h| h.refunds_materialized).sum();
        debits - self.seller_materialized() - refunds == self.escrow
    }

    pub fn exact_price_cents(&self, n: u64) -> num_rational::Ratio<num_bigint::BigInt> {
        if n == 0 {
            num_rational::Ratio::zero()
        } else {
            self.curve.price_cents(n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::Xi;

    fn params(p1: i64, i_inf: i64, num: u64, den: u64, mode: RoundingMode) -> PriceParams {
        PriceParams::cups(p1, i_inf, Xi::new(num, den).unwrap())
            .unwrap()
            .with_rounding(mode)
    }

    fn acct(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2012, 10, 18).unwrap()
    }

    fn book(p: PriceParams) -> Book {
        Book::new(ListingId::new("ig").unwrap(), acct("seller"), p)
    }

    fn buy(b: &mut Book, who: &str, mode: SettleMode) -> SettlementPlan {
        let plan = b
            .plan_purchase(&acct(who), Cents(i64::MAX), mode, 0)
            .unwrap();
        assert!(plan.is_balanced());
        b.apply_purchase(&acct(who), date(), &plan, mode);
        plan
    }

    #[test]
    fn debit_examples() {
        let half = params(10, 100, 1, 2, RoundingMode::CeilStrict);
        assert_eq!(materialize_debit(&half, 3), Cents(667));
        assert_eq!(materialize_debit(&half, 1), Cents(1000));
        assert_eq!(
            materialize_debit(&half.with_rounding(RoundingMode::Nearest), 1),
            Cents(1000)
        );
        let frozen = params(10, 100, 0, 1, RoundingMode::Nearest);
        assert_eq!(materialize_debit(&frozen, 4000), Cents(0));
        assert_eq!(
            materialize_debit(&frozen.with_rounding(RoundingMode::CeilStrict), 4000),
            Cents(1)
        );
    }

    #[test]
    fn entitlement_examples() {
        let half = params(10, 100, 1, 2, RoundingMode::CeilStrict);
        assert_eq!(holder_entitlement(&half, 1, 3, Cents(0)), Cents(333));
        assert_eq!(holder_entitlement(&half, 1, 3, Cents(250)), Cents(83));
        assert_eq!(holder_entitlement(&half, 4, 4, Cents(0)), Cents(0));
        let one = params(10, 100, 1, 1, RoundingMode::CeilStrict);
        assert_eq!(holder_entitlement(&one, 1, 10, Cents(0)), Cents(0));
    }

    #[test]
    fn first_purchase_is_exact() {
        let mut b = book(params(10, 100, 1, 2, RoundingMode::CeilStrict));
        let plan = buy(&mut b, "b1", SettleMode::Immediate);
        assert_eq!(plan.delta_for(&Party::Account(acct("b1"))), Cents(-1000));
        assert_eq!(plan.delta_for(&Party::Account(acct("seller"))), Cents(1000));
        assert_eq!(plan.entries.len(), 2);
        assert_eq!(b.escrow(), Cents(0));
    }

    #[test]
    fn third_purchase_trace() {
        let mut b = book(params(10, 100, 1, 2, RoundingMode::CeilStrict));
        buy(&mut b, "b1", SettleMode::Immediate);
        let second = buy(&mut b, "b2", SettleMode::Immediate);
        assert_eq!(second.delta_for(&Party::Account(acct("b1"))), Cents(250));
        assert_eq!(b.escrow(), Cents(0));
        let third = buy(&mut b, "b3", SettleMode::Immediate);
        assert_eq!(third.delta_for(&Party::Account(acct("b3"))), Cents(-667));
        assert_eq!(third.delta_for(&Party::Account(acct("seller"))), Cents(500));
        assert_eq!(third.delta_for(&Party::Account(acct("b1"))), Cents(83));
        assert_eq!(third.delta_for(&Party::Account(acct("b2"))), Cents(83));
        assert_eq!(b.escrow(), Cents(1));
        let nets: Cents = b.holdings().iter().map(Holding::net_cost).sum();
        assert_eq!(nets, Cents(2001));
        assert_eq!(b.seller_materialized(), Cents(2000));
        assert!(b.escrow_reconciles());
    }

    #[test]
    fn insufficient_funds_and_duplicates() {
        let mut b = book(params(10, 100, 1, 2, RoundingMode::CeilStrict));
        let err = b
            .plan_purchase(&acct("poor"), Cents(500), SettleMode::Immediate, 0)
            .unwrap_err();
        assert!(matches!(
            err,
            SettlementError::InsufficientFunds {
                needed: Cents(1000),
                ..
            }
        ));
        buy(&mut b, "b1", SettleMode::Immediate);
        let err = b
            .plan_purchase(&acct("b1"), Cents(10_000), SettleMode::Immediate, 0)
            .unwrap_err();
        assert!(matches!(err, SettlementError::DuplicateHolder { .. }));
        let err = b
            .plan_purchase(&acct("seller"), Cents(10_000), SettleMode::Immediate, 0)
            .unwrap_err();
        assert!(matches!(err, SettlementError::SelfPurchase { .. }));
    }

    fn snapshot(b: &Book) -> String {
        serde_json::to_string(b).unwrap()
    }

    #[test]
    fn batch_matches_sequential_one_to_three() {
        let p = params(10, 100, 1, 2, RoundingMode::CeilStrict);
        let mut seq = book(p);
        let mut batched = book(p);
        for who in ["b1", "b2", "b3"] {
            buy(&mut seq, who, SettleMode::Immediate);
        }
        buy(&mut batched, "b1", SettleMode::Immediate);
        buy(&mut batched, "b2", SettleMode::Deferred);
        buy(&mut batched, "b3", SettleMode::Deferred);
        let plan = batched.plan_batch_settle(3, 0).unwrap();
        assert!(plan.is_balanced());
        batched.apply_settle(3, &plan);
        assert_eq!(snapshot(&seq), snapshot(&batched));
        assert!(batched.plan_batch_settle(3, 0).unwrap().is_empty());
    }

    #[test]
    fn settle_across_cap() {
        let p = params(10, 100, 1, 2, RoundingMode::CeilStrict);
        let mut b = book(p);
        for i in 1..=18 {
            buy(&mut b, &format!("b{i}"), SettleMode::Immediate);
        }
        for i in 19..=25 {
            buy(&mut b, &format!("b{i}"), SettleMode::Deferred);
        }
        let plan = b.plan_batch_settle(25, 0).unwrap();
        let seller = plan.delta_for(&Party::Account(acct("seller")));
        assert_eq!(
            seller,
            seller_income_materialized(&p, 25) - seller_income_materialized(&p, 18)
        );
        assert_eq!(seller, Cents(500));
        b.apply_settle(25, &plan);
        assert_eq!(b.seller_materialized(), Cents(10_000));
        assert!(b.escrow() >= Cents(0) && b.escrow() <= Cents(25));
    }

    #[test]
    fn settle_range_checked() {
        let mut b = book(params(10, 100, 1, 2, RoundingMode::CeilStrict));
        buy(&mut b, "b1", SettleMode::Deferred);
        assert!(b.plan_batch_settle(2, 0).is_err());
        assert_eq!(b.pending_seller(), Cents(1000));
        assert_eq!(b.escrow_after_settle(), Cents(0));
    }

    #[test]
    fn nearest_mode_free_tail() {
        // ξ = 0, 1 cup: price drops under half a cent after 200 buyers.
        let p = params(1, 1, 0, 1, RoundingMode::Nearest);
        let mut b = book(p);
        for i in 1..=250 {
            buy(&mut b, &format!("b{i}"), SettleMode::Immediate);
        }
        assert_eq!(b.holdings()[249].gross_debit, Cents(0));
        assert_eq!(b.holdings()[0].net_cost(), Cents(0));
        assert!(b.escrow().get().abs() <= 250);
        assert!(b.escrow_reconciles());
    }

    proptest::proptest! {
        #[test]
        fn integer_fast_path_matches_exact_rounding(
            p1 in 1i64..=i64::MAX / 4,
            extra in 0i64..=i64::MAX / 4,
            num in 0u64..=i64::MAX as u64,
            den in 1u64..=i64::MAX as u64,
            n in 1u64..=u64::MAX / 2,
            small in proptest::bool::ANY,
        ) {
            let (p1, extra, num, den, n) = if small {
                (p1 % 100_000 + 1, extra % 1_000_000, num % 1000, den % 1000 + 1, n % 1_000_000 + 1)
            } else {
                (p1, extra, num, den, n)
            };
            let xi = Xi::new(num.min(den), den).unwrap();
            for mode in [RoundingMode::CeilStrict, RoundingMode::Nearest] {
                let p = PriceParams::new(Cents(p1), Cents(p1 + extra), xi, mode).unwrap();
                let curve = ExactCurve::new(p);
                let exact = curve.price_cents(n);
                let expected = match mode {
                    RoundingMode::CeilStrict => scalar::ceil_i64(&exact),
                    RoundingMode::Nearest => scalar::round_half_up_i64(&exact),
                };
                proptest::prop_assert_eq!(debit_from_curve(&curve, n), Cents(expected));
                proptest::prop_assert_eq!(
                    floor_income(&curve, n),
                    Cents(scalar::floor_i64(&curve.income_cents(n)))
                );
            }
        }
    }
}
