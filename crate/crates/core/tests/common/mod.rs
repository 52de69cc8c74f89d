//! Shared builders and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};
use cupnet::frac::Fraction;
use cupnet::id::{AccountId, ListingId};
use cupnet::ledger::{log, Role};
use cupnet::pricing::{PriceParams, RoundingMode, Xi};
use cupnet::settlement::{Party, SettleMode};
use cupnet::{Cents, Ledger, LedgerEvent};
use num_bigint::BigInt;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<BigInt>;

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

pub fn id(s: &str) -> AccountId {
    AccountId::new(s).unwrap()
}

pub fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

pub fn buyer(i: u64) -> AccountId {
    id(&format!("buyer-{i:06}"))
}

/// Ledger with an authority, a bank, one seller and 1:1 rates.
pub fn market() -> Ledger {
    let mut l = Ledger::new();
    l.open_account(id("gov"), Role::Authority).unwrap();
    l.open_account(id("bank"), Role::Bank).unwrap();
    l.open_account(id("seller"), Role::Person).unwrap();
    let one = Fraction::new(1, 1).unwrap();
    l.set_rates(&id("gov"), one, one).unwrap();
    l
}

/// Opens and funds buyers `1..=n` with `each` cup-cents.
pub fn fund_buyers(l: &mut Ledger, n: u64, each: i64) {
    for i in 1..=n {
        l.open_account(buyer(i), Role::Person).unwrap();
        l.mint(&id("bank"), &buyer(i), each).unwrap();
    }
}

pub fn random_params(rng: &mut ChaCha8Rng, max_p1: i64, max_ratio: i64) -> PriceParams {
    let p1 = rng.gen_range(1..=max_p1);
    let i_inf = match rng.gen_range(0..10) {
        0 => p1,
        _ => rng.gen_range(p1..=p1 * max_ratio),
    };
    let xi = match rng.gen_range(0..8) {
        0 => Xi::ZERO,
        1 => Xi::ONE,
        2 => Xi::new(1, 2).unwrap(),
        _ => {
            let den = rng.gen_range(1..=1000);
            Xi::new(rng.gen_range(0..=den), den).unwrap()
        }
    };
    PriceParams::new(Cents(p1), Cents(i_inf), xi, RoundingMode::CeilStrict).unwrap()
}

/// Exact price in cents for `n` buyers, straight from the definition.
pub fn exact_price_cents(params: &PriceParams, n: u64) -> Q {
    let p1 = q(params.p1().get(), 1);
    let xi = q(params.xi().num() as i64, params.xi().den() as i64);
    let uncapped = &p1 * (q(1, 1) + xi * q(n as i64 - 1, 1));
    let income = uncapped.min(q(params.i_inf().get(), 1));
    income / q(n as i64, 1)
}

pub fn exact_income_cents(params: &PriceParams, n: u64) -> Q {
    exact_price_cents(params, n) * q(n as i64, 1)
}

/// A purchase schedule over one listing: which purchases are deferred and
/// after which buyer counts a batch settlement runs.
#[derive(Debug, Clone)]
pub struct Run {
    pub params: PriceParams,
    pub buyers: u64,
    pub deferred: Vec<bool>,
    pub settle_after: Vec<u64>,
}

impl Run {
    pub fn sequential(params: PriceParams, buyers: u64) -> Self {
        Self {
            params,
            buyers,
            deferred: vec![false; buyers as usize],
            settle_after: vec![],
        }
    }

    pub fn random_partition(params: PriceParams, buyers: u64, rng: &mut ChaCha8Rng) -> Self {
        let cuts = rng.gen_range(0..=20.min(buyers));
        let mut settle_after: Vec<u64> = (0..cuts).map(|_| rng.gen_range(1..=buyers)).collect();
        settle_after.sort_unstable();
        settle_after.dedup();
        let deferred_share = rng.gen_range(0.5..1.0);
        Self {
            params,
            buyers,
            deferred: (0..buyers).map(|_| rng.gen_bool(deferred_share)).collect(),
            settle_after,
        }
    }

    /// Executes the run, calling `at_sync` whenever every accrual of the
    /// listing has been paid out.
    pub fn execute(&self, mut at_sync: impl FnMut(&Ledger, &ListingId)) -> (Ledger, ListingId) {
        let mut l = market();
        fund_buyers(&mut l, self.buyers, self.params.p1().get());
        let ig = l
            .create_listing(&id("seller"), self.params, date("2020-01-01"))
            .unwrap();
        let mut cuts = self.settle_after.iter().peekable();
        for i in 1..=self.buyers {
            let mode = if self.deferred[i as usize - 1] {
                SettleMode::Deferred
            } else {
                SettleMode::Immediate
            };
            l.purchase_with(&ig, &buyer(i), mode).unwrap();
            let settled_now = cuts.next_if_eq(&&i).is_some();
            if settled_now {
                l.settle_batch(&ig, None).unwrap();
            }
            let book = &l.listing(&ig).unwrap().book;
            if book.settled_n() == book.buyer_count() && (settled_now || i % 97 == 0) {
                at_sync(&l, &ig);
            }
        }
        l.settle_batch(&ig, None).unwrap();
        at_sync(&l, &ig);
        (l, ig)
    }
}

/// Violations of the drift bounds in a fully settled listing.
pub fn drift_violations(l: &Ledger, ig: &ListingId) -> Vec<String> {
    let listing = l.listing(ig).unwrap();
    let book = &listing.book;
    let params = listing.params();
    let n = book.buyer_count();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    assert_eq!(book.settled_n(), n, "drift is defined on a settled listing");
    let price = exact_price_cents(params, n);
    // |x - num/den| <= 1  <=>  |x*den - num| <= den, kept in i128 per holder.
    let within = |x: i64, exact: &Q| {
        let num = i128::try_from(exact.numer()).unwrap();
        let den = i128::try_from(exact.denom()).unwrap();
        (x as i128 * den - num).abs() <= den
    };
    for h in book.holdings() {
        if !within(h.net_cost().get(), &price) {
            out.push(format!(
                "{} nets {} against {}",
                h.buyer,
                h.net_cost(),
                price
            ));
        }
        let spent = params.p1().get() - l.account(&h.buyer).unwrap().balance.get();
        if spent != h.net_cost().get() {
            out.push(format!("{} balance disagrees with holding", h.buyer));
        }
    }
    let seller = l.account(listing.seller()).unwrap().balance.get();
    if !within(seller, &exact_income_cents(params, n)) {
        out.push(format!(
            "seller holds {seller} against {}",
            exact_income_cents(params, n)
        ));
    }
    let escrow = book.escrow().get();
    if !(0..=n as i64).contains(&escrow) {
        out.push(format!("escrow {escrow} outside [0, {n}]"));
    }
    out
}

/// Explicit per-purchase transfer enumeration in O(n²): every purchase pays
/// each earlier holder what brings them down to the new rounded price.
/// Returns (buyer balances, seller balance, escrow) after `n` purchases from
/// buyers funded with `funding` each.
pub fn naive_enumeration(params: &PriceParams, n: u64, funding: i64) -> (Vec<i64>, i64, i64) {
    let ceil_cents = |k: u64| -> i64 {
        let p = exact_price_cents(params, k);
        let rounded = match params.rounding_mode() {
            RoundingMode::CeilStrict => p.ceil(),
            RoundingMode::Nearest => (p + q(1, 2)).floor(),
        };
        rounded.to_integer().try_into().unwrap()
    };
    let floor_income = |k: u64| -> i64 {
        if k == 0 {
            0
        } else {
            exact_income_cents(params, k)
                .floor()
                .to_integer()
                .try_into()
                .unwrap()
        }
    };
    let mut net: Vec<i64> = Vec::new();
    let mut seller = 0i64;
    let mut escrow = 0i64;
    for k in 1..=n {
        let debit = ceil_cents(k);
        escrow += debit;
        let delta = floor_income(k) - floor_income(k - 1);
        seller += delta;
        escrow -= delta;
        for held in net.iter_mut() {
            let refund = (*held - debit).max(0);
            *held -= refund;
            escrow -= refund;
        }
        net.push(debit);
    }
    (net.iter().map(|c| funding - c).collect(), seller, escrow)
}

/// Re-encodes `events` with a fresh hash chain.
pub fn reseal(events: &[LedgerEvent]) -> String {
    log::encode(events)
}

/// Mutates one escrow entry of the first plan (after `from_seq`) that has
/// one. With `thief` the cent is credited to that account so the plan still
/// balances; otherwise it simply disappears. Returns the tampered sequence.
pub fn steal_from_escrow(
    events: &mut [LedgerEvent],
    from_seq: u64,
    thief: Option<&AccountId>,
) -> u64 {
    for e in events.iter_mut().filter(|e| e.seq >= from_seq) {
        let seq = e.seq;
        let Some(plan) = e.event.plan_mut() else {
            continue;
        };
        let Some(pos) = plan
            .entries
            .iter()
            .position(|en| matches!(en.party, Party::Escrow(_)) && en.delta.get() > 0)
        else {
            continue;
        };
        plan.entries[pos].delta -= Cents(1);
        if let Some(t) = thief {
            let party = Party::Account(t.clone());
            match plan.entries.iter().position(|en| en.party == party) {
                Some(i) => plan.entries[i].delta += Cents(1),
                None => plan.entries.push(cupnet::settlement::PlanEntry {
                    party,
                    delta: Cents(1),
                }),
            }
        }
        return seq;
    }
    panic!("no escrow credit to steal from");
}

pub const GOLDEN_EVENTS: u64 = 10_000;

/// Deterministically builds the golden ledger: several listings with mixed
/// immediate and deferred purchases, batch settlements, mints, redemptions
/// and a rate change. Exactly [`GOLDEN_EVENTS`] events.
pub fn golden_ledger() -> Ledger {
    let mut rng = ChaCha8Rng::seed_from_u64(20121018);
    let mut l = Ledger::new();
    let mut day = date("2012-10-18");
    let gov = id("gov");
    let banks = [id("bank-a"), id("bank-b")];
    l.open_account(gov.clone(), Role::Authority).unwrap();
    for b in &banks {
        l.open_account(b.clone(), Role::Bank).unwrap();
    }
    l.set_rates(
        &gov,
        Fraction::new(1, 1).unwrap(),
        Fraction::new(19, 20).unwrap(),
    )
    .unwrap();
    let people: Vec<AccountId> = (0..400).map(|i| id(&format!("p{i:03}"))).collect();
    for p in &people {
        l.open_account(p.clone(), Role::Person).unwrap();
    }
    let mut listings: Vec<ListingId> = Vec::new();
    let mut seller_of: BTreeMap<ListingId, AccountId> = BTreeMap::new();
    while l.last_seq() < GOLDEN_EVENTS {
        if rng.gen_bool(0.02) {
            day = day
                .checked_add_days(Days::new(rng.gen_range(1..5)))
                .unwrap();
            l.advance_to(day).unwrap();
        }
        let bank = &banks[rng.gen_range(0..2)];
        let person = &people[rng.gen_range(0..people.len())];
        match rng.gen_range(0..100) {
            0..=4 if listings.len() < 40 => {
                let p1 = rng.gen_range(100..3000);
                let i_inf = p1 * rng.gen_range(1..12);
                let xi = Xi::new(rng.gen_range(0..=8), 8).unwrap();
                let mode = if rng.gen_bool(0.8) {
                    RoundingMode::CeilStrict
                } else {
                    RoundingMode::Nearest
                };
                let params = PriceParams::new(Cents(p1), Cents(i_inf), xi, mode).unwrap();
                let ig = l.create_listing(person, params, day).unwrap();
                seller_of.insert(ig.clone(), person.clone());
                listings.push(ig);
            }
            5..=19 => {
                l.mint(bank, person, rng.gen_range(500..20_000)).unwrap();
            }
            20..=22 => {
                let bal = l.account(person).unwrap().balance.get();
                if bal > 0 {
                    l.redeem(bank, person, Cents(rng.gen_range(1..=bal)))
                        .unwrap();
                }
            }
            23 if l.last_seq() > GOLDEN_EVENTS / 2 && l.rates().unwrap().sell_rate.den() == 20 => {
                l.set_rates(
                    &gov,
                    Fraction::new(3, 2).unwrap(),
                    Fraction::new(3, 5).unwrap(),
                )
                .unwrap();
            }
            24..=30 if !listings.is_empty() => {
                let ig = &listings[rng.gen_range(0..listings.len())];
                let book = &l.listing(ig).unwrap().book;
                let n = book.buyer_count();
                if n > book.settled_n() {
                    let to = rng.gen_range(book.settled_n() + 1..=n);
                    l.settle_batch(ig, Some(to)).unwrap();
                }
            }
            _ if !listings.is_empty() => {
                let ig = &listings[rng.gen_range(0..listings.len())];
                let mode = if rng.gen_bool(0.6) {
                    SettleMode::Immediate
                } else {
                    SettleMode::Deferred
                };
                if &seller_of[ig] != person {
                    let _ = l.purchase_with(ig, person, mode);
                }
            }
            _ => {}
        }
    }
    assert_eq!(l.last_seq(), GOLDEN_EVENTS);
    l
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

/// The committed golden log and digest. With `CUPNET_REGENERATE_GOLDEN` set,
/// both are rebuilt from [`golden_ledger`] first.
pub fn golden_fixture() -> (String, String) {
    if std::env::var_os("CUPNET_REGENERATE_GOLDEN").is_some() {
        let l = golden_ledger();
        std::fs::create_dir_all(fixture_path("")).unwrap();
        std::fs::write(fixture_path("golden.log"), l.to_log_text()).unwrap();
        std::fs::write(fixture_path("golden.digest"), format!("{}\n", l.digest())).unwrap();
    }
    let log = std::fs::read_to_string(fixture_path("golden.log")).expect("golden.log fixture");
    let digest =
        std::fs::read_to_string(fixture_path("golden.digest")).expect("golden.digest fixture");
    (log, digest.trim().to_string())
}

/// The listing from the price-notation example: 15.7 cups first price,
/// 18000 cups ceiling, listed 2012-10-18, with 345 buyers.
pub fn notation_example() -> (Ledger, ListingId) {
    let mut l = market();
    l.advance_to(date("2012-10-18")).unwrap();
    let params = PriceParams::new(
        Cents(1570),
        Cents(1_800_000),
        Xi::new(147, 2000).unwrap(),
        RoundingMode::CeilStrict,
    )
    .unwrap();
    fund_buyers(&mut l, 345, 1570);
    let ig = l
        .create_listing(&id("seller"), params, date("2012-10-18"))
        .unwrap();
    for i in 1..=345 {
        l.purchase(&ig, &buyer(i)).unwrap();
    }
    (l, ig)
}
