//! Purchase-schedule simulation and curve export.

use std::io::Write;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frac::Fraction;
use crate::id::{AccountId, ListingId};
use crate::ledger::{Ledger, LedgerError, Role, GENESIS_DATE};
use crate::money::Cents;
use crate::pricing::{PriceParams, RoundingMode};
use crate::scalar;
use crate::settlement::{materialize_debit, seller_income_materialized};
use crate::ExactCurve;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("bad scenario: {0}")]
    BadScenario(String),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

/// A listing and the days on which batches of buyers arrive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: PriceParams,
    /// `(tick, purchases)` pairs. A tick is a day offset from the start.
    pub schedule: Vec<(u64, u64)>,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the rounding mode in `params` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounding_mode: Option<RoundingMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_date: Option<NaiveDate>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| SimError::BadScenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for pair in self.schedule.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(SimError::BadScenario(format!(
                    "tick {} does not follow tick {}",
                    pair[1].0, pair[0].0
                )));
            }
        }
        if let Some((tick, _)) = self.schedule.iter().find(|(_, count)| *count == 0) {
            return Err(SimError::BadScenario(format!(
                "tick {tick} has no purchases"
            )));
        }
        Ok(())
    }

    pub fn effective_params(&self) -> PriceParams {
        match self.rounding_mode {
            Some(mode) => self.params.with_rounding(mode),
            None => self.params,
        }
    }

    pub fn purchases(&self) -> u64 {
        self.schedule.iter().map(|(_, c)| c).sum()
    }
}

/// One exported row per purchase. Exact amounts are cups as `num/den`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: u64,
    pub income_exact: String,
    pub price_exact: String,
    pub income_cents: i64,
    pub price_cents: i64,
    pub seller_delta_cents: i64,
    pub escrow_cents: i64,
}

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "income_exact",
    "price_exact",
    "income_cents",
    "price_cents",
    "seller_delta_cents",
    "escrow_cents",
];

#[derive(Debug, Clone)]
pub struct Simulation {
    pub listing: ListingId,
    pub rows: Vec<CurveRow>,
}

fn actor(ledger: &mut Ledger, name: &str, role: Role) -> Result<AccountId, LedgerError> {
    let id = AccountId::new(name).expect("valid id");
    if ledger.account(&id).is_none() {
        ledger.open_account(id.clone(), role)?;
    }
    Ok(id)
}

/// Runs `scenario` against `ledger`, opening the simulation's own seller,
/// bank and authority if needed. Each buyer is funded with exactly enough
/// cups for their purchase and buys immediately.
pub fn simulate(ledger: &mut Ledger, scenario: &Scenario) -> Result<Simulation, SimError> {
    scenario.validate()?;
    let params = scenario.effective_params();
    let start = ledger
        .clock()
        .max(scenario.birth_date.unwrap_or(GENESIS_DATE));
    ledger.advance_to(start)?;

    let authority = actor(ledger, "sim-authority", Role::Authority)?;
    let bank = actor(ledger, "sim-bank", Role::Bank)?;
    let seller = actor(ledger, "sim-seller", Role::Person)?;
    if ledger.rates().is_none() {
        let one = Fraction::new(1, 1).expect("nonzero");
        ledger.set_rates(&authority, one, one)?;
    }
    let buy_rate = ledger.rates().expect("set above").buy_rate;
    let listing = ledger.create_listing(&seller, params, start)?;
    let curve = ExactCurve::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut rows = Vec::with_capacity(scenario.purchases() as usize);

    for &(tick, count) in &scenario.schedule {
        let date = start
            .checked_add_days(Days::new(tick))
            .ok_or_else(|| SimError::BadScenario(format!("tick {tick} is out of the calendar")))?;
        ledger.advance_to(date)?;
        for _ in 0..count {
            let buyer = loop {
                let id = AccountId::new(&format!("b-{:016x}", rng.gen::<u64>())).expect("valid id");
                if ledger.account(&id).is_none() {
                    break id;
                }
            };
            ledger.open_account(buyer.clone(), Role::Person)?;
            let n = ledger.listing(&listing).expect("created").buyer_count() + 1;
            let debit = materialize_debit(&params, n);
            if debit > Cents::ZERO {
                let fiat =
                    (debit.get() as u128 * buy_rate.den() as u128).div_ceil(buy_rate.num() as u128);
                let fiat = i64::try_from(fiat)
                    .map_err(|_| SimError::BadScenario("price too large to fund".into()))?;
                ledger.mint(&bank, &buyer, fiat)?;
            }
            ledger.purchase(&listing, &buyer)?;
            let income = seller_income_materialized(&params, n);
            rows.push(CurveRow {
                n,
                income_exact: scalar::to_fraction_string(&curve.income(n)),
                price_exact: scalar::to_fraction_string(&curve.price(n)),
                income_cents: income.get(),
                price_cents: debit.get(),
                seller_delta_cents: (income - seller_income_materialized(&params, n - 1)).get(),
                escrow_cents: ledger
                    .listing(&listing)
                    .expect("created")
                    .book
                    .escrow()
                    .get(),
            });
        }
    }
    Ok(Simulation { listing, rows })
}

/// Writes the header and then one record per row. An empty slice yields a
/// header-only file.
pub fn write_csv<W: Write>(rows: &[CurveRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> csv::Result<Vec<CurveRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}
