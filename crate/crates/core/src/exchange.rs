//! Bank on/off-ramp between fiat and cups.
//!
//! Banks mint cups against fiat at the buy rate and redeem them at the sell
//! rate. Both rates are set by an authority. Banks never gain or lose
//! anything: the gap between the two rates (the spread) and every rounding
//! residue is booked to the authority's tax pool. Fiat only exists here as
//! audit figures in fiat-cents.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, ZERO_DIGEST};
use crate::frac::Fraction;
use crate::id::AccountId;
use crate::money::Cents;
use crate::scalar;

/// Conversion rates in force. `buy_rate` is cup-cents per fiat-cent on mint,
/// `sell_rate` fiat-cents per cup-cent on redeem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateTable {
    pub buy_rate: Fraction,
    pub sell_rate: Fraction,
    pub set_by: AccountId,
    pub effective_from: u64,
}

fn to_ratio(f: Fraction) -> Ratio<BigInt> {
    Ratio::new(BigInt::from(f.num()), BigInt::from(f.den()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintQuote {
    pub cups: Cents,
    /// Fiat-cents paid in but not converted because of flooring.
    pub residue: Ratio<BigInt>,
}

/// `floor(fiat × buy)` cup-cents; the fiat value of the floored-off part is
/// the residue.
pub fn quote_mint(rates: &RateTable, fiat_cents: i64) -> MintQuote {
    let buy = to_ratio(rates.buy_rate);
    let exact = Ratio::from_integer(BigInt::from(fiat_cents)) * &buy;
    let cups = scalar::floor_i64(&exact);
    let converted = Ratio::from_integer(BigInt::from(cups)) / &buy;
    MintQuote {
        cups: Cents(cups),
        residue: Ratio::from_integer(BigInt::from(fiat_cents)) - converted,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedeemQuote {
    pub fiat_cents: i64,
    /// Fiat value at the buy rate minus the exact fiat owed at the sell rate.
    pub spread: Ratio<BigInt>,
    /// Exact fiat owed minus the floored voucher amount.
    pub residue: Ratio<BigInt>,
}

pub fn quote_redeem(rates: &RateTable, cup_cents: Cents) -> RedeemQuote {
    let cups = Ratio::from_integer(BigInt::from(cup_cents.get()));
    let exact = &cups * to_ratio(rates.sell_rate);
    let fiat = scalar::floor_i64(&exact);
    let reference = &cups / to_ratio(rates.buy_rate);
    RedeemQuote {
        fiat_cents: fiat,
        spread: reference - &exact,
        residue: exact - Ratio::from_integer(BigInt::from(fiat)),
    }
}

/// Canonical record of a redemption, chained to the previous voucher.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Voucher {
    pub voucher_id: String,
    pub payee: AccountId,
    pub fiat_cents: i64,
    pub cup_cents: Cents,
    pub rate: Fraction,
    pub issued_seq: u64,
    pub prev_digest: String,
    pub digest: String,
}

#[derive(Serialize)]
struct VoucherBody<'a> {
    voucher_id: &'a str,
    payee: &'a AccountId,
    fiat_cents: i64,
    cup_cents: Cents,
    rate: Fraction,
    issued_seq: u64,
    prev_digest: &'a str,
}

impl Voucher {
    pub fn issue(
        index: usize,
        payee: AccountId,
        fiat_cents: i64,
        cup_cents: Cents,
        rate: Fraction,
        issued_seq: u64,
        prev_digest: &str,
    ) -> Self {
        let mut v = Voucher {
            voucher_id: format!("v-{:06}", index + 1),
            payee,
            fiat_cents,
            cup_cents,
            rate,
            issued_seq,
            prev_digest: prev_digest.to_string(),
            digest: String::new(),
        };
        v.digest = v.compute_digest();
        v
    }

    pub fn compute_digest(&self) -> String {
        canonical::digest_of(&VoucherBody {
            voucher_id: &self.voucher_id,
            payee: &self.payee,
            fiat_cents: self.fiat_cents,
            cup_cents: self.cup_cents,
            rate: self.rate,
            issued_seq: self.issued_seq,
            prev_digest: &self.prev_digest,
        })
    }

    /// One canonical JSON line, the voucher export format.
    pub fn to_canonical_line(&self) -> String {
        canonical::to_canonical(self)
    }
}

/// Checks every digest and link. Returns the index of the first bad voucher.
pub fn verify_voucher_chain(vouchers: &[Voucher]) -> Result<(), usize> {
    let mut prev = ZERO_DIGEST.to_string();
    for (i, v) in vouchers.iter().enumerate() {
        let amount_ok = {
            let exact = Ratio::from_integer(BigInt::from(v.cup_cents.get())) * to_ratio(v.rate);
            scalar::floor_i64(&exact) == v.fiat_cents
        };
        if v.prev_digest != prev || v.compute_digest() != v.digest || !amount_ok {
            return Err(i);
        }
        prev = v.digest.clone();
    }
    Ok(())
}

/// Running totals of the exchange, all reproducible from the log.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TaxLedger {
    pub minted_fiat: i64,
    pub minted_cups: Cents,
    pub redeemed_cups: Cents,
    pub paid_fiat: i64,
    #[serde(with = "canonical::exact")]
    pub spread: Ratio<BigInt>,
    #[serde(with = "canonical::exact")]
    pub residues: Ratio<BigInt>,
}

impl TaxLedger {
    pub fn record_mint(&mut self, fiat_cents: i64, quote: &MintQuote) {
        self.minted_fiat += fiat_cents;
        self.minted_cups += quote.cups;
        self.residues += &quote.residue;
    }

    pub fn record_redeem(&mut self, cup_cents: Cents, quote: &RedeemQuote) {
        self.redeemed_cups += cup_cents;
        self.paid_fiat += quote.fiat_cents;
        self.spread += &quote.spread;
        self.residues += &quote.residue;
    }

    /// Cups currently in circulation.
    pub fn supply(&self) -> Cents {
        self.minted_cups - self.redeemed_cups
    }

    /// Everything owed to the tax pool, in fiat-cents.
    pub fn pool(&self) -> Ratio<BigInt> {
        &self.spread + &self.residues
    }
}

/// What an authority sees from [`crate::Ledger::tax_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaxReport {
    pub up_to_seq: u64,
    #[serde(flatten)]
    pub totals: TaxLedger,
    #[serde(with = "canonical::exact")]
    pub pool: Ratio<BigInt>,
}

impl TaxReport {
    pub fn new(up_to_seq: u64, totals: TaxLedger) -> Self {
        Self {
            up_to_seq,
            pool: totals.pool(),
            totals,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.totals.minted_fiat == 0 && self.totals.redeemed_cups.is_zero() && self.pool.is_zero()
    }
}


mod ops {
    use super::*;
    use crate::ledger::{Ledger, LedgerError, LedgerEvent, Payload, Role};
    use crate::settlement::{Party, SettlementPlan};

    impl Ledger {
        /// Only an authority may set rates; banks take no commission and have no
        /// say in them.
        pub fn set_rates(
            &mut self,
            authority: &AccountId,
            buy_rate: Fraction,
            sell_rate: Fraction,
        ) -> Result<&LedgerEvent, LedgerError> {
            let payload = self.prepare_rates(authority, buy_rate, sell_rate)?;
            Ok(self.commit(payload))
        }

        pub(crate) fn prepare_rates(
            &self,
            authority: &AccountId,
            buy_rate: Fraction,
            sell_rate: Fraction,
        ) -> Result<Payload, LedgerError> {
            let role = self
                .account(authority)
                .map(|a| a.role)
                .ok_or_else(|| LedgerError::UnknownAccount(authority.clone()))?;
            if role != Role::Authority {
                return Err(LedgerError::AccessDenied {
                    requester: authority.clone(),
                    resource: "exchange rates".to_string(),
                });
            }
            for (name, rate) in [("buy", buy_rate), ("sell", sell_rate)] {
                if rate.is_zero() {
                    return Err(LedgerError::InvalidRate(format!(
                        "{name} rate must be positive"
                    )));
                }
            }
            Ok(Payload::RateSet {
                authority: authority.clone(),
                buy_rate,
                sell_rate,
            })
        }

        /// A bank credits `person` with cups for `fiat_cents` paid in.
        pub fn mint(
            &mut self,
            bank: &AccountId,
            person: &AccountId,
            fiat_cents: i64,
        ) -> Result<&LedgerEvent, LedgerError> {
            let payload = self.prepare_mint(bank, person, fiat_cents)?;
            Ok(self.commit(payload))
        }

        pub(crate) fn prepare_mint(
            &self,
            bank: &AccountId,
            person: &AccountId,
            fiat_cents: i64,
        ) -> Result<Payload, LedgerError> {
            self.require_role(bank, Role::Bank)?;
            self.require_role(person, Role::Person)?;
            if fiat_cents <= 0 {
                return Err(LedgerError::NonPositiveAmount(fiat_cents));
            }
            let rates = self.rates().ok_or(LedgerError::NoRatesSet)?;
            let quote = quote_mint(rates, fiat_cents);
            let mut plan = SettlementPlan::new(self.next_seq());
            plan.push(Party::Issuance, -quote.cups);
            plan.push(Party::Account(person.clone()), quote.cups);
            Ok(Payload::Mint {
                bank: bank.clone(),
                person: person.clone(),
                fiat_cents,
                cup_cents: quote.cups,
                residue: quote.residue,
                plan,
            })
        }

        /// A bank buys back `cup_cents` from `person` and issues a voucher for
        /// the fiat owed.
        pub fn redeem(
            &mut self,
            bank: &AccountId,
            person: &AccountId,
            cup_cents: Cents,
        ) -> Result<&LedgerEvent, LedgerError> {
            let payload = self.prepare_redeem(bank, person, cup_cents)?;
            Ok(self.commit(payload))
        }

        pub(crate) fn prepare_redeem(
            &self,
            bank: &AccountId,
            person: &AccountId,
            cup_cents: Cents,
        ) -> Result<Payload, LedgerError> {
            self.require_role(bank, Role::Bank)?;
            self.require_role(person, Role::Person)?;
            if cup_cents.get() <= 0 {
                return Err(LedgerError::NonPositiveAmount(cup_cents.get()));
            }
            let rates = self.rates().ok_or(LedgerError::NoRatesSet)?;
            let available = self.account(person).expect("checked").balance;
            if available < cup_cents {
                return Err(LedgerError::InsufficientFunds {
                    account: person.clone(),
                    needed: cup_cents,
                    available,
                });
            }
            let quote = quote_redeem(rates, cup_cents);
            let seq = self.next_seq();
            let prev = self
                .vouchers()
                .last()
                .map_or(ZERO_DIGEST, |v| v.digest.as_str());
            let voucher = Voucher::issue(
                self.vouchers().len(),
                person.clone(),
                quote.fiat_cents,
                cup_cents,
                rates.sell_rate,
                seq,
                prev,
            );
            let mut plan = SettlementPlan::new(seq);
            plan.push(Party::Account(person.clone()), -cup_cents);
            plan.push(Party::Issuance, cup_cents);
            Ok(Payload::Redeem {
                bank: bank.clone(),
                person: person.clone(),
                cup_cents,
                spread: quote.spread,
                residue: quote.residue,
                voucher,
                plan,
            })
        }

        /// Exchange totals after event `up_to` (default: the latest), rebuilt
        /// from the log when a past sequence is asked for.
        pub fn tax_report(
            &self,
            authority: &AccountId,
            up_to: Option<u64>,
        ) -> Result<TaxReport, LedgerError> {
            match self.account(authority) {
                None => return Err(LedgerError::UnknownAccount(authority.clone())),
                Some(a) if a.role != Role::Authority => {
                    return Err(LedgerError::AccessDenied {
                        requester: authority.clone(),
                        resource: "tax report".to_string(),
                    })
                }
                Some(_) => {}
            }
            let last = self.last_seq();
            let up_to = up_to.unwrap_or(last).min(last);
            if up_to == last {
                return Ok(TaxReport::new(up_to, self.tax().clone()));
            }
            let prefix = Ledger::replay(&self.events()[..up_to as usize])?;
            Ok(TaxReport::new(up_to, prefix.tax().clone()))
        }
    }
}
