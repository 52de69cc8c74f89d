mod common;

use common::*;
use cupnet::exchange::verify_voucher_chain;
use cupnet::frac::Fraction;
use cupnet::ledger::Role;
use cupnet::{Cents, Ledger, LedgerError};

fn frac(n: u64, d: u64) -> Fraction {
    Fraction::new(n, d).unwrap()
}

fn exchange(buy: Fraction, sell: Fraction) -> Ledger {
    let mut l = Ledger::new();
    l.open_account(id("gov"), Role::Authority).unwrap();
    l.open_account(id("bank"), Role::Bank).unwrap();
    l.open_account(id("ann"), Role::Person).unwrap();
    l.set_rates(&id("gov"), buy, sell).unwrap();
    l
}

#[test]
fn only_the_authority_sets_rates_and_reads_the_pool() {
    let mut l = exchange(frac(1, 1), frac(19, 20));
    for who in ["bank", "ann"] {
        assert!(matches!(
            l.set_rates(&id(who), frac(2, 1), frac(1, 1)),
            Err(LedgerError::AccessDenied { .. } | LedgerError::WrongRole { .. })
        ));
        assert!(l.tax_report(&id(who), None).is_err());
    }
    assert!(matches!(
        l.mint(&id("ann"), &id("ann"), 100),
        Err(LedgerError::WrongRole { .. })
    ));
    assert!(matches!(
        l.mint(&id("bank"), &id("gov"), 100),
        Err(LedgerError::WrongRole { .. })
    ));
    assert!(matches!(
        l.mint(&id("bank"), &id("ann"), 0),
        Err(LedgerError::NonPositiveAmount(0))
    ));
}

#[test]
fn rates_are_required() {
    let mut l = Ledger::new();
    l.open_account(id("bank"), Role::Bank).unwrap();
    l.open_account(id("ann"), Role::Person).unwrap();
    assert!(matches!(
        l.mint(&id("bank"), &id("ann"), 100),
        Err(LedgerError::NoRatesSet)
    ));
}

#[test]
fn one_cup_cent_redeemed_at_nineteen_twentieths() {
    let mut l = exchange(frac(1, 1), frac(19, 20));
    l.mint(&id("bank"), &id("ann"), 1).unwrap();
    l.redeem(&id("bank"), &id("ann"), Cents(1)).unwrap();
    let v = &l.vouchers()[0];
    assert_eq!(v.fiat_cents, 0);
    assert_eq!(v.cup_cents, Cents(1));
    let report = l.tax_report(&id("gov"), None).unwrap();
    assert_eq!(report.totals.spread, q(1, 20));
    assert_eq!(report.totals.residues, q(19, 20));
    assert_eq!(report.pool, q(1, 1));
    assert_eq!(l.supply(), Cents::ZERO);
}

#[test]
fn fractional_buy_rate_leaves_a_residue() {
    // 3 cup-cents per 2 fiat-cents: 7 fiat-cents buy 10 cup-cents, and the
    // floored-off half cup-cent is worth 1/3 fiat-cent.
    let mut l = exchange(frac(3, 2), frac(3, 5));
    l.mint(&id("bank"), &id("ann"), 7).unwrap();
    assert_eq!(l.account(&id("ann")).unwrap().balance, Cents(10));
    let report = l.tax_report(&id("gov"), None).unwrap();
    assert_eq!(report.totals.residues, q(1, 3));
    // 10 cup-cents are 20/3 fiat-cents at the buy rate and 6 at the sell rate.
    l.redeem(&id("bank"), &id("ann"), Cents(10)).unwrap();
    let report = l.tax_report(&id("gov"), None).unwrap();
    assert_eq!(report.totals.paid_fiat, 6);
    assert_eq!(report.totals.spread, q(2, 3));
    assert_eq!(report.pool, q(1, 1));
    assert_eq!(
        q(report.totals.minted_fiat, 1),
        q(report.totals.paid_fiat, 1) + report.pool
    );
}

#[test]
fn vouchers_chain_and_history_is_reproducible() {
    let mut l = exchange(frac(1, 1), frac(19, 20));
    l.mint(&id("bank"), &id("ann"), 10_000).unwrap();
    for amount in [1, 17, 333, 2_000] {
        l.redeem(&id("bank"), &id("ann"), Cents(amount)).unwrap();
    }
    let mid = l.last_seq() - 2;
    let early = l.tax_report(&id("gov"), Some(mid)).unwrap();
    assert_eq!(early.up_to_seq, mid);
    assert_eq!(early.totals.redeemed_cups, Cents(18));
    assert!(verify_voucher_chain(l.vouchers()).is_ok());
    let mut forged = l.vouchers().to_vec();
    forged[2].fiat_cents += 1;
    assert_eq!(verify_voucher_chain(&forged), Err(2));
    assert!(matches!(
        l.redeem(&id("bank"), &id("ann"), Cents(1_000_000)),
        Err(LedgerError::InsufficientFunds { .. })
    ));
    assert_eq!(l.account(&id("bank")).unwrap().balance, Cents::ZERO);
}
