//! The price-tag notation: `PRICE "cup" ["^" IINF] ["@" DATE] ["#" COUNT]`.
//!
//! `1.2cup^18000@2012-10-18#345` reads "next buyer pays 1.2 cups, income is
//! capped at 18000 cups, listed on 2012-10-18, 345 buyers so far". Amounts are
//! decimal cups with at most two fraction digits. A count of zero is never
//! printed, so `15.7cup^18000@2012-10-18` is the first-buyer form.

use std::fmt;

use chrono::NaiveDate;

use crate::id::ListingId;
use crate::ledger::{Ledger, LedgerError};
use crate::money::{Cents, CENTS_PER_CUP};
use crate::pricing::PriceParams;
use crate::settlement::materialize_debit;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TagError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax {
        offset: usize,
        expected: &'static str,
    },
    #[error("more than two fraction digits at byte {offset}")]
    Precision { offset: usize },
}

impl TagError {
    pub fn offset(&self) -> usize {
        match self {
            TagError::Syntax { offset, .. } | TagError::Precision { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verbosity {
    #[default]
    Full,
    NoCount,
    Short,
}

/// A parsed or rendered price tag. A zero buyer count is stored as absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PriceTag {
    current_price: Cents,
    i_inf: Option<Cents>,
    birth_date: Option<NaiveDate>,
    buyer_count: Option<u64>,
}

impl PriceTag {
    /// Amounts must be non-negative.
    pub fn new(
        current_price: Cents,
        i_inf: Option<Cents>,
        birth_date: Option<NaiveDate>,
        buyer_count: Option<u64>,
    ) -> Self {
        assert!(current_price.0 >= 0, "negative price");
        assert!(i_inf.is_none_or(|c| c.0 >= 0), "negative ceiling");
        Self {
            current_price,
            i_inf,
            birth_date,
            buyer_count: buyer_count.filter(|&c| c > 0),
        }
    }

    pub fn current_price(&self) -> Cents {
        self.current_price
    }

    pub fn i_inf(&self) -> Option<Cents> {
        self.i_inf
    }

    pub fn birth_date(&self) -> Option<NaiveDate> {
        self.birth_date
    }

    pub fn buyer_count(&self) -> Option<u64> {
        self.buyer_count
    }

    /// Buyer count with absence read as zero.
    pub fn count(&self) -> u64 {
        self.buyer_count.unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<Self, TagError> {
        Parser {
            s: text.as_bytes(),
            pos: 0,
        }
        .tag()
    }

    pub fn format(&self, verbosity: Verbosity) -> String {
        let mut out = format!("{}cup", self.current_price.to_cups_string());
        if verbosity == Verbosity::Short {
            return out;
        }
        if let Some(i) = self.i_inf {
            out.push('^');
            out.push_str(&i.to_cups_string());
        }
        if let Some(d) = self.birth_date {
            out.push('@');
            out.push_str(&d.format("%Y-%m-%d").to_string());
        }
        if verbosity == Verbosity::Full {
            if let Some(c) = self.buyer_count {
                out.push('#');
                out.push_str(&c.to_string());
            }
        }
        out
    }

    /// The tag a listing with `params` shows after `count` purchases.
    pub fn for_params(params: &PriceParams, count: u64, birth_date: Option<NaiveDate>) -> Self {
        Self::new(
            materialize_debit(params, count + 1),
            Some(params.i_inf()),
            birth_date,
            Some(count),
        )
    }

    /// True when this tag is what a listing with `params` displays at the
    /// tag's count. Absent fields are not checked.
    pub fn consistent_with(&self, params: &PriceParams) -> bool {
        self.i_inf.is_none_or(|i| i == params.i_inf())
            && self.current_price == materialize_debit(params, self.count() + 1)
    }

    /// Two tags denote the same listing at possibly different counts.
    pub fn equivalent(&self, other: &PriceTag, params: &PriceParams) -> bool {
        self.i_inf == other.i_inf
            && self.birth_date == other.birth_date
            && self.consistent_with(params)
            && other.consistent_with(params)
    }
}

impl fmt::Display for PriceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(Verbosity::Full))
    }
}

impl std::str::FromStr for PriceTag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PriceTag::parse(s)
    }
}

/// The tag of a live listing: the price the next buyer would pay.
pub fn live_tag(ledger: &Ledger, listing: &ListingId) -> Result<PriceTag, LedgerError> {
    let l = ledger
        .listing(listing)
        .ok_or_else(|| LedgerError::UnknownListing(listing.clone()))?;
    Ok(PriceTag::new(
        l.book.next_debit(),
        Some(l.params().i_inf()),
        Some(l.birth_date),
        Some(l.buyer_count()),
    ))
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &'static str) -> TagError {
        TagError::Syntax {
            offset: self.pos,
            expected,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn tag(mut self) -> Result<PriceTag, TagError> {
        let price = self.amount()?;
        if !self.s[self.pos..].starts_with(b"cup") {
            return Err(self.err("\"cup\""));
        }
        self.pos += 3;
        let i_inf = if self.eat(b'^') {
            Some(self.amount()?)
        } else {
            None
        };
        let birth = if self.eat(b'@') {
            Some(self.date()?)
        } else {
            None
        };
        let count = if self.eat(b'#') {
            Some(self.integer()?)
        } else {
            None
        };
        if self.pos != self.s.len() {
            return Err(self.err("end of tag"));
        }
        Ok(PriceTag::new(price, i_inf, birth, count))
    }

    fn digits(&mut self) -> &'a [u8] {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn integer(&mut self) -> Result<u64, TagError> {
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.err("digit"));
        }
        digits
            .iter()
            .try_fold(0u64, |acc, &d| {
                acc.checked_mul(10)?.checked_add(u64::from(d - b'0'))
            })
            .ok_or(TagError::Syntax {
                offset: start,
                expected: "integer in range",
            })
    }

    fn amount(&mut self) -> Result<Cents, TagError> {
        let start = self.pos;
        let whole = self.integer()?;
        let mut frac = 0u64;
        if self.eat(b'.') {
            let frac_start = self.pos;
            let digits = self.digits();
            match digits.len() {
                0 => return Err(self.err("fraction digit")),
                1 => frac = u64::from(digits[0] - b'0') * 10,
                2 => frac = u64::from(digits[0] - b'0') * 10 + u64::from(digits[1] - b'0'),
                _ => {
                    return Err(TagError::Precision {
                        offset: frac_start + 2,
                    })
                }
            }
        }
        whole
            .checked_mul(CENTS_PER_CUP as u64)
            .and_then(|c| c.checked_add(frac))
            .and_then(|c| i64::try_from(c).ok())
            .map(Cents)
            .ok_or(TagError::Syntax {
                offset: start,
                expected: "amount in range",
            })
    }

    fn date(&mut self) -> Result<NaiveDate, TagError> {
        let start = self.pos;
        let shape = b"dddd-dd-dd";
        for &want in shape {
            let ok = match (want, self.peek()) {
                (b'd', Some(b)) => b.is_ascii_digit(),
                (b'-', Some(b)) => b == b'-',
                _ => false,
            };
            if !ok {
                return Err(self.err("date as YYYY-MM-DD"));
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        NaiveDate::parse_from_str(text, "%Y-%m-%d").map_err(|_| TagError::Syntax {
            offset: start,
            expected: "valid calendar date",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{RoundingMode, Xi};

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn parses_display_example() {
        let t = PriceTag::parse("1.2cup^18000@2012-10-18#345").unwrap();
        assert_eq!(t.current_price(), Cents(120));
        assert_eq!(t.i_inf(), Some(Cents(1_800_000)));
        assert_eq!(t.birth_date(), Some(d("2012-10-18")));
        assert_eq!(t.buyer_count(), Some(345));
        assert_eq!(t.format(Verbosity::Full), "1.2cup^18000@2012-10-18#345");
        assert_eq!(t.format(Verbosity::NoCount), "1.2cup^18000@2012-10-18");
        assert_eq!(t.format(Verbosity::Short), "1.2cup");
    }

    #[test]
    fn zero_count_is_elided() {
        let t = PriceTag::parse("15.7cup^18000@2012-10-18#0").unwrap();
        assert_eq!(t, PriceTag::parse("15.7cup^18000@2012-10-18").unwrap());
        assert_eq!(t.buyer_count(), None);
        assert_eq!(t.current_price(), Cents(1570));
        assert_eq!(t.to_string(), "15.7cup^18000@2012-10-18");
    }

    #[test]
    fn display_forms_are_equivalent() {
        let params = PriceParams::new(
            Cents(1570),
            Cents(1_800_000),
            Xi::new(147, 2000).unwrap(),
            RoundingMode::CeilStrict,
        )
        .unwrap();
        let live = PriceTag::parse("1.2cup^18000@2012-10-18#345").unwrap();
        let fresh = PriceTag::parse("15.7cup^18000@2012-10-18").unwrap();
        assert!(live.consistent_with(&params));
        assert!(fresh.consistent_with(&params));
        assert!(live.equivalent(&fresh, &params));
        let stale = PriceTag::parse("1.3cup^18000@2012-10-18#345").unwrap();
        assert!(!stale.equivalent(&fresh, &params));
        let built = PriceTag::for_params(&params, 345, Some(d("2012-10-18")));
        assert_eq!(built, live);
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            PriceTag::parse("1.234cup"),
            Err(TagError::Precision { offset: 4 })
        );
        assert_eq!(PriceTag::parse("").unwrap_err().offset(), 0);
        assert_eq!(PriceTag::parse("1.2cu").unwrap_err().offset(), 3);
        assert_eq!(PriceTag::parse("1.cup").unwrap_err().offset(), 2);
        assert_eq!(PriceTag::parse("1cup^").unwrap_err().offset(), 5);
        assert_eq!(PriceTag::parse("1cup@2012-1-08").unwrap_err().offset(), 11);
        assert_eq!(PriceTag::parse("1cup@2012-02-30").unwrap_err().offset(), 5);
        assert_eq!(PriceTag::parse("1cup#3x").unwrap_err().offset(), 6);
        assert_eq!(PriceTag::parse("1cup#").unwrap_err().offset(), 5);
        assert!(matches!(
            PriceTag::parse("99999999999999999999cup"),
            Err(TagError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            PriceTag::parse("999999999999999999cup"),
            Err(TagError::Syntax { offset: 0, .. })
        ));
    }

    #[test]
    fn optional_fields_are_independent() {
        let t = PriceTag::parse("6.67cup#2").unwrap();
        assert_eq!(t.i_inf(), None);
        assert_eq!(t.birth_date(), None);
        assert_eq!(t.count(), 2);
        assert_eq!(t.to_string(), "6.67cup#2");
        assert_eq!(PriceTag::parse("0cup").unwrap().current_price(), Cents(0));
        assert_eq!(PriceTag::parse("1.50cup").unwrap().to_string(), "1.5cup");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn tag() -> impl Strategy<Value = PriceTag> {
            (
                0i64..10_000_000_000,
                proptest::option::of(0i64..10_000_000_000),
                proptest::option::of(0i32..400_000),
                proptest::option::of(any::<u64>()),
            )
                .prop_map(|(p, i, days, c)| {
                    let date = days.map(|n| d("1900-01-01") + chrono::Days::new(n as u64));
                    PriceTag::new(Cents(p), i.map(Cents), date, c)
                })
        }

        proptest! {
            #[test]
            fn parse_inverts_format(t in tag()) {
                prop_assert_eq!(PriceTag::parse(&t.to_string()).unwrap(), t);
            }

            #[test]
            fn format_of_parse_is_idempotent(s in "[0-9]{1,4}(\\.[0-9]{1,2})?cup(\\^[0-9]{1,3})?(#[0-9]{1,3})?") {
                let once = PriceTag::parse(&s).unwrap().to_string();
                let twice = PriceTag::parse(&once).unwrap().to_string();
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn arbitrary_input_never_panics(s in "\\PC{0,40}") {
                if let Err(e) = PriceTag::parse(&s) {
                    prop_assert!(e.offset() <= s.len());
                }
            }
        }
    }
}
