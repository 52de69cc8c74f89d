//! `num/den` text form shared by the coefficient and exchange rates.

use std::fmt;

/// A non-negative fraction kept in lowest terms with a positive denominator.
/// Both terms fit in `i64` so any signed backing can hold them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    num: u64,
    den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FractionError {
    #[error("malformed fraction {0:?}, expected \"num/den\"")]
    Malformed(String),
    #[error("fraction has a zero denominator")]
    ZeroDenominator,
    #[error("fraction {num}/{den} has a term above {}", i64::MAX)]
    TooLarge { num: u64, den: u64 },
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self, FractionError> {
        if den == 0 {
            return Err(FractionError::ZeroDenominator);
        }
        let g = num_integer::gcd(num, den);
        let (num, den) = (num / g, den / g);
        if num > i64::MAX as u64 || den > i64::MAX as u64 {
            return Err(FractionError::TooLarge { num, den });
        }
        Ok(Self { num, den })
    }

    /// Caller guarantees lowest terms and a non-zero denominator.
    pub(crate) const fn from_reduced(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn parse(text: &str) -> Result<Self, FractionError> {
        let bad = || FractionError::Malformed(text.to_string());
        let digits = |s: &str| -> Result<u64, FractionError> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            s.parse().map_err(|_| bad())
        };
        match text.split_once('/') {
            Some((n, d)) => Self::new(digits(n)?, digits(d)?),
            None => Self::new(digits(text)?, 1),
        }
    }
}

impl std::str::FromStr for Fraction {
    type Err = FractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Fraction::parse(s)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl serde::Serialize for Fraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Fraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Fraction::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_renders() {
        let f = Fraction::parse("38/40").unwrap();
        assert_eq!((f.num(), f.den()), (19, 20));
        assert_eq!(f.to_string(), "19/20");
        assert_eq!(Fraction::parse("1").unwrap().to_string(), "1/1");
        assert_eq!(Fraction::parse("0/7").unwrap().to_string(), "0/1");
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(Fraction::parse("1/0"), Err(FractionError::ZeroDenominator));
        assert!(Fraction::parse("1/").is_err());
        assert!(Fraction::parse("-1/2").is_err());
        assert!(Fraction::parse("0.5").is_err());
        assert!(Fraction::parse("").is_err());
        assert!(matches!(
            Fraction::parse("1/9223372036854775808"),
            Err(FractionError::TooLarge { .. })
        ));
        let big = i64::MAX as u64;
        // Only the reduced terms need to fit.
        assert_eq!(
            Fraction::new(2 * big, 4).unwrap(),
            Fraction::new(big, 2).unwrap()
        );
        assert!(Fraction::new(big, big).unwrap().num() == 1);
    }
}
