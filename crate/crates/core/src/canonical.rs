//! Canonical JSON text and SHA-256 digests.
//!
//! Canonical form: no whitespace, object keys sorted lexicographically,
//! integers only. Going through `serde_json::Value` gives sorted keys because
//! its map is a `BTreeMap`.

use num_bigint::BigInt;
use num_rational::Ratio;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Canonical JSON text of any serializable value.
pub fn to_canonical<T: Serialize + ?Sized>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("ledger types always serialize");
    serde_json::to_string(&value).expect("values always render")
}

pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}

pub fn digest_of<T: Serialize + ?Sized>(value: &T) -> String {
    sha256_hex(to_canonical(value))
}

pub const ZERO_DIGEST: &str = "0000000000000000000000000000000000000000000000000000000000000000";

/// Serde helpers for exact rationals as `"num/den"` (or `"num"`) strings.
pub mod exact {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Ratio<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&crate::scalar::to_fraction_string(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<BigInt>, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| serde::de::Error::custom(format!("malformed rational {text:?}")))
    }

    /// Parses the canonical rendering only, so that re-encoding is lossless.
    pub fn parse(text: &str) -> Option<Ratio<BigInt>> {
        let int = |s: &str| -> Option<BigInt> {
            let digits = s.strip_prefix('-').unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            s.parse().ok()
        };
        let value = match text.split_once('/') {
            Some((n, d)) => {
                let d = int(d)?;
                if d <= BigInt::from(0) {
                    return None;
                }
                Ratio::new(int(n)?, d)
            }
            None => Ratio::from_integer(int(text)?),
        };
        (crate::scalar::to_fraction_string(&value) == text).then_some(value)
    }
}
