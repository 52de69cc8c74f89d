//! Newline-delimited canonical JSON encoding of the event log.
//!
//! Each line is `{"at":..,"event":..,"hash":..,"prev":..,"seq":..}` with
//! sorted keys and no whitespace. `hash` is the SHA-256 of the same record
//! without the `hash` field, and `prev` is the previous line's hash (all
//! zeros for the first line), so any edit breaks the chain.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, ZERO_DIGEST};

use super::event::{LedgerEvent, Payload};
use super::LedgerError;

#[derive(Serialize)]
struct Unsealed<'a> {
    at: NaiveDate,
    event: &'a Payload,
    prev: &'a str,
    seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SealedRecord {
    pub at: NaiveDate,
    pub event: Payload,
    pub hash: String,
    pub prev: String,
    pub seq: u64,
}

fn hash_of(event: &LedgerEvent, prev: &str) -> String {
    hash_parts(event.at, &event.event, prev, event.seq)
}

fn hash_parts(at: NaiveDate, event: &Payload, prev: &str, seq: u64) -> String {
    canonical::digest_of(&Unsealed {
        at,
        event,
        prev,
        seq,
    })
}

/// Encodes one event chained to `prev`; returns the line (without newline)
/// and its hash.
pub fn encode_line(event: &LedgerEvent, prev: &str) -> (String, String) {
    let hash = hash_of(event, prev);
    let record = SealedRecord {
        at: event.at,
        event: event.event.clone(),
        hash: hash.clone(),
        prev: prev.to_string(),
        seq: event.seq,
    };
    (canonical::to_canonical(&record), hash)
}

/// Full log text, one line per event, each terminated by `\n`.
pub fn encode(events: &[LedgerEvent]) -> String {
    let mut out = String::new();
    let mut prev = ZERO_DIGEST.to_string();
    for e in events {
        let (line, hash) = encode_line(e, &prev);
        out.push_str(&line);
        out.push('\n');
        prev = hash;
    }
    out
}

/// Hash of the last line, or the zero digest for an empty log.
pub fn head_hash(events: &[LedgerEvent]) -> String {
    events
        .iter()
        .fold(ZERO_DIGEST.to_string(), |prev, e| hash_of(e, &prev))
}

/// How one line of a log fared against the format and the chain.
#[derive(Debug, Clone)]
pub enum LineCheck {
    Ok(LedgerEvent),
    /// Parsed, but the chain or canonical form is broken.
    Broken(LedgerEvent, String),
    Unparseable(String),
}

fn corrupt(seq: u64, reason: impl Into<String>) -> LedgerError {
    LedgerError::CorruptLog {
        seq,
        reason: reason.into(),
    }
}

/// Line-by-line checker over a whole log; yields one [`LineCheck`] per line.
pub struct LineChecks<'a> {
    lines: std::iter::Enumerate<std::str::Split<'a, char>>,
    last: usize,
    unterminated: bool,
    prev: String,
}

impl<'a> LineChecks<'a> {
    pub fn new(text: &'a str) -> Self {
        // An empty log has no lines; a trailing newline does not start one.
        let body = text.strip_suffix('\n').unwrap_or(text);
        let mut lines = body.split('\n').enumerate();
        if text.is_empty() {
            lines.by_ref().for_each(drop);
        }
        Self {
            lines,
            last: body.matches('\n').count(),
            unterminated: !text.is_empty() && !text.ends_with('\n'),
            prev: ZERO_DIGEST.to_string(),
        }
    }
}

impl Iterator for LineChecks<'_> {
    type Item = LineCheck;

    fn next(&mut self) -> Option<LineCheck> {
        let (i, line) = self.lines.next()?;
        let expected_seq = i as u64 + 1;
        let record: SealedRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                // The chain cannot be followed past a line we cannot read.
                self.prev = String::new();
                return Some(LineCheck::Unparseable(format!("line {expected_seq}: {e}")));
            }
        };
        let problem = if record.seq != expected_seq {
            Some(format!(
                "sequence {} where {expected_seq} was expected",
                record.seq
            ))
        } else if record.prev != self.prev {
            Some("previous-hash link broken".to_string())
        } else if hash_parts(record.at, &record.event, &record.prev, record.seq) != record.hash {
            Some("record hash mismatch".to_string())
        } else if canonical::to_canonical(&record) != line {
            Some("record is not in canonical form".to_string())
        } else if self.unterminated && i == self.last {
            Some("last record is not newline-terminated".to_string())
        } else {
            None
        };
        let event = LedgerEvent {
            seq: record.seq,
            at: record.at,
            event: record.event,
        };
        self.prev = record.hash;
        Some(match problem {
            None => LineCheck::Ok(event),
            Some(p) => LineCheck::Broken(event, p),
        })
    }
}

/// Checks every line without stopping at the first problem.
pub fn check_lines(text: &str) -> Vec<LineCheck> {
    LineChecks::new(text).collect()
}

/// Strict decode: the first malformed or unchained line is an error.
pub fn decode(text: &str) -> Result<Vec<LedgerEvent>, LedgerError> {
    let mut events = Vec::new();
    for (i, check) in LineChecks::new(text).enumerate() {
        let seq = i as u64 + 1;
        match check {
            LineCheck::Ok(e) => events.push(e),
            LineCheck::Broken(_, reason) | LineCheck::Unparseable(reason) => {
                return Err(corrupt(seq, reason))
            }
        }
    }
    Ok(events)
}
