//! The `cupnet` command line.
//!
//! Every command reads the ledger log, runs one operation and, if the
//! operation appended events, writes the log back. Output is one canonical
//! JSON record per line unless `--human` is given. Exit codes: 0 success,
//! 1 domain or invariant failure, 2 I/O failure.

pub mod scenario;
mod store;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::canonical;
use crate::frac::Fraction;
use crate::id::{AccountId, ListingId};
use crate::ledger::{audit_log, Ledger, LedgerError, LedgerEvent, Role};
use crate::money::Cents;
use crate::pricetag::{live_tag, Verbosity};
use crate::pricing::{PriceParams, RoundingMode, Xi};
use crate::settlement::SettleMode;

use scenario::{Scenario, SimError};
use store::Store;

#[derive(Debug, Parser)]
#[command(
    name = "cupnet",
    version,
    about = "Ledger and simulator for 1-to-n sales of intangible goods"
)]
pub struct Cli {
    /// Ledger log file.
    #[arg(long, global = true, value_name = "PATH")]
    ledger: Option<PathBuf>,
    /// Tabular text instead of JSON lines.
    #[arg(long, global = true)]
    human: bool,
    /// Advance the ledger clock to this date before running the command.
    #[arg(long, global = true, value_name = "YYYY-MM-DD")]
    at: Option<NaiveDate>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Ceil,
    Nearest,
}

impl From<ModeArg> for RoundingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ceil => RoundingMode::CeilStrict,
            ModeArg::Nearest => RoundingMode::Nearest,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerbosityArg {
    Full,
    NoCount,
    Short,
}

impl From<VerbosityArg> for Verbosity {
    fn from(v: VerbosityArg) -> Self {
        match v {
            VerbosityArg::Full => Verbosity::Full,
            VerbosityArg::NoCount => Verbosity::NoCount,
            VerbosityArg::Short => Verbosity::Short,
        }
    }
}

fn parse_cups(s: &str) -> Result<Cents, String> {
    Cents::parse_cups(s)
        .ok_or_else(|| format!("{s:?} is not a cup amount with at most two decimals"))
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Create an empty ledger.
    Init,
    /// Open an account.
    Open {
        #[arg(long)]
        id: AccountId,
        #[arg(long, default_value = "person")]
        role: Role,
    },
    /// Set the exchange rates (authority only).
    SetRates {
        #[arg(long)]
        authority: AccountId,
        /// Cups per fiat unit when minting, e.g. 1/1.
        #[arg(long)]
        buy: Fraction,
        /// Fiat per cup when redeeming, e.g. 19/20.
        #[arg(long)]
        sell: Fraction,
    },
    /// List an intangible good.
    ListIg {
        #[arg(long)]
        seller: AccountId,
        /// First price in cups.
        #[arg(long, value_parser = parse_cups)]
        p1: Cents,
        /// Income ceiling in cups.
        #[arg(long, value_parser = parse_cups)]
        i_inf: Cents,
        #[arg(long)]
        xi: Xi,
        #[arg(long, value_enum, default_value = "ceil")]
        mode: ModeArg,
        /// Listing date; defaults to the ledger clock.
        #[arg(long)]
        birth: Option<NaiveDate>,
    },
    /// Buy a listing at its current price.
    Buy {
        #[arg(long)]
        listing: ListingId,
        #[arg(long)]
        buyer: AccountId,
        /// Hold the payment in escrow until the next settle-batch.
        #[arg(long)]
        deferred: bool,
    },
    /// Show an account balance.
    Balance {
        #[arg(long)]
        account: AccountId,
        /// Requesting account; defaults to the account itself.
        #[arg(long = "as")]
        as_seen_by: Option<AccountId>,
    },
    /// Show a buyer's purchases.
    History {
        #[arg(long)]
        buyer: AccountId,
        #[arg(long = "as")]
        as_seen_by: Option<AccountId>,
    },
    /// Show a listing's buyers (seller or authority).
    Buyers {
        #[arg(long)]
        listing: ListingId,
        #[arg(long = "as")]
        as_seen_by: AccountId,
    },
    /// Convert fiat cents into cups.
    Mint {
        #[arg(long)]
        bank: AccountId,
        #[arg(long)]
        person: AccountId,
        /// Fiat amount in cents.
        #[arg(long)]
        fiat: i64,
    },
    /// Convert cups into a fiat voucher.
    Redeem {
        #[arg(long)]
        bank: AccountId,
        #[arg(long)]
        person: AccountId,
        #[arg(long, value_parser = parse_cups)]
        cups: Cents,
    },
    /// Pay out accrued refunds and income of a listing.
    SettleBatch {
        #[arg(long)]
        listing: ListingId,
        /// Settle up to this buyer count instead of the current one.
        #[arg(long)]
        to: Option<u64>,
    },
    /// Print a listing's live price tag.
    Tag {
        #[arg(long)]
        listing: ListingId,
        #[arg(long, value_enum, default_value = "full")]
        verbosity: VerbosityArg,
    },
    /// Print every voucher as a canonical record.
    Vouchers,
    /// Exchange totals (authority only).
    TaxReport {
        #[arg(long)]
        authority: AccountId,
        #[arg(long)]
        up_to: Option<u64>,
    },
    /// Run a purchase schedule and export the curves as CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the scenario rounding mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Audit every invariant of a ledger log.
    Verify,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{kind}: {message}")]
    Domain { kind: &'static str, message: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain { .. } => 1,
            CliError::Io(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Domain { kind, .. } => kind,
            CliError::Io(_) => "IoFailure",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain { message, .. } | CliError::Io(message) => message,
        }
    }

    fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        CliError::Domain {
            kind,
            message: message.into(),
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        CliError::domain(e.kind(), e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Ledger(e) => e.into(),
            SimError::BadScenario(m) => CliError::domain("BadScenario", m),
        }
    }
}

/// Collects output records, then renders them as JSON lines or text.
struct Output {
    human: bool,
    records: Vec<Value>,
    /// Lines printed verbatim in both modes.
    raw: Vec<String>,
    failed: bool,
}

impl Output {
    fn new(human: bool) -> Self {
        Self {
            human,
            records: Vec::new(),
            raw: Vec::new(),
            failed: false,
        }
    }

    fn push(&mut self, v: impl serde::Serialize) {
        self.records
            .push(serde_json::to_value(v).expect("serializable"));
    }

    fn render(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for line in &self.raw {
            writeln!(out, "{line}")?;
        }
        for r in &self.records {
            if self.human {
                render_human(r, out)?;
            } else {
                writeln!(out, "{}", canonical::to_canonical(r))?;
            }
        }
        Ok(())
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".to_string(),
        other => canonical::to_canonical(other),
    }
}

fn render_human(v: &Value, out: &mut dyn Write) -> std::io::Result<()> {
    match v {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, v) in map {
                writeln!(out, "{k:<width$}  {}", scalar_text(v))?;
            }
            writeln!(out)
        }
        Value::Array(rows) => {
            let Some(Value::Object(first)) = rows.first() else {
                return writeln!(out, "(none)");
            };
            let cols: Vec<&String> = first.keys().collect();
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| cols.iter().map(|c| scalar_text(&r[c.as_str()])).collect())
                .collect();
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    cells
                        .iter()
                        .map(|r| r[i].len())
                        .chain([c.len()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |items: Vec<&str>| {
                items
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            writeln!(out, "{}", line(cols.iter().map(|c| c.as_str()).collect()))?;
            for r in &cells {
                writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
            }
            Ok(())
        }
        other => writeln!(out, "{}", scalar_text(other)),
    }
}

fn event_record(e: &LedgerEvent) -> Value {
    serde_json::to_value(e).expect("serializable")
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return e.exit_code();
        }
    };
    let human = cli.human;
    let mut output = Output::new(human);
    let result = execute(cli, &mut output);
    if output.render(stdout).is_err() {
        return 2;
    }
    match result {
        Ok(()) if output.failed => 1,
        Ok(()) => 0,
        Err(e) => {
            let _ = if human {
                writeln!(stderr, "error: {e}")
            } else {
                writeln!(
                    stderr,
                    "{}",
                    canonical::to_canonical(&json!({"error": e.kind(), "message": e.message()}))
                )
            };
            e.exit_code()
        }
    }
}

fn ledger_path(cli: &Cli) -> Result<PathBuf, CliError> {
    cli.ledger
        .clone()
        .ok_or_else(|| CliError::Io("no ledger given; pass --ledger <path>".to_string()))
}

fn execute(cli: Cli, out: &mut Output) -> Result<(), CliError> {
    match &cli.command {
        Command::Init => {
            let path = ledger_path(&cli)?;
            Store::create(&path)?;
            out.push(json!({"ledger": path.display().to_string(), "events": 0}));
            Ok(())
        }
        Command::Verify => {
            let path = ledger_path(&cli)?;
            let text = Store::open_shared(&path)?.read()?;
            let report = audit_log(&text);
            if out.human {
                for c in &report.checks {
                    out.raw.push(match &c.first_violation {
                        None => format!("PASS  {:<20} {}", c.name, c.description),
                        Some((seq, detail)) => format!("FAIL  {:<20} seq {seq}: {detail}", c.name),
                    });
                }
            }
            let human = out.human;
            for c in report.checks.iter().filter(|_| !human) {
                let (seq, detail) = match &c.first_violation {
                    Some((seq, detail)) => (Some(*seq), Some(detail.as_str())),
                    None => (None, None),
                };
                out.push(json!({
                    "check": c.name,
                    "ok": c.passed(),
                    "seq": seq,
                    "detail": detail,
                }));
            }
            out.push(
                json!({"events": report.events, "digest": report.digest, "ok": report.passed()}),
            );
            out.failed = !report.passed();
            Ok(())
        }
        Command::Simulate {
            scenario,
            out: csv_path,
            seed,
            mode,
        } => {
            let text = std::fs::read_to_string(scenario)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", scenario.display())))?;
            let mut sc = Scenario::from_json(&text)?;
            if let Some(seed) = seed {
                sc.seed = *seed;
            }
            if let Some(mode) = mode {
                sc.rounding_mode = Some((*mode).into());
            }
            let store = match &cli.ledger {
                Some(p) => Some(Store::open_or_create(p)?),
                None => None,
            };
            let mut ledger = match &store {
                Some(s) => s.load()?,
                None => Ledger::new(),
            };
            if let Some(at) = cli.at {
                ledger.advance_to(at)?;
            }
            let sim = scenario::simulate(&mut ledger, &sc)?;
            let mut buf = Vec::new();
            scenario::write_csv(&sim.rows, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            std::fs::write(csv_path, buf)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", csv_path.display())))?;
            if let Some(s) = &store {
                s.save(&ledger)?;
            }
            out.push(json!({
                "listing": sim.listing,
                "rows": sim.rows.len(),
                "out": csv_path.display().to_string(),
                "digest": ledger.digest(),
            }));
            Ok(())
        }
        _ => {
            let store = Store::open(&ledger_path(&cli)?)?;
            let mut ledger = store.load()?;
            let before = ledger.last_seq();
            if let Some(at) = cli.at {
                ledger.advance_to(at)?;
            }
            operate(&mut ledger, &cli.command, out)?;
            if ledger.last_seq() != before {
                store.save(&ledger)?;
            }
            Ok(())
        }
    }
}

fn operate(ledger: &mut Ledger, command: &Command, out: &mut Output) -> Result<(), CliError> {
    match command {
        Command::Init | Command::Verify | Command::Simulate { .. } => {
            unreachable!("handled by execute")
        }
        Command::Open { id, role } => {
            let e = ledger.open_account(id.clone(), *role)?;
            out.push(event_record(e));
        }
        Command::SetRates {
            authority,
            buy,
            sell,
        } => {
            let e = ledger.set_rates(authority, *buy, *sell)?;
            out.push(event_record(e));
        }
        Command::ListIg {
            seller,
            p1,
            i_inf,
            xi,
            mode,
            birth,
        } => {
            let params =
                PriceParams::new(*p1, *i_inf, *xi, (*mode).into()).map_err(LedgerError::from)?;
            let birth = birth.unwrap_or(ledger.clock());
            let id = ledger.create_listing(seller, params, birth)?;
            let tag = live_tag(ledger, &id)?;
            out.push(event_record(ledger.events().last().expect("just listed")));
            out.push(json!({"listing": id, "tag": tag.to_string()}));
        }
        Command::Buy {
            listing,
            buyer,
            deferred,
        } => {
            let mode = if *deferred {
                SettleMode::Deferred
            } else {
                SettleMode::Immediate
            };
            let e = ledger.purchase_with(listing, buyer, mode)?;
            out.push(event_record(e));
            out.push(json!({"listing": listing, "tag": live_tag(ledger, listing)?.to_string()}));
        }
        Command::Balance {
            account,
            as_seen_by,
        } => {
            let viewer = as_seen_by.as_ref().unwrap_or(account);
            let balance = ledger.balance_of(account, viewer)?;
            let spendable = ledger.spendable_balance(account, viewer)?;
            out.push(json!({
                "account": account,
                "balance": balance,
                "spendable": spendable,
                "cups": balance.to_cups_string(),
            }));
        }
        Command::History { buyer, as_seen_by } => {
            let viewer = as_seen_by.as_ref().unwrap_or(buyer);
            out.push(ledger.purchase_history(buyer, viewer)?);
        }
        Command::Buyers {
            listing,
            as_seen_by,
        } => {
            out.push(ledger.buyer_list(listing, as_seen_by)?);
        }
        Command::Mint { bank, person, fiat } => {
            let e = ledger.mint(bank, person, *fiat)?;
            out.push(event_record(e));
        }
        Command::Redeem { bank, person, cups } => {
            let e = ledger.redeem(bank, person, *cups)?;
            out.push(event_record(e));
        }
        Command::SettleBatch { listing, to } => match ledger.settle_batch(listing, *to)? {
            Some(e) => out.push(event_record(e)),
            None => out.push(json!({"listing": listing, "settled": "nothing pending"})),
        },
        Command::Tag { listing, verbosity } => {
            out.raw
                .push(live_tag(ledger, listing)?.format((*verbosity).into()));
        }
        Command::Vouchers => {
            out.raw
                .extend(ledger.vouchers().iter().map(|v| v.to_canonical_line()));
        }
        Command::TaxReport { authority, up_to } => {
            out.push(ledger.tax_report(authority, *up_to)?);
        }
    }
    Ok(())
}
