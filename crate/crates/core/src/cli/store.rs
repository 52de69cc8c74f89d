//! Ledger log file with an advisory lock held for the life of a command.
//!
//! The lock lives in a sibling `<path>.lock` file so the log itself can be
//! replaced atomically by rename.

use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};

use crate::ledger::Ledger;

use super::CliError;

pub(super) struct Store {
    path: PathBuf,
    _lock: Option<File>,
}

fn io(path: &Path, what: &str, e: std::io::Error) -> CliError {
    CliError::Io(format!("cannot {what} {}: {e}", path.display()))
}

fn lock_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".lock");
    PathBuf::from(name)
}

fn acquire(path: &Path, exclusive: bool) -> Result<File, CliError> {
    let lp = lock_path(path);
    let f = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lp)
        .map_err(|e| io(&lp, "open lock", e))?;
    let locked = if exclusive { f.lock() } else { f.lock_shared() };
    locked.map_err(|e| io(&lp, "lock", e))?;
    Ok(f)
}

impl Store {
    /// Creates a new empty log. Refuses to overwrite an existing one.
    pub(super) fn create(path: &Path) -> Result<Self, CliError> {
        let lock = acquire(path, true)?;
        if path.exists() {
            return Err(CliError::domain(
                "LedgerExists",
                format!("{} already exists", path.display()),
            ));
        }
        File::create(path).map_err(|e| io(path, "create", e))?;
        Ok(Self {
            path: path.to_owned(),
            _lock: Some(lock),
        })
    }

    /// Opens an existing log for reading and writing.
    pub(super) fn open(path: &Path) -> Result<Self, CliError> {
        if !path.is_file() {
            return Err(CliError::Io(format!("ledger {} not found", path.display())));
        }
        Ok(Self {
            path: path.to_owned(),
            _lock: Some(acquire(path, true)?),
        })
    }

    pub(super) fn open_or_create(path: &Path) -> Result<Self, CliError> {
        if path.exists() {
            Self::open(path)
        } else {
            Self::create(path)
        }
    }

    /// Opens an existing log read-only. Locking is best effort so logs in
    /// read-only locations can still be audited.
    pub(super) fn open_shared(path: &Path) -> Result<Self, CliError> {
        if !path.is_file() {
            return Err(CliError::Io(format!("ledger {} not found", path.display())));
        }
        Ok(Self {
            path: path.to_owned(),
            _lock: acquire(path, false).ok(),
        })
    }

    pub(super) fn read(&self) -> Result<String, CliError> {
        fs::read_to_string(&self.path).map_err(|e| io(&self.path, "read", e))
    }

    pub(super) fn load(&self) -> Result<Ledger, CliError> {
        Ok(Ledger::from_log_text(&self.read()?)?)
    }

    pub(super) fn save(&self, ledger: &Ledger) -> Result<(), CliError> {
        let mut tmp = self.path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        fs::write(&tmp, ledger.to_log_text()).map_err(|e| io(&tmp, "write", e))?;
        fs::rename(&tmp, &self.path).map_err(|e| io(&self.path, "replace", e))
    }
}
