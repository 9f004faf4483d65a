//! File access: envelopes, atomic writes and the state-directory lock.

use std::fs::{self, File, OpenOptions, TryLockError};
use std::io::Write;
use std::path::{Path, PathBuf};

use irac::encoding::{Decode, Encode};
use irac::Dims;

use crate::envelope::{self, Kind};
use crate::error::CliError;

pub const LOCK_FILE: &str = ".lock";

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io(path))
}

/// Writes through a temporary file so readers never see a partial file.
/// Secret files are created readable by the owner only.
pub fn write_file(path: &Path, contents: &[u8], secret: bool) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let tmp = path.with_extension("tmp");
    let mut opts = OpenOptions::new();
    opts.write(true).create(true).truncate(true);
    #[cfg(unix)]
    if secret {
        use std::os::unix::fs::OpenOptionsExt;
        opts.mode(0o600);
    }
    let mut f = opts.open(&tmp).map_err(io(&tmp))?;
    f.write_all(contents).map_err(io(&tmp))?;
    f.sync_all().map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

pub fn load<T: Decode>(path: &Path, kind: Kind, dims: Dims) -> Result<T, CliError> {
    let text = read_text(path)?;
    let payload =
        envelope::read_shaped(&text, kind, dims).map_err(|source| CliError::Envelope { path: path.into(), source })?;
    T::decode(&payload).map_err(|source| CliError::Decode { path: path.into(), source })
}

pub fn save<T: Encode>(path: &Path, kind: Kind, dims: Dims, value: &T) -> Result<(), CliError> {
    let secret = kind == Kind::IssuerKey;
    write_file(path, envelope::write(kind, dims, &value.encode()).as_bytes(), secret)
}

/// Advisory lock on a state directory, released on drop.
pub struct DirLock {
    _file: File,
}

pub fn lock(dir: &Path) -> Result<DirLock, CliError> {
    fs::create_dir_all(dir).map_err(io(dir))?;
    let path: PathBuf = dir.join(LOCK_FILE);
    let file = OpenOptions::new().write(true).create(true).truncate(false).open(&path).map_err(io(&path))?;
    match file.try_lock() {
        Ok(()) => Ok(DirLock { _file: file }),
        Err(TryLockError::WouldBlock) => Err(CliError::Locked(dir.to_path_buf())),
        Err(TryLockError::Error(e)) => Err(io(&path)(e)),
    }
}
