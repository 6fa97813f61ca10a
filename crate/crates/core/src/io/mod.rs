//! Reading and writing linear programs.

pub mod json;
pub mod mps;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::lp::LinearProgram;

pub use json::{lp_from_json, lp_to_json, JsonError};
pub use mps::{parse_mps, write_mps, MpsError, MpsWriteError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Mps,
    Json,
}

impl Format {
    /// Format implied by the file extension (`.mps` or `.json`, any case).
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "mps" => Some(Format::Mps),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: cannot tell the format from the extension (expected .mps or .json)")]
    UnknownFormat { path: PathBuf },
    #[error("{path}: {source}")]
    Mps { path: PathBuf, source: MpsError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: JsonError },
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Mps(#[from] MpsWriteError),
    #[error("{path}: cannot tell the format from the extension (expected .mps or .json)")]
    UnknownFormat { path: PathBuf },
}

pub fn parse_lp(text: &str, format: Format) -> Result<LinearProgram, String> {
    match format {
        Format::Mps => parse_mps(text).map_err(|e| e.to_string()),
        Format::Json => lp_from_json(text).map_err(|e| e.to_string()),
    }
}

/// Reads an LP, taking the format from `format` or else from the extension.
pub fn read_lp(path: &Path, format: Option<Format>) -> Result<LinearProgram, ReadError> {
    let format =
        format
            .or_else(|| Format::from_path(path))
            .ok_or_else(|| ReadError::UnknownFormat {
                path: path.to_path_buf(),
            })?;
    let bytes = fs::read(path).map_err(|source| ReadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        Format::Mps => mps::parse_mps_bytes(&bytes).map_err(|source| ReadError::Mps {
            path: path.to_path_buf(),
            source,
        }),
        Format::Json => {
            let text = String::from_utf8_lossy(&bytes);
            lp_from_json(&text).map_err(|source| ReadError::Json {
                path: path.to_path_buf(),
                source,
            })
        }
    }
}

pub fn render_lp(lp: &LinearProgram, format: Format, name: &str) -> Result<String, MpsWriteError> {
    match format {
        Format::Mps => mps::write_mps_named(lp, name),
        Format::Json => Ok(lp_to_json(lp) + "\n"),
    }
}

/// Writes an LP, taking the format from `format` or else from the extension.
pub fn write_lp(path: &Path, lp: &LinearProgram, format: Option<Format>) -> Result<(), WriteError> {
    let format =
        format
            .or_else(|| Format::from_path(path))
            .ok_or_else(|| WriteError::UnknownFormat {
                path: path.to_path_buf(),
            })?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty() && !s.contains(char::is_whitespace))
        .unwrap_or("DUALKIT");
    let text = render_lp(lp, format, name)?;
    write_atomic(path, text.as_bytes()).map_err(|source| WriteError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let file_name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{file_name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
