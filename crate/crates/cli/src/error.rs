use std::fmt;
use std::path::Path;

/// Success.
pub const EXIT_OK: u8 = 0;
/// Unreadable file, malformed input or other I/O failure.
pub const EXIT_INPUT: u8 = 1;
/// Calibration is infeasible: too few pairs, degenerate layout, or points
/// behind the camera.
pub const EXIT_INFEASIBLE: u8 = 2;
/// No overlay point falls on a board being scored.
pub const EXIT_NO_POINTS: u8 = 3;
/// The optimizer hit its iteration limit; the solution is still written.
pub const EXIT_NOT_CONVERGED: u8 = 4;
/// Bad command line.
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }

    /// `path: error` for malformed-input diagnostics.
    pub fn in_file(path: &Path, err: impl fmt::Display) -> Self {
        Self::input(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::in_file(path, e))
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::in_file(path, e))
}

pub fn write_file(path: &Path, data: impl AsRef<[u8]>) -> CliResult {
    std::fs::write(path, data).map_err(|e| CliError::in_file(path, e))
}
