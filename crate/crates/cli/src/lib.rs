//! Building blocks of the `joinlab` command: argument types, sweep tables and
//! positivity reports. The binary only parses flags and maps errors to exit codes.

pub mod check;
pub mod format;
pub mod sweep;

use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// A property check failed (exit 1).
    Property(String),
    /// Bad flags or malformed input (exit 2).
    Usage(String),
    /// Reading or writing a file failed (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Property(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Property(m) => write!(f, "property failure: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<joinlab_core::Error> for CliError {
    fn from(e: joinlab_core::Error) -> Self {
        match e {
            joinlab_core::Error::Monotonicity { .. } => CliError::Property(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Parses `lo:hi` into an ordered pair.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound '{lo}'"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound '{hi}'"))?;
    if !(lo < hi) {
        return Err(format!("need lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Sizes the global worker pool from `JOINLAB_THREADS` when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("JOINLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("JOINLAB_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size worker pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-1:1"), Ok((-1.0, 1.0)));
        assert_eq!(parse_range(" -0.5 : 0.25 "), Ok((-0.5, 0.25)));
        assert!(parse_range("1:1").is_err());
        assert!(parse_range("1").is_err());
        assert!(parse_range("a:1").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Property(String::new()).exit_code(), 1);
        assert_eq!(CliError::Usage(String::new()).exit_code(), 2);
        assert_eq!(CliError::Io(String::new()).exit_code(), 3);
    }
}
