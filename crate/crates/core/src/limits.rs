//! Resource guards for exhaustive computations.

use crate::error::{Error, Result};

/// Environment variable that overrides every guard, like `--limit`.
pub const LIMIT_ENV: &str = "USSORT_LIMIT";

pub const BRUTE_FERTILITY_MAX_N: usize = 11;
pub const CENSUS_MAX_N: usize = 11;
pub const UNRESTRICTED_UNIQUE_MAX_K: usize = 5;
pub const INTERVAL_SCAN_MAX_K: usize = 9;
/// Sequence guard for classes containing a pattern of length at most 3.
pub const SEQUENCE_SMALL_PATTERN_MAX_K: usize = 6;
pub const SEQUENCE_MAX_K: usize = 5;

/// Guard configuration. Each guarded operation has its own default ceiling;
/// an override replaces all of them with a single value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Limits {
    pub override_limit: Option<usize>,
}

impl Limits {
    pub fn new(override_limit: Option<usize>) -> Self {
        Self { override_limit }
    }

    /// No guard at all.
    pub fn unlimited() -> Self {
        Self {
            override_limit: Some(usize::MAX),
        }
    }

    /// Reads [`LIMIT_ENV`]; unset or unparsable means defaults.
    pub fn from_env() -> Self {
        let override_limit = std::env::var(LIMIT_ENV).ok().and_then(|v| v.trim().parse().ok());
        Self { override_limit }
    }

    pub fn ceiling(&self, default: usize) -> usize {
        self.override_limit.unwrap_or(default)
    }

    pub fn check(&self, what: &'static str, value: usize, default: usize) -> Result<()> {
        let limit = self.ceiling(default);
        if value > limit {
            Err(Error::ResourceLimit { what, value, limit })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_replaces_default() {
        assert!(Limits::default().check("n", 12, 11).is_err());
        assert!(Limits::default().check("n", 11, 11).is_ok());
        assert!(Limits::new(Some(12)).check("n", 12, 11).is_ok());
        assert!(Limits::new(Some(3)).check("n", 4, 11).is_err());
        assert!(Limits::unlimited().check("n", 1 << 40, 0).is_ok());
    }
}
