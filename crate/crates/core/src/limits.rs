//! Resource caps shared by the exhaustive procedures.

use std::env;

pub const ENV_POWERSET_LIMIT: &str = "ULTRAFRAME_POWERSET_LIMIT";
pub const ENV_VALUATION_BITS: &str = "ULTRAFRAME_VALUATION_BITS";
pub const ENV_EF_MEMO_LIMIT: &str = "ULTRAFRAME_EF_MEMO_LIMIT";
pub const ENV_SEARCH_LIMIT: &str = "ULTRAFRAME_SEARCH_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest carrier whose full powerset is enumerated when building ue frames.
    pub powerset: usize,
    /// Largest `letters * worlds` for which every valuation is enumerated.
    pub valuation_bits: usize,
    /// Maximum number of memoized Ehrenfeucht-Fraisse positions.
    pub ef_memo: usize,
    /// Hard cap on table sizes in the bounded formula searches.
    pub search: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            powerset: 12,
            valuation_bits: 20,
            ef_memo: 4_000_000,
            search: 200_000,
        }
    }
}

impl Limits {
    /// Defaults overridden by the `ULTRAFRAME_*` environment variables.
    pub fn from_env() -> Self {
        fn read(key: &str, default: usize) -> usize {
            env::var(key)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        }
        let d = Limits::default();
        Limits {
            powerset: read(ENV_POWERSET_LIMIT, d.powerset),
            valuation_bits: read(ENV_VALUATION_BITS, d.valuation_bits),
            ef_memo: read(ENV_EF_MEMO_LIMIT, d.ef_memo),
            search: read(ENV_SEARCH_LIMIT, d.search),
        }
    }
}
