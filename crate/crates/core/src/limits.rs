//! Enumeration cap shared by every constructor that materializes a carrier
//! and every exhaustive law check.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default upper bound on carrier size for materialization and O(n³) law checks.
pub const DEFAULT_MAX_CARRIER: usize = 64;

/// Environment variable overriding [`DEFAULT_MAX_CARRIER`].
pub const MAX_CARRIER_ENV: &str = "OPCMLINK_MAX_CARRIER";

/// The active cap, read once from the environment.
pub fn max_carrier() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var(MAX_CARRIER_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&n: &usize| n > 0)
            .unwrap_or(DEFAULT_MAX_CARRIER)
    })
}

pub(crate) fn ensure_within_cap(size: usize) -> Result<()> {
    let cap = max_carrier();
    if size > cap {
        return Err(Error::Resource { size, cap });
    }
    Ok(())
}

/// Size of the non-empty powerset of an `n`-element set, saturating.
pub(crate) fn nonempty_powerset_size(n: usize) -> usize {
    if n >= usize::BITS as usize - 1 {
        usize::MAX
    } else {
        (1usize << n) - 1
    }
}
