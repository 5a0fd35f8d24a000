//! Engine-wide error type and the search budget.

use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

/// Default node budget for bounded searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Errors produced while operating on well-formed inputs.
///
/// Shape problems in input files are reported separately by the loader; an
/// `EngineError` means the data was structurally fine but an operation could
/// not produce a verdict (budget, undefined construction, failed
/// precondition, or an internal consistency check that caught corrupt data).
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("budget exceeded: {used} search nodes used, limit {limit}")]
    BudgetExceeded { used: u64, limit: u64 },
    #[error("rewriting is not confluent; refusing to guess: {detail}")]
    NonConfluent { detail: String },
    #[error("invalid lifting square: {0}")]
    InvalidSquare(String),
    #[error("no coproduct of {x} and {y} exists")]
    NoCoproduct { x: String, y: String },
    #[error("no product of {x} and {y} exists")]
    NoProduct { x: String, y: String },
    #[error("object {0} is not fibrant-cofibrant")]
    NotFibrantCofibrant(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("model data carries no cofibrant replacement functor")]
    MissingQ,
    #[error("witness lacks the required verified flag: {0}")]
    NotLocalization(String),
    #[error("malformed zigzag: {0}")]
    MalformedZigzag(String),
    #[error("no factorization exists: {0}")]
    NoFactorization(String),
    #[error("ids from different categories were mixed: {0}")]
    Mismatch(String),
    #[error("inconsistent input data: {0}")]
    Inconsistency(String),
}

/// Node meter for bounded searches.
///
/// Every search charges one node per candidate it examines. The meter is
/// shared by all phases of one top-level operation, so the budget bounds the
/// whole call, not each sub-search separately.
#[derive(Debug)]
pub struct Meter {
    limit: u64,
    used: AtomicU64,
}

impl Meter {
    pub fn new(limit: u64) -> Meter {
        Meter { limit, used: AtomicU64::new(0) }
    }

    /// Charges `n` nodes, failing once the running total passes the limit.
    pub fn charge(&self, n: u64) -> Result<(), EngineError> {
        let used = self.used.fetch_add(n, Ordering::Relaxed) + n;
        if used > self.limit {
            Err(EngineError::BudgetExceeded { used, limit: self.limit })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Meter {
    fn default() -> Meter {
        Meter::new(DEFAULT_BUDGET)
    }
}
