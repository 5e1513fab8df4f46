//! Exact arithmetic for the genus-zero correspondence between Gopakumar-Vafa
//! invariants and quantum K-theory on Calabi-Yau threefolds.
//!
//! Everything here is exact: rationals are arbitrary-precision, roots of unity
//! live in explicit cyclotomic fields, and q-dependence is kept as rational
//! functions with denominators factored into `(1 - zeta q)` powers.  The main
//! layers:
//!
//! * [`cyclotomic`], [`poly`], [`qrat`], [`laurent`] -- the scalar substrate:
//!   cyclotomic numbers, polynomials over them, rational functions in q with
//!   root-of-unity pole bookkeeping, partial fractions, Laurent expansion and
//!   the polarization projectors.
//! * [`series`] -- Novikov series and truncated multivariate t-polynomials.
//! * [`geometry`] -- target-space data (intersection numbers, pairings) and
//!   the GV/GW tables with their cubing transforms.
//! * [`jfunction`] -- the permutation-equivariant q-deformed generating
//!   function, its pole expansions, the fake-limit comparison, and extraction
//!   of quantum K invariants.
//! * [`conifold`] -- the resolved conifold worked end to end in a rank-6
//!   K-theory ring, including the small-generating-function checks.
//! * [`formats`], [`report`], [`cli`] -- JSON interchange and the command
//!   line driver.

pub mod arith;
pub mod cyclotomic;
pub mod poly;
pub mod qrat;
pub mod laurent;
pub mod series;
pub mod geometry;
pub mod jfunction;
pub mod conifold;
pub mod linalg;
pub mod formats;
pub mod report;
pub mod cli;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("conductor mismatch: {0} vs {1} (promote explicitly)")]
    ConductorMismatch(u32, u32),
    #[error("conductor {0} exceeds cap {1} (set QKGV_CONDUCTOR_CAP to raise)")]
    ConductorCap(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a unit: {0}")]
    NotAUnit(String),
    #[error("pole at q = 0 where none is allowed")]
    PoleAtZero,
    #[error("pole order {order} at root of order {root_order} exceeds bound {bound}")]
    PoleOrder {
        root_order: u32,
        order: usize,
        bound: usize,
    },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
