//! Exact arithmetic in truncated iterated Laurent series over ℚ or 𝔽_p,
//! with Newton–Hensel lifting, coarsenings of higher-rank valuations, and
//! at-horizon diagnostics of how well elements are approximated from the
//! base field.

pub mod cli;
pub mod coarsening;
pub mod coeff;
pub mod diagnostics;
pub mod disjointness;
pub mod error;
pub mod expr;
pub mod hensel;
pub mod poly;
pub mod scenario;
pub mod series;
pub mod session;
pub mod sweep;
pub mod value_group;

pub use coeff::{Coeff, CoeffField};
pub use error::{Error, Result};
pub use poly::ValPolynomial;
pub use series::{TruncatedSeries, Valuation};
pub use value_group::{CoarseValue, ConvexSubgroup, Exponent};
