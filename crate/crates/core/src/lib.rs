//! Trend-cycle moving-average filters for real-time trend estimation.
//!
//! The crate builds symmetric and asymmetric weight systems (exact Henderson,
//! Musgrave surrogates and biweight reproducing-kernel filters with
//! time-varying local bandwidths), characterizes them in the frequency
//! domain, applies them to seasonally adjusted series and measures the
//! revisions and turning-point delays they produce in real time.
//!
//! Everything here is a pure computation over in-memory values. The crate is
//! `no_std` and only needs `alloc`; file formats and the command line live in
//! the companion `trendcycle` crate.
//!
//! ```
//! use trendcycle_core::filters::{henderson_exact, rkhs_asymmetric};
//!
//! let henderson = henderson_exact(6).unwrap();
//! assert!((henderson.sum() - 1.0).abs() < 1e-12);
//!
//! let last_point = rkhs_asymmetric(6, 0, 11.78).unwrap();
//! assert_eq!(last_point.len(), 7);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod analysis;
pub mod bandwidth;
mod error;
pub mod filters;
pub mod kernels;
mod linalg;
pub mod quadrature;
pub mod series;
pub mod spectral;

pub use error::{Error, Result};
