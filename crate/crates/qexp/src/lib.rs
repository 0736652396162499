//! Double-base (`Q`-)expansions: greedy and lazy interval maps, their
//! Frobenius-Perron operators, and closed-form invariant step densities.
//!
//! A pair `Q = (q0, q1)` with `q0, q1 > 1` and `q0 + q1 >= q0*q1` assigns to
//! every binary sequence `(c_i)` the value `x = Σ c_i / (q_{c_1} ... q_{c_i})`.
//! The crate implements:
//!
//! - [`base`]: admissible pairs, derived constants, and recovery of a pair
//!   from prescribed critical-point expansions;
//! - [`maps`]: the greedy/lazy maps, digit generation, expansion evaluation;
//! - [`stepfn`]: exact piecewise-constant function algebra;
//! - [`transfer`]: the transfer operators acting exactly on step functions;
//! - [`density`]: the invariant densities built from critical orbits;
//! - [`cylinders`]: cylinder intervals, their images, and full-return words;
//! - [`ergodic`]: Birkhoff averages, expansion counting, and sampling checks;
//! - [`cli`]: the `qexp` binary surface;
//! - [`verify`]: the runnable acceptance checklist behind `qexp verify`.
//!
//! ## Quick example
//!
//! ```rust
//! use qexp::{BasePair, MapKind};
//! use qexp::density::invariant_densities_auto;
//! use qexp::maps::expansion;
//!
//! let q = BasePair::new(2.1479, 1.46557).unwrap();
//!
//! // Greedy digits of a point in the overlap region.
//! let orbit = expansion(&q, 0.9, 8, MapKind::Greedy).unwrap();
//! assert_eq!(orbit.digits.digits()[0], 1);
//!
//! // Invariant densities and their means around the Lebesgue midpoint.
//! let d = invariant_densities_auto(&q, 1e-10).unwrap();
//! let midpoint = 1.0 / (2.0 * (q.q1() - 1.0));
//! assert!((d.h_greedy.integrate() - 1.0).abs() < 1e-10);
//! assert!(d.mean(MapKind::Greedy) < midpoint);
//! assert!(d.mean(MapKind::Lazy) > midpoint);
//! ```

pub mod base;
pub mod cli;
pub mod cylinders;
pub mod density;
pub mod ergodic;
pub mod error;
pub mod maps;
pub mod stepfn;
pub mod transfer;
pub mod verify;

pub use base::BasePair;
pub use density::DensityPair;
pub use error::{Error, Result};
pub use maps::{DigitWord, MapKind, Tail};
pub use stepfn::StepFunction;
pub use transfer::TransferOperator;
