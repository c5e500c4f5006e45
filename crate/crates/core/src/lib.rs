//! Computational tools for transfinite asymptotic dimension on finite windows.
//!
//! * [`ordinal`]: Cantor-normal-form values returned by rank computations.
//! * [`spaces`]: exact integer metrics and finite windows of `ℤⁿ`, `(kℤ)ⁿ`,
//!   `L_∞` and `L_ω`.
//! * [`covers`]: colored covers, their validator, neighborhood expansion
//!   and the explicit constructions for `ℤⁿ` and `L_ω`.
//! * [`solver`]: exact decision of colored-cover existence with
//!   certificates.
//! * [`borst`]: set systems, derivatives and the Borst rank `Ord`.
//! * [`verify`]: seeded check suites behind `trasdim verify`.

pub mod error;
pub mod ordinal;
pub mod spaces;
pub mod covers;
pub mod solver;
pub mod borst;
pub mod verify;

pub use error::{Error, Result};
