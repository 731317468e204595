//! Desk-scale computations on étale groupoids and Fell bundles.
//!
//! The crate enumerates finite (or truncated) groupoids exactly, attaches
//! concrete Fell bundles with matrix fibers, and evaluates the norm families
//! that govern the Rapid Decay Property: sup, I, II, weighted Sobolev, and
//! the reduced norm through the left-regular representation.
//!
//! Infinite systems (Deaconu-Renault groupoids of shift maps, partial actions
//! of free groups) are handled through exact eventually-periodic points and
//! explicit budgets; every quantity computed on a truncation is labelled as a
//! lower bound or an exact value.

pub mod bundle;
pub mod deaconu;
pub mod error;
pub mod experiments;
pub mod group;
pub mod groupoid;
pub mod growth;
pub mod linalg;
pub mod multiplier;
pub mod partial;
pub mod rd;
pub mod reduction;
pub mod report;
pub mod rng;
pub mod section;
pub mod shift;
pub mod words;

pub use bundle::{ConcreteBundle, FellBundle, FiberElement, FiberShape};
pub use error::{Error, Result};
pub use groupoid::{ArrowId, Compose, FiniteGroupoidView, LengthFn, Payload, Point, UnitId};
pub use report::{CheckReport, CheckRow};
pub use section::{NormReport, Section};
pub use shift::EvPeriodicPoint;
pub use words::{GeneratorSign, Word};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = nalgebra::DMatrix<C64>;
