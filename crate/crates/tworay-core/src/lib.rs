//! Classification of del Pezzo fibrations that are hypersurfaces in rank-2
//! toric weighted bundles, by restricting the ambient 2-ray game.
//!
//! Everything here is exact integer arithmetic over small bidegrees and
//! needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod bundle;
pub mod classify;
pub mod dp3;
pub mod game;
pub mod lattice;
pub mod newton;

pub use bundle::{build_bundle, WeightedBundle};
pub use classify::{analyze_dp2, classify_dp2, search_dp2, Dp2Bounds, EndModel, Link, RestrictedStep, Verdict};
pub use dp3::{analyze_dp3, classify_dp3, search_dp3, DP3Params, Dp3Bounds};
pub use game::StepKind;
pub use lattice::{det2, DivClass, NormalForm, Weight};
