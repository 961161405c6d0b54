//! Poincare-metric distortion calculus for one-dimensional maps.
//!
//! The crate is `no_std` and only needs `alloc`. Intervals are mapped to the
//! real line through Poincare coordinates; an interval map then becomes a
//! homeomorphism of the line whose displacement measures its distortion.
//! On top of that sit standard compositions, the cancellation machinery and
//! the critical circle map experiments.

#![no_std]

// Modules import `num_traits::Float` for the math functions. When std is
// linked into the graph its inherent float methods win and the import looks
// unused, hence the local `allow`s.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cancellation;
pub mod circle;
pub mod composition;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod interval;
pub mod map;
pub mod mobius;
pub mod random;
pub mod solve;
pub mod suites;

pub use error::{Error, Result};
pub use grid::{GridSpec, SupEstimate};
pub use interval::{Interval, PointQuadruple, UnitPoint};
pub use map::{Kind, MapDescriptor, SmoothMap};
pub use mobius::Mobius;
