//! Critical circle maps: lifts, rotation numbers, dynamical partitions,
//! neighborhoods of the critical point and chains of intervals.

pub mod chain;
pub mod lift;
pub mod neighborhood;
pub mod partition;
pub mod rotation;

pub use lift::{arc_contains, Arnold, CircleLift, Rigid, ShiftedLift};
pub use rotation::{find_parameter, golden_prefix, rotation_number, ContinuedFraction, RotationReport};
pub use partition::{dynamical_partition, DynamicalPartition, ElementKind, PartitionElement, TILING_TOLERANCE};
pub use neighborhood::{coarseness, fineness_order, symmetric_neighborhood, SymmetricNeighborhood};
pub use chain::{build_chain, first_return_map, ChainOfIntervals, FirstReturnMap, ReturnBranch};
