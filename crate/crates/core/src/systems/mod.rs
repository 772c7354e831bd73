//! Spaces, finite nets and exact maps.

mod affine;
mod net;
mod space;
mod system;

pub use affine::{compose_branches, Branch, CodedBranch};
pub use net::NetSpace;
pub use space::{ex21_points, SpaceKind, SpaceSpec};
pub use system::{CorpusTag, MapKind, SystemDef};
pub(crate) use system::space_pieces;
