//! Finite-net verification of ball-expanding maps and their chain structure.
//!
//! Every computation runs on exact rationals over a finite net standing in for
//! a compact metric space. See the guide in `book/` for a walk-through.

pub mod error;
pub mod numerics;
pub mod chaingraph;
pub mod systems;
pub mod shadowing;
pub mod expanding;
pub mod globalprops;
pub mod corpus;

pub use error::{Caps, Error, Result};
pub use numerics::{q, Point, Rational};
pub use systems::{NetSpace, SpaceSpec, SystemDef};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/nets.md")]
    mod nets {}
    #[doc = include_str!("../../../book/src/chain-recurrence.md")]
    mod chain_recurrence {}
    #[doc = include_str!("../../../book/src/ball-expanding.md")]
    mod ball_expanding {}
    #[doc = include_str!("../../../book/src/shadowing.md")]
    mod shadowing {}
    #[doc = include_str!("../../../book/src/global-properties.md")]
    mod global_properties {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
