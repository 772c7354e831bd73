//! δ-transition graphs and the chain-recurrence structure they carry.

mod analysis;
mod export;
mod graph;
mod grid;
mod ops;
mod periodic;
mod product;
mod scc;

pub use analysis::{ChainAnalysis, Condensation};
pub use export::{condensation_dot, edge_list, node_table, GraphDocument, NodeTable};
pub use graph::TransitionGraph;
pub use grid::{cr_over_grid, default_delta_grid, dyadic_grid, GridLevel, GridReport};
pub use ops::{
    absorbing_check, chain_mixing_check, chain_omega_limit, chain_stable_check, cr_hitting_time,
    eventual_image, exact_step, omega_limit, reachable_set, terminal_margins, AbsorbingCheck,
    MixingVerdict, StabilityVerdict, StabilityWitness, TerminalMargin,
};
pub use periodic::{periodic_points_affine, periodic_points_exact, PeriodicPoint, PeriodicReport};
pub use product::{factorized_product_analysis, FactorLevel, FactorizedAnalysis};

