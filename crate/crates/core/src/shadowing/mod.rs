//! Pseudo orbits and their shadows.

mod orbit;
mod search;
mod verify;

pub use orbit::{gen_pseudo_orbit, Lcg, PseudoOrbit};
pub use search::{net_scan, shadow_search, sup_distance, SearchMethod, ShadowResult};
pub use verify::{
    default_slack, h_shadowing_test, lipschitz_shadowing_test, pullback_trace, ParamsEcho,
    PullbackFailure, PullbackReport, PullbackStep, ShadowingParams, ShadowingReport, TrialResult,
    Worst,
};
