//! Certifying or refuting the ball-expanding condition on nets.

mod certificate;
mod side;

pub use certificate::{
    ball_expanding_check, certificate_search, default_delta_samples, BallExpandingCertificate,
    BallWitness, CertificateSearch, CoverMode, SearchRow,
};
pub use side::{local_injectivity_check, metric_expanding_check, PairVerdict, PairWitness};
