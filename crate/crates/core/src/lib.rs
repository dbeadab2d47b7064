//! Entropy rate of time-varying wireless networks.
//!
//! Nodes sit uniformly in a unit-area square, disk or equilateral triangle.
//! Each link fades with Rayleigh statistics and switches on and off as a
//! two-state Markov chain driven by the level crossing rate of its SNR. The
//! crate computes distance-averaged lower and upper bounds on the entropy
//! rate of the resulting network process, an exact block-entropy oracle for a
//! single edge, and a seeded Monte Carlo simulator to cross-check both.
//!
//! ```
//! use netentropy::{ChannelParams, Domain, entropy_rate_bounds};
//!
//! let params = ChannelParams::new(0.7, 2.0, 500.0, 12e6).unwrap();
//! let b = entropy_rate_bounds(50, Domain::square(), params).unwrap();
//! assert!(b.network_lower <= b.network_upper);
//! ```

#![forbid(unsafe_code)]

pub mod channel;
pub mod entropy;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod rng;
pub mod simulator;

pub use channel::{
    connection_probability, level_crossing_rate, slow_fading_report, snr_connection_indicator,
    stationary_distribution, transition_matrix, ChannelParams, LinkState, SlowFadingReport,
    TransitionMatrix,
};
pub use entropy::{
    averaged_edge_probability, averaged_transition_probability, binary_entropy,
    binary_entropy_terms, block_entropy_oracle, conditional_entropy_given_distance,
    conditional_entropy_unconditioned, entropy_rate_bounds, pair_count, BlockEntropies, EdgeModel,
    EntropyRateBounds,
};
pub use error::{Error, Result};
pub use geometry::{DistanceDensity, Domain, Point, Shape};
pub use quadrature::QuadratureSpec;
pub use simulator::{
    empirical_block_entropy, empirical_transition_frequencies, simulate, stationarity_check,
    SimConfig, TrajectoryEnsemble,
};
