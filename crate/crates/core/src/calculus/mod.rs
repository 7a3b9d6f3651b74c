//! Convex-analytic operations on potentials and densities: grid transforms,
//! Moreau envelopes, first variations and entropy.

pub mod grid;
pub mod moreau;
pub mod transforms;
pub mod variation;

pub use grid::{GridFunction, GridHeader, GridKind};
pub use moreau::{epi_convergence_check, moreau, EpiReport, MoreauPoint};
pub use transforms::{asplund, asplund_self_identity, dilate, inf_convolution, legendre, legendre_on, SelfIdentityReport};
pub use variation::{entropy, first_variation, main_inequality_chain, pointwise_variation, EntropyMethod, MainChainReport, Variation};
