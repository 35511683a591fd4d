//! Random symmetric sign matrices: exact singularity, ranks over `F_p`,
//! exhaustive tiny-dimension probabilities and sampling estimates.

pub mod det;
pub mod exhaustive;
pub mod identities;
pub mod modp;
pub mod monte_carlo;
pub mod sym;

pub use det::{det_bareiss, det_exact, is_singular};
pub use exhaustive::{block_probability_exact, match_probability_exact, q_exact, singularity_exact, BlockCheck, QExact};
pub use identities::{
    adjugate_rank1_check, decoupling_identity_check, decoupling_probability_check, odlyzko_check, sample_corank_one,
};
pub use modp::{rank_mod_p, MatP};
pub use monte_carlo::{rank_profile_mc, singularity_mc, wilson95, RankProfile, SingularityEstimate};
pub use sym::SymMatrix;
