//! Exact anticoncentration, level-set containers and the fibre iteration
//! over `Z_p`, together with exact and sampled experiments on random
//! symmetric sign matrices.

pub mod anticoncentration;
pub mod canon;
pub mod containers;
pub mod error;
pub mod fibres;
pub mod inverse_lo;
pub mod io;
pub mod matrix;
pub mod rng;
pub mod sets;
pub mod suite;
pub mod zp;

pub use anticoncentration::{rho, rho_half, rho_int, ExactDistribution, HalaszAudit, RhoResult};
pub use containers::{container, frequency_set, level_set, ContainerSet, LevelSet};
pub use error::{Error, Result};
pub use fibres::{audit_trace, run_fibre, FibreStep, FibreTrace};
pub use inverse_lo::{build_container, verify_certificate, CheckReport, ConstantsProfile, ContainerCertificate};
pub use matrix::{MatP, SingularityEstimate, SymMatrix};
pub use rng::Stream;
pub use sets::{IndexSet, ResidueSet};
pub use suite::{CriterionReport, SuiteConfig};
pub use zp::{PrimeModulus, Threshold, ZpVector};
