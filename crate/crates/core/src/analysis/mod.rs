//! Verification procedures on truncations and scattered-space descriptions.

pub mod classify;
pub mod companions;
pub mod derived;
pub mod omega;
pub mod oracle;
pub mod periodic;
pub mod power;
pub mod refute;

pub use classify::{classify_expansiveness, Classification, DeltaClass, Verdict};
pub use companions::{companion_set, max_companion_profile, CompanionReport, Mode, ProfileRow, SeparationTable};
pub use derived::{cb_rank_checked, compare_derived, DerivedComparison, DerivedLevel};
pub use omega::{
    depth_chain, multi_nonwandering, nonwandering, ChainMode, DepthParams, OmegaChain, OmegaLevel, OmegaReport,
    ReturnWitness,
};
pub use oracle::{ball_cover, clique_cover, cover_companion_oracle, OracleResult};
pub use periodic::{converging_semiorbits, fixed_points, periodic_points, SemiOrbit};
pub use power::{power_containment, PowerCheck};
pub use refute::{refute_positive_n_expansiveness, RefutationRow};
