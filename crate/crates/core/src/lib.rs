//! Joinability of unitarily invariant quantum states and channels.
//!
//! The crate covers dense multi-qudit operator algebra ([`operator`]), the
//! homocorrelation and Choi pictures of linear maps ([`maps`]), Werner and
//! Brauer operator families with closed-form positivity predicates
//! ([`brauer`]), three-party joinability regions ([`joinability`]), agreement
//! bounds ([`agreement`]) and independent numerical certifiers for all of them
//! ([`oracle`]). [`verify`] bundles the property suites used by the CLI.

pub mod agreement;
pub mod brauer;
pub mod classify;
pub mod error;
pub mod joinability;
pub mod maps;
pub mod operator;
pub mod oracle;
pub mod verdict;
pub mod verify;

pub use agreement::{
    agreement_bounds, agreement_povm, agreement_probability, derived_task_bounds, AgreementCone,
    AgreementPovm, DerivedTaskBounds,
};
pub use brauer::{
    alpha_of_eta, brauer_operator, brauer_spectrum, eta_of_alpha, is_channel_positive,
    is_local_positive, is_state_positive, tripartite_werner_operator, werner_operator,
    BrauerParams, TripartiteWernerParams, WernerParams,
};
pub use classify::{classify_brauer, classify_operator, BipartiteVerdict, ConeMargins};
pub use error::{Error, Result};
pub use joinability::{
    channel_joinable, classical_joinable, local_positive_joinable, region_sweep,
    separable_region, state_joinable, EtaTriple, GridAxis, Pivot, RegionVerdict, Scenario,
    SweepGrid,
};
pub use maps::{
    choi, correlation_expectation, depolarizing, homocorrelation, inverse_homocorrelation,
    is_cptp, LinearMapRep,
};
pub use operator::{
    hermitian_eigenvalues, kron, partial_trace, partial_transpose, permutation_operator,
    DenseOperator, QuditSpace,
};
pub use oracle::{FeasibilityResult, OracleConfig};
pub use verdict::Verdict;
pub use verify::{run_suite, Suite, VerifyConfig, VerifyReport};

/// Crate version, embedded in sweep output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
