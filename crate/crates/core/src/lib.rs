//! Credit portfolio capital engine built on the asymptotic single risk
//! factor (ASRF) model underlying the Basel II internal ratings-based
//! approach.
//!
//! The crate computes regulatory capital, recovers realisations of the
//! systematic factor from realized losses, measures distance to default,
//! runs reverse stress tests against capital-ratio floors, and checks the
//! analytic results against a one-factor Gaussian copula Monte Carlo.

pub mod adequacy;
pub mod engine;
pub mod error;
pub mod factor;
pub mod io;
pub mod math;
pub mod mc;
pub mod par;
pub mod params;
pub mod portfolio;
pub mod synth;

pub use adequacy::{
    allocate_capital, allocate_provisions, distance_to_default, reverse_stress, solvency_report, ReportOptions,
    SolvencyReading, SolvencyReport, SolvencyRow, StressReading,
};
pub use engine::{
    capital, conditional_expected_loss, conditional_pd, expected_loss, regulatory_capital, LossCurve,
    LossDecomposition, LossMode, SolverOptions,
};
pub use error::{AsrfError, Result};
pub use factor::{
    allocate_losses, factor_series, recover_factor, FactorOptions, FactorReading, FactorSeries, LossAllocation,
};
pub use mc::{convergence_study, empirical_var, simulate, ConvergenceRow, LossDistribution, Sampler, SimConfig};
pub use par::Execution;
pub use portfolio::{
    validate_series, AssetClass, CapitalAccounts, LossRecord, ObligorGrade, PortfolioSnapshot, Quarter, QuarterSeries,
    ValidationReport,
};
pub use synth::{synthesize, SynthSpec};
