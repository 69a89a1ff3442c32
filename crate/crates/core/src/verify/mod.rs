//! Residual sweeps, oracle campaigns, planarity searches and ODE checks,
//! each producing a serializable [`ResidualReport`].

pub mod grid;
pub mod identities;
pub mod odecheck;
pub mod oracle;
pub mod planarity;
pub mod report;
pub mod suite;
pub mod sweep;

pub use grid::GridSpec;
pub use identities::connection_identities;
pub use odecheck::{implicit_check, ode_round_trip, round_trip_cases, RoundTripCase};
pub use oracle::{oracle_equivalence, supported_configurations};
pub use planarity::{planarity_sweep, Lattice};
pub use report::{Check, ResidualReport, Tolerances};
pub use suite::{full_suite, run_item, run_suite, select, RunSettings, SuiteItem, Summary};
pub use sweep::{sweep_residual, SweepOptions};
