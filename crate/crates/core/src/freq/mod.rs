//! Two-excitation dynamics in the mode (frequency) picture.

pub mod cascade;
pub mod classify;
pub mod markov;
pub mod oracle;
pub mod state;
pub mod two_photon;

pub use cascade::{solve_cee, solve_spectral_pair, SpectralPairs};
pub use classify::{classify_steady_state, SteadyStateClass, SteadyStateLabel};
pub use markov::analytic_cee_markov;
pub use oracle::{default_oracle_dt, oracle_full_grid, OracleRun};
pub use state::{populations, total_norm, two_photon_norm, CkkMatrix, TwoExcitationState};
pub use two_photon::{solve_two_photon, TwoPhotonSolution};
