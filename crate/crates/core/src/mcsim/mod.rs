//! Monte-Carlo simulation of the typical user, used to validate the
//! analytic model and to score placements that have no closed form.
//!
//! Every trial draws from its own ChaCha stream keyed by the trial index,
//! so results do not depend on how trials are scheduled.

mod estimate;
mod kmeans;
mod scenario;
mod trial;

pub use estimate::{
    empirical_laplace_ppp, estimate, simulate_trial, summarize, trial_rng, Estimate, McSummary, MIN_TRIALS,
};
pub use kmeans::{kmeans_centroids, MAX_LLOYD_ITERATIONS};
pub use scenario::{poisson_disk, sample_typical_scenario, shifted_grid, Point, Scenario, SimOptions};
pub use trial::{interference_from, run_trial, TrialOutcome};
