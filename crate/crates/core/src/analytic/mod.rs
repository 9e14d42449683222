//! Closed-form coverage model for UAVs hovering above hotspot centers, and
//! for UAVs forming a Poisson field independent of the hotspots.
//!
//! Every radial integral is split at the LOS steps of the building model,
//! where the integrands jump; within a step they are smooth.

mod association;
mod coverage;
mod laplace;

pub use association::{
    assoc_prob_hotspot, assoc_prob_nearest, association_weight, interference_bounds, pdf_hotspot_distance,
    pdf_hotspot_joint, pdf_nearest, prob_b0, serving_distance_pdf, serving_radius_for_bound, void_exponent,
    InterferenceBounds, ServingClass,
};
pub use coverage::{
    association_masses, coverage_by_class, coverage_probability, no_service_probability, serving_breakpoints,
    spectral_efficiency, spectral_efficiency_with, SE_CONVERGENCE_BITS, SE_INITIAL_POINTS, SE_MAX_THRESHOLD,
    SE_MIN_THRESHOLD, SE_TAIL_COVERAGE,
};
pub use laplace::{
    g_kernel, g_kernel_deriv, laplace_i0, laplace_i0_deriv, laplace_i0_scaled, laplace_ppp, laplace_ppp_deriv,
    laplace_ppp_scaled, laplace_total_deriv, laplace_total_scaled, B0_FLOOR,
};
