//! Coverage probability and spectral efficiency of the typical user.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, log2, pow};

use super::association::{association_weight, serving_distance_pdf, serving_radius_for_bound, ServingClass};
use super::laplace::laplace_total_scaled;
use crate::quadrature::{integrate_piecewise, QuadratureSpec};
use crate::specfun::factorial;
use crate::urban::{los_breakpoints, pathloss, ChannelType, Model, Strategy};
use crate::{Error, Result};

fn require_analytic(model: &Model) -> Result<()> {
    model.validate()?;
    if model.deployment.strategy.has_analytic_model() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("no analytic model for grid or K-means placement"))
    }
}

/// Serving radii at which the coverage integrand is not smooth: LOS steps,
/// the hotspot edge, and radii where an exclusion radius crosses a LOS
/// step, the hotspot edge or the cone edge.
pub fn serving_breakpoints(model: &Model) -> Vec<f64> {
    let u = model.cone_radius();
    let r_max = model.deployment.hotspot_radius_m;
    let steps = los_breakpoints(&model.env, u);
    let mut out = steps.clone();
    out.push(r_max);
    for t_star in ChannelType::ALL {
        let other = t_star.opposite();
        for &c in steps.iter().chain([u, r_max].iter()) {
            out.push(serving_radius_for_bound(t_star, other, c, model));
        }
    }
    out.retain(|&r| r > 0.0 && r < u);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Upper limit of the serving-distance integral of a class.
fn class_upper_limit(class: ServingClass, model: &Model) -> f64 {
    let u = model.cone_radius();
    if class.is_hotspot() {
        u.min(model.deployment.hotspot_radius_m)
    } else {
        u
    }
}

/// `P(SINR > theta | serving class, r_star)` weighted by the class
/// association probability and serving-distance density.
fn coverage_integrand(class: ServingClass, r_star: f64, model: &Model, quad: &QuadratureSpec) -> Result<f64> {
    let weight = association_weight(class, r_star, model) * serving_distance_pdf(class, r_star, model);
    if weight == 0.0 {
        return Ok(0.0);
    }
    let channel = class.channel();
    let m = channel.fading_shape(&model.radio);
    let signal = model.radio.peak_gain() * pathloss(r_star, model.height(), channel.pathloss_exponent(&model.radio));
    let s_r = f64::from(m) * model.radio.threshold_linear / signal;
    let scaled = laplace_total_scaled(m - 1, s_r, class, r_star, model, quad)?;
    let conditional: f64 =
        scaled.iter().enumerate().map(|(k, v)| if k % 2 == 0 { 1.0 } else { -1.0 } * v / factorial(k as u32)).sum();
    Ok(weight * conditional)
}

/// Integrates `f(class, r)` over the serving radius of every reachable class.
fn integrate_classes<F>(model: &Model, quad: &QuadratureSpec, mut f: F) -> Result<Vec<(ServingClass, f64)>>
where
    F: FnMut(ServingClass, f64) -> Result<f64>,
{
    let breaks = serving_breakpoints(model);
    let mut out = Vec::with_capacity(4);
    for &class in ServingClass::reachable(model.deployment.strategy) {
        let mut failure: Option<Error> = None;
        let value = integrate_piecewise(
            |r| match f(class, r) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            class_upper_limit(class, model),
            &breaks,
            quad,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        out.push((class, value?));
    }
    Ok(out)
}

/// Coverage probability `P(SINR > theta)` for hotspot-center or
/// uniform-PPP placement.
pub fn coverage_probability(model: &Model, quad: &QuadratureSpec) -> Result<f64> {
    Ok(coverage_by_class(model, quad)?.iter().map(|(_, v)| v).sum::<f64>().clamp(0.0, 1.0))
}

/// Contribution of each serving class to the coverage probability.
pub fn coverage_by_class(model: &Model, quad: &QuadratureSpec) -> Result<Vec<(ServingClass, f64)>> {
    require_analytic(model)?;
    integrate_classes(model, quad, |class, r| coverage_integrand(class, r, model, quad))
}

/// Probability that each class serves the user, `integral A_v f_{R_v} dr`.
pub fn association_masses(model: &Model, quad: &QuadratureSpec) -> Result<Vec<(ServingClass, f64)>> {
    require_analytic(model)?;
    integrate_classes(model, quad, |class, r| {
        Ok(association_weight(class, r, model) * serving_distance_pdf(class, r, model))
    })
}

/// Probability that no UAV illuminates the user.
pub fn no_service_probability(model: &Model) -> f64 {
    let u = model.cone_radius();
    let empty_field = exp(-PI * model.deployment.density_per_m2 * u * u);
    match model.deployment.strategy {
        Strategy::HotspotCenter => {
            let r_max = model.deployment.hotspot_radius_m;
            (1.0 - (u * u) / (r_max * r_max)).max(0.0) * empty_field
        }
        _ => empty_field,
    }
}

/// Threshold grid used by [`spectral_efficiency`]: log-spaced in the SINR
/// threshold, with this many points on the first pass.
pub const SE_INITIAL_POINTS: usize = 64;
pub const SE_MIN_THRESHOLD: f64 = 1e-3;
pub const SE_MAX_THRESHOLD: f64 = 1e6;
/// Coverage below which the threshold sweep stops.
pub const SE_TAIL_COVERAGE: f64 = 1e-4;
/// Refinement stops once successive estimates differ by less than this.
pub const SE_CONVERGENCE_BITS: f64 = 0.01;
const SE_MAX_REFINEMENTS: usize = 4;

fn threshold_at(index: usize, points: usize) -> f64 {
    let lo = libm::log10(SE_MIN_THRESHOLD);
    let hi = libm::log10(SE_MAX_THRESHOLD);
    pow(10.0, lo + (hi - lo) * index as f64 / (points - 1) as f64)
}

/// Spectral efficiency `E[log2(1 + SINR)] = integral_0^inf P(SINR > 2^t - 1) dt`,
/// by the trapezoid rule in `t` over a log-spaced threshold grid that is
/// doubled until the estimate settles.
pub fn spectral_efficiency(model: &Model, quad: &QuadratureSpec) -> Result<f64> {
    spectral_efficiency_with(model, |thresholds| {
        thresholds.iter().map(|&theta| coverage_probability(&model.with_threshold(theta), quad)).collect()
    })
}

/// [`spectral_efficiency`] with a caller-supplied batch evaluator of the
/// coverage curve, so the thresholds of one pass can be evaluated in
/// parallel by a std front end. `coverage` must return one value per
/// threshold, in order.
pub fn spectral_efficiency_with<F>(model: &Model, mut coverage: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    require_analytic(model)?;
    let mut points = SE_INITIAL_POINTS;
    // values[i] is the coverage at threshold_at(i, points); None if the
    // sweep was truncated before reaching it
    let mut values: Vec<Option<f64>> = {
        let thresholds: Vec<f64> = (0..points).map(|i| threshold_at(i, points)).collect();
        truncate_sweep(coverage(&thresholds)?)
    };
    let mut estimate = trapezoid(&values, points);

    for _ in 0..SE_MAX_REFINEMENTS {
        let fine = 2 * points - 1;
        let last_known = values.iter().rposition(Option::is_some).unwrap_or(0);
        // midpoints up to the truncation point
        let new_idx: Vec<usize> = (0..fine).filter(|i| i % 2 == 1 && i / 2 < last_known).collect();
        let thresholds: Vec<f64> = new_idx.iter().map(|&i| threshold_at(i, fine)).collect();
        let fresh = coverage(&thresholds)?;
        let mut refined: Vec<Option<f64>> = (0..fine).map(|i| if i % 2 == 0 { values[i / 2] } else { None }).collect();
        for (i, v) in new_idx.into_iter().zip(fresh) {
            refined[i] = Some(v);
        }
        let next = trapezoid(&refined, fine);
        let change = libm::fabs(next - estimate);
        values = refined;
        points = fine;
        estimate = next;
        if change < SE_CONVERGENCE_BITS {
            break;
        }
    }
    Ok(estimate)
}

fn truncate_sweep(raw: Vec<f64>) -> Vec<Option<f64>> {
    let mut done = false;
    raw.into_iter()
        .map(|v| {
            if done {
                None
            } else {
                done = v < SE_TAIL_COVERAGE;
                Some(v)
            }
        })
        .collect()
}

fn trapezoid(values: &[Option<f64>], points: usize) -> f64 {
    let t = |i: usize| log2(1.0 + threshold_at(i, points));
    let first = values[0].unwrap_or(0.0);
    // below the first threshold coverage is at least its value there
    let mut total = t(0) * first;
    let mut prev: Option<(f64, f64)> = Some((t(0), first));
    for (i, v) in values.iter().enumerate().skip(1) {
        let Some(v) = *v else { continue };
        if let Some((t0, v0)) = prev {
            total += 0.5 * (v + v0) * (t(i) - t0);
        }
        prev = Some((t(i), v));
    }
    total
}
