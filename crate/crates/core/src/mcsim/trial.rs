use libm::log2;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::scenario::Scenario;
use crate::analytic::ServingClass;
use crate::urban::{antenna_gain, pathloss, ChannelType, Model};
use crate::{Error, Result};

/// What the typical user experiences in one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// SINR at the typical user; zero when no UAV covers it.
    pub sinr: f64,
    /// Association class, `None` when no UAV covers the user.
    pub serving: Option<ServingClass>,
}

impl TrialOutcome {
    pub fn covered(&self, threshold_linear: f64) -> bool {
        self.sinr > threshold_linear
    }

    /// Shannon rate `log2(1 + SINR)` in bit/s/Hz.
    pub fn spectral_efficiency(&self) -> f64 {
        log2(1.0 + self.sinr)
    }
}

fn fading<R: Rng + ?Sized>(rng: &mut R, m: u32) -> Result<f64> {
    let m = f64::from(m);
    let dist = Gamma::new(m, 1.0 / m).map_err(|_| Error::InvalidParameter("fading shape must be positive"))?;
    Ok(dist.sample(rng))
}

/// Associates the typical user and evaluates its SINR.
///
/// The user attaches to the UAV with the largest mean received power
/// `eta * l`, ties going to the lowest index. Each UAV inside the user's
/// beam draws an independent unit-mean Gamma fade; the rest contribute
/// nothing.
pub fn run_trial<R: Rng + ?Sized>(scenario: &Scenario, model: &Model, rng: &mut R) -> Result<TrialOutcome> {
    let gamma = model.height();
    let mut best: Option<(usize, f64)> = None;
    let mut mean_power = alloc::vec::Vec::with_capacity(scenario.uav_positions.len());
    for (i, (p, &ch)) in scenario.uav_positions.iter().zip(&scenario.channel_types).enumerate() {
        let r = p.norm();
        let eta = antenna_gain(r, &model.radio, &model.deployment);
        let power = eta * pathloss(r, gamma, ch.pathloss_exponent(&model.radio));
        mean_power.push(power);
        if power > 0.0 && best.is_none_or(|(_, b)| power > b) {
            best = Some((i, power));
        }
    }
    let Some((serving_idx, _)) = best else {
        return Ok(TrialOutcome { sinr: 0.0, serving: None });
    };

    let mut signal = 0.0;
    let mut interference = 0.0;
    for (i, (&power, &ch)) in mean_power.iter().zip(&scenario.channel_types).enumerate() {
        if power == 0.0 {
            continue;
        }
        let received = power * fading(rng, ch.fading_shape(&model.radio))?;
        if i == serving_idx {
            signal = received;
        } else {
            interference += received;
        }
    }
    let ch = scenario.channel_types[serving_idx];
    let serving =
        if scenario.hotspot_uav == Some(serving_idx) { ServingClass::hotspot(ch) } else { ServingClass::nearest(ch) };
    let sinr = signal / (interference + model.radio.noise_w);
    Ok(TrialOutcome { sinr, serving: Some(serving) })
}

/// Interference at the origin from the UAVs of one channel type whose
/// horizontal distance exceeds `exclusion_m`, with fading.
pub fn interference_from<R: Rng + ?Sized>(
    scenario: &Scenario,
    channel: ChannelType,
    exclusion_m: f64,
    model: &Model,
    rng: &mut R,
) -> Result<f64> {
    let gamma = model.height();
    let mut total = 0.0;
    for (p, &ch) in scenario.uav_positions.iter().zip(&scenario.channel_types) {
        let r = p.norm();
        if ch != channel || r <= exclusion_m {
            continue;
        }
        let eta = antenna_gain(r, &model.radio, &model.deployment);
        if eta > 0.0 {
            total += eta
                * pathloss(r, gamma, ch.pathloss_exponent(&model.radio))
                * fading(rng, ch.fading_shape(&model.radio))?;
        }
    }
    Ok(total)
}
