//! Propagation primitives: the building-grid LOS model, pathloss and the
//! conical antenna pattern, plus the parameter records they operate on.
//!
//! All lengths are meters, densities are per square meter and angles are
//! radians. Conversions from the units used in configuration files happen
//! once, in the `from_*` constructors.

use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, floor, pow, sqrt, tan};

use crate::{Error, Result};

/// Statistics of the urban building grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrbanEnvironment {
    /// Buildings per square meter.
    pub beta_per_m2: f64,
    /// Fraction of ground area covered by buildings.
    pub delta: f64,
    /// Rayleigh scale of building heights, meters.
    pub kappa_m: f64,
}

impl UrbanEnvironment {
    pub fn new(beta_per_m2: f64, delta: f64, kappa_m: f64) -> Result<Self> {
        if !(beta_per_m2 > 0.0) {
            return Err(Error::InvalidParameter("beta must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter("delta must lie in (0,1)"));
        }
        if !(kappa_m > 0.0) {
            return Err(Error::InvalidParameter("kappa must be positive"));
        }
        Ok(Self { beta_per_m2, delta, kappa_m })
    }

    /// Building density given per square kilometer.
    pub fn from_per_km2(beta_per_km2: f64, delta: f64, kappa_m: f64) -> Result<Self> {
        Self::new(beta_per_km2 * 1e-6, delta, kappa_m)
    }

    /// Dense urban grid used throughout the numerical results: 300
    /// buildings/km², half the area built up, 20 m height scale.
    pub fn reference() -> Self {
        Self { beta_per_m2: 300e-6, delta: 0.5, kappa_m: 20.0 }
    }

    /// Buildings crossed per meter of horizontal distance, `sqrt(beta delta)`.
    pub fn crossing_rate(&self) -> f64 {
        sqrt(self.beta_per_m2 * self.delta)
    }

    /// Number of buildings between a user and a UAV `r` meters away.
    pub fn crossings(&self, r: f64) -> u32 {
        floor(r * self.crossing_rate()) as u32
    }
}

/// Channel state of a UAV-to-user link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelType {
    Los,
    Nlos,
}

impl ChannelType {
    pub const ALL: [ChannelType; 2] = [ChannelType::Los, ChannelType::Nlos];

    pub fn opposite(self) -> Self {
        match self {
            ChannelType::Los => ChannelType::Nlos,
            ChannelType::Nlos => ChannelType::Los,
        }
    }

    pub fn pathloss_exponent(self, radio: &RadioConfig) -> f64 {
        match self {
            ChannelType::Los => radio.alpha_los,
            ChannelType::Nlos => radio.alpha_nlos,
        }
    }

    pub fn fading_shape(self, radio: &RadioConfig) -> u32 {
        match self {
            ChannelType::Los => radio.m_los,
            ChannelType::Nlos => radio.m_nlos,
        }
    }

    /// Probability of this channel state at horizontal distance `r`.
    pub fn probability(self, r: f64, env: &UrbanEnvironment, height_m: f64) -> f64 {
        let p = los_probability(r, env, height_m);
        match self {
            ChannelType::Los => p,
            ChannelType::Nlos => 1.0 - p,
        }
    }

    /// Probability of this channel state given the number of buildings crossed.
    pub fn probability_for_crossings(self, d: u32, env: &UrbanEnvironment, height_m: f64) -> f64 {
        let p = los_probability_for_crossings(d, env, height_m);
        match self {
            ChannelType::Los => p,
            ChannelType::Nlos => 1.0 - p,
        }
    }
}

/// Radio parameters shared by every UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub m_los: u32,
    pub m_nlos: u32,
    pub tx_power_w: f64,
    pub noise_w: f64,
    pub beamwidth_rad: f64,
    pub threshold_linear: f64,
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_los > 2.0 && self.alpha_los <= self.alpha_nlos) {
            return Err(Error::InvalidParameter("pathloss exponents must satisfy 2 < alpha_los <= alpha_nlos"));
        }
        if !(self.m_nlos >= 1 && self.m_los >= self.m_nlos) {
            return Err(Error::InvalidParameter("fading shapes must satisfy m_los >= m_nlos >= 1"));
        }
        if !(self.beamwidth_rad > 0.0 && self.beamwidth_rad < PI) {
            return Err(Error::InvalidParameter("beamwidth must lie in (0, pi)"));
        }
        if !(self.tx_power_w > 0.0) {
            return Err(Error::InvalidParameter("transmit power must be positive"));
        }
        if !(self.noise_w >= 0.0) {
            return Err(Error::InvalidParameter("noise power must be nonnegative"));
        }
        if !(self.threshold_linear > 0.0) {
            return Err(Error::InvalidParameter("SINR threshold must be positive"));
        }
        Ok(())
    }

    /// Radio parameters of the reference scenario: LOS/NLOS exponents 2.1
    /// and 4, Nakagami shapes 3 and 1, 0.1 W, -90 dBm noise, 150 degree beam
    /// and a 0 dB SINR threshold.
    pub fn reference() -> Self {
        Self {
            alpha_los: 2.1,
            alpha_nlos: 4.0,
            m_los: 3,
            m_nlos: 1,
            tx_power_w: 0.1,
            noise_w: 1e-9,
            beamwidth_rad: 150f64.to_radians(),
            threshold_linear: 1.0,
        }
    }

    /// Main-lobe gain including transmit power, `mu 16 pi / omega^2`.
    pub fn peak_gain(&self) -> f64 {
        self.tx_power_w * 16.0 * PI / (self.beamwidth_rad * self.beamwidth_rad)
    }
}

/// How UAVs are positioned relative to the user hotspots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    HotspotCenter,
    UniformPpp,
    RectGrid,
    KMeans,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::HotspotCenter, Strategy::UniformPpp, Strategy::RectGrid, Strategy::KMeans];

    /// Whether the closed-form model covers this placement.
    pub fn has_analytic_model(self) -> bool {
        matches!(self, Strategy::HotspotCenter | Strategy::UniformPpp)
    }
}

/// Network geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deployment {
    pub height_m: f64,
    /// UAV density; equal to the hotspot density under hotspot placement.
    pub density_per_m2: f64,
    pub hotspot_radius_m: f64,
    pub strategy: Strategy,
}

impl Deployment {
    pub fn new(height_m: f64, density_per_m2: f64, hotspot_radius_m: f64, strategy: Strategy) -> Result<Self> {
        let dep = Self { height_m, density_per_m2, hotspot_radius_m, strategy };
        dep.validate()?;
        Ok(dep)
    }

    pub fn from_per_km2(
        height_m: f64,
        density_per_km2: f64,
        hotspot_radius_m: f64,
        strategy: Strategy,
    ) -> Result<Self> {
        Self::new(height_m, density_per_km2 * 1e-6, hotspot_radius_m, strategy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.height_m > 0.0) {
            return Err(Error::InvalidParameter("height must be positive"));
        }
        if !(self.density_per_m2 > 0.0) {
            return Err(Error::InvalidParameter("density must be positive"));
        }
        if !(self.hotspot_radius_m > 0.0) {
            return Err(Error::InvalidParameter("hotspot radius must be positive"));
        }
        Ok(())
    }
}

/// The complete parameter set of one network evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub env: UrbanEnvironment,
    pub radio: RadioConfig,
    pub deployment: Deployment,
}

impl Model {
    pub fn new(env: UrbanEnvironment, radio: RadioConfig, deployment: Deployment) -> Result<Self> {
        let model = Self { env, radio, deployment };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        UrbanEnvironment::new(self.env.beta_per_m2, self.env.delta, self.env.kappa_m)?;
        self.radio.validate()?;
        self.deployment.validate()
    }

    /// Reference parameters with the given deployment.
    pub fn reference(deployment: Deployment) -> Self {
        Self { env: UrbanEnvironment::reference(), radio: RadioConfig::reference(), deployment }
    }

    pub fn height(&self) -> f64 {
        self.deployment.height_m
    }

    pub fn cone_radius(&self) -> f64 {
        cone_radius(&self.radio, &self.deployment)
    }

    pub fn with_threshold(mut self, threshold_linear: f64) -> Self {
        self.radio.threshold_linear = threshold_linear;
        self
    }

    pub fn with_height(mut self, height_m: f64) -> Self {
        self.deployment.height_m = height_m;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.deployment.strategy = strategy;
        self
    }
}

/// Ground radius of the main beam, `tan(omega/2) gamma`.
pub fn cone_radius(radio: &RadioConfig, dep: &Deployment) -> f64 {
    tan(radio.beamwidth_rad / 2.0) * dep.height_m
}

/// Antenna gain (transmit power folded in) towards a user `r` meters away
/// horizontally. The cone boundary is inside the beam.
pub fn antenna_gain(r: f64, radio: &RadioConfig, dep: &Deployment) -> f64 {
    if r <= cone_radius(radio, dep) {
        radio.peak_gain()
    } else {
        0.0
    }
}

/// `(r^2 + gamma^2)^(-alpha/2)`.
pub fn pathloss(r: f64, gamma: f64, alpha: f64) -> f64 {
    pow(r * r + gamma * gamma, -alpha / 2.0)
}

/// LOS probability when the link crosses `d` building rows. No crossing
/// means nothing can block the link.
pub fn los_probability_for_crossings(d: u32, env: &UrbanEnvironment, gamma: f64) -> f64 {
    if d == 0 {
        return 1.0;
    }
    let df = f64::from(d);
    let two_k2 = 2.0 * env.kappa_m * env.kappa_m;
    (0..d).fold(1.0, |acc, n| {
        let clearance = gamma - (f64::from(n) + 0.5) * gamma / df;
        acc * (1.0 - exp(-clearance * clearance / two_k2))
    })
}

/// LOS probability of a UAV at height `gamma`, `r` meters away horizontally.
pub fn los_probability(r: f64, env: &UrbanEnvironment, gamma: f64) -> f64 {
    los_probability_for_crossings(env.crossings(r), env, gamma)
}

/// Radii in `(0, r_upper]` at which [`los_probability`] changes step.
pub fn los_breakpoints(env: &UrbanEnvironment, r_upper: f64) -> Vec<f64> {
    let rate = env.crossing_rate();
    (1..=env.crossings(r_upper)).map(|q| f64::from(q) / rate).filter(|&b| b <= r_upper).collect()
}

/// A radial interval on which the LOS probability is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub crossings: u32,
    pub lower: f64,
    pub upper: f64,
}

/// The nonempty constant-LOS intervals covering `[lower, upper]`.
pub fn plateaus(env: &UrbanEnvironment, lower: f64, upper: f64) -> impl Iterator<Item = Plateau> {
    let rate = env.crossing_rate();
    let (first, last) = if upper > lower { (env.crossings(lower), env.crossings(upper)) } else { (1, 0) };
    (first..=last).filter_map(move |q| {
        let lo = lower.max(f64::from(q) / rate);
        let hi = upper.min(f64::from(q + 1) / rate);
        (hi > lo).then_some(Plateau { crossings: q, lower: lo, upper: hi })
    })
}

/// `2 * integral_lower^upper P_j(r) r dr`, exact because `P_j` is a step function.
pub fn weighted_area(env: &UrbanEnvironment, gamma: f64, channel: ChannelType, lower: f64, upper: f64) -> f64 {
    plateaus(env, lower, upper)
        .map(|p| channel.probability_for_crossings(p.crossings, env, gamma) * (p.upper * p.upper - p.lower * p.lower))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn radio_with_beam(deg: f64) -> RadioConfig {
        RadioConfig { beamwidth_rad: deg.to_radians(), ..RadioConfig::reference() }
    }

    fn dep(height: f64) -> Deployment {
        Deployment::from_per_km2(height, 5.0, 100.0, Strategy::HotspotCenter).unwrap()
    }

    #[test]
    fn cone_radius_examples() {
        assert_relative_eq!(
            cone_radius(&radio_with_beam(150.0), &dep(100.0)),
            373.205_080_756_887_7,
            max_relative = 1e-12
        );
        assert_relative_eq!(cone_radius(&radio_with_beam(90.0), &dep(50.0)), 50.0, max_relative = 1e-12);
        assert!(cone_radius(&radio_with_beam(1e-9), &dep(100.0)) < 1e-6);
    }

    #[test]
    fn antenna_gain_examples() {
        let radio = RadioConfig::reference();
        let d = dep(100.0);
        assert_relative_eq!(antenna_gain(0.0, &radio, &d), 0.733_39, max_relative = 1e-4);
        assert_eq!(antenna_gain(400.0, &radio, &d), 0.0);
        let u = cone_radius(&radio, &d);
        assert_eq!(antenna_gain(u, &radio, &d), radio.peak_gain());
    }

    #[test]
    fn pathloss_examples() {
        assert_relative_eq!(pathloss(0.0, 100.0, 2.0), 1e-4, max_relative = 1e-14);
        assert_relative_eq!(pathloss(0.0, 100.0, 2.1), 6.309_573_444_801_93e-5, max_relative = 1e-12);
        assert!(pathloss(200.0, 100.0, 4.0) < pathloss(100.0, 100.0, 4.0));
    }

    #[test]
    fn los_probability_examples() {
        let env = UrbanEnvironment::reference();
        assert_eq!(los_probability(0.0, &env, 100.0), 1.0);
        assert_relative_eq!(los_probability(100.0, &env, 100.0), 1.0 - libm::exp(-3.125), max_relative = 1e-12);
        assert_relative_eq!(los_probability(100.0, &env, 1e5), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn breakpoint_examples() {
        let env = UrbanEnvironment::reference();
        let b = los_breakpoints(&env, 100.0);
        assert_eq!(b.len(), 1);
        assert_relative_eq!(b[0], 81.649_658_092_772_6, max_relative = 1e-12);
        assert!(los_breakpoints(&env, 81.0).is_empty());
        assert!(los_breakpoints(&env, 0.0).is_empty());
    }

    #[test]
    fn plateaus_tile_the_interval() {
        let env = UrbanEnvironment::reference();
        let ps: Vec<_> = plateaus(&env, 30.0, 300.0).collect();
        assert_eq!(ps.first().unwrap().lower, 30.0);
        assert_eq!(ps.last().unwrap().upper, 300.0);
        for w in ps.windows(2) {
            assert_eq!(w[0].upper, w[1].lower);
            assert_eq!(w[0].crossings + 1, w[1].crossings);
        }
        assert_eq!(plateaus(&env, 5.0, 5.0).count(), 0);
    }

    #[test]
    fn weighted_area_without_buildings() {
        let env = UrbanEnvironment::reference();
        // first plateau has no crossings, so P_l = 1
        assert_relative_eq!(weighted_area(&env, 100.0, ChannelType::Los, 0.0, 50.0), 2500.0);
        assert_eq!(weighted_area(&env, 100.0, ChannelType::Nlos, 0.0, 50.0), 0.0);
    }

    #[test]
    fn validation_messages() {
        assert_eq!(
            UrbanEnvironment::from_per_km2(300.0, 1.5, 20.0),
            Err(Error::InvalidParameter("delta must lie in (0,1)"))
        );
        let mut r = RadioConfig::reference();
        r.alpha_los = 5.0;
        assert!(r.validate().is_err());
        assert!(Deployment::new(0.0, 1e-6, 100.0, Strategy::RectGrid).is_err());
    }
}
