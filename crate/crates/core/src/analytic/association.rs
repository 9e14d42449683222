//! Distance distributions and association probabilities of the typical user.

use core::f64::consts::PI;
use libm::{exp, pow, sqrt};

use crate::urban::{weighted_area, ChannelType, Model, Strategy};

/// Which UAV serves the typical user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ServingClass {
    /// The UAV above the user's own hotspot, with a LOS link.
    HotspotLos,
    /// The UAV above the user's own hotspot, with an NLOS link.
    HotspotNlos,
    /// The nearest LOS UAV among all the others.
    NearestLos,
    /// The nearest NLOS UAV among all the others.
    NearestNlos,
}

impl ServingClass {
    pub const ALL: [ServingClass; 4] =
        [ServingClass::HotspotLos, ServingClass::HotspotNlos, ServingClass::NearestLos, ServingClass::NearestNlos];

    pub fn hotspot(channel: ChannelType) -> Self {
        match channel {
            ChannelType::Los => ServingClass::HotspotLos,
            ChannelType::Nlos => ServingClass::HotspotNlos,
        }
    }

    pub fn nearest(channel: ChannelType) -> Self {
        match channel {
            ChannelType::Los => ServingClass::NearestLos,
            ChannelType::Nlos => ServingClass::NearestNlos,
        }
    }

    pub fn channel(self) -> ChannelType {
        match self {
            ServingClass::HotspotLos | ServingClass::NearestLos => ChannelType::Los,
            ServingClass::HotspotNlos | ServingClass::NearestNlos => ChannelType::Nlos,
        }
    }

    pub fn is_hotspot(self) -> bool {
        matches!(self, ServingClass::HotspotLos | ServingClass::HotspotNlos)
    }

    /// Short label used in reports: `0l`, `0n`, `l`, `n`.
    pub fn label(self) -> &'static str {
        match self {
            ServingClass::HotspotLos => "0l",
            ServingClass::HotspotNlos => "0n",
            ServingClass::NearestLos => "l",
            ServingClass::NearestNlos => "n",
        }
    }

    /// Classes reachable under a placement strategy.
    pub fn reachable(strategy: Strategy) -> &'static [ServingClass] {
        match strategy {
            Strategy::HotspotCenter => &Self::ALL,
            _ => &Self::ALL[2..],
        }
    }
}

/// Minimum distances of LOS and NLOS interferers given the serving link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceBounds {
    pub c_los: f64,
    pub c_nlos: f64,
}

impl InterferenceBounds {
    pub fn get(&self, channel: ChannelType) -> f64 {
        match channel {
            ChannelType::Los => self.c_los,
            ChannelType::Nlos => self.c_nlos,
        }
    }
}

/// Exclusion radii implied by a serving UAV of type `t_star` at `r_star`:
/// any closer interferer of the given type would have been stronger.
///
/// The NLOS-serving LOS radius is clipped to the antenna cone; the
/// LOS-serving NLOS radius never exceeds `r_star` when `alpha_los <=
/// alpha_nlos` and the UAV is at least 1 m up, so it needs no clipping.
pub fn interference_bounds(t_star: ChannelType, r_star: f64, model: &Model) -> InterferenceBounds {
    let gamma = model.height();
    let g2 = gamma * gamma;
    let base = r_star * r_star + g2;
    let radio = &model.radio;
    match t_star {
        ChannelType::Los => {
            let c_nlos = sqrt((pow(base, radio.alpha_los / radio.alpha_nlos) - g2).max(0.0));
            InterferenceBounds { c_los: r_star, c_nlos }
        }
        ChannelType::Nlos => {
            let equal_power = sqrt((pow(base, radio.alpha_nlos / radio.alpha_los) - g2).max(0.0));
            InterferenceBounds { c_los: model.cone_radius().min(equal_power), c_nlos: r_star }
        }
    }
}

/// Horizontal radius at which the exclusion radius of `interferer` type,
/// for a serving link of type `t_star`, equals `c`. Inverse of
/// [`interference_bounds`] in `r_star`.
pub fn serving_radius_for_bound(t_star: ChannelType, interferer: ChannelType, c: f64, model: &Model) -> f64 {
    if t_star == interferer {
        return c;
    }
    let g2 = model.height() * model.height();
    let radio = &model.radio;
    let ratio = match t_star {
        ChannelType::Los => radio.alpha_nlos / radio.alpha_los,
        ChannelType::Nlos => radio.alpha_los / radio.alpha_nlos,
    };
    sqrt((pow(c * c + g2, ratio) - g2).max(0.0))
}

/// Density of the distance between the user and its hotspot center.
pub fn pdf_hotspot_distance(r: f64, r_max: f64) -> f64 {
    if (0.0..=r_max).contains(&r) {
        2.0 * r / (r_max * r_max)
    } else {
        0.0
    }
}

/// Joint density of the hotspot-UAV distance and its channel type.
pub fn pdf_hotspot_joint(r: f64, channel: ChannelType, model: &Model) -> f64 {
    let r_max = model.deployment.hotspot_radius_m;
    let density = pdf_hotspot_distance(r, r_max);
    if density == 0.0 {
        return 0.0;
    }
    channel.probability(r, &model.env, model.height()) * density
}

/// Mean number of UAVs of the given channel type within `radius`:
/// `2 pi integral_0^radius lambda_j(r) r dr`.
pub fn void_exponent(channel: ChannelType, radius: f64, model: &Model) -> f64 {
    if radius <= 0.0 {
        return 0.0;
    }
    PI * model.deployment.density_per_m2 * weighted_area(&model.env, model.height(), channel, 0.0, radius)
}

/// Density of the distance to the nearest UAV of the given channel type in
/// the thinned Poisson field.
pub fn pdf_nearest(r: f64, channel: ChannelType, model: &Model) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let intensity = channel.probability(r, &model.env, model.height()) * model.deployment.density_per_m2;
    2.0 * PI * intensity * r * exp(-void_exponent(channel, r, model))
}

/// Probability that the hotspot UAV, at `r_star` with channel `t_star`, is
/// the strongest UAV.
pub fn assoc_prob_hotspot(t_star: ChannelType, r_star: f64, model: &Model) -> f64 {
    let bounds = interference_bounds(t_star, r_star, model);
    let exponent: f64 = ChannelType::ALL.iter().map(|&j| void_exponent(j, bounds.get(j), model)).sum();
    exp(-exponent)
}

/// Probability that the hotspot UAV is weaker than a serving UAV of type
/// `t_star` at `r_star`.
pub fn prob_b0(t_star: ChannelType, r_star: f64, model: &Model) -> f64 {
    let bounds = interference_bounds(t_star, r_star, model);
    prob_b0_for_bounds(&bounds, model)
}

pub(crate) fn prob_b0_for_bounds(bounds: &InterferenceBounds, model: &Model) -> f64 {
    let r_max = model.deployment.hotspot_radius_m;
    let stronger: f64 = ChannelType::ALL
        .iter()
        .map(|&k| weighted_area(&model.env, model.height(), k, 0.0, bounds.get(k).min(r_max)))
        .sum::<f64>()
        / (r_max * r_max);
    (1.0 - stronger).clamp(0.0, 1.0)
}

/// Probability that the nearest UAV of type `channel` in the Poisson field,
/// at `r_star`, is the strongest UAV.
pub fn assoc_prob_nearest(channel: ChannelType, r_star: f64, model: &Model) -> f64 {
    let bounds = interference_bounds(channel, r_star, model);
    let other = channel.opposite();
    let void = exp(-void_exponent(other, bounds.get(other), model));
    match model.deployment.strategy {
        Strategy::HotspotCenter => void * prob_b0_for_bounds(&bounds, model),
        _ => void,
    }
}

/// Association weight `A_v` of a serving class at `r_star`.
pub fn association_weight(class: ServingClass, r_star: f64, model: &Model) -> f64 {
    if class.is_hotspot() {
        assoc_prob_hotspot(class.channel(), r_star, model)
    } else {
        assoc_prob_nearest(class.channel(), r_star, model)
    }
}

/// Serving-distance density `f_{R_v}` of a serving class.
pub fn serving_distance_pdf(class: ServingClass, r_star: f64, model: &Model) -> f64 {
    if class.is_hotspot() {
        pdf_hotspot_joint(r_star, class.channel(), model)
    } else {
        pdf_nearest(r_star, class.channel(), model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::urban::{Deployment, RadioConfig};
    use approx::assert_relative_eq;

    fn model(height: f64, density_km2: f64, r_max: f64) -> Model {
        Model::reference(Deployment::from_per_km2(height, density_km2, r_max, Strategy::HotspotCenter).unwrap())
    }

    #[test]
    fn bounds_examples() {
        let m = model(100.0, 5.0, 100.0);
        let b = interference_bounds(ChannelType::Los, 0.0, &m);
        assert_eq!(b.c_los, 0.0);
        assert_eq!(b.c_nlos, 0.0);

        let b = interference_bounds(ChannelType::Nlos, 0.0, &m);
        assert_eq!(b.c_nlos, 0.0);
        assert_relative_eq!(b.c_los, m.cone_radius(), max_relative = 1e-12);

        let mut equal = m;
        equal.radio.alpha_nlos = equal.radio.alpha_los;
        let b = interference_bounds(ChannelType::Los, 42.0, &equal);
        assert_relative_eq!(b.c_los, 42.0);
        assert_relative_eq!(b.c_nlos, 42.0, max_relative = 1e-12);
    }

    #[test]
    fn los_serving_nlos_bound_stays_inside_cone() {
        // The unclipped LOS-serving NLOS radius never exceeds r_star, so
        // clipping it at the cone would change nothing.
        for &h in &[1.0, 10.0, 40.0, 100.0, 200.0, 500.0] {
            let m = model(h, 5.0, 100.0);
            let u = m.cone_radius();
            for i in 0..=200 {
                let r = u * f64::from(i) / 200.0;
                let b = interference_bounds(ChannelType::Los, r, &m);
                assert!(b.c_nlos <= r + 1e-9 && b.c_nlos <= u);
            }
        }
    }

    #[test]
    fn bound_inverse_round_trips() {
        // at 1 m height neither bound is clipped by max(0, .) for r > 0
        let m = model(1.0, 5.0, 100.0);
        for &r in &[0.5, 1.0, 3.0] {
            let b = interference_bounds(ChannelType::Los, r, &m);
            assert!(b.c_nlos > 0.0);
            let back = serving_radius_for_bound(ChannelType::Los, ChannelType::Nlos, b.c_nlos, &m);
            assert_relative_eq!(back, r, max_relative = 1e-9);
        }
        let b = interference_bounds(ChannelType::Nlos, 0.3, &m);
        assert!(b.c_los < m.cone_radius());
        let back = serving_radius_for_bound(ChannelType::Nlos, ChannelType::Los, b.c_los, &m);
        assert_relative_eq!(back, 0.3, max_relative = 1e-9);
    }

    #[test]
    fn nlos_interferers_are_never_excluded_by_los_server_at_100m() {
        let m = model(100.0, 5.0, 100.0);
        for i in 0..=100 {
            let r = m.cone_radius() * f64::from(i) / 100.0;
            assert_eq!(interference_bounds(ChannelType::Los, r, &m).c_nlos, 0.0);
        }
    }

    #[test]
    fn hotspot_pdf_examples() {
        assert_relative_eq!(pdf_hotspot_distance(100.0, 100.0), 0.02);
        assert_relative_eq!(pdf_hotspot_distance(50.0, 100.0), 0.01);
        assert_eq!(pdf_hotspot_distance(101.0, 100.0), 0.0);
        let m = model(100.0, 5.0, 100.0);
        assert_relative_eq!(pdf_hotspot_joint(50.0, ChannelType::Los, &m), 0.01);
        assert_eq!(pdf_hotspot_joint(150.0, ChannelType::Los, &m), 0.0);
        for &r in &[10.0, 85.0, 99.0] {
            let sum = pdf_hotspot_joint(r, ChannelType::Los, &m) + pdf_hotspot_joint(r, ChannelType::Nlos, &m);
            assert_relative_eq!(sum, pdf_hotspot_distance(r, 100.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn nearest_pdf_reduces_to_homogeneous_case_on_first_plateau() {
        let m = model(100.0, 5.0, 100.0);
        let lambda = m.deployment.density_per_m2;
        let r = 60.0;
        let expect = 2.0 * PI * lambda * r * exp(-PI * lambda * r * r);
        assert_relative_eq!(pdf_nearest(r, ChannelType::Los, &m), expect, max_relative = 1e-13);
        assert_eq!(pdf_nearest(r, ChannelType::Nlos, &m), 0.0);
    }

    #[test]
    fn association_limits() {
        let m = model(100.0, 5.0, 100.0);
        assert_eq!(assoc_prob_hotspot(ChannelType::Los, 0.0, &m), 1.0);
        assert_eq!(prob_b0(ChannelType::Los, 0.0, &m), 1.0);
        let sparse = model(100.0, 1e-9, 100.0);
        assert_relative_eq!(assoc_prob_hotspot(ChannelType::Los, 80.0, &sparse), 1.0, max_relative = 1e-9);

        // NLOS serving at r=0 excludes every LOS hotspot UAV inside the
        // cone; only NLOS hotspot positions remain weaker
        let b0 = prob_b0(ChannelType::Nlos, 0.0, &m);
        let nlos_mass = crate::urban::weighted_area(&m.env, 100.0, ChannelType::Nlos, 0.0, 100.0) / 1e4;
        assert!(nlos_mass > 0.0);
        assert_relative_eq!(b0, nlos_mass, max_relative = 1e-12);

        let ppp = m.with_strategy(Strategy::UniformPpp);
        assert_eq!(assoc_prob_nearest(ChannelType::Los, 0.0, &ppp), 1.0);
    }

    #[test]
    fn b0_vanishes_when_bounds_cover_the_hotspot() {
        let mut m = model(100.0, 5.0, 100.0);
        m.radio = RadioConfig { alpha_nlos: 2.1, ..m.radio };
        // equal exponents: bounds are both r_star
        assert_eq!(prob_b0(ChannelType::Los, 150.0, &m), 0.0);
        assert_eq!(assoc_prob_nearest(ChannelType::Los, 150.0, &m), 0.0);
    }
}
