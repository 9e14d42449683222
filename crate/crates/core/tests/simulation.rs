use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uavnet_core::analytic::{no_service_probability, void_exponent};
use uavnet_core::mcsim::{
    estimate, kmeans_centroids, run_trial, sample_typical_scenario, Estimate, Point, Scenario, SimOptions,
};
use uavnet_core::urban::{antenna_gain, pathloss};
use uavnet_core::{ChannelType, Deployment, Model, Strategy};

fn model(height: f64, density_km2: f64, r_max: f64, strategy: Strategy) -> Model {
    Model::reference(Deployment::from_per_km2(height, density_km2, r_max, strategy).unwrap())
}

#[test]
fn hotspot_count_is_poisson_in_the_window() {
    let m = model(100.0, 10.0, 100.0, Strategy::HotspotCenter);
    let opts = SimOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let counts = (0..10_000).map(|_| {
        let sc = sample_typical_scenario(&m, &opts, &mut rng).unwrap();
        (sc.hotspot_centers.len() - 1) as f64
    });
    let est = Estimate::from_samples(counts);
    let w = opts.window_radius(&m);
    let expected = m.deployment.density_per_m2 * PI * w * w;
    let se = est.half_width_95 / 1.96;
    assert!((est.mean - expected).abs() < 3.0 * se, "{} vs {expected} (se {se})", est.mean);
}

#[test]
fn own_hotspot_center_is_uniform_in_the_disk() {
    let r_max = 100.0;
    let m = model(100.0, 5.0, r_max, Strategy::HotspotCenter);
    let opts = SimOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 10_000;
    let bins = 20;
    let mut counts = vec![0usize; bins];
    for _ in 0..n {
        let sc = sample_typical_scenario(&m, &opts, &mut rng).unwrap();
        // (r / r_max)^2 is uniform on [0, 1)
        let u = (sc.hotspot_centers[0].norm() / r_max).powi(2);
        counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let expected = n as f64 / bins as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99th percentile of chi-square with 19 degrees of freedom
    assert!(chi2 < 36.19, "chi-square {chi2}");
}

#[test]
fn nearest_los_distance_follows_the_void_probability() {
    let m = model(100.0, 5.0, 100.0, Strategy::UniformPpp);
    let opts = SimOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let radii = [100.0, 200.0, 350.0];
    let n = 10_000;
    let mut empty = [0usize; 3];
    for _ in 0..n {
        let sc = sample_typical_scenario(&m, &opts, &mut rng).unwrap();
        let nearest = sc
            .uav_positions
            .iter()
            .zip(&sc.channel_types)
            .filter(|(_, &ch)| ch == ChannelType::Los)
            .map(|(p, _)| p.norm())
            .fold(f64::INFINITY, f64::min);
        for (e, &r) in empty.iter_mut().zip(&radii) {
            if nearest > r {
                *e += 1;
            }
        }
    }
    for (&e, &r) in empty.iter().zip(&radii) {
        assert!(r < opts.window_radius(&m));
        let p = (-void_exponent(ChannelType::Los, r, &m)).exp();
        let observed = e as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((observed - p).abs() < 3.0 * se, "r = {r}: {observed} vs {p}");
    }
}

#[test]
fn kmeans_separates_two_blobs() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut points = Vec::new();
    for center in [Point::new(-500.0, 0.0), Point::new(500.0, 200.0)] {
        for _ in 0..200 {
            points.push(Point::new(center.x + rng.random_range(-20.0..20.0), center.y + rng.random_range(-20.0..20.0)));
        }
    }
    let mut c = kmeans_centroids(&points, 2, &mut rng).unwrap();
    c.sort_by(|a, b| a.x.total_cmp(&b.x));
    assert!(c[0].dist2(&Point::new(-500.0, 0.0)).sqrt() < 5.0, "{c:?}");
    assert!(c[1].dist2(&Point::new(500.0, 200.0)).sqrt() < 5.0, "{c:?}");
}

fn single_uav(position: Point, channel: ChannelType) -> Scenario {
    Scenario {
        hotspot_centers: vec![position],
        users: Vec::new(),
        uav_positions: vec![position],
        channel_types: vec![channel],
        hotspot_uav: Some(0),
        window_radius: 500.0,
    }
}

#[test]
fn single_rayleigh_link_has_exponential_coverage() {
    let mut m = model(100.0, 5.0, 100.0, Strategy::HotspotCenter);
    m.radio.m_los = 1;
    let position = Point::new(60.0, 0.0);
    let sc = single_uav(position, ChannelType::Los);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for theta in [1e3, 1e5, 1e6] {
        let n = 20_000;
        let covered = Estimate::from_samples(
            (0..n).map(|_| f64::from(u8::from(run_trial(&sc, &m, &mut rng).unwrap().covered(theta)))),
        );
        let mean_power = antenna_gain(60.0, &m.radio, &m.deployment) * pathloss(60.0, m.height(), m.radio.alpha_los);
        let expected = (-theta * m.radio.noise_w / mean_power).exp();
        assert!(covered.contains(expected, 0.002), "theta {theta}: {} vs {expected}", covered.mean);
    }
}

#[test]
fn uavs_outside_the_beam_do_not_interfere() {
    let m = model(100.0, 5.0, 100.0, Strategy::HotspotCenter);
    let cone = m.cone_radius();
    let alone = single_uav(Point::new(30.0, 0.0), ChannelType::Los);
    let mut crowded = alone.clone();
    for k in 0..6 {
        crowded.uav_positions.push(Point::polar(cone + 10.0 + 50.0 * k as f64, k as f64));
        crowded.channel_types.push(if k % 2 == 0 { ChannelType::Los } else { ChannelType::Nlos });
    }
    for seed in 0..50 {
        let a = run_trial(&alone, &m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = run_trial(&crowded, &m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn tiny_threshold_measures_service_probability() {
    for (strategy, height) in [(Strategy::HotspotCenter, 20.0), (Strategy::UniformPpp, 60.0)] {
        let m = model(height, 5.0, 100.0, strategy).with_threshold(1e-9);
        let s = estimate(&m, &SimOptions::default(), 20_000, 16).unwrap();
        let served = 1.0 - no_service_probability(&m);
        assert!(s.coverage.contains(served, 0.002), "{strategy:?}: {} vs {served}", s.coverage.mean);
    }
    let m = model(100.0, 5.0, 100.0, Strategy::HotspotCenter).with_threshold(1e-9);
    let s = estimate(&m, &SimOptions::default(), 5_000, 17).unwrap();
    assert!(s.coverage.mean >= 0.999);
}

#[test]
fn a_larger_window_does_not_change_coverage() {
    let m = model(120.0, 10.0, 100.0, Strategy::HotspotCenter);
    let base = estimate(&m, &SimOptions::default(), 20_000, 18).unwrap().coverage;
    let wide = estimate(&m, &SimOptions { window_scale: 2.0, ..SimOptions::default() }, 20_000, 19).unwrap().coverage;
    let combined = (base.half_width_95.powi(2) + wide.half_width_95.powi(2)).sqrt();
    assert!((base.mean - wide.mean).abs() <= combined, "{} vs {}", base.mean, wide.mean);
}

#[test]
fn quadrupling_trials_halves_the_interval() {
    let m = model(100.0, 5.0, 100.0, Strategy::HotspotCenter);
    let small = estimate(&m, &SimOptions::default(), 5_000, 20).unwrap().coverage;
    let large = estimate(&m, &SimOptions::default(), 20_000, 20).unwrap().coverage;
    let ratio = large.half_width_95 / small.half_width_95;
    assert!((ratio - 0.5).abs() < 0.1, "ratio {ratio}");
}
