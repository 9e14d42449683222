use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{ceil, cos, floor, round, sin, sqrt};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::kmeans::kmeans_centroids;
use crate::urban::{los_probability, ChannelType, Model, Strategy};
use crate::{Error, Result};

/// A point on the ground plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        Self { x: r * cos(angle), y: r * sin(angle) }
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.x * self.x + self.y * self.y)
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Knobs of the simulator that the model itself leaves open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Simulation window radius as a multiple of `u(omega, gamma) + r_max`.
    pub window_scale: f64,
    /// Users drawn per hotspot as input to K-means placement.
    pub users_per_hotspot: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { window_scale: 1.0, users_per_hotspot: 10 }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.window_scale >= 1.0) {
            return Err(Error::InvalidParameter("window scale must be at least 1"));
        }
        if self.users_per_hotspot == 0 {
            return Err(Error::InvalidParameter("users per hotspot must be positive"));
        }
        Ok(())
    }

    pub fn window_radius(&self, model: &Model) -> f64 {
        self.window_scale * (model.cone_radius() + model.deployment.hotspot_radius_m)
    }
}

/// One realization of hotspots, users and UAVs around the typical user,
/// who sits at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Hotspot centers; index 0 is the typical user's own hotspot.
    pub hotspot_centers: Vec<Point>,
    /// Users fed to K-means, starting with the typical user. Empty for
    /// placements that ignore user positions.
    pub users: Vec<Point>,
    pub uav_positions: Vec<Point>,
    pub channel_types: Vec<ChannelType>,
    /// Index of the UAV above the typical user's hotspot, if any.
    pub hotspot_uav: Option<usize>,
    pub window_radius: f64,
}

impl Scenario {
    pub fn reference_user(&self) -> Point {
        Point::ORIGIN
    }
}

fn uniform_in_disk<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * sqrt(rng.random::<f64>());
    let p = Point::polar(r, 2.0 * PI * rng.random::<f64>());
    Point::new(center.x + p.x, center.y + p.y)
}

fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as usize,
        Err(_) => 0,
    }
}

/// Homogeneous Poisson points of the given intensity in a disk about the origin.
pub fn poisson_disk<R: Rng + ?Sized>(rng: &mut R, intensity: f64, radius: f64) -> Vec<Point> {
    let n = poisson_count(rng, intensity * PI * radius * radius);
    (0..n).map(|_| uniform_in_disk(rng, Point::ORIGIN, radius)).collect()
}

/// Square lattice with the given spacing and a uniformly random offset,
/// clipped to a disk about the origin.
pub fn shifted_grid<R: Rng + ?Sized>(rng: &mut R, spacing: f64, radius: f64) -> Vec<Point> {
    let ox = spacing * rng.random::<f64>();
    let oy = spacing * rng.random::<f64>();
    let lo = floor((-radius - ox) / spacing) as i64;
    let hi = ceil((radius - ox) / spacing) as i64;
    let lo_y = floor((-radius - oy) / spacing) as i64;
    let hi_y = ceil((radius - oy) / spacing) as i64;
    let r2 = radius * radius;
    let mut out = Vec::new();
    for i in lo..=hi {
        for j in lo_y..=hi_y {
            let p = Point::new(ox + i as f64 * spacing, oy + j as f64 * spacing);
            if p.x * p.x + p.y * p.y <= r2 {
                out.push(p);
            }
        }
    }
    out
}

/// Draws the hotspots, users and UAVs seen by the typical user.
///
/// The typical user's hotspot center is placed so that the user is uniform
/// in its disk; the remaining centers form a Poisson field over the
/// simulation window. UAVs then follow the placement strategy, and each
/// UAV draws its channel state independently from the LOS model.
pub fn sample_typical_scenario<R: Rng + ?Sized>(model: &Model, opts: &SimOptions, rng: &mut R) -> Result<Scenario> {
    let dep = &model.deployment;
    let lambda = dep.density_per_m2;
    let r_max = dep.hotspot_radius_m;
    let window = opts.window_radius(model);

    let own = uniform_in_disk(rng, Point::ORIGIN, r_max);
    let mut hotspot_centers = Vec::with_capacity(8);
    hotspot_centers.push(own);
    hotspot_centers.extend(poisson_disk(rng, lambda, window));

    let mut users = Vec::new();
    let (uav_positions, hotspot_uav) = match dep.strategy {
        Strategy::HotspotCenter => (hotspot_centers.clone(), Some(0)),
        Strategy::UniformPpp => (poisson_disk(rng, lambda, window), None),
        Strategy::RectGrid => (shifted_grid(rng, 1.0 / sqrt(lambda), window), None),
        Strategy::KMeans => {
            users.push(Point::ORIGIN);
            for (i, &center) in hotspot_centers.iter().enumerate() {
                let extra = if i == 0 { opts.users_per_hotspot - 1 } else { opts.users_per_hotspot };
                users.extend((0..extra).map(|_| uniform_in_disk(rng, center, r_max)));
            }
            let k = (round(lambda * PI * window * window) as usize).clamp(1, users.len());
            (kmeans_centroids(&users, k, rng)?, None)
        }
    };

    let height = model.height();
    let channel_types = uav_positions
        .iter()
        .map(|p| {
            if rng.random::<f64>() < los_probability(p.norm(), &model.env, height) {
                ChannelType::Los
            } else {
                ChannelType::Nlos
            }
        })
        .collect();

    Ok(Scenario { hotspot_centers, users, uav_positions, channel_types, hotspot_uav, window_radius: window })
}
