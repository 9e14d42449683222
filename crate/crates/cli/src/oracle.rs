//! Cross-checks of the analytic engine against independent computations:
//! brute-force quadrature, finite differences, integral representations
//! and Monte-Carlo. Run by `uavnet selftest`.

use rayon::prelude::*;
use uavnet_core::analytic::{
    association_masses, interference_bounds, laplace_i0_scaled, laplace_ppp_scaled, laplace_total_scaled,
    no_service_probability, ServingClass, B0_FLOOR,
};
use uavnet_core::mcsim::{empirical_laplace_ppp, SimOptions};
use uavnet_core::quadrature::QuadratureSpec;
use uavnet_core::specfun::{gamma, gauss_2f1, Hyp2F1Args};
use uavnet_core::urban::{antenna_gain, los_breakpoints, los_probability, pathloss};
use uavnet_core::{ChannelType, Deployment, Model, Strategy};

use crate::sweep::monte_carlo;

/// Outcome of one oracle family.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl OracleCheck {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed-order Gauss-Legendre rule.
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    fn panel<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
    }

    /// Composite rule over `[a, b]` split at `breaks` and then into
    /// `panels` equal pieces.
    fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64, breaks: &[f64], panels: usize) -> f64 {
        if !(b > a) {
            return 0.0;
        }
        let mut edges = vec![a];
        edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
        edges.push(b);
        edges.sort_by(f64::total_cmp);
        edges
            .windows(2)
            .map(|w| {
                let step = (w[1] - w[0]) / panels as f64;
                (0..panels).map(|k| self.panel(f, w[0] + k as f64 * step, w[0] + (k + 1) as f64 * step)).sum::<f64>()
            })
            .sum()
    }
}

/// Deterministic low-discrepancy sample in `[0, 1)`.
fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    i += 1;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn model(height: f64, density_km2: f64, r_max: f64, strategy: Strategy) -> Model {
    Model::reference(Deployment::from_per_km2(height, density_km2, r_max, strategy).expect("valid deployment"))
}

fn tight_quad() -> QuadratureSpec {
    QuadratureSpec::new(1e-13, 1e-12, 2000).expect("valid tolerances")
}

/// A test point for the Laplace transforms: a serving UAV of type
/// `t_star` at `r_star` and the Laplace variable a user would evaluate
/// the transforms at for SINR threshold `theta`.
#[derive(Debug, Clone, Copy)]
struct LaplacePoint {
    model: Model,
    t_star: ChannelType,
    r_star: f64,
    s: f64,
}

fn laplace_point(i: usize) -> LaplacePoint {
    let heights = [40.0, 60.0, 100.0, 150.0, 200.0];
    let radii = [50.0, 100.0, 200.0];
    let m = model(
        heights[(halton(i, 2) * heights.len() as f64) as usize],
        [1.0, 5.0, 25.0][(halton(i, 7) * 3.0) as usize],
        radii[(halton(i, 3) * radii.len() as f64) as usize],
        Strategy::HotspotCenter,
    );
    let t_star = if i % 2 == 0 { ChannelType::Los } else { ChannelType::Nlos };
    let r_star = (0.02 + 0.96 * halton(i, 5)) * m.cone_radius();
    let theta = 10f64.powf(-1.0 + 2.0 * halton(i, 11));
    let mean_power = m.radio.peak_gain() * pathloss(r_star, m.height(), t_star.pathloss_exponent(&m.radio));
    let s = f64::from(t_star.fading_shape(&m.radio)) * theta / mean_power;
    LaplacePoint { model: m, t_star, r_star, s }
}

/// Laplace transform of the hotspot-UAV interference by direct quadrature
/// of `E[exp(-s I_0)]` over the UAV's distance and channel, conditioned
/// on it not out-powering the serving UAV.
fn i0_by_quadrature(p: &LaplacePoint, rule: &Rule) -> Option<f64> {
    let m = &p.model;
    let bounds = interference_bounds(p.t_star, p.r_star, m);
    let r_max = m.deployment.hotspot_radius_m;
    let u = m.cone_radius();
    let mut numerator = 0.0;
    let mut mass = 0.0;
    for ch in ChannelType::ALL {
        let c = bounds.get(ch);
        let mf = f64::from(ch.fading_shape(&m.radio));
        let alpha = ch.pathloss_exponent(&m.radio);
        let prob = |r: f64| {
            let pl = los_probability(r, &m.env, m.height());
            if ch == ChannelType::Los {
                pl
            } else {
                1.0 - pl
            }
        };
        let g = |r: f64| {
            let eta = antenna_gain(r, &m.radio, &m.deployment);
            (1.0 + eta * pathloss(r, m.height(), alpha) * p.s / mf).powf(-mf)
        };
        let mut breaks = los_breakpoints(&m.env, r_max);
        breaks.push(u);
        numerator += rule.integrate(&|r| 2.0 * prob(r) * g(r) * r, c, r_max, &breaks, 4);
        mass += rule.integrate(&|r| 2.0 * prob(r) * r, c, r_max, &breaks, 1);
    }
    let b0 = mass / (r_max * r_max);
    (b0 >= B0_FLOOR).then(|| numerator / mass)
}

/// Closed-form hotspot-UAV transform against brute-force quadrature at 50
/// points with a non-negligible hotspot interferer; 1e-6 relative.
pub fn closed_form_vs_quadrature() -> OracleCheck {
    let rule = Rule::new(32);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut i = 0;
    while checked < 50 && i < 5000 {
        let p = laplace_point(i);
        i += 1;
        let Some(expect) = i0_by_quadrature(&p, &rule) else { continue };
        let got = match laplace_i0_scaled(p.s, p.t_star, p.r_star, 0, &p.model) {
            Ok(v) => v[0],
            Err(e) => {
                failures.push(format!("point {i}: {e}"));
                checked += 1;
                continue;
            }
        };
        let rel = ((got - expect) / expect).abs();
        worst = worst.max(rel);
        if rel > 1e-6 {
            failures.push(format!("point {i}: closed form {got} vs quadrature {expect}"));
        }
        checked += 1;
    }
    let passed = checked == 50 && failures.is_empty();
    OracleCheck::new(
        "hotspot transform closed form vs quadrature",
        passed,
        format!("{checked} points, worst relative error {worst:.2e}{}", summarize_failures(&failures)),
    )
}

fn summarize_failures(f: &[String]) -> String {
    match f.first() {
        Some(first) => format!("; {} failures, first: {first}", f.len()),
        None => String::new(),
    }
}

/// Richardson-extrapolated central differences for the first and second
/// derivative, returned scaled by `s` and `s^2`.
fn finite_differences<F: Fn(f64) -> uavnet_core::Result<f64>>(f: F, s: f64) -> uavnet_core::Result<(f64, f64)> {
    let d = |h: f64| -> uavnet_core::Result<(f64, f64)> {
        let (fp, f0, fm) = (f(s + h)?, f(s)?, f(s - h)?);
        Ok(((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)))
    };
    let h = 0.02 * s;
    let (d1h, d2h) = d(h)?;
    let (d1q, d2q) = d(h / 2.0)?;
    let d1 = (4.0 * d1q - d1h) / 3.0;
    let d2 = (4.0 * d2q - d2h) / 3.0;
    Ok((s * d1, s * s * d2))
}

/// First and second derivatives of all three transforms and of the total
/// interference-plus-noise transform against finite differences at 20
/// points; 1e-4 relative, with an absolute floor at the roundoff level of
/// the differences.
pub fn derivatives_vs_finite_differences() -> OracleCheck {
    let quad = tight_quad();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut compared = 0;
    let mut errors = Vec::new();

    let mut check = |label: String, analytic: &[f64], fd: (f64, f64)| {
        let floor = 1e-9 * analytic[0].abs();
        for (order, (&a, f)) in analytic[1..].iter().zip([fd.0, fd.1]).enumerate() {
            let err = (a - f).abs();
            let tol = 1e-4 * a.abs() + floor;
            worst = worst.max(err / tol);
            compared += 1;
            if err > tol {
                failures.push(format!("{label} order {}: {a} vs {f}", order + 1));
            }
        }
    };

    for i in 0..20 {
        let p = laplace_point(1000 + i);
        let m = &p.model;
        let result: uavnet_core::Result<()> = (|| {
            let i0 = laplace_i0_scaled(p.s, p.t_star, p.r_star, 2, m)?;
            let fd = finite_differences(|s| Ok(laplace_i0_scaled(s, p.t_star, p.r_star, 0, m)?[0]), p.s)?;
            check(format!("point {i} I0"), &i0, fd);

            let bounds = interference_bounds(p.t_star, p.r_star, m);
            for ch in ChannelType::ALL {
                let c = bounds.get(ch);
                let ppp = laplace_ppp_scaled(ch, c, p.s, 2, m, &quad)?;
                let fd = finite_differences(|s| Ok(laplace_ppp_scaled(ch, c, s, 0, m, &quad)?[0]), p.s)?;
                check(format!("point {i} PPP {ch:?}"), &ppp, fd);
            }

            let serving = ServingClass::nearest(p.t_star);
            let total = laplace_total_scaled(2, p.s, serving, p.r_star, m, &quad)?;
            let fd = finite_differences(|s| Ok(laplace_total_scaled(0, s, serving, p.r_star, m, &quad)?[0]), p.s)?;
            check(format!("point {i} total"), &total, fd);
            Ok(())
        })();
        if let Err(e) = result {
            errors.push(format!("point {i}: {e}"));
        }
    }
    failures.extend(errors);
    OracleCheck::new(
        "Laplace derivatives vs finite differences",
        failures.is_empty(),
        format!(
            "20 points, {compared} derivatives, worst error {worst:.2} x tolerance{}",
            summarize_failures(&failures)
        ),
    )
}

/// Every transform equals 1 at `s = 0`.
pub fn transforms_at_zero() -> OracleCheck {
    let quad = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..30 {
        let p = laplace_point(2000 + i);
        let m = &p.model;
        let bounds = interference_bounds(p.t_star, p.r_star, m);
        let serving = ServingClass::nearest(p.t_star);
        let values = (|| -> uavnet_core::Result<[f64; 4]> {
            Ok([
                laplace_i0_scaled(0.0, p.t_star, p.r_star, 0, m)?[0],
                laplace_ppp_scaled(ChannelType::Los, bounds.c_los, 0.0, 0, m, &quad)?[0],
                laplace_ppp_scaled(ChannelType::Nlos, bounds.c_nlos, 0.0, 0, m, &quad)?[0],
                laplace_total_scaled(0, 0.0, serving, p.r_star, m, &quad)?[0],
            ])
        })();
        match values {
            Ok(v) => {
                for x in v {
                    worst = worst.max((x - 1.0).abs());
                }
            }
            Err(e) => failures.push(format!("point {i}: {e}")),
        }
    }
    let passed = failures.is_empty() && worst <= 1e-9;
    OracleCheck::new(
        "transforms equal one at s = 0",
        passed,
        format!("30 points, worst |L(0) - 1| = {worst:.2e}{}", summarize_failures(&failures)),
    )
}

/// Poisson-field transform against the empirical Laplace functional of
/// simulated interference, 10^5 realizations at 5 points, 3 standard errors.
pub fn ppp_vs_empirical_laplace() -> OracleCheck {
    let quad = QuadratureSpec::default();
    let cases = [
        (100.0, 5.0, ChannelType::Los, 0.0, 60.0),
        (100.0, 25.0, ChannelType::Los, 80.0, 150.0),
        (60.0, 25.0, ChannelType::Nlos, 0.0, 100.0),
        (150.0, 10.0, ChannelType::Nlos, 50.0, 150.0),
        (200.0, 25.0, ChannelType::Los, 150.0, 250.0),
    ];
    let results: Vec<String> = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(h, lambda, ch, c, ref_r))| {
            let m = model(h, lambda, 100.0, Strategy::UniformPpp);
            // s of a link of the same type at ref_r with a 0 dB threshold
            let s = 1.0 / (m.radio.peak_gain() * pathloss(ref_r, h, ch.pathloss_exponent(&m.radio)));
            let analytic = match laplace_ppp_scaled(ch, c, s, 0, &m, &quad) {
                Ok(v) => v[0],
                Err(e) => return format!("FAIL case {i}: {e}"),
            };
            let emp = match empirical_laplace_ppp(&m, ch, c, s, 100_000, 0x5eed + i as u64) {
                Ok(e) => e,
                Err(e) => return format!("FAIL case {i}: {e}"),
            };
            let se = emp.half_width_95 / 1.96;
            let z = (analytic - emp.mean).abs() / se;
            let tag = if z <= 3.0 { "ok" } else { "FAIL" };
            format!("{tag} case {i}: analytic {analytic:.5}, empirical {:.5} ({z:.2} SE)", emp.mean)
        })
        .collect();
    let passed = results.iter().all(|r| r.starts_with("ok"));
    OracleCheck::new("Poisson-field transform vs empirical Laplace functional", passed, results.join("; "))
}

/// `2F1(a, b; c; z)` from its Euler integral after the substitution
/// `t = x^(1/b)`, which removes the singularity at zero:
/// `Gamma(c) / (Gamma(b+1) Gamma(c-b)) int_0^1 (1 - x^(1/b))^(c-b-1) (1 - z x^(1/b))^(-a) dx`.
/// Needs `c > b > 0`. Panels shrink geometrically toward zero, where the
/// integrand changes scale when `|z|` is large, and toward one, where
/// `(1 - t)^(c-b-1)` is not smooth unless `c - b` is an integer.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64, rule: &Rule) -> f64 {
    let f = |x: f64| {
        let t = x.powf(1.0 / b);
        (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a)
    };
    let mut total = 0.0;
    let mut hi = 0.5;
    while hi > 1e-80 {
        let lo = hi * 0.25;
        total += rule.panel(&f, lo, hi);
        hi = lo;
    }
    let mut gap = 0.5;
    while gap > 1e-30 {
        let next = gap * 0.25;
        total += rule.panel(&f, 1.0 - gap, 1.0 - next);
        gap = next;
    }
    gamma(c) / (gamma(b + 1.0) * gamma(c - b)) * total
}

/// Hypergeometric evaluation against the Euler integral over
/// `z in [-1e6, 0]` for every parameter family the model uses; 1e-8
/// relative.
pub fn hyp2f1_vs_euler_integral() -> OracleCheck {
    let rule = Rule::new(24);
    let mut zs: Vec<f64> = (0..=72).map(|k| -(10f64.powf(-6.0 + k as f64 / 6.0))).collect();
    zs.extend([0.0, -0.5, -0.5 - 1e-12, -2.0, -2.0 - 1e-12, -1.0, -1e6]);
    let mut params = Vec::new();
    for alpha in [2.0, 2.1, 3.0, 4.0] {
        let beta = 2.0 / alpha;
        for k in 1..=5 {
            for p in 0..=2 {
                let pf = f64::from(p);
                params.push((f64::from(k) + pf, beta + pf, 1.0 + beta + pf));
            }
        }
    }
    params.push((2.0, 0.3, 2.7));
    params.push((1.5, 1.2, 4.0));

    let outcomes: Vec<(f64, Vec<String>)> = params
        .par_iter()
        .map(|&(a, b, c)| {
            let mut worst: f64 = 0.0;
            let mut failures = Vec::new();
            for &z in &zs {
                let expect = hyp2f1_euler(a, b, c, z, &rule);
                match gauss_2f1(Hyp2F1Args::new(a, b, c, z)) {
                    Ok(got) => {
                        let rel = ((got - expect) / expect).abs();
                        worst = worst.max(rel);
                        if rel > 1e-8 {
                            failures.push(format!("2F1({a}, {b}; {c}; {z}) = {got} vs integral {expect}"));
                        }
                    }
                    Err(e) => failures.push(format!("2F1({a}, {b}; {c}; {z}): {e}")),
                }
            }
            (worst, failures)
        })
        .collect();
    let worst = outcomes.iter().map(|o| o.0).fold(0.0, f64::max);
    let failures: Vec<String> = outcomes.into_iter().flat_map(|o| o.1).collect();
    OracleCheck::new(
        "2F1 vs Euler integral",
        failures.is_empty(),
        format!(
            "{} parameter sets x {} arguments, worst relative error {worst:.2e}{}",
            params.len(),
            zs.len(),
            summarize_failures(&failures)
        ),
    )
}

/// Monte-Carlo association-class frequencies against the analytic class
/// masses, 3 standard errors. The standard error is the larger of the
/// sample one and the binomial one implied by the analytic mass, so that
/// rare classes with no hits are still judged.
pub fn class_frequencies_vs_masses() -> OracleCheck {
    const TRIALS: usize = 40_000;
    let quad = QuadratureSpec::default();
    let cases = [
        (100.0, 5.0, Strategy::HotspotCenter),
        (60.0, 25.0, Strategy::HotspotCenter),
        (200.0, 1.0, Strategy::HotspotCenter),
        (100.0, 5.0, Strategy::UniformPpp),
        (40.0, 10.0, Strategy::UniformPpp),
    ];
    let mut lines = Vec::new();
    let mut passed = true;
    for (i, &(h, lambda, strategy)) in cases.iter().enumerate() {
        let m = model(h, lambda, 100.0, strategy);
        let masses = match association_masses(&m, &quad) {
            Ok(v) => v,
            Err(e) => {
                passed = false;
                lines.push(format!("case {i}: {e}"));
                continue;
            }
        };
        let summary = match monte_carlo(&m, &SimOptions::default(), TRIALS, 0xc1a55 + i as u64) {
            Ok(s) => s,
            Err(e) => {
                passed = false;
                lines.push(format!("case {i}: {e}"));
                continue;
            }
        };
        let mut expected: Vec<(Option<ServingClass>, f64)> = masses.into_iter().map(|(c, v)| (Some(c), v)).collect();
        expected.push((None, no_service_probability(&m)));
        let mut worst_z: f64 = 0.0;
        for (class, mass) in expected {
            let est = summary.class(class);
            let binomial = (mass * (1.0 - mass) / TRIALS as f64).sqrt();
            let se = (est.half_width_95 / 1.96).max(binomial);
            let z = if se > 0.0 { (est.mean - mass).abs() / se } else { 0.0 };
            worst_z = worst_z.max(z);
            if z > 3.0 {
                passed = false;
                let label = class.map_or("none", ServingClass::label);
                lines.push(format!("case {i} class {label}: MC {:.4} vs analytic {mass:.4}", est.mean));
            }
        }
        lines.push(format!(
            "case {i} ({}, {h} m, {lambda}/km2): worst {worst_z:.2} SE",
            crate::config::strategy_name(strategy)
        ));
    }
    OracleCheck::new("MC class frequencies vs analytic masses", passed, lines.join("; "))
}

/// Runs every oracle family, concurrently, in a fixed order.
pub fn run_all() -> Vec<OracleCheck> {
    let checks: [fn() -> OracleCheck; 6] = [
        closed_form_vs_quadrature,
        derivatives_vs_finite_differences,
        transforms_at_zero,
        ppp_vs_empirical_laplace,
        hyp2f1_vs_euler_integral,
        class_frequencies_vs_masses,
    ];
    checks.par_iter().map(|f| f()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = Rule::new(8);
        let v = rule.panel(&|x: f64| x.powi(15) + 3.0 * x * x, 0.0, 2.0);
        assert!((v - (2f64.powi(16) / 16.0 + 8.0)).abs() < 1e-10);
        let (_, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn euler_integral_reproduces_elementary_case() {
        // 2F1(1, 1; 2; z) = -ln(1 - z) / z
        let rule = Rule::new(24);
        for z in [-0.3, -5.0, -1e4] {
            let v = hyp2f1_euler(1.0, 1.0, 2.0, z, &rule);
            assert!((v - (-(1.0 - z).ln() / z)).abs() < 1e-12 * v.abs());
        }
    }

    #[test]
    fn halton_is_in_unit_interval() {
        assert!((0..100).all(|i| (0.0..1.0).contains(&halton(i, 3))));
    }
}
