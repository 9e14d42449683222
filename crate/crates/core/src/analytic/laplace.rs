//! Laplace transforms of the interference components and their derivatives.
//!
//! Derivatives are carried internally in *scaled* form, `t^k L^(k)(s)` with
//! `t = s` for `s > 0` (and `t = 1` at `s = 0`). The coverage integrand only
//! ever needs `s^k L^(k)(s)`, and the scaled quantities are dimensionless,
//! so one set of quadrature tolerances fits every order.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{exp, expm1, log1p, pow};

use super::association::{prob_b0_for_bounds, InterferenceBounds, ServingClass};
use super::interference_bounds;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::specfun::{binomial, factorial, gauss_2f1, gauss_2f1_param_deriv, pochhammer, Hyp2F1Args};
use crate::urban::{antenna_gain, pathloss, plateaus, weighted_area, ChannelType, Model, Strategy};
use crate::{Error, Result};

/// `B_0` below which the hotspot UAV is treated as never interfering.
pub const B0_FLOOR: f64 = 1e-12;

fn derivative_scale(s: f64) -> f64 {
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("Laplace variable must be finite and nonnegative"))
    }
}

fn unscale(scaled: f64, s: f64, order: u32) -> f64 {
    scaled / pow(derivative_scale(s), f64::from(order))
}

/// Nakagami fading kernel `E[exp(-s eta H l(r0))] = (1 + eta l s / m)^-m`
/// of a single UAV at horizontal distance `r0`.
pub fn g_kernel(r0: f64, s: f64, channel: ChannelType, model: &Model) -> f64 {
    g_kernel_deriv(0, r0, s, channel, model)
}

/// `p`-th derivative in `s` of [`g_kernel`]:
/// `(-c)^p (m)_p (1 + c s)^(-m-p)` with `c = eta l / m`.
pub fn g_kernel_deriv(p: u32, r0: f64, s: f64, channel: ChannelType, model: &Model) -> f64 {
    let eta = antenna_gain(r0, &model.radio, &model.deployment);
    let m = channel.fading_shape(&model.radio);
    let c = eta * pathloss(r0, model.height(), channel.pathloss_exponent(&model.radio)) / f64::from(m);
    if c == 0.0 {
        return if p == 0 { 1.0 } else { 0.0 };
    }
    pow(-c, f64::from(p)) * pochhammer(f64::from(m), p) * pow(1.0 + c * s, -(f64::from(m) + f64::from(p)))
}

/// `t^p` times the `p`-th derivative of the PGFL exponent of the thinned
/// Poisson field of `channel` UAVs beyond radius `c`:
/// `F(s) = -2 pi integral_c^u (1 - g) lambda_j r dr`.
fn ppp_exponent_scaled(
    channel: ChannelType,
    c: f64,
    s: f64,
    p: u32,
    model: &Model,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let u = model.cone_radius();
    let lambda = model.deployment.density_per_m2;
    let gamma = model.height();
    let eta = model.radio.peak_gain();
    let m = f64::from(channel.fading_shape(&model.radio));
    let alpha = channel.pathloss_exponent(&model.radio);
    let t = derivative_scale(s);
    let rising = pochhammer(m, p);
    let pf = f64::from(p);

    let kernel = |r: f64| {
        let c_r = eta * pathloss(r, gamma, alpha) / m;
        let x = c_r * s;
        if p == 0 {
            // 1 - g, accurate for small x
            -expm1(-m * log1p(x)) * r
        } else {
            pow(-c_r * t, pf) * rising * pow(1.0 + x, -(m + pf)) * r
        }
    };

    let mut total = 0.0;
    for plateau in plateaus(&model.env, c.max(0.0), u) {
        let weight = channel.probability_for_crossings(plateau.crossings, &model.env, gamma);
        if weight == 0.0 {
            continue;
        }
        total += weight * integrate(kernel, plateau.lower, plateau.upper, quad)?;
    }
    let sign = if p == 0 { -1.0 } else { 1.0 };
    Ok(sign * 2.0 * PI * lambda * total)
}

/// Scaled derivatives `t^k L^(k)(s)`, `k = 0..=n`, of the Laplace transform
/// of interference from the `channel` Poisson field beyond radius `c`.
pub fn laplace_ppp_scaled(
    channel: ChannelType,
    c: f64,
    s: f64,
    n: u32,
    model: &Model,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    check_s(s)?;
    let mut out = vec![0.0; n as usize + 1];
    if c >= model.cone_radius() {
        out[0] = 1.0;
        return Ok(out);
    }
    let exponent: Vec<f64> =
        (0..=n).map(|p| ppp_exponent_scaled(channel, c, s, p, model, quad)).collect::<Result<_>>()?;
    out[0] = exp(exponent[0]);
    // L = exp(F)  =>  L^(n) = sum_k C(n-1, k) F^(n-k) L^(k)
    for order in 1..=n {
        out[order as usize] =
            (0..order).map(|k| binomial(order - 1, k) * exponent[(order - k) as usize] * out[k as usize]).sum();
    }
    Ok(out)
}

/// Laplace transform of the interference from the `channel` Poisson field
/// outside the exclusion radius given by `bounds`.
pub fn laplace_ppp(
    s: f64,
    channel: ChannelType,
    bounds: &InterferenceBounds,
    model: &Model,
    quad: &QuadratureSpec,
) -> Result<f64> {
    Ok(laplace_ppp_scaled(channel, bounds.get(channel), s, 0, model, quad)?[0])
}

/// `n`-th derivative in `s` of [`laplace_ppp`].
pub fn laplace_ppp_deriv(
    n: u32,
    s: f64,
    channel: ChannelType,
    bounds: &InterferenceBounds,
    model: &Model,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let scaled = laplace_ppp_scaled(channel, bounds.get(channel), s, n, model, quad)?;
    Ok(unscale(scaled[n as usize], s, n))
}

/// `s^i d^i/ds^i [b 2F1(k, beta; 1+beta; z(s))]` with `z = -A/s`, written
/// in terms of `z`, which is all it depends on. Composite-function
/// derivative: the chain coefficients for `z = -A/s` are
/// `s^i U_p = (-1)^i z^p sum_{a<p} (-1)^a C(p,a) (p-a)_i`.
fn f_scaled_deriv(k: u32, beta: f64, b: f64, z: f64, i: u32) -> Result<f64> {
    let args = Hyp2F1Args::new(f64::from(k), beta, 1.0 + beta, z);
    if i == 0 {
        return Ok(b * gauss_2f1(args)?);
    }
    let sign_i = if i % 2 == 0 { 1.0 } else { -1.0 };
    let mut total = 0.0;
    for p in 1..=i {
        let chain: f64 = (0..p)
            .map(|a| {
                let sign_a = if a % 2 == 0 { 1.0 } else { -1.0 };
                sign_a * binomial(p, a) * pochhammer(f64::from(p - a), i)
            })
            .sum();
        let u_scaled = sign_i * pow(z, f64::from(p)) * chain;
        total += u_scaled / factorial(p) * gauss_2f1_param_deriv(args, p)?;
    }
    Ok(b * total)
}

/// Scaled derivatives `t^i L_{I_0}^(i)(s)`, `i = 0..=n`, of the Laplace
/// transform of interference from the hotspot UAV when it is not serving.
pub fn laplace_i0_scaled(s: f64, t_star: ChannelType, r_star: f64, n: u32, model: &Model) -> Result<Vec<f64>> {
    check_s(s)?;
    let bounds = interference_bounds(t_star, r_star, model);
    let b0 = prob_b0_for_bounds(&bounds, model);
    let mut out = vec![0.0; n as usize + 1];
    if b0 < B0_FLOOR {
        out[0] = 1.0;
        return Ok(out);
    }

    let gamma = model.height();
    let g2 = gamma * gamma;
    let r_max = model.deployment.hotspot_radius_m;
    let u = model.cone_radius();
    let eta = model.radio.peak_gain();
    let inner_edge = r_max.min(u);

    for channel in ChannelType::ALL {
        let c = bounds.get(channel);
        let m = channel.fading_shape(&model.radio);
        let mf = f64::from(m);
        let alpha = channel.pathloss_exponent(&model.radio);
        let beta = 2.0 / alpha;

        for plateau in plateaus(&model.env, c, inner_edge) {
            let weight = channel.probability_for_crossings(plateau.crossings, &model.env, gamma);
            if weight == 0.0 {
                continue;
            }
            let (lo, hi) = (plateau.lower, plateau.upper);
            let b_hi = hi * hi + g2;
            let b_lo = lo * lo + g2;
            if s == 0.0 {
                // g = 1 at s = 0; its derivatives integrate in closed form
                out[0] += weight * (hi * hi - lo * lo);
                for i in 1..=n {
                    let fi = f64::from(i);
                    let power = 1.0 - alpha * fi / 2.0;
                    let radial = (pow(b_hi, power) - pow(b_lo, power)) / (2.0 * power);
                    out[i as usize] += weight * 2.0 * pow(-eta / mf, fi) * pochhammer(mf, i) * radial;
                }
                continue;
            }
            let z_of = |b: f64| -mf * pow(b, alpha / 2.0) / (eta * s);
            let (z_hi, z_lo) = (z_of(b_hi), z_of(b_lo));
            out[0] += weight * (hi * hi - lo * lo);
            for i in 0..=n {
                let mut acc = 0.0;
                for k in 1..=m {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let diff = f_scaled_deriv(k, beta, b_hi, z_hi, i)? - f_scaled_deriv(k, beta, b_lo, z_lo, i)?;
                    acc += binomial(m, k) * sign * diff;
                }
                out[i as usize] += weight * acc;
            }
        }

        // hotspot UAV outside the cone: no gain, contributes g = 1
        let tail_start = c.max(u);
        if r_max > tail_start {
            out[0] += weighted_area(&model.env, gamma, channel, tail_start, r_max);
        }
    }

    let norm = r_max * r_max * b0;
    for v in &mut out {
        *v /= norm;
    }
    Ok(out)
}

/// Laplace transform of the hotspot-UAV interference when the user is
/// served by a UAV of type `t_star` at `r_star` from the Poisson field.
pub fn laplace_i0(s: f64, t_star: ChannelType, r_star: f64, model: &Model) -> Result<f64> {
    Ok(laplace_i0_scaled(s, t_star, r_star, 0, model)?[0])
}

/// `i`-th derivative in `s` of [`laplace_i0`].
pub fn laplace_i0_deriv(i: u32, s: f64, t_star: ChannelType, r_star: f64, model: &Model) -> Result<f64> {
    let scaled = laplace_i0_scaled(s, t_star, r_star, i, model)?;
    Ok(unscale(scaled[i as usize], s, i))
}

/// Scaled derivatives of `exp(-s sigma^2)`.
fn noise_scaled(s: f64, n: u32, noise_w: f64) -> Vec<f64> {
    let t = derivative_scale(s);
    let base = exp(-s * noise_w);
    (0..=n).map(|i| pow(-t * noise_w, f64::from(i)) * base).collect()
}

/// Scaled derivatives `t^k L_{I+sigma^2}^(k)(s)`, `k = 0..=n`, of the
/// Laplace transform of interference plus noise seen by a user served by
/// `serving` at `r_star`.
pub fn laplace_total_scaled(
    n: u32,
    s: f64,
    serving: ServingClass,
    r_star: f64,
    model: &Model,
    quad: &QuadratureSpec,
) -> Result<Vec<f64>> {
    check_s(s)?;
    let t_star = serving.channel();
    let bounds = interference_bounds(t_star, r_star, model);
    let los = laplace_ppp_scaled(ChannelType::Los, bounds.c_los, s, n, model, quad)?;
    let nlos = laplace_ppp_scaled(ChannelType::Nlos, bounds.c_nlos, s, n, model, quad)?;
    let hotspot = if !serving.is_hotspot() && model.deployment.strategy == Strategy::HotspotCenter {
        laplace_i0_scaled(s, t_star, r_star, n, model)?
    } else {
        let mut v = vec![0.0; n as usize + 1];
        v[0] = 1.0;
        v
    };
    let noise = noise_scaled(s, n, model.radio.noise_w);

    // general Leibniz rule over the four independent factors
    let mut out = vec![0.0; n as usize + 1];
    for k in 0..=n {
        let kf = factorial(k);
        let mut acc = 0.0;
        for i0 in 0..=k {
            for il in 0..=k - i0 {
                for inl in 0..=k - i0 - il {
                    let is = k - i0 - il - inl;
                    let coeff = kf / (factorial(i0) * factorial(il) * factorial(inl) * factorial(is));
                    acc += coeff * hotspot[i0 as usize] * los[il as usize] * nlos[inl as usize] * noise[is as usize];
                }
            }
        }
        out[k as usize] = acc;
    }
    Ok(out)
}

/// `k`-th derivative in `s` of the Laplace transform of interference plus
/// noise.
pub fn laplace_total_deriv(
    k: u32,
    s: f64,
    serving: ServingClass,
    r_star: f64,
    model: &Model,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let scaled = laplace_total_scaled(k, s, serving, r_star, model, quad)?;
    Ok(unscale(scaled[k as usize], s, k))
}
