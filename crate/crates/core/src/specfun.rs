//! Special functions used by the analytic model.
//!
//! Every hypergeometric call site in this crate has a real, nonpositive
//! argument and an integer first parameter, so [`gauss_2f1`] only covers
//! `z <= 0`. Three evaluation regimes are used:
//!
//! * `-0.5 <= z <= 0`: the defining power series.
//! * `-2 <= z < -0.5`: the Pfaff transformation
//!   `2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))`, which maps the
//!   argument into `[1/3, 2/3]`.
//! * `z < -2`: the `z -> 1/z` connection formula, whose series argument
//!   lies in `(-1/2, 0)`. It needs `a - b` to be a non-integer; when it is
//!   an integer the Pfaff series is used instead and may run out of terms.

use libm::{exp, fabs, floor, pow, tgamma};

use crate::{Error, Result};

/// Relative size of the last series term at which summation stops.
const SERIES_TOL: f64 = 1e-16;
/// Term budget for a single power series.
const SERIES_MAX_TERMS: usize = 10_000;

/// Perturbation of `b` used when `a - b` is an integer and `|z|` is large.
const INVERSION_LIMIT_STEP: f64 = 1e-4;

/// Arguments of the Gauss hypergeometric function `2F1(a, b; c; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Args {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

impl Hyp2F1Args {
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }

    /// The same function with every parameter shifted up by `p`.
    fn shifted(self, p: u32) -> Self {
        let p = f64::from(p);
        Self { a: self.a + p, b: self.b + p, c: self.c + p, z: self.z }
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && floor(x) == x
}

fn is_integer(x: f64) -> bool {
    floor(x) == x
}

/// `1 / Gamma(x)`, which is zero at the poles of the gamma function.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / tgamma(x)
    }
}

/// Euler's gamma function.
pub fn gamma(x: f64) -> f64 {
    tgamma(x)
}

/// Rising factorial `x (x+1) ... (x+n-1)`, equal to 1 for `n = 0`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x + f64::from(i)))
}

/// Binomial coefficient `n choose k` as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

/// Regularized upper incomplete gamma function `Gamma(m, x) / Gamma(m)` for
/// integer `m >= 1`, via the finite sum `exp(-x) sum_{k<m} x^k / k!`.
pub fn upper_gamma_ratio(m: u32, x: f64) -> f64 {
    debug_assert!(m >= 1);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= x / f64::from(k);
        sum += term;
    }
    exp(-x) * sum
}

/// Plain power series; `z` must satisfy `|z| < 1`.
fn series(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if fabs(term) <= SERIES_TOL * fabs(sum) {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNonConvergence { a, b, c, z })
}

fn pfaff(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    let w = z / (z - 1.0);
    let inner = series(Hyp2F1Args::new(a, c - b, c, w)).map_err(|_| Error::SeriesNonConvergence { a, b, c, z })?;
    Ok(pow(1.0 - z, -a) * inner)
}

/// Connection formula around `z = infinity`, valid for `z < 0` and
/// non-integer `a - b`.
fn inversion(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, c, z } = args;
    let w = 1.0 / z;
    let err = |_| Error::SeriesNonConvergence { a, b, c, z };
    let gc = gamma(c);

    let coeff_a = gc * gamma(b - a) * recip_gamma(b) * recip_gamma(c - a);
    let coeff_b = gc * gamma(a - b) * recip_gamma(a) * recip_gamma(c - b);

    let term_a = if coeff_a == 0.0 {
        0.0
    } else {
        coeff_a * pow(-z, -a) * series(Hyp2F1Args::new(a, a - c + 1.0, a - b + 1.0, w)).map_err(err)?
    };
    let term_b = if coeff_b == 0.0 {
        0.0
    } else {
        coeff_b * pow(-z, -b) * series(Hyp2F1Args::new(b, b - c + 1.0, b - a + 1.0, w)).map_err(err)?
    };
    Ok(term_a + term_b)
}

/// Connection formula in the limit of integer `a - b`, where both of its
/// terms diverge. The symmetric perturbation `b -> b +- eps` cancels the
/// odd error terms, and Richardson extrapolation over `eps, 2 eps` the
/// quadratic one.
fn inversion_limit(args: Hyp2F1Args) -> Result<f64> {
    let eps = INVERSION_LIMIT_STEP;
    let sym = |e: f64| -> Result<f64> {
        let up = inversion(Hyp2F1Args { b: args.b + e, ..args })?;
        let down = inversion(Hyp2F1Args { b: args.b - e, ..args })?;
        Ok(0.5 * (up + down))
    };
    Ok((4.0 * sym(eps)? - sym(2.0 * eps)?) / 3.0)
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z <= 0`.
pub fn gauss_2f1(args: Hyp2F1Args) -> Result<f64> {
    if is_nonpositive_integer(args.c) {
        return Err(Error::InvalidArgument("2F1 parameter c is a nonpositive integer"));
    }
    if !(args.z <= 0.0) {
        return Err(Error::InvalidArgument("2F1 is only implemented for z <= 0"));
    }
    let z = args.z;
    if z == 0.0 {
        Ok(1.0)
    } else if z >= -0.5 {
        series(args)
    } else if z >= -2.0 {
        pfaff(args)
    } else if is_integer(args.a - args.b) {
        inversion_limit(args)
    } else {
        inversion(args)
    }
}

/// `p`-th derivative of `2F1(a, b; c; z)` with respect to `z`:
/// `(a)_p (b)_p / (c)_p * 2F1(a+p, b+p; c+p; z)`.
pub fn gauss_2f1_param_deriv(args: Hyp2F1Args, p: u32) -> Result<f64> {
    if p == 0 {
        return gauss_2f1(args);
    }
    let prefactor = pochhammer(args.a, p) * pochhammer(args.b, p) / pochhammer(args.c, p);
    Ok(prefactor * gauss_2f1(args.shifted(p))?)
}
