//! Adaptive 21-point Gauss-Kronrod quadrature.
//!
//! The radial integrands of the model are smooth between the LOS steps and
//! the exclusion radii, so callers hand [`integrate_piecewise`] the list of
//! known discontinuities and each smooth piece is integrated separately.

use alloc::vec::Vec;
use libm::fabs;

use crate::{Error, Result};

/// Tolerances and subdivision budget for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-8, rel_tol: 1e-8, max_subdivisions: 200 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) || max_subdivisions == 0 {
            return Err(Error::InvalidParameter("quadrature tolerances must be positive"));
        }
        Ok(Self { abs_tol, rel_tol, max_subdivisions })
    }
}

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_191_208,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Clone, Copy)]
struct Segment {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, lower: f64, upper: f64) -> Segment {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Segment { lower, upper, value: kronrod * half, error: fabs((kronrod - gauss) * half) }
}

/// Integrates `f` over `[lower, upper]` by bisecting the interval with the
/// largest error estimate until the total estimate meets the tolerance.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, lower: f64, upper: f64, spec: &QuadratureSpec) -> Result<f64> {
    if lower == upper {
        return Ok(0.0);
    }
    if upper < lower {
        return integrate(f, upper, lower, spec).map(|v| -v);
    }
    let mut segments: Vec<Segment> = Vec::with_capacity(16);
    segments.push(gauss_kronrod(&mut f, lower, upper));
    loop {
        let (value, error) = segments.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = spec.abs_tol.max(spec.rel_tol * fabs(value));
        if error <= target {
            return Ok(value);
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence { lower, upper, error });
        }
        let worst =
            segments.iter().enumerate().max_by(|a, b| a.1.error.total_cmp(&b.1.error)).map(|(i, _)| i).unwrap_or(0);
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lower + seg.upper);
        if mid <= seg.lower || mid >= seg.upper {
            // interval collapsed to adjacent floats; nothing left to refine
            return Err(Error::QuadratureNonConvergence { lower, upper, error });
        }
        segments.push(gauss_kronrod(&mut f, seg.lower, mid));
        segments.push(gauss_kronrod(&mut f, mid, seg.upper));
    }
}

/// Integrates over `[lower, upper]`, splitting at every interior point of
/// `breaks`. The break list need not be sorted or restricted to the range.
pub fn integrate_piecewise<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    upper: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if upper <= lower {
        return Ok(0.0);
    }
    let edges = split_points(lower, upper, breaks);
    let mut total = 0.0;
    for pair in edges.windows(2) {
        total += integrate(&mut f, pair[0], pair[1], spec)?;
    }
    Ok(total)
}

/// Sorted, de-duplicated `[lower, interior breaks..., upper]`.
pub fn split_points(lower: f64, upper: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    edges.push(lower);
    edges.extend(breaks.iter().copied().filter(|&b| b > lower && b < upper));
    edges.push(upper);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}
