//! Height that maximizes coverage.

use rayon::prelude::*;
use uavnet_core::{Model, Strategy};

use crate::config::{strategy_name, Engine, SweepAxis, SweepConfig};
use crate::error::CliError;
use crate::sweep::{analytic_coverage, monte_carlo};

/// Golden-section refinement stops once the bracket is this narrow, meters.
pub const REFINE_TOLERANCE_M: f64 = 1.0;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub gamma_opt: f64,
    pub metric_at_opt: f64,
    pub engine: Engine,
    /// Set when a neighbouring grid point is statistically indistinguishable
    /// from the maximum, so the location of the peak is unreliable.
    pub flat: bool,
    /// Coverage and its CI half-width at each swept height.
    pub profile: Vec<(f64, f64, f64)>,
}

fn coverage_at(cfg: &SweepConfig, model: &Model, engine: Engine) -> Result<(f64, f64), CliError> {
    let cell = |e| {
        CliError::from_engine(&format!("height = {}, {}", model.height(), strategy_name(model.deployment.strategy)), e)
    };
    match engine {
        Engine::Analytic => Ok((analytic_coverage(model, &cfg.quad).map_err(cell)?, 0.0)),
        Engine::MonteCarlo => {
            let s = monte_carlo(model, &cfg.sim, cfg.n_trials, cfg.master_seed).map_err(cell)?;
            Ok((s.coverage.mean, s.coverage.half_width_95))
        }
    }
}

/// Maximizes coverage over height for `strategy`.
///
/// The swept heights are searched first. With the analytic engine the
/// best grid point is then refined by golden-section search between its
/// neighbours; with Monte-Carlo only the grid is used and the result is
/// marked flat when a neighbour's confidence interval overlaps the peak's.
pub fn find_optimum_height(cfg: &SweepConfig, strategy: Strategy) -> Result<Optimum, CliError> {
    if cfg.axis != SweepAxis::Height {
        return Err(CliError::Validation("optimum: the sweep axis must be height".into()));
    }
    let engine = if cfg.engines.contains(&Engine::Analytic) { Engine::Analytic } else { Engine::MonteCarlo };
    if engine == Engine::Analytic && !strategy.has_analytic_model() {
        return Err(CliError::Validation(format!(
            "optimum: the analytic engine does not support strategy {}",
            strategy_name(strategy)
        )));
    }
    let base = cfg.base.with_strategy(strategy);
    let eval = |h: f64| coverage_at(cfg, &base.with_height(h), engine);

    let profile: Vec<(f64, f64, f64)> =
        cfg.axis_values.par_iter().map(|&h| eval(h).map(|(c, ci)| (h, c, ci))).collect::<Result<_, _>>()?;
    let best = profile.iter().enumerate().fold(0, |b, (i, p)| if p.1 > profile[b].1 { i } else { b });
    let (mut gamma_opt, mut metric, best_ci) = profile[best];

    let lo_idx = best.saturating_sub(1);
    let hi_idx = (best + 1).min(profile.len() - 1);
    let flat = engine == Engine::MonteCarlo
        && [lo_idx, hi_idx].iter().filter(|&&i| i != best).any(|&i| profile[i].1 + profile[i].2 >= metric - best_ci);

    if engine == Engine::Analytic && hi_idx > lo_idx {
        let (h, c) = golden_max(|h| eval(h).map(|v| v.0), profile[lo_idx].0, profile[hi_idx].0)?;
        if c > metric {
            gamma_opt = h;
            metric = c;
        }
    }
    Ok(Optimum { gamma_opt, metric_at_opt: metric, engine, flat, profile })
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64) -> Result<(f64, f64), CliError>
where
    F: FnMut(f64) -> Result<f64, CliError>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > REFINE_TOLERANCE_M {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| Ok(-(x - 73.3) * (x - 73.3)), 40.0, 120.0).unwrap();
        assert!((x - 73.3).abs() < REFINE_TOLERANCE_M);
        assert!(fx <= 0.0 && fx > -1.0);
    }

    #[test]
    fn single_height_is_returned_as_is() {
        let cfg = parse_config("[sweep]\nvalues = [80]\n").unwrap();
        let opt = find_optimum_height(&cfg, Strategy::HotspotCenter).unwrap();
        assert_eq!(opt.gamma_opt, 80.0);
        assert_eq!(opt.profile.len(), 1);
        assert!(!opt.flat);
    }

    #[test]
    fn rejects_other_axes() {
        let cfg = parse_config("[sweep]\naxis = \"density\"\nvalues = [1, 5]\n").unwrap();
        assert!(matches!(find_optimum_height(&cfg, Strategy::HotspotCenter), Err(CliError::Validation(_))));
    }
}
