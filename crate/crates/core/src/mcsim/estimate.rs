use alloc::vec::Vec;
use libm::sqrt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::scenario::{sample_typical_scenario, SimOptions};
use super::trial::{interference_from, run_trial, TrialOutcome};
use crate::analytic::ServingClass;
use crate::urban::{ChannelType, Model};
use crate::{Error, Result};

/// Fewest trials accepted by [`estimate`].
pub const MIN_TRIALS: usize = 100;

/// Sample mean with a normal-approximation 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub n_trials: usize,
}

impl Estimate {
    /// Mean and half-width of `samples`, summed in order with Neumaier
    /// compensation so the result depends only on the sequence.
    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Self {
        let mut n = 0usize;
        let mut sum = KahanSum::default();
        let mut sum_sq = KahanSum::default();
        for x in samples {
            n += 1;
            sum.add(x);
            sum_sq.add(x * x);
        }
        if n == 0 {
            return Self { mean: f64::NAN, half_width_95: f64::NAN, n_trials: 0 };
        }
        let nf = n as f64;
        let mean = sum.value() / nf;
        let var = if n > 1 { ((sum_sq.value() - nf * mean * mean) / (nf - 1.0)).max(0.0) } else { 0.0 };
        Self { mean, half_width_95: 1.96 * sqrt(var / nf), n_trials: n }
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        (value - self.mean).abs() <= self.half_width_95 + slack
    }
}

#[derive(Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Monte-Carlo estimates over a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub coverage: Estimate,
    pub spectral_efficiency: Estimate,
    /// Frequency of each association class; `None` counts trials in which
    /// no UAV covered the user.
    pub class_frequency: Vec<(Option<ServingClass>, Estimate)>,
}

impl McSummary {
    pub fn class(&self, class: Option<ServingClass>) -> Estimate {
        self.class_frequency.iter().find(|(c, _)| *c == class).map(|(_, e)| *e).expect("every class is tabulated")
    }
}

/// Random stream of trial `index` under `master_seed`. Streams are
/// independent of one another and of the order in which trials run.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs trial `index` of the experiment seeded by `master_seed`.
pub fn simulate_trial(model: &Model, opts: &SimOptions, master_seed: u64, index: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(master_seed, index);
    let scenario = sample_typical_scenario(model, opts, &mut rng)?;
    run_trial(&scenario, model, &mut rng)
}

/// Reduces trial outcomes, in the order given, to coverage, spectral
/// efficiency and class frequencies at the given SINR threshold.
pub fn summarize(outcomes: &[TrialOutcome], threshold_linear: f64) -> McSummary {
    let indicator = |b: bool| if b { 1.0 } else { 0.0 };
    let coverage = Estimate::from_samples(outcomes.iter().map(|o| indicator(o.covered(threshold_linear))));
    let spectral_efficiency = Estimate::from_samples(outcomes.iter().map(TrialOutcome::spectral_efficiency));
    let classes = ServingClass::ALL.iter().copied().map(Some).chain(core::iter::once(None));
    let class_frequency =
        classes.map(|c| (c, Estimate::from_samples(outcomes.iter().map(|o| indicator(o.serving == c))))).collect();
    McSummary { coverage, spectral_efficiency, class_frequency }
}

/// Sequential Monte-Carlo estimate over `n_trials` independent trials.
pub fn estimate(model: &Model, opts: &SimOptions, n_trials: usize, master_seed: u64) -> Result<McSummary> {
    if n_trials < MIN_TRIALS {
        return Err(Error::InvalidArgument("Monte-Carlo needs at least 100 trials"));
    }
    model.validate()?;
    opts.validate()?;
    let outcomes =
        (0..n_trials as u64).map(|i| simulate_trial(model, opts, master_seed, i)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(&outcomes, model.radio.threshold_linear))
}

/// Empirical Laplace transform `E[exp(-s I)]` of the interference from
/// `channel` UAVs beyond `exclusion_m` when UAVs form a Poisson field.
/// The deployment strategy of `model` is ignored.
pub fn empirical_laplace_ppp(
    model: &Model,
    channel: ChannelType,
    exclusion_m: f64,
    s: f64,
    n_trials: usize,
    master_seed: u64,
) -> Result<Estimate> {
    let model = model.with_strategy(crate::urban::Strategy::UniformPpp);
    let opts = SimOptions::default();
    let samples = (0..n_trials as u64)
        .map(|i| {
            let mut rng = trial_rng(master_seed, i);
            let scenario = sample_typical_scenario(&model, &opts, &mut rng)?;
            let interference = interference_from(&scenario, channel, exclusion_m, &model, &mut rng)?;
            Ok(libm::exp(-s * interference))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(samples))
}
