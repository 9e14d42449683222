//! Sweep configuration files.
//!
//! Files are TOML with the sections `[environment]`, `[radio]`,
//! `[deployment]`, `[sweep]`, `[simulation]`, `[quadrature]` and an
//! optional `[manifest]`. Every section may be omitted and falls back to
//! the reference scenario. Unknown keys are rejected.
//!
//! Units follow the conventions of the field: densities per km², angles in
//! degrees, the SINR threshold in dB (either a number or a string such as
//! `"0 dB"`), everything else SI.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use uavnet_core::mcsim::SimOptions;
use uavnet_core::quadrature::QuadratureSpec;
use uavnet_core::{Deployment, Model, RadioConfig, Strategy, UrbanEnvironment};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentSection {
    pub buildings_per_km2: f64,
    pub built_up_fraction: f64,
    pub height_scale_m: f64,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        let env = UrbanEnvironment::reference();
        Self { buildings_per_km2: env.beta_per_m2 * 1e6, built_up_fraction: env.delta, height_scale_m: env.kappa_m }
    }
}

/// SINR threshold as written in a file: a bare number of dB or a string
/// such as `"-3 dB"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Db(f64),
    Text(String),
}

impl Threshold {
    pub fn to_db(&self) -> Result<f64, CliError> {
        match self {
            Threshold::Db(v) => Ok(*v),
            Threshold::Text(s) => {
                let trimmed = s.trim();
                let number =
                    trimmed.strip_suffix("dB").or_else(|| trimmed.strip_suffix("db")).unwrap_or(trimmed).trim();
                number
                    .parse::<f64>()
                    .map_err(|_| CliError::Validation(format!("radio.threshold: cannot read {s:?} as dB")))
            }
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioSection {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub m_los: u32,
    pub m_nlos: u32,
    pub tx_power_w: f64,
    pub noise_w: f64,
    pub beamwidth_deg: f64,
    pub threshold: Threshold,
}

impl Default for RadioSection {
    fn default() -> Self {
        let r = RadioConfig::reference();
        Self {
            alpha_los: r.alpha_los,
            alpha_nlos: r.alpha_nlos,
            m_los: r.m_los,
            m_nlos: r.m_nlos,
            tx_power_w: r.tx_power_w,
            noise_w: r.noise_w,
            beamwidth_deg: 150.0,
            threshold: Threshold::Db(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeploymentSection {
    pub height_m: f64,
    pub density_per_km2: f64,
    pub hotspot_radius_m: f64,
}

impl Default for DeploymentSection {
    fn default() -> Self {
        Self { height_m: 100.0, density_per_km2: 5.0, hotspot_radius_m: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Height,
    HotspotRadius,
    Density,
    Beamwidth,
    Threshold,
}

impl SweepAxis {
    /// Copy of `model` with this axis set to `value`, given in file units.
    pub fn apply(self, model: &Model, value: f64) -> Model {
        let mut m = *model;
        match self {
            SweepAxis::Height => m.deployment.height_m = value,
            SweepAxis::HotspotRadius => m.deployment.hotspot_radius_m = value,
            SweepAxis::Density => m.deployment.density_per_m2 = value * 1e-6,
            SweepAxis::Beamwidth => m.radio.beamwidth_rad = value.to_radians(),
            SweepAxis::Threshold => m.radio.threshold_linear = db_to_linear(value),
        }
        m
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Height => "height",
            SweepAxis::HotspotRadius => "hotspot-radius",
            SweepAxis::Density => "density",
            SweepAxis::Beamwidth => "beamwidth",
            SweepAxis::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Analytic,
    MonteCarlo,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    HotspotCenter,
    UniformPpp,
    RectGrid,
    Kmeans,
}

impl From<StrategyName> for Strategy {
    fn from(s: StrategyName) -> Self {
        match s {
            StrategyName::HotspotCenter => Strategy::HotspotCenter,
            StrategyName::UniformPpp => Strategy::UniformPpp,
            StrategyName::RectGrid => Strategy::RectGrid,
            StrategyName::Kmeans => Strategy::KMeans,
        }
    }
}

impl From<Strategy> for StrategyName {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::HotspotCenter => StrategyName::HotspotCenter,
            Strategy::UniformPpp => StrategyName::UniformPpp,
            Strategy::RectGrid => StrategyName::RectGrid,
            Strategy::KMeans => StrategyName::Kmeans,
        }
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::HotspotCenter => "hotspot-center",
        Strategy::UniformPpp => "uniform-ppp",
        Strategy::RectGrid => "rect-grid",
        Strategy::KMeans => "kmeans",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub axis: SweepAxis,
    /// Explicit axis values. When empty, `start`, `stop` and `step` are used.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    pub engines: Vec<Engine>,
    pub strategies: Vec<StrategyName>,
    pub output: PathBuf,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: SweepAxis::Height,
            values: Vec::new(),
            start: Some(40.0),
            stop: Some(200.0),
            step: Some(20.0),
            engines: vec![Engine::Analytic],
            strategies: vec![StrategyName::HotspotCenter],
            output: PathBuf::from("sweep.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub trials: usize,
    pub seed: u64,
    pub window_scale: f64,
    pub users_per_hotspot: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        let o = SimOptions::default();
        Self { trials: 20_000, seed: 1, window_scale: o.window_scale, users_per_hotspot: o.users_per_hotspot }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self { abs_tol: q.abs_tol, rel_tol: q.rel_tol, max_subdivisions: q.max_subdivisions }
    }
}

/// Provenance block written into run manifests; ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSection {
    pub tool: String,
    pub version: String,
    pub csv: PathBuf,
}

/// A configuration file as written, before unit conversion.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub environment: EnvironmentSection,
    pub radio: RadioSection,
    pub deployment: DeploymentSection,
    pub sweep: SweepSection,
    pub simulation: SimulationSection,
    pub quadrature: QuadratureSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestSection>,
}

/// A validated sweep in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// The scenario every grid cell starts from. Its strategy is a
    /// placeholder; each cell sets its own.
    pub base: Model,
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub engines: Vec<Engine>,
    pub strategies: Vec<Strategy>,
    pub n_trials: usize,
    pub master_seed: u64,
    pub sim: SimOptions,
    pub quad: QuadratureSpec,
    pub output_path: PathBuf,
}

fn core_error(context: &str, e: uavnet_core::Error) -> CliError {
    CliError::Validation(format!("{context}: {e}"))
}

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config sections serialize to TOML")
    }

    /// Axis values, either listed or generated from `start..=stop` by `step`.
    pub fn axis_values(&self) -> Result<Vec<f64>, CliError> {
        let s = &self.sweep;
        if !s.values.is_empty() {
            return Ok(s.values.clone());
        }
        match (s.start, s.stop, s.step) {
            (Some(start), Some(stop), Some(step)) => {
                if !(step > 0.0) || !(stop >= start) {
                    return Err(CliError::Validation("sweep: need step > 0 and stop >= start".into()));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| start + i as f64 * step).collect())
            }
            (None, None, None) => Err(CliError::Validation("sweep: axis values must be nonempty".into())),
            _ => Err(CliError::Validation("sweep: start, stop and step must be given together".into())),
        }
    }

    pub fn resolve(&self) -> Result<SweepConfig, CliError> {
        let env = UrbanEnvironment::from_per_km2(
            self.environment.buildings_per_km2,
            self.environment.built_up_fraction,
            self.environment.height_scale_m,
        )
        .map_err(|e| core_error("environment", e))?;

        let r = &self.radio;
        let radio = RadioConfig {
            alpha_los: r.alpha_los,
            alpha_nlos: r.alpha_nlos,
            m_los: r.m_los,
            m_nlos: r.m_nlos,
            tx_power_w: r.tx_power_w,
            noise_w: r.noise_w,
            beamwidth_rad: r.beamwidth_deg.to_radians(),
            threshold_linear: db_to_linear(r.threshold.to_db()?),
        };
        radio.validate().map_err(|e| core_error("radio", e))?;

        let d = &self.deployment;
        let deployment =
            Deployment::from_per_km2(d.height_m, d.density_per_km2, d.hotspot_radius_m, Strategy::HotspotCenter)
                .map_err(|e| core_error("deployment", e))?;
        let base = Model::new(env, radio, deployment).map_err(|e| core_error("model", e))?;

        let axis_values = self.axis_values()?;
        if axis_values.is_empty() {
            return Err(CliError::Validation("sweep: axis values must be nonempty".into()));
        }
        if axis_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Validation("sweep: axis values must be strictly increasing".into()));
        }
        for &v in &axis_values {
            self.sweep
                .axis
                .apply(&base, v)
                .validate()
                .map_err(|e| core_error(&format!("sweep: {} = {v}", self.sweep.axis.name()), e))?;
        }

        let mut engines = self.sweep.engines.clone();
        engines.sort();
        engines.dedup();
        if engines.is_empty() {
            return Err(CliError::Validation("sweep: engines must be nonempty".into()));
        }
        let mut strategies: Vec<Strategy> = self.sweep.strategies.iter().map(|&s| s.into()).collect();
        strategies.sort();
        strategies.dedup();
        if strategies.is_empty() {
            return Err(CliError::Validation("sweep: strategies must be nonempty".into()));
        }
        if engines.contains(&Engine::Analytic) {
            if let Some(s) = strategies.iter().find(|s| !s.has_analytic_model()) {
                return Err(CliError::Validation(format!(
                    "sweep: the analytic engine does not support strategy {}",
                    strategy_name(*s)
                )));
            }
        }

        let sim_section = &self.simulation;
        let sim =
            SimOptions { window_scale: sim_section.window_scale, users_per_hotspot: sim_section.users_per_hotspot };
        sim.validate().map_err(|e| core_error("simulation", e))?;
        if engines.contains(&Engine::MonteCarlo) && sim_section.trials < uavnet_core::mcsim::MIN_TRIALS {
            return Err(CliError::Validation(format!(
                "simulation: trials must be at least {}",
                uavnet_core::mcsim::MIN_TRIALS
            )));
        }

        let q = &self.quadrature;
        let quad =
            QuadratureSpec::new(q.abs_tol, q.rel_tol, q.max_subdivisions).map_err(|e| core_error("quadrature", e))?;

        Ok(SweepConfig {
            base,
            axis: self.sweep.axis,
            axis_values,
            engines,
            strategies,
            n_trials: sim_section.trials,
            master_seed: sim_section.seed,
            sim,
            quad,
            output_path: self.sweep.output.clone(),
        })
    }
}

/// Parses and validates a configuration file.
pub fn parse_config(text: &str) -> Result<SweepConfig, CliError> {
    ConfigFile::from_toml(text)?.resolve()
}

/// Parses a file, applies `section.key=value` overrides, and returns the
/// merged file. Override values are read as TOML and fall back to strings.
pub fn load_with_overrides(text: &str, overrides: &[String]) -> Result<ConfigFile, CliError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
    for item in overrides {
        let (path, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("override {item:?} is not of the form section.key=value")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::Validation(format!("override key {path:?} is not of the form section.key")))?;
        let value = parse_override_value(raw.trim());
        let entry = table.entry(section.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(section_table) = entry else {
            return Err(CliError::Validation(format!("override target {section:?} is not a section")));
        };
        section_table.insert(key.to_string(), value);
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))
}

fn parse_override_value(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match probe.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_scenario() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.base.radio, RadioConfig::reference());
        assert_eq!(cfg.base.env, UrbanEnvironment::reference());
        assert_eq!(cfg.axis_values, vec![40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 180.0, 200.0]);
    }

    #[test]
    fn reference_radio_block() {
        let text = r#"
            [radio]
            alpha_los = 2.1
            alpha_nlos = 4
            m_los = 3
            m_nlos = 1
            tx_power_w = 0.1
            noise_w = 1e-9
            beamwidth_deg = 150
            threshold = "0 dB"
        "#;
        let cfg = parse_config(text).unwrap();
        let r = cfg.base.radio;
        assert_eq!((r.alpha_los, r.alpha_nlos, r.m_los, r.m_nlos), (2.1, 4.0, 3, 1));
        assert_eq!((r.tx_power_w, r.noise_w), (0.1, 1e-9));
        assert!((r.beamwidth_rad - 150f64.to_radians()).abs() < 1e-15);
        assert_eq!(r.threshold_linear, 1.0);
    }

    #[test]
    fn threshold_forms() {
        assert_eq!(Threshold::Text("0 dB".into()).to_db().unwrap(), 0.0);
        assert_eq!(Threshold::Text("-3dB".into()).to_db().unwrap(), -3.0);
        assert_eq!(Threshold::Db(10.0).to_db().unwrap(), 10.0);
        assert!(Threshold::Text("loud".into()).to_db().is_err());
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn bad_delta_names_the_invariant() {
        let err = parse_config("[environment]\nbuilt_up_fraction = 1.5\n").unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.to_string().contains("delta must lie in (0,1)"), "{err}");
    }

    #[test]
    fn unknown_keys_fail_closed() {
        let err = parse_config("[radio]\nalpha_l = 2.1\n").unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
        assert!(err.to_string().contains("alpha_l"));
        assert!(matches!(parse_config("[bogus]\nx = 1\n"), Err(CliError::Parse(_))));
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse_config("[radio]\nalpha_los = \n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn sweep_invariants() {
        assert!(parse_config("[sweep]\nstrategies = []\n").is_err());
        assert!(parse_config("[sweep]\nengines = []\n").is_err());
        assert!(parse_config("[sweep]\nvalues = [100, 60]\n").is_err());
        assert!(parse_config("[sweep]\nvalues = [60, 60]\n").is_err());
        let err = parse_config("[sweep]\nstrategies = [\"rect-grid\"]\n").unwrap_err();
        assert!(err.to_string().contains("analytic"));
        let ok = parse_config("[sweep]\nstrategies = [\"rect-grid\"]\nengines = [\"monte-carlo\"]\n").unwrap();
        assert_eq!(ok.strategies, vec![Strategy::RectGrid]);
    }

    #[test]
    fn axis_units_convert() {
        let m = parse_config("").unwrap().base;
        assert!((SweepAxis::Density.apply(&m, 25.0).deployment.density_per_m2 - 25e-6).abs() < 1e-18);
        assert_eq!(SweepAxis::Threshold.apply(&m, 10.0).radio.threshold_linear, 10.0);
        assert_eq!(SweepAxis::Height.apply(&m, 60.0).height(), 60.0);
    }

    #[test]
    fn overrides_replace_keys() {
        let cfg = load_with_overrides(
            "[deployment]\nheight_m = 50\n",
            &["deployment.height_m=80".into(), "radio.threshold=-3 dB".into(), "sweep.axis=density".into()],
        )
        .unwrap();
        assert_eq!(cfg.deployment.height_m, 80.0);
        assert_eq!(cfg.radio.threshold.to_db().unwrap(), -3.0);
        assert_eq!(cfg.sweep.axis, SweepAxis::Density);
        assert!(load_with_overrides("", &["nodot=1".into()]).is_err());
        assert!(matches!(load_with_overrides("", &["radio.nope=1".into()]), Err(CliError::Parse(_))));
    }

    #[test]
    fn round_trips_through_toml() {
        let mut file = ConfigFile::default();
        file.sweep.values = vec![40.0, 80.0];
        file.radio.threshold = Threshold::Text("3 dB".into());
        let again = ConfigFile::from_toml(&file.to_toml()).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.resolve().unwrap(), file.resolve().unwrap());
    }
}
