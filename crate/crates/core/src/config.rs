//! Experiment configuration, read from TOML.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::leaves::{SeedArc, DEFAULT_SEED_DOMAIN};
use crate::model::{
    ModelSystem, SaddleSpec, TransitionSpec, DEFAULT_CHART_HALF_WIDTH, DEFAULT_NEIGHBORHOOD_HALF_WIDTH,
    DEFAULT_TAU_GRID,
};
use crate::poly::{Monomial, Poly1, Poly2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Validate,
    Leaves,
    Rects,
    Slopes,
    Cascade,
    Classify,
    Moduli,
    Conjugacy,
    All,
}

impl Command {
    pub const EACH: [Command; 8] = [
        Command::Validate,
        Command::Classify,
        Command::Leaves,
        Command::Rects,
        Command::Slopes,
        Command::Cascade,
        Command::Moduli,
        Command::Conjugacy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Leaves => "leaves",
            Command::Rects => "rects",
            Command::Slopes => "slopes",
            Command::Cascade => "cascade",
            Command::Classify => "classify",
            Command::Moduli => "moduli",
            Command::Conjugacy => "conjugacy",
            Command::All => "all",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::EACH
            .into_iter()
            .chain([Command::All])
            .find(|c| c.name() == name)
    }

    /// The individual commands this one stands for.
    pub fn expand(self) -> Vec<Command> {
        match self {
            Command::All => Self::EACH.to_vec(),
            c => vec![c],
        }
    }
}

fn default_m0() -> u32 {
    1
}
fn default_chart() -> f64 {
    DEFAULT_CHART_HALF_WIDTH
}
fn default_neighborhood() -> f64 {
    DEFAULT_NEIGHBORHOOD_HALF_WIDTH
}
fn default_domain() -> (f64, f64) {
    DEFAULT_SEED_DOMAIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    /// Ascending coefficients of `y0(x)`.
    pub coeffs: Vec<f64>,
    #[serde(default = "default_domain")]
    pub domain: (f64, f64),
    /// Optional cross-check of `y0(0)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    #[serde(default = "default_m0")]
    pub m0: u32,
    #[serde(default)]
    pub h1_terms: Vec<Monomial>,
    #[serde(default)]
    pub h2_terms: Vec<Monomial>,
    #[serde(default = "default_chart")]
    pub chart_half_width: f64,
    #[serde(default = "default_neighborhood")]
    pub uq_half_width: f64,
    #[serde(default = "default_neighborhood")]
    pub ur_half_width: f64,
    pub seed: SeedConfig,
}

fn default_n_range() -> (u32, u32) {
    (8, 18)
}
fn default_modulus_range() -> (u32, u32) {
    (5, 22)
}
fn default_cascade_range() -> (u32, u32) {
    (10, 22)
}
fn default_eps_grid() -> Vec<f64> {
    vec![0.02, 0.01, 0.005]
}
fn default_tau_grid() -> usize {
    DEFAULT_TAU_GRID
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Inclusive range of `n` for the rectangle scaling fits.
    #[serde(default = "default_n_range")]
    pub n_range: (u32, u32),
    #[serde(default = "default_modulus_range")]
    pub modulus_n_range: (u32, u32),
    #[serde(default = "default_cascade_range")]
    pub cascade_n_range: (u32, u32),
    #[serde(default = "default_eps_grid")]
    pub eps_grid: Vec<f64>,
    /// Candidates for the strip width `s`; empty means the built-in grid.
    #[serde(default)]
    pub s_grid: Vec<f64>,
    #[serde(default = "default_tau_grid")]
    pub tau_grid: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_range: default_n_range(),
            modulus_n_range: default_modulus_range(),
            cascade_n_range: default_cascade_range(),
            eps_grid: default_eps_grid(),
            s_grid: Vec::new(),
            tau_grid: default_tau_grid(),
            seed: 0,
        }
    }
}

/// Acceptance tolerances. Every value must be positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub order: f64,
    pub order_coefficient: f64,
    pub t_plus_relative: f64,
    pub distance_exponent: f64,
    pub width_exponent: f64,
    pub height_exponent: f64,
    pub modulus: f64,
    pub pair_relative: f64,
    pub c_n: f64,
    pub s_step: f64,
    pub power_fit: f64,
    pub lemma_constant: f64,
    pub order_slope: f64,
    pub order_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            order: 0.02,
            order_coefficient: 0.02,
            t_plus_relative: 0.02,
            distance_exponent: 0.03,
            width_exponent: 0.05,
            height_exponent: 0.05,
            modulus: 0.30,
            pair_relative: 1e-3,
            c_n: 1e-3,
            s_step: 1e-3,
            power_fit: 1e-6,
            lemma_constant: 0.01,
            order_slope: 0.02,
            order_band: 1.03,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 14] {
        [
            ("order", self.order),
            ("order_coefficient", self.order_coefficient),
            ("t_plus_relative", self.t_plus_relative),
            ("distance_exponent", self.distance_exponent),
            ("width_exponent", self.width_exponent),
            ("height_exponent", self.height_exponent),
            ("modulus", self.modulus),
            ("pair_relative", self.pair_relative),
            ("c_n", self.c_n),
            ("s_step", self.s_step),
            ("power_fit", self.power_fit),
            ("lemma_constant", self.lemma_constant),
            ("order_slope", self.order_slope),
            ("order_band", self.order_band),
        ]
    }
}

fn default_output_dir() -> String {
    "out".into()
}
fn default_commands() -> Vec<Command> {
    vec![Command::All]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default = "default_commands")]
    pub commands: Vec<Command>,
    pub system: SystemConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn check_range(name: &str, (lo, hi): (u32, u32)) -> Result<()> {
    if lo > hi {
        return Err(LabError::Config(format!("{name} is empty: [{lo}, {hi}]")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses and checks a TOML document. The system itself is only built by
    /// [`ExperimentConfig::to_system`].
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    fn check(&self) -> Result<()> {
        for (name, v) in self.tolerances.entries() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Config(format!(
                    "tolerance {name} must be positive and finite, got {v}"
                )));
            }
        }
        check_range("n_range", self.sweep.n_range)?;
        check_range("modulus_n_range", self.sweep.modulus_n_range)?;
        check_range("cascade_n_range", self.sweep.cascade_n_range)?;
        if let Some(v) = self.sweep.eps_grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(LabError::Config(format!(
                "eps_grid entries must be positive, got {v}"
            )));
        }
        if let Some(v) = self.sweep.s_grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(LabError::Config(format!(
                "s_grid entries must be positive, got {v}"
            )));
        }
        if self.output_dir.is_empty() {
            return Err(LabError::Config("output_dir is empty".into()));
        }
        if self.commands.is_empty() {
            return Err(LabError::Config("commands is empty".into()));
        }
        Ok(())
    }

    pub fn to_system(&self) -> Result<ModelSystem> {
        let s = &self.system;
        let config_err = |e: LabError| LabError::Config(e.to_string());
        let seed = SeedArc::new(Poly1::new(s.seed.coeffs.clone()), s.seed.domain).map_err(config_err)?;
        if let Some(z0) = s.seed.z0 {
            if (z0 - seed.z0).abs() > 1e-12 * z0.abs().max(1.0) {
                return Err(LabError::Config(format!(
                    "z0 = {z0} disagrees with the seed polynomial at 0 ({})",
                    seed.z0
                )));
            }
        }
        let mut saddle = SaddleSpec::new(s.lambda, s.mu);
        saddle.chart_half_width = s.chart_half_width;
        let transition = TransitionSpec {
            a: s.a,
            b: s.b,
            c: s.c,
            d: s.d,
            e: s.e,
            m0: s.m0,
            h1: Poly2::new(s.h1_terms.clone()),
            h2: Poly2::new(s.h2_terms.clone()),
        };
        ModelSystem::new(saddle, transition, seed)
            .and_then(|sys| sys.with_neighborhoods(s.uq_half_width, s.ur_half_width))
            .and_then(|sys| sys.with_tau_grid(self.sweep.tau_grid))
            .map_err(config_err)
    }

    /// Commands to run, `all` expanded, duplicates dropped.
    pub fn command_list(&self) -> Vec<Command> {
        let mut out: Vec<Command> = Vec::new();
        for c in self.commands.iter().flat_map(|c| c.expand()) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

/// The reference configuration as TOML.
pub const REFERENCE_TOML: &str = r#"output_dir = "out"
commands = ["all"]

[system]
lambda = 0.3
mu = 1.02
a = 1.0
b = -1.0
c = 1.0
d = -1.0
e = 0.0
m0 = 1
h1_terms = []
h2_terms = []

[system.seed]
coeffs = [0.5]
domain = [-1.5, 1.5]
z0 = 0.5
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parses_to_reference_system() {
        let cfg = ExperimentConfig::parse(REFERENCE_TOML).unwrap();
        assert_eq!(cfg.to_system().unwrap(), ModelSystem::reference());
        assert_eq!(cfg.command_list(), Command::EACH.to_vec());
    }

    #[test]
    fn round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::parse(REFERENCE_TOML).unwrap();
        cfg.system.h1_terms.push(Monomial::new(0, 2, 0.1));
        cfg.sweep.s_grid = vec![0.1, 1e-5];
        let back = ExperimentConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = REFERENCE_TOML.replace("e = 0.0", "e = 0.0\nf = 1.0");
        assert!(matches!(ExperimentConfig::parse(&text), Err(LabError::Config(_))));
        let text = format!("{REFERENCE_TOML}\n[tolerances]\nslop = 1.0\n");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn tolerances_must_be_positive() {
        let text = format!("{REFERENCE_TOML}\n[tolerances]\nmodulus = 0.0\n");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.to_string().contains("modulus"));
    }

    #[test]
    fn z0_must_match_the_seed() {
        let text = REFERENCE_TOML.replace("z0 = 0.5", "z0 = 0.7");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        assert!(matches!(cfg.to_system(), Err(LabError::Config(_))));
    }
}
