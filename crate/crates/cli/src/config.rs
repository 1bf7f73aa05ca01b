//! TOML experiment configuration. Every run is fully determined by
//! (config, seed); the canonical config text is hashed into all outputs.

use gauss_ot::evolution::Density1d;
use gauss_ot::ot::CostKind;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub instance: InstanceConfig,
    pub evolution: EvolutionConfig,
    pub jacobian: JacobianConfig,
    pub ladder: LadderConfig,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            instance: InstanceConfig::default(),
            evolution: EvolutionConfig::default(),
            jacobian: JacobianConfig::default(),
            ladder: LadderConfig::default(),
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.instance.n < 2 {
            return Err(ConfigError::Invalid("instance.n must be at least 2".into()));
        }
        if self.instance.d == 0 {
            return Err(ConfigError::Invalid("instance.d must be positive".into()));
        }
        if self.ladder.dims.is_empty() || self.ladder.dims.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::Invalid("ladder.dims must be strictly ascending".into()));
        }
        if self.tolerances.gap <= 0.0
            || self.tolerances.evolution_slack <= 0.0
            || self.tolerances.cost_match <= 0.0
        {
            return Err(ConfigError::Invalid("tolerances must be positive".into()));
        }
        for t in &self.evolution.t_grid {
            if !(*t > 0.0 && *t < 1.0) {
                return Err(ConfigError::Invalid(format!("t = {t} outside (0,1)")));
            }
        }
        self.evolution.rho1.to_density()?;
        self.evolution.rho2.to_density()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InstanceConfig {
    /// source atoms
    pub n: usize,
    /// target atoms (defaults to n)
    pub k: usize,
    pub d: usize,
    /// "euclidean" | "sq-euclidean"
    pub cost: String,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig { n: 8, k: 8, d: 2, cost: "euclidean".into() }
    }
}

impl InstanceConfig {
    pub fn cost_kind(&self) -> Result<CostKind, ConfigError> {
        match self.cost.as_str() {
            "euclidean" => Ok(CostKind::Euclidean),
            "sq-euclidean" => Ok(CostKind::SqEuclidean),
            other => Err(ConfigError::Invalid(format!("unknown cost kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityConfig {
    /// "one" | "interval" | "sine-tilt" | "gauss-scale" | "rational"
    pub kind: String,
    pub a: f64,
    pub b: f64,
    pub s: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { kind: "one".into(), a: 0.0, b: 1.0, s: 0.0 }
    }
}

impl DensityConfig {
    pub fn to_density(&self) -> Result<Density1d, ConfigError> {
        match self.kind.as_str() {
            "one" => Ok(Density1d::One),
            "interval" => {
                if self.b <= self.a {
                    return Err(ConfigError::Invalid("interval needs a < b".into()));
                }
                Ok(Density1d::Interval { a: self.a, b: self.b })
            }
            "sine-tilt" => {
                if self.a.abs() >= 1.0 {
                    return Err(ConfigError::Invalid("sine-tilt needs |a| < 1".into()));
                }
                Ok(Density1d::SineTilt { a: self.a })
            }
            "gauss-scale" => {
                if self.s < 0.0 {
                    return Err(ConfigError::Invalid("gauss-scale needs s >= 0".into()));
                }
                Ok(Density1d::GaussScale { s: self.s })
            }
            "rational" => Ok(Density1d::Rational),
            other => Err(ConfigError::Invalid(format!("unknown density kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub rho1: DensityConfig,
    pub rho2: DensityConfig,
    pub intervals: usize,
    pub t_grid: Vec<f64>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            rho1: DensityConfig { kind: "interval".into(), a: -1.0, b: 1.0, s: 0.0 },
            rho2: DensityConfig { kind: "interval".into(), a: 0.0, b: 2.0, s: 0.0 },
            intervals: 50,
            t_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JacobianConfig {
    pub tuples: usize,
    pub max_dim: usize,
}

impl Default for JacobianConfig {
    fn default() -> Self {
        JacobianConfig { tuples: 1_000, max_dim: 16 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LadderConfig {
    /// "half-line" (m = 1) | "quadrant" (m = 2)
    pub densities: String,
    pub dims: Vec<usize>,
    pub ensemble: usize,
    pub heads: usize,
    pub tails: usize,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            densities: "half-line".into(),
            dims: vec![1, 2, 4, 8],
            ensemble: 4_000,
            heads: 48,
            tails: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// relative duality gap accepted from the solver
    pub gap: f64,
    /// slack on the measured evolution constant against 1/M
    pub evolution_slack: f64,
    /// relative agreement between glued-map and plan costs
    pub cost_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { gap: 1e-9, evolution_slack: 0.02, cost_match: 1e-9 }
    }
}
