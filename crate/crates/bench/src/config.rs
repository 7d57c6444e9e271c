use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use zermelo_core::optimizer::OptimizerConfig;
use zermelo_core::quadrature::QuadratureSpec;
use zermelo_core::{Error, Result, Vec2, WindField};

/// Geometric sweep of connectivity lengths, from `max` down to `min`.
/// Without `min` the sweep ends at the finest `l` whose lattice still fits
/// the vertex cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LSweep {
    pub count: usize,
    #[serde(default)]
    pub min: Option<f64>,
    pub max: f64,
    /// Sweep again up to the coarsest `l` from which every finer row reaches
    /// the best optimum found, leaving out sparse graphs whose shortest path
    /// leads into another basin.
    #[serde(default = "yes")]
    pub dense_only: bool,
}

fn yes() -> bool {
    true
}

impl LSweep {
    /// Strictly decreasing values, both ends included.
    pub fn values(&self, min: f64) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.max];
        }
        let ratio = (min / self.max).ln() / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| match i {
                0 => self.max,
                i if i == self.count - 1 => min,
                i => self.max * (ratio * i as f64).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SeedPolicy {
    /// Seed the optimizer with the discrete shortest path of the same row.
    #[default]
    Discrete,
    Straight,
}

/// How `h` is tied to `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Coupling {
    /// `h = σ̄ l²/L²` with `σ̄` and `L` measured on a pilot optimum.
    Pilot,
    /// `h = σ̄ l²/L²` with the given constants.
    Fixed { sigma: f64, length: f64 },
    /// `h = ratio · l`
    Proportional { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ExperimentConfig {
    pub instance: String,
    /// Replaces the preset field when present.
    pub field: Option<WindField>,
    pub origin: Vec2,
    pub destination: Vec2,
    pub l_values: LSweep,
    pub coupling: Coupling,
    pub quadrature: QuadratureSpec,
    pub optimizer: OptimizerConfig,
    pub seed_policy: SeedPolicy,
    pub vertex_cap: usize,
    pub output_dir: Option<PathBuf>,
    /// Parallel rows; 0 means `ZB_JOBS` or all cores.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instance: "shear".into(),
            field: None,
            origin: Vec2::new(0.0, 0.0),
            destination: Vec2::new(1.0, 0.0),
            l_values: LSweep { count: 8, min: None, max: 0.3, dense_only: true },
            coupling: Coupling::Pilot,
            quadrature: QuadratureSpec::default(),
            optimizer: OptimizerConfig { control_points: 256, ..OptimizerConfig::default() },
            seed_policy: SeedPolicy::Discrete,
            vertex_cap: zermelo_core::graph::DEFAULT_VERTEX_CAP,
            output_dir: None,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn for_instance(name: &str) -> Self {
        Self { instance: name.into(), ..Self::default() }
    }

    pub fn field(&self) -> Result<WindField> {
        match &self.field {
            Some(f) => {
                f.validate()?;
                Ok(f.clone())
            }
            None => WindField::preset(&self.instance),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.field()?;
        self.optimizer.validate()?;
        let direct = self.origin.distance(self.destination);
        if !(direct > 0.0) {
            return Err(Error::InvalidArgument("origin and destination coincide".into()));
        }
        let s = &self.l_values;
        if s.count == 0 || !(s.max > 0.0) || s.max > direct {
            return Err(Error::InvalidArgument(format!(
                "l sweep needs count >= 1 and 0 < max <= {direct}"
            )));
        }
        if let Some(min) = s.min {
            if !(min > 0.0) || (s.count > 1 && min >= s.max) {
                return Err(Error::InvalidArgument("l sweep needs 0 < min < max".into()));
            }
        }
        match self.coupling {
            Coupling::Fixed { sigma, length } if !(sigma > 0.0 && length > 0.0) => {
                Err(Error::InvalidArgument("coupling constants must be positive".into()))
            }
            Coupling::Proportional { ratio } if !(ratio > 0.0) => {
                Err(Error::InvalidArgument("coupling ratio must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn jobs(&self) -> usize {
        if self.jobs > 0 {
            return self.jobs;
        }
        std::env::var("ZB_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&j| j > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_geometric_and_decreasing() {
        let s = LSweep { count: 5, min: None, max: 0.4, dense_only: false };
        let v = s.values(0.025);
        assert_eq!(v.len(), 5);
        assert_eq!((v[0], v[4]), (0.4, 0.025));
        for w in v.windows(3) {
            assert!(w[0] > w[1]);
            assert!((w[0] / w[1] - w[1] / w[2]).abs() < 1e-12);
        }
    }

    #[test]
    fn config_json_round_trip() {
        let c = ExperimentConfig::for_instance("vortex15");
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&s).unwrap(), c);
        let partial: ExperimentConfig = serde_json::from_str(r#"{"instance":"vortex1"}"#).unwrap();
        assert_eq!(partial.l_values, c.l_values);
    }
}
