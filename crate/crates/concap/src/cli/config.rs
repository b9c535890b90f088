//! TOML experiment configuration: one file describes the constellation, the
//! solver/optimizer knobs and the output target for every subcommand.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    euclidean_to_hyp, ConstraintKind, ConstraintSpec, Constellation, EuclideanCircle,
    HyperbolicDisk,
};
use crate::{Error, Result};

/// Full experiment description; unknown keys are rejected so typos surface
/// as parse errors naming the offending field.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Interpretation of the disk entries: "hyperbolic" (default) reads
    /// (center, hyperbolic radius), "euclidean" reads (center, radius).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disks: Vec<DiskConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condense: Option<CondenseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskConfig {
    /// Center as [x, y].
    pub center: [f64; 2],
    /// Radius in the units given by `units`.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintConfig {
    /// "disk" (centers in |z| <= r_max) or "interval" ([-r_max, r_max]).
    pub kind: String,
    pub r_max: f64,
    #[serde(default)]
    pub whole_disk: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gmres_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    /// Outer interior-point tolerance (the final barrier parameter).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Discretization during the search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_solver: Option<usize>,
    /// Discretization of the reported capacity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_polish: Option<usize>,
    #[serde(default)]
    pub symmetry_pin: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// "angular": centers R e^{+-i theta}; "linear": centers +-x.
    pub kind: String,
    /// Hyperbolic radius of both disks.
    pub radius: f64,
    /// |center| for the angular sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_center: Option<f64>,
    /// Upper end of the x grid for the linear sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondenseConfig {
    /// Number of equal disks on the ring.
    pub m: usize,
    /// |center| of the ring the hyperbolic centers sit on.
    pub ring_radius: f64,
    pub r_min: f64,
    pub r_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// "json" for records, "csv" for series.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    /// Builds the constellation from the disk entries, applying the units tag.
    pub fn constellation(&self) -> Result<Constellation> {
        if self.disks.is_empty() {
            return Err(Error::Config("config defines no disks".into()));
        }
        let units = self.units.as_deref().unwrap_or("hyperbolic");
        let disks = self
            .disks
            .iter()
            .map(|d| {
                let center = Complex64::new(d.center[0], d.center[1]);
                match units {
                    "hyperbolic" => HyperbolicDisk::new(center, d.radius),
                    "euclidean" => {
                        euclidean_to_hyp(&EuclideanCircle { center, radius: d.radius })
                    }
                    other => Err(Error::Config(format!(
                        "units must be \"hyperbolic\" or \"euclidean\", got \"{other}\""
                    ))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Constellation::new(disks)
    }

    pub fn constraint_spec(&self) -> Result<ConstraintSpec> {
        let c = self
            .constraint
            .as_ref()
            .ok_or_else(|| Error::Config("missing [constraint] section".into()))?;
        let kind = match c.kind.as_str() {
            "disk" => ConstraintKind::DiskCenters,
            "interval" => ConstraintKind::IntervalCenters,
            other => {
                return Err(Error::Config(format!(
                    "constraint.kind must be \"disk\" or \"interval\", got \"{other}\""
                )))
            }
        };
        let mut spec = ConstraintSpec::new(kind, c.r_max)?;
        spec.whole_disk = c.whole_disk;
        Ok(spec)
    }

    pub fn solver_n(&self, default: usize) -> usize {
        self.solver.as_ref().and_then(|s| s.n).unwrap_or(default)
    }

    pub fn gmres_tol(&self) -> f64 {
        self.solver
            .as_ref()
            .and_then(|s| s.gmres_tol)
            .unwrap_or(crate::bie::DEFAULT_GMRES_TOL)
    }
}
