//! Experiment configuration schema (JSON, versioned via `schema_version`).
//!
//! Bodies are written as `{"ball": {"radius": 0.5}}`,
//! `{"box": {"half_extents": [0.5, 0.5]}}` or
//! `{"polytope_v": {"vertices": [[..], ..]}}`; centers default to the
//! origin. Windows are re-centred on load so that sampling always sees the
//! origin in the interior.

use serde::Deserialize;

use cylproc::{BaseDirectionLaw, ConvexBody, ProcessConfig, RadiusLaw};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected 1)")]
    SchemaVersion(u32),
    #[error("invalid config field `{field}`: {message}")]
    Invalid {
        field: &'static str,
        message: String,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TailCompare,
    MeanCheck,
    CapacityCheck,
    BoundCurves,
    ScalingProbe,
    CoeffDump,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::TailCompare => "tail_compare",
            ExperimentKind::MeanCheck => "mean_check",
            ExperimentKind::CapacityCheck => "capacity_check",
            ExperimentKind::BoundCurves => "bound_curves",
            ExperimentKind::ScalingProbe => "scaling_probe",
            ExperimentKind::CoeffDump => "coeff_dump",
        }
    }

    /// Stable experiment index used to derive RNG stream ids.
    pub fn stream_base(&self) -> u64 {
        match self {
            ExperimentKind::TailCompare => 1,
            ExperimentKind::MeanCheck => 2,
            ExperimentKind::CapacityCheck => 3,
            ExperimentKind::BoundCurves => 4,
            ExperimentKind::ScalingProbe => 5,
            ExperimentKind::CoeffDump => 6,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    Box {
        half_extents: Vec<f64>,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    PolytopeV {
        vertices: Vec<Vec<f64>>,
    },
}

impl BodySpec {
    pub fn build(&self, dim: usize, field: &'static str) -> Result<ConvexBody, ConfigError> {
        let body = match self {
            BodySpec::Ball { radius, center } => {
                ConvexBody::ball(center.clone().unwrap_or_else(|| vec![0.0; dim]), *radius)
            }
            BodySpec::Box {
                half_extents,
                center,
            } => ConvexBody::cuboid(
                center.clone().unwrap_or_else(|| vec![0.0; dim]),
                half_extents.clone(),
            ),
            BodySpec::PolytopeV { vertices } => ConvexBody::polytope_v(vertices.clone()),
        }
        .map_err(|e| invalid(field, e.to_string()))?;
        if body.dim() != dim {
            return Err(invalid(
                field,
                format!(
                    "body dimension {} does not match expected {dim}",
                    body.dim()
                ),
            ));
        }
        Ok(body)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusLawSpec {
    Constant(f64),
    Discrete(Vec<(f64, f64)>),
}

impl RadiusLawSpec {
    fn build(&self) -> RadiusLaw {
        match self {
            RadiusLawSpec::Constant(r) => RadiusLaw::Constant(*r),
            RadiusLawSpec::Discrete(atoms) => RadiusLaw::Discrete(atoms.clone()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    DeterministicBall {
        rho: f64,
    },
    RotatedFixed {
        body: BodySpec,
    },
    RotatedDilated {
        body: BodySpec,
        radius_law: RadiusLawSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub d: usize,
    pub k: usize,
    pub gamma: f64,
    pub law: LawSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn build(&self) -> Result<Vec<f64>, ConfigError> {
        if self.count < 2 || !(self.max > self.min) {
            return Err(invalid("r_grid", "need count ≥ 2 and max > min"));
        }
        let n = self.count;
        let grid: Vec<f64> = match self.scale {
            GridScale::Linear => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
            GridScale::Log => {
                if !(self.min > 0.0) {
                    return Err(invalid("r_grid", "log scale needs min > 0"));
                }
                (0..n)
                    .map(|i| self.min * (self.max / self.min).powf(i as f64 / (n - 1) as f64))
                    .collect()
            }
        };
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("r_grid", "grid must be strictly increasing"));
        }
        Ok(grid)
    }
}

fn default_emit_svg() -> bool {
    false
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub process: ProcessSpec,
    pub window: BodySpec,
    pub n_reps: usize,
    pub n_points: usize,
    #[serde(default)]
    pub r_grid: Option<GridSpec>,
    /// Intrinsic-volume order for mean_check / bound_curves / coeff_dump /
    /// scaling_probe; defaults to d (the volume).
    #[serde(default)]
    pub j: Option<usize>,
    pub seed: u64,
    #[serde(default = "default_emit_svg")]
    pub emit_svg: bool,
    #[serde(default)]
    pub out_dir: Option<String>,
    /// Extra k-flat reference curve in bound_curves (base degenerate to the
    /// origin; evaluation only, never simulated).
    #[serde(default)]
    pub kflat: bool,
    /// Tolerance on |slope − (1 − k/d)| for scaling_probe.
    #[serde(default)]
    pub slope_tol: Option<f64>,
}

/// Everything the runner needs, with all bodies constructed and validated.
#[derive(Debug)]
pub struct ResolvedConfig {
    pub raw: ExperimentConfig,
    pub cfg: ProcessConfig,
    pub window: ConvexBody,
    pub r_grid: Vec<f64>,
    pub j: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        if cfg.schema_version != 1 {
            return Err(ConfigError::SchemaVersion(cfg.schema_version));
        }
        Ok(cfg)
    }

    pub fn resolve(self) -> Result<ResolvedConfig, ConfigError> {
        let d = self.process.d;
        let k = self.process.k;
        if d == 0 || k >= d {
            return Err(invalid("process", "need 0 ≤ k ≤ d−1"));
        }
        let dk = d - k;
        let law = match &self.process.law {
            LawSpec::DeterministicBall { rho } => BaseDirectionLaw::deterministic_ball(dk, *rho),
            LawSpec::RotatedFixed { body } => {
                BaseDirectionLaw::rotated_fixed(body.build(dk, "process.law.body")?)
            }
            LawSpec::RotatedDilated { body, radius_law } => BaseDirectionLaw::rotated_dilated(
                body.build(dk, "process.law.body")?,
                radius_law.build(),
            ),
        }
        .map_err(|e| invalid("process.law", e.to_string()))?;
        let cfg = ProcessConfig::new(d, k, self.process.gamma, law)
            .map_err(|e| invalid("process", e.to_string()))?;
        // Re-centre the window so the origin is its centroid.
        let window = self.window.build(d, "window")?;
        let centre = window
            .centroid_hint()
            .map_err(|e| invalid("window", e.to_string()))?;
        let shift: Vec<f64> = centre.iter().map(|c| -c).collect();
        let window = window.translated(&shift);
        let j = self.j.unwrap_or(d);
        if j > d {
            return Err(invalid("j", format!("j = {j} exceeds d = {d}")));
        }
        if j < k
            && matches!(
                self.experiment,
                ExperimentKind::BoundCurves
                    | ExperimentKind::CoeffDump
                    | ExperimentKind::ScalingProbe
            )
        {
            return Err(invalid(
                "j",
                format!("intrinsic-volume bounds require j ≥ k (got j = {j}, k = {k})"),
            ));
        }
        if self.n_reps == 0 {
            return Err(invalid("n_reps", "must be ≥ 1"));
        }
        let r_grid = match &self.r_grid {
            Some(g) => g.build()?,
            None => Vec::new(),
        };
        if r_grid.is_empty()
            && matches!(
                self.experiment,
                ExperimentKind::TailCompare
                    | ExperimentKind::BoundCurves
                    | ExperimentKind::ScalingProbe
            )
        {
            return Err(invalid("r_grid", "this experiment requires an r grid"));
        }
        Ok(ResolvedConfig {
            raw: self,
            cfg,
            window,
            r_grid,
            j,
        })
    }
}
