//! Scenario configuration: one JSON document per run.
//!
//! Every section has defaults, so `{}` is a valid config. Unknown keys are
//! rejected and errors carry the dotted path of the offending key.

use std::f64::consts::PI;
use std::path::Path;

use dspin::catalog::{CurveId, CurveParams};
use dspin::fermi::default_q_grid;
use dspin::interferometer::DEFAULT_ARM_STEPS;
use dspin::topology::{ChartClosure, DEFAULT_GRID};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
#[error("config error at `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RunKind {
    Describe,
    Frames,
    FermiCheck,
    Texture,
    Wilson,
    Flux,
    Conductance,
    ConventionReport,
}

impl RunKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RunKind::Describe => "describe",
            RunKind::Frames => "frames",
            RunKind::FermiCheck => "fermi-check",
            RunKind::Texture => "texture",
            RunKind::Wilson => "wilson",
            RunKind::Flux => "flux",
            RunKind::Conductance => "conductance",
            RunKind::ConventionReport => "convention-report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Optional; must agree with the subcommand when given.
    #[serde(default)]
    pub run: Option<RunKind>,
    #[serde(default)]
    pub curve: CurveSpec,
    #[serde(default)]
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub direction: DirectionSpec,
    #[serde(default)]
    pub field: FieldSpec,
    #[serde(default)]
    pub fermi: FermiSpec,
    #[serde(default)]
    pub flux: FluxSpec,
    #[serde(default)]
    pub conductance: ConductanceSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSpec {
    pub id: String,
    pub rho: f64,
    pub c: f64,
    pub f: f64,
    pub r: f64,
    pub alpha: f64,
    pub length: f64,
    pub range: Option<[f64; 2]>,
}

impl Default for CurveSpec {
    fn default() -> Self {
        let p = CurveParams::<f64>::default();
        Self {
            id: CurveId::HelixConst.as_str().into(),
            rho: p.rho,
            c: p.c,
            f: p.f,
            r: p.r,
            alpha: p.alpha,
            length: p.length,
            range: None,
        }
    }
}

impl CurveSpec {
    pub fn curve_id(&self) -> Result<CurveId, ConfigError> {
        self.id.parse().map_err(|_| {
            let known: Vec<&str> = CurveId::ALL.iter().map(|c| c.as_str()).collect();
            ConfigError::new("curve.id", format!("unknown curve `{}`; expected one of {}", self.id, known.join(", ")))
        })
    }

    pub fn params(&self) -> CurveParams<f64> {
        CurveParams {
            rho: self.rho,
            c: self.c,
            f: self.f,
            r: self.r,
            alpha: self.alpha,
            length: self.length,
            range: self.range.map(|[a, b]| (a, b)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSpec {
    #[default]
    Outward,
    Inward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSpec {
    #[default]
    Analytic,
    FiniteDifference,
}

/// Host surface options; the surface itself is fixed by the catalog curve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSpec {
    pub orientation: OrientationSpec,
    pub derivatives: DerivativeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// Arclength intervals for describe, frames and texture (rows = samples + 1).
    pub samples: usize,
    /// Propagator factors per texture interval.
    pub substeps: usize,
    /// Product segment counts for the wilson run.
    pub wilson_segments: Vec<usize>,
    /// Simpson panels for boundary integrals.
    pub quad_n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { samples: 512, substeps: 8, wilson_segments: vec![1_000, 10_000, 100_000], quad_n: 4096 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameAxisSpec {
    #[serde(rename = "t")]
    T,
    N,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Lab-frame Bloch vector, normalized on use.
    Bloch([f64; 3]),
    /// Frame axis at the starting point of the texture.
    FrameAxis(FrameAxisSpec),
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::FrameAxis(FrameAxisSpec::N)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionSpec {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSpec {
    #[default]
    Connection,
    Zeeman,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSpec {
    /// Constant lab-frame field added to the geometric one.
    pub extra: [f64; 3],
    pub coupling: CouplingSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FermiSpec {
    /// Test points as fractions of the curve length.
    pub points: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub christoffel_step: f64,
}

impl Default for FermiSpec {
    fn default() -> Self {
        Self { points: vec![0.2, 0.5, 0.8], q_grid: default_q_grid(), christoffel_step: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureSpec {
    #[default]
    Straight,
    ViaUMin,
    ViaUMax,
}

impl From<ClosureSpec> for ChartClosure {
    fn from(c: ClosureSpec) -> Self {
        match c {
            ClosureSpec::Straight => ChartClosure::Straight,
            ClosureSpec::ViaUMin => ChartClosure::ViaUMin,
            ClosureSpec::ViaUMax => ChartClosure::ViaUMax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxSpec {
    /// Chart point selecting the enclosed region; required for flux runs.
    pub seed: Option<[f64; 2]>,
    pub closure: ClosureSpec,
    pub euler_chi: i32,
    pub vertices: usize,
    pub grid: usize,
}

impl Default for FluxSpec {
    fn default() -> Self {
        Self { seed: None, closure: ClosureSpec::Straight, euler_chi: 1, vertices: 16_384, grid: DEFAULT_GRID }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConductanceSpec {
    pub phi_in: f64,
    /// Detector positions over one period.
    pub points: usize,
    pub arm_steps: usize,
    pub dynamical_phase: bool,
    pub k: f64,
}

impl Default for ConductanceSpec {
    fn default() -> Self {
        Self { phi_in: 0.0, points: 64, arm_steps: DEFAULT_ARM_STEPS, dynamical_phase: false, k: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSpec {
    /// Adaptive ODE oracle tolerance.
    pub ode: f64,
    /// Allowed distance between product and oracle propagators.
    pub oracle_agreement: f64,
    /// Allowed |Gauss–Bonnet residual|.
    pub gauss_bonnet: f64,
    /// Allowed lab-frame precession residual r1.
    pub precession: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self { ode: 1e-12, oracle_agreement: 1e-6, gauss_bonnet: 1e-6, precession: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Output directory; `--out` takes precedence.
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: "dspin-out".into() }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "<root>".to_string() } else { path };
            ConfigError::new(key, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical serialization: every field present, fixed order, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.curve;
        c.curve_id()?;
        let positive = |key: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be positive and finite, got {x}")))
            }
        };
        positive("curve.rho", c.rho)?;
        positive("curve.f", c.f)?;
        positive("curve.r", c.r)?;
        positive("curve.length", c.length)?;
        if !c.c.is_finite() {
            return Err(ConfigError::new("curve.c", "must be finite"));
        }
        if !(c.alpha > 0.0 && c.alpha < PI) {
            return Err(ConfigError::new("curve.alpha", format!("must lie in (0, π), got {}", c.alpha)));
        }
        if let Some([a, b]) = c.range {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(ConfigError::new("curve.range", format!("needs finite t0 < t1, got [{a}, {b}]")));
            }
        }
        let g = &self.grid;
        if g.samples < 4 {
            return Err(ConfigError::new("grid.samples", format!("must be at least 4, got {}", g.samples)));
        }
        if g.substeps == 0 {
            return Err(ConfigError::new("grid.substeps", "must be at least 1"));
        }
        if g.wilson_segments.is_empty() || g.wilson_segments.contains(&0) {
            return Err(ConfigError::new("grid.wilson_segments", "needs one or more positive counts"));
        }
        if g.quad_n < 128 {
            return Err(ConfigError::new("grid.quad_n", format!("must be at least 128, got {}", g.quad_n)));
        }
        if let InitialSpec::Bloch(m) = self.initial {
            let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
            if !(n > 1e-12 && n.is_finite()) {
                return Err(ConfigError::new("initial.bloch", "must be a nonzero finite vector"));
            }
        }
        if self.field.extra.iter().any(|x| !x.is_finite()) {
            return Err(ConfigError::new("field.extra", "must be finite"));
        }
        let f = &self.fermi;
        if f.points.is_empty() || f.points.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ConfigError::new("fermi.points", "needs one or more fractions in [0, 1]"));
        }
        if f.q_grid.len() < 2 || f.q_grid.iter().any(|q| !(q.is_finite() && *q != 0.0)) {
            return Err(ConfigError::new("fermi.q_grid", "needs at least two finite nonzero offsets"));
        }
        positive("fermi.christoffel_step", f.christoffel_step)?;
        let fl = &self.flux;
        if fl.vertices < 16 {
            return Err(ConfigError::new("flux.vertices", "must be at least 16"));
        }
        if fl.grid < 256 {
            return Err(ConfigError::new("flux.grid", format!("must be at least 256, got {}", fl.grid)));
        }
        let cd = &self.conductance;
        if cd.points < 64 {
            return Err(ConfigError::new("conductance.points", format!("must be at least 64, got {}", cd.points)));
        }
        if cd.arm_steps == 0 {
            return Err(ConfigError::new("conductance.arm_steps", "must be at least 1"));
        }
        if !cd.phi_in.is_finite() || !cd.k.is_finite() {
            return Err(ConfigError::new("conductance", "phi_in and k must be finite"));
        }
        let t = &self.tolerances;
        if !(t.ode >= 1e-12) {
            return Err(ConfigError::new("tolerances.ode", format!("must be at least 1e-12, got {}", t.ode)));
        }
        positive("tolerances.oracle_agreement", t.oracle_agreement)?;
        positive("tolerances.gauss_bonnet", t.gauss_bonnet)?;
        positive("tolerances.precession", t.precession)?;
        if self.output.dir.is_empty() {
            return Err(ConfigError::new("output.dir", "must not be empty"));
        }
        Ok(())
    }
}
