//! Scenario configuration file (TOML).
//!
//! Every section rejects unknown keys. Semantic errors are reported with
//! the line of the offending key when it can be located in the source.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use dislosim_core::continuum::elasticity::default_solver;
use dislosim_core::continuum::{elasticity_solver_registry, ElasticitySolver, SlipSystem, SolverParams};
use dislosim_core::mobility::{LawParams, MobilityLaw};
use dislosim_core::tensor::{Elasticity, GeneralElasticity, IsotropicElasticity};
use dislosim_core::{PeriodicCell, SymTensor3, Vec3};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    pub geometry: Option<Geometry>,
    pub material: Option<Material>,
    pub mobility: Option<Mobility>,
    #[serde(default)]
    pub loading: Loading,
    pub slip: Option<Slip>,
    pub initial: Option<Initial>,
    pub curve: Option<CurveSection>,
    pub analytic: Option<Analytic>,
    pub run: Option<RunSection>,
    #[serde(default)]
    pub io: Io,
    /// Source text, kept to locate keys in error messages.
    #[serde(skip)]
    pub source: String,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub lengths: [f64; 3],
    pub resolution: [usize; 3],
}

/// Either `lambda` and `mu`, or a 6×6 `stiffness` in Mandel notation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub stiffness: Option<[[f64; 6]; 6]>,
    /// Elasticity solver name; defaults by material symmetry.
    pub solver: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mobility {
    #[serde(default = "default_law")]
    pub law: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub table: Option<Vec<[f64; 2]>>,
}

fn default_law() -> String {
    "power".into()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Loading {
    #[serde(default)]
    pub mean_stress: StressComponents,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StressComponents {
    #[serde(default)]
    pub t11: f64,
    #[serde(default)]
    pub t22: f64,
    #[serde(default)]
    pub t33: f64,
    #[serde(default)]
    pub t12: f64,
    #[serde(default)]
    pub t13: f64,
    #[serde(default)]
    pub t23: f64,
}

impl StressComponents {
    pub fn tensor(&self) -> SymTensor3 {
        SymTensor3::new(self.t11, self.t22, self.t33, self.t12, self.t13, self.t23)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slip {
    pub burgers: [f64; 3],
    pub normal: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum Shape {
    Disc,
    Strip,
}

/// Initial slip field: a smoothed disc or strip with a cosine edge of
/// half-width `smoothing` (default three grid spacings).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub shape: Shape,
    pub center: [f64; 3],
    pub radius: Option<f64>,
    pub half_width: Option<f64>,
    pub axis: Option<usize>,
    #[serde(default = "one")]
    pub height: f64,
    pub smoothing: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Curves from a file, or a circular loop in the slip plane.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub file: Option<PathBuf>,
    pub radius: Option<f64>,
    pub nodes: Option<usize>,
    #[serde(default)]
    pub center: [f64; 3],
    pub h_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analytic {
    pub b1: f64,
    pub b3: f64,
    #[serde(default = "default_core")]
    pub core_radius: f64,
}

fn default_core() -> f64 {
    dislosim_core::analytic::DEFAULT_CORE_RADIUS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
}

fn default_snapshot_every() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Io {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl Default for Io {
    fn default() -> Self {
        Io { output_dir: default_output() }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

impl Config {
    pub fn parse(src: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut c: Config = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(src, s.start));
            let msg = e.message().trim().to_string();
            CliError::config(match line {
                Some(l) => format!("line {l}: {msg}"),
                None => msg,
            })
        })?;
        c.source = src.to_string();
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&src, path.parent().unwrap_or(Path::new(".")))
    }

    /// Error for `section.key`, citing its line when found.
    pub fn err(&self, section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
        match locate(&self.source, section, key) {
            Some(l) => CliError::config(format!("line {l}: {section}.{key}: {msg}")),
            None => CliError::config(format!("{section}.{key}: {msg}")),
        }
    }

    pub fn cell(&self) -> Result<PeriodicCell, CliError> {
        let g = self.geometry.as_ref().ok_or_else(|| CliError::config("missing [geometry] section"))?;
        if let Some(n) = g.resolution.iter().find(|&&n| n % 2 != 0 || n < 8) {
            return Err(self.err(
                "geometry",
                "resolution",
                format!("{n} is not allowed: the spectral solver needs even resolutions of at least 8"),
            ));
        }
        PeriodicCell::new(g.lengths, g.resolution).map_err(|e| self.err("geometry", "lengths", e))
    }

    pub fn elasticity(&self) -> Result<Elasticity, CliError> {
        let m = self.material.as_ref().ok_or_else(|| CliError::config("missing [material] section"))?;
        match (m.lambda, m.mu, &m.stiffness) {
            (Some(l), Some(mu), None) => Ok(IsotropicElasticity::new(l, mu).map_err(|e| self.err("material", "mu", e))?.into()),
            (None, None, Some(rows)) => Ok(GeneralElasticity::from_rows(*rows).map_err(|e| self.err("material", "stiffness", e))?.into()),
            _ => Err(CliError::config("[material] needs either lambda and mu, or stiffness")),
        }
    }

    pub fn solver(&self) -> Result<Box<dyn ElasticitySolver>, CliError> {
        let d = self.elasticity()?;
        match self.material.as_ref().and_then(|m| m.solver.as_deref()) {
            Some(name) => elasticity_solver_registry()
                .create(name, &SolverParams::new(d))
                .map_err(|e| self.err("material", "solver", e)),
            None => Ok(default_solver(&d)),
        }
    }

    pub fn isotropic(&self) -> Result<IsotropicElasticity, CliError> {
        match self.elasticity()? {
            Elasticity::Isotropic(i) => Ok(i),
            _ => Err(self.err("material", "stiffness", "this scenario needs an isotropic material (lambda, mu)")),
        }
    }

    pub fn law(&self) -> Result<MobilityLaw, CliError> {
        let m = self.mobility.as_ref().ok_or_else(|| CliError::config("missing [mobility] section"))?;
        let params = LawParams {
            c: m.c.unwrap_or(1.0),
            gamma: m.gamma.unwrap_or(2.0),
            table: m.table.as_ref().map(|t| t.iter().map(|p| (p[0], p[1])).collect()).unwrap_or_default(),
        };
        MobilityLaw::from_registry(&m.law, &params).map_err(|e| self.err("mobility", "law", e))
    }

    pub fn mean_stress(&self) -> SymTensor3 {
        self.loading.mean_stress.tensor()
    }

    pub fn slip_system(&self) -> Result<SlipSystem, CliError> {
        let s = self.slip.as_ref().ok_or_else(|| CliError::config("missing [slip] section"))?;
        SlipSystem::new(Vec3(s.burgers), Vec3(s.normal)).map_err(|e| self.err("slip", "burgers", e))
    }

    pub fn run_section(&self) -> Result<&RunSection, CliError> {
        let r = self.run.as_ref().ok_or_else(|| CliError::config("missing [run] section"))?;
        if !(r.dt > 0.0 && r.dt.is_finite()) {
            return Err(self.err("run", "dt", "must be positive"));
        }
        if !(r.t_end >= 0.0 && r.t_end.is_finite()) {
            return Err(self.err("run", "t_end", "must be nonnegative"));
        }
        if r.snapshot_every == 0 {
            return Err(self.err("run", "snapshot_every", "must be at least 1"));
        }
        Ok(r)
    }

    /// Number of steps of size `dt` needed to reach `t_end`.
    pub fn steps(&self) -> Result<usize, CliError> {
        let r = self.run_section()?;
        Ok((r.t_end / r.dt - 1e-9).ceil().max(0.0) as usize)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` (or a dotted subsection of it).
fn locate(src: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            continue;
        }
        let in_section = current == section || current.starts_with(&format!("{section}."));
        if in_section && line.split('=').next().map(str::trim) == Some(key) {
            return Some(i + 1);
        }
    }
    None
}
