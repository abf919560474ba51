//! Named experiments selected by `scenario.name`.

mod analytic;
mod curve;
mod field;

use std::path::{Path, PathBuf};

use dislosim_core::registry::Registry;

use crate::config::Config;
use crate::error::CliError;

pub type Result<T> = std::result::Result<T, CliError>;

/// Options from the command line that apply to every scenario.
#[derive(Debug, Clone)]
pub struct Context {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub max_steps: Option<usize>,
}

impl Context {
    pub fn prepare_output(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.output_dir)
            .map_err(|e| CliError::config(format!("cannot create output dir {}: {e}", self.output_dir.display())))?;
        Ok(&self.output_dir)
    }

    pub fn cap_steps(&self, steps: usize) -> usize {
        match self.max_steps {
            Some(m) if m < steps => {
                log::warn!("stopping after {m} of {steps} steps (--max-steps)");
                m
            }
            _ => steps,
        }
    }
}

/// Dry-run findings printed by `validate`.
#[derive(Debug, Clone, Default)]
pub struct Estimate {
    pub stable_dt: Option<f64>,
    pub memory_bytes: usize,
    pub notes: Vec<String>,
}

/// Human-readable summary and the files written.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub trait Scenario {
    fn name(&self) -> &'static str;
    fn validate(&self, cfg: &Config) -> Result<Estimate>;
    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report>;
}

pub fn registry() -> Registry<dyn Scenario> {
    let mut r: Registry<dyn Scenario> = Registry::new("scenario");
    r.register("field-sample", |_| Ok(Box::new(analytic::FieldSample)));
    r.register("verify-analytic", |_| Ok(Box::new(analytic::VerifyAnalytic)));
    r.register("curve-glide", |_| Ok(Box::new(curve::CurveGlide)));
    r.register("loop-shrink", |_| Ok(Box::new(curve::LoopShrink)));
    r.register("slip-plane", |_| Ok(Box::new(field::SlipPlane)));
    r.register("relaxation", |_| Ok(Box::new(field::Relaxation)));
    r.register("classical-compare", |_| Ok(Box::new(field::ClassicalCompare)));
    r
}

pub fn lookup(name: &str) -> Result<Box<dyn Scenario>> {
    Ok(registry().create(name, &())?)
}
