//! Scenarios for discrete dislocation curves under a uniform load.

use std::fmt::Write as _;

use dislosim_core::continuum::SlipSystem;
use dislosim_core::curves::{self, CurveState, StepOptions, UniformStress};
use dislosim_core::measures::{read_curves, DislocationCurve};
use dislosim_core::mobility::MobilityLaw;

use super::{Context, Estimate, Report, Result, Scenario};
use crate::config::Config;
use crate::error::CliError;

/// Circle of radius `r` in the slip plane, oriented so that a positive
/// resolved shear expands it.
fn circle(sys: &SlipSystem, center: [f64; 3], r: f64, nodes: usize) -> Result<DislocationCurve> {
    let e_a = sys.b_hat();
    let e_b = sys.g().cross(&e_a);
    Ok(DislocationCurve::circle(dislosim_core::Vec3(center), r, nodes, e_a, e_b, 0.5, sys.burgers())?)
}

fn initial_curves(cfg: &Config) -> Result<Vec<DislocationCurve>> {
    let c = cfg.curve.as_ref().ok_or_else(|| CliError::config("missing [curve] section"))?;
    if let Some(f) = &c.file {
        let curves = read_curves(&cfg.resolve(f)).map_err(|e| cfg.err("curve", "file", e))?;
        if curves.is_empty() {
            return Err(cfg.err("curve", "file", "no curves in file"));
        }
        return Ok(curves);
    }
    let sys = cfg.slip_system()?;
    let r = c.radius.ok_or_else(|| cfg.err("curve", "radius", "needed when no curve file is given"))?;
    if !(r > 0.0) {
        return Err(cfg.err("curve", "radius", "must be positive"));
    }
    let n = c.nodes.unwrap_or(64);
    if n < 8 {
        return Err(cfg.err("curve", "nodes", "a loop needs at least 8 nodes"));
    }
    Ok(vec![circle(&sys, c.center, r, n)?])
}

fn options(cfg: &Config) -> StepOptions {
    StepOptions {
        h_max: cfg.curve.as_ref().and_then(|c| c.h_max),
    }
}

/// Length-weighted dissipation rate of one curve.
fn dissipation_rate(state: &CurveState, stress: &UniformStress, law: &MobilityLaw) -> Result<f64> {
    let d = curves::nodal_dissipation(state, stress, law)?;
    let n = d.len();
    let mut w = vec![0.0; n];
    for (i, l) in state.curve.segment_lengths().into_iter().enumerate() {
        w[i] += 0.5 * l;
        w[(i + 1) % n] += 0.5 * l;
    }
    Ok(d.iter().zip(&w).map(|(a, b)| a * b).sum())
}

fn stable_dt(states: &[CurveState], stress: &UniformStress, law: &MobilityLaw) -> Result<f64> {
    let mut dt = f64::INFINITY;
    for s in states {
        dt = dt.min(curves::stable_dt(s, stress, law)?);
    }
    Ok(dt)
}

const PLANE_TOL: f64 = 1e-10;

/// Glides curves from a file, or a circular loop, under the mean stress.
pub struct CurveGlide;

impl Scenario for CurveGlide {
    fn name(&self) -> &'static str {
        "curve-glide"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        let curves = initial_curves(cfg)?;
        let law = cfg.law()?;
        cfg.run_section()?;
        let states: Vec<CurveState> = curves.into_iter().map(CurveState::new).collect();
        let nodes: usize = states.iter().map(|s| s.curve.vertices().len()).sum();
        Ok(Estimate {
            stable_dt: Some(stable_dt(&states, &UniformStress(cfg.mean_stress()), &law)?),
            memory_bytes: nodes * 8 * 3 * 6,
            notes: vec![format!("{} curve(s), {nodes} nodes", states.len())],
        })
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        let law = cfg.law()?;
        let run = cfg.run_section()?;
        let steps = ctx.cap_steps(cfg.steps()?);
        let sys = cfg.slip.as_ref().map(|_| cfg.slip_system()).transpose()?;
        let stress = UniformStress(cfg.mean_stress());
        let opts = options(cfg);
        let out = ctx.prepare_output()?;
        let mut states: Vec<CurveState> = initial_curves(cfg)?.into_iter().map(CurveState::new).collect();
        let refs: Vec<_> = states.iter().map(|s| s.curve.vertices()[0]).collect();
        let mut csv = String::from("t,total_length,equivalent_radius,dissipation_rate,plane_residual\n");
        let mut files = Vec::new();
        for k in 0..=steps {
            let mut plane: f64 = 0.0;
            if let Some(sys) = &sys {
                for (s, r) in states.iter().zip(&refs) {
                    plane = plane.max(curves::plane_confinement_residual(s, &sys.g(), r)?);
                }
            }
            if plane > PLANE_TOL {
                return Err(CliError::invariant(format!(
                    "curves left their slip plane at t = {:?}: residual {plane:e} > {PLANE_TOL:e}",
                    states[0].time
                )));
            }
            let length: f64 = states.iter().map(|s| s.curve.length()).sum();
            let mut diss = 0.0;
            for s in &states {
                diss += dissipation_rate(s, &stress, &law)?;
            }
            let _ = writeln!(csv, "{:?},{length:?},{:?},{diss:?},{plane:?}", states[0].time, states[0].equivalent_radius());
            if k % run.snapshot_every == 0 || k == steps {
                files.push(curves::write_snapshot(out, &states)?);
            }
            if k == steps {
                break;
            }
            let dt = run.dt.min(run.t_end - states[0].time).max(f64::MIN_POSITIVE);
            for s in states.iter_mut() {
                *s = curves::step(s, &stress, &law, dt, &opts)?;
            }
        }
        let path = out.join("curve_series.csv");
        std::fs::write(&path, csv)?;
        files.push(path);
        Ok(Report {
            lines: vec![format!(
                "t = {:.6}, {} curve(s), total length {:.6}",
                states[0].time,
                states.len(),
                states.iter().map(|s| s.curve.length()).sum::<f64>()
            )],
            files,
        })
    }
}

/// A circular loop under uniform resolved shear, compared with the exact
/// radius `R0 + f(|b| m:T) t`.
pub struct LoopShrink;

const LOOP_TOL: f64 = 5e-3;

impl LoopShrink {
    fn setup(cfg: &Config) -> Result<(SlipSystem, CurveState, MobilityLaw, f64)> {
        let sys = cfg.slip_system()?;
        let c = cfg.curve.as_ref().ok_or_else(|| CliError::config("missing [curve] section"))?;
        if c.file.is_some() {
            return Err(cfg.err("curve", "file", "loop-shrink builds its own loop; use radius and nodes"));
        }
        let curve = initial_curves(cfg)?.remove(0);
        let law = cfg.law()?;
        let speed = law.f(sys.burgers().norm() * sys.m().contract(&cfg.mean_stress()));
        Ok((sys, CurveState::new(curve), law, speed))
    }
}

impl Scenario for LoopShrink {
    fn name(&self) -> &'static str {
        "loop-shrink"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        let (_, state, law, speed) = Self::setup(cfg)?;
        let run = cfg.run_section()?;
        let r0 = cfg.curve.as_ref().and_then(|c| c.radius).unwrap_or_default();
        let mut notes = vec![format!("exact radius {r0:.6} -> {:.6}", r0 + speed * run.t_end)];
        if r0 + speed * run.t_end <= 0.0 {
            notes.push("the loop collapses before t_end".into());
        }
        Ok(Estimate {
            stable_dt: Some(curves::stable_dt(&state, &UniformStress(cfg.mean_stress()), &law)?),
            memory_bytes: state.curve.vertices().len() * 8 * 3 * 6,
            notes,
        })
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        let (_, mut state, law, speed) = Self::setup(cfg)?;
        let run = cfg.run_section()?;
        let steps = ctx.cap_steps(cfg.steps()?);
        let stress = UniformStress(cfg.mean_stress());
        let opts = options(cfg);
        let out = ctx.prepare_output()?;
        let center = dislosim_core::Vec3(cfg.curve.as_ref().map(|c| c.center).unwrap_or_default());
        let radius = |s: &CurveState| -> f64 {
            let v = s.curve.vertices();
            v.iter().map(|x| (*x - center).norm()).sum::<f64>() / v.len() as f64
        };
        let r0 = radius(&state);
        let mut csv = String::from("t,radius,exact,rel_error\n");
        let mut worst: f64 = 0.0;
        for k in 0..=steps {
            let exact = r0 + speed * state.time;
            if exact <= 0.0 {
                return Err(CliError::config(format!("the exact loop collapses at t = {:.6}; reduce t_end", -r0 / speed)));
            }
            let r = radius(&state);
            let rel = (r - exact).abs() / exact;
            worst = worst.max(rel);
            let _ = writeln!(csv, "{:?},{r:?},{exact:?},{rel:?}", state.time);
            if k == steps {
                break;
            }
            let dt = run.dt.min(run.t_end - state.time).max(f64::MIN_POSITIVE);
            state = curves::step(&state, &stress, &law, dt, &opts)?;
        }
        let path = out.join("loop_shrink.csv");
        std::fs::write(&path, csv)?;
        let line = format!("radius {r0:.6} -> {:.6} at t = {:.6}, worst relative error {worst:.3e}", radius(&state), state.time);
        if worst > LOOP_TOL {
            println!("{line}");
            return Err(CliError::invariant(format!("loop radius relative error {worst:e} exceeds {LOOP_TOL:e}")));
        }
        Ok(Report { lines: vec![line], files: vec![path] })
    }
}
