//! Continuum scenarios on the periodic grid.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dislosim_core::continuum::plastic::hp_stable_dt;
use dislosim_core::continuum::slip::{slip_rate, slip_stable_dt, Godunov};
use dislosim_core::continuum::snapshot::GridSnapshot;
use dislosim_core::continuum::{
    classical_step, dislocation_density_of_slip, energy_ledger, evolve_hp, evolve_slip, hp_rate, solve_elasticity_with, ElasticitySolver,
    MechanicalState, PlasticDistortionField, SlipField, SlipSystem, TimeSeries, TimeSeriesRow,
};
use dislosim_core::measures::DensityGrid;
use dislosim_core::mobility::MobilityLaw;
use dislosim_core::spectral::Spectral;
use dislosim_core::tensor::Elasticity;
use dislosim_core::{PeriodicCell, SymTensor3, Vec3};

use super::{Context, Estimate, Report, Result, Scenario};
use crate::config::{Config, Shape};
use crate::error::CliError;

const DIV_TOL: f64 = 1e-10;
const VOLUME_TOL: f64 = 1e-12;
const GROWTH_TOL: f64 = 1e-10;

struct Setup {
    cell: PeriodicCell,
    d: Elasticity,
    law: MobilityLaw,
    sys: SlipSystem,
    mean: SymTensor3,
    solver: Box<dyn ElasticitySolver>,
    spectral: Spectral,
}

impl Setup {
    fn new(cfg: &Config) -> Result<Self> {
        let cell = cfg.cell()?;
        let sys = cfg.slip_system()?;
        sys.normal_axis().map_err(|e| cfg.err("slip", "normal", e))?;
        Ok(Setup {
            cell,
            d: cfg.elasticity()?,
            law: cfg.law()?,
            sys,
            mean: cfg.mean_stress(),
            solver: cfg.solver()?,
            spectral: Spectral::new(cell),
        })
    }

    fn solve(&self, plastic_strain: &[SymTensor3]) -> Result<MechanicalState> {
        let st = solve_elasticity_with(self.solver.as_ref(), &self.spectral, &self.d, plastic_strain, &self.mean)?;
        if st.div_residual > DIV_TOL {
            return Err(CliError::invariant(format!("equilibrium residual {:e} exceeds {DIV_TOL:e}", st.div_residual)));
        }
        Ok(st)
    }

    /// Slip field from `[initial]`, or zero when the section is absent.
    fn initial(&self, cfg: &Config) -> Result<SlipField> {
        let Some(i) = &cfg.initial else {
            return Ok(SlipField::zero(self.cell, self.sys));
        };
        let [p, q] = self.sys.plane_axes()?;
        let h = self.cell.spacing();
        let w = i.smoothing.unwrap_or(3.0 * h[p].max(h[q]));
        if !(w > 0.0) {
            return Err(cfg.err("initial", "smoothing", "must be positive"));
        }
        let c = Vec3(i.center);
        match i.shape {
            Shape::Disc => {
                let r = i.radius.ok_or_else(|| cfg.err("initial", "shape", "a disc needs a radius"))?;
                SlipField::smoothed_disc(self.cell, self.sys, c, r, w, i.height).map_err(|e| cfg.err("initial", "radius", e))
            }
            Shape::Strip => {
                let axis = i.axis.ok_or_else(|| cfg.err("initial", "shape", "a strip needs an axis"))?;
                let hw = i.half_width.ok_or_else(|| cfg.err("initial", "shape", "a strip needs a half_width"))?;
                if axis > 2 {
                    return Err(cfg.err("initial", "axis", "must be 0, 1 or 2"));
                }
                SlipField::smoothed_strip(self.cell, self.sys, axis, c[axis], hw, w, i.height).map_err(|e| cfg.err("initial", "axis", e))
            }
        }
    }

    fn memory(&self) -> usize {
        // slip, stress, displacement and the complex spectra of a solve
        self.cell.node_count() * 8 * (1 + 6 + 3 + 2 * 9)
    }
}

fn row(t: f64, st: &MechanicalState, dissipated: f64, weight: f64) -> TimeSeriesRow {
    TimeSeriesRow {
        t,
        psi: st.free_energy,
        dissipation: dissipated,
        max_div_residual: st.div_residual,
        total_dislocation_weight: weight,
    }
}

fn step_dt(cfg: &Config, t: f64) -> Result<f64> {
    let r = cfg.run_section()?;
    Ok(r.dt.min(r.t_end - t).max(f64::MIN_POSITIVE))
}

fn snapshot(out: &Path, files: &mut Vec<PathBuf>, name: String, snap: GridSnapshot) -> Result<()> {
    let p = out.join(name);
    snap.write(&p)?;
    files.push(p);
    Ok(())
}

fn slip_estimate(cfg: &Config) -> Result<Estimate> {
    let s = Setup::new(cfg)?;
    let sf = s.initial(cfg)?;
    cfg.run_section()?;
    let st = s.solve(&sf.plastic_strain())?;
    Ok(Estimate {
        stable_dt: Some(slip_stable_dt(&sf, &st, &s.law)?),
        memory_bytes: s.memory(),
        notes: vec![format!("solver {}, {} steps", s.solver.name(), cfg.steps()?)],
    })
}

/// Scalar slip on one plane, driven by the self-stress and the mean load.
pub struct SlipPlane;

impl Scenario for SlipPlane {
    fn name(&self) -> &'static str {
        "slip-plane"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        slip_estimate(cfg)
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        let s = Setup::new(cfg)?;
        let every = cfg.run_section()?.snapshot_every;
        let steps = ctx.cap_steps(cfg.steps()?);
        let out = ctx.prepare_output()?;
        let g = s.sys.g();
        let b_hat = s.sys.b_hat();
        let mut sf = s.initial(cfg)?;
        let mut st = s.solve(&sf.plastic_strain())?;
        let mut t = 0.0;
        let mut dissipated = 0.0;
        let mut series = TimeSeries::default();
        let mut files = Vec::new();
        series.push(row(t, &st, dissipated, dislocation_density_of_slip(&sf).total_weight()));
        snapshot(out, &mut files, format!("eps_p_{:06}.grid", 0), GridSnapshot::scalar(&s.cell, "eps_p", &sf.eps_p)?)?;
        for k in 1..=steps {
            let dt = step_dt(cfg, t)?;
            let rate: Vec<Vec3> = slip_rate(&sf, &st, &s.law, &Godunov)?.into_iter().map(|r| g * r).collect();
            sf = evolve_slip(&sf, &st, &s.law, dt, &Godunov)?;
            let next = s.solve(&sf.plastic_strain())?;
            dissipated += energy_ledger(&st, &next, &rate, &b_hat, dt)?.dissipation;
            st = next;
            t += dt;
            series.push(row(t, &st, dissipated, dislocation_density_of_slip(&sf).total_weight()));
            if k % every == 0 || k == steps {
                snapshot(out, &mut files, format!("eps_p_{k:06}.grid"), GridSnapshot::scalar(&s.cell, "eps_p", &sf.eps_p)?)?;
            }
        }
        let path = out.join("timeseries.csv");
        series.write_csv(&path)?;
        files.push(path);
        Ok(Report {
            lines: vec![format!("t = {t:.6}, psi = {:.6e}, dissipated = {dissipated:.6e}", st.free_energy)],
            files,
        })
    }
}

/// Unloaded relaxation of the plastic distortion; the free energy must not
/// grow and `b̂·h_p` must stay zero.
pub struct Relaxation;

fn hp_weight(sp: &Spectral, hp: &PlasticDistortionField) -> Result<f64> {
    Ok(DensityGrid::from_vector_field(hp.cell, &sp.curl(&hp.hp))?.total_weight())
}

impl Scenario for Relaxation {
    fn name(&self) -> &'static str {
        "relaxation"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        let s = Setup::new(cfg)?;
        if s.mean != SymTensor3::default() {
            return Err(cfg.err("loading", "mean_stress", "relaxation runs without load; set every component to zero"));
        }
        if cfg.initial.is_none() {
            return Err(CliError::config("missing [initial] section"));
        }
        let hp = s.initial(cfg)?.to_distortion();
        cfg.run_section()?;
        let st = s.solve(&hp.plastic_strain())?;
        Ok(Estimate {
            stable_dt: Some(hp_stable_dt(&hp, &st, &s.law)),
            memory_bytes: s.memory() + s.cell.node_count() * 8 * 2,
            notes: vec![format!("psi0 = {:e}", st.free_energy)],
        })
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        self.validate(cfg)?;
        let s = Setup::new(cfg)?;
        let every = cfg.run_section()?.snapshot_every;
        let steps = ctx.cap_steps(cfg.steps()?);
        let out = ctx.prepare_output()?;
        let mut hp = s.initial(cfg)?.to_distortion();
        let mut st = s.solve(&hp.plastic_strain())?;
        let psi0 = st.free_energy;
        let mut t = 0.0;
        let mut dissipated = 0.0;
        let mut series = TimeSeries::default();
        let mut files = Vec::new();
        series.push(row(t, &st, dissipated, hp_weight(&s.spectral, &hp)?));
        snapshot(out, &mut files, format!("hp_{:06}.grid", 0), GridSnapshot::vector(&s.cell, "h_p", &hp.hp)?)?;
        for k in 1..=steps {
            let dt = step_dt(cfg, t)?;
            let rate = hp_rate(&hp, &st, &s.law)?;
            hp = evolve_hp(&hp, &st, &s.law, dt)?;
            let vol = hp.volume_residual();
            if vol > VOLUME_TOL {
                return Err(CliError::invariant(format!("step {k}: b·h_p = {vol:e} exceeds {VOLUME_TOL:e}")));
            }
            let next = s.solve(&hp.plastic_strain())?;
            let rec = energy_ledger(&st, &next, &rate, &hp.b_hat, dt)?;
            let growth = rec.psi_after - rec.psi_before;
            if growth > GROWTH_TOL * psi0 {
                return Err(CliError::invariant(format!(
                    "step {k}: free energy grew by {growth:e} (> {GROWTH_TOL:e} psi0)"
                )));
            }
            dissipated += rec.dissipation;
            st = next;
            t += dt;
            series.push(row(t, &st, dissipated, hp_weight(&s.spectral, &hp)?));
            if k % every == 0 || k == steps {
                snapshot(out, &mut files, format!("hp_{k:06}.grid"), GridSnapshot::vector(&s.cell, "h_p", &hp.hp)?)?;
            }
        }
        let path = out.join("timeseries.csv");
        series.write_csv(&path)?;
        files.push(path);
        Ok(Report {
            lines: vec![format!(
                "psi {psi0:.6e} -> {:.6e} at t = {t:.6}, dissipated {dissipated:.6e}",
                st.free_energy
            )],
            files,
        })
    }
}

/// The slip-plane law next to the pointwise classical law from the same
/// initial state, each with its own self-stress.
pub struct ClassicalCompare;

impl Scenario for ClassicalCompare {
    fn name(&self) -> &'static str {
        "classical-compare"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        let mut e = slip_estimate(cfg)?;
        e.memory_bytes *= 2;
        Ok(e)
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        let s = Setup::new(cfg)?;
        let every = cfg.run_section()?.snapshot_every;
        let steps = ctx.cap_steps(cfg.steps()?);
        let out = ctx.prepare_output()?;
        let axis = s.sys.normal_axis()?;
        let plane: Vec<usize> = (0..s.cell.node_count()).filter(|&i| s.cell.coords(i)[axis] == 0).collect();
        let mut new = s.initial(cfg)?;
        let mut old = new.clone();
        let mut st_new = s.solve(&new.plastic_strain())?;
        let mut st_old = st_new.clone();
        let mut t = 0.0;
        let mut csv = String::from("t,x1,x2,x3,eps_p_new,eps_p_classical\n");
        let dump = |csv: &mut String, t: f64, new: &SlipField, old: &SlipField| {
            for &i in &plane {
                let x = s.cell.position(i);
                let _ = writeln!(csv, "{t:?},{:?},{:?},{:?},{:?},{:?}", x[0], x[1], x[2], new.eps_p[i], old.eps_p[i]);
            }
        };
        dump(&mut csv, t, &new, &old);
        for k in 1..=steps {
            let dt = step_dt(cfg, t)?;
            new = evolve_slip(&new, &st_new, &s.law, dt, &Godunov)?;
            old = classical_step(&old, &st_old, &s.law, dt)?;
            st_new = s.solve(&new.plastic_strain())?;
            st_old = s.solve(&old.plastic_strain())?;
            t += dt;
            if k % every == 0 || k == steps {
                dump(&mut csv, t, &new, &old);
            }
        }
        let path = out.join("classical_compare.csv");
        std::fs::write(&path, csv)?;
        let diff = new.eps_p.iter().zip(&old.eps_p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok(Report {
            lines: vec![format!(
                "t = {t:.6}, psi new {:.6e}, classical {:.6e}, max |eps_p difference| {diff:.3e}",
                st_new.free_energy, st_old.free_energy
            )],
            files: vec![path],
        })
    }
}
