//! Scenarios built on the straight-dislocation solution.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dislosim_core::analytic::StraightDislocation;
use dislosim_core::continuum::snapshot::GridSnapshot;
use dislosim_core::measures::test_fn::{cylinder_bump, FnVectorTest, SupportBox};
use dislosim_core::measures::VectorTestFunction;
use dislosim_core::{SymTensor3, Vec3};

use super::{Context, Estimate, Report, Result, Scenario};
use crate::config::Config;
use crate::error::CliError;

fn dislocation(cfg: &Config) -> Result<StraightDislocation> {
    let a = cfg.analytic.as_ref().ok_or_else(|| CliError::config("missing [analytic] section"))?;
    Ok(StraightDislocation::new(a.b1, a.b3, cfg.isotropic()?).map_err(|e| cfg.err("analytic", "b1", e))?.with_core_radius(a.core_radius))
}

/// Samples stress and displacement of a straight line through the cell
/// center, shifted by half a spacing so no node lies on the line or the cut.
pub struct FieldSample;

impl Scenario for FieldSample {
    fn name(&self) -> &'static str {
        "field-sample"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        let cell = cfg.cell()?;
        dislocation(cfg)?;
        Ok(Estimate {
            stable_dt: None,
            memory_bytes: cell.node_count() * 9 * 8,
            notes: vec![],
        })
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        let cell = cfg.cell()?;
        let d = dislocation(cfg)?;
        let out = ctx.prepare_output()?;
        let (l, h) = (cell.lengths(), cell.spacing());
        let origin = Vec3::new(0.5 * (l[0] + h[0]), 0.5 * (l[1] + h[1]), 0.0);
        let n = cell.node_count();
        let mut stress = Vec::with_capacity(n);
        let mut disp = Vec::with_capacity(n);
        for i in 0..n {
            let x = cell.position(i) - origin;
            stress.push(d.stress(&x)?);
            disp.push(d.displacement(&x)?);
        }
        let sp = out.join("stress.grid");
        let up = out.join("displacement.grid");
        GridSnapshot::sym(&cell, "stress", &stress)?.write(&sp)?;
        GridSnapshot::vector(&cell, "displacement", &disp)?.write(&up)?;
        let tmax = stress.iter().map(SymTensor3::max_abs).fold(0.0, f64::max);
        Ok(Report {
            lines: vec![format!("sampled {n} nodes, max |T| = {tmax:e}")],
            files: vec![sp, up],
        })
    }
}

/// Runs the displacement jump, equilibrium, continuity and traction-decay
/// checks and writes them as a table.
pub struct VerifyAnalytic;

struct Row {
    check: String,
    value: f64,
    tolerance: String,
    pass: bool,
}

impl Scenario for VerifyAnalytic {
    fn name(&self) -> &'static str {
        "verify-analytic"
    }

    fn validate(&self, cfg: &Config) -> Result<Estimate> {
        dislocation(cfg)?;
        Ok(Estimate::default())
    }

    fn run(&self, cfg: &Config, ctx: &Context) -> Result<Report> {
        let d = dislocation(cfg)?;
        let out = ctx.prepare_output()?;
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let b = d.burgers();
        let jump = Vec3::new(-b[0], 0.0, -b[2]);
        let eta = 1e-13;
        let mut rows = Vec::new();
        let (mut jump_err, mut cont_err) = (0.0_f64, 0.0_f64);
        for _ in 0..20 {
            let (x1, x3) = (rng.gen_range(0.1..10.0), rng.gen_range(-5.0..5.0));
            let (p, m) = (Vec3::new(x1, eta, x3), Vec3::new(x1, -eta, x3));
            jump_err = jump_err.max((d.displacement(&p)? - d.displacement(&m)? - jump).max_abs());
            cont_err = cont_err.max((d.stress(&p)? - d.stress(&m)?).max_abs());
        }
        rows.push(Row { check: "displacement jump error".into(), value: jump_err, tolerance: "<= 1e-10".into(), pass: jump_err <= 1e-10 });
        rows.push(Row { check: "stress jump across cut".into(), value: cont_err, tolerance: "<= 1e-10".into(), pass: cont_err <= 1e-10 });

        let x = Vec3::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
        let hs = [1e-2, 1e-3, 1e-4];
        let mut res = Vec::new();
        for &h in &hs {
            let r = d.verify_equilibrium(&x, h)?;
            rows.push(Row { check: format!("equilibrium residual h={h:e}"), value: r, tolerance: "-".into(), pass: true });
            res.push(r);
        }
        let slope = loglog_slope(&hs, &res);
        rows.push(Row { check: "equilibrium convergence order".into(), value: slope, tolerance: "2 +- 0.2".into(), pass: (slope - 2.0).abs() <= 0.2 });

        let sup = SupportBox::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0));
        let phis: Vec<(&str, Box<dyn VectorTestFunction>)> = vec![
            ("x1*x2 e1", Box::new(FnVectorTest::new(sup, |x| Vec3::new(x[0] * x[1], 0.0, 0.0) * cylinder_bump(x, 1.0, 1.0)))),
            (
                "(x1^2 - x2^2/2) e2",
                Box::new(FnVectorTest::new(sup, |x| Vec3::new(0.2, x[0] * x[0] - 0.5 * x[1] * x[1], 1.0) * cylinder_bump(x, 1.0, 1.0))),
            ),
            (
                "mixed",
                Box::new(FnVectorTest::new(sup, |x| Vec3::new(0.3 + x[0] * x[1] * (1.0 + x[2]), x[1] * x[1], x[0]) * cylinder_bump(x, 1.0, 1.0))),
            ),
        ];
        for (name, phi) in &phis {
            let mut prev = f64::INFINITY;
            let mut decreasing = true;
            for r in [0.1, 0.05, 0.025] {
                let v = d.traction_limit_integral(r, phi.as_ref())?.abs();
                decreasing &= v < prev;
                prev = v;
                rows.push(Row { check: format!("traction integral [{name}] r={r}"), value: v, tolerance: "-".into(), pass: true });
            }
            rows.push(Row {
                check: format!("traction integral [{name}] decreasing"),
                value: if decreasing { 1.0 } else { 0.0 },
                tolerance: "strict".into(),
                pass: decreasing,
            });
        }

        let mut csv = String::from("check,value,tolerance,status\n");
        let mut lines = Vec::new();
        for r in &rows {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(csv, "{},{:?},{},{status}", r.check, r.value, r.tolerance);
            lines.push(format!("{status:4}  {:<52} {:>12.4e}  {}", r.check, r.value, r.tolerance));
        }
        let path = out.join("verify_analytic.csv");
        std::fs::write(&path, csv)?;
        if let Some(bad) = rows.iter().find(|r| !r.pass) {
            for l in &lines {
                println!("{l}");
            }
            return Err(CliError::invariant(format!("{} = {:e} violates {}", bad.check, bad.value, bad.tolerance)));
        }
        Ok(Report { lines, files: vec![path] })
    }
}

fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
