//! Slip-plane Hamilton-Jacobi law `∂_t ε_p = f(|b| m:T) |∇_g ε_p|` and the
//! classical law `∂_t ε_p = f(m:T)`.

use crate::error::{Error, Result};
use crate::measures::DensityGrid;
use crate::mobility::MobilityLaw;
use crate::registry::Registry;
use crate::spectral::Spectral;

use super::elasticity::MechanicalState;
use super::SlipField;

/// Courant number for the explicit field updates.
pub const CFL: f64 = 0.5;

/// Discretization of `|∇_g ε_p|` from one-sided differences along the two
/// in-plane axes.
pub trait GradientScheme: Send + Sync {
    fn name(&self) -> &str;

    /// `dm[i]`, `dp[i]`: backward and forward differences along in-plane
    /// axis `i`; `speed` is the local normal speed.
    fn norm(&self, dm: &[f64; 2], dp: &[f64; 2], speed: f64) -> f64;
}

/// Squared Godunov upwind derivative for `∂_t φ = speed·|∇φ|`.
#[inline]
pub fn godunov_sq(dm: f64, dp: f64, speed: f64) -> f64 {
    if speed > 0.0 {
        dm.min(0.0).powi(2) + dp.max(0.0).powi(2)
    } else {
        dm.max(0.0).powi(2) + dp.min(0.0).powi(2)
    }
}

/// Monotone Godunov upwind Hamiltonian.
#[derive(Debug, Clone, Copy, Default)]
pub struct Godunov;

impl GradientScheme for Godunov {
    fn name(&self) -> &str {
        "godunov"
    }

    fn norm(&self, dm: &[f64; 2], dp: &[f64; 2], speed: f64) -> f64 {
        (godunov_sq(dm[0], dp[0], speed) + godunov_sq(dm[1], dp[1], speed)).sqrt()
    }
}

/// Central differences; not monotone, for diagnostics only.
#[derive(Debug, Clone, Copy, Default)]
pub struct Central;

impl GradientScheme for Central {
    fn name(&self) -> &str {
        "central"
    }

    fn norm(&self, dm: &[f64; 2], dp: &[f64; 2], _speed: f64) -> f64 {
        let a = 0.5 * (dm[0] + dp[0]);
        let b = 0.5 * (dm[1] + dp[1]);
        (a * a + b * b).sqrt()
    }
}

/// Replaces the gradient norm by a constant.
#[derive(Debug, Clone, Copy)]
pub struct Frozen(pub f64);

impl GradientScheme for Frozen {
    fn name(&self) -> &str {
        "frozen"
    }

    fn norm(&self, _dm: &[f64; 2], _dp: &[f64; 2], _speed: f64) -> f64 {
        self.0
    }
}

/// Built-in schemes: `godunov`, `central`, `frozen` (the parameter is the
/// frozen value).
pub fn gradient_scheme_registry() -> Registry<dyn GradientScheme, f64> {
    let mut r: Registry<dyn GradientScheme, f64> = Registry::new("gradient scheme");
    r.register("godunov", |_| Ok(Box::new(Godunov)));
    r.register("central", |_| Ok(Box::new(Central)));
    r.register("frozen", |v| {
        if v.is_finite() && *v >= 0.0 {
            Ok(Box::new(Frozen(*v)))
        } else {
            Err(Error::invalid("frozen gradient value must be finite and nonnegative"))
        }
    });
    r
}

/// Normal speed `f(|b| m:T)` at every node.
pub fn slip_speed(sf: &SlipField, state: &MechanicalState, law: &MobilityLaw) -> Vec<f64> {
    let m = sf.system.m();
    let bn = sf.system.burgers().norm();
    state.stress.iter().map(|t| law.f(bn * m.contract(t))).collect()
}

/// Right-hand side `f(|b| m:T) |∇_g ε_p|` of the slip-plane law.
pub fn slip_rate(sf: &SlipField, state: &MechanicalState, law: &MobilityLaw, scheme: &dyn GradientScheme) -> Result<Vec<f64>> {
    let cell = &sf.cell;
    if state.stress.len() != cell.node_count() {
        return Err(Error::invalid("stress field size does not match the slip field"));
    }
    let [p, q] = sf.system.plane_axes()?;
    let h = cell.spacing();
    let speed = slip_speed(sf, state, law);
    let e = &sf.eps_p;
    let mut rate = vec![0.0; e.len()];
    for (idx, r) in rate.iter_mut().enumerate() {
        let s = speed[idx];
        if s == 0.0 {
            continue;
        }
        let c = cell.coords(idx).map(|v| v as isize);
        let mut dm = [0.0; 2];
        let mut dp = [0.0; 2];
        for (k, &a) in [p, q].iter().enumerate() {
            let mut lo = c;
            let mut hi = c;
            lo[a] -= 1;
            hi[a] += 1;
            let el = e[cell.index_wrapped(lo[0], lo[1], lo[2])];
            let eh = e[cell.index_wrapped(hi[0], hi[1], hi[2])];
            dm[k] = (e[idx] - el) / h[a];
            dp[k] = (eh - e[idx]) / h[a];
        }
        *r = s * scheme.norm(&dm, &dp, s);
    }
    Ok(rate)
}

/// Largest `dt` allowed by `dt·max|f| ≤ CFL·min(h)` over the plane axes.
pub fn slip_stable_dt(sf: &SlipField, state: &MechanicalState, law: &MobilityLaw) -> Result<f64> {
    let [p, q] = sf.system.plane_axes()?;
    let h = sf.cell.spacing();
    let vmax = slip_speed(sf, state, law).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(if vmax == 0.0 {
        f64::INFINITY
    } else {
        CFL * h[p].min(h[q]) / vmax
    })
}

/// One forward-Euler step of the slip-plane law.
pub fn evolve_slip(sf: &SlipField, state: &MechanicalState, law: &MobilityLaw, dt: f64, scheme: &dyn GradientScheme) -> Result<SlipField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let limit = slip_stable_dt(sf, state, law)?;
    if dt > limit {
        return Err(Error::Cfl { dt, suggested: limit });
    }
    let rate = slip_rate(sf, state, law, scheme)?;
    Ok(SlipField {
        cell: sf.cell,
        eps_p: sf.eps_p.iter().zip(&rate).map(|(e, r)| e + dt * r).collect(),
        system: sf.system,
    })
}

/// One forward-Euler step of `∂_t ε_p = f(m:T)`.
pub fn classical_step(sf: &SlipField, state: &MechanicalState, law: &MobilityLaw, dt: f64) -> Result<SlipField> {
    if state.stress.len() != sf.cell.node_count() {
        return Err(Error::invalid("stress field size does not match the slip field"));
    }
    let m = sf.system.m();
    Ok(SlipField {
        cell: sf.cell,
        eps_p: sf
            .eps_p
            .iter()
            .zip(&state.stress)
            .map(|(e, t)| e + dt * law.f(m.contract(t)))
            .collect(),
        system: sf.system,
    })
}

/// `ρ = rot(ε_p g) = ∇ε_p × g`, evaluated spectrally.
pub fn dislocation_density_of_slip(sf: &SlipField) -> DensityGrid {
    let s = Spectral::new(sf.cell);
    let g = sf.system.g();
    let rho: Vec<_> = s.gradient(&sf.eps_p).iter().map(|d| d.cross(&g)).collect();
    DensityGrid::from_vector_field(sf.cell, &rho).expect("same cell")
}
