//! Front tracking of dislocation curves moving with the glide velocity in a
//! prescribed stress field.

use std::path::{Path, PathBuf};

use crate::analytic::StraightDislocation;
use crate::error::{Error, Result};
use crate::grid::PeriodicCell;
use crate::measures::io::write_curves;
use crate::measures::DislocationCurve;
use crate::mobility::{flux_alpha, normal_velocity, normal_velocity_via_alpha, MobilityLaw};
use crate::tensor::{SymTensor3, Vec3};

/// Courant number used by [`step`].
pub const CFL: f64 = 0.5;

/// External stress field seen by a curve.
pub trait StressProvider: Send + Sync {
    fn stress(&self, x: &Vec3) -> Result<SymTensor3>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformStress(pub SymTensor3);

impl StressProvider for UniformStress {
    fn stress(&self, _x: &Vec3) -> Result<SymTensor3> {
        Ok(self.0)
    }
}

/// Superposition of straight dislocations parallel to x3, each shifted to
/// pass through `(x1, x2)` of its offset, plus a uniform background.
#[derive(Debug, Clone, Default)]
pub struct AnalyticStress {
    pub background: SymTensor3,
    pub sources: Vec<(StraightDislocation, Vec3)>,
}

impl StressProvider for AnalyticStress {
    fn stress(&self, x: &Vec3) -> Result<SymTensor3> {
        let mut t = self.background;
        for (d, o) in &self.sources {
            t += d.stress(&(*x - *o))?;
        }
        Ok(t)
    }
}

/// Node stress field of a periodic cell, interpolated trilinearly.
#[derive(Debug, Clone)]
pub struct GridStress {
    cell: PeriodicCell,
    field: Vec<SymTensor3>,
}

impl GridStress {
    pub fn new(cell: PeriodicCell, field: Vec<SymTensor3>) -> Result<Self> {
        if field.len() != cell.node_count() {
            return Err(Error::invalid("stress field size does not match the cell"));
        }
        Ok(GridStress { cell, field })
    }
}

impl StressProvider for GridStress {
    fn stress(&self, x: &Vec3) -> Result<SymTensor3> {
        Ok(self.cell.interpolate(&self.field, x))
    }
}

/// Closure-backed provider.
pub struct FnStress<F>(pub F);

impl<F: Fn(&Vec3) -> SymTensor3 + Send + Sync> StressProvider for FnStress<F> {
    fn stress(&self, x: &Vec3) -> Result<SymTensor3> {
        Ok((self.0)(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveState {
    pub curve: DislocationCurve,
    pub time: f64,
}

impl CurveState {
    pub fn new(curve: DislocationCurve) -> Self {
        CurveState { curve, time: 0.0 }
    }

    /// Perimeter over 2π, the radius of a circle with the same length.
    pub fn equivalent_radius(&self) -> f64 {
        self.curve.length() / (2.0 * std::f64::consts::PI)
    }
}

/// Remeshing thresholds. Segments longer than `h_max` are split, segments
/// shorter than `h_max / 5` are merged. `None` disables remeshing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepOptions {
    pub h_max: Option<f64>,
}

fn screw_at(e: Error, node: usize) -> Error {
    match e {
        Error::ScrewSingularity { cross_norm, threshold, .. } => Error::ScrewSingularity {
            cross_norm,
            threshold,
            node: Some(node),
        },
        other => other,
    }
}

/// Glide velocity of every vertex, using the bisector tangent at the vertex.
pub fn nodal_velocity(state: &CurveState, stress: &dyn StressProvider, law: &MobilityLaw) -> Result<Vec<Vec3>> {
    velocities(&state.curve, stress, law)
}

fn velocities(curve: &DislocationCurve, stress: &dyn StressProvider, law: &MobilityLaw) -> Result<Vec<Vec3>> {
    let b = curve.burgers();
    curve
        .vertices()
        .iter()
        .zip(curve.node_tangents())
        .enumerate()
        .map(|(i, (x, tau))| {
            let t = stress.stress(x)?;
            normal_velocity(law, &tau, &t, &b).map_err(|e| screw_at(e, i))
        })
        .collect()
}

/// Same velocities computed as `proj_τ α̃(τ, F)`.
pub fn nodal_velocity_via_alpha(state: &CurveState, stress: &dyn StressProvider, law: &MobilityLaw) -> Result<Vec<Vec3>> {
    let b = state.curve.burgers();
    state
        .curve
        .vertices()
        .iter()
        .zip(state.curve.node_tangents())
        .enumerate()
        .map(|(i, (x, tau))| {
            let t = stress.stress(x)?;
            normal_velocity_via_alpha(law, &tau, &t, &b).map_err(|e| screw_at(e, i))
        })
        .collect()
}

/// Per-vertex dissipation `(T b̂)·(α̃(τ, F) × τ)`.
pub fn nodal_dissipation(state: &CurveState, stress: &dyn StressProvider, law: &MobilityLaw) -> Result<Vec<f64>> {
    let b = state.curve.burgers();
    let b_hat = b * (1.0 / b.norm());
    state
        .curve
        .vertices()
        .iter()
        .zip(state.curve.node_tangents())
        .enumerate()
        .map(|(i, (x, tau))| {
            let t = stress.stress(x)?;
            let f = tau.cross(&t.mul_vec(&b));
            let alpha = flux_alpha(law, &tau, &f, &b).map_err(|e| screw_at(e, i))?;
            Ok(crate::mobility::dissipation_density(&t, &b_hat, &alpha))
        })
        .collect()
}

/// Largest stable time step for the current velocities.
pub fn stable_dt(state: &CurveState, stress: &dyn StressProvider, law: &MobilityLaw) -> Result<f64> {
    let v = nodal_velocity(state, stress, law)?;
    let vmax = v.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(if vmax == 0.0 {
        f64::INFINITY
    } else {
        CFL * state.curve.min_segment_length() / vmax
    })
}

/// One explicit midpoint step followed by remeshing.
pub fn step(state: &CurveState, stress: &dyn StressProvider, law: &MobilityLaw, dt: f64, opts: &StepOptions) -> Result<CurveState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let x0 = state.curve.vertices();
    let v0 = velocities(&state.curve, stress, law)?;
    let vmax = v0.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let hmin = state.curve.min_segment_length();
    if dt * vmax > CFL * hmin {
        return Err(Error::Cfl {
            dt,
            suggested: CFL * hmin / vmax,
        });
    }
    let half: Vec<Vec3> = x0.iter().zip(&v0).map(|(x, v)| *x + *v * (0.5 * dt)).collect();
    let mid = state.curve.with_vertices(half)?;
    let v1 = velocities(&mid, stress, law)?;
    let next: Vec<Vec3> = x0.iter().zip(&v1).map(|(x, v)| *x + *v * dt).collect();
    let mut curve = state.curve.with_vertices(next)?;
    if let Some(h_max) = opts.h_max {
        curve = remesh(&curve, h_max)?;
    }
    Ok(CurveState {
        curve,
        time: state.time + dt,
    })
}

/// Splits segments longer than `h_max` and removes vertices that close a
/// segment shorter than `h_max / 5`. Fails when a closed curve would drop
/// below three vertices, since annihilation is not modelled.
pub fn remesh(curve: &DislocationCurve, h_max: f64) -> Result<DislocationCurve> {
    if !(h_max > 0.0) {
        return Err(Error::invalid("h_max must be positive"));
    }
    let h_min = h_max / 5.0;
    let v = curve.vertices();
    let n = v.len();
    let mut out: Vec<Vec3> = Vec::with_capacity(n);
    for (i, (a, b)) in curve.segments().enumerate() {
        if i == 0 {
            out.push(a);
        }
        let len = (b - a).norm();
        let pieces = (len / h_max).ceil().max(1.0) as usize;
        for p in 1..pieces {
            out.push(a + (b - a) * (p as f64 / pieces as f64));
        }
        if curve.is_closed() && i + 1 == curve.segment_count() {
            break;
        }
        out.push(b);
    }
    // merge pass: drop the far end of every short segment, keeping the ends
    // of open curves
    let mut merged: Vec<Vec3> = Vec::with_capacity(out.len());
    for (i, x) in out.iter().enumerate() {
        let last = i + 1 == out.len();
        match merged.last() {
            Some(p) if (*x - *p).norm() < h_min && !(last && !curve.is_closed()) => continue,
            _ => merged.push(*x),
        }
    }
    if curve.is_closed() {
        while merged.len() > 3 && (merged[0] - merged[merged.len() - 1]).norm() < h_min {
            merged.pop();
        }
        if merged.len() < 3 {
            return Err(Error::Invariant("closed curve collapsed below three vertices".into()));
        }
    } else if merged.len() >= 3 && (merged[merged.len() - 1] - merged[merged.len() - 2]).norm() < h_min {
        let l = merged.len();
        merged.remove(l - 2);
    }
    curve.with_vertices(merged)
}

/// Largest distance of a vertex from the plane through `reference` with
/// unit normal `g`. Requires `b·g = 0`.
pub fn plane_confinement_residual(state: &CurveState, g: &Vec3, reference: &Vec3) -> Result<f64> {
    if !g.is_unit() {
        return Err(Error::invalid("plane normal g must be a unit vector"));
    }
    let b = state.curve.burgers();
    if b.dot(g).abs() > 1e-12 * b.norm() {
        return Err(Error::invalid(format!(
            "Burgers vector must lie in the slip plane: b·g = {:e}",
            b.dot(g)
        )));
    }
    Ok(state
        .curve
        .vertices()
        .iter()
        .map(|x| (*x - *reference).dot(g).abs())
        .fold(0.0, f64::max))
}

/// Smallest vertex distance between distinct curves.
pub fn min_separation(curves: &[DislocationCurve]) -> f64 {
    let mut d = f64::INFINITY;
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            for x in a.vertices() {
                for y in b.vertices() {
                    d = d.min((*x - *y).norm());
                }
            }
        }
    }
    d
}

/// Writes `curve_t<time>.txt` into `dir` and returns its path.
pub fn write_snapshot(dir: &Path, states: &[CurveState]) -> Result<PathBuf> {
    let t = states.first().map(|s| s.time).unwrap_or(0.0);
    let path = dir.join(format!("curve_t{t:.6}.txt"));
    let curves: Vec<DislocationCurve> = states.iter().map(|s| s.curve.clone()).collect();
    write_curves(&path, &curves)?;
    Ok(path)
}
