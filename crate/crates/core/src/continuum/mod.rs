//! Field model on a periodic cell: quasi-static elasticity with a plastic
//! eigenstrain, evolution of the plastic distortion `h_p`, its slip-plane
//! specialization for a scalar slip `ε_p`, the classical viscoplastic
//! baseline, and the energy bookkeeping.
//!
//! The periodic cell carries an imposed mean stress in place of traction
//! boundary data.

pub mod elasticity;
pub mod gauge;
pub mod ledger;
pub mod plastic;
pub mod slip;
pub mod snapshot;

pub use crate::grid::PeriodicCell;
pub use elasticity::{elasticity_solver_registry, solve_elasticity, solve_elasticity_with, stress_from_displacement, ElasticitySolver, MechanicalState, SolverParams};
pub use gauge::gauge_transform;
pub use ledger::{energy_ledger, free_energy, EnergyRecord, TimeSeries, TimeSeriesRow};
pub use plastic::{evolve_hp, hp_rate};
pub use slip::{classical_step, dislocation_density_of_slip, evolve_slip, gradient_scheme_registry, GradientScheme};

use crate::error::{Error, Result};
use crate::tensor::{slip_tensor, SymTensor3, Vec3};

/// Returns `a` when `v = ±e_a` exactly.
pub fn grid_axis(v: &Vec3) -> Option<usize> {
    (0..3).find(|&a| v[a].abs() == 1.0 && v[(a + 1) % 3] == 0.0 && v[(a + 2) % 3] == 0.0)
}

/// Slip-plane normal `g`, Burgers vector `b ⊥ g` and slip tensor `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipSystem {
    g: Vec3,
    b: Vec3,
    m: SymTensor3,
}

impl SlipSystem {
    pub fn new(b: Vec3, g: Vec3) -> Result<Self> {
        if !g.is_unit() {
            return Err(Error::invalid("slip plane normal g must be a unit vector"));
        }
        let bn = b.norm();
        if !(bn > 0.0 && b.is_finite()) {
            return Err(Error::invalid("Burgers vector must be finite and nonzero"));
        }
        if b.dot(&g).abs() > 1e-12 * bn {
            return Err(Error::invalid(format!(
                "slip system geometry: the Burgers vector must lie in the slip plane (b·g = {:e}, required 0)",
                b.dot(&g)
            )));
        }
        let m = slip_tensor(&(b * (1.0 / bn)), &g)?;
        Ok(SlipSystem { g, b, m })
    }

    pub fn g(&self) -> Vec3 {
        self.g
    }

    pub fn burgers(&self) -> Vec3 {
        self.b
    }

    pub fn b_hat(&self) -> Vec3 {
        self.b * (1.0 / self.b.norm())
    }

    pub fn m(&self) -> SymTensor3 {
        self.m
    }

    /// Grid axis of `g`, required by the slip-plane solver.
    pub fn normal_axis(&self) -> Result<usize> {
        grid_axis(&self.g).ok_or_else(|| Error::invalid("slip plane normal must be a grid axis for the slip-plane solver"))
    }

    /// The two grid axes spanning the slip plane.
    pub fn plane_axes(&self) -> Result<[usize; 2]> {
        let a = self.normal_axis()?;
        Ok([(a + 1) % 3, (a + 2) % 3])
    }
}

/// Scalar slip `ε_p` of one slip system; `h_p = ε_p g`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlipField {
    pub cell: PeriodicCell,
    pub eps_p: Vec<f64>,
    pub system: SlipSystem,
}

impl SlipField {
    pub fn new(cell: PeriodicCell, eps_p: Vec<f64>, system: SlipSystem) -> Result<Self> {
        if eps_p.len() != cell.node_count() {
            return Err(Error::invalid("slip field size does not match the cell"));
        }
        if eps_p.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("slip field must be finite"));
        }
        Ok(SlipField { cell, eps_p, system })
    }

    pub fn zero(cell: PeriodicCell, system: SlipSystem) -> Self {
        SlipField {
            cell,
            eps_p: vec![0.0; cell.node_count()],
            system,
        }
    }

    /// Plastic strain `ε(b̂⊗h_p) = ε_p m`.
    pub fn plastic_strain(&self) -> Vec<SymTensor3> {
        let m = self.system.m;
        self.eps_p.iter().map(|&e| m * e).collect()
    }

    pub fn to_distortion(&self) -> PlasticDistortionField {
        let g = self.system.g;
        PlasticDistortionField {
            cell: self.cell,
            hp: self.eps_p.iter().map(|&e| g * e).collect(),
            b_hat: self.system.b_hat(),
            b_norm: self.system.burgers().norm(),
        }
    }

    /// Smoothed indicator of a disc of radius `radius` in the slip plane
    /// through `center`, with value `height` inside. The edge is a cosine
    /// ramp over `[radius − w, radius + w]`. Distances are measured to the
    /// nearest periodic image in the plane.
    pub fn smoothed_disc(cell: PeriodicCell, system: SlipSystem, center: Vec3, radius: f64, w: f64, height: f64) -> Result<Self> {
        let [p, q] = system.plane_axes()?;
        let l = cell.lengths();
        let eps = (0..cell.node_count())
            .map(|i| {
                let x = cell.position(i);
                let mut dp = x[p] - center[p];
                let mut dq = x[q] - center[q];
                dp -= l[p] * (dp / l[p]).round();
                dq -= l[q] * (dq / l[q]).round();
                height * ramp((dp * dp + dq * dq).sqrt() - radius, w)
            })
            .collect();
        Self::new(cell, eps, system)
    }

    /// Smoothed indicator of the slab `|x_axis − center| < half_width`.
    pub fn smoothed_strip(cell: PeriodicCell, system: SlipSystem, axis: usize, center: f64, half_width: f64, w: f64, height: f64) -> Result<Self> {
        let l = cell.lengths()[axis];
        let eps = (0..cell.node_count())
            .map(|i| {
                let mut d = cell.position(i)[axis] - center;
                d -= l * (d / l).round();
                height * ramp(d.abs() - half_width, w)
            })
            .collect();
        Self::new(cell, eps, system)
    }
}

/// 1 for `s ≤ −w`, 0 for `s ≥ w`, cosine in between.
pub fn ramp(s: f64, w: f64) -> f64 {
    if s <= -w {
        1.0
    } else if s >= w {
        0.0
    } else {
        0.5 * (1.0 - (std::f64::consts::PI * s / (2.0 * w)).sin())
    }
}

/// Vector plastic distortion `h_p` with `h̃_p = b̂⊗h_p`. `b_norm` is `|b|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlasticDistortionField {
    pub cell: PeriodicCell,
    pub hp: Vec<Vec3>,
    pub b_hat: Vec3,
    pub b_norm: f64,
}

impl PlasticDistortionField {
    pub fn new(cell: PeriodicCell, hp: Vec<Vec3>, burgers: Vec3) -> Result<Self> {
        if hp.len() != cell.node_count() {
            return Err(Error::invalid("plastic distortion size does not match the cell"));
        }
        let b_norm = burgers.norm();
        if !(b_norm > 0.0 && burgers.is_finite()) {
            return Err(Error::invalid("Burgers vector must be finite and nonzero"));
        }
        Ok(PlasticDistortionField {
            cell,
            hp,
            b_hat: burgers * (1.0 / b_norm),
            b_norm,
        })
    }

    pub fn burgers(&self) -> Vec3 {
        self.b_hat * self.b_norm
    }

    /// `ε(b̂⊗h_p)` at every node.
    pub fn plastic_strain(&self) -> Vec<SymTensor3> {
        self.hp
            .iter()
            .map(|h| crate::tensor::strain(&crate::tensor::outer(&self.b_hat, h)))
            .collect()
    }

    /// `max |b̂·h_p|`, the trace of the plastic distortion.
    pub fn volume_residual(&self) -> f64 {
        self.hp.iter().map(|h| h.dot(&self.b_hat).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slip_system_validation() {
        assert!(SlipSystem::new(Vec3::E1, Vec3::E3).is_ok());
        let e = SlipSystem::new(Vec3::new(1.0, 0.0, 0.1), Vec3::E3).unwrap_err();
        assert!(e.to_string().contains("slip plane"), "{e}");
        assert!(SlipSystem::new(Vec3::E1, Vec3::new(0.0, 0.0, 2.0)).is_err());
        let s = SlipSystem::new(Vec3::new(0.0, 0.6, 0.8), Vec3::E1).unwrap();
        assert_eq!(s.plane_axes().unwrap(), [1, 2]);
    }

    #[test]
    fn disc_initializer_plateau() {
        let cell = PeriodicCell::new([32.0, 32.0, 4.0], [32, 32, 8]).unwrap();
        let sys = SlipSystem::new(Vec3::E1, Vec3::E3).unwrap();
        let f = SlipField::smoothed_disc(cell, sys, Vec3::new(16.0, 16.0, 0.0), 8.0, 3.0, 1.0).unwrap();
        assert_eq!(f.eps_p[cell.index(16, 16, 0)], 1.0);
        assert_eq!(f.eps_p[cell.index(0, 0, 3)], 0.0);
        assert!((ramp(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(f.to_distortion().volume_residual(), 0.0);
    }
}
