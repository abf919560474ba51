//! Free energy and dissipation bookkeeping, and the run time series.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Vec3;

use super::elasticity::MechanicalState;

pub use super::elasticity::free_energy;

/// Cell-integrated energy before and after one step, and the dissipation
/// `dt·∫(T b̂)·∂_t h_p` evaluated with the stress before the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub psi_before: f64,
    pub psi_after: f64,
    pub dissipation: f64,
}

impl EnergyRecord {
    /// `ψ_after − ψ_before + dissipation`, zero to first order in `dt` at
    /// zero mean stress.
    pub fn balance_residual(&self) -> f64 {
        self.psi_after - self.psi_before + self.dissipation
    }

    /// Fails if the energy grew by more than `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let growth = self.psi_after - self.psi_before;
        if growth > tol {
            return Err(Error::Invariant(format!(
                "free energy increased by {growth:e} (tolerance {tol:e}, psi_before = {:e})",
                self.psi_before
            )));
        }
        Ok(())
    }
}

pub fn energy_ledger(before: &MechanicalState, after: &MechanicalState, hp_rate: &[Vec3], b_hat: &Vec3, dt: f64) -> Result<EnergyRecord> {
    if hp_rate.len() != before.stress.len() || after.stress.len() != before.stress.len() {
        return Err(Error::invalid("ledger fields must share one cell"));
    }
    let power: f64 = before
        .stress
        .iter()
        .zip(hp_rate)
        .map(|(t, r)| t.mul_vec(b_hat).dot(r))
        .sum();
    Ok(EnergyRecord {
        psi_before: before.free_energy,
        psi_after: after.free_energy,
        dissipation: dt * power * before.cell.node_volume(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRow {
    pub t: f64,
    pub psi: f64,
    pub dissipation: f64,
    pub max_div_residual: f64,
    pub total_dislocation_weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub rows: Vec<TimeSeriesRow>,
}

impl TimeSeries {
    pub const HEADER: &'static str = "t,psi,dissipation,max_div_residual,total_dislocation_weight";

    pub fn push(&mut self, row: TimeSeriesRow) {
        self.rows.push(row);
    }

    /// CSV text; floats use the shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{:?},{:?},{:?},{:?},{:?}", r.t, r.psi, r.dissipation, r.max_div_residual, r.total_dislocation_weight);
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}
