//! Evolution of the vector plastic distortion in the frame where `b̂` is a
//! grid axis `a`:
//!
//! `∂_t h_p = −f(−d·Tb) d |rot h_p|`, `d = ∂_a h_p / |∂_a h_p|`,
//! `|rot h_p|² = |∂_a h_p|² + (rot_a h_p)²`.
//!
//! Only the two components normal to `b̂` move, so `b̂·h_p` is untouched.
//! Squared one-sided derivatives are upwinded per component with the sign
//! of that component's rate, the mixed term of `(rot_a h_p)²` uses central
//! differences. For `h_p = ε_p g` this is the Godunov scheme of the
//! slip-plane law.

use crate::error::{Error, Result};
use crate::mobility::MobilityLaw;
use crate::tensor::Vec3;

use super::elasticity::MechanicalState;
use super::slip::{godunov_sq, CFL};
use super::{grid_axis, PlasticDistortionField};

/// Below this `|∂_a h_p|` the direction `d` is undefined and the node is frozen.
pub const EPS_DIR: f64 = 1e-10;

/// Rate `∂_t h_p` at every node.
pub fn hp_rate(hp: &PlasticDistortionField, state: &MechanicalState, law: &MobilityLaw) -> Result<Vec<Vec3>> {
    let cell = &hp.cell;
    if state.stress.len() != cell.node_count() {
        return Err(Error::invalid("stress field size does not match the plastic distortion"));
    }
    let a = grid_axis(&hp.b_hat).ok_or_else(|| Error::invalid("evolve_hp needs b_hat along a grid axis"))?;
    let (p, q) = ((a + 1) % 3, (a + 2) % 3);
    let h = cell.spacing();
    let b = hp.burgers();
    let f = &hp.hp;
    let mut rate = vec![Vec3::ZERO; f.len()];
    for (idx, r) in rate.iter_mut().enumerate() {
        let c = cell.coords(idx).map(|v| v as isize);
        let at = |axis: usize, off: isize| {
            let mut x = c;
            x[axis] += off;
            f[cell.index_wrapped(x[0], x[1], x[2])]
        };
        // one-sided differences of the vector along each axis
        let mut dm = [Vec3::ZERO; 3];
        let mut dp = [Vec3::ZERO; 3];
        for ax in 0..3 {
            dm[ax] = (f[idx] - at(ax, -1)) * (1.0 / h[ax]);
            dp[ax] = (at(ax, 1) - f[idx]) * (1.0 / h[ax]);
        }
        let central = |ax: usize, comp: usize| 0.5 * (dm[ax][comp] + dp[ax][comp]);
        let da = Vec3::new(central(a, 0), central(a, 1), central(a, 2));
        let n = da.norm();
        if n < EPS_DIR {
            continue;
        }
        let d = da * (1.0 / n);
        let t = &state.stress[idx];
        let amp = -law.f(-d.dot(&t.mul_vec(&b)));
        let sp = amp * d[p];
        let sq = amp * d[q];
        let rot2 = godunov_sq(dm[a][p], dp[a][p], sp)
            + godunov_sq(dm[a][q], dp[a][q], sq)
            + godunov_sq(dm[p][q], dp[p][q], sq)
            + godunov_sq(dm[q][p], dp[q][p], sp)
            - 2.0 * central(p, q) * central(q, p);
        let rot = rot2.max(0.0).sqrt();
        let mut v = [0.0; 3];
        v[p] = sp * rot;
        v[q] = sq * rot;
        *r = Vec3(v);
    }
    Ok(rate)
}

/// Largest `dt` with `dt·max|f(−d·Tb) d| ≤ CFL·min(h)`; the bound uses
/// `|f(|Tb|)|` which dominates every direction.
pub fn hp_stable_dt(hp: &PlasticDistortionField, state: &MechanicalState, law: &MobilityLaw) -> f64 {
    let b = hp.burgers();
    let vmax = state
        .stress
        .iter()
        .map(|t| law.f(t.mul_vec(&b).norm()).abs())
        .fold(0.0, f64::max);
    let hmin = hp.cell.spacing().into_iter().fold(f64::INFINITY, f64::min);
    if vmax == 0.0 {
        f64::INFINITY
    } else {
        CFL * hmin / vmax
    }
}

/// One forward-Euler step.
pub fn evolve_hp(hp: &PlasticDistortionField, state: &MechanicalState, law: &MobilityLaw, dt: f64) -> Result<PlasticDistortionField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let limit = hp_stable_dt(hp, state, law);
    if dt > limit {
        return Err(Error::Cfl { dt, suggested: limit });
    }
    let rate = hp_rate(hp, state, law)?;
    Ok(PlasticDistortionField {
        cell: hp.cell,
        hp: hp.hp.iter().zip(&rate).map(|(x, r)| *x + *r * dt).collect(),
        b_hat: hp.b_hat,
        b_norm: hp.b_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::slip::{evolve_slip, Godunov};
    use crate::continuum::{PeriodicCell, SlipField, SlipSystem};
    use crate::tensor::{IsotropicElasticity, SymTensor3};

    fn state(cell: PeriodicCell, t: SymTensor3) -> MechanicalState {
        MechanicalState::uniform(cell, t, IsotropicElasticity::new(1.0, 1.0).unwrap().into())
    }

    #[test]
    fn trivial_cases() {
        let cell = PeriodicCell::new([1.0, 1.0, 0.5], [16, 16, 8]).unwrap();
        let sys = SlipSystem::new(Vec3::E1, Vec3::E3).unwrap();
        let f = SlipField::smoothed_strip(cell, sys, 0, 0.5, 0.2, 0.1, 1.0).unwrap().to_distortion();
        let law = MobilityLaw::linear();
        let z = evolve_hp(&f, &state(cell, SymTensor3::default()), &law, 0.01).unwrap();
        assert_eq!(z, f);
        // constant field: rot h_p = 0
        let c = PlasticDistortionField::new(cell, vec![Vec3::new(0.0, 0.3, -0.2); cell.node_count()], Vec3::E1).unwrap();
        let t = SymTensor3::new(0.0, 0.0, 0.0, 0.2, 0.3, 0.0);
        assert_eq!(evolve_hp(&c, &state(cell, t), &law, 0.01).unwrap(), c);
    }

    #[test]
    fn slab_matches_slip_plane_solver() {
        let cell = PeriodicCell::new([1.0, 1.0, 0.5], [32, 32, 8]).unwrap();
        let sys = SlipSystem::new(Vec3::E1, Vec3::E3).unwrap();
        // fronts normal to b: edge lines, ∂_a ε_p ≠ 0 on the fronts
        let sf = SlipField::smoothed_strip(cell, sys, 0, 0.5, 0.2, 0.1, 1.0).unwrap();
        let st = state(cell, SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.4, 0.0));
        let law = MobilityLaw::power(1.0, 2.0).unwrap();
        let dt = 0.01;
        let a = evolve_slip(&sf, &st, &law, dt, &Godunov).unwrap();
        let b = evolve_hp(&sf.to_distortion(), &st, &law, dt).unwrap();
        for (x, y) in a.eps_p.iter().zip(&b.hp) {
            assert!((x - y[2]).abs() < 1e-14);
            assert_eq!(y[0], 0.0);
        }
    }
}
