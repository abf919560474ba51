//! Closed-form Volterra field of a straight dislocation along the x3-axis in
//! an isotropic infinite body, plus numerical checks of the properties that
//! field is supposed to have.
//!
//! The cut surface is the half plane `Σ = {x1 > 0, x2 = 0}`. The angle
//! appearing in the displacement is the polar angle taken in `(0, 2π)`, so
//! the displacement jumps by `−(b1, 0, b3)` across Σ and is smooth
//! everywhere else off the line.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measures::test_fn::{TensorTestFunction, VectorTestFunction};
use crate::quadrature::GaussRule;
use crate::tensor::{outer, IsotropicElasticity, SymTensor3, Tensor3, Vec3};

/// Points closer than this to the line are rejected.
pub const DEFAULT_CORE_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightDislocation {
    b1: f64,
    b3: f64,
    elasticity: IsotropicElasticity,
    nu: f64,
    d1: f64,
    d2: f64,
    r_core: f64,
}

impl StraightDislocation {
    /// Burgers vector `(b1, 0, b3)`: `b1` is the edge part, `b3` the screw part.
    pub fn new(b1: f64, b3: f64, elasticity: IsotropicElasticity) -> Result<Self> {
        if !(b1.is_finite() && b3.is_finite()) || (b1 == 0.0 && b3 == 0.0) {
            return Err(Error::invalid("Burgers vector must be finite and nonzero"));
        }
        let nu = elasticity.nu();
        let mu = elasticity.mu();
        Ok(StraightDislocation {
            b1,
            b3,
            elasticity,
            nu,
            d1: mu * b1 / (2.0 * PI * (1.0 - nu)),
            d2: mu * b3 / (2.0 * PI),
            r_core: DEFAULT_CORE_RADIUS,
        })
    }

    pub fn with_core_radius(mut self, r_core: f64) -> Self {
        self.r_core = r_core;
        self
    }

    pub fn burgers(&self) -> Vec3 {
        Vec3::new(self.b1, 0.0, self.b3)
    }

    pub fn elasticity(&self) -> &IsotropicElasticity {
        &self.elasticity
    }

    pub fn d1(&self) -> f64 {
        self.d1
    }

    pub fn d2(&self) -> f64 {
        self.d2
    }

    fn check_core(&self, x: &Vec3) -> Result<f64> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let r = r2.sqrt();
        if r < self.r_core {
            return Err(Error::CoreSingularity {
                r,
                r_core: self.r_core,
            });
        }
        Ok(r2)
    }

    fn check_cut(&self, x: &Vec3) -> Result<()> {
        if x[0] >= 0.0 && x[1] == 0.0 {
            return Err(Error::BranchCut {
                x1: x[0],
                x2: x[1],
                x3: x[2],
            });
        }
        Ok(())
    }

    pub fn displacement(&self, x: &Vec3) -> Result<Vec3> {
        self.check_cut(x)?;
        let r2 = self.check_core(x)?;
        let (x1, x2) = (x[0], x[1]);
        let theta = polar_angle(x1, x2);
        let nu = self.nu;
        let u1 = self.b1 / (2.0 * PI) * (theta + x1 * x2 / (2.0 * (1.0 - nu) * r2));
        let u2 = -self.b1 / (4.0 * PI * (1.0 - nu)) * ((1.0 - 2.0 * nu) * 0.5 * r2.ln() + x1 * x1 / r2);
        let u3 = self.b3 / (2.0 * PI) * theta;
        Ok(Vec3::new(u1, u2, u3))
    }

    /// `∇u` with `(∇u)_ij = ∂_j u_i`; smooth across Σ.
    pub fn displacement_gradient(&self, x: &Vec3) -> Result<Tensor3> {
        let r2 = self.check_core(x)?;
        let (x1, x2) = (x[0], x[1]);
        let r4 = r2 * r2;
        let nu = self.nu;
        let e = self.b1 / (2.0 * PI);
        let k = 1.0 / (2.0 * (1.0 - nu));
        let du1 = [
            e * (-x2 / r2 + k * x2 * (x2 * x2 - x1 * x1) / r4),
            e * (x1 / r2 + k * x1 * (x1 * x1 - x2 * x2) / r4),
            0.0,
        ];
        let c = -self.b1 / (4.0 * PI * (1.0 - nu));
        let du2 = [
            c * ((1.0 - 2.0 * nu) * x1 / r2 + 2.0 * x1 * x2 * x2 / r4),
            c * ((1.0 - 2.0 * nu) * x2 / r2 - 2.0 * x1 * x1 * x2 / r4),
            0.0,
        ];
        let s = self.b3 / (2.0 * PI);
        let du3 = [-s * x2 / r2, s * x1 / r2, 0.0];
        Ok(Tensor3([du1, du2, du3]))
    }

    pub fn stress(&self, x: &Vec3) -> Result<SymTensor3> {
        let r2 = self.check_core(x)?;
        let (x1, x2) = (x[0], x[1]);
        let r4 = r2 * r2;
        let (d1, d2) = (self.d1, self.d2);
        Ok(SymTensor3 {
            t11: -d1 * x2 * (3.0 * x1 * x1 + x2 * x2) / r4,
            t12: d1 * x1 * (x1 * x1 - x2 * x2) / r4,
            t13: -d2 * x2 / r2,
            t22: d1 * x2 * (x1 * x1 - x2 * x2) / r4,
            t23: d2 * x1 / r2,
            t33: -2.0 * self.nu * d1 * x2 / r2,
        })
    }

    /// Largest component of the centered-difference divergence of the
    /// stress at `x` with step `h`. Second order in `h`.
    pub fn verify_equilibrium(&self, x: &Vec3, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::invalid("finite-difference step must be positive"));
        }
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        if r <= 2.0 * h + self.r_core {
            return Err(Error::CoreSingularity {
                r: r - 2.0 * h,
                r_core: self.r_core,
            });
        }
        let mut div = [0.0; 3];
        for j in 0..3 {
            let e = Vec3::axis(j) * h;
            let tp = self.stress(&(*x + e))?;
            let tm = self.stress(&(*x - e))?;
            for (i, d) in div.iter_mut().enumerate() {
                *d += (tp.get(i, j) - tm.get(i, j)) / (2.0 * h);
            }
        }
        Ok(div.iter().fold(0.0, |m, d| m.max(d.abs())))
    }

    /// `∫_{C_r} (T n)·φ dS` over the cylinder of radius `r` about the line,
    /// `n` the outward radial normal. Trapezoidal in the angle (exact for the
    /// trigonometric leading term), Gauss-Legendre along x3, refined until
    /// two successive levels agree.
    pub fn traction_limit_integral(&self, r: f64, phi: &dyn VectorTestFunction) -> Result<f64> {
        if !(r > self.r_core) {
            return Err(Error::CoreSingularity {
                r,
                r_core: self.r_core,
            });
        }
        let s = phi.support();
        let (z0, z1) = (s.lo[2], s.hi[2]);
        let eval = |n_theta: usize, n_z: usize| -> Result<f64> {
            let rule = GaussRule::new(n_z, z0, z1);
            let dtheta = 2.0 * PI / n_theta as f64;
            let mut total = 0.0;
            for it in 0..n_theta {
                // half-step offset keeps samples off the cut plane
                let th = (it as f64 + 0.5) * dtheta;
                let n = Vec3::new(th.cos(), th.sin(), 0.0);
                for (z, w) in rule.iter() {
                    let x = Vec3::new(r * n[0], r * n[1], z);
                    let tn = self.stress(&x)?.mul_vec(&n);
                    total += w * tn.dot(&phi.eval(&x));
                }
            }
            Ok(total * r * dtheta)
        };
        let tol_rel = 1e-10;
        let tol_abs = 1e-14;
        let (mut nt, mut nz) = (32, 32);
        let mut prev = eval(nt, nz)?;
        let mut change = f64::INFINITY;
        while nz <= 1024 {
            nt *= 2;
            nz *= 2;
            let cur = eval(nt, nz)?;
            change = (cur - prev).abs();
            if change <= tol_rel * cur.abs() + tol_abs {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Quadrature {
            change,
            tolerance: tol_rel * prev.abs() + tol_abs,
        })
    }

    /// Evaluates both sides of the weak rotation identity for the elastic
    /// distortion `∇u` of this dislocation against the test tensor `phi`:
    /// the volume pairing `∫ ∇u : rot φ dx` and the line pairing
    /// `∫_ℓ (b ⊗ τ) : φ ds` with `τ = e3`.
    ///
    /// The volume integral is taken in cylindrical coordinates about the
    /// line, where the Jacobian `r` cancels the `1/r` growth of `∇u` and the
    /// integrand is smooth, so Gauss-Legendre converges without excising a
    /// core tube. Orders are doubled until the pairing changes by less than
    /// `rel_tol` relative.
    pub fn weak_rot_pairing(&self, phi: &dyn TensorTestFunction, rel_tol: f64) -> Result<WeakRotPairing> {
        let s = phi.support();
        let corners = [s.lo[0].abs().max(s.hi[0].abs()), s.lo[1].abs().max(s.hi[1].abs())];
        let radius = (corners[0] * corners[0] + corners[1] * corners[1]).sqrt();
        let (z0, z1) = (s.lo[2], s.hi[2]);
        let b = self.burgers();

        let volume = |n: usize| -> Result<f64> {
            let rr = GaussRule::new(n, 0.0, radius);
            let rz = GaussRule::new(n, z0, z1);
            let n_theta = 2 * n;
            let dtheta = 2.0 * PI / n_theta as f64;
            let mut total = 0.0;
            for (r, wr) in rr.iter() {
                for it in 0..n_theta {
                    let th = (it as f64 + 0.5) * dtheta;
                    let (c, sn) = (th.cos(), th.sin());
                    let grad = self.displacement_gradient(&Vec3::new(r * c, r * sn, 0.0))?;
                    for (z, wz) in rz.iter() {
                        let x = Vec3::new(r * c, r * sn, z);
                        total += wr * wz * r * crate::tensor::contract(&grad, &phi.rot(&x));
                    }
                }
            }
            Ok(total * dtheta)
        };
        let line = |n: usize| -> f64 {
            let rz = GaussRule::new(n, z0, z1);
            let nye = outer(&b, &Vec3::E3);
            rz.integrate(|z| crate::tensor::contract(&nye, &phi.eval(&Vec3::new(0.0, 0.0, z))))
        };

        let mut n = 16;
        let mut prev = volume(n)?;
        loop {
            let next_n = n * 2;
            let cur = volume(next_n)?;
            let change = (cur - prev).abs();
            let scale = cur.abs().max(1e-300);
            if change <= rel_tol * scale {
                return Ok(WeakRotPairing {
                    volume: cur,
                    line: line(4 * next_n),
                    order: next_n,
                    last_change: change / scale,
                });
            }
            if next_n >= 256 {
                return Err(Error::Quadrature {
                    change: change / scale,
                    tolerance: rel_tol,
                });
            }
            prev = cur;
            n = next_n;
        }
    }
}

/// Both sides of the weak rotation identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakRotPairing {
    /// `∫ ∇u : rot φ dx`
    pub volume: f64,
    /// `∫_ℓ (b ⊗ τ) : φ ds`
    pub line: f64,
    /// Final Gauss order per direction.
    pub order: usize,
    /// Relative change at the last refinement.
    pub last_change: f64,
}

/// Polar angle of `(x1, x2)` in `[0, 2π)`; the discontinuity sits on the
/// positive x1-axis.
pub fn polar_angle(x1: f64, x2: f64) -> f64 {
    let t = x2.atan2(x1);
    if t < 0.0 {
        t + 2.0 * PI
    } else {
        t
    }
}
