//! Glide mobility: Peach-Koehler force, the flux function `α̃`, normal
//! velocity of a dislocation line and the associated dissipation.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::registry::Registry;
use crate::tensor::{SymTensor3, Vec3};

/// Relative screw threshold: orientations with `|b×τ| ≤ EPS_SCREW·|b|` are
/// rejected.
pub const EPS_SCREW: f64 = 1e-8;

/// Tolerance used by [`glide_direction_check`].
pub const GLIDE_TOL: f64 = 1e-10;

/// Scalar constitutive function `f` of the mobility law. Implementations
/// must be odd with `s·f(s) ≥ 0`; [`validate_constitutive`] checks this.
pub trait ConstitutiveFunction: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn eval(&self, s: f64) -> f64;
}

/// `f(s) = C |s|^(γ−1) s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub c: f64,
    pub gamma: f64,
}

impl PowerLaw {
    pub fn new(c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("mobility C must be positive, got {c}")));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("mobility gamma must be >= 1, got {gamma}")));
        }
        Ok(PowerLaw { c, gamma })
    }
}

impl ConstitutiveFunction for PowerLaw {
    fn name(&self) -> &str {
        "power"
    }

    fn eval(&self, s: f64) -> f64 {
        if self.gamma == 1.0 {
            self.c * s
        } else {
            self.c * s.abs().powf(self.gamma - 1.0) * s
        }
    }
}

/// Piecewise-linear `f` given on `s ≥ 0` and extended as an odd function.
/// Beyond the last sample the last slope is continued.
#[derive(Debug, Clone, PartialEq)]
pub struct TableLaw {
    points: Vec<(f64, f64)>,
}

impl TableLaw {
    /// `points` are `(s, f(s))` with strictly increasing `s`, starting at
    /// `(0, 0)`, and `f ≥ 0`.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("table law needs at least two points"));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::invalid("table law must start at (0, 0) so that f(0) = 0"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid("table law abscissae must be strictly increasing"));
            }
        }
        if points.iter().any(|p| !(p.1 >= 0.0 && p.1.is_finite() && p.0.is_finite())) {
            return Err(Error::invalid("table law values must be finite and nonnegative (s f(s) >= 0)"));
        }
        Ok(TableLaw { points })
    }
}

impl ConstitutiveFunction for TableLaw {
    fn name(&self) -> &str {
        "table"
    }

    fn eval(&self, s: f64) -> f64 {
        let a = s.abs();
        let p = &self.points;
        let k = match p.iter().position(|q| q.0 >= a) {
            Some(0) => 1,
            Some(k) => k,
            None => p.len() - 1,
        };
        let (s0, f0) = p[k - 1];
        let (s1, f1) = p[k];
        let v = f0 + (f1 - f0) * (a - s0) / (s1 - s0);
        v.max(0.0).copysign(s) * if s == 0.0 { 0.0 } else { 1.0 }
    }
}

/// `s ↦ f(scale·s)`.
#[derive(Debug, Clone)]
pub struct Rescaled {
    inner: Arc<dyn ConstitutiveFunction>,
    scale: f64,
}

impl ConstitutiveFunction for Rescaled {
    fn name(&self) -> &str {
        "rescaled"
    }

    fn eval(&self, s: f64) -> f64 {
        self.inner.eval(self.scale * s)
    }
}

/// Samples `f` on a logarithmic grid of both signs and checks `f(0) = 0`,
/// oddness and `s·f(s) ≥ 0`.
pub fn validate_constitutive(f: &dyn ConstitutiveFunction) -> Result<()> {
    if f.eval(0.0) != 0.0 {
        return Err(Error::invalid(format!("constitutive function '{}': f(0) != 0", f.name())));
    }
    for k in -60..=60 {
        let s = 10f64.powf(k as f64 / 10.0);
        let (p, m) = (f.eval(s), f.eval(-s));
        if !(p.is_finite() && m.is_finite()) {
            return Err(Error::invalid(format!("constitutive function '{}' not finite at ±{s:e}", f.name())));
        }
        if s * p < 0.0 {
            return Err(Error::invalid(format!("constitutive function '{}': s f(s) < 0 at s = {s:e}", f.name())));
        }
        if (p + m).abs() > 1e-12 * p.abs().max(m.abs()) {
            return Err(Error::invalid(format!("constitutive function '{}' is not odd at s = {s:e}", f.name())));
        }
    }
    Ok(())
}

/// Parameters shared by the built-in constitutive function factories.
#[derive(Debug, Clone, Default)]
pub struct LawParams {
    pub c: f64,
    pub gamma: f64,
    pub table: Vec<(f64, f64)>,
}

/// Built-in constitutive functions: `power` and `table`.
pub fn constitutive_registry() -> Registry<dyn ConstitutiveFunction, LawParams> {
    let mut r: Registry<dyn ConstitutiveFunction, LawParams> = Registry::new("mobility law");
    r.register("power", |p| Ok(Box::new(PowerLaw::new(p.c, p.gamma)?)));
    r.register("table", |p| Ok(Box::new(TableLaw::new(p.table.clone())?)));
    r
}

/// A validated constitutive function together with the screw threshold.
#[derive(Debug, Clone)]
pub struct MobilityLaw {
    f: Arc<dyn ConstitutiveFunction>,
    eps_screw: f64,
}

impl MobilityLaw {
    pub fn new(f: Arc<dyn ConstitutiveFunction>) -> Result<Self> {
        validate_constitutive(f.as_ref())?;
        Ok(MobilityLaw { f, eps_screw: EPS_SCREW })
    }

    pub fn power(c: f64, gamma: f64) -> Result<Self> {
        Self::new(Arc::new(PowerLaw::new(c, gamma)?))
    }

    /// `f(s) = s`.
    pub fn linear() -> Self {
        Self::power(1.0, 1.0).expect("identity law is valid")
    }

    pub fn from_registry(name: &str, params: &LawParams) -> Result<Self> {
        Self::new(Arc::from(constitutive_registry().create(name, params)?))
    }

    pub fn with_eps_screw(mut self, eps: f64) -> Self {
        self.eps_screw = eps;
        self
    }

    pub fn eps_screw(&self) -> f64 {
        self.eps_screw
    }

    pub fn function(&self) -> &dyn ConstitutiveFunction {
        self.f.as_ref()
    }

    #[inline]
    pub fn f(&self, s: f64) -> f64 {
        self.f.eval(s)
    }

    /// The law `s ↦ f(scale·s)`.
    pub fn rescaled(&self, scale: f64) -> MobilityLaw {
        MobilityLaw {
            f: Arc::new(Rescaled {
                inner: self.f.clone(),
                scale,
            }),
            eps_screw: self.eps_screw,
        }
    }

    fn check_screw(&self, tau: &Vec3, b: &Vec3) -> Result<f64> {
        let c = b.cross(tau).norm();
        let threshold = self.eps_screw * b.norm();
        if c <= threshold {
            return Err(Error::ScrewSingularity {
                cross_norm: c,
                threshold,
                node: None,
            });
        }
        Ok(c)
    }
}

/// Line direction, local stress and Burgers vector at a point of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeachKoehlerSample {
    pub tau: Vec3,
    pub stress: SymTensor3,
    pub burgers: Vec3,
}

impl PeachKoehlerSample {
    pub fn new(tau: Vec3, stress: SymTensor3, burgers: Vec3) -> Result<Self> {
        if !tau.is_unit() {
            return Err(Error::invalid("line direction tau must be a unit vector"));
        }
        Ok(PeachKoehlerSample { tau, stress, burgers })
    }
}

/// `F = τ × T b`.
pub fn peach_koehler(s: &PeachKoehlerSample) -> Vec3 {
    s.tau.cross(&s.stress.mul_vec(&s.burgers))
}

fn force(tau: &Vec3, stress: &SymTensor3, b: &Vec3) -> Vec3 {
    tau.cross(&stress.mul_vec(b))
}

/// `α̃(τ, ξ) = b f(b·ξ / |b×τ|) / |b×τ|`.
pub fn alpha_tilde(law: &MobilityLaw, tau: &Vec3, xi: &Vec3, b: &Vec3) -> Result<Vec3> {
    let c = law.check_screw(tau, b)?;
    Ok(*b * (law.f(b.dot(xi) / c) / c))
}

/// Flux density `α = α̃(τ, ξ) × τ`.
pub fn flux_alpha(law: &MobilityLaw, tau: &Vec3, xi: &Vec3, b: &Vec3) -> Result<Vec3> {
    Ok(alpha_tilde(law, tau, xi, b)?.cross(tau))
}

/// Normal velocity `v = f(b⊥·F) b⊥` with `b⊥ = proj_τ b / |proj_τ b|`.
pub fn normal_velocity(law: &MobilityLaw, tau: &Vec3, stress: &SymTensor3, b: &Vec3) -> Result<Vec3> {
    law.check_screw(tau, b)?;
    let p = b.reject_from(tau);
    let b_perp = p * (1.0 / p.norm());
    let f = force(tau, stress, b);
    Ok(b_perp * law.f(b_perp.dot(&f)))
}

/// Normal velocity written as `v = proj_τ α̃(τ, F)`.
pub fn normal_velocity_via_alpha(law: &MobilityLaw, tau: &Vec3, stress: &SymTensor3, b: &Vec3) -> Result<Vec3> {
    let f = force(tau, stress, b);
    Ok(alpha_tilde(law, tau, &f, b)?.reject_from(tau))
}

/// `(T b̂)·α`.
pub fn dissipation_density(stress: &SymTensor3, b_hat: &Vec3, alpha: &Vec3) -> f64 {
    stress.mul_vec(b_hat).dot(alpha)
}

/// True when `v` is parallel to `proj_τ b` within [`GLIDE_TOL`].
pub fn glide_direction_check(tau: &Vec3, b: &Vec3, v: &Vec3) -> Result<bool> {
    let c = b.cross(tau).norm();
    let threshold = EPS_SCREW * b.norm();
    if c <= threshold {
        return Err(Error::ScrewSingularity {
            cross_norm: c,
            threshold,
            node: None,
        });
    }
    let p = b.reject_from(tau);
    let p_hat = p * (1.0 / p.norm());
    let off = *v - p_hat * v.dot(&p_hat);
    Ok(off.norm() <= GLIDE_TOL * v.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t12(s: f64) -> SymTensor3 {
        SymTensor3::new(0.0, 0.0, 0.0, s, 0.0, 0.0)
    }

    #[test]
    fn peach_koehler_examples() {
        let s = PeachKoehlerSample::new(Vec3::E3, SymTensor3::default(), Vec3::E2).unwrap();
        assert_eq!(peach_koehler(&s), Vec3::ZERO);
        let s = PeachKoehlerSample::new(Vec3::E3, t12(0.7), Vec3::E2).unwrap();
        assert_eq!(peach_koehler(&s), Vec3::new(0.0, 0.7, 0.0));
        let s = PeachKoehlerSample::new(Vec3::E3, SymTensor3::identity(), Vec3::E3).unwrap();
        assert_eq!(peach_koehler(&s), Vec3::ZERO);
        assert!(PeachKoehlerSample::new(Vec3::new(1.0, 1.0, 0.0), t12(1.0), Vec3::E1).is_err());
    }

    #[test]
    fn alpha_tilde_examples() {
        let law = MobilityLaw::linear();
        let sigma = 0.37;
        assert_eq!(alpha_tilde(&law, &Vec3::E3, &Vec3::ZERO, &Vec3::E2).unwrap(), Vec3::ZERO);
        let xi = Vec3::new(0.0, sigma, 0.0);
        assert_eq!(alpha_tilde(&law, &Vec3::E3, &xi, &Vec3::E2).unwrap(), Vec3::E2 * sigma);
        let cubic = MobilityLaw::power(2.0, 3.0).unwrap();
        let a1 = alpha_tilde(&cubic, &Vec3::E3, &xi, &Vec3::E2).unwrap();
        let a2 = alpha_tilde(&cubic, &Vec3::E3, &xi, &(Vec3::E2 * 2.0)).unwrap();
        assert!((a1 - a2).norm() < 1e-15);
        assert!((a1 - Vec3::E2 * cubic.f(sigma)).norm() < 1e-15);
        assert!(matches!(
            alpha_tilde(&law, &Vec3::E3, &xi, &Vec3::E3),
            Err(Error::ScrewSingularity { .. })
        ));
    }

    #[test]
    fn normal_velocity_examples() {
        let law = MobilityLaw::linear();
        let v = normal_velocity(&law, &Vec3::E3, &t12(0.4), &Vec3::E2).unwrap();
        assert!((v - Vec3::E2 * 0.4).norm() < 1e-15);
        let v = normal_velocity(&law, &Vec3::E3, &SymTensor3::default(), &Vec3::E2).unwrap();
        assert_eq!(v, Vec3::ZERO);
    }

    #[test]
    fn dissipation_example_unit_burgers() {
        // |b| = 1: (T b̂)·(α̃ × τ) = (b·F)² / |b×τ|² for f = id
        let law = MobilityLaw::linear();
        let tau = Vec3::new(0.6, 0.0, 0.8);
        let b = Vec3::new(0.0, 0.6, 0.8);
        let t = SymTensor3::new(0.3, -0.2, 0.5, 0.7, -0.4, 0.1);
        let f = force(&tau, &t, &b);
        let alpha = flux_alpha(&law, &tau, &f, &b).unwrap();
        let d = dissipation_density(&t, &b, &alpha);
        let expect = b.dot(&f).powi(2) / b.cross(&tau).norm_squared();
        assert!((d - expect).abs() < 1e-14);
        let d_neg = dissipation_density(&(-t), &b, &flux_alpha(&law, &tau, &(-f), &b).unwrap());
        assert!((d_neg - d).abs() < 1e-14);
        assert_eq!(dissipation_density(&t, &b, &Vec3::ZERO), 0.0);
    }

    #[test]
    fn glide_check_examples() {
        let law = MobilityLaw::linear();
        let tau = Vec3::new(0.0, 0.6, 0.8);
        let b = Vec3::new(0.0, 1.0, 0.0);
        let v = normal_velocity(&law, &tau, &t12(1.0), &b).unwrap();
        assert!(glide_direction_check(&tau, &b, &v).unwrap());
        assert!(!glide_direction_check(&tau, &b, &tau.cross(&b)).unwrap());
        assert!(glide_direction_check(&tau, &b, &Vec3::ZERO).unwrap());
    }

    #[test]
    fn validator_and_registry() {
        assert!(validate_constitutive(&PowerLaw::new(2.0, 1.5).unwrap()).is_ok());
        let table = TableLaw::new(vec![(0.0, 0.0), (1.0, 0.5), (2.0, 3.0)]).unwrap();
        assert!(validate_constitutive(&table).is_ok());
        assert_eq!(table.eval(-1.5), -1.75);
        assert!(TableLaw::new(vec![(0.0, 0.0), (1.0, -1.0)]).is_err());
        assert!(PowerLaw::new(1.0, 0.5).is_err());
        assert!(PowerLaw::new(-1.0, 1.0).is_err());

        #[derive(Debug)]
        struct Even;
        impl ConstitutiveFunction for Even {
            fn name(&self) -> &str {
                "even"
            }
            fn eval(&self, s: f64) -> f64 {
                s * s
            }
        }
        assert!(MobilityLaw::new(Arc::new(Even)).is_err());

        let p = LawParams {
            c: 3.0,
            gamma: 2.0,
            table: vec![],
        };
        let law = MobilityLaw::from_registry("power", &p).unwrap();
        assert_eq!(law.f(-2.0), -12.0);
        assert_eq!(law.rescaled(0.5).f(-2.0), -3.0);
        assert!(MobilityLaw::from_registry("nope", &p).is_err());
    }
}
