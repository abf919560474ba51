//! Small fixed-size tensor algebra: vectors, general and symmetric 3×3
//! tensors, and linear elasticity maps on symmetric tensors.
//!
//! All quantities are nondimensional: lengths in units of |b|, stresses in
//! units of the shear modulus μ.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix6, SymmetricEigen, Vector6};

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Tolerance on |v| − 1 for inputs that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);
    pub const E1: Vec3 = Vec3([1.0, 0.0, 0.0]);
    pub const E2: Vec3 = Vec3([0.0, 1.0, 0.0]);
    pub const E3: Vec3 = Vec3([0.0, 0.0, 1.0]);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Vec3([x1, x2, x3])
    }

    /// Unit vector along axis `i` (0-based).
    pub fn axis(i: usize) -> Self {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        Vec3(v)
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    pub fn x2(&self) -> f64 {
        self.0[1]
    }
    pub fn x3(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [c1, c2, c3] = o.0;
        Vec3([a2 * c3 - a3 * c2, a3 * c1 - a1 * c3, a1 * c2 - a2 * c1])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    /// Orthogonal projection onto the plane normal to the unit vector `n`.
    pub fn reject_from(&self, n: &Vec3) -> Vec3 {
        *self - *n * self.dot(n)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

pub fn cross(a: &Vec3, c: &Vec3) -> Vec3 {
    a.cross(c)
}

/// `a ⊗ c`, the matrix `(a_i c_j)`.
pub fn outer(a: &Vec3, c: &Vec3) -> Tensor3 {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a.0[i] * c.0[j];
        }
    }
    Tensor3(m)
}

/// General 3×3 tensor, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor3(pub [[f64; 3]; 3]);

impl Tensor3 {
    pub const ZERO: Tensor3 = Tensor3([[0.0; 3]; 3]);

    pub fn identity() -> Self {
        Tensor3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Tensor3 {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[j][i];
            }
        }
        Tensor3(t)
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        Vec3([
            m[0][0] * v.0[0] + m[0][1] * v.0[1] + m[0][2] * v.0[2],
            m[1][0] * v.0[0] + m[1][1] * v.0[1] + m[1][2] * v.0[2],
            m[2][0] * v.0[0] + m[2][1] * v.0[1] + m[2][2] * v.0[2],
        ])
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3(self.0[i])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

impl Add for Tensor3 {
    type Output = Tensor3;
    fn add(self, o: Tensor3) -> Tensor3 {
        let mut t = self.0;
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += o.0[i][j];
            }
        }
        Tensor3(t)
    }
}

impl Sub for Tensor3 {
    type Output = Tensor3;
    fn sub(self, o: Tensor3) -> Tensor3 {
        self + o * -1.0
    }
}

impl Mul<f64> for Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: f64) -> Tensor3 {
        let mut t = self.0;
        t.iter_mut().flatten().for_each(|v| *v *= s);
        Tensor3(t)
    }
}

/// Symmetric 3×3 tensor stored by its six independent components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    pub t11: f64,
    pub t22: f64,
    pub t33: f64,
    pub t12: f64,
    pub t13: f64,
    pub t23: f64,
}

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3 {
        t11: 0.0,
        t22: 0.0,
        t33: 0.0,
        t12: 0.0,
        t13: 0.0,
        t23: 0.0,
    };

    pub fn new(t11: f64, t22: f64, t33: f64, t12: f64, t13: f64, t23: f64) -> Self {
        SymTensor3 {
            t11,
            t22,
            t33,
            t12,
            t13,
            t23,
        }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.t11,
            (1, 1) => self.t22,
            (2, 2) => self.t33,
            (0, 1) => self.t12,
            (0, 2) => self.t13,
            (1, 2) => self.t23,
            _ => panic!("tensor index out of range: ({i}, {j})"),
        }
    }

    /// Components in the fixed order `(11, 22, 33, 23, 13, 12)`.
    pub fn components(&self) -> [f64; 6] {
        [self.t11, self.t22, self.t33, self.t23, self.t13, self.t12]
    }

    pub fn from_components(c: [f64; 6]) -> Self {
        Self::new(c[0], c[1], c[2], c[5], c[4], c[3])
    }

    /// Mandel vector `(11, 22, 33, √2·23, √2·13, √2·12)`; its Euclidean
    /// inner product equals the tensor contraction.
    pub fn to_mandel(&self) -> [f64; 6] {
        [
            self.t11,
            self.t22,
            self.t33,
            SQRT_2 * self.t23,
            SQRT_2 * self.t13,
            SQRT_2 * self.t12,
        ]
    }

    pub fn from_mandel(m: [f64; 6]) -> Self {
        Self::new(
            m[0],
            m[1],
            m[2],
            m[5] / SQRT_2,
            m[4] / SQRT_2,
            m[3] / SQRT_2,
        )
    }

    pub fn to_tensor(&self) -> Tensor3 {
        Tensor3([
            [self.t11, self.t12, self.t13],
            [self.t12, self.t22, self.t23],
            [self.t13, self.t23, self.t33],
        ])
    }

    pub fn trace(&self) -> f64 {
        self.t11 + self.t22 + self.t33
    }

    /// `A : B = Σ a_ij b_ij`.
    pub fn contract(&self, o: &SymTensor3) -> f64 {
        self.t11 * o.t11
            + self.t22 * o.t22
            + self.t33 * o.t33
            + 2.0 * (self.t12 * o.t12 + self.t13 * o.t13 + self.t23 * o.t23)
    }

    pub fn contract_full(&self, o: &Tensor3) -> f64 {
        contract(&self.to_tensor(), o)
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let [x, y, z] = v.0;
        Vec3([
            self.t11 * x + self.t12 * y + self.t13 * z,
            self.t12 * x + self.t22 * y + self.t23 * z,
            self.t13 * x + self.t23 * y + self.t33 * z,
        ])
    }

    pub fn norm(&self) -> f64 {
        self.contract(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_components(self.components().map(|c| c * s))
    }
}

impl Add for SymTensor3 {
    type Output = SymTensor3;
    fn add(self, o: SymTensor3) -> SymTensor3 {
        SymTensor3::new(
            self.t11 + o.t11,
            self.t22 + o.t22,
            self.t33 + o.t33,
            self.t12 + o.t12,
            self.t13 + o.t13,
            self.t23 + o.t23,
        )
    }
}

impl AddAssign for SymTensor3 {
    fn add_assign(&mut self, o: SymTensor3) {
        *self = *self + o;
    }
}

impl Sub for SymTensor3 {
    type Output = SymTensor3;
    fn sub(self, o: SymTensor3) -> SymTensor3 {
        self + o.scale(-1.0)
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = SymTensor3;
    fn mul(self, s: f64) -> SymTensor3 {
        self.scale(s)
    }
}

impl Neg for SymTensor3 {
    type Output = SymTensor3;
    fn neg(self) -> SymTensor3 {
        self.scale(-1.0)
    }
}

/// `Σ a_ij b_ij`.
pub fn contract(a: &Tensor3, b: &Tensor3) -> f64 {
    a.0.iter()
        .flatten()
        .zip(b.0.iter().flatten())
        .map(|(x, y)| x * y)
        .sum()
}

/// Linear strain `ε(∇u) = ½(∇u + ∇uᵀ)`.
pub fn strain(grad_u: &Tensor3) -> SymTensor3 {
    let g = &grad_u.0;
    SymTensor3::new(
        g[0][0],
        g[1][1],
        g[2][2],
        0.5 * (g[0][1] + g[1][0]),
        0.5 * (g[0][2] + g[2][0]),
        0.5 * (g[1][2] + g[2][1]),
    )
}

/// Slip tensor `m = ε(b̂ ⊗ g)` of a slip system.
pub fn slip_tensor(b_hat: &Vec3, g: &Vec3) -> Result<SymTensor3> {
    if !b_hat.is_unit() || !g.is_unit() {
        return Err(Error::InvalidInput(format!(
            "slip tensor needs unit vectors, got |b̂| = {}, |g| = {}",
            b_hat.norm(),
            g.norm()
        )));
    }
    Ok(strain(&outer(b_hat, g)))
}

/// Isotropic elasticity `D ε = λ tr(ε) I + 2μ ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicElasticity {
    lambda: f64,
    mu: f64,
}

impl IsotropicElasticity {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite()) || mu <= 0.0 || 3.0 * lambda + 2.0 * mu <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "isotropic elasticity needs mu > 0 and 3 lambda + 2 mu > 0 (lambda = {lambda}, mu = {mu})"
            )));
        }
        Ok(Self { lambda, mu })
    }

    /// Lamé parameters from shear modulus and Poisson's ratio.
    pub fn from_poisson(mu: f64, nu: f64) -> Result<Self> {
        if !(-1.0 < nu && nu < 0.5) {
            return Err(Error::InvalidInput(format!(
                "Poisson's ratio must lie in (-1, 1/2), got {nu}"
            )));
        }
        Self::new(2.0 * mu * nu / (1.0 - 2.0 * nu), mu)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Poisson's ratio `ν = λ / (2(λ + μ))`.
    pub fn nu(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }

    pub fn apply(&self, e: &SymTensor3) -> SymTensor3 {
        let lt = self.lambda * e.trace();
        let m2 = 2.0 * self.mu;
        SymTensor3::new(
            lt + m2 * e.t11,
            lt + m2 * e.t22,
            lt + m2 * e.t33,
            m2 * e.t12,
            m2 * e.t13,
            m2 * e.t23,
        )
    }

    pub fn to_general(&self) -> GeneralElasticity {
        let mut m = Matrix6::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = self.lambda;
            }
            m[(i, i)] += 2.0 * self.mu;
            m[(i + 3, i + 3)] = 2.0 * self.mu;
        }
        GeneralElasticity::from_mandel_matrix(m).expect("valid isotropic constants are positive definite")
    }
}

/// Anisotropic elasticity stored as a 6×6 Mandel matrix, ordering
/// `(11, 22, 33, 23, 13, 12)` with √2 on shear components.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralElasticity {
    mandel: Matrix6<f64>,
    compliance: Matrix6<f64>,
    eig_min: f64,
    eig_max: f64,
}

impl GeneralElasticity {
    pub fn from_mandel_matrix(m: Matrix6<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("elasticity matrix has non-finite entries".into()));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput("elasticity matrix is not symmetric".into()));
        }
        let eig = SymmetricEigen::new(m).eigenvalues;
        let eig_min = eig.min();
        let eig_max = eig.max();
        if eig_min <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "elasticity matrix is not positive definite (smallest eigenvalue {eig_min})"
            )));
        }
        let compliance = m.try_inverse().ok_or_else(|| Error::InvalidInput("elasticity matrix is singular".into()))?;
        Ok(Self {
            mandel: m,
            compliance,
            eig_min,
            eig_max,
        })
    }

    /// Accepts a 6×6 row-major array in Mandel ordering.
    pub fn from_rows(rows: [[f64; 6]; 6]) -> Result<Self> {
        Self::from_mandel_matrix(Matrix6::from_fn(|i, j| rows[i][j]))
    }

    pub fn identity() -> Self {
        Self::from_mandel_matrix(Matrix6::identity()).expect("identity is positive definite")
    }

    pub fn mandel(&self) -> &Matrix6<f64> {
        &self.mandel
    }

    /// Extreme eigenvalues of the Mandel matrix.
    pub fn eigen_bounds(&self) -> (f64, f64) {
        (self.eig_min, self.eig_max)
    }

    pub fn apply(&self, e: &SymTensor3) -> SymTensor3 {
        let v = self.mandel * Vector6::from(e.to_mandel());
        SymTensor3::from_mandel([v[0], v[1], v[2], v[3], v[4], v[5]])
    }

    pub fn compliance(&self) -> &Matrix6<f64> {
        &self.compliance
    }
}

/// Any supported elasticity tensor.
#[derive(Debug, Clone, PartialEq)]
pub enum Elasticity {
    Isotropic(IsotropicElasticity),
    General(GeneralElasticity),
}

impl Elasticity {
    pub fn apply(&self, e: &SymTensor3) -> SymTensor3 {
        match self {
            Elasticity::Isotropic(d) => d.apply(e),
            Elasticity::General(d) => d.apply(e),
        }
    }

    /// Solves `D ε = t` for ε.
    pub fn apply_inverse(&self, t: &SymTensor3) -> SymTensor3 {
        match self {
            Elasticity::Isotropic(d) => {
                // ε = (t − λ tr(t)/(3λ + 2μ) I) / 2μ
                let c = d.lambda * t.trace() / (3.0 * d.lambda + 2.0 * d.mu);
                (*t - SymTensor3::identity() * c) * (0.5 / d.mu)
            }
            Elasticity::General(d) => {
                let v = d.compliance() * Vector6::from(t.to_mandel());
                SymTensor3::from_mandel([v[0], v[1], v[2], v[3], v[4], v[5]])
            }
        }
    }

    pub fn as_general(&self) -> GeneralElasticity {
        match self {
            Elasticity::Isotropic(d) => d.to_general(),
            Elasticity::General(d) => d.clone(),
        }
    }

    pub fn as_isotropic(&self) -> Option<&IsotropicElasticity> {
        match self {
            Elasticity::Isotropic(d) => Some(d),
            Elasticity::General(_) => None,
        }
    }

    /// Shear modulus used for nondimensional scaling.
    pub fn shear_scale(&self) -> f64 {
        match self {
            Elasticity::Isotropic(d) => d.mu,
            Elasticity::General(d) => 0.25 * (d.eig_min + d.eig_max),
        }
    }
}

impl From<IsotropicElasticity> for Elasticity {
    fn from(d: IsotropicElasticity) -> Self {
        Elasticity::Isotropic(d)
    }
}

impl From<GeneralElasticity> for Elasticity {
    fn from(d: GeneralElasticity) -> Self {
        Elasticity::General(d)
    }
}

/// Free-function form of `D ε`.
pub fn apply_elasticity(d: &Elasticity, e: &SymTensor3) -> SymTensor3 {
    d.apply(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym_rand(seed: u64) -> SymTensor3 {
        // small LCG; enough for algebraic identities
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        SymTensor3::new(next(), next(), next(), next(), next(), next())
    }

    #[test]
    fn strain_examples() {
        assert_eq!(strain(&Tensor3::identity()), SymTensor3::identity());
        let s = strain(&outer(&Vec3::E2, &Vec3::E3));
        assert_eq!(s, SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.5));
        let a = Vec3::new(0.3, -1.2, 2.0);
        let c = Vec3::new(1.1, 0.4, -0.7);
        let anti = outer(&a, &c) - outer(&c, &a);
        assert!(strain(&anti).max_abs() < 1e-15);
    }

    #[test]
    fn isotropic_examples() {
        let d = IsotropicElasticity::new(1.0, 1.0).unwrap();
        assert_eq!(d.apply(&SymTensor3::identity()), SymTensor3::identity() * 5.0);
        let d = IsotropicElasticity::new(0.0, 1.0).unwrap();
        let e = SymTensor3::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0);
        assert_eq!(d.apply(&e), SymTensor3::new(0.0, 0.0, 0.0, 2.0, 0.0, 0.0));
        let id = Elasticity::General(GeneralElasticity::identity());
        let e = sym_rand(3);
        let out = id.apply(&e);
        for (x, y) in out.components().iter().zip(e.components()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn isotropic_invariants_rejected() {
        assert!(IsotropicElasticity::new(1.0, 0.0).is_err());
        assert!(IsotropicElasticity::new(-1.0, 1.0).is_err());
        let d = IsotropicElasticity::new(-0.5, 1.0).unwrap();
        assert!(d.nu() > -1.0 && d.nu() < 0.5);
        let d = IsotropicElasticity::from_poisson(1.0, 0.3).unwrap();
        assert!((d.nu() - 0.3).abs() < 1e-14);
    }

    #[test]
    fn general_matches_isotropic() {
        let iso = IsotropicElasticity::new(1.7, 0.6).unwrap();
        let gen = iso.to_general();
        for seed in 0..20 {
            let e = sym_rand(seed);
            let a = iso.apply(&e);
            let b = gen.apply(&e);
            assert!((a - b).max_abs() < 1e-14);
            let back = Elasticity::General(gen.clone()).apply_inverse(&a);
            assert!((back - e).max_abs() < 1e-13);
            let back = Elasticity::Isotropic(iso).apply_inverse(&a);
            assert!((back - e).max_abs() < 1e-13);
        }
    }

    #[test]
    fn general_rejects_indefinite() {
        let mut rows = [[0.0; 6]; 6];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 1.0;
        }
        rows[5][5] = -0.1;
        assert!(GeneralElasticity::from_rows(rows).is_err());
        rows[5][5] = 1.0;
        rows[0][1] = 0.2;
        assert!(GeneralElasticity::from_rows(rows).is_err());
    }

    #[test]
    fn slip_tensor_examples() {
        let m = slip_tensor(&Vec3::E2, &Vec3::E3).unwrap();
        assert_eq!(m, SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.5));
        assert!((m.contract(&m) - 0.5).abs() < 1e-15);
        let m = slip_tensor(&Vec3::E1, &Vec3::E1).unwrap();
        assert_eq!(m, SymTensor3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        // m : T with only t23 = σ gives σ (direct contraction: 2 · ½ · σ)
        let sigma = 0.37;
        let t = SymTensor3::new(0.0, 0.0, 0.0, 0.0, 0.0, sigma);
        let m = slip_tensor(&Vec3::E2, &Vec3::E3).unwrap();
        let direct: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j) * t.get(i, j))
            .sum();
        assert!((m.contract(&t) - direct).abs() < 1e-15);
        assert!((direct - sigma).abs() < 1e-15);
        assert!(slip_tensor(&Vec3::new(1.0, 1.0, 0.0), &Vec3::E3).is_err());
    }

    #[test]
    fn slip_tensor_trace_is_dot() {
        let b = Vec3::new(1.0, 2.0, -0.5).normalized().unwrap();
        let g = Vec3::new(0.2, -0.1, 1.0).normalized().unwrap();
        let m = slip_tensor(&b, &g).unwrap();
        assert!((m.trace() - b.dot(&g)).abs() < 1e-15);
    }

    #[test]
    fn vector_identities() {
        assert_eq!(cross(&Vec3::E3, &Vec3::E2), -Vec3::E1);
        let o = outer(&Vec3::E1, &Vec3::E2);
        assert_eq!(contract(&o, &o), 1.0);
        let s = sym_rand(9);
        assert!((contract(&Tensor3::identity(), &s.to_tensor()) - s.trace()).abs() < 1e-15);
    }

    #[test]
    fn mandel_contraction() {
        let a = sym_rand(1);
        let b = sym_rand(2);
        let ma = a.to_mandel();
        let mb = b.to_mandel();
        let dot: f64 = ma.iter().zip(mb).map(|(x, y)| x * y).sum();
        assert!((dot - a.contract(&b)).abs() < 1e-14);
        assert!((a.contract(&b) - contract(&a.to_tensor(), &b.to_tensor())).abs() < 1e-14);
        let back = SymTensor3::from_mandel(ma);
        assert!((back - a).max_abs() < 1e-15);
    }
}
