//! Compactly supported test functions for pairing with dislocation measures.

use crate::tensor::{Tensor3, Vec3};

/// Axis-aligned box containing the support of a test function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportBox {
    pub lo: Vec3,
    pub hi: Vec3,
}

impl SupportBox {
    pub fn new(lo: Vec3, hi: Vec3) -> Self {
        SupportBox { lo, hi }
    }

    pub fn centered(center: Vec3, half: Vec3) -> Self {
        SupportBox {
            lo: center - half,
            hi: center + half,
        }
    }

    pub fn contains(&self, x: &Vec3) -> bool {
        (0..3).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }

    fn boundary_samples(&self, per_edge: usize) -> Vec<Vec3> {
        let mut pts = Vec::new();
        let lerp = |i: usize, t: f64| self.lo[i] + t * (self.hi[i] - self.lo[i]);
        for face_axis in 0..3 {
            let (a, b) = ((face_axis + 1) % 3, (face_axis + 2) % 3);
            for side in [0.0, 1.0] {
                for p in 0..=per_edge {
                    for q in 0..=per_edge {
                        let mut x = [0.0; 3];
                        x[face_axis] = lerp(face_axis, side);
                        x[a] = lerp(a, p as f64 / per_edge as f64);
                        x[b] = lerp(b, q as f64 / per_edge as f64);
                        pts.push(Vec3(x));
                    }
                }
            }
        }
        pts
    }
}

/// Smooth vector-valued function with compact support.
pub trait VectorTestFunction {
    fn eval(&self, x: &Vec3) -> Vec3;
    fn support(&self) -> SupportBox;

    /// Samples the support boundary and returns the largest magnitude seen;
    /// a valid test function gives zero.
    fn boundary_max(&self, per_edge: usize) -> f64 {
        self.support()
            .boundary_samples(per_edge)
            .iter()
            .map(|x| self.eval(x).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Smooth tensor-valued function with compact support.
pub trait TensorTestFunction {
    fn eval(&self, x: &Vec3) -> Tensor3;
    fn support(&self) -> SupportBox;

    /// Row-wise curl, `(rot φ)_ij = ε_jkl ∂_k φ_il`. The default uses a
    /// fourth-order central difference with step `fd_step()`.
    fn rot(&self, x: &Vec3) -> Tensor3 {
        let h = self.fd_step();
        // d[k] = ∂_k φ
        let mut d = [Tensor3::ZERO; 3];
        for (k, dk) in d.iter_mut().enumerate() {
            let e = Vec3::axis(k);
            let f = |s: f64| self.eval(&(*x + e * (s * h)));
            *dk = (f(-2.0) - f(2.0) + (f(1.0) - f(-1.0)) * 8.0) * (1.0 / (12.0 * h));
        }
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            row[0] = d[1].0[i][2] - d[2].0[i][1];
            row[1] = d[2].0[i][0] - d[0].0[i][2];
            row[2] = d[0].0[i][1] - d[1].0[i][0];
        }
        Tensor3(out)
    }

    fn fd_step(&self) -> f64 {
        let s = self.support();
        let ext = (0..3).map(|i| s.hi[i] - s.lo[i]).fold(0.0, f64::max);
        1e-3 * ext.max(1e-6)
    }

    fn boundary_max(&self, per_edge: usize) -> f64 {
        self.support()
            .boundary_samples(per_edge)
            .iter()
            .map(|x| self.eval(x).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Closure-backed vector test function.
pub struct FnVectorTest<F> {
    f: F,
    support: SupportBox,
}

impl<F: Fn(&Vec3) -> Vec3> FnVectorTest<F> {
    pub fn new(support: SupportBox, f: F) -> Self {
        FnVectorTest { f, support }
    }
}

impl<F: Fn(&Vec3) -> Vec3> VectorTestFunction for FnVectorTest<F> {
    fn eval(&self, x: &Vec3) -> Vec3 {
        if self.support.contains(x) {
            (self.f)(x)
        } else {
            Vec3::ZERO
        }
    }
    fn support(&self) -> SupportBox {
        self.support
    }
}

/// Closure-backed tensor test function.
pub struct FnTensorTest<F> {
    f: F,
    support: SupportBox,
}

impl<F: Fn(&Vec3) -> Tensor3> FnTensorTest<F> {
    pub fn new(support: SupportBox, f: F) -> Self {
        FnTensorTest { f, support }
    }
}

impl<F: Fn(&Vec3) -> Tensor3> TensorTestFunction for FnTensorTest<F> {
    fn eval(&self, x: &Vec3) -> Tensor3 {
        if self.support.contains(x) {
            (self.f)(x)
        } else {
            Tensor3::ZERO
        }
    }
    fn support(&self) -> SupportBox {
        self.support
    }
}

/// The standard C∞ bump `exp(−1/(1 − s²))` on |s| < 1, zero elsewhere.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Tensor product of bumps centered at `center` with half-widths `half`.
pub fn box_bump(x: &Vec3, center: &Vec3, half: &Vec3) -> f64 {
    (0..3).map(|i| bump((x[i] - center[i]) / half[i])).product()
}

/// Product of a bump in the distance from the x3-axis and a bump in x3.
/// Smooth because the radial factor depends on r² only.
pub fn cylinder_bump(x: &Vec3, radius: f64, half_height: f64) -> f64 {
    let r2 = (x[0] * x[0] + x[1] * x[1]) / (radius * radius);
    if r2 >= 1.0 {
        return 0.0;
    }
    (-1.0 / (1.0 - r2)).exp() * bump(x[2] / half_height)
}
