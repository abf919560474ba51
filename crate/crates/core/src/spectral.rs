//! Fourier transforms and spectral differential operators on a periodic cell.
//!
//! Derivatives use the wavevector `k = 2π m / L` with the Nyquist component
//! set to zero, so gradient, divergence and curl of real fields stay real and
//! the discrete identities `curl ∇ = 0`, `div curl = 0` hold to rounding.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::PeriodicCell;
use crate::tensor::{SymTensor3, Vec3};

pub type Complex = Complex64;

const I: Complex = Complex { re: 0.0, im: 1.0 };

pub struct Spectral {
    cell: PeriodicCell,
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
    /// Derivative wavenumbers per axis (Nyquist zeroed).
    k: [Vec<f64>; 3],
    /// Mode index is a Nyquist index along that axis.
    nyquist: [Vec<bool>; 3],
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("cell", &self.cell).finish()
    }
}

impl Spectral {
    pub fn new(cell: PeriodicCell) -> Self {
        let mut planner = FftPlanner::new();
        let n = cell.dims();
        let l = cell.lengths();
        let forward = [0, 1, 2].map(|a| planner.plan_fft_forward(n[a]));
        let inverse = [0, 1, 2].map(|a| planner.plan_fft_inverse(n[a]));
        let k = [0, 1, 2].map(|a| {
            (0..n[a])
                .map(|m| {
                    let s = if m < n[a] / 2 {
                        m as f64
                    } else if m == n[a] / 2 {
                        0.0
                    } else {
                        m as f64 - n[a] as f64
                    };
                    2.0 * std::f64::consts::PI * s / l[a]
                })
                .collect()
        });
        let nyquist = [0, 1, 2].map(|a| (0..n[a]).map(|m| m == n[a] / 2).collect());
        Spectral {
            cell,
            forward,
            inverse,
            k,
            nyquist,
        }
    }

    pub fn cell(&self) -> &PeriodicCell {
        &self.cell
    }

    /// Derivative wavevector of mode `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> Vec3 {
        let [a, b, c] = self.cell.coords(idx);
        Vec3([self.k[0][a], self.k[1][b], self.k[2][c]])
    }

    /// True when any component of the mode is a Nyquist index.
    #[inline]
    pub fn has_nyquist(&self, idx: usize) -> bool {
        let [a, b, c] = self.cell.coords(idx);
        self.nyquist[0][a] || self.nyquist[1][b] || self.nyquist[2][c]
    }

    fn transform(&self, data: &mut [Complex], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [n1, n2, n3] = self.cell.dims();
        assert_eq!(data.len(), n1 * n2 * n3);
        // axis 1: contiguous rows
        let mut scratch = vec![Complex::default(); plans[0].get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(n1) {
            plans[0].process_with_scratch(row, &mut scratch);
        }
        // axis 2
        let mut line = vec![Complex::default(); n2];
        let mut scratch = vec![Complex::default(); plans[1].get_inplace_scratch_len()];
        for i3 in 0..n3 {
            for i1 in 0..n1 {
                let base = i1 + n1 * n2 * i3;
                for (i2, v) in line.iter_mut().enumerate() {
                    *v = data[base + n1 * i2];
                }
                plans[1].process_with_scratch(&mut line, &mut scratch);
                for (i2, v) in line.iter().enumerate() {
                    data[base + n1 * i2] = *v;
                }
            }
        }
        // axis 3
        let mut line = vec![Complex::default(); n3];
        let mut scratch = vec![Complex::default(); plans[2].get_inplace_scratch_len()];
        let plane = n1 * n2;
        for base in 0..plane {
            for (i3, v) in line.iter_mut().enumerate() {
                *v = data[base + plane * i3];
            }
            plans[2].process_with_scratch(&mut line, &mut scratch);
            for (i3, v) in line.iter().enumerate() {
                data[base + plane * i3] = *v;
            }
        }
    }

    pub fn forward_inplace(&self, data: &mut [Complex]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse_inplace(&self, data: &mut [Complex]) {
        self.transform(data, &self.inverse);
        let s = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn forward_real(&self, f: &[f64]) -> Vec<Complex> {
        let mut d: Vec<Complex> = f.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.forward_inplace(&mut d);
        d
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&self, mut d: Vec<Complex>) -> Vec<f64> {
        self.inverse_inplace(&mut d);
        d.into_iter().map(|c| c.re).collect()
    }

    pub fn forward_vec(&self, f: &[Vec3]) -> [Vec<Complex>; 3] {
        [0, 1, 2].map(|c| self.forward_real(&f.iter().map(|v| v[c]).collect::<Vec<_>>()))
    }

    pub fn inverse_vec(&self, d: [Vec<Complex>; 3]) -> Vec<Vec3> {
        let [a, b, c] = d.map(|x| self.inverse_real(x));
        a.into_iter()
            .zip(b)
            .zip(c)
            .map(|((x, y), z)| Vec3::new(x, y, z))
            .collect()
    }

    /// Transforms of the six components in `(11, 22, 33, 23, 13, 12)` order.
    pub fn forward_sym(&self, f: &[SymTensor3]) -> [Vec<Complex>; 6] {
        [0, 1, 2, 3, 4, 5].map(|c| self.forward_real(&f.iter().map(|t| t.components()[c]).collect::<Vec<_>>()))
    }

    pub fn inverse_sym(&self, d: [Vec<Complex>; 6]) -> Vec<SymTensor3> {
        let comps = d.map(|x| self.inverse_real(x));
        (0..self.cell.node_count())
            .map(|i| SymTensor3::from_components([0, 1, 2, 3, 4, 5].map(|c| comps[c][i])))
            .collect()
    }

    pub fn gradient(&self, f: &[f64]) -> Vec<Vec3> {
        let fh = self.forward_real(f);
        let out = [0, 1, 2].map(|a| {
            fh.iter()
                .enumerate()
                .map(|(idx, v)| I * self.wavevector(idx)[a] * v)
                .collect::<Vec<_>>()
        });
        self.inverse_vec(out)
    }

    /// Partial derivative along axis `a`.
    pub fn derivative(&self, f: &[f64], a: usize) -> Vec<f64> {
        let fh = self.forward_real(f);
        self.inverse_real(
            fh.iter()
                .enumerate()
                .map(|(idx, v)| I * self.wavevector(idx)[a] * v)
                .collect(),
        )
    }

    pub fn divergence(&self, f: &[Vec3]) -> Vec<f64> {
        let fh = self.forward_vec(f);
        self.inverse_real(self.divergence_hat(&fh))
    }

    pub fn divergence_hat(&self, fh: &[Vec<Complex>; 3]) -> Vec<Complex> {
        (0..fh[0].len())
            .map(|idx| {
                let k = self.wavevector(idx);
                I * (fh[0][idx] * k[0] + fh[1][idx] * k[1] + fh[2][idx] * k[2])
            })
            .collect()
    }

    pub fn curl(&self, f: &[Vec3]) -> Vec<Vec3> {
        let fh = self.forward_vec(f);
        self.inverse_vec(self.curl_hat(&fh))
    }

    pub fn curl_hat(&self, fh: &[Vec<Complex>; 3]) -> [Vec<Complex>; 3] {
        let n = fh[0].len();
        let mut out = [vec![Complex::default(); n], vec![Complex::default(); n], vec![Complex::default(); n]];
        for idx in 0..n {
            let k = self.wavevector(idx);
            let (a, b, c) = (fh[0][idx], fh[1][idx], fh[2][idx]);
            out[0][idx] = I * (b * -k[2] + c * k[1]);
            out[1][idx] = I * (a * k[2] - c * k[0]);
            out[2][idx] = I * (b * k[0] - a * k[1]);
        }
        out
    }

    /// Coulomb-gauge inverse curl: returns `h` with `div h = 0` and
    /// `curl h = ρ` for solenoidal, zero-mean `ρ`.
    pub fn inverse_curl(&self, rho: &[Vec3]) -> Vec<Vec3> {
        let rh = self.forward_vec(rho);
        let n = rh[0].len();
        let mut out = [vec![Complex::default(); n], vec![Complex::default(); n], vec![Complex::default(); n]];
        for idx in 0..n {
            let k = self.wavevector(idx);
            let k2 = k.norm_squared();
            if k2 == 0.0 {
                continue;
            }
            // h = i k × ρ / |k|²  (curl h = i k × h = ρ when k·ρ = 0)
            let (a, b, c) = (rh[0][idx], rh[1][idx], rh[2][idx]);
            let s = I / k2;
            out[0][idx] = s * (c * k[1] - b * k[2]);
            out[1][idx] = s * (a * k[2] - c * k[0]);
            out[2][idx] = s * (b * k[0] - a * k[1]);
        }
        self.inverse_vec(out)
    }

    /// Removes the gradient part of a vector field (Leray projection); the
    /// mean and modes without a derivative are kept.
    pub fn solenoidal_projection(&self, f: &[Vec3]) -> Vec<Vec3> {
        let mut fh = self.forward_vec(f);
        for idx in 0..fh[0].len() {
            let k = self.wavevector(idx);
            let k2 = k.norm_squared();
            if k2 == 0.0 {
                continue;
            }
            let kd = (fh[0][idx] * k[0] + fh[1][idx] * k[1] + fh[2][idx] * k[2]) / k2;
            for a in 0..3 {
                fh[a][idx] -= kd * k[a];
            }
        }
        self.inverse_vec(fh)
    }

    /// Divergence `(div T)_i = Σ_j ∂_j T_ij` of a symmetric tensor field.
    pub fn divergence_sym(&self, t: &[SymTensor3]) -> Vec<Vec3> {
        let th = self.forward_sym(t);
        self.inverse_vec(self.divergence_sym_hat(&th))
    }

    pub fn divergence_sym_hat(&self, th: &[Vec<Complex>; 6]) -> [Vec<Complex>; 3] {
        let n = th[0].len();
        let mut out = [vec![Complex::default(); n], vec![Complex::default(); n], vec![Complex::default(); n]];
        for idx in 0..n {
            let k = self.wavevector(idx);
            // components: 0:11 1:22 2:33 3:23 4:13 5:12
            let t = |i: usize, j: usize| -> Complex {
                let c = match (i.min(j), i.max(j)) {
                    (0, 0) => 0,
                    (1, 1) => 1,
                    (2, 2) => 2,
                    (1, 2) => 3,
                    (0, 2) => 4,
                    _ => 5,
                };
                th[c][idx]
            };
            for (i, o) in out.iter_mut().enumerate() {
                o[idx] = I * (t(i, 0) * k[0] + t(i, 1) * k[1] + t(i, 2) * k[2]);
            }
        }
        out
    }

    /// L² norm of a complex spectrum, `sqrt(Σ |c|²)`.
    pub fn spectrum_norm(d: &[Complex]) -> f64 {
        d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `sqrt(Σ |v|²)` over a node field.
pub fn l2_norm_vec(f: &[Vec3]) -> f64 {
    f.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

pub fn l2_norm(f: &[f64]) -> f64 {
    f.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cell() -> PeriodicCell {
        PeriodicCell::new([1.0, 2.0, 1.5], [16, 8, 12]).unwrap()
    }

    #[test]
    fn roundtrip() {
        let c = cell();
        let s = Spectral::new(c);
        let f: Vec<f64> = (0..c.node_count()).map(|i| (i as f64 * 0.37).sin()).collect();
        let back = s.inverse_real(s.forward_real(&f));
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_harmonic() {
        let c = cell();
        let s = Spectral::new(c);
        let f: Vec<f64> = (0..c.node_count())
            .map(|i| {
                let x = c.position(i);
                (2.0 * PI * x[1] / 2.0).sin() * (2.0 * PI * 2.0 * x[2] / 1.5).cos()
            })
            .collect();
        let g = s.gradient(&f);
        for i in 0..c.node_count() {
            let x = c.position(i);
            let a = 2.0 * PI / 2.0;
            let b = 4.0 * PI / 1.5;
            let e2 = a * (a * x[1]).cos() * (b * x[2]).cos();
            let e3 = -b * (a * x[1]).sin() * (b * x[2]).sin();
            assert!(g[i][0].abs() < 1e-12);
            assert!((g[i][1] - e2).abs() < 1e-11);
            assert!((g[i][2] - e3).abs() < 1e-11);
        }
    }

    #[test]
    fn curl_of_gradient_and_div_of_curl_vanish() {
        let c = cell();
        let s = Spectral::new(c);
        let f: Vec<f64> = (0..c.node_count()).map(|i| ((i * 7919) % 101) as f64 / 101.0).collect();
        let g = s.gradient(&f);
        assert!(l2_norm_vec(&s.curl(&g)) < 1e-10 * l2_norm_vec(&g));
        let v: Vec<Vec3> = (0..c.node_count())
            .map(|i| Vec3::new(((i * 31) % 17) as f64, ((i * 13) % 7) as f64, ((i * 5) % 11) as f64))
            .collect();
        let cv = s.curl(&v);
        assert!(l2_norm(&s.divergence(&cv)) < 1e-10 * l2_norm_vec(&cv));
    }

    #[test]
    fn inverse_curl_roundtrip() {
        let c = cell();
        let s = Spectral::new(c);
        let v: Vec<Vec3> = (0..c.node_count())
            .map(|i| Vec3::new(((i * 31) % 17) as f64, ((i * 13) % 7) as f64, ((i * 5) % 11) as f64))
            .collect();
        let rho = s.curl(&v);
        let h = s.inverse_curl(&rho);
        let back = s.curl(&h);
        let err: Vec<Vec3> = back.iter().zip(&rho).map(|(a, b)| *a - *b).collect();
        assert!(l2_norm_vec(&err) < 1e-10 * l2_norm_vec(&rho));
    }
}
