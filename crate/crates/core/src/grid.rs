//! Periodic box discretized by a uniform node lattice.

use crate::error::{Error, Result};
use crate::tensor::Vec3;

/// Periodic cell `[0, L1) × [0, L2) × [0, L3)` with `n1 × n2 × n3` nodes.
/// Node fields are stored x1-fastest: `idx = i1 + n1 (i2 + n2 i3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicCell {
    lengths: [f64; 3],
    n: [usize; 3],
}

impl PeriodicCell {
    pub fn new(lengths: [f64; 3], n: [usize; 3]) -> Result<Self> {
        for i in 0..3 {
            if !(lengths[i] > 0.0 && lengths[i].is_finite()) {
                return Err(Error::invalid(format!("cell length L{} must be positive, got {}", i + 1, lengths[i])));
            }
            if n[i] < 8 || n[i] % 2 != 0 {
                return Err(Error::invalid(format!(
                    "grid resolution n{} = {} must be an even integer >= 8 (spectral solver)",
                    i + 1,
                    n[i]
                )));
            }
        }
        Ok(PeriodicCell { lengths, n })
    }

    pub fn cube(length: f64, n: usize) -> Result<Self> {
        Self::new([length; 3], [n; 3])
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            self.lengths[0] / self.n[0] as f64,
            self.lengths[1] / self.n[1] as f64,
            self.lengths[2] / self.n[2] as f64,
        ]
    }

    pub fn node_count(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn node_volume(&self) -> f64 {
        let h = self.spacing();
        h[0] * h[1] * h[2]
    }

    pub fn volume(&self) -> f64 {
        self.lengths[0] * self.lengths[1] * self.lengths[2]
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        i1 + self.n[0] * (i2 + self.n[1] * i3)
    }

    /// Index with periodic wrap of signed lattice coordinates.
    #[inline]
    pub fn index_wrapped(&self, i1: isize, i2: isize, i3: isize) -> usize {
        let w = |i: isize, n: usize| i.rem_euclid(n as isize) as usize;
        self.index(w(i1, self.n[0]), w(i2, self.n[1]), w(i3, self.n[2]))
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i1 = idx % self.n[0];
        let rest = idx / self.n[0];
        [i1, rest % self.n[1], rest / self.n[1]]
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let c = self.coords(idx);
        let h = self.spacing();
        Vec3::new(c[0] as f64 * h[0], c[1] as f64 * h[1], c[2] as f64 * h[2])
    }

    /// Wraps a point into the fundamental cell.
    pub fn wrap(&self, x: &Vec3) -> Vec3 {
        Vec3([
            x[0].rem_euclid(self.lengths[0]),
            x[1].rem_euclid(self.lengths[1]),
            x[2].rem_euclid(self.lengths[2]),
        ])
    }

    /// Bytes needed for one scalar f64 field.
    pub fn scalar_field_bytes(&self) -> usize {
        self.node_count() * std::mem::size_of::<f64>()
    }

    /// Trilinear interpolation of a node field at an arbitrary point.
    pub fn interpolate<T>(&self, field: &[T], x: &Vec3) -> T
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let h = self.spacing();
        let mut base = [0isize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let s = x[a] / h[a];
            let f = s.floor();
            base[a] = f as isize;
            frac[a] = s - f;
        }
        let mut acc: Option<T> = None;
        for corner in 0..8 {
            let o = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let mut w = 1.0;
            for a in 0..3 {
                w *= if o[a] == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            let v = field[self.index_wrapped(base[0] + o[0] as isize, base[1] + o[1] as isize, base[2] + o[2] as isize)] * w;
            acc = Some(match acc {
                Some(a) => a + v,
                None => v,
            });
        }
        acc.expect("eight corners")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_small() {
        assert!(PeriodicCell::new([1.0; 3], [8, 9, 8]).is_err());
        assert!(PeriodicCell::new([1.0; 3], [6, 8, 8]).is_err());
        assert!(PeriodicCell::new([0.0, 1.0, 1.0], [8; 3]).is_err());
        assert!(PeriodicCell::new([1.0, 2.0, 3.0], [8, 10, 12]).is_ok());
    }

    #[test]
    fn index_roundtrip() {
        let c = PeriodicCell::new([1.0, 2.0, 3.0], [8, 10, 12]).unwrap();
        for idx in [0, 7, 8, 79, 80, 959] {
            let [a, b, d] = c.coords(idx);
            assert_eq!(c.index(a, b, d), idx);
        }
        assert_eq!(c.index_wrapped(-1, 10, 12), c.index(7, 0, 0));
    }

    #[test]
    fn interpolation_exact_for_linear_in_cell() {
        let c = PeriodicCell::cube(1.0, 8).unwrap();
        let f: Vec<f64> = (0..c.node_count()).map(|i| {
            let x = c.position(i);
            1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2]
        }).collect();
        let x = Vec3::new(0.31, 0.42, 0.13);
        let v = c.interpolate(&f, &x);
        assert!((v - (1.0 + 0.62 - 0.42 + 0.065)).abs() < 1e-14);
    }
}
