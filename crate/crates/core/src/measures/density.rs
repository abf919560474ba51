//! Gridded dislocation densities on a periodic cell.

use crate::error::{Error, Result};
use crate::grid::PeriodicCell;
use crate::registry::Registry;
use crate::spectral::{l2_norm_vec, Spectral};
use crate::tensor::Vec3;

use super::curve::DislocationCurve;
use super::test_fn::VectorTestFunction;

/// Vector measure `ρ = τ |ρ|` sampled on the nodes of a periodic cell.
/// `weight` is the density of `|ρ|` per unit volume.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    cell: PeriodicCell,
    tau: Vec<Vec3>,
    weight: Vec<f64>,
}

const TAU_TOL: f64 = 1e-10;

impl DensityGrid {
    pub fn new(cell: PeriodicCell, tau: Vec<Vec3>, weight: Vec<f64>) -> Result<Self> {
        let n = cell.node_count();
        if tau.len() != n || weight.len() != n {
            return Err(Error::invalid(format!(
                "density grid needs {n} nodes, got tau {} and weight {}",
                tau.len(),
                weight.len()
            )));
        }
        for (i, (t, &w)) in tau.iter().zip(&weight).enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("weight at node {i} is {w}")));
            }
            if w > 0.0 && (t.norm() - 1.0).abs() > TAU_TOL {
                return Err(Error::invalid(format!("tau at node {i} is not a unit vector")));
            }
        }
        Ok(DensityGrid { cell, tau, weight })
    }

    pub fn zero(cell: PeriodicCell) -> Self {
        let n = cell.node_count();
        DensityGrid {
            cell,
            tau: vec![Vec3::ZERO; n],
            weight: vec![0.0; n],
        }
    }

    /// Splits a vector density into direction and magnitude.
    pub fn from_vector_field(cell: PeriodicCell, rho: &[Vec3]) -> Result<Self> {
        if rho.len() != cell.node_count() {
            return Err(Error::invalid("vector field size does not match the cell"));
        }
        let mut tau = Vec::with_capacity(rho.len());
        let mut weight = Vec::with_capacity(rho.len());
        for v in rho {
            let w = v.norm();
            if w > 0.0 {
                tau.push(*v * (1.0 / w));
                weight.push(w);
            } else {
                tau.push(Vec3::ZERO);
                weight.push(0.0);
            }
        }
        Ok(DensityGrid { cell, tau, weight })
    }

    pub fn cell(&self) -> &PeriodicCell {
        &self.cell
    }

    pub fn tau(&self) -> &[Vec3] {
        &self.tau
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    /// `τ · weight` at every node.
    pub fn vector_field(&self) -> Vec<Vec3> {
        self.tau.iter().zip(&self.weight).map(|(t, w)| *t * *w).collect()
    }

    /// Cell integral of `|ρ|`.
    pub fn total_weight(&self) -> f64 {
        self.weight.iter().sum::<f64>() * self.cell.node_volume()
    }

    /// Cell integral of `x |ρ|` with node positions in the fundamental cell.
    pub fn first_moment(&self) -> Vec3 {
        let dv = self.cell.node_volume();
        let mut m = Vec3::ZERO;
        for (i, w) in self.weight.iter().enumerate() {
            m += self.cell.position(i) * (w * dv);
        }
        m
    }

    /// Relative size of the longitudinal spectrum, `‖k·ρ̂‖ / ‖|k| |ρ̂|‖`;
    /// zero for a rotation field.
    pub fn divergence_residual(&self) -> f64 {
        let s = Spectral::new(self.cell);
        let rh = s.forward_vec(&self.vector_field());
        let (mut num, mut den) = (0.0, 0.0);
        for idx in 0..rh[0].len() {
            let k = s.wavevector(idx);
            let kd = rh[0][idx] * k[0] + rh[1][idx] * k[1] + rh[2][idx] * k[2];
            num += kd.norm_sqr();
            den += k.norm_squared() * (rh[0][idx].norm_sqr() + rh[1][idx].norm_sqr() + rh[2][idx].norm_sqr());
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Removes the gradient part of `τ·weight`, leaving a rotation field
    /// with the same mean.
    pub fn project_solenoidal(&self) -> DensityGrid {
        let s = Spectral::new(self.cell);
        let p = s.solenoidal_projection(&self.vector_field());
        DensityGrid::from_vector_field(self.cell, &p).expect("same cell")
    }
}

/// Grid pairing `Σ (τ·weight)(x_i)·φ(x_i) ΔV`, the discrete analogue of `⟨ρ, φ⟩`.
pub fn pair_grid(grid: &DensityGrid, phi: &dyn VectorTestFunction) -> f64 {
    let dv = grid.cell.node_volume();
    grid.vector_field()
        .iter()
        .enumerate()
        .map(|(i, v)| v.dot(&phi.eval(&grid.cell.position(i))))
        .sum::<f64>()
        * dv
}

/// Relative L² mismatch between the spectral curl of `h` and `τ·weight`.
/// Falls back to the absolute RMS mismatch when `rho` vanishes.
pub fn curl_consistency(h: &[Vec3], rho: &DensityGrid) -> Result<f64> {
    if h.len() != rho.cell.node_count() {
        return Err(Error::invalid("field and density live on different grids"));
    }
    let s = Spectral::new(rho.cell);
    let c = s.curl(h);
    let r = rho.vector_field();
    let diff: Vec<Vec3> = c.iter().zip(&r).map(|(a, b)| *a - *b).collect();
    let rn = l2_norm_vec(&r);
    Ok(if rn > 0.0 {
        l2_norm_vec(&diff) / rn
    } else {
        l2_norm_vec(&diff) / (r.len() as f64).sqrt()
    })
}

/// Spreads a point sample to nearby nodes.
pub trait DepositionKernel: Send + Sync {
    fn name(&self) -> &'static str;

    /// Appends `(node, weight)` pairs whose weights sum to one.
    fn stencil(&self, cell: &PeriodicCell, x: &Vec3, out: &mut Vec<(usize, f64)>);
}

/// Trilinear (cloud-in-cell) weights.
#[derive(Debug, Clone, Copy, Default)]
pub struct CloudInCell;

impl DepositionKernel for CloudInCell {
    fn name(&self) -> &'static str {
        "cic"
    }

    fn stencil(&self, cell: &PeriodicCell, x: &Vec3, out: &mut Vec<(usize, f64)>) {
        let h = cell.spacing();
        let mut base = [0isize; 3];
        let mut w = [[0.0; 2]; 3];
        for a in 0..3 {
            let s = x[a] / h[a];
            let f = s.floor();
            base[a] = f as isize;
            w[a] = [1.0 - (s - f), s - f];
        }
        for c in 0..8 {
            let o = [c & 1, (c >> 1) & 1, (c >> 2) & 1];
            let wt = w[0][o[0]] * w[1][o[1]] * w[2][o[2]];
            out.push((
                cell.index_wrapped(base[0] + o[0] as isize, base[1] + o[1] as isize, base[2] + o[2] as isize),
                wt,
            ));
        }
    }
}

/// Quadratic spline (triangular-shaped cloud) weights over 3 nodes per axis.
#[derive(Debug, Clone, Copy, Default)]
pub struct TriangularShapedCloud;

impl DepositionKernel for TriangularShapedCloud {
    fn name(&self) -> &'static str {
        "tsc"
    }

    fn stencil(&self, cell: &PeriodicCell, x: &Vec3, out: &mut Vec<(usize, f64)>) {
        let h = cell.spacing();
        let mut base = [0isize; 3];
        let mut w = [[0.0; 3]; 3];
        for a in 0..3 {
            let s = x[a] / h[a];
            let r = s.round();
            let d = s - r;
            base[a] = r as isize;
            w[a] = [0.5 * (0.5 - d).powi(2), 0.75 - d * d, 0.5 * (0.5 + d).powi(2)];
        }
        for k in 0..3 {
            for j in 0..3 {
                for i in 0..3 {
                    out.push((
                        cell.index_wrapped(base[0] + i as isize - 1, base[1] + j as isize - 1, base[2] + k as isize - 1),
                        w[0][i] * w[1][j] * w[2][k],
                    ));
                }
            }
        }
    }
}

/// Built-in deposition kernels: `cic` and `tsc`.
pub fn kernel_registry() -> Registry<dyn DepositionKernel> {
    let mut r: Registry<dyn DepositionKernel> = Registry::new("deposition kernel");
    r.register("cic", |_| Ok(Box::new(CloudInCell)));
    r.register("tsc", |_| Ok(Box::new(TriangularShapedCloud)));
    r
}

/// Deposits `|b| × (line element) × τ` of every curve onto the grid.
///
/// Segments are cut into pieces no longer than a quarter of the smallest
/// spacing and each piece is deposited at its midpoint (wrapped into the
/// cell). The scalar weight receives `|b| × length` exactly; `τ` is the
/// direction of the deposited vector density.
pub fn rasterize(curves: &[DislocationCurve], cell: &PeriodicCell, kernel: &dyn DepositionKernel) -> DensityGrid {
    let n = cell.node_count();
    let mut j = vec![Vec3::ZERO; n];
    let mut s = vec![0.0; n];
    let inv_dv = 1.0 / cell.node_volume();
    let hmin = cell.spacing().into_iter().fold(f64::INFINITY, f64::min);
    let mut stencil = Vec::with_capacity(27);
    for c in curves {
        let bn = c.burgers().norm();
        for (a, b) in c.segments() {
            let d = b - a;
            let len = d.norm();
            if len <= super::curve::MIN_SEGMENT_LENGTH {
                log::warn!("skipping degenerate segment of length {len:e}");
                continue;
            }
            let tau = d * (1.0 / len);
            let pieces = (4.0 * len / hmin).ceil().max(1.0) as usize;
            let dl = len / pieces as f64;
            for p in 0..pieces {
                let x = cell.wrap(&(a + d * ((p as f64 + 0.5) / pieces as f64)));
                stencil.clear();
                kernel.stencil(cell, &x, &mut stencil);
                for &(idx, w) in &stencil {
                    let m = bn * dl * w * inv_dv;
                    s[idx] += m;
                    j[idx] += tau * m;
                }
            }
        }
    }
    let tau = j
        .iter()
        .zip(&s)
        .map(|(v, &w)| if w > 0.0 { v.normalized().unwrap_or(Vec3::ZERO) } else { Vec3::ZERO })
        .collect::<Vec<_>>();
    let weight = tau
        .iter()
        .zip(s)
        .map(|(t, w)| if *t == Vec3::ZERO { 0.0 } else { w })
        .collect();
    DensityGrid {
        cell: *cell,
        tau,
        weight,
    }
}

/// Deposited vector density `Σ |b| τ dl × kernel / ΔV`, without splitting
/// into direction and magnitude.
pub fn rasterize_vector(curves: &[DislocationCurve], cell: &PeriodicCell, kernel: &dyn DepositionKernel) -> Vec<Vec3> {
    let n = cell.node_count();
    let mut j = vec![Vec3::ZERO; n];
    let inv_dv = 1.0 / cell.node_volume();
    let hmin = cell.spacing().into_iter().fold(f64::INFINITY, f64::min);
    let mut stencil = Vec::with_capacity(27);
    for c in curves {
        let bn = c.burgers().norm();
        for (a, b) in c.segments() {
            let d = b - a;
            let len = d.norm();
            let pieces = (4.0 * len / hmin).ceil().max(1.0) as usize;
            let piece = d * (1.0 / pieces as f64);
            for p in 0..pieces {
                let x = cell.wrap(&(a + d * ((p as f64 + 0.5) / pieces as f64)));
                stencil.clear();
                kernel.stencil(cell, &x, &mut stencil);
                for &(idx, w) in &stencil {
                    j[idx] += piece * (bn * w * inv_dv);
                }
            }
        }
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::test_fn::{box_bump, FnVectorTest, SupportBox};

    fn cell() -> PeriodicCell {
        PeriodicCell::cube(8.0, 32).unwrap()
    }

    fn loop_curve(n: usize) -> DislocationCurve {
        DislocationCurve::circle(Vec3::new(4.0, 4.0, 4.0), 2.0, n, Vec3::E1, Vec3::E2, 0.5, Vec3::E1).unwrap()
    }

    #[test]
    fn kernels_partition_unity() {
        let c = cell();
        for name in kernel_registry().names() {
            let k = kernel_registry().create(name, &()).unwrap();
            let mut st = Vec::new();
            k.stencil(&c, &Vec3::new(7.93, 0.11, 3.3), &mut st);
            let s: f64 = st.iter().map(|p| p.1).sum();
            assert!((s - 1.0).abs() < 1e-14, "{name}");
            assert!(st.iter().all(|p| p.1 >= 0.0));
        }
    }

    #[test]
    fn unit_segment_weight() {
        let c = cell();
        let seg = DislocationCurve::open(vec![Vec3::new(1.1, 2.2, 3.3), Vec3::new(2.1, 2.2, 3.3)], Vec3::E3).unwrap();
        let g = rasterize(&[seg], &c, &CloudInCell);
        assert!((g.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_list_gives_zero_grid() {
        let c = cell();
        assert_eq!(rasterize(&[], &c, &CloudInCell), DensityGrid::zero(c));
    }

    #[test]
    fn loop_moments() {
        let c = cell();
        let curve = loop_curve(200);
        for name in ["cic", "tsc"] {
            let k = kernel_registry().create(name, &()).unwrap();
            let g = rasterize(&[curve.clone()], &c, k.as_ref());
            assert!((g.total_weight() - curve.length()).abs() < 1e-12 * curve.length());
            let m = g.first_moment() * (1.0 / g.total_weight());
            assert!((m - Vec3::new(4.0, 4.0, 4.0)).norm() < 1e-10, "{name}: {m:?}");
        }
    }

    #[test]
    fn grid_pairing_converges_to_curve_pairing() {
        let center = Vec3::new(4.0, 4.0, 4.0);
        let half = Vec3::new(3.5, 3.5, 3.5);
        let phi = FnVectorTest::new(SupportBox::centered(center, half), move |x| {
            let y = *x - center;
            Vec3::new(-y[1], y[0], 0.3) * box_bump(x, &center, &half)
        });
        let curve = loop_curve(512);
        let exact = crate::measures::curve::pair_vector(&curve, &phi);
        let err = |n: usize| {
            let c = PeriodicCell::cube(8.0, n).unwrap();
            let j = rasterize_vector(&[curve.clone()], &c, &CloudInCell);
            let dv = c.node_volume();
            let p: f64 = j.iter().enumerate().map(|(i, v)| v.dot(&phi.eval(&c.position(i)))).sum::<f64>() * dv;
            (p - exact).abs()
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e2 < e1 / 3.0, "{e1} {e2}");
    }

    #[test]
    fn projection_makes_rasterized_loop_solenoidal() {
        let c = cell();
        let g = rasterize(&[loop_curve(128)], &c, &CloudInCell);
        let p = g.project_solenoidal();
        assert!(p.divergence_residual() < 1e-8);
    }
}
