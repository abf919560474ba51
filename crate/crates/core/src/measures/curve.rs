//! Polyline dislocation curves and their pairings with test functions.

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::tensor::Vec3;

use super::test_fn::{TensorTestFunction, VectorTestFunction};

/// Segments shorter than this are rejected.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-9;

/// Gauss points per segment used by the pairings.
const PAIR_ORDER: usize = 5;

/// A polyline carrying a constant Burgers vector.
///
/// A closed curve connects its last vertex back to the first. An open curve
/// has no closing segment; it is used for lines that close through the
/// periodic cell (last vertex = first vertex + a lattice vector).
#[derive(Debug, Clone, PartialEq)]
pub struct DislocationCurve {
    vertices: Vec<Vec3>,
    burgers: Vec3,
    closed: bool,
}

impl DislocationCurve {
    pub fn closed(vertices: Vec<Vec3>, burgers: Vec3) -> Result<Self> {
        Self::build(vertices, burgers, true)
    }

    pub fn open(vertices: Vec<Vec3>, burgers: Vec3) -> Result<Self> {
        Self::build(vertices, burgers, false)
    }

    fn build(vertices: Vec<Vec3>, burgers: Vec3, closed: bool) -> Result<Self> {
        if !burgers.is_finite() || burgers.norm() == 0.0 {
            return Err(Error::invalid("Burgers vector must be finite and nonzero"));
        }
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(Error::invalid(format!(
                "{} curve needs at least {min} vertices, got {}",
                if closed { "closed" } else { "open" },
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("vertex {i} is not finite")));
        }
        let c = DislocationCurve {
            vertices,
            burgers,
            closed,
        };
        for (i, (a, b)) in c.segments().enumerate() {
            let l = (b - a).norm();
            if l <= MIN_SEGMENT_LENGTH {
                return Err(Error::invalid(format!("segment {i} has length {l:e}")));
            }
        }
        Ok(c)
    }

    /// Regular polygon inscribed in the circle `center + R(cos θ e_a + sin θ e_b)`,
    /// with vertex k at `θ = 2π(k + phase)/n`.
    pub fn circle(center: Vec3, radius: f64, n: usize, e_a: Vec3, e_b: Vec3, phase: f64, burgers: Vec3) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid("circle radius must be positive"));
        }
        let verts = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + phase) / n as f64;
                center + e_a * (radius * t.cos()) + e_b * (radius * t.sin())
            })
            .collect();
        Self::closed(verts, burgers)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn burgers(&self) -> Vec3 {
        self.burgers
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Same curve type and Burgers vector with new vertices.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        Self::build(vertices, self.burgers, self.closed)
    }

    pub fn segment_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Segment endpoints in order.
    pub fn segments(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let n = self.vertices.len();
        (0..self.segment_count()).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        self.segments().map(|(a, b)| (b - a).norm()).collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    pub fn min_segment_length(&self) -> f64 {
        self.segment_lengths().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Unit tangent of every segment.
    pub fn segment_tangents(&self) -> Vec<Vec3> {
        self.segments()
            .map(|(a, b)| (b - a) * (1.0 / (b - a).norm()))
            .collect()
    }

    /// Node tangents: normalized sum of the unit tangents of the adjacent
    /// segments (the bisector direction). End nodes of open curves use their
    /// single segment.
    pub fn node_tangents(&self) -> Vec<Vec3> {
        let t = self.segment_tangents();
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let prev = if i > 0 {
                    Some(t[i - 1])
                } else if self.closed {
                    Some(t[n - 1])
                } else {
                    None
                };
                let next = if i < t.len() { Some(t[i]) } else { None };
                let s = match (prev, next) {
                    (Some(p), Some(q)) => p + q,
                    (Some(p), None) => p,
                    (None, Some(q)) => q,
                    (None, None) => unreachable!("curve has at least one segment"),
                };
                // a hairpin leaves no bisector; fall back to the outgoing segment
                s.normalized().unwrap_or_else(|| next.or(prev).unwrap())
            })
            .collect()
    }

    fn integrate(&self, mut integrand: impl FnMut(&Vec3, &Vec3) -> f64) -> f64 {
        let (x, w) = gauss_legendre(PAIR_ORDER);
        let mut sum = 0.0;
        for (a, b) in self.segments() {
            let d = b - a;
            let len = d.norm();
            let tau = d * (1.0 / len);
            let mut seg = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let p = a + d * (0.5 * (1.0 + xi));
                seg += wi * integrand(&p, &tau);
            }
            sum += 0.5 * len * seg;
        }
        sum
    }
}

/// `⟨ρ_ℓ, φ⟩ = |b| ∫_ℓ τ·φ ds`.
pub fn pair_vector(c: &DislocationCurve, phi: &dyn VectorTestFunction) -> f64 {
    c.burgers.norm() * c.integrate(|x, tau| tau.dot(&phi.eval(x)))
}

/// `⟨b̂⊗ρ_ℓ, φ̃⟩ = ∫_ℓ (b⊗τ):φ̃ ds`.
pub fn pair_tensor(c: &DislocationCurve, phit: &dyn TensorTestFunction) -> f64 {
    let b = c.burgers;
    c.integrate(|x, tau| b.dot(&phit.eval(x).mul_vec(tau)))
}

/// The same pairing written as `⟨|ρ|, (b̂⊗τ):φ̃⟩`.
pub fn pair_tensor_via_density(c: &DislocationCurve, phit: &dyn TensorTestFunction) -> f64 {
    let b = c.burgers;
    let bn = b.norm();
    let b_hat = b * (1.0 / bn);
    bn * c.integrate(|x, tau| crate::tensor::contract(&crate::tensor::outer(&b_hat, tau), &phit.eval(x)))
}
