//! Gauge freedom of the pair `(u, h_p)`: adding `b̂Γ` to `u` and `∇Γ` to
//! `h_p` leaves the stress unchanged.

use crate::error::{Error, Result};
use crate::spectral::Spectral;
use crate::tensor::Vec3;

use super::PlasticDistortionField;

/// Returns `(u + b̂Γ, h_p + ∇Γ)`, with `∇` the spectral gradient.
pub fn gauge_transform(
    spectral: &Spectral,
    displacement: &[Vec3],
    hp: &PlasticDistortionField,
    gamma: &[f64],
) -> Result<(Vec<Vec3>, PlasticDistortionField)> {
    let n = spectral.cell().node_count();
    if displacement.len() != n || hp.hp.len() != n || gamma.len() != n {
        return Err(Error::invalid("gauge transform fields must match the cell"));
    }
    let grad = spectral.gradient(gamma);
    let u = displacement
        .iter()
        .zip(gamma)
        .map(|(u, &g)| *u + hp.b_hat * g)
        .collect();
    let mut out = hp.clone();
    for (h, g) in out.hp.iter_mut().zip(&grad) {
        *h += *g;
    }
    Ok((u, out))
}
