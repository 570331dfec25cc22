//! Two-level atom decaying into a Lorentzian cavity reservoir (strong coupling).
//!
//! The channel is implemented entry-by-entry exactly as the source model writes
//! it: the population of |1⟩ is the one multiplied by `P(t)`, and it is moved
//! to the (0,0) entry, so at `P = 1` the map is conjugation by X rather than
//! the identity. Its Pauli images are X ↦ √P·X, Y ↦ −√P·Y, Z ↦ −P·Z,
//! I ↦ I + (P − 1)·Z.

use serde::Serialize;

use super::Channel;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    /// Coupling rate γ₀ (1/time).
    pub gamma0: f64,
    /// Spectral width λ (1/time).
    pub lambda: f64,
}

impl CavityParams {
    /// Requires γ₀ > 0, λ > 0 and the strong-coupling condition 2γ₀ > λ.
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma0 > 0.0) {
            return Err(Error::Range {
                name: "gamma0",
                value: gamma0,
                range: "(0, inf)",
            });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Range {
                name: "lambda",
                value: lambda,
                range: "(0, inf)",
            });
        }
        if 2.0 * gamma0 <= lambda {
            return Err(Error::Range {
                name: "lambda",
                value: lambda,
                range: "lambda < 2 * gamma0 (strong coupling)",
            });
        }
        Ok(Self { gamma0, lambda })
    }

    /// D = √(2γ₀λ − λ²).
    pub fn d(&self) -> f64 {
        (2.0 * self.gamma0 * self.lambda - self.lambda * self.lambda).sqrt()
    }
}

/// P(t) = e^{−λt} [cos(tD/2) + (λ/D) sin(tD/2)]².
pub fn decay_probability(t: f64, p: &CavityParams) -> f64 {
    let d = p.d();
    let half = t * d / 2.0;
    let amp = half.cos() + p.lambda / d * half.sin();
    (-p.lambda * t).exp() * amp * amp
}

pub fn cavity_channel(t: f64, p: &CavityParams) -> Result<Channel> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Range {
            name: "t",
            value: t,
            range: "[0, inf)",
        });
    }
    let prob = decay_probability(t, p);
    let coherence = prob.sqrt();
    Channel::from_action(2, 2, |rho| {
        let mut out = ComplexMatrix::zeros(2, 2);
        out.set(0, 0, rho.get(1, 1) * prob);
        out.set(0, 1, rho.get(1, 0) * coherence);
        out.set(1, 0, rho.get(0, 1) * coherence);
        out.set(1, 1, rho.get(0, 0) + rho.get(1, 1) * C64::new(1.0 - prob, 0.0));
        out
    })
}

/// Zeros t_n = (2/D)[nπ − arctan(D/λ)] of P, for n = 1..=n_max.
pub fn invertibility_zeros(p: &CavityParams, n_max: usize) -> Vec<f64> {
    let d = p.d();
    let offset = (d / p.lambda).atan();
    (1..=n_max)
        .map(|n| 2.0 / d * (n as f64 * std::f64::consts::PI - offset))
        .collect()
}
