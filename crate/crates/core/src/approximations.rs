//! Large-array closed forms for the one-bit SINDR.
//!
//! These treat `diag(C_y)` as `(1 + K rho) I` and ignore inter-user
//! interference, so they are only meaningful for `N >> K`. The exact
//! analysis in [`crate::bussgang`] is the reference otherwise.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::bussgang::SindrReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxInputs {
    pub num_antennas: f64,
    pub num_users: f64,
    /// Per-stream, per-antenna SNR.
    pub rho: f64,
}

impl ApproxInputs {
    pub fn new(num_antennas: usize, num_users: usize, rho: f64) -> Result<Self> {
        if num_antennas == 0 || num_users == 0 {
            return Err(Error::InvalidParameter {
                name: "n/k",
                reason: "antenna and user counts must be at least one".into(),
            });
        }
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("must be positive and finite, got {rho}"),
            });
        }
        Ok(Self {
            num_antennas: num_antennas as f64,
            num_users: num_users as f64,
            rho,
        })
    }

    fn load(&self) -> f64 {
        self.num_users * self.rho
    }
}

/// `pi/2 - K rho / (1 + K rho)`, the normalized effective noise level.
pub fn distortion_factor(k: f64, rho: f64) -> f64 {
    let kr = k * rho;
    FRAC_PI_2 - kr / (1.0 + kr)
}

/// Leading factor in the form used by the first-order result,
/// `pi/2 + (pi/2 - 1) K rho`.
pub fn first_order_denominator(k: f64, rho: f64) -> f64 {
    FRAC_PI_2 + (FRAC_PI_2 - 1.0) * k * rho
}

/// Leading factor in the form used by the third-order result,
/// `(1 + K rho)(pi/2 - K rho/(1 + K rho))`.
pub fn third_order_denominator(k: f64, rho: f64) -> f64 {
    (1.0 + k * rho) * distortion_factor(k, rho)
}

/// Uncorrelated-distortion SINDR `N rho / (pi/2 + (pi/2 - 1) K rho)`.
pub fn first_order_sindr(inputs: &ApproxInputs) -> f64 {
    inputs.num_antennas * inputs.rho / first_order_denominator(inputs.num_users, inputs.rho)
}

/// SINDR including the coherently combining third-order distortion.
pub fn third_order_sindr(inputs: &ApproxInputs) -> f64 {
    let ApproxInputs {
        num_antennas: n,
        num_users: k,
        rho,
    } = *inputs;
    let kr = inputs.load();
    let a = distortion_factor(k, rho);
    let inv_snr_cubed = ((1.0 + kr) / rho).powi(3);
    let incoherent = 6.0 * a * inv_snr_cubed;
    // 1 - 1.5NK / (incoherent + 1.5NK), written without the cancellation.
    let correction = incoherent / (incoherent + 1.5 * n * k);
    n * (rho / (1.0 + kr)) / a * correction
}

/// Large-`N` ceiling `(4/K) ((1 + K rho) / rho)^2`.
pub fn saturation_limit(num_users: usize, rho: f64) -> f64 {
    let k = num_users as f64;
    4.0 / k * ((1.0 + k * rho) / rho).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Sindr(f64),
    /// Bits per channel use, converted via `gamma = 2^R - 1`.
    Rate(f64),
}

impl Target {
    pub fn gamma(self) -> f64 {
        match self {
            Target::Sindr(g) => g,
            Target::Rate(r) => r.exp2() - 1.0,
        }
    }
}

/// Antenna count `(pi/4) sqrt(K gamma^3)` that the array must greatly
/// exceed for linear processing to stay near-optimal.
pub fn linear_dsp_threshold(num_users: usize, target: Target) -> f64 {
    let g = target.gamma();
    FRAC_PI_4 * (num_users as f64 * g * g * g).sqrt()
}

/// Multiplier turning the threshold into a recommended array size.
pub const RECOMMENDED_MARGIN: f64 = 10.0;

/// Writes the approximations into every user row of `report`.
pub fn annotate(report: &mut SindrReport) -> Result<()> {
    let inputs = ApproxInputs::new(report.num_antennas, report.num_users, report.rho)?;
    let first = first_order_sindr(&inputs);
    let third = third_order_sindr(&inputs);
    let sat = saturation_limit(report.num_users, report.rho);
    for u in &mut report.users {
        u.first_order = Some(first);
        u.third_order = Some(third);
        u.saturation = Some(sat);
    }
    Ok(())
}
