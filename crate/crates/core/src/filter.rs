//! Asymmetric baseband bandpass filter.
//!
//! In the passband the filter is a single resonance placed at the upper band
//! edge, `G(f) = 1 / (j(2f/B - 1) + sigma)`, so a carrier tone at `+B/2` is
//! lifted by `1/sigma^2` relative to an ideal brick-wall response. The
//! stopband is ideal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Bandwidth and dissipation (inverse Q-factor) of the receive filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    bandwidth_hz: f64,
    dissipation: f64,
}

impl FilterSpec {
    pub fn new(bandwidth_hz: f64, dissipation: f64) -> Result<Self> {
        if !(bandwidth_hz.is_finite() && bandwidth_hz > 0.0) {
            return Err(Error::InvalidParameter {
                name: "bandwidth",
                reason: format!("must be positive and finite, got {bandwidth_hz}"),
            });
        }
        if !(dissipation.is_finite() && dissipation > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("must be positive and finite, got {dissipation}"),
            });
        }
        Ok(Self {
            bandwidth_hz,
            dissipation,
        })
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn dissipation(&self) -> f64 {
        self.dissipation
    }

    /// Complex gain at baseband frequency `f`.
    pub fn transfer(&self, f: f64) -> Complex64 {
        baseband_transfer(f, self)
    }

    /// `|G(f)|^2`.
    pub fn magnitude_sq(&self, f: f64) -> f64 {
        if f.abs() > 0.5 * self.bandwidth_hz {
            return 0.0;
        }
        let x = 2.0 * f / self.bandwidth_hz - 1.0;
        1.0 / (x * x + self.dissipation * self.dissipation)
    }
}

pub fn baseband_transfer(f: f64, spec: &FilterSpec) -> Complex64 {
    if f.abs() > 0.5 * spec.bandwidth_hz {
        return Complex64::new(0.0, 0.0);
    }
    let x = 2.0 * f / spec.bandwidth_hz - 1.0;
    Complex64::new(spec.dissipation, x).inv()
}

/// Arctangent mapped onto `[0, pi]`.
pub fn arctan_pi(t: f64) -> f64 {
    let a = t.atan();
    if a >= 0.0 {
        a
    } else {
        a + PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMethod {
    ClosedForm,
    Quadrature,
}

/// Smallest `|f| / B` at which the closed form is evaluated. Below this the
/// `0/0` limit of the logarithmic term makes quadrature the reference.
pub const CLOSED_FORM_MIN_REL_FREQ: f64 = 1e-6;

const QUADRATURE_REL_TOL: f64 = 1e-9;

/// Autocorrelation of `|G|^2`: `∫ |G(f')|^2 |G(f' - f)|^2 df'` (Hz).
pub fn g2_self_convolution(f: f64, spec: &FilterSpec, method: ConvolutionMethod) -> Result<f64> {
    match method {
        ConvolutionMethod::ClosedForm => g2_convolution_closed_form(f, spec),
        ConvolutionMethod::Quadrature => g2_convolution_quadrature(f, spec),
    }
}

fn g2_convolution_closed_form(f: f64, spec: &FilterSpec) -> Result<f64> {
    let b = spec.bandwidth_hz;
    let fa = f.abs();
    if !(fa <= b) || fa < CLOSED_FORM_MIN_REL_FREQ * b {
        return Err(Error::FrequencyOutOfRange {
            f,
            range: format!("{:e} <= |f| <= {b:e}", CLOSED_FORM_MIN_REL_FREQ * b),
        });
    }
    let s = spec.dissipation;
    let s2 = s * s;
    let fb = 2.0 * fa / b;
    let shared = 4.0 * s2 + fb * fb;

    let ratio = 2.0 * (2.0 - fb) * (s2 + fb) / (s * (s2 - 4.0 + fb * (6.0 - fb)));
    let angle_term = b * arctan_pi(ratio) / (2.0 * s * shared);

    // ln(num/den) as ln_1p of the relative excess keeps precision for small f̄.
    let num = s2 * (4.0 + s2);
    let den = (s2 + (fb - 2.0) * (fb - 2.0)) * (s2 + fb * fb);
    let log_term = b * ((num - den) / den).ln_1p() / (2.0 * fb * shared);

    Ok(angle_term + log_term)
}

fn g2_convolution_quadrature(f: f64, spec: &FilterSpec) -> Result<f64> {
    let b = spec.bandwidth_hz;
    let s2 = spec.dissipation * spec.dissipation;
    // u = 2f'/B - 1 maps the passband onto [-2, 0]; the shifted factor sits at u - d.
    let d = 2.0 * f / b;
    let lo = (-2.0f64).max(-2.0 + d);
    let hi = 0.0f64.min(d);
    if lo >= hi {
        return Ok(0.0);
    }
    let integrand = |u: f64| {
        let v = u - d;
        1.0 / ((u * u + s2) * (v * v + s2))
    };
    let breaks = [0.5 * (lo + hi)];
    let r = integrate(integrand, lo, hi, &breaks, QuadOptions::relative(QUADRATURE_REL_TOL))?;
    Ok(0.5 * b * r.value)
}

/// Element values of the two-branch ladder realization.
///
/// A series `R-L-C` branch sits in the signal path and a parallel tank
/// (`L1` with series loss `R1`, shunted by `C1`) loads the output, so the
/// transfer is the voltage divider `Z_tank / (Z_series + Z_tank)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlcParams {
    pub r: f64,
    pub l: f64,
    pub c: f64,
    pub r1: f64,
    pub l1: f64,
    pub c1: f64,
    pub center_frequency_hz: f64,
}

impl RlcParams {
    /// Builds element values from the design ratios: series-branch
    /// dissipation `R·sqrt(C/L)`, tank quality `sqrt(L1/C1)/R1`, series
    /// resonance at `f0 - B/2` and tank resonance at `f0 + B/2`.
    pub fn from_ratios(
        bandwidth_hz: f64,
        center_frequency_hz: f64,
        series_dissipation: f64,
        tank_quality: f64,
        r: f64,
        r1: f64,
    ) -> Result<Self> {
        let f_series = center_frequency_hz - 0.5 * bandwidth_hz;
        let f_tank = center_frequency_hz + 0.5 * bandwidth_hz;
        for (name, v) in [
            ("bandwidth", bandwidth_hz),
            ("series resonance", f_series),
            ("series_dissipation", series_dissipation),
            ("tank_quality", tank_quality),
            ("r", r),
            ("r1", r1),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "rlc",
                    reason: format!("{name} must be positive, got {v}"),
                });
            }
        }
        let z_series = r / series_dissipation;
        let z_tank = tank_quality * r1;
        let w_s = 2.0 * PI * f_series;
        let w_t = 2.0 * PI * f_tank;
        let params = Self {
            r,
            l: z_series / w_s,
            c: 1.0 / (z_series * w_s),
            r1,
            l1: z_tank / w_t,
            c1: 1.0 / (z_tank * w_t),
            center_frequency_hz,
        };
        params.validate()?;
        Ok(params)
    }

    /// Realization whose normalized response tracks the ideal filter with
    /// `sigma = 4 / 80 = 0.05`: series dissipation 4, tank Q 80, centre at
    /// three bandwidths.
    pub fn reference(bandwidth_hz: f64) -> Result<Self> {
        Self::from_ratios(bandwidth_hz, 3.0 * bandwidth_hz, 4.0, 80.0, 2.6e4, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.r, self.l, self.c, self.r1, self.l1, self.c1, self.center_frequency_hz];
        if all.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "rlc",
                reason: "all element values must be positive".into(),
            })
        }
    }

    pub fn series_resonance_hz(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l * self.c).sqrt())
    }

    pub fn tank_resonance_hz(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l1 * self.c1).sqrt())
    }
}

/// `|H|^2` of the ladder at baseband offset `f` from the centre frequency.
pub fn rlc_ladder_response(params: &RlcParams, f: f64) -> f64 {
    let w = 2.0 * PI * (params.center_frequency_hz + f);
    let j = Complex64::i();
    let z_series = params.r + j * w * params.l + (j * w * params.c).inv();
    let z_tank = ((params.r1 + j * w * params.l1).inv() + j * w * params.c1).inv();
    (z_tank / (z_series + z_tank)).norm_sqr()
}
