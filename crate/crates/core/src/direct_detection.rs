//! Achievable rate of a direct-detection array fed by a wirelessly
//! broadcast carrier tone.
//!
//! Each antenna squares `G * (x + x_LO + z)`. The carrier lands at `+B/2`
//! where the asymmetric filter peaks, so the useful beat `x · x_LO*` is
//! amplified relative to the signal-by-signal distortion `|x + z|^2`.
//! Combining with `h^H` (`||h||^2 = N`) adds the data coherently while noise
//! and distortion add incoherently.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{g2_self_convolution, ConvolutionMethod, FilterSpec, CLOSED_FORM_MIN_REL_FREQ};
use crate::quadrature::{integrate, QuadOptions};

/// Lower integration limit as a fraction of `B`; the DC line of `|y|^2`
/// is removed by the receiver.
pub const DC_CUTOFF_REL: f64 = 1e-6;

/// Relative tolerance of the rate integral.
pub const RATE_REL_TOL: f64 = 1e-8;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_linear(dbm)
}

/// Fraction of the radiated carrier power captured by each antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoCapture {
    Fixed(f64),
    /// Free-space scaling `epsilon = N^-2`.
    InverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectDetectionScenario {
    pub num_antennas: usize,
    /// Received information power per antenna (W).
    pub signal_power_w: f64,
    /// Noise density after the noise figure (W/Hz).
    pub noise_density_w_per_hz: f64,
    pub lo_power_w: f64,
    pub lo_capture: LoCapture,
    pub filter: FilterSpec,
}

impl DirectDetectionScenario {
    pub fn new(
        num_antennas: usize,
        signal_power_w: f64,
        noise_density_w_per_hz: f64,
        lo_power_w: f64,
        lo_capture: LoCapture,
        filter: FilterSpec,
    ) -> Result<Self> {
        let sc = Self {
            num_antennas,
            signal_power_w,
            noise_density_w_per_hz,
            lo_power_w,
            lo_capture,
            filter,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Sweep defaults: sigma = 0.05, rho/(B N0) = 0 dB, B = 1 GHz,
    /// P_LO = 1 uW, N0 = -174.2 dBm/Hz with a 3 dB noise figure and
    /// `epsilon = N^-2`.
    pub fn reference(num_antennas: usize) -> Result<Self> {
        let bandwidth = 1e9;
        let n0 = dbm_to_watts(-174.2) * db_to_linear(3.0);
        Self::new(
            num_antennas,
            bandwidth * n0,
            n0,
            1e-6,
            LoCapture::InverseSquare,
            FilterSpec::new(bandwidth, 0.05)?,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                })
            }
        };
        if self.num_antennas == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "need at least one antenna".into(),
            });
        }
        positive("rho", self.signal_power_w)?;
        positive("n0", self.noise_density_w_per_hz)?;
        positive("p_lo", self.lo_power_w)?;
        let eps = self.epsilon();
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("LO capture fraction must lie in (0, 1), got {eps}"),
            });
        }
        Ok(())
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.filter.bandwidth_hz()
    }

    pub fn epsilon(&self) -> f64 {
        match self.lo_capture {
            LoCapture::Fixed(e) => e,
            LoCapture::InverseSquare => (self.num_antennas as f64).powi(-2),
        }
    }

    /// `rho / (B N0)`.
    pub fn snr(&self) -> f64 {
        self.signal_power_w / (self.bandwidth_hz() * self.noise_density_w_per_hz)
    }

    pub fn with_antennas(&self, num_antennas: usize) -> Self {
        Self {
            num_antennas,
            ..*self
        }
    }
}

/// PSD of one filtered antenna signal: a continuous density plus the
/// carrier line at `+B/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdSample {
    pub density_w_per_hz: f64,
    /// Power of the Dirac component located exactly at this frequency.
    pub tone_w: Option<f64>,
}

pub fn received_psd(f: f64, sc: &DirectDetectionScenario) -> PsdSample {
    let b = sc.bandwidth_hz();
    let g2 = sc.filter.magnitude_sq(f);
    if g2 == 0.0 {
        return PsdSample {
            density_w_per_hz: 0.0,
            tone_w: None,
        };
    }
    let density = g2 * (sc.signal_power_w / b + sc.noise_density_w_per_hz);
    let tone = (f == 0.5 * b).then(|| sc.epsilon() * sc.lo_power_w * g2);
    PsdSample {
        density_w_per_hz: density,
        tone_w: tone,
    }
}

/// Spectral efficiency density `C_eps(f)` in bit/s/Hz for `f` in `(0, B]`.
pub fn spectral_efficiency_density(f: f64, sc: &DirectDetectionScenario) -> Result<f64> {
    let b = sc.bandwidth_hz();
    if !(f > 0.0 && f <= b) {
        return Err(Error::FrequencyOutOfRange {
            f,
            range: format!("0 < f <= {b:e}"),
        });
    }
    let method = if f >= CLOSED_FORM_MIN_REL_FREQ * b {
        ConvolutionMethod::ClosedForm
    } else {
        ConvolutionMethod::Quadrature
    };
    let conv = g2_self_convolution(f, &sc.filter, method)?;
    Ok(efficiency_from_convolution(f, conv, sc))
}

fn efficiency_from_convolution(f: f64, conv: f64, sc: &DirectDetectionScenario) -> f64 {
    let b = sc.bandwidth_hz();
    let s2 = sc.filter.dissipation().powi(2);
    let n0 = sc.noise_density_w_per_hz;
    let rho_b = sc.signal_power_w / b;
    // |G(B/2 - |f|)|^2
    let edge_gain = 1.0 / (4.0 * f * f / (b * b) + s2);
    let distortion =
        s2 * conv / (sc.epsilon() * sc.lo_power_w * edge_gain) * (n0 + rho_b) * (n0 + rho_b);
    let sinr = sc.num_antennas as f64 * rho_b / (n0 + distortion);
    sinr.ln_1p() / std::f64::consts::LN_2
}

/// Rate lower bound `∫ C_eps(f) df` over `(B·1e-6, B]`, in bit/s.
pub fn achievable_rate_dd(sc: &DirectDetectionScenario) -> Result<f64> {
    sc.validate()?;
    let b = sc.bandwidth_hz();
    let sigma = sc.filter.dissipation();
    let f_min = DC_CUTOFF_REL * b;
    // The integrand changes on the scale sigma·B near DC.
    let breaks: Vec<f64> = [0.01, 0.1, 1.0, 10.0]
        .iter()
        .map(|k| k * sigma * b)
        .chain([0.5 * b])
        .collect();
    let integrand = |f: f64| {
        spectral_efficiency_density(f, sc).unwrap_or(f64::NAN)
    };
    let opts = QuadOptions {
        rel_tol: RATE_REL_TOL,
        abs_tol: 0.0,
        max_intervals: 4000,
    };
    let r = integrate(integrand, f_min, b, &breaks, opts)?;
    if !r.value.is_finite() {
        return Err(Error::IntegrationFailed {
            estimate: r.value,
            error_estimate: r.error_estimate,
            tolerance: RATE_REL_TOL,
            intervals: r.intervals,
        });
    }
    Ok(r.value)
}

/// Ideal coherent-receiver limit `B log2(1 + N rho / (B N0))`.
pub fn upper_bound_rate(sc: &DirectDetectionScenario) -> f64 {
    sc.bandwidth_hz() * (sc.num_antennas as f64 * sc.snr()).log2_1p()
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub num_antennas: usize,
    pub rate_bps: f64,
    pub upper_bound_bps: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateCurve {
    pub points: Vec<RatePoint>,
}

impl RateCurve {
    pub fn argmax(&self) -> Option<&RatePoint> {
        self.points
            .iter()
            .max_by(|a, b| a.rate_bps.total_cmp(&b.rate_bps))
    }

    /// Nondecreasing up to the maximum and nonincreasing after it.
    pub fn is_unimodal(&self) -> bool {
        let Some(peak) = self
            .points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.rate_bps.total_cmp(&b.1.rate_bps))
            .map(|(i, _)| i)
        else {
            return true;
        };
        let rates: Vec<f64> = self.points.iter().map(|p| p.rate_bps).collect();
        rates[..=peak].windows(2).all(|w| w[0] <= w[1])
            && rates[peak..].windows(2).all(|w| w[0] >= w[1])
    }

    pub fn respects_upper_bound(&self) -> bool {
        self.points.iter().all(|p| p.rate_bps <= p.upper_bound_bps)
    }
}

fn check_sweep_inputs(template: &DirectDetectionScenario, n_list: &[usize]) -> Result<()> {
    if template.lo_capture != LoCapture::InverseSquare {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: "antenna sweeps require the N^-2 capture rule".into(),
        });
    }
    if n_list.is_empty() {
        return Err(Error::InvalidParameter {
            name: "n_list",
            reason: "empty antenna list".into(),
        });
    }
    if !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter {
            name: "n_list",
            reason: "antenna counts must be strictly increasing".into(),
        });
    }
    Ok(())
}

/// Evaluates each antenna count independently; failed points keep their
/// error so callers can report them and continue.
pub fn sweep_points(
    template: &DirectDetectionScenario,
    n_list: &[usize],
) -> Result<Vec<(usize, Result<RatePoint>)>> {
    check_sweep_inputs(template, n_list)?;
    Ok(n_list
        .par_iter()
        .map(|&n| {
            let sc = template.with_antennas(n);
            let point = achievable_rate_dd(&sc).map(|rate| RatePoint {
                num_antennas: n,
                rate_bps: rate,
                upper_bound_bps: upper_bound_rate(&sc),
            });
            (n, point)
        })
        .collect())
}

pub fn rate_vs_antennas_sweep(
    template: &DirectDetectionScenario,
    n_list: &[usize],
) -> Result<RateCurve> {
    let points = sweep_points(template, n_list)?
        .into_iter()
        .map(|(n, p)| {
            p.map_err(|e| Error::SweepPoint {
                n,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve { points })
}

/// `count` log-spaced integers from `lo` to `hi`, deduplicated.
pub fn log_spaced_antennas(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if count <= 1 || lo >= hi {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    out.dedup();
    out
}
