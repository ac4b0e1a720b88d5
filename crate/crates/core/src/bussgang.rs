//! Exact Bussgang analysis of the one-bit quantized uplink.
//!
//! With `y = Hx + z`, `x ~ CN(0, rho I)` and `z ~ CN(0, I)`, the quantized
//! output `r = (sign(Re y) + j sign(Im y)) / sqrt(2)` decomposes as
//! `r = H' x + z'`, where `H' = sqrt(2/pi) diag(C_y)^{-1/2} H` and the
//! effective noise `z'` is uncorrelated with `x`. Its covariance follows from
//! the arcsine law.

use std::f64::consts::{FRAC_2_PI, PI};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::sampling::complex_normal;

/// Tolerance on `|Re|`, `|Im|` of a normalized correlation before it is
/// treated as invalid rather than rounding noise.
const CORRELATION_SLACK: f64 = 1e-12;

/// Condition estimate above which the solve is regularized.
const MAX_CONDITION: f64 = 1e12;

/// User channels as an `N x K` matrix, one column per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix(DMatrix<Complex64>);

impl ChannelMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidParameter {
                name: "channel",
                reason: "need at least one antenna and one user".into(),
            });
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "channel",
                reason: "non-finite entry".into(),
            });
        }
        Ok(Self(entries))
    }

    /// i.i.d. `CN(0, 1)` entries.
    pub fn iid_rayleigh<R: RngCore + ?Sized>(
        num_antennas: usize,
        num_users: usize,
        rng: &mut R,
    ) -> Result<Self> {
        // Column-major fill, so column k is the k-th consecutive block of draws.
        let mut entries = DMatrix::zeros(num_antennas, num_users);
        for z in entries.iter_mut() {
            *z = complex_normal(rng, 1.0);
        }
        Self::new(entries)
    }

    /// Scales each column to `||h_k||^2 = N`.
    pub fn with_unit_average_gain(mut self) -> Self {
        let n = self.num_antennas() as f64;
        for mut col in self.0.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col *= Complex64::from(n.sqrt() / norm);
            }
        }
        self
    }

    pub fn num_antennas(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.0.ncols()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// First `rows` antennas of the array.
    pub fn truncated(&self, rows: usize) -> Result<Self> {
        Self::new(self.0.rows(0, rows.min(self.num_antennas())).into_owned())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimoScenario {
    pub channel: ChannelMatrix,
    /// Per-user transmit SNR (noise variance is one).
    pub rho: f64,
}

impl MimoScenario {
    pub fn new(channel: ChannelMatrix, rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("must be positive and finite, got {rho}"),
            });
        }
        Ok(Self { channel, rho })
    }

    /// `C_y = rho H H^H + I`.
    pub fn input_covariance(&self) -> DMatrix<Complex64> {
        let h = self.channel.entries();
        let n = h.nrows();
        let mut cy = h * h.adjoint() * Complex64::from(self.rho);
        for i in 0..n {
            cy[(i, i)] += Complex64::from(1.0);
        }
        hermitize(&mut cy);
        cy
    }
}

/// Bussgang decomposition of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct BussgangModel {
    pub input_cov: DMatrix<Complex64>,
    pub effective_channel: DMatrix<Complex64>,
    pub output_cov: DMatrix<Complex64>,
    pub effective_noise_cov: DMatrix<Complex64>,
    /// `sqrt(2/pi) / sqrt([C_y]_ii)` for each antenna.
    pub gain_diag: DVector<f64>,
}

fn hermitize(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

fn hermitian_asymmetry(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn clamp_unit(value: f64, row: usize, col: usize) -> Result<f64> {
    if value.abs() > 1.0 + CORRELATION_SLACK || value.is_nan() {
        return Err(Error::CorrelationOutOfRange { row, col, value });
    }
    Ok(value.clamp(-1.0, 1.0))
}

/// Output covariance of a one-bit quantizer driven by `CN(0, C_y)`:
/// `(2/pi) [asin(Re c~_ij) + j asin(Im c~_ij)]` with `c~` the normalized
/// correlation.
pub fn arcsine_cov(input_cov: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = input_cov.nrows();
    if input_cov.ncols() != n {
        return Err(Error::InvalidParameter {
            name: "covariance",
            reason: "matrix must be square".into(),
        });
    }
    let scale = input_cov.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let asym = hermitian_asymmetry(input_cov);
    if asym > 1e-10 * scale {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let mut inv_sd = Vec::with_capacity(n);
    for i in 0..n {
        let d = input_cov[(i, i)].re;
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "covariance",
                reason: format!("diagonal entry {i} is {d}, must be positive"),
            });
        }
        inv_sd.push(d.sqrt().recip());
    }
    let mut out = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        out[(i, i)] = Complex64::new(1.0, 0.0);
        for j in (i + 1)..n {
            let c = input_cov[(i, j)] * (inv_sd[i] * inv_sd[j]);
            let re = clamp_unit(c.re, i, j)?;
            let im = clamp_unit(c.im, i, j)?;
            let v = Complex64::new(re.asin(), im.asin()) * FRAC_2_PI;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    Ok(out)
}

pub fn build_bussgang_model(sc: &MimoScenario) -> Result<BussgangModel> {
    let input_cov = sc.input_covariance();
    let output_cov = arcsine_cov(&input_cov)?;
    let n = input_cov.nrows();
    let gain_diag = DVector::from_fn(n, |i, _| (FRAC_2_PI / input_cov[(i, i)].re).sqrt());

    let mut effective_channel = sc.channel.entries().clone();
    for (i, mut row) in effective_channel.row_iter_mut().enumerate() {
        row *= Complex64::from(gain_diag[i]);
    }
    let mut effective_noise_cov =
        &output_cov - &effective_channel * effective_channel.adjoint() * Complex64::from(sc.rho);
    hermitize(&mut effective_noise_cov);

    Ok(BussgangModel {
        input_cov,
        effective_channel,
        output_cov,
        effective_noise_cov,
        gain_diag,
    })
}

/// Hermitian positive-definite solve with one diagonal-jitter retry.
fn hermitian_factor(m: &DMatrix<Complex64>) -> Result<Cholesky<Complex64, Dyn>> {
    let factor_ok = |m: DMatrix<Complex64>| {
        Cholesky::new(m).filter(|c| {
            let diag = c.l_dirty().diagonal();
            let (lo, hi) = diag
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.re), hi.max(d.re)));
            lo > 0.0 && (hi / lo).powi(2) <= MAX_CONDITION
        })
    };
    if let Some(c) = factor_ok(m.clone()) {
        return Ok(c);
    }
    let n = m.nrows();
    let jitter = 1e-12 * m.trace().re / n as f64;
    let mut reg = m.clone();
    for i in 0..n {
        reg[(i, i)] += Complex64::from(jitter);
    }
    Cholesky::new(reg).ok_or(Error::SingularMatrix)
}

fn check_user(model: &BussgangModel, k: usize) -> Result<()> {
    if k >= model.effective_channel.ncols() {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!(
                "user index {k} out of range for {} users",
                model.effective_channel.ncols()
            ),
        });
    }
    Ok(())
}

/// Exact SINDR of user `k` under LMMSE combining:
/// `rho h'^H (C_r - rho h' h'^H)^{-1} h'`.
pub fn exact_sindr(model: &BussgangModel, rho: f64, k: usize) -> Result<f64> {
    check_user(model, k)?;
    let h = model.effective_channel.column(k).into_owned();
    let m = &model.output_cov - &h * h.adjoint() * Complex64::from(rho);
    let x = hermitian_factor(&m)?.solve(&h);
    Ok(rho * h.dotc(&x).re)
}

/// Same SINDR from the LMMSE error variance
/// `c = rho - rho^2 h'^H C_r^{-1} h'`, as `rho / c - 1`.
pub fn exact_sindr_from_mse(model: &BussgangModel, rho: f64, k: usize) -> Result<f64> {
    check_user(model, k)?;
    let factor = hermitian_factor(&model.output_cov)?;
    let h = model.effective_channel.column(k).into_owned();
    Ok(sindr_from_quadratic_form(rho, h.dotc(&factor.solve(&h)).re))
}

fn sindr_from_quadratic_form(rho: f64, quad: f64) -> f64 {
    let mse = rho - rho * rho * quad;
    rho / mse - 1.0
}

/// Exact SINDR for every user from a single factorization of `C_r`.
pub fn exact_sindr_all(model: &BussgangModel, rho: f64) -> Result<Vec<f64>> {
    let factor = hermitian_factor(&model.output_cov)?;
    let solved = factor.solve(&model.effective_channel);
    Ok((0..model.effective_channel.ncols())
        .map(|k| {
            let quad = model.effective_channel.column(k).dotc(&solved.column(k)).re;
            sindr_from_quadratic_form(rho, quad)
        })
        .collect())
}

/// Gaussian-input rate lower bound `log2(1 + gamma)` in bits per channel use.
pub fn rate_lower_bound(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

/// SINDR of one user plus the closed-form approximations, when filled in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSindr {
    pub user: usize,
    pub gamma_exact: f64,
    pub rate: f64,
    pub first_order: Option<f64>,
    pub third_order: Option<f64>,
    pub saturation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SindrReport {
    pub num_antennas: usize,
    pub num_users: usize,
    pub rho: f64,
    pub users: Vec<UserSindr>,
}

impl SindrReport {
    pub fn mean_gamma(&self) -> f64 {
        self.users.iter().map(|u| u.gamma_exact).sum::<f64>() / self.users.len() as f64
    }

    pub fn sum_rate(&self) -> f64 {
        self.users.iter().map(|u| u.rate).sum()
    }
}

pub fn sindr_report(sc: &MimoScenario) -> Result<SindrReport> {
    let model = build_bussgang_model(sc)?;
    let gammas = exact_sindr_all(&model, sc.rho)?;
    Ok(SindrReport {
        num_antennas: sc.channel.num_antennas(),
        num_users: sc.channel.num_users(),
        rho: sc.rho,
        users: gammas
            .into_iter()
            .enumerate()
            .map(|(user, g)| UserSindr {
                user,
                gamma_exact: g,
                rate: rate_lower_bound(g),
                first_order: None,
                third_order: None,
                saturation: None,
            })
            .collect(),
    })
}

/// SISO reference value `1 / (pi - 1)` for `h = 1`, `rho = 1`.
pub fn siso_unit_sindr() -> f64 {
    1.0 / (PI - 1.0)
}
