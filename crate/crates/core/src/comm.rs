//! Coherent information transfer over the link: QPSK constellation
//! measurements and local-oscillator interference fringes.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::solve3;

/// The four QPSK symbol phases, indexed 0..4.
pub const QPSK_PHASES: [f64; 4] = [0.0, FRAC_PI_2, 2.0 * FRAC_PI_2, 3.0 * FRAC_PI_2];

/// A QPSK measurement run: which symbol phases to send, how often, at what
/// field amplitude, with what per-quadrature Gaussian noise, under which
/// seed.
#[derive(Debug, Clone, PartialEq)]
pub struct QpskRun {
    symbol_phases: Vec<f64>,
    repeats_per_phase: usize,
    amplitude_in: f64,
    noise_sigma: f64,
    seed: u64,
}

impl QpskRun {
    pub fn new(
        symbol_phases: Vec<f64>,
        repeats_per_phase: usize,
        amplitude_in: f64,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        if symbol_phases.is_empty() {
            return Err(Error::invalid("symbol phase list must not be empty"));
        }
        for &p in &symbol_phases {
            if symbol_index(p).is_none() {
                return Err(Error::invalid(format!(
                    "symbol phase {p} is not one of 0, π/2, π, 3π/2"
                )));
            }
        }
        if repeats_per_phase == 0 {
            return Err(Error::invalid("repeats_per_phase must be at least 1"));
        }
        if amplitude_in.is_nan() || amplitude_in < 0.0 {
            return Err(Error::invalid("amplitude must be non-negative"));
        }
        if noise_sigma.is_nan() || noise_sigma < 0.0 {
            return Err(Error::invalid("noise sigma must be non-negative"));
        }
        Ok(Self {
            symbol_phases,
            repeats_per_phase,
            amplitude_in,
            noise_sigma,
            seed,
        })
    }

    /// All four symbols, in index order.
    pub fn all_symbols(
        repeats_per_phase: usize,
        amplitude_in: f64,
        noise_sigma: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::new(
            QPSK_PHASES.to_vec(),
            repeats_per_phase,
            amplitude_in,
            noise_sigma,
            seed,
        )
    }

    pub fn amplitude_in(&self) -> f64 {
        self.amplitude_in
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn symbol_index(phase: f64) -> Option<usize> {
    QPSK_PHASES.iter().position(|&p| (p - phase).abs() < 1e-9)
}

/// One received quadrature sample with the symbol it encoded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpskSample {
    pub symbol: usize,
    pub symbol_phase_rad: f64,
    pub i: f64,
    pub q: f64,
}

/// Per-quadrature effective noise sigma from the microwave mode occupancy:
/// `σ = √(scale·(n_mode + 1/2))` in occupancy units.
pub fn noise_sigma_from_occupancy(n_mode: f64, scale: f64) -> f64 {
    (scale * (n_mode + 0.5)).sqrt()
}

/// Simulate the received constellation: each sample is
/// `link_gain·amplitude·e^{iφ}` plus independent Gaussian noise of the run's
/// sigma on each quadrature. Deterministic for a given seed.
pub fn qpsk_constellation(link_gain: Complex64, run: &QpskRun) -> Vec<QpskSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut samples = Vec::with_capacity(run.symbol_phases.len() * run.repeats_per_phase);
    for &phase in &run.symbol_phases {
        let symbol = symbol_index(phase).expect("validated at construction");
        let ideal = link_gain * run.amplitude_in * Complex64::from_polar(1.0, phase);
        for _ in 0..run.repeats_per_phase {
            let (n_i, n_q) = gaussian_pair(&mut rng);
            samples.push(QpskSample {
                symbol,
                symbol_phase_rad: phase,
                i: ideal.re + run.noise_sigma * n_i,
                q: ideal.im + run.noise_sigma * n_q,
            });
        }
    }
    samples
}

/// Box–Muller transform over the ChaCha stream: one uniform pair in, one
/// standard-normal pair out.
fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Nearest-ideal-point decision against the constellation rotated and scaled
/// by `link_gain·amplitude_in`.
pub fn classify(i: f64, q: f64, link_gain: Complex64, amplitude_in: f64) -> usize {
    let received = Complex64::new(i, q);
    (0..4)
        .min_by(|&a, &b| {
            let da = (received - reference_point(link_gain, amplitude_in, a)).norm_sqr();
            let db = (received - reference_point(link_gain, amplitude_in, b)).norm_sqr();
            da.total_cmp(&db)
        })
        .unwrap()
}

fn reference_point(link_gain: Complex64, amplitude_in: f64, symbol: usize) -> Complex64 {
    link_gain * amplitude_in * Complex64::from_polar(1.0, QPSK_PHASES[symbol])
}

/// Count samples whose nearest-point decision differs from the sent symbol.
pub fn symbol_error_count(
    samples: &[QpskSample],
    link_gain: Complex64,
    amplitude_in: f64,
) -> usize {
    samples
        .iter()
        .filter(|s| classify(s.i, s.q, link_gain, amplitude_in) != s.symbol)
        .count()
}

/// Local-oscillator phase sweep against a fixed signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    lo_phases_rad: Vec<f64>,
    signal_amplitude: f64,
    lo_amplitude: f64,
}

impl FringeScan {
    pub fn new(lo_phases_rad: Vec<f64>, signal_amplitude: f64, lo_amplitude: f64) -> Result<Self> {
        if lo_phases_rad.is_empty() {
            return Err(Error::invalid("LO phase list must not be empty"));
        }
        if signal_amplitude.is_nan()
            || signal_amplitude < 0.0
            || lo_amplitude.is_nan()
            || lo_amplitude < 0.0
        {
            return Err(Error::invalid("amplitudes must be non-negative"));
        }
        Ok(Self {
            lo_phases_rad,
            signal_amplitude,
            lo_amplitude,
        })
    }

    /// `n` phases evenly spaced over [0, 2π).
    pub fn even(n: usize, signal_amplitude: f64, lo_amplitude: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one LO phase"));
        }
        let phases = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        Self::new(phases, signal_amplitude, lo_amplitude)
    }

    pub fn lo_phases_rad(&self) -> &[f64] {
        &self.lo_phases_rad
    }

    pub fn signal_amplitude(&self) -> f64 {
        self.signal_amplitude
    }

    pub fn lo_amplitude(&self) -> f64 {
        self.lo_amplitude
    }

    /// Fringe contrast `2AB/(A² + B²)`.
    pub fn visibility(&self) -> f64 {
        let (a, b) = (self.signal_amplitude, self.lo_amplitude);
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        2.0 * a * b / (a * a + b * b)
    }
}

/// Interference power at each LO phase:
/// `|A·e^{iφ_sig} + B·e^{iφ_LO}|² = A² + B² + 2AB·cos(φ_sig − φ_LO)`.
pub fn interference_fringe(scan: &FringeScan, signal_phase_rad: f64) -> Vec<(f64, f64)> {
    let (a, b) = (scan.signal_amplitude, scan.lo_amplitude);
    scan.lo_phases_rad
        .iter()
        .map(|&phi| {
            (
                phi,
                a * a + b * b + 2.0 * a * b * (signal_phase_rad - phi).cos(),
            )
        })
        .collect()
}

/// Least-squares sinusoid fit on the basis {1, cos φ, sin φ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineFit {
    pub offset: f64,
    pub amplitude: f64,
    /// Phase of the fitted cosine: `offset + amplitude·cos(φ − phase_rad)`.
    pub phase_rad: f64,
    pub rms_residual: f64,
}

/// Fit `power(φ) ≈ c₀ + c₁·cos φ + c₂·sin φ` to the samples. Needs at least
/// four samples with enough phase diversity to keep the normal equations
/// non-singular (more than half a period in practice).
pub fn fit_sine(samples: &[(f64, f64)]) -> Result<SineFit> {
    if samples.len() < 4 {
        return Err(Error::FitRankDeficient(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(phi, y) in samples {
        let basis = [1.0, phi.cos(), phi.sin()];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * y;
        }
    }
    let c = solve3(m, rhs).ok_or_else(|| {
        Error::FitRankDeficient("normal equations are singular; widen the phase span".into())
    })?;

    let amplitude = c[1].hypot(c[2]);
    let phase_rad = c[2].atan2(c[1]);
    let mut ss = 0.0;
    for &(phi, y) in samples {
        let fit = c[0] + c[1] * phi.cos() + c[2] * phi.sin();
        ss += (y - fit) * (y - fit);
    }
    Ok(SineFit {
        offset: c[0],
        amplitude,
        phase_rad,
        rms_residual: (ss / samples.len() as f64).sqrt(),
    })
}
