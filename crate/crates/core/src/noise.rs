//! Output noise spectral density and microwave-mode thermal occupancy.
//!
//! The output spectrum blends two bath occupancies through the resonator's
//! power reflection: `s_dev(ω) = R(ω)·n_ex + (1 − R(ω))·n_en + Δn_add`, and
//! the mode occupancy is the loss-rate-weighted average
//! `n_mode = (κ_m,in·n_en + κ_m,ex·n_ex)/κ_m`. `n_ex` pairs with the
//! external loss rate in the mode average and with `R(ω)` in the output
//! spectrum; `n_en` takes the complementary weights. The pairing follows the
//! equations this module implements; the `ex`/`en` suffixes are kept as
//! conventional labels rather than wiring hints.

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::transducer::MicrowaveModeParams;

/// Bath occupancies plus the light-induced output-line added noise, all in
/// photon-occupancy units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathOccupancies {
    n_ex: f64,
    n_en: f64,
    delta_n_out_add: f64,
}

impl BathOccupancies {
    pub fn new(n_ex: f64, n_en: f64, delta_n_out_add: f64) -> Result<Self> {
        for (name, v) in [
            ("n_ex", n_ex),
            ("n_en", n_en),
            ("delta_n_out_add", delta_n_out_add),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            n_ex,
            n_en,
            delta_n_out_add,
        })
    }

    pub fn n_ex(&self) -> f64 {
        self.n_ex
    }

    pub fn n_en(&self) -> f64 {
        self.n_en
    }

    pub fn delta_n_out_add(&self) -> f64 {
        self.delta_n_out_add
    }
}

/// Sampled output noise spectrum with the mode occupancy it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub grid: FrequencyGrid,
    pub s_dev: Vec<f64>,
    pub n_mode: f64,
}

/// Power reflection of the unpumped resonator at one frequency:
/// `R(ω) = |1 − κ_m,ex/(κ_m/2 − i(ω − ω_m))|²`.
pub fn reflection_at(mw: &MicrowaveModeParams, frequency_hz: f64) -> f64 {
    let detuning = frequency_hz - mw.frequency_hz();
    let half = 0.5 * mw.kappa_total_hz();
    let num = (half - mw.kappa_ex_hz()).powi(2) + detuning * detuning;
    let den = half * half + detuning * detuning;
    num / den
}

fn require_grid_spans_resonance(mw: &MicrowaveModeParams, grid: &FrequencyGrid) -> Result<()> {
    let offset = (grid.center_hz() - mw.frequency_hz()).abs();
    if offset > 0.5 * grid.span_hz() {
        return Err(Error::invalid(format!(
            "grid does not span the microwave resonance (offset {offset:.3e} Hz, \
             half-span {:.3e} Hz)",
            0.5 * grid.span_hz()
        )));
    }
    Ok(())
}

/// Power reflection spectrum over the grid. The grid must span ω_m.
pub fn reflection_spectrum(mw: &MicrowaveModeParams, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    require_grid_spans_resonance(mw, grid)?;
    Ok(grid
        .frequencies_hz()
        .into_iter()
        .map(|f| reflection_at(mw, f))
        .collect())
}

/// Loss-rate-weighted mode occupancy.
pub fn mode_occupancy(mw: &MicrowaveModeParams, baths: &BathOccupancies) -> f64 {
    (mw.kappa_in_hz() * baths.n_en + mw.kappa_ex_hz() * baths.n_ex) / mw.kappa_total_hz()
}

/// Output noise spectral density over the grid plus the implied mode
/// occupancy.
pub fn output_noise_spectrum(
    mw: &MicrowaveModeParams,
    baths: &BathOccupancies,
    grid: &FrequencyGrid,
) -> Result<NoiseSpectrum> {
    let reflection = reflection_spectrum(mw, grid)?;
    let s_dev = reflection
        .into_iter()
        .map(|r| r * baths.n_ex + (1.0 - r) * baths.n_en + baths.delta_n_out_add)
        .collect();
    Ok(NoiseSpectrum {
        grid: *grid,
        s_dev,
        n_mode: mode_occupancy(mw, baths),
    })
}

/// Invert the two-point system — `s_dev` on resonance (where `R = R(ω_m)`)
/// and far off resonance (where `R = 1`) — for the bath occupancies.
pub fn infer_baths(
    s_dev_on_resonance: f64,
    s_dev_off_resonance: f64,
    mw: &MicrowaveModeParams,
    delta_n_out_add: f64,
) -> Result<BathOccupancies> {
    let r0 = reflection_at(mw, mw.frequency_hz());
    if r0 >= 1.0 {
        return Err(Error::UninvertibleNoiseSystem);
    }
    let n_ex = s_dev_off_resonance - delta_n_out_add;
    if n_ex < 0.0 {
        return Err(Error::InfeasibleNoiseInput(format!(
            "off-resonance level {s_dev_off_resonance} lies below the added noise \
             {delta_n_out_add}, implying n_ex = {n_ex}"
        )));
    }
    let n_en = (s_dev_on_resonance - delta_n_out_add - r0 * n_ex) / (1.0 - r0);
    if n_en < 0.0 {
        return Err(Error::InfeasibleNoiseInput(format!(
            "two-point inversion gives negative n_en = {n_en}"
        )));
    }
    BathOccupancies::new(n_ex, n_en, delta_n_out_add)
}
