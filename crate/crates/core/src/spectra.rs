//! Four-port scattering spectra of a pumped transducer and the
//! peak/background efficiency calibration estimator.
//!
//! The line shapes come from the steady-state two-mode beam-splitter
//! input–output model. With `δ` the detuning from simultaneous two-mode
//! resonance and `D(δ) = (κ_m/2 − iδ)(κ₊/2 − i(δ − Δ)) + G²`:
//!
//! ```text
//! s_oe(δ) = s_eo(δ) = √(κ_m,ex·κ₊,ex)·G / D(δ)
//! s_ee(δ) = 1 − κ_m,ex·(κ₊/2 − i(δ − Δ)) / D(δ)
//! s_oo(δ) = 1 − κ₊,ex·(κ_m/2 − iδ) / D(δ)
//! ```
//!
//! `Δ` is the intra-cavity matching residual; with `Δ = 0` the on-resonance
//! conversion `|s_oe(0)|²` equals the model efficiency exactly, and the
//! reflections approach unity off resonance.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::transducer::{
    coupling_state, MicrowaveModeParams, OpticalModeParams, PumpSpec, TransducerSpec,
};

/// Fraction of samples on each grid edge averaged into the background
/// estimate.
const BACKGROUND_EDGE_FRACTION: f64 = 0.05;

/// Complex four-port spectra over a shared microwave-detuning grid.
/// Reciprocity `s_oe = s_eo` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSpectra {
    pub grid: FrequencyGrid,
    pub s_ee: Vec<Complex64>,
    pub s_oo: Vec<Complex64>,
    pub s_oe: Vec<Complex64>,
    pub s_eo: Vec<Complex64>,
}

/// Generate the four scattering spectra of a pumped transducer on `grid`.
///
/// The grid centre must lie within one span of the microwave resonance; the
/// response is evaluated at the physical detuning `f − ω_m`, so a grid
/// centred on `ω_m` puts the conversion peak exactly on the middle sample.
/// Saturation (when the transducer carries a table) enters through the microwave
/// intrinsic loss rate, matching the efficiency chain.
pub fn scattering_spectra(
    spec: &TransducerSpec,
    pump: &PumpSpec,
    grid: &FrequencyGrid,
) -> Result<ScatterSpectra> {
    let microwave = spec.effective_microwave(pump.on_chip_power_w());
    let offset = grid.center_hz() - microwave.frequency_hz();
    if offset.abs() > grid.span_hz() {
        return Err(Error::invalid(format!(
            "grid center is {offset:.3e} Hz from the microwave resonance, \
             more than one span away"
        )));
    }
    let state = coupling_state(spec, pump)?;
    Ok(spectra_from_rates(
        &microwave,
        spec.blue_mode(),
        state.enhanced_coupling_hz,
        spec.intra_residual_hz(),
        offset,
        grid,
    ))
}

/// Low-level spectra builder from explicit mode parameters and an already
/// enhanced coupling rate. `mismatch_hz` is the intra-cavity residual Δ;
/// `center_offset_hz` is how far the grid centre sits from ω_m.
pub fn spectra_from_rates(
    microwave: &MicrowaveModeParams,
    blue_mode: &OpticalModeParams,
    enhanced_coupling_hz: f64,
    mismatch_hz: f64,
    center_offset_hz: f64,
    grid: &FrequencyGrid,
) -> ScatterSpectra {
    let km = microwave.kappa_total_hz();
    let km_ex = microwave.kappa_ex_hz();
    let kp = blue_mode.kappa_total_hz();
    let kp_ex = blue_mode.kappa_ex_hz();
    let g = enhanced_coupling_hz;
    let conv_num = (km_ex * kp_ex).sqrt() * g;

    let n = grid.points();
    let mut s_ee = Vec::with_capacity(n);
    let mut s_oo = Vec::with_capacity(n);
    let mut s_oe = Vec::with_capacity(n);

    for d_grid in grid.detunings_hz() {
        let delta = center_offset_hz + d_grid;
        let mw_term = Complex64::new(0.5 * km, -delta);
        let opt_term = Complex64::new(0.5 * kp, -(delta - mismatch_hz));
        let denom = mw_term * opt_term + g * g;
        s_ee.push(Complex64::new(1.0, 0.0) - km_ex * opt_term / denom);
        s_oo.push(Complex64::new(1.0, 0.0) - kp_ex * mw_term / denom);
        s_oe.push(conv_num / denom);
    }

    let s_eo = s_oe.clone();
    ScatterSpectra {
        grid: *grid,
        s_ee,
        s_oo,
        s_oe,
        s_eo,
    }
}

fn power(s: &[Complex64]) -> Vec<f64> {
    s.iter().map(|v| v.norm_sqr()).collect()
}

fn edge_mean(values: &[f64], edge_samples: usize) -> f64 {
    let n = values.len();
    let sum: f64 = values[..edge_samples]
        .iter()
        .chain(values[n - edge_samples..].iter())
        .sum();
    sum / (2 * edge_samples) as f64
}

/// Peak/background efficiency estimate from the four spectra:
/// `η̂ = √(S_oe,pk·S_eo,pk / (S_oo,bg·S_ee,bg))` with peaks the maximum
/// `|s|²` over the grid and backgrounds the mean `|s|²` over the outermost
/// 5% of samples on each edge. Channel gains common to peak and background
/// cancel, which is the point of the estimator.
pub fn calibrate_efficiency(spectra: &ScatterSpectra) -> Result<f64> {
    let n = spectra.grid.points();
    let edge_samples = ((n as f64 * BACKGROUND_EDGE_FRACTION).floor() as usize).max(1);

    let p_oe = power(&spectra.s_oe);
    let p_eo = power(&spectra.s_eo);
    let p_ee = power(&spectra.s_ee);
    let p_oo = power(&spectra.s_oo);

    let pk_oe = p_oe.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pk_eo = p_eo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bg_ee = edge_mean(&p_ee, edge_samples);
    let bg_oo = edge_mean(&p_oo, edge_samples);

    for (label, p, bg) in [("s_ee", &p_ee, bg_ee), ("s_oo", &p_oo, bg_oo)] {
        let dip = p.iter().cloned().fold(f64::INFINITY, f64::min);
        if bg < 2.0 * dip {
            return Err(Error::CalibrationWindow(format!(
                "{label} background {bg:.3e} sits within 3 dB of the reflection dip {dip:.3e}"
            )));
        }
    }
    if bg_ee <= 0.0 || bg_oo <= 0.0 {
        return Err(Error::CalibrationWindow(
            "reflection background vanished".into(),
        ));
    }

    Ok((pk_oe * pk_eo / (bg_oo * bg_ee)).sqrt())
}

/// Full width at half maximum of `|s_oe|²`, by linear interpolation between
/// grid samples. Requires the half-power points to fall inside the grid.
pub fn conversion_bandwidth(spectra: &ScatterSpectra) -> Result<f64> {
    half_power_full_width(&spectra.grid.detunings_hz(), &power(&spectra.s_oe))
}

/// Shared half-power routine: FWHM of a single-peaked `power` curve sampled
/// at `detunings`.
pub(crate) fn half_power_full_width(detunings: &[f64], power: &[f64]) -> Result<f64> {
    let n = power.len();
    let (peak_idx, &peak) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::BandwidthUnresolved)?;
    if peak_idx == 0 || peak_idx == n - 1 || peak <= 0.0 {
        return Err(Error::BandwidthUnresolved);
    }
    let half = 0.5 * peak;

    let cross = |i_inner: usize, i_outer: usize| -> f64 {
        // linear interpolation between the bracketing samples
        let (p0, p1) = (power[i_inner], power[i_outer]);
        let (d0, d1) = (detunings[i_inner], detunings[i_outer]);
        d0 + (half - p0) * (d1 - d0) / (p1 - p0)
    };

    let left = power[..peak_idx]
        .iter()
        .rposition(|&p| p <= half)
        .map(|i| cross(i + 1, i));
    let right = power[peak_idx + 1..]
        .iter()
        .position(|&p| p <= half)
        .map(|offset| {
            let i = peak_idx + 1 + offset;
            cross(i - 1, i)
        });
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::BandwidthUnresolved),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::transducer::{efficiency, MicrowaveModeParams, OpticalModeParams, PumpSpec};

    fn rel_err(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Analytic half-power oracle for the matched model: the condition
    /// |D(δ)|² = 2|D(0)|² reduces to δ⁴ + (B² − 2A)δ² − A² = 0 with
    /// A = κ_mκ₊/4 + G², B = (κ_m + κ₊)/2.
    fn analytic_fwhm(km: f64, kp: f64, g: f64) -> f64 {
        let a = km * kp / 4.0 + g * g;
        let b = (km + kp) / 2.0;
        let q = b * b - 2.0 * a;
        let d2 = (-q + (q * q + 4.0 * a * a).sqrt()) / 2.0;
        2.0 * d2.sqrt()
    }

    fn wide_grid(center: f64) -> FrequencyGrid {
        FrequencyGrid::new(center, 400e9, 4001).unwrap()
    }

    fn narrow_grid(center: f64, span: f64) -> FrequencyGrid {
        FrequencyGrid::new(center, span, 2001).unwrap()
    }

    #[test]
    fn zero_coupling_gives_bare_lorentzians() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 0.0).unwrap();
        let grid = narrow_grid(f.microwave().frequency_hz(), 400e6);
        let s = scattering_spectra(&f, &pump, &grid).unwrap();
        assert!(s.s_oe.iter().all(|v| v.norm() == 0.0));
        // bare microwave reflection at centre: ((κin − κex)/κ)²
        let mw = f.microwave();
        let expected = ((mw.kappa_in_hz() - mw.kappa_ex_hz()) / mw.kappa_total_hz()).powi(2);
        let mid = grid.points() / 2;
        assert!(rel_err(s.s_ee[mid].norm_sqr(), expected) < 1e-12);
    }

    #[test]
    fn peak_conversion_equals_efficiency() {
        for spec in [presets::felix(), presets::albert()] {
            let pump = PumpSpec::on_resonance(&spec, 4e-3).unwrap();
            let (eta, _) = efficiency(&spec, &pump).unwrap();
            let grid = narrow_grid(spec.microwave().frequency_hz(), 400e6);
            let s = scattering_spectra(&spec, &pump, &grid).unwrap();
            let mid = grid.points() / 2;
            // Δ from the preset is O(0.03 Hz) float residue, negligible
            assert!(rel_err(s.s_oe[mid].norm_sqr(), eta) < 1e-9);
        }
    }

    #[test]
    fn reciprocity_is_exact() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let grid = narrow_grid(f.microwave().frequency_hz(), 400e6);
        let s = scattering_spectra(&f, &pump, &grid).unwrap();
        assert_eq!(s.s_oe, s.s_eo);
    }

    #[test]
    fn bandwidth_matches_analytic_oracle() {
        // Felix ≈ 36.89 MHz, Albert ≈ 13.87 MHz at 4 mW.
        for (spec, span) in [(presets::felix(), 400e6), (presets::albert(), 200e6)] {
            let pump = PumpSpec::on_resonance(&spec, 4e-3).unwrap();
            let (_, state) = efficiency(&spec, &pump).unwrap();
            let grid = narrow_grid(spec.microwave().frequency_hz(), span);
            let s = scattering_spectra(&spec, &pump, &grid).unwrap();
            let width = conversion_bandwidth(&s).unwrap();
            let oracle = analytic_fwhm(
                spec.microwave().kappa_total_hz(),
                spec.blue_mode().kappa_total_hz(),
                state.enhanced_coupling_hz,
            );
            assert!(rel_err(width, oracle) < 1e-4, "{width} vs {oracle}");
        }
    }

    #[test]
    fn frozen_bandwidth_values() {
        let felix_pump = PumpSpec::on_resonance(&presets::felix(), 4e-3).unwrap();
        let (_, state) = efficiency(&presets::felix(), &felix_pump).unwrap();
        let w = analytic_fwhm(38.0e6, 208e6, state.enhanced_coupling_hz);
        assert!(rel_err(w, 3.688962143171e7) < 1e-6);

        let albert_pump = PumpSpec::on_resonance(&presets::albert(), 4e-3).unwrap();
        let (_, state) = efficiency(&presets::albert(), &albert_pump).unwrap();
        let w = analytic_fwhm(13.9e6, 217e6, state.enhanced_coupling_hz);
        assert!(rel_err(w, 1.387050467617e7) < 1e-6);
    }

    #[test]
    fn single_lorentzian_limit_width_is_kappa_m() {
        // κ₊ ≫ κ_m collapses the product to one Lorentzian of width κ_m.
        let km = 10e6;
        let mw = MicrowaveModeParams::new(10e9, 0.6 * km, 0.4 * km).unwrap();
        let blue = OpticalModeParams::new(190e12, 0.5e13, 0.5e13).unwrap();
        let grid = FrequencyGrid::new(10e9, 10.0 * km, 4001).unwrap();
        let s = spectra_from_rates(&mw, &blue, 1e3, 0.0, 0.0, &grid);
        let width = conversion_bandwidth(&s).unwrap();
        assert!(rel_err(width, km) < 5e-3, "width {width}");
    }

    #[test]
    fn mirrored_spectra_same_width() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let grid = narrow_grid(f.microwave().frequency_hz(), 400e6);
        let mut s = scattering_spectra(&f, &pump, &grid).unwrap();
        let w0 = conversion_bandwidth(&s).unwrap();
        s.s_oe.reverse();
        let w1 = conversion_bandwidth(&s).unwrap();
        assert!((w0 - w1).abs() < 1e-6 * w0);
    }

    #[test]
    fn calibration_round_trips_efficiency() {
        for spec in [presets::felix(), presets::albert()] {
            let pump = PumpSpec::on_resonance(&spec, 4e-3).unwrap();
            let (eta, _) = efficiency(&spec, &pump).unwrap();
            let grid = wide_grid(spec.microwave().frequency_hz());
            let s = scattering_spectra(&spec, &pump, &grid).unwrap();
            let eta_hat = calibrate_efficiency(&s).unwrap();
            assert!(
                rel_err(eta_hat, eta) < 1e-6,
                "{}: {eta_hat} vs {eta}",
                spec.name()
            );
        }
    }

    #[test]
    fn calibration_zero_for_zero_coupling() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 0.0).unwrap();
        let grid = wide_grid(f.microwave().frequency_hz());
        let s = scattering_spectra(&f, &pump, &grid).unwrap();
        assert_eq!(calibrate_efficiency(&s).unwrap(), 0.0);
    }

    #[test]
    fn calibration_gain_invariant() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let grid = wide_grid(f.microwave().frequency_hz());
        let s = scattering_spectra(&f, &pump, &grid).unwrap();
        let eta_hat = calibrate_efficiency(&s).unwrap();

        let gain = 3.7;
        let scaled = ScatterSpectra {
            grid: s.grid,
            s_ee: s.s_ee.iter().map(|v| v * gain).collect(),
            s_oo: s.s_oo.iter().map(|v| v * gain).collect(),
            s_oe: s.s_oe.iter().map(|v| v * gain).collect(),
            s_eo: s.s_eo.iter().map(|v| v * gain).collect(),
        };
        let eta_scaled = calibrate_efficiency(&scaled).unwrap();
        assert!(rel_err(eta_scaled, eta_hat) < 1e-12);
    }

    #[test]
    fn narrow_grid_trips_calibration_window() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        // 10 kHz span: every sample sits in the reflection dip
        let grid = FrequencyGrid::new(f.microwave().frequency_hz(), 1e4, 101).unwrap();
        let s = scattering_spectra(&f, &pump, &grid).unwrap();
        assert!(matches!(
            calibrate_efficiency(&s),
            Err(Error::CalibrationWindow(_))
        ));
    }

    #[test]
    fn bandwidth_unresolved_on_tiny_span() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let grid = FrequencyGrid::new(f.microwave().frequency_hz(), 1e6, 101).unwrap();
        let s = scattering_spectra(&f, &pump, &grid).unwrap();
        assert!(matches!(
            conversion_bandwidth(&s),
            Err(Error::BandwidthUnresolved)
        ));
    }

    #[test]
    fn grid_far_from_resonance_rejected() {
        let f = presets::felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let grid = FrequencyGrid::new(20e9, 1e9, 101).unwrap();
        assert!(scattering_spectra(&f, &pump, &grid).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn passive_energy_bound(
                km_in in 1e5f64..1e8,
                km_ex in 1e5f64..1e8,
                kp_in in 1e6f64..1e9,
                kp_ex in 1e6f64..1e9,
                g in 0.0f64..1e8,
            ) {
                let mw = MicrowaveModeParams::new(10e9, km_in, km_ex).unwrap();
                let blue = OpticalModeParams::new(190e12, kp_in, kp_ex).unwrap();
                let grid = FrequencyGrid::new(10e9, 10.0 * (km_in + km_ex), 201).unwrap();
                let s = spectra_from_rates(&mw, &blue, g, 0.0, 0.0, &grid);
                for i in 0..grid.points() {
                    let total = s.s_ee[i].norm_sqr() + s.s_oe[i].norm_sqr();
                    prop_assert!(total <= 1.0 + 1e-9, "point {i}: {total}");
                    prop_assert!(s.s_oe[i].norm_sqr() <= 1.0 + 1e-12);
                }
            }

            #[test]
            fn conversion_peaks_at_zero_detuning(
                g in 1e3f64..5e6,
            ) {
                let mw = MicrowaveModeParams::new(10e9, 23.3e6, 14.7e6).unwrap();
                let blue = OpticalModeParams::new(190e12, 118e6, 90e6).unwrap();
                let grid = FrequencyGrid::new(10e9, 4e8, 801).unwrap();
                let s = spectra_from_rates(&mw, &blue, g, 0.0, 0.0, &grid);
                let p: Vec<f64> = s.s_oe.iter().map(|v| v.norm_sqr()).collect();
                let argmax = p
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap()
                    .0;
                prop_assert_eq!(argmax, grid.points() / 2);
            }
        }
    }
}
