//! Transducer parameter sets and the pump → coupling → efficiency chain.
//!
//! The chain implemented here: an on-resonance pump at the red sideband
//! builds up an intra-cavity photon population `n₋`, which enhances the
//! single-photon electro-optic coupling to `G = √n₋·g_eo`; the cooperativity
//! `C = 4G²/(κ_m·κ₊)` then sets the on-chip conversion efficiency
//! `η = (κ₊,ex/κ₊)(κ_m,ex/κ_m)·4C/(1+C)²`, which peaks at `C = 1`.
//!
//! All stored frequencies and rates are ordinary frequencies in Hz; the
//! photon-number formula inserts its 2π factors internally.

use std::f64::consts::{FRAC_PI_4, TAU};

use crate::constants::{HBAR, PUMP_DETUNING_TOLERANCE};
use crate::error::{Error, Result};
use crate::matcher::TuningModel;

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(format!(
            "{name} must be finite and non-negative, got {v}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::invalid(format!(
            "{name} must be finite and positive, got {v}"
        )));
    }
    Ok(())
}

/// One optical resonance: centre frequency plus intrinsic and external loss
/// rates. The total loss rate is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalModeParams {
    frequency_hz: f64,
    kappa_in_hz: f64,
    kappa_ex_hz: f64,
}

impl OpticalModeParams {
    pub fn new(frequency_hz: f64, kappa_in_hz: f64, kappa_ex_hz: f64) -> Result<Self> {
        check_positive("optical mode frequency", frequency_hz)?;
        check_rate("kappa_in", kappa_in_hz)?;
        check_rate("kappa_ex", kappa_ex_hz)?;
        if kappa_in_hz + kappa_ex_hz <= 0.0 {
            return Err(Error::invalid("total loss rate must be positive"));
        }
        Ok(Self {
            frequency_hz,
            kappa_in_hz,
            kappa_ex_hz,
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn kappa_in_hz(&self) -> f64 {
        self.kappa_in_hz
    }

    pub fn kappa_ex_hz(&self) -> f64 {
        self.kappa_ex_hz
    }

    pub fn kappa_total_hz(&self) -> f64 {
        self.kappa_in_hz + self.kappa_ex_hz
    }
}

/// The superconducting microwave resonance, same loss-rate bookkeeping as the
/// optical modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicrowaveModeParams {
    frequency_hz: f64,
    kappa_in_hz: f64,
    kappa_ex_hz: f64,
}

impl MicrowaveModeParams {
    pub fn new(frequency_hz: f64, kappa_in_hz: f64, kappa_ex_hz: f64) -> Result<Self> {
        check_positive("microwave mode frequency", frequency_hz)?;
        check_rate("kappa_in", kappa_in_hz)?;
        check_rate("kappa_ex", kappa_ex_hz)?;
        if kappa_in_hz + kappa_ex_hz <= 0.0 {
            return Err(Error::invalid("total loss rate must be positive"));
        }
        Ok(Self {
            frequency_hz,
            kappa_in_hz,
            kappa_ex_hz,
        })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn kappa_in_hz(&self) -> f64 {
        self.kappa_in_hz
    }

    pub fn kappa_ex_hz(&self) -> f64 {
        self.kappa_ex_hz
    }

    pub fn kappa_total_hz(&self) -> f64 {
        self.kappa_in_hz + self.kappa_ex_hz
    }

    /// Copy with a substituted intrinsic loss rate (saturation lookup).
    pub(crate) fn with_kappa_in(&self, kappa_in_hz: f64) -> Self {
        Self {
            kappa_in_hz,
            ..*self
        }
    }
}

/// Two evanescently coupled rings before hybridization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingPairSpec {
    omega_1_hz: f64,
    omega_2_hz: f64,
    g_c_hz: f64,
    ring_radius_m: f64,
    fsr_hz: f64,
}

impl RingPairSpec {
    pub fn new(
        omega_1_hz: f64,
        omega_2_hz: f64,
        g_c_hz: f64,
        ring_radius_m: f64,
        fsr_hz: f64,
    ) -> Result<Self> {
        check_positive("ring-1 frequency", omega_1_hz)?;
        check_positive("ring-2 frequency", omega_2_hz)?;
        check_positive("evanescent coupling g_c", g_c_hz)?;
        check_positive("ring radius", ring_radius_m)?;
        check_positive("free spectral range", fsr_hz)?;
        Ok(Self {
            omega_1_hz,
            omega_2_hz,
            g_c_hz,
            ring_radius_m,
            fsr_hz,
        })
    }

    pub fn omega_1_hz(&self) -> f64 {
        self.omega_1_hz
    }

    pub fn omega_2_hz(&self) -> f64 {
        self.omega_2_hz
    }

    pub fn g_c_hz(&self) -> f64 {
        self.g_c_hz
    }

    pub fn ring_radius_m(&self) -> f64 {
        self.ring_radius_m
    }

    pub fn fsr_hz(&self) -> f64 {
        self.fsr_hz
    }

    /// Copy with both bare ring frequencies shifted (DC tuning, comb-line
    /// reindexing).
    pub fn shifted(&self, delta_1_hz: f64, delta_2_hz: f64) -> Result<Self> {
        Self::new(
            self.omega_1_hz + delta_1_hz,
            self.omega_2_hz + delta_2_hz,
            self.g_c_hz,
            self.ring_radius_m,
            self.fsr_hz,
        )
    }
}

/// Hybridized supermodes of a ring pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hybridization {
    pub omega_plus_hz: f64,
    pub omega_minus_hz: f64,
    pub theta_rad: f64,
}

impl Hybridization {
    pub fn splitting_hz(&self) -> f64 {
        self.omega_plus_hz - self.omega_minus_hz
    }
}

/// Eigenfrequencies and mixing angle of the coupled two-ring system:
/// `ω± = (ω₁+ω₂)/2 ± √(g_c² + ((ω₁−ω₂)/2)²)`, `tan 2θ = 2g_c/(ω₁−ω₂)`.
/// Degenerate rings give `θ = π/4` and a splitting of exactly `2g_c`.
pub fn hybridize(ring_pair: &RingPairSpec) -> Hybridization {
    let mean = 0.5 * (ring_pair.omega_1_hz + ring_pair.omega_2_hz);
    let half_detune = 0.5 * (ring_pair.omega_1_hz - ring_pair.omega_2_hz);
    let s = (ring_pair.g_c_hz * ring_pair.g_c_hz + half_detune * half_detune).sqrt();
    let theta_rad = if half_detune == 0.0 {
        FRAC_PI_4
    } else {
        0.5 * (2.0 * ring_pair.g_c_hz).atan2(ring_pair.omega_1_hz - ring_pair.omega_2_hz)
    };
    Hybridization {
        omega_plus_hz: mean + s,
        omega_minus_hz: mean - s,
        theta_rad,
    }
}

/// Lookup table mapping on-chip optical power to the microwave intrinsic
/// loss rate, modeling the efficiency saturation seen at high pump power.
/// Powers must be strictly increasing and the loss rates non-decreasing;
/// evaluation clamps outside the tabulated range.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturationTable {
    entries: Vec<(f64, f64)>,
}

impl SaturationTable {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("saturation table must not be empty"));
        }
        for (i, &(p, k)) in entries.iter().enumerate() {
            check_rate("saturation power", p)?;
            check_rate("saturation kappa_m_in", k)?;
            if i > 0 {
                if p <= entries[i - 1].0 {
                    return Err(Error::invalid(
                        "saturation powers must be strictly increasing",
                    ));
                }
                if k < entries[i - 1].1 {
                    return Err(Error::invalid(
                        "saturation kappa_m_in must be non-decreasing",
                    ));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Linear interpolation, clamped to the table ends.
    pub fn kappa_in_at(&self, power_w: f64) -> f64 {
        let e = &self.entries;
        if power_w <= e[0].0 {
            return e[0].1;
        }
        if power_w >= e[e.len() - 1].0 {
            return e[e.len() - 1].1;
        }
        let hi = e.partition_point(|&(p, _)| p < power_w);
        let (p0, k0) = e[hi - 1];
        let (p1, k1) = e[hi];
        k0 + (k1 - k0) * (power_w - p0) / (p1 - p0)
    }
}

/// Full parameter set of one transducer: the tunable ring pair, the measured
/// operating-point mode parameters, the single-photon coupling rate, the DC
/// tuning model, and an optional saturation table.
#[derive(Debug, Clone, PartialEq)]
pub struct TransducerSpec {
    name: String,
    ring_pair: RingPairSpec,
    red_mode: OpticalModeParams,
    blue_mode: OpticalModeParams,
    microwave: MicrowaveModeParams,
    g_eo_hz: f64,
    tuning: TuningModel,
    saturation: Option<SaturationTable>,
}

impl TransducerSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        ring_pair: RingPairSpec,
        red_mode: OpticalModeParams,
        blue_mode: OpticalModeParams,
        microwave: MicrowaveModeParams,
        g_eo_hz: f64,
        tuning: TuningModel,
        saturation: Option<SaturationTable>,
    ) -> Result<Self> {
        check_rate("g_eo", g_eo_hz)?;
        if blue_mode.frequency_hz() <= red_mode.frequency_hz() {
            return Err(Error::invalid(
                "blue sideband frequency must exceed the red sideband frequency",
            ));
        }
        Ok(Self {
            name: name.into(),
            ring_pair,
            red_mode,
            blue_mode,
            microwave,
            g_eo_hz,
            tuning,
            saturation,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring_pair(&self) -> &RingPairSpec {
        &self.ring_pair
    }

    pub fn red_mode(&self) -> &OpticalModeParams {
        &self.red_mode
    }

    pub fn blue_mode(&self) -> &OpticalModeParams {
        &self.blue_mode
    }

    pub fn microwave(&self) -> &MicrowaveModeParams {
        &self.microwave
    }

    pub fn g_eo_hz(&self) -> f64 {
        self.g_eo_hz
    }

    pub fn tuning(&self) -> &TuningModel {
        &self.tuning
    }

    pub fn saturation(&self) -> Option<&SaturationTable> {
        self.saturation.as_ref()
    }

    /// Copy with the ring pair replaced (used when re-anchoring to another
    /// comb line).
    pub fn with_ring_pair(&self, ring_pair: RingPairSpec) -> Self {
        Self {
            ring_pair,
            ..self.clone()
        }
    }

    /// Intra-cavity matching residual `ω_m − (ω₊ − ω₋)`, recomputed on every
    /// call. Zero when the microwave resonance exactly bridges the doublet.
    pub fn intra_residual_hz(&self) -> f64 {
        self.microwave.frequency_hz()
            - (self.blue_mode.frequency_hz() - self.red_mode.frequency_hz())
    }

    /// Microwave parameters at the given pump power: the intrinsic loss rate
    /// is replaced by the saturation-table value when a table is present.
    pub fn effective_microwave(&self, power_w: f64) -> MicrowaveModeParams {
        match &self.saturation {
            Some(table) => self.microwave.with_kappa_in(table.kappa_in_at(power_w)),
            None => self.microwave,
        }
    }
}

/// Optical pump pulse: on-chip peak power, targeting the red sideband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    on_chip_power_w: f64,
    pump_frequency_hz: f64,
}

impl PumpSpec {
    pub fn new(on_chip_power_w: f64, pump_frequency_hz: f64) -> Result<Self> {
        check_rate("on-chip pump power", on_chip_power_w)?;
        check_positive("pump frequency", pump_frequency_hz)?;
        Ok(Self {
            on_chip_power_w,
            pump_frequency_hz,
        })
    }

    /// Pump sitting exactly on the red resonance of `spec`.
    pub fn on_resonance(spec: &TransducerSpec, on_chip_power_w: f64) -> Result<Self> {
        Self::new(on_chip_power_w, spec.red_mode().frequency_hz())
    }

    pub fn on_chip_power_w(&self) -> f64 {
        self.on_chip_power_w
    }

    pub fn pump_frequency_hz(&self) -> f64 {
        self.pump_frequency_hz
    }
}

/// Pump-derived coupling quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingState {
    /// Intra-cavity pump photon number n₋.
    pub pump_photon_number: f64,
    /// Enhanced electro-optic coupling √n₋·g_eo, in Hz.
    pub enhanced_coupling_hz: f64,
    /// Cooperativity 4G²/(κ_m·κ₊).
    pub cooperativity: f64,
}

/// Intra-cavity pump photon number `n₋ = P/(ħω₋) · 4κ₋,ex/κ₋²` for an
/// on-resonance pump, with the default detuning tolerance.
pub fn pump_photon_number(red_mode: &OpticalModeParams, pump: &PumpSpec) -> Result<f64> {
    pump_photon_number_with_tolerance(red_mode, pump, PUMP_DETUNING_TOLERANCE)
}

/// As [`pump_photon_number`] but with an explicit detuning tolerance given as
/// a fraction of the red-mode total linewidth.
pub fn pump_photon_number_with_tolerance(
    red_mode: &OpticalModeParams,
    pump: &PumpSpec,
    tolerance_fraction: f64,
) -> Result<f64> {
    let detuning_hz = pump.pump_frequency_hz - red_mode.frequency_hz();
    let tolerance_hz = tolerance_fraction * red_mode.kappa_total_hz();
    if detuning_hz.abs() > tolerance_hz {
        return Err(Error::PumpDetuned {
            detuning_hz,
            tolerance_hz,
        });
    }
    let omega_minus = TAU * red_mode.frequency_hz();
    let kappa_ex = TAU * red_mode.kappa_ex_hz();
    let kappa = TAU * red_mode.kappa_total_hz();
    Ok(pump.on_chip_power_w / (HBAR * omega_minus) * 4.0 * kappa_ex / (kappa * kappa))
}

/// Pump photon number, enhanced coupling and cooperativity for a pumped
/// transducer. Applies the saturation table to the microwave loss first.
pub fn coupling_state(spec: &TransducerSpec, pump: &PumpSpec) -> Result<CouplingState> {
    let n_minus = pump_photon_number(spec.red_mode(), pump)?;
    let g = n_minus.sqrt() * spec.g_eo_hz();
    let microwave = spec.effective_microwave(pump.on_chip_power_w());
    let cooperativity =
        4.0 * g * g / (microwave.kappa_total_hz() * spec.blue_mode().kappa_total_hz());
    Ok(CouplingState {
        pump_photon_number: n_minus,
        enhanced_coupling_hz: g,
        cooperativity,
    })
}

/// On-chip transduction efficiency
/// `η = (κ₊,ex/κ₊)·(κ_m,ex/κ_m)·4C/(1+C)²` and the coupling state behind it.
pub fn efficiency(spec: &TransducerSpec, pump: &PumpSpec) -> Result<(f64, CouplingState)> {
    let state = coupling_state(spec, pump)?;
    let microwave = spec.effective_microwave(pump.on_chip_power_w());
    let blue = spec.blue_mode();
    let c = state.cooperativity;
    let eta = (blue.kappa_ex_hz() / blue.kappa_total_hz())
        * (microwave.kappa_ex_hz() / microwave.kappa_total_hz())
        * 4.0
        * c
        / ((1.0 + c) * (1.0 + c));
    Ok((eta, state))
}

/// Efficiency at each of the given on-chip powers, pump on the red
/// resonance. Order is preserved.
pub fn efficiency_sweep(spec: &TransducerSpec, powers_w: &[f64]) -> Result<Vec<(f64, f64)>> {
    if powers_w.is_empty() {
        return Err(Error::invalid("power sweep needs at least one power"));
    }
    powers_w
        .iter()
        .map(|&p| {
            let pump = PumpSpec::on_resonance(spec, p)?;
            let (eta, _) = efficiency(spec, &pump)?;
            Ok((p, eta))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn felix() -> TransducerSpec {
        presets::felix()
    }

    fn albert() -> TransducerSpec {
        presets::albert()
    }

    // Frozen oracle values, evaluated independently from the formula chain
    // with CODATA ħ at full f64 precision.
    const FELIX_N_MINUS_4MW: f64 = 3.692023415100e7;
    const ALBERT_N_MINUS_4MW: f64 = 1.833077075112e7;
    const FELIX_ETA_4MW: f64 = 9.989056932820e-4;
    const ALBERT_ETA_4MW: f64 = 1.396656335917e-3;
    const FELIX_COOPERATIVITY_4MW: f64 = 1.496409227186e-3;

    fn rel_err(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn hybridize_degenerate_rings() {
        let ring = RingPairSpec::new(190.6370e12, 190.6370e12, 5e9, 61.7e-6, 353e9).unwrap();
        let h = hybridize(&ring);
        assert!(rel_err(h.omega_plus_hz, 190.6420e12) < 1e-12);
        assert!(rel_err(h.omega_minus_hz, 190.6320e12) < 1e-12);
        assert_eq!(h.theta_rad, FRAC_PI_4);
        // splitting is 2 g_c up to the rounding of the two large additions
        assert!((h.splitting_hz() - 10e9).abs() <= 4.0 * f64::EPSILON * 190.6370e12);
    }

    #[test]
    fn hybridize_degenerate_exact_on_representable_inputs() {
        // Powers of two keep every intermediate exact.
        let w = 2f64.powi(47);
        let g = 2f64.powi(20);
        let ring = RingPairSpec::new(w, w, g, 1e-5, 1e11).unwrap();
        let h = hybridize(&ring);
        assert_eq!(h.splitting_hz(), 2.0 * g);
    }

    #[test]
    fn hybridize_two_gc_detuning() {
        // ω₁ − ω₂ = 2 g_c, splitting 2√2 g_c: eigenvalues of the 2x2
        // coupled-mode matrix, checked against the closed form.
        let g = 1e9;
        let ring = RingPairSpec::new(190.0e12 + 2.0 * g, 190.0e12, g, 61.7e-6, 353e9).unwrap();
        let h = hybridize(&ring);
        let expected = 2.0 * 2f64.sqrt() * g;
        assert!(rel_err(h.splitting_hz(), expected) < 1e-10);
        assert!(h.theta_rad > 0.0 && h.theta_rad < std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn hybridize_swap_symmetry() {
        let a = RingPairSpec::new(190.001e12, 190.000e12, 3e9, 60e-6, 350e9).unwrap();
        let b = RingPairSpec::new(190.000e12, 190.001e12, 3e9, 60e-6, 350e9).unwrap();
        let ha = hybridize(&a);
        let hb = hybridize(&b);
        assert_eq!(ha.omega_plus_hz, hb.omega_plus_hz);
        assert_eq!(ha.omega_minus_hz, hb.omega_minus_hz);
    }

    #[test]
    fn matched_by_construction() {
        // g_c = 5 GHz, degenerate rings, ω_m = 10 GHz: residual vanishes.
        let ring = RingPairSpec::new(190.6370e12, 190.6370e12, 5e9, 61.7e-6, 353e9).unwrap();
        let h = hybridize(&ring);
        let residual = 10e9 - h.splitting_hz();
        assert!(residual.abs() <= 4.0 * f64::EPSILON * 190.6370e12);
    }

    #[test]
    fn pump_photons_zero_power() {
        let pump = PumpSpec::on_resonance(&felix(), 0.0).unwrap();
        assert_eq!(pump_photon_number(felix().red_mode(), &pump).unwrap(), 0.0);
    }

    #[test]
    fn pump_photons_match_oracle() {
        let f = felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let n = pump_photon_number(f.red_mode(), &pump).unwrap();
        // Preset ω₋ differs from the bare table value by 40 MHz (exact
        // matching), a 2e-7 relative shift; compare loosely against the
        // table-value oracle and tightly against the rounded magnitude.
        assert!(rel_err(n, FELIX_N_MINUS_4MW) < 1e-6);

        let a = albert();
        let pump = PumpSpec::on_resonance(&a, 4e-3).unwrap();
        let n = pump_photon_number(a.red_mode(), &pump).unwrap();
        assert!(rel_err(n, ALBERT_N_MINUS_4MW) < 1e-6);
    }

    #[test]
    fn pump_photons_linearity() {
        let f = felix();
        let base =
            pump_photon_number(f.red_mode(), &PumpSpec::on_resonance(&f, 1.3e-3).unwrap()).unwrap();
        for a in [0.0, 0.5, 2.0, 7.25] {
            let scaled = pump_photon_number(
                f.red_mode(),
                &PumpSpec::on_resonance(&f, a * 1.3e-3).unwrap(),
            )
            .unwrap();
            assert!((scaled - a * base).abs() <= 1e-14 * (a * base).abs());
        }
    }

    #[test]
    fn detuned_pump_rejected() {
        let f = felix();
        let red = f.red_mode();
        // 1% of κ₋ = 2.36 MHz: 3 MHz off is rejected, 1 MHz passes.
        let bad = PumpSpec::new(4e-3, red.frequency_hz() + 3e6).unwrap();
        assert!(matches!(
            pump_photon_number(red, &bad),
            Err(Error::PumpDetuned { .. })
        ));
        let ok = PumpSpec::new(4e-3, red.frequency_hz() + 1e6).unwrap();
        assert!(pump_photon_number(red, &ok).is_ok());
    }

    #[test]
    fn efficiency_matches_oracle() {
        let f = felix();
        let pump = PumpSpec::on_resonance(&f, 4e-3).unwrap();
        let (eta, state) = efficiency(&f, &pump).unwrap();
        assert!(rel_err(state.cooperativity, FELIX_COOPERATIVITY_4MW) < 1e-6);
        assert!(rel_err(eta, FELIX_ETA_4MW) < 1e-6);

        let a = albert();
        let pump = PumpSpec::on_resonance(&a, 4e-3).unwrap();
        let (eta, _) = efficiency(&a, &pump).unwrap();
        assert!(rel_err(eta, ALBERT_ETA_4MW) < 1e-6);
    }

    #[test]
    fn efficiency_peaks_at_unit_cooperativity() {
        // Critically coupled on both ports and C = 1 gives η = 1.
        let ring = RingPairSpec::new(190e12, 190e12, 5e9, 60e-6, 350e9).unwrap();
        let red = OpticalModeParams::new(190e12 - 5e9, 0.0, 200e6).unwrap();
        let blue = OpticalModeParams::new(190e12 + 5e9, 0.0, 200e6).unwrap();
        let mw = MicrowaveModeParams::new(10e9, 0.0, 10e6).unwrap();
        // Solve g_eo so that C = 1 at 1 mW.
        let spec = TransducerSpec::new(
            "unit",
            ring,
            red,
            blue,
            mw,
            1.0,
            TuningModel::new(1e7, 1e7, -200.0, 200.0).unwrap(),
            None,
        )
        .unwrap();
        let pump = PumpSpec::on_resonance(&spec, 1e-3).unwrap();
        let n = pump_photon_number(spec.red_mode(), &pump).unwrap();
        // C = 4 n g² / (κ_m κ₊) = 1  =>  g = sqrt(κ_m κ₊ / (4 n))
        let g_eo = (10e6 * 200e6 / (4.0 * n)).sqrt();
        let spec = TransducerSpec::new(
            "unit",
            ring,
            red,
            blue,
            mw,
            g_eo,
            TuningModel::new(1e7, 1e7, -200.0, 200.0).unwrap(),
            None,
        )
        .unwrap();
        let (eta, state) = efficiency(&spec, &pump).unwrap();
        assert!(rel_err(state.cooperativity, 1.0) < 1e-12);
        assert!(rel_err(eta, 1.0) < 1e-12);
    }

    #[test]
    fn efficiency_maximum_sits_at_c_equals_one() {
        // Ternary search the C ↦ 4C/(1+C)² factor.
        let f = |c: f64| 4.0 * c / ((1.0 + c) * (1.0 + c));
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if f(m1) < f(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        // the maximum is quadratically flat, so the search can only localize
        // it to ~√ε of the argument
        assert!((0.5 * (lo + hi) - 1.0).abs() < 1e-6);
        assert!((f(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_is_linear_without_saturation() {
        let f = felix();
        let sweep = efficiency_sweep(&f, &[1e-3, 2e-3, 4e-3]).unwrap();
        let (p1, e1) = sweep[0];
        assert_eq!(p1, 1e-3);
        // η ∝ P holds to ~C out of exactness; 0.5% window per the chain.
        assert!(rel_err(sweep[1].1 / e1, 2.0) < 5e-3);
        assert!(rel_err(sweep[2].1 / e1, 4.0) < 5e-3);
    }

    #[test]
    fn sweep_zero_power() {
        let sweep = efficiency_sweep(&felix(), &[0.0]).unwrap();
        assert_eq!(sweep, vec![(0.0, 0.0)]);
    }

    #[test]
    fn sweep_empty_rejected() {
        assert!(efficiency_sweep(&felix(), &[]).is_err());
        assert!(efficiency_sweep(&felix(), &[-1e-3]).is_err());
    }

    #[test]
    fn saturation_pulls_efficiency_below_linear() {
        let f = felix();
        let base_kappa = f.microwave().kappa_in_hz();
        let table =
            SaturationTable::new(vec![(0.0, base_kappa), (4e-3, 2.0 * base_kappa)]).unwrap();
        let saturated = TransducerSpec::new(
            f.name(),
            *f.ring_pair(),
            *f.red_mode(),
            *f.blue_mode(),
            *f.microwave(),
            f.g_eo_hz(),
            f.tuning().clone(),
            Some(table),
        )
        .unwrap();
        let sweep = efficiency_sweep(&saturated, &[1e-3, 4e-3]).unwrap();
        let linear_extrapolation = 4.0 * sweep[0].1;
        assert!(sweep[1].1 < linear_extrapolation);
        // direct evaluation with the doubled κ_m,in as the oracle
        let mw = saturated.effective_microwave(4e-3);
        assert_eq!(mw.kappa_in_hz(), 2.0 * base_kappa);
    }

    #[test]
    fn saturation_table_interpolates_and_clamps() {
        let t = SaturationTable::new(vec![(1e-3, 10.0), (3e-3, 30.0)]).unwrap();
        assert_eq!(t.kappa_in_at(0.0), 10.0);
        assert_eq!(t.kappa_in_at(2e-3), 20.0);
        assert_eq!(t.kappa_in_at(5e-3), 30.0);
        assert!(SaturationTable::new(vec![(1e-3, 10.0), (1e-3, 20.0)]).is_err());
        assert!(SaturationTable::new(vec![(1e-3, 10.0), (2e-3, 5.0)]).is_err());
    }

    #[test]
    fn invariants_rejected_at_construction() {
        assert!(OpticalModeParams::new(-1.0, 1e6, 1e6).is_err());
        assert!(OpticalModeParams::new(1e14, 0.0, 0.0).is_err());
        assert!(OpticalModeParams::new(1e14, -1.0, 1e6).is_err());
        assert!(MicrowaveModeParams::new(1e9, 0.0, 0.0).is_err());
        assert!(RingPairSpec::new(1e14, 1e14, 0.0, 1e-5, 1e11).is_err());
        assert!(PumpSpec::new(-1e-3, 1e14).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn mode_strategy() -> impl Strategy<Value = (f64, f64)> {
            // (κ_in, κ_ex) with at least one positive
            (1e3f64..1e9, 1e3f64..1e9)
        }

        proptest! {
            #[test]
            fn eta_bounded_by_port_ratios(
                (kin_b, kex_b) in mode_strategy(),
                (kin_m, kex_m) in mode_strategy(),
                g_eo in 0.0f64..5e3,
                power in 0.0f64..20e-3,
            ) {
                let ring = RingPairSpec::new(190e12, 190e12, 5e9, 60e-6, 350e9).unwrap();
                let red = OpticalModeParams::new(190e12 - 5e9, 100e6, 100e6).unwrap();
                let blue = OpticalModeParams::new(190e12 + 5e9, kin_b, kex_b).unwrap();
                let mw = MicrowaveModeParams::new(10e9, kin_m, kex_m).unwrap();
                let tuning = TuningModel::new(1e7, 1e7, -200.0, 200.0).unwrap();
                let spec = TransducerSpec::new("p", ring, red, blue, mw, g_eo, tuning, None).unwrap();
                let pump = PumpSpec::on_resonance(&spec, power).unwrap();
                let (eta, _) = efficiency(&spec, &pump).unwrap();
                let bound = (kex_b / (kin_b + kex_b)) * (kex_m / (kin_m + kex_m));
                prop_assert!(eta >= 0.0);
                prop_assert!(eta <= bound * (1.0 + 1e-12));
                prop_assert!(bound <= 1.0);
            }

            #[test]
            fn hybridize_pair_swap_invariant(
                w1 in 189e12f64..191e12,
                w2 in 189e12f64..191e12,
                g in 1e8f64..1e10,
            ) {
                let a = hybridize(&RingPairSpec::new(w1, w2, g, 60e-6, 350e9).unwrap());
                let b = hybridize(&RingPairSpec::new(w2, w1, g, 60e-6, 350e9).unwrap());
                prop_assert_eq!(a.omega_plus_hz, b.omega_plus_hz);
                prop_assert_eq!(a.omega_minus_hz, b.omega_minus_hz);
                prop_assert!(a.splitting_hz() >= 2.0 * g * (1.0 - 1e-12));
            }

            #[test]
            fn pump_photons_linear_in_power(
                power in 0.0f64..10e-3,
                scale in 0.0f64..8.0,
            ) {
                let red = OpticalModeParams::new(190e12, 134e6, 102e6).unwrap();
                let n1 = pump_photon_number(&red, &PumpSpec::new(power, 190e12).unwrap()).unwrap();
                let n2 = pump_photon_number(&red, &PumpSpec::new(scale * power, 190e12).unwrap()).unwrap();
                prop_assert!((n2 - scale * n1).abs() <= 1e-13 * (scale * n1).abs().max(1e-300));
            }
        }
    }
}
