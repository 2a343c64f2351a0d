//! Built-in parameter sets for the measured transducer pair, Felix
//! (9.960 GHz microwave mode, M2O up-converter) and Albert (4.606 GHz,
//! O2M down-converter).
//!
//! The optical mode frequencies encode the matched operating point: both
//! blue sidebands at 190.6420 THz and each red sideband exactly one
//! microwave quantum below, so the intra- and inter-cavity residuals vanish
//! and the pump offset between the two devices is the 5.354 GHz difference
//! of the microwave frequencies. The ring pairs carry the *untuned*
//! resonances (blue sidebands 3.8 GHz apart) together with the linear DC
//! tuning model fitted at 11.875 MHz/V, which is what the matching solver
//! works on.

use crate::matcher::TuningModel;
use crate::transducer::{MicrowaveModeParams, OpticalModeParams, RingPairSpec, TransducerSpec};

/// Shared blue-sideband operating frequency.
pub const OPERATING_BLUE_HZ: f64 = 190.6420e12;

/// Fitted DC tuning coefficient: 3.8 GHz closed by ±160 V across the pair.
pub const TUNING_ALPHA_HZ_PER_V: f64 = 11.875e6;

fn tuning() -> TuningModel {
    TuningModel::new(TUNING_ALPHA_HZ_PER_V, TUNING_ALPHA_HZ_PER_V, -200.0, 200.0)
        .expect("static tuning model")
}

/// The 9.960 GHz device: 61.7 µm rings, 353 GHz FSR, g_eo = 283 Hz.
pub fn felix() -> TransducerSpec {
    let microwave_hz = 9.960e9;
    let untuned_blue_hz = 190.6438e12;
    let g_c_hz = microwave_hz / 2.0;
    TransducerSpec::new(
        "felix",
        RingPairSpec::new(
            untuned_blue_hz - g_c_hz,
            untuned_blue_hz - g_c_hz,
            g_c_hz,
            61.7e-6,
            353e9,
        )
        .expect("static ring pair"),
        OpticalModeParams::new(OPERATING_BLUE_HZ - microwave_hz, 134e6, 102e6)
            .expect("static red mode"),
        OpticalModeParams::new(OPERATING_BLUE_HZ, 118e6, 90e6).expect("static blue mode"),
        MicrowaveModeParams::new(microwave_hz, 23.3e6, 14.7e6).expect("static microwave mode"),
        283.0,
        tuning(),
        None,
    )
    .expect("static transducer")
}

/// The 4.606 GHz device: 60.0 µm rings, 342 GHz FSR, g_eo = 275 Hz.
pub fn albert() -> TransducerSpec {
    let microwave_hz = 4.606e9;
    let untuned_blue_hz = 190.6400e12;
    let g_c_hz = microwave_hz / 2.0;
    TransducerSpec::new(
        "albert",
        RingPairSpec::new(
            untuned_blue_hz - g_c_hz,
            untuned_blue_hz - g_c_hz,
            g_c_hz,
            60.0e-6,
            342e9,
        )
        .expect("static ring pair"),
        OpticalModeParams::new(OPERATING_BLUE_HZ - microwave_hz, 214e6, 77e6)
            .expect("static red mode"),
        OpticalModeParams::new(OPERATING_BLUE_HZ, 167e6, 50e6).expect("static blue mode"),
        MicrowaveModeParams::new(microwave_hz, 2.4e6, 11.5e6).expect("static microwave mode"),
        275.0,
        tuning(),
        None,
    )
    .expect("static transducer")
}
