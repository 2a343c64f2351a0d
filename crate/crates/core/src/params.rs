//! Device parameter files: one TOML document per transducer, keys carrying
//! explicit unit suffixes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcher::TuningModel;
use crate::transducer::{
    MicrowaveModeParams, OpticalModeParams, RingPairSpec, SaturationTable, TransducerSpec,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModeDoc {
    frequency_hz: f64,
    kappa_in_hz: f64,
    kappa_ex_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RingPairDoc {
    ring_1_frequency_hz: f64,
    ring_2_frequency_hz: f64,
    coupling_hz: f64,
    ring_radius_m: f64,
    fsr_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TuningDoc {
    alpha_1_hz_per_v: f64,
    alpha_2_hz_per_v: f64,
    v_min_v: f64,
    v_max_v: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SaturationRow {
    power_w: f64,
    kappa_m_in_hz: f64,
}

/// On-disk schema of a transducer document.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TransducerDoc {
    name: String,
    g_eo_hz: f64,
    optical_red_sideband: ModeDoc,
    optical_blue_sideband: ModeDoc,
    microwave: ModeDoc,
    ring_pair: RingPairDoc,
    tuning: TuningDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    saturation: Vec<SaturationRow>,
}

fn build(doc: TransducerDoc) -> Result<TransducerSpec> {
    let red = OpticalModeParams::new(
        doc.optical_red_sideband.frequency_hz,
        doc.optical_red_sideband.kappa_in_hz,
        doc.optical_red_sideband.kappa_ex_hz,
    )?;
    let blue = OpticalModeParams::new(
        doc.optical_blue_sideband.frequency_hz,
        doc.optical_blue_sideband.kappa_in_hz,
        doc.optical_blue_sideband.kappa_ex_hz,
    )?;
    let microwave = MicrowaveModeParams::new(
        doc.microwave.frequency_hz,
        doc.microwave.kappa_in_hz,
        doc.microwave.kappa_ex_hz,
    )?;
    let ring_pair = RingPairSpec::new(
        doc.ring_pair.ring_1_frequency_hz,
        doc.ring_pair.ring_2_frequency_hz,
        doc.ring_pair.coupling_hz,
        doc.ring_pair.ring_radius_m,
        doc.ring_pair.fsr_hz,
    )?;
    let tuning = TuningModel::new(
        doc.tuning.alpha_1_hz_per_v,
        doc.tuning.alpha_2_hz_per_v,
        doc.tuning.v_min_v,
        doc.tuning.v_max_v,
    )?;
    let saturation = if doc.saturation.is_empty() {
        None
    } else {
        Some(SaturationTable::new(
            doc.saturation
                .iter()
                .map(|r| (r.power_w, r.kappa_m_in_hz))
                .collect(),
        )?)
    };
    TransducerSpec::new(
        doc.name,
        ring_pair,
        red,
        blue,
        microwave,
        doc.g_eo_hz,
        tuning,
        saturation,
    )
}

fn to_doc(spec: &TransducerSpec) -> TransducerDoc {
    let mode = |f: f64, kin: f64, kex: f64| ModeDoc {
        frequency_hz: f,
        kappa_in_hz: kin,
        kappa_ex_hz: kex,
    };
    TransducerDoc {
        name: spec.name().to_string(),
        g_eo_hz: spec.g_eo_hz(),
        optical_red_sideband: mode(
            spec.red_mode().frequency_hz(),
            spec.red_mode().kappa_in_hz(),
            spec.red_mode().kappa_ex_hz(),
        ),
        optical_blue_sideband: mode(
            spec.blue_mode().frequency_hz(),
            spec.blue_mode().kappa_in_hz(),
            spec.blue_mode().kappa_ex_hz(),
        ),
        microwave: mode(
            spec.microwave().frequency_hz(),
            spec.microwave().kappa_in_hz(),
            spec.microwave().kappa_ex_hz(),
        ),
        ring_pair: RingPairDoc {
            ring_1_frequency_hz: spec.ring_pair().omega_1_hz(),
            ring_2_frequency_hz: spec.ring_pair().omega_2_hz(),
            coupling_hz: spec.ring_pair().g_c_hz(),
            ring_radius_m: spec.ring_pair().ring_radius_m(),
            fsr_hz: spec.ring_pair().fsr_hz(),
        },
        tuning: TuningDoc {
            alpha_1_hz_per_v: spec.tuning().alpha_1_hz_per_v(),
            alpha_2_hz_per_v: spec.tuning().alpha_2_hz_per_v(),
            v_min_v: spec.tuning().v_min_v(),
            v_max_v: spec.tuning().v_max_v(),
        },
        saturation: spec
            .saturation()
            .map(|t| {
                t.entries()
                    .iter()
                    .map(|&(power_w, kappa_m_in_hz)| SaturationRow {
                        power_w,
                        kappa_m_in_hz,
                    })
                    .collect()
            })
            .unwrap_or_default(),
    }
}

/// Parse a transducer document from TOML text.
pub fn transducer_from_toml(text: &str) -> Result<TransducerSpec> {
    let doc: TransducerDoc = toml::from_str(text).map_err(|e| Error::FileFormat {
        path: "<string>".into(),
        message: e.to_string(),
    })?;
    build(doc)
}

/// Serialize a transducer to TOML text.
pub fn transducer_to_toml(spec: &TransducerSpec) -> Result<String> {
    toml::to_string(&to_doc(spec)).map_err(|e| Error::FileFormat {
        path: "<string>".into(),
        message: e.to_string(),
    })
}

/// Load a transducer document from disk.
pub fn load_transducer(path: &Path) -> Result<TransducerSpec> {
    let text = std::fs::read_to_string(path)?;
    transducer_from_toml(&text).map_err(|e| match e {
        Error::FileFormat { message, .. } => Error::FileFormat {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })
}

/// Write a transducer document to disk.
pub fn save_transducer(spec: &TransducerSpec, path: &Path) -> Result<()> {
    std::fs::write(path, transducer_to_toml(spec)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn toml_round_trip_preserves_the_spec() {
        for spec in [presets::felix(), presets::albert()] {
            let text = transducer_to_toml(&spec).unwrap();
            let back = transducer_from_toml(&text).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn saturation_survives_round_trip() {
        let f = presets::felix();
        let table = SaturationTable::new(vec![(0.0, 23.3e6), (4e-3, 46.6e6)]).unwrap();
        let spec = TransducerSpec::new(
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
        let text = transducer_to_toml(&spec).unwrap();
        let back = transducer_from_toml(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn invalid_documents_are_rejected() {
        assert!(matches!(
            transducer_from_toml("name = \"x\""),
            Err(Error::FileFormat { .. })
        ));
        // blue sideband below the red one violates the ordering invariant
        let text = r#"
name = "bad"
g_eo_hz = 283.0

[optical_red_sideband]
frequency_hz = 190.642e12
kappa_in_hz = 134e6
kappa_ex_hz = 102e6

[optical_blue_sideband]
frequency_hz = 190.632e12
kappa_in_hz = 118e6
kappa_ex_hz = 90e6

[microwave]
frequency_hz = 9.96e9
kappa_in_hz = 23.3e6
kappa_ex_hz = 14.7e6

[ring_pair]
ring_1_frequency_hz = 190.6388e12
ring_2_frequency_hz = 190.6388e12
coupling_hz = 4.98e9
ring_radius_m = 61.7e-6
fsr_hz = 353e9

[tuning]
alpha_1_hz_per_v = 11.875e6
alpha_2_hz_per_v = 11.875e6
v_min_v = -200.0
v_max_v = 200.0
"#;
        assert!(matches!(
            transducer_from_toml(text),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn repo_device_files_match_presets() {
        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../devices");
        let felix = load_transducer(Path::new(&format!("{root}/felix.toml"))).unwrap();
        assert_eq!(felix, presets::felix());
        let albert = load_transducer(Path::new(&format!("{root}/albert.toml"))).unwrap();
        assert_eq!(albert, presets::albert());
    }
}
