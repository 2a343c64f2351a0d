//! Scenario configuration: one TOML file with nested sections, every
//! physical quantity carrying its unit in the key name. Each subcommand
//! requires exactly the sections it consumes; everything else may be
//! omitted. Relative paths resolve against the config file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub devices: Option<DevicesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump: Option<PumpSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber: Option<FiberSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub couplers: Option<CouplersSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matcher: Option<MatcherSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qpsk: Option<QpskSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe: Option<FringeSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibrate: Option<CalibrateSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geo: Option<GeoSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

/// Transducer files by link role; single-device subcommands use `m2o`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevicesSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2o: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub o2m: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    /// Single operating power for spectra/link/qpsk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub on_chip_power_w: Option<f64>,
    /// Power list for the efficiency sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub powers_w: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Defaults to the device's microwave resonance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_hz: Option<f64>,
    pub span_hz: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSection {
    pub length_m: f64,
    /// Defaults to 0.2 dB/km.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attenuation_db_per_km: Option<f64>,
    /// Defaults to 1.468.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_index: Option<f64>,
    /// Defaults to the up-converter's blue sideband frequency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_frequency_hz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplersSection {
    /// Defaults to 5.93 dB per pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insertion_loss_db: Option<f64>,
    /// Defaults to 4 passes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub distances_m: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatcherSection {
    pub window_lo_hz: f64,
    pub window_hi_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub levels: Vec<NoiseLevelRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub infer: Vec<NoiseInferRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseLevelRow {
    pub power_w: f64,
    pub n_ex: f64,
    pub n_en: f64,
    pub delta_n_out_add: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseInferRow {
    pub power_w: f64,
    pub s_dev_on_resonance: f64,
    pub s_dev_off_resonance: f64,
    pub delta_n_out_add: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    /// Residual ω₊ offset between the devices; defaults to 0 (matched).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inter_residual_hz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QpskSection {
    /// Defaults to 50.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeats_per_phase: Option<usize>,
    /// Defaults to 1.0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude_in: Option<f64>,
    pub noise_sigma: f64,
    /// Defaults to 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Explicit complex link gain; when absent the gain is computed from
    /// the devices/pump/fiber/couplers sections.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_im: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FringeSection {
    /// Evenly spaced LO phases over [0, 2π); defaults to 64 points.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_phase_points: Option<usize>,
    /// Explicit LO phase list; overrides `lo_phase_points`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo_phases_rad: Option<Vec<f64>>,
    pub signal_amplitude: f64,
    pub lo_amplitude: f64,
    /// Defaults to 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_phase_rad: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateSection {
    pub spectra_csv: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoSection {
    pub u_oz: String,
    pub u_mr: String,
    pub u_mz: String,
    pub eps_ozz: String,
    pub eps_mrr: String,
    pub eps_mzz: String,
    pub r33_m_per_v: f64,
    pub ring_radius_m: f64,
    pub omega_o_hz: f64,
    pub omega_m_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

/// Parsed config plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: ScenarioConfig = toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let base_dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self { config, base_dir })
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        let p = Path::new(relative);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Hash of the canonical re-serialization of the parsed config, so the
    /// hash follows semantic fields and ignores formatting and comments.
    pub fn semantic_hash(&self) -> String {
        let canonical = toml::to_string(&self.config).expect("config reserializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(7 + 64);
        out.push_str("sha256:");
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

pub fn require<T>(value: Option<T>, what: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("config is missing {what}")))
}
