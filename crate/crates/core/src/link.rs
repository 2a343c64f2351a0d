//! Fridge-to-fridge photonic link: fiber response, cascaded M2O2M transfer,
//! and the technology link-budget comparison.

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::spectra::{half_power_full_width, ScatterSpectra};

/// Coaxial-cable attenuation used in the budget comparison.
pub const COAX_LOSS_DB_PER_M: f64 = 1.0;
/// Telecom-fiber attenuation used in the budget comparison.
pub const FIBER_LOSS_DB_PER_KM: f64 = 0.2;
/// Total conversion loss of a commercial electro-optic modulator pair.
pub const EOM_PAIR_LOSS_DB: f64 = 140.0;
/// Total on-chip conversion loss of the transducer pair.
pub const TRANSDUCER_PAIR_ONCHIP_LOSS_DB: f64 = 60.0;
/// Total fiber-to-chip coupling loss added off chip.
pub const OFFCHIP_COUPLING_LOSS_DB: f64 = 23.7;

/// A stretch of single-mode fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    length_m: f64,
    attenuation_db_per_km: f64,
    effective_index: f64,
    carrier_frequency_hz: f64,
}

impl FiberSpec {
    pub fn new(
        length_m: f64,
        attenuation_db_per_km: f64,
        effective_index: f64,
        carrier_frequency_hz: f64,
    ) -> Result<Self> {
        if length_m.is_nan() || length_m < 0.0 {
            return Err(Error::invalid("fiber length must be non-negative"));
        }
        if attenuation_db_per_km.is_nan() || attenuation_db_per_km < 0.0 {
            return Err(Error::invalid("fiber attenuation must be non-negative"));
        }
        if effective_index.is_nan() || effective_index < 1.0 {
            return Err(Error::invalid("effective index must be at least 1"));
        }
        if carrier_frequency_hz.is_nan() || carrier_frequency_hz <= 0.0 {
            return Err(Error::invalid("carrier frequency must be positive"));
        }
        Ok(Self {
            length_m,
            attenuation_db_per_km,
            effective_index,
            carrier_frequency_hz,
        })
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn attenuation_db_per_km(&self) -> f64 {
        self.attenuation_db_per_km
    }

    pub fn effective_index(&self) -> f64 {
        self.effective_index
    }

    pub fn carrier_frequency_hz(&self) -> f64 {
        self.carrier_frequency_hz
    }
}

/// Fiber-to-chip coupler chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerSpec {
    insertion_loss_db: f64,
    passes: usize,
}

impl CouplerSpec {
    pub fn new(insertion_loss_db: f64, passes: usize) -> Result<Self> {
        if insertion_loss_db.is_nan() || insertion_loss_db < 0.0 {
            return Err(Error::invalid(
                "coupler insertion loss must be non-negative",
            ));
        }
        Ok(Self {
            insertion_loss_db,
            passes,
        })
    }

    pub fn insertion_loss_db(&self) -> f64 {
        self.insertion_loss_db
    }

    pub fn passes(&self) -> usize {
        self.passes
    }

    pub fn total_loss_db(&self) -> f64 {
        self.insertion_loss_db * self.passes as f64
    }

    /// Field transmission factor of the whole chain.
    pub fn amplitude(&self) -> f64 {
        10f64.powf(-self.total_loss_db() / 20.0)
    }
}

/// Complex field transmission of the fiber: amplitude from the dB/km loss,
/// phase from the optical path length reduced mod 2π. Zero length is exactly
/// unity. The reduction of a kilometre-scale optical phase carries ~µrad of
/// float rounding; absolute link phase is treated as arbitrary anyway.
pub fn fiber_response(fiber: &FiberSpec) -> Complex64 {
    if fiber.length_m == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let amplitude = 10f64.powf(-fiber.attenuation_db_per_km * fiber.length_m / 1000.0 / 20.0);
    let phase = (-std::f64::consts::TAU
        * fiber.effective_index
        * fiber.length_m
        * fiber.carrier_frequency_hz
        / SPEED_OF_LIGHT)
        .rem_euclid(std::f64::consts::TAU);
    Complex64::from_polar(amplitude, phase)
}

/// Cascaded microwave→optical→microwave response.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkResponse {
    /// Shared detuning axis (centre refers to the input-side microwave
    /// resonance).
    pub grid: FrequencyGrid,
    pub s_link: Vec<Complex64>,
    pub peak_transmission_db: f64,
    /// None when the half-power points fall outside the grid.
    pub bandwidth_hz: Option<f64>,
}

/// Linear interpolation of a complex array sampled on `detunings`; exact at
/// the nodes, clamped at the ends.
fn interp_complex(detunings: &[f64], values: &[Complex64], x: f64) -> Complex64 {
    let n = detunings.len();
    if x <= detunings[0] {
        return values[0];
    }
    if x >= detunings[n - 1] {
        return values[n - 1];
    }
    let hi = detunings.partition_point(|&d| d < x);
    if detunings[hi] == x {
        return values[hi];
    }
    let lo = hi - 1;
    let t = (x - detunings[lo]) / (detunings[hi] - detunings[lo]);
    values[lo] * (1.0 - t) + values[hi] * t
}

/// Cascade the up-converter's M2O channel through the fiber (and optional
/// couplers) into the down-converter's O2M channel:
/// `s_link(δ) = s_eo,down(δ + r)·fiber·couplers·s_oe,up(δ)` with `r` the
/// inter-cavity residual. Both spectra must share the same detuning grid
/// relative to their own resonances.
pub fn cascade(
    upconverter: &ScatterSpectra,
    downconverter: &ScatterSpectra,
    fiber: &FiberSpec,
    couplers: Option<&CouplerSpec>,
    inter_residual_hz: f64,
) -> Result<LinkResponse> {
    if upconverter.grid.span_hz() != downconverter.grid.span_hz()
        || upconverter.grid.points() != downconverter.grid.points()
    {
        return Err(Error::IncompatibleGrids(format!(
            "up-converter {} points over {:.3e} Hz vs down-converter {} points over {:.3e} Hz",
            upconverter.grid.points(),
            upconverter.grid.span_hz(),
            downconverter.grid.points(),
            downconverter.grid.span_hz(),
        )));
    }

    let fixed = fiber_response(fiber) * couplers.map_or(1.0, CouplerSpec::amplitude);
    let detunings = upconverter.grid.detunings_hz();
    let s_link: Vec<Complex64> = detunings
        .iter()
        .zip(&upconverter.s_oe)
        .enumerate()
        .map(|(i, (&d, &up))| {
            let down = if inter_residual_hz == 0.0 {
                downconverter.s_eo[i]
            } else {
                interp_complex(&detunings, &downconverter.s_eo, d + inter_residual_hz)
            };
            down * fixed * up
        })
        .collect();

    let power: Vec<f64> = s_link.iter().map(|v| v.norm_sqr()).collect();
    let peak = power.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let peak_transmission_db = 10.0 * peak.log10();
    let bandwidth_hz = half_power_full_width(&detunings, &power).ok();

    Ok(LinkResponse {
        grid: upconverter.grid,
        s_link,
        peak_transmission_db,
        bandwidth_hz,
    })
}

/// Link technologies compared in the budget table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Technology {
    Coax,
    EomPair,
    TransducerPairOnChip,
    TransducerPairOffChip,
}

impl Technology {
    pub const ALL: [Technology; 4] = [
        Technology::Coax,
        Technology::EomPair,
        Technology::TransducerPairOnChip,
        Technology::TransducerPairOffChip,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Technology::Coax => "coax",
            Technology::EomPair => "eom_pair",
            Technology::TransducerPairOnChip => "transducer_pair_onchip",
            Technology::TransducerPairOffChip => "transducer_pair_offchip",
        }
    }
}

/// One budget row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetEntry {
    pub technology: Technology,
    pub distance_m: f64,
    pub total_loss_db: f64,
}

fn technology_loss_db(technology: Technology, distance_m: f64) -> f64 {
    let fiber = FIBER_LOSS_DB_PER_KM * distance_m / 1000.0;
    match technology {
        Technology::Coax => COAX_LOSS_DB_PER_M * distance_m,
        Technology::EomPair => EOM_PAIR_LOSS_DB + fiber,
        Technology::TransducerPairOnChip => TRANSDUCER_PAIR_ONCHIP_LOSS_DB + fiber,
        Technology::TransducerPairOffChip => {
            TRANSDUCER_PAIR_ONCHIP_LOSS_DB + OFFCHIP_COUPLING_LOSS_DB + fiber
        }
    }
}

/// Total loss per technology at each distance, one entry per
/// (technology, distance) in deterministic order.
pub fn budget_table(distances_m: &[f64]) -> Result<Vec<BudgetEntry>> {
    for &d in distances_m {
        if d.is_nan() || d < 0.0 {
            return Err(Error::invalid(format!(
                "distance must be non-negative, got {d}"
            )));
        }
    }
    let mut out = Vec::with_capacity(4 * distances_m.len());
    for technology in Technology::ALL {
        for &distance_m in distances_m {
            out.push(BudgetEntry {
                technology,
                distance_m,
                total_loss_db: technology_loss_db(technology, distance_m),
            });
        }
    }
    Ok(out)
}
