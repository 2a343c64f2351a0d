//! Subcommand implementations. Each one reads the sections it needs from
//! the scenario config, runs the corresponding analyses, and returns the
//! rendered output files.

use std::fmt::Write as _;

use num_complex::Complex64;

use eolink_core::comm::{
    fit_sine, interference_fringe, qpsk_constellation, symbol_error_count, FringeScan, QpskRun,
};
use eolink_core::grid::FrequencyGrid;
use eolink_core::link::{budget_table, cascade, CouplerSpec, FiberSpec};
use eolink_core::matcher::plan_matching;
use eolink_core::noise::{infer_baths, output_noise_spectrum, BathOccupancies};
use eolink_core::overlap::{compute_geo, load_profile_set, OverlapScalars, ProfileFiles};
use eolink_core::params::load_transducer;
use eolink_core::spectra::{
    calibrate_efficiency, conversion_bandwidth, scattering_spectra, ScatterSpectra,
};
use eolink_core::transducer::{
    coupling_state, efficiency, efficiency_sweep, PumpSpec, TransducerSpec,
};

use crate::config::{require, GridSection, LoadedConfig};
use crate::output::{csv, fmt_f64, CommandOutput, OutputFile};
use crate::CliError;

fn domain(e: eolink_core::Error) -> CliError {
    CliError::Domain(e.to_string())
}

fn load_device(loaded: &LoadedConfig, role: &str) -> Result<TransducerSpec, CliError> {
    let devices = require(loaded.config.devices.as_ref(), "[devices]")?;
    let path = match role {
        "m2o" => devices.m2o.as_ref(),
        _ => devices.o2m.as_ref(),
    };
    let path = require(path, &format!("[devices].{role}"))?;
    let resolved = loaded.resolve(path);
    load_transducer(&resolved)
        .map_err(|e| CliError::Usage(format!("device file {}: {e}", resolved.display())))
}

fn build_grid(section: &GridSection, default_center_hz: f64) -> Result<FrequencyGrid, CliError> {
    FrequencyGrid::new(
        section.center_hz.unwrap_or(default_center_hz),
        section.span_hz,
        section.points,
    )
    .map_err(domain)
}

fn build_fiber(loaded: &LoadedConfig, default_carrier_hz: f64) -> Result<FiberSpec, CliError> {
    let section = require(loaded.config.fiber.as_ref(), "[fiber]")?;
    FiberSpec::new(
        section.length_m,
        section.attenuation_db_per_km.unwrap_or(0.2),
        section.effective_index.unwrap_or(1.468),
        section.carrier_frequency_hz.unwrap_or(default_carrier_hz),
    )
    .map_err(domain)
}

fn build_couplers(loaded: &LoadedConfig) -> Result<Option<CouplerSpec>, CliError> {
    match &loaded.config.couplers {
        None => Ok(None),
        Some(section) => Ok(Some(
            CouplerSpec::new(
                section.insertion_loss_db.unwrap_or(5.93),
                section.passes.unwrap_or(4),
            )
            .map_err(domain)?,
        )),
    }
}

pub fn efficiency_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let device = load_device(loaded, "m2o")?;
    let pump_section = require(loaded.config.pump.as_ref(), "[pump]")?;
    let powers = require(pump_section.powers_w.as_ref(), "[pump].powers_w")?;

    let sweep = efficiency_sweep(&device, powers).map_err(domain)?;
    let rows: Vec<Vec<f64>> = sweep
        .iter()
        .map(|&(power_w, eta)| {
            let pump = PumpSpec::on_resonance(&device, power_w).map_err(domain)?;
            let state = coupling_state(&device, &pump).map_err(domain)?;
            Ok(vec![
                power_w,
                state.pump_photon_number,
                state.cooperativity,
                eta,
            ])
        })
        .collect::<Result<_, CliError>>()?;

    Ok(CommandOutput {
        files: vec![OutputFile::new(
            "efficiency.csv",
            csv("power_w,pump_photons,cooperativity,eta", rows),
        )],
        seed: None,
    })
}

fn render_spectra_csv(s: &ScatterSpectra) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "# center_hz={}", fmt_f64(s.grid.center_hz()));
    text.push_str(
        "detuning_hz,s_ee_re,s_ee_im,s_oo_re,s_oo_im,s_oe_re,s_oe_im,s_eo_re,s_eo_im,\
         s_ee_db,s_oo_db,s_oe_db,s_eo_db\n",
    );
    let db = |v: Complex64| 10.0 * v.norm_sqr().log10();
    for (i, d) in s.grid.detunings_hz().into_iter().enumerate() {
        let cells = [
            d,
            s.s_ee[i].re,
            s.s_ee[i].im,
            s.s_oo[i].re,
            s.s_oo[i].im,
            s.s_oe[i].re,
            s.s_oe[i].im,
            s.s_eo[i].re,
            s.s_eo[i].im,
            db(s.s_ee[i]),
            db(s.s_oo[i]),
            db(s.s_oe[i]),
            db(s.s_eo[i]),
        ];
        let line: Vec<String> = cells.iter().map(|&v| fmt_f64(v)).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    text
}

/// Parse a spectra CSV written by [`render_spectra_csv`].
pub fn parse_spectra_csv(text: &str, origin: &str) -> Result<ScatterSpectra, CliError> {
    let err = |msg: String| CliError::Domain(format!("{origin}: {msg}"));
    let mut center_hz = 0.0f64;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut seen_header = false;
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("center_hz=") {
                center_hz = v.parse().map_err(|_| err(format!("bad center_hz '{v}'")))?;
            }
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let cells: Result<Vec<f64>, _> = trimmed.split(',').map(str::parse).collect();
        let cells = cells.map_err(|e| err(format!("bad row '{trimmed}': {e}")))?;
        if cells.len() != 13 {
            return Err(err(format!("expected 13 columns, got {}", cells.len())));
        }
        rows.push(cells);
    }
    if rows.len() < 3 {
        return Err(err("need at least 3 spectral rows".into()));
    }
    let span = rows[rows.len() - 1][0] - rows[0][0];
    let grid = FrequencyGrid::new(center_hz, span, rows.len()).map_err(domain)?;
    let channel = |re: usize, im: usize| -> Vec<Complex64> {
        rows.iter().map(|r| Complex64::new(r[re], r[im])).collect()
    };
    Ok(ScatterSpectra {
        grid,
        s_ee: channel(1, 2),
        s_oo: channel(3, 4),
        s_oe: channel(5, 6),
        s_eo: channel(7, 8),
    })
}

pub fn spectra_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let device = load_device(loaded, "m2o")?;
    let pump_section = require(loaded.config.pump.as_ref(), "[pump]")?;
    let power = require(pump_section.on_chip_power_w, "[pump].on_chip_power_w")?;
    let grid_section = require(loaded.config.grid.as_ref(), "[grid]")?;
    let grid = build_grid(grid_section, device.microwave().frequency_hz())?;

    let pump = PumpSpec::on_resonance(&device, power).map_err(domain)?;
    let spectra = scattering_spectra(&device, &pump, &grid).map_err(domain)?;
    let (model_eta, state) = efficiency(&device, &pump).map_err(domain)?;
    let calibrated_eta = calibrate_efficiency(&spectra).map_err(domain)?;
    let bandwidth = conversion_bandwidth(&spectra);

    let mut report = String::new();
    let _ = writeln!(report, "device = \"{}\"", device.name());
    let _ = writeln!(report, "on_chip_power_w = {}", fmt_f64(power));
    let _ = writeln!(
        report,
        "enhanced_coupling_hz = {}",
        fmt_f64(state.enhanced_coupling_hz)
    );
    let _ = writeln!(report, "cooperativity = {}", fmt_f64(state.cooperativity));
    let _ = writeln!(report, "model_eta = {}", fmt_f64(model_eta));
    let _ = writeln!(report, "calibrated_eta = {}", fmt_f64(calibrated_eta));
    if let Ok(bw) = bandwidth {
        let _ = writeln!(report, "bandwidth_hz = {}", fmt_f64(bw));
    }

    Ok(CommandOutput {
        files: vec![
            OutputFile::new("spectra.csv", render_spectra_csv(&spectra)),
            OutputFile::new("spectra_report.toml", report),
        ],
        seed: None,
    })
}

pub fn calibrate_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let section = require(loaded.config.calibrate.as_ref(), "[calibrate]")?;
    let path = loaded.resolve(&section.spectra_csv);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let spectra = parse_spectra_csv(&text, &path.display().to_string())?;
    let eta_hat = calibrate_efficiency(&spectra).map_err(domain)?;

    let mut report = String::new();
    let _ = writeln!(report, "eta_hat = {}", fmt_f64(eta_hat));
    Ok(CommandOutput {
        files: vec![OutputFile::new("calibration.toml", report)],
        seed: None,
    })
}

pub fn noise_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let device = load_device(loaded, "m2o")?;
    let section = require(loaded.config.noise.as_ref(), "[noise]")?;
    if section.levels.is_empty() {
        return Err(CliError::Usage("[noise].levels must not be empty".into()));
    }
    let grid_section = require(loaded.config.grid.as_ref(), "[grid]")?;
    let grid = build_grid(grid_section, device.microwave().frequency_hz())?;
    let mw = device.microwave();

    let mut files = Vec::new();
    let mut summary_rows = Vec::new();
    for (idx, level) in section.levels.iter().enumerate() {
        let baths =
            BathOccupancies::new(level.n_ex, level.n_en, level.delta_n_out_add).map_err(domain)?;
        let spectrum = output_noise_spectrum(mw, &baths, &grid).map_err(domain)?;
        summary_rows.push(vec![
            level.power_w,
            level.n_ex,
            level.n_en,
            level.delta_n_out_add,
            spectrum.n_mode,
        ]);
        let mut sdev = String::new();
        let _ = writeln!(sdev, "# power_w={}", fmt_f64(level.power_w));
        sdev.push_str("frequency_hz,s_dev\n");
        for (f, s) in grid.frequencies_hz().iter().zip(&spectrum.s_dev) {
            let _ = writeln!(sdev, "{},{}", fmt_f64(*f), fmt_f64(*s));
        }
        files.push(OutputFile::new(format!("sdev_{idx:03}.csv"), sdev));
    }
    files.insert(
        0,
        OutputFile::new(
            "noise.csv",
            csv("power_w,n_ex,n_en,delta_n_out_add,n_mode", summary_rows),
        ),
    );

    if !section.infer.is_empty() {
        let rows: Vec<Vec<f64>> = section
            .infer
            .iter()
            .map(|row| {
                let baths = infer_baths(
                    row.s_dev_on_resonance,
                    row.s_dev_off_resonance,
                    mw,
                    row.delta_n_out_add,
                )
                .map_err(domain)?;
                Ok(vec![
                    row.power_w,
                    baths.n_ex(),
                    baths.n_en(),
                    row.delta_n_out_add,
                    eolink_core::noise::mode_occupancy(mw, &baths),
                ])
            })
            .collect::<Result<_, CliError>>()?;
        files.push(OutputFile::new(
            "noise_inferred.csv",
            csv("power_w,n_ex,n_en,delta_n_out_add,n_mode", rows),
        ));
    }

    Ok(CommandOutput { files, seed: None })
}

pub fn match_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let up = load_device(loaded, "m2o")?;
    let down = load_device(loaded, "o2m")?;
    let section = require(loaded.config.matcher.as_ref(), "[matcher]")?;

    let plan =
        plan_matching(&up, &down, (section.window_lo_hz, section.window_hi_hz)).map_err(domain)?;

    let mut report = String::new();
    let _ = writeln!(report, "pair_index_m2o = {}", plan.pair_indices.0);
    let _ = writeln!(report, "pair_index_o2m = {}", plan.pair_indices.1);
    let _ = writeln!(report, "mismatch_hz = {}", fmt_f64(plan.mismatch_hz));
    let _ = writeln!(
        report,
        "vernier_period_hz = {}",
        fmt_f64(plan.vernier_period_hz)
    );
    let _ = writeln!(report, "\n[voltages_m2o]");
    let _ = writeln!(report, "ring_1_v = {}", fmt_f64(plan.voltages_a.ring_1_v));
    let _ = writeln!(report, "ring_2_v = {}", fmt_f64(plan.voltages_a.ring_2_v));
    let _ = writeln!(report, "\n[voltages_o2m]");
    let _ = writeln!(report, "ring_1_v = {}", fmt_f64(plan.voltages_b.ring_1_v));
    let _ = writeln!(report, "ring_2_v = {}", fmt_f64(plan.voltages_b.ring_2_v));
    let _ = writeln!(report, "\n[residuals]");
    let _ = writeln!(
        report,
        "intra_m2o_hz = {}",
        fmt_f64(plan.residuals.intra_a_hz)
    );
    let _ = writeln!(
        report,
        "intra_o2m_hz = {}",
        fmt_f64(plan.residuals.intra_b_hz)
    );
    let _ = writeln!(report, "inter_hz = {}", fmt_f64(plan.residuals.inter_hz));

    Ok(CommandOutput {
        files: vec![OutputFile::new("match_plan.toml", report)],
        seed: None,
    })
}

pub fn budget_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let section = require(loaded.config.budget.as_ref(), "[budget]")?;
    let entries = budget_table(&section.distances_m).map_err(domain)?;
    let mut text = String::from("technology,distance_m,loss_db\n");
    for e in entries {
        let _ = writeln!(
            text,
            "{},{},{}",
            e.technology.as_str(),
            fmt_f64(e.distance_m),
            fmt_f64(e.total_loss_db)
        );
    }
    Ok(CommandOutput {
        files: vec![OutputFile::new("budget.csv", text)],
        seed: None,
    })
}

/// Shared link-path assembly for `link` and `qpsk`.
fn build_link(
    loaded: &LoadedConfig,
) -> Result<(eolink_core::link::LinkResponse, FrequencyGrid), CliError> {
    let up = load_device(loaded, "m2o")?;
    let down = load_device(loaded, "o2m")?;
    let pump_section = require(loaded.config.pump.as_ref(), "[pump]")?;
    let power = require(pump_section.on_chip_power_w, "[pump].on_chip_power_w")?;
    let grid_section = require(loaded.config.grid.as_ref(), "[grid]")?;

    let grid_up = build_grid(grid_section, up.microwave().frequency_hz())?;
    let grid_down = FrequencyGrid::new(
        down.microwave().frequency_hz(),
        grid_up.span_hz(),
        grid_up.points(),
    )
    .map_err(domain)?;

    let pump_up = PumpSpec::on_resonance(&up, power).map_err(domain)?;
    let pump_down = PumpSpec::on_resonance(&down, power).map_err(domain)?;
    let s_up = scattering_spectra(&up, &pump_up, &grid_up).map_err(domain)?;
    let s_down = scattering_spectra(&down, &pump_down, &grid_down).map_err(domain)?;

    let fiber = build_fiber(loaded, up.blue_mode().frequency_hz())?;
    let couplers = build_couplers(loaded)?;
    let inter_residual = loaded
        .config
        .link
        .as_ref()
        .and_then(|l| l.inter_residual_hz)
        .unwrap_or(0.0);

    let response =
        cascade(&s_up, &s_down, &fiber, couplers.as_ref(), inter_residual).map_err(domain)?;
    Ok((response, grid_up))
}

pub fn link_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let (response, grid) = build_link(loaded)?;

    let mut text = String::from("detuning_hz,re,im,mag_db,phase_rad\n");
    for (d, s) in grid.detunings_hz().iter().zip(&response.s_link) {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            fmt_f64(*d),
            fmt_f64(s.re),
            fmt_f64(s.im),
            fmt_f64(10.0 * s.norm_sqr().log10()),
            fmt_f64(s.arg())
        );
    }

    let mut report = String::new();
    let _ = writeln!(
        report,
        "peak_transmission_db = {}",
        fmt_f64(response.peak_transmission_db)
    );
    if let Some(bw) = response.bandwidth_hz {
        let _ = writeln!(report, "bandwidth_hz = {}", fmt_f64(bw));
    }

    Ok(CommandOutput {
        files: vec![
            OutputFile::new("link.csv", text),
            OutputFile::new("link_report.toml", report),
        ],
        seed: None,
    })
}

pub fn qpsk_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let section = require(loaded.config.qpsk.as_ref(), "[qpsk]")?;
    let gain = match (section.gain_re, section.gain_im) {
        (Some(re), Some(im)) => Complex64::new(re, im),
        (None, None) => {
            let (response, grid) = build_link(loaded)?;
            response.s_link[grid.points() / 2]
        }
        _ => {
            return Err(CliError::Usage(
                "[qpsk] needs both gain_re and gain_im, or neither".into(),
            ))
        }
    };

    let seed = section.seed.unwrap_or(0);
    let run = QpskRun::all_symbols(
        section.repeats_per_phase.unwrap_or(50),
        section.amplitude_in.unwrap_or(1.0),
        section.noise_sigma,
        seed,
    )
    .map_err(domain)?;
    let samples = qpsk_constellation(gain, &run);
    let errors = symbol_error_count(&samples, gain, run.amplitude_in());

    let mut text = String::from("symbol,i,q\n");
    for s in &samples {
        let _ = writeln!(text, "{},{},{}", s.symbol, fmt_f64(s.i), fmt_f64(s.q));
    }
    let mut report = String::new();
    let _ = writeln!(report, "gain_re = {}", fmt_f64(gain.re));
    let _ = writeln!(report, "gain_im = {}", fmt_f64(gain.im));
    let _ = writeln!(report, "noise_sigma = {}", fmt_f64(run.noise_sigma()));
    let _ = writeln!(report, "symbol_errors = {errors}");

    Ok(CommandOutput {
        files: vec![
            OutputFile::new("constellation.csv", text),
            OutputFile::new("qpsk_report.toml", report),
        ],
        seed: Some(seed),
    })
}

pub fn fringe_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let section = require(loaded.config.fringe.as_ref(), "[fringe]")?;
    let scan = match &section.lo_phases_rad {
        Some(phases) => FringeScan::new(
            phases.clone(),
            section.signal_amplitude,
            section.lo_amplitude,
        ),
        None => FringeScan::even(
            section.lo_phase_points.unwrap_or(64),
            section.signal_amplitude,
            section.lo_amplitude,
        ),
    }
    .map_err(domain)?;
    let signal_phase = section.signal_phase_rad.unwrap_or(0.0);
    let fringe = interference_fringe(&scan, signal_phase);
    let fit = fit_sine(&fringe).map_err(domain)?;

    let text = csv(
        "lo_phase_rad,power",
        fringe.iter().map(|&(p, v)| vec![p, v]),
    );
    let mut report = String::new();
    let _ = writeln!(report, "offset = {}", fmt_f64(fit.offset));
    let _ = writeln!(report, "amplitude = {}", fmt_f64(fit.amplitude));
    let _ = writeln!(report, "phase_rad = {}", fmt_f64(fit.phase_rad));
    let _ = writeln!(report, "rms_residual = {}", fmt_f64(fit.rms_residual));
    let _ = writeln!(report, "visibility = {}", fmt_f64(scan.visibility()));

    Ok(CommandOutput {
        files: vec![
            OutputFile::new("fringe.csv", text),
            OutputFile::new("fringe_fit.toml", report),
        ],
        seed: None,
    })
}

pub fn geo_cmd(loaded: &LoadedConfig) -> Result<CommandOutput, CliError> {
    let section = require(loaded.config.geo.as_ref(), "[geo]")?;
    let files = ProfileFiles {
        u_oz: loaded.resolve(&section.u_oz),
        u_mr: loaded.resolve(&section.u_mr),
        u_mz: loaded.resolve(&section.u_mz),
        eps_ozz: loaded.resolve(&section.eps_ozz),
        eps_mrr: loaded.resolve(&section.eps_mrr),
        eps_mzz: loaded.resolve(&section.eps_mzz),
    };
    let scalars = OverlapScalars {
        r33_m_per_v: section.r33_m_per_v,
        ring_radius_m: section.ring_radius_m,
        omega_o_hz: section.omega_o_hz,
        omega_m_hz: section.omega_m_hz,
    };
    let profiles = load_profile_set(&files, scalars).map_err(domain)?;
    let result = compute_geo(&profiles).map_err(domain)?;

    let mut report = String::new();
    let _ = writeln!(report, "g_eo_hz = {}", fmt_f64(result.g_eo_hz));
    let _ = writeln!(
        report,
        "v_eff_optical_m3 = {}",
        fmt_f64(result.v_eff_optical_m3)
    );
    let _ = writeln!(
        report,
        "v_eff_microwave_m3 = {}",
        fmt_f64(result.v_eff_microwave_m3)
    );
    let _ = writeln!(
        report,
        "overlap_numerator = {}",
        fmt_f64(result.overlap_numerator)
    );
    Ok(CommandOutput {
        files: vec![OutputFile::new("geo_result.toml", report)],
        seed: None,
    })
}
