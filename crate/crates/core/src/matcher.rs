//! Vernier-effect resonance pairing and DC-voltage solving for simultaneous
//! intra-cavity and inter-cavity frequency matching of a transducer pair.
//!
//! Two combs with slightly different free spectral ranges realign with a
//! period of `FSR²/ΔFSR`; within one period the best pair mismatch is
//! bounded by `ΔFSR/2`. The voltage solver then closes the remaining gap by
//! shifting the bare ring frequencies through the linear tuning model.

use crate::constants::MATCHING_RESIDUAL_TOLERANCE_HZ;
use crate::error::{Error, Result};
use crate::linalg::solve3;
use crate::transducer::{hybridize, RingPairSpec, TransducerSpec};

/// Linear voltage-to-frequency tuning with one coefficient per ring and a
/// shared allowed voltage window.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningModel {
    alpha_1_hz_per_v: f64,
    alpha_2_hz_per_v: f64,
    v_min_v: f64,
    v_max_v: f64,
}

impl TuningModel {
    pub fn new(
        alpha_1_hz_per_v: f64,
        alpha_2_hz_per_v: f64,
        v_min_v: f64,
        v_max_v: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("alpha_1", alpha_1_hz_per_v),
            ("alpha_2", alpha_2_hz_per_v),
            ("v_min", v_min_v),
            ("v_max", v_max_v),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite, got {v}")));
            }
        }
        if v_min_v >= v_max_v {
            return Err(Error::invalid(format!(
                "voltage window is empty: [{v_min_v}, {v_max_v}]"
            )));
        }
        Ok(Self {
            alpha_1_hz_per_v,
            alpha_2_hz_per_v,
            v_min_v,
            v_max_v,
        })
    }

    pub fn alpha_1_hz_per_v(&self) -> f64 {
        self.alpha_1_hz_per_v
    }

    pub fn alpha_2_hz_per_v(&self) -> f64 {
        self.alpha_2_hz_per_v
    }

    pub fn v_min_v(&self) -> f64 {
        self.v_min_v
    }

    pub fn v_max_v(&self) -> f64 {
        self.v_max_v
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.v_min_v && v <= self.v_max_v
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.v_min_v, self.v_max_v)
    }
}

/// A comb of resonances: line `k` sits at `anchor + k·FSR` for `k` in the
/// inclusive index range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceComb {
    anchor_hz: f64,
    fsr_hz: f64,
    k_min: i64,
    k_max: i64,
}

impl ResonanceComb {
    pub fn new(anchor_hz: f64, fsr_hz: f64, k_min: i64, k_max: i64) -> Result<Self> {
        if !anchor_hz.is_finite() || anchor_hz <= 0.0 {
            return Err(Error::invalid("comb anchor must be positive"));
        }
        if !fsr_hz.is_finite() || fsr_hz <= 0.0 {
            return Err(Error::invalid("comb FSR must be positive"));
        }
        if k_min > k_max {
            return Err(Error::invalid("comb index range is empty"));
        }
        Ok(Self {
            anchor_hz,
            fsr_hz,
            k_min,
            k_max,
        })
    }

    /// Comb whose index range exactly covers `[lo_hz, hi_hz]`.
    pub fn covering(anchor_hz: f64, fsr_hz: f64, lo_hz: f64, hi_hz: f64) -> Result<Self> {
        if fsr_hz.is_nan() || fsr_hz <= 0.0 {
            return Err(Error::invalid("comb FSR must be positive"));
        }
        let k_min = ((lo_hz - anchor_hz) / fsr_hz).ceil() as i64;
        let k_max = ((hi_hz - anchor_hz) / fsr_hz).floor() as i64;
        if k_min > k_max {
            return Err(Error::NoCandidates);
        }
        Self::new(anchor_hz, fsr_hz, k_min, k_max)
    }

    pub fn anchor_hz(&self) -> f64 {
        self.anchor_hz
    }

    pub fn fsr_hz(&self) -> f64 {
        self.fsr_hz
    }

    pub fn index_range(&self) -> (i64, i64) {
        (self.k_min, self.k_max)
    }

    pub fn line_hz(&self, k: i64) -> f64 {
        self.anchor_hz + k as f64 * self.fsr_hz
    }

    /// Lines inside `[lo, hi]`, ascending.
    pub fn lines_in(&self, lo_hz: f64, hi_hz: f64) -> Vec<(i64, f64)> {
        let k_lo = (((lo_hz - self.anchor_hz) / self.fsr_hz).ceil() as i64).max(self.k_min);
        let k_hi = (((hi_hz - self.anchor_hz) / self.fsr_hz).floor() as i64).min(self.k_max);
        (k_lo..=k_hi)
            .map(|k| (k, self.line_hz(k)))
            .filter(|&(_, f)| f >= lo_hz && f <= hi_hz)
            .collect()
    }
}

/// Best-matching comb-line pair inside a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub k_a: i64,
    pub k_b: i64,
    /// Signed mismatch `f_a(k_a) − f_b(k_b)`.
    pub mismatch_hz: f64,
}

/// Ordering key: smallest |mismatch| first, ties broken toward the pair
/// centre closest to the window centre, then toward lower frequency, then
/// lower indices. Shared by the search and by brute-force checks.
type PairKey = (f64, f64, f64, i64, i64);

fn pair_key(f_a: f64, f_b: f64, k_a: i64, k_b: i64, window_center: f64) -> PairKey {
    let mismatch = (f_a - f_b).abs();
    let center = 0.5 * (f_a + f_b);
    (mismatch, (center - window_center).abs(), center, k_a, k_b)
}

fn key_less(a: &PairKey, b: &PairKey) -> bool {
    (a.0, a.1, a.2, a.3, a.4) < (b.0, b.1, b.2, b.3, b.4)
}

/// Find the comb-line pair with the smallest |mismatch| inside the window.
/// When the window spans a full Vernier period the result is bounded by
/// ΔFSR/2. For each line of `comb_a` only its nearest neighbours in
/// `comb_b` can achieve the global minimum, so the scan is linear in the
/// line count.
pub fn find_matched_pair(
    comb_a: &ResonanceComb,
    comb_b: &ResonanceComb,
    window_hz: (f64, f64),
) -> Result<MatchedPair> {
    let (lo, hi) = window_hz;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        // a degenerate range is an empty window, same as one with no lines
        return Err(Error::NoCandidates);
    }
    let lines_a = comb_a.lines_in(lo, hi);
    let lines_b = comb_b.lines_in(lo, hi);
    if lines_a.is_empty() || lines_b.is_empty() {
        return Err(Error::NoCandidates);
    }
    let window_center = 0.5 * (lo + hi);

    let mut best: Option<(PairKey, MatchedPair)> = None;
    for &(k_a, f_a) in &lines_a {
        // nearest b-lines around f_a: the partition point and its neighbour
        let idx = lines_b.partition_point(|&(_, f)| f < f_a);
        for j in [idx.wrapping_sub(1), idx] {
            if let Some(&(k_b, f_b)) = lines_b.get(j) {
                let key = pair_key(f_a, f_b, k_a, k_b, window_center);
                let pair = MatchedPair {
                    k_a,
                    k_b,
                    mismatch_hz: f_a - f_b,
                };
                match &best {
                    Some((best_key, _)) if !key_less(&key, best_key) => {}
                    _ => best = Some((key, pair)),
                }
            }
        }
    }
    Ok(best.expect("non-empty candidate lists").1)
}

/// Vernier realignment period `FSR²/|ΔFSR|`.
pub fn vernier_period(fsr_a_hz: f64, delta_fsr_hz: f64) -> Result<f64> {
    if fsr_a_hz.is_nan() || fsr_a_hz <= 0.0 {
        return Err(Error::invalid("FSR must be positive"));
    }
    if delta_fsr_hz == 0.0 {
        return Err(Error::DegenerateVernier);
    }
    Ok(fsr_a_hz * fsr_a_hz / delta_fsr_hz.abs())
}

/// Hybridized frequencies after applying DC voltages through the tuning
/// model: `ω₁ → ω₁ + α₁·v₁`, `ω₂ → ω₂ + α₂·v₂`.
pub fn tuned_frequencies(
    ring_pair: &RingPairSpec,
    tuning: &TuningModel,
    v1: f64,
    v2: f64,
) -> Result<(f64, f64)> {
    for v in [v1, v2] {
        if !tuning.contains(v) {
            return Err(Error::VoltageOutOfRange {
                voltage_v: v,
                v_min_v: tuning.v_min_v,
                v_max_v: tuning.v_max_v,
            });
        }
    }
    let shifted = ring_pair.shifted(tuning.alpha_1_hz_per_v * v1, tuning.alpha_2_hz_per_v * v2)?;
    let h = hybridize(&shifted);
    Ok((h.omega_plus_hz, h.omega_minus_hz))
}

/// DC voltages per transducer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceVoltages {
    pub ring_1_v: f64,
    pub ring_2_v: f64,
}

/// Matching residuals in Hz: each device's intra-cavity residual
/// `ω_m − (ω₊ − ω₋)` plus the inter-cavity residual `ω₊,a − ω₊,b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResiduals {
    pub intra_a_hz: f64,
    pub intra_b_hz: f64,
    pub inter_hz: f64,
}

impl MatchResiduals {
    pub fn max_abs_hz(&self) -> f64 {
        self.intra_a_hz
            .abs()
            .max(self.intra_b_hz.abs())
            .max(self.inter_hz.abs())
    }
}

/// Solved voltage operating point for a transducer pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchSolution {
    pub voltages_a: DeviceVoltages,
    pub voltages_b: DeviceVoltages,
    pub residuals: MatchResiduals,
}

/// Full Vernier plan: the chosen resonance pair, its pre-tuning mismatch,
/// the comb realignment period, and the solved voltages with residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VernierPlan {
    pub pair_indices: (i64, i64),
    pub mismatch_hz: f64,
    pub vernier_period_hz: f64,
    pub voltages_a: DeviceVoltages,
    pub voltages_b: DeviceVoltages,
    pub residuals: MatchResiduals,
}

struct MatchProblem<'a> {
    ring_a: &'a RingPairSpec,
    tuning_a: &'a TuningModel,
    fm_a: f64,
    ring_b: &'a RingPairSpec,
    tuning_b: &'a TuningModel,
    fm_b: f64,
}

impl MatchProblem<'_> {
    fn residuals(&self, x: &[f64; 4]) -> [f64; 3] {
        let (plus_a, minus_a) = ring_at(self.ring_a, self.tuning_a, x[0], x[1]);
        let (plus_b, minus_b) = ring_at(self.ring_b, self.tuning_b, x[2], x[3]);
        [
            self.fm_a - (plus_a - minus_a),
            self.fm_b - (plus_b - minus_b),
            plus_a - plus_b,
        ]
    }

    /// Analytic Jacobian of the residual vector. With
    /// `d = (ω₁ − ω₂)/2` and `s = √(g² + d²)`:
    /// ∂ω₊/∂ω₁ = 1/2 + d/(2s), ∂ω₊/∂ω₂ = 1/2 − d/(2s), splitting slope d/s.
    fn jacobian(&self, x: &[f64; 4]) -> [[f64; 4]; 3] {
        let (da, sa) = half_detune(self.ring_a, self.tuning_a, x[0], x[1]);
        let (db, sb) = half_detune(self.ring_b, self.tuning_b, x[2], x[3]);
        let (a1, a2) = (
            self.tuning_a.alpha_1_hz_per_v,
            self.tuning_a.alpha_2_hz_per_v,
        );
        let (b1, b2) = (
            self.tuning_b.alpha_1_hz_per_v,
            self.tuning_b.alpha_2_hz_per_v,
        );
        let ra = da / sa;
        let rb = db / sb;
        [
            [-a1 * ra, a2 * ra, 0.0, 0.0],
            [0.0, 0.0, -b1 * rb, b2 * rb],
            [
                a1 * 0.5 * (1.0 + ra),
                a2 * 0.5 * (1.0 - ra),
                -b1 * 0.5 * (1.0 + rb),
                -b2 * 0.5 * (1.0 - rb),
            ],
        ]
    }
}

fn ring_at(ring: &RingPairSpec, tuning: &TuningModel, v1: f64, v2: f64) -> (f64, f64) {
    let w1 = ring.omega_1_hz() + tuning.alpha_1_hz_per_v * v1;
    let w2 = ring.omega_2_hz() + tuning.alpha_2_hz_per_v * v2;
    let mean = 0.5 * (w1 + w2);
    let d = 0.5 * (w1 - w2);
    let s = (ring.g_c_hz() * ring.g_c_hz() + d * d).sqrt();
    (mean + s, mean - s)
}

fn half_detune(ring: &RingPairSpec, tuning: &TuningModel, v1: f64, v2: f64) -> (f64, f64) {
    let w1 = ring.omega_1_hz() + tuning.alpha_1_hz_per_v * v1;
    let w2 = ring.omega_2_hz() + tuning.alpha_2_hz_per_v * v2;
    let d = 0.5 * (w1 - w2);
    let s = (ring.g_c_hz() * ring.g_c_hz() + d * d).sqrt();
    (d, s)
}

fn norm2(r: &[f64; 3]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>()
}

/// Solve for DC voltages realizing both intra-cavity matching on each device
/// and inter-cavity matching across them. Damped minimum-norm Gauss–Newton
/// over the four voltages (three residuals, underdetermined) starting from
/// zero, which selects the smallest-voltage solution. Voltages stay clamped
/// to each tuning window; if the clamped optimum still exceeds the 1 kHz
/// tolerance the call fails with the best residuals attached.
pub fn solve_matching(a: &TransducerSpec, b: &TransducerSpec) -> Result<MatchSolution> {
    let problem = MatchProblem {
        ring_a: a.ring_pair(),
        tuning_a: a.tuning(),
        fm_a: a.microwave().frequency_hz(),
        ring_b: b.ring_pair(),
        tuning_b: b.tuning(),
        fm_b: b.microwave().frequency_hz(),
    };

    let clamp = |x: &[f64; 4]| -> [f64; 4] {
        [
            problem.tuning_a.clamp(x[0]),
            problem.tuning_a.clamp(x[1]),
            problem.tuning_b.clamp(x[2]),
            problem.tuning_b.clamp(x[3]),
        ]
    };

    let mut x = clamp(&[0.0; 4]);
    let mut r = problem.residuals(&x);
    let stop_tol = 1e-6; // Hz; far below the success tolerance
    let mut lambda = 0.0f64;

    for _ in 0..200 {
        if r.iter().all(|v| v.abs() < stop_tol) {
            break;
        }
        let j = problem.jacobian(&x);
        // Normal matrix of the minimum-norm step: (J Jᵀ + λ diag) y = r,
        // step = −Jᵀ y keeps iterates in the row space of J.
        let mut jjt = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                jjt[i][k] = (0..4).map(|c| j[i][c] * j[k][c]).sum();
            }
        }
        let diag_max = (0..3).map(|i| jjt[i][i]).fold(0.0f64, f64::max);

        let mut improved = false;
        for _ in 0..60 {
            let mut m = jjt;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * diag_max.max(f64::MIN_POSITIVE);
            }
            if let Some(y) = solve3(m, r) {
                let mut candidate = x;
                for c in 0..4 {
                    let step: f64 = (0..3).map(|i| j[i][c] * y[i]).sum();
                    candidate[c] -= step;
                }
                let candidate = clamp(&candidate);
                let r_new = problem.residuals(&candidate);
                if norm2(&r_new) < norm2(&r) {
                    x = candidate;
                    r = r_new;
                    lambda = (lambda / 3.0).max(0.0);
                    improved = true;
                    break;
                }
            }
            lambda = if lambda == 0.0 { 1e-12 } else { lambda * 10.0 };
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }

    let residuals = MatchResiduals {
        intra_a_hz: r[0],
        intra_b_hz: r[1],
        inter_hz: r[2],
    };
    let solution = MatchSolution {
        voltages_a: DeviceVoltages {
            ring_1_v: x[0],
            ring_2_v: x[1],
        },
        voltages_b: DeviceVoltages {
            ring_1_v: x[2],
            ring_2_v: x[3],
        },
        residuals,
    };
    if residuals.max_abs_hz() < MATCHING_RESIDUAL_TOLERANCE_HZ {
        Ok(solution)
    } else {
        Err(Error::InfeasibleMatching {
            intra_a_hz: residuals.intra_a_hz,
            intra_b_hz: residuals.intra_b_hz,
            inter_hz: residuals.inter_hz,
        })
    }
}

/// Full planning pass: search the window for the best Vernier pair, re-anchor
/// both devices to the chosen comb lines, then solve the voltages.
pub fn plan_matching(
    a: &TransducerSpec,
    b: &TransducerSpec,
    window_hz: (f64, f64),
) -> Result<VernierPlan> {
    let anchor_a = hybridize(a.ring_pair()).omega_plus_hz;
    let anchor_b = hybridize(b.ring_pair()).omega_plus_hz;
    let fsr_a = a.ring_pair().fsr_hz();
    let fsr_b = b.ring_pair().fsr_hz();
    let comb_a = ResonanceComb::covering(anchor_a, fsr_a, window_hz.0, window_hz.1)?;
    let comb_b = ResonanceComb::covering(anchor_b, fsr_b, window_hz.0, window_hz.1)?;

    let pair = find_matched_pair(&comb_a, &comb_b, window_hz)?;
    let period = vernier_period(fsr_a, fsr_a - fsr_b)?;

    let shift_a = pair.k_a as f64 * fsr_a;
    let shift_b = pair.k_b as f64 * fsr_b;
    let a_shifted = a.with_ring_pair(a.ring_pair().shifted(shift_a, shift_a)?);
    let b_shifted = b.with_ring_pair(b.ring_pair().shifted(shift_b, shift_b)?);
    let solution = solve_matching(&a_shifted, &b_shifted)?;

    Ok(VernierPlan {
        pair_indices: (pair.k_a, pair.k_b),
        mismatch_hz: pair.mismatch_hz,
        vernier_period_hz: period,
        voltages_a: solution.voltages_a,
        voltages_b: solution.voltages_b,
        residuals: solution.residuals,
    })
}
