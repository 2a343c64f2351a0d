//! Symmetric frequency sampling grids.

use crate::error::{Error, Result};

/// A symmetric frequency grid: `points` samples centred on `center_hz`,
/// spanning `span_hz` end to end. The point count is odd so that the centre
/// frequency itself is sampled, which keeps on-resonance peak values exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    center_hz: f64,
    span_hz: f64,
    points: usize,
}

impl FrequencyGrid {
    pub fn new(center_hz: f64, span_hz: f64, points: usize) -> Result<Self> {
        if !center_hz.is_finite() {
            return Err(Error::invalid("grid center must be finite"));
        }
        if !span_hz.is_finite() || span_hz <= 0.0 {
            return Err(Error::invalid(format!(
                "grid span must be positive and finite, got {span_hz}"
            )));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "grid needs an odd point count of at least 3, got {points}"
            )));
        }
        Ok(Self {
            center_hz,
            span_hz,
            points,
        })
    }

    pub fn center_hz(&self) -> f64 {
        self.center_hz
    }

    pub fn span_hz(&self) -> f64 {
        self.span_hz
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Sample spacing.
    pub fn step_hz(&self) -> f64 {
        self.span_hz / (self.points - 1) as f64
    }

    /// Detunings from the grid centre. Exactly antisymmetric, with a zero at
    /// the midpoint: sample `i` sits at `(i - mid) * step`.
    pub fn detunings_hz(&self) -> Vec<f64> {
        let mid = (self.points / 2) as i64;
        let step = self.step_hz();
        (0..self.points as i64)
            .map(|i| (i - mid) as f64 * step)
            .collect()
    }

    /// Absolute frequencies of the samples.
    pub fn frequencies_hz(&self) -> Vec<f64> {
        self.detunings_hz()
            .into_iter()
            .map(|d| self.center_hz + d)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_is_sampled_exactly() {
        let g = FrequencyGrid::new(9.96e9, 4e8, 2001).unwrap();
        let d = g.detunings_hz();
        assert_eq!(d[1000], 0.0);
        assert_eq!(d.len(), 2001);
        // exact antisymmetry
        for i in 0..d.len() {
            assert_eq!(d[i], -d[d.len() - 1 - i]);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(FrequencyGrid::new(1e9, 0.0, 11).is_err());
        assert!(FrequencyGrid::new(1e9, 1e6, 10).is_err());
        assert!(FrequencyGrid::new(1e9, 1e6, 1).is_err());
        assert!(FrequencyGrid::new(f64::NAN, 1e6, 11).is_err());
    }

    #[test]
    fn span_covers_endpoints() {
        let g = FrequencyGrid::new(0.0, 1e6, 5).unwrap();
        let f = g.frequencies_hz();
        assert_eq!(f[0], -5e5);
        assert_eq!(f[4], 5e5);
    }
}
