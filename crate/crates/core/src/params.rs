//! System parameters shared by transmitter, channel, receiver and theory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One operating point of the link.
///
/// Powers (`p_r`) are expressed in the same units as the chip energy `E1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Subcarriers per antenna (power of two, 2..=64).
    pub n: usize,
    /// Constellation order (2, 4, 8 or 16).
    pub m: usize,
    /// Transmit antennas.
    pub nt: usize,
    /// Spreading factor (chips per branch).
    pub beta: usize,
    /// Power-splitting ratio routed to the information decoder.
    pub phi: f64,
    /// Energy-harvesting conversion efficiency.
    pub lambda: f64,
    /// Decode power threshold.
    pub p_r: f64,
    pub ebn0_db: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || !(2..=64).contains(&self.n) {
            return Err(Error::Config(format!(
                "N must be a power of two in 2..=64, got {}",
                self.n
            )));
        }
        if !matches!(self.m, 2 | 4 | 8 | 16) {
            return Err(Error::Config(format!(
                "M must be 2, 4, 8 or 16, got {}",
                self.m
            )));
        }
        if self.nt == 0 {
            return Err(Error::Config(
                "at least one transmit antenna is required".into(),
            ));
        }
        if self.beta < crate::chaos::MIN_BETA || !self.beta.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "beta must be even and >= 8, got {}",
                self.beta
            )));
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return Err(Error::Config(format!(
                "phi must lie in [0, 1], got {}",
                self.phi
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.p_r >= 0.0) || !self.p_r.is_finite() {
            return Err(Error::Config(format!(
                "P_R must be finite and >= 0, got {}",
                self.p_r
            )));
        }
        if self.ebn0_db.is_nan() {
            return Err(Error::Config("Eb/N0 must not be NaN".into()));
        }
        Ok(())
    }

    /// `log2 N`
    pub fn cim_bits(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    /// `log2 M`
    pub fn symbol_bits(&self) -> usize {
        self.m.trailing_zeros() as usize
    }

    /// `log2 N + N log2 M`
    pub fn bits_per_frame(&self) -> usize {
        self.cim_bits() + self.n * self.symbol_bits()
    }

    /// Fraction of frame bits carried by the code index.
    pub fn cim_weight(&self) -> f64 {
        self.cim_bits() as f64 / self.bits_per_frame() as f64
    }

    /// Fraction of frame bits carried by the M-DCSK symbols.
    pub fn mdcsk_weight(&self) -> f64 {
        (self.n * self.symbol_bits()) as f64 / self.bits_per_frame() as f64
    }

    /// Energy per bit `2 N E1 / (log2 N + N log2 M)`.
    pub fn eb(&self, e1: f64) -> f64 {
        2.0 * self.n as f64 * e1 / self.bits_per_frame() as f64
    }

    pub fn ebn0_linear(&self) -> f64 {
        10f64.powf(self.ebn0_db / 10.0)
    }

    /// Noise spectral density; zero at infinite Eb/N0.
    pub fn n0(&self, e1: f64) -> f64 {
        if self.ebn0_db == f64::INFINITY {
            0.0
        } else {
            self.eb(e1) / self.ebn0_linear()
        }
    }

    /// `P_R = fraction * 2 N E1`.
    pub fn decode_threshold(n: usize, e1: f64, fraction: f64) -> f64 {
        fraction * 2.0 * n as f64 * e1
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            n: 4,
            m: 4,
            nt: 2,
            beta: 160,
            phi: 0.5,
            lambda: 0.5,
            p_r: 2.0 * 4.0 * 80.0 / 100.0,
            ebn0_db: 20.0,
        }
    }
}
