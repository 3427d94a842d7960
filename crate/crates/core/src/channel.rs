//! Multipath block-fading channel, power splitter and receiver noise.
//!
//! Each antenna reaches the receiver through its own tapped delay line with
//! integer chip delays. Taps are redrawn every frame. Chips that a delayed path
//! pulls from before the start of the frame come from a [`ChipHistory`] holding
//! the tail of the previous frame, so inter-frame interference is simulated.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::tx::TxFrame;

/// One path of an antenna's power-delay profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    /// Mean power `E[alpha^2]`.
    pub power: f64,
    /// Delay in chips.
    pub delay: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fading {
    /// Rayleigh amplitudes with the profile's mean powers.
    #[default]
    Rayleigh,
    /// Deterministic amplitudes `sqrt(power)`; used for sanity runs.
    Static,
}

/// Per-antenna power-delay profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelProfile {
    pub antennas: Vec<Vec<PathSpec>>,
    #[serde(default)]
    pub fading: Fading,
}

const TABLE1: [[(f64, usize); 3]; 4] = [
    [(0.7, 0), (0.2, 2), (0.1, 5)],
    [(0.6, 0), (0.25, 3), (0.15, 6)],
    [(0.8, 0), (0.12, 1), (0.08, 2)],
    [(0.28, 0), (0.42, 2), (0.3, 4)],
];

impl ChannelProfile {
    /// The four-antenna, three-path reference profile (preset `table1`).
    pub fn table1() -> Self {
        ChannelProfile {
            antennas: TABLE1
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&(power, delay)| PathSpec { power, delay })
                        .collect()
                })
                .collect(),
            fading: Fading::Rayleigh,
        }
    }

    /// `nt` antennas each with a single undelayed unit-power path.
    pub fn flat(nt: usize, fading: Fading) -> Self {
        ChannelProfile {
            antennas: vec![
                vec![PathSpec {
                    power: 1.0,
                    delay: 0
                }];
                nt
            ],
            fading,
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "table1" => Ok(Self::table1()),
            "flat" => Ok(Self::flat(4, Fading::Rayleigh)),
            "awgn" => Ok(Self::flat(4, Fading::Static)),
            other => Err(Error::Config(format!("unknown channel preset '{other}'"))),
        }
    }

    pub fn antenna_count(&self) -> usize {
        self.antennas.len()
    }

    /// The first `nt` antennas.
    pub fn truncated(&self, nt: usize) -> Result<Self> {
        if nt == 0 || nt > self.antennas.len() {
            return Err(Error::Config(format!(
                "profile has {} antennas, {nt} requested",
                self.antennas.len()
            )));
        }
        Ok(ChannelProfile {
            antennas: self.antennas[..nt].to_vec(),
            fading: self.fading,
        })
    }

    pub fn max_delay(&self) -> usize {
        self.antennas
            .iter()
            .flatten()
            .map(|p| p.delay)
            .max()
            .unwrap_or(0)
    }

    /// Structural checks. With `beta` given, the largest delay must not exceed `beta / 8`.
    pub fn validate(&self, beta: Option<usize>) -> Result<()> {
        if self.antennas.is_empty() || self.antennas.iter().any(|a| a.is_empty()) {
            return Err(Error::Config(
                "every antenna needs at least one path".into(),
            ));
        }
        for (t, paths) in self.antennas.iter().enumerate() {
            if paths
                .iter()
                .any(|p| !(p.power >= 0.0) || !p.power.is_finite())
            {
                return Err(Error::Config(format!(
                    "antenna {t}: path powers must be finite and >= 0"
                )));
            }
            if paths.windows(2).any(|w| w[1].delay <= w[0].delay) {
                return Err(Error::Config(format!(
                    "antenna {t}: delays must be strictly increasing"
                )));
            }
        }
        if let Some(beta) = beta {
            if self.max_delay() > beta / 8 {
                return Err(Error::Config(format!(
                    "max delay {} exceeds beta/8 = {}",
                    self.max_delay(),
                    beta / 8
                )));
            }
        }
        Ok(())
    }

    /// True when each antenna's path powers sum to one.
    pub fn is_normalized(&self) -> bool {
        self.antennas
            .iter()
            .all(|a| (a.iter().map(|p| p.power).sum::<f64>() - 1.0).abs() < 1e-9)
    }

    /// `E[alpha^2] / N_t` for every path, antenna-major order.
    pub fn harvest_means(&self) -> Vec<f64> {
        let nt = self.antennas.len() as f64;
        self.antennas
            .iter()
            .flatten()
            .map(|p| p.power / nt)
            .collect()
    }

    /// `sum over antennas and paths of E[alpha^2] / N_t`.
    pub fn mean_gain(&self) -> f64 {
        self.harvest_means().iter().sum()
    }
}

/// Tap amplitudes for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<Vec<f64>>,
    pub delays: Vec<Vec<usize>>,
}

impl ChannelRealization {
    /// Fixed amplitudes `sqrt(power)`.
    pub fn deterministic(profile: &ChannelProfile) -> Self {
        ChannelRealization {
            gains: profile
                .antennas
                .iter()
                .map(|a| a.iter().map(|p| p.power.sqrt()).collect())
                .collect(),
            delays: profile
                .antennas
                .iter()
                .map(|a| a.iter().map(|p| p.delay).collect())
                .collect(),
        }
    }

    pub fn antennas(&self) -> usize {
        self.gains.len()
    }

    pub fn max_delay(&self) -> usize {
        self.delays.iter().flatten().copied().max().unwrap_or(0)
    }

    /// `(1/N_t) sum alpha^2`
    pub fn normalized_gain(&self) -> f64 {
        let sum: f64 = self.gains.iter().flatten().map(|a| a * a).sum();
        sum / self.gains.len() as f64
    }

    /// `sum_l alpha_l^2` for one antenna.
    pub fn antenna_gain(&self, antenna: usize) -> f64 {
        self.gains[antenna].iter().map(|a| a * a).sum()
    }
}

/// Draws independent tap amplitudes; Rayleigh with `E[alpha^2]` equal to the
/// path's mean power unless the profile is static.
pub fn draw_realization<R: Rng + ?Sized>(
    profile: &ChannelProfile,
    rng: &mut R,
) -> ChannelRealization {
    let mut real = ChannelRealization::deterministic(profile);
    if profile.fading == Fading::Rayleigh {
        for (gains, paths) in real.gains.iter_mut().zip(&profile.antennas) {
            for (g, p) in gains.iter_mut().zip(paths) {
                let e: f64 = Exp1.sample(rng);
                *g = (p.power * e).sqrt();
            }
        }
    }
    real
}

/// Tail of the previously transmitted frame, per antenna, subcarrier and branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipHistory {
    nt: usize,
    n: usize,
    depth: usize,
    reference: Vec<f64>,
    data: Vec<f64>,
}

impl ChipHistory {
    /// All-zero history (start of stream).
    pub fn new(nt: usize, n: usize, depth: usize) -> Self {
        ChipHistory {
            nt,
            n,
            depth,
            reference: vec![0.0; nt * n * depth],
            data: vec![0.0; nt * n * depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn slot(&self, antenna: usize, sub: usize) -> std::ops::Range<usize> {
        let start = (antenna * self.n + sub) * self.depth;
        start..start + self.depth
    }

    fn store(&mut self, tx: &TxFrame) {
        let beta = tx.beta();
        let depth = self.depth.min(beta);
        for t in 0..self.nt {
            for i in 0..self.n {
                let slot = self.slot(t, i);
                let dst = &mut self.reference[slot.clone()];
                dst[self.depth - depth..].copy_from_slice(&tx.reference(t, i)[beta - depth..]);
                let dst = &mut self.data[slot];
                dst[self.depth - depth..].copy_from_slice(&tx.data(t, i)[beta - depth..]);
            }
        }
    }
}

/// Information-branch samples after power splitting and matched filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    n: usize,
    beta: usize,
    reference: Vec<f64>,
    data: Vec<f64>,
    /// Noise-free energy of the harvester copy, `(1 - phi) * sum r_k^2`.
    pub harvester_energy: f64,
}

impl ReceivedFrame {
    pub fn zeros(n: usize, beta: usize) -> Self {
        ReceivedFrame {
            n,
            beta,
            reference: vec![0.0; n * beta],
            data: vec![0.0; n * beta],
            harvester_energy: 0.0,
        }
    }

    /// Builds a frame from explicit per-subcarrier branches.
    pub fn from_branches(reference: Vec<Vec<f64>>, data: Vec<Vec<f64>>) -> Result<Self> {
        let n = reference.len();
        if n == 0 || data.len() != n {
            return Err(Error::Config(
                "reference and data branch counts differ".into(),
            ));
        }
        let beta = reference[0].len();
        if reference.iter().chain(&data).any(|b| b.len() != beta) {
            return Err(Error::Config("all branches must share one length".into()));
        }
        Ok(ReceivedFrame {
            n,
            beta,
            reference: reference.concat(),
            data: data.concat(),
            harvester_energy: 0.0,
        })
    }

    pub fn subcarriers(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn reference(&self, sub: usize) -> &[f64] {
        &self.reference[sub * self.beta..(sub + 1) * self.beta]
    }

    pub fn data(&self, sub: usize) -> &[f64] {
        &self.data[sub * self.beta..(sub + 1) * self.beta]
    }

    pub fn reference_mut(&mut self, sub: usize) -> &mut [f64] {
        &mut self.reference[sub * self.beta..(sub + 1) * self.beta]
    }

    pub fn data_mut(&mut self, sub: usize) -> &mut [f64] {
        &mut self.data[sub * self.beta..(sub + 1) * self.beta]
    }

    /// Multiplies every sample by `c`.
    pub fn scale(&mut self, c: f64) {
        self.reference
            .iter_mut()
            .chain(self.data.iter_mut())
            .for_each(|v| *v *= c);
    }

    /// Sum of squared samples on both branches.
    pub fn energy(&self) -> f64 {
        self.reference.iter().chain(&self.data).map(|v| v * v).sum()
    }
}

fn convolve_into(out: &mut [f64], chips: &[f64], tail: &[f64], gain: f64, delay: usize) {
    let depth = tail.len();
    for (k, o) in out.iter_mut().enumerate() {
        let v = if k >= delay {
            chips[k - delay]
        } else {
            tail[depth + k - delay]
        };
        *o += gain * v;
    }
}

/// Passes one frame through the channel.
///
/// Received chip `k` on each branch is
/// `sqrt(phi) * sum_t sum_l alpha_tl * x_t[k - tau_tl] + n_k` with `n_k` i.i.d.
/// `N(0, n0/2)` on the information branch only. The history is updated with
/// the tail of `tx`.
pub fn propagate<R: Rng + ?Sized>(
    tx: &TxFrame,
    real: &ChannelRealization,
    history: &mut ChipHistory,
    params: &SystemParams,
    n0: f64,
    rng: &mut R,
) -> Result<ReceivedFrame> {
    let (nt, n, beta) = (tx.antennas(), tx.subcarriers(), tx.beta());
    if real.antennas() != nt {
        return Err(Error::Config(format!(
            "realization has {} antennas, frame has {nt}",
            real.antennas()
        )));
    }
    if history.nt != nt || history.n != n {
        return Err(Error::State(format!(
            "history shaped for {}x{}, frame is {nt}x{n}",
            history.nt, history.n
        )));
    }
    if history.depth < real.max_delay() {
        return Err(Error::State(format!(
            "history holds {} chips, channel needs {}",
            history.depth,
            real.max_delay()
        )));
    }
    if real.max_delay() > beta {
        return Err(Error::Config(format!(
            "delay {} exceeds beta {beta}",
            real.max_delay()
        )));
    }

    let mut rx = ReceivedFrame::zeros(n, beta);
    for t in 0..nt {
        for (&g, &tau) in real.gains[t].iter().zip(&real.delays[t]) {
            if g == 0.0 {
                continue;
            }
            for i in 0..n {
                let slot = history.slot(t, i);
                convolve_into(
                    rx.reference_mut(i),
                    tx.reference(t, i),
                    &history.reference[slot.clone()],
                    g,
                    tau,
                );
                convolve_into(rx.data_mut(i), tx.data(t, i), &history.data[slot], g, tau);
            }
        }
    }
    let signal_energy = rx.energy();
    rx.harvester_energy = (1.0 - params.phi) * signal_energy;
    rx.scale(params.phi.sqrt());

    if n0 > 0.0 {
        let sigma = (n0 / 2.0).sqrt();
        for v in rx.reference.iter_mut().chain(rx.data.iter_mut()) {
            let z: f64 = StandardNormal.sample(rng);
            *v += sigma * z;
        }
    }
    history.store(tx);
    Ok(rx)
}

/// Linear harvester output `2 N E1 lambda (1 - phi) / N_t * sum alpha^2`.
pub fn harvested_power(real: &ChannelRealization, params: &SystemParams, e1: f64) -> f64 {
    2.0 * params.n as f64 * e1 * params.lambda * (1.0 - params.phi) * real.normalized_gain()
}

/// Harvester output when each antenna's sequence has its own energy.
pub fn harvested_power_per_antenna(
    real: &ChannelRealization,
    params: &SystemParams,
    energies: &[f64],
) -> f64 {
    let nt = real.antennas() as f64;
    let weighted: f64 = energies
        .iter()
        .enumerate()
        .map(|(t, e)| e * real.antenna_gain(t))
        .sum();
    2.0 * params.n as f64 * params.lambda * (1.0 - params.phi) * weighted / nt
}
