//! Non-coherent receiver: code-index detection, reference recovery,
//! differential M-ary detection and energy-shortage bookkeeping.

use serde::{Deserialize, Serialize};

use crate::channel::{harvested_power, ChannelRealization, ReceivedFrame};
use crate::constellation::{constellation, Constellation};
use crate::error::{Error, Result};
use crate::hilbert::HilbertTransformer;
use crate::params::SystemParams;
use crate::tx::{symbols_to_bits, FrameSymbols};
use crate::walsh::{walsh, WalshMatrix};

/// Energy of the received reference block despread by each Walsh row.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMetrics {
    pub z_e: Vec<f64>,
}

impl EnergyMetrics {
    /// Index of the largest metric; ties go to the smaller index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.z_e.iter().enumerate().skip(1) {
            if v > self.z_e[best] {
                best = j;
            }
        }
        best
    }
}

fn check_walsh(rx: &ReceivedFrame, walsh: &WalshMatrix) -> Result<()> {
    if walsh.order() != rx.subcarriers() {
        return Err(Error::Config(format!(
            "Walsh order {} for {} subcarriers",
            walsh.order(),
            rx.subcarriers()
        )));
    }
    Ok(())
}

/// Computes `z_e[j] = sum_k (sum_i w[j][i] * r_i[k])^2` and picks the largest.
pub fn cim_detect(rx: &ReceivedFrame, walsh: &WalshMatrix) -> Result<(usize, EnergyMetrics)> {
    check_walsh(rx, walsh)?;
    let mut z_e = vec![0.0; walsh.order()];
    let mut acc = vec![0.0; rx.beta()];
    for (j, z) in z_e.iter_mut().enumerate() {
        acc.iter_mut().for_each(|v| *v = 0.0);
        for (i, &w) in walsh.row(j).iter().enumerate() {
            let w = w as f64;
            for (a, &r) in acc.iter_mut().zip(rx.reference(i)) {
                *a += w * r;
            }
        }
        *z = acc.iter().map(|v| v * v).sum();
    }
    let metrics = EnergyMetrics { z_e };
    Ok((metrics.argmax(), metrics))
}

/// How the receiver rebuilds the chaotic reference from the `N` reference branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMode {
    /// Use the first subcarrier's branch (its Walsh entry is +1 for every row).
    #[default]
    FirstSubcarrier,
    /// Average all branches despread by the detected Walsh row.
    Despread,
}

impl std::fmt::Display for ReferenceMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReferenceMode::FirstSubcarrier => "first-subcarrier",
            ReferenceMode::Despread => "despread",
        })
    }
}

impl std::str::FromStr for ReferenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-subcarrier" | "first" => Ok(ReferenceMode::FirstSubcarrier),
            "despread" => Ok(ReferenceMode::Despread),
            other => Err(Error::Parse(format!("unknown reference mode '{other}'"))),
        }
    }
}

/// Recovered reference and its quadrature companion.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredReference {
    pub inphase: Vec<f64>,
    pub quadrature: Vec<f64>,
}

pub fn recover_reference(
    rx: &ReceivedFrame,
    s0_hat: usize,
    walsh: &WalshMatrix,
    mode: ReferenceMode,
    hilbert: &mut HilbertTransformer,
) -> Result<RecoveredReference> {
    check_walsh(rx, walsh)?;
    if s0_hat >= walsh.order() {
        return Err(Error::Config(format!("code index {s0_hat} out of range")));
    }
    let inphase = match mode {
        ReferenceMode::FirstSubcarrier => {
            let w = walsh.get(s0_hat, 0) as f64;
            rx.reference(0).iter().map(|r| w * r).collect()
        }
        ReferenceMode::Despread => {
            let n = rx.subcarriers();
            let mut acc = vec![0.0; rx.beta()];
            for (i, &w) in walsh.row(s0_hat).iter().enumerate() {
                let w = w as f64 / n as f64;
                for (a, &r) in acc.iter_mut().zip(rx.reference(i)) {
                    *a += w * r;
                }
            }
            acc
        }
    };
    let quadrature = hilbert.transform(&inphase)?;
    Ok(RecoveredReference {
        inphase,
        quadrature,
    })
}

/// Correlator outputs for one subcarrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionPair {
    pub z_a: f64,
    pub z_b: f64,
}

impl DecisionPair {
    pub fn angle(&self) -> f64 {
        self.z_b.atan2(self.z_a)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn mdcsk_decisions(
    rx: &ReceivedFrame,
    reference: &RecoveredReference,
) -> Result<Vec<DecisionPair>> {
    if reference.inphase.len() != rx.beta() || reference.quadrature.len() != rx.beta() {
        return Err(Error::Config("reference length differs from beta".into()));
    }
    Ok((0..rx.subcarriers())
        .map(|i| DecisionPair {
            z_a: dot(&reference.inphase, rx.data(i)),
            z_b: dot(&reference.quadrature, rx.data(i)),
        })
        .collect())
}

/// Sector decision on the correlator phase of every subcarrier.
pub fn mdcsk_detect(
    rx: &ReceivedFrame,
    reference: &RecoveredReference,
    constellation: &Constellation,
) -> Result<Vec<usize>> {
    Ok(mdcsk_decisions(rx, reference)?
        .iter()
        .map(|d| constellation.nearest(d.angle()))
        .collect())
}

/// Harvested power against the decoding threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortageEvent {
    pub harvested: f64,
    pub threshold: f64,
    pub shorted: bool,
}

impl ShortageEvent {
    pub fn new(harvested: f64, threshold: f64) -> Self {
        ShortageEvent {
            harvested,
            threshold,
            shorted: harvested < threshold,
        }
    }

    /// An event that never shorts.
    pub fn disabled() -> Self {
        ShortageEvent {
            harvested: f64::INFINITY,
            threshold: 0.0,
            shorted: false,
        }
    }
}

pub fn check_shortage(real: &ChannelRealization, params: &SystemParams, e1: f64) -> ShortageEvent {
    ShortageEvent::new(harvested_power(real, params, e1), params.p_r)
}

/// Everything the receiver decided about one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Demodulation {
    pub bits: Vec<bool>,
    pub symbols: FrameSymbols,
    pub metrics: EnergyMetrics,
    pub shortage: ShortageEvent,
}

/// Receiver with its Walsh matrix, constellation and Hilbert plan prepared once.
#[derive(Debug, Clone)]
pub struct Demodulator {
    params: SystemParams,
    walsh: WalshMatrix,
    constellation: Constellation,
    hilbert: HilbertTransformer,
    mode: ReferenceMode,
}

impl Demodulator {
    pub fn new(params: SystemParams, mode: ReferenceMode) -> Result<Self> {
        params.validate()?;
        Ok(Demodulator {
            walsh: walsh(params.n)?,
            constellation: constellation(params.m)?,
            hilbert: HilbertTransformer::new(params.beta)?,
            params,
            mode,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn mode(&self) -> ReferenceMode {
        self.mode
    }

    /// Detects symbols and bits. The shortage event is passed through untouched;
    /// decisions are produced even for shorted frames.
    pub fn demodulate(
        &mut self,
        rx: &ReceivedFrame,
        shortage: ShortageEvent,
    ) -> Result<Demodulation> {
        if rx.subcarriers() != self.params.n || rx.beta() != self.params.beta {
            return Err(Error::Config(format!(
                "received frame is {}x{}, receiver expects {}x{}",
                rx.subcarriers(),
                rx.beta(),
                self.params.n,
                self.params.beta
            )));
        }
        let (s0, metrics) = cim_detect(rx, &self.walsh)?;
        let reference = recover_reference(rx, s0, &self.walsh, self.mode, &mut self.hilbert)?;
        let s = mdcsk_detect(rx, &reference, &self.constellation)?;
        let symbols = FrameSymbols { s0, s };
        let bits = symbols_to_bits(&symbols, &self.params)?;
        Ok(Demodulation {
            bits,
            symbols,
            metrics,
            shortage,
        })
    }
}

/// One-shot demodulation with the shortage check at nominal chip energy `e1`.
pub fn demodulate_frame(
    rx: &ReceivedFrame,
    params: &SystemParams,
    real: &ChannelRealization,
    e1: f64,
    mode: ReferenceMode,
) -> Result<Demodulation> {
    let shortage = check_shortage(real, params, e1);
    Demodulator::new(*params, mode)?.demodulate(rx, shortage)
}
