//! Monte Carlo link simulation over a parameter grid.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{system_ber, ShortageMode, TheoryPoint};
use crate::channel::{
    draw_realization, harvested_power_per_antenna, propagate, ChannelProfile, ChipHistory,
};
use crate::chaos::{ChaoticMap, ChaoticStream};
use crate::constellation::constellation;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, PointSpec};
use crate::hilbert::HilbertTransformer;
use crate::rx::{Demodulator, ShortageEvent};
use crate::tx::{bits_to_symbols, modulate};
use crate::walsh::walsh;

/// Independent random stream for one role at one grid point.
pub fn substream(master_seed: u64, key: &str, role: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update(key.as_bytes());
    h.update([0u8]);
    h.update(role.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Counts for one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub spec: PointSpec,
    pub frames: u64,
    /// Bit errors over all frames, shorted frames charged per the accounting mode.
    pub errors: u64,
    /// Sum over frames of the squared per-frame error count.
    pub errors_sq: u64,
    pub bits: u64,
    /// Code-index bit errors over decoded (not shorted) frames.
    pub cim_errors: u64,
    pub cim_bits: u64,
    /// Data-symbol bit errors over decoded frames.
    pub mdcsk_errors: u64,
    pub mdcsk_bits: u64,
    pub shorted_frames: u64,
    pub theory: Option<TheoryPoint>,
    pub theory_error: Option<String>,
    #[serde(skip)]
    pub wall_seconds: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

impl PointResult {
    pub fn ber_sim(&self) -> f64 {
        ratio(self.errors, self.bits)
    }

    pub fn ber_cim_sim(&self) -> f64 {
        ratio(self.cim_errors, self.cim_bits)
    }

    pub fn ber_mdcsk_sim(&self) -> f64 {
        ratio(self.mdcsk_errors, self.mdcsk_bits)
    }

    pub fn shortage_sim(&self) -> f64 {
        ratio(self.shorted_frames, self.frames)
    }

    /// Standard error of [`PointResult::ber_sim`] with frames as the
    /// independent unit, so whole-frame shortage errors are accounted for.
    pub fn ber_std_error(&self) -> f64 {
        if self.frames == 0 {
            return f64::NAN;
        }
        let n = self.frames as f64;
        let k = self.bits as f64 / n;
        let p = self.ber_sim();
        let second = self.errors_sq as f64 / (k * k * n);
        ((second - p * p).max(0.0) / n).sqrt()
    }
}

/// A grid point that could not be simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub key: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub config: ExperimentConfig,
    pub points: Vec<PointResult>,
    pub failures: Vec<PointFailure>,
}

/// Streams frames through transmitter, channel and receiver until the stop
/// rule fires, then attaches the analytical prediction.
pub fn run_point(
    cfg: &ExperimentConfig,
    spec: &PointSpec,
    profile: &ChannelProfile,
) -> Result<PointResult> {
    let started = Instant::now();
    let params = spec.params;
    params.validate()?;
    let profile = profile.truncated(params.nt)?;
    profile.validate(Some(params.beta))?;

    let key = spec.key();
    let mut rng_data = substream(cfg.master_seed, &key, "data");
    let mut rng_channel = substream(cfg.master_seed, &key, "channel");
    let mut rng_noise = substream(cfg.master_seed, &key, "noise");
    let mut rng_guess = substream(cfg.master_seed, &key, "guess");

    let mut streams: Vec<ChaoticStream> = (0..params.nt)
        .map(|t| ChaoticStream::new(ChaoticMap::for_antenna(spec.map, t)))
        .collect();
    let mut hilbert = HilbertTransformer::new(params.beta)?;
    let walsh = walsh(params.n)?;
    let cons = constellation(params.m)?;
    let mut demod = Demodulator::new(params, cfg.reference)?;
    let mut history = ChipHistory::new(params.nt, params.n, profile.max_delay());
    let n0 = params.n0(spec.e1);

    let k = params.bits_per_frame();
    let cim_bits = params.cim_bits();
    let mut r = PointResult {
        spec: *spec,
        frames: 0,
        errors: 0,
        errors_sq: 0,
        bits: 0,
        cim_errors: 0,
        cim_bits: 0,
        mdcsk_errors: 0,
        mdcsk_bits: 0,
        shorted_frames: 0,
        theory: None,
        theory_error: None,
        wall_seconds: 0.0,
    };
    let mut bits = vec![false; k];
    while r.errors < cfg.stop.min_bit_errors && r.frames < cfg.stop.max_frames {
        bits.iter_mut().for_each(|b| *b = rng_data.random());
        let sym = bits_to_symbols(&bits, &params)?;
        let seqs = streams
            .iter_mut()
            .map(|s| s.next_sequence(params.beta, &mut hilbert))
            .collect::<Result<Vec<_>>>()?;
        let tx = modulate(&sym, &seqs, &walsh, &cons, &params)?;
        let real = draw_realization(&profile, &mut rng_channel);
        let shortage = if cfg.shortage_enabled {
            let energies: Vec<f64> = seqs.iter().map(|s| s.energy).collect();
            ShortageEvent::new(
                harvested_power_per_antenna(&real, &params, &energies),
                params.p_r,
            )
        } else {
            ShortageEvent::disabled()
        };
        let rx = propagate(&tx, &real, &mut history, &params, n0, &mut rng_noise)?;

        r.frames += 1;
        r.bits += k as u64;
        if shortage.shorted {
            r.shorted_frames += 1;
            let e = match cfg.shortage_mode {
                ShortageMode::Paper => k as u64,
                ShortageMode::Half => bits
                    .iter()
                    .filter(|&&b| rng_guess.random::<bool>() != b)
                    .count() as u64,
            };
            r.errors += e;
            r.errors_sq += e * e;
            continue;
        }
        let out = demod.demodulate(&rx, shortage)?;
        let wrong = |range: std::ops::Range<usize>| {
            bits[range.clone()]
                .iter()
                .zip(&out.bits[range])
                .filter(|(a, b)| a != b)
                .count() as u64
        };
        let ce = wrong(0..cim_bits);
        let me = wrong(cim_bits..k);
        r.cim_errors += ce;
        r.cim_bits += cim_bits as u64;
        r.mdcsk_errors += me;
        r.mdcsk_bits += (k - cim_bits) as u64;
        r.errors += ce + me;
        r.errors_sq += (ce + me) * (ce + me);
    }
    let restarts: u64 = streams.iter().map(|s| s.restarts()).sum();
    if restarts > 0 {
        log::debug!(
            "point {}: chaotic orbit restarted {restarts} times",
            spec.index
        );
    }

    match system_ber(&profile, &params, spec.e1, &cfg.theory_options()) {
        Ok(t) => r.theory = Some(t),
        Err(e) => r.theory_error = Some(e.to_string()),
    }
    r.wall_seconds = started.elapsed().as_secs_f64();
    log::info!(
        "point {} [{}]: {} frames, BER {:.3e}, {:.1}s",
        spec.index,
        key,
        r.frames,
        r.ber_sim(),
        r.wall_seconds
    );
    Ok(r)
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    b.build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

/// Runs every grid point, in parallel across points. Point failures are
/// recorded instead of aborting the run.
pub fn run_grid(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<RunResult> {
    cfg.validate()?;
    let profile = cfg.profile()?;
    let specs = cfg.points()?;
    let outcomes: Vec<(PointSpec, Result<PointResult>)> = pool(workers)?.install(|| {
        specs
            .par_iter()
            .map(|s| (*s, run_point(cfg, s, &profile)))
            .collect()
    });
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (spec, outcome) in outcomes {
        match outcome {
            Ok(p) => points.push(p),
            Err(e) => failures.push(PointFailure {
                index: spec.index,
                key: spec.key(),
                message: e.to_string(),
            }),
        }
    }
    Ok(RunResult {
        config: cfg.clone(),
        points,
        failures,
    })
}

/// Analytical predictions for every grid point.
pub fn theory_grid(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<Vec<(PointSpec, Result<TheoryPoint>)>> {
    cfg.validate()?;
    let profile = cfg.profile()?;
    let specs = cfg.points()?;
    let opts = cfg.theory_options();
    Ok(pool(workers)?.install(|| {
        specs
            .par_iter()
            .map(|s| (*s, system_ber(&profile, &s.params, s.e1, &opts)))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Fading;
    use crate::harness::config::{ChannelConfig, Grid, StopRule};

    #[test]
    fn substreams_differ_by_role_and_key() {
        let a: u64 = substream(1, "k", "noise").random();
        let b: u64 = substream(1, "k", "channel").random();
        let c: u64 = substream(1, "j", "noise").random();
        let d: u64 = substream(2, "k", "noise").random();
        let e: u64 = substream(1, "k", "noise").random();
        assert!(a != b && a != c && a != d);
        assert_eq!(a, e);
    }

    #[test]
    fn noiseless_static_link_is_error_free() {
        let mut cfg = ExperimentConfig::new("sanity", Grid::new(vec![f64::INFINITY]));
        cfg.shortage_enabled = false;
        cfg.channel = ChannelConfig {
            preset: Some("awgn".into()),
            antennas: None,
            fading: Some(Fading::Static),
        };
        cfg.stop = StopRule {
            min_bit_errors: 100,
            max_frames: 1000,
        };
        let res = run_grid(&cfg, Some(1)).unwrap();
        assert!(res.failures.is_empty());
        let p = &res.points[0];
        assert_eq!(p.frames, 1000);
        assert_eq!(p.errors, 0);
        assert_eq!(p.ber_sim(), 0.0);
    }

    #[test]
    fn shorted_frames_charge_every_bit() {
        let mut cfg = ExperimentConfig::new("short", Grid::new(vec![20.0]));
        cfg.grid.phi = vec![1.0];
        cfg.stop = StopRule {
            min_bit_errors: 100,
            max_frames: 1000,
        };
        let p = &run_grid(&cfg, Some(1)).unwrap().points[0];
        assert_eq!(p.shorted_frames, p.frames);
        assert_eq!(p.errors, p.bits);
        assert_eq!(p.cim_bits, 0);
        assert!(p.ber_cim_sim().is_nan());

        cfg.shortage_mode = ShortageMode::Half;
        cfg.stop.max_frames = 2000;
        cfg.stop.min_bit_errors = 5000;
        let p = &run_grid(&cfg, Some(1)).unwrap().points[0];
        assert!((p.ber_sim() - 0.5).abs() < 0.02);
    }
}
