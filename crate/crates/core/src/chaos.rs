//! Chaotic spreading sequences.
//!
//! Three one-dimensional maps on `[-1, 1]` are supported. A [`ChipSequence`]
//! carries a block of `beta` chips together with its quadrature companion
//! (block Hilbert transform) and its energy `E1 = sum(c_k^2)`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertTransformer;

/// Iterates discarded before the first collected chip.
pub const BURN_IN: usize = 1024;

/// Smallest supported spreading factor.
pub const MIN_BETA: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// `c' = 1 - 2c^2`
    Logistic,
    /// `c' = 4c^3 - 3c`
    Cubic,
    /// `c' = 1.2c + 1` for `c <= 0`, `1.2c - 1` for `c > 0`
    BernoulliShift,
}

impl MapKind {
    pub const ALL: [MapKind; 3] = [MapKind::Logistic, MapKind::Cubic, MapKind::BernoulliShift];

    /// Applies the recurrence once. The result is clamped to `[-1, 1]` so
    /// rounding cannot push an orbit out of the domain.
    #[inline]
    pub fn step(self, c: f64) -> f64 {
        let next = match self {
            MapKind::Logistic => 1.0 - 2.0 * c * c,
            MapKind::Cubic => 4.0 * c * c * c - 3.0 * c,
            // zero goes to the negative branch
            MapKind::BernoulliShift => {
                if c <= 0.0 {
                    1.2 * c + 1.0
                } else {
                    1.2 * c - 1.0
                }
            }
        };
        next.clamp(-1.0, 1.0)
    }

    /// Mean chip power under the invariant density.
    ///
    /// Logistic and cubic maps are Chebyshev maps sharing the arcsine density,
    /// whose second moment is exactly 1/2. The Bernoulli-shift value is measured
    /// once from a long orbit.
    pub fn mean_power(self) -> f64 {
        match self {
            MapKind::Logistic | MapKind::Cubic => 0.5,
            MapKind::BernoulliShift => {
                static BERNOULLI: OnceLock<f64> = OnceLock::new();
                *BERNOULLI.get_or_init(|| orbit_mean_power(MapKind::BernoulliShift, 0.1, 1 << 21))
            }
        }
    }
}

fn orbit_mean_power(kind: MapKind, seed: f64, n: usize) -> f64 {
    let mut c = seed;
    for _ in 0..BURN_IN {
        c = kind.step(c);
    }
    let mut acc = 0.0;
    for _ in 0..n {
        c = kind.step(c);
        acc += c * c;
    }
    acc / n as f64
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Logistic => "logistic",
            MapKind::Cubic => "cubic",
            MapKind::BernoulliShift => "bernoulli-shift",
        })
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "logistic" => Ok(MapKind::Logistic),
            "cubic" => Ok(MapKind::Cubic),
            "bernoulli-shift" | "bernoulli" | "bernoullishift" => Ok(MapKind::BernoulliShift),
            other => Err(Error::Config(format!("unknown chaotic map '{other}'"))),
        }
    }
}

/// A chaotic map together with its initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaoticMap {
    pub kind: MapKind,
    pub seed: f64,
}

impl ChaoticMap {
    pub fn new(kind: MapKind, seed: f64) -> Result<Self> {
        if !(seed > -1.0 && seed < 1.0) || seed == 0.0 {
            return Err(Error::Config(format!(
                "chaotic seed must lie in (-1, 1) without 0, got {seed}"
            )));
        }
        Ok(ChaoticMap { kind, seed })
    }

    /// Map for the 0-based antenna index `antenna`, seeded `0.1 + 0.17 * antenna`
    /// (folded back into the open interval when it would reach 1).
    pub fn for_antenna(kind: MapKind, antenna: usize) -> Self {
        let mut seed = 0.1 + 0.17 * antenna as f64;
        while seed >= 1.0 {
            seed -= 1.9;
        }
        ChaoticMap { kind, seed }
    }
}

/// One application of the map recurrence.
pub fn next_chip(map: &ChaoticMap, current: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&current) {
        return Err(Error::Domain(format!(
            "chip value {current} outside [-1, 1] for the {} map",
            map.kind
        )));
    }
    Ok(map.kind.step(current))
}

/// A block of chips, its quadrature companion, and its energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipSequence {
    pub inphase: Vec<f64>,
    pub quadrature: Vec<f64>,
    pub energy: f64,
}

impl ChipSequence {
    pub fn from_inphase(inphase: Vec<f64>, hilbert: &mut HilbertTransformer) -> Result<Self> {
        let quadrature = hilbert.transform(&inphase)?;
        let energy = inphase.iter().map(|c| c * c).sum();
        Ok(ChipSequence {
            inphase,
            quadrature,
            energy,
        })
    }

    pub fn len(&self) -> usize {
        self.inphase.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inphase.is_empty()
    }
}

fn check_beta(beta: usize) -> Result<()> {
    if beta < MIN_BETA || !beta.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "spreading factor must be even and >= {MIN_BETA}, got {beta}"
        )));
    }
    Ok(())
}

/// The first `beta` chips after [`BURN_IN`] iterates from the map's seed.
pub fn generate_sequence(map: &ChaoticMap, beta: usize) -> Result<ChipSequence> {
    check_beta(beta)?;
    let mut stream = ChaoticStream::new(ChaoticMap::new(map.kind, map.seed)?);
    let mut hilbert = HilbertTransformer::new(beta)?;
    stream.next_sequence(beta, &mut hilbert)
}

/// A running orbit. Successive calls to [`ChaoticStream::next_sequence`] return
/// consecutive, non-overlapping blocks of the same orbit.
#[derive(Debug, Clone)]
pub struct ChaoticStream {
    kind: MapKind,
    state: f64,
    kicks: u64,
}

// Finite-precision orbits of the Chebyshev maps eventually land on one of
// their fixed points (-1, 0 or 1) and stay there. The stream detects this and
// restarts the orbit from a deterministic low-discrepancy point.
fn is_trapped(c: f64) -> bool {
    c == 0.0 || c.abs() == 1.0
}

fn restart_point(kicks: u64) -> f64 {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    let frac = (0.5 + GOLDEN * kicks as f64).fract();
    (2.0 * frac - 1.0).clamp(-0.999, 0.999)
}

impl ChaoticStream {
    pub fn new(map: ChaoticMap) -> Self {
        let mut state = map.seed;
        for _ in 0..BURN_IN {
            state = map.kind.step(state);
        }
        ChaoticStream {
            kind: map.kind,
            state,
            kicks: 0,
        }
    }

    /// How many times the orbit had to be restarted.
    pub fn restarts(&self) -> u64 {
        self.kicks
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn next_chips(&mut self, beta: usize) -> Vec<f64> {
        (0..beta)
            .map(|_| {
                let mut next = self.kind.step(self.state);
                if is_trapped(next) {
                    self.kicks += 1;
                    next = restart_point(self.kicks);
                }
                self.state = next;
                next
            })
            .collect()
    }

    pub fn next_sequence(
        &mut self,
        beta: usize,
        hilbert: &mut HilbertTransformer,
    ) -> Result<ChipSequence> {
        check_beta(beta)?;
        ChipSequence::from_inphase(self.next_chips(beta), hilbert)
    }
}

/// Normalized cross-correlation `|<a, b>| / sqrt(|a|^2 |b|^2)`.
pub fn normalized_correlation(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let ea: f64 = a.iter().map(|x| x * x).sum();
    let eb: f64 = b.iter().map(|x| x * x).sum();
    dot.abs() / (ea * eb).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn logistic(seed: f64) -> ChaoticMap {
        ChaoticMap::new(MapKind::Logistic, seed).unwrap()
    }

    #[test]
    fn recurrence_examples() {
        assert!((next_chip(&logistic(0.1), 0.1).unwrap() - 0.98).abs() < 1e-15);
        let cubic = ChaoticMap::new(MapKind::Cubic, 0.3).unwrap();
        assert_eq!(next_chip(&cubic, 1.0).unwrap(), 1.0);
        let bern = ChaoticMap::new(MapKind::BernoulliShift, 0.3).unwrap();
        assert!((next_chip(&bern, 0.5).unwrap() + 0.4).abs() < 1e-15);
        assert_eq!(next_chip(&bern, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn out_of_domain_rejected() {
        assert!(matches!(
            next_chip(&logistic(0.1), 1.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            next_chip(&logistic(0.1), f64::NAN),
            Err(Error::Domain(_))
        ));
        assert!(ChaoticMap::new(MapKind::Logistic, 0.0).is_err());
        assert!(ChaoticMap::new(MapKind::Logistic, 1.0).is_err());
    }

    #[test]
    fn iterates_stay_in_domain() {
        for kind in MapKind::ALL {
            let mut s = ChaoticStream::new(ChaoticMap::new(kind, 0.37).unwrap());
            assert!(s
                .next_chips(100_000)
                .iter()
                .all(|c| (-1.0..=1.0).contains(c)));
        }
    }

    #[test]
    fn logistic_second_moment_oracle() {
        // independent loop over 2^20 iterates, no shared code with the stream
        let mut c = 0.1f64;
        let mut acc = 0.0;
        let n = 1 << 20;
        for _ in 0..n {
            c = 1.0 - 2.0 * c * c;
            acc += c * c;
        }
        let mean_sq = acc / n as f64;
        assert!((mean_sq - 0.5).abs() < 0.005, "{mean_sq}");

        let seq = generate_sequence(&logistic(0.1), 160).unwrap();
        // std of E1 is about sqrt(160/8)
        assert!(
            (seq.energy - 160.0 * mean_sq).abs() < 4.0 * 20f64.sqrt(),
            "{}",
            seq.energy
        );
    }

    #[test]
    fn energy_is_exact_sum_of_squares() {
        let seq = generate_sequence(&logistic(0.2), 160).unwrap();
        let e: f64 = seq.inphase.iter().map(|c| c * c).sum();
        assert_eq!(seq.energy, e);
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let a = generate_sequence(&logistic(0.1), 160).unwrap();
        let b = generate_sequence(&logistic(0.1), 160).unwrap();
        assert_eq!(a, b);
        let c = generate_sequence(&logistic(0.3), 160).unwrap();
        assert!(normalized_correlation(&a.inphase, &c.inphase) < 0.1);
        for i in 0..4 {
            for j in (i + 1)..4 {
                let si =
                    generate_sequence(&ChaoticMap::for_antenna(MapKind::Logistic, i), 160).unwrap();
                let sj =
                    generate_sequence(&ChaoticMap::for_antenna(MapKind::Logistic, j), 160).unwrap();
                assert!(si.inphase.iter().zip(&sj.inphase).all(|(x, y)| x != y));
            }
        }
    }

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    }

    #[test]
    fn cross_correlation_of_random_seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut draw = |beta: usize| {
            let s1: f64 = rng.random_range(0.01..0.99);
            let s2: f64 = rng.random_range(-0.99..-0.01);
            let a = generate_sequence(&logistic(s1), beta).unwrap();
            let b = generate_sequence(&logistic(s2), beta).unwrap();
            normalized_correlation(&a.inphase, &b.inphase)
        };
        let at160: Vec<f64> = (0..1000).map(|_| draw(160)).collect();
        assert!(median(at160.clone()) < 0.1);
        let short = median(at160[..200].to_vec());
        let long = median((0..200).map(|_| draw(640)).collect());
        assert!(long < short, "median at 640 {long} vs at 160 {short}");
    }

    #[test]
    fn long_sequence_statistics() {
        let seq = generate_sequence(&logistic(0.1), 10_000).unwrap();
        let n = seq.len() as f64;
        let mean = seq.inphase.iter().sum::<f64>() / n;
        assert!(mean.abs() < 0.05);
        assert!((seq.energy / n - 0.5).abs() < 0.05);
    }

    #[test]
    fn quadrature_is_orthogonal_and_energy_preserving() {
        for kind in [MapKind::Logistic, MapKind::Cubic] {
            for seed in [0.1, 0.27, 0.44, 0.61] {
                let seq = generate_sequence(&ChaoticMap::new(kind, seed).unwrap(), 160).unwrap();
                let dot: f64 = seq
                    .inphase
                    .iter()
                    .zip(&seq.quadrature)
                    .map(|(a, b)| a * b)
                    .sum();
                assert!(dot.abs() / seq.energy <= 0.05);
                let eq: f64 = seq.quadrature.iter().map(|c| c * c).sum();
                assert!((eq - seq.energy).abs() / seq.energy < 0.05);
            }
        }
    }

    #[test]
    fn beta_preconditions() {
        assert!(matches!(
            generate_sequence(&logistic(0.1), 6),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            generate_sequence(&logistic(0.1), 161),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn stream_blocks_are_consecutive() {
        let mut hil = HilbertTransformer::new(16).unwrap();
        let mut s = ChaoticStream::new(logistic(0.1));
        let a = s.next_sequence(16, &mut hil).unwrap();
        let b = s.next_sequence(16, &mut hil).unwrap();
        assert_eq!(
            MapKind::Logistic.step(*a.inphase.last().unwrap()),
            b.inphase[0]
        );
        assert_eq!(a, generate_sequence(&logistic(0.1), 16).unwrap());
    }

    #[test]
    fn map_kind_parsing() {
        for kind in MapKind::ALL {
            assert_eq!(kind.to_string().parse::<MapKind>().unwrap(), kind);
        }
        assert!("tent".parse::<MapKind>().is_err());
        let b = MapKind::BernoulliShift.mean_power();
        assert!(b > 0.35 && b < 0.45, "{b}");
    }

    #[test]
    fn stream_escapes_fixed_points() {
        // this cubic orbit reaches the fixed point 1 after about 5.2 million steps
        let mut stream = ChaoticStream::new(ChaoticMap::for_antenna(MapKind::Cubic, 0));
        let mut power = 0.0;
        let blocks = 40_000;
        for _ in 0..blocks {
            let chips = stream.next_chips(160);
            assert!(chips.iter().all(|c| !is_trapped(*c)));
            power += chips.iter().map(|c| c * c).sum::<f64>();
        }
        assert!(stream.restarts() >= 1);
        let mean = power / (blocks * 160) as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }
}
