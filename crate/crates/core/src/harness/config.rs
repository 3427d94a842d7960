//! Experiment configuration and its expansion into grid points.

use serde::{Deserialize, Serialize};

use crate::analysis::{LinearAnchor, ShortageMode, TheoryOptions};
use crate::channel::{ChannelProfile, Fading, PathSpec};
use crate::chaos::MapKind;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rx::ReferenceMode;

/// Relative separation applied to coincident path means when jitter is enabled.
pub const JITTER: f64 = 1e-6;

/// TOML integers are signed, so seeds above `i64::MAX` are written as strings.
/// Both forms are accepted when reading.
pub mod seed_format {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(u64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(v),
            Raw::Text(t) => t.trim().parse().map_err(de::Error::custom),
        }
    }
}

fn default_name() -> String {
    "experiment".into()
}

fn default_true() -> bool {
    true
}

fn default_map() -> MapKind {
    MapKind::Logistic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub ebn0_db: Vec<f64>,
    #[serde(default = "Grid::default_phi")]
    pub phi: Vec<f64>,
    #[serde(default = "Grid::default_nt")]
    pub nt: Vec<usize>,
    #[serde(default = "Grid::default_n")]
    pub n: Vec<usize>,
    #[serde(default = "Grid::default_m")]
    pub m: Vec<usize>,
    #[serde(default = "Grid::default_beta")]
    pub beta: Vec<usize>,
}

impl Grid {
    fn default_phi() -> Vec<f64> {
        vec![0.5]
    }
    fn default_nt() -> Vec<usize> {
        vec![2]
    }
    fn default_n() -> Vec<usize> {
        vec![4]
    }
    fn default_m() -> Vec<usize> {
        vec![4]
    }
    fn default_beta() -> Vec<usize> {
        vec![160]
    }

    pub fn new(ebn0_db: Vec<f64>) -> Self {
        Grid {
            ebn0_db,
            phi: Self::default_phi(),
            nt: Self::default_nt(),
            n: Self::default_n(),
            m: Self::default_m(),
            beta: Self::default_beta(),
        }
    }

    pub fn len(&self) -> usize {
        self.ebn0_db.len()
            * self.phi.len()
            * self.nt.len()
            * self.n.len()
            * self.m.len()
            * self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Harvest {
    pub lambda: f64,
    /// `P_R` as a fraction of the frame energy `2 N E1`.
    pub pr_fraction: f64,
}

impl Default for Harvest {
    fn default() -> Self {
        Harvest {
            lambda: 0.5,
            pr_fraction: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    /// Named profile (`table1`, `flat`, `awgn`); ignored when `antennas` is given.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub antennas: Option<Vec<Vec<PathSpec>>>,
    #[serde(default)]
    pub fading: Option<Fading>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            preset: Some("table1".into()),
            antennas: None,
            fading: None,
        }
    }
}

impl ChannelConfig {
    pub fn profile(&self) -> Result<ChannelProfile> {
        let mut profile = match (&self.antennas, &self.preset) {
            (Some(antennas), _) => ChannelProfile {
                antennas: antennas.clone(),
                fading: Fading::Rayleigh,
            },
            (None, Some(name)) => ChannelProfile::preset(name)?,
            (None, None) => ChannelProfile::table1(),
        };
        if let Some(f) = self.fading {
            profile.fading = f;
        }
        profile.validate(None)?;
        if !profile.is_normalized() {
            log::warn!("channel profile path powers do not sum to 1 per antenna");
        }
        Ok(profile)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_bit_errors: 200,
            max_frames: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default, with = "seed_format")]
    pub master_seed: u64,
    #[serde(default = "default_map")]
    pub map: MapKind,
    #[serde(default)]
    pub shortage_mode: ShortageMode,
    /// When false the harvester is ignored and frames never short.
    #[serde(default = "default_true")]
    pub shortage_enabled: bool,
    #[serde(default)]
    pub reference: ReferenceMode,
    #[serde(default)]
    pub anchor: LinearAnchor,
    #[serde(default)]
    pub jitter_degenerate: bool,
    pub grid: Grid,
    #[serde(default)]
    pub harvest: Harvest,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub stop: StopRule,
}

/// One fully specified operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSpec {
    pub index: usize,
    pub params: SystemParams,
    pub map: MapKind,
    /// Nominal chip energy `beta * E[c^2]`.
    pub e1: f64,
}

impl PointSpec {
    /// Canonical text identifying the point independently of its grid position.
    pub fn key(&self) -> String {
        let p = &self.params;
        format!(
            "ebn0={:?};phi={:?};nt={};n={};m={};beta={};lambda={:?};pr={:?};map={}",
            p.ebn0_db, p.phi, p.nt, p.n, p.m, p.beta, p.lambda, p.p_r, self.map
        )
    }
}

impl ExperimentConfig {
    pub fn new(name: &str, grid: Grid) -> Self {
        ExperimentConfig {
            name: name.into(),
            master_seed: 0,
            map: MapKind::Logistic,
            shortage_mode: ShortageMode::Paper,
            shortage_enabled: true,
            reference: ReferenceMode::FirstSubcarrier,
            anchor: LinearAnchor::Tangent,
            jitter_degenerate: false,
            grid,
            harvest: Harvest::default(),
            channel: ChannelConfig::default(),
            stop: StopRule::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn theory_options(&self) -> TheoryOptions {
        TheoryOptions {
            anchor: self.anchor,
            shortage_mode: self.shortage_mode,
            jitter: self.jitter_degenerate.then_some(JITTER),
            shortage_enabled: self.shortage_enabled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("parameter grid is empty".into()));
        }
        if self.stop.min_bit_errors < 100 {
            return Err(Error::Config(format!(
                "min_bit_errors must be at least 100, got {}",
                self.stop.min_bit_errors
            )));
        }
        if self.stop.max_frames < 1 {
            return Err(Error::Config("max_frames must be at least 1".into()));
        }
        if !(self.harvest.pr_fraction >= 0.0) {
            return Err(Error::Config("pr_fraction must be >= 0".into()));
        }
        let profile = self.channel.profile()?;
        for p in self.points()? {
            p.params.validate()?;
            if p.params.nt > profile.antenna_count() {
                return Err(Error::Config(format!(
                    "N_t = {} but the channel profile has {} antennas",
                    p.params.nt,
                    profile.antenna_count()
                )));
            }
            profile.validate(Some(p.params.beta))?;
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<ChannelProfile> {
        self.channel.profile()
    }

    /// Cartesian product of the grid, with Eb/N0 varying fastest.
    pub fn points(&self) -> Result<Vec<PointSpec>> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.len());
        let power = self.map.mean_power();
        for &nt in &g.nt {
            for &n in &g.n {
                for &m in &g.m {
                    for &beta in &g.beta {
                        for &phi in &g.phi {
                            for &ebn0_db in &g.ebn0_db {
                                let e1 = beta as f64 * power;
                                let p_r = if self.shortage_enabled {
                                    SystemParams::decode_threshold(n, e1, self.harvest.pr_fraction)
                                } else {
                                    0.0
                                };
                                let params = SystemParams {
                                    n,
                                    m,
                                    nt,
                                    beta,
                                    phi,
                                    lambda: self.harvest.lambda,
                                    p_r,
                                    ebn0_db,
                                };
                                out.push(PointSpec {
                                    index: out.len(),
                                    params,
                                    map: self.map,
                                    e1,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}
