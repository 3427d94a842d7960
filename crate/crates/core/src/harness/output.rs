//! Result files: per-point CSV, theory CSV and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::TheoryPoint;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, PointSpec};
use crate::harness::sim::{PointFailure, PointResult, RunResult};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const RESULT_HEADER: [&str; 16] = [
    "ebn0_db",
    "phi",
    "nt",
    "n",
    "m",
    "beta",
    "ber_sim",
    "ber_cim_sim",
    "ber_mdcsk_sim",
    "shortage_sim",
    "ber_theory",
    "pshr_theory",
    "se",
    "ee",
    "frames",
    "errors",
];

/// One line of the simulation CSV. Missing theory values are written as NaN.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResultRow {
    pub ebn0_db: f64,
    pub phi: f64,
    pub nt: usize,
    pub n: usize,
    pub m: usize,
    pub beta: usize,
    pub ber_sim: f64,
    pub ber_cim_sim: f64,
    pub ber_mdcsk_sim: f64,
    pub shortage_sim: f64,
    pub ber_theory: f64,
    pub pshr_theory: f64,
    pub se: f64,
    pub ee: f64,
    pub frames: u64,
    pub errors: u64,
}

fn same(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits()
}

impl PartialEq for ResultRow {
    /// Bitwise float comparison, so NaN fields compare equal to themselves.
    fn eq(&self, o: &Self) -> bool {
        same(self.ebn0_db, o.ebn0_db)
            && same(self.phi, o.phi)
            && (self.nt, self.n, self.m, self.beta, self.frames, self.errors)
                == (o.nt, o.n, o.m, o.beta, o.frames, o.errors)
            && same(self.ber_sim, o.ber_sim)
            && same(self.ber_cim_sim, o.ber_cim_sim)
            && same(self.ber_mdcsk_sim, o.ber_mdcsk_sim)
            && same(self.shortage_sim, o.shortage_sim)
            && same(self.ber_theory, o.ber_theory)
            && same(self.pshr_theory, o.pshr_theory)
            && same(self.se, o.se)
            && same(self.ee, o.ee)
    }
}

impl From<&PointResult> for ResultRow {
    fn from(r: &PointResult) -> Self {
        let p = &r.spec.params;
        let t = r.theory.as_ref();
        let pick = |f: fn(&TheoryPoint) -> f64| t.map_or(f64::NAN, f);
        ResultRow {
            ebn0_db: p.ebn0_db,
            phi: p.phi,
            nt: p.nt,
            n: p.n,
            m: p.m,
            beta: p.beta,
            ber_sim: r.ber_sim(),
            ber_cim_sim: r.ber_cim_sim(),
            ber_mdcsk_sim: r.ber_mdcsk_sim(),
            shortage_sim: r.shortage_sim(),
            ber_theory: pick(|t| t.p_sys),
            pshr_theory: pick(|t| t.p_shr),
            se: pick(|t| t.se),
            ee: pick(|t| t.ee),
            frames: r.frames,
            errors: r.errors,
        }
    }
}

/// One line of the theory CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryRow {
    #[serde(rename = "EbN0_dB")]
    pub ebn0_db: f64,
    #[serde(rename = "P_Shr")]
    pub p_shr: f64,
    #[serde(rename = "P_b_CIM")]
    pub p_b_cim: f64,
    #[serde(rename = "P_b_MDCSK_int")]
    pub p_b_mdcsk_int: f64,
    #[serde(rename = "P_b_MDCSK_closed")]
    pub p_b_mdcsk_closed: f64,
    #[serde(rename = "P_sys")]
    pub p_sys: f64,
    #[serde(rename = "SE")]
    pub se: f64,
    #[serde(rename = "EE")]
    pub ee: f64,
    pub phi: f64,
    pub nt: usize,
    pub n: usize,
    pub m: usize,
    pub beta: usize,
}

impl TheoryRow {
    pub fn new(spec: &PointSpec, t: &TheoryPoint) -> Self {
        let p = &spec.params;
        TheoryRow {
            ebn0_db: p.ebn0_db,
            p_shr: t.p_shr,
            p_b_cim: t.p_b_cim,
            p_b_mdcsk_int: t.p_b_mdcsk_integral,
            p_b_mdcsk_closed: t.p_b_mdcsk_closed,
            p_sys: t.p_sys,
            se: t.se,
            ee: t.ee,
            phi: p.phi,
            nt: p.nt,
            n: p.n,
            m: p.m,
            beta: p.beta,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_rows<T: Serialize, W: std::io::Write>(rows: &[T], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_rows<T: for<'de> Deserialize<'de>, R: std::io::Read>(source: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(source)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

/// Simulation rows sorted into grid order.
pub fn result_rows(run: &RunResult) -> Vec<ResultRow> {
    let mut points: Vec<&PointResult> = run.points.iter().collect();
    points.sort_by_key(|p| p.spec.index);
    points.into_iter().map(ResultRow::from).collect()
}

/// Echo of everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub artifact_version: String,
    #[serde(with = "crate::harness::config::seed_format")]
    pub master_seed: u64,
    #[serde(default)]
    pub failures: Vec<PointFailure>,
    pub config: ExperimentConfig,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, failures: &[PointFailure]) -> Self {
        Manifest {
            artifact_version: ARTIFACT_VERSION.into(),
            master_seed: config.master_seed,
            failures: failures.to_vec(),
            config: config.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if m.master_seed != m.config.master_seed {
            return Err(Error::Config(format!(
                "manifest seed {} disagrees with config seed {}",
                m.master_seed, m.config.master_seed
            )));
        }
        m.config.validate()?;
        Ok(m)
    }
}

/// Reads either a plain experiment config or a run manifest.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let value: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    if value.contains_key("artifact_version") {
        Ok(Manifest::from_toml(&text)?.config)
    } else {
        ExperimentConfig::from_toml(&text)
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

/// Writes `<name>.csv` and `<name>.manifest.toml` into `dir`.
pub fn emit(run: &RunResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    ensure_dir(dir)?;
    let csv_path = dir.join(format!("{}.csv", run.config.name));
    write_rows(&result_rows(run), create(&csv_path)?)?;
    let manifest_path = dir.join(format!("{}.manifest.toml", run.config.name));
    let text = Manifest::new(&run.config, &run.failures).to_toml()?;
    fs::write(&manifest_path, text)
        .map_err(|e| Error::Io(format!("{}: {e}", manifest_path.display())))?;
    Ok((csv_path, manifest_path))
}

/// Writes `<name>.theory.csv` into `dir`. Points whose evaluation failed are
/// logged and skipped.
pub fn emit_theory(
    cfg: &ExperimentConfig,
    points: &[(PointSpec, Result<TheoryPoint>)],
    dir: &Path,
) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let rows: Vec<TheoryRow> = points
        .iter()
        .filter_map(|(spec, t)| match t {
            Ok(t) => Some(TheoryRow::new(spec, t)),
            Err(e) => {
                log::warn!("theory point {} [{}]: {e}", spec.index, spec.key());
                None
            }
        })
        .collect();
    let path = dir.join(format!("{}.theory.csv", cfg.name));
    write_rows(&rows, create(&path)?)?;
    Ok(path)
}
