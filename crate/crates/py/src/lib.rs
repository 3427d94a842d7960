//! Python bindings: analytical curves, grid simulation and presets.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cimdcsk::analysis::{self, LinearAnchor, ShortageMode, TheoryOptions};
use cimdcsk::harness::{self, ExperimentConfig, ResultRow};
use cimdcsk::{ChannelProfile, MapKind, SystemParams};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn row_dict(r: &ResultRow) -> HashMap<String, f64> {
    HashMap::from([
        ("ebn0_db".into(), r.ebn0_db),
        ("phi".into(), r.phi),
        ("nt".into(), r.nt as f64),
        ("n".into(), r.n as f64),
        ("m".into(), r.m as f64),
        ("beta".into(), r.beta as f64),
        ("ber_sim".into(), r.ber_sim),
        ("ber_cim_sim".into(), r.ber_cim_sim),
        ("ber_mdcsk_sim".into(), r.ber_mdcsk_sim),
        ("shortage_sim".into(), r.shortage_sim),
        ("ber_theory".into(), r.ber_theory),
        ("pshr_theory".into(), r.pshr_theory),
        ("se".into(), r.se),
        ("ee".into(), r.ee),
        ("frames".into(), r.frames as f64),
        ("errors".into(), r.errors as f64),
    ])
}

/// Analytical quantities at one operating point over the `table1` channel.
#[pyfunction]
#[pyo3(signature = (ebn0_db, n=4, m=4, nt=2, beta=160, phi=0.5, lambda_=0.5, pr_fraction=0.01,
                    map="logistic", anchor="tangent", shortage_mode="paper"))]
#[allow(clippy::too_many_arguments)]
fn theory(
    ebn0_db: f64,
    n: usize,
    m: usize,
    nt: usize,
    beta: usize,
    phi: f64,
    lambda_: f64,
    pr_fraction: f64,
    map: &str,
    anchor: &str,
    shortage_mode: &str,
) -> PyResult<HashMap<String, f64>> {
    let map: MapKind = map.parse().map_err(py_err)?;
    let e1 = beta as f64 * map.mean_power();
    let params = SystemParams {
        n,
        m,
        nt,
        beta,
        phi,
        lambda: lambda_,
        p_r: SystemParams::decode_threshold(n, e1, pr_fraction),
        ebn0_db,
    };
    params.validate().map_err(py_err)?;
    let opts = TheoryOptions {
        anchor: anchor.parse::<LinearAnchor>().map_err(py_err)?,
        shortage_mode: shortage_mode.parse::<ShortageMode>().map_err(py_err)?,
        ..TheoryOptions::default()
    };
    let t = analysis::system_ber(&ChannelProfile::table1(), &params, e1, &opts).map_err(py_err)?;
    Ok(HashMap::from([
        ("ebn0_db".into(), t.ebn0_db),
        ("p_shr".into(), t.p_shr),
        ("p_b_cim".into(), t.p_b_cim),
        ("p_b_mdcsk_int".into(), t.p_b_mdcsk_integral),
        ("p_b_mdcsk_closed".into(), t.p_b_mdcsk_closed),
        ("p_b".into(), t.p_b),
        ("p_sys".into(), t.p_sys),
        ("se".into(), t.se),
        ("ee".into(), t.ee),
        ("ee_conv".into(), t.ee_conv),
    ]))
}

/// Runs the Monte Carlo grid described by a TOML config and returns one dict per point.
#[pyfunction]
#[pyo3(signature = (config, workers=None))]
fn simulate(py: Python<'_>, config: &str, workers: Option<usize>) -> PyResult<Vec<HashMap<String, f64>>> {
    let cfg = ExperimentConfig::from_toml(config).map_err(py_err)?;
    let run = py.detach(|| harness::run_grid(&cfg, workers)).map_err(py_err)?;
    if let Some(f) = run.failures.first() {
        return Err(py_err(format!("point {} failed: {}", f.index, f.message)));
    }
    Ok(harness::result_rows(&run).iter().map(row_dict).collect())
}

/// TOML configs making up a built-in figure.
#[pyfunction]
fn preset(name: &str) -> PyResult<Vec<String>> {
    harness::preset(name)
        .and_then(|cfgs| cfgs.iter().map(ExperimentConfig::to_toml).collect())
        .map_err(py_err)
}

#[pyfunction]
fn spectral_efficiency(n: usize, m: usize) -> PyResult<f64> {
    let p = SystemParams { n, m, ..SystemParams::default() };
    p.validate().map_err(py_err)?;
    Ok(analysis::spectral_efficiency(&p))
}

#[pymodule]
fn cimdcsk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(theory, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_efficiency, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("PRESETS", harness::PRESET_NAMES.to_vec())?;
    Ok(())
}
