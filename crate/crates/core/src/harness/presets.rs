//! Built-in experiment configurations for the published figures.

use crate::chaos::MapKind;
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, Grid};

pub const PRESET_NAMES: [&str; 10] = [
    "fig4a", "fig4b", "fig5a", "fig5b", "fig5-1", "fig6", "fig7", "fig8", "fig8-1", "fig9",
];

/// Eb/N0 axis shared by the BER-versus-SNR figures.
pub fn snr_axis() -> Vec<f64> {
    (0..=6).map(|k| 5.0 * k as f64).collect()
}

fn grid(nt: &[usize], n: &[usize], m: &[usize]) -> Grid {
    Grid {
        nt: nt.to_vec(),
        n: n.to_vec(),
        m: m.to_vec(),
        ..Grid::new(snr_axis())
    }
}

fn named(name: &str, grid: Grid) -> ExperimentConfig {
    ExperimentConfig::new(name, grid)
}

/// One or more configurations making up the named figure.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let cfgs = match name {
        "fig4a" => vec![named(name, grid(&[2], &[4], &[4]))],
        "fig4b" => vec![named(name, grid(&[2], &[8], &[8]))],
        "fig5a" => vec![named(name, grid(&[4], &[4], &[4]))],
        "fig5b" => vec![named(name, grid(&[4], &[8], &[8]))],
        "fig5-1" => {
            let mut g = grid(&[2], &[4], &[4]);
            g.beta = vec![64, 128, 160, 256, 512];
            vec![named(name, g)]
        }
        "fig6" => {
            let mut g = Grid::new(vec![15.0, 20.0, 25.0]);
            g.phi = (1..=10).map(|k| k as f64 / 10.0).collect();
            vec![named(name, g)]
        }
        "fig7" => vec![named(name, grid(&[2, 3, 4], &[4], &[4, 8]))],
        "fig8" => vec![named(name, grid(&[2], &[4, 8, 16], &[4, 8]))],
        "fig8-1" => MapKind::ALL
            .iter()
            .map(|&map| {
                let mut c = named(&format!("{name}-{map}"), grid(&[2, 4], &[4], &[4]));
                c.map = map;
                c
            })
            .collect(),
        "fig9" => {
            let proposed = named("fig9-proposed", grid(&[2], &[4], &[4, 8]));
            let mut miso = named("fig9-miso", grid(&[2], &[4], &[4, 8]));
            miso.grid.phi = vec![1.0];
            miso.shortage_enabled = false;
            let mut siso = named("fig9-siso", grid(&[1], &[4], &[4, 8]));
            siso.grid.phi = vec![1.0];
            siso.shortage_enabled = false;
            vec![proposed, miso, siso]
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}', expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    for c in &cfgs {
        c.validate()?;
    }
    Ok(cfgs)
}
