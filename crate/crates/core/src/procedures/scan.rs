//! Classification of the GAD parameter square.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{gad, invert_with_condition, GadParams};
use crate::entanglement::{is_entanglement_annihilating, is_entanglement_breaking, EaConfig, EaVerdict};
use crate::error::{Error, Result};
use crate::states::PureState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CellClass {
    #[serde(rename = "NONINVERTIBLE")]
    NonInvertible,
    #[serde(rename = "EB")]
    Eb,
    #[serde(rename = "EA_NOT_EB")]
    EaNotEb,
    #[serde(rename = "NOT_EA")]
    NotEa,
}

impl CellClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellClass::NonInvertible => "NONINVERTIBLE",
            CellClass::Eb => "EB",
            CellClass::EaNotEb => "EA_NOT_EB",
            CellClass::NotEa => "NOT_EA",
        }
    }
}

impl fmt::Display for CellClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanConfig {
    pub gamma_steps: usize,
    pub n_steps: usize,
    /// Budget for each cell; its seed is replaced by a per-cell seed.
    pub ea: EaConfig,
    pub seed: u64,
    /// Run the annihilation search on cells already found to be EB.
    pub certify_eb_cells: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            gamma_steps: 40,
            n_steps: 40,
            ea: EaConfig {
                samples: 500,
                ..EaConfig::default()
            },
            seed: 0,
            certify_eb_cells: true,
        }
    }
}

impl ScanConfig {
    /// 200×200 with 2000 samples; EB cells are taken as EA without a search.
    pub fn fine() -> Self {
        Self {
            gamma_steps: 200,
            n_steps: 200,
            ea: EaConfig::default(),
            seed: 0,
            certify_eb_cells: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub gamma: f64,
    pub n: f64,
    pub class: CellClass,
    pub invertible: bool,
    /// ∞-norm condition number of the superoperator; infinite when singular.
    pub condition_number: f64,
    pub eb: bool,
    pub ea: bool,
    pub choi_min_pt_eig: f64,
    /// Absent when the search was skipped for an EB cell.
    pub ea_min_pt_eig: Option<f64>,
    pub witness: Option<PureState>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegionGrid {
    pub gamma_axis: Vec<f64>,
    pub n_axis: Vec<f64>,
    /// Row-major with γ as the slow index.
    pub cells: Vec<Cell>,
}

impl RegionGrid {
    pub fn cell(&self, gi: usize, ni: usize) -> &Cell {
        &self.cells[gi * self.n_axis.len() + ni]
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }
}

/// `steps` evenly spaced points on [0, 1], both ends included.
pub fn unit_axis(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect()
}

/// Seed for work item `index` of a run with master seed `seed`.
pub fn item_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn classify_cell(gamma: f64, n: f64, ea: &EaConfig, certify_eb: bool) -> Result<Cell> {
    let params = GadParams::new(gamma, n)?;
    let channel = gad(params);
    let (invertible, condition_number) = if gamma < 1.0 {
        match invert_with_condition(&channel) {
            Ok((_, c)) => (true, c),
            Err(Error::NonInvertible { .. }) => (false, f64::INFINITY),
            Err(e) => return Err(e),
        }
    } else {
        (false, f64::INFINITY)
    };
    let eb = is_entanglement_breaking(&channel)?;
    let (ea, ea_min, witness) = if eb.breaking && !certify_eb {
        (true, None, None)
    } else {
        let cert = is_entanglement_annihilating(&channel, ea)?;
        (
            cert.verdict == EaVerdict::Annihilating,
            Some(cert.min_pt_eigenvalue),
            cert.witness,
        )
    };
    let class = if !invertible {
        CellClass::NonInvertible
    } else if eb.breaking {
        CellClass::Eb
    } else if ea {
        CellClass::EaNotEb
    } else {
        CellClass::NotEa
    };
    Ok(Cell {
        gamma,
        n,
        class,
        invertible,
        condition_number,
        eb: eb.breaking,
        ea,
        choi_min_pt_eig: eb.choi_min_pt_eigenvalue,
        ea_min_pt_eig: ea_min,
        witness,
    })
}

pub fn gad_region_scan(cfg: &ScanConfig) -> Result<RegionGrid> {
    if cfg.gamma_steps < 2 || cfg.n_steps < 2 {
        return Err(Error::Range {
            name: "grid",
            value: cfg.gamma_steps.min(cfg.n_steps) as f64,
            range: "at least 2 points per axis",
        });
    }
    cfg.ea.validate()?;
    let gamma_axis = unit_axis(cfg.gamma_steps);
    let n_axis = unit_axis(cfg.n_steps);
    let cells = (0..gamma_axis.len() * n_axis.len())
        .into_par_iter()
        .map(|idx| {
            let gamma = gamma_axis[idx / n_axis.len()];
            let n = n_axis[idx % n_axis.len()];
            let ea = EaConfig {
                seed: item_seed(cfg.seed, idx as u64),
                ..cfg.ea
            };
            classify_cell(gamma, n, &ea, cfg.certify_eb_cells)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        gamma_axis,
        n_axis,
        cells,
    })
}
