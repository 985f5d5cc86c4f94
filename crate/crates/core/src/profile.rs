//! Transverse detection-probability maps at the beam waist.
//!
//! The mode qubit maps to first-order Hermite-Gauss modes, |h⟩ ≡ HG₀₁
//! (lobes along y) and |v⟩ ≡ HG₁₀ (lobes along x):
//!
//! ```text
//! HG₁₀(x, y) = √(8/π) · x/w² · exp(−(x² + y²)/w²)
//! HG₀₁(x, y) = √(8/π) · y/w² · exp(−(x² + y²)/w²)
//! ```

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{Polarization, TransverseMode};
use crate::qmath::{DensityMatrix4, C64};

/// Square sampling grid centred on the beam axis, cell-centred samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Half extent of the window, same unit as `waist`.
    pub half_width: f64,
    pub samples_per_axis: usize,
    pub waist: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            half_width: 4.0,
            samples_per_axis: 256,
            waist: 1.0,
        }
    }
}

impl GridConfig {
    pub fn new(half_width: f64, samples_per_axis: usize, waist: f64) -> Result<Self> {
        let g = Self {
            half_width,
            samples_per_axis,
            waist,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_axis < 16 {
            return Err(Error::invalid(format!(
                "need at least 16 samples per axis, got {}",
                self.samples_per_axis
            )));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::invalid(format!(
                "half_width {} must be positive",
                self.half_width
            )));
        }
        if !(self.waist > 0.0 && self.waist.is_finite()) {
            return Err(Error::invalid(format!("waist {} must be positive", self.waist)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.samples_per_axis as f64
    }

    /// Coordinate of sample `i` along an axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }
}

/// Normalized first-order Hermite-Gauss amplitude at the waist.
pub fn hg_amplitude(mode: TransverseMode, x: f64, y: f64, w: f64) -> f64 {
    let lobe = match mode {
        TransverseMode::V => x,
        TransverseMode::H => y,
    };
    (8.0 / PI).sqrt() * lobe / (w * w) * (-(x * x + y * y) / (w * w)).exp()
}

/// Row-major map; row index runs along y, column index along x, both
/// increasing with the coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityMap {
    pub values: Vec<f64>,
    pub grid: GridConfig,
}

impl IntensityMap {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.samples_per_axis + ix]
    }

    /// Riemann sum Σ I · Δx Δy.
    pub fn integral(&self) -> f64 {
        let d = self.grid.spacing();
        self.values.iter().sum::<f64>() * d * d
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Plain PGM (P2), 16-bit, the maximum scaled to 65535, top row = largest y.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.grid.samples_per_axis;
        let max = self.max();
        writeln!(out, "P2")?;
        writeln!(out, "{n} {n}")?;
        writeln!(out, "65535")?;
        for iy in (0..n).rev() {
            let row: Vec<String> = (0..n)
                .map(|ix| {
                    let v = if max > 0.0 { self.get(ix, iy) / max } else { 0.0 };
                    ((v * 65535.0).round() as u32).to_string()
                })
                .collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// `x,y,intensity` rows, y-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.grid.samples_per_axis;
        writeln!(out, "x,y,intensity")?;
        for iy in 0..n {
            let y = self.grid.coordinate(iy);
            for ix in 0..n {
                writeln!(out, "{},{},{:e}", self.grid.coordinate(ix), y, self.get(ix, iy))?;
            }
        }
        Ok(())
    }
}

fn render(rho: &DensityMatrix4, grid: &GridConfig, pols: &[Polarization]) -> Result<IntensityMap> {
    grid.validate()?;
    let es = rho.eigensystem();
    let pairs: Vec<(f64, Vec<C64>)> = es
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0)
        .map(|(k, &l)| (l, es.vector(k)))
        .collect();
    let n = grid.samples_per_axis;
    let w = grid.waist;
    let values = (0..n)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let y = grid.coordinate(iy);
            let pairs = &pairs;
            (0..n).map(move |ix| {
                let x = grid.coordinate(ix);
                let uh = hg_amplitude(TransverseMode::H, x, y, w);
                let uv = hg_amplitude(TransverseMode::V, x, y, w);
                let mut total = 0.0;
                for (l, psi) in pairs {
                    for &p in pols {
                        let base = 2 * p.index();
                        total += l * (psi[base] * uh + psi[base + 1] * uv).norm_sqr();
                    }
                }
                total
            })
        })
        .collect();
    Ok(IntensityMap { values, grid: *grid })
}

/// Total detection-probability density Σ_P ⟨P, x, y|ρ|P, x, y⟩.
pub fn intensity_map(rho: &DensityMatrix4, grid: &GridConfig) -> Result<IntensityMap> {
    render(rho, grid, &[Polarization::H, Polarization::V])
}

/// Density behind an ideal polarizer set to `pol`.
pub fn polarization_resolved_map(rho: &DensityMatrix4, grid: &GridConfig, pol: Polarization) -> Result<IntensityMap> {
    render(rho, grid, &[pol])
}
