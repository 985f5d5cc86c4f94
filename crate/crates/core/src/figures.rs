//! Parameter sweeps and (C, Q) scatter samples over the state families.
//!
//! Points are evaluated in parallel; output order always follows the
//! parameter grid.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{correlation_report, OptimizerConfig};
use crate::error::{Error, Result};
use crate::qmath::DensityMatrix4;
use crate::states::{mdms, rank2, rank3, StateParams};
use crate::tomography::{monte_carlo_correlations, NoiseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Uses p and ε (m = 1).
    Rank2,
    /// Uses m and ε (p = ½).
    Rank3,
    /// Uses p, m and ε.
    Mdms,
}

impl Family {
    pub fn state(self, params: &StateParams) -> Result<DensityMatrix4> {
        match self {
            Family::Rank2 => rank2(params.p, params.epsilon),
            Family::Rank3 => rank3(params.m, params.epsilon),
            Family::Mdms => mdms(*params),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Rank2 => "rank2",
            Family::Rank3 => "rank3",
            Family::Mdms => "mdms",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank2" => Ok(Family::Rank2),
            "rank3" => Ok(Family::Rank3),
            "mdms" => Ok(Family::Mdms),
            _ => Err(Error::invalid(format!("unknown family `{s}` (rank2, rank3, mdms)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Eps,
    P,
    M,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::Eps => "eps",
            SweepVariable::P => "p",
            SweepVariable::M => "m",
        }
    }

    fn set(self, params: &mut StateParams, value: f64) {
        match self {
            SweepVariable::Eps => params.epsilon = value,
            SweepVariable::P => params.p = value,
            SweepVariable::M => params.m = value,
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" | "epsilon" => Ok(SweepVariable::Eps),
            "p" => Ok(SweepVariable::P),
            "m" => Ok(SweepVariable::M),
            _ => Err(Error::invalid(format!("unknown sweep variable `{s}` (eps, p, m)"))),
        }
    }
}

/// start, start + step, … up to `stop` (inclusive within 1e-9 of a step).
pub fn grid_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid(format!("step {step} must be positive")));
    }
    if !(start.is_finite() && stop.is_finite()) || stop < start {
        return Err(Error::invalid(format!("empty range [{start}, {stop}]")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| (start + i as f64 * step).min(stop)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    /// Values of the non-swept parameters.
    pub fixed: StateParams,
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub noise: Option<NoiseConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub classical: f64,
    pub classical_std: f64,
    pub concurrence: f64,
    pub concurrence_std: f64,
    pub discord: f64,
    pub discord_std: f64,
    pub mutual_information: f64,
}

pub fn sweep_header(variable: SweepVariable) -> String {
    format!("{},C,C_std,Cprime,Cprime_std,Q,Q_std,Im", variable.column())
}

impl SweepRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.param,
            self.classical,
            self.classical_std,
            self.concurrence,
            self.concurrence_std,
            self.discord,
            self.discord_std,
            self.mutual_information
        )
    }
}

fn sweep_point(spec: &SweepSpec, value: f64, search: &OptimizerConfig) -> Result<SweepRow> {
    let mut params = spec.fixed;
    spec.variable.set(&mut params, value);
    let rho = spec.family.state(&params)?;
    let r = correlation_report(&rho, search);
    let mut row = SweepRow {
        param: value,
        classical: r.classical_correlation,
        classical_std: 0.0,
        concurrence: r.concurrence,
        concurrence_std: 0.0,
        discord: r.discord,
        discord_std: 0.0,
        mutual_information: r.mutual_information,
    };
    if let Some(noise) = &spec.noise {
        let stats = monte_carlo_correlations(&rho, noise, search)?;
        row.classical_std = stats.classical_correlation.std;
        row.concurrence_std = stats.concurrence.std;
        row.discord_std = stats.discord.std;
    }
    Ok(row)
}

/// Noiseless correlations along the grid; with noise, the std columns come
/// from the tomography Monte Carlo at each point.
pub fn sweep(spec: &SweepSpec, search: &OptimizerConfig) -> Result<Vec<SweepRow>> {
    let points = grid_points(spec.start, spec.stop, spec.step)?;
    let mut fixed = spec.fixed;
    spec.variable.set(&mut fixed, points[0]);
    fixed.validate()?;
    points.par_iter().map(|&v| sweep_point(spec, v, search)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Series {
    Rank2,
    Rank3,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::Rank2 => "rank2",
            Series::Rank3 => "rank3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub series: Series,
    /// p for rank-2, m for rank-3.
    pub param: f64,
    pub epsilon: f64,
    pub classical: f64,
    pub discord: f64,
}

pub const SCATTER_HEADER: &str = "series,param,eps,C,Q";

impl ScatterPoint {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.series, self.param, self.epsilon, self.classical, self.discord
        )
    }
}

/// Parameter region sampled for the rank-3 series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank3Region {
    /// The rank-3 maximally discordant subsets:
    /// m ∈ [0, 1] with ε ∈ [0, 1/3], and m = ½ with ε ∈ [1/3, 0.385].
    Mdms,
    /// The whole (m, ε) square. Contains the Bell state at ε = 1, which it
    /// shares with the rank-2 series.
    Full,
}

impl FromStr for Rank3Region {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mdms" => Ok(Rank3Region::Mdms),
            "full" => Ok(Rank3Region::Full),
            _ => Err(Error::invalid(format!("unknown rank-3 region `{s}` (mdms, full)"))),
        }
    }
}

/// Upper end of the m = ½ rank-3 segment.
pub const RANK3_SEGMENT_END: f64 = 0.385;

fn scatter_jobs(step: f64, region: Rank3Region) -> Result<Vec<(Series, f64, f64)>> {
    let axis = grid_points(0.0, 1.0, step)?;
    let mut jobs = Vec::new();
    for &p in &axis {
        for &e in &axis {
            jobs.push((Series::Rank2, p, e));
        }
    }
    match region {
        Rank3Region::Full => {
            for &m in &axis {
                for &e in &axis {
                    jobs.push((Series::Rank3, m, e));
                }
            }
        }
        Rank3Region::Mdms => {
            let low = grid_points(0.0, 1.0 / 3.0, step)?;
            for &m in &axis {
                for &e in &low {
                    jobs.push((Series::Rank3, m, e));
                }
            }
            let mut seg = grid_points(1.0 / 3.0, RANK3_SEGMENT_END, step)?;
            if *seg.last().expect("non-empty") < RANK3_SEGMENT_END {
                seg.push(RANK3_SEGMENT_END);
            }
            for &e in &seg {
                jobs.push((Series::Rank3, 0.5, e));
            }
        }
    }
    Ok(jobs)
}

/// rank2(p, ε) over the square p, ε ∈ [0, 1] and rank3(m, ε) over `region`,
/// on grids of spacing `step`. Rank-2 rows come first.
pub fn scatter(step: f64, region: Rank3Region, search: &OptimizerConfig) -> Result<Vec<ScatterPoint>> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::invalid(format!("scatter step {step} outside (0, 0.1]")));
    }
    scatter_jobs(step, region)?
        .par_iter()
        .map(|&(series, param, epsilon)| {
            let rho = match series {
                Series::Rank2 => rank2(param, epsilon)?,
                Series::Rank3 => rank3(param, epsilon)?,
            };
            let r = correlation_report(&rho, search);
            Ok(ScatterPoint {
                series,
                param,
                epsilon,
                classical: r.classical_correlation,
                discord: r.discord,
            })
        })
        .collect()
}

/// Largest discord of `series` among points whose C satisfies `keep`.
pub fn envelope_max(points: &[ScatterPoint], series: Series, keep: impl Fn(f64) -> bool) -> Option<f64> {
    points
        .iter()
        .filter(|p| p.series == series && keep(p.classical))
        .map(|p| p.discord)
        .fold(None, |acc, q| Some(acc.map_or(q, |a: f64| a.max(q))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoints() {
        let g = grid_points(0.0, 1.0, 0.05).unwrap();
        assert_eq!(g.len(), 21);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(grid_points(0.2, 0.2, 0.1).unwrap(), vec![0.2]);
        assert!(grid_points(0.0, 1.0, 0.0).is_err());
        assert!(grid_points(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn rank2_sweep_is_monotone_and_ends_at_one() {
        let spec = SweepSpec {
            family: Family::Rank2,
            fixed: StateParams::new(0.5, 1.0, 0.0).unwrap(),
            variable: SweepVariable::Eps,
            start: 0.0,
            stop: 1.0,
            step: 0.05,
            noise: None,
        };
        let rows = sweep(&spec, &OptimizerConfig::default()).unwrap();
        assert_eq!(rows.len(), 21);
        for w in rows.windows(2) {
            assert!(w[1].classical >= w[0].classical - 1e-6);
            assert!(w[1].concurrence >= w[0].concurrence - 1e-9);
            assert!(w[1].discord >= w[0].discord - 1e-6);
        }
        let last = rows.last().unwrap();
        assert!((last.classical - 1.0).abs() < 1e-4 && (last.discord - 1.0).abs() < 1e-4);
        assert!(rows.iter().all(|r| r.classical_std == 0.0));
    }

    #[test]
    fn header_and_row_format() {
        assert_eq!(
            sweep_header(SweepVariable::Eps),
            "eps,C,C_std,Cprime,Cprime_std,Q,Q_std,Im"
        );
        assert_eq!(sweep_header(SweepVariable::P), "p,C,C_std,Cprime,Cprime_std,Q,Q_std,Im");
    }

    #[test]
    fn scatter_step_bounds() {
        let cfg = OptimizerConfig::grid_only(16, 16);
        assert!(scatter(0.2, Rank3Region::Full, &cfg).is_err());
        assert!(scatter(0.0, Rank3Region::Full, &cfg).is_err());
        let pts = scatter(0.1, Rank3Region::Full, &cfg).unwrap();
        assert_eq!(pts.len(), 2 * 121);
        assert_eq!(pts[0].series, Series::Rank2);
        assert_eq!(pts[121].series, Series::Rank3);
    }

    #[test]
    fn mdms_region_stays_in_rank3_subsets() {
        let pts = scatter(0.1, Rank3Region::Mdms, &OptimizerConfig::grid_only(8, 8)).unwrap();
        let r3: Vec<_> = pts.iter().filter(|p| p.series == Series::Rank3).collect();
        // 11 m values × ε ∈ {0, 0.1, 0.2, 0.3} plus the m = ½ segment {1/3, 0.385}
        assert_eq!(r3.len(), 44 + 2);
        for p in r3 {
            assert!(p.epsilon <= 1.0 / 3.0 + 1e-12 || (p.param == 0.5 && p.epsilon <= RANK3_SEGMENT_END));
        }
    }
}
