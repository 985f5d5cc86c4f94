//! Grid search followed by Nelder–Mead refinement over the measurement sphere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::MeasurementAngles;

/// Two-stage minimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Grid points along θ ∈ [0, π], endpoints included.
    pub grid_theta: usize,
    /// Grid points along φ ∈ [0, 2π), right endpoint excluded.
    pub grid_phi: usize,
    /// Run the simplex stage after the grid.
    pub refine: bool,
    /// Simplex diameter at which refinement stops.
    pub simplex_tol: f64,
    /// Objective evaluations allowed in the simplex stage.
    pub max_evals: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_theta: 64,
            grid_phi: 64,
            refine: true,
            simplex_tol: 1e-6,
            max_evals: 500,
        }
    }
}

impl OptimizerConfig {
    /// Plain grid of the given size, no refinement.
    pub fn grid_only(grid_theta: usize, grid_phi: usize) -> Self {
        Self {
            grid_theta,
            grid_phi,
            refine: false,
            ..Self::default()
        }
    }

    fn theta_step(&self) -> f64 {
        if self.grid_theta > 1 {
            PI / (self.grid_theta - 1) as f64
        } else {
            PI / 8.0
        }
    }

    fn phi_step(&self) -> f64 {
        2.0 * PI / self.grid_phi.max(1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub angles: MeasurementAngles,
    pub value: f64,
    /// Best value seen on the grid alone.
    pub grid_value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f(θ, φ)` with the two-stage search. The result is never worse
/// than the best grid point.
pub fn minimize_on_sphere<F>(config: &OptimizerConfig, mut f: F) -> Minimum
where
    F: FnMut(f64, f64) -> f64,
{
    let n_theta = config.grid_theta.max(1);
    let n_phi = config.grid_phi.max(1);
    let (dt, dp) = (config.theta_step(), config.phi_step());

    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..n_theta {
        let theta = if n_theta > 1 { i as f64 * dt } else { 0.0 };
        for j in 0..n_phi {
            let phi = j as f64 * dp;
            let v = f(theta, phi);
            if v < best.2 {
                best = (theta, phi, v);
            }
        }
    }
    let grid_value = best.2;
    let mut evaluations = n_theta * n_phi;

    if !config.refine {
        return Minimum {
            angles: MeasurementAngles::new_unchecked(best.0, best.1).normalized(),
            value: grid_value,
            grid_value,
            evaluations,
            converged: true,
        };
    }

    let nm = nelder_mead(
        |x| f(x[0], x[1]),
        [best.0, best.1],
        [dt, dp],
        config.simplex_tol,
        config.max_evals,
    );
    evaluations += nm.evaluations;
    let (x, value) = if nm.value < grid_value {
        (nm.x, nm.value)
    } else {
        ([best.0, best.1], grid_value)
    };
    Minimum {
        angles: MeasurementAngles::new_unchecked(x[0], x[1]).normalized(),
        value,
        grid_value,
        evaluations,
        converged: nm.converged,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexResult {
    pub x: [f64; 2],
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Two-dimensional Nelder–Mead with the usual coefficients (1, 2, ½, ½).
/// Stops when the simplex diameter drops below `tol` or after `max_evals`.
pub fn nelder_mead<F>(mut f: F, x0: [f64; 2], step: [f64; 2], tol: f64, max_evals: usize) -> SimplexResult
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut evals = 0usize;
    let mut eval = |x: [f64; 2], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut values = [0.0; 3];
    for k in 0..3 {
        values[k] = eval(simplex[k], &mut evals);
    }

    let diameter = |s: &[[f64; 2]; 3]| {
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        d(s[0], s[1]).max(d(s[0], s[2])).max(d(s[1], s[2]))
    };

    let mut converged = false;
    loop {
        // order: best, middle, worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);

        if diameter(&simplex) < tol {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };

        let xr = along(-1.0);
        let fr = eval(xr, &mut evals);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = eval(xe, &mut evals);
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[2] {
            let xc = along(-0.5);
            (xc, eval(xc, &mut evals))
        } else {
            let xc = along(0.5);
            (xc, eval(xc, &mut evals))
        };
        if fc < values[2].min(fr) {
            simplex[2] = xc;
            values[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for k in 1..3 {
            simplex[k] = [
                simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
            ];
            values[k] = eval(simplex[k], &mut evals);
        }
    }

    SimplexResult {
        x: simplex[0],
        value: values[0],
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let r = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            [0.0, 0.0],
            [0.5, 0.5],
            1e-8,
            2000,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn nelder_mead_reports_budget_exhaustion() {
        let r = nelder_mead(|x| x[0].powi(2) + x[1].powi(2), [5.0, 5.0], [0.1, 0.1], 1e-12, 10);
        assert!(!r.converged);
        assert!(r.evaluations >= 10);
    }

    #[test]
    fn refinement_never_regresses_grid() {
        let config = OptimizerConfig {
            grid_theta: 8,
            grid_phi: 8,
            ..OptimizerConfig::default()
        };
        let m = minimize_on_sphere(&config, |t, p| (t - 1.234).powi(2) + (p - 2.5).cos());
        assert!(m.value <= m.grid_value);
        assert!((m.angles.theta - 1.234).abs() < 1e-5);
    }

    #[test]
    fn grid_only_skips_simplex() {
        let config = OptimizerConfig::grid_only(5, 4);
        let mut calls = 0;
        let m = minimize_on_sphere(&config, |t, _| {
            calls += 1;
            t
        });
        assert_eq!(calls, 20);
        assert_eq!(m.evaluations, 20);
        assert_eq!(m.value, 0.0);
    }
}
