//! Feasibility of a target rate vector for a set of concurrently transmitting
//! links.
//!
//! For per-link SINR targets `γ_i`, the SINR constraints
//! `p_i g_ii >= γ_i (N_0 + Σ_{j≠i} p_j g_ji)` read `p >= F p + u` with
//!
//! ```text
//! F[i][j] = γ_i g_ji / g_ii   (j ≠ i),   F[i][i] = 0,   u[i] = γ_i N_0 / g_ii
//! ```
//!
//! A nonnegative solution exists iff the Perron root `ρ(F) < 1`, in which case
//! `p* = (I - F)^{-1} u` is the component-wise minimum power vector and every
//! link meets its target with equality. The power, delay and energy limits are
//! then checked against `p*`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Square};
use crate::model::{GainMatrix, NodeSpec, RadioConfig, RateTable};

/// Convergence tolerance of the Perron root iteration.
pub const SPECTRAL_TOL: f64 = 1e-12;
/// Iteration cap of the Perron root iteration.
pub const SPECTRAL_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("SINR target {index} must be positive and finite, got {value}")]
    InvalidTarget { index: usize, value: f64 },
    #[error("noise power must be positive and finite, got {0}")]
    InvalidNoise(f64),
    #[error("rate {0} b/s is not a level of the rate table")]
    RateNotInTable(f64),
    #[error("rate level {0} is out of range")]
    LevelOutOfRange(usize),
    #[error(
        "numerical breakdown: spectral radius {spectral_radius} < 1 but (I - F) p = u has no nonnegative solution"
    )]
    NumericalBreakdown { spectral_radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Feasible,
    InfeasibleSpectral,
    InfeasibleMaxPower,
    InfeasibleDelay,
    InfeasibleEnergy,
}

impl Verdict {
    pub fn is_feasible(self) -> bool {
        self == Verdict::Feasible
    }
}

/// Outcome of the SINR-only power solve.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerSolution {
    Feasible { powers: Vec<f64>, spectral_radius: f64 },
    InfeasibleSpectral { spectral_radius: f64 },
}

impl PowerSolution {
    pub fn spectral_radius(&self) -> f64 {
        match self {
            PowerSolution::Feasible { spectral_radius, .. } | PowerSolution::InfeasibleSpectral { spectral_radius } => {
                *spectral_radius
            }
        }
    }

    pub fn powers(&self) -> Option<&[f64]> {
        match self {
            PowerSolution::Feasible { powers, .. } => Some(powers),
            PowerSolution::InfeasibleSpectral { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    /// Minimum power vector; present whenever the spectral condition holds.
    pub min_powers: Option<Vec<f64>>,
    /// Perron root estimate, bracketed only tightly enough to compare it
    /// with 1. [`spectral_radius`] gives the converged value.
    pub spectral_radius: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.verdict.is_feasible()
    }
}

/// Normalized interference matrix `F` and noise vector `u` (row-major `F`).
pub fn interference_system(gains: &GainMatrix, sinr_targets: &[f64], noise: f64) -> (Vec<f64>, Vec<f64>) {
    let n = gains.len();
    let mut f = vec![0.0; n * n];
    let mut u = vec![0.0; n];
    for i in 0..n {
        let own = gains.get(i, i);
        for j in 0..n {
            if j != i {
                f[i * n + j] = sinr_targets[i] * gains.get(j, i) / own;
            }
        }
        u[i] = sinr_targets[i] * noise / own;
    }
    (f, u)
}

/// Perron root of the normalized interference matrix for `sinr_targets`.
pub fn spectral_radius(gains: &GainMatrix, sinr_targets: &[f64]) -> f64 {
    let (f, _) = interference_system(gains, sinr_targets, 1.0);
    linalg::perron_root(Square { n: gains.len(), a: &f }, SPECTRAL_TOL, SPECTRAL_MAX_ITER, None).radius
}

/// Component-wise minimum power vector meeting every SINR target with
/// equality, or `InfeasibleSpectral` when `ρ(F) >= 1`.
pub fn min_power_vector(
    gains: &GainMatrix,
    sinr_targets: &[f64],
    noise: f64,
) -> Result<PowerSolution, FeasibilityError> {
    solve_min_powers(gains, sinr_targets, noise, false)
}

/// With `decide_only`, the Perron iteration stops as soon as its bracket
/// settles `ρ < 1` either way, so the reported radius is only that accurate.
fn solve_min_powers(
    gains: &GainMatrix,
    sinr_targets: &[f64],
    noise: f64,
    decide_only: bool,
) -> Result<PowerSolution, FeasibilityError> {
    let n = gains.len();
    if sinr_targets.len() != n {
        return Err(FeasibilityError::DimensionMismatch { expected: n, got: sinr_targets.len() });
    }
    for (index, &value) in sinr_targets.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(FeasibilityError::InvalidTarget { index, value });
        }
    }
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(FeasibilityError::InvalidNoise(noise));
    }

    let (f, u) = interference_system(gains, sinr_targets, noise);
    let threshold = decide_only.then_some(1.0);
    let est = linalg::perron_root(Square { n, a: &f }, SPECTRAL_TOL, SPECTRAL_MAX_ITER, threshold);
    let spectral_radius = est.radius;

    // Clearly infeasible: skip the solve.
    if est.converged && est.lower >= 1.0 {
        return Ok(PowerSolution::InfeasibleSpectral { spectral_radius });
    }

    let mut a = f;
    for v in a.iter_mut() {
        *v = -*v;
    }
    for i in 0..n {
        a[i * n + i] = 1.0;
    }
    let solution = linalg::solve(Square { n, a: &a }, &u).filter(|p| p.iter().all(|&v| v > 0.0));

    // For irreducible F and u > 0, a nonnegative solution of (I - F) p = u
    // exists iff ρ(F) < 1; the solve settles the verdict when the bracket
    // straddles 1 or the iteration hit its cap.
    let certain_below = est.converged && est.upper < 1.0;
    match solution {
        Some(powers) if certain_below || est.radius < 1.0 || !est.converged => {
            Ok(PowerSolution::Feasible { powers, spectral_radius })
        }
        Some(_) => Ok(PowerSolution::InfeasibleSpectral { spectral_radius }),
        None if certain_below => Err(FeasibilityError::NumericalBreakdown { spectral_radius }),
        None => Ok(PowerSolution::InfeasibleSpectral { spectral_radius }),
    }
}

/// SINR each link achieves under `powers`.
pub fn achieved_sinr(gains: &GainMatrix, powers: &[f64], noise: f64) -> Vec<f64> {
    let n = gains.len();
    (0..n)
        .map(|i| {
            let interference: f64 = (0..n).filter(|&j| j != i).map(|j| powers[j] * gains.get(j, i)).sum();
            powers[i] * gains.get(i, i) / (noise + interference)
        })
        .collect()
}

/// Checks SINR targets and per-link times against the power, delay and
/// energy limits. Checks run in the order spectral, power, delay, energy and
/// the first failure names the verdict.
pub fn check_targets(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    sinr_targets: &[f64],
    link_times: &[f64],
    radio: &RadioConfig,
) -> Result<FeasibilityReport, FeasibilityError> {
    let n = gains.len();
    for len in [nodes.len(), link_times.len()] {
        if len != n {
            return Err(FeasibilityError::DimensionMismatch { expected: n, got: len });
        }
    }
    let (powers, spectral_radius) = match solve_min_powers(gains, sinr_targets, radio.noise_power, true)? {
        PowerSolution::InfeasibleSpectral { spectral_radius } => {
            return Ok(FeasibilityReport { verdict: Verdict::InfeasibleSpectral, min_powers: None, spectral_radius })
        }
        PowerSolution::Feasible { powers, spectral_radius } => (powers, spectral_radius),
    };
    let verdict = if powers.iter().any(|&p| p > radio.p_max) {
        Verdict::InfeasibleMaxPower
    } else if nodes.iter().zip(link_times).any(|(node, &t)| t > node.delay_bound) {
        Verdict::InfeasibleDelay
    } else if nodes.iter().zip(link_times).zip(&powers).any(|((node, &t), &p)| t * p > node.energy_budget) {
        Verdict::InfeasibleEnergy
    } else {
        Verdict::Feasible
    };
    Ok(FeasibilityReport { verdict, min_powers: Some(powers), spectral_radius })
}

/// Feasibility of a vector of rate-table indices.
pub fn check_rate_levels(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    levels: &[usize],
    table: &RateTable,
    radio: &RadioConfig,
) -> Result<FeasibilityReport, FeasibilityError> {
    if levels.len() != nodes.len() {
        return Err(FeasibilityError::DimensionMismatch { expected: nodes.len(), got: levels.len() });
    }
    if let Some(&bad) = levels.iter().find(|&&q| q >= table.len()) {
        return Err(FeasibilityError::LevelOutOfRange(bad));
    }
    let targets: Vec<f64> = levels.iter().map(|&q| table.sinr(q)).collect();
    let times: Vec<f64> = nodes.iter().zip(levels).map(|(node, &q)| node.packet_bits / table.rate(q)).collect();
    check_targets(nodes, gains, &targets, &times, radio)
}

/// Feasibility of a vector of rates (bits/s), each of which must be a level
/// of `table`.
pub fn check_rate_vector(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    rates: &[f64],
    table: &RateTable,
    radio: &RadioConfig,
) -> Result<FeasibilityReport, FeasibilityError> {
    let levels = rates
        .iter()
        .map(|&r| table.index_of(r).ok_or(FeasibilityError::RateNotInTable(r)))
        .collect::<Result<Vec<_>, _>>()?;
    check_rate_levels(nodes, gains, &levels, table, radio)
}
