//! Minimum slot-length rate and power assignment for a set of concurrently
//! transmitting links.
//!
//! [`lttf`] is the longest-transmission-time-first search over discrete rate
//! levels: start every link at the lowest level meeting its delay bound, then
//! repeatedly raise the level of the link with the longest transmission time
//! until the vector turns infeasible or that link is already at the top level.
//! [`brute_force_optimal`] enumerates every level vector and serves as the
//! optimality oracle; [`continuous_optimal`] is the Shannon-rate baseline.

use std::cell::Cell;

use thiserror::Error;

use crate::feasibility::{self, check_rate_levels, FeasibilityError, FeasibilityReport, Verdict};
use crate::model::{shannon_rate, shannon_sinr, AllocationResult, GainMatrix, NodeSpec, RadioConfig, RateTable};

/// Largest subset accepted by [`brute_force_optimal`].
pub const BRUTE_FORCE_MAX_LINKS: usize = 4;
/// Largest table accepted by [`brute_force_optimal`].
pub const BRUTE_FORCE_MAX_LEVELS: usize = 8;
/// Relative bracket width at which the continuous bisection stops.
pub const CONTINUOUS_REL_TOL: f64 = 1e-6;
/// Grid size of the continuous fallback scan.
pub const CONTINUOUS_GRID_POINTS: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AllocationError {
    #[error("empty link subset")]
    EmptySubset,
    #[error("gain matrix has {gains} links but {nodes} nodes were given")]
    SizeMismatch { nodes: usize, gains: usize },
    #[error("brute force limited to {max_links} links and {max_levels} levels, got {links} links and {levels} levels")]
    GuardExceeded { links: usize, levels: usize, max_links: usize, max_levels: usize },
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

fn check_sizes(nodes: &[NodeSpec], gains: &GainMatrix) -> Result<(), AllocationError> {
    if nodes.is_empty() {
        return Err(AllocationError::EmptySubset);
    }
    if nodes.len() != gains.len() {
        return Err(AllocationError::SizeMismatch { nodes: nodes.len(), gains: gains.len() });
    }
    Ok(())
}

fn discrete_result(
    nodes: &[NodeSpec],
    table: &RateTable,
    levels: Vec<usize>,
    report: FeasibilityReport,
    checks: usize,
) -> AllocationResult {
    let rates: Vec<f64> = levels.iter().map(|&q| table.rate(q)).collect();
    let link_times: Vec<f64> = nodes.iter().zip(&rates).map(|(n, r)| n.packet_bits / r).collect();
    let slot_length = link_times.iter().cloned().fold(0.0, f64::max);
    AllocationResult {
        feasible: true,
        rates,
        powers: report.min_powers.unwrap_or_default(),
        slot_length,
        link_times,
        levels: Some(levels),
        feasibility_checks: checks,
    }
}

/// Index of the longest transmission time; ties go to the lowest index.
fn bottleneck(nodes: &[NodeSpec], levels: &[usize], table: &RateTable) -> usize {
    let mut best = 0;
    let mut best_t = f64::NEG_INFINITY;
    for (i, (n, &q)) in nodes.iter().zip(levels).enumerate() {
        let t = n.packet_bits / table.rate(q);
        if t > best_t {
            best = i;
            best_t = t;
        }
    }
    best
}

/// Longest-transmission-time-first rate and power assignment.
///
/// Returns the last feasible rate vector visited together with its minimum
/// power vector. The result is infeasible (`slot_length = ∞`) iff some link
/// has no level meeting its delay bound or the initial vector fails.
pub fn lttf(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    table: &RateTable,
    radio: &RadioConfig,
) -> Result<AllocationResult, AllocationError> {
    check_sizes(nodes, gains)?;
    let Some(mut levels) = nodes
        .iter()
        .map(|n| table.min_level_for_deadline(n.packet_bits, n.delay_bound))
        .collect::<Option<Vec<usize>>>()
    else {
        return Ok(AllocationResult::infeasible(0));
    };

    let mut checks = 0;
    let mut best: Option<(Vec<usize>, FeasibilityReport)> = None;
    loop {
        let report = check_rate_levels(nodes, gains, &levels, table, radio)?;
        checks += 1;
        if !report.is_feasible() {
            // The bump that broke feasibility is undone by returning the
            // previous vector.
            break;
        }
        let j = bottleneck(nodes, &levels, table);
        best = Some((levels.clone(), report));
        if levels[j] < table.top() {
            levels[j] += 1;
        } else {
            break;
        }
    }
    Ok(match best {
        Some((levels, report)) => discrete_result(nodes, table, levels, report, checks),
        None => AllocationResult::infeasible(checks),
    })
}

/// Exhaustive search over all `Q^|S|` level vectors. Ties in slot length go
/// to the lexicographically smallest level vector.
pub fn brute_force_optimal(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    table: &RateTable,
    radio: &RadioConfig,
) -> Result<AllocationResult, AllocationError> {
    check_sizes(nodes, gains)?;
    let (links, q) = (nodes.len(), table.len());
    if links > BRUTE_FORCE_MAX_LINKS || q > BRUTE_FORCE_MAX_LEVELS {
        return Err(AllocationError::GuardExceeded {
            links,
            levels: q,
            max_links: BRUTE_FORCE_MAX_LINKS,
            max_levels: BRUTE_FORCE_MAX_LEVELS,
        });
    }
    let mut levels = vec![0usize; links];
    let mut checks = 0;
    let mut best: Option<(f64, Vec<usize>, FeasibilityReport)> = None;
    loop {
        let report = check_rate_levels(nodes, gains, &levels, table, radio)?;
        checks += 1;
        if report.is_feasible() {
            let t = nodes.iter().zip(&levels).map(|(n, &l)| n.packet_bits / table.rate(l)).fold(0.0, f64::max);
            if best.as_ref().is_none_or(|(bt, _, _)| t < *bt) {
                best = Some((t, levels.clone(), report));
            }
        }
        // Odometer increment, last index fastest, so visiting order is lexicographic.
        let mut i = links;
        loop {
            if i == 0 {
                return Ok(match best {
                    Some((_, levels, report)) => discrete_result(nodes, table, levels, report, checks),
                    None => AllocationResult::infeasible(checks),
                });
            }
            i -= 1;
            levels[i] += 1;
            if levels[i] < q {
                break;
            }
            levels[i] = 0;
        }
    }
}

struct ContinuousProbe {
    report: FeasibilityReport,
}

fn probe_continuous(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    radio: &RadioConfig,
    t: f64,
) -> Result<ContinuousProbe, AllocationError> {
    let times = link_times(nodes, t);
    let targets: Vec<f64> =
        nodes.iter().zip(&times).map(|(n, &tl)| shannon_sinr(radio.bandwidth_hz, n.packet_bits / tl)).collect();
    if targets.iter().any(|g| !g.is_finite()) {
        // The required SINR overflows: no finite power reaches it.
        let report = FeasibilityReport {
            verdict: Verdict::InfeasibleMaxPower,
            min_powers: None,
            spectral_radius: f64::INFINITY,
        };
        return Ok(ContinuousProbe { report });
    }
    let report = feasibility::check_targets(nodes, gains, &targets, &times, radio)?;
    Ok(ContinuousProbe { report })
}

/// Per-link transmission times for a slot of length `t`: a link whose delay
/// bound is shorter than the slot finishes early, at its bound.
fn link_times(nodes: &[NodeSpec], t: f64) -> Vec<f64> {
    nodes.iter().map(|n| t.min(n.delay_bound)).collect()
}

fn continuous_result(nodes: &[NodeSpec], t: f64, probe: ContinuousProbe, checks: usize) -> AllocationResult {
    let times = link_times(nodes, t);
    AllocationResult {
        feasible: true,
        rates: nodes.iter().zip(&times).map(|(n, &tl)| n.packet_bits / tl).collect(),
        powers: probe.report.min_powers.unwrap_or_default(),
        slot_length: times.iter().copied().fold(0.0, f64::max),
        link_times: times,
        levels: None,
        feasibility_checks: checks,
    }
}

/// Minimum slot length under Shannon rates.
///
/// Link `l` transmits for `t_l = min(t, d_l)` at rate `R_l / t_l`, which needs
/// SINR `2^{R_l/(t_l W)} - 1`, so a tight delay bound shortens that link's
/// burst instead of capping the whole slot. The search brackets `t` between
/// the slowest single-link time at full power and the loosest delay bound,
/// then bisects to a relative
/// width of [`CONTINUOUS_REL_TOL`]. If an energy failure shows up inside the
/// bracket the search falls back to a [`CONTINUOUS_GRID_POINTS`]-point scan
/// and refines around the first feasible grid point.
pub fn continuous_optimal(
    nodes: &[NodeSpec],
    gains: &GainMatrix,
    radio: &RadioConfig,
) -> Result<AllocationResult, AllocationError> {
    check_sizes(nodes, gains)?;
    let counter = Cell::new(0usize);
    let mut probe = |t: f64| {
        counter.set(counter.get() + 1);
        probe_continuous(nodes, gains, radio, t)
    };
    let checks = || counter.get();

    let solo: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            n.packet_bits / shannon_rate(radio.bandwidth_hz, radio.p_max * gains.get(i, i) / radio.noise_power)
        })
        .collect();
    let t_hi = nodes.iter().map(|n| n.delay_bound).fold(0.0, f64::max);
    let t_lo = solo.iter().copied().fold(0.0, f64::max);

    if !t_hi.is_finite() {
        // A link without a delay bound: an unbounded search is not defined.
        return Ok(AllocationResult::infeasible(0));
    }
    if nodes.iter().zip(&solo).any(|(n, &s)| s > n.delay_bound) {
        // Even alone at full power some link misses its own delay bound.
        return Ok(AllocationResult::infeasible(0));
    }
    let lo_probe = probe(t_lo)?;
    if lo_probe.report.is_feasible() {
        return Ok(continuous_result(nodes, t_lo, lo_probe, checks()));
    }
    let hi_probe = probe(t_hi)?;
    let energy_only = |v: Verdict| v == Verdict::InfeasibleEnergy;

    let (mut lo, mut hi, mut hi_probe) = if hi_probe.report.is_feasible() {
        (t_lo, t_hi, hi_probe)
    } else if energy_only(hi_probe.report.verdict) && t_lo < t_hi {
        match grid_scan(&mut probe, t_lo, t_hi)? {
            Some(bracket) => bracket,
            None => return Ok(AllocationResult::infeasible(checks())),
        }
    } else {
        return Ok(AllocationResult::infeasible(checks()));
    };

    let mut scanned = false;
    while hi - lo > CONTINUOUS_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid)?;
        if p.report.is_feasible() {
            hi = mid;
            hi_probe = p;
        } else if energy_only(p.report.verdict) && !scanned {
            // Energy can break monotonicity in t; rescan the original bracket.
            scanned = true;
            if let Some((l, h, hp)) = grid_scan(&mut probe, t_lo, t_hi)? {
                if h < hi {
                    (lo, hi, hi_probe) = (l, h, hp);
                    continue;
                }
            }
            lo = mid;
        } else {
            lo = mid;
        }
    }
    Ok(continuous_result(nodes, hi, hi_probe, checks()))
}

/// First feasible point of an evenly spaced grid over `[lo, hi]`, with the
/// preceding grid point as the infeasible side of the returned bracket.
fn grid_scan(
    probe: &mut impl FnMut(f64) -> Result<ContinuousProbe, AllocationError>,
    lo: f64,
    hi: f64,
) -> Result<Option<(f64, f64, ContinuousProbe)>, AllocationError> {
    let step = (hi - lo) / (CONTINUOUS_GRID_POINTS - 1) as f64;
    let mut prev = lo;
    for k in 0..CONTINUOUS_GRID_POINTS {
        let t = if k + 1 == CONTINUOUS_GRID_POINTS { hi } else { lo + step * k as f64 };
        let p = probe(t)?;
        if p.report.is_feasible() {
            return Ok(Some((prev, t, p)));
        }
        prev = t;
    }
    Ok(None)
}
