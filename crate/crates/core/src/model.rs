//! Domain types shared by the rest of the crate: discrete rate tables, node
//! requirements, radio parameters, gain matrices and allocation results.
//!
//! Units are SI throughout: watts, hertz, seconds, bits and bits/second.
//! SINR values are linear ratios unless a name ends in `_db`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// SINR thresholds (dB) of the four-level table. The `-inf` entry is the
/// "cannot transmit" level and is dropped when the table is built.
pub const DISC4_DB: [f64; 4] = [f64::NEG_INFINITY, 10.0, 20.0, 30.0];

/// SINR thresholds (dB) of the eight-level table.
pub const DISC8_DB: [f64; 8] = [f64::NEG_INFINITY, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("no positive rate levels")]
    NoPositiveRates,
    #[error("SINR thresholds must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("rates must be strictly increasing (index {0})")]
    RatesNotIncreasing(usize),
    #[error("SINR to rate map is not concave at level {0}")]
    NotConcave(usize),
    #[error("invalid {what}: {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    #[error("gain matrix must be square with {expected} entries, got {got}")]
    GainShape { expected: usize, got: usize },
    #[error("gain entry ({row}, {col}) must be positive and finite, got {value}")]
    InvalidGain { row: usize, col: usize, value: f64 },
    #[error("instance has no nodes")]
    EmptyInstance,
    #[error("duplicate node id {0}")]
    DuplicateId(u32),
    #[error("node {id}: {reason}")]
    InvalidNode { id: u32, reason: String },
    #[error("non-nested periods: {period} is not a power-of-two multiple of {min_period}")]
    NonNestedPeriods { period: u32, min_period: u32 },
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Shannon rate `W log2(1 + sinr)` in bits/second.
pub fn shannon_rate(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Inverse of [`shannon_rate`]: the SINR needed to carry `rate` over `bandwidth_hz`.
pub fn shannon_sinr(bandwidth_hz: f64, rate: f64) -> f64 {
    (rate / bandwidth_hz * std::f64::consts::LN_2).exp_m1()
}

/// One usable rate level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateLevel {
    /// Linear SINR threshold.
    pub sinr: f64,
    /// Rate in bits/second.
    pub rate: f64,
}

/// Ordered discrete rate levels `(threshold, rate)`, lowest first.
///
/// Both columns are strictly increasing and the threshold-to-rate map is
/// concave over the listed points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    levels: Vec<RateLevel>,
    bandwidth_hz: f64,
    /// Thresholds (dB) that produced a nonpositive rate and were discarded.
    dropped_db: Vec<f64>,
}

impl RateTable {
    /// Builds a table from dB thresholds with Shannon rates `W log2(1 + γ)`.
    /// Levels whose rate is not strictly positive are dropped.
    pub fn from_db(sinr_thresholds_db: &[f64], bandwidth_hz: f64) -> Result<Self, ModelError> {
        positive("bandwidth", bandwidth_hz)?;
        for (i, w) in sinr_thresholds_db.windows(2).enumerate() {
            if w[0].is_nan() || !(w[0] < w[1]) {
                return Err(ModelError::NotIncreasing(i + 1));
            }
        }
        let mut levels = Vec::with_capacity(sinr_thresholds_db.len());
        let mut dropped_db = Vec::new();
        for &db in sinr_thresholds_db {
            if db.is_nan() || db == f64::INFINITY {
                return Err(ModelError::InvalidParameter { what: "SINR threshold (dB)", value: db });
            }
            let sinr = db_to_linear(db);
            let rate = shannon_rate(bandwidth_hz, sinr);
            if rate > 0.0 {
                levels.push(RateLevel { sinr, rate });
            } else {
                dropped_db.push(db);
            }
        }
        if levels.is_empty() {
            return Err(ModelError::NoPositiveRates);
        }
        Ok(Self { levels, bandwidth_hz, dropped_db })
    }

    /// Builds a table from explicit `(linear threshold, rate)` pairs.
    pub fn from_levels(levels: Vec<RateLevel>, bandwidth_hz: f64) -> Result<Self, ModelError> {
        positive("bandwidth", bandwidth_hz)?;
        if levels.is_empty() {
            return Err(ModelError::NoPositiveRates);
        }
        for l in &levels {
            positive("SINR threshold", l.sinr)?;
            positive("rate", l.rate)?;
        }
        for i in 1..levels.len() {
            if !(levels[i - 1].sinr < levels[i].sinr) {
                return Err(ModelError::NotIncreasing(i));
            }
            if !(levels[i - 1].rate < levels[i].rate) {
                return Err(ModelError::RatesNotIncreasing(i));
            }
        }
        // Slopes between consecutive points must not increase.
        for i in 2..levels.len() {
            let (a, b, c) = (levels[i - 2], levels[i - 1], levels[i]);
            let s1 = (b.rate - a.rate) / (b.sinr - a.sinr);
            let s2 = (c.rate - b.rate) / (c.sinr - b.sinr);
            if s2 > s1 * (1.0 + 1e-12) {
                return Err(ModelError::NotConcave(i - 1));
            }
        }
        Ok(Self { levels, bandwidth_hz, dropped_db: Vec::new() })
    }

    pub fn disc4(bandwidth_hz: f64) -> Self {
        Self::from_db(&DISC4_DB, bandwidth_hz).expect("disc4 table is valid")
    }

    pub fn disc8(bandwidth_hz: f64) -> Self {
        Self::from_db(&DISC8_DB, bandwidth_hz).expect("disc8 table is valid")
    }

    /// Number of usable levels `Q`.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[RateLevel] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> RateLevel {
        self.levels[index]
    }

    pub fn rate(&self, index: usize) -> f64 {
        self.levels[index].rate
    }

    pub fn sinr(&self, index: usize) -> f64 {
        self.levels[index].sinr
    }

    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn dropped_db(&self) -> &[f64] {
        &self.dropped_db
    }

    /// Index of the level carrying exactly `rate`.
    pub fn index_of(&self, rate: f64) -> Option<usize> {
        self.levels.iter().position(|l| l.rate == rate)
    }

    /// Lowest level whose rate delivers `bits` within `deadline` seconds.
    pub fn min_level_for_deadline(&self, bits: f64, deadline: f64) -> Option<usize> {
        self.levels.iter().position(|l| bits / l.rate <= deadline)
    }
}

/// One sensor link and its requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: u32,
    pub controller_id: u32,
    /// Packet size `R_l` in bits.
    pub packet_bits: f64,
    /// Packet generation period in base time units (integer ticks).
    pub period: u32,
    /// Delay bound `d_l` in seconds.
    pub delay_bound: f64,
    /// Per-packet transmit-energy cap `e_l` in joules; `f64::INFINITY` means unconstrained.
    pub energy_budget: f64,
}

impl NodeSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |reason: String| Err(ModelError::InvalidNode { id: self.id, reason });
        if !(self.packet_bits > 0.0) || !self.packet_bits.is_finite() {
            return bad(format!("packet_bits must be positive, got {}", self.packet_bits));
        }
        if self.period == 0 {
            return bad("period must be at least 1".into());
        }
        if !(self.delay_bound > 0.0) || self.delay_bound.is_nan() {
            return bad(format!("delay_bound must be positive, got {}", self.delay_bound));
        }
        if !(self.energy_budget > 0.0) || self.energy_budget.is_nan() {
            return bad(format!("energy_budget must be positive, got {}", self.energy_budget));
        }
        Ok(())
    }
}

/// Transmitter and receiver parameters shared by every link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Maximum transmit power in watts.
    pub p_max: f64,
    /// Total receiver noise power `N_0` in watts.
    pub noise_power: f64,
    /// Channel bandwidth in hertz.
    pub bandwidth_hz: f64,
}

impl RadioConfig {
    /// 250 mW, 1e-8 W noise, 100 MHz.
    pub const DEFAULT: RadioConfig = RadioConfig { p_max: 0.25, noise_power: 1e-8, bandwidth_hz: 100e6 };

    pub fn validate(&self) -> Result<(), ModelError> {
        positive("p_max", self.p_max)?;
        positive("noise_power", self.noise_power)?;
        positive("bandwidth", self.bandwidth_hz)?;
        Ok(())
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

fn positive(what: &'static str, value: f64) -> Result<(), ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { what, value })
    }
}

/// Square matrix of linear power gains. `get(l, k)` is the gain from the
/// transmitter of link `l` to the receiver of link `k`; the diagonal holds
/// the desired-link gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMatrix {
    n: usize,
    g: Vec<f64>,
}

impl GainMatrix {
    pub fn from_row_major(n: usize, g: Vec<f64>) -> Result<Self, ModelError> {
        if g.len() != n * n {
            return Err(ModelError::GainShape { expected: n * n, got: g.len() });
        }
        for (i, &value) in g.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::InvalidGain { row: i / n, col: i % n, value });
            }
        }
        Ok(Self { n, g })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        let n = rows.len();
        let g: Vec<f64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ModelError::GainShape { expected: n * n, got: g.len() });
        }
        Self::from_row_major(n, g)
    }

    /// Builds a matrix from a generator. Entries are still validated.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self, ModelError> {
        let mut g = Vec::with_capacity(n * n);
        for l in 0..n {
            for k in 0..n {
                g.push(f(l, k));
            }
        }
        Self::from_row_major(n, g)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.g[from * self.n + to]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.g
    }

    /// Restriction to the links in `members`, in that order.
    pub fn subset(&self, members: &[usize]) -> GainMatrix {
        let n = members.len();
        let mut g = Vec::with_capacity(n * n);
        for &l in members {
            for &k in members {
                g.push(self.get(l, k));
            }
        }
        GainMatrix { n, g }
    }
}

/// Outcome of a rate/power assignment for one concurrently transmitting subset.
///
/// When `feasible` is false the vectors are empty and `slot_length` is
/// `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub feasible: bool,
    /// Per-link rate in bits/second.
    pub rates: Vec<f64>,
    /// Per-link transmit power in watts.
    pub powers: Vec<f64>,
    /// Common slot length `t = max_l t_l` in seconds.
    pub slot_length: f64,
    /// Per-link transmission time `t_l = R_l / x_l`.
    pub link_times: Vec<f64>,
    /// Rate-table index per link (discrete allocations only).
    pub levels: Option<Vec<usize>>,
    /// Number of rate vectors tested for feasibility.
    pub feasibility_checks: usize,
}

impl AllocationResult {
    pub fn infeasible(feasibility_checks: usize) -> Self {
        Self {
            feasible: false,
            rates: Vec::new(),
            powers: Vec::new(),
            slot_length: f64::INFINITY,
            link_times: Vec::new(),
            levels: None,
            feasibility_checks,
        }
    }
}

/// A validated set of nodes with nested periods.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub nodes: Vec<NodeSpec>,
    pub radio: RadioConfig,
    min_period: u32,
    subframe_count: usize,
}

impl Instance {
    pub fn min_period(&self) -> u32 {
        self.min_period
    }

    /// Frame length in subframes: `max period / min period`.
    pub fn subframe_count(&self) -> usize {
        self.subframe_count
    }

    /// Period of node `i` expressed in subframes.
    pub fn period_in_subframes(&self, i: usize) -> usize {
        (self.nodes[i].period / self.min_period) as usize
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Checks node parameters, id uniqueness, radio parameters and period
/// nesting. Every period must be a power-of-two multiple of the smallest.
pub fn validate_instance(nodes: &[NodeSpec], radio: &RadioConfig, table: &RateTable) -> Result<Instance, ModelError> {
    radio.validate()?;
    positive("rate table bandwidth", table.bandwidth_hz())?;
    if nodes.is_empty() {
        return Err(ModelError::EmptyInstance);
    }
    let mut seen = HashSet::new();
    for n in nodes {
        n.validate()?;
        if !seen.insert(n.id) {
            return Err(ModelError::DuplicateId(n.id));
        }
    }
    let min_period = nodes.iter().map(|n| n.period).min().unwrap_or(1);
    let max_period = nodes.iter().map(|n| n.period).max().unwrap_or(1);
    for n in nodes {
        let ratio = n.period / min_period;
        if n.period % min_period != 0 || !ratio.is_power_of_two() {
            return Err(ModelError::NonNestedPeriods { period: n.period, min_period });
        }
    }
    Ok(Instance {
        nodes: nodes.to_vec(),
        radio: *radio,
        min_period,
        subframe_count: (max_period / min_period) as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: u32, period: u32) -> NodeSpec {
        NodeSpec { id, controller_id: id, packet_bits: 100.0, period, delay_bound: 1e-3, energy_budget: f64::INFINITY }
    }

    #[test]
    fn disc4_levels() {
        let t = RateTable::from_db(&DISC4_DB, 100e6).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.dropped_db(), &[f64::NEG_INFINITY]);
        // 100e6 * log2(11), hand value 345.9431619 Mbit/s
        assert!((t.rate(0) - 345_943_161.9).abs() < 1.0);
        assert!((t.sinr(0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_db_gives_bandwidth() {
        let t = RateTable::from_db(&[0.0], 20e6).unwrap();
        assert_eq!(t.len(), 1);
        assert!((t.rate(0) - 20e6).abs() < 1e-6);
    }

    #[test]
    fn only_neg_inf_is_rejected() {
        assert_eq!(RateTable::from_db(&[f64::NEG_INFINITY], 1e6).unwrap_err(), ModelError::NoPositiveRates);
        assert!(RateTable::from_db(&[], 1e6).is_err());
    }

    #[test]
    fn non_increasing_thresholds_rejected() {
        assert!(matches!(RateTable::from_db(&[0.0, 10.0, 10.0], 1e6), Err(ModelError::NotIncreasing(2))));
        assert!(RateTable::from_db(&[0.0], 0.0).is_err());
    }

    #[test]
    fn tables_are_monotone_and_round_trip() {
        for t in [RateTable::disc4(100e6), RateTable::disc8(100e6)] {
            for w in t.levels().windows(2) {
                assert!(w[0].sinr < w[1].sinr);
                assert!(w[0].rate < w[1].rate);
            }
            for q in 0..t.len() {
                assert_eq!(t.index_of(t.rate(q)), Some(q));
            }
        }
    }

    #[test]
    fn disc4_nested_in_disc8() {
        let d4 = RateTable::disc4(100e6);
        let d8 = RateTable::disc8(100e6);
        for l in d4.levels() {
            assert!(d8.index_of(l.rate).is_some());
        }
    }

    #[test]
    fn from_levels_rejects_convex_map() {
        let levels = vec![
            RateLevel { sinr: 1.0, rate: 1.0 },
            RateLevel { sinr: 2.0, rate: 2.0 },
            RateLevel { sinr: 3.0, rate: 4.0 },
        ];
        assert!(matches!(RateTable::from_levels(levels, 1.0), Err(ModelError::NotConcave(1))));
        let ok = vec![RateLevel { sinr: 1.0, rate: 1.0 }, RateLevel { sinr: 3.0, rate: 2.0 }];
        assert!(RateTable::from_levels(ok, 1.0).is_ok());
    }

    #[test]
    fn deadline_floor_level() {
        let t = RateTable::disc4(100e6);
        assert_eq!(t.min_level_for_deadline(100.0, 1.0), Some(0));
        assert_eq!(t.min_level_for_deadline(100.0, 1e-12), None);
        let between = 100.0 / t.rate(1);
        assert_eq!(t.min_level_for_deadline(100.0, between), Some(1));
    }

    #[test]
    fn shannon_inverse() {
        for sinr in [1e-3, 0.5, 1.0, 10.0, 1e3] {
            let r = shannon_rate(1e6, sinr);
            assert!((shannon_sinr(1e6, r) - sinr).abs() <= 1e-9 * sinr);
        }
    }

    #[test]
    fn accepts_nested_periods() {
        let nodes: Vec<_> = [1, 2, 2, 2].iter().enumerate().map(|(i, &p)| node(i as u32, p)).collect();
        let inst = validate_instance(&nodes, &RadioConfig::DEFAULT, &RateTable::disc8(100e6)).unwrap();
        assert_eq!(inst.subframe_count(), 2);
        assert_eq!(inst.period_in_subframes(0), 1);
        assert_eq!(inst.period_in_subframes(3), 2);
    }

    #[test]
    fn rejects_bad_instances() {
        let table = RateTable::disc8(100e6);
        let radio = RadioConfig::DEFAULT;
        let mut zero_bits = node(0, 1);
        zero_bits.packet_bits = 0.0;
        assert!(matches!(validate_instance(&[zero_bits], &radio, &table), Err(ModelError::InvalidNode { id: 0, .. })));
        assert!(matches!(
            validate_instance(&[node(0, 1), node(1, 3)], &radio, &table),
            Err(ModelError::NonNestedPeriods { period: 3, min_period: 1 })
        ));
        assert!(matches!(
            validate_instance(&[node(0, 2), node(1, 6)], &radio, &table),
            Err(ModelError::NonNestedPeriods { .. })
        ));
        assert_eq!(
            validate_instance(&[node(4, 1), node(4, 1)], &radio, &table).unwrap_err(),
            ModelError::DuplicateId(4)
        );
        assert_eq!(validate_instance(&[], &radio, &table).unwrap_err(), ModelError::EmptyInstance);
        let bad_radio = RadioConfig { p_max: -1.0, ..radio };
        assert!(validate_instance(&[node(0, 1)], &bad_radio, &table).is_err());
    }

    #[test]
    fn gain_matrix_validation_and_subset() {
        assert!(GainMatrix::from_row_major(2, vec![1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(GainMatrix::from_row_major(2, vec![1.0; 3]).is_err());
        let g = GainMatrix::from_fn(3, |l, k| (1 + 10 * l + k) as f64).unwrap();
        let s = g.subset(&[2, 0]);
        assert_eq!(s.get(0, 0), 23.0);
        assert_eq!(s.get(0, 1), 21.0);
        assert_eq!(s.get(1, 0), 3.0);
    }
}
