//! Random small instances shared by the integration tests.
#![allow(dead_code)]

use lttf::model::{GainMatrix, NodeSpec, RadioConfig, RateTable};
use rand::Rng;

/// Log-uniform draw in `[lo, hi]`.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

/// Direct gains in `[1e-7, 1e-3]`, cross gains in `[1e-11, 1e-5]`. With the
/// default radio this spans links that fail at every level up to links that
/// reach the top level, with anything from negligible to dominant coupling.
pub fn random_gains(rng: &mut impl Rng, n: usize) -> GainMatrix {
    GainMatrix::from_fn(
        n,
        |from, to| {
            if from == to {
                log_uniform(rng, 1e-7, 1e-3)
            } else {
                log_uniform(rng, 1e-11, 1e-5)
            }
        },
    )
    .unwrap()
}

/// Nodes on distinct controllers. Delay bounds sit between the slowest and
/// fastest disc8 transmission times, so some instances are delay-bound;
/// about a third get a finite energy budget.
pub fn random_nodes(rng: &mut impl Rng, n: usize) -> Vec<NodeSpec> {
    (0..n)
        .map(|i| {
            let packet_bits = if rng.random_bool(0.5) { 50.0 } else { 100.0 };
            let delay_bound = log_uniform(rng, 5e-8, 2e-6);
            let energy_budget = if rng.random_bool(0.3) { log_uniform(rng, 1e-10, 1e-7) } else { f64::INFINITY };
            NodeSpec { id: i as u32, controller_id: i as u32, packet_bits, period: 1, delay_bound, energy_budget }
        })
        .collect()
}

pub fn radio() -> RadioConfig {
    RadioConfig::DEFAULT
}

pub fn tables() -> [(&'static str, RateTable); 2] {
    let w = RadioConfig::DEFAULT.bandwidth_hz;
    [("disc4", RateTable::disc4(w)), ("disc8", RateTable::disc8(w))]
}

/// `max_l R_l / r_l`.
pub fn slot_length(nodes: &[NodeSpec], rates: &[f64]) -> f64 {
    nodes.iter().zip(rates).map(|(n, r)| n.packet_bits / r).fold(0.0, f64::max)
}
