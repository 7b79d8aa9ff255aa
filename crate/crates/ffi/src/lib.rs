//! C ABI for the `lttf` library.
//!
//! Objects cross the boundary as opaque handles created by `*_new` functions
//! and released by the matching `*_free`. Every fallible function returns an
//! [`LttfStatus`]; on failure a description is available from
//! [`lttf_last_error`] on the same thread. Outputs are written through
//! caller-provided pointers and only on success.
//!
//! Node indices are zero-based positions in the node array a network was
//! created from.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use lttf::allocation::{continuous_optimal, lttf as lttf_allocate_levels, AllocationError};
use lttf::feasibility::{min_power_vector, FeasibilityError, PowerSolution};
use lttf::model::{AllocationResult, GainMatrix, NodeSpec, RadioConfig, RateTable};
use lttf::scheduling::{
    exhaustive_schedule, schedule, ExhaustiveGuard, Frame, LinkPricer, RateModel, ScheduleError, ScheduleMetrics,
    Strategy,
};
use lttf::validate_instance;
use lttf::Instance;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LttfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The requested quantity does not exist for this input (no feasible
    /// power vector, a node that cannot transmit).
    Infeasible = 3,
    /// Input exceeds the size limits of an exhaustive search.
    GuardExceeded = 4,
    /// A caller buffer is too small; the required length was written.
    BufferTooSmall = 5,
    Numerical = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LttfStrategy {
    SnaMla = 0,
    SnaMua = 1,
}

/// Per-node requirements, mirroring the library's node record.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LttfNode {
    pub id: u32,
    pub controller_id: u32,
    pub packet_bits: f64,
    /// Packet generation period; nested multiples of the smallest one.
    pub period: u32,
    /// Seconds.
    pub delay_bound: f64,
    /// Joules per packet; may be infinite.
    pub energy_budget: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LttfRadio {
    /// Watts.
    pub p_max: f64,
    /// Total receiver noise power, watts.
    pub noise_power: f64,
    pub bandwidth_hz: f64,
}

/// Scalar part of a rate and power assignment.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LttfAllocation {
    pub feasible: bool,
    /// Seconds; infinite when infeasible.
    pub slot_length: f64,
    pub feasibility_checks: usize,
}

/// Discrete rate table.
pub struct LttfRateTable(RateTable);

/// Nodes, link gains and radio parameters.
pub struct LttfNetwork {
    instance: Instance,
    gains: GainMatrix,
}

/// A computed TDMA frame.
pub struct LttfSchedule {
    frame: Frame,
    metrics: ScheduleMetrics,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(LttfStatus, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(LttfStatus::InvalidArgument, msg.into())
    }

    fn null(what: &str) -> Self {
        Failure(LttfStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<AllocationError> for Failure {
    fn from(e: AllocationError) -> Self {
        let status = match e {
            AllocationError::GuardExceeded { .. } => LttfStatus::GuardExceeded,
            AllocationError::Feasibility(FeasibilityError::NumericalBreakdown { .. }) => LttfStatus::Numerical,
            _ => LttfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<FeasibilityError> for Failure {
    fn from(e: FeasibilityError) -> Self {
        AllocationError::from(e).into()
    }
}

impl From<ScheduleError> for Failure {
    fn from(e: ScheduleError) -> Self {
        let status = match &e {
            ScheduleError::SoloInfeasible { .. } | ScheduleError::NoFeasibleCover { .. } => LttfStatus::Infeasible,
            ScheduleError::GuardExceeded { .. } => LttfStatus::GuardExceeded,
            ScheduleError::Allocation(a) => Failure::from(a.clone()).0,
            ScheduleError::Model(_) => LttfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> LttfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LttfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LttfStatus::Internal
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

fn into_handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lttf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default radio parameters: 0.25 W, 1e-8 W noise, 100 MHz.
#[no_mangle]
pub extern "C" fn lttf_radio_default() -> LttfRadio {
    let d = RadioConfig::DEFAULT;
    LttfRadio { p_max: d.p_max, noise_power: d.noise_power, bandwidth_hz: d.bandwidth_hz }
}

fn radio_from(r: &LttfRadio) -> RadioConfig {
    RadioConfig { p_max: r.p_max, noise_power: r.noise_power, bandwidth_hz: r.bandwidth_hz }
}

/// Rate table from SINR thresholds in dB (`-INFINITY` allowed; such levels
/// are dropped).
///
/// # Safety
/// `thresholds_db` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_rate_table_new(
    thresholds_db: *const f64,
    len: usize,
    bandwidth_hz: f64,
    out: *mut *mut LttfRateTable,
) -> LttfStatus {
    guarded(|| {
        let db = as_slice(thresholds_db, len, "thresholds_db")?;
        let table = RateTable::from_db(db, bandwidth_hz).map_err(|e| Failure::invalid(e.to_string()))?;
        write_out(out, into_handle(LttfRateTable(table)), "out")
    })
}

/// The 4-entry table `{-inf, 10, 20, 30}` dB.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_rate_table_disc4(bandwidth_hz: f64, out: *mut *mut LttfRateTable) -> LttfStatus {
    let db = [f64::NEG_INFINITY, 10.0, 20.0, 30.0];
    lttf_rate_table_new(db.as_ptr(), db.len(), bandwidth_hz, out)
}

/// The 8-entry table `{-inf, 0, 5, ..., 30}` dB.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_rate_table_disc8(bandwidth_hz: f64, out: *mut *mut LttfRateTable) -> LttfStatus {
    let db = [f64::NEG_INFINITY, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
    lttf_rate_table_new(db.as_ptr(), db.len(), bandwidth_hz, out)
}

/// Number of usable levels, or 0 for a null table.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lttf_rate_table_len(table: *const LttfRateTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// Rate (bits/s) and linear SINR threshold of usable level `index`.
///
/// # Safety
/// `table` must be a live handle; the out pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn lttf_rate_table_level(
    table: *const LttfRateTable,
    index: usize,
    rate_out: *mut f64,
    sinr_out: *mut f64,
) -> LttfStatus {
    guarded(|| {
        let t = &as_ref(table, "table")?.0;
        if index >= t.len() {
            return Err(Failure::invalid(format!("level {index} out of range (table has {})", t.len())));
        }
        if !rate_out.is_null() {
            rate_out.write(t.rate(index));
        }
        if !sinr_out.is_null() {
            sinr_out.write(t.sinr(index));
        }
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lttf_rate_table_free(table: *mut LttfRateTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Validates `n` nodes and an `n * n` row-major gain matrix where entry
/// `(l, k)` is the gain from node `l`'s transmitter to node `k`'s receiver.
///
/// # Safety
/// `nodes` must point to `n` records, `gains` to `n * n` doubles, `radio` to
/// one record; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_network_new(
    nodes: *const LttfNode,
    n: usize,
    gains: *const f64,
    radio: *const LttfRadio,
    out: *mut *mut LttfNetwork,
) -> LttfStatus {
    guarded(|| {
        let nodes = as_slice(nodes, n, "nodes")?;
        let gains = as_slice(gains, n.checked_mul(n).ok_or_else(|| Failure::invalid("n too large"))?, "gains")?;
        let radio = radio_from(as_ref(radio, "radio")?);
        let specs: Vec<NodeSpec> = nodes
            .iter()
            .map(|n| NodeSpec {
                id: n.id,
                controller_id: n.controller_id,
                packet_bits: n.packet_bits,
                period: n.period,
                delay_bound: n.delay_bound,
                energy_budget: n.energy_budget,
            })
            .collect();
        let gains = GainMatrix::from_row_major(n, gains.to_vec()).map_err(|e| Failure::invalid(e.to_string()))?;
        let instance = validate_instance(&specs, &radio, &RateTable::disc8(radio.bandwidth_hz))
            .map_err(|e| Failure::invalid(e.to_string()))?;
        write_out(out, into_handle(LttfNetwork { instance, gains }), "out")
    })
}

/// Number of nodes, or 0 for a null network.
///
/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lttf_network_len(network: *const LttfNetwork) -> usize {
    network.as_ref().map_or(0, |n| n.instance.len())
}

/// # Safety
/// `network` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lttf_network_free(network: *mut LttfNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

unsafe fn subset(
    network: *const LttfNetwork,
    members: *const usize,
    count: usize,
) -> Result<(Vec<NodeSpec>, GainMatrix, RadioConfig), Failure> {
    let net = as_ref(network, "network")?;
    let members = as_slice(members, count, "members")?;
    if members.is_empty() {
        return Err(Failure::invalid("empty member list"));
    }
    let n = net.instance.len();
    if let Some(&bad) = members.iter().find(|&&m| m >= n) {
        return Err(Failure::invalid(format!("member {bad} out of range (network has {n} nodes)")));
    }
    let nodes = members.iter().map(|&i| net.instance.nodes[i].clone()).collect();
    Ok((nodes, net.gains.subset(members), net.instance.radio))
}

unsafe fn write_allocation(
    result: &AllocationResult,
    out: *mut LttfAllocation,
    rates_out: *mut f64,
    powers_out: *mut f64,
) -> Result<(), Failure> {
    write_out(
        out,
        LttfAllocation {
            feasible: result.feasible,
            slot_length: result.slot_length,
            feasibility_checks: result.feasibility_checks,
        },
        "out",
    )?;
    if result.feasible {
        if !rates_out.is_null() {
            ptr::copy_nonoverlapping(result.rates.as_ptr(), rates_out, result.rates.len());
        }
        if !powers_out.is_null() {
            ptr::copy_nonoverlapping(result.powers.as_ptr(), powers_out, result.powers.len());
        }
    }
    Ok(())
}

/// Discrete rate and power assignment minimizing the slot length of the
/// `count` nodes listed in `members` transmitting together. When feasible,
/// per-member rates (bits/s) and powers (W) are written to `rates_out` and
/// `powers_out` if they are not null; each must hold `count` doubles.
///
/// # Safety
/// Handles must be live; `members` must point to `count` indices; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_allocate(
    network: *const LttfNetwork,
    table: *const LttfRateTable,
    members: *const usize,
    count: usize,
    out: *mut LttfAllocation,
    rates_out: *mut f64,
    powers_out: *mut f64,
) -> LttfStatus {
    guarded(|| {
        let table = &as_ref(table, "table")?.0;
        let (nodes, gains, radio) = subset(network, members, count)?;
        let result = lttf_allocate_levels(&nodes, &gains, table, &radio)?;
        write_allocation(&result, out, rates_out, powers_out)
    })
}

/// Shannon-rate counterpart of [`lttf_allocate`].
///
/// # Safety
/// As for [`lttf_allocate`].
#[no_mangle]
pub unsafe extern "C" fn lttf_allocate_continuous(
    network: *const LttfNetwork,
    members: *const usize,
    count: usize,
    out: *mut LttfAllocation,
    rates_out: *mut f64,
    powers_out: *mut f64,
) -> LttfStatus {
    guarded(|| {
        let (nodes, gains, radio) = subset(network, members, count)?;
        let result = continuous_optimal(&nodes, &gains, &radio)?;
        write_allocation(&result, out, rates_out, powers_out)
    })
}

/// Component-wise minimum powers meeting linear SINR `targets` for the listed
/// members. Returns `Infeasible` when no finite power vector exists; the
/// spectral radius of the interference matrix is written either way when
/// `radius_out` is not null. The power limit is not applied.
///
/// # Safety
/// `members` and `targets` must point to `count` values; `powers_out` must
/// hold `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn lttf_min_power(
    network: *const LttfNetwork,
    members: *const usize,
    targets: *const f64,
    count: usize,
    powers_out: *mut f64,
    radius_out: *mut f64,
) -> LttfStatus {
    guarded(|| {
        let (_, gains, radio) = subset(network, members, count)?;
        let targets = as_slice(targets, count, "targets")?;
        if powers_out.is_null() {
            return Err(Failure::null("powers_out"));
        }
        let solution = min_power_vector(&gains, targets, radio.noise_power)?;
        if !radius_out.is_null() {
            radius_out.write(solution.spectral_radius());
        }
        match solution {
            PowerSolution::Feasible { powers, .. } => {
                ptr::copy_nonoverlapping(powers.as_ptr(), powers_out, powers.len());
                Ok(())
            }
            PowerSolution::InfeasibleSpectral { spectral_radius } => {
                Err(Failure(LttfStatus::Infeasible, format!("spectral radius {spectral_radius} is not below 1")))
            }
        }
    })
}

unsafe fn build_schedule(
    network: *const LttfNetwork,
    table: *const LttfRateTable,
    subframe_duration: f64,
    out: *mut *mut LttfSchedule,
    run: impl FnOnce(&Instance, &LinkPricer<'_>) -> Result<(Frame, ScheduleMetrics), ScheduleError>,
) -> Result<(), Failure> {
    let net = as_ref(network, "network")?;
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    if !(subframe_duration > 0.0) {
        return Err(Failure::invalid("subframe_duration must be positive"));
    }
    let model = match table.as_ref() {
        Some(t) => RateModel::Discrete(t.0.clone()),
        None => RateModel::Continuous,
    };
    let pricer = LinkPricer::new(&net.instance.nodes, &net.gains, &model, net.instance.radio);
    let (frame, metrics) = run(&net.instance, &pricer)?;
    out.write(into_handle(LttfSchedule { frame, metrics }));
    Ok(())
}

/// Heuristic TDMA schedule. A null `table` selects Shannon rates.
///
/// # Safety
/// `network` must be live, `table` null or live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_new(
    network: *const LttfNetwork,
    table: *const LttfRateTable,
    strategy: LttfStrategy,
    subframe_duration: f64,
    out: *mut *mut LttfSchedule,
) -> LttfStatus {
    let strategy = match strategy {
        LttfStrategy::SnaMla => Strategy::SnaMla,
        LttfStrategy::SnaMua => Strategy::SnaMua,
    };
    guarded(|| {
        build_schedule(network, table, subframe_duration, out, |inst, pricer| {
            schedule(inst, pricer, strategy, subframe_duration)
        })
    })
}

/// Exact minimum schedule for networks of at most `max_nodes` nodes and
/// `max_subframes` subframes.
///
/// # Safety
/// As for [`lttf_schedule_new`].
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_exhaustive(
    network: *const LttfNetwork,
    table: *const LttfRateTable,
    max_nodes: usize,
    max_subframes: usize,
    subframe_duration: f64,
    out: *mut *mut LttfSchedule,
) -> LttfStatus {
    let guard = ExhaustiveGuard { max_nodes, max_subframes };
    guarded(|| {
        build_schedule(network, table, subframe_duration, out, |inst, pricer| {
            exhaustive_schedule(inst, pricer, guard, subframe_duration)
        })
    })
}

/// Largest per-subframe active length in seconds, or NaN for null.
///
/// # Safety
/// `sched` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_max_active(sched: *const LttfSchedule) -> f64 {
    sched.as_ref().map_or(f64::NAN, |s| s.metrics.max_active)
}

/// Number of subframes, or 0 for null.
///
/// # Safety
/// `sched` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_subframe_count(sched: *const LttfSchedule) -> usize {
    sched.as_ref().map_or(0, |s| s.frame.subframe_count)
}

/// Active length of `subframe` and its number of groups.
///
/// # Safety
/// `sched` must be live; out pointers writable or null.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_subframe(
    sched: *const LttfSchedule,
    subframe: usize,
    active_out: *mut f64,
    group_count_out: *mut usize,
) -> LttfStatus {
    guarded(|| {
        let s = as_ref(sched, "sched")?;
        let groups = s
            .frame
            .subframes
            .get(subframe)
            .ok_or_else(|| Failure::invalid(format!("subframe {subframe} out of range")))?;
        if !active_out.is_null() {
            active_out.write(s.metrics.active_lengths[subframe]);
        }
        if !group_count_out.is_null() {
            group_count_out.write(groups.len());
        }
        Ok(())
    })
}

/// Subframe offset of node `node`.
///
/// # Safety
/// `sched` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_offset(sched: *const LttfSchedule, node: usize, out: *mut usize) -> LttfStatus {
    guarded(|| {
        let s = as_ref(sched, "sched")?;
        let offset = *s.frame.offsets.get(node).ok_or_else(|| Failure::invalid(format!("node {node} out of range")))?;
        write_out(out, offset, "out")
    })
}

/// Members and slot length of group `group` in `subframe`. `members_out`
/// holds `capacity` entries; the member count is always written to `len_out`
/// and `BufferTooSmall` is returned if it exceeds `capacity`.
///
/// # Safety
/// `sched` must be live; `members_out` must hold `capacity` entries (may be
/// null when `capacity` is 0); `len_out` writable; `slot_out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_group(
    sched: *const LttfSchedule,
    subframe: usize,
    group: usize,
    members_out: *mut usize,
    capacity: usize,
    len_out: *mut usize,
    slot_out: *mut f64,
) -> LttfStatus {
    guarded(|| {
        let s = as_ref(sched, "sched")?;
        let g = s
            .frame
            .subframes
            .get(subframe)
            .and_then(|gs| gs.get(group))
            .ok_or_else(|| Failure::invalid(format!("group ({subframe}, {group}) out of range")))?;
        write_out(len_out, g.members.len(), "len_out")?;
        if !slot_out.is_null() {
            slot_out.write(g.slot_length);
        }
        if g.members.len() > capacity {
            return Err(Failure(LttfStatus::BufferTooSmall, format!("group has {} members", g.members.len())));
        }
        if !g.members.is_empty() {
            if members_out.is_null() {
                return Err(Failure::null("members_out"));
            }
            ptr::copy_nonoverlapping(g.members.as_ptr(), members_out, g.members.len());
        }
        Ok(())
    })
}

/// # Safety
/// `sched` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lttf_schedule_free(sched: *mut LttfSchedule) {
    if !sched.is_null() {
        drop(Box::from_raw(sched));
    }
}
