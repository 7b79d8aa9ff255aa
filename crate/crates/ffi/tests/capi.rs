use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use lttf_ffi::*;

fn node(id: u32, controller: u32, period: u32) -> LttfNode {
    LttfNode {
        id,
        controller_id: controller,
        packet_bits: 100.0,
        period,
        delay_bound: 1e-3,
        energy_budget: f64::INFINITY,
    }
}

fn last_error() -> String {
    let p = lttf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

struct Fixture {
    table: *mut LttfRateTable,
    net: *mut LttfNetwork,
}

impl Fixture {
    fn new(nodes: &[LttfNode], gains: &[f64], radio: LttfRadio) -> Self {
        let mut table = ptr::null_mut();
        let mut net = ptr::null_mut();
        unsafe {
            assert_eq!(lttf_rate_table_disc8(radio.bandwidth_hz, &mut table), LttfStatus::Ok);
            assert_eq!(lttf_network_new(nodes.as_ptr(), nodes.len(), gains.as_ptr(), &radio, &mut net), LttfStatus::Ok);
        }
        Self { table, net }
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe {
            lttf_network_free(self.net);
            lttf_rate_table_free(self.table);
        }
    }
}

#[test]
fn rate_table_levels() {
    let mut table = ptr::null_mut();
    unsafe {
        assert_eq!(lttf_rate_table_disc4(100e6, &mut table), LttfStatus::Ok);
        assert_eq!(lttf_rate_table_len(table), 3);
        let mut rate = 0.0;
        let mut sinr = 0.0;
        assert_eq!(lttf_rate_table_level(table, 0, &mut rate, &mut sinr), LttfStatus::Ok);
        assert!((rate - 100e6 * 11f64.log2()).abs() < 1e-3);
        assert!((sinr - 10.0).abs() < 1e-12);
        assert_eq!(lttf_rate_table_level(table, 3, &mut rate, ptr::null_mut()), LttfStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        lttf_rate_table_free(table);

        let only_zero = [f64::NEG_INFINITY];
        let mut t2 = ptr::null_mut();
        assert_eq!(lttf_rate_table_new(only_zero.as_ptr(), 1, 1e6, &mut t2), LttfStatus::InvalidArgument);
        assert!(t2.is_null());
        assert_eq!(lttf_rate_table_len(ptr::null()), 0);
    }
}

#[test]
fn network_validation_errors() {
    let radio = lttf_radio_default();
    let gains = [1e-7; 4];
    let mut net = ptr::null_mut();
    unsafe {
        let dup = [node(1, 0, 1), node(1, 1, 1)];
        assert_eq!(lttf_network_new(dup.as_ptr(), 2, gains.as_ptr(), &radio, &mut net), LttfStatus::InvalidArgument);
        let bad_periods = [node(1, 0, 1), node(2, 1, 3)];
        assert_eq!(
            lttf_network_new(bad_periods.as_ptr(), 2, gains.as_ptr(), &radio, &mut net),
            LttfStatus::InvalidArgument
        );
        assert!(last_error().contains("nested"));
        let ok = [node(1, 0, 1), node(2, 1, 1)];
        assert_eq!(lttf_network_new(ok.as_ptr(), 2, ptr::null(), &radio, &mut net), LttfStatus::NullPointer);
        assert_eq!(lttf_network_new(ok.as_ptr(), 2, gains.as_ptr(), ptr::null(), &mut net), LttfStatus::NullPointer);
        assert!(net.is_null());
    }
}

#[test]
fn single_link_allocation_matches_closed_form() {
    // SNR at p_max is 0.25 * 1e-3 / 1e-8 = 25000 (44 dB): top disc8 level.
    let radio = lttf_radio_default();
    let f = Fixture::new(&[node(1, 0, 1)], &[1e-3], radio);
    let members = [0usize];
    let mut out = LttfAllocation { feasible: false, slot_length: 0.0, feasibility_checks: 0 };
    let mut rate = [0.0];
    let mut power = [0.0];
    unsafe {
        assert_eq!(
            lttf_allocate(f.net, f.table, members.as_ptr(), 1, &mut out, rate.as_mut_ptr(), power.as_mut_ptr()),
            LttfStatus::Ok
        );
    }
    let top_sinr: f64 = 1000.0;
    let top_rate = 100e6 * (1.0 + top_sinr).log2();
    assert!(out.feasible);
    assert_eq!(rate[0], top_rate);
    assert!((out.slot_length - 100.0 / top_rate).abs() < 1e-18);
    // Minimum power meets the threshold with equality: γ N0 / g.
    assert!((power[0] / (top_sinr * 1e-8 / 1e-3) - 1.0).abs() < 1e-12);

    let mut cont = out;
    unsafe {
        assert_eq!(
            lttf_allocate_continuous(f.net, members.as_ptr(), 1, &mut cont, ptr::null_mut(), ptr::null_mut()),
            LttfStatus::Ok
        );
    }
    assert!(cont.feasible && cont.slot_length <= out.slot_length);
}

#[test]
fn infeasible_allocation_is_reported_not_an_error() {
    let radio = LttfRadio { noise_power: 1.0, ..lttf_radio_default() };
    let f = Fixture::new(&[node(1, 0, 1)], &[1e-7], radio);
    let mut out = LttfAllocation { feasible: true, slot_length: 0.0, feasibility_checks: 0 };
    unsafe {
        assert_eq!(
            lttf_allocate(f.net, f.table, [0usize].as_ptr(), 1, &mut out, ptr::null_mut(), ptr::null_mut()),
            LttfStatus::Ok
        );
    }
    assert!(!out.feasible);
    assert!(out.slot_length.is_infinite());
}

#[test]
fn min_power_symmetric_pair_and_infeasible_pair() {
    // g = 1, β = 0.1, γ = 2, N0 = 1e-8 per node: p = γ N0 / (g (1 - γ β)).
    let radio = LttfRadio { p_max: 1.0, noise_power: 1e-8, bandwidth_hz: 1e6 };
    let f = Fixture::new(&[node(1, 0, 1), node(2, 1, 1)], &[1.0, 0.1, 0.1, 1.0], radio);
    let members = [0usize, 1];
    let mut powers = [0.0; 2];
    let mut radius = 0.0;
    unsafe {
        assert_eq!(
            lttf_min_power(f.net, members.as_ptr(), [2.0, 2.0].as_ptr(), 2, powers.as_mut_ptr(), &mut radius),
            LttfStatus::Ok
        );
        let expected = 2.0 * 1e-8 / (1.0 - 0.2);
        assert!(powers.iter().all(|p| (p / expected - 1.0).abs() < 1e-9));
        assert!((radius - 0.2).abs() < 1e-10);

        // γβ = 2 for both links: ρ = 2.
        assert_eq!(
            lttf_min_power(f.net, members.as_ptr(), [20.0, 20.0].as_ptr(), 2, powers.as_mut_ptr(), &mut radius),
            LttfStatus::Infeasible
        );
        assert!((radius - 2.0).abs() < 1e-9);
        assert_eq!(
            lttf_min_power(f.net, [0usize, 5].as_ptr(), [2.0, 2.0].as_ptr(), 2, powers.as_mut_ptr(), ptr::null_mut()),
            LttfStatus::InvalidArgument
        );
    }
}

#[test]
fn schedule_round_trip() {
    // Node 0 every subframe, nodes 1 and 2 every other one on distinct
    // controllers with negligible coupling.
    let radio = lttf_radio_default();
    let nodes = [node(1, 0, 1), node(2, 1, 2), node(3, 2, 2)];
    let mut gains = vec![1e-15; 9];
    for i in 0..3 {
        gains[i * 3 + i] = 1e-3;
    }
    let f = Fixture::new(&nodes, &gains, radio);
    unsafe {
        for strategy in [LttfStrategy::SnaMla, LttfStrategy::SnaMua] {
            let mut sched = ptr::null_mut();
            assert_eq!(lttf_schedule_new(f.net, f.table, strategy, 1e-3, &mut sched), LttfStatus::Ok);
            assert_eq!(lttf_schedule_subframe_count(sched), 2);
            let mut total_members = 0;
            for m in 0..2 {
                let mut active = 0.0;
                let mut groups = 0;
                assert_eq!(lttf_schedule_subframe(sched, m, &mut active, &mut groups), LttfStatus::Ok);
                assert!(active <= lttf_schedule_max_active(sched));
                for g in 0..groups {
                    let mut buf = [0usize; 3];
                    let mut len = 0;
                    let mut slot = 0.0;
                    assert_eq!(
                        lttf_schedule_group(sched, m, g, buf.as_mut_ptr(), 3, &mut len, &mut slot),
                        LttfStatus::Ok
                    );
                    total_members += len;
                    assert!(slot > 0.0);
                }
            }
            // Node 0 twice, nodes 1 and 2 once each.
            assert_eq!(total_members, 4);
            let mut offset = 9;
            assert_eq!(lttf_schedule_offset(sched, 0, &mut offset), LttfStatus::Ok);
            assert_eq!(offset, 0);
            assert_eq!(lttf_schedule_offset(sched, 3, &mut offset), LttfStatus::InvalidArgument);
            lttf_schedule_free(sched);
        }

        let mut exact = ptr::null_mut();
        assert_eq!(lttf_schedule_exhaustive(f.net, ptr::null(), 8, 4, 1e-3, &mut exact), LttfStatus::Ok);
        let mut heuristic = ptr::null_mut();
        assert_eq!(lttf_schedule_new(f.net, ptr::null(), LttfStrategy::SnaMla, 1e-3, &mut heuristic), LttfStatus::Ok);
        assert!(lttf_schedule_max_active(exact) <= lttf_schedule_max_active(heuristic) * (1.0 + 1e-12));
        lttf_schedule_free(exact);
        lttf_schedule_free(heuristic);

        let mut none = ptr::null_mut();
        assert_eq!(lttf_schedule_exhaustive(f.net, f.table, 2, 4, 1e-3, &mut none), LttfStatus::GuardExceeded);
        assert!(none.is_null());
        assert!(lttf_schedule_max_active(ptr::null()).is_nan());
    }
}

#[test]
fn group_buffer_too_small_reports_length() {
    let radio = lttf_radio_default();
    let f = Fixture::new(&[node(1, 0, 1), node(2, 1, 1)], &[1e-3, 1e-15, 1e-15, 1e-3], radio);
    unsafe {
        let mut sched = ptr::null_mut();
        assert_eq!(lttf_schedule_new(f.net, f.table, LttfStrategy::SnaMla, 1e-3, &mut sched), LttfStatus::Ok);
        let mut len = 0;
        assert_eq!(
            lttf_schedule_group(sched, 0, 0, ptr::null_mut(), 0, &mut len, ptr::null_mut()),
            LttfStatus::BufferTooSmall
        );
        assert_eq!(len, 2);
        lttf_schedule_free(sched);
    }
}

#[test]
fn solo_infeasible_schedule_is_infeasible_status() {
    let radio = LttfRadio { noise_power: 1.0, ..lttf_radio_default() };
    let f = Fixture::new(&[node(7, 0, 1)], &[1e-7], radio);
    let mut sched = ptr::null_mut();
    unsafe {
        assert_eq!(lttf_schedule_new(f.net, f.table, LttfStrategy::SnaMua, 1e-3, &mut sched), LttfStatus::Infeasible);
    }
    assert!(last_error().contains("node 7"));
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/lttf.h")).unwrap();
    for name in [
        "lttf_last_error",
        "lttf_radio_default",
        "lttf_rate_table_new",
        "lttf_rate_table_free",
        "lttf_network_new",
        "lttf_network_free",
        "lttf_allocate",
        "lttf_allocate_continuous",
        "lttf_min_power",
        "lttf_schedule_new",
        "lttf_schedule_exhaustive",
        "lttf_schedule_group",
        "lttf_schedule_free",
        "typedef struct LttfNetwork LttfNetwork",
        "LTTF_STATUS_BUFFER_TOO_SMALL = 5",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_against_shared_library() {
    let dir = target_dir();
    let lib = dir.join(format!("{}lttf_ffi{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX));
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or no shared library at {}", lib.display());
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&dir)
        .arg("-llttf_ffi")
        .arg("-lm")
        .arg(format!("-Wl,-rpath,{}", dir.display()))
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
