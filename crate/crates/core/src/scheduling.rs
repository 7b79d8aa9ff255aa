//! TDMA frame construction.
//!
//! A frame has `M = max period / min period` subframes. Each node is given an
//! offset and then transmits in subframes `offset, offset + s, ...` where `s`
//! is its period in subframes. Within a subframe, nodes of equal period are
//! split into concurrency groups whose members report to distinct controllers;
//! each group occupies one slot whose length comes from a [`GroupPricer`].
//! The objective is the largest per-subframe total slot length (active
//! length).
//!
//! Two heuristics are provided, both starting from the sorted node
//! assignment ([`sna_assign`]):
//!
//! - SNA-MLA: concurrency groups from a minimum-length cover of the
//!   feasible subsets ([`mla_allocate`]).
//! - SNA-MUA: groups grown greedily by utility, the transmission time saved
//!   by transmitting together ([`mua_allocate`]).
//!
//! [`exhaustive_schedule`] searches every offset assignment and every
//! partition into groups for small instances.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocation::{continuous_optimal, lttf, AllocationError};
use crate::model::{AllocationResult, GainMatrix, Instance, ModelError, NodeSpec, RadioConfig, RateTable};

/// Groups up to this size are covered exactly by MLA; larger ones use greedy
/// weighted set cover.
pub const MLA_EXACT_MAX_NODES: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Allocation(#[from] AllocationError),
    #[error("node {id} cannot transmit even alone")]
    SoloInfeasible { id: u32 },
    #[error("node {id} is in no feasible concurrency group")]
    NoFeasibleCover { id: u32 },
    #[error(
        "exhaustive search limited to {max_nodes} nodes and {max_subframes} subframes, got {nodes} and {subframes}"
    )]
    GuardExceeded { nodes: usize, subframes: usize, max_nodes: usize, max_subframes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "sna-mla")]
    SnaMla,
    #[serde(rename = "sna-mua")]
    SnaMua,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::SnaMla, Strategy::SnaMua];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::SnaMla => "sna-mla",
            Strategy::SnaMua => "sna-mua",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sna-mla" => Ok(Strategy::SnaMla),
            "sna-mua" => Ok(Strategy::SnaMua),
            other => Err(format!("unknown strategy '{other}' (expected sna-mla or sna-mua)")),
        }
    }
}

/// Price of a concurrency group.
#[derive(Debug, Clone, PartialEq)]
pub struct PricedGroup {
    pub slot_length: f64,
    /// Rate and power assignment behind the price, when one exists.
    pub allocation: Option<AllocationResult>,
}

/// Slot length of a set of nodes transmitting together.
///
/// `members` are node indices in ascending order. `Ok(None)` means the group
/// cannot transmit concurrently.
pub trait GroupPricer {
    fn price(&self, members: &[usize]) -> Result<Option<PricedGroup>, ScheduleError>;
}

/// How link rates are chosen when pricing a group.
#[derive(Debug, Clone, PartialEq)]
pub enum RateModel {
    /// Shannon rates ([`continuous_optimal`]).
    Continuous,
    /// Discrete levels ([`lttf`]).
    Discrete(RateTable),
}

impl RateModel {
    pub fn name(&self) -> String {
        match self {
            RateModel::Continuous => "cont".into(),
            RateModel::Discrete(t) => format!("disc{}", t.len() + t.dropped_db().len()),
        }
    }
}

/// Prices groups from a network gain matrix and a rate model. Results are
/// memoized per member set.
pub struct LinkPricer<'a> {
    nodes: &'a [NodeSpec],
    gains: &'a GainMatrix,
    model: &'a RateModel,
    radio: RadioConfig,
    cache: RefCell<HashMap<Vec<usize>, Option<PricedGroup>>>,
}

impl<'a> LinkPricer<'a> {
    pub fn new(nodes: &'a [NodeSpec], gains: &'a GainMatrix, model: &'a RateModel, radio: RadioConfig) -> Self {
        Self { nodes, gains, model, radio, cache: RefCell::new(HashMap::new()) }
    }
}

impl GroupPricer for LinkPricer<'_> {
    fn price(&self, members: &[usize]) -> Result<Option<PricedGroup>, ScheduleError> {
        if let Some(hit) = self.cache.borrow().get(members) {
            return Ok(hit.clone());
        }
        let nodes: Vec<NodeSpec> = members.iter().map(|&i| self.nodes[i].clone()).collect();
        let gains = self.gains.subset(members);
        let result = match self.model {
            RateModel::Continuous => continuous_optimal(&nodes, &gains, &self.radio)?,
            RateModel::Discrete(table) => lttf(&nodes, &gains, table, &self.radio)?,
        };
        let priced =
            result.feasible.then_some(PricedGroup { slot_length: result.slot_length, allocation: Some(result) });
        self.cache.borrow_mut().insert(members.to_vec(), priced.clone());
        Ok(priced)
    }
}

/// Prices from a fixed table of member sets; anything not listed is
/// infeasible.
#[derive(Debug, Clone, Default)]
pub struct FixedPricer {
    times: HashMap<Vec<usize>, f64>,
}

impl FixedPricer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, members: &[usize], slot_length: f64) -> Self {
        let mut key = members.to_vec();
        key.sort_unstable();
        self.times.insert(key, slot_length);
        self
    }
}

impl GroupPricer for FixedPricer {
    fn price(&self, members: &[usize]) -> Result<Option<PricedGroup>, ScheduleError> {
        Ok(self.times.get(members).map(|&slot_length| PricedGroup { slot_length, allocation: None }))
    }
}

/// One concurrency group inside a subframe.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    /// Node indices, ascending.
    pub members: Vec<usize>,
    pub slot_length: f64,
    pub allocation: Option<AllocationResult>,
}

impl Group {
    fn from_priced(members: Vec<usize>, priced: PricedGroup) -> Self {
        Self { members, slot_length: priced.slot_length, allocation: priced.allocation }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub subframe_count: usize,
    /// Subframe duration in seconds.
    pub subframe_duration: f64,
    /// Offset of each node, in `[0, period in subframes)`.
    pub offsets: Vec<usize>,
    /// Concurrency groups of each subframe, in transmission order.
    pub subframes: Vec<Vec<Group>>,
}

impl Frame {
    pub fn metrics(&self) -> ScheduleMetrics {
        let active_lengths: Vec<f64> =
            self.subframes.iter().map(|groups| groups.iter().map(|g| g.slot_length).sum()).collect();
        let max_active = active_lengths.iter().cloned().fold(0.0, f64::max);
        ScheduleMetrics { active_lengths, max_active, normalized_max_active: None }
    }

    /// Checks coverage, controller exclusivity, equal periods inside groups
    /// and finite slot lengths.
    pub fn check(&self, instance: &Instance) -> Result<(), String> {
        let nodes = &instance.nodes;
        if self.subframes.len() != self.subframe_count || self.offsets.len() != nodes.len() {
            return Err("frame shape does not match the instance".into());
        }
        for (m, groups) in self.subframes.iter().enumerate() {
            let mut seen = vec![0usize; nodes.len()];
            for g in groups {
                if g.members.is_empty() || !g.slot_length.is_finite() {
                    return Err(format!("subframe {m}: empty or infeasible group"));
                }
                let controllers: BTreeSet<u32> = g.members.iter().map(|&i| nodes[i].controller_id).collect();
                if controllers.len() != g.members.len() {
                    return Err(format!("subframe {m}: shared controller in group {:?}", g.members));
                }
                if g.members.iter().any(|&i| nodes[i].period != nodes[g.members[0]].period) {
                    return Err(format!("subframe {m}: mixed periods in group {:?}", g.members));
                }
                for &i in &g.members {
                    seen[i] += 1;
                }
            }
            for (i, &count) in seen.iter().enumerate() {
                let s = instance.period_in_subframes(i);
                let expected = usize::from(self.offsets[i] < s && m % s == self.offsets[i]);
                if self.offsets[i] >= s {
                    return Err(format!("node {i}: offset {} outside period {s}", self.offsets[i]));
                }
                if count != expected {
                    return Err(format!("subframe {m}: node {i} appears {count} times, expected {expected}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMetrics {
    /// Active length `a_m` of each subframe, seconds.
    pub active_lengths: Vec<f64>,
    pub max_active: f64,
    /// `max_active` divided by a reference schedule's, once one is supplied.
    pub normalized_max_active: Option<f64>,
}

impl ScheduleMetrics {
    pub fn normalized_by(mut self, reference_max_active: f64) -> Self {
        self.normalized_max_active = Some(self.max_active / reference_max_active);
        self
    }
}

/// Subframe offsets from the sorted node assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub offsets: Vec<usize>,
    /// Transmission time of each node alone.
    pub solo_times: Vec<f64>,
}

fn solo_times(instance: &Instance, pricer: &dyn GroupPricer) -> Result<Vec<f64>, ScheduleError> {
    (0..instance.len())
        .map(|i| match pricer.price(&[i])? {
            Some(p) => Ok(p.slot_length),
            None => Err(ScheduleError::SoloInfeasible { id: instance.nodes[i].id }),
        })
        .collect()
}

/// Sorted node assignment.
///
/// Nodes are taken in descending order of solo transmission time (ties by
/// index). Each is placed at the offset that minimizes the largest active
/// length over the subframes it would occupy, with active lengths tracked as
/// sums of solo times. Ties go to the smallest offset.
pub fn sna_assign(instance: &Instance, pricer: &dyn GroupPricer) -> Result<Assignment, ScheduleError> {
    let solo = solo_times(instance, pricer)?;
    let m_count = instance.subframe_count();
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| solo[b].total_cmp(&solo[a]).then(a.cmp(&b)));

    let mut ledger = vec![0.0; m_count];
    let mut offsets = vec![0; instance.len()];
    for i in order {
        let s = instance.period_in_subframes(i);
        let mut best = (f64::INFINITY, 0);
        for o in 0..s {
            let cost = (o..m_count).step_by(s).map(|m| ledger[m] + solo[i]).fold(0.0, f64::max);
            if cost < best.0 {
                best = (cost, o);
            }
        }
        offsets[i] = best.1;
        for m in (best.1..m_count).step_by(s) {
            ledger[m] += solo[i];
        }
    }
    Ok(Assignment { offsets, solo_times: solo })
}

/// All subsets of `members` (ascending) whose nodes report to pairwise
/// distinct controllers, in lexicographic order.
fn controller_distinct_subsets(nodes: &[NodeSpec], members: &[usize]) -> Vec<Vec<usize>> {
    fn extend(
        nodes: &[NodeSpec],
        members: &[usize],
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for pos in start..members.len() {
            let cand = members[pos];
            if current.iter().any(|&c| nodes[c].controller_id == nodes[cand].controller_id) {
                continue;
            }
            current.push(cand);
            out.push(current.clone());
            extend(nodes, members, pos + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(nodes, members, 0, &mut Vec::new(), &mut out);
    out
}

struct Candidate {
    members: Vec<usize>,
    priced: PricedGroup,
}

fn feasible_candidates(
    nodes: &[NodeSpec],
    members: &[usize],
    pricer: &dyn GroupPricer,
) -> Result<Vec<Candidate>, ScheduleError> {
    let mut out = Vec::new();
    for subset in controller_distinct_subsets(nodes, members) {
        if let Some(priced) = pricer.price(&subset)? {
            out.push(Candidate { members: subset, priced });
        }
    }
    for &i in members {
        if !out.iter().any(|c| c.members.contains(&i)) {
            return Err(ScheduleError::NoFeasibleCover { id: nodes[i].id });
        }
    }
    Ok(out)
}

/// Minimum total slot length partition of the positions `0..k` given
/// candidate groups as bitmasks. Returns `(cost, chosen candidate indices)`
/// per mask.
fn partition_table(k: usize, candidates: &[(u32, f64)]) -> Vec<(f64, Vec<usize>)> {
    let full = 1usize << k;
    let by_mask: HashMap<u32, usize> = candidates.iter().enumerate().map(|(i, &(m, _))| (m, i)).collect();
    let mut best: Vec<(f64, Vec<usize>)> = vec![(f64::INFINITY, Vec::new()); full];
    best[0] = (0.0, Vec::new());
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // Submasks of `rest`, each combined with the lowest bit, in decreasing order.
        let mut sub = rest;
        loop {
            let group = (sub | low) as u32;
            if let Some(&ci) = by_mask.get(&group) {
                let remainder = mask ^ (sub | low);
                let cost = candidates[ci].1 + best[remainder].0;
                if cost < best[mask].0 {
                    let mut chosen = best[remainder].1.clone();
                    chosen.push(ci);
                    best[mask] = (cost, chosen);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best
}

fn exact_cover(members: &[usize], candidates: Vec<Candidate>) -> Vec<Group> {
    let pos = |i: usize| members.iter().position(|&m| m == i).unwrap();
    let masks: Vec<(u32, f64)> = candidates
        .iter()
        .map(|c| (c.members.iter().fold(0u32, |acc, &i| acc | (1 << pos(i))), c.priced.slot_length))
        .collect();
    let table = partition_table(members.len(), &masks);
    let (_, chosen) = &table[(1usize << members.len()) - 1];
    let mut groups: Vec<Group> = chosen
        .iter()
        .map(|&ci| Group::from_priced(candidates[ci].members.clone(), candidates[ci].priced.clone()))
        .collect();
    groups.sort_by(|a, b| a.members.cmp(&b.members));
    groups
}

fn greedy_cover(
    members: &[usize],
    candidates: Vec<Candidate>,
    pricer: &dyn GroupPricer,
) -> Result<Vec<Group>, ScheduleError> {
    let mut uncovered: BTreeSet<usize> = members.iter().copied().collect();
    let mut selected: Vec<usize> = Vec::new();
    while !uncovered.is_empty() {
        let mut pick: Option<(f64, usize)> = None;
        for (ci, c) in candidates.iter().enumerate() {
            let fresh = c.members.iter().filter(|i| uncovered.contains(i)).count();
            if fresh == 0 {
                continue;
            }
            let ratio = c.priced.slot_length / fresh as f64;
            let better = match pick {
                None => true,
                Some((r, bi)) => {
                    let b = &candidates[bi];
                    ratio < r
                        || (ratio == r && c.priced.slot_length < b.priced.slot_length)
                        || (ratio == r && c.priced.slot_length == b.priced.slot_length && c.members < b.members)
                }
            };
            if better {
                pick = Some((ratio, ci));
            }
        }
        let (_, ci) = pick.expect("every member has a feasible candidate");
        for i in &candidates[ci].members {
            uncovered.remove(i);
        }
        selected.push(ci);
    }

    // Keep each node only in the cheapest selected group that contains it.
    let mut kept: Vec<Vec<usize>> = selected.iter().map(|&ci| candidates[ci].members.clone()).collect();
    for &i in members {
        let owners: Vec<usize> = (0..selected.len()).filter(|&s| kept[s].contains(&i)).collect();
        if owners.len() > 1 {
            let keep = *owners
                .iter()
                .min_by(|&&a, &&b| {
                    candidates[selected[a]].priced.slot_length.total_cmp(&candidates[selected[b]].priced.slot_length)
                })
                .unwrap();
            for &s in owners.iter().filter(|&&s| s != keep) {
                kept[s].retain(|&m| m != i);
            }
        }
    }

    let mut groups = Vec::new();
    for (s, members) in kept.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members == candidates[selected[s]].members {
            groups.push(Group::from_priced(members, candidates[selected[s]].priced.clone()));
            continue;
        }
        match pricer.price(&members)? {
            Some(p) => groups.push(Group::from_priced(members, p)),
            // Dropping a member never breaks a physical group, but a
            // fixture table may not list the shrunken set.
            None => {
                for i in members {
                    let p = pricer.price(&[i])?.ok_or(ScheduleError::SoloInfeasible { id: i as u32 })?;
                    groups.push(Group::from_priced(vec![i], p));
                }
            }
        }
    }
    groups.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(groups)
}

/// Minimum-length allocation for one set of equal-period nodes sharing a
/// subframe: enumerate the feasible controller-distinct subsets and select a
/// cover of minimum total slot length. Groups of at most
/// [`MLA_EXACT_MAX_NODES`] nodes are covered exactly; larger ones greedily
/// (lowest slot length per newly covered node), after which nodes covered
/// twice stay only in their cheapest group.
pub fn mla_allocate(
    nodes: &[NodeSpec],
    members: &[usize],
    pricer: &dyn GroupPricer,
) -> Result<Vec<Group>, ScheduleError> {
    if members.is_empty() {
        return Ok(Vec::new());
    }
    let candidates = feasible_candidates(nodes, members, pricer)?;
    if members.len() <= MLA_EXACT_MAX_NODES {
        Ok(exact_cover(members, candidates))
    } else {
        greedy_cover(members, candidates, pricer)
    }
}

/// Maximum-utility allocation for one set of equal-period nodes sharing a
/// subframe. Each group is seeded with the unassigned node of longest solo
/// time and grown by the candidate that maximizes the utility
/// `Σ solo times - group slot length`, as long as utility strictly increases.
pub fn mua_allocate(
    nodes: &[NodeSpec],
    members: &[usize],
    solo_times: &[f64],
    pricer: &dyn GroupPricer,
) -> Result<Vec<Group>, ScheduleError> {
    let mut unassigned: Vec<usize> = members.to_vec();
    unassigned.sort_unstable();
    let mut groups = Vec::new();
    while !unassigned.is_empty() {
        let seed =
            *unassigned.iter().max_by(|&&a, &&b| solo_times[a].total_cmp(&solo_times[b]).then(b.cmp(&a))).unwrap();
        unassigned.retain(|&i| i != seed);
        let mut group = vec![seed];
        let mut priced = pricer.price(&group)?.ok_or(ScheduleError::SoloInfeasible { id: nodes[seed].id })?;
        let mut utility = 0.0;
        loop {
            let mut best: Option<(f64, usize, Vec<usize>, PricedGroup)> = None;
            for &k in &unassigned {
                if group.iter().any(|&g| nodes[g].controller_id == nodes[k].controller_id) {
                    continue;
                }
                let mut trial = group.clone();
                trial.push(k);
                trial.sort_unstable();
                let Some(p) = pricer.price(&trial)? else {
                    continue;
                };
                let u = trial.iter().map(|&i| solo_times[i]).sum::<f64>() - p.slot_length;
                if best.as_ref().is_none_or(|(bu, ..)| u > *bu) {
                    best = Some((u, k, trial, p));
                }
            }
            match best {
                Some((u, k, trial, p)) if u > utility => {
                    utility = u;
                    group = trial;
                    priced = p;
                    unassigned.retain(|&i| i != k);
                }
                _ => break,
            }
        }
        groups.push(Group::from_priced(group, priced));
    }
    Ok(groups)
}

/// Members of the (subframe, period) population: nodes of period `s` whose
/// offset matches `m mod s`.
fn population(instance: &Instance, offsets: &[usize], m: usize, s: usize) -> Vec<usize> {
    (0..instance.len()).filter(|&i| instance.period_in_subframes(i) == s && offsets[i] == m % s).collect()
}

fn periods(instance: &Instance) -> Vec<usize> {
    let set: BTreeSet<usize> = (0..instance.len()).map(|i| instance.period_in_subframes(i)).collect();
    set.into_iter().collect()
}

/// SNA followed by the chosen concurrency allocation in every
/// (subframe, period) population.
pub fn schedule(
    instance: &Instance,
    pricer: &dyn GroupPricer,
    strategy: Strategy,
    subframe_duration: f64,
) -> Result<(Frame, ScheduleMetrics), ScheduleError> {
    let assignment = sna_assign(instance, pricer)?;
    let m_count = instance.subframe_count();
    // Populations repeat every s subframes.
    let mut memo: HashMap<(usize, usize), Vec<Group>> = HashMap::new();
    let mut subframes = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let mut groups = Vec::new();
        for s in periods(instance) {
            let key = (s, m % s);
            if let std::collections::hash_map::Entry::Vacant(e) = memo.entry(key) {
                let members = population(instance, &assignment.offsets, m, s);
                let allocated = match strategy {
                    Strategy::SnaMla => mla_allocate(&instance.nodes, &members, pricer)?,
                    Strategy::SnaMua => mua_allocate(&instance.nodes, &members, &assignment.solo_times, pricer)?,
                };
                e.insert(allocated);
            }
            groups.extend(memo[&key].iter().cloned());
        }
        subframes.push(groups);
    }
    let frame = Frame { subframe_count: m_count, subframe_duration, offsets: assignment.offsets, subframes };
    let metrics = frame.metrics();
    Ok((frame, metrics))
}

/// Size limits for [`exhaustive_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveGuard {
    pub max_nodes: usize,
    pub max_subframes: usize,
}

impl Default for ExhaustiveGuard {
    fn default() -> Self {
        Self { max_nodes: 8, max_subframes: 4 }
    }
}

impl ExhaustiveGuard {
    pub fn admits(&self, instance: &Instance) -> bool {
        instance.len() <= self.max_nodes && instance.subframe_count() <= self.max_subframes
    }
}

/// Minimum max-active-length schedule by exhaustive search over offsets and
/// partitions of each (subframe, period) population into controller-distinct
/// groups.
pub fn exhaustive_schedule(
    instance: &Instance,
    pricer: &dyn GroupPricer,
    guard: ExhaustiveGuard,
    subframe_duration: f64,
) -> Result<(Frame, ScheduleMetrics), ScheduleError> {
    let n = instance.len();
    let m_count = instance.subframe_count();
    if !guard.admits(instance) || n > 31 {
        return Err(ScheduleError::GuardExceeded {
            nodes: n,
            subframes: m_count,
            max_nodes: guard.max_nodes,
            max_subframes: guard.max_subframes,
        });
    }
    solo_times(instance, pricer)?;

    // Per period class: its nodes and the best partition of every subset.
    struct Class {
        period: usize,
        nodes: Vec<usize>,
        candidates: Vec<Candidate>,
        table: Vec<(f64, Vec<usize>)>,
    }
    let mut classes = Vec::new();
    for s in periods(instance) {
        let members: Vec<usize> = (0..n).filter(|&i| instance.period_in_subframes(i) == s).collect();
        let candidates = feasible_candidates(&instance.nodes, &members, pricer)?;
        let masks: Vec<(u32, f64)> = candidates
            .iter()
            .map(|c| {
                let mask =
                    c.members.iter().fold(0u32, |acc, i| acc | (1 << members.iter().position(|m| m == i).unwrap()));
                (mask, c.priced.slot_length)
            })
            .collect();
        let table = partition_table(members.len(), &masks);
        classes.push(Class { period: s, nodes: members, candidates, table });
    }

    let radix: Vec<usize> = (0..n).map(|i| instance.period_in_subframes(i)).collect();
    let mut offsets = vec![0usize; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let mut worst = 0.0f64;
        for m in 0..m_count {
            let mut a = 0.0;
            for class in &classes {
                let mask = class
                    .nodes
                    .iter()
                    .enumerate()
                    .filter(|(_, &i)| offsets[i] == m % class.period)
                    .fold(0usize, |acc, (b, _)| acc | (1 << b));
                a += class.table[mask].0;
            }
            worst = worst.max(a);
        }
        if best.as_ref().is_none_or(|(b, _)| worst < *b) {
            best = Some((worst, offsets.clone()));
        }
        let mut i = n;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            offsets[i] += 1;
            if offsets[i] < radix[i] {
                break false;
            }
            offsets[i] = 0;
        };
        if done {
            break;
        }
    }

    let (_, offsets) = best.expect("at least one offset assignment");
    let mut subframes = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let mut groups = Vec::new();
        for class in &classes {
            let mask = class
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, &i)| offsets[i] == m % class.period)
                .fold(0usize, |acc, (b, _)| acc | (1 << b));
            let mut part: Vec<Group> = class.table[mask]
                .1
                .iter()
                .map(|&ci| {
                    Group::from_priced(class.candidates[ci].members.clone(), class.candidates[ci].priced.clone())
                })
                .collect();
            part.sort_by(|a, b| a.members.cmp(&b.members));
            groups.extend(part);
        }
        subframes.push(groups);
    }
    let frame = Frame { subframe_count: m_count, subframe_duration, offsets, subframes };
    let metrics = frame.metrics();
    Ok((frame, metrics))
}
