//! Constructive 1-factorization of the complete 4-uniform hypergraph.
//!
//! Elements `0..n` are inserted one at a time. Before inserting element `i`,
//! every round holds `n/4` slots, each a partial subset of `{0..i-1}`, and
//! every partial subset `S` occupies exactly `C(n-i, 4-|S|)` slots over all
//! rounds. Inserting `i` means picking one non-full slot per round so that
//! each `S` is picked exactly `C(n-i-1, 3-|S|)` times. That choice is an
//! integral maximum flow on a two-layer network (rounds, then partial-subset
//! types). Spreading each round's unit of flow over its slots in proportion
//! to `4-|S|` is a fractional maximum flow with denominator `n-i`; rounding
//! it gives the integral one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{max_flow_integral, round_flow, FlowError, FlowNetwork, ScaledFlow};

/// Largest supported mode count; partial subsets are stored as `u64` masks.
pub const MAX_MODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("need at least 4 modes, got {0}")]
    TooFewModes(usize),
    #[error("mode count {0} is not divisible by 4")]
    NotMultipleOfFour(usize),
    #[error("mode count {0} exceeds the supported maximum of {MAX_MODES}")]
    TooManyModes(usize),
    #[error("subset elements must be 4 distinct indices, got {0:?}")]
    BadSubset([usize; 4]),
    #[error("flow step failed: {0}")]
    Flow(#[from] FlowError),
    #[error("contract violation: {0}")]
    Contract(String),
}

/// Which solver turns each step network into an integral flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlowEngine {
    /// Round the known fractional maximum flow.
    #[default]
    Rounding,
    /// Solve each network from scratch with the blocking-flow solver.
    Baseline,
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

/// Four distinct mode indices, stored descending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[usize; 4]", into = "[usize; 4]")]
pub struct Subset4([usize; 4]);

impl Subset4 {
    pub fn new(mut elements: [usize; 4]) -> Result<Self, ScheduleError> {
        let raw = elements;
        elements.sort_unstable_by(|a, b| b.cmp(a));
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(ScheduleError::BadSubset(raw));
        }
        Ok(Self(elements))
    }

    pub fn elements(&self) -> [usize; 4] {
        self.0
    }

    pub fn contains(&self, m: usize) -> bool {
        self.0.contains(&m)
    }

    pub fn max_element(&self) -> usize {
        self.0[0]
    }

    fn from_mask(mask: u64) -> Self {
        let mut out = [0usize; 4];
        let mut k = 0;
        for m in (0..64).rev() {
            if mask >> m & 1 == 1 {
                out[k] = m;
                k += 1;
            }
        }
        debug_assert_eq!(k, 4);
        Self(out)
    }
}

impl TryFrom<[usize; 4]> for Subset4 {
    type Error = ScheduleError;

    fn try_from(value: [usize; 4]) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Subset4> for [usize; 4] {
    fn from(s: Subset4) -> Self {
        s.0
    }
}

impl fmt::Display for Subset4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r, s] = self.0;
        write!(f, "a+{p} a+{q} a-{r} a-{s}")
    }
}

/// One parallel class: pairwise disjoint subsets, largest first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Round {
    pub subsets: Vec<Subset4>,
}

impl Round {
    pub fn new(mut subsets: Vec<Subset4>) -> Self {
        subsets.sort_unstable_by(|a, b| b.cmp(a));
        Self { subsets }
    }
}

impl fmt::Display for Round {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.subsets.iter().map(Subset4::to_string).collect();
        write!(f, "{}", parts.join("    "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub n: usize,
    pub rounds: Vec<Round>,
}

impl Schedule {
    /// Puts rounds into canonical order. Does not validate.
    pub fn new(n: usize, rounds: Vec<Round>) -> Self {
        let mut rounds: Vec<Round> = rounds.into_iter().map(|r| Round::new(r.subsets)).collect();
        rounds.sort();
        Self { n, rounds }
    }

    pub fn subset_count(&self) -> usize {
        self.rounds.iter().map(|r| r.subsets.len()).sum()
    }

    pub fn subsets(&self) -> impl Iterator<Item = &Subset4> {
        self.rounds.iter().flat_map(|r| &r.subsets)
    }

    /// One round per line, subsets as `a+p a+q a-r a-s` separated by four spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rounds {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

/// Slot multiset of one round, keyed by partial-subset mask.
type Slots = BTreeMap<u64, u32>;

/// The bookkeeping between insertions: per round, a multiset of partial subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialState {
    n: usize,
    inserted: usize,
    rounds: Vec<Slots>,
}

impl PartialState {
    pub fn initial(n: usize) -> Result<Self, ScheduleError> {
        check_n(n)?;
        let m = binomial(n as u64 - 1, 3) as usize;
        let empty: Slots = BTreeMap::from([(0u64, (n / 4) as u32)]);
        Ok(Self {
            n,
            inserted: 0,
            rounds: vec![empty; m],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of elements already placed (`0..inserted`).
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// `(subset, multiplicity)` pairs of one round, subsets as sorted element lists.
    pub fn round_slots(&self, round: usize) -> Vec<(Vec<usize>, u32)> {
        self.rounds[round]
            .iter()
            .map(|(&mask, &mult)| (mask_elements(mask), mult))
            .collect()
    }

    /// How many slots across all rounds hold exactly `subset`.
    pub fn global_multiplicity(&self, subset: &[usize]) -> u64 {
        let mask = subset.iter().fold(0u64, |m, &e| m | 1 << e);
        self.rounds
            .iter()
            .map(|slots| *slots.get(&mask).unwrap_or(&0) as u64)
            .sum()
    }

    /// Recounts both invariants from scratch.
    pub fn check_invariants(&self) -> Result<(), ScheduleError> {
        let i = self.inserted;
        let placed: u64 = if i == 64 { u64::MAX } else { (1u64 << i) - 1 };
        let mut global: BTreeMap<u64, u64> = BTreeMap::new();
        for (r, slots) in self.rounds.iter().enumerate() {
            let mut union = 0u64;
            let mut count = 0u32;
            for (&mask, &mult) in slots {
                if mask & !placed != 0 || mask.count_ones() > 4 {
                    return Err(contract(format!("round {r} holds invalid slot {mask:#b}")));
                }
                if mask != 0 && (mult > 1 || union & mask != 0) {
                    return Err(contract(format!("round {r} slots overlap")));
                }
                union |= mask;
                count += mult;
                *global.entry(mask).or_default() += mult as u64;
            }
            if union != placed || count as usize != self.n / 4 {
                return Err(contract(format!(
                    "round {r} does not partition the placed elements"
                )));
            }
        }
        let expected_types: u64 = (0..=4u64.min(i as u64))
            .filter(|&k| 4 - k <= (self.n - i) as u64)
            .map(|k| binomial(i as u64, k))
            .sum();
        if global.len() as u64 != expected_types {
            return Err(contract(format!(
                "{} distinct partial subsets present, expected {expected_types}",
                global.len()
            )));
        }
        for (&mask, &count) in &global {
            let want = binomial((self.n - i) as u64, 4 - mask.count_ones() as u64);
            if count != want {
                return Err(contract(format!(
                    "subset {:?} occupies {count} slots, expected {want}",
                    mask_elements(mask)
                )));
            }
        }
        Ok(())
    }

    fn into_schedule(self) -> Result<Schedule, ScheduleError> {
        if self.inserted != self.n {
            return Err(contract("state is not complete".into()));
        }
        let rounds = self
            .rounds
            .into_iter()
            .map(|slots| {
                Round::new(
                    slots
                        .into_iter()
                        .flat_map(|(mask, mult)| std::iter::repeat_n(mask, mult as usize))
                        .map(Subset4::from_mask)
                        .collect(),
                )
            })
            .collect();
        Ok(Schedule::new(self.n, rounds))
    }
}

fn contract(msg: String) -> ScheduleError {
    ScheduleError::Contract(msg)
}

fn mask_elements(mask: u64) -> Vec<usize> {
    (0..64).filter(|&m| mask >> m & 1 == 1).collect()
}

fn check_n(n: usize) -> Result<(), ScheduleError> {
    if n < 4 {
        return Err(ScheduleError::TooFewModes(n));
    }
    if n > MAX_MODES {
        return Err(ScheduleError::TooManyModes(n));
    }
    if !n.is_multiple_of(4) {
        return Err(ScheduleError::NotMultipleOfFour(n));
    }
    Ok(())
}

/// The network for inserting the next element, with its fractional seed.
#[derive(Debug, Clone)]
pub struct StepNetwork {
    pub network: FlowNetwork,
    pub seed: ScaledFlow,
    /// Element being inserted.
    pub element: usize,
    /// Partial-subset node masks, in node order after the round nodes.
    subset_types: Vec<u64>,
    /// For each round→subset edge id (offset by `round_count`), `(round, mask)`.
    slot_edges: Vec<(usize, u64)>,
    round_count: usize,
}

impl StepNetwork {
    /// Value the seed carries: one unit per round.
    pub fn target_value(&self) -> u64 {
        self.round_count as u64
    }

    pub fn subset_type_count(&self) -> usize {
        self.subset_types.len()
    }

    pub fn subset_type_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.subset_types.iter().map(|m| m.count_ones() as usize)
    }
}

pub fn build_step_network(state: &PartialState) -> Result<StepNetwork, ScheduleError> {
    let (n, i) = (state.n, state.inserted);
    if i >= n {
        return Err(contract("all elements already inserted".into()));
    }
    let m = state.rounds.len();
    let d = (n - i) as u64;

    let types: BTreeSet<u64> = state
        .rounds
        .iter()
        .flat_map(|slots| slots.keys().copied())
        .filter(|mask| mask.count_ones() < 4)
        .collect();
    let subset_types: Vec<u64> = types.into_iter().collect();
    let type_node = |mask: u64| -> usize {
        1 + m + subset_types.binary_search(&mask).expect("mask registered")
    };

    let source = 0;
    let sink = 1 + m + subset_types.len();
    let mut network = FlowNetwork::new(sink + 1, source, sink)?;
    let mut numerators = Vec::new();

    for r in 0..m {
        network.add_edge(source, 1 + r, 1)?;
        numerators.push(d);
    }
    let mut slot_edges = Vec::new();
    for (r, slots) in state.rounds.iter().enumerate() {
        let mut round_total = 0u64;
        for (&mask, &mult) in slots {
            let size = mask.count_ones() as u64;
            if size == 4 {
                continue;
            }
            network.add_edge(1 + r, type_node(mask), mult as u64)?;
            let f = (4 - size) * mult as u64;
            numerators.push(f);
            round_total += f;
            slot_edges.push((r, mask));
        }
        if round_total != d {
            return Err(contract(format!(
                "round {r} seed outflow {round_total} differs from denominator {d}"
            )));
        }
    }
    for &mask in &subset_types {
        let size = mask.count_ones() as u64;
        let cap = binomial(d - 1, 3 - size);
        network.add_edge(type_node(mask), sink, cap)?;
        numerators.push(cap * d);
    }

    let seed = ScaledFlow {
        denominator: d,
        numerators,
    };
    seed.check_feasible(&network)
        .map_err(|e| contract(format!("seed flow infeasible: {e}")))?;
    Ok(StepNetwork {
        network,
        seed,
        element: i,
        subset_types,
        slot_edges,
        round_count: m,
    })
}

/// Extends, in every round, the slot picked by the integral flow with the new element.
pub fn apply_step(
    state: &PartialState,
    step: &StepNetwork,
    integral: &ScaledFlow,
) -> Result<PartialState, ScheduleError> {
    if integral.denominator != 1 {
        return Err(contract("flow is not integral".into()));
    }
    integral.check_feasible(&step.network)?;
    if integral.integral_value(&step.network) != Some(step.target_value()) {
        return Err(contract(format!(
            "flow value {:?} differs from round count {}",
            integral.integral_value(&step.network),
            step.target_value()
        )));
    }
    let offset = step.round_count;
    let mut picked: Vec<Option<u64>> = vec![None; step.round_count];
    for (k, &(r, mask)) in step.slot_edges.iter().enumerate() {
        match integral.numerators[offset + k] {
            0 => {}
            1 if picked[r].is_none() => picked[r] = Some(mask),
            f => {
                return Err(contract(format!(
                    "round {r} sends {f} units through slot {mask:#b}"
                )))
            }
        }
    }
    let bit = 1u64 << step.element;
    let mut next = state.clone();
    for (r, slots) in next.rounds.iter_mut().enumerate() {
        let mask = picked[r].ok_or_else(|| contract(format!("round {r} picked no slot")))?;
        assert!(mask.count_ones() < 4, "flow selected a full slot");
        let mult = slots.get_mut(&mask).expect("picked slot exists");
        *mult -= 1;
        if *mult == 0 {
            slots.remove(&mask);
        }
        *slots.entry(mask | bit).or_insert(0) += 1;
    }
    next.inserted += 1;
    Ok(next)
}

/// Runs one insertion with the chosen engine.
pub fn advance(state: &PartialState, engine: FlowEngine) -> Result<PartialState, ScheduleError> {
    let step = build_step_network(state)?;
    let integral = match engine {
        FlowEngine::Rounding => round_flow(&step.network, &step.seed)?,
        FlowEngine::Baseline => max_flow_integral(&step.network),
    };
    apply_step(state, &step, &integral)
}

pub fn build_schedule(n: usize) -> Result<Schedule, ScheduleError> {
    build_schedule_with(n, FlowEngine::Rounding)
}

pub fn build_schedule_with(n: usize, engine: FlowEngine) -> Result<Schedule, ScheduleError> {
    let mut state = PartialState::initial(n)?;
    for _ in 0..n {
        state = advance(&state, engine)?;
    }
    state.into_schedule()
}

/// Any `n >= 4`: builds at the next multiple of 4 and drops subsets that
/// touch the padding modes.
pub fn pad_and_build(n: usize) -> Result<Schedule, ScheduleError> {
    pad_and_build_with(n, FlowEngine::Rounding)
}

pub fn pad_and_build_with(n: usize, engine: FlowEngine) -> Result<Schedule, ScheduleError> {
    if n < 4 {
        return Err(ScheduleError::TooFewModes(n));
    }
    let padded = n.div_ceil(4) * 4;
    let full = build_schedule_with(padded, engine)?;
    if padded == n {
        return Ok(full);
    }
    let rounds = full
        .rounds
        .into_iter()
        .map(|r| Round {
            subsets: r
                .subsets
                .into_iter()
                .filter(|s| s.max_element() < n)
                .collect(),
        })
        .filter(|r| !r.subsets.is_empty())
        .collect();
    Ok(Schedule::new(n, rounds))
}
