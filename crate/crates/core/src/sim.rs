//! Seeded Monte Carlo execution of machine specs.
//!
//! The [`Executor`] compiles a spec into a dense transition table and
//! memoizes the effect of each (action, quantum state) pair, so repeated
//! passes over the same input do their exact arithmetic once. It consumes
//! randomness exactly like [`crate::automaton::step`]: one `u64` per
//! measurement, none per unitary, so both produce identical runs for a seed.
//! Plain trial runs also memoize each deterministic stretch between two
//! measurements and cross it in one jump.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::automaton::{
    moved_head, status_of, tape_of, validate_machine, Action, Configuration, MachineSpec, Outcome, QuantumState,
    Status, Symbol, Verdict,
};
use crate::error::{Error, Result};

/// Per-trial generator.
pub type TrialRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Memoized quantum states kept per worker before the cache is reset.
const CACHE_LIMIT: usize = 1 << 16;

/// SplitMix64 output for `master + (index + 1)·γ`: the seed of trial `index`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `10⁴·(n+2)⁴`, saturating.
pub fn default_step_cap(input_len: usize) -> u64 {
    let m = input_len as u64 + 2;
    m.checked_pow(4).and_then(|v| v.checked_mul(10_000)).unwrap_or(u64::MAX)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialStats {
    pub trials: u64,
    pub accepted: u64,
    pub rejected: u64,
    pub capped: u64,
    pub mean_steps: f64,
    /// Sample variance of the step counts (0 for a single trial).
    pub variance_steps: f64,
    pub seed: u64,
}

impl TrialStats {
    pub fn from_outcomes(outcomes: &[Outcome], seed: u64) -> Self {
        let mut stats = TrialStats {
            trials: outcomes.len() as u64,
            accepted: 0,
            rejected: 0,
            capped: 0,
            mean_steps: 0.0,
            variance_steps: 0.0,
            seed,
        };
        let mut m2 = 0.0;
        for (i, o) in outcomes.iter().enumerate() {
            match o.verdict {
                Verdict::Accepted => stats.accepted += 1,
                Verdict::Rejected => stats.rejected += 1,
                Verdict::StepCapExceeded => stats.capped += 1,
            }
            let x = o.steps_used as f64;
            let delta = x - stats.mean_steps;
            stats.mean_steps += delta / (i + 1) as f64;
            m2 += delta * (x - stats.mean_steps);
        }
        if outcomes.len() > 1 {
            stats.variance_steps = m2 / (outcomes.len() - 1) as f64;
        }
        stats
    }

    pub fn reject_fraction(&self) -> f64 {
        self.rejected as f64 / self.trials as f64
    }

    pub fn accept_fraction(&self) -> f64 {
        self.accepted as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: u64,
    /// Classical state and head position before the step.
    pub state: String,
    pub head: usize,
    pub symbol: String,
    pub action: String,
    pub outcome: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub entries: Vec<TraceEntry>,
    /// Classical state after the last recorded step.
    pub final_state: String,
    pub final_head: usize,
    /// `None` while the run had not halted within `max_steps`.
    pub verdict: Option<Verdict>,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    action: u32,
    first_target: u32,
    targets: u32,
}

#[derive(Clone, Copy, Debug)]
struct CTarget {
    next: u32,
    offset: i8,
}

#[derive(Clone, Debug)]
enum Memo {
    Unitary(u32),
    Measured { thresholds: Vec<u128>, states: Vec<u32> },
}

const NO_STATE: u32 = u32::MAX;
const NO_EVENT: u32 = u32::MAX;
/// Longest deterministic stretch stored as one jump.
const MAX_JUMP: u64 = 1 << 16;

/// A measurement step followed by the jump after each outcome.
#[derive(Clone, Debug)]
struct Event {
    thresholds: Box<[u128]>,
    /// `None` for outcomes that would be a semantic error if drawn.
    branches: Box<[Option<Branch>]>,
}

#[derive(Clone, Copy, Debug)]
struct Branch {
    /// Configuration right after the measurement step.
    classical: u32,
    head: u32,
    qid: u32,
    pass_entries: u64,
    then: Jump,
    /// Event reached after `then`, once known.
    next: u32,
}

/// The effect of running unitary transitions until the next measurement or halt.
#[derive(Clone, Copy, Debug)]
struct Jump {
    steps: u64,
    classical: u32,
    head: u32,
    qid: u32,
    pass_entries: u64,
}

/// Interned quantum states and memoized action results. One per worker.
#[derive(Debug, Default)]
pub struct StateCache {
    states: Vec<QuantumState>,
    ids: HashMap<QuantumState, u32>,
    memo: Vec<Vec<Option<Memo>>>,
    /// `jumps[state id][classical·tape_len + head]`; valid for `jump_tape` only.
    jumps: Vec<Vec<Option<Jump>>>,
    /// Event ids, indexed like `jumps`.
    event_index: Vec<Vec<u32>>,
    events: Vec<Event>,
    jump_tape: Vec<u8>,
}

impl StateCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn clear(&mut self) {
        self.states.clear();
        self.ids.clear();
        self.memo.iter_mut().for_each(Vec::clear);
        self.jumps.clear();
        self.event_index.clear();
        self.events.clear();
    }

    fn intern(&mut self, s: QuantumState) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.states.len() as u32;
        self.states.push(s.clone());
        self.ids.insert(s, id);
        id
    }

    /// Applies `action` to state `id`, drawing from `rng` for a measurement.
    fn apply(&mut self, actions: &[Action], action: u32, id: u32, rng: &mut dyn RngCore) -> (u32, usize) {
        let (a, i) = self.fill(actions, action, id);
        match self.memo[a][i].as_ref().expect("memo filled") {
            Memo::Unitary(next) => (*next, 0),
            Memo::Measured { thresholds, states } => {
                let r = rng.next_u64() as u128;
                let j = thresholds.iter().position(|&t| r < t).unwrap_or(thresholds.len() - 1);
                (states[j], j)
            }
        }
    }

    /// Result of a unitary `action` on state `id`.
    fn apply_unitary(&mut self, actions: &[Action], action: u32, id: u32) -> u32 {
        let (a, i) = self.fill(actions, action, id);
        match self.memo[a][i].as_ref().expect("memo filled") {
            Memo::Unitary(next) => *next,
            Memo::Measured { .. } => unreachable!("measurement passed as a unitary"),
        }
    }

    fn fill(&mut self, actions: &[Action], action: u32, id: u32) -> (usize, usize) {
        let a = action as usize;
        if self.memo.len() < actions.len() {
            self.memo.resize_with(actions.len(), Vec::new);
        }
        let i = id as usize;
        if self.memo[a].get(i).map_or(true, Option::is_none) {
            let state = self.states[i].clone();
            let memo = match &actions[a] {
                Action::Unitary(u) => Memo::Unitary(self.intern(state.apply(u))),
                Action::Measurement(m) => {
                    let b = state.measure(m);
                    let states = b.states.into_iter().map(|s| s.map_or(NO_STATE, |s| self.intern(s))).collect();
                    Memo::Measured { thresholds: b.thresholds, states }
                }
            };
            let row = &mut self.memo[a];
            if row.len() <= i {
                row.resize(i + 1, None);
            }
            row[i] = Some(memo);
        }
        (a, i)
    }
}

/// Where a run currently is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunState {
    pub classical: usize,
    pub head: usize,
    pub quantum: QuantumState,
    pub steps: u64,
}

/// How [`Executor::run_until`] stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentEnd {
    pub state: RunState,
    pub status: Status,
    /// True when the stop predicate fired (as opposed to halting or the cap).
    pub stopped: bool,
}

/// A spec compiled for fast repeated execution.
#[derive(Debug)]
pub struct Executor {
    spec: Arc<MachineSpec>,
    symbols: usize,
    table: Vec<Option<Entry>>,
    targets: Vec<CTarget>,
    halting: Vec<bool>,
    actions: Vec<Action>,
}

impl Executor {
    /// Compiles a spec; fails with a validation error listing all violations.
    pub fn new(spec: Arc<MachineSpec>) -> Result<Self> {
        let report = validate_machine(&spec);
        if !report.is_ok() {
            return Err(Error::Validation(report.to_string()));
        }
        let symbols = spec.alphabet().len() + 2;
        let n = spec.classical_states().len();
        let mut table = vec![None; n * symbols];
        let mut targets = Vec::new();
        for (&(s, sym), t) in spec.transitions() {
            let first_target = targets.len() as u32;
            targets.extend(t.targets.iter().map(|x| CTarget { next: x.next as u32, offset: x.movement.offset() as i8 }));
            table[s * symbols + symbol_index(&spec, sym)] =
                Some(Entry { action: t.action as u32, first_target, targets: t.targets.len() as u32 });
        }
        let halting = (0..n).map(|s| spec.is_halting(s)).collect();
        let actions = spec.actions().iter().map(|a| a.action.clone()).collect();
        Ok(Self { spec, symbols, table, targets, halting, actions })
    }

    pub fn spec(&self) -> &MachineSpec {
        &self.spec
    }

    /// Input as symbol indices with end-markers.
    pub fn encode(&self, input: &str) -> Result<Vec<u8>> {
        Ok(tape_of(&self.spec, input)?.iter().map(|&s| symbol_index(&self.spec, s) as u8).collect())
    }

    pub fn initial_state(&self) -> RunState {
        RunState {
            classical: self.spec.initial_classical(),
            head: 0,
            quantum: QuantumState::basis(self.spec.quantum_dim(), self.spec.initial_quantum()),
            steps: 0,
        }
    }

    /// Runs from `start` until a halting state, `cap` total steps, or
    /// `stop(classical state)` holds after a step.
    pub fn run_until(
        &self,
        cache: &mut StateCache,
        tape: &[u8],
        start: &RunState,
        rng: &mut dyn RngCore,
        cap: u64,
        stop: &dyn Fn(usize) -> bool,
    ) -> Result<SegmentEnd> {
        let mut passes = PassCounter::new(self.spec.pass_state(), start.classical);
        let (state, status, stopped) = self.drive(cache, tape, start, rng, cap, stop, &mut passes, None)?;
        Ok(SegmentEnd { state, status, stopped })
    }

    #[allow(clippy::too_many_arguments)]
    fn drive(
        &self,
        cache: &mut StateCache,
        tape: &[u8],
        start: &RunState,
        rng: &mut dyn RngCore,
        cap: u64,
        stop: &dyn Fn(usize) -> bool,
        passes: &mut PassCounter,
        mut trace: Option<&mut Vec<TraceEntry>>,
    ) -> Result<(RunState, Status, bool)> {
        if cache.states.len() > CACHE_LIMIT {
            cache.clear();
        }
        let mut qid = cache.intern(start.quantum.clone());
        let mut classical = start.classical;
        let mut head = start.head;
        let mut steps = start.steps;
        let mut status = status_of(&self.spec, classical);
        let mut stopped = false;
        while status == Status::Running && steps < cap {
            let sym = tape[head] as usize;
            let entry = self.entry(classical, sym)?;
            let (next_q, outcome) = cache.apply(&self.actions, entry.action, qid, rng);
            if outcome >= entry.targets as usize {
                return Err(Error::Semantics("measurement outcome without a target".into()));
            }
            let target = self.targets[(entry.first_target as usize) + outcome];
            if let Some(t) = trace.as_deref_mut() {
                let action = &self.spec.actions()[entry.action as usize];
                t.push(TraceEntry {
                    step: steps,
                    state: self.spec.classical_states()[classical].clone(),
                    head,
                    symbol: self.spec.tape_alphabet()[sym].token(),
                    action: action.name.clone(),
                    outcome: action.action.is_measurement().then_some(outcome),
                });
            }
            head = moved_head(head, target.offset as i64, tape.len())?;
            passes.enter(classical, target.next as usize);
            classical = target.next as usize;
            qid = next_q;
            steps += 1;
            if self.halting[classical] {
                status = status_of(&self.spec, classical);
            } else if stop(classical) {
                stopped = true;
                break;
            }
            if cache.states.len() > CACHE_LIMIT {
                let q = cache.states[qid as usize].clone();
                cache.clear();
                qid = cache.intern(q);
            }
        }
        let quantum = cache.states[qid as usize].clone();
        Ok((RunState { classical, head, quantum, steps }, status, stopped))
    }

    fn entry(&self, classical: usize, sym: usize) -> Result<Entry> {
        self.table[classical * self.symbols + sym].ok_or_else(|| {
            Error::Semantics(format!(
                "no transition for ({}, {})",
                self.spec.classical_states()[classical],
                self.spec.tape_alphabet()[sym]
            ))
        })
    }

    /// The deterministic stretch starting at `(classical, head, qid)`.
    fn jump(&self, cache: &mut StateCache, tape: &[u8], classical: usize, head: usize, qid: u32) -> Result<Jump> {
        let slot = classical * tape.len() + head;
        if let Some(j) = cache.jumps.get(qid as usize).and_then(|row| row.get(slot).copied().flatten()) {
            return Ok(j);
        }
        let (mut c, mut h, mut q) = (classical, head, qid);
        let (mut steps, mut pass_entries) = (0, 0);
        while !self.halting[c] && steps < MAX_JUMP {
            let entry = self.entry(c, tape[h] as usize)?;
            if self.actions[entry.action as usize].is_measurement() {
                break;
            }
            q = cache.apply_unitary(&self.actions, entry.action, q);
            let target = self.targets[entry.first_target as usize];
            h = moved_head(h, target.offset as i64, tape.len())?;
            let next = target.next as usize;
            if Some(next) == self.spec.pass_state() && next != c {
                pass_entries += 1;
            }
            c = next;
            steps += 1;
        }
        let j = Jump { steps, classical: c as u32, head: h as u32, qid: q, pass_entries };
        let q = qid as usize;
        if cache.jumps.len() <= q {
            cache.jumps.resize_with(q + 1, Vec::new);
        }
        if cache.jumps[q].is_empty() {
            cache.jumps[q] = vec![None; self.halting.len() * tape.len()];
        }
        cache.jumps[q][slot] = Some(j);
        Ok(j)
    }

    /// Same result as [`Self::drive`] without a stop predicate or trace,
    /// crossing deterministic stretches by memoized jumps.
    fn drive_fast(
        &self,
        cache: &mut StateCache,
        tape: &[u8],
        start: &RunState,
        rng: &mut dyn RngCore,
        cap: u64,
        passes: &mut PassCounter,
    ) -> Result<(RunState, Status)> {
        if cache.jump_tape != tape {
            cache.jumps.clear();
            cache.event_index.clear();
            cache.events.clear();
            cache.jump_tape = tape.to_vec();
        }
        if cache.states.len() > CACHE_LIMIT {
            cache.clear();
        }
        let mut qid = cache.intern(start.quantum.clone());
        let (mut classical, mut head, mut steps) = (start.classical, start.head, start.steps);
        // Event at the current configuration, when known, and the branch
        // that led here if its link is still unresolved.
        let mut ev_id = NO_EVENT;
        let mut came_from: Option<(u32, usize)> = None;
        while !self.halting[classical] && steps < cap {
            if cache.states.len() > CACHE_LIMIT {
                let q = cache.states[qid as usize].clone();
                cache.clear();
                qid = cache.intern(q);
                ev_id = NO_EVENT;
                came_from = None;
            }
            if ev_id == NO_EVENT {
                let j = self.jump(cache, tape, classical, head, qid)?;
                if j.steps > 0 {
                    if steps + j.steps > cap {
                        let quantum = cache.states[qid as usize].clone();
                        let here = RunState { classical, head, quantum, steps };
                        let (end, status, _) = self.drive(cache, tape, &here, rng, cap, &|_| false, passes, None)?;
                        return Ok((end, status));
                    }
                    classical = j.classical as usize;
                    head = j.head as usize;
                    qid = j.qid;
                    steps += j.steps;
                    passes.entries += j.pass_entries;
                    came_from = None;
                    continue;
                }
                ev_id = self.event_id(cache, tape, classical, head, qid)?;
                if let Some((e, k)) = came_from.take() {
                    if let Some(b) = cache.events[e as usize].branches[k].as_mut() {
                        b.next = ev_id;
                    }
                }
            }
            let ev = &cache.events[ev_id as usize];
            let r = rng.next_u64() as u128;
            let k = ev.thresholds.iter().position(|&t| r < t).unwrap_or(ev.thresholds.len() - 1);
            let b = ev.branches[k].ok_or_else(|| Error::Semantics("measurement outcome without a target".into()))?;
            passes.entries += b.pass_entries;
            if steps + 1 + b.then.steps > cap {
                classical = b.classical as usize;
                head = b.head as usize;
                qid = b.qid;
                steps += 1;
                ev_id = NO_EVENT;
                continue;
            }
            classical = b.then.classical as usize;
            head = b.then.head as usize;
            qid = b.then.qid;
            steps += 1 + b.then.steps;
            passes.entries += b.then.pass_entries;
            if b.next == NO_EVENT {
                came_from = Some((ev_id, k));
            }
            ev_id = b.next;
        }
        let quantum = cache.states[qid as usize].clone();
        Ok((RunState { classical, head, quantum, steps }, status_of(&self.spec, classical)))
    }

    /// Index of the event at a configuration whose next transition measures.
    fn event_id(&self, cache: &mut StateCache, tape: &[u8], classical: usize, head: usize, qid: u32) -> Result<u32> {
        let slot = classical * tape.len() + head;
        let q = qid as usize;
        if let Some(&id) = cache.event_index.get(q).and_then(|row| row.get(slot)) {
            if id != NO_EVENT {
                return Ok(id);
            }
        }
        let ev = self.event(cache, tape, classical, head, qid)?;
        let id = cache.events.len() as u32;
        cache.events.push(ev);
        if cache.event_index.len() <= q {
            cache.event_index.resize_with(q + 1, Vec::new);
        }
        if cache.event_index[q].is_empty() {
            cache.event_index[q] = vec![NO_EVENT; self.halting.len() * tape.len()];
        }
        cache.event_index[q][slot] = id;
        Ok(id)
    }

    /// Builds the measurement event at a configuration whose next transition measures.
    fn event(&self, cache: &mut StateCache, tape: &[u8], classical: usize, head: usize, qid: u32) -> Result<Event> {
        let entry = self.entry(classical, tape[head] as usize)?;
        let (a, i) = cache.fill(&self.actions, entry.action, qid);
        let (thresholds, states) = match cache.memo[a][i].as_ref().expect("memo filled") {
            Memo::Measured { thresholds, states } => (thresholds.clone(), states.clone()),
            Memo::Unitary(_) => unreachable!("events start at measurements"),
        };
        let mut branches = Vec::with_capacity(states.len());
        for (j, &q) in states.iter().enumerate() {
            if q == NO_STATE || j >= entry.targets as usize {
                branches.push(None);
                continue;
            }
            let target = self.targets[entry.first_target as usize + j];
            let h = match moved_head(head, target.offset as i64, tape.len()) {
                Ok(h) => h,
                Err(_) => {
                    branches.push(None);
                    continue;
                }
            };
            let next = target.next as usize;
            let pass_entries = u64::from(Some(next) == self.spec.pass_state() && next != classical);
            let then = self.jump(cache, tape, next, h, q)?;
            branches.push(Some(Branch { classical: next as u32, head: h as u32, qid: q, pass_entries, then, next: NO_EVENT }));
        }
        Ok(Event { thresholds: thresholds.into_boxed_slice(), branches: branches.into_boxed_slice() })
    }

    fn run_encoded(&self, cache: &mut StateCache, tape: &[u8], seed: u64, cap: u64) -> Result<Outcome> {
        let mut rng = rng_from_seed(seed);
        let start = self.initial_state();
        let mut passes = PassCounter::new(self.spec.pass_state(), start.classical);
        let (end, status) = self.drive_fast(cache, tape, &start, &mut rng, cap, &mut passes)?;
        let verdict = match status {
            Status::Accepted => Verdict::Accepted,
            Status::Rejected => Verdict::Rejected,
            Status::Running => Verdict::StepCapExceeded,
        };
        Ok(Outcome { verdict, steps_used: end.steps, passes_completed: passes.completed(status != Status::Running) })
    }

    pub fn run_trial(&self, input: &str, seed: u64, step_cap: u64) -> Result<Outcome> {
        let tape = self.encode(input)?;
        self.run_encoded(&mut StateCache::new(), &tape, seed, step_cap)
    }

    /// Runs `trials` independent trials (in parallel) with seeds
    /// `trial_seed(master_seed, i)`. The result does not depend on scheduling.
    pub fn run_trials(&self, input: &str, trials: u64, master_seed: u64, step_cap: u64) -> Result<TrialStats> {
        Ok(TrialStats::from_outcomes(&self.outcomes(input, trials, master_seed, step_cap)?, master_seed))
    }

    /// Per-trial outcomes in trial order.
    pub fn outcomes(&self, input: &str, trials: u64, master_seed: u64, step_cap: u64) -> Result<Vec<Outcome>> {
        if trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        let tape = self.encode(input)?;
        (0..trials)
            .into_par_iter()
            .map_init(StateCache::new, |cache, i| self.run_encoded(cache, &tape, trial_seed(master_seed, i), step_cap))
            .collect()
    }

    pub fn trace(&self, input: &str, seed: u64, max_steps: u64) -> Result<Trace> {
        let tape = self.encode(input)?;
        let mut rng = rng_from_seed(seed);
        let start = self.initial_state();
        let mut passes = PassCounter::new(self.spec.pass_state(), start.classical);
        let mut entries = Vec::new();
        let (end, status, _) = self.drive(
            &mut StateCache::new(),
            &tape,
            &start,
            &mut rng,
            max_steps,
            &|_| false,
            &mut passes,
            Some(&mut entries),
        )?;
        let verdict = match status {
            Status::Accepted => Some(Verdict::Accepted),
            Status::Rejected => Some(Verdict::Rejected),
            Status::Running => None,
        };
        Ok(Trace {
            entries,
            final_state: self.spec.classical_states()[end.classical].clone(),
            final_head: end.head,
            verdict,
        })
    }
}

fn symbol_index(spec: &MachineSpec, s: Symbol) -> usize {
    match s {
        Symbol::LeftEnd => 0,
        Symbol::RightEnd => 1,
        Symbol::Letter(c) => 2 + spec.alphabet().iter().position(|&x| x == c).expect("letter in alphabet"),
    }
}

/// Counts entries into the pass state; a pass is complete when the next one
/// starts or the run halts.
struct PassCounter {
    pass_state: Option<usize>,
    entries: u64,
}

impl PassCounter {
    fn new(pass_state: Option<usize>, start: usize) -> Self {
        Self { pass_state, entries: u64::from(pass_state == Some(start)) }
    }

    fn enter(&mut self, from: usize, to: usize) {
        if Some(to) == self.pass_state && from != to {
            self.entries += 1;
        }
    }

    fn completed(&self, halted: bool) -> u64 {
        self.entries.saturating_sub(1) + u64::from(halted && self.entries > 0)
    }
}

/// Convenience wrapper: compile and run one trial.
pub fn run_trial(spec: &MachineSpec, input: &str, seed: u64, step_cap: u64) -> Result<Outcome> {
    Executor::new(Arc::new(spec.clone()))?.run_trial(input, seed, step_cap)
}

/// Convenience wrapper: compile and run many trials.
pub fn run_trials(spec: &MachineSpec, input: &str, trials: u64, master_seed: u64, step_cap: u64) -> Result<TrialStats> {
    Executor::new(Arc::new(spec.clone()))?.run_trials(input, trials, master_seed, step_cap)
}

pub fn trace(spec: &MachineSpec, input: &str, seed: u64, max_steps: u64) -> Result<Trace> {
    Executor::new(Arc::new(spec.clone()))?.trace(input, seed, max_steps)
}

/// Reference trace built with [`crate::automaton::step`] alone; used to
/// check the executor against the plain step semantics.
pub fn reference_trace(spec: &MachineSpec, input: &str, seed: u64, max_steps: u64) -> Result<Trace> {
    let mut rng = rng_from_seed(seed);
    let mut config: Configuration = crate::automaton::initial_configuration(spec, input)?;
    let mut entries = Vec::new();
    while config.status(spec) == Status::Running && config.steps < max_steps {
        let before = config.clone();
        let (next, event) = crate::automaton::step(spec, &config, &mut rng)?;
        entries.push(TraceEntry {
            step: before.steps,
            state: spec.classical_states()[before.classical].clone(),
            head: before.head,
            symbol: before.scanned().token(),
            action: spec.actions()[event.action].name.clone(),
            outcome: event.outcome,
        });
        config = next;
    }
    let verdict = match config.status(spec) {
        Status::Accepted => Some(Verdict::Accepted),
        Status::Rejected => Some(Verdict::Rejected),
        Status::Running => None,
    };
    Ok(Trace {
        entries,
        final_state: spec.classical_states()[config.classical].clone(),
        final_head: config.head,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..4).map(|i| trial_seed(7, i)).collect();
        let b: Vec<u64> = (0..4).map(|i| trial_seed(7, i)).collect();
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn default_cap() {
        assert_eq!(default_step_cap(0), 160_000);
        assert_eq!(default_step_cap(2), 2_560_000);
        assert_eq!(default_step_cap(usize::MAX / 2), u64::MAX);
    }

    #[test]
    fn stats_moments() {
        let o = |steps| Outcome { verdict: Verdict::Accepted, steps_used: steps, passes_completed: 1 };
        let s = TrialStats::from_outcomes(&[o(1), o(2), o(3), o(6)], 0);
        assert_eq!(s.accepted, 4);
        assert!((s.mean_steps - 3.0).abs() < 1e-12);
        assert!((s.variance_steps - 14.0 / 3.0).abs() < 1e-12);
    }

    fn stepwise(ex: &Executor, input: &str, seed: u64, cap: u64) -> Outcome {
        let tape = ex.encode(input).unwrap();
        let mut rng = rng_from_seed(seed);
        let start = ex.initial_state();
        let mut passes = PassCounter::new(ex.spec.pass_state(), start.classical);
        let (end, status, _) =
            ex.drive(&mut StateCache::new(), &tape, &start, &mut rng, cap, &|_| false, &mut passes, None).unwrap();
        let verdict = match status {
            Status::Accepted => Verdict::Accepted,
            Status::Rejected => Verdict::Rejected,
            Status::Running => Verdict::StepCapExceeded,
        };
        Outcome { verdict, steps_used: end.steps, passes_completed: passes.completed(status != Status::Running) }
    }

    #[test]
    fn jumps_match_single_steps() {
        for (name, inputs) in [
            ("palindrome3", ["", "ab", "aba", "abb"]),
            ("palindrome-qubit", ["a", "ab", "bab", "bb"]),
            ("anbn", ["", "ab", "aab", "aabb"]),
        ] {
            let ex = Executor::new(Arc::new(crate::zoo::build_by_name(name, 0.5).unwrap())).unwrap();
            let mut cache = StateCache::new();
            for input in inputs {
                let tape = ex.encode(input).unwrap();
                for seed in 0..20 {
                    for cap in [7, 50, 333, 100_000] {
                        let fast = ex.run_encoded(&mut cache, &tape, seed, cap).unwrap();
                        assert_eq!(fast, stepwise(&ex, input, seed, cap), "{name} {input:?} seed {seed} cap {cap}");
                    }
                }
            }
        }
    }
}
