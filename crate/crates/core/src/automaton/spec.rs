use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Surd;

/// A tape symbol: an end-marker or a letter of the input alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    LeftEnd,
    RightEnd,
    Letter(char),
}

impl Symbol {
    pub const LEFT_TOKEN: &'static str = "^";
    pub const RIGHT_TOKEN: &'static str = "$";

    pub fn token(&self) -> String {
        match self {
            Symbol::LeftEnd => Self::LEFT_TOKEN.to_string(),
            Symbol::RightEnd => Self::RIGHT_TOKEN.to_string(),
            Symbol::Letter(c) => c.to_string(),
        }
    }

    pub fn parse_token(s: &str) -> Result<Self> {
        match s {
            "^" | "¢" => Ok(Symbol::LeftEnd),
            "$" => Ok(Symbol::RightEnd),
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Symbol::Letter(c)),
                    _ => Err(Error::Parse(format!("invalid tape symbol `{s}`"))),
                }
            }
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.token())
    }
}

/// Head movement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn from_offset(d: i64) -> Option<Self> {
        match d {
            -1 => Some(Move::Left),
            0 => Some(Move::Stay),
            1 => Some(Move::Right),
            _ => None,
        }
    }
}

/// Square matrix with exact entries in `Q(√2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: Vec<Vec<Surd>>,
    identity: bool,
}

impl ExactMatrix {
    pub fn new(rows: Vec<Vec<Surd>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("exact matrix must be square and non-empty".into()));
        }
        let identity = rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() }));
        Ok(Self { rows, identity })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&v| Surd::from_int(v)).collect()).collect())
    }

    /// Integer matrix divided by a common denominator.
    pub fn from_scaled_ints(rows: &[[i64; 3]; 3], den: i64) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&v| Surd::from_ratio(v, den)).collect()).collect();
        Self::new(rows).expect("3x3 is square")
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Surd::one() } else { Surd::zero() }).collect())
            .collect();
        Self { rows, identity: true }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Surd>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Surd {
        &self.rows[i][j]
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| self.rows[j][i].clone()).collect()).collect();
        Self { rows, identity: self.identity }
    }

    pub fn mul(&self, other: &ExactMatrix) -> ExactMatrix {
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = Surd::zero();
                        for k in 0..n {
                            if !self.rows[i][k].is_zero() && !other.rows[k][j].is_zero() {
                                acc += &(&self.rows[i][k] * &other.rows[k][j]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        ExactMatrix::new(rows).expect("square product")
    }

    pub fn apply(&self, v: &[Surd]) -> Vec<Surd> {
        if self.identity {
            return v.to_vec();
        }
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Surd::zero();
                for (m, x) in row.iter().zip(v) {
                    if !m.is_zero() && !x.is_zero() {
                        acc += &(m * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// `MᵀM = I`, exactly. Entries are real, so this is unitarity.
    pub fn is_orthogonal(&self) -> bool {
        self.identity || self.transpose().mul(self).is_identity()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::new(
            self.rows.iter().map(|r| r.iter().map(|v| Complex64::new(v.to_f64(), 0.0)).collect()).collect(),
        )
        .expect("square")
    }
}

/// Square complex matrix evaluated in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: Vec<Vec<Complex64>>,
}

impl ComplexMatrix {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("complex matrix must be square and non-empty".into()));
        }
        Ok(Self { rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i][j]
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|row| row.iter().zip(v).map(|(m, x)| m * x).sum()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        Self { rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].conj()).collect()).collect() }
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: Complex64 = (0..n).map(|k| self.rows[k][i].conj() * self.rows[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// A unitary action on the quantum register.
#[derive(Clone, Debug, PartialEq)]
pub enum Unitary {
    Exact(ExactMatrix),
    Complex(ComplexMatrix),
    /// Rotation by `multiple·√2·π` in the plane of basis states `(p, q)`:
    /// `|p⟩ ↦ cos|p⟩ + sin|q⟩`, `|q⟩ ↦ −sin|p⟩ + cos|q⟩`.
    Rotation { plane: (usize, usize), multiple: i64 },
}

impl Unitary {
    pub fn identity(n: usize) -> Self {
        Unitary::Exact(ExactMatrix::identity(n))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Unitary::Exact(m) => m.is_identity(),
            Unitary::Complex(_) => false,
            Unitary::Rotation { multiple, .. } => *multiple == 0,
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Unitary::Exact(m) => Some(m.dim()),
            Unitary::Complex(m) => Some(m.dim()),
            Unitary::Rotation { .. } => None,
        }
    }
}

/// An orthogonal measurement. Outcome `j` is the `j`-th projector.
#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    /// Projectors onto spans of basis states; each inner list is one outcome.
    Basis(Vec<Vec<usize>>),
    /// Explicit exact projector matrices (library API only).
    Projectors(Vec<ExactMatrix>),
}

impl Measurement {
    pub fn outcome_count(&self) -> usize {
        match self {
            Measurement::Basis(parts) => parts.len(),
            Measurement::Projectors(ps) => ps.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Unitary(Unitary),
    Measurement(Measurement),
}

impl Action {
    pub fn outcome_count(&self) -> usize {
        match self {
            Action::Unitary(_) => 1,
            Action::Measurement(m) => m.outcome_count(),
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Action::Measurement(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedAction {
    pub name: String,
    pub action: Action,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Target {
    pub next: usize,
    pub movement: Move,
}

/// `Θ(s,σ)` (as an action index) together with `δ(s,σ)`: one target for a
/// unitary, one per outcome for a measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub action: usize,
    pub targets: Vec<Target>,
}

/// The 9-tuple `(Q, S, Σ, Θ, δ, q₀, s₀, S_acc, S_rej)` plus bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct MachineSpec {
    pub(crate) name: String,
    pub(crate) quantum_states: Vec<String>,
    pub(crate) classical_states: Vec<String>,
    pub(crate) alphabet: Vec<char>,
    pub(crate) initial_quantum: usize,
    pub(crate) initial_classical: usize,
    pub(crate) accepting: BTreeSet<usize>,
    pub(crate) rejecting: BTreeSet<usize>,
    pub(crate) actions: Vec<NamedAction>,
    pub(crate) transitions: BTreeMap<(usize, Symbol), Transition>,
    pub(crate) pass_state: Option<usize>,
    pub(crate) metadata: BTreeMap<String, String>,
}

impl MachineSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quantum_states(&self) -> &[String] {
        &self.quantum_states
    }

    pub fn quantum_dim(&self) -> usize {
        self.quantum_states.len()
    }

    pub fn classical_states(&self) -> &[String] {
        &self.classical_states
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn initial_quantum(&self) -> usize {
        self.initial_quantum
    }

    pub fn initial_classical(&self) -> usize {
        self.initial_classical
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn rejecting(&self) -> &BTreeSet<usize> {
        &self.rejecting
    }

    pub fn actions(&self) -> &[NamedAction] {
        &self.actions
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, Symbol), Transition> {
        &self.transitions
    }

    pub fn transition(&self, state: usize, symbol: Symbol) -> Option<&Transition> {
        self.transitions.get(&(state, symbol))
    }

    pub fn pass_state(&self) -> Option<usize> {
        self.pass_state
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn is_halting(&self, state: usize) -> bool {
        self.accepting.contains(&state) || self.rejecting.contains(&state)
    }

    pub fn classical_index(&self, name: &str) -> Option<usize> {
        self.classical_states.iter().position(|s| s == name)
    }

    pub fn quantum_index(&self, name: &str) -> Option<usize> {
        self.quantum_states.iter().position(|s| s == name)
    }

    /// `Γ = Σ ∪ {¢, $}`, markers first.
    pub fn tape_alphabet(&self) -> Vec<Symbol> {
        let mut g = vec![Symbol::LeftEnd, Symbol::RightEnd];
        g.extend(self.alphabet.iter().map(|&c| Symbol::Letter(c)));
        g
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    /// True when every unitary and projector has exact entries, so runs stay
    /// on the exact backend (rotations included).
    pub fn is_exact(&self) -> bool {
        self.actions.iter().all(|a| !matches!(a.action, Action::Unitary(Unitary::Complex(_))))
    }

    /// Mutable access for tests that deliberately corrupt a machine.
    pub fn transitions_mut(&mut self) -> &mut BTreeMap<(usize, Symbol), Transition> {
        &mut self.transitions
    }

    pub fn actions_mut(&mut self) -> &mut Vec<NamedAction> {
        &mut self.actions
    }
}

/// Assembles a [`MachineSpec`] by name. Classical states are registered in
/// order of first mention.
#[derive(Debug, Default)]
pub struct MachineBuilder {
    name: String,
    quantum_states: Vec<String>,
    classical_states: Vec<String>,
    classical_index: HashMap<String, usize>,
    alphabet: Vec<char>,
    initial: Option<(String, String)>,
    accepting: Vec<String>,
    rejecting: Vec<String>,
    actions: Vec<NamedAction>,
    transitions: Vec<PendingTransition>,
    pass_state: Option<String>,
    metadata: BTreeMap<String, String>,
}

/// `(state, symbol, action, branch targets)` awaiting name resolution.
type PendingTransition = (String, Symbol, String, Vec<(String, Move)>);

impl MachineBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    pub fn quantum_states<S: AsRef<str>>(mut self, names: &[S]) -> Self {
        self.quantum_states = names.iter().map(|s| s.as_ref().to_string()).collect();
        self
    }

    pub fn alphabet(mut self, letters: &[char]) -> Self {
        self.alphabet = letters.to_vec();
        self
    }

    pub fn classical_state(&mut self, name: &str) -> usize {
        if let Some(&i) = self.classical_index.get(name) {
            return i;
        }
        let i = self.classical_states.len();
        self.classical_states.push(name.to_string());
        self.classical_index.insert(name.to_string(), i);
        i
    }

    pub fn initial(&mut self, quantum: &str, classical: &str) -> &mut Self {
        self.classical_state(classical);
        self.initial = Some((quantum.to_string(), classical.to_string()));
        self
    }

    pub fn accepting(&mut self, state: &str) -> &mut Self {
        self.classical_state(state);
        self.accepting.push(state.to_string());
        self
    }

    pub fn rejecting(&mut self, state: &str) -> &mut Self {
        self.classical_state(state);
        self.rejecting.push(state.to_string());
        self
    }

    pub fn pass_state(&mut self, state: &str) -> &mut Self {
        self.classical_state(state);
        self.pass_state = Some(state.to_string());
        self
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn action(&mut self, name: &str, action: Action) -> &mut Self {
        self.actions.push(NamedAction { name: name.to_string(), action });
        self
    }

    pub fn has_action(&self, name: &str) -> bool {
        self.actions.iter().any(|a| a.name == name)
    }

    /// `Θ(state, symbol) = action` (a unitary) and `δ(state, symbol) = (next, movement)`.
    pub fn on(&mut self, state: &str, symbol: Symbol, action: &str, next: &str, movement: Move) -> &mut Self {
        self.on_outcomes(state, symbol, action, &[(next, movement)])
    }

    /// `Θ(state, symbol) = action` with one `(next, movement)` per outcome.
    pub fn on_outcomes(
        &mut self,
        state: &str,
        symbol: Symbol,
        action: &str,
        targets: &[(&str, Move)],
    ) -> &mut Self {
        self.classical_state(state);
        for (next, _) in targets {
            self.classical_state(next);
        }
        self.transitions.push((
            state.to_string(),
            symbol,
            action.to_string(),
            targets.iter().map(|(n, m)| (n.to_string(), *m)).collect(),
        ));
        self
    }

    pub fn build(self) -> Result<MachineSpec> {
        let err = |m: String| Error::InvalidSpec(m);
        if self.quantum_states.is_empty() {
            return Err(err("no quantum states".into()));
        }
        let q_index = |name: &str| {
            self.quantum_states
                .iter()
                .position(|q| q == name)
                .ok_or_else(|| err(format!("unknown quantum state `{name}`")))
        };
        let s_index = |name: &str| {
            self.classical_index.get(name).copied().ok_or_else(|| err(format!("unknown classical state `{name}`")))
        };
        let dup = |names: &[String]| {
            let mut seen = BTreeSet::new();
            names.iter().find(|n| !seen.insert(n.as_str())).cloned()
        };
        if let Some(d) = dup(&self.quantum_states) {
            return Err(err(format!("duplicate quantum state `{d}`")));
        }
        {
            let mut seen = BTreeSet::new();
            for c in &self.alphabet {
                if !seen.insert(*c) {
                    return Err(err(format!("duplicate alphabet letter `{c}`")));
                }
                if c.is_whitespace() || *c == '^' || *c == '$' || *c == '¢' {
                    return Err(err(format!("letter `{c}` is reserved")));
                }
            }
        }
        let action_names: Vec<String> = self.actions.iter().map(|a| a.name.clone()).collect();
        if let Some(d) = dup(&action_names) {
            return Err(err(format!("duplicate action `{d}`")));
        }
        let dim = self.quantum_states.len();
        for a in &self.actions {
            let bad_dim = |d: usize| err(format!("action `{}` has dimension {d}, register has {dim}", a.name));
            match &a.action {
                Action::Unitary(u) => {
                    if let Some(d) = u.dim() {
                        if d != dim {
                            return Err(bad_dim(d));
                        }
                    }
                    if let Unitary::Rotation { plane: (p, q), .. } = u {
                        if *p >= dim || *q >= dim {
                            return Err(err(format!("rotation `{}` plane out of range", a.name)));
                        }
                    }
                }
                Action::Measurement(Measurement::Basis(parts)) => {
                    if parts.iter().flatten().any(|&i| i >= dim) {
                        return Err(err(format!("measurement `{}` names a basis state out of range", a.name)));
                    }
                }
                Action::Measurement(Measurement::Projectors(ps)) => {
                    if let Some(p) = ps.iter().find(|p| p.dim() != dim) {
                        return Err(bad_dim(p.dim()));
                    }
                }
            }
        }
        let (iq, is) = self.initial.clone().ok_or_else(|| err("initial states not set".into()))?;
        let initial_quantum = q_index(&iq)?;
        let initial_classical = s_index(&is)?;
        let accepting = self.accepting.iter().map(|s| s_index(s)).collect::<Result<BTreeSet<_>>>()?;
        let rejecting = self.rejecting.iter().map(|s| s_index(s)).collect::<Result<BTreeSet<_>>>()?;
        let pass_state = self.pass_state.as_deref().map(s_index).transpose()?;

        let mut transitions = BTreeMap::new();
        for (state, symbol, action, targets) in &self.transitions {
            let s = s_index(state)?;
            if let Symbol::Letter(c) = symbol {
                if !self.alphabet.contains(c) {
                    return Err(err(format!("transition ({state}, {c}) uses a letter outside the alphabet")));
                }
            }
            let a = action_names
                .iter()
                .position(|n| n == action)
                .ok_or_else(|| err(format!("unknown action `{action}`")))?;
            let targets = targets
                .iter()
                .map(|(n, m)| Ok(Target { next: s_index(n)?, movement: *m }))
                .collect::<Result<Vec<_>>>()?;
            if transitions.insert((s, *symbol), Transition { action: a, targets }).is_some() {
                return Err(err(format!("duplicate transition for ({state}, {symbol})")));
            }
        }

        Ok(MachineSpec {
            name: self.name,
            quantum_states: self.quantum_states,
            classical_states: self.classical_states,
            alphabet: self.alphabet,
            initial_quantum,
            initial_classical,
            accepting,
            rejecting,
            actions: self.actions,
            transitions,
            pass_state,
            metadata: self.metadata,
        })
    }
}
