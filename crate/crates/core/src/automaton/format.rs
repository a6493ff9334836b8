//! Machine-spec file format (TOML).
//!
//! ```toml
//! format = "qcfa-machine/1"
//! name = "example"
//! quantum_states = ["q0", "q1"]
//! classical_states = ["s0", "acc", "rej"]   # optional; fixes state order
//! alphabet = ["a", "b"]
//! initial_quantum = "q0"
//! initial_classical = "s0"
//! accepting = ["acc"]
//! rejecting = ["rej"]
//! pass_state = "s0"                          # optional
//!
//! [[actions]]
//! name = "U"
//! kind = "unitary"
//! field = "exact"            # entries: integers, p/q, decimals, `c*sqrt2` terms
//! matrix = [["4/5", "3/5"], ["-3/5", "4/5"]]
//!
//! [[actions]]
//! name = "V"
//! kind = "unitary"
//! field = "complex"          # entries parsed as f64 (or exact rationals)
//! re = [["0.6", "0"], ["0", "0.6"]]
//! im = [["0", "-0.8"], ["-0.8", "0"]]
//!
//! [[actions]]
//! name = "R"
//! kind = "rotation"          # angle = multiple·√2·π in the given plane
//! plane = ["q0", "q1"]
//! sqrt2_pi_multiple = 1
//!
//! [[actions]]
//! name = "M"
//! kind = "measurement"       # one list of basis states per outcome
//! outcomes = [["q0"], ["q1"]]
//!
//! [[transitions]]
//! state = "s0"
//! symbol = "^"               # "^" left end-marker, "$" right end-marker
//! action = "U"
//! next = "s0"
//! move = 1                   # -1, 0 or 1
//!
//! [[transitions]]
//! state = "s0"
//! symbol = "$"
//! action = "M"
//! outcomes = [{ next = "acc", move = 0 }, { next = "rej", move = 0 }]
//! ```
//!
//! Logarithms in derived parameters (`metadata.k`) are base 2.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spec::{
    Action, ComplexMatrix, ExactMatrix, MachineBuilder, MachineSpec, Measurement, Move, Symbol, Unitary,
};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rational_to_f64, Surd};

pub const FORMAT_TAG: &str = "qcfa-machine/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMachine {
    format: String,
    name: String,
    quantum_states: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    classical_states: Option<Vec<String>>,
    alphabet: Vec<String>,
    initial_quantum: String,
    initial_classical: String,
    #[serde(default)]
    accepting: Vec<String>,
    #[serde(default)]
    rejecting: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pass_state: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
    #[serde(default)]
    actions: Vec<RawAction>,
    #[serde(default)]
    transitions: Vec<RawTransition>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAction {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    re: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plane: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sqrt2_pi_multiple: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcomes: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    state: String,
    symbol: String,
    action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next: Option<String>,
    #[serde(default, rename = "move", skip_serializing_if = "Option::is_none")]
    movement: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcomes: Option<Vec<RawTarget>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    next: String,
    #[serde(rename = "move")]
    movement: i64,
}

fn parse_move(d: i64) -> Result<Move> {
    Move::from_offset(d).ok_or_else(|| Error::Parse(format!("head move must be -1, 0 or 1, got {d}")))
}

fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    Ok(rational_to_f64(&parse_rational(s)?))
}

fn parse_action(raw: &RawAction, quantum: &[String]) -> Result<Action> {
    let q_index = |name: &str| {
        quantum.iter().position(|q| q == name).ok_or_else(|| Error::Parse(format!("unknown quantum state `{name}`")))
    };
    let need = |what: &str| Error::Parse(format!("action `{}` is missing `{what}`", raw.name));
    match raw.kind.as_str() {
        "unitary" => match raw.field.as_deref().unwrap_or("exact") {
            "exact" => {
                let rows = raw.matrix.as_ref().ok_or_else(|| need("matrix"))?;
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|e| e.parse::<Surd>()).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Ok(Action::Unitary(Unitary::Exact(ExactMatrix::new(rows)?)))
            }
            "complex" => {
                let re = raw.re.as_ref().ok_or_else(|| need("re"))?;
                let im = raw.im.as_ref().ok_or_else(|| need("im"))?;
                if re.len() != im.len() || re.iter().zip(im).any(|(a, b)| a.len() != b.len()) {
                    return Err(Error::Parse(format!("action `{}`: re/im shapes differ", raw.name)));
                }
                let rows = re
                    .iter()
                    .zip(im)
                    .map(|(rr, ir)| {
                        rr.iter().zip(ir).map(|(r, i)| Ok(Complex64::new(parse_real(r)?, parse_real(i)?))).collect()
                    })
                    .collect::<Result<Vec<Vec<_>>>>()?;
                Ok(Action::Unitary(Unitary::Complex(ComplexMatrix::new(rows)?)))
            }
            other => Err(Error::Parse(format!("unknown field `{other}`"))),
        },
        "rotation" => {
            let [p, q] = raw.plane.as_ref().ok_or_else(|| need("plane"))?;
            let multiple = raw.sqrt2_pi_multiple.ok_or_else(|| need("sqrt2_pi_multiple"))?;
            Ok(Action::Unitary(Unitary::Rotation { plane: (q_index(p)?, q_index(q)?), multiple }))
        }
        "measurement" => {
            let outcomes = raw.outcomes.as_ref().ok_or_else(|| need("outcomes"))?;
            let parts = outcomes
                .iter()
                .map(|o| o.iter().map(|n| q_index(n)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(Action::Measurement(Measurement::Basis(parts)))
        }
        other => Err(Error::Parse(format!("unknown action kind `{other}`"))),
    }
}

pub fn parse_machine(text: &str) -> Result<MachineSpec> {
    let raw: RawMachine = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.format != FORMAT_TAG {
        return Err(Error::Parse(format!("unsupported format `{}`, expected `{FORMAT_TAG}`", raw.format)));
    }
    let alphabet = raw
        .alphabet
        .iter()
        .map(|s| {
            let mut cs = s.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Parse(format!("alphabet entry `{s}` is not a single character"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = MachineBuilder::new(raw.name.clone()).quantum_states(&raw.quantum_states).alphabet(&alphabet);
    let declared = raw.classical_states.as_ref();
    if let Some(states) = declared {
        for s in states {
            b.classical_state(s);
        }
    }
    let check = |name: &str| -> Result<()> {
        match declared {
            Some(states) if !states.iter().any(|s| s == name) => {
                Err(Error::Parse(format!("classical state `{name}` is not declared")))
            }
            _ => Ok(()),
        }
    };
    check(&raw.initial_classical)?;
    b.initial(&raw.initial_quantum, &raw.initial_classical);
    for s in &raw.accepting {
        check(s)?;
        b.accepting(s);
    }
    for s in &raw.rejecting {
        check(s)?;
        b.rejecting(s);
    }
    if let Some(s) = &raw.pass_state {
        check(s)?;
        b.pass_state(s);
    }
    for (k, v) in &raw.metadata {
        b.meta(k, v);
    }
    for a in &raw.actions {
        b.action(&a.name, parse_action(a, &raw.quantum_states)?);
    }
    for t in &raw.transitions {
        let symbol = Symbol::parse_token(&t.symbol)?;
        check(&t.state)?;
        let targets: Vec<(String, Move)> = match (&t.next, t.movement, &t.outcomes) {
            (Some(n), Some(m), None) => vec![(n.clone(), parse_move(m)?)],
            (None, None, Some(os)) => {
                os.iter().map(|o| Ok((o.next.clone(), parse_move(o.movement)?))).collect::<Result<_>>()?
            }
            _ => {
                return Err(Error::Parse(format!(
                    "transition ({}, {}) needs either `next` + `move` or `outcomes`",
                    t.state, t.symbol
                )))
            }
        };
        for (n, _) in &targets {
            check(n)?;
        }
        let refs: Vec<(&str, Move)> = targets.iter().map(|(n, m)| (n.as_str(), *m)).collect();
        b.on_outcomes(&t.state, symbol, &t.action, &refs);
    }
    b.build()
}

fn exact_rows(m: &ExactMatrix) -> Vec<Vec<String>> {
    m.rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect()
}

/// Serializes a machine. Floating-point entries use shortest round-trip
/// notation, so parsing the output reproduces the spec bit for bit.
/// Measurements given as explicit projector matrices cannot be written.
pub fn write_machine(spec: &MachineSpec) -> Result<String> {
    let q = spec.quantum_states();
    let s = spec.classical_states();
    let actions = spec
        .actions()
        .iter()
        .map(|a| {
            let mut raw = RawAction {
                name: a.name.clone(),
                kind: String::new(),
                field: None,
                matrix: None,
                re: None,
                im: None,
                plane: None,
                sqrt2_pi_multiple: None,
                outcomes: None,
            };
            match &a.action {
                Action::Unitary(Unitary::Exact(m)) => {
                    raw.kind = "unitary".into();
                    raw.field = Some("exact".into());
                    raw.matrix = Some(exact_rows(m));
                }
                Action::Unitary(Unitary::Complex(m)) => {
                    raw.kind = "unitary".into();
                    raw.field = Some("complex".into());
                    raw.re = Some(m.rows().iter().map(|r| r.iter().map(|z| format!("{:?}", z.re)).collect()).collect());
                    raw.im = Some(m.rows().iter().map(|r| r.iter().map(|z| format!("{:?}", z.im)).collect()).collect());
                }
                Action::Unitary(Unitary::Rotation { plane: (p, r), multiple }) => {
                    raw.kind = "rotation".into();
                    raw.plane = Some([q[*p].clone(), q[*r].clone()]);
                    raw.sqrt2_pi_multiple = Some(*multiple);
                }
                Action::Measurement(Measurement::Basis(parts)) => {
                    raw.kind = "measurement".into();
                    raw.outcomes = Some(parts.iter().map(|p| p.iter().map(|&i| q[i].clone()).collect()).collect());
                }
                Action::Measurement(Measurement::Projectors(_)) => {
                    return Err(Error::InvalidSpec(format!(
                        "action `{}` uses projector matrices, which the file format does not support",
                        a.name
                    )))
                }
            }
            Ok(raw)
        })
        .collect::<Result<Vec<_>>>()?;
    let transitions = spec
        .transitions()
        .iter()
        .map(|(&(state, symbol), t)| {
            let action = spec.actions()[t.action].name.clone();
            let single = !spec.actions()[t.action].action.is_measurement() && t.targets.len() == 1;
            RawTransition {
                state: s[state].clone(),
                symbol: symbol.token(),
                action,
                next: single.then(|| s[t.targets[0].next].clone()),
                movement: single.then(|| t.targets[0].movement.offset()),
                outcomes: (!single).then(|| {
                    t.targets.iter().map(|x| RawTarget { next: s[x.next].clone(), movement: x.movement.offset() }).collect()
                }),
            }
        })
        .collect();
    let raw = RawMachine {
        format: FORMAT_TAG.into(),
        name: spec.name().into(),
        quantum_states: q.to_vec(),
        classical_states: Some(s.to_vec()),
        alphabet: spec.alphabet().iter().map(char::to_string).collect(),
        initial_quantum: q[spec.initial_quantum()].clone(),
        initial_classical: s[spec.initial_classical()].clone(),
        accepting: spec.accepting().iter().map(|&i| s[i].clone()).collect(),
        rejecting: spec.rejecting().iter().map(|&i| s[i].clone()).collect(),
        pass_state: spec.pass_state().map(|i| s[i].clone()),
        metadata: spec.metadata().clone(),
        actions,
        transitions,
    };
    toml::to_string(&raw).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_machine_file(path: &Path) -> Result<MachineSpec> {
    parse_machine(&std::fs::read_to_string(path)?)
}

pub fn write_machine_file(spec: &MachineSpec, path: &Path) -> Result<()> {
    std::fs::write(path, write_machine(spec)?)?;
    Ok(())
}
