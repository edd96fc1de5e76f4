//! The JSON automaton file format.
//!
//! ```json
//! {
//!   "states": ["p", "q"],
//!   "alphabet": ["a"],
//!   "initial": {"p": "1"},
//!   "final": {"q": "-1/2"},
//!   "transitions": [{"from": "p", "label": "a", "to": "q", "weight": "2"}]
//! }
//! ```
//!
//! Omitted weights are zero. Weights are strings `p` or `p/q`.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::rational::format_rational;
use crate::algebra::parse_rational;
use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionJson {
    from: String,
    label: String,
    to: String,
    weight: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonJson {
    states: Vec<String>,
    alphabet: Vec<String>,
    #[serde(default)]
    initial: BTreeMap<String, String>,
    #[serde(rename = "final", default)]
    final_: BTreeMap<String, String>,
    #[serde(default)]
    transitions: Vec<TransitionJson>,
}

fn err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Format {
        location: location.into(),
        message: message.into(),
    }
}

fn weight(location: &str, text: &str) -> Result<crate::algebra::Rational> {
    parse_rational(text).map_err(|_| err(location, format!("invalid rational `{text}`")))
}

/// Parses an automaton. Syntax errors report `line:column`; semantic errors
/// report the JSON path of the offending entry.
pub fn parse_automaton(text: &str) -> Result<WeightedAutomaton> {
    let raw: AutomatonJson = serde_json::from_str(text).map_err(|e| {
        err(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string().split(" at line").next().unwrap_or_default().to_string(),
        )
    })?;
    let mut a = WeightedAutomaton::new(raw.states.clone(), raw.alphabet.clone()).map_err(|e| err("$", e.to_string()))?;
    let state = |loc: &str, name: &str| a.state_index(name).map_err(|_| err(loc, format!("unknown state `{name}`")));

    let mut init = Vec::new();
    for (name, w) in &raw.initial {
        let loc = format!("initial.{name}");
        init.push((state(&loc, name)?, weight(&loc, w)?));
    }
    let mut fin = Vec::new();
    for (name, w) in &raw.final_ {
        let loc = format!("final.{name}");
        fin.push((state(&loc, name)?, weight(&loc, w)?));
    }
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    for (k, t) in raw.transitions.iter().enumerate() {
        let loc = format!("transitions[{k}]");
        let from = state(&format!("{loc}.from"), &t.from)?;
        let to = state(&format!("{loc}.to"), &t.to)?;
        let letter = a
            .symbol_index(&t.label)
            .map_err(|_| err(format!("{loc}.label"), format!("unknown symbol `{}`", t.label)))?;
        if !seen.insert((from, letter, to)) {
            return Err(err(loc, format!("duplicate transition {} -{}-> {}", t.from, t.label, t.to)));
        }
        edges.push((from, letter, to, weight(&format!("{loc}.weight"), &t.weight)?));
    }

    for (q, w) in init {
        a.set_initial(q, w)?;
    }
    for (q, w) in fin {
        a.set_final(q, w)?;
    }
    for (from, letter, to, w) in edges {
        a.set_transition(from, letter, to, w)?;
    }
    Ok(a)
}

fn to_json(a: &WeightedAutomaton) -> AutomatonJson {
    let names = a.states();
    let weights = |v: &crate::algebra::RatVector| {
        v.iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(q, w)| (names[q].clone(), format_rational(w)))
            .collect()
    };
    let mut transitions = Vec::new();
    for (letter, m) in a.matrices().iter().enumerate() {
        for (from, to, w) in m.iter() {
            transitions.push(TransitionJson {
                from: names[from].clone(),
                label: a.alphabet()[letter].clone(),
                to: names[to].clone(),
                weight: format_rational(w),
            });
        }
    }
    AutomatonJson {
        states: names.to_vec(),
        alphabet: a.alphabet().to_vec(),
        initial: weights(a.initial()),
        final_: weights(a.final_weights()),
        transitions,
    }
}

/// The automaton as a JSON value; states and symbols keep their order.
pub fn automaton_to_value(a: &WeightedAutomaton) -> serde_json::Value {
    serde_json::to_value(to_json(a)).expect("automaton is serializable")
}

pub fn serialize_automaton(a: &WeightedAutomaton) -> String {
    serde_json::to_string_pretty(&to_json(a)).expect("automaton is serializable")
}
