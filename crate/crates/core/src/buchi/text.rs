//! Line-based text format for automata.
//!
//! ```text
//! props: a b c
//! init: q1
//! accepting: q3
//! sink: q5          (optional; completion sink)
//! q1 ; {a,b} ; q2
//! ```
//!
//! Transitions absorbed by the sink are implied and not listed.

use super::BuchiAutomaton;
use crate::sym::{Alphabet, MAX_PROPS};
use std::fmt::Write as _;

pub fn automaton_to_text(b: &BuchiAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "props: {}", b.alphabet().names().join(" ")).unwrap();
    writeln!(out, "init: {}", b.state_name(b.init())).unwrap();
    let acc: Vec<&str> = b
        .accepting_states()
        .map(|q| b.state_name(q))
        .collect();
    writeln!(out, "accepting: {}", acc.join(" ")).unwrap();
    if let Some(s) = b.sink() {
        writeln!(out, "sink: {}", b.state_name(s)).unwrap();
    }
    for q in 0..b.n_states() as u32 {
        for (dst, set) in b.edges_of(q) {
            for sym in set.iter() {
                writeln!(
                    out,
                    "{} ; {} ; {}",
                    b.state_name(q),
                    b.alphabet().format_symbol(sym),
                    b.state_name(*dst)
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn automaton_from_text(text: &str) -> Result<BuchiAutomaton, String> {
    let mut props: Option<Vec<String>> = None;
    let mut init: Option<String> = None;
    let mut accepting: Vec<String> = Vec::new();
    let mut sink: Option<String> = None;
    let mut transitions: Vec<(String, String, String)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fail = |msg: &str| format!("line {}: {msg}", lineno + 1);
        if let Some(rest) = line.strip_prefix("props:") {
            props = Some(rest.split_whitespace().map(|s| s.to_string()).collect());
        } else if let Some(rest) = line.strip_prefix("init:") {
            init = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("accepting:") {
            accepting.extend(rest.split_whitespace().map(|s| s.to_string()));
        } else if let Some(rest) = line.strip_prefix("sink:") {
            sink = Some(rest.trim().to_string());
        } else {
            let parts: Vec<&str> = line.split(';').map(|p| p.trim()).collect();
            if parts.len() != 3 {
                return Err(fail("expected `src ; {symbols} ; dst`"));
            }
            transitions.push((
                parts[0].to_string(),
                parts[1].to_string(),
                parts[2].to_string(),
            ));
        }
    }

    let props = props.ok_or("missing `props:` header")?;
    let init = init.ok_or("missing `init:` header")?;
    let alphabet = Alphabet::new(props, MAX_PROPS)?;

    // States in order of first mention: init, then transition endpoints.
    let mut names: Vec<String> = vec![init.clone()];
    let note = |n: &str, names: &mut Vec<String>| {
        if !names.iter().any(|x| x == n) {
            names.push(n.to_string());
        }
    };
    for (src, _, dst) in &transitions {
        note(src, &mut names);
        note(dst, &mut names);
    }
    for a in &accepting {
        note(a, &mut names);
    }
    if let Some(s) = &sink {
        note(s, &mut names);
    }

    let mut b = BuchiAutomaton::new(alphabet, names, 0);
    for a in &accepting {
        let q = b.state_named(a).expect("registered above");
        b.set_accepting(q, true);
    }
    for (src, symtext, dst) in &transitions {
        let sym = b.alphabet().parse_symbol(symtext)?;
        let s = b.state_named(src).expect("registered above");
        let d = b.state_named(dst).expect("registered above");
        b.add_transition(s, sym, d);
    }
    if let Some(s) = sink {
        let q = b.state_named(&s).expect("registered above");
        b.set_sink(q);
    }
    Ok(b)
}

impl BuchiAutomaton {
    pub(crate) fn set_sink(&mut self, q: u32) {
        self.sink = Some(q);
    }
}
