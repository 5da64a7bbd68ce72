//! Service identifiers, set representations and the per-automaton alphabet.
//!
//! Services are registered once per scenario and addressed globally by bit
//! position in a `u64` mask. Each specification automaton works over its own
//! ordered proposition list (a subset of the global services); symbols of
//! that automaton are `u32` masks over the local bit order, and sets of
//! symbols are plain bitsets over all `2^n` local symbols. Alphabets are
//! enumerated explicitly, so the proposition count per automaton is capped.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Hard upper bound on propositions per automaton; `2^16` symbols is the
/// largest alphabet the explicit representation is allowed to enumerate.
pub const MAX_PROPS: usize = 16;

/// Default per-automaton proposition cap; scenarios may raise it up to
/// [`MAX_PROPS`].
pub const DEFAULT_ALPHABET_CAP: usize = 10;

/// Global service mask (bit = index into [`ServiceTable`]).
pub type ServiceSet = u64;

/// Scenario-wide registry of services with their owning agent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceTable {
    names: Vec<String>,
    owner: Vec<usize>,
}

impl ServiceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a service for `owner`; errors on duplicates across agents.
    pub fn register(&mut self, name: &str, owner: usize) -> Result<u32, String> {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            if self.owner[i] == owner {
                return Ok(i as u32);
            }
            return Err(format!(
                "alphabet overlap: service `{name}` declared by two agents"
            ));
        }
        if self.names.len() >= 64 {
            return Err("too many services (global limit 64)".into());
        }
        self.names.push(name.to_string());
        self.owner.push(owner);
        Ok((self.names.len() - 1) as u32)
    }

    pub fn id(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn owner(&self, id: u32) -> usize {
        self.owner[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Mask of all services owned by `agent`.
    pub fn owned_mask(&self, agent: usize) -> ServiceSet {
        let mut m = 0;
        for (i, &o) in self.owner.iter().enumerate() {
            if o == agent {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn mask_names(&self, mask: ServiceSet) -> Vec<&str> {
        (0..self.names.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.names[i].as_str())
            .collect()
    }

    pub fn format_mask(&self, mask: ServiceSet) -> String {
        format!("{{{}}}", self.mask_names(mask).join(","))
    }
}

/// Ordered proposition list of one automaton.
///
/// Local symbol bit `i` corresponds to proposition `names[i]`; when the
/// alphabet is tied to a service table, `global_bits[i]` holds the global
/// bit position of that proposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    global_bits: Vec<u32>,
}

impl Alphabet {
    pub fn new(names: Vec<String>, cap: usize) -> Result<Self, String> {
        let cap = cap.min(MAX_PROPS);
        if names.len() > cap {
            return Err(format!(
                "alphabet cap exceeded: {} propositions, cap {}",
                names.len(),
                cap
            ));
        }
        let mut seen = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if seen.insert(n.clone(), i).is_some() {
                return Err(format!("duplicate proposition `{n}`"));
            }
        }
        Ok(Self {
            global_bits: (0..names.len() as u32).collect(),
            names,
        })
    }

    pub fn with_global_bits(
        names: Vec<String>,
        global_bits: Vec<u32>,
        cap: usize,
    ) -> Result<Self, String> {
        let mut a = Self::new(names, cap)?;
        assert_eq!(a.names.len(), global_bits.len());
        a.global_bits = global_bits;
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn n_symbols(&self) -> usize {
        1usize << self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bit_of(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    /// Global service mask covered by this alphabet.
    pub fn global_mask(&self) -> ServiceSet {
        self.global_bits.iter().map(|&b| 1u64 << b).sum()
    }

    /// Restricts a global service mask to a local symbol.
    pub fn local_of_global(&self, global: ServiceSet) -> u32 {
        let mut sym = 0u32;
        for (i, &b) in self.global_bits.iter().enumerate() {
            sym |= (((global >> b) & 1) as u32) << i;
        }
        sym
    }

    /// Expands a local symbol back to a global service mask.
    pub fn global_of_local(&self, sym: u32) -> ServiceSet {
        let mut m = 0u64;
        for (i, &b) in self.global_bits.iter().enumerate() {
            if sym & (1 << i) != 0 {
                m |= 1 << b;
            }
        }
        m
    }

    pub fn format_symbol(&self, sym: u32) -> String {
        let names: Vec<_> = (0..self.names.len())
            .filter(|i| sym & (1 << i) != 0)
            .map(|i| self.names[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parses `{a,b}` into a local symbol.
    pub fn parse_symbol(&self, text: &str) -> Result<u32, String> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| format!("symbol `{text}` is not brace-delimited"))?;
        let mut sym = 0u32;
        for part in inner.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let bit = self
                .bit_of(part)
                .ok_or_else(|| format!("unknown proposition `{part}`"))?;
            sym |= 1 << bit;
        }
        Ok(sym)
    }
}

/// Set of symbols of one alphabet, stored as a bitset over all `2^n`
/// symbol masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSet {
    words: Vec<u64>,
    n_symbols: usize,
}

impl SymbolSet {
    pub fn empty(n_props: usize) -> Self {
        let n_symbols = 1usize << n_props;
        Self {
            words: vec![0; n_symbols.div_ceil(64)],
            n_symbols,
        }
    }

    pub fn full(n_props: usize) -> Self {
        let mut s = Self::empty(n_props);
        for i in 0..s.n_symbols {
            s.insert(i as u32);
        }
        s
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn insert(&mut self, sym: u32) {
        self.words[(sym / 64) as usize] |= 1u64 << (sym % 64);
    }

    pub fn remove(&mut self, sym: u32) {
        self.words[(sym / 64) as usize] &= !(1u64 << (sym % 64));
    }

    pub fn contains(&self, sym: u32) -> bool {
        self.words[(sym / 64) as usize] & (1u64 << (sym % 64)) != 0
    }

    pub fn union_with(&mut self, other: &SymbolSet) {
        debug_assert_eq!(self.n_symbols, other.n_symbols);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count() == self.n_symbols
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n_symbols as u32).filter(move |&s| self.contains(s))
    }
}

/// Iterates over all submasks of `mask` (including 0 and `mask` itself).
pub fn submasks(mask: u64) -> SubmaskIter {
    SubmaskIter {
        mask,
        current: 0,
        done: false,
    }
}

pub struct SubmaskIter {
    mask: u64,
    current: u64,
    done: bool,
}

impl Iterator for SubmaskIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.done {
            return None;
        }
        let out = self.current;
        if self.current == self.mask {
            self.done = true;
        } else {
            self.current = (self.current.wrapping_sub(self.mask)) & self.mask;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submask_enumeration_covers_all_subsets() {
        let mask = 0b1011u64;
        let subs: Vec<_> = submasks(mask).collect();
        assert_eq!(subs.len(), 8);
        for s in &subs {
            assert_eq!(s & !mask, 0);
        }
        assert!(subs.contains(&0));
        assert!(subs.contains(&mask));
    }

    #[test]
    fn alphabet_local_global_roundtrip() {
        let a = Alphabet::with_global_bits(
            vec!["x".into(), "y".into()],
            vec![3, 7],
            DEFAULT_ALPHABET_CAP,
        )
        .unwrap();
        let g = a.global_of_local(0b11);
        assert_eq!(g, (1 << 3) | (1 << 7));
        assert_eq!(a.local_of_global(g | (1 << 5)), 0b11);
    }

    #[test]
    fn alphabet_cap_enforced() {
        let names: Vec<String> = (0..11).map(|i| format!("p{i}")).collect();
        assert!(Alphabet::new(names, DEFAULT_ALPHABET_CAP).is_err());
    }

    #[test]
    fn symbol_set_basics() {
        let mut s = SymbolSet::empty(3);
        s.insert(0b101);
        assert!(s.contains(0b101));
        assert!(!s.contains(0b001));
        assert_eq!(s.count(), 1);
        assert!(!SymbolSet::full(3).is_empty());
        assert!(SymbolSet::full(3).is_full());
    }

    #[test]
    fn service_table_rejects_overlap() {
        let mut t = ServiceTable::new();
        t.register("a", 0).unwrap();
        assert!(t.register("a", 1).is_err());
        assert_eq!(t.register("a", 0).unwrap(), 0);
    }
}
