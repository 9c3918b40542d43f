//! Transducer data model, digit-expansion evaluation and graph-structural
//! analysis.
//!
//! A transducer here is complete, deterministic and subsequential: every
//! state has exactly one transition per input symbol, exactly one state is
//! initial, and every state carries a final output. The value `T(n)` of the
//! sequence at an integer vector `n ≥ 0` is the sum of the transition outputs
//! along the unique run over the q-ary joint expansion of `n` (least
//! significant symbol first, no leading zero symbol) plus the final output of
//! the state the run ends in.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{format_rat, parse_rat, Rat};

/// One input symbol: `d` digits, each in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputSymbol(pub Vec<u32>);

impl InputSymbol {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Radix-q rank of the symbol, used to index dense per-symbol tables.
    pub fn rank(&self, q: u32) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &d| acc * q as usize + d as usize)
    }

    pub fn from_rank(rank: usize, q: u32, d: usize) -> Self {
        let mut digits = vec![0u32; d];
        let mut r = rank;
        for i in (0..d).rev() {
            digits[i] = (r % q as usize) as u32;
            r /= q as usize;
        }
        InputSymbol(digits)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }
}

/// Complete deterministic subsequential transducer over the input alphabet
/// `{0, …, q-1}^d` with exact rational output labels.
///
/// States are dense indices `0..state_count`; `labels` keeps the textual
/// names from the source file (parsing renumbers states so that the initial
/// state is index 0). `finals` and `delta` may be partial so that
/// [`validate`] can report violations as data instead of failing earlier.
#[derive(Clone, Debug, PartialEq)]
pub struct Transducer {
    pub q: u32,
    pub d: usize,
    pub state_count: usize,
    pub initial: usize,
    pub labels: Vec<String>,
    pub finals: Vec<Option<Rat>>,
    pub delta: BTreeMap<(usize, InputSymbol), (usize, Rat)>,
}

/// A violation found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// No transition for `(state, symbol)`.
    Incomplete(usize, InputSymbol),
    /// Digit out of `[0, q)` or wrong dimension in a transition symbol.
    BadSymbol(usize, InputSymbol),
    /// Transition target out of range.
    BadTarget(usize, InputSymbol, usize),
    /// State without a final output.
    MissingFinal(usize),
    /// Initial state out of range.
    BadInitial(usize),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Incomplete(s, sym) => {
                write!(f, "incomplete: no transition at (state {s}, digits {:?})", sym.0)
            }
            Violation::BadSymbol(s, sym) => {
                write!(f, "bad input symbol {:?} at state {s}", sym.0)
            }
            Violation::BadTarget(s, sym, t) => {
                write!(f, "transition ({s}, {:?}) targets unknown state {t}", sym.0)
            }
            Violation::MissingFinal(s) => write!(f, "state {s} has no final output"),
            Violation::BadInitial(s) => write!(f, "initial state {s} out of range"),
        }
    }
}

impl Transducer {
    /// Builds a transducer from dense parts. `transitions[s][r]` is the
    /// `(target, output)` for state `s` and the symbol of rank `r`.
    pub fn from_dense(
        q: u32,
        d: usize,
        finals: Vec<Rat>,
        transitions: Vec<Vec<(usize, Rat)>>,
    ) -> Self {
        let state_count = finals.len();
        let mut delta = BTreeMap::new();
        for (s, row) in transitions.iter().enumerate() {
            assert_eq!(row.len(), (q as usize).pow(d as u32));
            for (r, (to, out)) in row.iter().enumerate() {
                delta.insert(
                    (s, InputSymbol::from_rank(r, q, d)),
                    (*to, out.clone()),
                );
            }
        }
        Transducer {
            q,
            d,
            state_count,
            initial: 0,
            labels: (0..state_count).map(|i| i.to_string()).collect(),
            finals: finals.into_iter().map(Some).collect(),
            delta,
        }
    }

    pub fn symbol_count(&self) -> usize {
        (self.q as usize).pow(self.d as u32)
    }

    pub fn symbols(&self) -> impl Iterator<Item = InputSymbol> + '_ {
        (0..self.symbol_count()).map(|r| InputSymbol::from_rank(r, self.q, self.d))
    }

    /// Transition lookup; panics if the transducer is invalid.
    pub fn step(&self, state: usize, sym: &InputSymbol) -> (usize, &Rat) {
        let (to, out) = self
            .delta
            .get(&(state, sym.clone()))
            .expect("transition missing; run validate first");
        (*to, out)
    }

    pub fn final_output(&self, state: usize) -> &Rat {
        self.finals[state]
            .as_ref()
            .expect("final output missing; run validate first")
    }

    /// True when every transition output and every final output is an
    /// integer.
    pub fn integer_outputs(&self) -> bool {
        self.delta.values().all(|(_, o)| o.denom().is_one())
            && self
                .finals
                .iter()
                .all(|f| f.as_ref().map_or(true, |o| o.denom().is_one()))
    }

    /// States reachable from the initial state, in BFS discovery order.
    pub fn accessible(&self) -> Vec<usize> {
        let mut seen = vec![false; self.state_count];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        if self.initial < self.state_count {
            seen[self.initial] = true;
            queue.push_back(self.initial);
        }
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for sym in self.symbols() {
                if let Some(&(t, _)) = self.delta.get(&(s, sym)) {
                    if t < self.state_count && !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        order
    }
}

/// Checks completeness, determinism (structural: one entry per key),
/// subsequentiality and digit ranges. An empty list means the transducer is
/// well formed.
pub fn validate(t: &Transducer) -> Vec<Violation> {
    let mut v = Vec::new();
    if t.initial >= t.state_count {
        v.push(Violation::BadInitial(t.initial));
    }
    for (s, f) in t.finals.iter().enumerate() {
        if f.is_none() {
            v.push(Violation::MissingFinal(s));
        }
    }
    for ((s, sym), (to, _)) in &t.delta {
        if sym.dim() != t.d || sym.0.iter().any(|&dg| dg >= t.q) {
            v.push(Violation::BadSymbol(*s, sym.clone()));
        }
        if *to >= t.state_count {
            v.push(Violation::BadTarget(*s, sym.clone(), *to));
        }
    }
    for s in 0..t.state_count {
        for sym in t.symbols() {
            if !t.delta.contains_key(&(s, sym.clone())) {
                v.push(Violation::Incomplete(s, sym));
            }
        }
    }
    v
}

/// Joint q-ary digit expansion of a non-negative integer vector, least
/// significant symbol first and without a leading zero symbol. The zero
/// vector expands to the empty sequence.
pub fn digits(n: &[i64], q: u32) -> Vec<InputSymbol> {
    assert!(n.iter().all(|&x| x >= 0), "digit expansion needs n >= 0");
    let mut rem: Vec<i64> = n.to_vec();
    let mut out = Vec::new();
    while rem.iter().any(|&x| x > 0) {
        let sym = InputSymbol(rem.iter().map(|&x| (x % q as i64) as u32).collect());
        for x in rem.iter_mut() {
            *x /= q as i64;
        }
        out.push(sym);
    }
    out
}

/// The sequence value `T(n)`: output sum along the unique run plus the final
/// output of the last state. `evaluate(t, 0)` is the initial state's final
/// output.
pub fn evaluate(t: &Transducer, n: &[i64]) -> Rat {
    assert_eq!(n.len(), t.d);
    let mut state = t.initial;
    let mut sum = Rat::zero();
    for sym in digits(n, t.q) {
        let (next, out) = t.step(state, &sym);
        sum += out.clone();
        state = next;
    }
    sum + t.final_output(state).clone()
}

/// Structural analysis of the underlying digraph restricted to the accessible
/// states.
#[derive(Clone, Debug)]
pub struct StructureReport {
    /// Accessible states in BFS order.
    pub accessible: Vec<usize>,
    /// Strongly connected components of the accessible part.
    pub scc_list: Vec<Vec<usize>>,
    /// Indices into `scc_list` of the final components (condensation leaves).
    pub final_components: Vec<usize>,
    /// Period `p_j` of each final component, parallel to `final_components`.
    pub component_periods: Vec<u64>,
    /// Final period `p = lcm(p_j)`.
    pub final_period: u64,
    pub finally_connected: bool,
    pub finally_aperiodic: bool,
    /// A synchronizing input word over the accessible states, if one exists.
    pub reset_sequence: Option<Vec<InputSymbol>>,
    /// `d = 1`, reset word exists, and all outputs are integers. Combined
    /// with `e_T ∉ ℤ` (known only after the spectral analysis) this yields
    /// `nondiff_applicable`.
    pub nondiff_structural: bool,
    /// Filled by the spectral analysis once `e_T` is known.
    pub nondiff_applicable: Option<bool>,
}

impl StructureReport {
    /// States of the final component with index `j` (into `final_components`).
    pub fn final_component_states(&self, j: usize) -> &[usize] {
        &self.scc_list[self.final_components[j]]
    }
}

/// Tarjan SCC over the accessible subgraph. Components are returned in
/// reverse topological order of the condensation.
fn tarjan(t: &Transducer, accessible: &[usize]) -> Vec<Vec<usize>> {
    struct St<'a> {
        t: &'a Transducer,
        index: usize,
        idx: HashMap<usize, usize>,
        low: HashMap<usize, usize>,
        stack: Vec<usize>,
        on_stack: HashMap<usize, bool>,
        comps: Vec<Vec<usize>>,
    }
    fn strongconnect(v: usize, st: &mut St<'_>) {
        st.idx.insert(v, st.index);
        st.low.insert(v, st.index);
        st.index += 1;
        st.stack.push(v);
        st.on_stack.insert(v, true);
        for sym in st.t.symbols() {
            let (w, _) = st.t.step(v, &sym);
            if !st.idx.contains_key(&w) {
                strongconnect(w, st);
                let lw = st.low[&w];
                let lv = st.low[&v];
                st.low.insert(v, lv.min(lw));
            } else if *st.on_stack.get(&w).unwrap_or(&false) {
                let lv = st.low[&v];
                st.low.insert(v, lv.min(st.idx[&w]));
            }
        }
        if st.low[&v] == st.idx[&v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().unwrap();
                st.on_stack.insert(w, false);
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            st.comps.push(comp);
        }
    }
    let mut st = St {
        t,
        index: 0,
        idx: HashMap::new(),
        low: HashMap::new(),
        stack: Vec::new(),
        on_stack: HashMap::new(),
        comps: Vec::new(),
    };
    for &v in accessible {
        if !st.idx.contains_key(&v) {
            strongconnect(v, &mut st);
        }
    }
    st.comps
}

/// Period of a strongly connected component: gcd of all cycle lengths,
/// computed as the gcd of `depth(u) + 1 - depth(v)` over edges `u -> v`
/// inside the component (BFS depths from an arbitrary root).
fn component_period(t: &Transducer, comp: &[usize]) -> u64 {
    let in_comp: std::collections::HashSet<usize> = comp.iter().copied().collect();
    let root = comp[0];
    let mut depth: HashMap<usize, i64> = HashMap::new();
    depth.insert(root, 0);
    let mut queue = VecDeque::from([root]);
    let mut g: i64 = 0;
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        for sym in t.symbols() {
            let (v, _) = t.step(u, &sym);
            if !in_comp.contains(&v) {
                continue;
            }
            if !depth.contains_key(&v) {
                depth.insert(v, depth[&u] + 1);
                queue.push_back(v);
            }
            edges.push((u, v));
        }
    }
    for (u, v) in edges {
        g = g.gcd(&(depth[&u] + 1 - depth[&v]));
    }
    g.unsigned_abs().max(1)
}

/// Computes the full structural report. Requires `validate(t)` to be empty.
pub fn structure(t: &Transducer) -> StructureReport {
    let accessible = t.accessible();
    let scc_list = tarjan(t, &accessible);
    let comp_of: HashMap<usize, usize> = scc_list
        .iter()
        .enumerate()
        .flat_map(|(ci, comp)| comp.iter().map(move |&s| (s, ci)))
        .collect();

    let mut is_final = vec![true; scc_list.len()];
    for &s in &accessible {
        for sym in t.symbols() {
            let (to, _) = t.step(s, &sym);
            if comp_of[&s] != comp_of[&to] {
                is_final[comp_of[&s]] = false;
            }
        }
    }
    let final_components: Vec<usize> = (0..scc_list.len()).filter(|&c| is_final[c]).collect();
    let component_periods: Vec<u64> = final_components
        .iter()
        .map(|&c| component_period(t, &scc_list[c]))
        .collect();
    let final_period = component_periods.iter().fold(1u64, |a, &b| a.lcm(&b));

    let reset_sequence = find_reset(t);
    let nondiff_structural = t.d == 1 && reset_sequence.is_some() && t.integer_outputs();

    StructureReport {
        accessible,
        scc_list,
        final_components: final_components.clone(),
        component_periods,
        final_period,
        finally_connected: final_components.len() == 1,
        finally_aperiodic: final_period == 1,
        reset_sequence,
        nondiff_structural,
        nondiff_applicable: None,
    }
}

/// Searches for a synchronizing word over the accessible states by iterated
/// pairwise merging on the pair automaton. The returned word is verified by
/// replay from every accessible state; it is not required to be shortest.
pub fn find_reset(t: &Transducer) -> Option<Vec<InputSymbol>> {
    let accessible = t.accessible();
    if accessible.len() <= 1 {
        return Some(Vec::new());
    }
    let mut current: Vec<usize> = accessible.clone();
    let mut word: Vec<InputSymbol> = Vec::new();

    while current.len() > 1 {
        let (a, b) = (current[0], current[1]);
        let merge = merge_pair(t, a, b)?;
        for sym in &merge {
            for s in current.iter_mut() {
                *s = t.step(*s, sym).0;
            }
        }
        word.extend(merge);
        current.sort_unstable();
        current.dedup();
    }

    // exact replay check from every accessible state
    let mut target = None;
    for &s in &accessible {
        let mut cur = s;
        for sym in &word {
            cur = t.step(cur, sym).0;
        }
        match target {
            None => target = Some(cur),
            Some(x) if x == cur => {}
            Some(_) => return None,
        }
    }
    Some(word)
}

/// BFS in the pair automaton for a word sending both states to one state.
fn merge_pair(t: &Transducer, a: usize, b: usize) -> Option<Vec<InputSymbol>> {
    if a == b {
        return Some(Vec::new());
    }
    let key = |x: usize, y: usize| if x < y { (x, y) } else { (y, x) };
    let start = key(a, b);
    let mut prev: HashMap<(usize, usize), ((usize, usize), InputSymbol)> = HashMap::new();
    let mut seen = std::collections::HashSet::new();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some((x, y)) = queue.pop_front() {
        for sym in t.symbols() {
            let nx = t.step(x, &sym).0;
            let ny = t.step(y, &sym).0;
            let nk = key(nx, ny);
            if nx == ny {
                // reconstruct: path start -> (x, y), then sym
                let mut path = vec![sym];
                let mut cur = (x, y);
                while cur != start {
                    let (p, s) = prev[&cur].clone();
                    path.push(s);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            if seen.insert(nk) {
                prev.insert(nk, ((x, y), sym));
                queue.push_back(nk);
            }
        }
    }
    None
}

/// Errors from parsing the transducer text format.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("line {0}: duplicate transition for (state {1}, digits {2:?})")]
    DuplicateTransition(usize, String, Vec<u32>),
    #[error("line {0}: duplicate final output for state {1}")]
    DuplicateFinal(usize, String),
    #[error("missing `{0}` declaration")]
    MissingHeader(&'static str),
}

/// Parses the line-oriented transducer format:
///
/// ```text
/// transducer v1
/// q 2
/// d 1
/// states 3
/// initial 0
/// final 0 0
/// trans 0 1 -> 1 0
/// ```
///
/// `#` starts a comment. State names are opaque strings; internally states
/// are renumbered so that the initial state gets index 0.
pub fn parse(text: &str) -> Result<Transducer, ParseError> {
    let mut q: Option<u32> = None;
    let mut d: Option<usize> = None;
    let mut states: Option<usize> = None;
    let mut initial: Option<String> = None;
    let mut finals: Vec<(usize, String, Rat)> = Vec::new();
    let mut trans: Vec<(usize, String, Vec<u32>, String, Rat)> = Vec::new();
    let mut seen_header = false;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let head = it.next().unwrap();
        let rest: Vec<&str> = it.collect();
        match head {
            "transducer" => {
                if rest != ["v1"] {
                    return Err(ParseError::Syntax(lineno, "expected `transducer v1`".into()));
                }
                seen_header = true;
            }
            "q" => {
                q = Some(parse_field(lineno, &rest, "q")?);
                if q.unwrap() < 2 {
                    return Err(ParseError::Syntax(lineno, "q must be >= 2".into()));
                }
            }
            "d" => {
                d = Some(parse_field(lineno, &rest, "d")?);
                if d.unwrap() < 1 {
                    return Err(ParseError::Syntax(lineno, "d must be >= 1".into()));
                }
            }
            "states" => states = Some(parse_field(lineno, &rest, "states")?),
            "initial" => {
                if rest.len() != 1 {
                    return Err(ParseError::Syntax(lineno, "expected `initial <state>`".into()));
                }
                initial = Some(rest[0].to_string());
            }
            "final" => {
                if rest.len() != 2 {
                    return Err(ParseError::Syntax(
                        lineno,
                        "expected `final <state> <rational>`".into(),
                    ));
                }
                let out = parse_rat(rest[1]).ok_or_else(|| {
                    ParseError::Syntax(lineno, format!("bad rational `{}`", rest[1]))
                })?;
                finals.push((lineno, rest[0].to_string(), out));
            }
            "trans" => {
                // trans <from> <digits> -> <to> <output>
                if rest.len() != 5 || rest[2] != "->" {
                    return Err(ParseError::Syntax(
                        lineno,
                        "expected `trans <from> <digits> -> <to> <output>`".into(),
                    ));
                }
                let digits: Result<Vec<u32>, _> =
                    rest[1].split(',').map(|s| s.trim().parse::<u32>()).collect();
                let digits = digits.map_err(|_| {
                    ParseError::Syntax(lineno, format!("bad digits `{}`", rest[1]))
                })?;
                let out = parse_rat(rest[4]).ok_or_else(|| {
                    ParseError::Syntax(lineno, format!("bad rational `{}`", rest[4]))
                })?;
                trans.push((lineno, rest[0].to_string(), digits, rest[3].to_string(), out));
            }
            other => {
                return Err(ParseError::Syntax(lineno, format!("unknown directive `{other}`")));
            }
        }
    }

    if !seen_header {
        return Err(ParseError::MissingHeader("transducer v1"));
    }
    let q = q.ok_or(ParseError::MissingHeader("q"))?;
    let d = d.ok_or(ParseError::MissingHeader("d"))?;
    let state_count = states.ok_or(ParseError::MissingHeader("states"))?;
    let initial = initial.ok_or(ParseError::MissingHeader("initial"))?;

    // Collect labels: initial first, then first appearance order.
    let mut labels: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, usize> = HashMap::new();
    let intern = |name: &str, labels: &mut Vec<String>, index_of: &mut HashMap<String, usize>| {
        *index_of.entry(name.to_string()).or_insert_with(|| {
            labels.push(name.to_string());
            labels.len() - 1
        })
    };
    intern(&initial, &mut labels, &mut index_of);
    for (_, s, r) in &finals {
        let _ = r;
        intern(s, &mut labels, &mut index_of);
    }
    for (_, from, _, to, _) in &trans {
        intern(from, &mut labels, &mut index_of);
        intern(to, &mut labels, &mut index_of);
    }
    if labels.len() > state_count {
        return Err(ParseError::Syntax(
            0,
            format!("{} states declared but {} state names used", state_count, labels.len()),
        ));
    }
    while labels.len() < state_count {
        // declared but unreferenced states keep synthetic names
        let name = format!("_unnamed_{}", labels.len());
        intern(&name, &mut labels, &mut index_of);
    }

    let mut final_vec: Vec<Option<Rat>> = vec![None; state_count];
    for (lineno, s, out) in finals {
        let idx = index_of[&s];
        if final_vec[idx].is_some() {
            return Err(ParseError::DuplicateFinal(lineno, s));
        }
        final_vec[idx] = Some(out);
    }
    let mut delta = BTreeMap::new();
    for (lineno, from, digits, to, out) in trans {
        let key = (index_of[&from], InputSymbol(digits.clone()));
        if delta.contains_key(&key) {
            return Err(ParseError::DuplicateTransition(lineno, from, digits));
        }
        delta.insert(key, (index_of[&to], out));
    }

    Ok(Transducer {
        q,
        d,
        state_count,
        initial: 0,
        labels,
        finals: final_vec,
        delta,
    })
}

/// Canonical serialization; `parse(serialize(t)) == t` for transducers whose
/// initial state is index 0 (which `parse` guarantees).
pub fn serialize(t: &Transducer) -> String {
    let mut s = String::new();
    s.push_str("transducer v1\n");
    let _ = writeln!(s, "q {}", t.q);
    let _ = writeln!(s, "d {}", t.d);
    let _ = writeln!(s, "states {}", t.state_count);
    let _ = writeln!(s, "initial {}", t.labels[t.initial]);
    for (i, f) in t.finals.iter().enumerate() {
        if let Some(out) = f {
            let _ = writeln!(s, "final {} {}", t.labels[i], format_rat(out));
        }
    }
    for ((from, sym), (to, out)) in &t.delta {
        let digits = sym
            .0
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(
            s,
            "trans {} {} -> {} {}",
            t.labels[*from],
            digits,
            t.labels[*to],
            format_rat(out)
        );
    }
    s
}

fn parse_field<T: std::str::FromStr>(
    lineno: usize,
    rest: &[&str],
    name: &str,
) -> Result<T, ParseError> {
    if rest.len() != 1 {
        return Err(ParseError::Syntax(lineno, format!("expected `{name} <value>`")));
    }
    rest[0]
        .parse::<T>()
        .map_err(|_| ParseError::Syntax(lineno, format!("bad value for `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    #[test]
    fn digits_examples() {
        // base-2 expansion of 11, least significant first
        let d = digits(&[11], 2);
        let bits: Vec<u32> = d.iter().map(|s| s.0[0]).collect();
        assert_eq!(bits, vec![1, 1, 0, 1]);
        assert!(digits(&[0], 2).is_empty());
        let joint = digits(&[3, 5], 2);
        let expect = vec![
            InputSymbol(vec![1, 1]),
            InputSymbol(vec![1, 0]),
            InputSymbol(vec![0, 1]),
        ];
        assert_eq!(joint, expect);
    }

    #[test]
    fn validate_reports_missing_transition() {
        let mut t = fixtures::naf();
        assert!(validate(&t).is_empty());
        t.delta.remove(&(0, InputSymbol(vec![1])));
        let v = validate(&t);
        assert_eq!(v, vec![Violation::Incomplete(0, InputSymbol(vec![1]))]);
    }

    #[test]
    fn validate_accepts_trivial_loop() {
        let t = Transducer::from_dense(2, 1, vec![rat(0)], vec![vec![(0, rat(0)), (0, rat(0))]]);
        assert!(validate(&t).is_empty());
    }

    #[test]
    fn evaluate_fixture_values() {
        let naf = fixtures::naf();
        assert_eq!(evaluate(&naf, &[3]), rat(2));
        assert_eq!(evaluate(&naf, &[0]), rat(0));

        let sf = fixtures::signflip();
        // T(n) = (-1)^n
        for n in 0..64i64 {
            let expect = if n % 2 == 0 { rat(1) } else { rat(-1) };
            assert_eq!(evaluate(&sf, &[n]), expect, "n = {n}");
        }

        let s2 = fixtures::sumdigits(2);
        assert_eq!(evaluate(&s2, &[11]), rat(3));
    }

    #[test]
    fn structure_of_fixtures() {
        let six = fixtures::sixperiodic();
        let rep = structure(&six);
        assert_eq!(rep.final_components.len(), 2);
        let mut periods = rep.component_periods.clone();
        periods.sort_unstable();
        assert_eq!(periods, vec![2, 3]);
        assert_eq!(rep.final_period, 6);
        assert!(!rep.finally_connected);
        assert!(rep.reset_sequence.is_none());

        let s2 = fixtures::sumdigits(2);
        let rep = structure(&s2);
        assert_eq!(rep.final_components.len(), 1);
        assert_eq!(rep.final_period, 1);

        let sf = fixtures::signflip();
        let rep = structure(&sf);
        assert_eq!(rep.final_components.len(), 1);
        assert_eq!(rep.final_period, 1);
        assert_eq!(rep.final_component_states(0).len(), 1);
    }

    #[test]
    fn reset_word_for_signflip() {
        let sf = fixtures::signflip();
        let word = find_reset(&sf).expect("signflip synchronizes");
        // both states reach the absorbing state on any single digit
        assert!(!word.is_empty());
        let mut ends = std::collections::HashSet::new();
        for s in 0..sf.state_count {
            let mut cur = s;
            for sym in &word {
                cur = sf.step(cur, sym).0;
            }
            ends.insert(cur);
        }
        assert_eq!(ends.len(), 1);
    }

    #[test]
    fn no_reset_without_final_connectivity() {
        // two disjoint absorbing loops
        let t = Transducer::from_dense(
            2,
            1,
            vec![rat(0), rat(0), rat(0)],
            vec![
                vec![(1, rat(0)), (2, rat(0))],
                vec![(1, rat(0)), (1, rat(0))],
                vec![(2, rat(0)), (2, rat(0))],
            ],
        );
        assert!(find_reset(&t).is_none());
        let rep = structure(&t);
        assert!(!rep.finally_connected);
        assert!(rep.reset_sequence.is_none());
    }

    #[test]
    fn format_roundtrip_fixtures() {
        for text in [
            fixtures::NAF_FST,
            fixtures::SIGNFLIP_FST,
            fixtures::SIXPERIODIC_FST,
            fixtures::SUMDIGITS_Q2_FST,
        ] {
            let t = parse(text).unwrap();
            let t2 = parse(&serialize(&t)).unwrap();
            assert_eq!(t, t2);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("transducer v1\nq 2\nd 1\nstates 1\ninitial 0\nfinal 0 0\nbogus 1").is_err());
        assert!(parse("q 2").is_err());
        let dup = "transducer v1\nq 2\nd 1\nstates 1\ninitial 0\nfinal 0 0\n\
                   trans 0 0 -> 0 0\ntrans 0 0 -> 0 1\ntrans 0 1 -> 0 1";
        assert!(matches!(parse(dup), Err(ParseError::DuplicateTransition(..))));
    }
}
