//! Compiles recursion systems
//!
//! ```text
//! a(q^κ·n + λ) = a(q^{κ_λ}·n + r_λ) + t_λ      for 0 ≤ λ < q^κ·1
//! ```
//!
//! (componentwise for integer vectors `n`, valid whenever both arguments are
//! non-negative) together with a set of initial values into an equivalent
//! complete deterministic subsequential transducer, deciding well-posedness
//! along the way.
//!
//! The construction explores a carry/level automaton: a state `(l, j)` stores
//! the pending argument transformation `n ↦ q^j·n + l`. *Storing* transitions
//! consume one input symbol `ε` and move to `(q^j·ε + l, j+1)`; *recursion*
//! transitions consume no input and apply one rule. Recursion transitions are
//! then eliminated by composing them with the storing transitions of their
//! target, non-final states drop out, and behaviourally equivalent states
//! (equal up to an additive constant on all completions) are merged.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{parse_rat, Rat};
use crate::transducer::{InputSymbol, Transducer};

/// One recursion rule `a(q^κ·n + λ) = a(q^{κ_λ}·n + r_λ) + t_λ`, stored for a
/// fixed residue `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub kappa_lambda: u32,
    pub r: Vec<i64>,
    pub t: Rat,
}

/// A full recursion system over residues `λ ∈ [0, q^κ)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionSystem {
    pub q: u32,
    pub d: usize,
    pub kappa: u32,
    /// Indexed by the row-major rank of `λ` with radix `q^κ`.
    pub rules: Vec<Rule>,
    pub initial_values: BTreeMap<Vec<i64>, Rat>,
}

impl RecursionSystem {
    pub fn modulus(&self) -> i64 {
        (self.q as i64).pow(self.kappa)
    }

    pub fn lambda_rank(&self, lambda: &[i64]) -> usize {
        let m = self.modulus();
        lambda
            .iter()
            .fold(0usize, |acc, &c| acc * m as usize + c as usize)
    }

    pub fn rule_for(&self, lambda: &[i64]) -> &Rule {
        &self.rules[self.lambda_rank(lambda)]
    }

    /// Splits `m ≥ -∞` componentwise into `m = q^κ·s + λ` with `0 ≤ λ < q^κ`.
    fn split(&self, m: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let md = self.modulus();
        let lambda: Vec<i64> = m.iter().map(|&x| x.rem_euclid(md)).collect();
        let s: Vec<i64> = m.iter().map(|&x| x.div_euclid(md)).collect();
        (s, lambda)
    }

    /// The rule application map `A(q^κ·s + λ) = q^{κ_λ}·s + r_λ`, or `None`
    /// when the right-hand side has a negative component (the `∞` case).
    pub fn apply(&self, m: &[i64]) -> Option<Vec<i64>> {
        debug_assert!(m.iter().all(|&x| x >= 0));
        let (s, lambda) = self.split(m);
        let rule = self.rule_for(&lambda);
        let scale = (self.q as i64).pow(rule.kappa_lambda);
        let out: Vec<i64> = s
            .iter()
            .zip(&rule.r)
            .map(|(&si, &ri)| scale * si + ri)
            .collect();
        if out.iter().all(|&x| x >= 0) {
            Some(out)
        } else {
            None
        }
    }

    /// Output label of the arc `m → A(m)` in the recursion digraph.
    pub fn arc_label(&self, m: &[i64]) -> Rat {
        let (_, lambda) = self.split(m);
        self.rule_for(&lambda).t.clone()
    }

    /// Brute-force evaluation of `a(n)` straight from the recursion and the
    /// initial values, independent of the compiled transducer. Used as the
    /// correctness oracle.
    pub fn brute_force(&self, n: &[i64]) -> Result<Rat, CompileError> {
        let mut acc = Rat::zero();
        let mut cur = n.to_vec();
        let mut steps = 0usize;
        loop {
            if let Some(v) = self.initial_values.get(&cur) {
                return Ok(acc + v.clone());
            }
            match self.apply(&cur) {
                Some(next) => {
                    acc += self.arc_label(&cur);
                    cur = next;
                }
                None => {
                    return Err(CompileError::UnresolvedValue(cur));
                }
            }
            steps += 1;
            if steps > 1_000_000 {
                return Err(CompileError::UnresolvedValue(n.to_vec()));
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum RecParseError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("line {0}: left modulus {1} is not a positive power of q = {2}")]
    BadLeftModulus(usize, i64, u32),
    #[error("line {0}: right modulus {1} is not a power of q = {2}")]
    BadRightModulus(usize, i64, u32),
    #[error("line {0}: right modulus must be smaller than the left modulus")]
    ExponentOrder(usize),
    #[error("line {0}: residue {1:?} out of range for modulus {2}")]
    ResidueRange(usize, Vec<i64>, i64),
    #[error("line {0}: duplicate rule for residue {1:?}")]
    DuplicateRule(usize, Vec<i64>),
    #[error("missing rule for residue {0:?} (mod {1})")]
    MissingRule(Vec<i64>, i64),
    #[error("negative shift {0:?} requires d = 1")]
    NegativeShift(Vec<i64>),
    #[error("missing `{0}` declaration")]
    MissingHeader(&'static str),
    #[error("residue space {0}^{1} is too large (over 2^20 rules)")]
    ModulusTooLarge(i64, usize),
}

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("recursion system is not well-posed")]
    IllPosed(Box<WellPosednessReport>),
    #[error("carry/level exploration exceeded the state cap of {0}")]
    StateCap(usize),
    #[error("carry bound violated during exploration (internal error)")]
    CarryBound,
    #[error("no initial value resolves a({0:?})")]
    UnresolvedValue(Vec<i64>),
}

/// Parses the recursion DSL:
///
/// ```text
/// recursion v1
/// q 2
/// d 1
/// a(4n+0) = a(2n+0) + 0
/// a(4n+2) = a(2n+1) + 1
/// init a(0) = 0
/// init a(1) = 2
/// ```
///
/// Rules may use different left moduli (all powers of `q`); they are lifted
/// to the largest one. For `d ≥ 2` the arguments are comma-separated
/// component expressions sharing one modulus per side.
pub fn parse_recursion(text: &str) -> Result<RecursionSystem, RecParseError> {
    struct SurfaceRule {
        lineno: usize,
        kappa: u32,
        lambda: Vec<i64>,
        kappa_prime: u32,
        r: Vec<i64>,
        t: Rat,
    }

    let mut q: Option<u32> = None;
    let mut d: Option<usize> = None;
    let mut surface: Vec<SurfaceRule> = Vec::new();
    let mut inits: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
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
        if line == "recursion v1" {
            seen_header = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("q ") {
            let v = rest.trim().parse::<u32>().map_err(|_| {
                RecParseError::Syntax(lineno, "bad value for `q`".into())
            })?;
            if v < 2 {
                return Err(RecParseError::Syntax(lineno, "q must be >= 2".into()));
            }
            q = Some(v);
            continue;
        }
        if let Some(rest) = line.strip_prefix("d ") {
            let v = rest.trim().parse::<usize>().map_err(|_| {
                RecParseError::Syntax(lineno, "bad value for `d`".into())
            })?;
            if v < 1 {
                return Err(RecParseError::Syntax(lineno, "d must be >= 1".into()));
            }
            d = Some(v);
            continue;
        }
        let qv = q.ok_or(RecParseError::MissingHeader("q"))?;
        let dv = d.ok_or(RecParseError::MissingHeader("d"))?;

        if let Some(rest) = line.strip_prefix("init") {
            let (arg, val) = split_eq(rest, lineno)?;
            let comps = argument_components(arg, lineno)?;
            if comps.len() != dv {
                return Err(RecParseError::Syntax(
                    lineno,
                    format!("expected {dv} components, got {}", comps.len()),
                ));
            }
            let n: Result<Vec<i64>, _> = comps
                .iter()
                .map(|c| {
                    c.trim().parse::<i64>().map_err(|_| {
                        RecParseError::Syntax(lineno, format!("bad integer `{c}`"))
                    })
                })
                .collect();
            let n = n?;
            if n.iter().any(|&x| x < 0) {
                return Err(RecParseError::Syntax(lineno, "initial argument must be >= 0".into()));
            }
            let value = parse_rat(val).ok_or_else(|| {
                RecParseError::Syntax(lineno, format!("bad rational `{val}`"))
            })?;
            inits.insert(n, value);
            continue;
        }

        // rule line: a(...) = a(...) [+|- t]
        let (lhs, rhs) = split_eq(line, lineno)?;
        let lhs_comps = argument_components(lhs, lineno)?;
        let (rhs_arg, t) = strip_offset(rhs, lineno)?;
        let rhs_comps = argument_components(rhs_arg, lineno)?;
        if lhs_comps.len() != dv || rhs_comps.len() != dv {
            return Err(RecParseError::Syntax(
                lineno,
                format!("expected {dv} components on each side"),
            ));
        }
        let (lm, lambda) = linear_components(&lhs_comps, lineno)?;
        let (rm, r) = linear_components(&rhs_comps, lineno)?;
        let kappa = power_of(lm, qv).ok_or(RecParseError::BadLeftModulus(lineno, lm, qv))?;
        if kappa == 0 {
            return Err(RecParseError::BadLeftModulus(lineno, lm, qv));
        }
        let kappa_prime = power_of(rm, qv).ok_or(RecParseError::BadRightModulus(lineno, rm, qv))?;
        if kappa_prime >= kappa {
            return Err(RecParseError::ExponentOrder(lineno));
        }
        if lambda.iter().any(|&c| c < 0 || c >= lm) {
            return Err(RecParseError::ResidueRange(lineno, lambda, lm));
        }
        surface.push(SurfaceRule {
            lineno,
            kappa,
            lambda,
            kappa_prime,
            r,
            t,
        });
    }

    if !seen_header {
        return Err(RecParseError::MissingHeader("recursion v1"));
    }
    let q = q.ok_or(RecParseError::MissingHeader("q"))?;
    let d = d.ok_or(RecParseError::MissingHeader("d"))?;

    let kappa = surface
        .iter()
        .map(|r| r.kappa)
        .max()
        .ok_or(RecParseError::MissingHeader("at least one rule"))?;
    let modulus = (q as i64).pow(kappa);
    let rank = |lambda: &[i64]| -> usize {
        lambda
            .iter()
            .fold(0usize, |acc, &c| acc * modulus as usize + c as usize)
    };

    let total = (modulus as usize)
        .checked_pow(d as u32)
        .filter(|&t| t <= 1 << 20)
        .ok_or(RecParseError::ModulusTooLarge(modulus, d))?;
    let mut rules: Vec<Option<Rule>> = vec![None; total];
    for sr in &surface {
        // lift a(q^κr·k + λ0) = a(q^κ'·k + r0) + t to the common modulus by
        // substituting k = q^(κ-κr)·n + m for all 0 ≤ m < q^(κ-κr)·1
        let lift = (q as i64).pow(kappa - sr.kappa);
        let small = (q as i64).pow(sr.kappa);
        let scale = (q as i64).pow(sr.kappa_prime);
        let mut m = vec![0i64; d];
        loop {
            let lambda: Vec<i64> = sr
                .lambda
                .iter()
                .zip(&m)
                .map(|(&l0, &mi)| l0 + small * mi)
                .collect();
            let r: Vec<i64> = sr.r.iter().zip(&m).map(|(&r0, &mi)| scale * mi + r0).collect();
            let slot = &mut rules[rank(&lambda)];
            if slot.is_some() {
                return Err(RecParseError::DuplicateRule(sr.lineno, lambda));
            }
            *slot = Some(Rule {
                kappa_lambda: sr.kappa_prime + kappa - sr.kappa,
                r,
                t: sr.t.clone(),
            });
            // increment the mixed-radix counter m < lift·1
            let mut i = d;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                m[i] += 1;
                if m[i] < lift {
                    break;
                }
                m[i] = 0;
            }
            if m.iter().all(|&x| x == 0) {
                break;
            }
        }
    }

    let mut complete = Vec::with_capacity(total);
    for (idx, slot) in rules.into_iter().enumerate() {
        match slot {
            Some(rule) => complete.push(rule),
            None => {
                let mut lambda = vec![0i64; d];
                let mut r = idx;
                for i in (0..d).rev() {
                    lambda[i] = (r % modulus as usize) as i64;
                    r /= modulus as usize;
                }
                return Err(RecParseError::MissingRule(lambda, modulus));
            }
        }
    }

    if d >= 2 {
        for rule in &complete {
            if rule.r.iter().any(|&x| x < 0) {
                return Err(RecParseError::NegativeShift(rule.r.clone()));
            }
        }
    }

    Ok(RecursionSystem {
        q,
        d,
        kappa,
        rules: complete,
        initial_values: inits,
    })
}

fn split_eq<'a>(s: &'a str, lineno: usize) -> Result<(&'a str, &'a str), RecParseError> {
    s.split_once('=')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| RecParseError::Syntax(lineno, "expected `=`".into()))
}

/// Extracts the component list from `a( ... )`.
fn argument_components(s: &str, lineno: usize) -> Result<Vec<String>, RecParseError> {
    let s = s.trim();
    let inner = s
        .strip_prefix('a')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| RecParseError::Syntax(lineno, format!("expected `a(...)`, got `{s}`")))?;
    Ok(inner.split(',').map(|c| c.trim().to_string()).collect())
}

/// Splits `a(...) + t` / `a(...) - t` / `a(...)` at the top level.
fn strip_offset<'a>(s: &'a str, lineno: usize) -> Result<(&'a str, Rat), RecParseError> {
    let close = s
        .rfind(')')
        .ok_or_else(|| RecParseError::Syntax(lineno, "expected `a(...)`".into()))?;
    let (arg, tail) = s.split_at(close + 1);
    let tail = tail.trim();
    if tail.is_empty() {
        return Ok((arg, Rat::zero()));
    }
    let (sign, rest) = if let Some(r) = tail.strip_prefix('+') {
        (Rat::one(), r)
    } else if let Some(r) = tail.strip_prefix('-') {
        (-Rat::one(), r)
    } else {
        return Err(RecParseError::Syntax(lineno, format!("unexpected trailing `{tail}`")));
    };
    let t = parse_rat(rest).ok_or_else(|| {
        RecParseError::Syntax(lineno, format!("bad rational `{}`", rest.trim()))
    })?;
    Ok((arg, sign * t))
}

/// Parses components of the form `Mn+c`, `Mn-c`, `Mn`, `n+c`, `n`; all
/// components must share one modulus `M`.
fn linear_components(comps: &[String], lineno: usize) -> Result<(i64, Vec<i64>), RecParseError> {
    let mut modulus: Option<i64> = None;
    let mut offsets = Vec::with_capacity(comps.len());
    for c in comps {
        let compact: String = c.chars().filter(|ch| !ch.is_whitespace()).collect();
        let npos = compact
            .find('n')
            .ok_or_else(|| RecParseError::Syntax(lineno, format!("component `{c}` lacks `n`")))?;
        let coeff_str = &compact[..npos];
        let coeff: i64 = if coeff_str.is_empty() {
            1
        } else {
            coeff_str.parse().map_err(|_| {
                RecParseError::Syntax(lineno, format!("bad coefficient in `{c}`"))
            })?
        };
        let rest = &compact[npos + 1..];
        let offset: i64 = if rest.is_empty() {
            0
        } else {
            rest.parse().map_err(|_| {
                RecParseError::Syntax(lineno, format!("bad offset in `{c}`"))
            })?
        };
        match modulus {
            None => modulus = Some(coeff),
            Some(m) if m == coeff => {}
            Some(m) => {
                return Err(RecParseError::Syntax(
                    lineno,
                    format!("components mix moduli {m} and {coeff}"),
                ));
            }
        }
        offsets.push(offset);
    }
    Ok((modulus.unwrap(), offsets))
}

fn power_of(m: i64, q: u32) -> Option<u32> {
    if m < 1 {
        return None;
    }
    let mut v = m;
    let mut e = 0u32;
    while v > 1 {
        if v % q as i64 != 0 {
            return None;
        }
        v /= q as i64;
        e += 1;
    }
    Some(e)
}

/// A state of the raw carry/level automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CarryState {
    pub carry: Vec<i64>,
    pub level: u32,
    pub is_final: bool,
}

impl CarryState {
    /// Final, non-negative carry, level at most κ.
    pub fn is_simple(&self, kappa: u32) -> bool {
        self.is_final && self.level <= kappa && self.carry.iter().all(|&c| c >= 0)
    }
}

/// Outgoing transitions of a raw state: either one recursion transition
/// (empty input) or `q^d` storing transitions (one per symbol, output 0).
#[derive(Clone, Debug)]
pub enum RawTransitions {
    Recursion { to: usize, output: Rat },
    Storing(Vec<usize>),
}

/// The accessible part of the exploration automaton.
#[derive(Clone, Debug)]
pub struct RawTransducer {
    pub q: u32,
    pub d: usize,
    pub kappa: u32,
    pub states: Vec<CarryState>,
    pub transitions: Vec<RawTransitions>,
    pub initial: usize,
}

/// Default cap on explored carry/level states. The construction is provably
/// finite, so hitting the cap signals a bug or an adversarial system.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// Explores the carry/level automaton from `(0, 0)` (final).
pub fn build_raw(sys: &RecursionSystem) -> Result<RawTransducer, CompileError> {
    build_raw_capped(sys, DEFAULT_STATE_CAP)
}

pub fn build_raw_capped(sys: &RecursionSystem, cap: usize) -> Result<RawTransducer, CompileError> {
    let q = sys.q as i64;
    let symbol_count = (sys.q as usize).pow(sys.d as u32);

    // carry lower bound for d = 1 (all accessible carries satisfy l >= l_min)
    let l_min: Option<Rat> = (sys.d == 1).then(|| {
        let mut lo = Rat::zero();
        for rule in &sys.rules {
            let qk = Rat::from_integer(q.pow(rule.kappa_lambda).into());
            let qkap = Rat::from_integer(q.pow(sys.kappa).into());
            let num = -Rat::one() + Rat::from_integer(rule.r[0].into()) / qk.clone();
            let den = qk.recip() - qkap.recip();
            let cand = num / den;
            if cand < lo {
                lo = cand;
            }
        }
        lo
    });

    let mut states: Vec<CarryState> = Vec::new();
    let mut index: HashMap<CarryState, usize> = HashMap::new();
    let mut transitions: Vec<Option<RawTransitions>> = Vec::new();
    let mut queue = VecDeque::new();

    let initial_state = CarryState {
        carry: vec![0; sys.d],
        level: 0,
        is_final: true,
    };
    index.insert(initial_state.clone(), 0);
    states.push(initial_state);
    transitions.push(None);
    queue.push_back(0usize);

    while let Some(si) = queue.pop_front() {
        let st = states[si].clone();

        if sys.d == 1 {
            let lm = l_min.as_ref().unwrap();
            if &Rat::from_integer(st.carry[0].into()) < lm {
                return Err(CompileError::CarryBound);
            }
        } else if !st.is_final && st.carry.iter().any(|&c| c < 0) {
            // storing targets and the initial state always have l >= 0 in
            // d >= 2; recursion targets may not exist with negative carries
            // (checked below), so reaching one is a bug
            return Err(CompileError::CarryBound);
        }

        // levels are provably bounded for valid systems; treat a runaway
        // (which would overflow q^level) like a cap hit
        if q.checked_pow(st.level + 1).is_none() {
            return Err(CompileError::StateCap(cap));
        }

        // recursion transition iff level >= κ and the transformed argument is
        // non-negative for every admissible n (n >= 0, n != 0)
        let recursion_target = if st.level >= sys.kappa {
            let (s, lambda) = sys.split(&st.carry);
            let rule = sys.rule_for(&lambda);
            let scale = q.pow(rule.kappa_lambda);
            let j_next = rule.kappa_lambda + st.level - sys.kappa;
            let l_next: Option<Vec<i64>> = s
                .iter()
                .zip(&rule.r)
                .map(|(&si_, &ri)| scale.checked_mul(si_).and_then(|v| v.checked_add(ri)))
                .collect();
            let l_next = l_next.ok_or(CompileError::StateCap(cap))?;
            let admissible = if sys.d == 1 {
                // the smallest admissible n is 1
                l_next[0].checked_add(q.pow(j_next)).is_some_and(|v| v >= 0)
            } else {
                // some admissible n has n_i = 0 for every fixed i
                l_next.iter().all(|&c| c >= 0)
            };
            admissible.then(|| (l_next, j_next, rule.t.clone()))
        } else {
            None
        };

        let intern = |cs: CarryState,
                          states: &mut Vec<CarryState>,
                          index: &mut HashMap<CarryState, usize>,
                          transitions: &mut Vec<Option<RawTransitions>>,
                          queue: &mut VecDeque<usize>|
         -> Result<usize, CompileError> {
            if let Some(&i) = index.get(&cs) {
                return Ok(i);
            }
            if states.len() >= cap {
                return Err(CompileError::StateCap(cap));
            }
            let i = states.len();
            index.insert(cs.clone(), i);
            states.push(cs);
            transitions.push(None);
            queue.push_back(i);
            Ok(i)
        };

        let tr = match recursion_target {
            Some((l_next, j_next, t)) => {
                let cs = CarryState {
                    carry: l_next,
                    level: j_next,
                    is_final: false,
                };
                let to = intern(cs, &mut states, &mut index, &mut transitions, &mut queue)?;
                RawTransitions::Recursion { to, output: t }
            }
            None => {
                let mut targets = Vec::with_capacity(symbol_count);
                for rank in 0..symbol_count {
                    let sym = InputSymbol::from_rank(rank, sys.q, sys.d);
                    let carry: Option<Vec<i64>> = st
                        .carry
                        .iter()
                        .zip(&sym.0)
                        .map(|(&l, &e)| {
                            q.pow(st.level).checked_mul(e as i64).and_then(|v| v.checked_add(l))
                        })
                        .collect();
                    let carry = carry.ok_or(CompileError::StateCap(cap))?;
                    let cs = CarryState {
                        carry,
                        level: st.level + 1,
                        is_final: true,
                    };
                    let to = intern(cs, &mut states, &mut index, &mut transitions, &mut queue)?;
                    targets.push(to);
                }
                RawTransitions::Storing(targets)
            }
        };
        transitions[si] = Some(tr);
    }

    Ok(RawTransducer {
        q: sys.q,
        d: sys.d,
        kappa: sys.kappa,
        states,
        transitions: transitions.into_iter().map(Option::unwrap).collect(),
        initial: 0,
    })
}

/// A zero-input cycle through simple states with a non-vanishing output sum,
/// witnessing ill-posedness.
#[derive(Clone, Debug)]
pub struct BadCycle {
    pub carrier: BTreeSet<Vec<i64>>,
    pub output_sum: Rat,
}

/// Well-posedness analysis of a recursion system against its raw automaton.
#[derive(Clone, Debug)]
pub struct WellPosednessReport {
    pub well_posed: bool,
    /// The classes `F_1 … F_K`: carriers of zero-input simple-state cycles
    /// plus singletons of accessible non-negative carries where the rule map
    /// is undefined.
    pub classes: Vec<BTreeSet<Vec<i64>>>,
    pub bad_cycles: Vec<BadCycle>,
    /// Classes (by index into `classes`) without an initial value.
    pub missing_classes: Vec<usize>,
    /// Initial values that belong to no class, or are surplus within one.
    pub extra_initial_values: Vec<Vec<i64>>,
}

/// Decides well-posedness: every zero-input cycle through simple states must
/// have output sum zero, and the initial values must pick exactly one
/// representative of each class.
pub fn well_posedness(raw: &RawTransducer, sys: &RecursionSystem) -> WellPosednessReport {
    let n = raw.states.len();

    // zero-input successor (recursion edge, or storing edge on symbol 0)
    let succ: Vec<(usize, Rat)> = raw
        .transitions
        .iter()
        .map(|tr| match tr {
            RawTransitions::Recursion { to, output } => (*to, output.clone()),
            RawTransitions::Storing(targets) => (targets[0], Rat::zero()),
        })
        .collect();

    // cycles of the functional graph
    let mut color = vec![0u8; n]; // 0 white, 1 on current path, 2 done
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        while color[cur] == 0 {
            color[cur] = 1;
            path.push(cur);
            cur = succ[cur].0;
        }
        if color[cur] == 1 {
            let pos = path.iter().position(|&s| s == cur).unwrap();
            cycles.push(path[pos..].to_vec());
        }
        for s in path {
            color[s] = 2;
        }
    }

    let mut classes: Vec<BTreeSet<Vec<i64>>> = Vec::new();
    let mut bad_cycles = Vec::new();
    for cycle in cycles {
        let simple = cycle
            .iter()
            .all(|&s| raw.states[s].carry.iter().all(|&c| c >= 0));
        if !simple {
            continue;
        }
        debug_assert!(cycle.iter().all(|&s| raw.states[s].level <= raw.kappa + 1));
        let carrier: BTreeSet<Vec<i64>> =
            cycle.iter().map(|&s| raw.states[s].carry.clone()).collect();
        let output_sum = cycle
            .iter()
            .map(|&s| succ[s].1.clone())
            .fold(Rat::zero(), |a, b| a + b);
        if !output_sum.is_zero() {
            bad_cycles.push(BadCycle {
                carrier: carrier.clone(),
                output_sum,
            });
        }
        if !classes.contains(&carrier) {
            classes.push(carrier);
        }
    }

    // singleton classes: accessible carries l >= 0 with undefined rule image
    let mut seen_carries: BTreeSet<Vec<i64>> = BTreeSet::new();
    for st in &raw.states {
        if st.carry.iter().all(|&c| c >= 0) {
            seen_carries.insert(st.carry.clone());
        }
    }
    for carry in seen_carries {
        if sys.apply(&carry).is_none() {
            let singleton: BTreeSet<Vec<i64>> = std::iter::once(carry).collect();
            if !classes.contains(&singleton) {
                classes.push(singleton);
            }
        }
    }
    classes.sort();

    let mut missing_classes = Vec::new();
    let mut claimed: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut extra_initial_values = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let members: Vec<&Vec<i64>> = sys
            .initial_values
            .keys()
            .filter(|k| class.contains(*k))
            .collect();
        if members.is_empty() {
            missing_classes.push(ci);
        } else {
            claimed.insert(members[0].clone());
            for surplus in &members[1..] {
                extra_initial_values.push((*surplus).clone());
            }
            claimed.extend(members.iter().map(|m| (*m).clone()));
        }
    }
    for key in sys.initial_values.keys() {
        if !claimed.contains(key) {
            extra_initial_values.push(key.clone());
        }
    }
    extra_initial_values.sort();
    extra_initial_values.dedup();

    let well_posed =
        bad_cycles.is_empty() && missing_classes.is_empty() && extra_initial_values.is_empty();
    WellPosednessReport {
        well_posed,
        classes,
        bad_cycles,
        missing_classes,
        extra_initial_values,
    }
}

/// Resolves `a(l)` for the final outputs by walking the recursion digraph to
/// an initial value, accumulating arc labels. Memoized across states.
struct ValueResolver<'a> {
    sys: &'a RecursionSystem,
    memo: HashMap<Vec<i64>, Rat>,
}

impl<'a> ValueResolver<'a> {
    fn new(sys: &'a RecursionSystem) -> Self {
        let memo = sys
            .initial_values
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        ValueResolver { sys, memo }
    }

    fn value(&mut self, n: &[i64]) -> Result<Rat, CompileError> {
        if let Some(v) = self.memo.get(n) {
            return Ok(v.clone());
        }
        let mut path: Vec<(Vec<i64>, Rat)> = Vec::new();
        let mut on_path: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut cur = n.to_vec();
        let end = loop {
            if let Some(v) = self.memo.get(&cur) {
                break v.clone();
            }
            if on_path.contains(&cur) {
                // a cycle with no initial value; only possible when ill-posed
                return Err(CompileError::UnresolvedValue(cur));
            }
            on_path.insert(cur.clone());
            let label = self.sys.arc_label(&cur);
            let next = self
                .sys
                .apply(&cur)
                .ok_or_else(|| CompileError::UnresolvedValue(cur.clone()))?;
            path.push((cur, label));
            cur = next;
        };
        let mut value = end;
        for (node, label) in path.into_iter().rev() {
            value = label + value;
            self.memo.insert(node.clone(), value.clone());
        }
        Ok(self.memo[n].clone())
    }
}

/// Eliminates recursion transitions, drops non-final states, resolves final
/// outputs, and merges states that agree on all completions up to an additive
/// constant. The result computes exactly the recursion's sequence.
pub fn reduce(raw: &RawTransducer, sys: &RecursionSystem) -> Result<Transducer, CompileError> {
    let symbol_count = (raw.q as usize).pow(raw.d as u32);

    // composed storing row of a state: follow the recursion chain, then take
    // the storing transitions, summing outputs (levels strictly decrease
    // along recursion chains, so this terminates)
    fn storing_row(
        s: usize,
        raw: &RawTransducer,
        memo: &mut Vec<Option<Vec<(usize, Rat)>>>,
    ) -> Vec<(usize, Rat)> {
        if let Some(row) = &memo[s] {
            return row.clone();
        }
        let row = match &raw.transitions[s] {
            RawTransitions::Storing(targets) => {
                targets.iter().map(|&t| (t, Rat::zero())).collect()
            }
            RawTransitions::Recursion { to, output } => storing_row(*to, raw, memo)
                .into_iter()
                .map(|(t, o)| (t, o + output.clone()))
                .collect::<Vec<_>>(),
        };
        memo[s] = Some(row.clone());
        row
    }

    let mut memo = vec![None; raw.states.len()];

    // accessible final states under composed transitions
    let mut keep: Vec<usize> = Vec::new();
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dense.insert(raw.initial, 0);
    keep.push(raw.initial);
    queue.push_back(raw.initial);
    while let Some(s) = queue.pop_front() {
        for (t, _) in storing_row(s, raw, &mut memo) {
            debug_assert!(raw.states[t].is_final);
            if !dense.contains_key(&t) {
                dense.insert(t, keep.len());
                keep.push(t);
                queue.push_back(t);
            }
        }
    }

    // final outputs: a(carry) for non-negative carries, 0 otherwise (such
    // states are never the endpoint of a run over a valid input)
    let mut resolver = ValueResolver::new(sys);
    let mut finals: Vec<Rat> = Vec::with_capacity(keep.len());
    for &s in &keep {
        let st = &raw.states[s];
        if st.carry.iter().all(|&c| c >= 0) {
            finals.push(resolver.value(&st.carry)?);
        } else {
            finals.push(Rat::zero());
        }
    }

    let rows: Vec<Vec<(usize, Rat)>> = keep
        .iter()
        .map(|&s| {
            storing_row(s, raw, &mut memo)
                .into_iter()
                .map(|(t, o)| (dense[&t], o))
                .collect()
        })
        .collect();

    // Merge behaviourally equal states (same final output, same transition
    // outputs, equivalent successors) by Moore partition refinement. This is
    // the same simplification the construction's reference tooling applies,
    // so worked examples reproduce their published machines.
    let n = keep.len();
    let mut block = vec![0usize; n];
    loop {
        let mut sig_of: HashMap<(Rat, Vec<(usize, Rat)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig: (Rat, Vec<(usize, Rat)>) = (
                finals[s].clone(),
                rows[s].iter().map(|(t, o)| (block[*t], o.clone())).collect(),
            );
            let fresh = sig_of.len();
            let id = *sig_of.entry(sig).or_insert(fresh);
            next[s] = id;
        }
        if next == block {
            break;
        }
        block = next;
    }

    // renumber blocks by first occurrence so the initial block is state 0
    let mut order: Vec<usize> = Vec::new();
    let mut renumber: HashMap<usize, usize> = HashMap::new();
    for s in 0..n {
        let b = block[s];
        renumber.entry(b).or_insert_with(|| {
            order.push(s);
            order.len() - 1
        });
    }
    let class_count = order.len();

    let mut out_finals = Vec::with_capacity(class_count);
    let mut transitions: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(class_count);
    for &rep in &order {
        out_finals.push(finals[rep].clone());
        let row: Vec<(usize, Rat)> = (0..symbol_count)
            .map(|r| {
                let (t, o) = &rows[rep][r];
                (renumber[&block[*t]], o.clone())
            })
            .collect();
        transitions.push(row);
    }
    // merged states agree on finals and rows by construction
    debug_assert!((0..n).all(|s| {
        finals[s] == out_finals[renumber[&block[s]]]
            && (0..symbol_count).all(|r| {
                let (t, o) = &rows[s][r];
                transitions[renumber[&block[s]]][r] == (renumber[&block[*t]], o.clone())
            })
    }));

    Ok(Transducer::from_dense(raw.q, raw.d, out_finals, transitions))
}

/// Full pipeline: explore, decide well-posedness, reduce. Refuses to reduce
/// an ill-posed system.
pub fn compile(sys: &RecursionSystem) -> Result<(Transducer, WellPosednessReport), CompileError> {
    let raw = build_raw(sys)?;
    let report = well_posedness(&raw, sys);
    if !report.well_posed {
        return Err(CompileError::IllPosed(Box::new(report)));
    }
    let t = reduce(&raw, sys)?;
    Ok((t, report))
}
