//! Exact prefix moments via the matrix recursion over 2-jets, empirical
//! fluctuation extraction and distribution-law verification.
//!
//! The moment recursion carries truncated order-2 power series ("jets") of
//! the moment generating function through the digit recursion
//! `G(qN+ε) = M·G(N) + H_ε(N)`: the order-0 part counts points, the first
//! and second jet components of `e_1·G(N)·u` are `Σ T(n)` and `Σ T(n)²`
//! exactly. A fixed-width integer fast path handles large `N` when the
//! scaled outputs fit; otherwise everything runs over big rationals.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::rational::{to_f64, Rat};
use crate::spectral::{AsymptoticReport, LimitLaw};
use crate::transducer::{digits, InputSymbol, Transducer};

/// Truncated order-2 power series: value, first and second derivative at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

/// Scalar backends for the jet recursion. Arithmetic returns `None` on
/// overflow so the caller can fall back to exact big rationals.
pub trait JetScalar: Clone {
    fn scalar_zero() -> Self;
    fn add(a: &Self, b: &Self) -> Option<Self>;
    fn mul(a: &Self, b: &Self) -> Option<Self>;
    fn neg(a: &Self) -> Option<Self>;
}

impl JetScalar for i128 {
    fn scalar_zero() -> Self {
        0
    }
    fn add(a: &Self, b: &Self) -> Option<Self> {
        a.checked_add(*b)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
    fn neg(a: &Self) -> Option<Self> {
        a.checked_neg()
    }
}

impl JetScalar for Rat {
    fn scalar_zero() -> Self {
        Zero::zero()
    }
    fn add(a: &Self, b: &Self) -> Option<Self> {
        Some(a + b)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
    fn neg(a: &Self) -> Option<Self> {
        Some(-a)
    }
}

impl<T: JetScalar> Jet<T> {
    fn zero() -> Self {
        Jet {
            v: T::scalar_zero(),
            d1: T::scalar_zero(),
            d2: T::scalar_zero(),
        }
    }

    fn add(a: &Self, b: &Self) -> Option<Self> {
        Some(Jet {
            v: T::add(&a.v, &b.v)?,
            d1: T::add(&a.d1, &b.d1)?,
            d2: T::add(&a.d2, &b.d2)?,
        })
    }

    fn sub(a: &Self, b: &Self) -> Option<Self> {
        Some(Jet {
            v: T::add(&a.v, &T::neg(&b.v)?)?,
            d1: T::add(&a.d1, &T::neg(&b.d1)?)?,
            d2: T::add(&a.d2, &T::neg(&b.d2)?)?,
        })
    }

    /// Multiplies by the edge jet `(1, o, o²)` of `exp(s·o)`:
    /// `(x.v, o·x.v + x.d1, o²·x.v + 2·o·x.d1 + x.d2)`.
    fn apply_edge(o: &T, o2: &T, x: &Self) -> Option<Self> {
        let d1 = T::add(&T::mul(o, &x.v)?, &x.d1)?;
        let two_od1 = T::mul(o, &x.d1)?;
        let two_od1 = T::add(&two_od1, &two_od1)?;
        let d2 = T::add(&T::add(&T::mul(o2, &x.v)?, &two_od1)?, &x.d2)?;
        Some(Jet {
            v: x.v.clone(),
            d1,
            d2,
        })
    }
}

/// Dense per-state transition table with scaled outputs: `(target, o, o²)`
/// per symbol rank.
struct ScaledTable<T> {
    n: usize,
    q: u32,
    d: usize,
    trans: Vec<Vec<(usize, T, T)>>,
    /// Final-output jet vector `u` with entries `(1, f, f²)`.
    u: Vec<Jet<T>>,
}

fn scaled_table_i128(t: &Transducer, denom: &BigInt) -> Option<ScaledTable<i128>> {
    let map = t.accessible();
    let dense: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = map.len();
    let to_scaled = |r: &Rat| -> Option<i128> {
        let scaled = r * Rat::from_integer(denom.clone());
        debug_assert!(scaled.is_integer());
        scaled.to_integer().to_i128()
    };
    let mut trans = Vec::with_capacity(n);
    for &s in &map {
        let mut row = Vec::with_capacity(t.symbol_count());
        for sym in t.symbols() {
            let (to, out) = t.step(s, &sym);
            let o = to_scaled(out)?;
            row.push((dense[&to], o, o.checked_mul(o)?));
        }
        trans.push(row);
    }
    let mut u = Vec::with_capacity(n);
    for &s in &map {
        let f = to_scaled(t.final_output(s))?;
        u.push(Jet {
            v: 1i128,
            d1: f,
            d2: f.checked_mul(f)?,
        });
    }
    Some(ScaledTable {
        n,
        q: t.q,
        d: t.d,
        trans,
        u,
    })
}

fn scaled_table_rat(t: &Transducer) -> ScaledTable<Rat> {
    let map = t.accessible();
    let dense: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = map.len();
    let mut trans = Vec::with_capacity(n);
    for &s in &map {
        let mut row = Vec::with_capacity(t.symbol_count());
        for sym in t.symbols() {
            let (to, out) = t.step(s, &sym);
            row.push((dense[&to], out.clone(), out * out));
        }
        trans.push(row);
    }
    let u = map
        .iter()
        .map(|&s| {
            let f = t.final_output(s).clone();
            Jet {
                v: Rat::one(),
                d1: f.clone(),
                d2: &f * &f,
            }
        })
        .collect();
    ScaledTable {
        n,
        q: t.q,
        d: t.d,
        trans,
        u,
    }
}

impl<T: JetScalar> ScaledTable<T> {
    /// `(M_ε x)[s] = jet(s, ε) · x[target(s, ε)]`.
    fn apply_symbol(&self, rank: usize, x: &[Jet<T>]) -> Option<Vec<Jet<T>>> {
        let mut y = Vec::with_capacity(self.n);
        for s in 0..self.n {
            let (to, o, o2) = &self.trans[s][rank];
            y.push(Jet::apply_edge(o, o2, &x[*to])?);
        }
        Some(y)
    }

    fn add_assign(acc: &mut Vec<Jet<T>>, other: &[Jet<T>]) -> Option<()> {
        for (a, b) in acc.iter_mut().zip(other) {
            *a = Jet::add(a, b)?;
        }
        Some(())
    }

    /// Runs the full subset recursion over the digits of `n` (MSB first) and
    /// returns `e_1 · G(n) · u`.
    fn prefix_jet(&self, n: u64) -> Option<Jet<T>> {
        if n == 0 {
            return Some(Jet::zero());
        }
        let subset_count = 1usize << self.d;
        let full = subset_count - 1;

        // v[C] = G_C(prefix) · u; initially prefix = 0: only G_full = I
        let mut v: Vec<Vec<Jet<T>>> = (0..subset_count)
            .map(|c| {
                if c == full {
                    self.u.clone()
                } else {
                    vec![Jet::zero(); self.n]
                }
            })
            .collect();

        // (I - M_0) u, the correction for the n = 0 point
        let c0 = {
            let m0u = self.apply_symbol(0, &self.u)?;
            let mut c = self.u.clone();
            for (a, b) in c.iter_mut().zip(&m0u) {
                *a = Jet::sub(a, b)?;
            }
            c
        };

        let mut digs: Vec<u32> = Vec::new();
        let mut rem = n;
        while rem > 0 {
            digs.push((rem % self.q as u64) as u32);
            rem /= self.q as u64;
        }
        digs.reverse(); // MSB first

        for &eps in &digs {
            let mut next: Vec<Vec<Jet<T>>> = Vec::with_capacity(subset_count);
            for c_set in 0..subset_count {
                let mut acc = if c_set == 0 {
                    c0.clone()
                } else {
                    vec![Jet::zero(); self.n]
                };
                // D ranges over subsets of the complement of C
                let comp = full & !c_set;
                let mut d_set = comp;
                loop {
                    let target = c_set | d_set;
                    let contrib = self.apply_class(c_set, d_set, eps, &v[target])?;
                    Self::add_assign(&mut acc, &contrib)?;
                    if d_set == 0 {
                        break;
                    }
                    d_set = (d_set - 1) & comp;
                }
                next.push(acc);
            }
            v = next;
        }
        Some(v[0][0].clone())
    }

    /// Applies `M_{C,D}^ε = Σ_β M_β` with `β_i = ε` for `i ∈ C`,
    /// `β_i ∈ [0, ε)` for `i ∈ D`, `β_i ∈ [0, q)` otherwise.
    fn apply_class(
        &self,
        c_set: usize,
        d_set: usize,
        eps: u32,
        x: &[Jet<T>],
    ) -> Option<Vec<Jet<T>>> {
        let mut acc = vec![Jet::zero(); self.n];
        let mut beta = vec![0u32; self.d];
        // iterate all β consistent with (C, D, ε); bit i of the masks refers
        // to coordinate i
        fn rec<T: JetScalar>(
            table: &ScaledTable<T>,
            i: usize,
            c_set: usize,
            d_set: usize,
            eps: u32,
            beta: &mut Vec<u32>,
            x: &[Jet<T>],
            acc: &mut Vec<Jet<T>>,
        ) -> Option<()> {
            if i == table.d {
                let rank = beta
                    .iter()
                    .fold(0usize, |a, &b| a * table.q as usize + b as usize);
                let contrib = table.apply_symbol(rank, x)?;
                ScaledTable::add_assign(acc, &contrib)?;
                return Some(());
            }
            let range: Vec<u32> = if c_set & (1 << i) != 0 {
                vec![eps]
            } else if d_set & (1 << i) != 0 {
                (0..eps).collect()
            } else {
                (0..table.q).collect()
            };
            for b in range {
                beta[i] = b;
                rec(table, i + 1, c_set, d_set, eps, beta, x, acc)?;
            }
            Some(())
        }
        rec(self, 0, c_set, d_set, eps, &mut beta, x, &mut acc)?;
        Some(acc)
    }
}

/// Exact moment summary of `T(n)` over `n ∈ [0, N)^d`.
#[derive(Clone, Debug)]
pub struct MomentSummary {
    pub n: u64,
    pub count: BigInt,
    pub sum: Rat,
    pub sum_sq: Rat,
}

impl MomentSummary {
    pub fn mean(&self) -> Rat {
        if self.count.is_zero() {
            return Rat::zero();
        }
        &self.sum / Rat::from_integer(self.count.clone())
    }

    pub fn variance(&self) -> Rat {
        if self.count.is_zero() {
            return Rat::zero();
        }
        let mean = self.mean();
        &self.sum_sq / Rat::from_integer(self.count.clone()) - &mean * &mean
    }

    /// Empirical fluctuation value `mean - e_T·log_q N`.
    pub fn psi1(&self, e_t: &Rat, q: u32) -> f64 {
        to_f64(&self.mean()) - to_f64(e_t) * (self.n as f64).ln() / (q as f64).ln()
    }
}

#[derive(Debug, Error)]
pub enum EmpiricalError {
    #[error("N must be at least 1")]
    EmptyRange,
    #[error("exact d >= 2 path supports N <= 2^20 per axis")]
    RangeTooLarge,
    #[error("quantitative distribution check needs all b_j > 0 (classification {0:?})")]
    QuantitativeRefused(LimitLaw),
    #[error("variance fluctuation undefined when the variance grows like log² N")]
    WrongClassification,
}

/// Exact prefix moments over `n ∈ [0, N)^d` through the jet recursion:
/// `O(log N)` sparse jet-matrix applications. Uses an `i128` fast path when
/// the scaled outputs provably fit, big rationals otherwise.
pub fn prefix_moments(t: &Transducer, n: u64) -> Result<MomentSummary, EmpiricalError> {
    if t.d >= 2 && n > (1 << 20) {
        return Err(EmpiricalError::RangeTooLarge);
    }
    let count = BigInt::from(n).pow(t.d as u32);
    if n == 0 {
        return Ok(MomentSummary {
            n,
            count,
            sum: Rat::zero(),
            sum_sq: Rat::zero(),
        });
    }

    // common denominator of all outputs
    let mut denom = BigInt::one();
    for (_, out) in t.delta.values() {
        denom = denom.lcm(out.denom());
    }
    for f in t.finals.iter().flatten() {
        denom = denom.lcm(f.denom());
    }

    if let Some(jet) = try_fast_path(t, n, &denom) {
        let d_rat = Rat::from_integer(denom.clone());
        return Ok(MomentSummary {
            n,
            count,
            sum: Rat::from_integer(BigInt::from(jet.d1)) / d_rat.clone(),
            sum_sq: Rat::from_integer(BigInt::from(jet.d2)) / (&d_rat * &d_rat),
        });
    }

    let table = scaled_table_rat(t);
    let jet = table.prefix_jet(n).expect("rational path never overflows");
    Ok(MomentSummary {
        n,
        count,
        sum: jet.d1,
        sum_sq: jet.d2,
    })
}

fn try_fast_path(t: &Transducer, n: u64, denom: &BigInt) -> Option<Jet<i128>> {
    // magnitude bound: |d2| ≤ N^d·(o_max·L + f_max)², with headroom for the
    // per-step accumulation across q^d symbols and intermediate products
    let digits_len = {
        let mut l = 0u32;
        let mut rem = n;
        while rem > 0 {
            l += 1;
            rem /= t.q as u64;
        }
        l.max(1)
    };
    let mut o_max = BigInt::zero();
    for (_, out) in t.delta.values() {
        let scaled = (out * Rat::from_integer(denom.clone())).to_integer().abs();
        o_max = o_max.max(scaled);
    }
    let mut f_max = BigInt::zero();
    for f in t.finals.iter().flatten() {
        let scaled = (f * Rat::from_integer(denom.clone())).to_integer().abs();
        f_max = f_max.max(scaled);
    }
    let s_max = &o_max * BigInt::from(digits_len) + &f_max;
    let count = BigInt::from(n).pow(t.d as u32);
    let bound = (count + BigInt::one())
        * (&s_max + BigInt::one()).pow(2)
        * BigInt::from(t.symbol_count() as u64 + 1)
        * BigInt::from(t.state_count as u64 + 1);
    if bound >= (BigInt::one() << 120) {
        return None;
    }
    let table = scaled_table_i128(t, denom)?;
    table.prefix_jet(n)
}

/// One empirical fluctuation sample.
#[derive(Clone, Debug)]
pub struct FluctuationSample {
    /// `log_q N` of the integer cutoff actually used.
    pub x: f64,
    pub n: u64,
    pub psi1: f64,
}

/// Samples the empirical fluctuation `mean(N) - e_T·log_q N` at
/// `N = round(q^x)` over the grid. Rows are sorted by `x mod p`.
pub fn fluctuation_samples(
    t: &Transducer,
    report: &AsymptoticReport,
    grid: &[f64],
) -> Result<Vec<FluctuationSample>, EmpiricalError> {
    assert_eq!(t.d, 1, "fluctuation sampling is a d = 1 operation");
    let p = report.structure.final_period as f64;
    let lnq = (t.q as f64).ln();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let n = (t.q as f64).powf(x).round();
        if n < 1.0 {
            return Err(EmpiricalError::EmptyRange);
        }
        let n = n as u64;
        let summary = prefix_moments(t, n)?;
        let x_actual = (n as f64).ln() / lnq;
        rows.push(FluctuationSample {
            x: x_actual,
            n,
            psi1: summary.psi1(&report.e_t, t.q),
        });
    }
    rows.sort_by(|a, b| {
        let ka = a.x.rem_euclid(p);
        let kb = b.x.rem_euclid(p);
        ka.partial_cmp(&kb).unwrap().then(a.x.partial_cmp(&b.x).unwrap())
    });
    Ok(rows)
}

/// Exact distribution of `T(n)` for `n < N` (d = 1) as `(value, count)`
/// pairs, via a digit dynamic program over automaton states. Exact for any
/// `N` that fits in `u64`.
pub fn value_distribution(t: &Transducer, n: u64) -> Vec<(Rat, u128)> {
    assert_eq!(t.d, 1, "the digit DP is a d = 1 operation");
    assert!(n >= 1);
    let q = t.q as u64;

    // scale outputs to integers
    let mut denom = BigInt::one();
    for (_, out) in t.delta.values() {
        denom = denom.lcm(out.denom());
    }
    for f in t.finals.iter().flatten() {
        denom = denom.lcm(f.denom());
    }
    let d_rat = Rat::from_integer(denom.clone());
    let scaled = |r: &Rat| -> i64 {
        (r * &d_rat)
            .to_integer()
            .to_i64()
            .expect("scaled outputs fit i64")
    };

    let map = t.accessible();
    let dense: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let step: Vec<Vec<(usize, i64)>> = map
        .iter()
        .map(|&s| {
            (0..t.q)
                .map(|e| {
                    let (to, out) = t.step(s, &InputSymbol(vec![e]));
                    (dense[&to], scaled(out))
                })
                .collect()
        })
        .collect();
    let finals: Vec<i64> = map.iter().map(|&s| scaled(t.final_output(s))).collect();

    let mut hist: HashMap<i64, u128> = HashMap::new();
    // n = 0
    *hist.entry(finals[0]).or_default() += 1;

    let nu: Vec<u32> = digits(&[n as i64], t.q).iter().map(|s| s.0[0]).collect(); // LSB first
    let l = nu.len();

    // E_j: free digit strings of length j from the initial state
    let mut e: Vec<HashMap<(usize, i64), u128>> = Vec::with_capacity(l);
    let mut cur: HashMap<(usize, i64), u128> = HashMap::new();
    cur.insert((0, 0), 1);
    e.push(cur.clone());
    for _ in 0..l.saturating_sub(1) {
        let mut next: HashMap<(usize, i64), u128> = HashMap::new();
        for (&(s, v), &cnt) in &cur {
            for eps in 0..q as usize {
                let (to, o) = step[s][eps];
                *next.entry((to, v + o)).or_default() += cnt;
            }
        }
        e.push(next.clone());
        cur = next;
    }

    // numbers with fewer digits than N: top digit nonzero
    for j in 1..l {
        for (&(s, v), &cnt) in &e[j - 1] {
            for eps in 1..q as usize {
                let (to, o) = step[s][eps];
                *hist.entry(v + o + finals[to]).or_default() += cnt;
            }
        }
    }

    // numbers with exactly l digits below N: fixed top digits ν_{l-1}..ν_{i+1},
    // digit ε < ν_i at position i, free digits below
    // suffix walk from a state through the fixed digits ν_{i+1}..ν_{l-1}
    let mut suffix: Vec<Vec<(usize, i64)>> = vec![Vec::new(); l];
    // i = l-1: empty suffix
    suffix[l - 1] = (0..map.len()).map(|s| (s, 0i64)).collect();
    for i in (0..l.saturating_sub(1)).rev() {
        suffix[i] = (0..map.len())
            .map(|s| {
                let (s1, o) = step[s][nu[i + 1] as usize];
                let (end, o2) = suffix[i + 1][s1];
                (end, o + o2)
            })
            .collect();
    }
    for i in (0..l).rev() {
        let lo = if i == l - 1 { 1 } else { 0 };
        for eps in lo..nu[i] {
            for (&(s, v), &cnt) in &e[i] {
                let (s1, o) = step[s][eps as usize];
                let (end, o2) = suffix[i][s1];
                *hist.entry(v + o + o2 + finals[end]).or_default() += cnt;
            }
        }
    }

    let total: u128 = hist.values().sum();
    debug_assert_eq!(total, n as u128);

    let mut out: Vec<(Rat, u128)> = hist
        .into_iter()
        .map(|(v, c)| (Rat::from_integer(BigInt::from(v)) / &d_rat, c))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Result of the distributional comparison against the Gaussian mixture.
#[derive(Clone, Debug)]
pub enum DistributionCheck {
    /// Kolmogorov–Smirnov distance of the normalized output sum to the
    /// predicted mixture `Σ λ_j Φ(0, b_j)` after centering at the exact
    /// finite-N mean (the mixture means `a_j·log_q N` coincide whenever the
    /// quantitative mode applies, and the exact mean carries the periodic
    /// location term that would otherwise dominate the distance). Includes
    /// the theorem's reference scale `1/√(log_q N)`.
    Quantitative {
        n: u64,
        ks: f64,
        reference_scale: f64,
    },
    /// All quantitative assumptions fail; the empirical support is reported.
    DegenerateSupport {
        n: u64,
        support: Vec<(Rat, u128)>,
    },
}

/// Compares the empirical law of the normalized output sum against the
/// predicted Gaussian mixture. Refuses the quantitative mode unless every
/// `b_j` is positive and all mean constants coincide.
pub fn distribution_check(
    t: &Transducer,
    report: &AsymptoticReport,
    n: u64,
) -> Result<DistributionCheck, EmpiricalError> {
    if n < 1 {
        return Err(EmpiricalError::EmptyRange);
    }
    let dist = if t.d == 1 {
        value_distribution(t, n)
    } else {
        if (n as f64).powi(t.d as i32) > (1u64 << 24) as f64 {
            return Err(EmpiricalError::RangeTooLarge);
        }
        enumerate_distribution(t, n)
    };

    let quantitative = report
        .components
        .iter()
        .all(|c| c.b > Rat::zero())
        && report.classification != LimitLaw::VarianceThetaLogSquared;
    if !quantitative {
        return Ok(DistributionCheck::DegenerateSupport { n, support: dist });
    }

    let log_qn = (n as f64).ln() / (t.q as f64).ln();
    let sqrt_l = log_qn.sqrt();
    let total: u128 = dist.iter().map(|(_, c)| c).sum();
    let mean: f64 = dist
        .iter()
        .map(|(v, c)| to_f64(v) * *c as f64 / total as f64)
        .sum();
    let normals: Vec<(f64, Normal)> = report
        .components
        .iter()
        .map(|c| {
            let sd = to_f64(&c.b).sqrt();
            (to_f64(&c.lambda), Normal::new(0.0, sd).expect("b_j > 0"))
        })
        .collect();
    let mixture_cdf = |x: f64| -> f64 { normals.iter().map(|(w, n)| w * n.cdf(x)).sum() };

    let mut ks: f64 = 0.0;
    let mut cum: u128 = 0;
    for (value, count) in &dist {
        let x = (to_f64(value) - mean) / sqrt_l;
        let g = mixture_cdf(x);
        let lower = cum as f64 / total as f64;
        cum += count;
        let upper = cum as f64 / total as f64;
        ks = ks.max((lower - g).abs()).max((upper - g).abs());
    }
    Ok(DistributionCheck::Quantitative {
        n,
        ks,
        reference_scale: 1.0 / sqrt_l,
    })
}

/// Plain enumeration of `T(n)` over `n ∈ [0, N)^d` for small boxes.
fn enumerate_distribution(t: &Transducer, n: u64) -> Vec<(Rat, u128)> {
    let mut hist: HashMap<Rat, u128> = HashMap::new();
    let mut point = vec![0i64; t.d];
    loop {
        let v = crate::transducer::evaluate(t, &point);
        *hist.entry(v).or_default() += 1;
        let mut i = t.d;
        loop {
            if i == 0 {
                let mut out: Vec<(Rat, u128)> = hist.into_iter().collect();
                out.sort_by(|a, b| a.0.cmp(&b.0));
                return out;
            }
            i -= 1;
            point[i] += 1;
            if (point[i] as u64) < n {
                break;
            }
            point[i] = 0;
        }
    }
}

/// Empirical variance-fluctuation samples `V(T) - v_T·log_q N`; only
/// meaningful when all `a_j` coincide.
pub fn variance_fluctuation(
    t: &Transducer,
    report: &AsymptoticReport,
    grid: &[f64],
) -> Result<Vec<FluctuationSample>, EmpiricalError> {
    if report.classification == LimitLaw::VarianceThetaLogSquared {
        return Err(EmpiricalError::WrongClassification);
    }
    assert_eq!(t.d, 1);
    let lnq = (t.q as f64).ln();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let n = (t.q as f64).powf(x).round();
        if n < 1.0 {
            return Err(EmpiricalError::EmptyRange);
        }
        let n = n as u64;
        let summary = prefix_moments(t, n)?;
        let x_actual = (n as f64).ln() / lnq;
        let value = to_f64(&summary.variance()) - to_f64(&report.v_t) * x_actual;
        rows.push(FluctuationSample {
            x: x_actual,
            n,
            psi1: value,
        });
    }
    let p = report.structure.final_period as f64;
    rows.sort_by(|a, b| {
        let ka = a.x.rem_euclid(p);
        let kb = b.x.rem_euclid(p);
        ka.partial_cmp(&kb).unwrap().then(a.x.partial_cmp(&b.x).unwrap())
    });
    Ok(rows)
}
