//! Dirichlet-series machinery and the Fourier coefficients of the periodic
//! fluctuation in the expected value (d = 1).
//!
//! The state-wise output sums `b(n)` define the vector Dirichlet series
//! `H(z) = Σ_{n≥1} b(n)·n^{-z}`. Splitting the summation by the residue of
//! `n` modulo `q` and using `b(qn+ε) = M_ε·b(n) + δ_ε` gives the functional
//! equation
//!
//! ```text
//! (I - q^{-z} M)·H(z) = Σ_{ε≥1} b(ε)·ε^{-z}
//!                     + q^{-z} Σ_ε δ_ε·J(z, ε/q)
//!                     + Σ_ε M_ε · Σ_{n≥1} b(n)·((qn+ε)^{-z} - (qn)^{-z})
//! ```
//!
//! with `J(z, α) = ζ(z, α) - [α>0]·α^{-z}` (Hurwitz zeta). The last sum is
//! evaluated with explicit terms up to the cutoff `R` and a binomial-series
//! tail whose `Σ_{n>R} b(n)·n^{-z-m}` pieces come from evaluating `H` at the
//! shifted arguments: this is the textbook shift series
//! `Σ_m binom(-z,m)·q^{-z-m}·Σ_ε M_ε ε^m H(z+m)` resummed against the
//! explicit terms, which keeps every floating-point sum absolutely
//! convergent even for large `|Im z|`.
//!
//! The Fourier coefficients of the fluctuation follow as
//! `c_k = Res_{z=1+χ_k} w_k·H(z) / (1+χ_k)` for `k ≠ 0` and
//! `c_0 = -e_T/log q - i·w_0'·1 + Res_{z=1} w_0·H(z)`, with the residues
//! read off the functional equation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::rational::{to_f64, Rat};
use crate::spectral::{
    analyze, dominant_projection, exact_w0, matrices, w0_derivative_dot_one, AsymptoticReport,
    SpectralError,
};
use crate::transducer::{validate, InputSymbol, Transducer};

/// Numerical policy: working precision, explicit-term cutoff and binomial
/// tail depth. Increasing any of them tightens the reported error estimates.
#[derive(Clone, Debug)]
pub struct SpecialFunctionContext {
    /// Requested precision in decimal digits (capped by the f64 backend).
    pub precision_digits: u32,
    /// Number of explicit `b(n)` terms `R` in the Dirichlet sums.
    pub explicit_terms: usize,
    /// Maximum binomial shift depth `M_max`.
    pub binomial_depth: usize,
}

impl Default for SpecialFunctionContext {
    fn default() -> Self {
        SpecialFunctionContext {
            precision_digits: 30,
            explicit_terms: 1 << 16,
            binomial_depth: 40,
        }
    }
}

impl SpecialFunctionContext {
    /// Absolute tolerance goal for single series terms; the f64 backend
    /// cannot usefully go below ~1e-16.
    fn term_tol(&self) -> f64 {
        10f64.powi(-(self.precision_digits as i32)).max(1e-16)
    }
}

#[derive(Debug, Error)]
pub enum DirichletError {
    #[error("Fourier machinery is implemented for d = 1 only (got d = {0})")]
    Unsupported(usize),
    #[error("evaluation point is too close to a pole of H ({0})")]
    NearPole(Complex64),
    #[error("special function error: {0}")]
    Special(#[from] SpecialFnError),
    #[error("spectral analysis failed: {0}")]
    Spectral(#[from] SpectralError),
    #[error("transducer is invalid")]
    Invalid,
}

#[derive(Debug, Error)]
pub enum SpecialFnError {
    #[error("Hurwitz zeta has a pole at z = 1")]
    PoleAtOne,
    #[error("digamma needs a positive argument")]
    NonPositiveArgument,
    #[error("Hurwitz zeta parameter must lie in (0, 1]")]
    BadParameter,
}

/// Bernoulli numbers over factorials, `B_{2j}/(2j)!` for `j = 1..=10`.
const BERNOULLI_OVER_FACT: [f64; 10] = [
    8.333333333333333e-2,
    -1.388888888888889e-3,
    3.306878306878307e-5,
    -8.267195767195768e-7,
    2.08767569878681e-8,
    -5.284190138687493e-10,
    1.3382536530684679e-11,
    -3.389680296322583e-13,
    8.586062056277845e-15,
    -2.1748686985580617e-16,
];

/// Hurwitz zeta `ζ(z, α) = Σ_{r≥0} (r+α)^{-z}` for `α ∈ (0, 1]` by direct
/// summation plus Euler–Maclaurin correction. Accurate to roughly 1e-13
/// relative for the arguments used here.
pub fn hurwitz_zeta(z: Complex64, alpha: f64) -> Result<Complex64, SpecialFnError> {
    if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 {
        return Err(SpecialFnError::BadParameter);
    }
    if (z - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        return Err(SpecialFnError::PoleAtOne);
    }
    // enough head terms that the asymptotic tail converges for this |z|
    let n0 = (0.8 * z.norm()).ceil().max(24.0) as usize;
    let mut sum = Complex64::zero();
    for r in 0..n0 {
        sum += cpow(r as f64 + alpha, -z);
    }
    let a = n0 as f64 + alpha;
    // integral + midpoint correction
    sum += cpow(a, Complex64::new(1.0, 0.0) - z) / (z - 1.0);
    sum += 0.5 * cpow(a, -z);
    // Euler–Maclaurin tail: Σ_j B_2j/(2j)! · (z)_{2j-1} · a^{-z-2j+1}
    let mut poch = z; // (z)_1
    let mut power = cpow(a, -z - 1.0); // a^{-z-1}
    for (j, coef) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += *coef * poch * power;
        // (z)_{2j-1} -> (z)_{2j+1}
        let k = (2 * j + 1) as f64;
        poch *= (z + k) * (z + k + 1.0);
        power /= a * a;
    }
    Ok(sum)
}

/// Digamma function for positive real arguments: recurrence shift into the
/// asymptotic regime plus the Bernoulli series. `ψ(1) = -γ`.
pub fn digamma(x: f64) -> Result<f64, SpecialFnError> {
    if x <= 0.0 {
        return Err(SpecialFnError::NonPositiveArgument);
    }
    let mut x = x;
    let mut acc = 0.0f64;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    Ok(acc + x.ln() - 0.5 / x - series)
}

fn cpow(base: f64, z: Complex64) -> Complex64 {
    // base^z for base > 0
    let ln = base.ln();
    Complex64::from_polar((z.re * ln).exp(), z.im * ln)
}

/// Exact state-wise output sums `b(0..=r)` via the digit recursion
/// `b(qn+ε) = M_ε·b(n) + δ_ε` anchored at the final outputs.
pub fn h_vector_terms(t: &Transducer, r: usize) -> Vec<Vec<Rat>> {
    assert_eq!(t.d, 1, "the Dirichlet machinery is one-dimensional");
    let map = t.accessible();
    let dense: HashMap<usize, usize> = map.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = map.len();
    let step: Vec<Vec<(usize, Rat)>> = map
        .iter()
        .map(|&s| {
            (0..t.q)
                .map(|e| {
                    let (to, out) = t.step(s, &InputSymbol(vec![e]));
                    (dense[&to], out.clone())
                })
                .collect()
        })
        .collect();
    let mut b: Vec<Vec<Rat>> = Vec::with_capacity(r + 1);
    b.push(map.iter().map(|&s| t.final_output(s).clone()).collect());
    for m in 1..=r {
        let eps = m % t.q as usize;
        let prev = &b[m / t.q as usize];
        let mut row = Vec::with_capacity(n);
        for s in 0..n {
            let (to, out) = &step[s][eps];
            row.push(&prev[*to] + out);
        }
        b.push(row);
    }
    b
}

/// Shared evaluation engine: dense matrices, a float table of `b(n)` up to
/// the explicit cutoff, and the log-growth tail bound.
pub struct HSeriesEngine {
    q: u32,
    n: usize,
    m_f: DMatrix<f64>,
    /// Per state, per symbol ε: dense target and output.
    step: Vec<Vec<(usize, f64)>>,
    delta_eps: Vec<Vec<f64>>,
    b: Vec<f64>, // row-major: b[n·states + s]
    r_explicit: usize,
    m_max: usize,
    term_tol: f64,
    /// `‖b(n)‖_∞ ≤ beta·log_q n + gamma`.
    beta: f64,
    gamma: f64,
    eigenvalues: Vec<Complex64>,
}

impl HSeriesEngine {
    pub fn new(t: &Transducer, ctx: &SpecialFunctionContext) -> Result<Self, DirichletError> {
        if t.d != 1 {
            return Err(DirichletError::Unsupported(t.d));
        }
        if !validate(t).is_empty() {
            return Err(DirichletError::Invalid);
        }
        let tm = matrices(t);
        let n = tm.len();
        let map = &tm.state_map;
        let step: Vec<Vec<(usize, f64)>> = map
            .iter()
            .map(|&s| {
                (0..t.q)
                    .map(|e| {
                        let (to, out) = t.step(s, &InputSymbol(vec![e]));
                        (tm.dense_of[&to], to_f64(out))
                    })
                    .collect()
            })
            .collect();
        let delta_eps: Vec<Vec<f64>> = (0..t.q as usize)
            .map(|e| (0..n).map(|s| step[s][e].1).collect())
            .collect();

        let r = ctx.explicit_terms.max(16);
        let mut b = vec![0.0f64; (r + 1) * n];
        for (s, &orig) in map.iter().enumerate() {
            b[s] = to_f64(t.final_output(orig));
        }
        for m in 1..=r {
            let eps = m % t.q as usize;
            let prev = m / t.q as usize;
            for s in 0..n {
                let (to, out) = step[s][eps];
                b[m * n + s] = b[prev * n + to] + out;
            }
        }

        let o_max = t
            .delta
            .values()
            .map(|(_, o)| to_f64(&o.abs()))
            .fold(0.0f64, f64::max);
        let f_max = t
            .finals
            .iter()
            .flatten()
            .map(|f| to_f64(&f.abs()))
            .fold(0.0f64, f64::max);
        let m_f = tm.m_f64();
        let eigenvalues = m_f.complex_eigenvalues().iter().cloned().collect();

        Ok(HSeriesEngine {
            q: t.q,
            n,
            m_f,
            step,
            delta_eps,
            b,
            r_explicit: r,
            m_max: ctx.binomial_depth.max(4),
            term_tol: ctx.term_tol(),
            beta: o_max,
            gamma: o_max + f_max,
            eigenvalues,
        })
    }

    fn b_at(&self, m: usize) -> &[f64] {
        &self.b[m * self.n..(m + 1) * self.n]
    }

    /// Upper bound on `Σ_{n>R} ‖b(n)‖·n^{-σ}`.
    fn tail_bound(&self, r: usize, sigma: f64) -> f64 {
        if sigma <= 1.0 {
            return f64::INFINITY;
        }
        let lq = (self.q as f64).ln();
        let r_f = r as f64;
        let log_q_r = r_f.ln() / lq;
        r_f.powf(1.0 - sigma)
            * ((self.beta * log_q_r + self.gamma) / (sigma - 1.0)
                + self.beta / (lq * (sigma - 1.0).powi(2)))
    }

    /// `(M_ε x)[s] = x[target(s, ε)]`.
    fn apply_symbol(&self, eps: usize, x: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_fn(self.n, |s, _| x[self.step[s][eps].0])
    }

    /// Partial Dirichlet sum `Σ_{n=1}^{R} b(n)·n^{-z}`.
    fn partial(&self, z: Complex64) -> DVector<Complex64> {
        let mut acc = DVector::from_element(self.n, Complex64::zero());
        for m in 1..=self.r_explicit {
            let w = cpow(m as f64, -z);
            let row = self.b_at(m);
            for s in 0..self.n {
                acc[s] += row[s] * w;
            }
        }
        acc
    }

    /// Smallest relative distance of `q^z` to the spectrum of `M`; small
    /// values mean the functional-equation solve sits on a pole of `H`.
    fn pole_proximity(&self, z: Complex64) -> f64 {
        let qz = cpow(self.q as f64, z);
        self.eigenvalues
            .iter()
            .map(|lam| (Complex64::one() - lam / qz).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Per-base-point evaluation grid: memoizes `H` and the partial sums on the
/// shifted arguments `z0 + m`.
struct GridEval<'a> {
    engine: &'a HSeriesEngine,
    z0: Complex64,
    h_cache: RefCell<HashMap<i32, (DVector<Complex64>, f64)>>,
    p_cache: RefCell<HashMap<i32, DVector<Complex64>>>,
}

impl<'a> GridEval<'a> {
    fn new(engine: &'a HSeriesEngine, z0: Complex64) -> Self {
        GridEval {
            engine,
            z0,
            h_cache: RefCell::new(HashMap::new()),
            p_cache: RefCell::new(HashMap::new()),
        }
    }

    fn z(&self, shift: i32) -> Complex64 {
        self.z0 + shift as f64
    }

    fn partial(&self, shift: i32) -> DVector<Complex64> {
        if let Some(p) = self.p_cache.borrow().get(&shift) {
            return p.clone();
        }
        let p = self.engine.partial(self.z(shift));
        self.p_cache.borrow_mut().insert(shift, p.clone());
        p
    }

    /// `H(z0 + shift)` with an error estimate.
    fn h_at(&self, shift: i32) -> Result<(DVector<Complex64>, f64), DirichletError> {
        if let Some(hit) = self.h_cache.borrow().get(&shift) {
            return Ok(hit.clone());
        }
        let e = self.engine;
        let z = self.z(shift);
        let sigma = z.re;
        let direct_err = e.tail_bound(e.r_explicit, sigma);
        let value = if direct_err <= e.term_tol {
            (self.partial(shift), direct_err)
        } else {
            // solve (I - q^{-z} M) H(z) = rhs(z)
            let proximity = e.pole_proximity(z);
            if proximity < 1e-8 {
                return Err(DirichletError::NearPole(z));
            }
            let (rhs, rhs_err) = self.rhs(shift)?;
            let qmz = cpow(e.q as f64, -z);
            let mut a = DMatrix::from_fn(e.n, e.n, |i, j| -qmz * e.m_f[(i, j)]);
            for i in 0..e.n {
                a[(i, i)] += Complex64::one();
            }
            let sol = a.lu().solve(&rhs).ok_or(DirichletError::NearPole(z))?;
            (sol, rhs_err / proximity.min(1.0))
        };
        self.h_cache.borrow_mut().insert(shift, value.clone());
        Ok(value)
    }

    /// `T_ε(z) = Σ_{n≥1} b(n)·((qn+ε)^{-z} - (qn)^{-z})`: explicit terms up
    /// to `R`, then the binomial tail over `S_m = Σ_{n>R} b(n)·n^{-z-m}`.
    fn t_eps(&self, shift: i32, eps: u32) -> Result<(DVector<Complex64>, f64), DirichletError> {
        let e = self.engine;
        let z = self.z(shift);
        let q = e.q as f64;
        let mut acc = DVector::from_element(e.n, Complex64::zero());
        if eps == 0 {
            return Ok((acc, 0.0));
        }
        for m in 1..=e.r_explicit {
            let qn = q * m as f64;
            let w = cpow(qn + eps as f64, -z) - cpow(qn, -z);
            let row = e.b_at(m);
            for s in 0..e.n {
                acc[s] += row[s] * w;
            }
        }
        let qmz = cpow(q, -z);
        let ratio = eps as f64 / q;
        let mut binom = Complex64::one();
        let mut err = 1e-15 * acc.norm().max(1.0);
        for m in 1..=e.m_max {
            binom *= (-z - (m as f64 - 1.0)) / m as f64;
            let coef = qmz * binom * ratio.powi(m as i32);
            let sigma_m = z.re + m as f64;
            let term_bound = coef.norm() * e.tail_bound(e.r_explicit, sigma_m);
            if term_bound < e.term_tol {
                err += term_bound; // remaining terms decrease superlinearly
                break;
            }
            let (h, h_err) = self.h_at(shift + m as i32)?;
            let p = self.partial(shift + m as i32);
            let s_m = &h - &p;
            acc += s_m * coef;
            err += coef.norm() * (h_err + 1e-15 * (h.norm() + p.norm()));
            if m == e.m_max {
                err += term_bound;
            }
        }
        Ok((acc, err))
    }

    /// Right-hand side of the functional equation at `z0 + shift`.
    fn rhs(&self, shift: i32) -> Result<(DVector<Complex64>, f64), DirichletError> {
        let e = self.engine;
        let z = self.z(shift);
        let q = e.q as f64;
        let mut acc = DVector::from_element(e.n, Complex64::zero());
        let mut err = 0.0f64;

        for eps in 1..e.q as usize {
            let w = cpow(eps as f64, -z);
            let row = e.b_at(eps);
            for s in 0..e.n {
                acc[s] += row[s] * w;
            }
        }

        let qmz = cpow(q, -z);
        for eps in 0..e.q as usize {
            let j = j_dirichlet(z, eps as u32, e.q)?;
            for s in 0..e.n {
                acc[s] += qmz * j * e.delta_eps[eps][s];
            }
        }

        for eps in 1..e.q {
            let (t_e, t_err) = self.t_eps(shift, eps)?;
            let m_te = e.apply_symbol(eps as usize, &t_e);
            acc += m_te;
            err += t_err;
        }
        // float-rounding floor: the power computations lose roughly
        // eps·|Im z|·log n per term before cancellation
        err += 2e-15 * (1.0 + z.norm()) * (1.0 + acc.norm());
        Ok((acc, err))
    }
}

/// `J(z, ε/q) = Σ_{r≥1} (r + ε/q)^{-z}`.
fn j_dirichlet(z: Complex64, eps: u32, q: u32) -> Result<Complex64, SpecialFnError> {
    if eps == 0 {
        hurwitz_zeta(z, 1.0)
    } else {
        let alpha = eps as f64 / q as f64;
        Ok(hurwitz_zeta(z, alpha)? - cpow(alpha, -z))
    }
}

/// Evaluates the Dirichlet series `H(z)` with an error estimate, through the
/// functional equation (direct summation once the argument is far enough
/// right). Fails close to the poles `z = 1 + χ_k`.
pub fn h_series(
    t: &Transducer,
    z: Complex64,
    ctx: &SpecialFunctionContext,
) -> Result<(Vec<Complex64>, f64), DirichletError> {
    let engine = HSeriesEngine::new(t, ctx)?;
    let grid = GridEval::new(&engine, z);
    let (h, err) = grid.h_at(0)?;
    Ok((h.iter().cloned().collect(), err))
}

/// `χ_k = 2πik/(p·log q)`.
pub fn chi_k(k: i64, period: u64, q: u32) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * k as f64 / (period as f64 * (q as f64).ln()))
}

/// Dominant projection family `w_l` over dense accessible states, with the
/// exact steady vector in slot 0.
fn w_family(t: &Transducer) -> Result<(u64, Vec<Vec<Complex64>>), DirichletError> {
    let proj = dominant_projection(t)?;
    let w0 = exact_w0(t)?;
    let mut w = proj.w;
    w[0] = w0
        .iter()
        .map(|r| Complex64::new(to_f64(r), 0.0))
        .collect();
    Ok((proj.period, w))
}

/// Residue of `w_k·H(z)` at `z = 1 + χ_k` for `k ≠ 0`: the right-hand side
/// of the functional equation contracted with `w_k`, divided by `log q`.
pub fn residue_k(
    t: &Transducer,
    k: i64,
    ctx: &SpecialFunctionContext,
) -> Result<(Complex64, f64), DirichletError> {
    assert!(k != 0, "use double_pole_data for k = 0");
    let engine = HSeriesEngine::new(t, ctx)?;
    let (p, w) = w_family(t)?;
    residue_k_with(&engine, &w, p, k, t.q)
}

fn residue_k_with(
    engine: &HSeriesEngine,
    w: &[Vec<Complex64>],
    period: u64,
    k: i64,
    q: u32,
) -> Result<(Complex64, f64), DirichletError> {
    let z = Complex64::new(1.0, 0.0) + chi_k(k, period, q);
    let grid = GridEval::new(engine, z);
    let (rhs, rhs_err) = grid.rhs(0)?;
    let wk = &w[k.rem_euclid(period as i64) as usize];
    let dot: Complex64 = wk.iter().zip(rhs.iter()).map(|(a, b)| a * b).sum();
    let wk_norm: f64 = wk.iter().map(|c| c.norm()).sum();
    let lq = (q as f64).ln();
    Ok((dot / lq, rhs_err * wk_norm.max(1.0) / lq))
}

/// The `k = 0` double-pole data of `w_0·H`: returns the residue
/// `e_T/2 + h/log q` at `z = 1` together with the finite part `h`.
pub fn double_pole_data(
    t: &Transducer,
    ctx: &SpecialFunctionContext,
) -> Result<(Complex64, f64), DirichletError> {
    let engine = HSeriesEngine::new(t, ctx)?;
    let report = analyze(t)?;
    let (_, w) = w_family(t)?;
    let w0: Vec<f64> = w[0].iter().map(|c| c.re).collect();
    let (h, _err) = finite_part_h(&engine, &w0, &report)?;
    let res = to_f64(&report.e_t) / 2.0 + h / (t.q as f64).ln();
    Ok((Complex64::new(res, 0.0), h))
}

/// Finite part `h` of `w_0·RHS(z)` at `z = 1`: the digamma and `1/ε` pieces
/// come from the expansion of the Hurwitz terms around the pole, the rest is
/// the regular part of the functional equation.
fn finite_part_h(
    engine: &HSeriesEngine,
    w0: &[f64],
    report: &AsymptoticReport,
) -> Result<(f64, f64), DirichletError> {
    let e = engine;
    let q = e.q as f64;
    let lq = q.ln();
    let e_t = to_f64(&report.e_t);

    let mut h = -e_t * lq;

    // -q^{-1}·w_0·Σ_ε δ_ε·ψ(ε/q + [ε=0])
    for eps in 0..e.q as usize {
        let alpha = if eps == 0 { 1.0 } else { eps as f64 / q };
        let psi = digamma(alpha)?;
        let dot: f64 = w0.iter().zip(&e.delta_eps[eps]).map(|(a, b)| a * b).sum();
        h -= dot * psi / q;
    }

    // -w_0·Σ_{ε≥1} δ_ε/ε + w_0·Σ_{ε≥1} b(ε)/ε
    for eps in 1..e.q as usize {
        let dot_delta: f64 = w0.iter().zip(&e.delta_eps[eps]).map(|(a, b)| a * b).sum();
        h -= dot_delta / eps as f64;
        let row = e.b_at(eps);
        let dot_b: f64 = w0.iter().zip(row).map(|(a, b)| a * b).sum();
        h += dot_b / eps as f64;
    }

    // + w_0·Σ_ε M_ε·T_ε(1)
    let grid = GridEval::new(engine, Complex64::new(1.0, 0.0));
    let mut err = 0.0;
    for eps in 1..e.q {
        let (t_e, t_err) = grid.t_eps(0, eps)?;
        let m_te = e.apply_symbol(eps as usize, &t_e);
        let dot: Complex64 = w0
            .iter()
            .zip(m_te.iter())
            .map(|(a, b)| Complex64::new(*a, 0.0) * b)
            .sum();
        h += dot.re;
        err += t_err;
    }
    Ok((h, err))
}

/// The real term `-i·w_0'·1` of the zeroth Fourier coefficient, from the
/// exact reduced-resolvent solve.
pub fn w0_derivative_term(t: &Transducer) -> Result<f64, DirichletError> {
    Ok(to_f64(&w0_derivative_dot_one(t)?))
}

/// One Fourier coefficient with its error estimate.
#[derive(Clone, Debug)]
pub struct FourierCoefficient {
    pub k: i64,
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Ingredients of the `k = 0` coefficient, kept for diagnostics.
#[derive(Clone, Debug)]
pub struct C0Ingredients {
    pub e_t: f64,
    pub w0_derivative_term: f64,
    pub h: f64,
    pub residue_at_one: f64,
}

/// Fourier coefficients `c_k`, `|k| ≤ K`, of the p-periodic fluctuation of
/// the expected value, with a partial-series evaluator.
#[derive(Clone, Debug)]
pub struct FourierResult {
    pub period: u64,
    pub q: u32,
    pub coefficients: Vec<FourierCoefficient>,
    pub c0_ingredients: C0Ingredients,
}

impl FourierResult {
    pub fn coefficient(&self, k: i64) -> Option<&FourierCoefficient> {
        self.coefficients.iter().find(|c| c.k == k)
    }

    /// Partial Fourier series `Σ_k c_k·e^{2πikx/p}` at `x` (in units of
    /// `log_q N`); real because the coefficients come in conjugate pairs.
    pub fn psi1(&self, x: f64) -> f64 {
        let p = self.period as f64;
        self.coefficients
            .iter()
            .map(|c| {
                let phase = Complex64::from_polar(1.0, 2.0 * PI * c.k as f64 * x / p);
                (c.value * phase).re
            })
            .sum()
    }
}

/// Computes the Fourier coefficients `|k| ≤ K` of the fluctuation.
pub fn fourier(
    t: &Transducer,
    k_max: usize,
    ctx: &SpecialFunctionContext,
) -> Result<FourierResult, DirichletError> {
    if t.d != 1 {
        return Err(DirichletError::Unsupported(t.d));
    }
    let engine = HSeriesEngine::new(t, ctx)?;
    let report = analyze(t)?;
    let (p, w) = w_family(t)?;
    let lq = (t.q as f64).ln();
    let e_t = to_f64(&report.e_t);

    let w0: Vec<f64> = w[0].iter().map(|c| c.re).collect();
    let (h, h_err) = finite_part_h(&engine, &w0, &report)?;
    let res1 = e_t / 2.0 + h / lq;
    let w0d = w0_derivative_term(t)?;
    let c0 = -e_t / lq + w0d + res1;

    let mut coefficients = vec![FourierCoefficient {
        k: 0,
        value: Complex64::new(c0, 0.0),
        error_estimate: h_err / lq + 1e-13 * (1.0 + c0.abs()),
    }];

    let positive: Result<Vec<FourierCoefficient>, DirichletError> = (1..=k_max as i64)
        .into_par_iter()
        .map(|k| {
            let (res, err) = residue_k_with(&engine, &w, p, k, t.q)?;
            let denom = Complex64::new(1.0, 0.0) + chi_k(k, p, t.q);
            Ok(FourierCoefficient {
                k,
                value: res / denom,
                error_estimate: err / denom.norm(),
            })
        })
        .collect();
    let positive = positive?;

    // real outputs: c_{-k} is the conjugate of c_k
    for c in &positive {
        coefficients.push(FourierCoefficient {
            k: -c.k,
            value: c.value.conj(),
            error_estimate: c.error_estimate,
        });
    }
    coefficients.extend(positive);
    coefficients.sort_by_key(|c| c.k);

    Ok(FourierResult {
        period: p,
        q: t.q,
        coefficients,
        c0_ingredients: C0Ingredients {
            e_t,
            w0_derivative_term: w0d,
            h,
            residue_at_one: res1,
        },
    })
}
