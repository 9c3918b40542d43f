//! Transition matrices, dominant eigenstructure and the asymptotic constants
//! of the expected value and variance.
//!
//! For a final component `C_j` with stationary row vector `u` (normalized so
//! `u·1 = 1`) the mean constant is `a_j = q^{-d}·u·δ` and the variance
//! constant comes from the second derivative of the dominant eigenvalue of
//! the symbol-weighted transition matrix at the origin, obtained by a
//! first-order eigenvector correction. Both are exact rationals. The hitting
//! probabilities `λ_j` solve the absorption system under uniform digits and
//! are exact as well; `e_T = Σ λ_j a_j` and `v_T = Σ λ_j b_j`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{rat, solve_exact, to_f64, Rat, RatMatrix};
use crate::transducer::{structure, validate, StructureReport, Transducer, Violation};

/// Per-symbol transition and output matrices over the accessible states,
/// re-indexed densely (the initial state is dense index 0).
#[derive(Clone, Debug)]
pub struct TransitionMatrices {
    pub q: u32,
    pub d: usize,
    /// Dense index -> original state index.
    pub state_map: Vec<usize>,
    /// Original state index -> dense index.
    pub dense_of: HashMap<usize, usize>,
    /// 0/1 adjacency per input symbol rank.
    pub per_symbol: Vec<RatMatrix>,
    /// Output-weighted matrix per input symbol rank.
    pub per_symbol_out: Vec<RatMatrix>,
    /// Output vector per symbol: s-th entry is the output on symbol ε from s.
    pub delta_eps: Vec<Vec<Rat>>,
    /// Aggregate adjacency `M = Σ_ε M_ε`.
    pub m: RatMatrix,
    /// Aggregate output matrix `Δ = Σ_ε Δ_ε`.
    pub delta: RatMatrix,
    /// Row sums of `Δ`: total output leaving each state.
    pub delta_vec: Vec<Rat>,
    /// Per-state sum of squared outputs.
    pub delta_sq_vec: Vec<Rat>,
}

impl TransitionMatrices {
    pub fn len(&self) -> usize {
        self.state_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state_map.is_empty()
    }

    pub fn m_f64(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| to_f64(&self.m[(i, j)]))
    }
}

/// Builds the transition matrices restricted to the accessible states.
pub fn matrices(t: &Transducer) -> TransitionMatrices {
    let state_map = t.accessible();
    let dense_of: HashMap<usize, usize> =
        state_map.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = state_map.len();
    let sc = t.symbol_count();

    let mut per_symbol = vec![RatMatrix::zeros(n, n); sc];
    let mut per_symbol_out = vec![RatMatrix::zeros(n, n); sc];
    let mut delta_eps = vec![vec![Rat::zero(); n]; sc];
    for (i, &s) in state_map.iter().enumerate() {
        for sym in t.symbols() {
            let r = sym.rank(t.q);
            let (to, out) = t.step(s, &sym);
            let j = dense_of[&to];
            per_symbol[r][(i, j)] += Rat::one();
            per_symbol_out[r][(i, j)] += out.clone();
            delta_eps[r][i] += out.clone();
        }
    }
    let mut m = RatMatrix::zeros(n, n);
    let mut delta = RatMatrix::zeros(n, n);
    for r in 0..sc {
        for i in 0..n {
            for j in 0..n {
                let a = per_symbol[r][(i, j)].clone();
                m[(i, j)] += a;
                let b = per_symbol_out[r][(i, j)].clone();
                delta[(i, j)] += b;
            }
        }
    }
    let delta_vec: Vec<Rat> = (0..n)
        .map(|i| (0..n).fold(Rat::zero(), |acc, j| acc + delta[(i, j)].clone()))
        .collect();
    let mut delta_sq_vec = vec![Rat::zero(); n];
    for (i, &s) in state_map.iter().enumerate() {
        for sym in t.symbols() {
            let (_, out) = t.step(s, &sym);
            delta_sq_vec[i] += out * out;
        }
    }

    TransitionMatrices {
        q: t.q,
        d: t.d,
        state_map,
        dense_of,
        per_symbol,
        per_symbol_out,
        delta_eps,
        m,
        delta,
        delta_vec,
        delta_sq_vec,
    }
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("transducer is invalid: {0:?}")]
    Invalid(Vec<Violation>),
    #[error("stationary/absorption system is singular (component detection bug)")]
    SingularSystem,
    #[error("no spectral gap: a non-dominant eigenvalue ties the dominant modulus")]
    NoSpectralGap,
    #[error("dominant eigenvalue count {found} does not match the expected {expected}")]
    DominantCount { expected: usize, found: usize },
    #[error("power iteration did not converge (second modulus too close to q^d)")]
    PowerIterationDiverged,
}

/// `q^d` as an exact rational.
fn qd(tm: &TransitionMatrices) -> Rat {
    rat((tm.q as i64).pow(tm.d as u32))
}

/// Stationary row vector of a final component: `u · M|_C = q^d · u`,
/// `u · 1 = 1`. Exact.
fn stationary(tm: &TransitionMatrices, comp: &[usize]) -> Result<Vec<Rat>, SpectralError> {
    let k = comp.len();
    let qd = qd(tm);
    // transpose system (M|_C^T - q^d I) u^T = 0 plus the normalization row
    let mut a = RatMatrix::zeros(k + 1, k);
    for (ri, &i) in comp.iter().enumerate() {
        for (ci, &j) in comp.iter().enumerate() {
            a[(ri, ci)] = tm.m[(j, i)].clone();
        }
        a[(ri, ri)] -= qd.clone();
    }
    for ci in 0..k {
        a[(k, ci)] = Rat::one();
    }
    let mut b = vec![Rat::zero(); k + 1];
    b[k] = Rat::one();
    solve_exact(&a, &b).ok_or(SpectralError::SingularSystem)
}

/// Mean and variance constants `(a_j, b_j)` of one final component, exact.
///
/// `a_j = q^{-d}·u·δ`; for `b_j` solve the reduced system
/// `(M|_C - q^d I)·y = (u·δ)·1 - δ` with `u·y = 0`, then
/// `b_j = (q^d·(u·δ² + 2·u·Δ·y) - (u·δ)²) / q^{2d}`.
pub fn component_mean_var(t: &Transducer, comp_states: &[usize]) -> Result<(Rat, Rat), SpectralError> {
    let tm = matrices(t);
    let comp: Vec<usize> = comp_states.iter().map(|s| tm.dense_of[s]).collect();
    component_mean_var_dense(&tm, &comp)
}

fn component_mean_var_dense(
    tm: &TransitionMatrices,
    comp: &[usize],
) -> Result<(Rat, Rat), SpectralError> {
    let k = comp.len();
    let qd = qd(tm);
    let u = stationary(tm, comp)?;

    let delta_c: Vec<Rat> = comp.iter().map(|&i| tm.delta_vec[i].clone()).collect();
    let delta_sq_c: Vec<Rat> = comp.iter().map(|&i| tm.delta_sq_vec[i].clone()).collect();
    let m1: Rat = u
        .iter()
        .zip(&delta_c)
        .map(|(a, b)| a * b)
        .fold(Rat::zero(), |x, y| x + y);
    let a_j = m1.clone() / qd.clone();

    // (M|_C - q^d I) y = m1·1 - δ|_C, with u·y = 0
    let mut sys = RatMatrix::zeros(k + 1, k);
    for (ri, &i) in comp.iter().enumerate() {
        for (ci, &j) in comp.iter().enumerate() {
            sys[(ri, ci)] = tm.m[(i, j)].clone();
        }
        sys[(ri, ri)] -= qd.clone();
    }
    for ci in 0..k {
        sys[(k, ci)] = u[ci].clone();
    }
    let mut rhs: Vec<Rat> = delta_c.iter().map(|d| m1.clone() - d.clone()).collect();
    rhs.push(Rat::zero());
    let y = solve_exact(&sys, &rhs).ok_or(SpectralError::SingularSystem)?;

    // u·Δ|_C·y
    let mut dy = vec![Rat::zero(); k];
    for (ri, &i) in comp.iter().enumerate() {
        for (ci, &j) in comp.iter().enumerate() {
            dy[ri] += tm.delta[(i, j)].clone() * y[ci].clone();
        }
    }
    let u_dy: Rat = u
        .iter()
        .zip(&dy)
        .map(|(a, b)| a * b)
        .fold(Rat::zero(), |x, y| x + y);
    let u_dsq: Rat = u
        .iter()
        .zip(&delta_sq_c)
        .map(|(a, b)| a * b)
        .fold(Rat::zero(), |x, y| x + y);

    let b_j = (qd.clone() * (u_dsq + rat(2) * u_dy) - m1.clone() * m1)
        / (qd.clone() * qd);
    Ok((a_j, b_j))
}

/// Exact hitting probabilities of the final components when starting in the
/// initial state, under uniform random digits (each transition has
/// probability `q^{-d}`).
pub fn hitting_probabilities(t: &Transducer) -> Result<Vec<Rat>, SpectralError> {
    let tm = matrices(t);
    let st = structure(t);
    hitting_probabilities_dense(&tm, &st)
}

fn hitting_probabilities_dense(
    tm: &TransitionMatrices,
    st: &StructureReport,
) -> Result<Vec<Rat>, SpectralError> {
    let n = tm.len();
    let qd = qd(tm);
    let c = st.final_components.len();

    let mut comp_of_dense: Vec<Option<usize>> = vec![None; n];
    for (j, _) in st.final_components.iter().enumerate() {
        for &s in st.final_component_states(j) {
            comp_of_dense[tm.dense_of[&s]] = Some(j);
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&i| comp_of_dense[i].is_none()).collect();
    let t_index: HashMap<usize, usize> =
        transient.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let mut lambdas = vec![Rat::zero(); c];
    for j in 0..c {
        if transient.is_empty() {
            // the initial state already sits in a final component
            let init_comp = comp_of_dense[0].expect("no transient states");
            lambdas[j] = if init_comp == j { Rat::one() } else { Rat::zero() };
            continue;
        }
        let k = transient.len();
        // (q^d I - M_TT) h = M_{T,Cj}·1
        let mut a = RatMatrix::zeros(k, k);
        let mut b = vec![Rat::zero(); k];
        for (ri, &i) in transient.iter().enumerate() {
            a[(ri, ri)] = qd.clone();
            for jj in 0..n {
                let w = tm.m[(i, jj)].clone();
                if w.is_zero() {
                    continue;
                }
                match comp_of_dense[jj] {
                    None => {
                        let ci = t_index[&jj];
                        a[(ri, ci)] -= w;
                    }
                    Some(cj) if cj == j => b[ri] += w,
                    Some(_) => {}
                }
            }
        }
        let h = solve_exact(&a, &b).ok_or(SpectralError::SingularSystem)?;
        lambdas[j] = match comp_of_dense[0] {
            None => h[t_index[&0]].clone(),
            Some(cj) if cj == j => Rat::one(),
            Some(_) => Rat::zero(),
        };
    }
    let total: Rat = lambdas.iter().cloned().fold(Rat::zero(), |a, b| a + b);
    debug_assert!(total.is_one(), "hitting probabilities must sum to 1");
    Ok(lambdas)
}

/// Exact steady vector `w_0 = Σ_j λ_j·u_j` (stationary vectors padded by
/// zeros outside their component), over the dense accessible states.
pub fn exact_w0(t: &Transducer) -> Result<Vec<Rat>, SpectralError> {
    let tm = matrices(t);
    let st = structure(t);
    let lambdas = hitting_probabilities_dense(&tm, &st)?;
    let mut w0 = vec![Rat::zero(); tm.len()];
    for (j, lambda) in lambdas.iter().enumerate() {
        let comp: Vec<usize> = st
            .final_component_states(j)
            .iter()
            .map(|s| tm.dense_of[s])
            .collect();
        let u = stationary(&tm, &comp)?;
        for (ci, &i) in comp.iter().enumerate() {
            w0[i] += lambda * &u[ci];
        }
    }
    Ok(w0)
}

/// The real value `-i·w_0'·1` via the reduced resolvent: `y` is the unique
/// solution of `(M - q^d I)·y = (I - P_0)·δ` with `P_0·y = 0`, where `P_0`
/// is the spectral projection onto the eigenvalue `q^d`; the value is
/// `-e_1·y`. Exact.
pub fn w0_derivative_dot_one(t: &Transducer) -> Result<Rat, SpectralError> {
    let tm = matrices(t);
    let st = structure(t);
    let n = tm.len();
    let qd = qd(&tm);
    let c = st.final_components.len();

    // right eigenvectors: absorption probability vectors v_j
    // left eigenvectors: padded stationary vectors u_j, with u_j·v_j = 1
    let lambdas = hitting_probabilities_dense(&tm, &st)?; // also validates structure
    let _ = lambdas;
    let mut us: Vec<Vec<Rat>> = Vec::with_capacity(c);
    let mut vs: Vec<Vec<Rat>> = Vec::with_capacity(c);
    for j in 0..c {
        let comp: Vec<usize> = st
            .final_component_states(j)
            .iter()
            .map(|s| tm.dense_of[s])
            .collect();
        let u_c = stationary(&tm, &comp)?;
        let mut u = vec![Rat::zero(); n];
        for (ci, &i) in comp.iter().enumerate() {
            u[i] = u_c[ci].clone();
        }
        us.push(u);
        vs.push(absorption_vector(&tm, &st, j)?);
    }

    // (I - P_0)·δ with P_0 x = Σ_j v_j (u_j·x)
    let mut rhs: Vec<Rat> = tm.delta_vec.clone();
    for j in 0..c {
        let coef: Rat = us[j]
            .iter()
            .zip(&tm.delta_vec)
            .map(|(a, b)| a * b)
            .fold(Rat::zero(), |x, y| x + y);
        for i in 0..n {
            rhs[i] -= &coef * &vs[j][i];
        }
    }

    // solve (M - q^d I) y = rhs with u_j·y = 0 for all j
    let mut a = RatMatrix::zeros(n + c, n);
    for i in 0..n {
        for jj in 0..n {
            a[(i, jj)] = tm.m[(i, jj)].clone();
        }
        a[(i, i)] -= qd.clone();
    }
    for j in 0..c {
        for i in 0..n {
            a[(n + j, i)] = us[j][i].clone();
        }
    }
    let mut b = rhs;
    b.extend(std::iter::repeat(Rat::zero()).take(c));
    let y = solve_exact(&a, &b).ok_or(SpectralError::SingularSystem)?;
    Ok(-y[0].clone())
}

/// Absorption probabilities into component `j` from every dense state (a
/// right eigenvector of `M` for the eigenvalue `q^d`).
fn absorption_vector(
    tm: &TransitionMatrices,
    st: &StructureReport,
    j: usize,
) -> Result<Vec<Rat>, SpectralError> {
    let n = tm.len();
    let qd = qd(tm);
    let mut comp_of_dense: Vec<Option<usize>> = vec![None; n];
    for (cj, _) in st.final_components.iter().enumerate() {
        for &s in st.final_component_states(cj) {
            comp_of_dense[tm.dense_of[&s]] = Some(cj);
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&i| comp_of_dense[i].is_none()).collect();
    let t_index: HashMap<usize, usize> =
        transient.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut v = vec![Rat::zero(); n];
    for i in 0..n {
        if comp_of_dense[i] == Some(j) {
            v[i] = Rat::one();
        }
    }
    if transient.is_empty() {
        return Ok(v);
    }
    let k = transient.len();
    let mut a = RatMatrix::zeros(k, k);
    let mut b = vec![Rat::zero(); k];
    for (ri, &i) in transient.iter().enumerate() {
        a[(ri, ri)] = qd.clone();
        for jj in 0..n {
            let w = tm.m[(i, jj)].clone();
            if w.is_zero() {
                continue;
            }
            match comp_of_dense[jj] {
                None => {
                    let ci = t_index[&jj];
                    a[(ri, ci)] -= w;
                }
                Some(cj) if cj == j => b[ri] += w,
                Some(_) => {}
            }
        }
    }
    let h = solve_exact(&a, &b).ok_or(SpectralError::SingularSystem)?;
    for (ri, &i) in transient.iter().enumerate() {
        v[i] = h[ri].clone();
    }
    Ok(v)
}

/// Dominant projections of the initial indicator: `w_l` for `l mod p`,
/// computed by power iteration over one residue system mod `p` followed by a
/// discrete Fourier transform. `w[0]` is entrywise non-negative with
/// `w[0]·1 = 1`.
#[derive(Clone, Debug)]
pub struct DominantProjections {
    pub period: u64,
    /// `w[l]` over dense accessible states, `l = 0..p`.
    pub w: Vec<Vec<Complex64>>,
}

pub fn dominant_projection(t: &Transducer) -> Result<DominantProjections, SpectralError> {
    let tm = matrices(t);
    let st = structure(t);
    dominant_projection_dense(&tm, &st, 1e-13, 200_000)
}

fn dominant_projection_dense(
    tm: &TransitionMatrices,
    st: &StructureReport,
    tol: f64,
    max_iter: usize,
) -> Result<DominantProjections, SpectralError> {
    let n = tm.len();
    let p = st.final_period as usize;
    let m = tm.m_f64();
    let scale = 1.0 / (tm.q as f64).powi(tm.d as i32);

    let mut x = vec![0.0f64; n];
    x[0] = 1.0;
    let step = |x: &Vec<f64>| -> Vec<f64> {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..n {
                y[j] += xi * m[(i, j)] * scale;
            }
        }
        y
    };

    // hat_w[r] is the limit of e_1^T (M/q^d)^(mp + r)
    let mut prev_block: Option<Vec<Vec<f64>>> = None;
    let mut hat: Option<Vec<Vec<f64>>> = None;
    let mut iter = 0usize;
    'outer: while iter < max_iter {
        let mut block = Vec::with_capacity(p);
        for _ in 0..p {
            block.push(x.clone());
            x = step(&x);
            iter += 1;
        }
        if let Some(prev) = &prev_block {
            let diff = prev
                .iter()
                .zip(&block)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (u - v).abs()))
                .fold(0.0f64, f64::max);
            if diff < tol {
                hat = Some(block);
                break 'outer;
            }
        }
        prev_block = Some(block);
    }
    let hat = hat.ok_or(SpectralError::PowerIterationDiverged)?;

    // the r-th block entry corresponds to exponents ≡ r + iter_start mod p;
    // blocks always start at a multiple of p since we consume p per round
    let mut w = vec![vec![Complex64::new(0.0, 0.0); n]; p];
    for (l, wl) in w.iter_mut().enumerate() {
        for (r, hr) in hat.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (l as f64) * (r as f64) / (p as f64);
            let rot = Complex64::from_polar(1.0, phase);
            for i in 0..n {
                wl[i] += rot * hr[i] / (p as f64);
            }
        }
    }
    Ok(DominantProjections {
        period: st.final_period,
        w,
    })
}

/// Limit-law classification of the output sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitLaw {
    /// All `a_j` equal, more than one component or some `b_j = 0`.
    GaussianMixture,
    /// One final component with positive variance constant.
    SingleGaussian,
    /// All variance constants vanish.
    Degenerate,
    /// The `a_j` differ; the variance grows like `log² N`.
    VarianceThetaLogSquared,
}

/// Asymptotics of one final component.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    /// Original state indices of the component.
    pub states: Vec<usize>,
    pub period: u64,
    pub a: Rat,
    pub b: Rat,
    pub lambda: Rat,
}

/// The full asymptotic report: exact constants, spectral gap and limit law.
#[derive(Clone, Debug)]
pub struct AsymptoticReport {
    pub components: Vec<ComponentReport>,
    pub e_t: Rat,
    pub v_t: Rat,
    /// Modulus of the largest non-dominant eigenvalue of `M` (0 when none).
    pub second_modulus: f64,
    /// Error-term exponent `ξ = d - log_q(second_modulus)`, the open
    /// supremum; `+∞` when the non-dominant spectrum is empty.
    pub xi: f64,
    /// True when all eigenvalues are dominant: the asymptotic expansion has
    /// no error term.
    pub exact_no_error_term: bool,
    pub classification: LimitLaw,
    /// Steady probabilities from power iteration, dense accessible order.
    pub w0: Vec<f64>,
    pub structure: StructureReport,
}

/// Full analysis: structure, exact constants, spectrum, classification.
pub fn analyze(t: &Transducer) -> Result<AsymptoticReport, SpectralError> {
    let violations = validate(t);
    if !violations.is_empty() {
        return Err(SpectralError::Invalid(violations));
    }
    let tm = matrices(t);
    let mut st = structure(t);
    let lambdas = hitting_probabilities_dense(&tm, &st)?;

    let mut components = Vec::new();
    for (j, lambda) in lambdas.iter().enumerate() {
        let comp_orig = st.final_component_states(j).to_vec();
        let comp: Vec<usize> = comp_orig.iter().map(|s| tm.dense_of[s]).collect();
        let (a, b) = component_mean_var_dense(&tm, &comp)?;
        components.push(ComponentReport {
            states: comp_orig,
            period: st.component_periods[j],
            a,
            b,
            lambda: lambda.clone(),
        });
    }
    let e_t: Rat = components
        .iter()
        .map(|c| &c.lambda * &c.a)
        .fold(Rat::zero(), |x, y| x + y);
    let v_t: Rat = components
        .iter()
        .map(|c| &c.lambda * &c.b)
        .fold(Rat::zero(), |x, y| x + y);

    // full spectrum of M at the origin
    let qd_f = (t.q as f64).powi(t.d as i32);
    let eigs = tm.m_f64().complex_eigenvalues();
    let expected_dominant: usize = st.component_periods.iter().map(|&p| p as usize).sum();
    let mut non_dominant: Vec<f64> = Vec::new();
    let mut dominant_found = 0usize;
    for e in eigs.iter() {
        if (e.norm() - qd_f).abs() <= 1e-9 * qd_f {
            dominant_found += 1;
        } else {
            non_dominant.push(e.norm());
        }
    }
    if dominant_found != expected_dominant {
        return Err(SpectralError::DominantCount {
            expected: expected_dominant,
            found: dominant_found,
        });
    }
    let second_modulus = non_dominant.iter().cloned().fold(0.0f64, f64::max);
    if second_modulus > 0.0 && (qd_f - second_modulus) <= 1e-12 * qd_f {
        return Err(SpectralError::NoSpectralGap);
    }
    let exact_no_error_term = non_dominant.is_empty();
    let xi = if second_modulus == 0.0 {
        f64::INFINITY
    } else {
        t.d as f64 - second_modulus.ln() / (t.q as f64).ln()
    };

    let all_a_equal = components.windows(2).all(|w| w[0].a == w[1].a);
    let all_b_zero = components.iter().all(|c| c.b.is_zero());
    let classification = if !all_a_equal {
        LimitLaw::VarianceThetaLogSquared
    } else if components.len() == 1 && !v_t.is_zero() {
        LimitLaw::SingleGaussian
    } else if all_b_zero {
        LimitLaw::Degenerate
    } else {
        LimitLaw::GaussianMixture
    };

    let proj = dominant_projection_dense(&tm, &st, 1e-13, 200_000)?;
    let w0: Vec<f64> = proj.w[0].iter().map(|c| c.re).collect();

    st.nondiff_applicable = Some(st.nondiff_structural && !e_t.is_integer());

    Ok(AsymptoticReport {
        components,
        e_t,
        v_t,
        second_modulus,
        xi,
        exact_no_error_term,
        classification,
        w0,
        structure: st,
    })
}

/// Steady-state identity `q^{-d}·w_0·δ = e_T`, checked with the
/// power-iteration `w_0` against the exact constant. True within `1e-10`.
pub fn steady_state_identity_check(t: &Transducer, report: &AsymptoticReport) -> bool {
    let tm = matrices(t);
    let qd_f = (t.q as f64).powi(t.d as i32);
    let lhs: f64 = report
        .w0
        .iter()
        .zip(&tm.delta_vec)
        .map(|(w, d)| w * to_f64(d))
        .sum::<f64>()
        / qd_f;
    (lhs - to_f64(&report.e_t)).abs() < 1e-10
}

/// Second-modulus reference for a 2x2 check used in tests.
pub fn eigenvalue_moduli(t: &Transducer) -> Vec<f64> {
    let tm = matrices(t);
    let mut mods: Vec<f64> = tm
        .m_f64()
        .complex_eigenvalues()
        .iter()
        .map(|e| e.norm())
        .collect();
    mods.sort_by(|a, b| b.partial_cmp(a).unwrap());
    mods
}
