//! Cross-route identity checks: every analytically derived quantity is
//! re-derived along an independent numerical route (least squares, Monte
//! Carlo, contour-integral spectral projections, finite differences,
//! discrete Fourier transforms of empirical samples).

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digitflux::dirichlet::{chi_k, fourier, h_series, residue_k, SpecialFunctionContext};
use digitflux::empirical::{fluctuation_samples, prefix_moments};
use digitflux::fixtures;
use digitflux::rational::{rat, to_f64, Rat};
use digitflux::spectral::{
    analyze, dominant_projection, matrices, steady_state_identity_check, w0_derivative_dot_one,
};
use digitflux::transducer::{evaluate, InputSymbol, Transducer};

/// Least-squares slope of `mean(N)` against `log_q N` over `N = q^8..q^20`
/// recovers `e_T` within 1e-3 for finally aperiodic fixtures (the fluctuation
/// is constant on integer exponents there).
#[test]
fn expectation_slope_recovers_e_t() {
    for (name, t) in [
        ("paperfolding", fixtures::paperfolding()),
        ("naf", fixtures::naf()),
        ("sumdigits-q2", fixtures::sumdigits(2)),
    ] {
        let report = analyze(&t).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for j in 8..=20u32 {
            let n = (t.q as u64).pow(j);
            let m = prefix_moments(&t, n).unwrap();
            xs.push(j as f64);
            ys.push(to_f64(&m.mean()));
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        let diff = (slope - to_f64(&report.e_t)).abs();
        assert!(diff < 1e-3, "{name}: slope {slope} vs e_T, diff {diff:.2e}");
    }
}

/// Hitting probabilities from the exact absorption system agree with a
/// seeded Monte Carlo simulation.
#[test]
fn hitting_probabilities_match_monte_carlo() {
    let t = fixtures::sixperiodic();
    let report = analyze(&t).unwrap();
    let st = &report.structure;
    let comp_of: std::collections::HashMap<usize, usize> = (0..st.final_components.len())
        .flat_map(|j| st.final_component_states(j).iter().map(move |&s| (s, j)))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let trials = 200_000usize;
    let mut hits = vec![0usize; st.final_components.len()];
    for _ in 0..trials {
        let mut state = t.initial;
        for _ in 0..40 {
            let eps = rng.gen_range(0..t.q);
            state = t.step(state, &InputSymbol(vec![eps])).0;
            if let Some(&j) = comp_of.get(&state) {
                hits[j] += 1;
                break;
            }
        }
    }
    for (j, c) in report.components.iter().enumerate() {
        let freq = hits[j] as f64 / trials as f64;
        let lambda = to_f64(&c.lambda);
        assert!(
            (freq - lambda).abs() < 5e-3,
            "component {j}: {freq} vs {lambda}"
        );
    }
}

/// The steady vector from power iteration matches the exact state-visit
/// distribution after enough steps, and the steady-state identity holds on
/// the whole corpus.
#[test]
fn steady_vector_and_identity() {
    let t = fixtures::paperfolding();
    let report = analyze(&t).unwrap();
    // exact propagation of the uniform-digit distribution for 64 steps
    let tm = matrices(&t);
    let n = tm.len();
    let m = tm.m_f64();
    let scale = 1.0 / t.q as f64;
    let mut x = vec![0.0f64; n];
    x[0] = 1.0;
    for _ in 0..64 {
        let mut y = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                y[j] += x[i] * m[(i, j)] * scale;
            }
        }
        x = y;
    }
    let total: f64 = report.w0.iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    for (a, b) in x.iter().zip(&report.w0) {
        assert!((a - b).abs() < 1e-8, "visit frequency {a} vs w0 {b}");
    }

    for t in [
        fixtures::naf(),
        fixtures::signflip(),
        fixtures::sixperiodic(),
        fixtures::sumdigits(3),
        fixtures::paperfolding(),
    ] {
        let report = analyze(&t).unwrap();
        assert!(steady_state_identity_check(&t, &report));
    }
}

/// Variance constants are non-negative on the corpus and on random machines.
#[test]
fn variance_constants_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut machines = vec![
        fixtures::naf(),
        fixtures::signflip(),
        fixtures::sixperiodic(),
        fixtures::sumdigits(4),
        fixtures::paperfolding(),
    ];
    for _ in 0..25 {
        let states = rng.gen_range(1..=4usize);
        let q = rng.gen_range(2..=3u32);
        let outputs = [rat(0), rat(1), rat(-1), rat(2)];
        let finals: Vec<Rat> = (0..states)
            .map(|_| outputs[rng.gen_range(0..outputs.len())].clone())
            .collect();
        let transitions: Vec<Vec<(usize, Rat)>> = (0..states)
            .map(|_| {
                (0..q as usize)
                    .map(|_| {
                        (
                            rng.gen_range(0..states),
                            outputs[rng.gen_range(0..outputs.len())].clone(),
                        )
                    })
                    .collect()
            })
            .collect();
        machines.push(Transducer::from_dense(q, 1, finals, transitions));
    }
    for t in machines {
        let report = analyze(&t).unwrap();
        for c in &report.components {
            assert!(c.b >= Rat::zero(), "negative b_j = {} in component", c.b);
        }
    }
}

/// Spectral projection of `e_1` at the dominant eigenvalue `q·e^{2πil/p}`
/// via a resolvent contour integral.
fn contour_projection(m: &DMatrix<Complex64>, center: Complex64, radius: f64) -> DMatrix<Complex64> {
    let n = m.nrows();
    let nodes = 96usize;
    let mut p = DMatrix::from_element(n, n, Complex64::zero());
    for k in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
        let offset = Complex64::from_polar(radius, theta);
        let z = center + offset;
        let mut a = -m.clone();
        for i in 0..n {
            a[(i, i)] += z;
        }
        let inv = a.lu().try_inverse().expect("resolvent is regular on the contour");
        // (1/2πi) ∮ (zI - M)^{-1} dz with dz = i·offset·dθ
        p += inv * (offset / nodes as f64);
    }
    p
}

/// The projection-derivative identity
/// `w_l·δ + q^d(e^{2πil/p} - 1)·(i·w_l'·1) = 0` for `l ≠ 0`, with `w_l'`
/// obtained from the reduced resolvent of the contour projection. Also
/// cross-checks the power-iteration `w_l` against `e_1·P_l`.
#[test]
fn dominant_projection_derivative_identity() {
    let t = fixtures::sixperiodic();
    let tm = matrices(&t);
    let n = tm.len();
    let proj = dominant_projection(&t).unwrap();
    let p = proj.period as usize;
    assert_eq!(p, 6);

    let m_c = DMatrix::from_fn(n, n, |i, j| Complex64::new(to_f64(&tm.m[(i, j)]), 0.0));
    let delta_mat = DMatrix::from_fn(n, n, |i, j| Complex64::new(to_f64(&tm.delta[(i, j)]), 0.0));
    let delta_vec: Vec<f64> = tm.delta_vec.iter().map(to_f64).collect();
    let eigs: Vec<Complex64> = tm.m_f64().complex_eigenvalues().iter().cloned().collect();

    for l in 1..p {
        let root = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 / p as f64);
        let lambda_l = 2.0 * root;
        // keep the contour clear of every other eigenvalue
        let min_dist = eigs
            .iter()
            .filter(|e| (*e - lambda_l).norm() > 1e-6)
            .map(|e| (e - lambda_l).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.4 * min_dist).min(0.5);
        let p_l = contour_projection(&m_c, lambda_l, radius);

        // power-iteration w_l agrees with e_1·P_l
        for j in 0..n {
            let direct = p_l[(0, j)];
            let dft = proj.w[l][j];
            assert!(
                (direct - dft).norm() < 1e-8,
                "l={l}, state {j}: {direct} vs {dft}"
            );
        }

        // reduced resolvent S_l = (M - λ_l + P_l)^{-1}(I - P_l)
        let mut shifted = m_c.clone() + &p_l;
        for i in 0..n {
            shifted[(i, i)] -= lambda_l;
        }
        let inv = shifted.lu().try_inverse().expect("shifted matrix invertible");
        let id = DMatrix::<Complex64>::identity(n, n);
        let s_l = &inv * (&id - &p_l);

        // i·w_l'·1 = e_1·(P_l Δ S_l + S_l Δ P_l)·1
        let ones = nalgebra::DVector::from_element(n, Complex64::one());
        let combo = (&p_l * &delta_mat * &s_l + &s_l * &delta_mat * &p_l) * ones;
        let iw_deriv = combo[0];

        let w_dot_delta: Complex64 = proj.w[l]
            .iter()
            .zip(&delta_vec)
            .map(|(w, d)| w * Complex64::new(*d, 0.0))
            .sum();
        let residual = w_dot_delta + 2.0 * (root - Complex64::one()) * iw_deriv;
        assert!(
            residual.norm() < 1e-8,
            "l={l}: identity residual {residual}"
        );
    }
}

/// The exact reduced-resolvent value `-i·w_0'·1` matches a central finite
/// difference of `t ↦ w_0(t)·1` computed from contour projections of the
/// symbol-weighted matrix.
#[test]
fn w0_derivative_matches_finite_difference() {
    for (name, t) in [("paperfolding", fixtures::paperfolding()), ("naf", fixtures::naf())] {
        let tm = matrices(&t);
        let n = tm.len();
        let qd = t.q as f64;
        // M(t) with entries e^{it·o} on transitions (dense accessible order)
        let m_at = |tt: f64| -> DMatrix<Complex64> {
            let mut m = DMatrix::from_element(n, n, Complex64::zero());
            for (i, &s) in tm.state_map.iter().enumerate() {
                for sym in t.symbols() {
                    let (to, out) = t.step(s, &sym);
                    let j = tm.dense_of[&to];
                    m[(i, j)] += Complex64::from_polar(1.0, tt * to_f64(out));
                }
            }
            m
        };
        let w0_dot_one = |tt: f64| -> Complex64 {
            let p0 = contour_projection(&m_at(tt), Complex64::new(qd, 0.0), 0.3);
            (0..n).map(|j| p0[(0, j)]).sum()
        };
        let h = 1e-4;
        // (f(h) - f(-h)) / (2ih) = -i·f'(0) = -i·w_0'·1
        let fd = (w0_dot_one(h) - w0_dot_one(-h)) / Complex64::new(0.0, 2.0 * h);
        let exact = to_f64(&w0_derivative_dot_one(&t).unwrap());
        assert!(
            (fd.re - exact).abs() < 1e-5 && fd.im.abs() < 1e-5,
            "{name}: finite difference {fd} vs exact {exact}"
        );
    }
}

/// `(1 - q^{1-z})·w_0·H(z)` stays numerically regular on shrinking rings
/// around the pole `z = 1 + χ_1` and approaches `Res·log q`.
#[test]
fn residue_ring_regularity() {
    let t = fixtures::paperfolding();
    let ctx = SpecialFunctionContext {
        explicit_terms: 1 << 13,
        ..Default::default()
    };
    let report = analyze(&t).unwrap();
    let w0 = &report.w0;
    let pole = Complex64::new(1.0, 0.0) + chi_k(1, 1, 2);
    let (res, _) = residue_k(&t, 1, &ctx).unwrap();
    let lq = 2f64.ln();

    let g_at = |z: Complex64| -> Complex64 {
        let (h, _) = h_series(&t, z, &ctx).unwrap();
        let dot: Complex64 = w0
            .iter()
            .zip(&h)
            .map(|(w, hh)| Complex64::new(*w, 0.0) * hh)
            .sum();
        // note: w_1 = w_0 here since the final period is 1
        (Complex64::one() - Complex64::from_polar(1.0, 0.0) * cpow_test(2.0, Complex64::one() - z))
            * dot
    };
    for phi in [0.0f64, 1.3, 2.8, 4.4] {
        let dir = Complex64::from_polar(1.0, phi);
        let g1 = g_at(pole + dir * 1e-3);
        let g2 = g_at(pole + dir * 1e-4);
        // the regular part drifts the value by O(r), so shrinking the ring
        // by 10x must shrink the distance to the limit accordingly
        assert!(
            (g1 - g2).norm() < 1e-2 * (1.0 + g2.norm()),
            "phi = {phi}: ring values {g1} vs {g2}"
        );
        assert!(
            (g2 - res * lq).norm() < 5e-3 * (1.0 + res.norm()),
            "phi = {phi}: ring value {g2} vs residue {res}"
        );
    }
}

fn cpow_test(base: f64, z: Complex64) -> Complex64 {
    let ln = base.ln();
    Complex64::from_polar((z.re * ln).exp(), z.im * ln)
}

/// Parseval-style sanity: the partial coefficient energy is dominated by the
/// empirical mean square of the fluctuation.
#[test]
fn parseval_inequality() {
    let t = fixtures::paperfolding();
    let report = analyze(&t).unwrap();
    let ctx = SpecialFunctionContext::default();
    let f = fourier(&t, 23, &ctx).unwrap();
    let energy: f64 = f.coefficients.iter().map(|c| c.value.norm_sqr()).sum();
    let grid: Vec<f64> = (0..256).map(|i| 17.0 + i as f64 / 256.0).collect();
    let rows = fluctuation_samples(&t, &report, &grid).unwrap();
    let mean_sq: f64 =
        rows.iter().map(|r| r.psi1 * r.psi1).sum::<f64>() / rows.len() as f64;
    assert!(
        energy <= mean_sq + 0.01,
        "energy {energy} vs empirical mean square {mean_sq}"
    );
}

/// Doubling the explicit-term cutoff moves each coefficient by less than its
/// reported error estimate.
#[test]
fn coefficients_stable_under_depth_doubling() {
    let t = fixtures::paperfolding();
    let base = SpecialFunctionContext {
        explicit_terms: 1 << 12,
        ..Default::default()
    };
    let doubled = SpecialFunctionContext {
        explicit_terms: 1 << 13,
        binomial_depth: 80,
        ..Default::default()
    };
    let fa = fourier(&t, 8, &base).unwrap();
    let fb = fourier(&t, 8, &doubled).unwrap();
    for k in -8..=8i64 {
        let a = fa.coefficient(k).unwrap();
        let b = fb.coefficient(k).unwrap();
        let delta = (a.value - b.value).norm();
        assert!(
            delta <= a.error_estimate.max(1e-12),
            "k = {k}: moved by {delta:.2e}, estimate {:.2e}",
            a.error_estimate
        );
    }
}

/// The computed coefficients agree with a discrete Fourier transform of
/// densely sampled empirical fluctuation values, for |k| ≤ 8.
#[test]
fn coefficients_match_empirical_dft() {
    // paperfolding: period 1, sample x in [17, 18)
    let t = fixtures::paperfolding();
    let report = analyze(&t).unwrap();
    let ctx = SpecialFunctionContext::default();
    let f = fourier(&t, 8, &ctx).unwrap();
    let samples = 512usize;
    let grid: Vec<f64> = (0..samples).map(|i| 17.0 + i as f64 / samples as f64).collect();
    let rows = fluctuation_samples(&t, &report, &grid).unwrap();
    for k in -8..=8i64 {
        let mut acc = Complex64::zero();
        for r in &rows {
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 * r.x);
            acc += phase * r.psi1;
        }
        acc /= rows.len() as f64;
        let c = f.coefficient(k).unwrap();
        let tol = 5e-3f64.max(c.error_estimate);
        assert!(
            (acc - c.value).norm() < tol,
            "paperfolding k = {k}: DFT {acc} vs {}",
            c.value
        );
    }

    // six-periodic: period 6, sample x in [12, 18)
    let t = fixtures::sixperiodic();
    let report = analyze(&t).unwrap();
    let f = fourier(&t, 8, &ctx).unwrap();
    assert_eq!(f.period, 6);
    let samples = 720usize;
    let grid: Vec<f64> = (0..samples)
        .map(|i| 12.0 + 6.0 * i as f64 / samples as f64)
        .collect();
    let rows = fluctuation_samples(&t, &report, &grid).unwrap();
    for k in -8..=8i64 {
        let mut acc = Complex64::zero();
        for r in &rows {
            let phase =
                Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 * r.x / 6.0);
            acc += phase * r.psi1;
        }
        acc /= rows.len() as f64;
        let c = f.coefficient(k).unwrap();
        let tol = 5e-3f64.max(c.error_estimate);
        assert!(
            (acc - c.value).norm() < tol,
            "sixperiodic k = {k}: DFT {acc} vs {}",
            c.value
        );
    }
}

/// `c_0` equals the empirical mean of the fluctuation over one period.
#[test]
fn c0_matches_empirical_mean() {
    let t = fixtures::paperfolding();
    let report = analyze(&t).unwrap();
    let ctx = SpecialFunctionContext::default();
    let f = fourier(&t, 0, &ctx).unwrap();
    let grid: Vec<f64> = (0..256).map(|i| 17.0 + i as f64 / 256.0).collect();
    let rows = fluctuation_samples(&t, &report, &grid).unwrap();
    let mean: f64 = rows.iter().map(|r| r.psi1).sum::<f64>() / rows.len() as f64;
    let c0 = f.coefficient(0).unwrap().value.re;
    assert!((mean - c0).abs() < 5e-3, "mean {mean} vs c_0 {c0}");
}

/// `H(2)` for the paperfolding machine against a million-term enumeration
/// plus the principal tail.
#[test]
fn h_at_two_matches_enumeration() {
    let t = fixtures::paperfolding();
    let ctx = SpecialFunctionContext::default();
    let (h, _) = h_series(&t, Complex64::new(2.0, 0.0), &ctx).unwrap();

    let r = 1_000_000u64;
    let mut partial = 0.0f64;
    for n in 1..=r {
        partial += to_f64(&evaluate(&t, &[n as i64])) / (n as f64 * n as f64);
    }
    // raw difference is the tail, bounded by ~2e-5 here
    assert!((h[0].re - partial).abs() < 2e-5);
    // with the principal tail (e_T·(log₂R + 1/ln 2) + c₀)/R the match is
    // much closer
    let report = analyze(&t).unwrap();
    let e_t = to_f64(&report.e_t);
    let c0 = 1.5308151288f64;
    let tail = (e_t * ((r as f64).ln() / 2f64.ln() + 1.0 / 2f64.ln()) + c0) / r as f64;
    assert!(
        (h[0].re - partial - tail).abs() < 1e-6,
        "H(2) = {}, partial + tail = {}",
        h[0].re,
        partial + tail
    );
    assert!(h[0].im.abs() < 1e-12);
}

/// The six-periodic fixture's fluctuation repeats with period 6 on the
/// integer grid, up to the shrinking error term.
#[test]
fn sixperiodic_fluctuation_has_period_six() {
    let t = fixtures::sixperiodic();
    let report = analyze(&t).unwrap();
    // past the 1/N transient (the non-dominant spectrum is empty here, so
    // samples settle geometrically)
    let grid: Vec<f64> = (12..=24).map(|j| j as f64).collect();
    let rows = fluctuation_samples(&t, &report, &grid).unwrap();
    let mut by_x: std::collections::HashMap<i64, f64> = std::collections::HashMap::new();
    for r in &rows {
        by_x.insert(r.x.round() as i64, r.psi1);
    }
    let lag_gap = |lag: i64| -> f64 {
        let mut worst = 0.0f64;
        for j in 12..=(24 - lag) {
            worst = worst.max((by_x[&j] - by_x[&(j + lag)]).abs());
        }
        worst
    };
    // lag-6 agreement beats every smaller lag by a wide margin
    let six = lag_gap(6);
    assert!(six < 0.01, "lag-6 gap {six}");
    for lag in 1..=5i64 {
        assert!(
            lag_gap(lag) > 10.0 * six,
            "lag {lag} gap {} vs lag-6 gap {six}",
            lag_gap(lag)
        );
    }
}

/// The fluctuation band converges: period-apart samples agree better at
/// larger cutoffs (error term O(N^{-ξ} log N)).
#[test]
fn fluctuation_band_tightens_with_cutoff() {
    let t = fixtures::paperfolding();
    let report = analyze(&t).unwrap();
    let band_width = |lo: f64| -> f64 {
        let grid: Vec<f64> = (0..64).map(|i| lo + i as f64 / 64.0).collect();
        let next: Vec<f64> = grid.iter().map(|x| x + 1.0).collect();
        let a = fluctuation_samples(&t, &report, &grid).unwrap();
        let b = fluctuation_samples(&t, &report, &next).unwrap();
        a.iter()
            .zip(&b)
            .map(|(u, v)| (u.psi1 - v.psi1).abs())
            .fold(0.0f64, f64::max)
    };
    let coarse = band_width(8.0);
    let fine = band_width(13.0);
    assert!(
        fine < coarse / 2.0,
        "band width did not shrink: {coarse} -> {fine}"
    );
}

/// Variance-fluctuation samples: bounded band for paperfolding, identically
/// zero for the zero transducer, and strongly autocorrelated when sorted by
/// the fractional part for the one-state digit counter.
#[test]
fn variance_fluctuation_behaviour() {
    use digitflux::empirical::variance_fluctuation;

    let t = fixtures::paperfolding();
    let report = analyze(&t).unwrap();
    let grid: Vec<f64> = (0..120).map(|i| 8.0 + 6.0 * i as f64 / 120.0).collect();
    let rows = variance_fluctuation(&t, &report, &grid).unwrap();
    for r in &rows {
        assert!(r.psi1.abs() < 2.0, "unbounded variance fluctuation {}", r.psi1);
    }

    let zero = Transducer::from_dense(2, 1, vec![rat(0)], vec![vec![(0, rat(0)), (0, rat(0))]]);
    let zrep = analyze(&zero).unwrap();
    for r in variance_fluctuation(&zero, &zrep, &[4.0, 5.5, 8.0]).unwrap() {
        assert_eq!(r.psi1, 0.0);
    }

    // one-state digit counter: rows come back sorted by x mod 1; adjacent
    // samples track each other closely (lag-1 autocorrelation > 0.9)
    let s2 = fixtures::sumdigits(2);
    let srep = analyze(&s2).unwrap();
    let grid: Vec<f64> = (0..160).map(|i| 10.0 + 4.0 * i as f64 / 160.0).collect();
    let rows = variance_fluctuation(&s2, &srep, &grid).unwrap();
    let vals: Vec<f64> = rows.iter().map(|r| r.psi1).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    let cov: f64 = vals
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum::<f64>();
    let rho = cov / var;
    assert!(rho > 0.9, "lag-1 autocorrelation {rho}");
}

/// Two-dimensional machine: the joint-digit AND counter has per-digit mean
/// 1/4 and variance 3/16, a single Gaussian limit, and a sane KS distance
/// from plain enumeration.
#[test]
fn two_dimensional_analysis() {
    use digitflux::empirical::{distribution_check, DistributionCheck};
    use digitflux::rational::rat_frac;
    use digitflux::spectral::LimitLaw;

    let sys = digitflux::recursion::parse_recursion(
        "recursion v1\nq 2\nd 2\n\
         a(2n+0,2n+0) = a(n,n)\na(2n+0,2n+1) = a(n,n)\n\
         a(2n+1,2n+0) = a(n,n)\na(2n+1,2n+1) = a(n,n) + 1\n\
         init a(0,0) = 0\n",
    )
    .unwrap();
    let (t, _) = digitflux::recursion::compile(&sys).unwrap();
    let report = analyze(&t).unwrap();
    assert_eq!(report.components.len(), 1);
    assert_eq!(report.e_t, rat_frac(1, 4));
    assert_eq!(report.v_t, rat_frac(3, 16));
    assert_eq!(report.classification, LimitLaw::SingleGaussian);
    assert!(steady_state_identity_check(&t, &report));

    match distribution_check(&t, &report, 64).unwrap() {
        DistributionCheck::Quantitative { ks, .. } => {
            assert!(ks < 0.35, "d=2 KS distance {ks}");
        }
        DistributionCheck::DegenerateSupport { .. } => panic!("expected quantitative mode"),
    }
}
