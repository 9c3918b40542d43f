//! Acceptance suite: one check per criterion, each printing a pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! table.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digitflux::dirichlet::{chi_k, fourier, hurwitz_zeta, SpecialFunctionContext};
use digitflux::empirical::{distribution_check, fluctuation_samples, prefix_moments, DistributionCheck};
use digitflux::fixtures;
use digitflux::rational::{rat, rat_frac, Rat};
use digitflux::recursion::{build_raw, compile, parse_recursion, well_posedness, CompileError, RecursionSystem, Rule};
use digitflux::spectral::{analyze, LimitLaw};
use digitflux::transducer::{evaluate, find_reset, structure, InputSymbol, Transducer};
use num_traits::Zero;

/// Reference values of the first 24 Fourier coefficients of the
/// paperfolding abelian-complexity fluctuation (10 published digits).
const PAPERFOLDING_COEFFS: [(f64, f64); 24] = [
    (1.5308151288, 0.0),
    (-0.0162585750, 0.0478637218),
    (0.0054521982, 0.0075023586),
    (-0.0028294724, 0.0086495903),
    (0.0036818110, 0.0021908312),
    (-0.0028244495, 0.0014519078),
    (-0.0008962222, 0.0030512180),
    (0.0015033904, 0.0013217107),
    (-0.0006766166, -0.0015392566),
    (0.0016074870, -0.0000503663),
    (-0.0006908394, 0.0018753575),
    (-0.0008974336, 0.0007658455),
    (-0.0002297481, 0.0009687657),
    (0.0006425378, 0.0006516706),
    (0.0000413217, -0.0003867709),
    (-0.0005632948, -0.0001843541),
    (0.0009051717, -0.0000476354),
    (-0.0004621780, -0.0000594551),
    (-0.0000127264, -0.0003100798),
    (0.0004112716, 0.0001954204),
    (-0.0000011706, 0.0004183253),
    (-0.0001027596, 0.0004091624),
    (-0.0004725451, 0.0004237489),
    (-0.0000596181, 0.0002323317),
];

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let sys = fixtures::paperfolding_system();
    let (t, report) = compile(&sys).map_err(|e| e.to_string())?;
    if !report.well_posed {
        return Err("paperfolding reported ill-posed".into());
    }
    let a = analyze(&t).map_err(|e| e.to_string())?;
    if a.e_t != rat_frac(8, 13) {
        return Err(format!("e_T = {} != 8/13", a.e_t));
    }
    if a.v_t != rat_frac(432, 2197) {
        return Err(format!("v_T = {} != 432/2197", a.v_t));
    }
    let target = Complex64::new(-0.7718445063, 1.1151425080).norm();
    let diff = (a.second_modulus - target).abs();
    if diff >= 1e-6 {
        return Err(format!("second modulus off by {diff:.2e}"));
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 10.0 {
        return Err(format!("took {elapsed:?} (budget 10 s)"));
    }
    Ok(format!(
        "e_T = 8/13, v_T = 432/2197, second modulus off by {diff:.1e}, {elapsed:?}"
    ))
}

fn criterion_2() -> Result<String, String> {
    let start = Instant::now();
    let t = fixtures::paperfolding();
    let ctx = SpecialFunctionContext::default();
    let result = fourier(&t, 23, &ctx).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, (re, im)) in PAPERFOLDING_COEFFS.iter().enumerate() {
        let c = result
            .coefficient(k as i64)
            .ok_or_else(|| format!("missing c_{k}"))?;
        let diff = (c.value - Complex64::new(*re, *im)).norm();
        worst = worst.max(diff);
        if diff >= 1e-6 {
            return Err(format!("c_{k} off by {diff:.2e}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 120.0 {
        return Err(format!("took {elapsed:?} (budget 2 min)"));
    }
    // stretch goal: 1e-8 at precision 50
    let ctx50 = SpecialFunctionContext {
        precision_digits: 50,
        ..Default::default()
    };
    let stretch = fourier(&t, 23, &ctx50).map_err(|e| e.to_string())?;
    for (k, (re, im)) in PAPERFOLDING_COEFFS.iter().enumerate() {
        let c = stretch.coefficient(k as i64).unwrap();
        let diff = (c.value - Complex64::new(*re, *im)).norm();
        if diff >= 1e-8 {
            return Err(format!("stretch: c_{k} off by {diff:.2e}"));
        }
    }
    Ok(format!(
        "all 24 reference coefficients within 1e-6 (worst {worst:.1e}); stretch 1e-8 holds; {elapsed:?}"
    ))
}

fn criterion_3() -> Result<String, String> {
    let start = Instant::now();
    for q in [2u32, 3, 4, 5] {
        let t = fixtures::sumdigits(q);
        let ctx = SpecialFunctionContext::default();
        let result = fourier(&t, 10, &ctx).map_err(|e| e.to_string())?;
        let lq = (q as f64).ln();
        let c0 = result.coefficient(0).unwrap().value;
        let c0_expect =
            (q as f64 - 1.0) / (2.0 * lq) * ((2.0 * std::f64::consts::PI).ln() - 1.0)
                - (q as f64 + 1.0) / 4.0;
        if (c0.re - c0_expect).abs() >= 1e-9 || c0.im.abs() >= 1e-9 {
            return Err(format!("q={q}: c_0 off by {:.2e}", (c0.re - c0_expect).abs()));
        }
        for k in 1..=10i64 {
            let chi = chi_k(k, 1, q);
            let zeta = hurwitz_zeta(chi, 1.0).map_err(|e| e.to_string())?;
            let expect = -(q as f64 - 1.0) * zeta / (chi * (Complex64::new(1.0, 0.0) + chi) * lq);
            let got = result.coefficient(k).unwrap().value;
            let diff = (got - expect).norm();
            if diff >= 1e-9 {
                return Err(format!("q={q}, k={k}: c_k off by {diff:.2e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 60.0 {
        return Err(format!("took {elapsed:?} (budget 1 min)"));
    }
    Ok(format!(
        "closed-form match within 1e-9 for q in 2..=5, k in 0..=10; {elapsed:?}"
    ))
}

fn criterion_4() -> Result<String, String> {
    let t = fixtures::sixperiodic();
    let report = analyze(&t).map_err(|e| e.to_string())?;
    if report.e_t != rat_frac(11, 8) {
        return Err(format!("e_T = {} != 11/8", report.e_t));
    }
    if report.structure.final_period != 6 {
        return Err(format!("final period = {}", report.structure.final_period));
    }
    Ok("e_T = 11/8 exactly, final period 6".into())
}

/// Deterministically well-posed random system: draw rules, then force every
/// recursion-digraph cycle to have zero output sum (the cycle structure does
/// not depend on the outputs) and anchor one initial value per class.
fn random_system(rng: &mut ChaCha8Rng, d: usize) -> Option<RecursionSystem> {
    let q: u32 = if d == 1 { *[2u32, 3].iter().nth(rng.gen_range(0..2)).unwrap() } else { 2 };
    let kappa: u32 = if d == 1 {
        rng.gen_range(1..=3)
    } else {
        rng.gen_range(1..=2)
    };
    let modulus = (q as i64).pow(kappa);
    let total = (modulus as usize).pow(d as u32);
    let mut rules = Vec::with_capacity(total);
    for _ in 0..total {
        let kappa_lambda = rng.gen_range(0..kappa);
        let r: Vec<i64> = (0..d)
            .map(|_| {
                if d == 1 {
                    rng.gen_range(-8..=8)
                } else {
                    rng.gen_range(0..=8)
                }
            })
            .collect();
        let t = rat(rng.gen_range(-4..=4));
        rules.push(Rule { kappa_lambda, r, t });
    }
    let mut sys = RecursionSystem {
        q,
        d,
        kappa,
        rules,
        initial_values: Default::default(),
    };
    let raw = build_raw(&sys).ok()?;
    let report = well_posedness(&raw, &sys);
    // zero the label of every rule participating in a cycle class
    for class in &report.classes {
        if class.len() == 1 && sys.apply(class.iter().next().unwrap()).is_none() {
            continue; // singleton with no outgoing arc
        }
        for l in class {
            let rank = {
                let lam: Vec<i64> = l.iter().map(|&x| x.rem_euclid(modulus)).collect();
                sys.lambda_rank(&lam)
            };
            sys.rules[rank].t = Rat::zero();
        }
    }
    // one representative per class, with a random value
    let raw = build_raw(&sys).ok()?;
    let report = well_posedness(&raw, &sys);
    for class in &report.classes {
        let rep = class.iter().next().unwrap().clone();
        sys.initial_values.insert(rep, rat(rng.gen_range(-3..=3)));
    }
    let raw = build_raw(&sys).ok()?;
    let report = well_posedness(&raw, &sys);
    report.well_posed.then_some(sys)
}

fn criterion_5() -> Result<String, String> {
    // paperfolding against the brute-force recursion
    let sys = fixtures::paperfolding_system();
    let (t, _) = compile(&sys).map_err(|e| e.to_string())?;
    for n in 0..4096i64 {
        let expect = sys.brute_force(&[n]).map_err(|e| e.to_string())?;
        if evaluate(&t, &[n]) != expect {
            return Err(format!("paperfolding mismatch at n = {n}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut produced_d1 = 0usize;
    let mut attempts = 0usize;
    while produced_d1 < 50 {
        attempts += 1;
        if attempts > 4000 {
            return Err("could not generate 50 well-posed d=1 systems".into());
        }
        let Some(sys) = random_system(&mut rng, 1) else {
            continue;
        };
        let (t, report) = match compile(&sys) {
            Ok(ok) => ok,
            Err(e) => return Err(format!("compile failed on well-posed system: {e}")),
        };
        // the initial-value classes are pairwise disjoint
        for (i, a) in report.classes.iter().enumerate() {
            for b in report.classes.iter().skip(i + 1) {
                if a.intersection(b).next().is_some() {
                    return Err("overlapping initial-value classes".into());
                }
            }
        }
        for n in 0..4096i64 {
            let expect = sys.brute_force(&[n]).map_err(|e| e.to_string())?;
            if evaluate(&t, &[n]) != expect {
                return Err(format!("d=1 sample {produced_d1} mismatch at n = {n}"));
            }
        }
        produced_d1 += 1;
    }

    let mut produced_d2 = 0usize;
    attempts = 0;
    while produced_d2 < 20 {
        attempts += 1;
        if attempts > 4000 {
            return Err("could not generate 20 well-posed d=2 systems".into());
        }
        let Some(sys) = random_system(&mut rng, 2) else {
            continue;
        };
        let (t, _) = match compile(&sys) {
            Ok(ok) => ok,
            Err(e) => return Err(format!("compile failed on well-posed d=2 system: {e}")),
        };
        for x in 0..32i64 {
            for y in 0..32i64 {
                let expect = sys.brute_force(&[x, y]).map_err(|e| e.to_string())?;
                if evaluate(&t, &[x, y]) != expect {
                    return Err(format!("d=2 sample {produced_d2} mismatch at ({x},{y})"));
                }
            }
        }
        produced_d2 += 1;
    }

    // ill-posed detector
    let ill = parse_recursion(fixtures::ILLPOSED_REC).map_err(|e| e.to_string())?;
    if !matches!(compile(&ill), Err(CompileError::IllPosed(_))) {
        return Err("ill-posed fixture not rejected".into());
    }
    Ok("paperfolding + 50 d=1 + 20 d=2 random systems agree with brute force; ill-posed detected".into())
}

fn random_transducer(rng: &mut ChaCha8Rng, d: usize) -> Transducer {
    let q: u32 = rng.gen_range(2..=if d == 1 { 4 } else { 2 });
    let states = rng.gen_range(1..=5usize);
    let outputs: [Rat; 6] = [
        rat(0),
        rat(1),
        rat(-1),
        rat(2),
        rat_frac(1, 2),
        rat_frac(-3, 2),
    ];
    let finals: Vec<Rat> = (0..states)
        .map(|_| outputs[rng.gen_range(0..outputs.len())].clone())
        .collect();
    let symbol_count = (q as usize).pow(d as u32);
    let transitions: Vec<Vec<(usize, Rat)>> = (0..states)
        .map(|_| {
            (0..symbol_count)
                .map(|_| {
                    (
                        rng.gen_range(0..states),
                        outputs[rng.gen_range(0..outputs.len())].clone(),
                    )
                })
                .collect()
        })
        .collect();
    Transducer::from_dense(q, d, finals, transitions)
}

fn criterion_6() -> Result<String, String> {
    // fixtures: exact equality against a running enumeration at every N
    for t in [
        fixtures::naf(),
        fixtures::signflip(),
        fixtures::sixperiodic(),
        fixtures::sumdigits(2),
        fixtures::sumdigits(5),
        fixtures::paperfolding(),
    ] {
        let mut sum = Rat::zero();
        let mut sum_sq = Rat::zero();
        for n in 1..=4096u64 {
            let v = evaluate(&t, &[(n - 1) as i64]);
            sum += v.clone();
            sum_sq += &v * &v;
            if n.is_power_of_two() || n % 583 == 0 {
                let m = prefix_moments(&t, n).map_err(|e| e.to_string())?;
                if m.sum != sum || m.sum_sq != sum_sq {
                    return Err(format!("fixture moment mismatch at N = {n}"));
                }
            }
        }
    }

    // 200 random d=1 transducers
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for i in 0..200 {
        let t = random_transducer(&mut rng, 1);
        let mut sum = Rat::zero();
        let mut sum_sq = Rat::zero();
        let checkpoints: Vec<u64> = (0..6).map(|_| rng.gen_range(1..=4096u64)).collect();
        for n in 1..=4096u64 {
            let v = evaluate(&t, &[(n - 1) as i64]);
            sum += v.clone();
            sum_sq += &v * &v;
            if checkpoints.contains(&n) || n == 4096 {
                let m = prefix_moments(&t, n).map_err(|e| e.to_string())?;
                if m.sum != sum || m.sum_sq != sum_sq {
                    return Err(format!("random d=1 transducer {i}: mismatch at N = {n}"));
                }
                if m.count != n.into() {
                    return Err(format!("random d=1 transducer {i}: count at N = {n}"));
                }
            }
        }
    }

    // 40 random d=2 transducers over [0, 32)^2
    for i in 0..40 {
        let t = random_transducer(&mut rng, 2);
        for n in [1u64, 2, 3, 7, 13, 32] {
            let m = prefix_moments(&t, n).map_err(|e| e.to_string())?;
            let mut sum = Rat::zero();
            let mut sum_sq = Rat::zero();
            for x in 0..n as i64 {
                for y in 0..n as i64 {
                    let v = evaluate(&t, &[x, y]);
                    sum += v.clone();
                    sum_sq += &v * &v;
                }
            }
            if m.sum != sum || m.sum_sq != sum_sq {
                return Err(format!("random d=2 transducer {i}: mismatch at N = {n}"));
            }
        }
    }

    // timing: the jet path at N = 2^40 on the paperfolding machine
    let t = fixtures::paperfolding();
    let _warm = prefix_moments(&t, 1u64 << 40).map_err(|e| e.to_string())?;
    let mut times = Vec::new();
    for _ in 0..9 {
        let s = Instant::now();
        let m = prefix_moments(&t, 1u64 << 40).map_err(|e| e.to_string())?;
        times.push(s.elapsed());
        if m.count != (1u64 << 40).into() {
            return Err("count mismatch at 2^40".into());
        }
    }
    times.sort();
    let median = times[times.len() / 2];
    if median.as_secs_f64() >= 1e-3 {
        return Err(format!("jet query at 2^40 took {median:?} (budget 1 ms)"));
    }
    Ok(format!(
        "exact equality on fixtures + 200 d=1 + 40 d=2 random transducers; 2^40 query {median:?}"
    ))
}

fn criterion_7() -> Result<String, String> {
    let t = fixtures::paperfolding();
    let report = analyze(&t).map_err(|e| e.to_string())?;
    let ctx = SpecialFunctionContext::default();
    let f = fourier(&t, 200, &ctx).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..500).map(|i| 10.0 + 2.0 * i as f64 / 499.0).collect();
    let rows = fluctuation_samples(&t, &report, &grid).map_err(|e| e.to_string())?;
    let mut sup = 0.0f64;
    for row in &rows {
        let diff = (row.psi1 - f.psi1(row.x)).abs();
        sup = sup.max(diff);
    }
    if sup > 0.01 {
        return Err(format!("sup deviation {sup:.4} > 0.01"));
    }
    Ok(format!(
        "sup |empirical - partial series (K=200)| = {sup:.5} <= 0.01 over 500 points in [10, 12]"
    ))
}

fn criterion_8() -> Result<String, String> {
    for (name, t) in [
        ("paperfolding", fixtures::paperfolding()),
        ("sum-of-digits q=2", fixtures::sumdigits(2)),
    ] {
        let report = analyze(&t).map_err(|e| e.to_string())?;
        let mut previous = f64::INFINITY;
        let mut last = f64::NAN;
        for exp in [16u32, 19, 22] {
            let n = 1u64 << exp;
            match distribution_check(&t, &report, n).map_err(|e| e.to_string())? {
                DistributionCheck::Quantitative { ks, .. } => {
                    if ks >= previous {
                        return Err(format!("{name}: KS not decreasing at N = 2^{exp} ({ks:.4} >= {previous:.4})"));
                    }
                    previous = ks;
                    last = ks;
                }
                DistributionCheck::DegenerateSupport { .. } => {
                    return Err(format!("{name}: unexpectedly refused quantitative mode"));
                }
            }
        }
        if !(last <= 0.2) {
            return Err(format!("{name}: KS at 2^22 is {last:.4} > 0.2"));
        }
    }
    Ok("KS strictly decreasing over {2^16, 2^19, 2^22} and <= 0.2 at 2^22 for both fixtures".into())
}

fn criterion_9() -> Result<String, String> {
    let t = fixtures::signflip();
    let report = analyze(&t).map_err(|e| e.to_string())?;
    if !report.e_t.is_zero() || !report.v_t.is_zero() {
        return Err("e_T or v_T nonzero".into());
    }
    if report.classification != LimitLaw::Degenerate {
        return Err(format!("classification {:?}", report.classification));
    }
    match distribution_check(&t, &report, 1 << 10).map_err(|e| e.to_string())? {
        DistributionCheck::DegenerateSupport { support, .. } => {
            let expect: Vec<(Rat, u128)> = vec![(rat(-1), 512), (rat(1), 512)];
            if support != expect {
                return Err("unexpected support".into());
            }
        }
        DistributionCheck::Quantitative { .. } => {
            return Err("quantitative KS mode not refused".into());
        }
    }
    Ok("e_T = v_T = 0, Degenerate, quantitative KS refused, support = {-1, +1}".into())
}

fn criterion_10() -> Result<String, String> {
    // reset word found and verified on paperfolding; (00001) verifies too
    let t = fixtures::paperfolding();
    let st = structure(&t);
    let word = st
        .reset_sequence
        .as_ref()
        .ok_or("no reset word found for paperfolding")?;
    let replay = |word: &[InputSymbol]| -> usize {
        let mut ends = std::collections::HashSet::new();
        for &s in &st.accessible {
            let mut cur = s;
            for sym in word {
                cur = t.step(cur, sym).0;
            }
            ends.insert(cur);
        }
        ends.len()
    };
    if replay(word) != 1 {
        return Err("found reset word does not verify".into());
    }
    let canonical: Vec<InputSymbol> = [1u32, 0, 0, 0, 0]
        .iter()
        .map(|&e| InputSymbol(vec![e]))
        .collect();
    if replay(&canonical) != 1 {
        return Err("(00001) does not synchronize".into());
    }

    // find_reset returns none whenever c > 1 or p > 1 across the corpus
    for (name, t) in [
        ("naf", fixtures::naf()),
        ("signflip", fixtures::signflip()),
        ("sixperiodic", fixtures::sixperiodic()),
        ("sumdigits-q2", fixtures::sumdigits(2)),
        ("sumdigits-q3", fixtures::sumdigits(3)),
        ("sumdigits-q4", fixtures::sumdigits(4)),
        ("sumdigits-q5", fixtures::sumdigits(5)),
        ("paperfolding", fixtures::paperfolding()),
    ] {
        let st = structure(&t);
        let c = st.final_components.len();
        let p = st.final_period;
        if (c > 1 || p > 1) && find_reset(&t).is_some() {
            return Err(format!("{name}: reset word found despite c = {c}, p = {p}"));
        }
    }

    // nondiff applicability for paperfolding (needs e_T from the analysis)
    let report = analyze(&t).map_err(|e| e.to_string())?;
    if report.structure.nondiff_applicable != Some(true) {
        return Err("paperfolding nondiff applicability not detected".into());
    }
    if report.e_t.is_integer() || !t.integer_outputs() {
        return Err("nondiff preconditions violated".into());
    }
    Ok("reset replay verified (incl. (00001)); no reset when c>1 or p>1; nondiff applicable".into())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> Result<String, String>)> = vec![
        ("1 paperfolding constants", criterion_1),
        ("2 reference-coefficient reproduction", criterion_2),
        ("3 Delange oracle", criterion_3),
        ("4 six-periodic example", criterion_4),
        ("5 compiler oracle", criterion_5),
        ("6 prefix-moment exactness", criterion_6),
        ("7 fluctuation coherence", criterion_7),
        ("8 distributional property", criterion_8),
        ("9 degenerate-case guardrails", criterion_9),
        ("10 structural suite", criterion_10),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {name}: pass — {detail}"),
            Err(detail) => {
                println!("criterion {name}: FAIL — {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
