//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use invkit_core::bounds::{cycle_sum_rational, valid_grid};
use invkit_core::exact::for_each_permutation;
use invkit_core::matrix::order_by_iteration;
use invkit_core::monte_carlo::matrix_event;
use invkit_core::sampler::{gl_generators, sl_generators};
use invkit_core::{
    a_not, bound_chain, bound_chain_alternating, c_not, enumerate_group,
    estimate_matrix_proportion, estimate_perm_proportion, exponent_multiple, family_constants,
    find_small_involution, involution_from_element, p_exact, p_tilde_exact, s_not, theorem_check,
    validate_hypotheses, Epsilon, ExactProportion, Family, FiniteField, GroupSpec, Matrix, Parity,
    PermGroup, PermSource, Permutation,
};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Grid of the theorem checks.
const GRID_N: [u64; 6] = [40, 60, 80, 100, 150, 200];
const GRID_DEN: u64 = 50;
const CONFIDENCE: f64 = 0.99;

const C4_SAMPLES: u64 = 100_000;
const C4_DEGREE: usize = 50;

const C5_TRIALS: u64 = 20_000;

const C6_DIM: usize = 60;
const C6_Q: u64 = 3;
const C6_SAMPLES: u64 = 5000;
const C6_SEEDS: u64 = 20;
const C6_ALLOWED_MISSES: usize = 1;

const C7_DEGREE: usize = 100;
const C7_RUNS: u64 = 100;
const C7_MAX_MEAN_TRIES: f64 = 60.0;

const C8_REPETITIONS: u64 = 100;
const C8_TRIALS: u64 = 10_000;
const C8_MIN_COVERED: usize = 95;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn grid() -> Vec<(u64, Epsilon)> {
    GRID_N
        .iter()
        .flat_map(|&n| valid_grid(n, GRID_DEN).into_iter().map(move |e| (n, e)))
        .collect()
}

/// Counts of even-order permutations of `S_n` by the support of their
/// half-order power, split by parity, from full enumeration.
fn brute_support_counts(n: usize) -> (Vec<u64>, Vec<u64>) {
    let (mut even, mut odd) = (vec![0u64; n + 1], vec![0u64; n + 1]);
    for_each_permutation(n, PermGroup::Sn, |g| {
        if let Some(t) = g.involution_power() {
            match g.parity() {
                Parity::Even => even[t.support_size()] += 1,
                Parity::Odd => odd[t.support_size()] += 1,
            }
        }
    });
    (even, odd)
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for n in 1..=9usize {
        let (even, odd) = brute_support_counts(n);
        let fact: u64 = (1..=n as u64).product();
        let (mut ce, mut co) = (0, 0);
        for m in 1..=n {
            ce += even[m];
            co += odd[m];
            if p_exact(n, m).unwrap() != ExactProportion::from_ratio(ce + co, fact) {
                return outcome(false, format!("p_exact({n}, {m}) disagrees"));
            }
            checked += 1;
            if n >= 3 {
                if p_tilde_exact(n, m).unwrap() != ExactProportion::from_ratio(ce, fact / 2) {
                    return outcome(false, format!("p_tilde_exact({n}, {m}) disagrees"));
                }
                checked += 1;
            }
        }
    }
    for l in 1..=9usize {
        let mut hits = [[0u64; 2]; 4];
        let mut sizes = [0u64; 2];
        for_each_permutation(l, PermGroup::Sn, |g| {
            let side = usize::from(g.parity() == Parity::Odd);
            sizes[side] += 1;
            let lengths: Vec<usize> = g.cycles().iter().map(Vec::len).collect();
            for a in 1..=3 {
                if lengths.iter().all(|c| c % (1 << a) != 0) {
                    hits[a][side] += 1;
                }
            }
        });
        let total = sizes[0] + sizes[1];
        for a in 1..=3u32 {
            let [e, o] = hits[a as usize];
            let s_ok = s_not(l, a).unwrap() == ExactProportion::from_ratio(e + o, total);
            let a_ok = a_not(l, a).unwrap() == ExactProportion::from_ratio(e, sizes[0]);
            let c_ok = l < 2 || c_not(l, a).unwrap() == ExactProportion::from_ratio(o, sizes[1]);
            if !(s_ok && a_ok && c_ok) {
                return outcome(
                    false,
                    format!("restricted proportions disagree at l = {l}, a = {a}"),
                );
            }
            checked += 3;
        }
    }
    outcome(true, format!("{checked} exact comparisons, all equal"))
}

fn criterion_2() -> Outcome {
    let points = grid();
    let mut failures = Vec::new();
    for &(n, eps) in &points {
        let check = theorem_check(n, eps).unwrap();
        if !(check.pass_sn && check.pass_an) {
            failures.push(format!("({n}, {eps})"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} grid points, {} failing {:?}",
            points.len(),
            failures.len(),
            failures
        ),
    )
}

fn criterion_3() -> Outcome {
    let points = grid();
    let mut failures = Vec::new();
    let mut interior_gaps = Vec::new();
    let two_thirds = BigRational::new(2.into(), 3.into());
    for &(n, eps) in &points {
        let report = validate_hypotheses(n, eps).unwrap();
        let m = report.ceil_n_eps as usize;
        let p = p_exact(n as usize, m).unwrap();
        let pt = p_tilde_exact(n as usize, m).unwrap();
        let sum_sn = cycle_sum_rational(&report, 1).unwrap();
        let sum_an = &two_thirds * cycle_sum_rational(&report, 2).unwrap();
        let chain = bound_chain(n, eps).unwrap();
        let alt = bound_chain_alternating(n, eps).unwrap();
        let sn_ok = p.as_rational() >= &sum_sn && chain.is_monotone();
        let an_ok = !alt.degenerate
            && pt.as_rational() >= &sum_an
            && alt.sum_exact >= alt.sum_lemma
            && alt.b_half_eps > alt.b_final;
        if !(sn_ok && an_ok) {
            failures.push(format!("({n}, {eps})"));
        }
        for link in alt.links().iter().filter(|l| !l.pass) {
            interior_gaps.push(format!("({n}, {eps}) {} < {}", link.lhs, link.rhs));
        }
    }
    let mut detail = format!(
        "{} grid points, {} failing {:?}",
        points.len(),
        failures.len(),
        failures
    );
    if !interior_gaps.is_empty() {
        detail.push_str(&format!(
            "; A_n interior links below tolerance (not gated): {:?}",
            interior_gaps
        ));
    }
    outcome(failures.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut with_involution = 0u64;
    for i in 0..C4_SAMPLES {
        let g = Permutation::random(C4_DEGREE, &mut rng).unwrap();
        let profile = g.cycle_profile();
        let Some(t) = g.involution_power() else {
            if g.has_even_order() {
                return outcome(false, format!("sample {i}: even order without involution"));
            }
            continue;
        };
        with_involution += 1;
        let a_max = profile.max_valuation().unwrap();
        let ok = t.then(&t).is_identity()
            && !t.is_identity()
            && g.then(&t) == t.then(&g)
            && t.support_size() == profile.by_valuation[&a_max];
        if !ok {
            return outcome(false, format!("sample {i}: {g} gives {t}"));
        }
    }
    outcome(
        true,
        format!(
            "{C4_SAMPLES} samples of S_{C4_DEGREE}, {with_involution} of even order, zero failures"
        ),
    )
}

fn direct_involution(g: &Matrix) -> Option<Matrix> {
    let order = order_by_iteration(g, 10_000).expect("order of a small-group element");
    (order % 2 == 0).then(|| g.pow_u64(order / 2))
}

fn criterion_5() -> Outcome {
    let f3 = Arc::new(FiniteField::new(3).unwrap());
    let f5 = Arc::new(FiniteField::new(5).unwrap());
    let cases = [
        ("GL_2(3)", gl_generators(2, &f3), GroupSpec::gl(2, &f3), 48),
        ("SL_2(5)", sl_generators(2, &f5), GroupSpec::sl(2, &f5), 120),
    ];
    let mut notes = Vec::new();
    for (name, gens, spec, size) in cases {
        let group = enumerate_group(&gens, 10_000).unwrap();
        if group.len() != size {
            return outcome(
                false,
                format!("{name} enumerated to {} elements", group.len()),
            );
        }
        let em = exponent_multiple(spec.n, &spec.field).unwrap();
        for g in &group {
            if involution_from_element(g, &em).unwrap() != direct_involution(g) {
                return outcome(
                    false,
                    format!("{name}: extraction disagrees on\n{}", g.to_text()),
                );
            }
        }
        for r_max in 1..=spec.n {
            let hits = group
                .iter()
                .filter(|g| matrix_event(g, r_max).unwrap())
                .count();
            let exact = hits as f64 / size as f64;
            let est = estimate_matrix_proportion(&spec, r_max, C5_TRIALS, r_max as u64, CONFIDENCE)
                .unwrap();
            if !est.contains(exact) {
                return outcome(
                    false,
                    format!(
                        "{name}, r_max = {r_max}: exact {exact} outside [{}, {}]",
                        est.ci_low, est.ci_high
                    ),
                );
            }
            notes.push(format!("{name} r={r_max}: {hits}/{size}"));
        }
    }
    outcome(
        true,
        format!(
            "extraction agrees on all 168 elements; CIs contain {}",
            notes.join(", ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let eps: Epsilon = "0.9".parse().unwrap();
    let report = validate_hypotheses(C6_DIM as u64, eps).unwrap();
    let window = (report.ceil_log_sq, report.ceil_n_eps, report.upper);
    if window != (26, 40, 50) || !report.valid {
        return outcome(false, format!("hypothesis window re-derived as {window:?}"));
    }
    let constants = family_constants(Family::Gl, false);
    let bound = constants.bound(eps);
    let r_max = constants.r_max(C6_DIM as u64, eps) as usize;
    if (bound - 0.009375).abs() > 1e-15 || r_max != 40 {
        return outcome(false, format!("bound {bound}, r_max {r_max}"));
    }
    let field = Arc::new(FiniteField::new(C6_Q).unwrap());
    let spec = GroupSpec::gl(C6_DIM, &field).with_family(Family::Gl, false);
    let mut misses = 0;
    let mut lows = Vec::new();
    for seed in 0..C6_SEEDS {
        let est = estimate_matrix_proportion(&spec, r_max, C6_SAMPLES, seed, CONFIDENCE).unwrap();
        if est.ci_low <= bound {
            misses += 1;
        }
        lows.push(format!("{:.4}", est.ci_low));
    }
    outcome(
        misses <= C6_ALLOWED_MISSES,
        format!(
            "{C6_SEEDS} seeds x {C6_SAMPLES} samples, {misses} with ci_low <= {bound}; ci_low per seed [{}]",
            lows.join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let eps: Epsilon = "0.8".parse().unwrap();
    let threshold = eps.ceil_pow(C7_DEGREE as u64) as usize;
    if threshold != 40 {
        return outcome(false, format!("threshold re-derived as {threshold}"));
    }
    let mut total_tries = 0u64;
    for seed in 0..C7_RUNS {
        let mut source = PermSource::new(C7_DEGREE, PermGroup::Sn, seed).unwrap();
        let Some(found) = find_small_involution(&mut source, threshold, 100_000)
            .unwrap()
            .found()
        else {
            return outcome(false, format!("seed {seed}: no involution found"));
        };
        let t = &found.involution;
        let ok = t.then(t).is_identity()
            && !t.is_identity()
            && t.support_size() == found.measure
            && found.measure <= threshold
            && found.element.involution_power().as_ref() == Some(t);
        if !ok {
            return outcome(
                false,
                format!("seed {seed}: returned involution fails verification"),
            );
        }
        total_tries += found.tries;
    }
    let mean = total_tries as f64 / C7_RUNS as f64;
    outcome(
        mean <= C7_MAX_MEAN_TRIES,
        format!(
            "mean tries {mean:.2} over {C7_RUNS} runs (limit {C7_MAX_MEAN_TRIES}), all verified"
        ),
    )
}

fn criterion_8() -> Outcome {
    // cases with exact value strictly between 0 and 1
    let mut cases = Vec::new();
    for n in 3..=9usize {
        for m in 2..=n {
            for group in [PermGroup::Sn, PermGroup::An] {
                let exact = match group {
                    PermGroup::Sn => p_exact(n, m),
                    PermGroup::An => p_tilde_exact(n, m),
                }
                .unwrap();
                let x = exact.to_f64_floor();
                if x > 0.0 && x < 1.0 {
                    cases.push((n, m, group, exact));
                }
            }
        }
    }
    let mut covered = 0;
    for rep in 0..C8_REPETITIONS {
        let (n, m, group, exact) = &cases[rep as usize % cases.len()];
        let est =
            estimate_perm_proportion(*n, *m, *group, C8_TRIALS, 8000 + rep, CONFIDENCE).unwrap();
        if est.contains(exact.to_f64_floor()) {
            covered += 1;
        }
    }
    outcome(
        covered >= C8_MIN_COVERED,
        format!(
            "{covered}/{C8_REPETITIONS} intervals contain the exact value (need {C8_MIN_COVERED})"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle equivalence", criterion_1),
        ("S_n and A_n lower bounds on the grid", criterion_2),
        ("bound chain monotonicity", criterion_3),
        ("permutation involution extraction", criterion_4),
        ("matrix involution extraction", criterion_5),
        ("GL_60(3) statistical bound", criterion_6),
        ("finder performance on S_100", criterion_7),
        ("Monte Carlo calibration", criterion_8),
    ];
    let only: Option<HashSet<usize>> = std::env::var("INVKIT_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut all_pass = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|set| !set.contains(&id)) {
            println!("criterion {id} SKIP {name}");
            continue;
        }
        let start = Instant::now();
        let result = run();
        all_pass &= result.pass;
        println!(
            "criterion {id} {} {name} ({:.1}s): {}",
            if result.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
    }
    if !all_pass {
        std::process::exit(1);
    }
}
