use std::sync::Arc;

use invkit_core::bounds::ChainLink;
use invkit_core::exact::{for_each_permutation, BRUTE_FORCE_MAX_N};
use invkit_core::matrix::order_by_iteration;
use invkit_core::sampler::parse_generator_file;
use invkit_core::{
    a_not, bound_chain, bound_chain_alternating, c_not, enumerate_group,
    estimate_matrix_proportion, estimate_perm_proportion, exponent_multiple, family_constants,
    find_small_involution, involution_from_element, p_exact, p_tilde_exact, s_not, theorem_check,
    validate_hypotheses, BoundChain, Epsilon, Error, EstimateRecord, ExactProportion, Family,
    FamilyConstants, FindOutcome, FiniteField, GroupSpec, HypothesisReport, InvolutionSource,
    Matrix, MatrixSource, Parity, PermGroup, PermSource, Permutation, Result,
};
use serde::Serialize;

use crate::output::{emit, Format};
use crate::{Command, MatrixGroupArgs};

/// Runs one subcommand; `Ok(false)` means a check failed.
pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Exact { n, eps, m, format } => exact(n, eps, m, format.format),
        Command::Bounds {
            n,
            eps,
            family,
            strict,
            format,
        } => bounds(n, eps, family, strict, format.format),
        Command::Estimate {
            n,
            eps,
            m,
            group,
            sampling,
            format,
        } => {
            let s = sampling;
            estimate(
                n,
                eps,
                m,
                group,
                s.trials,
                s.seed,
                s.confidence,
                format.format,
            )
        }
        Command::Matrix {
            group,
            eps,
            rmax,
            sampling,
            format,
        } => {
            let s = sampling;
            matrix(
                &group,
                eps,
                rmax,
                s.trials,
                s.seed,
                s.confidence,
                format.format,
            )
        }
        Command::Find {
            n,
            group,
            matrix,
            eps,
            m,
            rmax,
            seed,
            max_tries,
            format,
        } => match n {
            Some(n) => find_perm(n, group, eps, m, seed, max_tries, format.format),
            None => find_matrix(&matrix, eps, rmax, seed, max_tries, format.format),
        },
        Command::Oracle {
            n,
            matrix,
            cap,
            format,
        } => match n {
            Some(n) => oracle_perm(n, format.format),
            None => oracle_matrix(&matrix, cap, format.format),
        },
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Reports an invalid hypothesis window, then fails with it.
fn require_window(report: HypothesisReport, format: Format) -> Result<HypothesisReport> {
    match report.violation() {
        None => Ok(report),
        Some(v) => {
            emit(&report, format);
            Err(Error::Hypothesis(format!(
                "n = {}, eps = {}: {v}",
                report.n, report.eps
            )))
        }
    }
}

#[derive(Serialize)]
struct ExactReport {
    n: usize,
    m: usize,
    eps: Option<Epsilon>,
    hypothesis: Option<HypothesisReport>,
    p: ExactProportion,
    p_tilde: Option<ExactProportion>,
    bound: Option<ExactProportion>,
    bound_tilde: Option<ExactProportion>,
    pass_sn: Option<bool>,
    pass_an: Option<bool>,
}

fn exact(n: usize, eps: Option<Epsilon>, m: Option<usize>, format: Format) -> Result<bool> {
    if let Some(m) = m {
        let report = ExactReport {
            n,
            m,
            eps: None,
            hypothesis: None,
            p: p_exact(n, m)?,
            p_tilde: if n >= 3 {
                Some(p_tilde_exact(n, m)?)
            } else {
                None
            },
            bound: None,
            bound_tilde: None,
            pass_sn: None,
            pass_an: None,
        };
        emit(&report, format);
        return Ok(true);
    }
    let eps = eps.ok_or_else(|| invalid("either --eps or --m is required"))?;
    require_window(validate_hypotheses(n as u64, eps)?, format)?;
    let check = theorem_check(n as u64, eps)?;
    let pass = check.pass_sn && check.pass_an;
    let report = ExactReport {
        n,
        m: check.hypothesis.ceil_n_eps as usize,
        eps: Some(eps),
        hypothesis: Some(check.hypothesis),
        p: check.p,
        p_tilde: Some(check.p_tilde),
        bound: Some(check.bound),
        bound_tilde: Some(check.bound_tilde),
        pass_sn: Some(check.pass_sn),
        pass_an: Some(check.pass_an),
    };
    emit(&report, format);
    Ok(pass)
}

#[derive(Serialize)]
struct ChainReport {
    #[serde(flatten)]
    chain: BoundChain,
    links: Vec<ChainLink>,
    monotone: bool,
}

impl From<BoundChain> for ChainReport {
    fn from(chain: BoundChain) -> Self {
        ChainReport {
            links: chain.links(),
            monotone: chain.is_monotone(),
            chain,
        }
    }
}

#[derive(Serialize)]
struct FamilyReport {
    #[serde(flatten)]
    constants: FamilyConstants,
    bound_factor: String,
    bound: f64,
    /// `alpha * ceil(l^eps)`, when `--n` is given as the rank `l`.
    r_max: Option<u64>,
}

#[derive(Serialize)]
struct BoundsReport {
    n: Option<u64>,
    eps: Epsilon,
    hypothesis: Option<HypothesisReport>,
    sn_chain: Option<ChainReport>,
    an_chain: Option<ChainReport>,
    /// The `A_n` chain's last analytic stage exceeds `eps/96`.
    an_ends_above_final: Option<bool>,
    family: Option<FamilyReport>,
    pass: bool,
}

fn bounds(
    n: Option<u64>,
    eps: Epsilon,
    family: Option<Family>,
    strict: bool,
    format: Format,
) -> Result<bool> {
    let family = family.map(|f| {
        let constants = family_constants(f, strict);
        let factor = constants.bound_factor();
        FamilyReport {
            constants,
            bound_factor: format!("{}/{}", factor.numer(), factor.denom()),
            bound: constants.bound(eps),
            r_max: n.map(|l| constants.r_max(l, eps)),
        }
    });
    let mut report = BoundsReport {
        n,
        eps,
        hypothesis: None,
        sn_chain: None,
        an_chain: None,
        an_ends_above_final: None,
        family,
        pass: true,
    };
    if let Some(n) = n {
        let hypothesis = require_window(validate_hypotheses(n, eps)?, format)?;
        let sn = bound_chain(n, eps)?;
        let an = bound_chain_alternating(n, eps)?;
        let ends_above = !an.degenerate && an.b_half_eps > an.b_final;
        report.pass = sn.is_monotone() && ends_above;
        report.hypothesis = Some(hypothesis);
        report.sn_chain = Some(sn.into());
        report.an_chain = Some(an.into());
        report.an_ends_above_final = Some(ends_above);
    }
    emit(&report, format);
    Ok(report.pass)
}

/// `--m`, or `ceil(n^eps)` inside a valid window.
fn support_bound(
    n: usize,
    eps: Option<Epsilon>,
    m: Option<usize>,
    format: Format,
) -> Result<(usize, Option<HypothesisReport>)> {
    match (m, eps) {
        (Some(m), _) => Ok((m, None)),
        (None, Some(eps)) => {
            let report = require_window(validate_hypotheses(n as u64, eps)?, format)?;
            Ok((report.ceil_n_eps as usize, Some(report)))
        }
        (None, None) => Err(invalid("either --eps or --m is required")),
    }
}

#[derive(Serialize)]
struct PermEstimateReport {
    n: usize,
    m: usize,
    group: PermGroup,
    eps: Option<Epsilon>,
    #[serde(flatten)]
    record: EstimateRecord,
}

#[allow(clippy::too_many_arguments)]
fn estimate(
    n: usize,
    eps: Option<Epsilon>,
    m: Option<usize>,
    group: PermGroup,
    trials: u64,
    seed: u64,
    confidence: f64,
    format: Format,
) -> Result<bool> {
    let (m, hypothesis) = support_bound(n, eps, m, format)?;
    let est = estimate_perm_proportion(n, m, group, trials, seed, confidence)?;
    let bound = hypothesis.map(|h| {
        let d = match group {
            PermGroup::Sn => 48.0,
            PermGroup::An => 96.0,
        };
        h.eps.value() / d
    });
    let record = EstimateRecord::new(est, bound, false);
    let pass = record.pass != Some(false);
    emit(
        &PermEstimateReport {
            n,
            m,
            group,
            eps,
            record,
        },
        format,
    );
    Ok(pass)
}

/// A resolved matrix group with its rank parameter and family constants.
struct MatrixGroup {
    spec: GroupSpec,
    l: u64,
    constants: FamilyConstants,
}

fn matrix_group(args: &MatrixGroupArgs) -> Result<MatrixGroup> {
    let constants = family_constants(args.family, args.strict);
    let spec = match &args.gens {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            GroupSpec::from_generators(parse_generator_file(&text)?)?
        }
        None => {
            if args.family != Family::Gl {
                return Err(invalid(format!(
                    "uniform sampling covers GL and SL only; give --gens for {:?}",
                    args.family
                )));
            }
            let l = args
                .l
                .ok_or_else(|| invalid("--l is required without --gens"))?;
            let q = args
                .q
                .ok_or_else(|| invalid("--q is required without --gens"))?;
            if l == 0 {
                return Err(invalid("--l must be at least 1"));
            }
            let field = Arc::new(FiniteField::new(q)?);
            if args.sl {
                GroupSpec::sl(l as usize, &field)
            } else {
                GroupSpec::gl(l as usize, &field)
            }
        }
    };
    let dim = spec.n as u64;
    let l = args.family.rank_of(dim).ok_or_else(|| {
        invalid(format!(
            "dimension {dim} does not fit family {:?}",
            args.family
        ))
    })?;
    if let Some(given) = args.l {
        if given != l {
            return Err(invalid(format!(
                "--l {given} disagrees with generator dimension {dim}"
            )));
        }
    }
    Ok(MatrixGroup {
        spec: spec.with_family(args.family, args.strict),
        l,
        constants,
    })
}

/// `--rmax`, or `alpha * ceil(l^eps)`; also the theorem bound when the window at `l` is valid.
fn eigenspace_bound(
    group: &MatrixGroup,
    eps: Option<Epsilon>,
    rmax: Option<usize>,
) -> Result<(usize, Option<HypothesisReport>, Option<f64>)> {
    let hypothesis = match eps {
        Some(eps) if group.l >= 2 => Some(validate_hypotheses(group.l, eps)?),
        _ => None,
    };
    let r_max = match (rmax, eps) {
        (Some(r), _) => r,
        (None, Some(eps)) => group.constants.r_max(group.l, eps) as usize,
        (None, None) => return Err(invalid("either --eps or --rmax is required")),
    };
    let bound = match (&hypothesis, eps) {
        (Some(h), Some(eps)) if h.valid && r_max as u64 >= group.constants.r_max(group.l, eps) => {
            Some(group.constants.bound(eps))
        }
        _ => None,
    };
    Ok((r_max, hypothesis, bound))
}

#[derive(Serialize)]
struct MatrixEstimateReport {
    dimension: usize,
    q: u64,
    l: u64,
    kind: &'static str,
    family: FamilyConstants,
    eps: Option<Epsilon>,
    r_max: usize,
    hypothesis: Option<HypothesisReport>,
    #[serde(flatten)]
    record: EstimateRecord,
}

fn kind_name(spec: &GroupSpec) -> &'static str {
    match spec.kind {
        invkit_core::GroupKind::Gl => "gl",
        invkit_core::GroupKind::Sl => "sl",
        invkit_core::GroupKind::Generators(_) => "generators",
    }
}

fn matrix(
    args: &MatrixGroupArgs,
    eps: Option<Epsilon>,
    rmax: Option<usize>,
    trials: u64,
    seed: u64,
    confidence: f64,
    format: Format,
) -> Result<bool> {
    let group = matrix_group(args)?;
    let (r_max, hypothesis, bound) = eigenspace_bound(&group, eps, rmax)?;
    let est = estimate_matrix_proportion(&group.spec, r_max, trials, seed, confidence)?;
    let record = EstimateRecord::new(est, bound, !group.spec.is_uniform());
    let pass = record.pass != Some(false);
    emit(
        &MatrixEstimateReport {
            dimension: group.spec.n,
            q: group.spec.field.order(),
            l: group.l,
            kind: kind_name(&group.spec),
            family: group.constants,
            eps,
            r_max,
            hypothesis,
            record,
        },
        format,
    );
    Ok(pass)
}

#[derive(Serialize)]
struct FindReport {
    found: bool,
    tries: u64,
    threshold: usize,
    /// Support size for permutations, `(-1)`-eigenspace dimension for matrices.
    measure: Option<usize>,
    element: Option<String>,
    involution: Option<String>,
    seed: u64,
}

fn find_report<S: InvolutionSource>(
    source: &mut S,
    threshold: usize,
    seed: u64,
    max_tries: u64,
    show: impl Fn(&S::Element) -> String,
) -> Result<FindReport> {
    Ok(match find_small_involution(source, threshold, max_tries)? {
        FindOutcome::Found(r) => FindReport {
            found: true,
            tries: r.tries,
            threshold,
            measure: Some(r.measure),
            element: Some(show(&r.element)),
            involution: Some(show(&r.involution)),
            seed,
        },
        FindOutcome::Exhausted { tries } => FindReport {
            found: false,
            tries,
            threshold,
            measure: None,
            element: None,
            involution: None,
            seed,
        },
    })
}

fn find_perm(
    n: usize,
    group: PermGroup,
    eps: Option<Epsilon>,
    m: Option<usize>,
    seed: u64,
    max_tries: u64,
    format: Format,
) -> Result<bool> {
    let (threshold, _) = support_bound(n, eps, m, format)?;
    let mut source = PermSource::new(n, group, seed)?;
    let report = find_report(
        &mut source,
        threshold,
        seed,
        max_tries,
        Permutation::to_string,
    )?;
    emit(&report, format);
    Ok(report.found)
}

fn find_matrix(
    args: &MatrixGroupArgs,
    eps: Option<Epsilon>,
    rmax: Option<usize>,
    seed: u64,
    max_tries: u64,
    format: Format,
) -> Result<bool> {
    let group = matrix_group(args)?;
    let (threshold, _, _) = eigenspace_bound(&group, eps, rmax)?;
    let mut source = MatrixSource::new(&group.spec, seed)?;
    let report = find_report(&mut source, threshold, seed, max_tries, |g: &Matrix| {
        g.to_text()
    })?;
    emit(&report, format);
    Ok(report.found)
}

#[derive(Serialize)]
struct OracleReport {
    subject: String,
    comparisons: u64,
    mismatches: Vec<String>,
    pass: bool,
}

impl OracleReport {
    fn new(subject: String, comparisons: u64, mismatches: Vec<String>) -> Self {
        OracleReport {
            subject,
            comparisons,
            pass: mismatches.is_empty(),
            mismatches,
        }
    }
}

/// Counting engine against full enumeration of `S_n`.
fn oracle_perm(n: usize, format: Format) -> Result<bool> {
    if n == 0 || n > BRUTE_FORCE_MAX_N {
        return Err(invalid(format!(
            "oracle degree must be in 1..={BRUTE_FORCE_MAX_N}"
        )));
    }
    // [parity][support] counts of even-order elements, and
    // [a][parity] counts with no cycle length divisible by 2^a
    let mut by_support = [vec![0u64; n + 1], vec![0u64; n + 1]];
    let mut restricted = [[0u64; 2]; 4];
    let mut sizes = [0u64; 2];
    for_each_permutation(n, PermGroup::Sn, |g| {
        let side = usize::from(g.parity() == Parity::Odd);
        sizes[side] += 1;
        if let Some(t) = g.involution_power() {
            by_support[side][t.support_size()] += 1;
        }
        let lengths: Vec<usize> = g.cycles().iter().map(Vec::len).collect();
        for (a, counts) in restricted.iter_mut().enumerate().skip(1) {
            if lengths.iter().all(|c| c % (1 << a) != 0) {
                counts[side] += 1;
            }
        }
    });
    let total = sizes[0] + sizes[1];
    let mut comparisons = 0;
    let mut mismatches = Vec::new();
    let mut check = |name: String, engine: ExactProportion, brute: ExactProportion| {
        comparisons += 1;
        if engine != brute {
            mismatches.push(format!("{name}: engine {engine}, enumeration {brute}"));
        }
    };
    let (mut even, mut odd) = (0, 0);
    for m in 1..=n {
        even += by_support[0][m];
        odd += by_support[1][m];
        check(
            format!("p({n}, {m})"),
            p_exact(n, m)?,
            ExactProportion::from_ratio(even + odd, total),
        );
        if n >= 3 {
            check(
                format!("p~({n}, {m})"),
                p_tilde_exact(n, m)?,
                ExactProportion::from_ratio(even, sizes[0]),
            );
        }
    }
    for a in 1..=3u32 {
        let [e, o] = restricted[a as usize];
        check(
            format!("s({n}, {a})"),
            s_not(n, a)?,
            ExactProportion::from_ratio(e + o, total),
        );
        check(
            format!("a({n}, {a})"),
            a_not(n, a)?,
            ExactProportion::from_ratio(e, sizes[0]),
        );
        if n >= 2 {
            check(
                format!("c({n}, {a})"),
                c_not(n, a)?,
                ExactProportion::from_ratio(o, sizes[1]),
            );
        }
    }
    let report = OracleReport::new(format!("S_{n}"), comparisons, mismatches);
    emit(&report, format);
    Ok(report.pass)
}

/// Involution extraction against direct powering over a whole small group.
fn oracle_matrix(args: &MatrixGroupArgs, cap: usize, format: Format) -> Result<bool> {
    let group = matrix_group(args)?;
    let spec = &group.spec;
    let elements = enumerate_group(&spec.generators(), cap)?;
    let em = exponent_multiple(spec.n, &spec.field)?;
    let mut mismatches = Vec::new();
    let mut even = 0u64;
    for g in &elements {
        let order = order_by_iteration(g, cap as u64 + 1).expect("orders divide the group order");
        let direct = (order % 2 == 0).then(|| g.pow_u64(order / 2));
        even += u64::from(direct.is_some());
        if involution_from_element(g, &em)? != direct {
            mismatches.push(g.to_text());
        }
    }
    let subject = format!(
        "{} of dimension {} over GF({}), {} elements, {} of even order",
        kind_name(spec),
        spec.n,
        spec.field.order(),
        elements.len(),
        even
    );
    let report = OracleReport::new(subject, elements.len() as u64, mismatches);
    emit(&report, format);
    Ok(report.pass)
}
