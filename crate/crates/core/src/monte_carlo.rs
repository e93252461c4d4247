//! Monte Carlo estimates of the small-involution proportions, with Wilson
//! score intervals, and the search for a single small involution.
//!
//! Trial `i` of an estimate with seed `s` draws from its own ChaCha stream
//! `(s, i)`, so results do not depend on how trials are split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::matrix::{
    element_exponent_multiple, involution_from_element, minus_one_eigenspace_dim, Matrix,
};
use crate::perm::{PermGroup, Permutation};
use crate::sampler::{GroupSpec, MatrixSampler};

pub const DEFAULT_CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64, confidence: f64, seed: u64) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, confidence)?;
        Ok(Estimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            confidence,
            seed,
        })
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return invalid("at least one trial is required");
    }
    if successes > trials {
        return invalid("successes exceed trials");
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return invalid(format!("confidence {confidence} is not in (0, 1)"));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).clamp(0.0, p)
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).clamp(p, 1.0)
    };
    Ok((low, high))
}

/// The random stream used by trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return invalid("at least one trial is required");
    }
    Ok(())
}

/// Whether `g` has even order and `g^{|g|/2}` moves at most `m` points.
pub fn perm_event(g: &Permutation, m: usize) -> bool {
    g.involution_power().is_some_and(|t| t.support_size() <= m)
}

pub fn estimate_perm_proportion(
    n: usize,
    m: usize,
    group: PermGroup,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<Estimate> {
    check_trials(trials)?;
    if m < 1 || m > n {
        return invalid(format!(
            "support bound m = {m} must satisfy 1 <= m <= n = {n}"
        ));
    }
    // validate (n, group) once so the parallel loop cannot fail
    Permutation::random_in(group, n, &mut trial_rng(seed, 0))?;
    let successes = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let g = Permutation::random_in(group, n, &mut trial_rng(seed, i)).expect("validated");
            perm_event(&g, m)
        })
        .count() as u64;
    Estimate::from_counts(successes, trials, confidence, seed)
}

/// Whether `g` has even order and `g^{|g|/2}` has `(-1)`-eigenspace of
/// dimension at most `r_max`.
pub fn matrix_event(g: &Matrix, r_max: usize) -> Result<bool> {
    Ok(
        match involution_from_element(g, &element_exponent_multiple(g)?)? {
            None => false,
            Some(t) => minus_one_eigenspace_dim(&t)? <= r_max,
        },
    )
}

/// Estimate over a matrix group. Uniform kinds use per-trial streams;
/// generator-defined groups use a single product replacement stream seeded
/// with `seed`, and the result is heuristic.
pub fn estimate_matrix_proportion(
    spec: &GroupSpec,
    r_max: usize,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<Estimate> {
    check_trials(trials)?;
    if r_max < 1 {
        return invalid("r_max must be at least 1");
    }
    let successes = if spec.is_uniform() {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let g = spec.sample_uniform(&mut trial_rng(seed, i))?;
                matrix_event(&g, r_max).map(u64::from)
            })
            .sum::<Result<u64>>()?
    } else {
        let mut sampler = spec.sampler(seed)?;
        let mut hits = 0;
        for _ in 0..trials {
            if matrix_event(&sampler.next_element()?, r_max)? {
                hits += 1;
            }
        }
        hits
    };
    Estimate::from_counts(successes, trials, confidence, seed)
}

/// A stream of group elements together with the power-up map.
pub trait InvolutionSource {
    type Element: Clone;

    fn draw(&mut self) -> Result<Self::Element>;

    /// `g^{|g|/2}` and its size measure, or `None` for odd order.
    fn power_up(&self, g: &Self::Element) -> Result<Option<(Self::Element, usize)>>;
}

/// Uniform elements of `S_n` or `A_n`; the measure is the support size.
pub struct PermSource {
    n: usize,
    group: PermGroup,
    rng: ChaCha8Rng,
}

impl PermSource {
    pub fn new(n: usize, group: PermGroup, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // surface invalid (n, group) now rather than on the first draw
        Permutation::random_in(group, n, &mut rng.clone())?;
        rng.set_stream(1);
        Ok(PermSource { n, group, rng })
    }
}

fn perm_power_up(g: &Permutation) -> Option<(Permutation, usize)> {
    g.involution_power().map(|t| {
        let s = t.support_size();
        (t, s)
    })
}

impl InvolutionSource for PermSource {
    type Element = Permutation;

    fn draw(&mut self) -> Result<Permutation> {
        Permutation::random_in(self.group, self.n, &mut self.rng)
    }

    fn power_up(&self, g: &Permutation) -> Result<Option<(Permutation, usize)>> {
        Ok(perm_power_up(g))
    }
}

/// Product replacement over a permutation group given by generators.
impl InvolutionSource for crate::group::ProductReplacement<Permutation, ChaCha8Rng> {
    type Element = Permutation;

    fn draw(&mut self) -> Result<Permutation> {
        Ok(self.next_element())
    }

    fn power_up(&self, g: &Permutation) -> Result<Option<(Permutation, usize)>> {
        Ok(perm_power_up(g))
    }
}

/// Matrix group elements; the measure is the `(-1)`-eigenspace dimension.
pub struct MatrixSource {
    sampler: MatrixSampler,
}

impl MatrixSource {
    pub fn new(spec: &GroupSpec, seed: u64) -> Result<Self> {
        Ok(MatrixSource {
            sampler: spec.sampler(seed)?,
        })
    }
}

impl InvolutionSource for MatrixSource {
    type Element = Matrix;

    fn draw(&mut self) -> Result<Matrix> {
        self.sampler.next_element()
    }

    fn power_up(&self, g: &Matrix) -> Result<Option<(Matrix, usize)>> {
        match involution_from_element(g, &element_exponent_multiple(g)?)? {
            None => Ok(None),
            Some(t) => {
                let r = minus_one_eigenspace_dim(&t)?;
                Ok(Some((t, r)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FindResult<E> {
    pub element: E,
    pub involution: E,
    pub tries: u64,
    pub measure: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FindOutcome<E> {
    Found(FindResult<E>),
    Exhausted { tries: u64 },
}

impl<E> FindOutcome<E> {
    pub fn found(self) -> Option<FindResult<E>> {
        match self {
            FindOutcome::Found(r) => Some(r),
            FindOutcome::Exhausted { .. } => None,
        }
    }
}

/// Samples until an element powers up to an involution of measure at most
/// `threshold`, or `max_tries` samples have been spent.
pub fn find_small_involution<S: InvolutionSource>(
    source: &mut S,
    threshold: usize,
    max_tries: u64,
) -> Result<FindOutcome<S::Element>> {
    if max_tries == 0 {
        return invalid("max_tries must be at least 1");
    }
    for tries in 1..=max_tries {
        let g = source.draw()?;
        if let Some((t, measure)) = source.power_up(&g)? {
            if measure <= threshold {
                return Ok(FindOutcome::Found(FindResult {
                    element: g,
                    involution: t,
                    tries,
                    measure,
                }));
            }
        }
    }
    Ok(FindOutcome::Exhausted { tries: max_tries })
}

/// An estimate together with the theorem's lower bound it is tested against.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateRecord {
    #[serde(flatten)]
    pub estimate: Estimate,
    pub theorem_bound: Option<f64>,
    /// `ci_low > theorem_bound`, when a bound applies.
    pub pass: Option<bool>,
    /// Set when samples came from a non-uniform stream.
    pub heuristic: bool,
}

impl EstimateRecord {
    pub fn new(estimate: Estimate, theorem_bound: Option<f64>, heuristic: bool) -> Self {
        let pass = theorem_bound.map(|b| estimate.ci_low > b);
        EstimateRecord {
            estimate,
            theorem_bound,
            pass,
            heuristic,
        }
    }
}
