//! Sampling from the spin-weight measure: an exact inverse-CDF sampler for
//! enumerable instances, a parity-preserving Metropolis chain for everything
//! else, greedy mode search in exact arithmetic, and the sup-norm convergence
//! experiment that compares sampled boundaries against the limit shape.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::DiagramBoundary;
use crate::config::AlgebraConfig;
use crate::error::{Error, Result};
use crate::limitshape::LimitShape;
use crate::measure::{ln_factorial, measure_table};
use crate::numeric::NeumaierSum;
use crate::weights::{minimal_acoords, ACoordinates};

/// How many accepted moves a chain takes between full recomputations of its
/// cached log weight (and the drift bound those checks enforce).
const DRIFT_CHECK_EVERY: u64 = 10_000;
const DRIFT_BOUND: f64 = 1e-9;

/// Grid resolution of the mean boundary in a [`SampleReport`].
const MEAN_GRID: usize = 257;
/// Uniform grid used when measuring sup distances to the limit shape.
const SUP_GRID: usize = 512;

/// A function sampled on a fixed grid, used for averaged boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedFunction {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// What a sampling run hands back: the retained draws, the Metropolis
/// acceptance rate (1 for the exact sampler), the pointwise mean of the
/// rescaled boundary profiles, and each draw's sup distance to the limit
/// shape at the instance's own ratio.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub samples: Vec<ACoordinates>,
    pub acceptance_rate: f64,
    pub mean_boundary: GriddedFunction,
    pub sup_distances: Vec<f64>,
}

/// One row of the convergence experiment.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: u32,
    pub tensor_power: u64,
    pub c_n: f64,
    pub mean_sup_dist: f64,
    pub q90_sup_dist: f64,
    pub acceptance_rate: f64,
}

// --- Metropolis moves -------------------------------------------------------

/// Widened square, safe for any coordinate a u64 can hold.
fn square(v: u64) -> u128 {
    (v as u128) * (v as u128)
}

/// Checks whether `a[i] -> a[i] +/- 2` stays inside the support: strict
/// decrease, positivity in the right parity class, and the cone bound.
/// Returns the moved coordinate when valid.
fn moved_coordinate(config: &AlgebraConfig, a: &[u64], i: usize, up: bool) -> Option<u64> {
    let old = a[i];
    if up {
        let new = old + 2;
        if i == 0 {
            if new > config.a_max() {
                return None;
            }
        } else if new >= a[i - 1] {
            return None;
        }
        Some(new)
    } else {
        let new = old.checked_sub(2)?;
        if new < config.parity().minimum() {
            return None;
        }
        if i + 1 < a.len() && new <= a[i + 1] {
            return None;
        }
        Some(new)
    }
}

/// Log of the measure ratio mu(moved)/mu(current) for a single `+/- 2` move,
/// assembled in O(n): the moved coordinate touches one squared factor, its
/// row of mirrored-Vandermonde factors, and one factorial pair (the move
/// shifts one particle count up and its mirror count down, so the factorial
/// part collapses to a single ratio).
fn move_log_delta(config: &AlgebraConfig, a: &[u64], i: usize, up: bool) -> Option<f64> {
    let new = moved_coordinate(config, a, i, up)?;
    let old = a[i];
    let mut acc = NeumaierSum::new();
    acc.add(2.0 * ((new as f64).ln() - (old as f64).ln()));
    for (j, &aj) in a.iter().enumerate() {
        if j == i {
            continue;
        }
        let num = square(new).abs_diff(square(aj)) as f64;
        let den = square(old).abs_diff(square(aj)) as f64;
        acc.add(2.0 * (num.ln() - den.ln()));
    }
    let m_plus = (config.a_max() + old) / 2;
    let m_minus = (config.a_max() - old) / 2;
    if up {
        acc.add((m_minus as f64).ln() - ((m_plus + 1) as f64).ln());
    } else {
        acc.add((m_plus as f64).ln() - ((m_minus + 1) as f64).ln());
    }
    Some(acc.value())
}

/// The same measure ratio as an exact rational, for detailed-balance checks
/// and tie-free mode search.  `None` when the move leaves the support.
pub fn move_ratio_exact(
    config: &AlgebraConfig,
    a: &[u64],
    i: usize,
    up: bool,
) -> Option<BigRational> {
    let (num, den) = move_ratio_parts(config, a, i, up)?;
    Some(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Unreduced numerator/denominator of the move ratio; callers compare ratios
/// by cross-multiplication, dodging gcd reductions in hot loops.
fn move_ratio_parts(
    config: &AlgebraConfig,
    a: &[u64],
    i: usize,
    up: bool,
) -> Option<(BigUint, BigUint)> {
    let new = moved_coordinate(config, a, i, up)?;
    let old = a[i];
    let mut num = BigUint::from(square(new));
    let mut den = BigUint::from(square(old));
    for (j, &aj) in a.iter().enumerate() {
        if j == i {
            continue;
        }
        // the mirrored-Vandermonde factors enter the measure squared
        let up_factor = BigUint::from(square(new).abs_diff(square(aj)));
        let down_factor = BigUint::from(square(old).abs_diff(square(aj)));
        num *= &up_factor * &up_factor;
        den *= &down_factor * &down_factor;
    }
    let m_plus = (config.a_max() + old) / 2;
    let m_minus = (config.a_max() - old) / 2;
    if up {
        num *= BigUint::from(m_minus);
        den *= BigUint::from(m_plus + 1);
    } else {
        num *= BigUint::from(m_plus);
        den *= BigUint::from(m_minus + 1);
    }
    Some((num, den))
}

// --- chain state ------------------------------------------------------------

/// One Metropolis chain: current coordinates plus the cached seed-independent
/// part of the log probability (the constant prefactor cancels from every
/// ratio, so it is never carried).  The cache is a compensated sum: on large
/// instances the running value is ~1e4 while the per-move deltas are O(1), and
/// plain addition drifts past the self-check bound within ten thousand moves.
#[derive(Debug, Clone)]
pub struct ChainState {
    a: Vec<u64>,
    log_weight: NeumaierSum,
    accepted: u64,
    max_drift: f64,
}

impl ChainState {
    /// Fresh chain sitting on the empty diagram.
    pub fn new(config: &AlgebraConfig) -> Self {
        let a = minimal_acoords(config).as_slice().to_vec();
        let mut log_weight = NeumaierSum::new();
        log_weight.add(Self::variable_log_weight(config, &a));
        ChainState {
            a,
            log_weight,
            accepted: 0,
            max_drift: 0.0,
        }
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    /// Cached log weight (log probability minus the instance constant).
    pub fn log_weight(&self) -> f64 {
        self.log_weight.value()
    }

    /// Largest cached-vs-recomputed discrepancy seen at the periodic checks.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    /// The weight-dependent part of the log probability, recomputed from
    /// scratch: `2 sum ln a + 2 sum ln(a_i^2 - a_j^2) - sum ln m+! m-!`.
    pub fn variable_log_weight(config: &AlgebraConfig, a: &[u64]) -> f64 {
        let mut acc = NeumaierSum::new();
        for (i, &ai) in a.iter().enumerate() {
            acc.add(2.0 * (ai as f64).ln());
            for &aj in &a[i + 1..] {
                acc.add(2.0 * ((square(ai) - square(aj)) as f64).ln());
            }
            let m_plus = (config.a_max() + ai) / 2;
            let m_minus = (config.a_max() - ai) / 2;
            acc.add(-ln_factorial(m_plus));
            acc.add(-ln_factorial(m_minus));
        }
        acc.value()
    }

    /// One Metropolis proposal: uniform index, uniform sign, accept with the
    /// usual min(1, ratio).  Proposals leaving the support are rejected and
    /// consume no extra randomness.  Returns whether the move was accepted.
    pub fn step(&mut self, config: &AlgebraConfig, rng: &mut impl Rng) -> bool {
        let i = rng.gen_range(0..self.a.len());
        let up = rng.gen_bool(0.5);
        let Some(delta) = move_log_delta(config, &self.a, i, up) else {
            return false;
        };
        if delta < 0.0 && rng.gen::<f64>() >= delta.exp() {
            return false;
        }
        self.a[i] = if up { self.a[i] + 2 } else { self.a[i] - 2 };
        self.log_weight.add(delta);
        self.accepted += 1;
        if self.accepted.is_multiple_of(DRIFT_CHECK_EVERY) {
            let fresh = Self::variable_log_weight(config, &self.a);
            let drift = (self.log_weight.value() - fresh).abs();
            self.max_drift = self.max_drift.max(drift);
            assert!(
                drift <= DRIFT_BOUND,
                "incremental log weight drifted by {drift}"
            );
            self.log_weight = NeumaierSum::new();
            self.log_weight.add(fresh);
        }
        true
    }
}

// --- samplers ----------------------------------------------------------------

/// Inverse-CDF sampling from the exact measure.  The un-normalized weights
/// are integers summing to `2^(n N)`, so a uniform big integer below that
/// power picks each weight with exactly its probability.  Requires the
/// support to be enumerable under the standard cap.
pub fn exact_sample(config: &AlgebraConfig, seed: u64, count: usize) -> Result<SampleReport> {
    let rows = measure_table(config)?;
    let mut cumulative = Vec::with_capacity(rows.len());
    let mut running = BigUint::ZERO;
    for row in &rows {
        running += &row.multiplicity * &row.dimension;
        cumulative.push(running.clone());
    }
    let total = BigUint::one() << (config.rank_u64() * config.tensor_power());
    debug_assert_eq!(cumulative.last(), Some(&total));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.gen_biguint_below(&total);
        let k = cumulative.partition_point(|c| *c <= u);
        samples.push(ACoordinates::new(rows[k].a.clone(), config)?);
    }
    Ok(build_report(config, samples, 1.0))
}

/// Metropolis sampling with independent parallel chains.  Every chain seeds
/// the same generator and takes its own stream, so results do not depend on
/// scheduling; aggregation concatenates chains in index order.  `burnin` and
/// `sweeps` count sweeps of `n` proposals each; every `thin`-th post-burnin
/// sweep is retained.  The acceptance rate covers the retained phase only.
pub fn mcmc_sample(
    config: &AlgebraConfig,
    seed: u64,
    chains: usize,
    burnin: u64,
    sweeps: u64,
    thin: u64,
) -> SampleReport {
    mcmc_sample_bounded(config, seed, chains, burnin, sweeps, thin, chains.max(1))
}

/// [`mcmc_sample`] with at most `max_threads` chains running concurrently.
pub fn mcmc_sample_bounded(
    config: &AlgebraConfig,
    seed: u64,
    chains: usize,
    burnin: u64,
    sweeps: u64,
    thin: u64,
    max_threads: usize,
) -> SampleReport {
    let thin = thin.max(1);
    let max_threads = max_threads.max(1);
    let mut per_chain: Vec<ChainYield> = Vec::with_capacity(chains);
    for batch_start in (0..chains).step_by(max_threads) {
        let batch = (batch_start..chains.min(batch_start + max_threads)).collect::<Vec<_>>();
        let mut results: Vec<Option<ChainYield>> = vec![None; batch.len()];
        std::thread::scope(|scope| {
            for (slot, &chain) in results.iter_mut().zip(&batch) {
                scope.spawn(move || {
                    *slot = Some(run_chain(config, seed, chain as u64, burnin, sweeps, thin));
                });
            }
        });
        per_chain.extend(results.into_iter().map(Option::unwrap));
    }

    let mut samples = Vec::new();
    let mut accepted = 0u64;
    let mut proposals = 0u64;
    for (raw, acc, prop) in per_chain {
        for a in raw {
            samples.push(ACoordinates::new(a, config).expect("chain left the support"));
        }
        accepted += acc;
        proposals += prop;
    }
    let rate = if proposals == 0 {
        1.0
    } else {
        accepted as f64 / proposals as f64
    };
    build_report(config, samples, rate)
}

/// Retained raw coordinates of one chain plus its post-burnin
/// accepted/proposed counters.
type ChainYield = (Vec<Vec<u64>>, u64, u64);

/// Body of one chain.
fn run_chain(
    config: &AlgebraConfig,
    seed: u64,
    stream: u64,
    burnin: u64,
    sweeps: u64,
    thin: u64,
) -> ChainYield {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut state = ChainState::new(config);
    let n = config.rank() as u64;
    for _ in 0..burnin * n {
        state.step(config, &mut rng);
    }
    let mut kept = Vec::new();
    let mut accepted = 0u64;
    for sweep in 0..sweeps {
        for _ in 0..n {
            accepted += state.step(config, &mut rng) as u64;
        }
        if sweep % thin == 0 {
            kept.push(state.a().to_vec());
        }
    }
    (kept, accepted, sweeps * n)
}

/// Mean boundary grid and sup distances against the limit shape at the
/// instance's own ratio `c_n`.
fn build_report(config: &AlgebraConfig, samples: Vec<ACoordinates>, rate: f64) -> SampleReport {
    let shape = LimitShape::new(config.c_f64()).expect("c_n >= 2 for every instance");
    // the cone keeps every boundary inside +/- (a_max + 1)/(2n)
    let half_width = (config.a_max() + 1) as f64 / (2.0 * config.rank() as f64);
    let boundaries: Vec<DiagramBoundary> = samples
        .iter()
        .map(|a| DiagramBoundary::new(config, a).expect("samples lie in the support"))
        .collect();

    let mean_boundary = if boundaries.is_empty() {
        GriddedFunction {
            xs: Vec::new(),
            ys: Vec::new(),
        }
    } else {
        let xs: Vec<f64> = (0..MEAN_GRID)
            .map(|k| -half_width + 2.0 * half_width * k as f64 / (MEAN_GRID - 1) as f64)
            .collect();
        let ys = xs
            .iter()
            .map(|&x| {
                let sum: f64 = boundaries.iter().map(|b| b.value(x)).sum();
                sum / boundaries.len() as f64
            })
            .collect();
        GriddedFunction { xs, ys }
    };

    let sup_distances = boundaries
        .iter()
        .map(|b| b.sup_distance_to(|x| shape.shape(x), half_width, SUP_GRID))
        .collect();

    SampleReport {
        samples,
        acceptance_rate: rate,
        mean_boundary,
        sup_distances,
    }
}

// --- mode search --------------------------------------------------------------

/// Greedy coordinate ascent from the empty diagram with the `+/- 2` move set;
/// see [`mode_search_flagged`] for the tie indicator.
pub fn mode_search(config: &AlgebraConfig) -> ACoordinates {
    mode_search_flagged(config).0
}

/// Greedy ascent in exact arithmetic: each round applies the move with the
/// largest measure ratio until no move improves.  Exact ties are broken
/// toward the lexicographically smaller coordinate vector, and the returned
/// flag reports whether any tie (an improving one, or a flat neighbor at the
/// final state) was seen — the maximizer may then be non-unique.
pub fn mode_search_flagged(config: &AlgebraConfig) -> (ACoordinates, bool) {
    let mut a = minimal_acoords(config).as_slice().to_vec();
    let one = (BigUint::one(), BigUint::one());
    let mut tie_seen = false;
    loop {
        let mut best: Option<((BigUint, BigUint), Vec<u64>)> = None;
        let mut flat_neighbor = false;
        for i in 0..a.len() {
            for up in [false, true] {
                let Some(ratio) = move_ratio_parts(config, &a, i, up) else {
                    continue;
                };
                match cross_compare(&ratio, &one) {
                    std::cmp::Ordering::Greater => {}
                    std::cmp::Ordering::Equal => {
                        flat_neighbor = true;
                        continue;
                    }
                    std::cmp::Ordering::Less => continue,
                }
                let mut cand = a.clone();
                cand[i] = if up { cand[i] + 2 } else { cand[i] - 2 };
                match &mut best {
                    None => best = Some((ratio, cand)),
                    Some((best_ratio, best_cand)) => match cross_compare(&ratio, best_ratio) {
                        std::cmp::Ordering::Greater => best = Some((ratio, cand)),
                        std::cmp::Ordering::Equal => {
                            tie_seen = true;
                            if cand < *best_cand {
                                *best_cand = cand;
                            }
                        }
                        std::cmp::Ordering::Less => {}
                    },
                }
            }
        }
        match best {
            Some((_, cand)) => a = cand,
            None => {
                // a flat neighbor of the final state also makes the argmax
                // ambiguous, so it raises the same flag
                tie_seen |= flat_neighbor;
                break;
            }
        }
    }
    let coords = ACoordinates::new(a, config).expect("greedy moves stay in the support");
    (coords, tie_seen)
}

/// Compare two unreduced fractions by cross-multiplication.
fn cross_compare(lhs: &(BigUint, BigUint), rhs: &(BigUint, BigUint)) -> std::cmp::Ordering {
    (&lhs.0 * &rhs.1).cmp(&(&rhs.0 * &lhs.1))
}

// --- convergence experiment -----------------------------------------------------

/// For each rank in `n_list`, build the instance with tensor power
/// `round((c - 2) n)` — the convention under which the reachable cone ends
/// exactly at the window edge `c/2` — run four Metropolis chains, and
/// measure sup distances of the sampled boundaries to the limit shape at
/// `c` itself.  `sweeps` counts retained sweeps per chain; burn-in adds half
/// as many again, and thinning keeps about 200 draws per chain.  Each rank
/// derives its own seed from `seed`, so rows are
/// reproducible yet independently randomized.
pub fn convergence_experiment(
    c: f64,
    n_list: &[u32],
    seed: u64,
    sweeps: u64,
) -> Result<Vec<ConvergenceRow>> {
    convergence_experiment_bounded(c, n_list, seed, sweeps, 4)
}

/// [`convergence_experiment`] with at most `max_threads` chains running
/// concurrently per rank.
pub fn convergence_experiment_bounded(
    c: f64,
    n_list: &[u32],
    seed: u64,
    sweeps: u64,
    max_threads: usize,
) -> Result<Vec<ConvergenceRow>> {
    if !c.is_finite() || c < 2.0 {
        return Err(Error::BadShapeParameter {
            c,
            reason: "the ratio must be at least 2".into(),
        });
    }
    let shape = LimitShape::new(c)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::BadSamplerParameter {
                reason: "ranks in the convergence experiment must be positive".into(),
            });
        }
        let power = (((c - 2.0) * n as f64).round() as i64).max(1) as u64;
        let config = AlgebraConfig::new(n, power)?;
        let run_seed = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let thin = (sweeps / 200).max(1);
        let report =
            mcmc_sample_bounded(&config, run_seed, 4, sweeps / 2, sweeps, thin, max_threads);

        let half_width = (config.a_max() + 1) as f64 / (2.0 * n as f64);
        let half_width = half_width.max(c / 2.0);
        let mut dists: Vec<f64> = report
            .samples
            .iter()
            .map(|a| {
                DiagramBoundary::new(&config, a)
                    .expect("samples lie in the support")
                    .sup_distance_to(|x| shape.shape(x), half_width, SUP_GRID)
            })
            .collect();
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mean = dists.iter().sum::<f64>() / dists.len() as f64;
        let q90 = dists[((dists.len() as f64 * 0.9).ceil() as usize - 1).min(dists.len() - 1)];
        rows.push(ConvergenceRow {
            n,
            tensor_power: power,
            c_n: config.c_f64(),
            mean_sup_dist: mean,
            q90_sup_dist: q90,
            acceptance_rate: report.acceptance_rate,
        });
    }
    Ok(rows)
}
