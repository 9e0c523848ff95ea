//! Exact weight statistics: outer multiplicities, Weyl dimensions and the
//! induced probability measure `mu(a) = mult(a) * dim(a) / 2^(nN)` on the
//! irreducible components of a spinor tensor power.
//!
//! Everything in this module is integer or rational arithmetic; the only
//! floating-point surface is [`log_probability`], which mirrors the exact
//! value in log space for large instances.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::config::AlgebraConfig;
use crate::error::{Error, Result};
use crate::weights::{acoords_to_orthogonal, enumerate_support, ACoordinates};

/// Outer multiplicity of an irreducible component (0 outside the cone).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplicity(pub BigUint);

impl Multiplicity {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Dimension of an irreducible representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionValue(pub BigUint);

/// Probability of one component, exact and in log space.
#[derive(Debug, Clone)]
pub struct MeasureValue {
    pub exact: Option<BigRational>,
    pub log_value: f64,
}

thread_local! {
    // Monotonically growing factorial cache; arguments stay below N + 2n.
    static FACTORIALS: RefCell<Vec<BigUint>> = RefCell::new(vec![BigUint::one()]);
}

fn factorial(m: u64) -> BigUint {
    FACTORIALS.with(|cell| {
        let mut cache = cell.borrow_mut();
        while cache.len() <= m as usize {
            let next = cache.last().unwrap() * BigUint::from(cache.len() as u64);
            cache.push(next);
        }
        cache[m as usize].clone()
    })
}

fn big_ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn check_rank(config: &AlgebraConfig, a: &ACoordinates) -> Result<()> {
    if a.rank() != config.rank() {
        return Err(Error::RankMismatch {
            expected: config.rank(),
            got: a.rank(),
        });
    }
    Ok(())
}

/// Product of pairwise differences of squares, `prod_{i<j} (a_i^2 - a_j^2)`.
fn vandermonde_squares(a: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            acc *= BigUint::from(a[i] * a[i] - a[j] * a[j]);
        }
    }
    acc
}

fn coordinate_product(a: &[u64]) -> BigUint {
    a.iter().map(|&v| BigUint::from(v)).product()
}

/// Closed-form factorial block shared by the multiplicity and the measure:
/// `prod_k (N+2k)! / (2^{2k} * ((N + a_{k+1} + 2n-1)/2)! * ((N - a_{k+1} + 2n-1)/2)!)`.
fn factorial_block(config: &AlgebraConfig, a: &[u64]) -> BigRational {
    let n = config.rank_u64();
    let power = config.tensor_power();
    let alpha = power + 2 * n - 1;
    let mut acc = BigRational::one();
    for (k, &ak) in a.iter().enumerate() {
        let k = k as u64;
        let m_plus = (alpha + ak) / 2;
        let m_minus = (alpha - ak) / 2;
        let den = (BigUint::one() << (2 * k as usize)) * factorial(m_plus) * factorial(m_minus);
        acc *= big_ratio(factorial(power + 2 * k), den);
    }
    acc
}

/// Outer multiplicity from the closed product formula.
///
/// Coordinates outside the reachable cone give zero; inside the cone every
/// factor is positive, so the result is a strictly positive integer.
pub fn multiplicity(config: &AlgebraConfig, a: &ACoordinates) -> Result<Multiplicity> {
    check_rank(config, a)?;
    if !a.in_support(config) {
        return Ok(Multiplicity(BigUint::zero()));
    }
    let coords = a.as_slice();
    let mut value = factorial_block(config, coords);
    value *= BigRational::from(BigInt::from(coordinate_product(coords)));
    value *= BigRational::from(BigInt::from(vandermonde_squares(coords)));
    assert!(
        value.is_integer(),
        "multiplicity formula produced a non-integer for {coords:?}"
    );
    Ok(Multiplicity(value.to_integer().to_biguint().unwrap()))
}

/// Guard bounds for the branching-walk oracle.
pub const ORACLE_MAX_RANK: u32 = 6;
pub const ORACLE_MAX_POWER: u64 = 14;

/// Multiplicity table by explicit branching: the spinor weight is minuscule,
/// so tensoring by it adds one half-step `(+-1/2, .., +-1/2)` and every
/// dominant result appears exactly once.  Walking all `2^n` sign patterns `N`
/// times counts paths into each dominant weight, keyed here by a-coordinates.
pub fn oracle_table(config: &AlgebraConfig) -> Result<HashMap<Vec<u64>, BigUint>> {
    if config.rank() as u32 > ORACLE_MAX_RANK || config.tensor_power() > ORACLE_MAX_POWER {
        return Err(Error::OracleGuard {
            max_n: ORACLE_MAX_RANK,
            max_power: ORACLE_MAX_POWER,
        });
    }
    let n = config.rank();
    // States are doubled orthogonal coordinates of dominant weights.
    let mut states: HashMap<Vec<u64>, BigUint> = HashMap::new();
    states.insert(vec![0; n], BigUint::one());
    for _ in 0..config.tensor_power() {
        let mut next: HashMap<Vec<u64>, BigUint> = HashMap::new();
        for (state, count) in &states {
            'patterns: for mask in 0u32..(1 << n) {
                let mut shifted = Vec::with_capacity(n);
                for (i, &v) in state.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        shifted.push(v + 1);
                    } else {
                        if v == 0 {
                            continue 'patterns;
                        }
                        shifted.push(v - 1);
                    }
                }
                if shifted.windows(2).any(|w| w[0] < w[1]) {
                    continue;
                }
                *next.entry(shifted).or_insert_with(BigUint::zero) += count;
            }
        }
        states = next;
    }
    let n_u64 = config.rank_u64();
    Ok(states
        .into_iter()
        .map(|(doubled, count)| {
            let a: Vec<u64> = doubled
                .iter()
                .enumerate()
                .map(|(i, &d)| d + 2 * (n_u64 - 1 - i as u64) + 1)
                .collect();
            (a, count)
        })
        .collect())
}

/// Single-weight lookup in the branching-walk oracle.
pub fn oracle_multiplicity(config: &AlgebraConfig, a: &ACoordinates) -> Result<Multiplicity> {
    check_rank(config, a)?;
    let table = oracle_table(config)?;
    Ok(Multiplicity(
        table
            .get(a.as_slice())
            .cloned()
            .unwrap_or_else(BigUint::zero),
    ))
}

/// Weyl dimension in a-coordinates:
/// `2^(2n - n^2) * n! / ((2n)!(2n-2)!..2!) * prod_{i<j}(a_i^2 - a_j^2) * prod_l a_l`.
pub fn dimension(config: &AlgebraConfig, a: &ACoordinates) -> Result<DimensionValue> {
    check_rank(config, a)?;
    let n = config.rank() as i64;
    let coords = a.as_slice();
    let mut num = coordinate_product(coords) * vandermonde_squares(coords) * factorial(n as u64);
    let mut den = BigUint::one();
    let twos = 2 * n - n * n; // exponent of 2; positive only for n = 1
    if twos >= 0 {
        num <<= twos as usize;
    } else {
        den <<= (-twos) as usize;
    }
    for k in 1..=n as u64 {
        den *= factorial(2 * k);
    }
    let value = big_ratio(num, den);
    assert!(
        value.is_integer(),
        "dimension formula produced a non-integer for {coords:?}"
    );
    Ok(DimensionValue(value.to_integer().to_biguint().unwrap()))
}

/// Weyl dimension as a bare product over the positive roots
/// `e_i - e_j`, `e_i + e_j` (i < j) and `e_i`, with no global prefactor.
/// Independent route used to cross-check [`dimension`].
pub fn dimension_by_roots(config: &AlgebraConfig, a: &ACoordinates) -> Result<DimensionValue> {
    check_rank(config, a)?;
    let n = config.rank();
    // Doubled inner products: (lambda + rho, .) uses x_i, (rho, .) uses b_i.
    let orth = acoords_to_orthogonal(a, config);
    let x: Vec<i64> = orth
        .doubled()
        .iter()
        .enumerate()
        .map(|(i, &d)| d as i64 + 2 * (n as i64 - 1 - i as i64) + 1)
        .collect();
    let b: Vec<i64> = (0..n).map(|i| 2 * (n as i64 - 1 - i as i64) + 1).collect();
    let mut value = BigRational::one();
    for i in 0..n {
        for j in i + 1..n {
            value *= BigRational::new(BigInt::from(x[i] - x[j]), BigInt::from(b[i] - b[j]));
            value *= BigRational::new(BigInt::from(x[i] + x[j]), BigInt::from(b[i] + b[j]));
        }
        value *= BigRational::new(BigInt::from(x[i]), BigInt::from(b[i]));
    }
    assert!(value.is_integer() && value.is_positive());
    Ok(DimensionValue(value.to_integer().to_biguint().unwrap()))
}

/// Direct single-product form of the probability, bypassing the
/// multiplicity/dimension split.
fn probability_direct(config: &AlgebraConfig, a: &[u64]) -> BigRational {
    let n = config.rank() as i64;
    let power = config.tensor_power();
    let mut value = factorial_block(config, a);
    let vdm = vandermonde_squares(a);
    value *= big_ratio(&vdm * &vdm, BigUint::one());
    let prod = coordinate_product(a);
    value *= big_ratio(&prod * &prod, BigUint::one());
    value *= big_ratio(factorial(n as u64), BigUint::one());
    for k in 1..=n as u64 {
        value /= big_ratio(factorial(2 * k), BigUint::one());
    }
    let twos = 2 * n - n * n - (n * power as i64);
    if twos >= 0 {
        value *= big_ratio(BigUint::one() << twos as usize, BigUint::one());
    } else {
        value /= big_ratio(BigUint::one() << (-twos) as usize, BigUint::one());
    }
    value
}

/// Probability of one component under the normalized measure.
///
/// Computed both as `mult * dim / 2^(nN)` and by direct evaluation of the
/// single-product form; the two must agree exactly.
pub fn plancherel_probability(config: &AlgebraConfig, a: &ACoordinates) -> Result<MeasureValue> {
    check_rank(config, a)?;
    if !a.in_support(config) {
        return Ok(MeasureValue {
            exact: Some(BigRational::zero()),
            log_value: f64::NEG_INFINITY,
        });
    }
    let mult = multiplicity(config, a)?;
    let dim = dimension(config, a)?;
    let denom = BigUint::one() << (config.rank() as u64 * config.tensor_power()) as usize;
    let value = big_ratio(mult.0 * dim.0, denom);
    let direct = probability_direct(config, a.as_slice());
    assert_eq!(
        value,
        direct,
        "split and direct probability forms disagree for {:?}",
        a.as_slice()
    );
    Ok(MeasureValue {
        log_value: log_probability(config, a),
        exact: Some(value),
    })
}

/// Natural log of the probability, pure `f64` path for large instances.
/// Returns `-inf` outside the cone.
pub fn log_probability(config: &AlgebraConfig, a: &ACoordinates) -> f64 {
    if a.rank() != config.rank() || !a.in_support(config) {
        return f64::NEG_INFINITY;
    }
    let n = config.rank() as i64;
    let power = config.tensor_power();
    let alpha = power + 2 * n as u64 - 1;
    let coords = a.as_slice();
    let mut acc = crate::numeric::NeumaierSum::new();
    for (k, &ak) in coords.iter().enumerate() {
        let k = k as u64;
        acc.add(ln_factorial(power + 2 * k));
        acc.add(-2.0 * k as f64 * std::f64::consts::LN_2);
        acc.add(-ln_factorial((alpha + ak) / 2));
        acc.add(-ln_factorial((alpha - ak) / 2));
    }
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let d = (coords[i] * coords[i] - coords[j] * coords[j]) as f64;
            acc.add(2.0 * d.ln());
        }
        acc.add(2.0 * (coords[i] as f64).ln());
    }
    let twos = 2 * n - n * n - n * power as i64;
    acc.add(twos as f64 * std::f64::consts::LN_2);
    acc.add(ln_factorial(n as u64));
    for k in 1..=n as u64 {
        acc.add(-ln_factorial(2 * k));
    }
    acc.value()
}

/// Exact total mass `sum_a mult(a) * dim(a) / 2^(nN)`; equals one when the
/// enumeration, multiplicity and dimension routes are all consistent.
pub fn normalization_check(config: &AlgebraConfig) -> Result<BigRational> {
    let mut total = BigUint::zero();
    for coords in enumerate_support(config)? {
        let m = multiplicity(config, &coords)?;
        let d = dimension(config, &coords)?;
        total += m.0 * d.0;
    }
    let denom = BigUint::one() << (config.rank() as u64 * config.tensor_power()) as usize;
    Ok(big_ratio(total, denom))
}

/// One row of the exact measure table, in enumeration order.
#[derive(Debug, Clone)]
pub struct MeasureRow {
    pub a: Vec<u64>,
    pub multiplicity: BigUint,
    pub dimension: BigUint,
    pub probability: BigRational,
    pub log_probability: f64,
}

/// Full exact table over the support.
pub fn measure_table(config: &AlgebraConfig) -> Result<Vec<MeasureRow>> {
    let mut rows = Vec::new();
    for coords in enumerate_support(config)? {
        let m = multiplicity(config, &coords)?;
        let d = dimension(config, &coords)?;
        let p = plancherel_probability(config, &coords)?;
        rows.push(MeasureRow {
            a: coords.as_slice().to_vec(),
            multiplicity: m.0,
            dimension: d.0,
            probability: p.exact.unwrap(),
            log_probability: p.log_value,
        });
    }
    Ok(rows)
}

// --- log-space helpers -----------------------------------------------------

const LN_FACTORIAL_TABLE: usize = 1 << 16;

static LN_FACT: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();

/// `ln m!` with a compensated-sum table for small arguments and a Stirling
/// tail (relative error well under 1e-13) beyond it.
pub fn ln_factorial(m: u64) -> f64 {
    if (m as usize) < LN_FACTORIAL_TABLE {
        let table = LN_FACT.get_or_init(|| {
            let mut table = Vec::with_capacity(LN_FACTORIAL_TABLE);
            let mut acc = crate::numeric::NeumaierSum::new();
            table.push(0.0);
            for k in 1..LN_FACTORIAL_TABLE as u64 {
                acc.add((k as f64).ln());
                table.push(acc.value());
            }
            table
        });
        return table[m as usize];
    }
    stirling_ln_factorial(m as f64)
}

fn stirling_ln_factorial(m: f64) -> f64 {
    let inv = 1.0 / m;
    let inv2 = inv * inv;
    m * m.ln() - m
        + 0.5 * (2.0 * std::f64::consts::PI * m).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// Log of a big integer via its top bits; exact to f64 precision at any size.
pub fn ln_big_uint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Log of a positive rational of arbitrary size.
pub fn ln_big_rational(q: &BigRational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    assert!(q.is_positive());
    ln_big_uint(&q.numer().to_biguint().unwrap()) - ln_big_uint(&q.denom().to_biguint().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::DynkinLabels;

    fn cfg(n: u32, power: u64) -> AlgebraConfig {
        AlgebraConfig::new(n, power).unwrap()
    }

    fn coords(config: &AlgebraConfig, a: &[u64]) -> ACoordinates {
        ACoordinates::new(a.to_vec(), config).unwrap()
    }

    #[test]
    fn worked_multiplicities() {
        let c21 = cfg(2, 1);
        assert_eq!(
            multiplicity(&c21, &coords(&c21, &[4, 2])).unwrap().0,
            BigUint::from(1u32)
        );
        let c22 = cfg(2, 2);
        let table = [(vec![3, 1], 1u32), (vec![5, 1], 1), (vec![5, 3], 1)];
        for (a, m) in table {
            assert_eq!(
                multiplicity(&c22, &coords(&c22, &a)).unwrap().0,
                BigUint::from(m)
            );
        }
    }

    #[test]
    fn out_of_cone_is_zero() {
        let config = cfg(2, 2);
        let a = coords(&config, &[7, 1]); // a_1 > N + 2n - 1 = 5
        assert!(multiplicity(&config, &a).unwrap().is_zero());
        let p = plancherel_probability(&config, &a).unwrap();
        assert!(p.exact.unwrap().is_zero());
        assert_eq!(p.log_value, f64::NEG_INFINITY);
    }

    #[test]
    fn worked_dimensions() {
        // N = 2 splits as trivial + vector + adjoint for so(5).
        let config = cfg(2, 2);
        for (a, d) in [(vec![3, 1], 1u32), (vec![5, 1], 5), (vec![5, 3], 10)] {
            let got = dimension(&config, &coords(&config, &a)).unwrap().0;
            assert_eq!(got, BigUint::from(d), "a = {a:?}");
        }
    }

    #[test]
    fn spinor_dimension_is_power_of_two() {
        for n in 1..=6u32 {
            let config = cfg(n, 1);
            let a: Vec<u64> = (0..n as u64).map(|i| 2 * (n as u64 - i)).collect();
            let d = dimension(&config, &coords(&config, &a)).unwrap().0;
            assert_eq!(d, BigUint::one() << n as usize);
        }
    }

    #[test]
    fn trivial_weight_has_dimension_one() {
        let config = cfg(3, 2);
        let a = coords(&config, &[5, 3, 1]);
        assert_eq!(dimension(&config, &a).unwrap().0, BigUint::one());
    }

    #[test]
    fn root_product_matches_closed_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let labels: Vec<u64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let power = 2 * rng.gen_range(1..8) + labels[n - 1] % 2;
            let config = cfg(n as u32, power);
            let dl = DynkinLabels::new(labels).unwrap();
            let a = crate::weights::dynkin_to_acoords(&dl, &config).unwrap();
            assert_eq!(
                dimension(&config, &a).unwrap(),
                dimension_by_roots(&config, &a).unwrap()
            );
        }
    }

    #[test]
    fn small_probabilities_match_table() {
        let config = cfg(2, 2);
        let expect = [
            (vec![3u64, 1], (1u32, 16u32)),
            (vec![5, 1], (5, 16)),
            (vec![5, 3], (10, 16)),
        ];
        for (a, (num, den)) in expect {
            let p = plancherel_probability(&config, &coords(&config, &a))
                .unwrap()
                .exact
                .unwrap();
            assert_eq!(p, big_ratio(BigUint::from(num), BigUint::from(den)));
        }
    }

    #[test]
    fn rank_one_pair_decomposition() {
        // spin 1/2 tensor spin 1/2 = trivial + adjoint: probabilities 1/4, 3/4.
        let config = cfg(1, 2);
        let p1 = plancherel_probability(&config, &coords(&config, &[1]))
            .unwrap()
            .exact
            .unwrap();
        let p3 = plancherel_probability(&config, &coords(&config, &[3]))
            .unwrap()
            .exact
            .unwrap();
        assert_eq!(p1, big_ratio(BigUint::from(1u32), BigUint::from(4u32)));
        assert_eq!(p3, big_ratio(BigUint::from(3u32), BigUint::from(4u32)));
    }

    #[test]
    fn normalization_small_grid() {
        for (n, power) in [(1, 5), (2, 4), (3, 3)] {
            let ratio = normalization_check(&cfg(n, power)).unwrap();
            assert!(ratio.is_one(), "n={n} N={power}: {ratio}");
        }
    }

    #[test]
    fn oracle_matches_formula_exhaustively_small() {
        for (n, power) in [(1u32, 6u64), (2, 5), (3, 4)] {
            let config = cfg(n, power);
            let table = oracle_table(&config).unwrap();
            let mut support_count = 0usize;
            for c in enumerate_support(&config).unwrap() {
                support_count += 1;
                let m = multiplicity(&config, &c).unwrap().0;
                assert_eq!(table.get(c.as_slice()), Some(&m), "a = {:?}", c.as_slice());
            }
            assert_eq!(support_count, table.len());
        }
    }

    #[test]
    fn oracle_guard_enforced() {
        assert!(matches!(
            oracle_table(&cfg(7, 2)),
            Err(Error::OracleGuard { .. })
        ));
        assert!(matches!(
            oracle_table(&cfg(2, 15)),
            Err(Error::OracleGuard { .. })
        ));
    }

    #[test]
    fn log_probability_tracks_exact_value() {
        let config = cfg(3, 8);
        for c in enumerate_support(&config).unwrap() {
            let exact = plancherel_probability(&config, &c).unwrap();
            let reference = ln_big_rational(&exact.exact.unwrap());
            let err = (exact.log_value - reference).abs();
            assert!(
                err <= 1e-12 * reference.abs().max(1.0),
                "a = {:?}: {err}",
                c.as_slice()
            );
        }
    }

    #[test]
    fn ln_factorial_against_exact_bigints() {
        for m in [0u64, 1, 2, 10, 100, 1000, 70000] {
            let exact = ln_big_uint(&factorial(m));
            let err = (ln_factorial(m) - exact).abs();
            assert!(err <= 1e-11 * exact.abs().max(1.0), "m = {m}: {err}");
        }
    }
}
