//! Coordinate systems for dominant weights of `so(2n+1)` and enumeration of
//! the weights reachable inside a spinor tensor power.
//!
//! Three equivalent encodings are used throughout:
//! * Dynkin labels `l_1..l_n` (non-negative integers),
//! * orthogonal coordinates `lambda_i = l_i + .. + l_{n-1} + l_n/2`, stored
//!   doubled so that half-integers stay exact,
//! * shifted coordinates `a_i = 2*lambda_i + 2(n-i) + 1`, strictly decreasing
//!   positive integers of a single parity.  Most formulas act on these.

use serde::Serialize;

use crate::config::{AlgebraConfig, Parity};
use crate::error::{Error, Result};

/// Dynkin labels of a dominant weight; the last label is the spin node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DynkinLabels {
    labels: Vec<u64>,
}

impl DynkinLabels {
    pub fn new(labels: Vec<u64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::ZeroRank);
        }
        Ok(DynkinLabels { labels })
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.labels
    }
}

/// Doubled orthogonal coordinates `2*lambda_i`, weakly decreasing and of a
/// single parity (all even for tensor weights, all odd for spinor-shifted ones).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthogonalWeight {
    doubled: Vec<u64>,
}

impl OrthogonalWeight {
    pub fn new(doubled: Vec<u64>) -> Result<Self> {
        if doubled.is_empty() {
            return Err(Error::ZeroRank);
        }
        for i in 1..doubled.len() {
            if doubled[i] > doubled[i - 1] {
                return Err(Error::NotDominant { index: i });
            }
        }
        let parity = doubled[0] % 2;
        if doubled.iter().any(|&d| d % 2 != parity) {
            return Err(Error::MixedParity);
        }
        Ok(OrthogonalWeight { doubled })
    }

    pub fn rank(&self) -> usize {
        self.doubled.len()
    }

    /// Doubled entries `2*lambda_i`.
    pub fn doubled(&self) -> &[u64] {
        &self.doubled
    }
}

/// Strictly decreasing shifted coordinates `a_i = 2*lambda_i + 2(n-i) + 1`.
///
/// Validation pins the parts that are intrinsic to the encoding (length,
/// positivity, strict decrease, single parity matching the tensor power).
/// The cone bound `a_1 <= N + 2n - 1` is *not* enforced here: coordinates
/// outside the reachable cone are legal inputs and simply carry measure zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ACoordinates {
    a: Vec<u64>,
}

impl ACoordinates {
    pub fn new(a: Vec<u64>, config: &AlgebraConfig) -> Result<Self> {
        if a.len() != config.rank() {
            return Err(Error::RankMismatch {
                expected: config.rank(),
                got: a.len(),
            });
        }
        if a.contains(&0) {
            return Err(Error::NonPositive);
        }
        for i in 1..a.len() {
            if a[i] >= a[i - 1] {
                return Err(Error::NotStrictlyDecreasing { index: i });
            }
        }
        let expected = config.parity();
        let got = Parity::of(a[0]);
        if a.iter().any(|&v| Parity::of(v) != got) || got != expected {
            return Err(Error::ParityMismatch {
                tensor_power: config.tensor_power(),
                expected: expected.label(),
                got: got.label(),
            });
        }
        Ok(ACoordinates { a })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.a
    }

    /// Whether the coordinates lie inside the reachable cone `a_1 <= N + 2n - 1`.
    pub fn in_support(&self, config: &AlgebraConfig) -> bool {
        self.a[0] <= config.a_max()
    }
}

/// `lambda_i = l_i + .. + l_{n-1} + l_n/2`, returned doubled.
pub fn dynkin_to_orthogonal(labels: &DynkinLabels) -> OrthogonalWeight {
    let l = labels.as_slice();
    let n = l.len();
    let mut doubled = vec![0u64; n];
    let mut suffix = l[n - 1]; // doubled value of the running tail sum
    doubled[n - 1] = suffix;
    for i in (0..n - 1).rev() {
        suffix += 2 * l[i];
        doubled[i] = suffix;
    }
    OrthogonalWeight { doubled }
}

/// Inverse of [`dynkin_to_orthogonal`]; fails on non-dominant or mixed-parity input.
pub fn orthogonal_to_dynkin(weight: &OrthogonalWeight) -> Result<DynkinLabels> {
    let d = weight.doubled();
    let n = d.len();
    let mut labels = vec![0u64; n];
    labels[n - 1] = d[n - 1];
    for i in 0..n - 1 {
        // Uniform parity makes the difference even.
        labels[i] = (d[i] - d[i + 1]) / 2;
    }
    DynkinLabels::new(labels)
}

/// Shifted coordinates `a_i = 2*lambda_i + 2(n-i) + 1`.
pub fn dynkin_to_acoords(labels: &DynkinLabels, config: &AlgebraConfig) -> Result<ACoordinates> {
    if labels.rank() != config.rank() {
        return Err(Error::RankMismatch {
            expected: config.rank(),
            got: labels.rank(),
        });
    }
    let orth = dynkin_to_orthogonal(labels);
    let n = config.rank() as u64;
    let a = orth
        .doubled()
        .iter()
        .enumerate()
        .map(|(i, &d)| d + 2 * (n - 1 - i as u64) + 1)
        .collect();
    ACoordinates::new(a, config)
}

/// Inverse of [`dynkin_to_acoords`].
pub fn acoords_to_dynkin(coords: &ACoordinates, config: &AlgebraConfig) -> Result<DynkinLabels> {
    let n = config.rank() as u64;
    let doubled: Vec<u64> = coords
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &a)| a - 2 * (n - 1 - i as u64) - 1)
        .collect();
    orthogonal_to_dynkin(&OrthogonalWeight::new(doubled)?)
}

/// Doubled orthogonal coordinates straight from a-coordinates.
pub fn acoords_to_orthogonal(coords: &ACoordinates, config: &AlgebraConfig) -> OrthogonalWeight {
    let n = config.rank() as u64;
    let doubled: Vec<u64> = coords
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &a)| a - 2 * (n - 1 - i as u64) - 1)
        .collect();
    OrthogonalWeight { doubled }
}

/// a-coordinates of the zero weight, `a_i = 2(n-i) + 1`.
///
/// Only valid for even tensor powers (odd parity class); callers that need a
/// minimal even-parity state should use [`minimal_acoords`].
pub fn minimal_acoords(config: &AlgebraConfig) -> ACoordinates {
    let n = config.rank() as u64;
    let base = config.parity().minimum();
    let a = (0..config.rank())
        .map(|i| base + 2 * (n - 1 - i as u64))
        .collect();
    ACoordinates { a }
}

/// Default guard for support enumeration; see [`enumerate_support_with_cap`].
pub const DEFAULT_ENUMERATION_CAP: u128 = 5_000_000;

/// Number of parity-consistent strictly decreasing candidate tuples inside the
/// cone, i.e. `C(B, n)` where `B` counts admissible values per coordinate.
pub fn support_candidate_count(config: &AlgebraConfig) -> u128 {
    let b = match config.parity() {
        Parity::Odd => config.a_max().div_ceil(2),
        Parity::Even => config.a_max() / 2,
    };
    binomial_u128(b, config.rank_u64())
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Iterator over the support in lexicographic order of the coordinate tuple.
pub struct SupportIter {
    config: AlgebraConfig,
    current: Option<Vec<u64>>,
}

impl SupportIter {
    fn minimal_tuple(config: &AlgebraConfig) -> Vec<u64> {
        minimal_acoords(config).a
    }

    /// Advance `tuple` to the lexicographic successor among strictly
    /// decreasing parity tuples below the cone bound; false when exhausted.
    fn advance(&self, tuple: &mut [u64]) -> bool {
        let n = tuple.len();
        let base = self.config.parity().minimum();
        // Rightmost position that can still grow carries the increment; every
        // position right of it resets to its smallest admissible run.
        for pos in (0..n).rev() {
            let ceiling = if pos == 0 {
                self.config.a_max()
            } else {
                tuple[pos - 1] - 2
            };
            if tuple[pos] + 2 <= ceiling {
                tuple[pos] += 2;
                for (j, slot) in tuple.iter_mut().enumerate().skip(pos + 1) {
                    *slot = base + 2 * (n - 1 - j) as u64;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for SupportIter {
    type Item = ACoordinates;

    fn next(&mut self) -> Option<ACoordinates> {
        loop {
            let tuple = self.current.as_mut()?;
            let item = ACoordinates { a: tuple.clone() };
            let mut next = tuple.clone();
            if self.advance(&mut next) {
                self.current = Some(next);
            } else {
                self.current = None;
            }
            // Candidates inside the cone all carry positive multiplicity; the
            // filter stays as a guard against encoding mistakes.
            if crate::measure::multiplicity(&self.config, &item)
                .map(|m| !m.is_zero())
                .unwrap_or(false)
            {
                return Some(item);
            }
            self.current.as_ref()?;
        }
    }
}

/// Enumerate all weights of positive measure, smallest tuple first.
pub fn enumerate_support(config: &AlgebraConfig) -> Result<SupportIter> {
    enumerate_support_with_cap(config, DEFAULT_ENUMERATION_CAP)
}

/// Enumeration with an explicit candidate cap, for callers that know better.
pub fn enumerate_support_with_cap(config: &AlgebraConfig, cap: u128) -> Result<SupportIter> {
    let candidates = support_candidate_count(config);
    if candidates > cap {
        return Err(Error::EnumerationCap { candidates, cap });
    }
    Ok(SupportIter {
        config: *config,
        current: Some(SupportIter::minimal_tuple(config)),
    })
}

/// Serialization of one weight in every coordinate system at once.
#[derive(Debug, Clone, Serialize)]
pub struct WeightRecord {
    pub n: u32,
    #[serde(rename = "N")]
    pub tensor_power: u64,
    pub dynkin: Vec<u64>,
    pub orthogonal_x2: Vec<u64>,
    pub a: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_prob: Option<f64>,
}

impl WeightRecord {
    pub fn from_acoords(
        config: &AlgebraConfig,
        coords: &ACoordinates,
        log_prob: Option<f64>,
    ) -> Result<Self> {
        let dynkin = acoords_to_dynkin(coords, config)?;
        let orth = acoords_to_orthogonal(coords, config);
        Ok(WeightRecord {
            n: config.rank() as u32,
            tensor_power: config.tensor_power(),
            dynkin: dynkin.as_slice().to_vec(),
            orthogonal_x2: orth.doubled().to_vec(),
            a: coords.as_slice().to_vec(),
            log_prob,
        })
    }
}
