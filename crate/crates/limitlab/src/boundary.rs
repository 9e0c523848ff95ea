//! Rotated, rescaled boundary of the generalized Young diagram of one
//! component: a piecewise-linear function with slopes +-1 whose descending
//! segments sit over the particle positions `+-a_i / (2n)`.
//!
//! All breakpoints are integer multiples of `1/(2n)`, so the profile is kept
//! in exact rational form; floating point only appears in evaluation helpers.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use crate::config::AlgebraConfig;
use crate::error::{Error, Result};
use crate::weights::ACoordinates;

/// Piecewise-linear boundary profile `f_n` of a single component.
///
/// `f_n(0) = 1`, `f_n(-x) = 2 - f_n(x)`, slope is -1 on the descending
/// intervals `((a_i - 1)/(2n), (a_i + 1)/(2n))` and their mirror images
/// (merged when they touch) and +1 elsewhere.  The particle density
/// `(1 - f_n')/4` then integrates to exactly 1 over the whole line.
#[derive(Debug, Clone)]
pub struct DiagramBoundary {
    config: AlgebraConfig,
    /// Denominator shared by every breakpoint: 2n.
    denom: i64,
    /// Descending intervals as numerators over `denom`; disjoint, ascending,
    /// symmetric about 0.
    intervals: Vec<(i64, i64)>,
}

impl DiagramBoundary {
    pub fn new(config: &AlgebraConfig, a: &ACoordinates) -> Result<Self> {
        if a.rank() != config.rank() {
            return Err(Error::RankMismatch {
                expected: config.rank(),
                got: a.rank(),
            });
        }
        let denom = 2 * config.rank_u64() as i64;
        // Positive-side intervals in ascending order (a is descending), then
        // mirrors; merge touching neighbours in one sweep.
        let mut raw: Vec<(i64, i64)> = Vec::with_capacity(2 * a.rank());
        for &ai in a.as_slice().iter().rev() {
            let ai = ai as i64;
            raw.push((-ai - 1, -ai + 1));
        }
        raw.reverse();
        for &ai in a.as_slice().iter().rev() {
            let ai = ai as i64;
            raw.push((ai - 1, ai + 1));
        }
        let mut intervals: Vec<(i64, i64)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match intervals.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => intervals.push((lo, hi)),
            }
        }
        Ok(Self {
            config: *config,
            denom,
            intervals,
        })
    }

    pub fn config(&self) -> &AlgebraConfig {
        &self.config
    }

    /// Descending intervals as exact rationals, ascending and disjoint.
    pub fn descending_intervals(&self) -> Vec<(Rational64, Rational64)> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                (
                    Rational64::new(lo, self.denom),
                    Rational64::new(hi, self.denom),
                )
            })
            .collect()
    }

    /// All interval endpoints, ascending, as f64.
    pub fn breakpoints(&self) -> Vec<f64> {
        let d = self.denom as f64;
        self.intervals
            .iter()
            .flat_map(|&(lo, hi)| [lo as f64 / d, hi as f64 / d])
            .collect()
    }

    /// Length of `descending intervals ∩ (0, x)` for `x > 0`, exact.
    fn descending_overlap(&self, x: Rational64) -> Rational64 {
        let mut total = Rational64::zero();
        for &(lo, hi) in &self.intervals {
            let lo = Rational64::new(lo, self.denom).max(Rational64::zero());
            let hi = Rational64::new(hi, self.denom).min(x);
            if hi > lo {
                total += hi - lo;
            }
        }
        total
    }

    /// Exact profile value at a rational point.
    pub fn value_exact(&self, x: Rational64) -> Rational64 {
        let len = self.descending_overlap(x.abs());
        if x.is_negative() {
            Rational64::one() + x + len * 2
        } else {
            Rational64::one() + x - len * 2
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = self.denom as f64;
        let ax = x.abs();
        let mut len = 0.0;
        for &(lo, hi) in &self.intervals {
            let lo = (lo as f64 / d).max(0.0);
            let hi = (hi as f64 / d).min(ax);
            if hi > lo {
                len += hi - lo;
            }
        }
        1.0 + x - 2.0 * x.signum() * len
    }

    /// Profile slope at x (right-continuous at breakpoints): +-1.
    pub fn slope(&self, x: f64) -> f64 {
        let d = self.denom as f64;
        for &(lo, hi) in &self.intervals {
            if x >= lo as f64 / d && x < hi as f64 / d {
                return -1.0;
            }
        }
        1.0
    }

    /// Rescaled particle density `(1 - f_n')/4`, values in {0, 1/2}.
    pub fn density(&self, x: f64) -> f64 {
        (1.0 - self.slope(x)) / 4.0
    }

    /// Exact mass of the particle density over the whole line; always 1.
    pub fn density_mass(&self) -> Rational64 {
        let total: i64 = self.intervals.iter().map(|&(lo, hi)| hi - lo).sum();
        Rational64::new(total, 2 * self.denom)
    }

    /// Exact `integral of f_n'` over the window [-c/2, c/2], via the
    /// antisymmetry `f(-x) = 2 - f(x)`.  Equals `c_n - 4` whenever the
    /// largest descending interval stays inside the window, i.e. for
    /// `a_1 <= N + 2n - 2`; the extreme weight `a_1 = N + 2n - 1` sticks out
    /// by `1/(2n)` and shifts the value accordingly.
    pub fn slope_integral(&self) -> Rational64 {
        let half_c = Rational64::new(self.config.a_max() as i64, self.denom);
        self.value_exact(half_c) * 2 - 2
    }

    /// Slope segments over [-w, w] for the bilinear forms: contiguous
    /// `(lo, hi, slope)` triples with slope in {+1, -1}, intervals clipped
    /// to the window.
    pub fn slope_segments(&self, half_width: f64) -> Vec<(f64, f64, f64)> {
        let d = self.denom as f64;
        let mut segments = Vec::new();
        let mut cursor = -half_width;
        for &(lo, hi) in &self.intervals {
            let lo = (lo as f64 / d).max(-half_width);
            let hi = (hi as f64 / d).min(half_width);
            if hi <= lo {
                continue;
            }
            if lo > cursor {
                segments.push((cursor, lo, 1.0));
            }
            segments.push((lo, hi, -1.0));
            cursor = hi;
        }
        if cursor < half_width {
            segments.push((cursor, half_width, 1.0));
        }
        segments
    }

    /// Largest-magnitude breakpoint, as f64.
    pub fn extent(&self) -> f64 {
        self.intervals
            .last()
            .map(|&(_, hi)| hi as f64 / self.denom as f64)
            .unwrap_or(0.0)
    }

    /// Supremum distance to another profile over [-w, w], estimated on the
    /// union of this profile's breakpoints and a uniform grid.  Both curves
    /// are 1-Lipschitz in practice, so the grid gap bounds the estimate's
    /// defect.
    pub fn sup_distance_to<F: Fn(f64) -> f64>(&self, g: F, half_width: f64, grid: usize) -> f64 {
        let mut best: f64 = 0.0;
        for x in self.breakpoints() {
            if x.abs() <= half_width {
                best = best.max((self.value(x) - g(x)).abs());
            }
        }
        for k in 0..=grid {
            let x = -half_width + 2.0 * half_width * k as f64 / grid as f64;
            best = best.max((self.value(x) - g(x)).abs());
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::minimal_acoords;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};

    fn cfg(n: u32, power: u64) -> AlgebraConfig {
        AlgebraConfig::new(n, power).unwrap()
    }

    fn coords(config: &AlgebraConfig, a: &[u64]) -> ACoordinates {
        ACoordinates::new(a.to_vec(), config).unwrap()
    }

    fn random_coords(config: &AlgebraConfig, rng: &mut impl Rng) -> ACoordinates {
        // random strictly-decreasing in-cone tuple of the right parity
        let n = config.rank();
        let mut picks = std::collections::BTreeSet::new();
        let lo = config.parity().minimum() as i64;
        let hi = config.a_max() as i64;
        while picks.len() < n {
            let v = lo + 2 * rng.gen_range(0..=(hi - lo) / 2);
            picks.insert(v as u64);
        }
        let mut a: Vec<u64> = picks.into_iter().collect();
        a.reverse();
        ACoordinates::new(a, config).unwrap()
    }

    #[test]
    fn rank_one_extreme_weight_shapes() {
        // a = (3) at n=1, N=2: descent over (1, 2), sticking out past c/2 = 3/2.
        let config = cfg(1, 2);
        let b = DiagramBoundary::new(&config, &coords(&config, &[3])).unwrap();
        assert_eq!(
            b.descending_intervals(),
            vec![
                (Rational64::new(-2, 1), Rational64::new(-1, 1)),
                (Rational64::new(1, 1), Rational64::new(2, 1)),
            ]
        );
        assert_eq!(b.value(0.0), 1.0);
        assert_eq!(b.value(1.0), 2.0);
        assert_eq!(b.value(2.0), 1.0);
        assert_eq!(b.value(1.5), 1.5);
        assert!(b.density_mass().is_one());
        // The extreme weight's interval escapes the window: integral is
        // 2 f(3/2) - 2 = 1, not c - 4 = -1.
        assert_eq!(b.slope_integral(), Rational64::one());
    }

    #[test]
    fn trivial_weight_descends_through_the_whole_staircase() {
        // Zero weight at any rank: merged staircase intervals form (-1, 1),
        // and the profile is the straight line 1 - x there.  The profile is
        // point-antisymmetric about (0, 1), not an even function.
        for n in 1..=5u32 {
            let config = cfg(n, 4);
            let a = minimal_acoords(&config);
            let b = DiagramBoundary::new(&config, &a).unwrap();
            assert_eq!(
                b.descending_intervals(),
                vec![(Rational64::new(-1, 1), Rational64::one())]
            );
            assert_eq!(b.value(0.5), 0.5); // 1 - x inside
            assert_eq!(b.value(-0.5), 1.5);
            assert_eq!(b.value(-2.0), 1.0); // 2 - f(2) by antisymmetry
            assert!(b.density_mass().is_one());
        }
    }

    #[test]
    fn interior_weight_slope_integral_is_c_minus_four() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6u32);
            let power = rng.gen_range(2..=20u64);
            let config = cfg(n, power);
            let a = random_coords(&config, &mut rng);
            let b = DiagramBoundary::new(&config, &a).unwrap();
            assert!(b.density_mass().is_one(), "a = {:?}", a.as_slice());
            if a.as_slice()[0] < config.a_max() {
                let c = config.c_ratio();
                assert_eq!(b.slope_integral(), c - 4, "a = {:?}", a.as_slice());
            }
        }
    }

    #[test]
    fn antisymmetry_and_lipschitz_on_random_profiles() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let n = rng.gen_range(1..=5u32);
            let config = cfg(n, rng.gen_range(1..=12u64));
            let b = DiagramBoundary::new(&config, &random_coords(&config, &mut rng)).unwrap();
            let w = b.extent() + 1.0;
            let mut prev = None;
            for k in 0..=300 {
                let x = -w + 2.0 * w * k as f64 / 300.0;
                let v = b.value(x);
                assert!((b.value(-x) - (2.0 - v)).abs() < 1e-12);
                if let Some((px, pv)) = prev {
                    let rate: f64 = (v - pv) / (x - px);
                    assert!(rate.abs() <= 1.0 + 1e-9);
                }
                prev = Some((x, v));
            }
        }
    }

    #[test]
    fn exact_and_float_values_agree() {
        let config = cfg(3, 7);
        let a = coords(&config, &[10, 6, 2]);
        let b = DiagramBoundary::new(&config, &a).unwrap();
        for num in -30..=30i64 {
            let x = Rational64::new(num, 12);
            let exact = b.value_exact(x).to_f64().unwrap();
            let xf = num as f64 / 12.0;
            assert!((b.value(xf) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_segments_tile_the_window() {
        let config = cfg(2, 6);
        let a = coords(&config, &[7, 3]);
        let b = DiagramBoundary::new(&config, &a).unwrap();
        let w = config.c_f64() / 2.0;
        let segs = b.slope_segments(w);
        assert!((segs.first().unwrap().0 + w).abs() < 1e-12);
        assert!((segs.last().unwrap().1 - w).abs() < 1e-12);
        for pair in segs.windows(2) {
            assert!((pair[0].1 - pair[1].0).abs() < 1e-12);
        }
        // total signed slope length equals the exact slope integral
        let total: f64 = segs.iter().map(|&(lo, hi, s)| s * (hi - lo)).sum();
        assert!((total - b.slope_integral().to_f64().unwrap()).abs() < 1e-12);
        // density from slope: (1 - f')/4 is 1/2 exactly on descents
        assert_eq!(b.density(7.0 / 4.0), 0.5);
        assert_eq!(b.density(0.2), 0.0);
    }

    #[test]
    fn sup_distance_to_self_is_zero() {
        let config = cfg(2, 4);
        let a = coords(&config, &[5, 3]);
        let b = DiagramBoundary::new(&config, &a).unwrap();
        let d = b.sup_distance_to(|x| b.value(x), 3.0, 500);
        assert_eq!(d, 0.0);
    }
}
