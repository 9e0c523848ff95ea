use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate parity class shared by all a-coordinates of one experiment.
///
/// Tensor powers of the spinor weight shift every orthogonal coordinate by
/// half-integers, so after `N` steps the a-coordinates are all odd when `N`
/// is even and all even when `N` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(value: u64) -> Parity {
        if value.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        }
    }

    /// Smallest positive integer in this parity class.
    pub fn minimum(self) -> u64 {
        match self {
            Parity::Odd => 1,
            Parity::Even => 2,
        }
    }
}

/// Rank and tensor power of one experiment: `so(2n+1)` acting on the `N`-th
/// tensor power of its spinor representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraConfig {
    n: u32,
    tensor_power: u64,
}

impl AlgebraConfig {
    pub fn new(n: u32, tensor_power: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroRank);
        }
        if tensor_power == 0 {
            return Err(Error::ZeroTensorPower);
        }
        Ok(AlgebraConfig { n, tensor_power })
    }

    pub fn rank(&self) -> usize {
        self.n as usize
    }

    pub fn rank_u64(&self) -> u64 {
        u64::from(self.n)
    }

    pub fn tensor_power(&self) -> u64 {
        self.tensor_power
    }

    /// Exact finite-size ratio `(N + 2n - 1)/n` controlling the rescaled geometry.
    pub fn c_ratio(&self) -> Rational64 {
        let n = i64::from(self.n);
        Rational64::new(self.tensor_power as i64 + 2 * n - 1, n)
    }

    /// Alternative convention `N/n + 2`; differs from [`c_ratio`](Self::c_ratio) by `1/n`.
    pub fn c_caption(&self) -> Rational64 {
        let n = i64::from(self.n);
        Rational64::new(self.tensor_power as i64, n) + 2
    }

    pub fn c_f64(&self) -> f64 {
        self.c_ratio().to_f64().unwrap()
    }

    /// Largest reachable first a-coordinate, `N + 2n - 1`.
    pub fn a_max(&self) -> u64 {
        self.tensor_power + 2 * self.rank_u64() - 1
    }

    /// Parity of every a-coordinate in the support (opposite to `N`).
    pub fn parity(&self) -> Parity {
        if self.tensor_power.is_multiple_of(2) {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_caption_differ_by_one_over_n() {
        let cfg = AlgebraConfig::new(20, 200).unwrap();
        assert_eq!(cfg.c_ratio(), Rational64::new(239, 20));
        assert_eq!(cfg.c_caption(), Rational64::new(12, 1));
        assert_eq!(cfg.c_caption() - cfg.c_ratio(), Rational64::new(1, 20));
    }

    #[test]
    fn parity_tracks_tensor_power() {
        assert_eq!(AlgebraConfig::new(2, 2).unwrap().parity(), Parity::Odd);
        assert_eq!(AlgebraConfig::new(2, 1).unwrap().parity(), Parity::Even);
    }

    #[test]
    fn degenerate_configs_rejected() {
        assert!(AlgebraConfig::new(0, 5).is_err());
        assert!(AlgebraConfig::new(3, 0).is_err());
    }
}
