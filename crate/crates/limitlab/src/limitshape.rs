//! The deterministic limit of rescaled diagram boundaries at fixed
//! `c = (N + 2n - 1)/n`: closed-form density, its singular-integral
//! representation, the integrated shape, and equilibrium-condition checks.
//!
//! The density has one bump component shared by both regimes,
//!
//! ```text
//! bump(x) = (1/4pi) [ atan((-c(x-4) - 8)/D) + atan((c(x+4) - 8)/D) ],
//! D = |c - 4| sqrt(2c - 4 - x^2),
//! ```
//!
//! with `rho = bump` above the phase transition (c > 4) and
//! `rho = 1/2 - bump` below it (the bump is then the defect density rho_1
//! of the frozen zone).  At c = 4 the density is the constant 1/4.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::{
    gauss_panel, integrate, integrate_piecewise, log_antiderivative, MonotoneCubic,
};

const PI: f64 = std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeRegime {
    /// 2 <= c < 4: frozen zones of density 1/2 flank the bump.
    Subcritical,
    /// c = 4: constant density 1/4, support touching the wall.
    Critical,
    /// c > 4: a single bump of density < 1/2 strictly inside the wall.
    Supercritical,
}

/// Equilibrium-condition verification data for one value of c.
#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    /// Numerical estimate of the Lagrange constant, U(0).
    pub ell_estimate: f64,
    /// max |U(x) - ell| over the interior grid.
    pub max_residual_on_support: f64,
    /// min U(x) - ell over the gap grid between the endpoint and the wall.
    pub min_slack_off_support: f64,
    /// Human-readable description of the grids used.
    pub grid: String,
}

/// Limit shape at a fixed ratio c; immutable, with lazily built caches.
#[derive(Debug)]
pub struct LimitShape {
    c: f64,
    endpoint_a: f64,
    regime: ShapeRegime,
    /// Cumulative bump mass on a theta grid: R(theta) = int_0^{A sin theta} bump.
    cumulative: OnceLock<MonotoneCubic>,
    /// Self-energy of the bump: double log-kernel integral over its support.
    bump_energy: OnceLock<f64>,
}

impl LimitShape {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() || c < 2.0 {
            return Err(Error::BadShapeParameter {
                c,
                reason: "the ratio must satisfy c >= 2".into(),
            });
        }
        let endpoint_a = (2.0 * c - 4.0).sqrt();
        let regime = if c == 4.0 {
            ShapeRegime::Critical
        } else if c > 4.0 {
            ShapeRegime::Supercritical
        } else {
            ShapeRegime::Subcritical
        };
        let shape = Self {
            c,
            endpoint_a,
            regime,
            cumulative: OnceLock::new(),
            bump_energy: OnceLock::new(),
        };
        debug_assert!(shape.endpoint_equation_residual() < 1e-12);
        Ok(shape)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Support endpoint of the bump, a = sqrt(2c - 4).
    pub fn endpoint(&self) -> f64 {
        self.endpoint_a
    }

    pub fn regime(&self) -> ShapeRegime {
        self.regime
    }

    /// Residual of the defining endpoint equation
    /// `(c/4)(1 - sqrt(1 - (2a/c)^2)) = rhs`, with rhs = 1 above the
    /// transition and (c - 2)/2 below it.
    ///
    /// Evaluated with `a^2` eliminated exactly: near c = 4 the naive
    /// `1 - (2a/c)^2` cancels catastrophically, while `((c-4)/c)^2` is
    /// error-free.  The stored endpoint is checked against `a^2 = 2c - 4`
    /// separately so the substitution stays honest.
    pub fn endpoint_equation_residual(&self) -> f64 {
        let a2 = self.endpoint_a * self.endpoint_a;
        let construction = (a2 - (2.0 * self.c - 4.0)).abs() / (2.0 * self.c - 4.0).max(1.0);
        let ratio = (self.c - 4.0).abs() / self.c;
        let lhs = self.c / 4.0 * (1.0 - ratio);
        let rhs = match self.regime {
            ShapeRegime::Subcritical => (self.c - 2.0) / 2.0,
            _ => 1.0,
        };
        (lhs - rhs).abs().max(construction)
    }

    /// The shared arctan bump; only meaningful for |x| < endpoint and c != 4.
    pub(crate) fn bump(&self, x: f64) -> f64 {
        let d = (self.c - 4.0).abs() * (2.0 * self.c - 4.0 - x * x).sqrt();
        let n1 = -self.c * (x - 4.0) - 8.0;
        let n2 = self.c * (x + 4.0) - 8.0;
        ((n1 / d).atan() + (n2 / d).atan()) / (4.0 * PI)
    }

    /// The density rho(x): even, in [0, 1/2], total mass 1, supported in
    /// [-c/2, c/2].
    pub fn density(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax > self.c / 2.0 {
            return 0.0;
        }
        match self.regime {
            ShapeRegime::Critical => {
                if ax < 2.0 {
                    0.25
                } else {
                    0.0
                }
            }
            ShapeRegime::Supercritical => {
                if ax < self.endpoint_a {
                    self.bump(x)
                } else {
                    0.0
                }
            }
            ShapeRegime::Subcritical => {
                if ax < self.endpoint_a {
                    0.5 - self.bump(x)
                } else {
                    0.5
                }
            }
        }
    }

    /// The bump component on its own: rho itself above the transition, the
    /// frozen-zone defect rho_1 = 1/2 - rho below it.  This is the density
    /// entering the equilibrium conditions and the bilinear forms.
    pub fn rho_hat(&self, x: f64) -> f64 {
        if x.abs() >= self.endpoint_a {
            return 0.0;
        }
        match self.regime {
            ShapeRegime::Critical => 0.25,
            _ => self.bump(x),
        }
    }

    /// Singular-integral representation of the density,
    ///
    /// ```text
    /// I(x) = sqrt(2c-4-x^2)/pi^2 * PV int_{-a}^{a}
    ///        (1/4) ln((c/2+s)/(c/2-s)) / (sqrt(2c-4-s^2) (s-x)) ds,
    /// ```
    ///
    /// returning I(x) above the transition and 1/2 - I(x) below it.  The
    /// substitution s = a sin(theta) removes the endpoint singularities and
    /// the principal value is taken by symmetric pairing around s = x.
    pub fn density_integral_form(&self, x: f64) -> Result<f64> {
        if self.c <= 2.0 || self.regime == ShapeRegime::Critical {
            return Err(Error::BadShapeParameter {
                c: self.c,
                reason: "integral form needs c > 2 and c != 4".into(),
            });
        }
        let a = self.endpoint_a;
        if x.abs() >= a - 1e-9 {
            return Err(Error::OutsideDomain { x, half_width: a });
        }
        let half_c = self.c / 2.0;
        let q = |s: f64| 0.25 * (((half_c + s) / (half_c - s)).ln());
        let g = |theta: f64| {
            let s = a * theta.sin();
            q(s) / (s - x)
        };
        let theta0 = (x / a).asin();
        let w = (PI / 2.0 - theta0).min(theta0 + PI / 2.0);
        // Symmetric pairing: the pole at theta0 cancels between the two legs.
        let paired = integrate(&|t: f64| g(theta0 + t) + g(theta0 - t), 0.0, w, 1e-10);
        let rest = if theta0 >= 0.0 {
            integrate(&g, -PI / 2.0, theta0 - w, 1e-10)
        } else {
            integrate(&g, theta0 + w, PI / 2.0, 1e-10)
        };
        let bump = (a * a - x * x).sqrt() / (PI * PI) * (paired + rest);
        Ok(match self.regime {
            ShapeRegime::Subcritical => 0.5 - bump,
            _ => bump,
        })
    }

    fn cumulative_bump(&self) -> &MonotoneCubic {
        self.cumulative.get_or_init(|| {
            // R(theta_k) by per-segment Gauss panels; the integrand is smooth
            // in theta, so each panel is exact to machine precision.  The
            // knot count is set by the interpolant's derivative error O(h^2):
            // 4096 knots keep the shape slope within ~1e-7 of the density.
            let segments = 4096usize;
            let a = self.endpoint_a;
            let f = |theta: f64| self.rho_hat(a * theta.sin()) * a * theta.cos();
            let mut thetas = Vec::with_capacity(segments + 1);
            let mut values = Vec::with_capacity(segments + 1);
            let mut acc = crate::numeric::NeumaierSum::new();
            thetas.push(0.0);
            values.push(0.0);
            for k in 1..=segments {
                let lo = PI / 2.0 * (k - 1) as f64 / segments as f64;
                let hi = PI / 2.0 * k as f64 / segments as f64;
                acc.add(gauss_panel(&f, lo, hi, 20));
                thetas.push(hi);
                values.push(acc.value());
            }
            MonotoneCubic::new(thetas, values)
        })
    }

    /// Cumulative bump mass int_0^x rho_hat(t) dt for x in [0, endpoint].
    fn bump_cumulative(&self, x: f64) -> f64 {
        if self.endpoint_a == 0.0 || x <= 0.0 {
            return 0.0;
        }
        let ratio = (x / self.endpoint_a).min(1.0);
        self.cumulative_bump().eval(ratio.asin())
    }

    /// The limit shape f(x) = 1 + int_0^x (1 - 4 rho); piecewise-exact tails
    /// plus the cached cumulative inside the bump.
    pub fn shape(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 2.0 - self.shape(-x);
        }
        let a = self.endpoint_a;
        match self.regime {
            ShapeRegime::Critical => {
                if x < 2.0 {
                    1.0
                } else {
                    x - 1.0
                }
            }
            ShapeRegime::Supercritical => {
                if x >= a {
                    x - 1.0
                } else {
                    1.0 + x - 4.0 * self.bump_cumulative(x)
                }
            }
            ShapeRegime::Subcritical => {
                if x >= self.c / 2.0 {
                    x - 1.0
                } else if x >= a {
                    self.c - 1.0 - x
                } else {
                    // rho = 1/2 - rho_hat inside the bump
                    1.0 - x + 4.0 * self.bump_cumulative(x)
                }
            }
        }
    }

    /// Total mass of rho and, below the transition, of the defect rho_1;
    /// both by honest quadrature of the closed forms.
    pub fn check_normalization(&self) -> (f64, Option<f64>) {
        if self.regime == ShapeRegime::Critical {
            // exact: 1/4 over (-2, 2)
            return (1.0, None);
        }
        let a = self.endpoint_a;
        let bump_half = if a == 0.0 {
            0.0
        } else {
            integrate(
                &|theta: f64| self.rho_hat(a * theta.sin()) * a * theta.cos(),
                0.0,
                PI / 2.0,
                1e-11,
            )
        };
        match self.regime {
            ShapeRegime::Supercritical => (2.0 * bump_half, None),
            _ => (self.c / 2.0 - 2.0 * bump_half, Some(2.0 * bump_half)),
        }
    }

    /// Logarithmic potential of the bump, `int rho_hat(y) ln|x-y|^{-1} dy`,
    /// for any real x; safe across the kernel singularity.
    pub fn bump_log_potential(&self, x: f64) -> f64 {
        self.bump_log_potential_tol(x, 1e-10)
    }

    fn bump_log_potential_tol(&self, x: f64, tol: f64) -> f64 {
        let a = self.endpoint_a;
        if a == 0.0 {
            return 0.0;
        }
        if x.abs() < a {
            // subtract the singularity: the difference kernel is continuous
            // at y = x, and the subtracted charge integrates in closed form
            let rho_x = self.rho_hat(x);
            let f = |theta: f64| {
                let y = a * theta.sin();
                if y == x {
                    return 0.0;
                }
                -(self.rho_hat(y) - rho_x) * (x - y).abs().ln() * a * theta.cos()
            };
            let cut = (x / a).asin();
            let regular = integrate_piecewise(&f, &[-PI / 2.0, cut, PI / 2.0], tol);
            regular - rho_x * (log_antiderivative(a + x) + log_antiderivative(a - x))
        } else {
            let f = |theta: f64| {
                let y = a * theta.sin();
                -self.rho_hat(y) * (x - y).abs().ln() * a * theta.cos()
            };
            integrate(&f, -PI / 2.0, PI / 2.0, tol)
        }
    }

    /// Self-energy of the bump, `intint rho_hat(x) rho_hat(y) ln|x-y|^{-1}`,
    /// computed once by nested quadrature and cached.
    pub fn bump_self_energy(&self) -> f64 {
        *self.bump_energy.get_or_init(|| {
            let a = self.endpoint_a;
            if a == 0.0 {
                return 0.0;
            }
            let f = |theta: f64| {
                let x = a * theta.sin();
                self.rho_hat(x) * self.bump_log_potential_tol(x, 1e-12) * a * theta.cos()
            };
            integrate(&f, -PI / 2.0, PI / 2.0, 2e-10)
        })
    }

    /// Verifies the minimizer criteria for the effective potential
    /// `U(x) = int rho_hat(y) ln|x-y|^{-1} dy + V0(x)`: constancy on the
    /// bump support and nonnegative slack on the gap up to the wall.
    pub fn equilibrium_residuals(&self, grid_size: usize) -> Result<EquilibriumReport> {
        if self.c <= 2.0 || self.regime == ShapeRegime::Critical {
            return Err(Error::BadShapeParameter {
                c: self.c,
                reason: "equilibrium check needs c > 2 and c != 4".into(),
            });
        }
        if grid_size < 64 {
            return Err(Error::BadShapeParameter {
                c: self.c,
                reason: format!("grid_size {grid_size} below the minimum of 64"),
            });
        }
        let params = crate::asymptotics::PotentialParams::new(self.c)?;
        let u = |x: f64| {
            self.bump_log_potential(x) + crate::asymptotics::potential_v0(&params, x).unwrap()
        };
        let ell = u(0.0);
        let a = self.endpoint_a;
        let mut max_residual: f64 = 0.0;
        for j in 0..grid_size {
            let x = a * (2.0 * (j as f64 + 0.5) / grid_size as f64 - 1.0);
            max_residual = max_residual.max((u(x) - ell).abs());
        }
        let mut min_slack = f64::INFINITY;
        let gap = self.c / 2.0 - a;
        for j in 0..grid_size {
            let x = a + gap * (j as f64 + 0.5) / grid_size as f64;
            min_slack = min_slack.min(u(x) - ell);
        }
        Ok(EquilibriumReport {
            ell_estimate: ell,
            max_residual_on_support: max_residual,
            min_slack_off_support: min_slack,
            grid: format!(
                "{grid_size} points inside (-{a:.6}, {a:.6}) and {grid_size} in the gap to {:.6}",
                self.c / 2.0
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_values_and_residuals() {
        assert!((LimitShape::new(12.0).unwrap().endpoint() - 20f64.sqrt()).abs() < 1e-12);
        assert_eq!(LimitShape::new(4.0).unwrap().endpoint(), 2.0);
        assert_eq!(LimitShape::new(2.0).unwrap().endpoint(), 0.0);
        for c in [2.0, 2.5, 3.0, 3.9, 4.0, 4.1, 6.0, 8.0, 12.0, 30.0] {
            assert!(
                LimitShape::new(c).unwrap().endpoint_equation_residual() < 1e-12,
                "c = {c}"
            );
        }
        assert!(LimitShape::new(1.5).is_err());
    }

    #[test]
    fn density_spot_values() {
        let s8 = LimitShape::new(8.0).unwrap();
        assert!((s8.density(0.0) - 1.0 / 6.0).abs() < 1e-10);
        assert_eq!(s8.density(12f64.sqrt()), 0.0);
        assert_eq!(s8.density(3.9), 0.0); // between endpoint and wall
        let s2 = LimitShape::new(2.0).unwrap();
        assert_eq!(s2.density(0.5), 0.5);
        assert_eq!(s2.density(1.5), 0.0);
        let s4 = LimitShape::new(4.0).unwrap();
        assert_eq!(s4.density(1.3), 0.25);
        assert_eq!(s4.density(2.5), 0.0);
    }

    #[test]
    fn density_symmetry_and_range() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for c in [2.5, 3.0, 3.5, 4.0, 5.0, 8.0, 12.0] {
            let shape = LimitShape::new(c).unwrap();
            for _ in 0..200 {
                let x = rng.gen_range(-0.6 * c..0.6 * c);
                let rho = shape.density(x);
                assert!((rho - shape.density(-x)).abs() < 1e-12, "c={c} x={x}");
                assert!((0.0..=0.5).contains(&rho), "c={c} x={x} rho={rho}");
                if c > 4.0 {
                    assert!(rho < 0.5);
                }
            }
        }
        // frozen zone is exactly 1/2
        let s3 = LimitShape::new(3.0).unwrap();
        let mid = (s3.endpoint() + 1.5) / 2.0;
        assert_eq!(s3.density(mid), 0.5);
    }

    #[test]
    fn critical_density_is_approached_continuously() {
        // just off the transition the density is uniformly close to 1/4
        for c in [4.0 - 1e-6, 4.0 + 1e-6] {
            let shape = LimitShape::new(c).unwrap();
            for k in 0..=24 {
                let x = -1.9 + 3.8 * k as f64 / 24.0;
                assert!(
                    (shape.density(x) - 0.25).abs() <= 1e-3,
                    "c={c} x={x} rho={}",
                    shape.density(x)
                );
            }
        }
    }

    #[test]
    fn integral_form_matches_closed_form_at_spots() {
        let s8 = LimitShape::new(8.0).unwrap();
        assert!((s8.density_integral_form(0.0).unwrap() - 1.0 / 6.0).abs() < 1e-6);
        for x in [0.4, 1.7, -2.6] {
            let err = (s8.density_integral_form(x).unwrap() - s8.density(x)).abs();
            assert!(err < 1e-6, "x = {x}: {err}");
        }
        let s3 = LimitShape::new(3.0).unwrap();
        for x in [0.0, 0.9, -1.2] {
            let err = (s3.density_integral_form(x).unwrap() - s3.density(x)).abs();
            assert!(err < 1e-6, "x = {x}: {err}");
        }
        // refused at the ill-conditioned endpoint and at the transition
        assert!(s8.density_integral_form(12f64.sqrt() - 1e-12).is_err());
        assert!(LimitShape::new(4.0)
            .unwrap()
            .density_integral_form(0.0)
            .is_err());
    }

    #[test]
    fn shape_tails_and_interior() {
        let s8 = LimitShape::new(8.0).unwrap();
        assert_eq!(s8.shape(0.0), 1.0);
        let a = s8.endpoint();
        assert!((s8.shape(a) - (a - 1.0)).abs() < 1e-8);
        assert_eq!(s8.shape(a + 0.7), a + 0.7 - 1.0);
        let s3 = LimitShape::new(3.0).unwrap();
        let a3 = s3.endpoint();
        assert!((s3.shape(a3) - (3.0 - 1.0 - a3)).abs() < 1e-8);
        assert!((s3.shape(1.45) - (2.0 - 1.45)).abs() < 1e-12); // frozen slope -1
        assert_eq!(s3.shape(2.0), 1.0); // x - 1 past the wall
        let s2 = LimitShape::new(2.0).unwrap();
        assert_eq!(s2.shape(0.3), 0.7); // tent
        assert_eq!(s2.shape(1.8), 0.8);
        let s4 = LimitShape::new(4.0).unwrap();
        assert_eq!(s4.shape(1.0), 1.0); // flat top
        assert_eq!(s4.shape(3.0), 2.0);
    }

    #[test]
    fn shape_derivative_matches_density() {
        for c in [2.5, 3.0, 5.0, 8.0] {
            let shape = LimitShape::new(c).unwrap();
            let h = 1e-5;
            for k in 1..40 {
                let x = -0.45 * c + 0.9 * c * k as f64 / 40.0;
                if (x.abs() - shape.endpoint()).abs() < 0.05 || (x.abs() - c / 2.0).abs() < 0.05 {
                    continue;
                }
                let deriv = (shape.shape(x + h) - shape.shape(x - h)) / (2.0 * h);
                let expect = 1.0 - 4.0 * shape.density(x);
                assert!((deriv - expect).abs() < 1e-6, "c={c} x={x}");
            }
        }
    }

    #[test]
    fn antisymmetry_and_lipschitz() {
        for c in [2.5, 4.0, 7.0] {
            let shape = LimitShape::new(c).unwrap();
            let mut prev: Option<(f64, f64)> = None;
            for k in 0..=400 {
                let x = -0.7 * c + 1.4 * c * k as f64 / 400.0;
                let v = shape.shape(x);
                assert!((shape.shape(-x) - (2.0 - v)).abs() < 1e-10, "c={c} x={x}");
                if let Some((px, pv)) = prev {
                    assert!(((v - pv) / (x - px)).abs() <= 1.0 + 1e-6);
                }
                prev = Some((x, v));
            }
        }
    }

    #[test]
    fn masses_by_quadrature() {
        for c in [2.0, 2.5, 3.0, 3.5, 5.0, 6.0, 8.0, 12.0] {
            let shape = LimitShape::new(c).unwrap();
            let (total, rho1) = shape.check_normalization();
            assert!((total - 1.0).abs() < 1e-8, "c = {c}: {total}");
            if c < 4.0 {
                let got = rho1.unwrap();
                assert!((got - (c - 2.0) / 2.0).abs() < 1e-8, "c = {c}: {got}");
            } else {
                assert!(rho1.is_none());
            }
        }
    }

    #[test]
    fn equilibrium_conditions_hold() {
        for c in [3.0, 8.0] {
            let shape = LimitShape::new(c).unwrap();
            let report = shape.equilibrium_residuals(128).unwrap();
            assert!(
                report.max_residual_on_support <= 1e-4,
                "c = {c}: {}",
                report.max_residual_on_support
            );
            assert!(
                report.min_slack_off_support >= -1e-6,
                "c = {c}: {}",
                report.min_slack_off_support
            );
            assert!(report.ell_estimate.is_finite());
        }
        assert!(LimitShape::new(4.0)
            .unwrap()
            .equilibrium_residuals(128)
            .is_err());
        assert!(LimitShape::new(8.0)
            .unwrap()
            .equilibrium_residuals(32)
            .is_err());
    }
}
