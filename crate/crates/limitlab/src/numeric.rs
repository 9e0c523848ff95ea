//! Small numeric toolbox: compensated summation, Gauss-Legendre rules with
//! runtime-computed nodes, an adaptive panel integrator and a monotone cubic
//! interpolant.  Nothing here knows about weights or measures.

use std::sync::OnceLock;

/// Neumaier variant of Kahan summation; keeps a running compensation term so
/// long alternating-sign sums stay accurate to the last few ulps.
#[derive(Debug, Clone, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for x in items {
        acc.add(x);
    }
    acc.value()
}

/// Nodes and weights of the k-point Gauss-Legendre rule on [-1, 1].
///
/// Computed at runtime by Newton iteration on the Legendre recurrence from
/// the Chebyshev-like initial guess `cos(pi (i - 1/4) / (k + 1/2))`; that
/// guess is accurate enough that a handful of iterations reach full `f64`
/// precision for any practical order.
pub fn gauss_legendre(k: usize) -> &'static GaussRule {
    assert!((1..=128).contains(&k), "unsupported rule order {k}");
    static TABLES: OnceLock<Vec<OnceLock<GaussRule>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (0..=128).map(|_| OnceLock::new()).collect());
    tables[k].get_or_init(|| compute_gauss_legendre(k))
}

/// Quadrature nodes and matching weights.
pub type GaussRule = (Vec<f64>, Vec<f64>);

fn compute_gauss_legendre(k: usize) -> GaussRule {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre value p and derivative dp at x via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=k {
                let j = j as f64;
                let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            let p = if k == 1 { x } else { p1 };
            let pm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed k-point Gauss-Legendre estimate of `integral of f over [a, b]`.
pub fn gauss_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, k: usize) -> f64 {
    gauss_panel_with_abs(f, a, b, k).0
}

/// Gauss-Legendre estimates of `(integral of f, integral of |f|)`; the second
/// sets the floating-point noise floor of the first.
fn gauss_panel_with_abs<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, k: usize) -> (f64, f64) {
    let (nodes, weights) = gauss_legendre(k);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = NeumaierSum::new();
    let mut abs = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let v = w * f(mid + half * x);
        // When a panel is a few ulps wide, a node can round exactly onto a
        // log-singular cut point and sample a non-finite value.  The true
        // contribution of that sliver is negligible next to any tolerance,
        // so drop the sample rather than poison the whole panel sum.
        if !v.is_finite() {
            continue;
        }
        acc.add(v);
        abs += v.abs();
    }
    (half * acc.value(), half.abs() * abs)
}

/// Adaptive integrator: bisects any panel where a high-order Gauss rule and
/// its refinement disagree, down to the requested absolute tolerance.
///
/// Gauss nodes never touch panel endpoints, so integrands may blow up there.
/// The tolerance contract holds for smooth integrands and logarithmic
/// endpoint singularities; algebraic singularities converge but saturate
/// around 1e-9, so callers substitute those away first.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut acc = NeumaierSum::new();
    adaptive_step(f, a, b, tol.max(1e-15), 0, &mut acc);
    acc.value()
}

fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    acc: &mut NeumaierSum,
) {
    let (coarse, _) = gauss_panel_with_abs(f, a, b, 15);
    let mid = 0.5 * (a + b);
    let (fine_lo, abs_lo) = gauss_panel_with_abs(f, a, mid, 15);
    let (fine_hi, abs_hi) = gauss_panel_with_abs(f, mid, b, 15);
    let fine = fine_lo + fine_hi;
    // below the rounding noise of the panel sums, refinement is meaningless;
    // without this floor a halved budget chases unreachable targets forever
    let noise_floor = 4.0 * f64::EPSILON * (abs_lo + abs_hi);
    // panels near the floating-point grid cannot be split further without
    // nodes rounding onto the endpoints (fatal at an endpoint singularity)
    let width_floor = 256.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
    if (coarse - fine).abs() <= tol.max(noise_floor) || b - a <= width_floor || depth >= 48 {
        acc.add(fine);
        acc.add((fine - coarse) / 4095.0); // one-shot extrapolation of the 15-point rule
        return;
    }
    adaptive_step(f, a, mid, 0.5 * tol, depth + 1, acc);
    adaptive_step(f, mid, b, 0.5 * tol, depth + 1, acc);
}

/// Antiderivative of `ln|t|`: `t ln|t| - t`, continuously extended by 0 at 0.
pub(crate) fn log_antiderivative(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.abs().ln() - t
    }
}

/// Integrate over a list of breakpoints, never placing a panel across one.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], tol: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            acc.add(integrate(f, w[0], w[1], tol / (cuts.len() - 1) as f64));
        }
    }
    acc.value()
}

/// Monotone piecewise-cubic interpolant (Fritsch-Carlson slope limiting).
///
/// Used for cached cumulative integrals: monotone data stays monotone and
/// the interpolant is C^1, so downstream sup-norm comparisons are smooth.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        assert!(xs.len() == ys.len() && xs.len() >= 2);
        assert!(xs.windows(2).all(|w| w[1] > w[0]), "x grid must increase");
        let n = xs.len();
        let d: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = d[0];
        slopes[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if d[i - 1] * d[i] <= 0.0 {
                0.0
            } else {
                // harmonic mean weighted by interval widths
                let w1 = 2.0 * (xs[i + 1] - xs[i]) + (xs[i] - xs[i - 1]);
                let w2 = (xs[i + 1] - xs[i]) + 2.0 * (xs[i] - xs[i - 1]);
                (w1 + w2) / (w1 / d[i - 1] + w2 / d[i])
            };
        }
        // Clamp endpoint slopes so no interval overshoots.
        for i in [0usize, n - 2] {
            let (s, t) = (i, if i == 0 { 0 } else { n - 1 });
            if d[s] == 0.0 {
                slopes[t] = 0.0;
            } else if (slopes[t] / d[s]).abs() > 3.0 {
                slopes[t] = 3.0 * d[s];
            }
        }
        Self { xs, ys, slopes }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.slopes[0] * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1]);
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2)
    }
}
