//! Exponential form of the component measure and the quadratic functional
//! controlling its large-rank behaviour.
//!
//! The probability of a component factors as a mirrored log-gas: a Vandermonde
//! interaction over the particle set `{+-a_i}`, an external potential
//! `V0(a_l/2n)` per particle, and a per-particle correction `e_n`.  After
//! rescaling, minus the log-probability per `(2n)^2` is the functional
//! `J[f] = Q[f] + C` of the rescaled boundary profile, with
//!
//! ```text
//! Q[f] = (1/32) intint f'(x) f'(y) ln|x-y|^{-1} dx dy   over [-c/2, c/2]^2.
//! ```
//!
//! Everything here reduces `Q` to three ingredient kinds: exact closed forms
//! for piecewise-constant slope pairs, one-dimensional quadrature for a
//! piecewise-constant slope against the limit density bump, and a cached
//! double integral for the bump against itself.

use crate::boundary::DiagramBoundary;
use crate::config::AlgebraConfig;
use crate::error::{Error, Result};
use crate::limitshape::{LimitShape, ShapeRegime};
use crate::numeric::{integrate_piecewise, NeumaierSum};
use crate::weights::ACoordinates;

const LN_2: f64 = std::f64::consts::LN_2;
const PI: f64 = std::f64::consts::PI;

/// Continuous parameter set of the potential: the ratio c > 2.
#[derive(Debug, Clone, Copy)]
pub struct PotentialParams {
    c: f64,
}

impl PotentialParams {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 2.0 {
            return Err(Error::BadShapeParameter {
                c,
                reason: "potential parameters need c > 2".into(),
            });
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

fn xlnx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

fn v0_raw(c: f64, u: f64) -> f64 {
    (xlnx(c / 2.0 + u) + xlnx(c / 2.0 - u)) / 4.0
}

/// External potential `V0(u) = (1/4)[(c/2+u)ln(c/2+u) + (c/2-u)ln(c/2-u)]`
/// with the boundary convention `0 ln 0 = 0` at `u = +-c/2`.
pub fn potential_v0(params: &PotentialParams, u: f64) -> Result<f64> {
    if u.abs() > params.c / 2.0 {
        return Err(Error::OutsideDomain {
            x: u,
            half_width: params.c / 2.0,
        });
    }
    Ok(v0_raw(params.c, u))
}

fn constant_c_raw(c: f64) -> f64 {
    -c * c / 32.0 * c.ln()
        + (c - 2.0) * (c - 2.0) / 16.0 * if c > 2.0 { (c - 2.0).ln() } else { 0.0 }
        + (c - 1.0) / 4.0 * LN_2
        - 3.0 / 64.0 * (c - 4.0) * (c - 4.0)
}

/// The constant part of the functional,
/// `C = -(1/32)c^2 ln c + ((c-2)^2/16) ln(c-2) + ((c-1)/4) ln 2 - (3/64)(c-4)^2`.
pub fn constant_c(params: &PotentialParams) -> f64 {
    constant_c_raw(params.c)
}

// --- exponential form of the measure ----------------------------------------

/// Log-probability with every factorial replaced by its bare Stirling main
/// term: the mirrored Vandermonde, the potential `2n V0(a_l/2n)` and the
/// correction `e_n(u) = (1/4) ln((cn)^2 - u^2) - (1/2) ln u` per particle,
/// plus the explicit normalization constant.  Infinite on the cone edge
/// (where one factorial argument is 0) and below any out-of-support input.
pub fn log_weight_asymptotic(config: &AlgebraConfig, a: &ACoordinates) -> f64 {
    if a.rank() != config.rank() || !a.in_support(config) {
        return f64::NEG_INFINITY;
    }
    if a.as_slice()[0] == config.a_max() {
        // cone edge: one factorial argument is 0, whose Stirling main term
        // diverges; the remainder bound upper end is infinite to match
        return f64::INFINITY;
    }
    let n = config.rank_u64();
    let cn = config.a_max() as f64; // c*n exactly
    let c = config.c_f64();
    let coords = a.as_slice();
    let mut acc = NeumaierSum::new();
    // product over the mirrored particle set {+-a_i}
    acc.add(n as f64 * LN_2);
    for (i, &ai) in coords.iter().enumerate() {
        let u = ai as f64;
        acc.add(u.ln());
        for &aj in &coords[i + 1..] {
            acc.add(2.0 * ((ai * ai - aj * aj) as f64).ln());
        }
        // two mirrored copies of the potential and of e_n
        acc.add(-2.0 * (2.0 * n as f64) * v0_raw(c, u / (2.0 * n as f64)));
        let e_n = 0.25 * (cn * cn - u * u).ln() - 0.5 * u.ln();
        acc.add(-2.0 * e_n);
    }
    // minus ln Z_n, assembled from the exact constant of the product form
    // and the per-particle Stirling constants pi and cn(ln n - 1)
    acc.add(ln_constant_cn(config));
    acc.add(-(n as f64) * (PI.ln() + cn * ((n as f64).ln() - 1.0)));
    acc.add(-(n as f64) * LN_2);
    acc.value()
}

/// ln C_n: the exact a-independent constant of the single-product form of the
/// measure.
fn ln_constant_cn(config: &AlgebraConfig) -> f64 {
    let n = config.rank_u64();
    let power = config.tensor_power();
    let mut acc = NeumaierSum::new();
    acc.add((2 * n as i64 - (n * n) as i64 - (n * power) as i64) as f64 * LN_2);
    acc.add(crate::measure::ln_factorial(n));
    for k in 1..=n {
        acc.add(-crate::measure::ln_factorial(2 * k));
    }
    for k in 0..n {
        acc.add(crate::measure::ln_factorial(power + 2 * k));
        acc.add(-(2.0 * k as f64) * LN_2);
    }
    acc.value()
}

/// Two-sided bound on `log_weight_asymptotic - log_probability`: the dropped
/// Stirling remainders satisfy `1/(12m+1) < r(m) < 1/(12m)`, summed over the
/// two factorial arguments `(cn +- a_l)/2` of every particle.  The upper
/// bound is infinite on the cone edge.
pub fn stirling_remainder_bounds(config: &AlgebraConfig, a: &ACoordinates) -> (f64, f64) {
    let alpha = config.a_max();
    let mut lower = 0.0;
    let mut upper = 0.0;
    for &ai in a.as_slice() {
        for m in [(alpha + ai) / 2, (alpha - ai) / 2] {
            lower += 1.0 / (12.0 * m as f64 + 1.0);
            upper += if m == 0 {
                f64::INFINITY
            } else {
                1.0 / (12.0 * m as f64)
            };
        }
    }
    (lower, upper)
}

// --- profiles and the bilinear engine ---------------------------------------

/// Compactly supported piecewise-linear deviation from a reference profile.
#[derive(Debug, Clone)]
pub struct DeviationFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl DeviationFunction {
    /// Breakpoints must increase strictly; the function is 0 outside them,
    /// so the first and last values must be 0; slopes are capped at 2, the
    /// largest possible difference of two admissible profile slopes.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::BadDeviation {
                reason: "need matching xs/ys with at least two breakpoints".into(),
            });
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadDeviation {
                reason: "breakpoints must increase strictly".into(),
            });
        }
        if ys[0] != 0.0 || *ys.last().unwrap() != 0.0 {
            return Err(Error::BadDeviation {
                reason: "deviation must vanish at its support ends".into(),
            });
        }
        for w in xs.windows(2).zip(ys.windows(2)) {
            let slope = (w.1[1] - w.1[0]) / (w.0[1] - w.0[0]);
            if slope.abs() > 2.0 + 1e-9 {
                return Err(Error::BadDeviation {
                    reason: format!("slope {slope:.4} exceeds the Lipschitz cap 2"),
                });
            }
        }
        Ok(Self { xs, ys })
    }

    /// Sampled difference between a diagram boundary and the limit shape:
    /// breakpoints of the boundary plus a uniform refinement inside the bump
    /// support, where the shape is curved.
    pub fn between(
        boundary: &DiagramBoundary,
        shape: &LimitShape,
        refinement: usize,
    ) -> Result<Self> {
        let w = shape.c() / 2.0;
        let mut xs: Vec<f64> = vec![-w, w];
        xs.extend(boundary.breakpoints().into_iter().filter(|x| x.abs() < w));
        let a = shape.endpoint();
        for k in 0..=refinement {
            let x = -a + 2.0 * a * k as f64 / refinement.max(1) as f64;
            if x.abs() < w {
                xs.push(x);
            }
        }
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        xs.dedup_by(|p, q| (*p - *q).abs() < 1e-12);
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| boundary.value(x) - shape.shape(x))
            .collect();
        if ys[0].abs() > 1e-9 || ys.last().unwrap().abs() > 1e-9 {
            return Err(Error::BadDeviation {
                reason: "difference does not vanish at the window ends \
                         (largest descending interval escapes the window)"
                    .into(),
            });
        }
        let k = ys.len() - 1;
        let mut ys = ys;
        ys[0] = 0.0;
        ys[k] = 0.0;
        Self::new(xs, ys)
    }

    pub fn value(&self, x: f64) -> f64 {
        if x <= self.xs[0] || x >= *self.xs.last().unwrap() {
            return 0.0;
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let t = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i])
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn sup_norm(&self) -> f64 {
        self.ys.iter().fold(0.0f64, |m, y| m.max(y.abs()))
    }

    fn slope_segments(&self, half_width: f64) -> Vec<(f64, f64, f64)> {
        let mut segs = Vec::with_capacity(self.xs.len() + 1);
        if self.xs[0] > -half_width {
            segs.push((-half_width, self.xs[0], 0.0));
        }
        for (w, v) in self.xs.windows(2).zip(self.ys.windows(2)) {
            segs.push((w[0], w[1], (v[1] - v[0]) / (w[1] - w[0])));
        }
        let hi = *self.xs.last().unwrap();
        if hi < half_width {
            segs.push((hi, half_width, 0.0));
        }
        segs
    }
}

/// A profile whose slope enters the bilinear forms.
#[derive(Clone, Copy)]
pub enum Profile<'a> {
    /// Piecewise-linear diagram boundary: slopes +-1.
    Boundary(&'a DiagramBoundary),
    /// The limit shape: constant slope plus the density bump.
    Shape(&'a LimitShape),
    /// A compact piecewise-linear deviation.
    Deviation(&'a DeviationFunction),
    /// Formal difference boundary - shape, kept exact (not sampled).
    BoundaryMinusShape(&'a DiagramBoundary, &'a LimitShape),
}

/// Slope data prepared for integration: piecewise-constant segments tiling
/// [-w, w], plus an optional multiple of the limit-density bump.
struct SlopeParts<'a> {
    pieces: Vec<(f64, f64, f64)>,
    bump: Option<(f64, &'a LimitShape)>,
}

fn shape_sigma_kappa(shape: &LimitShape) -> (f64, Option<f64>) {
    match shape.regime() {
        ShapeRegime::Critical => (0.0, None),
        ShapeRegime::Supercritical => (1.0, Some(-1.0)),
        ShapeRegime::Subcritical => (-1.0, Some(1.0)),
    }
}

fn slope_parts<'a>(profile: &Profile<'a>, half_width: f64) -> SlopeParts<'a> {
    match *profile {
        Profile::Boundary(b) => SlopeParts {
            pieces: b.slope_segments(half_width),
            bump: None,
        },
        Profile::Deviation(d) => SlopeParts {
            pieces: d.slope_segments(half_width),
            bump: None,
        },
        Profile::Shape(s) => {
            let (sigma, kappa) = shape_sigma_kappa(s);
            SlopeParts {
                pieces: vec![(-half_width, half_width, sigma)],
                bump: kappa.map(|k| (4.0 * k, s)),
            }
        }
        Profile::BoundaryMinusShape(b, s) => {
            let (sigma, kappa) = shape_sigma_kappa(s);
            let pieces = b
                .slope_segments(half_width)
                .into_iter()
                .map(|(lo, hi, slope)| (lo, hi, slope - sigma))
                .collect();
            SlopeParts {
                pieces,
                bump: kappa.map(|k| (-4.0 * k, s)),
            }
        }
    }
}

/// Second antiderivative of ln|t|: `T(t) = t^2 (2 ln|t| - 3)/4`, `T(0) = 0`.
fn t_kernel(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t * (2.0 * t.abs().ln() - 3.0) / 4.0
    }
}

/// Exact `intint_{[p,q] x [r,s]} ln|x-y| dx dy` by corner combination of T.
pub fn log_kernel_rect(p: f64, q: f64, r: f64, s: f64) -> f64 {
    t_kernel(q - r) - t_kernel(p - r) - t_kernel(q - s) + t_kernel(p - s)
}

/// Antiderivative of ln|t|: `G1(t) = t ln|t| - t`, `G1(0) = 0`.
use crate::numeric::log_antiderivative as g1;

/// Log potential of a piecewise-constant slope field at y:
/// `int slope(x) ln|x-y|^{-1} dx`.
fn pc_log_potential(pieces: &[(f64, f64, f64)], y: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for &(lo, hi, slope) in pieces {
        if slope != 0.0 {
            acc.add(-slope * (g1(hi - y) - g1(lo - y)));
        }
    }
    acc.value()
}

/// `int rho_hat(y) * pc_log_potential(pieces, y) dy` over the bump support,
/// with quadrature panels cut at every piece endpoint (log kinks).
fn pc_bump_cross(pieces: &[(f64, f64, f64)], shape: &LimitShape) -> f64 {
    let a = shape.endpoint();
    if a == 0.0 {
        return 0.0;
    }
    let mut cuts = vec![-a, a];
    for &(lo, hi, slope) in pieces {
        if slope == 0.0 {
            continue;
        }
        for e in [lo, hi] {
            if e.abs() < a {
                cuts.push(e);
            }
        }
    }
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup_by(|p, q| (*p - *q).abs() < 1e-13);
    integrate_piecewise(
        &|y: f64| shape.rho_hat(y) * pc_log_potential(pieces, y),
        &cuts,
        1e-10,
    )
}

/// The core bilinear form `B(g, h) = intint g'(x) h'(y) ln|x-y|^{-1} dx dy`
/// over the window, split into exact piece-pair sums, piece-bump crosses and
/// the cached bump self-energy.
fn bilinear(g: &SlopeParts, h: &SlopeParts) -> f64 {
    let mut acc = NeumaierSum::new();
    for &(p, q, sg) in &g.pieces {
        if sg == 0.0 {
            continue;
        }
        for &(r, s, sh) in &h.pieces {
            if sh != 0.0 {
                acc.add(-sg * sh * log_kernel_rect(p, q, r, s));
            }
        }
    }
    if let Some((kappa, shape)) = h.bump {
        acc.add(kappa * pc_bump_cross(&g.pieces, shape));
    }
    if let Some((kappa, shape)) = g.bump {
        acc.add(kappa * pc_bump_cross(&h.pieces, shape));
    }
    if let (Some((kg, sg)), Some((kh, _))) = (g.bump, h.bump) {
        acc.add(kg * kh * sg.bump_self_energy());
    }
    acc.value()
}

fn deviation_in_window(d: &DeviationFunction, half_width: f64) -> Result<()> {
    let (lo, hi) = d.support();
    if lo < -half_width - 1e-12 || hi > half_width + 1e-12 {
        return Err(Error::BadDeviation {
            reason: format!("support [{lo:.4}, {hi:.4}] escapes the window +-{half_width:.4}"),
        });
    }
    Ok(())
}

fn profile_parts<'a>(profile: &Profile<'a>, params: &PotentialParams) -> Result<SlopeParts<'a>> {
    let w = params.c / 2.0;
    if let Profile::Deviation(d) = profile {
        deviation_in_window(d, w)?;
    }
    if let Profile::Shape(s) | Profile::BoundaryMinusShape(_, s) = profile {
        if (s.c() - params.c).abs() > 1e-9 {
            return Err(Error::MismatchedRatio {
                left: s.c(),
                right: params.c,
            });
        }
    }
    Ok(slope_parts(profile, w))
}

/// The quadratic part `Q[f] = (1/32) intint f'(x) f'(y) ln|x-y|^{-1}` over
/// `[-c/2, c/2]^2`.  Exact for purely piecewise-linear profiles.
pub fn quadratic_q(profile: Profile<'_>, params: &PotentialParams) -> Result<f64> {
    let parts = profile_parts(&profile, params)?;
    Ok(bilinear(&parts, &parts) / 32.0)
}

/// Value of the full functional split into its quadratic and constant parts.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalBreakdown {
    pub j: f64,
    pub q_part: f64,
    pub c_part: f64,
}

/// `J[f] = Q[f] + C`.
pub fn functional_j(profile: Profile<'_>, params: &PotentialParams) -> Result<FunctionalBreakdown> {
    let q_part = quadratic_q(profile, params)?;
    let c_part = constant_c(params);
    Ok(FunctionalBreakdown {
        j: q_part + c_part,
        q_part,
        c_part,
    })
}

/// Metric induced by Q: `d_Q(g, h) = Q[g - h]^{1/2}`.  The difference of two
/// compact deviations is compact, and Q is positive semi-definite there.
pub fn distance_dq(g: &DeviationFunction, h: &DeviationFunction) -> f64 {
    // merge breakpoints; the difference is piecewise linear on the union
    let mut xs: Vec<f64> = g.xs.iter().chain(h.xs.iter()).copied().collect();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup_by(|p, q| (*p - *q).abs() < 1e-13);
    let w = xs.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 1.0;
    let mut pieces = Vec::with_capacity(xs.len() - 1);
    for pair in xs.windows(2) {
        let slope_g = (g.value(pair[1]) - g.value(pair[0])) / (pair[1] - pair[0]);
        let slope_h = (h.value(pair[1]) - h.value(pair[0])) / (pair[1] - pair[0]);
        pieces.push((pair[0], pair[1], slope_g - slope_h));
    }
    pieces.insert(0, (-w, xs[0], 0.0));
    pieces.push((*xs.last().unwrap(), w, 0.0));
    let parts = SlopeParts { pieces, bump: None };
    (bilinear(&parts, &parts) / 32.0).max(0.0).sqrt()
}

/// Linear coupling of a deviation to the limit shape:
/// `L[df] = (1/16) intint f'(x) ln|x-y|^{-1} df'(y) dx dy`.
pub fn linear_term(delta: &DeviationFunction, shape: &LimitShape) -> Result<f64> {
    let w = shape.c() / 2.0;
    deviation_in_window(delta, w)?;
    let shape_parts = slope_parts(&Profile::Shape(shape), w);
    let delta_parts = slope_parts(&Profile::Deviation(delta), w);
    Ok(bilinear(&shape_parts, &delta_parts) / 16.0)
}

/// The three-term split of a boundary's functional value around the limit
/// shape: `J[f_n] = J[f] + Q[delta] + L[delta]` with `delta = f_n - f`.
#[derive(Debug, Clone, Copy)]
pub struct Decomposition {
    pub j_boundary: f64,
    pub j_shape: f64,
    pub q_deviation: f64,
    pub l_deviation: f64,
}

impl Decomposition {
    pub fn residual(&self) -> f64 {
        self.j_boundary - (self.j_shape + self.q_deviation + self.l_deviation)
    }

    pub fn relative_residual(&self) -> f64 {
        let scale = self
            .j_boundary
            .abs()
            .max((self.j_shape + self.q_deviation + self.l_deviation).abs())
            .max(1e-12);
        self.residual().abs() / scale
    }
}

/// Evaluates the decomposition identity for one diagram boundary against a
/// limit shape whose window contains the whole boundary.  The left side is
/// assembled purely from exact piece-pair sums; the right side routes through
/// the bump quadratures, so the residual measures the consistency of the
/// quadrature stack.  A boundary poking past the window would be silently
/// clipped, mutilating the identity, so that case is rejected up front.
pub fn decompose(boundary: &DiagramBoundary, shape: &LimitShape) -> Result<Decomposition> {
    let extent = boundary.extent();
    if extent > shape.c() / 2.0 + 1e-9 {
        return Err(Error::OutsideDomain {
            x: extent,
            half_width: shape.c() / 2.0,
        });
    }
    let c = shape.c();
    let w = c / 2.0;
    let c_part = constant_c_raw(c);
    let boundary_parts = slope_parts(&Profile::Boundary(boundary), w);
    let shape_parts = slope_parts(&Profile::Shape(shape), w);
    let delta_parts = slope_parts(&Profile::BoundaryMinusShape(boundary, shape), w);
    let j_boundary = bilinear(&boundary_parts, &boundary_parts) / 32.0 + c_part;
    let j_shape = bilinear(&shape_parts, &shape_parts) / 32.0 + c_part;
    let q_deviation = bilinear(&delta_parts, &delta_parts) / 32.0;
    let l_deviation = bilinear(&shape_parts, &delta_parts) / 16.0;
    Ok(Decomposition {
        j_boundary,
        j_shape,
        q_deviation,
        l_deviation,
    })
}

/// Slobodeckij form of the quadratic functional:
/// `(1/2) intint ((g(x) - g(y))/(x - y))^2 dx dy` over the plane, evaluated
/// with exact inner integrals per linear piece plus closed-form tails.
/// Independent of the T-kernel route; equals `32 Q[g]` for compact g.
pub fn slobodeckij_energy(g: &DeviationFunction) -> f64 {
    let (s0, s1) = g.support();
    let lines: Vec<(f64, f64, f64, f64)> =
        g.xs.windows(2)
            .zip(g.ys.windows(2))
            .map(|(x, y)| {
                let alpha = (y[1] - y[0]) / (x[1] - x[0]);
                (x[0], x[1], alpha, y[0] - alpha * x[0])
            })
            .collect();
    let inner = |x: f64| {
        let gx = g.value(x);
        let mut acc = NeumaierSum::new();
        for &(u1, u2, alpha, beta) in &lines {
            if x >= u1 && x <= u2 {
                // own piece: the difference quotient is constant alpha
                acc.add(alpha * alpha * (u2 - u1));
            } else {
                let residue = gx - alpha * x - beta;
                acc.add(alpha * alpha * (u2 - u1));
                acc.add(2.0 * alpha * residue * ((x - u1) / (x - u2)).abs().ln());
                acc.add(residue * residue * (1.0 / (x - u2) - 1.0 / (x - u1)));
            }
        }
        // x outside the support and the y-tails beyond it, combined
        acc.add(2.0 * gx * gx * (1.0 / (s1 - x) + 1.0 / (x - s0)));
        acc.value()
    };
    integrate_piecewise(&inner, &g.xs, 1e-10) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate;
    use rand::{Rng, SeedableRng};

    fn params(c: f64) -> PotentialParams {
        PotentialParams::new(c).unwrap()
    }

    fn cfg(n: u32, power: u64) -> AlgebraConfig {
        AlgebraConfig::new(n, power).unwrap()
    }

    fn coords(config: &AlgebraConfig, a: &[u64]) -> ACoordinates {
        ACoordinates::new(a.to_vec(), config).unwrap()
    }

    fn random_deviation(rng: &mut impl Rng, half_width: f64) -> DeviationFunction {
        let k = rng.gen_range(3..9);
        let mut xs = Vec::with_capacity(k);
        let mut x = rng.gen_range(-half_width..half_width * 0.2);
        for _ in 0..k {
            xs.push(x);
            x += rng.gen_range(0.05..0.8);
            if x >= half_width {
                break;
            }
        }
        xs.push(x.min(half_width));
        let m = xs.len();
        let mut ys: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ys[0] = 0.0;
        ys[m - 1] = 0.0;
        // rescale into the Lipschitz budget
        let mut steep = 0.0f64;
        for i in 0..m - 1 {
            steep = steep.max(((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).abs());
        }
        if steep > 2.0 {
            for y in &mut ys {
                *y *= 1.9 / steep;
            }
        }
        DeviationFunction::new(xs, ys).unwrap()
    }

    #[test]
    fn potential_spot_values() {
        let p4 = params(4.0);
        assert!((potential_v0(&p4, 0.0).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!((potential_v0(&p4, 2.0).unwrap() - 4f64.ln()).abs() < 1e-12);
        for u in [0.3, 1.1, 1.9] {
            let even = potential_v0(&p4, u).unwrap() - potential_v0(&p4, -u).unwrap();
            assert_eq!(even, 0.0);
        }
        assert!(potential_v0(&p4, 2.5).is_err());
        assert!(PotentialParams::new(2.0).is_err());
    }

    #[test]
    fn constant_c_spot_values() {
        assert!(constant_c(&params(4.0)).abs() < 1e-12);
        let expect = -9.0 / 32.0 * 3f64.ln() + 0.5 * 2f64.ln() - 3.0 / 64.0;
        assert!((constant_c(&params(3.0)) - expect).abs() < 1e-12);
        // finite limit toward the degenerate ratio
        assert!(constant_c_raw(2.0 + 1e-12).is_finite());
    }

    #[test]
    fn log_antiderivative_matches_quadrature() {
        // first oracle link: G1 gives int_r^s ln|x-y| dy in closed form
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for trial in 0..100 {
            let r = rng.gen_range(-3.0..3.0);
            let s = r + rng.gen_range(0.1..2.0);
            // mix strictly-outside, touching, and interior singular points
            let x = match trial % 3 {
                0 => rng.gen_range(-4.0..4.0),
                1 => {
                    if trial % 2 == 0 {
                        r
                    } else {
                        s
                    }
                }
                _ => rng.gen_range(r..s),
            };
            let closed = g1(s - x) - g1(r - x);
            let quad = if x > r && x < s {
                integrate(&|y: f64| (x - y).abs().ln(), r, x, 5e-12)
                    + integrate(&|y: f64| (x - y).abs().ln(), x, s, 5e-12)
            } else {
                integrate(&|y: f64| (x - y).abs().ln(), r, s, 1e-11)
            };
            assert!(
                (closed - quad).abs() < 1e-10,
                "x={x} over [{r},{s}]: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn rectangle_kernel_matches_quadrature() {
        // second oracle link: the T-corner formula against an adaptive outer
        // integral of the G1 inner antiderivative (validated independently)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(39);
        for trial in 0..100 {
            let p = rng.gen_range(-3.0..3.0);
            let q = p + rng.gen_range(0.1..2.0);
            // every third pair touches: r starts exactly at q
            let r = if trial % 3 == 0 {
                q
            } else {
                rng.gen_range(-3.0..3.0)
            };
            let s = r + rng.gen_range(0.1..2.0);
            let exact = log_kernel_rect(p, q, r, s);
            let inner = |x: f64| g1(s - x) - g1(r - x);
            let mut cuts = vec![p, q];
            for e in [r, s] {
                if e > p && e < q {
                    cuts.push(e);
                }
            }
            cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());
            let outer = integrate_piecewise(&inner, &cuts, 1e-11);
            assert!(
                (exact - outer).abs() < 1e-10,
                "[{p},{q}]x[{r},{s}]: {exact} vs {outer}"
            );
        }
    }

    #[test]
    fn diagonal_cell_identity() {
        // intint over a cell of side 1/n of ln|x-y|^{-1} is ln(n)/n^2 + 3/(2n^2)
        for n in [1u32, 2, 5, 20] {
            let h = 1.0 / n as f64;
            let got = -log_kernel_rect(0.0, h, 0.0, h);
            let expect = (n as f64).ln() * h * h + 1.5 * h * h;
            assert!((got - expect).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn mirrored_vandermonde_identity() {
        // product over the mirrored particle set vs 2^n prod a prod (a^2-a^2)^2
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let n = rng.gen_range(1..6usize);
            let mut set = std::collections::BTreeSet::new();
            while set.len() < n {
                set.insert(2 * rng.gen_range(1u64..40) + 1);
            }
            let a: Vec<u64> = set.iter().rev().copied().collect();
            let mirrored: Vec<i64> = a
                .iter()
                .map(|&v| v as i64)
                .chain(a.iter().map(|&v| -(v as i64)))
                .collect();
            let mut direct = 0.0;
            for i in 0..mirrored.len() {
                for j in i + 1..mirrored.len() {
                    direct += ((mirrored[i] - mirrored[j]).abs() as f64).ln();
                }
            }
            let mut split = n as f64 * LN_2;
            for (i, &ai) in a.iter().enumerate() {
                split += (ai as f64).ln();
                for &aj in &a[i + 1..] {
                    split += 2.0 * ((ai * ai - aj * aj) as f64).ln();
                }
            }
            assert!((direct - split).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn asymptotic_weight_sits_inside_the_stirling_envelope() {
        let cases: [(u32, u64, &[u64]); 5] = [
            (1, 2, &[1]),
            (1, 2, &[3]), // cone edge: one factorial argument is 0
            (2, 2, &[3, 1]),
            (2, 4, &[5, 1]),
            (3, 8, &[9, 5, 3]),
        ];
        for (n, power, raw) in cases {
            let config = cfg(n, power);
            let a = coords(&config, raw);
            let exact = crate::measure::log_probability(&config, &a);
            let asym = log_weight_asymptotic(&config, &a);
            let (lower, upper) = stirling_remainder_bounds(&config, &a);
            let diff = asym - exact;
            assert!(
                diff >= lower - 1e-9 && diff <= upper + 1e-9,
                "n={n} N={power} a={raw:?}: diff {diff} outside ({lower}, {upper})"
            );
        }
    }

    #[test]
    fn asymptotic_weight_rejects_out_of_support() {
        let config = cfg(2, 4);
        let a = coords(&config, &[9, 1]); // a_1 beyond the cone bound 7
        assert_eq!(log_weight_asymptotic(&config, &a), f64::NEG_INFINITY);
        // on the cone edge itself the asymptotic weight diverges upward
        let edge = coords(&config, &[7, 1]);
        assert_eq!(log_weight_asymptotic(&config, &edge), f64::INFINITY);
    }

    #[test]
    fn window_log_potential_closed_form() {
        // int over the window of ln|x-y|^{-1} dx equals c - 4 V0(y)
        for c in [2.5, 4.0, 7.0] {
            let p = params(c);
            let window = [(-c / 2.0, c / 2.0, 1.0)];
            for y in [-c / 2.0 + 0.1, -0.4, 0.0, 1.0, c / 2.0 - 0.05] {
                let got = pc_log_potential(&window, y);
                let expect = c - 4.0 * potential_v0(&p, y).unwrap();
                assert!((got - expect).abs() < 1e-12, "c={c} y={y}");
            }
        }
    }

    #[test]
    fn quadratic_form_is_positive_on_deviations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(58);
        let p = params(6.0);
        for _ in 0..200 {
            let d = random_deviation(&mut rng, 2.8);
            let q = quadratic_q(Profile::Deviation(&d), &p).unwrap();
            if d.sup_norm() > 1e-12 {
                assert!(q > 0.0, "Q = {q} for a nonzero deviation");
            }
        }
        let flat = DeviationFunction::new(vec![-1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(quadratic_q(Profile::Deviation(&flat), &p).unwrap(), 0.0);
    }

    #[test]
    fn functional_vanishes_on_the_limit_shape() {
        // the shape is the minimizer and carries all the probability mass,
        // which forces the minimum value to be exactly zero
        for c in [2.5, 3.0, 3.5, 5.0, 6.0, 8.0, 12.0] {
            let shape = LimitShape::new(c).unwrap();
            let j = functional_j(Profile::Shape(&shape), &params(c)).unwrap();
            assert!(j.j.abs() < 1e-6, "c = {c}: J = {}", j.j);
            assert!((j.j - j.q_part - j.c_part).abs() < 1e-15);
        }
    }

    #[test]
    fn critical_shape_functional_is_explicit() {
        // at c = 4 the slope vanishes on the window, so Q = 0 and J = C = 0
        let shape = LimitShape::new(4.0).unwrap();
        let j = functional_j(Profile::Shape(&shape), &params(4.0)).unwrap();
        assert_eq!(j.q_part, 0.0);
        assert!(j.j.abs() < 1e-12);
    }

    #[test]
    fn slobodeckij_route_agrees_with_kernel_route() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(91);
        let p = params(6.0);
        for _ in 0..30 {
            let d = random_deviation(&mut rng, 2.7);
            let q = quadratic_q(Profile::Deviation(&d), &p).unwrap();
            let s = slobodeckij_energy(&d);
            assert!(
                (32.0 * q - s).abs() <= 1e-6 * s.abs().max(1e-9),
                "32Q = {} vs S = {}",
                32.0 * q,
                s
            );
        }
    }

    #[test]
    fn distance_properties() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let d1 = random_deviation(&mut rng, 2.0);
        let d2 = random_deviation(&mut rng, 2.0);
        assert_eq!(distance_dq(&d1, &d1), 0.0);
        let d12 = distance_dq(&d1, &d2);
        let d21 = distance_dq(&d2, &d1);
        assert!(d12 > 0.0);
        assert!((d12 - d21).abs() < 1e-12);
    }

    #[test]
    fn linear_term_vanishes_inside_the_bump_support() {
        // on the support of the density the log potential is constant, and a
        // compact deviation integrates any constant to zero
        let shape = LimitShape::new(8.0).unwrap();
        let a = shape.endpoint();
        let d = DeviationFunction::new(
            vec![-0.6 * a, -0.2 * a, 0.1 * a, 0.5 * a],
            vec![0.0, 0.4, -0.3, 0.0],
        )
        .unwrap();
        let l = linear_term(&d, &shape).unwrap();
        assert!(l.abs() < 1e-7, "L = {l}");
        // a deviation pushed into the frozen gap feels the potential slope
        let gap =
            DeviationFunction::new(vec![a + 0.1, a + 0.3, a + 0.5], vec![0.0, 0.3, 0.0]).unwrap();
        let l_gap = linear_term(&gap, &shape).unwrap();
        assert!(l_gap > 1e-4, "off-support L = {l_gap}");
    }

    #[test]
    fn decomposition_refuses_boundaries_that_escape_the_window() {
        // at ratio 2 the only diagram at N = 1 sits on the cone edge and its
        // largest interval overhangs the window by 1/(2n); clipping it would
        // fake a deviation with nonzero boundary values, so the call errors
        let config = cfg(6, 1);
        let a = crate::weights::minimal_acoords(&config);
        let boundary = DiagramBoundary::new(&config, &a).unwrap();
        let shape = LimitShape::new(2.0).unwrap();
        assert!(matches!(
            decompose(&boundary, &shape),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn decomposition_with_bump_routes() {
        // the caption ratio N/n + 2 = 6 pins N = 16; even the cone-edge
        // diagram then ends exactly at the window edge
        let config = cfg(4, 16);
        let a = coords(&config, &[15, 9, 5, 3]);
        let boundary = DiagramBoundary::new(&config, &a).unwrap();
        let shape = LimitShape::new(6.0).unwrap();
        let dec = decompose(&boundary, &shape).unwrap();
        assert!(
            dec.relative_residual() < 1e-8,
            "relative residual {}",
            dec.relative_residual()
        );
        assert!(dec.q_deviation > 0.0);
        assert!(dec.l_deviation >= -1e-10);
        // a window too narrow to contain the boundary is refused
        let other = LimitShape::new(3.5).unwrap();
        assert!(matches!(
            decompose(&boundary, &other),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn deviation_validation() {
        assert!(DeviationFunction::new(vec![0.0, 1.0], vec![0.1, 0.0]).is_err());
        assert!(DeviationFunction::new(vec![0.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(DeviationFunction::new(vec![0.0, 0.1, 1.0], vec![0.0, 0.9, 0.0]).is_err());
        let d = DeviationFunction::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.value(-0.5), 0.5);
        assert_eq!(d.value(3.0), 0.0);
        assert_eq!(d.sup_norm(), 1.0);
    }

    #[test]
    fn sampled_difference_tracks_the_formal_one() {
        let config = cfg(4, 17);
        let a = coords(&config, &[14, 10, 4, 2]);
        let boundary = DiagramBoundary::new(&config, &a).unwrap();
        let shape = LimitShape::new(6.0).unwrap();
        let sampled = DeviationFunction::between(&boundary, &shape, 400).unwrap();
        let p = params(6.0);
        let q_sampled = quadratic_q(Profile::Deviation(&sampled), &p).unwrap();
        let q_formal = quadratic_q(Profile::BoundaryMinusShape(&boundary, &shape), &p).unwrap();
        // the sampled difference chords the curved shape, so only a loose match
        assert!(
            (q_sampled - q_formal).abs() < 5e-3 * q_formal.max(1e-3),
            "{q_sampled} vs {q_formal}"
        );
    }
}
