//! Classical correspondences of the imaginary-time problem: Feynman–Kac path
//! sampling of W(x, t; y) over Brownian bridges absorbed at the origin, and the
//! transfer matrix of the 1D chain with its free-energy density.

use crate::error::{Error, Result};
use crate::model::{ModelParams, Regulator, RegulatorKind};
use crate::numerics::banded::Banded;
use crate::propagator::Sign;
use crate::specfun::bessel_ik_scaled;
use crate::spectrum::{self, CriticalFit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Free heat kernel of d/dt = d^2/dx^2 on the full line.
pub fn free_kernel(x: f64, y: f64, t: f64) -> f64 {
    (-(x - y).powi(2) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// Heat kernel on the half line with absorption at 0 (method of images).
pub fn image_kernel(x: f64, y: f64, t: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    free_kernel(x, y, t) * -(-x * y / t).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PathPotential {
    /// Regulated inverse-square potential, absorbed at x <= 0.
    #[default]
    Model,
    /// V = 0, absorbed at x <= 0.
    BarrierOnly,
    /// V = 0 on the full line.
    Free,
}

fn default_refine_tol() -> f64 {
    0.0
}

fn default_max_depth() -> u32 {
    12
}

/// Path ensemble pinned at (y, 0) and (x, t) with `n_steps` bridge steps of
/// length eps = t / n_steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathEnsembleSpec {
    pub y: f64,
    pub x: f64,
    pub t: f64,
    #[serde(alias = "N")]
    pub n_steps: usize,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub potential: PathPotential,
    /// A step whose tau sup|V| over its reachable range exceeds this is
    /// bisected by a bridge midpoint; 0 keeps the plain trapezoid.
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
}

impl PathEnsembleSpec {
    pub fn new(y: f64, x: f64, t: f64, n_steps: usize, n_samples: usize, seed: u64) -> Self {
        PathEnsembleSpec {
            y,
            x,
            t,
            n_steps,
            n_samples,
            seed,
            potential: PathPotential::Model,
            refine_tol: default_refine_tol(),
            max_depth: default_max_depth(),
        }
    }

    fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(pos(self.t) && self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::domain("path ensemble needs finite endpoints and t > 0"));
        }
        if self.potential != PathPotential::Free && !(pos(self.x) && pos(self.y)) {
            return Err(Error::domain(format!("endpoints must be positive, got x = {}, y = {}", self.x, self.y)));
        }
        if self.n_steps < 1 || self.n_samples < 2 {
            return Err(Error::domain("need at least one step and two samples"));
        }
        if !(self.refine_tol >= 0.0) {
            return Err(Error::domain("refine_tol must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// Fraction of paths that reached x <= 0.
    pub absorbed_fraction: f64,
}

/// Per-path weight evaluator. Weights are exp(-trapezoid sum of tau V) times
/// the bridge non-crossing probability 1 - exp(-a c / tau) of each segment.
struct PathWeight<'a> {
    model: Option<(&'a ModelParams, &'a Regulator)>,
    barrier: bool,
    edge: f64,
    v_inner: f64,
    alpha_abs: f64,
    tol: f64,
    max_depth: u32,
}

impl<'a> PathWeight<'a> {
    fn new(params: &'a ModelParams, reg: &'a Regulator, spec: &PathEnsembleSpec) -> Self {
        let edge = reg.b * params.x0;
        let shape_max = match reg.kind {
            RegulatorKind::SquareWell | RegulatorKind::LinearWell => 1.0,
            RegulatorKind::Generic => reg.profile.as_ref().map_or(1.0, |p| p.max()),
        };
        PathWeight {
            model: (spec.potential == PathPotential::Model).then_some((params, reg)),
            barrier: spec.potential != PathPotential::Free,
            edge,
            v_inner: reg.g * shape_max / (edge * edge),
            alpha_abs: params.alpha.abs(),
            tol: spec.refine_tol,
            max_depth: spec.max_depth,
        }
    }

    fn v(&self, x: f64) -> f64 {
        self.model.map_or(0.0, |(p, r)| r.potential(p, x))
    }

    /// sup |V| on [lo, inf).
    fn v_sup(&self, lo: f64) -> f64 {
        if self.model.is_none() {
            0.0
        } else if lo < self.edge {
            self.v_inner.max(self.alpha_abs / (self.edge * self.edge))
        } else {
            self.alpha_abs / (lo * lo)
        }
    }

    /// Log weight of a bridge segment a -> c of duration tau; -inf if absorbed.
    fn segment(&self, a: f64, c: f64, tau: f64, depth: u32, rng: &mut ChaCha8Rng) -> f64 {
        if self.tol > 0.0 && depth < self.max_depth {
            let lo = (a.min(c) - 4.0 * (2.0 * tau).sqrt()).max(0.0);
            if tau * self.v_sup(lo) > self.tol {
                let z: f64 = rng.sample(StandardNormal);
                let m = 0.5 * (a + c) + (0.5 * tau).sqrt() * z;
                if self.barrier && m <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let left = self.segment(a, m, 0.5 * tau, depth + 1, rng);
                if left == f64::NEG_INFINITY {
                    return left;
                }
                return left + self.segment(m, c, 0.5 * tau, depth + 1, rng);
            }
        }
        let mut lw = -0.5 * tau * (self.v(a) + self.v(c));
        if self.barrier {
            let q = a * c / tau;
            if q < 40.0 {
                lw += (-(-q).exp()).ln_1p();
            }
        }
        lw
    }
}

/// Weight of one path, 0 if absorbed, with the free-kernel prefactor removed.
fn path_weight(pw: &PathWeight, spec: &PathEnsembleSpec, coef: &[(f64, f64)], index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let eps = spec.t / spec.n_steps as f64;
    let mut xj = spec.y;
    let mut lw = 0.0;
    let last = spec.n_steps - 1;
    for (j, &(inv_m, s)) in coef.iter().enumerate() {
        let xn = if j == last {
            spec.x
        } else {
            let z: f64 = rng.sample(StandardNormal);
            xj + (spec.x - xj) * inv_m + s * z
        };
        if pw.barrier && xn <= 0.0 {
            return 0.0;
        }
        lw += pw.segment(xj, xn, eps, 0, &mut rng);
        if lw == f64::NEG_INFINITY {
            return 0.0;
        }
        xj = xn;
    }
    lw.exp()
}

const CHUNK: usize = 2048;

/// Feynman–Kac estimate of W(x, t; y). Sample i draws from the ChaCha8 stream
/// (seed, i); chunk sums are reduced in index order, so the result does not
/// depend on the thread count.
pub fn feynman_kac(params: &ModelParams, reg: &Regulator, spec: &PathEnsembleSpec) -> Result<McEstimate> {
    spec.validate()?;
    reg.validate()?;
    let prefactor = free_kernel(spec.x, spec.y, spec.t);
    if spec.potential == PathPotential::Free {
        return Ok(McEstimate { value: prefactor, std_error: 0.0, n_samples: spec.n_samples, absorbed_fraction: 0.0 });
    }
    let n = spec.n_steps;
    let eps = spec.t / n as f64;
    let coef: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let m = (n - j) as f64;
            (1.0 / m, (2.0 * eps * (m - 1.0) / m).sqrt())
        })
        .collect();
    let pw = PathWeight::new(params, reg, spec);
    let n_chunks = spec.n_samples.div_ceil(CHUNK);
    let parts: Vec<(f64, f64, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let (mut s, mut s2, mut dead) = (0.0, 0.0, 0usize);
            for i in c * CHUNK..((c + 1) * CHUNK).min(spec.n_samples) {
                let w = path_weight(&pw, spec, &coef, i as u64);
                if w == 0.0 {
                    dead += 1;
                }
                s += w;
                s2 += w * w;
            }
            (s, s2, dead)
        })
        .collect();
    let (mut s, mut s2, mut dead) = (0.0, 0.0, 0usize);
    for (a, b, d) in parts {
        s += a;
        s2 += b;
        dead += d;
    }
    let m = spec.n_samples as f64;
    let mean = s / m;
    let var = ((s2 - s * mean) / (m - 1.0)).max(0.0);
    Ok(McEstimate {
        value: prefactor * mean,
        std_error: prefactor * (var / m).sqrt(),
        n_samples: spec.n_samples,
        absorbed_fraction: dead as f64 / m,
    })
}

/// Sampling controls shared by the endpoint-scaling estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McOptions {
    pub n_steps: usize,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default = "default_refine_tol")]
    pub refine_tol: f64,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRatio {
    /// W(lambda x, t; lambda' y) / W(x, t; y).
    pub ratio: f64,
    pub std_error: f64,
    /// (lambda lambda')^{nu}.
    pub expected: f64,
    pub lambda: f64,
    pub lambda_prime: f64,
}

/// Endpoint scaling of W at the fixed-point coupling of `sign`, estimated with
/// common random numbers for the two endpoint pairs.
#[allow(clippy::too_many_arguments)]
pub fn scaling_check_w(
    params: &ModelParams,
    b: f64,
    sign: Sign,
    x: f64,
    y: f64,
    t: f64,
    lambda: f64,
    lambda_prime: f64,
    opts: &McOptions,
) -> Result<ScalingRatio> {
    params.require_main()?;
    if !(lambda > 0.0 && lambda_prime > 0.0) {
        return Err(Error::domain("scale factors must be positive"));
    }
    let w0 = b * params.x0;
    if x.min(y) * lambda.min(lambda_prime).min(1.0) <= w0 {
        return Err(Error::domain("endpoints must stay outside the regulator"));
    }
    let (gp, gm) = params.fixed_points()?;
    let g = match sign {
        Sign::Plus => gp,
        Sign::Minus => gm,
    };
    let reg = Regulator::square_well(b, g)?;
    let run = |xx: f64, yy: f64| {
        let spec = PathEnsembleSpec {
            refine_tol: opts.refine_tol,
            max_depth: opts.max_depth,
            ..PathEnsembleSpec::new(yy, xx, t, opts.n_steps, opts.n_samples, opts.seed)
        };
        feynman_kac(params, &reg, &spec)
    };
    let num = run(lambda * x, lambda_prime * y)?;
    let den = run(x, y)?;
    let (rn, rd) = (num.std_error / num.value, den.std_error / den.value);
    if !(rn < 0.1 && rd < 0.1) {
        return Err(Error::numerical("MC noise too large for the ratio; increase n_samples", (rn, rd)));
    }
    let ratio = num.value / den.value;
    Ok(ScalingRatio {
        ratio,
        // Covariance from the shared streams is positive; omitting it is conservative.
        std_error: ratio * (rn * rn + rd * rd).sqrt(),
        expected: (lambda * lambda_prime).powf(sign.nu(params)),
        lambda,
        lambda_prime,
    })
}

/// Uniform chain grid x_i = i h, i = 1..=n_grid, with h = x_max / n_grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainGrid {
    pub x_max: f64,
    pub n_grid: usize,
}

impl ChainGrid {
    pub fn spacing(&self) -> f64 {
        self.x_max / self.n_grid as f64
    }

    /// Grid of spacing close to `h` that places a node on the regulator edge.
    pub fn aligned(edge: f64, h: f64, x_max: f64) -> Result<Self> {
        if !(edge > 0.0 && h > 0.0 && x_max > edge) {
            return Err(Error::domain("aligned grid needs 0 < edge < x_max and h > 0"));
        }
        let per_edge = (edge / h).round().max(1.0);
        let hh = edge / per_edge;
        let n = (x_max / hh).round() as usize;
        Ok(ChainGrid { x_max: n as f64 * hh, n_grid: n })
    }
}

/// Far-field treatment of the transfer-matrix eigenproblem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ChainBoundary {
    /// Chain confined to (0, x_max].
    Box,
    /// Beyond x_max the eigenfunction continues as sqrt(x) K_omega(kappa x),
    /// the decaying solution of the pure inverse-square tail at energy -kappa^2.
    #[default]
    Tail,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    /// Interior sites; the chain has n_sites + 1 bonds.
    #[serde(alias = "N")]
    pub n_sites: usize,
    pub epsilon: f64,
    pub x: f64,
    pub y: f64,
    pub grid: ChainGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainPhase {
    Extensive,
    Nonextensive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyResult {
    pub f_xy: f64,
    /// Bound-state energy of the same regulator, when one exists.
    pub e0: Option<f64>,
    pub phase: ChainPhase,
    pub epsilon: f64,
    pub grid: ChainGrid,
    pub boundary: ChainBoundary,
}

/// Discontinuity of d^2 = exp(-eps V) at the edge node `e`: value jump and
/// slope jump, each taken as (inside) - (outside).
#[derive(Clone, Copy, Debug)]
struct EdgeJump {
    e: usize,
    value: f64,
    slope: f64,
}

/// Discretized transfer operator M_ij = h d_i K(x_i, x_j) d_j with
/// d = exp(-eps V / 2) and K the image heat kernel of time eps. At the node on
/// the regulator edge d^2 is the mean of its one-sided limits, and `edge_weights`
/// removes the h^2 error from the jump of V.
struct Transfer {
    eps: f64,
    h: f64,
    x: Vec<f64>,
    d: Vec<f64>,
    reach: usize,
    jump: Option<EdgeJump>,
    omega: f64,
    nu_minus: f64,
}

impl Transfer {
    fn new(params: &ModelParams, reg: &Regulator, eps: f64, grid: &ChainGrid, tail_nodes: bool) -> Result<Self> {
        reg.validate()?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::domain("chain coupling epsilon must be positive"));
        }
        if grid.n_grid < 2 || !(grid.x_max > 0.0) {
            return Err(Error::domain("chain grid needs x_max > 0 and n_grid >= 2"));
        }
        let h = grid.spacing();
        if h > (2.0 * eps).sqrt() {
            return Err(Error::domain(format!("grid spacing {h} does not resolve the kernel width {}", (2.0 * eps).sqrt())));
        }
        let edge = reg.b * params.x0;
        let k_edge = edge / h;
        if edge < grid.x_max && (k_edge - k_edge.round()).abs() > 1e-9 * k_edge.max(1.0) {
            return Err(Error::domain("chain grid must place a node on the regulator edge (see ChainGrid::aligned)"));
        }
        let reach = (12.0 * eps.sqrt() / h).ceil() as usize;
        let total = grid.n_grid + if tail_nodes { reach } else { 0 };
        let x: Vec<f64> = (1..=total).map(|i| i as f64 * h).collect();
        let edge_node = k_edge.round() as usize;
        let inner = (-eps * -reg.g * reg.shape(1.0) / (edge * edge)).exp();
        let outer = (-eps * params.alpha / (edge * edge)).exp();
        let delta = 1e-6;
        let shape_slope = (reg.shape(1.0) - reg.shape(1.0 - delta)) / delta;
        let v_in_slope = -reg.g * shape_slope / edge.powi(3);
        let v_out_slope = -2.0 * params.alpha / edge.powi(3);
        let jump = (edge < grid.x_max && edge_node >= 2).then_some(EdgeJump {
            e: edge_node - 1,
            value: inner - outer,
            slope: -eps * (v_in_slope * inner - v_out_slope * outer),
        });
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                if i + 1 == edge_node && edge < grid.x_max {
                    (0.5 * (inner + outer)).sqrt()
                } else {
                    (-0.5 * eps * reg.potential(params, xi)).exp()
                }
            })
            .collect();
        Ok(Transfer { eps, h, x, d, reach, jump, omega: params.omega, nu_minus: params.nu_minus })
    }

    fn kernel(&self, a: f64, b: f64) -> f64 {
        image_kernel(a, b, self.eps)
    }

    /// Transfer matrix on the first n nodes.
    fn matrix(&self, n: usize) -> Banded {
        let mut m = Banded::zeros(n, self.reach);
        for i in 0..n {
            for j in m.cols(i) {
                m.set(i, j, self.h * self.d[i] * self.kernel(self.x[i], self.x[j]) * self.d[j]);
            }
        }
        for i in 0..n {
            for (j, w) in self.edge_weights(self.x[i], n) {
                m.add(i, j, self.d[i] * w);
            }
        }
        m
    }

    /// Endpoint correction -(h^2/12) [f'] of the trapezoid rule split at the
    /// edge, for the integral of f = K(xo, s) d(s) psi(s) over the first n
    /// nodes with u = psi / d smooth there. Returned as weights on psi; u'
    /// comes from a central difference, which leaves the correction O(h^4).
    fn edge_weights(&self, xo: f64, n: usize) -> Vec<(usize, f64)> {
        let Some(EdgeJump { e, value, slope }) = self.jump else {
            return Vec::new();
        };
        if e + 1 >= n || (xo - self.x[e]).abs() >= (self.reach as f64 - 0.5) * self.h {
            return Vec::new();
        }
        let c = -self.h * self.h / 12.0;
        let xe = self.x[e];
        let k = self.kernel(xo, xe);
        let dk = self.kernel_slope(xo, xe);
        let du = c * k * value / (2.0 * self.h);
        vec![
            (e, c * (dk * value + k * slope) / self.d[e]),
            (e + 1, du / self.d[e + 1]),
            (e - 1, -du / self.d[e - 1]),
        ]
    }

    /// d/dx' of the image kernel K(x, x').
    fn kernel_slope(&self, x: f64, xp: f64) -> f64 {
        let e = self.eps;
        (free_kernel(x, xp, e) * (x - xp) + free_kernel(-x, xp, e) * (x + xp)) / (2.0 * e)
    }

    /// Ratio F(x') / F(X) of the tail solution at decay rate kappa.
    fn tail_ratio(&self, kappa: f64, xp: f64, xx: f64) -> Result<f64> {
        if kappa == 0.0 {
            return Ok((xp / xx).powf(self.nu_minus));
        }
        let kp = bessel_ik_scaled(self.omega, kappa * xp)?.k;
        let kx = bessel_ik_scaled(self.omega, kappa * xx)?.k;
        Ok((xp / xx).sqrt() * kp / kx * (-kappa * (xp - xx)).exp())
    }

    /// Matrix on [0, X] with the tail nodes folded into the last column.
    fn tail_matrix(&self, n: usize, kappa: f64) -> Result<Banded> {
        let mut m = self.matrix(n);
        let xx = self.x[n - 1];
        let ratios: Vec<f64> = (n..self.x.len())
            .map(|k| self.tail_ratio(kappa, self.x[k], xx))
            .collect::<Result<_>>()?;
        for i in n.saturating_sub(self.reach)..n {
            let s: f64 = (n..self.x.len())
                .zip(&ratios)
                .map(|(k, r)| self.h * self.d[i] * self.kernel(self.x[i], self.x[k]) * self.d[k] * r)
                .sum();
            m.add(i, n - 1, s);
        }
        Ok(m)
    }
}

/// Number of eigenvalues of m above sigma.
fn count_above(m: &Banded, sigma: f64) -> Result<usize> {
    Ok(m.shifted_lu(sigma)?.negative_pivots)
}

/// Largest eigenvalue of a transfer matrix by inertia bisection.
fn top_eigenvalue(m: &Banded) -> Result<f64> {
    let mut hi = m.norm_inf() * (1.0 + 1e-12);
    let mut lo = 0.0;
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(m, mid)? >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn require_tail(params: &ModelParams, reg: &Regulator, grid: &ChainGrid) -> Result<()> {
    params.require_main()?;
    if grid.x_max <= reg.b * params.x0 {
        return Err(Error::domain("tail boundary needs x_max beyond the regulator"));
    }
    Ok(())
}

/// Sign of lambda_top(M(kappa)) - exp(eps kappa^2): true while the tail
/// decays too slowly, i.e. below the chain's bound-state rate.
fn tail_excess(t: &Transfer, n: usize, kappa: f64) -> Result<bool> {
    let m = t.tail_matrix(n, kappa)?;
    Ok(count_above(&m, (t.eps * kappa * kappa).exp())? >= 1)
}

/// Free-energy density f = -(1/eps) log lambda_max of the transfer matrix.
///
/// Box: bisection on the top eigenvalue of the confined chain; f > 0 there
/// reports the confinement energy and the phase is read from the sign.
/// Tail: f = -kappa^2 where kappa solves lambda_top(M(kappa)) = exp(eps kappa^2);
/// without a root the top of the spectrum is the continuum edge and f = 0.
pub fn free_energy_density(
    params: &ModelParams,
    reg: &Regulator,
    epsilon: f64,
    grid: &ChainGrid,
    boundary: ChainBoundary,
) -> Result<FreeEnergyResult> {
    let e0 = match params.mode {
        crate::model::Mode::Main => spectrum::bound_state(params, reg)?.map(|s| s.energy),
        crate::model::Mode::LimitCycle => None,
    };
    let f_xy = match boundary {
        ChainBoundary::Box => {
            let t = Transfer::new(params, reg, epsilon, grid, false)?;
            let lam = top_eigenvalue(&t.matrix(grid.n_grid))?;
            -lam.ln() / epsilon
        }
        ChainBoundary::Tail => {
            require_tail(params, reg, grid)?;
            let t = Transfer::new(params, reg, epsilon, grid, true)?;
            tail_free_energy(&t, grid.n_grid)?
        }
    };
    let phase = if f_xy < 0.0 { ChainPhase::Extensive } else { ChainPhase::Nonextensive };
    Ok(FreeEnergyResult { f_xy, e0, phase, epsilon, grid: *grid, boundary })
}

fn tail_free_energy(t: &Transfer, n: usize) -> Result<f64> {
    if !tail_excess(t, n, 0.0)? {
        return Ok(0.0);
    }
    // The excess is monotone in kappa: the tail column shrinks and exp(eps kappa^2) grows.
    let mut hi = 1.0 / t.h;
    if tail_excess(t, n, hi)? {
        return Err(Error::numerical("chain bound state deeper than the grid resolves", hi));
    }
    let mut lo = hi;
    while tail_excess(t, n, lo)? == false {
        lo *= 1e-2;
        if lo < 1e-30 {
            return Err(Error::numerical("chain bound-state rate below 1e-30", lo));
        }
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    while b - a > 1e-13 {
        let mid = 0.5 * (a + b);
        if tail_excess(t, n, mid.exp())? {
            a = mid;
        } else {
            b = mid;
        }
    }
    hi = (0.5 * (a + b)).exp();
    Ok(-hi * hi)
}

/// Free energy at eps, eps/2 and eps/4 extrapolated to eps -> 0 with the
/// convergence order measured from the three levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichardsonResult {
    pub levels: [f64; 3],
    pub epsilon: f64,
    pub order: f64,
    pub f_xy: f64,
    pub e0: Option<f64>,
}

pub fn free_energy_extrapolated(
    params: &ModelParams,
    reg: &Regulator,
    epsilon: f64,
    grid: &ChainGrid,
    boundary: ChainBoundary,
) -> Result<RichardsonResult> {
    let mut levels = [0.0; 3];
    let mut e0 = None;
    for (k, lv) in levels.iter_mut().enumerate() {
        let r = free_energy_density(params, reg, epsilon / f64::powi(2.0, k as i32), grid, boundary)?;
        *lv = r.f_xy;
        e0 = r.e0;
    }
    let (d1, d2) = (levels[0] - levels[1], levels[1] - levels[2]);
    if !(d1 / d2 > 1.0) {
        return Err(Error::numerical("free energy not in the asymptotic regime of eps", levels));
    }
    let order = (d1 / d2).log2();
    let f_xy = levels[2] - d2 / (f64::powf(2.0, order) - 1.0);
    Ok(RichardsonResult { levels, epsilon, order, f_xy, e0 })
}

/// Critical coupling of the chain at fixed eps: the g where the tail condition
/// first admits a zero-energy solution.
pub fn chain_critical_coupling(params: &ModelParams, reg: &Regulator, epsilon: f64, grid: &ChainGrid) -> Result<f64> {
    require_tail(params, reg, grid)?;
    let binds = |g: f64| -> Result<bool> {
        let t = Transfer::new(params, &reg.with_g(g), epsilon, grid, true)?;
        tail_excess(&t, grid.n_grid, 0.0)
    };
    let guess = spectrum::critical_coupling(params, reg)?;
    let (mut lo, mut hi) = (0.5 * guess, 1.5 * guess);
    if binds(lo)? || !binds(hi)? {
        return Err(Error::numerical("chain threshold outside [g_*/2, 3 g_*/2]", (lo, hi)));
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if binds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exponent of f vs g - g_* at fixed eps, with g_* the chain's own threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainExponent {
    pub epsilon: f64,
    pub g_star: f64,
    pub dg: Vec<f64>,
    pub f_xy: Vec<f64>,
    pub plain: CriticalFit,
    pub corrected: CriticalFit,
}

pub fn chain_exponent(
    params: &ModelParams,
    reg: &Regulator,
    epsilon: f64,
    grid: &ChainGrid,
    dgs: &[f64],
) -> Result<ChainExponent> {
    let g_star = chain_critical_coupling(params, reg, epsilon, grid)?;
    let f_xy: Vec<f64> = dgs
        .par_iter()
        .map(|&dg| {
            free_energy_density(params, &reg.with_g(g_star + dg), epsilon, grid, ChainBoundary::Tail).map(|r| r.f_xy)
        })
        .collect::<Result<_>>()?;
    if f_xy.iter().any(|&f| !(f < 0.0)) {
        return Err(Error::numerical("chain free energy vanished above its threshold", &f_xy));
    }
    let mag: Vec<f64> = f_xy.iter().map(|f| -f).collect();
    let scale = (reg.b * params.x0).powi(2);
    let xi2: Vec<f64> = mag.iter().map(|m| m * scale).collect();
    Ok(ChainExponent {
        epsilon,
        g_star,
        dg: dgs.to_vec(),
        plain: spectrum::fit_critical_plain(g_star, dgs, &xi2)?,
        corrected: spectrum::fit_critical(g_star, dgs, &xi2)?,
        f_xy,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionEstimate {
    pub z: f64,
    /// |Z(2 x_max) - Z(x_max)|.
    pub truncation_error: f64,
    /// Total imaginary time (n_sites + 1) eps.
    pub time: f64,
}

fn partition_on(params: &ModelParams, reg: &Regulator, spec: &ChainSpec, grid: &ChainGrid) -> Result<f64> {
    let t = Transfer::new(params, reg, spec.epsilon, grid, false)?;
    let m = t.matrix(grid.n_grid);
    let dv = |x: f64| (-0.5 * spec.epsilon * reg.potential(params, x)).exp();
    let (dx, dy) = (dv(spec.x), dv(spec.y));
    let mut q: Vec<f64> = (0..grid.n_grid).map(|i| t.d[i] * t.kernel(t.x[i], spec.y) * dy).collect();
    for _ in 1..spec.n_sites {
        q = m.matvec(&q);
    }
    let plain: f64 = (0..grid.n_grid).map(|i| t.h * t.kernel(spec.x, t.x[i]) * t.d[i] * q[i]).sum();
    let corr: f64 = t.edge_weights(spec.x, grid.n_grid).iter().map(|&(j, w)| w * q[j]).sum();
    Ok(dx * (plain + corr))
}

/// Z_xy(N, eps): N integrals over the interior sites of the product of N + 1
/// transfer kernels, on the grid and on the grid with x_max doubled.
pub fn chain_partition(params: &ModelParams, reg: &Regulator, spec: &ChainSpec) -> Result<PartitionEstimate> {
    if spec.n_sites < 1 {
        return Err(Error::domain("chain needs at least one interior site"));
    }
    if !(spec.x > 0.0 && spec.y > 0.0) {
        return Err(Error::domain("chain endpoints must be positive"));
    }
    let z = partition_on(params, reg, spec, &spec.grid)?;
    let doubled = ChainGrid { x_max: 2.0 * spec.grid.x_max, n_grid: 2 * spec.grid.n_grid };
    let z2 = partition_on(params, reg, spec, &doubled)?;
    Ok(PartitionEstimate { z, truncation_error: (z2 - z).abs(), time: (spec.n_sites + 1) as f64 * spec.epsilon })
}
