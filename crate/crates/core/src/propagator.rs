//! Imaginary-time propagator outside a square-well regulator by quadrature of
//! the continuum spectral sum, the fixed-point closed forms, and the checks of
//! the exact and near-fixed-point homogeneous laws, the Callan–Symanzik
//! residual and the scaling-function collapse.
//!
//! Two spectral weights are available. `Physical` uses the continuum states
//! normalized to unit asymptotic amplitude, which is the true kernel of
//! e^{-tH}. `Frozen` holds the normalization factor B at 1 for every energy;
//! the near-fixed-point laws with prefactor lambda^{2 nu - 1} hold for this
//! kernel, while the physical kernel carries lambda^{-1} instead because its
//! B vanishes as E^{nu} at small energy.

use crate::error::{Error, Result};
use crate::model::{fixed_points, g_of_gamma, ModelParams};
use crate::numerics::fit::levenberg_marquardt;
use crate::numerics::quad::{integrate_with_breaks, QuadOptions};
use crate::spectrum::pole_free_nd;
use crate::specfun::{bessel_ik_scaled, bessel_jy};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which fixed point a reduced coupling u is measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    /// UV point g_+, u = nu_+ - gamma.
    #[serde(rename = "+")]
    Plus,
    /// IR point g_-, u = gamma - nu_-.
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn nu(self, params: &ModelParams) -> f64 {
        match self {
            Sign::Plus => params.nu_plus,
            Sign::Minus => params.nu_minus,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Sign::Plus),
            "-" | "minus" => Ok(Sign::Minus),
            _ => Err(Error::domain(format!("sign must be + or -, got {s:?}"))),
        }
    }
}

/// Spectral weight of the continuum sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Physical,
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorSample {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub b: f64,
    pub g: f64,
    pub value: f64,
    /// Relative quadrature error estimate.
    pub quad_error: f64,
}

/// Square-well coupling at reduced coupling `u` from the chosen fixed point.
pub fn coupling_at(params: &ModelParams, sign: Sign, u: f64) -> Result<f64> {
    params.require_main()?;
    let gamma = match sign {
        Sign::Plus => params.nu_plus - u,
        Sign::Minus => params.nu_minus + u,
    };
    g_of_gamma(gamma)
}

/// Reduced coupling of `g` measured from the chosen fixed point.
pub fn reduced_coupling(params: &ModelParams, sign: Sign, g: f64) -> Result<f64> {
    let gamma = crate::model::gamma_of_g(g)?.gamma;
    Ok(match sign {
        Sign::Plus => params.nu_plus - gamma,
        Sign::Minus => gamma - params.nu_minus,
    })
}

/// Relative accuracy requested from every propagator quadrature.
const QUAD_REL: f64 = 1e-12;
/// e^{-t k^2} is below e^{-TAIL} past the cutoff.
const TAIL: f64 = 45.0;

/// sqrt(z) (n J_w(z) + d J_{-w}(z)).
fn outer(params: &ModelParams, n: f64, d: f64, z: f64) -> Result<f64> {
    let jy = bessel_jy(params.omega, z)?;
    let (s, c) = (params.omega * PI).sin_cos();
    let jm = c * jy.j - s * jy.y;
    Ok(z.sqrt() * (n * jy.j + d * jm))
}

/// Initial partition of [0, kmax] in units of kmax.
const BREAKS: [f64; 4] = [1e-6, 1e-4, 1e-2, 0.1];
/// A second partition whose nodes never coincide with the first under k -> lambda k.
const BREAKS_ALT: [f64; 5] = [3.1e-6, 2.7e-4, 7.3e-3, 0.061, 0.37];

/// Spectral integral over k of e^{-t k^2} Phi(kx) Phi(ky) w(k) for a square well of width b x0.
pub fn propagator_with(
    params: &ModelParams,
    norm: Normalization,
    b: f64,
    g: f64,
    x: f64,
    y: f64,
    t: f64,
) -> Result<PropagatorSample> {
    propagator_partitioned(params, norm, b, g, x, y, t, &BREAKS)
}

#[allow(clippy::too_many_arguments)]
fn propagator_partitioned(
    params: &ModelParams,
    norm: Normalization,
    b: f64,
    g: f64,
    x: f64,
    y: f64,
    t: f64,
    partition: &[f64],
) -> Result<PropagatorSample> {
    params.require_main()?;
    let wall = b * params.x0;
    if !(b > 0.0 && t > 0.0) {
        return Err(Error::domain("propagator needs b > 0 and t > 0"));
    }
    if !(x > wall && y > wall) {
        return Err(Error::domain(format!("x = {x}, y = {y} must lie outside the well edge {wall}")));
    }
    let (_, g_minus) = fixed_points(params)?;
    if !(0.0..=g_minus).contains(&g) {
        return Err(Error::domain(format!(
            "g = {g} outside [0, g_-]: a bound state would be missing from the continuum sum"
        )));
    }
    let kmax = (TAIL / t).sqrt();
    let sw = (params.omega * PI).sin();
    let mut first_err: Option<Error> = None;
    let mut f = |k: f64| -> f64 {
        if k == 0.0 {
            return 0.0;
        }
        let r = (|| -> Result<f64> {
            let xi = k * wall;
            let (n, d) = pole_free_nd(params, g, xi)?;
            let w = match norm {
                Normalization::Physical => 1.0 / (n * n + d * d + 2.0 * n * d * (params.omega * PI).cos()),
                Normalization::Frozen => PI / (2.0 * sw * sw * xi),
            };
            let px = outer(params, n, d, k * x)?;
            let py = if y == x { px } else { outer(params, n, d, k * y)? };
            Ok((-t * k * k).exp() * px * py * w)
        })();
        match r {
            Ok(v) => v,
            Err(e) => {
                first_err.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let breaks: Vec<f64> = partition.iter().map(|s| s * kmax).collect();
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: QUAD_REL, max_intervals: 4000 };
    let res = integrate_with_breaks(&mut f, 0.0, kmax, &breaks, opts);
    if let Some(e) = first_err {
        return Err(e);
    }
    let res = res?;
    if !(res.value > 0.0) {
        return Err(Error::numerical("propagator quadrature lost positivity", (x, y, t, res.value)));
    }
    Ok(PropagatorSample { x, y, t, b, g, value: res.value, quad_error: res.abs_error / res.value })
}

/// Physical propagator G_{b,g}(x, -it; y).
pub fn propagator_quadrature(params: &ModelParams, b: f64, g: f64, x: f64, y: f64, t: f64) -> Result<PropagatorSample> {
    propagator_with(params, Normalization::Physical, b, g, x, y, t)
}

/// Closed form at b -> 0 on a fixed point:
/// (sqrt(xy)/2t) e^{-(x^2+y^2)/4t} I_{+-omega}(xy/2t).
pub fn fixed_point_propagator(params: &ModelParams, sign: Sign, x: f64, y: f64, t: f64) -> Result<f64> {
    params.require_main()?;
    if !(x > 0.0 && y > 0.0 && t > 0.0) {
        return Err(Error::domain("fixed-point propagator needs x, y, t > 0"));
    }
    let z = x * y / (2.0 * t);
    let ie = bessel_ik_scaled(sign.factor() * params.omega, z)?.i;
    Ok((x * y).sqrt() / (2.0 * t) * (-(x - y) * (x - y) / (4.0 * t)).exp() * ie)
}

/// Long-time limit of the closed form: t^{-1/2} (xy/t)^{nu} / (2^{2 nu} Gamma(1 +- omega)).
pub fn fixed_point_long_time(params: &ModelParams, sign: Sign, x: f64, y: f64, t: f64) -> f64 {
    let nu = sign.nu(params);
    let gm = crate::specfun::gamma_f(1.0 + sign.factor() * params.omega);
    t.powf(-0.5) * (x * y / t).powf(nu) / (2f64.powf(2.0 * nu) * gm)
}

/// Relative residual of the exact law and its combined quadrature error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub quad_error: f64,
}

impl LawCheck {
    fn new(lhs: &PropagatorSample, rhs_value: f64, rhs_err: f64) -> Self {
        LawCheck {
            lhs: lhs.value,
            rhs: rhs_value,
            residual: lhs.value / rhs_value - 1.0,
            quad_error: lhs.quad_error + rhs_err,
        }
    }
}

/// G_{b,g}(lx, -il^2 t; ly) against l^{-1} G_{b/l,g}(x, -it; y). The two sides
/// use different initial partitions so their quadrature nodes are unrelated.
pub fn check_exact_law(
    params: &ModelParams,
    b: f64,
    g: f64,
    x: f64,
    y: f64,
    t: f64,
    lambda: f64,
) -> Result<LawCheck> {
    let lhs = propagator_quadrature(params, b, g, lambda * x, lambda * y, lambda * lambda * t)?;
    let rhs = propagator_partitioned(params, Normalization::Physical, b / lambda, g, x, y, t, &BREAKS_ALT)?;
    Ok(LawCheck::new(&lhs, rhs.value / lambda, rhs.quad_error))
}

/// u' = lambda^{-+2 omega} u for the chosen fixed point.
pub fn rescaled_coupling(params: &ModelParams, sign: Sign, u: f64, lambda: f64) -> f64 {
    u * lambda.powf(-sign.factor() * 2.0 * params.omega)
}

fn sample_u(
    params: &ModelParams,
    norm: Normalization,
    sign: Sign,
    b: f64,
    u: f64,
    x: f64,
    y: f64,
    t: f64,
) -> Result<PropagatorSample> {
    propagator_with(params, norm, b, coupling_at(params, sign, u)?, x, y, t)
}

/// Near-fixed-point law G_{b,u}(lx, -il^2 t; ly) ~ l^{2 nu - 1} G_{b,u'}(x, -it; y).
pub fn check_asymptotic_law(
    params: &ModelParams,
    norm: Normalization,
    sign: Sign,
    b: f64,
    u: f64,
    x: f64,
    y: f64,
    t: f64,
    lambda: f64,
) -> Result<LawCheck> {
    let nu = sign.nu(params);
    let lhs = sample_u(params, norm, sign, b, u, lambda * x, lambda * y, lambda * lambda * t)?;
    let rhs = sample_u(params, norm, sign, b, rescaled_coupling(params, sign, u, lambda), x, y, t)?;
    Ok(LawCheck::new(&lhs, lambda.powf(2.0 * nu - 1.0) * rhs.value, rhs.quad_error))
}

/// Scaling relation G(b, u) ~ l^{-2 nu} G(b/l, u l^{+-2 omega}) at fixed (x, y, t).
pub fn check_scaling_relation(
    params: &ModelParams,
    norm: Normalization,
    sign: Sign,
    b: f64,
    u: f64,
    x: f64,
    y: f64,
    t: f64,
    lambda: f64,
) -> Result<LawCheck> {
    let nu = sign.nu(params);
    let lhs = sample_u(params, norm, sign, b, u, x, y, t)?;
    let rhs = sample_u(params, norm, sign, b / lambda, rescaled_coupling(params, sign, u, 1.0 / lambda), x, y, t)?;
    Ok(LawCheck::new(&lhs, lambda.powf(-2.0 * nu) * rhs.value, rhs.quad_error))
}

/// Callan–Symanzik residual (b d_b -+ 2 omega u d_u + 2 nu) G / (2 nu G) by
/// central differences with relative step `h` in b and u.
pub fn callan_symanzik_residual(
    params: &ModelParams,
    norm: Normalization,
    sign: Sign,
    b: f64,
    u: f64,
    x: f64,
    y: f64,
    t: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::domain("finite-difference step must lie in (0, 0.5)"));
    }
    let nu = sign.nu(params);
    let at = |bb: f64, uu: f64| sample_u(params, norm, sign, bb, uu, x, y, t).map(|s| s.value);
    let g0 = at(b, u)?;
    let b_db = (at(b * (1.0 + h), u)? - at(b * (1.0 - h), u)?) / (2.0 * h);
    let u_du = if u == 0.0 { 0.0 } else { (at(b, u * (1.0 + h))? - at(b, u * (1.0 - h))?) / (2.0 * h) };
    let w = params.omega;
    Ok((b_db - sign.factor() * 2.0 * w * u_du + 2.0 * nu * g0) / (2.0 * nu * g0))
}

/// Two-power fit A z^{-p} + C z^{-q} of a tabulated scaling function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPowerFit {
    pub amplitude: f64,
    pub p: f64,
    pub c: f64,
    pub q: f64,
    /// RMS of the log residuals.
    pub residual: f64,
}

/// Fit log f = log(A z^{-p} + C z^{-q}) with p > q; initial exponents from the caller.
pub fn fit_two_power(z: &[f64], f: &[f64], p0: f64, q0: f64) -> Result<TwoPowerFit> {
    if z.len() != f.len() || z.len() < 5 {
        return Err(Error::domain("two-power fit needs at least five matched points"));
    }
    if f.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::domain("two-power fit needs positive data"));
    }
    // Starting amplitudes: leading power from the smallest z, subleading from the largest.
    let (i0, i1) = (0, z.len() - 1);
    let a0 = f[i0] * z[i0].powf(p0);
    let rest = (f[i1] - a0 * z[i1].powf(-p0)).abs().max(1e-12 * f[i1]);
    let c0 = rest * z[i1].powf(q0);
    let resid = |prm: &[f64]| -> Option<Vec<f64>> {
        let (la, p, lc, q) = (prm[0], prm[1], prm[2], prm[3]);
        z.iter()
            .zip(f)
            .map(|(&zz, &ff)| {
                let m = la.exp() * zz.powf(-p) + lc.exp() * zz.powf(-q);
                (m > 0.0).then(|| m.ln() - ff.ln())
            })
            .collect()
    };
    let (prm, rms) = levenberg_marquardt(resid, &[a0.ln(), p0, c0.ln(), q0], 500)?;
    let (mut a, mut p, mut c, mut q) = (prm[0].exp(), prm[1], prm[2].exp(), prm[3]);
    if q > p {
        std::mem::swap(&mut a, &mut c);
        std::mem::swap(&mut p, &mut q);
    }
    Ok(TwoPowerFit { amplitude: a, p, c, q, residual: rms })
}

/// One row of the collapse: the reduced coupling, and the rescaled samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub u: f64,
    pub z: Vec<f64>,
    /// G sqrt(t) (u/u0)^{-(1 + 1/2 omega)}.
    pub phi: Vec<f64>,
    /// Largest relative deviation from the reference row at shared z.
    pub spread: f64,
}

/// Scaling function tabulated on the reference row u = u0 with its two-power fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFunctionTable {
    pub u0: f64,
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
    pub rows: Vec<CollapseRow>,
    /// Largest spread over all rows.
    pub spread: f64,
    /// Fit of the one-coordinate factor sqrt(phi) (x = y), exponents -> (nu_+, nu_-).
    pub fit: TwoPowerFit,
}

/// Log-log linear interpolation of a table sorted by increasing abscissa.
fn interp_loglog(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    let i = xs.partition_point(|&v| v < x);
    if i == 0 || i == xs.len() {
        return (xs.get(i).is_some_and(|&v| v == x)).then(|| ys[i]);
    }
    let (x0, x1) = (xs[i - 1].ln(), xs[i].ln());
    let s = (x.ln() - x0) / (x1 - x0);
    Some((ys[i - 1].ln() * (1.0 - s) + ys[i].ln() * s).exp())
}

/// Collapse of frozen-normalization data near g_+ at x = y onto
/// Phi(z), z = b (u/u0)^{1/2 omega}. The reference row u = u0 defines Phi; the
/// remaining rows in `u_grid` are compared with it where their z range overlaps.
pub fn scaling_collapse(
    params: &ModelParams,
    b_grid: &[f64],
    u_grid: &[f64],
    u0: f64,
    x: f64,
    t: f64,
) -> Result<ScalingFunctionTable> {
    use rayon::prelude::*;
    params.require_main()?;
    if b_grid.len() < 5 || !(u0 > 0.0) {
        return Err(Error::domain("collapse needs at least five b values and u0 > 0"));
    }
    let mut bs = b_grid.to_vec();
    bs.sort_by(f64::total_cmp);
    let w = params.omega;
    let row = |u: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let s = u / u0;
        let vals: Result<Vec<f64>> = bs
            .par_iter()
            .map(|&b| sample_u(params, Normalization::Frozen, Sign::Plus, b, u, x, x, t).map(|p| p.value))
            .collect();
        let z = bs.iter().map(|b| b * s.powf(1.0 / (2.0 * w))).collect();
        let phi = vals?.iter().map(|g| g * t.sqrt() * s.powf(-(1.0 + 1.0 / (2.0 * w)))).collect();
        Ok((z, phi))
    };
    let (z, phi) = row(u0)?;
    let mut rows = Vec::new();
    let mut spread: f64 = 0.0;
    for &u in u_grid.iter().filter(|&&u| u != u0) {
        let (zr, pr) = row(u)?;
        let s = zr
            .iter()
            .zip(&pr)
            .filter_map(|(&zz, &pp)| interp_loglog(&z, &phi, zz).map(|r| (pp / r - 1.0).abs()))
            .fold(0.0, f64::max);
        spread = spread.max(s);
        rows.push(CollapseRow { u, z: zr, phi: pr, spread: s });
    }
    let root: Vec<f64> = phi.iter().map(|v| v.sqrt()).collect();
    let fit = fit_two_power(&z, &root, params.nu_plus, params.nu_minus)?;
    Ok(ScalingFunctionTable { u0, z, phi, rows, spread, fit })
}

/// d log G / d log t from two quadratures at t and t (1 + h).
pub fn log_slope_in_t(params: &ModelParams, b: f64, g: f64, x: f64, y: f64, t: f64, h: f64) -> Result<f64> {
    let a = propagator_quadrature(params, b, g, x, y, t * (1.0 - h))?.value;
    let c = propagator_quadrature(params, b, g, x, y, t * (1.0 + h))?.value;
    Ok((c / a).ln() / ((1.0 + h) / (1.0 - h)).ln())
}

/// Both fixed-point couplings paired with their sign.
pub fn fixed_point_couplings(params: &ModelParams) -> Result<[(Sign, f64); 2]> {
    let (gp, gm) = fixed_points(params)?;
    Ok([(Sign::Plus, gp), (Sign::Minus, gm)])
}
