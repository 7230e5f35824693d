//! Beta function for gamma = sqrt(g) cot sqrt(g), its fixed points and RG
//! eigenvalues, closed-form and integrated flows, constant-ratio contours and
//! the log-periodic limit cycle for alpha < -1/4.

use crate::error::{Error, Result};
use crate::model::{fixed_points, g_of_gamma, gamma_raw, Mode, ModelParams};
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::roots::{brent, scan_brackets};
use crate::spectrum::pole_free_nd;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point in coupling space. `u = gamma - nu_-` (distance from the IR fixed point).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub b: f64,
    pub gamma: f64,
    /// NaN when gamma has left the first branch (gamma >= 1).
    pub g: f64,
    pub u: f64,
    /// gamma started or ended outside (nu_-, nu_+).
    pub exited_branch: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    IrAttractive,
    UvAttractive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointInfo {
    pub gamma_star: f64,
    pub g_star: f64,
    /// RG eigenvalue y = beta'(gamma_star) = 1 - 2 gamma_star.
    pub y: f64,
    pub stability: Stability,
}

/// beta(gamma) = b d gamma / db = -(gamma - nu_-)(gamma - nu_+).
pub fn beta(params: &ModelParams, gamma: f64) -> f64 {
    -(gamma - params.nu_minus) * (gamma - params.nu_plus)
}

/// Analytic slope 1 - 2 gamma.
pub fn beta_slope(gamma: f64) -> f64 {
    1.0 - 2.0 * gamma
}

/// Central-difference slope of beta; exact for a quadratic up to rounding.
pub fn beta_slope_fd(params: &ModelParams, gamma: f64) -> f64 {
    let h = 1e-3;
    (beta(params, gamma + h) - beta(params, gamma - h)) / (2.0 * h)
}

/// d gamma / dg on the first branch.
pub fn dgamma_dg(g: f64) -> f64 {
    let s = g.sqrt();
    let (sn, cs) = s.sin_cos();
    (cs / sn - s / (sn * sn)) / (2.0 * s)
}

/// Beta function in the g frame: b dg/db = beta(gamma(g)) / gamma'(g).
pub fn beta_g(params: &ModelParams, g: f64) -> f64 {
    beta(params, gamma_raw(g)) / dgamma_dg(g)
}

/// Both fixed points with their eigenvalues: UV-attractive g_+ first.
pub fn fixed_point_info(params: &ModelParams) -> Result<[FixedPointInfo; 2]> {
    let (gp, gm) = fixed_points(params)?;
    Ok([
        FixedPointInfo {
            gamma_star: params.nu_plus,
            g_star: gp,
            y: beta_slope(params.nu_plus),
            stability: Stability::UvAttractive,
        },
        FixedPointInfo {
            gamma_star: params.nu_minus,
            g_star: gm,
            y: beta_slope(params.nu_minus),
            stability: Stability::IrAttractive,
        },
    ])
}

fn state(params: &ModelParams, b: f64, gamma: f64, exited: bool) -> FlowState {
    let g = if gamma < 1.0 { g_of_gamma(gamma).unwrap_or(f64::NAN) } else { f64::NAN };
    FlowState { b, gamma, g, u: gamma - params.nu_minus, exited_branch: exited }
}

/// Closed-form flow: (gamma - nu_-)/(gamma - nu_+) scales as b^{2 omega}.
pub fn flow(params: &ModelParams, gamma0: f64, b0: f64, b1: f64) -> Result<FlowState> {
    params.require_main()?;
    if !(b0 > 0.0 && b1 > 0.0) {
        return Err(Error::domain("flow endpoints must be positive"));
    }
    let (nm, np) = (params.nu_minus, params.nu_plus);
    let inside = |g: f64| g > nm && g < np;
    if gamma0 == nm || gamma0 == np || b0 == b1 {
        return Ok(state(params, b1, gamma0, !inside(gamma0)));
    }
    let r = (gamma0 - nm) / (gamma0 - np) * (b1 / b0).powf(2.0 * params.omega);
    let gamma = (nm - np * r) / (1.0 - r);
    Ok(state(params, b1, gamma, !inside(gamma0) || !inside(gamma)))
}

/// Flow by adaptive integration of the beta function in ln b.
pub fn flow_numeric(params: &ModelParams, gamma0: f64, b0: f64, b1: f64) -> Result<FlowState> {
    params.require_main()?;
    let y = ode::integrate(
        |_, y: &[f64; 1]| [beta(params, y[0])],
        b0.ln(),
        [gamma0],
        b1.ln(),
        OdeOptions { rtol: 1e-13, atol: 1e-15, max_steps: 1_000_000 },
    )?;
    let inside = |g: f64| g > params.nu_minus && g < params.nu_plus;
    Ok(state(params, b1, y[0], !inside(gamma0) || !inside(y[0])))
}

/// One infinitesimal cutoff step b -> b(1 - eps): u' = u (1 - eps)^y.
pub fn scaling_variable_step(u: f64, epsilon: f64, fp: &FixedPointInfo) -> f64 {
    u * (1.0 - epsilon).powf(fp.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    pub xi: f64,
    pub g: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub points: Vec<ContourPoint>,
    /// xi values where no first-branch coupling reproduces the ratio.
    pub omitted: Vec<f64>,
}

/// Coupling g(xi) along the level set C+/C- = ratio_target.
pub fn contour_constant_ratio(params: &ModelParams, ratio_target: f64, xi_grid: &[f64]) -> Result<Contour> {
    params.require_main()?;
    if !(ratio_target > 0.0) {
        return Err(Error::domain("ratio target must be positive"));
    }
    let (gp, gm) = fixed_points(params)?;
    let mut points = Vec::new();
    let mut omitted = Vec::new();
    for &xi in xi_grid {
        if !(xi > 0.0) {
            return Err(Error::domain("contour xi values must be positive"));
        }
        let f = |g: f64| match pole_free_nd(params, g, xi) {
            Ok((n, d)) => n - ratio_target * d,
            Err(_) => f64::NAN,
        };
        // Prefer the (g_+, g_-) window, then the rest of the first branch.
        let eps = 1e-9;
        let mut roots = Vec::new();
        for (lo, hi) in [(gp, gm), (eps, PI * PI - eps)] {
            for (a, b) in scan_brackets(f, lo, hi, 400, false) {
                let g = brent(f, a, b, 1e-14)?;
                let (n, d) = pole_free_nd(params, g, xi)?;
                if d != 0.0 && (n / d / ratio_target - 1.0).abs() < 1e-6 {
                    roots.push(g);
                }
            }
            if !roots.is_empty() {
                break;
            }
        }
        // Follow the branch that ends at g_- as xi -> 0.
        match roots.iter().copied().min_by(|a, b| (a - gm).abs().total_cmp(&(b - gm).abs())) {
            Some(g) => points.push(ContourPoint { xi, g, ratio: ratio_target }),
            None => omitted.push(xi),
        }
    }
    Ok(Contour { points, omitted })
}

/// Roots of the log-periodic matching condition for alpha < -1/4.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitCycleState {
    pub abs_omega: f64,
    pub b: f64,
    pub eps: f64,
    pub phi: f64,
    pub g_branches: Vec<f64>,
}

/// Phase of the normalizable zero-range solution, from integrating
/// psi'' = (alpha/z^2 + 1) psi inward in ln z from z = 40 and reading
/// z psi'/psi = 1/2 - |omega| tan(|omega| ln z + phi) near the origin.
/// Returned in [0, pi).
pub fn limit_cycle_phase(params: &ModelParams) -> Result<f64> {
    if params.mode != Mode::LimitCycle {
        return Err(Error::domain("limit cycle requires alpha < -1/4"));
    }
    let (alpha, w) = (params.alpha, params.omega);
    let z0: f64 = 40.0;
    let z1: f64 = 1e-7;
    // y = [psi, z psi'] in s = ln z; start on the decaying asymptote.
    let y = ode::integrate(
        |s, y: &[f64; 2]| [y[1], y[1] + (alpha + (2.0 * s).exp()) * y[0]],
        z0.ln(),
        [1.0, -z0 - alpha / (2.0 * z0)],
        z1.ln(),
        OdeOptions { rtol: 1e-12, atol: 1e-300, max_steps: 1_000_000 },
    )?;
    let ang = (0.5 * y[0] - y[1]).atan2(w * y[0]);
    Ok((ang - w * z1.ln()).rem_euclid(PI))
}

/// Closed form of the same phase: -|omega| ln 2 - arg Gamma(1 + i|omega|) - pi/2 (mod pi).
pub fn limit_cycle_phase_analytic(params: &ModelParams) -> Result<f64> {
    if params.mode != Mode::LimitCycle {
        return Err(Error::domain("limit cycle requires alpha < -1/4"));
    }
    let w = params.omega;
    Ok((-w * 2f64.ln() - arg_gamma_1p_i(w) - 0.5 * PI).rem_euclid(PI))
}

/// arg Gamma(1 + i y) from the product formula's logarithm:
/// arg Gamma(1+iy) = -euler y + sum_k (y/k - atan(y/k)), with an Euler–Maclaurin tail.
fn arg_gamma_1p_i(y: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_860_6;
    let n = 2000;
    let mut s = -EULER * y;
    for k in 1..=n {
        let k = k as f64;
        s += y / k - (y / k).atan();
    }
    // Tail sum_{k>n} (y/k - atan(y/k)) ~ sum y^3/(3k^3) - y^5/(5k^5).
    let nn = n as f64;
    let t3 = 1.0 / (2.0 * nn * nn) - 1.0 / (2.0 * nn.powi(3));
    s += y.powi(3) / 3.0 * t3;
    s
}

/// All first-branch couplings solving the log-periodic matching condition at (b, eps).
pub fn limit_cycle(params: &ModelParams, b: f64, eps: f64) -> Result<LimitCycleState> {
    let phi = limit_cycle_phase(params)?;
    limit_cycle_with_phase(params, b, eps, phi)
}

pub fn limit_cycle_with_phase(params: &ModelParams, b: f64, eps: f64, phi: f64) -> Result<LimitCycleState> {
    if params.mode != Mode::LimitCycle {
        return Err(Error::domain("limit cycle requires alpha < -1/4"));
    }
    if !(b > 0.0 && eps > 0.0) {
        return Err(Error::domain("limit cycle needs b > 0 and eps > 0"));
    }
    let w = params.omega;
    let theta = w * b.ln() + 0.5 * w * eps.ln() + phi;
    // Reduce the phase to (-pi/2, pi/2] so tan is evaluated on its principal branch.
    let red = theta - PI * (theta / PI).round();
    let rhs = 0.5 - w * red.tan();
    let mut g_branches = Vec::new();
    if rhs.is_finite() && rhs < 1.0 {
        g_branches.push(g_of_gamma(rhs)?);
    }
    Ok(LimitCycleState { abs_omega: w, b, eps, phi, g_branches })
}
