//! Reflection from the regulated well on the half line: amplitude, phase
//! shift, the small-mu expansion, curves of constant phase in (mu, g), and the
//! bound-state pole of the continued amplitude.
//!
//! With mu = k b x0, zeta = sqrt(mu^2 + g) and s = mu F'(mu) sin zeta - F(mu) (zeta cos zeta - sin zeta / 2)
//! for F = J_w, Y_w, the amplitude is r = i e^{-i w pi} (s_J - i s_Y)/(s_J + i s_Y). This is the
//! cotangent-free form of c = (Y' - dY)/(J' - dJ), d = (2 zeta cot zeta - 1)/(2 mu).

use crate::error::{Error, Result};
use crate::model::{gamma_raw, ModelParams, Regulator, RegulatorKind};
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::roots::{brent, scan_brackets};
use crate::specfun::{bessel_jy, gamma_f, log_derivative_k};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectionAmplitude {
    pub re: f64,
    pub im: f64,
    /// Wavenumber in units of 1/x0.
    pub k: f64,
    pub mu: f64,
    pub g: f64,
}

impl ReflectionAmplitude {
    pub fn r(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// delta defined by r = -e^{2 i delta}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseShift {
    pub mu: f64,
    pub g: f64,
    pub delta: f64,
}

fn check_branch(g: f64, mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain("mu = k b x0 must be positive"));
    }
    if !(g >= 0.0 && mu * mu + g < PI * PI) {
        return Err(Error::domain(format!("zeta = sqrt(mu^2 + g) must stay below pi (mu = {mu}, g = {g})")));
    }
    Ok(())
}

/// Reflection amplitude at reduced wavenumber mu for a square well of depth g.
pub fn reflection_at(params: &ModelParams, g: f64, mu: f64) -> Result<Complex64> {
    params.require_main()?;
    check_branch(g, mu)?;
    let w = params.omega;
    let z = (mu * mu + g).sqrt();
    let (sn, cs) = z.sin_cos();
    let c = z * cs - 0.5 * sn;
    let jy = bessel_jy(w, mu)?;
    let sj = mu * jy.jp * sn - jy.j * c;
    let sy = mu * jy.yp * sn - jy.y * c;
    let num = Complex64::new(sj, -sy);
    let den = Complex64::new(sj, sy);
    Ok(Complex64::i() * Complex64::from_polar(1.0, -w * PI) * num / den)
}

/// Reflection amplitude of a square-well regulator at wavenumber k.
pub fn reflection(params: &ModelParams, reg: &Regulator, k: f64) -> Result<ReflectionAmplitude> {
    if reg.kind != RegulatorKind::SquareWell {
        return Err(Error::domain("reflection is implemented for the square well"));
    }
    let mu = k * reg.b * params.x0;
    let r = reflection_at(params, reg.g, mu)?;
    Ok(ReflectionAmplitude { re: r.re, im: r.im, k, mu, g: reg.g })
}

/// Principal phase shift in (-pi/2, pi/2].
pub fn phase_shift_at(params: &ModelParams, g: f64, mu: f64) -> Result<PhaseShift> {
    let r = reflection_at(params, g, mu)?;
    Ok(PhaseShift { mu, g, delta: 0.5 * (-r).arg() })
}

pub fn phase_shift(params: &ModelParams, reg: &Regulator, k: f64) -> Result<PhaseShift> {
    let a = reflection(params, reg, k)?;
    Ok(PhaseShift { mu: a.mu, g: a.g, delta: 0.5 * (-a.r()).arg() })
}

/// Phase shifts along a mu sweep: principal value at the largest mu, then
/// continued by the smallest shift of pi between neighbours. A jump of more
/// than pi/4 between neighbours is reported as too coarse a grid.
pub fn phase_sweep(params: &ModelParams, g: f64, mus: &[f64]) -> Result<Vec<PhaseShift>> {
    let mut order: Vec<usize> = (0..mus.len()).collect();
    order.sort_by(|&a, &b| mus[b].total_cmp(&mus[a]));
    let mut out = vec![PhaseShift { mu: 0.0, g, delta: 0.0 }; mus.len()];
    let mut prev: Option<f64> = None;
    for i in order {
        let mut p = phase_shift_at(params, g, mus[i])?;
        if let Some(d0) = prev {
            p.delta += PI * ((d0 - p.delta) / PI).round();
            if (p.delta - d0).abs() > PI / 4.0 {
                return Err(Error::numerical("phase sweep step too coarse for branch tracking", (mus[i], d0, p.delta)));
            }
        }
        prev = Some(p.delta);
        out[i] = p;
    }
    Ok(out)
}

/// Small-mu expansion delta = c0 + a1 mu^{2w} + O(mu^{4w}):
/// c0 = (pi/4)(1 - 2w), a1 = -pi/(w (2^w Gamma(w))^2) (gamma - nu_+)/(gamma - nu_-).
pub fn phase_expansion(params: &ModelParams, g: f64) -> Result<(f64, f64)> {
    params.require_main()?;
    let w = params.omega;
    let gm = gamma_raw(g);
    let pre = PI / (w * (2f64.powf(w) * gamma_f(w)).powi(2));
    Ok((0.25 * PI * (1.0 - 2.0 * w), -pre * (gm - params.nu_plus) / (gm - params.nu_minus)))
}

/// dg/dmu along curves of constant reflection amplitude:
/// f = [-alpha zeta sin^2 zeta + g zeta cos^2 zeta - g sin zeta cos zeta] / [(mu/2)(zeta - sin zeta cos zeta)].
pub fn phase_field(params: &ModelParams, mu: f64, g: f64) -> f64 {
    mu_times_field(params, mu, g) / mu
}

/// mu f(mu, g), finite as mu -> 0.
fn mu_times_field(params: &ModelParams, mu: f64, g: f64) -> f64 {
    let z = (mu * mu + g).sqrt();
    let (s, c) = z.sin_cos();
    (-params.alpha * z * s * s + g * z * c * c - g * s * c) / (0.5 * (z - s * c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurve {
    /// (mu, g) in the order integrated.
    pub points: Vec<(f64, f64)>,
    /// The curve left the first cotangent branch before reaching mu1.
    pub exited_branch: bool,
}

/// Integrate dg/d ln mu = mu f(mu, g) from (mu0, g0) to mu1, reporting `n_out`
/// log-spaced points including both ends.
pub fn constant_phase_curve(params: &ModelParams, mu0: f64, g0: f64, mu1: f64, n_out: usize) -> Result<PhaseCurve> {
    params.require_main()?;
    check_branch(g0, mu0)?;
    if !(mu1 > 0.0) || n_out < 2 {
        return Err(Error::domain("curve needs mu1 > 0 and at least two output points"));
    }
    let (l0, l1) = (mu0.ln(), mu1.ln());
    let mut points = vec![(mu0, g0)];
    let mut g = g0;
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, max_steps: 200_000 };
    for i in 1..n_out {
        let a = l0 + (l1 - l0) * (i - 1) as f64 / (n_out - 1) as f64;
        let b = l0 + (l1 - l0) * i as f64 / (n_out - 1) as f64;
        let step = ode::integrate(|l, y: &[f64; 1]| [mu_times_field(params, l.exp(), y[0])], a, [g], b, opts);
        let next = match step {
            Ok(y) => y[0],
            Err(_) => return Ok(PhaseCurve { points, exited_branch: true }),
        };
        let mu = b.exp();
        if !(next > 0.0 && mu * mu + next < PI * PI) {
            return Ok(PhaseCurve { points, exited_branch: true });
        }
        g = next;
        points.push((mu, g));
    }
    Ok(PhaseCurve { points, exited_branch: false })
}

/// Pole of the amplitude continued to k = i s / (b x0): the zero of
/// (s K'_w(s)/K_w(s) + 1/2) sin zeta - zeta cos zeta with zeta = sqrt(g - s^2).
/// Returns the deepest pole's energy -s^2/(b x0)^2, or None without a pole.
pub fn reflection_pole(params: &ModelParams, reg: &Regulator) -> Result<Option<f64>> {
    params.require_main()?;
    if reg.kind != RegulatorKind::SquareWell {
        return Err(Error::domain("reflection pole is implemented for the square well"));
    }
    let g = reg.g;
    let w = params.omega;
    let f = |s: f64| -> f64 {
        let z = (g - s * s).max(0.0).sqrt();
        let (sn, cs) = z.sin_cos();
        match log_derivative_k(w, s) {
            Ok(l) => (l + 0.5) * sn - z * cs,
            Err(_) => f64::NAN,
        }
    };
    let top = g.sqrt() * (1.0 - 1e-12);
    let brackets = scan_brackets(f, 1e-12, top, 400, true);
    let Some(&(a, b)) = brackets.last() else {
        return Ok(None);
    };
    let s = brent(f, a, b, 1e-15)?;
    let w0 = reg.b * params.x0;
    Ok(Some(-s * s / (w0 * w0)))
}
