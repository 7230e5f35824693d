//! Bound and continuum eigenstates of the regulated Hamiltonian.
//!
//! Inside the regulator we work in s = x / (b x0), where the interior
//! equation reads phi'' + (g f(s) - xi^2 sigma) phi = 0 with xi = b x0 |E|^{1/2}
//! and sigma = -1 (bound) or +1 (continuum). Outside, the solutions are
//! sqrt(kx) K_omega(kx) and sqrt(kx) J_{±omega}(kx).

use crate::error::{Error, Result};
use crate::model::{fixed_points, gamma_raw, ModelParams, Profile, Regulator, RegulatorKind};
use crate::numerics::fit::linear_lstsq;
use crate::numerics::ode::{self, OdeOptions};
use crate::numerics::quad::{integrate, integrate_with_breaks, QuadOptions};
use crate::numerics::roots::{brent, scan_brackets};
use crate::specfun::{bessel_ik_scaled, bessel_jy, gamma_f, log_derivative_k};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Ground state with normalized amplitudes: psi = A phi(x / (b x0)) inside,
/// with phi(0) = 0 and phi'(0) = 1, and C sqrt(kappa x) K_omega(kappa x) outside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub energy: f64,
    pub xi: f64,
    pub amp_inner: f64,
    pub amp_outer: f64,
    /// Integral of |psi|^2 before normalization (with A = 1).
    pub norm: f64,
}

/// Continuum state at energy E. `n` and `d` are the pole-free numerator and
/// denominator of C+/C-, both multiplied by sin sqrt(g + xi^2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumState {
    pub energy: f64,
    pub xi: f64,
    pub ratio_cpcm: f64,
    pub ratio_cma: f64,
    pub ratio_cpa: f64,
    /// A^2 = B / (pi sqrt(E)).
    pub b_norm: f64,
    pub n: f64,
    pub d: f64,
    /// C- vanishes: the exterior solution is pure J_omega and the ratio is infinite.
    pub pure_j_omega: bool,
}

/// Result of an exponent fit of the binding energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalFit {
    pub exponent: f64,
    /// Amplitude of xi^2 = (b x0)^2 |E| in units of (g - g_*)^exponent.
    pub amplitude: f64,
    pub g_star: f64,
    /// RMS residual of log xi^2.
    pub residual: f64,
}

/// phi and integrals at s = 1 for the interior problem.
#[derive(Clone, Copy, Debug)]
struct Interior {
    phi: f64,
    dphi: f64,
    int_phi2: f64,
    int_s_phi2: f64,
}

const ODE_TOL: OdeOptions = OdeOptions { rtol: 1e-12, atol: 1e-14, max_steps: 200_000 };

/// Interior solution from s = 0 to 1 with phi(0) = 0, phi'(0) = 1 at
/// eigenvalue term `lam` (phi'' + (g f - lam) phi = 0).
fn interior(reg: &Regulator, lam: f64) -> Result<Interior> {
    if reg.kind == RegulatorKind::SquareWell {
        let q2 = reg.g - lam;
        if q2.abs() < 1e-6 {
            // Two-term expansion in q2 avoids 0/0.
            return Ok(Interior {
                phi: 1.0 - q2 / 6.0,
                dphi: 1.0 - q2 / 2.0,
                int_phi2: 1.0 / 3.0 - q2 / 15.0,
                int_s_phi2: 0.25 - q2 / 18.0,
            });
        }
        if q2 > 0.0 {
            let q = q2.sqrt();
            let (s, c) = q.sin_cos();
            let (s2, c2) = (2.0 * q).sin_cos();
            return Ok(Interior {
                phi: s / q,
                dphi: c,
                int_phi2: (0.5 - s2 / (4.0 * q)) / q2,
                int_s_phi2: (0.25 - s2 / (4.0 * q) - (c2 - 1.0) / (8.0 * q2)) / q2,
            });
        }
        let p = (-q2).sqrt();
        let (s, c) = (p.sinh(), p.cosh());
        let (s2, c2) = ((2.0 * p).sinh(), (2.0 * p).cosh());
        return Ok(Interior {
            phi: s / p,
            dphi: c,
            int_phi2: (s2 / (4.0 * p) - 0.5) / (-q2),
            int_s_phi2: (s2 / (4.0 * p) - (c2 - 1.0) / (8.0 * p * p) - 0.25) / (-q2),
        });
    }
    let y = ode::integrate(
        |s, y: &[f64; 4]| {
            let k = reg.g * reg.shape(s) - lam;
            [y[1], -k * y[0], y[0] * y[0], s * y[0] * y[0]]
        },
        0.0,
        [0.0, 1.0, 0.0, 0.0],
        1.0,
        ODE_TOL,
    )?;
    Ok(Interior { phi: y[0], dphi: y[1], int_phi2: y[2], int_s_phi2: y[3] })
}

/// Second interior solution with phi2(1) = 1, phi2'(1) = 0, integrated back
/// to s = 0. Returns (phi2(0), phi2'(0)).
pub fn interior_second(reg: &Regulator, eps: f64) -> Result<(f64, f64)> {
    let y = ode::integrate(
        |s, y: &[f64; 2]| [y[1], -(reg.g * reg.shape(s) - eps) * y[0]],
        1.0,
        [1.0, 0.0],
        0.0,
        ODE_TOL,
    )?;
    Ok((y[0], y[1]))
}

/// Left side L(g, eps) of the matching condition for a general regulator,
/// built from both interior solutions.
pub fn matching_lhs(reg: &Regulator, eps: f64) -> Result<f64> {
    let p1 = interior(reg, eps)?;
    let (phi1_0, phi2_1, dphi2_1) = (0.0, 1.0, 0.0);
    let (phi2_0, _) = interior_second(reg, eps)?;
    let num = p1.dphi * phi2_0 - phi1_0 * dphi2_1;
    let den = p1.phi * phi2_0 - phi1_0 * phi2_1;
    Ok(num / den)
}

/// Right side R(eps) = 1/2 + sqrt(eps) K'_omega / K_omega at xi = sqrt(eps).
pub fn matching_rhs(params: &ModelParams, xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Ok(params.nu_minus);
    }
    Ok(0.5 + log_derivative_k(params.omega, xi)?)
}

/// phi'(1) - nu_- phi(1) at zero energy; negative exactly when a bound state exists.
fn threshold_function(reg: &Regulator, params: &ModelParams) -> Result<(f64, Interior)> {
    let p = interior(reg, 0.0)?;
    Ok((p.dphi - params.nu_minus * p.phi, p))
}

fn check_main(params: &ModelParams) -> Result<()> {
    params.require_main()
}

/// Ground state of the regulated problem, or None when the well does not bind.
pub fn bound_state(params: &ModelParams, reg: &Regulator) -> Result<Option<BoundState>> {
    check_main(params)?;
    reg.validate()?;
    let (h0, p0) = threshold_function(reg, params)?;
    // Below this margin the root sits at xi^{2 omega} ~ 1e-13, i.e. at threshold.
    if h0 >= -1e-13 * p0.phi.abs().max(p0.dphi.abs()) {
        return Ok(None);
    }
    let w = params.x0 * reg.b;
    let fmax = match reg.kind {
        RegulatorKind::SquareWell | RegulatorKind::LinearWell => 1.0,
        RegulatorKind::Generic => reg.profile.as_ref().map_or(1.0, Profile::max),
    };
    let top = (reg.g * fmax).sqrt() * (1.0 - 1e-12);
    let h = |xi: f64| -> f64 {
        let Ok(p) = interior(reg, xi * xi) else { return f64::NAN };
        let Ok(r) = matching_rhs(params, xi) else { return f64::NAN };
        p.dphi - r * p.phi
    };
    // Lower scan limit: where the small-xi correction to R is far below |h0|.
    let om = params.omega;
    let c1 = 2.0 * gamma_f(1.0 - om) / gamma_f(om) * p0.phi.abs().max(1e-300);
    let xi_lo = 2.0 * (h0.abs() / (100.0 * c1)).powf(1.0 / (2.0 * om));
    let xi_lo = xi_lo.min(1e-3 * top).max(1e-300);
    let ln_h = |l: f64| h(l.exp());
    let brackets = scan_brackets(ln_h, top.ln(), xi_lo.ln(), 240, false);
    let Some(&(a, b)) = brackets.first() else {
        return Err(Error::numerical("bound_state: no sign change found", (xi_lo, top, h0)));
    };
    let lxi = brent(ln_h, a, b, 1e-14)?;
    let xi = lxi.exp();
    if !(h(xi).abs() < 1e-8 * (1.0 + h(top).abs())) {
        return Err(Error::numerical("bound_state: bracket straddles a pole", (a.exp(), b.exp())));
    }
    Ok(Some(assemble_bound(params, reg, xi, w)?))
}

fn assemble_bound(params: &ModelParams, reg: &Regulator, xi: f64, w: f64) -> Result<BoundState> {
    let p = interior(reg, xi * xi)?;
    let om = params.omega;
    let k = bessel_ik_scaled(om, xi)?;
    // Match phi(1) = C sqrt(xi) K(xi); work with scaled K so C carries e^{xi}.
    let c_scaled = p.phi / (xi.sqrt() * k.k);
    // int_xi^inf t K^2 dt = (xi^2/2)(K_{w-1} K_{w+1} - K_w^2); orders via recurrence.
    let km1 = bessel_ik_scaled(om - 1.0, xi)?.k;
    let kp1 = bessel_ik_scaled(om + 1.0, xi)?.k;
    let tail = 0.5 * xi * xi * (km1 * kp1 - k.k * k.k);
    let norm = w * p.int_phi2 + c_scaled * c_scaled * tail * w / xi;
    let a = 1.0 / norm.sqrt();
    let kappa = xi / w;
    Ok(BoundState {
        energy: -kappa * kappa,
        xi,
        amp_inner: a,
        amp_outer: a * c_scaled * xi.exp(),
        norm,
    })
}

impl BoundState {
    /// Normalized wavefunction and derivative at x.
    pub fn psi(&self, params: &ModelParams, reg: &Regulator, x: f64) -> Result<(f64, f64)> {
        let w = params.x0 * reg.b;
        let kappa = self.xi / w;
        if x < w {
            if reg.kind != RegulatorKind::SquareWell {
                let y = ode::integrate(
                    |s, y: &[f64; 2]| [y[1], -(reg.g * reg.shape(s) - self.xi * self.xi) * y[0]],
                    0.0,
                    [0.0, 1.0],
                    x / w,
                    ODE_TOL,
                )?;
                return Ok((self.amp_inner * y[0], self.amp_inner * y[1] / w));
            }
            let q2 = reg.g - self.xi * self.xi;
            let q = q2.abs().sqrt();
            let s = x / w;
            let (f, df) = if q2 > 1e-12 {
                ((q * s).sin() / q, (q * s).cos())
            } else if q2 < -1e-12 {
                ((q * s).sinh() / q, (q * s).cosh())
            } else {
                (s, 1.0)
            };
            return Ok((self.amp_inner * f, self.amp_inner * df / w));
        }
        let z = kappa * x;
        let k = bessel_ik_scaled(params.omega, z)?;
        let c = self.amp_outer * (-z).exp();
        let v = c * z.sqrt() * k.k;
        let dv = c * kappa * (0.5 / z.sqrt() * k.k + z.sqrt() * k.kp);
        Ok((v, dv))
    }

    /// Relative mismatch of psi and psi' across x = b x0 (the larger of the two).
    pub fn matching_residual(&self, params: &ModelParams, reg: &Regulator) -> Result<f64> {
        let w = params.x0 * reg.b;
        let p = interior(reg, self.xi * self.xi)?;
        let (vi, di) = (self.amp_inner * p.phi, self.amp_inner * p.dphi / w);
        let (vo, dout) = self.psi(params, reg, w)?;
        let rv = (vi - vo).abs() / vi.abs().max(vo.abs());
        let rd = (di - dout).abs() / di.abs().max(dout.abs()).max(vi.abs() / w);
        Ok(rv.max(rd))
    }
}

/// Closed-form amplitude C of |E| (b x0)^2 ~ C (g - g_-)^{1/omega} for the square well.
pub fn binding_constant(params: &ModelParams) -> Result<f64> {
    check_main(params)?;
    let (_, gm) = fixed_points(params)?;
    let om = params.omega;
    let base = 2f64.powf(2.0 * om - 2.0) * (1.0 + params.alpha / gm) * gamma_f(om) / gamma_f(1.0 - om);
    Ok(base.powf(1.0 / om))
}

/// Exact continuum coefficients for the square well at energy E > 0.
pub fn continuum_coefficients(params: &ModelParams, reg: &Regulator, energy: f64) -> Result<ContinuumState> {
    check_main(params)?;
    if reg.kind != RegulatorKind::SquareWell {
        return Err(Error::domain("continuum coefficients are implemented for the square well"));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::domain(format!("continuum energy must be positive, got {energy}")));
    }
    if !(reg.g < PI * PI) {
        return Err(Error::domain("g outside the first branch"));
    }
    let xi = params.x0 * reg.b * energy.sqrt();
    let mut st = coefficients_at_xi(params, reg.g, xi)?;
    st.energy = energy;
    Ok(st)
}

/// Continuum coefficients as a function of (g, xi) only.
pub fn coefficients_at_xi(params: &ModelParams, g: f64, xi: f64) -> Result<ContinuumState> {
    let (n, d) = pole_free_nd(params, g, xi)?;
    let om = params.omega;
    let sw = (om * PI).sin();
    let q = n * n + d * d + 2.0 * n * d * (om * PI).cos();
    let pure = d == 0.0;
    let ratio = if pure { f64::INFINITY.copysign(n) } else { n / d };
    let pref = PI / (2.0 * sw * xi.sqrt());
    Ok(ContinuumState {
        energy: f64::NAN,
        xi,
        ratio_cpcm: ratio,
        ratio_cma: pref * d,
        ratio_cpa: pref * n,
        b_norm: 2.0 * sw * sw / PI * xi / q,
        n,
        d,
        pure_j_omega: pure,
    })
}

/// (N', D') such that C+/C- = N'/D' and C-/A = pi D' / (2 sin(omega pi) sqrt(xi)).
pub fn pole_free_nd(params: &ModelParams, g: f64, xi: f64) -> Result<(f64, f64)> {
    let z = (g + xi * xi).sqrt();
    let (s, co) = z.sin_cos();
    let c = z * co - 0.5 * s;
    let jp = bessel_jy(params.omega, xi)?;
    let jm = bessel_jy(-params.omega, xi)?;
    Ok((-xi * jm.jp * s + jm.j * c, xi * jp.jp * s - jp.j * c))
}

/// Small-xi asymptote of C+/C-.
pub fn ratio_small_xi(params: &ModelParams, g: f64, xi: f64) -> f64 {
    let om = params.omega;
    let gm = gamma_raw(g);
    -(2f64.powf(2.0 * om)) * gamma_f(1.0 + om) / gamma_f(1.0 - om) * xi.powf(-2.0 * om) * (gm - params.nu_minus)
        / (gm - params.nu_plus)
}

/// Mean position of the ground state by quadrature of the normalized density.
pub fn mean_position(params: &ModelParams, reg: &Regulator, g: f64) -> Result<f64> {
    let reg = reg.with_g(g);
    let st = bound_state(params, &reg)?.ok_or_else(|| Error::NoBoundState(format!("g = {g}")))?;
    let w = params.x0 * reg.b;
    let xi = st.xi;
    let p = interior(&reg, xi * xi)?;
    let om = params.omega;
    let k = bessel_ik_scaled(om, xi)?;
    let c = p.phi / (xi.sqrt() * k.k);
    // Exterior moments in t = kappa x, with scaled K: t^m K^2 e^{2 xi} on [xi, inf).
    let moment = |m: i32| -> Result<f64> {
        let f = |t: f64| {
            let kk = bessel_ik_scaled(om, t).map(|v| v.k).unwrap_or(f64::NAN);
            t.powi(m) * kk * kk * (-2.0 * (t - xi)).exp()
        };
        let top = xi + 60.0;
        let mut br: Vec<f64> = Vec::new();
        let mut v = 10.0 * xi;
        while v < 1.0 {
            br.push(v);
            v *= 10.0;
        }
        br.extend([1.0, 3.0, 10.0].iter().map(|&u| u + xi));
        Ok(integrate_with_breaks(f, xi, top, &br, QuadOptions::rel(1e-11))?.value)
    };
    let m1 = moment(1)?;
    let m2 = moment(2)?;
    let num = w * w * p.int_s_phi2 + c * c * m2 * w * w / (xi * xi);
    let den = w * p.int_phi2 + c * c * m1 * w / xi;
    Ok(num / den)
}

/// Exact ratio <x> kappa in the limit xi -> 0 (exterior-dominated moments).
pub fn mean_position_limit_ratio(params: &ModelParams) -> f64 {
    let om = params.omega;
    PI / 4.0 * gamma_f(1.5 + om) * gamma_f(1.5 - om) / (gamma_f(1.0 + om) * gamma_f(1.0 - om))
}

/// Critical coupling g_* where a zero-energy bound state appears: L(g_*, 0) = nu_-.
pub fn critical_coupling(params: &ModelParams, reg: &Regulator) -> Result<f64> {
    check_main(params)?;
    if reg.kind == RegulatorKind::SquareWell {
        return Ok(fixed_points(params)?.1);
    }
    let f = |g: f64| threshold_function(&reg.with_g(g), params).map(|v| v.0).unwrap_or(f64::NAN);
    // Grow the bracket until binding sets in.
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 1.5;
        if hi > 1e4 {
            return Err(Error::numerical("critical_coupling: profile does not bind in scanned range", hi));
        }
    }
    let mut lo = hi / 1.5;
    while f(lo) < 0.0 && lo > 1e-8 {
        lo /= 1.5;
    }
    brent(f, lo, hi, 1e-14)
}

/// Fit xi^2 = A dg^s e^{c dg} in log space; the linear correction absorbs the
/// leading analytic deviation from pure scaling over the fit window.
pub fn fit_critical(g_star: f64, dgs: &[f64], xi2: &[f64]) -> Result<CriticalFit> {
    let rows: Vec<Vec<f64>> = dgs.iter().map(|&d| vec![1.0, d.ln(), d]).collect();
    let y: Vec<f64> = xi2.iter().map(|v| v.ln()).collect();
    let (c, rms) = linear_lstsq(&rows, &y)?;
    Ok(CriticalFit { exponent: c[1], amplitude: c[0].exp(), g_star, residual: rms })
}

/// Plain two-parameter log-log fit, reported alongside the corrected fit.
pub fn fit_critical_plain(g_star: f64, dgs: &[f64], xi2: &[f64]) -> Result<CriticalFit> {
    let rows: Vec<Vec<f64>> = dgs.iter().map(|&d| vec![1.0, d.ln()]).collect();
    let y: Vec<f64> = xi2.iter().map(|v| v.ln()).collect();
    let (c, rms) = linear_lstsq(&rows, &y)?;
    Ok(CriticalFit { exponent: c[1], amplitude: c[0].exp(), g_star, residual: rms })
}

/// Log-spaced reduced couplings on [lo, hi].
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Binding energies xi^2 at g_* + dg for each dg.
pub fn binding_series(params: &ModelParams, reg: &Regulator, g_star: f64, dgs: &[f64]) -> Result<Vec<f64>> {
    dgs.iter()
        .map(|&d| {
            let st = bound_state(params, &reg.with_g(g_star + d))?
                .ok_or_else(|| Error::NoBoundState(format!("g = g_* + {d}")))?;
            Ok(st.xi * st.xi)
        })
        .collect()
}

/// Locate g_* and fit the exponent of the binding energy over dg in [1e-4, 1e-2].
pub fn generic_bound_threshold(params: &ModelParams, reg: &Regulator) -> Result<CriticalFit> {
    let g_star = critical_coupling(params, reg)?;
    let dgs = log_grid(1e-4, 1e-2, 20);
    let xi2 = binding_series(params, reg, g_star, &dgs)?;
    fit_critical(g_star, &dgs, &xi2)
}

/// Variational binding bound (trial psi = x e^{-x/2}) and the comparison
/// no-binding bound g_- / max f. Units with b x0 = 1.
pub fn existence_bounds(params: &ModelParams, profile: &Profile) -> Result<(f64, f64)> {
    check_main(params)?;
    let overlap = integrate(|x: f64| profile.eval(x) * x * x * (-x).exp(), 0.0, 1.0, QuadOptions::rel(1e-13))?.value;
    if overlap <= 0.0 {
        return Err(Error::domain("profile overlap with the trial state is not positive"));
    }
    let upper = (0.5 + params.alpha / std::f64::consts::E) / overlap;
    let fmax = profile.max();
    if fmax <= 0.0 {
        return Err(Error::domain("profile must be positive somewhere"));
    }
    let (_, gm) = fixed_points(params)?;
    Ok((upper, gm / fmax))
}
