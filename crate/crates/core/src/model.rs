//! Model parameters, the coupling transform gamma(g), fixed points and the
//! short-distance regulators.

use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which side of alpha = -1/4 the model lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// -1/4 < alpha < 0: real omega in (0, 1/2).
    #[default]
    Main,
    /// alpha < -1/4: omega is imaginary; `omega` stores |omega|.
    LimitCycle,
}

/// Coupling alpha and its derived constants. In limit-cycle mode `omega`
/// holds |omega| and `nu_plus`, `nu_minus` are the real part 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelParamsSpec")]
pub struct ModelParams {
    pub alpha: f64,
    pub omega: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub x0: f64,
    pub mode: Mode,
}

/// Wire format: derived fields are optional and, when present, must agree
/// with alpha.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelParamsSpec {
    alpha: f64,
    #[serde(default)]
    omega: Option<f64>,
    #[serde(default)]
    nu_plus: Option<f64>,
    #[serde(default)]
    nu_minus: Option<f64>,
    #[serde(default)]
    x0: Option<f64>,
    #[serde(default)]
    mode: Option<Mode>,
}

impl TryFrom<ModelParamsSpec> for ModelParams {
    type Error = Error;

    fn try_from(s: ModelParamsSpec) -> Result<Self> {
        let p = derived_constants(s.alpha)?.with_x0(s.x0.unwrap_or(1.0))?;
        if let Some(m) = s.mode {
            if m != p.mode {
                return Err(Error::domain(format!("mode {m:?} inconsistent with alpha = {}", s.alpha)));
            }
        }
        for (name, given, want) in [
            ("omega", s.omega, p.omega),
            ("nu_plus", s.nu_plus, p.nu_plus),
            ("nu_minus", s.nu_minus, p.nu_minus),
        ] {
            if let Some(v) = given {
                if (v - want).abs() > 1e-12 * want.abs().max(1.0) {
                    return Err(Error::domain(format!("{name} = {v} inconsistent with alpha (expected {want})")));
                }
            }
        }
        Ok(p)
    }
}

impl ModelParams {
    pub fn with_x0(mut self, x0: f64) -> Result<Self> {
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(Error::domain(format!("x0 must be positive, got {x0}")));
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn require_main(&self) -> Result<()> {
        if self.mode != Mode::Main {
            return Err(Error::domain("operation requires -1/4 < alpha < 0"));
        }
        Ok(())
    }

    /// Fixed-point couplings (g_plus, g_minus).
    pub fn fixed_points(&self) -> Result<(f64, f64)> {
        fixed_points(self)
    }
}

/// omega, nu_plus and nu_minus from alpha.
pub fn derived_constants(alpha: f64) -> Result<ModelParams> {
    if !alpha.is_finite() || alpha >= 0.0 {
        return Err(Error::domain(format!("alpha must be negative, got {alpha}")));
    }
    let d = 0.25 + alpha;
    if d == 0.0 {
        return Err(Error::domain("alpha = -1/4 gives degenerate orders"));
    }
    let (omega, mode) = if d > 0.0 { (d.sqrt(), Mode::Main) } else { ((-d).sqrt(), Mode::LimitCycle) };
    let (nu_plus, nu_minus) = match mode {
        Mode::Main => (0.5 + omega, 0.5 - omega),
        Mode::LimitCycle => (0.5, 0.5),
    };
    Ok(ModelParams { alpha, omega, nu_plus, nu_minus, x0: 1.0, mode })
}

/// gamma = sqrt(g) cot sqrt(g) on the first branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaCoupling {
    pub gamma: f64,
}

/// First-branch coupling transform; `g = 0` gives the limit 1.
pub fn gamma_of_g(g: f64) -> Result<GammaCoupling> {
    if !(0.0..PI * PI).contains(&g) {
        return Err(Error::domain(format!("g = {g} outside the first branch (0, pi^2)")));
    }
    Ok(GammaCoupling { gamma: gamma_raw(g) })
}

pub(crate) fn gamma_raw(g: f64) -> f64 {
    if g < 1e-6 {
        return 1.0 - g / 3.0;
    }
    let s = g.sqrt();
    s / s.tan()
}

/// Inverse of gamma_of_g on the first branch.
pub fn g_of_gamma(gamma: f64) -> Result<f64> {
    if gamma >= 1.0 {
        return Err(Error::domain(format!("gamma = {gamma} has no first-branch preimage")));
    }
    // sqrt(g) in (0, pi); gamma decreasing from 1 to -inf.
    let s = brent(|s: f64| if s == 0.0 { 1.0 - gamma } else { s / s.tan() - gamma }, 0.0, PI * (1.0 - 1e-15), 1e-15)?;
    Ok(s * s)
}

/// Roots of sqrt(g) cot sqrt(g) = nu_plus and = nu_minus on (0, pi^2).
pub fn fixed_points(params: &ModelParams) -> Result<(f64, f64)> {
    params.require_main()?;
    Ok((g_of_gamma(params.nu_plus)?, g_of_gamma(params.nu_minus)?))
}

/// Monotone cubic (Fritsch–Carlson) interpolant of a tabulated profile on [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileSpec")]
pub struct Profile {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSpec {
    x: Vec<f64>,
    f: Vec<f64>,
}

impl TryFrom<ProfileSpec> for Profile {
    type Error = Error;
    fn try_from(s: ProfileSpec) -> Result<Self> {
        Profile::new(s.x, s.f)
    }
}

impl Profile {
    pub fn new(x: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if x.len() != f.len() || x.len() < 2 {
            return Err(Error::domain("profile needs at least two (x, f) samples of equal length"));
        }
        if x[0] != 0.0 || *x.last().unwrap() != 1.0 {
            return Err(Error::domain("profile grid must span exactly [0, 1]"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("profile grid must be strictly increasing"));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("profile must be bounded (finite samples)"));
        }
        let slopes = pchip_slopes(&x, &f);
        Ok(Profile { x, f, slopes })
    }

    /// Sample `f` on a uniform grid of `n + 1` points.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let x: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let v = x.iter().map(|&t| f(t)).collect();
        Profile::new(x, v)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            k => (k - 1).min(self.x.len() - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1) = (self.f[i], self.f[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1
    }

    pub fn max(&self) -> f64 {
        self.f.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    if n == 2 {
        return vec![del[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if del[i - 1] * del[i] > 0.0 {
            let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
            let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let v = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if v.signum() != d0.signum() {
            0.0
        } else if d0.signum() != d1.signum() && v.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            v
        }
    };
    d[0] = end(x[1] - x[0], x[2] - x[1], del[0], del[1]);
    d[n - 1] = end(x[n - 1] - x[n - 2], x[n - 2] - x[n - 3], del[n - 2], del[n - 3]);
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulatorKind {
    SquareWell,
    LinearWell,
    Generic,
}

/// Short-distance modification of alpha/x^2 inside `x < b x0`:
/// V = -g f(x / (b x0)) / (b x0)^2 with f = 1 (square), f(s) = s (linear)
/// or a tabulated profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegulatorSpec")]
pub struct Regulator {
    pub kind: RegulatorKind,
    pub b: f64,
    pub g: f64,
    pub profile: Option<Profile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegulatorSpec {
    kind: RegulatorKind,
    #[serde(default)]
    b: Option<f64>,
    g: f64,
    #[serde(default)]
    profile: Option<Profile>,
}

impl TryFrom<RegulatorSpec> for Regulator {
    type Error = Error;
    fn try_from(s: RegulatorSpec) -> Result<Self> {
        let r = Regulator { kind: s.kind, b: s.b.unwrap_or(1.0), g: s.g, profile: s.profile };
        r.validate()?;
        Ok(r)
    }
}

impl Regulator {
    pub fn square_well(b: f64, g: f64) -> Result<Self> {
        let r = Regulator { kind: RegulatorKind::SquareWell, b, g, profile: None };
        r.validate()?;
        Ok(r)
    }

    pub fn linear_well(g: f64) -> Result<Self> {
        let r = Regulator { kind: RegulatorKind::LinearWell, b: 1.0, g, profile: None };
        r.validate()?;
        Ok(r)
    }

    pub fn generic(b: f64, g: f64, profile: Profile) -> Result<Self> {
        let r = Regulator { kind: RegulatorKind::Generic, b, g, profile: Some(profile) };
        r.validate()?;
        Ok(r)
    }

    pub fn with_g(&self, g: f64) -> Self {
        Regulator { g, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::domain(format!("regulator width b must be positive, got {}", self.b)));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return Err(Error::domain(format!("regulator depth g must be nonnegative, got {}", self.g)));
        }
        match (self.kind, &self.profile) {
            (RegulatorKind::Generic, None) => Err(Error::domain("generic regulator needs a profile")),
            (RegulatorKind::SquareWell | RegulatorKind::LinearWell, Some(_)) => {
                Err(Error::domain("profile is only accepted for the generic regulator"))
            }
            (RegulatorKind::LinearWell, _) if self.b != 1.0 => Err(Error::domain("linear well has b fixed to 1")),
            _ => Ok(()),
        }
    }

    /// Shape function f on [0, 1].
    pub fn shape(&self, s: f64) -> f64 {
        match self.kind {
            RegulatorKind::SquareWell => 1.0,
            RegulatorKind::LinearWell => s,
            RegulatorKind::Generic => self.profile.as_ref().map_or(0.0, |p| p.eval(s)),
        }
    }

    /// Full potential at x > 0.
    pub fn potential(&self, params: &ModelParams, x: f64) -> f64 {
        let w = self.b * params.x0;
        if x < w {
            -self.g * self.shape(x / w) / (w * w)
        } else {
            params.alpha / (x * x)
        }
    }
}
