//! Gamma and Bessel functions of real order on the positive real axis.
//!
//! Bessel functions are evaluated with Temme's series for `x < 2` and
//! Steed's continued fractions for `x >= 2`, both anchored by the forward
//! continued fraction for the logarithmic derivative. Negative orders are
//! obtained from the reflection formulas, so every order is reduced to
//! `nu >= 0`. All routines are pure.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const FPMIN: f64 = f64::MIN_POSITIVE / f64::EPSILON;
const MAXIT: usize = 200_000;
const XMIN: f64 = 2.0;

/// Bessel order. Fractional orders only; integer orders are outside the
/// supported domain of the Y and K connection formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Order {
    pub nu: f64,
}

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(Error::domain(format!("non-finite Bessel order {nu}")));
        }
        Ok(Order { nu })
    }
}

impl From<f64> for Order {
    fn from(nu: f64) -> Self {
        Order { nu }
    }
}

/// A function value with an absolute error estimate (same units as the value).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionValue {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl FunctionValue {
    fn new(value: f64, scale: f64) -> Self {
        FunctionValue {
            value,
            abs_error_estimate: 8.0 * f64::EPSILON * scale.abs().max(value.abs()),
        }
    }
}

/// Complex function value with a componentwise error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue {
    pub value: Complex64,
    pub abs_error_estimate: f64,
}

/// Taylor coefficients of `1/Gamma(z) = sum c_k z^k`, k = 1..=28.
const RGAMMA_TAYLOR: [f64; 28] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `1/Gamma(1+x)` for `|x| <= 1/2` from its Taylor series.
fn rgamma1p_series(x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in RGAMMA_TAYLOR.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn gamma_raw(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_raw(1.0 - x));
    }
    if (x - 1.0).abs() <= 0.5 {
        return 1.0 / rgamma1p_series(x - 1.0);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// Gamma function on the real line, excluding the poles at nonpositive integers.
pub fn gamma(x: f64) -> Result<FunctionValue> {
    if !x.is_finite() || (x <= 0.0 && x == x.floor()) {
        return Err(Error::domain(format!("gamma pole or invalid argument at {x}")));
    }
    let v = gamma_raw(x);
    Ok(FunctionValue {
        value: v,
        abs_error_estimate: 1e-15 * v.abs() * (1.0 + x.abs()),
    })
}

/// Plain-value Gamma for internal use.
pub(crate) fn gamma_f(x: f64) -> f64 {
    gamma_raw(x)
}

/// Temme's auxiliary quantities `gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let m2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    // c_{2j+1} feed gam2, c_{2j+2} feed gam1.
    for j in (0..RGAMMA_TAYLOR.len() / 2).rev() {
        odd = odd * m2 + RGAMMA_TAYLOR[2 * j];
        even = even * m2 + RGAMMA_TAYLOR[2 * j + 1];
    }
    let gam1 = -even;
    let gam2 = odd;
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

/// J, Y and their derivatives for one order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselJY {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

/// I, K and their derivatives for one order, optionally exponentially scaled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselIK {
    pub i: f64,
    pub k: f64,
    pub ip: f64,
    pub kp: f64,
}

fn check_arg(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("Bessel argument must be positive, got {x}")));
    }
    Ok(())
}

/// J_nu, Y_nu and derivatives for nu >= 0, x > 0.
fn jy_nonneg(nu: f64, x: f64) -> Result<BesselJY> {
    let nl = if x < XMIN {
        (nu + 0.5) as usize
    } else {
        ((nu - x + 1.5).max(0.0)) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1 for J'_nu/J_nu.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical("bessel_jy: CF1 did not converge", x));
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessel_jy: Temme series did not converge", x));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // Steed's CF2 for p + iq.
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessel_jy: CF2 did not converge", x));
        }
        let gam = (p - f) / q;
        let mut rj = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            rj = -rj;
        }
        rjmu = rj;
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }
    let fact = rjmu / rjl;
    let j = rjl1 * fact;
    let jp = rjp1 * fact;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok(BesselJY {
        j,
        y: rymu,
        jp,
        yp: nu * xi * rymu - ry1,
    })
}

/// Exponentially scaled `I e^{-x}`, `K e^{x}` and derivatives for nu >= 0.
fn ik_nonneg_scaled(nu: f64, x: f64) -> Result<BesselIK> {
    let nl = (nu + 0.5) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::numerical("bessel_ik: CF1 did not converge", x));
    }
    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let ril1 = ril;
    let rip1 = ripl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    let f = ripl / ril;

    // rkmu, rk1 are K_mu e^x and K_{mu+1} e^x.
    let (mut rkmu, mut rk1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessel_ik: Temme series did not converge", x));
        }
        let ex = x.exp();
        rkmu = sum * ex;
        rk1 = sum1 * xi2 * ex;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut ok = false;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::numerical("bessel_ik: CF2 did not converge", x));
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    let rkmup = xmu * xi * rkmu - rk1;
    // Wronskian I K' - I' K = -1/x holds for the scaled pair as well once
    // the derivatives are the scaled derivatives of the unscaled functions.
    let rimu = xi / (f * rkmu - rkmup);
    let i_val = rimu * ril1 / ril;
    let ip = rimu * rip1 / ril;
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    Ok(BesselIK {
        i: i_val,
        k: rkmu,
        ip,
        kp: nu * xi * rkmu - rk1,
    })
}

/// J_nu, Y_nu, J'_nu, Y'_nu for any real order (reflection for nu < 0).
pub fn bessel_jy(nu: impl Into<Order>, x: f64) -> Result<BesselJY> {
    let nu = nu.into().nu;
    check_arg(x)?;
    if !nu.is_finite() {
        return Err(Error::domain("non-finite Bessel order"));
    }
    if nu >= 0.0 {
        return jy_nonneg(nu, x);
    }
    let mu = -nu;
    let p = jy_nonneg(mu, x)?;
    let (s, c) = (mu * PI).sin_cos();
    Ok(BesselJY {
        j: c * p.j - s * p.y,
        y: s * p.j + c * p.y,
        jp: c * p.jp - s * p.yp,
        yp: s * p.jp + c * p.yp,
    })
}

/// Exponentially scaled I e^{-x}, K e^{x} and their scaled derivatives.
pub fn bessel_ik_scaled(nu: impl Into<Order>, x: f64) -> Result<BesselIK> {
    let nu = nu.into().nu;
    check_arg(x)?;
    if !nu.is_finite() {
        return Err(Error::domain("non-finite Bessel order"));
    }
    if nu >= 0.0 {
        return ik_nonneg_scaled(nu, x);
    }
    let mu = -nu;
    let p = ik_nonneg_scaled(mu, x)?;
    // I_{-mu} = I_mu + (2/pi) sin(mu pi) K_mu; K_{-mu} = K_mu.
    let s = 2.0 / PI * (mu * PI).sin() * (-2.0 * x).exp();
    Ok(BesselIK {
        i: p.i + s * p.k,
        k: p.k,
        ip: p.ip + s * p.kp,
        kp: p.kp,
    })
}

/// Unscaled I_nu, K_nu and derivatives.
pub fn bessel_ik(nu: impl Into<Order>, x: f64) -> Result<BesselIK> {
    let s = bessel_ik_scaled(nu, x)?;
    let (ex, emx) = (x.exp(), (-x).exp());
    Ok(BesselIK {
        i: s.i * ex,
        k: s.k * emx,
        ip: s.ip * ex,
        kp: s.kp * emx,
    })
}

pub fn bessel_j(nu: impl Into<Order>, x: f64) -> Result<FunctionValue> {
    let p = bessel_jy(nu, x)?;
    Ok(FunctionValue::new(p.j, p.j.abs() + 1e-2 * p.y.abs().min(1.0)))
}

pub fn bessel_y(nu: impl Into<Order>, x: f64) -> Result<FunctionValue> {
    let nu = nu.into();
    if nu.nu == nu.nu.round() {
        return Err(Error::domain("bessel_y: integer order is not supported"));
    }
    let p = bessel_jy(nu, x)?;
    Ok(FunctionValue::new(p.y, p.y.abs() + 1e-2 * p.j.abs()))
}

pub fn bessel_i(nu: impl Into<Order>, x: f64) -> Result<FunctionValue> {
    let p = bessel_ik(nu, x)?;
    Ok(FunctionValue::new(p.i, p.i))
}

pub fn bessel_k(nu: impl Into<Order>, x: f64) -> Result<FunctionValue> {
    let p = bessel_ik(nu, x)?;
    Ok(FunctionValue::new(p.k, p.k))
}

/// Hankel function H^(1) (kind = 1) or H^(2) (kind = 2): J ± iY.
pub fn hankel(nu: impl Into<Order>, kind: u8, x: f64) -> Result<ComplexValue> {
    let p = bessel_jy(nu, x)?;
    let sgn = match kind {
        1 => 1.0,
        2 => -1.0,
        _ => return Err(Error::domain(format!("Hankel kind must be 1 or 2, got {kind}"))),
    };
    Ok(ComplexValue {
        value: Complex64::new(p.j, sgn * p.y),
        abs_error_estimate: 8.0 * f64::EPSILON * (p.j.abs() + p.y.abs()),
    })
}

/// `x K'_nu(x) / K_nu(x)`, free of overflow at small and large x.
pub fn log_derivative_k(nu: f64, x: f64) -> Result<f64> {
    let p = bessel_ik_scaled(nu, x)?;
    Ok(x * p.kp / p.k)
}
