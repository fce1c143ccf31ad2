//! Arbitrary-precision real and complex arithmetic kernel.
//!
//! Every analytic stage of the pipeline (L-series evaluation, theta
//! constants, Newton refinement) runs on top of the two types exported
//! here: [`BigReal`] (an alias for `rug::Float`, i.e. MPFR) and
//! [`BigComplex`], a rectangular complex number built from two
//! `BigReal`s.  Precision is explicit everywhere: values carry their
//! precision in bits, operations between mixed precisions round into
//! the *minimum* of the operand precisions, and nothing widens
//! silently.
//!
//! Besides arithmetic, the crate provides the two transcendental
//! kernels the pipeline needs and nothing more: `exp_pi_i` (the theta
//! exponential `e^{pi i q}`) and the modified Bessel functions
//! `K_0`, `K_1` (the inverse Mellin kernel attached to a degree-8
//! gamma factor `Gamma_C(s)^2`; see DLMF 10.31 and 10.40 for the
//! expansions used).

use rug::float::Constant;
use rug::ops::CompleteRound;
use rug::Float;
use thiserror::Error;

/// Arbitrary-precision real number (MPFR float).
pub type BigReal = Float;

/// Guard bits used internally by compound operations so that the
/// documented relative-error bounds hold after the final rounding.
pub const GUARD: u32 = 32;

/// Default working precision in bits (~120 decimal digits), chosen to
/// exceed the 80-85 digits the period computations are quoted at.
pub const DEFAULT_PREC: u32 = 400;

/// Crossover abscissa between the ascending series and the asymptotic
/// expansion for the Bessel kernels.  Below this the series is always
/// used; above it the asymptotic expansion is tried first and the
/// series (with cancellation guard bits) is the fallback when the
/// asymptotic tail cannot reach the requested precision.
pub const BESSEL_CROSSOVER: f64 = 20.0;

#[derive(Debug, Error)]
pub enum BigcxError {
    #[error("nonpositive input {0} to a kernel defined on (0, infinity)")]
    NonPositive(String),
    #[error("exponent overflow in {0}")]
    Overflow(String),
    #[error("nonfinite input to {0}")]
    NonFinite(String),
}

/// pi at `prec` bits.
pub fn pi(prec: u32) -> BigReal {
    Float::with_val(prec, Constant::Pi)
}

/// Euler's constant gamma at `prec` bits.
pub fn euler_gamma(prec: u32) -> BigReal {
    Float::with_val(prec, Constant::Euler)
}

/// 2^e at `prec` bits (positive or negative exponent).
pub fn pow2(e: i32, prec: u32) -> BigReal {
    Float::with_val(prec, Float::i_exp(1, e))
}

/// Bits needed to represent `digits` decimal digits, with a small pad.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 4
}

/// Decimal digits representable at `bits` bits (floor).
pub fn digits_for_bits(bits: u32) -> u32 {
    (bits as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// Parse a decimal literal at `prec` bits.  Panics on malformed input;
/// intended for constants written in source and fixtures.
pub fn real_from_str(s: &str, prec: u32) -> BigReal {
    Float::with_val(prec, Float::parse(s).expect("malformed decimal literal"))
}

/// |a - b| / |b| as an f64 (|a - b| itself when b = 0), for tolerance
/// checks in tests and acceptance reporting.
pub fn rel_error(a: &BigReal, b: &BigReal) -> f64 {
    let p = a.prec().max(b.prec());
    let diff = Float::with_val(p, a - b).abs();
    if b.is_zero() {
        return diff.to_f64();
    }
    let scale = Float::with_val(p, b).abs();
    Float::with_val(53, diff / scale).to_f64()
}

/// Rectangular arbitrary-precision complex number.
///
/// Operations between operands of different precisions produce a
/// result at the minimum of the two precisions; compound operations
/// (mul, div, sqrt) carry [`GUARD`] extra bits internally before the
/// final rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(prec: u32) -> Self {
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_reals(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.prec();
        BigComplex {
            re,
            im: Float::new(p),
        }
    }

    pub fn with_f64s(prec: u32, re: f64, im: f64) -> Self {
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::with_f64s(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Self::with_f64s(prec, 0.0, 1.0)
    }

    /// Effective precision: minimum of the component precisions.
    pub fn prec(&self) -> u32 {
        self.re.prec().min(self.im.prec())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn neg(&self) -> Self {
        BigComplex {
            re: (-&self.re).complete(self.re.prec()),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.prec().min(rhs.prec());
        BigComplex {
            re: (&self.re + &rhs.re).complete(p),
            im: (&self.im + &rhs.im).complete(p),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.prec().min(rhs.prec());
        BigComplex {
            re: (&self.re - &rhs.re).complete(p),
            im: (&self.im - &rhs.im).complete(p),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec().min(rhs.prec());
        let w = self.mul_at(rhs, p + GUARD);
        w.to_prec(p)
    }

    pub fn mul_real(&self, rhs: &BigReal) -> Self {
        let p = self.prec().min(rhs.prec());
        BigComplex {
            re: (&self.re * rhs).complete(p),
            im: (&self.im * rhs).complete(p),
        }
    }

    pub fn mul_i64(&self, rhs: i64) -> Self {
        let p = self.prec();
        BigComplex {
            re: (&self.re * rhs).complete(p),
            im: (&self.im * rhs).complete(p),
        }
    }

    /// Multiplication by i (quarter turn), exact.
    pub fn mul_i(&self) -> Self {
        BigComplex {
            re: (-&self.im).complete(self.im.prec()),
            im: self.re.clone(),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.prec().min(rhs.prec());
        let wp = p + GUARD;
        let den = rhs.norm_sqr_at(wp);
        let num = self.mul_at(&rhs.conj(), wp);
        BigComplex {
            re: Float::with_val(p, &num.re / &den),
            im: Float::with_val(p, &num.im / &den),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        BigComplex::one(p).div(self)
    }

    fn mul_at(&self, rhs: &Self, wp: u32) -> Self {
        let ac = (&self.re * &rhs.re).complete(wp);
        let bd = (&self.im * &rhs.im).complete(wp);
        let ad = (&self.re * &rhs.im).complete(wp);
        let bc = (&self.im * &rhs.re).complete(wp);
        BigComplex {
            re: ac - bd,
            im: ad + bc,
        }
    }

    fn norm_sqr_at(&self, wp: u32) -> BigReal {
        let rr = (&self.re * &self.re).complete(wp);
        let ii = (&self.im * &self.im).complete(wp);
        rr + ii
    }

    /// |z|^2 at the value's precision.
    pub fn norm_sqr(&self) -> BigReal {
        let p = self.prec();
        Float::with_val(p, self.norm_sqr_at(p + GUARD))
    }

    /// |z| at the value's precision.
    pub fn abs(&self) -> BigReal {
        let p = self.prec();
        Float::with_val(p, self.norm_sqr_at(p + GUARD).sqrt())
    }

    /// Principal square root (branch cut on the negative real axis,
    /// result in the closed right half plane).
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        let wp = p + GUARD;
        if self.im.is_zero() {
            if self.re.is_sign_negative() && !self.re.is_zero() {
                let m = Float::with_val(wp, (-&self.re).complete(wp)).sqrt();
                return BigComplex {
                    re: Float::new(p),
                    im: Float::with_val(p, m),
                };
            }
            return BigComplex {
                re: Float::with_val(p, Float::with_val(wp, &self.re).sqrt()),
                im: Float::new(p),
            };
        }
        let r = self.norm_sqr_at(wp).sqrt();
        // Stable half-angle split: take the square root on the large
        // component and divide for the other to avoid cancellation.
        if !self.re.is_sign_negative() {
            let mut u = Float::with_val(wp, &r + &self.re);
            u /= 2u32;
            let u = u.sqrt();
            let den = Float::with_val(wp, &u * 2u32);
            let v = Float::with_val(wp, &self.im / &den);
            BigComplex {
                re: Float::with_val(p, u),
                im: Float::with_val(p, v),
            }
        } else {
            let mut v = Float::with_val(wp, &r - &self.re);
            v /= 2u32;
            let mut v = v.sqrt();
            if self.im.is_sign_negative() {
                v = -v;
            }
            let den = Float::with_val(wp, &v * 2u32);
            let u = Float::with_val(wp, &self.im / &den);
            BigComplex {
                re: Float::with_val(p, u),
                im: Float::with_val(p, v),
            }
        }
    }

    /// z^n by binary powering; n may be negative.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.prec();
        if n == 0 {
            return BigComplex::one(p);
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = BigComplex::one(p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Round (or pad) both components to `prec` bits.
    pub fn to_prec(&self, prec: u32) -> Self {
        BigComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }
}

impl std::fmt::Display for BigComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im.is_sign_negative() {
            let m = (-&self.im).complete(self.im.prec());
            write!(f, "{} - {}i", self.re, m)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

/// |a - b| / |b| for complex values, as f64 (|a - b| when b = 0).
pub fn rel_error_cx(a: &BigComplex, b: &BigComplex) -> f64 {
    let diff = a.sub(b).abs();
    if b.is_zero() {
        return diff.to_f64();
    }
    let scale = b.abs();
    Float::with_val(53, diff / scale).to_f64()
}

/// e^{pi i q} for complex q, with relative error <= 2^{4-prec}.
///
/// The real part of `q` is reduced modulo 2 exactly (the reduction is
/// performed at a precision wide enough to absorb the integer part),
/// so the periodicity identity `exp_pi_i(q+2) = exp_pi_i(q)` holds to
/// working precision even for large arguments.  Exponent overflow in
/// `e^{-pi Im q}` is reported, not saturated.
pub fn exp_pi_i(q: &BigComplex, prec: u32) -> Result<BigComplex, BigcxError> {
    if !q.is_finite() {
        return Err(BigcxError::NonFinite("exp_pi_i".into()));
    }
    let wp = prec + GUARD;

    // Magnitude e^{-pi y}.
    let mut py = pi(wp);
    py *= &q.im;
    let mag = (-py).exp();
    if !mag.is_finite() || (mag.is_zero() && !q.im.is_zero()) {
        return Err(BigcxError::Overflow(format!(
            "exp_pi_i: e^(-pi*{}) leaves the exponent range",
            q.im.to_f64()
        )));
    }

    // Phase: reduce x = Re q modulo 2 exactly, then sin/cos.
    let xe = q.re.get_exp().unwrap_or(0);
    if xe > 1 << 24 {
        return Err(BigcxError::Overflow(
            "exp_pi_i: phase too large to reduce".into(),
        ));
    }
    let hp = wp + if xe > 0 { xe as u32 + 8 } else { 8 };
    let x = Float::with_val(hp, &q.re);
    let mut half = Float::with_val(hp, &x / 2u32);
    half.floor_mut();
    let xr = x - half * 2u32; // in [0, 2), exact
    let mut px = pi(wp);
    px *= xr;
    let (s, c) = px.sin_cos(Float::new(wp));
    let re = Float::with_val(wp, &c * &mag);
    let im = Float::with_val(wp, &s * &mag);
    Ok(BigComplex {
        re: Float::with_val(prec, re),
        im: Float::with_val(prec, im),
    })
}

/// Ascending series for K_nu(x), nu in {0,1} (DLMF 10.31.2).
///
/// The series suffers cancellation of order e^{2x} against the final
/// value, so the working precision adds ~2.886*x bits plus a fixed
/// guard; this keeps the branch valid at any precision for moderate x
/// (it serves as the fallback for x up to a few hundred) at a cost
/// that grows with x.
fn bessel_k_series(nu: u32, x: &Float, prec: u32) -> Float {
    let xf = x.to_f64();
    let cancel = (2.8854 * xf).ceil() as u32 + 64;
    let wp = prec + cancel;
    let x_w = Float::with_val(wp, x);
    let mut t = Float::with_val(wp, &x_w * &x_w);
    t /= 4u32; // x^2/4
    let eps = pow2(-(wp as i32) - 12, wp);

    let mut lg = Float::with_val(wp, &x_w / 2u32).ln();
    lg += euler_gamma(wp); // ln(x/2) + gamma

    if nu == 0 {
        // I0 = sum t^k/(k!)^2 ; S = sum H_k t^k/(k!)^2.
        let mut term = Float::with_val(wp, 1u32);
        let mut i0 = Float::with_val(wp, 1u32);
        let mut s = Float::new(wp);
        let mut h = Float::new(wp);
        let mut k: u32 = 1;
        loop {
            term *= &t;
            term /= Float::with_val(wp, (k as u64) * (k as u64));
            h += Float::with_val(wp, k).recip();
            i0 += &term;
            s += (&term * &h).complete(wp);
            if term < eps {
                break;
            }
            k += 1;
        }
        s -= lg * i0;
        Float::with_val(prec, s)
    } else {
        // K1 = 1/x + (ln(x/2)+gamma) I1 - (x/4) sum (H_k + H_{k+1}) t^k/(k!(k+1)!)
        // with I1 = (x/2) sum t^k/(k!(k+1)!).
        let half_x = Float::with_val(wp, &x_w / 2u32);
        let mut term = Float::with_val(wp, 1u32); // t^k/(k!(k+1)!)
        let mut p_sum = Float::with_val(wp, 1u32);
        let mut h_lo = Float::new(wp); // H_k
        let mut h_hi = Float::with_val(wp, 1u32); // H_{k+1}
        let mut h_sum = Float::with_val(wp, 1u32); // sum (H_k + H_{k+1}) t^k/(k!(k+1)!)
        let mut k: u32 = 1;
        loop {
            term *= &t;
            term /= Float::with_val(wp, (k as u64) * (k as u64 + 1));
            h_lo += Float::with_val(wp, k).recip();
            h_hi += Float::with_val(wp, k + 1).recip();
            p_sum += &term;
            let hh = Float::with_val(wp, &h_lo + &h_hi);
            h_sum += (&term * &hh).complete(wp);
            if term < eps {
                break;
            }
            k += 1;
        }
        let i1 = Float::with_val(wp, &half_x * &p_sum);
        let mut out = Float::with_val(wp, 1u32);
        out /= &x_w;
        out += lg * i1;
        let mut corr = Float::with_val(wp, &half_x / 2u32);
        corr *= h_sum;
        out -= corr;
        Float::with_val(prec, out)
    }
}

/// Asymptotic expansion sqrt(pi/2x) e^{-x} sum u_k (DLMF 10.40.2).
/// Returns None when the smallest term cannot reach `prec` bits.
fn bessel_k_asymptotic(nu: u32, x: &Float, prec: u32) -> Option<Float> {
    // Smallest term is ~ e^{-2x}; bail out early if hopeless.
    let xf = x.to_f64();
    if 2.8854 * xf < prec as f64 + 8.0 {
        return None;
    }
    let wp = prec + GUARD;
    let x_w = Float::with_val(wp, x);
    let eps = pow2(-(prec as i32) - 8, wp);
    let mu = 4i64 * (nu as i64) * (nu as i64);
    let mut term = Float::with_val(wp, 1u32);
    let mut sum = Float::with_val(wp, 1u32);
    let mut prev = Float::with_val(wp, f64::INFINITY);
    let mut k: i64 = 1;
    loop {
        let num = mu - (2 * k - 1) * (2 * k - 1);
        term *= Float::with_val(wp, num);
        term /= Float::with_val(wp, 8 * k);
        term /= &x_w;
        let mag = term.clone().abs();
        if mag >= prev {
            // Terms started growing before reaching the target.
            return None;
        }
        sum += &term;
        if mag < eps {
            break;
        }
        prev = mag;
        k += 1;
        if k > 4 * (xf as i64) + 64 {
            return None;
        }
    }
    let mut pref = pi(wp);
    pref /= Float::with_val(wp, &x_w * 2u32);
    let pref = pref.sqrt();
    let e = Float::with_val(wp, -&x_w).exp();
    let mut out = pref;
    out *= e;
    out *= sum;
    Some(Float::with_val(prec, out))
}

fn bessel_k(nu: u32, x: &Float, prec: u32) -> Result<Float, BigcxError> {
    if !x.is_finite() {
        return Err(BigcxError::NonFinite(format!("bessel_k{nu}")));
    }
    if x.is_sign_negative() || x.is_zero() {
        return Err(BigcxError::NonPositive(format!(
            "bessel_k{nu}({})",
            x.to_f64()
        )));
    }
    if x.to_f64() < BESSEL_CROSSOVER {
        return Ok(bessel_k_series(nu, x, prec));
    }
    match bessel_k_asymptotic(nu, x, prec) {
        Some(v) => Ok(v),
        None => Ok(bessel_k_series(nu, x, prec)),
    }
}

/// Modified Bessel function K_0(x), x > 0, relative error <= 2^{8-prec}.
pub fn bessel_k0(x: &BigReal, prec: u32) -> Result<BigReal, BigcxError> {
    bessel_k(0, x, prec)
}

/// Modified Bessel function K_1(x), x > 0, relative error <= 2^{8-prec}.
pub fn bessel_k1(x: &BigReal, prec: u32) -> Result<BigReal, BigcxError> {
    bessel_k(1, x, prec)
}

/// Evaluate both branches of K_nu at `prec`; the asymptotic slot is
/// None when that expansion cannot reach `prec` at this x.  Used by
/// the crossover consistency tests.
pub fn bessel_k_branches(nu: u32, x: &BigReal, prec: u32) -> (BigReal, Option<BigReal>) {
    (
        bessel_k_series(nu, x, prec),
        bessel_k_asymptotic(nu, x, prec),
    )
}
