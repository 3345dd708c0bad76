//! Gamma-function machinery, Jacobi polynomials and the generalized Jacobi
//! functions `J_n^{-a,-a}(x) = (1 - x^2)^a P_n^{a,a}(x)` that span the
//! Galerkin space.
//!
//! Every gamma-ratio constant is evaluated in the log domain. Direct
//! evaluation overflows double precision once the polynomial degree passes
//! roughly 85.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use crate::error::{Error, Result};

/// The order `2a` of the Riesz derivative, together with `a` and the integer
/// `k` with `2a` in `[2k - 1, 2k + 1)`.
///
/// For `2a < 1` the convention `k = 1` is used. `k` only ever enters through
/// the sign `(-1)^k` of [`riesz_derivative_image`]; none of the symmetric
/// Galerkin quantities depend on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    two_alpha: f64,
    alpha: f64,
    k: u32,
}

impl FractionalOrder {
    pub fn new(two_alpha: f64) -> Result<Self> {
        if !(two_alpha.is_finite() && two_alpha > 0.0) {
            return Err(Error::InvalidOrder(two_alpha));
        }
        let k = if two_alpha < 1.0 {
            1
        } else {
            ((two_alpha + 1.0) / 2.0).floor() as u32
        };
        Ok(Self {
            two_alpha,
            alpha: two_alpha / 2.0,
            k,
        })
    }

    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new(2.0 * alpha)
    }

    pub fn two_alpha(&self) -> f64 {
        self.two_alpha
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `(-1)^k`.
    pub fn sign_k(&self) -> i32 {
        if self.k.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// True when `a` is a nonnegative integer; the mass matrix is then banded.
    pub fn is_integer_alpha(&self) -> bool {
        self.alpha.fract() == 0.0
    }

    /// The symmetric weight pair `(a, a)` of the Jacobi polynomials inside the basis.
    pub fn basis_params(&self) -> JacobiWeightPair {
        JacobiWeightPair {
            a: self.alpha,
            b: self.alpha,
        }
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2a = {}", self.two_alpha)
    }
}

/// Exponents of the Jacobi weight `(1 - x)^a (1 + x)^b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiWeightPair {
    a: f64,
    b: f64,
}

impl JacobiWeightPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidJacobiParams { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn symmetric(a: f64) -> Result<Self> {
        Self::new(a, a)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(1 - x)^a (1 + x)^b`, with the two linear factors kept apart.
    pub fn weight(&self, x: f64) -> f64 {
        (self.a * (-x).ln_1p() + self.b * x.ln_1p()).exp()
    }
}

/// A real number stored as a sign and the natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogMagnitude {
    sign: i8,
    log_mag: f64,
}

impl SignedLogMagnitude {
    pub const ZERO: Self = Self {
        sign: 0,
        log_mag: f64::NEG_INFINITY,
    };

    pub const ONE: Self = Self {
        sign: 1,
        log_mag: 0.0,
    };

    pub fn new(sign: i8, log_mag: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log_mag,
            }
        }
    }

    pub fn from_f64(value: f64) -> Self {
        if value == 0.0 {
            Self::ZERO
        } else {
            Self::new(if value > 0.0 { 1 } else { -1 }, value.abs().ln())
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_mag(&self) -> f64 {
        self.log_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_mag.exp(),
        }
    }

    /// Reciprocal. Zero maps to itself; callers only divide by factors
    /// known to be nonzero.
    pub fn recip(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.sign, -self.log_mag)
    }

    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.sign, self.log_mag + log_factor)
    }
}

impl std::ops::Mul for SignedLogMagnitude {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.sign * rhs.sign, self.log_mag + rhs.log_mag)
    }
}

impl std::ops::Div for SignedLogMagnitude {
    type Output = Self;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl std::ops::Neg for SignedLogMagnitude {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            sign: -self.sign,
            log_mag: self.log_mag,
        }
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::GammaDomain(x));
    }
    Ok(libm::lgamma(x))
}

/// Unchecked `ln Γ(x)`; callers guarantee `x > 0`.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma({x})");
    libm::lgamma(x)
}

// Stirling series below starts to be accurate to ~1e-24 for z >= 20.
const STIRLING_SHIFT: f64 = 20.0;

/// `ln Γ(z) - [(z - 1/2) ln z - z + ln(2π)/2]` from the Bernoulli series.
fn stirling_tail(z: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let w = 1.0 / (z * z);
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * w + c;
    }
    acc / z
}

/// `ln Γ(x) - ln Γ(y)` for `x, y > 0`, without forming either log-gamma.
///
/// Subtracting two large `ln Γ` values loses about `ε·ln Γ` absolute
/// accuracy; the Stirling difference keeps the result accurate relative to
/// its own size.
pub fn log_gamma_ratio(x: f64, y: f64) -> f64 {
    debug_assert!(x > 0.0 && y > 0.0, "log_gamma_ratio({x}, {y})");
    if x == y {
        return 0.0;
    }
    let lo = x.min(y);
    let mut shift_sum = 0.0;
    let (mut x, mut y) = (x, y);
    if lo < STIRLING_SHIFT {
        let steps = (STIRLING_SHIFT - lo).ceil() as usize;
        let d = y - x;
        for _ in 0..steps {
            // ln Γ(x) = ln Γ(x + 1) - ln x
            shift_sum += (d / x).ln_1p();
            x += 1.0;
            y += 1.0;
        }
    }
    let d = x - y;
    (y - 0.5) * (d / y).ln_1p() + d * x.ln() - d + stirling_tail(x) - stirling_tail(y) + shift_sum
}

/// `sin(πx)` with the argument reduced exactly before scaling by π.
fn sin_pi(x: f64) -> f64 {
    // r in [-1, 1], sin(πx) = sin(πr)
    let r = x - 2.0 * (x / 2.0).round();
    let (sign, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    // sin(πr) = sin(π(1 - r)) on [0, 1]
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

/// `1/Γ(x)` for any real `x`, exactly zero at the poles `x = 0, -1, -2, ...`.
pub fn recip_gamma_signed(x: f64) -> SignedLogMagnitude {
    if x > 0.0 {
        return SignedLogMagnitude::new(1, -ln_gamma(x));
    }
    if x == x.floor() {
        return SignedLogMagnitude::ZERO;
    }
    // Γ(x) Γ(1 - x) = π / sin(πx)
    let s = sin_pi(x);
    let sign = if s > 0.0 { 1 } else { -1 };
    SignedLogMagnitude::new(sign, ln_gamma(1.0 - x) + s.abs().ln() - PI.ln())
}

/// Coefficients of `P_n = ((c1 + c2 x) P_{n-1} - c3 P_{n-2}) / c0` for `n >= 2`.
#[inline]
fn recurrence_coeffs(a: f64, b: f64, n: usize) -> (f64, f64, f64, f64) {
    let n = n as f64;
    let s = 2.0 * n + a + b;
    let c0 = 2.0 * n * (n + a + b) * (s - 2.0);
    let c1 = (s - 1.0) * (a * a - b * b);
    let c2 = (s - 2.0) * (s - 1.0) * s;
    let c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
    (c0, c1, c2, c3)
}

/// `P_n^{a,b}(x)` by the three-term recurrence.
pub fn jacobi_eval(params: JacobiWeightPair, n: usize, x: f64) -> f64 {
    let (a, b) = (params.a, params.b);
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for m in 2..=n {
        let (c0, c1, c2, c3) = recurrence_coeffs(a, b, m);
        let next = ((c1 + c2 * x) * cur - c3 * prev) / c0;
        prev = cur;
        cur = next;
    }
    cur
}

/// Fills `out[m] = P_m^{a,b}(x)` for `m = 0..out.len()`.
pub fn jacobi_eval_all(params: JacobiWeightPair, x: f64, out: &mut [f64]) {
    let (a, b) = (params.a, params.b);
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for m in 2..out.len() {
        let (c0, c1, c2, c3) = recurrence_coeffs(a, b, m);
        out[m] = ((c1 + c2 * x) * out[m - 1] - c3 * out[m - 2]) / c0;
    }
}

/// Weighted squared norm `γ_n^{a,b} = ∫ (1-x)^a (1+x)^b P_n^{a,b}(x)^2 dx`.
pub fn jacobi_norm_sq(params: JacobiWeightPair, n: usize) -> f64 {
    let (a, b) = (params.a, params.b);
    if n == 0 {
        // (a+b+1) Γ(a+b+1) folded into Γ(a+b+2); stays finite at a + b = -1.
        let log = (a + b + 1.0) * LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(a + b + 2.0);
        return log.exp();
    }
    let nf = n as f64;
    let log = (a + b + 1.0) * LN_2 - (2.0 * nf + a + b + 1.0).ln()
        + log_gamma_ratio(nf + a + 1.0, nf + 1.0)
        + log_gamma_ratio(nf + b + 1.0, nf + a + b + 1.0);
    log.exp()
}

/// `J_n^{-a,-a}(x) = (1 - x^2)^a P_n^{a,a}(x)`; exactly zero at `x = ±1`.
pub fn gjf_eval(order: FractionalOrder, n: usize, x: f64) -> f64 {
    if x.abs() == 1.0 {
        return 0.0;
    }
    gjf_weight(order.alpha(), x) * jacobi_eval(order.basis_params(), n, x)
}

/// `(1 - x^2)^a` computed as `exp(a (ln(1-x) + ln(1+x)))`.
pub(crate) fn gjf_weight(alpha: f64, x: f64) -> f64 {
    if x.abs() == 1.0 {
        return 0.0;
    }
    (alpha * ((-x).ln_1p() + x.ln_1p())).exp()
}

/// Normalization `c_n` with `φ_n = c_n J_n^{-a,-a}` and `|φ_n|_a = 1`.
pub fn basis_coeff(order: FractionalOrder, n: usize) -> f64 {
    let alpha = order.alpha();
    let nf = n as f64;
    let log = 0.5 * (2.0 * nf + 2.0 * alpha + 1.0).ln()
        - (alpha + 0.5) * LN_2
        - log_gamma_ratio(nf + alpha + 1.0, nf + 1.0);
    log.exp()
}

/// `(D^a J_n, D^a J_n) = 2^{2a+1} Γ(n+a+1)^2 / (n!^2 (2n+2a+1))`.
pub fn a_norm_sq_gjf(order: FractionalOrder, n: usize) -> f64 {
    let alpha = order.alpha();
    let nf = n as f64;
    let log = (2.0 * alpha + 1.0) * LN_2 - (2.0 * nf + 2.0 * alpha + 1.0).ln()
        + 2.0 * log_gamma_ratio(nf + alpha + 1.0, nf + 1.0);
    log.exp()
}

/// `Σ_{i >= from} (D^a J_i, D^a J_i) u_i^2` for an expansion `u = Σ u_i J_i^{-a,-a}`.
pub fn tail_seminorm_sq(order: FractionalOrder, coeffs: &[f64], from: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(from)
        .map(|(i, u)| a_norm_sq_gjf(order, i) * u * u)
        .sum()
}

/// `D^{2a-2ν} J_n^{-a,-a} = scale · P_degree^{c,c}` with `c = a - 2ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeImage {
    pub scale: f64,
    /// Both exponents of the resulting Jacobi polynomial. May be `<= -1`, in
    /// which case it is only a formal label.
    pub exponent: f64,
    pub degree: usize,
}

impl DerivativeImage {
    /// The exponent pair as a classical weight, or `None` when `exponent <= -1`.
    pub fn params(&self) -> Option<JacobiWeightPair> {
        JacobiWeightPair::symmetric(self.exponent).ok()
    }
}

/// Image of a basis function under the Riesz derivative of order `2a - 2ν`.
pub fn riesz_derivative_image(order: FractionalOrder, nu: usize, n: usize) -> Result<DerivativeImage> {
    let max = order.alpha().floor() as usize;
    if nu > max {
        return Err(Error::ShiftOutOfRange { nu, max });
    }
    let alpha = order.alpha();
    let (nf, nuf) = (n as f64, nu as f64);
    let log = 2.0 * nuf * LN_2 + log_gamma_ratio(nf + 2.0 * alpha - 2.0 * nuf + 1.0, nf + 1.0);
    Ok(DerivativeImage {
        scale: f64::from(order.sign_k()) * log.exp(),
        exponent: alpha - 2.0 * nuf,
        degree: n + 2 * nu,
    })
}
