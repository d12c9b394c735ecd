//! Support geometry for the projection case `h = P`, rank `α ∈ (0,1)`.
//!
//! Everything here lives in three charts:
//!
//! * the `z`-plane of characteristic starting points, carrying the curve
//!   `∂Σ_{t,α} = {T_α = t}` and the circle `|1−α−z| = α`;
//! * the `w`-plane of the Möbius chart `w = (2α−1+z)/(1−z)`, where `∂Σ` is
//!   the graph `y² = φ_{t,α}(x)/(e^{tx}−1)`;
//! * the image plane of `f_{t,α}(z) = z·e^{t(2α−1+z)/(2(1−z))}`, where
//!   `∂Ω_{t,α} = f_{t,α}(∂Σ_{t,α})` encloses the support.

mod boundary;
mod inverse;
mod membership;

pub use boundary::{
    boundary_omega, boundary_sigma, gamma_boundary, self_intersections, BoundaryCurve, Plane,
};
pub use inverse::f_inverse;
pub use membership::{gamma_contains, in_omega, in_sigma, winding_number, OmegaRegion, RegionQuery};

use crate::{Complex64, Error, Result};

/// The transport map `f_{t,α}(z) = z·exp( t(2α−1+z) / (2(1−z)) )`.
pub fn f_map(t: f64, alpha: f64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if z == one {
        return Err(Error::PoleInput("f at z = 1".into()));
    }
    let e = (Complex64::new(2.0 * alpha - 1.0, 0.0) + z) / (2.0 * (one - z));
    Ok(z * (t * e).exp())
}

/// Derivative `f'_{t,α}(z) = e^{E(z)} (1 + z·tα/(1−z)²)`.
pub fn f_prime(t: f64, alpha: f64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if z == one {
        return Err(Error::PoleInput("f' at z = 1".into()));
    }
    let omz = one - z;
    let e = (Complex64::new(2.0 * alpha - 1.0, 0.0) + z) / (2.0 * omz);
    Ok((t * e).exp() * (one + z * t * alpha / (omz * omz)))
}

/// Möbius chart `w = (2α−1+z)/(1−z)`; maps the circle `|1−α−z| = α` onto
/// the imaginary axis (plus ∞).
pub fn mobius(alpha: f64, z: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if z == one {
        return Err(Error::PoleInput("mobius at z = 1".into()));
    }
    Ok((Complex64::new(2.0 * alpha - 1.0, 0.0) + z) / (one - z))
}

/// Inverse chart `z = (w+1−2α)/(w+1)`.
pub fn mobius_inv(alpha: f64, w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if w == -one {
        return Err(Error::PoleInput("mobius_inv at w = -1".into()));
    }
    Ok((w + 1.0 - 2.0 * alpha) / (w + one))
}

/// The zero-`x₀` blow-up time as a function of the starting point:
///
/// ```text
///            |1−λ₀|²                          α
/// T_α = ────────────────────────── ln ──────────────────────   (off the circle)
///        α(1−|λ₀|²) − (1−α)|1−λ₀|²     α|λ₀|² + (1−α)|1−λ₀|²
/// ```
///
/// with the continuous values `|λ₀−1|²/α` on the circle `|1−α−λ₀| = α` and
/// `0` at `λ₀ = 1`. Real analytic for `α ∈ (0,1)`; the near-circle branch is
/// evaluated by series to keep full precision across the seam.
pub fn t_alpha(alpha: f64, lambda0: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let d = (one - lambda0).norm_sqr();
    if d == 0.0 {
        return 0.0;
    }
    let m = alpha * lambda0.norm_sqr() + (1.0 - alpha) * d;
    // the quotient's numerator α(1−|λ₀|²) − (1−α)|1−λ₀|² equals α − m exactly
    let y = (alpha - m) / alpha;
    // T = (d/α)·g(y) with g(y) = −ln(1−y)/y, g(0) = 1
    let g = if y.abs() < 1e-5 {
        1.0 + y * (0.5 + y * (1.0 / 3.0 + y * (0.25 + y * 0.2)))
    } else {
        -(-y).ln_1p() / y
    };
    d / alpha * g
}

/// `φ_{t,α}(x) = (x+1)² − (x²+2x(1−2α)+1)e^{tx}`, evaluated by series near
/// `x = 0` where the direct formula cancels.
pub fn phi(t: f64, alpha: f64, x: f64) -> f64 {
    if x.abs() < 0.01 && (t * x).abs() < 0.01 {
        return phi_over_x_series(t, alpha, x) * x;
    }
    let q = x * x + 2.0 * x * (1.0 - 2.0 * alpha) + 1.0;
    (x + 1.0) * (x + 1.0) - q * (t * x).exp()
}

/// `φ_{t,α}(x)/x` as a power series (coefficients of `(x+1)² − q·e^{tx}`).
pub(crate) fn phi_over_x_series(t: f64, alpha: f64, x: f64) -> f64 {
    let beta = 1.0 - 2.0 * alpha;
    let mut acc = 4.0 * alpha - t; // k = 1 coefficient
    let mut xpow = x;
    acc += (-0.5 * t * t - 2.0 * beta * t) * xpow; // k = 2
    // k ≥ 3: −(t^k/k! + 2β t^{k−1}/(k−1)! + t^{k−2}/(k−2)!) x^{k−1}
    let mut fact_km2 = 1.0; // (k−2)!
    for k in 3..30u32 {
        xpow *= x;
        let km1 = (k - 1) as f64;
        let fact_km1 = fact_km2 * km1;
        let fact_k = fact_km1 * k as f64;
        let tk2 = t.powi(k as i32 - 2);
        let c = tk2 * t * t / fact_k + 2.0 * beta * tk2 * t / fact_km1 + tk2 / fact_km2;
        let term = -c * xpow;
        acc += term;
        if term.abs() < 1e-18 * acc.abs().max(1e-30) {
            break;
        }
        fact_km2 = fact_km1;
    }
    acc
}

/// `φ'_{t,α}(x)`.
pub fn phi_prime(t: f64, alpha: f64, x: f64) -> f64 {
    let q = x * x + 2.0 * x * (1.0 - 2.0 * alpha) + 1.0;
    let qp = 2.0 * x + 2.0 * (1.0 - 2.0 * alpha);
    2.0 * (x + 1.0) - (qp + t * q) * (t * x).exp()
}

/// Which of the three boundary-curve cases applies: the sign of
/// `φ'(0) = 4α − t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiCase {
    /// `t < 4α`: a positive root `x⁺` exists.
    TLt4Alpha,
    /// `t = 4α`: parabolic contact at `x = 0`.
    TEq4Alpha,
    /// `t > 4α`: a second negative root `x̃⁻ ∈ (−1,0)` exists.
    TGt4Alpha,
}

/// Sign-relevant roots of `φ_{t,α}`.
#[derive(Debug, Clone, Copy)]
pub struct PhiRoots {
    /// The unique root below `−1`.
    pub x_minus: f64,
    /// Root in `(−1, 0)`; present exactly when `t > 4α`.
    pub x_tilde_minus: Option<f64>,
    /// Positive root; present exactly when `t < 4α`.
    pub x_plus: Option<f64>,
    pub case: PhiCase,
}

/// Locate the roots of `φ_{t,α}` by geometric bracket scans and bisection.
pub fn phi_roots(t: f64, alpha: f64) -> Result<PhiRoots> {
    if !(t > 0.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "phi_roots requires t > 0 and alpha in (0,1), got t = {t}, alpha = {alpha}"
        )));
    }
    let f = |x: f64| phi(t, alpha, x);
    // x⁻ < −1: φ(−1) = −4αe^{−t} < 0 and φ → +∞ as x → −∞
    let x_minus = crate::numerics::bracket_and_bisect(-1.0, 1.0, -1.0, 1e6, f)?;
    let disc = 4.0 * alpha - t;
    let case = if disc.abs() <= 1e-12 * (1.0 + t) {
        PhiCase::TEq4Alpha
    } else if disc > 0.0 {
        PhiCase::TLt4Alpha
    } else {
        PhiCase::TGt4Alpha
    };
    let x_plus = if case == PhiCase::TLt4Alpha {
        // φ > 0 just right of 0 (slope 4α−t), eventually −∞
        let lo = 1e-9 / (1.0 + t);
        Some(crate::numerics::bracket_and_bisect(lo, 1.0, 1.0, 1e6, f)?)
    } else {
        None
    };
    let x_tilde_minus = if case == PhiCase::TGt4Alpha {
        // φ(−1) < 0 and φ > 0 just left of 0
        let hi = -1e-12 / (1.0 + t);
        Some(crate::numerics::bisect(-1.0, hi, f)?)
    } else {
        None
    };
    Ok(PhiRoots {
        x_minus,
        x_tilde_minus,
        x_plus,
        case,
    })
}

/// `g_t(α) = 2e^t − (1+(1−α)t)e^{αt}`; positive on `α ∈ [0,1]`.
pub fn g_func(t: f64, alpha: f64) -> f64 {
    2.0 * t.exp() - (1.0 + (1.0 - alpha) * t) * (alpha * t).exp()
}

/// `ψ_{t,α}(x) = x − (x+1−α)e^{2t(1−α)} + (1−α)e^{t(x+2(1−α))}`; positive on
/// `x ∈ [2(α−1), α−1]`.
pub fn psi_func(t: f64, alpha: f64, x: f64) -> f64 {
    x - (x + 1.0 - alpha) * (2.0 * t * (1.0 - alpha)).exp()
        + (1.0 - alpha) * (t * (x + 2.0 * (1.0 - alpha))).exp()
}

/// Separation margin between `∂Σ` and the inverted unit-modulus curve in the
/// `w`-chart.
#[derive(Debug, Clone, Copy)]
pub struct SeparationReport {
    /// `min (y²_Σ − y²_{1/Γ})` over the sampled abscissas.
    pub min_margin: f64,
    /// Abscissa attaining the minimum.
    pub argmin_x: f64,
    pub samples: usize,
}

/// `y²` of the `w`-chart image of the inverted curve `1/∂Γ_{t,α}`:
///
/// ```text
/// y²_{1/Γ}(x) = [ (x+1)² − (x+1−2α)² e^{t(x+2(1−α))} ] / ( e^{t(x+2(1−α))} − 1 ).
/// ```
pub fn y_sq_inv_gamma(t: f64, alpha: f64, x: f64) -> f64 {
    let e = t * (x + 2.0 * (1.0 - alpha));
    let c = x + 1.0 - 2.0 * alpha;
    ((x + 1.0) * (x + 1.0) - c * c * e.exp()) / e.exp_m1()
}

/// Evaluate `y²_Σ − y²_{1/Γ}` on `n` abscissas in `(2(α−1), α−1]`; the margin
/// is positive exactly when the two curves never meet there.
pub fn separation_check(t: f64, alpha: f64, n: usize) -> Result<SeparationReport> {
    if n < 2 {
        return Err(Error::invalid("separation_check needs n >= 2"));
    }
    let lo = 2.0 * (alpha - 1.0);
    let hi = alpha - 1.0;
    let mut min_margin = f64::INFINITY;
    let mut argmin_x = lo;
    for j in 1..=n {
        let x = lo + (hi - lo) * j as f64 / n as f64;
        let y2_sigma = boundary::y_sq_sigma(t, alpha, x);
        let margin = y2_sigma - y_sq_inv_gamma(t, alpha, x);
        if margin < min_margin {
            min_margin = margin;
            argmin_x = x;
        }
    }
    Ok(SeparationReport {
        min_margin,
        argmin_x,
        samples: n,
    })
}
