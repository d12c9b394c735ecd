//! Discrete spectral measures of the non-negative operator `h` and the
//! initial data of the characteristic system.
//!
//! Every trace the characteristics need is a finite sum over the atoms of
//! `μ_|h|`, evaluated against
//!
//! ```text
//! q₀ = ((h − a₀)² + b₀² + x₀)⁻¹ ,     λ₀ = a₀ + i b₀ .
//! ```

use crate::{Complex64, Error, Result};

/// Discrete spectral law of `h`: atoms `(location, weight)`.
///
/// Weights sum to one, locations are non-negative and pairwise distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
}

impl SpectralMeasure {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let mut total = 0.0;
        for &(s, w) in &atoms {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::InvalidMeasure(format!("negative location {s}")));
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidMeasure(format!("non-positive weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if atoms[i].0 == atoms[j].0 {
                    return Err(Error::InvalidMeasure(format!(
                        "duplicate location {}",
                        atoms[i].0
                    )));
                }
            }
        }
        Ok(SpectralMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// τ(h²) = Σ wᵢ sᵢ².
    pub fn second_moment(&self) -> f64 {
        self.atoms.iter().map(|&(s, w)| w * s * s).sum()
    }
}

/// The two-atom measure `(1−α)δ₀ + αδ₁` of a projection with rank α.
pub fn projection_measure(alpha: f64) -> Result<SpectralMeasure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} not in (0,1)")));
    }
    SpectralMeasure::new(vec![(0.0, 1.0 - alpha), (1.0, alpha)])
}

/// Time and projection rank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub t: f64,
    pub alpha: f64,
}

impl Params {
    pub fn new(t: f64, alpha: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("t = {t} must be positive")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("alpha = {alpha} not in (0,1)")));
        }
        Ok(Params { t, alpha })
    }
}

/// Starting point `(λ₀, x₀)` of a characteristic curve.
///
/// `x₀` may be slightly negative as long as every atom denominator
/// `(s − a₀)² + b₀² + x₀` stays positive; that is checked against a measure
/// by [`InitialData::checked`] and by every trace evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialData {
    pub lambda0: Complex64,
    pub x0: f64,
}

impl InitialData {
    pub fn new(lambda0: Complex64, x0: f64) -> Self {
        InitialData { lambda0, x0 }
    }

    /// Construct and verify that `τ(q₀)` is well defined for `mu`.
    pub fn checked(mu: &SpectralMeasure, lambda0: Complex64, x0: f64) -> Result<Self> {
        let init = InitialData { lambda0, x0 };
        trace_q0(mu, &init)?;
        Ok(init)
    }
}

fn denominators<'a>(
    mu: &'a SpectralMeasure,
    init: &'a InitialData,
) -> impl Iterator<Item = Result<(f64, f64, f64)>> + 'a {
    let a0 = init.lambda0.re;
    let b0 = init.lambda0.im;
    let x0 = init.x0;
    mu.atoms().iter().map(move |&(s, w)| {
        let den = (s - a0) * (s - a0) + b0 * b0 + x0;
        if den <= 0.0 {
            Err(Error::NonPositiveDenominator {
                location: s,
                value: den,
            })
        } else {
            Ok((s, w, den))
        }
    })
}

/// τ(q₀) = Σ wᵢ / ((sᵢ − a₀)² + b₀² + x₀). Always positive on its domain.
pub fn trace_q0(mu: &SpectralMeasure, init: &InitialData) -> Result<f64> {
    let mut sum = 0.0;
    for d in denominators(mu, init) {
        let (_, w, den) = d?;
        sum += w / den;
    }
    Ok(sum)
}

/// Initial momenta `(p_a(0), p_b(0), p_x(0))`:
///
/// ```text
/// p_a(0) = −2 τ(q₀ (h − a₀)),   p_b(0) = 2 b₀ τ(q₀),   p_x(0) = τ(q₀).
/// ```
pub fn initial_momenta(mu: &SpectralMeasure, init: &InitialData) -> Result<(f64, f64, f64)> {
    let a0 = init.lambda0.re;
    let b0 = init.lambda0.im;
    let mut tq = 0.0;
    let mut tqh = 0.0; // τ(q₀(h − a₀))
    for d in denominators(mu, init) {
        let (s, w, den) = d?;
        tq += w / den;
        tqh += w * (s - a0) / den;
    }
    Ok((-2.0 * tqh, 2.0 * b0 * tq, tq))
}

/// Initial radial log-speed `v̇(0) = ½ [1 − a₀ p_a(0) − b₀ p_b(0)]`.
pub fn vdot0(mu: &SpectralMeasure, init: &InitialData) -> Result<f64> {
    let (pa0, pb0, _) = initial_momenta(mu, init)?;
    let a0 = init.lambda0.re;
    let b0 = init.lambda0.im;
    Ok(0.5 * (1.0 - a0 * pa0 - b0 * pb0))
}

/// Projection-case quotient for `v̇(0)` at `x₀ = 0`:
///
/// ```text
/// 2 v̇(0) = [α(1 − |λ₀|²) − (1−α)|1 − λ₀|²] / |λ₀ − 1|² ,
/// ```
///
/// valid for `λ₀ ≠ 1`; the `λ₀ → 0` limit `(2α−1)/2` is taken explicitly.
pub fn vdot0_projection(alpha: f64, lambda0: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let d = (lambda0 - one).norm_sqr();
    if d == 0.0 {
        return f64::NAN;
    }
    if lambda0.norm_sqr() == 0.0 {
        return 0.5 * (2.0 * alpha - 1.0);
    }
    0.5 * (alpha * (1.0 - lambda0.norm_sqr()) - (1.0 - alpha) * d) / d
}
