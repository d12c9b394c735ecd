//! Closed-form solutions along the characteristic curves: the radial part
//! `|λ(u)|`, the affine argument `θ(u)`, the curve `x(u)`, the blow-up time
//! `t*`, and the transported value of `S`.
//!
//! Writing `v = ln|λ|`, the radial part solves `v̈ + x₀p_x(0)²·e^{2v} = 0`.
//! With
//!
//! ```text
//! C₁ = v̇(0)² + x₀p_x(0)²|λ₀|² ,   C₂ = x₀p_x(0)²/C₁ ,   A = 1 + √(1 − C₂|λ₀|²)
//! ```
//!
//! the solution, unified over both signs of `v̇(0)` by the left-continuous
//! sign function (`sgn(0) = −1`), is
//!
//! ```text
//! |λ(u)| = 2|λ₀|·A / ( C₂|λ₀|²·e^{σ√C₁ u} + A²·e^{−σ√C₁ u} ) ,  σ = sgn(v̇(0)) ,
//! ```
//!
//! and `x₀p_x(0)² = 0` degenerates to the exponential `|λ₀|e^{v̇(0)u}`.

use crate::hamiltonian::{hamiltonian_value, initial_phase_point};
use crate::numerics::bisect;
use crate::spectral::{initial_momenta, trace_q0, vdot0, InitialData, SpectralMeasure};
use crate::{Complex64, Error, Result};

/// Constants of the radial solution for one starting point.
#[derive(Debug, Clone, Copy)]
pub struct CurveConstants {
    /// `C₁ = v̇(0)² + x₀p_x(0)²|λ₀|²`.
    pub c1: f64,
    /// `C₂ = x₀p_x(0)²/C₁`; zero in the degenerate case.
    pub c2: f64,
    /// `C₃ = x₀p_x(0)²|λ(u₁)|²`, which collapses to `C₁`.
    pub c3: f64,
    /// Initial radial log-speed `v̇(0)`.
    pub vdot0: f64,
    /// Turning time of `|λ|`; `+∞` when the radius never turns
    /// (`v̇(0) < 0` or the degenerate branch), `0` when `v̇(0) = 0`.
    pub u1: f64,
    /// Frozen source `x₀·p_x(0)²`.
    pub xpx2: f64,
    /// `|λ₀|`.
    pub abs_lambda0: f64,
    /// `x₀p_x(0)² = 0`: radial part is the plain exponential.
    pub degenerate: bool,
}

impl CurveConstants {
    /// `C₂|λ₀|²`, clamped into `[0, 1]` against rounding.
    fn c2r2(&self) -> f64 {
        (self.c2 * self.abs_lambda0 * self.abs_lambda0).min(1.0)
    }

    fn sigma(&self) -> f64 {
        if self.vdot0 > 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

pub fn curve_constants(mu: &SpectralMeasure, init: &InitialData) -> Result<CurveConstants> {
    let r0 = init.lambda0.norm();
    if r0 == 0.0 {
        return Err(Error::LambdaZero);
    }
    let (_, _, px0) = initial_momenta(mu, init)?;
    let v0 = vdot0(mu, init)?;
    let xpx2 = init.x0 * px0 * px0;
    if xpx2 < 0.0 {
        return Err(Error::invalid(format!(
            "closed form requires x0·p_x(0)² >= 0, got {xpx2}"
        )));
    }
    let c1 = v0 * v0 + xpx2 * r0 * r0;
    if xpx2 == 0.0 {
        return Ok(CurveConstants {
            c1,
            c2: 0.0,
            c3: c1,
            vdot0: v0,
            u1: f64::INFINITY,
            xpx2,
            abs_lambda0: r0,
            degenerate: true,
        });
    }
    let c2 = xpx2 / c1;
    let c2r2 = (c2 * r0 * r0).min(1.0);
    let a = 1.0 + (1.0 - c2r2).sqrt();
    // |λ(u₁)| = 1/√C₂ is the maximum of the σ=+1 branch
    let u1 = if v0 > 0.0 {
        (a / c2r2.sqrt()).ln() / c1.sqrt()
    } else if v0 == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(CurveConstants {
        c1,
        c2,
        c3: c1,
        vdot0: v0,
        u1,
        xpx2,
        abs_lambda0: r0,
        degenerate: false,
    })
}

/// `|λ(u)|` for `u ≥ 0`.
pub fn radial_solution(cc: &CurveConstants, u: f64) -> f64 {
    if cc.degenerate {
        return cc.abs_lambda0 * (cc.vdot0 * u).exp();
    }
    let c2r2 = cc.c2r2();
    let a = 1.0 + (1.0 - c2r2).sqrt();
    let e = cc.sigma() * cc.c1.sqrt() * u;
    2.0 * cc.abs_lambda0 * a / (c2r2 * e.exp() + a * a * (-e).exp())
}

/// `θ(u) = θ(0) + K₂·u/2`.
pub fn angular_solution(k2: f64, theta0: f64, u: f64) -> f64 {
    theta0 + 0.5 * k2 * u
}

/// `∫₀ᵘ |λ(s)|² ds` in closed form.
pub fn integral_lambda_sq(cc: &CurveConstants, u: f64) -> f64 {
    let r0sq = cc.abs_lambda0 * cc.abs_lambda0;
    if cc.degenerate {
        if cc.vdot0 == 0.0 {
            return r0sq * u;
        }
        return r0sq * (2.0 * cc.vdot0 * u).exp_m1() / (2.0 * cc.vdot0);
    }
    let s = cc.sigma();
    let sqc1 = cc.c1.sqrt();
    let c2r2 = cc.c2r2();
    let a2 = {
        let a = 1.0 + (1.0 - c2r2).sqrt();
        a * a
    };
    let d0 = c2r2 + a2;
    let arg = -2.0 * s * sqc1 * u;
    if arg < -700.0 {
        // e^{arg} underflows: the integral has saturated
        return 2.0 * r0sq * a2 / (sqc1 * d0 * c2r2);
    }
    // 1/D₁ − 1/D₀ = A²(1−E)/(D₀D₁) with E = e^{arg}; cancellation-free
    let d1 = c2r2 + a2 * arg.exp();
    2.0 * r0sq * a2 * (-arg.exp_m1()) / (s * sqc1 * d0 * d1)
}

/// Supremum of `∫₀ᵘ|λ|²` over `u ≥ 0` (infinite only on the degenerate
/// branch with `v̇(0) ≥ 0`).
fn integral_sup(cc: &CurveConstants) -> f64 {
    let r0sq = cc.abs_lambda0 * cc.abs_lambda0;
    if cc.degenerate {
        return if cc.vdot0 >= 0.0 {
            f64::INFINITY
        } else {
            r0sq / (2.0 * cc.vdot0.abs())
        };
    }
    let sqc1 = cc.c1.sqrt();
    let c2r2 = cc.c2r2();
    let a2 = {
        let a = 1.0 + (1.0 - c2r2).sqrt();
        a * a
    };
    let d0 = c2r2 + a2;
    if cc.sigma() > 0.0 {
        2.0 * r0sq * a2 / (sqc1 * d0 * c2r2)
    } else {
        2.0 * r0sq / (sqc1 * d0)
    }
}

/// `x(u) = x₀ (1 − p_x(0) ∫₀ᵘ|λ|²)²`.
pub fn x_curve(mu: &SpectralMeasure, init: &InitialData, u: f64) -> Result<f64> {
    if init.x0 == 0.0 {
        return Ok(0.0);
    }
    let cc = curve_constants(mu, init)?;
    let px0 = trace_q0(mu, init)?;
    let f = 1.0 - px0 * integral_lambda_sq(&cc, u);
    Ok(init.x0 * f * f)
}

/// The root of `p_x(0)·∫₀ᵘ|λ|² = 1` by bracketed bisection (the map is
/// strictly increasing), without the turning-regime check.
pub fn blowup_root(mu: &SpectralMeasure, init: &InitialData) -> Result<f64> {
    let cc = curve_constants(mu, init)?;
    let px0 = trace_q0(mu, init)?;
    if px0 * integral_sup(&cc) <= 1.0 {
        return Err(Error::BracketingFailure(format!(
            "no blow-up: p_x(0)·sup∫ = {} never reaches 1",
            px0 * integral_sup(&cc)
        )));
    }
    let f = |u: f64| px0 * integral_lambda_sq(&cc, u) - 1.0;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BracketingFailure(
                "blow-up bracket expansion exceeded 1e12".into(),
            ));
        }
    }
    bisect(0.0, hi, f)
}

/// Blow-up time `t*`, defined by `∫₀^{t*}|λ|² = 1/p_x(0)`.
///
/// The closed form is asserted on the pre-turning regime: if `v̇(0) > 0` and
/// the turning time `u₁` precedes the root, an unsupported-regime error
/// carrying the root estimate is returned; see [`blowup_time_any`] for the
/// numerical fallback.
pub fn blowup_time(mu: &SpectralMeasure, init: &InitialData) -> Result<f64> {
    let cc = curve_constants(mu, init)?;
    let root = blowup_root(mu, init)?;
    if cc.vdot0 > 0.0 && cc.u1 < root {
        return Err(Error::UnsupportedRegime {
            u1: cc.u1,
            estimate: root,
        });
    }
    Ok(root)
}

/// Blow-up time with numerical fallback: on a turning-regime failure,
/// integrate the Hamiltonian system until blow-up detection instead.
pub fn blowup_time_any(mu: &SpectralMeasure, init: &InitialData) -> Result<f64> {
    use crate::hamiltonian::{integrate, IntegrateOpts, TrajectoryStatus};
    match blowup_time(mu, init) {
        Ok(t) => Ok(t),
        Err(Error::UnsupportedRegime { estimate, .. }) => {
            let p0 = initial_phase_point(mu, init)?;
            let source = init.x0 * p0.p_x * p0.p_x;
            let traj = integrate(&p0, source, 2.0 * estimate + 1.0, &IntegrateOpts::default())?;
            match traj.status {
                TrajectoryStatus::BlewUp { u } => Ok(u),
                TrajectoryStatus::Completed => Err(Error::IntegrationFailure {
                    u: traj.last().0,
                    reason: "no numerical blow-up where the closed form predicted one".into(),
                }),
            }
        }
        Err(e) => Err(e),
    }
}

/// `x₀p_x(0)² → 0⁺` limit of the blow-up time:
///
/// ```text
/// t* = ln(1 + 2v̇(0)/(|λ₀|²τ(q₀))) / (2v̇(0)) ,    1/(|λ₀|²τ(q₀)) at v̇(0) = 0.
/// ```
pub fn blowup_time_limit(mu: &SpectralMeasure, init: &InitialData) -> Result<f64> {
    let v0 = vdot0(mu, init)?;
    let tq = trace_q0(mu, init)?;
    let r0sq = init.lambda0.norm_sqr();
    if r0sq == 0.0 {
        return Err(Error::LambdaZero);
    }
    if v0 == 0.0 {
        return Ok(1.0 / (r0sq * tq));
    }
    let arg = 1.0 + 2.0 * v0 / (r0sq * tq);
    if arg <= 0.0 {
        return Err(Error::invalid(format!(
            "limit formula undefined: log argument {arg}"
        )));
    }
    Ok(arg.ln() / (2.0 * v0))
}

/// Closed-form characteristic position `(λ(u), x(u))`.
///
/// Only meaningful below the blow-up time; the bound is not checked here.
pub fn characteristic_point(
    mu: &SpectralMeasure,
    init: &InitialData,
    u: f64,
) -> Result<(Complex64, f64)> {
    let cc = curve_constants(mu, init)?;
    let (pa, pb, px) = initial_momenta(mu, init)?;
    let k2 = init.lambda0.re * pb - init.lambda0.im * pa;
    let r = radial_solution(&cc, u);
    let theta = angular_solution(k2, init.lambda0.arg(), u);
    let f = 1.0 - px * integral_lambda_sq(&cc, u);
    Ok((Complex64::from_polar(r, theta), init.x0 * f * f))
}

/// Arguments of the transported value `S(u, λ(u), x(u))`.
#[derive(Debug, Clone, Copy)]
pub struct HJInputs<'a> {
    pub mu: &'a SpectralMeasure,
    pub lambda0: Complex64,
    pub x0: f64,
    pub u: f64,
}

/// The transported value of `S` along the characteristic through `(λ₀, x₀)`:
///
/// ```text
/// S(u, λ(u), x(u)) = τ(log(|h−λ₀|² + x₀)) + (H₀ − ½)u + ln|λ(u)| − ln|λ₀| .
/// ```
pub fn hj_value(inp: &HJInputs) -> Result<f64> {
    let init = InitialData::new(inp.lambda0, inp.x0);
    let a0 = inp.lambda0.re;
    let b0 = inp.lambda0.im;
    let mut s0 = 0.0;
    for &(s, w) in inp.mu.atoms() {
        let arg = (s - a0) * (s - a0) + b0 * b0 + inp.x0;
        if arg <= 0.0 {
            return Err(Error::NonPositiveDenominator {
                location: s,
                value: arg,
            });
        }
        s0 += w * arg.ln();
    }
    let cc = curve_constants(inp.mu, &init)?;
    if inp.u > 0.0 {
        let t_star = blowup_root(inp.mu, &init)?;
        if inp.u >= t_star {
            return Err(Error::BeyondBlowup {
                u: inp.u,
                t_star,
            });
        }
    }
    let p0 = initial_phase_point(inp.mu, &init)?;
    let h0 = hamiltonian_value(&p0);
    let r = radial_solution(&cc, inp.u);
    Ok(s0 + (h0 - 0.5) * inp.u + r.ln() - cc.abs_lambda0.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{integrate, IntegrateOpts, TrajectoryStatus};
    use crate::spectral::projection_measure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Adaptive Simpson quadrature, the independent oracle for the closed-form
    /// integral. Lives in test code only.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: usize,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    #[test]
    fn constants_degenerate_flat() {
        let mu = projection_measure(0.5).unwrap();
        let init = InitialData::new(c(2.0, 0.0), 0.0);
        let cc = curve_constants(&mu, &init).unwrap();
        assert!(cc.degenerate);
        assert_eq!(cc.u1, f64::INFINITY);
        let v0 = vdot0(&mu, &init).unwrap();
        assert!((cc.c1 - v0 * v0).abs() < 1e-15);
    }

    #[test]
    fn constants_turning_at_start_when_vdot0_zero() {
        // tune |λ₀| on the real axis so v̇(0) = 0 at x₀ = 0.3
        let mu = projection_measure(0.5).unwrap();
        let x0 = 0.3;
        let r = bisect(0.6, 1.4, |r| {
            vdot0(&mu, &InitialData::new(c(r, 0.0), x0)).unwrap()
        })
        .unwrap();
        let init = InitialData::new(c(r, 0.0), x0);
        let cc = curve_constants(&mu, &init).unwrap();
        assert!(cc.vdot0.abs() < 1e-12);
        assert!((cc.c2r2() - 1.0).abs() < 1e-10, "C2|λ0|² = {}", cc.c2r2());
        assert!(cc.u1.abs() < 1e-5, "u1 = {}", cc.u1);
        assert!((cc.c1 - cc.xpx2 * r * r).abs() < 1e-12);
    }

    #[test]
    fn radial_at_zero_is_lambda0() {
        let mu = projection_measure(0.7).unwrap();
        for &(z, x0) in &[(c(2.0, 0.5), 0.8), (c(0.3, -0.2), 0.0), (c(1.5, 0.0), 0.1)] {
            let cc = curve_constants(&mu, &InitialData::new(z, x0)).unwrap();
            assert!(
                (radial_solution(&cc, 0.0) - z.norm()).abs() < 1e-14,
                "r(0) != |λ₀| for {z}"
            );
        }
    }

    #[test]
    fn radial_reduces_to_exponential_as_x0_vanishes() {
        let mu = projection_measure(0.5).unwrap();
        let z = c(1.8, 0.4);
        let v0 = vdot0(&mu, &InitialData::new(z, 0.0)).unwrap();
        let cc = curve_constants(&mu, &InitialData::new(z, 1e-10)).unwrap();
        for k in 0..20 {
            let u = 0.05 * k as f64;
            let exp = z.norm() * (v0 * u).exp();
            let got = radial_solution(&cc, u);
            assert!((got - exp).abs() < 1e-6, "u={u}: {got} vs {exp}");
        }
    }

    #[test]
    fn radial_c3_branch_matches_past_turning() {
        // pick a start with v̇(0) > 0: inside the circle |1−α−λ₀| = α
        let mu = projection_measure(0.8).unwrap();
        let init = InitialData::new(c(0.4, 0.1), 0.5);
        let cc = curve_constants(&mu, &init).unwrap();
        assert!(cc.vdot0 > 0.0);
        assert!(cc.u1.is_finite());
        let r_u1 = radial_solution(&cc, cc.u1);
        // the turning radius is 1/√C₂
        assert!((r_u1 - 1.0 / cc.c2.sqrt()).abs() < 1e-10);
        // bound: |λ| ≤ √(|λ₀|² + v̇(0)²/x₀p_x(0)²)
        let bound = (cc.abs_lambda0.powi(2) + cc.vdot0.powi(2) / cc.xpx2).sqrt();
        assert!((r_u1 - bound).abs() < 1e-10);
        // C₃ branch for u ≥ u₁: 2|λ(u₁)|e^{√C₃Δ}/(1+e^{2√C₃Δ})
        for k in 0..12 {
            let du = 0.2 * k as f64;
            let e = (cc.c3.sqrt() * du).exp();
            let expect = 2.0 * r_u1 * e / (1.0 + e * e);
            let got = radial_solution(&cc, cc.u1 + du);
            assert!((got - expect).abs() < 1e-12, "Δ={du}: {got} vs {expect}");
            assert!(got <= bound + 1e-12);
        }
    }

    #[test]
    fn angular_basics() {
        assert_eq!(angular_solution(0.0, 1.2, 5.0), 1.2);
        assert_eq!(angular_solution(0.8, 1.2, 0.0), 1.2);
        assert!((angular_solution(0.8, 1.2, 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn integral_matches_quadrature() {
        let mu = projection_measure(0.5).unwrap();
        for &(z, x0) in &[
            (c(2.0, 0.0), 1.0),
            (c(0.4, 0.1), 0.5),
            (c(1.3, -0.6), 0.25),
            (c(0.9, 0.2), 0.0),
        ] {
            let cc = curve_constants(&mu, &InitialData::new(z, x0)).unwrap();
            for &u in &[0.0, 0.3, 1.0, 2.5] {
                let oracle = if u == 0.0 {
                    0.0
                } else {
                    simpson(|s| radial_solution(&cc, s).powi(2), 0.0, u, 1e-12)
                };
                let got = integral_lambda_sq(&cc, u);
                assert!(
                    (got - oracle).abs() < 1e-9,
                    "z={z}, x0={x0}, u={u}: {got} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn integral_degenerate_forms() {
        let mu = projection_measure(0.5).unwrap();
        let z = c(1.7, 0.3);
        let cc = curve_constants(&mu, &InitialData::new(z, 0.0)).unwrap();
        let v0 = cc.vdot0;
        let u = 0.7;
        let expect = z.norm_sqr() * ((2.0 * v0 * u).exp() - 1.0) / (2.0 * v0);
        assert!((integral_lambda_sq(&cc, u) - expect).abs() < 1e-12);
        assert_eq!(integral_lambda_sq(&cc, 0.0), 0.0);
    }

    #[test]
    fn x_curve_properties() {
        let mu = projection_measure(0.5).unwrap();
        let flat = InitialData::new(c(2.0, 0.4), 0.0);
        for k in 0..10 {
            assert_eq!(x_curve(&mu, &flat, 0.3 * k as f64).unwrap(), 0.0);
        }
        let init = InitialData::new(c(2.0, 0.0), 1.0);
        assert!((x_curve(&mu, &init, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let t_star = blowup_time(&mu, &init).unwrap();
        let x_at_star = x_curve(&mu, &init, t_star).unwrap();
        assert!(x_at_star <= 1e-9, "x(t*) = {x_at_star}");
    }

    #[test]
    fn blowup_against_ode_oracle() {
        let mu = projection_measure(0.5).unwrap();
        let init = InitialData::new(c(2.0, 0.0), 0.01);
        let t_star = blowup_time(&mu, &init).unwrap();
        // root satisfies the defining equation to 1e-10
        let cc = curve_constants(&mu, &init).unwrap();
        let px0 = trace_q0(&mu, &init).unwrap();
        assert!((integral_lambda_sq(&cc, t_star) - 1.0 / px0).abs() < 1e-10);
        // and the integrator blows up at the same time
        let p0 = initial_phase_point(&mu, &init).unwrap();
        let traj = integrate(&p0, cc.xpx2, 2.0 * t_star, &IntegrateOpts::default()).unwrap();
        match traj.status {
            TrajectoryStatus::BlewUp { u } => {
                assert!((u - t_star).abs() < 1e-4, "ode {u} vs closed form {t_star}")
            }
            TrajectoryStatus::Completed => panic!("expected blow-up"),
        }
    }

    #[test]
    fn blowup_limit_formula() {
        let mu = projection_measure(0.5).unwrap();
        let init = InitialData::new(c(2.0, 0.0), 1e-8);
        let exact = blowup_time(&mu, &init).unwrap();
        let limit = blowup_time_limit(&mu, &init).unwrap();
        assert!((exact - limit).abs() < 1e-6, "{exact} vs {limit}");
        // algebraic identity: the exponential integral evaluated at the limit
        // time gives exactly 1/τ(q₀)
        let flat = InitialData::new(c(2.0, 0.0), 0.0);
        let cc = curve_constants(&mu, &flat).unwrap();
        let t = blowup_time_limit(&mu, &flat).unwrap();
        let tq = trace_q0(&mu, &flat).unwrap();
        assert!((integral_lambda_sq(&cc, t) - 1.0 / tq).abs() < 1e-13);
    }

    #[test]
    fn closed_form_tracks_integrated_trajectory() {
        let mu = projection_measure(0.5).unwrap();
        let init = InitialData::new(c(2.0, 0.0), 1.0);
        let cc = curve_constants(&mu, &init).unwrap();
        let p0 = initial_phase_point(&mu, &init).unwrap();
        let t_star = blowup_root(&mu, &init).unwrap();
        let traj = integrate(&p0, cc.xpx2, 0.9 * t_star, &IntegrateOpts::default()).unwrap();
        assert_eq!(traj.status, TrajectoryStatus::Completed);
        for &(u, p) in traj.samples.iter().step_by(37) {
            let (lam, x) = characteristic_point(&mu, &init, u).unwrap();
            assert!(
                (lam - p.lambda()).norm() < 1e-6,
                "u={u}: λ {lam} vs {}",
                p.lambda()
            );
            assert!((x - p.x).abs() < 1e-6, "u={u}: x {x} vs {}", p.x);
        }
    }

    #[test]
    fn hj_value_at_zero_is_atom_sum() {
        let mu = projection_measure(0.5).unwrap();
        let inp = HJInputs {
            mu: &mu,
            lambda0: c(2.0, 0.0),
            x0: 0.0,
            u: 0.0,
        };
        let s = hj_value(&inp).unwrap();
        assert!((s - 2.0f64.ln()).abs() < 1e-14, "S(0) = {s}");
    }

    #[test]
    fn hj_value_flat_closed_form() {
        // x₀ = 0: S(u) = Σ w ln((s−a₀)²+b₀²) + (H₀−½)u + v̇(0)u
        let mu = projection_measure(0.8).unwrap();
        let z = c(2.5, 0.5);
        let init = InitialData::new(z, 0.0);
        let p0 = initial_phase_point(&mu, &init).unwrap();
        let h0 = hamiltonian_value(&p0);
        let v0 = vdot0(&mu, &init).unwrap();
        let s0: f64 = mu
            .atoms()
            .iter()
            .map(|&(s, w)| w * ((s - z.re).powi(2) + z.im * z.im).ln())
            .sum();
        for &u in &[0.1, 0.4, 0.8] {
            let got = hj_value(&HJInputs {
                mu: &mu,
                lambda0: z,
                x0: 0.0,
                u,
            })
            .unwrap();
            let expect = s0 + (h0 - 0.5) * u + v0 * u;
            assert!((got - expect).abs() < 1e-12, "u={u}: {got} vs {expect}");
        }
    }

    #[test]
    fn hj_value_rejects_beyond_blowup() {
        let mu = projection_measure(0.5).unwrap();
        let init = InitialData::new(c(2.0, 0.0), 0.0);
        let t_star = blowup_root(&mu, &init).unwrap();
        let res = hj_value(&HJInputs {
            mu: &mu,
            lambda0: init.lambda0,
            x0: 0.0,
            u: t_star + 0.1,
        });
        assert!(matches!(res, Err(Error::BeyondBlowup { .. })));
    }

    #[test]
    fn unsupported_regime_falls_back() {
        // v̇(0) > 0 with sizable x₀p_x(0)²: turning can precede the root
        let mu = projection_measure(0.8).unwrap();
        let mut hit = false;
        for k in 1..40 {
            let x0 = 0.1 * k as f64;
            let init = InitialData::new(c(0.4, 0.1), x0);
            match blowup_time(&mu, &init) {
                Err(Error::UnsupportedRegime { u1, estimate }) => {
                    hit = true;
                    assert!(u1 < estimate);
                    let t_num = blowup_time_any(&mu, &init).unwrap();
                    assert!(t_num > 0.0 && t_num.is_finite());
                    break;
                }
                Ok(_) => continue,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(hit, "no unsupported-regime case found in sweep");
    }
}
