//! Sampled boundary curves: `∂Σ_{t,α}` in the `z`-plane, its image
//! `∂Ω_{t,α} = f_{t,α}(∂Σ_{t,α})`, and the level curve `∂Γ_{t,α}`.
//!
//! All three are parametrized by the `w`-chart abscissa `x` with
//! cosine-clustered nodes (the ordinate has square-root behavior at simple
//! endpoint roots).

use super::{f_map, mobius_inv, phi, phi_over_x_series, phi_prime, phi_roots, PhiCase};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    /// Möbius chart `w = (2α−1+z)/(1−z)`.
    W,
    /// Plane of characteristic starting points.
    Z,
    /// Image plane of `f_{t,α}`.
    Image,
}

/// A sampled closed curve with its `w`-chart parametrization.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub plane: Plane,
    pub points: Vec<Complex64>,
    pub closed: bool,
    /// `w`-chart abscissa range of the parametrization.
    pub x_range: (f64, f64),
    /// Per-point parameter `(abscissa, upper-branch flag)`.
    pub w_params: Vec<(f64, bool)>,
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Longest edge of the sampled polygon (including the closing edge).
    pub fn max_spacing(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| (self.points[(i + 1) % n] - self.points[i]).norm())
            .fold(0.0, f64::max)
    }
}

/// `y²(x) = φ_{t,α}(x)/(e^{tx}−1)` of the `∂Σ` parametrization, with the
/// continuous value `4α/t − 1` at `x = 0`.
pub(crate) fn y_sq_sigma(t: f64, alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 4.0 * alpha / t - 1.0;
    }
    let tx = t * x;
    if x.abs() < 0.01 && tx.abs() < 0.01 {
        // φ(x)/x over expm1(tx)/x, both regular through 0
        return phi_over_x_series(t, alpha, x) / (tx.exp_m1() / x);
    }
    phi(t, alpha, x) / tx.exp_m1()
}

fn validate(t: f64, alpha: f64, n_samples: usize) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("t = {t} must be positive")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} not in (0,1)")));
    }
    if n_samples < 16 {
        return Err(Error::invalid(format!(
            "n_samples = {n_samples} below minimum 16"
        )));
    }
    Ok(())
}

/// Cosine-clustered nodes on `[lo, hi]`, endpoints exact.
fn cos_nodes(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..m)
        .map(|j| {
            if j == 0 {
                lo
            } else if j == m - 1 {
                hi
            } else {
                mid - half * (std::f64::consts::PI * j as f64 / (m - 1) as f64).cos()
            }
        })
        .collect()
}

/// Assemble a closed two-branch curve from upper-branch `w`-chart samples,
/// mapping each `w` through `to_point` (conjugate-symmetric by construction).
fn close_symmetric(
    upper: &[(f64, f64)],
    to_point: impl Fn(Complex64) -> Result<Complex64>,
) -> Result<(Vec<Complex64>, Vec<(f64, bool)>)> {
    let m = upper.len();
    let mut points = Vec::with_capacity(2 * m - 2);
    let mut params = Vec::with_capacity(2 * m - 2);
    for &(x, y) in upper {
        points.push(to_point(Complex64::new(x, y))?);
        params.push((x, true));
    }
    for &(x, y) in upper[1..m - 1].iter().rev() {
        points.push(to_point(Complex64::new(x, -y))?);
        params.push((x, false));
    }
    Ok((points, params))
}

/// `∂Σ_{t,α}` sampled in the `z`-plane.
///
/// The `w`-chart abscissa range follows the root pattern of `φ_{t,α}`:
/// `[x⁻, x⁺]` for `t < 4α`, `[x⁻, 0]` at `t = 4α`, `[x⁻, x̃⁻]` for `t > 4α`.
pub fn boundary_sigma(t: f64, alpha: f64, n_samples: usize) -> Result<BoundaryCurve> {
    validate(t, alpha, n_samples)?;
    let roots = phi_roots(t, alpha)?;
    let (x_lo, x_hi) = match roots.case {
        PhiCase::TLt4Alpha => (roots.x_minus, roots.x_plus.unwrap()),
        PhiCase::TEq4Alpha => (roots.x_minus, 0.0),
        PhiCase::TGt4Alpha => (roots.x_minus, roots.x_tilde_minus.unwrap()),
    };
    let m = n_samples / 2 + 1;
    let xs = cos_nodes(x_lo, x_hi, m);
    // simple roots where y is pinned to zero (x = 0 in the parabolic case is
    // a double root of y² and handled by the series inside y_sq_sigma)
    let simple_roots: Vec<f64> = match roots.case {
        PhiCase::TLt4Alpha => vec![roots.x_minus, roots.x_plus.unwrap()],
        PhiCase::TEq4Alpha => vec![roots.x_minus],
        PhiCase::TGt4Alpha => vec![roots.x_minus, roots.x_tilde_minus.unwrap()],
    };
    // the endpoint Taylor expansion is only valid well inside one root's
    // basin: cap its radius by a fraction of the parameter span (the span
    // can be as small as ~1e-11 for large t, where both roots hug x = −1)
    let span = x_hi - x_lo;
    let mut upper = Vec::with_capacity(m);
    for (j, &x) in xs.iter().enumerate() {
        let y = if j == 0 || j == m - 1 {
            0.0
        } else {
            let near_root = simple_roots
                .iter()
                .copied()
                .find(|r| (x - r).abs() < (1e-8 * (1.0 + r.abs())).min(0.01 * span));
            let y2 = match near_root {
                // first-order Taylor of φ at the root avoids 0/0 noise
                Some(r) => phi_prime(t, alpha, r) * (x - r) / (t * x).exp_m1(),
                None => y_sq_sigma(t, alpha, x),
            };
            y2.max(0.0).sqrt()
        };
        upper.push((x, y));
    }
    let (points, params) = close_symmetric(&upper, |w| mobius_inv(alpha, w))?;
    Ok(BoundaryCurve {
        plane: Plane::Z,
        points,
        closed: true,
        x_range: (x_lo, x_hi),
        w_params: params,
    })
}

/// `∂Ω_{t,α} = f_{t,α}(∂Σ_{t,α})` sampled in the image plane.
pub fn boundary_omega(t: f64, alpha: f64, n_samples: usize) -> Result<BoundaryCurve> {
    let sigma = boundary_sigma(t, alpha, n_samples)?;
    let points = sigma
        .points
        .iter()
        .map(|&z| f_map(t, alpha, z))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryCurve {
        plane: Plane::Image,
        points,
        closed: true,
        x_range: sigma.x_range,
        w_params: sigma.w_params,
    })
}

/// `N(x)` of the `∂Γ` parametrization: `(x+1)² − (x+1−2α)²e^{t(x+1−α)}`.
fn gamma_numerator(t: f64, alpha: f64, x: f64) -> f64 {
    let c = x + 1.0 - 2.0 * alpha;
    let q = x - (alpha - 1.0);
    if (t * q).abs() < 1e-5 {
        // Taylor at x = α−1 (N and e^{τ}−1 vanish together there)
        let (n1, n2) = gamma_taylor(t, alpha);
        return n1 * q + 0.5 * n2 * q * q;
    }
    (x + 1.0) * (x + 1.0) - c * c * (t * q).exp()
}

/// `(N'(α−1), N''(α−1))`.
fn gamma_taylor(t: f64, alpha: f64) -> (f64, f64) {
    let n1 = alpha * (4.0 - alpha * t);
    let n2 = 2.0 - (2.0 - 4.0 * t * alpha + t * t * alpha * alpha);
    (n1, n2)
}

/// `y²(x)` of the `∂Γ` parametrization, `y² = N(x)/(e^{t(x+1−α)}−1)`, with a
/// series guard through the regular point `x = α−1`.
fn y_sq_gamma(t: f64, alpha: f64, x: f64) -> f64 {
    let q = x - (alpha - 1.0);
    let tq = t * q;
    if tq.abs() < 1e-5 {
        let (n1, n2) = gamma_taylor(t, alpha);
        return (n1 + 0.5 * n2 * q) / (t * (1.0 + 0.5 * tq + tq * tq / 6.0));
    }
    gamma_numerator(t, alpha, x) / tq.exp_m1()
}

/// `∂Γ_{t,α} = ∂{z ∈ D: |f_{t,α}(z)| < e^{(α−1)t/2}}` sampled in the
/// `z`-plane.
///
/// In the `w`-chart the unit circle is the line `x = α−1`. For `αt < 4` the
/// level curve crosses it and `∂Γ` is the curve arc right of the line closed
/// by a unit-circle arc through `z = −1`; for `αt ≥ 4` it is a detached
/// closed curve on `[x̃_g, x_g⁺]`.
pub fn gamma_boundary(t: f64, alpha: f64, n_samples: usize) -> Result<BoundaryCurve> {
    validate(t, alpha, n_samples)?;
    let n_of = |x: f64| gamma_numerator(t, alpha, x);
    let line = alpha - 1.0;
    // rightmost root: N(2α−1) = 4α² > 0, N → −∞
    let x_right = crate::numerics::bracket_and_bisect(2.0 * alpha - 1.0, 1.0, 1.0, 1e6, n_of)?;
    let crossing = alpha * (4.0 - alpha * t); // N'(α−1): sign decides the topology
    if crossing > 1e-10 {
        // αt < 4: arc over [α−1, x_right] plus the circle-arc closure
        let y_c = (crossing / t).sqrt();
        let m = n_samples / 2 + 1;
        let xs = cos_nodes(line, x_right, m);
        let mut upper = Vec::with_capacity(m);
        for (j, &x) in xs.iter().enumerate() {
            let y = if j == m - 1 {
                0.0
            } else if j == 0 {
                y_c
            } else {
                y_sq_gamma(t, alpha, x).max(0.0).sqrt()
            };
            upper.push((x, y));
        }
        // upper arc, lower arc, then the w-line segment x = α−1 from −y_c to
        // +y_c (the unit-circle arc through z = −1)
        let mut points = Vec::new();
        let mut params = Vec::new();
        for &(x, y) in &upper {
            points.push(mobius_inv(alpha, Complex64::new(x, y))?);
            params.push((x, true));
        }
        for &(x, y) in upper[1..m - 1].iter().rev() {
            points.push(mobius_inv(alpha, Complex64::new(x, -y))?);
            params.push((x, false));
        }
        let n_arc = (n_samples / 8).max(8);
        for k in 0..n_arc {
            let y = -y_c + 2.0 * y_c * k as f64 / n_arc as f64;
            if y.abs() < 1e-9 {
                continue; // w = −1 is the chart pole (z = ∞ is not on ∂Γ)
            }
            points.push(mobius_inv(alpha, Complex64::new(line, y))?);
            params.push((line, y > 0.0));
        }
        Ok(BoundaryCurve {
            plane: Plane::Z,
            points,
            closed: true,
            x_range: (line, x_right),
            w_params: params,
        })
    } else {
        // αt ≥ 4: detached curve; left endpoint is the root in [α−1, 2α−1]
        let x_left = if crossing.abs() <= 1e-10 {
            line
        } else {
            crate::numerics::bisect(line + 1e-14, 2.0 * alpha - 1.0, n_of)?
        };
        let m = n_samples / 2 + 1;
        let xs = cos_nodes(x_left, x_right, m);
        let mut upper = Vec::with_capacity(m);
        for (j, &x) in xs.iter().enumerate() {
            let y = if j == 0 || j == m - 1 {
                0.0
            } else {
                y_sq_gamma(t, alpha, x).max(0.0).sqrt()
            };
            upper.push((x, y));
        }
        let (points, params) = close_symmetric(&upper, |w| mobius_inv(alpha, w))?;
        Ok(BoundaryCurve {
            plane: Plane::Z,
            points,
            closed: true,
            x_range: (x_left, x_right),
            w_params: params,
        })
    }
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0))
}

/// Count proper crossings between non-adjacent edges of the sampled polygon.
pub fn self_intersections(curve: &BoundaryCurve) -> usize {
    let pts = &curve.points;
    let n = pts.len();
    if n < 4 {
        return 0;
    }
    let mut count = 0;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 2..n {
            // skip adjacent pairs, including the wrap-around pair (0, n−1)
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::super::t_alpha;
    use super::*;

    const PAIRS: [(f64, f64); 5] = [(1.0, 0.8), (2.0, 0.3), (3.0, 0.7), (3.2, 0.8), (4.0, 0.8)];

    #[test]
    fn sigma_points_sit_on_level_set() {
        for &(t, alpha) in &PAIRS {
            let curve = boundary_sigma(t, alpha, 512).unwrap();
            let mut worst_t = 0.0f64;
            let mut worst_mod = 0.0f64;
            for &z in &curve.points {
                worst_t = worst_t.max((t_alpha(alpha, z) - t).abs());
                let fz = f_map(t, alpha, z).unwrap();
                let rhs = alpha * z.norm_sqr()
                    / (alpha * z.norm_sqr()
                        + (1.0 - alpha) * (Complex64::new(1.0, 0.0) - z).norm_sqr());
                worst_mod = worst_mod.max((fz.norm_sqr() - rhs).abs());
            }
            assert!(worst_t <= 1e-8, "(t,a)=({t},{alpha}): |T−t| = {worst_t}");
            assert!(
                worst_mod <= 1e-9,
                "(t,a)=({t},{alpha}): modulus identity off by {worst_mod}"
            );
        }
    }

    #[test]
    fn sigma_conjugation_symmetric() {
        let curve = boundary_sigma(1.0, 0.8, 256).unwrap();
        // upper point j and its mirror have conjugate z
        let m = 256 / 2 + 1;
        for j in 1..m - 1 {
            let up = curve.points[j];
            let down = curve.points[2 * m - 2 - j];
            assert!((up - down.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn sigma_passes_through_special_points() {
        // t = 4α: w = 0 endpoint means the curve reaches z = 1−2α
        let curve = boundary_sigma(3.2, 0.8, 512).unwrap();
        let target = Complex64::new(1.0 - 2.0 * 0.8, 0.0);
        let nearest = curve
            .points
            .iter()
            .map(|&z| (z - target).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-12, "z = 1−2α missed by {nearest}");

        // t < 4α: the two x = 0 points have |y| = √(4α/t − 1) in the w-chart
        let y0 = y_sq_sigma(1.0, 0.8, 0.0);
        assert!((y0 - (4.0 * 0.8 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn omega_image_and_injectivity_witness() {
        for &(t, alpha) in &[(1.0, 0.8), (2.0, 0.3)] {
            let sigma = boundary_sigma(t, alpha, 512).unwrap();
            let omega = boundary_omega(t, alpha, 512).unwrap();
            assert_eq!(sigma.len(), omega.len());
            for (zs, zo) in sigma.points.iter().zip(&omega.points) {
                assert!((f_map(t, alpha, *zs).unwrap() - zo).norm() < 1e-13);
            }
            // (e^{tx}−1)/x strictly increasing across the abscissa range, and
            // the squared center-offset m(x) = (x+1−2α)² + y² strictly
            // monotone on the upper branch: equal image moduli force x₁ = x₂
            let g = |x: f64| (t * x).exp_m1() / x;
            let m = 512 / 2 + 1;
            for j in 0..m - 1 {
                let (x1, _) = sigma.w_params[j];
                let (x2, _) = sigma.w_params[j + 1];
                assert!(g(x2) > g(x1), "g not increasing at x = {x1}");
            }
            let mvals: Vec<f64> = omega.points[..m].iter().map(|z| z.norm_sqr()).collect();
            let inc = mvals.windows(2).filter(|w| w[1] > w[0]).count();
            let dec = mvals.windows(2).filter(|w| w[1] < w[0]).count();
            assert!(
                inc == mvals.len() - 1 || dec == mvals.len() - 1,
                "|f| not strictly monotone along the upper branch: {inc} up, {dec} down"
            );
        }
    }

    #[test]
    fn curves_are_simple() {
        for &(t, alpha) in &PAIRS {
            let sigma = boundary_sigma(t, alpha, 1024).unwrap();
            let omega = boundary_omega(t, alpha, 1024).unwrap();
            assert_eq!(self_intersections(&sigma), 0, "(t,a)=({t},{alpha}) sigma");
            assert_eq!(self_intersections(&omega), 0, "(t,a)=({t},{alpha}) omega");
        }
    }

    #[test]
    fn omega_approaches_sqrt_alpha_circle() {
        let omega = boundary_omega(50.0, 0.25, 1024).unwrap();
        let mut worst = 0.0f64;
        for &z in &omega.points {
            worst = worst.max((z.norm() - 0.5).abs());
        }
        assert!(worst < 0.05, "max ||f|−√α| = {worst}");
    }

    #[test]
    fn gamma_boundary_on_level_set() {
        for &(t, alpha) in &[(1.0f64, 0.8f64), (2.0, 0.3), (3.0, 0.7)] {
            let rho = ((alpha - 1.0) * t / 2.0).exp();
            let curve = gamma_boundary(t, alpha, 256).unwrap();
            for &z in &curve.points {
                assert!(z.norm() <= 1.0 + 1e-9, "|z| = {} leaves the disc", z.norm());
                let fz = f_map(t, alpha, z).unwrap();
                assert!(
                    (fz.norm() - rho).abs() < 1e-9,
                    "(t,a)=({t},{alpha}): level set off by {}",
                    (fz.norm() - rho).abs()
                );
            }
            assert_eq!(self_intersections(&curve), 0);
        }
        // detached case αt > 4
        let curve = gamma_boundary(6.0, 0.8, 256).unwrap();
        let rho = ((0.8f64 - 1.0) * 6.0 / 2.0).exp();
        for &z in &curve.points {
            let fz = f_map(6.0, 0.8, z).unwrap();
            assert!((fz.norm() - rho).abs() < 1e-9);
            assert!(z.norm() < 1.0);
        }
    }

    #[test]
    fn intersection_counter_detects_crossings() {
        let mk = |pts: &[(f64, f64)]| BoundaryCurve {
            plane: Plane::Z,
            points: pts.iter().map(|&(a, b)| Complex64::new(a, b)).collect(),
            closed: true,
            x_range: (0.0, 1.0),
            w_params: vec![],
        };
        let square = mk(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(self_intersections(&square), 0);
        let bowtie = mk(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(self_intersections(&bowtie), 1);
    }
}
