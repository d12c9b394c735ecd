//! Invariant suites behind `brown check`. The fast level runs every analytic
//! suite; the full level adds the random-matrix oracles.

use brown_core::brown_eval::{laplacian_field, s_t, GridSpec};
use brown_core::closed_form::{
    angular_solution, blowup_time, blowup_time_any, blowup_time_limit, curve_constants,
    integral_lambda_sq, radial_solution,
};
use brown_core::hamiltonian::{initial_phase_point, integrate, IntegrateOpts, TrajectoryStatus};
use brown_core::region::{
    boundary_omega, boundary_sigma, f_inverse, f_map, g_func, mobius, mobius_inv, psi_func,
    self_intersections, separation_check, t_alpha, OmegaRegion, RegionQuery,
};
use brown_core::rmt::{
    empirical_s_from_samples, eigencloud_from_samples, mean_trace_y, moment_flow_check_batch,
    rank_of, simulate_ubm, SimConfig,
};
use brown_core::spectral::{initial_momenta, projection_measure, vdot0, vdot0_projection, InitialData};
use brown_core::{defaults, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn suite(name: &str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        passed,
        detail,
    }
}

fn random_start(rng: &mut ChaCha8Rng) -> (f64, Complex64, f64) {
    let alpha = [0.3, 0.5, 0.8][rng.gen_range(0..3)];
    loop {
        let lam = Complex64::from_polar(
            rng.gen_range(0.15..2.5),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        if (lam - c(1.0, 0.0)).norm() > 0.05 {
            return (alpha, lam, rng.gen_range(0.0..=1.0));
        }
    }
}

fn spectral_identities(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (alpha, lam, _) = random_start(&mut rng);
        let mu = projection_measure(alpha).unwrap();
        let v1 = vdot0(&mu, &InitialData::new(lam, 0.0)).unwrap();
        let v2 = vdot0_projection(alpha, lam);
        worst = worst.max((v1 - v2).abs());
        // circle zero set
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let on = c(1.0 - alpha + alpha * phi.cos(), alpha * phi.sin());
        worst = worst.max(vdot0(&mu, &InitialData::new(on, 0.0)).unwrap().abs());
    }
    suite(
        "spectral-identities",
        worst <= 1e-12,
        format!("max deviation {worst:.3e} (tol 1e-12)"),
    )
}

fn conservation(seed: u64, count: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let (alpha, lam, x0) = random_start(&mut rng);
        let mu = projection_measure(alpha).unwrap();
        let init = InitialData::new(lam, x0);
        let t_star = blowup_time_any(&mu, &init).unwrap();
        let p0 = initial_phase_point(&mu, &init).unwrap();
        let source = x0 * p0.p_x * p0.p_x;
        let traj = integrate(
            &p0,
            source,
            (0.9 * t_star).min(5.0),
            &IntegrateOpts::default(),
        )
        .unwrap();
        let d = traj.conserved_drift();
        worst = worst.max(d.h).max(d.k1).max(d.k2).max(d.xpx2);
    }
    suite(
        "conservation",
        worst <= defaults::TOL_CONS,
        format!("max drift {worst:.3e} over {count} starts (tol {:.0e})", defaults::TOL_CONS),
    )
}

fn closed_vs_ode(seed: u64, count: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let (alpha, lam, x0) = random_start(&mut rng);
        let mu = projection_measure(alpha).unwrap();
        let init = InitialData::new(lam, x0);
        let t_star = blowup_time_any(&mu, &init).unwrap();
        let cc = curve_constants(&mu, &init).unwrap();
        let (pa, pb, px) = initial_momenta(&mu, &init).unwrap();
        let k2 = lam.re * pb - lam.im * pa;
        let p0 = initial_phase_point(&mu, &init).unwrap();
        let traj = integrate(
            &p0,
            cc.xpx2,
            (0.9 * t_star).min(5.0),
            &IntegrateOpts::default(),
        )
        .unwrap();
        let args = traj.unwrapped_args();
        for (i, &(u, p)) in traj.samples.iter().enumerate().step_by(13) {
            worst = worst
                .max((radial_solution(&cc, u) - p.lambda().norm()).abs())
                .max((angular_solution(k2, lam.arg(), u) - args[i]).abs())
                .max((x0 * (1.0 - px * integral_lambda_sq(&cc, u)).powi(2) - p.x).abs());
        }
    }
    suite(
        "closed-form-vs-ode",
        worst <= 1e-6,
        format!("max deviation {worst:.3e} over {count} starts (tol 1e-6)"),
    )
}

fn blowup_consistency(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_ode = 0.0f64;
    let mut worst_limit = 0.0f64;
    let mut cases = 0;
    while cases < 8 {
        let (alpha, lam, _) = random_start(&mut rng);
        let x0 = rng.gen_range(0.001..0.4);
        let mu = projection_measure(alpha).unwrap();
        let init = InitialData::new(lam, x0);
        let Ok(t_star) = blowup_time(&mu, &init) else {
            continue;
        };
        let p0 = initial_phase_point(&mu, &init).unwrap();
        let traj = integrate(
            &p0,
            x0 * p0.p_x * p0.p_x,
            t_star + 1.0,
            &IntegrateOpts::default(),
        )
        .unwrap();
        if let TrajectoryStatus::BlewUp { u } = traj.status {
            worst_ode = worst_ode.max((u - t_star).abs());
        } else {
            return suite("blowup-consistency", false, "no numerical blow-up".into());
        }
        worst_limit = worst_limit.max(
            (blowup_time_limit(&mu, &InitialData::new(lam, 1e-8)).unwrap()
                - t_alpha(alpha, lam))
            .abs(),
        );
        cases += 1;
    }
    suite(
        "blowup-consistency",
        worst_ode <= 1e-4 && worst_limit <= 1e-6,
        format!("ode dev {worst_ode:.3e} (tol 1e-4), limit dev {worst_limit:.3e} (tol 1e-6)"),
    )
}

fn region_identity() -> SuiteResult {
    let mut worst_mod = 0.0f64;
    let mut worst_t = 0.0f64;
    let mut crossings = 0;
    for &(t, alpha) in &[(1.0, 0.8), (3.2, 0.8)] {
        let sigma = boundary_sigma(t, alpha, 1024).unwrap();
        let omega = boundary_omega(t, alpha, 1024).unwrap();
        for &z in &sigma.points {
            let fz = f_map(t, alpha, z).unwrap();
            let rhs = alpha * z.norm_sqr()
                / (alpha * z.norm_sqr() + (1.0 - alpha) * (c(1.0, 0.0) - z).norm_sqr());
            worst_mod = worst_mod.max((fz.norm_sqr() - rhs).abs());
            worst_t = worst_t.max((t_alpha(alpha, z) - t).abs());
        }
        crossings += self_intersections(&sigma) + self_intersections(&omega);
    }
    suite(
        "region-identity",
        worst_mod <= 1e-9 && worst_t <= 1e-8 && crossings == 0,
        format!("modulus {worst_mod:.3e}, |T−t| {worst_t:.3e}, {crossings} crossings"),
    )
}

fn lemma_positivity(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_val = f64::INFINITY;
    for _ in 0..10_000 {
        let t = rng.gen_range(0.0..10.0) + 1e-9;
        let alpha = rng.gen_range(0.01..0.99);
        min_val = min_val.min(g_func(t, rng.gen_range(0.0..=1.0)));
        let x = 2.0 * (alpha - 1.0) + (1.0 - alpha) * rng.gen_range(0.0..=1.0);
        min_val = min_val.min(psi_func(t, alpha, x));
    }
    suite(
        "lemma-positivity",
        min_val > 0.0,
        format!("min of g and psi over 1e4 samples: {min_val:.3e}"),
    )
}

fn separation(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    for _ in 0..20 {
        let t = rng.gen_range(0.2..8.0);
        let alpha = rng.gen_range(0.05..0.95);
        min_margin = min_margin.min(separation_check(t, alpha, 400).unwrap().min_margin);
    }
    suite(
        "separation",
        min_margin > 0.0,
        format!("min margin {min_margin:.3e} over 20 configs"),
    )
}

fn inverse_roundtrip(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for &alpha in &[0.3, 0.8] {
        let region = OmegaRegion::build(1.0, alpha, 1024).unwrap();
        let mut tested = 0;
        while tested < 25 {
            let lam = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if lam.norm() < 1e-2 || region.query(lam) != RegionQuery::Outside {
                continue;
            }
            tested += 1;
            for z in f_inverse(1.0, alpha, lam).unwrap() {
                worst = worst.max((f_map(1.0, alpha, z).unwrap() - lam).norm());
            }
        }
    }
    suite(
        "inverse-roundtrip",
        worst <= defaults::TOL_INVERSE,
        format!("max residual {worst:.3e} (tol {:.0e})", defaults::TOL_INVERSE),
    )
}

fn mobius_roundtrip(seed: u64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let alpha = rng.gen_range(0.05..0.95);
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if (z - c(1.0, 0.0)).norm() < 1e-2 {
            continue;
        }
        let w = mobius(alpha, z).unwrap();
        worst = worst.max((mobius_inv(alpha, w).unwrap() - z).norm());
    }
    suite(
        "mobius-roundtrip",
        worst <= 1e-13,
        format!("max residual {worst:.3e} (tol 1e-13)"),
    )
}

fn harmonicity() -> SuiteResult {
    let grid = GridSpec::new(-3.0, 3.0, 101, -3.0, 3.0, 101).unwrap();
    let field = laplacian_field(1.0, 0.5, &grid, 1024, defaults::FIELD_EXCLUSION).unwrap();
    let h = grid.h_re();
    let worst = field
        .laplacian
        .iter()
        .filter(|l| l.is_finite())
        .fold(0.0f64, |acc, l| acc.max(l.abs()));
    suite(
        "harmonicity",
        worst <= 10.0 * h * h,
        format!("max |laplacian| {worst:.3e} at h = {h} (tol {:.3e})", 10.0 * h * h),
    )
}

fn rmt_containment(seed: u64) -> SuiteResult {
    let (t, alpha) = (1.0, 0.5);
    let cfg = SimConfig::new(256, t, 400, seed, 8).unwrap();
    let samples = simulate_ubm(&cfg).unwrap();
    let cloud = eigencloud_from_samples(&samples, &cfg, alpha).unwrap();
    let region = OmegaRegion::build(t, alpha, 2048).unwrap();
    let nonzero = cloud.nonzero(1e-8);
    let inside = nonzero
        .iter()
        .filter(|&&z| region.contains_dilated(z, defaults::MARGIN))
        .count();
    let frac = inside as f64 / nonzero.len() as f64;
    let (emp, _) = empirical_s_from_samples(&samples, &cfg, alpha, c(3.0, 0.0), 0.0).unwrap();
    let dev = (emp - s_t(t, alpha, c(3.0, 0.0)).unwrap()).abs();
    suite(
        "rmt-containment",
        frac >= 0.99 && dev <= 0.05,
        format!("inside fraction {frac:.4} (>= 0.99), empirical-S dev {dev:.3e} (tol 0.05)"),
    )
}

fn rmt_first_moment(seed: u64) -> SuiteResult {
    let cfg = SimConfig::new(64, 1.0, 700, seed, 100).unwrap();
    let (mean, _) = mean_trace_y(&cfg).unwrap();
    let expect = (-0.5f64).exp();
    let tol = 3.0 / (64.0f64 * 100.0).sqrt();
    suite(
        "rmt-first-moment",
        (mean - expect).abs() <= tol,
        format!("tau(Y_1) = {mean:.5} vs e^(-1/2) = {expect:.5} (tol {tol:.3e})"),
    )
}

fn rmt_moment_flow(seed: u64) -> SuiteResult {
    let cfg = SimConfig::new(256, 1.0, 256, seed, 64).unwrap();
    let queries = [
        (c(0.5, 0.0), 1),
        (c(0.5, 0.0), 2),
        (c(1.0, 1.0), 1),
        (c(1.0, 1.0), 2),
    ];
    let reports = moment_flow_check_batch(&cfg, 0.5, &queries).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for (q, r) in queries.iter().zip(&reports) {
        ok &= r.residual < 3.0 * r.std_err;
        detail.push_str(&format!(
            "λ={} n={}: {:.2e}/{:.2e}; ",
            q.0,
            q.1,
            r.residual,
            3.0 * r.std_err
        ));
    }
    suite("rmt-moment-flow", ok, detail)
}

fn rmt_kernel_and_reproducibility(seed: u64) -> SuiteResult {
    let cfg = SimConfig::new(64, 0.5, 400, seed, 4).unwrap();
    let alpha = 0.37;
    let a = eigencloud_from_samples(&simulate_ubm(&cfg).unwrap(), &cfg, alpha).unwrap();
    let b = eigencloud_from_samples(&simulate_ubm(&cfg).unwrap(), &cfg, alpha).unwrap();
    let identical = a
        .eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .all(|(x, y)| x == y);
    let rank = rank_of(alpha, 64);
    let kernel_ok = (0..4).all(|rep| {
        a.eigenvalues[rep * 64..(rep + 1) * 64]
            .iter()
            .filter(|z| z.norm() <= 1e-8)
            .count()
            >= 64 - rank
    });
    suite(
        "rmt-kernel-reproducibility",
        identical && kernel_ok,
        format!("bit-identical reruns: {identical}; kernel multiplicity ok: {kernel_ok}"),
    )
}

fn rmt_step_halving(seed: u64) -> SuiteResult {
    let lam = c(3.0, 0.0);
    let run = |steps: usize| {
        let cfg = SimConfig::new(128, 0.5, steps, seed, 32).unwrap();
        let samples = simulate_ubm(&cfg).unwrap();
        empirical_s_from_samples(&samples, &cfg, 0.5, lam, 0.0).unwrap()
    };
    let (coarse, se) = run(200);
    let (fine, se2) = run(400);
    let dev = (coarse - fine).abs();
    let bound = se.max(se2);
    suite(
        "rmt-step-halving",
        dev <= bound,
        format!("|S(dt) − S(dt/2)| = {dev:.3e} vs MC se {bound:.3e}"),
    )
}

pub fn run_checks(level: &str, seed: u64) -> Vec<SuiteResult> {
    let mut results = vec![
        spectral_identities(seed),
        conservation(seed.wrapping_add(1), 12),
        closed_vs_ode(seed.wrapping_add(2), 12),
        blowup_consistency(seed.wrapping_add(3)),
        region_identity(),
        lemma_positivity(seed.wrapping_add(4)),
        separation(seed.wrapping_add(5)),
        inverse_roundtrip(seed.wrapping_add(6)),
        mobius_roundtrip(seed.wrapping_add(7)),
        harmonicity(),
    ];
    if level == "full" {
        results.push(rmt_containment(seed.wrapping_add(8)));
        results.push(rmt_first_moment(seed.wrapping_add(9)));
        results.push(rmt_moment_flow(seed.wrapping_add(10)));
        results.push(rmt_kernel_and_reproducibility(seed.wrapping_add(11)));
        results.push(rmt_step_halving(seed.wrapping_add(12)));
    }
    results
}
