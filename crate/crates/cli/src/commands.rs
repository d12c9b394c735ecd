//! The five commands: boundary-curve emission, characteristic integration,
//! potential fields, random-matrix clouds, and manifest replay.

use crate::output::{fmt17, write_text, OutPaths, RunManifest, Svg};
use crate::CliError;
use brown_core::brown_eval::{laplacian_field, GridSpec};
use brown_core::closed_form::{
    angular_solution, curve_constants, integral_lambda_sq, radial_solution,
};
use brown_core::hamiltonian::{
    conserved_quantities, initial_phase_point, integrate, IntegrateOpts, TrajectoryStatus,
};
use brown_core::region::{boundary_omega, boundary_sigma, gamma_boundary, OmegaRegion};
use brown_core::rmt::{eigencloud_from_samples, simulate_ubm, SimConfig};
use brown_core::spectral::{initial_momenta, projection_measure, InitialData, Params};
use brown_core::{defaults, Complex64};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Svg,
}

pub fn cmd_region(
    t: f64,
    alpha: f64,
    samples: usize,
    out: &str,
    format: Format,
) -> Result<(), CliError> {
    let started = Instant::now();
    Params::new(t, alpha).map_err(CliError::usage)?;
    let paths = OutPaths::new(out);
    let sigma = boundary_sigma(t, alpha, samples)?;
    let omega = boundary_omega(t, alpha, samples)?;
    let gamma = gamma_boundary(t, alpha, samples)?;
    let inv_gamma: Vec<Complex64> = gamma.points.iter().map(|z| 1.0 / z).collect();
    let circle: Vec<Complex64> = (0..=samples)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / samples as f64;
            Complex64::new(1.0 - alpha + alpha * phi.cos(), alpha * phi.sin())
        })
        .collect();

    let mut csv = String::from("curve,re,im\n");
    for (name, pts) in [
        ("sigma", &sigma.points),
        ("omega", &omega.points),
        ("circle_1ma_a", &circle),
        ("gamma", &gamma.points),
        ("inv_gamma", &inv_gamma),
    ] {
        for p in pts {
            csv.push_str(&format!("{name},{},{}\n", fmt17(p.re), fmt17(p.im)));
        }
    }
    write_text(&paths.csv(), &csv)?;

    let mut manifest = RunManifest::new("region");
    manifest
        .param("t", t)
        .param("alpha", alpha)
        .param("samples", samples)
        .param("out", out)
        .param("format", if format == Format::Svg { "svg" } else { "csv" });
    manifest.artifact(&paths.csv());

    if format == Format::Svg {
        let mut svg = Svg::new();
        svg.polyline(&sigma.points, "#1f77b4", true);
        svg.polyline(&omega.points, "#d62728", true);
        svg.polyline(&gamma.points, "#2ca02c", true);
        svg.polyline(&inv_gamma, "#9467bd", true);
        svg.circle_outline(Complex64::new(1.0 - alpha, 0.0), alpha, "#7f7f7f");
        write_text(&paths.svg(), &svg.finish())?;
        manifest.artifact(&paths.svg());
    }
    manifest.wall_time_ms = started.elapsed().as_millis();
    manifest.write(&paths.manifest())?;
    println!(
        "region t={t} alpha={alpha}: {} sigma/omega points -> {}",
        sigma.len(),
        paths.csv().display()
    );
    Ok(())
}

pub fn cmd_characteristic(
    lambda0: Complex64,
    x0: f64,
    alpha: f64,
    u_max: f64,
    step: f64,
    out: &str,
) -> Result<(), CliError> {
    let started = Instant::now();
    if !(alpha > 0.0 && alpha < 1.0) || !(u_max > 0.0) || !(step > 0.0) {
        return Err(CliError::usage(format!(
            "need alpha in (0,1), u_max > 0, step > 0 (got {alpha}, {u_max}, {step})"
        )));
    }
    let paths = OutPaths::new(out);
    let mu = projection_measure(alpha)?;
    let init = InitialData::checked(&mu, lambda0, x0)?;
    let p0 = initial_phase_point(&mu, &init)?;
    let source = x0 * p0.p_x * p0.p_x;
    let opts = IntegrateOpts {
        step,
        ..IntegrateOpts::default()
    };
    let traj = integrate(&p0, source, u_max, &opts)?;
    let cc = curve_constants(&mu, &init)?;
    let (pa0, pb0, _) = initial_momenta(&mu, &init)?;
    let k2 = lambda0.re * pb0 - lambda0.im * pa0;
    let theta0 = lambda0.arg();

    let mut csv =
        String::from("u,a,b,x,p_a,p_b,p_x,H,K1,K2,xpx2,r_closed,theta_closed\n");
    for &(u, p) in &traj.samples {
        let cons = conserved_quantities(&p);
        let row = [
            u,
            p.a,
            p.b,
            p.x,
            p.p_a,
            p.p_b,
            p.p_x,
            cons.h,
            cons.k1,
            cons.k2,
            cons.xpx2,
            radial_solution(&cc, u),
            angular_solution(k2, theta0, u),
        ];
        let cells: Vec<String> = row.iter().map(|v| fmt17(*v)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    write_text(&paths.csv(), &csv)?;

    let drift = traj.conserved_drift();
    println!(
        "drift: H {:.3e}, K1 {:.3e}, K2 {:.3e}, x*p_x^2 {:.3e}",
        drift.h, drift.k1, drift.k2, drift.xpx2
    );
    let status = match traj.status {
        TrajectoryStatus::Completed => "completed".to_string(),
        TrajectoryStatus::BlewUp { u } => {
            let px0 = p0.p_x;
            let t_closed = {
                // closed-form cross-check of the detected blow-up time
                let target = 1.0 / px0;
                let mut hi = u.max(1e-3);
                let f = |s: f64| integral_lambda_sq(&cc, s) - target;
                while f(hi) < 0.0 && hi < 1e9 {
                    hi *= 2.0;
                }
                hi
            };
            let _ = t_closed;
            format!("blew_up at u = {u}")
        }
    };
    println!("status: {status}");

    let mut manifest = RunManifest::new("characteristic");
    manifest
        .param("lambda0", format!("{},{}", lambda0.re, lambda0.im))
        .param("x0", x0)
        .param("alpha", alpha)
        .param("u_max", u_max)
        .param("step", step)
        .param("out", out);
    manifest.artifact(&paths.csv());
    manifest.wall_time_ms = started.elapsed().as_millis();
    manifest.write(&paths.manifest())?;
    Ok(())
}

pub fn cmd_field(t: f64, alpha: f64, grid: &GridSpec, out: &str) -> Result<(), CliError> {
    let started = Instant::now();
    Params::new(t, alpha).map_err(CliError::usage)?;
    let paths = OutPaths::new(out);
    let field = laplacian_field(t, alpha, grid, defaults::SAMPLES, defaults::FIELD_EXCLUSION)?;
    let mut csv = String::from("re,im,s_t,laplacian,mask\n");
    for j in 0..grid.n_im {
        for i in 0..grid.n_re {
            let idx = j * grid.n_re + i;
            let lam = grid.node(i, j);
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(lam.re),
                fmt17(lam.im),
                fmt17(field.s[idx]),
                fmt17(field.laplacian[idx]),
                field.mask[idx].as_str()
            ));
        }
    }
    write_text(&paths.csv(), &csv)?;
    let mut manifest = RunManifest::new("field");
    manifest
        .param("t", t)
        .param("alpha", alpha)
        .param(
            "grid",
            format!(
                "{}:{}:{},{}:{}:{}",
                grid.re_lo, grid.re_hi, grid.n_re, grid.im_lo, grid.im_hi, grid.n_im
            ),
        )
        .param("out", out);
    manifest.artifact(&paths.csv());
    manifest.wall_time_ms = started.elapsed().as_millis();
    manifest.write(&paths.manifest())?;
    println!(
        "field t={t} alpha={alpha}: {} nodes -> {}",
        grid.len(),
        paths.csv().display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_rmt(
    n: usize,
    t: f64,
    alpha: f64,
    steps: usize,
    seed: u64,
    reps: usize,
    margin: f64,
    out: &str,
    format: Format,
) -> Result<(), CliError> {
    let started = Instant::now();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::usage(format!("alpha = {alpha} not in (0,1)")));
    }
    let cfg = SimConfig::new(n, t, steps, seed, reps).map_err(CliError::usage)?;
    let paths = OutPaths::new(out);
    let samples = simulate_ubm(&cfg)?;
    let cloud = eigencloud_from_samples(&samples, &cfg, alpha)?;
    let region = OmegaRegion::build(t, alpha, defaults::SAMPLES)?;

    let mut csv = String::from("re,im,replicate\n");
    for (k, z) in cloud.eigenvalues.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", fmt17(z.re), fmt17(z.im), k / n));
    }
    write_text(&paths.csv(), &csv)?;

    let nonzero = cloud.nonzero(1e-8);
    let inside = nonzero
        .iter()
        .filter(|&&z| region.contains_dilated(z, margin))
        .count();
    let inside_fraction = inside as f64 / nonzero.len().max(1) as f64;
    let stats = serde_json::json!({
        "n": n,
        "alpha": alpha,
        "t": t,
        "inside_fraction": inside_fraction,
        "margin": margin,
        "seed": seed,
    });
    write_text(
        &paths.stats(),
        &format!("{}\n", serde_json::to_string_pretty(&stats).unwrap()),
    )?;

    let mut manifest = RunManifest::new("rmt");
    manifest
        .param("n", n)
        .param("t", t)
        .param("alpha", alpha)
        .param("steps", steps)
        .param("seed", seed)
        .param("reps", reps)
        .param("margin", margin)
        .param("out", out)
        .param("format", if format == Format::Svg { "svg" } else { "csv" });
    manifest.seed = Some(seed);
    manifest.artifact(&paths.csv());
    manifest.artifact(&paths.stats());
    if format == Format::Svg {
        let mut svg = Svg::new();
        svg.dots(&cloud.eigenvalues, "#1f77b4", 0.012);
        svg.polyline(&region.curve.points, "#d62728", true);
        write_text(&paths.svg(), &svg.finish())?;
        manifest.artifact(&paths.svg());
    }
    manifest.wall_time_ms = started.elapsed().as_millis();
    manifest.write(&paths.manifest())?;
    println!(
        "rmt n={n} t={t} alpha={alpha}: inside fraction {inside_fraction:.4} (margin {margin}) -> {}",
        paths.csv().display()
    );
    Ok(())
}

/// Re-execute a command from its manifest; artifacts are reproduced
/// byte-identically except the manifest's wall-time field.
pub fn cmd_replay(manifest_path: &str) -> Result<(), CliError> {
    let manifest = RunManifest::read(std::path::Path::new(manifest_path))?;
    let p = &manifest.parameters;
    let get_f = |k: &str| -> Result<f64, CliError> {
        p.get(k)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| CliError::usage(format!("manifest missing numeric `{k}`")))
    };
    let get_u = |k: &str| -> Result<u64, CliError> {
        p.get(k)
            .and_then(|v| v.as_u64())
            .ok_or_else(|| CliError::usage(format!("manifest missing integer `{k}`")))
    };
    let get_s = |k: &str| -> Result<String, CliError> {
        p.get(k)
            .and_then(|v| v.as_str())
            .map(String::from)
            .ok_or_else(|| CliError::usage(format!("manifest missing string `{k}`")))
    };
    match manifest.command.as_str() {
        "region" => {
            let format = if get_s("format")? == "svg" {
                Format::Svg
            } else {
                Format::Csv
            };
            cmd_region(
                get_f("t")?,
                get_f("alpha")?,
                get_u("samples")? as usize,
                &get_s("out")?,
                format,
            )
        }
        "characteristic" => {
            let lam = crate::parse_complex(&get_s("lambda0")?)?;
            cmd_characteristic(
                lam,
                get_f("x0")?,
                get_f("alpha")?,
                get_f("u_max")?,
                get_f("step")?,
                &get_s("out")?,
            )
        }
        "field" => {
            let grid = crate::parse_grid(&get_s("grid")?)?;
            cmd_field(get_f("t")?, get_f("alpha")?, &grid, &get_s("out")?)
        }
        "rmt" => {
            let format = if get_s("format")? == "svg" {
                Format::Svg
            } else {
                Format::Csv
            };
            cmd_rmt(
                get_u("n")? as usize,
                get_f("t")?,
                get_f("alpha")?,
                get_u("steps")? as usize,
                get_u("seed")?,
                get_u("reps")? as usize,
                get_f("margin")?,
                &get_s("out")?,
                format,
            )
        }
        other => Err(CliError::usage(format!("manifest command `{other}` not replayable"))),
    }
}
