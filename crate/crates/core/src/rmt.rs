//! Random-matrix Monte Carlo oracle: finite-`N` unitary Brownian motion,
//! eigenvalue clouds of `Y_t·P`, empirical evaluations of `S`, and
//! moment-flow residuals.
//!
//! The process solves `dY = iY·dX − ½Y·dt` by Euler–Maruyama with a
//! Newton–Schulz retraction onto the unitary group after every step. The
//! Hermitian increment has independent complex Gaussians of variance `dt/n`
//! above the diagonal and real Gaussians of variance `dt/n` on it, so that
//! `τ(dX²) = dt` in the large-`n` limit. The projection is the fixed
//! diagonal 0/1 matrix of rank `⌊αn⌋`; freeness holds asymptotically because
//! the law of `Y` is unitarily invariant.

use ndarray::Array2;
use ndarray_linalg::{Eig, Eigh, UPLO};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use std::sync::Once;

use crate::{Complex64, Error, Result};

static BLAS_THREADS: Once = Once::new();

/// Pin BLAS to one thread (replicates parallelize over rayon instead); keeps
/// runs bit-reproducible regardless of the machine's core count.
fn init_blas() {
    BLAS_THREADS.call_once(|| {
        if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
            std::env::set_var("OPENBLAS_NUM_THREADS", "1");
        }
    });
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub t: f64,
    pub steps: usize,
    pub seed: u64,
    pub reps: usize,
}

impl SimConfig {
    pub fn new(n: usize, t: f64, steps: usize, seed: u64, reps: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("matrix size n = {n} below 2")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("t = {t} must be positive")));
        }
        if steps < 1 || reps < 1 {
            return Err(Error::invalid("steps and reps must be at least 1"));
        }
        let cfg = SimConfig {
            n,
            t,
            steps,
            seed,
            reps,
        };
        // pre-retraction unitarity drift per step: max-entry of ΔX² − dt·I
        // concentrates near 4·dt/√n, plus the deterministic dt²/4
        let dt = cfg.dt();
        let drift = 4.0 * dt / (n as f64).sqrt() + 0.25 * dt * dt;
        if drift >= 1e-3 {
            return Err(Error::invalid(format!(
                "dt = {dt} gives per-step unitarity drift ~{drift:.2e} >= 1e-3; increase steps"
            )));
        }
        Ok(cfg)
    }

    pub fn dt(&self) -> f64 {
        self.t / self.steps as f64
    }
}

/// One replicate of the simulated unitary.
#[derive(Debug, Clone)]
pub struct UbmSample {
    pub u: Array2<Complex64>,
    /// Largest observed pre-retraction drift `‖M*M − I‖_max` over all steps.
    pub max_step_drift: f64,
    /// Final `‖U*U − I‖_max` after polishing.
    pub unitarity: f64,
}

fn herm_increment(n: usize, dt: f64, rng: &mut ChaCha8Rng) -> Array2<Complex64> {
    let diag = Normal::new(0.0, (dt / n as f64).sqrt()).expect("valid sd");
    let off = Normal::new(0.0, (dt / (2.0 * n as f64)).sqrt()).expect("valid sd");
    let mut dx = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        dx[[i, i]] = Complex64::new(diag.sample(rng), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(off.sample(rng), off.sample(rng));
            dx[[i, j]] = z;
            dx[[j, i]] = z.conj();
        }
    }
    dx
}

fn max_dev_from_identity(z: &Array2<Complex64>) -> f64 {
    let n = z.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((z[[i, j]] - target).norm());
        }
    }
    worst
}

/// One Newton–Schulz retraction sweep `M ← M(3I − M*M)/2`; returns the
/// pre-sweep deviation `‖M*M − I‖_max`.
fn ns_sweep(m: &mut Array2<Complex64>) -> f64 {
    let z = m.t().mapv(|v| v.conj()).dot(m);
    let dev = max_dev_from_identity(&z);
    let n = m.nrows();
    let mut k = z.mapv(|v| -0.5 * v);
    for i in 0..n {
        k[[i, i]] += Complex64::new(1.5, 0.0);
    }
    *m = m.dot(&k);
    dev
}

fn polish_unitary(m: &mut Array2<Complex64>) -> f64 {
    for _ in 0..12 {
        let dev = ns_sweep(m);
        if dev <= 1e-12 {
            break;
        }
    }
    let z = m.t().mapv(|v| v.conj()).dot(m);
    max_dev_from_identity(&z)
}

fn euler_step(y: &mut Array2<Complex64>, dt: f64, rng: &mut ChaCha8Rng) {
    let n = y.nrows();
    let dx = herm_increment(n, dt, rng);
    // M = Y(I + iΔX − dt/2): one gemm plus an elementwise combine
    let ydx = y.dot(&dx);
    let i = Complex64::new(0.0, 1.0);
    let scale = Complex64::new(1.0 - 0.5 * dt, 0.0);
    ndarray::Zip::from(y).and(&ydx).for_each(|yv, &dv| {
        *yv = *yv * scale + i * dv;
    });
}

fn simulate_one(cfg: &SimConfig, rep: usize) -> UbmSample {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(rep as u64 + 1);
    let mut y = Array2::<Complex64>::eye(cfg.n);
    let mut max_drift = 0.0f64;
    let dt = cfg.dt();
    for _ in 0..cfg.steps {
        euler_step(&mut y, dt, &mut rng);
        max_drift = max_drift.max(ns_sweep(&mut y));
    }
    let unitarity = polish_unitary(&mut y);
    UbmSample {
        u: y,
        max_step_drift: max_drift,
        unitarity,
    }
}

/// Simulate `cfg.reps` independent unitaries. Replicates derive their RNG
/// stream from `(seed, replicate-index)` and run in parallel; output order
/// is fixed by replicate index.
pub fn simulate_ubm(cfg: &SimConfig) -> Result<Vec<UbmSample>> {
    init_blas();
    let samples: Vec<UbmSample> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| simulate_one(cfg, rep))
        .collect();
    for s in &samples {
        if s.unitarity > 1e-10 {
            return Err(Error::IntegrationFailure {
                u: cfg.t,
                reason: format!("retraction left unitarity residual {}", s.unitarity),
            });
        }
    }
    Ok(samples)
}

/// `Y·P` with `P = diag(1^rank, 0^{n−rank})`: zero out the trailing columns.
fn apply_projection(u: &Array2<Complex64>, rank: usize) -> Array2<Complex64> {
    let mut m = u.clone();
    for mut col in m.columns_mut().into_iter().skip(rank) {
        col.fill(Complex64::new(0.0, 0.0));
    }
    m
}

/// Eigenvalues of `N×N` realizations of `Y_t·P`.
#[derive(Debug, Clone)]
pub struct EigenCloud {
    /// Concatenated eigenvalues, replicate-major.
    pub eigenvalues: Vec<Complex64>,
    pub config: SimConfig,
    /// Projection rank `⌊α·n⌋`.
    pub alpha_rank: usize,
}

impl EigenCloud {
    /// Eigenvalues of modulus above `tol` (the kernel of `P` contributes at
    /// least `n − rank` zeros per replicate).
    pub fn nonzero(&self, tol: f64) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|z| z.norm() > tol)
            .collect()
    }
}

pub fn rank_of(alpha: f64, n: usize) -> usize {
    (alpha * n as f64).floor() as usize
}

/// Eigenvalue cloud from precomputed unitaries.
pub fn eigencloud_from_samples(
    samples: &[UbmSample],
    cfg: &SimConfig,
    alpha: f64,
) -> Result<EigenCloud> {
    init_blas();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} not in (0,1)")));
    }
    let rank = rank_of(alpha, cfg.n);
    let per_rep: Vec<Result<Vec<Complex64>>> = samples
        .par_iter()
        .map(|s| {
            let m = apply_projection(&s.u, rank);
            let (eigs, _) = m
                .eig()
                .map_err(|e| Error::Eigensolver(format!("zgeev: {e}")))?;
            Ok(eigs.to_vec())
        })
        .collect();
    let mut eigenvalues = Vec::with_capacity(cfg.n * cfg.reps);
    for r in per_rep {
        eigenvalues.extend(r?);
    }
    Ok(EigenCloud {
        eigenvalues,
        config: *cfg,
        alpha_rank: rank,
    })
}

/// Simulate and diagonalize `Y_t·P`.
pub fn eigencloud(cfg: &SimConfig, alpha: f64) -> Result<EigenCloud> {
    let samples = simulate_ubm(cfg)?;
    eigencloud_from_samples(&samples, cfg, alpha)
}

/// Empirical `S = τ[log(|Y_tP − λ|² + x)]` from precomputed unitaries.
/// Returns `(mean, standard error)` over replicates.
pub fn empirical_s_from_samples(
    samples: &[UbmSample],
    cfg: &SimConfig,
    alpha: f64,
    lambda: Complex64,
    x: f64,
) -> Result<(f64, f64)> {
    init_blas();
    let rank = rank_of(alpha, cfg.n);
    let values: Vec<Result<f64>> = samples
        .par_iter()
        .map(|s| {
            let mut m = apply_projection(&s.u, rank);
            for i in 0..cfg.n {
                m[[i, i]] -= lambda;
            }
            let a = m.t().mapv(|v| v.conj()).dot(&m);
            let (eigs, _) = a
                .eigh(UPLO::Upper)
                .map_err(|e| Error::Eigensolver(format!("zheev: {e}")))?;
            let mut acc = 0.0;
            for &e in eigs.iter() {
                let arg = e + x;
                if arg <= 0.0 {
                    return Err(Error::NonPositiveDenominator {
                        location: e,
                        value: arg,
                    });
                }
                acc += arg.ln();
            }
            Ok(acc / cfg.n as f64)
        })
        .collect();
    let mut vals = Vec::with_capacity(cfg.reps);
    for v in values {
        vals.push(v?);
    }
    Ok(mean_and_se(&vals))
}

/// Simulate and evaluate the empirical `S`.
pub fn empirical_s(cfg: &SimConfig, alpha: f64, lambda: Complex64, x: f64) -> Result<(f64, f64)> {
    let samples = simulate_ubm(cfg)?;
    empirical_s_from_samples(&samples, cfg, alpha, lambda, x)
}

fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean of `Re τ(Y_t)` over replicates with its standard error (the
/// large-`n` limit is `e^{−t/2}`).
pub fn mean_trace_y(cfg: &SimConfig) -> Result<(f64, f64)> {
    let samples = simulate_ubm(cfg)?;
    let vals: Vec<f64> = samples
        .iter()
        .map(|s| s.u.diag().sum().re / cfg.n as f64)
        .collect();
    Ok(mean_and_se(&vals))
}

fn trace(m: &Array2<Complex64>) -> Complex64 {
    m.diag().sum() / Complex64::new(m.nrows() as f64, 0.0)
}

/// `tr(A·B)/n` without forming the product.
fn trace_prod(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[[i, j]] * b[[j, i]];
        }
    }
    acc / Complex64::new(n as f64, 0.0)
}

/// Moment-flow residual report for `d/dt τ(a_{t,λ}ⁿ)`.
#[derive(Debug, Clone, Copy)]
pub struct MomentFlowReport {
    /// Monte Carlo mean of the centered time difference.
    pub derivative: f64,
    /// Monte Carlo mean of the flow formula's right-hand side at `t`.
    pub rhs: f64,
    /// `|mean(derivative − rhs)|` over replicates.
    pub residual: f64,
    /// Standard error of `(derivative − rhs)`.
    pub std_err: f64,
    pub reps: usize,
}

fn moment_of(u: &Array2<Complex64>, rank: usize, lambda: Complex64, n_moment: usize) -> f64 {
    let n = u.nrows();
    let mut m = apply_projection(u, rank);
    for i in 0..n {
        m[[i, i]] -= lambda;
    }
    let a = m.t().mapv(|v| v.conj()).dot(&m);
    if n_moment == 1 {
        trace(&a).re
    } else {
        trace_prod(&a, &a).re
    }
}

fn flow_rhs(u: &Array2<Complex64>, rank: usize, lambda: Complex64, n_moment: usize) -> f64 {
    let n = u.nrows();
    let m = apply_projection(u, rank);
    let tr_m = trace(&m);
    if n_moment == 1 {
        return (lambda.conj() * tr_m).re;
    }
    let tau_h2 = rank as f64 / n as f64; // τ(P²) = τ(P)
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[[i, i]] -= lambda;
    }
    let a = shifted.t().mapv(|v| v.conj()).dot(&shifted);
    let mh = m.t().mapv(|v| v.conj());
    let term1 = (lambda.conj() * trace_prod(&a, &m)).re + (lambda * trace_prod(&a, &mh)).re;
    term1 + 2.0 * lambda.norm_sqr() * tau_h2
        - 2.0 * (lambda.conj() * lambda.conj() * tr_m * tr_m).re
}

/// Check the moment-flow identities for a batch of `(λ, n_moment)` queries
/// on a single set of Brownian paths:
///
/// ```text
/// d/dt τ(a)  = ½ τ(λ̄ m + λ m*)
/// d/dt τ(a²) = τ(a(λ̄m + λm*)) + 2|λ|² τ(h²) − 2 Re(λ̄² τ(m)²)
/// ```
///
/// with `m = Y_tP`, `a = (m−λ)*(m−λ)`. The time derivative is a centered
/// difference on a common path, replicate by replicate.
pub fn moment_flow_check_batch(
    cfg: &SimConfig,
    alpha: f64,
    queries: &[(Complex64, usize)],
) -> Result<Vec<MomentFlowReport>> {
    init_blas();
    for &(_, n_moment) in queries {
        if n_moment != 1 && n_moment != 2 {
            return Err(Error::invalid(format!(
                "n_moment = {n_moment} not in {{1, 2}}"
            )));
        }
    }
    let rank = rank_of(alpha, cfg.n);
    let dt = cfg.dt();
    let k_delta = (cfg.steps / 16).max(1);
    let delta = k_delta as f64 * dt;

    // per replicate, (fd, rhs) for each query
    let per_rep: Vec<Vec<(f64, f64)>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(rep as u64 + 1);
            let mut y = Array2::<Complex64>::eye(cfg.n);
            let mut snapshots: Vec<Array2<Complex64>> = Vec::with_capacity(3);
            let record_at = [cfg.steps - k_delta, cfg.steps, cfg.steps + k_delta];
            for step in 1..=cfg.steps + k_delta {
                euler_step(&mut y, dt, &mut rng);
                ns_sweep(&mut y);
                if record_at.contains(&step) {
                    let mut snap = y.clone();
                    polish_unitary(&mut snap);
                    snapshots.push(snap);
                }
            }
            queries
                .iter()
                .map(|&(lambda, n_moment)| {
                    let fd = (moment_of(&snapshots[2], rank, lambda, n_moment)
                        - moment_of(&snapshots[0], rank, lambda, n_moment))
                        / (2.0 * delta);
                    let rhs = flow_rhs(&snapshots[1], rank, lambda, n_moment);
                    (fd, rhs)
                })
                .collect()
        })
        .collect();

    Ok((0..queries.len())
        .map(|q| {
            let fds: Vec<f64> = per_rep.iter().map(|r| r[q].0).collect();
            let rhss: Vec<f64> = per_rep.iter().map(|r| r[q].1).collect();
            let diffs: Vec<f64> = per_rep.iter().map(|r| r[q].0 - r[q].1).collect();
            let (d_mean, _) = mean_and_se(&fds);
            let (r_mean, _) = mean_and_se(&rhss);
            let (diff_mean, diff_se) = mean_and_se(&diffs);
            MomentFlowReport {
                derivative: d_mean,
                rhs: r_mean,
                residual: diff_mean.abs(),
                std_err: diff_se,
                reps: cfg.reps,
            }
        })
        .collect())
}

/// Single-query convenience wrapper around [`moment_flow_check_batch`].
pub fn moment_flow_check(
    cfg: &SimConfig,
    alpha: f64,
    lambda: Complex64,
    n_moment: usize,
) -> Result<MomentFlowReport> {
    Ok(moment_flow_check_batch(cfg, alpha, &[(lambda, n_moment)])?[0])
}
