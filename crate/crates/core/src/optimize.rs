//! Fixed-density energy minimization over the gap simplex
//! `{d > 0, sum d = N/rho}`.
//!
//! Projected gradient descent: step along the mean-subtracted gradient
//! (which preserves the gap sum), backtrack by halving until the step
//! keeps every gap above the positivity floor and achieves an Armijo
//! decrease. Deliberately simple; adequate at desk scale and every step
//! is provably feasible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{self, ChainError, Configuration};
use crate::numerics::Tolerance;
use crate::potentials::PotentialTriple;
use crate::{flt, Scalar};

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Projected-gradient norm reached `tol.abs_tol`.
    GradientNorm,
    MaxIterations,
    /// No admissible decrease step above the stall width; reported as
    /// non-convergence, never an error.
    LineSearchStalled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeResult<T = f64> {
    pub start_config: Configuration<T>,
    pub final_config: Configuration<T>,
    pub final_energy: T,
    pub iterations: usize,
    pub converged: bool,
    /// `max_n |d_n - l| / l` at the final iterate.
    pub distance_to_equidistant: T,
    pub termination: Termination,
}

/// Minimizes the chain energy from `start` at fixed N and density.
pub fn minimize<T: Scalar>(
    start: &Configuration<T>,
    triple: &PotentialTriple<T>,
    tol: &Tolerance<T>,
) -> Result<MinimizeResult<T>, ChainError<T>> {
    Ok(minimize_traced(start, triple, tol)?.0)
}

/// Like `minimize`, also returning the accepted-energy sequence
/// (monotone non-increasing, starting at the start configuration's
/// energy).
pub fn minimize_traced<T: Scalar>(
    start: &Configuration<T>,
    triple: &PotentialTriple<T>,
    tol: &Tolerance<T>,
) -> Result<(MinimizeResult<T>, Vec<T>), ChainError<T>> {
    let n = start.n();
    let n_t = flt::<T>(n as f64);
    let ell = start.mean_gap();
    let floor = flt::<T>(1e-9) * ell;
    let stall = flt::<T>(1e-16) * ell;
    let half = flt::<T>(0.5);
    let armijo = flt::<T>(1e-4);

    let mut config = start.clone();
    let (report, mut grad) = chain::energy_and_gradient(&config, triple, tol)?;
    let mut energy_now = report.energy;
    let mut trace = vec![energy_now];

    let mut iterations = 0usize;
    let mut converged = false;
    let mut termination = Termination::MaxIterations;
    // Projected gradient, its square norm, and the accepted step of the
    // previous iterate, for the spectral trial step below.
    let mut prev: Option<(Vec<T>, T, T)> = None;

    for _ in 0..tol.max_iter {
        let mean = grad.iter().copied().sum::<T>() / n_t;
        let pg: Vec<T> = grad.iter().map(|&g| g - mean).collect();
        let norm2 = pg.iter().map(|&g| g * g).sum::<T>();
        let norm = norm2.sqrt();
        if norm <= tol.abs_tol {
            converged = true;
            termination = Termination::GradientNorm;
            break;
        }
        let g_max = pg.iter().map(|&g| g.abs()).fold(T::zero(), T::max);

        // Barzilai-Borwein trial step: with s = -a*pg_prev the quotient
        // s's/s'y collapses to a*|pg_prev|^2/(|pg_prev|^2 - pg_prev'pg).
        // Tracks the inverse curvature of the slowest active mode, which
        // a plain warm start crawls along; backtracking below keeps every
        // accepted step feasible and monotone.
        let cap = half * ell / g_max;
        let mut alpha = match &prev {
            Some((pg_prev, norm2_prev, a_prev)) => {
                let dot = pg_prev.iter().zip(&pg).map(|(&a, &b)| a * b).sum::<T>();
                let sty = *norm2_prev - dot;
                let bb = *a_prev * *norm2_prev / sty;
                if sty > T::zero() && bb.is_finite() {
                    bb.min(cap)
                } else {
                    (*a_prev + *a_prev).min(cap)
                }
            }
            None => flt::<T>(0.1) * ell / g_max,
        };
        let mut accepted = false;
        while alpha * g_max >= stall {
            let cand: Vec<T> = config
                .gaps()
                .iter()
                .zip(&pg)
                .map(|(&d, &g)| d - alpha * g)
                .collect();
            if cand.iter().all(|&d| d >= floor) {
                let cand_config = config.with_gaps(cand)?;
                let cand_energy = chain::energy(&cand_config, triple, tol)?.energy;
                if cand_energy <= energy_now - armijo * alpha * norm2 {
                    config = cand_config;
                    energy_now = cand_energy;
                    trace.push(energy_now);
                    prev = Some((pg.clone(), norm2, alpha));
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * half;
        }
        if !accepted {
            termination = Termination::LineSearchStalled;
            break;
        }
        iterations += 1;
        grad = chain::energy_and_gradient(&config, triple, tol)?.1;
    }

    let result = MinimizeResult {
        start_config: start.clone(),
        distance_to_equidistant: config.distance_to_equidistant(),
        final_energy: energy_now,
        final_config: config,
        iterations,
        converged,
        termination,
    };
    Ok((result, trace))
}

/// Repeated minimization from seeded random perturbations of the
/// equidistant configuration: gaps `l*(1 + perturbation*u)`, `u` uniform
/// in [-1, 1], renormalized to the fixed sum. Deterministic for a given
/// seed; trials run and report in order.
pub fn basin_scan<T: Scalar>(
    n: usize,
    rho: T,
    triple: &PotentialTriple<T>,
    trials: usize,
    seed: u64,
    perturbation: T,
    tol: &Tolerance<T>,
) -> Result<Vec<MinimizeResult<T>>, ChainError<T>> {
    if trials == 0 {
        return Err(ChainError::InvalidConfiguration(
            "basin_scan needs at least one trial".into(),
        ));
    }
    if !(perturbation >= T::zero() && perturbation < T::one()) {
        return Err(ChainError::InvalidConfiguration(format!(
            "perturbation must lie in [0, 1), got {perturbation}"
        )));
    }
    let reference = Configuration::equidistant(n, rho)?;
    let ell = reference.mean_gap();
    let period = reference.period();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut gaps: Vec<T> = (0..n)
            .map(|_| {
                let u: f64 = rng.random_range(-1.0..=1.0);
                ell * (T::one() + perturbation * flt(u))
            })
            .collect();
        let sum = gaps.iter().copied().sum::<T>();
        let scale = period / sum;
        for g in &mut gaps {
            *g = *g * scale;
        }
        let start = Configuration::new(n, rho, gaps)?;
        results.push(minimize(&start, triple, tol)?);
    }
    Ok(results)
}
