//! Acceptance gate: one test per shipped guarantee, each printing a
//! single `<name>: PASS` / `<name>: FAIL` line (visible under
//! `cargo test --test acceptance -- --nocapture`) and holding a runtime
//! budget. These are the contract the rest of the workspace serves;
//! tolerances here are deliberate, not incidental.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use altchain::chain::{energy, energy_gradient, Configuration};
use altchain::criteria::{
    check_mass_ratio_window, check_sufficient_convexity, combined_transform, fourier_condition,
    mass_ratio_window, riesz_coefficients, riesz_threshold_exponent, spectrum_values,
    stability_spectrum, Verdict,
};
use altchain::numerics::{cosine_transform, Tolerance};
use altchain::optimize::basin_scan;
use altchain::potentials::{Potential, PotentialTriple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_LN_2: f64 = 1.3862943611198906;

fn gate(name: &str, budget: Duration, body: impl FnOnce()) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = started.elapsed();
    let passed = outcome.is_ok() && elapsed <= budget;
    println!("{name}: {}", if passed { "PASS" } else { "FAIL" });
    if let Err(cause) = outcome {
        resume_unwind(cause);
    }
    assert!(
        elapsed <= budget,
        "{name} took {elapsed:?}, budget {budget:?}"
    );
}

fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { hi } else { lo + step * i as f64 })
        .collect()
}

#[test]
fn critical_exponents_from_the_binary() {
    gate("critical exponents", Duration::from_secs(1), || {
        let value = |which: &str| -> f64 {
            let out = Command::new(env!("CARGO_BIN_EXE_altchain"))
                .args(["constants", "--which", which])
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "constants {which} failed");
            let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
            v["value"].as_f64().unwrap()
        };
        assert!((value("p0") - 0.655).abs() <= 5e-3);
        assert!((value("p1") - 1.46498).abs() <= 1e-5);
    });
}

#[test]
fn equidistant_coulomb_energy() {
    gate("equidistant energy", Duration::from_secs(5), || {
        let tol = Tolerance::default();
        let triple = PotentialTriple::riesz(1.0).unwrap();
        let energies: Vec<f64> = [4usize, 8, 64]
            .iter()
            .map(|&n| {
                let config = Configuration::equidistant(n, 1.0).unwrap();
                energy(&config, &triple, &tol).unwrap().energy
            })
            .collect();
        for e in &energies {
            assert!((e - TWO_LN_2).abs() <= 1e-8, "energy {e}");
        }
        for a in &energies {
            for b in &energies {
                assert!((a - b).abs() <= 1e-10, "size dependence: {a} vs {b}");
            }
        }
    });
}

#[test]
fn riesz_basins_return_to_equidistant() {
    gate("basin convergence", Duration::from_secs(300), || {
        let tol = Tolerance::default();
        let p0 = riesz_threshold_exponent(&tol).unwrap();
        let mut total = 0usize;
        let mut converged = 0usize;
        let mut seed = 100u64;
        for p in [p0 + 0.05, 1.0, 2.0, 3.0] {
            let triple = PotentialTriple::riesz(p).unwrap();
            for n in [4usize, 8, 16] {
                for rho in [0.5, 1.0, 2.0] {
                    seed += 1;
                    let results = basin_scan(n, rho, &triple, 20, seed, 0.3, &tol).unwrap();
                    for r in &results {
                        total += 1;
                        if r.converged {
                            converged += 1;
                            assert!(
                                r.distance_to_equidistant <= 1e-6,
                                "converged away from equidistant: p={p} n={n} rho={rho} \
                                 distance={}",
                                r.distance_to_equidistant
                            );
                        }
                    }
                }
            }
        }
        assert!(
            converged as f64 >= 0.95 * total as f64,
            "only {converged}/{total} trials converged"
        );
    });
}

#[test]
fn window_fidelity() {
    gate("window fidelity", Duration::from_secs(120), || {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2.0f64, 3.0, 5.0] {
            let (lo, hi) = mass_ratio_window(p).unwrap();
            let mut cases: Vec<(f64, Verdict)> = Vec::new();
            for _ in 0..50 {
                let u: f64 = rng.random_range(0.02..=0.98);
                cases.push((lo * (hi / lo).powf(u), Verdict::Pass));
            }
            for i in 0..50 {
                let factor: f64 = rng.random_range(1.05..=20.0);
                let m = if i % 2 == 0 { lo / factor } else { hi * factor };
                cases.push((m, Verdict::Fail));
            }
            for (m, expected) in cases {
                let corollary = check_mass_ratio_window(p, m).unwrap();
                assert_eq!(corollary.verdict, expected, "window check at p={p} m={m}");
                let triple = PotentialTriple::power_law(p, m).unwrap();
                let grid = check_sufficient_convexity(&triple, &tol).unwrap();
                assert_eq!(grid.verdict, expected, "grid check at p={p} m={m}");
            }
        }

        let triple = PotentialTriple::power_law(3.0, 1.0).unwrap();
        let results = basin_scan(8, 1.0, &triple, 5, 13, 0.3, &tol).unwrap();
        for r in &results {
            assert!(r.converged, "interior triple must minimize cleanly");
            assert!(r.distance_to_equidistant <= 1e-6);
        }
    });
}

#[test]
fn riesz_coefficient_signs() {
    gate("coefficient signs", Duration::from_secs(1), || {
        let tol = Tolerance::default();
        let p0 = riesz_threshold_exponent(&tol).unwrap();
        for p in [p0, 1.0, 3.0] {
            let coeffs = riesz_coefficients(p, 200).unwrap();
            assert!(coeffs[0] >= -1e-12, "a1({p}) = {}", coeffs[0]);
            for (k, a) in coeffs.iter().enumerate().skip(1) {
                assert!(*a >= 0.0, "a{}({p}) = {a}", k + 1);
            }
        }
        let below = riesz_coefficients(0.5f64, 200).unwrap();
        assert!(below[0] < 0.0);
        assert!((below[0] - (-0.277167552623314)).abs() <= 1e-9);
    });
}

#[test]
fn gradients_match_finite_differences() {
    gate("gradient consistency", Duration::from_secs(30), || {
        let tol = Tolerance::default();
        let triples = [
            PotentialTriple::riesz(1.0).unwrap(),
            PotentialTriple::power_law(2.5, 1.7).unwrap(),
            PotentialTriple {
                f12: Potential::Gaussian { c: 1.0, w: 1.0 },
                f11: Potential::Morse { d: 0.4, a: 2.0, r_e: 0.7 },
                f22: Potential::Gaussian { c: -0.6, w: 1.5 },
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut configs = 0usize;
        for triple in &triples {
            for _ in 0..7 {
                let n = [4usize, 6, 8, 12][rng.random_range(0..4)];
                let rho = [0.5, 1.0, 2.0][rng.random_range(0..3)];
                let ell = 1.0 / rho;
                let gaps: Vec<f64> = (0..n)
                    .map(|_| ell * (1.0 + 0.3 * rng.random_range(-1.0..=1.0)))
                    .collect();
                let sum: f64 = gaps.iter().sum();
                let gaps: Vec<f64> =
                    gaps.into_iter().map(|g| g * (n as f64 * ell) / sum).collect();
                let config = Configuration::new(n, rho, gaps).unwrap();
                configs += 1;

                let grad = energy_gradient(&config, triple, &tol).unwrap();
                let eps = 1e-6;
                for (i, j) in [(0usize, 1usize), (1, n - 1), (0, n / 2)] {
                    if i == j {
                        continue;
                    }
                    let mut plus = config.gaps().to_vec();
                    plus[i] += eps;
                    plus[j] -= eps;
                    let mut minus = config.gaps().to_vec();
                    minus[i] -= eps;
                    minus[j] += eps;
                    let ep = energy(&config.with_gaps(plus).unwrap(), triple, &tol)
                        .unwrap()
                        .energy;
                    let em = energy(&config.with_gaps(minus).unwrap(), triple, &tol)
                        .unwrap()
                        .energy;
                    let fd = (ep - em) / (2.0 * eps);
                    let analytic = grad[i] - grad[j];
                    let rel = (fd - analytic).abs() / analytic.abs().max(1e-3);
                    assert!(rel <= 1e-5, "n={n} rho={rho} pair ({i},{j}): rel {rel}");
                }
            }
        }
        assert!(configs >= 20, "only {configs} configurations exercised");
    });
}

#[test]
fn stable_spectra_pass_and_unstable_pairs_dimerize() {
    gate("stability and dimerization", Duration::from_secs(300), || {
        let tol = Tolerance::default();
        let riesz = PotentialTriple::riesz(1.0).unwrap();
        let q_grid = uniform_grid(0.0, std::f64::consts::PI, 256);
        for ell in [0.5, 1.0, 2.0] {
            let report = stability_spectrum(&riesz, ell, &q_grid, &tol).unwrap();
            assert_eq!(report.verdict, Verdict::Pass, "ell={ell}");
            let positive: Vec<f64> = q_grid.iter().copied().filter(|&q| q > 0.0).collect();
            let values = spectrum_values(&riesz, ell, &positive, &tol).unwrap();
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-9, "ell={ell}: spectrum dips to {min}");
        }

        let pair = PotentialTriple {
            f12: Potential::Gaussian { c: 1.0, w: 1.0 },
            f11: Potential::Gaussian { c: -1.0, w: 2.0 },
            f22: Potential::Gaussian { c: -1.0, w: 2.0 },
        };
        let k_grid = uniform_grid(0.0, 10.0, 256);
        let fourier = fourier_condition(&pair, &k_grid, &tol).unwrap();
        assert_eq!(fourier.verdict, Verdict::Fail);

        let equidistant = Configuration::equidistant(64, 10.0).unwrap();
        let reference = energy(&equidistant, &pair, &tol).unwrap().energy;
        let results = basin_scan(64, 10.0, &pair, 5, 11, 0.3, &tol).unwrap();
        let best = results
            .iter()
            .map(|r| r.final_energy)
            .fold(f64::INFINITY, f64::min);
        assert!(
            best <= reference - 1e-6,
            "no trial beat the equidistant chain: best {best}, reference {reference}"
        );
    });
}

#[test]
fn transforms_match_closed_forms() {
    gate("closed-form transforms", Duration::from_secs(10), || {
        let tol = Tolerance::default();
        let ks = [0.0, 0.5, 1.0, 2.0, 5.0];
        let half_norm = (2.0 / std::f64::consts::PI).sqrt();

        let (c, w) = (2.0f64, 1.3f64);
        let gauss = Potential::Gaussian { c, w };
        for &k in &ks {
            let got = cosine_transform(
                |x| gauss.eval(x, 0).unwrap(),
                &gauss.decay().unwrap(),
                k,
                &tol,
            )
            .unwrap();
            let want = c * w * (-(w * w) * k * k / 2.0).exp();
            assert!((got - want).abs() <= 1e-8, "gaussian at k={k}: {got} vs {want}");
        }

        let (d, a, r_e) = (0.8f64, 1.7f64, 0.9f64);
        let morse = Potential::Morse { d, a, r_e };
        for &k in &ks {
            let got = cosine_transform(
                |x| morse.eval(x, 0).unwrap(),
                &morse.decay().unwrap(),
                k,
                &tol,
            )
            .unwrap();
            let repulsive = d * (2.0 * a * r_e).exp() * (2.0 * a) / (4.0 * a * a + k * k);
            let attractive = 2.0 * d * (a * r_e).exp() * a / (a * a + k * k);
            let want = half_norm * (repulsive - attractive);
            assert!((got - want).abs() <= 1e-8, "morse at k={k}: {got} vs {want}");
        }

        // the species-weighted combination is the same machinery end to end
        let pair = PotentialTriple {
            f12: Potential::Gaussian { c: 1.0, w: 1.0 },
            f11: Potential::Gaussian { c: -1.0, w: 2.0 },
            f22: Potential::Gaussian { c: -1.0, w: 2.0 },
        };
        let at_zero = combined_transform(&pair, 0.0, &tol).unwrap();
        assert!((at_zero - (1.0 - 2.0)).abs() <= 1e-8);
    });
}
