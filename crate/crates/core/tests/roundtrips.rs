//! Property tests: serialization round-trips and the headline
//! minimality of the equidistant chain over random feasible
//! configurations.

use altchain::{energy, Configuration, PotentialTriple, Tolerance};
use proptest::prelude::*;

fn feasible_gaps(n: usize, rho: f64, raw: &[f64]) -> Vec<f64> {
    let period = n as f64 / rho;
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|g| g * period / sum).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configuration_survives_a_json_round_trip(
        half in 1usize..=6,
        rho in 0.2f64..5.0,
        raw in prop::collection::vec(0.05f64..1.0, 12),
    ) {
        let n = 2 * half;
        let gaps = feasible_gaps(n, rho, &raw[..n]);
        let config = Configuration::new(n, rho, gaps).unwrap();
        let text = serde_json::to_string(&config).unwrap();
        let back: Configuration<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(config.n(), back.n());
        prop_assert_eq!(config.rho(), back.rho());
        for (a, b) in config.gaps().iter().zip(back.gaps()) {
            prop_assert!(((a - b) / a).abs() <= 1e-15);
        }
    }

    #[test]
    fn equidistant_energy_is_a_lower_bound(
        half in 2usize..=4,
        rho in 0.5f64..2.0,
        p_pick in 0usize..2,
        raw in prop::collection::vec(0.1f64..1.0, 8),
    ) {
        let n = 2 * half;
        let p = [1.0, 2.0][p_pick];
        let triple = PotentialTriple::riesz(p).unwrap();
        let t = Tolerance::default();
        let config = Configuration::new(n, rho, feasible_gaps(n, rho, &raw[..n])).unwrap();
        let e = energy(&config, &triple, &t).unwrap().energy;
        let e_ref = energy(&Configuration::equidistant(n, rho).unwrap(), &triple, &t)
            .unwrap()
            .energy;
        prop_assert!(e >= e_ref - 1e-10, "{e} < {e_ref}");
    }
}
