//! Property tests for the structural invariants.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use proptest::prelude::*;

use dtqc_core::observables::EntropyCut;
use dtqc_core::*;

fn brute_force_count(n: usize) -> usize {
    (0u32..1 << n).filter(|b| b & (b >> 1) == 0).count()
}

fn shared_basis() -> &'static Arc<ConstrainedBasis> {
    static BASIS: OnceLock<Arc<ConstrainedBasis>> = OnceLock::new();
    BASIS.get_or_init(|| Arc::new(ConstrainedBasis::enumerate(8, 4).unwrap()))
}

fn arb_state() -> impl Strategy<Value = StateVector> {
    let dim = shared_basis().dim();
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
        "zero-norm state",
        |parts| {
            let mut amplitudes: Vec<Complex64> = parts
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            for a in &mut amplitudes {
                *a /= norm;
            }
            StateVector::new(Arc::clone(shared_basis()), amplitudes).ok()
        },
    )
}

proptest! {
    #[test]
    fn enumeration_matches_brute_force(n in 2usize..=14, split in 0usize..13) {
        let n_left = 1 + split % (n - 1);
        let basis = ConstrainedBasis::enumerate(n, n_left).unwrap();
        prop_assert_eq!(basis.dim(), brute_force_count(n));
        for (k, s) in basis.states().iter().enumerate() {
            prop_assert_eq!(basis.index_of(s.bits()), Some(k));
            prop_assert_eq!(s.bits() & (s.bits() >> 1), 0);
        }
    }

    #[test]
    fn kick_preserves_norm_for_any_angle(theta in -12.0f64..12.0, psi in arb_state()) {
        for region in [Region::Left, Region::Right] {
            let phases = kick_phases(shared_basis(), theta, region);
            let kicked = apply_kick(&psi, &phases).unwrap();
            prop_assert!((kicked.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_symmetric_and_phase_invariant(
        a in arb_state(),
        b in arb_state(),
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-12);
        let rotated_amps: Vec<Complex64> = a
            .amplitudes()
            .iter()
            .map(|x| x * Complex64::from_polar(1.0, phase))
            .collect();
        let rotated = StateVector::new(Arc::clone(shared_basis()), rotated_amps).unwrap();
        prop_assert!((fidelity(&rotated, &b).unwrap() - fab).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&fab));
    }

    #[test]
    fn entropy_bounds_and_half_symmetry(psi in arb_state(), cut in 1usize..8) {
        let s = entanglement_entropy(&psi, cut).unwrap();
        let ec = EntropyCut::new(shared_basis(), cut).unwrap();
        prop_assert!(s >= -1e-12);
        prop_assert!(s <= ec.max_entropy() + 1e-9);
        // global phase invariance
        let rotated_amps: Vec<Complex64> = psi
            .amplitudes()
            .iter()
            .map(|x| x * Complex64::from_polar(1.0, 1.234))
            .collect();
        let rotated = StateVector::new(Arc::clone(shared_basis()), rotated_amps).unwrap();
        prop_assert!((entanglement_entropy(&rotated, cut).unwrap() - s).abs() < 1e-10);
    }

    #[test]
    fn magnetization_stays_in_range(psi in arb_state()) {
        for convention in [Convention::Spin, Convention::Density] {
            let m = staggered_magnetization(&psi, convention);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&m));
        }
        // spin = 2 × density on even chains
        let spin = staggered_magnetization(&psi, Convention::Spin);
        let density = staggered_magnetization(&psi, Convention::Density);
        prop_assert!((spin - 2.0 * density).abs() < 1e-12);
    }

    #[test]
    fn labeling_survives_frequency_rescaling(
        f_left in 0.5f64..3.0,
        ratio in 1.05f64..2.5,
        k1 in -3i32..=3,
        k2 in -3i32..=3,
    ) {
        let f_right = f_left * ratio;
        let omega = 0.5 * (k1 as f64 * f_left + k2 as f64 * f_right);
        prop_assume!(omega > 0.05);
        let tolerance = 1e-6 * f_left;
        for scale in [1.0f64, 2.0] {
            let peaks = [Peak { omega: omega * scale, amplitude: 1.0 }];
            let labeled = label_peaks(&peaks, f_left * scale, f_right * scale, 4, tolerance * scale);
            let label = labeled[0].label.expect("exact lattice point must label");
            // the chosen label reproduces the peak position even when the
            // lattice is degenerate at this ratio
            let predicted =
                0.5 * (label.k1 as f64 * f_left + label.k2 as f64 * f_right) * scale;
            prop_assert!((predicted - omega * scale).abs() <= tolerance * scale * (1.0 + 1e-9));
        }
    }

    #[test]
    fn evolution_preserves_norm_and_energy(dts in proptest::collection::vec(0.0f64..2.0, 1..6)) {
        static SIM: OnceLock<Simulator> = OnceLock::new();
        let sim = SIM.get_or_init(|| {
            Simulator::new(&ChainParameters::golden(8, 4.74)).unwrap()
        });
        let decomp = sim.decomposition().unwrap();
        let mut state = named_state(sim.basis(), NamedState::Z2).unwrap();
        let e0 = sim.hamiltonian().expectation(state.amplitudes());
        for dt in dts {
            state = decomp.evolve_interval(&state, dt);
        }
        prop_assert!((state.norm() - 1.0).abs() < 1e-12);
        let e = sim.hamiltonian().expectation(state.amplitudes());
        prop_assert!((e - e0).abs() < 1e-9);
    }
}
