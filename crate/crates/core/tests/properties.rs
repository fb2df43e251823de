use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use hybridsim::algebra::{
    compose_displacements, displacement_operator, embed, fock_state, loop_phase, matrix_exponential,
    DisplacementRecord, Factor, HilbertSpace, OperatorMatrix, C64,
};
use hybridsim::circuit::{
    balance_residual, build_switch_circuit, reduce_switch_coupling, secular_modes, CircuitParams,
    SwitchParams,
};
use hybridsim::config::Params;
use hybridsim::constants::MASS_BE9;
use hybridsim::dissipation::{log_grid, spectral_pipeline, BathSpec};
use hybridsim::gate::{canonical_schedule, run_gate_fock, GateOptions, IonParams, MotionModel};
use hybridsim::noise::{
    filter_variance, stochastic_phase, synthesize_trajectory, FlipProtocol, NoiseModel,
    NoiseTrajectory,
};

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn hermitian(n: usize) -> impl Strategy<Value = DMatrix<C64>> {
    proptest::collection::vec(complex(), n * n).prop_map(move |v| {
        let m = DMatrix::from_vec(n, n, v);
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    })
}

fn record() -> impl Strategy<Value = DisplacementRecord> {
    (complex(), -PI..PI).prop_map(|(a, p)| DisplacementRecord::new(a, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian_generators_give_unitaries(h in hermitian(6), t in -5.0..5.0f64) {
        let op = OperatorMatrix::hermitian(h).unwrap();
        let u = matrix_exponential(&op, C64::new(0.0, -t)).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-9);
    }

    #[test]
    fn displacement_composition_is_associative(a in record(), b in record(), c in record()) {
        let left = compose_displacements(compose_displacements(a, b), c);
        let right = compose_displacements(a, compose_displacements(b, c));
        prop_assert!((left.alpha - right.alpha).norm() < 1e-12);
        prop_assert!((left.phase - right.phase).abs() < 1e-12);
        prop_assert_eq!(compose_displacements(a, DisplacementRecord::identity()), a);
        prop_assert_eq!(compose_displacements(DisplacementRecord::identity(), a), a);
    }

    #[test]
    fn loop_phase_matches_fock_product(betas in proptest::collection::vec(
        (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(r, i)| C64::new(r, i)), 1..4)) {
        let mut steps = betas.clone();
        steps.push(-betas.iter().sum::<C64>());
        let space = HilbertSpace::new(64).unwrap();
        let mut u = OperatorMatrix::identity(64);
        for b in &steps {
            u = displacement_operator(*b, &space).unwrap().mul(&u).unwrap();
        }
        let vac = fock_state(0, 64).unwrap();
        let amp = (vac.adjoint() * u.entries() * &vac)[(0, 0)];
        let want = loop_phase(&steps).phase;
        let diff = (amp.arg() - want + PI).rem_euclid(2.0 * PI) - PI;
        prop_assert!(diff.abs() < 1e-6, "{} vs {}", amp.arg(), want);
    }

    #[test]
    fn embedding_is_a_homomorphism(a in hermitian(4), b in hermitian(4)) {
        let space = HilbertSpace::new(4).unwrap();
        let (a, b) = (OperatorMatrix::new(a), OperatorMatrix::new(b));
        let lhs = embed(&space, Factor::Motion, &a.mul(&b).unwrap()).unwrap();
        let rhs = embed(&space, Factor::Motion, &a).unwrap()
            .mul(&embed(&space, Factor::Motion, &b).unwrap()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn balance_residual_antisymmetric(v in -1.0..1.0f64, vb in -1.0..1.0f64) {
        let p = CircuitParams::default();
        let plus = balance_residual(&p, v, vb).unwrap();
        let minus = balance_residual(&p, -v, -vb).unwrap();
        prop_assert_eq!(plus, -minus);
    }

    #[test]
    fn switch_kappa_even_about_half_flux(f in 0.0..0.49f64, ratio in 100.0..2000.0f64) {
        let p = CircuitParams::default();
        let s = |flux: f64| SwitchParams { e_ja: ratio * p.e_j, flux_ratio: flux };
        let a = reduce_switch_coupling(&p, &s(f)).unwrap().kappa;
        let b = reduce_switch_coupling(&p, &s(1.0 - f)).unwrap().kappa;
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
        prop_assert_eq!(reduce_switch_coupling(&p, &s(0.5)).unwrap().kappa, 0.0);
    }

    #[test]
    fn switch_has_one_uniform_zero_mode(ratio in 100.0..5000.0f64, c_m in 0.5e-16..5e-16f64) {
        let p = CircuitParams { c_m, ..CircuitParams::default() };
        let s = SwitchParams { e_ja: ratio * p.e_j, flux_ratio: 0.0 };
        let (freqs, vecs) = secular_modes(&build_switch_circuit(&p, &s).unwrap());
        let zero = freqs.iter().filter(|w| w.abs() < 1e-6 * freqs.max()).count();
        prop_assert_eq!(zero, 1);
        let u = 1.0 / 3f64.sqrt();
        prop_assert!(vecs.column(0).iter().all(|x| (x - u).abs() < 1e-10));
    }

    #[test]
    fn unknown_config_keys_are_rejected(key in "[a-z]{3,10}_[a-z]{2,6}") {
        prop_assume!(!Params::default().values().contains_key(&key));
        let doc = format!("{key} = 1\n");
        prop_assert!(Params::parse_str(&doc).is_err());
    }

    #[test]
    fn spectral_density_nonnegative(r_r in 1e-3..10.0f64, temp in 0.01..1.0f64) {
        let c = CircuitParams::default();
        let bath = BathSpec::from_circuit(&c, r_r, temp).unwrap();
        let grid = log_grid(1e-3 * bath.omega_r(), 1e-1 * bath.omega_r(), 7);
        let result = spectral_pipeline(&bath, &grid).unwrap();
        prop_assert!(result.j_eff.iter().all(|j| *j >= 0.0));
    }
}

fn noise_model(amplitude: f64) -> NoiseModel {
    let c = CircuitParams::default();
    let lambda = NoiseModel::coupling_from(c.e_c, c.c_g);
    NoiseModel::one_over_f(amplitude, 2.0 * PI * 1e3, 2.0 * PI * 10e9, lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn constant_offset_leaves_phase_unchanged(seed in any::<u64>(), offset in -1e-3..1e-3f64) {
        let model = noise_model(1e-12);
        let protocol = FlipProtocol::new(1e-9, 20e-9).unwrap();
        let traj = synthesize_trajectory(&model, 20e-9, 5e-12, seed).unwrap();
        let shifted = NoiseTrajectory {
            values: traj.values.iter().map(|v| v + offset).collect(),
            ..traj.clone()
        };
        let a = stochastic_phase(&traj, &protocol, &model).unwrap();
        let b = stochastic_phase(&shifted, &protocol, &model).unwrap();
        let scale = model.coupling * 20e-9 * (offset.abs() + traj.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
        let same = synthesize_trajectory(&model, 20e-9, 5e-12, seed).unwrap();
        prop_assert_eq!(same.values, traj.values);
    }

    #[test]
    fn halving_flip_interval_never_increases_variance(k in 1u32..5, amplitude in 1e-14..1e-10f64) {
        let model = noise_model(amplitude);
        let t = 64e-9;
        let tau = t / f64::from(2u32.pow(k));
        let coarse = filter_variance(&model, &FlipProtocol::new(tau, t).unwrap()).unwrap();
        let fine = filter_variance(&model, &FlipProtocol::new(tau / 2.0, t).unwrap()).unwrap();
        prop_assert!(fine <= coarse, "{fine:e} > {coarse:e}");
    }

    #[test]
    fn reversing_kicks_flips_alpha(n1 in 1i64..5, n2 in 1i64..5, tau in 0.3e-9..1e-9f64) {
        let (n1, n2) = (2 * n1, 2 * n2);
        let ion = IonParams::new(MASS_BE9, 2.0 * PI * 1e6, 1e6).unwrap();
        let kappa = 0.3 / (ion.length_scale(ion.trap_frequency) * 1e-9);
        let t1 = 4e-9;
        let s = canonical_schedule(n1, n2, tau, t1, n1 as f64 * t1 / n2 as f64).unwrap();
        let space = HilbertSpace::new(48).unwrap();
        let psi = fock_state(0, 48).unwrap();
        for motion in [MotionModel::Harmonic, MotionModel::FreeParticle] {
            let opts = GateOptions { motion, reduced_josephson: None };
            let a = run_gate_fock(&s, &ion, kappa, &space, &psi, &opts).unwrap();
            let b = run_gate_fock(&s.with_reversed_kicks(), &ion, kappa, &space, &psi, &opts).unwrap();
            prop_assert!((a.alpha + b.alpha).abs() < 1e-9);
            prop_assert!(a.total_unitary.unitarity_defect() < 1e-9);
            prop_assert!((0.0..=1.0).contains(&a.infidelity));
        }
    }
}
