mod common;

use std::f64::consts::{PI, SQRT_2};

use proptest::prelude::*;

use dpo_sim::algebra::wigner::wigner_oracle;
use dpo_sim::algebra::{
    displacement_operator, make_state, product_state, Basis, FockDim, StateSpec, StateVector, TwoModeSpace,
};
use dpo_sim::dynamics::{
    block_decompose, build_hamiltonian, evolve, evolve_backward, k_operator, propagate, rc_ramp, ConstantDetuning,
    Drive, Recording, StepPolicy, SweepPropagator,
};
use dpo_sim::harness::config::{parse_config, Experiment};
use dpo_sim::linalg::{fidelity, max_abs, CMatrix, CVector, HermitianEigen, C64};
use dpo_sim::protocols::measurement::parity_estimate;
use dpo_sim::protocols::parity::default_parity_sweep;
use dpo_sim::trap::{hz_to_angular, ModeParams};

fn small_space() -> TwoModeSpace {
    TwoModeSpace::with_dims(8, 5).unwrap()
}

/// Random normalized state supported on `K ≤ 5`, which stays clear of the
/// guard band of the 8×5 space under any evolution.
fn low_k_state() -> impl Strategy<Value = StateVector> {
    let space = small_space();
    let support: Vec<usize> = (0..space.dim()).filter(|&i| space.k_value(i) <= 5).collect();
    let n = support.len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| {
            let mut amps = CVector::zeros(space.dim());
            for (&i, (re, im)) in support.iter().zip(v) {
                amps[i] = C64::new(re, im);
            }
            StateVector::normalized(Basis::TwoMode(space), amps).unwrap()
        })
}

fn coupling() -> impl Strategy<Value = f64> {
    (200.0f64..3000.0).prop_map(hz_to_angular)
}

fn detuning() -> impl Strategy<Value = f64> {
    (-40e3f64..40e3).prop_map(hz_to_angular)
}

fn sector_weights(space: &TwoModeSpace, s: &StateVector) -> Vec<f64> {
    block_decompose(space).weights(s)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn hamiltonian_commutes_with_k(xi in coupling(), delta in detuning()) {
        let space = small_space();
        let h = build_hamiltonian(xi, delta, &space).unwrap();
        let k = k_operator(&space).unwrap();
        let hm = h.matrix().matrix();
        let km = k.matrix();
        prop_assert_eq!(max_abs(&(hm * km - km * hm)), 0.0);
    }

    #[test]
    fn evolution_conserves_k_and_norm(psi in low_k_state(), xi in coupling(), delta in detuning(), t in 1e-5f64..2e-3) {
        let space = small_space();
        let h = build_hamiltonian(xi, delta, &space).unwrap();
        let out = evolve(&psi, Drive::Hamiltonian(&h), t, &StepPolicy::new(t / 7.0).unwrap()).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-9);
        let (w0, w1) = (sector_weights(&space, &psi), sector_weights(&space, &out));
        for (a, b) in w0.iter().zip(&w1) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let blocks = block_decompose(&space);
        prop_assert!((blocks.k_expectation(&psi) - blocks.k_expectation(&out)).abs() < 1e-9);
    }

    #[test]
    fn block_evolution_matches_dense(psi in low_k_state(), xi in coupling(), delta in detuning(), t in 1e-5f64..2e-3) {
        let space = small_space();
        let h = build_hamiltonian(xi, delta, &space).unwrap();
        let dense = HermitianEigen::new(h.matrix().matrix()).evolution(t) * psi.amplitudes();
        let fixed = evolve(&psi, Drive::Hamiltonian(&h), t, &StepPolicy::new(t).unwrap()).unwrap();
        let profile = ConstantDetuning::new(delta);
        let analytic = evolve(&psi, Drive::Schedule { xi, profile: &profile }, t, &StepPolicy::new(t).unwrap()).unwrap();
        prop_assert!(1.0 - fidelity(&dense, fixed.amplitudes()) < 1e-10);
        prop_assert!(1.0 - fidelity(&dense, analytic.amplitudes()) < 1e-10);
    }

    #[test]
    fn backward_evolution_undoes_forward(psi in low_k_state(), xi in coupling()) {
        let p = hz_to_angular(35e3);
        let ramp = rc_ramp(p, -p, 100e-6, 500e-6).unwrap();
        let drive = Drive::Schedule { xi, profile: &ramp };
        let policy = StepPolicy::new(2e-6).unwrap();
        let fwd = evolve(&psi, drive, 500e-6, &policy).unwrap();
        let back = evolve_backward(&fwd, drive, 500e-6, &policy).unwrap();
        prop_assert!(1.0 - fidelity(psi.amplitudes(), back.amplitudes()) < 1e-10);
    }

    #[test]
    fn two_phonon_rabi_over_five_periods(xi in coupling()) {
        let space = small_space();
        let h = build_hamiltonian(xi, 0.0, &space).unwrap();
        let psi = product_state(&space, 2, 0).unwrap();
        let period = PI / (SQRT_2 * xi);
        let steps = 200;
        let traj = propagate(
            &psi,
            Drive::Hamiltonian(&h),
            5.0 * period,
            &StepPolicy::new(5.0 * period / steps as f64).unwrap(),
            &Recording::every_step(vec![(2, 0), (0, 1)]),
        )
        .unwrap();
        for (t, p) in traj.times.iter().zip(&traj.populations) {
            let c = (SQRT_2 * xi * t).cos().powi(2);
            prop_assert!((p[0] - c).abs() < 1e-9);
            prop_assert!((p[1] - (1.0 - c)).abs() < 1e-9);
        }
    }

    #[test]
    fn displacement_is_unitary(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let d = displacement_operator(C64::new(re, im), FockDim::new(40).unwrap()).unwrap();
        let m = d.matrix();
        prop_assert!(max_abs(&(m.adjoint() * m - CMatrix::identity(40, 40))) < 1e-9);
    }

    #[test]
    fn eta_correction_is_consistent(p in 0.0f64..=1.0) {
        for eta in [0.7, 0.86, 1.0] {
            prop_assert!((parity_estimate(eta * p, eta) - (1.0 - 2.0 * p)).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_estimate_is_bounded(p1 in 0.0f64..=1.0, eta in 0.05f64..=1.0) {
        let w = 2.0 / PI * parity_estimate(p1, eta);
        prop_assert!(w.abs() <= 2.0 / PI * (1.0 + 2.0 * (1.0 - eta) / eta) + 1e-12);
    }

    #[test]
    fn canonical_config_is_idempotent(
        fx in 0.8e6f64..1.2e6,
        fz in 0.3e6f64..0.75e6,
        r in 3usize..60,
        a in 3usize..30,
        seed in any::<u64>(),
        shots in prop::option::of(1u64..100_000),
        eta in 0.01f64..=1.0,
    ) {
        let shots = shots.map_or("\"infinite\"".to_string(), |n| n.to_string());
        let text = format!(
            "experiment = \"modes\"\n[trap]\nfreq_x = \"{fx} Hz\"\nfreq_y = \"{fx} Hz\"\nfreq_z = \"{} kHz\"\n\
             [simulation]\nradial_dim = {r}\naxial_dim = {a}\n[measurement]\neta = {eta}\nshots = {shots}\nseed = {}\n",
            fz / 1e3,
            seed as i64 & i64::MAX
        );
        let once = parse_config(&text, None).unwrap().canonical();
        let twice = parse_config(&once, Some(Experiment::Modes)).unwrap().canonical();
        prop_assert_eq!(once, twice);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn step_halving_converges(psi in low_k_state(), xi in (500.0f64..1500.0).prop_map(hz_to_angular)) {
        let ramp = default_parity_sweep();
        let drive = Drive::Schedule { xi, profile: &ramp };
        let policy = StepPolicy::default();
        let a = evolve(&psi, drive, ramp.duration, &policy).unwrap();
        let b = evolve(&psi, drive, ramp.duration, &policy.halved()).unwrap();
        prop_assert!(1.0 - fidelity(a.amplitudes(), b.amplitudes()) < 1e-8);
    }
}

/// Displacing by up to `|γ| + |α| = 5` needs more than 40 levels.
const NORMALIZATION_DIM: usize = 60;

proptest! {
    #![proptest_config(ProptestConfig { cases: 2, ..ProptestConfig::default() })]

    #[test]
    fn wigner_integrates_to_one(re in -0.7f64..0.7, im in -0.7f64..0.7) {
        let alpha = C64::new(re, im);
        let psi = make_state(FockDim::new(NORMALIZATION_DIM).unwrap(), &StateSpec::Coherent(alpha)).unwrap();
        prop_assert!((wigner_integral(&psi) - 1.0).abs() < 1e-3);
    }
}

fn wigner_integral(psi: &StateVector) -> f64 {
    let h = 0.125;
    let n = (4.0 / h) as i32;
    let mut total = 0.0;
    for i in -n..=n {
        for j in -n..=n {
            let g = C64::new(i as f64 * h, j as f64 * h);
            if g.norm() <= 4.0 {
                total += wigner_oracle(psi, g).unwrap().value * h * h;
            }
        }
    }
    total
}

#[test]
fn wigner_normalization_of_reference_states() {
    let dim = FockDim::new(NORMALIZATION_DIM).unwrap();
    for spec in [StateSpec::Fock(0), StateSpec::Coherent(C64::new(1.0, 0.0))] {
        let psi = make_state(dim, &spec).unwrap();
        let total = wigner_integral(&psi);
        assert!((total - 1.0).abs() < 1e-3, "{spec}: {total}");
    }
}

#[test]
fn slow_sweep_follows_instantaneous_eigenstates() {
    let space = TwoModeSpace::with_dims(16, 10).unwrap();
    let xi = ModeParams::reference().xi;
    let sweep = SweepPropagator::build(&space, xi, &default_parity_sweep(), &StepPolicy::default(), 12).unwrap();
    for k in 0..=12 {
        let s = sweep.sector(k).unwrap();
        assert!(s.adiabatic_fidelity >= 0.99, "K = {k}: {}", s.adiabatic_fidelity);
        assert!(s.ends_lowest);
    }
}

#[test]
fn coherent_states_match_the_series() {
    let dim = FockDim::new(40).unwrap();
    for alpha in [C64::new(1.0, 0.0), C64::new(-0.4, 1.3)] {
        let psi = make_state(dim, &StateSpec::Coherent(alpha)).unwrap();
        let series = common::poisson_amplitudes(alpha, 40);
        for (a, s) in psi.amplitudes().iter().zip(&series).take(20) {
            assert!((a - s).norm() < 1e-9);
        }
    }
}
