//! Structural invariants of the Hamiltonians, states and solvers over
//! randomised parameters.

use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use spin_transistor::basis::{sigma_z_total, SpinSector};
use spin_transistor::dynamics::{evolve_lindblad, NoiseConfig, SolverOptions, TimeGrid};
use spin_transistor::experiments::{band_csv, run_scenario, Gate, InitialLeft, Model, Scenario};
use spin_transistor::hamiltonian::{
    build_circuit_model, build_drive, build_general_diamond, build_rotating_frame, DiamondCouplings, DriveParams, GeneralCouplings,
};
use spin_transistor::operator::{total_sz, DenseOperator, C64, DIM};
use spin_transistor::state::{down, fidelity, gate_state, left_state, register_state, GateSetting, QuantumState};
use spin_transistor::transfer::check_closed;
use spin_transistor::units;

fn couplings() -> impl Strategy<Value = DiamondCouplings> {
    (-60.0f64..-5.0, -1.5f64..1.5, 0.05f64..0.6, -0.05f64..0.05, -15.0f64..-5.0, 0.3f64..4.0).prop_map(
        |(jz, jx, j2, j4, omega, delta)| DiamondCouplings::from_display(omega, delta, jz, jx, j2, j4),
    )
}

fn general() -> impl Strategy<Value = GeneralCouplings> {
    prop::array::uniform7(-1.0f64..1.0).prop_map(|v| GeneralCouplings {
        j23_z: v[0],
        j12: v[1],
        j13: v[2],
        j14: v[3],
        j23_x: v[4],
        j24: v[5],
        j34: v[6],
    })
}

/// Entrywise defect in units of the operator's largest entry.
fn relative(defect: f64, h: &DenseOperator) -> f64 {
    defect / h.max_abs().max(f64::MIN_POSITIVE)
}

fn commutes_with_sz(h: &DenseOperator) -> f64 {
    relative(h.commutator(&total_sz()).max_abs(), h)
}

proptest! {
    #[test]
    fn builders_are_hermitian(c in couplings(), t in 0.0f64..2e-6, amp in 0.0f64..50.0) {
        for h in [build_rotating_frame(&c, t), build_circuit_model(&c, t)] {
            prop_assert!(relative(h.hermiticity_defect(), &h) <= 1e-12);
        }
        let d = DriveParams::resonant(units::from_2pi_mhz(amp), &c).unwrap();
        let hd = build_drive(&d, c.omega, t);
        prop_assert!(hd.hermiticity_defect() <= 1e-12 * hd.max_abs().max(1.0));
    }

    #[test]
    fn spin_projection_is_conserved(c in couplings(), g in general(), t in 0.0f64..2e-6) {
        for h in [build_rotating_frame(&c, t), build_circuit_model(&c, t), build_general_diamond(&g)] {
            prop_assert!(commutes_with_sz(&h) <= 1e-12);
            // block-diagonal across sectors
            for i in 0..DIM {
                for j in 0..DIM {
                    if sigma_z_total(i) != sigma_z_total(j) {
                        prop_assert!(h.matrix()[(i, j)].norm() == 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn drive_spares_the_gate_singlet(c in couplings(), t in 0.0f64..2e-6, amp in 1.0f64..50.0) {
        let d = DriveParams::resonant(units::from_2pi_mhz(amp), &c).unwrap();
        let h = build_drive(&d, c.omega, t);
        let singlet = gate_state(GateSetting::Closed(-std::f64::consts::FRAC_PI_4));
        for outer in [[down(), down()], [left_state(0.0, 0.0), down()], [down(), left_state(0.0, 0.0)]] {
            let s = register_state(&outer[0], &singlet, &outer[1]);
            let sv = s.as_pure().unwrap();
            let hs = &h.0 * sv;
            // S± annihilate the singlet, so no triplet component appears
            prop_assert!(hs.norm() <= 1e-12 * h.max_abs(), "{}", hs.norm());
        }
    }

    #[test]
    fn fidelity_ignores_global_phase(r in 0.0f64..1.0, theta in 0.0f64..6.28, phi in -10.0f64..10.0) {
        let psi = register_state(&left_state(r, theta), &gate_state(GateSetting::Open), &down());
        let target = register_state(&left_state(0.3, 1.0), &gate_state(GateSetting::Open), &down());
        let v = psi.as_pure().unwrap() * C64::from_polar(1.0, phi);
        let rotated = QuantumState::pure(v).unwrap();
        let f0 = fidelity(&psi, &target).unwrap();
        prop_assert!((fidelity(&rotated, &target).unwrap() - f0).abs() <= 1e-14);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&f0));
        let rho = QuantumState::density(psi.to_density()).unwrap();
        prop_assert!((fidelity(&rho, &target).unwrap() - f0).abs() <= 1e-14);
    }

    #[test]
    fn reduced_model_closes_at_quarter_pi(j12 in -1.0f64..1.0, jz in -1.0f64..1.0) {
        prop_assume!(j12.abs() > 1e-3 || jz.abs() > 1e-3);
        let g = GeneralCouplings::reduced(j12, jz);
        let report = check_closed(&g, std::f64::consts::FRAC_PI_4);
        prop_assert!(report.max_residual() <= 1e-12, "{:?}", report);
        prop_assert!((report.e_c + jz).abs() <= 1e-12 * g.scale());
    }

    #[test]
    fn sector_bases_are_consistent(k in -2i32..=2) {
        let s = SpinSector::new(k).unwrap();
        prop_assert_eq!(s.dim(), [1, 4, 6, 4, 1][(k + 2) as usize]);
        prop_assert!(s.basis().iter().all(|&i| sigma_z_total(i) == 2 * k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dephasing_keeps_a_valid_density_matrix(gamma_mhz in 0.0f64..5.0, r in 0.0f64..1.0, theta in 0.0f64..6.28) {
        let c = DiamondCouplings::reference();
        let h = spin_transistor::hamiltonian::circuit_hamiltonian(&c);
        let psi = register_state(&left_state(r, theta), &gate_state(GateSetting::Open), &down());
        let rho0 = QuantumState::density(psi.to_density()).unwrap();
        let grid = TimeGrid::new(0.0, units::from_us(0.3), 4).unwrap();
        let noise = NoiseConfig::new(units::from_2pi_mhz(gamma_mhz)).unwrap();
        let out = evolve_lindblad(&h, &rho0, &noise, &grid, &SolverOptions::default()).unwrap();
        for s in &out {
            let QuantumState::Density(m) = s else { panic!("density expected") };
            prop_assert!((m.trace().re - 1.0).abs() <= 1e-8);
            prop_assert!((m - m.adjoint()).camax() <= 1e-9);
            let eig = SymmetricEigen::new(m.clone());
            prop_assert!(eig.eigenvalues.min() >= -1e-7);
        }
    }
}

#[test]
fn closed_gate_state_is_an_eigenstate_of_the_reduced_model() {
    let g = GeneralCouplings::reduced(0.8, -1.1);
    let h = build_general_diamond(&g);
    for left in [left_state(0.0, 0.0), down(), left_state(0.6, 2.0)] {
        let s = register_state(&left, &gate_state(GateSetting::closed()), &down());
        let v = s.as_pure().unwrap();
        let hv = &h.0 * v;
        let e = v.dotc(&hv);
        assert!((&hv - v * e).norm() <= 1e-12);
        assert!((e.re + g.j23_z).abs() <= 1e-12);
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let mut s = Scenario::new("determinism", Model::Circuit, Gate::Open);
    s.initial_left = InitialLeft::Lattice;
    s.grid = TimeGrid::new(0.0, units::from_us(0.5), 101).unwrap();
    let a = run_scenario(&s).unwrap();
    let b = run_scenario(&s).unwrap();
    assert_eq!(band_csv(&a.band), band_csv(&b.band));
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert_eq!(x.trace.to_csv(), y.trace.to_csv());
    }
}
