use fluxqmc_core::projection::{Coupling, QubitBasis, QubitModel};
use fluxqmc_core::stoquastic::{
    check_stoquastic, conjugate, cure_rotations, is_stoquastic, PauliHamiltonian, Verdict, DEFAULT_TOL,
};
use nalgebra::{DMatrix, Matrix3};
use proptest::prelude::*;

fn eigenvalues(h: &DMatrix<fluxqmc_core::pauli::C>) -> Vec<f64> {
    let mut v: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn assert_cure_is_unitary(model: &QubitModel, rotations: &[Matrix3<f64>]) {
    let h = PauliHamiltonian::from(model);
    let before = h.matrix();
    let after = h.rotated(rotations).matrix();
    assert!((conjugate(&before, rotations) - &after).camax() < 1e-10);
    for (a, b) in eigenvalues(&before).iter().zip(eigenvalues(&after)) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    assert!(is_stoquastic(&after, DEFAULT_TOL));
}

fn signed(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v })
}

fn well_yy_zz() -> impl Strategy<Value = QubitModel> {
    (
        [0.05f64..3.0, 0.05..3.0],
        [signed(0.05, 2.0), signed(0.05, 2.0)],
        signed(0.05, 1.0),
        signed(0.05, 0.95),
    )
        .prop_map(|(delta, eps, jyy, ratio)| {
            let mut beta = [[0.0; 3]; 3];
            beta[1][1] = jyy;
            beta[2][2] = jyy * ratio;
            QubitModel {
                n_qubits: 2,
                delta: delta.to_vec(),
                epsilon: eps.to_vec(),
                couplings: vec![Coupling { pair: (0, 1), beta }],
                basis: QubitBasis::WellBasis,
                offset: 0.0,
            }
        })
}

fn symmetric_energy_basis() -> impl Strategy<Value = QubitModel> {
    ([0.05f64..3.0, 0.05..3.0], -1.0f64..1.0, -1.0f64..1.0).prop_map(|(delta, jxx, jyy)| {
        let mut beta = [[0.0; 3]; 3];
        beta[0][0] = jxx;
        beta[1][1] = jyy;
        QubitModel {
            n_qubits: 2,
            delta: delta.to_vec(),
            epsilon: vec![0.0, 0.0],
            couplings: vec![Coupling { pair: (0, 1), beta }],
            basis: QubitBasis::EnergyBasis,
            offset: 0.0,
        }
    })
}

fn any_tim() -> impl Strategy<Value = QubitModel> {
    (1usize..=3)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec(signed(0.01, 3.0), n),
                proptest::collection::vec(-2.0f64..2.0, n),
                proptest::collection::vec(-1.0f64..1.0, n * (n - 1) / 2),
            )
        })
        .prop_map(|(delta, eps, js)| {
            let n = delta.len();
            let pairs: Vec<_> = (0..n).flat_map(|k| (k + 1..n).map(move |l| (k, l))).collect();
            let couplings: Vec<_> = pairs.into_iter().zip(js).collect();
            QubitModel::tim(delta, eps, &couplings)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn yy_dominated_tilted_model_has_no_clifford_cure(m in well_yy_zz()) {
        let r = check_stoquastic(&m, DEFAULT_TOL).unwrap();
        prop_assert_eq!(r.verdict, Verdict::NoSingleQubitCliffordCure);
    }

    #[test]
    fn symmetric_energy_basis_model_is_always_cured(m in symmetric_energy_basis()) {
        let r = check_stoquastic(&m, DEFAULT_TOL).unwrap();
        prop_assert_ne!(r.verdict, Verdict::NoSingleQubitCliffordCure);
        let cond = r.energy_basis_cure.clone().unwrap();
        prop_assert!(cond.satisfied);
        prop_assert!(cond.j_xx <= -cond.j_yy.abs() + DEFAULT_TOL);
        if let Some(cure) = &r.transform {
            assert_cure_is_unitary(&m, &cure_rotations(cure));
        }
        let named = fluxqmc_core::stoquastic::CliffordCure {
            actions: vec![],
            cliffords: cond.cliffords,
        };
        assert_cure_is_unitary(&m, &cure_rotations(&named));
    }

    #[test]
    fn every_tim_is_curable(m in any_tim()) {
        let r = check_stoquastic(&m, DEFAULT_TOL).unwrap();
        prop_assert_ne!(r.verdict, Verdict::NoSingleQubitCliffordCure);
        if let Some(cure) = &r.transform {
            assert_cure_is_unitary(&m, &cure_rotations(cure));
        }
    }

    #[test]
    fn rank_one_rotation_cure_preserves_spectrum(
        delta in [0.05f64..3.0, 0.05..3.0],
        eps in [-2.0f64..2.0, -2.0..2.0],
        u in [-1.0f64..1.0, -1.0..1.0, -1.0..1.0],
        v in [-1.0f64..1.0, -1.0..1.0, -1.0..1.0],
    ) {
        prop_assume!(u.iter().map(|x| x * x).sum::<f64>() > 0.01);
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 0.01);
        let mut beta = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                beta[i][j] = u[i] * v[j];
            }
        }
        let m = QubitModel {
            n_qubits: 2,
            delta: delta.to_vec(),
            epsilon: eps.to_vec(),
            couplings: vec![Coupling { pair: (0, 1), beta }],
            basis: QubitBasis::WellBasis,
            offset: 0.0,
        };
        let cure = check_stoquastic(&m, DEFAULT_TOL).unwrap().rank_one_cure.unwrap();
        prop_assert!(cure.satisfied, "violation {}", cure.violation_after);
        let rot: Vec<Matrix3<f64>> = cure
            .rotations
            .iter()
            .map(|r| Matrix3::from_fn(|i, j| r[i][j]))
            .collect();
        assert_cure_is_unitary(&m, &rot);
    }
}
