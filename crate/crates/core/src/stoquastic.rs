//! Stoquasticity of small qubit Hamiltonians and its cure by single-qubit
//! basis changes.
//!
//! A Hamiltonian is stoquastic in the computational basis when its matrix is
//! real with non-positive off-diagonal entries.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{self, Clifford, C};
use crate::projection::{QubitBasis, QubitModel};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest `N` for which [`check_stoquastic`] materializes the matrix.
pub const MAX_QUBITS: usize = 3;

/// Generic Pauli-coefficient form: `offset + Σ_k h_k·σ^(k) + Σ σ^(k)ᵀ β σ^(l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    pub n: usize,
    pub offset: f64,
    pub fields: Vec<Vector3<f64>>,
    pub couplings: Vec<((usize, usize), Matrix3<f64>)>,
}

impl From<&QubitModel> for PauliHamiltonian {
    fn from(m: &QubitModel) -> Self {
        PauliHamiltonian {
            n: m.n_qubits,
            offset: m.offset,
            fields: m.fields(),
            couplings: m.couplings.iter().map(|c| (c.pair, c.matrix())).collect(),
        }
    }
}

impl PauliHamiltonian {
    pub fn matrix(&self) -> DMatrix<C> {
        let dim = 1 << self.n;
        let p = pauli::paulis();
        let single: Vec<[DMatrix<C>; 3]> = (0..self.n)
            .map(|k| [0, 1, 2].map(|i| pauli::embed(self.n, &[(k, p[i])])))
            .collect();
        let mut h = DMatrix::<C>::identity(dim, dim) * C::new(self.offset, 0.0);
        for (k, f) in self.fields.iter().enumerate() {
            for i in 0..3 {
                if f[i] != 0.0 {
                    h += &single[k][i] * C::new(f[i], 0.0);
                }
            }
        }
        for ((k, l), b) in &self.couplings {
            for i in 0..3 {
                for j in 0..3 {
                    if b[(i, j)] != 0.0 {
                        h += (&single[*k][i] * &single[*l][j]) * C::new(b[(i, j)], 0.0);
                    }
                }
            }
        }
        h
    }

    /// Coefficients after conjugating qubit `k` by a unitary with rotation
    /// `rotations[k]`.
    pub fn rotated(&self, rotations: &[Matrix3<f64>]) -> PauliHamiltonian {
        PauliHamiltonian {
            n: self.n,
            offset: self.offset,
            fields: self.fields.iter().zip(rotations).map(|(h, r)| r * h).collect(),
            couplings: self
                .couplings
                .iter()
                .map(|&((k, l), b)| ((k, l), rotations[k] * b * rotations[l].transpose()))
                .collect(),
        }
    }
}

/// Largest violation of stoquasticity: the maximum of `|Im H_ij|` over all
/// entries and `Re H_ij` over off-diagonal ones (≤ 0 when stoquastic).
pub fn stoquastic_violation(h: &DMatrix<C>) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for j in 0..h.ncols() {
        for i in 0..h.nrows() {
            let v = h[(i, j)];
            worst = worst.max(v.im.abs());
            if i != j {
                worst = worst.max(v.re);
            }
        }
    }
    worst
}

pub fn is_stoquastic(h: &DMatrix<C>, tol: f64) -> bool {
    stoquastic_violation(h) <= tol
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StoquasticAsGiven,
    CurableByListedTransform,
    NoSingleQubitCliffordCure,
}

/// Per-qubit Clifford conjugation, by name and by its action on `X, Y, Z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliffordCure {
    pub cliffords: Vec<String>,
    pub actions: Vec<[String; 3]>,
}

/// `J_XX ≤ −|J_YY|` condition for the symmetric energy-basis model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyBasisCure {
    pub cliffords: Vec<String>,
    pub j_xx: f64,
    pub j_yy: f64,
    pub satisfied: bool,
}

/// Rank-one couplings: rotate both coupled axes onto `Z`, then turn each
/// field into the `−X` half of the XZ plane. Continuous, not Clifford.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankOneCure {
    pub rotations: Vec<[[f64; 3]; 3]>,
    pub violation_after: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StoquasticReport {
    pub verdict: Verdict,
    pub violation_as_given: f64,
    /// Present for `curable_by_listed_transform`.
    pub transform: Option<CliffordCure>,
    pub energy_basis_cure: Option<EnergyBasisCure>,
    pub rank_one_cure: Option<RankOneCure>,
}

/// Classifies `model`: stoquastic as given, curable by a product of
/// single-qubit Cliffords (exhaustive search, identity first), or neither.
/// The analytic conditions are evaluated alongside when they apply.
pub fn check_stoquastic(model: &QubitModel, tol: f64) -> Result<StoquasticReport> {
    model.validate()?;
    if model.n_qubits == 0 || model.n_qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "stoquasticity check supports 1..={MAX_QUBITS} qubits, got {}",
            model.n_qubits
        )));
    }
    let h = PauliHamiltonian::from(model);
    let violation_as_given = stoquastic_violation(&h.matrix());
    let group = pauli::clifford_group();
    let (verdict, transform) = if violation_as_given <= tol {
        (Verdict::StoquasticAsGiven, None)
    } else {
        match clifford_search(&h, &group, tol) {
            Some(cure) => (Verdict::CurableByListedTransform, Some(cure)),
            None => (Verdict::NoSingleQubitCliffordCure, None),
        }
    };
    Ok(StoquasticReport {
        verdict,
        violation_as_given,
        transform,
        energy_basis_cure: energy_basis_condition(model, &group, tol),
        rank_one_cure: rank_one_condition(model, tol),
    })
}

fn clifford_search(h: &PauliHamiltonian, group: &[Clifford], tol: f64) -> Option<CliffordCure> {
    let n = h.n;
    let total = group.len().pow(n as u32);
    (0..total).find_map(|mut idx| {
        let mut choice = Vec::with_capacity(n);
        for _ in 0..n {
            choice.push(&group[idx % group.len()]);
            idx /= group.len();
        }
        let rotations: Vec<Matrix3<f64>> = choice.iter().map(|c| c.rotation).collect();
        let rotated = h.rotated(&rotations);
        if !fields_real(&rotated, tol) {
            return None;
        }
        is_stoquastic(&rotated.matrix(), tol).then(|| CliffordCure {
            cliffords: choice.iter().map(|c| c.name.clone()).collect(),
            actions: choice.iter().map(|c| c.action.clone()).collect(),
        })
    })
}

/// Cheap pre-filter: a `Y` field is an imaginary off-diagonal entry.
fn fields_real(h: &PauliHamiltonian, tol: f64) -> bool {
    h.fields.iter().all(|f| f[1].abs() <= tol)
}

fn clifford_named<'a>(group: &'a [Clifford], action: [&str; 3]) -> &'a Clifford {
    group
        .iter()
        .find(|c| c.action.iter().zip(action).all(|(a, b)| a == b))
        .expect("Clifford group is complete")
}

fn energy_basis_condition(model: &QubitModel, group: &[Clifford], tol: f64) -> Option<EnergyBasisCure> {
    if model.basis != QubitBasis::EnergyBasis
        || model.n_qubits != 2
        || model.couplings.len() != 1
        || model.epsilon.iter().any(|&e| e != 0.0)
    {
        return None;
    }
    let b = model.couplings[0].beta;
    let only_xx_yy = (0..3).all(|i| (0..3).all(|j| (i == j && i < 2) || b[i][j].abs() <= tol));
    if !only_xx_yy {
        return None;
    }
    let (mut jxx, mut jyy) = (b[0][0], b[1][1]);
    let mut ops = [["+X", "+Y", "+Z"], ["+X", "+Y", "+Z"]];
    if jyy.abs() > jxx.abs() {
        // S on both qubits: X → Y, Y → −X, so XX ↔ YY.
        ops = [["+Y", "-X", "+Z"], ["+Y", "-X", "+Z"]];
        std::mem::swap(&mut jxx, &mut jyy);
    }
    if jxx > 0.0 {
        // Z on qubit 1 flips the signs of both couplings.
        ops[1] = if ops[1][0] == "+X" { ["-X", "-Y", "+Z"] } else { ["-Y", "+X", "+Z"] };
        jxx = -jxx;
        jyy = -jyy;
    }
    Some(EnergyBasisCure {
        cliffords: ops.iter().map(|a| clifford_named(group, *a).name.clone()).collect(),
        j_xx: jxx,
        j_yy: jyy,
        satisfied: jxx <= -jyy.abs() + tol,
    })
}

/// Proper rotation taking the unit vector `u` to `+ẑ`.
fn align_to_z(u: &Vector3<f64>) -> Matrix3<f64> {
    nalgebra::Rotation3::rotation_between(u, &Vector3::z())
        .unwrap_or_else(|| nalgebra::Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI))
        .into_inner()
}

/// Rotation about `ẑ` taking the XY part of `h` onto the `−x̂` axis.
fn field_to_minus_x(h: &Vector3<f64>) -> Matrix3<f64> {
    let angle = std::f64::consts::PI - h[1].atan2(h[0]);
    nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), angle).into_inner()
}

fn rank_one_condition(model: &QubitModel, tol: f64) -> Option<RankOneCure> {
    if model.n_qubits != 2 || model.couplings.len() != 1 || model.couplings[0].rank() != 1 {
        return None;
    }
    let (k, l) = model.couplings[0].pair;
    let svd = model.couplings[0].matrix().svd(true, true);
    let i = svd.singular_values.imax();
    let u = svd.u?.column(i).into_owned();
    let v = svd.v_t?.row(i).transpose();
    let h = PauliHamiltonian::from(model);
    let mut rotations = vec![Matrix3::identity(); 2];
    rotations[k] = align_to_z(&u);
    rotations[l] = align_to_z(&v);
    let aligned = h.rotated(&rotations);
    for q in 0..2 {
        rotations[q] = field_to_minus_x(&aligned.fields[q]) * rotations[q];
    }
    let violation_after = stoquastic_violation(&h.rotated(&rotations).matrix());
    Some(RankOneCure {
        rotations: rotations
            .iter()
            .map(|r| [0, 1, 2].map(|a| [0, 1, 2].map(|b| r[(a, b)])))
            .collect(),
        violation_after,
        satisfied: violation_after <= tol,
    })
}

/// Conjugates `h` by the product of single-qubit unitaries realizing
/// `rotations`, as a dense matrix.
pub fn conjugate(h: &DMatrix<C>, rotations: &[Matrix3<f64>]) -> DMatrix<C> {
    let n = rotations.len();
    let ops: Vec<_> = rotations.iter().enumerate().map(|(k, r)| (k, pauli::unitary_of(r))).collect();
    let u = pauli::embed(n, &ops);
    &u * h * u.adjoint()
}

/// Rotation matrices of a Clifford cure, by name.
pub fn cure_rotations(cure: &CliffordCure) -> Vec<Matrix3<f64>> {
    let group = pauli::clifford_group();
    cure.cliffords
        .iter()
        .map(|name| group.iter().find(|c| &c.name == name).expect("known Clifford").rotation)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::Coupling;

    fn eq20(delta: f64, eps: f64, jyy: f64, jzz: f64) -> QubitModel {
        let mut beta = [[0.0; 3]; 3];
        beta[1][1] = jyy;
        beta[2][2] = jzz;
        QubitModel {
            n_qubits: 2,
            delta: vec![delta; 2],
            epsilon: vec![eps; 2],
            couplings: vec![Coupling { pair: (0, 1), beta }],
            basis: QubitBasis::WellBasis,
            offset: 0.0,
        }
    }

    fn c10(delta: f64, jxx: f64, jyy: f64) -> QubitModel {
        let mut beta = [[0.0; 3]; 3];
        beta[0][0] = jxx;
        beta[1][1] = jyy;
        QubitModel {
            n_qubits: 2,
            delta: vec![delta; 2],
            epsilon: vec![0.0; 2],
            couplings: vec![Coupling { pair: (0, 1), beta }],
            basis: QubitBasis::EnergyBasis,
            offset: 0.0,
        }
    }

    #[test]
    fn tim_with_negative_signs_is_curable() {
        let m = QubitModel::tim(vec![-1.0, 0.7], vec![0.3, -0.2], &[((0, 1), 0.4)]);
        let r = check_stoquastic(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::CurableByListedTransform);
        let rot = cure_rotations(r.transform.as_ref().unwrap());
        let h = PauliHamiltonian::from(&m);
        assert!(is_stoquastic(&h.rotated(&rot).matrix(), DEFAULT_TOL));
    }

    #[test]
    fn energy_basis_example_is_stoquastic_as_given() {
        let r = check_stoquastic(&c10(1.0, -1.0, 0.5), DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::StoquasticAsGiven);
        let e = r.energy_basis_cure.unwrap();
        assert_eq!(e.cliffords, vec!["I", "I"]);
        assert!(e.satisfied);
    }

    #[test]
    fn well_basis_yy_example_has_no_clifford_cure() {
        let r = check_stoquastic(&eq20(1.0, 0.5, 0.3, 0.1), DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NoSingleQubitCliffordCure);
        assert!(r.transform.is_none());
        assert!(r.rank_one_cure.is_none());
    }

    #[test]
    fn rank_one_yy_is_cured_by_rotation_but_not_by_cliffords() {
        let m = eq20(1.0, 0.5, 0.3, 0.0);
        let r = check_stoquastic(&m, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NoSingleQubitCliffordCure);
        let cure = r.rank_one_cure.unwrap();
        assert!(cure.satisfied, "{}", cure.violation_after);
    }

    #[test]
    fn coefficient_rotation_matches_unitary_conjugation() {
        let m = eq20(1.1, -0.4, 0.3, 0.2);
        let h = PauliHamiltonian::from(&m);
        let rots = [
            nalgebra::Rotation3::from_euler_angles(0.2, 1.0, -0.7).into_inner(),
            nalgebra::Rotation3::from_euler_angles(-1.3, 0.1, 2.2).into_inner(),
        ];
        let direct = conjugate(&h.matrix(), &rots);
        assert!((h.rotated(&rots).matrix() - direct).camax() < 1e-12);
    }

    #[test]
    fn too_many_qubits_rejected() {
        let m = QubitModel::tim(vec![1.0; 4], vec![0.0; 4], &[]);
        assert!(check_stoquastic(&m, DEFAULT_TOL).is_err());
    }
}
