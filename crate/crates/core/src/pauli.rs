//! Pauli algebra on a few qubits: dense matrices, Pauli decomposition of
//! 2×2 operators, single-qubit rotations and the 24-element Clifford group.
//!
//! Conventions: `X = |0⟩⟨1| + |1⟩⟨0|`, `Y = −i|0⟩⟨1| + i|1⟩⟨0|`,
//! `Z = |0⟩⟨0| − |1⟩⟨1|`. Qubit 0 is the most significant tensor factor.
//! A unitary `U` acts on operators by conjugation `A ↦ U A U†`, which maps
//! `σ_j ↦ Σ_i R_ij σ_i` for the rotation `R ∈ SO(3)` returned by
//! [`rotation_of`].

use std::collections::VecDeque;

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

pub type C = Complex64;

const fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity() -> Matrix2<C> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))
}

pub fn x() -> Matrix2<C> {
    Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn y() -> Matrix2<C> {
    Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn z() -> Matrix2<C> {
    Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// `[X, Y, Z]`.
pub fn paulis() -> [Matrix2<C>; 3] {
    [x(), y(), z()]
}

/// Coefficients `(a₀, a_x, a_y, a_z)` of a Hermitian 2×2 matrix
/// `A = a₀·1 + a_x X + a_y Y + a_z Z`.
pub fn decompose(a: &Matrix2<C>) -> [f64; 4] {
    [
        0.5 * (a[(0, 0)].re + a[(1, 1)].re),
        0.5 * (a[(0, 1)].re + a[(1, 0)].re),
        0.5 * (a[(1, 0)].im - a[(0, 1)].im),
        0.5 * (a[(0, 0)].re - a[(1, 1)].re),
    ]
}

/// Pauli coefficients of a real 2×2 matrix given by its entries in a
/// two-state basis; `a01` may be complex.
pub fn decompose_entries(a00: f64, a01: C, a11: f64) -> [f64; 4] {
    decompose(&Matrix2::new(c(a00, 0.0), a01, a01.conj(), c(a11, 0.0)))
}

/// Embeds single-qubit operators into `n` qubits; unlisted qubits get the
/// identity.
pub fn embed(n: usize, ops: &[(usize, Matrix2<C>)]) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for q in 0..n {
        let m = ops
            .iter()
            .find(|(k, _)| *k == q)
            .map(|(_, m)| *m)
            .unwrap_or_else(identity);
        let m = DMatrix::from_fn(2, 2, |i, j| m[(i, j)]);
        out = out.kronecker(&m);
    }
    out
}

/// The SO(3) matrix of conjugation by `u`: `R_ij = ½ Tr(σ_i U σ_j U†)`.
pub fn rotation_of(u: &Matrix2<C>) -> Matrix3<f64> {
    let p = paulis();
    let ud = u.adjoint();
    Matrix3::from_fn(|i, j| 0.5 * (p[i] * u * p[j] * ud).trace().re)
}

/// A unitary whose conjugation realizes the proper rotation `r`.
pub fn unitary_of(r: &Matrix3<f64>) -> Matrix2<C> {
    // Quaternion from a rotation matrix (largest-pivot branch for stability).
    let t = r.trace();
    let (w, qx, qy, qz) = if t > 0.0 {
        let s = (t + 1.0).sqrt() * 2.0;
        (0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s)
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        ((r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s)
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        ((r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s)
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        ((r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s)
    };
    // U = w·1 − i(q·σ)
    let p = paulis();
    identity() * c(w, 0.0) - (p[0] * c(qx, 0.0) + p[1] * c(qy, 0.0) + p[2] * c(qz, 0.0)) * c(0.0, 1.0)
}

/// A single-qubit Clifford element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Clifford {
    /// Shortest word in the generators `H`, `S` (applied right to left;
    /// `I` for the identity).
    pub name: String,
    /// Images of `X`, `Y`, `Z`, e.g. `["+Z", "-Y", "+X"]`.
    pub action: [String; 3],
    #[serde(skip)]
    pub unitary: Matrix2<C>,
    #[serde(skip)]
    pub rotation: Matrix3<f64>,
}

fn axis_label(v: Vector3<f64>) -> String {
    let (i, val) = v.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
    format!("{}{}", if *val > 0.0 { '+' } else { '-' }, ['X', 'Y', 'Z'][i])
}

/// All 24 single-qubit Cliffords modulo phase, identity first, in
/// breadth-first order of word length.
pub fn clifford_group() -> Vec<Clifford> {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let h = Matrix2::new(c(r2, 0.0), c(r2, 0.0), c(r2, 0.0), c(-r2, 0.0));
    let s = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let key = |r: &Matrix3<f64>| -> [i8; 9] {
        let mut k = [0i8; 9];
        for (i, v) in r.iter().enumerate() {
            k[i] = v.round() as i8;
        }
        k
    };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(String::new(), identity())]);
    while let Some((word, u)) = queue.pop_front() {
        let r = rotation_of(&u);
        if !seen.insert(key(&r)) {
            continue;
        }
        let rot = r.map(f64::round);
        out.push(Clifford {
            name: if word.is_empty() { "I".into() } else { word.clone() },
            action: [0, 1, 2].map(|j| axis_label(rot.column(j).into_owned())),
            unitary: u,
            rotation: rot,
        });
        for (g, name) in [(h, 'H'), (s, 'S')] {
            queue.push_back((format!("{name}{word}"), g * u));
        }
    }
    out
}
