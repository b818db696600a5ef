//! Truncated bosonic mode operators on the three-mode tensor-product space.
//!
//! The mode order is fixed as (a, m, b): counterclockwise cavity mode,
//! magnon mode, clockwise cavity mode. Basis states are enumerated row-major
//! over the occupations `(n_a, n_m, n_b)` with the vacuum first, so the index
//! of `|n_a, n_m, n_b>` is `n_a * d_m * d_b + n_m * d_b + n_b`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::liouville::DensityMatrix;

/// One of the three bosonic modes, in tensor-slot order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Counterclockwise cavity mode (slot 0).
    A,
    /// Magnon mode (slot 1).
    M,
    /// Clockwise cavity mode (slot 2).
    B,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::M, Mode::B];

    pub fn slot(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::M => 1,
            Mode::B => 2,
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        match s.trim() {
            "a" | "A" => Ok(Mode::A),
            "m" | "M" => Ok(Mode::M),
            "b" | "B" => Ok(Mode::B),
            other => Err(Error::InvalidParams(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Mode::A => 'a',
            Mode::M => 'm',
            Mode::B => 'b',
        };
        write!(f, "{c}")
    }
}

/// Truncated three-mode Fock space; `mode_dims[k] = n_max + 1` for slot k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    mode_dims: [usize; 3],
}

impl FockSpace {
    pub fn new(mode_dims: [usize; 3]) -> Result<Self> {
        for &d in &mode_dims {
            if d < 2 {
                return Err(Error::InvalidDimension { dim: d });
            }
        }
        Ok(Self { mode_dims })
    }

    /// Uniform truncation keeping occupations `0..=n_max` in every mode.
    pub fn with_max_occupation(n_max: usize) -> Result<Self> {
        Self::new([n_max + 1; 3])
    }

    pub fn mode_dims(&self) -> [usize; 3] {
        self.mode_dims
    }

    pub fn mode_dim(&self, mode: Mode) -> usize {
        self.mode_dims[mode.slot()]
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    /// Basis index of `|n_a, n_m, n_b>`.
    pub fn index_of(&self, occ: [usize; 3]) -> Result<usize> {
        for (k, (&n, &d)) in occ.iter().zip(&self.mode_dims).enumerate() {
            if n >= d {
                return Err(Error::ShapeMismatch {
                    context: format!("occupation {n} out of range for mode slot {k} (dim {d})"),
                });
            }
        }
        let [_, dm, db] = self.mode_dims;
        Ok(occ[0] * dm * db + occ[1] * db + occ[2])
    }

    /// Occupations `(n_a, n_m, n_b)` of a basis index.
    pub fn occupation_at(&self, index: usize) -> [usize; 3] {
        let [_, dm, db] = self.mode_dims;
        [index / (dm * db), (index / db) % dm, index % db]
    }
}

/// Dense operator tagged with the Fock space it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: FockSpace,
    matrix: Array2<Complex64>,
}

impl Operator {
    pub fn new(space: FockSpace, matrix: Array2<Complex64>) -> Result<Self> {
        let d = space.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::ShapeMismatch {
                context: format!(
                    "operator matrix is {:?}, space dimension is {d}",
                    matrix.dim()
                ),
            });
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: &FockSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: Array2::zeros((d, d)),
        }
    }

    pub fn identity(space: &FockSpace) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: Array2::from_diag_elem(d, Complex64::ONE),
        }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.matrix
    }

    pub fn dagger(&self) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: linalg::dagger(&self.matrix),
        }
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }

    /// `T + T†`; exactly Hermitian elementwise.
    pub fn plus_dagger(&self) -> Operator {
        self + &self.dagger()
    }

    fn assert_same_space(&self, other: &Operator, what: &str) {
        assert_eq!(
            self.space, other.space,
            "operator {what} across different Fock spaces"
        );
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs, "addition");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs, "subtraction");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_space(rhs, "product");
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.dot(&rhs.matrix),
        }
    }
}

impl Mul<Complex64> for &Operator {
    type Output = Operator;
    fn mul(self, z: Complex64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.mapv(|w| w * z),
        }
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, x: f64) -> Operator {
        self * Complex64::new(x, 0.0)
    }
}

/// Single-mode lowering operator: `sqrt(n)` on the first superdiagonal.
pub fn destroy(n_levels: usize) -> Result<Array2<Complex64>> {
    if n_levels < 2 {
        return Err(Error::InvalidDimension { dim: n_levels });
    }
    let mut m = Array2::zeros((n_levels, n_levels));
    for n in 1..n_levels {
        m[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    Ok(m)
}

/// Lift a single-mode operator into the full space:
/// `I ⊗ ... ⊗ op ⊗ ... ⊗ I` with `op` in the slot of `mode`.
pub fn embed(op: &Array2<Complex64>, mode: Mode, space: &FockSpace) -> Result<Operator> {
    let d = space.mode_dim(mode);
    if op.dim() != (d, d) {
        return Err(Error::ShapeMismatch {
            context: format!(
                "single-mode operator is {:?}, mode {mode} has dimension {d}",
                op.dim()
            ),
        });
    }
    let eye = |n: usize| Array2::from_diag_elem(n, Complex64::ONE);
    let [da, dm, db] = space.mode_dims();
    let matrix = match mode {
        Mode::A => linalg::kron(op, &eye(dm * db)),
        Mode::M => linalg::kron(&eye(da), &linalg::kron(op, &eye(db))),
        Mode::B => linalg::kron(&eye(da * dm), op),
    };
    Operator::new(space.clone(), matrix)
}

/// Embedded annihilation operator for `mode`.
pub fn lowering(space: &FockSpace, mode: Mode) -> Operator {
    let op = destroy(space.mode_dim(mode)).expect("mode dims are validated at construction");
    embed(&op, mode, space).expect("dimensions match by construction")
}

/// `Tr(observable · rho)`.
pub fn expectation(observable: &Operator, rho: &DensityMatrix) -> Result<Complex64> {
    if observable.space() != rho.space() {
        return Err(Error::ShapeMismatch {
            context: "expectation value across different Fock spaces".into(),
        });
    }
    let obs = observable.matrix();
    let r = rho.matrix();
    let d = observable.space().dim();
    let mut tr = Complex64::ZERO;
    for i in 0..d {
        for j in 0..d {
            tr += obs[(i, j)] * r[(j, i)];
        }
    }
    Ok(tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn destroy_matrix_elements() {
        // destroy(2) |1> -> |0>
        let a2 = destroy(2).unwrap();
        assert_eq!(a2[(0, 1)], c(1.0));
        // destroy(3) |2> -> sqrt(2) |1>
        let a3 = destroy(3).unwrap();
        assert!((a3[(1, 2)] - c(2.0f64.sqrt())).norm() < 1e-15);
        // vacuum is annihilated: column 0 is zero
        for i in 0..3 {
            assert_eq!(a3[(i, 0)], Complex64::ZERO);
        }
    }

    #[test]
    fn destroy_rejects_single_level() {
        assert!(matches!(
            destroy(1),
            Err(Error::InvalidDimension { dim: 1 })
        ));
        assert!(destroy(0).is_err());
    }

    #[test]
    fn space_indexing_round_trip() {
        let space = FockSpace::new([3, 2, 4]).unwrap();
        assert_eq!(space.dim(), 24);
        assert_eq!(space.index_of([0, 0, 0]).unwrap(), 0);
        for idx in 0..space.dim() {
            let occ = space.occupation_at(idx);
            assert_eq!(space.index_of(occ).unwrap(), idx);
        }
        assert!(space.index_of([3, 0, 0]).is_err());
    }

    #[test]
    fn space_rejects_small_dims() {
        assert!(FockSpace::new([1, 2, 2]).is_err());
    }

    #[test]
    fn embed_identity_is_identity() {
        let space = FockSpace::new([2, 3, 2]).unwrap();
        for mode in Mode::ALL {
            let eye = Array2::from_diag_elem(space.mode_dim(mode), Complex64::ONE);
            let lifted = embed(&eye, mode, &space).unwrap();
            assert_eq!(lifted, Operator::identity(&space));
        }
    }

    #[test]
    fn embed_acts_on_its_slot_only() {
        let space = FockSpace::new([2, 2, 2]).unwrap();
        let a = lowering(&space, Mode::A);
        let from = space.index_of([1, 1, 1]).unwrap();
        let to = space.index_of([0, 1, 1]).unwrap();
        // a |111> = |011>
        let col: Vec<Complex64> = (0..space.dim()).map(|i| a.matrix()[(i, from)]).collect();
        for (i, v) in col.iter().enumerate() {
            let expect = if i == to { c(1.0) } else { Complex64::ZERO };
            assert_eq!(*v, expect);
        }
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let space = FockSpace::new([2, 2, 2]).unwrap();
        let op = destroy(3).unwrap();
        assert!(embed(&op, Mode::A, &space).is_err());
    }

    #[test]
    fn number_operator_eigenvalue() {
        let space = FockSpace::new([3, 2, 2]).unwrap();
        let a = lowering(&space, Mode::A);
        let n_a = &a.dagger() * &a;
        let idx = space.index_of([2, 0, 0]).unwrap();
        assert!((n_a.matrix()[(idx, idx)] - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn expectation_values() {
        let space = FockSpace::new([3, 2, 2]).unwrap();
        let a = lowering(&space, Mode::A);
        let n_a = &a.dagger() * &a;
        let eye = Operator::identity(&space);

        let vacuum = DensityMatrix::vacuum(&space);
        assert!((expectation(&eye, &vacuum).unwrap() - c(1.0)).norm() < 1e-15);
        assert!(expectation(&n_a, &vacuum).unwrap().norm() < 1e-15);

        let one = DensityMatrix::fock_projector(&space, [1, 0, 0]).unwrap();
        assert!((expectation(&n_a, &one).unwrap() - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn expectation_rejects_space_mismatch() {
        let s1 = FockSpace::new([2, 2, 2]).unwrap();
        let s2 = FockSpace::new([3, 2, 2]).unwrap();
        let eye = Operator::identity(&s1);
        let rho = DensityMatrix::vacuum(&s2);
        assert!(expectation(&eye, &rho).is_err());
    }

    #[test]
    fn ladder_commutator_below_top_level() {
        // [a, a†] = I on every basis state below the truncation edge;
        // the top diagonal entry is -(d-1).
        for d in 2..=5 {
            let a = destroy(d).unwrap();
            let ad = linalg::dagger(&a);
            let comm = a.dot(&ad) - ad.dot(&a);
            for i in 0..d {
                for j in 0..d {
                    let expect = if i == j && i < d - 1 {
                        c(1.0)
                    } else if i == j {
                        c(-((d - 1) as f64))
                    } else {
                        Complex64::ZERO
                    };
                    assert!(
                        (comm[(i, j)] - expect).norm() <= 1e-14,
                        "commutator entry ({i},{j}) off for dim {d}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn embedded_modes_commute(da in 2usize..4, dm in 2usize..4, db in 2usize..4) {
            let space = FockSpace::new([da, dm, db]).unwrap();
            let ops: Vec<Operator> = Mode::ALL.iter().map(|&m| lowering(&space, m)).collect();
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let ab = &ops[i] * &ops[j];
                    let ba = &ops[j] * &ops[i];
                    prop_assert!((&ab - &ba).max_abs() <= 1e-14);
                    // also with a dagger in one slot
                    let adb = &ops[i].dagger() * &ops[j];
                    let bad = &ops[j] * &ops[i].dagger();
                    prop_assert!((&adb - &bad).max_abs() <= 1e-14);
                }
            }
        }

        #[test]
        fn embed_commutes_with_dagger(d in 2usize..4, seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let space = FockSpace::new([d, d, d]).unwrap();
            let op = Array2::from_shape_fn((d, d), |_| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            for mode in Mode::ALL {
                let lifted_dagger = embed(&linalg::dagger(&op), mode, &space).unwrap();
                let dagger_lifted = embed(&op, mode, &space).unwrap().dagger();
                prop_assert_eq!(lifted_dagger, dagger_lifted);
            }
        }
    }
}
