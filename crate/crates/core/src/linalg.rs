//! Dense complex linear algebra helpers.
//!
//! Matrices are `ndarray::Array2<Complex64>` throughout; `faer` supplies the
//! LU and eigenvalue factorizations behind the functions below.

use std::sync::Once;

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, MatRef};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

static FAER_SETUP: Once = Once::new();

/// Factorizations must not depend on the ambient rayon pool: sweep results
/// have to be byte-identical under any degree of point-level parallelism.
fn pin_sequential_kernels() {
    FAER_SETUP.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Accumulate `factor * (a ⊗ b)` into `out` without temporaries, skipping
/// zero entries of `a` and `b` (the mode operators are sparse, so this is
/// what keeps large superoperator assembly cheap).
pub fn kron_add_into(
    out: &mut Array2<Complex64>,
    a: &Array2<Complex64>,
    b: &Array2<Complex64>,
    factor: Complex64,
) {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    debug_assert_eq!(out.dim(), (ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)] * factor;
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    let bkl = b[(k, l)];
                    if bkl == Complex64::ZERO {
                        continue;
                    }
                    out[(i * br + k, j * bc + l)] += aij * bkl;
                }
            }
        }
    }
}

/// Conjugate transpose.
pub fn dagger(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Largest entry magnitude.
pub fn max_abs(m: &Array2<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max elementwise deviation from the conjugate transpose.
pub fn hermiticity_error(m: &Array2<Complex64>) -> f64 {
    let n = m.nrows();
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

fn to_faer(a: &Array2<Complex64>) -> Result<MatRef<'_, Complex64>> {
    let (r, c) = a.dim();
    let slice = a.as_slice().ok_or_else(|| Error::ShapeMismatch {
        context: "matrix is not contiguous".into(),
    })?;
    Ok(MatRef::from_row_major_slice(slice, r, c))
}

/// LU factorization with partial pivoting, reusable across right-hand sides.
pub struct LuFactors {
    lu: PartialPivLu<Complex64>,
    dim: usize,
}

impl LuFactors {
    pub fn new(a: &Array2<Complex64>) -> Result<Self> {
        let (r, c) = a.dim();
        if r != c {
            return Err(Error::ShapeMismatch {
                context: format!("LU needs a square matrix, got {r}x{c}"),
            });
        }
        pin_sequential_kernels();
        Ok(Self {
            lu: to_faer(a)?.partial_piv_lu(),
            dim: r,
        })
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.dim {
            return Err(Error::ShapeMismatch {
                context: format!("rhs length {} != matrix side {}", b.len(), self.dim),
            });
        }
        let rhs = Mat::from_fn(self.dim, 1, |i, _| b[i]);
        let sol = self.lu.solve(&rhs);
        Ok((0..self.dim).map(|i| sol[(i, 0)]).collect())
    }
}

/// Solve `a x = b` with one step of iterative refinement.
pub fn solve(a: &Array2<Complex64>, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let lu = LuFactors::new(a)?;
    let mut x = lu.solve(b)?;
    if x.iter().any(|z| !z.is_finite()) {
        return Err(Error::SolveFailed("singular matrix".into()));
    }
    // One refinement pass keeps the tiny steady-state components accurate.
    let r = residual(a, &x, b);
    let dx = lu.solve(&r)?;
    if dx.iter().all(|z| z.is_finite()) {
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    Ok(x)
}

/// `b - a x`.
pub fn residual(a: &Array2<Complex64>, x: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let ax = matvec(a, x);
    b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
}

/// Dense matrix-vector product.
pub fn matvec(a: &Array2<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    let (r, c) = a.dim();
    debug_assert_eq!(c, x.len());
    let mut out = vec![Complex64::ZERO; r];
    for (out_i, row) in out.iter_mut().zip(a.rows()) {
        let mut acc = Complex64::ZERO;
        for (aij, xj) in row.iter().zip(x) {
            acc += aij * xj;
        }
        *out_i = acc;
    }
    out
}

/// Rank estimate by pivoted Gaussian elimination; pivots below
/// `rel_tol * max_abs(a)` count as zero.
pub fn rank_estimate(a: &Array2<Complex64>, rel_tol: f64) -> usize {
    let n = a.nrows();
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0;
    }
    let tol = rel_tol * scale;
    let mut m = a.clone();
    let mut rank = 0;
    for col in 0..n.min(a.ncols()) {
        let mut pivot_row = rank;
        let mut pivot_mag = 0.0;
        for r in rank..n {
            let mag = m[(r, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= tol {
            continue;
        }
        if pivot_row != rank {
            for c in col..a.ncols() {
                let tmp = m[(rank, c)];
                m[(rank, c)] = m[(pivot_row, c)];
                m[(pivot_row, c)] = tmp;
            }
        }
        let pivot = m[(rank, col)];
        for r in (rank + 1)..n {
            let factor = m[(r, col)] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for c in col..a.ncols() {
                let sub = factor * m[(rank, c)];
                m[(r, c)] -= sub;
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    pin_sequential_kernels();
    let eig = to_faer(a)?
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::SolveFailed(format!("eigendecomposition failed: {e:?}")))?;
    let s = eig.S();
    let mut evs: Vec<f64> = (0..a.nrows()).map(|i| s[i].re).collect();
    evs.sort_by(|x, y| x.total_cmp(y));
    Ok(evs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_identity_blocks() {
        let eye = Array2::from_diag_elem(2, Complex64::ONE);
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(3.0, 0.0), c(4.0, 0.0)]];
        let k = kron(&eye, &a);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[(0, 1)], c(2.0, 0.0));
        assert_eq!(k[(2, 3)], c(2.0, 0.0));
        assert_eq!(k[(0, 2)], Complex64::ZERO);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = array![[c(2.0, 1.0), c(0.0, -1.0)], [c(1.0, 0.0), c(3.0, 2.0)]];
        let x_true = [c(1.0, -1.0), c(0.5, 2.0)];
        let b = matvec(&a, &x_true);
        let x = solve(&a, &b).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-13);
        }
    }

    #[test]
    fn solve_flags_singular() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let b = [c(1.0, 0.0), c(1.0, 0.0)];
        assert!(solve(&a, &b).is_err());
    }

    #[test]
    fn rank_of_projector() {
        let a = array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert_eq!(rank_estimate(&a, 1e-12), 1);
    }

    #[test]
    fn hermitian_eigenvalues_sorted() {
        let a = array![[c(2.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]];
        let evs = hermitian_eigenvalues(&a).unwrap();
        assert!((evs[0] - 1.0).abs() < 1e-12);
        assert!((evs[1] - 3.0).abs() < 1e-12);
    }
}
