//! Lindblad generator, steady state and steady-state observables.
//!
//! Density matrices are vectorized by stacking columns, so for operators
//! `A`, `B`: `vec(A rho B) = (B^T ⊗ A) vec(rho)`. The generator acts as
//!
//! `rho_dot = -i[H, rho] + sum_k kappa_k (x rho x† - 1/2 {x†x, rho})`
//!
//! which is the zero-temperature Lindblad form; each decay channel enters
//! through its annihilation operator and rate.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{expectation, lowering, FockSpace, Mode, Operator};
use crate::linalg;
use crate::model::{build_h_r, SystemParams};

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-10;

/// Unit-trace, Hermitian, positive-semidefinite state on a Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    matrix: Array2<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (within 1e-10).
    pub fn from_matrix(space: FockSpace, matrix: Array2<Complex64>) -> Result<Self> {
        let d = space.dim();
        if matrix.dim() != (d, d) {
            return Err(Error::ShapeMismatch {
                context: format!("density matrix is {:?}, space dimension {d}", matrix.dim()),
            });
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidParams(format!(
                "density matrix is not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr: Complex64 = (0..d).map(|i| matrix[(i, i)]).sum();
        if (tr - Complex64::ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidParams(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let rho = Self { space, matrix };
        let min_ev = rho.min_eigenvalue()?;
        if min_ev < -POSITIVITY_TOL {
            return Err(Error::InvalidParams(format!(
                "density matrix has negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(rho)
    }

    pub fn vacuum(space: &FockSpace) -> Self {
        let d = space.dim();
        let mut m = Array2::zeros((d, d));
        m[(0, 0)] = Complex64::ONE;
        Self {
            space: space.clone(),
            matrix: m,
        }
    }

    /// Projector on the Fock state `|n_a, n_m, n_b>`.
    pub fn fock_projector(space: &FockSpace, occ: [usize; 3]) -> Result<Self> {
        let idx = space.index_of(occ)?;
        let d = space.dim();
        let mut m = Array2::zeros((d, d));
        m[(idx, idx)] = Complex64::ONE;
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    /// `|psi><psi|` from an (unnormalized) pure-state vector.
    pub fn from_pure(space: &FockSpace, psi: &[Complex64]) -> Result<Self> {
        let d = space.dim();
        if psi.len() != d {
            return Err(Error::ShapeMismatch {
                context: format!("state vector length {} != dimension {d}", psi.len()),
            });
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidParams("zero state vector".into()));
        }
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = psi[i] * psi[j].conj() / norm2;
            }
        }
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.space.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let evs = linalg::hermitian_eigenvalues(&self.matrix)?;
        Ok(evs.first().copied().unwrap_or(0.0))
    }

    /// Trace distance `1/2 ||rho - sigma||_1`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch {
                context: "trace distance across different Fock spaces".into(),
            });
        }
        let diff = &self.matrix - &other.matrix;
        let evs = linalg::hermitian_eigenvalues(&diff)?;
        Ok(evs.iter().map(|e| e.abs()).sum::<f64>() / 2.0)
    }

    /// Steady-state occupation `<x†x>` of a mode.
    pub fn occupation(&self, mode: Mode) -> Result<f64> {
        let x = lowering(&self.space, mode);
        let n = &x.dagger() * &x;
        Ok(expectation(&n, self)?.re)
    }

    fn to_vec(&self) -> Vec<Complex64> {
        vectorize(&self.matrix)
    }
}

/// Linear generator acting on column-vectorized density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    space: FockSpace,
    matrix: Array2<Complex64>,
}

impl Superoperator {
    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// Side length of the superoperator matrix (`dim^2`).
    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    /// Apply to a vectorized density matrix.
    pub fn apply(&self, vec_rho: &[Complex64]) -> Vec<Complex64> {
        linalg::matvec(&self.matrix, vec_rho)
    }

    /// Apply to a density matrix, returning `d rho / dt` as a plain matrix.
    pub fn apply_to(&self, rho: &Array2<Complex64>) -> Array2<Complex64> {
        let v = self.apply(&vectorize(rho));
        unvectorize(&v, self.space.dim())
    }

    /// Max |entry| of the trace row `vec(I)^T L`; zero for a trace-preserving
    /// generator.
    pub fn trace_row_defect(&self) -> f64 {
        let d = self.space.dim();
        let n = self.side();
        let mut worst: f64 = 0.0;
        for col in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..d {
                acc += self.matrix[(i * d + i, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    /// Infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        let n = self.side();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let s: f64 = self.matrix.row(i).iter().map(|z| z.norm()).sum();
            worst = worst.max(s);
        }
        worst
    }
}

/// Column-stacking vectorization: `vec(rho)[c * d + r] = rho[r][c]`.
pub fn vectorize(rho: &Array2<Complex64>) -> Vec<Complex64> {
    let d = rho.nrows();
    let mut v = vec![Complex64::ZERO; d * d];
    for c in 0..d {
        for r in 0..d {
            v[c * d + r] = rho[(r, c)];
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &[Complex64], d: usize) -> Array2<Complex64> {
    let mut m = Array2::zeros((d, d));
    for c in 0..d {
        for r in 0..d {
            m[(r, c)] = v[c * d + r];
        }
    }
    m
}

/// Build the Lindblad generator for a Hermitian Hamiltonian and a list of
/// decay channels `(annihilation operator, rate)`.
pub fn build_liouvillian(h: &Operator, decays: &[(Operator, f64)]) -> Result<Superoperator> {
    let herm = h.hermiticity_error();
    if herm > 1e-12 * h.max_abs().max(1.0) {
        return Err(Error::NonHermitianHamiltonian { max_dev: herm });
    }
    let space = h.space().clone();
    let d = space.dim();
    let eye = Array2::from_diag_elem(d, Complex64::ONE);

    // -i (I ⊗ H - H^T ⊗ I)
    let hm = h.matrix();
    let ht = hm.t().to_owned();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut l = Array2::zeros((d * d, d * d));
    linalg::kron_add_into(&mut l, &eye, hm, minus_i);
    linalg::kron_add_into(&mut l, &ht, &eye, -minus_i);

    for (x, rate) in decays {
        if x.space() != &space {
            return Err(Error::ShapeMismatch {
                context: "decay operator on a different Fock space".into(),
            });
        }
        if !rate.is_finite() || *rate <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "decay rate must be positive, got {rate}"
            )));
        }
        let xm = x.matrix();
        let xd = linalg::dagger(xm);
        let xdx = xd.dot(xm);
        let xdx_t = xdx.t().to_owned();
        let conj_x = xm.mapv(|z| z.conj());
        let k = Complex64::new(*rate, 0.0);
        let half_k = Complex64::new(rate / 2.0, 0.0);

        // kappa (conj(x) ⊗ x - 1/2 I ⊗ x†x - 1/2 (x†x)^T ⊗ I)
        linalg::kron_add_into(&mut l, &conj_x, xm, k);
        linalg::kron_add_into(&mut l, &eye, &xdx, -half_k);
        linalg::kron_add_into(&mut l, &xdx_t, &eye, -half_k);
    }

    Ok(Superoperator { space, matrix: l })
}

/// Decay channels of the three-mode model: `(a, kappa_a)`, `(b, kappa_b)`,
/// `(m, kappa_m)`.
pub fn standard_decays(params: &SystemParams, space: &FockSpace) -> Vec<(Operator, f64)> {
    vec![
        (lowering(space, Mode::A), params.kappa_a),
        (lowering(space, Mode::B), params.kappa_b),
        (lowering(space, Mode::M), params.kappa_m),
    ]
}

/// Unique steady state of a Lindblad generator.
///
/// Replaces one population row with the vectorized trace row, solves the
/// dense linear system, Hermitizes and renormalizes. The population rows
/// are the only ones guaranteed redundant (they sum to zero for any
/// trace-preserving generator), so the row of largest diagonal magnitude is
/// picked among them. The residual `||L vec(rho)||_max` must come out below
/// 1e-10.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let d = l.space().dim();
    let n = l.side();

    let mut row = 0;
    let mut best = -1.0;
    for i in 0..d {
        let k = i * d + i;
        let mag = l.matrix()[(k, k)].norm();
        if mag > best {
            best = mag;
            row = k;
        }
    }

    let mut a = l.matrix().clone();
    for col in 0..n {
        a[(row, col)] = Complex64::ZERO;
    }
    for i in 0..d {
        a[(row, i * d + i)] = Complex64::ONE;
    }
    let mut b = vec![Complex64::ZERO; n];
    b[row] = Complex64::ONE;

    let solution = linalg::solve(&a, &b);
    let rho = match solution {
        Ok(x) if x.iter().all(|z| z.is_finite()) => {
            let raw = unvectorize(&x, d);
            hermitize_normalize(&raw)?
        }
        _ => return Err(diagnose_degeneracy(l)),
    };

    let res = residual_max(l, &rho);
    if res > RESIDUAL_TOL {
        return Err(diagnose_degeneracy(l));
    }
    DensityMatrix::from_matrix(l.space().clone(), rho)
}

fn hermitize_normalize(raw: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let d = raw.nrows();
    let dag = linalg::dagger(raw);
    let mut rho = (raw + &dag).mapv(|z| z / 2.0);
    let tr: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
    if !tr.is_finite() || tr.norm() < 1e-300 {
        return Err(Error::SolveFailed("steady-state trace vanished".into()));
    }
    rho.mapv_inplace(|z| z / tr.re);
    Ok(rho)
}

fn residual_max(l: &Superoperator, rho: &Array2<Complex64>) -> f64 {
    l.apply(&vectorize(rho))
        .iter()
        .fold(0.0, |acc, z| acc.max(z.norm()))
}

/// On failure, estimate how many steady directions the generator has.
fn diagnose_degeneracy(l: &Superoperator) -> Error {
    let n = l.side();
    let rank = linalg::rank_estimate(l.matrix(), 1e-10);
    let null_dim = n - rank;
    if null_dim > 1 {
        Error::NonUniqueSteadyState { null_dim }
    } else {
        Error::SolveFailed(format!(
            "steady-state residual above {RESIDUAL_TOL:e} with null-space dimension {null_dim}"
        ))
    }
}

/// Equal-time second-order correlation `Tr(x†x†xx rho) / Tr(x†x rho)^2`.
pub fn g2_zero(rho: &DensityMatrix, mode: Mode) -> Result<f64> {
    let x = lowering(rho.space(), mode);
    let xd = x.dagger();
    let n_op = &xd * &x;
    let occupation = expectation(&n_op, rho)?.re;
    if occupation < 1e-300 {
        return Err(Error::EmptyMode { mode });
    }
    let pair = &(&xd * &xd) * &(&x * &x);
    let numerator = expectation(&pair, rho)?.re;
    Ok((numerator / (occupation * occupation)).max(0.0))
}

/// Fixed-step fourth-order (classical Runge-Kutta) propagation of
/// `vec(rho_dot) = L vec(rho)`.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Superoperator,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if rho0.space() != l.space() {
        return Err(Error::ShapeMismatch {
            context: "initial state and generator on different spaces".into(),
        });
    }
    if !dt.is_finite() || dt <= 0.0 || !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::InvalidParams(
            "evolve needs finite dt > 0 and t_final >= 0".into(),
        ));
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }
    let l_norm = l.inf_norm();
    if dt * l_norm > 2.5 {
        return Err(Error::StepSizeTooLarge { dt, l_norm });
    }

    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let mut y = rho0.to_vec();
    let n = y.len();
    for _ in 0..steps {
        let k1 = l.apply(&y);
        let mut tmp = vec![Complex64::ZERO; n];
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h / 2.0);
        }
        let k2 = l.apply(&tmp);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (h / 2.0);
        }
        let k3 = l.apply(&tmp);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        let k4 = l.apply(&tmp);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }

    let d = l.space().dim();
    let rho = unvectorize(&y, d);
    let tr: Complex64 = (0..d).map(|i| rho[(i, i)]).sum();
    let drift = (tr - Complex64::ONE).norm();
    if drift > 1e-8 {
        return Err(Error::SolveFailed(format!(
            "trace drifted by {drift:.3e} during propagation"
        )));
    }
    DensityMatrix::from_matrix(l.space().clone(), hermitize_normalize(&rho)?)
}

/// Steady state of the full model at truncation `n_max` per mode.
pub fn steady_state_for(params: &SystemParams, n_max: usize) -> Result<DensityMatrix> {
    let params = params.normalized()?;
    let space = FockSpace::with_max_occupation(n_max)?;
    let h = build_h_r(&params, &space)?;
    let decays = standard_decays(&params, &space);
    let l = build_liouvillian(&h, &decays)?;
    steady_state(&l)
}
