//! Two-excitation perturbative solution of the driven model.
//!
//! Two independent routes compute the ten probability amplitudes of the
//! weak-drive wave function
//!
//! `|psi> = sum_{n_a+n_m+n_b <= 2} C_{amb} |n_a, n_m, n_b>`:
//!
//! * [`truncated_solve`] projects the effective non-Hermitian Hamiltonian
//!   onto the ten-state basis and solves the one- and two-excitation blocks
//!   mechanically (the oracle route);
//! * [`closed_form_amplitudes`] evaluates the explicit rational expressions
//!   in the coefficients of [`CoefficientSet`].
//!
//! Agreement of the two routes on random parameter draws is the module's
//! central correctness check. [`optimal_drive`] returns the two-photon drive
//! that nulls the pair amplitude `c200` by destructive interference, and
//! [`g2_analytic`] evaluates the weak-drive correlation `2|C2|^2 / |C1|^4`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Mode};
use crate::model::{build_h_eff, complex_detunings, drive_phase, SystemParams};

/// Relative threshold below which a denominator counts as singular, scaled
/// by the largest term magnitude entering it.
const SINGULAR_REL_TOL: f64 = 1e-12;

/// The ten amplitudes, indexed by occupations `(n_a, n_m, n_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub c000: Complex64,
    pub c100: Complex64,
    pub c010: Complex64,
    pub c001: Complex64,
    pub c110: Complex64,
    pub c101: Complex64,
    pub c011: Complex64,
    pub c200: Complex64,
    pub c020: Complex64,
    pub c002: Complex64,
}

impl Amplitudes {
    /// Label/value pairs in basis order.
    pub fn entries(&self) -> [(&'static str, Complex64); 10] {
        [
            ("000", self.c000),
            ("100", self.c100),
            ("010", self.c010),
            ("001", self.c001),
            ("110", self.c110),
            ("101", self.c101),
            ("011", self.c011),
            ("200", self.c200),
            ("020", self.c020),
            ("002", self.c002),
        ]
    }

    pub fn one_excitation(&self) -> [Complex64; 3] {
        [self.c100, self.c010, self.c001]
    }

    pub fn two_excitation(&self) -> [Complex64; 6] {
        [
            self.c110, self.c101, self.c011, self.c200, self.c020, self.c002,
        ]
    }
}

/// All coefficients entering the closed-form amplitudes.
///
/// `f2` as printed in the source derivation carries an extra factor of the
/// intermode coupling in its first term (`-J(2J dt_c^2 + ...)`), which is
/// dimensionally inconsistent and disagrees with the block solve; the
/// corrected form `-J(2 dt_c^2 + 2 dt_c dt_m + dt_m^2)` is used here and is
/// pinned against the oracle route by tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub z: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    pub m_coef: Complex64,
    pub y: Complex64,
    pub k0: Complex64,
    pub k1: Complex64,
    pub k2: Complex64,
    pub a0: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
    pub b0: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
    pub f0: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub r0: Complex64,
    pub r1: Complex64,
    pub l0: Complex64,
    pub l1: Complex64,
    pub l2: Complex64,
    /// Complex detunings the set was built from.
    pub dt_c: Complex64,
    pub dt_m: Complex64,
    /// Largest term magnitude entering `p` (for singularity thresholds).
    pub p_scale: f64,
    /// Largest term magnitude entering `q`.
    pub q_scale: f64,
}

/// Two-photon drive nulling the pair amplitude `c200`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveCondition {
    /// Optimal drive amplitude (non-negative).
    pub e_opt: f64,
    /// Optimal drive phase in `(-pi, pi]`; 0 when degenerate.
    pub phi_opt: f64,
    /// Set when `o_drive = 0`: any phase is optimal at zero amplitude.
    pub phase_degenerate: bool,
}

impl DriveCondition {
    /// The complex drive `e_opt * exp(i phi_opt)`.
    pub fn complex_drive(&self) -> Complex64 {
        Complex64::from_polar(self.e_opt, self.phi_opt)
    }
}

/// Evaluate every coefficient from the complex detunings and couplings.
pub fn coefficient_set(params: &SystemParams) -> Result<CoefficientSet> {
    let det = complex_detunings(params)?;
    let (dc, dm) = (det.dt_c, det.dt_m);
    let ga = Complex64::new(params.g_a, 0.0);
    let gb = Complex64::new(params.g_b, 0.0);
    let j = Complex64::new(params.j, 0.0);

    let p_terms = [
        -2.0 * ga * gb * j,
        ga * ga * dc,
        gb * gb * dc,
        (j - dc) * (j + dc) * dm,
    ];
    let q_terms = [
        2.0 * ga * gb * j,
        ga * ga * (dc + dm),
        gb * gb * (dc + dm),
        -2.0 * dc * (-j + dc + dm) * (j + dc + dm),
    ];

    Ok(CoefficientSet {
        z: gb * j - ga * dc,
        p: p_terms.iter().sum(),
        q: q_terms.iter().sum(),
        m_coef: -j * j + dc * dc,
        y: ga * j - gb * dc,
        k2: j * j * dm + (gb * gb - dc * (dc + dm)) * (2.0 * dc + dm),
        k1: 2.0 * gb * j * (gb * gb + 2.0 * dc * dc),
        k0: gb.powu(4) * (dc + dm)
            - gb * gb * (j * j * dm + dc * (dc + dm) * (2.0 * dc + 3.0 * dm))
            + 2.0 * dc * dc * dm * (-j + dc + dm) * (j + dc + dm),
        a2: gb * j * (-2.0 * dc + dm),
        a1: dc * dm * (-gb * gb + 2.0 * (j * j + dc * (dc + dm))),
        a0: gb * j * (2.0 * dc + dm) * (gb * gb - 2.0 * dc * dm),
        f2: -j * (2.0 * dc * dc + 2.0 * dc * dm + dm * dm),
        f1: j * j * (4.0 * dc - 2.0 * dm) - 2.0 * dc * dm * (dc + dm),
        f0: 2.0 * j * dc * dm * (-j * j + (dc + dm) * (dc + dm)),
        b2: ga * j * (-2.0 * dc + dm),
        b1: dc * dm * (-ga * ga + 2.0 * (j * j + dc * (dc + dm))),
        b0: ga * j * (2.0 * dc + dm) * (ga * ga - 2.0 * dc * dm),
        r1: -2.0 * j * j * dc - 2.0 * dc.powu(3) - 2.0 * dc * dc * dm,
        r0: 8.0 * j * dc * dc + 4.0 * j * dc * dm,
        l2: j * j * dm + (ga * ga - dc * (dc + dm)) * (2.0 * dc + dm),
        l1: 2.0 * ga * j * (ga * ga + 2.0 * dc * dc),
        l0: ga.powu(4) * (dc + dm)
            - ga * ga * (j * j * dm + dc * (dc + dm) * (2.0 * dc + 3.0 * dm))
            + 2.0 * dc * dc * dm * (-j + dc + dm) * (j + dc + dm),
        dt_c: dc,
        dt_m: dm,
        p_scale: p_terms.iter().fold(0.0, |acc, t| acc.max(t.norm())),
        q_scale: q_terms.iter().fold(0.0, |acc, t| acc.max(t.norm())),
    })
}

impl CoefficientSet {
    /// The quartic `dt_c g_a^4 - 2 J g_b g_a^3 + K2 g_a^2 + K1 g_a + K0`
    /// that multiplies the drive in `c200`, with its magnitude scale.
    fn c200_drive_polynomial(&self, params: &SystemParams) -> (Complex64, f64) {
        let ga = Complex64::new(params.g_a, 0.0);
        let gb = Complex64::new(params.g_b, 0.0);
        let j = Complex64::new(params.j, 0.0);
        let terms = [
            self.dt_c * ga.powu(4),
            -2.0 * j * gb * ga.powu(3),
            self.k2 * ga * ga,
            self.k1 * ga,
            self.k0,
        ];
        (
            terms.iter().sum(),
            terms.iter().fold(0.0, |acc, t| acc.max(t.norm())),
        )
    }
}

/// The ten basis occupations in order: vacuum, one-excitation triplet,
/// two-excitation sextet.
const VACUUM: [usize; 3] = [0, 0, 0];
const ONE_EXC: [[usize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
const TWO_EXC: [[usize; 3]; 6] = [
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [2, 0, 0],
    [0, 2, 0],
    [0, 0, 2],
];

/// Steady-state amplitudes from the effective Hamiltonian blocks.
///
/// Sets `c000 = 1`, solves the 3x3 one-excitation block sourced by the
/// probe, then the 6x6 two-excitation block sourced by the probe times the
/// one-excitation amplitudes and by the two-photon drives. Everything is
/// read off the assembled matrix; no transcribed equations.
///
/// Valid in the weak-driving regime: both the two-photon amplitudes and
/// the probe must sit well below the linewidths (`e_l`, `e_r`, `o_drive`
/// << `kappa_c`, `kappa_m`). No hard check is enforced; outside that
/// regime the truncation itself, not this solver, is what breaks down.
pub fn truncated_solve(params: &SystemParams) -> Result<Amplitudes> {
    let space = FockSpace::new([3, 3, 3])?;
    let h = build_h_eff(params, &space)?;
    let hm = h.matrix();
    let idx = |occ: [usize; 3]| space.index_of(occ).expect("basis state inside truncation");

    let vac = idx(VACUUM);
    let one: Vec<usize> = ONE_EXC.iter().map(|&s| idx(s)).collect();
    let two: Vec<usize> = TWO_EXC.iter().map(|&s| idx(s)).collect();

    // One-excitation block: H_1 c_1 = -(source from the vacuum).
    let a1: Vec<Vec<Complex64>> = one
        .iter()
        .map(|&r| one.iter().map(|&c| hm[(r, c)]).collect())
        .collect();
    let b1: Vec<Complex64> = one.iter().map(|&r| -hm[(r, vac)]).collect();
    let c1 = solve_block(a1, b1, "one-excitation")?;

    // Two-excitation block, sourced by the one-excitation amplitudes and by
    // the two-photon drive elements <two|H|vac>.
    let a2: Vec<Vec<Complex64>> = two
        .iter()
        .map(|&r| two.iter().map(|&c| hm[(r, c)]).collect())
        .collect();
    let b2: Vec<Complex64> = two
        .iter()
        .map(|&r| {
            let mut s = hm[(r, vac)];
            for (k, &c) in one.iter().enumerate() {
                s += hm[(r, c)] * c1[k];
            }
            -s
        })
        .collect();
    let c2 = solve_block(a2, b2, "two-excitation")?;

    Ok(Amplitudes {
        c000: Complex64::ONE,
        c100: c1[0],
        c010: c1[1],
        c001: c1[2],
        c110: c2[0],
        c101: c2[1],
        c011: c2[2],
        c200: c2[3],
        c020: c2[4],
        c002: c2[5],
    })
}

/// Gaussian elimination with partial pivoting for the small blocks.
fn solve_block(
    mut a: Vec<Vec<Complex64>>,
    mut b: Vec<Complex64>,
    block: &'static str,
) -> Result<Vec<Complex64>> {
    let n = a.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, z| acc.max(z.norm()))
        .max(1e-300);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1][col].norm().total_cmp(&a[r2][col].norm()))
            .expect("non-empty block");
        if a[pivot_row][col].norm() <= SINGULAR_REL_TOL * scale {
            return Err(Error::SingularBlock { block });
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot_row: Vec<Complex64> = a[col][col..].to_vec();
        for r in (col + 1)..n {
            let factor = a[r][col] / pivot_row[0];
            if factor == Complex64::ZERO {
                continue;
            }
            for (av, pv) in a[r][col..].iter_mut().zip(&pivot_row) {
                *av -= factor * pv;
            }
            let sub = factor * b[col];
            b[r] -= sub;
        }
    }
    let mut x = vec![Complex64::ZERO; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Closed-form amplitudes; `c000 = 1` by convention.
pub fn closed_form_amplitudes(params: &SystemParams) -> Result<Amplitudes> {
    let cs = coefficient_set(params)?;
    let e = params.drive_amplitude()?;
    let s = drive_phase(e, params.phi);
    let o = Complex64::new(params.o_drive, 0.0);
    let ga = Complex64::new(params.g_a, 0.0);
    let gb = Complex64::new(params.g_b, 0.0);
    let j = Complex64::new(params.j, 0.0);
    let (dc, dm) = (cs.dt_c, cs.dt_m);

    if cs.p.norm() <= SINGULAR_REL_TOL * cs.p_scale {
        return Err(Error::SingularDenominator { which: "P" });
    }
    if cs.q.norm() <= SINGULAR_REL_TOL * cs.q_scale {
        return Err(Error::SingularDenominator { which: "Q" });
    }

    let p2 = cs.p * cs.p;
    let sqrt2 = Complex64::new(2.0_f64.sqrt(), 0.0);
    let o2 = o * o;

    let poly_a = -dc * dm * ga.powu(3) + cs.a2 * ga * ga + cs.a1 * ga + cs.a0;
    let poly_f = dm * (ga.powu(3) * gb + ga * gb.powu(3))
        + 4.0 * j * ga * ga * gb * gb
        + cs.f2 * (ga * ga + gb * gb)
        + cs.f1 * ga * gb
        + cs.f0;
    let poly_b = -dc * dm * gb.powu(3) + cs.b2 * gb * gb + cs.b1 * gb + cs.b0;
    let (poly_k, _) = cs.c200_drive_polynomial(params);
    let poly_r = dc * (ga.powu(4) + gb.powu(4)) - 2.0 * j * (ga.powu(3) * gb + ga * gb.powu(3))
        + 2.0 * dc * ga * ga * gb * gb
        + cs.r1 * (ga * ga + gb * gb)
        + cs.r0 * ga * gb;
    let poly_l = dc * gb.powu(4) - 2.0 * j * ga * gb.powu(3) + cs.l2 * gb * gb + cs.l1 * gb + cs.l0;

    Ok(Amplitudes {
        c000: Complex64::ONE,
        c100: o * cs.z / cs.p,
        c010: o * cs.m_coef / cs.p,
        c001: o * cs.y / cs.p,
        c110: (o2 * cs.z * cs.m_coef + s * cs.p * poly_a / cs.q) / p2,
        c101: (o2 * cs.z * cs.y + s * cs.p * poly_f / cs.q) / p2,
        c011: (o2 * cs.y * cs.m_coef + s * cs.p * poly_b / cs.q) / p2,
        c200: (o2 * cs.z * cs.z - s * cs.p * poly_k / cs.q) / (sqrt2 * p2),
        c020: (o2 * cs.m_coef * cs.m_coef + s * cs.p * poly_r / cs.q) / (sqrt2 * p2),
        c002: (o2 * cs.y * cs.y - s * cs.p * poly_l / cs.q) / (sqrt2 * p2),
    })
}

/// Weak-drive correlation `2 |C2|^2 / |C1|^4` for a cavity mode.
pub fn g2_analytic(amps: &Amplitudes, mode: Mode) -> Result<f64> {
    let (c1, c2) = match mode {
        Mode::A => (amps.c100, amps.c200),
        Mode::B => (amps.c001, amps.c002),
        Mode::M => {
            return Err(Error::InvalidParams(
                "analytic correlation is defined for the cavity modes a and b".into(),
            ))
        }
    };
    let n1 = c1.norm_sqr();
    if n1 < 1e-300 {
        return Err(Error::UndefinedCorrelation { mode });
    }
    Ok(2.0 * c2.norm_sqr() / (n1 * n1))
}

/// Drive amplitude and phase that null `c200`:
///
/// `E exp(i phi) = O^2 Z^2 Q / (P (dt_c g_a^4 - 2 J g_b g_a^3 + K2 g_a^2
/// + K1 g_a + K0))`.
pub fn optimal_drive(params: &SystemParams) -> Result<DriveCondition> {
    params.validate()?;
    if params.o_drive == 0.0 {
        return Ok(DriveCondition {
            e_opt: 0.0,
            phi_opt: 0.0,
            phase_degenerate: true,
        });
    }
    let cs = coefficient_set(params)?;
    let (poly_k, k_scale) = cs.c200_drive_polynomial(params);
    let denom = cs.p * poly_k;
    let denom_scale = cs.p_scale * k_scale;
    if denom.norm() <= SINGULAR_REL_TOL * denom_scale || denom_scale == 0.0 {
        return Err(Error::NoOptimum);
    }
    let o = Complex64::new(params.o_drive, 0.0);
    let rhs = o * o * cs.z * cs.z * cs.q / denom;
    let mut phi_opt = rhs.arg();
    if phi_opt <= -std::f64::consts::PI {
        phi_opt += std::f64::consts::TAU;
    }
    Ok(DriveCondition {
        e_opt: rhs.norm(),
        phi_opt,
        phase_degenerate: false,
    })
}
