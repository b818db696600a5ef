//! Physical parameter set and Hamiltonian assembly.
//!
//! All rates and detunings are expressed in units of the magnon linewidth
//! `kappa_m`; the canonical form has `kappa_m = 1`. Two counter-rotating
//! cavity modes (a, b) share the detuning `delta_c` and couple to the magnon
//! mode m with chiral strengths `g_a`, `g_b`. Both cavity modes receive a
//! two-photon drive with shared phase `phi`; a weak probe `o_drive` feeds
//! the magnon.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{lowering, FockSpace, Mode, Operator};

/// All physical rates, detunings and drives of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Cavity detuning from the probe (shared by both rotating modes).
    pub delta_c: f64,
    /// Magnon detuning from the probe.
    pub delta_m: f64,
    /// Backscattering coupling between the two cavity modes.
    pub j: f64,
    /// Magnon coupling to the counterclockwise mode.
    pub g_a: f64,
    /// Magnon coupling to the clockwise mode.
    pub g_b: f64,
    /// Two-photon drive amplitude on mode a (left port).
    pub e_l: f64,
    /// Two-photon drive amplitude on mode b (right port).
    pub e_r: f64,
    /// Shared two-photon drive phase (radians).
    pub phi: f64,
    /// Magnon probe amplitude.
    pub o_drive: f64,
    /// Decay rate of mode a.
    pub kappa_a: f64,
    /// Decay rate of mode b.
    pub kappa_b: f64,
    /// Decay rate of the magnon mode (the unit; 1 in canonical form).
    pub kappa_m: f64,
    /// Physical value of `kappa_m` in MHz, for I/O conversion only.
    pub unit_scale_mhz: Option<f64>,
}

impl Default for SystemParams {
    /// Reference operating point: ideal chirality (`g_b = 0`), uncoupled
    /// cavity modes, weak magnon probe, cavity linewidth 2.5 kappa_m.
    fn default() -> Self {
        SystemParams {
            delta_c: 2.0,
            delta_m: 2.0,
            j: 0.0,
            g_a: 2.0,
            g_b: 0.0,
            e_l: 0.0,
            e_r: 0.0,
            phi: 0.0,
            o_drive: 0.01,
            kappa_a: 2.5,
            kappa_b: 2.5,
            kappa_m: 1.0,
            unit_scale_mhz: None,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.delta_c,
            self.delta_m,
            self.j,
            self.g_a,
            self.g_b,
            self.e_l,
            self.e_r,
            self.phi,
            self.o_drive,
            self.kappa_a,
            self.kappa_b,
            self.kappa_m,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.kappa_a <= 0.0 || self.kappa_b <= 0.0 || self.kappa_m <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "decay rates must be strictly positive (kappa_a={}, kappa_b={}, kappa_m={})",
                self.kappa_a, self.kappa_b, self.kappa_m
            )));
        }
        if self.e_l < 0.0 || self.e_r < 0.0 || self.o_drive < 0.0 {
            return Err(Error::InvalidParams(
                "drive amplitudes must be non-negative; the phase is carried by phi".into(),
            ));
        }
        Ok(())
    }

    /// Rescale every rate-dimensioned field by `kappa_m` so that
    /// `kappa_m = 1` afterwards.
    pub fn normalized(&self) -> Result<SystemParams> {
        self.validate()?;
        let k = self.kappa_m;
        Ok(SystemParams {
            delta_c: self.delta_c / k,
            delta_m: self.delta_m / k,
            j: self.j / k,
            g_a: self.g_a / k,
            g_b: self.g_b / k,
            e_l: self.e_l / k,
            e_r: self.e_r / k,
            phi: self.phi,
            o_drive: self.o_drive / k,
            kappa_a: self.kappa_a / k,
            kappa_b: self.kappa_b / k,
            kappa_m: 1.0,
            unit_scale_mhz: self.unit_scale_mhz,
        })
    }

    pub fn is_canonical(&self) -> bool {
        self.kappa_m == 1.0
    }

    /// Relabel a <-> b: exchanges `(g_a, g_b)`, `(e_l, e_r)`,
    /// `(kappa_a, kappa_b)`. Physically: reversing the bias magnetic field.
    pub fn swapped(&self) -> SystemParams {
        SystemParams {
            g_a: self.g_b,
            g_b: self.g_a,
            e_l: self.e_r,
            e_r: self.e_l,
            kappa_a: self.kappa_b,
            kappa_b: self.kappa_a,
            ..self.clone()
        }
    }

    /// Shared cavity linewidth; requires `kappa_a = kappa_b`.
    pub fn kappa_c(&self) -> Result<f64> {
        let scale = self.kappa_a.abs().max(self.kappa_b.abs());
        if (self.kappa_a - self.kappa_b).abs() > 1e-12 * scale {
            return Err(Error::UnsupportedAsymmetry {
                what: "kappa_a and kappa_b",
                left: self.kappa_a,
                right: self.kappa_b,
            });
        }
        Ok(self.kappa_a)
    }

    /// Shared two-photon drive amplitude; requires `e_l = e_r`.
    pub fn drive_amplitude(&self) -> Result<f64> {
        let scale = self.e_l.abs().max(self.e_r.abs());
        if (self.e_l - self.e_r).abs() > 1e-12 * scale {
            return Err(Error::UnsupportedAsymmetry {
                what: "e_l and e_r",
                left: self.e_l,
                right: self.e_r,
            });
        }
        Ok(self.e_l)
    }
}

/// Detunings with half the decay rate folded in as a negative imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDetunings {
    /// `delta_c - i kappa_c / 2`
    pub dt_c: Complex64,
    /// `delta_m - i kappa_m / 2`
    pub dt_m: Complex64,
}

/// Fold decay into the detunings; the cavity rate is taken as `kappa_a`
/// and requires `kappa_a = kappa_b`.
pub fn complex_detunings(params: &SystemParams) -> Result<ComplexDetunings> {
    params.validate()?;
    let kappa_c = params.kappa_c()?;
    Ok(ComplexDetunings {
        dt_c: Complex64::new(params.delta_c, -kappa_c / 2.0),
        dt_m: Complex64::new(params.delta_m, -params.kappa_m / 2.0),
    })
}

/// `amplitude * exp(i phi)` with the phase reduced to `[0, 2pi)` first, so
/// outputs are bit-for-bit periodic in `phi`.
pub fn drive_phase(amplitude: f64, phi: f64) -> Complex64 {
    Complex64::from_polar(amplitude, phi.rem_euclid(TAU))
}

/// Rotating-frame Hamiltonian; exactly Hermitian by construction.
pub fn build_h_r(params: &SystemParams, space: &FockSpace) -> Result<Operator> {
    params.validate()?;
    let a = lowering(space, Mode::A);
    let m = lowering(space, Mode::M);
    let b = lowering(space, Mode::B);
    let (ad, md, bd) = (a.dagger(), m.dagger(), b.dagger());

    let mut h = &(&(&ad * &a) + &(&bd * &b)) * params.delta_c;
    h = &h + &(&(&md * &m) * params.delta_m);
    h = &h + &(&(&ad * &b) * params.j).plus_dagger();
    h = &h + &(&(&ad * &m) * params.g_a).plus_dagger();
    h = &h + &(&(&bd * &m) * params.g_b).plus_dagger();
    h = &h + &(&(&ad * &ad) * drive_phase(params.e_l, params.phi)).plus_dagger();
    h = &h + &(&(&bd * &bd) * drive_phase(params.e_r, params.phi)).plus_dagger();
    h = &h + &(&md * params.o_drive).plus_dagger();
    Ok(h)
}

/// Effective non-Hermitian Hamiltonian: `H_r - i/2 (kappa_a n_a + kappa_b n_b
/// + kappa_m n_m)`.
pub fn build_h_eff(params: &SystemParams, space: &FockSpace) -> Result<Operator> {
    let h_r = build_h_r(params, space)?;
    let mut h = h_r;
    for (mode, kappa) in [
        (Mode::A, params.kappa_a),
        (Mode::B, params.kappa_b),
        (Mode::M, params.kappa_m),
    ] {
        let x = lowering(space, mode);
        let n = &x.dagger() * &x;
        h = &h + &(&n * Complex64::new(0.0, -kappa / 2.0));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_params(rng: &mut impl Rng) -> SystemParams {
        SystemParams {
            delta_c: rng.random_range(-5.0..5.0),
            delta_m: rng.random_range(-5.0..5.0),
            j: rng.random_range(-5.0..5.0),
            g_a: rng.random_range(-5.0..5.0),
            g_b: rng.random_range(-5.0..5.0),
            e_l: rng.random_range(0.0..0.1),
            e_r: rng.random_range(0.0..0.1),
            phi: rng.random_range(0.0..TAU),
            o_drive: rng.random_range(0.0..0.1),
            kappa_a: rng.random_range(0.5..5.0),
            kappa_b: rng.random_range(0.5..5.0),
            kappa_m: 1.0,
            unit_scale_mhz: None,
        }
    }

    #[test]
    fn complex_detunings_reference_point() {
        // kappa_c = 2.5 kappa_m, delta_c = 2 -> dt_c = 2 - 1.25i
        let params = SystemParams::default();
        let dt = complex_detunings(&params).unwrap();
        assert!((dt.dt_c - c(2.0, -1.25)).norm() < 1e-15);
        // resonant magnon with kappa_m = 1 -> dt_m = -0.5i
        let resonant = SystemParams {
            delta_m: 0.0,
            ..SystemParams::default()
        };
        let dt = complex_detunings(&resonant).unwrap();
        assert!((dt.dt_m - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn complex_detunings_lossless_limit() {
        let params = SystemParams {
            delta_c: 0.0,
            kappa_a: 1e-12,
            kappa_b: 1e-12,
            ..SystemParams::default()
        };
        let dt = complex_detunings(&params).unwrap();
        assert!(dt.dt_c.norm() < 1e-12);
        assert!(dt.dt_c.im < 0.0);
    }

    #[test]
    fn complex_detunings_rejects_asymmetric_kappa() {
        let params = SystemParams {
            kappa_b: 3.0,
            ..SystemParams::default()
        };
        assert!(matches!(
            complex_detunings(&params),
            Err(Error::UnsupportedAsymmetry { .. })
        ));
    }

    #[test]
    fn normalization_enforces_unit_kappa_m() {
        let params = SystemParams {
            delta_c: 4.0,
            kappa_a: 5.0,
            kappa_b: 5.0,
            kappa_m: 2.0,
            o_drive: 0.02,
            ..SystemParams::default()
        };
        let n = params.normalized().unwrap();
        assert!(n.is_canonical());
        assert_eq!(n.delta_c, 2.0);
        assert_eq!(n.kappa_a, 2.5);
        assert_eq!(n.o_drive, 0.01);
    }

    #[test]
    fn validation_rejects_bad_rates_and_drives() {
        let mut p = SystemParams::default();
        p.kappa_m = 0.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::default();
        p.e_l = -0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn h_r_pure_detuning_is_diagonal() {
        let space = FockSpace::new([3, 3, 3]).unwrap();
        let params = SystemParams {
            delta_c: 1.0,
            delta_m: 2.0,
            j: 0.0,
            g_a: 0.0,
            g_b: 0.0,
            e_l: 0.0,
            e_r: 0.0,
            o_drive: 0.0,
            ..SystemParams::default()
        };
        let h = build_h_r(&params, &space).unwrap();
        for i in 0..space.dim() {
            let [na, nm, nb] = space.occupation_at(i);
            let expect = c((na + nb) as f64 + 2.0 * nm as f64, 0.0);
            // sqrt(n)^2 in the a†a products costs a few ulps
            assert!((h.matrix()[(i, i)] - expect).norm() < 1e-14);
            for j in 0..space.dim() {
                if i != j {
                    assert_eq!(h.matrix()[(i, j)], Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn h_r_beam_splitter_element() {
        let space = FockSpace::new([2, 2, 2]).unwrap();
        let params = SystemParams {
            delta_c: 0.0,
            delta_m: 0.0,
            j: 1.0,
            g_a: 0.0,
            g_b: 0.0,
            o_drive: 0.0,
            ..SystemParams::default()
        };
        let h = build_h_r(&params, &space).unwrap();
        let row = space.index_of([1, 0, 0]).unwrap();
        let col = space.index_of([0, 0, 1]).unwrap();
        assert!((h.matrix()[(row, col)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn h_r_two_photon_drive_element() {
        let space = FockSpace::new([3, 2, 2]).unwrap();
        let params = SystemParams {
            delta_c: 0.0,
            delta_m: 0.0,
            g_a: 0.0,
            e_l: 1.0,
            phi: 0.0,
            o_drive: 0.0,
            ..SystemParams::default()
        };
        let h = build_h_r(&params, &space).unwrap();
        let row = space.index_of([2, 0, 0]).unwrap();
        let col = space.index_of([0, 0, 0]).unwrap();
        assert!((h.matrix()[(row, col)] - c(2.0f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn h_r_is_exactly_hermitian() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let space = FockSpace::new([3, 3, 3]).unwrap();
        for _ in 0..20 {
            let params = random_params(&mut rng);
            let h = build_h_r(&params, &space).unwrap();
            assert!(h.hermiticity_error() <= 1e-14);
        }
    }

    #[test]
    fn h_eff_adds_diagonal_decay() {
        let space = FockSpace::new([3, 3, 3]).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let params = random_params(&mut rng);
        let h_r = build_h_r(&params, &space).unwrap();
        let h_eff = build_h_eff(&params, &space).unwrap();
        let diff = &h_eff - &h_r;
        for i in 0..space.dim() {
            let [na, nm, nb] = space.occupation_at(i);
            let expect = c(
                0.0,
                -(params.kappa_a * na as f64
                    + params.kappa_m * nm as f64
                    + params.kappa_b * nb as f64)
                    / 2.0,
            );
            assert!((diff.matrix()[(i, i)] - expect).norm() < 1e-14);
            for j in 0..space.dim() {
                if i != j {
                    assert_eq!(diff.matrix()[(i, j)], Complex64::ZERO);
                }
            }
            // anti-Hermitian part is -i times a non-negative diagonal
            assert!(expect.im <= 0.0);
        }
    }

    #[test]
    fn h_eff_lossless_limit_reduces_to_h_r() {
        let space = FockSpace::new([2, 2, 2]).unwrap();
        let params = SystemParams {
            kappa_a: 1e-300,
            kappa_b: 1e-300,
            kappa_m: 1e-300,
            ..SystemParams::default()
        };
        let h_r = build_h_r(&params, &space).unwrap();
        let h_eff = build_h_eff(&params, &space).unwrap();
        assert!((&h_eff - &h_r).max_abs() < 1e-299);
    }

    #[test]
    fn h_eff_reference_single_photon_element() {
        // <100| H_eff |100> = delta_c - i kappa_c / 2 = 2 - 1.25i
        let space = FockSpace::new([3, 3, 3]).unwrap();
        let params = SystemParams::default();
        let h = build_h_eff(&params, &space).unwrap();
        let idx = space.index_of([1, 0, 0]).unwrap();
        assert!((h.matrix()[(idx, idx)] - c(2.0, -1.25)).norm() < 1e-14);
    }

    #[test]
    fn relabel_symmetry_under_slot_permutation() {
        // Exchanging (g_a, g_b), (e_l, e_r), (kappa_a, kappa_b) and permuting
        // the a and b tensor slots leaves the Hamiltonian invariant.
        let space = FockSpace::new([3, 3, 3]).unwrap();
        let d = space.dim();
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for _ in 0..10 {
            let params = random_params(&mut rng);
            let h_fwd = build_h_r(&params, &space).unwrap();
            let h_swp = build_h_r(&params.swapped(), &space).unwrap();
            let perm: Vec<usize> = (0..d)
                .map(|i| {
                    let [na, nm, nb] = space.occupation_at(i);
                    space.index_of([nb, nm, na]).unwrap()
                })
                .collect();
            for i in 0..d {
                for j in 0..d {
                    let lhs = h_fwd.matrix()[(i, j)];
                    let rhs = h_swp.matrix()[(perm[i], perm[j])];
                    assert!(
                        (lhs - rhs).norm() <= 1e-14,
                        "permutation symmetry broken at ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn drive_phase_is_bitwise_periodic() {
        // 0.5 + 2pi is exactly representable, so the reduced phase and the
        // resulting complex drive must match bit for bit.
        let z0 = drive_phase(0.25, 0.5);
        let z1 = drive_phase(0.25, 0.5 + TAU);
        assert_eq!(z0, z1);
    }
}
