//! Built-in invariant suite behind the `check` CLI subcommand.
//!
//! Each check returns a pass/fail with a one-line detail; the CLI prints
//! one line per check and exits nonzero if any fails. This is a quick
//! self-test of an installed binary, not a replacement for `cargo test`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::fock::{destroy, lowering, FockSpace, Mode};
use crate::linalg;
use crate::liouville::{
    build_liouvillian, g2_zero, standard_decays, steady_state, steady_state_for,
};
use crate::model::{build_h_r, SystemParams};
use crate::truncated::{closed_form_amplitudes, g2_analytic, optimal_drive, truncated_solve};

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn random_params(rng: &mut impl Rng) -> SystemParams {
    let kappa = rng.random_range(0.5..5.0);
    let e = rng.random_range(0.0..0.01);
    SystemParams {
        delta_c: rng.random_range(-5.0..5.0),
        delta_m: rng.random_range(-5.0..5.0),
        j: rng.random_range(-5.0..5.0),
        g_a: rng.random_range(-5.0..5.0),
        g_b: rng.random_range(-5.0..5.0),
        e_l: e,
        e_r: e,
        phi: rng.random_range(0.0..std::f64::consts::TAU),
        o_drive: rng.random_range(0.0001..0.01),
        kappa_a: kappa,
        kappa_b: kappa,
        kappa_m: 1.0,
        unit_scale_mhz: None,
    }
}

/// Run the whole suite; deterministic (seeded) random draws.
pub fn run_all() -> Vec<CheckResult> {
    let mut results = Vec::new();
    let reference = SystemParams::default();

    // ladder commutator on every mode dimension in use
    {
        let mut worst: f64 = 0.0;
        for d in 2..=4 {
            let a = destroy(d).expect("d >= 2");
            let ad = linalg::dagger(&a);
            let comm = a.dot(&ad) - ad.dot(&a);
            for i in 0..d - 1 {
                worst = worst.max((comm[(i, i)] - Complex64::ONE).norm());
            }
        }
        results.push(check(
            "ladder commutator [a, a+] = 1 below truncation edge",
            worst <= 1e-14,
            format!("max deviation {worst:.2e}"),
        ));
    }

    // embedded operators on different modes commute
    {
        let space = FockSpace::with_max_occupation(2).expect("valid dims");
        let a = lowering(&space, Mode::A);
        let m = lowering(&space, Mode::M);
        let worst = (&(&a * &m) - &(&m * &a)).max_abs();
        results.push(check(
            "embedded modes commute",
            worst <= 1e-14,
            format!("max |[a, m]| = {worst:.2e}"),
        ));
    }

    // Hamiltonian hermiticity on random parameters
    {
        let mut rng = rand::rngs::StdRng::seed_from_u64(101);
        let space = FockSpace::with_max_occupation(2).expect("valid dims");
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let p = random_params(&mut rng);
            let h = build_h_r(&p, &space).expect("valid params");
            worst = worst.max(h.hermiticity_error());
        }
        results.push(check(
            "rotating-frame Hamiltonian is Hermitian",
            worst <= 1e-14,
            format!("max deviation {worst:.2e}"),
        ));
    }

    // Liouvillian trace row
    {
        let space = FockSpace::with_max_occupation(2).expect("valid dims");
        let p = SystemParams {
            e_l: 1e-4,
            e_r: 1e-4,
            phi: 1.0,
            ..reference.clone()
        };
        let h = build_h_r(&p, &space).expect("valid params");
        let l = build_liouvillian(&h, &standard_decays(&p, &space)).expect("valid generator");
        let defect = l.trace_row_defect();
        let bound = 1e-12 * l.max_abs();
        results.push(check(
            "Liouvillian preserves trace",
            defect <= bound,
            format!("trace-row defect {defect:.2e} (bound {bound:.2e})"),
        ));
    }

    // steady state at the reference optimum
    {
        let mut p = reference.clone();
        match optimal_drive(&p) {
            Ok(d) => {
                p.e_l = d.e_opt;
                p.e_r = d.e_opt;
                p.phi = d.phi_opt;
            }
            Err(e) => {
                results.push(check("optimal drive at reference", false, e.to_string()));
                return results;
            }
        }
        let space = FockSpace::with_max_occupation(2).expect("valid dims");
        let h = build_h_r(&p, &space).expect("valid params");
        let l = build_liouvillian(&h, &standard_decays(&p, &space)).expect("valid generator");
        match steady_state(&l) {
            Ok(rho) => {
                let res = l
                    .apply(&crate::liouville::vectorize(rho.matrix()))
                    .iter()
                    .fold(0.0f64, |acc, z| acc.max(z.norm()));
                let min_ev = rho.min_eigenvalue().unwrap_or(f64::NAN);
                let tr_err = (rho.trace() - Complex64::ONE).norm();
                results.push(check(
                    "steady state: residual, trace, positivity",
                    res <= 1e-10 && tr_err <= 1e-10 && min_ev >= -1e-10,
                    format!(
                        "residual {res:.2e}, trace error {tr_err:.2e}, min eigenvalue {min_ev:.2e}"
                    ),
                ));

                let g2a = g2_zero(&rho, Mode::A).unwrap_or(f64::NAN);
                let g2b = g2_zero(&rho, Mode::B).unwrap_or(f64::NAN);
                results.push(check(
                    "directional blockade at the reference optimum",
                    g2a < 1e-2 && g2b > 1.0,
                    format!("g2_a = {g2a:.3e}, g2_b = {g2b:.3e}"),
                ));
            }
            Err(e) => results.push(check("steady state at reference", false, e.to_string())),
        }
    }

    // closed form vs oracle
    {
        let mut rng = rand::rngs::StdRng::seed_from_u64(202);
        let mut worst: f64 = 0.0;
        let mut tested = 0;
        let mut attempts = 0;
        while tested < 50 && attempts < 10_000 {
            attempts += 1;
            let p = random_params(&mut rng);
            let Ok(closed) = closed_form_amplitudes(&p) else {
                continue;
            };
            let oracle = truncated_solve(&p).expect("oracle solves where closed form does");
            for ((_, x), (_, y)) in closed.entries().iter().zip(oracle.entries().iter()) {
                let denom = x.norm().max(y.norm()).max(1e-250);
                worst = worst.max((x - y).norm() / denom);
            }
            tested += 1;
        }
        results.push(check(
            "closed-form amplitudes match block solve (50 draws)",
            worst <= 1e-8,
            format!("worst relative deviation {worst:.2e}"),
        ));
    }

    // optimal drive nulls the pair amplitude
    {
        let mut rng = rand::rngs::StdRng::seed_from_u64(303);
        let mut worst: f64 = 0.0;
        let mut tested = 0;
        let mut attempts = 0;
        while tested < 20 && attempts < 10_000 {
            attempts += 1;
            let mut p = random_params(&mut rng);
            let Ok(d) = optimal_drive(&p) else { continue };
            p.e_l = d.e_opt;
            p.e_r = d.e_opt;
            p.phi = d.phi_opt;
            let Ok(amps) = closed_form_amplitudes(&p) else {
                continue;
            };
            let baseline = closed_form_amplitudes(&SystemParams {
                e_l: 0.0,
                e_r: 0.0,
                ..p.clone()
            })
            .expect("drive-free point is regular here");
            if baseline.c200.norm() < 1e-30 {
                continue;
            }
            worst = worst.max(amps.c200.norm() / baseline.c200.norm());
            tested += 1;
        }
        results.push(check(
            "optimal drive nulls the pair amplitude (20 draws)",
            worst <= 1e-12,
            format!("worst |c200| / baseline = {worst:.2e}"),
        ));
    }

    // chirality reversal symmetry, analytic and master route
    {
        let p = SystemParams {
            g_b: 0.3,
            j: 0.5,
            e_l: 1e-3,
            e_r: 1e-3,
            phi: 2.0,
            ..reference.clone()
        };
        let fwd = steady_state_for(&p, 2);
        let rev = steady_state_for(&p.swapped(), 2);
        let master_dev = match (&fwd, &rev) {
            (Ok(f), Ok(r)) => {
                let a = g2_zero(f, Mode::A).unwrap_or(f64::NAN);
                let b = g2_zero(r, Mode::B).unwrap_or(f64::NAN);
                (a - b).abs() / a.abs().max(1e-300)
            }
            _ => f64::NAN,
        };
        let analytic_dev = match (
            closed_form_amplitudes(&p).and_then(|a| g2_analytic(&a, Mode::A)),
            closed_form_amplitudes(&p.swapped()).and_then(|a| g2_analytic(&a, Mode::B)),
        ) {
            (Ok(a), Ok(b)) => (a - b).abs() / a.abs().max(1e-300),
            _ => f64::NAN,
        };
        results.push(check(
            "field reversal swaps the mode statistics",
            master_dev <= 1e-8 && analytic_dev <= 1e-10,
            format!("master deviation {master_dev:.2e}, analytic deviation {analytic_dev:.2e}"),
        ));
    }

    // analytic vs master agreement in the weak-drive regime
    {
        let mut p = SystemParams {
            o_drive: 1e-3,
            ..reference.clone()
        };
        let d = optimal_drive(&p).expect("reference optimum exists");
        p.e_l = d.e_opt / 10.0;
        p.e_r = p.e_l;
        p.phi = 1.0;
        let ana = closed_form_amplitudes(&p)
            .and_then(|a| g2_analytic(&a, Mode::A))
            .unwrap_or(f64::NAN);
        let mst = steady_state_for(&p, 2)
            .and_then(|r| g2_zero(&r, Mode::A))
            .unwrap_or(f64::NAN);
        let dev = (ana - mst).abs() / mst.abs().max(1e-300);
        results.push(check(
            "analytic g2 tracks the master equation (weak drive)",
            dev <= 0.2,
            format!("relative deviation {dev:.2e}"),
        ));
    }

    results
}
