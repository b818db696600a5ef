//! Grid evaluation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liouville::{g2_zero, steady_state_for};
use crate::sweep::{ResultTable, RunSpec};
use crate::truncated::{closed_form_amplitudes, g2_analytic, optimal_drive};
use crate::VERSION;

/// Row status codes, mirroring the CLI exit codes.
const STATUS_OK: f64 = 0.0;
const STATUS_SOLVER_ERROR: f64 = 2.0;

/// Run the sweep over the full Cartesian grid (axis 1 outer, axis 2 inner).
///
/// Points are evaluated in parallel on the ambient rayon pool; the table is
/// assembled in grid order regardless of completion order, so any degree of
/// parallelism yields byte-identical output. Per-point solver errors land in
/// the `status` column (2 = solver error) with the affected cells left
/// empty; decoupled analytic modes and empty master modes are empty fields
/// with status 0.
pub fn run_sweep(spec: &RunSpec) -> Result<ResultTable> {
    spec.validate()?;

    let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let grid: Vec<Vec<f64>> = match axis_values.len() {
        0 => vec![vec![]],
        1 => axis_values[0].iter().map(|&v| vec![v]).collect(),
        _ => {
            let mut g = Vec::with_capacity(axis_values[0].len() * axis_values[1].len());
            for &v1 in &axis_values[0] {
                for &v2 in &axis_values[1] {
                    g.push(vec![v1, v2]);
                }
            }
            g
        }
    };

    let rows: Vec<Vec<Option<f64>>> = grid
        .par_iter()
        .map(|point| evaluate_point(spec, point))
        .collect();

    let mut provenance = vec![format!("magnon-blockade sweep v{VERSION}")];
    provenance.extend(spec.canonical_config().lines().map(String::from));

    let table = ResultTable {
        columns: column_names(spec),
        rows,
        provenance,
    };
    table.validate()?;
    Ok(table)
}

fn column_names(spec: &RunSpec) -> Vec<String> {
    let mut cols: Vec<String> = spec
        .axes
        .iter()
        .map(|a| a.param.name().to_string())
        .collect();
    for mode in &spec.modes {
        if spec.method.analytic() {
            cols.push(format!("g2_{mode}_analytic"));
            cols.push(format!("log10_g2_{mode}_analytic"));
        }
        if spec.method.master() {
            cols.push(format!("g2_{mode}_master"));
            cols.push(format!("log10_g2_{mode}_master"));
        }
    }
    if spec.method.master() {
        for mode in &spec.modes {
            cols.push(format!("n_{mode}"));
        }
    }
    if spec.use_optimal_drive {
        cols.push("e_opt".to_string());
        cols.push("phi_opt".to_string());
    }
    cols.push("status".to_string());
    cols
}

fn evaluate_point(spec: &RunSpec, axis_values: &[f64]) -> Vec<Option<f64>> {
    let mut row: Vec<Option<f64>> = axis_values.iter().map(|&v| Some(v)).collect();
    let mut status = STATUS_OK;

    let forward = spec
        .forward_params(axis_values)
        .normalized()
        .unwrap_or_else(|_| spec.forward_params(axis_values));

    // Recompute the optimal drive on the forward parameters, then reverse
    // the field; the reversed run reuses the forward drive numbers.
    let mut drive_cols: Vec<Option<f64>> = Vec::new();
    let mut driven = forward;
    if spec.use_optimal_drive {
        match optimal_drive(&driven) {
            Ok(d) => {
                driven.e_l = d.e_opt;
                driven.e_r = d.e_opt;
                drive_cols.push(Some(d.e_opt));
                drive_cols.push(if d.phase_degenerate {
                    None
                } else {
                    Some(d.phi_opt)
                });
            }
            Err(_) => {
                status = STATUS_SOLVER_ERROR;
                drive_cols.push(None);
                drive_cols.push(None);
            }
        }
    }
    let effective = if spec.reverse_field {
        driven.swapped()
    } else {
        driven
    };

    let analytic = if spec.method.analytic() {
        match closed_form_amplitudes(&effective) {
            Ok(a) => Some(a),
            Err(_) => {
                status = STATUS_SOLVER_ERROR;
                None
            }
        }
    } else {
        None
    };
    let rho = if spec.method.master() {
        match steady_state_for(&effective, spec.truncation) {
            Ok(r) => Some(r),
            Err(_) => {
                status = STATUS_SOLVER_ERROR;
                None
            }
        }
    } else {
        None
    };

    for &mode in &spec.modes {
        if spec.method.analytic() {
            let g2 = analytic.as_ref().and_then(|amps| {
                match g2_analytic(amps, mode) {
                    Ok(v) => Some(v),
                    // decoupled mode: sentinel, not an error
                    Err(Error::UndefinedCorrelation { .. }) => None,
                    Err(_) => None,
                }
            });
            push_g2_pair(&mut row, g2);
        }
        if spec.method.master() {
            let g2 = rho.as_ref().and_then(|r| match g2_zero(r, mode) {
                Ok(v) => Some(v),
                Err(Error::EmptyMode { .. }) => None,
                Err(_) => None,
            });
            push_g2_pair(&mut row, g2);
        }
    }
    if spec.method.master() {
        for &mode in &spec.modes {
            row.push(rho.as_ref().and_then(|r| r.occupation(mode).ok()));
        }
    }
    row.extend(drive_cols);
    row.push(Some(status));
    row
}

/// Append `g2` and `log10 g2`; the log is a sentinel unless `g2 > 0`.
fn push_g2_pair(row: &mut Vec<Option<f64>>, g2: Option<f64>) {
    row.push(g2);
    row.push(g2.and_then(|v| if v > 0.0 { Some(v.log10()) } else { None }));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::parse_config;

    #[test]
    fn undriven_single_point_is_vacuum() {
        let spec = parse_config(
            "o_drive = 0\n\
             e = 0\n\
             method = master\n",
        )
        .unwrap();
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 1);
        let n_a = table.rows[0][table.column("n_a").unwrap()].unwrap();
        let n_b = table.rows[0][table.column("n_b").unwrap()].unwrap();
        assert!(n_a.abs() <= 1e-12 && n_b.abs() <= 1e-12);
        // empty cavity: g2 columns are sentinels, status is ok
        assert!(table.rows[0][table.column("g2_a_master").unwrap()].is_none());
        assert_eq!(
            table.rows[0][table.column("status").unwrap()],
            Some(STATUS_OK)
        );
    }

    #[test]
    fn decoupled_analytic_mode_is_sentinel() {
        let spec = parse_config(
            "g_b = 0\n\
             j = 0\n\
             e = 0.0001\n\
             method = analytic\n",
        )
        .unwrap();
        let table = run_sweep(&spec).unwrap();
        assert!(table.rows[0][table.column("g2_a_analytic").unwrap()].is_some());
        assert!(table.rows[0][table.column("g2_b_analytic").unwrap()].is_none());
        assert_eq!(
            table.rows[0][table.column("status").unwrap()],
            Some(STATUS_OK)
        );
    }

    #[test]
    fn grid_is_cartesian_in_row_major_order() {
        let spec = parse_config(
            "method = analytic\n\
             e = 0.0001\n\
             g_b = 0.4\n\
             sweep.1 = delta_m, 0, 1, 2\n\
             sweep.2 = phi, 0, 3, 3\n",
        )
        .unwrap();
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 6);
        let dm: Vec<f64> = table.rows.iter().map(|r| r[0].unwrap()).collect();
        let phi: Vec<f64> = table.rows.iter().map(|r| r[1].unwrap()).collect();
        assert_eq!(dm, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(phi, vec![0.0, 1.5, 3.0, 0.0, 1.5, 3.0]);
    }

    #[test]
    fn parallel_equals_serial() {
        let config = "use_optimal_drive = true\n\
                      g_b = 0.1\n\
                      sweep.1 = phi, 0, 6.283185307179586, 9\n";
        let spec = parse_config(config).unwrap();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_sweep(&spec).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_sweep(&spec).unwrap());
        assert_eq!(serial.to_csv_string(), parallel.to_csv_string());
    }

    #[test]
    fn determinism_across_repeat_runs() {
        let spec = parse_config(
            "use_optimal_drive = true\n\
             sweep.1 = delta_m, -2, 2, 5\n",
        )
        .unwrap();
        let a = run_sweep(&spec).unwrap().to_csv_string();
        let b = run_sweep(&spec).unwrap().to_csv_string();
        assert_eq!(a, b);
    }

    #[test]
    fn provenance_echoes_normalized_config() {
        let spec = parse_config("e = 0.001\nsweep.1 = phi, 0, 1, 3\n").unwrap();
        let table = run_sweep(&spec).unwrap();
        let echo: Vec<&str> = table
            .provenance
            .iter()
            .skip(1)
            .map(|s| s.as_str())
            .collect();
        let reparsed = parse_config(&echo.join("\n")).unwrap();
        assert_eq!(reparsed, spec);
    }

    #[test]
    fn reversed_run_mirrors_mode_columns() {
        let forward = parse_config(
            "g_a = 2\n\
             g_b = 0.2\n\
             j = 0.3\n\
             use_optimal_drive = true\n\
             sweep.1 = phi, 0, 6.283185307179586, 7\n",
        )
        .unwrap();
        let mut reversed = forward.clone();
        reversed.reverse_field = true;
        let t_fwd = run_sweep(&forward).unwrap();
        let t_rev = run_sweep(&reversed).unwrap();
        for (name_a, name_b) in [
            ("g2_a_master", "g2_b_master"),
            ("g2_b_master", "g2_a_master"),
            ("g2_a_analytic", "g2_b_analytic"),
            ("n_a", "n_b"),
        ] {
            let fwd = t_fwd.column_values(name_a);
            let rev = t_rev.column_values(name_b);
            assert_eq!(fwd.len(), rev.len(), "{name_a} vs reversed {name_b}");
            for (x, y) in fwd.iter().zip(&rev) {
                assert!(
                    (x - y).abs() <= 1e-8 * x.abs().max(y.abs()).max(1e-300),
                    "{name_a} {x} vs reversed {name_b} {y}"
                );
            }
        }
    }
}
