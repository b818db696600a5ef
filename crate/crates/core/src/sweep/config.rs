//! Flat `key = value` config parsing.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fock::Mode;
use crate::sweep::{Method, ParamKey, RunSpec, SweepAxis};

/// Parse a config document into a validated [`RunSpec`] with defaults
/// applied (`method = both`, `truncation = 2`, `modes = a,b`, flags off).
///
/// Base parameters start from [`SystemParams::default`](crate::model::SystemParams::default) and are overridden
/// key by key. Lines whose first non-blank character is `#` are comments.
pub fn parse_config(text: &str) -> Result<RunSpec> {
    let mut spec = RunSpec::default();
    let mut axes: [Option<SweepAxis>; 2] = [None, None];

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();

        let number = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Config {
                line: line_no,
                message: format!("`{v}` is not a number"),
            })
        };
        let boolean = |v: &str| -> Result<bool> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(Error::Config {
                    line: line_no,
                    message: format!("`{v}` is not true/false"),
                }),
            }
        };

        match key {
            "delta_c" | "delta_m" | "j" | "g_a" | "g_b" | "e" | "e_l" | "e_r" | "phi"
            | "o_drive" | "kappa_a" | "kappa_b" | "kappa_c" | "kappa_m" => {
                let param = ParamKey::parse(key)?;
                param.apply(&mut spec.base, number(value)?);
            }
            "unit_scale_mhz" => spec.base.unit_scale_mhz = Some(number(value)?),
            "method" => {
                spec.method = Method::parse(value).map_err(|e| Error::Config {
                    line: line_no,
                    message: e.to_string(),
                })?
            }
            "modes" => {
                let mut modes = Vec::new();
                for part in value.split(',') {
                    let mode = Mode::parse(part).map_err(|e| Error::Config {
                        line: line_no,
                        message: e.to_string(),
                    })?;
                    if mode == Mode::M {
                        return Err(Error::Config {
                            line: line_no,
                            message: "modes must be a subset of {a, b}".into(),
                        });
                    }
                    if !modes.contains(&mode) {
                        modes.push(mode);
                    }
                }
                spec.modes = modes;
            }
            "truncation" => {
                spec.truncation = value.parse::<usize>().map_err(|_| Error::Config {
                    line: line_no,
                    message: format!("`{value}` is not an integer"),
                })?
            }
            "use_optimal_drive" => spec.use_optimal_drive = boolean(value)?,
            "reverse_field" => spec.reverse_field = boolean(value)?,
            "output" => spec.output = Some(PathBuf::from(value)),
            "sweep.1" | "sweep.2" => {
                let slot = if key == "sweep.1" { 0 } else { 1 };
                if axes[slot].is_some() {
                    return Err(Error::Config {
                        line: line_no,
                        message: format!("duplicate {key}"),
                    });
                }
                axes[slot] = Some(parse_axis(value, line_no)?);
            }
            other => {
                return Err(Error::UnknownKey {
                    key: other.to_string(),
                })
            }
        }
    }

    if axes[0].is_none() && axes[1].is_some() {
        return Err(Error::InvalidParams("sweep.2 given without sweep.1".into()));
    }
    spec.axes = axes.into_iter().flatten().collect();
    spec.validate()?;
    Ok(spec)
}

fn parse_axis(value: &str, line_no: usize) -> Result<SweepAxis> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Config {
            line: line_no,
            message: format!("axis needs `param, start, stop, count`, got `{value}`"),
        });
    }
    let param = ParamKey::parse(parts[0])?;
    let number = |v: &str| -> Result<f64> {
        v.parse::<f64>().map_err(|_| Error::Config {
            line: line_no,
            message: format!("`{v}` is not a number"),
        })
    };
    let count = parts[3].parse::<usize>().map_err(|_| Error::Config {
        line: line_no,
        message: format!("`{}` is not a point count", parts[3]),
    })?;
    Ok(SweepAxis {
        param,
        start: number(parts[1])?,
        stop: number(parts[2])?,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;

    #[test]
    fn minimal_config_applies_defaults() {
        let spec = parse_config(
            "# reference point, phase axis only\n\
             o_drive = 0.01\n\
             sweep.1 = phi, 0, 6.2831853, 201\n",
        )
        .unwrap();
        assert_eq!(spec.method, Method::Both);
        assert_eq!(spec.truncation, 2);
        assert_eq!(spec.modes, vec![Mode::A, Mode::B]);
        assert!(!spec.use_optimal_drive);
        assert!(!spec.reverse_field);
        assert_eq!(spec.axes.len(), 1);
        assert_eq!(spec.axes[0].param, ParamKey::Phi);
        assert_eq!(spec.axes[0].count, 201);
        assert_eq!(spec.base, SystemParams::default());
    }

    #[test]
    fn reverse_field_swaps_effective_params() {
        let spec = parse_config(
            "g_a = 2\n\
             g_b = 0.5\n\
             reverse_field = true\n",
        )
        .unwrap();
        let eff = spec.effective_params(&[]);
        assert_eq!(eff.g_a, 0.5);
        assert_eq!(eff.g_b, 2.0);
    }

    #[test]
    fn unknown_key_is_named() {
        match parse_config("zeta = 3\n") {
            Err(Error::UnknownKey { key }) => assert_eq!(key, "zeta"),
            other => panic!("expected UnknownKey, got {other:?}"),
        }
    }

    #[test]
    fn unknown_axis_parameter_is_rejected() {
        match parse_config("sweep.1 = zeta, 0, 1, 10\n") {
            Err(Error::UnknownParameter { name }) => assert_eq!(name, "zeta"),
            other => panic!("expected UnknownParameter, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_value_reports_line() {
        match parse_config("delta_c = 2\ndelta_m = abc\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn shared_keys_set_both_fields() {
        let spec = parse_config("e = 0.25\nkappa_c = 3.5\n").unwrap();
        assert_eq!(spec.base.e_l, 0.25);
        assert_eq!(spec.base.e_r, 0.25);
        assert_eq!(spec.base.kappa_a, 3.5);
        assert_eq!(spec.base.kappa_b, 3.5);
    }

    #[test]
    fn axis_count_below_two_is_rejected() {
        assert!(parse_config("sweep.1 = phi, 0, 1, 1\n").is_err());
    }

    #[test]
    fn canonical_config_round_trips() {
        let spec = parse_config(
            "delta_c = -3.25\n\
             e = 0.001\n\
             phi = 3.14159\n\
             method = master\n\
             modes = a\n\
             truncation = 3\n\
             use_optimal_drive = true\n\
             sweep.1 = delta_m, -10, 10, 41\n\
             sweep.2 = g_a, 0.5, 4, 15\n",
        )
        .unwrap();
        let echoed = parse_config(&spec.canonical_config()).unwrap();
        assert_eq!(spec, echoed);
    }
}
