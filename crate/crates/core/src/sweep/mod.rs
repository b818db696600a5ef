//! Parameter sweeps and CSV emission.
//!
//! A [`RunSpec`] holds the base parameters, up to two sweep axes, the
//! computation method and output options. [`run_sweep`] evaluates every grid
//! point (in parallel, in deterministic grid order) and [`write_csv`] emits
//! the table with a `#`-prefixed provenance header.
//!
//! The config format is flat UTF-8 text, one `key = value` per line, with
//! `#` starting a comment line. Sweep axes are written
//! `sweep.1 = <param>, <start>, <stop>, <count>`.

mod config;
mod run;
mod table;

pub use config::parse_config;
pub use run::run_sweep;
pub use table::{write_csv, ResultTable};

use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fock::Mode;
use crate::model::SystemParams;

/// Which computation route(s) a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    Analytic,
    Master,
    #[default]
    Both,
}

impl Method {
    pub fn parse(s: &str) -> Result<Method> {
        match s.trim() {
            "analytic" => Ok(Method::Analytic),
            "master" => Ok(Method::Master),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidParams(format!(
                "method must be analytic, master or both (got `{other}`)"
            ))),
        }
    }

    pub fn analytic(self) -> bool {
        matches!(self, Method::Analytic | Method::Both)
    }

    pub fn master(self) -> bool {
        matches!(self, Method::Master | Method::Both)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Analytic => "analytic",
            Method::Master => "master",
            Method::Both => "both",
        };
        write!(f, "{s}")
    }
}

/// A sweepable parameter. `E` and `KappaC` set both port/mode values at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKey {
    DeltaC,
    DeltaM,
    J,
    GA,
    GB,
    E,
    EL,
    ER,
    Phi,
    ODrive,
    KappaA,
    KappaB,
    KappaC,
    KappaM,
}

impl ParamKey {
    pub const ALL: [ParamKey; 14] = [
        ParamKey::DeltaC,
        ParamKey::DeltaM,
        ParamKey::J,
        ParamKey::GA,
        ParamKey::GB,
        ParamKey::E,
        ParamKey::EL,
        ParamKey::ER,
        ParamKey::Phi,
        ParamKey::ODrive,
        ParamKey::KappaA,
        ParamKey::KappaB,
        ParamKey::KappaC,
        ParamKey::KappaM,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamKey::DeltaC => "delta_c",
            ParamKey::DeltaM => "delta_m",
            ParamKey::J => "j",
            ParamKey::GA => "g_a",
            ParamKey::GB => "g_b",
            ParamKey::E => "e",
            ParamKey::EL => "e_l",
            ParamKey::ER => "e_r",
            ParamKey::Phi => "phi",
            ParamKey::ODrive => "o_drive",
            ParamKey::KappaA => "kappa_a",
            ParamKey::KappaB => "kappa_b",
            ParamKey::KappaC => "kappa_c",
            ParamKey::KappaM => "kappa_m",
        }
    }

    pub fn parse(s: &str) -> Result<ParamKey> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::UnknownParameter {
                name: s.trim().to_string(),
            })
    }

    pub fn apply(self, params: &mut SystemParams, value: f64) {
        match self {
            ParamKey::DeltaC => params.delta_c = value,
            ParamKey::DeltaM => params.delta_m = value,
            ParamKey::J => params.j = value,
            ParamKey::GA => params.g_a = value,
            ParamKey::GB => params.g_b = value,
            ParamKey::E => {
                params.e_l = value;
                params.e_r = value;
            }
            ParamKey::EL => params.e_l = value,
            ParamKey::ER => params.e_r = value,
            ParamKey::Phi => params.phi = value,
            ParamKey::ODrive => params.o_drive = value,
            ParamKey::KappaA => params.kappa_a = value,
            ParamKey::KappaB => params.kappa_b = value,
            ParamKey::KappaC => {
                params.kappa_a = value;
                params.kappa_b = value;
            }
            ParamKey::KappaM => params.kappa_m = value,
        }
    }
}

/// One sweep axis: an inclusive linear grid over a parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: ParamKey,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if n == 1 {
                    self.start
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// Fully specified sweep: base point, axes, method and output options.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub base: SystemParams,
    /// Zero (single point), one or two axes; two axes form a full grid.
    pub axes: Vec<SweepAxis>,
    pub method: Method,
    /// Cavity modes to report, subset of {a, b}.
    pub modes: Vec<Mode>,
    /// Recompute the optimal drive amplitude at every grid point.
    pub use_optimal_drive: bool,
    /// Apply the a<->b parameter swap (field reversal) before solving.
    pub reverse_field: bool,
    /// Per-mode occupation cutoff n_max for the master method.
    pub truncation: usize,
    pub output: Option<PathBuf>,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            base: SystemParams::default(),
            axes: Vec::new(),
            method: Method::Both,
            modes: vec![Mode::A, Mode::B],
            use_optimal_drive: false,
            reverse_field: false,
            truncation: 2,
            output: None,
        }
    }
}

impl RunSpec {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.axes.len() > 2 {
            return Err(Error::InvalidParams(format!(
                "at most two sweep axes are supported, got {}",
                self.axes.len()
            )));
        }
        for axis in &self.axes {
            if axis.count < 2 {
                return Err(Error::InvalidParams(format!(
                    "axis over {} needs at least 2 points, got {}",
                    axis.param.name(),
                    axis.count
                )));
            }
            if !axis.start.is_finite() || !axis.stop.is_finite() {
                return Err(Error::InvalidParams("non-finite axis endpoint".into()));
            }
        }
        if !(2..=3).contains(&self.truncation) {
            return Err(Error::InvalidParams(format!(
                "truncation must be 2 or 3, got {}",
                self.truncation
            )));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidParams("no modes requested".into()));
        }
        if self.modes.contains(&Mode::M) {
            return Err(Error::InvalidParams(
                "sweep modes are the cavity modes a and b".into(),
            ));
        }
        Ok(())
    }

    /// Forward parameters at a grid point: base with axis values applied,
    /// before any drive recomputation or field reversal.
    pub fn forward_params(&self, axis_values: &[f64]) -> SystemParams {
        let mut p = self.base.clone();
        for (axis, &v) in self.axes.iter().zip(axis_values) {
            axis.param.apply(&mut p, v);
        }
        p
    }

    /// Effective parameters at a grid point: forward parameters with the
    /// field reversal applied when requested.
    pub fn effective_params(&self, axis_values: &[f64]) -> SystemParams {
        let p = self.forward_params(axis_values);
        if self.reverse_field {
            p.swapped()
        } else {
            p
        }
    }

    /// Canonical `key = value` serialization; reparsing reproduces the spec.
    pub fn canonical_config(&self) -> String {
        let mut out = String::new();
        let b = &self.base;
        let mut kv = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        kv("delta_c", format!("{}", b.delta_c));
        kv("delta_m", format!("{}", b.delta_m));
        kv("j", format!("{}", b.j));
        kv("g_a", format!("{}", b.g_a));
        kv("g_b", format!("{}", b.g_b));
        kv("e_l", format!("{}", b.e_l));
        kv("e_r", format!("{}", b.e_r));
        kv("phi", format!("{}", b.phi));
        kv("o_drive", format!("{}", b.o_drive));
        kv("kappa_a", format!("{}", b.kappa_a));
        kv("kappa_b", format!("{}", b.kappa_b));
        kv("kappa_m", format!("{}", b.kappa_m));
        if let Some(mhz) = b.unit_scale_mhz {
            kv("unit_scale_mhz", format!("{mhz}"));
        }
        kv("method", format!("{}", self.method));
        let modes: Vec<String> = self.modes.iter().map(|m| m.to_string()).collect();
        kv("modes", modes.join(","));
        kv("truncation", format!("{}", self.truncation));
        kv("use_optimal_drive", format!("{}", self.use_optimal_drive));
        kv("reverse_field", format!("{}", self.reverse_field));
        if let Some(path) = &self.output {
            kv("output", path.display().to_string());
        }
        for (i, axis) in self.axes.iter().enumerate() {
            kv(
                &format!("sweep.{}", i + 1),
                format!(
                    "{}, {}, {}, {}",
                    axis.param.name(),
                    axis.start,
                    axis.stop,
                    axis.count
                ),
            );
        }
        out
    }
}
