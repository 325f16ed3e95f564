//! `key = value` run configuration.
//!
//! Phase keys (`alpha_t`, `alpha_g`, `alpha`, `grid.alpha_*`, `sweep.alphas`)
//! are in units of π and may carry a `pi` or `π` suffix. Times are in drive
//! periods. `#` starts a comment anywhere on a line.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use std::f64::consts::PI;

use crate::dynamics::{InitialCondition, Protocol, PumpConfig, RunSpec, Solver};
use crate::error::{Error, Result};
use crate::model::{LatticeParams, QuenchSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Hoppings,
    Evolve,
    Eigenstate,
    Sd,
    SdDynamics,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Spectrum,
        Command::Hoppings,
        Command::Evolve,
        Command::Eigenstate,
        Command::Sd,
        Command::SdDynamics,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Hoppings => "hoppings",
            Command::Evolve => "evolve",
            Command::Eigenstate => "eigenstate",
            Command::Sd => "sd",
            Command::SdDynamics => "sd-dynamics",
            Command::Sweep => "sweep",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}'"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully resolved run description. Numbers are kept exactly as written so
/// that serialization round-trips.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n_cells: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub v0: f64,
    pub mu_k2: f64,
    /// Topological phase before `t_a` and after `t_b` (units of π).
    pub alpha_t: f64,
    /// Phase between `t_a` and `t_b` (units of π).
    pub alpha_g: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_stride: f64,
    pub pump_fa: f64,
    pub pump_fb: f64,
    pub pump_omega: f64,
    pub pump_phi0: f64,
    pub init: InitialCondition,
    pub solver: Solver,
    pub out_dir: PathBuf,
    /// Phase for single-α commands (units of π).
    pub alpha: f64,
    pub grid_alpha_min: f64,
    pub grid_alpha_max: f64,
    pub grid_points: usize,
    pub sweep_gammas: Vec<f64>,
    /// Constant phases for the sweep command; empty means use the schedule.
    pub sweep_alphas: Vec<f64>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            n_cells: 20,
            epsilon: 1.0,
            gamma: 0.0025,
            v0: 0.125,
            mu_k2: 0.25,
            alpha_t: 0.75,
            alpha_g: 0.5,
            t_a: 10.0,
            t_b: 30.0,
            t_end: 40.0,
            dt: 1.0 / 256.0,
            sample_stride: 1.0 / 16.0,
            pump_fa: 0.01,
            pump_fb: 0.01,
            pump_omega: 1.0,
            pump_phi0: 0.0,
            init: InitialCondition::Vacuum,
            solver: Solver::Modal,
            out_dir: PathBuf::from("out"),
            alpha: 0.75,
            grid_alpha_min: 0.0,
            grid_alpha_max: 1.0,
            grid_points: 201,
            sweep_gammas: vec![0.0, 0.0005, 0.0025, 0.005, 0.0075],
            sweep_alphas: vec![0.25, 0.5, 0.75],
        }
    }

    pub fn lattice_params(&self) -> LatticeParams {
        LatticeParams {
            n_cells: self.n_cells,
            epsilon: self.epsilon,
            gamma: self.gamma,
            v0: self.v0,
            mu_k2: self.mu_k2,
            ..LatticeParams::default()
        }
    }

    pub fn schedule(&self) -> Result<QuenchSchedule> {
        QuenchSchedule::new(self.alpha_t * PI, self.alpha_g * PI, self.alpha_t * PI, self.t_a, self.t_b)
    }

    pub fn pump(&self) -> PumpConfig {
        PumpConfig {
            f_a: self.pump_fa,
            f_b: self.pump_fb,
            omega_pa: self.pump_omega,
            omega_pb: self.pump_omega,
            phi_0a: self.pump_phi0,
            phi_0b: self.pump_phi0,
        }
    }

    pub fn run_spec(&self) -> Result<RunSpec> {
        Ok(RunSpec {
            protocol: Protocol {
                params: self.lattice_params(),
                schedule: self.schedule()?,
                pump: self.pump(),
            },
            init: self.init,
            t_end: self.t_end,
            dt: self.dt,
            stride: self.sample_stride,
            solver: self.solver,
        })
    }

    /// `alpha` in radians.
    pub fn alpha_rad(&self) -> f64 {
        self.alpha * PI
    }

    /// Uniform grid from `grid.alpha_min` to `grid.alpha_max` inclusive, in radians.
    pub fn alpha_grid(&self) -> Vec<f64> {
        let n = self.grid_points;
        if n == 1 {
            return vec![self.grid_alpha_min * PI];
        }
        (0..n)
            .map(|k| {
                let f = k as f64 / (n - 1) as f64;
                (self.grid_alpha_min + (self.grid_alpha_max - self.grid_alpha_min) * f) * PI
            })
            .collect()
    }

    /// Sample times `0, stride, …, t_end` in periods.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_end / self.sample_stride).round() as usize;
        (0..=n).map(|k| k as f64 * self.sample_stride).collect()
    }

    fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<()> {
        let num = || parse_number(key, value, origin);
        let phase = || parse_phase(key, value, origin);
        match key {
            "command" => {
                self.command = value.parse().map_err(|reason| bad_value(key, value, origin, reason))?;
            }
            "n_cells" => self.n_cells = parse_count(key, value, origin, 1)?,
            "epsilon" => self.epsilon = num()?,
            "gamma" => self.gamma = num()?,
            "v0" => self.v0 = num()?,
            "mu_k2" => self.mu_k2 = num()?,
            "alpha_t" => self.alpha_t = phase()?,
            "alpha_g" => self.alpha_g = phase()?,
            "t_a" => self.t_a = num()?,
            "t_b" => self.t_b = num()?,
            "t_end" => self.t_end = num()?,
            "dt" => self.dt = num()?,
            "sample_stride" => self.sample_stride = num()?,
            "pump.fa" => self.pump_fa = num()?,
            "pump.fb" => self.pump_fb = num()?,
            "pump.omega" => self.pump_omega = num()?,
            "pump.phi0" => self.pump_phi0 = num()?,
            "init" => {
                self.init = value
                    .parse()
                    .map_err(|e: Error| bad_value(key, value, origin, e.to_string()))?;
            }
            "solver" => {
                self.solver = value.parse().map_err(|reason| bad_value(key, value, origin, reason))?;
            }
            "out_dir" => {
                if value.is_empty() {
                    return Err(bad_value(key, value, origin, "empty path".into()));
                }
                self.out_dir = PathBuf::from(value);
            }
            "alpha" => self.alpha = phase()?,
            "grid.alpha_min" => self.grid_alpha_min = phase()?,
            "grid.alpha_max" => self.grid_alpha_max = phase()?,
            "grid.points" => self.grid_points = parse_count(key, value, origin, 1)?,
            "sweep.gammas" => self.sweep_gammas = parse_list(key, value, origin, parse_number)?,
            "sweep.alphas" => self.sweep_alphas = parse_list(key, value, origin, parse_phase)?,
            _ => {
                return Err(Error::UnknownKey {
                    origin: origin.into(),
                    key: key.into(),
                })
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text accepted by [`parse_config`].
    pub fn serialize(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("command", self.command.to_string());
        put("n_cells", self.n_cells.to_string());
        put("epsilon", format!("{:?}", self.epsilon));
        put("gamma", format!("{:?}", self.gamma));
        put("v0", format!("{:?}", self.v0));
        put("mu_k2", format!("{:?}", self.mu_k2));
        put("alpha_t", format!("{:?}", self.alpha_t));
        put("alpha_g", format!("{:?}", self.alpha_g));
        put("t_a", format!("{:?}", self.t_a));
        put("t_b", format!("{:?}", self.t_b));
        put("t_end", format!("{:?}", self.t_end));
        put("dt", format!("{:?}", self.dt));
        put("sample_stride", format!("{:?}", self.sample_stride));
        put("pump.fa", format!("{:?}", self.pump_fa));
        put("pump.fb", format!("{:?}", self.pump_fb));
        put("pump.omega", format!("{:?}", self.pump_omega));
        put("pump.phi0", format!("{:?}", self.pump_phi0));
        put("init", self.init.to_string());
        put("solver", self.solver.to_string());
        put("out_dir", self.out_dir.display().to_string());
        put("alpha", format!("{:?}", self.alpha));
        put("grid.alpha_min", format!("{:?}", self.grid_alpha_min));
        put("grid.alpha_max", format!("{:?}", self.grid_alpha_max));
        put("grid.points", self.grid_points.to_string());
        put("sweep.gammas", list(&self.sweep_gammas));
        put("sweep.alphas", list(&self.sweep_alphas));
        s
    }
}

fn bad_value(key: &str, value: &str, origin: &str, reason: String) -> Error {
    Error::BadValue {
        origin: origin.into(),
        key: key.into(),
        value: value.into(),
        reason,
    }
}

fn parse_number(key: &str, value: &str, origin: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::BadNumber {
            origin: origin.into(),
            key: key.into(),
            value: value.into(),
        }),
    }
}

fn parse_count(key: &str, value: &str, origin: &str, min: usize) -> Result<usize> {
    let n: usize = value.parse().map_err(|_| Error::BadNumber {
        origin: origin.into(),
        key: key.into(),
        value: value.into(),
    })?;
    if n < min {
        return Err(bad_value(key, value, origin, format!("must be at least {min}")));
    }
    Ok(n)
}

/// Number in units of π, optionally suffixed `pi`, `*pi`, `π` or `*π`;
/// restricted to `[0, 1]`.
fn parse_phase(key: &str, value: &str, origin: &str) -> Result<f64> {
    let bare = value
        .strip_suffix("pi")
        .or_else(|| value.strip_suffix('π'))
        .map(|s| s.trim_end().strip_suffix('*').unwrap_or(s).trim_end())
        .unwrap_or(value);
    let x = parse_number(key, bare, origin).map_err(|_| Error::BadNumber {
        origin: origin.into(),
        key: key.into(),
        value: value.into(),
    })?;
    if !(0.0..=1.0).contains(&x) {
        return Err(bad_value(key, value, origin, "phase must lie in [0, 1] (units of pi)".into()));
    }
    Ok(x)
}

fn parse_list(
    key: &str,
    value: &str,
    origin: &str,
    item: fn(&str, &str, &str) -> Result<f64>,
) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| item(key, v.trim(), origin)).collect()
}

/// Splits one line into `(key, value)`, or `None` for blank and comment lines.
fn split_line<'a>(line: &'a str, origin: &str) -> Result<Option<(&'a str, &'a str)>> {
    let content = line.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    match content.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok(Some((k.trim(), v.trim()))),
        _ => Err(Error::ConfigSyntax {
            origin: origin.into(),
            text: content.into(),
        }),
    }
}

/// Parses a config file that names its own command.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    resolve_config(text, None, &[])
}

/// Layers file text, then `--set key=value` overrides, over the defaults.
/// A `command` given here takes precedence over one in the file.
pub fn resolve_config(text: &str, command: Option<Command>, overrides: &[String]) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(Command::Evolve);
    let mut file_command = None;
    for (i, line) in text.lines().enumerate() {
        let origin = format!("line {}", i + 1);
        if let Some((k, v)) = split_line(line, &origin)? {
            cfg.set(k, v, &origin)?;
            if k == "command" {
                file_command = Some(cfg.command);
            }
        }
    }
    cfg.command = command.or(file_command).ok_or(Error::MissingCommand)?;
    for (i, item) in overrides.iter().enumerate() {
        let origin = format!("--set argument {}", i + 1);
        if let Some((k, v)) = split_line(item, &origin)? {
            cfg.set(k, v, &origin)?;
        }
    }
    Ok(cfg)
}
