//! Driven, damped amplitude dynamics `i ẋ = H(α(t)) x + f(t)`.
//!
//! Two solvers share one contract: a fixed-step fourth-order Runge–Kutta
//! integrator working on the site stencil, and an exact modal propagator
//! that diagonalizes the Hermitian part once per constant-phase interval.
//!
//! All public time arguments are in drive periods (`t = 1` is one `T_p`).

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::eigensolver::eig_selfadjoint;
use crate::error::{Error, Result};
use crate::model::{bond, hermitian_part, hopping_amplitudes, HoppingSet, LatticeParams, QuenchSchedule, PERIOD};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coherent drives on the first (A) and last (B) sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpConfig {
    pub f_a: f64,
    pub f_b: f64,
    pub omega_pa: f64,
    pub omega_pb: f64,
    pub phi_0a: f64,
    pub phi_0b: f64,
}

impl PumpConfig {
    /// Resonant symmetric double pumping, `F = 0.01`, `ω_p = 1`, `φ_0 = 0`.
    pub fn standard() -> Self {
        Self::symmetric(0.01, 1.0, 0.0)
    }

    pub fn symmetric(amplitude: f64, omega: f64, phi0: f64) -> Self {
        Self {
            f_a: amplitude,
            f_b: amplitude,
            omega_pa: omega,
            omega_pb: omega,
            phi_0a: phi0,
            phi_0b: phi0,
        }
    }

    pub fn off() -> Self {
        Self::symmetric(0.0, 1.0, 0.0)
    }

    pub fn first_only(self) -> Self {
        Self { f_b: 0.0, ..self }
    }

    pub fn last_only(self) -> Self {
        Self { f_a: 0.0, ..self }
    }

    pub fn is_off(&self) -> bool {
        self.f_a == 0.0 && self.f_b == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_a >= 0.0 && self.f_b >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "pump amplitudes must be >= 0 (got {}, {})",
                self.f_a, self.f_b
            )));
        }
        Ok(())
    }

    /// `(site, complex amplitude F e^{iφ}, frequency)` for each active drive.
    fn components(&self, n_sites: usize) -> Vec<(usize, Complex64, f64)> {
        let mut out = Vec::with_capacity(2);
        if self.f_a != 0.0 {
            out.push((0, Complex64::from_polar(self.f_a, self.phi_0a), self.omega_pa));
        }
        if self.f_b != 0.0 {
            out.push((n_sites - 1, Complex64::from_polar(self.f_b, self.phi_0b), self.omega_pb));
        }
        out
    }
}

/// Drive vector at time `t` (periods): nonzero only on sites 1 and 2N.
pub fn drive_vector(t: f64, pump: &PumpConfig, n_cells: usize) -> Array1<Complex64> {
    let m = 2 * n_cells;
    let mut f = Array1::from_elem(m, ZERO);
    let tn = t * PERIOD;
    for (site, amp, omega) in pump.components(m) {
        f[site] += amp * Complex64::from_polar(1.0, -omega * tn);
    }
    f
}

/// Site amplitudes `(A1, B1, …, AN, BN)` at a time in periods.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Array1<Complex64>,
    pub time: f64,
}

impl StateVector {
    pub fn new(amps: Array1<Complex64>, time: f64) -> Self {
        Self { amps, time }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    Vacuum,
    /// `A_1 = B_N = 1`.
    BothEdges,
    FirstEdge,
    LastEdge,
}

impl InitialCondition {
    pub fn state(&self, n_cells: usize) -> StateVector {
        let m = 2 * n_cells;
        let mut amps = Array1::from_elem(m, ZERO);
        let one = Complex64::new(1.0, 0.0);
        match self {
            InitialCondition::Vacuum => {}
            InitialCondition::BothEdges => {
                amps[0] = one;
                amps[m - 1] = one;
            }
            InitialCondition::FirstEdge => amps[0] = one,
            InitialCondition::LastEdge => amps[m - 1] = one,
        }
        StateVector::new(amps, 0.0)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            InitialCondition::Vacuum => "vacuum",
            InitialCondition::BothEdges => "both_edges",
            InitialCondition::FirstEdge => "first_edge",
            InitialCondition::LastEdge => "last_edge",
        }
    }
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vacuum" => Ok(Self::Vacuum),
            "both_edges" => Ok(Self::BothEdges),
            "first_edge" => Ok(Self::FirstEdge),
            "last_edge" => Ok(Self::LastEdge),
            other => Err(Error::UnknownInitialCondition(other.to_string())),
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Everything the equations of motion depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    pub params: LatticeParams,
    pub schedule: QuenchSchedule,
    pub pump: PumpConfig,
}

impl Protocol {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.schedule.validate()?;
        self.pump.validate()
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Sample times in periods.
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub protocol: Protocol,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Amplitudes as a (time × site) matrix.
    pub fn amplitudes(&self) -> Array2<Complex64> {
        let m = self.states.first().map_or(0, |s| s.amps.len());
        let mut out = Array2::from_elem((self.len(), m), ZERO);
        for (mut row, s) in out.rows_mut().into_iter().zip(&self.states) {
            row.assign(&s.amps);
        }
        out
    }
}

/// `(−i)(H x + f)` evaluated with an explicit nearest-neighbour stencil and
/// open boundaries, written into `out`.
fn stencil_rhs(
    hop: &HoppingSet,
    params: &LatticeParams,
    drive: &[(usize, Complex64, f64)],
    t_nat: f64,
    x: &[Complex64],
    out: &mut [Complex64],
) {
    let m = x.len();
    let onsite = Complex64::new(params.epsilon, -params.gamma);
    for k in 0..m {
        let mut acc = onsite * x[k];
        if k > 0 {
            acc += bond(hop, k - 1) * x[k - 1];
        }
        if k + 1 < m {
            acc += bond(hop, k) * x[k + 1];
        }
        out[k] = acc;
    }
    for &(site, amp, omega) in drive {
        out[site] += amp * Complex64::from_polar(1.0, -omega * t_nat);
    }
    for v in out.iter_mut() {
        *v *= -I;
    }
}

/// Time derivative (per natural time unit) of the amplitudes at time `t`
/// (periods), using the phase the schedule assigns to `t`.
pub fn rhs(t: f64, x: &StateVector, protocol: &Protocol) -> Result<Array1<Complex64>> {
    let hop = hopping_amplitudes(protocol.schedule.alpha_at(t), &protocol.params)?;
    let drive = protocol.pump.components(protocol.params.n_sites());
    let mut out = vec![ZERO; x.amps.len()];
    stencil_rhs(&hop, &protocol.params, &drive, t * PERIOD, &x.amps.to_vec(), &mut out);
    Ok(Array1::from(out))
}

/// Number of `dt` steps in `value`, or an error if `dt` does not divide it.
fn steps_in(value: f64, dt: f64, what: &'static str) -> Result<usize> {
    let n = value / dt;
    let rounded = n.round();
    if (n - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::IncommensurateStep { dt, what, value });
    }
    Ok(rounded as usize)
}

/// Integer step layout shared by both solvers.
struct Grid {
    /// Sample spacing in units of `unit`.
    stride_steps: usize,
    /// Interval boundaries in units of `unit`, with the phase of each interval.
    intervals: Vec<(usize, usize, f64)>,
    unit: f64,
}

impl Grid {
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn new(schedule: &QuenchSchedule, t_end: f64, unit: f64, stride: f64) -> Result<Self> {
        if !(unit > 0.0) || !(stride > 0.0) || !(t_end >= 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "need dt > 0, stride > 0 and t_end >= 0 (got dt = {unit}, stride = {stride}, t_end = {t_end})"
            )));
        }
        let stride_steps = steps_in(stride, unit, "sample_stride")?;
        let end_steps = steps_in(t_end, unit, "t_end")?;
        if end_steps % stride_steps != 0 {
            return Err(Error::IncommensurateStep { dt: stride, what: "t_end", value: t_end });
        }
        let mut intervals = Vec::new();
        for (start, end, alpha) in schedule.intervals(t_end) {
            let s = steps_in(start, unit, "switch time")?;
            let e = steps_in(end, unit, "switch time")?;
            if e % stride_steps != 0 && e != end_steps {
                return Err(Error::IncommensurateStep { dt: stride, what: "switch time", value: end });
            }
            intervals.push((s, e, alpha));
        }
        Ok(Self {
            stride_steps,
            intervals,
            unit,
        })
    }

    fn end_steps(&self) -> usize {
        self.intervals.last().map_or(0, |iv| iv.1)
    }
}

/// Classic fixed-step RK4. `dt` must divide the switch times, `t_end` and the
/// sample `stride` (all in periods); steps never straddle a switch.
pub fn rk4_evolve(x0: &StateVector, t_end: f64, dt: f64, stride: f64, protocol: &Protocol) -> Result<Trajectory> {
    protocol.validate()?;
    let grid = Grid::new(&protocol.schedule, t_end, dt, stride)?;
    let params = &protocol.params;
    let m = params.n_sites();
    let drive = protocol.pump.components(m);
    let h = dt * PERIOD;

    let mut x = x0.amps.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![StateVector::new(x0.amps.clone(), 0.0)];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![ZERO; m], vec![ZERO; m], vec![ZERO; m], vec![ZERO; m], vec![ZERO; m]);

    for &(start, end, alpha) in &grid.intervals {
        let hop = hopping_amplitudes(alpha, params)?;
        for step in start..end {
            let t = step as f64 * h;
            stencil_rhs(&hop, params, &drive, t, &x, &mut k1);
            for i in 0..m {
                tmp[i] = x[i] + k1[i] * (0.5 * h);
            }
            stencil_rhs(&hop, params, &drive, t + 0.5 * h, &tmp, &mut k2);
            for i in 0..m {
                tmp[i] = x[i] + k2[i] * (0.5 * h);
            }
            stencil_rhs(&hop, params, &drive, t + 0.5 * h, &tmp, &mut k3);
            for i in 0..m {
                tmp[i] = x[i] + k3[i] * h;
            }
            stencil_rhs(&hop, params, &drive, t + h, &tmp, &mut k4);
            for i in 0..m {
                x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            let done = step + 1;
            if done % grid.stride_steps == 0 {
                let time = done as f64 * dt;
                times.push(time);
                states.push(StateVector::new(Array1::from(x.clone()), time));
            }
        }
    }
    Ok(Trajectory {
        times,
        states,
        protocol: *protocol,
    })
}

/// `(e^w − 1)/w`, continuous through `w = 0`.
fn expm1_ratio(w: Complex64) -> Complex64 {
    if w.norm() < 1e-2 {
        // Horner form of Σ_{n=0}^{6} w^n/(n+1)!
        let mut acc = Complex64::new(1.0 / 5040.0, 0.0);
        for d in [720.0, 120.0, 24.0, 6.0, 2.0, 1.0] {
            acc = acc * w + 1.0 / d;
        }
        acc
    } else {
        (w.exp() - 1.0) / w
    }
}

/// Constant-phase propagator: eigenbasis of the Hermitian part plus the
/// projected drive amplitudes.
struct ModalPropagator {
    vectors: Array2<f64>,
    /// `λ_k − iγ`
    mu: Vec<Complex64>,
    /// Per drive: projected amplitudes `g_k` and frequency.
    drives: Vec<(Vec<Complex64>, f64)>,
}

impl ModalPropagator {
    fn new(alpha: f64, protocol: &Protocol) -> Result<Self> {
        let params = &protocol.params;
        let hop = hopping_amplitudes(alpha, params)?;
        let decomp = eig_selfadjoint(&hermitian_part(&hop, params))?;
        let mu = decomp
            .values
            .iter()
            .map(|&l| Complex64::new(l, -params.gamma))
            .collect();
        let drives = protocol
            .pump
            .components(params.n_sites())
            .into_iter()
            .map(|(site, amp, omega)| {
                let g = decomp.vectors.row(site).iter().map(|&v| amp * v).collect();
                (g, omega)
            })
            .collect();
        Ok(Self {
            vectors: decomp.vectors,
            mu,
            drives,
        })
    }

    fn project(&self, x: &Array1<Complex64>) -> Vec<Complex64> {
        self.vectors
            .columns()
            .into_iter()
            .map(|col| col.iter().zip(x.iter()).map(|(v, z)| z * v).sum())
            .collect()
    }

    /// Amplitudes at natural time `t` given modal amplitudes `c0` at `t0`.
    fn advance(&self, c0: &[Complex64], t0: f64, t: f64) -> Array1<Complex64> {
        let tau = t - t0;
        let c: Vec<Complex64> = (0..c0.len())
            .map(|k| {
                let mu = self.mu[k];
                let free = (-I * mu * tau).exp();
                let mut ck = free * c0[k];
                for (g, omega) in &self.drives {
                    let w = I * (mu - omega) * tau;
                    ck += -I * g[k] * free * Complex64::from_polar(1.0, -omega * t0) * tau * expm1_ratio(w);
                }
                ck
            })
            .collect();
        let m = self.vectors.nrows();
        let mut x = Array1::from_elem(m, ZERO);
        for (k, ck) in c.iter().enumerate() {
            for i in 0..m {
                x[i] += ck * self.vectors[[i, k]];
            }
        }
        x
    }
}

/// Exact solution for piecewise-constant `H` with sinusoidal drive, sampled
/// every `stride` periods.
pub fn modal_evolve(x0: &StateVector, t_end: f64, stride: f64, protocol: &Protocol) -> Result<Trajectory> {
    protocol.validate()?;
    let grid = Grid::new(&protocol.schedule, t_end, stride, stride)?;
    let mut times = vec![0.0];
    let mut states = vec![StateVector::new(x0.amps.clone(), 0.0)];
    let mut x = x0.amps.clone();

    for &(start, end, alpha) in &grid.intervals {
        if end == start {
            continue;
        }
        let prop = ModalPropagator::new(alpha, protocol)?;
        let c0 = prop.project(&x);
        let t0 = start as f64 * grid.unit * PERIOD;
        for sample in start + 1..=end {
            let time = sample as f64 * grid.unit;
            let xs = prop.advance(&c0, t0, time * PERIOD);
            if sample == end {
                x = xs.clone();
            }
            times.push(time);
            states.push(StateVector::new(xs, time));
        }
    }
    debug_assert_eq!(times.len(), grid.end_steps() / grid.stride_steps + 1);
    Ok(Trajectory {
        times,
        states,
        protocol: *protocol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Modal,
    Rk4,
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "modal" => Ok(Self::Modal),
            "rk4" => Ok(Self::Rk4),
            other => Err(format!("unknown solver '{other}' (expected modal or rk4)")),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Modal => "modal",
            Solver::Rk4 => "rk4",
        })
    }
}

/// A complete run: protocol, initial condition and time grid (periods).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub protocol: Protocol,
    pub init: InitialCondition,
    pub t_end: f64,
    pub dt: f64,
    pub stride: f64,
    pub solver: Solver,
}

impl RunSpec {
    /// Vacuum start, double pumping and the topological → gapless → topological
    /// schedule over 40 periods with `γ = 0.0025`.
    pub fn standard() -> Self {
        Self {
            protocol: Protocol {
                params: LatticeParams::default().with_gamma(0.0025),
                schedule: QuenchSchedule::standard(),
                pump: PumpConfig::standard(),
            },
            init: InitialCondition::Vacuum,
            t_end: 40.0,
            dt: 1.0 / 256.0,
            stride: 1.0 / 16.0,
            solver: Solver::Modal,
        }
    }
}

pub fn run_protocol(spec: &RunSpec) -> Result<Trajectory> {
    let x0 = spec.init.state(spec.protocol.params.n_cells);
    match spec.solver {
        Solver::Modal => modal_evolve(&x0, spec.t_end, spec.stride, &spec.protocol),
        Solver::Rk4 => rk4_evolve(&x0, spec.t_end, spec.dt, spec.stride, &spec.protocol),
    }
}
