//! One function per CLI command. Each writes its files under `out_dir` and
//! returns their paths.

use std::f64::consts::{LN_2, PI};
use std::path::{Path, PathBuf};

use crate::cli::config::{Command, RunConfig};
use crate::cli::output::{labeled_csv_string, render_heatmap, write_bytes, write_csv};
use crate::dynamics::{run_protocol, RunSpec};
use crate::eigensolver::{lattice_eigen, spectrum_sweep, superpose_states, Sign};
use crate::entanglement::{disconnected_entropy, sd_dynamics, Partition};
use crate::error::Result;
use crate::model::{hopping_amplitudes, QuenchSchedule};
use crate::observables::{site_populations, OccupationField};

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    match cfg.command {
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Hoppings => cmd_hoppings(cfg),
        Command::Evolve => cmd_evolve(cfg),
        Command::Eigenstate => cmd_eigenstate(cfg),
        Command::Sd => cmd_sd(cfg),
        Command::SdDynamics => cmd_sd_dynamics(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}

fn time_rows(field: &OccupationField) -> Vec<Vec<f64>> {
    field
        .site_pop
        .rows()
        .into_iter()
        .zip(&field.times)
        .map(|(row, &t)| std::iter::once(t).chain(row.iter().copied()).collect())
        .collect()
}

fn site_header(first: &str, prefix: &str, n: usize) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain((1..=n).map(|k| format!("{prefix}{k}")))
        .collect()
}

fn write_totals(field: &OccupationField, path: &Path) -> Result<()> {
    write_csv(
        path,
        &["t", "p_tot"],
        field.times.iter().zip(&field.total).map(|(&t, &p)| vec![t, p]),
    )
}

/// Runs one trajectory and writes `occupations.csv`, `totals.csv` and
/// `heatmap.pgm` into `dir`.
pub fn evolve_into(spec: &RunSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    let field = site_populations(&run_protocol(spec)?)?;
    let occ = dir.join("occupations.csv");
    let totals = dir.join("totals.csv");
    let heat = dir.join("heatmap.pgm");
    write_csv(&occ, &site_header("t", "site_", field.n_sites()), time_rows(&field))?;
    write_totals(&field, &totals)?;
    render_heatmap(&field, &heat)?;
    Ok(vec![occ, totals, heat.clone(), heat.with_extension("max.txt")])
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    evolve_into(&cfg.run_spec()?, &cfg.out_dir)
}

pub fn cmd_hoppings(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let params = cfg.lattice_params();
    let rows = cfg
        .alpha_grid()
        .into_iter()
        .map(|a| {
            let h = hopping_amplitudes(a, &params)?;
            Ok(vec![a / PI, h.j1, h.j2, h.omega_vib, h.delta1, h.delta2])
        })
        .collect::<Result<Vec<_>>>()?;
    let path = cfg.out_dir.join("hoppings.csv");
    write_csv(&path, &["alpha_pi", "j1", "j2", "omega_vib", "delta1", "delta2"], rows)?;
    Ok(vec![path])
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let params = cfg.lattice_params().hermitian();
    let rows = spectrum_sweep(&cfg.alpha_grid(), &params)?
        .into_iter()
        .map(|r| std::iter::once(r.alpha / PI).chain(r.values).collect());
    let path = cfg.out_dir.join("spectrum.csv");
    write_csv(&path, &site_header("alpha_pi", "e_", params.n_sites()), rows)?;
    Ok(vec![path])
}

/// Eigenvalues, eigenvectors and `(ψ_N ∓ ψ_{N+1})/√2` at `alpha`.
pub fn cmd_eigenstate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let params = cfg.lattice_params().hermitian();
    let d = lattice_eigen(&params, cfg.alpha_rad())?;
    let m = d.dim();
    let n = params.n_cells;

    let values = cfg.out_dir.join("eigenvalues.csv");
    let text = labeled_csv_string(&["state", "energy"], d.values.iter().enumerate().map(|(k, &e)| (k + 1, vec![e])));
    write_bytes(&values, text.as_bytes())?;

    let vectors = cfg.out_dir.join("eigenvectors.csv");
    let rows = (0..m).map(|i| (i + 1, d.vectors.row(i).to_vec()));
    write_bytes(&vectors, labeled_csv_string(&site_header("site", "psi_", m), rows).as_bytes())?;

    let minus = superpose_states(&d, n - 1, n, Sign::Minus)?;
    let plus = superpose_states(&d, n - 1, n, Sign::Plus)?;
    let sup = cfg.out_dir.join("superpositions.csv");
    let rows = (0..m).map(|i| (i + 1, vec![minus[i], plus[i]]));
    let header = ["site".to_string(), format!("psi_{n}_minus_psi_{}", n + 1), format!("psi_{n}_plus_psi_{}", n + 1)];
    write_bytes(&sup, labeled_csv_string(&header, rows).as_bytes())?;
    Ok(vec![values, vectors, sup])
}

pub fn cmd_sd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let params = cfg.lattice_params().hermitian();
    let partition = Partition::even(params.n_sites())?;
    let rows = cfg
        .alpha_grid()
        .into_iter()
        .map(|a| {
            let s = disconnected_entropy(&params, a, &partition)?;
            Ok(vec![a / PI, s, s / LN_2])
        })
        .collect::<Result<Vec<_>>>()?;
    let path = cfg.out_dir.join("sd.csv");
    write_csv(&path, &["alpha_pi", "s_d", "s_d_over_ln2"], rows)?;
    Ok(vec![path])
}

/// `S^D(t)` after a sudden switch from `alpha_t` to `alpha_g`.
pub fn cmd_sd_dynamics(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let params = cfg.lattice_params().hermitian();
    let partition = Partition::even(params.n_sites())?;
    let series = sd_dynamics(
        &params,
        cfg.alpha_t * PI,
        cfg.alpha_g * PI,
        &cfg.sample_times(),
        &partition,
    )?;
    let path = cfg.out_dir.join("sd_dynamics.csv");
    write_csv(
        &path,
        &["t", "s_d", "s_d_over_ln2"],
        series.into_iter().map(|(t, s)| vec![t, s, s / LN_2]),
    )?;
    Ok(vec![path])
}

struct SweepJob {
    spec: RunSpec,
    dir: PathBuf,
}

fn sweep_jobs(cfg: &RunConfig) -> Result<Vec<SweepJob>> {
    let base = cfg.run_spec()?;
    let schedules: Vec<(Option<f64>, QuenchSchedule)> = if cfg.sweep_alphas.is_empty() {
        vec![(None, base.protocol.schedule)]
    } else {
        cfg.sweep_alphas
            .iter()
            .map(|&a| (Some(a), QuenchSchedule::constant(a * PI)))
            .collect()
    };
    let mut jobs = Vec::new();
    for (alpha, schedule) in schedules {
        for &gamma in &cfg.sweep_gammas {
            let mut spec = base;
            spec.protocol.schedule = schedule;
            spec.protocol.params.gamma = gamma;
            let mut dir = cfg.out_dir.clone();
            if let Some(a) = alpha {
                dir.push(format!("alpha_{a:?}pi"));
            }
            dir.push(format!("gamma_{gamma:?}"));
            jobs.push(SweepJob { spec, dir });
        }
    }
    Ok(jobs)
}

/// One `totals.csv` per (α, γ) pair, each in its own subdirectory. Runs are
/// executed concurrently.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let jobs = sweep_jobs(cfg)?;
    let results: Vec<Result<PathBuf>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| {
                scope.spawn(move || {
                    let field = site_populations(&run_protocol(&job.spec)?)?;
                    let path = job.dir.join("totals.csv");
                    write_totals(&field, &path)?;
                    Ok(path)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    results.into_iter().collect()
}
