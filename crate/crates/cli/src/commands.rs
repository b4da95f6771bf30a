//! The three workflows: solve, simulate, matrices.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use stpx_core::{
    allowable_states, assemble, density_profile, mc, simulate_with_threads, site_current,
    solve_steady_state, total_variation, transition_structure_matrix, verify_closed,
    DensityMatrix64, Distribution64, LatticeSpec, Method, ModelSpec64, Restriction, SimConfig,
    SolveOptions, StateOrdering, StochasticMatrix64,
};

use crate::config::RunConfig;
use crate::CliError;

/// Formats with at most 12 significant digits, then prints the shortest
/// string that round-trips to that value.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    format!("{rounded}")
}

fn sanitize(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    while out.ends_with('_') {
        out.pop();
    }
    out
}

fn parse_method(name: &str) -> Result<Method, CliError> {
    match name {
        "power" => Ok(Method::Power),
        "direct" => Ok(Method::Direct),
        other => Err(CliError::Input(format!(
            "solver.method must be `power` or `direct`, got `{other}`"
        ))),
    }
}

/// States of an ordering in lexicographic order (ascending decimal value),
/// with their local indices.
fn lexicographic_states(
    lattice: &LatticeSpec,
    ordering: &StateOrdering,
) -> Vec<(usize, String)> {
    let states = lattice.state_count();
    let mut rows: Vec<(usize, String)> = Vec::with_capacity(ordering.dim());
    for local in (0..ordering.dim()).rev() {
        // ascending delta position is descending decimal value
        let dec = states - 1 - ordering.to_full_position(local);
        let label = lattice.state_from_dec(dec).expect("valid position").label(lattice);
        rows.push((local, label));
    }
    rows
}

struct Solved {
    matrix: StochasticMatrix64,
    members: Option<Vec<usize>>,
    report: stpx_core::SolveReport64,
    densities: DensityMatrix64,
    currents: Vec<(String, f64)>,
}

fn solve_pipeline(cfg: &RunConfig, model: &ModelSpec64) -> Result<Solved, CliError> {
    let full = assemble(model).map_err(CliError::from)?;
    let (matrix, members) = match model.restriction() {
        Restriction::None => (full, None),
        _ => {
            let members = allowable_states(model).map_err(CliError::from)?;
            verify_closed(model, &members).map_err(CliError::from)?;
            let restricted = stpx_core::restrict(&full, &members).map_err(CliError::from)?;
            (restricted, Some(members))
        }
    };
    let opts = SolveOptions {
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
        ..SolveOptions::default()
    };
    let method = parse_method(&cfg.solver.method)?;
    let report = solve_steady_state(&matrix, method, &opts).map_err(CliError::from)?;
    let densities = density_profile(&report.distribution, model.lattice()).map_err(CliError::from)?;
    let currents = site_current(&report.distribution, model).map_err(CliError::from)?;
    Ok(Solved { matrix, members, report, densities, currents })
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    rate_sum: f64,
    transition_count: usize,
    state_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    restricted_count: Option<usize>,
    method: &'a str,
    tol: f64,
    max_iter: usize,
    iterations: usize,
    residual: f64,
    non_unique: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rng: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tv_distance: Option<f64>,
    wall_ms: u128,
    /// The fully resolved configuration; rerunning from it reproduces every
    /// table byte for byte.
    config: &'a RunConfig,
}

fn write_meta(path: &Path, meta: &Meta) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(meta)
        .map_err(|e| CliError::Io(format!("meta serialization: {e}")))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    let file =
        fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(csv::Writer::from_writer(file))
}

fn write_steady_state(
    path: &Path,
    lattice: &LatticeSpec,
    pi: &Distribution64,
) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["state", "probability"]).map_err(csv_err)?;
    for (local, label) in lexicographic_states(lattice, pi.ordering()) {
        w.write_record([label, fmt_f64(pi.probs()[local])]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn write_densities(path: &Path, rho: &DensityMatrix64) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["species", "site", "density"]).map_err(csv_err)?;
    for species in 1..=rho.species_count() {
        for site in 1..=rho.sites() {
            w.write_record([
                species.to_string(),
                site.to_string(),
                fmt_f64(rho.density(species, site)),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn write_currents(path: &Path, currents: &[(String, f64)]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["transition", "current"]).map_err(csv_err)?;
    for (name, j) in currents {
        w.write_record([name.clone(), fmt_f64(*j)]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn cmd_solve(cfg: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let clock = Instant::now();
    let model = cfg.build_model()?;
    let solved = solve_pipeline(cfg, &model)?;

    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let tables = &cfg.output.tables;
    if tables.iter().any(|t| t == "steady_state") {
        write_steady_state(
            &out_dir.join("steady_state.csv"),
            model.lattice(),
            &solved.report.distribution,
        )?;
    }
    if tables.iter().any(|t| t == "densities") {
        write_densities(&out_dir.join("densities.csv"), &solved.densities)?;
    }
    if tables.iter().any(|t| t == "currents") {
        write_currents(&out_dir.join("currents.csv"), &solved.currents)?;
    }

    let meta = Meta {
        command: "solve",
        rate_sum: model.rate_sum(),
        transition_count: model.transitions().len(),
        state_count: model.lattice().state_count(),
        restricted_count: solved.members.as_ref().map(Vec::len),
        method: &cfg.solver.method,
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
        iterations: solved.report.iterations,
        residual: solved.report.residual,
        non_unique: solved.report.non_unique,
        seed: None,
        rng: None,
        samples: None,
        tv_distance: None,
        wall_ms: clock.elapsed().as_millis(),
        config: cfg,
    };
    write_meta(&out_dir.join("meta.json"), &meta)?;
    let dim = solved.matrix.dim();
    eprintln!(
        "solved {} states in {} iterations (residual {:.3e})",
        dim, solved.report.iterations, solved.report.residual
    );
    Ok(())
}

pub fn cmd_simulate(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<(), CliError> {
    let clock = Instant::now();
    let sim = cfg
        .simulate
        .as_ref()
        .ok_or_else(|| CliError::Input("config has no `simulate` section".into()))?;
    let sim_cfg = SimConfig {
        steps: sim.steps,
        burn_in: sim.burn_in,
        seed: sim.seed,
        chains: sim.chains,
    };
    let model = cfg.build_model()?;
    let solved = solve_pipeline(cfg, &model)?;

    let empirical_counts =
        simulate_with_threads(&model, &sim_cfg, threads).map_err(CliError::from)?;
    let empirical: Distribution64 = empirical_counts
        .normalized(solved.matrix.ordering().clone())
        .map_err(CliError::from)?;
    let tv = total_variation(&empirical, &solved.report.distribution).map_err(CliError::from)?;

    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let lattice = model.lattice();

    let mut w = csv_writer(&out_dir.join("empirical.csv"))?;
    w.write_record(["state", "count", "frequency"]).map_err(csv_err)?;
    let states = lattice.state_count();
    for (local, label) in lexicographic_states(lattice, empirical.ordering()) {
        let dec = states - 1 - empirical.ordering().to_full_position(local);
        let count = empirical_counts.counts().get(&dec).copied().unwrap_or(0);
        w.write_record([label, count.to_string(), fmt_f64(empirical.probs()[local])])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    let mut w = csv_writer(&out_dir.join("comparison.csv"))?;
    w.write_record(["state", "solver", "empirical", "abs_diff"]).map_err(csv_err)?;
    for (local, label) in lexicographic_states(lattice, empirical.ordering()) {
        let s = solved.report.distribution.probs()[local];
        let e = empirical.probs()[local];
        w.write_record([label, fmt_f64(s), fmt_f64(e), fmt_f64((s - e).abs())])
            .map_err(csv_err)?;
    }
    w.write_record(["total_variation".to_string(), String::new(), String::new(), fmt_f64(tv)])
        .map_err(csv_err)?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;

    let meta = Meta {
        command: "simulate",
        rate_sum: model.rate_sum(),
        transition_count: model.transitions().len(),
        state_count: lattice.state_count(),
        restricted_count: solved.members.as_ref().map(Vec::len),
        method: &cfg.solver.method,
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
        iterations: solved.report.iterations,
        residual: solved.report.residual,
        non_unique: solved.report.non_unique,
        seed: Some(sim.seed),
        rng: Some(mc::RNG_NAME),
        samples: Some(empirical_counts.total()),
        tv_distance: Some(tv),
        wall_ms: clock.elapsed().as_millis(),
        config: cfg,
    };
    write_meta(&out_dir.join("meta.json"), &meta)?;
    eprintln!(
        "simulated {} samples over {} chains; TV distance to solver {:.4}",
        empirical_counts.total(),
        sim.chains,
        tv
    );
    Ok(())
}

pub fn cmd_matrices(
    cfg: &RunConfig,
    out_dir: &Path,
    transition: Option<&str>,
    all: bool,
) -> Result<(), CliError> {
    let model = cfg.build_model()?;
    let selected: Vec<usize> = match (transition, all) {
        (Some(name), false) => {
            let hits: Vec<usize> = model
                .transitions()
                .iter()
                .enumerate()
                .filter(|(_, t)| t.name() == name)
                .map(|(i, _)| i)
                .collect();
            if hits.is_empty() {
                let known: Vec<&str> = model.transitions().iter().map(|t| t.name()).collect();
                return Err(CliError::Input(format!(
                    "unknown transition `{name}`; the model defines {known:?}"
                )));
            }
            hits
        }
        (None, true) => (0..model.transitions().len()).collect(),
        _ => {
            return Err(CliError::Input(
                "pass exactly one of --transition <name> or --all".into(),
            ))
        }
    };

    fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    for &idx in &selected {
        let t = &model.transitions()[idx];
        let matrix = transition_structure_matrix(t).map_err(CliError::from)?;
        let path = out_dir.join(format!("m{idx}_{}.delta", sanitize(t.name())));
        fs::write(&path, matrix.dump_line() + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }

    // the assembled chain as headerless triplets, delta indices 1-based,
    // column-major
    let assembled = assemble(&model).map_err(CliError::from)?;
    let path = out_dir.join("assembled.csv");
    let mut lines = String::new();
    for (row, col, value) in assembled.triplets() {
        lines.push_str(&format!("{},{},{}\n", row + 1, col + 1, fmt_f64(value)));
    }
    fs::write(&path, lines).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {} structure matrices and the assembled chain", selected.len());
    Ok(())
}
