//! Experiment implementations. Each experiment is a pure function from a
//! validated configuration to a list of named artifacts; the caller owns
//! all file I/O so outputs stay deterministic.

use crate::config::{Config, Experiment};
use crate::plot::{color, heatmap, xy_plot, Series};
use crate::pool::parallel_map;
use consensus_lab::control::{cost_scaling_study, cost_table, TimePolicy};
use consensus_lab::csvio::{cell_usize, fmt_float, CsvTable};
use consensus_lab::dynamics::{
    disagreement, simulate_alignment, simulate_linear, simulate_second_order, SecondOrderModel,
    Trajectory,
};
use consensus_lab::error::Error as CoreError;
use consensus_lab::limits::{
    graph_limit_convergence, meanfield_convergence, solve_nonlocal_diffusion,
    subordination_residual, second_order_weak_residual, ConvergenceRow, GraphLimitFamily, Kernel,
    Psi,
};
use consensus_lab::network::FamilySpec;
use consensus_lab::profile::Profile;
use consensus_lab::spectral::{
    compute_eigenvalues, eigenvalue_table, gap_scaling_study, gap_table, SpectralWindow,
};

/// A named output file.
pub struct Artifact {
    pub name: String,
    pub content: String,
}

impl Artifact {
    fn new(name: impl Into<String>, content: impl Into<String>) -> Self {
        Artifact {
            name: name.into(),
            content: content.into(),
        }
    }
}

/// Error classes mapped to distinct process exit codes.
#[derive(Debug)]
pub enum RunError {
    Validation(String),
    Numerical(CoreError),
    Io(std::io::Error),
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Numerical(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Validation(msg) => write!(f, "validation: {msg}"),
            RunError::Numerical(e) => write!(f, "numerical: {e}"),
            RunError::Io(e) => write!(f, "io: {e}"),
        }
    }
}

pub type RunResult = Result<Vec<Artifact>, RunError>;

fn invalid(msg: impl Into<String>) -> RunError {
    RunError::Validation(msg.into())
}

/// Dispatches a validated config to its experiment.
pub fn run_experiment(config: &Config) -> RunResult {
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(invalid(violations.join("; ")));
    }
    match config.experiment {
        Experiment::Build => run_build(config),
        Experiment::Spectrum => run_spectrum(config),
        Experiment::GapStudy => run_gap_study(config),
        Experiment::Simulate => run_simulate(config),
        Experiment::ControlCost => run_control_cost(config),
        Experiment::GraphLimit => run_graph_limit(config),
        Experiment::MeanField => run_mean_field(config),
        Experiment::Subordination => run_subordination(config),
    }
}

fn want_plots(config: &Config) -> bool {
    config.bool_or("plot", true).unwrap_or(true)
}

fn run_build(config: &Config) -> RunResult {
    let spec = config.family_spec().map_err(invalid)?;
    let n = config.usize_or("n", 16).map_err(invalid)?;
    let model = spec.build::<f64>(n)?;
    let name = spec.table_name(n);
    Ok(vec![
        Artifact::new(format!("{name}_laplacian.csv"), model.laplacian_csv()),
        Artifact::new(format!("{name}_descriptor.json"), model.descriptor_json()),
    ])
}

fn spectrum_artifacts(spec: FamilySpec, n: usize, with_plot: bool) -> Result<Vec<Artifact>, CoreError> {
    let model = spec.build::<f64>(n)?;
    let values = compute_eigenvalues(&model)?;
    let name = spec.table_name(n);
    let mut artifacts = vec![
        Artifact::new(
            format!("{name}_eigenvalues.csv"),
            eigenvalue_table(&values).render(),
        ),
        Artifact::new(format!("{name}_gaps.csv"), gap_table(&values).render()),
    ];
    if with_plot {
        let pts: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(k, &v)| ((k + 1) as f64, v))
            .collect();
        let svg = xy_plot(
            &format!("eigenvalues {name}"),
            "k",
            "lambda_k",
            &[Series {
                label: name.clone(),
                points: pts,
                color: color(0),
                draw_line: false,
            }],
        );
        artifacts.push(Artifact::new(format!("{name}_eigenvalues.svg"), svg));
    }
    Ok(artifacts)
}

fn run_spectrum(config: &Config) -> RunResult {
    let spec = config.family_spec().map_err(invalid)?;
    let mut sizes = config.usize_list("n-list").map_err(invalid)?;
    if sizes.is_empty() {
        sizes = vec![config.usize_or("n", 100).map_err(invalid)?];
    }
    let with_plot = want_plots(config);
    let results = parallel_map(sizes, |&n| spectrum_artifacts(spec, n, with_plot));
    let mut artifacts = Vec::new();
    for r in results {
        artifacts.extend(r?);
    }
    Ok(artifacts)
}

fn run_gap_study(config: &Config) -> RunResult {
    let spec = config.family_spec().map_err(invalid)?;
    let sizes = config.usize_list("n-list").map_err(invalid)?;
    if sizes.is_empty() {
        return Err(invalid("gap-study requires n-list"));
    }
    let window = match config.get("window") {
        None | Some("full") => SpectralWindow::Full,
        Some(w) if w.starts_with("low:") => {
            let f: f64 = w[4..].parse().map_err(|_| invalid("bad window fraction"))?;
            SpectralWindow::LowestFraction(f)
        }
        Some(other) => return Err(invalid(format!("unknown window: {other}"))),
    };
    let rows = gap_scaling_study::<f64>(spec, &sizes, window)?;
    let mut table = CsvTable::new(&["n", "min_gap", "cluster_min_gap", "inverse_sum"]);
    for r in &rows {
        table.push_row(vec![
            cell_usize(r.n),
            fmt_float(r.min_gap),
            fmt_float(r.cluster_min_gap),
            fmt_float(r.inverse_sum),
        ]);
    }
    let mut artifacts = vec![Artifact::new("gap_study.csv", table.render())];
    if want_plots(config) {
        let svg = xy_plot(
            "gap scaling",
            "N",
            "min gap",
            &[Series {
                label: "cluster min gap".into(),
                points: rows
                    .iter()
                    .map(|r| (r.n as f64, r.cluster_min_gap))
                    .collect(),
                color: color(0),
                draw_line: true,
            }],
        );
        artifacts.push(Artifact::new("gap_study.svg", svg));
    }
    Ok(artifacts)
}

fn trajectory_artifacts(name: &str, traj: &Trajectory<f64>, with_plot: bool) -> Vec<Artifact> {
    let mut artifacts = vec![Artifact::new(format!("{name}_trajectory.csv"), traj.to_csv())];
    let dis = disagreement(traj);
    let mut dtab = CsvTable::new(&["time", "disagreement"]);
    for (t, d) in traj.times.iter().zip(&dis) {
        dtab.push_row(vec![fmt_float(*t), fmt_float(*d)]);
    }
    artifacts.push(Artifact::new(
        format!("{name}_disagreement.csv"),
        dtab.render(),
    ));
    if with_plot && traj.dim == 1 {
        artifacts.push(Artifact::new(
            format!("{name}_surface.svg"),
            heatmap(
                &format!("{name}: x(s, t)"),
                &traj.times,
                &traj.states,
            ),
        ));
    }
    artifacts
}

fn run_simulate(config: &Config) -> RunResult {
    let horizon = config.f64_or("t", 1.0).map_err(invalid)?;
    let dt = config.f64_or("dt", 0.01).map_err(invalid)?;
    let profile = config.profile().map_err(invalid)?;
    let with_plot = want_plots(config);
    match config.get("kind").unwrap_or("linear") {
        "linear" => {
            let spec = config.family_spec().map_err(invalid)?;
            let n = config.usize_or("n", 50).map_err(invalid)?;
            let model = spec.build::<f64>(n)?;
            let x0 = profile.cell_averages(model.n_agents());
            let traj = simulate_linear(&model, &x0, horizon, dt, None)?;
            Ok(trajectory_artifacts(&spec.table_name(n), &traj, with_plot))
        }
        "alignment" => {
            let influence = config.influence().map_err(invalid)?;
            let n = config.usize_or("n", 50).map_err(invalid)?;
            let x0 = profile.cell_averages(n);
            let traj = simulate_alignment(n, influence, &x0, horizon, dt)?;
            Ok(trajectory_artifacts(
                &format!("alignment_{n}_{}", influence.name()),
                &traj,
                with_plot,
            ))
        }
        "second-order" => {
            let spec = config.family_spec().map_err(invalid)?;
            let n = config.usize_or("n", 50).map_err(invalid)?;
            let model = spec.build::<f64>(n)?;
            let x0 = profile.cell_averages(model.n_agents());
            let v0 = vec![0.0; model.n_agents()];
            let traj = simulate_second_order(
                &SecondOrderModel::Networked(&model),
                &x0,
                &v0,
                horizon,
                dt,
            )?;
            Ok(trajectory_artifacts(
                &format!("second_order_{}", spec.table_name(n)),
                &traj,
                with_plot,
            ))
        }
        "second-order-alignment" => {
            let influence = config.influence().map_err(invalid)?;
            let n = config.usize_or("n", 50).map_err(invalid)?;
            let x0 = profile.cell_averages(n);
            let v0 = vec![0.0; n];
            let traj = simulate_second_order(
                &SecondOrderModel::Alignment {
                    n_agents: n,
                    influence,
                },
                &x0,
                &v0,
                horizon,
                dt,
            )?;
            Ok(trajectory_artifacts(
                &format!("second_order_alignment_{n}"),
                &traj,
                with_plot,
            ))
        }
        other => Err(invalid(format!("unknown simulate kind: {other}"))),
    }
}

fn run_control_cost(config: &Config) -> RunResult {
    let spec = config.family_spec().map_err(invalid)?;
    let shape = config.control_shape().map_err(invalid)?;
    let sizes = config.usize_list("n-list").map_err(invalid)?;
    if sizes.is_empty() {
        return Err(invalid("control-cost requires n-list"));
    }
    let policy = match config.get("t-policy").unwrap_or("fixed:1") {
        p if p.starts_with("fixed:") => {
            let t: f64 = p[6..].parse().map_err(|_| invalid("bad fixed horizon"))?;
            TimePolicy::FixedT(t)
        }
        p if p.starts_with("scaled:") => {
            let c: f64 = p[7..].parse().map_err(|_| invalid("bad scaled factor"))?;
            TimePolicy::ScaledT { c }
        }
        // named shorthands for the two control-time regimes
        "fixed-time" => TimePolicy::FixedT(1.0),
        "scaled-time" => TimePolicy::ScaledT { c: 1.0 / 16.0 },
        other => return Err(invalid(format!("unknown t-policy: {other}"))),
    };
    let steps = config.usize_or("steps", 256).map_err(invalid)?;
    let rows = cost_scaling_study(spec, shape, &sizes, policy, steps)?;
    let mut artifacts = vec![Artifact::new("cost_study.csv", cost_table(&rows).render())];
    if want_plots(config) {
        let svg = xy_plot(
            "cost of control to consensus",
            "N",
            "log10 cost",
            &[Series {
                label: "log10 cost proxy".into(),
                points: rows.iter().map(|r| (r.n as f64, r.log10_cost)).collect(),
                color: color(1),
                draw_line: true,
            }],
        );
        artifacts.push(Artifact::new("cost_study.svg", svg));
    }
    Ok(artifacts)
}

fn convergence_artifacts(
    name: &str,
    rows: &[ConvergenceRow],
    with_plot: bool,
) -> Vec<Artifact> {
    let mut table = CsvTable::new(&["n", "distance"]);
    for r in rows {
        table.push_row(vec![cell_usize(r.n), fmt_float(r.distance)]);
    }
    let mut artifacts = vec![Artifact::new(format!("{name}.csv"), table.render())];
    if with_plot {
        artifacts.push(Artifact::new(
            format!("{name}.svg"),
            xy_plot(
                name,
                "N",
                "sup-t distance",
                &[Series {
                    label: name.into(),
                    points: rows.iter().map(|r| (r.n as f64, r.distance)).collect(),
                    color: color(2),
                    draw_line: true,
                }],
            ),
        ));
    }
    artifacts
}

fn run_graph_limit(config: &Config) -> RunResult {
    let sizes = {
        let s = config.usize_list("n-list").map_err(invalid)?;
        if s.is_empty() {
            vec![16, 32, 64]
        } else {
            s
        }
    };
    let family = match config.get("family").unwrap_or("dense-periodic") {
        "dense-periodic" => GraphLimitFamily::DensePeriodic {
            r: config.f64_or("r", 0.25).map_err(invalid)?,
        },
        "path" => GraphLimitFamily::Path,
        other => return Err(invalid(format!("graph-limit unsupported for family {other}"))),
    };
    let n_max = *sizes.iter().max().expect("nonempty");
    let m_quad = config.usize_or("m-quad", 4 * n_max).map_err(invalid)?;
    let profile = config.profile().map_err(invalid)?;
    let horizon = config.f64_or("t", 1.0).map_err(invalid)?;
    let dt = config.f64_or("dt", 1.0 / 512.0).map_err(invalid)?;
    let rows = graph_limit_convergence(family, &sizes, m_quad, &profile, horizon, dt)?;
    Ok(convergence_artifacts("graph_limit", &rows, want_plots(config)))
}

fn run_mean_field(config: &Config) -> RunResult {
    let sizes = {
        let s = config.usize_list("n-list").map_err(invalid)?;
        if s.is_empty() {
            vec![25, 50, 100]
        } else {
            s
        }
    };
    let n_max = *sizes.iter().max().expect("nonempty");
    let n_ref = config.usize_or("n-ref", 8 * n_max).map_err(invalid)?;
    let influence = config.influence().map_err(invalid)?;
    let profile = config.profile().map_err(invalid)?;
    let horizon = config.f64_or("t", 1.0).map_err(invalid)?;
    let dt = config.f64_or("dt", 0.01).map_err(invalid)?;
    let rows = meanfield_convergence(influence, &profile, &sizes, n_ref, horizon, dt)?;
    Ok(convergence_artifacts("mean_field", &rows, want_plots(config)))
}

fn run_subordination(config: &Config) -> RunResult {
    let influence = config.influence().map_err(invalid)?;
    let profile = config.profile().map_err(invalid)?;
    let horizon = config.f64_or("t", 1.0).map_err(invalid)?;
    let dt = config.f64_or("dt", 0.01).map_err(invalid)?;
    let m_quad = config.usize_or("m-quad", 64).map_err(invalid)?;
    let mut artifacts = Vec::new();

    if config.bool_or("second-order", false).map_err(invalid)? {
        let g = profile.cell_averages(m_quad);
        let v0: Vec<f64> = Profile::Linear
            .cell_averages(m_quad)
            .iter()
            .map(|s| 0.3 * (s - 0.5))
            .collect();
        let traj = simulate_second_order(
            &SecondOrderModel::Alignment {
                n_agents: m_quad,
                influence,
            },
            &g,
            &v0,
            horizon,
            dt,
        )?;
        let pairs = [(0u32, 1u32), (1, 1), (2, 1)];
        let tables = second_order_weak_residual(&traj, influence, &pairs, traj.dt)?;
        let mut summary = CsvTable::new(&["p", "q", "max_residual"]);
        for table in &tables {
            let mut csv = CsvTable::new(&["t", "residual"]);
            for &(t, r) in &table.rows {
                csv.push_row(vec![fmt_float(t), fmt_float(r)]);
            }
            artifacts.push(Artifact::new(
                format!("kinetic_residual_x{}v{}.csv", table.degree.0, table.degree.1),
                csv.render(),
            ));
            summary.push_row(vec![
                cell_usize(table.degree.0 as usize),
                cell_usize(table.degree.1 as usize),
                fmt_float(table.max_residual),
            ]);
        }
        artifacts.push(Artifact::new("kinetic_residual_summary.csv", summary.render()));
    } else {
        let degrees = {
            let d = config.u32_list("degrees").map_err(invalid)?;
            if d.is_empty() {
                vec![1, 2, 3]
            } else {
                d
            }
        };
        let kernel = Kernel::<f64>::indicator_band(0.5); // all-to-all
        let g = profile.cell_averages(m_quad);
        let field =
            solve_nonlocal_diffusion(&kernel, &g, horizon, dt, Psi::Alignment(influence))?;
        let dt_fd = config.f64_or("dt-fd", field.dt).map_err(invalid)?;
        let tables = subordination_residual(&field, influence, &degrees, dt_fd)?;
        let mut summary = CsvTable::new(&["p", "max_residual"]);
        for table in &tables {
            let mut csv = CsvTable::new(&["t", "residual"]);
            for &(t, r) in &table.rows {
                csv.push_row(vec![fmt_float(t), fmt_float(r)]);
            }
            artifacts.push(Artifact::new(
                format!("subordination_residual_p{}.csv", table.degree.0),
                csv.render(),
            ));
            summary.push_row(vec![
                cell_usize(table.degree.0 as usize),
                fmt_float(table.max_residual),
            ]);
        }
        artifacts.push(Artifact::new(
            "subordination_residual_summary.csv",
            summary.render(),
        ));
    }
    Ok(artifacts)
}
