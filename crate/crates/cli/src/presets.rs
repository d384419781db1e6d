//! Named experiment presets reproducing the reference figures: path
//! simulation surfaces (fig4), path spectra and gaps in both scalings
//! (fig5), dense periodic versus path spectra (fig7), the dense periodic
//! radius sweep (fig8), and the fractional spectra and gap studies
//! (fig9 to fig11).

use crate::experiments::{Artifact, RunError, RunResult};
use crate::plot::{color, heatmap, xy_plot, Series};
use crate::pool::parallel_map;
use consensus_lab::csvio::{cell_usize, fmt_float, CsvTable};
use consensus_lab::dynamics::simulate_linear;
use consensus_lab::error::Error as CoreError;
use consensus_lab::limits::to_distribution;
use consensus_lab::network::FamilySpec;
use consensus_lab::profile::Profile;
use consensus_lab::spectral::{
    compute_eigenvalues, eigenvalue_table, gap_table, gap_scaling_study, SpectralWindow,
};

pub fn known_presets() -> &'static [&'static str] {
    &["fig4", "fig5", "fig7", "fig8", "fig9", "fig10", "fig11"]
}

pub fn run_preset(name: &str) -> RunResult {
    match name {
        "fig4" => fig4(),
        "fig5" => fig5(),
        "fig7" => fig7(),
        "fig8" => fig8(),
        "fig9" => fig9(),
        "fig10" => fig10(),
        "fig11" => fig11(),
        other => Err(RunError::Validation(format!(
            "unknown preset {other}; known: {}",
            known_presets().join(", ")
        ))),
    }
}

fn spectrum_pair(spec: FamilySpec, n: usize) -> Result<(Vec<f64>, String), CoreError> {
    let model = spec.build::<f64>(n)?;
    let values = compute_eigenvalues(&model)?;
    Ok((values, spec.table_name(n)))
}

/// Path simulation surfaces at `N = 50`, `T = 0.2`: consensus scaling and
/// heat (PDE) scaling side by side.
fn fig4() -> RunResult {
    let n = 50;
    let horizon = 0.2;
    let profile = Profile::Sin;
    let x0 = profile.cell_averages(n);
    let mut artifacts = Vec::new();
    for scaled in [false, true] {
        let spec = FamilySpec::Path { scaled };
        let model = spec.build::<f64>(n)?;
        let traj = simulate_linear(&model, &x0, horizon, 2e-4, None)?;
        let tag = if scaled { "heat" } else { "consensus" };
        artifacts.push(Artifact {
            name: format!("fig4_{tag}_trajectory.csv"),
            content: traj.to_csv(),
        });
        let field = to_distribution(&traj)?;
        artifacts.push(Artifact {
            name: format!("fig4_{tag}_field_initial.csv"),
            content: field.snapshot_csv(0),
        });
        artifacts.push(Artifact {
            name: format!("fig4_{tag}_field_final.csv"),
            content: field.snapshot_csv(field.times.len() - 1),
        });
        artifacts.push(Artifact {
            name: format!("fig4_{tag}_surface.svg"),
            content: heatmap(&format!("fig4 {tag} N={n} T={horizon}"), &traj.times, &traj.states),
        });
    }
    Ok(artifacts)
}

/// Path eigenvalues and gaps at `N = 100` for both scalings; the CSV holds
/// the full table, the plot shows the first twenty.
fn fig5() -> RunResult {
    let n = 100;
    let mut artifacts = Vec::new();
    let mut plot_series = Vec::new();
    for (idx, scaled) in [false, true].into_iter().enumerate() {
        let spec = FamilySpec::Path { scaled };
        let (values, name) = spectrum_pair(spec, n)?;
        artifacts.push(Artifact {
            name: format!("fig5_{name}_eigenvalues.csv"),
            content: eigenvalue_table(&values).render(),
        });
        artifacts.push(Artifact {
            name: format!("fig5_{name}_gaps.csv"),
            content: gap_table(&values).render(),
        });
        plot_series.push(Series {
            label: name,
            points: values
                .iter()
                .take(20)
                .enumerate()
                .map(|(k, &v)| ((k + 1) as f64, v))
                .collect(),
            color: color(idx),
            draw_line: false,
        });
    }
    artifacts.push(Artifact {
        name: "fig5_first_twenty.svg".into(),
        content: xy_plot("fig5: first twenty eigenvalues", "k", "lambda_k", &plot_series),
    });
    Ok(artifacts)
}

/// Dense periodic (r = 1/4) versus path spectra at `N = 7` and `N = 40`.
fn fig7() -> RunResult {
    let cases: Vec<(FamilySpec, usize)> = vec![
        (FamilySpec::DensePeriodic { r: 0.25, scaled: false }, 7),
        (FamilySpec::DensePeriodic { r: 0.25, scaled: false }, 40),
        (FamilySpec::Path { scaled: false }, 7),
        (FamilySpec::Path { scaled: false }, 40),
    ];
    let results = parallel_map(cases, |&(spec, n)| spectrum_pair(spec, n));
    let mut artifacts = Vec::new();
    let mut series = Vec::new();
    for (idx, res) in results.into_iter().enumerate() {
        let (values, name) = res?;
        artifacts.push(Artifact {
            name: format!("fig7_{name}_eigenvalues.csv"),
            content: eigenvalue_table(&values).render(),
        });
        artifacts.push(Artifact {
            name: format!("fig7_{name}_gaps.csv"),
            content: gap_table(&values).render(),
        });
        series.push(Series {
            label: name,
            points: values
                .iter()
                .enumerate()
                .map(|(k, &v)| ((k + 1) as f64 / values.len() as f64, v))
                .collect(),
            color: color(idx),
            draw_line: false,
        });
    }
    artifacts.push(Artifact {
        name: "fig7_spectra.svg".into(),
        content: xy_plot("fig7: dense periodic vs path spectra", "k/N", "lambda_k", &series),
    });
    Ok(artifacts)
}

/// Dense periodic radius sweep at `N = 45`: one spectrum per `r`.
fn fig8() -> RunResult {
    let n = 45;
    let radii = [0.1, 0.2, 0.3, 0.4, 0.5];
    let results = parallel_map(radii.to_vec(), |&r| {
        spectrum_pair(FamilySpec::DensePeriodic { r, scaled: false }, n)
    });
    let mut artifacts = Vec::new();
    let mut series = Vec::new();
    for (idx, res) in results.into_iter().enumerate() {
        let (values, name) = res?;
        artifacts.push(Artifact {
            name: format!("fig8_{name}_eigenvalues.csv"),
            content: eigenvalue_table(&values).render(),
        });
        series.push(Series {
            label: format!("r={}", radii[idx]),
            points: values
                .iter()
                .enumerate()
                .map(|(k, &v)| ((k + 1) as f64, v))
                .collect(),
            color: color(idx),
            draw_line: false,
        });
    }
    artifacts.push(Artifact {
        name: "fig8_eigenvalue_distribution.svg".into(),
        content: xy_plot("fig8: dense periodic spectra, N=45", "k", "lambda_k", &series),
    });
    Ok(artifacts)
}

/// Fractional spectra, scaled and unscaled, for three exponents at N = 256.
fn fig9() -> RunResult {
    let n = 256;
    let alphas = [0.25, 0.5, 0.75];
    let mut cases = Vec::new();
    for &alpha in &alphas {
        for scaled in [false, true] {
            cases.push(FamilySpec::Fractional {
                alpha,
                c_alpha: 1.0,
                scaled,
            });
        }
    }
    let results = parallel_map(cases, |&spec| spectrum_pair(spec, n));
    let mut artifacts = Vec::new();
    let mut series = Vec::new();
    for res in results {
        let (values, name) = res?;
        artifacts.push(Artifact {
            name: format!("fig9_{name}_eigenvalues.csv"),
            content: eigenvalue_table(&values).render(),
        });
        if name.ends_with("_scaled") {
            series.push(Series {
                label: name.clone(),
                points: values
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, &v)| ((k as f64).ln(), v.max(1e-300).ln()))
                    .collect(),
                color: color(series.len()),
                draw_line: true,
            });
        }
    }
    artifacts.push(Artifact {
        name: "fig9_loglog_scaled.svg".into(),
        content: xy_plot(
            "fig9: scaled fractional spectra (log-log)",
            "ln k",
            "ln lambda_k",
            &series,
        ),
    });
    Ok(artifacts)
}

/// Gap scaling of the PDE-scaled fractional family across `N` for the two
/// regimes `alpha < 1/2` and `alpha > 1/2`.
fn fig10() -> RunResult {
    let sizes = [64usize, 128, 256];
    let mut artifacts = Vec::new();
    let mut series = Vec::new();
    for (idx, &alpha) in [0.25f64, 0.75].iter().enumerate() {
        let spec = FamilySpec::Fractional {
            alpha,
            c_alpha: 1.0,
            scaled: true,
        };
        let rows = gap_scaling_study::<f64>(spec, &sizes, SpectralWindow::LowestFraction(0.5))?;
        let mut table = CsvTable::new(&["n", "min_gap", "cluster_min_gap", "inverse_sum"]);
        for r in &rows {
            table.push_row(vec![
                cell_usize(r.n),
                fmt_float(r.min_gap),
                fmt_float(r.cluster_min_gap),
                fmt_float(r.inverse_sum),
            ]);
        }
        artifacts.push(Artifact {
            name: format!("fig10_alpha{alpha}_gap_study.csv"),
            content: table.render(),
        });
        series.push(Series {
            label: format!("alpha={alpha}"),
            points: rows.iter().map(|r| (r.n as f64, r.min_gap)).collect(),
            color: color(idx),
            draw_line: true,
        });
    }
    artifacts.push(Artifact {
        name: "fig10_min_gap.svg".into(),
        content: xy_plot(
            "fig10: scaled fractional min gap vs N",
            "N",
            "min gap (resolved band)",
            &series,
        ),
    });
    Ok(artifacts)
}

/// Spectral gap of the unscaled fractional family for `alpha > 1/2`.
fn fig11() -> RunResult {
    let n = 256;
    let alpha = 0.75;
    let spec = FamilySpec::Fractional {
        alpha,
        c_alpha: 1.0,
        scaled: false,
    };
    let (values, name) = spectrum_pair(spec, n)?;
    let gaps: Vec<(f64, f64)> = values
        .windows(2)
        .enumerate()
        .map(|(k, w)| ((k + 1) as f64, w[1] - w[0]))
        .collect();
    Ok(vec![
        Artifact {
            name: format!("fig11_{name}_gaps.csv"),
            content: gap_table(&values).render(),
        },
        Artifact {
            name: "fig11_gap.svg".into(),
            content: xy_plot(
                "fig11: unscaled fractional spectral gap, alpha=0.75",
                "k",
                "gap_k",
                &[Series {
                    label: name,
                    points: gaps,
                    color: color(0),
                    draw_line: true,
                }],
            ),
        },
    ])
}
