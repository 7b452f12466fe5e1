use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::plot::{self, Series};
use super::{Artifacts, ExperimentKind, ExperimentReport};
use crate::criteria;
use crate::depmeasure;
use crate::error::{ArselError, Result};
use crate::oracle;

fn create(dir: &Path, name: &str, written: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path)?;
    written.push(path);
    Ok(BufWriter::new(file))
}

/// Writes the experiment's CSV files, its plot (figures only) and
/// `manifest.json` into `dir`; returns the paths written.
pub fn write_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match &report.artifacts {
        Artifacts::Figure(data) => {
            let stem = match report.config.experiment {
                ExperimentKind::FigureGarch => "fig_garch",
                _ => "fig_mdep",
            };
            let mut w = csv::Writer::from_writer(create(dir, &format!("{stem}.csv"), &mut written)?);
            w.write_record([data.param_name, "t", "mean_order", "stderr", "count"])?;
            for (param, row) in data.params.iter().zip(&data.summaries) {
                for (t, s) in data.t_grid.iter().zip(row) {
                    w.write_record([
                        param.to_string(),
                        t.to_string(),
                        s.mean.to_string(),
                        s.stderr.to_string(),
                        s.count.to_string(),
                    ])?;
                }
            }
            w.flush()?;
            let series: Vec<Series> = data
                .params
                .iter()
                .zip(&data.summaries)
                .map(|(p, row)| Series {
                    label: format!("{}={p}", data.param_name),
                    points: data.t_grid.iter().zip(row).map(|(&t, s)| (t as f64, s.mean)).collect(),
                })
                .collect();
            let png = dir.join(format!("{stem}.png"));
            plot::line_plot(&series, &png)?;
            written.push(png);
        }
        Artifacts::Efficiency { records, summaries } => {
            oracle::write_efficiency_csv(create(dir, "efficiency.csv", &mut written)?, records)?;
            let mut w = csv::Writer::from_writer(create(dir, "efficiency_summary.csv", &mut written)?);
            w.write_record([
                "n",
                "criterion",
                "K_n",
                "mean_ratio",
                "stderr_ratio",
                "mean_abs_deviation",
                "stderr_abs_deviation",
                "fraction_below_0.7",
                "mean_k_hat",
                "k_star",
                "count",
            ])?;
            for s in summaries {
                w.write_record([
                    s.n.to_string(),
                    s.criterion.name().to_string(),
                    s.k_n.to_string(),
                    s.ratio.mean.to_string(),
                    s.ratio.stderr.to_string(),
                    s.abs_deviation.mean.to_string(),
                    s.abs_deviation.stderr.to_string(),
                    s.fraction_below_0_7.to_string(),
                    s.k_hat.mean.to_string(),
                    s.k_star.to_string(),
                    s.ratio.count.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Artifacts::Clt(r) => {
            let mut w = csv::Writer::from_writer(create(dir, "clt.csv", &mut written)?);
            w.write_record([
                "coordinate",
                "phi",
                "mean_z",
                "stderr_z",
                "sigma_plugin",
                "sigma_mc",
                "coverage",
                "jarque_bera",
                "frobenius_rel",
            ])?;
            for i in 0..r.k {
                w.write_record([
                    (i + 1).to_string(),
                    r.phi[i].to_string(),
                    r.z[i].mean.to_string(),
                    r.z[i].stderr.to_string(),
                    r.sigma_plugin[i][i].to_string(),
                    r.sigma_mc[i][i].to_string(),
                    r.coverage[i].to_string(),
                    r.jarque_bera[i].to_string(),
                    r.frobenius_rel.to_string(),
                ])?;
            }
            w.flush()?;
        }
        Artifacts::DepProfile(profile) => {
            profile.write_csv(create(dir, "delta.csv", &mut written)?)?;
            let alphas = report.config.alphas();
            let cutoffs = report.config.cutoffs();
            depmeasure::write_partial_d_csv(create(dir, "partial_d.csv", &mut written)?, profile, &alphas, &cutoffs)?;
        }
        Artifacts::Simulate { path, model } => {
            path.write_csv(create(dir, "path.csv", &mut written)?)?;
            model.write_gamma_csv(create(dir, "gamma.csv", &mut written)?)?;
            model.write_ar_csv(create(dir, "ar.csv", &mut written)?)?;
        }
        Artifacts::Fit(fit) => {
            fit.write_csv(create(dir, "fit.csv", &mut written)?)?;
        }
        Artifacts::Select { fit, selections, k_max } => {
            let crits: Vec<_> = selections.iter().map(|s| s.criterion).collect();
            criteria::write_scores_csv(create(dir, "scores.csv", &mut written)?, fit, &crits, *k_max)?;
            criteria::write_selection_csv(create(dir, "selection.csv", &mut written)?, selections)?;
        }
    }
    let manifest = serde_json::to_string_pretty(report).map_err(|e| ArselError::Config(e.to_string()))?;
    let path = dir.join("manifest.json");
    fs::write(&path, manifest + "\n")?;
    written.push(path);
    Ok(written)
}
