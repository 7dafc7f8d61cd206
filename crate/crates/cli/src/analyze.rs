use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use mr_hetero::competitors::{
    median_estimator, presso_global, presso_outlier_test, radial_mr, radial_points_csv,
    MedianConfig, PressoConfig,
};
use mr_hetero::{
    detect_outliers_gcq, ivw_multivariable, load_dataset, load_exposure_cov, q_outlier_test,
    CausalEstimate, GcqOptions, GcqWarning, OutlierReport, SummaryDataset, WeightScheme,
};

use crate::manifest::Manifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Full,
    Standard,
    Sanderson,
    Presso,
    Radial,
    Gcq,
    Median,
    All,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Tab-separated summary statistics.
    #[arg(long)]
    pub data: PathBuf,
    /// Number of exposures in the data file.
    #[arg(long)]
    pub exposures: usize,
    /// Optional per-SNP exposure covariance file (multivariable only).
    #[arg(long)]
    pub cov: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// MR-PRESSO null simulations.
    #[arg(long, default_value_t = 1000)]
    pub presso_sims: usize,
    /// Bootstrap draws for the median estimator's standard error.
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    /// Median estimator without weights.
    #[arg(long)]
    pub unweighted_median: bool,
    #[arg(long)]
    pub out: PathBuf,
}

struct Outputs {
    estimates: String,
    outliers: String,
    radial: Option<String>,
}

fn push_estimate(out: &mut String, e: &CausalEstimate) {
    for j in 0..e.theta.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.method_label,
            j + 1,
            e.theta[j],
            e.se[j],
            e.p_values[j],
            e.n_snps_used
        );
    }
}

fn push_report(out: &mut Outputs, r: &OutlierReport) {
    push_estimate(&mut out.estimates, &r.refit);
    for (i, id) in r.snp_ids.iter().enumerate() {
        let _ = writeln!(
            out.outliers,
            "{},{},{},{},{}",
            r.method_label,
            id,
            r.statistic[i],
            r.per_snp_p[i],
            r.is_flagged(id)
        );
    }
}

fn selected(method: MethodArg, d: usize, manifest: &mut Manifest) -> Vec<MethodArg> {
    use MethodArg::*;
    if method != All {
        return vec![method];
    }
    let mut v = vec![Full, Standard, Sanderson, Presso, Gcq];
    if d == 1 {
        v.extend([Radial, Median]);
    } else {
        manifest
            .notes
            .push("radial and median skipped: they need a single exposure".into());
    }
    v
}

pub fn run(args: &AnalyzeArgs) -> Result<()> {
    let mut data: SummaryDataset = load_dataset(&args.data, args.exposures)?;
    if let Some(cov) = &args.cov {
        data = load_exposure_cov(cov, data)?;
    }
    let mut manifest = Manifest::new("analyze", args.seed);
    manifest.inputs.push(args.data.clone());
    if let Some(cov) = &args.cov {
        manifest.inputs.push(cov.clone());
    }
    manifest.set("method", format!("{:?}", args.method).to_lowercase());
    manifest.set("exposures", args.exposures);
    manifest.set("n_snps", data.n());
    manifest.set("alpha", args.alpha);
    manifest.set("presso_sims", args.presso_sims);
    manifest.set("bootstrap", args.bootstrap);
    manifest.set("weighted_median", !args.unweighted_median);

    let mut out = Outputs {
        estimates: String::from("method,exposure,theta,se,p_value,n_snps\n"),
        outliers: String::from("method,snp_id,statistic,p_value,flagged\n"),
        radial: None,
    };
    for m in selected(args.method, data.d(), &mut manifest) {
        match m {
            MethodArg::Full => push_estimate(&mut out.estimates, &ivw_multivariable(&data)?.relabel("full")),
            MethodArg::Standard => push_report(
                &mut out,
                &q_outlier_test(&data, WeightScheme::FirstOrder, args.alpha, "standard")?,
            ),
            MethodArg::Sanderson => push_report(
                &mut out,
                &q_outlier_test(&data, WeightScheme::second_order(), args.alpha, "sanderson")?,
            ),
            MethodArg::Presso => {
                let cfg = PressoConfig {
                    n_simulations: args.presso_sims,
                    seed: args.seed,
                    alpha: args.alpha,
                    perturb_exposures: true,
                };
                let global = presso_global(&data, &cfg)?;
                manifest.notes.push(format!(
                    "presso global test: rss = {}, p = {}",
                    global.rss_observed, global.p_value
                ));
                push_report(&mut out, &presso_outlier_test(&data, &cfg)?);
            }
            MethodArg::Radial => {
                let res = radial_mr(&data, WeightScheme::second_order(), args.alpha)?;
                out.radial = Some(radial_points_csv(&res.points));
                push_report(&mut out, &res.report);
            }
            MethodArg::Gcq => {
                let res = detect_outliers_gcq(
                    &data,
                    GcqOptions {
                        alpha: args.alpha,
                        ..Default::default()
                    },
                )?;
                manifest.notes.push(format!(
                    "gcq: lambda = {}, alpha* = {}, critical value = {}",
                    res.lambda_hat, res.alpha_star, res.critical_value
                ));
                if res.warning == Some(GcqWarning::DegenerateLambda) {
                    manifest
                        .notes
                        .push("gcq warning: DegenerateLambda, nothing flagged".into());
                }
                push_report(&mut out, &res.to_report());
            }
            MethodArg::Median => {
                let cfg = MedianConfig {
                    weighted: !args.unweighted_median,
                    n_bootstrap: args.bootstrap,
                    seed: args.seed,
                };
                push_estimate(&mut out.estimates, &median_estimator(&data, &cfg)?);
            }
            MethodArg::All => unreachable!(),
        }
    }

    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create output directory {}", args.out.display()))?;
    let mut files = vec![
        ("estimates.csv", out.estimates),
        ("outliers.csv", out.outliers),
    ];
    if let Some(r) = out.radial {
        files.push(("radial.csv", r));
    }
    for (name, body) in files {
        let path = args.out.join(name);
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        manifest.outputs.push(path);
    }
    manifest.write(&args.out)?;
    Ok(())
}
