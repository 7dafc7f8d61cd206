//! Monte-Carlo benchmark of all detectors over simulated replicates.
//!
//! Replicates run on the current rayon pool. Each replicate derives its
//! random stream from `(seed, run_index)` and results are reduced in run
//! order, so metrics do not depend on the number of threads.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::competitors::{median_point, presso_outlier_test, radial_mr, PressoConfig};
use crate::data::SummaryDataset;
use crate::error::{MrError, Result};
use crate::gcq::{detect_outliers_gcq, GcqOptions};
use crate::heterogeneity::{q_outlier_test, WeightScheme};
use crate::ivw::ivw_multivariable;
use crate::outlier::OutlierReport;
use crate::stats::stable_hash;

use super::config::SimConfig;
use super::dgp::generate_replicate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    FullModel,
    Standard,
    Sanderson,
    Presso,
    Radial,
    Gcq,
    Median,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::FullModel,
        Method::Standard,
        Method::Sanderson,
        Method::Presso,
        Method::Radial,
        Method::Gcq,
        Method::Median,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::FullModel => "full_model",
            Method::Standard => "standard",
            Method::Sanderson => "sanderson",
            Method::Presso => "presso",
            Method::Radial => "radial",
            Method::Gcq => "gcq",
            Method::Median => "median",
        }
    }

    /// Whether the method produces an outlier set.
    pub fn detects(self) -> bool {
        !matches!(self, Method::FullModel | Method::Median)
    }

    pub fn univariable_only(self) -> bool {
        matches!(self, Method::Radial | Method::Median)
    }

    /// All methods applicable with `d` exposures, in table order.
    pub fn defaults_for(d: usize) -> Vec<Method> {
        Self::ALL
            .into_iter()
            .filter(|m| d == 1 || !m.univariable_only())
            .collect()
    }
}

impl FromStr for Method {
    type Err = MrError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.label() == s || (s == "full" && *m == Method::FullModel))
            .ok_or_else(|| MrError::InvalidConfig(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodMetrics {
    pub method: Method,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub mean_bias: Vec<f64>,
    pub mse: Vec<f64>,
    /// Mean detected count over the true outlier count.
    pub p_bar: Option<f64>,
    /// Mean detected count.
    pub a_bar: Option<f64>,
    pub runs_ok: usize,
    /// Replicates where the method returned an error; excluded from the means.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimMetrics {
    pub setting: String,
    pub n_runs: usize,
    pub n_exposures: usize,
    pub methods: Vec<MethodMetrics>,
}

impl SimMetrics {
    pub fn get(&self, m: Method) -> Option<&MethodMetrics> {
        self.methods.iter().find(|x| x.method == m)
    }

    /// Rows are measures, columns are methods; `-` marks a measure that does
    /// not apply.
    pub fn to_csv(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        let mut out = String::from("measure");
        for m in &self.methods {
            out.push(',');
            out.push_str(m.method.label());
        }
        out.push('\n');
        let mut row = |name: String, f: &dyn Fn(&MethodMetrics) -> Option<f64>| {
            out.push_str(&name);
            for m in &self.methods {
                out.push(',');
                out.push_str(&fmt(f(m)));
            }
            out.push('\n');
        };
        row("sensitivity".into(), &|m| m.sensitivity);
        row("specificity".into(), &|m| m.specificity);
        let suffix = |j: usize| {
            if self.n_exposures == 1 {
                String::new()
            } else {
                format!("_theta{}", j + 1)
            }
        };
        for j in 0..self.n_exposures {
            row(format!("mean_bias{}", suffix(j)), &|m| m.mean_bias.get(j).copied());
        }
        for j in 0..self.n_exposures {
            row(format!("mse{}", suffix(j)), &|m| m.mse.get(j).copied());
        }
        row("p_bar".into(), &|m| m.p_bar);
        row("a_bar".into(), &|m| m.a_bar);
        row("runs_ok".into(), &|m| Some(m.runs_ok as f64));
        row("failures".into(), &|m| Some(m.failures as f64));
        // counts print without decimals
        out.lines()
            .map(|l| {
                if l.starts_with("runs_ok") || l.starts_with("failures") {
                    l.split(',')
                        .map(|c| c.strip_suffix(".000000").unwrap_or(c))
                        .collect::<Vec<_>>()
                        .join(",")
                } else {
                    l.to_string()
                }
            })
            .fold(String::new(), |mut acc, l| {
                let _ = writeln!(acc, "{l}");
                acc
            })
    }
}

/// One method's result on one replicate.
#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    theta: Vec<f64>,
    flags: Option<Vec<bool>>,
}

fn from_report(r: OutlierReport) -> Outcome {
    Outcome {
        flags: Some(r.flagged_mask()),
        theta: r.refit.theta,
    }
}

fn run_method(
    m: Method,
    data: &SummaryDataset,
    cfg: &SimConfig,
    run_index: u64,
) -> Result<Outcome> {
    let alpha = cfg.alpha;
    match m {
        Method::FullModel => Ok(Outcome {
            theta: ivw_multivariable(data)?.theta,
            flags: None,
        }),
        Method::Standard => {
            q_outlier_test(data, WeightScheme::FirstOrder, alpha, "standard").map(from_report)
        }
        Method::Sanderson => {
            q_outlier_test(data, WeightScheme::second_order(), alpha, "sanderson")
                .map(from_report)
        }
        Method::Presso => {
            let pcfg = PressoConfig {
                n_simulations: cfg.presso_draws(),
                seed: cfg.seed ^ stable_hash(&format!("presso/{run_index}")),
                alpha,
                perturb_exposures: true,
            };
            presso_outlier_test(data, &pcfg).map(from_report)
        }
        Method::Radial => {
            radial_mr(data, WeightScheme::second_order(), alpha).map(|r| from_report(r.report))
        }
        Method::Gcq => detect_outliers_gcq(
            data,
            GcqOptions {
                alpha,
                ..Default::default()
            },
        )
        .map(|r| from_report(r.to_report())),
        Method::Median => Ok(Outcome {
            theta: vec![median_point(data, true)?],
            flags: None,
        }),
    }
}

type RunResult = (Vec<bool>, Vec<Result<Outcome>>, Vec<f64>);

fn run_one(cfg: &SimConfig, methods: &[Method], run_index: u64) -> Result<RunResult> {
    let rep = generate_replicate(cfg, run_index)?;
    let truth: Vec<bool> = rep
        .data
        .snp_ids()
        .map(|id| rep.true_outliers.iter().any(|t| t == id))
        .collect();
    let outcomes = methods
        .iter()
        .map(|m| run_method(*m, &rep.data, cfg, run_index))
        .collect();
    Ok((truth, outcomes, rep.true_theta))
}

#[derive(Default)]
struct Acc {
    sens: (f64, usize),
    tn_rate: (f64, usize),
    bias: Vec<f64>,
    sq: Vec<f64>,
    flagged: f64,
    ok: usize,
    failures: usize,
}

pub fn run_benchmark(cfg: &SimConfig, methods: &[Method]) -> Result<SimMetrics> {
    cfg.validate()?;
    let d = cfg.n_exposures;
    if let Some(m) = methods.iter().find(|m| d > 1 && m.univariable_only()) {
        return Err(MrError::InvalidConfig(format!(
            "{} needs a single exposure",
            m.label()
        )));
    }
    let runs: Vec<Result<RunResult>> = (0..cfg.n_runs as u64)
        .into_par_iter()
        .map(|r| run_one(cfg, methods, r))
        .collect();

    let mut acc: Vec<Acc> = methods
        .iter()
        .map(|_| Acc {
            bias: vec![0.0; d],
            sq: vec![0.0; d],
            ..Default::default()
        })
        .collect();
    for run in runs {
        let (truth, outcomes, theta) = match run {
            Ok(r) => r,
            Err(_) => {
                for a in acc.iter_mut() {
                    a.failures += 1;
                }
                continue;
            }
        };
        let n_true = truth.iter().filter(|t| **t).count();
        let n_valid = truth.len() - n_true;
        for (a, outcome) in acc.iter_mut().zip(outcomes) {
            let o = match outcome {
                Ok(o) if o.theta.iter().all(|t| t.is_finite()) => o,
                _ => {
                    a.failures += 1;
                    continue;
                }
            };
            a.ok += 1;
            for j in 0..d {
                let e = o.theta[j] - theta[j];
                a.bias[j] += e;
                a.sq[j] += e * e;
            }
            if let Some(flags) = o.flags {
                let tp = flags.iter().zip(&truth).filter(|(f, t)| **f && **t).count();
                let tn = flags.iter().zip(&truth).filter(|(f, t)| !**f && !**t).count();
                if n_true > 0 {
                    a.sens.0 += tp as f64 / n_true as f64;
                    a.sens.1 += 1;
                }
                if n_valid > 0 {
                    a.tn_rate.0 += tn as f64 / n_valid as f64;
                    a.tn_rate.1 += 1;
                }
                a.flagged += flags.iter().filter(|f| **f).count() as f64;
            }
        }
    }

    let n_true = cfg.n_outliers();
    let ratio = |(s, c): (f64, usize)| (c > 0).then(|| s / c as f64);
    let metrics = methods
        .iter()
        .zip(acc)
        .map(|(m, a)| {
            let ok = a.ok.max(1) as f64;
            let a_bar = (m.detects() && a.ok > 0).then(|| a.flagged / ok);
            MethodMetrics {
                method: *m,
                sensitivity: if m.detects() { ratio(a.sens) } else { None },
                specificity: if m.detects() { ratio(a.tn_rate) } else { None },
                mean_bias: a.bias.iter().map(|b| b / ok).collect(),
                mse: a.sq.iter().map(|s| s / ok).collect(),
                p_bar: a_bar.filter(|_| n_true > 0).map(|x| x / n_true as f64),
                a_bar,
                runs_ok: a.ok,
                failures: a.failures,
            }
        })
        .collect();
    Ok(SimMetrics {
        setting: cfg.name.clone(),
        n_runs: cfg.n_runs,
        n_exposures: d,
        methods: metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(preset: &str) -> SimConfig {
        let mut cfg = SimConfig::preset(preset).unwrap();
        cfg.n_individuals = 3000;
        cfg.n_snps = 30;
        cfg.n_runs = 4;
        cfg.presso_simulations = Some(200);
        cfg
    }

    #[test]
    fn method_labels_parse() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert_eq!("full".parse::<Method>().unwrap(), Method::FullModel);
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn multivariable_rejects_radial() {
        let cfg = tiny("multi10");
        assert!(run_benchmark(&cfg, &[Method::Radial]).is_err());
        assert_eq!(Method::defaults_for(3).len(), 5);
    }

    #[test]
    fn metrics_in_range_and_csv_shape() {
        let cfg = tiny("uni10");
        let m = run_benchmark(&cfg, &Method::defaults_for(1)).unwrap();
        for mm in &m.methods {
            assert_eq!(mm.runs_ok + mm.failures, 4);
            for v in [mm.sensitivity, mm.specificity].into_iter().flatten() {
                assert!((0.0..=1.0).contains(&v));
            }
            assert!(mm.mse.iter().all(|v| *v >= 0.0));
        }
        assert!(m.get(Method::FullModel).unwrap().sensitivity.is_none());
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "measure,full_model,standard,sanderson,presso,radial,gcq,median"
        );
        assert_eq!(lines.len(), 1 + 8);
        assert!(lines[7].starts_with("runs_ok,4,"));
    }

    #[test]
    fn multivariable_csv_has_one_row_per_theta() {
        let mut cfg = tiny("multi10");
        cfg.n_runs = 2;
        let m = run_benchmark(&cfg, &[Method::FullModel, Method::Gcq]).unwrap();
        let csv = m.to_csv();
        assert!(csv.contains("\nmean_bias_theta3,"));
        assert!(csv.contains("\nmse_theta1,"));
    }
}
