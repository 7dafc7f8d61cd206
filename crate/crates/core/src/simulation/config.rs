//! Simulation settings, named presets and the `key = value` config format.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{MrError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PleiotropyMode {
    /// Outlier effects are used as drawn (all positive for the default).
    Directional,
    /// Each outlier effect gets an independent random sign.
    Balanced,
}

/// Distribution of the per-allele effect of an outlier SNP on the hidden
/// pleiotropic pathway, in units of the first-stage coefficients (see
/// [`crate::simulation::dgp`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EffectDist {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl std::fmt::Display for EffectDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EffectDist::Uniform { lo, hi } => write!(f, "uniform({lo}, {hi})"),
            EffectDist::Normal { mean, sd } => write!(f, "normal({mean}, {sd})"),
        }
    }
}

impl FromStr for EffectDist {
    type Err = MrError;

    /// `uniform(lo, hi)` or `normal(mean, sd)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || MrError::InvalidConfig(format!("cannot parse effect distribution `{s}`"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        if !s.ends_with(')') {
            return Err(bad());
        }
        let args: Vec<f64> = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        if args.len() != 2 {
            return Err(bad());
        }
        match s[..open].trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(EffectDist::Uniform {
                lo: args[0],
                hi: args[1],
            }),
            "normal" => Ok(EffectDist::Normal {
                mean: args[0],
                sd: args[1],
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub name: String,
    pub n_individuals: usize,
    pub n_snps: usize,
    pub n_exposures: usize,
    pub outlier_fraction: f64,
    pub pleiotropy_mode: PleiotropyMode,
    pub outlier_effect_dist: EffectDist,
    /// Cohort size at which `outlier_effect_dist` applies as given. Smaller
    /// cohorts multiply outlier effects by `sqrt(reference / n_individuals)`,
    /// which keeps the outliers' per-SNP test statistics at their reference
    /// size. `None` applies the distribution unscaled.
    pub effect_reference_individuals: Option<usize>,
    /// Share of each exposure's variance explained by the SNPs.
    pub r2_first_stage: f64,
    /// Share of each exposure's and of the outcome's variance explained by
    /// the confounder.
    pub r2_confounder: f64,
    /// Share of outcome variance explained by the exposures and the
    /// pleiotropic pathway.
    pub r2_second_stage: f64,
    pub causal_effects: Vec<f64>,
    pub pleiotropy_effect: f64,
    pub exposure_error_correlation: f64,
    /// Standard deviation of the first-stage coefficients, drawn around 1.
    pub first_stage_sd: f64,
    pub n_runs: usize,
    pub seed: u64,
    /// Estimate exposure and outcome associations in disjoint halves of the cohort.
    pub two_sample_split: bool,
    pub alpha: f64,
    /// MR-PRESSO null draws; `None` uses `max(1000, ceil(2 n / alpha))`.
    pub presso_simulations: Option<usize>,
}

pub const DESK_INDIVIDUALS: usize = 20_000;
pub const DESK_RUNS: usize = 200;
/// Cohort size the default effect distributions are calibrated at.
pub const REFERENCE_INDIVIDUALS: usize = 500_000;

pub const PRESET_NAMES: [&str; 12] = [
    "uni5",
    "uni10",
    "uni15",
    "uni20",
    "uni-strong",
    "uni-balanced",
    "multi5",
    "multi10",
    "multi15",
    "multi20",
    "uni50",
    "uni80",
];

/// Default directional outlier effects.
pub const DIRECTIONAL_EFFECT: EffectDist = EffectDist::Uniform { lo: 1.25, hi: 3.75 };
/// Stronger directional effects for the `uni-strong` preset.
pub const STRONG_EFFECT: EffectDist = EffectDist::Uniform { lo: 5.0, hi: 15.0 };
pub const BALANCED_EFFECT: EffectDist = DIRECTIONAL_EFFECT;

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            name: "custom".into(),
            n_individuals: DESK_INDIVIDUALS,
            n_snps: 100,
            n_exposures: 1,
            outlier_fraction: 0.1,
            pleiotropy_mode: PleiotropyMode::Directional,
            outlier_effect_dist: DIRECTIONAL_EFFECT,
            effect_reference_individuals: Some(REFERENCE_INDIVIDUALS),
            r2_first_stage: 0.15,
            r2_confounder: 0.15,
            r2_second_stage: 0.5,
            causal_effects: vec![1.0],
            pleiotropy_effect: 1.0,
            exposure_error_correlation: 0.5,
            first_stage_sd: std::f64::consts::SQRT_2,
            n_runs: DESK_RUNS,
            seed: 1,
            two_sample_split: false,
            alpha: 0.05,
            presso_simulations: None,
        }
    }
}

impl SimConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let uni = |p: f64| SimConfig {
            name: name.to_string(),
            outlier_fraction: p,
            ..Default::default()
        };
        let multi = |p: f64| SimConfig {
            name: name.to_string(),
            n_exposures: 3,
            causal_effects: vec![0.0, 1.0, -0.5],
            outlier_fraction: p,
            ..Default::default()
        };
        Ok(match name {
            "uni5" => uni(0.05),
            "uni10" => uni(0.10),
            "uni15" => uni(0.15),
            "uni20" => uni(0.20),
            "uni50" => uni(0.50),
            "uni80" => uni(0.80),
            "uni-strong" => SimConfig {
                outlier_effect_dist: STRONG_EFFECT,
                ..uni(0.15)
            },
            "uni-balanced" => SimConfig {
                pleiotropy_mode: PleiotropyMode::Balanced,
                outlier_effect_dist: BALANCED_EFFECT,
                ..uni(0.20)
            },
            "multi5" => multi(0.05),
            "multi10" => multi(0.10),
            "multi15" => multi(0.15),
            "multi20" => multi(0.20),
            _ => {
                return Err(MrError::InvalidConfig(format!(
                    "unknown preset `{name}` (expected one of {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn n_outliers(&self) -> usize {
        (self.outlier_fraction * self.n_snps as f64).round() as usize
    }

    /// Multiplier applied to drawn outlier effects.
    pub fn effect_scale(&self) -> f64 {
        self.effect_reference_individuals
            .map_or(1.0, |r| (r as f64 / self.n_individuals as f64).sqrt())
    }

    pub fn presso_draws(&self) -> usize {
        self.presso_simulations.unwrap_or_else(|| {
            let needed = (2.0 * self.n_snps as f64 / self.alpha).ceil() as usize;
            needed.max(1000)
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(MrError::InvalidConfig(m));
        if self.n_exposures == 0 {
            return fail("n_exposures must be at least 1".into());
        }
        if self.causal_effects.len() != self.n_exposures {
            return fail(format!(
                "causal_effects has {} entries for {} exposures",
                self.causal_effects.len(),
                self.n_exposures
            ));
        }
        if self.n_snps < 2 || self.n_snps <= self.n_exposures + 1 {
            return fail(format!("n_snps = {} is too small", self.n_snps));
        }
        let min_individuals = if self.two_sample_split { 20 } else { 10 };
        if self.n_individuals < min_individuals {
            return fail(format!("n_individuals = {} is too small", self.n_individuals));
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            return fail(format!("outlier_fraction {} not in [0, 1]", self.outlier_fraction));
        }
        for (key, v) in [
            ("r2_first_stage", self.r2_first_stage),
            ("r2_second_stage", self.r2_second_stage),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return fail(format!("{key} = {v} not in (0, 1)"));
            }
        }
        if !(self.r2_confounder >= 0.0) || self.r2_first_stage + self.r2_confounder >= 1.0 {
            return fail("r2_first_stage + r2_confounder must stay below 1".into());
        }
        if self.r2_second_stage + self.r2_confounder >= 1.0 {
            return fail("r2_second_stage + r2_confounder must stay below 1".into());
        }
        if !(0.0..1.0).contains(&self.exposure_error_correlation) {
            return fail(format!(
                "exposure_error_correlation {} not in [0, 1)",
                self.exposure_error_correlation
            ));
        }
        if !(self.first_stage_sd >= 0.0 && self.first_stage_sd.is_finite()) {
            return fail("first_stage_sd must be finite and non-negative".into());
        }
        match self.outlier_effect_dist {
            EffectDist::Uniform { lo, hi } if !(lo <= hi && lo.is_finite() && hi.is_finite()) => {
                return fail(format!("bad uniform bounds ({lo}, {hi})"));
            }
            EffectDist::Normal { mean, sd } if !(sd >= 0.0 && mean.is_finite() && sd.is_finite()) => {
                return fail(format!("bad normal parameters ({mean}, {sd})"));
            }
            _ => {}
        }
        if !self.causal_effects.iter().all(|t| t.is_finite()) || !self.pleiotropy_effect.is_finite()
        {
            return fail("effects must be finite".into());
        }
        if self.effect_reference_individuals == Some(0) {
            return fail("effect_reference_individuals must be positive".into());
        }
        if self.n_runs == 0 {
            return fail("n_runs must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(MrError::InvalidP(self.alpha));
        }
        if matches!(self.presso_simulations, Some(k) if k < 100) {
            return fail("presso_simulations must be at least 100".into());
        }
        Ok(())
    }

    /// Serialises to the `key = value` format accepted by [`SimConfig::parse`].
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let effects: Vec<String> = self.causal_effects.iter().map(|t| t.to_string()).collect();
        let mode = match self.pleiotropy_mode {
            PleiotropyMode::Directional => "directional",
            PleiotropyMode::Balanced => "balanced",
        };
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "n_individuals = {}", self.n_individuals);
        let _ = writeln!(s, "n_snps = {}", self.n_snps);
        let _ = writeln!(s, "n_exposures = {}", self.n_exposures);
        let _ = writeln!(s, "outlier_fraction = {}", self.outlier_fraction);
        let _ = writeln!(s, "pleiotropy_mode = {mode}");
        let _ = writeln!(s, "outlier_effect_dist = {}", self.outlier_effect_dist);
        let _ = writeln!(
            s,
            "effect_reference_individuals = {}",
            self.effect_reference_individuals.unwrap_or(0)
        );
        let _ = writeln!(s, "r2_first_stage = {}", self.r2_first_stage);
        let _ = writeln!(s, "r2_confounder = {}", self.r2_confounder);
        let _ = writeln!(s, "r2_second_stage = {}", self.r2_second_stage);
        let _ = writeln!(s, "causal_effects = {}", effects.join(", "));
        let _ = writeln!(s, "pleiotropy_effect = {}", self.pleiotropy_effect);
        let _ = writeln!(s, "exposure_error_correlation = {}", self.exposure_error_correlation);
        let _ = writeln!(s, "first_stage_sd = {}", self.first_stage_sd);
        let _ = writeln!(s, "n_runs = {}", self.n_runs);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "two_sample_split = {}", self.two_sample_split);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "presso_simulations = {}", self.presso_draws());
        s
    }

    /// Parses `key = value` lines on top of the defaults. `#` starts a
    /// comment; unknown keys are rejected. A `preset = <name>` line, if
    /// present, must come first and replaces the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                MrError::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                MrError::InvalidConfig(format!("line {}: {key}: {what} `{value}`", lineno + 1))
            };
            let num = |v: &str| v.parse::<f64>().map_err(|_| bad("not a number"));
            let int = |v: &str| v.parse::<usize>().map_err(|_| bad("not a non-negative integer"));
            match key {
                "preset" => {
                    let seed = cfg.seed;
                    cfg = SimConfig::preset(value)?;
                    cfg.seed = seed;
                }
                "name" => cfg.name = value.to_string(),
                "n_individuals" => cfg.n_individuals = int(value)?,
                "n_snps" => cfg.n_snps = int(value)?,
                "n_exposures" => cfg.n_exposures = int(value)?,
                "outlier_fraction" => cfg.outlier_fraction = num(value)?,
                "pleiotropy_mode" => {
                    cfg.pleiotropy_mode = match value.to_ascii_lowercase().as_str() {
                        "directional" => PleiotropyMode::Directional,
                        "balanced" => PleiotropyMode::Balanced,
                        _ => return Err(bad("expected directional or balanced")),
                    }
                }
                "outlier_effect_dist" => cfg.outlier_effect_dist = value.parse()?,
                "effect_reference_individuals" => {
                    cfg.effect_reference_individuals = Some(int(value)?).filter(|r| *r > 0)
                }
                "r2_first_stage" => cfg.r2_first_stage = num(value)?,
                "r2_confounder" => cfg.r2_confounder = num(value)?,
                "r2_second_stage" => cfg.r2_second_stage = num(value)?,
                "causal_effects" => {
                    cfg.causal_effects = value
                        .split(',')
                        .map(|v| num(v.trim()))
                        .collect::<Result<_>>()?
                }
                "pleiotropy_effect" => cfg.pleiotropy_effect = num(value)?,
                "exposure_error_correlation" => cfg.exposure_error_correlation = num(value)?,
                "first_stage_sd" => cfg.first_stage_sd = num(value)?,
                "n_runs" => cfg.n_runs = int(value)?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("not a 64-bit seed"))?,
                "two_sample_split" => {
                    cfg.two_sample_split = value.parse().map_err(|_| bad("expected true or false"))?
                }
                "alpha" => cfg.alpha = num(value)?,
                "presso_simulations" => cfg.presso_simulations = Some(int(value)?),
                _ => {
                    return Err(MrError::InvalidConfig(format!(
                        "line {}: unknown key `{key}`",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
