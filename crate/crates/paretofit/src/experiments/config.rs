//! Strict JSON configuration for the experiment runner.
//!
//! Every config file carries a `kind` field that must match the subcommand;
//! unknown keys anywhere are errors. Defaults reproduce the desk-scale
//! versions of the published experiments.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataio::{CsvSchema, DatasetPreset, PreprocessPlan, RiskMetric};
use crate::error::{Error, Result};
use crate::solvers::SolverSettings;

/// Experiment families understood by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SynthSweep,
    FrontCompare,
    FairnessRun,
    AdversarialContrast,
    HvReport,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::SynthSweep => "synth_sweep",
            ExperimentKind::FrontCompare => "front_compare",
            ExperimentKind::FairnessRun => "fairness_run",
            ExperimentKind::AdversarialContrast => "adversarial_contrast",
            ExperimentKind::HvReport => "hv_report",
        }
    }
}

/// Parse a config file, checking the `kind` tag against the subcommand.
pub fn load_config<T: serde::de::DeserializeOwned>(
    path: &Path,
    expected: ExperimentKind,
) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.to_path_buf(), e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    let kind = obj
        .remove("kind")
        .ok_or_else(|| Error::Config("config is missing the `kind` field".into()))?;
    let kind: ExperimentKind =
        serde_json::from_value(kind).map_err(|e| Error::Config(format!("invalid `kind`: {e}")))?;
    if kind != expected {
        return Err(Error::Config(format!(
            "config kind `{}` does not match the `{}` subcommand",
            kind.as_str(),
            expected.as_str()
        )));
    }
    serde_json::from_value(value).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Convergence controls, mirroring [`SolverSettings`] minus the seed (seeds
/// follow the repeat schedule).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverSettings::default();
        SolverConfig {
            tol: s.tol,
            max_iter: s.max_iter,
        }
    }
}

impl SolverConfig {
    pub fn settings(&self, seed: u64) -> SolverSettings {
        SolverSettings {
            tol: self.tol,
            max_iter: self.max_iter,
            seed,
        }
    }
}

/// How stage-1 lasso penalties (and the direct baseline's penalty) are
/// chosen.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum PenaltyConfig {
    /// Hold out a fifth of the labeled rows and scan a 20-point log grid.
    #[default]
    Validated,
    /// One fixed strength for every fit.
    Fixed { alpha: f64 },
    /// The theory-backed stage-1 strength `136 B sigma sqrt(log d / n)`.
    Theory { b_bound: f64, sigma: f64 },
}

/// Hypernetwork training controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub hidden: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            steps: 2000,
            learning_rate: 1e-3,
            hidden: 128,
        }
    }
}

impl TrainConfig {
    pub fn settings(&self, seed: u64) -> crate::pareto_set::TrainSettings {
        crate::pareto_set::TrainSettings {
            steps: self.steps,
            learning_rate: self.learning_rate,
            hidden: self.hidden,
            seed,
            ..crate::pareto_set::TrainSettings::default()
        }
    }
}

fn default_repeats_sweep() -> usize {
    10
}

fn default_base_seed() -> u64 {
    1
}

/// Sparsity-by-unlabeled sweep of the two-stage estimator's excess
/// scalarized loss at equal weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSweepConfig {
    #[serde(default = "SynthSweepConfig::default_dim")]
    pub dim: usize,
    #[serde(default = "SynthSweepConfig::default_n_labeled")]
    pub n_labeled: usize,
    #[serde(default = "SynthSweepConfig::default_sparsity_values")]
    pub sparsity_values: Vec<usize>,
    #[serde(default = "SynthSweepConfig::default_unlabeled_values")]
    pub unlabeled_values: Vec<usize>,
    #[serde(default = "SynthSweepConfig::default_noise_sd")]
    pub noise_sd: f64,
    #[serde(default = "SynthSweepConfig::default_eig_lo")]
    pub eig_lo: f64,
    #[serde(default = "SynthSweepConfig::default_eig_hi")]
    pub eig_hi: f64,
    #[serde(default = "default_repeats_sweep")]
    pub repeats: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    /// Seed for the experiment-level covariance pair, which is held fixed
    /// across cells and repeats.
    #[serde(default)]
    pub instance_seed: u64,
    #[serde(default)]
    pub penalty: PenaltyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl SynthSweepConfig {
    fn default_dim() -> usize {
        50
    }
    fn default_n_labeled() -> usize {
        15
    }
    fn default_sparsity_values() -> Vec<usize> {
        vec![5, 15, 25, 35, 45]
    }
    fn default_unlabeled_values() -> Vec<usize> {
        vec![15, 24, 33, 41, 50]
    }
    fn default_noise_sd() -> f64 {
        0.5
    }
    fn default_eig_lo() -> f64 {
        0.5
    }
    fn default_eig_hi() -> f64 {
        2.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.sparsity_values.is_empty() || self.unlabeled_values.is_empty() {
            return Err(Error::Config("sweep grids must be nonempty".into()));
        }
        if self
            .sparsity_values
            .iter()
            .any(|s| *s == 0 || *s > self.dim)
        {
            return Err(Error::Config("sparsity values must lie in 1..=dim".into()));
        }
        if !(self.eig_lo > 0.0 && self.eig_lo <= self.eig_hi) {
            return Err(Error::Config("need 0 < eig_lo <= eig_hi".into()));
        }
        Ok(())
    }
}

impl Default for SynthSweepConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}

/// Methods available to the front-comparison experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    TwoStage,
    DirectRegularized,
    PlugIn,
    HypernetTwoStage,
    HypernetDirect,
}

impl MethodName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodName::TwoStage => "two_stage",
            MethodName::DirectRegularized => "direct_regularized",
            MethodName::PlugIn => "plug_in",
            MethodName::HypernetTwoStage => "hypernet_two_stage",
            MethodName::HypernetDirect => "hypernet_direct",
        }
    }
}

fn default_methods() -> Vec<MethodName> {
    vec![
        MethodName::TwoStage,
        MethodName::DirectRegularized,
        MethodName::PlugIn,
        MethodName::HypernetTwoStage,
        MethodName::HypernetDirect,
    ]
}

/// How the synthetic covariance spectra are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumConfig {
    Uniform,
    LogUniform,
}

impl SpectrumConfig {
    pub fn kind(&self) -> crate::datagen::SpectrumKind {
        match self {
            SpectrumConfig::Uniform => crate::datagen::SpectrumKind::Uniform,
            SpectrumConfig::LogUniform => crate::datagen::SpectrumKind::LogUniform,
        }
    }
}

/// Estimated-front comparison on a two-objective sparse regression
/// instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontCompareConfig {
    #[serde(default = "FrontCompareConfig::default_dim")]
    pub dim: usize,
    #[serde(default = "FrontCompareConfig::default_n_labeled")]
    pub n_labeled: usize,
    #[serde(default = "FrontCompareConfig::default_n_unlabeled")]
    pub n_unlabeled: usize,
    #[serde(default = "FrontCompareConfig::default_sparsity")]
    pub sparsity: usize,
    #[serde(default = "SynthSweepConfig::default_noise_sd")]
    pub noise_sd: f64,
    #[serde(default = "FrontCompareConfig::default_eig_lo")]
    pub eig_lo: f64,
    #[serde(default = "SynthSweepConfig::default_eig_hi")]
    pub eig_hi: f64,
    /// Anisotropic (log-uniform) spectra by default; the flat-spectrum
    /// family keeps the sample covariance too inaccurate at these sizes for
    /// either method to benefit.
    #[serde(default = "FrontCompareConfig::default_spectrum")]
    pub spectrum: SpectrumConfig,
    #[serde(default = "FrontCompareConfig::default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default = "FrontCompareConfig::default_grid_size")]
    pub lambda_grid_size: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<MethodName>,
    #[serde(default)]
    pub penalty: PenaltyConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl FrontCompareConfig {
    fn default_dim() -> usize {
        80
    }
    fn default_n_labeled() -> usize {
        25
    }
    fn default_n_unlabeled() -> usize {
        60
    }
    fn default_sparsity() -> usize {
        1
    }
    fn default_eig_lo() -> f64 {
        0.1
    }
    fn default_spectrum() -> SpectrumConfig {
        SpectrumConfig::LogUniform
    }
    fn default_repeats() -> usize {
        50
    }
    fn default_grid_size() -> usize {
        10
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 || self.lambda_grid_size == 0 {
            return Err(Error::Config(
                "repeats and lambda_grid_size must be at least 1".into(),
            ));
        }
        if self.sparsity == 0 || self.sparsity > self.dim {
            return Err(Error::Config("sparsity must lie in 1..=dim".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.n_labeled + self.n_unlabeled < self.dim {
            return Err(Error::Config(
                "two-stage needs n_labeled + n_unlabeled >= dim for a nonsingular covariance"
                    .into(),
            ));
        }
        Ok(())
    }
}

impl Default for FrontCompareConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}

/// Where the fairness experiment gets its data.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum FairnessSource {
    /// The Gaussian group model with a sparse ground truth.
    Synthetic {
        dim: usize,
        sparsity: usize,
        n_labeled: usize,
        n_unlabeled: usize,
        #[serde(default = "FairnessSource::default_mu_norm")]
        mu_norm: f64,
        /// Cosine of the angle between the group-mean direction and the
        /// ground truth. Independent draws in high dimension are nearly
        /// orthogonal, which erases the fairness-risk trade-off; a
        /// controlled overlap keeps it present.
        #[serde(default = "FairnessSource::default_mu_overlap")]
        mu_overlap: f64,
        #[serde(default = "SynthSweepConfig::default_noise_sd")]
        noise_sd: f64,
        #[serde(default = "FairnessSource::default_test_size")]
        test_size: usize,
    },
    /// A CSV file with an explicit schema and preprocessing plan.
    Csv {
        path: PathBuf,
        schema: CsvSchema,
        plan: PreprocessPlan,
        #[serde(default = "FairnessSource::default_risk_metric")]
        risk_metric: RiskMetric,
    },
    /// A CSV file with one of the built-in dataset plans.
    Preset {
        preset: DatasetPreset,
        path: PathBuf,
    },
}

impl FairnessSource {
    fn default_mu_norm() -> f64 {
        1.0
    }
    fn default_mu_overlap() -> f64 {
        0.5
    }
    fn default_test_size() -> usize {
        2000
    }
    fn default_risk_metric() -> RiskMetric {
        RiskMetric::SquaredLoss
    }
}

/// Fairness-risk front comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairnessConfig {
    pub source: FairnessSource,
    #[serde(default = "FairnessConfig::default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default = "FrontCompareConfig::default_grid_size")]
    pub lambda_grid_size: usize,
    /// Risk weight substituted for the pure-fairness grid endpoint, where
    /// the two-stage closed form needs a strongly convex term.
    #[serde(default = "FairnessConfig::default_min_risk_weight")]
    pub min_risk_weight: f64,
    /// Rescale the risk term by `1/n_labeled` inside the two-stage solve
    /// (changes only the effective trade-off weighting).
    #[serde(default)]
    pub risk_scale_one_over_n: bool,
    #[serde(default = "FairnessConfig::default_threshold")]
    pub classification_threshold: f64,
    #[serde(default)]
    pub penalty: PenaltyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl FairnessConfig {
    fn default_repeats() -> usize {
        20
    }
    fn default_min_risk_weight() -> f64 {
        0.05
    }
    fn default_threshold() -> f64 {
        0.5
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 || self.lambda_grid_size == 0 {
            return Err(Error::Config(
                "repeats and lambda_grid_size must be at least 1".into(),
            ));
        }
        if !(self.min_risk_weight > 0.0 && self.min_risk_weight < 1.0) {
            return Err(Error::Config(
                "min_risk_weight must lie strictly between 0 and 1".into(),
            ));
        }
        match &self.source {
            FairnessSource::Synthetic {
                dim,
                sparsity,
                n_labeled,
                ..
            } => {
                if *sparsity == 0 || sparsity > dim {
                    return Err(Error::Config("sparsity must lie in 1..=dim".into()));
                }
                if *n_labeled == 0 {
                    return Err(Error::Config("n_labeled must be at least 1".into()));
                }
            }
            FairnessSource::Csv { path, schema, .. } => {
                schema.validate()?;
                if !path.exists() {
                    return Err(Error::Config(format!(
                        "dataset file {} does not exist",
                        path.display()
                    )));
                }
            }
            FairnessSource::Preset { path, .. } => {
                if !path.exists() {
                    return Err(Error::Config(format!(
                        "dataset file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Worst-case covariance contrast between two-stage and best-penalty direct
/// regularization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarialConfig {
    #[serde(default = "AdversarialConfig::default_dim")]
    pub dim: usize,
    #[serde(default = "AdversarialConfig::default_n_labeled")]
    pub n_labeled: usize,
    #[serde(default = "AdversarialConfig::default_gamma")]
    pub gamma: f64,
    #[serde(default = "SynthSweepConfig::default_noise_sd")]
    pub noise_sd: f64,
    #[serde(default = "AdversarialConfig::default_target_norm")]
    pub target_norm: f64,
    #[serde(default = "AdversarialConfig::default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl AdversarialConfig {
    fn default_dim() -> usize {
        64
    }
    fn default_n_labeled() -> usize {
        80
    }
    fn default_gamma() -> f64 {
        2.0
    }
    fn default_target_norm() -> f64 {
        0.9
    }
    fn default_repeats() -> usize {
        20
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.n_labeled < self.dim {
            return Err(Error::Config("fixed designs need n_labeled >= dim".into()));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::Config("gamma must exceed 1".into()));
        }
        if !(self.target_norm > 0.0 && self.target_norm <= 1.0) {
            return Err(Error::Config("target_norm must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

impl Default for AdversarialConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}

/// Hypervolume report for estimated fronts on a synthetic instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HvReportConfig {
    #[serde(default = "HvReportConfig::default_dim")]
    pub dim: usize,
    #[serde(default = "HvReportConfig::default_sparsity")]
    pub sparsity: usize,
    #[serde(default = "HvReportConfig::default_n_labeled")]
    pub n_labeled: usize,
    #[serde(default = "HvReportConfig::default_n_unlabeled")]
    pub n_unlabeled: usize,
    #[serde(default = "SynthSweepConfig::default_noise_sd")]
    pub noise_sd: f64,
    #[serde(default = "SynthSweepConfig::default_eig_lo")]
    pub eig_lo: f64,
    #[serde(default = "SynthSweepConfig::default_eig_hi")]
    pub eig_hi: f64,
    #[serde(default = "HvReportConfig::default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_base_seed")]
    pub base_seed: u64,
    #[serde(default = "FrontCompareConfig::default_grid_size")]
    pub lambda_grid_size: usize,
    #[serde(default = "HvReportConfig::default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub penalty: PenaltyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl HvReportConfig {
    fn default_dim() -> usize {
        12
    }
    fn default_sparsity() -> usize {
        3
    }
    fn default_n_labeled() -> usize {
        40
    }
    fn default_n_unlabeled() -> usize {
        200
    }
    fn default_repeats() -> usize {
        5
    }
    fn default_mc_samples() -> usize {
        100_000
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 || self.lambda_grid_size == 0 || self.mc_samples == 0 {
            return Err(Error::Config(
                "repeats, lambda_grid_size and mc_samples must be at least 1".into(),
            ));
        }
        if self.sparsity == 0 || self.sparsity > self.dim {
            return Err(Error::Config("sparsity must lie in 1..=dim".into()));
        }
        if self.n_labeled + self.n_unlabeled < self.dim {
            return Err(Error::Config("need n_labeled + n_unlabeled >= dim".into()));
        }
        Ok(())
    }
}

impl Default for HvReportConfig {
    fn default() -> Self {
        serde_json::from_value(serde_json::json!({})).expect("defaults")
    }
}
