//! Experiment configuration files.
//!
//! A config is a JSON object `{"experiment": <id>, "seed": <u64>,
//! "output_dir": <path>, "params": {...}}`. Only `experiment` is required;
//! every parameter has a default reproducing the acceptance run. Unknown keys
//! are rejected at every level.

use std::fmt;
use std::path::{Path, PathBuf};

use schemars::{JsonSchema, Schema};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    MnlsGd,
    KernelEig,
    RffScaling,
    QnormSimple,
    QnormReuploading,
    Separation,
    Dlp,
    PerfectFn,
    AdvantageDemo,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::MnlsGd,
        ExperimentId::KernelEig,
        ExperimentId::RffScaling,
        ExperimentId::QnormSimple,
        ExperimentId::QnormReuploading,
        ExperimentId::Separation,
        ExperimentId::Dlp,
        ExperimentId::PerfectFn,
        ExperimentId::AdvantageDemo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::MnlsGd => "mnls-gd",
            ExperimentId::KernelEig => "kernel-eig",
            ExperimentId::RffScaling => "rff-scaling",
            ExperimentId::QnormSimple => "qnorm-simple",
            ExperimentId::QnormReuploading => "qnorm-reuploading",
            ExperimentId::Separation => "separation",
            ExperimentId::Dlp => "dlp",
            ExperimentId::PerfectFn => "perfect-fn",
            ExperimentId::AdvantageDemo => "advantage-demo",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentId::MnlsGd => "gradient descent converges to the minimum-norm interpolant; exact recovery when p <= M",
            ExperimentId::KernelEig => "smallest eigenvalue and spread of random Fourier kernel matrices",
            ExperimentId::RffScaling => "random-feature estimator error against the number of sampled features",
            ExperimentId::QnormSimple => "coefficient extraction vs FFT, weight-norm scaling of ternary and Golomb encodings, Haar moments",
            ExperimentId::QnormReuploading => "weight norm of the two-layer model and the variance/Parseval link",
            ExperimentId::Separation => "sup distance between interpolants against their weight-norm gap",
            ExperimentId::Dlp => "discrete-log model: feature expansion, corner variance, sampling obstruction",
            ExperimentId::PerfectFn => "bounded random Fourier functions with large norm and variance",
            ExperimentId::AdvantageDemo => "fit a large-norm quantum target with minimum-norm and random-feature regression",
        }
    }

    pub fn default_params(self) -> Params {
        match self {
            ExperimentId::MnlsGd => Params::MnlsGd(Default::default()),
            ExperimentId::KernelEig => Params::KernelEig(Default::default()),
            ExperimentId::RffScaling => Params::RffScaling(Default::default()),
            ExperimentId::QnormSimple => Params::QnormSimple(Default::default()),
            ExperimentId::QnormReuploading => Params::QnormReuploading(Default::default()),
            ExperimentId::Separation => Params::Separation(Default::default()),
            ExperimentId::Dlp => Params::Dlp(Default::default()),
            ExperimentId::PerfectFn => Params::PerfectFn(Default::default()),
            ExperimentId::AdvantageDemo => Params::AdvantageDemo(Default::default()),
        }
    }

    /// JSON schema of this experiment's `params` object.
    pub fn params_schema(self) -> Schema {
        let gen = schemars::generate::SchemaSettings::draft2020_12()
            .with(|s| s.inline_subschemas = true)
            .into_generator();
        match self {
            ExperimentId::MnlsGd => gen.into_root_schema_for::<MnlsGdParams>(),
            ExperimentId::KernelEig => gen.into_root_schema_for::<KernelEigParams>(),
            ExperimentId::RffScaling => gen.into_root_schema_for::<RffScalingParams>(),
            ExperimentId::QnormSimple => gen.into_root_schema_for::<QnormSimpleParams>(),
            ExperimentId::QnormReuploading => gen.into_root_schema_for::<QnormReuploadingParams>(),
            ExperimentId::Separation => gen.into_root_schema_for::<SeparationParams>(),
            ExperimentId::Dlp => gen.into_root_schema_for::<DlpParams>(),
            ExperimentId::PerfectFn => gen.into_root_schema_for::<PerfectFnParams>(),
            ExperimentId::AdvantageDemo => gen.into_root_schema_for::<AdvantageDemoParams>(),
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Gradient descent against the minimum-norm solution, and exact recovery in
/// the underparameterized regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct MnlsGdParams {
    /// Random overparameterized instances (input dimension, p and M drawn per instance).
    pub instances: usize,
    /// Largest input dimension, 1..=3.
    pub max_dim: usize,
    /// Largest number of real features p (odd values are used: constant plus pairs).
    pub max_features: usize,
    /// Largest number of training points M.
    pub max_points: usize,
    /// Gradient descent stops once ||Phi beta - y|| is below this.
    pub residual_tol: f64,
    /// Pass threshold on ||beta_GD - beta_MNLS|| / ||beta_MNLS||.
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Planted-weight instances with p <= M.
    pub recovery_instances: usize,
    /// Pass threshold on max |beta - beta*|.
    pub recovery_tol: f64,
    /// Wall-time budget for the descent instances, seconds.
    pub max_seconds: f64,
}

impl Default for MnlsGdParams {
    fn default() -> Self {
        Self {
            instances: 20,
            max_dim: 3,
            max_features: 200,
            max_points: 50,
            residual_tol: 1e-10,
            rel_tol: 1e-6,
            max_iters: 1_000_000,
            recovery_instances: 20,
            recovery_tol: 1e-8,
            max_seconds: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct KernelEigParams {
    pub dim: usize,
    /// Number of positive frequencies; p = 2 * frequencies (+1 with a constant).
    pub frequencies: usize,
    pub include_constant: bool,
    /// Kernel size M.
    pub points: usize,
    pub trials: usize,
    /// Pass threshold on the fraction of trials with lambda_min > 1/2.
    pub min_fraction: f64,
    /// Pass threshold on |mean s^2 - E s^2| in standard errors.
    pub max_z: f64,
    pub max_seconds: f64,
}

impl Default for KernelEigParams {
    fn default() -> Self {
        Self {
            dim: 2,
            frequencies: 500,
            include_constant: false,
            points: 8,
            trials: 200,
            min_fraction: 0.95,
            max_z: 4.0,
            max_seconds: 60.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// q_i proportional to |beta_i|.
    Weights,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct RffScalingParams {
    pub dim: usize,
    /// Positive frequencies of the target; a constant feature is included.
    pub frequencies: usize,
    /// Numbers of sampled features D.
    pub draws: Vec<usize>,
    pub trials: usize,
    /// Monte Carlo points per L2 distance estimate.
    pub mc_points: usize,
    pub sampling: Sampling,
    pub slope_min: f64,
    pub slope_max: f64,
    /// Pass threshold on the fraction of trials exceeding the bound at any D.
    pub max_violation_rate: f64,
    pub max_seconds: f64,
}

impl Default for RffScalingParams {
    fn default() -> Self {
        Self {
            dim: 2,
            frequencies: 100,
            draws: vec![16, 32, 64, 128, 256, 512, 1024],
            trials: 100,
            mc_points: 2000,
            sampling: Sampling::Weights,
            slope_min: -0.6,
            slope_max: -0.4,
            max_violation_rate: 0.05,
            max_seconds: 120.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct QnormSimpleParams {
    /// Qubit counts for the ternary scaling fit.
    pub ternary_qubits: Vec<u32>,
    /// Ruler sizes N (powers of two) for the Golomb scaling fit.
    pub golomb_marks: Vec<usize>,
    /// Qubit counts for the mean/variance moment check.
    pub moment_qubits: Vec<u32>,
    /// Haar draws per configuration.
    pub trials: usize,
    /// Instances per encoding family in the FFT comparison.
    pub fft_instances: usize,
    pub fft_max_qubits: u32,
    pub fft_tol: f64,
    /// Relative tolerance on fitted exponents.
    pub slope_rel_tol: f64,
    pub mean_max_z: f64,
    /// Allowed factor between sample variance and the variance predictor.
    pub variance_factor: f64,
    /// Wall-time budget for the ternary scaling run, seconds.
    pub max_seconds: f64,
}

impl Default for QnormSimpleParams {
    fn default() -> Self {
        Self {
            ternary_qubits: (2..=7).collect(),
            golomb_marks: vec![4, 8, 16, 32],
            moment_qubits: vec![3, 4],
            trials: 500,
            fft_instances: 20,
            fft_max_qubits: 5,
            fft_tol: 1e-9,
            slope_rel_tol: 0.15,
            mean_max_z: 3.0,
            variance_factor: 32.0,
            max_seconds: 300.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct QnormReuploadingParams {
    /// Qubits of the ternary encoding.
    pub qubits: u32,
    pub trials: usize,
    pub max_z: f64,
    /// Random instances in the variance/Parseval comparison.
    pub link_instances: usize,
    pub link_mc_points: usize,
    pub link_max_z: f64,
}

impl Default for QnormReuploadingParams {
    fn default() -> Self {
        Self {
            qubits: 3,
            trials: 2000,
            max_z: 3.0,
            link_instances: 10,
            link_mc_points: 20_000,
            link_max_z: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct SeparationParams {
    pub dim: usize,
    /// Positive frequencies; a constant feature is included.
    pub frequencies: usize,
    pub points: usize,
    pub pairs: usize,
    /// Grid points per axis for the sup search.
    pub grid: usize,
    /// Standard deviation of the null-space perturbation before projection.
    pub perturbation_scale: f64,
    pub tol: f64,
}

impl Default for SeparationParams {
    fn default() -> Self {
        Self {
            dim: 2,
            frequencies: 30,
            points: 12,
            pairs: 20,
            grid: 64,
            perturbation_scale: 1.0,
            tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct DlpParams {
    /// Qubit counts n with 2^n + 1 prime.
    pub qubits: Vec<u32>,
    /// Measured bit of the discrete logarithm.
    pub bit: u32,
    /// Random points in the expansion check.
    pub points: usize,
    pub tol: f64,
    /// Monte Carlo points for the continuous-input variance.
    pub mc_points: usize,
}

impl Default for DlpParams {
    fn default() -> Self {
        Self {
            qubits: vec![2, 4],
            bit: 0,
            points: 100,
            tol: 1e-10,
            mc_points: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct PerfectFnParams {
    pub dim: usize,
    /// Frequency box [-L, L]^d.
    pub max_frequency: i64,
    /// Positive frequencies; p = 2 * frequencies real coefficients.
    pub frequencies: usize,
    /// Prefactor c in sigma = c / (d (ln d + ln L)).
    pub sigma_constant: f64,
    pub delta: f64,
    pub trials: usize,
    pub mc_points: usize,
    pub restarts: usize,
    pub ascent_steps: usize,
    pub min_property_rate: f64,
    pub min_joint_rate: f64,
    pub var_max_z: f64,
}

impl Default for PerfectFnParams {
    fn default() -> Self {
        Self {
            dim: 2,
            max_frequency: 8,
            frequencies: 32,
            sigma_constant: dequant_core::perfect::DEFAULT_SIGMA_CONSTANT,
            delta: 0.01,
            trials: 100,
            mc_points: 10_000,
            restarts: 32,
            ascent_steps: 100,
            min_property_rate: 0.95,
            min_joint_rate: 0.90,
            var_max_z: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct AdvantageDemoParams {
    /// Qubits of the ternary-encoded target.
    pub qubits: u32,
    /// Training-set size for the pass/fail row.
    pub points: usize,
    /// Training-set sizes for the regime table.
    pub points_sweep: Vec<usize>,
    /// Sampled features D for the random-feature refit.
    pub draws: usize,
    pub ridge: f64,
    /// Required ratio of generalization error to training error for MNLS.
    pub gap_factor: f64,
}

impl Default for AdvantageDemoParams {
    fn default() -> Self {
        Self {
            qubits: 5,
            points: 40,
            points_sweep: vec![10, 20, 40, 80, 120],
            draws: 256,
            ridge: 1e-8,
            gap_factor: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    MnlsGd(MnlsGdParams),
    KernelEig(KernelEigParams),
    RffScaling(RffScalingParams),
    QnormSimple(QnormSimpleParams),
    QnormReuploading(QnormReuploadingParams),
    Separation(SeparationParams),
    Dlp(DlpParams),
    PerfectFn(PerfectFnParams),
    AdvantageDemo(AdvantageDemoParams),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentId,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output_dir: Option<PathBuf>,
    #[serde(default)]
    params: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub params: Params,
}

fn field<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, String> {
    serde_json::from_value(v).map_err(|e| format!("params: {e}"))
}

fn check(ok: bool, name: &str, rule: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("params.{name}: must be {rule}"))
    }
}

fn is_prob(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

fn is_pos(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

impl Params {
    fn parse(id: ExperimentId, v: Option<Value>) -> Result<Params, String> {
        let v = v.unwrap_or_else(|| json!({}));
        if !v.is_object() {
            return Err("params: must be an object".into());
        }
        Ok(match id {
            ExperimentId::MnlsGd => Params::MnlsGd(field(v)?),
            ExperimentId::KernelEig => Params::KernelEig(field(v)?),
            ExperimentId::RffScaling => Params::RffScaling(field(v)?),
            ExperimentId::QnormSimple => Params::QnormSimple(field(v)?),
            ExperimentId::QnormReuploading => Params::QnormReuploading(field(v)?),
            ExperimentId::Separation => Params::Separation(field(v)?),
            ExperimentId::Dlp => Params::Dlp(field(v)?),
            ExperimentId::PerfectFn => Params::PerfectFn(field(v)?),
            ExperimentId::AdvantageDemo => Params::AdvantageDemo(field(v)?),
        })
    }

    /// Range checks beyond what the types enforce.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Params::MnlsGd(p) => {
                check(p.instances >= 1, "instances", ">= 1")?;
                check((1..=3).contains(&p.max_dim), "max_dim", "in 1..=3")?;
                check(p.max_points >= 2, "max_points", ">= 2")?;
                check(
                    p.max_features > 2 * p.max_points,
                    "max_features",
                    ">= 2 * max_points + 1 so every instance is overparameterized",
                )?;
                check(p.max_features <= 2001, "max_features", "<= 2001")?;
                check(is_pos(p.residual_tol), "residual_tol", "> 0")?;
                check(is_pos(p.rel_tol), "rel_tol", "> 0")?;
                check(p.max_iters >= 1, "max_iters", ">= 1")?;
                check(is_pos(p.recovery_tol), "recovery_tol", "> 0")?;
                check(is_pos(p.max_seconds), "max_seconds", "> 0")
            }
            Params::KernelEig(p) => {
                check((1..=3).contains(&p.dim), "dim", "in 1..=3")?;
                check(p.frequencies >= 1, "frequencies", ">= 1")?;
                check(p.points >= 1, "points", ">= 1")?;
                check(p.trials >= 2, "trials", ">= 2")?;
                check(is_prob(p.min_fraction), "min_fraction", "in [0, 1]")?;
                check(is_pos(p.max_z), "max_z", "> 0")?;
                check(is_pos(p.max_seconds), "max_seconds", "> 0")
            }
            Params::RffScaling(p) => {
                check((1..=3).contains(&p.dim), "dim", "in 1..=3")?;
                check(p.frequencies >= 1, "frequencies", ">= 1")?;
                check(p.draws.len() >= 2, "draws", "a list of at least two values")?;
                check(p.draws.iter().all(|&d| d >= 1), "draws", "positive")?;
                check(p.trials >= 2, "trials", ">= 2")?;
                check(p.mc_points >= 2, "mc_points", ">= 2")?;
                check(p.slope_min <= p.slope_max, "slope_min", "<= slope_max")?;
                check(is_prob(p.max_violation_rate), "max_violation_rate", "in [0, 1]")?;
                check(is_pos(p.max_seconds), "max_seconds", "> 0")
            }
            Params::QnormSimple(p) => {
                check(p.ternary_qubits.len() >= 2, "ternary_qubits", "a list of at least two values")?;
                check(p.ternary_qubits.iter().all(|n| (1..=8).contains(n)), "ternary_qubits", "in 1..=8")?;
                check(p.golomb_marks.len() >= 2, "golomb_marks", "a list of at least two values")?;
                check(
                    p.golomb_marks.iter().all(|&m| m.is_power_of_two() && (2..=64).contains(&m)),
                    "golomb_marks",
                    "powers of two in 2..=64",
                )?;
                check(p.moment_qubits.iter().all(|n| (2..=8).contains(n)), "moment_qubits", "in 2..=8")?;
                check(p.trials >= 2, "trials", ">= 2")?;
                check(p.fft_instances >= 1, "fft_instances", ">= 1")?;
                check((1..=6).contains(&p.fft_max_qubits), "fft_max_qubits", "in 1..=6")?;
                check(is_pos(p.fft_tol), "fft_tol", "> 0")?;
                check(is_pos(p.slope_rel_tol), "slope_rel_tol", "> 0")?;
                check(is_pos(p.mean_max_z), "mean_max_z", "> 0")?;
                check(p.variance_factor >= 1.0, "variance_factor", ">= 1")?;
                check(is_pos(p.max_seconds), "max_seconds", "> 0")
            }
            Params::QnormReuploading(p) => {
                check((1..=8).contains(&p.qubits), "qubits", "in 1..=8")?;
                check(p.trials >= 2, "trials", ">= 2")?;
                check(is_pos(p.max_z), "max_z", "> 0")?;
                check(p.link_instances >= 1, "link_instances", ">= 1")?;
                check(p.link_mc_points >= 2, "link_mc_points", ">= 2")?;
                check(is_pos(p.link_max_z), "link_max_z", "> 0")
            }
            Params::Separation(p) => {
                check((1..=3).contains(&p.dim), "dim", "in 1..=3")?;
                check(p.points >= 1, "points", ">= 1")?;
                check(2 * p.frequencies + 1 > p.points, "frequencies", "large enough that p > points")?;
                check(p.pairs >= 1, "pairs", ">= 1")?;
                check(p.grid >= 2, "grid", ">= 2")?;
                check(p.perturbation_scale >= 0.0, "perturbation_scale", ">= 0")?;
                check(p.tol >= 0.0, "tol", ">= 0")
            }
            Params::Dlp(p) => {
                check(!p.qubits.is_empty(), "qubits", "non-empty")?;
                check(
                    p.qubits.iter().all(|n| [1, 2, 4, 8].contains(n)),
                    "qubits",
                    "values with 2^n + 1 prime and n <= 8 (1, 2, 4, 8)",
                )?;
                check(p.qubits.iter().all(|&n| p.bit < n), "bit", "below every qubit count")?;
                check(p.points >= 1, "points", ">= 1")?;
                check(p.tol >= 0.0, "tol", ">= 0")?;
                check(p.mc_points >= 2, "mc_points", ">= 2")
            }
            Params::PerfectFn(p) => {
                check((2..=4).contains(&p.dim), "dim", "in 2..=4")?;
                check(p.max_frequency >= 1, "max_frequency", ">= 1")?;
                check(p.frequencies >= 1, "frequencies", ">= 1")?;
                check(p.sigma_constant >= 0.0, "sigma_constant", ">= 0")?;
                check(p.delta > 0.0 && p.delta < 1.0, "delta", "in (0, 1)")?;
                check(p.trials >= 1, "trials", ">= 1")?;
                check(p.mc_points >= 10_000, "mc_points", ">= 10000")?;
                check(p.restarts >= 32, "restarts", ">= 32")?;
                check(p.ascent_steps >= 1, "ascent_steps", ">= 1")?;
                check(is_prob(p.min_property_rate), "min_property_rate", "in [0, 1]")?;
                check(is_prob(p.min_joint_rate), "min_joint_rate", "in [0, 1]")?;
                check(is_pos(p.var_max_z), "var_max_z", "> 0")
            }
            Params::AdvantageDemo(p) => {
                check((1..=7).contains(&p.qubits), "qubits", "in 1..=7")?;
                let features = 3usize.pow(p.qubits);
                check(p.points >= 1 && p.points < features, "points", "in 1..3^qubits")?;
                check(
                    p.points_sweep.iter().all(|&m| m >= 1 && m < features),
                    "points_sweep",
                    "values in 1..3^qubits",
                )?;
                check(p.draws >= 1, "draws", ">= 1")?;
                check(p.ridge >= 0.0, "ridge", ">= 0")?;
                check(p.gap_factor >= 0.0, "gap_factor", ">= 0")
            }
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId, seed: u64) -> Self {
        Self {
            experiment,
            seed,
            output_dir: None,
            params: experiment.default_params(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))?;
        let params = Params::parse(raw.experiment, raw.params).map_err(LabError::Config)?;
        params.validate().map_err(LabError::Config)?;
        Ok(Self {
            experiment: raw.experiment,
            seed: raw.seed,
            output_dir: raw.output_dir,
            params,
        })
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// JSON schema of a whole config file, one branch per experiment.
pub fn config_schema() -> Value {
    let branches: Vec<Value> = ExperimentId::ALL
        .iter()
        .map(|&id| {
            let mut params = serde_json::to_value(id.params_schema()).expect("schema serializes");
            if let Some(obj) = params.as_object_mut() {
                obj.remove("$schema");
            }
            json!({
                "type": "object",
                "properties": {
                    "experiment": { "const": id.as_str() },
                    "seed": { "type": "integer", "minimum": 0 },
                    "output_dir": { "type": "string" },
                    "params": params,
                },
                "required": ["experiment"],
                "additionalProperties": false,
            })
        })
        .collect();
    json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "dequant-lab experiment config",
        "oneOf": branches,
    })
}
