//! JSON run configuration: system source, tolerances, sampling and output
//! options. Unknown keys are rejected and schema errors carry the path to
//! the offending field.

use anyhow::{bail, Context};
use nalgebra::{DVector, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use pencilhyp_core::models::{self, MaxwellConfig, Metric4};
use pencilhyp_core::pencil::SecondOrderSystem;
use pencilhyp_core::{RMat, SampleScheme, Tolerances};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSource,
    #[serde(default)]
    pub tolerances: TolerancesConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)] // parsed once per run, never stored in bulk
pub enum SystemSource {
    AlmostWave {
        a: f64,
        b: f64,
    },
    Wave {
        spatial_dim: usize,
    },
    DirectionalWave,
    RepeatedOperator {
        /// One square matrix per spatial dimension, row-major rows.
        bmats: Vec<Vec<Vec<f64>>>,
    },
    Maxwell {
        g: MetricSpec,
        ghat: MetricSpec,
        gtilde: MetricSpec,
        /// Foliation covector; defaults to (1, 0, 0, 0).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<[f64; 4]>,
    },
    Inline {
        d: usize,
        #[serde(rename = "N")]
        n_components: usize,
        /// coeffs[a][b] is the N x N matrix multiplying d_a d_b, rows outer.
        coeffs: Vec<Vec<Vec<Vec<f64>>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sym: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antisym: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesConfig {
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_cluster_tol")]
    pub cluster_tol: f64,
    #[serde(default = "default_imag_tol")]
    pub imag_tol: f64,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_cond_cap")]
    pub cond_cap: f64,
}

fn default_rank_tol() -> f64 {
    Tolerances::default().rank_tol
}
fn default_cluster_tol() -> f64 {
    Tolerances::default().cluster_tol
}
fn default_imag_tol() -> f64 {
    Tolerances::default().imag_tol
}
fn default_residual_tol() -> f64 {
    Tolerances::default().residual_tol
}
fn default_cond_cap() -> f64 {
    Tolerances::default().cond_cap
}

impl Default for TolerancesConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        Self {
            rank_tol: t.rank_tol,
            cluster_tol: t.cluster_tol,
            imag_tol: t.imag_tol,
            residual_tol: t.residual_tol,
            cond_cap: t.cond_cap,
        }
    }
}

impl TolerancesConfig {
    pub fn to_tolerances(self) -> Tolerances {
        Tolerances {
            rank_tol: self.rank_tol,
            cluster_tol: self.cluster_tol,
            imag_tol: self.imag_tol,
            residual_tol: self.residual_tol,
            cond_cap: self.cond_cap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Explicit directions override the sampling scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub refine_check: bool,
}

fn default_count() -> usize {
    64
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            count: default_count(),
            scheme: SchemeConfig::Auto,
            seed: None,
            directions: None,
            refine_check: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SchemeConfig {
    #[default]
    Auto,
    UniformAngles,
    Fibonacci,
    Random,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_verbosity")]
    pub verbosity: u8,
}

fn default_verbosity() -> u8 {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            verbosity: default_verbosity(),
        }
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> anyhow::Result<RunConfig> {
    let deserializer = &mut serde_json::Deserializer::from_str(text);
    let config: RunConfig = serde_path_to_error::deserialize(deserializer)
        .map_err(|e| anyhow::anyhow!("schema error at `{}`: {}", e.path(), e.inner()))?;
    if config.sampling.count == 0 {
        bail!("schema error at `sampling.count`: count must be positive");
    }
    config
        .tolerances
        .to_tolerances()
        .validate()
        .map_err(|e| anyhow::anyhow!("schema error at `tolerances`: {e}"))?;
    Ok(config)
}

fn matrix4_from_rows(rows: &[Vec<f64>], what: &str) -> anyhow::Result<Matrix4<f64>> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        bail!("{what} must be a 4x4 matrix");
    }
    Ok(Matrix4::from_fn(|i, j| rows[i][j]))
}

impl MetricSpec {
    pub fn to_metric(&self, what: &str) -> anyhow::Result<Metric4> {
        let sym = match (&self.diag, &self.sym) {
            (Some(d), None) => Matrix4::from_diagonal(&Vector4::new(d[0], d[1], d[2], d[3])),
            (None, Some(rows)) => matrix4_from_rows(rows, what)?,
            _ => bail!("{what}: give exactly one of `diag` or `sym`"),
        };
        let antisym = match &self.antisym {
            Some(rows) => matrix4_from_rows(rows, &format!("{what}.antisym"))?,
            None => Matrix4::zeros(),
        };
        Metric4::new(sym, antisym).with_context(|| format!("invalid {what}"))
    }
}

impl SystemSource {
    /// Instantiate the second-order system described by the config.
    pub fn build(&self) -> anyhow::Result<SecondOrderSystem> {
        match self {
            SystemSource::AlmostWave { a, b } => Ok(models::almost_wave(*a, *b)),
            SystemSource::Wave { spatial_dim } => {
                if *spatial_dim == 0 {
                    bail!("wave model needs at least one spatial dimension");
                }
                Ok(models::wave(*spatial_dim))
            }
            SystemSource::DirectionalWave => Ok(models::directional_wave()),
            SystemSource::RepeatedOperator { bmats } => {
                let mats: Vec<RMat> = bmats
                    .iter()
                    .enumerate()
                    .map(|(i, rows)| {
                        let n = rows.len();
                        if n == 0 || rows.iter().any(|r| r.len() != n) {
                            bail!("bmats[{i}] must be a square matrix");
                        }
                        Ok(RMat::from_fn(n, n, |r, c| rows[r][c]))
                    })
                    .collect::<anyhow::Result<_>>()?;
                models::repeated_operator(&mats).context("invalid repeated-operator model")
            }
            SystemSource::Maxwell { g, ghat, gtilde, n } => {
                let cfg = self.maxwell_config()?;
                let _ = (g, ghat, gtilde, n);
                models::maxwell_system(&cfg).context("invalid electromagnetic configuration")
            }
            SystemSource::Inline {
                d,
                n_components,
                coeffs,
                n,
            } => {
                let d = *d;
                let nc = *n_components;
                if coeffs.len() != d || coeffs.iter().any(|row| row.len() != d) {
                    bail!("coeffs must be a {d} x {d} array of matrices");
                }
                let mut flat = Vec::with_capacity(d * d);
                for (a, row) in coeffs.iter().enumerate() {
                    for (b, block) in row.iter().enumerate() {
                        if block.len() != nc || block.iter().any(|r| r.len() != nc) {
                            bail!("coeffs[{a}][{b}] must be {nc} x {nc}");
                        }
                        flat.push(RMat::from_fn(nc, nc, |r, c| block[r][c]));
                    }
                }
                let ncov = match n {
                    Some(v) => {
                        if v.len() != d {
                            bail!("n must have {d} components");
                        }
                        DVector::from_vec(v.clone())
                    }
                    None => {
                        let mut e0 = DVector::zeros(d);
                        e0[0] = 1.0;
                        e0
                    }
                };
                SecondOrderSystem::new(d, nc, flat, ncov).context("invalid inline system")
            }
        }
    }

    /// The electromagnetic configuration, when this source is one.
    pub fn maxwell_config(&self) -> anyhow::Result<MaxwellConfig> {
        match self {
            SystemSource::Maxwell { g, ghat, gtilde, n } => {
                let n = n
                    .map(|v| Vector4::new(v[0], v[1], v[2], v[3]))
                    .unwrap_or_else(|| Vector4::new(1.0, 0.0, 0.0, 0.0));
                MaxwellConfig::new(
                    g.to_metric("g")?,
                    ghat.to_metric("ghat")?,
                    gtilde.to_metric("gtilde")?,
                    n,
                )
                .context("invalid electromagnetic configuration")
            }
            _ => bail!("this command needs a maxwell system source"),
        }
    }
}

impl SamplingConfig {
    pub fn scheme(&self) -> SampleScheme {
        match self.scheme {
            SchemeConfig::Auto => SampleScheme::Auto,
            SchemeConfig::UniformAngles => SampleScheme::UniformAngles,
            SchemeConfig::Fibonacci => SampleScheme::Fibonacci,
            SchemeConfig::Random => SampleScheme::Random {
                seed: self.seed.unwrap_or(0),
            },
        }
    }
}
