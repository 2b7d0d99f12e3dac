//! The JSON input and output documents.
//!
//! Matrices are row-major, either flat (`[a, b, c, d]`) or nested
//! (`[[a, b], [c, d]]`). Output numbers carry 17 significant digits so every
//! `f64` round-trips exactly.

use std::fmt;
use std::str::FromStr;

use mlk_core::quadrature::Scheme;
use mlk_core::siegel::validate_period_matrix;
use mlk_core::PeriodMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixInput {
    Flat(Vec<f64>),
    Nested(Vec<Vec<f64>>),
}

// Goes through `Value`: untagged enums lose floats under `arbitrary_precision`.
impl<'de> Deserialize<'de> for MatrixInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        use serde_json::Value;
        let num = |v: &Value| v.as_f64().ok_or_else(|| D::Error::custom("matrix entries must be numbers"));
        let Value::Array(items) = Value::deserialize(d)? else {
            return Err(D::Error::custom("a matrix must be an array"));
        };
        if items.iter().all(Value::is_array) && !items.is_empty() {
            items
                .iter()
                .map(|row| row.as_array().expect("checked").iter().map(num).collect())
                .collect::<Result<_, _>>()
                .map(MatrixInput::Nested)
        } else {
            items.iter().map(num).collect::<Result<_, _>>().map(MatrixInput::Flat)
        }
    }
}

impl MatrixInput {
    /// Row-major entries of a `g × g` matrix.
    fn entries(&self, g: usize) -> Option<Vec<f64>> {
        match self {
            MatrixInput::Flat(v) => (v.len() == g * g).then(|| v.clone()),
            MatrixInput::Nested(rows) => {
                (rows.len() == g && rows.iter().all(|r| r.len() == g)).then(|| rows.concat())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingInput {
    pub re: MatrixInput,
    pub im: MatrixInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    TensorGauss,
    QmcShifted,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub epsilon: Option<f64>,
    /// Gauss nodes per axis, or QMC points per shift (rounded up to a power of two).
    pub budget: Option<u64>,
    pub scheme: Option<SchemeName>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub g: usize,
    pub degree: Option<usize>,
    pub embeddings: Vec<EmbeddingInput>,
    #[serde(default)]
    pub options: Options,
}

/// A parsed input with validated period matrices.
#[derive(Debug, Clone)]
pub struct Input {
    pub g: usize,
    pub degree: usize,
    pub periods: Vec<PeriodMatrix>,
    pub options: Options,
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

impl InputDocument {
    /// Parses strictly; structural problems are parse errors (exit 2).
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: InputDocument = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if doc.g == 0 {
            return Err(CliError::Parse("g must be at least 1".into()));
        }
        if doc.embeddings.is_empty() {
            return Err(CliError::Parse("embeddings list is empty".into()));
        }
        if doc.degree == Some(0) {
            return Err(CliError::Parse("degree must be at least 1".into()));
        }
        if let Some(eps) = doc.options.epsilon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(CliError::Parse("options.epsilon must lie in (0, 1)".into()));
            }
        }
        if doc.options.budget == Some(0) {
            return Err(CliError::Parse("options.budget must be positive".into()));
        }
        for (i, e) in doc.embeddings.iter().enumerate() {
            for (name, m) in [("re", &e.re), ("im", &e.im)] {
                if m.entries(doc.g).is_none() {
                    return Err(CliError::Parse(format!(
                        "embedding {i}: {name} is not a {g}x{g} matrix",
                        g = doc.g
                    )));
                }
            }
        }
        Ok(doc)
    }

    /// Builds the period matrices; mathematical problems exit with code 3.
    pub fn validate(self, digest: String) -> Result<Input, CliError> {
        let g = self.g;
        let periods = self
            .embeddings
            .iter()
            .enumerate()
            .map(|(index, e)| {
                let re = e.re.entries(g).expect("checked by parse");
                let im = e.im.entries(g).expect("checked by parse");
                validate_period_matrix(g, &re, &im).map_err(|source| CliError::Embedding { index, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Input {
            g,
            degree: self.degree.unwrap_or(periods.len()),
            periods,
            options: self.options,
            digest,
        })
    }
}

impl Input {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        InputDocument::parse(text)?.validate(digest(text.as_bytes()))
    }

    pub fn from_path(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_text(&text)
    }
}

/// Quadrature rules derived from the options: Gauss where it applies and was
/// not overridden, shifted QMC otherwise.
pub fn scheme_for(opts: &Options, d: usize, seed: u64) -> Scheme {
    let qmc = |budget: Option<u64>| {
        let log2 = budget.map_or(16, |b| b.next_power_of_two().trailing_zeros().min(30));
        Scheme::QmcShifted {
            log2_points: log2,
            shifts: 8,
            seed,
        }
    };
    match opts.scheme {
        Some(SchemeName::QmcShifted) => qmc(opts.budget),
        Some(SchemeName::TensorGauss) if d <= 2 => Scheme::TensorGauss {
            nodes: opts.budget.map_or(256, |b| (b as usize).clamp(2, 256) & !1),
        },
        Some(SchemeName::TensorGauss) => qmc(opts.budget),
        None if d <= 2 => Scheme::tensor_default(),
        None => qmc(opts.budget),
    }
}

/// An `f64` written with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl fmt::Display for Sig17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let n = serde_json::Number::from_str(&self.to_string()).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sig17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        // `str::parse` rounds correctly; the number's text is kept verbatim.
        match Option::<serde_json::Number>::deserialize(d)? {
            None => Ok(Sig17(f64::NAN)),
            Some(n) => n.to_string().parse().map(Sig17).map_err(serde::de::Error::custom),
        }
    }
}

impl From<f64> for Sig17 {
    fn from(v: f64) -> Self {
        Sig17(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermOut {
    pub index: usize,
    pub rho: Sig17,
    pub rho_clamped: Sig17,
    pub term: Sig17,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundOut {
    pub kappa: Sig17,
    pub epsilon: Sig17,
    pub thm11_total: Sig17,
    pub cor14_total: Sig17,
    pub clamped: usize,
    pub per_embedding: Vec<TermOut>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoOut {
    pub index: usize,
    pub rho: Sig17,
    pub rho_clamped: Sig17,
    pub lambda: Sig17,
    pub lemma32_ok: bool,
    pub reduced: bool,
    pub rho_after_reduce: Sig17,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOut {
    pub suite: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<usize>,
    pub lhs: Sig17,
    pub rhs: Sig17,
    pub slack: Sig17,
    pub tolerance: Sig17,
    pub pass: bool,
}

impl CheckOut {
    /// A check of `lhs ≥ rhs`: slack is `lhs − rhs`.
    pub fn at_least(suite: &str, name: &str, embedding: Option<usize>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::with_slack(suite, name, embedding, lhs, rhs, lhs - rhs, tolerance)
    }

    /// An identity check: slack is `−|lhs − rhs|`.
    pub fn equal(suite: &str, name: &str, embedding: Option<usize>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::with_slack(suite, name, embedding, lhs, rhs, -(lhs - rhs).abs(), tolerance)
    }

    pub fn with_slack(
        suite: &str,
        name: &str,
        embedding: Option<usize>,
        lhs: f64,
        rhs: f64,
        slack: f64,
        tolerance: f64,
    ) -> Self {
        let finite = lhs.is_finite() && rhs.is_finite() && slack.is_finite();
        CheckOut {
            suite: suite.into(),
            name: name.into(),
            embedding,
            lhs: lhs.into(),
            rhs: rhs.into(),
            slack: slack.into(),
            tolerance: tolerance.into(),
            pass: finite && slack >= -tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub checks: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDocument {
    pub tool: Tool,
    pub command: String,
    pub input_digest: String,
    pub g: usize,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundOut>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rho: Vec<RhoOut>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckOut>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
}

impl OutputDocument {
    pub fn new(command: &str, input_digest: String, g: usize, degree: usize) -> Self {
        OutputDocument {
            tool: Tool::default(),
            command: command.into(),
            input_digest,
            g,
            degree,
            bound: None,
            rho: Vec::new(),
            checks: Vec::new(),
            summary: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("output document serializes")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn finish_checks(&mut self) {
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        self.summary = Some(Summary {
            checks: self.checks.len(),
            failed,
            pass: failed == 0,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
