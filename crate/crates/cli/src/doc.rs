//! Problem documents: JSON trees with a task name, optional settings and a
//! task-specific payload. Complex numbers are `[re, im]` pairs, jets are
//! lists of `[multi-index, [re, im]]` terms and matrices are row-major.

use std::fmt;

use clap::ValueEnum;
use regfman::fman::{product_model, standard_block, standard_model, FManifoldModel};
use regfman::jets::{Jet, JetMatrix, JetVector};
use regfman::linalg::{CMat, CVec};
use regfman::regend::JordanSpectrum;
use regfman::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    VerifyFmanifold,
    StandardModel,
    VerifyFrobenius,
    Symmetries,
    SaitoCheck,
    BirkhoffFlatness,
    MalgrangeChart,
    ExtendMetric,
    GermIso,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

/// Anything wrong with the input, located by a path into the document.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl InputError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> InputError {
        InputError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

pub type Input<T> = std::result::Result<T, InputError>;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub task: Task,
    #[serde(default)]
    pub settings: DocSettings,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocSettings {
    pub order: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    /// Square-root branch anchors, one per block of a metric.
    pub anchors: Option<Vec<[f64; 2]>>,
}

/// Settings after merging flags, document and environment.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub order: usize,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<[f64; 2]>>,
}

impl Settings {
    pub fn anchors(&self) -> Option<Vec<Complex64>> {
        self.anchors
            .as_ref()
            .map(|a| a.iter().map(|z| Complex64::new(z[0], z[1])).collect())
    }
}

pub fn parse_document(text: &str) -> Input<Document> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(de)
        .map_err(|e| InputError::new(e.path().to_string(), e.inner().to_string()))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(InputError::new(
            "schema",
            format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                doc.schema
            ),
        ));
    }
    Ok(doc)
}

pub fn parse_payload<T: DeserializeOwned>(v: &Value) -> Input<T> {
    serde_path_to_error::deserialize(v.clone()).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            "payload".to_string()
        } else {
            format!("payload.{inner}")
        };
        InputError::new(path, e.inner().to_string())
    })
}

pub type RawComplex = [f64; 2];
pub type RawJet = Vec<(Vec<usize>, RawComplex)>;
pub type RawMatrix = Vec<Vec<RawComplex>>;
pub type RawJetMatrix = Vec<Vec<RawJet>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBlock {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    pub size: usize,
}

/// A model given by its Jordan spectrum (preferred) or explicitly.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub spectrum: Option<Vec<RawBlock>>,
    /// `structure[i][j]` lists the components of `∂_i ∘ ∂_j`.
    pub structure: Option<Vec<Vec<Vec<RawJet>>>>,
    pub unit: Option<Vec<RawJet>>,
    pub euler: Option<Vec<RawJet>>,
}

pub fn complex(z: &RawComplex) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn jet(raw: &RawJet, num_vars: usize, order: usize, path: &str) -> Input<Jet> {
    for (t, (idx, _)) in raw.iter().enumerate() {
        if idx.len() != num_vars {
            return Err(InputError::new(
                format!("{path}[{t}][0]"),
                format!(
                    "multi-index has {} entries; the jet has {num_vars} variables",
                    idx.len()
                ),
            ));
        }
    }
    Jet::from_terms(num_vars, order, raw.iter().map(|(e, c)| (e, complex(c))))
        .map_err(|e| InputError::new(path, e.to_string()))
}

pub fn jet_vector(raw: &[RawJet], num_vars: usize, order: usize, path: &str) -> Input<JetVector> {
    let comps = raw
        .iter()
        .enumerate()
        .map(|(i, j)| jet(j, num_vars, order, &format!("{path}[{i}]")))
        .collect::<Input<Vec<_>>>()?;
    if comps.is_empty() {
        return Err(InputError::new(path, "empty vector"));
    }
    JetVector::new(comps).map_err(|e| InputError::new(path, e.to_string()))
}

pub fn jet_matrix(
    raw: &RawJetMatrix,
    num_vars: usize,
    order: usize,
    path: &str,
) -> Input<JetMatrix> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(InputError::new(path, "empty matrix"));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(InputError::new(
                format!("{path}[{i}]"),
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
        for (j, e) in row.iter().enumerate() {
            entries.push(jet(e, num_vars, order, &format!("{path}[{i}][{j}]"))?);
        }
    }
    JetMatrix::new(rows, cols, entries).map_err(|e| InputError::new(path, e.to_string()))
}

pub fn matrix(raw: &RawMatrix, path: &str) -> Input<CMat> {
    let rows = raw.len();
    let cols = raw.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(InputError::new(path, "empty matrix"));
    }
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(InputError::new(
                format!("{path}[{i}]"),
                format!("row has {} entries, expected {cols}", row.len()),
            ));
        }
    }
    Ok(CMat::from_fn(rows, cols, |i, j| complex(&raw[i][j])))
}

pub fn square(raw: &RawMatrix, n: Option<usize>, path: &str) -> Input<CMat> {
    let m = matrix(raw, path)?;
    if !m.is_square() || n.is_some_and(|n| m.nrows() != n) {
        let want = n.map_or("square".to_string(), |n| format!("{n}x{n}"));
        return Err(InputError::new(
            path,
            format!("matrix is {}x{}, expected {want}", m.nrows(), m.ncols()),
        ));
    }
    Ok(m)
}

pub fn vector(raw: &[RawComplex]) -> CVec {
    CVec::from_iterator(raw.len(), raw.iter().map(complex))
}

pub fn spectrum(raw: &[RawBlock], path: &str) -> Input<JordanSpectrum> {
    for (i, b) in raw.iter().enumerate() {
        if b.size == 0 {
            return Err(InputError::new(
                format!("{path}[{i}].size"),
                "block size must be positive",
            ));
        }
    }
    JordanSpectrum::new(raw.iter().map(|b| (Complex64::new(b.re, b.im), b.size)))
        .map_err(|e| InputError::new(path, e.to_string()))
}

pub fn model(raw: &RawModel, order: usize, path: &str) -> Input<FManifoldModel> {
    match raw {
        RawModel {
            spectrum: Some(s),
            structure: None,
            unit: None,
            euler: None,
        } => standard_model(&spectrum(s, &format!("{path}.spectrum"))?, order)
            .map_err(|e| InputError::new(path, e.to_string())),
        RawModel {
            spectrum: None,
            structure: Some(st),
            unit: Some(u),
            euler: Some(e),
        } => {
            let n = u.len();
            let unit = jet_vector(u, n, order, &format!("{path}.unit"))?;
            let euler = jet_vector(e, n, order, &format!("{path}.euler"))?;
            if st.len() != n {
                return Err(InputError::new(
                    format!("{path}.structure"),
                    format!("{} rows for a {n}-dimensional model", st.len()),
                ));
            }
            let mut mult = Vec::with_capacity(n);
            for (i, row) in st.iter().enumerate() {
                if row.len() != n {
                    return Err(InputError::new(
                        format!("{path}.structure[{i}]"),
                        format!("{} entries for a {n}-dimensional model", row.len()),
                    ));
                }
                let r = row
                    .iter()
                    .enumerate()
                    .map(|(j, v)| jet_vector(v, n, order, &format!("{path}.structure[{i}][{j}]")))
                    .collect::<Input<Vec<_>>>()?;
                mult.push(r);
            }
            FManifoldModel::new(mult, unit, euler).map_err(|e| InputError::new(path, e.to_string()))
        }
        _ => Err(InputError::new(
            path,
            "give either `spectrum` or all of `structure`, `unit` and `euler`",
        )),
    }
}

/// Product of standard blocks in the given order (not re-sorted), so that
/// block `α` of a metric lines up with block `α` of the model.
pub fn block_product(
    eigenvalues: &[Complex64],
    sizes: &[usize],
    order: usize,
) -> Input<FManifoldModel> {
    let factors: Vec<FManifoldModel> = eigenvalues
        .iter()
        .zip(sizes)
        .map(|(a, &m)| standard_block(*a, m, order))
        .collect();
    product_model(&factors).map_err(|e| InputError::new("payload", e.to_string()))
}

pub fn raw_complex(z: Complex64) -> RawComplex {
    [z.re, z.im]
}

/// Serializes a jet as its non-zero terms.
pub fn raw_jet(j: &Jet) -> RawJet {
    j.terms().map(|(e, c)| (e, raw_complex(c))).collect()
}

pub fn raw_jet_vector(v: &JetVector) -> Vec<RawJet> {
    v.iter().map(raw_jet).collect()
}

pub fn raw_matrix(m: &CMat) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| raw_complex(m[(i, j)])).collect())
        .collect()
}

pub fn raw_jet_matrix(m: &JetMatrix) -> RawJetMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| raw_jet(m.get(i, j))).collect())
        .collect()
}

pub fn raw_spectrum(s: &JordanSpectrum) -> Vec<RawBlock> {
    s.blocks
        .iter()
        .map(|b| RawBlock {
            re: b.eigenvalue.re,
            im: b.eigenvalue.im,
            size: b.size,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_terms_round_trip() {
        let raw: RawJet = vec![(vec![0, 0], [1.0, 0.0]), (vec![1, 2], [0.0, -2.5])];
        let j = jet(&raw, 2, 4, "x").unwrap();
        assert_eq!(raw_jet(&j), raw);
    }

    #[test]
    fn terms_above_the_order_are_dropped() {
        let raw: RawJet = vec![(vec![3], [1.0, 0.0]), (vec![1], [2.0, 0.0])];
        let j = jet(&raw, 1, 2, "x").unwrap();
        assert_eq!(raw_jet(&j), vec![(vec![1], [2.0, 0.0])]);
    }

    #[test]
    fn ragged_matrix_is_located() {
        let raw: RawMatrix = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[1.0, 0.0]]];
        let e = matrix(&raw, "payload.b").unwrap_err();
        assert_eq!(e.path, "payload.b[1]");
    }

    #[test]
    fn schema_version_is_checked() {
        let e = parse_document(r#"{"schema": 2, "task": "symmetries"}"#).unwrap_err();
        assert_eq!(e.path, "schema");
        let d = parse_document(r#"{"task": "germ-iso"}"#).unwrap();
        assert_eq!(d.task, Task::GermIso);
        assert_eq!(d.task.to_string(), "germ-iso");
    }

    #[test]
    fn model_needs_one_description() {
        let raw = RawModel {
            spectrum: Some(vec![RawBlock {
                re: 0.0,
                im: 0.0,
                size: 2,
            }]),
            structure: None,
            unit: Some(Vec::new()),
            euler: None,
        };
        assert!(model(&raw, 3, "payload.model").is_err());
    }

    #[test]
    fn zero_block_is_rejected() {
        let e = spectrum(
            &[RawBlock {
                re: 0.0,
                im: 0.0,
                size: 0,
            }],
            "payload.spectrum",
        )
        .unwrap_err();
        assert_eq!(e.path, "payload.spectrum[0].size");
    }
}
