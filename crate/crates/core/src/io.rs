//! CSV ingestion and versioned JSON model files.
//!
//! CSV dialect: comma separator, dot decimal, mandatory header row, no quoting.
//! Model files store every matrix entry as an `[re, im]` pair of JSON numbers;
//! numbers are written in shortest round-trip form, so loading reproduces
//! each `f64` bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::baseline::LinearWeights;
use crate::encoding::{EncodingScheme, FeatureVector, Label};
use crate::ensemble::EnsembleModel;
use crate::error::{Error, Result};
use crate::linops::{NumericPolicy, Operator};
use crate::perceptron::{NormalizationMode, PerceptronModel, RegimeReport};

pub const MODEL_VERSION: u32 = 1;

/// A parsed numeric CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Table> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header_line) = lines.next().ok_or_else(|| Error::Data("empty CSV: header row required".into()))?;
        let header: Vec<String> = header_line.split(',').map(|h| h.trim().to_string()).collect();
        if let Some(h) = header.iter().find(|h| h.is_empty()) {
            return Err(Error::Data(format!("empty column name in header {h:?}")));
        }
        let mut rows = Vec::new();
        for (row_no, (_, line)) in lines.enumerate() {
            let row_no = row_no + 1;
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != header.len() {
                return Err(Error::Data(format!(
                    "row {row_no} has {} fields, header has {}",
                    cells.len(),
                    header.len()
                )));
            }
            let mut values = Vec::with_capacity(cells.len());
            for (cell, column) in cells.iter().zip(&header) {
                let v: f64 = cell
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::Data(format!("row {row_no}, column {column}: '{cell}' is not a number")))?;
                values.push(v);
            }
            rows.push(values);
        }
        Ok(Table { header, rows })
    }

    pub fn read(path: &Path) -> Result<Table> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        Table::parse(&text)
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Feature vectors from every column not listed in `exclude`, labeled from `label_column` if given.
    pub fn feature_vectors(&self, label_column: Option<&str>, exclude: &[&str]) -> Result<Vec<FeatureVector>> {
        let label_idx = match label_column {
            Some(name) => Some(
                self.column(name)
                    .ok_or_else(|| Error::Data(format!("label column '{name}' not found in header")))?,
            ),
            None => None,
        };
        let feature_idx: Vec<usize> = (0..self.header.len())
            .filter(|&i| Some(i) != label_idx && !exclude.contains(&self.header[i].as_str()))
            .collect();
        if feature_idx.is_empty() {
            return Err(Error::Data("no feature columns".into()));
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let features = feature_idx.iter().map(|&i| row[i]).collect();
                let label = match label_idx {
                    Some(i) => Some(Label::from_value(row[i]).ok_or_else(|| {
                        Error::Data(format!(
                            "row {}, column {}: label {} is not -1 or +1",
                            r + 1,
                            self.header[i],
                            row[i]
                        ))
                    })?),
                    None => None,
                };
                Ok(FeatureVector { features, label })
            })
            .collect()
    }
}

/// Reads feature vectors in file order; feature order follows the header minus the label column.
pub fn ingest_csv(path: &Path, label_column: Option<&str>) -> Result<Vec<FeatureVector>> {
    Table::read(path)?.feature_vectors(label_column, &[])
}

/// Renders labeled or unlabeled vectors in the same CSV dialect.
pub fn write_csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn feature_csv(data: &[FeatureVector], label_column: &str) -> String {
    let arity = data.first().map_or(0, FeatureVector::arity);
    let mut header: Vec<String> = (0..arity).map(|i| format!("ch{i}")).collect();
    let labeled = data.iter().any(|fv| fv.label.is_some());
    if labeled {
        header.push(label_column.to_string());
    }
    let rows: Vec<Vec<f64>> = data
        .iter()
        .map(|fv| {
            let mut row = fv.features.clone();
            if labeled {
                row.push(fv.label.map_or(0.0, |l| f64::from(l.value())));
            }
            row
        })
        .collect();
    write_csv(&header, &rows)
}

type Matrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSet {
    pub p_minus: Matrix,
    pub p_plus: Matrix,
    pub p_zero: Matrix,
}

/// On-disk form of a [`PerceptronModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub encoding: String,
    pub norm_mode: String,
    pub dim: usize,
    pub operators: OperatorSet,
    pub epsilon_policy: NumericPolicy,
    pub regime: RegimeReport,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

fn matrix_of(op: &Operator) -> Matrix {
    op.rows().map(|row| row.iter().map(|c| [c.re, c.im]).collect()).collect()
}

fn operator_of(name: &str, m: &Matrix, dim: usize, eps_herm: f64) -> Result<Operator> {
    if m.len() != dim || m.iter().any(|row| row.len() != dim) {
        return Err(Error::Load(format!("{name} is not a {dim}x{dim} matrix")));
    }
    let entries = m.iter().flatten().map(|&[re, im]| Complex64::new(re, im)).collect();
    Operator::from_entries(dim, entries, eps_herm).map_err(|e| Error::Load(format!("{name}: {e}")))
}

impl ModelFile {
    pub fn from_model(model: &PerceptronModel, metadata: BTreeMap<String, String>) -> Self {
        ModelFile {
            version: MODEL_VERSION,
            encoding: model.encoding().to_string(),
            norm_mode: model.norm_mode().to_string(),
            dim: model.dim(),
            operators: OperatorSet {
                p_minus: matrix_of(model.p_minus()),
                p_plus: matrix_of(model.p_plus()),
                p_zero: matrix_of(model.p_zero()),
            },
            epsilon_policy: *model.policy(),
            regime: *model.regime(),
            metadata,
        }
    }

    /// Rebuilds the model, re-validating Hermiticity, the residual identity and the stored regime.
    pub fn into_model(self) -> Result<PerceptronModel> {
        if self.version != MODEL_VERSION {
            return Err(Error::Load(format!("unsupported model version {}", self.version)));
        }
        let load = |e: Error| Error::Load(e.to_string());
        let encoding: EncodingScheme = self.encoding.parse().map_err(load)?;
        let norm_mode: NormalizationMode = self.norm_mode.parse().map_err(load)?;
        let policy = self.epsilon_policy;
        policy.validate().map_err(load)?;
        if self.dim == 0 {
            return Err(Error::Load("dimension 0".into()));
        }
        let ops = &self.operators;
        let p_minus = operator_of("p_minus", &ops.p_minus, self.dim, policy.eps_herm)?;
        let p_plus = operator_of("p_plus", &ops.p_plus, self.dim, policy.eps_herm)?;
        let p_zero = operator_of("p_zero", &ops.p_zero, self.dim, policy.eps_herm)?;
        let model = PerceptronModel::from_parts(p_minus, p_plus, p_zero, encoding, norm_mode, policy).map_err(load)?;
        if model.regime().case != self.regime.case || model.regime().physical != self.regime.physical {
            return Err(Error::Load(format!(
                "stored regime (case {}, physical {}) disagrees with operators (case {}, physical {})",
                self.regime.case,
                self.regime.physical,
                model.regime().case,
                model.regime().physical
            )));
        }
        Ok(model)
    }
}

pub fn save_model(path: &Path, model: &PerceptronModel, metadata: BTreeMap<String, String>) -> Result<()> {
    let json = serde_json::to_string_pretty(&ModelFile::from_model(model, metadata))?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<PerceptronModel> {
    read_json::<ModelFile>(path)?.into_model()
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Load(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Load(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub version: u32,
    pub kind: String,
    pub dof_names: Vec<String>,
    pub references: Vec<f64>,
    pub perceptrons: Vec<ModelFile>,
}

pub fn save_ensemble(path: &Path, model: &EnsembleModel) -> Result<()> {
    let file = EnsembleFile {
        version: MODEL_VERSION,
        kind: "ensemble".into(),
        dof_names: model.dof_names().to_vec(),
        references: model.references().to_vec(),
        perceptrons: model
            .perceptrons()
            .iter()
            .map(|p| ModelFile::from_model(p, BTreeMap::new()))
            .collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(())
}

pub fn load_ensemble(path: &Path) -> Result<EnsembleModel> {
    let file: EnsembleFile = read_json(path)?;
    if file.version != MODEL_VERSION || file.kind != "ensemble" {
        return Err(Error::Load(format!("not a version {MODEL_VERSION} ensemble file")));
    }
    let perceptrons = file
        .perceptrons
        .into_iter()
        .map(ModelFile::into_model)
        .collect::<Result<Vec<_>>>()?;
    EnsembleModel::from_parts(perceptrons, file.dof_names, file.references).map_err(|e| Error::Load(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineFile {
    pub version: u32,
    pub kind: String,
    pub converged: bool,
    pub weights: LinearWeights,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

pub fn save_baseline(path: &Path, file: &BaselineFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(file)? + "\n")?;
    Ok(())
}

pub fn load_baseline(path: &Path) -> Result<BaselineFile> {
    let file: BaselineFile = read_json(path)?;
    if file.version != MODEL_VERSION || file.kind != "baseline" {
        return Err(Error::Load(format!("not a version {MODEL_VERSION} baseline file")));
    }
    if file.weights.bias && file.weights.weights.is_empty() {
        return Err(Error::Load("bias flag set but no weights stored".into()));
    }
    Ok(file)
}
