//! Classical features to quantum states.
//!
//! Two schemes are supported. Qubit encoding maps each feature in `[0, 1]` to
//! `√(1−x)|0⟩ + √x|1⟩` and tensors the factors together (dimension `2ⁿ`).
//! Direct encoding treats non-negative channel amplitudes as the state itself
//! after L2 normalization (dimension `n`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{tensor_all, StateVector, MAX_DIM};

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Minus,
    Plus,
}

impl Label {
    pub fn value(self) -> i8 {
        match self {
            Label::Minus => -1,
            Label::Plus => 1,
        }
    }

    pub fn from_value(v: f64) -> Option<Label> {
        if v == -1.0 {
            Some(Label::Minus)
        } else if v == 1.0 {
            Some(Label::Plus)
        } else {
            None
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Minus => Label::Plus,
            Label::Plus => Label::Minus,
        }
    }

    pub fn sign_char(self) -> char {
        match self {
            Label::Minus => '-',
            Label::Plus => '+',
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// Raw features with an optional training label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub features: Vec<f64>,
    pub label: Option<Label>,
}

impl FeatureVector {
    pub fn new(features: Vec<f64>) -> Self {
        FeatureVector { features, label: None }
    }

    pub fn labeled(features: Vec<f64>, label: Label) -> Self {
        FeatureVector {
            features,
            label: Some(label),
        }
    }

    pub fn arity(&self) -> usize {
        self.features.len()
    }

    fn check_non_empty(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::InvalidInput("feature vector is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingScheme {
    /// One qubit per feature, amplitudes `√(1−x), √x`.
    Qubit,
    /// L2-normalized non-negative channel amplitudes.
    Direct,
}

impl EncodingScheme {
    /// State dimension produced for `arity` features.
    pub fn dim(self, arity: usize) -> Option<usize> {
        match self {
            EncodingScheme::Qubit => u32::try_from(arity).ok().and_then(|n| 1usize.checked_shl(n)),
            EncodingScheme::Direct => Some(arity),
        }
    }

    pub fn encode(self, fv: &FeatureVector) -> Result<StateVector> {
        match self {
            EncodingScheme::Qubit => encode_qubit(fv),
            EncodingScheme::Direct => encode_direct(fv),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EncodingScheme::Qubit => "qubit",
            EncodingScheme::Direct => "direct",
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubit" => Ok(EncodingScheme::Qubit),
            "direct" => Ok(EncodingScheme::Direct),
            other => Err(Error::InvalidInput(format!("unknown encoding '{other}' (expected qubit or direct)"))),
        }
    }
}

pub fn encode_qubit(fv: &FeatureVector) -> Result<StateVector> {
    fv.check_non_empty()?;
    for (index, &value) in fv.features.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Range {
                index,
                value,
                expected: "[0, 1]",
            });
        }
    }
    match EncodingScheme::Qubit.dim(fv.arity()) {
        Some(d) if d <= MAX_DIM => {}
        _ => {
            return Err(Error::InvalidInput(format!(
                "{} features exceed the qubit-encoding limit of {} qubits",
                fv.arity(),
                MAX_DIM.trailing_zeros()
            )))
        }
    }
    let qubits: Vec<StateVector> = fv
        .features
        .iter()
        .map(|&x| StateVector::from_real(&[(1.0 - x).sqrt(), x.sqrt()]))
        .collect::<Result<_>>()?;
    Ok(tensor_all(&qubits).expect("non-empty"))
}

/// Strict direct encoding: every channel must be non-negative.
pub fn encode_direct(fv: &FeatureVector) -> Result<StateVector> {
    fv.check_non_empty()?;
    for (index, &value) in fv.features.iter().enumerate() {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::Range {
                index,
                value,
                expected: "[0, inf)",
            });
        }
    }
    direct_unchecked(fv)
}

/// Direct encoding that also accepts negative channel values.
pub fn encode_direct_signed(fv: &FeatureVector) -> Result<StateVector> {
    fv.check_non_empty()?;
    for (index, &value) in fv.features.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::Range {
                index,
                value,
                expected: "finite values",
            });
        }
    }
    direct_unchecked(fv)
}

fn direct_unchecked(fv: &FeatureVector) -> Result<StateVector> {
    if fv.features.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("all channels are zero".into()));
    }
    // Pre-scale by the largest magnitude so tiny or huge inputs do not under/overflow.
    let peak = fv.features.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    StateVector::normalized(fv.features.iter().map(|&v| Complex64::new(v / peak, 0.0)).collect())
}
