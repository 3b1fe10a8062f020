//! Projector-sum learner.
//!
//! Training encodes every labeled sample, sums `|x⟩⟨x|` per class, applies a
//! [`NormalizationMode`], and defines the completion operator as the residual
//! `P₀ = I − P₋₁ − P₊₁`. Classification compares the three expectation values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoding::{EncodingScheme, FeatureVector, Label};
use crate::error::{Error, Result};
use crate::linops::{eig_extrema, expectation, NumericPolicy, Operator, StateVector, MAX_DIM};

/// How the per-class projector sums are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationMode {
    /// Mean of the class projectors (trace 1).
    Count,
    /// Count means, then both divided by `λ_max(P₋₁ + P₊₁)`; keeps `P₀` positive semidefinite.
    #[default]
    Rescale,
    /// Raw projector sums.
    Unit,
}

impl NormalizationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::Count => "count",
            NormalizationMode::Rescale => "rescale",
            NormalizationMode::Unit => "unit",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(NormalizationMode::Count),
            "rescale" => Ok(NormalizationMode::Rescale),
            "unit" => Ok(NormalizationMode::Unit),
            other => Err(Error::InvalidInput(format!(
                "unknown normalization '{other}' (expected count, rescale or unit)"
            ))),
        }
    }
}

/// Three-way measurement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Minus,
    Plus,
    /// The completion operator `P₀`: an input unlike either trained class.
    Zero,
}

impl Outcome {
    /// Fixed order used for tie-breaking and sampling.
    pub const ALL: [Outcome; 3] = [Outcome::Minus, Outcome::Plus, Outcome::Zero];

    pub fn value(self) -> i8 {
        match self {
            Outcome::Minus => -1,
            Outcome::Plus => 1,
            Outcome::Zero => 0,
        }
    }

    pub fn label(self) -> Option<Label> {
        match self {
            Outcome::Minus => Some(Label::Minus),
            Outcome::Plus => Some(Label::Plus),
            Outcome::Zero => None,
        }
    }
}

impl From<Label> for Outcome {
    fn from(l: Label) -> Self {
        match l {
            Label::Minus => Outcome::Minus,
            Label::Plus => Outcome::Plus,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Zero => f.write_str("0"),
            other => write!(f, "{:+}", other.value()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// Orthogonal and complete.
    A,
    /// Orthogonal, incomplete.
    B,
    /// Overlapping, complete.
    C,
    /// Overlapping, incomplete.
    D,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::A => "A",
            Case::B => "B",
            Case::C => "C",
            Case::D => "D",
        };
        f.write_str(s)
    }
}

/// Which of the four operator relationships a trained pair falls into, with evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub case: Case,
    /// `‖P₋₁ P₊₁‖_F`
    pub orthogonality_defect: f64,
    /// `‖P₋₁ + P₊₁ − I‖_F`
    pub completeness_defect: f64,
    pub p_zero_min_eig: f64,
    pub physical: bool,
}

impl RegimeReport {
    pub fn compute(p_minus: &Operator, p_plus: &Operator, p_zero: &Operator, policy: &NumericPolicy) -> Result<Self> {
        let orthogonality_defect = p_minus.product_frobenius_norm(p_plus)?;
        let completeness_defect = p_minus
            .add(p_plus)?
            .sub(&Operator::identity(p_minus.dim()))?
            .frobenius_norm();
        let (p_zero_min_eig, _) = eig_extrema(p_zero)?;
        let orthogonal = orthogonality_defect <= policy.eps_zero;
        let complete = completeness_defect <= policy.eps_zero;
        let case = match (orthogonal, complete) {
            (true, true) => Case::A,
            (true, false) => Case::B,
            (false, true) => Case::C,
            (false, false) => Case::D,
        };
        Ok(RegimeReport {
            case,
            orthogonality_defect,
            completeness_defect,
            p_zero_min_eig,
            physical: p_zero_min_eig >= -policy.eps_eig,
        })
    }
}

/// The three expectation values for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub minus: f64,
    pub plus: f64,
    pub zero: f64,
}

impl Expectations {
    pub fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Minus => self.minus,
            Outcome::Plus => self.plus,
            Outcome::Zero => self.zero,
        }
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Expectations {
        Expectations {
            minus: f(self.minus),
            plus: f(self.plus),
            zero: f(self.zero),
        }
    }

    /// Largest value; ties go to the earlier outcome in [`Outcome::ALL`].
    pub fn argmax(&self) -> Outcome {
        let mut best = Outcome::Minus;
        for o in [Outcome::Plus, Outcome::Zero] {
            if self.get(o) > self.get(best) {
                best = o;
            }
        }
        best
    }

    /// Argmax restricted to the two trained classes.
    pub fn argmax_trained(&self) -> Label {
        if self.plus > self.minus {
            Label::Plus
        } else {
            Label::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifyMode {
    Argmax,
    Probabilistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub label: Outcome,
    pub expectations: Expectations,
    pub mode: ClassifyMode,
}

/// A trained POVM triple together with its encoding configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronModel {
    p_minus: Operator,
    p_plus: Operator,
    p_zero: Operator,
    encoding: EncodingScheme,
    norm_mode: NormalizationMode,
    policy: NumericPolicy,
    regime: RegimeReport,
}

impl PerceptronModel {
    /// Assembles a model from the two class operators; `P₀` is the residual.
    pub fn from_class_operators(
        p_minus: Operator,
        p_plus: Operator,
        encoding: EncodingScheme,
        norm_mode: NormalizationMode,
        policy: NumericPolicy,
    ) -> Result<Self> {
        let p_zero = Operator::identity(p_minus.dim()).sub(&p_minus)?.sub(&p_plus)?;
        Self::from_parts(p_minus, p_plus, p_zero, encoding, norm_mode, policy)
    }

    /// Assembles a model from all three operators, checking the residual identity.
    pub fn from_parts(
        p_minus: Operator,
        p_plus: Operator,
        p_zero: Operator,
        encoding: EncodingScheme,
        norm_mode: NormalizationMode,
        policy: NumericPolicy,
    ) -> Result<Self> {
        policy.validate()?;
        let sum = p_minus.add(&p_plus)?.add(&p_zero)?;
        let residual = sum.max_abs_diff(&Operator::identity(p_minus.dim()))?;
        if !(residual <= policy.eps_herm) {
            return Err(Error::NumericIntegrity(format!(
                "P-1 + P+1 + P0 differs from identity by {residual:e}"
            )));
        }
        let regime = RegimeReport::compute(&p_minus, &p_plus, &p_zero, &policy)?;
        Ok(PerceptronModel {
            p_minus,
            p_plus,
            p_zero,
            encoding,
            norm_mode,
            policy,
            regime,
        })
    }

    pub fn p_minus(&self) -> &Operator {
        &self.p_minus
    }

    pub fn p_plus(&self) -> &Operator {
        &self.p_plus
    }

    pub fn p_zero(&self) -> &Operator {
        &self.p_zero
    }

    pub fn operator(&self, outcome: Outcome) -> &Operator {
        match outcome {
            Outcome::Minus => &self.p_minus,
            Outcome::Plus => &self.p_plus,
            Outcome::Zero => &self.p_zero,
        }
    }

    pub fn encoding(&self) -> EncodingScheme {
        self.encoding
    }

    pub fn norm_mode(&self) -> NormalizationMode {
        self.norm_mode
    }

    pub fn policy(&self) -> &NumericPolicy {
        &self.policy
    }

    pub fn dim(&self) -> usize {
        self.p_minus.dim()
    }

    pub fn regime(&self) -> &RegimeReport {
        &self.regime
    }

    /// Raw `⟨ψ|P_d|ψ⟩` for all three outcomes.
    pub fn expectations(&self, state: &StateVector) -> Result<Expectations> {
        Ok(Expectations {
            minus: expectation(&self.p_minus, state)?,
            plus: expectation(&self.p_plus, state)?,
            zero: expectation(&self.p_zero, state)?,
        })
    }

    pub fn encode(&self, fv: &FeatureVector) -> Result<StateVector> {
        let state = self.encoding.encode(fv)?;
        if state.dim() != self.dim() {
            return Err(Error::Data(format!(
                "{} features encode to dimension {}, model has dimension {}",
                fv.arity(),
                state.dim(),
                self.dim()
            )));
        }
        Ok(state)
    }
}

/// Trains with the default numeric policy.
pub fn train(data: &[FeatureVector], encoding: EncodingScheme, norm_mode: NormalizationMode) -> Result<PerceptronModel> {
    train_with_policy(data, encoding, norm_mode, NumericPolicy::default())
}

pub fn train_with_policy(
    data: &[FeatureVector],
    encoding: EncodingScheme,
    norm_mode: NormalizationMode,
    policy: NumericPolicy,
) -> Result<PerceptronModel> {
    let first = data
        .first()
        .ok_or_else(|| Error::Training("no training data".into()))?;
    let arity = first.arity();
    let dim = encoding
        .dim(arity)
        .filter(|&d| (1..=MAX_DIM).contains(&d))
        .ok_or_else(|| Error::Data(format!("{arity} features with {encoding} encoding exceed dimension {MAX_DIM}")))?;

    let mut sums = [Operator::zeros(dim), Operator::zeros(dim)];
    let mut counts = [0usize; 2];
    for (row, fv) in data.iter().enumerate() {
        if fv.arity() != arity {
            return Err(Error::Data(format!(
                "sample {row} has {} features, expected {arity}",
                fv.arity()
            )));
        }
        let label = fv
            .label
            .ok_or_else(|| Error::Data(format!("sample {row} has no label")))?;
        let state = encoding.encode(fv)?;
        let slot = class_slot(label);
        sums[slot].add_projector(&state)?;
        counts[slot] += 1;
    }
    for label in [Label::Minus, Label::Plus] {
        if counts[class_slot(label)] == 0 {
            return Err(Error::Training(format!("no samples labeled {label}")));
        }
    }

    let [sum_minus, sum_plus] = sums;
    let (p_minus, p_plus) = match norm_mode {
        NormalizationMode::Unit => (sum_minus, sum_plus),
        NormalizationMode::Count => (
            sum_minus.scale(1.0 / counts[0] as f64),
            sum_plus.scale(1.0 / counts[1] as f64),
        ),
        NormalizationMode::Rescale => {
            let mean_minus = sum_minus.scale(1.0 / counts[0] as f64);
            let mean_plus = sum_plus.scale(1.0 / counts[1] as f64);
            let (_, lambda_max) = eig_extrema(&mean_minus.add(&mean_plus)?)?;
            if !(lambda_max > 0.0) {
                return Err(Error::NumericIntegrity(format!(
                    "class operators have non-positive spectral radius {lambda_max}"
                )));
            }
            (mean_minus.scale(1.0 / lambda_max), mean_plus.scale(1.0 / lambda_max))
        }
    };
    PerceptronModel::from_class_operators(p_minus, p_plus, encoding, norm_mode, policy)
}

fn class_slot(label: Label) -> usize {
    match label {
        Label::Minus => 0,
        Label::Plus => 1,
    }
}

/// Returns the stored regime report.
pub fn regime(model: &PerceptronModel) -> &RegimeReport {
    model.regime()
}

/// Deterministic classification by the largest expectation value.
///
/// Values within `eps_zero` of zero are reported as exact zeros. Ties resolve
/// in the order −1, +1, 0.
pub fn classify(model: &PerceptronModel, state: &StateVector) -> Result<ClassificationResult> {
    let eps = model.policy.eps_zero;
    let expectations = model
        .expectations(state)?
        .map(|e| if e.abs() <= eps { 0.0 } else { e });
    Ok(ClassificationResult {
        label: expectations.argmax(),
        expectations,
        mode: ClassifyMode::Argmax,
    })
}

pub fn classify_feature(model: &PerceptronModel, fv: &FeatureVector) -> Result<ClassificationResult> {
    classify(model, &model.encode(fv)?)
}
