//! Rosenblatt's perceptron with the error-correcting update `a ← a + (d − o)·x`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::encoding::{FeatureVector, Label};
use crate::error::{Error, Result};
use crate::sampling::RandomSource;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearWeights {
    /// One weight per feature, then the bias weight when `bias` is set.
    pub weights: Vec<f64>,
    pub bias: bool,
    pub update_count: u64,
}

impl LinearWeights {
    pub fn new(weights: Vec<f64>, bias: bool) -> Self {
        LinearWeights {
            weights,
            bias,
            update_count: 0,
        }
    }

    /// Number of raw features the weights accept.
    pub fn arity(&self) -> usize {
        self.weights.len() - usize::from(self.bias)
    }

    fn check_arity(&self, fv: &FeatureVector) -> Result<()> {
        if fv.arity() != self.arity() {
            return Err(Error::InvalidInput(format!(
                "weights expect {} features, got {}",
                self.arity(),
                fv.arity()
            )));
        }
        Ok(())
    }

    fn activation(&self, features: &[f64]) -> f64 {
        let dot: f64 = self.weights.iter().zip(features).map(|(a, x)| a * x).sum();
        if self.bias {
            dot + self.weights[self.weights.len() - 1]
        } else {
            dot
        }
    }

    /// One training step on a single datum. Returns whether the weights changed.
    pub fn step(&mut self, fv: &FeatureVector, desired: Label) -> Result<bool> {
        self.check_arity(fv)?;
        let output = sign(self.activation(&fv.features));
        if output == desired {
            return Ok(false);
        }
        let factor = f64::from(desired.value() - output.value());
        let n = fv.arity();
        for (a, x) in self.weights[..n].iter_mut().zip(&fv.features) {
            *a += factor * x;
        }
        if self.bias {
            self.weights[n] += factor;
        }
        self.update_count += 1;
        Ok(true)
    }
}

/// Heaviside sign with zero mapped to −1.
fn sign(y: f64) -> Label {
    if y > 0.0 {
        Label::Plus
    } else {
        Label::Minus
    }
}

pub fn predict_classical(w: &LinearWeights, fv: &FeatureVector) -> Result<Label> {
    w.check_arity(fv)?;
    Ok(sign(w.activation(&fv.features)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalOptions {
    pub max_updates: u64,
    /// Append an always-one input with its own weight.
    pub bias: bool,
    /// Reshuffle the visiting order every epoch.
    pub shuffle: bool,
}

impl Default for ClassicalOptions {
    fn default() -> Self {
        ClassicalOptions {
            max_updates: 10_000,
            bias: false,
            shuffle: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalOutcome {
    /// A full pass over the data made no mistake.
    Converged(LinearWeights),
    /// The update budget ran out; carries the last weights.
    NonConvergence(LinearWeights),
}

impl ClassicalOutcome {
    pub fn weights(&self) -> &LinearWeights {
        match self {
            ClassicalOutcome::Converged(w) | ClassicalOutcome::NonConvergence(w) => w,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self, ClassicalOutcome::Converged(_))
    }
}

pub fn train_classical(
    data: &[FeatureVector],
    options: ClassicalOptions,
    rng: &mut RandomSource,
) -> Result<ClassicalOutcome> {
    let first = data
        .first()
        .ok_or_else(|| Error::Training("no training data".into()))?;
    let arity = first.arity();
    let mut labels = Vec::with_capacity(data.len());
    for (row, fv) in data.iter().enumerate() {
        if fv.arity() != arity {
            return Err(Error::Data(format!("sample {row} has {} features, expected {arity}", fv.arity())));
        }
        labels.push(fv.label.ok_or_else(|| Error::Data(format!("sample {row} has no label")))?);
    }
    if options.max_updates == 0 {
        return Err(Error::InvalidInput("max_updates must be positive".into()));
    }

    let n_weights = arity + usize::from(options.bias);
    let init = (0..n_weights).map(|_| 2.0 * rng.uniform() - 1.0).collect();
    let mut w = LinearWeights::new(init, options.bias);
    let mut order: Vec<usize> = (0..data.len()).collect();
    loop {
        if options.shuffle {
            order.shuffle(rng);
        }
        let mut mistakes = 0usize;
        for &i in &order {
            if predict_classical(&w, &data[i])? == labels[i] {
                continue;
            }
            if w.update_count >= options.max_updates {
                return Ok(ClassicalOutcome::NonConvergence(w));
            }
            w.step(&data[i], labels[i])?;
            mistakes += 1;
        }
        if mistakes == 0 {
            return Ok(ClassicalOutcome::Converged(w));
        }
    }
}
