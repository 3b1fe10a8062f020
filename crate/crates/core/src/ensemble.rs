//! One perceptron per degree of freedom (DOF), trained only on single-DOF
//! activations, that together recognize two-DOF superpositions never seen in
//! training.
//!
//! Each perceptron uses direct encoding. At inference every DOF reports its
//! winning class and expectation; a DOF counts as active when that
//! expectation reaches `fraction × reference`, where the reference is the
//! mean self-expectation of the DOF's own training samples.

use std::collections::BTreeSet;

use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::encoding::{EncodingScheme, FeatureVector, Label};
use crate::error::{Error, Result};
use crate::perceptron::{train, NormalizationMode, PerceptronModel};
use crate::sampling::RandomSource;

/// Default activation fraction.
///
/// A two-DOF superposition of equal strength yields about half the
/// reference expectation on each DOF, so the default sits below one half.
pub const DEFAULT_ACTIVATION_FRACTION: f64 = 0.375;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassCapacity {
    pub originals: u64,
    pub superpositions: u64,
}

/// Classes `n` perceptrons can tell apart: `2n` trained ones and
/// `(2n)!/(2·(2n−2)!) − n` two-class superpositions across different DOFs.
pub fn class_capacity(n: u64) -> Result<ClassCapacity> {
    if n == 0 {
        return Err(Error::InvalidInput("class capacity needs n >= 1".into()));
    }
    let overflow = || Error::InvalidInput(format!("class capacity overflows for n = {n}"));
    let originals = n.checked_mul(2).ok_or_else(overflow)?;
    // (2n)! / (2 (2n-2)!) = n (2n - 1)
    let pairs = n.checked_mul(originals - 1).ok_or_else(overflow)?;
    Ok(ClassCapacity {
        originals,
        superpositions: pairs - n,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    perceptrons: Vec<PerceptronModel>,
    dof_names: Vec<String>,
    references: Vec<f64>,
}

impl EnsembleModel {
    pub fn from_parts(perceptrons: Vec<PerceptronModel>, dof_names: Vec<String>, references: Vec<f64>) -> Result<Self> {
        let first = perceptrons
            .first()
            .ok_or_else(|| Error::InvalidInput("ensemble needs at least one perceptron".into()))?;
        if dof_names.len() != perceptrons.len() || references.len() != perceptrons.len() {
            return Err(Error::InvalidInput("ensemble names/references do not match perceptron count".into()));
        }
        for (dof, p) in perceptrons.iter().enumerate() {
            if p.encoding() != EncodingScheme::Direct || p.dim() != first.dim() {
                return Err(Error::InvalidInput(format!(
                    "dof {dof}: perceptrons must share direct encoding of dimension {}",
                    first.dim()
                )));
            }
        }
        if let Some(r) = references.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidInput(format!("reference expectation {r} must be positive")));
        }
        Ok(EnsembleModel {
            perceptrons,
            dof_names,
            references,
        })
    }

    pub fn perceptrons(&self) -> &[PerceptronModel] {
        &self.perceptrons
    }

    pub fn dof_names(&self) -> &[String] {
        &self.dof_names
    }

    /// Mean winning expectation of each DOF's training samples on their own label.
    pub fn references(&self) -> &[f64] {
        &self.references
    }

    pub fn channels(&self) -> usize {
        self.perceptrons[0].dim()
    }
}

/// Trains one direct-encoding perceptron per dataset.
pub fn train_ensemble(datasets: &[Vec<FeatureVector>], norm_mode: NormalizationMode) -> Result<EnsembleModel> {
    if datasets.is_empty() {
        return Err(Error::InvalidInput("ensemble needs at least one dataset".into()));
    }
    let arity = datasets[0].first().map(FeatureVector::arity);
    let mut perceptrons = Vec::with_capacity(datasets.len());
    let mut references = Vec::with_capacity(datasets.len());
    for (dof, data) in datasets.iter().enumerate() {
        let wrap = |e: Error| Error::Dof {
            dof,
            source: Box::new(e),
        };
        if let Some(fv) = data.iter().find(|fv| Some(fv.arity()) != arity) {
            return Err(wrap(Error::Data(format!(
                "{} features where dof 0 has {}",
                fv.arity(),
                arity.unwrap_or(0)
            ))));
        }
        let model = train(data, EncodingScheme::Direct, norm_mode).map_err(wrap)?;
        let mut total = 0.0;
        for fv in data {
            let e = model.expectations(&model.encode(fv).map_err(wrap)?).map_err(wrap)?;
            total += match fv.label {
                Some(Label::Minus) => e.minus,
                Some(Label::Plus) => e.plus,
                None => unreachable!("train rejects unlabeled samples"),
            };
        }
        references.push(total / data.len() as f64);
        perceptrons.push(model);
    }
    let names = (0..datasets.len()).map(|i| format!("dof{i}")).collect();
    EnsembleModel::from_parts(perceptrons, names, references)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionKind {
    Single,
    Superposition,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DofOutput {
    /// −1, +1, or 0 when the DOF is inactive.
    pub label: i8,
    /// Winning expectation, the proportional control signal.
    pub activation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleDecision {
    pub per_dof: Vec<DofOutput>,
    pub kind: DecisionKind,
    /// `(dof index, sign)` of every active DOF.
    pub active_set: BTreeSet<(usize, Label)>,
}

/// Classifies one input; `fraction` scales each DOF's reference expectation into its threshold.
pub fn classify_ensemble(model: &EnsembleModel, fv: &FeatureVector, fraction: f64) -> Result<EnsembleDecision> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidInput(format!("threshold fraction {fraction} outside [0, 1]")));
    }
    if fv.arity() != model.channels() {
        return Err(Error::InvalidInput(format!(
            "ensemble expects {} channels, got {}",
            model.channels(),
            fv.arity()
        )));
    }
    let state = model.perceptrons[0].encode(fv)?;
    let mut per_dof = Vec::with_capacity(model.perceptrons.len());
    let mut active_set = BTreeSet::new();
    for (dof, (p, reference)) in model.perceptrons.iter().zip(&model.references).enumerate() {
        let e = p.expectations(&state)?;
        let winner = e.argmax_trained();
        let activation = match winner {
            Label::Minus => e.minus,
            Label::Plus => e.plus,
        };
        let label = if activation >= fraction * reference {
            active_set.insert((dof, winner));
            winner.value()
        } else {
            0
        };
        per_dof.push(DofOutput {
            label,
            activation: activation.max(0.0),
        });
    }
    let kind = match active_set.len() {
        0 => DecisionKind::None,
        1 => DecisionKind::Single,
        _ => DecisionKind::Superposition,
    };
    Ok(EnsembleDecision {
        per_dof,
        kind,
        active_set,
    })
}

/// Non-negative channel pattern for each sign of one DOF.
#[derive(Debug, Clone, PartialEq)]
pub struct DofTemplates {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl DofTemplates {
    pub fn get(&self, sign: Label) -> &[f64] {
        match sign {
            Label::Plus => &self.plus,
            Label::Minus => &self.minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticEmgConfig {
    pub channels: usize,
    pub templates: Vec<DofTemplates>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticEmgConfig {
    /// Splits the channels into `2 · dofs` equal blocks; each (dof, sign) template is 1.0 on its block.
    pub fn disjoint(channels: usize, dofs: usize, noise_sigma: f64, seed: u64) -> Result<Self> {
        if dofs == 0 || channels < 2 * dofs {
            return Err(Error::Config(format!("{channels} channels cannot hold {dofs} disjoint dof pairs")));
        }
        let block = channels / (2 * dofs);
        let template = |slot: usize| -> Vec<f64> {
            (0..channels)
                .map(|c| if c / block == slot { 1.0 } else { 0.0 })
                .collect()
        };
        let templates = (0..dofs)
            .map(|d| DofTemplates {
                plus: template(2 * d),
                minus: template(2 * d + 1),
            })
            .collect();
        let config = SyntheticEmgConfig {
            channels,
            templates,
            noise_sigma,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn dofs(&self) -> usize {
        self.templates.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels == 0 {
            return Err(Error::Config("channels must be positive".into()));
        }
        if self.templates.is_empty() {
            return Err(Error::Config("at least one dof template pair is required".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config(format!("noise sigma {} must be >= 0", self.noise_sigma)));
        }
        let all: Vec<(usize, Label, &[f64])> = self
            .templates
            .iter()
            .enumerate()
            .flat_map(|(d, t)| [(d, Label::Plus, t.plus.as_slice()), (d, Label::Minus, t.minus.as_slice())])
            .collect();
        for &(d, s, t) in &all {
            if t.len() != self.channels {
                return Err(Error::Config(format!("template ({d}, {s}) has {} channels, expected {}", t.len(), self.channels)));
            }
            if t.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::Config(format!("template ({d}, {s}) has a negative or non-finite entry")));
            }
            if t.iter().all(|&v| v == 0.0) {
                return Err(Error::Config(format!("template ({d}, {s}) is all zero")));
            }
        }
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a.2 == b.2 {
                    return Err(Error::Config(format!(
                        "templates ({}, {}) and ({}, {}) are identical",
                        a.0, a.1, b.0, b.1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A held-out input activating two DOFs at once, with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedTrial {
    pub features: FeatureVector,
    pub active: BTreeSet<(usize, Label)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    /// Per DOF: `trials` samples of each sign, alternating +1 / −1.
    pub training: Vec<Vec<FeatureVector>>,
    /// Every cross-DOF sign pair, `trials` samples each.
    pub combined: Vec<CombinedTrial>,
}

/// Template plus Gaussian noise, truncated at zero.
pub fn generate_synthetic(config: &SyntheticEmgConfig, trials_per_class: usize) -> Result<SyntheticData> {
    config.validate()?;
    if trials_per_class == 0 {
        return Err(Error::Config("trials per class must be positive".into()));
    }
    let noise = Normal::new(0.0, config.noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = RandomSource::new(config.seed);
    let mut noisy = |clean: Vec<f64>| -> Vec<f64> {
        if config.noise_sigma == 0.0 {
            return clean;
        }
        clean
            .into_iter()
            .map(|v| (v + noise.sample(rng.rng())).max(0.0))
            .collect()
    };

    let mut training = Vec::with_capacity(config.dofs());
    for t in &config.templates {
        let mut data = Vec::with_capacity(2 * trials_per_class);
        for _ in 0..trials_per_class {
            for sign in [Label::Plus, Label::Minus] {
                data.push(FeatureVector::labeled(noisy(t.get(sign).to_vec()), sign));
            }
        }
        training.push(data);
    }

    let mut combined = Vec::new();
    for a in 0..config.dofs() {
        for b in (a + 1)..config.dofs() {
            for sa in [Label::Plus, Label::Minus] {
                for sb in [Label::Plus, Label::Minus] {
                    let ta = config.templates[a].get(sa);
                    let tb = config.templates[b].get(sb);
                    for _ in 0..trials_per_class {
                        let clean = ta.iter().zip(tb).map(|(x, y)| x + y).collect();
                        combined.push(CombinedTrial {
                            features: FeatureVector::new(noisy(clean)),
                            active: [(a, sa), (b, sb)].into_iter().collect(),
                        });
                    }
                }
            }
        }
    }
    Ok(SyntheticData { training, combined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perceptron::Case;

    /// (2n)! / (2 (2n-2)!) - n evaluated with the factorial ratio as a falling product in u128.
    fn capacity_by_factorials(n: u64) -> u64 {
        let m = 2 * n as u128;
        let falling: u128 = (m - 1..=m).product(); // (2n)! / (2n-2)!
        (falling / 2 - n as u128) as u64
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(
            class_capacity(2).unwrap(),
            ClassCapacity {
                originals: 4,
                superpositions: 4
            }
        );
        assert_eq!(class_capacity(1).unwrap().superpositions, 0);
        assert_eq!(class_capacity(3).unwrap().superpositions, 12);
        assert!(class_capacity(0).is_err());
        assert!(class_capacity(u64::MAX).is_err());
        for n in 1..=20 {
            let c = class_capacity(n).unwrap();
            assert_eq!(c.superpositions, capacity_by_factorials(n));
            assert_eq!(c.superpositions, 2 * n * (n - 1));
        }
    }

    fn clean_model() -> (SyntheticEmgConfig, EnsembleModel) {
        let config = SyntheticEmgConfig::disjoint(8, 2, 0.0, 1).unwrap();
        let data = generate_synthetic(&config, 5).unwrap();
        let model = train_ensemble(&data.training, NormalizationMode::Rescale).unwrap();
        (config, model)
    }

    #[test]
    fn disjoint_templates_train_incomplete_models() {
        let (_, model) = clean_model();
        assert_eq!(model.perceptrons().len(), 2);
        for p in model.perceptrons() {
            assert!(matches!(p.regime().case, Case::B | Case::D));
            assert!(p.regime().completeness_defect > 0.0);
        }
        for &r in model.references() {
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_dof_ensemble_matches_plain_training() {
        let config = SyntheticEmgConfig::disjoint(4, 1, 0.1, 3).unwrap();
        let data = generate_synthetic(&config, 10).unwrap();
        let ensemble = train_ensemble(&data.training, NormalizationMode::Rescale).unwrap();
        let plain = train(&data.training[0], EncodingScheme::Direct, NormalizationMode::Rescale).unwrap();
        assert_eq!(ensemble.perceptrons()[0], plain);
    }

    #[test]
    fn mismatched_arity_is_data_error() {
        let a = vec![
            FeatureVector::labeled(vec![1.0, 0.0], Label::Plus),
            FeatureVector::labeled(vec![0.0, 1.0], Label::Minus),
        ];
        let b = vec![
            FeatureVector::labeled(vec![1.0, 0.0, 0.0], Label::Plus),
            FeatureVector::labeled(vec![0.0, 1.0, 0.0], Label::Minus),
        ];
        let err = train_ensemble(&[a, b], NormalizationMode::Rescale).unwrap_err();
        assert!(matches!(err, Error::Dof { dof: 1, .. }), "{err}");
        assert_eq!(err.kind(), crate::error::ErrorKind::Data);
    }

    #[test]
    fn template_and_superposition_examples() {
        let (config, model) = clean_model();
        let t = &config.templates;
        let d = classify_ensemble(&model, &FeatureVector::new(t[0].plus.clone()), DEFAULT_ACTIVATION_FRACTION).unwrap();
        assert_eq!(d.kind, DecisionKind::Single);
        assert_eq!(d.active_set, [(0, Label::Plus)].into_iter().collect());

        let sum: Vec<f64> = t[0].plus.iter().zip(&t[1].minus).map(|(a, b)| a + b).collect();
        let d = classify_ensemble(&model, &FeatureVector::new(sum), DEFAULT_ACTIVATION_FRACTION).unwrap();
        assert_eq!(d.kind, DecisionKind::Superposition);
        assert_eq!(d.active_set, [(0, Label::Plus), (1, Label::Minus)].into_iter().collect());
        assert!((d.per_dof[0].activation - 0.5).abs() < 1e-12);

        let flat = FeatureVector::new(vec![1e-9; 8]);
        let d = classify_ensemble(&model, &flat, DEFAULT_ACTIVATION_FRACTION).unwrap();
        assert_eq!(d.kind, DecisionKind::None);
        assert!(d.per_dof.iter().all(|o| o.label == 0));

        assert!(classify_ensemble(&model, &FeatureVector::new(vec![1.0; 3]), 0.5).is_err());
        assert!(classify_ensemble(&model, &flat, 1.5).is_err());
    }

    #[test]
    fn synthetic_shapes_and_determinism() {
        let config = SyntheticEmgConfig::disjoint(8, 2, 0.05, 99).unwrap();
        let a = generate_synthetic(&config, 50).unwrap();
        assert_eq!(a.training.len(), 2);
        assert!(a.training.iter().all(|d| d.len() == 100));
        assert_eq!(a.combined.len(), 4 * 50);
        assert!(a.training.iter().flatten().all(|fv| fv.features.iter().all(|&v| v >= 0.0)));
        assert_eq!(a, generate_synthetic(&config, 50).unwrap());

        let clean = SyntheticEmgConfig::disjoint(8, 2, 0.0, 99).unwrap();
        let c = generate_synthetic(&clean, 3).unwrap();
        for (dof, data) in c.training.iter().enumerate() {
            for fv in data {
                assert_eq!(fv.features, clean.templates[dof].get(fv.label.unwrap()));
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut config = SyntheticEmgConfig::disjoint(8, 2, 0.0, 0).unwrap();
        config.templates[1].minus = vec![0.0; 8];
        assert!(matches!(generate_synthetic(&config, 1), Err(Error::Config(_))));
        config.templates[1].minus = config.templates[0].plus.clone();
        assert!(matches!(config.validate(), Err(Error::Config(_))));
        assert!(SyntheticEmgConfig::disjoint(3, 2, 0.0, 0).is_err());
        assert!(SyntheticEmgConfig::disjoint(8, 2, -1.0, 0).is_err());
    }
}
