//! Simulated measurement: draw outcomes with probability proportional to expectation values.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::FeatureVector;
use crate::error::{Error, Result};
use crate::linops::StateVector;
use crate::perceptron::{ClassificationResult, ClassifyMode, Expectations, Outcome, PerceptronModel};

/// Seeded pseudorandom stream.
///
/// Backed by ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng::seed_from_u64`),
/// whose output is value-stable for a given seed. Uniform `f64` draws use the
/// upper 53 bits of one 64-bit word.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream derived from this one's seed and a stream index.
    pub fn split(&self, stream: u64) -> RandomSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream.wrapping_add(1));
        RandomSource { seed: self.seed, rng }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Outcome probabilities `e_d / Σe` after clamping tiny values to zero.
pub fn outcome_probabilities(model: &PerceptronModel, state: &StateVector) -> Result<Expectations> {
    let policy = model.policy();
    let raw = model.expectations(state)?;
    for o in Outcome::ALL {
        let v = raw.get(o);
        if v < -policy.eps_eig {
            return Err(Error::Unphysical {
                outcome: o.value(),
                value: v,
            });
        }
    }
    let clamped = raw.map(|e| if e <= policy.eps_zero { 0.0 } else { e });
    let total = clamped.minus + clamped.plus + clamped.zero;
    if total == 0.0 {
        return Err(Error::NoSupport {
            minus: raw.minus,
            plus: raw.plus,
            zero: raw.zero,
        });
    }
    Ok(clamped.map(|e| e / total))
}

/// Draws one outcome from the model's measurement distribution for `state`.
pub fn sample_outcome(model: &PerceptronModel, state: &StateVector, rng: &mut RandomSource) -> Result<Outcome> {
    let probs = outcome_probabilities(model, state)?;
    Ok(draw(&probs, rng))
}

fn draw(probs: &Expectations, rng: &mut RandomSource) -> Outcome {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last = Outcome::Minus;
    for o in Outcome::ALL {
        let p = probs.get(o);
        if p == 0.0 {
            continue;
        }
        acc += p;
        last = o;
        if u < acc {
            return o;
        }
    }
    // Round-off left `acc` just under 1; the last supported outcome absorbs it.
    last
}

/// Probabilistic counterpart of [`crate::perceptron::classify`]: the label is one draw.
pub fn classify_probabilistic(
    model: &PerceptronModel,
    state: &StateVector,
    rng: &mut RandomSource,
) -> Result<ClassificationResult> {
    let probs = outcome_probabilities(model, state)?;
    let eps = model.policy().eps_zero;
    let expectations = model
        .expectations(state)?
        .map(|e| if e.abs() <= eps { 0.0 } else { e });
    Ok(ClassificationResult {
        label: draw(&probs, rng),
        expectations,
        mode: ClassifyMode::Probabilistic,
    })
}

/// Fraction of sampled outcomes matching the true labels, `trials` draws per datum.
pub fn empirical_accuracy(
    model: &PerceptronModel,
    data: &[FeatureVector],
    trials: usize,
    rng: &mut RandomSource,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidInput("accuracy needs at least one labeled sample".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let mut hits = 0usize;
    for (row, fv) in data.iter().enumerate() {
        let truth: Outcome = fv
            .label
            .ok_or_else(|| Error::Data(format!("sample {row} has no label")))?
            .into();
        let probs = outcome_probabilities(model, &model.encode(fv)?)?;
        for _ in 0..trials {
            if draw(&probs, rng) == truth {
                hits += 1;
            }
        }
    }
    Ok(hits as f64 / (data.len() * trials) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{EncodingScheme, Label};
    use crate::linops::{NumericPolicy, Operator};
    use crate::perceptron::{train, NormalizationMode};
    use proptest::prelude::*;

    fn xor_model() -> PerceptronModel {
        let data = vec![
            FeatureVector::labeled(vec![0.0, 0.0], Label::Minus),
            FeatureVector::labeled(vec![0.0, 1.0], Label::Plus),
            FeatureVector::labeled(vec![1.0, 0.0], Label::Plus),
            FeatureVector::labeled(vec![1.0, 1.0], Label::Minus),
        ];
        train(&data, EncodingScheme::Qubit, NormalizationMode::Rescale).unwrap()
    }

    fn diag_model(minus: &[f64], plus: &[f64]) -> PerceptronModel {
        let diag = |d: &[f64]| {
            let n = d.len();
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect())
                .collect();
            Operator::from_real_rows(&rows).unwrap()
        };
        PerceptronModel::from_class_operators(
            diag(minus),
            diag(plus),
            EncodingScheme::Direct,
            NormalizationMode::Unit,
            NumericPolicy::default(),
        )
        .unwrap()
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        let xs: Vec<f64> = (0..100).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..100).map(|_| b.uniform()).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        let mut c = RandomSource::new(43);
        assert_ne!(xs[0], c.uniform());
    }

    #[test]
    fn split_streams_differ() {
        let base = RandomSource::new(7);
        let mut a = base.split(0);
        let mut b = base.split(1);
        assert_ne!(a.uniform(), b.uniform());
    }

    #[test]
    fn pure_state_is_deterministic() {
        let m = xor_model();
        let s = StateVector::basis(4, 0).unwrap();
        let mut rng = RandomSource::new(1);
        for _ in 0..1000 {
            assert_eq!(sample_outcome(&m, &s, &mut rng).unwrap(), Outcome::Minus);
        }
    }

    #[test]
    fn no_support_and_unphysical_errors() {
        let m = diag_model(&[1.0, 0.0], &[0.0, 0.0]);
        assert_eq!(
            sample_outcome(&m, &StateVector::basis(2, 1).unwrap(), &mut RandomSource::new(0)).unwrap(),
            Outcome::Zero
        );

        let unphysical = diag_model(&[1.0, 0.0], &[0.5, 0.0]);
        let err = sample_outcome(&unphysical, &StateVector::basis(2, 0).unwrap(), &mut RandomSource::new(0));
        assert!(matches!(err, Err(Error::Unphysical { outcome: 0, .. })), "{err:?}");

        // The three expectations always sum to 1, so no support needs a coarse zero tolerance.
        let third = 1.0 / 3.0;
        let diag = |v: f64| Operator::from_real_rows(&[vec![v, 0.0], vec![0.0, v]]).unwrap();
        let policy = NumericPolicy {
            eps_zero: 0.5,
            ..NumericPolicy::default()
        };
        let coarse = PerceptronModel::from_class_operators(
            diag(third),
            diag(third),
            EncodingScheme::Direct,
            NormalizationMode::Unit,
            policy,
        )
        .unwrap();
        let err = sample_outcome(&coarse, &StateVector::basis(2, 0).unwrap(), &mut RandomSource::new(0));
        assert!(matches!(err, Err(Error::NoSupport { .. })), "{err:?}");
    }

    #[test]
    fn noisy_probabilities() {
        let delta = 0.2;
        let m = diag_model(&[1.0 - delta, delta], &[delta, 1.0 - delta]);
        let p = outcome_probabilities(&m, &StateVector::basis(2, 0).unwrap()).unwrap();
        assert!((p.minus - 0.8).abs() < 1e-15);
        assert!((p.plus - 0.2).abs() < 1e-15);
        assert_eq!(p.zero, 0.0);
    }

    #[test]
    fn coin_flip_frequency() {
        let m = diag_model(&[0.5, 0.5], &[0.5, 0.5]);
        let s = StateVector::basis(2, 0).unwrap();
        let mut rng = RandomSource::new(2024);
        let n = 100_000;
        let minus = (0..n)
            .filter(|_| sample_outcome(&m, &s, &mut rng).unwrap() == Outcome::Minus)
            .count();
        let f = minus as f64 / n as f64;
        assert!((0.494..=0.506).contains(&f), "{f}");
    }

    #[test]
    fn accuracy_examples() {
        let m = xor_model();
        let data = vec![
            FeatureVector::labeled(vec![0.0, 0.0], Label::Minus),
            FeatureVector::labeled(vec![0.0, 1.0], Label::Plus),
            FeatureVector::labeled(vec![1.0, 0.0], Label::Plus),
            FeatureVector::labeled(vec![1.0, 1.0], Label::Minus),
        ];
        assert_eq!(empirical_accuracy(&m, &data, 17, &mut RandomSource::new(5)).unwrap(), 1.0);
        assert!(empirical_accuracy(&m, &[], 1, &mut RandomSource::new(5)).is_err());
        assert!(empirical_accuracy(&m, &data, 0, &mut RandomSource::new(5)).is_err());

        let coin = diag_model(&[0.5, 0.5], &[0.5, 0.5]);
        let labeled = vec![
            FeatureVector::labeled(vec![1.0, 0.0], Label::Minus),
            FeatureVector::labeled(vec![0.0, 1.0], Label::Plus),
        ];
        let acc = empirical_accuracy(&coin, &labeled, 50_000, &mut RandomSource::new(9)).unwrap();
        assert!((acc - 0.5).abs() <= 0.01, "{acc}");
    }

    #[test]
    fn probabilistic_classification_reports_mode() {
        let m = xor_model();
        let r = classify_probabilistic(&m, &StateVector::basis(4, 1).unwrap(), &mut RandomSource::new(3)).unwrap();
        assert_eq!(r.mode, ClassifyMode::Probabilistic);
        assert_eq!(r.label, Outcome::Plus);
    }

    fn weights() -> impl Strategy<Value = (f64, f64)> {
        (0.0f64..1.0, 0.0f64..1.0).prop_filter("sum <= 1, mass >= 0.1", |(a, b)| a + b <= 1.0 && a + b >= 0.1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn frequencies_converge((a, b) in weights(), seed in any::<u64>()) {
            // Diagonal model on |0>: e-1 = a, e+1 = b, e0 = 1 - a - b.
            let m = diag_model(&[a, 0.0], &[b, 0.0]);
            let s = StateVector::basis(2, 0).unwrap();
            let probs = outcome_probabilities(&m, &s).unwrap();
            let mut rng = RandomSource::new(seed);
            let n = 100_000usize;
            let mut counts = [0usize; 3];
            for _ in 0..n {
                let o = sample_outcome(&m, &s, &mut rng).unwrap();
                prop_assert!(probs.get(o) > 0.0, "drew zero-probability outcome {o}");
                counts[Outcome::ALL.iter().position(|&x| x == o).unwrap()] += 1;
            }
            for (i, o) in Outcome::ALL.iter().enumerate() {
                let p = probs.get(*o);
                let f = counts[i] as f64 / n as f64;
                let bound = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
                prop_assert!((f - p).abs() <= bound.max(1e-12), "{o}: {f} vs {p}");
            }
        }

        #[test]
        fn sampling_is_reproducible(seed in any::<u64>()) {
            let m = diag_model(&[0.3, 0.0], &[0.3, 0.0]);
            let s = StateVector::basis(2, 0).unwrap();
            let run = |seed| {
                let mut rng = RandomSource::new(seed);
                (0..200).map(|_| sample_outcome(&m, &s, &mut rng).unwrap()).collect::<Vec<_>>()
            };
            prop_assert_eq!(run(seed), run(seed));
        }
    }
}
