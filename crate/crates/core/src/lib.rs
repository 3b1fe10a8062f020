//! Quantum perceptron: projector-sum POVM learning over encoded feature vectors.
//!
//! * [`linops`]: dense complex states, Hermitian operators, eigen-extrema.
//! * [`encoding`]: qubit and direct encodings of classical features.
//! * [`perceptron`]: training, regime diagnosis and argmax classification.
//! * [`sampling`]: simulated measurement and empirical accuracy.
//! * [`baseline`]: the classical Rosenblatt perceptron.
//! * [`clustering`]: the unsupervised two-class protocol and permutation consensus.
//! * [`ensemble`]: one perceptron per degree of freedom, superposition recognition,
//!   synthetic EMG-like data.
//! * [`io`]: CSV ingestion and model files.

pub mod baseline;
pub mod clustering;
pub mod encoding;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod linops;
pub mod perceptron;
pub mod sampling;

pub use encoding::{EncodingScheme, FeatureVector, Label};
pub use error::{Error, ErrorKind, Result};
pub use linops::{NumericPolicy, Operator, StateVector};
pub use perceptron::{
    classify, classify_feature, train, Case, ClassificationResult, Expectations, NormalizationMode, Outcome,
    PerceptronModel, RegimeReport,
};
pub use sampling::RandomSource;
