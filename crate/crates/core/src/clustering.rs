//! Unsupervised two-class protocol.
//!
//! The first vector seeds class −1 and class +1 is the formal complement
//! `I − P₋₁` until a vector closer to the complement than to `P₋₁` arrives
//! and seeds it. From then on each vector joins the class with the larger
//! expectation and its projector is added to that class's operator.
//! Assignments depend on presentation order; [`cluster_consensus`] measures
//! how much.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::encoding::Label;
use crate::error::{Error, Result};
use crate::linops::{expectation, NumericPolicy, Operator, StateVector};
use crate::sampling::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Separability {
    pub separable: bool,
    /// Indices `(x, y)` with `⟨x|(I − 2|y⟩⟨y|)|x⟩ ≥ 0`.
    pub witness: Option<(usize, usize)>,
}

/// True iff some pair satisfies `|⟨x|y⟩|² ≤ 1/2` (within `eps_zero`).
pub fn separability_check(vectors: &[StateVector], policy: &NumericPolicy) -> Result<Separability> {
    if vectors.len() < 2 {
        return Err(Error::InvalidInput("separability needs at least two vectors".into()));
    }
    check_common_dim(vectors)?;
    for (i, x) in vectors.iter().enumerate() {
        for (j, y) in vectors.iter().enumerate().skip(i + 1) {
            let value = 1.0 - 2.0 * x.inner(y)?.norm_sqr();
            if value >= -policy.eps_zero {
                return Ok(Separability {
                    separable: true,
                    witness: Some((i, j)),
                });
            }
        }
    }
    Ok(Separability {
        separable: false,
        witness: None,
    })
}

fn check_common_dim(vectors: &[StateVector]) -> Result<()> {
    let dim = vectors[0].dim();
    if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.dim() != dim) {
        return Err(Error::Data(format!("vector {i} has dimension {}, expected {dim}", v.dim())));
    }
    Ok(())
}

/// How the two class expectations are compared once both classes exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Comparison {
    /// Raw projector sums.
    #[default]
    Unnormalized,
    /// Each expectation divided by its class size.
    CountNormalized,
}

/// Operator for class +1: the formal complement until a member arrives.
#[derive(Debug, Clone, PartialEq)]
pub enum PlusClass {
    Complement,
    Seeded { operator: Operator, members: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    pub p_minus: Operator,
    pub minus_members: usize,
    pub p_plus: PlusClass,
    /// Label of each vector, in presentation order.
    pub assignments: Vec<Label>,
}

impl ClusterState {
    fn seed(first: &StateVector) -> Result<Self> {
        let mut p_minus = Operator::zeros(first.dim());
        p_minus.add_projector(first)?;
        Ok(ClusterState {
            p_minus,
            minus_members: 1,
            p_plus: PlusClass::Complement,
            assignments: vec![Label::Minus],
        })
    }

    fn present(&mut self, x: &StateVector, comparison: Comparison, policy: &NumericPolicy) -> Result<Label> {
        let e_minus = expectation(&self.p_minus, x)?;
        let label = match &mut self.p_plus {
            PlusClass::Complement => {
                let e_plus = 1.0 - e_minus;
                if e_minus > e_plus + policy.eps_zero {
                    self.p_minus.add_projector(x)?;
                    self.minus_members += 1;
                    Label::Minus
                } else {
                    let mut operator = Operator::zeros(x.dim());
                    operator.add_projector(x)?;
                    self.p_plus = PlusClass::Seeded { operator, members: 1 };
                    Label::Plus
                }
            }
            PlusClass::Seeded { operator, members } => {
                let e_plus = expectation(operator, x)?;
                let (score_minus, score_plus) = match comparison {
                    Comparison::Unnormalized => (e_minus, e_plus),
                    Comparison::CountNormalized => {
                        (e_minus / self.minus_members as f64, e_plus / *members as f64)
                    }
                };
                if score_minus > score_plus + policy.eps_zero {
                    self.p_minus.add_projector(x)?;
                    self.minus_members += 1;
                    Label::Minus
                } else {
                    operator.add_projector(x)?;
                    *members += 1;
                    Label::Plus
                }
            }
        };
        self.assignments.push(label);
        Ok(label)
    }
}

/// Runs the protocol over `vectors` in the given order.
///
/// Comparisons within `eps_zero` of a tie go to class +1.
pub fn cluster_with(vectors: &[StateVector], comparison: Comparison, policy: &NumericPolicy) -> Result<ClusterState> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot cluster an empty list".into()))?;
    check_common_dim(vectors)?;
    let mut state = ClusterState::seed(first)?;
    for x in &vectors[1..] {
        state.present(x, comparison, policy)?;
    }
    Ok(state)
}

/// Unnormalized comparison with the default numeric policy.
pub fn cluster(vectors: &[StateVector]) -> Result<Vec<Label>> {
    Ok(cluster_with(vectors, Comparison::Unnormalized, &NumericPolicy::default())?.assignments)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusReport {
    pub runs: usize,
    /// `co_cluster[i][j]`: fraction of runs in which vectors `i` and `j` shared a class.
    pub co_cluster: Vec<Vec<f64>>,
    /// Mean over pairs of `max(f, 1 − f)`; 1.0 means every run agreed.
    pub agreement: f64,
    /// Assignments from the run on the given order.
    pub reference: Vec<i8>,
}

/// Re-runs the protocol on the given order plus `permutations − 1` seeded shuffles.
pub fn cluster_consensus(
    vectors: &[StateVector],
    permutations: usize,
    comparison: Comparison,
    policy: &NumericPolicy,
    rng: &mut RandomSource,
) -> Result<ConsensusReport> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::InvalidInput("consensus needs at least two vectors".into()));
    }
    if permutations == 0 {
        return Err(Error::InvalidInput("permutations must be positive".into()));
    }
    let mut together = vec![vec![0usize; n]; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut reference = Vec::new();
    for run in 0..permutations {
        if run > 0 {
            order.shuffle(rng);
        }
        let permuted: Vec<StateVector> = order.iter().map(|&i| vectors[i].clone()).collect();
        let assigned = cluster_with(&permuted, comparison, policy)?.assignments;
        let mut labels = vec![Label::Minus; n];
        for (&original, label) in order.iter().zip(assigned) {
            labels[original] = label;
        }
        if run == 0 {
            reference = labels.iter().map(|l| l.value()).collect();
        }
        for i in 0..n {
            for j in 0..n {
                if labels[i] == labels[j] {
                    together[i][j] += 1;
                }
            }
        }
    }
    let co_cluster: Vec<Vec<f64>> = together
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / permutations as f64).collect())
        .collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let f = co_cluster[i][j];
            total += f.max(1.0 - f);
            pairs += 1;
        }
    }
    Ok(ConsensusReport {
        runs: permutations,
        co_cluster,
        agreement: total / pairs as f64,
        reference,
    })
}
