//! Dense complex linear algebra for state vectors and Hermitian operators.
//!
//! Operators are stored row-major in a flat buffer. Every `Operator` value is
//! Hermitian; products of two operators (which generally are not) never
//! escape this module except as a Frobenius norm.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest state dimension an operator may be built for.
pub const MAX_DIM: usize = 1 << 10;

const NORM_TOLERANCE: f64 = 1e-12;
const IMAG_TOLERANCE: f64 = 1e-10;

/// Tolerances shared by every numerical decision in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// An expectation or defect at or below this magnitude counts as zero.
    pub eps_zero: f64,
    /// Elementwise Hermiticity tolerance.
    pub eps_herm: f64,
    /// Slack allowed below zero for eigenvalues and expectations.
    pub eps_eig: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            eps_zero: 1e-9,
            eps_herm: 1e-12,
            eps_eig: 1e-10,
        }
    }
}

impl NumericPolicy {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_zero", self.eps_zero),
            ("eps_herm", self.eps_herm),
            ("eps_eig", self.eps_eig),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// A unit-norm vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already unit-norm (within 1e-12).
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("state vector of dimension 0".into()));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidInput("state vector has non-finite amplitude".into()));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!("state vector norm is {norm}, expected 1")));
        }
        Ok(StateVector { amplitudes })
    }

    /// Divides by the L2 norm. Fails on an all-zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("state vector of dimension 0".into()));
        }
        let norm = l2_norm(&amplitudes);
        if !norm.is_finite() {
            return Err(Error::InvalidInput("state vector has non-finite amplitude".into()));
        }
        if norm == 0.0 {
            return Err(Error::Degenerate("cannot normalize a zero vector".into()));
        }
        StateVector::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        StateVector::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// The computational basis vector `|index⟩` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidInput(format!("basis index {index} out of range for dim {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amplitudes)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// A dense Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    /// Builds an operator from row-major entries, checking Hermiticity within `eps_herm`.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>, eps_herm: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("operator of dimension 0".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "operator of dim {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let op = Operator { dim, entries };
        let defect = op.hermiticity_defect();
        if !(defect <= eps_herm) {
            return Err(Error::InvalidInput(format!(
                "operator is not Hermitian (max |A_ij - conj(A_ji)| = {defect:e})"
            )));
        }
        Ok(op)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidInput("operator rows must form a square matrix".into()));
            }
            entries.extend(row.iter().map(|&v| Complex64::new(v, 0.0)));
        }
        Operator::from_entries(dim, entries, NumericPolicy::default().eps_herm)
    }

    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Operator::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks_exact(self.dim)
    }

    /// Largest elementwise deviation from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.entries[i * n + j] - self.entries[j * n + i].conj()).norm();
                if d.is_nan() {
                    return f64::NAN;
                }
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| a * factor).collect(),
        }
    }

    /// Adds `|state⟩⟨state|` in place.
    pub fn add_projector(&mut self, state: &StateVector) -> Result<()> {
        check_dims(self.dim, state.dim())?;
        let amps = state.amplitudes();
        for (row, a) in self.entries.chunks_exact_mut(self.dim).zip(amps) {
            for (entry, b) in row.iter_mut().zip(amps) {
                *entry += a * b.conj();
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        l2_norm(&self.entries)
    }

    /// `‖self · other‖_F`; the product itself need not be Hermitian.
    pub fn product_frobenius_norm(&self, other: &Operator) -> Result<f64> {
        check_dims(self.dim, other.dim)?;
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let v: Complex64 = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
                acc += v.norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// Largest elementwise difference to `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        check_dims(self.dim, other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `P |state⟩`
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        check_dims(self.dim, state.dim())?;
        Ok(self
            .rows()
            .map(|row| row.iter().zip(state.amplitudes()).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(&self, other: &Operator, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Operator> {
        check_dims(self.dim, other.dim)?;
        Ok(Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

/// Outer product `|state⟩⟨state|`.
pub fn projector(state: &StateVector) -> Operator {
    let mut op = Operator::zeros(state.dim());
    op.add_projector(state).expect("dimensions agree by construction");
    op
}

/// Kronecker product; the index of `a` varies slowest.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> StateVector {
    let amplitudes = a
        .amplitudes()
        .iter()
        .flat_map(|x| b.amplitudes().iter().map(move |y| x * y))
        .collect();
    StateVector { amplitudes }
}

/// Kronecker product of a sequence of states, folded left to right.
pub fn tensor_all<'a>(states: impl IntoIterator<Item = &'a StateVector>) -> Option<StateVector> {
    let mut iter = states.into_iter();
    let first = iter.next()?.clone();
    Some(iter.fold(first, |acc, s| tensor_product(&acc, s)))
}

/// `⟨state|op|state⟩`, which is real for a Hermitian operator.
pub fn expectation(op: &Operator, state: &StateVector) -> Result<f64> {
    let applied = op.apply(state)?;
    let value: Complex64 = state
        .amplitudes()
        .iter()
        .zip(&applied)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if !(value.im.abs() < IMAG_TOLERANCE) {
        return Err(Error::NumericIntegrity(format!(
            "expectation has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Smallest and largest eigenvalue of a Hermitian operator.
pub fn eig_extrema(op: &Operator) -> Result<(f64, f64)> {
    let defect = op.hermiticity_defect();
    if !(defect <= NumericPolicy::default().eps_herm) {
        return Err(Error::InvalidInput(format!(
            "eigen-extrema need a Hermitian operator (defect {defect:e})"
        )));
    }
    let eigenvalues = op.to_nalgebra().symmetric_eigenvalues();
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::NumericIntegrity("eigensolver returned non-finite values".into()));
    }
    Ok((min, max))
}
