//! Linear dispersion designs: labeled weight matrices with their F4 labels.

use nalgebra::DMatrix;

use crate::design::Design;
use crate::error::{Error, Result};
use crate::f4::F4Vec;
use crate::matrix::ComplexMatrix;
use crate::pauli::{phi_inv, phi_signed};

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub label: String,
    pub matrix: ComplexMatrix,
    pub vector: Option<F4Vec>,
    /// `matrix == sign · phi_inv(vector)` when a vector is present.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearDesign {
    n: usize,
    entries: Vec<Entry>,
}

fn default_labels(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("x{i}")).collect()
}

impl LinearDesign {
    pub fn from_design(d: &Design) -> LinearDesign {
        LinearDesign::from_signed(d, &vec![1; d.k()]).expect("sign vector has design length")
    }

    /// Weight matrices `signs[i] · phi_inv(y_i)`.
    pub fn from_signed(d: &Design, signs: &[i8]) -> Result<LinearDesign> {
        if signs.len() != d.k() {
            return Err(Error::DimensionMismatch(signs.len(), d.k()));
        }
        if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::OutOfRange(format!("sign {s}, expected +1 or -1")));
        }
        let entries = d
            .vectors()
            .iter()
            .zip(signs)
            .zip(default_labels(d.k()))
            .map(|((v, &sign), label)| Entry {
                label,
                matrix: phi_inv(v).scale_re(f64::from(sign)),
                vector: Some(v.clone()),
                sign,
            })
            .collect();
        Ok(LinearDesign { n: d.n(), entries })
    }

    /// Identifies each target matrix as `±phi_inv(y)`.
    pub fn from_targets(labels: &[&str], targets: Vec<ComplexMatrix>) -> Result<LinearDesign> {
        if labels.len() != targets.len() {
            return Err(Error::DimensionMismatch(labels.len(), targets.len()));
        }
        let n = targets.first().map_or(1, ComplexMatrix::rows);
        let entries = labels
            .iter()
            .zip(targets)
            .map(|(label, matrix)| {
                if matrix.rows() != n {
                    return Err(Error::DimensionMismatch(matrix.rows(), n));
                }
                let (v, sign) = phi_signed(&matrix)?;
                Ok(Entry { label: (*label).to_string(), matrix, vector: Some(v), sign })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearDesign { n, entries })
    }

    /// Arbitrary square matrices with no F4 label.
    pub fn from_matrices(matrices: Vec<ComplexMatrix>) -> Result<LinearDesign> {
        let n = matrices.first().map_or(1, ComplexMatrix::rows);
        let labels = default_labels(matrices.len());
        let entries = matrices
            .into_iter()
            .zip(labels)
            .map(|(matrix, label)| {
                if !matrix.is_square() || matrix.rows() != n {
                    return Err(Error::DimensionMismatch(matrix.rows(), n));
                }
                Ok(Entry { label, matrix, vector: None, sign: 1 })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearDesign { n, entries })
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Result<LinearDesign> {
        if labels.len() != self.k() {
            return Err(Error::DimensionMismatch(labels.len(), self.k()));
        }
        for (e, l) in self.entries.iter_mut().zip(labels) {
            e.label = (*l).to_string();
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn matrix(&self, i: usize) -> &ComplexMatrix {
        &self.entries[i].matrix
    }

    pub fn matrices(&self) -> Vec<&ComplexMatrix> {
        self.entries.iter().map(|e| &e.matrix).collect()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.entries.iter().map(|e| e.sign).collect()
    }

    /// The underlying design when every entry carries a vector.
    pub fn to_design(&self) -> Result<Design> {
        let vs = self
            .entries
            .iter()
            .map(|e| e.vector.clone().ok_or(Error::NotInBasis))
            .collect::<Result<Vec<_>>>()?;
        Design::new(self.n.trailing_zeros() as usize, vs)
    }

    /// `Σ x_i A_i`.
    pub fn evaluate(&self, x: &[f64]) -> Result<ComplexMatrix> {
        if x.len() != self.k() {
            return Err(Error::DimensionMismatch(x.len(), self.k()));
        }
        let mut acc = ComplexMatrix::zeros(self.n, self.n);
        for (xi, e) in x.iter().zip(&self.entries) {
            if *xi != 0.0 {
                acc.add_scaled(*xi, &e.matrix);
            }
        }
        Ok(acc)
    }

    /// Real `2N² × K` matrix whose columns stack `vec(Re A_i)` over `vec(Im A_i)`.
    pub fn real_generator(&self) -> DMatrix<f64> {
        let nn = self.n * self.n;
        DMatrix::from_fn(2 * nn, self.k(), |r, c| {
            let z = self.entries[c].matrix.data()[r % nn];
            if r < nn {
                z.re
            } else {
                z.im
            }
        })
    }

    pub fn is_linearly_independent(&self) -> bool {
        self.k() == 0 || self.real_generator().rank(1e-9) == self.k()
    }
}
