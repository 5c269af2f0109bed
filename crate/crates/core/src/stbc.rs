//! A complete code: weight matrices, signal set and decode plan.

use crate::error::{Error, Result};
use crate::linear::LinearDesign;
use crate::matrix::ComplexMatrix;
use crate::pauli::{hr_orthogonal_numeric, TOL};
use crate::plan::{DecodePlan, PlanNode};
use crate::signal::SignalSet;

#[derive(Clone, Debug)]
pub struct Stbc {
    ld: LinearDesign,
    signal: SignalSet,
    plan: DecodePlan,
    components: Vec<ComplexMatrix>,
    points: Vec<Vec<f64>>,
}

impl Stbc {
    /// Fails when the plan splits an encoding unit or when siblings under a
    /// conditional node are not Hurwitz-Radon orthogonal.
    pub fn new(ld: LinearDesign, signal: SignalSet, plan: DecodePlan) -> Result<Stbc> {
        if ld.k() != signal.k() || ld.k() != plan.k() {
            return Err(Error::Plan(format!(
                "design has {} symbols, signal set {}, plan {}",
                ld.k(),
                signal.k(),
                plan.k()
            )));
        }
        let n = ld.n();
        let mut components = Vec::new();
        let mut points = Vec::new();
        for u in signal.units() {
            for j in 0..u.dim() {
                let mut b = ComplexMatrix::zeros(n, n);
                for (i, &s) in u.symbols().iter().enumerate() {
                    b.add_scaled(u.precoder()[(i, j)], ld.matrix(s));
                }
                components.push(b);
                points.push(u.points()[j].clone());
            }
        }
        let stbc = Stbc { ld, signal, plan, components, points };
        stbc.check_node(stbc.plan.root())?;
        Ok(stbc)
    }

    fn check_whole_units(&self, set: &[usize]) -> Result<()> {
        for &s in set {
            let u = &self.signal.units()[self.signal.unit_of(s)];
            if let Some(&o) = u.symbols().iter().find(|o| !set.contains(o)) {
                return Err(Error::Plan(format!(
                    "symbols {} and {} share an encoding unit but are split by the plan",
                    s + 1,
                    o + 1
                )));
            }
        }
        Ok(())
    }

    fn check_node(&self, node: &PlanNode) -> Result<()> {
        match node {
            PlanNode::Leaf { symbols, .. } => self.check_whole_units(symbols),
            PlanNode::Conditional { conditioning, children } => {
                self.check_whole_units(conditioning)?;
                let sets: Vec<Vec<usize>> = children.iter().map(PlanNode::symbols).collect();
                for (a, sa) in sets.iter().enumerate() {
                    for sb in &sets[a + 1..] {
                        for &i in sa {
                            for &j in sb {
                                if !hr_orthogonal_numeric(self.ld.matrix(i), self.ld.matrix(j), 1e3 * TOL)? {
                                    return Err(Error::Plan(format!(
                                        "symbols {} and {} are decoded separately but their weight matrices are not HR-orthogonal",
                                        i + 1,
                                        j + 1
                                    )));
                                }
                            }
                        }
                    }
                }
                for c in children {
                    self.check_node(c)?;
                }
                Ok(())
            }
        }
    }

    pub fn linear_design(&self) -> &LinearDesign {
        &self.ld
    }

    pub fn signal(&self) -> &SignalSet {
        &self.signal
    }

    pub fn plan(&self) -> &DecodePlan {
        &self.plan
    }

    pub fn n(&self) -> usize {
        self.ld.n()
    }

    /// Effective weight matrix of every real component.
    pub fn components(&self) -> &[ComplexMatrix] {
        &self.components
    }

    pub fn component_points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn size(&self) -> u128 {
        self.signal.codebook_size()
    }

    /// Mixed-radix digits of a codeword index, last component fastest.
    pub fn digits(&self, mut index: u128) -> Vec<usize> {
        let mut d = vec![0; self.points.len()];
        for (slot, p) in d.iter_mut().zip(&self.points).rev() {
            let q = p.len() as u128;
            *slot = (index % q) as usize;
            index /= q;
        }
        d
    }

    pub fn index_of(&self, digits: &[usize]) -> u128 {
        digits.iter().zip(&self.points).fold(0u128, |acc, (&d, p)| acc * p.len() as u128 + d as u128)
    }

    pub fn codeword_from_digits(&self, digits: &[usize]) -> ComplexMatrix {
        let n = self.n();
        let mut x = ComplexMatrix::zeros(n, n);
        for ((b, p), &d) in self.components.iter().zip(&self.points).zip(digits) {
            x.add_scaled(p[d], b);
        }
        x
    }

    pub fn codeword(&self, index: u128) -> ComplexMatrix {
        self.codeword_from_digits(&self.digits(index))
    }

    /// Real symbol values of a codeword.
    pub fn symbols_of(&self, index: u128) -> Vec<f64> {
        let comps: Vec<f64> = self.digits(index).iter().zip(&self.points).map(|(&d, p)| p[d]).collect();
        self.signal.symbol_values(&comps)
    }

    /// `E‖X‖_F²` under uniform, independent component choices.
    pub fn average_energy(&self) -> f64 {
        let q = self.points.len();
        let mean: Vec<f64> = self.points.iter().map(|p| p.iter().sum::<f64>() / p.len() as f64).collect();
        let second: Vec<f64> = self.points.iter().map(|p| p.iter().map(|x| x * x).sum::<f64>() / p.len() as f64).collect();
        let mut e = 0.0;
        for a in 0..q {
            for b in 0..q {
                let moment = if a == b { second[a] } else { mean[a] * mean[b] };
                if moment != 0.0 {
                    e += moment * self.components[a].inner_re(&self.components[b]);
                }
            }
        }
        e
    }
}
