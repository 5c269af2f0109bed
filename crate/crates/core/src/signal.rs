//! Signal sets: how real symbols are drawn from finite constellations.
//!
//! Symbols are split into encoding units. A unit with symbols `s_1..s_d`
//! carries an orthogonal precoder `Q` and independent real component
//! constellations `a_1..a_d`, and sets `x_{s_i} = Σ_j Q[i][j] a_j`.
//! A rotated QAM pair is the `d = 2` case with `Q` a rotation and both
//! components drawn from √M-PAM.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const ORTHO_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum UnitKind {
    Pam,
    RotatedQam { m: u32, theta: f64 },
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodingUnit {
    symbols: Vec<usize>,
    precoder: DMatrix<f64>,
    points: Vec<Vec<f64>>,
    kind: UnitKind,
}

/// `q` equally spaced points with zero mean and unit spacing.
pub fn pam_points(q: usize) -> Vec<f64> {
    (0..q).map(|i| i as f64 - (q as f64 - 1.0) / 2.0).collect()
}

/// Side length of a square QAM constellation of size `m`.
pub fn qam_side(m: u32) -> Result<usize> {
    let s = m.isqrt();
    if s < 2 || s * s != m {
        return Err(Error::Signal(format!("M = {m} is not a square of at least 4")));
    }
    Ok(s as usize)
}

pub fn rotation(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

impl EncodingUnit {
    pub fn new(symbols: Vec<usize>, precoder: DMatrix<f64>, points: Vec<Vec<f64>>, kind: UnitKind) -> Result<Self> {
        let d = symbols.len();
        if d == 0 {
            return Err(Error::Signal("empty encoding unit".into()));
        }
        if precoder.nrows() != d || precoder.ncols() != d || points.len() != d {
            return Err(Error::Signal(format!("unit of {d} symbols has mismatched precoder or point lists")));
        }
        let gram = precoder.transpose() * &precoder;
        if (gram - DMatrix::<f64>::identity(d, d)).norm() > ORTHO_TOL {
            return Err(Error::Signal("precoder is not orthogonal".into()));
        }
        for p in &points {
            if p.is_empty() || p.windows(2).any(|w| w[0] >= w[1]) || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::Signal("point lists must be nonempty, finite and strictly increasing".into()));
            }
        }
        Ok(EncodingUnit { symbols, precoder, points, kind })
    }

    pub fn pam(symbol: usize, points: Vec<f64>) -> Result<Self> {
        EncodingUnit::new(vec![symbol], DMatrix::identity(1, 1), vec![points], UnitKind::Pam)
    }

    /// `x_i + i·x_j = e^{iθ}(a + i b)` with `a, b` in √M-PAM.
    pub fn rotated_qam(i: usize, j: usize, m: u32, theta: f64) -> Result<Self> {
        let side = qam_side(m)?;
        EncodingUnit::new(
            vec![i, j],
            rotation(theta),
            vec![pam_points(side), pam_points(side)],
            UnitKind::RotatedQam { m, theta },
        )
    }

    pub fn linear(symbols: Vec<usize>, precoder: DMatrix<f64>, points: Vec<Vec<f64>>) -> Result<Self> {
        EncodingUnit::new(symbols, precoder, points, UnitKind::Linear)
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn precoder(&self) -> &DMatrix<f64> {
        &self.precoder
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn kind(&self) -> &UnitKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalSet {
    k: usize,
    units: Vec<EncodingUnit>,
    unit_of: Vec<usize>,
}

impl SignalSet {
    /// Units must cover symbols `0..k` exactly once.
    pub fn new(k: usize, units: Vec<EncodingUnit>) -> Result<SignalSet> {
        let mut unit_of = vec![usize::MAX; k];
        for (u, unit) in units.iter().enumerate() {
            for &s in &unit.symbols {
                if s >= k {
                    return Err(Error::Signal(format!("symbol {} out of range 1..={k}", s + 1)));
                }
                if unit_of[s] != usize::MAX {
                    return Err(Error::Signal(format!("symbol {} encoded twice", s + 1)));
                }
                unit_of[s] = u;
            }
        }
        if let Some(s) = unit_of.iter().position(|&u| u == usize::MAX) {
            return Err(Error::Signal(format!("symbol {} has no constellation", s + 1)));
        }
        Ok(SignalSet { k, units, unit_of })
    }

    /// Independent `q`-PAM on every symbol.
    pub fn per_symbol_pam(k: usize, q: usize) -> Result<SignalSet> {
        let units = (0..k).map(|i| EncodingUnit::pam(i, pam_points(q))).collect::<Result<_>>()?;
        SignalSet::new(k, units)
    }

    /// Rotated `M`-QAM on each pair, one angle per pair.
    pub fn rotated_pairs(k: usize, pairs: &[(usize, usize)], m: u32, thetas: &[f64]) -> Result<SignalSet> {
        if pairs.len() != thetas.len() {
            return Err(Error::Signal(format!("{} pairs but {} angles", pairs.len(), thetas.len())));
        }
        let units = pairs
            .iter()
            .zip(thetas)
            .map(|(&(i, j), &t)| EncodingUnit::rotated_qam(i, j, m, t))
            .collect::<Result<_>>()?;
        SignalSet::new(k, units)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn units(&self) -> &[EncodingUnit] {
        &self.units
    }

    pub fn unit_of(&self, symbol: usize) -> usize {
        self.unit_of[symbol]
    }

    /// Sizes of every component constellation, units in order.
    pub fn component_sizes(&self) -> Vec<usize> {
        self.units.iter().flat_map(|u| u.points.iter().map(Vec::len)).collect()
    }

    /// Global index of the first component of each unit.
    pub fn unit_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.units.len());
        let mut acc = 0;
        for u in &self.units {
            off.push(acc);
            acc += u.dim();
        }
        off
    }

    /// Number of codewords, saturating at `u128::MAX`.
    pub fn codebook_size(&self) -> u128 {
        self.component_sizes().iter().fold(1u128, |a, &q| a.saturating_mul(q as u128))
    }

    /// Symbol values for one choice of component values (global component order).
    pub fn symbol_values(&self, components: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.k];
        let mut c = 0;
        for u in &self.units {
            let d = u.dim();
            for (i, &s) in u.symbols.iter().enumerate() {
                x[s] = (0..d).map(|j| u.precoder[(i, j)] * components[c + j]).sum();
            }
            c += d;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pam_is_centered_unit_spaced() {
        assert_eq!(pam_points(2), vec![-0.5, 0.5]);
        assert_eq!(pam_points(4), vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(qam_side(16).unwrap(), 4);
        assert!(qam_side(8).is_err());
        assert!(qam_side(1).is_err());
    }

    #[test]
    fn rotated_pair_values() {
        let u = EncodingUnit::rotated_qam(0, 1, 4, std::f64::consts::FRAC_PI_2).unwrap();
        let s = SignalSet::new(2, vec![u]).unwrap();
        // e^{iπ/2}(0.5 + 0.5i) = -0.5 + 0.5i
        let x = s.symbol_values(&[0.5, 0.5]);
        assert!((x[0] + 0.5).abs() < 1e-12 && (x[1] - 0.5).abs() < 1e-12);
        assert_eq!(s.codebook_size(), 4);
    }

    #[test]
    fn validation() {
        assert!(SignalSet::per_symbol_pam(3, 2).is_ok());
        let u = EncodingUnit::pam(0, vec![0.0, 1.0]).unwrap();
        assert!(SignalSet::new(2, vec![u.clone()]).is_err());
        assert!(SignalSet::new(1, vec![u.clone(), u]).is_err());
        assert!(EncodingUnit::pam(0, vec![1.0, 0.0]).is_err());
        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(EncodingUnit::linear(vec![0, 1], skew, vec![vec![0.0], vec![0.0]]).is_err());
    }
}
