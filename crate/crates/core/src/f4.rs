//! Arithmetic over GF(4) and vectors in F2 ⊕ F4^m.
//!
//! Elements are stored in two bits so that addition is XOR:
//!
//! | element | bits | text |
//! |---------|------|------|
//! | 0       | 00   | `0`  |
//! | 1       | 01   | `1`  |
//! | ω       | 10   | `w`  |
//! | ω²      | 11   | `w2` |

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `m` accepted by [`enumerate_all`].
pub const MAX_ENUM_M: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F4(u8);

impl F4 {
    pub const ZERO: F4 = F4(0);
    pub const ONE: F4 = F4(1);
    pub const W: F4 = F4(2);
    pub const W2: F4 = F4(3);
    pub const ALL: [F4; 4] = [F4::ZERO, F4::ONE, F4::W, F4::W2];

    pub fn from_bits(bits: u8) -> Option<F4> {
        (bits < 4).then_some(F4(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// ω^l, with exponents taken mod 3.
    pub fn omega_pow(l: u32) -> F4 {
        [F4::ONE, F4::W, F4::W2][(l % 3) as usize]
    }

    pub fn symbol(self) -> &'static str {
        ["0", "1", "w", "w2"][self.0 as usize]
    }

    // discrete log base ω of a nonzero element
    fn log(self) -> u8 {
        match self.0 {
            1 => 0,
            2 => 1,
            3 => 2,
            _ => unreachable!("log of zero"),
        }
    }
}

impl Add for F4 {
    type Output = F4;
    // characteristic 2: addition is XOR of the bit pairs
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: F4) -> F4 {
        F4(self.0 ^ rhs.0)
    }
}

impl Mul for F4 {
    type Output = F4;
    fn mul(self, rhs: F4) -> F4 {
        if self.is_zero() || rhs.is_zero() {
            return F4::ZERO;
        }
        F4::omega_pow(u32::from(self.log() + rhs.log()))
    }
}

impl fmt::Display for F4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for F4 {
    type Err = Error;
    fn from_str(s: &str) -> Result<F4> {
        match s.trim() {
            "0" => Ok(F4::ZERO),
            "1" => Ok(F4::ONE),
            "w" | "ω" => Ok(F4::W),
            "w2" | "ω²" => Ok(F4::W2),
            other => Err(Error::Parse(format!("bad F4 element '{other}'"))),
        }
    }
}

/// An element `[λ | ξ1, …, ξm]` of F2 ⊕ F4^m.
///
/// The derived order compares `λ` first and then the coordinates
/// lexicographically with 0 < 1 < ω < ω².
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F4Vec {
    lambda: bool,
    xs: Vec<F4>,
}

impl F4Vec {
    pub fn new(lambda: bool, xs: Vec<F4>) -> F4Vec {
        F4Vec { lambda, xs }
    }

    pub fn zero(m: usize) -> F4Vec {
        F4Vec::new(false, vec![F4::ZERO; m])
    }

    /// `[1 | 0, …, 0]`.
    pub fn delta(m: usize) -> F4Vec {
        F4Vec::new(true, vec![F4::ZERO; m])
    }

    pub fn m(&self) -> usize {
        self.xs.len()
    }

    pub fn lambda(&self) -> bool {
        self.lambda
    }

    pub fn xs(&self) -> &[F4] {
        &self.xs
    }

    pub fn weight(&self) -> usize {
        usize::from(self.lambda) + self.xs.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn is_odd(&self) -> bool {
        self.weight() % 2 == 1
    }

    pub fn add(&self, other: &F4Vec) -> Result<F4Vec> {
        if self.m() != other.m() {
            return Err(Error::DimensionMismatch(self.m(), other.m()));
        }
        let xs = self.xs.iter().zip(&other.xs).map(|(&a, &b)| a + b).collect();
        Ok(F4Vec::new(self.lambda ^ other.lambda, xs))
    }

    /// `[λ | ξ1, …, ξm, x]`.
    pub fn append(&self, x: F4) -> F4Vec {
        let mut xs = self.xs.clone();
        xs.push(x);
        F4Vec::new(self.lambda, xs)
    }

    pub fn flip_lambda(&self) -> F4Vec {
        F4Vec::new(!self.lambda, self.xs.clone())
    }

    /// New coordinate `k` is old coordinate `sigma[k]` (0-based).
    pub fn permute(&self, sigma: &[usize]) -> Result<F4Vec> {
        check_permutation(sigma, self.m())?;
        Ok(F4Vec::new(self.lambda, sigma.iter().map(|&s| self.xs[s]).collect()))
    }
}

impl Add for &F4Vec {
    type Output = F4Vec;

    /// Panics if the lengths differ; use [`F4Vec::add`] for a checked sum.
    fn add(self, rhs: &F4Vec) -> F4Vec {
        F4Vec::add(self, rhs).expect("F4Vec length mismatch")
    }
}

impl fmt::Display for F4Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|", u8::from(self.lambda))?;
        for (i, x) in self.xs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl FromStr for F4Vec {
    type Err = Error;
    fn from_str(s: &str) -> Result<F4Vec> {
        let (head, tail) = s
            .trim()
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("missing '|' in '{s}'")))?;
        let lambda = match head.trim() {
            "0" => false,
            "1" => true,
            other => return Err(Error::Parse(format!("bad lambda '{other}'"))),
        };
        if tail.trim().is_empty() {
            return Err(Error::Parse(format!("empty coordinate list in '{s}'")));
        }
        let xs = tail.split(',').map(F4::from_str).collect::<Result<Vec<_>>>()?;
        Ok(F4Vec::new(lambda, xs))
    }
}

pub fn check_permutation(sigma: &[usize], m: usize) -> Result<()> {
    if sigma.len() != m {
        return Err(Error::Precondition(format!(
            "permutation has {} entries, expected {m}",
            sigma.len()
        )));
    }
    let mut seen = vec![false; m];
    for &s in sigma {
        if s >= m || seen[s] {
            return Err(Error::Precondition(format!("{sigma:?} is not a permutation")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// All `2·4^m` vectors of F2 ⊕ F4^m in increasing order.
pub fn enumerate_all(m: usize) -> Result<Vec<F4Vec>> {
    if !(1..=MAX_ENUM_M).contains(&m) {
        return Err(Error::OutOfRange(format!("m = {m}, expected 1..={MAX_ENUM_M}")));
    }
    Ok(enumerate_unchecked(m))
}

pub(crate) fn enumerate_unchecked(m: usize) -> Vec<F4Vec> {
    let count = 2usize << (2 * m);
    (0..count)
        .map(|i| {
            let lambda = (i >> (2 * m)) & 1 == 1;
            let xs = (0..m)
                .map(|k| F4((i >> (2 * (m - 1 - k))) as u8 & 3))
                .collect();
            F4Vec::new(lambda, xs)
        })
        .collect()
}
