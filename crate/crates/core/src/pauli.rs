//! Matrix realization of F2 ⊕ F4^m.
//!
//! Each coordinate maps to one Kronecker factor:
//!
//! | ξ  | factor | matrix           |
//! |----|--------|------------------|
//! | 0  | I      | `[[1,0],[0,1]]`  |
//! | 1  | iX     | `[[0,i],[i,0]]`  |
//! | ω  | iZ     | `[[i,0],[0,-i]]` |
//! | ω² | ZX     | `[[0,1],[-1,0]]` |
//!
//! and `[λ | ξ1..ξm]` maps to `i^λ · F(ξ1) ⊗ … ⊗ F(ξm)`.

use crate::error::{Error, Result};
use crate::f4::{enumerate_unchecked, F4Vec, F4};
use crate::matrix::{ComplexMatrix, C64, I};

/// Tolerance for comparisons of matrices with entries in {0, ±1, ±i}.
pub const TOL: f64 = 1e-9;

/// Largest `m` for the exhaustive fallback in [`phi`].
const FALLBACK_MAX_M: usize = 6;

pub fn psi_inv(e: F4) -> ComplexMatrix {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let rows = match e {
        F4::ZERO => [[o, z], [z, o]],
        F4::ONE => [[z, I], [I, z]],
        F4::W => [[I, z], [z, -I]],
        _ => [[z, o], [-o, z]],
    };
    ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()])
}

pub fn phi_inv(v: &F4Vec) -> ComplexMatrix {
    let scalar = if v.lambda() { I } else { C64::new(1.0, 0.0) };
    let mut acc = ComplexMatrix::from_rows(&[vec![scalar]]);
    for &x in v.xs() {
        acc = acc.kron(&psi_inv(x));
    }
    acc
}

/// The vector `y` with `phi_inv(y) == a`.
pub fn phi(a: &ComplexMatrix) -> Result<F4Vec> {
    let m = dimension_log2(a)?;
    if let Some(y) = extract_factors(a, m) {
        if phi_inv(&y).approx_eq(a, TOL) {
            return Ok(y);
        }
    }
    if m <= FALLBACK_MAX_M {
        if let Some(y) = enumerate_unchecked(m).into_iter().find(|y| phi_inv(y).approx_eq(a, TOL)) {
            return Ok(y);
        }
    }
    Err(Error::NotInBasis)
}

/// `(y, s)` with `a == s·phi_inv(y)` and `s = ±1`.
pub fn phi_signed(a: &ComplexMatrix) -> Result<(F4Vec, i8)> {
    match phi(a) {
        Ok(y) => Ok((y, 1)),
        Err(_) => phi(&-a).map(|y| (y, -1)),
    }
}

fn dimension_log2(a: &ComplexMatrix) -> Result<usize> {
    let n = a.rows();
    if !a.is_square() || n == 0 || !n.is_power_of_two() {
        return Err(Error::NotInBasis);
    }
    Ok(n.trailing_zeros() as usize)
}

// Reads each factor off row 0: the column of its nonzero entry gives the
// diagonal/anti-diagonal pattern, and flipping that factor's row and column
// bit gives the ratio +1 (I, iX) or -1 (iZ, ZX).
fn extract_factors(a: &ComplexMatrix, m: usize) -> Option<F4Vec> {
    let n = a.rows();
    let c0 = (0..n).find(|&c| a.get(0, c).norm() > 0.5)?;
    let base = a.get(0, c0);
    let mut xs = Vec::with_capacity(m);
    let mut scalar = base;
    for k in 0..m {
        let bit = 1 << (m - 1 - k);
        let off_diag = c0 & bit != 0;
        let ratio = a.get(bit, c0 ^ bit) / base;
        let plus = if (ratio - 1.0).norm() < 1e-6 {
            true
        } else if (ratio + 1.0).norm() < 1e-6 {
            false
        } else {
            return None;
        };
        let (x, top) = match (off_diag, plus) {
            (false, true) => (F4::ZERO, C64::new(1.0, 0.0)),
            (false, false) => (F4::W, I),
            (true, true) => (F4::ONE, I),
            (true, false) => (F4::W2, C64::new(1.0, 0.0)),
        };
        xs.push(x);
        scalar /= top;
    }
    let lambda = if (scalar - 1.0).norm() < 1e-6 {
        false
    } else if (scalar - I).norm() < 1e-6 {
        true
    } else {
        return None;
    };
    Some(F4Vec::new(lambda, xs))
}

pub fn is_hermitian_parity(v: &F4Vec) -> bool {
    v.weight() % 2 == 0
}

pub fn is_hermitian_numeric(a: &ComplexMatrix, tol: f64) -> bool {
    a.is_square() && (a - &a.adjoint()).frobenius_norm() < tol
}

/// Whether the realizations of `v1` and `v2` satisfy `AᴴB + BᴴA = 0`, read off
/// the parity of `wt(v1 + v2)`.
pub fn anticommute_parity(v1: &F4Vec, v2: &F4Vec) -> Result<bool> {
    Ok(v1.add(v2)?.is_odd())
}

pub fn hr_orthogonal_numeric(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    check_same_square(a, b)?;
    let s = &(&a.adjoint() * b) + &(&b.adjoint() * a);
    Ok(s.frobenius_norm() < tol)
}

/// `Re Tr(AᴴB)`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_same_square(a, b)?;
    Ok(a.inner_re(b))
}

fn check_same_square(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(a.rows(), a.cols()));
    }
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(a.rows(), b.rows()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f4::enumerate_all;

    fn v(s: &str) -> F4Vec {
        s.parse().unwrap()
    }

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real(rows)
    }

    #[test]
    fn factor_table() {
        assert_eq!(psi_inv(F4::ZERO), ComplexMatrix::identity(2));
        let ix = ComplexMatrix::from_rows(&[vec![C64::new(0.0, 0.0), I], vec![I, C64::new(0.0, 0.0)]]);
        assert_eq!(psi_inv(F4::ONE), ix);
        assert_eq!(psi_inv(F4::W2), real(&[&[0.0, 1.0], &[-1.0, 0.0]]));
    }

    #[test]
    fn realizations_by_hand() {
        let x = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(phi_inv(&v("0|0,0")), ComplexMatrix::identity(4));
        assert!(phi_inv(&v("1|1,1")).approx_eq(&x.kron(&x).scale(-I), TOL));
        assert!(phi_inv(&v("0|w,w")).approx_eq(&z.kron(&z).scale_re(-1.0), TOL));
    }

    #[test]
    fn phi_inverts() {
        let x = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(phi(&ComplexMatrix::identity(4)).unwrap(), v("0|0,0"));
        assert_eq!(phi(&x.kron(&x).scale(-I)).unwrap(), v("1|1,1"));
        assert_eq!(phi(&x.kron(&x)), Err(Error::NotInBasis));
        assert_eq!(phi_signed(&x.kron(&x)).unwrap(), (v("0|1,1"), -1));
        assert!(phi(&ComplexMatrix::identity(3)).is_err());
        let mut bad = ComplexMatrix::identity(2);
        bad.set(0, 1, C64::new(1.0, 0.0));
        assert!(phi(&bad).is_err());
        for m in 1..=3 {
            for y in enumerate_all(m).unwrap() {
                assert_eq!(phi(&phi_inv(&y)).unwrap(), y);
            }
        }
    }

    #[test]
    fn hermitian_parity_examples() {
        assert!(is_hermitian_parity(&v("0|0,0")));
        assert!(!is_hermitian_parity(&v("0|1")));
        assert!(!is_hermitian_parity(&v("1|w,w")));
        assert!(!is_hermitian_numeric(&phi_inv(&v("1|w,w")), TOL));
    }

    #[test]
    fn anticommute_examples() {
        assert!(anticommute_parity(&v("0|1"), &v("0|w")).unwrap());
        assert!(!anticommute_parity(&v("0|1"), &v("0|1")).unwrap());
        assert!(anticommute_parity(&v("0|0,w2"), &v("1|w2,w")).unwrap());
        assert!(hr_orthogonal_numeric(&phi_inv(&v("0|0,w2")), &phi_inv(&v("1|w2,w")), TOL).unwrap());
        assert!(anticommute_parity(&v("0|1"), &v("0|1,1")).is_err());
    }

    #[test]
    fn numeric_hr_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert!(hr_orthogonal_numeric(&i2, &psi_inv(F4::ONE), TOL).unwrap());
        assert!(!hr_orthogonal_numeric(&i2, &i2, TOL).unwrap());
        let a = phi_inv(&v("0|w,0"));
        let b = phi_inv(&v("0|0,w"));
        assert!(!hr_orthogonal_numeric(&a, &b, TOL).unwrap());
        assert!(hr_orthogonal_numeric(&i2, &ComplexMatrix::identity(4), TOL).is_err());
    }

    #[test]
    fn trace_inner_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(trace_inner(&i4, &i4).unwrap(), 4.0);
        assert_eq!(trace_inner(&phi_inv(&v("0|1")), &phi_inv(&v("0|w"))).unwrap(), 0.0);
        for m in 1..=3 {
            for y in enumerate_all(m).unwrap() {
                let a = phi_inv(&y);
                assert!((trace_inner(&a, &a).unwrap() - f64::from(1u32 << m)).abs() < TOL);
            }
        }
    }

    #[test]
    fn realizations_are_unitary() {
        for m in 1..=3 {
            for y in enumerate_all(m).unwrap() {
                assert!(phi_inv(&y).is_unitary(TOL));
            }
        }
    }

    #[test]
    fn vectorized_gram_is_scalar() {
        for m in 1..=3 {
            let mats: Vec<_> = enumerate_all(m).unwrap().iter().map(phi_inv).collect();
            let n = f64::from(1u32 << m);
            for (i, a) in mats.iter().enumerate() {
                for (j, b) in mats.iter().enumerate() {
                    let want = if i == j { n } else { 0.0 };
                    assert!((a.inner_re(b) - want).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn one_by_one_case() {
        let y = F4Vec::new(true, vec![]);
        let a = phi_inv(&y);
        assert_eq!(a.get(0, 0), I);
        assert_eq!(phi(&a).unwrap(), y);
    }
}
