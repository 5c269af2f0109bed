//! Generator matrices, cubic shaping, rotation-angle search and
//! full-diversity constellations.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear::LinearDesign;
use crate::matrix::{det_in_place, ComplexMatrix, C64};
use crate::signal::{pam_points, qam_side, rotation};
use crate::stbc::Stbc;

/// Certification threshold on `min |det ΔC|`.
pub const DET_THRESHOLD: f64 = 1e-8;
/// Largest codebook checked exhaustively.
pub const MAX_CODEBOOK: u128 = 100_000;
pub const DEFAULT_GRID: usize = 720;
const REFINEMENTS: usize = 3;
const GROWTH_ATTEMPTS: usize = 1000;
const SAMPLE_BOUND: f64 = 10.0;

/// `G·Q` where the columns of `G` stack `vec(Re A_i)` over `vec(Im A_i)`.
pub fn generator_matrix(ld: &LinearDesign, q: Option<&DMatrix<f64>>) -> Result<DMatrix<f64>> {
    let g = ld.real_generator();
    match q {
        None => Ok(g),
        Some(q) => {
            if q.nrows() != ld.k() || q.ncols() != ld.k() {
                return Err(Error::DimensionMismatch(q.nrows(), ld.k()));
            }
            Ok(g * q)
        }
    }
}

/// `‖GᵀG − a·I‖_F < tol` with `a` the mean diagonal entry.
pub fn cubic_shaping_check(g: &DMatrix<f64>, tol: f64) -> bool {
    let gram = g.transpose() * g;
    let k = gram.nrows();
    if k == 0 {
        return true;
    }
    let a = gram.trace() / k as f64;
    a > 0.0 && (gram - DMatrix::identity(k, k) * a).norm() < tol
}

/// Distinct values `a − b`, ascending.
fn differences(points: &[f64]) -> Vec<f64> {
    let mut d: Vec<f64> = points.iter().flat_map(|a| points.iter().map(move |b| a - b)).collect();
    d.sort_by(f64::total_cmp);
    d.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    d
}

pub(crate) fn product_len(lists: &[Vec<f64>]) -> u128 {
    lists.iter().fold(1u128, |a, l| a.saturating_mul(l.len() as u128))
}

/// Difference matrices `Σ δ_j B_j` over all nonzero difference vectors whose
/// first nonzero entry is positive, plus the zero matrix.
/// `n` is the matrix size, needed when there are no components yet.
pub fn half_differences(n: usize, components: &[ComplexMatrix], points: &[Vec<f64>]) -> Result<Vec<ComplexMatrix>> {
    let diffs: Vec<Vec<f64>> = points.iter().map(|p| differences(p)).collect();
    let total = product_len(&diffs);
    if total > 50_000_000 {
        return Err(Error::CodebookTooLarge(product_len(points)));
    }
    let mut out = vec![ComplexMatrix::zeros(n, n)];
    let mut digits = vec![0usize; diffs.len()];
    for _ in 0..total {
        let first = digits.iter().zip(&diffs).map(|(&d, l)| l[d]).find(|v| *v != 0.0);
        if first.is_some_and(|v| v > 0.0) {
            let mut m = ComplexMatrix::zeros(n, n);
            for ((&d, l), b) in digits.iter().zip(&diffs).zip(components) {
                if l[d] != 0.0 {
                    m.add_scaled(l[d], b);
                }
            }
            out.push(m);
        }
        for j in (0..digits.len()).rev() {
            digits[j] += 1;
            if digits[j] < diffs[j].len() {
                break;
            }
            digits[j] = 0;
        }
    }
    Ok(out)
}

fn abs_det(m: &ComplexMatrix, buf: &mut Vec<C64>) -> f64 {
    buf.clear();
    buf.extend_from_slice(m.data());
    det_in_place(m.rows(), buf).norm()
}

fn min_det_for_angle(prior: &[ComplexMatrix], a1: &ComplexMatrix, a2: &ComplexMatrix, pair: &[f64], theta: f64) -> f64 {
    let r = rotation(theta);
    let mut buf = Vec::new();
    let mut best = f64::INFINITY;
    let mut delta = ComplexMatrix::zeros(a1.rows(), a1.cols());
    for (pi, p) in prior.iter().enumerate() {
        for &da in pair {
            for &db in pair {
                if pi == 0 && da == 0.0 && db == 0.0 {
                    continue;
                }
                let u = r[(0, 0)] * da + r[(0, 1)] * db;
                let v = r[(1, 0)] * da + r[(1, 1)] * db;
                delta.clone_from(p);
                delta.add_scaled(u, a1);
                delta.add_scaled(v, a2);
                best = best.min(abs_det(&delta, &mut buf));
            }
        }
    }
    best
}

/// Angle for a new rotated `M`-QAM pair with weight matrices `a1, a2` added
/// to a prior code given by its [`half_differences`]. Searches a uniform
/// grid over `(0, π/2]` (a square QAM is invariant under quarter turns),
/// refining up to three times, and returns the grid angle with the largest
/// minimum determinant, with its value.
pub fn rotation_search(
    prior: &[ComplexMatrix],
    a1: &ComplexMatrix,
    a2: &ComplexMatrix,
    m: u32,
    grid: usize,
) -> Result<(f64, f64)> {
    let n = a1.rows();
    let c2 = a1 + &a2.scale(C64::new(0.0, 1.0));
    if c2.rank(1e-8) != n {
        return Err(Error::Precondition("A1 + iA2 is not full rank".into()));
    }
    if prior.first().is_none_or(|p| p.frobenius_norm() != 0.0) {
        return Err(Error::Precondition("prior differences must start with the zero matrix".into()));
    }
    let pair = differences(&pam_points(qam_side(m)?));
    let mut size = grid.max(4);
    for _ in 0..=REFINEMENTS {
        let steps = size / 4;
        let (k, val) = (1..=steps)
            .into_par_iter()
            .map(|k| (k, min_det_for_angle(prior, a1, a2, &pair, TAU * k as f64 / size as f64)))
            .reduce(|| (usize::MAX, f64::NEG_INFINITY), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
        if val > DET_THRESHOLD {
            return Ok((TAU * k as f64 / size as f64, val));
        }
        size *= 4;
    }
    Err(Error::NoFullDiversity)
}

/// Minimum `|det|` over all nonzero difference vectors of independent
/// component constellations.
pub fn min_det_components(components: &[ComplexMatrix], points: &[Vec<f64>]) -> Result<f64> {
    let size = product_len(points);
    if size > MAX_CODEBOOK {
        return Err(Error::CodebookTooLarge(size));
    }
    if size <= 1 {
        return Ok(f64::INFINITY);
    }
    let n = components[0].rows();
    let diffs: Vec<Vec<f64>> = points.iter().map(|p| differences(p)).collect();
    let total = product_len(&diffs) as u64;
    let radices: Vec<u64> = diffs.iter().map(|d| d.len() as u64).collect();
    const CHUNK: u64 = 4096;
    let min = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut best = f64::INFINITY;
            let mut buf = Vec::new();
            let mut vals = vec![0.0; radices.len()];
            for mut idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                for j in (0..radices.len()).rev() {
                    vals[j] = diffs[j][(idx % radices[j]) as usize];
                    idx /= radices[j];
                }
                if vals.iter().find(|v| **v != 0.0).is_some_and(|v| *v > 0.0) {
                    let mut m = ComplexMatrix::zeros(n, n);
                    for (v, b) in vals.iter().zip(components) {
                        if *v != 0.0 {
                            m.add_scaled(*v, b);
                        }
                    }
                    best = best.min(abs_det(&m, &mut buf));
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(min)
}

/// `min |det(C_a − C_b)|` over the whole codebook.
pub fn full_diversity_check(stbc: &Stbc) -> Result<f64> {
    min_det_components(stbc.components(), stbc.component_points())
}

/// Same minimum by enumerating every pair of codewords.
pub fn full_diversity_check_pairwise(stbc: &Stbc) -> Result<f64> {
    let size = stbc.size();
    if size > MAX_CODEBOOK {
        return Err(Error::CodebookTooLarge(size));
    }
    let words: Vec<ComplexMatrix> = (0..size).map(|i| stbc.codeword(i)).collect();
    let min = (0..words.len())
        .into_par_iter()
        .map(|a| {
            let mut buf = Vec::new();
            words[a + 1..].iter().map(|w| abs_det(&(&words[a] - w), &mut buf)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(min)
}

/// Best common angle for a code built by `build(θ)`, judged by the exhaustive
/// check on a quarter-turn grid.
pub fn common_angle_search<F>(build: F, grid: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<Stbc>,
{
    let steps = grid.max(4) / 4;
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 1..=steps {
        let theta = TAU * k as f64 / grid as f64;
        let v = full_diversity_check(&build(theta)?)?;
        if v > best.1 {
            best = (theta, v);
        }
    }
    if best.1 > DET_THRESHOLD {
        Ok(best)
    } else {
        Err(Error::NoFullDiversity)
    }
}

fn check_full_rank(ld: &LinearDesign) -> Result<()> {
    let n = ld.n();
    for i in 0..ld.k() {
        if ld.matrix(i).rank(1e-8) != n {
            return Err(Error::SingularWeight(i + 1));
        }
    }
    Ok(())
}

fn grow_from(ld: &LinearDesign, mut points: Vec<Vec<f64>>, sizes: &[usize], seed: u64) -> Result<Vec<Vec<f64>>> {
    let k = ld.k();
    let start = points.len();
    let total = product_len(&points).saturating_mul(sizes.iter().fold(1u128, |a, &q| a.saturating_mul(q as u128)));
    if total > MAX_CODEBOOK {
        return Err(Error::CodebookTooLarge(total));
    }
    if sizes.contains(&0) {
        return Err(Error::OutOfRange("constellation sizes must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mats: Vec<ComplexMatrix> = (0..k).map(|i| ld.matrix(i).clone()).collect();
    for (offset, &q) in sizes.iter().enumerate() {
        let s = start + offset;
        let prior = half_differences(ld.n(), &mats[..s], &points)?;
        let mut own: Vec<f64> = Vec::with_capacity(q);
        let mut buf = Vec::new();
        while own.len() < q {
            let mut accepted = false;
            for _ in 0..GROWTH_ATTEMPTS {
                let cand: f64 = rng.random_range(-SAMPLE_BOUND..SAMPLE_BOUND);
                if own.iter().any(|a| (a - cand).abs() < 1e-6) {
                    continue;
                }
                let ok = own.iter().all(|a| {
                    let d = cand - a;
                    prior.iter().all(|p| {
                        [d, -d].iter().all(|&dd| {
                            let mut m = p.clone();
                            m.add_scaled(dd, &mats[s]);
                            abs_det(&m, &mut buf) > DET_THRESHOLD
                        })
                    })
                });
                if ok {
                    own.push(cand);
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                return Err(Error::GrowthFailed(s + 1));
            }
        }
        own.sort_by(f64::total_cmp);
        points.push(own);
    }
    let min = min_det_components(&mats, &points)?;
    if min <= DET_THRESHOLD {
        return Err(Error::GrowthFailed(k));
    }
    Ok(points)
}

/// Real constellations of the given sizes, one per symbol, making the single
/// real symbol encodable code fully diverse. Points are drawn from
/// `[−10, 10]` by a seeded sampler and accepted when every new codeword
/// difference is nonsingular.
pub fn grow_constellation(ld: &LinearDesign, sizes: &[usize], seed: u64) -> Result<Vec<Vec<f64>>> {
    if sizes.len() != ld.k() {
        return Err(Error::DimensionMismatch(sizes.len(), ld.k()));
    }
    check_full_rank(ld)?;
    grow_from(ld, Vec::new(), sizes, seed)
}

/// Keeps the given constellations for the first `pam_sets.len()` symbols,
/// whose weight matrices must satisfy `A_i^H A_j + A_j^H A_i = 2·1{i=j}·I`,
/// and grows the remaining ones with sizes `rest`.
pub fn grow_with_pam_prefix(ld: &LinearDesign, pam_sets: &[Vec<f64>], rest: &[usize], seed: u64) -> Result<Vec<Vec<f64>>> {
    let l = pam_sets.len();
    if l + rest.len() != ld.k() {
        return Err(Error::DimensionMismatch(l + rest.len(), ld.k()));
    }
    let n = ld.n();
    let two_i = ComplexMatrix::identity(n).scale_re(2.0);
    for i in 0..l {
        for j in i..l {
            let (a, b) = (ld.matrix(i), ld.matrix(j));
            let s = &(&a.adjoint() * b) + &(&b.adjoint() * a);
            let want = if i == j { two_i.clone() } else { ComplexMatrix::zeros(n, n) };
            if !s.approx_eq(&want, 1e-9) {
                return Err(Error::Precondition(format!(
                    "weight matrices {} and {} violate the Hurwitz-Radon equations",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    for (i, p) in pam_sets.iter().enumerate() {
        if p.is_empty() || p.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Signal(format!("constellation {} must be strictly increasing", i + 1)));
        }
    }
    if l < ld.k() {
        let tail = LinearDesign::from_matrices((l..ld.k()).map(|i| ld.matrix(i).clone()).collect())?;
        check_full_rank(&tail).map_err(|e| match e {
            Error::SingularWeight(i) => Error::SingularWeight(i + l),
            other => other,
        })?;
    }
    grow_from(ld, pam_sets.to_vec(), rest, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::Design;

    fn alamouti() -> LinearDesign {
        Design::new(1, ["0|0", "0|1", "0|w", "0|w2"].iter().map(|s| s.parse().unwrap()).collect())
            .unwrap()
            .to_linear_design()
    }

    fn diag(a: C64, b: C64) -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![a, C64::new(0.0, 0.0)], vec![C64::new(0.0, 0.0), b]])
    }

    #[test]
    fn alamouti_gram_and_shaping() {
        let g = generator_matrix(&alamouti(), None).unwrap();
        let gram = g.transpose() * &g;
        assert!((gram - DMatrix::identity(4, 4) * 2.0).norm() < 1e-12);
        assert!(cubic_shaping_check(&g, 1e-9));
        let bad = LinearDesign::from_matrices(vec![
            ComplexMatrix::identity(2),
            &ComplexMatrix::identity(2) + &alamouti().matrix(1).clone(),
        ])
        .unwrap();
        assert!(!cubic_shaping_check(&generator_matrix(&bad, None).unwrap(), 1e-9));
    }

    #[test]
    fn ciod_pairs_need_rotation() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let (a11, a12) = (diag(one, zero), diag(zero, one));
        let (a21, a22) = (diag(i, zero), diag(zero, i));
        let zero_prior = vec![ComplexMatrix::zeros(2, 2)];
        let (t1, v1) = rotation_search(&zero_prior, &a11, &a12, 4, DEFAULT_GRID).unwrap();
        assert!(v1 > DET_THRESHOLD);
        let pts = |t: f64| {
            let r = rotation(t);
            let p = pam_points(2);
            // components after rotation are not independent, so enumerate the pair codebook
            let mut words = Vec::new();
            for &a in &p {
                for &b in &p {
                    words.push((r[(0, 0)] * a + r[(0, 1)] * b, r[(1, 0)] * a + r[(1, 1)] * b));
                }
            }
            words
        };
        let mut prior = vec![ComplexMatrix::zeros(2, 2)];
        let w1 = pts(t1);
        for (x, y) in &w1 {
            for (u, v) in &w1 {
                let mut m = ComplexMatrix::zeros(2, 2);
                m.add_scaled(x - u, &a11);
                m.add_scaled(y - v, &a12);
                if m.frobenius_norm() > 0.0 {
                    prior.push(m);
                }
            }
        }
        let (t2, _) = rotation_search(&prior, &a21, &a22, 4, DEFAULT_GRID).unwrap();
        let w2 = pts(t2);
        let mut words = Vec::new();
        for (x, y) in &w1 {
            for (u, v) in &w2 {
                let mut m = ComplexMatrix::zeros(2, 2);
                m.add_scaled(*x, &a11);
                m.add_scaled(*y, &a12);
                m.add_scaled(*u, &a21);
                m.add_scaled(*v, &a22);
                words.push(m);
            }
        }
        let mut min = f64::INFINITY;
        for a in 0..16 {
            for b in 0..16 {
                if a != b {
                    min = min.min((&words[a] - &words[b]).det().unwrap().norm());
                }
            }
        }
        assert!(min > DET_THRESHOLD, "{min}");
        assert!(rotation_search(&zero_prior, &a11, &a21, 4, DEFAULT_GRID).is_err());
    }

    #[test]
    fn growth_certifies() {
        let pts = grow_constellation(&alamouti(), &[2, 2, 2, 2], 7).unwrap();
        assert!(pts.iter().all(|p| p.len() == 2));
        let mats: Vec<ComplexMatrix> = (0..4).map(|i| alamouti().matrix(i).clone()).collect();
        assert!(min_det_components(&mats, &pts).unwrap() > DET_THRESHOLD);
        let singular = LinearDesign::from_matrices(vec![ComplexMatrix::identity(2), diag(C64::new(1.0, 0.0), C64::new(0.0, 0.0))]).unwrap();
        assert_eq!(grow_constellation(&singular, &[2, 2], 1), Err(Error::SingularWeight(2)));
    }

    #[test]
    fn differences_are_distinct() {
        assert_eq!(differences(&[-0.5, 0.5]), vec![-1.0, 0.0, 1.0]);
        assert_eq!(differences(&pam_points(4)).len(), 7);
    }
}
