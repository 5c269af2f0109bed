//! The fast(-group)-decodable family for `2^m` antennas and any rate `R ≥ 1`.
//!
//! For `m ≥ 2` the base design has subsets
//!
//! ```text
//! S_A = even vectors of {[0|ζ] : ζ_i ∈ {0, ω}}     S_B = the odd ones
//! S_C = ν + S_A    S_D = ν + S_B    S_E = δ + S_A   ν = [1{m even} | ξ2, …, ξ2]
//! ```
//!
//! with `S1 = S_A` and `S2 = S_B ∪ S_C ∪ S_D ∪ S_E` (rate 5/4). Lower rates drop
//! pairs `{y, y+t}` from `S_E`, higher rates add a `t`-closed set `O` from the
//! complement, `t = [0|0, …, 0, ω, ω]`. Symbols are sent in pairs
//! `x_y + i·x_{y+t}` from rotated QAM. For `m = 1` the Silver code is punctured.

use num_rational::Rational64;

use crate::catalog::{silver_ld, silver_pairing};
use crate::design::{validate_partition, Design, Group};
use crate::diversity::{grow_with_pam_prefix, half_differences, product_len, rotation_search, DEFAULT_GRID, MAX_CODEBOOK};
use crate::error::{Error, Result};
use crate::f4::{enumerate_unchecked, F4Vec, F4};
use crate::linear::LinearDesign;
use crate::matrix::{ComplexMatrix, C64};
use crate::pauli::phi_inv;
use crate::plan::{ComplexityReport, DecodePlan, PlanNode};
use crate::signal::{pam_points, qam_side, EncodingUnit, SignalSet};
use crate::stbc::Stbc;

/// Largest `m` accepted by the family builders.
pub const MAX_M: usize = 6;

/// Names of the subsets in symbol order. `S_E` may be punctured and `O` empty.
pub const SUBSETS: [&str; 6] = ["S_A", "S_B", "S_C", "S_D", "S_E", "O"];

/// Seed for the constellation growth used on punctured Silver tails.
pub const SILVER_GROWTH_SEED: u64 = 0x5117e7;

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyDesign {
    pub m: usize,
    pub xi2: F4,
    pub rate: Rational64,
    /// Vectors ordered `S_A, S_B, S_C, S_D, S_E, O`, each sorted.
    pub design: Design,
    /// The six named subsets (possibly empty), as symbol indices.
    pub subsets: Vec<Group>,
}

impl FamilyDesign {
    pub fn subset(&self, name: &str) -> &[usize] {
        self.subsets.iter().find(|g| g.name == name).map_or(&[], |g| &g.members)
    }
}

pub fn t_vector(m: usize) -> F4Vec {
    let mut xs = vec![F4::ZERO; m];
    xs[m - 2] = F4::W;
    xs[m - 1] = F4::W;
    F4Vec::new(false, xs)
}

pub fn nu_vector(m: usize, xi2: F4) -> F4Vec {
    F4Vec::new(m % 2 == 0, vec![xi2; m])
}

fn check_params(m: usize, xi2: F4) -> Result<()> {
    if !(2..=MAX_M).contains(&m) {
        return Err(Error::OutOfRange(format!("m = {m}, expected 2..={MAX_M}")));
    }
    if xi2 != F4::ONE && xi2 != F4::W2 {
        return Err(Error::Precondition(format!("xi2 = {xi2}, expected 1 or w2")));
    }
    Ok(())
}

fn sorted(mut v: Vec<F4Vec>) -> Vec<F4Vec> {
    v.sort();
    v
}

fn assemble(m: usize, xi2: F4, parts: [Vec<F4Vec>; 6]) -> Result<FamilyDesign> {
    let mut vectors = Vec::new();
    let mut subsets = Vec::new();
    for (name, part) in SUBSETS.iter().zip(parts) {
        let start = vectors.len();
        vectors.extend(sorted(part));
        subsets.push(Group { name: (*name).into(), members: (start..vectors.len()).collect() });
    }
    let k = vectors.len();
    let rate = Rational64::new(k as i64, 2 << m);
    let o_empty = subsets[5].members.is_empty();
    let design = Design::new(m, vectors)?;
    let design = if o_empty {
        let s1 = subsets[0].members.clone();
        let s2: Vec<usize> = (s1.len()..k).collect();
        design.with_groups(vec![Group { name: "S1".into(), members: s1 }, Group { name: "S2".into(), members: s2 }])?
    } else {
        let finest = crate::design::finest_partition(&design).groups;
        design.with_partition(finest)?
    };
    Ok(FamilyDesign { m, xi2, rate, design, subsets })
}

fn base_parts(m: usize, xi2: F4) -> [Vec<F4Vec>; 6] {
    let s_xi1: Vec<F4Vec> = (0..1usize << m)
        .map(|bits| F4Vec::new(false, (0..m).map(|i| if bits >> (m - 1 - i) & 1 == 1 { F4::W } else { F4::ZERO }).collect()))
        .collect();
    let (a, b): (Vec<F4Vec>, Vec<F4Vec>) = s_xi1.into_iter().partition(|y| !y.is_odd());
    let (a, b) = (sorted(a), sorted(b));
    let nu = nu_vector(m, xi2);
    let delta = F4Vec::delta(m);
    let c = a.iter().map(|y| y + &nu).collect();
    let d = b.iter().map(|y| y + &nu).collect();
    let e = a.iter().map(|y| y + &delta).collect();
    [a, b, c, d, e, Vec::new()]
}

/// The rate-5/4 design.
pub fn build_base(m: usize, xi2: F4) -> Result<FamilyDesign> {
    check_params(m, xi2)?;
    assemble(m, xi2, base_parts(m, xi2))
}

fn parts_of(fd: &FamilyDesign) -> [Vec<F4Vec>; 6] {
    let grab = |i: usize| fd.subsets[i].members.iter().map(|&j| fd.design.vector(j).clone()).collect::<Vec<_>>();
    [grab(0), grab(1), grab(2), grab(3), grab(4), grab(5)]
}

/// `t`-pairs of a vector set keyed by the smaller member, in increasing order.
fn pairs_of(vs: &[F4Vec], t: &F4Vec) -> Result<Vec<(F4Vec, F4Vec)>> {
    let mut out = Vec::new();
    for y in vs {
        let z = y + t;
        if !vs.contains(&z) {
            return Err(Error::Precondition(format!("{y} is in the set but {z} = {y} + t is not")));
        }
        if *y < z {
            out.push((y.clone(), z));
        }
    }
    out.sort();
    Ok(out)
}

fn whole(count: Rational64, what: &str) -> Result<usize> {
    if !count.is_integer() || *count.numer() < 0 || count.numer() % 2 != 0 {
        return Err(Error::InfeasibleRate(format!("{what} = {count} is not a nonnegative even integer")));
    }
    Ok(*count.numer() as usize)
}

/// Removes the lexicographically largest pairs from `S_E` until
/// `|S_E'| = 2^(m+1)(R − 1)`, for `1 ≤ R ≤ 5/4`.
pub fn puncture(base: &FamilyDesign, rate: Rational64) -> Result<FamilyDesign> {
    let m = base.m;
    if rate < Rational64::from(1) || rate > Rational64::new(5, 4) {
        return Err(Error::InfeasibleRate(format!("puncturing needs 1 ≤ R ≤ 5/4, got {rate}")));
    }
    let keep = whole(Rational64::from(2i64 << m) * (rate - 1), "|S_E'|")?;
    let mut parts = parts_of(base);
    if !parts[5].is_empty() {
        return Err(Error::Precondition("design is already extended".into()));
    }
    let pairs = pairs_of(&parts[4], &t_vector(m))?;
    if keep > 2 * pairs.len() {
        return Err(Error::InfeasibleRate(format!("S_E has only {} vectors", 2 * pairs.len())));
    }
    parts[4] = pairs[..keep / 2].iter().flat_map(|(y, z)| [y.clone(), z.clone()]).collect();
    assemble(m, base.xi2, parts)
}

/// Adds the `2^(m−1)(4R − 5)` vectors of `O`, taken as the lexicographically
/// smallest `t`-pairs of the complement, for `R > 5/4`.
pub fn extend(base: &FamilyDesign, rate: Rational64) -> Result<FamilyDesign> {
    let m = base.m;
    if rate <= Rational64::new(5, 4) {
        return Err(Error::InfeasibleRate(format!("extension needs R > 5/4, got {rate}")));
    }
    let size = whole(Rational64::from(1i64 << (m - 1)) * (rate * 4 - 5), "|O|")?;
    let mut parts = parts_of(base);
    let used: std::collections::HashSet<F4Vec> = parts.iter().flatten().cloned().collect();
    let complement: Vec<F4Vec> = enumerate_unchecked(m).into_iter().filter(|v| !used.contains(v)).collect();
    let pairs = pairs_of(&complement, &t_vector(m))?;
    if size > 2 * pairs.len() {
        return Err(Error::InfeasibleRate(format!(
            "|O| = {size} but only {} complement vectors remain (R ≤ {} required)",
            2 * pairs.len(),
            1 << m
        )));
    }
    parts[5] = pairs[..size / 2].iter().flat_map(|(y, z)| [y.clone(), z.clone()]).collect();
    assemble(m, base.xi2, parts)
}

/// The design for `m ≥ 2` at rate `R`.
pub fn build(m: usize, xi2: F4, rate: Rational64) -> Result<FamilyDesign> {
    let base = build_base(m, xi2)?;
    match rate.cmp(&Rational64::new(5, 4)) {
        std::cmp::Ordering::Less => puncture(&base, rate),
        std::cmp::Ordering::Equal => Ok(base),
        std::cmp::Ordering::Greater => extend(&base, rate),
    }
}

/// Index pairs `(y, y + t)` with `y` the smaller vector, ordered by `y`'s index.
pub fn pair_split(d: &Design) -> Result<Vec<(usize, usize)>> {
    if d.m() < 2 {
        return Err(Error::OutOfRange(format!("m = {}, expected at least 2", d.m())));
    }
    let t = t_vector(d.m());
    let mut out = Vec::new();
    for (i, y) in d.vectors().iter().enumerate() {
        let z = y + &t;
        let j = d
            .index_of(&z)
            .ok_or_else(|| Error::Precondition(format!("vector {} ({y}) has no partner {z}", i + 1)))?;
        if *y < z {
            out.push((i, j));
        }
    }
    Ok(out)
}

/// Whether `phi_inv(y) + i·phi_inv(y + t)` is nonsingular.
pub fn check_prop16(y: &F4Vec) -> Result<bool> {
    let m = y.m();
    if m < 2 {
        return Err(Error::OutOfRange(format!("m = {m}, expected at least 2")));
    }
    let a = phi_inv(y);
    let b = phi_inv(&(y + &t_vector(m)));
    Ok((&a + &b.scale(C64::new(0.0, 1.0))).rank(1e-8) == 1 << m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropReport {
    /// Every vector of `S_B ∪ S_C ∪ S_D ∪ S_E` has odd weight.
    pub odd_weights: bool,
    /// `{S_A, S_B, S_C, S_D}` is a valid rate-1 four-group partition.
    pub four_group: bool,
    /// `{S1, S2}` is a valid two-group partition.
    pub two_group: bool,
    /// Every subset is closed under `+t`.
    pub t_closed: bool,
}

impl PropReport {
    pub fn all(&self) -> bool {
        self.odd_weights && self.four_group && self.two_group && self.t_closed
    }
}

pub fn check_props(m: usize, xi2: F4) -> Result<PropReport> {
    let fd = build_base(m, xi2)?;
    let d = &fd.design;
    let odd_weights = ["S_B", "S_C", "S_D", "S_E"].iter().all(|s| fd.subset(s).iter().all(|&i| d.vector(i).is_odd()));

    let abcd: Vec<usize> = ["S_A", "S_B", "S_C", "S_D"].iter().flat_map(|s| fd.subset(s).to_vec()).collect();
    let sub = Design::new(m, abcd.iter().map(|&i| d.vector(i).clone()).collect())?;
    let q = 1usize << (m - 1);
    let groups: Vec<Vec<usize>> = (0..4).map(|g| (g * q..(g + 1) * q).collect()).collect();
    let four_group = validate_partition(&sub, &groups)?.valid && sub.rate() == Rational64::from(1);

    let two_group = validate_partition(d, &d.partition_indices())?.valid && d.rate() == Rational64::new(5, 4);
    let t = t_vector(m);
    let t_closed = fd.subsets.iter().all(|g| g.members.iter().all(|&i| g.members.iter().any(|&j| *d.vector(j) == d.vector(i) + &t)));
    Ok(PropReport { odd_weights, four_group, two_group, t_closed })
}

/// `C{O | L(S_A), C{S_E' | L(S_B), L(S_C), L(S_D)}}` with hard-limited leaves,
/// flattened where the conditioning set is empty.
pub fn family_plan(fd: &FamilyDesign) -> Result<DecodePlan> {
    let leaf = |s: &str| PlanNode::leaf(fd.subset(s).to_vec(), true);
    let bcd = vec![leaf("S_B"), leaf("S_C"), leaf("S_D")];
    let e = fd.subset("S_E").to_vec();
    let mut children = vec![leaf("S_A")];
    if e.is_empty() {
        children.extend(bcd);
    } else {
        children.push(PlanNode::cond(e, bcd));
    }
    DecodePlan::new(fd.design.k(), PlanNode::cond(fd.subset("O").to_vec(), children))
}

/// Budget on the number of prior difference matrices in the angle search,
/// scaled down with the cost of a determinant.
fn prior_budget(n: usize) -> u128 {
    (20_000 * 64 / (n as u128).pow(3)).max(9)
}

pub fn round_angle(theta: f64) -> f64 {
    (theta * 1e12).round() / 1e12
}

/// One angle per pair, chosen in pair order by [`rotation_search`] against
/// the pairs already placed. When the differences of all earlier pairs
/// exceed the budget the earliest are left out of the prior.
pub fn default_angles(ld: &LinearDesign, pairs: &[(usize, usize)], m_qam: u32) -> Result<Vec<f64>> {
    let side = qam_side(m_qam)?;
    let n = ld.n();
    let mut comps: Vec<ComplexMatrix> = Vec::new();
    let mut angles = Vec::new();
    let diffs_per_pair = (2 * side as u128 - 1).pow(2);
    for &(i, j) in pairs {
        let mut start = 0;
        while start < comps.len() && diffs_per_pair.pow(((comps.len() - start) / 2) as u32) > prior_budget(n) {
            start += 2;
        }
        let pts = vec![pam_points(side); comps.len() - start];
        let prior = half_differences(n, &comps[start..], &pts)?;
        let (a1, a2) = (ld.matrix(i), ld.matrix(j));
        let (theta, _) = rotation_search(&prior, a1, a2, m_qam, DEFAULT_GRID)?;
        let theta = round_angle(theta);
        let (s, c) = theta.sin_cos();
        let mut u = a1.scale_re(c);
        u.add_scaled(s, a2);
        let mut v = a2.scale_re(c);
        v.add_scaled(-s, a1);
        comps.push(u);
        comps.push(v);
        angles.push(theta);
    }
    Ok(angles)
}

/// Pairs encoded as `e^{iθ}·M-QAM`, decoded with [`family_plan`].
pub fn assemble_stbc(fd: &FamilyDesign, angles: &[f64], m_qam: u32) -> Result<Stbc> {
    let pairs = pair_split(&fd.design)?;
    if angles.len() != pairs.len() {
        return Err(Error::Precondition(format!("{} pairs but {} angles", pairs.len(), angles.len())));
    }
    if let Some(a) = angles.iter().find(|a| !(a.is_finite() && **a > 0.0 && **a <= std::f64::consts::TAU)) {
        return Err(Error::Precondition(format!("angle {a} outside (0, 2π]")));
    }
    let units = pairs
        .iter()
        .zip(angles)
        .map(|(&(i, j), &t)| EncodingUnit::rotated_qam(i, j, m_qam, t))
        .collect::<Result<Vec<_>>>()?;
    let signal = SignalSet::new(fd.design.k(), units)?;
    Stbc::new(fd.design.to_linear_design(), signal, family_plan(fd)?)
}

/// Dominant term of the predicted decoding complexity.
pub fn predicted_complexity(m: usize, rate: Rational64) -> Result<ComplexityReport> {
    if m == 1 {
        let halves = (rate - 1) * 4;
        if rate < Rational64::from(1) || rate > Rational64::from(2) || !halves.is_integer() {
            return Err(Error::InfeasibleRate(format!("m = 1 needs 1 ≤ R ≤ 2 with 4R integral, got {rate}")));
        }
        return Ok(ComplexityReport::single(1, *halves.numer()));
    }
    if !(2..=62).contains(&m) {
        return Err(Error::OutOfRange(format!("m = {m}")));
    }
    let n = Rational64::from(1i64 << m);
    if rate <= Rational64::from(1) || rate > n || !(rate * n * 2).is_integer() {
        return Err(Error::InfeasibleRate(format!("need 1 < R ≤ {n} with 2^(m+1)·R integral, got {rate}")));
    }
    let halves = Rational64::from(1i64 << (m - 1)) * (rate * 4 - 3) - 1;
    Ok(ComplexityReport::single(3, halves.to_integer()))
}

/// A member of the family together with its code.
#[derive(Clone, Debug)]
pub struct FamilyCode {
    pub m: usize,
    pub rate: Rational64,
    pub stbc: Stbc,
    /// `None` for `m = 1`.
    pub design: Option<FamilyDesign>,
    /// Pair angles for `m ≥ 2`.
    pub angles: Vec<f64>,
    pub predicted: ComplexityReport,
    /// Whether the encoding is known to give full diversity.
    pub diversity_by_construction: bool,
}

/// Silver code keeping its first `4R` real symbols. The Alamouti part uses
/// √M-PAM with hard limiting. The other four are paired by the unitary
/// pairing matrix when all are kept. Otherwise their constellations are
/// grown for full diversity, or left as PAM when the codebook is too large
/// for growth.
pub fn punctured_silver(rate: Rational64, m_qam: u32) -> Result<(Stbc, bool)> {
    let kr = rate * 4;
    if rate < Rational64::from(1) || rate > Rational64::from(2) || !kr.is_integer() {
        return Err(Error::InfeasibleRate(format!("m = 1 needs 1 ≤ R ≤ 2 with 4R integral, got {rate}")));
    }
    let k = *kr.numer() as usize;
    let side = qam_side(m_qam)?;
    let full = silver_ld()?;
    let labels: Vec<&str> = full.entries()[..k].iter().map(|e| e.label.as_str()).collect();
    let ld = LinearDesign::from_targets(&labels, (0..k).map(|i| full.matrix(i).clone()).collect())?;
    let pam = pam_points(side);
    let mut units: Vec<EncodingUnit> = (0..4).map(|i| EncodingUnit::pam(i, pam.clone())).collect::<Result<_>>()?;
    let mut certified = true;
    if k == 8 {
        units.push(EncodingUnit::linear(vec![4, 5, 6, 7], silver_pairing(), vec![pam.clone(); 4])?);
    } else if k > 4 {
        let rest = vec![side; k - 4];
        let size = product_len(&vec![pam.clone(); k]);
        if size <= MAX_CODEBOOK {
            let pts = grow_with_pam_prefix(&ld, &vec![pam.clone(); 4], &rest, SILVER_GROWTH_SEED)?;
            for (s, p) in pts.into_iter().enumerate().skip(4) {
                units.push(EncodingUnit::pam(s, p)?);
            }
        } else {
            certified = false;
            for s in 4..k {
                units.push(EncodingUnit::pam(s, pam.clone())?);
            }
        }
    }
    let signal = SignalSet::new(k, units)?;
    let leaves = (0..4).map(|i| PlanNode::leaf(vec![i], true)).collect();
    let plan = DecodePlan::new(k, PlanNode::cond((4..k).collect(), leaves))?;
    Ok((Stbc::new(ld, signal, plan)?, certified))
}

/// Builds the code for `2^m` antennas at rate `R`. Angles default to
/// [`default_angles`].
pub fn build_code(m: usize, rate: Rational64, xi2: F4, m_qam: u32, angles: Option<Vec<f64>>) -> Result<FamilyCode> {
    // at R = 1 the plan is four hard-limited leaves
    let predicted = predicted_complexity(m, rate).or_else(|e| {
        if rate == Rational64::from(1) && m >= 2 {
            Ok(ComplexityReport::single(4, 1))
        } else {
            Err(e)
        }
    })?;
    if m == 1 {
        if angles.as_ref().is_some_and(|a| !a.is_empty()) {
            return Err(Error::Precondition("the two-antenna code takes no angles".into()));
        }
        let (stbc, certified) = punctured_silver(rate, m_qam)?;
        return Ok(FamilyCode { m, rate, stbc, design: None, angles: Vec::new(), predicted, diversity_by_construction: certified });
    }
    let fd = build(m, xi2, rate)?;
    let angles = match angles {
        Some(a) => a,
        None => default_angles(&fd.design.to_linear_design(), &pair_split(&fd.design)?, m_qam)?,
    };
    let stbc = assemble_stbc(&fd, &angles, m_qam)?;
    Ok(FamilyCode { m, rate, stbc, design: Some(fd), angles, predicted, diversity_by_construction: true })
}
