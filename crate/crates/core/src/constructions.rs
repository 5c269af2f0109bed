//! Recursive constructions doubling the number of antennas, and coordinate
//! permutations.

use std::collections::BTreeSet;

use crate::design::{intra_group_odd_pair, validate_partition, Design, Group};
use crate::error::{Error, Result};
use crate::f4::{check_permutation, F4Vec, F4};

fn valid_groups(d: &Design) -> Result<Vec<Group>> {
    let idx = d.partition_indices();
    let rep = validate_partition(d, &idx)?;
    if let Some((i, j)) = rep.witness {
        return Err(Error::InvalidPartition(format!(
            "vectors {} ({}) and {} ({}) lie in different groups but their sum has even weight",
            i + 1,
            d.vector(i),
            j + 1,
            d.vector(j)
        )));
    }
    Ok(match d.groups() {
        Some(g) => g.to_vec(),
        None => idx
            .into_iter()
            .enumerate()
            .map(|(i, members)| Group { name: format!("S{}", i + 1), members })
            .collect(),
    })
}

fn two_even_groups(d: &Design) -> Result<Vec<Group>> {
    let groups = valid_groups(d)?;
    if groups.len() != 2 {
        return Err(Error::Precondition(format!("design has {} groups, expected 2", groups.len())));
    }
    let idx: Vec<Vec<usize>> = groups.iter().map(|g| g.members.clone()).collect();
    if let Some((i, j)) = intra_group_odd_pair(d, &idx) {
        return Err(Error::Precondition(format!(
            "vectors {} ({}) and {} ({}) share a group but their sum has odd weight",
            i + 1,
            d.vector(i),
            j + 1,
            d.vector(j)
        )));
    }
    Ok(groups)
}

fn shifted(members: &[usize], by: usize) -> Vec<usize> {
    members.iter().map(|&i| i + by).collect()
}

/// Each group `S` becomes `{[y,0]} ∪ {[y,ω^l] + δ}`; rate and group count are kept.
pub fn construct_a(d: &Design, l: u32) -> Result<Design> {
    if l > 2 {
        return Err(Error::OutOfRange(format!("l = {l}, expected 0, 1 or 2")));
    }
    let groups = valid_groups(d)?;
    let k = d.k();
    let e = F4::omega_pow(l);
    let mut vs: Vec<F4Vec> = d.vectors().iter().map(|y| y.append(F4::ZERO)).collect();
    vs.extend(d.vectors().iter().map(|y| y.append(e).flip_lambda()));
    let new_groups = groups
        .into_iter()
        .map(|g| {
            let mut members = g.members.clone();
            members.extend(shifted(&g.members, k));
            Group { name: g.name, members }
        })
        .collect();
    Design::new(d.m() + 1, vs)?.with_groups(new_groups)
}

/// Two groups with all intra-group sums even: `S̃1 = [S1,0] ∪ [S2,ω^l]`,
/// `S̃2 = [S2,0] ∪ [S1,ω^l]`.
pub fn construct_b(d: &Design, l: u32) -> Result<Design> {
    if l > 2 {
        return Err(Error::OutOfRange(format!("l = {l}, expected 0, 1 or 2")));
    }
    let groups = two_even_groups(d)?;
    let k = d.k();
    let e = F4::omega_pow(l);
    let mut vs: Vec<F4Vec> = d.vectors().iter().map(|y| y.append(F4::ZERO)).collect();
    vs.extend(d.vectors().iter().map(|y| y.append(e)));
    let (g1, g2) = (&groups[0].members, &groups[1].members);
    let s1 = g1.iter().copied().chain(shifted(g2, k)).collect();
    let s2 = g2.iter().copied().chain(shifted(g1, k)).collect();
    Design::new(d.m() + 1, vs)?.with_partition(vec![s1, s2])
}

/// Two groups with all intra-group sums even, split into four:
/// `[S1,ξ1]`, `[S1,ξ2]`, `[S2,ξ3]+δ`, `[S2,ξ4]+δ`.
pub fn construct_c(d: &Design, xi: [F4; 4]) -> Result<Design> {
    let distinct: BTreeSet<F4> = xi.iter().copied().collect();
    if distinct.len() != 4 {
        return Err(Error::Precondition(format!(
            "xi order {} is not four distinct elements",
            xi.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        )));
    }
    let groups = two_even_groups(d)?;
    let k = d.k();
    let in_first: Vec<bool> = (0..k).map(|i| groups[0].members.contains(&i)).collect();
    let block = |a: F4, b: F4| -> Vec<F4Vec> {
        d.vectors()
            .iter()
            .zip(&in_first)
            .map(|(y, &first)| if first { y.append(a) } else { y.append(b).flip_lambda() })
            .collect()
    };
    let mut vs = block(xi[0], xi[2]);
    vs.extend(block(xi[1], xi[3]));
    let (g1, g2) = (&groups[0].members, &groups[1].members);
    Design::new(d.m() + 1, vs)?.with_partition(vec![g1.clone(), shifted(g1, k), g2.clone(), shifted(g2, k)])
}

/// New coordinate `k` is old coordinate `sigma[k]` (0-based); groups are kept.
pub fn apply_sigma(d: &Design, sigma: &[usize]) -> Result<Design> {
    check_permutation(sigma, d.m())?;
    let vs = d.vectors().iter().map(|y| y.permute(sigma)).collect::<Result<Vec<_>>>()?;
    let out = Design::new(d.m(), vs)?;
    match d.groups() {
        Some(g) => out.with_groups(g.to_vec()),
        None => Ok(out),
    }
}

/// `σ(1) = m, σ(k) = k − 1`: the last coordinate moves to the front, which
/// turns the appended Kronecker factor into the outer 2×2 block structure.
pub fn shift_sigma(m: usize) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    std::iter::once(m - 1).chain(0..m - 1).collect()
}

pub fn shift(d: &Design) -> Result<Design> {
    apply_sigma(d, &shift_sigma(d.m()))
}

/// Parses `"2,1"` (1-based) into a 0-based permutation.
pub fn parse_sigma(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(Error::Parse(format!("bad permutation entry '{t}'"))),
        })
        .collect()
}

pub fn parse_xi_order(text: &str) -> Result<[F4; 4]> {
    let v = text.split(',').map(|t| t.parse::<F4>()).collect::<Result<Vec<_>>>()?;
    v.try_into().map_err(|_| Error::Parse(format!("xi order '{text}' needs four elements")))
}

type GroupSet = BTreeSet<BTreeSet<F4Vec>>;

fn group_set(d: &Design, sigma: &[usize], v: &F4Vec) -> GroupSet {
    d.partition_indices()
        .iter()
        .map(|g| g.iter().map(|&i| &d.vector(i).permute(sigma).expect("valid permutation") + v).collect())
        .collect()
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            out.push(q);
        }
    }
    out
}

/// Whether `b` arises from `a` by a column permutation of the code matrix and
/// a relabeling of variables. Column permutations realizable inside the
/// family are coordinate permutations followed by right multiplication with a
/// signed Kronecker product of `I` and `X`, i.e. translation by
/// `[wt(c) mod 2 | c]` for `c ∈ {0,1}^m`.
pub fn equivalent(a: &Design, b: &Design) -> bool {
    if a.m() != b.m() || a.k() != b.k() {
        return false;
    }
    let m = a.m();
    let target = group_set(b, &(0..m).collect::<Vec<_>>(), &F4Vec::zero(m));
    for sigma in permutations(m) {
        for mask in 0u32..(1 << m) {
            let xs: Vec<F4> = (0..m).map(|i| if mask >> i & 1 == 1 { F4::ONE } else { F4::ZERO }).collect();
            let v = F4Vec::new(mask.count_ones() % 2 == 1, xs);
            if group_set(a, &sigma, &v) == target {
                return true;
            }
        }
    }
    false
}

/// One representative order per way of splitting F4 into `{ξ1,ξ2} | {ξ3,ξ4}`.
pub fn construct_c_orders() -> Vec<[F4; 4]> {
    let all = F4::ALL;
    let mut out = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let rest: Vec<F4> = all.iter().copied().filter(|&x| x != all[i] && x != all[j]).collect();
            out.push([all[i], all[j], rest[0], rest[1]]);
        }
    }
    out
}

/// Groups the six construction-C variants of `seed` into equivalence classes
/// (indices into [`construct_c_orders`]).
pub fn construct_c_classes(seed: &Design) -> Result<Vec<Vec<usize>>> {
    let designs = construct_c_orders().into_iter().map(|o| construct_c(seed, o)).collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, d) in designs.iter().enumerate() {
        match classes.iter_mut().find(|c| equivalent(&designs[c[0]], d)) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(classes)
}
