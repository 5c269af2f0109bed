//! Known codes expressed as F4 designs, with their printed weight matrices,
//! symbol transforms and decode plans.

use nalgebra::DMatrix;

use crate::constructions::{construct_a, shift};
use crate::design::{finest_partition, Design};
use crate::error::{Error, Result};
use crate::f4::{enumerate_unchecked, F4Vec, F4};
use crate::linear::LinearDesign;
use crate::matrix::{ComplexMatrix, C64};
use crate::plan::{DecodePlan, PlanNode};
use crate::signal::{pam_points, qam_side, rotation, EncodingUnit, SignalSet};
use crate::stbc::Stbc;

/// Joint encoding of a block of symbols: `x = scale · P · R · a`, where the
/// components `a` are √M-PAM and `R` rotates each listed component pair by
/// the bundle angle.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingSpec {
    pub symbols: Vec<usize>,
    pub precoder: DMatrix<f64>,
    pub scale: f64,
    pub rotated_pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub design: Design,
    pub ld: LinearDesign,
    pub plan: DecodePlan,
    pub encoding: Vec<EncodingSpec>,
}

impl CatalogEntry {
    /// Whether the encoding has a free rotation angle.
    pub fn has_angle(&self) -> bool {
        self.encoding.iter().any(|e| !e.rotated_pairs.is_empty())
    }

    /// Signal set with √M-PAM components; symbols outside every encoding
    /// block are independent PAM.
    pub fn signal_set(&self, m: u32, theta: f64) -> Result<SignalSet> {
        let side = qam_side(m)?;
        let k = self.ld.k();
        let mut covered = vec![false; k];
        let mut units = Vec::new();
        for e in &self.encoding {
            let d = e.symbols.len();
            let mut r = DMatrix::<f64>::identity(d, d);
            for &(a, b) in &e.rotated_pairs {
                let rot = rotation(theta);
                r[(a, a)] = rot[(0, 0)];
                r[(a, b)] = rot[(0, 1)];
                r[(b, a)] = rot[(1, 0)];
                r[(b, b)] = rot[(1, 1)];
            }
            let points: Vec<f64> = pam_points(side).iter().map(|p| p * e.scale).collect();
            for &s in &e.symbols {
                covered[s] = true;
            }
            units.push(EncodingUnit::linear(e.symbols.clone(), &e.precoder * r, vec![points; d])?);
        }
        for (s, _) in covered.iter().enumerate().filter(|(_, c)| !**c) {
            units.push(EncodingUnit::pam(s, pam_points(side))?);
        }
        units.sort_by_key(|u| u.symbols()[0]);
        SignalSet::new(k, units)
    }

    pub fn stbc(&self, m: u32, theta: f64) -> Result<Stbc> {
        Stbc::new(self.ld.clone(), self.signal_set(m, theta)?, self.plan.clone())
    }
}

/// Catalog identifiers and their parameters, for listings.
pub const NAMES: &[(&str, &str)] = &[
    ("alamouti", ""),
    ("rate1_2x2", "l in 0..=2"),
    ("qod4", ""),
    ("scod", "m in 1..=6"),
    ("ciod", "m in 1..=6"),
    ("precoded_ciod", "n in 0..=5"),
    ("dast", "n in 0..=5"),
    ("ggroup", "g in 2..=12, a in 0..=4"),
    ("fgd_ren", "optional rate 2 for the punctured code"),
    ("pavan2x2", ""),
    ("bhv", ""),
    ("silver", ""),
];

fn vecs(vs: &[&str]) -> Vec<F4Vec> {
    vs.iter().map(|s| s.parse().expect("fixture vector")).collect()
}

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn label_refs(l: &[String]) -> Vec<&str> {
    l.iter().map(String::as_str).collect()
}

/// Coefficient matrices of each symbol in a printed matrix whose entries are
/// sums of terms `±x_j` or `±ix_j`, e.g. `"-x3+ix4"`.
pub fn printed_form(rows: &[&[&str]], k: usize) -> Result<Vec<ComplexMatrix>> {
    let n = rows.len();
    let mut out = vec![ComplexMatrix::zeros(n, n); k];
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch(row.len(), n));
        }
        for (c, entry) in row.iter().enumerate() {
            let s: String = entry.chars().filter(|ch| !ch.is_whitespace()).collect();
            if s == "0" {
                continue;
            }
            let mut rest = s.as_str();
            while !rest.is_empty() {
                let mut coef = C64::new(1.0, 0.0);
                if let Some(t) = rest.strip_prefix('-') {
                    coef = -coef;
                    rest = t;
                } else if let Some(t) = rest.strip_prefix('+') {
                    rest = t;
                }
                if let Some(t) = rest.strip_prefix('i') {
                    coef *= C64::new(0.0, 1.0);
                    rest = t;
                }
                let t = rest
                    .strip_prefix('x')
                    .ok_or_else(|| Error::Parse(format!("bad term in '{entry}'")))?;
                let end = t.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(t.len());
                let j: usize = t[..end].parse().map_err(|_| Error::Parse(format!("bad index in '{entry}'")))?;
                if j == 0 || j > k {
                    return Err(Error::OutOfRange(format!("symbol x{j} in '{entry}'")));
                }
                let m = &mut out[j - 1];
                m.set(r, c, m.get(r, c) + coef);
                rest = &t[end..];
            }
        }
    }
    Ok(out)
}

fn from_printed(rows: &[&[&str]], k: usize, names: &[String]) -> Result<LinearDesign> {
    LinearDesign::from_targets(&label_refs(names), printed_form(rows, k)?)
}

fn check_vectors(ld: &LinearDesign, expected: &[F4Vec]) -> Result<()> {
    for (i, (e, want)) in ld.entries().iter().zip(expected).enumerate() {
        if e.vector.as_ref() != Some(want) {
            return Err(Error::Precondition(format!("fixture symbol {} does not map to {want}", i + 1)));
        }
    }
    Ok(())
}

fn default_plan(d: &Design) -> Result<DecodePlan> {
    DecodePlan::multigroup(d.k(), &d.partition_indices(), true)
}

fn entry(name: String, design: Design, ld: LinearDesign, encoding: Vec<EncodingSpec>) -> Result<CatalogEntry> {
    let plan = default_plan(&design)?;
    Ok(CatalogEntry { name, design, ld, plan, encoding })
}

pub fn alamouti() -> Result<CatalogEntry> {
    let vs = vecs(&["0|0", "0|1", "0|w", "0|w2"]);
    let ld = from_printed(&[&["x1+ix3", "x4+ix2"], &["-x4+ix2", "x1-ix3"]], 4, &labels("x", 4))?;
    check_vectors(&ld, &vs)?;
    let d = Design::new(1, vs)?.with_partition(vec![vec![0], vec![1], vec![2], vec![3]])?;
    entry("alamouti".into(), d, ld, Vec::new())
}

pub fn rate1_2x2(l: u32) -> Result<CatalogEntry> {
    let (vs, rows): (Vec<&str>, [&[&str]; 2]) = match l {
        0 => (vec!["0|0", "1|1", "0|1", "1|0"], [&["x1+ix4", "-x2+ix3"], &["-x2+ix3", "x1+ix4"]]),
        1 => (vec!["0|0", "1|w", "0|w", "1|0"], [&["x1-x2+ix4+ix3", "0"], &["0", "x1+x2+ix4-ix3"]]),
        2 => (vec!["0|0", "1|w2", "1|0", "0|w2"], [&["x1+ix3", "x4+ix2"], &["-x4-ix2", "x1+ix3"]]),
        _ => return Err(Error::OutOfRange(format!("l = {l}, expected 0, 1 or 2"))),
    };
    let vs = vecs(&vs);
    let ld = from_printed(&rows, 4, &labels("x", 4))?;
    check_vectors(&ld, &vs)?;
    let d = Design::new(1, vs)?.with_partition(vec![vec![0, 1], vec![2, 3]])?;
    entry(format!("rate1_2x2({l})"), d, ld, Vec::new())
}

const QOD_ROWS: [&[&str]; 4] = [
    &["x1+ix2", "x3+ix4", "x5+ix6", "x7+ix8"],
    &["-x3+ix4", "x1-ix2", "-x7+ix8", "x5-ix6"],
    &["-x5+ix6", "-x7+ix8", "x1-ix2", "x3-ix4"],
    &["x7+ix8", "-x5-ix6", "-x3-ix4", "x1+ix2"],
];

pub fn qod4() -> Result<CatalogEntry> {
    let vs = vecs(&["0|0,0", "1|w,w", "0|0,w2", "1|w,1", "0|w2,0", "1|1,w", "0|w2,w2", "1|1,1"]);
    let ld = from_printed(&QOD_ROWS, 8, &labels("x", 8))?;
    check_vectors(&ld, &vs)?;
    let d = Design::new(2, vs)?.with_partition(vec![vec![0, 6], vec![1, 7], vec![2, 4], vec![3, 5]])?;
    entry("qod4".into(), d, ld, Vec::new())
}

/// Maximal-rate square complex orthogonal design for `2^m` antennas; `m = 0`
/// gives the one-antenna design `x1·i + x2`.
pub fn scod_design(m: usize) -> Result<Design> {
    let mut vs = Vec::with_capacity(2 * m + 2);
    for head in [F4::W2, F4::ONE] {
        for k in 1..=m {
            let mut xs = vec![F4::ZERO; m - k];
            xs.push(head);
            xs.extend(std::iter::repeat_n(F4::W, k - 1));
            vs.push(F4Vec::new(k % 2 == 0, xs));
        }
    }
    vs.push(F4Vec::new(m % 2 == 0, vec![F4::W; m]));
    vs.push(F4Vec::zero(m));
    let k = vs.len();
    Design::new(m, vs)?.with_partition((0..k).map(|i| vec![i]).collect())
}

pub fn scod(m: usize) -> Result<CatalogEntry> {
    if !(1..=6).contains(&m) {
        return Err(Error::OutOfRange(format!("m = {m}, expected 1..=6")));
    }
    let d = scod_design(m)?;
    let ld = d.to_linear_design();
    entry(format!("scod({m})"), d, ld, Vec::new())
}

fn hadamard(n: u32) -> DMatrix<f64> {
    let h = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, 1.0]);
    (0..n).fold(DMatrix::identity(1, 1), |acc, _| acc.kronecker(&h))
}

fn diag_of(col: &[f64]) -> ComplexMatrix {
    let n = col.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &v) in col.iter().enumerate() {
        m.set(i, i, C64::new(v, 0.0));
    }
    m
}

/// CIOD for `2^m` antennas built from the square orthogonal design for
/// `2^{m−1}` antennas; symbols `x_i` then `w_i`.
pub fn ciod(m: usize) -> Result<CatalogEntry> {
    if !(1..=6).contains(&m) {
        return Err(Error::OutOfRange(format!("m = {m}, expected 1..=6")));
    }
    let seed = scod_design(m - 1)?;
    let d = shift(&construct_a(&seed, 1)?)?;
    let k = seed.k();
    let mut targets = Vec::with_capacity(2 * k);
    let base = seed.to_linear_design();
    for i in 0..k {
        targets.push(diag_of(&[1.0, 1.0]).kron(base.matrix(i)));
    }
    for i in 0..k {
        targets.push(diag_of(&[-1.0, 1.0]).kron(base.matrix(i)));
    }
    let names: Vec<String> = labels("x", k).into_iter().chain(labels("w", k)).collect();
    let ld = LinearDesign::from_targets(&label_refs(&names), targets)?;
    check_vectors(&ld, d.vectors())?;
    let p = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]) / 2f64.sqrt();
    let encoding = (0..k)
        .map(|i| EncodingSpec {
            symbols: vec![i, k + i],
            precoder: p.clone(),
            scale: 1.0 / 2f64.sqrt(),
            rotated_pairs: vec![(0, 1)],
        })
        .collect();
    entry(format!("ciod({m})"), d, ld, encoding)
}

/// Alamouti reordered as `I, iZ, ZX, iX` and doubled `n` times with the
/// block-diagonal construction; symbol `x_{k,j}` has index `4k + j`.
pub fn precoded_ciod(n: u32) -> Result<CatalogEntry> {
    if n > 5 {
        return Err(Error::OutOfRange(format!("n = {n}, expected 0..=5")));
    }
    let base = Design::new(1, vecs(&["0|0", "0|w", "0|w2", "0|1"]))?.to_linear_design();
    let u = hadamard(n);
    let size = 1usize << n;
    let mut targets = Vec::new();
    let mut names = Vec::new();
    for k in 0..size {
        let col: Vec<f64> = u.column(k).iter().copied().collect();
        for j in 0..4 {
            targets.push(diag_of(&col).kron(base.matrix(j)));
            names.push(format!("x{},{}", k + 1, j + 1));
        }
    }
    let ld = LinearDesign::from_targets(&label_refs(&names), targets)?;
    let groups: Vec<Vec<usize>> = (0..4).map(|j| (0..size).map(|k| 4 * k + j).collect()).collect();
    let d = ld.to_design()?.with_partition(groups.clone())?;
    let norm = (size as f64).sqrt();
    let encoding = groups
        .into_iter()
        .map(|symbols| EncodingSpec {
            symbols,
            precoder: u.transpose() / norm,
            scale: 1.0 / norm,
            rotated_pairs: Vec::new(),
        })
        .collect();
    entry(format!("precoded_ciod({n})"), d, ld, encoding)
}

/// Diagonal design for `2^{n+1}` antennas with entries
/// `Σ u_{ℓk} x_k + i Σ u_{ℓk} x_{k+2^{n+1}}`.
pub fn dast(n: u32) -> Result<CatalogEntry> {
    if n > 5 {
        return Err(Error::OutOfRange(format!("n = {n}, expected 0..=5")));
    }
    let u = hadamard(n + 1);
    let size = 1usize << (n + 1);
    let mut targets = Vec::new();
    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
        for k in 0..size {
            let col: Vec<f64> = u.column(k).iter().copied().collect();
            targets.push(diag_of(&col).scale(unit));
        }
    }
    let ld = LinearDesign::from_targets(&label_refs(&labels("x", 2 * size)), targets)?;
    let groups = vec![(0..size).collect::<Vec<_>>(), (size..2 * size).collect()];
    let d = ld.to_design()?.with_partition(groups.clone())?;
    let norm = (size as f64).sqrt();
    let encoding = groups
        .into_iter()
        .map(|symbols| EncodingSpec {
            symbols,
            precoder: u.transpose() / norm,
            scale: 1.0 / norm,
            rotated_pairs: Vec::new(),
        })
        .collect();
    entry(format!("dast({n})"), d, ld, encoding)
}

/// `g`-group design with `2^a` symbols per group; odd `g` drops the last
/// group of the `g + 1` design.
pub fn ggroup_design(g: usize, a: u32) -> Result<Design> {
    if !(2..=12).contains(&g) || a > 4 {
        return Err(Error::OutOfRange(format!("g = {g}, a = {a}; expected g in 2..=12, a in 0..=4")));
    }
    let even = g + g % 2;
    let mut d = scod_design(even / 2 - 1)?;
    for _ in 0..a {
        d = construct_a(&d, 0)?;
    }
    if g % 2 == 1 {
        let groups = d.partition_indices();
        let keep: Vec<usize> = groups[..g].concat();
        let vs = keep.iter().map(|&i| d.vector(i).clone()).collect();
        let mut pos = vec![0; d.k()];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let regrouped = groups[..g].iter().map(|gr| gr.iter().map(|&i| pos[i]).collect()).collect();
        d = Design::new(d.m(), vs)?.with_partition(regrouped)?;
    }
    Ok(d)
}

pub fn ggroup(g: usize, a: u32) -> Result<CatalogEntry> {
    let d = ggroup_design(g, a)?;
    let ld = d.to_linear_design();
    entry(format!("ggroup({g},{a})"), d, ld, Vec::new())
}

/// Rate 17/8 fast-group-decodable design for 4 antennas; `punctured` drops
/// the largest vector outside the single-symbol-decodable subset for rate 2.
pub fn fgd_ren(punctured: bool) -> Result<CatalogEntry> {
    let odd_scod: Vec<F4Vec> = scod_design(2)?.vectors().iter().filter(|v| v.is_odd()).cloned().collect();
    let mut s2: Vec<F4Vec> = enumerate_unchecked(2).into_iter().filter(F4Vec::is_odd).collect();
    if punctured {
        let drop = s2.iter().rposition(|v| !odd_scod.contains(v)).expect("sixteen odd vectors");
        s2.remove(drop);
    }
    let mut vs = vec![F4Vec::zero(2)];
    vs.extend(s2);
    let k = vs.len();
    let d = Design::new(2, vs)?.with_partition(vec![vec![0], (1..k).collect()])?;
    let ld = d.to_linear_design();
    let o: Vec<usize> = (1..k).filter(|&i| odd_scod.contains(d.vector(i))).collect();
    let rest: Vec<usize> = (1..k).filter(|i| !o.contains(i)).collect();
    let leaves = o.iter().map(|&i| PlanNode::leaf(vec![i], false)).collect();
    let root = PlanNode::cond(Vec::new(), vec![PlanNode::leaf(vec![0], false), PlanNode::cond(rest, leaves)]);
    let plan = DecodePlan::new(k, root)?;
    let name = if punctured { "fgd_ren(2)" } else { "fgd_ren" };
    Ok(CatalogEntry { name: name.into(), design: d, ld, plan, encoding: Vec::new() })
}

fn with_finest(d: Design) -> Result<Design> {
    let groups = finest_partition(&d).groups;
    d.with_partition(groups)
}

pub fn pavan2x2() -> Result<CatalogEntry> {
    let vs = vecs(&["0|0", "1|w", "1|0", "0|w", "1|1", "0|w2", "0|1", "1|w2"]);
    let ld = from_printed(
        &[&["x1+x2+ix3+ix4", "x5+x6+ix7+ix8"], &["x5-x6+ix7-ix8", "x1-x2+ix3-ix4"]],
        8,
        &labels("x", 8),
    )?;
    check_vectors(&ld, &vs)?;
    let d = with_finest(Design::new(1, vs)?)?;
    let half = 1.0 / 2f64.sqrt();
    let p1 = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, 1.0]) * half;
    let p2 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]) * half;
    let m4 = DMatrix::from_row_slice(
        4,
        4,
        &[1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0],
    ) / 2.0;
    // inputs (s4I, s3Q, s3I, s4Q) from components (s3I, s3Q, s4I, s4Q)
    let perm = DMatrix::from_row_slice(
        4,
        4,
        &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
    );
    let encoding = vec![
        EncodingSpec { symbols: vec![0, 1], precoder: p1, scale: half, rotated_pairs: vec![(0, 1)] },
        EncodingSpec { symbols: vec![2, 3], precoder: p2, scale: half, rotated_pairs: vec![(0, 1)] },
        EncodingSpec { symbols: vec![4, 5, 6, 7], precoder: m4 * perm, scale: half, rotated_pairs: vec![(0, 1), (2, 3)] },
    ];
    let plan = DecodePlan::parse(8, "C{5 6 7 8|L{1 2;hl},L{3 4;hl}}")?;
    Ok(CatalogEntry { name: "pavan2x2".into(), design: d, ld, plan, encoding })
}

pub fn bhv() -> Result<CatalogEntry> {
    let qod = printed_form(&QOD_ROWS, 8)?;
    let t = diag_of(&[1.0, -1.0]).kron(&ComplexMatrix::identity(2));
    let mut targets = qod.clone();
    targets.extend(qod.iter().map(|a| a * &t));
    let ld = LinearDesign::from_targets(&label_refs(&labels("x", 16)), targets)?;
    let d = with_finest(ld.to_design()?)?;
    let plan = DecodePlan::parse(16, "C{9 10 11 12 13 14 15 16|L{1 7;hl},L{2 8;hl},L{3 5;hl},L{4 6;hl}}")?;
    Ok(CatalogEntry { name: "bhv".into(), design: d, ld, plan, encoding: Vec::new() })
}

/// Real form of the pairing `(s3, s4) = U (z3, z4)` with
/// `U = [[1+i, −1+2i], [1+2i, 1−i]] / √7`, on components `(z3I, z3Q, z4I, z4Q)`.
pub fn silver_pairing() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[1.0, -1.0, -1.0, -2.0, 1.0, 1.0, 2.0, -1.0, 1.0, -2.0, 1.0, 1.0, 2.0, 1.0, -1.0, 1.0],
    ) / 7f64.sqrt()
}

/// Symbols `s1I, s1Q, s2I, s2Q, s3I, s3Q, s4I, s4Q`.
pub fn silver_ld() -> Result<LinearDesign> {
    let names = ["s1I", "s1Q", "s2I", "s2Q", "s3I", "s3Q", "s4I", "s4Q"];
    let rows: [&[&str]; 2] = [&["x1+ix2+x5+ix6", "x3+ix4-x7-ix8"], &["-x3+ix4-x7+ix8", "x1-ix2-x5+ix6"]];
    LinearDesign::from_targets(&names, printed_form(&rows, 8)?)
}

pub fn silver() -> Result<CatalogEntry> {
    let ld = silver_ld()?;
    check_vectors(&ld, &vecs(&["0|0", "0|w", "0|w2", "0|1", "1|w", "1|0", "1|1", "1|w2"]))?;
    let d = with_finest(ld.to_design()?)?;
    let encoding = vec![EncodingSpec {
        symbols: vec![4, 5, 6, 7],
        precoder: silver_pairing(),
        scale: 1.0,
        rotated_pairs: Vec::new(),
    }];
    let plan = DecodePlan::parse(8, "C{5 6 7 8|L{1;hl},L{2;hl},L{3;hl},L{4;hl}}")?;
    Ok(CatalogEntry { name: "silver".into(), design: d, ld, plan, encoding })
}

fn parse_spec(spec: &str) -> Result<(String, Vec<i64>)> {
    let spec = spec.trim();
    let (name, args) = match spec.split_once('(') {
        Some((n, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("missing ')' in '{spec}'")))?;
            (n, inner)
        }
        None => (spec, ""),
    };
    let params = args
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| Error::Parse(format!("bad parameter '{s}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim().to_string(), params))
}

fn arg<T: TryFrom<i64>>(params: &[i64], i: usize, name: &str) -> Result<T> {
    let v = *params.get(i).ok_or_else(|| Error::Parse(format!("{name} needs {} parameter(s)", i + 1)))?;
    T::try_from(v).map_err(|_| Error::OutOfRange(format!("parameter {v} for {name}")))
}

/// Looks up `name` or `name(p1,p2)`; extra `params` are appended to those in
/// the parentheses.
pub fn lookup(spec: &str, extra: &[i64]) -> Result<CatalogEntry> {
    let (name, mut params) = parse_spec(spec)?;
    params.extend_from_slice(extra);
    let arity = |n: usize| -> Result<()> {
        if params.len() != n {
            return Err(Error::Parse(format!("{name} takes {n} parameter(s), got {}", params.len())));
        }
        Ok(())
    };
    match name.as_str() {
        "alamouti" => arity(0).and_then(|_| alamouti()),
        "rate1_2x2" => arity(1).and_then(|_| rate1_2x2(arg(&params, 0, &name)?)),
        "qod4" => arity(0).and_then(|_| qod4()),
        "scod" => arity(1).and_then(|_| scod(arg(&params, 0, &name)?)),
        "ciod" => arity(1).and_then(|_| ciod(arg(&params, 0, &name)?)),
        "precoded_ciod" => arity(1).and_then(|_| precoded_ciod(arg(&params, 0, &name)?)),
        "dast" => arity(1).and_then(|_| dast(arg(&params, 0, &name)?)),
        "ggroup" => arity(2).and_then(|_| ggroup(arg(&params, 0, &name)?, arg(&params, 1, &name)?)),
        "fgd_ren" => match params.as_slice() {
            [] => fgd_ren(false),
            [2] => fgd_ren(true),
            _ => Err(Error::Parse("fgd_ren takes no parameter or the rate 2".into())),
        },
        "pavan2x2" => arity(0).and_then(|_| pavan2x2()),
        "bhv" => arity(0).and_then(|_| bhv()),
        "silver" => arity(0).and_then(|_| silver()),
        _ => Err(Error::UnknownCatalog(name.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::validate_partition;
    use num_rational::Rational64;

    #[test]
    fn every_entry_is_consistent() {
        for spec in [
            "alamouti", "rate1_2x2(0)", "rate1_2x2(1)", "rate1_2x2(2)", "qod4", "scod(3)", "ciod(2)",
            "precoded_ciod(2)", "dast(1)", "ggroup(5,1)", "fgd_ren", "fgd_ren(2)", "pavan2x2", "bhv", "silver",
        ] {
            let e = lookup(spec, &[]).unwrap();
            assert_eq!(e.ld.to_design().unwrap().vectors(), e.design.vectors(), "{spec}");
            let rep = validate_partition(&e.design, &e.design.partition_indices()).unwrap();
            assert!(rep.valid, "{spec}");
            assert!(e.stbc(4, 0.3).is_ok(), "{spec}");
        }
    }

    #[test]
    fn scod_vectors() {
        let d = scod_design(2).unwrap();
        let want = vecs(&["0|0,w2", "1|w2,w", "0|0,1", "1|1,w", "1|w,w", "0|0,0"]);
        assert_eq!(d.vectors(), &want[..]);
        assert_eq!(d.rate(), Rational64::new(3, 4));
        assert_eq!(scod_design(0).unwrap().k(), 2);
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(lookup("nope", &[]), Err(Error::UnknownCatalog(_))));
        assert!(lookup("scod", &[]).is_err());
        assert!(lookup("scod(9)", &[]).is_err());
        assert_eq!(lookup("scod", &[2]).unwrap().name, "scod(2)");
    }

    #[test]
    fn printed_form_parses() {
        let m = printed_form(&[&["x1+ix2", "0"], &["0", "-ix2"]], 2).unwrap();
        assert_eq!(m[1].get(1, 1), C64::new(0.0, -1.0));
        assert!(printed_form(&[&["y1"]], 1).is_err());
    }
}
