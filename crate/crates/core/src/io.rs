//! Line-oriented text format for designs and complete codes.
//!
//! ```text
//! stbc-design v1
//! m=1
//! vectors=0|0 0|1 0|w 0|w2
//! signs=1 1 -1 1                 (only when some sign is negative)
//! group.S1=0|0                   (vectors of each named group)
//! meta.rate=1
//! plan=C{|L{1},L{2},L{3},L{4}}   (codes only, symbols 1-based)
//! unit=pam 1 -0.5,0.5            (codes only, one line per encoding unit)
//! unit=qam 1,2 16 0.463647609001
//! unit=linear 1,2 r11,r12;r21,r22 p1,p2;q1,q2
//! ```
//!
//! Writing then reading then writing again reproduces the text exactly.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::design::{validate_partition, Design, Group};
use crate::error::{Error, Result};
use crate::f4::F4Vec;
use crate::linear::LinearDesign;
use crate::plan::DecodePlan;
use crate::signal::{EncodingUnit, SignalSet, UnitKind};
use crate::stbc::Stbc;

pub const HEADER: &str = "stbc-design v1";

#[derive(Clone, Debug, PartialEq)]
pub struct DesignFile {
    pub design: Design,
    pub signs: Vec<i8>,
    pub meta: Vec<(String, String)>,
    pub plan: Option<DecodePlan>,
    pub signal: Option<SignalSet>,
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn one_based(xs: &[usize]) -> String {
    join(xs.iter().map(|i| i + 1), ",")
}

fn parse_indices(s: &str, k: usize) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let i: usize = t.trim().parse().map_err(|_| Error::Parse(format!("bad symbol index '{t}'")))?;
            if i == 0 || i > k {
                return Err(Error::Parse(format!("symbol index {i} outside 1..={k}")));
            }
            Ok(i - 1)
        })
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}'"))))
        .collect()
}

fn unit_line(u: &EncodingUnit) -> String {
    let syms = one_based(u.symbols());
    match u.kind() {
        UnitKind::Pam => format!("pam {syms} {}", join(&u.points()[0], ",")),
        UnitKind::RotatedQam { m, theta } => format!("qam {syms} {m} {theta:.12}"),
        UnitKind::Linear => {
            let p = u.precoder();
            let rows = (0..p.nrows()).map(|r| join((0..p.ncols()).map(|c| p[(r, c)]), ","));
            let pts = u.points().iter().map(|v| join(v, ","));
            format!("linear {syms} {} {}", join(rows, ";"), join(pts, ";"))
        }
    }
}

fn parse_unit(s: &str, k: usize) -> Result<EncodingUnit> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let bad = || Error::Parse(format!("malformed unit '{s}'"));
    match parts.as_slice() {
        ["pam", syms, pts] => {
            let syms = parse_indices(syms, k)?;
            if syms.len() != 1 {
                return Err(bad());
            }
            EncodingUnit::pam(syms[0], parse_floats(pts)?)
        }
        ["qam", syms, m, theta] => {
            let syms = parse_indices(syms, k)?;
            if syms.len() != 2 {
                return Err(bad());
            }
            let m: u32 = m.parse().map_err(|_| bad())?;
            let theta: f64 = theta.parse().map_err(|_| bad())?;
            EncodingUnit::rotated_qam(syms[0], syms[1], m, theta)
        }
        ["linear", syms, rows, pts] => {
            let syms = parse_indices(syms, k)?;
            let d = syms.len();
            let entries: Vec<f64> = rows.split(';').map(parse_floats).collect::<Result<Vec<_>>>()?.concat();
            if entries.len() != d * d {
                return Err(bad());
            }
            let points = pts.split(';').map(parse_floats).collect::<Result<Vec<_>>>()?;
            EncodingUnit::linear(syms, DMatrix::from_row_slice(d, d, &entries), points)
        }
        _ => Err(bad()),
    }
}

impl DesignFile {
    pub fn from_design(design: Design) -> DesignFile {
        let signs = vec![1; design.k()];
        DesignFile { design, signs, meta: Vec::new(), plan: None, signal: None }
    }

    /// A complete code. `design` supplies the groups and must carry the
    /// code's vectors in order.
    pub fn from_stbc(stbc: &Stbc, design: &Design) -> Result<DesignFile> {
        let ld = stbc.linear_design();
        let own = ld.to_design()?;
        if own.vectors() != design.vectors() {
            return Err(Error::Precondition("design vectors differ from the code's weight matrices".into()));
        }
        Ok(DesignFile {
            design: design.clone(),
            signs: ld.signs(),
            meta: Vec::new(),
            plan: Some(stbc.plan().clone()),
            signal: Some(stbc.signal().clone()),
        })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> DesignFile {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.into(), value)),
        }
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn linear_design(&self) -> Result<LinearDesign> {
        LinearDesign::from_signed(&self.design, &self.signs)
    }

    pub fn stbc(&self) -> Result<Stbc> {
        let signal = self.signal.clone().ok_or_else(|| Error::Precondition("file has no signal set".into()))?;
        let plan = self.plan.clone().ok_or_else(|| Error::Precondition("file has no decode plan".into()))?;
        Stbc::new(self.linear_design()?, signal, plan)
    }

    pub fn to_text(&self) -> String {
        let d = &self.design;
        let mut s = String::new();
        let _ = writeln!(s, "{HEADER}");
        let _ = writeln!(s, "m={}", d.m());
        let _ = writeln!(s, "vectors={}", join(d.vectors(), " "));
        if self.signs.iter().any(|&x| x < 0) {
            let _ = writeln!(s, "signs={}", join(&self.signs, " "));
        }
        for g in d.groups().unwrap_or(&[]) {
            let _ = writeln!(s, "group.{}={}", g.name, join(g.members.iter().map(|&i| d.vector(i)), " "));
        }
        for (k, v) in &self.meta {
            let _ = writeln!(s, "meta.{k}={v}");
        }
        if let Some(p) = &self.plan {
            let _ = writeln!(s, "plan={p}");
        }
        if let Some(sig) = &self.signal {
            for u in sig.units() {
                let _ = writeln!(s, "unit={}", unit_line(u));
            }
        }
        s
    }

    /// Parses a file. With `validate`, attached groups must form a valid
    /// partition.
    pub fn parse(text: &str, validate: bool) -> Result<DesignFile> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some(HEADER) {
            return Err(Error::Parse(format!("first line must be '{HEADER}'")));
        }
        let mut m = None;
        let mut vectors: Option<Vec<F4Vec>> = None;
        let mut signs = None;
        let mut groups: Vec<(String, Vec<F4Vec>)> = Vec::new();
        let mut meta = Vec::new();
        let mut plan_text = None;
        let mut unit_texts = Vec::new();
        for line in lines {
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got '{line}'")))?;
            let value = value.trim();
            match key.trim() {
                "m" => m = Some(value.parse::<usize>().map_err(|_| Error::Parse(format!("bad m '{value}'")))?),
                "vectors" => vectors = Some(value.split_whitespace().map(str::parse).collect::<Result<Vec<F4Vec>>>()?),
                "signs" => {
                    signs = Some(
                        value
                            .split_whitespace()
                            .map(|t| match t {
                                "1" => Ok(1),
                                "-1" => Ok(-1),
                                _ => Err(Error::Parse(format!("bad sign '{t}'"))),
                            })
                            .collect::<Result<Vec<i8>>>()?,
                    )
                }
                "plan" => plan_text = Some(value.to_string()),
                "unit" => unit_texts.push(value.to_string()),
                k => {
                    if let Some(name) = k.strip_prefix("group.") {
                        groups.push((name.into(), value.split_whitespace().map(str::parse).collect::<Result<Vec<F4Vec>>>()?));
                    } else if let Some(name) = k.strip_prefix("meta.") {
                        meta.push((name.to_string(), value.to_string()));
                    } else {
                        return Err(Error::Parse(format!("unknown key '{k}'")));
                    }
                }
            }
        }
        let m = m.ok_or_else(|| Error::Parse("missing m".into()))?;
        let vectors = vectors.ok_or_else(|| Error::Parse("missing vectors".into()))?;
        let mut design = Design::new(m, vectors)?;
        if !groups.is_empty() {
            let named = groups
                .into_iter()
                .map(|(name, vs)| {
                    let members = vs
                        .iter()
                        .map(|v| design.index_of(v).ok_or_else(|| Error::MalformedPartition(format!("group {name} lists unknown vector {v}"))))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Group { name, members })
                })
                .collect::<Result<Vec<_>>>()?;
            design = design.with_groups(named)?;
            if validate {
                let report = validate_partition(&design, &design.partition_indices())?;
                if let Some((i, j)) = report.witness {
                    return Err(Error::InvalidPartition(format!(
                        "vectors {} ({}) and {} ({}) are in different groups but their sum has even weight",
                        i + 1,
                        design.vector(i),
                        j + 1,
                        design.vector(j)
                    )));
                }
            }
        }
        let k = design.k();
        let signs = signs.unwrap_or_else(|| vec![1; k]);
        if signs.len() != k {
            return Err(Error::DimensionMismatch(signs.len(), k));
        }
        let plan = plan_text.map(|p| DecodePlan::parse(k, &p)).transpose()?;
        let signal = if unit_texts.is_empty() {
            None
        } else {
            Some(SignalSet::new(k, unit_texts.iter().map(|u| parse_unit(u, k)).collect::<Result<_>>()?)?)
        };
        Ok(DesignFile { design, signs, meta, plan, signal })
    }
}
