//! Decode plans and their metric-evaluation counts.
//!
//! A plan is a tree. A leaf jointly enumerates its real symbols, except that
//! one component may be found by scaling and hard limiting. A conditional
//! node enumerates its conditioning symbols and, for each hypothesis, decodes
//! its children independently. With `√M` values per real symbol:
//!
//! ```text
//! cost(Leaf)               = M^((reals - hl) / 2)
//! cost(Conditional{Γ | c}) = M^(|Γ| / 2) · Σ cost(c_i)
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanNode {
    Conditional { conditioning: Vec<usize>, children: Vec<PlanNode> },
    Leaf { symbols: Vec<usize>, hard_limit: bool },
}

impl PlanNode {
    pub fn leaf(symbols: Vec<usize>, hard_limit: bool) -> PlanNode {
        PlanNode::Leaf { symbols, hard_limit }
    }

    pub fn cond(conditioning: Vec<usize>, children: Vec<PlanNode>) -> PlanNode {
        PlanNode::Conditional { conditioning, children }
    }

    fn collect(&self, out: &mut Vec<usize>) {
        match self {
            PlanNode::Leaf { symbols, .. } => out.extend(symbols),
            PlanNode::Conditional { conditioning, children } => {
                out.extend(conditioning);
                for c in children {
                    c.collect(out);
                }
            }
        }
    }

    /// All symbols below this node, conditioning included.
    pub fn symbols(&self) -> Vec<usize> {
        let mut v = Vec::new();
        self.collect(&mut v);
        v
    }

    // (coefficient, exponent in halves) terms, merged by exponent
    fn terms(&self) -> BTreeMap<i64, u64> {
        match self {
            PlanNode::Leaf { symbols, hard_limit } => {
                let e = symbols.len() as i64 - i64::from(*hard_limit);
                BTreeMap::from([(e, 1)])
            }
            PlanNode::Conditional { conditioning, children } => {
                let shift = conditioning.len() as i64;
                let mut acc = BTreeMap::new();
                for c in children {
                    for (e, k) in c.terms() {
                        *acc.entry(e + shift).or_insert(0) += k;
                    }
                }
                acc
            }
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            PlanNode::Leaf { symbols, .. } => {
                if symbols.is_empty() {
                    return Err(Error::Plan("empty leaf".into()));
                }
            }
            PlanNode::Conditional { children, .. } => {
                if children.is_empty() {
                    return Err(Error::Plan("conditional node without children".into()));
                }
                for c in children {
                    c.check()?;
                }
            }
        }
        Ok(())
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
        match self {
            PlanNode::Leaf { symbols, hard_limit } => {
                write!(f, "L{{{}{}}}", list(symbols), if *hard_limit { ";hl" } else { "" })
            }
            PlanNode::Conditional { conditioning, children } => {
                write!(f, "C{{{}|", list(conditioning))?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    c.write(f)?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodePlan {
    k: usize,
    root: PlanNode,
}

impl DecodePlan {
    /// Checks that the tree covers `0..k` exactly once.
    pub fn new(k: usize, root: PlanNode) -> Result<DecodePlan> {
        root.check()?;
        let mut seen = vec![false; k];
        for i in root.symbols() {
            if i >= k {
                return Err(Error::Plan(format!("symbol {} out of range 1..={k}", i + 1)));
            }
            if seen[i] {
                return Err(Error::Plan(format!("symbol {} appears twice", i + 1)));
            }
            seen[i] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Plan(format!("symbol {} not covered", i + 1)));
        }
        Ok(DecodePlan { k, root })
    }

    /// One leaf per group decoded in parallel, each optionally hard-limited.
    pub fn multigroup(k: usize, groups: &[Vec<usize>], hard_limit: bool) -> Result<DecodePlan> {
        let leaves = groups.iter().map(|g| PlanNode::leaf(g.clone(), hard_limit)).collect();
        DecodePlan::new(k, PlanNode::cond(Vec::new(), leaves))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> &PlanNode {
        &self.root
    }

    pub fn complexity(&self) -> ComplexityReport {
        ComplexityReport::from_terms(self.root.terms())
    }

    /// Parses the text form, e.g. `C{9 10|L{1 2;hl},L{3 4}}` (1-based).
    pub fn parse(k: usize, text: &str) -> Result<DecodePlan> {
        let mut p = Parser { s: text.trim().as_bytes(), pos: 0 };
        let root = p.node()?;
        if p.pos != p.s.len() {
            return Err(Error::Parse(format!("trailing input in plan at byte {}", p.pos)));
        }
        DecodePlan::new(k, root)
    }
}

impl fmt::Display for DecodePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("plan: expected {what} at byte {}", self.pos))
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("'{}'", c as char)))
        }
    }

    fn indices(&mut self) -> Result<Vec<usize>> {
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b' ') {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        text.split_whitespace()
            .map(|t| match t.parse::<usize>() {
                Ok(i) if i >= 1 => Ok(i - 1),
                _ => Err(Error::Parse(format!("plan: bad index '{t}'"))),
            })
            .collect()
    }

    fn node(&mut self) -> Result<PlanNode> {
        match self.s.get(self.pos) {
            Some(b'L') => {
                self.pos += 1;
                self.eat(b'{')?;
                let symbols = self.indices()?;
                let hard_limit = if self.s[self.pos..].starts_with(b";hl") {
                    self.pos += 3;
                    true
                } else {
                    false
                };
                self.eat(b'}')?;
                Ok(PlanNode::leaf(symbols, hard_limit))
            }
            Some(b'C') => {
                self.pos += 1;
                self.eat(b'{')?;
                let conditioning = self.indices()?;
                self.eat(b'|')?;
                let mut children = vec![self.node()?];
                while self.s.get(self.pos) == Some(&b',') {
                    self.pos += 1;
                    children.push(self.node()?);
                }
                self.eat(b'}')?;
                Ok(PlanNode::cond(conditioning, children))
            }
            _ => Err(self.err("'L' or 'C'")),
        }
    }
}

/// `Σ c_i · M^(e_i / 2)` with the dominant (largest-exponent) term singled out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityReport {
    pub coefficient: u64,
    pub exponent_halves: i64,
    /// All terms as `(coefficient, exponent_halves)`, largest exponent first.
    pub terms: Vec<(u64, i64)>,
}

impl ComplexityReport {
    fn from_terms(terms: BTreeMap<i64, u64>) -> ComplexityReport {
        let terms: Vec<(u64, i64)> = terms.into_iter().rev().map(|(e, c)| (c, e)).collect();
        let (coefficient, exponent_halves) = terms[0];
        ComplexityReport { coefficient, exponent_halves, terms }
    }

    pub fn single(coefficient: u64, exponent_halves: i64) -> ComplexityReport {
        ComplexityReport { coefficient, exponent_halves, terms: vec![(coefficient, exponent_halves)] }
    }

    /// Exact total for a square `M`; `None` on overflow or non-square `M`.
    pub fn total_at(&self, m: u64) -> Option<u128> {
        let root = m.isqrt();
        if root * root != m {
            return None;
        }
        self.terms.iter().try_fold(0u128, |acc, &(c, e)| {
            let e = u32::try_from(e).ok()?;
            let p = u128::from(root).checked_pow(e)?;
            acc.checked_add(u128::from(c).checked_mul(p)?)
        })
    }

    pub fn dominant(&self) -> String {
        term_string(self.coefficient, self.exponent_halves)
    }

    /// Every term, e.g. `5·M^6 + M^0.5`.
    pub fn full(&self) -> String {
        self.terms.iter().map(|&(c, e)| term_string(c, e)).collect::<Vec<_>>().join(" + ")
    }
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dominant())
    }
}

pub fn exponent_string(halves: i64) -> String {
    if halves % 2 == 0 {
        (halves / 2).to_string()
    } else {
        format!("{}.5", halves.div_euclid(2))
    }
}

fn term_string(c: u64, halves: i64) -> String {
    let e = exponent_string(halves);
    if c == 1 {
        format!("M^{e}")
    } else {
        format!("{c}·M^{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_and_conditional_costs() {
        let p = DecodePlan::parse(4, "C{3 4|L{1;hl},L{2;hl}}").unwrap();
        let c = p.complexity();
        assert_eq!((c.coefficient, c.exponent_halves), (2, 2));
        assert_eq!(c.to_string(), "2·M^1");
        assert_eq!(c.total_at(16), Some(32));
        assert_eq!(c.total_at(8), None);
    }

    #[test]
    fn nested_terms_are_kept() {
        let p = DecodePlan::parse(5, "C{|L{1},C{2 3|L{4},L{5}}}").unwrap();
        let c = p.complexity();
        assert_eq!(c.terms, vec![(2, 3), (1, 1)]);
        assert_eq!(c.full(), "2·M^1.5 + M^0.5");
        assert_eq!(c.total_at(4), Some(2 * 8 + 2));
    }

    #[test]
    fn text_round_trip() {
        let s = "C{9 10|L{1 2;hl},C{3|L{4},L{5 6 7 8}}}";
        let p = DecodePlan::parse(10, s).unwrap();
        assert_eq!(p.to_string(), s);
    }

    #[test]
    fn coverage_errors() {
        assert!(DecodePlan::parse(3, "C{1|L{2}}").is_err());
        assert!(DecodePlan::parse(2, "C{1|L{1 2}}").is_err());
        assert!(DecodePlan::parse(2, "C{1|L{3}}").is_err());
        assert!(DecodePlan::parse(2, "C{1|}").is_err());
        assert!(DecodePlan::parse(2, "L{1 2}x").is_err());
        assert!(DecodePlan::parse(1, "L{0}").is_err());
    }

    #[test]
    fn multigroup_forms() {
        // four groups of four reals: g·M^(NR/g) with N=4, R=2, g=4
        let groups: Vec<Vec<usize>> = (0..4).map(|g| (4 * g..4 * g + 4).collect()).collect();
        let plain = DecodePlan::multigroup(16, &groups, false).unwrap().complexity();
        assert_eq!(plain.to_string(), "4·M^2");
        let hl = DecodePlan::multigroup(16, &groups, true).unwrap().complexity();
        assert_eq!(hl.to_string(), "4·M^1.5");
    }

    #[test]
    fn exponent_text() {
        assert_eq!(exponent_string(9), "4.5");
        assert_eq!(exponent_string(1), "0.5");
        assert_eq!(exponent_string(4), "2");
        assert_eq!(exponent_string(0), "0");
    }
}
