//! Quasi-static Rayleigh fading simulation with exhaustive and plan-driven
//! ML decoders.
//!
//! The channel is `Y = X·H + W` with `X` of size `T × N`, `T = N`, and `H`
//! of size `N × N_r` with independent CN(0, 1) entries. Noise entries are
//! CN(0, σ²) with `σ² = E‖X‖_F² / (T·10^(snr/10))`, so `snr` is the average
//! received SNR per receive antenna.
//!
//! Both decoders minimise `‖Y − X·H‖_F²` and keep the first minimum found in
//! codeword index order. The structured decoder works on the real quadratic
//! form `Σ a_c a_d G_cd − 2 Σ a_c r_c` with `G_cd = Re⟨B_c H, B_d H⟩` and
//! `r_c = Re⟨B_c H, Y⟩`, which splits between HR-orthogonal groups.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::diversity::MAX_CODEBOOK;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::plan::PlanNode;
use crate::stbc::Stbc;

/// Nearest point of a sorted set, ties to the lower point.
pub fn hard_limit_pam(v: f64, points: &[f64]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::Signal("empty point set".into()));
    }
    let i = points.partition_point(|&p| p < v);
    if i == 0 {
        return Ok(0);
    }
    if i == points.len() {
        return Ok(i - 1);
    }
    Ok(if v - points[i - 1] <= points[i] - v { i - 1 } else { i })
}

fn cn(rng: &mut ChaCha8Rng, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// `(Y, H)` for codeword `x`; `noise_var` is σ² per complex entry.
pub fn channel_step(x: &ComplexMatrix, nr: usize, noise_var: f64, rng: &mut ChaCha8Rng) -> (ComplexMatrix, ComplexMatrix) {
    let n = x.cols();
    let h = ComplexMatrix::from_vec(n, nr, (0..n * nr).map(|_| cn(rng, 1.0)).collect()).expect("sizes agree");
    let mut y = x * &h;
    if noise_var > 0.0 {
        for r in 0..y.rows() {
            for c in 0..nr {
                let w = cn(rng, noise_var);
                y.set(r, c, y.get(r, c) + w);
            }
        }
    }
    (y, h)
}

fn dist_sq(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

/// Exhaustive ML over the codebook: `(index, metric evaluations)`.
pub fn ml_oracle(y: &ComplexMatrix, h: &ComplexMatrix, stbc: &Stbc) -> Result<(u128, u128)> {
    let size = stbc.size();
    if size > MAX_CODEBOOK {
        return Err(Error::CodebookTooLarge(size));
    }
    let f: Vec<ComplexMatrix> = stbc.components().iter().map(|b| b * h).collect();
    let points = stbc.component_points();
    let q = points.len();
    let len = y.data().len();
    // partial[l] = Σ_{c < l} a_c F_c along the current path
    let mut partial = vec![vec![C64::new(0.0, 0.0); len]; q + 1];
    let mut digits = vec![0usize; q];
    let mut best = (f64::INFINITY, 0u128);
    let mut level = 0;
    let mut index = 0u128;
    loop {
        if level == q {
            let d = dist_sq(y.data(), &partial[q]);
            if d < best.0 {
                best = (d, index);
            }
            index += 1;
            // advance the odometer
            loop {
                if level == 0 {
                    return Ok((best.1, size));
                }
                level -= 1;
                digits[level] += 1;
                if digits[level] < points[level].len() {
                    break;
                }
                digits[level] = 0;
            }
        }
        let a = points[level][digits[level]];
        let (lo, hi) = partial.split_at_mut(level + 1);
        for ((o, p), fv) in hi[0].iter_mut().zip(&lo[level]).zip(f[level].data()) {
            *o = p + fv * a;
        }
        level += 1;
    }
}

#[derive(Clone, Debug)]
enum CompNode {
    Leaf { comps: Vec<usize>, hl: Option<usize> },
    Cond { comps: Vec<usize>, children: Vec<CompNode> },
}

fn comps_of(stbc: &Stbc, symbols: &[usize]) -> Vec<usize> {
    let sig = stbc.signal();
    let offsets = sig.unit_offsets();
    let mut units: Vec<usize> = symbols.iter().map(|&s| sig.unit_of(s)).collect();
    units.sort_unstable();
    units.dedup();
    units.iter().flat_map(|&u| offsets[u]..offsets[u] + sig.units()[u].dim()).collect()
}

fn to_comp_tree(stbc: &Stbc, node: &PlanNode) -> CompNode {
    match node {
        PlanNode::Leaf { symbols, hard_limit } => {
            let comps = comps_of(stbc, symbols);
            let hl = match (hard_limit, symbols.last()) {
                (true, Some(&s)) => Some(stbc.signal().unit_offsets()[stbc.signal().unit_of(s)]),
                _ => None,
            };
            CompNode::Leaf { comps, hl }
        }
        PlanNode::Conditional { conditioning, children } => CompNode::Cond {
            comps: comps_of(stbc, conditioning),
            children: children.iter().map(|c| to_comp_tree(stbc, c)).collect(),
        },
    }
}

/// A plan-driven decoder bound to one code.
pub struct StructuredDecoder<'a> {
    stbc: &'a Stbc,
    tree: CompNode,
}

struct Trial<'a> {
    g: Vec<f64>,
    r: Vec<f64>,
    q: usize,
    points: &'a [Vec<f64>],
    vals: Vec<f64>,
    digits: Vec<usize>,
    fixed: Vec<usize>,
    count: u128,
}

impl Trial<'_> {
    fn gram(&self, c: usize, d: usize) -> f64 {
        self.g[c * self.q + d]
    }

    fn set(&mut self, c: usize, d: usize) {
        self.digits[c] = d;
        self.vals[c] = self.points[c][d];
    }

    /// Linear coefficients given the fixed components.
    fn linear(&self, comps: &[usize]) -> Vec<f64> {
        comps
            .iter()
            .map(|&c| -2.0 * self.r[c] + 2.0 * self.fixed.iter().map(|&d| self.vals[d] * self.gram(c, d)).sum::<f64>())
            .collect()
    }

    fn local(&self, comps: &[usize], lin: &[f64]) -> f64 {
        let mut m = 0.0;
        for (i, &c) in comps.iter().enumerate() {
            let a = self.vals[c];
            let mut quad = 0.0;
            for &d in comps {
                quad += self.vals[d] * self.gram(c, d);
            }
            m += a * (lin[i] + quad);
        }
        m
    }

    /// Steps the mixed-radix counter over `comps`; false once it wraps.
    fn advance(&mut self, comps: &[usize]) -> bool {
        for &c in comps.iter().rev() {
            if self.digits[c] + 1 < self.points[c].len() {
                let d = self.digits[c] + 1;
                self.set(c, d);
                return true;
            }
            self.set(c, 0);
        }
        false
    }

    fn leaf(&mut self, comps: &[usize], hl: Option<usize>) -> f64 {
        let lin = self.linear(comps);
        let free: Vec<usize> = comps.iter().copied().filter(|&c| Some(c) != hl).collect();
        let h_pos = hl.and_then(|h| comps.iter().position(|&c| c == h));
        for &c in &free {
            self.set(c, 0);
        }
        let mut best = (f64::INFINITY, Vec::new());
        loop {
            if let (Some(h), Some(hp)) = (hl, h_pos) {
                let mut b = lin[hp];
                for &d in &free {
                    b += 2.0 * self.vals[d] * self.gram(h, d);
                }
                let gh = self.gram(h, h);
                let target = if gh > 0.0 { -b / (2.0 * gh) } else { 0.0 };
                let idx = hard_limit_pam(target, &self.points[h]).expect("nonempty points");
                self.set(h, idx);
            }
            self.count += 1;
            let m = self.local(comps, &lin);
            if m < best.0 {
                best = (m, comps.iter().map(|&c| self.digits[c]).collect());
            }
            if !self.advance(&free) {
                break;
            }
        }
        for (&c, &d) in comps.iter().zip(&best.1) {
            self.set(c, d);
        }
        best.0
    }

    fn node(&mut self, node: &CompNode) -> f64 {
        match node {
            CompNode::Leaf { comps, hl } => self.leaf(comps, *hl),
            CompNode::Cond { comps, children } => {
                let lin = self.linear(comps);
                let below: Vec<usize> = children.iter().flat_map(subtree_comps).collect();
                for &c in comps {
                    self.set(c, 0);
                }
                let mut best = (f64::INFINITY, Vec::new(), Vec::new());
                loop {
                    let mut total = self.local(comps, &lin);
                    let depth = self.fixed.len();
                    self.fixed.extend(comps);
                    for child in children {
                        total += self.node(child);
                    }
                    self.fixed.truncate(depth);
                    if total < best.0 {
                        best = (
                            total,
                            comps.iter().map(|&c| self.digits[c]).collect(),
                            below.iter().map(|&c| self.digits[c]).collect(),
                        );
                    }
                    if !self.advance(comps) {
                        break;
                    }
                }
                for (&c, &d) in comps.iter().zip(&best.1).chain(below.iter().zip(&best.2)) {
                    self.set(c, d);
                }
                best.0
            }
        }
    }
}

fn subtree_comps(node: &CompNode) -> Vec<usize> {
    match node {
        CompNode::Leaf { comps, .. } => comps.clone(),
        CompNode::Cond { comps, children } => {
            let mut v = comps.clone();
            for c in children {
                v.extend(subtree_comps(c));
            }
            v
        }
    }
}

impl<'a> StructuredDecoder<'a> {
    pub fn new(stbc: &'a Stbc) -> StructuredDecoder<'a> {
        StructuredDecoder { stbc, tree: to_comp_tree(stbc, stbc.plan().root()) }
    }

    /// `(index, metric evaluations)`.
    pub fn decode(&self, y: &ComplexMatrix, h: &ComplexMatrix) -> (u128, u128) {
        let f: Vec<ComplexMatrix> = self.stbc.components().iter().map(|b| b * h).collect();
        let q = f.len();
        let mut g = vec![0.0; q * q];
        for c in 0..q {
            for d in c..q {
                let v = f[c].inner_re(&f[d]);
                g[c * q + d] = v;
                g[d * q + c] = v;
            }
        }
        let r = f.iter().map(|fc| fc.inner_re(y)).collect();
        let points = self.stbc.component_points();
        let mut t = Trial {
            g,
            r,
            q,
            points,
            vals: points.iter().map(|p| p[0]).collect(),
            digits: vec![0; q],
            fixed: Vec::new(),
            count: 0,
        };
        t.node(&self.tree);
        (self.stbc.index_of(&t.digits), t.count)
    }
}

pub fn ml_structured(y: &ComplexMatrix, h: &ComplexMatrix, stbc: &Stbc) -> (u128, u128) {
    StructuredDecoder::new(stbc).decode(y, h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderChoice {
    Oracle,
    Structured,
    Both,
}

impl DecoderChoice {
    pub fn name(self) -> &'static str {
        match self {
            DecoderChoice::Oracle => "oracle",
            DecoderChoice::Structured => "structured",
            DecoderChoice::Both => "both",
        }
    }
}

impl std::str::FromStr for DecoderChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(DecoderChoice::Oracle),
            "structured" => Ok(DecoderChoice::Structured),
            "both" => Ok(DecoderChoice::Both),
            other => Err(Error::Parse(format!("unknown decoder '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub nr: usize,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub decoder: DecoderChoice,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub noise_var: f64,
    pub errors: u64,
    /// Trials where both decoders returned the same index.
    pub agreements: u64,
    pub oracle_evals: u128,
    pub structured_evals: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub seed: u64,
    pub trials: u64,
    pub decoder: DecoderChoice,
    pub n: usize,
    pub nr: usize,
    pub codebook: u128,
    pub energy: f64,
    pub points: Vec<SnrPoint>,
}

impl SimResult {
    pub fn all_agree(&self) -> bool {
        self.decoder != DecoderChoice::Both || self.points.iter().all(|p| p.agreements == self.trials)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "stbc-sim v1");
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "trials={}", self.trials);
        let _ = writeln!(s, "decoder={}", self.decoder.name());
        let _ = writeln!(s, "n={}", self.n);
        let _ = writeln!(s, "nr={}", self.nr);
        let _ = writeln!(s, "codebook={}", self.codebook);
        let _ = writeln!(s, "energy={:.12}", self.energy);
        let _ = writeln!(s, "noise=sigma2 = energy / (n * 10^(snr_db/10)) per complex entry");
        let _ = writeln!(s, "columns=snr_db noise_var errors cer agreements oracle_evals_per_trial structured_evals_per_trial");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{} {:.12e} {} {:.6e} {} {} {}",
                p.snr_db,
                p.noise_var,
                p.errors,
                p.errors as f64 / self.trials as f64,
                p.agreements,
                per_trial(p.oracle_evals, self.trials),
                per_trial(p.structured_evals, self.trials)
            );
        }
        s
    }
}

fn per_trial(total: u128, trials: u64) -> String {
    let t = u128::from(trials.max(1));
    if total % t == 0 {
        (total / t).to_string()
    } else {
        format!("{:.6}", total as f64 / t as f64)
    }
}

/// Random stream for one trial at one SNR point.
pub fn trial_rng(seed: u64, snr_index: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 32) | trial);
    rng
}

pub fn noise_variance(energy: f64, t: usize, snr_db: f64) -> f64 {
    energy / (t as f64 * 10f64.powf(snr_db / 10.0))
}

pub fn simulate(cfg: &SimConfig, stbc: &Stbc) -> Result<SimResult> {
    if cfg.nr == 0 || cfg.trials == 0 || cfg.trials >= 1 << 32 {
        return Err(Error::OutOfRange("need nr ≥ 1 and 1 ≤ trials < 2^32".into()));
    }
    if cfg.decoder != DecoderChoice::Structured && stbc.size() > MAX_CODEBOOK {
        return Err(Error::CodebookTooLarge(stbc.size()));
    }
    let energy = stbc.average_energy();
    let n = stbc.n();
    let decoder = StructuredDecoder::new(stbc);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let mut points = Vec::new();
    for (si, &snr) in cfg.snr_db.iter().enumerate() {
        let noise_var = noise_variance(energy, n, snr);
        let (errors, agreements, oe, se) = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut rng = trial_rng(cfg.seed, si, trial);
                    let sent = rng.random_range(0..stbc.size());
                    let (y, h) = channel_step(&stbc.codeword(sent), cfg.nr, noise_var, &mut rng);
                    let o = (cfg.decoder != DecoderChoice::Structured).then(|| ml_oracle(&y, &h, stbc).expect("size checked"));
                    let s = (cfg.decoder != DecoderChoice::Oracle).then(|| decoder.decode(&y, &h));
                    let decided = o.or(s).map_or(sent, |d| d.0);
                    let agree = matches!((o, s), (Some(a), Some(b)) if a.0 == b.0);
                    (u64::from(decided != sent), u64::from(agree), o.map_or(0, |x| x.1), s.map_or(0, |x| x.1))
                })
                .reduce(|| (0, 0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3))
        });
        points.push(SnrPoint { snr_db: snr, noise_var, errors, agreements, oracle_evals: oe, structured_evals: se });
    }
    Ok(SimResult {
        seed: cfg.seed,
        trials: cfg.trials,
        decoder: cfg.decoder,
        n,
        nr: cfg.nr,
        codebook: stbc.size(),
        energy,
        points,
    })
}
