//! stbc-forge: build, inspect, verify and simulate GF(4)-labelled space-time
//! block codes.
//!
//! Exit codes: 0 success, 1 failed check or error, 2 usage, 3 infeasible
//! request (rate granularity, codebook too large for exhaustive search).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use stbc_core::catalog::{self, CatalogEntry, NAMES};
use stbc_core::constructions::{apply_sigma, construct_a, construct_b, construct_c, parse_sigma, parse_xi_order};
use stbc_core::design::{finest_partition, validate_partition};
use stbc_core::diversity::{
    common_angle_search, cubic_shaping_check, full_diversity_check, generator_matrix, DEFAULT_GRID, DET_THRESHOLD,
};
use stbc_core::family::{build_code, pair_split};
use stbc_core::io::DesignFile;
use stbc_core::pauli::{anticommute_parity, hr_orthogonal_numeric};
use stbc_core::signal::{qam_side, SignalSet};
use stbc_core::sim::{simulate, DecoderChoice, SimConfig};
use stbc_core::{Design, Error, Stbc, F4};

#[derive(Parser)]
#[command(name = "stbc-forge", version, about = "Space-time block codes labelled by vectors over GF(4)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in designs
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Derive a design with twice the antennas from an existing one
    Construct(ConstructArgs),
    /// Build a member of the fast-decodable family
    BuildFd(BuildFdArgs),
    /// Check a design or code file
    Verify(VerifyArgs),
    /// Monte Carlo codeword error rate
    Simulate(SimulateArgs),
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List catalog names and their parameters
    List,
    /// Describe one entry, e.g. `show ggroup 3 1` or `show "rate1_2x2(1)"`
    Show(ShowArgs),
}

#[derive(Args)]
struct ShowArgs {
    name: String,
    /// Integer parameters of the entry
    #[arg(allow_negative_numbers = true)]
    params: Vec<i64>,
    /// QAM size of the bundled signal set
    #[arg(long = "M", default_value_t = 4)]
    m_qam: u32,
    /// Rotation angle in radians, or `auto` to search for full diversity
    #[arg(long, default_value = "0")]
    theta: String,
    /// Write the code bundle here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    A,
    B,
    C,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum, ignore_case = true)]
    op: Op,
    /// Power of ω used by A and B
    #[arg(long, default_value_t = 0)]
    l: u32,
    /// Four distinct elements for C, e.g. `0,1,w,w2`
    #[arg(long, default_value = "0,1,w,w2")]
    xi_order: String,
    /// Coordinate permutation applied to the result, 1-based, e.g. `2,1`
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_validate: bool,
}

#[derive(Args)]
struct BuildFdArgs {
    #[arg(long)]
    m: usize,
    /// `2`, `5/4` or `1.25`
    #[arg(long)]
    rate: String,
    #[arg(long, default_value = "w2")]
    xi2: String,
    /// `auto` or comma separated radians, one per symbol pair
    #[arg(long, default_value = "auto")]
    angles: String,
    #[arg(long = "M", default_value_t = 4)]
    m_qam: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Suite {
    Partition,
    Shaping,
    Diversity,
    Prop5,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// QAM size used for the diversity check when the file has no signal set
    #[arg(long = "M", default_value_t = 4)]
    m_qam: u32,
    #[arg(long)]
    no_validate: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma separated SNR values in dB
    #[arg(long, default_value = "0,5,10,15,20")]
    snr: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, env = "STBC_FORGE_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "both")]
    decoder: String,
    /// Receive antennas
    #[arg(long, default_value_t = 1)]
    nr: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_validate: bool,
}

/// Verdict of a command that checks something.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Verdict {
    Pass,
    Infeasible,
    Fail,
}

impl Verdict {
    fn code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Infeasible => 3,
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InfeasibleRate(_) | Error::CodebookTooLarge(_)) => 3,
        _ => 1,
    }
}

fn read_file(path: &Path, validate: bool) -> anyhow::Result<DesignFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(DesignFile::parse(&text, validate)?)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rate(s: &str) -> anyhow::Result<Rational64> {
    let s = s.trim();
    let bad = || anyhow!("bad rate '{s}'");
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (i64, i64) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let scale = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    Ok(Rational64::new(int * scale + frac, scale))
}

fn summary(label: &str, d: &Design) -> String {
    format!("{label}: m={} N={} K={} rate={} g={}", d.m(), d.n(), d.k(), d.rate(), d.partition_indices().len())
}

fn describe(e: &CatalogEntry) -> String {
    let d = &e.design;
    let mut s = format!("name={}\nm={}\nN={}\nK={}\nrate={}\ng={}\n", e.name, d.m(), d.n(), d.k(), d.rate(), d.partition_indices().len());
    for (i, g) in d.partition_indices().iter().enumerate() {
        let vs: Vec<String> = g.iter().map(|&j| d.vector(j).to_string()).collect();
        s += &format!("group.{}={}\n", i + 1, vs.join(" "));
    }
    let c = e.plan.complexity();
    s += &format!("plan={}\ncomplexity={}\ndominant={}\n", e.plan, c.full(), c.dominant());
    s
}

fn catalog_show(a: &ShowArgs) -> anyhow::Result<Verdict> {
    let e = catalog::lookup(&a.name, &a.params)?;
    print!("{}", describe(&e));
    let theta = if a.theta == "auto" {
        let (t, min) = common_angle_search(|t| e.stbc(a.m_qam, t), DEFAULT_GRID)?;
        println!("theta={t:.12}\nmin_det={min:.6e}");
        t
    } else {
        a.theta.parse().map_err(|_| anyhow!("bad angle '{}'", a.theta))?
    };
    if let Some(out) = &a.out {
        let stbc = e.stbc(a.m_qam, theta)?;
        let file = DesignFile::from_stbc(&stbc, &e.design)?
            .with_meta("source", &e.name)
            .with_meta("rate", e.design.rate())
            .with_meta("M", a.m_qam);
        emit(&file.to_text(), Some(out))?;
    }
    Ok(Verdict::Pass)
}

fn construct(a: &ConstructArgs) -> anyhow::Result<Verdict> {
    let file = read_file(&a.input, !a.no_validate)?;
    let before = &file.design;
    let mut after = match a.op {
        Op::A => construct_a(before, a.l)?,
        Op::B => construct_b(before, a.l)?,
        Op::C => construct_c(before, parse_xi_order(&a.xi_order)?)?,
    };
    if let Some(s) = &a.sigma {
        after = apply_sigma(&after, &parse_sigma(s)?)?;
    }
    let lines = format!("{}\n{}\n", summary("before", before), summary("after", &after));
    let text = DesignFile::from_design(after).to_text();
    match &a.out {
        Some(p) => {
            print!("{lines}");
            emit(&text, Some(p))?;
        }
        None => {
            eprint!("{lines}");
            print!("{text}");
        }
    }
    Ok(Verdict::Pass)
}

fn build_fd(a: &BuildFdArgs) -> anyhow::Result<Verdict> {
    let rate = parse_rate(&a.rate)?;
    let xi2 = match a.xi2.as_str() {
        "1" => F4::ONE,
        "w2" => F4::W2,
        other => bail!("--xi2 must be 1 or w2, got '{other}'"),
    };
    let angles = match a.angles.as_str() {
        "auto" => None,
        list => Some(
            list.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("bad angle '{t}'")))
                .collect::<anyhow::Result<Vec<_>>>()?,
        ),
    };
    let code = build_code(a.m, rate, xi2, a.m_qam, angles)?;
    let ld = code.stbc.linear_design();
    let design = match &code.design {
        Some(fd) => fd.design.clone(),
        None => {
            let d = ld.to_design()?;
            let groups = finest_partition(&d).groups;
            d.with_partition(groups)?
        }
    };
    let plan = code.stbc.plan().complexity();
    println!("m={}\nN={}\nK={}\nrate={}", code.m, 1 << code.m, ld.k(), code.rate);
    if code.m >= 2 {
        println!("xi2={xi2}");
        let pairs: Vec<String> = pair_split(&design)?.iter().map(|(x, y)| format!("{},{}", x + 1, y + 1)).collect();
        println!("pairs={}", pairs.join(" "));
    }
    let angles: Vec<String> = code.angles.iter().map(|t| format!("{t:.12}")).collect();
    if !angles.is_empty() {
        println!("angles={}", angles.join(","));
    }
    println!("predicted={}", code.predicted.dominant());
    println!("plan={}", code.stbc.plan());
    println!("plan_complexity={}", plan.full());
    println!("full_diversity={}", if code.diversity_by_construction { "by construction" } else { "not certified" });
    if let Some(out) = &a.out {
        let mut file = DesignFile::from_stbc(&code.stbc, &design)?
            .with_meta("m", code.m)
            .with_meta("rate", code.rate)
            .with_meta("predicted", code.predicted.dominant());
        if code.m >= 2 {
            file = file.with_meta("xi2", xi2);
        }
        if !angles.is_empty() {
            file = file.with_meta("angles", angles.join(","));
        }
        emit(&file.to_text(), Some(out))?;
    }
    Ok(Verdict::Pass)
}

fn report(name: &str, v: Verdict, detail: &str) -> Verdict {
    let word = match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::Infeasible => "infeasible",
    };
    println!("{name}: {word} ({detail})");
    v
}

fn check_partition(file: &DesignFile) -> anyhow::Result<Verdict> {
    let d = &file.design;
    if d.groups().is_none() {
        let g = finest_partition(d).groups.len();
        return Ok(report("partition", Verdict::Pass, &format!("no groups attached, finest partition has g={g}")));
    }
    let r = validate_partition(d, &d.partition_indices())?;
    Ok(match r.witness {
        None => report("partition", Verdict::Pass, &format!("g={}", d.partition_indices().len())),
        Some((i, j)) => report(
            "partition",
            Verdict::Fail,
            &format!("vectors {} ({}) and {} ({}) are in different groups with even-weight sum", i + 1, d.vector(i), j + 1, d.vector(j)),
        ),
    })
}

fn check_shaping(file: &DesignFile) -> anyhow::Result<Verdict> {
    let g = generator_matrix(&file.linear_design()?, None)?;
    let scale = g.column(0).norm_squared();
    Ok(if cubic_shaping_check(&g, 1e-9) {
        report("shaping", Verdict::Pass, &format!("GᵀG = {}·I", fmt_scale(scale)))
    } else {
        report("shaping", Verdict::Fail, "GᵀG is not a scalar matrix")
    })
}

fn fmt_scale(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.6}")
    }
}

fn check_prop5(file: &DesignFile) -> anyhow::Result<Verdict> {
    let ld = file.linear_design()?;
    let d = &file.design;
    let k = d.k();
    for i in 0..k {
        for j in 0..k {
            let parity = anticommute_parity(d.vector(i), d.vector(j))?;
            let numeric = hr_orthogonal_numeric(ld.matrix(i), ld.matrix(j), 1e-9)?;
            if parity != numeric {
                let detail = format!("symbols {} and {}: parity says {parity}, matrices say {numeric}", i + 1, j + 1);
                return Ok(report("prop5", Verdict::Fail, &detail));
            }
        }
    }
    Ok(report("prop5", Verdict::Pass, &format!("{} ordered pairs agree", k * k)))
}

fn check_diversity(file: &DesignFile, m_qam: u32) -> anyhow::Result<Verdict> {
    let stbc = match &file.signal {
        Some(_) => file.stbc()?,
        None => {
            let ld = file.linear_design()?;
            let k = ld.k();
            let plan = stbc_core::DecodePlan::multigroup(k, &[(0..k).collect()], false)?;
            Stbc::new(ld, SignalSet::per_symbol_pam(k, qam_side(m_qam)?)?, plan)?
        }
    };
    Ok(match full_diversity_check(&stbc) {
        Ok(min) if min > DET_THRESHOLD => report("diversity", Verdict::Pass, &format!("min |det| = {min:.6e}")),
        Ok(min) => report("diversity", Verdict::Fail, &format!("min |det| = {min:.3e}")),
        Err(Error::CodebookTooLarge(n)) => report("diversity", Verdict::Infeasible, &format!("{n} codewords exceed the exhaustive limit")),
        Err(e) => return Err(e.into()),
    })
}

fn verify(a: &VerifyArgs) -> anyhow::Result<Verdict> {
    let file = match read_file(&a.input, !a.no_validate) {
        Ok(f) => f,
        Err(e) => {
            let what = match e.downcast_ref::<Error>() {
                Some(Error::DuplicateVector(_)) => "distinctness",
                Some(Error::InvalidPartition(_)) => "partition",
                _ => return Err(e),
            };
            return Ok(report(what, Verdict::Fail, &e.to_string()));
        }
    };
    let runs = |s: Suite| a.suite == s || a.suite == Suite::All;
    let mut worst = Verdict::Pass;
    if runs(Suite::Partition) {
        worst = worst.max(check_partition(&file)?);
    }
    if runs(Suite::Shaping) {
        worst = worst.max(check_shaping(&file)?);
    }
    if runs(Suite::Prop5) {
        worst = worst.max(check_prop5(&file)?);
    }
    if runs(Suite::Diversity) {
        worst = worst.max(check_diversity(&file, a.m_qam)?);
    }
    Ok(worst)
}

fn run_simulation(a: &SimulateArgs) -> anyhow::Result<Verdict> {
    let file = read_file(&a.input, !a.no_validate)?;
    let stbc = file.stbc().context("simulation needs a code bundle with a signal set and a decode plan")?;
    let snr_db = a
        .snr
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("bad SNR '{t}'")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let decoder: DecoderChoice = a.decoder.parse()?;
    let cfg = SimConfig { nr: a.nr, snr_db, trials: a.trials, seed: a.seed, decoder, workers: a.workers.max(1) };
    let result = simulate(&cfg, &stbc)?;
    emit(&result.to_text(), a.out.as_deref())?;
    if decoder == DecoderChoice::Both && !result.all_agree() {
        eprintln!("structured decoder disagreed with the exhaustive search");
        return Ok(Verdict::Fail);
    }
    Ok(Verdict::Pass)
}

fn run(cli: Cli) -> anyhow::Result<Verdict> {
    match cli.command {
        Command::Catalog(CatalogCmd::List) => {
            for (name, params) in NAMES {
                if params.is_empty() {
                    println!("{name}");
                } else {
                    println!("{name}  ({params})");
                }
            }
            Ok(Verdict::Pass)
        }
        Command::Catalog(CatalogCmd::Show(a)) => catalog_show(&a),
        Command::Construct(a) => construct(&a),
        Command::BuildFd(a) => build_fd(&a),
        Command::Verify(a) => verify(&a),
        Command::Simulate(a) => run_simulation(&a),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => ExitCode::from(v.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
