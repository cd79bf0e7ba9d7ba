//! Command line front end. Points are 1-based in every input and output;
//! conversion to the 0-based library form happens here and nowhere else.
//!
//! Exit codes: 0 success or true, 1 internal error, 2 usage or invalid
//! input, 3 false (non-isomorphic, or a verification mismatch).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::design::{self, Block, ClassifiedDesign, Design};
use crate::grouplib::{self, Variant};
use crate::isomorph;
use crate::permcore::PermGroup;
use crate::sieve;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "K2DESIGN_WORKERS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FALSE: u8 = 3;

/// Base blocks and λ of the 46 PSL(2,8) classes, one per line.
pub const PSL28_GOLDEN: &str = include_str!("../data/psl28_designs.tsv");

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "k2design", version, about = "Block-transitive 2-(36,6,lambda) designs and the PSL(2,q) sieve")]
pub struct RunConfig {
    /// Print timings to stderr.
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Worker threads (default: all available cores).
    #[arg(long, global = true, env = WORKERS_ENV, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

impl RunConfig {
    fn workers(&self) -> usize {
        self.workers
            .map(|w| w as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the orbit of one base block and report its design parameters.
    Construct(ConstructArgs),
    /// Classify all block-transitive designs of a group up to isomorphism.
    Classify(ClassifyArgs),
    /// Run the arithmetic sieve over PSL(2,q) point actions.
    Sieve(SieveArgs),
    /// Compare a classification against embedded reference data.
    Verify(VerifyArgs),
    /// Decide whether two design files are isomorphic.
    Iso(IsoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Socle,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ActionArg {
    /// The projective line, q+1 points.
    Line,
    /// Unordered pairs of projective points, q(q+1)/2 points.
    Pairs,
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// Built-in group name.
    #[arg(long, conflicts_with = "q")]
    pub group: Option<String>,
    /// Field order for a generated PSL(2,q) group.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, value_enum, default_value_t = VariantArg::Socle, requires = "q")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value_t = ActionArg::Pairs, requires = "q")]
    pub action: ActionArg,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Comma separated base block, 1-based.
    #[arg(long)]
    pub base: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub t: u32,
    /// Only report classes with this λ.
    #[arg(long)]
    pub lambda: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SieveArgs {
    #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(4..=sieve::MAX_Q))]
    pub qmax: u64,
    /// Report every verdict, not only survivors.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Check the 46 PSL(2,8) classes against the embedded table.
    #[arg(long, required = true)]
    pub table2: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct IsoArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

/// What a command concluded, mapped to exit codes 0 and 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    True,
    False,
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&config) {
        Ok(Outcome::True) => EXIT_OK,
        Ok(Outcome::False) => EXIT_FALSE,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    let workers = config.workers();
    let start = Instant::now();
    let outcome = match &config.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Classify(a) => cmd_classify(a, workers),
        Command::Sieve(a) => cmd_sieve(a),
        Command::Verify(a) => cmd_verify(a, workers),
        Command::Iso(a) => cmd_iso(a),
    };
    if config.verbose > 0 {
        eprintln!("finished in {:.2?} with {workers} worker(s)", start.elapsed());
    }
    outcome
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(internal)
        }
    }
}

/// Resolves the group selector to a group and a display name.
pub fn resolve_group(args: &GroupArgs) -> Result<(PermGroup, String), CliError> {
    if let Some(name) = &args.group {
        let g = grouplib::builtin(name).map_err(|_| {
            usage(format!(
                "unknown group {name:?}; built-in groups: {}",
                grouplib::BUILTIN_NAMES.join(", ")
            ))
        })?;
        return Ok((g, name.clone()));
    }
    let Some(q) = args.q else {
        return Err(usage("give --group or --q"));
    };
    let variant = match args.variant {
        VariantArg::Socle => Variant::Socle,
        VariantArg::Full => Variant::Full,
    };
    let (g, labeling) = grouplib::projective_group(q, variant).map_err(usage)?;
    let prefix = match args.variant {
        VariantArg::Socle => "psl",
        VariantArg::Full => "pgammal",
    };
    match args.action {
        ActionArg::Line => Ok((g, format!("{prefix}(2,{q})-line"))),
        ActionArg::Pairs => {
            let (pg, _) = grouplib::pair_action(&g, &labeling).map_err(usage)?;
            Ok((pg, format!("{prefix}(2,{q})-pairs")))
        }
    }
}

/// Parses `1,2,4` into a block over `v` points.
pub fn parse_block(text: &str, v: usize) -> Result<Block, CliError> {
    let mut points = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let p: usize = part
            .parse()
            .map_err(|_| usage(format!("bad point {part:?} in block {text:?}")))?;
        if p == 0 || p > v {
            return Err(usage(format!("point {p} out of range 1..={v}")));
        }
        if points.contains(&(p - 1)) {
            return Err(usage(format!("point {p} repeated in block")));
        }
        points.push(p - 1);
    }
    Block::from_points(&points).map_err(usage)
}

fn one_based(block: Block) -> Vec<usize> {
    block.points().map(|p| p + 1).collect()
}

fn block_text(block: Block) -> String {
    block.to_one_based_string()
}

/// The JSON form of a constructed design. `iso` reads `v` and `blocks` only.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DesignRecord {
    pub group: String,
    pub group_order: String,
    pub v: usize,
    pub k: usize,
    pub t: usize,
    pub base_block: Vec<usize>,
    pub b: usize,
    /// `design` when every t-subset is covered equally often, else
    /// `not-a-design`.
    pub status: String,
    pub lambda: Option<u64>,
    /// λ_0 (= b) through λ_t.
    pub lambdas: Option<Vec<u64>>,
    pub nontrivial: bool,
    pub block_transitive: bool,
    pub flag_transitive: bool,
    pub certificate: String,
    pub blocks: Vec<Vec<usize>>,
}

pub fn design_record(group: &PermGroup, name: &str, base: Block, t: usize) -> Result<DesignRecord, CliError> {
    let design = design::orbit_design(group, base).map_err(usage)?;
    let k = design.k();
    let lambda = if t <= k {
        design::lambda_of(&design, t).map_err(internal)?
    } else {
        None
    };
    let lambdas = lambda.map(|l| {
        design::lambda_vector(design.v(), k, t, l)
            .values
            .iter()
            .map(|x| design::as_u64(x).expect("integral for an actual design"))
            .collect()
    });
    let cert = isomorph::certificate(&design).map_err(internal)?;
    Ok(DesignRecord {
        group: name.to_string(),
        group_order: group.order().to_string(),
        v: design.v(),
        k,
        t,
        base_block: one_based(base),
        b: design.b(),
        status: if lambda.is_some() { "design" } else { "not-a-design" }.to_string(),
        lambda,
        lambdas,
        nontrivial: lambda.is_some() && design.is_nontrivial(t),
        block_transitive: design::is_block_transitive(group, &design).map_err(internal)?,
        flag_transitive: design::is_flag_transitive(group, &design).map_err(internal)?,
        certificate: cert.digest(),
        blocks: design.blocks().iter().map(|&b| one_based(b)).collect(),
    })
}

fn csv_points(points: &[usize]) -> String {
    points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_construct(args: &ConstructArgs) -> Result<Outcome, CliError> {
    let (group, name) = resolve_group(&args.group)?;
    let base = parse_block(&args.base, group.degree())?;
    if base.len() >= group.degree() {
        return Err(usage(format!("block size {} must be less than v = {}", base.len(), group.degree())));
    }
    let rec = design_record(&group, &name, base, args.t as usize)?;
    let text = match args.format {
        Format::Json => serde_json::to_string(&rec).map_err(internal)? + "\n",
        Format::Csv => {
            let mut s = String::from("block\n");
            for b in &rec.blocks {
                writeln!(s, "{}", csv_points(b)).unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "group          {} (order {})", rec.group, rec.group_order).unwrap();
            writeln!(s, "base block     {}", block_text(base)).unwrap();
            writeln!(s, "parameters     v={} k={} b={}", rec.v, rec.k, rec.b).unwrap();
            match rec.lambda {
                Some(l) => writeln!(s, "status         {}-design, lambda={l}", rec.t).unwrap(),
                None => writeln!(s, "status         not a {}-design", rec.t).unwrap(),
            }
            writeln!(s, "non-trivial    {}", rec.nontrivial).unwrap();
            writeln!(s, "flag-trans.    {}", rec.flag_transitive).unwrap();
            writeln!(s, "certificate    {}", rec.certificate).unwrap();
            s
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(Outcome::True)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassRow {
    pub case: usize,
    pub base_block: Vec<usize>,
    pub lambda: u64,
    pub b: usize,
    pub orbits: usize,
    pub flag_transitive: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub group: String,
    pub group_order: String,
    pub v: usize,
    pub k: usize,
    pub t: usize,
    pub classes: usize,
    pub lambda_counts: BTreeMap<u64, usize>,
    pub rows: Vec<ClassRow>,
}

/// Classifies and annotates each class with flag-transitivity under `group`.
pub fn classify_report(
    group: &PermGroup,
    name: &str,
    k: usize,
    t: usize,
    workers: usize,
) -> Result<(Vec<ClassifiedDesign>, ClassifyReport), CliError> {
    let classes = design::classify(group, k, t, workers).map_err(usage)?;
    let mut lambda_counts = BTreeMap::new();
    let mut rows = Vec::with_capacity(classes.len());
    for (i, c) in classes.iter().enumerate() {
        *lambda_counts.entry(c.lambda).or_insert(0) += 1;
        let d = design::orbit_design(group, c.base).map_err(internal)?;
        rows.push(ClassRow {
            case: i + 1,
            base_block: one_based(c.base),
            lambda: c.lambda,
            b: c.b,
            orbits: c.orbit_count,
            flag_transitive: design::is_flag_transitive(group, &d).map_err(internal)?,
            certificate: c.certificate_id(),
        });
    }
    let report = ClassifyReport {
        group: name.to_string(),
        group_order: group.order().to_string(),
        v: group.degree(),
        k,
        t,
        classes: classes.len(),
        lambda_counts,
        rows,
    };
    Ok((classes, report))
}

pub fn render_classify(report: &ClassifyReport, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => serde_json::to_string(report).map_err(internal)? + "\n",
        Format::Csv => {
            let mut s = String::from("case,base_block,lambda,b,orbits,flag_transitive,certificate\n");
            for r in &report.rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    r.case,
                    csv_points(&r.base_block),
                    r.lambda,
                    r.b,
                    r.orbits,
                    r.flag_transitive,
                    r.certificate
                )
                .unwrap();
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(
                s,
                "{}: {}-({},{},lambda) designs, {} classes",
                report.group, report.t, report.v, report.k, report.classes
            )
            .unwrap();
            let counts: Vec<String> = report.lambda_counts.iter().map(|(l, n)| format!("{l}:{n}")).collect();
            writeln!(s, "lambda counts {}", counts.join(" ")).unwrap();
            writeln!(s, "{:>4}  {:<22} {:>6} {:>5} {:>6}  flag  certificate", "case", "base block", "lambda", "b", "orbits").unwrap();
            for r in &report.rows {
                let base = format!(
                    "{{{}}}",
                    r.base_block.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
                );
                writeln!(
                    s,
                    "{:>4}  {:<22} {:>6} {:>5} {:>6}  {:<4}  {}",
                    r.case,
                    base,
                    r.lambda,
                    r.b,
                    r.orbits,
                    if r.flag_transitive { "yes" } else { "no" },
                    &r.certificate[..16]
                )
                .unwrap();
            }
            s
        }
    })
}

fn cmd_classify(args: &ClassifyArgs, workers: usize) -> Result<Outcome, CliError> {
    let (group, name) = resolve_group(&args.group)?;
    let (k, t) = (args.k as usize, args.t as usize);
    if t > k {
        return Err(usage(format!("t = {t} exceeds k = {k}")));
    }
    let (_, mut report) = classify_report(&group, &name, k, t, workers)?;
    if let Some(l) = args.lambda {
        report.rows.retain(|r| r.lambda == l);
    }
    emit(args.out.as_deref(), &render_classify(&report, args.format)?)?;
    Ok(Outcome::True)
}

pub fn render_sieve(report: &sieve::SieveReport, verdicts: &[sieve::SieveVerdict], format: Format) -> Result<String, CliError> {
    let mut s = String::new();
    match format {
        Format::Json => {
            for v in verdicts {
                s += &serde_json::to_string(v).map_err(internal)?;
                s.push('\n');
            }
            let summary = serde_json::json!({
                "summary": {
                    "q_max": report.q_max,
                    "prime_powers": report.prime_powers,
                    "cases": report.cases,
                    "eliminated": report.eliminated,
                    "survivors": report.survivors.len(),
                    "nontrivial_survivors": report.nontrivial_survivors().count(),
                }
            });
            s += &summary.to_string();
            s.push('\n');
        }
        Format::Csv => {
            s += "q,case,stabilizer,v,k,failed,survivor,trivial\n";
            for v in verdicts {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    v.q,
                    v.case_id,
                    v.stabilizer,
                    v.v,
                    v.k.map_or(String::new(), |k| k.to_string()),
                    v.failed.map_or(String::new(), |c| c.to_string()),
                    v.survivor,
                    v.trivial
                )
                .unwrap();
            }
        }
        Format::Text => {
            writeln!(
                s,
                "verified range: prime powers 4 <= q <= {} ({} values, {} cases)",
                report.q_max, report.prime_powers, report.cases
            )
            .unwrap();
            for (c, n) in &report.eliminated {
                writeln!(s, "  eliminated by {c:<17} {n}").unwrap();
            }
            writeln!(s, "  passed all constraints    {}", report.survivors.len()).unwrap();
            writeln!(s).unwrap();
            writeln!(s, "{:>6}  {:<15} {:<22} {:>12} {:>6}  result", "q", "case", "stabilizer", "v", "k").unwrap();
            for v in verdicts {
                let result = match (v.failed, v.trivial) {
                    (Some(c), _) => format!("eliminated: {c}"),
                    (None, true) => "survivor, trivial design".to_string(),
                    (None, false) => "SURVIVOR".to_string(),
                };
                writeln!(
                    s,
                    "{:>6}  {:<15} {:<22} {:>12} {:>6}  {}",
                    v.q,
                    v.case_id,
                    v.stabilizer,
                    v.v,
                    v.k.map_or("-".to_string(), |k| k.to_string()),
                    result
                )
                .unwrap();
            }
        }
    }
    Ok(s)
}

fn cmd_sieve(args: &SieveArgs) -> Result<Outcome, CliError> {
    let report = sieve::run(args.qmax);
    let verdicts = if args.all {
        sieve::all_verdicts(args.qmax)
    } else {
        report.survivors.clone()
    };
    emit(args.out.as_deref(), &render_sieve(&report, &verdicts, args.format)?)?;
    Ok(Outcome::True)
}

/// One line of the embedded reference table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoldenRow {
    pub case: usize,
    pub base: Block,
    pub lambda: u64,
}

pub fn golden_table2() -> Vec<GoldenRow> {
    PSL28_GOLDEN
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|line| {
            let mut cols = line.split('\t');
            let case = cols.next().unwrap().parse().unwrap();
            let base = parse_block(cols.next().unwrap(), 36).expect("valid golden block");
            let lambda = cols.next().unwrap().parse().unwrap();
            GoldenRow { case, base, lambda }
        })
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct Table2Check {
    pub mismatches: Vec<String>,
    /// Reference rows whose base block is also the least base block of its
    /// class in our classification.
    pub same_representative: usize,
}

impl Table2Check {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks each reference (base block, λ) against `classes`: λ agrees, the
/// reference designs are pairwise non-isomorphic, and together they cover
/// every class.
pub fn check_table2(group: &PermGroup, classes: &[ClassifiedDesign]) -> Result<Table2Check, CliError> {
    let golden = golden_table2();
    let by_cert: HashMap<_, _> = classes.iter().map(|c| (c.certificate.clone(), c)).collect();
    let mut check = Table2Check::default();
    let mut seen = HashSet::new();
    for row in &golden {
        let d: Design = design::orbit_design(group, row.base).map_err(internal)?;
        let lambda = design::lambda_of(&d, 2).map_err(internal)?;
        if lambda != Some(row.lambda) {
            check.mismatches.push(format!(
                "case {}: {} gives lambda {:?}, expected {}",
                row.case,
                block_text(row.base),
                lambda,
                row.lambda
            ));
        }
        let cert = isomorph::certificate(&d).map_err(internal)?;
        match by_cert.get(&cert) {
            None => check
                .mismatches
                .push(format!("case {}: {} matches no class", row.case, block_text(row.base))),
            Some(c) => {
                if c.lambda != row.lambda {
                    check.mismatches.push(format!(
                        "case {}: class lambda {} differs from {}",
                        row.case, c.lambda, row.lambda
                    ));
                }
                if c.base == row.base {
                    check.same_representative += 1;
                }
            }
        }
        if !seen.insert(cert) {
            check
                .mismatches
                .push(format!("case {}: isomorphic to an earlier case", row.case));
        }
    }
    if golden.len() != classes.len() {
        check.mismatches.push(format!(
            "{} reference cases but {} classes",
            golden.len(),
            classes.len()
        ));
    }
    for c in classes {
        if !seen.contains(&c.certificate) {
            check
                .mismatches
                .push(format!("class {} (lambda {}) is not in the reference table", block_text(c.base), c.lambda));
        }
    }
    Ok(check)
}

fn cmd_verify(args: &VerifyArgs, workers: usize) -> Result<Outcome, CliError> {
    debug_assert!(args.table2);
    let group = grouplib::builtin(grouplib::PSL28_PAPER36).map_err(internal)?;
    let classes = design::classify(&group, 6, 2, workers).map_err(internal)?;
    let check = check_table2(&group, &classes)?;
    let mut s = String::new();
    for m in &check.mismatches {
        writeln!(s, "MISMATCH {m}").unwrap();
    }
    writeln!(
        s,
        "{} classes, {} reference cases, {} mismatches, {} with identical base block",
        classes.len(),
        golden_table2().len(),
        check.mismatches.len(),
        check.same_representative
    )
    .unwrap();
    writeln!(s, "{}", if check.passed() { "OK" } else { "FAILED" }).unwrap();
    emit(args.out.as_deref(), &s)?;
    Ok(if check.passed() { Outcome::True } else { Outcome::False })
}

#[derive(Deserialize)]
struct DesignInput {
    v: usize,
    blocks: Vec<Vec<usize>>,
}

/// Reads a design file: a JSON object with `v` and 1-based `blocks`.
pub fn load_design(path: &Path) -> Result<Design, CliError> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let input: DesignInput =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let blocks = input
        .blocks
        .iter()
        .map(|b| {
            let text = b.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
            parse_block(&text, input.v)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Design::new(input.v, blocks).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cmd_iso(args: &IsoArgs) -> Result<Outcome, CliError> {
    let a = load_design(&args.a)?;
    let b = load_design(&args.b)?;
    match isomorph::isomorphism(&a, &b).map_err(usage)? {
        Some(sigma) => {
            println!("isomorphic via {}", sigma.to_cycle_string(1));
            Ok(Outcome::True)
        }
        None => {
            println!("not isomorphic");
            Ok(Outcome::False)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_parsing() {
        assert_eq!(one_based(parse_block("1, 2,36", 36).unwrap()), vec![1, 2, 36]);
        assert!(matches!(parse_block("0,1", 36), Err(CliError::Usage(_))));
        assert!(matches!(parse_block("37", 36), Err(CliError::Usage(_))));
        assert!(matches!(parse_block("1,1", 36), Err(CliError::Usage(_))));
        assert!(matches!(parse_block("1,x", 36), Err(CliError::Usage(_))));
    }

    #[test]
    fn golden_table_shape() {
        let rows = golden_table2();
        assert_eq!(rows.len(), 46);
        assert!(rows.iter().enumerate().all(|(i, r)| r.case == i + 1 && r.base.len() == 6));
        let mut counts = BTreeMap::new();
        for r in &rows {
            *counts.entry(r.lambda).or_insert(0) += 1;
        }
        assert_eq!(counts, BTreeMap::from([(2, 1), (6, 3), (12, 42)]));
    }

    #[test]
    fn parse_config() {
        let c = RunConfig::try_parse_from(["k2design", "--workers", "3", "classify", "--group", "psl28_paper36", "--lambda", "6"]).unwrap();
        assert_eq!(c.workers(), 3);
        assert!(RunConfig::try_parse_from(["k2design", "--workers", "0", "sieve"]).is_err());
        assert!(RunConfig::try_parse_from(["k2design", "classify", "--group", "x", "--q", "8"]).is_err());
        assert!(RunConfig::try_parse_from(["k2design", "classify", "--format", "xml"]).is_err());
        assert!(RunConfig::try_parse_from(["k2design", "verify"]).is_err());
    }

    #[test]
    fn generated_groups() {
        let args = GroupArgs {
            group: None,
            q: Some(8),
            variant: VariantArg::Full,
            action: ActionArg::Pairs,
        };
        let (g, name) = resolve_group(&args).unwrap();
        assert_eq!((g.degree(), g.order_u64(), name.as_str()), (36, Some(1512), "pgammal(2,8)-pairs"));
        let line = GroupArgs { action: ActionArg::Line, variant: VariantArg::Socle, ..args };
        assert_eq!(resolve_group(&line).unwrap().0.degree(), 9);
        let bad = GroupArgs { q: Some(6), ..line.clone() };
        assert!(matches!(resolve_group(&bad), Err(CliError::Usage(_))));
        let none = GroupArgs { q: None, ..line };
        assert!(matches!(resolve_group(&none), Err(CliError::Usage(_))));
    }

    #[test]
    fn record_for_small_group() {
        // PSL(2,8) on the 9 points of the line is 3-transitive, so every
        // 3-subset orbit is the complete design.
        let (g, name) = resolve_group(&GroupArgs {
            group: None,
            q: Some(8),
            variant: VariantArg::Socle,
            action: ActionArg::Line,
        })
        .unwrap();
        let rec = design_record(&g, &name, parse_block("1,2,3", 9).unwrap(), 3).unwrap();
        assert_eq!((rec.b, rec.lambda, rec.nontrivial), (84, Some(1), false));
        assert_eq!(rec.lambdas, Some(vec![84, 28, 7, 1]));
        assert_eq!(rec.blocks.len(), 84);
        assert!(rec.blocks.iter().all(|b| b.iter().all(|&p| (1..=9).contains(&p))));
    }
}
