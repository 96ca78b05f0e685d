mod output;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use mldlab::blowup::{charts, classify_contraction, weak_transform_rideal, BlowUpSpec};
use mldlab::compose::{compose_blowups, ComposeOptions, CompositionProblem};
use mldlab::golden::verify_paper_examples;
use mldlab::ideal::RIdeal;
use mldlab::mld::{
    alc_threshold, classify_pair, is_semistable_type, is_special, lc_centres, lct, margin_lp, mld_at_stratum, MldConfig, MldStatus,
    PairSpec, Verdict,
};
use mldlab::oracle::brute_force_mld;
use mldlab::par::{configure_threads, Execution};
use mldlab::rational::{parse_rational, parse_rational_list};
use mldlab::scan::{run_scan, ScanOptions, ScanRecipe};
use mldlab::slopes::{detect_lc_slope, enumerate_pn, mediant_combine, reduce_slope, SlopePair};
use mldlab::{CyclicQuotientGerm, Error};

use output::{Format, Output};

/// Exact minimal log discrepancies, thresholds and weighted blow-ups.
///
/// JSON arguments take a file path, `-` for stdin, or an inline JSON text.
#[derive(Parser)]
#[command(name = "mldlab", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Starting enumeration bound on the weight sum.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Demand certified values (the default).
    #[arg(long, global = true, overrides_with = "no_certify")]
    certify: bool,
    /// Report the best value within the bound without a certificate.
    #[arg(long, global = true, overrides_with = "certify")]
    no_certify: bool,
    /// Hard cap on the truncation order for composed valuations.
    #[arg(long, global = true)]
    order_cap: Option<u64>,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true, env = "MLDLAB_JOBS")]
    jobs: Option<usize>,
    /// Write the lc-margin LP of the input pair to this file.
    #[arg(long, global = true, value_name = "PATH")]
    dump_lp: Option<PathBuf>,
    /// Report elapsed time on stderr, and per row for scans.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PairArg {
    /// Pair JSON: {"dim" | "germ", "rideal"}.
    #[arg(long)]
    pair: String,
}

#[derive(Args)]
struct StratumArg {
    /// One-based coordinates cutting out the stratum, e.g. 1,2.
    #[arg(long)]
    stratum: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal log discrepancy at the origin or at a coordinate stratum.
    Mld {
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        stratum: StratumArg,
    },
    /// Log canonical threshold of an R-ideal against the pair.
    Lct {
        #[command(flatten)]
        pair: PairArg,
        /// R-ideal JSON.
        #[arg(long)]
        against: String,
    },
    /// The t with mld(X, a b^t) equal to the target.
    Alct {
        #[command(flatten)]
        pair: PairArg,
        #[arg(long)]
        against: String,
        #[arg(long)]
        target: String,
    },
    /// mld along every coordinate stratum and the lc centres.
    LcCentres {
        #[command(flatten)]
        pair: PairArg,
    },
    /// Terminal, canonical, klt, lc or not lc.
    Classify {
        #[command(flatten)]
        pair: PairArg,
    },
    /// Semistable-type test on a smooth threefold.
    Semistable {
        #[command(flatten)]
        pair: PairArg,
    },
    /// Special-pair test on a smooth threefold.
    Special {
        #[command(flatten)]
        pair: PairArg,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Weighted blow-ups.
    Wbu {
        #[command(subcommand)]
        command: WbuCommand,
    },
    /// Divisorial contractions to a point.
    Contraction {
        #[command(subcommand)]
        command: ContractionCommand,
    },
    /// lc slopes.
    Slope {
        #[command(subcommand)]
        command: SlopeCommand,
    },
    /// Sweep a parametric family and tabulate an invariant.
    Scan {
        /// Scan recipe JSON.
        #[arg(long)]
        recipe: String,
    },
    /// Run the built-in reference checks.
    VerifyPaper,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Plain enumeration with max(w) <= bound (default 12).
    Mld {
        #[command(flatten)]
        pair: PairArg,
        #[command(flatten)]
        stratum: StratumArg,
    },
}

#[derive(Subcommand)]
enum WbuCommand {
    /// Chart atlas of a weighted blow-up.
    Charts {
        /// Germ JSON {"r", "a"}; smooth when omitted.
        #[arg(long)]
        germ: Option<String>,
        /// Comma-separated weights, e.g. 3,2,1 or 2/5,3/5,1/5.
        #[arg(long)]
        weights: String,
    },
    /// Weak transform of an R-ideal on one chart.
    Transform {
        /// R-ideal JSON.
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        germ: Option<String>,
        #[arg(long)]
        weights: String,
        /// One-based coordinate whose chart to use.
        #[arg(long)]
        chart: usize,
        /// Pass to a power of the ideal when the division is not Cartier.
        #[arg(long)]
        q_mode: bool,
    },
    /// Compose two weighted blow-ups into one.
    Compose {
        /// Composition problem JSON {"w", "v", "y1", "y2", "ideal"}.
        #[arg(long)]
        problem: String,
        /// Take a' = 1 when no ideal is given.
        #[arg(long)]
        assume_aprime: bool,
    },
}

#[derive(Subcommand)]
enum ContractionCommand {
    /// Is the weighted blow-up a divisorial contraction to the point?
    Classify {
        #[arg(long)]
        germ: String,
        /// Candidate (w1, w2) for a smooth germ.
        #[arg(long)]
        weights: Option<String>,
    },
}

#[derive(Subcommand)]
enum SlopeCommand {
    /// The pairs (w1, w2) with w1 <= n + 1 in slope order.
    Pn {
        #[arg(long)]
        n: u64,
    },
    /// Reduce a slope modulo n.
    Reduce {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        n: u64,
    },
    /// Is (w1, w2, 0) an lc slope of the R-ideal?
    Detect {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        ideal: String,
    },
    /// Combine two lc slopes with positive coefficients.
    Mediant {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        with: String,
        #[arg(long, default_value = "1")]
        c1: String,
        #[arg(long, default_value = "1")]
        c2: String,
    },
}

enum Failure {
    Input(String),
    Refusal(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Refusal(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Refusal(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_refusal() {
            Failure::Refusal(e.to_string())
        } else if matches!(e, Error::Invariant(_)) {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome = Result<(Output, Option<Failure>), Failure>;

fn load<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("{what}: {e}")))?;
        s
    } else if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::Input(format!("{what} {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{what}: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize to JSON")
}

fn parse_pair(s: &str) -> Result<SlopePair, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts[..] else {
        return Err(Failure::Input(format!("expected w1,w2, got {s:?}")));
    };
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Failure::Input(format!("not a positive integer: {t:?}")));
    Ok(SlopePair::new(num(a)?, num(b)?)?)
}

/// Zero-based support from a one-based list; the closed point when absent.
fn support(arg: &StratumArg, dim: usize) -> Result<Vec<usize>, Failure> {
    let Some(s) = &arg.stratum else {
        return Ok((0..dim).collect());
    };
    let mut out = Vec::new();
    for t in s.split(',') {
        let i: usize = t.trim().parse().map_err(|_| Failure::Input(format!("bad coordinate {t:?} in --stratum")))?;
        if i == 0 || i > dim {
            return Err(Failure::Input(format!("coordinate {i} out of range 1..={dim}")));
        }
        out.push(i - 1);
    }
    Ok(out)
}

struct Ctx {
    config: MldConfig,
    execution: Execution,
    certify_flag: Option<bool>,
    order_cap: Option<u64>,
    dump_lp: Option<PathBuf>,
    timing: bool,
    bound: Option<u64>,
}

impl Ctx {
    fn pair(&self, arg: &PairArg) -> Result<PairSpec, Failure> {
        let pair: PairSpec = load(&arg.pair, "pair")?;
        let all: Vec<usize> = (0..pair.dim()).collect();
        self.dump(&pair, &all)?;
        Ok(pair)
    }

    /// The pair and the zero-based support of the requested stratum.
    fn pair_at(&self, arg: &PairArg, stratum: &StratumArg) -> Result<(PairSpec, Vec<usize>), Failure> {
        let pair: PairSpec = load(&arg.pair, "pair")?;
        let s = support(stratum, pair.dim())?;
        self.dump(&pair, &s)?;
        Ok((pair, s))
    }

    fn dump(&self, pair: &PairSpec, support: &[usize]) -> Result<(), Failure> {
        if let Some(path) = &self.dump_lp {
            let text = serde_json::to_string_pretty(&margin_lp(pair, support)).expect("LP serializes") + "\n";
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }

    fn certify(&self) -> bool {
        self.config.certify
    }
}

fn uncertified(msg: impl Into<String>) -> Option<Failure> {
    Some(Failure::Refusal(msg.into()))
}

fn verdict_refusal(ctx: &Ctx, v: Verdict) -> Option<Failure> {
    (ctx.certify() && v == Verdict::Unknown).then(|| Failure::Refusal("verdict could not be decided within the bound".into()))
}

fn run(cli: &Cli, ctx: &Ctx) -> Outcome {
    let cfg = &ctx.config;
    match &cli.command {
        Command::Mld { pair, stratum } => {
            let (p, s) = ctx.pair_at(pair, stratum)?;
            let rep = mld_at_stratum(&p, &s, cfg)?;
            let refusal = (ctx.certify() && rep.status == MldStatus::UncertifiedAboveBound)
                .then(|| Failure::Refusal(format!("mld not certified at bound {}", rep.bound_used)));
            Ok((Output::single(to_value(&rep)), refusal))
        }
        Command::Lct { pair, against } => {
            let p = ctx.pair(pair)?;
            let b: RIdeal = load(against, "ideal")?;
            let t = lct(&p, &b)?;
            Ok((Output::single(json!({ "lct": t.to_string() })), None))
        }
        Command::Alct { pair, against, target } => {
            let p = ctx.pair(pair)?;
            let b: RIdeal = load(against, "ideal")?;
            let target = parse_rational(target)?;
            let t = alc_threshold(&p, &b, &target, cfg)?;
            let value = json!({ "target": target.to_string(), "threshold": t.map(|q| q.to_string()) });
            Ok((Output::single(value), None))
        }
        Command::LcCentres { pair } => {
            let p = ctx.pair(pair)?;
            let rep = lc_centres(&p, cfg)?;
            let rows = rep.strata.iter().map(to_value).collect();
            let open = rep.strata.iter().any(|s| s.mld.status == MldStatus::UncertifiedAboveBound);
            let refusal = if ctx.certify() && open { uncertified("some strata are not certified") } else { None };
            Ok((Output::with_rows(to_value(&rep), rows), refusal))
        }
        Command::Classify { pair } => {
            let p = ctx.pair(pair)?;
            Ok((Output::single(to_value(&classify_pair(&p, cfg)?)), None))
        }
        Command::Semistable { pair } => {
            let p = ctx.pair(pair)?;
            let rep = is_semistable_type(&p, cfg)?;
            Ok((Output::single(to_value(&rep)), verdict_refusal(ctx, rep.verdict)))
        }
        Command::Special { pair } => {
            let p = ctx.pair(pair)?;
            let rep = is_special(&p, cfg)?;
            Ok((Output::single(to_value(&rep)), verdict_refusal(ctx, rep.verdict)))
        }
        Command::Oracle { command: OracleCommand::Mld { pair, stratum } } => {
            let (p, s) = ctx.pair_at(pair, stratum)?;
            let rep = brute_force_mld(&p, &s, ctx.bound.unwrap_or(12))?;
            Ok((Output::single(to_value(&rep)), None))
        }
        Command::Wbu { command } => wbu(command, ctx),
        Command::Contraction { command: ContractionCommand::Classify { germ, weights } } => {
            let g: CyclicQuotientGerm = load(germ, "germ")?;
            let candidate = weights.as_deref().map(parse_pair).transpose()?.map(|p| (p.w1, p.w2));
            Ok((Output::single(to_value(&classify_contraction(&g, candidate)?)), None))
        }
        Command::Slope { command } => slope(command),
        Command::Scan { recipe } => {
            let mut r: ScanRecipe = load(recipe, "recipe")?;
            if ctx.bound.is_some() {
                r.config.bound = ctx.bound;
            }
            if ctx.certify_flag.is_some() {
                r.config.certify = ctx.certify_flag;
            }
            let table = run_scan(&r, ScanOptions { execution: ctx.execution, timing: ctx.timing })?;
            let rows = table.rows.iter().map(to_value).collect();
            Ok((Output::with_rows(to_value(&table), rows), None))
        }
        Command::VerifyPaper => {
            let rep = verify_paper_examples();
            let rows = rep.items.iter().map(to_value).collect();
            let failed: Vec<&str> = rep.items.iter().filter(|i| !i.passed).map(|i| i.name).collect();
            let failure = (!failed.is_empty()).then(|| Failure::Invariant(format!("reference checks failed: {}", failed.join(", "))));
            Ok((Output::with_rows(to_value(&rep), rows), failure))
        }
    }
}

fn blowup_spec(germ: &Option<String>, weights: &str) -> Result<BlowUpSpec, Failure> {
    let w = parse_rational_list(weights)?;
    let g = match germ {
        Some(g) => load(g, "germ")?,
        None => CyclicQuotientGerm::smooth(w.len()),
    };
    Ok(BlowUpSpec::new(g, w)?)
}

fn wbu(command: &WbuCommand, ctx: &Ctx) -> Outcome {
    match command {
        WbuCommand::Charts { germ, weights } => {
            let atlas = charts(&blowup_spec(germ, weights)?)?;
            let rows = atlas.charts.iter().map(to_value).collect();
            Ok((Output::with_rows(to_value(&atlas), rows), None))
        }
        WbuCommand::Transform { ideal, germ, weights, chart, q_mode } => {
            let spec = blowup_spec(germ, weights)?;
            let a: RIdeal = load(ideal, "ideal")?;
            if *chart == 0 || *chart > spec.dim() {
                return Err(Failure::Input(format!("chart {chart} out of range 1..={}", spec.dim())));
            }
            let t = weak_transform_rideal(&a, &spec, chart - 1, *q_mode)?;
            Ok((Output::single(json!({ "chart": chart, "transform": to_value(&t) })), None))
        }
        WbuCommand::Compose { problem, assume_aprime } => {
            let p: CompositionProblem = load(problem, "problem")?;
            let opts = ComposeOptions { assume_aprime: *assume_aprime, order_cap: ctx.order_cap };
            Ok((Output::single(to_value(&compose_blowups(&p, opts)?)), None))
        }
    }
}

fn slope(command: &SlopeCommand) -> Outcome {
    let describe = |p: SlopePair| json!({ "w1": p.w1, "w2": p.w2, "slope": p.slope().to_string() });
    match command {
        SlopeCommand::Pn { n } => {
            let rows: Vec<Value> = enumerate_pn(*n)?.into_iter().map(describe).collect();
            Ok((Output::with_rows(Value::Array(rows.clone()), rows), None))
        }
        SlopeCommand::Reduce { pair, n } => {
            let p = parse_pair(pair)?;
            let r = reduce_slope(p, *n)?;
            Ok((Output::single(json!({ "pair": describe(p), "n": n, "reduced": describe(r) })), None))
        }
        SlopeCommand::Detect { pair, ideal } => {
            let p = parse_pair(pair)?;
            let a: RIdeal = load(ideal, "ideal")?;
            let lc_slope = detect_lc_slope(&a, p)?;
            Ok((Output::single(json!({ "pair": describe(p), "lc_slope": lc_slope })), None))
        }
        SlopeCommand::Mediant { pair, with, c1, c2 } => {
            let (p1, p2) = (parse_pair(pair)?, parse_pair(with)?);
            let c = mediant_combine(p1, p2, &parse_rational(c1)?, &parse_rational(c2)?)?;
            Ok((Output::single(to_value(&c)), None))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut execution = Execution::Parallel;
    if let Some(n) = cli.jobs {
        if n <= 1 {
            execution = Execution::Sequential;
        } else {
            configure_threads(n);
        }
    }
    let certify_flag = if cli.no_certify {
        Some(false)
    } else if cli.certify {
        Some(true)
    } else {
        None
    };
    let mut config = MldConfig::default().with_execution(execution);
    config.bound = cli.bound;
    config.certify = certify_flag.unwrap_or(true);
    let ctx = Ctx {
        config,
        execution,
        certify_flag,
        order_cap: cli.order_cap,
        dump_lp: cli.dump_lp.clone(),
        timing: cli.timing,
        bound: cli.bound,
    };
    let start = Instant::now();
    let result = run(&cli, &ctx);
    if cli.timing {
        eprintln!("elapsed: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    }
    let failure = match result {
        Ok((out, failure)) => {
            match out.render(cli.format) {
                Ok(text) => {
                    let mut stdout = io::stdout().lock();
                    if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                        return ExitCode::from(1);
                    }
                }
                Err(e) => return fail(Failure::Invariant(format!("rendering output: {e}"))),
            }
            failure
        }
        Err(f) => Some(f),
    };
    match failure {
        Some(f) => fail(f),
        None => ExitCode::SUCCESS,
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("error: {}", f.message());
    ExitCode::from(f.code())
}
