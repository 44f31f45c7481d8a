use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use syncgame::algebra::projections::projection_lemma_suite_in;
use syncgame::algebra::{
    bisync_closure_structure, builtin_maps_with, row_sum_report, verify_hom, verify_mutual_inverse, verify_pair_in,
    GameAlgebra, Report, VerifyOptions,
};
use syncgame::correlations::{
    default_budget, enumerate_with, ns_counterexample, transport, Correlation, EnumOptions, Membership,
};
use syncgame::game::{parse_game, serialize_game};
use syncgame::par::Exec;
use syncgame::suite::{run_suite, SuiteOptions};
use syncgame::transforms::{bisynchronize, three_output_reduce, zero_relation_normalize, TransformKind, ZrOptions};
use syncgame::zoo::{game_from_shortcut, graph_from_shortcut, hom_game, iso_game, trivial_sync};
use syncgame::{Error, Game};

#[derive(Parser)]
#[command(
    name = "syncgame",
    version,
    about = "Synchronous non-local games and their game algebras"
)]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a named game.
    Zoo {
        #[command(subcommand)]
        game: ZooGame,
        /// Output file (default stdout).
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Apply a rule-function transform.
    Transform(TransformArgs),
    /// Verify algebra identities for a builtin transform.
    Verify(VerifyArgs),
    /// Enumerate perfect deterministic strategies.
    Solve {
        #[arg(long)]
        game: String,
        /// Print every strategy.
        #[arg(long)]
        show: bool,
        /// Search-node budget (default `SYNCGAME_BUDGET` or 10^7).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Transport a correlation along a builtin generator map.
    Transport(TransportArgs),
    /// Check the non-signalling midpoint counterexample.
    Counterexample {
        /// Directory to write p.json, q.json and r.json into.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Random projection experiments.
    Lemmas {
        /// Dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        dim: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 20_240_501)]
        seed: u64,
    },
    /// Run every acceptance criterion.
    Suite {
        #[arg(long, default_value_t = 20_240_501)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Subcommand)]
enum ZooGame {
    /// trivial_sync(n, k).
    Trivial {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Graph homomorphism game from G to H.
    Hom {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Graph isomorphism game of G and H.
    Iso {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
}

#[derive(Args)]
struct TransformArgs {
    kind: TransformName,
    /// Input game file or shortcut (default stdin).
    #[arg(long = "in")]
    input: Option<String>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// zr: keep one zero tuple per transposed pair.
    #[arg(long)]
    dedupe_sym: bool,
    /// zr: also write the zero/relation presentation here.
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformName {
    Symmetrize,
    Bisync,
    Threeout,
    Zr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sym,
    Bisync,
    Threeout,
    Zr,
}

impl From<Kind> for TransformKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Sym => TransformKind::Symmetrize,
            Kind::Bisync => TransformKind::Bisync,
            Kind::Threeout => TransformKind::ThreeOut,
            Kind::Zr => TransformKind::ZeroRelation,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    what: VerifyWhat,
    /// Game file or shortcut such as `hom(K5,K4)`.
    #[arg(long)]
    game: String,
    /// Builtin transform whose maps are checked (ignored by lemma32 and rowsums).
    #[arg(long, value_enum, default_value = "bisync")]
    kind: Kind,
    /// zr: keep one zero tuple per transposed pair.
    #[arg(long)]
    dedupe_sym: bool,
    /// Also evaluate certified polynomials in the deterministic representations.
    #[arg(long)]
    cross_check: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyWhat {
    Hom,
    Inverse,
    Lemma32,
    Rowsums,
    All,
}

#[derive(Args)]
struct TransportArgs {
    /// Correlation file.
    #[arg(long)]
    corr: PathBuf,
    /// Source game of the transform (file or shortcut).
    #[arg(long)]
    game: String,
    #[arg(long, value_enum)]
    map_kind: Kind,
    /// Which map supplies the coefficients. `forward` takes a correlation on
    /// the transformed game to the source game, `backward` the other way.
    #[arg(long, value_enum)]
    direction: Direction,
    #[arg(long)]
    dedupe_sym: bool,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Backward,
}

/// Exit status 1: a check ran and did not hold. Exit status 2: bad input.
enum Failure {
    Failed(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_) => Failure::Failed(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let ctx = Ctx { json: cli.json, exec };
    match run(&ctx, cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Failed(msg)) => {
            eprintln!("syncgame: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("syncgame: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Ctx {
    json: bool,
    exec: Exec,
}

impl Ctx {
    fn verify_options(&self, cross_check: bool) -> VerifyOptions {
        VerifyOptions {
            exec: self.exec,
            cross_check,
            ..VerifyOptions::default()
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> Outcome {
    match command {
        Command::Zoo { game, out } => {
            let g =
                match game {
                    ZooGame::Trivial { n, k } => trivial_sync(n, k)?,
                    ZooGame::Hom { g, h } => hom_game(&graph_from_shortcut(&g)?, &graph_from_shortcut(&h)?)?
                        .with_name(format!("hom({g},{h})")),
                    ZooGame::Iso { g, h } => iso_game(&graph_from_shortcut(&g)?, &graph_from_shortcut(&h)?)?
                        .with_name(format!("iso({g},{h})")),
                };
            emit(out.as_deref(), &serialize_game(&g))?;
            Ok(true)
        }
        Command::Transform(args) => transform(args),
        Command::Verify(args) => verify(ctx, args),
        Command::Solve { game, show, budget } => solve(ctx, &game, show, budget),
        Command::Transport(args) => transport_cmd(args),
        Command::Counterexample { out_dir } => counterexample(ctx, out_dir.as_deref()),
        Command::Lemmas { dim, trials, seed } => lemmas(ctx, &dim, trials, seed),
        Command::Suite { seed, trials } => suite(ctx, seed, trials),
    }
}

/// Reads a game from a shortcut, a file, or stdin when `spec` is `None` or `-`.
fn load_game(spec: Option<&str>) -> Result<Game, Failure> {
    match spec {
        None | Some("-") => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok(parse_game(&text)?)
        }
        Some(s) if s.contains('(') && !Path::new(s).exists() => Ok(game_from_shortcut(s)?),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
            Ok(parse_game(&text)?)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

fn transform(args: TransformArgs) -> Outcome {
    let g = load_game(args.input.as_deref())?;
    let opts = ZrOptions {
        dedupe_symmetric: args.dedupe_sym,
    };
    if args.spec_out.is_some() && !matches!(args.kind, TransformName::Zr) {
        return Err(Failure::Input("--spec-out only applies to zr".into()));
    }
    let out = match args.kind {
        TransformName::Symmetrize => syncgame::transforms::symmetrize(&g),
        TransformName::Bisync => bisynchronize(&g)?,
        TransformName::Threeout => three_output_reduce(&g)?,
        TransformName::Zr => {
            if g.k() != 3 {
                return Err(Failure::Input(format!(
                    "zr needs a three-answer game (got k={}); run threeout first",
                    g.k()
                )));
            }
            let (normal, spec) = zero_relation_normalize(&g, opts)?;
            if let Some(path) = &args.spec_out {
                emit(Some(path), &spec.to_json())?;
            }
            normal
        }
    };
    emit(args.out.as_deref(), &serialize_game(&out))?;
    Ok(true)
}

fn verify(ctx: &Ctx, args: VerifyArgs) -> Outcome {
    let g = load_game(Some(&args.game))?;
    let opts = ctx.verify_options(args.cross_check);
    match args.what {
        VerifyWhat::Lemma32 => {
            let s = bisync_closure_structure(&g)?;
            if ctx.json {
                println!("{}", json!(s));
            } else {
                println!("source closure trivial: {}", s.source_trivial);
                println!("closed-form relations derived: {}", s.closed_form_derived);
                println!("nulls exactly v != x: {}", s.closed_form_nulls);
                println!("classes exactly (x, a - i mod k): {}", s.closed_form_classes);
                println!("nulls match source pullback: {}", s.pullback_nulls);
                println!("classes match source pullback: {}", s.pullback_classes);
                println!("holds: {}", s.holds());
            }
            Ok(s.holds())
        }
        VerifyWhat::Rowsums => {
            let alg = GameAlgebra::new(bisynchronize(&g)?)?;
            let report = row_sum_report(&alg, g.n(), opts)?;
            print_report(ctx, &report);
            Ok(report.all_proven())
        }
        what => {
            let kind = TransformKind::from(args.kind);
            if !kind.applies_to(&g) {
                return Err(Failure::Input(format!("{} does not apply to this game", kind.name())));
            }
            let pair = builtin_maps_with(
                kind,
                &g,
                ZrOptions {
                    dedupe_symmetric: args.dedupe_sym,
                },
            )?;
            let src = GameAlgebra::new(pair.source.clone())?;
            let tgt = GameAlgebra::new(pair.target.clone())?;
            let report = match what {
                VerifyWhat::Hom => {
                    let mut report = Report::new(kind.name());
                    let mut fwd = verify_hom(&src, &tgt, &pair.forward, opts)?;
                    fwd.title = "forward".into();
                    report.extend(fwd);
                    let mut bwd = verify_hom(&tgt, &src, &pair.backward, opts)?;
                    bwd.title = "backward".into();
                    report.extend(bwd);
                    report
                }
                VerifyWhat::Inverse => verify_mutual_inverse(&src, &tgt, &pair.forward, &pair.backward, opts)?,
                _ => verify_pair_in(&pair, &src, &tgt, opts)?,
            };
            print_report(ctx, &report);
            Ok(report.all_proven())
        }
    }
}

fn print_report(ctx: &Ctx, report: &Report) {
    if ctx.json {
        println!("{}", json!(report));
        return;
    }
    for s in &report.structural {
        println!("{}: {}", s.name, if s.ok { "ok" } else { "FAILED" });
    }
    for c in &report.categories {
        println!(
            "{}: {}/{} proven, {} unverified, {} failed",
            c.category, c.proven, c.total, c.unverified, c.failed
        );
        for f in c.failures.iter().take(5) {
            println!("  {:?} {}", f.status, f.check);
        }
    }
    let (total, proven, unverified, failed) = report.totals();
    println!("total: {proven}/{total} proven, {unverified} unverified, {failed} failed");
    if report.oracle.cross_checked > 0 {
        println!(
            "oracle: {} cross-checked, {} discrepancies",
            report.oracle.cross_checked, report.oracle.discrepancies
        );
    }
}

fn solve(ctx: &Ctx, game: &str, show: bool, budget: Option<u64>) -> Outcome {
    let g = load_game(Some(game))?;
    let opts = EnumOptions {
        budget: budget.unwrap_or_else(default_budget),
        exec: ctx.exec,
    };
    let found = enumerate_with(&g, opts)?;
    if ctx.json {
        let mut out = json!({ "count": found.len() });
        if show {
            out["strategies"] = json!(found.iter().map(|s| &s.0).collect::<Vec<_>>());
        }
        println!("{out}");
    } else {
        println!("count: {}", found.len());
        if show {
            for s in &found {
                println!("{:?}", s.0);
            }
        }
    }
    Ok(true)
}

fn transport_cmd(args: TransportArgs) -> Outcome {
    let g = load_game(Some(&args.game))?;
    let text = fs::read_to_string(&args.corr).map_err(|e| Failure::Input(format!("{}: {e}", args.corr.display())))?;
    let c = Correlation::from_json(&text)?;
    let kind = TransformKind::from(args.map_kind);
    if !kind.applies_to(&g) {
        return Err(Failure::Input(format!("{} does not apply to this game", kind.name())));
    }
    let pair = builtin_maps_with(
        kind,
        &g,
        ZrOptions {
            dedupe_symmetric: args.dedupe_sym,
        },
    )?;
    let map = match args.direction {
        Direction::Forward => &pair.forward,
        Direction::Backward => &pair.backward,
    };
    emit(args.out.as_deref(), &transport(&c, map)?.to_json())?;
    Ok(true)
}

fn counterexample(ctx: &Ctx, out_dir: Option<&Path>) -> Outcome {
    let (p, q, r, report) = ns_counterexample()?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for (name, c) in [("p", &p), ("q", &q), ("r", &r)] {
            emit(Some(&dir.join(format!("{name}.json"))), &c.to_json())?;
        }
    }
    if ctx.json {
        println!("{}", json!({ "report": report, "confirms": report.confirms() }));
    } else {
        let line = |name: &str, m: &Membership| {
            println!(
                "{name}: non-signalling winning {}, decodes {}, decoded correlation valid {}",
                m.nonsignalling_winning, m.decodes, m.decoded_valid
            )
        };
        line("p", &report.p);
        line("q", &report.q);
        line("r", &report.r);
        println!("p = (q + r)/2: {}", report.midpoint);
        println!("confirms: {}", report.confirms());
    }
    Ok(report.confirms())
}

fn lemmas(ctx: &Ctx, dims: &[usize], trials: usize, seed: u64) -> Outcome {
    let report = projection_lemma_suite_in(dims, trials, seed, ctx.exec)?;
    if ctx.json {
        println!("{}", json!(report));
    } else {
        for l in &report.lemmas {
            println!(
                "{:?} d={}: {} positive, {} negative, {} failures, max positive residual {:.2e}, min negative residual {:.2e}",
                l.lemma, l.dim, l.positives, l.negatives, l.failures, l.max_positive_residual, l.min_negative_residual
            );
        }
        for w in &report.witnesses {
            println!("{}: {} ({})", w.name, if w.ok { "ok" } else { "FAILED" }, w.detail);
        }
    }
    Ok(report.passed())
}

fn suite(ctx: &Ctx, seed: u64, trials: usize) -> Outcome {
    let opts = SuiteOptions {
        exec: ctx.exec,
        seed,
        trials,
        ..SuiteOptions::default()
    };
    let results = run_suite(&opts);
    if ctx.json {
        println!("{}", json!(results));
    } else {
        for r in &results {
            println!("{}", r.line());
        }
    }
    Ok(results.iter().all(|r| r.passed))
}
