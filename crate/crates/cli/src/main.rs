use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use linerecon::counterexample::{build_hypercube, verify_counterexample, VerifyMode};
use linerecon::decompose::{expansion, good_graph_check, kernelize, two_core, ExpansionMode};
use linerecon::experiment::{parse_style, run_giant_experiment, run_lemma_checks, ExperimentConfig};
use linerecon::extract::{extract_dense, extract_weakbt};
use linerecon::instance::write_instance_with_header;
use linerecon::random_models::{random_embedding, sample_dlp, sample_gnp, DlpParams, EmbeddingStyle};
use linerecon::reconstruct::{extract_witness, maximal_reconstructible_subsets, pair_verdict, PairVerdict, DEFAULT_BUDGET};
use linerecon::rigidity::{construct_flex_embedding, find_rigidity_certificate};
use linerecon::{read_instance, EmbeddedGraph, Rational};

#[derive(Parser)]
#[command(name = "linerecon", version, about = "Reconstruct points on a line from partial distances")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "LINERECON_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Global rigidity in one dimension.
    Rigid {
        #[command(subcommand)]
        cmd: RigidCmd,
    },
    /// Reconstructible pairs and subsets of an embedded graph.
    Recon {
        #[command(subcommand)]
        cmd: ReconCmd,
    },
    /// 2-core, kernel, expansion and good-graph checks.
    Decomp {
        #[command(subcommand)]
        cmd: DecompCmd,
    },
    /// Globally rigid subgraph extraction.
    Extract {
        #[command(subcommand)]
        cmd: ExtractCmd,
    },
    /// Sample random instances.
    Sim {
        #[command(subcommand)]
        cmd: SimCmd,
    },
    /// Hypercube instance where no non-adjacent pair is reconstructible.
    Counterexample {
        #[command(subcommand)]
        cmd: CounterCmd,
    },
    /// Seeded experiment grids.
    Exp {
        #[command(subcommand)]
        cmd: ExpCmd,
    },
}

#[derive(Args)]
struct Input {
    /// Instance file, or `-` for stdin.
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum RigidCmd {
    Check {
        #[command(flatten)]
        input: Input,
        /// Also print a flexing pair of embeddings when not rigid.
        #[arg(long)]
        flex: bool,
    },
}

#[derive(Subcommand)]
enum ReconCmd {
    /// One JSON line per vertex pair.
    Pairs {
        #[command(flatten)]
        input: Input,
    },
    Subsets {
        #[command(flatten)]
        input: Input,
    },
    Witness {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
    },
}

#[derive(Subcommand)]
enum DecompCmd {
    Core {
        input: PathBuf,
    },
    Kernel {
        input: PathBuf,
    },
    Phi {
        input: PathBuf,
        /// Local search instead of the exact minimum.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Good {
        input: PathBuf,
        /// Vertex count of the host graph.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: Rational,
        #[arg(long, default_value = "1/10")]
        gamma: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ExtractCmd {
    Weakbt {
        #[command(flatten)]
        input: Input,
    },
    Dense {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        eps: Rational,
    },
}

#[derive(Args)]
struct SimOut {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `generic`, `integer-range:LO:HI` or `ap:A:B`.
    #[arg(long, default_value = "generic", value_parser = parse_style_arg)]
    embedding: EmbeddingStyle,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SimCmd {
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        out: SimOut,
    },
    Dlp {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: SimOut,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Direct,
    Oracle,
}

#[derive(Subcommand)]
enum CounterCmd {
    Hypercube {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Direct)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Write the instance here; the report goes to stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ExpArgs {
    /// Flat `key = value` file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    embedding: Option<String>,
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    witness_trials: Option<String>,
    #[arg(long, short)]
    output: Option<String>,
    /// Add a runtime column.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum ExpCmd {
    Giant(ExpArgs),
    Lemmas(ExpArgs),
}

fn parse_style_arg(s: &str) -> Result<EmbeddingStyle, String> {
    parse_style(s).map_err(|e| e.to_string())
}

fn read_text(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load(path: &PathBuf) -> Result<EmbeddedGraph> {
    let text = read_text(path)?;
    read_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    writeln!(io::stdout().lock(), "{}", serde_json::to_string(value)?)?;
    Ok(())
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn rigid(cmd: RigidCmd) -> Result<()> {
    let RigidCmd::Check { input, flex } = cmd;
    let eg = load(&input.input)?;
    let verdict = find_rigidity_certificate(eg.graph(), input.budget)?;
    if flex {
        if let Some(cert) = verdict.certificate() {
            let (f, g) = construct_flex_embedding(eg.graph(), cert)?;
            return print_json(&json!({ "result": verdict, "f": f.positions(), "g": g.positions }));
        }
    }
    print_json(&verdict)
}

fn recon(cmd: ReconCmd) -> Result<()> {
    match cmd {
        ReconCmd::Pairs { input } => {
            let eg = load(&input.input)?;
            let n = eg.vertex_count();
            let stdout = io::stdout();
            let mut w = stdout.lock();
            for u in 0..n {
                for v in u + 1..n {
                    let line = match pair_verdict(&eg, u, v, input.budget)? {
                        PairVerdict::Reconstructible => json!({ "u": u, "v": v, "verdict": "reconstructible" }),
                        PairVerdict::NotReconstructible(alt) => json!({
                            "u": u, "v": v, "verdict": "not-reconstructible", "alternative": alt.positions
                        }),
                        PairVerdict::Unknown => json!({ "u": u, "v": v, "verdict": "unknown" }),
                    };
                    writeln!(w, "{line}")?;
                }
            }
            Ok(())
        }
        ReconCmd::Subsets { input } => {
            let eg = load(&input.input)?;
            print_json(&maximal_reconstructible_subsets(&eg, input.budget))
        }
        ReconCmd::Witness { input, u, v } => {
            let eg = load(&input.input)?;
            print_json(&extract_witness(&eg, u, v, input.budget)?)
        }
    }
}

fn decomp(cmd: DecompCmd) -> Result<()> {
    match cmd {
        DecompCmd::Core { input } => {
            let eg = load(&input)?;
            let core = two_core(eg.graph());
            print_json(&json!({ "vertices": core.vertices, "edges": core.graph.edges().iter().map(|&(a, b)| (core.vertices[a], core.vertices[b])).collect::<Vec<_>>() }))
        }
        DecompCmd::Kernel { input } => print_json(&kernelize(load(&input)?.graph())),
        DecompCmd::Phi { input, sampled, seed } => {
            let mode = if sampled { ExpansionMode::Sampled { seed } } else { ExpansionMode::Exact };
            print_json(&expansion(load(&input)?.graph(), mode)?)
        }
        DecompCmd::Good { input, n, eps, gamma, seed } => print_json(&good_graph_check(load(&input)?.graph(), n, &eps, &gamma, seed)?),
    }
}

fn extract(cmd: ExtractCmd) -> Result<()> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match cmd {
        ExtractCmd::Weakbt { input } => {
            let r = extract_weakbt(load(&input.input)?.graph(), input.budget)?;
            for step in &r.trace {
                writeln!(w, "{}", serde_json::to_string(step)?)?;
            }
            let summary = json!({ "vertices": r.vertices, "bound": r.bound, "bound_met": r.bound_met, "ratio_guarantee_met": r.ratio_guarantee_met, "final_rigid": r.final_rigid });
            writeln!(w, "{summary}")?;
        }
        ExtractCmd::Dense { input, eps } => {
            let r = extract_dense(load(&input.input)?.graph(), &eps, input.budget)?;
            for step in &r.trace {
                writeln!(w, "{}", serde_json::to_string(step)?)?;
            }
            let mut summary = serde_json::to_value(&r)?;
            if let Some(obj) = summary.as_object_mut() {
                obj.remove("trace");
            }
            writeln!(w, "{summary}")?;
        }
    }
    Ok(())
}

fn sim(cmd: SimCmd) -> Result<()> {
    let (g, mut header, out) = match cmd {
        SimCmd::Gnp { n, p, out } => {
            let g = sample_gnp(n, p, out.seed)?;
            (g, vec![format!("model gnp n {n} p {p}")], out)
        }
        SimCmd::Dlp { lambda, n, out } => {
            let params = DlpParams::new(lambda, n)?;
            let s = sample_dlp(&params, out.seed)?;
            let h = vec![
                format!("model dlp lambda {lambda} mu {} n {n}", params.mu),
                format!("kernel vertices {} edges {} Lambda {}", s.kernel.vertex_count, s.kernel.edges.len(), s.big_lambda),
            ];
            (s.graph, h, out)
        }
    };
    let embed_seed = linerecon::random_models::derive_seed(out.seed, 1);
    let eg = random_embedding(&g, out.embedding, embed_seed)?;
    header.push(format!("seed {} embedding {} embedding-seed {embed_seed}", out.seed, serde_json::to_string(&out.embedding)?));
    write_out(&out.out, &write_instance_with_header(&eg, &header))
}

fn counterexample(cmd: CounterCmd) -> Result<()> {
    let CounterCmd::Hypercube { k, mode, budget, out } = cmd;
    let inst = build_hypercube(k)?;
    let mode = match mode {
        ModeArg::Direct => VerifyMode::Direct,
        ModeArg::Oracle => VerifyMode::Oracle,
    };
    let report = verify_counterexample(&inst, mode, budget)?;
    if let Some(p) = &out {
        let text = write_instance_with_header(&inst.eg, &[format!("hypercube k {k}")]);
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    print_json(&report)
}

fn config(args: &ExpArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::parse(&read_text(p)?)?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("model", &args.model),
        ("n", &args.n),
        ("epsilon", &args.epsilon),
        ("seeds", &args.seeds),
        ("seed", &args.seed),
        ("embedding", &args.embedding),
        ("budget", &args.budget),
        ("gamma", &args.gamma),
        ("witness_trials", &args.witness_trials),
        ("output", &args.output),
    ];
    for (k, v) in overrides {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if args.timing {
        cfg.timing = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit<T: Serialize>(rows: &[T], format: Format, output: &Option<String>) -> Result<()> {
    let sink: Box<dyn Write> = match output {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {p}"))?),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut w = sink;
            for r in rows {
                writeln!(w, "{}", serde_json::to_string(r)?)?;
            }
        }
    }
    Ok(())
}

/// Returns the number of rows that recorded an error.
fn exp(cmd: ExpCmd) -> Result<usize> {
    match cmd {
        ExpCmd::Giant(args) => {
            let cfg = config(&args)?;
            let rows = run_giant_experiment(&cfg);
            emit(&rows, args.format, &cfg.output)?;
            Ok(rows.iter().filter(|r| !r.error.is_empty()).count())
        }
        ExpCmd::Lemmas(args) => {
            let cfg = config(&args)?;
            let rows = run_lemma_checks(&cfg);
            emit(&rows, args.format, &cfg.output)?;
            Ok(rows.iter().filter(|r| !r.error.is_empty()).count())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("thread count must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match cli.command {
        Command::Rigid { cmd } => rigid(cmd)?,
        Command::Recon { cmd } => recon(cmd)?,
        Command::Decomp { cmd } => decomp(cmd)?,
        Command::Extract { cmd } => extract(cmd)?,
        Command::Sim { cmd } => sim(cmd)?,
        Command::Counterexample { cmd } => counterexample(cmd)?,
        Command::Exp { cmd } => {
            let failed = exp(cmd)?;
            if failed > 0 {
                eprintln!("{failed} rows recorded errors");
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
