use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use vdom_cli::append::{self, AppendMode};
use vdom_cli::jsfb::{self, Impl, JsfbConfig};
use vdom_cli::report;
use vdom_core::diff::{diff, json as patch_json};
use vdom_core::dom::{serialize, Document};
use vdom_core::runtime::instantiate;
use vdom_core::template::{compile, compile_without_hoisting, emit, load};

#[derive(Parser)]
#[command(name = "vdom", about = "Template compiler, renderer, and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a template file into a module JSON file.
    Compile(CompileArgs),
    /// Instantiate a compiled module against a state and print the DOM.
    Render(RenderArgs),
    /// Run a benchmark suite.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CompileArgs {
    /// Template source file.
    template: PathBuf,
    /// Output module path.
    #[arg(short, long)]
    output: PathBuf,
    /// Disable static hoisting (debug/oracle mode).
    #[arg(long)]
    no_hoist: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Compiled module (JSON).
    module: PathBuf,
    /// State: a JSON file path or an inline JSON document.
    #[arg(long)]
    state: String,
    /// Second state to diff against after rendering `--state`.
    #[arg(long)]
    against: Option<String>,
    /// With --against: print the patch JSON instead of the final DOM.
    #[arg(long, requires = "against")]
    emit_patch: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(subcommand)]
    suite: BenchSuite,
}

#[derive(Subcommand)]
enum BenchSuite {
    /// Table-manipulation suite across engine/naive/dom implementations.
    Jsfb(JsfbArgs),
    /// Consecutive-append scaling suite across rendering strategies.
    Append(AppendArgs),
}

#[derive(Args)]
struct JsfbArgs {
    /// Base table size (the published case labels correspond to 1000).
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    /// Implementations to run.
    #[arg(long = "impl", value_delimiter = ',', default_values = ["engine", "naive", "dom"])]
    impls: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    iterations: usize,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    /// Machine-readable report (deterministic for a fixed seed).
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// Human-readable table (default).
    #[arg(long)]
    table: bool,
    /// Include wall-clock fields in --json output (not reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct AppendArgs {
    /// Headline node count (the sweep sizes run regardless).
    #[arg(long, default_value_t = 5000)]
    nodes: usize,
    /// Strategies to run.
    #[arg(long = "modes", value_delimiter = ',', default_values = ["dom", "delta", "keyed", "vdom"])]
    modes: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, conflicts_with = "table")]
    json: bool,
    #[arg(long)]
    table: bool,
    /// Include wall-clock fields in --json output (not reproducible).
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compile(args) => {
            let source = fs::read_to_string(&args.template)
                .with_context(|| format!("reading {}", args.template.display()))?;
            let source = source.trim_end();
            let module = if args.no_hoist {
                compile_without_hoisting(source)?
            } else {
                compile(source)?
            };
            fs::write(&args.output, emit(&module))
                .with_context(|| format!("writing {}", args.output.display()))?;
            Ok(())
        }
        Command::Render(args) => {
            let bytes = fs::read(&args.module)
                .with_context(|| format!("reading {}", args.module.display()))?;
            let module = load(&bytes)?;
            let state = read_state(&args.state)?;
            let node = instantiate(&module, &state)?;
            match args.against {
                None => {
                    let mut doc = Document::new();
                    let dom = doc.realize(&node);
                    println!("{}", serialize(&dom));
                }
                Some(against) => {
                    let next_state = read_state(&against)?;
                    let next = instantiate(&module, &next_state)?;
                    let (patch, _) = diff(&node, &next);
                    if args.emit_patch {
                        println!("{}", patch_json::patch_to_string(&patch));
                    } else {
                        let mut doc = Document::new();
                        let mut dom = doc.realize(&node);
                        doc.apply(&mut dom, &patch)?;
                        println!("{}", serialize(&dom));
                    }
                }
            }
            Ok(())
        }
        Command::Bench(args) => match args.suite {
            BenchSuite::Jsfb(args) => {
                let impls: Vec<Impl> = args
                    .impls
                    .iter()
                    .map(|s| {
                        Impl::parse(s).with_context(|| format!("unknown implementation `{s}`"))
                    })
                    .collect::<Result<_>>()?;
                let cfg = JsfbConfig {
                    rows: args.rows,
                    seed: args.seed,
                    warmup: args.warmup,
                    iterations: args.iterations,
                };
                if cfg.rows < 4 {
                    bail!("--rows must be at least 4");
                }
                let outcomes = jsfb::run_suite(&cfg, &impls);
                if args.json {
                    let value = report::jsfb_report(&cfg, &outcomes, args.timings);
                    println!("{}", serde_json::to_string(&value)?);
                } else {
                    print!("{}", report::jsfb_table(&cfg, &outcomes));
                }
                Ok(())
            }
            BenchSuite::Append(args) => {
                let modes: Vec<AppendMode> = args
                    .modes
                    .iter()
                    .map(|s| AppendMode::parse(s).with_context(|| format!("unknown mode `{s}`")))
                    .collect::<Result<_>>()?;
                let suite = append::run_suite(args.nodes, &modes, args.seed);
                if args.json {
                    let value = report::append_report(&suite, args.timings);
                    println!("{}", serde_json::to_string(&value)?);
                } else {
                    print!("{}", report::append_table(&suite));
                }
                Ok(())
            }
        },
    }
}

/// A state argument is a file path when such a file exists, otherwise it
/// must parse as inline JSON.
fn read_state(arg: &str) -> Result<Value> {
    let path = Path::new(arg);
    if path.exists() {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return serde_json::from_str(&text)
            .with_context(|| format!("parsing state file {}", path.display()));
    }
    serde_json::from_str(arg)
        .with_context(|| format!("state `{arg}` is neither an existing file nor valid JSON"))
}
