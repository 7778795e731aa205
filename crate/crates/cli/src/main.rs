//! `ahg`: build, inspect and verify altruistic hedonic game instances.
//!
//! Exit codes: 0 stable (or success), 10 blocked, 20 stable up to the search
//! bound, 2 usage error, 3 capacity exceeded, 1 any other error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ahg_core::gadgets::{make_gadget, GadgetKind};
use ahg_core::game::{to_numeric, UtilityValue};
use ahg_core::io::{parse_graph_any, parse_instance, serialize_instance, write_edge_list, InstanceDocument};
use ahg_core::reductions::{reduce, ReductionTarget};
use ahg_core::stability::{verify, SearchLimits};
use ahg_core::{BlockingKind, Coalition, CoalitionStructure, Error, FriendshipGraph, Game, Strategy, UtilityModel};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

const EXIT_ERROR: u8 = 1;
const EXIT_CAPACITY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ahg",
    version,
    about = "Altruistic hedonic games: gadgets, reductions and core verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a single gadget as an instance.
    Gadget {
        #[command(subcommand)]
        kind: GadgetCommand,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reduce a Clique instance to a core-verification instance.
    Reduce {
        #[arg(long)]
        target: ReductionTarget,
        /// Clique size.
        #[arg(short = 'k')]
        k: usize,
        /// Source graph (JSON instance or edge list).
        graph: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check whether the instance's coalition structure is in the core.
    Verify(VerifyArgs),
    /// Print valuations and all six utilities.
    Utilities {
        instance: PathBuf,
        /// Comma-separated players; defaults to each player's own block.
        #[arg(long)]
        coalition: Option<String>,
        /// Print weighted numbers with this weight instead of pairs.
        #[arg(long)]
        w: Option<BigInt>,
    },
    /// Print a built-in worked example.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Subcommand)]
enum GadgetCommand {
    Circulant {
        #[arg(short = 'k')]
        k: usize,
        #[arg(long = "k-prime")]
        k_prime: usize,
    },
    Dome {
        #[arg(short = 'd')]
        d: usize,
        #[arg(long = "k-prime")]
        k_prime: usize,
    },
    PinchedDome {
        #[arg(short = 'd')]
        d: usize,
        #[arg(long = "k-prime")]
        k_prime: usize,
    },
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Full, global = true)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// JSON instance document.
    Full,
    /// Bare graph in the `p ahg` edge-list form.
    Edgelist,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    Example1,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyName {
    Exhaustive,
    Parallel,
    Restricted,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    /// Defaults to the model stored in the instance.
    #[arg(long)]
    model: Option<UtilityModel>,
    #[arg(long, value_enum, default_value_t = StrategyName::Exhaustive)]
    strategy: StrategyName,
    /// Largest coalition tried by the restricted strategy.
    #[arg(long)]
    max_size: Option<usize>,
    /// Restricted candidates: `all`, `distinguished` (reduced instances) or a comma-separated list.
    #[arg(long, default_value = "all")]
    candidates: String,
    #[arg(long, env = "AHG_THREADS")]
    threads: Option<usize>,
    /// Make the parallel strategy return the sequential certificate.
    #[arg(long)]
    deterministic: bool,
    /// Strict core: look for weakly blocking coalitions.
    #[arg(long)]
    strict: bool,
    /// Largest player count accepted by the exhaustive strategies.
    #[arg(long, default_value_t = SearchLimits::default().exhaustive_max_players)]
    max_players: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Capacity(_) = e {
                eprintln!(
                    "hint: use `--strategy restricted` with `--max-size` and `--candidates`, or raise `--max-players`"
                );
                ExitCode::from(EXIT_CAPACITY)
            } else {
                ExitCode::from(EXIT_ERROR)
            }
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Gadget { kind, output } => {
            let kind = match kind {
                GadgetCommand::Circulant { k, k_prime } => GadgetKind::Circulant { k, k_prime },
                GadgetCommand::Dome { d, k_prime } => GadgetKind::Dome { d, k_prime },
                GadgetCommand::PinchedDome { d, k_prime } => GadgetKind::PinchedDome { d, k_prime },
            };
            let (graph, layout) = make_gadget(kind)?;
            let doc = InstanceDocument {
                partition: Some(vec![layout.players().collect()]),
                layout: Some(layout),
                ..InstanceDocument::from_graph(&graph)
            };
            emit(&doc, &graph, &output)?;
            Ok(0)
        }
        Command::Reduce {
            target,
            k,
            graph,
            output,
        } => {
            let source = parse_graph_any(&read(&graph)?)?;
            let r = reduce(&source, k, target)?;
            eprintln!(
                "{target}: k={k} (effective {}), k'={}, {} players, {} blocks",
                r.k_effective,
                r.k_prime,
                r.n(),
                r.gamma.blocks().len()
            );
            emit(&InstanceDocument::from_artifact(&r), r.game.graph(), &output)?;
            Ok(0)
        }
        Command::Verify(args) => run_verify(args),
        Command::Utilities { instance, coalition, w } => run_utilities(&instance, coalition.as_deref(), w),
        Command::Demo {
            name: DemoName::Example1,
        } => {
            demo_example1();
            Ok(0)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Validation {
        field: "path".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn emit(doc: &InstanceDocument, graph: &FriendshipGraph, output: &OutputArgs) -> Result<(), Error> {
    let text = match output.format {
        Format::Full => serialize_instance(doc),
        Format::Edgelist => write_edge_list(graph),
    };
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Validation {
            field: "out".into(),
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Validation {
                field: "stdout".into(),
                message: e.to_string(),
            }),
    }
}

fn parse_players(list: &str, field: &str) -> Result<Vec<usize>, Error> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| Error::Validation {
                field: field.into(),
                message: format!("`{s}` is not a player id"),
            })
        })
        .collect()
}

fn load(path: &Path) -> Result<(InstanceDocument, Game, CoalitionStructure), Error> {
    let doc = parse_instance(&read(path)?)?;
    let game = doc.game()?;
    let gamma = doc.coalition_structure()?.ok_or_else(|| Error::Validation {
        field: "partition".into(),
        message: "the instance has no coalition structure".into(),
    })?;
    Ok((doc, game, gamma))
}

fn named(doc: &InstanceDocument, c: &Coalition) -> String {
    let names: Vec<String> = c.members().map(|p| doc.player_name(p)).collect();
    format!("{{{}}}", names.join(","))
}

fn run_verify(args: VerifyArgs) -> Result<u8, Error> {
    let (doc, game, gamma) = load(&args.instance)?;
    let model = args.model.or(doc.model).ok_or_else(|| Error::Validation {
        field: "model".into(),
        message: "pass --model or store a model in the instance".into(),
    })?;
    let strategy = match args.strategy {
        StrategyName::Exhaustive => Strategy::Exhaustive,
        StrategyName::Parallel => Strategy::ExhaustiveParallel {
            threads: args.threads,
            deterministic: args.deterministic,
        },
        StrategyName::Restricted => {
            let candidates = match args.candidates.as_str() {
                "all" => (0..game.n()).collect(),
                "distinguished" => doc
                    .to_artifact()?
                    .ok_or_else(|| Error::Validation {
                        field: "candidates".into(),
                        message: "`distinguished` needs a reduced instance with provenance".into(),
                    })?
                    .search_candidates(),
                list => parse_players(list, "candidates")?,
            };
            Strategy::Restricted {
                max_size: args.max_size.unwrap_or(candidates.len()),
                candidates,
            }
        }
    };
    let kind = if args.strict {
        BlockingKind::Weak
    } else {
        BlockingKind::Strict
    };
    let limits = SearchLimits {
        exhaustive_max_players: args.max_players,
    };
    let verdict = verify(&game, &gamma, model, &strategy, kind, limits)?;
    println!("model: {model}");
    println!("notion: {}", if args.strict { "strict-core" } else { "core" });
    println!("status: {}", verdict.status.as_str());
    if let Some(c) = &verdict.certificate {
        println!("certificate: {}", named(&doc, c));
    }
    if let Some(bound) = &verdict.bound {
        println!(
            "bound: coalitions of at most {} players from {} candidates",
            bound.max_size,
            bound.candidates.len()
        );
    }
    println!("explored: {}", verdict.explored);
    Ok(verdict.status.exit_code() as u8)
}

fn run_utilities(path: &Path, coalition: Option<&str>, w: Option<BigInt>) -> Result<u8, Error> {
    let (doc, game, gamma) = load(path)?;
    let rows: Vec<(usize, Coalition)> = match coalition {
        Some(list) => {
            let c = Coalition::from_members(game.n(), parse_players(list, "coalition")?)?;
            c.members().map(|p| (p, c.clone())).collect()
        }
        None => (0..game.n()).map(|p| (p, gamma.block_of(p).clone())).collect(),
    };
    let mut header = vec!["player".to_string(), "val".to_string()];
    header.extend(UtilityModel::ALL.iter().map(|m| m.tag().to_string()));
    println!("{}", header.join("\t"));
    for (p, c) in rows {
        let mut line = vec![doc.player_name(p), game.valuation(p, &c)?.to_string()];
        for model in UtilityModel::ALL {
            let u = game.utility(p, &c, model)?;
            line.push(match &w {
                Some(w) => to_numeric(&u, model, w).to_string(),
                None => u.render(model),
            });
        }
        println!("{}", line.join("\t"));
    }
    Ok(0)
}

fn print_table(game: &Game, c: &Coalition, columns: &[(&str, usize)]) {
    let mut header = vec![String::new()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    println!("{}", header.join("\t"));
    let mut row = vec!["val".to_string()];
    row.extend(
        columns
            .iter()
            .map(|&(_, p)| game.valuation(p, c).expect("member").to_string()),
    );
    println!("{}", row.join("\t"));
    for model in UtilityModel::ALL {
        let mut row = vec![model.tag().to_string()];
        row.extend(columns.iter().map(|&(_, p)| {
            let u: UtilityValue = game.utility(p, c, model).expect("member");
            u.render(model)
        }));
        println!("{}", row.join("\t"));
    }
}

fn demo_example1() {
    let names = ["a", "b", "c", "d", "e"];
    let graph = FriendshipGraph::new(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).expect("valid graph");
    let game = Game::new(graph);
    let grand = Coalition::grand(5);
    let gamma = CoalitionStructure::grand(5);
    let c = Coalition::from_members(5, [0, 1, 2, 3]).expect("valid coalition");

    println!("network of friends: a-b a-c b-c b-d c-d d-e");
    println!();
    println!("Gamma = {{N}}");
    print_table(&game, &grand, &[("a", 0), ("b,c", 1), ("d", 3), ("e", 4)]);
    println!();
    println!("C = {{a,b,c,d}}");
    print_table(&game, &c, &[("a", 0), ("b,c", 1), ("d", 3)]);
    println!();
    println!("core verdicts for Gamma = {{N}} (exhaustive):");
    for model in UtilityModel::ALL {
        let v = verify(
            &game,
            &gamma,
            model,
            &Strategy::Exhaustive,
            BlockingKind::Strict,
            SearchLimits::default(),
        )
        .expect("five players fit the exhaustive search");
        let cert = v
            .certificate
            .map(|c| {
                let members: Vec<&str> = c.members().map(|p| names[p]).collect();
                format!(" by {{{}}}", members.join(","))
            })
            .unwrap_or_default();
        let c_blocks = ahg_core::stability::blocks(&game, &c, &gamma, model).expect("valid instance");
        println!(
            "{}\t{}{}\t{{a,b,c,d}} blocks: {}",
            model.tag(),
            v.status.as_str(),
            cert,
            if c_blocks { "yes" } else { "no" }
        );
    }
}
