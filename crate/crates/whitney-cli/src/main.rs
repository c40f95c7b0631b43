use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use whitney::forests::{fmsf, leafless_cover, wedge_classes, wedge_cover, EdgeOrder};
use whitney::graph::io::{from_json, load, parse_text, to_dot, to_json, to_text};
use whitney::graph::{components, end_count, is_strongly_n_connected, is_weakly_n_connected};
use whitney::matroid::{verify_rank_axioms, RankOracle};
use whitney::ops::{invert_sequence, replay, OpSequence};
use whitney::pipeline::implement_weak_iso;
use whitney::structure::{
    enumerate_maximal_bananas, maximal_disjoint_trifurcations, voronoi_cells,
};
use whitney::tutte::{
    implementing_isomorphism, reassemble, synthesize_twists, tutte_decompose, TutteTree,
};
use whitney::weakiso::{check_weak_isomorphism, search_weak_isomorphisms, EdgeBijection};
use whitney::{fixtures, EdgeId, EdgeSet, Error, RayedGraph, Result};

#[derive(Parser)]
#[command(
    name = "whitney",
    version,
    about = "Cycle matroids, weak isomorphisms and Whitney operations"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format; dot and text apply to graph outputs only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of an edge subset (all edges by default).
    Rank {
        graph: PathBuf,
        /// Comma-separated edge ids.
        #[arg(long)]
        subset: Option<String>,
    },
    /// Checks the matroid rank axioms.
    Axioms { graph: PathBuf },
    /// Strong and weak n-connectivity.
    Connectivity {
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Components with their ray and end counts.
    Ends { graph: PathBuf },
    #[command(subcommand)]
    Weakiso(WeakisoCommand),
    #[command(subcommand)]
    Twists(TwistsCommand),
    #[command(subcommand)]
    Tutte(TutteCommand),
    /// Maximal bananas and the banana graph.
    Bananas { graph: PathBuf },
    /// Cells grown around a maximal family of disjoint trifurcations.
    Cells { graph: PathBuf },
    /// Free minimal spanning forest.
    Fmsf {
        graph: PathBuf,
        /// JSON array of edge ids; sorted ids when absent.
        #[arg(long, conflicts_with = "shuffle")]
        order: Option<PathBuf>,
        /// Use a seeded random order.
        #[arg(long)]
        shuffle: bool,
    },
    #[command(subcommand)]
    Cover(CoverCommand),
    #[command(subcommand)]
    Pipeline(PipelineCommand),
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Subcommand)]
enum WeakisoCommand {
    /// Checks whether a bijection is a weak isomorphism.
    Check {
        g1: PathBuf,
        g2: PathBuf,
        phi: PathBuf,
    },
    /// Enumerates weak isomorphisms.
    Search {
        g1: PathBuf,
        g2: PathBuf,
        /// Results per top-level branch; 0 for all.
        #[arg(long, default_value_t = 0)]
        limit: usize,
    },
}

#[derive(Subcommand)]
enum TwistsCommand {
    /// Applies an operation sequence and prints the result.
    Apply { graph: PathBuf, ops: PathBuf },
    /// Prints the sequence undoing `ops` on `graph`.
    Invert { graph: PathBuf, ops: PathBuf },
    /// Checks that `ops` on `g1` implements `phi` onto `g2`.
    Verify {
        g1: PathBuf,
        ops: PathBuf,
        phi: PathBuf,
        g2: PathBuf,
    },
}

#[derive(Subcommand)]
enum TutteCommand {
    /// Decomposes a 2-connected graph.
    Decompose { graph: PathBuf },
    /// Rebuilds a graph from a decomposition.
    Reassemble { tree: PathBuf },
    /// Synthesizes finite twists implementing `phi`.
    Synth {
        g1: PathBuf,
        g2: PathBuf,
        phi: PathBuf,
    },
}

#[derive(Subcommand)]
enum CoverCommand {
    /// Covers every edge of the rayed components by leafless forests.
    Leafless { graph: PathBuf },
    /// Covers the endpoints of every wedge class.
    Wedges { graph: PathBuf },
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// Whitney operations implementing a weak isomorphism.
    Implement {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        #[arg(long)]
        phi: PathBuf,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Names of the curated fixtures.
    List,
    /// Writes every fixture file.
    Emit {
        #[arg(long, default_value = "fixtures")]
        dir: PathBuf,
    },
}

/// What a command produced: a JSON value or a graph, and whether its verdict
/// held.
enum Output {
    Value(Value, bool),
    Graph(RayedGraph),
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

/// Reads a graph as JSON, or as an edge list when the file does not start
/// with `{`.
fn graph(path: &Path) -> Result<RayedGraph> {
    let bytes = read(path)?;
    if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        return load(&bytes);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::input(format!("{} is not UTF-8", path.display())))?;
    parse_text(&text)
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&read(path)?)
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable value")
}

fn run(cli: &Cli) -> Result<Output> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Rank { graph: p, subset } => {
            let g = graph(p)?;
            let f: EdgeSet = match subset {
                Some(s) => s
                    .split(',')
                    .filter(|x| !x.is_empty())
                    .map(EdgeId::new)
                    .collect(),
                None => g.edge_ids(),
            };
            Output::Value(json!({ "rank": RankOracle::new(&g).rank(&f)? }), true)
        }
        Command::Axioms { graph: p } => {
            let report = verify_rank_axioms(&RankOracle::new(&graph(p)?));
            Output::Value(value(&report), report.ok())
        }
        Command::Connectivity { graph: p, n } => {
            let g = graph(p)?;
            let weak = is_weakly_n_connected(&g, *n)?;
            let strong = is_strongly_n_connected(&g.core, *n)?;
            Output::Value(json!({ "n": n, "strong": strong, "weak": weak }), true)
        }
        Command::Ends { graph: p } => {
            let g = graph(p)?;
            let parts: Vec<Value> = components(&g, &g.edge_ids())?
                .blocks
                .iter()
                .map(|b| json!({ "vertices": b.vertices, "rays": b.rays, "ends": end_count(b) }))
                .collect();
            Output::Value(Value::Array(parts), true)
        }
        Command::Weakiso(WeakisoCommand::Check { g1, g2, phi }) => {
            let report =
                check_weak_isomorphism(&graph(g1)?, &graph(g2)?, &parse::<EdgeBijection>(phi)?)?;
            let verdict = report.verdict;
            Output::Value(value(&report), verdict)
        }
        Command::Weakiso(WeakisoCommand::Search { g1, g2, limit }) => {
            let found = search_weak_isomorphisms(&graph(g1)?, &graph(g2)?, *limit)?;
            Output::Value(
                json!({ "count": found.len(), "bijections": found }),
                !found.is_empty(),
            )
        }
        Command::Twists(TwistsCommand::Apply { graph: p, ops }) => {
            Output::Graph(replay(&graph(p)?, &parse::<OpSequence>(ops)?)?.graph)
        }
        Command::Twists(TwistsCommand::Invert { graph: p, ops }) => {
            let done = replay(&graph(p)?, &parse::<OpSequence>(ops)?)?;
            Output::Value(value(&invert_sequence(&done.ops)?), true)
        }
        Command::Twists(TwistsCommand::Verify { g1, ops, phi, g2 }) => {
            let map =
                implementing_isomorphism(&graph(g1)?, &parse(ops)?, &parse(phi)?, &graph(g2)?)?;
            Output::Value(
                json!({ "implements": map.is_some(), "isomorphism": map }),
                map.is_some(),
            )
        }
        Command::Tutte(TutteCommand::Decompose { graph: p }) => {
            Output::Value(value(&tutte_decompose(&graph(p)?.core)?), true)
        }
        Command::Tutte(TutteCommand::Reassemble { tree }) => {
            Output::Graph(RayedGraph::from(reassemble(&parse::<TutteTree>(tree)?)?))
        }
        Command::Tutte(TutteCommand::Synth { g1, g2, phi }) => {
            let seq = synthesize_twists(&graph(g1)?, &graph(g2)?, &parse(phi)?)?;
            Output::Value(value(&seq), true)
        }
        Command::Bananas { graph: p } => {
            Output::Value(value(&enumerate_maximal_bananas(&graph(p)?)?), true)
        }
        Command::Cells { graph: p } => {
            let g = graph(p)?;
            let seeds = maximal_disjoint_trifurcations(&g, None)?;
            Output::Value(value(&voronoi_cells(&g, &seeds)?), true)
        }
        Command::Fmsf {
            graph: p,
            order,
            shuffle,
        } => {
            let g = graph(p)?;
            let order = match order {
                Some(o) => parse::<EdgeOrder>(o)?,
                None if *shuffle => EdgeOrder::shuffled(&g, seed),
                None => EdgeOrder::sorted(&g),
            };
            Output::Value(json!({ "order": order, "forest": fmsf(&g, &order)? }), true)
        }
        Command::Cover(CoverCommand::Leafless { graph: p }) => {
            Output::Value(value(&leafless_cover(&graph(p)?)?), true)
        }
        Command::Cover(CoverCommand::Wedges { graph: p }) => {
            let g = graph(p)?;
            let mut all = true;
            let mut out = Vec::new();
            for class in wedge_classes(&g)? {
                let entry = match wedge_cover(&g, &class) {
                    Ok(cover) => json!({ "wedges": class, "cover": cover }),
                    Err(e) if e.is_input() => return Err(e),
                    Err(e) => {
                        all = false;
                        json!({ "wedges": class, "error": e.to_string() })
                    }
                };
                out.push(entry);
            }
            Output::Value(Value::Array(out), all)
        }
        Command::Pipeline(PipelineCommand::Implement { g1, g2, phi }) => {
            let r = implement_weak_iso(&graph(g1)?, &graph(g2)?, &parse(phi)?)?;
            let verdict = r.verdict;
            Output::Value(value(&r), verdict)
        }
        Command::Fixtures(FixturesCommand::List) => {
            let names: Vec<&str> = fixtures::graphs()
                .into_keys()
                .chain(fixtures::bijections().into_keys())
                .collect();
            Output::Value(value(&names), true)
        }
        Command::Fixtures(FixturesCommand::Emit { dir }) => {
            fs::create_dir_all(dir)
                .map_err(|e| Error::input(format!("cannot create {}: {e}", dir.display())))?;
            let mut written = Vec::new();
            for (name, bytes) in fixtures::files() {
                let path = dir.join(&name);
                fs::write(&path, bytes)
                    .map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))?;
                written.push(name);
            }
            Output::Value(value(&written), true)
        }
    })
}

fn render(out: &Output, format: Format) -> Result<(Vec<u8>, bool)> {
    match (out, format) {
        (Output::Value(v, ok), Format::Json) => Ok((to_json(v), *ok)),
        (Output::Value(..), _) => Err(Error::input(
            "dot and text output are only available for graphs",
        )),
        (Output::Graph(g), Format::Json) => Ok((whitney::graph::io::save(g), true)),
        (Output::Graph(g), Format::Dot) => Ok((to_dot(g).into_bytes(), true)),
        (Output::Graph(g), Format::Text) => Ok((to_text(g).into_bytes(), true)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| render(&out, cli.format)) {
        Ok((bytes, ok)) => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(&bytes)
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(3);
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("whitney: {e}");
            ExitCode::from(if e.is_input() { 2 } else { 3 })
        }
    }
}
