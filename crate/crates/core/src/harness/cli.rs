//! Command-line front end.
//!
//! Every option can also come from a `key = value` config file passed with
//! `--config`; flags given on the command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, GraphSpec, InitSpec, PerNode, PhiSpec, Radius};
use super::csv_io::emit_csv;
use super::experiment::{run_experiment, ExperimentOutcome, Trace};
use super::fit::{fit_baseline_rate, fit_rate, DEFAULT_TAIL_FRACTION};
use super::svg::emit_svg;
use crate::engine::NoiseParams;
use crate::error::Error;
use crate::graph::{algebraic_connectivity, format_edge_list, write_edge_list};
use crate::theory::GraphRates;

const CONFIG_KEYS: &[&str] = &[
    "graph",
    "n",
    "radius",
    "graph-seed",
    "edges",
    "sigma",
    "sigma2",
    "phi",
    "iters",
    "seeds",
    "seed",
    "stride",
    "init",
    "threads",
    "out",
    "svg",
    "csv",
    "window",
];

#[derive(Debug, Parser)]
#[command(
    name = "gossip",
    about = "Randomized pairwise gossip with controlled noise insertion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Graph utilities.
    Graph {
        #[command(subcommand)]
        action: GraphCommand,
    },
    /// Run one multi-seed experiment and write a CSV trace and SVG chart.
    Run(RunArgs),
    /// Run one experiment per phi value; one CSV each plus a combined SVG.
    Sweep(RunArgs),
    /// Print rates and thresholds for a graph and noise schedule.
    Theory(TheoryArgs),
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
}

#[derive(Debug, Args, Default)]
struct GraphArgs {
    /// cycle | path | complete | rgg | file
    #[arg(long)]
    graph: Option<String>,
    /// Vertex count.
    #[arg(long)]
    n: Option<String>,
    /// Geometric graph radius, or `auto` for sqrt(ln n / n).
    #[arg(long)]
    radius: Option<String>,
    /// Seed for geometric graph sampling.
    #[arg(long = "graph-seed")]
    graph_seed: Option<String>,
    /// Edge-list file for `--graph file`.
    #[arg(long)]
    edges: Option<String>,
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Noise standard deviation, scalar or comma-separated per node.
    #[arg(long)]
    sigma: Option<String>,
    /// Noise variance, scalar or comma-separated per node.
    #[arg(long)]
    sigma2: Option<String>,
    /// Decay rate: scalar, per-node list, `corollary:<gamma>` or `threshold`.
    /// For `sweep`, a comma-separated grid of scalars.
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    iters: Option<String>,
    /// Number of independent seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// First seed.
    #[arg(long)]
    seed: Option<String>,
    /// Record every k-th iteration.
    #[arg(long)]
    stride: Option<String>,
    /// uniform | ramp | comma-separated values
    #[arg(long)]
    init: Option<String>,
    /// Worker threads (overrides GOSSIP_THREADS).
    #[arg(long)]
    threads: Option<String>,
    /// CSV path for `run`, output directory for `sweep`.
    #[arg(long)]
    out: Option<String>,
    /// SVG path for `run` (defaults to the CSV path with an .svg extension).
    #[arg(long)]
    svg: Option<String>,
    /// Tail fraction used for rate fitting in the summary.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Also write a per-node table here.
    #[arg(long)]
    csv: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Command-line value first, then config file.
struct Settings {
    file: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Settings {
                file: BTreeMap::new(),
            });
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Run(Error::io(path, e)))?;
        Ok(Settings {
            file: parse_config(&text)?,
        })
    }

    fn get(&self, cli: &Option<String>, key: &str) -> Option<String> {
        cli.clone().or_else(|| self.file.get(key).cloned())
    }

    fn parse<T: std::str::FromStr>(
        &self,
        cli: &Option<String>,
        key: &str,
        default: T,
    ) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(cli, key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|e| usage(format!("invalid value {v:?} for {key}: {e}"))),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(usage(format!(
                "config line {}: unknown key {key:?}",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| usage(format!("invalid {what} entry {v:?}: {e}")))
        })
        .collect()
}

fn per_node(s: &str, what: &str) -> CliResult<PerNode> {
    let v = parse_list(s, what)?;
    Ok(if v.len() == 1 {
        PerNode::Scalar(v[0])
    } else {
        PerNode::List(v)
    })
}

fn graph_spec(args: &GraphArgs, st: &Settings) -> CliResult<GraphSpec> {
    let kind = st
        .get(&args.graph, "graph")
        .unwrap_or_else(|| "cycle".into());
    let n: usize = st.parse(&args.n, "n", 10)?;
    Ok(match kind.as_str() {
        "cycle" => GraphSpec::Cycle { n },
        "path" => GraphSpec::Path { n },
        "complete" => GraphSpec::Complete { n },
        "rgg" => {
            let radius = match st.get(&args.radius, "radius").as_deref() {
                None | Some("auto") => Radius::Auto,
                Some(r) => Radius::Value(
                    r.parse()
                        .map_err(|e| usage(format!("invalid radius {r:?}: {e}")))?,
                ),
            };
            GraphSpec::Rgg {
                n,
                radius,
                seed: st.parse(&args.graph_seed, "graph-seed", 0)?,
            }
        }
        "file" => GraphSpec::File(
            st.get(&args.edges, "edges")
                .ok_or_else(|| usage("--graph file requires --edges <path>"))?
                .into(),
        ),
        other => return Err(usage(format!("unknown graph kind {other:?}"))),
    })
}

fn sigma2_spec(noise: &NoiseArgs, st: &Settings) -> CliResult<PerNode> {
    // Flags are consulted as a pair before the config file so that a flag of
    // one kind overrides a file entry of the other.
    let (sigma, sigma2) = if noise.sigma.is_some() || noise.sigma2.is_some() {
        (noise.sigma.clone(), noise.sigma2.clone())
    } else {
        (
            st.file.get("sigma").cloned(),
            st.file.get("sigma2").cloned(),
        )
    };
    match (sigma, sigma2) {
        (Some(_), Some(_)) => Err(usage("give either sigma or sigma2, not both")),
        (Some(s), None) => squared(per_node(&s, "sigma")?),
        (None, Some(v)) => per_node(&v, "sigma2"),
        (None, None) => Ok(PerNode::Scalar(1.0)),
    }
}

fn squared(p: PerNode) -> CliResult<PerNode> {
    let check = |v: f64| {
        if v < 0.0 {
            Err(usage(format!("sigma must be >= 0, got {v}")))
        } else {
            Ok(v * v)
        }
    };
    Ok(match p {
        PerNode::Scalar(v) => PerNode::Scalar(check(v)?),
        PerNode::List(l) => PerNode::List(l.into_iter().map(check).collect::<CliResult<_>>()?),
    })
}

fn phi_spec(s: &str) -> CliResult<PhiSpec> {
    if s == "threshold" {
        return Ok(PhiSpec::Threshold);
    }
    if let Some(g) = s.strip_prefix("corollary:") {
        return g
            .trim()
            .parse()
            .map(PhiSpec::Corollary)
            .map_err(|e| usage(format!("invalid gamma {g:?}: {e}")));
    }
    Ok(PhiSpec::Values(per_node(s, "phi")?))
}

fn experiment_config(args: &RunArgs, st: &Settings) -> CliResult<ExperimentConfig> {
    let init = match st.get(&args.init, "init").as_deref() {
        None | Some("uniform") => InitSpec::Uniform,
        Some("ramp") => InitSpec::Ramp,
        Some(list) => InitSpec::Explicit(parse_list(list, "init")?),
    };
    let threads = match st.get(&args.threads, "threads") {
        None => None,
        Some(t) => Some(
            t.parse()
                .map_err(|e| usage(format!("invalid threads {t:?}: {e}")))?,
        ),
    };
    Ok(ExperimentConfig {
        graph: graph_spec(&args.graph, st)?,
        init,
        sigma2: sigma2_spec(&args.noise, st)?,
        phi: phi_spec(
            &st.get(&args.noise.phi, "phi")
                .unwrap_or_else(|| "0.5".into()),
        )?,
        iterations: st.parse(&args.iters, "iters", 10_000)?,
        seeds: st.parse(&args.seeds, "seeds", 100)?,
        base_seed: st.parse(&args.seed, "seed", 0)?,
        stride: st.parse(&args.stride, "stride", 1)?,
        threads,
    })
}

fn summarize(out: &ExperimentOutcome, window: f64) -> String {
    let fit = fit_rate(&out.trace, window);
    let base = fit_baseline_rate(&out.trace, window);
    let mut s = String::new();
    let _ = writeln!(s, "{}", out.trace.label);
    let _ = writeln!(
        s,
        "  fitted rate      {:.6}{}",
        fit.rate,
        if fit.degenerate { " (degenerate)" } else { "" }
    );
    let _ = writeln!(
        s,
        "  baseline rate    {:.6}{}",
        base.rate,
        if base.degenerate { " (degenerate)" } else { "" }
    );
    let _ = writeln!(s, "  rho              {:.6}", out.rates.rho);
    let _ = writeln!(s, "  dominant rate    {:.6}", out.rates.dominant_rate);
    let _ = writeln!(s, "  regime           {}", out.rates.regime);
    s
}

fn cmd_run(args: &RunArgs) -> CliResult<()> {
    let st = Settings::load(args.graph.config.as_deref())?;
    let cfg = experiment_config(args, &st)?;
    let window: f64 = st.parse(&args.window, "window", DEFAULT_TAIL_FRACTION)?;
    let csv_path = PathBuf::from(
        st.get(&args.out, "out")
            .unwrap_or_else(|| "trace.csv".into()),
    );
    let svg_path = st
        .get(&args.svg, "svg")
        .map(PathBuf::from)
        .unwrap_or_else(|| csv_path.with_extension("svg"));

    let out = run_experiment(&cfg)?;
    emit_csv(&out.trace, &csv_path)?;
    emit_svg(std::slice::from_ref(&out.trace), &svg_path)?;
    print!("{}", summarize(&out, window));
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}

fn cmd_sweep(args: &RunArgs) -> CliResult<()> {
    let st = Settings::load(args.graph.config.as_deref())?;
    let base = experiment_config(args, &st)?;
    let window: f64 = st.parse(&args.window, "window", DEFAULT_TAIL_FRACTION)?;
    let phis = parse_list(
        &st.get(&args.noise.phi, "phi")
            .ok_or_else(|| usage("sweep needs --phi v1,v2,..."))?,
        "phi",
    )?;
    let dir = PathBuf::from(st.get(&args.out, "out").unwrap_or_else(|| "sweep".into()));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Run(Error::io(&dir, e)))?;

    let mut traces: Vec<Trace> = Vec::new();
    for phi in phis {
        let cfg = ExperimentConfig {
            phi: PhiSpec::Values(PerNode::Scalar(phi)),
            ..base.clone()
        };
        let out = run_experiment(&cfg)?;
        let path = dir.join(format!("phi_{phi}.csv"));
        emit_csv(&out.trace, &path)?;
        print!("{}", summarize(&out, window));
        traces.push(out.trace);
    }
    let svg = st
        .get(&args.svg, "svg")
        .map(PathBuf::from)
        .unwrap_or_else(|| dir.join("figure.svg"));
    emit_svg(&traces, &svg)?;
    println!("wrote {} traces and {}", traces.len(), svg.display());
    Ok(())
}

fn cmd_theory(args: &TheoryArgs) -> CliResult<()> {
    let st = Settings::load(args.graph.config.as_deref())?;
    let spec = graph_spec(&args.graph, &st)?;
    let built = spec.build()?;
    let g = &built.graph;
    let rates = GraphRates::new(g)?;
    let sigma2 = sigma2_spec(&args.noise, &st)?.resolve(g.n(), "sigma2")?;
    let phi = phi_spec(
        &st.get(&args.noise.phi, "phi")
            .unwrap_or_else(|| "0.5".into()),
    )?
    .resolve(g.n(), &rates)?;
    let params = NoiseParams::new(sigma2, phi)?;
    let report = rates.rate_report(&params)?;

    let fmt_range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            format!("{lo:.10}")
        } else {
            format!("{lo:.10} .. {hi:.10}")
        }
    };
    let dominant = report
        .dominant_set
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let rows = [
        ("graph", spec.to_string()),
        ("n", g.n().to_string()),
        ("m", g.m().to_string()),
        ("alpha", format!("{:.10}", report.alpha)),
        ("rho", format!("{:.10}", report.rho)),
        ("noise_rate", fmt_range(&report.noise_rates)),
        ("dominant_rate", format!("{:.10}", report.dominant_rate)),
        (
            "dominant_set",
            if dominant.is_empty() {
                "-".into()
            } else {
                dominant
            },
        ),
        ("threshold_phi", fmt_range(&report.threshold_phis)),
        ("regime", report.regime.to_string()),
    ];
    for (k, v) in rows {
        println!("{k:<16}{v}");
    }

    if let Some(path) = st.get(&args.csv, "csv") {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|e| CliError::Run(Error::Parse(format!("{path}: {e}"))))?;
        let to_err = |e: csv::Error| CliError::Run(Error::Parse(format!("{path}: {e}")));
        w.write_record([
            "node",
            "degree",
            "sigma2",
            "phi",
            "noise_rate",
            "threshold_phi",
        ])
        .map_err(to_err)?;
        for i in 0..g.n() {
            w.write_record([
                i.to_string(),
                g.degree(i).to_string(),
                format!("{:.16e}", params.sigma2()[i]),
                format!("{:.16e}", params.phi()[i]),
                format!("{:.16e}", report.noise_rates[i]),
                format!("{:.16e}", report.threshold_phis[i]),
            ])
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| CliError::Run(Error::io(&path, e)))?;
    }
    Ok(())
}

fn cmd_graph_gen(args: &GenArgs) -> CliResult<()> {
    let st = Settings::load(args.graph.config.as_deref())?;
    let built = graph_spec(&args.graph, &st)?.build()?;
    let g = &built.graph;
    match st.get(&args.out, "out") {
        Some(path) => {
            write_edge_list(g, &path)?;
            let alpha = algebraic_connectivity(g)?.algebraic_connectivity;
            let seed = built
                .seed_used
                .map(|s| format!(" graph_seed={s}"))
                .unwrap_or_default();
            println!(
                "wrote {path}: n={} m={} alpha={alpha:.10}{seed}",
                g.n(),
                g.m()
            );
        }
        None => print!("{}", format_edge_list(g)),
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the command.
/// Returns the process exit code: 0 on success, 1 on runtime failure,
/// 2 on usage errors.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Graph {
            action: GraphCommand::Gen(args),
        } => cmd_graph_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Theory(args) => cmd_theory(args),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let m =
            parse_config("# header\ngraph = rgg\nn=100 # trailing\n\ngraph_seed = 4\n").unwrap();
        assert_eq!(m["graph"], "rgg");
        assert_eq!(m["n"], "100");
        assert_eq!(m["graph-seed"], "4");
        assert!(matches!(parse_config("bogus = 1"), Err(CliError::Usage(_))));
        assert!(matches!(
            parse_config("no equals sign"),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn cli_overrides_file() {
        let st = Settings {
            file: parse_config("n = 12\nphi = 0.3").unwrap(),
        };
        assert_eq!(st.parse::<usize>(&Some("5".into()), "n", 1).unwrap(), 5);
        assert_eq!(st.parse::<usize>(&None, "n", 1).unwrap(), 12);
        assert_eq!(st.parse::<u64>(&None, "seed", 9).unwrap(), 9);
    }

    #[test]
    fn phi_forms() {
        assert_eq!(
            phi_spec("0.9").unwrap(),
            PhiSpec::Values(PerNode::Scalar(0.9))
        );
        assert_eq!(phi_spec("corollary:0.2").unwrap(), PhiSpec::Corollary(0.2));
        assert_eq!(phi_spec("threshold").unwrap(), PhiSpec::Threshold);
        assert_eq!(
            phi_spec("0.1,0.2").unwrap(),
            PhiSpec::Values(PerNode::List(vec![0.1, 0.2]))
        );
        assert!(phi_spec("corollary:x").is_err());
    }

    #[test]
    fn sigma_is_squared() {
        let st = Settings {
            file: BTreeMap::new(),
        };
        let noise = NoiseArgs {
            sigma: Some("2".into()),
            sigma2: None,
            phi: None,
        };
        assert_eq!(sigma2_spec(&noise, &st).unwrap(), PerNode::Scalar(4.0));
        let both = NoiseArgs {
            sigma: Some("2".into()),
            sigma2: Some("2".into()),
            phi: None,
        };
        assert!(sigma2_spec(&both, &st).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli_main(["gossip", "run", "--nope"]), 2);
        assert_eq!(cli_main(["gossip", "frobnicate"]), 2);
        assert_eq!(
            cli_main(["gossip", "theory", "--graph", "cycle", "--n", "x"]),
            2
        );
        assert_eq!(
            cli_main(["gossip", "theory", "--graph", "cycle", "--n", "2"]),
            1
        );
        assert_eq!(
            cli_main(["gossip", "theory", "--graph", "cycle", "--n", "10", "--phi", "0.98"]),
            0
        );
    }
}
