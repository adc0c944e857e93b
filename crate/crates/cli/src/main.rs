use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thrg_core::baselines::{chung_lu, erdos_renyi, DegreeSequence};
use thrg_core::decompose::{binarize, prune_cnf, static_tree_decomposition, temporal_tree_decomposition};
use thrg_core::experiment::{
    self, fnv1a64, run_experiment, ExperimentConfig, MetricKind, OriginalStats,
};
use thrg_core::generate::{
    default_max_applications, generate_exact_with_table, generate_free, generate_rejection,
    SizeWeightTable,
};
use thrg_core::grammar::{deserialize, extract_rules, serialize, Grammar, GrammarMeta};
use thrg_core::metrics::mean_ci95;
use thrg_core::temporal::{ingest_path, parse_static_edgelist, Binning, ColumnSpec};
use thrg_core::StaticGraph;

#[derive(Parser)]
#[command(
    name = "thrg",
    version,
    about = "Temporal hyperedge replacement grammars: extract, generate, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinningArg {
    Size,
    Time,
}

impl From<BinningArg> for Binning {
    fn from(b: BinningArg) -> Self {
        match b {
            BinningArg::Size => Binning::Size,
            BinningArg::Time => Binning::Time,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Reject,
    Free,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    ChungLu,
    ErdosRenyi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a grammar from a timestamped edgelist.
    Extract {
        graph_file: PathBuf,
        /// Number of edge bins.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        beta: u32,
        /// Rule history depth (0 or 1).
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        alpha: u8,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "size")]
        binning: BinningArg,
        /// Column spec `src,dst,time` (0-based; `last` allowed for time).
        #[arg(long)]
        columns: Option<String>,
        /// Grammar file to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the quantized temporal graph.
        #[arg(long)]
        dump_graph: Option<PathBuf>,
        /// Also write the CNF decomposition dump.
        #[arg(long)]
        dump_td: Option<PathBuf>,
    },
    /// Generate graphs from a grammar file.
    Generate {
        grammar_file: PathBuf,
        /// Target vertex count (required for exact and reject modes).
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Directory for the generated edgelists.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_attempts: usize,
        #[arg(long)]
        max_applications: Option<usize>,
    },
    /// Generate reference graphs fitted to an original edgelist.
    Baseline {
        original: PathBuf,
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare generated graphs against an original.
    Eval {
        original: PathBuf,
        #[arg(required = true)]
        generated: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
    },
    /// Run a full sweep from a config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u32>,
    },
    /// Build the temporal decomposition and check its properties.
    ValidateTd {
        graph_file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        beta: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "size")]
        binning: BinningArg,
        #[arg(long)]
        columns: Option<String>,
        /// Also validate after CNF normalization.
        #[arg(long)]
        cnf: bool,
        /// Write the node dump to a file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn columns_arg(columns: &Option<String>) -> anyhow::Result<ColumnSpec> {
    match columns {
        Some(spec) => Ok(ColumnSpec::parse(spec)?),
        None => Ok(ColumnSpec::default()),
    }
}

fn load_grammar(path: &PathBuf) -> anyhow::Result<Grammar> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading grammar {}", path.display()))?;
    Ok(deserialize(&text)?)
}

fn write_edgelist(
    path: &PathBuf,
    graph: &StaticGraph,
    header: &str,
) -> anyhow::Result<()> {
    let mut out = format!("# {header}\n");
    for (u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Extract {
            graph_file,
            beta,
            alpha,
            seed,
            binning,
            columns,
            output,
            dump_graph,
            dump_td,
        } => {
            let columns = columns_arg(&columns)?;
            let tg = ingest_path(&graph_file, columns, beta, binning.into())?;
            let full = tg.full_graph();
            let components = full.connected_components();
            if components > 1 {
                eprintln!("warning: input has {components} connected components");
            }
            if let Some(path) = &dump_graph {
                std::fs::write(path, tg.to_text())?;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let td = temporal_tree_decomposition(&tg, &mut rng)?;
            let temporal_width = td.width();
            let cnf = binarize(prune_cnf(td));
            if let Some(path) = &dump_td {
                std::fs::write(path, cnf.dump())?;
            }
            let source = graph_file
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let grammar = extract_rules(&cnf, alpha, GrammarMeta { source, beta, seed })?;
            std::fs::write(&output, serialize(&grammar))?;
            let static_width = static_tree_decomposition(&full)?.width();
            let ratio = if static_width > 0 {
                temporal_width as f64 / static_width as f64
            } else {
                f64::NAN
            };
            println!(
                "vertices={} edges={} events={} width={} static_width={} late_bridge_ratio={:.3} rules={} grammar={}",
                tg.vertex_count(),
                tg.edge_count(),
                tg.original_events(),
                temporal_width,
                static_width,
                ratio,
                grammar.len(),
                output.display()
            );
        }
        Command::Generate {
            grammar_file,
            size,
            mode,
            trials,
            seed,
            output,
            max_attempts,
            max_applications,
        } => {
            let grammar = load_grammar(&grammar_file)?;
            let grammar_hash = fnv1a64(serialize(&grammar).as_bytes());
            std::fs::create_dir_all(&output)?;
            let table = match mode {
                Mode::Exact => {
                    let n = size.context("--size is required for exact mode")?;
                    Some(SizeWeightTable::build(&grammar, n.max(1))?)
                }
                _ => None,
            };
            for trial in 0..trials {
                let trial_seed = seed.wrapping_add(trial as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let (out, mode_name) = match mode {
                    Mode::Exact => {
                        let n = size.unwrap();
                        (
                            generate_exact_with_table(&grammar, table.as_ref().unwrap(), n, &mut rng)?,
                            "exact",
                        )
                    }
                    Mode::Reject => {
                        let n = size.context("--size is required for reject mode")?;
                        (generate_rejection(&grammar, n, &mut rng, max_attempts)?, "reject")
                    }
                    Mode::Free => {
                        let cap = max_applications
                            .unwrap_or_else(|| default_max_applications(size.unwrap_or(100)));
                        (generate_free(&grammar, &mut rng, cap)?, "free")
                    }
                };
                let path = output.join(format!("sample-{trial:04}.edges"));
                let header = format!(
                    "grammar={grammar_hash:016x} seed={trial_seed} mode={mode_name} n={}",
                    out.graph.vertex_count()
                );
                write_edgelist(&path, &out.graph, &header)?;
                println!(
                    "trial={trial} n={} m={} collapsed={} applications={} file={}",
                    out.graph.vertex_count(),
                    out.graph.edge_count(),
                    out.collapsed_duplicates,
                    out.applications,
                    path.display()
                );
            }
        }
        Command::Baseline {
            original,
            model,
            trials,
            seed,
            output,
        } => {
            let text = std::fs::read_to_string(&original)?;
            let graph = parse_static_edgelist(&text)?;
            std::fs::create_dir_all(&output)?;
            let degrees = DegreeSequence::of_graph(&graph);
            let (n, m) = (graph.vertex_count(), graph.edge_count());
            for trial in 0..trials {
                let trial_seed = seed.wrapping_add(trial as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let (sample, name) = match model {
                    Model::ChungLu => (chung_lu(&degrees, &mut rng), "chung-lu"),
                    Model::ErdosRenyi => (erdos_renyi(n, m, &mut rng)?, "erdos-renyi"),
                };
                let path = output.join(format!("sample-{trial:04}.edges"));
                let header = format!(
                    "model={name} seed={trial_seed} n={}",
                    sample.vertex_count()
                );
                write_edgelist(&path, &sample, &header)?;
                println!(
                    "trial={trial} n={} m={} file={}",
                    sample.vertex_count(),
                    sample.edge_count(),
                    path.display()
                );
            }
        }
        Command::Eval {
            original,
            generated,
            format,
        } => {
            let text = std::fs::read_to_string(&original)?;
            let stats = OriginalStats::build(parse_static_edgelist(&text)?)?;
            let metrics = MetricKind::ALL;
            let mut per_graph: Vec<(String, BTreeMap<&'static str, f64>)> = Vec::new();
            for path in &generated {
                let g = parse_static_edgelist(&std::fs::read_to_string(path)?)?;
                let values = stats.evaluate(&g, &metrics)?;
                per_graph.push((
                    path.display().to_string(),
                    values.iter().map(|(k, &v)| (k.name(), v)).collect(),
                ));
            }
            let mut aggregate: BTreeMap<&'static str, (f64, f64)> = BTreeMap::new();
            for metric in metrics {
                let values: Vec<f64> = per_graph
                    .iter()
                    .map(|(_, m)| m[metric.name()])
                    .collect();
                aggregate.insert(metric.name(), mean_ci95(&values));
            }
            match format {
                ReportFormat::Json => {
                    let report = serde_json::json!({
                        "original": original.display().to_string(),
                        "graphs": per_graph
                            .iter()
                            .map(|(path, m)| serde_json::json!({ "path": path, "metrics": m }))
                            .collect::<Vec<_>>(),
                        "aggregate": aggregate
                            .iter()
                            .map(|(k, (mean, ci))| {
                                (k.to_string(), serde_json::json!({ "mean": mean, "ci95": ci }))
                            })
                            .collect::<serde_json::Map<_, _>>(),
                    });
                    println!("{}", serde_json::to_string_pretty(&report)?);
                }
                ReportFormat::Csv => {
                    let names: Vec<&str> = metrics.iter().map(|m| m.name()).collect();
                    println!("graph,{}", names.join(","));
                    for (path, m) in &per_graph {
                        let row: Vec<String> =
                            names.iter().map(|n| m[n].to_string()).collect();
                        println!("{path},{}", row.join(","));
                    }
                    let means: Vec<String> =
                        names.iter().map(|n| aggregate[n].0.to_string()).collect();
                    let cis: Vec<String> =
                        names.iter().map(|n| aggregate[n].1.to_string()).collect();
                    println!("mean,{}", means.join(","));
                    println!("ci95,{}", cis.join(","));
                }
            }
        }
        Command::Experiment {
            config,
            output,
            seed,
            trials,
        } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading config {}", config.display()))?;
            let mut cfg: ExperimentConfig = experiment::parse_config(&text)?;
            if let Some(dir) = output {
                cfg.output_dir = Some(dir);
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            if cfg.datasets.is_empty() {
                bail!("config lists no datasets");
            }
            let outcome = run_experiment(&cfg)?;
            match &cfg.output_dir {
                Some(dir) => println!(
                    "rows={} csv={}",
                    outcome.rows.len(),
                    dir.join("results.csv").display()
                ),
                None => print!("{}", outcome.csv),
            }
        }
        Command::ValidateTd {
            graph_file,
            beta,
            seed,
            binning,
            columns,
            cnf,
            dump,
        } => {
            let columns = columns_arg(&columns)?;
            let tg = ingest_path(&graph_file, columns, beta, binning.into())?;
            let full = tg.full_graph();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let td = temporal_tree_decomposition(&tg, &mut rng)?;
            let report = td.validate(&full);
            let show = |name: &str, check: &thrg_core::decompose::Check| {
                match &check.witness {
                    Some(w) => println!("{name}: FAIL ({w})"),
                    None => println!("{name}: ok"),
                }
            };
            show("vertex-cover", &report.vertex_cover);
            show("edge-cover", &report.edge_cover);
            show("running-intersection", &report.running_intersection);
            println!("width={}", td.width());
            let mut all_ok = report.is_valid();
            let final_td = if cnf {
                let normalized = binarize(prune_cnf(td));
                let post = normalized.validate(&full);
                show("cnf-vertex-cover", &post.vertex_cover);
                show("cnf-edge-cover", &post.edge_cover);
                show("cnf-running-intersection", &post.running_intersection);
                println!("cnf_width={}", normalized.width());
                all_ok &= post.is_valid();
                normalized
            } else {
                td
            };
            if let Some(path) = dump {
                std::fs::write(&path, final_td.dump())?;
            }
            if !all_ok {
                bail!("tree decomposition checks failed");
            }
        }
    }
    Ok(())
}
