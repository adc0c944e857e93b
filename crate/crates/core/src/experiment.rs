//! Experiment orchestration: sweeps over datasets, generators, bin counts
//! and history settings, with multi-trial statistics and CSV emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{chung_lu, erdos_renyi, DegreeSequence};
use crate::decompose::{binarize, prune_cnf, static_tree_decomposition, temporal_tree_decomposition};
use crate::error::{Error, Result};
use crate::generate::{generate_exact_with_table, SizeWeightTable};
use crate::grammar::{extract_rules, Grammar, GrammarMeta};
use crate::graph::StaticGraph;
use crate::metrics::{
    clustering_cdf, degree_cdf, eigenvector_cdf, emd, gcd_from_matrix, hop_distance_cdf,
    mean_ci95, orbit_correlation_matrix, DiscreteCdf,
};
use crate::temporal::{ingest_path, Binning, ColumnSpec, TemporalGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Thrg,
    PhrgStatic,
    ChungLu,
    ErdosRenyi,
    External,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Thrg => "thrg",
            GeneratorKind::PhrgStatic => "phrg-static",
            GeneratorKind::ChungLu => "chung-lu",
            GeneratorKind::ErdosRenyi => "erdos-renyi",
            GeneratorKind::External => "external-edgelist",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "thrg" => Ok(Self::Thrg),
            "phrg-static" => Ok(Self::PhrgStatic),
            "chung-lu" => Ok(Self::ChungLu),
            "erdos-renyi" => Ok(Self::ErdosRenyi),
            "external-edgelist" | "external" => Ok(Self::External),
            other => Err(Error::InvalidArgument(format!("unknown generator `{other}`"))),
        }
    }

    /// Static models ignore beta and alpha; they are still evaluated once
    /// per beta so their flat lines align with the sweep.
    pub fn is_static(self) -> bool {
        !matches!(self, GeneratorKind::Thrg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricKind {
    Degree,
    Hop,
    Clustering,
    Eigenvector,
    Gcd,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Degree,
        MetricKind::Hop,
        MetricKind::Clustering,
        MetricKind::Eigenvector,
        MetricKind::Gcd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Degree => "degree",
            MetricKind::Hop => "hop",
            MetricKind::Clustering => "clustering",
            MetricKind::Eigenvector => "eigenvector",
            MetricKind::Gcd => "gcd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(Self::Degree),
            "hop" => Ok(Self::Hop),
            "clustering" => Ok(Self::Clustering),
            "eigenvector" => Ok(Self::Eigenvector),
            "gcd" => Ok(Self::Gcd),
            other => Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub datasets: Vec<(String, PathBuf)>,
    pub betas: Vec<u32>,
    pub alphas: Vec<u8>,
    pub generators: Vec<GeneratorKind>,
    pub trials: u32,
    pub seed: u64,
    pub metrics: Vec<MetricKind>,
    pub output_dir: Option<PathBuf>,
    pub external_dir: Option<PathBuf>,
    pub binning: Binning,
    pub columns: ColumnSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            betas: (1..=10).map(|k| k * 50).collect(),
            alphas: vec![0, 1],
            generators: vec![
                GeneratorKind::Thrg,
                GeneratorKind::PhrgStatic,
                GeneratorKind::ChungLu,
                GeneratorKind::ErdosRenyi,
            ],
            trials: 50,
            seed: 42,
            metrics: MetricKind::ALL.to_vec(),
            output_dir: None,
            external_dir: None,
            binning: Binning::Size,
            columns: ColumnSpec::default(),
        }
    }
}

/// Parses a `key = value` config file. Recognized keys: `dataset`
/// (repeatable, `name:path`), `betas`, `alphas`, `generators`, `trials`,
/// `seed`, `metrics`, `output`, `external`, `binning`, `columns`.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Parse {
            line: i + 1,
            msg: format!("bad {what} `{value}`"),
        };
        match key {
            "dataset" => {
                let (name, path) = value.split_once(':').ok_or_else(|| bad("dataset"))?;
                cfg.datasets
                    .push((name.trim().to_string(), PathBuf::from(path.trim())));
            }
            "betas" => {
                cfg.betas = value
                    .split(',')
                    .map(|v| v.trim().parse::<u32>().map_err(|_| bad("beta list")))
                    .collect::<Result<_>>()?;
                if cfg.betas.iter().any(|&b| b == 0) {
                    return Err(bad("beta list"));
                }
            }
            "alphas" => {
                cfg.alphas = value
                    .split(',')
                    .map(|v| v.trim().parse::<u8>().map_err(|_| bad("alpha list")))
                    .collect::<Result<_>>()?;
                if cfg.alphas.iter().any(|&a| a > 1) {
                    return Err(bad("alpha list"));
                }
            }
            "generators" => {
                cfg.generators = value
                    .split(',')
                    .map(|v| GeneratorKind::parse(v.trim()))
                    .collect::<Result<_>>()?;
            }
            "trials" => {
                cfg.trials = value.parse().map_err(|_| bad("trials"))?;
                if cfg.trials == 0 {
                    return Err(bad("trials"));
                }
            }
            "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
            "metrics" => {
                cfg.metrics = value
                    .split(',')
                    .map(|v| MetricKind::parse(v.trim()))
                    .collect::<Result<_>>()?;
            }
            "output" => cfg.output_dir = Some(PathBuf::from(value)),
            "external" => cfg.external_dir = Some(PathBuf::from(value)),
            "binning" => {
                cfg.binning = match value {
                    "size" => Binning::Size,
                    "time" => Binning::Time,
                    _ => return Err(bad("binning")),
                };
            }
            "columns" => cfg.columns = ColumnSpec::parse(value)?,
            other => {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }
    Ok(cfg)
}

/// FNV-1a over the rendered cell coordinates. Any single trial can be
/// reproduced in isolation from (master seed, dataset, generator, beta,
/// alpha, trial index).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn trial_seed(
    master: u64,
    dataset: &str,
    generator: &str,
    beta: u32,
    alpha: u8,
    trial: u32,
) -> u64 {
    fnv1a64(format!("{master}|{dataset}|{generator}|{beta}|{alpha}|{trial}").as_bytes())
}

/// Seed of the clique tie-break stream used when extracting a grammar.
pub fn extract_seed(master: u64, dataset: &str, beta: u32) -> u64 {
    fnv1a64(format!("{master}|{dataset}|extract|{beta}").as_bytes())
}

/// Precomputed distributions of the original graph, shared across trials.
pub struct OriginalStats {
    pub graph: StaticGraph,
    pub degrees: DegreeSequence,
    degree: DiscreteCdf,
    hop: DiscreteCdf,
    clustering: DiscreteCdf,
    eigenvector: DiscreteCdf,
    correlations: Vec<Vec<f64>>,
}

impl OriginalStats {
    pub fn build(graph: StaticGraph) -> Result<Self> {
        Ok(Self {
            degrees: DegreeSequence::of_graph(&graph),
            degree: degree_cdf(&graph)?,
            hop: hop_distance_cdf(&graph)?,
            clustering: clustering_cdf(&graph)?,
            eigenvector: eigenvector_cdf(&graph)?,
            correlations: orbit_correlation_matrix(&graph)?,
            graph,
        })
    }

    /// Distances from a generated graph to the original, one per metric.
    pub fn evaluate(
        &self,
        generated: &StaticGraph,
        metrics: &[MetricKind],
    ) -> Result<BTreeMap<MetricKind, f64>> {
        let mut out = BTreeMap::new();
        for &metric in metrics {
            let value = match metric {
                MetricKind::Degree => emd(&self.degree, &degree_cdf(generated)?),
                MetricKind::Hop => emd(&self.hop, &hop_distance_cdf(generated)?),
                MetricKind::Clustering => emd(&self.clustering, &clustering_cdf(generated)?),
                MetricKind::Eigenvector => {
                    emd(&self.eigenvector, &eigenvector_cdf(generated)?)
                }
                MetricKind::Gcd => {
                    gcd_from_matrix(&self.correlations, &orbit_correlation_matrix(generated)?)
                }
            };
            out.insert(metric, value);
        }
        Ok(out)
    }
}

/// One CSV row: a (dataset, generator, beta, alpha, metric) cell. `mean`
/// and `ci95` are `None` when the cell failed.
#[derive(Clone, Debug, Serialize)]
pub struct CellRow {
    pub dataset: String,
    pub generator: String,
    pub beta: u32,
    pub alpha: u8,
    pub metric: String,
    pub mean: Option<f64>,
    pub ci95: Option<f64>,
    pub trials: u32,
}

pub fn rows_to_csv(rows: &[CellRow]) -> String {
    let mut out = String::from("dataset,generator,beta,alpha,metric,mean,ci95,trials\n");
    for r in rows {
        let mean = r.mean.map_or_else(|| "error".into(), |v| v.to_string());
        let ci = r.ci95.map_or_else(|| "error".into(), |v| v.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.dataset, r.generator, r.beta, r.alpha, r.metric, mean, ci, r.trials
        ));
    }
    out
}

pub struct ExperimentOutcome {
    pub rows: Vec<CellRow>,
    pub csv: String,
}

/// Per-trial metric values for one cell.
type CellValues = BTreeMap<MetricKind, Vec<f64>>;

fn collect_cell<F>(trials: u32, metrics: &[MetricKind], run: F) -> Result<CellValues>
where
    F: Fn(u32) -> Result<BTreeMap<MetricKind, f64>> + Sync + Send,
{
    let per_trial: Vec<Result<BTreeMap<MetricKind, f64>>> =
        (0..trials).into_par_iter().map(run).collect();
    let mut values: CellValues = metrics.iter().map(|&m| (m, Vec::new())).collect();
    for trial in per_trial {
        let trial = trial?;
        for (&metric, value) in &trial {
            values.get_mut(&metric).unwrap().push(*value);
        }
    }
    Ok(values)
}

fn push_rows(
    rows: &mut Vec<CellRow>,
    dataset: &str,
    generator: &str,
    beta: u32,
    alpha: u8,
    metrics: &[MetricKind],
    trials: u32,
    cell: Result<CellValues>,
) {
    match cell {
        Ok(values) => {
            for &metric in metrics {
                let (mean, ci95) = mean_ci95(&values[&metric]);
                rows.push(CellRow {
                    dataset: dataset.into(),
                    generator: generator.into(),
                    beta,
                    alpha,
                    metric: metric.name().into(),
                    mean: Some(mean),
                    ci95: Some(ci95),
                    trials,
                });
            }
        }
        Err(_) => {
            for &metric in metrics {
                rows.push(CellRow {
                    dataset: dataset.into(),
                    generator: generator.into(),
                    beta,
                    alpha,
                    metric: metric.name().into(),
                    mean: None,
                    ci95: None,
                    trials: 0,
                });
            }
        }
    }
}

/// Grammar pipeline shared by the temporal and static variants.
pub fn grammar_from_temporal(
    g: &TemporalGraph,
    alpha: u8,
    seed: u64,
    source: &str,
) -> Result<Grammar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let td = temporal_tree_decomposition(g, &mut rng)?;
    let cnf = binarize(prune_cnf(td));
    extract_rules(
        &cnf,
        alpha,
        GrammarMeta {
            source: source.into(),
            beta: g.beta(),
            seed,
        },
    )
}

pub fn grammar_from_static(graph: &StaticGraph, source: &str) -> Result<Grammar> {
    let td = static_tree_decomposition(graph)?;
    let cnf = binarize(prune_cnf(td));
    extract_rules(
        &cnf,
        0,
        GrammarMeta {
            source: source.into(),
            beta: 0,
            seed: 0,
        },
    )
}

fn external_graphs(dir: &Path) -> Result<Vec<StaticGraph>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no external edgelists under {}",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| crate::temporal::parse_static_edgelist(&std::fs::read_to_string(p)?))
        .collect()
}

/// Full sweep: datasets x generators x betas x alphas, `trials` samples per
/// cell; static generators run once per beta with alpha 0. Failing cells
/// are recorded with an error marker and the run continues.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let mut rows = Vec::new();
    for (dataset, path) in &cfg.datasets {
        run_dataset(cfg, dataset, path, &mut rows);
    }
    let csv = rows_to_csv(&rows);
    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("results.csv"), &csv)?;
    }
    Ok(ExperimentOutcome { rows, csv })
}

fn run_dataset(cfg: &ExperimentConfig, dataset: &str, path: &Path, rows: &mut Vec<CellRow>) {
    // one shared ingestion per (dataset, beta); metric caches per dataset
    let per_beta: Result<Vec<TemporalGraph>> = cfg
        .betas
        .iter()
        .map(|&beta| ingest_path(path, cfg.columns, beta, cfg.binning))
        .collect();
    let graphs = match per_beta {
        Ok(g) => g,
        Err(_) => {
            for &generator in &cfg.generators {
                for &beta in &cfg.betas {
                    let alphas: &[u8] = if generator.is_static() { &[0] } else { &cfg.alphas };
                    for &alpha in alphas {
                        push_rows(
                            rows,
                            dataset,
                            generator.name(),
                            beta,
                            alpha,
                            &cfg.metrics,
                            cfg.trials,
                            Err(Error::InvalidArgument("ingestion failed".into())),
                        );
                    }
                }
            }
            return;
        }
    };
    let original = match OriginalStats::build(graphs[0].full_graph()) {
        Ok(o) => o,
        Err(_) => return,
    };
    let n = original.graph.vertex_count();
    let m = original.graph.edge_count();

    for &generator in &cfg.generators {
        match generator {
            GeneratorKind::Thrg => {
                for (bi, &beta) in cfg.betas.iter().enumerate() {
                    let tg = &graphs[bi];
                    for &alpha in &cfg.alphas {
                        let cell = grammar_from_temporal(
                            tg,
                            alpha,
                            extract_seed(cfg.seed, dataset, beta),
                            dataset,
                        )
                        .and_then(|grammar| {
                            let table = SizeWeightTable::build(&grammar, n)?;
                            collect_cell(cfg.trials, &cfg.metrics, |trial| {
                                let seed = trial_seed(
                                    cfg.seed,
                                    dataset,
                                    generator.name(),
                                    beta,
                                    alpha,
                                    trial,
                                );
                                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                                let out =
                                    generate_exact_with_table(&grammar, &table, n, &mut rng)?;
                                original.evaluate(&out.graph, &cfg.metrics)
                            })
                        });
                        push_rows(
                            rows,
                            dataset,
                            generator.name(),
                            beta,
                            alpha,
                            &cfg.metrics,
                            cfg.trials,
                            cell,
                        );
                    }
                }
            }
            GeneratorKind::PhrgStatic => {
                let prepared = grammar_from_static(&original.graph, dataset).and_then(
                    |grammar| {
                        let table = SizeWeightTable::build(&grammar, n)?;
                        Ok((grammar, table))
                    },
                );
                for &beta in &cfg.betas {
                    let cell = match &prepared {
                        Ok((grammar, table)) => {
                            collect_cell(cfg.trials, &cfg.metrics, |trial| {
                                let seed = trial_seed(
                                    cfg.seed,
                                    dataset,
                                    generator.name(),
                                    beta,
                                    0,
                                    trial,
                                );
                                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                                let out =
                                    generate_exact_with_table(grammar, table, n, &mut rng)?;
                                original.evaluate(&out.graph, &cfg.metrics)
                            })
                        }
                        Err(_) => Err(Error::InvalidArgument("grammar failed".into())),
                    };
                    push_rows(
                        rows,
                        dataset,
                        generator.name(),
                        beta,
                        0,
                        &cfg.metrics,
                        cfg.trials,
                        cell,
                    );
                }
            }
            GeneratorKind::ChungLu => {
                for &beta in &cfg.betas {
                    let cell = collect_cell(cfg.trials, &cfg.metrics, |trial| {
                        let seed =
                            trial_seed(cfg.seed, dataset, generator.name(), beta, 0, trial);
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let sample = chung_lu(&original.degrees, &mut rng);
                        original.evaluate(&sample, &cfg.metrics)
                    });
                    push_rows(
                        rows,
                        dataset,
                        generator.name(),
                        beta,
                        0,
                        &cfg.metrics,
                        cfg.trials,
                        cell,
                    );
                }
            }
            GeneratorKind::ErdosRenyi => {
                for &beta in &cfg.betas {
                    let cell = collect_cell(cfg.trials, &cfg.metrics, |trial| {
                        let seed =
                            trial_seed(cfg.seed, dataset, generator.name(), beta, 0, trial);
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let sample = erdos_renyi(n, m, &mut rng)?;
                        original.evaluate(&sample, &cfg.metrics)
                    });
                    push_rows(
                        rows,
                        dataset,
                        generator.name(),
                        beta,
                        0,
                        &cfg.metrics,
                        cfg.trials,
                        cell,
                    );
                }
            }
            GeneratorKind::External => {
                let evaluated: Result<(usize, CellValues)> = cfg
                    .external_dir
                    .as_ref()
                    .ok_or_else(|| {
                        Error::InvalidArgument("external generator needs `external = <dir>`".into())
                    })
                    .and_then(|dir| external_graphs(dir))
                    .and_then(|gs| {
                        let mut values: CellValues =
                            cfg.metrics.iter().map(|&m| (m, Vec::new())).collect();
                        for g in &gs {
                            for (&metric, v) in &original.evaluate(g, &cfg.metrics)? {
                                values.get_mut(&metric).unwrap().push(*v);
                            }
                        }
                        Ok((gs.len(), values))
                    });
                for &beta in &cfg.betas {
                    let (trials, cell) = match &evaluated {
                        Ok((count, values)) => (*count as u32, Ok(values.clone())),
                        Err(_) => (0, Err(Error::InvalidArgument("external failed".into()))),
                    };
                    push_rows(
                        rows,
                        dataset,
                        generator.name(),
                        beta,
                        0,
                        &cfg.metrics,
                        trials,
                        cell,
                    );
                }
            }
        }
    }
}
