//! Ingestion of timestamped edgelists and size/time quantization into a
//! cumulative simple undirected temporal graph.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, VertexId};

/// One raw interaction from an input file: an undirected contact between two
/// endpoints at a point in time. Endpoints keep their original labels until
/// quantization remaps them to dense ids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeEvent {
    pub u: i64,
    pub v: i64,
    pub timestamp: f64,
}

/// Which whitespace-separated field holds the timestamp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimestampColumn {
    Index(usize),
    /// The last field on each line (default; tolerates an optional weight
    /// column between the endpoints and the timestamp).
    Last,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnSpec {
    pub source: usize,
    pub target: usize,
    pub timestamp: TimestampColumn,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            source: 0,
            target: 1,
            timestamp: TimestampColumn::Last,
        }
    }
}

impl ColumnSpec {
    /// Parses a `src,dst,time` triple of 0-based indices; the timestamp part
    /// may be `last`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "column spec must be `src,dst,time`, got `{spec}`"
            )));
        }
        let idx = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad column index `{s}`")))
        };
        let timestamp = if parts[2].eq_ignore_ascii_case("last") {
            TimestampColumn::Last
        } else {
            TimestampColumn::Index(idx(parts[2])?)
        };
        Ok(Self {
            source: idx(parts[0])?,
            target: idx(parts[1])?,
            timestamp,
        })
    }
}

/// Binning strategy for quantization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binning {
    /// Equal-count bins over the time-sorted edge sequence.
    Size,
    /// Equal-width intervals over the observed timestamp range.
    Time,
}

fn is_comment(line: &str) -> bool {
    matches!(line.as_bytes().first(), Some(b'%') | Some(b'#'))
}

/// Reads a whitespace-separated edgelist. `%`/`#` comment lines and blank
/// lines are skipped; malformed lines fail with their 1-based line number.
pub fn parse_edgelist<R: BufRead>(reader: R, columns: ColumnSpec) -> Result<Vec<EdgeEvent>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || is_comment(trimmed) {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let ts_index = match columns.timestamp {
            TimestampColumn::Index(i) => i,
            TimestampColumn::Last => fields.len().saturating_sub(1),
        };
        let need = columns.source.max(columns.target).max(ts_index) + 1;
        if fields.len() < need || fields.len() < 3 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected at least {} fields, found {}", need.max(3), fields.len()),
            });
        }
        let num = |idx: usize| -> Result<i64> {
            fields[idx].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("non-numeric vertex id `{}`", fields[idx]),
            })
        };
        let timestamp: f64 = fields[ts_index].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("non-numeric timestamp `{}`", fields[ts_index]),
        })?;
        if !timestamp.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("non-finite timestamp `{}`", fields[ts_index]),
            });
        }
        events.push(EdgeEvent {
            u: num(columns.source)?,
            v: num(columns.target)?,
            timestamp,
        });
    }
    Ok(events)
}

pub fn parse_edgelist_str(text: &str, columns: ColumnSpec) -> Result<Vec<EdgeEvent>> {
    parse_edgelist(text.as_bytes(), columns)
}

/// Lenient static read used for evaluation inputs: the first two numeric
/// fields of each data line form an edge, anything after them is ignored.
pub fn parse_static_edgelist(text: &str) -> Result<StaticGraph> {
    let mut g = StaticGraph::new();
    let mut relabel: HashMap<i64, VertexId> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected at least 2 fields, found {}", fields.len()),
            });
        }
        let mut id = |s: &str| -> Result<VertexId> {
            let raw: i64 = s.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("non-numeric vertex id `{s}`"),
            })?;
            let next = relabel.len() as VertexId;
            Ok(*relabel.entry(raw).or_insert(next))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        if u != v {
            g.add_edge(u, v);
        }
    }
    Ok(g)
}

/// Undirected canonicalization and first-contact deduplication: self-loops
/// are dropped and only the earliest event per vertex pair is kept (ties by
/// input order). The result is sorted by (timestamp, input order).
pub fn simplify(events: &[EdgeEvent]) -> Vec<EdgeEvent> {
    let mut first: HashMap<(i64, i64), (f64, usize)> = HashMap::new();
    for (idx, ev) in events.iter().enumerate() {
        if ev.u == ev.v {
            continue;
        }
        let key = (ev.u.min(ev.v), ev.u.max(ev.v));
        let entry = first.entry(key).or_insert((ev.timestamp, idx));
        if ev.timestamp < entry.0 {
            *entry = (ev.timestamp, idx);
        }
    }
    let mut kept: Vec<((i64, i64), (f64, usize))> = first.into_iter().collect();
    kept.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.1 .1.cmp(&b.1 .1)));
    kept.into_iter()
        .map(|((u, v), (timestamp, _))| EdgeEvent { u, v, timestamp })
        .collect()
}

/// An edge of the quantized graph; endpoints are dense ids with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinnedEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub bin: u32,
}

/// A cumulative simple undirected graph whose edges carry 1-based bin
/// indices. Vertices are dense ids in first-appearance order; the original
/// labels are kept for reporting.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalGraph {
    labels: Vec<i64>,
    edges: Vec<BinnedEdge>,
    beta: u32,
    bins: u32,
    original_events: usize,
}

impl TemporalGraph {
    fn from_binned(events: &[EdgeEvent], bins_of: &[u32], beta: u32) -> Self {
        let mut relabel: HashMap<i64, VertexId> = HashMap::new();
        let mut labels = Vec::new();
        let mut dense = |raw: i64| -> VertexId {
            *relabel.entry(raw).or_insert_with(|| {
                labels.push(raw);
                (labels.len() - 1) as VertexId
            })
        };
        let mut edges = Vec::with_capacity(events.len());
        for (ev, &bin) in events.iter().zip(bins_of) {
            let (a, b) = (dense(ev.u), dense(ev.v));
            edges.push(BinnedEdge {
                u: a.min(b),
                v: a.max(b),
                bin,
            });
        }
        let bins = edges.iter().map(|e| e.bin).max().unwrap_or(0);
        Self {
            labels,
            edges,
            beta,
            bins,
            original_events: events.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Requested number of bins.
    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// Number of occupied bins (contiguous `1..=bins`).
    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn original_events(&self) -> usize {
        self.original_events
    }

    pub fn set_original_events(&mut self, n: usize) {
        self.original_events = n;
    }

    pub fn label(&self, v: VertexId) -> i64 {
        self.labels[v as usize]
    }

    pub fn edges(&self) -> &[BinnedEdge] {
        &self.edges
    }

    /// All edges up to and including `bin`, with their endpoints.
    pub fn cumulative_snapshot(&self, bin: u32) -> StaticGraph {
        StaticGraph::from_edges(
            self.edges
                .iter()
                .filter(|e| e.bin <= bin)
                .map(|e| (e.u, e.v)),
        )
    }

    /// The graph on exactly the edges of `bin`, plus their endpoints.
    pub fn bin_subgraph(&self, bin: u32) -> StaticGraph {
        StaticGraph::from_edges(
            self.edges
                .iter()
                .filter(|e| e.bin == bin)
                .map(|e| (e.u, e.v)),
        )
    }

    /// The final cumulative graph.
    pub fn full_graph(&self) -> StaticGraph {
        self.cumulative_snapshot(self.bins)
    }

    /// Serializes as a one-line header `beta=<b> n=<n> m=<m>` followed by
    /// `u v bin` lines in edge order, using original labels.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "beta={} n={} m={}\n",
            self.beta,
            self.vertex_count(),
            self.edge_count()
        );
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {}\n",
                self.label(e.u),
                self.label(e.v),
                e.bin
            ));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let mut beta = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("beta=") {
                beta = v.parse().ok();
            }
        }
        let beta: u32 = beta.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "header must carry beta=<b>".into(),
        })?;
        let mut events = Vec::new();
        let mut bins_of = Vec::new();
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || is_comment(line) {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected `u v bin`, found {} fields", fields.len()),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: i + 1,
                msg: format!("non-numeric {what}"),
            };
            let u: i64 = fields[0].parse().map_err(|_| bad("vertex id"))?;
            let v: i64 = fields[1].parse().map_err(|_| bad("vertex id"))?;
            let bin: u32 = fields[2].parse().map_err(|_| bad("bin"))?;
            events.push(EdgeEvent {
                u,
                v,
                timestamp: bin as f64,
            });
            bins_of.push(bin);
        }
        Ok(Self::from_binned(&events, &bins_of, beta))
    }
}

/// Cuts the time-sorted simplified events into contiguous chunks of
/// `ceil(m / beta)` edges (the final chunk takes the remainder); equal
/// timestamps are broken by input order. Edge bin = chunk index, 1-based.
pub fn size_quantize(events: &[EdgeEvent], beta: u32) -> Result<TemporalGraph> {
    if beta == 0 {
        return Err(Error::InvalidArgument("beta must be >= 1".into()));
    }
    let m = events.len();
    let chunk = m.div_ceil(beta as usize).max(1);
    let bins_of: Vec<u32> = (0..m).map(|i| (i / chunk) as u32 + 1).collect();
    Ok(TemporalGraph::from_binned(events, &bins_of, beta))
}

/// Splits `[t_min, t_max]` into `beta` equal-width intervals (left-open,
/// right-closed; the first interval also contains its left endpoint); edge
/// bin = interval index, with empty bins compacted out so occupied bins stay
/// contiguous.
pub fn time_quantize(events: &[EdgeEvent], beta: u32) -> Result<TemporalGraph> {
    if beta == 0 {
        return Err(Error::InvalidArgument("beta must be >= 1".into()));
    }
    if events.is_empty() {
        return Ok(TemporalGraph::from_binned(events, &[], beta));
    }
    let t_min = events.iter().map(|e| e.timestamp).fold(f64::INFINITY, f64::min);
    let t_max = events
        .iter()
        .map(|e| e.timestamp)
        .fold(f64::NEG_INFINITY, f64::max);
    let width = (t_max - t_min) / beta as f64;
    let raw: Vec<u32> = events
        .iter()
        .map(|e| {
            if width == 0.0 || e.timestamp <= t_min {
                0
            } else {
                (((e.timestamp - t_min) / width).ceil() as u32 - 1).min(beta - 1)
            }
        })
        .collect();
    // compact occupied intervals to 1..=k preserving order
    let mut occupied: Vec<u32> = raw.clone();
    occupied.sort_unstable();
    occupied.dedup();
    let bins_of: Vec<u32> = raw
        .iter()
        .map(|b| occupied.binary_search(b).unwrap() as u32 + 1)
        .collect();
    Ok(TemporalGraph::from_binned(events, &bins_of, beta))
}

/// Full ingestion pipeline: parse, simplify, quantize. The original event
/// count is preserved for reporting.
pub fn ingest_str(
    text: &str,
    columns: ColumnSpec,
    beta: u32,
    binning: Binning,
) -> Result<TemporalGraph> {
    let raw = parse_edgelist_str(text, columns)?;
    let simple = simplify(&raw);
    let mut g = match binning {
        Binning::Size => size_quantize(&simple, beta)?,
        Binning::Time => time_quantize(&simple, beta)?,
    };
    g.set_original_events(raw.len());
    Ok(g)
}

pub fn ingest_path<P: AsRef<Path>>(
    path: P,
    columns: ColumnSpec,
    beta: u32,
    binning: Binning,
) -> Result<TemporalGraph> {
    let text = std::fs::read_to_string(path)?;
    ingest_str(&text, columns, beta, binning)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(u: i64, v: i64, t: f64) -> EdgeEvent {
        EdgeEvent { u, v, timestamp: t }
    }

    #[test]
    fn parse_in_file_order() {
        let text = "1 2 10\n2 3 11\n1 3 12\n";
        let events = parse_edgelist_str(text, ColumnSpec::default()).unwrap();
        assert_eq!(events, vec![ev(1, 2, 10.0), ev(2, 3, 11.0), ev(1, 3, 12.0)]);
    }

    #[test]
    fn parse_skips_comments_only_file() {
        let text = "% konect header\n% more\n\n";
        let events = parse_edgelist_str(text, ColumnSpec::default()).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn parse_rejects_short_line_with_line_number() {
        let text = "1 2 3\n1 2\n";
        let err = parse_edgelist_str(text, ColumnSpec::default()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_weight_column_ignored() {
        let text = "7 9 1 100\n";
        let events = parse_edgelist_str(text, ColumnSpec::default()).unwrap();
        assert_eq!(events, vec![ev(7, 9, 100.0)]);
    }

    #[test]
    fn simplify_keeps_earliest_contact() {
        let events = vec![ev(1, 2, 5.0), ev(2, 1, 9.0)];
        assert_eq!(simplify(&events), vec![ev(1, 2, 5.0)]);
    }

    #[test]
    fn simplify_drops_self_loops() {
        let events = vec![ev(3, 3, 1.0), ev(1, 2, 2.0)];
        assert_eq!(simplify(&events), vec![ev(1, 2, 2.0)]);
    }

    #[test]
    fn simplify_is_idempotent() {
        let events = vec![ev(4, 2, 3.0), ev(2, 4, 1.0), ev(9, 1, 2.0), ev(1, 9, 2.0)];
        let once = simplify(&events);
        assert_eq!(simplify(&once), once);
    }

    #[test]
    fn size_quantize_one_edge_per_bin() {
        let events: Vec<EdgeEvent> = (0..100).map(|i| ev(i, i + 1000, i as f64)).collect();
        let g = size_quantize(&events, 100).unwrap();
        assert_eq!(g.bins(), 100);
        for (i, e) in g.edges().iter().enumerate() {
            assert_eq!(e.bin, i as u32 + 1);
        }
    }

    #[test]
    fn size_quantize_remainder_chunk() {
        let events: Vec<EdgeEvent> = (0..10).map(|i| ev(i, i + 100, i as f64)).collect();
        let g = size_quantize(&events, 4).unwrap();
        let mut sizes = [0usize; 4];
        for e in g.edges() {
            sizes[(e.bin - 1) as usize] += 1;
        }
        assert_eq!(sizes, [3, 3, 3, 1]);
    }

    #[test]
    fn size_quantize_ties_split_across_boundary() {
        // all identical timestamps; chunking is positional
        let events: Vec<EdgeEvent> = (0..4).map(|i| ev(i, i + 100, 7.0)).collect();
        let g = size_quantize(&events, 2).unwrap();
        let bins: Vec<u32> = g.edges().iter().map(|e| e.bin).collect();
        assert_eq!(bins, vec![1, 1, 2, 2]);
    }

    #[test]
    fn time_quantize_half_open_intervals() {
        let events = vec![ev(0, 1, 0.0), ev(1, 2, 50.0), ev(2, 3, 100.0)];
        let g = time_quantize(&events, 2).unwrap();
        let bins: Vec<u32> = g.edges().iter().map(|e| e.bin).collect();
        assert_eq!(bins, vec![1, 1, 2]);
    }

    #[test]
    fn time_quantize_singleton_and_distinct() {
        let g = time_quantize(&[ev(0, 1, 5.0)], 7).unwrap();
        assert_eq!(g.edges()[0].bin, 1);

        let events: Vec<EdgeEvent> = (0..4).map(|i| ev(i, i + 10, i as f64)).collect();
        let g = time_quantize(&events, 4).unwrap();
        let bins: Vec<u32> = g.edges().iter().map(|e| e.bin).collect();
        assert_eq!(bins, vec![1, 2, 3, 4]);
    }

    #[test]
    fn time_quantize_equal_timestamps_single_bin() {
        let events: Vec<EdgeEvent> = (0..3).map(|i| ev(i, i + 10, 1.0)).collect();
        let g = time_quantize(&events, 5).unwrap();
        assert!(g.edges().iter().all(|e| e.bin == 1));
        assert_eq!(g.bins(), 1);
    }

    #[test]
    fn snapshots_filter_by_bin() {
        let events: Vec<EdgeEvent> = (0..6).map(|i| ev(i, i + 1, i as f64)).collect();
        let g = size_quantize(&events, 3).unwrap();
        assert_eq!(g.cumulative_snapshot(0).edge_count(), 0);
        assert_eq!(g.cumulative_snapshot(3).edge_count(), 6);
        assert_eq!(g.cumulative_snapshot(1).edge_count(), 2);
        // bin partition: union over bins equals the edge set, pairwise disjoint
        let total: usize = (1..=g.bins()).map(|b| g.bin_subgraph(b).edge_count()).sum();
        assert_eq!(total, g.edge_count());
    }

    #[test]
    fn snapshot_vertices_are_endpoints_only() {
        let events = vec![ev(1, 2, 0.0), ev(3, 4, 1.0)];
        let g = size_quantize(&events, 2).unwrap();
        let s = g.bin_subgraph(2);
        assert_eq!(s.vertex_count(), 2);
        assert_eq!(s.edge_count(), 1);
    }

    #[test]
    fn text_round_trip() {
        let events = vec![ev(10, 20, 0.0), ev(20, 30, 1.0), ev(10, 30, 2.0)];
        let g = size_quantize(&events, 2).unwrap();
        let text = g.to_text();
        let back = TemporalGraph::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.edges(), g.edges());
    }
}
