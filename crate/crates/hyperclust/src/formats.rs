//! Text and CSV file formats.
//!
//! Interaction files hold one interaction per line as whitespace-separated
//! 1-based node ids. Lines starting with `#` are comments, except a
//! `#n=<N>` header which fixes the node count (otherwise the largest id).
//! Community files hold one class label per node, one per line.

use std::fs;
use std::io::Write;
use std::path::Path;

use hyperclust_core::clustering::{Dendrogram, Partition};
use hyperclust_core::nalgebra::DMatrix;
use hyperclust_core::InteractionHypergraph;

use crate::error::{Error, Result};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn header_node_count(comment: &str) -> Option<&str> {
    comment.trim_start_matches('#').trim().strip_prefix("n=").map(str::trim)
}

pub fn parse_interactions(text: &str, path: &Path) -> Result<InteractionHypergraph> {
    let mut declared: Option<usize> = None;
    let mut interactions = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(value) = header_node_count(line) {
                let n = value
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| parse_error(path, line_no, format!("bad node count `{value}`")))?;
                declared = Some(n);
            }
            continue;
        }
        let ids = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .ok()
                    .filter(|&v| v > 0)
                    .ok_or_else(|| parse_error(path, line_no, format!("`{tok}` is not a positive node id")))
            })
            .collect::<Result<Vec<_>>>()?;
        interactions.push(ids);
        lines.push(line_no);
    }
    if interactions.is_empty() {
        return Err(parse_error(path, 0, "no interactions"));
    }
    let max_id = interactions.iter().flatten().copied().max().unwrap_or(0);
    let n = match declared {
        Some(n) if n < max_id => {
            return Err(parse_error(path, 0, format!("node id {max_id} exceeds declared n={n}")));
        }
        Some(n) => n,
        None => max_id,
    };
    InteractionHypergraph::new(n, interactions).map_err(|e| match e {
        hyperclust_core::Error::DuplicateNode { interaction, node } => {
            parse_error(path, lines[interaction], format!("node {node} repeated"))
        }
        other => Error::Core(other),
    })
}

pub fn read_interactions(path: &Path) -> Result<InteractionHypergraph> {
    parse_interactions(&read_text(path)?, path)
}

pub fn format_interactions(h: &InteractionHypergraph) -> String {
    let mut out = format!("#n={}\n", h.n());
    for e in h.interactions() {
        let ids: Vec<String> = e.iter().map(usize::to_string).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_interactions(path: &Path, h: &InteractionHypergraph) -> Result<()> {
    write_file(path, format_interactions(h).as_bytes())
}

pub fn read_communities(path: &Path) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let label = line
            .parse::<usize>()
            .ok()
            .filter(|&l| l > 0)
            .ok_or_else(|| parse_error(path, idx + 1, format!("`{line}` is not a positive class label")))?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(parse_error(path, 0, "no labels"));
    }
    Ok(labels)
}

pub fn write_communities(path: &Path, labels: &[usize]) -> Result<()> {
    let mut out = String::new();
    for l in labels {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Embedding rows with an optional type id column. Interactions are numbered
/// from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub coords: DMatrix<f64>,
    pub types: Option<Vec<usize>>,
}

pub fn write_embedding(path: &Path, table: &EmbeddingTable) -> Result<()> {
    let mut w = csv_writer(path)?;
    let d = table.coords.ncols();
    let mut header = vec!["interaction".to_string()];
    header.extend((1..=d).map(|c| format!("x{c}")));
    if table.types.is_some() {
        header.push("type".into());
    }
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for p in 0..table.coords.nrows() {
        let mut rec = vec![(p + 1).to_string()];
        rec.extend(table.coords.row(p).iter().map(f64::to_string));
        if let Some(t) = &table.types {
            rec.push(t[p].to_string());
        }
        w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
    }
    finish(w, path)
}

pub fn read_embedding(path: &Path) -> Result<EmbeddingTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let header = r.headers().map_err(|e| Error::csv(path, e))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if names.first() != Some(&"interaction") {
        return Err(Error::Data(format!(
            "{}: first column must be `interaction`",
            path.display()
        )));
    }
    let has_type = names.last() == Some(&"type");
    let d = names.len() - 1 - usize::from(has_type);
    for (c, name) in names[1..=d].iter().enumerate() {
        if *name != format!("x{}", c + 1) {
            return Err(Error::Data(format!("{}: unexpected column `{name}`", path.display())));
        }
    }
    if d == 0 {
        return Err(Error::Data(format!("{}: no coordinate columns", path.display())));
    }
    let mut values = Vec::new();
    let mut types = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let line = row + 2;
        for c in 1..=d {
            let v: f64 = rec[c]
                .trim()
                .parse()
                .map_err(|_| parse_error(path, line, format!("`{}` is not a number", &rec[c])))?;
            values.push(v);
        }
        if has_type {
            let t = rec[d + 1]
                .trim()
                .parse()
                .map_err(|_| parse_error(path, line, format!("`{}` is not a type id", &rec[d + 1])))?;
            types.push(t);
        }
    }
    let m = values.len() / d;
    if m == 0 {
        return Err(parse_error(path, 0, "no rows"));
    }
    Ok(EmbeddingTable {
        coords: DMatrix::from_row_slice(m, d, &values),
        types: has_type.then_some(types),
    })
}

/// `item,label` with items numbered from 1.
pub fn write_partition(path: &Path, partition: &Partition) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["item", "label"]).map_err(|e| Error::csv(path, e))?;
    for (i, l) in partition.labels().iter().enumerate() {
        w.write_record([(i + 1).to_string(), l.to_string()])
            .map_err(|e| Error::csv(path, e))?;
    }
    finish(w, path)
}

/// `step,a,b,height`; steps and cluster names (smallest members) from 1.
pub fn write_dendrogram(path: &Path, dend: &Dendrogram) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["step", "a", "b", "height"])
        .map_err(|e| Error::csv(path, e))?;
    for (s, m) in dend.steps().iter().enumerate() {
        w.write_record([
            (s + 1).to_string(),
            (m.a + 1).to_string(),
            (m.b + 1).to_string(),
            m.height.to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    finish(w, path)
}

/// One row of a long-format diagnostics table.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiagnosticRow {
    pub n: usize,
    pub m: usize,
    pub regime: String,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    if rows.is_empty() {
        w.write_record(["n", "m", "regime", "seed", "metric", "value"])
            .map_err(|e| Error::csv(path, e))?;
    }
    finish(w, path)
}
