use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{AttributedGraph, EdgeRecord, LoadError, Vertex};

pub const DEFAULT_DELIMITER: u8 = b'\t';

const VERTEX_COLUMNS: [&str; 3] = ["vid", "v_grp", "v_mr"];
const EDGE_COLUMNS: [&str; 4] = ["src_vid", "tgt_vid", "e_grp", "e_mr"];
const LABEL_COLUMN: &str = "label";

/// Locations of a vertex table and an edge table on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFiles {
    pub vertices: PathBuf,
    pub edges: PathBuf,
    pub delimiter: u8,
}

impl GraphFiles {
    /// `vertices.tsv` and `edges.tsv` inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            vertices: dir.join("vertices.tsv"),
            edges: dir.join("edges.tsv"),
            delimiter: DEFAULT_DELIMITER,
        }
    }
}

pub fn load_graph(files: &GraphFiles) -> Result<AttributedGraph, LoadError> {
    let open = |p: &Path| {
        File::open(p).map_err(|e| LoadError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })
    };
    let vertices = open(&files.vertices)?;
    let edges = open(&files.edges)?;
    read_tables(
        vertices,
        &files.vertices.display().to_string(),
        edges,
        &files.edges.display().to_string(),
        files.delimiter,
    )
}

/// Reads a graph from two delimited tables with header rows.
pub fn read_graph<V: Read, E: Read>(
    vertices: V,
    edges: E,
    delimiter: u8,
) -> Result<AttributedGraph, LoadError> {
    read_tables(vertices, "<vertices>", edges, "<edges>", delimiter)
}

fn read_tables<V: Read, E: Read>(
    vertices: V,
    vertex_path: &str,
    edges: E,
    edge_path: &str,
    delimiter: u8,
) -> Result<AttributedGraph, LoadError> {
    let mut vertex_rows = Vec::new();
    for_each_row(vertices, vertex_path, delimiter, &VERTEX_COLUMNS, |row| {
        let vertex = Vertex {
            vid: row.parse(0)?,
            grp: row.parse(1)?,
            mr: row.parse(2)?,
            label: row.label(),
        };
        vertex_rows.push((vertex, Some(row.line)));
        Ok(())
    })?;
    let mut edge_rows = Vec::new();
    for_each_row(edges, edge_path, delimiter, &EDGE_COLUMNS, |row| {
        let edge = EdgeRecord {
            src: row.parse(0)?,
            tgt: row.parse(1)?,
            grp: row.parse(2)?,
            mr: row.parse(3)?,
            label: row.label(),
        };
        edge_rows.push((edge, Some(row.line)));
        Ok(())
    })?;
    AttributedGraph::with_lines(vertex_rows, edge_rows)
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    columns: &'a [&'a str],
    has_label: bool,
    path: &'a str,
    line: u64,
}

impl Row<'_> {
    fn parse<T: std::str::FromStr>(&self, i: usize) -> Result<T, LoadError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.record.get(i).unwrap_or_default().trim();
        raw.parse().map_err(|e: T::Err| LoadError::Malformed {
            path: self.path.to_string(),
            line: self.line,
            message: format!("column {}: {e} ({raw:?})", self.columns[i]),
        })
    }

    fn label(&self) -> Option<String> {
        if !self.has_label {
            return None;
        }
        self.record
            .get(self.columns.len())
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
    }
}

fn for_each_row<R: Read>(
    input: R,
    path: &str,
    delimiter: u8,
    columns: &[&str],
    mut f: impl FnMut(&Row<'_>) -> Result<(), LoadError>,
) -> Result<(), LoadError> {
    let malformed = |line: u64, message: String| LoadError::Malformed {
        path: path.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header.get(0) == Some("")) {
        return Ok(());
    }
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let has_label = names.len() == columns.len() + 1 && names[columns.len()] == LABEL_COLUMN;
    if names[..names.len().min(columns.len())] != *columns
        || !(names.len() == columns.len() || has_label)
    {
        return Err(malformed(
            1,
            format!(
                "expected header {}[{}{LABEL_COLUMN}], found {}",
                columns.join(","),
                ",",
                names.join(",")
            ),
        ));
    }
    let width = names.len();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                return Err(malformed(line, e.to_string()));
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        f(&Row {
            record: &record,
            columns,
            has_label,
            path,
            line,
        })?;
    }
    Ok(())
}

/// Writes the graph as two delimited tables. A `label` column is emitted only
/// when at least one row carries a label.
pub fn write_graph(graph: &AttributedGraph, files: &GraphFiles) -> std::io::Result<()> {
    for path in [&files.vertices, &files.edges] {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_vertices(graph, File::create(&files.vertices)?, files.delimiter)?;
    write_edges(graph, File::create(&files.edges)?, files.delimiter)
}

fn writer<W: Write>(out: W, delimiter: u8) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .delimiter(delimiter)
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(out)
}

fn write_vertices<W: Write>(graph: &AttributedGraph, out: W, delimiter: u8) -> std::io::Result<()> {
    let labels = graph.has_vertex_labels();
    let mut w = writer(out, delimiter);
    let mut header: Vec<&str> = VERTEX_COLUMNS.to_vec();
    if labels {
        header.push(LABEL_COLUMN);
    }
    w.write_record(&header)?;
    for v in graph.vertices() {
        let mut row = vec![v.vid.to_string(), v.grp.to_string(), v.mr.to_string()];
        if labels {
            row.push(v.label.clone().unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()
}

fn write_edges<W: Write>(graph: &AttributedGraph, out: W, delimiter: u8) -> std::io::Result<()> {
    let labels = graph.has_edge_labels();
    let mut w = writer(out, delimiter);
    let mut header: Vec<&str> = EDGE_COLUMNS.to_vec();
    if labels {
        header.push(LABEL_COLUMN);
    }
    w.write_record(&header)?;
    for e in graph.edge_records() {
        let mut row = vec![
            e.src.to_string(),
            e.tgt.to_string(),
            e.grp.to_string(),
            e.mr.to_string(),
        ];
        if labels {
            row.push(e.label.unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_small_tables() {
        let v = "vid\tv_grp\tv_mr\n0\t1\t5\n1\t1\t7\n2\t2\t3\n";
        let e = "src_vid\ttgt_vid\te_grp\te_mr\n0\t1\t1\t2\n1\t2\t1\t4\n";
        let g = read_graph(v.as_bytes(), e.as_bytes(), b'\t').unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.out_degree(0), Some(1));
    }

    #[test]
    fn empty_inputs_give_empty_graph() {
        let g = read_graph("".as_bytes(), "".as_bytes(), b'\t').unwrap();
        assert_eq!(g.vertex_count(), 0);
        let g = read_graph("vid\tv_grp\tv_mr\n".as_bytes(), "src_vid\ttgt_vid\te_grp\te_mr\n".as_bytes(), b'\t')
            .unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn labels_are_optional_columns() {
        let v = "vid,v_grp,v_mr,label\n1,0,1,kristy\n2,0,1,\n";
        let e = "src_vid,tgt_vid,e_grp,e_mr,label\n1,2,0,3,friend\n";
        let g = read_graph(v.as_bytes(), e.as_bytes(), b',').unwrap();
        assert_eq!(g.vertex(0).label.as_deref(), Some("kristy"));
        assert_eq!(g.vertex(1).label, None);
        assert_eq!(g.edge(0).label.as_deref(), Some("friend"));
    }

    #[test]
    fn malformed_row_names_its_line() {
        let v = "vid\tv_grp\tv_mr\n0\t1\t5\n1\tx\t7\n";
        let e = "src_vid\ttgt_vid\te_grp\te_mr\n";
        let err = read_graph(v.as_bytes(), e.as_bytes(), b'\t').unwrap_err();
        match err {
            LoadError::Malformed { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("v_grp"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_header_is_rejected() {
        let v = "id\tgroup\tmeasure\n";
        let err = read_graph(v.as_bytes(), "".as_bytes(), b'\t').unwrap_err();
        assert!(matches!(err, LoadError::Malformed { line: 1, .. }));
    }

    #[test]
    fn short_row_is_rejected() {
        let v = "vid\tv_grp\tv_mr\n0\t1\n";
        let err = read_graph(v.as_bytes(), "".as_bytes(), b'\t').unwrap_err();
        assert!(matches!(err, LoadError::Malformed { line: 2, .. }));
    }

    #[test]
    fn duplicate_vid_reports_line() {
        let v = "vid\tv_grp\tv_mr\n4\t1\t5\n4\t1\t7\n";
        let err = read_graph(v.as_bytes(), "".as_bytes(), b'\t').unwrap_err();
        assert_eq!(err, LoadError::DuplicateVertex { vid: 4, line: Some(3) });
    }

    #[test]
    fn dangling_endpoint_reports_line() {
        let v = "vid\tv_grp\tv_mr\n0\t1\t5\n";
        let e = "src_vid\ttgt_vid\te_grp\te_mr\n0\t0\t1\t1\n0\t7\t1\t1\n";
        let err = read_graph(v.as_bytes(), e.as_bytes(), b'\t').unwrap_err();
        assert!(matches!(err, LoadError::DanglingEdge { missing: 7, line: Some(3), .. }));
    }
}
