//! Reading and writing the persisted TSV and CSV tables.

use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::SkipEntry;
use crate::tree::ClauseLayout;
use crate::variants::{Permutation, VariantRecord};

#[derive(Debug, Serialize, Deserialize)]
struct VariantRow {
    sent_id: String,
    order: String,
    is_reference: u8,
    n_constituents: usize,
    n_words: u64,
    cl_last: u64,
    total_dl: u64,
    root_arc_dl: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct LayoutRow {
    sent_id: String,
    n_words: u64,
    fixed_dl: u64,
    lengths: String,
    right_offsets: String,
    deprels: String,
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn table_error(path: &Path, source: csv::Error) -> Error {
    Error::Table {
        path: path.to_path_buf(),
        source,
    }
}

fn row_error(path: &Path, line: u64, msg: impl std::fmt::Display) -> Error {
    Error::Data(format!("{}: row {line}: {msg}", path.display()))
}

/// Serialize rows with a header into a byte buffer.
pub fn to_bytes<S: Serialize>(rows: impl IntoIterator<Item = S>, delimiter: u8) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory serialization");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn read_rows<T: DeserializeOwned>(path: &Path, delimiter: u8) -> Result<Vec<(u64, T)>> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_path(path)
        .map_err(|e| table_error(path, e))?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: T = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            row_error(path, line, e)
        })?;
        // header is line 1
        out.push((out.len() as u64 + 2, row));
    }
    Ok(out)
}

pub fn variants_tsv(records: &[VariantRecord]) -> Vec<u8> {
    to_bytes(
        records.iter().map(|r| VariantRow {
            sent_id: r.sent_id.clone(),
            order: r.order.to_string(),
            is_reference: u8::from(r.is_reference),
            n_constituents: r.n_constituents,
            n_words: r.n_words,
            cl_last: r.cl_last,
            total_dl: r.total_dl,
            root_arc_dl: r.root_arc_dl,
        }),
        b'\t',
    )
}

pub fn read_variants(path: &Path) -> Result<Vec<VariantRecord>> {
    read_rows::<VariantRow>(path, b'\t')?
        .into_iter()
        .map(|(line, row)| {
            let order: Permutation = row.order.parse().map_err(|e| row_error(path, line, e))?;
            if order.len() != row.n_constituents {
                return Err(row_error(
                    path,
                    line,
                    "order length differs from n_constituents",
                ));
            }
            if row.is_reference > 1 {
                return Err(row_error(path, line, "is_reference must be 0 or 1"));
            }
            Ok(VariantRecord {
                sent_id: row.sent_id,
                order,
                is_reference: row.is_reference == 1,
                n_constituents: row.n_constituents,
                n_words: row.n_words,
                cl_last: row.cl_last,
                total_dl: row.total_dl,
                root_arc_dl: row.root_arc_dl,
            })
        })
        .collect()
}

pub fn layouts_tsv(layouts: &[&ClauseLayout]) -> Vec<u8> {
    to_bytes(
        layouts.iter().map(|l| LayoutRow {
            sent_id: l.sent_id.clone(),
            n_words: l.n_words,
            fixed_dl: l.fixed_dl,
            lengths: join(l.preverbal.iter().map(|c| c.length), "-"),
            right_offsets: join(l.preverbal.iter().map(|c| c.right_offset), "-"),
            deprels: join(l.preverbal.iter().map(|c| c.deprel.as_str()), ","),
        }),
        b'\t',
    )
}

fn parse_counts(s: &str) -> Result<Vec<u64>, std::num::ParseIntError> {
    s.split('-').map(str::parse).collect()
}

pub fn read_layouts(path: &Path) -> Result<Vec<ClauseLayout>> {
    read_rows::<LayoutRow>(path, b'\t')?
        .into_iter()
        .map(|(line, row)| {
            let lengths = parse_counts(&row.lengths).map_err(|e| row_error(path, line, e))?;
            let offsets = parse_counts(&row.right_offsets).map_err(|e| row_error(path, line, e))?;
            let deprels: Vec<String> = row.deprels.split(',').map(str::to_string).collect();
            ClauseLayout::from_summary(
                row.sent_id,
                row.n_words,
                row.fixed_dl,
                &lengths,
                &offsets,
                &deprels,
            )
            .map_err(|e| row_error(path, line, e))
        })
        .collect()
}

pub fn skiplog_tsv(entries: &[SkipEntry]) -> Vec<u8> {
    #[derive(Serialize)]
    struct Row<'a> {
        sent_id: &'a str,
        reason: &'a str,
    }
    to_bytes(
        entries.iter().map(|e| Row {
            sent_id: &e.sent_id,
            reason: e.reason,
        }),
        b'\t',
    )
}
