//! Matrix, label, and feature-list file formats.
//!
//! Matrices are CSV or TSV. The loader detects the layout from the file
//! itself so plain numeric dumps and the headered format written by
//! [`save_matrix`] both load without flags:
//!
//! - delimiter: tab when the first line contains one, else comma;
//! - header row: present when every cell after the first in row 1 fails
//!   to parse as a number (overridable via [`LoadOptions::has_header`]);
//! - row-id column: present when the header's corner cell is "id" or
//!   empty, or when every cell in the first data column fails to parse
//!   as a number.
//!
//! Labels serialize one integer per line, 1-based on disk and `0..k`
//! in memory. Feature lists are 1-based indices, one per line, with the
//! column name appended after a tab when the matrix had named columns.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::{Error, Result};

/// A rectangular data set: observations in rows, features in columns.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub values: Array2<f64>,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    /// True when the loaded file carried a header row (so col_ids are
    /// real names rather than generated positions).
    pub named_cols: bool,
    /// log1p was applied at load time.
    pub log1p: bool,
}

impl DataMatrix {
    /// Wrap raw values with positional ids ("1".."n", "f1".."fp").
    pub fn from_values(values: Array2<f64>) -> Self {
        let (n, p) = values.dim();
        Self {
            values,
            row_ids: (1..=n).map(|i| i.to_string()).collect(),
            col_ids: (1..=p).map(|j| format!("f{j}")).collect(),
            named_cols: false,
            log1p: false,
        }
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }
}

/// Ingestion switches; `None` fields are auto-detected.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Field delimiter; detected from the first line when `None`.
    pub delimiter: Option<u8>,
    /// Header-row presence; detected when `None`.
    pub has_header: Option<bool>,
    /// Apply x -> ln(1+x) elementwise (errors on negative entries).
    pub log1p: bool,
    /// Swap rows and columns after parsing (for p x n files).
    pub transpose: bool,
}

fn parse_cell(cell: &str) -> Option<f64> {
    let v: f64 = cell.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Load a delimited numeric matrix. Cell coordinates in errors are
/// 1-based positions in the file as written (before any transpose).
pub fn load_matrix(path: &Path, options: &LoadOptions) -> Result<DataMatrix> {
    let raw = std::fs::read_to_string(path)?;
    let delimiter = options.delimiter.unwrap_or_else(|| {
        let first_line = raw.lines().next().unwrap_or("");
        if first_line.contains('\t') {
            b'\t'
        } else {
            b','
        }
    });

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(raw.as_bytes());
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            row: i + 1,
            col: 0,
            message: e.to_string(),
        })?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    if rows.len() < 2 {
        return Err(Error::Shape(format!(
            "matrix file needs at least 2 rows, found {}",
            rows.len()
        )));
    }
    let width = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(Error::Parse {
                row: i + 1,
                col: 0,
                message: format!("expected {width} fields, found {}", row.len()),
            });
        }
    }

    let has_header = options
        .has_header
        .unwrap_or_else(|| rows[0].iter().skip(1).all(|c| parse_cell(c).is_none()));
    let body_start = usize::from(has_header);
    if rows.len() - body_start < 2 {
        return Err(Error::Shape("matrix needs at least 2 data rows".into()));
    }
    // A header starting with "id" (or an empty corner cell, as R's
    // write.csv emits) marks a row-id column even when the ids are
    // numeric strings; otherwise ids must be non-numeric to count.
    let corner = rows[0][0].trim();
    let has_row_ids = if has_header && (corner.is_empty() || corner == "id") {
        true
    } else {
        rows[body_start..]
            .iter()
            .all(|r| parse_cell(&r[0]).is_none())
    };
    let col_start = usize::from(has_row_ids);
    if width - col_start < 2 {
        return Err(Error::Shape("matrix needs at least 2 data columns".into()));
    }

    let n = rows.len() - body_start;
    let p = width - col_start;
    let mut values = Array2::zeros((n, p));
    for (i, row) in rows[body_start..].iter().enumerate() {
        for (j, cell) in row[col_start..].iter().enumerate() {
            let file_row = body_start + i + 1;
            let file_col = col_start + j + 1;
            let v = parse_cell(cell).ok_or_else(|| Error::Parse {
                row: file_row,
                col: file_col,
                message: format!("not a finite number: {:?}", cell.trim()),
            })?;
            values[[i, j]] = if options.log1p {
                if v < 0.0 {
                    return Err(Error::Parse {
                        row: file_row,
                        col: file_col,
                        message: format!("negative value {v} under log1p"),
                    });
                }
                v.ln_1p()
            } else {
                v
            };
        }
    }

    let mut row_ids: Vec<String> = if has_row_ids {
        rows[body_start..].iter().map(|r| r[0].clone()).collect()
    } else {
        (1..=n).map(|i| i.to_string()).collect()
    };
    let mut col_ids: Vec<String> = if has_header {
        rows[0][col_start..].to_vec()
    } else {
        (1..=p).map(|j| format!("f{j}")).collect()
    };
    let mut named_cols = has_header;

    if options.transpose {
        values = values.t().to_owned();
        std::mem::swap(&mut row_ids, &mut col_ids);
        named_cols = has_row_ids;
    }
    if values.nrows() < 2 || values.ncols() < 2 {
        return Err(Error::Shape(format!(
            "matrix must be at least 2x2, got {}x{}",
            values.nrows(),
            values.ncols()
        )));
    }

    Ok(DataMatrix {
        values,
        row_ids,
        col_ids,
        named_cols,
        log1p: options.log1p,
    })
}

fn format_value(v: f64) -> String {
    // 17 significant digits: round-trips every f64 exactly.
    format!("{v:.16e}")
}

/// Write a matrix as CSV with a header row and a row-id column, floats
/// at 17 significant digits so reloading reproduces the values.
pub fn save_matrix(matrix: &DataMatrix, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("id");
    for c in &matrix.col_ids {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, rid) in matrix.row_ids.iter().enumerate() {
        out.push_str(rid);
        for j in 0..matrix.p() {
            let _ = write!(out, ",{}", format_value(matrix.values[[i, j]]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Write labels one per line, converting internal `0..k` to 1-based.
pub fn save_labels(labels: &[usize], path: &Path) -> Result<()> {
    let mut out = String::new();
    for &l in labels {
        let _ = writeln!(out, "{}", l + 1);
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a label file: one integer per line, any distinct values (1/2,
/// 0/1, even -1/+1). Values are remapped to `0..k` by sorted order.
/// Returns the labels and the number of distinct classes.
pub fn load_labels(path: &Path) -> Result<(Vec<usize>, usize)> {
    let raw = std::fs::read_to_string(path)?;
    let mut values: Vec<i64> = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: i64 = line.parse().map_err(|_| Error::Parse {
            row: i + 1,
            col: 1,
            message: format!("not an integer label: {line:?}"),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Label("label file is empty".into()));
    }
    let mut distinct: Vec<i64> = values.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let labels = values
        .iter()
        .map(|v| distinct.binary_search(v).unwrap())
        .collect();
    Ok((labels, distinct.len()))
}

/// Write selected feature indices, 1-based, one per line. When `names`
/// is given (matrix had a header), the column name follows after a tab.
pub fn save_features(indices: &[usize], names: Option<&[String]>, path: &Path) -> Result<()> {
    let mut out = String::new();
    for &j in indices {
        match names {
            Some(ids) => {
                let _ = writeln!(out, "{}\t{}", j + 1, ids[j]);
            }
            None => {
                let _ = writeln!(out, "{}", j + 1);
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a feature-index file (1-based on disk, first tab-separated field
/// per line), returning 0-based indices.
pub fn load_features(path: &Path) -> Result<Vec<usize>> {
    let raw = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let field = line.split('\t').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        let v: usize = field.parse().map_err(|_| Error::Parse {
            row: i + 1,
            col: 1,
            message: format!("not a feature index: {field:?}"),
        })?;
        if v == 0 {
            return Err(Error::Parse {
                row: i + 1,
                col: 1,
                message: "feature indices are 1-based".into(),
            });
        }
        out.push(v - 1);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use tempfile::TempDir;

    fn write_tmp(dir: &TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        std::fs::write(&path, content).unwrap();
        path
    }

    #[test]
    fn loads_plain_numeric_csv() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "1,2\n3,4\n");
        let m = load_matrix(&path, &LoadOptions::default()).unwrap();
        assert_eq!(m.values, array![[1.0, 2.0], [3.0, 4.0]]);
        assert!(!m.named_cols);
        assert_eq!(m.row_ids, vec!["1", "2"]);
    }

    #[test]
    fn log1p_applies_elementwise() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "1,2\n3,4\n");
        let opts = LoadOptions {
            log1p: true,
            ..LoadOptions::default()
        };
        let m = load_matrix(&path, &opts).unwrap();
        assert!((m.values[[0, 0]] - 2.0_f64.ln()).abs() < 1e-15);
        assert!((m.values[[0, 1]] - 3.0_f64.ln()).abs() < 1e-15);
        assert!((m.values[[1, 0]] - 4.0_f64.ln()).abs() < 1e-15);
        assert!((m.values[[1, 1]] - 5.0_f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn log1p_rejects_negatives_with_position() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "1,2\n-3,4\n");
        let opts = LoadOptions {
            log1p: true,
            ..LoadOptions::default()
        };
        match load_matrix(&path, &opts) {
            Err(Error::Parse { row, col, .. }) => {
                assert_eq!((row, col), (2, 1));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_file_names_the_row() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "1,2\n3\n");
        match load_matrix(&path, &LoadOptions::default()) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_names_position() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "1,2\n3,oops\n4,5\n");
        match load_matrix(&path, &LoadOptions::default()) {
            Err(Error::Parse { row, col, .. }) => assert_eq!((row, col), (2, 2)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn detects_header_and_row_ids() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "id,geneA,geneB\ns1,1,2\ns2,3,4\n");
        let m = load_matrix(&path, &LoadOptions::default()).unwrap();
        assert_eq!(m.values, array![[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(m.col_ids, vec!["geneA", "geneB"]);
        assert_eq!(m.row_ids, vec!["s1", "s2"]);
        assert!(m.named_cols);
    }

    #[test]
    fn transpose_swaps_everything() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "id,s1,s2\ngeneA,1,2\ngeneB,3,4\ngeneC,5,6\n");
        let opts = LoadOptions {
            transpose: true,
            ..LoadOptions::default()
        };
        let m = load_matrix(&path, &opts).unwrap();
        assert_eq!(m.values, array![[1.0, 3.0, 5.0], [2.0, 4.0, 6.0]]);
        assert_eq!(m.row_ids, vec!["s1", "s2"]);
        assert_eq!(m.col_ids, vec!["geneA", "geneB", "geneC"]);
    }

    #[test]
    fn tsv_detected_from_content() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.tsv", "1\t2\n3\t4\n");
        let m = load_matrix(&path, &LoadOptions::default()).unwrap();
        assert_eq!(m.values, array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = TempDir::new().unwrap();
        let values = array![
            [1.0 / 3.0, -2.5e-17, std::f64::consts::PI],
            [1e300, -7.0, 0.1 + 0.2],
        ];
        let m = DataMatrix::from_values(values.clone());
        let path = dir.path().join("round.csv");
        save_matrix(&m, &path).unwrap();
        let back = load_matrix(&path, &LoadOptions::default()).unwrap();
        // 17 significant digits reproduce f64 bit patterns exactly.
        assert_eq!(back.values, values);
        assert_eq!(back.col_ids, m.col_ids);
    }

    #[test]
    fn labels_round_trip_and_remap() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("labels.txt");
        save_labels(&[0, 1, 1, 0], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "1\n2\n2\n1\n");
        let (labels, k) = load_labels(&path).unwrap();
        assert_eq!(labels, vec![0, 1, 1, 0]);
        assert_eq!(k, 2);

        let signs = write_tmp(&dir, "signs.txt", "-1\n1\n-1\n");
        let (labels, k) = load_labels(&signs).unwrap();
        assert_eq!(labels, vec![0, 1, 0]);
        assert_eq!(k, 2);
    }

    #[test]
    fn features_round_trip() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("features.txt");
        save_features(&[0, 4, 9], None, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "1\n5\n10\n");
        assert_eq!(load_features(&path).unwrap(), vec![0, 4, 9]);

        let named = dir.path().join("named.txt");
        let ids: Vec<String> = (0..10).map(|i| format!("g{i}")).collect();
        save_features(&[2, 3], Some(&ids), &named).unwrap();
        assert_eq!(std::fs::read_to_string(&named).unwrap(), "3\tg2\n4\tg3\n");
        assert_eq!(load_features(&named).unwrap(), vec![2, 3]);
    }

    #[test]
    fn rejects_tiny_matrices() {
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "1,2\n");
        assert!(load_matrix(&path, &LoadOptions::default()).is_err());
        let skinny = write_tmp(&dir, "s.csv", "1\n2\n3\n");
        assert!(load_matrix(&skinny, &LoadOptions::default()).is_err());
    }

    #[test]
    fn explicit_header_override() {
        // All-numeric header row would be read as data by detection;
        // the explicit option forces it.
        let dir = TempDir::new().unwrap();
        let path = write_tmp(&dir, "m.csv", "10,20\n1,2\n3,4\n");
        let opts = LoadOptions {
            has_header: Some(true),
            ..LoadOptions::default()
        };
        let m = load_matrix(&path, &opts).unwrap();
        assert_eq!(m.values, array![[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(m.col_ids, vec!["10", "20"]);
    }
}
