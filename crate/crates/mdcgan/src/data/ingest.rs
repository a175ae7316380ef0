//! CSV ingestion: one numeric column, optional single header row.

use std::path::Path;

use super::{DataError, TimeSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    pub fn parse(raw: &str) -> ColumnSelector {
        match raw.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(raw.to_string()),
        }
    }
}

impl std::fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => write!(f, "{n}"),
        }
    }
}

/// Reads one numeric column in order. A first row whose selected field
/// does not parse as a number is treated as the header; any later
/// non-numeric row is an error carrying its 1-based line number.
pub fn load_csv(path: impl AsRef<Path>, column: &ColumnSelector) -> Result<TimeSeries, DataError> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path_str.clone(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| DataError::Csv {
            path: path_str.clone(),
            source,
        })?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(DataError::NoNumericRows { path: path_str });
    }

    let (col_index, first_data_row) = match column {
        ColumnSelector::Name(name) => {
            let header = &records[0];
            let matches: Vec<usize> = header
                .iter()
                .enumerate()
                .filter(|(_, field)| field.trim() == name)
                .map(|(i, _)| i)
                .collect();
            match matches.len() {
                0 => {
                    return Err(DataError::MissingColumn {
                        path: path_str,
                        column: name.clone(),
                    })
                }
                1 => (matches[0], 1),
                count => {
                    return Err(DataError::AmbiguousColumn {
                        path: path_str,
                        column: name.clone(),
                        count,
                    })
                }
            }
        }
        ColumnSelector::Index(i) => {
            let first = records[0].get(*i).ok_or_else(|| DataError::MissingColumn {
                path: path_str.clone(),
                column: i.to_string(),
            })?;
            // Numeric first row means there is no header.
            if first.trim().parse::<f64>().is_ok() {
                (*i, 0)
            } else {
                (*i, 1)
            }
        }
    };

    let mut values = Vec::with_capacity(records.len());
    for (row_idx, record) in records.iter().enumerate().skip(first_data_row) {
        let line = row_idx + 1;
        let field = record.get(col_index).ok_or_else(|| DataError::BadRow {
            path: path_str.clone(),
            line,
            field: String::new(),
        })?;
        let value = field
            .trim()
            .parse::<f64>()
            .map_err(|_| DataError::BadRow {
                path: path_str.clone(),
                line,
                field: field.to_string(),
            })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(DataError::NoNumericRows { path: path_str });
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    TimeSeries::new(name, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn minimal_headerless_file() {
        let f = write_tmp("1\n2\n3\n");
        let s = load_csv(f.path(), &ColumnSelector::Index(0)).unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn named_column_with_header() {
        let f = write_tmp("date,close,volume\n2020-01-01,10.5,100\n2020-01-02,11.0,90\n");
        let s = load_csv(f.path(), &ColumnSelector::Name("close".into())).unwrap();
        assert_eq!(s.values, vec![10.5, 11.0]);
    }

    #[test]
    fn index_column_skips_detected_header() {
        let f = write_tmp("value\n5\n6\n");
        let s = load_csv(f.path(), &ColumnSelector::Index(0)).unwrap();
        assert_eq!(s.values, vec![5.0, 6.0]);
    }

    #[test]
    fn malformed_row_reports_line() {
        let f = write_tmp("1\n2\nnot-a-number\n4\n");
        let err = load_csv(f.path(), &ColumnSelector::Index(0)).unwrap_err();
        match err {
            DataError::BadRow { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "not-a-number");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_csv("/definitely/not/here.csv", &ColumnSelector::Index(0)),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn missing_and_ambiguous_columns() {
        let f = write_tmp("a,b\n1,2\n");
        assert!(matches!(
            load_csv(f.path(), &ColumnSelector::Name("c".into())),
            Err(DataError::MissingColumn { .. })
        ));
        let f = write_tmp("a,a\n1,2\n");
        assert!(matches!(
            load_csv(f.path(), &ColumnSelector::Name("a".into())),
            Err(DataError::AmbiguousColumn { count: 2, .. })
        ));
    }

    #[test]
    fn header_only_file_has_no_rows() {
        let f = write_tmp("value\n");
        assert!(matches!(
            load_csv(f.path(), &ColumnSelector::Index(0)),
            Err(DataError::NoNumericRows { .. })
        ));
    }
}
