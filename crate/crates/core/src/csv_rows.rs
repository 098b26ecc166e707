use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Deserializes every data row of a headed CSV, pairing each with its
/// 1-based line in the source. Blank lines are skipped but still counted.
pub(crate) fn read_rows<T: DeserializeOwned, R: Read>(
    mut reader: R,
    origin: &Path,
) -> Result<Vec<(u64, T)>> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::io(origin, e))?;
    // The csv reader skips blank lines without counting them, so they are
    // dropped here and every remaining line keeps its original number.
    let mut original_lines = Vec::new();
    let mut kept = String::with_capacity(text.len());
    for (i, line) in text.lines().enumerate() {
        if !line.trim().is_empty() {
            original_lines.push(i as u64 + 1);
            kept.push_str(line);
            kept.push('\n');
        }
    }
    let line_at = |csv_line: u64| {
        original_lines
            .get(csv_line.saturating_sub(1) as usize)
            .copied()
            .unwrap_or(csv_line)
    };
    let parse_error = |line: Option<u64>, e: csv::Error| Error::Parse {
        path: origin.to_path_buf(),
        line: line.map_or(0, line_at),
        message: match e.kind() {
            // csv's own rendering carries its blank-line-blind position
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    };
    let mut csv = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(kept.as_bytes());
    let headers = csv.headers().map_err(|e| parse_error(Some(1), e))?.clone();
    let mut rows = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match csv.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map(|p| p.line());
                let row = record
                    .deserialize(Some(&headers))
                    .map_err(|e| parse_error(line, e))?;
                rows.push((line.map_or(0, line_at), row));
            }
            Err(e) => {
                let line = e.position().map(|p| p.line());
                return Err(parse_error(line, e));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(serde::Deserialize)]
    struct Row {
        a: String,
    }

    #[test]
    fn lines_count_blank_lines() {
        let rows: Vec<(u64, Row)> =
            read_rows("a\nx\n\n\ny\n".as_bytes(), Path::new("t.csv")).unwrap();
        let lines: Vec<(u64, &str)> = rows.iter().map(|(l, r)| (*l, r.a.as_str())).collect();
        assert_eq!(lines, [(2, "x"), (5, "y")]);
    }

    #[test]
    fn error_names_the_line() {
        #[derive(Debug, serde::Deserialize)]
        #[allow(dead_code)]
        struct Num {
            n: u32,
        }
        let err = read_rows::<Num, _>("n\n1\n\nxx\n".as_bytes(), Path::new("t.csv")).unwrap_err();
        assert!(err.to_string().starts_with("t.csv:4:"), "{err}");
    }
}
