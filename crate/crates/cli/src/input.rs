//! Reading numeric data files.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{CliError, Result};

/// Parsed values plus the number of lines skipped in lenient mode.
#[derive(Debug, Default)]
pub struct Loaded {
    pub values: Vec<f64>,
    pub malformed: u64,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn parse_field(text: &str, line: u64, lenient: bool, out: &mut Loaded) -> Result<()> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(());
    }
    match t.parse::<f64>() {
        Ok(v) => out.values.push(v),
        Err(_) if lenient => out.malformed += 1,
        Err(_) => return Err(CliError::Data(format!("line {line}: cannot parse `{t}` as a number"))),
    }
    Ok(())
}

/// One number per line. Blank lines and `#` comments are ignored.
pub fn read_plain(path: &Path, lenient: bool) -> Result<Loaded> {
    let mut out = Loaded::default();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim_start().starts_with('#') {
            continue;
        }
        parse_field(&line, i as u64 + 1, lenient, &mut out)?;
    }
    Ok(out)
}

/// One column of a CSV file with a header row. `column` is matched against
/// header names first, then read as a 0-based index.
pub fn read_csv(path: &Path, column: &str, lenient: bool) -> Result<Loaded> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(open(path)?);
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let index = headers
        .iter()
        .position(|h| h.trim() == column)
        .or_else(|| column.parse::<usize>().ok())
        .ok_or_else(|| CliError::Usage(format!("no column `{column}` in {}", path.display())))?;
    let mut out = Loaded::default();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        parse_field(record.get(index).unwrap_or(""), line, lenient, &mut out)?;
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Data(format!("{}: malformed CSV: {other:?}", path.display())),
    }
}

/// Dispatch on `column`: CSV when given, otherwise plain text unless the
/// file name ends in `.csv`, in which case the first column is used.
pub fn read_values(path: &Path, column: Option<&str>, lenient: bool) -> Result<Loaded> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    match (column, is_csv) {
        (Some(c), _) => read_csv(path, c, lenient),
        (None, true) => read_csv(path, "0", lenient),
        (None, false) => read_plain(path, lenient),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(name: &str, body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn plain_text_skips_blanks_and_comments() {
        let (_d, p) = file("x.txt", "# header\n1\n\n  2.5 \n-3\n1e3\n");
        assert_eq!(read_values(&p, None, false).unwrap().values, vec![1.0, 2.5, -3.0, 1000.0]);
    }

    #[test]
    fn malformed_line_is_named() {
        let (_d, p) = file("x.txt", "1\n2\nabc\n");
        let err = read_values(&p, None, false).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert_eq!(err.exit_code(), 3);
        let lenient = read_values(&p, None, true).unwrap();
        assert_eq!(lenient.values, vec![1.0, 2.0]);
        assert_eq!(lenient.malformed, 1);
    }

    #[test]
    fn decimal_comma_is_not_a_number() {
        let (_d, p) = file("x.txt", "1,5\n");
        assert!(read_values(&p, None, false).is_err());
    }

    #[test]
    fn csv_by_name_and_index() {
        let (_d, p) = file("x.csv", "id,value\na,1.5\nb,\nc,7\n");
        assert_eq!(read_values(&p, Some("value"), false).unwrap().values, vec![1.5, 7.0]);
        assert_eq!(read_values(&p, Some("1"), false).unwrap().values, vec![1.5, 7.0]);
        assert_eq!(read_values(&p, Some("nope"), false).unwrap_err().exit_code(), 1);
        let err = read_values(&p, None, false).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn missing_file_is_io() {
        let err = read_values(Path::new("/no/such/file.txt"), None, false).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("/no/such/file.txt"));
    }
}
