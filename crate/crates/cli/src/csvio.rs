//! CSV encoding of sequences, grids and maps.
//!
//! Every file starts with a `# config-sha256: <hex>` comment, followed by a
//! header row. Complex values use separate `re` and `im` columns.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::CliError;

pub fn write_csv(
    path: &Path,
    hash: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "# config-sha256: {hash}")?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn sequence_rows(samples: &[Complex64]) -> impl Iterator<Item = Vec<String>> + '_ {
    samples
        .iter()
        .enumerate()
        .map(|(n, v)| vec![n.to_string(), v.re.to_string(), v.im.to_string()])
}

/// Row-major rows `(i, j, re, im)` of a 2-D complex array.
pub fn matrix_rows(values: &Array2<Complex64>) -> impl Iterator<Item = Vec<String>> + '_ {
    values.indexed_iter().map(|((i, j), v)| {
        vec![
            i.to_string(),
            j.to_string(),
            v.re.to_string(),
            v.im.to_string(),
        ]
    })
}

/// Parsed complex CSV input.
#[derive(Debug)]
pub enum ComplexTable {
    /// Header `n,re,im`.
    Sequence(Vec<Complex64>),
    /// Header `n,k,re,im` (first index is the row).
    Grid(Vec<(usize, usize, Complex64)>),
    /// Header `m,l,re,im`.
    Frame(Vec<(usize, usize, Complex64)>),
}

fn field(record: &csv::StringRecord, i: usize, line: u64) -> Result<&str, CliError> {
    record
        .get(i)
        .ok_or_else(|| CliError::Config(format!("line {line}: missing column {}", i + 1)))
}

fn parse<T: std::str::FromStr>(text: &str, line: u64) -> Result<T, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: cannot parse `{text}`")))
}

pub fn read_complex_table(path: &Path) -> Result<ComplexTable, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let records = reader.records().collect::<Result<Vec<_>, _>>()?;
    let line = |r: &csv::StringRecord| r.position().map_or(0, |p| p.line());
    match header.as_slice() {
        ["n", "re", "im"] => {
            let mut samples = Vec::with_capacity(records.len());
            for (i, r) in records.iter().enumerate() {
                let l = line(r);
                let n: usize = parse(field(r, 0, l)?, l)?;
                if n != i {
                    return Err(CliError::Config(format!(
                        "line {l}: expected sample index {i}, found {n}"
                    )));
                }
                samples.push(Complex64::new(
                    parse(field(r, 1, l)?, l)?,
                    parse(field(r, 2, l)?, l)?,
                ));
            }
            Ok(ComplexTable::Sequence(samples))
        }
        [a, b, "re", "im"] if (*a, *b) == ("n", "k") || (*a, *b) == ("m", "l") => {
            let mut cells = Vec::with_capacity(records.len());
            for r in &records {
                let l = line(r);
                cells.push((
                    parse(field(r, 0, l)?, l)?,
                    parse(field(r, 1, l)?, l)?,
                    Complex64::new(parse(field(r, 2, l)?, l)?, parse(field(r, 3, l)?, l)?),
                ));
            }
            Ok(if *a == "n" {
                ComplexTable::Grid(cells)
            } else {
                ComplexTable::Frame(cells)
            })
        }
        other => Err(CliError::Config(format!(
            "unrecognized header {other:?}; expected n,re,im or n,k,re,im or m,l,re,im"
        ))),
    }
}

/// Places `(i, j, value)` cells into a `rows x cols` array, requiring every
/// cell exactly once.
pub fn cells_to_array(
    cells: &[(usize, usize, Complex64)],
    rows: usize,
    cols: usize,
) -> Result<Array2<Complex64>, CliError> {
    let mut out = Array2::zeros((rows, cols));
    let mut seen = Array2::from_elem((rows, cols), false);
    for &(i, j, v) in cells {
        if i >= rows || j >= cols {
            return Err(CliError::Config(format!(
                "cell ({i}, {j}) outside a {rows}x{cols} array"
            )));
        }
        if std::mem::replace(&mut seen[[i, j]], true) {
            return Err(CliError::Config(format!("cell ({i}, {j}) appears twice")));
        }
        out[[i, j]] = v;
    }
    if cells.len() != rows * cols {
        return Err(CliError::Config(format!(
            "expected {} cells for a {rows}x{cols} array, found {}",
            rows * cols,
            cells.len()
        )));
    }
    Ok(out)
}
