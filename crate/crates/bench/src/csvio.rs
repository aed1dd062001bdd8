//! CSV in and out. Rendering is canonical so its byte count serves as the
//! raw-size baseline and its hash as a result checksum.
//!
//! Cells: integers and floats in shortest round-trip decimal, booleans as
//! `true`/`false`, vectors as `;`-separated floats, nulls as empty fields.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use colf::{Column, ColumnType, PlainColumns, Schema, Value};
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};

fn render_value(v: &Value, out: &mut String) {
    use std::fmt::Write as _;
    match v {
        Value::Null => {}
        Value::Int32(x) => write!(out, "{x}").unwrap(),
        Value::Int64(x) => write!(out, "{x}").unwrap(),
        Value::Float64(x) => write!(out, "{x}").unwrap(),
        Value::Bool(b) => write!(out, "{b}").unwrap(),
        Value::Utf8(s) => out.push_str(s),
        Value::Vector(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push(';');
                }
                write!(out, "{x}").unwrap();
            }
        }
    }
}

/// Writes `table` as CSV with a header row.
pub fn write_csv<W: Write>(table: &PlainColumns, sink: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(table.schema.names())?;
    let mut cells = vec![String::new(); table.columns.len()];
    for i in 0..table.row_count {
        for (cell, col) in cells.iter_mut().zip(&table.columns) {
            cell.clear();
            render_value(&col.value(i), cell);
        }
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

pub fn render_csv(table: &PlainColumns) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(table, &mut out).expect("writing to a Vec cannot fail");
    out
}

/// Hex SHA-256 of the canonical CSV rendering.
pub fn checksum(table: &PlainColumns) -> String {
    let mut h = Sha256::new();
    write_csv(table, HashWriter(&mut h)).expect("hashing cannot fail");
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

struct HashWriter<'a>(&'a mut Sha256);

impl Write for HashWriter<'_> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

/// Size in bytes of the canonical CSV rendering.
pub fn csv_size(table: &PlainColumns) -> u64 {
    struct Count(u64);
    impl Write for Count {
        fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
            self.0 += buf.len() as u64;
            Ok(buf.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }
    let mut c = Count(0);
    write_csv(table, &mut c).expect("counting cannot fail");
    c.0
}

fn parse_cell(text: &str, ty: ColumnType) -> std::result::Result<Value, String> {
    let t = text.trim();
    let bad = || format!("`{text}` is not a valid {ty}");
    Ok(match ty {
        ColumnType::Int32 => Value::Int32(t.parse().map_err(|_| bad())?),
        ColumnType::Int64 => Value::Int64(t.parse().map_err(|_| bad())?),
        ColumnType::Float64 => Value::float(t.parse().map_err(|_| bad())?),
        ColumnType::Bool => match t.to_ascii_lowercase().as_str() {
            "true" | "1" => Value::Bool(true),
            "false" | "0" => Value::Bool(false),
            _ => return Err(bad()),
        },
        ColumnType::Utf8 => Value::str(text),
        ColumnType::FixedVector(dim) => {
            let xs = t.split(';').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>().map_err(|_| bad())?;
            if xs.len() != dim as usize {
                return Err(format!("vector has {} elements, expected {dim}", xs.len()));
            }
            Value::Vector(xs)
        }
    })
}

/// Reads a headed CSV into columns typed by `schema`. The header must list
/// the schema's columns in order. Rows count from 1 after the header and
/// columns from 1. An empty field is null; in a non-nullable `utf8` column
/// it is the empty string.
pub fn ingest_csv<R: Read>(reader: R, schema: &Schema) -> Result<PlainColumns> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| BenchError::Csv { row: 0, column: 0, message: e.to_string() })?.clone();
    let names: Vec<&str> = schema.names().collect();
    if header.len() != names.len() {
        return Err(BenchError::Csv {
            row: 0,
            column: header.len().min(names.len()) + 1,
            message: format!("header has {} columns, schema has {}", header.len(), names.len()),
        });
    }
    for (j, (h, n)) in header.iter().zip(&names).enumerate() {
        if h.trim() != *n {
            return Err(BenchError::Csv { row: 0, column: j + 1, message: format!("header `{h}` does not match schema column `{n}`") });
        }
    }
    let mut columns: Vec<Column> = schema.fields().iter().map(|f| Column::empty(f.ty)).collect();
    let mut rows = 0;
    let mut record = csv::StringRecord::new();
    loop {
        let row = rows as u64 + 1;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(BenchError::Csv { row, column: 0, message: e.to_string() }),
        }
        if record.len() != names.len() {
            return Err(BenchError::Csv {
                row,
                column: record.len().min(names.len()) + 1,
                message: format!("row has {} fields, expected {}", record.len(), names.len()),
            });
        }
        for (j, (text, f)) in record.iter().zip(schema.fields()).enumerate() {
            let v = if text.is_empty() && !(f.ty == ColumnType::Utf8 && !f.nullable) {
                if !f.nullable {
                    return Err(colf::Error::Schema(format!(
                        "row {row}, column {}: empty field in non-nullable column `{}`",
                        j + 1,
                        f.name
                    ))
                    .into());
                }
                Value::Null
            } else {
                parse_cell(text, f.ty).map_err(|message| BenchError::Csv { row, column: j + 1, message })?
            };
            columns[j].push(&v)?;
        }
        rows += 1;
    }
    Ok(PlainColumns::new(schema.clone(), columns, rows)?)
}

pub fn ingest_csv_path(path: impl AsRef<Path>, schema: &Schema) -> Result<PlainColumns> {
    ingest_csv(std::io::BufReader::new(File::open(path)?), schema)
}

#[cfg(test)]
mod tests {
    use super::*;
    use colf::Field;

    fn schema(nullable: bool) -> Schema {
        Schema::new(vec![Field::new("a", ColumnType::Int32, false), Field::new("b", ColumnType::Utf8, nullable)]).unwrap()
    }

    #[test]
    fn examples() {
        let t = ingest_csv("a,b\n1,x\n".as_bytes(), &schema(true)).unwrap();
        assert_eq!(t.row_count, 1);
        assert_eq!(t.row(0), vec![Value::Int32(1), Value::str("x")]);

        let t = ingest_csv("a,b\n1,\n".as_bytes(), &schema(true)).unwrap();
        assert_eq!(t.row(0), vec![Value::Int32(1), Value::Null]);

        match ingest_csv("a,b\nabc,x\n".as_bytes(), &schema(true)) {
            Err(BenchError::Csv { row: 1, column: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quoting_and_errors() {
        let t = ingest_csv("a,b\n2,\"x, \"\"y\"\"\nz\"\n".as_bytes(), &schema(false)).unwrap();
        assert_eq!(t.row(0)[1], Value::str("x, \"y\"\nz"));
        assert!(matches!(ingest_csv("a,b\n,x\n".as_bytes(), &schema(true)), Err(BenchError::Colf(colf::Error::Schema(_)))));
        assert!(matches!(ingest_csv("a,b\n1,x\n2\n".as_bytes(), &schema(true)), Err(BenchError::Csv { row: 2, column: 2, .. })));
        assert!(matches!(ingest_csv("a,c\n1,x\n".as_bytes(), &schema(true)), Err(BenchError::Csv { row: 0, column: 2, .. })));
        // non-nullable strings keep empty values
        let t = ingest_csv("a,b\n1,\n".as_bytes(), &schema(false)).unwrap();
        assert_eq!(t.row(0)[1], Value::str(""));
    }

    #[test]
    fn render_then_ingest_round_trips() {
        let schema = Schema::new(vec![
            Field::new("i", ColumnType::Int64, true),
            Field::new("f", ColumnType::Float64, true),
            Field::new("s", ColumnType::Utf8, true),
            Field::new("b", ColumnType::Bool, true),
            Field::new("v", ColumnType::FixedVector(2), true),
        ])
        .unwrap();
        let rows = [
            vec![Value::Int64(-5), Value::float(0.1), Value::str("a,\"b\""), Value::Bool(true), Value::Vector(vec![1.5, -0.25])],
            vec![Value::Null, Value::Null, Value::Null, Value::Null, Value::Null],
            vec![Value::Int64(i64::MAX), Value::float(1e-300), Value::str("é\n"), Value::Bool(false), Value::Vector(vec![0.0, 3.0])],
        ];
        let columns = (0..5)
            .map(|j| Column::from_values(schema.field(j).ty, &rows.iter().map(|r| r[j].clone()).collect::<Vec<_>>()).unwrap())
            .collect();
        let t = PlainColumns::new(schema.clone(), columns, 3).unwrap();
        let back = ingest_csv(render_csv(&t).as_slice(), &schema).unwrap();
        assert!(back.same_values(&t));
        assert_eq!(checksum(&back), checksum(&t));
        assert_eq!(csv_size(&t), render_csv(&t).len() as u64);
    }
}
