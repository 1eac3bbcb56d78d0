use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Serialize, Serializer};

use crate::args::Format;

/// A value that is either a number of bits or the empty-domain marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bits(pub Option<u64>);

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str("EMPTY-DOMAIN"),
        }
    }
}

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes rows as CSV with a header, or as a JSON array.
pub fn write_rows<T: Serialize>(w: &mut dyn Write, format: Format, rows: &[T]) -> Result<()> {
    match format {
        Format::Csv => {
            let mut out = csv::Writer::from_writer(&mut *w);
            for r in rows {
                out.serialize(r)?;
            }
            out.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
