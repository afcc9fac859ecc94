//! Numeric CSV: one header row, then one row per record, every value written
//! with 17 significant digits so it reads back bit-for-bit.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub struct CsvWriter<W: Write> {
    out: csv::Writer<W>,
    columns: usize,
}

impl CsvWriter<File> {
    pub fn create(path: &Path, header: &[String]) -> Result<Self> {
        Self::new(File::create(path)?, header)
    }
}

impl<W: Write> CsvWriter<W> {
    pub fn new(out: W, header: &[String]) -> Result<Self> {
        let mut out = csv::Writer::from_writer(out);
        out.write_record(header).map_err(std::io::Error::from)?;
        Ok(Self {
            out,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.columns {
            return Err(Error::InvalidArgument(format!(
                "row has {} values for {} columns",
                values.len(),
                self.columns
            )));
        }
        self.out
            .write_record(values.iter().map(|v| format_value(*v)))
            .map_err(std::io::Error::from)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out.into_inner().map_err(|e| e.into_error())?)
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header names for a list of plain and complex columns.
#[derive(Default)]
pub struct Header(Vec<String>);

impl Header {
    pub fn real(mut self, name: &str) -> Self {
        self.0.push(name.to_string());
        self
    }

    pub fn complex(mut self, name: &str) -> Self {
        self.0.push(format!("{name}_re"));
        self.0.push(format!("{name}_im"));
        self
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }
}

/// Appends `z` as two columns.
pub fn push_complex(row: &mut Vec<f64>, z: C64) {
    row.push(z.re);
    row.push(z.im);
}
