use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use msd_core::Error;
use serde::Serialize;

/// Single ordered sink for a command's records.
pub struct Sink {
    out: Box<dyn Write + Send>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self> {
        let out: Box<dyn Write + Send> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(Error::Io).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { out })
    }

    /// One compact JSON record per line.
    pub fn line<T: Serialize>(&mut self, record: &T) -> msd_core::Result<()> {
        serde_json::to_writer(&mut self.out, record).map_err(io::Error::from)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    /// A whole report as indented JSON.
    pub fn document(&mut self, report: &serde_json::Value) -> Result<()> {
        serde_json::to_writer_pretty(&mut self.out, report).map_err(io::Error::from).map_err(Error::Io)?;
        self.out.write_all(b"\n").map_err(Error::Io)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(Error::Io)?;
        Ok(())
    }
}

/// Adds a `meta` block unless canonical output was requested.
pub fn with_meta(mut report: serde_json::Value, canonical: bool) -> serde_json::Value {
    if !canonical {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report["meta"] = serde_json::json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "generated_unix": now,
        });
    }
    report
}

/// Error record for one failed input file, written to stderr.
#[derive(Debug, Serialize)]
pub struct FileError {
    pub file: String,
    pub kind: String,
    pub message: String,
}

impl FileError {
    pub fn new(file: &Path, err: &anyhow::Error) -> Self {
        let kind = err.downcast_ref::<Error>().map_or("error", Error::kind);
        FileError { file: file.display().to_string(), kind: kind.to_string(), message: format!("{err:#}") }
    }

    pub fn report(&self) {
        match serde_json::to_string(self) {
            Ok(s) => eprintln!("{s}"),
            Err(_) => eprintln!("{}: {}", self.file, self.message),
        }
    }
}
