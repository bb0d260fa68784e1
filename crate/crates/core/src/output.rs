//! CSV output helpers: comment headers, atomic file replacement.
//!
//! Every file starts with `# `-prefixed lines recording the tool version,
//! the resolved parameters and the seed. Readers skip them with
//! `csv::ReaderBuilder::comment(Some(b'#'))`.

use std::fmt::Display;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

pub const TOOL_VERSION: &str = concat!("editwar ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvHeader {
    lines: Vec<String>,
}

impl CsvHeader {
    pub fn new(command: &str) -> Self {
        CsvHeader {
            lines: vec![format!("{TOOL_VERSION} {command}")],
        }
    }

    pub fn param(mut self, key: &str, value: impl Display) -> Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn params<K: AsRef<str>, V: Display>(mut self, pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        for (k, v) in pairs {
            self.lines.push(format!("{}={v}", k.as_ref()));
        }
        self
    }

    pub fn note(mut self, text: impl Display) -> Self {
        self.lines.push(text.to_string());
        self
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for line in &self.lines {
            writeln!(out, "# {line}")?;
        }
        Ok(())
    }

    /// Writes the comment block and returns a CSV writer positioned after it.
    pub fn writer<W: Write>(&self, mut out: W) -> Result<csv::Writer<W>> {
        self.write_to(&mut out)?;
        Ok(csv::Writer::from_writer(out))
    }
}

/// Empty string for `None`, `Display` otherwise.
pub fn fmt_opt<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `path` through a temporary file in the same directory and
/// renames it into place once `fill` succeeds.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<&mut fs::File>) -> Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Opens a CSV reader that skips `#` comment lines.
pub fn csv_reader<R: std::io::Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input)
}
