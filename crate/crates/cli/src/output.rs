//! Table formatting and output routing.

use std::io::Write;

use crate::config::RunConfig;
use crate::CliError;

/// 17 significant digits, `.` separator.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub struct Table {
    sep: char,
    text: String,
}

impl Table {
    pub fn new(cfg: &RunConfig, header: &[&str]) -> Self {
        let mut t = Table {
            sep: cfg.format.separator(),
            text: String::new(),
        };
        t.row(header.iter().map(|h| h.to_string()));
        t
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(&self.sep.to_string()));
        self.text.push('\n');
    }

    pub fn blank(&mut self) {
        self.text.push('\n');
    }

    /// Appends a `# ...` line.
    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    /// Starts a new header block after a blank line.
    pub fn section(&mut self, header: &[&str]) {
        self.blank();
        self.row(header.iter().map(|h| h.to_string()));
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// True when results go to a file rather than stdout.
pub fn to_file(cfg: &RunConfig) -> bool {
    cfg.output_path.is_some()
}

/// Writes `text` to `output.path` (or `--out`), else stdout.
pub fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {path}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
