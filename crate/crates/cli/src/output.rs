//! Deterministic table output: `#`-prefixed provenance headers followed by a
//! CSV body.  Identical inputs produce byte-identical files; wall-clock
//! metadata appears only behind the `--timestamps` flag.

use std::fs;
use std::path::{Path, PathBuf};

use dirac_core::error::{Error, Result};
use dirac_core::linalg::Spectrum;

/// Header block written above every CSV body.
pub struct Provenance {
    lines: Vec<String>,
    timestamps: bool,
}

impl Provenance {
    pub fn new(subcommand: &str, timestamps: bool) -> Self {
        let mut p = Self {
            lines: Vec::new(),
            timestamps,
        };
        p.lines
            .push(format!("diracspec {} {subcommand}", env!("CARGO_PKG_VERSION")));
        p
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("{key}={value}"));
        self
    }

    pub fn kv_opt_f64(&mut self, key: &str, value: Option<f64>) -> &mut Self {
        match value {
            Some(v) => self.kv(key, format_args!("{v:.17e}")),
            None => self.kv(key, "default"),
        }
    }

    /// Long free-text line (e.g. the operator conventions string).
    pub fn note(&mut self, key: &str, text: &str) -> &mut Self {
        self.lines.push(format!("{key}: {text}"));
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            out.push_str("# ");
            out.push_str(l);
            out.push('\n');
        }
        if self.timestamps {
            let t = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            out.push_str(&format!("# generated_at_unix={t}\n"));
        }
        out
    }
}

/// `value,multiplicity` rows, values at full precision and ascending.
pub fn spectrum_csv(spec: &Spectrum) -> String {
    let mut out = String::from("value,multiplicity\n");
    for &(v, m) in spec.entries() {
        out.push_str(&format!("{v:.17e},{m}\n"));
    }
    out
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| {
        Error::InvalidInput(format!("cannot create output dir {}: {e}", dir.display()))
    })?;
    let path = dir.join(name);
    fs::write(&path, content).map_err(|e| {
        Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
    })?;
    Ok(path)
}

/// Renders `Option<f64>` as a CSV cell, absent values as the empty cell.
pub fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}
