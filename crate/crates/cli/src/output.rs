//! CSV, manifest and plot-script emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:?}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// In-memory CSV table: a header row, a `# config_hash=` comment row,
/// then data rows.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(columns: &[&str], hash: &str) -> Self {
        let mut text = columns.join(",");
        text.push('\n');
        let _ = writeln!(text, "# config_hash={hash}");
        Self { text, columns: columns.len() }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        debug_assert_eq!(fields.len(), self.columns, "column count");
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, &self.text)?;
        Ok(())
    }
}

/// `dir/stem<suffix>` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    crate_version: &'a str,
    config_hash: &'a str,
    seed: Option<u64>,
    outputs: Vec<String>,
    config: toml::Value,
}

pub fn write_manifest(
    csv_path: &Path,
    command: &str,
    canonical: &str,
    seed: Option<u64>,
    outputs: &[PathBuf],
) -> Result<PathBuf, CliError> {
    let config: toml::Value = toml::from_str(canonical).map_err(|e| CliError::Config(e.to_string()))?;
    let m = Manifest {
        command,
        crate_version: env!("CARGO_PKG_VERSION"),
        config_hash: &config_hash(canonical),
        seed,
        outputs: outputs.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()).collect(),
        config,
    };
    let path = sibling(csv_path, ".manifest.toml");
    std::fs::write(&path, toml::to_string(&m).map_err(|e| CliError::Config(e.to_string()))?)?;
    Ok(path)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)?;
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn figure1_script(csv: &Path, bodies: &[String]) -> String {
    let data = file_name(csv);
    let mut s = String::from(
        "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n\
         set xlabel 'N'\nset ylabel 'P(positive definite)'\nset yrange [0:1.05]\nset terminal pngcairo size 900,600\n",
    );
    let _ = writeln!(s, "set output '{}'", file_name(&sibling(csv, ".png")));
    let plots: Vec<String> = bodies
        .iter()
        .map(|b| format!("'{data}' using 2:(stringcolumn(1) eq '{b}' ? $3 : 1/0) with linespoints title '{b}'"))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn curves_script(csv: &Path, columns: &[&str]) -> String {
    let data = file_name(csv);
    let mut s = String::from(
        "set datafile separator ','\nset datafile commentschars '#'\nset xlabel 'gamma'\nset xrange [0:pi]\n\
         set terminal pngcairo size 900,600\n",
    );
    let _ = writeln!(s, "set output '{}'", file_name(&sibling(csv, ".png")));
    let plots: Vec<String> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| format!("'{data}' using 1:{} with lines title '{c}'", i + 2))
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}

pub fn figure2_script(csv: &Path) -> String {
    let data = file_name(csv);
    let mut s = String::from(
        "set datafile separator ','\nset datafile commentschars '#'\nset xlabel 'l'\nset ylabel '|CV|'\nset logscale y\n\
         set terminal pngcairo size 900,600\n",
    );
    let _ = writeln!(s, "set output '{}'", file_name(&sibling(csv, ".png")));
    let plots: Vec<String> = ["hm1", "hm3", "hm3iid", "pr1", "pr3"]
        .iter()
        .map(|e| {
            format!("'{data}' using 1:((stringcolumn(2) eq '{e}' && stringcolumn(3) eq '11') ? $7 : 1/0) with linespoints title '{e} (11)'")
        })
        .collect();
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
