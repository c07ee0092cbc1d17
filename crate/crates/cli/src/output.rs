use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use tempfile::NamedTempFile;

/// CSV rows buffered in memory and written in one atomic rename.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(digest: &str, header: &[&str]) -> Self {
        let mut text = format!("# config_digest={digest}\n");
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[&dyn Cell]) {
        let line: Vec<String> = cells.iter().map(|c| c.cell()).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<()> {
        write_atomic(path, self.text.as_bytes())
    }
}

/// Text of one CSV cell.
pub trait Cell {
    fn cell(&self) -> String;
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e15)`.
impl Cell for f64 {
    fn cell(&self) -> String {
        let a = self.abs();
        if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
            self.to_string()
        } else {
            format!("{self:e}")
        }
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

display_cell!(usize, u64, bool, &str, String);

/// Empty for `None`.
pub fn opt<T: Cell>(v: Option<T>) -> String {
    v.map(|x| x.cell()).unwrap_or_default()
}

fn temp_beside(path: &Path) -> Result<NamedTempFile> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    write_all_atomic(&[(path, bytes)])
}

/// Writes every file to a temporary sibling first and renames only once all
/// writes succeeded.
pub fn write_all_atomic(files: &[(&Path, &[u8])]) -> Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let mut tmp = temp_beside(path)?;
        tmp.write_all(bytes)
            .and_then(|_| tmp.flush())
            .with_context(|| format!("writing {}", path.display()))?;
        staged.push((tmp, *path));
    }
    for (tmp, path) in staged {
        tmp.persist(path)
            .with_context(|| format!("replacing {}", path.display()))?;
    }
    Ok(())
}
