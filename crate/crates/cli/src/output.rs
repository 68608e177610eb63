//! Artifact emission: atomic file writes or stdout.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// A named output file.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Artifact { name: name.into(), contents: contents.into() }
    }
}

/// Writes every artifact to `<name>.tmp` first and renames only once all
/// writes succeeded. Without a directory, artifacts go to stdout.
pub fn emit(out_dir: Option<&Path>, artifacts: &[Artifact]) -> Result<(), CliError> {
    let Some(dir) = out_dir else {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        for a in artifacts {
            if artifacts.len() > 1 {
                writeln!(out, "==> {} <==", a.name)?;
            }
            out.write_all(a.contents.as_bytes())?;
        }
        return Ok(());
    };
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let tmp = dir.join(format!(".{}.tmp", a.name));
        let result = fs::File::create(&tmp).and_then(|mut file| {
            file.write_all(a.contents.as_bytes())?;
            file.sync_all()
        });
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, dir.join(&a.name)));
    }
    for (tmp, dest) in staged {
        fs::rename(tmp, dest)?;
    }
    Ok(())
}

/// Renders rows of already-formatted cells as CSV.
pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}
