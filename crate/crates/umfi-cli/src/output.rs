//! Atomic file output: write to a temporary file in the destination
//! directory, then rename over the final path.

use std::io::Write;
use std::path::Path;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)?;
    Ok(())
}

/// Serializes pretty JSON (with a trailing newline) to `path`, or to
/// standard output when no path is given.
pub fn emit_json<T: serde::Serialize>(
    value: &T,
    path: Option<&Path>,
) -> Result<(), crate::commands::Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::commands::Failure::Data(format!("serializing JSON: {e}")))?;
    text.push('\n');
    match path {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|e| {
            crate::commands::Failure::Data(format!("writing {}: {e}", p.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
