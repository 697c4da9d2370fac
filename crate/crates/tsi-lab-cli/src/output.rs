//! Output plumbing: atomic file writes, metadata lines, and small
//! formatting helpers shared by the commands.

use crate::{CliError, OutputOpts};
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub type Result<T> = std::result::Result<T, CliError>;

/// Write to the configured destination; files are written to a temporary
/// sibling and renamed into place so readers never see partial output.
pub fn emit(opts: &OutputOpts, content: &str) -> Result<()> {
    match &opts.output {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(path) => atomic_write(path, content),
    }
}

fn atomic_write(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp_path = std::path::PathBuf::from(tmp);
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&tmp_path, content)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

/// `# tsi-lab <what> generated_at=<unix-seconds>` or nothing with --no-meta.
pub fn csv_meta_line(opts: &OutputOpts, what: &str) -> String {
    if opts.no_meta {
        String::new()
    } else {
        format!("# tsi-lab {what} generated_at={}\n", unix_now())
    }
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Complex value as its two CSV columns under the selected convention.
pub fn complex_columns(z: Complex64, polar: bool) -> (f64, f64) {
    if polar {
        (z.norm(), z.arg())
    } else {
        (z.re, z.im)
    }
}

pub fn column_headers(polar: bool) -> (&'static str, &'static str) {
    if polar {
        ("mag", "phase")
    } else {
        ("re", "im")
    }
}

/// Magnitude/phase pair rounded to three decimals, for diffing against the
/// reference tables.
pub fn polar_3dp(z: Complex64) -> (f64, f64) {
    (
        (z.norm() * 1000.0).round() / 1000.0,
        (z.arg() * 1000.0).round() / 1000.0,
    )
}

/// An f64 CSV field; empty for undefined values.
pub fn opt_field(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}
