//! Deterministic text emission: 10-significant-digit numbers, RFC-4180 CSV
//! lines (comma separated, CRLF endings) and file-or-stdout routing.

use std::path::Path;

use crate::CliError;

/// Render a number with 10 significant digits: plain decimal notation in the
/// mid range, explicit exponent outside it. Zero stays `0`.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if (1e-4..1e10).contains(&a) {
        let exponent = a.log10().floor() as i32;
        let decimals = (9 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.9e}")
    }
}

/// One CSV line with a CRLF ending. Fields here are numbers and bare tags,
/// so no quoting is ever needed.
pub fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = fields
        .iter()
        .map(|f| f.as_ref())
        .collect::<Vec<_>>()
        .join(",");
    line.push_str("\r\n");
    line
}

/// Write `bytes` to `dir/name` when an output directory was requested,
/// otherwise print them to stdout.
pub fn emit(out: Option<&Path>, name: &str, bytes: &str) -> Result<(), CliError> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
            let path = dir.join(name);
            std::fs::write(&path, bytes)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{bytes}");
            Ok(())
        }
    }
}

/// Write a named data file into the output directory.
pub fn write_file(dir: &Path, name: &str, bytes: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, bytes)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}
