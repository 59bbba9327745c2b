//! Plain-text output helpers shared by the library and the CLI.

use std::io::Write;

/// Writes `lag,weight` rows with a header.
///
/// Floats use Rust's shortest round-trip formatting, so parsing the file
/// back yields bit-identical values.
pub fn write_lag_weight_csv<W: Write>(
    mut out: W,
    rows: impl IntoIterator<Item = (i64, f64)>,
) -> std::io::Result<()> {
    writeln!(out, "lag,weight")?;
    for (lag, w) in rows {
        writeln!(out, "{lag},{w:?}")?;
    }
    Ok(())
}
