//! Deterministic CSV and binary PGM writers.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::observables::OccupationField;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header row plus one comma-separated row per entry; newline-terminated.
pub fn csv_string<S: AsRef<str>>(header: &[S], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(fmt_num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Like [`csv_string`] with an integer first column.
pub fn labeled_csv_string<S: AsRef<str>>(header: &[S], rows: impl IntoIterator<Item = (usize, Vec<f64>)>) -> String {
    let mut out = header.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(",");
    out.push('\n');
    for (label, row) in rows {
        out.push_str(&label.to_string());
        for x in row {
            out.push(',');
            out.push_str(&fmt_num(x));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[S], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_bytes(path, csv_string(header, rows).as_bytes())
}

/// Grayscale P5 image of a `height × width` array scaled by its maximum.
/// Returns the bytes and the maximum (0 for an all-zero array).
pub fn pgm_bytes(values: &Array2<f64>) -> (Vec<u8>, f64) {
    let (h, w) = values.dim();
    let max = values.iter().copied().fold(0.0, f64::max);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for v in values.iter() {
        let level = if max > 0.0 { (255.0 * v / max).round().clamp(0.0, 255.0) } else { 0.0 };
        out.push(level as u8);
    }
    (out, max)
}

/// Sites top to bottom, samples left to right; the scale maximum goes to
/// `<stem>.max.txt` beside the image.
pub fn render_heatmap(field: &OccupationField, path: &Path) -> Result<f64> {
    let (bytes, max) = pgm_bytes(&field.site_pop.t().to_owned());
    write_bytes(path, &bytes)?;
    write_bytes(&path.with_extension("max.txt"), format!("{}\n", fmt_num(max)).as_bytes())?;
    Ok(max)
}
