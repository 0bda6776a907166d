//! Gnuplot-ready whitespace-separated data files.

use std::path::Path;

use crate::diagnostics::DecayFit;
use crate::error::Result;
use crate::report::atomic_write;
use crate::wigner::WignerTable;

/// Two-column trend file: eps value (log-log friendly).
pub fn write_trend(path: &Path, eps: &[f64], values: &[f64]) -> Result<()> {
    let mut buf = String::from("# eps value\n");
    for (e, v) in eps.iter().zip(values) {
        buf.push_str(&format!("{e} {v}\n"));
    }
    atomic_write(path, buf.as_bytes())
}

/// Decay-fit file: log(1/(|t - t_focus| + eps)), log(channel), fit line.
pub fn write_decay_fit(
    path: &Path,
    times: &[f64],
    channel: &[f64],
    t_focus: f64,
    eps: f64,
    fit: &DecayFit,
) -> Result<()> {
    let mut buf = String::from("# x=log(1/(|t-tf|+eps)) log_value fit\n");
    for (&t, &v) in times.iter().zip(channel) {
        if v <= 0.0 {
            continue;
        }
        let x = (1.0 / ((t - t_focus).abs() + eps)).ln();
        buf.push_str(&format!("{x} {} {}\n", v.ln(), fit.intercept + fit.slope * x));
    }
    atomic_write(path, buf.as_bytes())
}

/// Heatmap matrix: first row lists the xi values (first column is a
/// placeholder), then one row per x with the table values.
pub fn write_wigner_heatmap(path: &Path, w: &WignerTable) -> Result<()> {
    let mut buf = String::new();
    buf.push_str("0.0");
    for j in 0..w.nxi {
        buf.push_str(&format!(" {}", w.xi(j)));
    }
    buf.push('\n');
    for i in 0..w.nx {
        buf.push_str(&format!("{}", w.x(i)));
        for j in 0..w.nxi {
            buf.push_str(&format!(" {}", w.at(i, j)));
        }
        buf.push('\n');
    }
    atomic_write(path, buf.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_file_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("trend.dat");
        write_trend(&p, &[0.08, 0.04], &[1.0, 0.5]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# eps value\n0.08 1\n"));
    }
}
