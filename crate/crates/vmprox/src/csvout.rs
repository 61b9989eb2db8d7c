//! CSV convergence traces. The schema is stable:
//!
//! ```text
//! epoch,passes,seconds,objective,gap,grad_map_norm,u_min,u_max,alpha1,alpha2,t_k
//! ```
//!
//! preceded by one `#` comment line recording the gap convention and the
//! reference value. Floats are printed with 17 significant digits so every
//! value round-trips exactly; files are written atomically (temp + rename).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use vmprox_core::solver::{EpochRecord, RunTrace};

/// Header row of a single-run trace.
pub const TRACE_HEADER: &str =
    "epoch,passes,seconds,objective,gap,grad_map_norm,u_min,u_max,alpha1,alpha2,t_k";

/// 17-significant-digit formatting, round-trip exact for f64.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn push_record(out: &mut String, record: &EpochRecord) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{}",
        record.epoch,
        format_float(record.passes),
        format_float(record.seconds),
        format_float(record.objective),
        format_float(record.gap),
        format_float(record.grad_map_norm),
        format_float(record.u_min),
        format_float(record.u_max),
        format_float(record.alpha1),
        format_float(record.alpha2),
        record.t_k,
    );
}

fn comment_line(p_star: Option<f64>) -> String {
    format!(
        "# gap = max(objective - p_star, 1e-16); p_star = {}\n",
        p_star
            .map(format_float)
            .unwrap_or_else(|| "none".to_string())
    )
}

/// Renders one run's trace.
pub fn render_trace(trace: &RunTrace) -> String {
    let mut out = comment_line(trace.p_star);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for record in &trace.records {
        push_record(&mut out, record);
    }
    out
}

/// Renders traces of several runs in long format with a leading `solver`
/// column.
pub fn render_merged(traces: &[(String, &RunTrace)], p_star: Option<f64>) -> String {
    let mut out = comment_line(p_star);
    out.push_str("solver,");
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (name, trace) in traces {
        for record in &trace.records {
            let mut row = String::new();
            push_record(&mut row, record);
            let _ = write!(out, "{name},{row}");
        }
    }
    out
}

/// Atomic write: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = match path.file_name() {
        Some(name) => {
            let mut n = name.to_os_string();
            n.push(".tmp");
            path.with_file_name(n)
        }
        None => {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "output path has no file name",
            ))
        }
    };
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}
