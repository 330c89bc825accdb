//! Result files: `results.csv`, whitespace-column plot data and the run manifest.

use serde::Serialize;

use crate::config::Config;
use crate::experiment::SweepResult;

pub const CSV_HEADER: &str = "sweep_value,strategy,mean_se,std_se,trials,seed";

/// `%.{digits}g`-style formatting: `digits` significant digits, trailing zeros
/// trimmed, exponent form outside `1e-5 <= |x| < 1e{digits}`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV rows in cell order; `labels[p]` is printed as the sweep value of point `p`.
pub fn results_csv(result: &SweepResult, labels: &[f64]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let ns = result.spec.strategies.len();
    for (c, cell) in result.cells.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            format_sig(labels[c / ns], 12),
            cell.strategy,
            format_sig(cell.mean_se, 12),
            format_sig(cell.std_se, 12),
            cell.trials,
            result.spec.master_seed
        ));
    }
    out
}

/// One row per sweep point: the label, then `mean std` per strategy.
pub fn plot_data(result: &SweepResult, labels: &[f64], axis_label: &str) -> String {
    let spec = &result.spec;
    let mut out = format!("# {axis_label}");
    for s in &spec.strategies {
        out.push_str(&format!(" {s}_mean {s}_std"));
    }
    out.push('\n');
    for (p, label) in labels.iter().enumerate() {
        out.push_str(&format_sig(*label, 12));
        for &s in &spec.strategies {
            let cell = result.cell(p, s).expect("cell per strategy");
            out.push_str(&format!(" {} {}", format_sig(cell.mean_se, 12), format_sig(cell.std_se, 12)));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub workers: usize,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    /// Full resolved configuration; `--config manifest.json` reruns it.
    pub config: &'a Config,
}
