//! `results.csv` and the optional plot script.

use std::fmt::Write as _;

use mgs_detect::SweepPoint;

pub const CSV_HEADER: &str =
    "detector,K,N,M,d,L_e,q,axis,axis_value,trials,total_bits,bit_errors,ber,ber_ci95,eni,rops_per_symbol,chi,seed";

pub const RESULTS_FILE: &str = "results.csv";
pub const PLOT_FILE: &str = "plot.py";

const SIGNIFICANT: i32 = 10;

/// Shortest `%g`-style rendering with [`SIGNIFICANT`] digits.
///
/// Non-finite values are written as `NaN`, `inf` and `-inf`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round first so that the exponent reflects carries like 9.9999999999 -> 10.
    let sci = format!("{:.*e}", (SIGNIFICANT - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT).contains(&exp) {
        let decimals = (SIGNIFICANT - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One CSV record, without the line terminator.
pub fn csv_row(p: &SweepPoint) -> String {
    [
        p.detector.clone(),
        p.k.to_string(),
        p.n.to_string(),
        p.m.to_string(),
        opt(p.d),
        opt(p.l_e),
        p.q.map(format_float).unwrap_or_default(),
        p.axis.as_str().to_string(),
        format_float(p.axis_value),
        p.trials.to_string(),
        p.total_bits.to_string(),
        p.bit_errors.to_string(),
        format_float(p.ber),
        format_float(p.ber_ci95),
        format_float(p.eni),
        format_float(p.rops_per_symbol),
        format_float(p.chi),
        p.seed.to_string(),
    ]
    .join(",")
}

/// Whole file contents, LF-terminated.
pub fn render_csv(points: &[SweepPoint]) -> String {
    let mut out = String::with_capacity(128 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&csv_row(p));
        out.push('\n');
    }
    out
}

/// Matplotlib script drawing BER and rops against the sweep axis.
pub fn render_plot_script(csv_name: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        r#"#!/usr/bin/env python3
"""BER and complexity against the sweep axis, one line per detector."""
import csv
import os
import sys
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "{csv_name}")

series = defaultdict(list)
axis = None
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        axis = row["axis"]
        series[row["detector"]].append(
            (float(row["axis_value"]), float(row["ber"]), float(row["ber_ci95"]), float(row["rops_per_symbol"]))
        )

labels = {{"snr_db": "SNR [dB]", "loading": "loading K/N", "iterations": "a  (I = a K sqrt(M))"}}
fig, (ax_ber, ax_rops) = plt.subplots(1, 2, figsize=(11, 4.5))
for name, pts in series.items():
    pts.sort()
    x = [p[0] for p in pts]
    ber = [p[1] if p[1] > 0 else float("nan") for p in pts]
    ci = [p[2] for p in pts]
    ax_ber.errorbar(x, ber, yerr=ci, marker="o", capsize=3, label=name)
    rops = [p[3] for p in pts]
    if any(r == r for r in rops):
        ax_rops.plot(x, rops, marker="s", label=name)

ax_ber.set_yscale("log")
ax_ber.set_ylabel("BER")
ax_rops.set_yscale("log")
ax_rops.set_ylabel("rops per symbol vector")
for ax in (ax_ber, ax_rops):
    ax.set_xlabel(labels.get(axis, axis or ""))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
fig.tight_layout()
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=150)
print(out)
"#
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(859.5), "859.5");
        assert_eq!(format_float(1.0 / 3.0), "0.3333333333");
        assert_eq!(format_float(2.0 / 3.0 * 1e-7), "6.666666667e-8");
        assert_eq!(format_float(123456789012.0), "1.23456789e11");
        assert_eq!(format_float(9.99999999999), "10");
        assert_eq!(format_float(-0.00012345), "-0.00012345");
        assert_eq!(format_float(f64::NAN), "NaN");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn formatted_values_parse_back_within_precision() {
        for &x in &[1.234567890123e-9, 6.02214076e23, 0.1, 12.5, 3.0e9, 1.0e10, -7.77e-3] {
            let back: f64 = format_float(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-9, "{x} -> {back}");
        }
        for s in ["NaN", "inf"] {
            assert!(s.parse::<f64>().is_ok());
        }
    }
}
