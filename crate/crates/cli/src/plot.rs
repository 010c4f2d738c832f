//! Standalone matplotlib scripts for the CSV schemas written by this tool.
//! A script expects its CSV in the same directory and saves a PNG next to it.

use anyhow::{bail, Result};

use crate::commands::{
    EP_HEADER, FIT_HEADER, PUISEUX_HEADER, RESIDUAL_HEADER, SPECTRUM_HEADER, SURVIVAL_HEADER, SWEEP_HEADER,
};
use crate::ScaleArg;

const PRELUDE: &str = r##"import csv
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def read(name):
    with open(HERE / name, newline="") as f:
        rows = [r for r in csv.reader(f) if r and not r[0].startswith("#")]
    return rows[0], rows[1:]

"##;

fn matches(header: &[String], schema: &[&str]) -> bool {
    header.len() == schema.len() && header.iter().zip(schema).all(|(a, b)| a == b)
}

fn stem(name: &str) -> &str {
    name.strip_suffix(".csv").unwrap_or(name)
}

fn axis_scale(scale: ScaleArg) -> &'static str {
    match scale {
        ScaleArg::Linear => "",
        ScaleArg::Loglog => "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")\n",
    }
}

/// Script for `csv_name`; the schema is recognised from `header`.
pub fn plot_script(header: &[String], rows: &[Vec<String>], csv_name: &str, scale: Option<ScaleArg>) -> Result<String> {
    let png = format!("{}.png", stem(csv_name));
    let body = if matches(header, &SURVIVAL_HEADER) {
        // log-spaced grids start above zero
        let log_grid = rows.first().and_then(|r| r[0].parse::<f64>().ok()).is_some_and(|t| t > 0.0);
        let scale = scale.unwrap_or(if log_grid { ScaleArg::Loglog } else { ScaleArg::Linear });
        let keep = match scale {
            ScaleArg::Loglog => "t > 0 and p > 0",
            ScaleArg::Linear => "True",
        };
        format!(
            r#"header, rows = read("{csv_name}")
series = {{}}
for r in rows:
    t, p = float(r[0]), float(r[1])
    if {keep}:
        ts, ps = series.setdefault(r[2], ([], []))
        ts.append(t)
        ps.append(p)

fig, ax = plt.subplots(figsize=(6, 4.5))
for name, (t, p) in series.items():
    numeric = name in ("lattice", "spectral", "bessel")
    ax.plot(t, p, "-" if numeric else "--", lw=1.5 if numeric else 1.2, label=name)
{scale}ax.set_xlabel("t")
ax.set_ylabel("P(t)")
ax.legend()
"#,
            scale = axis_scale(scale)
        )
    } else if matches(header, &SPECTRUM_HEADER) {
        r#"header, rows = read("CSV")
p = [float(r[0]) for r in rows]
fig, (ax, bx) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
ax.plot(p, [float(r[1]) for r in rows], ".", ms=1.5)
ax.axhline(2.0, color="grey", ls=":")
ax.axhline(-2.0, color="grey", ls=":")
ax.set_ylabel("Re E")
bx.plot(p, [float(r[2]) for r in rows], ".", ms=1.5)
bx.set_ylabel("Im E")
bx.set_xlabel("parameter")
"#
        .replace("CSV", csv_name)
    } else if matches(header, &EP_HEADER) {
        r#"header, rows = read("CSV")
fig, ax = plt.subplots(figsize=(6, 4.5))
for r in rows:
    ax.plot(float(r[3]), float(r[4]), "o", label=f"EP{r[6]}{r[7]}")
ax.axhline(2.0, color="grey", ls=":")
ax.axhline(-2.0, color="grey", ls=":")
ax.set_xlabel("parameter")
ax.set_ylabel("Re E")
ax.legend()
"#
        .replace("CSV", csv_name)
    } else if matches(header, &FIT_HEADER) || matches(header, &RESIDUAL_HEADER) {
        let residuals = if matches(header, &FIT_HEADER) {
            format!("{}.residuals.csv", stem(csv_name))
        } else {
            csv_name.to_string()
        };
        r#"header, rows = read("CSV")
t = [float(r[0]) for r in rows]
fig, (ax, bx) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
ax.plot(t, [float(r[1]) for r in rows], ".", ms=2, label="data")
ax.plot(t, [float(r[2]) for r in rows], "-", label="fit")
ax.set_ylabel("P(t)")
ax.legend()
bx.plot(t, [float(r[3]) for r in rows], "-")
bx.axhline(0.0, color="grey", ls=":")
bx.set_ylabel("residual")
bx.set_xlabel("t")
"#
        .replace("CSV", &residuals)
    } else if matches(header, &SWEEP_HEADER) {
        r#"import math

header, rows = read("CSV")
g = [float(r[0]) for r in rows]
e = [float(r[1]) for r in rows]
c = [math.log10(max(float(r[4]), 1e-16)) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.5))
sc = ax.scatter(g, e, c=c, s=6, cmap="viridis")
fig.colorbar(sc, label="log10 triple spread")
ax.set_xlabel("g")
ax.set_ylabel("eps_d")
"#
        .replace("CSV", csv_name)
    } else if matches(header, &PUISEUX_HEADER) {
        r#"header, rows = read("CSV")
x = [int(r[1]) / int(r[2]) for r in rows]
y = [abs(complex(float(r[3]), float(r[4]))) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4.5))
ax.stem(x, y)
ax.set_xlabel("exponent of delta")
ax.set_ylabel("|coefficient|")
"#
        .replace("CSV", csv_name)
    } else {
        bail!("unrecognised CSV schema {header:?}");
    };
    Ok(format!("{PRELUDE}{body}fig.tight_layout()\nfig.savefig(HERE / \"{png}\", dpi=150)\n"))
}
