//! `epdyn`: spectra, exceptional points, survival curves and fits as CSV
//! files, each accompanied by a manifest that reproduces the run.

mod commands;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use epdyn::{Family, ModelSpec, PuiseuxVariable};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "epdyn", version, about = "Exceptional points and decay dynamics of open tight-binding models")]
struct Cli {
    /// Directory for CSV, manifest and plot files [default: current directory,
    /// or the directory recorded in --manifest].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Re-run the command recorded in a manifest file.
    #[arg(long)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Discrete spectrum over a range of V (qubit) or eps_d (dots).
    Spectrum(SpectrumArgs),
    /// Exceptional point searches and expansions.
    #[command(subcommand)]
    Ep(EpCommand),
    /// Survival probability P(t) with optional approximant overlays.
    Survival(SurvivalArgs),
    /// Power-law fit of a survival series.
    Fit(FitArgs),
    /// Map of root clustering over a (g, eps_d) grid for the side-coupled dot.
    Sweep(SweepArgs),
    /// Write a matplotlib script for a CSV produced by this tool.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpCommand {
    /// Second-order exceptional points in the swept parameter at fixed g.
    Locate(LocateArgs),
    /// Third-order exceptional point of the side-coupled dot.
    Locate3(Locate3Args),
    /// Puiseux expansion of E, lambda or the norm around an exceptional point.
    Puiseux(PuiseuxArgs),
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: epdyn::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        return Err(format!("expected `lo:hi`, got `{s}`"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| format!("bad number `{}`", parts[0]))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| format!("bad number `{}`", parts[1]))?;
    if !(lo < hi) {
        return Err(format!("window `{s}` is empty"));
    }
    Ok(Window { lo, hi })
}

/// Inclusive `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step).round() as usize;
        (0..=n).map(|i| self.start + self.step * i as f64).collect()
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected `start:stop:step`, got `{s}`"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
        .collect::<Result<_, _>>()?;
    let r = Range { start: v[0], stop: v[1], step: v[2] };
    if !(r.step > 0.0) || !(r.stop >= r.start) {
        return Err(format!("range `{s}` needs start <= stop and step > 0"));
    }
    if (r.stop - r.start) / r.step > 1e7 {
        return Err(format!("range `{s}` has more than 1e7 points"));
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Model family: hq (qubit), hd (end dot) or hn (side-coupled dot).
    #[arg(long, value_parser = parse_family)]
    pub family: Option<Family>,
    /// Coupling to the chain.
    #[arg(long, default_value_t = 0.0)]
    pub g: f64,
    /// Intra-qubit coupling (hq).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub v: f64,
    /// Dot energy (hd, hn).
    #[arg(long = "eps", default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps_d: f64,
    /// Chain site the dot couples to (hn).
    #[arg(long, default_value_t = 0)]
    pub n: u32,
}

impl ModelArgs {
    pub fn spec(&self) -> Result<ModelSpec> {
        let Some(family) = self.family else { bail!("--family is required") };
        let m = match family {
            Family::Qubit => ModelSpec::qubit(self.g, self.v),
            Family::EndDot => ModelSpec::end_dot(self.g, self.eps_d),
            Family::SideDot => ModelSpec::side_dot(self.n, self.g, self.eps_d),
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Values of the swept parameter, `start:stop:step`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub param_range: Range,
    #[arg(long, short, default_value = "spectrum.csv")]
    pub output: String,
    /// Also write a plot script next to the CSV.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LocateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Search window in the swept parameter, `lo:hi`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// Scan points for bracketing.
    #[arg(long, default_value_t = epdyn::eppoints::SCAN_POINTS)]
    pub points: usize,
    /// Use the closed forms (hq, hd) instead of a numerical search.
    #[arg(long)]
    pub closed_form: bool,
    #[arg(long, short, default_value = "ep.csv")]
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Locate3Args {
    /// Chain site of the side-coupled dot (even).
    #[arg(long)]
    pub n: u32,
    /// Coupling range to track, `lo:hi`.
    #[arg(long, value_parser = parse_window)]
    pub g_window: Option<Window>,
    /// Dot-energy range, `lo:hi`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub eps_window: Option<Window>,
    #[arg(long, short, default_value = "ep3.csv")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableArg {
    Energy,
    Lambda,
    Norm,
}

impl From<VariableArg> for PuiseuxVariable {
    fn from(v: VariableArg) -> Self {
        match v {
            VariableArg::Energy => PuiseuxVariable::Energy,
            VariableArg::Lambda => PuiseuxVariable::Lambda,
            VariableArg::Norm => PuiseuxVariable::Norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PuiseuxArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Which exceptional point, as ordered by `ep locate`.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Expand around the third-order point of the side-coupled dot instead.
    #[arg(long)]
    pub ep3: bool,
    /// Search window in the swept parameter, `lo:hi`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    #[arg(long, value_enum, default_value_t = VariableArg::Energy)]
    pub variable: VariableArg,
    /// Number of terms beyond the constant.
    #[arg(long, default_value_t = 3)]
    pub order: u32,
    /// Purely numerical coefficients, without closed-form substitutions.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, short, default_value = "puiseux.csv")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Lattice,
    Spectral,
    Bessel,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    /// Number of linear grid points.
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Log-spaced grid from --tmin (> 0) instead.
    #[arg(long)]
    pub log: bool,
    /// Points per decade for --log.
    #[arg(long, default_value_t = 50)]
    pub per_decade: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SurvivalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
    pub method: MethodArg,
    /// Overlay an approximant, e.g. ep2a-bandedge, ep2b-long:100,
    /// ep3a-halfpower:-0.01,0.02 (repeatable).
    #[arg(long)]
    pub approximant: Vec<String>,
    /// Move the swept parameter onto this closed-form exceptional point (hq, hd).
    #[arg(long)]
    pub at_ep: Option<usize>,
    /// Move (g, eps_d) onto the third-order exceptional point (hn).
    #[arg(long)]
    pub at_ep3: bool,
    /// Chain length for --method lattice [default: just long enough to avoid reflections].
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long, short, default_value = "survival.csv")]
    pub output: String,
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisArg {
    /// t^{1/2}, t, t^{3/2}, ...
    Half,
    /// t, t^2, ...
    Integer,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FitArgs {
    /// Survival CSV to fit; otherwise a lattice series is computed from the model flags.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Method column to select from --input [default: first non-approximant series].
    #[arg(long)]
    pub method: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Fit at the third-order exceptional point (hn) over [0, T_EP3].
    #[arg(long)]
    pub at_ep3: bool,
    /// End of the computed series when not fitting at the EP3.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Fit window `lo:hi` [default: the whole series].
    #[arg(long, value_parser = parse_window)]
    pub window: Option<Window>,
    #[arg(long, value_enum, default_value_t = BasisArg::Half)]
    pub basis: BasisArg,
    /// Number of basis functions.
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
    #[arg(long, short, default_value = "fit.csv")]
    pub output: String,
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Chain site of the side-coupled dot.
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_parser = parse_range)]
    pub g_range: Range,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub eps_range: Range,
    /// Locate the third-order point inside the swept box and write it as an EP CSV.
    #[arg(long)]
    pub refine: bool,
    #[arg(long, short, default_value = "sweep.csv")]
    pub output: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleArg {
    Linear,
    Loglog,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PlotArgs {
    /// CSV written by this tool.
    #[arg(long)]
    pub input: PathBuf,
    /// Axis scaling [default: chosen from the data].
    #[arg(long, value_enum)]
    pub scale: Option<ScaleArg>,
    /// Script file name [default: input name with .py].
    #[arg(long, short)]
    pub output: Option<String>,
}

fn run(cli: Cli) -> Result<()> {
    let (command, out_dir) = match (cli.manifest, cli.command) {
        (Some(_), Some(_)) => bail!("--manifest cannot be combined with a subcommand"),
        (Some(path), None) => {
            let m = output::read_manifest(&path)?;
            (m.command, cli.out_dir.unwrap_or(m.out_dir))
        }
        (None, Some(c)) => (c, cli.out_dir.unwrap_or_else(|| PathBuf::from("."))),
        (None, None) => bail!("no command given; see --help"),
    };
    for path in commands::execute(command, out_dir)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
