use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use epdyn::dynamics::{
    bessel_survival_amplitude, evaluate_approximant, lattice_survival, linear_grid, log_grid, required_sites,
    spectral_survival,
};
use epdyn::eppoints::{closed_form_eps, locate_ep2_with, locate_ep3, puiseux, puiseux_numeric, Ep3Window, SCAN_POINTS};
use epdyn::fitting::{default_fit_grid, fit_half_powers, fit_integer_powers, HALF_POWERS};
use epdyn::models::lambda_polynomial;
use epdyn::spectra::discrete_states;
use epdyn::{ApproximantForm, EpRecord, Family, Method, ModelSpec, TimeSeries};
use rayon::prelude::*;

use crate::output::{num, read_csv, Run};
use crate::plot::plot_script;
use crate::{
    BasisArg, Command, EpCommand, FitArgs, GridArgs, Locate3Args, LocateArgs, MethodArg, PlotArgs, PuiseuxArgs,
    SpectrumArgs, SurvivalArgs, SweepArgs, Window,
};

pub const SPECTRUM_HEADER: [&str; 6] = ["param_value", "re_E", "im_E", "re_lambda", "im_lambda", "class"];
pub const EP_HEADER: [&str; 9] = ["family", "n", "g", "param", "re_E", "im_E", "order", "type", "gap"];
pub const SURVIVAL_HEADER: [&str; 6] = ["t", "P", "method", "model_family", "g", "param"];
pub const FIT_HEADER: [&str; 2] = ["exponent", "coefficient"];
pub const FIT_FOOTER: [&str; 4] = ["rms", "t_min", "t_max", "condition"];
pub const RESIDUAL_HEADER: [&str; 4] = ["t", "P", "fit", "residual"];
pub const PUISEUX_HEADER: [&str; 5] = ["variable", "exponent_num", "exponent_den", "re_coefficient", "im_coefficient"];
pub const SWEEP_HEADER: [&str; 5] = ["g", "eps_d", "virtual_count", "min_pair_distance", "triple_spread"];

pub fn execute(command: Command, out_dir: PathBuf) -> Result<Vec<PathBuf>> {
    let mut run = Run::new(command.clone(), out_dir)?;
    match &command {
        Command::Spectrum(a) => spectrum(&mut run, a)?,
        Command::Ep(EpCommand::Locate(a)) => locate(&mut run, a)?,
        Command::Ep(EpCommand::Locate3(a)) => locate3(&mut run, a)?,
        Command::Ep(EpCommand::Puiseux(a)) => expand(&mut run, a)?,
        Command::Survival(a) => survival(&mut run, a)?,
        Command::Fit(a) => fit(&mut run, a)?,
        Command::Sweep(a) => sweep(&mut run, a)?,
        Command::Plot(a) => plot(&mut run, a)?,
    }
    run.finish()
}

fn stem(name: &str) -> &str {
    name.strip_suffix(".csv").unwrap_or(name)
}

/// Adds a CSV and, if asked, its plot script.
fn add_csv(run: &mut Run, name: &str, bytes: Vec<u8>, with_plot: bool) -> Result<()> {
    let script = if with_plot {
        let (header, rows) = parse_csv_text(std::str::from_utf8(&bytes)?);
        Some(plot_script(&header, &rows, name, None)?)
    } else {
        None
    };
    run.add(name, bytes);
    if let Some(script) = script {
        run.add(format!("{}.py", stem(name)), script.into_bytes());
    }
    Ok(())
}

fn parse_csv_text(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

fn spectrum(run: &mut Run, a: &SpectrumArgs) -> Result<()> {
    let base = a.model.spec()?;
    let mut csv = run.csv(&SPECTRUM_HEADER);
    for p in a.param_range.points() {
        let s = discrete_states(&base.with_param(p))?;
        for st in &s.states {
            csv.row(&[
                num(p),
                num(st.energy.re),
                num(st.energy.im),
                num(st.lambda.re),
                num(st.lambda.im),
                st.class.to_string(),
            ]);
        }
    }
    add_csv(run, &a.output, csv.into_bytes(), a.plot)
}

fn ep_rows(run: &Run, eps: &[EpRecord]) -> Vec<u8> {
    let mut csv = run.csv(&EP_HEADER);
    for ep in eps {
        csv.row(&[
            ep.model.family.to_string(),
            ep.model.n.to_string(),
            num(ep.model.g),
            num(ep.param()),
            num(ep.energy.re),
            num(ep.energy.im),
            ep.order.to_string(),
            ep.ep_type.map(|t| t.to_string()).unwrap_or_else(|| "none".into()),
            num(ep.gap),
        ]);
    }
    csv.into_bytes()
}

fn default_window(family: Family) -> Window {
    match family {
        Family::Qubit => Window { lo: 1e-3, hi: 2.5 },
        Family::EndDot | Family::SideDot => Window { lo: -3.0, hi: 3.0 },
    }
}

fn find_ep2s(model: &ModelSpec, window: Option<Window>, points: usize, closed: bool) -> Result<Vec<EpRecord>> {
    if closed {
        return Ok(closed_form_eps(model)?);
    }
    let w = window.unwrap_or_else(|| default_window(model.family));
    Ok(locate_ep2_with(model, (w.lo, w.hi), points)?)
}

fn locate(run: &mut Run, a: &LocateArgs) -> Result<()> {
    let model = a.model.spec()?;
    let eps = find_ep2s(&model, a.window, a.points, a.closed_form)?;
    let bytes = ep_rows(run, &eps);
    run.add(a.output.clone(), bytes);
    Ok(())
}

fn ep3_window(n: u32, g: Option<Window>, eps: Option<Window>) -> Ep3Window {
    let mut w = Ep3Window::default_for(n);
    if let Some(g) = g {
        w.g = (g.lo, g.hi);
    }
    if let Some(e) = eps {
        w.eps = (e.lo, e.hi);
    }
    w
}

fn locate3(run: &mut Run, a: &Locate3Args) -> Result<()> {
    let ep = locate_ep3(a.n, ep3_window(a.n, a.g_window, a.eps_window))?;
    let bytes = ep_rows(run, &[ep]);
    run.add(a.output.clone(), bytes);
    Ok(())
}

fn expand(run: &mut Run, a: &PuiseuxArgs) -> Result<()> {
    let ep = if a.ep3 {
        let n = a.model.n;
        locate_ep3(n, ep3_window(n, None, None))?
    } else {
        let model = a.model.spec()?;
        let closed = model.family != Family::SideDot && a.window.is_none();
        let eps = find_ep2s(&model, a.window, SCAN_POINTS, closed)?;
        *eps.get(a.index).with_context(|| format!("only {} exceptional points found", eps.len()))?
    };
    let ex = if a.numeric {
        puiseux_numeric(&ep, a.variable.into(), a.order)?
    } else {
        puiseux(&ep, a.variable.into(), a.order)?
    };
    let mut csv = run.csv(&PUISEUX_HEADER);
    for (e, c) in &ex.terms {
        csv.row(&[ex.variable.to_string(), e.num.to_string(), e.den.to_string(), num(c.re), num(c.im)]);
    }
    for w in &ex.warnings {
        eprintln!("warning: {w}");
    }
    run.add(a.output.clone(), csv.into_bytes());
    Ok(())
}

fn time_grid(g: &GridArgs) -> Result<Vec<f64>> {
    if !(g.tmax > g.tmin) {
        bail!("--tmax must exceed --tmin");
    }
    if g.log {
        if !(g.tmin > 0.0) {
            bail!("--log needs --tmin > 0");
        }
        Ok(log_grid(g.tmin, g.tmax, g.per_decade))
    } else {
        if g.points < 2 {
            bail!("--points must be at least 2");
        }
        Ok(linear_grid(g.tmin, g.tmax, g.points))
    }
}

/// Parses `ep2a-bandedge`, `EP2B_LONG:100`, ...
pub fn parse_approximant(s: &str) -> Result<ApproximantForm> {
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n.replace('-', "_"), Some(a)),
        None => (s.replace('-', "_"), None),
    };
    let text = match arg {
        Some(a) => format!("{name}:{a}"),
        None => name,
    };
    Ok(text.parse()?)
}

fn model_for_run(a: &crate::ModelArgs, at_ep: Option<usize>, at_ep3: bool) -> Result<ModelSpec> {
    if at_ep3 {
        return Ok(locate_ep3(a.n, Ep3Window::default_for(a.n))?.model);
    }
    let model = a.spec()?;
    match at_ep {
        Some(i) => {
            let eps = closed_form_eps(&model)?;
            Ok(eps.get(i).with_context(|| format!("only {} closed-form exceptional points", eps.len()))?.model)
        }
        None => Ok(model),
    }
}

fn compute_series(model: &ModelSpec, method: MethodArg, grid: &[f64], sites: Option<usize>) -> Result<TimeSeries> {
    match method {
        MethodArg::Lattice => {
            let t_max = grid.last().copied().unwrap_or(0.0);
            let n = sites.unwrap_or_else(|| required_sites(model, t_max));
            Ok(lattice_survival(model, grid, n)?)
        }
        MethodArg::Spectral => Ok(spectral_survival(model, grid)?),
        MethodArg::Bessel => {
            if model.family != Family::EndDot {
                bail!("--method bessel applies to the end dot (hd) only");
            }
            let ep = closed_form_eps(model)?[0];
            if (model.eps_d - ep.param()).abs() > 1e-9 {
                bail!("--method bessel needs eps_d at the exceptional point {}; use --at-ep 0", ep.param());
            }
            let amps = bessel_survival_amplitude(ep.lambda, grid)?;
            Ok(TimeSeries::new(grid.to_vec(), amps.iter().map(|a| a.norm_sqr()).collect(), Method::Bessel, *model))
        }
    }
}

fn survival_rows(csv: &mut crate::output::Csv, s: &TimeSeries) {
    let (family, g, p) = (s.model.family.to_string(), num(s.model.g), num(s.model.param()));
    let method = s.method.to_string();
    for (t, v) in s.iter() {
        csv.row(&[num(t), num(v), method.clone(), family.clone(), g.clone(), p.clone()]);
    }
}

fn survival(run: &mut Run, a: &SurvivalArgs) -> Result<()> {
    let model = model_for_run(&a.model, a.at_ep, a.at_ep3)?;
    let grid = time_grid(&a.grid)?;
    let forms = a.approximant.iter().map(|s| parse_approximant(s)).collect::<Result<Vec<_>>>()?;
    let series = compute_series(&model, a.method, &grid, a.sites)?;
    let mut csv = run.csv(&SURVIVAL_HEADER);
    survival_rows(&mut csv, &series);
    for form in &forms {
        // long-time laws are singular at t = 0
        let positive: Vec<f64> = grid.iter().copied().filter(|&t| t > 0.0).collect();
        let s = evaluate_approximant(form, &model, &positive)?;
        for (k, v) in &s.metadata {
            eprintln!("{}: {k} = {v}", form.name());
        }
        survival_rows(&mut csv, &s);
    }
    add_csv(run, &a.output, csv.into_bytes(), a.plot)
}

fn series_from_csv(path: &Path, method: Option<&str>) -> Result<TimeSeries> {
    let (header, rows) = read_csv(path)?;
    if header != SURVIVAL_HEADER {
        bail!("{} is not a survival CSV (header {:?})", path.display(), header);
    }
    let wanted = match method {
        Some(m) => m.to_string(),
        None => rows
            .iter()
            .map(|r| r[2].clone())
            .find(|m| ["lattice", "spectral", "bessel"].contains(&m.as_str()))
            .with_context(|| format!("{} holds no numerical series", path.display()))?,
    };
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut model = None;
    for r in rows.iter().filter(|r| r[2] == wanted) {
        times.push(r[0].parse::<f64>()?);
        values.push(r[1].parse::<f64>()?);
        if model.is_none() {
            let family: Family = r[3].parse()?;
            let (g, p): (f64, f64) = (r[4].parse()?, r[5].parse()?);
            model = Some(match family {
                Family::Qubit => ModelSpec::qubit(g, p),
                Family::EndDot => ModelSpec::end_dot(g, p),
                Family::SideDot => ModelSpec::side_dot(0, g, p),
            });
        }
    }
    let model = model.with_context(|| format!("no `{wanted}` rows in {}", path.display()))?;
    let method = match wanted.as_str() {
        "lattice" => Method::Lattice,
        "spectral" => Method::Spectral,
        "bessel" => Method::Bessel,
        other => Method::Approximant(other.to_string()),
    };
    Ok(TimeSeries::new(times, values, method, model))
}

fn fit(run: &mut Run, a: &FitArgs) -> Result<()> {
    let series = match &a.input {
        Some(path) => series_from_csv(path, a.method.as_deref())?,
        None if a.at_ep3 => {
            let ep = locate_ep3(a.model.n, Ep3Window::default_for(a.model.n))?;
            let grid = default_fit_grid(ep.time_scale());
            compute_series(&ep.model, MethodArg::Lattice, &grid, None)?
        }
        None => {
            let model = a.model.spec()?;
            let t_max = a.tmax.context("--tmax is required when fitting a computed series")?;
            compute_series(&model, MethodArg::Lattice, &default_fit_grid(t_max), None)?
        }
    };
    let window = a.window.map(|w| (w.lo, w.hi));
    let result = match a.basis {
        BasisArg::Half => {
            if a.terms > HALF_POWERS.len() {
                let exps: Vec<f64> = (1..=a.terms).map(|k| k as f64 / 2.0).collect();
                fit_half_powers(&series, window, Some(&exps))?
            } else {
                fit_half_powers(&series, window, Some(&HALF_POWERS[..a.terms]))?
            }
        }
        BasisArg::Integer => fit_integer_powers(&series, window, a.terms)?,
    };
    let mut csv = run.csv(&FIT_HEADER);
    for (e, c) in result.exponents.iter().zip(&result.coefficients) {
        csv.row(&[num(*e), num(*c)]);
    }
    csv.row(&FIT_FOOTER);
    csv.row(&[num(result.rms), num(result.t_min), num(result.t_max), num(result.condition)]);
    let bytes = csv.into_bytes();

    let mut res = run.csv(&RESIDUAL_HEADER);
    for (t, p) in series.window(result.t_min, result.t_max).iter() {
        let f = result.evaluate(t);
        res.row(&[num(t), num(p), num(f), num(p - f)]);
    }
    let residual_name = format!("{}.residuals.csv", stem(&a.output));
    add_csv(run, &a.output, bytes, a.plot)?;
    run.add(residual_name, res.into_bytes());
    Ok(())
}

/// Smallest distance between two roots and smallest diameter of a root triple.
fn clustering(roots: &[num_complex::Complex64]) -> (f64, f64) {
    let mut pair = f64::INFINITY;
    let mut triple = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let dij = (roots[i] - roots[j]).norm();
            pair = pair.min(dij);
            for k in j + 1..roots.len() {
                let d = dij.max((roots[i] - roots[k]).norm()).max((roots[j] - roots[k]).norm());
                triple = triple.min(d);
            }
        }
    }
    (pair, triple)
}

fn sweep(run: &mut Run, a: &SweepArgs) -> Result<()> {
    let points: Vec<(f64, f64)> = a
        .g_range
        .points()
        .into_iter()
        .flat_map(|g| a.eps_range.points().into_iter().map(move |e| (g, e)))
        .collect();
    let rows: Vec<Result<[f64; 5]>> = points
        .par_iter()
        .map(|&(g, e)| {
            let m = ModelSpec::side_dot(a.n, g, e);
            m.validate()?;
            let roots = lambda_polynomial(&m).roots()?;
            let virtual_count = roots.iter().filter(|l| l.im == 0.0 && l.re > 1.0).count();
            let (pair, triple) = clustering(&roots);
            Ok([g, e, virtual_count as f64, pair, triple])
        })
        .collect();
    let mut csv = run.csv(&SWEEP_HEADER);
    for r in rows {
        let r = r?;
        csv.row(&[num(r[0]), num(r[1]), (r[2] as usize).to_string(), num(r[3]), num(r[4])]);
    }
    let bytes = csv.into_bytes();
    run.add(a.output.clone(), bytes);
    if a.refine {
        let window = Ep3Window { g: (a.g_range.start, a.g_range.stop), eps: (a.eps_range.start, a.eps_range.stop) };
        let ep = locate_ep3(a.n, window)?;
        let bytes = ep_rows(run, &[ep]);
        run.add(format!("{}.ep3.csv", stem(&a.output)), bytes);
    }
    Ok(())
}

fn plot(run: &mut Run, a: &PlotArgs) -> Result<()> {
    let (header, rows) = read_csv(&a.input)?;
    let csv_name = a.input.file_name().and_then(|s| s.to_str()).context("input has no file name")?;
    let script = plot_script(&header, &rows, csv_name, a.scale)?;
    let name = a.output.clone().unwrap_or_else(|| format!("{}.py", stem(csv_name)));
    run.add(name, script.into_bytes());
    Ok(())
}
