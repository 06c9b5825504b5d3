//! Batch front end for the disk solvers: evaluate interior fields from
//! boundary data, convert Dirichlet data to Neumann data, verify the global
//! relation, generate oracle data sets, and run convergence studies.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 unsupported
//! mode.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use gaspt::boundary::{BoundaryData, BoundaryDoc};
use gaspt::dtn;
use gaspt::field::FieldSolver;
use gaspt::geometry::DiskDomain;
use gaspt::oracles;
use gaspt::rh_even::EvenParams;
use gaspt::rh_odd::OddParams;
use gaspt::Error as GError;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;

#[derive(Parser)]
#[command(name = "gaspt", about = "Solvers for the conductivity equations div(x^p grad u) = 0 on a disk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Args)]
struct GridSpec {
    /// Interior grid as nx,ny,margin
    #[arg(long, default_value = "20,20,0.1", value_parser = parse_grid)]
    grid: (usize, usize, f64),
}

fn parse_grid(s: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected nx,ny,margin".into());
    }
    let nx = parts[0].parse().map_err(|e| format!("nx: {e}"))?;
    let ny = parts[1].parse().map_err(|e| format!("ny: {e}"))?;
    let margin: f64 = parts[2].parse().map_err(|e| format!("margin: {e}"))?;
    if margin < 0.05 {
        return Err("margin must be at least 0.05".into());
    }
    Ok((nx, ny, margin))
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the interior field from boundary data
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        /// Expected alpha; rejected if the input file disagrees
        #[arg(long)]
        alpha: Option<i32>,
        /// Expected disk center; rejected if the input file disagrees
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, default_value_t = 256)]
        n_circle: usize,
        #[arg(long, default_value_t = 64)]
        n_chord: usize,
        #[command(flatten)]
        grid: GridSpec,
        /// Self-convergence tolerance at the probe points
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Fill in Neumann data from Dirichlet data (even alpha)
    Dtn {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Check the global relation on given data
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Write boundary data (and optionally the exact field) of a named oracle
    Oracle {
        #[arg(long)]
        name: String,
        #[arg(long)]
        alpha: Option<i32>,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        /// Fourier order of the boundary series
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long = "out")]
        output: PathBuf,
        /// Also write the exact interior field to this CSV
        #[arg(long)]
        field: Option<PathBuf>,
        /// Also write raw samples theta,ut,un to this CSV
        #[arg(long)]
        samples: Option<PathBuf>,
        #[command(flatten)]
        grid: GridSpec,
    },
    /// Error-vs-resolution study against a named oracle
    Convergence {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long = "out")]
        output: PathBuf,
    },
}

fn classify(err: &anyhow::Error) -> u8 {
    if let Some(g) = err.downcast_ref::<GError>() {
        match g {
            GError::Unsupported(_) => EXIT_UNSUPPORTED,
            GError::NoConvergence { .. } | GError::NanAtNode { .. } | GError::InconsistentData { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_INPUT,
        }
    } else if err.downcast_ref::<serde_json::Error>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
    {
        EXIT_INPUT
    } else {
        EXIT_NUMERICAL
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { input, output, alpha, a, n_circle, n_chord, grid, tol } => {
            cmd_solve(&input, &output, alpha, a, n_circle, n_chord, grid.grid, tol)
        }
        Command::Dtn { input, output } => cmd_dtn(&input, &output),
        Command::Verify { input, output, tol } => cmd_verify(&input, &output, tol),
        Command::Oracle { name, alpha, a, n, output, field, samples, grid } => {
            cmd_oracle(&name, alpha, a, n, &output, field.as_deref(), samples.as_deref(), grid.grid)
        }
        Command::Convergence { name, a, output } => cmd_convergence(&name, a, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn load_doc(path: &Path) -> anyhow::Result<(BoundaryDoc, BoundaryData, DiskDomain)> {
    let text = fs::read_to_string(path)?;
    let doc: BoundaryDoc = serde_json::from_str(&text)?;
    let data = doc.to_data()?;
    data.validate()?;
    let dom = DiskDomain::new(doc.a)?;
    Ok((doc, data, dom))
}

/// Round-trip-safe number formatting (17 significant digits).
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn interior_grid(dom: &DiskDomain, nx: usize, ny: usize, margin: f64) -> Vec<Vec<Complex64>> {
    let a = dom.center();
    let mut rows = Vec::with_capacity(ny);
    for iy in 0..ny {
        let y = -1.0 + margin + (2.0 - 2.0 * margin) * iy as f64 / (ny.max(2) - 1) as f64;
        let mut row = Vec::new();
        for ix in 0..nx {
            let x = a - 1.0 + margin + (2.0 - 2.0 * margin) * ix as f64 / (nx.max(2) - 1) as f64;
            let z = Complex64::new(x, y);
            if dom.is_interior(z, margin - 1e-12) {
                row.push(z);
            }
        }
        rows.push(row);
    }
    rows
}

#[derive(Serialize)]
struct SolveMeta {
    command: &'static str,
    alpha: i32,
    solved_alpha: i32,
    transformed: bool,
    a: f64,
    n_circle: usize,
    n_chord: usize,
    grid: [f64; 3],
    points: usize,
    input_residual_max: f64,
    self_convergence_change: f64,
    self_convergence_tol: f64,
    elapsed_ms: u128,
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    input: &Path,
    output: &Path,
    alpha: Option<i32>,
    a: Option<f64>,
    n_circle: usize,
    n_chord: usize,
    grid: (usize, usize, f64),
    tol: Option<f64>,
) -> anyhow::Result<()> {
    let started = Instant::now();
    let (doc, data, dom) = load_doc(input)?;
    if let Some(want) = alpha {
        if want != doc.alpha {
            return Err(GError::AlphaMismatch { expected: doc.alpha, got: want }.into());
        }
    }
    if let Some(want) = a {
        if (want - doc.a).abs() > 1e-12 {
            anyhow::bail!("disk center mismatch: flag {want}, input file {}", doc.a);
        }
    }
    let even = EvenParams { n_circle, n_chord };
    let odd = OddParams { n_outer: n_circle.max(64), n_inner: 96 };
    let solver = FieldSolver::new(dom, &data, even, odd)?;
    let tol = tol.unwrap_or(if solver.solved_alpha % 2 == 0 { 1e-8 } else { 1e-6 });

    // self-convergence probes: doubled node counts must agree
    let fine = FieldSolver::new(
        dom,
        &data,
        EvenParams { n_circle: 2 * n_circle, n_chord: 2 * n_chord },
        OddParams { n_outer: 2 * odd.n_outer, n_inner: 2 * odd.n_inner },
    )?;
    let a = dom.center();
    let probes = [
        Complex64::new(a, 0.0),
        Complex64::new(a + 0.41, 0.22),
        Complex64::new(a - 0.3, -0.48),
    ];
    let mut change = 0.0f64;
    for &z in &probes {
        change = change.max((solver.solve(z)? - fine.solve(z)?).abs());
    }
    if change > tol {
        return Err(GError::NoConvergence {
            what: "field refinement at probe points",
            residual: change,
        }
        .into());
    }

    let rows = interior_grid(&dom, grid.0, grid.1, grid.2);
    let values: Vec<Vec<(Complex64, f64)>> = rows
        .par_iter()
        .map(|row| {
            row.iter()
                .map(|&z| solver.solve(z).map(|u| (z, u)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from("x,y,u\n");
    let mut count = 0usize;
    for row in &values {
        for &(z, u) in row {
            csv.push_str(&format!("{},{},{}\n", fmt(z.re), fmt(z.im), fmt(u)));
            count += 1;
        }
    }
    fs::write(output, csv)?;

    let input_residual_max = residuals_at_standard_points(&data, &dom)
        .into_iter()
        .fold(0.0f64, |acc, (_, r)| acc.max(r));
    let meta = SolveMeta {
        command: "solve",
        alpha: doc.alpha,
        solved_alpha: solver.solved_alpha,
        transformed: solver.was_transformed(),
        a: doc.a,
        n_circle,
        n_chord,
        grid: [grid.0 as f64, grid.1 as f64, grid.2],
        points: count,
        input_residual_max,
        self_convergence_change: change,
        self_convergence_tol: tol,
        elapsed_ms: started.elapsed().as_millis(),
    };
    let meta_path = output.with_extension("meta.json");
    fs::write(meta_path, serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

fn cmd_dtn(input: &Path, output: &Path) -> anyhow::Result<()> {
    let (mut doc, data, dom) = load_doc(input)?;
    if data.alpha % 2 != 0 {
        return Err(GError::Unsupported(format!(
            "Dirichlet-Neumann conversion needs even alpha (got {}); odd alpha only supports `verify`",
            data.alpha
        ))
        .into());
    }
    let (u_n, report) = if data.alpha <= 0 {
        let m = (1 - data.alpha / 2) as usize;
        dtn::reconstruct_un_negative(&data.u_t, m, &dom)?
    } else {
        let m = (data.alpha / 2 - 1) as usize;
        let trace = data.trace_series()?;
        dtn::reconstruct_un_positive(&trace, &data.u_t, m, &dom)?
    };
    let order = doc.order.max(u_n.order());
    let filled = BoundaryData { u_n, ..data };
    let mut out_doc = BoundaryDoc::from_data(&filled, doc.a)?;
    // keep at least the input truncation order
    if out_doc.order < order {
        let d2 = out_doc.to_data()?;
        out_doc = BoundaryDoc::from_data(&d2, doc.a)?;
    }
    out_doc.residual_norm = Some(report.residual_norm);
    doc = out_doc;
    fs::write(output, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn residuals_at_standard_points(data: &BoundaryData, dom: &DiskDomain) -> Vec<(Complex64, f64)> {
    let mut out = Vec::new();
    for i in 0..32 {
        let k = Complex64::from_polar(3.0, 2.0 * std::f64::consts::PI * i as f64 / 32.0);
        if (k - dom.center()).norm() <= 1.05 || (k + dom.center()).norm() <= 1.05 {
            continue;
        }
        if let Ok(r) = dtn::global_residual(data, dom, k) {
            out.push((k, r.norm()));
        }
    }
    out
}

#[derive(Serialize)]
struct VerifyReport {
    alpha: i32,
    a: f64,
    tol: f64,
    data_norm: f64,
    max_residual: f64,
    pass: bool,
    points: Vec<[f64; 2]>,
    residuals: Vec<f64>,
}

fn cmd_verify(input: &Path, output: &Path, tol: f64) -> anyhow::Result<()> {
    let (doc, data, dom) = load_doc(input)?;
    let pts = residuals_at_standard_points(&data, &dom);
    let data_norm = data.u_t.l2_norm().max(data.u_n.l2_norm()).max(1e-300);
    let max_residual = pts.iter().fold(0.0f64, |acc, (_, r)| acc.max(*r));
    let report = VerifyReport {
        alpha: doc.alpha,
        a: doc.a,
        tol,
        data_norm,
        max_residual,
        pass: max_residual <= tol * data_norm,
        points: pts.iter().map(|(k, _)| [k.re, k.im]).collect(),
        residuals: pts.iter().map(|(_, r)| *r).collect(),
    };
    fs::write(output, serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    name: &str,
    alpha: Option<i32>,
    a: f64,
    n: usize,
    output: &Path,
    field: Option<&Path>,
    samples: Option<&Path>,
    grid: (usize, usize, f64),
) -> anyhow::Result<()> {
    let dom = DiskDomain::new(a)?;
    let sol = oracles::named_oracle(name)?;
    if let Some(want) = alpha {
        if want != sol.alpha {
            return Err(GError::AlphaMismatch { expected: sol.alpha, got: want }.into());
        }
    }
    let data = oracles::boundary_trace(&sol, &dom, n);
    let doc = BoundaryDoc::from_data(&data, a)?;
    fs::write(output, serde_json::to_string_pretty(&doc)?)?;
    if let Some(path) = field {
        let rows = interior_grid(&dom, grid.0, grid.1, grid.2);
        let mut csv = String::from("x,y,u\n");
        for row in rows {
            for z in row {
                csv.push_str(&format!("{},{},{}\n", fmt(z.re), fmt(z.im), fmt(sol.u(z))));
            }
        }
        fs::write(path, csv)?;
    }
    if let Some(path) = samples {
        let m = 2 * n + 2;
        let mut csv = String::from("theta,ut,un\n");
        for i in 0..m {
            let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            csv.push_str(&format!(
                "{},{},{}\n",
                fmt(t),
                fmt(data.u_t.eval_real(t)),
                fmt(data.u_n.eval_real(t))
            ));
        }
        fs::write(path, csv)?;
    }
    Ok(())
}

fn cmd_convergence(name: &str, a: f64, output: &Path) -> anyhow::Result<()> {
    let dom = DiskDomain::new(a)?;
    let sol = oracles::named_oracle(name)?;
    let data = oracles::boundary_trace(&sol, &dom, 32);
    let mut probes: Vec<Complex64> = vec![Complex64::new(a, 0.0)];
    for &r in &[0.35, 0.65] {
        for i in 0..12 {
            let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 12.0;
            probes.push(Complex64::new(a, 0.0) + r * Complex64::from_polar(1.0, t));
        }
    }
    let mut csv = String::from("method,resolution,max_error,observed_order\n");

    // integral representation: error vs circle nodes
    let mut prev: Option<(usize, f64)> = None;
    for n in [64usize, 128, 256, 512] {
        let solver = FieldSolver::new(
            dom,
            &data,
            EvenParams { n_circle: n, n_chord: 64 },
            OddParams { n_outer: n, n_inner: 96 },
        )?;
        let mut err = 0.0f64;
        for &z in &probes {
            err = err.max((solver.solve(z)? - sol.u(z)).abs());
        }
        let order = prev
            .map(|(pn, pe)| (pe / err.max(1e-300)).log2() / ((n as f64 / pn as f64).log2()))
            .unwrap_or(f64::NAN);
        csv.push_str(&format!("rh,{n},{},{}\n", fmt(err), fmt(order)));
        prev = Some((n, err));
    }

    // finite differences: error vs radial resolution
    let trace = data.trace_series()?;
    let mut prev: Option<(usize, f64)> = None;
    for n_r in [16usize, 32, 64] {
        let g = oracles::fd_solve(sol.alpha, &trace, &dom, n_r)?;
        let mut err = 0.0f64;
        for &z in &probes {
            err = err.max((g.eval(z) - sol.u(z)).abs());
        }
        let order = prev
            .map(|(pn, pe)| (pe / err.max(1e-300)).log2() / ((n_r as f64 / pn as f64).log2()))
            .unwrap_or(f64::NAN);
        csv.push_str(&format!("fd,{n_r},{},{}\n", fmt(err), fmt(order)));
        prev = Some((n_r, err));
    }
    fs::write(output, csv)?;
    Ok(())
}
