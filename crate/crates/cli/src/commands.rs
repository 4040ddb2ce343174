use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use singmin::estimates::{
    self, check_area_lower, check_area_upper, check_extrema_side, check_graph_area, check_planar_necessary,
    height_estimate_for, log_grid, threshold_d0, threshold_h0, BoundReport,
};
use singmin::graph::{solve_dirichlet, Domain2D, GraphSolution, SolveOptions};
use singmin::io;
use singmin::mesh::{self, extrude, graph_mesh, revolve, TriMesh};
use singmin::profiles::{
    solve_catenary, solve_meridian, solve_winglike_with, winglike_exit_height, Generatrix, GraphSample, WinglikeStop,
};
use singmin::{Alpha, Error};

use crate::args::*;
use crate::{Failure, Outcome, EXIT_BOUND_FAILED, EXIT_OK};

type Run = Result<Outcome, Failure>;

fn alpha(a: f64) -> Result<Alpha, Failure> {
    Ok(Alpha::new(a)?)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))
}

/// Runs `write` against the file at `path`, or against `out` when absent.
fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> singmin::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let mut f = create(p)?;
            write(&mut f)?;
            f.flush().map_err(Error::from)?;
        }
        None => write(out)?,
    }
    Ok(())
}

fn write_obj_to(path: &Path, mesh: &TriMesh) -> Result<(), Failure> {
    io::write_obj(create(path)?, mesh)?;
    Ok(())
}

fn read_mesh(path: &Path) -> Result<TriMesh, Failure> {
    let f = File::open(path).map_err(|e| Failure::usage(format!("cannot open {}: {e}", path.display())))?;
    Ok(io::read_obj(BufReader::new(f))?)
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<(), Failure> {
    writeln!(out, "{}", line.as_ref()).map_err(Error::from)?;
    Ok(())
}

/// Uniform table over `[0, x_end]` with spacing close to `step` that
/// lands exactly on `x_end`.
fn uniform_table(g: &dyn Generatrix, x_end: f64, step: f64) -> Result<Vec<GraphSample>, Failure> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Failure::usage(format!("step must be positive, got {step}")));
    }
    let n = ((x_end / step).round() as usize).max(1);
    if n > 10_000_000 {
        return Err(Failure::usage("step too small for the table length"));
    }
    (0..=n)
        .map(|k| {
            let x = x_end * k as f64 / n as f64;
            let (f, fp) = g
                .eval(x)
                .ok_or_else(|| Failure::numeric(format!("profile undefined at x = {x}")))?;
            Ok(GraphSample { x, f, fp })
        })
        .collect()
}

pub(crate) fn profile(cmd: &ProfileCmd, verbose: bool, out: &mut dyn Write) -> Run {
    match cmd {
        ProfileCmd::Catenary(a) => {
            let p = solve_catenary(alpha(a.common.alpha)?, a.z0, a.xmax, a.common.tol)?;
            let end = p.x_end();
            let table = uniform_table(&p, end, a.step)?;
            emit(a.common.out.as_deref(), out, |w| io::write_profile_csv(w, &table))?;
            let mut summary = format!("catenary reached x = {} ({:?})", io::fmt_f64(end), p.termination);
            if let Some(r) = p.r_max {
                summary.push_str(&format!(", half-width {}", io::fmt_f64(r)));
            }
            if verbose || a.common.out.is_some() {
                say(out, &summary)?;
            }
            Ok(Outcome::ok(summary))
        }
        ProfileCmd::Meridian(a) => {
            let p = solve_meridian(alpha(a.common.alpha)?, a.z0, a.xmax, a.common.tol)?;
            let end = p.domain().1;
            let table = uniform_table(&p, end, a.step)?;
            emit(a.common.out.as_deref(), out, |w| io::write_profile_csv(w, &table))?;
            let summary = format!("meridian reached x = {} ({:?})", io::fmt_f64(end), p.termination);
            if verbose || a.common.out.is_some() {
                say(out, &summary)?;
            }
            Ok(Outcome::ok(summary))
        }
        ProfileCmd::Winglike(a) => {
            let s_min = a.smin.unwrap_or(-100.0 * (a.lambda + a.c));
            let stop = WinglikeStop { radius: a.r };
            let p = solve_winglike_with(alpha(a.common.alpha)?, a.lambda, a.c, s_min, a.common.tol, stop)?;
            emit(a.common.out.as_deref(), out, |w| io::write_winglike_csv(w, &p.samples))?;
            let opt = |v: Option<f64>| v.map_or("none".to_string(), io::fmt_f64);
            let mut summary = format!(
                "winglike {:?}, waist radius {}, waist height {}",
                p.termination,
                opt(p.waist_radius),
                opt(p.waist_height)
            );
            if let Some(r) = a.r {
                summary.push_str(&format!(", exit height at {r}: {}", opt(winglike_exit_height(&p, r))));
            }
            if verbose || a.common.out.is_some() {
                say(out, &summary)?;
            }
            Ok(Outcome::ok(summary))
        }
    }
}

fn domain(d: &DomainArgs) -> Result<Domain2D, Failure> {
    let (nx, ny) = (d.grid.0, d.grid.1.unwrap_or(d.grid.0));
    // The grid flag counts nodes; the solver counts cells.
    let (cx, cy) = (nx - 1, ny - 1);
    let r = d.big_r;
    Ok(match d.shape {
        ShapeArg::Disk => Domain2D::disk(0.0, 0.0, r, cx, cy)?,
        ShapeArg::Square => Domain2D::rectangle(-r, r, -r, r, cx, cy)?,
    })
}

fn boundary_length(d: &DomainArgs) -> f64 {
    match d.shape {
        ShapeArg::Disk => std::f64::consts::TAU * d.big_r,
        ShapeArg::Square => 8.0 * d.big_r,
    }
}

fn solve_graph(common: &Common, d: &DomainArgs, verbose: bool, out: &mut dyn Write) -> Result<GraphSolution, Failure> {
    let dom = domain(d)?;
    let c = d.c;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Failure::usage(format!("c must be positive, got {c}")));
    }
    let opts = SolveOptions {
        tol: common.tol,
        ..SolveOptions::default()
    };
    let sol = solve_dirichlet(alpha(common.alpha)?, &dom, |_, _| c, &opts)?;
    if verbose {
        for (k, r) in sol.history.iter().enumerate() {
            say(out, format!("newton {k}: residual {r:.3e}"))?;
        }
    }
    Ok(sol)
}

pub(crate) fn solve(cmd: &SolveCmd, verbose: bool, out: &mut dyn Write) -> Run {
    let SolveCmd::Graph(a) = cmd;
    let sol = solve_graph(&a.common, &a.domain, verbose, out)?;
    emit(a.common.out.as_deref(), out, |w| io::write_graph_csv(w, &sol))?;
    if let Some(p) = &a.obj {
        write_obj_to(p, &graph_mesh(&sol)?)?;
    }
    let (lo, hi) = sol
        .unknowns
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &u| (l.min(u), h.max(u)));
    let summary = format!(
        "graph solved in {} newton steps, residual {:.3e}, u in [{}, {}]",
        sol.iterations,
        sol.residual_norm,
        io::fmt_f64(lo),
        io::fmt_f64(hi)
    );
    if verbose || a.common.out.is_some() {
        say(out, &summary)?;
    }
    Ok(Outcome::ok(summary))
}

fn divisions(grid: (usize, Option<usize>)) -> (usize, usize) {
    (grid.0, grid.1.unwrap_or(grid.0))
}

pub(crate) fn mesh_cmd(cmd: &MeshCmd, verbose: bool, out: &mut dyn Write) -> Run {
    let (m, a, obj, common) = match cmd {
        MeshCmd::Revolve(r) => {
            let p = solve_meridian(alpha(r.common.alpha)?, r.z0, r.r, r.common.tol)?;
            let (n_az, n_mer) = divisions(r.grid);
            (revolve(&p, (0.0, r.r), n_az, n_mer)?, r.common.alpha, &r.obj, &r.common)
        }
        MeshCmd::Extrude(e) => {
            let p = solve_catenary(alpha(e.common.alpha)?, e.z0, e.xmax, e.common.tol)?;
            if p.x_end() < e.xmax {
                return Err(Failure::numeric(format!(
                    "catenary ends at x = {} before xmax = {}",
                    p.x_end(),
                    e.xmax
                )));
            }
            let (nx, ny) = divisions(e.grid);
            (
                extrude(&p, (-e.xmax, e.xmax), (0.0, e.ylen), nx, ny)?,
                e.common.alpha,
                &e.obj,
                &e.common,
            )
        }
    };
    if let Some(p) = obj {
        write_obj_to(p, &m)?;
    }
    let h = mesh::weighted_mean_curvature(&m, a)?;
    emit(common.out.as_deref(), out, |w| io::write_vertex_field_csv(w, &m, &h))?;
    let summary = format!(
        "{} vertices, {} triangles, area {}, max interior |H_phi| {:.3e}",
        m.vertices().len(),
        m.triangles().len(),
        io::fmt_f64(mesh::area(&m)),
        h.max_abs_interior()
    );
    if verbose || common.out.is_some() {
        say(out, &summary)?;
    }
    Ok(Outcome::ok(summary))
}

fn boundary_height(m: &TriMesh) -> Result<f64, Failure> {
    let lp = m.boundary_loops().first().ok_or(Error::NoBoundary)?;
    Ok(m.vertices()[lp[0]].z)
}

/// Shoelace area of the projections of the boundary loops.
fn projected_area(m: &TriMesh) -> f64 {
    m.boundary_loops()
        .iter()
        .map(|lp| {
            let v = m.vertices();
            let mut s = 0.0;
            for k in 0..lp.len() {
                let (p, q) = (v[lp[k]], v[lp[(k + 1) % lp.len()]]);
                s += p.x * q.y - q.x * p.y;
            }
            0.5 * s
        })
        .sum::<f64>()
        .abs()
}

fn report(reports: &[BoundReport], path: Option<&Path>, verbose: bool, out: &mut dyn Write) -> Run {
    if let Some(p) = path {
        io::write_reports_csv(create(p)?, reports)?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if reports.len() <= 8 || verbose {
        write!(out, "{}", io::reports_table(reports)).map_err(Error::from)?;
    }
    let mut summary = format!("{} checks, {failed} failed", reports.len());
    if let Some(w) = estimates::worst(reports) {
        summary.push_str(&format!(", smallest margin {} ({})", io::fmt_f64(w.margin), w.name));
    }
    say(out, &summary)?;
    say(out, if failed == 0 { "PASS" } else { "FAIL" })?;
    Ok(Outcome {
        code: if failed == 0 { EXIT_OK } else { EXIT_BOUND_FAILED },
        summary,
    })
}

pub(crate) fn verify(cmd: &VerifyCmd, verbose: bool, out: &mut dyn Write) -> Run {
    match cmd {
        VerifyCmd::AreaUpper(g) | VerifyCmd::AreaLower(g) | VerifyCmd::GraphArea(g) | VerifyCmd::Extrema(g) => {
            let a = g.common.alpha;
            // Validate α for the chosen check before any solve.
            let ok = match cmd {
                VerifyCmd::AreaUpper(_) => a >= 1.0,
                VerifyCmd::AreaLower(_) => a < 0.0,
                VerifyCmd::GraphArea(_) => a > 0.0 && a < 1.0,
                _ => a != 0.0,
            };
            if !ok || !a.is_finite() {
                return Err(Failure::usage(format!(
                    "alpha = {a} is outside the range of this check"
                )));
            }
            let (m, c, exact) = match &g.mesh {
                Some(p) => {
                    let m = read_mesh(p)?;
                    let c = boundary_height(&m)?;
                    (m, c, None)
                }
                None => {
                    let sol = solve_graph(&g.common, &g.domain, verbose, out)?;
                    let exact = (boundary_length(&g.domain), domain(&g.domain)?.area());
                    (graph_mesh(&sol)?, g.domain.c, Some(exact))
                }
            };
            if let Some(p) = &g.obj {
                write_obj_to(p, &m)?;
            }
            let reports: Vec<BoundReport> = match cmd {
                VerifyCmd::AreaUpper(_) => vec![check_area_upper(&m, a, g.slack)?],
                VerifyCmd::AreaLower(_) => vec![check_area_lower(&m, a, c, g.slack)?],
                VerifyCmd::GraphArea(_) => {
                    let (len, omega) =
                        exact.unwrap_or_else(|| (mesh::boundary_lengths(&m).iter().sum(), projected_area(&m)));
                    let mut r = vec![check_planar_necessary(omega, c, len)?];
                    r.extend(check_graph_area(&m, a, c, len, omega, g.slack)?);
                    r
                }
                _ => vec![check_extrema_side(&m, a, c)?],
            };
            report(&reports, g.common.out.as_deref(), verbose, out)
        }
        VerifyCmd::Height(h) => {
            let reports = height_estimate_for(alpha(h.common.alpha)?, h.z0, h.r, h.common.tol)?;
            report(&reports, h.common.out.as_deref(), verbose, out)
        }
        VerifyCmd::Flux(f) => {
            if f.flux_tol.is_nan() || f.flux_tol <= 0.0 {
                return Err(Failure::usage("flux-tol must be positive"));
            }
            let a = f.common.alpha;
            let m = match &f.mesh {
                Some(p) => read_mesh(p)?,
                None => {
                    let p = solve_meridian(alpha(a)?, f.z0, f.r, f.common.tol)?;
                    let (n_az, n_mer) = divisions(f.grid);
                    revolve(&p, (0.0, f.r), n_az, n_mer)?
                }
            };
            let flux = mesh::flux_identity(&m, a)?;
            let rel = flux.residual.abs() / flux.interior_term.abs();
            let reports = [BoundReport::new(
                "flux",
                estimates::BoundKind::Upper,
                rel,
                f.flux_tol,
                0.0,
                &[
                    ("alpha", a),
                    ("boundary_term", flux.boundary_term),
                    ("interior_term", flux.interior_term),
                ],
            )];
            report(&reports, f.common.out.as_deref(), verbose, out)
        }
    }
}

pub(crate) fn threshold(cmd: &ThresholdCmd, verbose: bool, out: &mut dyn Write) -> Run {
    let t = match cmd {
        ThresholdCmd::H0(h) => {
            let t = threshold_h0(h.m, alpha(h.alpha)?, h.tol)?;
            if let Some(p) = &h.out {
                io::write_sweep_csv(create(p)?, &t)?;
            }
            t
        }
        ThresholdCmd::D0(d) => {
            if !(d.big_r > 0.0 && d.big_r.is_finite()) {
                return Err(Failure::usage(format!("R must be positive, got {}", d.big_r)));
            }
            let grid = log_grid(1e-2 * d.big_r, 10.0 * d.big_r, d.grid)?;
            let run = || threshold_d0(alpha(d.alpha)?, d.big_r, d.c, &grid, d.tol).map_err(Failure::from);
            let t = match d.jobs {
                Some(n) => crate::pool(n)?.install(run)?,
                None => run()?,
            };
            if let Some(p) = &d.out {
                io::write_sweep_csv(create(p)?, &t)?;
            }
            t
        }
    };
    if verbose {
        for (k, v) in &t.parameters {
            say(out, format!("{k} = {}", io::fmt_f64(*v)))?;
        }
        say(out, format!("{} sweep evaluations", t.sweep.len()))?;
    }
    let line = format!("{} = {}", io::threshold_kind_name(t.kind), io::fmt_f64(t.value));
    say(out, &line)?;
    Ok(Outcome::ok(line))
}
