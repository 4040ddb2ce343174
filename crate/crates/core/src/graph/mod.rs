//! Dirichlet problem for graphs `z = u(x, y)` that are singular minimal
//! surfaces:
//!
//! ```text
//! div(Du / W) = α / (u W),   W = sqrt(1 + |Du|^2),   u = g on ∂Ω
//! ```
//!
//! The divergence is discretized in conservative form on a uniform grid
//! over a rectangle or a disk. On the disk, stencil arms that leave the
//! domain are cut at the circle and carry the boundary value there
//! (Shortley-Weller). Newton's method is used with exact Jacobians from
//! dual numbers and a banded LU factorization.

mod banded;
mod dual;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::profiles::{Alpha, Generatrix, MeridianProfile};

pub use banded::BandedLu;
pub use dual::{Dual, Scalar};

/// Fewest cells allowed along either axis.
pub const MIN_CELLS: usize = 16;

/// Disk nodes closer than this fraction of the grid spacing to the circle
/// are moved onto it and become boundary nodes, so no cut arm is shorter
/// than this fraction. Arms toward such nodes still end at the exact
/// crossing with the circle.
pub const SNAP_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Rectangle { x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64 },
    Disk { cx: f64, cy: f64, radius: f64 },
}

/// A planar domain together with its grid resolution (cells per axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain2D {
    pub shape: Shape,
    pub nx: usize,
    pub ny: usize,
}

impl Domain2D {
    pub fn rectangle(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, nx: usize, ny: usize) -> Result<Self> {
        if ![x_lo, x_hi, y_lo, y_hi].iter().all(|v| v.is_finite()) || !(x_hi > x_lo) || !(y_hi > y_lo) {
            return Err(Error::param("rectangle needs finite bounds with positive extent"));
        }
        Self::check_cells(nx, ny)?;
        Ok(Domain2D {
            shape: Shape::Rectangle { x_lo, x_hi, y_lo, y_hi },
            nx,
            ny,
        })
    }

    pub fn disk(cx: f64, cy: f64, radius: f64, nx: usize, ny: usize) -> Result<Self> {
        if !cx.is_finite() || !cy.is_finite() || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::param("disk needs a finite center and positive radius"));
        }
        Self::check_cells(nx, ny)?;
        Ok(Domain2D {
            shape: Shape::Disk { cx, cy, radius },
            nx,
            ny,
        })
    }

    fn check_cells(nx: usize, ny: usize) -> Result<()> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(Error::param(format!(
                "grid needs at least {MIN_CELLS} cells per axis, got {nx}x{ny}"
            )));
        }
        Ok(())
    }

    /// Exact area of the continuous domain.
    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Rectangle { x_lo, x_hi, y_lo, y_hi } => (x_hi - x_lo) * (y_hi - y_lo),
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    /// `(x_lo, x_hi, y_lo, y_hi)` of the grid.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self.shape {
            Shape::Rectangle { x_lo, x_hi, y_lo, y_hi } => (x_lo, x_hi, y_lo, y_hi),
            Shape::Disk { cx, cy, radius } => (cx - radius, cx + radius, cy - radius, cy + radius),
        }
    }

    pub fn with_cells(&self, nx: usize, ny: usize) -> Result<Self> {
        Self::check_cells(nx, ny)?;
        Ok(Domain2D { nx, ny, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Boundary,
    Outside,
}

/// Point `from + theta (to - from)` where the ray from an interior node
/// through a non-interior neighbour meets the circle. `theta` can exceed
/// one when the neighbour was snapped outward onto the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutPoint {
    pub from: usize,
    pub to: usize,
    pub theta: f64,
    pub x: f64,
    pub y: f64,
}

/// Node classification and boundary geometry for a domain.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub x_lo: f64,
    pub y_lo: f64,
    pub hx: f64,
    pub hy: f64,
    kinds: Vec<NodeKind>,
    positions: Vec<(f64, f64)>,
    unknown_of: Vec<Option<usize>>,
    node_of_unknown: Vec<usize>,
    cuts: Vec<CutPoint>,
    cut_index: HashMap<(usize, usize), usize>,
}

// Arm order used throughout: east, west, north, south.
const EAST: usize = 0;
const WEST: usize = 1;
const NORTH: usize = 2;
const SOUTH: usize = 3;

impl Grid {
    pub fn new(domain: &Domain2D) -> Self {
        let (x_lo, x_hi, y_lo, y_hi) = domain.bounding_box();
        let (nx, ny) = (domain.nx, domain.ny);
        let hx = (x_hi - x_lo) / nx as f64;
        let hy = (y_hi - y_lo) / ny as f64;
        let count = (nx + 1) * (ny + 1);
        let mut kinds = Vec::with_capacity(count);
        let mut positions = Vec::with_capacity(count);
        for j in 0..=ny {
            for i in 0..=nx {
                let x = x_lo + i as f64 * hx;
                let y = y_lo + j as f64 * hy;
                match domain.shape {
                    Shape::Rectangle { .. } => {
                        let edge = i == 0 || j == 0 || i == nx || j == ny;
                        kinds.push(if edge { NodeKind::Boundary } else { NodeKind::Interior });
                        positions.push((x, y));
                    }
                    Shape::Disk { cx, cy, radius } => {
                        let d = (x - cx).hypot(y - cy);
                        let snap = SNAP_FRACTION * hx.min(hy);
                        if (d - radius).abs() <= snap {
                            kinds.push(NodeKind::Boundary);
                            positions.push((cx + (x - cx) * radius / d, cy + (y - cy) * radius / d));
                        } else if d < radius {
                            kinds.push(NodeKind::Interior);
                            positions.push((x, y));
                        } else {
                            kinds.push(NodeKind::Outside);
                            positions.push((x, y));
                        }
                    }
                }
            }
        }
        let mut unknown_of = vec![None; count];
        let mut node_of_unknown = Vec::new();
        for (n, k) in kinds.iter().enumerate() {
            if *k == NodeKind::Interior {
                unknown_of[n] = Some(node_of_unknown.len());
                node_of_unknown.push(n);
            }
        }
        let mut grid = Grid {
            nx,
            ny,
            x_lo,
            y_lo,
            hx,
            hy,
            kinds,
            positions,
            unknown_of,
            node_of_unknown,
            cuts: Vec::new(),
            cut_index: HashMap::new(),
        };
        if let Shape::Disk { cx, cy, radius } = domain.shape {
            for k in 0..grid.node_of_unknown.len() {
                let p = grid.node_of_unknown[k];
                for arm in 0..4 {
                    let q = grid.neighbor(p, arm).expect("interior nodes have four neighbors");
                    if grid.kinds[q] == NodeKind::Interior {
                        continue;
                    }
                    // Use the raw grid position even for snapped nodes.
                    let q_raw = (x_lo + (q % (nx + 1)) as f64 * hx, y_lo + (q / (nx + 1)) as f64 * hy);
                    let (px, py) = grid.positions[p];
                    let (dx, dy) = (q_raw.0 - px, q_raw.1 - py);
                    let (fx, fy) = (px - cx, py - cy);
                    let a = dx * dx + dy * dy;
                    let b = fx * dx + fy * dy;
                    let c = fx * fx + fy * fy - radius * radius;
                    let theta = (-b + (b * b - a * c).sqrt()) / a;
                    grid.cut_index.insert((p, q), grid.cuts.len());
                    grid.cuts.push(CutPoint {
                        from: p,
                        to: q,
                        theta,
                        x: px + theta * dx,
                        y: py + theta * dy,
                    });
                }
            }
        }
        grid
    }

    pub fn node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn ij(&self, node: usize) -> (usize, usize) {
        (node % (self.nx + 1), node / (self.nx + 1))
    }

    pub fn node_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn unknown_count(&self) -> usize {
        self.node_of_unknown.len()
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kinds[node]
    }

    /// Node position; boundary nodes of a disk report their snapped position.
    pub fn position(&self, node: usize) -> (f64, f64) {
        self.positions[node]
    }

    pub fn unknown(&self, node: usize) -> Option<usize> {
        self.unknown_of[node]
    }

    pub fn node_of_unknown(&self, k: usize) -> usize {
        self.node_of_unknown[k]
    }

    pub fn cuts(&self) -> &[CutPoint] {
        &self.cuts
    }

    /// Index of the boundary crossing on the segment between two nodes,
    /// in either order.
    pub fn cut_between(&self, a: usize, b: usize) -> Option<usize> {
        self.cut_index
            .get(&(a, b))
            .or_else(|| self.cut_index.get(&(b, a)))
            .copied()
    }

    fn neighbor(&self, node: usize, arm: usize) -> Option<usize> {
        let (i, j) = self.ij(node);
        match arm {
            EAST if i < self.nx => Some(node + 1),
            WEST if i > 0 => Some(node - 1),
            NORTH if j < self.ny => Some(node + self.nx + 1),
            SOUTH if j > 0 => Some(node - self.nx - 1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Arm {
    Unknown(usize),
    /// Known boundary value. `cross` is the derivative across the arm
    /// at that boundary point when it can be read off the boundary data.
    Fixed {
        value: f64,
        cross: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy)]
struct Link {
    arm: Arm,
    len: f64,
}

/// Discrete Dirichlet problem: grid, boundary data and stencils.
#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub alpha: Alpha,
    pub domain: Domain2D,
    pub grid: Grid,
    boundary_values: Vec<f64>,
    cut_values: Vec<f64>,
    stencils: Vec<[Link; 4]>,
}

impl DirichletProblem {
    pub fn new(alpha: Alpha, domain: &Domain2D, boundary: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let grid = Grid::new(domain);
        let mut boundary_values = vec![f64::NAN; grid.node_count()];
        for n in 0..grid.node_count() {
            if grid.kind(n) == NodeKind::Boundary {
                let (x, y) = grid.position(n);
                boundary_values[n] = check_boundary_value(boundary(x, y), x, y)?;
            }
        }
        let cut_values = grid
            .cuts()
            .iter()
            .map(|c| check_boundary_value(boundary(c.x, c.y), c.x, c.y))
            .collect::<Result<Vec<_>>>()?;
        if grid.unknown_count() == 0 {
            return Err(Error::param("grid has no interior nodes"));
        }

        let cross_from_side = |q: usize, arm: usize| -> Option<f64> {
            if !matches!(domain.shape, Shape::Rectangle { .. }) {
                return None;
            }
            // Rectangle sides are grid lines, so the derivative along the
            // side comes from neighbouring boundary nodes.
            let (along_plus, along_minus, h) = if arm == EAST || arm == WEST {
                (NORTH, SOUTH, grid.hy)
            } else {
                (EAST, WEST, grid.hx)
            };
            let a = grid.neighbor(q, along_plus)?;
            let b = grid.neighbor(q, along_minus)?;
            if grid.kind(a) != NodeKind::Boundary || grid.kind(b) != NodeKind::Boundary {
                return None;
            }
            Some((boundary_values[a] - boundary_values[b]) / (2.0 * h))
        };

        let mut stencils = Vec::with_capacity(grid.unknown_count());
        for k in 0..grid.unknown_count() {
            let p = grid.node_of_unknown(k);
            let mut links = [Link {
                arm: Arm::Fixed {
                    value: 0.0,
                    cross: None,
                },
                len: 0.0,
            }; 4];
            for (arm, link) in links.iter_mut().enumerate() {
                let h = if arm == EAST || arm == WEST { grid.hx } else { grid.hy };
                let q = grid.neighbor(p, arm).expect("interior nodes have four neighbors");
                *link = match grid.kind(q) {
                    NodeKind::Interior => Link {
                        arm: Arm::Unknown(grid.unknown(q).unwrap()),
                        len: h,
                    },
                    NodeKind::Boundary if grid.cut_between(p, q).is_none() => Link {
                        arm: Arm::Fixed {
                            value: boundary_values[q],
                            cross: cross_from_side(q, arm),
                        },
                        len: h,
                    },
                    NodeKind::Boundary | NodeKind::Outside => {
                        let c = grid.cut_between(p, q).expect("cut recorded for outside arm");
                        Link {
                            arm: Arm::Fixed {
                                value: cut_values[c],
                                cross: None,
                            },
                            len: grid.cuts()[c].theta * h,
                        }
                    }
                };
            }
            stencils.push(links);
        }
        Ok(DirichletProblem {
            alpha,
            domain: *domain,
            grid,
            boundary_values,
            cut_values,
            stencils,
        })
    }

    pub fn unknown_count(&self) -> usize {
        self.stencils.len()
    }

    /// Positions of the unknowns, in unknown order.
    pub fn unknown_positions(&self) -> Vec<(f64, f64)> {
        (0..self.unknown_count())
            .map(|k| self.grid.position(self.grid.node_of_unknown(k)))
            .collect()
    }

    pub fn boundary_value(&self, node: usize) -> Option<f64> {
        let v = self.boundary_values[node];
        (!v.is_nan()).then_some(v)
    }

    pub fn cut_values(&self) -> &[f64] {
        &self.cut_values
    }

    fn all_boundary_data(&self) -> impl Iterator<Item = f64> + '_ {
        self.boundary_values
            .iter()
            .copied()
            .filter(|v| !v.is_nan())
            .chain(self.cut_values.iter().copied())
    }

    /// Starting iterate: the boundary mean, lowered for α > 0 by a bump
    /// sized from the small-radius behaviour `u ≈ u0 + α r^2 / (4 u0)` of
    /// rotational solutions.
    pub fn initial_guess(&self) -> Vec<f64> {
        let (sum, count, min) = self
            .all_boundary_data()
            .fold((0.0, 0usize, f64::INFINITY), |(s, c, m), v| (s + v, c + 1, m.min(v)));
        let mean = sum / count as f64;
        let a = self.alpha.value();
        let (shape_fn, reach): (Box<dyn Fn(f64, f64) -> f64>, f64) = match self.domain.shape {
            Shape::Disk { cx, cy, radius } => (
                Box::new(move |x, y| 1.0 - ((x - cx).powi(2) + (y - cy).powi(2)) / (radius * radius)),
                radius,
            ),
            Shape::Rectangle { x_lo, x_hi, y_lo, y_hi } => {
                let (mx, my) = (0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi));
                let (wx, wy) = (0.5 * (x_hi - x_lo), 0.5 * (y_hi - y_lo));
                (
                    Box::new(move |x, y| (1.0 - ((x - mx) / wx).powi(2)) * (1.0 - ((y - my) / wy).powi(2))),
                    wx.min(wy),
                )
            }
        };
        let bump = if a > 0.0 { a * reach * reach / (4.0 * mean) } else { 0.0 };
        self.unknown_positions()
            .iter()
            .map(|&(x, y)| (mean - bump * shape_fn(x, y).max(0.0)).max(0.5 * min))
            .collect()
    }

    fn value<T: Scalar>(&self, link: &Link, u: &impl Fn(usize) -> T) -> T {
        match link.arm {
            Arm::Unknown(q) => u(q),
            Arm::Fixed { value, .. } => T::constant(value),
        }
    }

    /// Derivative at unknown `k` along x (`axis == 0`) or y, by the
    /// three-point formula on possibly unequal arms.
    fn derivative<T: Scalar>(&self, k: usize, axis: usize, u: &impl Fn(usize) -> T) -> T {
        let links = &self.stencils[k];
        let (plus, minus) = if axis == 0 {
            (&links[EAST], &links[WEST])
        } else {
            (&links[NORTH], &links[SOUTH])
        };
        let (hp, hm) = (plus.len, minus.len);
        let c = u(k);
        (self.value(plus, u) - c) * (hm / (hp * (hp + hm))) + (c - self.value(minus, u)) * (hp / (hm * (hp + hm)))
    }

    /// Flux `a * (u_q - u_p)/len` through the face halfway along `arm`,
    /// with `a = 1/sqrt(1 + normal^2 + tangential^2)`.
    fn face_flux<T: Scalar>(&self, k: usize, arm: usize, up: T, cross_p: T, u: &impl Fn(usize) -> T) -> T {
        let links = &self.stencils[k];
        let link = &links[arm];
        let cross_axis = if arm == EAST || arm == WEST { 1 } else { 0 };
        let g = (self.value(link, u) - up) * (1.0 / link.len);
        let tangential = match link.arm {
            Arm::Unknown(q) => (cross_p + self.derivative(q, cross_axis, u)) * 0.5,
            Arm::Fixed { cross: Some(c), .. } => (cross_p + T::constant(c)) * 0.5,
            Arm::Fixed { cross: None, .. } => {
                // Extrapolate the cross derivative to the face midpoint
                // from this node and the one on the opposite arm.
                let opposite = &links[arm ^ 1];
                match opposite.arm {
                    Arm::Unknown(q) => {
                        let cross_q = self.derivative(q, cross_axis, u);
                        cross_p + (cross_p - cross_q) * (0.5 * link.len / opposite.len)
                    }
                    Arm::Fixed { .. } => cross_p,
                }
            }
        };
        g / (g * g + tangential * tangential + 1.0).sqrt()
    }

    /// Residual `α/(u W) - div(Du/W)` at unknown `k`.
    fn local_residual<T: Scalar>(&self, k: usize, u: &impl Fn(usize) -> T) -> T {
        let links = &self.stencils[k];
        let up = u(k);
        let dx = self.derivative(k, 0, u);
        let dy = self.derivative(k, 1, u);
        let fe = self.face_flux(k, EAST, up, dy, u);
        let fw = self.face_flux(k, WEST, up, dy, u);
        let fnn = self.face_flux(k, NORTH, up, dx, u);
        let fs = self.face_flux(k, SOUTH, up, dx, u);
        let div = (fe + fw) * (2.0 / (links[EAST].len + links[WEST].len))
            + (fnn + fs) * (2.0 / (links[NORTH].len + links[SOUTH].len));
        let w = (dx * dx + dy * dy + 1.0).sqrt();
        T::constant(self.alpha.value()) / (up * w) - div
    }

    /// Discrete residual at every unknown.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.unknown_count());
        let get = |q: usize| u[q];
        (0..self.unknown_count())
            .map(|k| self.local_residual(k, &get))
            .collect()
    }

    /// Unknowns that enter the residual at `k`, at most nine.
    fn support(&self, k: usize) -> Vec<usize> {
        let mut s = vec![k];
        for (arm, link) in self.stencils[k].iter().enumerate() {
            if let Arm::Unknown(q) = link.arm {
                s.push(q);
                let cross = if arm == EAST || arm == WEST {
                    [NORTH, SOUTH]
                } else {
                    [EAST, WEST]
                };
                for c in cross {
                    if let Arm::Unknown(r) = self.stencils[q][c].arm {
                        s.push(r);
                    }
                }
            }
        }
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Exact Jacobian of [`residual`](Self::residual) as sparse rows.
    pub fn jacobian(&self, u: &[f64]) -> Vec<Vec<(usize, f64)>> {
        assert_eq!(u.len(), self.unknown_count());
        (0..self.unknown_count())
            .map(|k| {
                let support = self.support(k);
                debug_assert!(support.len() <= 9);
                let get = |q: usize| match support.iter().position(|&s| s == q) {
                    Some(slot) => Dual::<9>::variable(u[q], slot),
                    None => Dual::<9>::constant(u[q]),
                };
                let r = self.local_residual(k, &get);
                support.iter().enumerate().map(|(slot, &q)| (q, r.d[slot])).collect()
            })
            .collect()
    }

    /// Full node array for a vector of unknowns; NaN outside the domain.
    pub fn node_values(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.boundary_values.clone();
        for (k, &v) in u.iter().enumerate() {
            out[self.grid.node_of_unknown(k)] = v;
        }
        out
    }
}

fn check_boundary_value(v: f64, x: f64, y: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(format!(
            "boundary value must be positive, got {v} at ({x}, {y})"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop when the max-norm residual drops to this.
    pub tol: f64,
    pub max_iters: usize,
    /// Starting unknowns; defaults to [`DirichletProblem::initial_guess`].
    pub initial: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iters: 50,
            initial: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GraphSolution {
    pub problem: DirichletProblem,
    /// Values at the unknowns, in unknown order.
    pub unknowns: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Max-norm residual before each Newton step and after the last.
    pub history: Vec<f64>,
}

impl GraphSolution {
    pub fn alpha(&self) -> Alpha {
        self.problem.alpha
    }

    pub fn grid(&self) -> &Grid {
        &self.problem.grid
    }

    /// Values on every node, NaN outside the domain.
    pub fn node_values(&self) -> Vec<f64> {
        self.problem.node_values(&self.unknowns)
    }

    /// Residual per node, recomputed from the stored solution; NaN at
    /// nodes that are not unknowns.
    pub fn residual_field(&self) -> Vec<f64> {
        let r = self.problem.residual(&self.unknowns);
        let mut out = vec![f64::NAN; self.grid().node_count()];
        for (k, v) in r.into_iter().enumerate() {
            out[self.grid().node_of_unknown(k)] = v;
        }
        out
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().filter(|x| !x.is_nan()).fold(0.0, |m, x| m.max(x.abs()))
}

pub fn solve_dirichlet(
    alpha: Alpha,
    domain: &Domain2D,
    boundary: impl Fn(f64, f64) -> f64,
    opts: &SolveOptions,
) -> Result<GraphSolution> {
    if !(opts.tol > 0.0 && opts.tol <= 1e-6) {
        return Err(Error::param(format!(
            "tolerance must lie in (0, 1e-6], got {}",
            opts.tol
        )));
    }
    let problem = DirichletProblem::new(alpha, domain, boundary)?;
    let mut u = match &opts.initial {
        Some(u0) => {
            if u0.len() != problem.unknown_count() || u0.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::param(
                    "initial guess must be positive with one value per unknown",
                ));
            }
            u0.clone()
        }
        None => problem.initial_guess(),
    };
    let mut r = problem.residual(&u);
    let mut norm = max_abs(&r);
    let mut history = vec![norm];
    for iter in 0..opts.max_iters {
        if norm <= opts.tol {
            return Ok(GraphSolution {
                problem,
                unknowns: u,
                residual_norm: norm,
                iterations: iter,
                history,
            });
        }
        let lu = BandedLu::factor(&problem.jacobian(&u))?;
        let mut step: Vec<f64> = r.iter().map(|v| -v).collect();
        lu.solve(&mut step);
        let mut accepted = None;
        let mut t = 1.0;
        for _ in 0..30 {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if trial.iter().all(|v| *v > 0.0) {
                let rt = problem.residual(&trial);
                let nt = max_abs(&rt);
                if nt.is_finite() && rt.iter().all(|v| v.is_finite()) && nt < (1.0 - 1e-4 * t) * norm {
                    accepted = Some((trial, rt, nt));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt, nt)) => {
                u = trial;
                r = rt;
                norm = nt;
                history.push(norm);
            }
            None => {
                return Err(Error::NoConvergence {
                    iters: iter + 1,
                    residual: norm,
                })
            }
        }
    }
    if norm <= opts.tol {
        Ok(GraphSolution {
            problem,
            unknowns: u,
            residual_norm: norm,
            iterations: opts.max_iters,
            history,
        })
    } else {
        Err(Error::NoConvergence {
            iters: opts.max_iters,
            residual: norm,
        })
    }
}

/// Largest gap `|u - f(r)|` over interior and boundary nodes between a
/// graph solution on a disk centered at the origin and a rotational
/// meridian.
pub fn radial_compare(solution: &GraphSolution, meridian: &MeridianProfile) -> Result<f64> {
    let Shape::Disk { cx, cy, radius } = solution.problem.domain.shape else {
        return Err(Error::InvalidInput("radial comparison needs a disk domain".into()));
    };
    if cx != 0.0 || cy != 0.0 {
        return Err(Error::InvalidInput(
            "radial comparison needs a disk centered at the origin".into(),
        ));
    }
    let data: Vec<f64> = solution.problem.all_boundary_data().collect();
    let first = data[0];
    if data.iter().any(|v| (v - first).abs() > 1e-12 * first.abs()) {
        return Err(Error::InvalidInput("boundary data is not constant".into()));
    }
    if meridian.x_max < radius * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!(
            "meridian reaches x = {} but the disk has radius {radius}",
            meridian.x_max
        )));
    }
    let values = solution.node_values();
    let grid = solution.grid();
    let mut gap: f64 = 0.0;
    for n in 0..grid.node_count() {
        if grid.kind(n) == NodeKind::Outside {
            continue;
        }
        let (x, y) = grid.position(n);
        let r = x.hypot(y).min(meridian.x_max);
        let (f, _) = meridian
            .eval(r)
            .ok_or_else(|| Error::InvalidInput(format!("meridian undefined at r = {r}")))?;
        gap = gap.max((values[n] - f).abs());
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> Alpha {
        Alpha::new(v).unwrap()
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*state >> 11) as f64) / ((1u64 << 53) as f64)
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Domain2D::rectangle(0.0, 1.0, 0.0, 1.0, 8, 16).is_err());
        assert!(Domain2D::disk(0.0, 0.0, -1.0, 16, 16).is_err());
        let d = Domain2D::disk(0.0, 0.0, 1.0, 16, 16).unwrap();
        let bad = solve_dirichlet(a(1.0), &d, |_, _| -1.0, &SolveOptions::default());
        assert!(matches!(bad, Err(Error::InvalidParameter(_))));
        let loose = SolveOptions {
            tol: 1e-3,
            ..Default::default()
        };
        assert!(solve_dirichlet(a(1.0), &d, |_, _| 1.0, &loose).is_err());
    }

    #[test]
    fn disk_classification() {
        let d = Domain2D::disk(0.0, 0.0, 1.0, 32, 32).unwrap();
        let g = Grid::new(&d);
        let h = 2.0 / 32.0;
        for n in 0..g.node_count() {
            let (x, y) = g.position(n);
            let r = x.hypot(y);
            match g.kind(n) {
                NodeKind::Interior => assert!(r < 1.0 - SNAP_FRACTION * h),
                NodeKind::Boundary => assert!((r - 1.0).abs() < 1e-14),
                NodeKind::Outside => assert!(r > 1.0 + SNAP_FRACTION * h),
            }
        }
        for c in g.cuts() {
            assert!(c.theta >= SNAP_FRACTION);
            if g.kind(c.to) == NodeKind::Outside {
                assert!(c.theta < 1.0);
            }
            assert!((c.x.hypot(c.y) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_state_residual() {
        let d = Domain2D::disk(0.0, 0.0, 1.0, 20, 20).unwrap();
        let p = DirichletProblem::new(a(1.5), &d, |_, _| 2.0).unwrap();
        let r = p.residual(&vec![2.0; p.unknown_count()]);
        for v in r {
            assert!((v - 0.75).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let d = Domain2D::disk(0.1, -0.2, 1.0, 16, 16).unwrap();
        let p = DirichletProblem::new(a(-1.3), &d, |x, y| 2.0 + 0.3 * x - 0.2 * y * y).unwrap();
        let mut seed = 11;
        let u: Vec<f64> = (0..p.unknown_count()).map(|_| 1.0 + lcg(&mut seed)).collect();
        let jac = p.jacobian(&u);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (k, row) in jac.iter().enumerate() {
            for &(q, v) in row {
                let mut up = u.clone();
                let mut dn = u.clone();
                let h = 1e-6;
                up[q] += h;
                dn[q] -= h;
                let fd = (p.residual(&up)[k] - p.residual(&dn)[k]) / (2.0 * h);
                worst = worst.max((fd - v).abs());
                scale = scale.max(v.abs());
            }
        }
        assert!(worst / scale < 1e-6, "{worst} vs {scale}");
    }

    #[test]
    fn hemisphere_on_disk() {
        // α = -2 meridians are hemispheres; boundary 2 on the unit circle
        // gives u = sqrt(5 - r^2).
        let d = Domain2D::disk(0.0, 0.0, 1.0, 32, 32).unwrap();
        let s = solve_dirichlet(a(-2.0), &d, |_, _| 2.0, &SolveOptions::default()).unwrap();
        assert!(s.residual_norm <= 1e-10);
        let v = s.node_values();
        let g = s.grid();
        for n in 0..g.node_count() {
            if g.kind(n) != NodeKind::Outside {
                let (x, y) = g.position(n);
                assert!((v[n] - (5.0 - x * x - y * y).sqrt()).abs() < 2e-3);
            }
        }
    }

    #[test]
    fn perturbation_shows_up_locally() {
        let d = Domain2D::rectangle(0.0, 1.0, 0.0, 1.0, 16, 16).unwrap();
        let s = solve_dirichlet(a(1.0), &d, |x, _| 1.0 + 0.2 * x, &SolveOptions::default()).unwrap();
        let mut bumped = s.clone();
        let k = bumped.unknowns.len() / 2;
        bumped.unknowns[k] += 1e-3;
        let field = bumped.residual_field();
        let spike = bumped.grid().node_of_unknown(k);
        let (imax, _) = field
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_nan())
            .fold(
                (0, 0.0),
                |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) },
            );
        assert_eq!(imax, spike);
    }
}
