//! Triangle meshes of surfaces in the upper half-space and the discrete
//! quantities measured on them.
//!
//! Orientation convention: triangles are counterclockwise when seen from
//! above, so graphs and surfaces of revolution get the upward normal.
//! With that normal the cotangent Laplacian gives `Δp = 2 H N`, and the
//! surfaces built from the profile equations satisfy
//! `H = α N_z / (2 z)`.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::graph::{GraphSolution, NodeKind};
use crate::profiles::{CatenaryProfile, Generatrix};

pub type Point = Vector3<f64>;

/// Fewest vertices allowed along either direction of a built mesh.
pub const MIN_DIVISIONS: usize = 8;

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_loops: Vec<Vec<usize>>,
    /// Triangle owning each boundary edge `loop[k] -> loop[k+1]`.
    boundary_owners: Vec<Vec<usize>>,
    apexes: Vec<usize>,
}

impl TriMesh {
    /// Validates heights, indices, orientation and manifoldness, and
    /// extracts the boundary loops.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.len() >= u32::MAX as usize || triangles.len() >= (u32::MAX / 4) as usize {
            return Err(Error::InvalidInput("mesh too large".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::InvalidInput(format!("vertex {i} is not finite")));
            }
            if !(v.z > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "vertex {i} has height {} but must lie above z = 0",
                    v.z
                )));
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::InvalidInput(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidInput(format!("triangle {t} repeats a vertex")));
            }
        }

        // Directed half-edges keyed by their undirected edge, sorted so
        // that the copies of an edge are adjacent.
        let mut half: Vec<(u64, u32)> = Vec::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = ((a.min(b) as u64) << 32) | a.max(b) as u64;
                let forward = (a < b) as u32;
                half.push((key, (t as u32) << 1 | forward));
            }
        }
        half.sort_unstable();
        let mut boundary_next: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut i = 0;
        while i < half.len() {
            let mut j = i + 1;
            while j < half.len() && half[j].0 == half[i].0 {
                j += 1;
            }
            let (lo, hi) = ((half[i].0 >> 32) as usize, (half[i].0 & 0xffff_ffff) as usize);
            match j - i {
                1 => {
                    let t = (half[i].1 >> 1) as usize;
                    let (a, b) = if half[i].1 & 1 == 1 { (lo, hi) } else { (hi, lo) };
                    if boundary_next.insert(a, (b, t)).is_some() {
                        return Err(Error::InvalidInput(format!("boundary pinches at vertex {a}")));
                    }
                }
                2 => {
                    if (half[i].1 & 1) == (half[i + 1].1 & 1) {
                        return Err(Error::InvalidInput(format!(
                            "inconsistent orientation across edge ({lo}, {hi})"
                        )));
                    }
                }
                n => {
                    return Err(Error::InvalidInput(format!(
                        "edge ({lo}, {hi}) is shared by {n} triangles"
                    )))
                }
            }
            i = j;
        }

        let mut starts: Vec<usize> = boundary_next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited = vec![false; vertices.len()];
        let mut boundary_loops = Vec::new();
        let mut boundary_owners = Vec::new();
        for s in starts {
            if visited[s] {
                continue;
            }
            let mut lp = Vec::new();
            let mut owners = Vec::new();
            let mut v = s;
            loop {
                visited[v] = true;
                lp.push(v);
                let &(next, t) = boundary_next
                    .get(&v)
                    .ok_or_else(|| Error::InvalidInput(format!("boundary is not closed at vertex {v}")))?;
                owners.push(t);
                if next == s {
                    break;
                }
                if visited[next] {
                    return Err(Error::InvalidInput(format!("boundary pinches at vertex {next}")));
                }
                v = next;
            }
            boundary_loops.push(lp);
            boundary_owners.push(owners);
        }
        Ok(TriMesh {
            vertices,
            triangles,
            boundary_loops,
            boundary_owners,
            apexes: Vec::new(),
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Boundary cycles, each traversed with the surface on the left.
    pub fn boundary_loops(&self) -> &[Vec<usize>] {
        &self.boundary_loops
    }

    /// Pole vertices of revolution meshes, where curvature is less accurate.
    pub fn apexes(&self) -> &[usize] {
        &self.apexes
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_loops.is_empty()
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.vertices.len()];
        for lp in &self.boundary_loops {
            for &v in lp {
                m[v] = true;
            }
        }
        m
    }

    /// Same surface with every triangle reversed.
    pub fn flipped(&self) -> TriMesh {
        let tris = self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect();
        let mut m = TriMesh::new(self.vertices.clone(), tris).expect("flipping keeps a valid mesh");
        m.apexes = self.apexes.clone();
        m
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .fold(0.0, f64::max)
    }

    fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }
}

fn check_divisions(n: usize, what: &str) -> Result<()> {
    if n < MIN_DIVISIONS {
        return Err(Error::param(format!(
            "{what} must be at least {MIN_DIVISIONS}, got {n}"
        )));
    }
    Ok(())
}

/// Push the two upward triangles of the quad with lower-left corner
/// `(i, j)` in a row-major vertex array of row length `row`.
fn push_quad(tris: &mut Vec<[usize; 3]>, row: usize, i: usize, j: usize) {
    let p = j * row + i;
    tris.push([p, p + 1, p + row + 1]);
    tris.push([p, p + row + 1, p + row]);
}

/// Surface of revolution `(x cos θ, x sin θ, f(x))` for `x` in
/// `[x_lo, x_hi]`. With `x_lo = 0` the mesh closes with a single apex
/// vertex on the axis.
pub fn revolve(profile: &dyn Generatrix, x_range: (f64, f64), n_azimuth: usize, n_meridian: usize) -> Result<TriMesh> {
    let (x_lo, x_hi) = x_range;
    let (d_lo, d_hi) = profile.domain();
    if !(x_lo >= 0.0 && x_lo < x_hi) {
        return Err(Error::param(format!("need 0 <= x_lo < x_hi, got [{x_lo}, {x_hi}]")));
    }
    if x_lo < d_lo || x_hi > d_hi * (1.0 + 1e-12) {
        return Err(Error::param(format!(
            "range [{x_lo}, {x_hi}] leaves the profile domain [{d_lo}, {d_hi}]"
        )));
    }
    check_divisions(n_azimuth, "n_azimuth")?;
    check_divisions(n_meridian, "n_meridian")?;
    let height = |x: f64| -> Result<f64> {
        let x = x.min(d_hi);
        profile
            .eval(x)
            .map(|(f, _)| f)
            .ok_or_else(|| Error::param(format!("profile undefined at x = {x}")))
    };
    let pole = x_lo == 0.0;
    let mut vertices = Vec::new();
    if pole {
        vertices.push(Point::new(0.0, 0.0, height(0.0)?));
    }
    let first_ring = usize::from(pole);
    for i in first_ring..=n_meridian {
        let x = x_lo + (x_hi - x_lo) * i as f64 / n_meridian as f64;
        let z = height(x)?;
        for j in 0..n_azimuth {
            let th = std::f64::consts::TAU * j as f64 / n_azimuth as f64;
            vertices.push(Point::new(x * th.cos(), x * th.sin(), z));
        }
    }
    let ring = |i: usize, j: usize| usize::from(pole) + (i - first_ring) * n_azimuth + j % n_azimuth;
    let mut tris = Vec::new();
    if pole {
        for j in 0..n_azimuth {
            tris.push([0, ring(1, j), ring(1, j + 1)]);
        }
    }
    for i in first_ring..n_meridian {
        for j in 0..n_azimuth {
            tris.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            tris.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    let mut mesh = TriMesh::new(vertices, tris)?;
    if pole {
        mesh.apexes.push(0);
    }
    Ok(mesh)
}

/// Cylinder `{(x, y, f(x))}` over the rectangle `x_range × y_range`,
/// ruled parallel to the y-axis. Negative `x` uses the even extension.
pub fn extrude(
    profile: &CatenaryProfile,
    x_range: (f64, f64),
    y_range: (f64, f64),
    n_x: usize,
    n_y: usize,
) -> Result<TriMesh> {
    let (x_lo, x_hi) = x_range;
    let (y_lo, y_hi) = y_range;
    if !(x_lo < x_hi) || !(y_lo < y_hi) {
        return Err(Error::param("extrusion ranges must have positive length"));
    }
    let reach = profile.x_end();
    if x_lo.abs().max(x_hi.abs()) > reach * (1.0 + 1e-12) {
        return Err(Error::param(format!(
            "x range [{x_lo}, {x_hi}] exceeds the profile reach {reach}"
        )));
    }
    check_divisions(n_x, "n_x")?;
    check_divisions(n_y, "n_y")?;
    let mut vertices = Vec::with_capacity((n_x + 1) * (n_y + 1));
    for j in 0..=n_y {
        let y = y_lo + (y_hi - y_lo) * j as f64 / n_y as f64;
        for i in 0..=n_x {
            let x = (x_lo + (x_hi - x_lo) * i as f64 / n_x as f64).clamp(-reach, reach);
            let (f, _) = profile
                .eval_even(x)
                .ok_or_else(|| Error::param(format!("profile undefined at x = {x}")))?;
            vertices.push(Point::new(x, y, f));
        }
    }
    let mut tris = Vec::with_capacity(2 * n_x * n_y);
    for j in 0..n_y {
        for i in 0..n_x {
            push_quad(&mut tris, n_x + 1, i, j);
        }
    }
    TriMesh::new(vertices, tris)
}

/// Mesh of a graph solution. Rectangle cells split into two triangles;
/// disk cells are clipped at the boundary crossings and fan-triangulated.
pub fn graph_mesh(solution: &GraphSolution) -> Result<TriMesh> {
    let grid = solution.grid();
    let values = solution.node_values();
    let cut_values = solution.problem.cut_values();
    let mut index = vec![usize::MAX; grid.node_count()];
    let mut vertices = Vec::new();
    for n in 0..grid.node_count() {
        if grid.kind(n) != NodeKind::Outside {
            let (x, y) = grid.position(n);
            index[n] = vertices.len();
            vertices.push(Point::new(x, y, values[n]));
        }
    }
    let mut cut_vertex = HashMap::new();
    let mut cut_at = |c: usize, vertices: &mut Vec<Point>| -> usize {
        *cut_vertex.entry(c).or_insert_with(|| {
            let p = grid.cuts()[c];
            vertices.push(Point::new(p.x, p.y, cut_values[c]));
            vertices.len() - 1
        })
    };
    let mut tris = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let corners = [
                grid.node(i, j),
                grid.node(i + 1, j),
                grid.node(i + 1, j + 1),
                grid.node(i, j + 1),
            ];
            let mut poly = Vec::with_capacity(6);
            for k in 0..4 {
                let (a, b) = (corners[k], corners[(k + 1) % 4]);
                if grid.kind(a) != NodeKind::Outside {
                    poly.push(index[a]);
                }
                let crossing = matches!(
                    (grid.kind(a), grid.kind(b)),
                    (NodeKind::Interior, NodeKind::Outside) | (NodeKind::Outside, NodeKind::Interior)
                );
                if crossing {
                    let c = grid
                        .cut_between(a, b)
                        .expect("crossing recorded on interior-outside edge");
                    poly.push(cut_at(c, &mut vertices));
                }
            }
            for k in 1..poly.len().saturating_sub(1) {
                tris.push([poly[0], poly[k], poly[k + 1]]);
            }
        }
    }
    if tris.is_empty() {
        return Err(Error::param("grid produced no triangles"));
    }
    TriMesh::new(vertices, tris)
}

fn triangle_area(p: &[Point; 3]) -> f64 {
    0.5 * (p[1] - p[0]).cross(&(p[2] - p[0])).norm()
}

pub fn area(mesh: &TriMesh) -> f64 {
    (0..mesh.triangles.len()).map(|t| triangle_area(&mesh.corners(t))).sum()
}

/// `Σ area · z_c^α` with `z_c` the centroid height of each triangle.
pub fn weighted_area(mesh: &TriMesh, alpha: f64) -> f64 {
    (0..mesh.triangles.len())
        .map(|t| {
            let p = mesh.corners(t);
            let zc = (p[0].z + p[1].z + p[2].z) / 3.0;
            triangle_area(&p) * zc.powf(alpha)
        })
        .sum()
}

/// Polygonal length of each boundary loop.
pub fn boundary_lengths(mesh: &TriMesh) -> Vec<f64> {
    mesh.boundary_loops
        .iter()
        .map(|lp| {
            (0..lp.len())
                .map(|k| (mesh.vertices[lp[(k + 1) % lp.len()]] - mesh.vertices[lp[k]]).norm())
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexRole {
    Interior,
    /// Curvature at boundary vertices uses a partial fan and is unreliable.
    Boundary,
    /// Pole of a revolution mesh: full fan but lower accuracy.
    Apex,
}

/// One value per vertex, with the role of each vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexField {
    pub values: Vec<f64>,
    pub roles: Vec<VertexRole>,
}

impl VertexField {
    /// `(vertex, value)` over interior vertices only.
    pub fn interior(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(&self.roles)
            .enumerate()
            .filter(|(_, (_, r))| **r == VertexRole::Interior)
            .map(|(i, (v, _))| (i, *v))
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.interior().fold(0.0, |m, (_, v)| m.max(v.abs()))
    }
}

fn roles(mesh: &TriMesh) -> Vec<VertexRole> {
    let mut r: Vec<VertexRole> = mesh
        .boundary_mask()
        .into_iter()
        .map(|b| if b { VertexRole::Boundary } else { VertexRole::Interior })
        .collect();
    for &a in &mesh.apexes {
        if r[a] == VertexRole::Interior {
            r[a] = VertexRole::Apex;
        }
    }
    r
}

/// Cotangent Laplacian with mixed Voronoi areas:
/// `(L g)_i = (1/A_i) Σ_j (cot a_ij + cot b_ij)/2 (g_j - g_i)`.
#[derive(Debug, Clone)]
pub struct CotanLaplacian {
    weights: Vec<Vec<(usize, f64)>>,
    mixed_area: Vec<f64>,
}

impl CotanLaplacian {
    pub fn new(mesh: &TriMesh) -> Result<Self> {
        let nv = mesh.vertices.len();
        let mut pair: Vec<HashMap<usize, f64>> = vec![HashMap::new(); nv];
        let mut mixed_area = vec![0.0; nv];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let p = mesh.corners(t);
            let twice_area = (p[1] - p[0]).cross(&(p[2] - p[0])).norm();
            let longest = (0..3)
                .map(|k| (p[(k + 1) % 3] - p[k]).norm_squared())
                .fold(0.0, f64::max);
            if !(twice_area > 1e-12 * longest) {
                return Err(Error::DegenerateGeometry(format!("triangle {t} has no area")));
            }
            let area = 0.5 * twice_area;
            let mut cot = [0.0; 3];
            for k in 0..3 {
                let u = p[(k + 1) % 3] - p[k];
                let v = p[(k + 2) % 3] - p[k];
                cot[k] = u.dot(&v) / twice_area;
            }
            for k in 0..3 {
                let (i, j) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                *pair[i].entry(j).or_insert(0.0) += 0.5 * cot[k];
                *pair[j].entry(i).or_insert(0.0) += 0.5 * cot[k];
            }
            if let Some(obtuse) = (0..3).find(|&k| cot[k] < 0.0) {
                for k in 0..3 {
                    mixed_area[tri[k]] += if k == obtuse { 0.5 * area } else { 0.25 * area };
                }
            } else {
                for k in 0..3 {
                    let (j, l) = ((k + 1) % 3, (k + 2) % 3);
                    mixed_area[tri[k]] +=
                        ((p[l] - p[k]).norm_squared() * cot[j] + (p[j] - p[k]).norm_squared() * cot[l]) / 8.0;
                }
            }
        }
        let weights = pair
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_unstable_by_key(|e| e.0);
                v
            })
            .collect();
        Ok(CotanLaplacian { weights, mixed_area })
    }

    pub fn mixed_area(&self) -> &[f64] {
        &self.mixed_area
    }

    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| w.iter().map(|&(j, c)| c * (g[j] - g[i])).sum::<f64>() / self.mixed_area[i])
            .collect()
    }

    pub fn apply_points(&self, p: &[Point]) -> Vec<Point> {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| w.iter().fold(Point::zeros(), |s, &(j, c)| s + (p[j] - p[i]) * c) / self.mixed_area[i])
            .collect()
    }
}

/// Unit normals averaged over incident triangles with corner-angle weights.
pub fn vertex_normals(mesh: &TriMesh) -> Result<Vec<Point>> {
    let mut n = vec![Point::zeros(); mesh.vertices.len()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.corners(t);
        let face = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let norm = face.norm();
        if !(norm > 0.0) {
            return Err(Error::DegenerateGeometry(format!("triangle {t} has no normal")));
        }
        let face = face / norm;
        for k in 0..3 {
            let u = p[(k + 1) % 3] - p[k];
            let v = p[(k + 2) % 3] - p[k];
            n[tri[k]] += face * u.angle(&v);
        }
    }
    Ok(n.into_iter().map(|v| v.normalize()).collect())
}

/// Discrete mean curvature `H = <L p, N>/2`.
pub fn mean_curvature(mesh: &TriMesh) -> Result<VertexField> {
    let lap = CotanLaplacian::new(mesh)?;
    let normals = vertex_normals(mesh)?;
    let lp = lap.apply_points(&mesh.vertices);
    Ok(VertexField {
        values: lp.iter().zip(&normals).map(|(l, n)| 0.5 * l.dot(n)).collect(),
        roles: roles(mesh),
    })
}

/// `H_φ = H - α N_z / (2 z)`, zero on singular minimal surfaces.
pub fn weighted_mean_curvature(mesh: &TriMesh, alpha: f64) -> Result<VertexField> {
    let h = mean_curvature(mesh)?;
    let normals = vertex_normals(mesh)?;
    let values = h
        .values
        .iter()
        .zip(&normals)
        .zip(&mesh.vertices)
        .map(|((h, n), p)| h - alpha * n.z / (2.0 * p.z))
        .collect();
    Ok(VertexField { values, roles: h.roles })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxReport {
    /// `-∮ z ν_z ds` with `ν` the inward conormal.
    pub boundary_term: f64,
    /// `∫ (1 + (α-1) N_z^2) dA`.
    pub interior_term: f64,
    pub residual: f64,
}

/// Both sides of the conormal flux identity, which holds exactly on
/// singular minimal surfaces. Boundary integral by edge midpoints,
/// interior integral with per-triangle normals.
pub fn flux_identity(mesh: &TriMesh, alpha: f64) -> Result<FluxReport> {
    if mesh.is_closed() {
        return Err(Error::NoBoundary);
    }
    let mut boundary_term = 0.0;
    for (lp, owners) in mesh.boundary_loops.iter().zip(&mesh.boundary_owners) {
        for k in 0..lp.len() {
            let (a, b) = (lp[k], lp[(k + 1) % lp.len()]);
            let tri = mesh.triangles[owners[k]];
            let c = tri.iter().copied().find(|&v| v != a && v != b).unwrap();
            let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
            let e = pb - pa;
            let len = e.norm();
            let dir = e / len;
            let w = pc - pa;
            let nu = w - dir * w.dot(&dir);
            let nu = nu
                .try_normalize(0.0)
                .ok_or_else(|| Error::DegenerateGeometry(format!("boundary edge ({a}, {b}) has a flat triangle")))?;
            boundary_term -= 0.5 * (pa.z + pb.z) * nu.z * len;
        }
    }
    let mut interior_term = 0.0;
    for t in 0..mesh.triangles.len() {
        let p = mesh.corners(t);
        let face = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let twice = face.norm();
        if twice > 0.0 {
            let nz = face.z / twice;
            interior_term += 0.5 * twice * (1.0 + (alpha - 1.0) * nz * nz);
        }
    }
    Ok(FluxReport {
        boundary_term,
        interior_term,
        residual: boundary_term - interior_term,
    })
}

/// Whether the highest vertex (α > 0) or lowest vertex (α < 0) lies on
/// the boundary, up to the longest edge length. Both for α = 0.
pub fn height_extrema_check(mesh: &TriMesh, alpha: f64) -> bool {
    let mask = mesh.boundary_mask();
    if !mask.iter().any(|&b| b) {
        return false;
    }
    let tol = mesh.max_edge_length();
    let (mut all_max, mut all_min) = (f64::NEG_INFINITY, f64::INFINITY);
    let (mut bd_max, mut bd_min) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, b) in mesh.vertices.iter().zip(&mask) {
        all_max = all_max.max(p.z);
        all_min = all_min.min(p.z);
        if *b {
            bd_max = bd_max.max(p.z);
            bd_min = bd_min.min(p.z);
        }
    }
    let max_ok = all_max <= bd_max + tol;
    let min_ok = all_min >= bd_min - tol;
    if alpha > 0.0 {
        max_ok
    } else if alpha < 0.0 {
        min_ok
    } else {
        max_ok && min_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{solve_dirichlet, DirichletProblem, Domain2D, SolveOptions};
    use crate::profiles::{solve_catenary, solve_meridian, Alpha, FnGeneratrix};
    use std::f64::consts::PI;

    fn square(z: f64, n: usize) -> TriMesh {
        let mut v = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                v.push(Point::new(i as f64 / n as f64, j as f64 / n as f64, z));
            }
        }
        let mut t = Vec::new();
        for j in 0..n {
            for i in 0..n {
                push_quad(&mut t, n + 1, i, j);
            }
        }
        TriMesh::new(v, t).unwrap()
    }

    fn sphere_cap(radius: f64, center: f64, reach: f64) -> FnGeneratrix<impl Fn(f64) -> (f64, f64)> {
        // Lower hemisphere z = c - sqrt(R^2 - x^2).
        FnGeneratrix {
            lo: 0.0,
            hi: reach,
            func: move |x: f64| {
                let s = (radius * radius - x * x).sqrt();
                (center - s, x / s)
            },
        }
    }

    #[test]
    fn square_measurements() {
        let m = square(2.0, 8);
        assert!((area(&m) - 1.0).abs() < 1e-14);
        assert!((weighted_area(&m, 1.0) - 2.0).abs() < 1e-13);
        assert!((weighted_area(&m, 0.0) - area(&m)).abs() < 1e-14);
        assert_eq!(m.boundary_loops().len(), 1);
        assert!((boundary_lengths(&m)[0] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn plane_weighted_curvature() {
        let m = square(2.0, 8);
        let h = weighted_mean_curvature(&m, 3.0).unwrap();
        for (_, v) in h.interior() {
            assert!((v + 3.0 / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_meshes() {
        let v = vec![
            Point::new(0.0, 0.0, 1.0),
            Point::new(1.0, 0.0, 1.0),
            Point::new(0.0, 1.0, 0.0),
        ];
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 2]]).is_err());
        let v = vec![
            Point::new(0.0, 0.0, 1.0),
            Point::new(1.0, 0.0, 1.0),
            Point::new(0.0, 1.0, 1.0),
            Point::new(1.0, 1.0, 1.0),
        ];
        // Second triangle reuses edge 0->1 in the same direction.
        assert!(TriMesh::new(v, vec![[0, 1, 2], [0, 1, 3]]).is_err());
    }

    #[test]
    fn flat_disk_flux() {
        let disk = FnGeneratrix {
            lo: 0.0,
            hi: 1.0,
            func: |_| (1.0, 0.0),
        };
        let m = revolve(&disk, (0.0, 1.0), 256, 32).unwrap();
        let f = flux_identity(&m, 2.5).unwrap();
        assert!(f.boundary_term.abs() < 1e-14);
        assert!((f.interior_term - 2.5 * area(&m)).abs() < 1e-12);
        assert!((area(&m) - PI).abs() < 1e-3);
    }

    #[test]
    fn closed_mesh_has_no_flux() {
        let v = vec![
            Point::new(0.0, 0.0, 1.0),
            Point::new(1.0, 0.0, 1.0),
            Point::new(0.0, 1.0, 1.0),
            Point::new(0.0, 0.0, 2.0),
        ];
        let m = TriMesh::new(v, vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]]).unwrap();
        assert!(m.is_closed());
        assert_eq!(flux_identity(&m, 1.0), Err(Error::NoBoundary));
        assert!(!height_extrema_check(&m, 1.0));
    }

    #[test]
    fn hemisphere_bottom_balances() {
        // Lower hemisphere radius 2 centered at height 3: with α = 1 the
        // weighted curvature vanishes at its lowest point z = 1.
        let cap = sphere_cap(2.0, 3.0, 1.5);
        let m = revolve(&cap, (0.0, 1.5), 128, 48).unwrap();
        let h = weighted_mean_curvature(&m, 1.0).unwrap();
        assert_eq!(h.roles[0], VertexRole::Apex);
        assert!(h.values[0].abs() < 1e-2, "{}", h.values[0]);
        let mc = mean_curvature(&m).unwrap();
        for (_, v) in mc.interior() {
            assert!((v - 0.5).abs() < 5e-3);
        }
    }

    #[test]
    fn revolve_range_checks() {
        let cap = sphere_cap(2.0, 3.0, 1.5);
        assert!(revolve(&cap, (1.0, 1.0), 16, 16).is_err());
        assert!(revolve(&cap, (0.0, 1.9), 16, 16).is_err());
        assert!(revolve(&cap, (0.0, 1.0), 4, 16).is_err());
        let ring = revolve(&cap, (0.5, 1.0), 16, 16).unwrap();
        assert_eq!(ring.boundary_loops().len(), 2);
    }

    #[test]
    fn extruded_catenary() {
        let p = solve_catenary(Alpha::new(1.0).unwrap(), 1.0, 1.0, 1e-11).unwrap();
        let m = extrude(&p, (-1.0, 1.0), (0.0, 1.0), 64, 8).unwrap();
        assert_eq!(m.boundary_loops().len(), 1);
        // f = cosh, so the arc length over [-1, 1] is 2 sinh(1).
        assert!((area(&m) - 2.0 * 1f64.sinh()).abs() < 1e-3);
        let h = weighted_mean_curvature(&m, 1.0).unwrap();
        assert!(h.max_abs_interior() < 1e-3);
        assert!(extrude(&p, (0.0, 0.0), (0.0, 1.0), 8, 8).is_err());
    }

    #[test]
    fn graph_mesh_planes() {
        // Mesh plumbing only: fill the unknowns with the tilted plane u = x + 1.
        let d = Domain2D::rectangle(0.0, 1.0, 0.0, 1.0, 16, 16).unwrap();
        let problem = DirichletProblem::new(Alpha::new(1.0).unwrap(), &d, |x, _| 1.0 + x).unwrap();
        let unknowns = problem.unknown_positions().iter().map(|p| 1.0 + p.0).collect();
        let s = GraphSolution {
            problem,
            unknowns,
            residual_norm: 0.0,
            iterations: 0,
            history: vec![],
        };
        let m = graph_mesh(&s).unwrap();
        assert!((area(&m) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.boundary_loops().len(), 1);
        assert!((boundary_lengths(&m)[0] - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn graph_mesh_disk_is_a_disk() {
        for n in [16, 17, 31, 64] {
            let d = Domain2D::disk(0.0, 0.0, 1.0, n, n).unwrap();
            let s = solve_dirichlet(Alpha::new(-2.0).unwrap(), &d, |_, _| 2.0, &SolveOptions::default()).unwrap();
            let m = graph_mesh(&s).unwrap();
            assert_eq!(m.boundary_loops().len(), 1, "n = {n}");
            assert!(height_extrema_check(&m, -2.0));
            let exact = 2.0 * PI * (5.0 - 2.0 * 5f64.sqrt());
            assert!((area(&m) - exact).abs() / exact < 2e-2, "n = {n}: {}", area(&m));
        }
    }

    #[test]
    fn cap_extrema_and_flux() {
        let a = Alpha::new(1.0).unwrap();
        let mer = solve_meridian(a, 1.0, 1.0, 1e-11).unwrap();
        let m = revolve(&mer, (0.0, 1.0), 128, 64).unwrap();
        assert!(height_extrema_check(&m, 1.0));
        let f = flux_identity(&m, 1.0).unwrap();
        assert!((f.residual / f.interior_term).abs() < 1e-2);
        assert!((f.interior_term - area(&m)).abs() < 1e-12);
    }
}
