//! Triangulated export of the surfaces the solvers produce.
//!
//! Everything is written as plain text — OBJ by default, ASCII PLY on
//! request — positions and faces only, diffable, loads in any viewer.
//! Coordinates are the model
//! coordinates of each surface: disk-model (x, y) × height for catenoids,
//! graphs, and annuli; upper half-plane (x, y) × height for tall rectangles.
//! Writers format with fixed precision so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::annulussolver::AnnulusSolution;
use crate::catenoid::Catenoid;
use crate::error::{Error, Result};
use crate::graphsolver::GraphSolution;
use crate::tallrect::TallRectangle;

/// Indexed triangle mesh; faces are 0-based here, 1-based in the OBJ text.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

/// Text formats the writers emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl TriMesh {
    /// Builds a structured rows × cols lattice with `pos(row, col)` vertices
    /// and two triangles per cell. `wrap_cols` closes the column direction
    /// into a ring (col index taken mod `cols`).
    fn lattice(rows: usize, cols: usize, wrap_cols: bool, pos: impl Fn(usize, usize) -> [f64; 3]) -> TriMesh {
        let vcols = if wrap_cols { cols } else { cols + 1 };
        let mut vertices = Vec::with_capacity(rows.saturating_add(1) * vcols);
        for k in 0..=rows {
            for j in 0..vcols {
                vertices.push(pos(k, j));
            }
        }
        let vid = |k: usize, j: usize| k * vcols + (j % vcols);
        let mut faces = Vec::with_capacity(2 * rows * cols);
        for k in 0..rows {
            for j in 0..cols {
                let (a, b, c, d) = (vid(k, j), vid(k, j + 1), vid(k + 1, j + 1), vid(k + 1, j));
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        TriMesh { vertices, faces }
    }

    /// Renders the OBJ text.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:.9} {:.9} {:.9}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        out
    }

    pub fn save_obj(&self, path: impl AsRef<Path>) -> Result<()> {
        self.save(path, MeshFormat::Obj)
    }

    /// Renders ASCII PLY with the same fixed-precision coordinates.
    pub fn to_ply(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ply\nformat ascii 1.0");
        let _ = writeln!(out, "element vertex {}", self.vertices.len());
        let _ = writeln!(out, "property double x\nproperty double y\nproperty double z");
        let _ = writeln!(out, "element face {}", self.faces.len());
        let _ = writeln!(out, "property list uchar int vertex_indices\nend_header");
        for v in &self.vertices {
            let _ = writeln!(out, "{:.9} {:.9} {:.9}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>, format: MeshFormat) -> Result<()> {
        let text = match format {
            MeshFormat::Obj => self.to_obj(),
            MeshFormat::Ply => self.to_ply(),
        };
        let mut file = std::fs::File::create(path)?;
        file.write_all(text.as_bytes())?;
        Ok(())
    }

    /// Checks that every face references an existing vertex.
    pub fn indices_valid(&self) -> bool {
        let n = self.vertices.len();
        self.faces.iter().all(|f| f.iter().all(|&i| i < n))
    }
}

/// Surface of revolution of a catenoid profile: `nt` height intervals,
/// `ntheta` sectors, closed in the angular direction.
pub fn catenoid_mesh(cat: &Catenoid, nt: usize, ntheta: usize) -> Result<TriMesh> {
    if nt < 2 || ntheta < 3 {
        return Err(Error::domain("catenoid mesh needs nt ≥ 2 and ntheta ≥ 3"));
    }
    let profile = cat.profile(nt + 1)?;
    let dtheta = std::f64::consts::TAU / ntheta as f64;
    Ok(TriMesh::lattice(nt, ntheta, true, |k, j| {
        let (r, t) = (profile.r[k], profile.t[k]);
        let theta = j as f64 * dtheta;
        [r * theta.cos(), r * theta.sin(), t]
    }))
}

/// Height surface of a minimal graph over its polar grid. Disk solutions
/// get an apex fan at the collapsed origin ring instead of degenerate quads.
pub fn graph_mesh(sol: &GraphSolution) -> TriMesh {
    let rings = sol.radii.len() - 1;
    let sectors = sol.sectors;
    let dtheta = std::f64::consts::TAU / sectors as f64;
    let node = |ring: usize, j: usize| -> [f64; 3] {
        let r = sol.radii[ring];
        let theta = j as f64 * dtheta;
        [r * theta.cos(), r * theta.sin(), sol.value(ring, j)]
    };
    if sol.radii[0] > 0.0 {
        return TriMesh::lattice(rings, sectors, true, node);
    }
    // Disk: rings 1..=N form the lattice, the origin becomes one apex vertex.
    let mut mesh = TriMesh::lattice(rings - 1, sectors, true, |k, j| node(k + 1, j));
    let apex = mesh.vertices.len();
    mesh.vertices.push([0.0, 0.0, sol.value(0, 0)]);
    for j in 0..sectors {
        mesh.faces.push([apex, j % sectors, (j + 1) % sectors]);
    }
    mesh
}

/// Immersed minimal annulus in disk-model coordinates, closed angularly.
///
/// Solutions computed in a symmetric sector are unfolded to the full
/// annulus (the stored heights repeat with period `sectors / symmetry`).
pub fn annulus_mesh(sol: &AnnulusSolution) -> TriMesh {
    let rows = sol.chart.t_intervals();
    let cols = sol.chart.sectors;
    TriMesh::lattice(rows, cols, true, |k, j| sol.node_position(k, j))
}

/// Tall rectangle bi-graph over the half-plane window u ∈ [r, 1/r],
/// θ ∈ [theta_min, θ0]: upper half, seam ring at height 0, mirrored lower
/// half — the seam row is emitted once and shared by both halves.
pub fn tallrect_mesh(
    rect: &TallRectangle,
    r: f64,
    theta_min: f64,
    nu: usize,
    ntheta: usize,
) -> Result<TriMesh> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain("tall rectangle window radius must lie in (0, 1)"));
    }
    if !(theta_min > 0.0 && theta_min < rect.theta0()) {
        return Err(Error::domain("tall rectangle window angle must lie in (0, θ0)"));
    }
    if nu < 1 || ntheta < 2 {
        return Err(Error::domain("tall rectangle mesh needs nu ≥ 1 and ntheta ≥ 2"));
    }
    let theta0 = rect.theta0();
    // Row angles sweep θ: theta_min → θ0 (upper half) → theta_min (mirror).
    let mut heights = Vec::with_capacity(2 * ntheta + 1);
    for i in 0..=2 * ntheta {
        let (theta, sign) = if i <= ntheta {
            (
                theta_min + (theta0 - theta_min) * i as f64 / ntheta as f64,
                1.0,
            )
        } else {
            (
                theta_min + (theta0 - theta_min) * (2 * ntheta - i) as f64 / ntheta as f64,
                -1.0,
            )
        };
        // The exact endpoint keeps the seam at height exactly 0.
        let theta = if i == ntheta { theta0 } else { theta };
        let lam = rect.half_height_at(theta)?.value;
        heights.push((theta, sign * lam));
    }
    // Log-spaced u runs from r to 1/r (symmetric about u = 1).
    let log_r = r.ln();
    Ok(TriMesh::lattice(2 * ntheta, nu, false, |k, j| {
        let (theta, t) = heights[k];
        let u = (log_r * (1.0 - 2.0 * j as f64 / nu as f64)).exp();
        [u * theta.cos(), u * theta.sin(), t]
    }))
}
