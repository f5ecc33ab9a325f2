//! Structured meshes of an interval or a rectangle (optionally with
//! rectangular holes) carrying zero Dirichlet data.
//!
//! Unknowns live at interior nodes. The gradient term is integrated with one
//! point per cell; the zero-order term with nodal weights obtained by
//! splitting every cell's measure equally among its interior corners, so
//! constants integrate exactly.

use std::io::Write;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::young::NodalQuadrature;

/// One squared difference `coeff · (u[to] − u[from])²` entering a cell's
/// `|∇u|²`. `None` marks a boundary node, where `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diff {
    pub from: Option<usize>,
    pub to: Option<usize>,
    pub coeff: f64,
}

impl Diff {
    #[inline]
    pub fn eval(&self, u: &[f64]) -> f64 {
        let a = self.from.map_or(0.0, |i| u[i]);
        let b = self.to.map_or(0.0, |i| u[i]);
        b - a
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub volume: f64,
    diffs: [Diff; 4],
    len: u8,
}

impl Cell {
    pub fn diffs(&self) -> &[Diff] {
        &self.diffs[..self.len as usize]
    }

    /// `|∇u|` on this cell.
    #[inline]
    pub fn gradient(&self, u: &[f64]) -> f64 {
        self.diffs().iter().map(|d| d.coeff * d.eval(u).powi(2)).sum::<f64>().sqrt()
    }
}

/// Axis-aligned rectangular hole `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Hole {
    fn contains(&self, x: f64, y: f64) -> bool {
        let eps = 1e-12 * (1.0 + self.x1.abs().max(self.y1.abs()));
        x >= self.x0 - eps && x <= self.x1 + eps && y >= self.y0 - eps && y <= self.y1 + eps
    }

    fn distance(&self, x: f64, y: f64) -> f64 {
        let dx = (self.x0 - x).max(0.0).max(x - self.x1);
        let dy = (self.y0 - y).max(0.0).max(y - self.y1);
        dx.hypot(dy)
    }
}

/// Serializable mesh description: `{dim, extents, counts, holes?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub dim: usize,
    pub extents: Vec<f64>,
    pub counts: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Hole>,
}

impl MeshSpec {
    pub fn build(&self) -> Result<Mesh> {
        let (ne, nc) = (self.extents.len(), self.counts.len());
        if ne != self.dim || nc != self.dim {
            return Err(Error::InvalidMesh(format!("dim = {} but {ne} extents and {nc} counts given", self.dim)));
        }
        match self.dim {
            1 => {
                if !self.holes.is_empty() {
                    return Err(Error::InvalidMesh("holes are only supported in 2D".into()));
                }
                Mesh::interval(self.extents[0], self.counts[0])
            }
            2 => Mesh::rectangle_with_holes(
                self.extents[0],
                self.extents[1],
                self.counts[0],
                self.counts[1],
                self.holes.clone(),
            ),
            d => Err(Error::InvalidMesh(format!("dim must be 1 or 2, got {d}"))),
        }
    }
}

/// A 1D or 2D structured Dirichlet mesh.
#[derive(Debug, Clone)]
pub struct Mesh {
    dim: usize,
    extents: Vec<f64>,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    holes: Vec<Hole>,
    /// Grid node (row-major, x fastest) to unknown index.
    node_to_unknown: Vec<Option<usize>>,
    unknown_to_node: Vec<usize>,
    weights: Vec<f64>,
    cells: Vec<Cell>,
    bandwidth: usize,
    inner_radius: f64,
}

impl Mesh {
    /// `Ω = (0, length)` split into `cells` cells.
    pub fn interval(length: f64, cells: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidMesh(format!("extent must be positive, got {length}")));
        }
        if cells < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 cells, got {cells}")));
        }
        let h = length / cells as f64;
        let node_to_unknown: Vec<Option<usize>> = (0..=cells).map(|k| (k > 0 && k < cells).then(|| k - 1)).collect();
        let mut mesh = Mesh {
            dim: 1,
            extents: vec![length],
            counts: vec![cells],
            spacing: vec![h],
            holes: Vec::new(),
            unknown_to_node: (1..cells).collect(),
            node_to_unknown,
            weights: Vec::new(),
            cells: Vec::new(),
            bandwidth: 1,
            inner_radius: 0.5 * length,
        };
        mesh.cells = (0..cells)
            .map(|c| {
                let d = Diff { from: mesh.node_to_unknown[c], to: mesh.node_to_unknown[c + 1], coeff: 1.0 / (h * h) };
                Cell { volume: h, diffs: [d; 4], len: 1 }
            })
            .collect();
        mesh.finish();
        Ok(mesh)
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::rectangle_with_holes(lx, ly, nx, ny, Vec::new())
    }

    /// Rectangle `(0, lx) × (0, ly)` minus closed rectangular holes. Nodes in
    /// a hole are boundary nodes.
    pub fn rectangle_with_holes(lx: f64, ly: f64, nx: usize, ny: usize, holes: Vec<Hole>) -> Result<Self> {
        for (name, l) in [("x", lx), ("y", ly)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidMesh(format!("{name}-extent must be positive, got {l}")));
            }
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidMesh(format!("need at least 2 cells per axis, got {nx}×{ny}")));
        }
        for h in &holes {
            if !(h.x0 < h.x1 && h.y0 < h.y1 && h.x0 >= 0.0 && h.y0 >= 0.0 && h.x1 <= lx && h.y1 <= ly) {
                return Err(Error::InvalidMesh(format!("hole {h:?} is empty or leaves the rectangle")));
            }
        }
        let (hx, hy) = (lx / nx as f64, ly / ny as f64);
        let mut node_to_unknown = vec![None; (nx + 1) * (ny + 1)];
        let mut unknown_to_node = Vec::new();
        for j in 1..ny {
            for i in 1..nx {
                let (x, y) = (i as f64 * hx, j as f64 * hy);
                if holes.iter().any(|h| h.contains(x, y)) {
                    continue;
                }
                let node = j * (nx + 1) + i;
                node_to_unknown[node] = Some(unknown_to_node.len());
                unknown_to_node.push(node);
            }
        }
        if unknown_to_node.is_empty() {
            return Err(Error::InvalidMesh("no interior nodes".into()));
        }
        let (cx, cy) = (0.5 / (hx * hx), 0.5 / (hy * hy));
        let id = |i: usize, j: usize| node_to_unknown[j * (nx + 1) + i];
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                let diffs = [
                    Diff { from: a, to: b, coeff: cx },
                    Diff { from: c, to: d, coeff: cx },
                    Diff { from: a, to: c, coeff: cy },
                    Diff { from: b, to: d, coeff: cy },
                ];
                cells.push(Cell { volume: hx * hy, diffs, len: 4 });
            }
        }
        let mut mesh = Mesh {
            dim: 2,
            extents: vec![lx, ly],
            counts: vec![nx, ny],
            spacing: vec![hx, hy],
            holes,
            node_to_unknown,
            unknown_to_node,
            weights: Vec::new(),
            cells,
            bandwidth: 0,
            inner_radius: 0.0,
        };
        mesh.inner_radius = if mesh.holes.is_empty() { 0.5 * lx.min(ly) } else { mesh.sampled_inner_radius() };
        mesh.finish();
        Ok(mesh)
    }

    fn finish(&mut self) {
        let mut w = vec![0.0; self.unknown_to_node.len()];
        let mut bw = 0;
        for c in &self.cells {
            let mut corners: Vec<usize> = c.diffs().iter().flat_map(|d| [d.from, d.to]).flatten().collect();
            corners.sort_unstable();
            corners.dedup();
            if let (Some(lo), Some(hi)) = (corners.first(), corners.last()) {
                bw = bw.max(hi - lo);
            }
            for &k in &corners {
                w[k] += c.volume / corners.len() as f64;
            }
        }
        self.weights = w;
        self.bandwidth = bw.max(1);
    }

    /// Distance from `(x, y)` to the complement of Ω.
    fn distance_to_boundary(&self, p: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for (k, &x) in p.iter().enumerate() {
            d = d.min(x).min(self.extents[k] - x);
        }
        if self.dim == 2 {
            for h in &self.holes {
                d = d.min(h.distance(p[0], p[1]));
            }
        }
        d.max(0.0)
    }

    /// Largest inscribed radius, sampled on a grid four times finer than
    /// the mesh when there are holes.
    fn sampled_inner_radius(&self) -> f64 {
        let (nx, ny) = (4 * self.counts[0], 4 * self.counts[1]);
        let mut best = 0.0f64;
        for j in 0..=ny {
            for i in 0..=nx {
                let p = [self.extents[0] * i as f64 / nx as f64, self.extents[1] * j as f64 / ny as f64];
                best = best.max(self.distance_to_boundary(&p));
            }
        }
        best
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Number of interior nodes (unknowns).
    pub fn len(&self) -> usize {
        self.unknown_to_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unknown_to_node.is_empty()
    }

    /// `|Ω|` as seen by the quadrature.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Half-bandwidth of the stiffness matrix in unknown numbering.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn node_count(&self) -> usize {
        self.node_to_unknown.len()
    }

    pub fn unknown_of_node(&self, node: usize) -> Option<usize> {
        self.node_to_unknown[node]
    }

    pub fn node_of_unknown(&self, k: usize) -> usize {
        self.unknown_to_node[k]
    }

    /// Coordinates of grid node `node`.
    pub fn node_coords(&self, node: usize) -> Vec<f64> {
        match self.dim {
            1 => vec![node as f64 * self.spacing[0]],
            _ => {
                let nx1 = self.counts[0] + 1;
                vec![(node % nx1) as f64 * self.spacing[0], (node / nx1) as f64 * self.spacing[1]]
            }
        }
    }

    /// Coordinates of every unknown.
    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        self.unknown_to_node.iter().map(|&n| self.node_coords(n)).collect()
    }

    /// Samples `f` at the interior nodes.
    pub fn field_from_fn<F: Fn(&[f64]) -> f64>(&self, f: F) -> ScalarField {
        ScalarField::new(self.unknown_to_node.iter().map(|&n| f(&self.node_coords(n))).collect())
    }

    pub fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: u.len() });
        }
        Ok(())
    }

    /// Writes `coords…, u` for every grid node, boundary nodes included.
    pub fn write_csv<W: Write>(&self, u: &[f64], mut out: W) -> Result<()> {
        self.check(u)?;
        let header = if self.dim == 1 { "x,u" } else { "x,y,u" };
        writeln!(out, "{header}")?;
        for node in 0..self.node_count() {
            let v = self.node_to_unknown[node].map_or(0.0, |k| u[k]);
            let coords: Vec<String> = self.node_coords(node).iter().map(|c| c.to_string()).collect();
            writeln!(out, "{},{}", coords.join(","), v)?;
        }
        Ok(())
    }

    pub fn spec(&self) -> MeshSpec {
        MeshSpec {
            dim: self.dim,
            extents: self.extents.clone(),
            counts: self.counts.clone(),
            holes: self.holes.clone(),
        }
    }
}

impl NodalQuadrature for Mesh {
    fn node_weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Nodal values of a field at the interior nodes of a mesh; zero on the
/// boundary and outside Ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn zeros(n: usize) -> Self {
        ScalarField { values: vec![0.0; n] }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ScalarField { values: vec![c; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        ScalarField { values: self.values.iter().map(|v| c * v).collect() }
    }
}

impl Deref for ScalarField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for ScalarField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(values: Vec<f64>) -> Self {
        ScalarField { values }
    }
}

/// `|∇u|` on every cell.
pub fn cell_gradient_magnitudes(u: &[f64], m: &Mesh) -> Result<Vec<f64>> {
    m.check(u)?;
    Ok(m.cells.iter().map(|c| c.gradient(u)).collect())
}

/// A field equal to 1 on the ball `B_r(center)` that falls linearly to 0
/// over an annulus of width `0.95·(dist(center, ∂Ω) − r)`; every discrete
/// gradient is below 1. The center defaults to the middle of the bounding
/// box.
pub fn bump_field(m: &Mesh, r: f64, center: Option<&[f64]>) -> Result<ScalarField> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument { name: "r", reason: format!("must be positive, got {r}") });
    }
    if r >= m.inner_radius {
        return Err(Error::Geometry(format!("plateau radius {r} is not below the inner radius {}", m.inner_radius)));
    }
    let mid: Vec<f64> = m.extents.iter().map(|e| 0.5 * e).collect();
    let c = center.unwrap_or(&mid);
    if c.len() != m.dim {
        return Err(Error::DimensionMismatch { expected: m.dim, found: c.len() });
    }
    let room = m.distance_to_boundary(c);
    let width = 0.95 * (room - r);
    if !(width > 1.0) {
        return Err(Error::Geometry(format!(
            "no transition of width > 1 fits between the plateau (radius {r}) and the boundary at distance {room}"
        )));
    }
    let u = m.field_from_fn(|x| {
        let d = x.iter().zip(c).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        ((r + width - d) / width).clamp(0.0, 1.0)
    });
    let gmax = cell_gradient_magnitudes(&u, m)?.into_iter().fold(0.0, f64::max);
    if gmax >= 1.0 {
        return Err(Error::Geometry(format!("discrete gradient {gmax} of the bump is not below 1")));
    }
    Ok(u)
}
