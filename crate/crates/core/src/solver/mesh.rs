use std::f64::consts::PI;

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::domain::{norm, DomainSpec};
use super::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Free,
    /// Dirichlet node on the outer boundary.
    Outer,
    /// Node on the excised circle of the given singularity.
    Hole(usize),
}

/// Log-polar rings `r_k = ρ·2^{k/m}` around one singularity; ring 0 is the excised circle.
#[derive(Clone, Debug)]
pub struct Patch {
    pub center: [f64; 2],
    pub radii: Vec<f64>,
    pub n_theta: usize,
    /// Logarithmic ring spacing `ln 2 / m`.
    pub ds: f64,
    pub first_node: usize,
    pub first_triangle: usize,
}

impl Patch {
    pub fn rings(&self) -> usize {
        self.radii.len()
    }

    pub fn node(&self, ring: usize, j: usize) -> usize {
        self.first_node + ring * self.n_theta + j % self.n_theta
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().expect("patch has rings")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub node: u32,
    pub edge: u32,
    pub weight: f64,
    /// Whether the node is the first endpoint of the edge.
    pub first: bool,
}

/// Hybrid mesh of a punctured domain: conformal polar patches around the singularities
/// and a constrained Delaunay triangulation of the remaining region with P1 weights.
#[derive(Clone, Debug)]
pub struct Mesh {
    pub points: Vec<[f64; 2]>,
    pub kind: Vec<NodeKind>,
    pub patches: Vec<Patch>,
    pub first_boundary: usize,
    pub first_grid: usize,
    pub edges: Vec<[u32; 2]>,
    pub weights: Vec<f64>,
    pub triangles: Vec<[u32; 3]>,
    offsets: Vec<u32>,
    neighbors: Vec<Neighbor>,
    locator: Locator,
}

fn cot(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let u = [a[0] - o[0], a[1] - o[1]];
    let v = [b[0] - o[0], b[1] - o[1]];
    (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]).abs()
}

/// Number of rings per doubling of the radius for `n_theta` points per ring.
pub fn rings_per_octave(n_theta: usize) -> usize {
    ((2f64.ln() * n_theta as f64 / (2.0 * PI)).round() as usize).max(1)
}

impl Mesh {
    pub fn build(d: &DomainSpec) -> Result<Self, SolverError> {
        d.validate()?;
        let n_theta = d.n_theta();
        let h = d.h;
        let mut points = Vec::new();
        let mut kind = Vec::new();
        let mut patches = Vec::new();
        let m = rings_per_octave(n_theta);
        let ds = 2f64.ln() / m as f64;
        for (i, s) in d.singularities.iter().enumerate() {
            let r_out = d.patch_radius_of(i);
            let k_max = ((r_out / d.rho).ln() / ds + 1e-9).floor().max(0.0) as usize;
            let radii: Vec<f64> = (0..=k_max).map(|k| d.rho * (k as f64 * ds).exp()).collect();
            let first_node = points.len();
            for (k, r) in radii.iter().enumerate() {
                for j in 0..n_theta {
                    let t = 2.0 * PI * j as f64 / n_theta as f64;
                    points.push([s.center[0] + r * t.cos(), s.center[1] + r * t.sin()]);
                    kind.push(if k == 0 { NodeKind::Hole(i) } else { NodeKind::Free });
                }
            }
            patches.push(Patch { center: s.center, radii, n_theta, ds, first_node, first_triangle: 0 });
        }
        let first_boundary = points.len();
        let boundary = d.boundary.sample(h);
        for p in &boundary {
            points.push(*p);
            kind.push(NodeKind::Outer);
        }
        let first_grid = points.len();
        let (lo, hi) = d.boundary.bounding_box();
        let (i0, i1) = ((lo[0] / h).floor() as i64, (hi[0] / h).ceil() as i64);
        let (j0, j1) = ((lo[1] / h).floor() as i64, (hi[1] / h).ceil() as i64);
        for j in j0..=j1 {
            for i in i0..=i1 {
                let p = [i as f64 * h, j as f64 * h];
                if !d.boundary.contains(p) || d.boundary.distance(p) < 0.5 * h {
                    continue;
                }
                if patches.iter().any(|pa| norm([p[0] - pa.center[0], p[1] - pa.center[1]]) < pa.outer_radius() + 0.5 * h) {
                    continue;
                }
                points.push(p);
                kind.push(NodeKind::Free);
            }
        }

        // constrained triangulation of the region outside the patches
        let mut cdt_nodes: Vec<usize> = Vec::new();
        let mut constraints: Vec<[usize; 2]> = Vec::new();
        for pa in &patches {
            let start = cdt_nodes.len();
            let ring = pa.rings() - 1;
            for j in 0..n_theta {
                cdt_nodes.push(pa.node(ring, j));
                constraints.push([start + j, start + (j + 1) % n_theta]);
            }
        }
        let start = cdt_nodes.len();
        let nb = boundary.len();
        for k in 0..nb {
            cdt_nodes.push(first_boundary + k);
            constraints.push([start + k, start + (k + 1) % nb]);
        }
        cdt_nodes.extend(first_grid..points.len());
        let verts: Vec<Point2<f64>> = cdt_nodes.iter().map(|&v| Point2::new(points[v][0], points[v][1])).collect();
        let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(verts, constraints)
            .map_err(|e| SolverError::InvalidDomain(format!("triangulation failed: {e:?}")))?;
        if cdt.num_vertices() != cdt_nodes.len() {
            return Err(SolverError::InvalidDomain("coincident mesh vertices".into()));
        }

        let mut triangles = Vec::new();
        let mut raw: Vec<(u32, u32, f64)> = Vec::new();
        for pa in patches.iter_mut() {
            pa.first_triangle = triangles.len();
            let k_max = pa.rings() - 1;
            let dt = 2.0 * PI / n_theta as f64;
            for k in 0..=k_max {
                for j in 0..n_theta {
                    let a = pa.node(k, j);
                    let b = pa.node(k, j + 1);
                    if k_max > 0 {
                        let half = if k == 0 || k == k_max { 0.5 } else { 1.0 };
                        raw.push((a as u32, b as u32, half * pa.ds / dt));
                    }
                    if k < k_max {
                        let (c, e) = (pa.node(k + 1, j + 1), pa.node(k + 1, j));
                        raw.push((a as u32, e as u32, dt / pa.ds));
                        triangles.push([a as u32, b as u32, c as u32]);
                        triangles.push([a as u32, c as u32, e as u32]);
                    }
                }
            }
        }
        let first_cdt_triangle = triangles.len();
        for f in cdt.inner_faces() {
            let [a, b, c] = f.vertices().map(|v| cdt_nodes[v.fix().index()]);
            let (pa, pb, pc) = (points[a], points[b], points[c]);
            let g = [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0];
            if !d.boundary.contains(g) {
                continue;
            }
            if patches.iter().any(|p| norm([g[0] - p.center[0], g[1] - p.center[1]]) < p.outer_radius()) {
                continue;
            }
            triangles.push([a as u32, b as u32, c as u32]);
            raw.push((b as u32, c as u32, 0.5 * cot(pa, pb, pc)));
            raw.push((c as u32, a as u32, 0.5 * cot(pb, pc, pa)));
            raw.push((a as u32, b as u32, 0.5 * cot(pc, pa, pb)));
        }

        let (edges, weights, offsets, neighbors) = assemble(points.len(), raw);
        let locator = Locator::new(&points, &triangles[first_cdt_triangle..], first_cdt_triangle, 2.0 * h);
        Ok(Mesh { points, kind, patches, first_boundary, first_grid, edges, weights, triangles, offsets, neighbors, locator })
    }

    /// Periodic grid on `𝕊¹ × [0, length]` with `n_theta` columns and square cells of
    /// angular size `2π/n_theta`; row 0 is tagged `Hole(0)`, the last row `Outer`.
    /// Points hold `(θ, t)`.
    pub fn cylinder(n_theta: usize, length: f64) -> Self {
        let dt_theta = 2.0 * PI / n_theta as f64;
        let rows = ((length / dt_theta).round() as usize).max(1) + 1;
        let dt = length / (rows - 1) as f64;
        let mut points = Vec::with_capacity(rows * n_theta);
        let mut kind = Vec::with_capacity(rows * n_theta);
        for r in 0..rows {
            for j in 0..n_theta {
                points.push([j as f64 * dt_theta, r as f64 * dt]);
                kind.push(if r == 0 {
                    NodeKind::Hole(0)
                } else if r == rows - 1 {
                    NodeKind::Outer
                } else {
                    NodeKind::Free
                });
            }
        }
        let node = |r: usize, j: usize| (r * n_theta + j % n_theta) as u32;
        let mut raw = Vec::new();
        for r in 0..rows {
            let half = if r == 0 || r == rows - 1 { 0.5 } else { 1.0 };
            for j in 0..n_theta {
                raw.push((node(r, j), node(r, j + 1), half * dt / dt_theta));
                if r + 1 < rows {
                    raw.push((node(r, j), node(r + 1, j), dt_theta / dt));
                }
            }
        }
        let (edges, weights, offsets, neighbors) = assemble(points.len(), raw);
        let locator = Locator::new(&points, &[], 0, 1.0);
        Mesh {
            points,
            kind,
            patches: Vec::new(),
            first_boundary: (rows - 1) * n_theta,
            first_grid: rows * n_theta,
            edges,
            weights,
            triangles: Vec::new(),
            offsets,
            neighbors,
            locator,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn neighbors(&self, p: usize) -> &[Neighbor] {
        &self.neighbors[self.offsets[p] as usize..self.offsets[p + 1] as usize]
    }

    pub fn is_fixed(&self, p: usize) -> bool {
        self.kind[p] != NodeKind::Free
    }

    pub fn triangle_points(&self, t: usize) -> [[f64; 2]; 3] {
        self.triangles[t].map(|v| self.points[v as usize])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| tri_area(self.triangle_points(t))).sum()
    }

    /// Triangle containing `p` with barycentric coordinates.
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        for pa in &self.patches {
            let v = [p[0] - pa.center[0], p[1] - pa.center[1]];
            let r = norm(v);
            if r >= pa.radii[0] && r <= pa.outer_radius() && pa.rings() > 1 {
                // straight triangles deviate from the arcs, so look at the adjacent cells too
                let k = (((r / pa.radii[0]).ln() / pa.ds).floor() as usize).min(pa.rings() - 2);
                let t = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
                let j = ((t / (2.0 * PI) * pa.n_theta as f64).floor() as usize).min(pa.n_theta - 1);
                for kk in k.saturating_sub(1)..=(k + 1).min(pa.rings() - 2) {
                    for jj in [j, j + 1, j + pa.n_theta - 1] {
                        let base = pa.first_triangle + 2 * (kk * pa.n_theta + jj % pa.n_theta);
                        for t in [base, base + 1] {
                            if let Some(b) = barycentric(self.triangle_points(t), p, 1e-9) {
                                return Some((t, b));
                            }
                        }
                    }
                }
            }
        }
        self.locator.find(self, p)
    }
}

type Assembled = (Vec<[u32; 2]>, Vec<f64>, Vec<u32>, Vec<Neighbor>);

/// Merges duplicate edges, clamps negative weights and builds the adjacency lists.
fn assemble(n: usize, mut raw: Vec<(u32, u32, f64)>) -> Assembled {
    for e in raw.iter_mut() {
        if e.0 > e.1 {
            std::mem::swap(&mut e.0, &mut e.1);
        }
    }
    raw.sort_by_key(|e| (e.0, e.1));
    let mut edges: Vec<[u32; 2]> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (a, b, w) in raw {
        if edges.last() == Some(&[a, b]) {
            *weights.last_mut().expect("nonempty") += w;
        } else {
            edges.push([a, b]);
            weights.push(w);
        }
    }
    for w in weights.iter_mut() {
        *w = w.max(0.0);
    }
    let mut offsets = vec![0u32; n + 1];
    for e in &edges {
        offsets[e[0] as usize + 1] += 1;
        offsets[e[1] as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut neighbors = vec![Neighbor { node: 0, edge: 0, weight: 0.0, first: true }; 2 * edges.len()];
    for (k, (e, &w)) in edges.iter().zip(&weights).enumerate() {
        let (a, b) = (e[0] as usize, e[1] as usize);
        neighbors[fill[a] as usize] = Neighbor { node: b as u32, edge: k as u32, weight: w, first: true };
        fill[a] += 1;
        neighbors[fill[b] as usize] = Neighbor { node: a as u32, edge: k as u32, weight: w, first: false };
        fill[b] += 1;
    }
    (edges, weights, offsets, neighbors)
}

pub(crate) fn tri_area(t: [[f64; 2]; 3]) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0])).abs()
}

fn barycentric(t: [[f64; 2]; 3], p: [f64; 2], tol: f64) -> Option<[f64; 3]> {
    let det = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[1][1] - t[0][1]) * (t[2][0] - t[0][0]);
    let l1 = ((p[0] - t[0][0]) * (t[2][1] - t[0][1]) - (p[1] - t[0][1]) * (t[2][0] - t[0][0])) / det;
    let l2 = ((t[1][0] - t[0][0]) * (p[1] - t[0][1]) - (t[1][1] - t[0][1]) * (p[0] - t[0][0])) / det;
    let l0 = 1.0 - l1 - l2;
    (l0 >= -tol && l1 >= -tol && l2 >= -tol).then_some([l0, l1, l2])
}

/// Uniform buckets over the triangulated region.
#[derive(Clone, Debug)]
struct Locator {
    lo: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl Locator {
    fn new(points: &[[f64; 2]], tris: &[[u32; 3]], first: usize, cell: f64) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for t in tris {
            for &v in t {
                for d in 0..2 {
                    lo[d] = lo[d].min(points[v as usize][d]);
                    hi[d] = hi[d].max(points[v as usize][d]);
                }
            }
        }
        if tris.is_empty() {
            lo = [0.0; 2];
            hi = [0.0; 2];
        }
        let nx = (((hi[0] - lo[0]) / cell).ceil() as usize).max(1);
        let ny = (((hi[1] - lo[1]) / cell).ceil() as usize).max(1);
        let range = |t: &[u32; 3]| {
            let xs = t.map(|v| points[v as usize][0]);
            let ys = t.map(|v| points[v as usize][1]);
            let f = |x: f64, o: f64, n: usize| (((x - o) / cell).floor().max(0.0) as usize).min(n - 1);
            (
                f(xs.iter().copied().fold(f64::INFINITY, f64::min), lo[0], nx),
                f(xs.iter().copied().fold(f64::NEG_INFINITY, f64::max), lo[0], nx),
                f(ys.iter().copied().fold(f64::INFINITY, f64::min), lo[1], ny),
                f(ys.iter().copied().fold(f64::NEG_INFINITY, f64::max), lo[1], ny),
            )
        };
        let mut count = vec![0u32; nx * ny + 1];
        for t in tris {
            let (x0, x1, y0, y1) = range(t);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    count[y * nx + x + 1] += 1;
                }
            }
        }
        for i in 0..nx * ny {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut items = vec![0u32; count[nx * ny] as usize];
        for (k, t) in tris.iter().enumerate() {
            let (x0, x1, y0, y1) = range(t);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    items[fill[y * nx + x] as usize] = (first + k) as u32;
                    fill[y * nx + x] += 1;
                }
            }
        }
        Locator { lo, cell, nx, ny, offsets: count, items }
    }

    fn find(&self, mesh: &Mesh, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let x = ((p[0] - self.lo[0]) / self.cell).floor();
        let y = ((p[1] - self.lo[1]) / self.cell).floor();
        if x < 0.0 || y < 0.0 || x as usize >= self.nx || y as usize >= self.ny {
            return None;
        }
        let b = y as usize * self.nx + x as usize;
        self.items[self.offsets[b] as usize..self.offsets[b + 1] as usize]
            .iter()
            .find_map(|&t| barycentric(mesh.triangle_points(t as usize), p, 1e-9).map(|bc| (t as usize, bc)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::domain::{Boundary, Singularity};
    use crate::solver::loops::Loop;

    fn disk(a: [f64; 2], rho: f64, h: f64) -> DomainSpec {
        let mut d = DomainSpec::new(Boundary::UnitDisk, vec![Singularity { center: a, charge: Loop::circle(1) }], rho, h);
        d.ring_points = Some(64);
        d
    }

    #[test]
    fn annulus_geometry() {
        let m = Mesh::build(&disk([0.0, 0.0], 0.1, 1.0 / 32.0)).unwrap();
        for p in &m.points {
            let r = norm(*p);
            assert!(r >= 0.1 - 1e-12 && r <= 1.0 + 1e-12);
        }
        let area = m.area();
        let exact = PI * (1.0 - 0.01);
        assert!((area - exact).abs() < 0.01 * exact, "area {area}");
        assert!(m.weights.iter().all(|&w| w >= 0.0));
        let holes = m.kind.iter().filter(|k| matches!(k, NodeKind::Hole(0))).count();
        assert_eq!(holes, 64);
    }

    #[test]
    fn two_patches_are_disjoint() {
        let mut d = disk([0.3, 0.0], 0.1, 1.0 / 32.0);
        d.singularities.push(Singularity { center: [-0.3, 0.0], charge: Loop::circle(1) });
        let m = Mesh::build(&d).unwrap();
        let (a, b) = (&m.patches[0], &m.patches[1]);
        assert!(a.outer_radius() + b.outer_radius() < 0.6);
    }

    #[test]
    fn nested_rings_across_radii() {
        let a = Mesh::build(&disk([0.0, 0.0], 0.2, 1.0 / 32.0)).unwrap();
        let b = Mesh::build(&disk([0.0, 0.0], 0.1, 1.0 / 32.0)).unwrap();
        let m = rings_per_octave(64);
        assert_eq!(b.patches[0].rings(), a.patches[0].rings() + m);
        assert_eq!(a.len() - a.first_boundary, b.len() - b.first_boundary);
        assert!((a.patches[0].outer_radius() - b.patches[0].outer_radius()).abs() < 1e-12);
    }

    #[test]
    fn linear_functions_have_exact_energy() {
        let m = Mesh::build(&disk([0.1, -0.2], 0.15, 1.0 / 24.0)).unwrap();
        // ½∫|∇x|² over the mesh region, P1 exact on the triangulated part
        let e: f64 = m
            .edges
            .iter()
            .zip(&m.weights)
            .map(|(e, w)| {
                let d = m.points[e[0] as usize][0] - m.points[e[1] as usize][0];
                0.5 * w * d * d
            })
            .sum();
        let exact = 0.5 * (PI - PI * 0.15 * 0.15);
        assert!((e - exact).abs() < 0.01 * exact, "{e} vs {exact}");
    }

    #[test]
    fn locate_finds_points() {
        let m = Mesh::build(&disk([0.0, 0.0], 0.1, 1.0 / 32.0)).unwrap();
        for p in [[0.12, 0.01], [0.5, -0.3], [-0.2, 0.7], [0.0, -0.97]] {
            let (t, b) = m.locate(p).unwrap();
            let tp = m.triangle_points(t);
            let q = [0, 1].map(|d| b[0] * tp[0][d] + b[1] * tp[1][d] + b[2] * tp[2][d]);
            assert!((q[0] - p[0]).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12);
        }
        assert!(m.locate([0.05, 0.0]).is_none());
    }
}
