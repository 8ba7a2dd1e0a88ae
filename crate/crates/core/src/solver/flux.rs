use std::collections::HashMap;
use std::f64::consts::PI;

use super::field::FieldState;
use super::mesh::{tri_area, Mesh};
use super::target::TargetModel;
use super::SolverError;

const QUADRATURE_POINTS: usize = 256;

/// P1 gradient (`dim × 2`, row-major) of values given at the corners of a triangle.
fn p1_gradient(t: [[f64; 2]; 3], u: [&[f64]; 3], out: &mut [f64]) {
    let (e1, e2) = ([t[1][0] - t[0][0], t[1][1] - t[0][1]], [t[2][0] - t[0][0], t[2][1] - t[0][1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    for c in 0..u[0].len() {
        let (d1, d2) = (u[1][c] - u[0][c], u[2][c] - u[0][c]);
        out[2 * c] = (d1 * e2[1] - d2 * e1[1]) / det;
        out[2 * c + 1] = (d2 * e1[0] - d1 * e2[0]) / det;
    }
}

/// Area-weighted average of the gradients of the triangles around each vertex, with
/// neighbouring values aligned to the vertex value.
struct Recovery<'a> {
    mesh: &'a Mesh,
    field: &'a FieldState,
    target: &'a TargetModel,
    incident: Vec<Vec<u32>>,
    cache: HashMap<usize, [f64; 3]>,
}

impl<'a> Recovery<'a> {
    fn new(mesh: &'a Mesh, field: &'a FieldState, target: &'a TargetModel) -> Self {
        let mut incident = vec![Vec::new(); mesh.len()];
        for (k, t) in mesh.triangles.iter().enumerate() {
            for &v in t {
                incident[v as usize].push(k as u32);
            }
        }
        Self { mesh, field, target, incident, cache: HashMap::new() }
    }

    /// Stress-energy tensor `|Du|²/2·I − DuᵀDu` at a vertex as `(T11, T12, T22)`.
    fn tensor(&mut self, v: usize) -> [f64; 3] {
        if let Some(t) = self.cache.get(&v) {
            return *t;
        }
        let dim = self.field.dim;
        let base = self.field.value(v).to_vec();
        let mut grad = vec![0.0; 2 * dim];
        let mut g = vec![0.0; 2 * dim];
        let mut total = 0.0;
        for &t in &self.incident[v] {
            let tri = self.mesh.triangles[t as usize];
            let vals: Vec<Vec<f64>> = tri
                .iter()
                .map(|&w| {
                    let mut x = self.field.value(w as usize).to_vec();
                    self.target.align(&base, &mut x);
                    x
                })
                .collect();
            let pts = self.mesh.triangle_points(t as usize);
            p1_gradient(pts, [&vals[0], &vals[1], &vals[2]], &mut g);
            let a = tri_area(pts);
            total += a;
            for k in 0..2 * dim {
                grad[k] += a * g[k];
            }
        }
        let s = self.target.metric_scale() / (total * total).max(f64::MIN_POSITIVE);
        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for c in 0..dim {
            let (gx, gy) = (grad[2 * c], grad[2 * c + 1]);
            xx += gx * gx;
            xy += gx * gy;
            yy += gy * gy;
        }
        let (xx, xy, yy) = (s * xx, s * xy, s * yy);
        let half = 0.5 * (xx + yy);
        let t = [half - xx, -xy, half - yy];
        self.cache.insert(v, t);
        t
    }
}

/// `∫_{∂B_r(c)} T·ν` with outward normal `ν`, from recovered vertex gradients
/// interpolated at equally spaced quadrature points.
pub fn stress_flux(
    mesh: &Mesh,
    field: &FieldState,
    target: &TargetModel,
    center: [f64; 2],
    radius: f64,
) -> Result<[f64; 2], SolverError> {
    let mut rec = Recovery::new(mesh, field, target);
    let mut flux = [0.0; 2];
    let dl = 2.0 * PI * radius / QUADRATURE_POINTS as f64;
    for q in 0..QUADRATURE_POINTS {
        let th = 2.0 * PI * (q as f64 + 0.5) / QUADRATURE_POINTS as f64;
        let nu = [th.cos(), th.sin()];
        let x = [center[0] + radius * nu[0], center[1] + radius * nu[1]];
        let (t, b) = mesh.locate(x).ok_or(SolverError::CircleOutOfDomain)?;
        let mut tt = [0.0; 3];
        for (k, &v) in mesh.triangles[t].iter().enumerate() {
            let tv = rec.tensor(v as usize);
            for i in 0..3 {
                tt[i] += b[k] * tv[i];
            }
        }
        flux[0] += dl * (tt[0] * nu[0] + tt[1] * nu[1]);
        flux[1] += dl * (tt[1] * nu[0] + tt[2] * nu[1]);
    }
    Ok(flux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::domain::{Boundary, DomainSpec, Singularity};
    use crate::solver::loops::Loop;

    #[test]
    fn centred_vortex_has_no_flux() {
        let t = TargetModel::Circle;
        let d = DomainSpec::new(Boundary::UnitDisk, vec![Singularity { center: [0.0, 0.0], charge: Loop::circle(1) }], 0.05, 1.0 / 32.0);
        let m = Mesh::build(&d).unwrap();
        let f = FieldState::initial(&m, &d, &t, &Loop::circle(1), &[Loop::circle(1)]);
        let fl = stress_flux(&m, &f, &t, [0.0, 0.0], 0.1).unwrap();
        assert!(fl[0].hypot(fl[1]) < 1e-3, "{fl:?}");
        assert!(matches!(stress_flux(&m, &f, &t, [0.0, 0.0], 1.5), Err(SolverError::CircleOutOfDomain)));
    }

    #[test]
    fn gradient_of_linear_map_is_exact() {
        let t = [[0.0, 0.0], [1.0, 0.2], [0.3, 1.0]];
        let f = |p: [f64; 2]| vec![2.0 * p[0] - p[1], 0.5 * p[1]];
        let (a, b, c) = (f(t[0]), f(t[1]), f(t[2]));
        let mut g = [0.0; 4];
        p1_gradient(t, [&a, &b, &c], &mut g);
        let want = [2.0, -1.0, 0.0, 0.5];
        for k in 0..4 {
            assert!((g[k] - want[k]).abs() < 1e-14);
        }
    }
}
