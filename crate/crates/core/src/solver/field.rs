use rand::Rng;

use crate::topology::ClassId;

use super::domain::DomainSpec;
use super::loops::Loop;
use super::mesh::{Mesh, NodeKind};
use super::target::TargetModel;

/// Discrete map on the vertices of a mesh with one deck gauge per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub dim: usize,
    pub values: Vec<f64>,
    /// Gauge index per edge for quotient targets, empty otherwise.
    pub gauges: Vec<u16>,
    /// Dirichlet flag per vertex.
    pub fixed: Vec<bool>,
}

impl FieldState {
    pub fn constant(mesh: &Mesh, target: &TargetModel, value: &[f64]) -> Self {
        let dim = target.dim();
        let mut s = Self {
            dim,
            values: value.iter().copied().cycle().take(dim * mesh.len()).collect(),
            gauges: if target.deck().is_some() { vec![0; mesh.edges.len()] } else { Vec::new() },
            fixed: (0..mesh.len()).map(|p| mesh.is_fixed(p)).collect(),
        };
        s.refresh_gauges(mesh, target);
        s
    }

    pub fn value(&self, p: usize) -> &[f64] {
        &self.values[p * self.dim..(p + 1) * self.dim]
    }

    pub fn value_mut(&mut self, p: usize) -> &mut [f64] {
        &mut self.values[p * self.dim..(p + 1) * self.dim]
    }

    /// Sets every edge gauge to the deck element minimising the edge length.
    pub fn refresh_gauges(&mut self, mesh: &Mesh, target: &TargetModel) {
        if let Some(g) = target.deck() {
            let d = self.dim;
            for (k, e) in mesh.edges.iter().enumerate() {
                let (a, b) = (e[0] as usize, e[1] as usize);
                let ua = crate::algebra::Quat::from_slice(&self.values[a * d..a * d + d]);
                let ub = crate::algebra::Quat::from_slice(&self.values[b * d..b * d + d]);
                self.gauges[k] = g.best_gauge(ua, ub, self.gauges[k] as usize) as u16;
            }
        }
    }

    /// `½ Σ_e w_e |u_a − γ_e u_b|²` in the metric of the target.
    pub fn energy(&self, mesh: &Mesh, target: &TargetModel) -> f64 {
        mesh.edges
            .iter()
            .zip(&mesh.weights)
            .enumerate()
            .map(|(k, (e, w))| {
                let g = self.gauges.get(k).map_or(0, |&g| g as usize);
                0.5 * w * target.dist2(self.value(e[0] as usize), self.value(e[1] as usize), g)
            })
            .sum()
    }

    /// Largest distance of a vertex value from the target.
    pub fn manifold_defect(&self, target: &TargetModel) -> f64 {
        self.values.chunks(self.dim).map(|v| target.manifold_defect(v)).fold(0.0, f64::max)
    }

    /// Homotopy class of the values along a ring of a polar patch.
    pub fn ring_class(&self, mesh: &Mesh, target: &TargetModel, patch: usize, ring: usize) -> ClassId {
        let pa = &mesh.patches[patch];
        let vals: Vec<&[f64]> = (0..pa.n_theta).map(|j| self.value(pa.node(ring, j))).collect();
        target.loop_class(&vals)
    }

    /// Dirichlet data from `g` on the outer boundary and `traces` on the excised circles;
    /// interior values interpolate along rays from each singularity to the boundary.
    pub fn initial(mesh: &Mesh, domain: &DomainSpec, target: &TargetModel, g: &Loop, traces: &[Loop]) -> Self {
        let dim = target.dim();
        let n = mesh.len();
        let mut values = vec![0.0; n * dim];
        let c = domain.boundary.center();
        let rho = domain.rho;
        let mut tmp = vec![0.0; dim];
        let mut a = vec![0.0; dim];
        let mut b = vec![0.0; dim];
        for p in 0..n {
            let x = mesh.points[p];
            let out = &mut values[p * dim..(p + 1) * dim];
            match mesh.kind[p] {
                NodeKind::Outer => g.eval(target, (x[1] - c[1]).atan2(x[0] - c[0]), out),
                NodeKind::Hole(i) => {
                    let s = mesh.patches[i].center;
                    traces[i].eval(target, (x[1] - s[1]).atan2(x[0] - s[0]), out);
                }
                NodeKind::Free => {
                    let mut acc = vec![0.0; dim];
                    let mut anchor: Option<(f64, Vec<f64>)> = None;
                    let mut parts = Vec::with_capacity(traces.len());
                    for (i, s) in domain.singularities.iter().enumerate() {
                        let v = [x[0] - s.center[0], x[1] - s.center[1]];
                        let r = v[0].hypot(v[1]);
                        let dir = [v[0] / r, v[1] / r];
                        let t_exit = domain.boundary.ray_exit(s.center, dir);
                        let e = [s.center[0] + t_exit * dir[0], s.center[1] + t_exit * dir[1]];
                        traces[i].eval(target, v[1].atan2(v[0]), &mut a);
                        g.eval(target, (e[1] - c[1]).atan2(e[0] - c[0]), &mut b);
                        let frac = ((r - rho) / (t_exit - rho)).clamp(0.0, 1.0);
                        target.interpolate(&a, &b, frac, &mut tmp);
                        let dist = (r - rho).max(1e-12);
                        if anchor.as_ref().is_none_or(|(d, _)| dist < *d) {
                            anchor = Some((dist, tmp.clone()));
                        }
                        parts.push((1.0 / (dist * dist), tmp.clone()));
                    }
                    match anchor {
                        None => g.eval(target, (x[1] - c[1]).atan2(x[0] - c[0]), out),
                        Some((_, base)) => {
                            for (w, mut v) in parts {
                                target.align(&base, &mut v);
                                for k in 0..dim {
                                    acc[k] += w * v[k];
                                }
                            }
                            target.project(&mut acc, &base);
                            out.copy_from_slice(&acc);
                        }
                    }
                }
            }
        }
        let mut s = Self {
            dim,
            values,
            gauges: if target.deck().is_some() { vec![0; mesh.edges.len()] } else { Vec::new() },
            fixed: (0..n).map(|p| mesh.is_fixed(p)).collect(),
        };
        s.refresh_gauges(mesh, target);
        s
    }

    /// Adds uniform noise of the given amplitude to free vertices and projects back.
    pub fn perturb(&mut self, mesh: &Mesh, target: &TargetModel, rng: &mut impl Rng, amplitude: f64) {
        let d = self.dim;
        for p in 0..mesh.len() {
            if self.fixed[p] {
                continue;
            }
            let prev = self.value(p).to_vec();
            let v = self.value_mut(p);
            for x in v.iter_mut() {
                *x += amplitude * rng.gen_range(-1.0..1.0);
            }
            target.project(&mut self.values[p * d..(p + 1) * d], &prev);
        }
        self.refresh_gauges(mesh, target);
    }

    /// Copies the free values of a solution on a coarser excision into this state when
    /// the meshes agree outside the added inner rings. Returns whether anything was copied.
    pub fn transfer_from(&mut self, mesh: &Mesh, old_mesh: &Mesh, old: &FieldState, target: &TargetModel) -> bool {
        let compatible = mesh.patches.len() == old_mesh.patches.len()
            && mesh.len() - mesh.first_boundary == old_mesh.len() - old_mesh.first_boundary
            && mesh.patches.iter().zip(&old_mesh.patches).all(|(a, b)| {
                a.n_theta == b.n_theta
                    && a.rings() >= b.rings()
                    && (a.outer_radius() - b.outer_radius()).abs() <= 1e-9 * a.outer_radius()
            })
            && old.dim == self.dim;
        if !compatible {
            return false;
        }
        for (pa, pb) in mesh.patches.iter().zip(&old_mesh.patches) {
            let shift = pa.rings() - pb.rings();
            for k in 0..pb.rings() {
                for j in 0..pa.n_theta {
                    let (p, q) = (pa.node(k + shift, j), pb.node(k, j));
                    if !self.fixed[p] {
                        self.value_mut(p).copy_from_slice(old.value(q));
                    }
                }
            }
        }
        let off_new = mesh.first_boundary;
        let off_old = old_mesh.first_boundary;
        for k in 0..mesh.len() - off_new {
            if !self.fixed[off_new + k] {
                let v = old.value(off_old + k).to_vec();
                self.value_mut(off_new + k).copy_from_slice(&v);
            }
        }
        self.refresh_gauges(mesh, target);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::domain::{Boundary, Singularity};
    use std::f64::consts::PI;

    #[test]
    fn vortex_initial_data_is_radial() {
        let t = TargetModel::Circle;
        let mut d = DomainSpec::new(Boundary::UnitDisk, vec![Singularity { center: [0.0, 0.0], charge: Loop::circle(1) }], 0.1, 1.0 / 32.0);
        d.ring_points = Some(64);
        let m = Mesh::build(&d).unwrap();
        let f = FieldState::initial(&m, &d, &t, &Loop::circle(1), &[Loop::circle(1)]);
        for p in 0..m.len() {
            let x = m.points[p];
            let r = x[0].hypot(x[1]);
            assert!((f.value(p)[0] - x[0] / r).abs() < 1e-12 && (f.value(p)[1] - x[1] / r).abs() < 1e-12);
        }
        assert!(f.manifold_defect(&t) < 1e-12);
        let e = f.energy(&m, &t);
        let exact = PI * (1.0f64 / 0.1).ln();
        assert!((e - exact).abs() < 0.01 * exact, "{e} vs {exact}");
        assert_eq!(f.ring_class(&m, &t, 0, 3), ClassId::Int(1));
    }
}
