use std::sync::Arc;

use crate::algebra::Quat;
use crate::topology::{ClassId, ManifoldDescriptor, ManifoldKind};

use super::SolverError;

/// Deck group of a quotient `S³/Γ` in floating point form.
#[derive(Debug)]
pub struct DeckGroup {
    pub manifold: ManifoldDescriptor,
    pub elements: Vec<Quat>,
    mul: Vec<u16>,
    inv: Vec<u16>,
    /// `⟨u, γv⟩` above this value certifies `γ` as the nearest translate.
    skip_dot: f64,
}

impl DeckGroup {
    fn new(kind: ManifoldKind) -> Result<Self, SolverError> {
        let manifold = ManifoldDescriptor::new(kind);
        let g = manifold.group().ok_or(SolverError::UnsupportedTarget(kind.to_string()))?;
        let n = g.order();
        let elements: Vec<Quat> = g.floats().to_vec();
        let mul = (0..n * n).map(|ab| g.mul(ab / n, ab % n) as u16).collect();
        let inv = (0..n).map(|a| g.inv(a) as u16).collect();
        // distinct translates of a unit vector are at least dmin apart
        let dmin = (1..n).map(|a| (2.0 - 2.0 * elements[a].w).sqrt()).fold(f64::INFINITY, f64::min);
        let skip_dot = 1.0 - dmin * dmin / 8.0;
        Ok(Self { manifold, elements, mul, inv, skip_dot })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// Index of the element maximising `⟨γ, q⟩`.
    pub fn nearest(&self, q: Quat) -> usize {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, e) in self.elements.iter().enumerate() {
            let d = e.dot(q);
            if d > best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Gauge `γ` minimising `|u − γv|`, keeping `current` when it is certainly optimal.
    pub fn best_gauge(&self, u: Quat, v: Quat, current: usize) -> usize {
        let w = u * v.conj();
        if self.elements[current].dot(w) > self.skip_dot {
            return current;
        }
        self.nearest(w)
    }
}

/// Target manifold of the maps together with its representation in Euclidean space.
#[derive(Clone, Debug)]
pub enum TargetModel {
    /// Unit circle in ℝ².
    Circle,
    /// Product of two unit circles in ℝ⁴.
    FlatTorus,
    /// `RP²`, stored as a unit vector `n` up to sign and measured through the
    /// projector `n nᵀ / √2`, so that `|P − Q|² = 1 − (n·m)²`.
    ProjectivePlane,
    /// `S³/Γ` with unit quaternion representatives and per-edge deck gauges;
    /// distances are those of `SU(2)`, four times the round ones squared.
    QuotientS3(Arc<DeckGroup>),
}

impl TargetModel {
    pub fn quotient(kind: ManifoldKind) -> Result<Self, SolverError> {
        match kind {
            ManifoldKind::Rotations
            | ManifoldKind::Orthorhombic
            | ManifoldKind::Tetrahedral
            | ManifoldKind::Octahedral
            | ManifoldKind::Icosahedral => Ok(TargetModel::QuotientS3(Arc::new(DeckGroup::new(kind)?))),
            _ => Err(SolverError::UnsupportedTarget(kind.to_string())),
        }
    }

    pub fn from_kind(kind: ManifoldKind) -> Result<Self, SolverError> {
        match kind {
            ManifoldKind::Circle => Ok(TargetModel::Circle),
            ManifoldKind::FlatTorus => Ok(TargetModel::FlatTorus),
            ManifoldKind::ProjectiveSpace(2) => Ok(TargetModel::ProjectivePlane),
            k => Self::quotient(k),
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        match self {
            TargetModel::Circle => ManifoldKind::Circle,
            TargetModel::FlatTorus => ManifoldKind::FlatTorus,
            TargetModel::ProjectivePlane => ManifoldKind::ProjectiveSpace(2),
            TargetModel::QuotientS3(g) => g.manifold.kind(),
        }
    }

    pub fn manifold(&self) -> ManifoldDescriptor {
        match self {
            TargetModel::QuotientS3(g) => g.manifold.clone(),
            t => ManifoldDescriptor::new(t.kind()),
        }
    }

    pub fn deck(&self) -> Option<&DeckGroup> {
        match self {
            TargetModel::QuotientS3(g) => Some(g),
            _ => None,
        }
    }

    /// Number of stored coordinates per vertex.
    pub fn dim(&self) -> usize {
        match self {
            TargetModel::Circle => 2,
            TargetModel::FlatTorus | TargetModel::QuotientS3(_) => 4,
            TargetModel::ProjectivePlane => 3,
        }
    }

    /// Factor converting `|Δu|²` of the stored representation into the squared metric.
    pub fn metric_scale(&self) -> f64 {
        match self {
            TargetModel::QuotientS3(_) => 4.0,
            _ => 1.0,
        }
    }

    /// Nearest point of the representation manifold; `prev` breaks degeneracies.
    pub fn project(&self, v: &mut [f64], prev: &[f64]) {
        match self {
            TargetModel::Circle | TargetModel::ProjectivePlane | TargetModel::QuotientS3(_) => normalize(v, prev),
            TargetModel::FlatTorus => {
                normalize(&mut v[0..2], &prev[0..2]);
                normalize(&mut v[2..4], &prev[2..4]);
            }
        }
    }

    /// Distance from the representation manifold.
    pub fn manifold_defect(&self, v: &[f64]) -> f64 {
        match self {
            TargetModel::FlatTorus => (norm(&v[0..2]) - 1.0).abs().max((norm(&v[2..4]) - 1.0).abs()),
            _ => (norm(v) - 1.0).abs(),
        }
    }

    /// Squared distance `|a − γb|²` in the metric of the target with the gauge `γ` (identity for
    /// targets without a deck group).
    pub fn dist2(&self, a: &[f64], b: &[f64], gauge: usize) -> f64 {
        match self {
            TargetModel::Circle | TargetModel::FlatTorus => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            TargetModel::ProjectivePlane => {
                let d = dot(a, b);
                (1.0 - d * d).max(0.0)
            }
            TargetModel::QuotientS3(g) => {
                let gb = g.elements[gauge] * Quat::from_slice(b);
                4.0 * (2.0 - 2.0 * Quat::from_slice(a).dot(gb)).max(0.0)
            }
        }
    }

    /// Replaces `b` by the representative of its orbit closest to `a`, returning the gauge used.
    pub fn align(&self, a: &[f64], b: &mut [f64]) -> usize {
        match self {
            TargetModel::ProjectivePlane => {
                if dot(a, b) < 0.0 {
                    b.iter_mut().for_each(|x| *x = -*x);
                }
                0
            }
            TargetModel::QuotientS3(g) => {
                let qa = Quat::from_slice(a);
                let qb = Quat::from_slice(b);
                let k = g.nearest(qa * qb.conj());
                b.copy_from_slice(&(g.elements[k] * qb).to_array());
                k
            }
            _ => 0,
        }
    }

    /// Point at fraction `s` along the shortest path from `a` to the orbit of `b`.
    pub fn interpolate(&self, a: &[f64], b: &[f64], s: f64, out: &mut [f64]) {
        let mut bb = b.to_vec();
        self.align(a, &mut bb);
        match self {
            TargetModel::Circle => slerp_circle(a, &bb, s, out),
            TargetModel::FlatTorus => {
                slerp_circle(&a[0..2], &bb[0..2], s, &mut out[0..2]);
                slerp_circle(&a[2..4], &bb[2..4], s, &mut out[2..4]);
            }
            _ => {
                for i in 0..a.len() {
                    out[i] = (1.0 - s) * a[i] + s * bb[i];
                }
                self.project(out, a);
            }
        }
    }

    /// Homotopy class of a closed discrete loop through the given values.
    pub fn loop_class(&self, values: &[&[f64]]) -> ClassId {
        let n = values.len();
        match self {
            TargetModel::Circle => ClassId::Int(winding(values.iter().map(|v| [v[0], v[1]]))),
            TargetModel::FlatTorus => ClassId::Pair(
                winding(values.iter().map(|v| [v[0], v[1]])),
                winding(values.iter().map(|v| [v[2], v[3]])),
            ),
            TargetModel::ProjectivePlane => {
                let mut cur = values[0].to_vec();
                for k in 1..=n {
                    let mut next = values[k % n].to_vec();
                    self.align(&cur, &mut next);
                    cur = next;
                }
                ClassId::Mod(u32::from(dot(&cur, values[0]) < 0.0))
            }
            TargetModel::QuotientS3(g) => {
                let mut cur = values[0].to_vec();
                for k in 1..=n {
                    let mut next = values[k % n].to_vec();
                    self.align(&cur, &mut next);
                    cur = next;
                }
                let hol = Quat::from_slice(&cur) * Quat::from_slice(values[0]).conj();
                g.manifold.class_of_element(g.nearest(hol)).expect("element of the deck group")
            }
        }
    }
}

fn winding(points: impl Iterator<Item = [f64; 2]>) -> i64 {
    let pts: Vec<[f64; 2]> = points.collect();
    let n = pts.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (pts[k], pts[(k + 1) % n]);
        total += (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

fn slerp_circle(a: &[f64], b: &[f64], s: f64, out: &mut [f64]) {
    let pa = a[1].atan2(a[0]);
    let d = (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
    let p = pa + s * d;
    out[0] = p.cos();
    out[1] = p.sin();
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(v: &mut [f64], prev: &[f64]) {
    let n = norm(v);
    if n < 1e-300 {
        v.copy_from_slice(prev);
        return;
    }
    v.iter_mut().for_each(|x| *x /= n);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rp2_distance_is_quarter_of_circle_for_planar_data() {
        let t = TargetModel::ProjectivePlane;
        let c = TargetModel::Circle;
        let (p, q) = (0.3f64, 1.1f64);
        let dc = c.dist2(&[p.cos(), p.sin()], &[q.cos(), q.sin()], 0);
        let dr = t.dist2(&[(p / 2.0).cos(), (p / 2.0).sin(), 0.0], &[(q / 2.0).cos(), (q / 2.0).sin(), 0.0], 0);
        assert!((dr - 0.25 * dc).abs() < 1e-15);
    }

    #[test]
    fn loop_classes() {
        let n = 64;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                vec![(2.0 * t).cos(), (2.0 * t).sin(), (-t).cos(), (-t).sin()]
            })
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        assert_eq!(TargetModel::FlatTorus.loop_class(&refs), ClassId::Pair(2, -1));
        let half: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let t = PI * k as f64 / n as f64;
                vec![t.cos(), t.sin(), 0.0]
            })
            .collect();
        let refs: Vec<&[f64]> = half.iter().map(|v| v.as_slice()).collect();
        assert_eq!(TargetModel::ProjectivePlane.loop_class(&refs), ClassId::Mod(1));
    }

    #[test]
    fn quotient_holonomy_of_geodesic() {
        let t = TargetModel::quotient(ManifoldKind::Octahedral).unwrap();
        let g = t.deck().unwrap();
        let m = &g.manifold;
        let v = m.parse_class("v").unwrap();
        let elem = m.class_members(v).unwrap()[0];
        let xi = g.elements[elem].log_unit();
        let n = 50;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let s = k as f64 / n as f64;
                Quat::exp_pure(s * xi[0], s * xi[1], s * xi[2]).to_array().to_vec()
            })
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        assert_eq!(t.loop_class(&refs), v);
    }
}
