use std::f64::consts::PI;

use super::loops::Loop;
use super::SolverError;

/// Outer boundary of a simply connected planar domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    UnitDisk,
    /// Simple polygon; orientation is normalised to anticlockwise.
    Polygon(Vec<[f64; 2]>),
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = sub(b, a);
    let l2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if l2 > 0.0 { (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    norm(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

impl Boundary {
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self, SolverError> {
        if vertices.len() < 3 {
            return Err(SolverError::InvalidDomain("polygon needs at least three vertices".into()));
        }
        let area: f64 = (0..vertices.len()).map(|i| cross(vertices[i], vertices[(i + 1) % vertices.len()])).sum();
        if area.abs() < 1e-14 {
            return Err(SolverError::InvalidDomain("degenerate polygon".into()));
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Boundary::Polygon(vertices))
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Boundary::UnitDisk => norm(p) < 1.0,
            Boundary::Polygon(v) => {
                let mut inside = false;
                let n = v.len();
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                        if p[0] < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    /// Distance to the boundary curve.
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        match self {
            Boundary::UnitDisk => (1.0 - norm(p)).abs(),
            Boundary::Polygon(v) => {
                (0..v.len()).map(|i| seg_dist(p, v[i], v[(i + 1) % v.len()])).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Point from which boundary data is parametrised by angle.
    pub fn center(&self) -> [f64; 2] {
        match self {
            Boundary::UnitDisk => [0.0, 0.0],
            Boundary::Polygon(v) => {
                let n = v.len() as f64;
                [v.iter().map(|p| p[0]).sum::<f64>() / n, v.iter().map(|p| p[1]).sum::<f64>() / n]
            }
        }
    }

    /// Smallest `t > 0` with `origin + t·dir` on the boundary, for `origin` inside.
    pub fn ray_exit(&self, origin: [f64; 2], dir: [f64; 2]) -> f64 {
        match self {
            Boundary::UnitDisk => {
                let b = origin[0] * dir[0] + origin[1] * dir[1];
                let a = dir[0] * dir[0] + dir[1] * dir[1];
                let c = origin[0] * origin[0] + origin[1] * origin[1] - 1.0;
                (-b + (b * b - a * c).max(0.0).sqrt()) / a
            }
            Boundary::Polygon(v) => {
                let mut best = f64::INFINITY;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let e = sub(b, a);
                    let den = cross(dir, e);
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let w = sub(a, origin);
                    let t = cross(w, e) / den;
                    let s = cross(w, dir) / den;
                    if t > 1e-14 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                        best = best.min(t);
                    }
                }
                best
            }
        }
    }

    /// Boundary points in anticlockwise order with spacing at most about `h`.
    pub fn sample(&self, h: f64) -> Vec<[f64; 2]> {
        match self {
            Boundary::UnitDisk => {
                let n = ((2.0 * PI / h).ceil() as usize).max(16);
                (0..n)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / n as f64;
                        [t.cos(), t.sin()]
                    })
                    .collect()
            }
            Boundary::Polygon(v) => {
                let mut out = Vec::new();
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let m = ((norm(sub(b, a)) / h).ceil() as usize).max(1);
                    for k in 0..m {
                        let t = k as f64 / m as f64;
                        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    }
                }
                out
            }
        }
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            Boundary::UnitDisk => ([-1.0, -1.0], [1.0, 1.0]),
            Boundary::Polygon(v) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for p in v {
                    for d in 0..2 {
                        lo[d] = lo[d].min(p[d]);
                        hi[d] = hi[d].max(p[d]);
                    }
                }
                (lo, hi)
            }
        }
    }
}

/// Ring resolution giving an angular spacing of `h/1.6` on a circle of radius `rho`,
/// rounded up to a multiple of 8 and at least 64.
pub fn auto_ring_points(rho: f64, h: f64) -> usize {
    let n = (2.0 * PI * rho / h * 1.6).ceil() as usize;
    (n.div_ceil(8) * 8).max(64)
}

/// Singular point with its prescribed trace on the excised circle.
#[derive(Clone, Debug, PartialEq)]
pub struct Singularity {
    pub center: [f64; 2],
    pub charge: Loop,
}

/// Geometry and resolution of a punctured domain `Ω \ ⋃ B̄_ρ(aᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub boundary: Boundary,
    pub singularities: Vec<Singularity>,
    pub rho: f64,
    pub h: f64,
    /// Vertices on each excised circle; chosen from `rho` and `h` when unset.
    pub ring_points: Option<usize>,
    /// Outer radius of the polar patches; derived from `ring_points` and `h` when unset.
    pub patch_radius: Option<f64>,
}

impl DomainSpec {
    pub fn new(boundary: Boundary, singularities: Vec<Singularity>, rho: f64, h: f64) -> Self {
        Self { boundary, singularities, rho, h, ring_points: None, patch_radius: None }
    }

    pub fn n_theta(&self) -> usize {
        self.ring_points.unwrap_or_else(|| auto_ring_points(self.rho, self.h))
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        self.singularities.iter().map(|s| s.center).collect()
    }

    /// Largest admissible excision radius: half the least pairwise distance and the
    /// least distance to the boundary.
    pub fn rho_bar(&self) -> f64 {
        let c = self.centers();
        let mut r = f64::INFINITY;
        for (i, a) in c.iter().enumerate() {
            r = r.min(self.boundary.distance(*a));
            for b in &c[i + 1..] {
                r = r.min(0.5 * norm(sub(*a, *b)));
            }
        }
        r
    }

    /// Distance of the excised disks to the outer boundary.
    pub fn dist_to_boundary(&self) -> f64 {
        self.centers().iter().map(|a| self.boundary.distance(*a) - self.rho).fold(f64::INFINITY, f64::min)
    }

    /// Radius of the log-polar patch around singularity `i`.
    pub fn patch_radius_of(&self, i: usize) -> f64 {
        let a = self.singularities[i].center;
        let mut clearance = self.boundary.distance(a);
        for (j, s) in self.singularities.iter().enumerate() {
            if j != i {
                clearance = clearance.min(0.5 * norm(sub(a, s.center)));
            }
        }
        let wanted = self.patch_radius.unwrap_or(self.n_theta() as f64 * self.h / (2.0 * PI));
        wanted.min(0.45 * clearance).max(self.rho)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.h > 0.0) || !(self.rho > 0.0) {
            return Err(SolverError::InvalidDomain("h and rho must be positive".into()));
        }
        if self.n_theta() < 16 {
            return Err(SolverError::ResolutionTooCoarse { ring_points: self.n_theta() });
        }
        for s in &self.singularities {
            if !self.boundary.contains(s.center) {
                return Err(SolverError::InvalidDomain(format!("singularity {:?} outside the domain", s.center)));
            }
        }
        let bar = self.rho_bar();
        if self.rho >= bar {
            return Err(SolverError::RadiusTooLarge { rho: self.rho, rho_bar: bar });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_orientation_and_queries() {
        let b = Boundary::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        if let Boundary::Polygon(v) = &b {
            assert_eq!(v[1], [1.0, 1.0]);
        }
        assert!(b.contains([0.5, 0.5]));
        assert!(!b.contains([1.5, 0.5]));
        assert!((b.distance([0.5, 0.2]) - 0.2).abs() < 1e-15);
        assert!((b.ray_exit([0.5, 0.5], [1.0, 0.0]) - 0.5).abs() < 1e-15);
        assert_eq!(b.center(), [0.5, 0.5]);
    }

    #[test]
    fn disk_ray_exit() {
        let t = Boundary::UnitDisk.ray_exit([0.3, 0.0], [-1.0, 0.0]);
        assert!((t - 1.3).abs() < 1e-15);
    }

    #[test]
    fn rho_bar_is_half_pairwise_distance() {
        let s = |x: f64| Singularity { center: [x, 0.0], charge: Loop::circle(1) };
        let d = DomainSpec::new(Boundary::UnitDisk, vec![s(-0.3), s(0.3)], 0.1, 1.0 / 32.0);
        assert!((d.rho_bar() - 0.3).abs() < 1e-15);
        assert!(d.validate().is_ok());
        let d = DomainSpec { rho: 0.3, ..d };
        assert!(matches!(d.validate(), Err(SolverError::RadiusTooLarge { .. })));
    }
}
