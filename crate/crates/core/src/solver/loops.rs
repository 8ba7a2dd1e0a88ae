use std::f64::consts::PI;

use crate::algebra::Quat;
use crate::topology::{ClassId, ManifoldKind};

use super::target::TargetModel;
use super::SolverError;

/// Closed curve `𝕊¹ → N` given in closed form, used both as boundary data and as
/// prescribed trace on an excised circle. The parameter is the polar angle.
#[derive(Clone, Debug, PartialEq)]
pub enum Loop {
    /// `θ ↦ (cos(dθ + φ), sin(dθ + φ))`.
    Circle { degree: i64, phase: f64 },
    /// Product of two circle loops.
    Torus { n: i64, m: i64, phase: [f64; 2] },
    /// `θ ↦ ±(cos(dθ/2 + φ), sin(dθ/2 + φ), 0)`, a great circle traversed `d` times.
    ProjectivePlane { degree: i64, phase: f64 },
    /// `θ ↦ exp(((θ + φ)/2π)·log h)·q` in `S³/Γ`, where `h` is the deck element with
    /// index `element`; its holonomy is `h` and its length is `λ` of the class of `h`.
    Quaternion { kind: ManifoldKind, element: usize, base: [f64; 4], phase: f64 },
}

impl Loop {
    pub fn circle(degree: i64) -> Self {
        Loop::Circle { degree, phase: 0.0 }
    }

    pub fn torus(n: i64, m: i64) -> Self {
        Loop::Torus { n, m, phase: [0.0; 2] }
    }

    pub fn projective(degree: i64) -> Self {
        Loop::ProjectivePlane { degree, phase: 0.0 }
    }

    /// Minimising closed geodesic through the identity in the given quotient.
    pub fn quaternion(kind: ManifoldKind, element: usize) -> Self {
        Loop::Quaternion { kind, element, base: Quat::ONE.to_array(), phase: 0.0 }
    }

    /// Minimising geodesic representing `class` in the target.
    pub fn geodesic(target: &TargetModel, class: ClassId) -> Result<Self, SolverError> {
        let m = target.manifold();
        m.check(class).map_err(|e| SolverError::InvalidCharge(e.to_string()))?;
        if m.is_trivial(class) {
            return Err(SolverError::TrivialCharge);
        }
        Ok(match (target, class) {
            (TargetModel::Circle, ClassId::Int(d)) => Loop::circle(d),
            (TargetModel::FlatTorus, ClassId::Pair(n, k)) => Loop::torus(n, k),
            (TargetModel::ProjectivePlane, ClassId::Mod(_)) => Loop::projective(1),
            (TargetModel::QuotientS3(_), c) => {
                let members = m.class_members(c).ok_or(SolverError::InvalidCharge(format!("{c:?}")))?;
                Loop::quaternion(m.kind(), members[0])
            }
            _ => return Err(SolverError::InvalidCharge(format!("{class:?}"))),
        })
    }

    /// Same loop with the parameter shifted by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        let mut l = self.clone();
        match &mut l {
            Loop::Circle { degree, phase } | Loop::ProjectivePlane { degree, phase } => {
                let f = if matches!(self, Loop::Circle { .. }) { 1.0 } else { 0.5 };
                *phase += f * *degree as f64 * angle;
            }
            Loop::Torus { n, m, phase } => {
                phase[0] += *n as f64 * angle;
                phase[1] += *m as f64 * angle;
            }
            Loop::Quaternion { phase, .. } => *phase += angle,
        }
        l
    }

    pub fn fits(&self, target: &TargetModel) -> bool {
        match (self, target) {
            (Loop::Circle { .. }, TargetModel::Circle)
            | (Loop::Torus { .. }, TargetModel::FlatTorus)
            | (Loop::ProjectivePlane { .. }, TargetModel::ProjectivePlane) => true,
            (Loop::Quaternion { kind, element, .. }, TargetModel::QuotientS3(g)) => {
                *kind == g.manifold.kind() && *element < g.order()
            }
            _ => false,
        }
    }

    fn ensure(&self, target: &TargetModel) -> Result<(), SolverError> {
        if self.fits(target) {
            Ok(())
        } else {
            Err(SolverError::TargetMismatch(format!("{self:?} is not a loop in {}", target.kind())))
        }
    }

    /// Writes the value at angle `theta` into `out` (length `target.dim()`).
    pub fn eval(&self, target: &TargetModel, theta: f64, out: &mut [f64]) {
        match self {
            Loop::Circle { degree, phase } => {
                let a = *degree as f64 * theta + phase;
                out[0] = a.cos();
                out[1] = a.sin();
            }
            Loop::Torus { n, m, phase } => {
                let a = *n as f64 * theta + phase[0];
                let b = *m as f64 * theta + phase[1];
                out.copy_from_slice(&[a.cos(), a.sin(), b.cos(), b.sin()]);
            }
            Loop::ProjectivePlane { degree, phase } => {
                let a = 0.5 * *degree as f64 * theta + phase;
                out.copy_from_slice(&[a.cos(), a.sin(), 0.0]);
            }
            Loop::Quaternion { element, base, phase, .. } => {
                let g = target.deck().expect("quaternion loop in a quotient target");
                let xi = g.elements[*element].log_unit();
                let s = (theta + phase) / (2.0 * PI);
                let q = Quat::exp_pure(s * xi[0], s * xi[1], s * xi[2]) * Quat::from_slice(base);
                out.copy_from_slice(&q.to_array());
            }
        }
    }

    pub fn sample(&self, target: &TargetModel, n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|k| {
                let mut v = vec![0.0; target.dim()];
                self.eval(target, 2.0 * PI * k as f64 / n as f64, &mut v);
                v
            })
            .collect()
    }

    /// Free homotopy class of the loop.
    pub fn class(&self, target: &TargetModel) -> Result<ClassId, SolverError> {
        self.ensure(target)?;
        Ok(match self {
            Loop::Circle { degree, .. } => ClassId::Int(*degree),
            Loop::Torus { n, m, .. } => ClassId::Pair(*n, *m),
            Loop::ProjectivePlane { degree, .. } => ClassId::Mod(degree.rem_euclid(2) as u32),
            Loop::Quaternion { element, .. } => {
                let g = target.deck().expect("quotient target");
                g.manifold.class_of_element(*element).expect("element of the deck group")
            }
        })
    }

    /// Length of the loop in the metric of the target.
    pub fn length(&self, target: &TargetModel) -> f64 {
        match self {
            Loop::Circle { degree, .. } => 2.0 * PI * degree.unsigned_abs() as f64,
            Loop::Torus { n, m, .. } => 2.0 * PI * (*n as f64).hypot(*m as f64),
            Loop::ProjectivePlane { degree, .. } => PI * degree.unsigned_abs() as f64,
            Loop::Quaternion { element, .. } => {
                let g = target.deck().expect("quotient target");
                2.0 * g.elements[*element].w.clamp(-1.0, 1.0).acos()
            }
        }
    }

    /// `λ²/4π` for a minimising geodesic, which is the Dirichlet energy per unit of `log(1/ρ)`.
    pub fn energy_density(&self, target: &TargetModel) -> f64 {
        let l = self.length(target);
        l * l / (4.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_and_lengths() {
        let c = TargetModel::Circle;
        assert_eq!(Loop::circle(-2).class(&c).unwrap(), ClassId::Int(-2));
        assert!((Loop::circle(1).energy_density(&c) - PI).abs() < 1e-15);
        let p = TargetModel::ProjectivePlane;
        assert!((Loop::projective(1).energy_density(&p) - PI / 4.0).abs() < 1e-15);
        assert!(Loop::circle(1).class(&p).is_err());
    }

    #[test]
    fn quaternion_loop_has_prescribed_holonomy() {
        let t = TargetModel::quotient(ManifoldKind::Tetrahedral).unwrap();
        let m = t.manifold();
        for c in m.classes(0.0) {
            if m.is_trivial(c) {
                continue;
            }
            let l = Loop::geodesic(&t, c).unwrap();
            assert_eq!(l.class(&t).unwrap(), c);
            let pts = l.rotated(0.7).sample(&t, 96);
            let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
            assert_eq!(t.loop_class(&refs), c);
            assert!((l.length(&t) - m.length(c)).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_shifts_parameter() {
        let t = TargetModel::FlatTorus;
        let l = Loop::torus(2, -1);
        let (mut a, mut b) = (vec![0.0; 4], vec![0.0; 4]);
        l.rotated(0.4).eval(&t, 1.0, &mut a);
        l.eval(&t, 1.4, &mut b);
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() < 1e-14);
        }
    }
}
