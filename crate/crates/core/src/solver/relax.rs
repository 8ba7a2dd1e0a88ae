use crate::algebra::Quat;

use super::field::FieldState;
use super::mesh::Mesh;
use super::target::{DeckGroup, TargetModel};
use super::{SolverConfig, SolverError};

/// Local minimisation problem at one vertex: maximise a score that is linear (or
/// quadratic for `RP²`) in the neighbour values.
trait Kernel {
    const D: usize;
    fn add(acc: &mut [f64; 6], w: f64, v: &[f64]);
    fn score(acc: &[f64; 6], u: &[f64]) -> f64;
    fn best(acc: &[f64; 6], prev: &[f64], out: &mut [f64]);
    fn project(v: &mut [f64], prev: &[f64]);
}

fn normalize_or(v: &mut [f64], prev: &[f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 1e-300 {
        v.iter_mut().for_each(|x| *x /= n);
    } else {
        v.copy_from_slice(prev);
    }
}

struct Sphere<const N: usize>;

impl<const N: usize> Kernel for Sphere<N> {
    const D: usize = N;
    #[inline]
    fn add(acc: &mut [f64; 6], w: f64, v: &[f64]) {
        for k in 0..N {
            acc[k] += w * v[k];
        }
    }
    #[inline]
    fn score(acc: &[f64; 6], u: &[f64]) -> f64 {
        (0..N).map(|k| acc[k] * u[k]).sum()
    }
    #[inline]
    fn best(acc: &[f64; 6], prev: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&acc[..N]);
        normalize_or(out, prev);
    }
    #[inline]
    fn project(v: &mut [f64], prev: &[f64]) {
        normalize_or(v, prev);
    }
}

struct Torus;

impl Kernel for Torus {
    const D: usize = 4;
    #[inline]
    fn add(acc: &mut [f64; 6], w: f64, v: &[f64]) {
        Sphere::<4>::add(acc, w, v);
    }
    #[inline]
    fn score(acc: &[f64; 6], u: &[f64]) -> f64 {
        Sphere::<4>::score(acc, u)
    }
    #[inline]
    fn best(acc: &[f64; 6], prev: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&acc[..4]);
        Self::project(out, prev);
    }
    #[inline]
    fn project(v: &mut [f64], prev: &[f64]) {
        normalize_or(&mut v[..2], &prev[..2]);
        normalize_or(&mut v[2..], &prev[2..]);
    }
}

struct Rp2;

impl Rp2 {
    #[inline]
    fn apply(m: &[f64; 6], x: &[f64]) -> [f64; 3] {
        [
            m[0] * x[0] + m[1] * x[1] + m[2] * x[2],
            m[1] * x[0] + m[3] * x[1] + m[4] * x[2],
            m[2] * x[0] + m[4] * x[1] + m[5] * x[2],
        ]
    }
}

impl Kernel for Rp2 {
    const D: usize = 3;
    #[inline]
    fn add(acc: &mut [f64; 6], w: f64, v: &[f64]) {
        acc[0] += w * v[0] * v[0];
        acc[1] += w * v[0] * v[1];
        acc[2] += w * v[0] * v[2];
        acc[3] += w * v[1] * v[1];
        acc[4] += w * v[1] * v[2];
        acc[5] += w * v[2] * v[2];
    }
    #[inline]
    fn score(acc: &[f64; 6], u: &[f64]) -> f64 {
        let mu = Self::apply(acc, u);
        mu[0] * u[0] + mu[1] * u[1] + mu[2] * u[2]
    }
    /// Power iteration from the previous value; the Rayleigh quotient never decreases.
    #[inline]
    fn best(acc: &[f64; 6], prev: &[f64], out: &mut [f64]) {
        out.copy_from_slice(prev);
        for _ in 0..4 {
            let y = Self::apply(acc, out);
            let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            if n < 1e-300 {
                break;
            }
            out.copy_from_slice(&[y[0] / n, y[1] / n, y[2] / n]);
        }
    }
    #[inline]
    fn project(v: &mut [f64], prev: &[f64]) {
        normalize_or(v, prev);
    }
}

fn sweep<K: Kernel>(mesh: &Mesh, st: &mut FieldState, deck: Option<&DeckGroup>, omega: f64) {
    let d = K::D;
    let FieldState { values, gauges, fixed, .. } = st;
    let mut star = [0.0; 4];
    let mut cand = [0.0; 4];
    let mut old = [0.0; 4];
    for p in 0..mesh.len() {
        if fixed[p] {
            continue;
        }
        let mut acc = [0.0; 6];
        for nb in mesh.neighbors(p) {
            let q = nb.node as usize;
            match deck {
                None => K::add(&mut acc, nb.weight, &values[q * d..q * d + d]),
                Some(g) => {
                    let up = Quat::from_slice(&values[p * d..p * d + d]);
                    let uq = Quat::from_slice(&values[q * d..q * d + d]);
                    let e = nb.edge as usize;
                    let gi = if nb.first {
                        g.best_gauge(up, uq, gauges[e] as usize)
                    } else {
                        g.best_gauge(uq, up, gauges[e] as usize)
                    };
                    gauges[e] = gi as u16;
                    let gg = if nb.first { gi } else { g.inv(gi) };
                    K::add(&mut acc, nb.weight, &(g.elements[gg] * uq).to_array());
                }
            }
        }
        old[..d].copy_from_slice(&values[p * d..p * d + d]);
        K::best(&acc, &old[..d], &mut star[..d]);
        let mut chosen = &star;
        if omega != 1.0 {
            for k in 0..d {
                cand[k] = old[k] + omega * (star[k] - old[k]);
            }
            K::project(&mut cand[..d], &star[..d]);
            if K::score(&acc, &cand[..d]) >= K::score(&acc, &old[..d]) {
                chosen = &cand;
            }
        }
        values[p * d..p * d + d].copy_from_slice(&chosen[..d]);
    }
}

/// Result of a relaxation run.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxOutcome {
    pub energy: f64,
    pub sweeps: usize,
    /// Energy before the first sweep and after each sweep.
    pub history: Vec<f64>,
    pub converged: bool,
    /// Set when the guard rejected a sweep; the state is the one before that sweep.
    pub interrupted: bool,
}

/// Nonlinear Gauss–Seidel with monotone over-relaxation. Each vertex moves to the
/// projected gauge-aligned weighted neighbour average, or to the over-relaxed point
/// when that does not increase the local energy; gauges are refreshed after each sweep.
/// `guard` is evaluated after every sweep and may veto it.
pub fn relax(
    mesh: &Mesh,
    target: &TargetModel,
    state: &mut FieldState,
    cfg: &SolverConfig,
    guard: Option<&dyn Fn(&FieldState) -> bool>,
) -> Result<RelaxOutcome, SolverError> {
    let omega = cfg.omega.clamp(1.0, 1.99);
    let mut e_prev = state.energy(mesh, target);
    let mut history = vec![e_prev];
    let mut decrease = f64::INFINITY;
    let mut interrupted = false;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        let backup = guard.map(|_| (state.values.clone(), state.gauges.clone()));
        match target {
            TargetModel::Circle => sweep::<Sphere<2>>(mesh, state, None, omega),
            TargetModel::FlatTorus => sweep::<Torus>(mesh, state, None, omega),
            TargetModel::ProjectivePlane => sweep::<Rp2>(mesh, state, None, omega),
            TargetModel::QuotientS3(g) => sweep::<Sphere<4>>(mesh, state, Some(g), omega),
        }
        state.refresh_gauges(mesh, target);
        sweeps += 1;
        if let (Some(ok), Some((v, g))) = (guard, backup) {
            if !ok(state) {
                state.values = v;
                state.gauges = g;
                interrupted = true;
                break;
            }
        }
        let e = state.energy(mesh, target);
        history.push(e);
        decrease = (e_prev - e) / e_prev.abs().max(f64::MIN_POSITIVE);
        e_prev = e;
        if decrease < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged && !interrupted && decrease > 100.0 * cfg.tol {
        return Err(SolverError::NonConvergence { sweeps, decrease });
    }
    Ok(RelaxOutcome { energy: e_prev, sweeps, history, converged, interrupted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::domain::{Boundary, DomainSpec, Singularity};
    use crate::solver::loops::Loop;
    use crate::topology::ManifoldKind;
    use std::f64::consts::PI;

    fn annulus(rho: f64, h: f64, charge: Loop) -> (DomainSpec, Mesh) {
        let d = DomainSpec::new(Boundary::UnitDisk, vec![Singularity { center: [0.0, 0.0], charge }], rho, h);
        let m = Mesh::build(&d).unwrap();
        (d, m)
    }

    #[test]
    fn constant_data_relaxes_to_zero() {
        let t = TargetModel::ProjectivePlane;
        let (_, m) = annulus(0.2, 1.0 / 16.0, Loop::projective(1));
        let mut f = FieldState::constant(&m, &t, &[0.0, 0.0, 1.0]);
        for p in 0..m.len() {
            if !f.fixed[p] {
                f.value_mut(p).copy_from_slice(&[0.6, 0.0, 0.8]);
            }
        }
        let out = relax(&m, &t, &mut f, &SolverConfig::default(), None).unwrap();
        assert!(out.energy < 1e-8, "{}", out.energy);
    }

    #[test]
    fn vortex_energy_and_monotone_history() {
        let t = TargetModel::Circle;
        let rho = 0.1;
        let (d, m) = annulus(rho, 1.0 / 32.0, Loop::circle(1));
        let mut f = FieldState::initial(&m, &d, &t, &Loop::circle(1), &[Loop::circle(1).rotated(0.5)]);
        let out = relax(&m, &t, &mut f, &SolverConfig::default(), None).unwrap();
        assert!(out.converged);
        for w in out.history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-13));
        }
        assert!(f.manifold_defect(&t) < 1e-12);
        // rotated inner trace: π log(1/ρ) plus the twist energy (½·2π·0.25/log(1/ρ))
        let l = (1.0 / rho).ln();
        let exact = PI * l + PI * 0.25 / l;
        assert!((out.energy - exact).abs() < 0.01 * exact, "{} vs {exact}", out.energy);
    }

    #[test]
    fn quotient_relaxation_keeps_holonomy() {
        let t = TargetModel::quotient(ManifoldKind::Octahedral).unwrap();
        let c = t.manifold().parse_class("v").unwrap();
        let l = Loop::geodesic(&t, c).unwrap();
        let (d, m) = annulus(0.2, 1.0 / 16.0, l.clone());
        let mut f = FieldState::initial(&m, &d, &t, &l, &[l.clone()]);
        let cfg = SolverConfig { max_sweeps: 3000, ..SolverConfig::default() };
        let out = relax(&m, &t, &mut f, &cfg, None).unwrap();
        let k = m.patches[0].rings() - 1;
        assert_eq!(f.ring_class(&m, &t, 0, k), c);
        let exact = l.energy_density(&t) * (1.0f64 / 0.2).ln();
        assert!((out.energy - exact).abs() < 0.02 * exact, "{} vs {exact}", out.energy);
        assert!(f.manifold_defect(&t) < 1e-12);
    }
}
