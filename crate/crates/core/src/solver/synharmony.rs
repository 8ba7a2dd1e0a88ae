use std::f64::consts::PI;

use super::field::FieldState;
use super::loops::Loop;
use super::mesh::{Mesh, NodeKind};
use super::relax::relax;
use super::target::TargetModel;
use super::{SolverConfig, SolverError};

/// Cylinder lengths tried by default.
pub const DEFAULT_LENGTHS: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

#[derive(Clone, Debug, PartialEq)]
pub struct SynharmonyReport {
    /// `(T, excess energy)` for each cylinder length.
    pub excess: Vec<(f64, f64)>,
    /// Smallest excess over the lengths.
    pub estimate: f64,
    /// Discrete energy per unit length of the sampled `γ`, the analogue of `λ²/4π`.
    pub loop_energy: f64,
}

fn discrete_loop_energy(target: &TargetModel, samples: &[Vec<f64>]) -> f64 {
    let n = samples.len();
    let dt = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| {
            let a = &samples[j];
            let mut b = samples[(j + 1) % n].clone();
            target.align(a, &mut b);
            0.5 * target.dist2(a, &b, 0) / dt
        })
        .sum()
}

/// Minimal Dirichlet energy on `𝕊¹ × [0, T]` with end traces `γ` and `β`, minus `T`
/// times the energy per unit length of `γ`, minimised over the cylinder lengths.
/// The subtracted term is the discrete energy of the sampled `γ` so that `β = γ` gives
/// zero on every grid.
pub fn synharmony_estimate(
    target: &TargetModel,
    gamma: &Loop,
    beta: &Loop,
    lengths: &[f64],
    n_theta: usize,
    cfg: &SolverConfig,
) -> Result<SynharmonyReport, SolverError> {
    if gamma.class(target)? != beta.class(target)? {
        return Err(SolverError::NonHomotopicLoops);
    }
    if n_theta < 16 {
        return Err(SolverError::ResolutionTooCoarse { ring_points: n_theta });
    }
    let ga = gamma.sample(target, n_theta);
    let be = beta.sample(target, n_theta);
    let loop_energy = discrete_loop_energy(target, &ga);
    let mut excess = Vec::new();
    for &t in lengths {
        if !(t > 0.0) {
            return Err(SolverError::InvalidDomain(format!("cylinder length {t} must be positive")));
        }
        let mesh = Mesh::cylinder(n_theta, t);
        let dim = target.dim();
        let mut f = FieldState::constant(&mesh, target, &ga[0]);
        let rows = mesh.len() / n_theta;
        for p in 0..mesh.len() {
            let (r, j) = (p / n_theta, p % n_theta);
            let s = r as f64 / (rows - 1) as f64;
            let mut v = vec![0.0; dim];
            match mesh.kind[p] {
                NodeKind::Hole(_) => v.copy_from_slice(&ga[j]),
                NodeKind::Outer => v.copy_from_slice(&be[j]),
                NodeKind::Free => target.interpolate(&ga[j], &be[j], s, &mut v),
            }
            f.value_mut(p).copy_from_slice(&v);
        }
        f.refresh_gauges(&mesh, target);
        let out = relax(&mesh, target, &mut f, cfg, None)?;
        excess.push((t, out.energy - t * loop_energy));
    }
    let estimate = excess.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    Ok(SynharmonyReport { excess, estimate, loop_energy })
}
