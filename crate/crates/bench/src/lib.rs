//! Fixtures shared by the benchmarks.

use renorm::balls::Ball;
use renorm::solver::{Boundary, DomainSpec, FieldState, Loop, Mesh, Problem, Singularity, TargetModel};

/// Unit disk with one degree-one vortex at `(a, 0)` and identity boundary data.
pub fn disk_vortex(a: f64, rho: f64, h: f64) -> Problem {
    let d = DomainSpec::new(
        Boundary::UnitDisk,
        vec![Singularity { center: [a, 0.0], charge: Loop::circle(1) }],
        rho,
        h,
    );
    Problem::new(d, TargetModel::Circle, Loop::circle(1))
}

/// Mesh and initial field of a problem.
pub fn initial_state(p: &Problem) -> (Mesh, FieldState) {
    let mesh = Mesh::build(&p.domain).expect("valid domain");
    let field = FieldState::initial(&mesh, &p.domain, &p.target, &p.boundary_data, &p.charges());
    (mesh, field)
}

/// Deterministic family of `n` balls on a slowly expanding spiral.
pub fn spiral_balls(n: usize) -> Vec<Ball> {
    (0..n)
        .map(|k| {
            let t = k as f64 * 0.7;
            Ball::new((1.0 + 0.3 * t) * t.cos(), (1.0 + 0.3 * t) * t.sin(), 0.05 + 0.01 * (k % 5) as f64)
        })
        .collect()
}
