use std::f64::consts::PI;

use super::quaternion::Quat;

// distance from 1 on the unit quaternions, doubled to match the SU(2) → SO(3) metric
fn sphere_dist(q: Quat) -> f64 {
    2.0 * q.w.clamp(-1.0, 1.0).acos()
}

// distance from 1 on the unit circle, same normalisation
fn circle_dist(re: f64) -> f64 {
    2.0 * re.clamp(-1.0, 1.0).acos()
}

fn coset_dist(m: u32, theta: f64) -> f64 {
    let mut q = Quat::ONE;
    let k = Quat::new(0.0, 0.0, 0.0, 1.0);
    for _ in 0..m {
        q = q * k;
    }
    let q = q * Quat::new(theta.cos(), theta.sin(), 0.0, 0.0);
    // second factor is i^m
    let re = [1.0, 0.0, -1.0, 0.0][(m % 4) as usize];
    sphere_dist(q).hypot(circle_dist(re))
}

/// Length of the shortest closed geodesic in the component `m ∈ Z₄` of the
/// superfluid Helium-3 order parameter space.
///
/// Minimises the distance from the identity to the coset `(k, i)^m H₀`,
/// `H₀ = {(cos θ + sin θ i, 1)}`, over θ by a grid followed by golden-section search.
pub fn component_distance_helium3(m: u32) -> f64 {
    let m = m % 4;
    let n = 720;
    let step = 2.0 * PI / n as f64;
    let (mut best_t, mut best) = (0.0, f64::INFINITY);
    for s in 0..n {
        let t = s as f64 * step;
        let d = coset_dist(m, t);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    let (mut a, mut b) = (best_t - step, best_t + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if coset_dist(m, c) < coset_dist(m, d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.min(coset_dist(m, 0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_lengths() {
        assert!(component_distance_helium3(0).abs() < 1e-9);
        assert!((component_distance_helium3(1) - 2f64.sqrt() * PI).abs() < 1e-9);
        assert!((component_distance_helium3(2) - 2.0 * PI).abs() < 1e-9);
        assert!((component_distance_helium3(3) - 2f64.sqrt() * PI).abs() < 1e-9);
    }
}
