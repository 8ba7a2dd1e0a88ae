use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::topology::{is_topological_resolution, ClassId};

use super::domain::DomainSpec;
use super::field::FieldState;
use super::flux::stress_flux;
use super::loops::Loop;
use super::mesh::{Mesh, NodeKind};
use super::relax::relax;
use super::target::TargetModel;
use super::{SolverConfig, SolverError};

/// Boundary value problem: domain with charged singularities, target and outer data `g`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub domain: DomainSpec,
    pub target: TargetModel,
    pub boundary_data: Loop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Traces on the excised circles are the prescribed geodesics.
    Geometric,
    /// Traces are only prescribed up to homotopy.
    Topological,
}

/// Converged discrete minimiser.
#[derive(Clone, Debug)]
pub struct Solution {
    pub energy: f64,
    pub mesh: Mesh,
    pub field: FieldState,
    pub sweeps: usize,
    pub warnings: Vec<String>,
}

impl Problem {
    pub fn new(domain: DomainSpec, target: TargetModel, boundary_data: Loop) -> Self {
        Self { domain, target, boundary_data }
    }

    pub fn charges(&self) -> Vec<Loop> {
        self.domain.singularities.iter().map(|s| s.charge.clone()).collect()
    }

    /// `Σ λ(γᵢ)²/4π`.
    pub fn expected_slope(&self) -> f64 {
        self.domain.singularities.iter().map(|s| s.charge.energy_density(&self.target)).sum()
    }

    fn charge_classes(&self) -> Result<Vec<ClassId>, SolverError> {
        let m = self.target.manifold();
        self.domain
            .singularities
            .iter()
            .map(|s| {
                let c = s.charge.class(&self.target)?;
                if m.is_trivial(c) {
                    Err(SolverError::TrivialCharge)
                } else {
                    Ok(c)
                }
            })
            .collect()
    }

    /// Rejects trivial charges and charges that do not resolve the boundary data.
    pub fn check(&self) -> Result<(), SolverError> {
        let outer = self.boundary_data.class(&self.target)?;
        let classes = self.charge_classes()?;
        if !is_topological_resolution(&self.target.manifold(), outer, &[], &classes)? {
            let m = self.target.manifold();
            let names: Vec<String> = classes.iter().map(|&c| m.class_name(c)).collect();
            return Err(SolverError::IncompatibleTopology(format!(
                "{} does not lie in the product of {}",
                m.class_name(outer),
                names.join(" ∗ ")
            )));
        }
        self.domain.validate()
    }

    fn at_radius(&self, rho: f64) -> Problem {
        let mut p = self.clone();
        p.domain.rho = rho;
        p
    }
}

/// Multi-start geometric solve on a fixed mesh, optionally warm-started from a solution
/// on a larger excision radius.
fn solve_geometric(
    p: &Problem,
    traces: &[Loop],
    cfg: &SolverConfig,
    warm: Option<&Solution>,
) -> Result<Solution, SolverError> {
    let mesh = Mesh::build(&p.domain)?;
    let mut best: Option<(f64, FieldState, usize)> = None;
    let mut sweeps = 0;
    for r in 0..cfg.restarts.max(1) {
        let mut f = FieldState::initial(&mesh, &p.domain, &p.target, &p.boundary_data, traces);
        if r == 0 {
            if let Some(w) = warm {
                f.transfer_from(&mesh, &w.mesh, &w.field, &p.target);
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            f.perturb(&mesh, &p.target, &mut rng, 0.3);
        }
        let out = relax(&mesh, &p.target, &mut f, cfg, None)?;
        sweeps += out.sweeps;
        if best.as_ref().is_none_or(|b| out.energy < b.0) {
            best = Some((out.energy, f, r));
        }
    }
    let (energy, field, _) = best.expect("at least one start");
    Ok(Solution { energy, mesh, field, sweeps, warnings: Vec::new() })
}

/// `E^geom,ρ`: minimal energy with the charges as traces on the excised circles.
pub fn geometric_energy_at(p: &Problem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    p.check()?;
    solve_geometric(p, &p.charges(), cfg, None)
}

/// Geodesics homotopic to the charge obtained by conjugating its deck element.
fn conjugate_family(target: &TargetModel, charge: &Loop) -> Vec<Loop> {
    match (target, charge) {
        (TargetModel::QuotientS3(g), Loop::Quaternion { kind, element, base, phase }) => {
            let mut seen = Vec::new();
            let mut out = vec![charge.clone()];
            seen.push(*element);
            for k in 0..g.order() {
                let e = g.mul(g.mul(k, *element), g.inv(k));
                if !seen.contains(&e) {
                    seen.push(e);
                    out.push(Loop::Quaternion { kind: *kind, element: e, base: *base, phase: *phase });
                }
            }
            out
        }
        _ => vec![charge.clone()],
    }
}

const MAX_CANDIDATES: usize = 16;

/// Trace candidates: the prescribed charges first, then conjugated geodesics.
fn candidates(p: &Problem) -> Vec<Vec<Loop>> {
    let charges = p.charges();
    let fams: Vec<Vec<Loop>> = charges.iter().map(|c| conjugate_family(&p.target, c)).collect();
    let total: usize = fams.iter().map(Vec::len).product();
    let mut out = vec![charges.clone()];
    if total <= MAX_CANDIDATES {
        for idx in 1..total {
            let mut rest = idx;
            let pick = fams
                .iter()
                .map(|f| {
                    let l = f[rest % f.len()].clone();
                    rest /= f.len();
                    l
                })
                .collect();
            out.push(pick);
        }
    } else {
        for (i, f) in fams.iter().enumerate() {
            for l in &f[1..] {
                let mut pick = charges.clone();
                pick[i] = l.clone();
                out.push(pick);
            }
        }
    }
    out
}

/// Frees the excised circles of a geometric minimiser and relaxes further while the
/// homotopy class of each trace is preserved.
fn release(p: &Problem, mut sol: Solution, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    let classes = p.charge_classes()?;
    for (k, kind) in sol.mesh.kind.iter().enumerate() {
        if matches!(kind, NodeKind::Hole(_)) {
            sol.field.fixed[k] = false;
        }
    }
    let mesh = &sol.mesh;
    let target = &p.target;
    let guard = |f: &FieldState| (0..mesh.patches.len()).all(|i| f.ring_class(mesh, target, i, 0) == classes[i]);
    let out = relax(mesh, target, &mut sol.field, cfg, Some(&guard))?;
    if out.interrupted {
        sol.warnings.push(format!("trace class changed after {} sweeps; kept the last admissible state", out.sweeps));
    }
    sol.energy = out.energy.min(sol.energy);
    sol.sweeps += out.sweeps;
    Ok(sol)
}

fn solve_topological(p: &Problem, cfg: &SolverConfig, geometric: Solution) -> Result<Solution, SolverError> {
    let mut best = geometric;
    for traces in candidates(p).into_iter().skip(1) {
        let s = solve_geometric(p, &traces, cfg, None)?;
        if s.energy < best.energy {
            best = s;
        }
    }
    release(p, best, cfg)
}

/// `E^top,ρ`: minimum over traces homotopic to the charges. The prescribed geodesics
/// and their conjugates are solved first, then the best trace is released.
pub fn topological_energy_at(p: &Problem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    p.check()?;
    let g = solve_geometric(p, &p.charges(), cfg, None)?;
    solve_topological(p, cfg, g)
}

/// Excision radii `0.2·2^{-j}`, `j = 0..4`.
pub fn default_schedule() -> Vec<f64> {
    (0..5).map(|j| 0.2 * 0.5f64.powi(j)).collect()
}

/// Energies on a schedule of excision radii with the affine fit `E(ρ) = A·log(1/ρ) + W`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub mode: Mode,
    /// `(ρ, E(ρ))` in decreasing `ρ`.
    pub samples: Vec<(f64, f64)>,
    /// Geometric energies computed on the way to topological ones.
    pub geometric: Vec<(f64, f64)>,
    pub slope: f64,
    pub renormalised: f64,
    /// Root mean square residual of the fit.
    pub residual: f64,
    /// `Σ λ(γᵢ)²/4π`.
    pub expected_slope: f64,
    /// Stress-energy flux around each singularity at the smallest radius.
    pub flux: Vec<[f64; 2]>,
    pub warnings: Vec<String>,
}

impl EnergyReport {
    /// `E(ρ) − Σλ²/4π·log(1/ρ)` for each sample.
    pub fn renormalised_samples(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|&(r, e)| (r, e - self.expected_slope * (1.0 / r).ln())).collect()
    }

    pub fn slope_deviation(&self) -> f64 {
        (self.slope - self.expected_slope).abs() / self.expected_slope.abs().max(f64::MIN_POSITIVE)
    }
}

fn affine_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let res = (xy.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum::<f64>() / n).sqrt();
    (a, b, res)
}

/// Radius of the flux circle around singularity `i` of a solution.
fn flux_radius(sol: &Solution, d: &DomainSpec, i: usize) -> f64 {
    let pa = &sol.mesh.patches[i];
    let c = pa.center;
    let mut dist = d.boundary.distance(c);
    for (j, s) in d.singularities.iter().enumerate() {
        if j != i {
            dist = dist.min((s.center[0] - c[0]).hypot(s.center[1] - c[1]));
        }
    }
    (0.6 * pa.outer_radius()).min(0.5 * dist).max(2.0 * d.rho)
}

/// Solves on every radius of `schedule`, warm-starting each from the previous one,
/// and fits the renormalised energy. Meshes of successive radii share all vertices
/// outside the excised circles, so one ring resolution is used for the whole schedule.
pub fn renormalised_energy(
    p: &Problem,
    schedule: &[f64],
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<EnergyReport, SolverError> {
    if schedule.len() < 2 || schedule.iter().any(|&r| !(r > 0.0)) {
        return Err(SolverError::InvalidDomain("the radius schedule needs two positive radii".into()));
    }
    let mut radii = schedule.to_vec();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut base = p.clone();
    if base.domain.ring_points.is_none() {
        base.domain.ring_points = Some(super::domain::auto_ring_points(radii[0], base.domain.h));
    }
    for &r in &radii {
        base.at_radius(r).check()?;
    }
    let mut samples = Vec::new();
    let mut geometric = Vec::new();
    let mut warnings = Vec::new();
    let mut prev: Option<Solution> = None;
    let mut last: Option<(Solution, f64)> = None;
    for &r in &radii {
        let q = base.at_radius(r);
        let g = solve_geometric(&q, &q.charges(), cfg, prev.as_ref())?;
        geometric.push((r, g.energy));
        let sol = match mode {
            Mode::Geometric => g.clone(),
            Mode::Topological => solve_topological(&q, cfg, g.clone())?,
        };
        samples.push((r, sol.energy));
        warnings.extend(sol.warnings.iter().map(|w| format!("rho {r}: {w}")));
        prev = Some(g);
        last = Some((sol, r));
    }
    let xy: Vec<(f64, f64)> = samples.iter().map(|&(r, e)| ((1.0 / r).ln(), e)).collect();
    let (slope, renormalised, residual) = affine_fit(&xy);
    let expected_slope = p.expected_slope();
    let (sol, r) = last.expect("nonempty schedule");
    let d = base.at_radius(r).domain;
    let flux = (0..d.singularities.len())
        .map(|i| stress_flux(&sol.mesh, &sol.field, &p.target, d.singularities[i].center, flux_radius(&sol, &d, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = EnergyReport {
        mode,
        samples,
        geometric,
        slope,
        renormalised,
        residual,
        expected_slope,
        flux,
        warnings,
    };
    if report.slope_deviation() > 0.05 {
        report.warnings.push(format!(
            "fitted slope {:.6} deviates from {:.6} by {:.1}%",
            report.slope,
            expected_slope,
            100.0 * report.slope_deviation()
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::domain::{Boundary, Singularity};

    fn disk_problem(a: f64, rho: f64, h: f64, charge: Loop, g: Loop, target: TargetModel) -> Problem {
        let d = DomainSpec::new(Boundary::UnitDisk, vec![Singularity { center: [a, 0.0], charge }], rho, h);
        Problem::new(d, target, g)
    }

    #[test]
    fn incompatible_degrees_are_rejected() {
        let p = disk_problem(0.0, 0.1, 1.0 / 16.0, Loop::circle(2), Loop::circle(1), TargetModel::Circle);
        assert!(matches!(geometric_energy_at(&p, &SolverConfig::default()), Err(SolverError::IncompatibleTopology(_))));
    }

    #[test]
    fn trivial_charge_is_rejected() {
        let p = disk_problem(0.0, 0.1, 1.0 / 16.0, Loop::circle(0), Loop::circle(0), TargetModel::Circle);
        assert_eq!(p.check(), Err(SolverError::TrivialCharge));
    }

    #[test]
    fn topological_never_exceeds_geometric() {
        let p = disk_problem(0.3, 0.1, 1.0 / 16.0, Loop::circle(1).rotated(0.8), Loop::circle(1), TargetModel::Circle);
        let cfg = SolverConfig { restarts: 1, ..SolverConfig::default() };
        let g = geometric_energy_at(&p, &cfg).unwrap();
        let t = topological_energy_at(&p, &cfg).unwrap();
        assert!(t.energy <= g.energy + 1e-12);
        assert!(t.energy < g.energy - 0.05, "releasing a twisted trace lowers the energy");
    }

    #[test]
    fn fit_recovers_affine_data() {
        let xy: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.0 * k as f64 - 1.0)).collect();
        let (a, b, r) = affine_fit(&xy);
        assert!((a - 2.0).abs() < 1e-14 && (b + 1.0).abs() < 1e-14 && r < 1e-14);
    }

    #[test]
    fn quotient_candidates_cover_conjugates() {
        let t = TargetModel::quotient(crate::topology::ManifoldKind::Orthorhombic).unwrap();
        let c = t.manifold().parse_class("x").unwrap();
        let l = Loop::geodesic(&t, c).unwrap();
        let p = disk_problem(0.0, 0.1, 1.0 / 16.0, l.clone(), l, t);
        assert_eq!(candidates(&p).len(), 2);
    }
}
