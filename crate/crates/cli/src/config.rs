use std::path::Path;

use renorm::solver::{default_schedule, Boundary, DomainSpec, Loop, Mode, Problem, Singularity, SolverConfig, TargetModel};
use renorm::topology::{ClassId, ManifoldKind};
use serde::Deserialize;

use crate::Failure;

/// Class token given either as a string (`"v2"`, `"1:0"`) or as an integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Token {
    Int(i64),
    Str(String),
}

impl Token {
    pub fn text(&self) -> String {
        match self {
            Token::Int(n) => n.to_string(),
            Token::Str(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    pub class: Token,
    #[serde(default)]
    pub phase: f64,
    /// Group element of a quotient target, selecting one loop among the conjugates.
    pub element: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum LoopConfig {
    Token(Token),
    Geodesic(GeodesicConfig),
}

impl LoopConfig {
    fn geodesic(&self) -> GeodesicConfig {
        match self {
            LoopConfig::Token(t) => GeodesicConfig { class: t.clone(), phase: 0.0, element: None },
            LoopConfig::Geodesic(g) => g.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonConfig {
    pub polygon: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DomainConfig {
    Named(String),
    Polygon(PolygonConfig),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularityConfig {
    pub x: f64,
    pub y: f64,
    pub class: Option<Token>,
    pub geodesic: Option<GeodesicConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ModeConfig {
    Geom,
    Top,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub range: [f64; 2],
    pub steps: usize,
    /// Index of the singularity that moves.
    #[serde(default)]
    pub singularity: usize,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub max_sweeps: Option<usize>,
    pub tol: Option<f64>,
    pub omega: Option<f64>,
    pub restarts: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    pub domain: DomainConfig,
    pub target: String,
    pub boundary_data: LoopConfig,
    pub singularities: Vec<SingularityConfig>,
    pub rho_schedule: Option<Vec<f64>>,
    pub h: f64,
    #[serde(default = "default_mode")]
    pub mode: ModeConfig,
    pub ring_points: Option<usize>,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn default_mode() -> ModeConfig {
    ModeConfig::Geom
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallConfig {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallsConfig {
    pub balls: Vec<BallConfig>,
    pub t_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    33
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

pub fn parse_kind(s: &str) -> Result<ManifoldKind, Failure> {
    s.parse().map_err(|e: renorm::topology::TopologyError| Failure::Config(e.to_string()))
}

/// Loop of the target described by `spec`; trivial classes give constant loops.
pub fn build_loop(target: &TargetModel, spec: &GeodesicConfig) -> Result<Loop, Failure> {
    let m = target.manifold();
    let class = m.parse_class(&spec.class.text()).map_err(|e| Failure::Config(e.to_string()))?;
    m.check(class).map_err(|e| Failure::Config(e.to_string()))?;
    let base = match (spec.element, target) {
        (Some(e), TargetModel::QuotientS3(_)) => {
            let g = m.group().expect("quotient");
            if e >= g.order() || m.class_of_element(e) != Some(class) {
                return Err(Failure::Config(format!("element {e} is not in class {}", spec.class.text())));
            }
            Loop::quaternion(m.kind(), e)
        }
        (Some(_), _) => return Err(Failure::Config("`element` applies to quotients of the three-sphere only".into())),
        (None, _) if m.is_trivial(class) => match target {
            TargetModel::Circle => Loop::circle(0),
            TargetModel::FlatTorus => Loop::torus(0, 0),
            TargetModel::ProjectivePlane => Loop::projective(0),
            TargetModel::QuotientS3(_) => Loop::quaternion(m.kind(), m.group().expect("quotient").identity()),
        },
        (None, _) => Loop::geodesic(target, class).map_err(Failure::from)?,
    };
    Ok(if spec.phase != 0.0 { base.rotated(spec.phase) } else { base })
}

/// Renormalised energy problem together with its radius schedule and mode.
pub struct EnergyRun {
    pub problem: Problem,
    pub schedule: Vec<f64>,
    pub mode: Mode,
    pub solver: SolverConfig,
}

impl EnergyConfig {
    pub fn build(&self, target_override: Option<&str>, seed: u64) -> Result<EnergyRun, Failure> {
        let kind = parse_kind(target_override.unwrap_or(&self.target))?;
        let target = TargetModel::from_kind(kind)?;
        let boundary = match &self.domain {
            DomainConfig::Named(n) if matches!(n.as_str(), "unit-disk" | "disk" | "unit_disk") => Boundary::UnitDisk,
            DomainConfig::Named(n) => return Err(Failure::Config(format!("unknown domain `{n}`"))),
            DomainConfig::Polygon(p) => Boundary::polygon(p.polygon.clone())?,
        };
        let g = build_loop(&target, &self.boundary_data.geodesic())?;
        let mut singularities = Vec::new();
        for (i, s) in self.singularities.iter().enumerate() {
            let spec = match (&s.class, &s.geodesic) {
                (Some(c), None) => GeodesicConfig { class: c.clone(), phase: 0.0, element: None },
                (None, Some(g)) => g.clone(),
                _ => return Err(Failure::Config(format!("singularity {i} needs exactly one of `class` and `geodesic`"))),
            };
            singularities.push(Singularity { center: [s.x, s.y], charge: build_loop(&target, &spec)? });
        }
        if singularities.is_empty() {
            return Err(Failure::Config("at least one singularity is required".into()));
        }
        let schedule = self.rho_schedule.clone().unwrap_or_else(default_schedule);
        if schedule.len() < 2 || schedule.iter().any(|r| !(*r > 0.0)) {
            return Err(Failure::Config("rho_schedule needs at least two positive radii".into()));
        }
        if !(self.h > 0.0) {
            return Err(Failure::Config("h must be positive".into()));
        }
        let rho = schedule.iter().cloned().fold(0.0, f64::max);
        let mut domain = DomainSpec::new(boundary, singularities, rho, self.h);
        domain.ring_points = self.ring_points;
        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            max_sweeps: self.solver.max_sweeps.unwrap_or(defaults.max_sweeps),
            tol: self.solver.tol.unwrap_or(defaults.tol),
            omega: self.solver.omega.unwrap_or(defaults.omega),
            restarts: self.solver.restarts.unwrap_or(defaults.restarts),
            seed,
        };
        if solver.restarts == 0 || !(solver.tol > 0.0) {
            return Err(Failure::Config("solver.restarts must be positive and solver.tol > 0".into()));
        }
        if let Some(sw) = &self.sweep {
            if sw.steps < 2 || sw.singularity >= self.singularities.len() || !(sw.range[0] < sw.range[1]) {
                return Err(Failure::Config("sweep needs steps >= 2, a valid singularity index and an increasing range".into()));
            }
        }
        let mode = match self.mode {
            ModeConfig::Geom => Mode::Geometric,
            ModeConfig::Top => Mode::Topological,
        };
        Ok(EnergyRun { problem: Problem::new(domain, target, g), schedule, mode, solver })
    }
}

/// Positions of the moving singularity along a sweep.
pub fn sweep_positions(base: [f64; 2], sw: &SweepConfig) -> Vec<[f64; 2]> {
    (0..sw.steps)
        .map(|k| {
            let s = sw.range[0] + (sw.range[1] - sw.range[0]) * k as f64 / (sw.steps - 1) as f64;
            match sw.axis {
                Axis::X => [s, base[1]],
                Axis::Y => [base[0], s],
            }
        })
        .collect()
}

pub fn class_list(kind: ManifoldKind, tokens: &[String]) -> Result<Vec<ClassId>, Failure> {
    let m = renorm::topology::ManifoldDescriptor::new(kind);
    tokens
        .iter()
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let c = m.parse_class(t).map_err(|e| Failure::Config(e.to_string()))?;
            m.check(c).map_err(|e| Failure::Config(e.to_string()))?;
            Ok(c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<EnergyConfig, serde_json::Error> {
        serde_json::from_str(s)
    }

    #[test]
    fn minimal_config_parses() {
        let c = parse(r#"{"domain":"unit-disk","target":"circle","boundary_data":1,
            "singularities":[{"x":0,"y":0,"class":1}],"h":0.0625}"#)
        .unwrap();
        let run = c.build(None, 7).unwrap();
        assert_eq!(run.schedule.len(), 5);
        assert_eq!(run.solver.seed, 7);
        assert_eq!(run.mode, Mode::Geometric);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = parse(r#"{"domain":"unit-disk","target":"circle","boundary_data":1,
            "singularities":[{"x":0,"y":0,"class":1}],"h":0.0625,"colour":"red"}"#);
        assert!(e.is_err());
        let e = parse(r#"{"domain":"unit-disk","target":"circle","boundary_data":1,
            "singularities":[{"x":0,"y":0,"class":1,"spin":2}],"h":0.0625}"#);
        assert!(e.is_err());
    }

    #[test]
    fn geodesic_with_element_must_match_class() {
        let t = TargetModel::from_kind(ManifoldKind::Orthorhombic).unwrap();
        let m = t.manifold();
        let x = m.parse_class("x").unwrap();
        let e = m.class_members(x).unwrap()[1];
        let ok = GeodesicConfig { class: Token::Str("x".into()), phase: 0.0, element: Some(e) };
        assert!(build_loop(&t, &ok).is_ok());
        let bad = GeodesicConfig { class: Token::Str("y".into()), phase: 0.0, element: Some(e) };
        assert!(matches!(build_loop(&t, &bad), Err(Failure::Config(_))));
    }

    #[test]
    fn sweep_is_inclusive() {
        let sw = SweepConfig { axis: Axis::X, range: [-0.4, 0.4], steps: 5, singularity: 0 };
        let p = sweep_positions([0.0, 0.1], &sw);
        assert_eq!(p.len(), 5);
        assert!((p[2][0]).abs() < 1e-15 && p[4] == [0.4, 0.1]);
    }
}
