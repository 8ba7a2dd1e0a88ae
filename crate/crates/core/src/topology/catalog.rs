use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::algebra::{component_distance_helium3, ConjugacyClass, FiniteGroup, Quaternion};

use super::TopologyError;

/// Supported target manifolds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Circle,
    FlatTorus,
    /// Torus over the Eisenstein lattice `Z[ω]`.
    EquilateralTorus,
    /// `RPⁿ = Sⁿ / {±1}` with the round metric, `n >= 2`.
    ProjectiveSpace(u32),
    /// `SO(3) = S³ / {±1}` with the metric of `SU(2)`.
    Rotations,
    Orthorhombic,
    Tetrahedral,
    Octahedral,
    Icosahedral,
    Helium3,
}

impl ManifoldKind {
    pub const ALL: [ManifoldKind; 10] = [
        ManifoldKind::Circle,
        ManifoldKind::FlatTorus,
        ManifoldKind::EquilateralTorus,
        ManifoldKind::ProjectiveSpace(2),
        ManifoldKind::Rotations,
        ManifoldKind::Orthorhombic,
        ManifoldKind::Tetrahedral,
        ManifoldKind::Octahedral,
        ManifoldKind::Icosahedral,
        ManifoldKind::Helium3,
    ];

    pub fn is_lattice(&self) -> bool {
        matches!(self, ManifoldKind::Circle | ManifoldKind::FlatTorus | ManifoldKind::EquilateralTorus)
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifoldKind::Circle => write!(f, "circle"),
            ManifoldKind::FlatTorus => write!(f, "flat-torus"),
            ManifoldKind::EquilateralTorus => write!(f, "equilateral-torus"),
            ManifoldKind::ProjectiveSpace(n) => write!(f, "rp{n}"),
            ManifoldKind::Rotations => write!(f, "so3"),
            ManifoldKind::Orthorhombic => write!(f, "orthorhombic"),
            ManifoldKind::Tetrahedral => write!(f, "tetrahedral"),
            ManifoldKind::Octahedral => write!(f, "octahedral"),
            ManifoldKind::Icosahedral => write!(f, "icosahedral"),
            ManifoldKind::Helium3 => write!(f, "helium3"),
        }
    }
}

impl FromStr for ManifoldKind {
    type Err = TopologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let k = s.trim().to_ascii_lowercase().replace('_', "-");
        Ok(match k.as_str() {
            "circle" | "s1" => ManifoldKind::Circle,
            "flat-torus" | "torus" => ManifoldKind::FlatTorus,
            "equilateral-torus" | "hexagonal-torus" => ManifoldKind::EquilateralTorus,
            "so3" | "rotations" => ManifoldKind::Rotations,
            "orthorhombic" => ManifoldKind::Orthorhombic,
            "tetrahedral" => ManifoldKind::Tetrahedral,
            "octahedral" => ManifoldKind::Octahedral,
            "icosahedral" | "poincare" => ManifoldKind::Icosahedral,
            "helium3" | "he3" => ManifoldKind::Helium3,
            _ => {
                let n = k
                    .strip_prefix("rp")
                    .and_then(|d| d.parse::<u32>().ok())
                    .filter(|&n| n >= 2)
                    .ok_or_else(|| TopologyError::UnknownManifold(s.to_string()))?;
                ManifoldKind::ProjectiveSpace(n)
            }
        })
    }
}

/// A free homotopy class of closed curves.
///
/// Orientation convention: all loops run anticlockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    /// Degree of a map into the circle.
    Int(i64),
    /// Lattice vector `(n, m)`; for the equilateral torus `n + mω`.
    Pair(i64, i64),
    /// Element of a cyclic fundamental group.
    Mod(u32),
    /// Conjugacy class index in catalog order.
    Group(usize),
}

/// One row of a class catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassEntry {
    pub id: ClassId,
    pub name: String,
    pub description: String,
    pub conjugates: usize,
    pub lambda: f64,
}

#[derive(Clone, Debug)]
struct GroupModel {
    group: FiniteGroup,
    classes: Vec<ConjugacyClass>,
    class_map: Vec<usize>,
    products: Vec<Vec<Vec<usize>>>,
    keys: Vec<&'static str>,
    descriptions: Vec<&'static str>,
}

#[derive(Clone, Debug)]
enum Model {
    Integer,
    Square,
    Hexagonal,
    Cyclic { lengths: Vec<f64>, keys: Vec<&'static str>, descriptions: Vec<&'static str> },
    Group(Box<GroupModel>),
}

/// Class structure of a target manifold: lengths of shortest closed geodesics,
/// products of free homotopy classes and names.
#[derive(Clone, Debug)]
pub struct ManifoldDescriptor {
    kind: ManifoldKind,
    model: Model,
}

fn eisenstein_norm(n: i64, m: i64) -> f64 {
    ((n * n - n * m + m * m) as f64).sqrt()
}

impl ManifoldDescriptor {
    pub fn new(kind: ManifoldKind) -> Self {
        let model = match kind {
            ManifoldKind::Circle => Model::Integer,
            ManifoldKind::FlatTorus => Model::Square,
            ManifoldKind::EquilateralTorus => Model::Hexagonal,
            ManifoldKind::ProjectiveSpace(_) => Model::Cyclic {
                lengths: vec![0.0, PI],
                keys: vec!["c", "a"],
                descriptions: vec!["constant", "geodesic between antipodal points"],
            },
            ManifoldKind::Helium3 => Model::Cyclic {
                lengths: (0..4).map(component_distance_helium3).collect(),
                keys: vec!["0", "+1", "2", "-1"],
                descriptions: vec!["constant", "180° rotation", "360° rotation", "180° rotation"],
            },
            ManifoldKind::Rotations => {
                let g = FiniteGroup::sign_group();
                Model::Group(Box::new(GroupModel::new(g, &[("c", "constant", vec![]), ("w", "360° rotation", vec![(0, 1)])])))
            }
            ManifoldKind::Orthorhombic => {
                let g = FiniteGroup::quaternion_group();
                let i = g.index_of(&Quaternion::i()).unwrap();
                let j = g.index_of(&Quaternion::j()).unwrap();
                let k = g.index_of(&Quaternion::k()).unwrap();
                let w = g.index_of(&-Quaternion::one()).unwrap();
                Model::Group(Box::new(GroupModel::named(
                    g,
                    &[
                        ("c", "constant", 0),
                        ("x", "180° rotation around the x-axis", i),
                        ("y", "180° rotation around the y-axis", j),
                        ("z", "180° rotation around the z-axis", k),
                        ("w", "360° rotation", w),
                    ],
                )))
            }
            ManifoldKind::Tetrahedral => {
                let g = FiniteGroup::binary_tetrahedral();
                let s = g.index_of(&Quaternion::from_ints(1, 1, 1, 1, 2)).unwrap();
                let t = g.inv(s);
                let e = g.index_of(&Quaternion::i()).unwrap();
                let w = g.index_of(&-Quaternion::one()).unwrap();
                Model::Group(Box::new(GroupModel::named(
                    g.clone(),
                    &[
                        ("c", "constant", 0),
                        ("+", "120° rotation of a face", s),
                        ("-", "-120° rotation of a face", t),
                        ("+2", "240° rotation of a face", g.pow(s, 2)),
                        ("-2", "-240° rotation of a face", g.pow(t, 2)),
                        ("e", "180° rotation of an edge", e),
                        ("w", "360° rotation", w),
                    ],
                )))
            }
            ManifoldKind::Octahedral => {
                let g = FiniteGroup::binary_octahedral();
                let [f, v] = [g.generator_indices()[0], g.generator_indices()[1]];
                let w = g.index_of(&-Quaternion::one()).unwrap();
                // edge rotations: real part zero, not conjugate to v²
                let v2 = g.pow(v, 2);
                let classes = g.conjugacy_classes();
                let map = g.class_map(&classes);
                let e = (0..g.order())
                    .find(|&a| g.float(a).w.abs() < 1e-12 && map[a] != map[v2])
                    .unwrap();
                Model::Group(Box::new(GroupModel::named(
                    g.clone(),
                    &[
                        ("c", "constant", 0),
                        ("v", "90° rotation of a vertex", v),
                        ("f", "120° rotation of a face", f),
                        ("v2", "180° rotation of a vertex", v2),
                        ("e", "180° rotation of an edge", e),
                        ("v3", "270° rotation of a vertex", g.pow(v, 3)),
                        ("f2", "240° rotation of a face", g.pow(f, 2)),
                        ("w", "360° rotation", w),
                    ],
                )))
            }
            ManifoldKind::Icosahedral => {
                let g = FiniteGroup::binary_icosahedral();
                let [f, v] = [g.generator_indices()[0], g.generator_indices()[1]];
                let w = g.index_of(&-Quaternion::one()).unwrap();
                let e = (0..g.order()).find(|&a| g.float(a).w.abs() < 1e-12).unwrap();
                Model::Group(Box::new(GroupModel::named(
                    g.clone(),
                    &[
                        ("c", "constant", 0),
                        ("v", "72° rotation of a vertex", v),
                        ("f", "120° rotation of a face", f),
                        ("v2", "144° rotation of a vertex", g.pow(v, 2)),
                        ("e", "180° rotation of an edge", e),
                        ("v3", "216° rotation of a vertex", g.pow(v, 3)),
                        ("f2", "240° rotation of a face", g.pow(f, 2)),
                        ("v4", "288° rotation of a vertex", g.pow(v, 4)),
                        ("w", "360° rotation", w),
                    ],
                )))
            }
        };
        Self { kind, model }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn is_lattice(&self) -> bool {
        self.kind.is_lattice()
    }

    pub fn trivial(&self) -> ClassId {
        match self.model {
            Model::Integer => ClassId::Int(0),
            Model::Square | Model::Hexagonal => ClassId::Pair(0, 0),
            Model::Cyclic { .. } => ClassId::Mod(0),
            Model::Group(_) => ClassId::Group(0),
        }
    }

    pub fn is_trivial(&self, c: ClassId) -> bool {
        c == self.trivial()
    }

    /// The finite fundamental group, for quotients of the three-sphere.
    pub fn group(&self) -> Option<&FiniteGroup> {
        match &self.model {
            Model::Group(g) => Some(&g.group),
            _ => None,
        }
    }

    /// Class of a group element (element index of [`Self::group`]).
    pub fn class_of_element(&self, a: usize) -> Option<ClassId> {
        match &self.model {
            Model::Group(g) => g.class_map.get(a).map(|&c| ClassId::Group(c)),
            _ => None,
        }
    }

    /// Element indices of a finite class.
    pub fn class_members(&self, c: ClassId) -> Option<&[usize]> {
        match (&self.model, c) {
            (Model::Group(g), ClassId::Group(i)) => g.classes.get(i).map(|k| k.members.as_slice()),
            _ => None,
        }
    }

    pub fn contains(&self, c: ClassId) -> bool {
        match (&self.model, c) {
            (Model::Integer, ClassId::Int(_)) => true,
            (Model::Square | Model::Hexagonal, ClassId::Pair(..)) => true,
            (Model::Cyclic { lengths, .. }, ClassId::Mod(m)) => (m as usize) < lengths.len(),
            (Model::Group(g), ClassId::Group(i)) => i < g.classes.len(),
            _ => false,
        }
    }

    pub fn check(&self, c: ClassId) -> Result<(), TopologyError> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(TopologyError::UnknownClass { manifold: self.kind.to_string(), class: format!("{c:?}") })
        }
    }

    /// Length of the shortest closed geodesic in the class.
    pub fn length(&self, c: ClassId) -> f64 {
        match (&self.model, c) {
            (Model::Integer, ClassId::Int(n)) => 2.0 * PI * n.unsigned_abs() as f64,
            (Model::Square, ClassId::Pair(n, m)) => 2.0 * PI * (n as f64).hypot(m as f64),
            (Model::Hexagonal, ClassId::Pair(n, m)) => eisenstein_norm(n, m),
            (Model::Cyclic { lengths, .. }, ClassId::Mod(m)) => lengths[m as usize],
            (Model::Group(g), ClassId::Group(i)) => g.classes[i].lambda,
            _ => f64::NAN,
        }
    }

    /// Lattice norm `|n|`, `|(n, m)|` or `|n + mω|`; zero for finite models.
    pub fn lattice_norm(&self, c: ClassId) -> f64 {
        match (&self.model, c) {
            (Model::Integer, ClassId::Int(n)) => n.unsigned_abs() as f64,
            (Model::Square, ClassId::Pair(n, m)) => (n as f64).hypot(m as f64),
            (Model::Hexagonal, ClassId::Pair(n, m)) => eisenstein_norm(n, m),
            _ => 0.0,
        }
    }

    /// Length of the shortest non-contractible closed geodesic.
    pub fn systole(&self) -> f64 {
        match &self.model {
            Model::Integer | Model::Square => 2.0 * PI,
            Model::Hexagonal => 1.0,
            Model::Cyclic { lengths, .. } => lengths[1..].iter().cloned().fold(f64::INFINITY, f64::min),
            Model::Group(g) => g.classes[1..].iter().map(|c| c.lambda).fold(f64::INFINITY, f64::min),
        }
    }

    /// Classes in the product of two classes.
    pub fn product(&self, a: ClassId, b: ClassId) -> Vec<ClassId> {
        match (&self.model, a, b) {
            (Model::Integer, ClassId::Int(x), ClassId::Int(y)) => vec![ClassId::Int(x + y)],
            (Model::Square | Model::Hexagonal, ClassId::Pair(x, y), ClassId::Pair(u, v)) => {
                vec![ClassId::Pair(x + u, y + v)]
            }
            (Model::Cyclic { lengths, .. }, ClassId::Mod(x), ClassId::Mod(y)) => {
                vec![ClassId::Mod((x + y) % lengths.len() as u32)]
            }
            (Model::Group(g), ClassId::Group(x), ClassId::Group(y)) => {
                g.products[x][y].iter().map(|&c| ClassId::Group(c)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Difference `a − b` in a lattice model.
    pub(crate) fn lattice_sub(&self, a: ClassId, b: ClassId) -> Option<ClassId> {
        match (a, b) {
            (ClassId::Int(x), ClassId::Int(y)) => Some(ClassId::Int(x - y)),
            (ClassId::Pair(x, y), ClassId::Pair(u, v)) => Some(ClassId::Pair(x - u, y - v)),
            _ => None,
        }
    }

    /// All classes, or for lattices those with norm at most `norm_bound`, ordered by length.
    pub fn classes(&self, norm_bound: f64) -> Vec<ClassId> {
        let mut out = match &self.model {
            Model::Integer => {
                let b = norm_bound.floor() as i64;
                (-b..=b).map(ClassId::Int).collect()
            }
            Model::Square | Model::Hexagonal => {
                let b = (norm_bound * 2.0 / 3f64.sqrt()).floor() as i64 + 1;
                let mut v = Vec::new();
                for n in -b..=b {
                    for m in -b..=b {
                        let c = ClassId::Pair(n, m);
                        if self.lattice_norm(c) <= norm_bound + 1e-12 {
                            v.push(c);
                        }
                    }
                }
                v
            }
            Model::Cyclic { lengths, .. } => (0..lengths.len() as u32).map(ClassId::Mod).collect(),
            Model::Group(g) => (0..g.classes.len()).map(ClassId::Group).collect(),
        };
        if self.is_lattice() {
            out.sort_by(|a, b| self.length(*a).total_cmp(&self.length(*b)).then(a.cmp(b)));
        }
        out
    }

    /// Number of elements of the fundamental group in the class.
    pub fn conjugates(&self, c: ClassId) -> usize {
        match (&self.model, c) {
            (Model::Group(g), ClassId::Group(i)) => g.classes[i].members.len(),
            _ => 1,
        }
    }

    pub fn class_name(&self, c: ClassId) -> String {
        match (&self.model, c) {
            (_, ClassId::Int(n)) => format!("γ_{n}"),
            (_, ClassId::Pair(n, m)) => format!("γ_({n},{m})"),
            (Model::Cyclic { keys, .. }, ClassId::Mod(m)) => format!("γ_{}", keys[m as usize]),
            (Model::Group(g), ClassId::Group(i)) => display_key(g.keys[i]),
            _ => format!("{c:?}"),
        }
    }

    pub fn class_description(&self, c: ClassId) -> String {
        match (&self.model, c) {
            (Model::Integer, ClassId::Int(0)) | (Model::Square | Model::Hexagonal, ClassId::Pair(0, 0)) => {
                "constant".to_string()
            }
            (Model::Integer, ClassId::Int(n)) => format!("degree {n} loop"),
            (Model::Square, ClassId::Pair(n, m)) => format!("loop winding ({n}, {m})"),
            (Model::Hexagonal, ClassId::Pair(n, m)) => format!("loop winding {n} + {m}ω"),
            (Model::Cyclic { descriptions, .. }, ClassId::Mod(m)) => descriptions[m as usize].to_string(),
            (Model::Group(g), ClassId::Group(i)) => g.descriptions[i].to_string(),
            _ => String::new(),
        }
    }

    pub fn entry(&self, c: ClassId) -> ClassEntry {
        ClassEntry {
            id: c,
            name: self.class_name(c),
            description: self.class_description(c),
            conjugates: self.conjugates(c),
            lambda: self.length(c),
        }
    }

    /// Class catalog; lattice models list classes with norm at most `norm_bound`.
    pub fn catalog(&self, norm_bound: f64) -> Vec<ClassEntry> {
        self.classes(norm_bound).into_iter().map(|c| self.entry(c)).collect()
    }

    /// Parses a class token: an integer or `n:m` pair for lattices, a key such as
    /// `v2`, `γ_v²`, `+1` or `a` otherwise.
    pub fn parse_class(&self, token: &str) -> Result<ClassId, TopologyError> {
        let err = || TopologyError::ParseClass(token.to_string());
        let t = normalize_key(token);
        let c = match &self.model {
            Model::Integer => ClassId::Int(t.parse().map_err(|_| err())?),
            Model::Square | Model::Hexagonal => {
                let t = t.trim_start_matches('(').trim_end_matches(')');
                let (a, b) = t.split_once([':', ',', ' ']).ok_or_else(err)?;
                ClassId::Pair(a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?)
            }
            Model::Cyclic { keys, .. } => {
                if let Some(i) = keys.iter().position(|k| *k == t) {
                    ClassId::Mod(i as u32)
                } else {
                    let n: i64 = t.parse().map_err(|_| err())?;
                    ClassId::Mod(n.rem_euclid(keys.len() as i64) as u32)
                }
            }
            Model::Group(g) => ClassId::Group(g.keys.iter().position(|k| *k == t).ok_or_else(err)?),
        };
        Ok(c)
    }
}

fn normalize_key(token: &str) -> String {
    let t = token.trim();
    let t = t.strip_prefix("γ_").or_else(|| t.strip_prefix("gamma_")).or_else(|| t.strip_prefix("γ")).unwrap_or(t);
    t.replace('²', "2").replace('³', "3").replace('⁴', "4").replace(['^', '{', '}'], "")
}

fn display_key(key: &str) -> String {
    let (base, pow) = match key.char_indices().last() {
        Some((i, ch)) if ch.is_ascii_digit() && i > 0 => (&key[..i], Some(ch)),
        _ => (key, None),
    };
    let sup = match pow {
        Some('2') => "²",
        Some('3') => "³",
        Some('4') => "⁴",
        _ => "",
    };
    format!("γ_{base}{sup}")
}

impl GroupModel {
    fn new(group: FiniteGroup, spec: &[(&'static str, &'static str, Vec<(usize, u32)>)]) -> Self {
        let named: Vec<_> = spec
            .iter()
            .map(|(k, d, powers)| {
                let e = powers.iter().fold(0, |acc, &(gen, p)| group.mul(acc, group.pow(group.generator_indices()[gen], p)));
                (*k, *d, e)
            })
            .collect();
        Self::named(group, &named)
    }

    fn named(group: FiniteGroup, spec: &[(&'static str, &'static str, usize)]) -> Self {
        let classes = group.conjugacy_classes();
        let class_map = group.class_map(&classes);
        let n = classes.len();
        let mut keys = vec![""; n];
        let mut descriptions = vec![""; n];
        for &(k, d, e) in spec {
            let c = class_map[e];
            assert!(keys[c].is_empty(), "class named twice: {k}");
            keys[c] = k;
            descriptions[c] = d;
        }
        assert!(keys.iter().all(|k| !k.is_empty()), "unnamed class");
        let products = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| group.class_product(&classes, a, b).into_iter().collect::<BTreeSet<_>>().into_iter().collect())
                    .collect()
            })
            .collect();
        Self { group, classes, class_map, products, keys, descriptions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_follow_catalog_order() {
        let m = ManifoldDescriptor::new(ManifoldKind::Octahedral);
        let names: Vec<_> = m.catalog(0.0).into_iter().map(|e| e.name).collect();
        assert_eq!(names, ["γ_c", "γ_v", "γ_f", "γ_v²", "γ_e", "γ_f²", "γ_v³", "γ_w"]);
    }

    #[test]
    fn parse_roundtrip() {
        for kind in ManifoldKind::ALL {
            let m = ManifoldDescriptor::new(kind);
            for c in m.classes(2.0) {
                let name = m.class_name(c);
                assert_eq!(m.parse_class(&name).unwrap(), c, "{kind} {name}");
            }
        }
    }

    #[test]
    fn kind_roundtrip() {
        for kind in ManifoldKind::ALL {
            assert_eq!(kind.to_string().parse::<ManifoldKind>().unwrap(), kind);
        }
        assert!("klein".parse::<ManifoldKind>().is_err());
    }

    #[test]
    fn lattice_products_add() {
        let m = ManifoldDescriptor::new(ManifoldKind::FlatTorus);
        assert_eq!(m.product(ClassId::Pair(1, 2), ClassId::Pair(-3, 1)), vec![ClassId::Pair(-2, 3)]);
        let e = ManifoldDescriptor::new(ManifoldKind::EquilateralTorus);
        assert!((e.length(ClassId::Pair(1, 1)) - 1.0).abs() < 1e-15);
        assert!((e.length(ClassId::Pair(2, 0)) - 2.0).abs() < 1e-15);
    }
}
