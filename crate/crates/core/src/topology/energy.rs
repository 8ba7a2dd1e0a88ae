use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use super::catalog::{ClassId, ManifoldDescriptor};
use super::TopologyError;

/// Tolerance for comparing energies and detecting ties.
pub const ENERGY_TOL: f64 = 1e-9;

fn tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= ENERGY_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Classes reachable as products `c₁ ∗ c₂ ∗ … ∗ cₙ`, starting from the trivial class.
fn reachable(m: &ManifoldDescriptor, factors: &[ClassId]) -> BTreeSet<ClassId> {
    let mut set = BTreeSet::from([m.trivial()]);
    for &f in factors {
        set = set.iter().flat_map(|&r| m.product(r, f)).collect();
    }
    set
}

/// Whether singularities of classes `singular` together with inner boundary data
/// `inner` can fill the outer boundary datum `outer`:
/// `outer ∈ h₁ ∗ … ∗ hₖ ∗ g₁ ∗ … ∗ gₗ`, all loops oriented anticlockwise.
pub fn is_topological_resolution(
    m: &ManifoldDescriptor,
    outer: ClassId,
    inner: &[ClassId],
    singular: &[ClassId],
) -> Result<bool, TopologyError> {
    for &c in std::iter::once(&outer).chain(inner).chain(singular) {
        m.check(c)?;
    }
    let factors: Vec<ClassId> = singular.iter().chain(inner).copied().collect();
    Ok(reachable(m, &factors).contains(&outer))
}

/// Singular energy of a class with all its minimal decompositions.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularEnergy {
    pub energy: f64,
    /// Minimal multisets of classes, each sorted, listed in canonical order.
    pub decompositions: Vec<Vec<ClassId>>,
}

/// Bellman fix-point for `E(c) = min(λ(c)²/4π, min_{c ∈ c₁∗c₂} E(c₁) + E(c₂))`
/// over a finite universe of classes.
#[derive(Clone, Debug)]
pub struct SingularEnergySolver<'a> {
    m: &'a ManifoldDescriptor,
    universe: Vec<ClassId>,
    index: HashMap<ClassId, usize>,
    energy: Vec<f64>,
    bound: f64,
}

impl<'a> SingularEnergySolver<'a> {
    /// `norm_bound` limits the lattice classes considered; ignored for finite models.
    pub fn new(m: &'a ManifoldDescriptor, norm_bound: f64) -> Self {
        let universe = m.classes(norm_bound);
        let index = universe.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let energy = universe.iter().map(|&c| m.length(c).powi(2) / (4.0 * PI)).collect();
        let mut s = Self { m, universe, index, energy, bound: norm_bound };
        s.relax();
        s
    }

    // pairs (c1, c2) of nontrivial classes with c ∈ c1 ∗ c2
    fn splits(&self, c: usize) -> Vec<(usize, usize)> {
        let target = self.universe[c];
        let mut out = Vec::new();
        for (i, &c1) in self.universe.iter().enumerate() {
            if self.m.is_trivial(c1) {
                continue;
            }
            if self.m.is_lattice() {
                if let Some(&j) = self.m.lattice_sub(target, c1).and_then(|c2| self.index.get(&c2)) {
                    if !self.m.is_trivial(self.universe[j]) {
                        out.push((i, j));
                    }
                }
            } else {
                for (j, &c2) in self.universe.iter().enumerate() {
                    if !self.m.is_trivial(c2) && self.m.product(c1, c2).contains(&target) {
                        out.push((i, j));
                    }
                }
            }
        }
        out
    }

    fn relax(&mut self) {
        let n = self.universe.len();
        let splits: Vec<_> = (0..n).map(|c| self.splits(c)).collect();
        loop {
            let mut changed = false;
            for c in 0..n {
                for &(i, j) in &splits[c] {
                    let e = self.energy[i] + self.energy[j];
                    if e < self.energy[c] && !tie(e, self.energy[c]) {
                        self.energy[c] = e;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn lookup(&self, c: ClassId) -> Result<usize, TopologyError> {
        self.m.check(c)?;
        let norm = self.m.lattice_norm(c);
        if self.m.is_lattice() && self.bound < 2.0 * norm {
            return Err(TopologyError::NormBoundTooSmall { bound: self.bound, norm });
        }
        self.index
            .get(&c)
            .copied()
            .ok_or_else(|| TopologyError::UnknownClass { manifold: self.m.kind().to_string(), class: format!("{c:?}") })
    }

    pub fn energy(&self, c: ClassId) -> Result<f64, TopologyError> {
        Ok(self.energy[self.lookup(c)?])
    }

    pub fn solve(&self, c: ClassId) -> Result<SingularEnergy, TopologyError> {
        let i = self.lookup(c)?;
        let mut memo = HashMap::new();
        let mut decompositions: Vec<Vec<ClassId>> = self.decompose(i, &mut memo).into_iter().collect();
        decompositions.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(SingularEnergy { energy: self.energy[i], decompositions })
    }

    fn decompose(&self, c: usize, memo: &mut HashMap<usize, BTreeSet<Vec<ClassId>>>) -> BTreeSet<Vec<ClassId>> {
        if let Some(d) = memo.get(&c) {
            return d.clone();
        }
        let class = self.universe[c];
        let mut out = BTreeSet::new();
        if self.m.is_trivial(class) {
            out.insert(Vec::new());
            memo.insert(c, out.clone());
            return out;
        }
        let e = self.energy[c];
        if tie(self.m.length(class).powi(2) / (4.0 * PI), e) {
            out.insert(vec![class]);
        }
        for (i, j) in self.splits(c) {
            if !tie(self.energy[i] + self.energy[j], e) {
                continue;
            }
            let left = self.decompose(i, memo);
            let right = self.decompose(j, memo);
            for l in &left {
                for r in &right {
                    let mut v: Vec<ClassId> = l.iter().chain(r).copied().collect();
                    v.sort();
                    out.insert(v);
                }
            }
        }
        memo.insert(c, out.clone());
        out
    }
}

/// Singular energy of `c` and its minimal decompositions.
///
/// For lattices, classes up to `norm_bound` (default four times the norm of `c`)
/// are considered; the bound must be at least twice the norm of `c`.
pub fn singular_energy(
    m: &ManifoldDescriptor,
    c: ClassId,
    norm_bound: Option<f64>,
) -> Result<SingularEnergy, TopologyError> {
    m.check(c)?;
    let bound = norm_bound.unwrap_or_else(|| (4.0 * m.lattice_norm(c)).max(1.0));
    SingularEnergySolver::new(m, bound).solve(c)
}

/// Least singular energy over classes compatible with the boundary data.
pub fn singular_energy_of_boundary(
    m: &ManifoldDescriptor,
    outer: ClassId,
    inner: &[ClassId],
) -> Result<f64, TopologyError> {
    for &c in std::iter::once(&outer).chain(inner) {
        m.check(c)?;
    }
    if m.is_lattice() {
        let mut c = outer;
        for &g in inner {
            c = m.lattice_sub(c, g).expect("lattice");
        }
        return Ok(singular_energy(m, c, None)?.energy);
    }
    let solver = SingularEnergySolver::new(m, 0.0);
    let mut best: Option<f64> = None;
    for c in m.classes(0.0) {
        if is_topological_resolution(m, outer, inner, &[c])? {
            let e = solver.energy(c)?;
            best = Some(best.map_or(e, |b: f64| b.min(e)));
        }
    }
    best.ok_or(TopologyError::Incompatible)
}

/// Whether the class is its own unique minimal decomposition.
pub fn is_atomic(m: &ManifoldDescriptor, c: ClassId) -> Result<bool, TopologyError> {
    let s = singular_energy(m, c, None)?;
    Ok(!m.is_trivial(c) && tie(s.energy, m.length(c).powi(2) / (4.0 * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::ManifoldKind;

    #[test]
    fn circle_degree_splits_into_units() {
        let m = ManifoldDescriptor::new(ManifoldKind::Circle);
        let s = singular_energy(&m, ClassId::Int(3), None).unwrap();
        assert!((s.energy - 3.0 * PI).abs() < 1e-12);
        assert_eq!(s.decompositions, vec![vec![ClassId::Int(1); 3]]);
        let s = singular_energy(&m, ClassId::Int(-2), None).unwrap();
        assert_eq!(s.decompositions, vec![vec![ClassId::Int(-1); 2]]);
    }

    #[test]
    fn flat_torus_diagonal_tie() {
        let m = ManifoldDescriptor::new(ManifoldKind::FlatTorus);
        let s = singular_energy(&m, ClassId::Pair(1, 1), None).unwrap();
        assert!((s.energy - 2.0 * PI).abs() < 1e-12);
        assert_eq!(
            s.decompositions,
            vec![vec![ClassId::Pair(1, 1)], vec![ClassId::Pair(0, 1), ClassId::Pair(1, 0)]]
        );
    }

    #[test]
    fn norm_bound_checked() {
        let m = ManifoldDescriptor::new(ManifoldKind::Circle);
        assert!(matches!(
            singular_energy(&m, ClassId::Int(3), Some(5.0)),
            Err(TopologyError::NormBoundTooSmall { .. })
        ));
    }

    #[test]
    fn resolution_examples() {
        let m = ManifoldDescriptor::new(ManifoldKind::Circle);
        assert!(is_topological_resolution(&m, ClassId::Int(2), &[ClassId::Int(1)], &[ClassId::Int(1)]).unwrap());
        assert!(!is_topological_resolution(&m, ClassId::Int(2), &[], &[ClassId::Int(1)]).unwrap());
        let o = ManifoldDescriptor::new(ManifoldKind::Orthorhombic);
        let x = o.parse_class("x").unwrap();
        let y = o.parse_class("y").unwrap();
        let z = o.parse_class("z").unwrap();
        assert!(is_topological_resolution(&o, z, &[], &[x, y]).unwrap());
        assert!(!is_topological_resolution(&o, x, &[], &[x, y]).unwrap());
    }

    #[test]
    fn boundary_energy_and_atomicity() {
        let m = ManifoldDescriptor::new(ManifoldKind::Octahedral);
        let w = m.parse_class("w").unwrap();
        let v = m.parse_class("v").unwrap();
        let f = m.parse_class("f").unwrap();
        let e = singular_energy_of_boundary(&m, w, &[]).unwrap();
        assert!((e - PI / 4.0).abs() < 1e-12);
        assert!(is_atomic(&m, v).unwrap());
        assert!(is_atomic(&m, f).unwrap());
        assert!(!is_atomic(&m, w).unwrap());
        assert!(!is_atomic(&m, m.trivial()).unwrap());
    }
}
