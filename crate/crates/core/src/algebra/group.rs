use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use super::field::{q, FieldScalar};
use super::quaternion::{Quat, Quaternion};
use super::AlgebraError;

/// Default cap on the number of elements produced by closure.
pub const DEFAULT_CAP: usize = 1024;

/// Finite subgroup of the unit quaternions, closed under multiplication.
///
/// Elements are indexed in generation order: breadth first from the identity,
/// each level sorted by descending lexicographic order of exact coefficients. Index 0 is the identity.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    elements: Vec<Quaternion>,
    floats: Vec<Quat>,
    table: Vec<u32>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    /// Member element indices, ascending.
    pub members: Vec<usize>,
    /// Canonical representative: the member with least element index.
    pub representative: usize,
    /// Length of the shortest closed geodesic in the class.
    pub lambda: f64,
    /// `lambda / π` as `(p, q)` when it is a rational with small denominator.
    pub lambda_over_pi: Option<(i64, i64)>,
}

impl FiniteGroup {
    /// Closes the generators under multiplication, failing if more than `cap` elements appear.
    pub fn generate(generators: &[Quaternion], cap: usize) -> Result<Self, AlgebraError> {
        if generators.is_empty() {
            return Err(AlgebraError::NoGenerators);
        }
        for (idx, g) in generators.iter().enumerate() {
            if !g.is_unit() {
                return Err(AlgebraError::NotUnit { index: idx });
            }
        }
        let mut elements = vec![Quaternion::one()];
        let mut index: HashMap<Quaternion, usize> = HashMap::new();
        index.insert(Quaternion::one(), 0);
        // parent[e] · generators[via[e]] = e
        let mut parent = vec![0usize];
        let mut via = vec![0usize];
        let mut right: Vec<Vec<Quaternion>> = Vec::new();
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut level: BTreeMap<Quaternion, (usize, usize)> = BTreeMap::new();
            for &x in &frontier {
                let prods: Vec<Quaternion> = generators.iter().map(|g| &elements[x] * g).collect();
                for (gi, y) in prods.iter().enumerate() {
                    if !index.contains_key(y) {
                        level.entry(y.clone()).or_insert((x, gi));
                    }
                }
                if right.len() <= x {
                    right.resize(x + 1, Vec::new());
                }
                right[x] = prods;
            }
            frontier.clear();
            for (y, (x, gi)) in level.into_iter().rev() {
                if elements.len() >= cap {
                    return Err(AlgebraError::ClosureExceedsCap { cap });
                }
                index.insert(y.clone(), elements.len());
                frontier.push(elements.len());
                parent.push(x);
                via.push(gi);
                elements.push(y);
            }
        }
        let n = elements.len();
        let ng = generators.len();
        let right: Vec<usize> = right.iter().flat_map(|row| row.iter().map(|y| index[y])).collect();
        // a·b = (a·parent(b))·g, filled in index order since parents precede children
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            table[a * n] = a as u32;
            for b in 1..n {
                let ap = table[a * n + parent[b]] as usize;
                table[a * n + b] = right[ap * ng + via[b]] as u32;
            }
        }
        let inverse = (0..n).map(|a| (0..n).find(|&b| table[a * n + b] == 0).expect("group")).collect();
        let generators = generators.iter().map(|g| index[g]).collect();
        let floats = elements.iter().map(|e| e.to_f64()).collect();
        Ok(Self { elements, floats, table, inverse, generators })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, a: usize) -> &Quaternion {
        &self.elements[a]
    }

    pub fn elements(&self) -> &[Quaternion] {
        &self.elements
    }

    pub fn float(&self, a: usize) -> Quat {
        self.floats[a]
    }

    pub fn floats(&self) -> &[Quat] {
        &self.floats
    }

    pub fn generator_indices(&self) -> &[usize] {
        &self.generators
    }

    pub fn index_of(&self, q: &Quaternion) -> Option<usize> {
        self.elements.iter().position(|e| e == q)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Index of `a^k` for `k >= 0`.
    pub fn pow(&self, a: usize, k: u32) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    /// Conjugacy classes ordered by `(lambda, size, representative)`.
    pub fn conjugacy_classes(&self) -> Vec<ConjugacyClass> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for a in 0..n {
            if seen[a] {
                continue;
            }
            let members: BTreeSet<usize> = (0..n).map(|g| self.conjugate(g, a)).collect();
            for &m in &members {
                seen[m] = true;
            }
            let lambda = geodesic_length(&self.elements[a]);
            classes.push(ConjugacyClass {
                members: members.into_iter().collect(),
                representative: a,
                lambda,
                lambda_over_pi: rational_multiple(lambda / PI, 12, 1e-12),
            });
        }
        classes.sort_by(|p, q| {
            let dl = p.lambda - q.lambda;
            if dl.abs() > 1e-12 {
                return p.lambda.total_cmp(&q.lambda);
            }
            (p.members.len(), p.representative).cmp(&(q.members.len(), q.representative))
        });
        classes
    }

    /// Class index of each element for the given class list.
    pub fn class_map(&self, classes: &[ConjugacyClass]) -> Vec<usize> {
        let mut map = vec![usize::MAX; self.order()];
        for (c, cls) in classes.iter().enumerate() {
            for &m in &cls.members {
                map[m] = c;
            }
        }
        map
    }

    /// Classes contained in the product `c1 · c2`.
    ///
    /// Products of a single representative of `c1` with all of `c2` meet every class of the product.
    pub fn class_product(&self, classes: &[ConjugacyClass], c1: usize, c2: usize) -> BTreeSet<usize> {
        let map = self.class_map(classes);
        let a = classes[c1].representative;
        classes[c2].members.iter().map(|&b| map[self.mul(a, b)]).collect()
    }

    /// The identity, −1 pair: the preimage of the trivial rotation.
    pub fn sign_group() -> Self {
        Self::generate(&[-Quaternion::one()], DEFAULT_CAP).expect("finite")
    }

    pub fn quaternion_group() -> Self {
        Self::generate(&[Quaternion::i(), Quaternion::j()], DEFAULT_CAP).expect("finite")
    }

    pub fn binary_tetrahedral() -> Self {
        Self::generate(&[Quaternion::from_ints(1, 1, 1, 1, 2), Quaternion::from_ints(1, 1, 1, -1, 2)], DEFAULT_CAP)
            .expect("finite")
    }

    pub fn binary_octahedral() -> Self {
        let s = FieldScalar::sqrt2().scale(&q(1, 2));
        let v = Quaternion::new(s.clone(), s, FieldScalar::zero(), FieldScalar::zero());
        Self::generate(&[Quaternion::from_ints(1, 1, 1, 1, 2), v], DEFAULT_CAP).expect("finite")
    }

    pub fn binary_icosahedral() -> Self {
        let quarter = q(1, 4);
        let phi2 = (FieldScalar::one() + FieldScalar::sqrt5()).scale(&quarter);
        let phi_inv2 = (FieldScalar::sqrt5() - FieldScalar::one()).scale(&quarter);
        let v = Quaternion::new(phi2, phi_inv2, FieldScalar::frac(1, 2), FieldScalar::zero());
        Self::generate(&[Quaternion::from_ints(1, 1, 1, 1, 2), v], DEFAULT_CAP).expect("finite")
    }
}

/// Length `2·arccos(Re q)` of the shortest geodesic from 1 to the unit quaternion `q`,
/// measured in the metric that makes SU(2) → SO(3) a local isometry.
pub fn geodesic_length(q: &Quaternion) -> f64 {
    2.0 * q.w.to_f64().clamp(-1.0, 1.0).acos()
}

/// Finds `p/q ≈ x` with `1 <= q <= max_den` and `|x - p/q| <= tol`.
pub fn rational_multiple(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    for q in 1..=max_den {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= tol {
            return Some((p as i64, q));
        }
    }
    None
}
