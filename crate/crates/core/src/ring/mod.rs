//! Torsion-free, even-degree graded-commutative rings given by structure
//! constants, their Künneth products, and integral classes living in them.

mod class;
mod expr;
pub mod presets;
mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use thiserror::Error;

use crate::lattice::IntersectionLattice;
use crate::linalg;
use crate::scalar::Field;

pub use class::GradedClass;
pub use expr::{parse_class_expr, ParseError};
pub use schema::RingSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("classes live in different rings ({0} vs {1})")]
    RingMismatch(String, String),
    #[error("unknown basis element `{0}`")]
    UnknownBasis(String),
    #[error("basis element `{id}` has odd degree {degree}; only even degrees are supported")]
    OddDegree { id: String, degree: u32 },
    #[error("duplicate basis id `{0}`")]
    DuplicateBasis(String),
    #[error("ring must have exactly one degree-0 basis element, found {0}")]
    Unit(usize),
    #[error("product {a}*{b} contains `{term}` of degree {got}, expected {expected}")]
    ProductDegree {
        a: String,
        b: String,
        term: String,
        got: u32,
        expected: u32,
    },
    #[error("products {a}*{b} and {b}*{a} disagree")]
    NotCommutative { a: String, b: String },
    #[error("product with the unit must be the identity ({0})")]
    UnitProduct(String),
    #[error("associativity fails on ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("pairing is defined on `{0}`, which is not of top degree")]
    PairingDegree(String),
    #[error("pairing is not unimodular (determinant {0})")]
    NotUnimodular(String),
    #[error("ring has top degree {0}; an intersection lattice needs a 4-manifold ring")]
    NotFourManifold(u32),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub id: String,
    pub degree: u32,
}

/// Records how a Künneth product decomposes into its non-product factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorStructure {
    pub leaves: Vec<Arc<RingPresentation>>,
    /// For every basis element of the product, the basis index in each leaf.
    pub components: Vec<Vec<usize>>,
}

type Sparse = BTreeMap<usize, i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingPresentation {
    name: String,
    basis: Vec<BasisElement>,
    unit: usize,
    // products[i][j] = b_i * b_j
    products: Vec<Vec<Sparse>>,
    top_degree: u32,
    pairing: Sparse,
    factors: Option<FactorStructure>,
}

impl RingPresentation {
    /// Builds and validates a ring from structure constants.
    ///
    /// `products` only needs one of `(a, b)`/`(b, a)` and may omit products
    /// with the unit and products that vanish.
    pub fn new(
        name: impl Into<String>,
        basis: Vec<BasisElement>,
        products: &[(String, String, BTreeMap<String, i64>)],
        pairing: &BTreeMap<String, i64>,
    ) -> Result<Self, RingError> {
        let mut index = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            if b.degree % 2 != 0 {
                return Err(RingError::OddDegree {
                    id: b.id.clone(),
                    degree: b.degree,
                });
            }
            if index.insert(b.id.clone(), i).is_some() {
                return Err(RingError::DuplicateBasis(b.id.clone()));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| RingError::UnknownBasis(id.to_string()))
        };
        let units: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].degree == 0).collect();
        if units.len() != 1 {
            return Err(RingError::Unit(units.len()));
        }
        let unit = units[0];
        let n = basis.len();
        let mut table: Vec<Vec<Option<Sparse>>> = vec![vec![None; n]; n];
        for (a, b, terms) in products {
            let (i, j) = (lookup(a)?, lookup(b)?);
            let mut sparse = Sparse::new();
            for (t, &c) in terms {
                let k = lookup(t)?;
                let expected = basis[i].degree + basis[j].degree;
                if c != 0 && basis[k].degree != expected {
                    return Err(RingError::ProductDegree {
                        a: a.clone(),
                        b: b.clone(),
                        term: t.clone(),
                        got: basis[k].degree,
                        expected,
                    });
                }
                if c != 0 {
                    *sparse.entry(k).or_insert(0) += c;
                }
            }
            sparse.retain(|_, c| *c != 0);
            for (x, y) in [(i, j), (j, i)] {
                match &table[x][y] {
                    Some(existing) if *existing != sparse => {
                        return Err(RingError::NotCommutative {
                            a: basis[x].id.clone(),
                            b: basis[y].id.clone(),
                        })
                    }
                    _ => table[x][y] = Some(sparse.clone()),
                }
            }
        }
        for i in 0..n {
            let ident: Sparse = [(i, 1)].into_iter().collect();
            for (x, y) in [(unit, i), (i, unit)] {
                match &table[x][y] {
                    Some(existing) if *existing != ident => {
                        return Err(RingError::UnitProduct(basis[i].id.clone()))
                    }
                    _ => table[x][y] = Some(ident.clone()),
                }
            }
        }
        let products: Vec<Vec<Sparse>> = table
            .into_iter()
            .map(|row| row.into_iter().map(Option::unwrap_or_default).collect())
            .collect();
        let top_degree = basis.iter().map(|b| b.degree).max().unwrap_or(0);
        let mut pair = Sparse::new();
        for (id, &c) in pairing {
            let k = lookup(id)?;
            if basis[k].degree != top_degree {
                return Err(RingError::PairingDegree(id.clone()));
            }
            if c != 0 {
                pair.insert(k, c);
            }
        }
        let ring = RingPresentation {
            name: name.into(),
            basis,
            unit,
            products,
            top_degree,
            pairing: pair,
            factors: None,
        };
        ring.check_associative()?;
        Ok(ring)
    }

    fn check_associative(&self) -> Result<(), RingError> {
        let n = self.basis.len();
        for a in 0..n {
            for b in 0..n {
                let ab = &self.products[a][b];
                for c in 0..n {
                    let left = self.mul_sparse(ab, &[(c, 1)].into_iter().collect());
                    let bc = &self.products[b][c];
                    let right = self.mul_sparse(&[(a, 1)].into_iter().collect(), bc);
                    if left != right {
                        return Err(RingError::NotAssociative(
                            self.basis[a].id.clone(),
                            self.basis[b].id.clone(),
                            self.basis[c].id.clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn mul_sparse(&self, x: &Sparse, y: &Sparse) -> Sparse {
        let mut out = Sparse::new();
        for (&i, &a) in x {
            for (&j, &b) in y {
                for (&k, &c) in &self.products[i][j] {
                    *out.entry(k).or_insert(0) += a * b * c;
                }
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn top_degree(&self) -> u32 {
        self.top_degree
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.id == id)
    }

    pub fn degree_of(&self, index: usize) -> u32 {
        self.basis[index].degree
    }

    /// Structure constants of `b_i * b_j`.
    pub fn product(&self, i: usize, j: usize) -> &BTreeMap<usize, i64> {
        &self.products[i][j]
    }

    /// Fundamental pairing on the top-degree basis element `i` (0 elsewhere).
    pub fn pairing_of(&self, i: usize) -> i64 {
        self.pairing.get(&i).copied().unwrap_or(0)
    }

    pub fn factors(&self) -> Option<&FactorStructure> {
        self.factors.as_ref()
    }

    /// Ranks of the graded pieces, indexed by degree (odd degrees are 0).
    pub fn ranks_by_degree(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.top_degree as usize + 1];
        for b in &self.basis {
            ranks[b.degree as usize] += 1;
        }
        ranks
    }

    /// Indices of basis elements of a given degree.
    pub fn degree_indices(&self, degree: u32) -> Vec<usize> {
        (0..self.basis.len())
            .filter(|&i| self.basis[i].degree == degree)
            .collect()
    }

    /// Matrix `∫ b_i b_j` over the whole basis.
    pub fn pairing_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.products[i][j]
                            .iter()
                            .map(|(&k, &c)| c * self.pairing_of(k))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Intersection lattice on `H²` of a 4-manifold ring, in the order of
    /// [`Self::degree_indices`]`(2)`.
    pub fn intersection_lattice(&self) -> Result<IntersectionLattice, RingError> {
        if self.top_degree != 4 {
            return Err(RingError::NotFourManifold(self.top_degree));
        }
        let idx = self.degree_indices(2);
        let full = self.pairing_matrix();
        let gram: Vec<Vec<i64>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| full[i][j]).collect())
            .collect();
        IntersectionLattice::new(gram).map_err(|e| RingError::NotUnimodular(e.to_string()))
    }

    /// Returns a copy with every basis id passed through `rename`.
    pub fn renamed(&self, name: impl Into<String>, rename: impl Fn(&str) -> String) -> Self {
        let mut out = self.clone();
        out.name = name.into();
        for b in out.basis.iter_mut() {
            if b.degree > 0 {
                b.id = rename(&b.id);
            }
        }
        out
    }

    pub fn basis_class(self: &Arc<Self>, index: usize) -> GradedClass {
        GradedClass::basis(self, index)
    }

    /// The class of a named basis element.
    pub fn class(self: &Arc<Self>, id: &str) -> Result<GradedClass, RingError> {
        let i = self
            .index_of(id)
            .ok_or_else(|| RingError::UnknownBasis(id.to_string()))?;
        Ok(GradedClass::basis(self, i))
    }

    pub fn unit(self: &Arc<Self>) -> GradedClass {
        GradedClass::basis(self, self.unit)
    }

    pub fn zero(self: &Arc<Self>) -> GradedClass {
        GradedClass::zero(self)
    }

    /// Parses a class expression such as `2*u1 + u1*h`.
    pub fn parse(self: &Arc<Self>, text: &str) -> Result<GradedClass, RingError> {
        parse_class_expr(text, self)
    }

    fn leaves(self: &Arc<Self>) -> (Vec<Arc<RingPresentation>>, Vec<Vec<usize>>) {
        match &self.factors {
            Some(f) => (f.leaves.clone(), f.components.clone()),
            None => (
                vec![self.clone()],
                (0..self.rank()).map(|i| vec![i]).collect(),
            ),
        }
    }
}

impl fmt::Display for RingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// Inclusion of a Künneth factor: basis index in the factor to basis index
/// in the product (`a ↦ a × 1` or `b ↦ 1 × b`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inclusion {
    pub map: Vec<usize>,
}

impl Inclusion {
    pub fn apply(&self, class: &GradedClass, target: &Arc<RingPresentation>) -> GradedClass {
        let coeffs = class
            .coeffs()
            .iter()
            .map(|(&i, &c)| (self.map[i], c))
            .collect();
        GradedClass::from_coeffs(target, coeffs)
    }
}

#[derive(Debug, Clone)]
pub struct KunnethProduct {
    pub ring: Arc<RingPresentation>,
    pub left: Inclusion,
    pub right: Inclusion,
    /// `(i, j)` pairs of factor indices for every product basis element.
    pub pairs: Vec<(usize, usize)>,
}

impl KunnethProduct {
    /// The cross product `a × b`.
    pub fn cross(&self, a: &GradedClass, b: &GradedClass) -> GradedClass {
        let mut coeffs = BTreeMap::new();
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            let c = a.coeff(i) * b.coeff(j);
            if c != 0 {
                coeffs.insert(k, c);
            }
        }
        GradedClass::from_coeffs(&self.ring, coeffs)
    }
}

/// Künneth product `r1 ⊗ r2`. Basis ids are the `*`-joined non-unit factor
/// ids; ids of `r2` that collide with ids of `r1` get a numeric suffix.
pub fn kunneth(
    r1: &Arc<RingPresentation>,
    r2: &Arc<RingPresentation>,
) -> Result<KunnethProduct, RingError> {
    for b in r1.basis.iter().chain(r2.basis.iter()) {
        if b.degree % 2 != 0 {
            return Err(RingError::OddDegree {
                id: b.id.clone(),
                degree: b.degree,
            });
        }
    }
    let taken: Vec<&str> = r1.basis.iter().map(|b| b.id.as_str()).collect();
    let right_ids: Vec<String> = r2
        .basis
        .iter()
        .enumerate()
        .map(|(j, b)| {
            if j == r2.unit || !taken.contains(&b.id.as_str()) {
                b.id.clone()
            } else {
                (2..)
                    .map(|s| format!("{}{}", b.id, s))
                    .find(|cand| !taken.contains(&cand.as_str()))
                    .expect("unbounded suffix search")
            }
        })
        .collect();
    let mut basis = Vec::new();
    let mut pairs = Vec::new();
    for (i, a) in r1.basis.iter().enumerate() {
        for (j, b) in r2.basis.iter().enumerate() {
            let id = match (i == r1.unit, j == r2.unit) {
                (true, true) => "1".to_string(),
                (true, false) => right_ids[j].clone(),
                (false, true) => a.id.clone(),
                (false, false) => format!("{}*{}", a.id, right_ids[j]),
            };
            basis.push(BasisElement {
                id,
                degree: a.degree + b.degree,
            });
            pairs.push((i, j));
        }
    }
    let n2 = r2.rank();
    let pos = |i: usize, j: usize| i * n2 + j;
    let mut products = vec![vec![Sparse::new(); basis.len()]; basis.len()];
    for (x, &(i1, j1)) in pairs.iter().enumerate() {
        for (y, &(i2, j2)) in pairs.iter().enumerate() {
            let mut out = Sparse::new();
            for (&a, &ca) in &r1.products[i1][i2] {
                for (&b, &cb) in &r2.products[j1][j2] {
                    out.insert(pos(a, b), ca * cb);
                }
            }
            products[x][y] = out;
        }
    }
    let mut pairing = Sparse::new();
    for (&a, &ca) in &r1.pairing {
        for (&b, &cb) in &r2.pairing {
            pairing.insert(pos(a, b), ca * cb);
        }
    }
    let (l1, c1) = r1.leaves();
    let (l2, c2) = r2.leaves();
    let components = pairs
        .iter()
        .map(|&(i, j)| c1[i].iter().chain(c2[j].iter()).copied().collect())
        .collect();
    let ring = Arc::new(RingPresentation {
        name: format!("{}x{}", r1.name, r2.name),
        basis,
        unit: pos(r1.unit, r2.unit),
        products,
        top_degree: r1.top_degree + r2.top_degree,
        pairing,
        factors: Some(FactorStructure {
            leaves: l1.into_iter().chain(l2).collect(),
            components,
        }),
    });
    let left = Inclusion {
        map: (0..r1.rank()).map(|i| pos(i, r2.unit)).collect(),
    };
    let right = Inclusion {
        map: (0..r2.rank()).map(|j| pos(r1.unit, j)).collect(),
    };
    Ok(KunnethProduct {
        ring,
        left,
        right,
        pairs,
    })
}

/// Poincaré dual of the diagonal in `r ⊗ r`: `Σ C_ij b_i × b_j` where
/// `C` is the inverse of the pairing matrix `∫ b_i b_j`.
pub fn diagonal(r: &Arc<RingPresentation>) -> Result<(KunnethProduct, GradedClass), RingError> {
    let pm = r.pairing_matrix();
    let det = linalg::determinant(&pm);
    let inv = linalg::inverse::<BigRational>(&linalg::to_field(&pm))
        .ok_or_else(|| RingError::NotUnimodular(det.to_string()))?;
    let mut c = vec![vec![0i64; r.rank()]; r.rank()];
    for (i, row) in inv.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            c[i][j] = v
                .as_integer()
                .ok_or_else(|| RingError::NotUnimodular(det.to_string()))?;
        }
    }
    let prod = kunneth(r, r)?;
    let mut coeffs = BTreeMap::new();
    for (k, &(i, j)) in prod.pairs.iter().enumerate() {
        if c[i][j] != 0 {
            coeffs.insert(k, c[i][j]);
        }
    }
    let delta = GradedClass::from_coeffs(&prod.ring, coeffs);
    Ok((prod, delta))
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    fn ranks(r: &RingPresentation) -> Vec<usize> {
        r.ranks_by_degree().into_iter().step_by(2).collect()
    }

    #[test]
    fn sphere_squared_ranks() {
        let s = Arc::new(sphere());
        let p = kunneth(&s, &s).unwrap();
        assert_eq!(ranks(&p.ring), vec![1, 2, 1]);
        let ids: Vec<&str> = p.ring.basis().iter().map(|b| b.id.as_str()).collect();
        assert_eq!(ids, vec!["1", "h2", "h", "h*h2"]);
    }

    #[test]
    fn kunneth_with_projective_plane_keeps_cubic_relation() {
        let x = Arc::new(s2xs2());
        let cp2 = Arc::new(projective_space(2));
        let p = kunneth(&x, &cp2).unwrap();
        assert_eq!(p.ring.degree_indices(2).len(), 3);
        let h = p.ring.class("h").unwrap();
        let h3 = h.cup(&h).unwrap().cup(&h).unwrap();
        assert!(h3.is_zero());
        let h2 = h.cup(&h).unwrap();
        assert!(!h2.is_zero());
    }

    #[test]
    fn triple_sphere_product() {
        let r = sphere_product(3);
        assert_eq!(ranks(&r), vec![1, 3, 3, 1]);
        for i in 1..=3 {
            let h = r.class(&format!("h{i}")).unwrap();
            assert!(h.cup(&h).unwrap().is_zero());
        }
        let top = r.parse("h1*h2*h3").unwrap();
        assert_eq!(top.integrate(), 1);
        assert_eq!(r.factors().unwrap().leaves.len(), 3);
    }

    #[test]
    fn kunneth_rank_formula() {
        let a = Arc::new(projective_space(3));
        let b = Arc::new(connected_sum_s2xs2(2));
        let p = kunneth(&a, &b).unwrap();
        let ra = a.ranks_by_degree();
        let rb = b.ranks_by_degree();
        let rp = p.ring.ranks_by_degree();
        for (d, &got) in rp.iter().enumerate() {
            let expected: usize = (0..=d)
                .map(|i| ra.get(i).copied().unwrap_or(0) * rb.get(d - i).copied().unwrap_or(0))
                .sum();
            assert_eq!(got, expected, "degree {d}");
        }
    }

    #[test]
    fn diagonal_of_sphere() {
        let s = Arc::new(sphere());
        let (prod, delta) = diagonal(&s).unwrap();
        let expected = prod
            .cross(&s.class("h").unwrap(), &s.unit())
            .add(&prod.cross(&s.unit(), &s.class("h").unwrap()))
            .unwrap();
        assert_eq!(delta, expected);
    }

    #[test]
    fn diagonal_of_point() {
        let p = Arc::new(point());
        let (prod, delta) = diagonal(&p).unwrap();
        assert_eq!(delta, prod.cross(&p.unit(), &p.unit()));
    }

    #[test]
    fn diagonal_reproduces_pairing() {
        // ∫ (x × y) · Δ = ∫ x·y for every pair of basis elements
        for r in [
            Arc::new(s2xs2()),
            Arc::new(projective_space(3)),
            Arc::new(connected_sum_cp2(1, 2)),
        ] {
            let (prod, delta) = diagonal(&r).unwrap();
            for i in 0..r.rank() {
                for j in 0..r.rank() {
                    let x = r.basis_class(i);
                    let y = r.basis_class(j);
                    let lhs = prod.cross(&x, &y).cup(&delta).unwrap().integrate();
                    let rhs = x.cup(&y).unwrap().integrate();
                    assert_eq!(lhs, rhs, "{} {}", r.basis()[i].id, r.basis()[j].id);
                }
            }
        }
    }

    #[test]
    fn diagonal_requires_unimodular_pairing() {
        let basis = vec![
            BasisElement {
                id: "1".into(),
                degree: 0,
            },
            BasisElement {
                id: "x".into(),
                degree: 2,
            },
        ];
        let products = vec![];
        let pairing = [("x".to_string(), 2)].into_iter().collect();
        let r = Arc::new(RingPresentation::new("bad", basis, &products, &pairing).unwrap());
        assert!(matches!(diagonal(&r), Err(RingError::NotUnimodular(_))));
    }

    #[test]
    fn rejects_odd_degrees_and_non_associative_tables() {
        let basis = vec![
            BasisElement {
                id: "1".into(),
                degree: 0,
            },
            BasisElement {
                id: "a".into(),
                degree: 1,
            },
        ];
        let err = RingPresentation::new("odd", basis, &[], &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, RingError::OddDegree { .. }));

        let basis = vec![
            BasisElement {
                id: "1".into(),
                degree: 0,
            },
            BasisElement {
                id: "x".into(),
                degree: 2,
            },
            BasisElement {
                id: "y".into(),
                degree: 4,
            },
            BasisElement {
                id: "z".into(),
                degree: 6,
            },
        ];
        let t = |a: &str, b: &str, c: &str| {
            (
                a.to_string(),
                b.to_string(),
                [(c.to_string(), 1)].into_iter().collect(),
            )
        };
        // y*x listed with a different coefficient than x*y
        let products = vec![
            t("x", "x", "y"),
            t("x", "y", "z"),
            (
                "y".to_string(),
                "x".to_string(),
                [("z".to_string(), 2)].into_iter().collect(),
            ),
        ];
        let err =
            RingPresentation::new("nc", basis.clone(), &products, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, RingError::NotCommutative { .. }));
        let basis = vec![
            BasisElement {
                id: "1".into(),
                degree: 0,
            },
            BasisElement {
                id: "a".into(),
                degree: 2,
            },
            BasisElement {
                id: "b".into(),
                degree: 2,
            },
            BasisElement {
                id: "c".into(),
                degree: 4,
            },
            BasisElement {
                id: "d".into(),
                degree: 6,
            },
        ];
        let products = vec![t("a", "a", "c"), t("c", "b", "d")];
        // (a*a)*b = c*b = d, a*(a*b) = a*0 = 0
        let err = RingPresentation::new("na", basis, &products, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, RingError::NotAssociative(..)));
    }

    #[test]
    fn all_presets_are_associative() {
        for r in all_presets() {
            r.check_associative().unwrap();
        }
    }
}
