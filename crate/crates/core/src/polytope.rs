//! Unit balls of norms `N(x) = Σ |ℓᵢ(x)|`, their facets and Euler classes,
//! and linear symmetries between facets.
//!
//! The ball is `{x : ⟨u, x⟩ ≤ 1}` over the vertices `u = Σ εᵢ ℓᵢ` of the
//! zonotope spanned by the covectors. On the cone where the signs of the
//! `ℓᵢ` are `ε`, the norm is the single linear form `u_ε`, so the facet with
//! normal `u_ε` is that cone cut by `⟨u_ε, x⟩ = 1`; its corners come from the
//! extreme rays of the cone.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, IntMatrix};
use crate::scalar::Field;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("no generators given")]
    Empty,
    #[error("generator {index} has length {got}, expected {dim}")]
    Ragged {
        index: usize,
        got: usize,
        dim: usize,
    },
    #[error("generators span a space of dimension {rank} < {dim}; the norm is degenerate")]
    Degenerate { rank: usize, dim: usize },
    #[error("point has length {got}, expected {dim}")]
    Dimension { got: usize, dim: usize },
    #[error("facet index {0} out of range")]
    NoSuchFacet(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormSpec {
    generators: Vec<Vec<i64>>,
}

impl NormSpec {
    pub fn new(generators: Vec<Vec<i64>>) -> Result<Self, PolytopeError> {
        let dim = generators.first().ok_or(PolytopeError::Empty)?.len();
        for (index, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(PolytopeError::Ragged {
                    index,
                    got: g.len(),
                    dim,
                });
            }
        }
        let rank = rank(&generators);
        if dim == 0 || rank < dim {
            return Err(PolytopeError::Degenerate { rank, dim });
        }
        Ok(NormSpec { generators })
    }

    /// `e₁, e₂, e₃, e₁+e₂+e₃`.
    pub fn borromean() -> Self {
        NormSpec::new(vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 1],
        ])
        .expect("spans")
    }

    /// The coordinate functionals of `ℝⁿ`: the `ℓ¹` norm.
    pub fn l1(n: usize) -> Self {
        NormSpec::new(linalg::identity(n)).expect("spans")
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].len()
    }

    /// Parses `"1,0,0;0,1,0"`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let rows = text
            .split(';')
            .filter(|r| !r.trim().is_empty())
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|e| format!("`{}`: {e}", x.trim()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        NormSpec::new(rows).map_err(|e| e.to_string())
    }
}

fn rank(rows: &[Vec<i64>]) -> usize {
    let m: Vec<Vec<Rational>> = linalg::to_field(rows);
    rank_in(m)
}

fn rank_in<F: Field>(mut m: Vec<Vec<F>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() / m[r][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        r += 1;
    }
    r
}

fn dot_q<F: Field>(u: &[i64], x: &[F]) -> F {
    u.iter()
        .zip(x)
        .fold(F::zero(), |acc, (&a, b)| acc + F::from_int(a) * b.clone())
}

/// `Σ |ℓᵢ(x)|`, over any ordered field.
pub fn norm_value<F: Field>(spec: &NormSpec, x: &[F]) -> Result<F, PolytopeError> {
    if x.len() != spec.dim() {
        return Err(PolytopeError::Dimension {
            got: x.len(),
            dim: spec.dim(),
        });
    }
    Ok(spec
        .generators
        .iter()
        .fold(F::zero(), |acc, l| acc + dot_q(l, x).abs()))
}

/// Is `{x : Σ a·x ≥ b}` nonempty? Fourier-Motzkin over the rationals.
fn feasible(mut rows: Vec<(Vec<Rational>, Rational)>) -> bool {
    let n = rows.first().map_or(0, |r| r.0.len());
    for var in 0..n {
        let (mut pos, mut neg, mut rest) = (vec![], vec![], vec![]);
        for (a, b) in rows {
            match a[var].cmp(&Rational::zero()) {
                Ordering::Greater => pos.push((a, b)),
                Ordering::Less => neg.push((a, b)),
                Ordering::Equal => rest.push((a, b)),
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                // scale to ±1 on var and add
                let sp = ap[var].clone();
                let sn = -an[var].clone();
                let a: Vec<Rational> = ap.iter().zip(an).map(|(x, y)| x / &sp + y / &sn).collect();
                rest.push((a, bp / &sp + bn / &sn));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| *b <= Rational::zero())
}

/// Sign vectors `ε` whose open cone `{εᵢ ℓᵢ(x) > 0}` is nonempty, each with
/// `u_ε = Σ εᵢ ℓᵢ`. These are exactly the zonotope vertices.
fn topes(spec: &NormSpec) -> Vec<(Vec<i64>, Vec<i64>)> {
    let m = spec.generators.len();
    let n = spec.dim();
    let mut out = Vec::new();
    for mask in 0..(1u64 << m) {
        let eps: Vec<i64> = (0..m)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        // strict and homogeneous, so εᵢ ℓᵢ(x) ≥ 1 is equivalent
        let rows = spec
            .generators
            .iter()
            .zip(&eps)
            .map(|(l, &e)| {
                (
                    l.iter().map(|&x| Rational::from_int(e * x)).collect(),
                    Rational::one(),
                )
            })
            .collect();
        if feasible(rows) {
            let u: Vec<i64> = (0..n)
                .map(|j| (0..m).map(|i| eps[i] * spec.generators[i][j]).sum())
                .collect();
            out.push((eps, u));
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

/// Vertices of the zonotope `Σ [-ℓᵢ, ℓᵢ]`, sorted.
pub fn zonotope_vertices(spec: &NormSpec) -> Vec<Vec<i64>> {
    topes(spec).into_iter().map(|(_, u)| u).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Zonotope vertex `u`; the facet lies in `⟨u, x⟩ = 1`.
    pub normal: Vec<i64>,
    /// Corners in cyclic order (empty unless the dimension is 3).
    pub polygon: Vec<Vec<Rational>>,
    pub euler_class: Vec<i64>,
}

impl Facet {
    pub fn vertex_count(&self) -> usize {
        self.polygon.len()
    }
}

fn cross(a: &[i64], b: &[i64]) -> Vec<i64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn primitive(v: Vec<i64>) -> Vec<i64> {
    let g = crate::lattice::divisibility(&v) as i64;
    if g <= 1 {
        v
    } else {
        v.into_iter().map(|x| x / g).collect()
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub_q(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross_q(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot_qq(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orders points of a convex polygon in the plane `⟨u, x⟩ = 1`
/// counterclockwise as seen from the side `u` points to.
fn cyclic_order(u: &[i64], pts: &mut [Vec<Rational>]) {
    if pts.len() < 3 {
        return;
    }
    let k = Rational::from_int(pts.len() as i64);
    let c: Vec<Rational> = (0..3)
        .map(|j| pts.iter().map(|p| p[j].clone()).sum::<Rational>() / &k)
        .collect();
    let uq: Vec<Rational> = u.iter().map(|&x| Rational::from_int(x)).collect();
    let r0 = sub_q(&pts[0], &c);
    // angle around c measured from r0: half-plane first, then orientation
    let key = |p: &Vec<Rational>| {
        let r = sub_q(p, &c);
        let s = dot_qq(&cross_q(&r0, &r), &uq);
        let upper = s > Rational::zero() || (s.is_zero() && dot_qq(&r0, &r) > Rational::zero());
        (!upper, r)
    };
    pts.sort_by(|a, b| {
        let (ha, ra) = key(a);
        let (hb, rb) = key(b);
        ha.cmp(&hb).then_with(|| {
            let s = dot_qq(&cross_q(&ra, &rb), &uq);
            Rational::zero().cmp(&s)
        })
    });
}

/// One facet per zonotope vertex, sorted by normal. For `n = 3` each
/// polygon is built from the extreme rays of its sign cone.
pub fn facets(spec: &NormSpec) -> Vec<Facet> {
    let n = spec.dim();
    topes(spec)
        .into_iter()
        .map(|(eps, u)| {
            let mut polygon = Vec::new();
            if n == 3 {
                let ls = &spec.generators;
                let mut rays = BTreeSet::new();
                for i in 0..ls.len() {
                    for j in i + 1..ls.len() {
                        let c = cross(&ls[i], &ls[j]);
                        if c.iter().all(|&x| x == 0) {
                            continue;
                        }
                        for r in [c.clone(), c.iter().map(|x| -x).collect()] {
                            if ls.iter().zip(&eps).all(|(l, &e)| e * dot(l, &r) >= 0) {
                                rays.insert(primitive(r));
                            }
                        }
                    }
                }
                polygon = rays
                    .into_iter()
                    .map(|r| {
                        let s = Rational::from_int(dot(&u, &r));
                        r.iter().map(|&x| Rational::from_int(x) / &s).collect()
                    })
                    .collect();
                cyclic_order(&u, &mut polygon);
            }
            let euler_class = u.iter().map(|x| -x).collect();
            Facet {
                normal: u,
                polygon,
                euler_class,
            }
        })
        .collect()
}

/// `e = -u`; `⟨x, e⟩ = -1` on the facet.
pub fn euler_class_of_facet(f: &Facet) -> Vec<i64> {
    let e: Vec<i64> = f.normal.iter().map(|x| -x).collect();
    for x in &f.polygon {
        assert_eq!(dot_q(&e, x), -Rational::one(), "corner off the facet plane");
    }
    e
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceVerdict {
    /// `M` acting on points, preserving the norm, with `M(F₀) = F₁`.
    Equivalent(IntMatrix),
    Distinct {
        reason: String,
    },
    Unknown,
}

fn apply_q(m: &IntMatrix, x: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| dot_q(row, x)).collect()
}

/// Does `M` preserve `{±ℓᵢ}` as a multiset (acting on points, so on
/// covectors by `ℓ ↦ ℓ∘M`)?
fn preserves_generators(spec: &NormSpec, m: &IntMatrix) -> bool {
    let canon = |l: &[i64]| -> Vec<i64> {
        match l.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => l.iter().map(|y| -y).collect(),
            _ => l.to_vec(),
        }
    };
    let n = spec.dim();
    let mut before: Vec<Vec<i64>> = spec.generators.iter().map(|l| canon(l)).collect();
    let mut after: Vec<Vec<i64>> = spec
        .generators
        .iter()
        .map(|l| {
            canon(
                &(0..n)
                    .map(|j| (0..n).map(|i| l[i] * m[i][j]).sum())
                    .collect::<Vec<i64>>(),
            )
        })
        .collect();
    before.sort();
    after.sort();
    before == after
}

fn maps_polygon(m: &IntMatrix, f0: &Facet, f1: &Facet) -> bool {
    let target: BTreeSet<Vec<Rational>> = f1.polygon.iter().cloned().collect();
    let image: BTreeSet<Vec<Rational>> = f0.polygon.iter().map(|x| apply_q(m, x)).collect();
    image == target
}

/// `Distinct` when the polygons have different numbers of corners.
/// Otherwise looks for a norm-preserving `M` with `|entries| ≤ bound`
/// carrying `F₀` onto `F₁`, trying `I` and `-I` before the rest.
pub fn faces_equivalent(spec: &NormSpec, f0: &Facet, f1: &Facet, bound: i64) -> FaceVerdict {
    if f0.vertex_count() != f1.vertex_count() {
        return FaceVerdict::Distinct {
            reason: format!(
                "polygons have {} and {} corners",
                f0.vertex_count(),
                f1.vertex_count()
            ),
        };
    }
    let n = spec.dim();
    let id = linalg::identity(n);
    let neg = linalg::negate(&id);
    // M maps F_{u0} onto F_{u1} exactly when u1∘M = u0
    let works = |m: &IntMatrix| {
        let pulled: Vec<i64> = (0..n)
            .map(|j| (0..n).map(|i| f1.normal[i] * m[i][j]).sum())
            .collect();
        pulled == f0.normal && preserves_generators(spec, m) && maps_polygon(m, f0, f1)
    };
    for m in [&id, &neg] {
        if works(m) {
            return FaceVerdict::Equivalent(m.clone());
        }
    }
    // a symmetry sends a basis B of generators to signed generators T:
    // L_B M = T, so M = L_B⁻¹ T
    let Some(basis) = independent_subset(&spec.generators) else {
        return FaceVerdict::Unknown;
    };
    let lb: Vec<Vec<i64>> = basis.iter().map(|&i| spec.generators[i].clone()).collect();
    let inv = linalg::inverse::<Rational>(&linalg::to_field(&lb)).expect("independent rows");
    let targets: Vec<Vec<i64>> = spec
        .generators
        .iter()
        .flat_map(|l| [l.clone(), l.iter().map(|x| -x).collect()])
        .collect();
    let mut found: Vec<IntMatrix> = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let t: Vec<Vec<i64>> = choice.iter().map(|&c| targets[c].clone()).collect();
        let tq: Vec<Vec<Rational>> = linalg::to_field(&t);
        let m: Option<IntMatrix> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v: Rational = (0..n).map(|k| &inv[i][k] * &tq[k][j]).sum();
                        v.as_integer().filter(|x| x.abs() <= bound)
                    })
                    .collect()
            })
            .collect();
        if let Some(m) = m {
            if works(&m) {
                found.push(m);
            }
        }
        // next choice
        let mut pos = 0;
        loop {
            if pos == n {
                found.sort();
                return match found.into_iter().next() {
                    Some(m) => FaceVerdict::Equivalent(m),
                    None => FaceVerdict::Unknown,
                };
            }
            choice[pos] += 1;
            if choice[pos] < targets.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn independent_subset(gens: &[Vec<i64>]) -> Option<Vec<usize>> {
    let n = gens.first()?.len();
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..gens.len() {
        let mut trial: Vec<Vec<i64>> = chosen.iter().map(|&c| gens[c].clone()).collect();
        trial.push(gens[i].clone());
        if rank(&trial) == trial.len() {
            chosen.push(i);
            if chosen.len() == n {
                return Some(chosen);
            }
        }
    }
    None
}

/// `(V, E, F)` of the boundary complex from the facet polygons (`n = 3`).
pub fn face_counts(facets: &[Facet]) -> (usize, usize, usize) {
    let vertices: BTreeSet<&Vec<Rational>> = facets.iter().flat_map(|f| &f.polygon).collect();
    let edges: usize = facets.iter().map(|f| f.polygon.len()).sum::<usize>() / 2;
    (vertices.len(), edges, facets.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, rational_int};
    use proptest::prelude::*;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational_int(x)).collect()
    }

    #[test]
    fn norm_values() {
        let b = NormSpec::borromean();
        assert_eq!(norm_value(&b, &q(&[1, 0, 0])).unwrap(), rational_int(2));
        assert_eq!(norm_value(&b, &q(&[0, 0, 0])).unwrap(), rational_int(0));
        assert_eq!(norm_value(&b, &q(&[1, 1, 1])).unwrap(), rational_int(6));
        assert_eq!(norm_value(&b, &[1.0f64, 1.0, 1.0]).unwrap(), 6.0);
        assert!(norm_value(&b, &q(&[1, 0])).is_err());
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert!(matches!(
            NormSpec::new(vec![vec![1, 0], vec![2, 0]]),
            Err(PolytopeError::Degenerate { rank: 1, dim: 2 })
        ));
        assert_eq!(NormSpec::new(vec![]), Err(PolytopeError::Empty));
        assert!(NormSpec::parse("1,0;0,x").is_err());
        assert_eq!(
            NormSpec::parse("1,0,0;0,1,0;0,0,1;1,1,1").unwrap(),
            NormSpec::borromean()
        );
    }

    #[test]
    fn small_zonotopes() {
        assert_eq!(zonotope_vertices(&NormSpec::l1(1)), vec![vec![-1], vec![1]]);
        assert_eq!(zonotope_vertices(&NormSpec::l1(2)).len(), 4);
        // generators in general position in the plane: a hexagon
        let h = NormSpec::new(vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(zonotope_vertices(&h).len(), 6);
    }

    #[test]
    fn octahedron() {
        let f = facets(&NormSpec::l1(3));
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|x| x.vertex_count() == 3));
        assert_eq!(face_counts(&f), (6, 12, 8));
    }

    #[test]
    fn borromean_census() {
        let spec = NormSpec::borromean();
        let f = facets(&spec);
        assert_eq!(f.len(), 14);
        let tri = f.iter().filter(|x| x.vertex_count() == 3).count();
        let quad = f.iter().filter(|x| x.vertex_count() == 4).count();
        assert_eq!((tri, quad), (8, 6));
        let (v, e, fc) = face_counts(&f);
        assert_eq!(v as i64 - e as i64 + fc as i64, 2);
        for facet in &f {
            assert_eq!(
                euler_class_of_facet(facet),
                facet.normal.iter().map(|x| -x).collect::<Vec<_>>()
            );
            for x in &facet.polygon {
                assert_eq!(norm_value(&spec, x).unwrap(), rational_int(1));
            }
            // antipodal facet
            let anti: Vec<i64> = facet.normal.iter().map(|x| -x).collect();
            assert!(f.iter().any(|g| g.normal == anti));
        }
    }

    #[test]
    fn polygons_are_cyclic() {
        // consecutive corners of a facet share a second tight constraint
        let spec = NormSpec::borromean();
        let all = facets(&spec);
        for f in &all {
            let k = f.polygon.len();
            for i in 0..k {
                let (a, b) = (&f.polygon[i], &f.polygon[(i + 1) % k]);
                let shared = all
                    .iter()
                    .filter(|g| g.normal != f.normal)
                    .filter(|g| {
                        dot_q(&g.normal, a) == Rational::one()
                            && dot_q(&g.normal, b) == Rational::one()
                    })
                    .count();
                assert!(shared >= 1, "{:?} -> {:?}", a, b);
            }
        }
    }

    #[test]
    fn face_symmetries() {
        let spec = NormSpec::borromean();
        let f = facets(&spec);
        let tri = f.iter().find(|x| x.vertex_count() == 3).unwrap();
        let quad = f.iter().find(|x| x.vertex_count() == 4).unwrap();
        assert!(matches!(
            faces_equivalent(&spec, tri, quad, 3),
            FaceVerdict::Distinct { .. }
        ));
        assert_eq!(
            faces_equivalent(&spec, tri, tri, 1),
            FaceVerdict::Equivalent(linalg::identity(3))
        );
        let anti = f.iter().find(|g| g.normal == tri.euler_class).unwrap();
        assert_eq!(
            faces_equivalent(&spec, tri, anti, 1),
            FaceVerdict::Equivalent(linalg::negate(&linalg::identity(3)))
        );
        // the coordinate permutations act transitively on a sign type of triangles
        let others: Vec<&Facet> = f.iter().filter(|x| x.vertex_count() == 3).collect();
        for g in others {
            if let FaceVerdict::Equivalent(m) = faces_equivalent(&spec, tri, g, 2) {
                assert!(maps_polygon(&m, tri, g));
                assert!(preserves_generators(&spec, &m));
            }
        }
    }

    proptest! {
        #[test]
        fn norm_axioms(
            x in proptest::collection::vec((-20i64..20, 1i64..5), 3),
            y in proptest::collection::vec((-20i64..20, 1i64..5), 3),
            t in (-6i64..6, 1i64..4),
        ) {
            let spec = NormSpec::borromean();
            let x: Vec<Rational> = x.iter().map(|&(a, b)| rational(a, b)).collect();
            let y: Vec<Rational> = y.iter().map(|&(a, b)| rational(a, b)).collect();
            let t = rational(t.0, t.1);
            let nx = norm_value(&spec, &x).unwrap();
            let ny = norm_value(&spec, &y).unwrap();
            let sum: Vec<Rational> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            prop_assert!(norm_value(&spec, &sum).unwrap() <= &nx + &ny);
            let tx: Vec<Rational> = x.iter().map(|a| a * &t).collect();
            prop_assert_eq!(norm_value(&spec, &tx).unwrap(), t.abs() * &nx);
            prop_assert_eq!(nx.is_zero(), x.iter().all(|a| a.is_zero()));
            // polarity: N(x) = max over zonotope vertices of ⟨u, x⟩
            let best = zonotope_vertices(&spec).iter().map(|u| dot_q(u, &x)).max().unwrap();
            prop_assert_eq!(best, nx);
        }
    }
}
