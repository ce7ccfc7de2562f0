//! Orbit decisions against a naive search over every integer matrix in a
//! small box.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabgw_core::equiv::{
    bounded_isometry_search, enumerate_isometries, orbit_check, random_lattice,
    same_orbit_obstruction, OrbitVerdict,
};
use stabgw_core::lattice::IntersectionLattice;

type Mat = Vec<Vec<i64>>;

fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

fn apply(m: &Mat, v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// All matrices with entries in `[-b, b]` such that `MᵀGM = ±G`.
fn naive_isometries(g: &Mat, b: i64) -> Vec<(Mat, i64)> {
    let n = g.len();
    let side = (2 * b + 1) as usize;
    let mut out = Vec::new();
    for mut idx in 0..side.pow((n * n) as u32) {
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                m[i][j] = (idx % side) as i64 - b;
                idx /= side;
            }
        }
        let p = mul(&transpose(&m), &mul(g, &m));
        for s in [1, -1] {
            let sg: Mat = g.iter().map(|r| r.iter().map(|x| s * x).collect()).collect();
            if p == sg {
                out.push((m.clone(), s));
            }
        }
    }
    out
}

fn small_lattices() -> Vec<IntersectionLattice> {
    vec![
        IntersectionLattice::diagonal(1, 0),
        IntersectionLattice::diagonal(2, 0),
        IntersectionLattice::diagonal(1, 1),
        IntersectionLattice::diagonal(0, 2),
        IntersectionLattice::hyperbolic(),
        IntersectionLattice::new(vec![vec![1, 1], vec![1, 0]]).unwrap(),
    ]
}

#[test]
fn enumeration_matches_naive_box() {
    for l in small_lattices() {
        for b in 1..=2 {
            let mut fast = enumerate_isometries(&l, b);
            let mut slow = naive_isometries(l.gram(), b);
            fast.sort();
            slow.sort();
            assert_eq!(fast, slow, "gram {:?} bound {b}", l.gram());
        }
    }
}

#[test]
fn search_agrees_with_naive_existence() {
    let vectors: Vec<Vec<i64>> = (-2..=2)
        .flat_map(|a| (-2..=2).map(move |b| vec![a, b]))
        .filter(|v| v.iter().any(|&x| x != 0))
        .collect();
    for l in small_lattices().into_iter().filter(|l| l.rank() == 2) {
        let all = naive_isometries(l.gram(), 2);
        for v0 in &vectors {
            for v1 in &vectors {
                let naive = all.iter().any(|(m, _)| {
                    let w = apply(m, v0);
                    w == *v1 || w.iter().zip(v1).all(|(a, b)| *a == -b)
                });
                let found = bounded_isometry_search(&l, v0, v1, 2).unwrap();
                assert_eq!(found.is_some(), naive, "{:?} {v0:?} {v1:?}", l.gram());
                if let Some(m) = found {
                    assert!(l.isometry_sign(&m).is_some());
                    let w = apply(&m, v0);
                    assert!(w == *v1 || w.iter().zip(v1).all(|(a, b)| *a == -b));
                }
                let obstruction = same_orbit_obstruction(&l, v0, v1).unwrap();
                if obstruction.verdict == OrbitVerdict::Distinct {
                    assert!(!naive, "obstruction contradicted");
                }
            }
        }
    }
}

#[test]
fn hyperbolic_examples() {
    let h = IntersectionLattice::hyperbolic();
    // divisibility 1 vs 2
    let r = orbit_check(&h, &[1, 0], &[2, 0], Some(2)).unwrap();
    assert_eq!(r.verdict, OrbitVerdict::Distinct);
    let r = orbit_check(&h, &[1, 0], &[0, 1], Some(1)).unwrap();
    assert!(matches!(r.verdict, OrbitVerdict::EquivalentWitness(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn fingerprint_is_isometry_invariant(seed in any::<u64>(), v in prop::collection::vec(-3i64..4, 4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, 4);
        let v: Vec<i64> = v[..l.rank()].to_vec();
        let isos = enumerate_isometries(&l, 1);
        for (m, _) in isos.iter().take(20) {
            let w = apply(m, &v);
            prop_assert_eq!(l.fingerprint(&v).unwrap(), l.fingerprint(&w).unwrap());
            let neg: Vec<i64> = w.iter().map(|x| -x).collect();
            prop_assert_eq!(l.fingerprint(&v).unwrap(), l.fingerprint(&neg).unwrap());
        }
    }

    #[test]
    fn random_lattices_are_unimodular(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_lattice(&mut rng, 4);
        prop_assert!(l.determinant().abs() == 1);
        prop_assert!(l.rank() >= 1 && l.rank() <= 4);
    }
}
