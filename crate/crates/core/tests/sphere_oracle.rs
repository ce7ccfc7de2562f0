//! GW invariants of S² against the enumerative closed form: with the point
//! class as cap, a degree d map from a fixed curve of genus g through k fixed
//! points is counted 2^g times when the dimensions match, and otherwise the
//! invariant vanishes.

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use stabgw_core::gw::{
    eval_sphere, eval_sphere_full, eval_sphere_product, product_gw, Cap, FactorValue,
};
use stabgw_core::ring::{presets, GradedClass, RingPresentation};
use stabgw_core::Rational;

fn oracle(genus: u32, degree: i64, h_count: u32) -> Rational {
    let fits = degree >= 0 && 2 * h_count as i64 == 4 * degree + 2 - 2 * genus as i64;
    if fits {
        Rational::from_integer(BigInt::from(2).pow(genus))
    } else {
        Rational::from_integer(BigInt::from(0))
    }
}

fn insertions(ring: &Arc<RingPresentation>, points: u32, h_count: u32) -> Vec<GradedClass> {
    (0..points)
        .map(|i| {
            if i < h_count {
                ring.class("h").unwrap()
            } else {
                ring.unit()
            }
        })
        .collect()
}

#[test]
fn closed_form_on_a_grid() {
    let ring = Arc::new(presets::sphere());
    for g in 0..=6 {
        for n in 0..=6u32 {
            if 2 * g + n <= 2 {
                continue;
            }
            for d in -1..=4 {
                for k in 0..=n {
                    let got = eval_sphere(g, n, d, &insertions(&ring, n, k)).unwrap();
                    assert_eq!(got, oracle(g, d, k), "g={g} n={n} d={d} k={k}");
                }
            }
        }
    }
}

#[test]
fn lines_through_three_points() {
    let ring = Arc::new(presets::sphere());
    for d in 0..=5 {
        let v = eval_sphere(0, 3, d, &insertions(&ring, 3, 3)).unwrap();
        let want = if d == 1 { 1 } else { 0 };
        assert_eq!(v, Rational::from_integer(want.into()), "d={d}");
    }
}

#[test]
fn three_point_caps_agree() {
    let ring = Arc::new(presets::sphere());
    for d in 0..=3 {
        for k in 0..=3 {
            let ins = insertions(&ring, 3, k);
            assert_eq!(
                eval_sphere(0, 3, d, &ins).unwrap(),
                eval_sphere_full(0, 3, d, &ins).unwrap()
            );
        }
    }
}

fn cross_power(ring: &Arc<RingPresentation>, k: usize, with_h: bool) -> GradedClass {
    if !with_h {
        return ring.unit();
    }
    let expr = (1..=k).map(|i| format!("h{i}")).collect::<Vec<_>>().join("*");
    ring.parse(&expr).unwrap()
}

#[test]
fn powers_of_spheres() {
    let s2 = Arc::new(presets::sphere());
    for k in 1..=3 {
        let ring = presets::sphere_product(k);
        for g in 0..=6u32 {
            // the 2^g family: all ones for odd genus, one h otherwise
            let (n, d, with_h) = match g {
                0 => (3, 0, true),
                g if g % 2 == 1 => (1, (g as i64 - 1) / 2, false),
                g => (1, g as i64 / 2, true),
            };
            let mut ins = vec![cross_power(&ring, k, with_h)];
            let mut single = vec![if with_h { s2.class("h").unwrap() } else { s2.unit() }];
            ins.resize(n, ring.unit());
            single.resize(n, s2.unit());
            let got = eval_sphere_product(&ring, g, &vec![d; k], &ins).unwrap();
            let one = eval_sphere(g, n as u32, d, &single).unwrap();
            let want = (0..k).fold(Rational::from_integer(1.into()), |acc, _| acc * one.clone());
            assert_eq!(got, want, "k={k} g={g}");
            assert_eq!(
                got,
                Rational::from_integer(BigInt::from(2).pow(g * k as u32))
            );
        }
    }
}

#[test]
fn product_matches_factor_oracle() {
    let ring = presets::sphere_product(2);
    let exprs = ["1", "h1", "h2", "h1*h2", "h1 + 3*h2", "2 - h1*h2"];
    for g in 0..=2u32 {
        for d1 in 0..=2 {
            for d2 in 0..=2 {
                for a in exprs {
                    for b in exprs {
                        let n = if g == 0 { 3 } else { 2 };
                        let mut ins = vec![ring.parse(a).unwrap(), ring.parse(b).unwrap()];
                        ins.resize(n, ring.unit());
                        let got = eval_sphere_product(&ring, g, &[d1, d2], &ins).unwrap();
                        // expand each insertion into pure tensors h1^e1 h2^e2
                        let mut want = Rational::from_integer(0.into());
                        let terms: Vec<Vec<(i64, u32, u32)>> = ins
                            .iter()
                            .map(|c| {
                                let mut t = Vec::new();
                                for (e1, e2, name) in
                                    [(0, 0, "1"), (1, 0, "h1"), (0, 1, "h2"), (1, 1, "h1*h2")]
                                {
                                    let basis = ring.parse(name).unwrap();
                                    let idx = *basis.coeffs().keys().next().unwrap();
                                    let coeff = c.coeff(idx);
                                    if coeff != 0 {
                                        t.push((coeff, e1, e2));
                                    }
                                }
                                t
                            })
                            .collect();
                        let mut stack = vec![(1i64, 0u32, 0u32, 0usize)];
                        while let Some((c, k1, k2, i)) = stack.pop() {
                            if i == terms.len() {
                                let f = |k| FactorValue {
                                    genus: g,
                                    points: n as u32,
                                    cap: Cap::Point,
                                    value: k,
                                };
                                let v = product_gw(&[f(oracle(g, d1, k1)), f(oracle(g, d2, k2))])
                                    .unwrap();
                                want = want + Rational::from_integer(c.into()) * v;
                                continue;
                            }
                            for &(coeff, e1, e2) in &terms[i] {
                                stack.push((c * coeff, k1 + e1, k2 + e2, i + 1));
                            }
                        }
                        assert_eq!(got, want, "g={g} d=({d1},{d2}) ins=({a},{b})");
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn divisor_axiom_for_the_full_class(g in 0u32..3, n in 1u32..4, d in 1i64..4, k in 0u32..4) {
        prop_assume!(k <= n && 2 * g + n > 2);
        let ring = Arc::new(presets::sphere());
        let ins = insertions(&ring, n, k);
        let mut more = ins.clone();
        more.push(ring.class("h").unwrap());
        let lhs = eval_sphere_full(g, n + 1, d, &more).unwrap();
        let rhs = eval_sphere_full(g, n, d, &ins).unwrap() * Rational::from_integer(d.into());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multilinear_in_each_slot(a in -3i64..4, b in -3i64..4, d in 0i64..3) {
        let ring = Arc::new(presets::sphere());
        let h = ring.class("h").unwrap();
        let mixed = ring.unit().scale(a).add(&h.scale(b)).unwrap();
        let lhs = eval_sphere(0, 3, d, &[mixed, h.clone(), h.clone()]).unwrap();
        let rhs = oracle(0, d, 2) * Rational::from_integer(a.into())
            + oracle(0, d, 3) * Rational::from_integer(b.into());
        prop_assert_eq!(lhs, rhs);
    }
}
