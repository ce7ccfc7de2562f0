//! Invariants of `(S²)ᵏ` through the product formula: with the point class
//! as cap, an invariant of a product with insertions `α⁰×α¹` is the product
//! of the factor invariants.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ring::{GradedClass, RingPresentation};
use crate::scalar::Field;
use crate::Rational;
use num_traits::Zero;

use super::sphere::{is_sphere_ring, shared, Cap, SphereSymbol};
use super::GwError;

/// An already evaluated factor invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorValue<F: Field = Rational> {
    pub genus: u32,
    pub points: u32,
    pub cap: Cap,
    pub value: F,
}

/// Product of factor values; all factors must share `(g, n)` and the cap.
pub fn product_gw<F: Field>(factors: &[FactorValue<F>]) -> Result<F, GwError> {
    let first = factors.first().ok_or(GwError::EmptyProduct)?;
    let mut acc = F::one();
    for f in factors {
        if (f.genus, f.points, f.cap) != (first.genus, first.points, first.cap) {
            return Err(GwError::MismatchedFactors(format!(
                "({}, {}, {:?}) vs ({}, {}, {:?})",
                first.genus, first.points, first.cap, f.genus, f.points, f.cap
            )));
        }
        acc = acc * f.value.clone();
    }
    Ok(acc)
}

/// For each basis element of `ring`, the basis index in every sphere factor.
fn sphere_components(
    ring: &RingPresentation,
) -> Result<(usize, Vec<Vec<usize>>, Vec<usize>), GwError> {
    if is_sphere_ring(ring) {
        let h = 1 - ring.unit_index();
        return Ok((1, (0..2).map(|i| vec![i]).collect(), vec![h]));
    }
    let fs = ring
        .factors()
        .ok_or_else(|| GwError::NotSphereProduct(ring.name().to_string()))?;
    if !fs.leaves.iter().all(|l| is_sphere_ring(l)) {
        return Err(GwError::NotSphereProduct(ring.name().to_string()));
    }
    let h_index = fs.leaves.iter().map(|l| 1 - l.unit_index()).collect();
    Ok((fs.leaves.len(), fs.components.clone(), h_index))
}

/// `GW^{(S²)ᵏ}_{g,n,(d₁,…,d_k)}(α₁,…,αₙ)([pt])` for classes of a Künneth
/// product of spheres (or of `S²` itself).
pub fn eval_sphere_product(
    ring: &Arc<RingPresentation>,
    genus: u32,
    degrees: &[i64],
    insertions: &[GradedClass],
) -> Result<Rational, GwError> {
    let (k, components, h_index) = sphere_components(ring)?;
    if degrees.len() != k {
        return Err(GwError::DegreeCount {
            given: degrees.len(),
            factors: k,
        });
    }
    let points = insertions.len() as u32;
    if 2 * genus + points <= 2 {
        return Err(GwError::Unstable { genus, points });
    }
    for c in insertions {
        if !Arc::ptr_eq(c.ring(), ring) && **c.ring() != **ring {
            return Err(GwError::InsertionOutsideRing(c.to_string()));
        }
    }
    // number of h insertions per factor -> coefficient
    let mut states: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    states.insert(vec![0; k], Rational::from_int(1));
    for c in insertions {
        let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (state, w) in &states {
            for (&b, &coeff) in c.coeffs() {
                let mut s = state.clone();
                for j in 0..k {
                    if components[b][j] == h_index[j] {
                        s[j] += 1;
                    }
                }
                let slot = next.entry(s).or_insert_with(|| Rational::from_int(0));
                *slot = slot.clone() + w.clone() * Rational::from_int(coeff);
            }
        }
        next.retain(|_, v| !v.is_zero());
        states = next;
    }
    let ev = shared();
    let mut total = Rational::from_int(0);
    for (state, w) in states {
        let mut factors = Vec::with_capacity(k);
        for j in 0..k {
            let s = SphereSymbol {
                genus,
                points,
                degree: degrees[j],
                h_count: state[j],
                cap: Cap::Point,
            };
            factors.push(FactorValue {
                genus,
                points,
                cap: Cap::Point,
                value: ev.value(&s)?,
            });
        }
        total = total + w * product_gw(&factors)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Sphere,
    SphereProduct(usize),
}

/// A fully specified invariant of an evaluable target.
#[derive(Debug, Clone)]
pub struct GWSymbol {
    pub target: Target,
    pub genus: u32,
    /// One degree per sphere factor.
    pub degree: Vec<i64>,
    pub insertions: Vec<GradedClass>,
    pub cap: Cap,
}

impl GWSymbol {
    pub fn points(&self) -> u32 {
        self.insertions.len() as u32
    }

    pub fn evaluate(&self) -> Result<Rational, GwError> {
        match (self.target, self.cap) {
            (Target::Sphere, cap) => {
                if self.degree.len() != 1 {
                    return Err(GwError::DegreeCount {
                        given: self.degree.len(),
                        factors: 1,
                    });
                }
                shared().eval(
                    self.genus,
                    self.points(),
                    self.degree[0],
                    &self.insertions,
                    cap,
                )
            }
            (Target::SphereProduct(k), Cap::Point) => {
                let ring = match self.insertions.first() {
                    Some(c) => c.ring().clone(),
                    None => crate::ring::presets::sphere_product(k),
                };
                if sphere_components(&ring)?.0 != k {
                    return Err(GwError::NotSphereProduct(ring.name().to_string()));
                }
                eval_sphere_product(&ring, self.genus, &self.degree, &self.insertions)
            }
            (Target::SphereProduct(_), Cap::Full) => Err(GwError::Unsupported(
                "full-class caps on products do not split into factors".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gw::eval_sphere;
    use crate::ring::presets;
    use crate::scalar::rational_int;

    fn fv(g: u32, n: u32, v: i64) -> FactorValue {
        FactorValue {
            genus: g,
            points: n,
            cap: Cap::Point,
            value: rational_int(v),
        }
    }

    #[test]
    fn product_of_values() {
        assert_eq!(
            product_gw(&[fv(2, 1, 4), fv(2, 1, 4)]).unwrap(),
            rational_int(16)
        );
        assert_eq!(
            product_gw(&[fv(2, 1, 4), fv(2, 1, 0)]).unwrap(),
            rational_int(0)
        );
        assert_eq!(product_gw(&[fv(3, 2, 8)]).unwrap(), rational_int(8));
        assert!(matches!(
            product_gw(&[fv(2, 1, 4), fv(2, 2, 4)]),
            Err(GwError::MismatchedFactors(_))
        ));
        assert_eq!(product_gw::<Rational>(&[]), Err(GwError::EmptyProduct));
    }

    #[test]
    fn cross_products_of_ones() {
        let r = presets::sphere_product(2);
        let one = r.unit();
        let v = eval_sphere_product(&r, 3, &[1, 1], &[one]).unwrap();
        assert_eq!(v, rational_int(64));
    }

    #[test]
    fn mixed_insertion_matches_manual_expansion() {
        // h1 + h2 expands into two pure tensors; only the one matching the
        // dimension filter on both factors survives
        let r = presets::sphere_product(2);
        let s2 = Arc::new(presets::sphere());
        let h = s2.class("h").unwrap();
        let one = s2.unit();
        let ins = vec![r.parse("h1 + h2").unwrap(), r.unit()];
        let got = eval_sphere_product(&r, 2, &[1, 0], &ins).unwrap();
        let a = eval_sphere(2, 2, 1, &[h.clone(), one.clone()]).unwrap()
            * eval_sphere(2, 2, 0, &[one.clone(), one.clone()]).unwrap();
        let b = eval_sphere(2, 2, 1, &[one.clone(), one.clone()]).unwrap()
            * eval_sphere(2, 2, 0, &[h, one]).unwrap();
        assert_eq!(got, a + b);
    }

    #[test]
    fn symbol_errors() {
        let r = presets::sphere_product(2);
        assert!(matches!(
            eval_sphere_product(&r, 1, &[1], &[r.unit()]),
            Err(GwError::DegreeCount {
                given: 1,
                factors: 2
            })
        ));
        let cp2 = Arc::new(presets::projective_space(2));
        assert!(matches!(
            eval_sphere_product(&cp2, 1, &[1], &[cp2.unit()]),
            Err(GwError::NotSphereProduct(_))
        ));
        let sym = GWSymbol {
            target: Target::SphereProduct(2),
            genus: 1,
            degree: vec![0, 0],
            insertions: vec![r.unit()],
            cap: Cap::Full,
        };
        assert!(matches!(sym.evaluate(), Err(GwError::Unsupported(_))));
    }

    #[test]
    fn symbol_on_sphere() {
        let s2 = Arc::new(presets::sphere());
        let sym = GWSymbol {
            target: Target::Sphere,
            genus: 0,
            degree: vec![1],
            insertions: vec![s2.class("h").unwrap(); 3],
            cap: Cap::Point,
        };
        assert_eq!(sym.evaluate().unwrap(), rational_int(1));
    }
}
