use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_integer::Integer;

use super::{RingError, RingPresentation};

/// Integral linear combination of basis elements of a [`RingPresentation`].
/// Zero coefficients are never stored.
#[derive(Debug, Clone)]
pub struct GradedClass {
    ring: Arc<RingPresentation>,
    coeffs: BTreeMap<usize, i64>,
}

impl GradedClass {
    pub fn zero(ring: &Arc<RingPresentation>) -> Self {
        GradedClass {
            ring: ring.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(ring: &Arc<RingPresentation>, index: usize) -> Self {
        assert!(index < ring.rank(), "basis index out of range");
        GradedClass {
            ring: ring.clone(),
            coeffs: [(index, 1)].into_iter().collect(),
        }
    }

    pub fn from_coeffs(ring: &Arc<RingPresentation>, mut coeffs: BTreeMap<usize, i64>) -> Self {
        coeffs.retain(|_, c| *c != 0);
        assert!(
            coeffs.keys().all(|&k| k < ring.rank()),
            "basis index out of range"
        );
        GradedClass {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, i64> {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> i64 {
        self.coeffs.get(&index).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degrees present in the class, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self
            .coeffs
            .keys()
            .map(|&k| self.ring.degree_of(k))
            .collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// The common degree of a nonzero homogeneous class.
    pub fn degree(&self) -> Option<u32> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Degree-`d` component.
    pub fn component(&self, degree: u32) -> GradedClass {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&k, _)| self.ring.degree_of(k) == degree)
            .map(|(&k, &c)| (k, c))
            .collect();
        GradedClass {
            ring: self.ring.clone(),
            coeffs,
        }
    }

    fn same_ring(&self, other: &GradedClass) -> Result<(), RingError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(RingError::RingMismatch(
                self.ring.name().to_string(),
                other.ring.name().to_string(),
            ))
        }
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass, RingError> {
        self.same_ring(other)?;
        let mut coeffs = self.coeffs.clone();
        for (&k, &c) in &other.coeffs {
            *coeffs.entry(k).or_insert(0) += c;
        }
        Ok(GradedClass::from_coeffs(&self.ring, coeffs))
    }

    pub fn sub(&self, other: &GradedClass) -> Result<GradedClass, RingError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> GradedClass {
        let coeffs = self.coeffs.iter().map(|(&i, &c)| (i, c * k)).collect();
        GradedClass::from_coeffs(&self.ring, coeffs)
    }

    /// Cup product via the ring's structure constants.
    pub fn cup(&self, other: &GradedClass) -> Result<GradedClass, RingError> {
        self.same_ring(other)?;
        let coeffs = self.ring.mul_sparse(&self.coeffs, &other.coeffs);
        Ok(GradedClass {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn pow(&self, exp: u32) -> GradedClass {
        let mut acc = self.ring.unit();
        for _ in 0..exp {
            acc = acc.cup(self).expect("same ring");
        }
        acc
    }

    /// Fundamental pairing applied to the top-degree part.
    pub fn integrate(&self) -> i64 {
        self.coeffs
            .iter()
            .map(|(&k, &c)| c * self.ring.pairing_of(k))
            .sum()
    }

    /// gcd of the coefficients; 0 iff the class is zero.
    pub fn divisibility(&self) -> u64 {
        self.coeffs
            .values()
            .fold(0i64, |g, &c| g.gcd(&c))
            .unsigned_abs()
    }

    /// Coefficient vector over the basis elements of one degree, in basis
    /// order.
    pub fn coordinates(&self, degree: u32) -> Vec<i64> {
        self.ring
            .degree_indices(degree)
            .into_iter()
            .map(|k| self.coeff(k))
            .collect()
    }

    pub fn from_coordinates(
        ring: &Arc<RingPresentation>,
        degree: u32,
        coords: &[i64],
    ) -> GradedClass {
        let idx = ring.degree_indices(degree);
        assert_eq!(idx.len(), coords.len(), "coordinate length mismatch");
        let coeffs = idx.into_iter().zip(coords.iter().copied()).collect();
        GradedClass::from_coeffs(ring, coeffs)
    }
}

impl PartialEq for GradedClass {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring)
    }
}

impl Eq for GradedClass {}

impl PartialOrd for GradedClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GradedClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ring
            .name()
            .cmp(other.ring.name())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl Hash for GradedClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ring.name().hash(state);
        self.coeffs.hash(state);
    }
}

/// Canonical text form, e.g. `2*u1 - u2 + 3*pt`; reparses to the same class.
impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (&k, &c)) in self.coeffs.iter().enumerate() {
            let id = &self.ring.basis()[k].id;
            let sign = if c < 0 { "-" } else { "+" };
            if n == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            if k == self.ring.unit_index() {
                write!(f, "{a}")?;
            } else if a == 1 {
                write!(f, "{id}")?;
            } else {
                write!(f, "{a}*{id}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::kunneth;
    use super::super::presets::*;
    use super::*;

    #[test]
    fn sphere_relation() {
        let s = Arc::new(sphere());
        let h = s.class("h").unwrap();
        assert!(h.cup(&h).unwrap().is_zero());
        assert_eq!(h.integrate(), 1);
    }

    #[test]
    fn binomial_expansion_in_truncated_ring() {
        // (h + α)² = 2αh in H*(X)[h]/(h²) with α² = 0
        let x = Arc::new(s2xs2());
        let s = Arc::new(sphere());
        let prod = kunneth(&x, &s).unwrap();
        let r = &prod.ring;
        let h = r.class("h").unwrap();
        let alpha = r.class("u1").unwrap();
        let sq = h.add(&alpha).unwrap().pow(2);
        let expected = alpha.cup(&h).unwrap().scale(2);
        assert_eq!(sq, expected);
        assert_eq!(sq.to_string(), "2*u1*h");
    }

    #[test]
    fn paired_generators_in_connected_sum() {
        let r = Arc::new(connected_sum_s2xs2(3));
        let u = r.class("u1").unwrap();
        let v = r.class("u1'").unwrap();
        let top = u.cup(&v).unwrap();
        assert_eq!(top.degree(), Some(4));
        assert_eq!(top.integrate(), 1);
        assert!(u.cup(&r.class("u2'").unwrap()).unwrap().is_zero());
    }

    #[test]
    fn integrate_is_linear() {
        let r = Arc::new(s2xs2());
        let c = r.parse("u1*u2 + 3*pt").unwrap();
        let termwise: i64 = c
            .coeffs()
            .iter()
            .map(|(&k, &a)| a * r.basis_class(k).integrate())
            .sum();
        assert_eq!(c.integrate(), termwise);
        assert_eq!(c.integrate(), 4);
    }

    #[test]
    fn divisibility_examples() {
        let r = Arc::new(s2xs2());
        assert_eq!(r.parse("2*u1+4*u2").unwrap().divisibility(), 2);
        assert_eq!(r.zero().divisibility(), 0);
        assert_eq!(r.parse("2*u1+2*u2").unwrap().divisibility(), 2);
        assert_eq!(r.parse("-3*u1").unwrap().divisibility(), 3);
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = Arc::new(sphere());
        let b = Arc::new(projective_space(2));
        let err = a.unit().cup(&b.unit()).unwrap_err();
        assert!(matches!(err, RingError::RingMismatch(..)));
    }

    #[test]
    fn homogeneity_flags() {
        let r = Arc::new(s2xs2());
        assert!(r.parse("u1 + u2").unwrap().is_homogeneous());
        let mixed = r.parse("1 + u1").unwrap();
        assert!(!mixed.is_homogeneous());
        assert_eq!(mixed.degree(), None);
        assert_eq!(mixed.component(2), r.class("u1").unwrap());
    }
}
