//! First Chern classes under stabilization, Pontryagin numbers of products
//! with surfaces, and signatures of fibre sums.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Fingerprint, LatticeError};
use crate::ring::{self, presets, GradedClass, RingError, RingPresentation, RingSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChernError {
    #[error("{0} has no cohomology ring attached")]
    NoRing(String),
    #[error("{0} has no first Chern class attached")]
    NoC1(String),
    #[error("first Chern class must be homogeneous of degree 2, got `{0}`")]
    C1Degree(String),
    #[error("expected a 4-manifold, got real dimension {0}")]
    NotFourManifold(u32),
    #[error("signature of {0} is unknown")]
    UnknownSignature(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A closed symplectic manifold as far as characteristic numbers go.
///
/// Presets that are only used through numbers (`T⁴`) carry no ring.
#[derive(Debug, Clone)]
pub struct SymplecticData {
    pub name: String,
    pub dimension: u32,
    pub ring: Option<Arc<RingPresentation>>,
    pub c1: Option<GradedClass>,
    pub sigma: Option<i64>,
    pub p1_number: Option<i64>,
    pub simply_connected: bool,
}

impl SymplecticData {
    /// Ring-backed data. For 4-manifolds σ comes from the intersection
    /// lattice and `p₁ = 3σ`.
    pub fn from_ring(
        name: impl Into<String>,
        ring: Arc<RingPresentation>,
        c1: GradedClass,
    ) -> Result<Self, ChernError> {
        if !c1.is_zero() && c1.degree() != Some(2) {
            return Err(ChernError::C1Degree(c1.to_string()));
        }
        if !Arc::ptr_eq(c1.ring(), &ring) && **c1.ring() != *ring {
            return Err(
                RingError::RingMismatch(ring.name().into(), c1.ring().name().into()).into(),
            );
        }
        let dimension = ring.top_degree();
        let sigma = if dimension == 4 {
            Some(ring.intersection_lattice()?.signature())
        } else {
            None
        };
        Ok(SymplecticData {
            name: name.into(),
            dimension,
            ring: Some(ring),
            c1: Some(c1),
            sigma,
            p1_number: sigma.map(|s| 3 * s),
            simply_connected: true,
        })
    }

    /// Numbers only: a 4-manifold with known signature.
    pub fn numeric(name: impl Into<String>, sigma: i64, simply_connected: bool) -> Self {
        SymplecticData {
            name: name.into(),
            dimension: 4,
            ring: None,
            c1: None,
            sigma: Some(sigma),
            p1_number: Some(3 * sigma),
            simply_connected,
        }
    }

    pub fn ring(&self) -> Result<&Arc<RingPresentation>, ChernError> {
        self.ring
            .as_ref()
            .ok_or_else(|| ChernError::NoRing(self.name.clone()))
    }

    pub fn c1(&self) -> Result<&GradedClass, ChernError> {
        self.c1
            .as_ref()
            .ok_or_else(|| ChernError::NoC1(self.name.clone()))
    }

    /// `c₁` as a coordinate vector over the degree-2 basis.
    pub fn c1_coordinates(&self) -> Result<Vec<i64>, ChernError> {
        Ok(self.c1()?.coordinates(2))
    }

    /// Same manifold, different first Chern class (given in coordinates).
    pub fn with_c1_coordinates(&self, coords: &[i64]) -> Result<Self, ChernError> {
        let ring = self.ring()?.clone();
        let c1 = GradedClass::from_coordinates(&ring, 2, coords);
        let mut out = self.clone();
        out.c1 = Some(c1);
        Ok(out)
    }
}

/// `T⁴`: σ = 0, p₁ = 0.
pub fn torus4() -> SymplecticData {
    SymplecticData::numeric("T4", 0, false)
}

/// `E(1) = ℂP² # 9ℂP̄²` with `c₁ = 3l - Σ eᵢ`.
pub fn elliptic_e1() -> SymplecticData {
    let ring = Arc::new(presets::elliptic_e1());
    let c1 = ring
        .parse("3*l1 - e1 - e2 - e3 - e4 - e5 - e6 - e7 - e8 - e9")
        .expect("preset ids");
    SymplecticData::from_ring("E(1)", ring, c1).expect("valid preset")
}

/// `S²×S²` with the product form, `c₁ = 2u₁ + 2u₂`.
pub fn s2xs2_standard() -> SymplecticData {
    let ring = Arc::new(presets::s2xs2());
    let c1 = ring.parse("2*u1 + 2*u2").expect("preset ids");
    SymplecticData::from_ring("S2xS2", ring, c1).expect("valid preset")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerSpec {
    /// `ℂPᵏ` with its Fubini-Study form.
    ProjectiveSpace(u32),
    /// `Σ_g × … × Σ_g` (`count` factors).
    Surfaces { genus: u32, count: usize },
}

impl StabilizerSpec {
    /// Ring of the stabilizing factor and its own first Chern class.
    pub fn factor(&self) -> (Arc<RingPresentation>, GradedClass) {
        match *self {
            StabilizerSpec::ProjectiveSpace(k) => {
                let r = Arc::new(presets::projective_space(k));
                let c1 = r.class("h").expect("generator").scale(k as i64 + 1);
                (r, c1)
            }
            StabilizerSpec::Surfaces { genus, count } => {
                assert!(count >= 1, "need at least one surface factor");
                let chi = 2 - 2 * genus as i64;
                let mut acc = Arc::new(surface_factor(genus, 1));
                let mut c1 = acc.class("h1").expect("generator").scale(chi);
                for i in 2..=count {
                    let next = Arc::new(surface_factor(genus, i));
                    let p = ring::kunneth(&acc, &next).expect("even degrees");
                    let hi = next.class(&format!("h{i}")).expect("generator");
                    c1 = p
                        .left
                        .apply(&c1, &p.ring)
                        .add(&p.right.apply(&hi, &p.ring).scale(chi))
                        .expect("same ring");
                    acc = p.ring;
                }
                (acc, c1)
            }
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        match *self {
            StabilizerSpec::ProjectiveSpace(k) => k as i64 + 1,
            StabilizerSpec::Surfaces { genus, count } => (2 - 2 * genus as i64).pow(count as u32),
        }
    }
}

fn surface_factor(genus: u32, i: usize) -> RingPresentation {
    presets::surface(genus).renamed(format!("Sigma{genus}"), |_| format!("h{i}"))
}

/// `c₁(X × Y) = pr₁*c₁(X) + pr₂*c₁(Y)` in the Künneth ring.
pub fn c1_stabilize(
    d: &SymplecticData,
    stab: StabilizerSpec,
) -> Result<SymplecticData, ChernError> {
    let base = d.ring()?;
    let c1 = d.c1()?;
    let (factor, fc1) = stab.factor();
    let p = ring::kunneth(base, &factor)?;
    let total = p
        .left
        .apply(c1, &p.ring)
        .add(&p.right.apply(&fc1, &p.ring))?;
    Ok(SymplecticData {
        name: format!("{}x{}", d.name, factor.name()),
        dimension: p.ring.top_degree(),
        ring: Some(p.ring),
        c1: Some(total),
        sigma: None,
        p1_number: None,
        simply_connected: d.simply_connected
            && !matches!(stab, StabilizerSpec::Surfaces { genus, .. } if genus > 0),
    })
}

/// Folds [`c1_stabilize`] over several factors in order.
pub fn c1_stabilize_all(
    d: &SymplecticData,
    stabs: &[StabilizerSpec],
) -> Result<SymplecticData, ChernError> {
    stabs
        .iter()
        .try_fold(d.clone(), |acc, &s| c1_stabilize(&acc, s))
}

/// Coefficient of `PD([Σᵏ])` in `p₁(X × Σᵏ)`. Surfaces are stably
/// parallelizable, so only `p₁(X) = 3σ(X)` survives, whatever `k` is.
pub fn p1_number_product_with_surfaces(d: &SymplecticData, _k: usize) -> Result<i64, ChernError> {
    if d.dimension != 4 {
        return Err(ChernError::NotFourManifold(d.dimension));
    }
    let sigma = d
        .sigma
        .ok_or_else(|| ChernError::UnknownSignature(d.name.clone()))?;
    Ok(3 * sigma)
}

/// Signature of a fibre sum along tori of square zero: the sum of the
/// summands' signatures.
pub fn fibre_sum_signature(summands: &[SymplecticData]) -> Result<i64, ChernError> {
    summands
        .iter()
        .map(|s| {
            s.sigma
                .ok_or_else(|| ChernError::UnknownSignature(s.name.clone()))
        })
        .sum()
}

/// `(divisibility, |c₁²|, characteristic)` of `c₁` in `H²`.
pub fn c1_orbit_fingerprint(d: &SymplecticData) -> Result<Fingerprint, ChernError> {
    let lattice = d.ring()?.intersection_lattice()?;
    Ok(lattice.fingerprint(&d.c1_coordinates()?)?)
}

/// JSON description of a manifold: a preset name or an explicit ring, plus
/// `c₁` as a class expression. `sigma` alone gives numeric data.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifoldSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub ring: Option<RingSpec>,
    #[serde(default)]
    pub c1: Option<String>,
    #[serde(default)]
    pub sigma: Option<i64>,
    #[serde(default = "yes")]
    pub simply_connected: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("manifold spec needs a preset, a ring or a signature")]
    Empty,
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

impl ManifoldSpec {
    pub fn build(&self) -> Result<SymplecticData, SpecError> {
        let ring = match (&self.preset, &self.ring) {
            (Some(p), _) => {
                Some(presets::by_name(p).ok_or_else(|| SpecError::UnknownPreset(p.clone()))?)
            }
            (None, Some(r)) => Some(Arc::new(r.build()?)),
            (None, None) => None,
        };
        let name = self
            .name
            .clone()
            .or_else(|| self.preset.clone())
            .unwrap_or_else(|| "X".to_string());
        let mut data = match ring {
            Some(ring) => {
                let c1 = match &self.c1 {
                    Some(text) => ring.parse(text)?,
                    None => ring.zero(),
                };
                let mut d = SymplecticData::from_ring(name, ring, c1)?;
                if self.c1.is_none() {
                    d.c1 = None;
                }
                if let Some(s) = self.sigma {
                    d.sigma = Some(s);
                    d.p1_number = Some(3 * s);
                }
                d
            }
            None => match self.sigma {
                Some(s) => SymplecticData::numeric(name, s, self.simply_connected),
                None => return Err(SpecError::Empty),
            },
        };
        data.simply_connected = self.simply_connected;
        Ok(data)
    }
}
