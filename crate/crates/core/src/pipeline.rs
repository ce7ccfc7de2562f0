//! End-to-end runs of two arguments: Smith's family of fibre sums with
//! pairwise non-equivalent stabilizations, and the parity contradiction for
//! a stabilized `S²×S²` together with its `(a, b)` classification. Also the
//! randomized soundness sweep of the lattice obstruction.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chern::{self, ChernError, StabilizerSpec, SymplecticData};
use crate::equiv::{
    bounded_isometry_search, random_lattice, same_orbit_obstruction, stabilization_transfer,
    EquivError, OrbitVerdict, TransferVerdict,
};
use crate::gw::{parse_script, solve_unknowns, verify_certificate, Certificate, GwError, Verdict};
use crate::lattice::{Fingerprint, IntersectionLattice};
use crate::linalg::IntMatrix;
use crate::ring::presets;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("the Smith family needs n >= 2, got {0}")]
    SmithRange(u32),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Gw(#[from] GwError),
    #[error("built-in equation script does not parse: {0}")]
    Script(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct SmithClass {
    /// `c₁ = j · (1, …, 1)`.
    pub multiple: u32,
    pub fingerprint: Fingerprint,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmithTransfer {
    pub left: u32,
    pub right: u32,
    pub stabilizer: StabilizerSpec,
    pub verdict: TransferVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct SmithReport {
    pub n: u32,
    pub summands: Vec<String>,
    /// σ from additivity over the summands.
    pub sigma: i64,
    /// σ read off the stand-in lattice; must agree with `sigma`.
    pub lattice_sigma: i64,
    pub lattice: String,
    pub p1_number: i64,
    pub classes: Vec<SmithClass>,
    pub transfers: Vec<SmithTransfer>,
    pub all_distinct: bool,
}

/// Stabilizers checked for every pair: `ℂPᵏ` and `(S²)ᵏ`, `k = 1, 2, 3`.
pub fn smith_stabilizers() -> Vec<StabilizerSpec> {
    (1..=3)
        .flat_map(|k| {
            [
                StabilizerSpec::ProjectiveSpace(k),
                StabilizerSpec::Surfaces {
                    genus: 0,
                    count: k as usize,
                },
            ]
        })
        .collect()
}

/// `Z_n = T⁴ #_{T²} (n+3)·E(1)`. Its ring is not needed by the argument, so
/// `H²` is modelled by `#(2n+5)ℂP² # (10n+29)ℂP̄²`, which has the same
/// signature, carrying the classes `j·(1, …, 1)` of divisibility `j`.
pub fn smith(n: u32) -> Result<SmithReport, PipelineError> {
    if n < 2 {
        return Err(PipelineError::SmithRange(n));
    }
    let mut parts = vec![chern::torus4()];
    parts.extend(std::iter::repeat(chern::elliptic_e1()).take(n as usize + 3));
    let sigma = chern::fibre_sum_signature(&parts)?;

    let (p, q) = (2 * n as usize + 5, 10 * n as usize + 29);
    let ring = Arc::new(presets::connected_sum_cp2(p, q));
    let ones = vec![1i64; p + q];
    let base = SymplecticData::from_ring(
        format!("Z{n}"),
        ring.clone(),
        crate::ring::GradedClass::from_coordinates(&ring, 2, &ones),
    )?;
    let lattice_sigma = base
        .sigma
        .ok_or_else(|| ChernError::UnknownSignature(base.name.clone()))?;
    let mut numeric = SymplecticData::numeric(format!("Z{n}"), sigma, true);
    numeric.name = base.name.clone();
    let p1_number = chern::p1_number_product_with_surfaces(&numeric, 1)?;

    let forms: Vec<SymplecticData> = (1..=n as i64)
        .map(|j| {
            let c: Vec<i64> = ones.iter().map(|x| x * j).collect();
            base.with_c1_coordinates(&c)
        })
        .collect::<Result<_, _>>()?;
    let classes = forms
        .iter()
        .zip(1..)
        .map(|(f, j)| {
            Ok(SmithClass {
                multiple: j,
                fingerprint: chern::c1_orbit_fingerprint(f)?,
            })
        })
        .collect::<Result<Vec<_>, ChernError>>()?;

    let mut transfers = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            for stab in smith_stabilizers() {
                let r = stabilization_transfer(&forms[i], &forms[j], &stab)?;
                transfers.push(SmithTransfer {
                    left: i as u32 + 1,
                    right: j as u32 + 1,
                    stabilizer: stab,
                    verdict: r.verdict,
                });
            }
        }
    }
    let all_distinct = transfers
        .iter()
        .all(|t| t.verdict == TransferVerdict::Distinct);
    Ok(SmithReport {
        n,
        summands: parts.iter().map(|s| s.name.clone()).collect(),
        sigma,
        lattice_sigma,
        lattice: ring.name().to_string(),
        p1_number,
        classes,
        transfers,
        all_distinct,
    })
}

/// The chain on `X₀ × S²`, with the unknown `X₀`-invariants as integers:
/// `x = GW(γ̃α, γ̃α, α)`, `y = GW(α, α, α)`, `t = GW(γ̃α, α, α)`, and `c` the
/// `h`-coefficient of the pulled back class. Sphere factors are evaluated.
pub const LEMMA57_SCRIPT: &str = "\
int c, t, x, y
GW[0,3,1](h,h,h) = x*GW[0,3,0](1,1,1) + c^2*y*GW[0,3,0](h,h,1) + 2*c*t*GW[0,3,0](1,h,1)
";

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    pub source: Vec<String>,
    /// The equation after evaluating the sphere factors, as `expr = 0`.
    pub reduced: Vec<String>,
    pub verdict: Verdict,
    pub obstruction: Option<String>,
    pub certificate_verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AbCandidate {
    pub a: i64,
    pub b: i64,
    pub fingerprint: Fingerprint,
    /// `c₁` reduces to `w₂ = 0` on the even form.
    pub spin_compatible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma57Report {
    pub chain: ChainReport,
    /// Right-hand side of `ab = χ(S²×S²)`.
    pub ab: i64,
    pub candidates: Vec<AbCandidate>,
    pub survivors: Vec<(i64, i64)>,
}

fn run_chain() -> Result<ChainReport, PipelineError> {
    let script =
        parse_script(LEMMA57_SCRIPT).map_err(|e| PipelineError::Script(e.to_string()))?;
    let ev = crate::gw::SphereEvaluator::new();
    let reduced = script
        .equations
        .iter()
        .map(|e| Ok(format!("{} = 0", e.evaluate_spheres(&ev)?)))
        .collect::<Result<Vec<_>, GwError>>()?;
    let verdict = solve_unknowns(&script.equations, &script.domains)?;
    let (obstruction, certificate_verified) = match &verdict {
        Verdict::Infeasible { certificate } => (
            Some(certificate.kind()),
            verify_certificate(&script.equations, &script.domains, certificate)?,
        ),
        _ => (None, false),
    };
    Ok(ChainReport {
        source: script.sources,
        reduced,
        verdict,
        obstruction,
        certificate_verified,
    })
}

/// Integer pairs with `a·b = m`, ordered by `a`.
pub fn factor_pairs(m: i64) -> Vec<(i64, i64)> {
    assert!(m != 0, "infinitely many pairs");
    let bound = m.abs();
    (-bound..=bound)
        .filter(|&a| a != 0 && m % a == 0)
        .map(|a| (a, m / a))
        .collect()
}

/// `0 = σ = 2c₂ - c₁² = 2χ - 2ab` on `S²×S²`, then the spin filter.
pub fn lemma57() -> Result<Lemma57Report, PipelineError> {
    let chain = run_chain()?;
    let s2xs2 = chern::s2xs2_standard();
    let lattice = s2xs2.ring()?.intersection_lattice().map_err(ChernError::from)?;
    let chi = 4;
    let sigma = s2xs2.sigma.unwrap_or(0);
    // 2ab = 2χ - σ
    let ab = (2 * chi - sigma) / 2;
    let mut by_pair = BTreeMap::new();
    for (a, b) in factor_pairs(ab) {
        let fp = lattice
            .fingerprint(&[a, b])
            .map_err(ChernError::from)?;
        by_pair.insert((a, b), fp);
    }
    let candidates: Vec<AbCandidate> = by_pair
        .into_iter()
        .map(|((a, b), fingerprint)| AbCandidate {
            a,
            b,
            fingerprint,
            spin_compatible: fingerprint.characteristic,
        })
        .collect();
    let survivors = candidates
        .iter()
        .filter(|c| c.spin_compatible)
        .map(|c| (c.a, c.b))
        .collect();
    Ok(Lemma57Report {
        chain,
        ab,
        candidates,
        survivors,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessCase {
    pub gram: IntMatrix,
    pub v0: Vec<i64>,
    pub v1: Vec<i64>,
    pub witness: IntMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessReport {
    pub samples: usize,
    pub bound: i64,
    pub seed: u64,
    pub distinct: usize,
    pub unknown: usize,
    /// `Distinct` verdicts for which the search still found an isometry.
    pub contradicted: Vec<SoundnessCase>,
}

fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
    if v.iter().all(|&x| x == 0) {
        let mut w = v;
        w[0] = 1;
        w
    } else {
        v
    }
}

/// Random lattices of rank at most 4 and random vector pairs; every pair
/// the obstruction separates is handed to the witness search. Half of the
/// pairs are `(v, ±Mv)` for a random isometry `M` so both verdicts occur.
pub fn soundness_sweep(samples: usize, bound: i64, seed: u64) -> Result<SoundnessReport, PipelineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(IntersectionLattice, Vec<i64>, Vec<i64>)> = (0..samples)
        .map(|_| {
            let l = random_lattice(&mut rng, 4);
            let v0 = random_vector(&mut rng, l.rank());
            let v1 = if rng.gen_bool(0.5) {
                random_vector(&mut rng, l.rank())
            } else {
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                v0.iter().map(|x| s * x).collect()
            };
            (l, v0, v1)
        })
        .collect();
    let outcomes: Vec<Result<(bool, Option<SoundnessCase>), EquivError>> = cases
        .par_iter()
        .map(|(l, v0, v1)| {
            let r = same_orbit_obstruction(l, v0, v1)?;
            if r.verdict != OrbitVerdict::Distinct {
                return Ok((false, None));
            }
            let hit = bounded_isometry_search(l, v0, v1, bound)?.map(|witness| SoundnessCase {
                gram: l.gram().clone(),
                v0: v0.clone(),
                v1: v1.clone(),
                witness,
            });
            Ok((true, hit))
        })
        .collect();
    let mut distinct = 0;
    let mut contradicted = Vec::new();
    for o in outcomes {
        let (separated, hit) = o?;
        distinct += separated as usize;
        contradicted.extend(hit);
    }
    Ok(SoundnessReport {
        samples,
        bound,
        seed,
        distinct,
        unknown: samples - distinct,
        contradicted,
    })
}

impl ChainReport {
    pub fn is_parity_contradiction(&self) -> bool {
        matches!(
            &self.verdict,
            Verdict::Infeasible {
                certificate: Certificate::Modular { modulus: 2, .. }
            }
        ) && self.certificate_verified
    }
}
