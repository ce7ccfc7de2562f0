//! Orbits of characteristic classes under isometries of `H²`.
//!
//! The obstruction side compares isometry invariants and is sound but
//! incomplete. The search side looks for explicit (anti-)isometries with
//! bounded entries and is used as an oracle against the obstruction.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chern::{ChernError, StabilizerSpec, SymplecticData};
use crate::lattice::{Fingerprint, IntersectionLattice, LatticeError};
use crate::linalg::{self, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error("search bound must be at least 1")]
    Bound,
    #[error("the two manifolds do not share a cohomology ring")]
    DifferentRings,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitVerdict {
    Distinct,
    /// `M` with `MᵀGM = ±G` and `M v₀ = ±v₁`.
    EquivalentWitness(IntMatrix),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub verdict: OrbitVerdict,
    pub invariants_v0: Fingerprint,
    pub invariants_v1: Fingerprint,
    /// Entry bound of the witness search, if one ran.
    pub search_bound: Option<i64>,
}

/// `Distinct` when the fingerprints differ, `Unknown` otherwise.
pub fn same_orbit_obstruction(
    l: &IntersectionLattice,
    v0: &[i64],
    v1: &[i64],
) -> Result<OrbitReport, EquivError> {
    let f0 = l.fingerprint(v0)?;
    let f1 = l.fingerprint(v1)?;
    Ok(OrbitReport {
        verdict: if f0 != f1 {
            OrbitVerdict::Distinct
        } else {
            OrbitVerdict::Unknown
        },
        invariants_v0: f0,
        invariants_v1: f1,
        search_bound: None,
    })
}

/// The obstruction, followed by a witness search when it is silent.
pub fn orbit_check(
    l: &IntersectionLattice,
    v0: &[i64],
    v1: &[i64],
    bound: Option<i64>,
) -> Result<OrbitReport, EquivError> {
    let mut r = same_orbit_obstruction(l, v0, v1)?;
    if let (OrbitVerdict::Unknown, Some(b)) = (&r.verdict, bound) {
        r.search_bound = Some(b);
        if let Some(m) = bounded_isometry_search(l, v0, v1, b)? {
            r.verdict = OrbitVerdict::EquivalentWitness(m);
        }
    }
    Ok(r)
}

fn box_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let side = (2 * bound + 1) as usize;
    (0..side.pow(n as u32))
        .map(|mut idx| {
            // most significant coordinate first, so the list is lexicographic
            let mut v = vec![0; n];
            for x in v.iter_mut().rev() {
                *x = (idx % side) as i64 - bound;
                idx /= side;
            }
            v
        })
        .collect()
}

fn from_columns(cols: &[Vec<i64>]) -> IntMatrix {
    let n = cols.len();
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

/// Candidate columns for an isometry of sign `s`: the self-pairing of
/// column `j` is `s·G_jj`, optionally with one more linear condition per
/// column, and pairings with earlier columns are checked on the way.
struct ColumnSearch<'a> {
    g: &'a IntMatrix,
    s: i64,
    candidates: Vec<Vec<Vec<i64>>>,
}

impl<'a> ColumnSearch<'a> {
    /// `extra = Some((y, c))` keeps only columns with `wᵀ y = c_j`.
    fn new(g: &'a IntMatrix, s: i64, pool: &[Vec<i64>], extra: Option<(&[i64], &[i64])>) -> Self {
        let candidates = (0..g.len())
            .map(|j| {
                pool.iter()
                    .filter(|w| linalg::bilinear(g, w, w) == s * g[j][j])
                    .filter(|w| match extra {
                        Some((y, c)) => w.iter().zip(y).map(|(a, b)| a * b).sum::<i64>() == c[j],
                        None => true,
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        ColumnSearch { g, s, candidates }
    }

    fn compatible(&self, cols: &[Vec<i64>], j: usize, w: &[i64]) -> bool {
        cols.iter()
            .enumerate()
            .all(|(i, c)| linalg::bilinear(self.g, c, w) == self.s * self.g[i][j])
    }

    /// Visits complete column lists in lexicographic order until `f` says stop.
    fn walk(&self, cols: &mut Vec<Vec<i64>>, f: &mut dyn FnMut(&[Vec<i64>]) -> bool) -> bool {
        let j = cols.len();
        if j == self.g.len() {
            return f(cols);
        }
        for w in &self.candidates[j] {
            if self.compatible(cols, j, w) {
                cols.push(w.clone());
                let stop = self.walk(cols, f);
                cols.pop();
                if stop {
                    return true;
                }
            }
        }
        false
    }

    fn first(&self) -> Option<IntMatrix> {
        self.candidates[0].par_iter().find_map_first(|w| {
            let mut hit = None;
            self.walk(&mut vec![w.clone()], &mut |cols| {
                hit = Some(from_columns(cols));
                true
            });
            hit
        })
    }
}

/// Every `M` with `|entries| ≤ bound` and `MᵀGM = sG`, `s = ±1`, in
/// lexicographic order of its columns, isometries first.
pub fn enumerate_isometries(l: &IntersectionLattice, bound: i64) -> Vec<(IntMatrix, i64)> {
    let pool = box_vectors(l.rank(), bound);
    let mut out = Vec::new();
    for s in [1, -1] {
        let search = ColumnSearch::new(l.gram(), s, &pool, None);
        search.walk(&mut Vec::new(), &mut |cols| {
            out.push((from_columns(cols), s));
            false
        });
    }
    out
}

/// First `M` (isometries before anti-isometries, then lexicographic in the
/// columns) with `|entries| ≤ bound`, `MᵀGM = ±G` and `M v₀ = ±v₁`.
pub fn bounded_isometry_search(
    l: &IntersectionLattice,
    v0: &[i64],
    v1: &[i64],
    bound: i64,
) -> Result<Option<IntMatrix>, EquivError> {
    if bound < 1 {
        return Err(EquivError::Bound);
    }
    l.check_dim(v0)?;
    l.check_dim(v1)?;
    let g = l.gram();
    let pool = box_vectors(l.rank(), bound);
    // MᵀGM = sG and Mv₀ = tv₁ give Mᵀ G (t v₁) = s G v₀, one linear
    // condition per column; conversely that condition forces Mv₀ = tv₁
    let gv0 = linalg::mat_vec(g, v0);
    for s in [1, -1] {
        let target: Vec<i64> = gv0.iter().map(|x| s * x).collect();
        let mut best: Option<IntMatrix> = None;
        for t in [1, -1] {
            let y: Vec<i64> = linalg::mat_vec(g, v1).iter().map(|x| t * x).collect();
            let search = ColumnSearch::new(g, s, &pool, Some((&y, &target)));
            if let Some(m) = search.first() {
                let key = |m: &IntMatrix| linalg::transpose(m);
                if best.as_ref().map_or(true, |b| key(&m) < key(b)) {
                    best = Some(m);
                }
            }
        }
        if let Some(m) = best {
            debug_assert!(l.isometry_sign(&m) == Some(s));
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Random unimodular lattice of rank `1..=max_rank` with small entries,
/// obtained from a standard form by a random change of basis.
pub fn random_lattice<R: Rng>(rng: &mut R, max_rank: usize) -> IntersectionLattice {
    let n = rng.gen_range(1..=max_rank);
    let base = match (n, rng.gen_range(0..3)) {
        (1, _) => {
            let p = rng.gen_range(0..=1);
            IntersectionLattice::diagonal(p, 1 - p)
        }
        (_, 0) if n % 2 == 0 => {
            let mut l = IntersectionLattice::hyperbolic();
            for _ in 1..n / 2 {
                l = l.direct_sum(&IntersectionLattice::hyperbolic());
            }
            l
        }
        (2, 1) => IntersectionLattice::hyperbolic(),
        (_, 1) => IntersectionLattice::hyperbolic().direct_sum(&random_diagonal(rng, n - 2)),
        _ => random_diagonal(rng, n),
    };
    let mut m = linalg::identity(n);
    for _ in 0..rng.gen_range(0..4) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let k = if rng.gen_bool(0.5) { 1 } else { -1 };
            for row in m.iter_mut() {
                row[i] += k * row[j];
            }
        }
    }
    base.change_basis(&m)
        .expect("base change keeps unimodularity")
}

fn random_diagonal<R: Rng>(rng: &mut R, n: usize) -> IntersectionLattice {
    let p = rng.gen_range(0..=n);
    IntersectionLattice::diagonal(p, n - p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferVerdict {
    /// The stabilized classes are in different orbits.
    Distinct,
    /// Hypotheses hold but the base classes are not separated.
    Unknown,
    /// A hypothesis of the transfer fails.
    Inconclusive { failed_hypothesis: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub stabilizer: StabilizerSpec,
    pub hypotheses: Vec<(String, bool)>,
    pub base: Option<OrbitReport>,
    pub verdict: TransferVerdict,
}

/// Transfers a base obstruction for two symplectic forms on `X` to
/// `X × Y`. With `Y = ℂPᵏ` nothing beyond the base comparison is needed;
/// with products of surfaces `σ(X) ≠ 0` is required, and simple
/// connectivity of `X` when the genus is positive.
pub fn stabilization_transfer(
    x0: &SymplecticData,
    x1: &SymplecticData,
    y: &StabilizerSpec,
) -> Result<TransferReport, EquivError> {
    let ring = x0.ring()?;
    if x1.ring()? != ring {
        return Err(EquivError::DifferentRings);
    }
    let mut hypotheses = Vec::new();
    if let StabilizerSpec::Surfaces { genus, .. } = *y {
        hypotheses.push((
            "signature of X is nonzero".to_string(),
            x0.sigma.is_some_and(|s| s != 0),
        ));
        if genus > 0 {
            hypotheses.push((
                "X is simply connected".to_string(),
                x0.simply_connected && x1.simply_connected,
            ));
        }
    }
    let base = if ring.top_degree() == 4 {
        let lattice = ring.intersection_lattice().map_err(ChernError::from)?;
        Some(same_orbit_obstruction(
            &lattice,
            &x0.c1_coordinates()?,
            &x1.c1_coordinates()?,
        )?)
    } else {
        None
    };
    let verdict = if let Some((h, _)) = hypotheses.iter().find(|(_, ok)| !ok) {
        TransferVerdict::Inconclusive {
            failed_hypothesis: h.clone(),
        }
    } else if base.as_ref().map(|b| &b.verdict) == Some(&OrbitVerdict::Distinct) {
        TransferVerdict::Distinct
    } else {
        TransferVerdict::Unknown
    };
    Ok(TransferReport {
        stabilizer: *y,
        hypotheses,
        base,
        verdict,
    })
}

/// What the check found for one matrix `ψ*` on `H²(X × ℂPᵏ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop22Case {
    /// Not the degree-2 part of a graded ring isomorphism.
    Skipped(&'static str),
    Holds,
    Violates(&'static str),
}

/// `ψ*` in the basis `(x₁, …, x_r, h)`: columns are images. Checks that
/// `ψ*` keeps `H²(X)` setwise, is invertible, restricts to `±` an isometry
/// and kills `(ψ*h)^{k+1}`; then that `ψ*h = a·h + α` has `(k+1)α = 0` and
/// carries `c + (k+1)h` to something whose `X` part is `A c`.
pub fn prop22_check(g: &IntMatrix, psi: &IntMatrix, k: u32) -> Prop22Case {
    let r = g.len();
    if (0..r).any(|j| psi[r][j] != 0) {
        return Prop22Case::Skipped("does not preserve H2(X)");
    }
    let a_block: IntMatrix = (0..r).map(|i| psi[i][..r].to_vec()).collect();
    let alpha: Vec<i64> = (0..r).map(|i| psi[i][r]).collect();
    let a = psi[r][r];
    let c = linalg::congruence(g, &a_block);
    if c != *g && c != linalg::negate(g) {
        return Prop22Case::Skipped("restriction is not an isometry up to sign");
    }
    if a.abs() != 1 {
        return Prop22Case::Skipped("not invertible");
    }
    // (a h + α)^{k+1} in H*(X) ⊗ ℤ[h]/(h^{k+1}): only α·h^k and α²·h^{k-1} survive
    let k1 = k as i64 + 1;
    let lin = k1 * a.pow(k);
    let quad = k1 * (k1 - 1) / 2 * a.pow(k - 1) * linalg::bilinear(g, &alpha, &alpha);
    if alpha.iter().any(|&x| lin * x != 0) || quad != 0 {
        return Prop22Case::Skipped("does not respect h^(k+1) = 0");
    }
    if alpha.iter().any(|&x| k1 * x != 0) {
        return Prop22Case::Violates("(k+1) alpha != 0");
    }
    for c in (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect::<Vec<i64>>()) {
        let image = linalg::mat_vec(psi, &c.iter().copied().chain([k1]).collect::<Vec<_>>());
        let expect = linalg::mat_vec(&a_block, &c);
        if image[..r] != expect[..] {
            return Prop22Case::Violates("c1 transfer");
        }
    }
    Prop22Case::Holds
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop22Verdict {
    Verified,
    Counterexample {
        gram: IntMatrix,
        matrix: IntMatrix,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop22Report {
    pub rank_x: usize,
    pub entry_bound: i64,
    pub k: u32,
    pub grams: Vec<IntMatrix>,
    /// Matrices that passed the ring-isomorphism filters and were checked.
    pub checked: u64,
    /// Size of the full box `(2b+1)^{r²+r+1}` per Gram matrix.
    pub box_size: String,
    pub verdict: Prop22Verdict,
}

/// Unimodular forms of the given rank used as stand-ins for `H²(X)`.
pub fn sample_grams(rank: usize) -> Vec<IntMatrix> {
    let mut out: Vec<IntersectionLattice> = (0..=rank)
        .map(|p| IntersectionLattice::diagonal(p, rank - p))
        .collect();
    if rank % 2 == 0 {
        let mut h = IntersectionLattice::hyperbolic();
        for _ in 1..rank / 2 {
            h = h.direct_sum(&IntersectionLattice::hyperbolic());
        }
        out.push(h);
    }
    if rank >= 3 {
        out.push(
            IntersectionLattice::hyperbolic()
                .direct_sum(&IntersectionLattice::diagonal(rank - 2, 0)),
        );
    }
    out.into_iter().map(|l| l.gram().clone()).collect()
}

/// Every `ψ*` in the box on `H²(X × ℂPᵏ)` for the forms of
/// [`sample_grams`], run through [`prop22_check`].
pub fn brute_force_prop22(rank_x: usize, entry_bound: i64, k: u32) -> Prop22Report {
    assert!(rank_x >= 1 && entry_bound >= 1 && k >= 1);
    let grams = sample_grams(rank_x);
    let side = (2 * entry_bound + 1) as u128;
    let box_size = side.pow((rank_x * rank_x + rank_x + 1) as u32);
    let alphas = box_vectors(rank_x, entry_bound);
    let mut checked = 0u64;
    for g in &grams {
        let l = IntersectionLattice::new(g.clone()).expect("sample forms are unimodular");
        // the isometry filter is applied while enumerating A
        let blocks = enumerate_isometries(&l, entry_bound);
        let results: Vec<Result<u64, (IntMatrix, &str)>> = blocks
            .par_iter()
            .map(|(a_block, _)| {
                let mut local = 0u64;
                for alpha in &alphas {
                    for a in -entry_bound..=entry_bound {
                        let mut psi: IntMatrix = a_block
                            .iter()
                            .zip(alpha)
                            .map(|(row, &x)| row.iter().copied().chain([x]).collect())
                            .collect();
                        psi.push(vec![0; rank_x].into_iter().chain([a]).collect());
                        match prop22_check(g, &psi, k) {
                            Prop22Case::Skipped(_) => {}
                            Prop22Case::Holds => local += 1,
                            Prop22Case::Violates(reason) => return Err((psi, reason)),
                        }
                    }
                }
                Ok(local)
            })
            .collect();
        for r in results {
            match r {
                Ok(n) => checked += n,
                Err((matrix, reason)) => {
                    return Prop22Report {
                        rank_x,
                        entry_bound,
                        k,
                        grams: grams.clone(),
                        checked,
                        box_size: box_size.to_string(),
                        verdict: Prop22Verdict::Counterexample {
                            gram: g.clone(),
                            matrix,
                            reason: reason.to_string(),
                        },
                    }
                }
            }
        }
    }
    Prop22Report {
        rank_x,
        entry_bound,
        k,
        grams,
        checked,
        box_size: box_size.to_string(),
        verdict: Prop22Verdict::Verified,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chern;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hyp() -> IntersectionLattice {
        IntersectionLattice::hyperbolic()
    }

    #[test]
    fn obstruction_examples() {
        let l = IntersectionLattice::diagonal(1, 1);
        let r = same_orbit_obstruction(&l, &[1, 0], &[2, 0]).unwrap();
        assert_eq!(r.verdict, OrbitVerdict::Distinct);
        let r = same_orbit_obstruction(&l, &[3, 1], &[-3, -1]).unwrap();
        assert_eq!(r.verdict, OrbitVerdict::Unknown);
        let r = same_orbit_obstruction(&hyp(), &[2, 2], &[2, -2]).unwrap();
        assert_eq!(r.verdict, OrbitVerdict::Unknown);
        assert_eq!(r.invariants_v0, r.invariants_v1);
        assert!(same_orbit_obstruction(&hyp(), &[1], &[1, 0]).is_err());
    }

    #[test]
    fn search_examples() {
        let m = bounded_isometry_search(&hyp(), &[1, 2], &[1, 2], 1)
            .unwrap()
            .unwrap();
        assert_eq!(
            l_apply(&m, &[1, 2])
                .iter()
                .map(|x| x.abs())
                .collect::<Vec<_>>(),
            vec![1, 2]
        );
        let m = bounded_isometry_search(&hyp(), &[1, 2], &[2, 1], 1)
            .unwrap()
            .unwrap();
        assert_eq!(hyp().isometry_sign(&m), Some(1));
        assert_eq!(
            bounded_isometry_search(&hyp(), &[1, 0], &[2, 0], 3).unwrap(),
            None
        );
        assert_eq!(
            bounded_isometry_search(&hyp(), &[1, 0], &[1, 0], 0),
            Err(EquivError::Bound)
        );
        // (2,2) and (2,-2) differ by an anti-isometry of the hyperbolic plane
        let r = orbit_check(&hyp(), &[2, 2], &[2, -2], Some(1)).unwrap();
        let OrbitVerdict::EquivalentWitness(m) = r.verdict else {
            panic!()
        };
        assert!(hyp().isometry_sign(&m).is_some());
    }

    fn l_apply(m: &IntMatrix, v: &[i64]) -> Vec<i64> {
        linalg::mat_vec(m, v)
    }

    #[test]
    fn enumeration_counts() {
        // O(H) ∪ anti-isometries with entries in {-1,0,1}: 4 + 4
        let all = enumerate_isometries(&hyp(), 1);
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|(m, s)| hyp().isometry_sign(m) == Some(*s)));
        // ⟨1⟩ ⊕ ⟨1⟩ has the 8 signed permutations and no anti-isometries
        let d = IntersectionLattice::diagonal(2, 0);
        assert_eq!(enumerate_isometries(&d, 2).len(), 8);
    }

    #[test]
    fn witnesses_preserve_fingerprints() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let l = random_lattice(&mut rng, 3);
            let v: Vec<i64> = (0..l.rank()).map(|_| rng.gen_range(-2..=2)).collect();
            for (m, _) in enumerate_isometries(&l, 1).into_iter().take(5) {
                let w = linalg::mat_vec(&m, &v);
                assert_eq!(l.fingerprint(&v), l.fingerprint(&w));
            }
        }
    }

    #[test]
    fn transfer_guards() {
        let x = chern::s2xs2_standard();
        let other = x.with_c1_coordinates(&[1, 0]).unwrap();
        let r = stabilization_transfer(&x, &other, &StabilizerSpec::ProjectiveSpace(1)).unwrap();
        assert_eq!(r.verdict, TransferVerdict::Distinct);
        // σ(S²×S²) = 0 defeats the surface version
        let r =
            stabilization_transfer(&x, &other, &StabilizerSpec::Surfaces { genus: 2, count: 1 })
                .unwrap();
        assert!(matches!(r.verdict, TransferVerdict::Inconclusive { .. }));
        let r = stabilization_transfer(&x, &x, &StabilizerSpec::ProjectiveSpace(2)).unwrap();
        assert_eq!(r.verdict, TransferVerdict::Unknown);
    }

    #[test]
    fn prop22_filters() {
        let g = vec![vec![0, 1], vec![1, 0]];
        // ψ*h = h + x₁ is not multiplicative: (h + x₁)² = 2 x₁ h ≠ 0
        let psi = vec![vec![1, 0, 1], vec![0, 1, 0], vec![0, 0, 1]];
        assert!(matches!(prop22_check(&g, &psi, 1), Prop22Case::Skipped(_)));
        let id = linalg::identity(3);
        assert_eq!(prop22_check(&g, &id, 1), Prop22Case::Holds);
        let scaled = vec![vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert!(matches!(
            prop22_check(&g, &scaled, 1),
            Prop22Case::Skipped(_)
        ));
    }

    #[test]
    fn small_prop22_boxes() {
        let r = brute_force_prop22(1, 1, 1);
        assert_eq!(r.verdict, Prop22Verdict::Verified);
        assert!(r.checked > 0);
    }
}
