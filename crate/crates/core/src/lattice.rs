//! Unimodular symmetric bilinear forms and the orbit invariants of vectors
//! in them.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, IntMatrix};
use crate::scalar::Field;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("Gram matrix must be square and non-empty")]
    Shape,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("Gram matrix has determinant {0}, expected ±1")]
    NotUnimodular(String),
    #[error("vector has length {got}, lattice rank is {rank}")]
    Dimension { got: usize, rank: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// `H²` of a closed oriented 4-manifold with its intersection form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionLattice {
    gram: IntMatrix,
}

/// `(divisibility, |v·v|, characteristic)`: unchanged by isometries and
/// anti-isometries, and by `v ↦ -v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub divisibility: u64,
    pub abs_square: u64,
    pub characteristic: bool,
}

impl IntersectionLattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Shape);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(LatticeError::NotSymmetric);
                }
            }
        }
        let det = linalg::determinant(&gram);
        if det.abs() != One::one() {
            return Err(LatticeError::NotUnimodular(det.to_string()));
        }
        Ok(IntersectionLattice { gram })
    }

    /// The hyperbolic plane `[[0,1],[1,0]]`.
    pub fn hyperbolic() -> Self {
        IntersectionLattice {
            gram: vec![vec![0, 1], vec![1, 0]],
        }
    }

    /// `p⟨1⟩ ⊕ q⟨-1⟩`.
    pub fn diagonal(p: usize, q: usize) -> Self {
        let n = p + q;
        assert!(n > 0, "empty lattice");
        let gram = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i == j, i < p) {
                        (true, true) => 1,
                        (true, false) => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        IntersectionLattice { gram }
    }

    /// Negative-definite `E8` (the intersection form summand of `E(n)`).
    pub fn negative_e8() -> Self {
        // Cartan matrix of E8 with the branch at node 5
        let mut g = vec![vec![0i64; 8]; 8];
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
        for i in 0..8 {
            g[i][i] = -2;
        }
        for (a, b) in edges {
            g[a][b] = 1;
            g[b][a] = 1;
        }
        IntersectionLattice::new(g).expect("E8 is unimodular")
    }

    pub fn direct_sum(&self, other: &IntersectionLattice) -> IntersectionLattice {
        let (n, m) = (self.rank(), other.rank());
        let mut g = vec![vec![0; n + m]; n + m];
        for i in 0..n {
            g[i][..n].copy_from_slice(&self.gram[i]);
        }
        for i in 0..m {
            g[n + i][n..].copy_from_slice(&other.gram[i]);
        }
        IntersectionLattice { gram: g }
    }

    /// Gram matrix of the same form in the basis given by the columns of
    /// `m` (`Mᵀ G M`). `m` must be unimodular.
    pub fn change_basis(&self, m: &[Vec<i64>]) -> Result<IntersectionLattice, LatticeError> {
        IntersectionLattice::new(linalg::congruence(&self.gram, m))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn determinant(&self) -> i64 {
        use num_traits::ToPrimitive;
        linalg::determinant(&self.gram).to_i64().expect("±1")
    }

    /// `(b⁺, b⁻)` computed by diagonalization over `F`.
    pub fn inertia_in<F: Field>(&self) -> (usize, usize) {
        let (p, n, _) = linalg::inertia::<F>(&linalg::to_field(&self.gram));
        (p, n)
    }

    pub fn inertia(&self) -> (usize, usize) {
        self.inertia_in::<BigRational>()
    }

    pub fn signature(&self) -> i64 {
        let (p, n) = self.inertia();
        p as i64 - n as i64
    }

    pub fn parity(&self) -> Parity {
        if (0..self.rank()).all(|i| self.gram[i][i] % 2 == 0) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn check_dim(&self, v: &[i64]) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            Err(LatticeError::Dimension {
                got: v.len(),
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    pub fn pair(&self, v: &[i64], w: &[i64]) -> i64 {
        linalg::bilinear(&self.gram, v, w)
    }

    pub fn square(&self, v: &[i64]) -> i64 {
        self.pair(v, v)
    }

    /// `v·x ≡ x·x (mod 2)` for every basis vector `x`.
    pub fn is_characteristic(&self, v: &[i64]) -> bool {
        let gv = linalg::mat_vec(&self.gram, v);
        (0..self.rank()).all(|i| (gv[i] - self.gram[i][i]).rem_euclid(2) == 0)
    }

    pub fn fingerprint(&self, v: &[i64]) -> Result<Fingerprint, LatticeError> {
        self.check_dim(v)?;
        Ok(Fingerprint {
            divisibility: divisibility(v),
            abs_square: self.square(v).unsigned_abs(),
            characteristic: self.is_characteristic(v),
        })
    }

    /// `Some(+1)` if `MᵀGM = G`, `Some(-1)` if `MᵀGM = -G`.
    pub fn isometry_sign(&self, m: &[Vec<i64>]) -> Option<i64> {
        let c = linalg::congruence(&self.gram, m);
        if c == self.gram {
            Some(1)
        } else if c == linalg::negate(&self.gram) {
            Some(-1)
        } else {
            None
        }
    }
}

/// gcd of the entries; 0 for the zero vector.
pub fn divisibility(v: &[i64]) -> u64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x)).unsigned_abs()
}
