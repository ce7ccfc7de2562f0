//! Integer feasibility of small systems `Σ c_m · m(x) = 0` where every
//! monomial `m` is a product of distinct integer unknowns.
//!
//! Each monomial is relaxed to its own integer unknown and the relaxed
//! linear system is decided exactly by diagonalizing it over `ℤ`. An
//! infeasible relaxation yields a modular certificate for the original
//! system; a feasible one is lifted back to the unknowns when possible.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::smith_diagonalize;
use crate::Rational;

use super::expr::{GWExpression, Monomial};
use super::sphere::shared;
use super::GwError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Integers,
    Finite(Vec<i64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// `Σ_r combination[r] · (equation r, denominators cleared)` has every
    /// monomial coefficient divisible by `modulus` but a constant side
    /// `≢ 0 (mod modulus)`. Modulus 0 means the coefficients vanish outright.
    Modular {
        modulus: i64,
        combination: Vec<i64>,
        /// Monomials of the relaxed system and their combined coefficients.
        monomials: Vec<String>,
        coefficients: Vec<i64>,
        /// The combined constant side and its residue.
        rhs: i64,
        residue: i64,
    },
    /// Every admissible value of `variable` is refuted separately.
    Branches {
        variable: String,
        cases: Vec<(i64, Certificate)>,
    },
}

impl Certificate {
    /// Short human name of the obstruction.
    pub fn kind(&self) -> String {
        match self {
            Certificate::Modular { modulus: 0, .. } => "linear".into(),
            Certificate::Modular { modulus: 2, .. } => "parity".into(),
            Certificate::Modular { modulus, .. } => format!("mod {modulus}"),
            Certificate::Branches { variable, .. } => format!("case split on {variable}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Feasible {
        witness: BTreeMap<String, i64>,
    },
    Infeasible {
        certificate: Certificate,
    },
    /// The relaxation is solvable but no witness was found in the search box.
    Undetermined {
        reason: String,
    },
}

struct LinearSystem {
    monomials: Vec<Monomial>,
    a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
}

fn big(r: &Rational) -> BigInt {
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// Rows `A y = b` with denominators cleared row by row.
fn linear_system(eqs: &[GWExpression]) -> LinearSystem {
    let monomials: Vec<Monomial> = eqs
        .iter()
        .flat_map(|e| e.terms().keys().filter(|m| !m.is_one()).cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for e in eqs {
        let lcm = e
            .terms()
            .values()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let scale = Rational::from_integer(lcm);
        let row = monomials
            .iter()
            .map(|m| {
                e.terms()
                    .get(m)
                    .map(|c| big(&(c * &scale)))
                    .unwrap_or_else(BigInt::zero)
            })
            .collect();
        a.push(row);
        b.push(-big(&(e.constant_term() * &scale)));
    }
    LinearSystem { monomials, a, b }
}

fn to_i64(v: &BigInt) -> Option<i64> {
    v.to_i64()
}

fn prepare(eqs: &[GWExpression]) -> Result<Vec<GWExpression>, GwError> {
    let ev = shared();
    let mut out = Vec::with_capacity(eqs.len());
    for e in eqs {
        let e = e.evaluate_spheres(ev)?;
        for m in e.terms().keys() {
            if let Some((v, p)) = m.vars().into_iter().find(|&(_, p)| p > 1) {
                return Err(GwError::Nonlinear(v.to_string(), p));
            }
        }
        out.push(e);
    }
    Ok(out)
}

/// Decides whether `eqs` (each read as `expr = 0`) has an integer solution
/// with the unknowns in their domains. Unknowns without a domain range over
/// `ℤ`. Sphere invariants in the expressions are evaluated first.
pub fn solve_unknowns(
    eqs: &[GWExpression],
    domains: &BTreeMap<String, Domain>,
) -> Result<Verdict, GwError> {
    let eqs = prepare(eqs)?;
    solve_prepared(&eqs, domains)
}

fn solve_prepared(
    eqs: &[GWExpression],
    domains: &BTreeMap<String, Domain>,
) -> Result<Verdict, GwError> {
    let vars: BTreeSet<String> = eqs.iter().flat_map(|e| e.vars()).collect();
    let finite = vars.iter().find_map(|v| match domains.get(v) {
        Some(Domain::Finite(vals)) => Some((v.clone(), vals.clone())),
        _ => None,
    });
    if let Some((var, values)) = finite {
        let mut cases = Vec::new();
        let mut undetermined = None;
        for &x in &values {
            let sub: Vec<GWExpression> = eqs.iter().map(|e| e.substitute(&var, x)).collect();
            match solve_prepared(&sub, domains)? {
                Verdict::Feasible { mut witness } => {
                    witness.insert(var.clone(), x);
                    return Ok(Verdict::Feasible { witness });
                }
                Verdict::Infeasible { certificate } => cases.push((x, certificate)),
                Verdict::Undetermined { reason } => undetermined = Some(reason),
            }
        }
        return Ok(match undetermined {
            Some(reason) => Verdict::Undetermined { reason },
            None => Verdict::Infeasible {
                certificate: Certificate::Branches {
                    variable: var,
                    cases,
                },
            },
        });
    }

    let sys = linear_system(eqs);
    let rows = sys.a.len();
    let cols = sys.monomials.len();
    let diag = smith_diagonalize(&sys.a, cols);
    let pb: Vec<BigInt> = diag
        .p
        .iter()
        .map(|row| row.iter().zip(&sys.b).map(|(x, y)| x * y).sum())
        .collect();
    let mut z = vec![BigInt::zero(); cols];
    for i in 0..rows {
        let d = diag.d.get(i).cloned().unwrap_or_else(BigInt::zero);
        let r = &pb[i];
        let modulus = if d.is_zero() {
            if r.is_zero() {
                continue;
            }
            Some(BigInt::zero())
        } else if (r % &d).is_zero() {
            z[i] = r / &d;
            None
        } else {
            let abs = d.abs();
            let mut m = BigInt::from(2);
            while !(&abs % &m).is_zero() || (r % &m).is_zero() {
                m += 1;
            }
            Some(m)
        };
        if let Some(m) = modulus {
            return Ok(modular_certificate(&sys, &diag.p[i], &m));
        }
    }
    // y = Q z solves the relaxation
    let y: Vec<BigInt> = diag
        .q
        .iter()
        .map(|row| row.iter().zip(&z).map(|(x, y)| x * y).sum())
        .collect();
    Ok(match lift_witness(eqs, &sys.monomials, &y, &vars) {
        Some(witness) => Verdict::Feasible { witness },
        None => Verdict::Undetermined {
            reason: "the monomial relaxation is solvable but no small witness was found".into(),
        },
    })
}

fn modular_certificate(sys: &LinearSystem, weights: &[BigInt], m: &BigInt) -> Verdict {
    let coeffs: Vec<BigInt> = (0..sys.monomials.len())
        .map(|j| weights.iter().zip(&sys.a).map(|(w, row)| w * &row[j]).sum())
        .collect();
    let rhs: BigInt = weights.iter().zip(&sys.b).map(|(w, b)| w * b).sum();
    let residue = if m.is_zero() {
        rhs.clone()
    } else {
        rhs.mod_floor(m)
    };
    let conv = || -> Option<Certificate> {
        Some(Certificate::Modular {
            modulus: to_i64(m)?,
            combination: weights.iter().map(to_i64).collect::<Option<_>>()?,
            monomials: sys.monomials.iter().map(|m| m.to_string()).collect(),
            coefficients: coeffs.iter().map(to_i64).collect::<Option<_>>()?,
            rhs: to_i64(&rhs)?,
            residue: to_i64(&residue)?,
        })
    };
    match conv() {
        Some(certificate) => Verdict::Infeasible { certificate },
        None => Verdict::Undetermined {
            reason: "obstruction found but its numbers overflow 64 bits".into(),
        },
    }
}

fn satisfies(eqs: &[GWExpression], w: &BTreeMap<String, i64>) -> bool {
    eqs.iter().all(|e| {
        w.iter()
            .fold(e.clone(), |acc, (v, &x)| acc.substitute(v, x))
            .is_zero()
    })
}

fn lift_witness(
    eqs: &[GWExpression],
    monomials: &[Monomial],
    y: &[BigInt],
    vars: &BTreeSet<String>,
) -> Option<BTreeMap<String, i64>> {
    let mut w: BTreeMap<String, i64> = vars.iter().map(|v| (v.clone(), 0)).collect();
    let disjoint = {
        let mut seen = BTreeSet::new();
        monomials
            .iter()
            .all(|m| m.vars().iter().all(|(v, _)| seen.insert(v.to_string())))
    };
    if disjoint {
        for (m, val) in monomials.iter().zip(y) {
            let vs = m.vars();
            let val = to_i64(val)?;
            for (i, (v, _)) in vs.iter().enumerate() {
                w.insert(v.to_string(), if i == 0 { val } else { 1 });
            }
        }
        if satisfies(eqs, &w) {
            return Some(w);
        }
    }
    // small exhaustive search
    let names: Vec<&String> = vars.iter().collect();
    if names.len() > 6 {
        return None;
    }
    const BOX: i64 = 3;
    let side = (2 * BOX + 1) as usize;
    let total = side.pow(names.len() as u32);
    (0..total).find_map(|mut idx| {
        let cand: BTreeMap<String, i64> = names
            .iter()
            .map(|n| {
                let x = (idx % side) as i64 - BOX;
                idx /= side;
                ((*n).clone(), x)
            })
            .collect();
        satisfies(eqs, &cand).then_some(cand)
    })
}

/// Checks a certificate against the equations it claims to refute.
pub fn verify_certificate(
    eqs: &[GWExpression],
    domains: &BTreeMap<String, Domain>,
    cert: &Certificate,
) -> Result<bool, GwError> {
    let eqs = prepare(eqs)?;
    Ok(verify_prepared(&eqs, domains, cert))
}

fn verify_prepared(
    eqs: &[GWExpression],
    domains: &BTreeMap<String, Domain>,
    cert: &Certificate,
) -> bool {
    match cert {
        Certificate::Branches { variable, cases } => {
            let Some(Domain::Finite(values)) = domains.get(variable) else {
                return false;
            };
            let covered: BTreeSet<i64> = cases.iter().map(|(x, _)| *x).collect();
            values.iter().all(|x| covered.contains(x))
                && cases.iter().all(|(x, c)| {
                    let sub: Vec<GWExpression> =
                        eqs.iter().map(|e| e.substitute(variable, *x)).collect();
                    verify_prepared(&sub, domains, c)
                })
        }
        Certificate::Modular {
            modulus,
            combination,
            ..
        } => {
            let sys = linear_system(eqs);
            if combination.len() != sys.a.len() {
                return false;
            }
            let m = BigInt::from(*modulus);
            let w: Vec<BigInt> = combination.iter().map(|&x| BigInt::from(x)).collect();
            let divides = |v: &BigInt| {
                if m.is_zero() {
                    v.is_zero()
                } else {
                    (v % &m).is_zero()
                }
            };
            let coeffs_ok = (0..sys.monomials.len()).all(|j| {
                let c: BigInt = w.iter().zip(&sys.a).map(|(w, row)| w * &row[j]).sum();
                divides(&c)
            });
            let rhs: BigInt = w.iter().zip(&sys.b).map(|(w, b)| w * b).sum();
            coeffs_ok && !divides(&rhs)
        }
    }
}
