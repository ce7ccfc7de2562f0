use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::scalar::Field;
use crate::Rational;

use super::sphere::{SphereEvaluator, SphereSymbol};
use super::GwError;

/// A factor of a monomial: an invariant of `S²` that can be evaluated, or a
/// named integer unknown (which also stands for invariants of targets we
/// cannot evaluate).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Sphere(SphereSymbol),
    Var(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Sphere(s) => write!(f, "{s}"),
            Atom::Var(v) => write!(f, "{v}"),
        }
    }
}

/// Product of atoms with multiplicities. The empty monomial is `1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub BTreeMap<Atom, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial([(a, 1)].into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (a, &e) in &other.0 {
            *out.entry(a.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    /// Names of the unknowns, in order.
    pub fn vars(&self) -> Vec<(&str, u32)> {
        self.0
            .iter()
            .filter_map(|(a, &e)| match a {
                Atom::Var(v) => Some((v.as_str(), e)),
                Atom::Sphere(_) => None,
            })
            .collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (a, &e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Linear combination of monomials with coefficients in `F`. Zero
/// coefficients are dropped and equal monomials merged on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GWExpression<F: Field = Rational> {
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> Default for GWExpression<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> GWExpression<F> {
    pub fn zero() -> Self {
        GWExpression {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: F) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn term(c: F, m: Monomial) -> Self {
        let mut e = Self::zero();
        e.push(c, m);
        e
    }

    pub fn var(name: &str) -> Self {
        Self::term(F::one(), Monomial::atom(Atom::Var(name.to_string())))
    }

    pub fn sphere(s: SphereSymbol) -> Self {
        Self::term(F::one(), Monomial::atom(Atom::Sphere(s)))
    }

    fn push(&mut self, c: F, m: Monomial) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(F::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, F> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if no atoms are left.
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    /// Coefficient of the empty monomial.
    pub fn constant_term(&self) -> F {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(F::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(c.clone(), m.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, k: &F) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.push(c.clone() * k.clone(), m.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.push(c1.clone() * c2.clone(), m1.mul(m2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(F::one()), |acc, _| acc.mul(self))
    }

    /// Every unknown that occurs.
    pub fn vars(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.vars().into_iter().map(|(v, _)| v.to_string()))
            .collect()
    }

    /// Replaces every sphere invariant by its value.
    pub fn evaluate_spheres(&self, ev: &SphereEvaluator<F>) -> Result<Self, GwError> {
        let mut out = Self::zero();
        'terms: for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = BTreeMap::new();
            for (a, &e) in &m.0 {
                match a {
                    Atom::Sphere(s) => {
                        let v = ev.value(s)?;
                        if v.is_zero() {
                            continue 'terms;
                        }
                        coeff = coeff * crate::scalar::pow(&v, e);
                    }
                    Atom::Var(_) => {
                        rest.insert(a.clone(), e);
                    }
                }
            }
            out.push(coeff, Monomial(rest));
        }
        Ok(out)
    }

    /// Substitutes an integer value for an unknown.
    pub fn substitute(&self, var: &str, value: i64) -> Self {
        let key = Atom::Var(var.to_string());
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            match m.0.get(&key) {
                Some(&e) => {
                    let mut rest = m.0.clone();
                    rest.remove(&key);
                    out.push(
                        c.clone() * crate::scalar::pow(&F::from_int(value), e),
                        Monomial(rest),
                    );
                }
                None => out.push(c.clone(), m.clone()),
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for GWExpression<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}
