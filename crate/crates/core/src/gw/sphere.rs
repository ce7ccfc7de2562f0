//! Invariants `GW^{S²}_{g,n,d}(α₁,…,αₙ)(c)` with `c = [pt]` or `c = [M̄_{g,n}]`,
//! computed by rewriting with the axioms until only base cases are left.
//!
//! Symbols are symmetric in the insertions, so a pure symbol is stored as the
//! number of `h` insertions; general insertions are expanded multilinearly.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ring::{GradedClass, RingPresentation};
use crate::scalar::Field;
use crate::Rational;

use super::expr::{Atom, GWExpression, Monomial};
use super::GwError;

/// Homology class of `M̄_{g,n}` the invariant is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cap {
    Point,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Insertion {
    One,
    H,
}

impl Insertion {
    pub fn degree(self) -> u32 {
        match self {
            Insertion::One => 0,
            Insertion::H => 2,
        }
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Insertion::One => write!(f, "1"),
            Insertion::H => write!(f, "h"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SphereSymbol {
    pub genus: u32,
    pub points: u32,
    pub degree: i64,
    /// Number of `h` insertions; the other `points - h_count` are `1`.
    pub h_count: u32,
    pub cap: Cap,
}

fn stable(g: u32, n: u32) -> bool {
    2 * g + n > 2
}

impl SphereSymbol {
    pub fn new(genus: u32, degree: i64, insertions: &[Insertion], cap: Cap) -> Self {
        SphereSymbol {
            genus,
            points: insertions.len() as u32,
            degree,
            h_count: insertions.iter().filter(|&&i| i == Insertion::H).count() as u32,
            cap,
        }
    }

    pub fn ones(&self) -> u32 {
        self.points - self.h_count
    }

    pub fn is_stable(&self) -> bool {
        stable(self.genus, self.points)
    }

    /// Canonical insertion list: ones first.
    pub fn insertions(&self) -> Vec<Insertion> {
        let mut v = vec![Insertion::One; self.ones() as usize];
        v.extend(std::iter::repeat(Insertion::H).take(self.h_count as usize));
        v
    }

    /// Total real degree of the insertions.
    pub fn insertion_degree(&self) -> i64 {
        2 * self.h_count as i64
    }

    /// Degree the insertions must have for the invariant to be nonzero.
    pub fn required_degree(&self) -> i64 {
        let (g, n, d) = (self.genus as i64, self.points as i64, self.degree);
        match self.cap {
            Cap::Point => 4 * d + 2 - 2 * g,
            Cap::Full => 4 * d + 4 * g - 4 + 2 * n,
        }
    }

    pub fn passes_filter(&self) -> bool {
        self.degree >= 0 && self.insertion_degree() == self.required_degree()
    }

    fn with(&self, genus: u32, points: u32, degree: i64, h_count: u32) -> Self {
        SphereSymbol {
            genus,
            points,
            degree,
            h_count,
            cap: self.cap,
        }
    }
}

impl fmt::Display for SphereSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.insertions().iter().map(|i| i.to_string()).collect();
        let head = match self.cap {
            Cap::Point => "GW",
            Cap::Full => "GWfull",
        };
        write!(
            f,
            "{head}[{},{},{}]({})",
            self.genus,
            self.points,
            self.degree,
            ins.join(",")
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleKind {
    DimensionFilter,
    FundamentalClass,
    GenusReduction,
    Divisor,
    Splitting,
    BaseCase,
}

impl RuleKind {
    pub const ALL: [RuleKind; 6] = [
        RuleKind::DimensionFilter,
        RuleKind::FundamentalClass,
        RuleKind::GenusReduction,
        RuleKind::Divisor,
        RuleKind::Splitting,
        RuleKind::BaseCase,
    ];

    /// Kinds that can fire on a `[pt]` symbol.
    pub const POINT_CAP: [RuleKind; 5] = [
        RuleKind::DimensionFilter,
        RuleKind::FundamentalClass,
        RuleKind::GenusReduction,
        RuleKind::Splitting,
        RuleKind::BaseCase,
    ];
}

/// One way of applying an axiom to a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleApp {
    /// Wrong insertion degree or negative curve degree.
    DimensionFilter,
    /// With `[pt]`: forget a marked point carrying `1`. With the full
    /// class: the push-forward of the fundamental class vanishes.
    FundamentalClass,
    /// Glue two extra points carrying `PD(Δ) = h×1 + 1×h`; both terms are
    /// the same symbol. `merged` drops the extra `1` right away.
    GenusReduction { merged: bool },
    /// Drop an `h` and multiply by `⟨h, d[S²]⟩ = d` (full class only).
    Divisor,
    /// Split off the two given insertions onto a three-pointed sphere.
    Splitting(Insertion, Insertion),
    /// Degree-zero genus-zero invariant: `∫ α₁⋯αₙ`.
    MappingToPoint,
    /// `GW_{0,3,d}(h,h,h) = δ_{1,d}`.
    ThreeLines,
    /// `M̄_{0,3}` is a point, so both caps agree.
    PointModuli,
}

impl RuleApp {
    pub fn kind(&self) -> RuleKind {
        match self {
            RuleApp::DimensionFilter => RuleKind::DimensionFilter,
            RuleApp::FundamentalClass => RuleKind::FundamentalClass,
            RuleApp::GenusReduction { .. } => RuleKind::GenusReduction,
            RuleApp::Divisor => RuleKind::Divisor,
            RuleApp::Splitting(..) => RuleKind::Splitting,
            RuleApp::MappingToPoint | RuleApp::ThreeLines | RuleApp::PointModuli => {
                RuleKind::BaseCase
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            RuleApp::DimensionFilter => "dimension filter".into(),
            RuleApp::FundamentalClass => "fundamental class".into(),
            RuleApp::GenusReduction { merged: true } => "genus reduction (1 merged)".into(),
            RuleApp::GenusReduction { merged: false } => "genus reduction".into(),
            RuleApp::Divisor => "divisor".into(),
            RuleApp::Splitting(a, b) => format!("splitting on ({a},{b})"),
            RuleApp::MappingToPoint => "mapping to a point".into(),
            RuleApp::ThreeLines => "three-point line count".into(),
            RuleApp::PointModuli => "M(0,3) is a point".into(),
        }
    }
}

/// Every axiom application available on `s`, in canonical priority order.
pub fn applicable_rules(s: &SphereSymbol) -> Vec<RuleApp> {
    let mut out = Vec::new();
    if !s.is_stable() {
        return out;
    }
    let (g, n) = (s.genus, s.points);
    if !s.passes_filter() {
        out.push(RuleApp::DimensionFilter);
    }
    if s.ones() > 0 && stable(g, n - 1) {
        out.push(RuleApp::FundamentalClass);
    }
    match s.cap {
        Cap::Point => {
            if g > 0 {
                out.push(RuleApp::GenusReduction {
                    merged: stable(g - 1, n + 1),
                });
            }
            if n >= 3 && stable(g, n - 1) {
                use Insertion::*;
                for (a, b) in [(H, H), (H, One), (One, One)] {
                    let need_h = (a == H) as u32 + (b == H) as u32;
                    if s.h_count >= need_h && s.ones() >= 2 - need_h {
                        out.push(RuleApp::Splitting(a, b));
                    }
                }
            }
            if g == 0 && s.degree == 0 {
                out.push(RuleApp::MappingToPoint);
            }
            if g == 0 && n == 3 && s.h_count == 3 {
                out.push(RuleApp::ThreeLines);
            }
        }
        Cap::Full => {
            if s.h_count > 0 && stable(g, n - 1) {
                out.push(RuleApp::Divisor);
            }
            if g == 0 && n == 3 {
                out.push(RuleApp::PointModuli);
            }
        }
    }
    out
}

/// Applies one rule. Panics if the rule is not applicable.
pub fn apply<F: Field>(s: &SphereSymbol, rule: RuleApp) -> GWExpression<F> {
    let (g, n, d, k) = (s.genus, s.points, s.degree, s.h_count);
    let one = || F::one();
    let sym = |x: SphereSymbol| GWExpression::<F>::sphere(x);
    match rule {
        RuleApp::DimensionFilter => GWExpression::zero(),
        RuleApp::FundamentalClass => match s.cap {
            Cap::Point => sym(s.with(g, n - 1, d, k)),
            Cap::Full => GWExpression::zero(),
        },
        RuleApp::GenusReduction { merged } => {
            let next = if merged {
                s.with(g - 1, n + 1, d, k + 1)
            } else {
                s.with(g - 1, n + 2, d, k + 1)
            };
            sym(next).scale(&F::from_int(2))
        }
        RuleApp::Divisor => sym(s.with(g, n - 1, d, k - 1)).scale(&F::from_int(d)),
        RuleApp::Splitting(a, b) => {
            let pair_h = (a == Insertion::H) as u32 + (b == Insertion::H) as u32;
            let rest_h = k - pair_h;
            let mut out = GWExpression::zero();
            for d1 in 0..=d {
                // γ = h on the three-pointed side, γ' = 1 on the other, and vice versa
                for (gamma_h, dual_h) in [(1, 0), (0, 1)] {
                    let left = SphereSymbol {
                        genus: 0,
                        points: 3,
                        degree: d1,
                        h_count: pair_h + gamma_h,
                        cap: Cap::Point,
                    };
                    let right = s.with(g, n - 1, d - d1, rest_h + dual_h);
                    let m = Monomial::atom(Atom::Sphere(left))
                        .mul(&Monomial::atom(Atom::Sphere(right)));
                    out = out.add(&GWExpression::term(one(), m));
                }
            }
            out
        }
        RuleApp::MappingToPoint => {
            // ∫ h^k over S²
            GWExpression::constant(if k == 1 { one() } else { F::zero() })
        }
        RuleApp::ThreeLines => GWExpression::constant(if d == 1 { one() } else { F::zero() }),
        RuleApp::PointModuli => sym(SphereSymbol {
            cap: Cap::Point,
            ..*s
        }),
    }
}

/// Result of a single rewrite.
#[derive(Debug, Clone, PartialEq)]
pub struct RewriteStep<F: Field = Rational> {
    pub symbol: SphereSymbol,
    /// `None` when no axiom applies; `output` is then the symbol itself.
    pub rule: Option<RuleApp>,
    pub output: GWExpression<F>,
}

impl<F: Field> RewriteStep<F> {
    pub fn is_terminal(&self) -> bool {
        self.rule.is_none()
    }
}

/// One canonical step: the highest-priority applicable rule.
pub fn rewrite_step<F: Field>(s: &SphereSymbol) -> Result<RewriteStep<F>, GwError> {
    if !s.is_stable() {
        return Err(GwError::Unstable {
            genus: s.genus,
            points: s.points,
        });
    }
    Ok(match applicable_rules(s).first() {
        Some(&rule) => RewriteStep {
            symbol: *s,
            rule: Some(rule),
            output: apply(s, rule),
        },
        None => RewriteStep {
            symbol: *s,
            rule: None,
            output: GWExpression::sphere(*s),
        },
    })
}

/// Picks which applicable rule to use.
pub trait Strategy {
    fn choose(&mut self, s: &SphereSymbol, options: &[RuleApp]) -> usize;

    /// Whether results may be cached per symbol.
    fn deterministic(&self) -> bool;
}

/// Fixed priority among rule kinds; within a kind the first option wins.
#[derive(Debug, Clone)]
pub struct PriorityStrategy {
    pub order: Vec<RuleKind>,
}

impl PriorityStrategy {
    pub fn canonical() -> Self {
        PriorityStrategy {
            order: RuleKind::ALL.to_vec(),
        }
    }
}

impl Strategy for PriorityStrategy {
    fn choose(&mut self, _s: &SphereSymbol, options: &[RuleApp]) -> usize {
        self.order
            .iter()
            .find_map(|k| options.iter().position(|o| o.kind() == *k))
            .unwrap_or(0)
    }

    fn deterministic(&self) -> bool {
        true
    }
}

/// Uniformly random applicable rule at every step.
#[derive(Debug, Clone)]
pub struct RandomStrategy {
    rng: ChaCha8Rng,
}

impl RandomStrategy {
    pub fn new(seed: u64) -> Self {
        RandomStrategy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Strategy for RandomStrategy {
    fn choose(&mut self, _s: &SphereSymbol, options: &[RuleApp]) -> usize {
        let idx: Vec<usize> = (0..options.len()).collect();
        *idx.choose(&mut self.rng).unwrap_or(&0)
    }

    fn deterministic(&self) -> bool {
        false
    }
}

/// Rewrites to a number following `strategy`.
pub fn evaluate_with<F: Field, S: Strategy>(
    s: &SphereSymbol,
    strategy: &mut S,
) -> Result<F, GwError> {
    let mut memo = HashMap::new();
    eval_rec(s, strategy, &mut memo)
}

fn eval_rec<F: Field, S: Strategy>(
    s: &SphereSymbol,
    strategy: &mut S,
    memo: &mut HashMap<SphereSymbol, F>,
) -> Result<F, GwError> {
    if let Some(v) = memo.get(s) {
        return Ok(v.clone());
    }
    if !s.is_stable() {
        return Err(GwError::Unstable {
            genus: s.genus,
            points: s.points,
        });
    }
    let options = applicable_rules(s);
    if options.is_empty() {
        return Err(GwError::Unsupported(s.to_string()));
    }
    let rule = options[strategy.choose(s, &options).min(options.len() - 1)];
    let expr: GWExpression<F> = apply(s, rule);
    let mut total = F::zero();
    'terms: for (m, c) in expr.terms() {
        let mut v = c.clone();
        // atoms sort by (genus, points), so the three-pointed factor of a
        // splitting term usually comes first and zeros cut the branch early
        for (a, &e) in &m.0 {
            let Atom::Sphere(t) = a else {
                unreachable!("rewriting never introduces unknowns")
            };
            let x = eval_rec(t, strategy, memo)?;
            if x.is_zero() {
                continue 'terms;
            }
            v = v * crate::scalar::pow(&x, e);
        }
        total = total + v;
    }
    if strategy.deterministic() {
        memo.insert(*s, total.clone());
    }
    Ok(total)
}

/// Canonical-order evaluator with a shared memo table.
#[derive(Debug, Default)]
pub struct SphereEvaluator<F: Field = Rational> {
    memo: RwLock<HashMap<SphereSymbol, F>>,
}

impl<F: Field> SphereEvaluator<F> {
    pub fn new() -> Self {
        SphereEvaluator {
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn cached(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    pub fn value(&self, s: &SphereSymbol) -> Result<F, GwError> {
        if let Some(v) = self.memo.read().expect("memo lock").get(s) {
            return Ok(v.clone());
        }
        let step = rewrite_step::<F>(s)?;
        if step.is_terminal() {
            return Err(GwError::Unsupported(s.to_string()));
        }
        let mut total = F::zero();
        'terms: for (m, c) in step.output.terms() {
            let mut v = c.clone();
            for (a, &e) in &m.0 {
                let Atom::Sphere(t) = a else {
                    unreachable!("rewriting never introduces unknowns")
                };
                let x = self.value(t)?;
                if x.is_zero() {
                    continue 'terms;
                }
                v = v * crate::scalar::pow(&x, e);
            }
            total = total + v;
        }
        if s.cap == Cap::Point && !total.is_integral() {
            return Err(GwError::NotIntegral(format!("{s} = {total}")));
        }
        self.memo
            .write()
            .expect("memo lock")
            .insert(*s, total.clone());
        Ok(total)
    }

    /// Invariant with arbitrary insertions from `ℤ[h]/(h²)`.
    pub fn eval(
        &self,
        genus: u32,
        points: u32,
        degree: i64,
        insertions: &[GradedClass],
        cap: Cap,
    ) -> Result<F, GwError> {
        if insertions.len() != points as usize {
            return Err(GwError::InsertionCount(insertions.len(), points));
        }
        if !stable(genus, points) {
            return Err(GwError::Unstable { genus, points });
        }
        // poly[k] = coefficient of the symbol with k insertions of h
        let mut poly = vec![F::one()];
        for c in insertions {
            let (a, b) = sphere_coordinates(c)?;
            let mut next = vec![F::zero(); poly.len() + 1];
            for (k, p) in poly.iter().enumerate() {
                next[k] = next[k].clone() + p.clone() * F::from_int(a);
                next[k + 1] = next[k + 1].clone() + p.clone() * F::from_int(b);
            }
            poly = next;
        }
        let mut total = F::zero();
        for (k, p) in poly.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let s = SphereSymbol {
                genus,
                points,
                degree,
                h_count: k as u32,
                cap,
            };
            total = total + p.clone() * self.value(&s)?;
        }
        Ok(total)
    }
}

/// `(a, b)` with `c = a·1 + b·h`, checking that `c` lives in a copy of
/// `H*(S²)`.
pub(crate) fn sphere_coordinates(c: &GradedClass) -> Result<(i64, i64), GwError> {
    let r = c.ring();
    if !is_sphere_ring(r) {
        return Err(GwError::InsertionOutsideRing(format!(
            "{c} in {}",
            r.name()
        )));
    }
    let h = 1 - r.unit_index();
    Ok((c.coeff(r.unit_index()), c.coeff(h)))
}

pub(crate) fn is_sphere_ring(r: &RingPresentation) -> bool {
    r.rank() == 2 && r.top_degree() == 2 && r.pairing_of(1 - r.unit_index()) == 1
}

pub(crate) fn shared() -> &'static SphereEvaluator<Rational> {
    static EVAL: OnceLock<SphereEvaluator<Rational>> = OnceLock::new();
    EVAL.get_or_init(SphereEvaluator::new)
}

/// `GW^{S²}_{g,n,d}(insertions)([pt])`, exact.
pub fn eval_sphere(
    genus: u32,
    points: u32,
    degree: i64,
    insertions: &[GradedClass],
) -> Result<Rational, GwError> {
    shared().eval(genus, points, degree, insertions, Cap::Point)
}

/// `GW^{S²}_{g,n,d}(insertions)([M̄_{g,n}])`, exact.
pub fn eval_sphere_full(
    genus: u32,
    points: u32,
    degree: i64,
    insertions: &[GradedClass],
) -> Result<Rational, GwError> {
    shared().eval(genus, points, degree, insertions, Cap::Full)
}

/// Invariant of an unstable `(g, n)` through two extra divisor insertions:
/// `GW_{g,n,d}(α) = GW_{g,n+2,d}(α, β, β)([M̄_{g,n+2}]) / ⟨β, d[S²]⟩²`.
pub fn lift_unstable(
    genus: u32,
    points: u32,
    degree: i64,
    insertions: &[GradedClass],
    beta: &GradedClass,
) -> Result<Rational, GwError> {
    if stable(genus, points) {
        return Err(GwError::AlreadyStable { genus, points });
    }
    if insertions.len() != points as usize {
        return Err(GwError::InsertionCount(insertions.len(), points));
    }
    let (a, b) = sphere_coordinates(beta)?;
    if a != 0 {
        return Err(GwError::DivisorDegree(beta.to_string()));
    }
    let pairing = b * degree;
    if pairing == 0 {
        return Err(GwError::ZeroPairing);
    }
    let mut ins = insertions.to_vec();
    ins.push(beta.clone());
    ins.push(beta.clone());
    let v = eval_sphere_full(genus, points + 2, degree, &ins)?;
    Ok(v / crate::scalar::rational_int(pairing * pairing))
}

/// Outcome of comparing rewrite orders against the canonical evaluator.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub symbols: usize,
    pub evaluations: usize,
    /// `(symbol, strategy, canonical value, value found)`.
    pub mismatches: Vec<(String, String, String, String)>,
}

fn permutations(items: &[RuleKind]) -> Vec<Vec<RuleKind>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Evaluates every `[pt]` symbol with `g ≤ max_genus`, `n ≤ max_points`,
/// `0 ≤ d ≤ max_degree` under all priority orders of the rule kinds and
/// `random_runs` random strategies, and compares with [`eval_sphere`].
pub fn check_confluence(
    max_genus: u32,
    max_points: u32,
    max_degree: i64,
    random_runs: usize,
    seed: u64,
) -> Result<ConfluenceReport, GwError> {
    let mut symbols = Vec::new();
    for genus in 0..=max_genus {
        for points in 0..=max_points {
            if !stable(genus, points) {
                continue;
            }
            for degree in 0..=max_degree {
                for h_count in 0..=points {
                    symbols.push(SphereSymbol {
                        genus,
                        points,
                        degree,
                        h_count,
                        cap: Cap::Point,
                    });
                }
            }
        }
    }
    let reference = shared();
    let orders = permutations(&RuleKind::POINT_CAP);
    let mut report = ConfluenceReport {
        symbols: symbols.len(),
        ..Default::default()
    };
    let mut record = |s: &SphereSymbol, name: String, want: &Rational, got: Rational| {
        if got != *want {
            report
                .mismatches
                .push((s.to_string(), name, want.to_string(), got.to_string()));
        }
    };
    let mut count = 0;
    for order in &orders {
        let mut strategy = PriorityStrategy {
            order: order.clone(),
        };
        let mut memo = HashMap::new();
        for s in &symbols {
            let want = reference.value(s)?;
            let got: Rational = eval_rec(s, &mut strategy, &mut memo)?;
            count += 1;
            record(s, format!("{order:?}"), &want, got);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in &symbols {
        let want = reference.value(s)?;
        for _ in 0..random_runs {
            let run_seed = rand::Rng::gen::<u64>(&mut rng);
            let mut strategy = RandomStrategy::new(run_seed);
            let got: Rational = evaluate_with(s, &mut strategy)?;
            count += 1;
            record(s, format!("random({run_seed})"), &want, got);
        }
    }
    report.evaluations = count;
    Ok(report)
}

/// The ring `ℤ[h]/(h²)` used for insertions given as text.
pub fn sphere_ring() -> Arc<RingPresentation> {
    static RING: OnceLock<Arc<RingPresentation>> = OnceLock::new();
    RING.get_or_init(|| Arc::new(crate::ring::presets::sphere()))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, rational_int};
    use num_traits::Zero;
    use proptest::prelude::*;
    use Insertion::*;

    fn ins(text: &[&str]) -> Vec<GradedClass> {
        let r = sphere_ring();
        text.iter().map(|t| r.parse(t).unwrap()).collect()
    }

    fn lemma_insertions(g: u32, n: u32) -> Vec<GradedClass> {
        let mut v = vec!["1"; n as usize];
        if g % 2 == 0 {
            v[n as usize - 1] = "h";
        }
        ins(&v)
    }

    fn lemma_degree(g: u32) -> i64 {
        // ⌈(g-1)/2⌉
        (g as i64) / 2
    }

    #[test]
    fn documented_values() {
        assert_eq!(
            eval_sphere(0, 3, 1, &ins(&["h", "h", "h"])).unwrap(),
            rational_int(1)
        );
        assert_eq!(eval_sphere(3, 1, 1, &ins(&["1"])).unwrap(), rational_int(8));
        assert_eq!(
            eval_sphere(2, 4, 1, &ins(&["1", "1", "1", "h"])).unwrap(),
            rational_int(4)
        );
        assert_eq!(
            eval_sphere(0, 3, 2, &ins(&["h", "h", "h"])).unwrap(),
            rational_int(0)
        );
    }

    #[test]
    fn three_point_lines() {
        for d in 0..=5 {
            let want = if d == 1 { 1 } else { 0 };
            assert_eq!(
                eval_sphere(0, 3, d, &ins(&["h", "h", "h"])).unwrap(),
                rational_int(want)
            );
        }
    }

    #[test]
    fn closed_form_table() {
        for g in 0..=12u32 {
            let lo = if g == 0 { 3 } else { 1 };
            for n in lo..=g + 3 {
                if !stable(g, n) {
                    continue;
                }
                let v = eval_sphere(g, n, lemma_degree(g), &lemma_insertions(g, n)).unwrap();
                assert_eq!(v, rational_int(1 << g), "g={g} n={n}");
            }
        }
    }

    #[test]
    fn other_scalars_agree() {
        let ev = SphereEvaluator::<f64>::new();
        let v = ev
            .eval(5, 2, 2, &lemma_insertions(5, 2), Cap::Point)
            .unwrap();
        assert_eq!(v, 32.0);
        let ev = SphereEvaluator::<num_rational::Ratio<i64>>::new();
        let v = ev
            .eval(4, 3, 2, &lemma_insertions(4, 3), Cap::Point)
            .unwrap();
        assert_eq!(v, num_rational::Ratio::from_integer(16));
    }

    #[test]
    fn errors() {
        assert_eq!(
            eval_sphere(0, 2, 1, &ins(&["h", "h"])),
            Err(GwError::Unstable {
                genus: 0,
                points: 2
            })
        );
        assert!(matches!(
            eval_sphere(0, 3, 1, &ins(&["h", "h"])),
            Err(GwError::InsertionCount(2, 3))
        ));
        let cp2 = Arc::new(crate::ring::presets::projective_space(2));
        let bad = vec![cp2.class("h").unwrap(); 3];
        assert!(matches!(
            eval_sphere(0, 3, 1, &bad),
            Err(GwError::InsertionOutsideRing(_))
        ));
        assert_eq!(
            eval_sphere(0, 3, -1, &ins(&["h", "h", "h"])).unwrap(),
            rational_int(0)
        );
    }

    #[test]
    fn rewrite_steps_are_traced() {
        let s = SphereSymbol::new(1, 0, &[One, One], Cap::Point);
        let step = rewrite_step::<Rational>(&s).unwrap();
        assert_eq!(step.rule, Some(RuleApp::FundamentalClass));
        assert_eq!(
            step.output,
            GWExpression::sphere(SphereSymbol::new(1, 0, &[One], Cap::Point))
        );

        // forcing genus reduction instead: 2·GW[0,3,0](1,1,h)
        let gr = apply::<Rational>(&s, RuleApp::GenusReduction { merged: true });
        assert_eq!(
            gr,
            GWExpression::sphere(SphereSymbol::new(0, 0, &[One, One, H], Cap::Point))
                .scale(&rational_int(2))
        );

        let bad = SphereSymbol::new(0, 1, &[H, H, One], Cap::Point);
        let step = rewrite_step::<Rational>(&bad).unwrap();
        assert_eq!(step.rule, Some(RuleApp::DimensionFilter));
        assert!(step.output.is_zero());

        // (g=1, n=1): the extra 1 cannot be merged since (0, 2) is unstable
        let s = SphereSymbol::new(1, 0, &[One], Cap::Point);
        let step = rewrite_step::<Rational>(&s).unwrap();
        assert_eq!(step.rule, Some(RuleApp::GenusReduction { merged: false }));
    }

    #[test]
    fn splitting_step_matches_full_evaluation() {
        let s = SphereSymbol::new(0, 1, &[H, H, H, H], Cap::Point);
        assert_eq!(s.required_degree(), 6);
        let s = SphereSymbol::new(0, 2, &[H, H, H, H, H], Cap::Point);
        let step = rewrite_step::<Rational>(&s).unwrap();
        assert_eq!(step.rule, Some(RuleApp::Splitting(H, H)));
        let ev = SphereEvaluator::<Rational>::new();
        let via_step = step
            .output
            .evaluate_spheres(&ev)
            .unwrap()
            .as_constant()
            .unwrap();
        assert_eq!(via_step, ev.value(&s).unwrap());
        assert_eq!(via_step, rational_int(1));
    }

    #[test]
    fn terminal_symbol_is_flagged() {
        let s = SphereSymbol::new(1, 0, &[H], Cap::Full);
        let step = rewrite_step::<Rational>(&s).unwrap();
        assert!(step.is_terminal());
        assert!(matches!(
            eval_sphere_full(1, 1, 0, &ins(&["h"])),
            Err(GwError::Unsupported(_))
        ));
    }

    #[test]
    fn full_class_values() {
        assert_eq!(
            eval_sphere_full(0, 4, 1, &ins(&["h", "h", "h", "h"])).unwrap(),
            rational_int(1)
        );
        assert_eq!(
            eval_sphere_full(0, 5, 1, &ins(&["h", "h", "h", "h", "h"])).unwrap(),
            rational_int(1)
        );
        assert_eq!(
            eval_sphere_full(0, 4, 1, &ins(&["h", "h", "h", "1"])).unwrap(),
            rational_int(0)
        );
    }

    #[test]
    fn unstable_lift() {
        let r = sphere_ring();
        let h = r.class("h").unwrap();
        assert_eq!(
            lift_unstable(0, 1, 1, &ins(&["h"]), &h).unwrap(),
            rational_int(1)
        );
        assert_eq!(
            lift_unstable(0, 2, 1, &ins(&["h", "h"]), &h).unwrap(),
            rational_int(1)
        );
        // M̄_{1,0}(S², 1) has virtual dimension 4, so nothing without insertions
        assert_eq!(lift_unstable(1, 0, 1, &[], &h).unwrap(), rational_int(0));
        for m in 1..=3 {
            let beta = h.scale(m);
            for (g, n, d, text) in [
                (0u32, 1u32, 1i64, vec!["h"]),
                (0, 2, 1, vec!["h", "h"]),
                (1, 0, 1, vec![]),
                (0, 2, 2, vec!["h", "h"]),
            ] {
                let base = lift_unstable(g, n, d, &ins(&text), &h).unwrap();
                assert_eq!(lift_unstable(g, n, d, &ins(&text), &beta).unwrap(), base);
            }
        }
        assert_eq!(
            lift_unstable(0, 1, 0, &ins(&["h"]), &h),
            Err(GwError::ZeroPairing)
        );
        assert!(matches!(
            lift_unstable(0, 3, 1, &ins(&["h", "h", "h"]), &h),
            Err(GwError::AlreadyStable { .. })
        ));
        // two extra points are not enough to stabilize (0, 0)
        assert!(matches!(
            lift_unstable(0, 0, 2, &[], &h),
            Err(GwError::Unstable { .. })
        ));
        assert_eq!(
            lift_unstable(0, 2, 2, &ins(&["h", "h"]), &h).unwrap(),
            rational(0, 1)
        );
    }

    #[test]
    fn memo_is_shared_across_threads() {
        let ev = Arc::new(SphereEvaluator::<Rational>::new());
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let ev = ev.clone();
                std::thread::spawn(move || {
                    (0..=8u32)
                        .map(|g| {
                            let g = (g + t) % 9;
                            let n = 3;
                            ev.eval(g, n, lemma_degree(g), &lemma_insertions(g, n), Cap::Point)
                                .unwrap()
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for (t, h) in handles.into_iter().enumerate() {
            for (i, v) in h.join().unwrap().into_iter().enumerate() {
                let g = (i as u32 + t as u32) % 9;
                assert_eq!(v, rational_int(1 << g));
            }
        }
        assert!(ev.cached() > 0);
    }

    #[test]
    fn small_confluence_sweep() {
        let report = check_confluence(2, 4, 2, 2, 7).unwrap();
        assert!(report.mismatches.is_empty(), "{:?}", report.mismatches);
        assert!(report.evaluations > report.symbols);
    }

    proptest! {
        #[test]
        fn insertion_order_is_irrelevant(
            g in 0u32..4,
            d in 0i64..3,
            coeffs in proptest::collection::vec((-2i64..=2, -2i64..=2), 3..6),
            seed in any::<u64>(),
        ) {
            let r = sphere_ring();
            let mut classes: Vec<GradedClass> = coeffs
                .iter()
                .map(|&(a, b)| r.unit().scale(a).add(&r.class("h").unwrap().scale(b)).unwrap())
                .collect();
            let n = classes.len() as u32;
            let v = eval_sphere(g, n, d, &classes).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            classes.shuffle(&mut rng);
            prop_assert_eq!(eval_sphere(g, n, d, &classes).unwrap(), v);
        }

        #[test]
        fn nonzero_values_pass_the_dimension_filter(g in 0u32..6, n in 1u32..7, d in 0i64..5, k in 0u32..7) {
            prop_assume!(k <= n && stable(g, n));
            let s = SphereSymbol { genus: g, points: n, degree: d, h_count: k, cap: Cap::Point };
            let v = SphereEvaluator::<Rational>::new().value(&s).unwrap();
            if !v.is_zero() {
                prop_assert_eq!(2 * k as i64, 4 * d + 2 - 2 * g as i64);
            }
        }
    }
}
