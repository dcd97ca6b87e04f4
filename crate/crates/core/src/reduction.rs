//! Certified rank reduction of primitive even-rank Mukai vectors to rank 2
//! or 4, and the rank-2 normalization `t ∈ {0, 1}`.
//!
//! Every routine returns the chain of isometries it applied, recorded as a
//! [`ReductionCertificate`] that [`verify_certificate`] replays from scratch.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Int};
use crate::lattice::{self, alternate_decomposition_for, swap_hyperbolic, BasisChange, ClassVector, LatticeError, Sublattice};
use crate::mukai::{self, apply_move, is_primitive, v_square, MukaiError, MukaiVector, Move};

/// Bounds for the induction-step search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest `|m|` tried in the hyperbolic twists `mσ` and `mf`.
    pub ab: Int,
    /// Largest coordinate of a `-E8` twist used to lift `s`.
    pub eta: Int,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { ab: 64, eta: 4 }
    }
}

/// Closest candidate seen by an exhausted search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearMiss {
    pub twist: ClassVector,
    pub s: Int,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchFailure {
    pub v: MukaiVector,
    pub budget: SearchBudget,
    pub best: Option<NearMiss>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("primitive Mukai vector required")]
    NotPrimitive,
    #[error("odd rank {0} is out of scope")]
    OddRank(Int),
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(Int),
    #[error("rank 2 required, got {0}")]
    NotRankTwo(Int),
    #[error("not in special-case form: {0}")]
    NotSpecialForm(Box<MukaiVector>),
    #[error("search exhausted for {} (budget ab={}, eta={})", .0.v, .0.budget.ab, .0.budget.eta)]
    SearchExhausted(Box<SearchFailure>),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl ReductionError {
    /// Input and precondition problems, as opposed to exhaustion or bugs.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            ReductionError::NotPrimitive
                | ReductionError::OddRank(_)
                | ReductionError::NonPositiveRank(_)
                | ReductionError::NotRankTwo(_)
                | ReductionError::NotSpecialForm(_)
        )
    }
}

impl From<MukaiError> for ReductionError {
    fn from(e: MukaiError) -> Self {
        ReductionError::Internal(e.to_string())
    }
}

impl From<LatticeError> for ReductionError {
    fn from(e: LatticeError) -> Self {
        ReductionError::Internal(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(rename = "move")]
    pub mv: Move,
    pub result: MukaiVector,
    pub checks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    pub initial: MukaiVector,
    pub steps: Vec<Step>,
    #[serde(rename = "final")]
    pub final_: MukaiVector,
}

impl ReductionCertificate {
    pub fn new(initial: MukaiVector) -> Self {
        ReductionCertificate { initial, steps: Vec::new(), final_: initial }
    }

    pub fn current(&self) -> &MukaiVector {
        &self.final_
    }

    pub fn moves(&self) -> impl Iterator<Item = &Move> {
        self.steps.iter().map(|s| &s.mv)
    }

    /// Applies `mv` to the current vector, checking its preconditions first.
    pub fn push(&mut self, mv: Move) -> Result<MukaiVector, ReductionError> {
        let cur = self.final_;
        let mut checks = Vec::new();
        for (name, ok) in move_checks(&mv, &cur) {
            if !ok {
                return Err(ReductionError::Internal(format!("{mv} at {cur}: {name} fails")));
            }
            checks.push(name.to_string());
        }
        let result = apply_move(&cur, &mv)?;
        self.steps.push(Step { mv, result, checks });
        self.final_ = result;
        Ok(result)
    }

    /// Skips zero twists, which carry no information.
    fn push_twist(&mut self, d: ClassVector) -> Result<MukaiVector, ReductionError> {
        if d.is_zero() {
            Ok(self.final_)
        } else {
            self.push(Move::Twist(d))
        }
    }

    fn append(&mut self, moves: Vec<Move>) -> Result<(), ReductionError> {
        for m in moves {
            self.push(m)?;
        }
        Ok(())
    }
}

fn move_checks(mv: &Move, v: &MukaiVector) -> Vec<(&'static str, bool)> {
    match mv {
        Move::ReBase(b) => vec![("isometry", BasisChange::new(*b.matrix()).is_ok())],
        _ => mv.preconditions(v),
    }
}

fn require_even_primitive(v: &MukaiVector) -> Result<(), ReductionError> {
    if v.r <= 0 {
        return Err(ReductionError::NonPositiveRank(v.r));
    }
    if v.r % 2 != 0 {
        return Err(ReductionError::OddRank(v.r));
    }
    if !is_primitive(v) {
        return Err(ReductionError::NotPrimitive);
    }
    Ok(())
}

/// Representative of `d` modulo `r` in `(-r/2, r/2]`, and the multiple of
/// `r` removed.
fn window(d: Int, r: Int) -> (Int, Int) {
    let k = (2 * d + r - 1).div_euclid(2 * r);
    let reduced = d - k * r;
    debug_assert!(-r < 2 * reduced && 2 * reduced <= r, "{d} mod {r} -> {reduced}");
    (reduced, k)
}

/// Twists by `kσ + lf` so that both hyperbolic coefficients of `c1` lie in
/// `(-r/2, r/2]`.
pub fn normalize_window(v: &MukaiVector) -> Result<(MukaiVector, Move), ReductionError> {
    if v.r <= 0 {
        return Err(ReductionError::NonPositiveRank(v.r));
    }
    let (_, k) = window(v.c1.sigma_coeff(), v.r);
    let (_, l) = window(v.c1.f_coeff(), v.r);
    let d = ClassVector::hyperbolic(-k, -l);
    Ok((mukai::twist(v, &d), Move::Twist(d)))
}

fn neg_e8() -> Sublattice {
    Sublattice::neg_e8()
}

/// Reduces `(r, βf + ζ)` with `β ∈ {0, ±r/2}` and `ζ` in the `-E8` block
/// to rank 2 or 4 by twist, switch, twist, switch.
pub fn special_case(v: &MukaiVector) -> Result<ReductionCertificate, ReductionError> {
    require_even_primitive(v)?;
    let mut cert = ReductionCertificate::new(*v);
    if v.r == 2 || v.r == 4 {
        return Ok(cert);
    }
    if v.c1.f_coeff() == 0 && v.c1.sigma_coeff() * 2 == v.r.abs() {
        cert.push(Move::ReBase(swap_hyperbolic()))?;
    }
    special_case_into(&mut cert)?;
    Ok(cert)
}

fn special_case_into(cert: &mut ReductionCertificate) -> Result<(), ReductionError> {
    let v = *cert.current();
    let r = v.r;
    let beta = v.c1.f_coeff();
    if v.c1.sigma_coeff() != 0 || !(beta == 0 || 2 * beta.abs() == r) {
        return Err(ReductionError::NotSpecialForm(Box::new(v)));
    }
    let e8 = neg_e8();
    let zeta = v.c1.e8_part();
    let sq = v_square(&v);

    // Make ζ/l primitive and lift s above max(v², 0).
    let xi1 = lattice::primitive_shift(&e8, &zeta, r, Some(v.s - sq.max(0)))?;
    let w = cert.push_twist(xi1)?;
    if w.s <= sq.max(0) {
        return Err(ReductionError::Internal(format!("lift failed: s = {} at v² = {sq}", w.s)));
    }
    let w = cert.push(Move::Switch)?;

    let zeta = w.c1.e8_part();
    let l = arith::gcd(w.r, lattice::content(&zeta));
    if lattice::content(&zeta) != l {
        let xi2 = lattice::primitive_shift(&e8, &zeta, w.r, None)?;
        cert.push_twist(xi2)?;
    }
    let w = *cert.current();
    let zeta = w.c1.e8_part();
    if !(l == 1 || l == 2) || lattice::content(&zeta) != l {
        return Err(ReductionError::Internal(format!("gcd {l} of rank and -E8 part is not 1 or 2 at {w}")));
    }
    if w.c1.sigma_coeff() != 0 || w.s % 2 != 0 {
        return Err(ReductionError::Internal(format!("unexpected shape before isotropic twist: {w}")));
    }

    // Twist by an isotropic D = σ - (η²/2)f + η with (c1, D) = (s - ε)/2.
    let fb2 = 2 * w.c1.f_coeff();
    let eps = if l == 1 || (w.s - fb2 - 2).rem_euclid(4) == 0 { 2 } else { 4 };
    let target = w.s - fb2 - eps;
    if target.rem_euclid(2 * l) != 0 {
        return Err(ReductionError::Internal(format!("{target} not divisible by {}", 2 * l)));
    }
    let y = ClassVector(zeta.0.map(|c| c / l));
    let eta = lattice::solve_pairing(&e8, &y, target / (2 * l))?;
    let d = ClassVector::sigma() - (lattice::norm(&eta) / 2) * ClassVector::f() + eta;
    if lattice::norm(&d) != 0 {
        return Err(ReductionError::Internal(format!("twist {d} is not isotropic")));
    }
    let w = cert.push(Move::Twist(d))?;
    if w.s != eps {
        return Err(ReductionError::Internal(format!("isotropic twist reached s = {}, expected {eps}", w.s)));
    }
    cert.push(Move::Switch)?;
    Ok(())
}

/// Bipartite sign vector on the `-E8` Dynkin tree; its norm is `-30`.
fn lift_direction() -> ClassVector {
    ClassVector::from_e8([1, -1, -1, 1, -1, 1, -1, 1])
}

fn signed_order(bound: Int) -> impl Iterator<Item = Int> {
    std::iter::once(0).chain((1..=bound).flat_map(|m| [m, -m]))
}

/// One rank-lowering round: a twist followed by a switch to a vector of
/// strictly smaller rank. Requires a hyperbolic coefficient `d` of `c1` with
/// `0 < |d| < r/2`.
///
/// The direct route twists by `mf` (or `mσ`), which moves `s` in steps of
/// `2|d| < r`. It works when some `0 < s' < r` has `r·s' > v²`. Otherwise `s`
/// is first lifted above `v²` by a `-E8` twist, the rank exchanged with `s`,
/// and the direct route taken from there.
pub fn induction_step(v: &MukaiVector, budget: &SearchBudget) -> Result<(Vec<Move>, MukaiVector), ReductionError> {
    require_even_primitive(v)?;
    let r = v.r;
    let (d1, d2) = (v.c1.sigma_coeff(), v.c1.f_coeff());
    let usable = |d: Int| d != 0 && 2 * d.abs() < r;
    // Twisting by mf changes s by -2m·d1, twisting by mσ by -2m·d2.
    let (d, unit) = if usable(d1) {
        (d1, ClassVector::f())
    } else if usable(d2) {
        (d2, ClassVector::sigma())
    } else {
        return Err(ReductionError::Internal(format!("no coefficient strictly inside the window at {v}")));
    };
    let fail = |best: Option<NearMiss>| {
        ReductionError::SearchExhausted(Box::new(SearchFailure { v: *v, budget: *budget, best }))
    };
    if budget.ab <= 0 {
        return Err(fail(None));
    }
    let sq = v_square(v);

    let mut best: Option<NearMiss> = None;
    for m in signed_order(budget.ab) {
        let s1 = v.s - 2 * m * d;
        if 0 < s1 && s1 < r && r * s1 > sq {
            let dd = m * unit;
            let mut moves = Vec::new();
            let mut w = *v;
            if m != 0 {
                moves.push(Move::Twist(dd));
                w = mukai::twist(&w, &dd);
            }
            moves.push(Move::Switch);
            w = mukai::switch(&w)?;
            return Ok((moves, w));
        }
        if 0 < s1 && s1 < r && best.as_ref().is_none_or(|b| b.s < s1) {
            best = Some(NearMiss { twist: m * unit, s: s1, reason: format!("r·s' = {} ≤ v² = {sq}", r * s1) });
        }
    }

    // Lift s above max(v², 0) along the -E8 direction.
    let u = lift_direction();
    let lift = signed_order(budget.eta).skip(1).map(|k| k * u).find(|xi| mukai::twist(v, xi).s > sq.max(0));
    let Some(xi) = lift else {
        return Err(fail(best));
    };
    let mut moves = vec![Move::Twist(xi)];
    let mut w = mukai::twist(v, &xi);
    moves.push(Move::Switch);
    w = mukai::switch(&w)?;
    // c1 is now -(old c1), so the relevant coefficient is -d and s = r.
    // Twisting by m·unit gives s' = r + 2m·d; take the least positive value.
    let step = 2 * d.abs();
    let target = {
        let t = r.rem_euclid(step);
        if t == 0 { step } else { t }
    };
    let m = (target - w.s) / (2 * d);
    if (target - w.s) % (2 * d) != 0 || m.abs() > budget.ab {
        return Err(fail(best));
    }
    let dd = m * unit;
    if m != 0 {
        moves.push(Move::Twist(dd));
        w = mukai::twist(&w, &dd);
    }
    if w.s != target || !(0 < target && target < r) {
        return Err(ReductionError::Internal(format!("lifted twist reached s = {}, expected {target}", w.s)));
    }
    moves.push(Move::Switch);
    w = mukai::switch(&w)?;
    Ok((moves, w))
}

/// Roots tried, in order, by the alternate decomposition. For any `ξ` at
/// least one has `(ξ, e) ≢ r/2 (mod r)` since the third is the sum of the
/// first two.
fn alternate_roots() -> [ClassVector; 3] {
    [ClassVector::e(1), ClassVector::e(3), ClassVector::e(1) + ClassVector::e(3)]
}

/// Reduces a primitive vector of even positive rank to rank 2 or 4.
pub fn reduce_even(v: &MukaiVector, budget: &SearchBudget) -> Result<ReductionCertificate, ReductionError> {
    require_even_primitive(v)?;
    let mut cert = ReductionCertificate::new(*v);
    let mut rebased_at: Option<Int> = None;
    loop {
        let cur = *cert.current();
        let r = cur.r;
        if r == 2 || r == 4 {
            break;
        }
        let (_, mv) = normalize_window(&cur)?;
        if let Move::Twist(d) = mv {
            cert.push_twist(d)?;
        }
        let cur = *cert.current();
        let half = r / 2;
        match (cur.c1.sigma_coeff(), cur.c1.f_coeff()) {
            (0, b) if b == 0 || b == half => {
                special_case_into(&mut cert)?;
            }
            (a, 0) if a == half => {
                cert.push(Move::ReBase(swap_hyperbolic()))?;
                special_case_into(&mut cert)?;
            }
            (a, b) if a == half && b == half => {
                if rebased_at == Some(r) {
                    return Err(ReductionError::Internal(format!("second rebase at rank {r}")));
                }
                rebased_at = Some(r);
                let xi = cur.c1.e8_part();
                let root = alternate_roots()
                    .into_iter()
                    .find(|e| lattice::inner(&xi, e).rem_euclid(r) != half)
                    .ok_or_else(|| ReductionError::Internal("no admissible root".into()))?;
                cert.push(Move::ReBase(alternate_decomposition_for(&root)?))?;
            }
            _ => {
                let (moves, w) = induction_step(&cur, budget)?;
                if w.r >= r {
                    return Err(ReductionError::Internal(format!("rank did not drop at {cur}")));
                }
                cert.append(moves)?;
            }
        }
    }
    let report = verify_certificate(&cert);
    if !report.ok {
        return Err(ReductionError::Internal(format!("produced certificate fails verification: {}", report.detail())));
    }
    Ok(cert)
}

/// For rank 2, finds `D = aσ + bf` with `t + (c1, D) + D² ∈ {0, 1}`, where
/// `t = -s/2`. Primitivity is not needed.
pub fn kim_normalize(v: &MukaiVector) -> Result<(Move, MukaiVector), ReductionError> {
    if v.r != 2 {
        return Err(ReductionError::NotRankTwo(v.r));
    }
    let t = -v.s / 2;
    if t == 0 || t == 1 {
        return Ok((Move::Twist(ClassVector::ZERO), *v));
    }
    let (d1, d2) = (v.c1.sigma_coeff(), v.c1.f_coeff());
    // With D = aσ + bf: t' = t + a·d2 + b·(d1 + 2a). Choose a so that
    // d1 + 2a is 1 or 2, then b to bring t' down to 0 or 1.
    let (a, b) = if d1.rem_euclid(2) == 1 {
        let a = (1 - d1) / 2;
        (a, -(t + a * d2))
    } else {
        let a = (2 - d1) / 2;
        (a, -(t + a * d2).div_euclid(2))
    };
    let d = ClassVector::hyperbolic(a, b);
    let w = mukai::twist(v, &d);
    match w.t() {
        Some(0) | Some(1) => Ok((Move::Twist(d), w)),
        other => Err(ReductionError::Internal(format!("normalization reached t = {other:?}"))),
    }
}

/// Outcome of [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub ok: bool,
    pub steps_checked: usize,
    /// Index of the failing step (`None` for failures outside the steps).
    pub failed_step: Option<usize>,
    /// Name of the first violated check.
    pub failed_check: Option<String>,
    pub message: Option<String>,
}

impl Verification {
    fn pass(n: usize) -> Self {
        Verification { ok: true, steps_checked: n, failed_step: None, failed_check: None, message: None }
    }

    fn fail(n: usize, step: Option<usize>, check: &str, message: String) -> Self {
        Verification {
            ok: false,
            steps_checked: n,
            failed_step: step,
            failed_check: Some(check.to_string()),
            message: Some(message),
        }
    }

    pub fn detail(&self) -> String {
        match (&self.failed_check, &self.message) {
            (Some(c), Some(m)) => format!("{c}: {m}"),
            _ => "ok".into(),
        }
    }
}

/// Replays every move from `initial`, re-checking preconditions on the
/// recorded inputs, conservation of `v²`, primitivity and the final rank.
pub fn verify_certificate(c: &ReductionCertificate) -> Verification {
    let sq = v_square(&c.initial);
    if !is_primitive(&c.initial) {
        return Verification::fail(0, None, "primitivity", format!("initial {} is not primitive", c.initial));
    }
    let mut cur = c.initial;
    for (i, step) in c.steps.iter().enumerate() {
        for (name, ok) in move_checks(&step.mv, &cur) {
            if !ok {
                return Verification::fail(i, Some(i), name, format!("{} at {cur}", step.mv));
            }
        }
        let replayed = match apply_move(&cur, &step.mv) {
            Ok(w) => w,
            Err(e) => return Verification::fail(i, Some(i), "replay", e.to_string()),
        };
        if replayed != step.result {
            return Verification::fail(i, Some(i), "replay", format!("{} gives {replayed}, recorded {}", step.mv, step.result));
        }
        if v_square(&step.result) != sq {
            return Verification::fail(i, Some(i), "conservation", format!("v² = {} != {sq}", v_square(&step.result)));
        }
        if !is_primitive(&step.result) {
            return Verification::fail(i, Some(i), "primitivity", format!("{} is not primitive", step.result));
        }
        cur = step.result;
    }
    let n = c.steps.len();
    if cur != c.final_ {
        return Verification::fail(n, None, "replay", format!("final {} differs from replayed {cur}", c.final_));
    }
    if !(c.final_.r == 2 || c.final_.r == 4) {
        return Verification::fail(n, None, "final rank", format!("final rank {} not in {{2, 4}}", c.final_.r));
    }
    Verification::pass(n)
}
