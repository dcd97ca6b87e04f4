//! Walls of type `(r, Δ)` in the positive cone and the construction of
//! polarizations `H = L0 + n·F_A` lying on none of them.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Int};
use crate::enumerate::{short_vectors, short_vectors_with, visit_short_vectors};
use crate::exec::Parallelism;
use crate::lattice::{self, orthogonal_complement, ClassVector, LatticeError, NegDefSublattice};
use crate::mukai::ChernData;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WallError {
    #[error("wall type needs r >= 2 and Delta > 0, got ({r}, {delta})")]
    InvalidSpec { r: Int, delta: Int },
    #[error("class {0} does not have positive square")]
    NotPositive(Box<ClassVector>),
    #[error("half-pencil class must be isotropic")]
    NotIsotropic,
    #[error("half-pencil class must be primitive")]
    NotPrimitive,
    #[error("half-pencil class must pair positively with L1")]
    NotPositivePairing,
    #[error("subsheaf rank must satisfy 0 < r' < r, got r = {r}, r' = {r_prime}")]
    RankBounds { r: Int, r_prime: Int },
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(Int),
    #[error("polarization search exhausted after {} wall hits", .0.hits.len())]
    Exhausted(Box<PolarizationFailure>),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Wall type `(r, Δ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WallSpec {
    pub r: Int,
    #[serde(rename = "Delta")]
    pub delta: Int,
}

impl WallSpec {
    pub fn new(r: Int, delta: Int) -> Result<Self, WallError> {
        if r < 2 || delta <= 0 {
            return Err(WallError::InvalidSpec { r, delta });
        }
        Ok(WallSpec { r, delta })
    }

    /// Smallest admissible norm: the least integer `≥ -r²Δ/4`.
    pub fn min_norm(&self) -> Int {
        -(self.r * self.r * self.delta).div_euclid(4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wall {
    pub xi: ClassVector,
    pub spec: WallSpec,
}

/// A class assumed ample. Only `H² > 0` is checked; ampleness itself is an
/// input assumption recorded in `trusted`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmpleClass {
    #[serde(rename = "H")]
    pub h: ClassVector,
    pub trusted: bool,
}

impl AmpleClass {
    pub fn new(h: ClassVector) -> Result<Self, WallError> {
        if lattice::norm(&h) <= 0 {
            return Err(WallError::NotPositive(Box::new(h)));
        }
        Ok(AmpleClass { h, trusted: true })
    }
}

/// `-r²Δ/4 ≤ ξ² < 0`, compared as `4ξ² ≥ -r²Δ`.
pub fn is_of_type(xi: &ClassVector, spec: &WallSpec) -> bool {
    let n = lattice::norm(xi);
    n < 0 && 4 * n >= -spec.r * spec.r * spec.delta
}

/// `ξ` and `-ξ` give the same wall; keep the one whose first nonzero
/// coordinate is positive.
fn is_representative(x: &ClassVector) -> bool {
    x.0.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// Every wall of type `spec` through the ray of `h`, one representative per
/// `±ξ`, sorted.
pub fn walls_through(h: &AmpleClass, spec: &WallSpec) -> Result<Vec<Wall>, WallError> {
    walls_through_with(h, spec, Parallelism::default())
}

pub fn walls_through_with(h: &AmpleClass, spec: &WallSpec, mode: Parallelism) -> Result<Vec<Wall>, WallError> {
    if lattice::norm(&h.h) <= 0 {
        return Err(WallError::NotPositive(Box::new(h.h)));
    }
    let lower = spec.min_norm();
    if lower > -1 {
        return Ok(Vec::new());
    }
    let complement = orthogonal_complement(&h.h)?;
    let vectors = short_vectors_with(&complement, lower, -1, mode)?;
    Ok(vectors
        .into_iter()
        .filter(|x| is_representative(x) && is_of_type(x, spec))
        .map(|xi| Wall { xi, spec: *spec })
        .collect())
}

/// Some wall of type `spec` through `h`, if there is one.
pub fn on_wall(h: &AmpleClass, spec: &WallSpec) -> Result<Option<Wall>, WallError> {
    if lattice::norm(&h.h) <= 0 {
        return Err(WallError::NotPositive(Box::new(h.h)));
    }
    let lower = spec.min_norm();
    if lower > -1 {
        return Ok(None);
    }
    let complement = orthogonal_complement(&h.h)?;
    Ok(first_wall(&complement, lower, spec))
}

fn first_wall(complement: &NegDefSublattice, lower: Int, spec: &WallSpec) -> Option<Wall> {
    let mut found = None;
    let _ = visit_short_vectors(complement, lower, -1, |x, _| {
        if is_of_type(x, spec) {
            let xi = if is_representative(x) { *x } else { -*x };
            found = Some(Wall { xi, spec: *spec });
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// `ξ = r·c1(E') - r'·c1(E)` for a subsheaf `E' ⊂ E` of rank `r'`.
pub fn subsheaf_class(r: Int, c1_e: &ClassVector, r_prime: Int, c1_prime: &ClassVector) -> Result<ClassVector, WallError> {
    if !(0 < r_prime && r_prime < r) {
        return Err(WallError::RankBounds { r, r_prime });
    }
    Ok(r * *c1_prime - r_prime * *c1_e)
}

/// `Δ = 2r·c2 - (r-1)·c1²`
pub fn discriminant(d: &ChernData) -> Result<Int, WallError> {
    if d.r < 1 {
        return Err(WallError::NonPositiveRank(d.r));
    }
    Ok(2 * d.r * d.c2 - (d.r - 1) * lattice::norm(&d.c1))
}

/// Limits of the polarization search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationBudget {
    /// Number of multiples `n` tried with `L0 = L1`.
    pub n: Int,
    /// Largest denominator of the perturbation.
    pub q: Int,
    /// Largest coordinate `cᵢ` of the perturbing weight `Σ cᵢωᵢ`.
    pub numerator: Int,
}

impl Default for PolarizationBudget {
    fn default() -> Self {
        PolarizationBudget { n: 16, q: 4096, numerator: 12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationPath {
    Direct,
    Perturbed,
}

/// A candidate rejected because it lies on a wall.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallHit {
    pub h: ClassVector,
    pub witness: ClassVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub path: PolarizationPath,
    /// `(L1 + w/q)` scaled by `q`; absent on the direct path.
    pub q: Option<Int>,
    pub numerator: Option<ClassVector>,
    pub n0: Option<Int>,
    pub candidates_tried: usize,
    /// `H² = L0² + 2n·(L0, F_A)`, exact.
    pub h_square: Int,
    pub l0_dot_fa: Int,
    pub ample_trusted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polarization {
    #[serde(rename = "L0")]
    pub l0: ClassVector,
    pub n: Int,
    #[serde(rename = "H")]
    pub h: ClassVector,
    pub report: PolarizationReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationFailure {
    pub budget: PolarizationBudget,
    pub hits: Vec<WallHit>,
    pub rejected_without_witness: usize,
}

fn check_half_pencil(l1: &AmpleClass, fa: &ClassVector) -> Result<Int, WallError> {
    if lattice::norm(&l1.h) <= 0 {
        return Err(WallError::NotPositive(Box::new(l1.h)));
    }
    if lattice::norm(fa) != 0 {
        return Err(WallError::NotIsotropic);
    }
    if !lattice::is_primitive(fa) {
        return Err(WallError::NotPrimitive);
    }
    let a = lattice::inner(fa, &l1.h);
    if a <= 0 {
        return Err(WallError::NotPositivePairing);
    }
    Ok(a)
}

/// The dominant `-E8` weight with pairings `c` against the simple roots.
fn weight(c: &[Int; 8]) -> ClassVector {
    static INV: std::sync::OnceLock<Vec<Vec<Int>>> = std::sync::OnceLock::new();
    // (x, e_j) = (G x)_j, so the weight with pairings c is G⁻¹c.
    let inv = INV.get_or_init(|| arith::unimodular_inverse(&lattice::neg_e8_matrix()).expect("-E8 is unimodular"));
    ClassVector::from_e8(std::array::from_fn(|i| (0..8).map(|j| inv[i][j] * c[j]).sum()))
}

/// First `c` with `1 ≤ cᵢ ≤ max`, ordered by `max cᵢ` and then
/// lexicographically, such that the weight `Σ cᵢωᵢ` pairs nonzero with every
/// class in `avoid`.
///
/// The pairing of `Σ cᵢωᵢ` with `ξ` is `Σ cᵢξᵢ` over the `-E8` coordinates,
/// so a class is decided as soon as its last nonzero coordinate is assigned.
fn regular_weight(avoid: &[ClassVector], max: Int) -> Option<[Int; 8]> {
    let mut by_last: Vec<Vec<[Int; 8]>> = vec![Vec::new(); 8];
    for xi in avoid {
        let p: [Int; 8] = std::array::from_fn(|i| xi.0[i + 2]);
        let last = (0..8).rev().find(|&i| p[i] != 0)?;
        by_last[last].push(p);
    }
    fn dfs(j: usize, m: Int, c: &mut [Int; 8], by_last: &[Vec<[Int; 8]>]) -> bool {
        if j == 8 {
            return c.contains(&m);
        }
        for v in 1..=m {
            c[j] = v;
            let ok = by_last[j].iter().all(|p| (0..=j).map(|i| p[i] * c[i]).sum::<Int>() != 0);
            if ok && dfs(j + 1, m, c, by_last) {
                return true;
            }
        }
        false
    }
    (1..=max).find_map(|m| {
        let mut c = [1; 8];
        dfs(0, m, &mut c, &by_last).then_some(c)
    })
}

/// Finds `H = L0 + n·F_A` with `n > (F_A, L0)`, `H² > 0` and no wall of type
/// `spec` through `H`.
///
/// First `L0 = L1` with `n` just above `(F_A, L1)`. If every such `H` is on a
/// wall, `L1` is perturbed to `L1 + w/q` and tested at `n0 = (F_A, L1) + 2`,
/// then denominators are cleared: `L0 = qL1 + w`, `n = q·n0`, so that
/// `H = q(L1 + n0·F_A) + w`.
///
/// `w` is a dominant `-E8` weight pairing nonzero with every wall through
/// `L1 + n0·F_A`; the walls are locally finite, so for large `q` none of them
/// passes through `H`. The denominators run upwards from 2.
pub fn construct_polarization(
    l1: &AmpleClass,
    fa: &ClassVector,
    spec: &WallSpec,
    budget: &PolarizationBudget,
) -> Result<Polarization, WallError> {
    construct_polarization_with(l1, fa, spec, budget, Parallelism::default())
}

pub fn construct_polarization_with(
    l1: &AmpleClass,
    fa: &ClassVector,
    spec: &WallSpec,
    budget: &PolarizationBudget,
    mode: Parallelism,
) -> Result<Polarization, WallError> {
    let a = check_half_pencil(l1, fa)?;
    let lower = spec.min_norm();
    let mut hits = Vec::new();

    let direct: Vec<Int> = (a + 1..=a + budget.n.max(0)).collect();
    let outcomes = mode.map(&direct, |&n| {
        let h = l1.h + n * *fa;
        on_wall(&AmpleClass { h, trusted: true }, spec).map(|w| (n, h, w))
    });
    for outcome in outcomes {
        let (n, h, wall) = outcome?;
        match wall {
            None => {
                let mut pol = finish(l1.h, n, fa, PolarizationPath::Direct, None, None, None, (n - a) as usize);
                pol.report.ample_trusted = l1.trusted;
                return Ok(pol);
            }
            Some(w) => hits.push(WallHit { h, witness: w.xi }),
        }
    }

    let n0 = a + 2;
    let base = l1.h + n0 * *fa;
    let through_base: Vec<ClassVector> =
        walls_through_with(&AmpleClass { h: base, trusted: true }, spec, mode)?.into_iter().map(|w| w.xi).collect();
    let exhausted = |hits: Vec<WallHit>, rejected: usize| {
        WallError::Exhausted(Box::new(PolarizationFailure { budget: *budget, hits, rejected_without_witness: rejected }))
    };
    let Some(c) = regular_weight(&through_base, budget.numerator) else {
        return Err(exhausted(hits, 0));
    };
    let w = weight(&c);
    let e8_layer = if lower <= -2 {
        short_vectors(&NegDefSublattice::neg_e8(), lower, -2)?
    } else {
        Vec::new()
    };

    enum Outcome {
        Found,
        Hit(Box<WallHit>),
        Rejected,
    }
    let test = |&q: &Int| -> Outcome {
        let scaled = q * l1.h + w;
        if lattice::inner(&w, fa) >= q || lattice::norm(&scaled) <= 0 {
            return Outcome::Rejected;
        }
        let h = scaled + (q * n0) * *fa;
        let h8 = h.e8_part();
        if let Some(eta) = e8_layer.iter().find(|eta| lattice::inner(eta, &h8) == 0) {
            return Outcome::Hit(Box::new(WallHit { h, witness: *eta }));
        }
        match on_wall(&AmpleClass { h, trusted: true }, spec) {
            Ok(None) => Outcome::Found,
            Ok(Some(wall)) => Outcome::Hit(Box::new(WallHit { h, witness: wall.xi })),
            Err(_) => Outcome::Rejected,
        }
    };
    let denominators: Vec<Int> = (2..=budget.q).collect();
    let found = mode.find_map_first(&denominators, |q| matches!(test(q), Outcome::Found).then_some(*q));
    match found {
        Some(q) => {
            let l0 = q * l1.h + w;
            let tried = direct.len() + (q - 1) as usize;
            let mut pol = finish(l0, q * n0, fa, PolarizationPath::Perturbed, Some(q), Some(w), Some(n0), tried);
            if pol.n <= lattice::inner(fa, &pol.l0) {
                return Err(LatticeError::Internal(format!("n = {} does not exceed (F_A, L0)", pol.n)).into());
            }
            pol.report.ample_trusted = l1.trusted;
            Ok(pol)
        }
        None => {
            let mut rejected = 0;
            for outcome in mode.map(&denominators, test) {
                match outcome {
                    Outcome::Hit(h) => hits.push(*h),
                    Outcome::Rejected => rejected += 1,
                    Outcome::Found => unreachable!("search already ran to exhaustion"),
                }
            }
            Err(exhausted(hits, rejected))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    l0: ClassVector,
    n: Int,
    fa: &ClassVector,
    path: PolarizationPath,
    q: Option<Int>,
    numerator: Option<ClassVector>,
    n0: Option<Int>,
    tried: usize,
) -> Polarization {
    let h = l0 + n * *fa;
    let l0_dot_fa = lattice::inner(&l0, fa);
    let h_square = lattice::norm(&l0) + 2 * n * l0_dot_fa;
    debug_assert_eq!(h_square, lattice::norm(&h));
    Polarization {
        l0,
        n,
        h,
        report: PolarizationReport {
            path,
            q,
            numerator,
            n0,
            candidates_tried: tried,
            h_square,
            l0_dot_fa,
            ample_trusted: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> ClassVector {
        ClassVector::sigma()
    }

    fn f() -> ClassVector {
        ClassVector::f()
    }

    fn e(i: usize) -> ClassVector {
        ClassVector::e(i)
    }

    #[test]
    fn type_examples() {
        let t24 = WallSpec::new(2, 4).unwrap();
        assert!(is_of_type(&(s() - f()), &t24));
        assert!(!is_of_type(&(s() + f()), &t24));
        assert!(!is_of_type(&(e(1) + e(2)), &WallSpec::new(2, 3).unwrap()));
        assert_eq!(WallSpec::new(2, 4).unwrap().min_norm(), WallSpec::new(4, 1).unwrap().min_norm());
        assert_eq!(WallSpec::new(3, 1).unwrap().min_norm(), -2);
        assert!(WallSpec::new(1, 4).is_err());
        assert!(WallSpec::new(2, 0).is_err());
    }

    #[test]
    fn walls_through_hyperbolic_plane() {
        let h = AmpleClass::new(s() + f()).unwrap();
        let walls = walls_through(&h, &WallSpec::new(2, 4).unwrap()).unwrap();
        assert_eq!(walls.len(), 1441);
        assert_eq!(walls.iter().filter(|w| lattice::norm(&w.xi) == -2).count(), 121);
        assert!(walls.windows(2).all(|p| p[0].xi < p[1].xi));
        for w in &walls {
            assert_eq!(lattice::inner(&w.xi, &h.h), 0);
        }
        assert!(walls_through(&h, &WallSpec::new(2, 1).unwrap()).unwrap().is_empty());
        assert!(on_wall(&h, &WallSpec::new(2, 1).unwrap()).unwrap().is_none());
        let w = on_wall(&h, &WallSpec::new(2, 4).unwrap()).unwrap().unwrap();
        assert!(walls.contains(&w));
    }

    #[test]
    fn subsheaf_and_discriminant() {
        let (c, d) = (s() + 3 * f() - e(2), e(5));
        assert_eq!(subsheaf_class(2, &c, 1, &d).unwrap(), 2 * d - c);
        assert!(subsheaf_class(2, &c, 0, &d).is_err());
        assert_eq!(subsheaf_class(2, &c, 1, &c).unwrap(), c);
        assert_eq!(discriminant(&ChernData { r: 2, c1: f(), c2: 1 }).unwrap(), 4);
        assert_eq!(discriminant(&ChernData { r: 1, c1: s() + f(), c2: 5 }).unwrap(), 10);
        assert_eq!(discriminant(&ChernData { r: 2, c1: e(3), c2: 0 }).unwrap(), 2);
    }

    #[test]
    fn regular_weights() {
        let layer = short_vectors(&NegDefSublattice::neg_e8(), -4, -2).unwrap();
        assert_eq!(regular_weight(&layer[..0], 3), Some([1; 8]));
        let c = regular_weight(&layer, 8).unwrap();
        assert_eq!(c, [1, 3, 7, 7, 5, 5, 4, 2]);
        let w = weight(&c);
        for i in 1..=8 {
            assert_eq!(lattice::inner(&w, &e(i)), c[i - 1]);
        }
        assert!(layer.iter().all(|x| lattice::inner(x, &w) != 0));
        assert_eq!(regular_weight(&layer, 6), None);
        assert_eq!(regular_weight(&[s() - f()], 4), None);
    }

    #[test]
    fn polarization_errors() {
        let l1 = AmpleClass::new(s() + 2 * f()).unwrap();
        let t = WallSpec::new(2, 4).unwrap();
        let b = PolarizationBudget::default();
        assert_eq!(construct_polarization(&l1, &(s() + f()), &t, &b), Err(WallError::NotIsotropic));
        assert_eq!(WallError::NotIsotropic.to_string(), "half-pencil class must be isotropic");
        assert_eq!(construct_polarization(&l1, &(2 * f()), &t, &b), Err(WallError::NotPrimitive));
        assert_eq!(construct_polarization(&l1, &(-f()), &t, &b), Err(WallError::NotPositivePairing));
    }

    #[test]
    fn polarization_pure_hyperbolic_uses_perturbation() {
        let l1 = AmpleClass::new(s() + 2 * f()).unwrap();
        let t = WallSpec::new(2, 4).unwrap();
        let p = construct_polarization(&l1, &f(), &t, &PolarizationBudget::default()).unwrap();
        assert_eq!(p.report.path, PolarizationPath::Perturbed);
        assert!(p.n > lattice::inner(&f(), &p.l0));
        assert!(lattice::norm(&p.h) > 0);
        assert!(!p.h.e8_part().is_zero());
        assert!(walls_through(&AmpleClass::new(p.h).unwrap(), &t).unwrap().is_empty());
    }
}
