//! Mukai vectors `v = r + c1 - (s/2)ρ` and the isometries acting on them.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Int};
use crate::lattice::{self, BasisChange, ClassVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MukaiError {
    #[error("parity violated: s = {s} and r = {r} must have the same parity")]
    Parity { r: Int, s: Int },
    #[error("switch hypothesis {0} violated")]
    SwitchHypothesis(&'static str),
}

/// The triple `(r, c1, s)`; the ρ-coefficient is `-s/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMukai")]
pub struct MukaiVector {
    pub r: Int,
    pub c1: ClassVector,
    pub s: Int,
}

#[derive(Deserialize)]
struct RawMukai {
    r: Int,
    c1: ClassVector,
    s: Int,
}

impl TryFrom<RawMukai> for MukaiVector {
    type Error = MukaiError;
    fn try_from(raw: RawMukai) -> Result<Self, MukaiError> {
        MukaiVector::new(raw.r, raw.c1, raw.s)
    }
}

impl MukaiVector {
    pub fn new(r: Int, c1: ClassVector, s: Int) -> Result<Self, MukaiError> {
        if (r - s).rem_euclid(2) != 0 {
            return Err(MukaiError::Parity { r, s });
        }
        Ok(MukaiVector { r, c1, s })
    }

    /// Rank-2 convention `v = 2 + c1 + tρ`, i.e. `t = -s/2`. `None` for odd `s`.
    pub fn t(&self) -> Option<Int> {
        (self.s % 2 == 0).then_some(-self.s / 2)
    }

    /// `ch2 = -(r + s)/2`
    pub fn ch2(&self) -> Int {
        -(self.r + self.s) / 2
    }

    pub fn square(&self) -> Int {
        v_square(self)
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, c1={}, s={})", self.r, self.c1, self.s)
    }
}

/// Rank, first Chern class and second Chern number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChernData {
    pub r: Int,
    pub c1: ClassVector,
    pub c2: Int,
}

pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector) -> Int {
    lattice::inner(&v.c1, &w.c1) + (v.r * w.s + w.r * v.s) / 2
}

/// `⟨v²⟩ = c1² + rs`
pub fn v_square(v: &MukaiVector) -> Int {
    lattice::norm(&v.c1) + v.r * v.s
}

pub fn from_chern(d: &ChernData) -> MukaiVector {
    MukaiVector { r: d.r, c1: d.c1, s: -d.r - lattice::norm(&d.c1) + 2 * d.c2 }
}

pub fn to_chern(v: &MukaiVector) -> ChernData {
    ChernData { r: v.r, c1: v.c1, c2: (v.r + lattice::norm(&v.c1) + v.s) / 2 }
}

/// `χ = r + c1²/2 - c2`
pub fn euler_char(v: &MukaiVector) -> Int {
    let d = to_chern(v);
    d.r + lattice::norm(&d.c1) / 2 - d.c2
}

/// Multiplication by `exp(D) = 1 + D + (D²/2)ρ`.
pub fn twist(v: &MukaiVector, d: &ClassVector) -> MukaiVector {
    MukaiVector {
        r: v.r,
        c1: v.c1 + v.r * *d,
        s: v.s - 2 * lattice::inner(&v.c1, d) - v.r * lattice::norm(d),
    }
}

/// Hypotheses of the rank/s exchange, in the order they are checked.
pub fn switch_hypotheses(v: &MukaiVector) -> [(&'static str, bool); 3] {
    [("r>0", v.r > 0), ("s>0", v.s > 0), ("c1^2<0", lattice::norm(&v.c1) < 0)]
}

/// `(r, c1, s) ↦ (s, -c1, r)`, valid when `r, s > 0` and `c1² < 0`.
pub fn switch(v: &MukaiVector) -> Result<MukaiVector, MukaiError> {
    if let Some((name, _)) = switch_hypotheses(v).into_iter().find(|(_, ok)| !ok) {
        return Err(MukaiError::SwitchHypothesis(name));
    }
    Ok(MukaiVector { r: v.s, c1: -v.c1, s: v.r })
}

/// Primitivity in `v(K(X))`, read off the integral basis `{1 + ρ/2, H², ρ}`:
/// `v = r(1 + ρ/2) + c1 - ((r+s)/2)ρ`.
pub fn is_primitive(v: &MukaiVector) -> bool {
    arith::gcd_all([v.r, lattice::content(&v.c1), (v.r + v.s) / 2]) == 1
}

pub fn gcd_rcs(v: &MukaiVector) -> Int {
    arith::gcd_all([v.r, lattice::content(&v.c1), v.s])
}

/// One isometry step of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Twist(ClassVector),
    Switch,
    #[serde(rename = "rebase")]
    ReBase(BasisChange),
}

impl Move {
    pub fn inverse(&self) -> Move {
        match self {
            Move::Twist(d) => Move::Twist(-*d),
            Move::Switch => Move::Switch,
            Move::ReBase(b) => Move::ReBase(b.inverse()),
        }
    }

    /// Named preconditions of the move evaluated at `v`.
    pub fn preconditions(&self, v: &MukaiVector) -> Vec<(&'static str, bool)> {
        match self {
            Move::Switch => switch_hypotheses(v).to_vec(),
            Move::Twist(_) | Move::ReBase(_) => Vec::new(),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Twist(d) => write!(f, "twist {d}"),
            Move::Switch => write!(f, "switch"),
            Move::ReBase(b) => match b.name() {
                Some(n) => write!(f, "rebase {n}"),
                None => write!(f, "rebase <matrix>"),
            },
        }
    }
}

pub fn apply_move(v: &MukaiVector, m: &Move) -> Result<MukaiVector, MukaiError> {
    match m {
        Move::Twist(d) => Ok(twist(v, d)),
        Move::Switch => switch(v),
        Move::ReBase(b) => Ok(MukaiVector { r: v.r, c1: b.to_new(&v.c1), s: v.s }),
    }
}
