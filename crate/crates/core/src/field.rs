//! The planar polynomial field `x' = y, y' = -c y + x^k y + x (x^n - 1)`.
//!
//! Everything downstream (equilibria, charts at infinity, the wave) is
//! built on the three evaluators here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x^e` by repeated squaring. Integer exponents only, so no `powf` drift.
#[inline]
pub fn ipow(x: f64, mut e: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Parameters `(n, k, c)` of the family; the reaction exponent `m` is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    n: u32,
    k: u32,
    c: f64,
    m: u32,
}

impl Params {
    pub fn new(n: u32, k: u32, c: f64) -> Result<Self> {
        Self::with_m(n, k, c, 1)
    }

    /// Full constructor; any `m != 1` is rejected.
    pub fn with_m(n: u32, k: u32, c: f64, m: u32) -> Result<Self> {
        if m != 1 {
            return Err(Error::InvalidParams(format!("m must be 1, got {m}")));
        }
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidParams(format!("n must be 1 or 2, got {n}")));
        }
        if k == 0 {
            return Err(Error::InvalidParams("k must be a positive integer".into()));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams(format!("c must be positive and finite, got {c}")));
        }
        Ok(Self { n, k, c, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Polynomial degree of the field: `max(k, n) + 1`.
    pub fn degree(&self) -> u32 {
        self.k.max(self.n) + 1
    }
}

/// A point `(x, y) = (phi, phi')` of the finite plane at time `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub s: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y, s: 0.0 }
    }

    pub fn at(x: f64, y: f64, s: f64) -> Self {
        Self { x, y, s }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.s.is_finite()
    }

    pub fn dist(&self, other: &PhasePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

pub type Mat2 = [[f64; 2]; 2];

/// Right-hand side of the planar system at `(x, y)`.
#[inline]
pub fn field_xy(p: &Params, x: f64, y: f64) -> [f64; 2] {
    [y, -p.c * y + ipow(x, p.k) * y + x * (ipow(x, p.n) - 1.0)]
}

pub fn eval_field(p: &Params, pt: &PhasePoint) -> [f64; 2] {
    field_xy(p, pt.x, pt.y)
}

pub fn jacobian(p: &Params, pt: &PhasePoint) -> Mat2 {
    let (x, y) = (pt.x, pt.y);
    let n = p.n as f64;
    let k = p.k as f64;
    [
        [0.0, 1.0],
        [
            (1.0 + n) * ipow(x, p.n) + k * ipow(x, p.k - 1) * y - 1.0,
            ipow(x, p.k) - p.c,
        ],
    ]
}

pub fn divergence(p: &Params, pt: &PhasePoint) -> f64 {
    ipow(pt.x, p.k) - p.c
}

/// The strip where the divergence is strictly negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    /// `x < c^(1/k)`, used for odd `k`.
    B1,
    /// `|x| < c^(1/k)`, used for even `k`.
    B2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub tag: RegionTag,
    /// The bound `c^(1/k)`.
    pub bound: f64,
}

impl Region {
    pub fn for_params(p: &Params) -> Self {
        let tag = if p.k % 2 == 1 { RegionTag::B1 } else { RegionTag::B2 };
        Self {
            tag,
            bound: p.c.powf(1.0 / p.k as f64),
        }
    }

    /// Strict membership; the boundary `x = ±c^(1/k)` is excluded.
    pub fn contains(&self, pt: &PhasePoint) -> bool {
        match self.tag {
            RegionTag::B1 => pt.x < self.bound,
            RegionTag::B2 => -self.bound < pt.x && pt.x < self.bound,
        }
    }
}

/// Whether `pt` lies in the Bendixson region selected by the parity of `k`.
pub fn in_bendixson_region(p: &Params, pt: &PhasePoint) -> (bool, RegionTag) {
    let region = Region::for_params(p);
    let inside = region.contains(pt) && divergence(p, pt) < 0.0;
    (inside, region.tag)
}
