//! Poincaré compactification: the four local charts at infinity, the
//! published chart systems, and the inventory of infinite equilibria.
//!
//! Chart maps (all with `v > 0` on the finite side, `v = 0` at infinity):
//!
//! | chart | finite point        |
//! |-------|---------------------|
//! | U1    | `( 1/v,  u/v)`      |
//! | V1    | `(-1/v, -u/v)`      |
//! | U2    | `( u/v,  1/v)`      |
//! | V2    | `(-u/v, -1/v)`      |
//!
//! The U-chart systems are the pushforward of the planar field multiplied by
//! `v^(d-1)`, `d` the degree. The V-chart systems follow from the U-chart ones
//! through the antipodal map: `V(u, w) = (-1)^(d-1) (U_u(u, -w), -U_v(u, -w))`,
//! which reduces to the usual `(-1)^(d-1)` parity rule on `v = 0`.

use serde::{Deserialize, Serialize};

use crate::equilibria::{Equilibrium, EquilibriumKind, Location, Sector};
use crate::error::{Error, Result};
use crate::field::{field_xy, ipow, Params, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartId {
    U1,
    V1,
    U2,
    V2,
}

impl ChartId {
    pub const ALL: [ChartId; 4] = [ChartId::U1, ChartId::V1, ChartId::U2, ChartId::V2];

    pub fn is_v(&self) -> bool {
        matches!(self, ChartId::V1 | ChartId::V2)
    }

    /// The U chart covering the antipodal region.
    pub fn u_partner(&self) -> ChartId {
        match self {
            ChartId::U1 | ChartId::V1 => ChartId::U1,
            ChartId::U2 | ChartId::V2 => ChartId::U2,
        }
    }

    /// True for U1/V1, whose `u` measures `y/x`.
    pub fn is_x_chart(&self) -> bool {
        matches!(self, ChartId::U1 | ChartId::V1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    #[serde(rename = "id")]
    pub chart: ChartId,
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub fn new(chart: ChartId, u: f64, v: f64) -> Self {
        Self { chart, u, v }
    }

    /// Homogeneous coordinates `(X, Y, Z)` with `Z = v >= 0`; the finite
    /// point is `(X/Z, Y/Z)`.
    pub fn homogeneous(&self) -> [f64; 3] {
        let (u, v) = (self.u, self.v);
        match self.chart {
            ChartId::U1 => [1.0, u, v],
            ChartId::V1 => [-1.0, -u, v],
            ChartId::U2 => [u, 1.0, v],
            ChartId::V2 => [-u, -1.0, v],
        }
    }

    pub fn to_finite(&self) -> Result<PhasePoint> {
        if !(self.v > 0.0) {
            return Err(Error::Domain(format!(
                "chart point with v = {} is not a finite point",
                self.v
            )));
        }
        let [x, y, z] = self.homogeneous();
        Ok(PhasePoint::new(x / z, y / z))
    }

    /// Re-expresses the point in `target`, if it lies in that chart's domain.
    pub fn convert(&self, target: ChartId) -> Option<ChartPoint> {
        from_homogeneous(self.homogeneous(), target)
    }
}

fn from_homogeneous(h: [f64; 3], target: ChartId) -> Option<ChartPoint> {
    let [x, y, z] = h;
    let (main, other) = match target {
        ChartId::U1 | ChartId::V1 => (x, y),
        ChartId::U2 | ChartId::V2 => (y, x),
    };
    let wanted_positive = !target.is_v();
    if main == 0.0 || (main > 0.0) != wanted_positive {
        return None;
    }
    Some(ChartPoint::new(target, other / main, z / main.abs()))
}

/// Chart point representing a finite point, picking the chart whose main
/// coordinate dominates (`|x| >= |y|` selects U1/V1).
pub fn chart_of_finite(pt: &PhasePoint) -> ChartPoint {
    let target = if pt.x.abs() >= pt.y.abs() {
        if pt.x >= 0.0 {
            ChartId::U1
        } else {
            ChartId::V1
        }
    } else if pt.y > 0.0 {
        ChartId::U2
    } else {
        ChartId::V2
    };
    from_homogeneous([pt.x, pt.y, 1.0], target).expect("dominant coordinate is nonzero")
}

/// Point of the closed unit disk; the boundary circle is infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

impl DiskPoint {
    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

fn disk_of_homogeneous([x, y, z]: [f64; 3]) -> DiskPoint {
    let s = z + x.hypot(y);
    DiskPoint { x: x / s, y: y / s }
}

/// Radial compactification `(x, y) / (1 + |(x, y)|)`.
pub fn from_finite(pt: &PhasePoint) -> DiskPoint {
    disk_of_homogeneous([pt.x, pt.y, 1.0])
}

pub fn to_disk(cp: &ChartPoint) -> DiskPoint {
    disk_of_homogeneous(cp.homogeneous())
}

/// Inverse of [`from_finite`]; `None` on the boundary circle.
pub fn disk_to_finite(dp: &DiskPoint) -> Option<PhasePoint> {
    let r = dp.radius();
    if r >= 1.0 {
        return None;
    }
    Some(PhasePoint::new(dp.x / (1.0 - r), dp.y / (1.0 - r)))
}

/// Published U-chart system for the parameter case.
fn u_field(p: &Params, chart: ChartId, u: f64, v: f64) -> [f64; 2] {
    let (n, k, c) = (p.n(), p.k(), p.c());
    let vk = ipow(v, k);
    match (chart, n, k) {
        (ChartId::U1, 1, _) => [
            u + ipow(v, k - 1) - vk - c * u * vk - u * u * vk,
            -u * vk * v,
        ],
        (ChartId::U1, _, 1) => [1.0 + v * (u - (1.0 + u * (c + u)) * v), -u * v * v * v],
        (ChartId::U1, _, _) => [
            u + ipow(v, k - 2) - vk - c * u * vk - u * u * vk,
            -u * vk * v,
        ],
        (ChartId::U2, 1, _) => [
            -u * u * u * ipow(v, k - 1) + vk + c * u * vk + u * u * vk - ipow(u, k + 1),
            -u * u * vk + c * vk * v + u * vk * v - ipow(u, k) * v,
        ],
        (ChartId::U2, _, 1) => [
            -ipow(u, 4) + u * u * (v - 1.0) * v + v * v * (1.0 + c * u),
            v * (-u * u * u + u * (v - 1.0) * v + c * v * v),
        ],
        (ChartId::U2, _, _) => [
            -ipow(u, 4) * ipow(v, k - 2) + vk + c * u * vk + u * u * vk - ipow(u, k + 1),
            -u * u * u * ipow(v, k - 1) + c * vk * v + u * vk * v - ipow(u, k) * v,
        ],
        _ => unreachable!("u_field called with a V chart"),
    }
}

/// Right-hand side of the chart system at `(u, v)`.
pub fn chart_field(p: &Params, cp: &ChartPoint) -> [f64; 2] {
    chart_field_uv(p, cp.chart, cp.u, cp.v)
}

#[inline]
pub fn chart_field_uv(p: &Params, chart: ChartId, u: f64, v: f64) -> [f64; 2] {
    if chart.is_v() {
        let s = if (p.degree() - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let f = u_field(p, chart.u_partner(), u, -v);
        [s * f[0], -s * f[1]]
    } else {
        u_field(p, chart, u, v)
    }
}

/// Pushforward of the planar field into chart coordinates, multiplied by
/// `v^(d-1)`. Requires `v > 0`.
pub fn pushforward(p: &Params, cp: &ChartPoint) -> Result<[f64; 2]> {
    let pt = cp.to_finite()?;
    let (x, y) = (pt.x, pt.y);
    let [xd, yd] = field_xy(p, x, y);
    let raw = match cp.chart {
        ChartId::U1 => [(yd * x - y * xd) / (x * x), -xd / (x * x)],
        ChartId::V1 => [(yd * x - y * xd) / (x * x), xd / (x * x)],
        ChartId::U2 => [(xd * y - x * yd) / (y * y), -yd / (y * y)],
        ChartId::V2 => [(xd * y - x * yd) / (y * y), yd / (y * y)],
    };
    let scale = ipow(cp.v, p.degree() - 1);
    Ok([raw[0] * scale, raw[1] * scale])
}

/// Relative mismatch between the hardcoded chart system and the rescaled
/// pushforward of the planar field.
pub fn pushforward_residual(p: &Params, cp: &ChartPoint) -> Result<f64> {
    if !(cp.v > 0.0) {
        return Err(Error::Domain(format!(
            "pushforward undefined at v = {} (infinity)",
            cp.v
        )));
    }
    let a = chart_field(p, cp);
    let b = pushforward(p, cp)?;
    let diff = (a[0] - b[0]).hypot(a[1] - b[1]);
    let scale = a[0].hypot(a[1]).max(b[0].hypot(b[1]));
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(diff / scale)
}

fn sectors_u2(p: &Params) -> Vec<Sector> {
    if p.n() == 2 && p.k() == 1 {
        vec![
            Sector::Elliptic,
            Sector::Parabolic,
            Sector::Elliptic,
            Sector::Parabolic,
        ]
    } else if p.k() % 2 == 1 {
        vec![Sector::Elliptic, Sector::Hyperbolic]
    } else {
        vec![Sector::Parabolic]
    }
}

fn infinite(label: &'static str, chart: ChartId, u: f64, kind: EquilibriumKind) -> Equilibrium {
    Equilibrium {
        label,
        location: Location::Chart(ChartPoint::new(chart, u, 0.0)),
        kind,
    }
}

/// Infinite equilibria with their local type, per `(n, k)` case.
pub fn infinite_equilibria(p: &Params) -> Vec<Equilibrium> {
    let (n, k) = (p.n(), p.k());
    let odd = k % 2 == 1;
    let u2_kind = EquilibriumKind::Sectors(sectors_u2(p));
    match (n, k) {
        (1, _) => {
            let u0 = if k == 1 { -1.0 } else { 0.0 };
            let (l3, l4) = if odd { ("I3^0", "I4^0") } else { ("I3^e", "I4^e") };
            vec![
                infinite("I1", ChartId::U1, u0, EquilibriumKind::SaddleNode),
                infinite("I2", ChartId::V1, u0, EquilibriumKind::SaddleNode),
                infinite(l3, ChartId::U2, 0.0, u2_kind.clone()),
                infinite(l4, ChartId::V2, 0.0, u2_kind),
            ]
        }
        (_, 1) => vec![
            infinite("I7", ChartId::U2, 0.0, u2_kind.clone()),
            infinite("I8", ChartId::V2, 0.0, u2_kind),
        ],
        _ => {
            let u0 = if k == 2 { -1.0 } else { 0.0 };
            let (l9, l10) = if odd { ("I9^0", "I10^0") } else { ("I9^e", "I10^e") };
            let i6 = if odd {
                EquilibriumKind::StableNode
            } else {
                EquilibriumKind::UnstableNode
            };
            vec![
                infinite("I5", ChartId::U1, u0, EquilibriumKind::UnstableNode),
                infinite("I6", ChartId::V1, u0, i6),
                infinite(l9, ChartId::U2, 0.0, u2_kind.clone()),
                infinite(l10, ChartId::V2, 0.0, u2_kind),
            ]
        }
    }
}
