//! Quasi-homogeneous polar blow-ups of the degenerate points at the origin
//! of the U2 chart.
//!
//! `(u, v) = (r^a cos θ, r^b sin θ)` with weights `(k, k + 1)` for the
//! `n = 1, k > 1` and `n = 2, k > 1` cases and `(1, 2)` for `n = 2, k = 1`.
//! The systems below are the published ones after the positive common factor
//! has been divided out; the degenerate point becomes the invariant circle
//! `r = 0`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::compact::infinite_equilibria;
use crate::equilibria::{EquilibriumKind, Location, Sector};
use crate::error::{Error, Result};
use crate::field::{ipow, Mat2, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlowupCase {
    /// `n = 1, k > 1`, weights `(k, k + 1)`.
    Buc1,
    /// `n = 2, k = 1`, weights `(1, 2)`.
    Buc2,
    /// `n = 2, k > 1`, weights `(k, k + 1)`.
    Buc3,
}

impl BlowupCase {
    /// The blow-up used for `p`, or `None` when the U2 origin is not
    /// degenerate enough to need one (`n = 1, k = 1` is nilpotent).
    pub fn for_params(p: &Params) -> Option<Self> {
        match (p.n(), p.k()) {
            (1, 1) => None,
            (1, _) => Some(BlowupCase::Buc1),
            (_, 1) => Some(BlowupCase::Buc2),
            _ => Some(BlowupCase::Buc3),
        }
    }

    /// Weights `(a, b)` of the substitution.
    pub fn weights(&self, p: &Params) -> (u32, u32) {
        match self {
            BlowupCase::Buc2 => (1, 2),
            _ => (p.k(), p.k() + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupPoint {
    pub r: f64,
    pub theta: f64,
}

impl BlowupPoint {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("blow-up radius must be >= 0, got {r}")));
        }
        Ok(Self {
            r,
            theta: theta.rem_euclid(TAU),
        })
    }
}

fn check_case(p: &Params, case: BlowupCase) -> Result<()> {
    if BlowupCase::for_params(p) != Some(case) {
        return Err(Error::InvalidParams(format!(
            "blow-up {case:?} does not apply to n = {}, k = {}",
            p.n(),
            p.k()
        )));
    }
    Ok(())
}

pub fn blowup_field(p: &Params, case: BlowupCase, bp: &BlowupPoint) -> Result<[f64; 2]> {
    check_case(p, case)?;
    Ok(blowup_rhs(p, case, bp.r, bp.theta))
}

/// Unchecked evaluation; also valid for `r < 0`, which the finite-difference
/// Jacobian uses.
pub(crate) fn blowup_rhs(p: &Params, case: BlowupCase, r: f64, th: f64) -> [f64; 2] {
    let (s, co) = th.sin_cos();
    let c = p.c();
    let k = p.k();
    match case {
        BlowupCase::Buc1 => {
            let sk = ipow(s, k);
            let rdot = r * (co * sk - ipow(co, k)) - ipow(r, 2 * k) * co * co * ipow(s, k - 1)
                + c * ipow(r, k + 1) * sk
                + ipow(r, 2 * k + 1) * co * sk;
            let tdot = s * (ipow(co, k + 1) - (1 + k) as f64 * sk)
                + ipow(r, 2 * k - 1) * ipow(co, 3) * sk
                - c * ipow(r, k) * co * sk * s
                - ipow(r, 2 * k) * co * co * sk * s;
            [rdot, tdot]
        }
        BlowupCase::Buc2 => {
            let r2 = r * r;
            let rdot = r / 4.0
                * (2.0 * c * r + (-2.0 + r2) * co
                    - 2.0 * c * r * (2.0 * th).cos()
                    - (2.0 + r2) * (3.0 * th).cos()
                    - 2.0 * (2.0 * th).sin());
            let tdot = s * (ipow(co, 4) + co * co * s - 2.0 * s * s)
                - r * co * (c + r * co) * ipow(s, 3);
            [rdot, tdot]
        }
        BlowupCase::Buc3 => {
            let sk = ipow(s, k);
            let rdot = r * (co * sk - ipow(co, k))
                + ipow(r, 2 * k - 1) * (co * sk - co * ipow(s, k - 2))
                + c * ipow(r, k + 1) * sk
                + ipow(r, 2 * k + 1) * co * sk;
            let tdot = s * (ipow(co, k + 1) - (1 + k) as f64 * sk)
                + ipow(r, 2 * k - 2) * (co * co * ipow(s, k - 1) - co * co * sk * s)
                - ipow(r, k) * (c * co * sk * s + ipow(r, k) * co * co * sk * s);
            [rdot, tdot]
        }
    }
}

/// Left-hand side of the circle equation; its zeros are the equilibria on `r = 0`.
pub fn circle_equation(p: &Params, case: BlowupCase, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    match case {
        BlowupCase::Buc2 => s * (ipow(co, 4) + co * co * s - 2.0 * s * s),
        _ => s * circle_factor(p.k(), theta),
    }
}

/// Second factor `cos^(k+1) θ - (k+1) sin^k θ` of the circle equation.
fn circle_factor(k: u32, theta: f64) -> f64 {
    let (s, co) = theta.sin_cos();
    ipow(co, k + 1) - (k + 1) as f64 * ipow(s, k)
}

/// Bisection on a sign-changing bracket down to width `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleKind {
    Saddle,
    StableNodeOrFocus,
    UnstableNodeOrFocus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleEquilibrium {
    pub theta: f64,
    pub label: &'static str,
    /// Eigenvalue along `r`.
    pub radial: f64,
    /// Eigenvalue along `θ`.
    pub angular: f64,
    pub kind: CircleKind,
}

impl CircleEquilibrium {
    pub fn radial_sign(&self) -> f64 {
        self.radial.signum()
    }

    pub fn angular_sign(&self) -> f64 {
        self.angular.signum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleJacobian {
    pub matrix: Mat2,
    pub radial: f64,
    pub angular: f64,
    pub kind: CircleKind,
}

const NUDGE: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-13;

fn circle_angles(p: &Params, case: BlowupCase) -> Result<Vec<(f64, &'static str)>> {
    match case {
        BlowupCase::Buc2 => {
            let a = ((5f64.sqrt() - 1.0) / 2.0).asin();
            let b = (1.0 - 2f64.sqrt()).asin();
            Ok(vec![
                (0.0, "theta0^1"),
                (a, "theta1^1"),
                (PI - a, "theta2^1"),
                (PI, "theta3^1"),
                (PI - b, "theta4^1"),
                (TAU + b, "theta5^1"),
            ])
        }
        _ => {
            let k = p.k();
            let g = |t: f64| circle_factor(k, t);
            let bracket_fail =
                || Error::Numerical(format!("circle root bracketing failed for k = {k}"));
            let t1 = bisect(g, NUDGE, PI / 2.0, ROOT_TOL).ok_or_else(bracket_fail)?;
            let t3 = if k % 2 == 1 {
                bisect(g, PI / 2.0, PI - NUDGE, ROOT_TOL)
            } else {
                bisect(g, 1.5 * PI, TAU - NUDGE, ROOT_TOL)
            }
            .ok_or_else(bracket_fail)?;
            let (l0, l1, l2, l3) = if case == BlowupCase::Buc1 {
                ("theta0", "theta1", "theta2", "theta3")
            } else {
                ("theta0^2", "theta1^2", "theta2^2", "theta3^2")
            };
            let mut v = vec![(0.0, l0), (t1, l1), (PI, l2), (t3, l3)];
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            Ok(v)
        }
    }
}

/// Equilibria on the blow-up circle, ordered by angle, with their local type.
pub fn circle_equilibria(p: &Params, case: BlowupCase) -> Result<Vec<CircleEquilibrium>> {
    check_case(p, case)?;
    circle_angles(p, case)?
        .into_iter()
        .map(|(theta, label)| {
            let jac = jacobian_at(p, case, theta);
            Ok(CircleEquilibrium {
                theta,
                label,
                radial: jac.radial,
                angular: jac.angular,
                kind: jac.kind,
            })
        })
        .collect()
}

/// Finite-difference Jacobian of the blow-up field at `(0, θ)`.
pub fn circle_jacobian(
    p: &Params,
    case: BlowupCase,
    ce: &CircleEquilibrium,
) -> Result<CircleJacobian> {
    check_case(p, case)?;
    let res = circle_equation(p, case, ce.theta).abs();
    if res > 1e-10 {
        return Err(Error::NotEquilibrium(format!(
            "theta = {} is not on the circle of equilibria (residual {res:e})",
            ce.theta
        )));
    }
    Ok(jacobian_at(p, case, ce.theta))
}

fn jacobian_at(p: &Params, case: BlowupCase, theta: f64) -> CircleJacobian {
    let h = 1e-5;
    let fr_p = blowup_rhs(p, case, h, theta);
    let fr_m = blowup_rhs(p, case, -h, theta);
    let ft_p = blowup_rhs(p, case, 0.0, theta + h);
    let ft_m = blowup_rhs(p, case, 0.0, theta - h);
    let matrix = [
        [(fr_p[0] - fr_m[0]) / (2.0 * h), (ft_p[0] - ft_m[0]) / (2.0 * h)],
        [(fr_p[1] - fr_m[1]) / (2.0 * h), (ft_p[1] - ft_m[1]) / (2.0 * h)],
    ];
    // dr/dt vanishes on r = 0, so the matrix is lower triangular there.
    let radial = matrix[0][0];
    let angular = matrix[1][1];
    let kind = if radial * angular < 0.0 {
        CircleKind::Saddle
    } else if radial < 0.0 {
        CircleKind::StableNodeOrFocus
    } else {
        CircleKind::UnstableNodeOrFocus
    };
    CircleJacobian {
        matrix,
        radial,
        angular,
        kind,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub label: &'static str,
    pub sectors: Vec<Sector>,
}

/// Sector inventory of the degenerate infinite points on the U2/V2 charts.
pub fn sector_structure(p: &Params) -> Vec<SectorSummary> {
    infinite_equilibria(p)
        .into_iter()
        .filter_map(|e| match (&e.kind, e.location) {
            (EquilibriumKind::Sectors(s), Location::Chart(cp)) if !cp.chart.is_x_chart() => {
                Some(SectorSummary {
                    label: e.label,
                    sectors: s.clone(),
                })
            }
            _ => None,
        })
        .collect()
}
