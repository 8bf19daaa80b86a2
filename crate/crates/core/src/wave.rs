//! The traveling wave as the heteroclinic orbit from `E1 = (1, 0)` to the
//! origin, for `c >= 2`.

use serde::Serialize;

use crate::equilibria::{eigen_data, finite_equilibrium};
use crate::error::{Error, Result};
use crate::field::{field_xy, ipow, Params, PhasePoint};
use crate::flow::{integrate, Direction, IntegratorControls, Termination};
use crate::ode::hermite;
use crate::portrait::{seed_manifold, Branch, Side, Stability, DEFAULT_SEED_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveControls {
    /// Distance of the seed from `E1` along the unstable eigenvector.
    pub eps: f64,
    pub integrator: IntegratorControls,
}

impl Default for WaveControls {
    fn default() -> Self {
        Self {
            eps: DEFAULT_SEED_EPS,
            // Fine sampling keeps the spline residual check meaningful.
            integrator: IntegratorControls {
                max_step: 0.005,
                ..IntegratorControls::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveProfile {
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub speed: f64,
    pub params: Params,
}

/// Follows the unstable branch of `E1` into `0 < x < 1` until the origin
/// captures it, and normalises the phase so that `phi(0) = 1/2`.
pub fn shoot_heteroclinic(p: &Params, ctl: &WaveControls) -> Result<WaveProfile> {
    if p.c() < 2.0 {
        return Err(Error::Precondition(format!(
            "a monotone wave needs c >= 2, got c = {}",
            p.c()
        )));
    }
    let e1 = finite_equilibrium(p, "E1").expect("E1 always exists");
    let branch = Branch {
        stability: Stability::Unstable,
        side: Side::Minus,
    };
    let seed = seed_manifold(p, &e1, branch, ctl.eps)?;
    let t = integrate(p, seed, Direction::Forward, &ctl.integrator)?;
    if t.termination != (Termination::Captured { label: "E0" }) {
        return Err(Error::Numerical(format!(
            "unstable branch of E1 ended with {:?} instead of reaching E0",
            t.termination
        )));
    }
    let mut wp = WaveProfile {
        xi: t.samples.iter().map(|q| q.s).collect(),
        phi: t.samples.iter().map(|q| q.x).collect(),
        dphi: t.samples.iter().map(|q| q.y).collect(),
        speed: p.c(),
        params: *p,
    };
    let xi0 = wp.crossing(0.5)?;
    for x in &mut wp.xi {
        *x -= xi0;
    }
    Ok(wp)
}

impl WaveProfile {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    fn second(&self, i: usize) -> f64 {
        field_xy(&self.params, self.phi[i], self.dphi[i])[1]
    }

    /// `xi` at which the profile crosses `level`, by Hermite interpolation.
    pub fn crossing(&self, level: f64) -> Result<f64> {
        let i = (0..self.len().saturating_sub(1))
            .find(|&i| (self.phi[i] - level) * (self.phi[i + 1] - level) <= 0.0)
            .ok_or_else(|| Error::Numerical(format!("profile never crosses {level}")))?;
        let h = self.xi[i + 1] - self.xi[i];
        let g = |t: f64| {
            hermite(self.phi[i], self.dphi[i], self.phi[i + 1], self.dphi[i + 1], h, t) - level
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        let up = g(0.0) < 0.0;
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if (g(m) < 0.0) == up {
                lo = m;
            } else {
                hi = m;
            }
        }
        Ok(self.xi[i] + 0.5 * (lo + hi) * h)
    }

    /// `(phi, phi')` at `xi` by Hermite interpolation, `None` outside the grid.
    pub fn eval(&self, xi: f64) -> Option<(f64, f64)> {
        let n = self.len();
        if n < 2 || xi < self.xi[0] || xi > self.xi[n - 1] {
            return None;
        }
        let i = self.xi.partition_point(|&x| x <= xi).clamp(1, n - 1) - 1;
        let h = self.xi[i + 1] - self.xi[i];
        let t = (xi - self.xi[i]) / h;
        let (a, b) = (i, i + 1);
        let phi = hermite(self.phi[a], self.dphi[a], self.phi[b], self.dphi[b], h, t);
        let dphi = hermite(self.dphi[a], self.second(a), self.dphi[b], self.second(b), h, t);
        Some((phi, dphi))
    }

    /// Extends the profile to cover `[xi_min, xi_max]` with the linearised
    /// tails: `E1` departs along the unstable eigenvector and the origin is
    /// approached along the eigenvector of the slow eigenvalue.
    pub fn extend_tails(&mut self, xi_min: f64, xi_max: f64, step: f64) -> Result<()> {
        if self.len() < 2 || !(step > 0.0) {
            return Err(Error::Precondition("tail extension needs a sampled profile".into()));
        }
        let p = self.params;
        let e1 = finite_equilibrium(&p, "E1").expect("E1 always exists");
        let mu = eigen_data(&p, &e1)?.values[1].re;
        let e0 = finite_equilibrium(&p, "E0").expect("E0 always exists");
        let lam = eigen_data(&p, &e0)?.values[1].re;

        let (x0, d0) = (self.xi[0], 1.0 - self.phi[0]);
        let mut left = Vec::new();
        let mut x = x0 - step;
        while x >= xi_min {
            let a = d0 * (mu * (x - x0)).exp();
            left.push((x, 1.0 - a, -mu * a));
            x -= step;
        }
        // Land exactly on the requested end.
        if xi_min < x0 && left.last().map_or(true, |l| l.0 > xi_min) {
            let a = d0 * (mu * (xi_min - x0)).exp();
            left.push((xi_min, 1.0 - a, -mu * a));
        }
        left.reverse();

        let n = self.len() - 1;
        let (x1, a1) = (self.xi[n], self.phi[n]);
        let mut right = Vec::new();
        let mut x = x1 + step;
        while x <= xi_max {
            let a = a1 * (lam * (x - x1)).exp();
            right.push((x, a, lam * a));
            x += step;
        }
        if xi_max > x1 && right.last().map_or(true, |r| r.0 < xi_max) {
            let a = a1 * (lam * (xi_max - x1)).exp();
            right.push((xi_max, a, lam * a));
        }

        let mut xi = Vec::with_capacity(left.len() + self.len() + right.len());
        let mut phi = Vec::with_capacity(xi.capacity());
        let mut dphi = Vec::with_capacity(xi.capacity());
        for &(a, b, c) in &left {
            xi.push(a);
            phi.push(b);
            dphi.push(c);
        }
        xi.extend_from_slice(&self.xi);
        phi.extend_from_slice(&self.phi);
        dphi.extend_from_slice(&self.dphi);
        for &(a, b, c) in &right {
            xi.push(a);
            phi.push(b);
            dphi.push(c);
        }
        self.xi = xi;
        self.phi = phi;
        self.dphi = dphi;
        Ok(())
    }

    /// Restricts the profile to samples with `xi` in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> WaveProfile {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.xi[i] >= lo && self.xi[i] <= hi).collect();
        WaveProfile {
            xi: keep.iter().map(|&i| self.xi[i]).collect(),
            phi: keep.iter().map(|&i| self.phi[i]).collect(),
            dphi: keep.iter().map(|&i| self.dphi[i]).collect(),
            speed: self.speed,
            params: self.params,
        }
    }

    pub fn points(&self) -> Vec<PhasePoint> {
        (0..self.len())
            .map(|i| PhasePoint::at(self.phi[i], self.dphi[i], self.xi[i]))
            .collect()
    }

    /// Columnar `xi,phi,dphi` text with a header row and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi,phi,dphi\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.xi[i], self.phi[i], self.dphi[i]
            ));
        }
        out
    }
}

/// Second derivatives of the cubic spline through `(x, y)`, clamped to the
/// end slopes `d0`, `dn`. Requires strictly increasing `x`.
pub fn spline_moments(x: &[f64], y: &[f64], d0: f64, dn: f64) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let slope = |i: usize| (y[i + 1] - y[i]) / h[i];
    // Tridiagonal system a M[i-1] + b M[i] + c M[i+1] = r.
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut c = vec![0.0; n];
    let mut r = vec![0.0; n];
    b[0] = h[0] / 3.0;
    c[0] = h[0] / 6.0;
    r[0] = slope(0) - d0;
    for i in 1..n - 1 {
        a[i] = h[i - 1] / 6.0;
        b[i] = (h[i - 1] + h[i]) / 3.0;
        c[i] = h[i] / 6.0;
        r[i] = slope(i) - slope(i - 1);
    }
    a[n - 1] = h[n - 2] / 6.0;
    b[n - 1] = h[n - 2] / 3.0;
    r[n - 1] = dn - slope(n - 2);
    // Thomas algorithm; the matrix is diagonally dominant.
    for i in 1..n {
        let w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        r[i] -= w * r[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = r[n - 1] / b[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
    }
    m
}

/// Maximum over the grid of `|phi'' + c phi' - phi^k phi' + phi (1 - phi^n)|`
/// with `phi'` and `phi''` taken from a clamped cubic spline of `phi`.
pub fn wave_residual(wp: &WaveProfile) -> f64 {
    let n = wp.len();
    if n < 2 {
        return 0.0;
    }
    let p = &wp.params;
    let m = spline_moments(&wp.xi, &wp.phi, wp.dphi[0], wp.dphi[n - 1]);
    (0..n)
        .map(|i| {
            let d = if i + 1 < n {
                let h = wp.xi[i + 1] - wp.xi[i];
                (wp.phi[i + 1] - wp.phi[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0
            } else {
                let h = wp.xi[i] - wp.xi[i - 1];
                (wp.phi[i] - wp.phi[i - 1]) / h + h * (m[i - 1] + 2.0 * m[i]) / 6.0
            };
            let f = wp.phi[i];
            (m[i] + wp.speed * d - ipow(f, p.k()) * d + f * (1.0 - ipow(f, p.n()))).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub checks: Vec<Check>,
}

impl AsymptoticsReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks the limits at both ends, boundedness, monotonicity and the
/// directions of departure from `E1` and approach to the origin.
pub fn verify_asymptotics(wp: &WaveProfile, tol: f64) -> AsymptoticsReport {
    let n = wp.len();
    let mut checks = Vec::new();
    let mut push = |name, value: f64, tol: f64, passed: bool| {
        checks.push(Check {
            name,
            passed,
            value,
            tol,
        })
    };
    if n < 2 {
        push("samples", n as f64, 2.0, false);
        return AsymptoticsReport { checks };
    }
    let (f0, fl) = (wp.phi[0], wp.phi[n - 1]);
    let (d0, dl) = (wp.dphi[0], wp.dphi[n - 1]);
    push("phi-left-limit", (f0 - 1.0).abs(), tol, (f0 - 1.0).abs() < tol);
    push("phi-right-limit", fl.abs(), tol, fl.abs() < tol);
    push("dphi-left-limit", d0.abs(), tol, d0.abs() < tol);
    push("dphi-right-limit", dl.abs(), tol, dl.abs() < tol);

    let interior = 1..n - 1;
    let worst_bound = interior
        .clone()
        .map(|i| (-wp.phi[i]).max(wp.phi[i] - 1.0))
        .fold(f64::NEG_INFINITY, f64::max);
    push("bounded", worst_bound, 0.0, interior.clone().all(|i| wp.phi[i] > 0.0 && wp.phi[i] < 1.0));
    let worst_step = wp
        .phi
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    push("decreasing", worst_step, 0.0, worst_step < 0.0);
    let worst_slope = interior.clone().map(|i| wp.dphi[i]).fold(f64::NEG_INFINITY, f64::max);
    push("dphi-negative", worst_slope, 0.0, worst_slope < 0.0);

    let depart = d0 / (f0 - 1.0);
    push("departure-slope-positive", depart, 0.0, depart > 0.0);
    let approach = dl / fl;
    push("approach-slope-negative", approach, 0.0, approach < 0.0);
    let c = wp.speed;
    if c > 2.0 {
        let slow = (-c + (c * c - 4.0).sqrt()) / 2.0;
        let rel = ((approach - slow) / slow).abs();
        push("approach-slope-slow-eigendirection", rel, 0.1, rel < 0.1);
    }
    AsymptoticsReport { checks }
}

/// Largest pointwise gap between two normalised profiles over the `xi`
/// range they share.
pub fn profile_distance(a: &WaveProfile, b: &WaveProfile) -> f64 {
    a.xi
        .iter()
        .zip(&a.phi)
        .filter_map(|(&x, &f)| b.eval(x).map(|(g, _)| (f - g).abs()))
        .fold(0.0, f64::max)
}
