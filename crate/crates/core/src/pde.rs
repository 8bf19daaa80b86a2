//! Method-of-lines solver for `w_t = w_zz - w^k w_z + w (1 - w^n)` on
//! `[-L, L]`, used to check that the wave profile travels rigidly at speed `c`.
//!
//! Space: central second differences for diffusion, upwind first differences
//! for advection. Time: Heun's method. Both boundary values are pinned.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ipow, Params};
use crate::wave::WaveProfile;

/// Explicit diffusion stability limit, `dt <= DIFFUSION_CFL * dz^2`.
pub const DIFFUSION_CFL: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Upwind advection, central diffusion, Heun in time.
    #[default]
    UpwindHeun,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeConfig {
    /// Half-width `L` of the domain.
    pub half_width: f64,
    /// Number of grid points, endpoints included.
    pub points: usize,
    pub final_time: f64,
    /// Time step; `None` picks the largest stable step that divides `final_time`.
    pub dt: Option<f64>,
    pub scheme: Scheme,
    /// Keep every `stride`-th state as a snapshot; `None` keeps none.
    pub snapshot_stride: Option<usize>,
}

impl Default for PdeConfig {
    fn default() -> Self {
        Self {
            half_width: 60.0,
            points: 4096,
            final_time: 10.0,
            dt: None,
            scheme: Scheme::UpwindHeun,
            snapshot_stride: None,
        }
    }
}

impl PdeConfig {
    pub fn dz(&self) -> f64 {
        2.0 * self.half_width / (self.points as f64 - 1.0)
    }

    /// Validated `(dt, steps)` with `steps * dt = final_time`.
    pub fn schedule(&self) -> Result<(f64, usize)> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::Config(format!("half-width must be positive, got {}", self.half_width)));
        }
        if self.points < 5 {
            return Err(Error::Config(format!("need at least 5 grid points, got {}", self.points)));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return Err(Error::Config(format!("final time must be positive, got {}", self.final_time)));
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::Config("snapshot stride must be positive".into()));
        }
        let limit = DIFFUSION_CFL * self.dz() * self.dz();
        let dt = self.dt.unwrap_or(limit);
        check_cfl(dt, self.dz())?;
        let steps = (self.final_time / dt).ceil() as usize;
        Ok((self.final_time / steps as f64, steps))
    }
}

fn check_cfl(dt: f64, dz: f64) -> Result<()> {
    let limit = DIFFUSION_CFL * dz * dz;
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "time step {dt:e} violates dt <= {DIFFUSION_CFL} dz^2 = {limit:e}"
        )));
    }
    Ok(())
}

/// Field values on the uniform grid `z_i = -L + i dz`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeState {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
}

impl PdeState {
    /// Samples `f` on `points` uniform nodes over `[-half_width, half_width]`.
    pub fn sample(half_width: f64, points: usize, f: impl Fn(f64) -> f64) -> Self {
        let dz = 2.0 * half_width / (points as f64 - 1.0);
        let z: Vec<f64> = (0..points).map(|i| -half_width + i as f64 * dz).collect();
        let w = z.iter().map(|&z| f(z)).collect();
        Self { z, w, t: 0.0 }
    }

    /// The wave profile placed with `phi(0) = 1/2` at `z = z0`, tails
    /// extended over the whole domain and boundaries pinned to 1 and 0.
    pub fn from_profile(wp: &WaveProfile, cfg: &PdeConfig, z0: f64) -> Result<Self> {
        let l = cfg.half_width;
        let mut wp = wp.clone();
        wp.extend_tails(-l - z0 - 1.0, l - z0 + 1.0, 0.01)?;
        let mut st = Self::sample(l, cfg.points, |z| {
            wp.eval(z - z0).map_or(f64::NAN, |(f, _)| f)
        });
        if st.w.iter().any(|w| !w.is_finite()) {
            return Err(Error::Numerical("profile does not cover the domain".into()));
        }
        let last = st.w.len() - 1;
        st.w[0] = 1.0;
        st.w[last] = 0.0;
        Ok(st)
    }

    pub fn dz(&self) -> f64 {
        self.z[1] - self.z[0]
    }

    /// Linear interpolation of `w` at `z`, `None` outside the grid.
    pub fn interpolate(&self, z: f64) -> Option<f64> {
        let n = self.z.len();
        if z < self.z[0] || z > self.z[n - 1] {
            return None;
        }
        let s = (z - self.z[0]) / self.dz();
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        Some(self.w[i] * (1.0 - t) + self.w[i + 1] * t)
    }
}

/// Semi-discrete right-hand side at interior nodes; boundary entries are 0.
fn rhs(p: &Params, w: &[f64], dz: f64, out: &mut [f64]) {
    let n = w.len();
    let (k, m) = (p.k(), p.n());
    let inv2 = 1.0 / (dz * dz);
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for i in 1..n - 1 {
        let diff = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv2;
        let a = ipow(w[i], k);
        // Upwind side follows the sign of the advection velocity w^k.
        let wz = if a >= 0.0 {
            (w[i] - w[i - 1]) / dz
        } else {
            (w[i + 1] - w[i]) / dz
        };
        out[i] = diff - a * wz + w[i] * (1.0 - ipow(w[i], m));
    }
}

/// Reusable buffers for `step_with`.
#[derive(Debug, Default)]
pub struct Workspace {
    f0: Vec<f64>,
    f1: Vec<f64>,
    stage: Vec<f64>,
}

/// Advances `st` by one Heun step of size `dt`.
pub fn step(p: &Params, st: &PdeState, dt: f64) -> Result<PdeState> {
    let mut next = st.clone();
    step_with(p, &mut next, dt, &mut Workspace::default())?;
    Ok(next)
}

/// In-place variant of [`step`].
pub fn step_with(p: &Params, st: &mut PdeState, dt: f64, ws: &mut Workspace) -> Result<()> {
    let n = st.w.len();
    if n < 3 {
        return Err(Error::Config("grid needs at least 3 points".into()));
    }
    let dz = st.dz();
    check_cfl(dt, dz)?;
    ws.f0.resize(n, 0.0);
    ws.f1.resize(n, 0.0);
    ws.stage.resize(n, 0.0);
    rhs(p, &st.w, dz, &mut ws.f0);
    for i in 0..n {
        ws.stage[i] = st.w[i] + dt * ws.f0[i];
    }
    rhs(p, &ws.stage, dz, &mut ws.f1);
    for i in 0..n {
        st.w[i] += 0.5 * dt * (ws.f0[i] + ws.f1[i]);
    }
    st.t += dt;
    if st.w.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numerical(format!("non-finite field at t = {}", st.t)));
    }
    Ok(())
}

/// Position of the unique decreasing crossing of `level`, by linear
/// interpolation between the bracketing nodes.
pub fn front_position(st: &PdeState, level: f64) -> Result<f64> {
    let mut found = None;
    for i in 0..st.w.len() - 1 {
        let (a, b) = (st.w[i], st.w[i + 1]);
        if a > level && b <= level {
            if found.is_some() {
                return Err(Error::Numerical(format!(
                    "field crosses {level} downward more than once at t = {}",
                    st.t
                )));
            }
            let s = (a - level) / (a - b);
            found = Some(st.z[i] + s * (st.z[i + 1] - st.z[i]));
        }
    }
    found.ok_or_else(|| Error::Numerical(format!("field never crosses {level} downward at t = {}", st.t)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeRun {
    pub initial: PdeState,
    pub last: PdeState,
    /// Front positions over the second half of the run, as `(t, z)`.
    pub fronts: Vec<(f64, f64)>,
    pub w_min: f64,
    pub w_max: f64,
    pub steps: usize,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
}

/// Evolves `initial` to `cfg.final_time`, tracking the front at `level`
/// from half time onward.
pub fn evolve(p: &Params, initial: PdeState, cfg: &PdeConfig, level: f64) -> Result<PdeRun> {
    let (dt, steps) = cfg.schedule()?;
    let mut st = initial.clone();
    let mut ws = Workspace::default();
    let mut fronts = Vec::new();
    let mut snapshots = Vec::new();
    let (mut w_min, mut w_max) = extent(&st.w);
    let half = steps / 2;
    for i in 1..=steps {
        if let Some(stride) = cfg.snapshot_stride {
            if (i - 1) % stride == 0 {
                snapshots.push(Snapshot { t: st.t, w: st.w.clone() });
            }
        }
        step_with(p, &mut st, dt, &mut ws)?;
        let (lo, hi) = extent(&st.w);
        w_min = w_min.min(lo);
        w_max = w_max.max(hi);
        if i >= half {
            fronts.push((st.t, front_position(&st, level)?));
        }
    }
    if cfg.snapshot_stride.is_some() {
        snapshots.push(Snapshot { t: st.t, w: st.w.clone() });
    }
    Ok(PdeRun {
        initial,
        last: st,
        fronts,
        w_min,
        w_max,
        steps,
        snapshots,
    })
}

fn extent(w: &[f64]) -> (f64, f64) {
    w.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Least-squares slope of `(t, z)` pairs.
pub fn fit_slope(pts: &[(f64, f64)]) -> Result<f64> {
    if pts.len() < 2 {
        return Err(Error::Numerical("need two front positions to fit a speed".into()));
    }
    let n = pts.len() as f64;
    let (mt, mz) = pts.iter().fold((0.0, 0.0), |(a, b), &(t, z)| (a + t / n, b + z / n));
    let (num, den) = pts.iter().fold((0.0, 0.0), |(num, den), &(t, z)| {
        (num + (t - mt) * (z - mz), den + (t - mt) * (t - mt))
    });
    if den == 0.0 {
        return Err(Error::Numerical("front positions share one time".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedEstimate {
    pub speed: f64,
    /// `|speed - c| / c`.
    pub rel_error: f64,
    /// `max |w(z + speed T, T) - w(z, 0)|` away from the boundaries.
    pub drift: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub steps: usize,
}

/// Runs the profile through the solver from `z = -L/3` and measures how
/// fast and how rigidly it moves.
pub fn speed_estimate(p: &Params, wp: &WaveProfile, cfg: &PdeConfig) -> Result<SpeedEstimate> {
    let run = run_profile(p, wp, cfg)?;
    summarize(p, &run, cfg)
}

/// The raw run behind [`speed_estimate`].
pub fn run_profile(p: &Params, wp: &WaveProfile, cfg: &PdeConfig) -> Result<PdeRun> {
    if p.c() < 2.0 {
        return Err(Error::Precondition(format!("speed check needs c >= 2, got {}", p.c())));
    }
    cfg.schedule()?;
    let initial = PdeState::from_profile(wp, cfg, -cfg.half_width / 3.0)?;
    evolve(p, initial, cfg, 0.5)
}

pub fn summarize(p: &Params, run: &PdeRun, cfg: &PdeConfig) -> Result<SpeedEstimate> {
    let speed = fit_slope(&run.fronts)?;
    let shift = speed * run.last.t;
    // Keep clear of the pinned ends on both sides of the shifted window.
    let margin = cfg.half_width / 6.0;
    let lo = -cfg.half_width + margin;
    let hi = cfg.half_width - margin - shift.max(0.0);
    let drift = run
        .initial
        .z
        .iter()
        .zip(&run.initial.w)
        .filter(|(&z, _)| z >= lo && z <= hi)
        .filter_map(|(&z, &w0)| run.last.interpolate(z + shift).map(|w| (w - w0).abs()))
        .fold(0.0, f64::max);
    Ok(SpeedEstimate {
        speed,
        rel_error: (speed - p.c()).abs() / p.c(),
        drift,
        w_min: run.w_min,
        w_max: run.w_max,
        steps: run.steps,
    })
}

/// Columnar `t,z,w` text, one row per node per snapshot.
pub fn snapshots_csv(z: &[f64], snaps: &[Snapshot]) -> String {
    let mut out = String::from("t,z,w\n");
    for s in snaps {
        for (zi, wi) in z.iter().zip(&s.w) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", s.t, zi, wi));
        }
    }
    out
}
