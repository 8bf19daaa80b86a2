//! Trajectories of the planar field, their continuation through the charts
//! at infinity, limit-set identification and a bounded cycle search.
//!
//! Chart legs follow the chart systems in arc length: the field is
//! normalised, which keeps orientation and avoids the crawl near `v = 0`.
//! Past the finite frame `s` is therefore arc length, not the wave variable.

use serde::{Deserialize, Serialize};

use crate::compact::{
    chart_field_uv, chart_of_finite, from_finite, infinite_equilibria, to_disk, ChartId,
    ChartPoint, DiskPoint,
};
use crate::equilibria::{finite_equilibria, Equilibrium, Location};
use crate::error::{Error, Result};
use crate::field::{field_xy, Params, PhasePoint};
use crate::ode::{hermite, Dopri5, Vec2};
use crate::par::{par_map, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step, hence on the spacing of samples in `s`.
    pub max_step: f64,
    /// Capture ball around finite equilibria.
    pub capture_radius: f64,
    /// `|(x, y)|` beyond which the finite leg ends; chart legs hand back to
    /// the finite frame below half of it.
    pub escape_radius: f64,
    pub max_s: f64,
    /// Capture ball around infinite equilibria, in chart coordinates.
    pub infinity_capture_radius: f64,
    /// Accepted steps per leg before giving up with `MaxTime`.
    pub max_steps: usize,
}

impl Default for IntegratorControls {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.5,
            capture_radius: 1e-8,
            escape_radius: 1e6,
            max_s: 1e4,
            infinity_capture_radius: 0.15,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorControls {
    /// Controls for separatrix tracing: hand off to the charts at radius 10,
    /// before the finite field gets stiff along the escape directions.
    pub fn separatrix() -> Self {
        Self {
            escape_radius: 10.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("capture_radius", self.capture_radius),
            ("escape_radius", self.escape_radius),
            ("max_s", self.max_s),
            ("infinity_capture_radius", self.infinity_capture_radius),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be positive".into()));
        }
        Ok(())
    }

    fn stepper(&self) -> Dopri5 {
        Dopri5::new(self.rel_tol, self.abs_tol, self.max_step)
    }
}

/// Where a finite leg left the escape ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartExit {
    pub s: f64,
    pub point: ChartPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    Captured { label: &'static str },
    Escaped(ChartExit),
    MaxTime,
    StepFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<PhasePoint>,
    pub direction: Direction,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitSet {
    Equilibrium(&'static str),
    Inconclusive,
}

impl LimitSet {
    pub fn label(&self) -> Option<&'static str> {
        match self {
            LimitSet::Equilibrium(l) => Some(l),
            LimitSet::Inconclusive => None,
        }
    }
}

#[inline]
fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Integrates the planar field from `start` until capture, escape, the time
/// budget, or step-size underflow.
pub fn integrate(
    p: &Params,
    start: PhasePoint,
    dir: Direction,
    ctl: &IntegratorControls,
) -> Result<Trajectory> {
    ctl.validate()?;
    if !start.is_finite() {
        return Err(Error::Domain(format!("start point {start:?} is not finite")));
    }
    let eqs = finite_equilibria(p);
    Ok(finite_leg(p, &eqs, start, dir, ctl, start.s + dir.sign() * ctl.max_s))
}

fn finite_leg(
    p: &Params,
    eqs: &[Equilibrium],
    start: PhasePoint,
    dir: Direction,
    ctl: &IntegratorControls,
    s_end: f64,
) -> Trajectory {
    let sign = dir.sign();
    let f = |y: Vec2| {
        let v = field_xy(p, y[0], y[1]);
        [sign * v[0], sign * v[1]]
    };
    let points: Vec<(PhasePoint, &'static str)> = eqs
        .iter()
        .filter_map(|e| e.finite_point().map(|q| (q, e.label)))
        .collect();
    let mut samples = vec![start];
    let done = |samples: Vec<PhasePoint>, termination| Trajectory {
        samples,
        direction: dir,
        termination,
    };

    for &(q, label) in &points {
        if q.x == start.x && q.y == start.y {
            return done(samples, Termination::Captured { label });
        }
    }

    let st = ctl.stepper();
    let mut y = [start.x, start.y];
    let mut k = f(y);
    let mut s = start.s;
    let mut h = st.initial_step(y, k);
    loop {
        let pt = PhasePoint::at(y[0], y[1], s);
        for &(q, label) in &points {
            let d = pt.dist(&q);
            if d < ctl.capture_radius && (d == 0.0 || dot(k, [q.x - y[0], q.y - y[1]]) > 0.0) {
                return done(samples, Termination::Captured { label });
            }
        }
        if pt.norm() > ctl.escape_radius {
            let exit = ChartExit {
                s,
                point: chart_of_finite(&pt),
            };
            return done(samples, Termination::Escaped(exit));
        }
        let remaining = (s_end - s) * sign;
        if remaining <= 0.0 || samples.len() > ctl.max_steps {
            return done(samples, Termination::MaxTime);
        }
        let Some(a) = st.step(&f, y, k, h.min(remaining)) else {
            return done(samples, Termination::StepFailure);
        };
        s += sign * a.h;
        y = a.y;
        k = a.f;
        h = a.h_next;
        samples.push(PhasePoint::at(y[0], y[1], s));
    }
}

enum ChartEnd {
    Captured(&'static str),
    Reentered(PhasePoint),
    MaxTime,
    StepFailure,
}

fn antipodal(chart: ChartId) -> ChartId {
    match chart {
        ChartId::U1 => ChartId::V1,
        ChartId::V1 => ChartId::U1,
        ChartId::U2 => ChartId::V2,
        ChartId::V2 => ChartId::U2,
    }
}

fn dominant_chart(cp: &ChartPoint) -> ChartPoint {
    let [x, y, _] = cp.homogeneous();
    let target = if x.abs() >= y.abs() {
        if x > 0.0 {
            ChartId::U1
        } else {
            ChartId::V1
        }
    } else if y > 0.0 {
        ChartId::U2
    } else {
        ChartId::V2
    };
    cp.convert(target).unwrap_or(*cp)
}

fn chart_leg(
    p: &Params,
    infs: &[Equilibrium],
    start: ChartPoint,
    s0: f64,
    dir: Direction,
    ctl: &IntegratorControls,
    s_end: f64,
    disk: &mut Vec<DiskPoint>,
) -> (ChartEnd, f64) {
    let sign = dir.sign();
    let st = ctl.stepper();
    let mut cp = dominant_chart(&start);
    let mut s = s0;
    let mut fresh = true;
    let mut y = [cp.u, cp.v];
    let mut k = [0.0; 2];
    let mut h = 0.0;
    let mut steps = 0usize;
    loop {
        let chart = cp.chart;
        // Arc-length parametrisation: the chart systems crawl near v = 0.
        let f = |w: Vec2| {
            let v = chart_field_uv(p, chart, w[0], w[1]);
            let n = sign / v[0].hypot(v[1]).max(f64::MIN_POSITIVE);
            [n * v[0], n * v[1]]
        };
        if fresh {
            y = [cp.u, cp.v];
            k = f(y);
            h = st.initial_step(y, k);
            fresh = false;
        }
        for e in infs {
            let Location::Chart(ep) = e.location else { continue };
            let Some(ep) = ep.convert(chart) else { continue };
            let d = (y[0] - ep.u).hypot(y[1] - ep.v);
            if d < ctl.infinity_capture_radius
                && (d == 0.0 || dot(k, [ep.u - y[0], ep.v - y[1]]) > 0.0)
            {
                return (ChartEnd::Captured(e.label), s);
            }
        }
        if cp.v > 0.0 {
            let [hx, hy, hz] = cp.homogeneous();
            if hx.hypot(hy) / hz < 0.5 * ctl.escape_radius {
                let q = cp.to_finite().expect("v > 0");
                return (ChartEnd::Reentered(PhasePoint::at(q.x, q.y, s)), s);
            }
        }
        let remaining = (s_end - s) * sign;
        if remaining <= 0.0 || steps > ctl.max_steps {
            return (ChartEnd::MaxTime, s);
        }
        steps += 1;
        let Some(a) = st.step(&f, y, k, h.min(remaining)) else {
            return (ChartEnd::StepFailure, s);
        };
        s += sign * a.h;
        y = a.y;
        k = a.f;
        h = a.h_next;
        cp = ChartPoint::new(chart, y[0], y[1]);
        if cp.v < 0.0 {
            // Rounding pushed the point across the circle at infinity.
            cp = ChartPoint::new(antipodal(chart), cp.u, -cp.v);
            fresh = true;
        }
        disk.push(to_disk(&cp));
        if cp.u.abs() > 2.0 {
            cp = dominant_chart(&cp);
            fresh = true;
        }
    }
}

/// A trajectory followed through the charts until it reaches a limit set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    /// The first finite leg.
    pub trajectory: Trajectory,
    /// The whole path in disk coordinates.
    pub path: Vec<DiskPoint>,
    pub limit: LimitSet,
}

const MAX_LEGS: usize = 64;

/// Follows `start` in `dir` through finite and chart legs up to a limit set.
pub fn follow(
    p: &Params,
    start: PhasePoint,
    dir: Direction,
    ctl: &IntegratorControls,
) -> Result<Orbit> {
    let trajectory = integrate(p, start, dir, ctl)?;
    let mut path: Vec<DiskPoint> = trajectory.samples.iter().map(from_finite).collect();
    let s_end = start.s + dir.sign() * ctl.max_s;
    let limit = continue_from(p, &trajectory, ctl, s_end, &mut path);
    Ok(Orbit {
        trajectory,
        path,
        limit,
    })
}

fn continue_from(
    p: &Params,
    t: &Trajectory,
    ctl: &IntegratorControls,
    s_end: f64,
    path: &mut Vec<DiskPoint>,
) -> LimitSet {
    let eqs = finite_equilibria(p);
    let infs = infinite_equilibria(p);
    let dir = t.direction;
    let mut term = t.termination.clone();
    for _ in 0..MAX_LEGS {
        let exit = match term {
            Termination::Captured { label } => return LimitSet::Equilibrium(label),
            Termination::MaxTime | Termination::StepFailure => return LimitSet::Inconclusive,
            Termination::Escaped(exit) => exit,
        };
        let (end, _) = chart_leg(p, &infs, exit.point, exit.s, dir, ctl, s_end, path);
        match end {
            ChartEnd::Captured(label) => return LimitSet::Equilibrium(label),
            ChartEnd::MaxTime | ChartEnd::StepFailure => return LimitSet::Inconclusive,
            ChartEnd::Reentered(q) => {
                let leg = finite_leg(p, &eqs, q, dir, ctl, s_end);
                path.extend(leg.samples.iter().map(from_finite));
                term = leg.termination;
            }
        }
    }
    LimitSet::Inconclusive
}

/// Limit set reached by `t`, continuing escaped trajectories through the
/// charts with default controls.
pub fn limit_set(p: &Params, t: &Trajectory) -> LimitSet {
    limit_set_with(p, t, &IntegratorControls::default())
}

pub fn limit_set_with(p: &Params, t: &Trajectory, ctl: &IntegratorControls) -> LimitSet {
    let s_end = t.samples[0].s + t.direction.sign() * ctl.max_s;
    let mut scratch = Vec::new();
    continue_from(p, t, ctl, s_end, &mut scratch)
}

/// Axis-aligned seed window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self {
            x_min: -1.5,
            x_max: 1.5,
            y_min: -1.5,
            y_max: 1.5,
        }
    }
}

impl Window {
    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0) * (self.y_max - self.y_min).max(0.0)
    }

    /// `n × n` cell-centred grid, row by row from the bottom.
    pub fn grid(&self, n: usize) -> Vec<PhasePoint> {
        let dx = (self.x_max - self.x_min) / n as f64;
        let dy = (self.y_max - self.y_min) / n as f64;
        (0..n * n)
            .map(|i| {
                let (r, c) = (i / n, i % n);
                PhasePoint::new(
                    self.x_min + (c as f64 + 0.5) * dx,
                    self.y_min + (r as f64 + 0.5) * dy,
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleBudget {
    /// Seeds per side of the grid.
    pub grid: usize,
    pub max_s: f64,
    /// Section returns examined per seed and direction.
    pub max_returns: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for CycleBudget {
    fn default() -> Self {
        Self {
            grid: 20,
            max_s: 200.0,
            max_returns: 60,
            exec: Execution::available(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum CycleEvidence {
    /// Two consecutive returns to the section closer than the tolerance.
    Witness {
        seed: PhasePoint,
        direction: Direction,
        x: f64,
        distance: f64,
    },
    Exhausted { seeds: usize },
}

/// Relative return-map distance below which a return counts as closing.
const RETURN_TOL: f64 = 1e-3;
/// Returns closer to the origin than this are ignored (focus spirals).
const MIN_RETURN_X: f64 = 1e-3;

/// Downward crossings of `y = 0` with `0 < x < 1`, located by Hermite
/// interpolation between samples.
pub fn section_returns(p: &Params, t: &Trajectory) -> Vec<f64> {
    let sign = t.direction.sign();
    let mut out = Vec::new();
    for w in t.samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Crossing in forward time is downward; backward flips the order.
        let (hi, lo) = if sign > 0.0 { (a, b) } else { (b, a) };
        if !(hi.y > 0.0 && lo.y <= 0.0) {
            continue;
        }
        let h = (b.s - a.s).abs();
        let fa = field_xy(p, a.x, a.y);
        let fb = field_xy(p, b.x, b.y);
        let (da, db) = ([sign * fa[0], sign * fa[1]], [sign * fb[0], sign * fb[1]]);
        let yi = |t: f64| hermite(a.y, da[1], b.y, db[1], h, t);
        let (mut l, mut r) = (0.0, 1.0);
        for _ in 0..60 {
            let m = 0.5 * (l + r);
            if (yi(m) > 0.0) == (a.y > 0.0) {
                l = m;
            } else {
                r = m;
            }
        }
        let x = hermite(a.x, da[0], b.x, db[0], h, 0.5 * (l + r));
        if x > 0.0 && x < 1.0 {
            out.push(x);
        }
    }
    out
}

fn witness_in(xs: &[f64]) -> Option<(f64, f64)> {
    xs.windows(2).find_map(|w| {
        let d = (w[1] - w[0]).abs();
        (w[0] > MIN_RETURN_X && d < RETURN_TOL * w[0]).then_some((w[1], d))
    })
}

/// Bounded numerical search for closed orbits crossing `y = 0, 0 < x < 1`.
pub fn cycle_search(p: &Params, window: &Window, budget: &CycleBudget) -> CycleEvidence {
    if window.area() == 0.0 || budget.grid == 0 {
        return CycleEvidence::Exhausted { seeds: 0 };
    }
    let seeds = window.grid(budget.grid);
    let ctl = IntegratorControls {
        max_step: 0.05,
        // Returns to the section come from orbits that stay near the window;
        // the cap bounds stiff escapes along the slow manifold.
        escape_radius: 10.0,
        max_steps: 200_000,
        max_s: budget.max_s,
        ..IntegratorControls::default()
    };
    let found = par_map(budget.exec, &seeds, |&seed| {
        for dir in [Direction::Forward, Direction::Backward] {
            let Ok(t) = integrate(p, seed, dir, &ctl) else { continue };
            let xs = section_returns(p, &t);
            let xs = &xs[..xs.len().min(budget.max_returns)];
            if let Some((x, distance)) = witness_in(xs) {
                return Some(CycleEvidence::Witness {
                    seed,
                    direction: dir,
                    x,
                    distance,
                });
            }
        }
        None
    });
    found
        .into_iter()
        .flatten()
        .next()
        .unwrap_or(CycleEvidence::Exhausted { seeds: seeds.len() })
}
