//! Separatrix tracing and global phase-portrait classification.

use serde::Serialize;

use crate::compact::{from_finite, infinite_equilibria, to_disk, DiskPoint};
use crate::equilibria::{
    classify, eigen_data, finite_equilibria, Equilibrium, EquilibriumKind, Location, NODE_BAND,
};
use crate::error::{Error, Result};
use crate::field::{Params, PhasePoint};
use crate::flow::{follow, Direction, IntegratorControls, LimitSet, Trajectory, Window};
use crate::par::{par_map, Execution};
use crate::wave::{shoot_heteroclinic, WaveControls};

pub const DEFAULT_SEED_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

/// `Plus` is the half of the eigenline with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Branch {
    pub stability: Stability,
    pub side: Side,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch { stability: Stability::Unstable, side: Side::Plus },
        Branch { stability: Stability::Unstable, side: Side::Minus },
        Branch { stability: Stability::Stable, side: Side::Plus },
        Branch { stability: Stability::Stable, side: Side::Minus },
    ];

    /// Unstable branches are traced forward, stable ones backward.
    pub fn direction(&self) -> Direction {
        match self.stability {
            Stability::Unstable => Direction::Forward,
            Stability::Stable => Direction::Backward,
        }
    }
}

/// Point at distance `eps` from the saddle `e` along the requested branch.
pub fn seed_manifold(p: &Params, e: &Equilibrium, branch: Branch, eps: f64) -> Result<PhasePoint> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Precondition(format!("seeding offset must be positive, got {eps}")));
    }
    if classify(p, e)? != EquilibriumKind::Saddle {
        return Err(Error::Precondition(format!("{} is not a saddle", e.label)));
    }
    let ed = eigen_data(p, e)?;
    let vecs = ed
        .vectors
        .ok_or_else(|| Error::Precondition(format!("{} has complex eigenvalues", e.label)))?;
    // vectors[0] belongs to the negative eigenvalue.
    let v = match branch.stability {
        Stability::Stable => vecs[0],
        Stability::Unstable => vecs[1],
    };
    let norm = v[0].hypot(v[1]);
    let q = e.finite_point().expect("saddles are finite");
    let s = branch.side.sign() * eps / norm;
    Ok(PhasePoint::new(q.x + s * v[0], q.y + s * v[1]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separatrix {
    pub origin: &'static str,
    pub branch: Branch,
    #[serde(skip)]
    pub trajectory: Trajectory,
    /// Full path in disk coordinates, from the saddle outward.
    pub path: Vec<DiskPoint>,
    pub alpha: LimitSet,
    pub omega: LimitSet,
}

impl Separatrix {
    /// The limit set at the far end of the branch.
    pub fn far_end(&self) -> LimitSet {
        match self.branch.stability {
            Stability::Unstable => self.omega,
            Stability::Stable => self.alpha,
        }
    }
}

/// Traces all four branches of every finite saddle.
pub fn trace_separatrices(p: &Params, ctl: &IntegratorControls) -> Result<Vec<Separatrix>> {
    trace_separatrices_with(p, ctl, DEFAULT_SEED_EPS, Execution::available())
}

pub fn trace_separatrices_with(
    p: &Params,
    ctl: &IntegratorControls,
    eps: f64,
    exec: Execution,
) -> Result<Vec<Separatrix>> {
    ctl.validate()?;
    let jobs: Vec<(Equilibrium, Branch)> = finite_equilibria(p)
        .into_iter()
        .filter(|e| e.kind == EquilibriumKind::Saddle)
        .flat_map(|e| Branch::ALL.map(|b| (e.clone(), b)))
        .collect();
    par_map(exec, &jobs, |(e, b)| {
        let seed = seed_manifold(p, e, *b, eps)?;
        let orbit = follow(p, seed, b.direction(), ctl)?;
        let q = e.finite_point().expect("saddles are finite");
        let mut path = vec![from_finite(&q)];
        path.extend(orbit.path);
        let own = LimitSet::Equilibrium(e.label);
        let (alpha, omega) = match b.stability {
            Stability::Unstable => (own, orbit.limit),
            Stability::Stable => (orbit.limit, own),
        };
        Ok(Separatrix {
            origin: e.label,
            branch: *b,
            trajectory: orbit.trajectory,
            path,
            alpha,
            omega,
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PortraitTag {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III.1")]
    III1,
    #[serde(rename = "III.2")]
    III2,
    #[serde(rename = "IV.1")]
    IV1,
    #[serde(rename = "IV.2")]
    IV2,
    #[serde(rename = "V.1")]
    V1,
    #[serde(rename = "V.2")]
    V2,
    #[serde(rename = "VI.1")]
    VI1,
    #[serde(rename = "VI.2")]
    VI2,
    #[serde(rename = "VII.1")]
    VII1,
    #[serde(rename = "VII.2")]
    VII2,
}

impl PortraitTag {
    pub const ALL: [PortraitTag; 12] = [
        PortraitTag::I,
        PortraitTag::II,
        PortraitTag::III1,
        PortraitTag::III2,
        PortraitTag::IV1,
        PortraitTag::IV2,
        PortraitTag::V1,
        PortraitTag::V2,
        PortraitTag::VI1,
        PortraitTag::VI2,
        PortraitTag::VII1,
        PortraitTag::VII2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PortraitTag::I => "I",
            PortraitTag::II => "II",
            PortraitTag::III1 => "III.1",
            PortraitTag::III2 => "III.2",
            PortraitTag::IV1 => "IV.1",
            PortraitTag::IV2 => "IV.2",
            PortraitTag::V1 => "V.1",
            PortraitTag::V2 => "V.2",
            PortraitTag::VI1 => "VI.1",
            PortraitTag::VI2 => "VI.2",
            PortraitTag::VII1 => "VII.1",
            PortraitTag::VII2 => "VII.2",
        }
    }

    /// Topological class; the `.1`/`.2` pairs differ only by focus versus
    /// node at the origin.
    pub fn equivalence_class(&self) -> EquivalenceClass {
        match self {
            PortraitTag::I => EquivalenceClass::I,
            PortraitTag::II => EquivalenceClass::II,
            PortraitTag::III1 | PortraitTag::III2 => EquivalenceClass::III,
            PortraitTag::IV1 | PortraitTag::IV2 => EquivalenceClass::IV,
            PortraitTag::V1 | PortraitTag::V2 => EquivalenceClass::V,
            PortraitTag::VI1 | PortraitTag::VI2 => EquivalenceClass::VI,
            PortraitTag::VII1 | PortraitTag::VII2 => EquivalenceClass::VII,
        }
    }

    /// A parameter point inside the cell.
    pub fn representative(&self) -> (u32, u32, f64) {
        match self {
            PortraitTag::I => (1, 1, 0.5),
            PortraitTag::II => (1, 1, 1.0),
            PortraitTag::III1 => (1, 1, 1.5),
            PortraitTag::III2 => (1, 1, 2.5),
            PortraitTag::IV1 => (1, 2, 1.0),
            PortraitTag::IV2 => (1, 2, 3.0),
            PortraitTag::V1 => (2, 1, 1.0),
            PortraitTag::V2 => (2, 1, 2.5),
            PortraitTag::VI1 => (2, 2, 1.0),
            PortraitTag::VI2 => (2, 2, 3.0),
            PortraitTag::VII1 => (2, 3, 1.0),
            PortraitTag::VII2 => (2, 3, 2.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivalenceClass {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl EquivalenceClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquivalenceClass::I => "i",
            EquivalenceClass::II => "ii",
            EquivalenceClass::III => "iii",
            EquivalenceClass::IV => "iv",
            EquivalenceClass::V => "v",
            EquivalenceClass::VI => "vi",
            EquivalenceClass::VII => "vii",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PortraitClass {
    pub tag: PortraitTag,
    pub equivalence_class: EquivalenceClass,
}

/// Class from the `(n, k, c)` decision table.
pub fn portrait_class(p: &Params) -> PortraitClass {
    let (n, k, c) = (p.n(), p.k(), p.c());
    let node = c >= 2.0 - NODE_BAND;
    let tag = match (n, k % 2 == 1) {
        (1, true) if (c - 1.0).abs() <= NODE_BAND => PortraitTag::II,
        (1, true) if c < 1.0 => PortraitTag::I,
        (1, true) if node => PortraitTag::III2,
        (1, true) => PortraitTag::III1,
        (1, false) if node => PortraitTag::IV2,
        (1, false) => PortraitTag::IV1,
        _ if k == 1 && node => PortraitTag::V2,
        _ if k == 1 => PortraitTag::V1,
        (_, false) if node => PortraitTag::VI2,
        (_, false) => PortraitTag::VI1,
        (_, true) if node => PortraitTag::VII2,
        (_, true) => PortraitTag::VII1,
    };
    PortraitClass {
        tag,
        equivalence_class: tag.equivalence_class(),
    }
}

/// Where an expected connection comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureSource {
    /// Spelled out connection by connection in the written case analysis.
    Stated,
    /// Not spelled out in writing; fixed by tracing and checked against the
    /// local sector structure at infinity.
    Derived,
}

/// Expected far end of every finite-saddle branch, as
/// `(origin, stable?, side, far end)`.
pub fn expected_connections(
    class: EquivalenceClass,
) -> (FixtureSource, &'static [(&'static str, Stability, Side, &'static str)]) {
    use Side::{Minus as M, Plus as P};
    use Stability::{Stable as S, Unstable as U};
    match class {
        EquivalenceClass::I => (
            FixtureSource::Stated,
            &[("E1", U, P, "I3^0"), ("E1", U, M, "E0"), ("E1", S, P, "I1"), ("E1", S, M, "I1")],
        ),
        EquivalenceClass::II => (
            FixtureSource::Stated,
            &[("E1", U, P, "I3^0"), ("E1", U, M, "E0"), ("E1", S, P, "I2"), ("E1", S, M, "I1")],
        ),
        EquivalenceClass::III => (
            FixtureSource::Stated,
            &[("E1", U, P, "I3^0"), ("E1", U, M, "E0"), ("E1", S, P, "I3^0"), ("E1", S, M, "I1")],
        ),
        EquivalenceClass::IV => (
            FixtureSource::Derived,
            &[("E1", U, P, "I3^e"), ("E1", U, M, "E0"), ("E1", S, P, "I1"), ("E1", S, M, "I1")],
        ),
        EquivalenceClass::V => (
            FixtureSource::Derived,
            &[
                ("E1", U, P, "I7"),
                ("E1", U, M, "E0"),
                ("E1", S, P, "I7"),
                ("E1", S, M, "I8"),
                ("E2", U, P, "E0"),
                ("E2", U, M, "I8"),
                ("E2", S, P, "I7"),
                ("E2", S, M, "I8"),
            ],
        ),
        EquivalenceClass::VI => (
            FixtureSource::Derived,
            &[
                ("E1", U, P, "I9^e"),
                ("E1", U, M, "E0"),
                ("E1", S, P, "I6"),
                ("E1", S, M, "I5"),
                ("E2", U, P, "E0"),
                ("E2", U, M, "I10^e"),
                ("E2", S, P, "I6"),
                ("E2", S, M, "I5"),
            ],
        ),
        EquivalenceClass::VII => (
            FixtureSource::Derived,
            &[
                ("E1", U, P, "I9^0"),
                ("E1", U, M, "E0"),
                ("E1", S, P, "I9^0"),
                ("E1", S, M, "I5"),
                ("E2", U, P, "E0"),
                ("E2", U, M, "I6"),
                ("E2", S, P, "I9^0"),
                ("E2", S, M, "I5"),
            ],
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Connection {
    pub origin: &'static str,
    pub branch: Branch,
    pub expected: &'static str,
    pub traced: LimitSet,
}

impl Connection {
    pub fn matches(&self) -> bool {
        self.traced == LimitSet::Equilibrium(self.expected)
    }
}

pub const NO_CYCLE_CAVEAT: &str = "assumes-no-limit-cycles";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitReport {
    pub class: PortraitClass,
    /// Set when the class rests on the absence of limit cycles, which is
    /// only checked numerically.
    pub caveat: Option<&'static str>,
    pub source: FixtureSource,
    pub connections: Vec<Connection>,
    pub evidence_match: bool,
}

pub fn classify_portrait(p: &Params) -> Result<PortraitReport> {
    classify_portrait_with(
        p,
        &IntegratorControls::separatrix(),
        DEFAULT_SEED_EPS,
        Execution::available(),
    )
}

/// Table class plus the traced separatrices compared with the expected
/// connections of that class.
pub fn classify_portrait_with(
    p: &Params,
    ctl: &IntegratorControls,
    eps: f64,
    exec: Execution,
) -> Result<PortraitReport> {
    let seps = trace_separatrices_with(p, ctl, eps, exec)?;
    Ok(report_from(p, &seps))
}

fn report_from(p: &Params, seps: &[Separatrix]) -> PortraitReport {
    let class = portrait_class(p);
    let (source, table) = expected_connections(class.equivalence_class);
    let connections: Vec<Connection> = table
        .iter()
        .map(|&(origin, stability, side, expected)| {
            let branch = Branch { stability, side };
            let traced = seps
                .iter()
                .find(|s| s.origin == origin && s.branch == branch)
                .map(|s| s.far_end())
                .unwrap_or(LimitSet::Inconclusive);
            Connection {
                origin,
                branch,
                expected,
                traced,
            }
        })
        .collect();
    let evidence_match = connections.len() == seps.len() && connections.iter().all(Connection::matches);
    PortraitReport {
        class,
        caveat: (class.tag == PortraitTag::I).then_some(NO_CYCLE_CAVEAT),
        source,
        connections,
        evidence_match,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marker {
    pub label: &'static str,
    pub glyph: &'static str,
    pub kind: EquilibriumKind,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatrixLine {
    pub origin: &'static str,
    pub branch: Branch,
    pub alpha: LimitSet,
    pub omega: LimitSet,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitParams {
    pub n: u32,
    pub k: u32,
    pub c: f64,
    pub m: u32,
}

/// Disk-coordinate portrait data; the boundary circle has unit radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortraitDocument {
    pub params: PortraitParams,
    pub class: PortraitReport,
    pub equilibria: Vec<Marker>,
    pub separatrices: Vec<SeparatrixLine>,
    pub orbits: Vec<Vec<[f64; 2]>>,
    /// The heteroclinic wave orbit when `c >= 2`.
    pub highlight: Vec<Vec<[f64; 2]>>,
}

/// Polyline with points closer than `tol` to their predecessor dropped.
pub fn thin(path: &[DiskPoint], tol: f64) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    for (i, q) in path.iter().enumerate() {
        let keep = match out.last() {
            None => true,
            Some(l) => i + 1 == path.len() || (q.x - l[0]).hypot(q.y - l[1]) >= tol,
        };
        if keep {
            out.push([q.x, q.y]);
        }
    }
    out
}

const THIN_TOL: f64 = 2e-3;
const FAN_SEEDS: usize = 24;

/// Seeds of the cosmetic orbit fan: a 6 x 4 grid over `[-2, 2] x [-1.5, 1.5]`.
fn fan_seeds() -> Vec<PhasePoint> {
    let w = Window {
        x_min: -2.0,
        x_max: 2.0,
        y_min: -1.5,
        y_max: 1.5,
    };
    let dx = (w.x_max - w.x_min) / 6.0;
    let dy = (w.y_max - w.y_min) / 4.0;
    let pts: Vec<PhasePoint> = (0..FAN_SEEDS)
        .map(|i| {
            let (r, c) = (i / 6, i % 6);
            PhasePoint::new(w.x_min + (c as f64 + 0.5) * dx, w.y_min + (r as f64 + 0.5) * dy)
        })
        .collect();
    pts
}

pub fn export_portrait(p: &Params, ctl: &IntegratorControls) -> Result<PortraitDocument> {
    export_portrait_with(p, ctl, DEFAULT_SEED_EPS, Execution::available())
}

pub fn export_portrait_with(
    p: &Params,
    ctl: &IntegratorControls,
    eps: f64,
    exec: Execution,
) -> Result<PortraitDocument> {
    let seps = trace_separatrices_with(p, ctl, eps, exec)?;
    let class = report_from(p, &seps);

    let mut equilibria = Vec::new();
    for e in finite_equilibria(p).into_iter().chain(infinite_equilibria(p)) {
        let d = match e.location {
            Location::Finite(q) => from_finite(&q),
            Location::Chart(cp) => to_disk(&cp),
        };
        equilibria.push(Marker {
            label: e.label,
            glyph: e.kind.glyph(),
            kind: e.kind.clone(),
            x: d.x,
            y: d.y,
        });
    }

    let separatrices = seps
        .iter()
        .map(|s| SeparatrixLine {
            origin: s.origin,
            branch: s.branch,
            alpha: s.alpha,
            omega: s.omega,
            points: thin(&s.path, THIN_TOL),
        })
        .collect();

    let fan_ctl = IntegratorControls {
        max_s: 30.0,
        ..*ctl
    };
    let jobs: Vec<(PhasePoint, Direction)> = fan_seeds()
        .into_iter()
        .flat_map(|q| [(q, Direction::Forward), (q, Direction::Backward)])
        .collect();
    let orbits = par_map(exec, &jobs, |(q, d)| {
        follow(p, *q, *d, &fan_ctl).map(|o| thin(&o.path, THIN_TOL))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut highlight = Vec::new();
    if p.c() >= 2.0 {
        let wp = shoot_heteroclinic(p, &WaveControls::default())?;
        let path: Vec<DiskPoint> = wp.points().iter().map(from_finite).collect();
        highlight.push(thin(&path, THIN_TOL));
    }

    Ok(PortraitDocument {
        params: PortraitParams {
            n: p.n(),
            k: p.k(),
            c: p.c(),
            m: p.m(),
        },
        class,
        equilibria,
        separatrices,
        orbits,
        highlight,
    })
}
