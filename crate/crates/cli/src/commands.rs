//! One function per subcommand. Each returns the documents it produced;
//! `main` decides whether they go to stdout or to files.

use serde::Serialize;

use bh_core::blowup::{circle_equilibria, sector_structure, BlowupCase, CircleEquilibrium, SectorSummary};
use bh_core::compact::{infinite_equilibria, ChartId};
use bh_core::equilibria::{classify, eigen_data, finite_equilibria, EigenData, EquilibriumKind, Location};
use bh_core::field::{Params, Region, RegionTag};
use bh_core::flow::IntegratorControls;
use bh_core::par::{par_map, Execution};
use bh_core::pde::{run_profile, snapshots_csv, summarize, PdeConfig, SpeedEstimate};
use bh_core::portrait::{
    classify_portrait_with, export_portrait_with, FixtureSource, PortraitParams, PortraitTag,
};
use bh_core::wave::{shoot_heteroclinic, verify_asymptotics, wave_residual, Check, WaveControls};

use crate::config::{parse_cells, Format, Settings};
use crate::{svg, CliError};

/// Endpoint, monotonicity and residual tolerance for the wave report.
pub const WAVE_TOL: f64 = 1e-6;
/// Relative speed error accepted by `pde-check`.
pub const SPEED_TOL: f64 = 0.02;

pub struct Output {
    /// Document printed when no output directory is given.
    pub stdout: String,
    /// Files written into the output directory instead.
    pub files: Vec<(&'static str, String)>,
    /// One-line summary printed when files are written.
    pub summary: String,
    /// False when the command ran but its checks failed.
    pub ok: bool,
}

fn params(s: &Settings) -> Result<Params, CliError> {
    Ok(Params::with_m(s.n, s.k, s.c, s.m)?)
}

fn controls(s: &Settings, base: IntegratorControls) -> IntegratorControls {
    IntegratorControls {
        rel_tol: s.rel_tol,
        abs_tol: s.abs_tol,
        ..base
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialise");
    s.push('\n');
    s
}

fn pick(s: &Settings, cmd: &str, allowed: &[Format]) -> Result<Format, CliError> {
    let f = s.format.unwrap_or(allowed[0]);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Validation(format!("{cmd} cannot write {f:?} output").to_lowercase()))
    }
}

fn label(p: &Params) -> String {
    format!("n={} k={} c={}", p.n(), p.k(), p.c())
}

fn portrait_params(p: &Params) -> PortraitParams {
    PortraitParams {
        n: p.n(),
        k: p.k(),
        c: p.c(),
        m: p.m(),
    }
}

#[derive(Serialize)]
struct FiniteRow {
    label: &'static str,
    x: f64,
    y: f64,
    kind: EquilibriumKind,
    eigen: EigenData,
}

#[derive(Serialize)]
struct InfiniteRow {
    label: &'static str,
    chart: ChartId,
    u: f64,
    kind: EquilibriumKind,
}

#[derive(Serialize)]
struct BlowupRow {
    case: BlowupCase,
    weights: (u32, u32),
    circle: Vec<CircleEquilibrium>,
}

#[derive(Serialize)]
struct BendixsonRow {
    region: RegionTag,
    bound: f64,
    statement: String,
}

#[derive(Serialize)]
struct AnalyzeReport {
    params: PortraitParams,
    degree: u32,
    finite: Vec<FiniteRow>,
    infinite: Vec<InfiniteRow>,
    sectors: Vec<SectorSummary>,
    blowup: Option<BlowupRow>,
    bendixson: BendixsonRow,
}

pub fn analyze(s: &Settings) -> Result<Output, CliError> {
    let p = params(s)?;
    pick(s, "analyze", &[Format::Json])?;
    let mut finite = Vec::new();
    for e in finite_equilibria(&p) {
        let pt = e.finite_point().expect("finite equilibria have coordinates");
        finite.push(FiniteRow {
            label: e.label,
            x: pt.x,
            y: pt.y,
            kind: classify(&p, &e)?,
            eigen: eigen_data(&p, &e)?,
        });
    }
    let infinite = infinite_equilibria(&p)
        .into_iter()
        .filter_map(|e| match e.location {
            Location::Chart(cp) => Some(InfiniteRow {
                label: e.label,
                chart: cp.chart,
                u: cp.u,
                kind: e.kind,
            }),
            Location::Finite(_) => None,
        })
        .collect();
    let blowup = match BlowupCase::for_params(&p) {
        Some(case) => Some(BlowupRow {
            case,
            weights: case.weights(&p),
            circle: circle_equilibria(&p, case)?,
        }),
        None => None,
    };
    let region = Region::for_params(&p);
    let statement = match region.tag {
        RegionTag::B1 => format!(
            "divergence x^{} - c is negative for x < {}; no closed orbit lies in that half-plane",
            p.k(),
            region.bound
        ),
        RegionTag::B2 => format!(
            "divergence x^{} - c is negative for |x| < {}; no closed orbit lies in that strip",
            p.k(),
            region.bound
        ),
    };
    let report = AnalyzeReport {
        params: portrait_params(&p),
        degree: p.degree(),
        finite,
        infinite,
        sectors: sector_structure(&p),
        blowup,
        bendixson: BendixsonRow {
            region: region.tag,
            bound: region.bound,
            statement,
        },
    };
    let doc = json(&report);
    Ok(Output {
        summary: format!(
            "analyze {}: {} finite, {} infinite equilibria",
            label(&p),
            report.finite.len(),
            report.infinite.len()
        ),
        stdout: doc.clone(),
        files: vec![("analyze.json", doc)],
        ok: true,
    })
}

pub fn portrait(s: &Settings) -> Result<Output, CliError> {
    let p = params(s)?;
    let format = pick(s, "portrait", &[Format::Svg, Format::Json])?;
    let ctl = controls(s, IntegratorControls::separatrix());
    let doc = export_portrait_with(&p, &ctl, s.seed_eps, Execution::available())?;
    let rendered = svg::render(&doc);
    let body = json(&doc);
    let r = &doc.class;
    let mut summary = format!(
        "portrait {}: class {} ({}), evidence-match {}",
        label(&p),
        r.class.tag.as_str(),
        r.class.equivalence_class.as_str(),
        r.evidence_match
    );
    if let Some(c) = r.caveat {
        summary.push_str(", caveat ");
        summary.push_str(c);
    }
    Ok(Output {
        stdout: if format == Format::Svg { rendered.clone() } else { body.clone() },
        files: vec![("portrait.svg", rendered), ("portrait.json", body)],
        summary,
        ok: true,
    })
}

#[derive(Serialize)]
struct WaveReport {
    params: PortraitParams,
    passed: bool,
    residual: f64,
    checks: Vec<Check>,
    samples: usize,
    xi_min: f64,
    xi_max: f64,
    phi_min: f64,
    phi_max: f64,
}

pub fn wave(s: &Settings) -> Result<Output, CliError> {
    let p = params(s)?;
    let format = pick(s, "wave", &[Format::Csv, Format::Json])?;
    let defaults = WaveControls::default();
    let ctl = WaveControls {
        eps: s.seed_eps,
        integrator: controls(s, defaults.integrator),
    };
    let shot = shoot_heteroclinic(&p, &ctl)?;
    let residual = wave_residual(&shot);
    let mut checks = verify_asymptotics(&shot, WAVE_TOL).checks;
    checks.push(Check {
        name: "ode-residual",
        passed: residual < WAVE_TOL,
        value: residual,
        tol: WAVE_TOL,
    });
    let passed = checks.iter().all(|c| c.passed);

    let profile = match s.xi_range {
        Some([lo, hi]) => {
            let mut wp = shot.clone();
            wp.extend_tails(lo, hi, 0.01)?;
            wp.window(lo, hi)
        }
        None => shot,
    };
    let extent = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (xi_min, xi_max) = extent(&profile.xi);
    let (phi_min, phi_max) = extent(&profile.phi);
    let report = WaveReport {
        params: portrait_params(&p),
        passed,
        residual,
        checks,
        samples: profile.len(),
        xi_min,
        xi_max,
        phi_min,
        phi_max,
    };
    let csv = profile.to_csv();
    let body = json(&report);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let summary = if passed {
        format!("wave {}: pass, residual {residual:e}", label(&p))
    } else {
        format!("wave {}: FAIL ({})", label(&p), failed.join(", "))
    };
    Ok(Output {
        stdout: if format == Format::Csv { csv.clone() } else { body.clone() },
        files: vec![("wave.csv", csv), ("wave-report.json", body)],
        summary,
        ok: passed,
    })
}

#[derive(Serialize)]
struct PdeReport {
    params: PortraitParams,
    config: PdeConfig,
    passed: bool,
    #[serde(flatten)]
    estimate: SpeedEstimate,
}

pub fn pde_check(s: &Settings) -> Result<Output, CliError> {
    let p = params(s)?;
    pick(s, "pde-check", &[Format::Json])?;
    if s.snapshot_stride.is_some() && s.out.is_none() {
        return Err(CliError::Validation("--snapshot-stride needs --out".into()));
    }
    let cfg = PdeConfig {
        half_width: s.half_width,
        points: s.grid_points,
        final_time: s.final_time,
        snapshot_stride: s.snapshot_stride,
        ..PdeConfig::default()
    };
    cfg.schedule()?;
    if p.c() < 2.0 {
        return Err(CliError::Validation(format!(
            "pde-check needs the wave, which requires c >= 2; got c = {}",
            p.c()
        )));
    }
    let wp = shoot_heteroclinic(&p, &WaveControls::default())?;
    let run = run_profile(&p, &wp, &cfg)?;
    let estimate = summarize(&p, &run, &cfg)?;
    let passed = estimate.rel_error < SPEED_TOL;
    let summary = format!(
        "pde-check {}: speed {:.6} (rel. error {:.2e}), drift {:.2e}: {}",
        label(&p),
        estimate.speed,
        estimate.rel_error,
        estimate.drift,
        if passed { "pass" } else { "FAIL" }
    );
    let body = json(&PdeReport {
        params: portrait_params(&p),
        config: cfg,
        passed,
        estimate,
    });
    let mut files = vec![("pde.json", body.clone())];
    if cfg.snapshot_stride.is_some() {
        files.push(("pde-snapshots.csv", snapshots_csv(&run.initial.z, &run.snapshots)));
    }
    Ok(Output {
        stdout: body,
        files,
        summary,
        ok: passed,
    })
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    k: u32,
    c: f64,
    tag: PortraitTag,
    class: &'static str,
    evidence_match: bool,
    source: FixtureSource,
    caveat: Option<&'static str>,
}

pub fn default_cells() -> String {
    PortraitTag::ALL
        .iter()
        .map(|t| {
            let (n, k, c) = t.representative();
            format!("{n},{k},{c}")
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn sweep(s: &Settings) -> Result<Output, CliError> {
    let format = pick(s, "sweep", &[Format::Json, Format::Csv])?;
    let table = s.cells.clone().unwrap_or_else(default_cells);
    let cells = parse_cells(&table)?;
    let mut ps = Vec::with_capacity(cells.len());
    for &(n, k, c) in &cells {
        ps.push(Params::with_m(n, k, c, s.m)?);
    }
    let ctl = controls(s, IntegratorControls::separatrix());
    // Cells run in parallel; the branches inside a cell run sequentially.
    let reports = par_map(Execution::available(), &ps, |p| {
        classify_portrait_with(p, &ctl, s.seed_eps, Execution::Sequential)
    });
    let mut rows = Vec::with_capacity(ps.len());
    for (p, r) in ps.iter().zip(reports) {
        let r = r?;
        rows.push(SweepRow {
            n: p.n(),
            k: p.k(),
            c: p.c(),
            tag: r.class.tag,
            class: r.class.equivalence_class.as_str(),
            evidence_match: r.evidence_match,
            source: r.source,
            caveat: r.caveat,
        });
    }
    let mut csv = String::from("n,k,c,tag,class,evidence_match\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{:.16e},{},{},{}\n",
            r.n,
            r.k,
            r.c,
            r.tag.as_str(),
            r.class,
            r.evidence_match
        ));
    }
    let body = json(&rows);
    let mut classes: Vec<&str> = rows.iter().map(|r| r.class).collect();
    classes.sort_unstable();
    classes.dedup();
    let matched = rows.iter().filter(|r| r.evidence_match).count();
    Ok(Output {
        stdout: if format == Format::Csv { csv.clone() } else { body.clone() },
        files: vec![("sweep.json", body), ("sweep.csv", csv)],
        summary: format!(
            "sweep: {} cells, {} classes, evidence-match in {}/{}",
            rows.len(),
            classes.len(),
            matched,
            rows.len()
        ),
        ok: true,
    })
}
