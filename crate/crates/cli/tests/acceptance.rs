//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines always reach the console.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bh_core::blowup::{circle_equation, circle_equilibria, circle_jacobian, BlowupCase, CircleKind};
use bh_core::compact::{pushforward_residual, ChartId, ChartPoint};
use bh_core::equilibria::{classify, eigen_data, finite_equilibria, EquilibriumKind};
use bh_core::field::{jacobian, Params};
use bh_core::flow::{cycle_search, CycleBudget, CycleEvidence, Window};
use bh_core::pde::{speed_estimate, PdeConfig};
use bh_core::wave::{profile_distance, shoot_heteroclinic, verify_asymptotics, wave_residual, WaveControls};

struct Outcome {
    passed: bool,
    detail: String,
}

fn pass_if(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn fail(detail: String) -> Outcome {
    Outcome { passed: false, detail }
}

fn params(n: u32, k: u32, c: f64) -> Params {
    Params::new(n, k, c).expect("acceptance parameters are valid")
}

/// Eigen-data against nalgebra's Schur-based eigenvalues, eigenvectors
/// against the defining equation, and the focus/node/saddle rule.
fn equilibrium_formulas() -> Outcome {
    let cs = [0.1, 0.5, 1.0, 1.5, 1.99, 2.0, 2.01, 2.5, 3.0, 5.0];
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for n in [1, 2] {
        for k in 1..=5 {
            for &c in &cs {
                cells += 1;
                let p = params(n, k, c);
                for e in finite_equilibria(&p) {
                    let pt = e.finite_point().unwrap();
                    let j = jacobian(&p, &pt);
                    let m = Matrix2::new(j[0][0], j[0][1], j[1][0], j[1][1]);
                    let mut oracle: Vec<_> = m.complex_eigenvalues().iter().copied().collect();
                    let ed = eigen_data(&p, &e).unwrap();
                    let mut ours = ed.values.to_vec();
                    oracle.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
                    ours.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
                    for (a, b) in oracle.iter().zip(&ours) {
                        worst = worst.max((a.re - b.re).abs().max((a.im - b.im).abs()));
                    }
                    if let Some(vs) = ed.vectors {
                        for (v, l) in vs.iter().zip(&ed.values) {
                            let r0 = j[0][0] * v[0] + j[0][1] * v[1] - l.re * v[0];
                            let r1 = j[1][0] * v[0] + j[1][1] * v[1] - l.re * v[1];
                            worst = worst.max(r0.abs().max(r1.abs()));
                        }
                    }
                    let expected = if e.label != "E0" {
                        EquilibriumKind::Saddle
                    } else if c < 2.0 {
                        EquilibriumKind::StableFocus
                    } else {
                        EquilibriumKind::StableNode
                    };
                    if classify(&p, &e).unwrap() != expected {
                        return fail(format!("{} misclassified at n={n} k={k} c={c}", e.label));
                    }
                }
            }
        }
    }
    pass_if(
        worst < 1e-10 && cells == 100,
        format!("{cells} cells, max eigen mismatch {worst:.1e} (tol 1e-10)"),
    )
}

fn chart_certification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for (n, k) in [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (2, 3), (2, 4)] {
        for _ in 0..1000 {
            let c = rng.gen_range(0.1..5.0);
            let p = params(n, k, c);
            let chart = ChartId::ALL[rng.gen_range(0..4)];
            let cp = ChartPoint::new(chart, rng.gen_range(-3.0..3.0), rng.gen_range(0.01..2.0));
            worst = worst.max(pushforward_residual(&p, &cp).unwrap());
            samples += 1;
        }
    }
    pass_if(worst < 1e-9, format!("{samples} chart points, max residual {worst:.1e} (tol 1e-9)"))
}

fn blowup_circle() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_jac: f64 = 0.0;
    for (n, k) in [(1, 2), (1, 3), (2, 1), (2, 2), (2, 3)] {
        for c in [0.5, 1.0, 2.5] {
            let p = params(n, k, c);
            let case = BlowupCase::for_params(&p).unwrap();
            let eqs = circle_equilibria(&p, case).unwrap();
            for e in &eqs {
                worst_res = worst_res.max(circle_equation(&p, case, e.theta).abs());
            }
            let sk = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expected: Vec<(&str, [[f64; 2]; 2])> = match case {
                BlowupCase::Buc2 => vec![
                    ("theta0^1", [[-1.0, 0.0], [0.0, 1.0]]),
                    ("theta3^1", [[1.0, 0.0], [0.0, -1.0]]),
                ],
                BlowupCase::Buc1 => vec![
                    ("theta0", [[-1.0, 0.0], [0.0, 1.0]]),
                    ("theta2", [[-sk, 0.0], [0.0, sk]]),
                ],
                BlowupCase::Buc3 => vec![
                    ("theta0^2", [[-1.0, 0.0], [0.0, 1.0]]),
                    ("theta2^2", [[-sk, 0.0], [0.0, sk]]),
                ],
            };
            for (label, m) in expected {
                let Some(e) = eqs.iter().find(|e| e.label == label) else {
                    return fail(format!("{label} missing for n={n} k={k}"));
                };
                let j = circle_jacobian(&p, case, e).unwrap().matrix;
                for r in 0..2 {
                    for s in 0..2 {
                        worst_jac = worst_jac.max((j[r][s] - m[r][s]).abs());
                    }
                }
            }
            if case != BlowupCase::Buc2 {
                let saddles = eqs.iter().filter(|e| e.kind == CircleKind::Saddle).count();
                if eqs.len() != 4 || saddles != 2 {
                    return fail(format!("n={n} k={k}: {} points, {saddles} saddles", eqs.len()));
                }
            }
        }
    }
    pass_if(
        worst_res < 1e-12 && worst_jac < 1e-8,
        format!("max circle residual {worst_res:.1e} (tol 1e-12), max Jacobian error {worst_jac:.1e} (tol 1e-8), 2 saddles of 4"),
    )
}

fn sweep_table() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_bh"))
        .args(["sweep", "--format", "json"])
        .output()
        .expect("bh runs");
    if !out.status.success() {
        return fail(format!("sweep exited with {}", out.status));
    }
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).expect("sweep prints JSON");
    let expected = [
        ("I", "i"),
        ("II", "ii"),
        ("III.1", "iii"),
        ("III.2", "iii"),
        ("IV.1", "iv"),
        ("IV.2", "iv"),
        ("V.1", "v"),
        ("V.2", "v"),
        ("VI.1", "vi"),
        ("VI.2", "vi"),
        ("VII.1", "vii"),
        ("VII.2", "vii"),
    ];
    if rows.len() != expected.len() {
        return fail(format!("{} rows instead of 12", rows.len()));
    }
    let mut classes = std::collections::BTreeSet::new();
    let mut matched = 0;
    for (row, (tag, class)) in rows.iter().zip(expected) {
        if row["tag"] != tag || row["class"] != class {
            return fail(format!("row {row} should be {tag}/{class}"));
        }
        classes.insert(class);
        if row["evidence_match"] == true {
            matched += 1;
        }
    }
    pass_if(
        classes.len() == 7 && matched == 12,
        format!("12 cells, {} classes, evidence-match in {matched}/12", classes.len()),
    )
}

fn traveling_waves() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for n in [1, 2] {
        for k in [1, 2, 3] {
            for c in [2.0, 2.5, 3.0] {
                let p = params(n, k, c);
                let Ok(a) = shoot_heteroclinic(&p, &WaveControls::default()) else {
                    return fail(format!("no wave at n={n} k={k} c={c}"));
                };
                let report = verify_asymptotics(&a, 1e-6);
                if !report.all_passed() {
                    let bad: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                    return fail(format!("n={n} k={k} c={c}: {}", bad.join(", ")));
                }
                for name in ["phi-left-limit", "phi-right-limit", "dphi-left-limit", "dphi-right-limit"] {
                    worst_limit = worst_limit.max(report.get(name).unwrap().value);
                }
                worst_res = worst_res.max(wave_residual(&a));
                let other = WaveControls {
                    eps: 3e-8,
                    ..WaveControls::default()
                };
                let b = shoot_heteroclinic(&p, &other).unwrap();
                worst_shift = worst_shift.max(profile_distance(&a, &b));
            }
        }
    }
    pass_if(
        worst_res < 1e-6 && worst_shift < 1e-6,
        format!(
            "18 cells bounded and decreasing, limits {worst_limit:.1e}, residual {worst_res:.1e}, reseeded gap {worst_shift:.1e} (tol 1e-6)"
        ),
    )
}

fn pde_cross_check() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, k, c) in [(1, 1, 2.0), (2, 1, 2.5)] {
        let start = Instant::now();
        let p = params(n, k, c);
        let wp = shoot_heteroclinic(&p, &WaveControls::default()).unwrap();
        let est = match speed_estimate(&p, &wp, &PdeConfig::default()) {
            Ok(e) => e,
            Err(e) => return fail(format!("n={n} k={k} c={c}: {e}")),
        };
        let took = start.elapsed();
        ok &= est.rel_error < 0.02 && est.drift < 1e-2 && took < Duration::from_secs(120);
        parts.push(format!(
            "({n},{k},{c}) speed {:.5} drift {:.1e} in {:.1}s",
            est.speed,
            est.drift,
            took.as_secs_f64()
        ));
    }
    pass_if(ok, format!("{}; tol 2% and 1e-2", parts.join(", ")))
}

fn no_cycles() -> Outcome {
    let budget = CycleBudget::default();
    let mut runs = 0;
    for c in [0.5, 1.0, 1.5, 2.0] {
        for n in [1, 2] {
            for k in [1, 2, 3] {
                let p = params(n, k, c);
                if let CycleEvidence::Witness { seed, x, .. } = cycle_search(&p, &Window::default(), &budget) {
                    return fail(format!("n={n} k={k} c={c}: return at x={x} from {seed:?}"));
                }
                runs += 1;
            }
        }
    }
    pass_if(
        true,
        format!("{runs} searches on a {0}x{0} grid, no return witness", budget.grid),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 7] = [
        ("equilibrium formulas", equilibrium_formulas, Duration::from_secs(1)),
        ("chart certification", chart_certification, Duration::from_secs(5)),
        ("blow-up circle", blowup_circle, Duration::from_secs(5)),
        ("class table", sweep_table, Duration::from_secs(120)),
        ("traveling wave", traveling_waves, Duration::from_secs(60)),
        ("pde speed", pde_cross_check, Duration::from_secs(240)),
        ("no closed orbits", no_cycles, Duration::from_secs(60)),
    ];
    let mut all = true;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let passed = outcome.passed && took < *budget;
        all &= passed;
        println!(
            "criterion {} {:<22} {} ({}; {:.2}s of {}s)",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
