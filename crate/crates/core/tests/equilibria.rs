use nalgebra::Matrix2;
use proptest::prelude::*;

use bh_core::equilibria::{classify, eigen_data, finite_equilibria, finite_equilibrium, EquilibriumKind};
use bh_core::error::Error;
use bh_core::field::{jacobian, Params};

fn grid() -> Vec<Params> {
    let mut out = Vec::new();
    for n in [1, 2] {
        for k in 1..=5 {
            for c in [0.1, 0.5, 1.0, 1.5, 1.99, 2.0, 2.01, 2.5, 3.0, 5.0] {
                out.push(Params::new(n, k, c).unwrap());
            }
        }
    }
    out
}

#[test]
fn determinant_and_trace_identities() {
    let grid = grid();
    assert_eq!(grid.len(), 100);
    for p in grid {
        let c = p.c();
        for e in finite_equilibria(&p) {
            let v = eigen_data(&p, &e).unwrap().values;
            let prod = v[0] * v[1];
            let sum = v[0] + v[1];
            let (det, tr) = match e.label {
                "E0" => (1.0, -c),
                "E1" => (-(p.n() as f64), 1.0 - c),
                "E2" => (-(p.n() as f64), (-1f64).powi(p.k() as i32) - c),
                other => panic!("unexpected {other}"),
            };
            assert!((prod.re - det).abs() < 1e-10 && prod.im.abs() < 1e-10, "{} det at {p:?}", e.label);
            assert!((sum.re - tr).abs() < 1e-10 && sum.im.abs() < 1e-10, "{} trace at {p:?}", e.label);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn closed_forms_match_a_generic_solver(n in 1u32..=2, k in 1u32..=6, c in 0.01f64..8.0) {
        let p = Params::new(n, k, c).unwrap();
        for e in finite_equilibria(&p) {
            let j = jacobian(&p, &e.finite_point().unwrap());
            let m = Matrix2::new(j[0][0], j[0][1], j[1][0], j[1][1]);
            let mut oracle: Vec<_> = m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
            let mut ours: Vec<_> = eigen_data(&p, &e).unwrap().values.iter().map(|z| (z.re, z.im)).collect();
            oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in oracle.iter().zip(&ours) {
                prop_assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn eigenvectors_solve_the_eigen_equation(n in 1u32..=2, k in 1u32..=6, c in 0.01f64..8.0) {
        let p = Params::new(n, k, c).unwrap();
        for e in finite_equilibria(&p) {
            let ed = eigen_data(&p, &e).unwrap();
            let Some(vs) = ed.vectors else { continue };
            let j = jacobian(&p, &e.finite_point().unwrap());
            for (v, l) in vs.iter().zip(&ed.values) {
                let r0 = j[0][0] * v[0] + j[0][1] * v[1] - l.re * v[0];
                let r1 = j[1][0] * v[0] + j[1][1] * v[1] - l.re * v[1];
                prop_assert!(r0.abs().max(r1.abs()) < 1e-10);
            }
        }
    }
}

#[test]
fn eigenvector_slopes() {
    for n in [1, 2] {
        for k in 1..=4 {
            for c in [2.0, 2.5, 4.0] {
                let p = Params::new(n, k, c).unwrap();
                let e0 = finite_equilibrium(&p, "E0").unwrap();
                for v in eigen_data(&p, &e0).unwrap().vectors.unwrap() {
                    assert!(v[1] / v[0] < 0.0, "E0 slope at {p:?}");
                }
                let e1 = finite_equilibrium(&p, "E1").unwrap();
                let w2 = eigen_data(&p, &e1).unwrap().vectors.unwrap()[1];
                assert!(w2[1] / w2[0] > 0.0, "E1 unstable slope at {p:?}");
            }
        }
    }
}

#[test]
fn inventory_and_classification() {
    let p = Params::new(1, 1, 2.0).unwrap();
    let eqs = finite_equilibria(&p);
    assert_eq!(eqs.iter().map(|e| e.label).collect::<Vec<_>>(), ["E0", "E1"]);
    assert_eq!(classify(&p, &eqs[0]).unwrap(), EquilibriumKind::StableNode);
    assert_eq!(classify(&p, &eqs[1]).unwrap(), EquilibriumKind::Saddle);

    let q = Params::new(2, 1, 1.0).unwrap();
    let eqs = finite_equilibria(&q);
    assert_eq!(eqs.len(), 3);
    assert_eq!(classify(&q, &eqs[0]).unwrap(), EquilibriumKind::StableFocus);
    assert_eq!(eqs[2].finite_point().unwrap().x, -1.0);
    assert!(finite_equilibrium(&p, "E2").is_none());
}

#[test]
fn focus_has_no_real_eigenvectors() {
    let p = Params::new(1, 2, 1.0).unwrap();
    let e0 = finite_equilibrium(&p, "E0").unwrap();
    let ed = eigen_data(&p, &e0).unwrap();
    assert!(ed.vectors.is_none());
    assert!((ed.values[0].im + 3f64.sqrt() / 2.0).abs() < 1e-15);
}

#[test]
fn non_equilibria_are_rejected() {
    let p = Params::new(1, 1, 1.0).unwrap();
    let mut e = finite_equilibrium(&p, "E1").unwrap();
    e.location = bh_core::equilibria::Location::Finite(bh_core::field::PhasePoint::new(0.5, 0.0));
    assert!(matches!(eigen_data(&p, &e), Err(Error::NotEquilibrium(_))));
}
