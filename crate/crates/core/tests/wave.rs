use proptest::prelude::*;

use bh_core::error::Error;
use bh_core::field::Params;
use bh_core::wave::{
    profile_distance, shoot_heteroclinic, spline_moments, verify_asymptotics, wave_residual, WaveControls,
};

fn wave(n: u32, k: u32, c: f64) -> bh_core::wave::WaveProfile {
    shoot_heteroclinic(&Params::new(n, k, c).unwrap(), &WaveControls::default()).unwrap()
}

/// For k = n and c = b + 1/b with b = 1/(n+1) the profile solves
/// phi' = -b phi (1 - phi^n), normalised so that phi(0) = 1/2.
fn closed_form(n: u32, xi: f64) -> f64 {
    let b = 1.0 / (n as f64 + 1.0);
    let a = 2f64.powi(n as i32) - 1.0;
    (1.0 + a * (n as f64 * b * xi).exp()).powf(-1.0 / n as f64)
}

#[test]
fn matches_closed_form_profiles() {
    for n in [1u32, 2] {
        let b = 1.0 / (n as f64 + 1.0);
        let wp = wave(n, n, b + 1.0 / b);
        let worst = wp
            .xi
            .iter()
            .zip(&wp.phi)
            .map(|(&x, &f)| (f - closed_form(n, x)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "n = {n}: {worst:e}");
    }
}

#[test]
fn normalised_at_half() {
    let wp = wave(2, 3, 2.5);
    assert!(wp.crossing(0.5).unwrap().abs() < 1e-12);
}

#[test]
fn residual_detects_a_wrong_speed() {
    let mut wp = wave(1, 2, 2.2);
    assert!(wave_residual(&wp) < 1e-6);
    wp.speed += 0.05;
    assert!(wave_residual(&wp) > 1e-3);
}

#[test]
fn below_the_minimal_speed_is_refused() {
    let r = shoot_heteroclinic(&Params::new(1, 1, 1.99).unwrap(), &WaveControls::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn tails_land_on_the_requested_window() {
    let mut wp = wave(2, 3, 3.0);
    wp.extend_tails(-30.0, 30.0, 0.05).unwrap();
    assert_eq!(wp.xi[0], -30.0);
    // The slow approach to the origin already reaches past the right end.
    assert!(*wp.xi.last().unwrap() >= 30.0);
    assert!(wp.xi.windows(2).all(|w| w[1] > w[0]));
    assert!(verify_asymptotics(&wp, 1e-3).all_passed());
    assert!(wave_residual(&wp) < 1e-5, "{:e}", wave_residual(&wp));
}

#[test]
fn csv_layout() {
    let wp = wave(1, 1, 3.0);
    let csv = wp.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("xi,phi,dphi"));
    assert_eq!(csv.lines().count(), wp.len() + 1);
    assert!(!csv.contains('\r'));
    for (i, line) in lines.enumerate() {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v, vec![wp.xi[i], wp.phi[i], wp.dphi[i]]);
    }
}

#[test]
fn seed_offset_changes_little() {
    let p = Params::new(2, 1, 2.5).unwrap();
    let a = shoot_heteroclinic(&p, &WaveControls::default()).unwrap();
    let ctl = WaveControls {
        eps: WaveControls::default().eps / 2.0,
        ..WaveControls::default()
    };
    let b = shoot_heteroclinic(&p, &ctl).unwrap();
    assert!(profile_distance(&a, &b) < 1e-6);
}

#[test]
fn spline_reproduces_cubics() {
    let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).powf(1.1)).collect();
    let f = |t: f64| 0.5 * t * t * t - t * t + 2.0;
    let d = |t: f64| 1.5 * t * t - 2.0 * t;
    let dd = |t: f64| 3.0 * t - 2.0;
    let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
    let m = spline_moments(&x, &y, d(x[0]), d(x[19]));
    for (t, mi) in x.iter().zip(&m) {
        assert!((mi - dd(*t)).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn profile_stays_in_the_strip(n in 1u32..=2, k in 1u32..=4, c in 2.0f64..5.0) {
        let wp = wave(n, k, c);
        let rep = verify_asymptotics(&wp, 1e-6);
        for name in ["bounded", "decreasing", "dphi-negative", "departure-slope-positive", "approach-slope-negative"] {
            prop_assert!(rep.get(name).unwrap().passed, "{name}: {:?}", rep.get(name));
        }
        prop_assert!(wp.phi.iter().all(|&f| (0.0..=1.0).contains(&f)));
        prop_assert!(wave_residual(&wp) < 1e-6);
    }
}
