use bh_core::field::Params;
use bh_core::flow::{cycle_search, CycleBudget, CycleEvidence, IntegratorControls, LimitSet, Window};
use bh_core::par::Execution;
use bh_core::portrait::{
    classify_portrait_with, export_portrait, portrait_class, seed_manifold, trace_separatrices, Branch,
    EquivalenceClass, FixtureSource, PortraitTag, Side, Stability, DEFAULT_SEED_EPS, NO_CYCLE_CAVEAT,
};

fn params(t: PortraitTag) -> Params {
    let (n, k, c) = t.representative();
    Params::new(n, k, c).unwrap()
}

#[test]
fn representatives_classify_to_their_own_tag() {
    for t in PortraitTag::ALL {
        assert_eq!(portrait_class(&params(t)).tag, t);
    }
}

#[test]
fn representatives_match_connection_fixtures() {
    let ctl = IntegratorControls::separatrix();
    for t in PortraitTag::ALL {
        let r = classify_portrait_with(&params(t), &ctl, DEFAULT_SEED_EPS, Execution::available()).unwrap();
        let bad: Vec<_> = r.connections.iter().filter(|c| !c.matches()).collect();
        assert!(r.evidence_match, "{}: {bad:?}", t.as_str());
    }
}

#[test]
fn connections_survive_seed_offset_halving() {
    let ctl = IntegratorControls::separatrix();
    for t in [PortraitTag::I, PortraitTag::IV2, PortraitTag::VI1, PortraitTag::VII2] {
        let p = params(t);
        let a = classify_portrait_with(&p, &ctl, DEFAULT_SEED_EPS, Execution::Sequential).unwrap();
        let b = classify_portrait_with(&p, &ctl, DEFAULT_SEED_EPS / 2.0, Execution::Sequential).unwrap();
        let far = |r: &bh_core::portrait::PortraitReport| r.connections.iter().map(|c| c.traced).collect::<Vec<_>>();
        assert_eq!(far(&a), far(&b), "{}", t.as_str());
    }
}

#[test]
fn node_variants_share_a_class() {
    let pairs = [
        (PortraitTag::III1, PortraitTag::III2),
        (PortraitTag::IV1, PortraitTag::IV2),
        (PortraitTag::V1, PortraitTag::V2),
        (PortraitTag::VI1, PortraitTag::VI2),
        (PortraitTag::VII1, PortraitTag::VII2),
    ];
    for (a, b) in pairs {
        assert_eq!(a.equivalence_class(), b.equivalence_class());
    }
    let mut classes: Vec<EquivalenceClass> = PortraitTag::ALL.iter().map(|t| t.equivalence_class()).collect();
    classes.dedup();
    assert_eq!(classes.len(), 7);
}

#[test]
fn decision_table_boundaries() {
    let tag = |n, k, c| portrait_class(&Params::new(n, k, c).unwrap()).tag;
    assert_eq!(tag(1, 3, 0.99), PortraitTag::I);
    assert_eq!(tag(1, 5, 1.0), PortraitTag::II);
    assert_eq!(tag(1, 3, 1.01), PortraitTag::III1);
    assert_eq!(tag(1, 3, 2.0), PortraitTag::III2);
    assert_eq!(tag(1, 4, 0.2), PortraitTag::IV1);
    assert_eq!(tag(2, 1, 2.0), PortraitTag::V2);
    assert_eq!(tag(2, 6, 1.99), PortraitTag::VI1);
    assert_eq!(tag(2, 5, 7.0), PortraitTag::VII2);
}

#[test]
fn only_class_i_carries_the_caveat() {
    let ctl = IntegratorControls::separatrix();
    for t in PortraitTag::ALL {
        let r = classify_portrait_with(&params(t), &ctl, DEFAULT_SEED_EPS, Execution::available()).unwrap();
        let want = (t == PortraitTag::I).then_some(NO_CYCLE_CAVEAT);
        assert_eq!(r.caveat, want, "{}", t.as_str());
    }
}

#[test]
fn no_cycle_witness_for_strong_damping() {
    let budget = CycleBudget {
        grid: 6,
        ..CycleBudget::default()
    };
    for t in PortraitTag::ALL.into_iter().filter(|t| t.representative().2 >= 1.0) {
        let r = cycle_search(&params(t), &Window::default(), &budget);
        assert!(matches!(r, CycleEvidence::Exhausted { .. }), "{}: {r:?}", t.as_str());
    }
}

#[test]
fn stated_and_derived_fixtures() {
    use bh_core::portrait::expected_connections;
    for t in PortraitTag::ALL {
        let cls = t.equivalence_class();
        let (src, rows) = expected_connections(cls);
        let stated = matches!(cls, EquivalenceClass::I | EquivalenceClass::II | EquivalenceClass::III);
        assert_eq!(src == FixtureSource::Stated, stated);
        let saddles = if t.representative().0 == 1 { 1 } else { 2 };
        assert_eq!(rows.len(), 4 * saddles);
    }
}

#[test]
fn seeding_rejects_non_saddles_and_bad_offsets() {
    use bh_core::equilibria::finite_equilibria;
    let p = Params::new(1, 1, 1.0).unwrap();
    let eqs = finite_equilibria(&p);
    let e0 = eqs.iter().find(|e| e.label == "E0").unwrap();
    let e1 = eqs.iter().find(|e| e.label == "E1").unwrap();
    let b = Branch { stability: Stability::Unstable, side: Side::Plus };
    assert!(seed_manifold(&p, e0, b, 1e-6).is_err());
    assert!(seed_manifold(&p, e1, b, 0.0).is_err());
    let q = seed_manifold(&p, e1, b, 1e-6).unwrap();
    assert!(q.y > 0.0);
    assert!(((q.x - 1.0).hypot(q.y) - 1e-6).abs() < 1e-15);
}

#[test]
fn separatrices_start_at_their_saddle() {
    let p = params(PortraitTag::V1);
    let seps = trace_separatrices(&p, &IntegratorControls::separatrix()).unwrap();
    assert_eq!(seps.len(), 8);
    for s in &seps {
        assert_ne!(s.far_end(), LimitSet::Inconclusive, "{} {:?}", s.origin, s.branch);
        assert!(s.path.iter().all(|d| d.radius() <= 1.0 + 1e-12));
    }
}

#[test]
fn exported_document_is_deterministic() {
    let p = params(PortraitTag::III2);
    let ctl = IntegratorControls::separatrix();
    let a = serde_json::to_string(&export_portrait(&p, &ctl).unwrap()).unwrap();
    let b = serde_json::to_string(&export_portrait(&p, &ctl).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn exported_document_shape() {
    let ctl = IntegratorControls::separatrix();
    for t in [PortraitTag::I, PortraitTag::III2, PortraitTag::VII1, PortraitTag::VII2] {
        let p = params(t);
        let d = export_portrait(&p, &ctl).unwrap();
        for m in &d.equilibria {
            assert!(m.x.hypot(m.y) <= 1.0 + 1e-12, "{}", m.label);
        }
        for s in &d.separatrices {
            assert!(s.points.iter().all(|q| q[0].hypot(q[1]) <= 1.0 + 1e-12));
        }
        assert_eq!(!d.highlight.is_empty(), p.c() >= 2.0, "{}", t.as_str());
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["class"]["class"]["tag"], t.as_str());
        assert_eq!(v["class"]["class"]["equivalence_class"], t.equivalence_class().as_str());
        assert!(v["equilibria"][0].get("X").is_some());
    }
}
