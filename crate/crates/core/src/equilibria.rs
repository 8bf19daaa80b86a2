//! Finite equilibria and their closed-form eigen-data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compact::ChartPoint;
use crate::error::{Error, Result};
use crate::field::{eval_field, ipow, Params, PhasePoint};

/// `|c - 2|` below this resolves to the node side.
pub const NODE_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    StableFocus,
    StableNode,
    UnstableNode,
    Saddle,
    SaddleNode,
    /// Degenerate point described by its sectors, listed counter-clockwise.
    Sectors(Vec<Sector>),
}

impl EquilibriumKind {
    /// Short glyph used on rendered portraits.
    pub fn glyph(&self) -> &'static str {
        match self {
            EquilibriumKind::StableFocus => "sf",
            EquilibriumKind::StableNode => "sn",
            EquilibriumKind::UnstableNode => "un",
            EquilibriumKind::Saddle => "s",
            EquilibriumKind::SaddleNode => "s-n",
            EquilibriumKind::Sectors(_) => "deg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum Location {
    Finite(PhasePoint),
    Chart(ChartPoint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub label: &'static str,
    pub location: Location,
    pub kind: EquilibriumKind,
}

impl Equilibrium {
    pub fn finite_point(&self) -> Option<PhasePoint> {
        match self.location {
            Location::Finite(pt) => Some(pt),
            Location::Chart(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.location, Location::Finite(_))
    }
}

/// Eigenvalues and, when real, eigenvectors normalised as `(a, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    pub values: [Complex64; 2],
    pub vectors: Option<[[f64; 2]; 2]>,
}

impl EigenData {
    pub fn is_real(&self) -> bool {
        self.vectors.is_some()
    }
}

pub fn finite_equilibria(p: &Params) -> Vec<Equilibrium> {
    let mut out = vec![
        Equilibrium {
            label: "E0",
            location: Location::Finite(PhasePoint::new(0.0, 0.0)),
            kind: kind_e0(p),
        },
        Equilibrium {
            label: "E1",
            location: Location::Finite(PhasePoint::new(1.0, 0.0)),
            kind: EquilibriumKind::Saddle,
        },
    ];
    if p.n() % 2 == 0 {
        out.push(Equilibrium {
            label: "E2",
            location: Location::Finite(PhasePoint::new(-1.0, 0.0)),
            kind: EquilibriumKind::Saddle,
        });
    }
    out
}

/// Looks up a finite equilibrium by label.
pub fn finite_equilibrium(p: &Params, label: &str) -> Option<Equilibrium> {
    finite_equilibria(p).into_iter().find(|e| e.label == label)
}

fn kind_e0(p: &Params) -> EquilibriumKind {
    if p.c() < 2.0 - NODE_BAND {
        EquilibriumKind::StableFocus
    } else {
        EquilibriumKind::StableNode
    }
}

fn check_finite(p: &Params, e: &Equilibrium) -> Result<PhasePoint> {
    let pt = e
        .finite_point()
        .ok_or_else(|| Error::NotEquilibrium(format!("{} is not a finite point", e.label)))?;
    let f = eval_field(p, &pt);
    if f[0].hypot(f[1]) > 1e-12 {
        return Err(Error::NotEquilibrium(format!(
            "field does not vanish at ({}, {})",
            pt.x, pt.y
        )));
    }
    Ok(pt)
}

fn real_pair(a: f64, b: f64) -> [Complex64; 2] {
    [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
}

pub fn eigen_data(p: &Params, e: &Equilibrium) -> Result<EigenData> {
    let pt = check_finite(p, e)?;
    let c = p.c();
    let n = p.n() as f64;
    if pt.x == 0.0 && pt.y == 0.0 {
        if c < 2.0 - NODE_BAND {
            let im = (4.0 - c * c).sqrt() / 2.0;
            return Ok(EigenData {
                values: [Complex64::new(-c / 2.0, -im), Complex64::new(-c / 2.0, im)],
                vectors: None,
            });
        }
        let root = (c * c - 4.0).max(0.0).sqrt();
        let l1 = (-c - root) / 2.0;
        let l2 = (-c + root) / 2.0;
        // V1 = (l2, 1) spans the l1 eigenspace because l1 * l2 = 1.
        return Ok(EigenData {
            values: real_pair(l1, l2),
            vectors: Some([[l2, 1.0], [l1, 1.0]]),
        });
    }
    // Saddles at (±1, 0): trace t, determinant -n.
    let t = ipow(pt.x, p.k()) - c;
    let root = (t * t + 4.0 * n).sqrt();
    let mu1 = (t - root) / 2.0;
    let mu2 = (t + root) / 2.0;
    Ok(EigenData {
        values: real_pair(mu1, mu2),
        vectors: Some([[-(t + root) / (2.0 * n), 1.0], [-(t - root) / (2.0 * n), 1.0]]),
    })
}

pub fn classify(p: &Params, e: &Equilibrium) -> Result<EquilibriumKind> {
    let pt = check_finite(p, e)?;
    if pt.x == 0.0 && pt.y == 0.0 {
        Ok(kind_e0(p))
    } else {
        Ok(EquilibriumKind::Saddle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, k: u32, c: f64) -> Params {
        Params::new(n, k, c).unwrap()
    }

    #[test]
    fn inventory() {
        let pts: Vec<_> = finite_equilibria(&p(2, 1, 1.0))
            .iter()
            .map(|e| e.finite_point().unwrap())
            .map(|q| (q.x, q.y))
            .collect();
        assert_eq!(pts, vec![(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0)]);
        assert_eq!(finite_equilibria(&p(1, 3, 2.0)).len(), 2);
        for n in 1..=2 {
            for e in finite_equilibria(&p(n, 3, 0.7)) {
                let f = eval_field(&p(n, 3, 0.7), &e.finite_point().unwrap());
                assert!(f[0].hypot(f[1]) < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_examples() {
        let q = p(1, 1, 2.0);
        let e0 = finite_equilibrium(&q, "E0").unwrap();
        let d = eigen_data(&q, &e0).unwrap();
        assert_eq!(d.values[0].re, -1.0);
        assert_eq!(d.values[1].re, -1.0);

        let e1 = finite_equilibrium(&q, "E1").unwrap();
        let d = eigen_data(&q, &e1).unwrap();
        assert!((d.values[1].re - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert!((d.values[1].re - 0.618034).abs() < 1e-6);

        let q = p(2, 1, 3.0);
        let d = eigen_data(&q, &finite_equilibrium(&q, "E1").unwrap()).unwrap();
        assert!(d.values[0].re < 0.0 && d.values[1].re > 0.0);
    }

    #[test]
    fn classification_examples() {
        let q = p(1, 2, 1.0);
        assert_eq!(
            classify(&q, &finite_equilibrium(&q, "E0").unwrap()).unwrap(),
            EquilibriumKind::StableFocus
        );
        let q = p(2, 1, 2.0);
        assert_eq!(
            classify(&q, &finite_equilibrium(&q, "E0").unwrap()).unwrap(),
            EquilibriumKind::StableNode
        );
        let q = p(2, 4, 0.5);
        assert_eq!(
            classify(&q, &finite_equilibrium(&q, "E2").unwrap()).unwrap(),
            EquilibriumKind::Saddle
        );
    }

    #[test]
    fn node_band_resolves_to_node() {
        let q = p(1, 1, 2.0 - 1e-13);
        assert_eq!(kind_e0(&q), EquilibriumKind::StableNode);
        let q = p(1, 1, 2.0 - 1e-9);
        assert_eq!(kind_e0(&q), EquilibriumKind::StableFocus);
    }

    #[test]
    fn rejects_non_equilibrium() {
        let q = p(1, 1, 1.0);
        let bogus = Equilibrium {
            label: "E9",
            location: Location::Finite(PhasePoint::new(0.5, 0.0)),
            kind: EquilibriumKind::Saddle,
        };
        assert!(matches!(eigen_data(&q, &bogus), Err(Error::NotEquilibrium(_))));
        assert!(classify(&q, &bogus).is_err());
    }

    #[test]
    fn slopes_feed_the_connection_argument() {
        for &c in &[2.0, 2.5, 3.0, 7.0] {
            for n in 1..=2 {
                let q = p(n, 1, c);
                let d0 = eigen_data(&q, &finite_equilibrium(&q, "E0").unwrap()).unwrap();
                let v = d0.vectors.unwrap();
                assert!(1.0 / v[0][0] < 0.0 && 1.0 / v[1][0] < 0.0);
                let d1 = eigen_data(&q, &finite_equilibrium(&q, "E1").unwrap()).unwrap();
                assert!(1.0 / d1.vectors.unwrap()[1][0] > 0.0);
            }
        }
    }
}
