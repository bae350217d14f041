//! Reference embeddings with known frame-independent geometry.

use thiserror::Error;

use crate::dsl::{parse_embedding, parse_expression, EmbeddingMap, EvalError, ParseError};
use crate::frame::FrameError;
use crate::geometry::{intrinsic_curvature, Invariants, RiemannTensor};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvariantKind {
    ScalarCurvature,
    Kretschmann,
    /// `b_ijA b_klB g^{AB} g^{ik} g^{jl}`.
    BNormSquared,
    MeanCurvatureSquared,
}

impl InvariantKind {
    pub fn name(self) -> &'static str {
        match self {
            InvariantKind::ScalarCurvature => "scalar-curvature",
            InvariantKind::Kretschmann => "kretschmann",
            InvariantKind::BNormSquared => "b-norm-squared",
            InvariantKind::MeanCurvatureSquared => "mean-curvature-squared",
        }
    }

    pub fn of(self, inv: &Invariants) -> f64 {
        match self {
            InvariantKind::ScalarCurvature => inv.scalar_curvature,
            InvariantKind::Kretschmann => inv.kretschmann,
            InvariantKind::BNormSquared => inv.b_norm_squared,
            InvariantKind::MeanCurvatureSquared => inv.mean_curvature_squared,
        }
    }
}

/// A scalar invariant with its closed form in the entry's chart variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedFact {
    pub invariant: InvariantKind,
    pub expression: &'static str,
    /// Relative: `|got - want| ≤ tolerance · max(|want|, 1)`.
    pub tolerance: f64,
}

impl ExpectedFact {
    /// Evaluates the closed form at `point` of `map`'s chart.
    pub fn expected(&self, map: &EmbeddingMap, point: &[f64]) -> Result<f64, FactError> {
        let vars: Vec<&str> = map.variables.iter().map(String::as_str).collect();
        let expr = parse_expression(self.expression, &vars)?;
        Ok(expr.eval(point)?)
    }

    pub fn holds(&self, got: f64, want: f64) -> bool {
        (got - want).abs() <= self.tolerance * want.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub n: usize,
    pub dim: usize,
    pub signature: &'static [i8],
    /// Counts of positive and negative eigenvalues of the induced metric.
    pub metric_signature: (usize, usize),
    pub facts: &'static [ExpectedFact],
}

impl CatalogEntry {
    pub fn parse(&self) -> EmbeddingMap {
        parse_embedding(self.source).unwrap_or_else(|e| panic!("catalog entry {} does not parse: {e}", self.name))
    }
}

const fn fact(invariant: InvariantKind, expression: &'static str, tolerance: f64) -> ExpectedFact {
    ExpectedFact { invariant, expression, tolerance }
}

use InvariantKind::*;

static ENTRIES: [CatalogEntry; 6] = [
    CatalogEntry {
        name: "euclidean-plane",
        source: include_str!("../catalog/euclidean-plane.emb"),
        n: 2,
        dim: 3,
        signature: &[1, 1, 1],
        metric_signature: (2, 0),
        facts: &[
            fact(ScalarCurvature, "0", 1e-12),
            fact(Kretschmann, "0", 1e-12),
            fact(BNormSquared, "0", 1e-12),
            fact(MeanCurvatureSquared, "0", 1e-12),
        ],
    },
    CatalogEntry {
        name: "unit-sphere",
        source: include_str!("../catalog/unit-sphere.emb"),
        n: 2,
        dim: 3,
        signature: &[1, 1, 1],
        metric_signature: (2, 0),
        facts: &[
            fact(ScalarCurvature, "2", 1e-8),
            fact(Kretschmann, "4", 1e-8),
            fact(BNormSquared, "2", 1e-9),
            fact(MeanCurvatureSquared, "1", 1e-9),
        ],
    },
    CatalogEntry {
        name: "cylinder",
        source: include_str!("../catalog/cylinder.emb"),
        n: 2,
        dim: 3,
        signature: &[1, 1, 1],
        metric_signature: (2, 0),
        facts: &[
            fact(ScalarCurvature, "0", 1e-10),
            fact(BNormSquared, "1", 1e-10),
            fact(MeanCurvatureSquared, "0.25", 1e-10),
        ],
    },
    CatalogEntry {
        name: "flat-torus-r4",
        source: include_str!("../catalog/flat-torus-r4.emb"),
        n: 2,
        dim: 4,
        signature: &[1, 1, 1, 1],
        metric_signature: (2, 0),
        facts: &[
            fact(ScalarCurvature, "0", 1e-10),
            fact(BNormSquared, "2", 1e-10),
            fact(MeanCurvatureSquared, "0.5", 1e-10),
        ],
    },
    CatalogEntry {
        name: "de-sitter",
        source: include_str!("../catalog/de-sitter.emb"),
        n: 4,
        dim: 5,
        signature: &[-1, 1, 1, 1, 1],
        metric_signature: (3, 1),
        facts: &[
            fact(ScalarCurvature, "12", 1e-6),
            fact(Kretschmann, "24", 1e-6),
            fact(BNormSquared, "4", 1e-8),
            fact(MeanCurvatureSquared, "1", 1e-8),
        ],
    },
    CatalogEntry {
        name: "schwarzschild-6d",
        source: include_str!("../catalog/schwarzschild-6d.emb"),
        n: 4,
        dim: 6,
        signature: &[-1, 1, 1, 1, 1, 1],
        metric_signature: (3, 1),
        facts: &[fact(ScalarCurvature, "0", 1e-6), fact(Kretschmann, "48 / r^6", 1e-6)],
    },
];

pub fn catalog_entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn find(name: &str) -> Option<&'static CatalogEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("point lies on or inside the horizon (r = {r}, 2m = {horizon})")]
    InsideHorizon { r: f64, horizon: f64 },
    #[error("expected a chart point (t, r, theta, phi), got {0} coordinates")]
    Dimension(usize),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// Riemann tensor of the exterior Schwarzschild metric
/// `diag(-(1 - 2m/r), 1/(1 - 2m/r), r², r² sin²θ)` at `(t, r, θ, φ)`,
/// computed from the metric alone.
pub fn expected_schwarzschild_riemann(point: &[f64], mass: f64) -> Result<RiemannTensor, CurvatureError> {
    schwarzschild_curvature(point, mass).map(|(_, curvature)| curvature)
}

/// `R_abcd R^abcd` of the exterior Schwarzschild metric via the same pipeline.
pub fn expected_schwarzschild_kretschmann(point: &[f64], mass: f64) -> Result<f64, CurvatureError> {
    let (g_inv, curvature) = schwarzschild_curvature(point, mass)?;
    Ok(curvature.kretschmann(&g_inv))
}

fn schwarzschild_curvature(point: &[f64], mass: f64) -> Result<(Vec<Vec<f64>>, RiemannTensor), CurvatureError> {
    let &[_, r, theta, _] = point else {
        return Err(CurvatureError::Dimension(point.len()));
    };
    if !(r > 2.0 * mass) {
        return Err(CurvatureError::InsideHorizon { r, horizon: 2.0 * mass });
    }
    let n = 4;
    let rj = Jet::var(1, r, n);
    let f = Jet::constant(n, 1.0) - (Jet::constant(n, 2.0 * mass).checked_div(&rj).map_err(FrameError::from)?);
    let f_inv = f.recip().map_err(FrameError::from)?;
    let r2 = &rj * &rj;
    let s = Jet::var(2, theta, n).sin();
    let mut g = vec![vec![Jet::zero(n); n]; n];
    g[0][0] = -f;
    g[1][1] = f_inv;
    g[3][3] = &r2 * &(&s * &s);
    g[2][2] = r2;
    let (metric, _, curvature) = intrinsic_curvature(g)?;
    let g_inv = (0..n).map(|i| (0..n).map(|j| metric.inverse_value(i, j)).collect()).collect();
    Ok((g_inv, curvature))
}
