//! Intrinsic and extrinsic tensors of an embedded chart at a point, and the
//! residuals of the Gauss, Codazzi and Ricci equations.

mod christoffel;
mod extrinsic;
mod residual;
mod riemann;

use thiserror::Error;

pub use christoffel::{christoffel, ChristoffelSymbols};
pub use extrinsic::{
    b_invariant, covariant_derivatives, mean_curvature_squared, second_fundamental_form, twisting_vector, Corruption,
    CorruptionMode, CorruptionTarget, ExtrinsicData,
};
pub use residual::{
    codazzi_residual, gauss_residual, gauss_rhs, reconstruction_residual, ricci_residual, Residual, ResidualSet,
};
pub use riemann::{riemann, RiemannTensor};

use crate::dsl::{jet_eval, EmbeddingMap, EvalError};
use crate::frame::{
    build_normal_frame_seeded, induced_metric, tangents, AmbientVectorJet, FrameError, InducedMetric, NormalFrame,
};
use crate::jet::Jet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

impl GeometryError {
    /// Chart artifacts (non-immersive or null points) rather than evaluation failures.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            GeometryError::Frame(FrameError::DegenerateMetric { .. } | FrameError::NullNormalDirection { .. })
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalysisOptions {
    /// Order in which ambient basis vectors seed Gram-Schmidt; identity if `None`.
    pub seed_order: Option<Vec<usize>>,
    /// Perturbation applied to `b` or `A` before the residuals are evaluated.
    pub corruption: Option<Corruption>,
    /// Rescales one normal `(index, factor)` after the frame is built.
    pub normal_scale: Option<(usize, f64)>,
}

/// Everything computed at one chart point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    pub components: Vec<Jet>,
    pub tangents: Vec<AmbientVectorJet>,
    pub metric: InducedMetric,
    pub frame: NormalFrame,
    pub christoffel: ChristoffelSymbols,
    pub riemann: RiemannTensor,
    pub extrinsic: ExtrinsicData,
    pub residuals: ResidualSet,
}

/// Frame-independent scalars at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub scalar_curvature: f64,
    pub kretschmann: f64,
    /// `b_ijA b_klB g^{AB} g^{ik} g^{jl}`.
    pub b_norm_squared: f64,
    pub mean_curvature_squared: f64,
    /// Counts of positive and negative eigenvalues of the induced metric.
    pub metric_signature: (usize, usize),
}

impl PointGeometry {
    pub fn g_inv(&self) -> Vec<Vec<f64>> {
        let n = self.metric.n();
        (0..n).map(|i| (0..n).map(|j| self.metric.inverse_value(i, j)).collect()).collect()
    }

    pub fn invariants(&self) -> Invariants {
        let g_inv = self.g_inv();
        Invariants {
            scalar_curvature: self.riemann.scalar(&g_inv),
            kretschmann: self.riemann.kretschmann(&g_inv),
            b_norm_squared: b_invariant(&self.extrinsic, &self.frame.eps, &g_inv),
            mean_curvature_squared: mean_curvature_squared(&self.extrinsic, &self.frame.eps, &g_inv),
            metric_signature: self.metric.signature(),
        }
    }

    /// The right-hand side of the Gauss equation as a full tensor.
    pub fn gauss_rhs(&self) -> RiemannTensor {
        let eps = &self.frame.eps;
        RiemannTensor::from_fn(self.metric.n(), |a, i, j, k| gauss_rhs(&self.extrinsic, eps, a, i, j, k))
    }
}

/// Runs the full pipeline at `point`: jets, induced metric, normal frame,
/// connection, curvature, `b`, `A`, covariant derivatives and residuals.
pub fn analyze_point(
    map: &EmbeddingMap,
    point: &[f64],
    options: &AnalysisOptions,
) -> Result<PointGeometry, GeometryError> {
    let sig = &map.signature;
    let components = jet_eval(map, point)?;
    let tangents = tangents(&components);
    let metric = induced_metric(&tangents, sig)?;
    let identity: Vec<usize>;
    let seed_order = match &options.seed_order {
        Some(order) => order.as_slice(),
        None => {
            identity = (0..sig.len()).collect();
            &identity
        }
    };
    let mut frame = build_normal_frame_seeded(&tangents, &metric, sig, seed_order)?;
    if let Some((a, factor)) = options.normal_scale {
        frame.normals[a] = frame.normals[a].scale_f64(factor);
    }
    let gamma = christoffel(&metric);
    let curvature = riemann(&gamma, &metric);
    let mut ext = second_fundamental_form(&components, &tangents, &frame, &gamma, sig);
    twisting_vector(&mut ext, &frame, sig);
    if let Some(c) = &options.corruption {
        ext.corrupt(c);
    }
    covariant_derivatives(&mut ext, &gamma);

    let n = map.n();
    let g_inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| metric.inverse_value(i, j)).collect()).collect();
    let eps = &frame.eps;
    let (gauss_formula, weingarten) = reconstruction_residual(&tangents, &frame, &gamma, &ext, &g_inv);
    let residuals = ResidualSet::from_parts(
        gauss_residual(&curvature, &ext, eps),
        codazzi_residual(&ext, eps),
        ricci_residual(&ext, &g_inv, eps),
        gauss_formula,
        weingarten,
    );
    Ok(PointGeometry {
        point: point.to_vec(),
        components,
        tangents,
        metric,
        frame,
        christoffel: gamma,
        riemann: curvature,
        extrinsic: ext,
        residuals,
    })
}

/// Connection and curvature of a metric given directly as jets (no embedding).
pub fn intrinsic_curvature(g: Vec<Vec<Jet>>) -> Result<(InducedMetric, ChristoffelSymbols, RiemannTensor), FrameError> {
    let metric = InducedMetric::from_components(g)?;
    let gamma = christoffel(&metric);
    let curvature = riemann(&gamma, &metric);
    Ok((metric, gamma, curvature))
}
