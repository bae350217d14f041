//! Linear algebra under the flat ambient metric `η`, carried out in jet
//! arithmetic so that every derived quantity keeps its chart derivatives.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::dsl::Signature;
use crate::jet::{self, Jet, JetError};

/// Relative threshold on `|det g|` below which the chart is not an immersion.
pub const DEGENERATE_METRIC_THRESHOLD: f64 = 1e-12;

/// Relative threshold on `|η(w, w)|` below which a normal candidate is null.
pub const NULL_NORMAL_THRESHOLD: f64 = 1e-10;

/// Candidates whose projected size (sup norm, seeds have unit size) is at or
/// below this lie in the span of the tangents and earlier normals.
pub const SPAN_THRESHOLD: f64 = 1e-3;

/// Components below this magnitude are skipped when fixing a normal's sign.
pub const SIGN_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("induced metric is degenerate (|det g| = {det:e}, scale {scale:e})")]
    DegenerateMetric { det: f64, scale: f64 },
    #[error("could only build {found} of {needed} non-null normals")]
    NullNormalDirection { found: usize, needed: usize },
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// An ambient vector whose `D` components are jets over the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientVectorJet(pub Vec<Jet>);

impl AmbientVectorJet {
    /// The constant coordinate basis vector `e_mu`.
    pub fn basis(mu: usize, dim: usize, n: usize) -> AmbientVectorJet {
        AmbientVectorJet((0..dim).map(|nu| Jet::constant(n, if nu == mu { 1.0 } else { 0.0 })).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(Jet::value).collect()
    }

    pub fn derivative(&self, i: usize) -> AmbientVectorJet {
        AmbientVectorJet(self.0.iter().map(|c| c.derivative(i)).collect())
    }

    pub fn scale(&self, factor: &Jet) -> AmbientVectorJet {
        AmbientVectorJet(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn scale_f64(&self, factor: f64) -> AmbientVectorJet {
        AmbientVectorJet(self.0.iter().map(|c| c.scale(factor)).collect())
    }

    pub fn sub(&self, other: &AmbientVectorJet) -> AmbientVectorJet {
        AmbientVectorJet(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn sup_norm(&self) -> f64 {
        self.0.iter().map(|c| c.value().abs()).fold(0.0, f64::max)
    }
}

/// `η(u, v) = Σ_μ η_μμ u^μ v^μ` in jet arithmetic.
pub fn eta_inner(u: &AmbientVectorJet, v: &AmbientVectorJet, sig: &Signature) -> Jet {
    assert_eq!(u.dim(), sig.len(), "vector and signature dimensions differ");
    assert_eq!(v.dim(), sig.len(), "vector and signature dimensions differ");
    let n = u.0[0].n();
    jet::sum(n, u.0.iter().zip(&v.0).enumerate().map(|(mu, (a, b))| (a * b).scale(sig.eta(mu))))
}

/// Tangent vectors `Y_{,i}` of an embedding from the jets of its components.
pub fn tangents(components: &[Jet]) -> Vec<AmbientVectorJet> {
    let n = components[0].n();
    (0..n).map(|i| AmbientVectorJet(components.iter().map(|c| c.derivative(i)).collect())).collect()
}

/// A metric `g_ij` with its inverse and determinant, all as jets.
#[derive(Debug, Clone)]
pub struct InducedMetric {
    pub g: Vec<Vec<Jet>>,
    pub g_inv: Vec<Vec<Jet>>,
    pub det: Jet,
}

impl InducedMetric {
    /// Builds the metric from its components. Only the upper triangle of `g`
    /// is read; the lower one is mirrored from it.
    pub fn from_components(mut g: Vec<Vec<Jet>>) -> Result<InducedMetric, FrameError> {
        let n = g.len();
        for i in 0..n {
            for j in 0..i {
                g[i][j] = g[j][i].clone();
            }
        }
        let scale = g.iter().flatten().map(|c| c.value().abs()).fold(0.0, f64::max).powi(n as i32);
        let degenerate = |det: f64| FrameError::DegenerateMetric { det, scale };

        // Gauss-Jordan elimination; pivots are chosen from the point values.
        let jn = g[0][0].n();
        let mut a = g.clone();
        let mut inv: Vec<Vec<Jet>> =
            (0..n).map(|i| (0..n).map(|j| Jet::constant(jn, if i == j { 1.0 } else { 0.0 })).collect()).collect();
        let mut det = Jet::constant(jn, 1.0);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
                .expect("non-empty pivot range");
            if pivot_row != col {
                a.swap(pivot_row, col);
                inv.swap(pivot_row, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det = &det * &pivot;
            if pivot.value().abs() < jet::DIVISION_EPSILON {
                return Err(degenerate(0.0));
            }
            for j in 0..n {
                a[col][j] = a[col][j].checked_div(&pivot)?;
                inv[col][j] = inv[col][j].checked_div(&pivot)?;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                    inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
                }
            }
        }
        if !(det.value().abs() >= DEGENERATE_METRIC_THRESHOLD * scale) {
            return Err(degenerate(det.value()));
        }
        // The inverse of a symmetric matrix is symmetric; average away rounding.
        for i in 0..n {
            for j in 0..i {
                let avg = (&inv[i][j] + &inv[j][i]).scale(0.5);
                inv[i][j] = avg.clone();
                inv[j][i] = avg;
            }
        }
        Ok(InducedMetric { g, g_inv: inv, det })
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.g[i][j].value()
    }

    pub fn inverse_value(&self, i: usize, j: usize) -> f64 {
        self.g_inv[i][j].value()
    }

    pub fn value_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.value(i, j))
    }

    /// Eigenvalues of `g` at the expansion point, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.value_matrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `(positive, negative)` eigenvalue counts of `g` at the expansion point.
    pub fn signature(&self) -> (usize, usize) {
        let ev = self.eigenvalues();
        let neg = ev.iter().filter(|&&e| e < 0.0).count();
        (ev.len() - neg, neg)
    }

    /// Max-abs entry of `g g^{-1} - I` at the expansion point.
    pub fn inverse_residual(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| self.value(i, k) * self.inverse_value(k, j)).sum();
                worst = worst.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }
}

/// `g_ij = η(Y_{,i}, Y_{,j})`.
pub fn induced_metric(tangents: &[AmbientVectorJet], sig: &Signature) -> Result<InducedMetric, FrameError> {
    let n = tangents.len();
    let jn = tangents[0].0[0].n();
    let mut g = vec![vec![Jet::zero(jn); n]; n];
    for i in 0..n {
        for j in i..n {
            g[i][j] = eta_inner(&tangents[i], &tangents[j], sig);
        }
    }
    InducedMetric::from_components(g)
}

/// Orthonormal normal frame: `η(N_A, N_B) = ε_A δ_AB`, `η(N_A, Y_{,i}) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFrame {
    pub normals: Vec<AmbientVectorJet>,
    pub eps: Vec<i8>,
    /// Ambient basis index each normal was grown from.
    pub seeds: Vec<usize>,
}

impl NormalFrame {
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn eps_f64(&self, a: usize) -> f64 {
        f64::from(self.eps[a])
    }
}

fn project_out(
    w: &AmbientVectorJet,
    tangents: &[AmbientVectorJet],
    metric: &InducedMetric,
    accepted: &[AmbientVectorJet],
    sig: &Signature,
) -> Result<AmbientVectorJet, FrameError> {
    let n = tangents.len();
    let jn = w.0[0].n();
    let pairings: Vec<Jet> = tangents.iter().map(|t| eta_inner(w, t, sig)).collect();
    let mut out = w.clone();
    for i in 0..n {
        let coeff = jet::sum(jn, (0..n).map(|j| &metric.g_inv[i][j] * &pairings[j]));
        out = out.sub(&tangents[i].scale(&coeff));
    }
    for u in accepted {
        let coeff = eta_inner(&out, u, sig).checked_div(&eta_inner(u, u, sig))?;
        out = out.sub(&u.scale(&coeff));
    }
    Ok(out)
}

/// Gram-Schmidt from the ambient basis vectors in index order.
pub fn build_normal_frame(
    tangents: &[AmbientVectorJet],
    metric: &InducedMetric,
    sig: &Signature,
) -> Result<NormalFrame, FrameError> {
    let order: Vec<usize> = (0..sig.len()).collect();
    build_normal_frame_seeded(tangents, metric, sig, &order)
}

/// Gram-Schmidt from the ambient basis vectors taken in `seed_order`.
///
/// Each seed `e_μ` is projected η-orthogonally off the tangent space and the
/// normals accepted so far (twice, to clean up rounding). A candidate is
/// rejected when it has (numerically) collapsed into that span or when it is
/// null, `|η(w, w)| < 1e-10 ‖w‖²_∞`. Accepted candidates are scaled to unit
/// η-length and signed so that their first non-negligible component is positive.
pub fn build_normal_frame_seeded(
    tangents: &[AmbientVectorJet],
    metric: &InducedMetric,
    sig: &Signature,
    seed_order: &[usize],
) -> Result<NormalFrame, FrameError> {
    let dim = sig.len();
    let n = tangents.len();
    let jn = tangents[0].0[0].n();
    let needed = dim - n;
    let mut normals: Vec<AmbientVectorJet> = Vec::with_capacity(needed);
    let mut eps = Vec::with_capacity(needed);
    let mut seeds = Vec::with_capacity(needed);
    for &mu in seed_order {
        if normals.len() == needed {
            break;
        }
        let seed = AmbientVectorJet::basis(mu, dim, jn);
        let once = project_out(&seed, tangents, metric, &normals, sig)?;
        let w = project_out(&once, tangents, metric, &normals, sig)?;
        let size = w.sup_norm();
        if size <= SPAN_THRESHOLD {
            continue;
        }
        let norm2 = eta_inner(&w, &w, sig);
        if norm2.value().abs() < NULL_NORMAL_THRESHOLD * size * size {
            continue;
        }
        let sign: i8 = if norm2.value() > 0.0 { 1 } else { -1 };
        let length = norm2.scale(f64::from(sign)).sqrt()?;
        let mut unit = AmbientVectorJet(w.0.iter().map(|c| c.checked_div(&length)).collect::<Result<_, _>>()?);
        let leading = unit.0.iter().map(Jet::value).find(|v| v.abs() > SIGN_THRESHOLD);
        if leading.is_some_and(|v| v < 0.0) {
            unit = unit.scale_f64(-1.0);
        }
        normals.push(unit);
        eps.push(sign);
        seeds.push(mu);
    }
    if normals.len() < needed {
        return Err(FrameError::NullNormalDirection { found: normals.len(), needed });
    }
    Ok(NormalFrame { normals, eps, seeds })
}

/// Max-abs of `η(N_A, Y_{,i})` and of `η(N_A, N_B) - ε_A δ_AB` at the point.
pub fn frame_residuals(tangents: &[AmbientVectorJet], frame: &NormalFrame, sig: &Signature) -> (f64, f64) {
    let mut tangency: f64 = 0.0;
    let mut orthonormality: f64 = 0.0;
    for (a, na) in frame.normals.iter().enumerate() {
        for t in tangents {
            tangency = tangency.max(eta_inner(na, t, sig).value().abs());
        }
        for (b, nb) in frame.normals.iter().enumerate() {
            let target = if a == b { frame.eps_f64(a) } else { 0.0 };
            orthonormality = orthonormality.max((eta_inner(na, nb, sig).value() - target).abs());
        }
    }
    (tangency, orthonormality)
}

/// `|det|` of the D×D matrix with columns `Y_{,i}` and `N_A` at the point.
pub fn completeness(tangents: &[AmbientVectorJet], frame: &NormalFrame) -> f64 {
    let columns: Vec<Vec<f64>> = tangents.iter().chain(&frame.normals).map(AmbientVectorJet::values).collect();
    let dim = columns.len();
    DMatrix::from_fn(dim, dim, |row, col| columns[col][row]).determinant().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{jet_eval, parse_embedding};

    fn constant_vector(values: &[f64], n: usize) -> AmbientVectorJet {
        AmbientVectorJet(values.iter().map(|&v| Jet::constant(n, v)).collect())
    }

    fn sig(signs: &[i8]) -> Signature {
        Signature::new(signs.to_vec()).unwrap()
    }

    #[test]
    fn eta_inner_products() {
        let e = constant_vector(&[1.0, 0.0, 0.0], 1);
        assert_eq!(eta_inner(&e, &e, &sig(&[1, 1, 1])), Jet::constant(1, 1.0));
        let t = constant_vector(&[1.0, 0.0, 0.0, 0.0, 0.0], 1);
        assert_eq!(eta_inner(&t, &t, &sig(&[-1, 1, 1, 1, 1])), Jet::constant(1, -1.0));
        let null = constant_vector(&[1.0, 1.0], 1);
        assert_eq!(eta_inner(&null, &null, &sig(&[-1, 1])).value(), 0.0);
    }

    fn setup(src: &str, point: &[f64]) -> (Vec<AmbientVectorJet>, Result<InducedMetric, FrameError>, Signature) {
        let map = parse_embedding(src).unwrap();
        let jets = jet_eval(&map, point).unwrap();
        let t = tangents(&jets);
        let g = induced_metric(&t, &map.signature);
        (t, g, map.signature)
    }

    const PLANE: &str = r#"embedding "p" { chart x in (-1,1), y in (-1,1); ambient signature (+,+,+); map x; y; 0; }"#;
    const SPHERE: &str = r#"embedding "s" { chart th in (0,3.1416), ph in (-3.1,3.1);
        ambient signature (+,+,+); map sin(th)*cos(ph); sin(th)*sin(ph); cos(th); }"#;

    #[test]
    fn plane_metric_and_normal() {
        let (t, g, s) = setup(PLANE, &[0.2, -0.4]);
        let g = g.unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.value(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let frame = build_normal_frame(&t, &g, &s).unwrap();
        assert_eq!(frame.eps, vec![1]);
        assert_eq!(frame.normals[0].values(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn sphere_metric_matches_closed_form() {
        let th = 0.8;
        let (_, g, _) = setup(SPHERE, &[th, 0.3]);
        let g = g.unwrap();
        assert!((g.value(0, 0) - 1.0).abs() < 1e-15);
        assert!(g.value(0, 1).abs() < 1e-15);
        assert!((g.value(1, 1) - th.sin().powi(2)).abs() < 1e-15);
        // ∂_θ g_φφ = 2 sinθ cosθ
        assert!((g.g[1][1].partial(&[0]) - 2.0 * th.sin() * th.cos()).abs() < 1e-14);
        assert!(g.inverse_residual() < 1e-12);
    }

    #[test]
    fn sphere_pole_is_degenerate() {
        let (_, g, _) = setup(SPHERE, &[5e-8, 0.3]);
        assert!(matches!(g, Err(FrameError::DegenerateMetric { .. })));
    }

    #[test]
    fn de_sitter_normal_is_spacelike() {
        let src = r#"embedding "ds" { chart t in (-1,1), chi in (0.3,2.8), th in (0.3,2.8), ph in (-3,3);
            ambient signature (-,+,+,+,+);
            map sinh(t); cosh(t)*cos(chi); cosh(t)*sin(chi)*cos(th);
                cosh(t)*sin(chi)*sin(th)*cos(ph); cosh(t)*sin(chi)*sin(th)*sin(ph); }"#;
        let p = [0.3, 1.1, 0.7, -2.0];
        let (t, g, s) = setup(src, &p);
        let g = g.unwrap();
        assert_eq!(g.signature(), (3, 1));
        let frame = build_normal_frame(&t, &g, &s).unwrap();
        assert_eq!(frame.eps, vec![1]);
        // the radial direction Y / r with r = 1
        let map = parse_embedding(src).unwrap();
        let y: Vec<f64> = jet_eval(&map, &p).unwrap().iter().map(Jet::value).collect();
        for (a, b) in frame.normals[0].values().iter().zip(&y) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_torus_normals() {
        let src = r#"embedding "t" { chart a in (-3,3), b in (-3,3); ambient signature (+,+,+,+);
            map cos(a); sin(a); cos(b); sin(b); }"#;
        let (a, b) = (0.4, -1.3);
        let (t, g, s) = setup(src, &[a, b]);
        let frame = build_normal_frame(&t, &g.unwrap(), &s).unwrap();
        assert_eq!(frame.eps, vec![1, 1]);
        let expect = [[a.cos(), a.sin(), 0.0, 0.0], [0.0, 0.0, b.cos(), b.sin()]];
        for (normal, want) in frame.normals.iter().zip(expect) {
            for (x, y) in normal.values().iter().zip(want) {
                assert!((x - y).abs() < 1e-14, "{:?} vs {want:?}", normal.values());
            }
        }
        let (tan, orth) = frame_residuals(&t, &frame, &s);
        assert!(tan < 1e-14 && orth < 1e-14);
        assert!(completeness(&t, &frame) > 0.5);
    }

    #[test]
    fn null_candidates_are_skipped() {
        // T = (1,1,1) is spacelike in (-,+,+); its normal plane is Lorentzian and
        // the projection of e_1 onto it, (-1, 0, -1), is null
        let s = sig(&[-1, 1, 1]);
        let t = vec![constant_vector(&[1.0, 1.0, 1.0], 1)];
        let g = induced_metric(&t, &s).unwrap();
        let frame = build_normal_frame_seeded(&t, &g, &s, &[1, 0, 2]).unwrap();
        assert_eq!(frame.seeds, vec![0, 2]);
        assert_eq!(frame.eps.iter().filter(|&&e| e < 0).count(), 1);
        let (tan, orth) = frame_residuals(&t, &frame, &s);
        assert!(tan < 1e-14 && orth < 1e-14);
        assert_eq!(
            build_normal_frame_seeded(&t, &g, &s, &[1]),
            Err(FrameError::NullNormalDirection { found: 0, needed: 2 })
        );
    }

    #[test]
    fn null_tangent_is_degenerate() {
        let s = sig(&[-1, 1, 1]);
        let t = vec![constant_vector(&[1.0, 1.0, 0.0], 1)];
        assert!(matches!(induced_metric(&t, &s), Err(FrameError::DegenerateMetric { .. })));
    }

    #[test]
    fn seed_order_changes_frame_not_validity() {
        let (t, g, s) = setup(SPHERE, &[1.1, 0.4]);
        let g = g.unwrap();
        let a = build_normal_frame_seeded(&t, &g, &s, &[0, 1, 2]).unwrap();
        let b = build_normal_frame_seeded(&t, &g, &s, &[2, 1, 0]).unwrap();
        assert_eq!(a.seeds, vec![0]);
        assert_eq!(b.seeds, vec![2]);
        assert_eq!(a, build_normal_frame(&t, &g, &s).unwrap());
    }
}
