use super::christoffel::ChristoffelSymbols;
use super::extrinsic::ExtrinsicData;
use super::riemann::RiemannTensor;
use crate::frame::{AmbientVectorJet, NormalFrame};

/// Max-abs mismatch of an identity together with the size of the tensors it compares.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residual {
    pub residual: f64,
    pub scale: f64,
}

impl Residual {
    fn record(&mut self, lhs: f64, rhs: f64) {
        // NaN must not be swallowed by `max`
        let diff = (lhs - rhs).abs();
        self.residual = if diff.is_nan() { f64::NAN } else { self.residual.max(diff) };
        self.scale = self.scale.max(lhs.abs()).max(rhs.abs());
    }
}

/// All integrability and reconstruction residuals at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualSet {
    pub gauss: f64,
    pub codazzi: f64,
    pub ricci: f64,
    pub gauss_formula: f64,
    pub weingarten: f64,
    /// Largest magnitude among all compared tensors.
    pub scale: f64,
}

impl ResidualSet {
    pub fn from_parts(
        gauss: Residual,
        codazzi: Residual,
        ricci: Residual,
        gauss_formula: Residual,
        weingarten: Residual,
    ) -> ResidualSet {
        let scale = [gauss, codazzi, ricci, gauss_formula, weingarten].iter().map(|r| r.scale).fold(0.0, f64::max);
        ResidualSet {
            gauss: gauss.residual,
            codazzi: codazzi.residual,
            ricci: ricci.residual,
            gauss_formula: gauss_formula.residual,
            weingarten: weingarten.residual,
            scale,
        }
    }

    pub fn reconstruction(&self) -> f64 {
        nan_max(self.gauss_formula, self.weingarten)
    }

    /// The four reported residuals: gauss, codazzi, ricci, reconstruction.
    pub fn reported(&self) -> [f64; 4] {
        [self.gauss, self.codazzi, self.ricci, self.reconstruction()]
    }

    pub fn max(&self) -> f64 {
        self.reported().into_iter().fold(0.0, nan_max)
    }

    /// `true` iff every residual is finite and `≤ tol · max(scale, 1)`.
    pub fn passes(&self, tol: f64) -> bool {
        let bound = tol * self.scale.max(1.0);
        self.reported().iter().all(|r| r.is_finite() && *r <= bound)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// `R_nijk` against `ε_A (b_ikA b_jnA - b_ijA b_knA)`.
pub fn gauss_residual(r: &RiemannTensor, ext: &ExtrinsicData, eps: &[i8]) -> Residual {
    let n = r.n();
    let mut out = Residual::default();
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.record(r.get(a, i, j, k), gauss_rhs(ext, eps, a, i, j, k));
                }
            }
        }
    }
    out
}

/// Right-hand side of the Gauss equation for one component.
pub fn gauss_rhs(ext: &ExtrinsicData, eps: &[i8], a: usize, i: usize, j: usize, k: usize) -> f64 {
    eps.iter()
        .enumerate()
        .map(|(c, &e)| {
            f64::from(e) * (ext.b_value(i, k, c) * ext.b_value(j, a, c) - ext.b_value(i, j, c) * ext.b_value(k, a, c))
        })
        .sum()
}

/// `b_ijC;k - b_ikC;j` against `ε_A (b_ijA A_kAC - b_ikA A_jAC)`.
pub fn codazzi_residual(ext: &ExtrinsicData, eps: &[i8]) -> Residual {
    let n = ext.n();
    let mut out = Residual::default();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for c in 0..ext.codim() {
                    let lhs = ext.cov_b(i, j, c, k) - ext.cov_b(i, k, c, j);
                    let rhs: f64 = eps
                        .iter()
                        .enumerate()
                        .map(|(a, &e)| {
                            f64::from(e)
                                * (ext.b_value(i, j, a) * ext.twist_value(k, a, c)
                                    - ext.b_value(i, k, a) * ext.twist_value(j, a, c))
                        })
                        .sum();
                    out.record(lhs, rhs);
                }
            }
        }
    }
    out
}

/// `A_jAB;k - A_kAB;j` against
/// `ε_M (A_jAM A_kMB - A_kAM A_jMB) + g^{ml} (b_kmA b_ljB - b_jmA b_lkB)`.
pub fn ricci_residual(ext: &ExtrinsicData, g_inv: &[Vec<f64>], eps: &[i8]) -> Residual {
    let n = ext.n();
    let codim = ext.codim();
    let mut out = Residual::default();
    for j in 0..n {
        for k in 0..n {
            for a in 0..codim {
                for b in 0..codim {
                    let lhs = ext.cov_twist(j, a, b, k) - ext.cov_twist(k, a, b, j);
                    let mut rhs = 0.0;
                    for (m, &e) in eps.iter().enumerate() {
                        rhs += f64::from(e)
                            * (ext.twist_value(j, a, m) * ext.twist_value(k, m, b)
                                - ext.twist_value(k, a, m) * ext.twist_value(j, m, b));
                    }
                    for m in 0..n {
                        for l in 0..n {
                            rhs += g_inv[m][l]
                                * (ext.b_value(k, m, a) * ext.b_value(l, j, b)
                                    - ext.b_value(j, m, a) * ext.b_value(l, k, b));
                        }
                    }
                    out.record(lhs, rhs);
                }
            }
        }
    }
    out
}

/// Ambient decompositions of `Y_,ij` and `N_A,j` in the frame `{Y_,i, N_A}`:
///
/// * `Y_,ij = Γ^r_ij Y_,r + ε_A b_ijA N_A`
/// * `N_A,j = -g^{ml} b_jmA Y_,l + ε_M A_jMA N_M`
///
/// Returns `(gauss_formula, weingarten)`.
pub fn reconstruction_residual(
    tangents: &[AmbientVectorJet],
    frame: &NormalFrame,
    gamma: &ChristoffelSymbols,
    ext: &ExtrinsicData,
    g_inv: &[Vec<f64>],
) -> (Residual, Residual) {
    let n = tangents.len();
    let dim = tangents[0].dim();
    let eps = &frame.eps;
    let tv: Vec<Vec<f64>> = tangents.iter().map(AmbientVectorJet::values).collect();
    let nv: Vec<Vec<f64>> = frame.normals.iter().map(AmbientVectorJet::values).collect();

    let mut gauss_formula = Residual::default();
    for i in 0..n {
        for j in i..n {
            let hessian = tangents[i].derivative(j).values();
            for mu in 0..dim {
                let mut rhs = 0.0;
                for (r, t) in tv.iter().enumerate() {
                    rhs += gamma.value(r, i, j) * t[mu];
                }
                for (a, &e) in eps.iter().enumerate() {
                    rhs += f64::from(e) * ext.b_value(i, j, a) * nv[a][mu];
                }
                gauss_formula.record(hessian[mu], rhs);
            }
        }
    }

    let mut weingarten = Residual::default();
    for (a, normal) in frame.normals.iter().enumerate() {
        for j in 0..n {
            let dn = normal.derivative(j).values();
            for mu in 0..dim {
                let mut rhs = 0.0;
                for m in 0..n {
                    for (l, t) in tv.iter().enumerate() {
                        rhs -= g_inv[m][l] * ext.b_value(j, m, a) * t[mu];
                    }
                }
                for (m, &e) in eps.iter().enumerate() {
                    rhs += f64::from(e) * ext.twist_value(j, m, a) * nv[m][mu];
                }
                weingarten.record(dn[mu], rhs);
            }
        }
    }
    (gauss_formula, weingarten)
}
