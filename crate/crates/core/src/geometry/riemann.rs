use super::christoffel::ChristoffelSymbols;
use crate::frame::InducedMetric;

/// Fully covariant curvature `R_nijk` at a point.
///
/// Convention: `R^m_ijk = ∂_j Γ^m_ik - ∂_k Γ^m_ij + Γ^m_jl Γ^l_ik - Γ^m_kl Γ^l_ij`,
/// `R_nijk = g_nm R^m_ijk`. With it the unit sphere has `R_θφθφ = sin²θ` and the
/// Gauss equation reads `R_nijk = ε_A (b_ikA b_jnA - b_ijA b_knA)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    n: usize,
    data: Vec<f64>,
}

impl RiemannTensor {
    pub fn zeros(n: usize) -> RiemannTensor {
        RiemannTensor { n, data: vec![0.0; n.pow(4)] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> RiemannTensor {
        let mut r = RiemannTensor::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let k = r.index(a, b, c, d);
                        r.data[k] = f(a, b, c, d);
                    }
                }
            }
        }
        r
    }

    fn index(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[self.index(a, b, c, d)]
    }

    pub fn components(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &RiemannTensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `Ric_bd = g^{ac} R_abcd`.
    pub fn ricci(&self, g_inv: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut ric = vec![vec![0.0; n]; n];
        for b in 0..n {
            for d in 0..n {
                let mut s = 0.0;
                for a in 0..n {
                    for c in 0..n {
                        s += g_inv[a][c] * self.get(a, b, c, d);
                    }
                }
                ric[b][d] = s;
            }
        }
        ric
    }

    pub fn scalar(&self, g_inv: &[Vec<f64>]) -> f64 {
        let ric = self.ricci(g_inv);
        let n = self.n;
        (0..n).flat_map(|b| (0..n).map(move |d| (b, d))).map(|(b, d)| g_inv[b][d] * ric[b][d]).sum()
    }

    /// `R_abcd R^abcd`.
    pub fn kretschmann(&self, g_inv: &[Vec<f64>]) -> f64 {
        let n = self.n;
        // raise one index at a time
        let mut up = self.data.clone();
        for slot in 0..4 {
            let mut next = vec![0.0; up.len()];
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let idx = [a, b, c, d];
                            let mut s = 0.0;
                            for e in 0..n {
                                let mut src = idx;
                                src[slot] = e;
                                s += g_inv[idx[slot]][e] * up[self.index(src[0], src[1], src[2], src[3])];
                            }
                            next[self.index(a, b, c, d)] = s;
                        }
                    }
                }
            }
            up = next;
        }
        self.data.iter().zip(&up).map(|(a, b)| a * b).sum()
    }

    /// Max-abs violations of `R_nijk = -R_nikj`, `R_nijk = R_jkni` and
    /// `R_nijk + R_njki + R_nkij = 0`.
    pub fn symmetry_residuals(&self) -> (f64, f64, f64) {
        let n = self.n;
        let (mut anti, mut pair, mut bianchi): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let r = self.get(a, i, j, k);
                        anti = anti.max((r + self.get(a, i, k, j)).abs());
                        pair = pair.max((r - self.get(j, k, a, i)).abs());
                        bianchi = bianchi.max((r + self.get(a, j, k, i) + self.get(a, k, i, j)).abs());
                    }
                }
            }
        }
        (anti, pair, bianchi)
    }
}

pub fn riemann(gamma: &ChristoffelSymbols, metric: &InducedMetric) -> RiemannTensor {
    let n = gamma.n();
    let mut mixed = vec![0.0; n.pow(4)];
    let at = |m: usize, i: usize, j: usize, k: usize| ((m * n + i) * n + j) * n + k;
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = gamma.derivative(m, i, k, j) - gamma.derivative(m, i, j, k);
                    for l in 0..n {
                        r += gamma.value(m, j, l) * gamma.value(l, i, k);
                        r -= gamma.value(m, k, l) * gamma.value(l, i, j);
                    }
                    mixed[at(m, i, j, k)] = r;
                }
            }
        }
    }
    RiemannTensor::from_fn(n, |a, i, j, k| (0..n).map(|m| metric.value(a, m) * mixed[at(m, i, j, k)]).sum())
}
