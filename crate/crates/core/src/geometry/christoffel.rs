use crate::frame::InducedMetric;
use crate::jet::{self, Jet};

/// Levi-Civita connection coefficients `Γ^k_ij` as first-order jets.
#[derive(Debug, Clone)]
pub struct ChristoffelSymbols {
    /// Indexed `[k][i][j]`, symmetric in `i, j`.
    pub gamma: Vec<Vec<Vec<Jet>>>,
}

impl ChristoffelSymbols {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[k][i][j].value()
    }

    /// `∂_l Γ^k_ij` at the expansion point.
    pub fn derivative(&self, k: usize, i: usize, j: usize, l: usize) -> f64 {
        self.gamma[k][i][j].partial(&[l])
    }

    /// Max-abs of `∂_k g_ij - Γ^m_ik g_mj - Γ^m_jk g_im` at the point.
    pub fn metric_compatibility(&self, metric: &InducedMetric) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = metric.g[i][j].partial(&[k]);
                    for m in 0..n {
                        r -= self.value(m, i, k) * metric.value(m, j);
                        r -= self.value(m, j, k) * metric.value(i, m);
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }
}

/// `Γ^k_ij = ½ g^{km} (∂_i g_mj + ∂_j g_mi - ∂_m g_ij)`.
pub fn christoffel(metric: &InducedMetric) -> ChristoffelSymbols {
    let n = metric.n();
    let jn = metric.g[0][0].n();
    // dg[m][i][j] = ∂_m g_ij
    let dg: Vec<Vec<Vec<Jet>>> =
        (0..n).map(|m| (0..n).map(|i| (0..n).map(|j| metric.g[i][j].derivative(m)).collect()).collect()).collect();
    // first-kind symbols Γ_mij
    let lowered: Vec<Vec<Vec<Jet>>> = (0..n)
        .map(|m| {
            (0..n)
                .map(|i| (0..n).map(|j| (&(&dg[i][m][j] + &dg[j][m][i]) - &dg[m][i][j]).scale(0.5)).collect())
                .collect()
        })
        .collect();
    let mut gamma = vec![vec![vec![Jet::zero(jn); n]; n]; n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = jet::sum(jn, (0..n).map(|m| &metric.g_inv[k][m] * &lowered[m][i][j]));
                gamma[k][j][i] = v.clone();
                gamma[k][i][j] = v;
            }
        }
    }
    ChristoffelSymbols { gamma }
}
