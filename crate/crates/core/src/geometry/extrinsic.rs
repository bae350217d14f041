use std::fmt;
use std::str::FromStr;

use super::christoffel::ChristoffelSymbols;
use crate::dsl::Signature;
use crate::frame::{eta_inner, AmbientVectorJet, NormalFrame};
use crate::jet::Jet;

/// Second fundamental form and twisting vector with their covariant derivatives.
#[derive(Debug, Clone)]
pub struct ExtrinsicData {
    /// `b[i][j][A] = b_ijA`, symmetric in `i, j`.
    pub b: Vec<Vec<Vec<Jet>>>,
    /// `twist[i][A][B] = A_iAB = η(N_A, ∂_i N_B)`.
    pub twist: Vec<Vec<Vec<Jet>>>,
    /// `b_{ijC;k}`, indexed `[i][j][C][k]`; empty until computed.
    pub cov_b: Vec<f64>,
    /// `A_{jAB;k}`, indexed `[j][A][B][k]`; empty until computed.
    pub cov_twist: Vec<f64>,
    n: usize,
    codim: usize,
}

impl ExtrinsicData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn b_value(&self, i: usize, j: usize, a: usize) -> f64 {
        self.b[i][j][a].value()
    }

    pub fn twist_value(&self, i: usize, a: usize, b: usize) -> f64 {
        self.twist[i][a][b].value()
    }

    pub fn cov_b(&self, i: usize, j: usize, c: usize, k: usize) -> f64 {
        let (n, m) = (self.n, self.codim);
        self.cov_b[((i * n + j) * m + c) * n + k]
    }

    pub fn cov_twist(&self, j: usize, a: usize, b: usize, k: usize) -> f64 {
        let (n, m) = (self.n, self.codim);
        self.cov_twist[((j * m + a) * m + b) * n + k]
    }

    /// Max-abs of `A_iAB + A_iBA`.
    pub fn twist_antisymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.twist {
            for a in 0..self.codim {
                for b in 0..self.codim {
                    worst = worst.max((row[a][b].value() + row[b][a].value()).abs());
                }
            }
        }
        worst
    }

    /// Applies a deliberate perturbation to `b` or `A`. Covariant derivatives
    /// must be (re)computed afterwards.
    pub fn corrupt(&mut self, corruption: &Corruption) {
        let m = corruption.magnitude;
        match (corruption.target, corruption.mode) {
            (CorruptionTarget::B, CorruptionMode::Scale) => {
                for jet in self.b.iter_mut().flatten().flatten() {
                    *jet = jet.scale(m);
                }
            }
            (CorruptionTarget::B, CorruptionMode::Add) => {
                for jet in self.b.iter_mut().flatten().flatten() {
                    *jet = &*jet + m;
                }
            }
            (CorruptionTarget::Twist, CorruptionMode::Scale) => {
                for jet in self.twist.iter_mut().flatten().flatten() {
                    *jet = jet.scale(m);
                }
            }
            (CorruptionTarget::Twist, CorruptionMode::Add) => {
                // keep A antisymmetric: +m above the diagonal, -m below
                for row in self.twist.iter_mut() {
                    for (a, line) in row.iter_mut().enumerate() {
                        for (b, jet) in line.iter_mut().enumerate() {
                            if a < b {
                                *jet = &*jet + m;
                            } else if a > b {
                                *jet = &*jet + (-m);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// `b_ijA = η(Y_{;ij}, N_A)` with `Y_{;ij} = Y_{,ij} - Γ^r_ij Y_{,r}`.
pub fn second_fundamental_form(
    components: &[Jet],
    tangents: &[AmbientVectorJet],
    frame: &NormalFrame,
    gamma: &ChristoffelSymbols,
    sig: &Signature,
) -> ExtrinsicData {
    let n = tangents.len();
    let jn = components[0].n();
    let codim = frame.len();
    let mut b = vec![vec![vec![Jet::zero(jn); codim]; n]; n];
    for i in 0..n {
        for j in i..n {
            let hessian = tangents[i].derivative(j);
            let mut covariant = hessian;
            for (r, t) in tangents.iter().enumerate() {
                covariant = covariant.sub(&t.scale(&gamma.gamma[r][i][j]));
            }
            for (a, normal) in frame.normals.iter().enumerate() {
                let v = eta_inner(&covariant, normal, sig);
                b[j][i][a] = v.clone();
                b[i][j][a] = v;
            }
        }
    }
    ExtrinsicData { b, twist: Vec::new(), cov_b: Vec::new(), cov_twist: Vec::new(), n, codim }
}

/// `A_iAB = η(N_A, ∂_i N_B)`, stored into `data`.
pub fn twisting_vector(data: &mut ExtrinsicData, frame: &NormalFrame, sig: &Signature) {
    let n = data.n;
    let codim = data.codim;
    let derivs: Vec<Vec<AmbientVectorJet>> =
        frame.normals.iter().map(|nb| (0..n).map(|i| nb.derivative(i)).collect()).collect();
    data.twist = (0..n)
        .map(|i| {
            (0..codim).map(|a| (0..codim).map(|b| eta_inner(&frame.normals[a], &derivs[b][i], sig)).collect()).collect()
        })
        .collect();
}

/// Fills `b_{ijC;k} = b_ijC,k - Γ^m_ik b_mjC - Γ^m_jk b_imC` and
/// `A_{jAB;k} = A_jAB,k - Γ^m_jk A_mAB` (normal indices carry no connection term).
pub fn covariant_derivatives(data: &mut ExtrinsicData, gamma: &ChristoffelSymbols) {
    let (n, codim) = (data.n, data.codim);
    let mut cov_b = vec![0.0; n * n * codim * n];
    for i in 0..n {
        for j in 0..n {
            for c in 0..codim {
                for k in 0..n {
                    let mut v = data.b[i][j][c].partial(&[k]);
                    for m in 0..n {
                        v -= gamma.value(m, i, k) * data.b[m][j][c].value();
                        v -= gamma.value(m, j, k) * data.b[i][m][c].value();
                    }
                    cov_b[((i * n + j) * codim + c) * n + k] = v;
                }
            }
        }
    }
    let mut cov_twist = vec![0.0; n * codim * codim * n];
    for j in 0..n {
        for a in 0..codim {
            for b in 0..codim {
                for k in 0..n {
                    let mut v = data.twist[j][a][b].partial(&[k]);
                    for m in 0..n {
                        v -= gamma.value(m, j, k) * data.twist[m][a][b].value();
                    }
                    cov_twist[((j * codim + a) * codim + b) * n + k] = v;
                }
            }
        }
    }
    data.cov_b = cov_b;
    data.cov_twist = cov_twist;
}

/// `b_ijA b_klB g^{AB} g^{ik} g^{jl}`, the squared norm of the second fundamental form.
pub fn b_invariant(data: &ExtrinsicData, eps: &[i8], g_inv: &[Vec<f64>]) -> f64 {
    let n = data.n;
    let mut total = 0.0;
    for (a, &e) in eps.iter().enumerate() {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s += data.b_value(i, j, a) * data.b_value(k, l, a) * g_inv[i][k] * g_inv[j][l];
                    }
                }
            }
        }
        total += f64::from(e) * s;
    }
    total
}

/// `ε_A H_A H_A` with mean curvature `H_A = g^{ij} b_ijA / n`.
pub fn mean_curvature_squared(data: &ExtrinsicData, eps: &[i8], g_inv: &[Vec<f64>]) -> f64 {
    let n = data.n;
    eps.iter()
        .enumerate()
        .map(|(a, &e)| {
            let trace: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| g_inv[i][j] * data.b_value(i, j, a))
                .sum();
            f64::from(e) * (trace / n as f64).powi(2)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionTarget {
    /// The second fundamental form.
    B,
    /// The twisting vector.
    Twist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionMode {
    Scale,
    Add,
}

/// A deliberate perturbation, written `TENSOR:MODE:MAG` (e.g. `b:scale:1.001`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corruption {
    pub target: CorruptionTarget,
    pub mode: CorruptionMode,
    pub magnitude: f64,
}

impl FromStr for Corruption {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [target, mode, magnitude] = parts.as_slice() else {
            return Err(format!("expected TENSOR:MODE:MAG, got `{s}`"));
        };
        let target = match *target {
            "b" => CorruptionTarget::B,
            "A" => CorruptionTarget::Twist,
            other => return Err(format!("unknown tensor `{other}` (expected b or A)")),
        };
        let mode = match *mode {
            "scale" => CorruptionMode::Scale,
            "add" => CorruptionMode::Add,
            other => return Err(format!("unknown mode `{other}` (expected scale or add)")),
        };
        let magnitude: f64 = magnitude.parse().map_err(|_| format!("invalid magnitude `{magnitude}`"))?;
        if !(magnitude >= 0.0) || !magnitude.is_finite() {
            return Err(format!("magnitude must be finite and ≥ 0, got {magnitude}"));
        }
        Ok(Corruption { target, mode, magnitude })
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target = match self.target {
            CorruptionTarget::B => "b",
            CorruptionTarget::Twist => "A",
        };
        let mode = match self.mode {
            CorruptionMode::Scale => "scale",
            CorruptionMode::Add => "add",
        };
        write!(f, "{target}:{mode}:{:?}", self.magnitude)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corruption_spec_round_trip() {
        let c: Corruption = "b:scale:1.001".parse().unwrap();
        assert_eq!(c, Corruption { target: CorruptionTarget::B, mode: CorruptionMode::Scale, magnitude: 1.001 });
        assert_eq!(c.to_string(), "b:scale:1.001");
        assert_eq!("A:add:0.5".parse::<Corruption>().unwrap().target, CorruptionTarget::Twist);
        for bad in ["b:scale", "x:scale:1", "b:mul:1", "b:add:-1", "b:add:nan", "b:add:abc"] {
            assert!(bad.parse::<Corruption>().is_err(), "{bad}");
        }
    }
}
