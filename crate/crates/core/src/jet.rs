//! Truncated multivariate Taylor expansions ("jets").
//!
//! A [`Jet`] carries the value of a scalar quantity together with all of its
//! mixed partial derivatives up to total order three with respect to the `n`
//! chart variables. Coefficients are Taylor-normalized: the slot for the
//! multi-index `α` holds `∂^α f / α!`, so multiplication is a truncated
//! polynomial convolution and `∂_i ∂_j` and `∂_j ∂_i` share one slot.
//!
//! Each jet also tracks the order up to which its coefficients are exact.
//! Differentiating a jet drops that order by one (the top-degree
//! coefficients of the derivative are unknown), and binary operations keep
//! the smaller of the two operand orders. Coefficients above the valid
//! order are always zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use thiserror::Error;

/// Maximum total derivative order carried by a jet.
pub const MAX_ORDER: usize = 3;

/// Largest chart dimension supported by the jet layouts.
pub const MAX_VARS: usize = 12;

/// Values whose magnitude falls below this are treated as zero divisors.
pub const DIVISION_EPSILON: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet whose value is zero")]
    DivisionByZero,
    #[error("{function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },
}

/// Precomputed multi-index bookkeeping for a given number of variables.
pub(crate) struct Layout {
    n: usize,
    exponents: Vec<Vec<u8>>,
    degree: Vec<u8>,
    factorial: Vec<f64>,
    /// `raise[i][k]` is the slot of `α_k + e_i`, if that has degree ≤ 3.
    raise: Vec<Vec<Option<usize>>>,
    /// For each slot `k`, every ordered pair `(p, q)` with `α_p + α_q = α_k`.
    pairs: Vec<Vec<(u16, u16)>>,
}

impl Layout {
    fn build(n: usize) -> Layout {
        let mut exponents = vec![vec![0u8; n]];
        for degree in 1..=MAX_ORDER {
            let mut current = vec![0u8; n];
            push_degree(&mut exponents, &mut current, 0, degree as u8);
        }
        let degree: Vec<u8> = exponents.iter().map(|e| e.iter().sum()).collect();
        let factorial =
            exponents.iter().map(|e| e.iter().map(|&a| (1..=a as u32).product::<u32>() as f64).product()).collect();
        let find = |target: &[u8]| exponents.iter().position(|e| e.as_slice() == target);
        let raise = (0..n)
            .map(|i| {
                exponents
                    .iter()
                    .map(|e| {
                        let mut up = e.clone();
                        up[i] += 1;
                        find(&up)
                    })
                    .collect()
            })
            .collect();
        let pairs = exponents
            .iter()
            .map(|target| {
                let mut list = Vec::new();
                for (p, left) in exponents.iter().enumerate() {
                    if left.iter().zip(target).any(|(l, t)| l > t) {
                        continue;
                    }
                    let right: Vec<u8> = target.iter().zip(left).map(|(t, l)| t - l).collect();
                    let q = find(&right).expect("complement of a sub-index is in the table");
                    list.push((p as u16, q as u16));
                }
                list
            })
            .collect();
        Layout { n, exponents, degree, factorial, raise, pairs }
    }

    fn len(&self) -> usize {
        self.exponents.len()
    }

    fn slot(&self, indices: &[usize]) -> usize {
        indices.iter().fold(0, |k, &i| self.raise[i][k].expect("derivative order exceeds the jet order"))
    }
}

// Graded lexicographic order: within each degree, higher powers of the
// earlier variables come first, so degree 1 is e_0, e_1, ..., e_{n-1}.
fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: u8) {
    if var + 1 == current.len() {
        current[var] = remaining;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for take in (0..=remaining).rev() {
        current[var] = take;
        push_degree(out, current, var + 1, remaining - take);
    }
    current[var] = 0;
}

fn layout(n: usize) -> &'static Layout {
    static LAYOUTS: [OnceLock<Layout>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];
    assert!((1..=MAX_VARS).contains(&n), "jets support 1..={MAX_VARS} variables, got {n}");
    LAYOUTS[n].get_or_init(|| Layout::build(n))
}

/// Number of coefficients of a third-order jet in `n` variables, C(n+3, 3).
pub fn coefficient_count(n: usize) -> usize {
    layout(n).len()
}

/// The multi-indices of a jet in `n` variables, in storage order.
pub fn multi_indices(n: usize) -> impl Iterator<Item = &'static [u8]> {
    layout(n).exponents.iter().map(Vec::as_slice)
}

#[derive(Clone)]
pub struct Jet {
    layout: &'static Layout,
    order: u8,
    coeffs: Vec<f64>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.layout.n == other.layout.n && self.order == other.order && self.coeffs == other.coeffs
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        let layout = self.layout;
        for ((e, c), &d) in layout.exponents.iter().zip(&self.coeffs).zip(&layout.degree) {
            if d <= self.order {
                map.entry(e, c);
            }
        }
        map.finish()
    }
}

impl Jet {
    pub fn constant(n: usize, value: f64) -> Jet {
        let layout = layout(n);
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Jet { layout, order: MAX_ORDER as u8, coeffs }
    }

    /// The coordinate function `x^index` expanded about `x^index = value`.
    pub fn var(index: usize, value: f64, n: usize) -> Jet {
        assert!(index < n, "variable index {index} out of range for {n} variables");
        let mut jet = Jet::constant(n, value);
        jet.coeffs[1 + index] = 1.0;
        jet
    }

    pub fn zero(n: usize) -> Jet {
        Jet::constant(n, 0.0)
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    /// Total order up to which the coefficients are exact.
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor-normalized coefficients in storage order (see [`multi_indices`]).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient `∂^α f / α!` for the exponent vector `alpha`.
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        let k = self.layout.exponents.iter().position(|e| e.as_slice() == alpha).expect("multi-index outside the jet");
        self.coeffs[k]
    }

    /// Mixed partial derivative `∂_{i1} ∂_{i2} ... f` at the expansion point.
    /// The order of `indices` does not matter.
    pub fn partial(&self, indices: &[usize]) -> f64 {
        assert!(
            indices.len() <= self.order(),
            "requested a derivative of order {} from a jet exact to order {}",
            indices.len(),
            self.order
        );
        let k = self.layout.slot(indices);
        self.coeffs[k] * self.layout.factorial[k]
    }

    /// The jet of `∂_i f`; exact to one order less than `self`.
    pub fn derivative(&self, i: usize) -> Jet {
        assert!(self.order > 0, "cannot differentiate a jet of order 0");
        assert!(i < self.n(), "variable index {i} out of range");
        let layout = self.layout;
        let order = self.order - 1;
        let mut coeffs = vec![0.0; layout.len()];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            if layout.degree[k] > order {
                continue;
            }
            if let Some(up) = layout.raise[i][k] {
                let power = layout.exponents[up][i] as f64;
                *slot = power * self.coeffs[up];
            }
        }
        Jet { layout, order, coeffs }
    }

    pub fn scale(&self, factor: f64) -> Jet {
        self.map_coeffs(|c| c * factor)
    }

    /// Returns the jet with its valid order lowered to `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order()) as u8;
        let mut out = self.clone();
        out.order = order;
        out.zero_above_order();
        out
    }

    fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet { layout: self.layout, order: self.order, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    fn zero_above_order(&mut self) {
        for (c, &d) in self.coeffs.iter_mut().zip(&self.layout.degree) {
            if d > self.order {
                *c = 0.0;
            }
        }
    }

    fn check_compatible(&self, other: &Jet) {
        assert_eq!(self.layout.n, other.layout.n, "jets over different chart dimensions");
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        self.check_compatible(other);
        let mut out = Jet {
            layout: self.layout,
            order: self.order.min(other.order),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        };
        out.zero_above_order();
        out
    }

    fn product(&self, other: &Jet) -> Jet {
        self.check_compatible(other);
        let layout = self.layout;
        let order = self.order.min(other.order);
        let mut coeffs = vec![0.0; layout.len()];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            if layout.degree[k] > order {
                continue;
            }
            let mut pairs = layout.pairs[k].iter();
            let &(p, q) = pairs.next().expect("every slot has at least one pair");
            let mut acc = self.coeffs[p as usize] * other.coeffs[q as usize];
            for &(p, q) in pairs {
                acc += self.coeffs[p as usize] * other.coeffs[q as usize];
            }
            *slot = acc;
        }
        Jet { layout, order, coeffs }
    }

    /// Truncated quotient `self / divisor`, solved degree by degree so the
    /// value coefficient is exactly `self.value() / divisor.value()`.
    pub fn checked_div(&self, divisor: &Jet) -> Result<Jet, JetError> {
        self.check_compatible(divisor);
        let pivot = divisor.coeffs[0];
        if pivot.abs() < DIVISION_EPSILON {
            return Err(JetError::DivisionByZero);
        }
        let layout = self.layout;
        let order = self.order.min(divisor.order);
        let mut q = vec![0.0; layout.len()];
        for k in 0..layout.len() {
            if layout.degree[k] > order {
                continue;
            }
            let mut acc = self.coeffs[k];
            for &(p, r) in &layout.pairs[k] {
                if r != 0 {
                    acc -= q[p as usize] * divisor.coeffs[r as usize];
                }
            }
            q[k] = acc / pivot;
        }
        Ok(Jet { layout, order, coeffs: q })
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        Jet::constant(self.n(), 1.0).checked_div(self)
    }

    /// Composes a univariate function with this jet, given the function's
    /// Taylor coefficients `[f(a), f'(a), f''(a)/2, f'''(a)/6]` at `a = self.value()`.
    fn compose(&self, taylor: [f64; 4]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let h2 = &h * &h;
        let h3 = &h2 * &h;
        let mut out = Jet::zero(self.n());
        out.order = self.order;
        for k in 1..out.coeffs.len() {
            out.coeffs[k] = taylor[1] * h.coeffs[k] + taylor[2] * h2.coeffs[k] + taylor[3] * h3.coeffs[k];
        }
        out.coeffs[0] = taylor[0];
        out.zero_above_order();
        out
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose([s, c, -s / 2.0, -c / 6.0])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose([c, -s, -c / 2.0, s / 6.0])
    }

    pub fn sinh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([s, c, s / 2.0, c / 6.0])
    }

    pub fn cosh(&self) -> Jet {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose([c, s, c / 2.0, s / 6.0])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose([e, e, e / 2.0, e / 6.0])
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain { function: "log", value: a });
        }
        Ok(self.compose([a.ln(), 1.0 / a, -1.0 / (2.0 * a * a), 1.0 / (3.0 * a * a * a)]))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain { function: "sqrt", value: a });
        }
        let s = a.sqrt();
        // d^k/da^k sqrt(a) = s * (1/2)(−1/2)(−3/2)... / a^k
        Ok(self.compose([s, 0.5 * s / a, -0.125 * s / (a * a), 0.0625 * s / (a * a * a)]))
    }

    /// Integer power by repeated multiplication, matching [`powi_f64`] bit for bit
    /// in the value coefficient.
    pub fn powi(&self, exponent: i32) -> Result<Jet, JetError> {
        let positive =
            repeat_mul(self.clone(), exponent.unsigned_abs(), |a, b| &a * &b, || Jet::constant(self.n(), 1.0));
        if exponent < 0 {
            positive.recip()
        } else {
            Ok(positive)
        }
    }

    /// Real power `self^exponent` for a base with positive value.
    pub fn powf(&self, exponent: f64) -> Result<Jet, JetError> {
        let a = self.value();
        if !(a > 0.0) {
            return Err(JetError::Domain { function: "pow", value: a });
        }
        let c = exponent;
        let v = a.powf(c);
        Ok(self.compose([
            v,
            c * v / a,
            c * (c - 1.0) * v / (2.0 * a * a),
            c * (c - 1.0) * (c - 2.0) * v / (6.0 * a * a * a),
        ]))
    }
}

fn repeat_mul<T>(base: T, exponent: u32, mul: impl Fn(T, T) -> T, one: impl Fn() -> T) -> T
where
    T: Clone,
{
    if exponent == 0 {
        return one();
    }
    let mut acc = base.clone();
    for _ in 1..exponent {
        acc = mul(acc, base.clone());
    }
    acc
}

/// Plain-float counterpart of [`Jet::powi`], with identical rounding.
pub fn powi_f64(base: f64, exponent: i32) -> f64 {
    let positive = repeat_mul(base, exponent.unsigned_abs(), |a, b| a * b, || 1.0);
    if exponent < 0 {
        1.0 / positive
    } else {
        positive
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.product(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

macro_rules! forward_owned {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += rhs;
        out
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

/// Sums an iterator of jets; `n` fixes the dimension of the empty sum.
pub fn sum(n: usize, jets: impl IntoIterator<Item = Jet>) -> Jet {
    let mut iter = jets.into_iter();
    match iter.next() {
        Some(first) => iter.fold(first, |acc, j| &acc + &j),
        None => Jet::zero(n),
    }
}
