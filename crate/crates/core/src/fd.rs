//! Central finite differences with one Richardson step, for cross-checking
//! jet derivatives against plain function evaluations.

/// Step used for a derivative of the given total order. Third derivatives
/// lose `ε/h³` to rounding, so higher orders need larger steps.
pub fn default_step(order: usize) -> f64 {
    match order {
        0 | 1 => 1e-3,
        2 => 5e-3,
        _ => 2e-2,
    }
}

/// `∂_{indices} f(x)` by nested central differences at step `h`, O(h²).
pub fn central<E>(
    f: &mut impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    indices: &[usize],
    h: f64,
) -> Result<f64, E> {
    let Some((&first, rest)) = indices.split_first() else {
        return f(x);
    };
    let mut shifted = x.to_vec();
    shifted[first] = x[first] + h;
    let plus = central(f, &shifted, rest, h)?;
    shifted[first] = x[first] - h;
    let minus = central(f, &shifted, rest, h)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Richardson extrapolation of [`central`] between `h` and `h/2`, O(h⁴).
pub fn richardson<E>(
    f: &mut impl FnMut(&[f64]) -> Result<f64, E>,
    x: &[f64],
    indices: &[usize],
    h: f64,
) -> Result<f64, E> {
    let coarse = central(f, x, indices, h)?;
    let fine = central(f, x, indices, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
