use crate::{Error, Result};

/// Largest order accepted by [`hermite_p`].
pub const MAX_HERMITE_ORDER: usize = 64;

/// Rescaled Hermite polynomial `p_k(x) = 2^{-k/2} H_k(x/√2)`, i.e. the monic
/// (probabilists') Hermite polynomial, via `p_{k+1} = x p_k - k p_{k-1}`.
pub fn hermite_p(k: usize, x: f64) -> Result<f64> {
    Ok(*hermite_p_all(k, x)?.last().expect("k + 1 entries"))
}

/// `[p_0(x), …, p_k(x)]`.
pub fn hermite_p_all(k: usize, x: f64) -> Result<Vec<f64>> {
    if k > MAX_HERMITE_ORDER {
        return Err(Error::Argument(format!(
            "Hermite order {k} exceeds {MAX_HERMITE_ORDER}"
        )));
    }
    let mut p = Vec::with_capacity(k + 1);
    p.push(1.0);
    if k >= 1 {
        p.push(x);
    }
    for j in 1..k {
        let next = x * p[j] - j as f64 * p[j - 1];
        p.push(next);
    }
    Ok(p)
}
