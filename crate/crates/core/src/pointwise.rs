//! Matrices of the Clifford action and the natural pairing at a point.
//!
//! Sections at a point are vectors `(X^1..X^N, ξ_1..ξ_N)`; forms are
//! vectors of length `2^N` indexed by monomial bitmask.

use crate::exterior::{bits, wedge_sign};
use crate::linalg::{c, CMat, CVec};

/// Matrix of `ρ ↦ (X + ξ)·ρ` on the `2^n`-dimensional form space.
pub fn clifford_matrix(n: usize, v: &CVec) -> CMat {
    assert_eq!(v.len(), 2 * n);
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    for m in 0..dim as u64 {
        for i in 0..n {
            let bit = 1u64 << i;
            if m & bit != 0 {
                let below = (m & (bit - 1)).count_ones();
                let s = if below % 2 == 0 { 1.0 } else { -1.0 };
                out[((m & !bit) as usize, m as usize)] += v[i] * s;
            } else {
                let s = wedge_sign(bit, m) as f64;
                out[((m | bit) as usize, m as usize)] += v[n + i] * s;
            }
        }
    }
    out
}

/// Matrix of `v ↦ v·ρ` from sections to forms, for a fixed form `ρ`.
pub fn action_on(n: usize, rho: &CVec) -> CMat {
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, 2 * n);
    for (m, &r) in rho.iter().enumerate() {
        if r == c(0.0) {
            continue;
        }
        let m = m as u64;
        for i in 0..n {
            let bit = 1u64 << i;
            if m & bit != 0 {
                let below = (m & (bit - 1)).count_ones();
                let s = if below % 2 == 0 { 1.0 } else { -1.0 };
                out[((m & !bit) as usize, i)] += r * s;
            } else {
                let s = wedge_sign(bit, m) as f64;
                out[((m | bit) as usize, n + i)] += r * s;
            }
        }
    }
    out
}

/// Gram matrix of `⟨X+ξ, Y+η⟩ = ½(η(X) + ξ(Y))`.
pub fn pairing_matrix(n: usize) -> CMat {
    let mut g = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        g[(i, n + i)] = c(0.5);
        g[(n + i, i)] = c(0.5);
    }
    g
}

/// Bilinear (not sesquilinear) pairing of two sections at a point.
pub fn pair(u: &CVec, v: &CVec) -> num_complex::Complex64 {
    let n = u.len() / 2;
    (u.transpose() * pairing_matrix(n) * v)[(0, 0)]
}

/// Wedge by a fixed form, as a matrix on the form space.
pub fn wedge_matrix(n: usize, alpha: &CVec) -> CMat {
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    for (a, &ca) in alpha.iter().enumerate() {
        if ca == c(0.0) {
            continue;
        }
        for m in 0..dim {
            let s = wedge_sign(a as u64, m as u64);
            if s != 0 {
                out[(a | m, m)] += ca * s as f64;
            }
        }
    }
    out
}

/// Reversal sign `(-1)^{k(k-1)/2}` of a monomial.
pub fn reversal_sign(m: u64) -> f64 {
    let k = m.count_ones();
    if (k * k.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Top coefficient of the Mukai pairing of two form vectors.
pub fn mukai_value(n: usize, a: &CVec, b: &CVec) -> num_complex::Complex64 {
    let top = (1u64 << n) - 1;
    let mut s = c(0.0);
    for (ma, &ca) in a.iter().enumerate() {
        if ca == c(0.0) {
            continue;
        }
        let mb = top & !(ma as u64);
        let sign = wedge_sign(ma as u64, mb) as f64 * reversal_sign(ma as u64);
        s += ca * b[mb as usize] * sign;
    }
    s
}

/// Monomial basis vector.
pub fn monomial(n: usize, m: u64) -> CVec {
    let mut v = CVec::zeros(1 << n);
    v[m as usize] = c(1.0);
    v
}

/// Degree of each basis index.
pub fn degree(m: usize) -> usize {
    bits(m as u64).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_square_is_pairing() {
        let n = 3;
        let v = CVec::from_vec((0..6).map(|i| c(i as f64 * 0.3 - 0.7)).collect());
        let a = clifford_matrix(n, &v);
        let sq = &a * &a;
        let expected = CMat::identity(8, 8) * pair(&v, &v);
        assert!((sq - expected).norm() < 1e-12);
        let rho = CVec::from_vec((0..8).map(|i| c((i * i) as f64 * 0.1 + 1.0)).collect());
        assert!((&a * &rho - action_on(n, &rho) * &v).norm() < 1e-12);
    }
}
