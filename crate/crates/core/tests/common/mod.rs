#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

/// `W` of the coherent state `|α⟩` at `γ`.
pub fn coherent_wigner(alpha: C64, gamma: C64) -> f64 {
    2.0 / PI * (-2.0 * (gamma - alpha).norm_sqr()).exp()
}

/// `W` of the operator `|α⟩⟨β|` at `γ`, from `(2/π)⟨β|D(γ) P D(γ)†|α⟩`.
pub fn coherent_pair_wigner(alpha: C64, beta: C64, gamma: C64) -> C64 {
    let phase = C64::new(0.0, 2.0 * (gamma.conj() * alpha).im).exp();
    let shifted = 2.0 * gamma - alpha;
    let overlap = (-0.5 * beta.norm_sqr() - 0.5 * shifted.norm_sqr() + beta.conj() * shifted).exp();
    2.0 / PI * phase * overlap
}

/// `W` of the normalized `|α⟩ + s|α e^{iφ}⟩`.
pub fn cat_wigner(alpha: C64, phi: f64, sign: f64, gamma: C64) -> f64 {
    let beta = alpha * C64::from_polar(1.0, phi);
    let overlap = (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + alpha.conj() * beta).exp();
    let norm2 = 1.0 / (2.0 * (1.0 + sign * overlap.re));
    let w = coherent_pair_wigner(alpha, alpha, gamma)
        + coherent_pair_wigner(beta, beta, gamma)
        + sign * coherent_pair_wigner(alpha, beta, gamma)
        + sign * coherent_pair_wigner(beta, alpha, gamma);
    norm2 * w.re
}

/// `e^{−|α|²/2} αⁿ/√n!` by direct summation of the series terms.
pub fn poisson_amplitudes(alpha: C64, count: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(count);
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..count {
        if n > 0 {
            term = term * alpha / (n as f64).sqrt();
        }
        out.push(term);
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_formula_reduces_to_gaussian() {
        for &(a, g) in &[
            (C64::new(0.3, -0.7), C64::new(1.1, 0.2)),
            (C64::new(0.0, 0.0), C64::new(-0.5, 0.5)),
        ] {
            let w = coherent_pair_wigner(a, a, g);
            assert!(w.im.abs() < 1e-14);
            assert!((w.re - coherent_wigner(a, g)).abs() < 1e-14);
        }
    }
}
