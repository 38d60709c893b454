//! Numerical workhorses: normal special functions, adaptive Gauss–Kronrod
//! quadrature and bracketed root finding.

pub mod normal;
pub mod quad;
pub mod root;

/// `n` equally spaced points from `a` to `b` inclusive (`n ≥ 2`).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + h * i as f64).collect()
}
