//! Reference distribution functions: quadrature and `statrs`, neither of
//! which shares code with the library's special-function implementations.

use statrs::distribution::{ContinuousCDF, FisherSnedecor, Normal};

/// Standard normal CDF by Simpson quadrature of the density.
pub fn phi_quadrature(x: f64) -> f64 {
    let density = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let (a, b) = if x >= 0.0 { (0.0, x) } else { (x, 0.0) };
    let n = 200_000;
    let h = (b - a) / n as f64;
    let mut acc = density(a) + density(b);
    for i in 1..n {
        let t = a + i as f64 * h;
        acc += density(t) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = acc * h / 3.0;
    if x >= 0.0 {
        0.5 + integral
    } else {
        0.5 - integral
    }
}

/// Standard normal CDF from `statrs`.
pub fn normal_cdf_ref(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// F-distribution CDF from `statrs`.
pub fn f_cdf_ref(x: f64, df1: u64, df2: u64) -> f64 {
    FisherSnedecor::new(df1 as f64, df2 as f64).unwrap().cdf(x)
}
