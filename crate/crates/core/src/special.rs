//! Chebyshev polynomials, complex inverse hyperbolic tangent, binomial
//! weights and Gauss-Hermite quadrature.

use crate::scalar::{cone, Real, C};

/// First-kind Chebyshev polynomial `T_n(x)` by the three-term recurrence.
pub fn chebyshev_t<T: Real>(n: u32, x: T) -> T {
    let two = T::lit(2.0);
    let (mut prev, mut cur) = (T::one(), x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = two * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Second-kind Chebyshev polynomial `U_n(x)` for `n >= -1`, with `U_{-1} = 0`.
///
/// # Panics
/// If `n < -1`.
pub fn chebyshev_u<T: Real>(n: i64, x: T) -> T {
    assert!(n >= -1, "U_n is defined here for n >= -1");
    let two = T::lit(2.0);
    let (mut prev, mut cur) = (T::zero(), T::one());
    if n == -1 {
        return prev;
    }
    for _ in 0..n {
        let next = two * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `artanh(u) = (Log(1 + u) - Log(1 - u)) / 2` on principal branches.
pub fn atanh<T: Real>(u: C<T>) -> C<T> {
    let one = cone::<T>();
    ((one + u).ln() - (one - u).ln()) * T::lit(0.5)
}

/// `ln( binom(n, k) / 2^n )` for `k = 0..=n`, accumulated in log space so
/// large `n` stays representable.
pub fn log_binomial_half_pmf(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut lp = -(n as f64) * std::f64::consts::LN_2;
    out.push(lp);
    for k in 1..=n {
        lp += ((n - k + 1) as f64).ln() - (k as f64).ln();
        out.push(lp);
    }
    out
}

/// Gauss-Hermite rule for the weight `exp(-x^2)`: nodes and weights, nodes
/// in descending order.
///
/// Roots are found by Newton iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    const MAX_NEWTON: usize = 100;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..MAX_NEWTON {
            let (mut p1, mut p2) = (PIM4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `E[f(Z)]` for standard normal `Z` with an `n`-node Gauss-Hermite rule
/// (`Z = √2 x`).
pub fn gaussian_expectation<T: Real>(n: usize, mut f: impl FnMut(T) -> C<T>) -> C<T> {
    let (x, w) = gauss_hermite(n);
    let norm = 1.0 / std::f64::consts::PI.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| f(T::lit(sqrt2 * xi)) * T::lit(wi * norm))
        .fold(C::new(T::zero(), T::zero()), |a, b| a + b)
}
