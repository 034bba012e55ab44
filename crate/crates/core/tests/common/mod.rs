#![allow(dead_code)]

use ips_zeta::matrix::CMatrix;
use ips_zeta::models::{build_local, LocalOperator, ModelSpec};
use ips_zeta::operator::{GlobalOperator, PauliProjectors};
use ips_zeta::C;
use num_complex::Complex64;
use rayon::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn global(spec: ModelSpec<f64>, n: usize) -> GlobalOperator<f64> {
    GlobalOperator::new(build_local(&spec).unwrap(), n).unwrap()
}

pub fn qca2(xi: f64, n: usize) -> GlobalOperator<f64> {
    global(ModelSpec::Qca2 { xi1: 0.0, xi2: xi }, n)
}

pub fn rule90(n: usize) -> GlobalOperator<f64> {
    GlobalOperator::new(LocalOperator::rule90(), n).unwrap()
}

/// `max_j |Σ_i Q_ij - 1|`.
pub fn column_sum_deviation(m: &CMatrix<f64>) -> f64 {
    (0..m.cols())
        .map(|j| {
            let s: Complex64 = m.column(j).iter().sum();
            (s - c(1.0, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// `max |(Q† Q - I)_{ij}|`, rows in parallel.
pub fn gram_deviation(m: &CMatrix<f64>) -> f64 {
    let n = m.cols();
    let cols: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0_f64;
            for j in i..n {
                let dot: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((dot - target).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// `I_2^{⊗(N-1)} ⊗ σ(ξ)`.
pub fn sigma_n(xi: f64, n: usize) -> CMatrix<f64> {
    CMatrix::identity(1 << (n - 1)).kron(&PauliProjectors::sigma(xi))
}

/// Right-hand side `Q_N ⊗ E00 + (σ_N Q_N) ⊗ E11` of the one-site extension identity.
pub fn extension_rhs(xi: f64, n: usize) -> CMatrix<f64> {
    let q = qca2(xi, n).materialize().unwrap().clone();
    let sq = sigma_n(xi, n).matmul(&q);
    q.kron(&PauliProjectors::e00()).add(&sq.kron(&PauliProjectors::e11()))
}

pub fn unit_vector(dim: usize, seed: u64) -> Vec<C<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn dk_grid() -> Vec<(f64, f64)> {
    let ps = [0.0, 0.2, 0.5, 0.8, 1.0];
    ps.iter().flat_map(|&p| [0.0, 0.35, 1.0].into_iter().map(move |q| (p, q))).collect()
}

pub fn qca_grid() -> Vec<ModelSpec<f64>> {
    let angles = [0.0, 0.4, 1.3, std::f64::consts::FRAC_PI_2, 2.9];
    let mut v = Vec::new();
    for &a in &angles {
        for &b in &[0.7, 4.1] {
            v.push(ModelSpec::Qca1 { xi1: a, xi2: b });
            v.push(ModelSpec::Qca2 { xi1: a, xi2: b });
        }
    }
    v
}
