//! Direct-summation reference implementations shared by the integration tests.
//! Nothing here calls the transform code under test.

#![allow(dead_code)]

use std::f64::consts::TAU;

use ndarray::Array2;
use num_complex::Complex64;
use otfs_core::{GridShape, PeriodicSequence, ZakGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// `e^{j 2 pi num / den}` with the exponent reduced exactly in integers.
pub fn root(num: i64, den: i64) -> Complex64 {
    cis(TAU * num.rem_euclid(den) as f64 / den as f64)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_samples(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| random_complex(rng)).collect()
}

pub fn random_sequence(rng: &mut ChaCha8Rng, len: usize) -> PeriodicSequence {
    PeriodicSequence::new(random_samples(rng, len)).unwrap()
}

pub fn random_zak(rng: &mut ChaCha8Rng, shape: GridShape) -> ZakGrid {
    let values = Array2::from_shape_fn((shape.l(), shape.k()), |_| random_complex(rng));
    ZakGrid::new(shape, values).unwrap()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_diff2(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `Z[n,k] = 1/sqrt(K) sum_l x[n + lL] e^{-j 2 pi k l / K}` evaluated at any
/// integers `(n, k)`, with `x` read periodically.
pub fn zak_at(x: &[Complex64], k_len: usize, l_len: usize, n: i64, k: i64) -> Complex64 {
    let period = x.len() as i64;
    let sum: Complex64 = (0..k_len as i64)
        .map(|l| x[(n + l * l_len as i64).rem_euclid(period) as usize] * root(-k * l, k_len as i64))
        .sum();
    sum / (k_len as f64).sqrt()
}

/// Direct DZT on the fundamental rectangle, `L x K`.
pub fn direct_dzt(x: &[Complex64], shape: GridShape) -> Array2<Complex64> {
    Array2::from_shape_fn((shape.l(), shape.k()), |(n, k)| {
        zak_at(x, shape.k(), shape.l(), n as i64, k as i64)
    })
}

/// Direct IDZT: `x[n + lL] = 1/sqrt(K) sum_k Z[n,k] e^{j 2 pi k l / K}`.
pub fn direct_idzt(z: &Array2<Complex64>) -> Vec<Complex64> {
    let (l_len, k_len) = z.dim();
    let mut x = vec![Complex64::default(); k_len * l_len];
    for n in 0..l_len {
        for l in 0..k_len {
            let s: Complex64 = (0..k_len)
                .map(|k| z[[n, k]] * root((k * l) as i64, k_len as i64))
                .sum();
            x[n + l * l_len] = s / (k_len as f64).sqrt();
        }
    }
    x
}

/// Unitary DFT by direct summation.
pub fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n_len = x.len() as i64;
    (0..n_len)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(n, v)| v * root(-k * n as i64, n_len))
                .sum::<Complex64>()
                / (n_len as f64).sqrt()
        })
        .collect()
}

/// `a[m,l] = 1/sqrt(KL) sum_n sum_k Z[n,k] e^{j 2 pi (m k / K - l n / L)}`, `K x L`.
pub fn direct_isfft(z: &Array2<Complex64>) -> Array2<Complex64> {
    let (l_len, k_len) = z.dim();
    let scale = ((k_len * l_len) as f64).sqrt();
    Array2::from_shape_fn((k_len, l_len), |(m, l)| {
        let mut acc = Complex64::default();
        for n in 0..l_len {
            for k in 0..k_len {
                acc += z[[n, k]]
                    * root((m * k) as i64, k_len as i64)
                    * root(-((l * n) as i64), l_len as i64);
            }
        }
        acc / scale
    })
}

/// Elementwise product of two sequences.
pub fn product(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

/// Circular convolution `z[n] = sum_m x[m] y[n - m]`.
pub fn circular_convolution(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let n_len = x.len();
    (0..n_len)
        .map(|n| (0..n_len).map(|m| x[m] * y[(n + n_len - m) % n_len]).sum())
        .collect()
}

/// Circular delay `x[n - m]`.
pub fn delayed(x: &[Complex64], m: i64) -> Vec<Complex64> {
    let p = x.len() as i64;
    (0..p).map(|n| x[(n - m).rem_euclid(p) as usize]).collect()
}

/// `<x, y_{m,l}>` with `y_{m,l}[n] = y[n - mL] e^{j 2 pi l n / L}`, as a `K x L` matrix.
pub fn direct_expansion(x: &[Complex64], y: &[Complex64], shape: GridShape) -> Array2<Complex64> {
    let (k_len, l_len) = (shape.k(), shape.l());
    let p = x.len() as i64;
    Array2::from_shape_fn((k_len, l_len), |(m, l)| {
        (0..p)
            .map(|n| {
                let basis = y[(n - (m * l_len) as i64).rem_euclid(p) as usize]
                    * root(l as i64 * n, l_len as i64);
                x[n as usize] * basis.conj()
            })
            .sum()
    })
}

/// Pulse-shaping OFDM synthesis by direct summation.
pub fn direct_ofdm(a: &Array2<Complex64>, g: &[Complex64]) -> Vec<Complex64> {
    let (k_len, l_len) = a.dim();
    let p = g.len() as i64;
    (0..p)
        .map(|n| {
            let mut acc = Complex64::default();
            for m in 0..k_len {
                let gv = g[(n - (m * l_len) as i64).rem_euclid(p) as usize];
                for l in 0..l_len {
                    acc += a[[m, l]] * gv * root(l as i64 * n, l_len as i64);
                }
            }
            acc
        })
        .collect()
}

/// Unnormalized Dirichlet sum `1/sqrt(K) sum_{l<K} e^{-j 2 pi d l / K}`.
pub fn dirichlet_sum(delta: f64, k_len: usize) -> Complex64 {
    (0..k_len)
        .map(|l| cis(-TAU * delta * l as f64 / k_len as f64))
        .sum::<Complex64>()
        / (k_len as f64).sqrt()
}

/// `u[n] = e^{j 2 pi k_p n / N}`.
pub fn doppler_tone(k_p: f64, period: usize) -> Vec<Complex64> {
    (0..period)
        .map(|n| cis(TAU * k_p * n as f64 / period as f64))
        .collect()
}
