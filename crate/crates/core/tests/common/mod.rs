//! Brute-force oracles built from explicit Kronecker products.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_2x2(letter: char) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match letter {
        'I' => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad letter {letter}"),
    }
}

/// Site 0 is the least significant bit of the basis index.
pub fn kron_string(letters: &[char]) -> CMat {
    let mut m = CMat::identity(1, 1);
    for &l in letters.iter().rev() {
        m = m.kronecker(&pauli_2x2(l));
    }
    m
}

pub fn site_op(n: usize, ops: &[(usize, char)]) -> CMat {
    let mut letters = vec!['I'; n];
    for &(s, l) in ops {
        letters[s] = l;
    }
    kron_string(&letters)
}

/// `-sum_j [(J/4) Z_j Z_{j+1} + (h/2) Z_j]`, periodic.
pub fn h1(n: usize, j: f64, h: f64) -> CMat {
    let mut m = CMat::zeros(1 << n, 1 << n);
    for s in 0..n {
        let t = (s + 1) % n;
        m -= site_op(n, &[(s, 'Z'), (t, 'Z')]) * c(j / 4.0, 0.0);
        m -= site_op(n, &[(s, 'Z')]) * c(h / 2.0, 0.0);
    }
    m
}

/// `-(g/2) sum_j X_j`.
pub fn h2(n: usize, g: f64) -> CMat {
    let mut m = CMat::zeros(1 << n, 1 << n);
    for s in 0..n {
        m -= site_op(n, &[(s, 'X')]) * c(g / 2.0, 0.0);
    }
    m
}

pub fn expm_minus_i(h: &CMat, t: f64) -> CMat {
    (h * c(0.0, -t)).exp()
}

/// `e^{-i H1 tau/2} e^{-i H2 tau} e^{-i H1 tau/2}`.
pub fn trotter(n: usize, tau: f64) -> CMat {
    let a = expm_minus_i(&h1(n, 1.0, 1.0), tau / 2.0);
    let b = expm_minus_i(&h2(n, 1.0), tau);
    &a * &b * &a
}

pub fn from_faer(m: &faer::Mat<Complex64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn apply(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    let x = nalgebra::DVector::from_column_slice(v);
    (m * x).iter().cloned().collect()
}

pub fn vec_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
