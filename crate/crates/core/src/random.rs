//! Seeded random states and unitaries, used by the verification loops and the
//! CLI demos. Everything is driven by an explicit 64-bit seed so runs are
//! reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::qstate::{c, QReg, Unitary};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard-normal pair via Box-Muller.
fn gaussian<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = std::f64::consts::TAU * u2;
    (r * phi.cos(), r * phi.sin())
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    let (re, im) = gaussian(rng);
    c(re, im)
}

/// Haar-ish random single-qubit state (normalized Gaussian pair).
pub fn random_qubit<R: Rng>(rng: &mut R) -> [Complex64; 2] {
    loop {
        let a = gaussian_complex(rng);
        let b = gaussian_complex(rng);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if norm > 1e-6 {
            return [a / norm, b / norm];
        }
    }
}

/// Random normalized n-qubit state.
pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Result<QReg> {
    let dim = 1usize << n;
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return QReg::new(n, amps.into_iter().map(|a| a / norm).collect());
        }
    }
}

/// Haar-distributed random unitary: Gaussian matrix, Gram-Schmidt columns.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> Result<Unitary> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| gaussian_complex(rng)).collect();
        for prev in &cols {
            let overlap: Complex64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in v.iter_mut().zip(prev) {
                *x -= overlap * p;
            }
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // degenerate draw, retry
        }
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    let mut entries = vec![c(0.0, 0.0); d * d];
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            entries[i * d + j] = *x;
        }
    }
    Unitary::new(d, entries)
}
