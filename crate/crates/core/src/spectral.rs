//! FFT helpers shared by the spectral operators.
//!
//! Coefficients are normalised as `c_k = (1/N) Σ_j f_j e^{-2πijk/N}`, so on the
//! circle grid `c_k` is the Fourier coefficient `û_k`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Normalised forward transform of real samples.
pub fn forward(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward_in_place(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Unnormalised forward transform in place.
pub fn forward_in_place(buf: &mut [Complex64]) {
    if !buf.is_empty() {
        plan(buf.len(), false).process(buf);
    }
}

/// Unnormalised inverse transform in place (`Σ_k c_k e^{2πijk/N}`).
pub fn inverse_in_place(buf: &mut [Complex64]) {
    if !buf.is_empty() {
        plan(buf.len(), true).process(buf);
    }
}

/// Inverse of [`forward`], keeping the real part.
pub fn inverse_real(coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    inverse_in_place(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Signed frequency of FFT index `k` on `n` points; the Nyquist index maps to `+n/2`.
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

pub fn is_nyquist(k: usize, n: usize) -> bool {
    n % 2 == 0 && k == n / 2
}

/// Parity of a Fourier multiplier. Odd multipliers vanish at the Nyquist
/// index so that real inputs stay real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Applies `m(mode)` to the coefficients of `samples` and returns real samples.
pub fn apply_multiplier<M>(samples: &[f64], parity: Parity, m: M) -> Vec<f64>
where
    M: Fn(i64) -> Complex64,
{
    let coeffs = forward(samples);
    apply_multiplier_coeffs(&coeffs, parity, m)
}

pub fn apply_multiplier_coeffs<M>(coeffs: &[Complex64], parity: Parity, m: M) -> Vec<f64>
where
    M: Fn(i64) -> Complex64,
{
    let n = coeffs.len();
    let out: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            if parity == Parity::Odd && is_nyquist(k, n) {
                Complex64::new(0.0, 0.0)
            } else {
                c * m(signed_mode(k, n))
            }
        })
        .collect();
    inverse_real(&out)
}

/// Zeroes coefficients below `64 ε · max|c|`. Roundoff noise in the forward
/// transform would otherwise be amplified by growing multipliers.
pub fn chop(coeffs: &[Complex64]) -> Vec<Complex64> {
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON * top;
    coeffs.iter().map(|&c| if c.norm() <= floor { Complex64::new(0.0, 0.0) } else { c }).collect()
}

/// Zero-pads or truncates a normalised spectrum to `n_new` coefficients.
/// A Nyquist coefficient is split evenly between `±n/2` when growing.
pub fn resize_spectrum(coeffs: &[Complex64], n_new: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n_new];
    let keep = (n.min(n_new) as i64 - 1) / 2;
    for k in -keep..=keep {
        out[k.rem_euclid(n_new as i64) as usize] = coeffs[k.rem_euclid(n as i64) as usize];
    }
    let half_old = n / 2;
    let half_new = n_new / 2;
    if n % 2 == 0 && n_new > n {
        let c = coeffs[half_old] * 0.5;
        out[half_old] += c;
        out[n_new - half_old] += c;
    } else if n_new % 2 == 0 && n_new < n {
        let c = coeffs[half_new] + coeffs[n - half_new];
        out[half_new] += c.re;
    } else if n_new == n {
        out.copy_from_slice(coeffs);
    }
    out
}
