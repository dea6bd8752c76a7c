//! Fourier machinery on uniformly sampled periodic real signals.
//!
//! Coefficients are normalized so that `f(x_j) = Σ_k c_k exp(i k x_j)` with
//! `x_j = j·period/n`. The Nyquist mode of even-length grids is dropped by
//! every operator here; it carries no well-defined derivative.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().expect("fft planner poisoned");
    if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    }
}

/// Signed integer wavenumber of FFT bin `i` on an `n`-point grid.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

pub fn is_nyquist(i: usize, n: usize) -> bool {
    n % 2 == 0 && i == n / 2
}

/// Bin index holding wavenumber `k` on an `n`-point grid.
pub fn bin(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

pub fn fft(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    if n == 0 {
        return buf;
    }
    plan(n, true).process(&mut buf);
    let scale = 1.0 / n as f64;
    for c in &mut buf {
        *c *= scale;
    }
    buf
}

/// Inverse transform; returns the real part.
pub fn ifft(coeffs: &[Complex64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    if n == 0 {
        return Vec::new();
    }
    plan(n, false).process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Multiply each coefficient by `symbol(k)` with `k` the signed wavenumber
/// (scaled by `2π/period`).
pub fn apply_symbol_coeffs(
    coeffs: &[Complex64],
    period: f64,
    symbol: impl Fn(f64) -> Complex64,
) -> Vec<Complex64> {
    let n = coeffs.len();
    let scale = 2.0 * PI / period;
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if is_nyquist(i, n) {
                Complex64::new(0.0, 0.0)
            } else {
                c * symbol(wavenumber(i, n) as f64 * scale)
            }
        })
        .collect()
}

pub fn apply_symbol(samples: &[f64], period: f64, symbol: impl Fn(f64) -> Complex64) -> Vec<f64> {
    ifft(&apply_symbol_coeffs(&fft(samples), period, symbol))
}

/// Apply a real, even symbol (e.g. `|k| tanh(H|k|)`).
pub fn apply_real_symbol(samples: &[f64], period: f64, symbol: impl Fn(f64) -> f64) -> Vec<f64> {
    apply_symbol(samples, period, |k| Complex64::new(symbol(k), 0.0))
}

pub fn derivative(samples: &[f64], period: f64) -> Vec<f64> {
    apply_symbol(samples, period, |k| Complex64::new(0.0, k))
}

pub fn second_derivative(samples: &[f64], period: f64) -> Vec<f64> {
    apply_real_symbol(samples, period, |k| -k * k)
}

pub fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Trapezoid rule over one period, spectrally accurate for smooth periodic data.
pub fn integrate(samples: &[f64], period: f64) -> f64 {
    mean(samples) * period
}

pub fn l2_norm(samples: &[f64], period: f64) -> f64 {
    integrate(&samples.iter().map(|v| v * v).collect::<Vec<_>>(), period).sqrt()
}

pub fn sup_norm(samples: &[f64]) -> f64 {
    samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Ratio of the largest coefficient magnitude in the top third of the
/// spectrum to the largest coefficient overall. Zero signals report 0.
pub fn tail_ratio(samples: &[f64]) -> f64 {
    tail_ratio_coeffs(&fft(samples))
}

pub fn tail_ratio_coeffs(coeffs: &[Complex64]) -> f64 {
    let n = coeffs.len();
    let cutoff = (n / 3) as i64;
    let mut head = 0.0_f64;
    let mut tail = 0.0_f64;
    for (i, c) in coeffs.iter().enumerate() {
        let a = c.norm();
        head = head.max(a);
        if wavenumber(i, n).abs() > cutoff {
            tail = tail.max(a);
        }
    }
    if head == 0.0 {
        0.0
    } else {
        tail / head
    }
}

/// Zero-pad or truncate the spectrum to `m` coefficients (Nyquist dropped).
pub fn resize_coeffs(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let kmax = ((n.min(m) as i64) - 1) / 2;
    for k in -kmax..=kmax {
        out[bin(k, m)] = coeffs[bin(k, n)];
    }
    out
}

pub fn resample(samples: &[f64], m: usize) -> Vec<f64> {
    ifft(&resize_coeffs(&fft(samples), m))
}

/// Evaluate `f` pointwise on a 3/2-padded grid and project back to `n` modes.
///
/// Every input is interpolated to the padded grid; `f` receives one value per
/// input at each padded node.
pub fn dealiased_map(inputs: &[&[f64]], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let n = inputs.first().map_or(0, |v| v.len());
    let m = padded_len(n);
    let padded: Vec<Vec<f64>> = inputs.iter().map(|v| resample(v, m)).collect();
    let mut args = vec![0.0; inputs.len()];
    let values: Vec<f64> = (0..m)
        .map(|j| {
            for (a, p) in args.iter_mut().zip(&padded) {
                *a = p[j];
            }
            f(&args)
        })
        .collect();
    resample(&values, n)
}

pub fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    dealiased_map(&[a, b], |v| v[0] * v[1])
}

pub fn padded_len(n: usize) -> usize {
    let m = (3 * n).div_ceil(2);
    m + (m % 2)
}

/// Evaluate the trigonometric interpolant with coefficients `coeffs` at `x`.
pub fn eval_at(coeffs: &[Complex64], period: f64, x: f64) -> f64 {
    let n = coeffs.len();
    let theta = 2.0 * PI * x / period;
    let step = Complex64::from_polar(1.0, theta);
    let mut rot = Complex64::new(1.0, 0.0);
    let mut acc = coeffs[0].re;
    for k in 1..n.div_ceil(2) {
        rot *= step;
        if is_nyquist(k, n) {
            break;
        }
        acc += 2.0 * (coeffs[k] * rot).re;
    }
    acc
}

pub fn grid(n: usize, period: f64) -> Vec<f64> {
    (0..n).map(|j| j as f64 * period / n as f64).collect()
}
