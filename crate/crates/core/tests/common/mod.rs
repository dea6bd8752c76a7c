//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twophase_core::geometry::{chord_arc_constant, ArcCurve, GraphInterface, Orientation};
use twophase_core::harmonic::{LayerField, LayerSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Band-limited graph on `n` nodes with at most `band` modes, `‖η′‖∞`
/// drawn uniformly from `[0.05, max_slope]` and a small mean offset.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, band: usize, max_slope: f64) -> GraphInterface {
    let band = rng.random_range(1..=band.max(1));
    let modes: Vec<(f64, f64, f64)> = (1..=band)
        .map(|k| {
            let k = k as f64;
            (k, rng.random_range(-1.0..1.0) / k, rng.random_range(-1.0..1.0) / k)
        })
        .collect();
    let shape = |x: f64| modes.iter().map(|(k, a, b)| a * (k * x).cos() + b * (k * x).sin()).sum::<f64>();
    let raw = GraphInterface::from_fn(n, shape).unwrap();
    let slope = raw.slope_inf().unwrap();
    let target = rng.random_range(0.05..max_slope);
    let offset = rng.random_range(-0.2..0.2);
    let scale = target / slope;
    GraphInterface::new(raw.samples().iter().map(|v| offset + scale * v).collect()).unwrap()
}

/// Sample the same smooth graph at two resolutions.
pub fn random_graph_pair(rng: &mut ChaCha8Rng, n: usize, band: usize, max_slope: f64) -> (GraphInterface, GraphInterface) {
    let coarse = random_graph(rng, n, band, max_slope);
    let fine = twophase_core::spectral::resample(coarse.samples(), 2 * n);
    (coarse, GraphInterface::new(fine).unwrap())
}

/// Trigonometric curve description, evaluated at any resolution.
#[derive(Debug, Clone)]
pub struct CurveShape {
    pub winding: i32,
    /// `(k, a_k, b_k, c_k, d_k)`: `α += a cos kt + b sin kt`, `β += c cos kt + d sin kt`.
    pub modes: Vec<(f64, f64, f64, f64, f64)>,
    pub radius: f64,
    pub centre: (f64, f64),
}

impl CurveShape {
    pub fn sample(&self, n_in: usize) -> (Vec<f64>, Vec<f64>) {
        let mut alpha = Vec::with_capacity(n_in);
        let mut beta = Vec::with_capacity(n_in);
        for j in 0..n_in {
            let t = TAU * j as f64 / n_in as f64;
            let (mut a, mut b) = if self.winding == 0 {
                (self.centre.0 + self.radius * t.cos(), self.centre.1 + self.radius * t.sin())
            } else {
                (t, self.centre.1)
            };
            for &(k, ac, as_, bc, bs) in &self.modes {
                a += ac * (k * t).cos() + as_ * (k * t).sin();
                b += bc * (k * t).cos() + bs * (k * t).sin();
            }
            alpha.push(a);
            beta.push(b);
        }
        (alpha, beta)
    }

    pub fn curve(&self, n: usize) -> ArcCurve {
        let (a, b) = self.sample(512.max(2 * n));
        ArcCurve::reparametrize(&a, &b, self.winding, n).unwrap()
    }
}

fn simple_enough(shape: &CurveShape) -> bool {
    let (a, b) = shape.sample(256);
    match ArcCurve::reparametrize(&a, &b, shape.winding, 128) {
        Ok(c) => chord_arc_constant(&c).map(|ca| ca.c0 > 0.05).unwrap_or(false),
        Err(_) => false,
    }
}

/// Either a wobbly closed loop or a curve winding once, possibly with
/// overhangs, both with chord-arc constant above 0.05.
pub fn random_curve_shape(rng: &mut ChaCha8Rng, allow_loops: bool) -> CurveShape {
    loop {
        let shape = if allow_loops && rng.random_bool(0.5) {
            let radius = rng.random_range(0.3..1.0);
            let modes = (2..=4)
                .map(|k| {
                    let amp = radius * rng.random_range(0.0..0.08);
                    let ph = rng.random_range(0.0..TAU);
                    let k = k as f64;
                    (k, amp * ph.cos(), amp * ph.sin(), -amp * ph.sin(), amp * ph.cos())
                })
                .collect();
            CurveShape {
                winding: 0,
                modes,
                radius,
                centre: (PI, 0.0),
            }
        } else {
            // α = t + c sin t folds back on itself once c > 1.
            let c = rng.random_range(0.0..1.2);
            let b = rng.random_range(0.4..0.8);
            let mut modes = vec![(1.0, 0.0, c, b, 0.0)];
            for k in 2..=3 {
                let amp = rng.random_range(0.0..0.05);
                modes.push((k as f64, 0.0, 0.0, amp, amp * 0.5));
            }
            CurveShape {
                winding: 1,
                modes,
                radius: 0.0,
                centre: (0.0, 0.0),
            }
        };
        if simple_enough(&shape) {
            return shape;
        }
    }
}

pub fn random_curve(rng: &mut ChaCha8Rng, n: usize, allow_loops: bool) -> ArcCurve {
    let c = random_curve_shape(rng, allow_loops).curve(n);
    if c.orientation() == Orientation::Positive {
        c
    } else {
        c.reversed()
    }
}

/// Entire harmonic field in `layer` with `band` decaying modes on `y = 0`,
/// evaluable up to `reach`.
pub fn random_field(rng: &mut ChaCha8Rng, layer: LayerSpec, band: usize, reach: f64) -> LayerField {
    let band = rng.random_range(1..=band.max(1));
    let mut coeffs = vec![Complex64::new(rng.random_range(-1.0..1.0), 0.0)];
    for k in 1..=band {
        let w = 1.0 / (k * k) as f64;
        coeffs.push(Complex64::new(rng.random_range(-w..w), rng.random_range(-w..w)));
    }
    LayerField::from_coefficients(layer, 0.0, coeffs).unwrap().with_reach(reach)
}
