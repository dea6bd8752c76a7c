use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::GraphInterface;
use crate::spectral;

/// Distance added below the deepest interface point when an infinite layer is
/// truncated for quadrature, for the lowest mode `k = 1`. The gradient energy
/// of that mode below the cut scales as `exp(−2h)`, so 18.5 keeps it under
/// `1e−16` of its total.
pub const TRUNCATION_OFFSET: f64 = 18.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The `+` fluid, below the interface, above `y = −H⁺`.
    Lower,
    /// The `−` fluid, above the interface, below `y = H⁻`.
    Upper,
}

/// One fluid layer: which side of the interface, its depth (possibly
/// infinite) and an optional truncation depth used for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerSpec {
    pub side: Side,
    pub depth: f64,
    pub truncation: Option<f64>,
}

impl LayerSpec {
    pub fn new(side: Side, depth: f64) -> Result<Self> {
        if depth.is_nan() || depth <= 0.0 {
            return Err(Error::InvalidInput(format!("layer depth must be positive, got {depth}")));
        }
        Ok(Self {
            side,
            depth,
            truncation: None,
        })
    }

    pub fn lower(depth: f64) -> Result<Self> {
        Self::new(Side::Lower, depth)
    }

    pub fn upper(depth: f64) -> Result<Self> {
        Self::new(Side::Upper, depth)
    }

    pub fn with_truncation(mut self, h: f64) -> Self {
        self.truncation = Some(h);
        self
    }

    pub fn is_infinite(&self) -> bool {
        self.depth.is_infinite()
    }

    /// Flat-interface Dirichlet–Neumann symbol `|k| tanh(H|k|)` (or `|k|`).
    pub fn symbol(&self, k: f64) -> f64 {
        flat_symbol(k, self.depth)
    }

    /// Map a height in this layer to the equivalent height in a lower layer.
    fn mirror(&self, y: f64) -> f64 {
        match self.side {
            Side::Lower => y,
            Side::Upper => -y,
        }
    }

    /// Distance from `y = 0` to the bottom (or lid) used for integration:
    /// the depth itself, or the truncation for infinite layers. `reach` is the
    /// largest interface excursion towards that boundary.
    pub fn integration_depth(&self, reach: f64) -> Result<f64> {
        let h = if self.is_infinite() {
            self.truncation.unwrap_or(reach + TRUNCATION_OFFSET)
        } else {
            self.depth
        };
        if h <= reach {
            return Err(Error::DepthMargin {
                clearance: h - reach,
                required: 0.0,
            });
        }
        Ok(h)
    }

    /// Largest excursion of the interface towards this layer's boundary.
    pub fn reach(&self, eta: &[f64]) -> f64 {
        eta.iter()
            .map(|&e| -self.mirror(e))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn flat_symbol(k: f64, depth: f64) -> f64 {
    let k = k.abs();
    if depth.is_infinite() {
        k
    } else {
        k * (k * depth).tanh()
    }
}

/// Harmonic function in one layer written on a reference line `y = y0`:
/// `φ = c₀ + Σ_{k≥1} 2 Re(c_k e^{ikx}) Z_k(y)` with `Z_k(y0) = 1` and `Z_k`
/// satisfying the bottom condition (zero Neumann data or decay).
#[derive(Debug, Clone, PartialEq)]
pub struct LayerField {
    layer: LayerSpec,
    y0: f64,
    coeffs: Vec<Complex64>,
    /// Furthest height (in mirrored coordinates) at which evaluation is allowed.
    top: f64,
}

/// Value and gradient at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample {
    pub phi: f64,
    pub phi_x: f64,
    pub phi_y: f64,
}

impl LayerField {
    /// Harmonic extension of a trace given on the flat line `y = y0`.
    pub fn extend(trace: &[f64], layer: LayerSpec, y0: f64) -> Result<Self> {
        let c = spectral::fft(trace);
        let n = trace.len();
        let kmax = (n - 1) / 2;
        Self::from_coefficients(layer, y0, c[..=kmax].to_vec())
    }

    /// Field from one-sided coefficients `c_0..c_K` on the line `y = y0`.
    pub fn from_coefficients(layer: LayerSpec, y0: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        let yb = layer.mirror(y0);
        if !layer.is_infinite() && yb <= -layer.depth {
            return Err(Error::Domain { x: 0.0, y: y0 });
        }
        let mut coeffs = coeffs;
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        coeffs[0].im = 0.0;
        Ok(Self {
            layer,
            y0,
            coeffs,
            top: yb,
        })
    }

    /// Field whose trace on the graph `y = η(x)` matches `trace` at the grid
    /// nodes, found by least squares over the exact layer basis.
    pub fn from_graph_trace(layer: LayerSpec, graph: &GraphInterface, trace: &[f64]) -> Result<Self> {
        let n = graph.require_1d()?;
        if trace.len() != n {
            return Err(Error::GridMismatch {
                left: n,
                right: trace.len(),
            });
        }
        let eta = graph.samples();
        let reach = layer.reach(eta);
        if !layer.is_infinite() && reach >= layer.depth {
            return Err(Error::DepthMargin {
                clearance: layer.depth - reach,
                required: 0.0,
            });
        }
        let y0 = spectral::mean(eta);
        let x = graph.x_grid();
        let kcap = (n - 1) / 2;
        let bw_f = bandwidth(trace);
        let bw_e = bandwidth(eta);
        let mut k = (bw_f + 8 * bw_e).clamp(4, kcap);
        let scale = spectral::sup_norm(trace).max(f64::MIN_POSITIVE);
        loop {
            let (field, residual) = Self::fit(layer, y0, &x, eta, trace, k)?;
            let rel = residual / scale;
            if rel <= 1e-12 || (k == kcap && rel <= 1e-9) {
                let top = layer.mirror(y0).max(eta.iter().map(|&e| layer.mirror(e)).fold(f64::NEG_INFINITY, f64::max));
                return Ok(Self { top, ..field });
            }
            if k == kcap {
                return Err(Error::RefinementNeeded {
                    what: "harmonic extension fit",
                    tail: rel,
                    threshold: 1e-9,
                });
            }
            k = (2 * k).min(kcap);
        }
    }

    fn fit(
        layer: LayerSpec,
        y0: f64,
        x: &[f64],
        eta: &[f64],
        trace: &[f64],
        kmax: usize,
    ) -> Result<(Self, f64)> {
        let n = x.len();
        let cols = 2 * kmax + 1;
        let probe = Self {
            layer,
            y0,
            coeffs: vec![Complex64::new(0.0, 0.0); kmax + 1],
            top: f64::INFINITY,
        };
        let mut a = DMatrix::<f64>::zeros(n, cols);
        let mut z = vec![0.0; kmax + 1];
        let mut dz = vec![0.0; kmax + 1];
        for j in 0..n {
            probe.profiles(eta[j], &mut z, &mut dz);
            a[(j, 0)] = 1.0;
            for k in 1..=kmax {
                let (s, c) = (k as f64 * x[j]).sin_cos();
                a[(j, 2 * k - 1)] = c * z[k];
                a[(j, 2 * k)] = s * z[k];
            }
        }
        let norms: Vec<f64> = (0..cols).map(|c| a.column(c).norm().max(f64::MIN_POSITIVE)).collect();
        for (c, nrm) in norms.iter().enumerate() {
            a.column_mut(c).unscale_mut(*nrm);
        }
        let b = DVector::from_column_slice(trace);
        let svd = a.clone().svd(true, true);
        let sol = svd
            .solve(&b, 1e-14 * svd.singular_values.max())
            .map_err(|e| Error::Degenerate(e.to_string()))?;
        let residual = (&a * &sol - &b).amax();
        let mut coeffs = vec![Complex64::new(sol[0] / norms[0], 0.0)];
        for k in 1..=kmax {
            let ak = sol[2 * k - 1] / norms[2 * k - 1];
            let bk = sol[2 * k] / norms[2 * k];
            coeffs.push(Complex64::new(0.5 * ak, -0.5 * bk));
        }
        let field = Self {
            layer,
            y0,
            coeffs,
            top: f64::INFINITY,
        };
        Ok((field, residual))
    }

    /// Allow evaluation up to height `y` beyond the reference line, for
    /// coefficient sets known to describe an entire harmonic function.
    pub fn with_reach(mut self, y: f64) -> Self {
        self.top = self.top.max(self.layer.mirror(y));
        self
    }

    pub fn layer(&self) -> &LayerSpec {
        &self.layer
    }

    pub fn reference_height(&self) -> f64 {
        self.y0
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Fill `z[k] = Z_k(y)` and `dz[k] = Z_k'(y)` in the layer's own coordinate.
    fn profiles(&self, y: f64, z: &mut [f64], dz: &mut [f64]) {
        let sign = match self.layer.side {
            Side::Lower => 1.0,
            Side::Upper => -1.0,
        };
        let yb = self.layer.mirror(y);
        let yb0 = self.layer.mirror(self.y0);
        let q = (yb - yb0).exp();
        let (r, r0) = if self.layer.is_infinite() {
            (0.0, 0.0)
        } else {
            let h = self.layer.depth;
            ((-2.0 * (yb + h)).exp(), (-2.0 * (yb0 + h)).exp())
        };
        let (mut qk, mut rk, mut r0k) = (1.0, 1.0, 1.0);
        z[0] = 1.0;
        dz[0] = 0.0;
        for k in 1..z.len() {
            qk *= q;
            rk *= r;
            r0k *= r0;
            let den = 1.0 + r0k;
            z[k] = qk * (1.0 + rk) / den;
            dz[k] = sign * k as f64 * qk * (1.0 - rk) / den;
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        let yb = self.layer.mirror(y);
        let tol = 1e-12 * (1.0 + yb.abs());
        yb <= self.top + tol && (self.layer.is_infinite() || yb >= -self.layer.depth - tol)
    }

    pub fn sample(&self, x: f64, y: f64) -> Result<FieldSample> {
        if !self.contains(y) {
            return Err(Error::Domain { x, y });
        }
        let mut out = [FieldSample::default()];
        self.column_unchecked(x, &[y], &mut out, &mut Scratch::new(self.coeffs.len()));
        Ok(out[0])
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.sample(x, y)?.phi)
    }

    pub fn grad(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let s = self.sample(x, y)?;
        Ok((s.phi_x, s.phi_y))
    }

    /// Values and gradients along the vertical line through `x`.
    pub fn column(&self, x: f64, ys: &[f64]) -> Result<Vec<FieldSample>> {
        if let Some(&y) = ys.iter().find(|&&y| !self.contains(y)) {
            return Err(Error::Domain { x, y });
        }
        let mut out = vec![FieldSample::default(); ys.len()];
        self.column_unchecked(x, ys, &mut out, &mut Scratch::new(self.coeffs.len()));
        Ok(out)
    }

    pub(crate) fn column_unchecked(&self, x: f64, ys: &[f64], out: &mut [FieldSample], scratch: &mut Scratch) {
        let kk = self.coeffs.len();
        let step = Complex64::from_polar(1.0, x);
        let mut rot = Complex64::new(1.0, 0.0);
        // Per mode: value part Re(c e^{ikx}) and x-derivative part Re(ik c e^{ikx}).
        for k in 0..kk {
            let w = self.coeffs[k] * rot;
            let mult = if k == 0 { 1.0 } else { 2.0 };
            scratch.re[k] = mult * w.re;
            scratch.dx[k] = -mult * k as f64 * w.im;
            rot *= step;
        }
        for (y, o) in ys.iter().zip(out.iter_mut()) {
            self.profiles(*y, &mut scratch.z, &mut scratch.dz);
            let mut s = FieldSample::default();
            for k in 0..kk {
                s.phi += scratch.re[k] * scratch.z[k];
                s.phi_x += scratch.dx[k] * scratch.z[k];
                s.phi_y += scratch.re[k] * scratch.dz[k];
            }
            *o = s;
        }
    }

    /// Trace `φ(x_j, η(x_j))` on the grid of `graph`.
    pub fn trace_on(&self, graph: &GraphInterface) -> Result<Vec<f64>> {
        Ok(self.samples_on(graph)?.iter().map(|s| s.phi).collect())
    }

    fn samples_on(&self, graph: &GraphInterface) -> Result<Vec<FieldSample>> {
        let mut scratch = Scratch::new(self.coeffs.len());
        graph
            .x_grid()
            .iter()
            .zip(graph.samples())
            .map(|(&x, &y)| {
                if !self.contains(y) {
                    return Err(Error::Domain { x, y });
                }
                let mut out = [FieldSample::default()];
                self.column_unchecked(x, &[y], &mut out, &mut scratch);
                Ok(out[0])
            })
            .collect()
    }

    /// Outward normal derivative scaled by the surface element,
    /// `±(φ_y − η′φ_x)` with `+` for the lower layer.
    pub fn normal_derivative_on(&self, graph: &GraphInterface) -> Result<Vec<f64>> {
        let slope = graph.slope()?;
        let sign = match self.layer.side {
            Side::Lower => 1.0,
            Side::Upper => -1.0,
        };
        Ok(self
            .samples_on(graph)?
            .iter()
            .zip(&slope)
            .map(|(s, p)| sign * (s.phi_y - p * s.phi_x))
            .collect())
    }

    /// Dirichlet energy `∬|∇φ|²` of the part of the field beyond the line at
    /// mirrored height `−h` (only meaningful for infinite layers).
    pub fn tail_energy(&self, h: f64) -> f64 {
        if !self.layer.is_infinite() {
            return 0.0;
        }
        let yb0 = self.layer.mirror(self.y0);
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| {
                let k = k as f64;
                2.0 * TAU * k * c.norm_sqr() * (-2.0 * k * (h + yb0)).exp()
            })
            .sum()
    }

    /// `sup_x |y^p ∂_x^a ∂_y^b φ|` on each height of `ys`, for `a + b ≥ 1`.
    pub fn decay_profile(&self, power: i32, alpha: (u32, u32), ys: &[f64]) -> Result<Vec<f64>> {
        if !self.layer.is_infinite() {
            return Err(Error::Unsupported("decay profile requires an infinite layer".into()));
        }
        if alpha.0 + alpha.1 == 0 {
            return Err(Error::InvalidInput("derivative order must be at least one".into()));
        }
        let kk = self.coeffs.len();
        let nx = (8 * kk).max(64);
        let sign = match self.layer.side {
            Side::Lower => 1.0,
            Side::Upper => -1.0,
        };
        let yb0 = self.layer.mirror(self.y0);
        ys.iter()
            .map(|&y| {
                if !self.contains(y) {
                    return Err(Error::Domain { x: 0.0, y });
                }
                let yb = self.layer.mirror(y);
                let mut modes = vec![Complex64::new(0.0, 0.0); kk];
                for (k, m) in modes.iter_mut().enumerate().skip(1) {
                    let kf = k as f64;
                    let dx = Complex64::new(0.0, kf).powu(alpha.0);
                    let dy = (sign * kf).powi(alpha.1 as i32);
                    *m = 2.0 * self.coeffs[k] * dx * dy * (kf * (yb - yb0)).exp();
                }
                let sup = (0..nx)
                    .map(|j| {
                        let x = TAU * j as f64 / nx as f64;
                        let step = Complex64::from_polar(1.0, x);
                        let mut rot = Complex64::new(1.0, 0.0);
                        let mut acc = 0.0;
                        for m in &modes {
                            acc += (m * rot).re;
                            rot *= step;
                        }
                        acc.abs()
                    })
                    .fold(0.0_f64, f64::max);
                Ok(y.abs().powi(power) * sup)
            })
            .collect()
    }
}

pub(crate) struct Scratch {
    re: Vec<f64>,
    dx: Vec<f64>,
    z: Vec<f64>,
    dz: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(k: usize) -> Self {
        Self {
            re: vec![0.0; k],
            dx: vec![0.0; k],
            z: vec![0.0; k],
            dz: vec![0.0; k],
        }
    }
}

/// Largest wavenumber carrying a non-negligible coefficient.
fn bandwidth(v: &[f64]) -> usize {
    let c = spectral::fft(v);
    let n = v.len();
    let top = c.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    (0..n)
        .filter(|&i| c[i].norm() > 1e-13 * top)
        .map(|i| spectral::wavenumber(i, n).unsigned_abs() as usize)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_trace(n: usize) -> Vec<f64> {
        spectral::grid(n, TAU).iter().map(|x| x.cos()).collect()
    }

    #[test]
    fn half_plane_extension_of_cosine() {
        let f = LayerField::extend(&cos_trace(16), LayerSpec::lower(f64::INFINITY).unwrap(), 0.0).unwrap();
        for &(x, y) in &[(0.3_f64, -0.5_f64), (2.0, -3.0), (5.0, 0.0)] {
            let s = f.sample(x, y).unwrap();
            assert!((s.phi - y.exp() * x.cos()).abs() < 1e-14);
            assert!((s.phi_x + y.exp() * x.sin()).abs() < 1e-14);
            assert!((s.phi_y - y.exp() * x.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn finite_strip_extension_of_cosine() {
        let h: f64 = 1.3;
        let f = LayerField::extend(&cos_trace(16), LayerSpec::lower(h).unwrap(), 0.0).unwrap();
        for &(x, y) in &[(0.3_f64, -0.5_f64), (2.0, -1.3), (5.0, 0.0)] {
            let expected = x.cos() * (y + h).cosh() / h.cosh();
            assert!((f.eval(x, y).unwrap() - expected).abs() < 1e-14);
        }
        assert!(f.grad(1.0, -h).unwrap().1.abs() < 1e-14);
    }

    #[test]
    fn upper_layer_decays_upwards() {
        let f = LayerField::extend(&cos_trace(16), LayerSpec::upper(f64::INFINITY).unwrap(), 0.0).unwrap();
        let s = f.sample(0.0, 2.0).unwrap();
        assert!((s.phi - (-2.0f64).exp()).abs() < 1e-14);
        assert!((s.phi_y + (-2.0f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn constant_trace_is_constant_field() {
        let f = LayerField::extend(&[2.5; 8], LayerSpec::lower(2.0).unwrap(), 0.0).unwrap();
        let s = f.sample(1.0, -1.0).unwrap();
        assert!((s.phi - 2.5).abs() < 1e-15 && s.phi_x == 0.0 && s.phi_y == 0.0);
    }

    #[test]
    fn outside_layer_is_a_domain_error() {
        let f = LayerField::extend(&cos_trace(8), LayerSpec::lower(1.0).unwrap(), 0.0).unwrap();
        assert!(matches!(f.eval(0.0, 0.5), Err(Error::Domain { .. })));
        assert!(matches!(f.eval(0.0, -1.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn decay_profile_of_cosine() {
        let f = LayerField::extend(&cos_trace(16), LayerSpec::lower(f64::INFINITY).unwrap(), 0.0).unwrap();
        let ys = [-0.5, -2.0, -6.0];
        let p = f.decay_profile(2, (0, 1), &ys).unwrap();
        for (y, v) in ys.iter().zip(&p) {
            assert!((v - y * y * y.exp()).abs() < 1e-13);
        }
        let finite = LayerField::extend(&cos_trace(16), LayerSpec::lower(1.0).unwrap(), 0.0).unwrap();
        assert!(matches!(finite.decay_profile(1, (1, 0), &ys), Err(Error::Unsupported(_))));
    }

    #[test]
    fn graph_fit_reproduces_a_known_field() {
        let layer = LayerSpec::lower(2.0).unwrap();
        let exact = LayerField::from_coefficients(
            layer,
            0.0,
            vec![Complex64::new(0.1, 0.0), Complex64::new(0.5, -0.2), Complex64::new(0.0, 0.1)],
        )
        .unwrap()
        .with_reach(1.0);
        let g = GraphInterface::from_fn(64, |x| 0.2 * x.cos() + 0.05 * (2.0 * x).sin()).unwrap();
        let fit = LayerField::from_graph_trace(layer, &g, &exact.trace_on(&g).unwrap()).unwrap();
        for &(x, y) in &[(0.4, -1.0), (3.0, 0.1), (5.5, -1.9)] {
            assert!((fit.eval(x, y).unwrap() - exact.eval(x, y).unwrap()).abs() < 1e-11);
        }
    }
}
