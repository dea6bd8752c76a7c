//! Dirichlet–Neumann operator of a graph interface as a series in powers of
//! the elevation.
//!
//! For the lower layer `G(η)f = φ_y − η′φ_x` at `y = η`, where `φ` is the
//! harmonic extension of `f`. The upper layer reuses the same recursion on
//! the reflected interface `−η`.

use crate::error::{Error, Result};
use crate::geometry::GraphInterface;
use crate::harmonic::layer::{flat_symbol, LayerSpec, Side};
use crate::spectral;
use num_complex::Complex64;

pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnoExpansion {
    order: usize,
    layer: LayerSpec,
    tail_threshold: f64,
}

impl DnoExpansion {
    pub fn new(order: usize, layer: LayerSpec) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::InvalidInput(format!(
                "expansion order {order} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        Ok(Self {
            order,
            layer,
            tail_threshold: crate::geometry::graph::TAIL_THRESHOLD,
        })
    }

    /// Spectral tail ratio of `η` or `f` above which application is refused.
    pub fn with_tail_threshold(mut self, threshold: f64) -> Self {
        self.tail_threshold = threshold;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn layer(&self) -> &LayerSpec {
        &self.layer
    }

    /// Homogeneous terms `G_0 f, …, G_order f`.
    pub fn terms(&self, interface: &GraphInterface, trace: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.prepare(interface)?.terms(trace)
    }
}

pub fn dno_apply(expansion: &DnoExpansion, interface: &GraphInterface, trace: &[f64]) -> Result<Vec<f64>> {
    expansion.prepare(interface)?.apply(trace)
}

/// Flat-interface operator applied to samples.
pub fn flat_dno(trace: &[f64], depth: f64) -> Vec<f64> {
    spectral::apply_real_symbol(trace, std::f64::consts::TAU, |k| flat_symbol(k, depth))
}

/// Expansion bound to one interface: powers of the (possibly reflected)
/// elevation are kept on the 3/2-padded grid so that repeated applications
/// only transform the trace.
#[derive(Debug, Clone)]
pub struct PreparedDno {
    order: usize,
    n: usize,
    padded: usize,
    tail_threshold: f64,
    /// `η^j/j!` on the padded grid, `j = 1..=order`.
    powers: Vec<Vec<f64>>,
    /// `A_j` symbols per bin, `j = 0..=max(order, 1)`; `A_1` is the flat operator.
    vertical: Vec<Vec<f64>>,
    /// `ik` per bin, zero at Nyquist.
    ik: Vec<Complex64>,
}

impl DnoExpansion {
    pub fn prepare(&self, interface: &GraphInterface) -> Result<PreparedDno> {
        let n = interface.require_1d()?;
        let tail = spectral::tail_ratio(interface.samples());
        if tail > self.tail_threshold {
            return Err(Error::RefinementNeeded {
                what: "interface elevation",
                tail,
                threshold: self.tail_threshold,
            });
        }
        let sign = match self.layer.side {
            Side::Lower => 1.0,
            Side::Upper => -1.0,
        };
        let m = spectral::padded_len(n);
        let eta_pad = spectral::resample(interface.samples(), m);
        let mut powers: Vec<Vec<f64>> = Vec::with_capacity(self.order);
        let mut current = vec![1.0; m];
        for j in 1..=self.order {
            for (c, e) in current.iter_mut().zip(&eta_pad) {
                *c *= sign * e / j as f64;
            }
            powers.push(current.clone());
        }
        let depth = self.layer.depth;
        let vertical = (0..=self.order.max(1))
            .map(|j| {
                (0..n)
                    .map(|i| {
                        if spectral::is_nyquist(i, n) {
                            return 0.0;
                        }
                        let k = spectral::wavenumber(i, n).unsigned_abs() as f64;
                        if j == 0 {
                            1.0
                        } else if j % 2 == 0 {
                            k.powi(j as i32)
                        } else {
                            k.powi(j as i32 - 1) * flat_symbol(k, depth)
                        }
                    })
                    .collect()
            })
            .collect();
        let ik = (0..n)
            .map(|i| {
                if spectral::is_nyquist(i, n) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, spectral::wavenumber(i, n) as f64)
                }
            })
            .collect();
        Ok(PreparedDno {
            order: self.order,
            n,
            padded: m,
            tail_threshold: self.tail_threshold,
            powers,
            vertical,
            ik,
        })
    }
}

impl PreparedDno {
    fn scaled(&self, c: &[Complex64], j: usize) -> Vec<Complex64> {
        c.iter().zip(&self.vertical[j]).map(|(c, s)| c * s).collect()
    }

    /// `Σ_j power_j · f_j` projected back to `n` coefficients.
    fn weighted_sum(&self, parts: &[(usize, Vec<Complex64>)]) -> Vec<Complex64> {
        let mut acc = vec![0.0; self.padded];
        for (j, c) in parts {
            let values = spectral::ifft(&spectral::resize_coeffs(c, self.padded));
            for ((a, v), p) in acc.iter_mut().zip(values).zip(&self.powers[j - 1]) {
                *a += v * p;
            }
        }
        spectral::resize_coeffs(&spectral::fft(&acc), self.n)
    }

    /// Coefficients of `G_0 f, …, G_order f`.
    fn term_coeffs(&self, trace: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        if trace.len() != self.n {
            return Err(Error::GridMismatch {
                left: self.n,
                right: trace.len(),
            });
        }
        let tail = spectral::tail_ratio(trace);
        if tail > self.tail_threshold {
            return Err(Error::RefinementNeeded {
                what: "dirichlet trace",
                tail,
                threshold: self.tail_threshold,
            });
        }
        let f = spectral::fft(trace);
        let mut c: Vec<Vec<Complex64>> = vec![f.clone()];
        let mut terms = vec![self.scaled(&f, 1)];
        for m in 1..=self.order {
            let sources: Vec<(usize, Vec<Complex64>)> =
                (1..=m).map(|j| (j, self.scaled(&c[m - j], j))).collect();
            let mut cm = self.weighted_sum(&sources);
            for v in &mut cm {
                *v = -*v;
            }
            let fluxes: Vec<(usize, Vec<Complex64>)> = (1..=m)
                .map(|j| {
                    let a = self.scaled(&c[m - j], j - 1);
                    (j, a.iter().zip(&self.ik).map(|(a, k)| a * k).collect())
                })
                .collect();
            let flux = self.weighted_sum(&fluxes);
            let gm: Vec<Complex64> = cm
                .iter()
                .zip(&self.vertical[1])
                .zip(flux.iter().zip(&self.ik))
                .map(|((c, s), (q, k))| c * s - q * k)
                .collect();
            terms.push(gm);
            c.push(cm);
        }
        Ok(terms)
    }

    pub fn terms(&self, trace: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.term_coeffs(trace)?.iter().map(|c| spectral::ifft(c)).collect())
    }

    pub fn apply(&self, trace: &[f64]) -> Result<Vec<f64>> {
        let terms = self.term_coeffs(trace)?;
        let mut sum = vec![Complex64::new(0.0, 0.0); self.n];
        for t in &terms {
            for (s, v) in sum.iter_mut().zip(t) {
                *s += v;
            }
        }
        Ok(spectral::ifft(&sum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn flat_interface_uses_the_strip_symbol() {
        let h = 0.7;
        let g = GraphInterface::flat(32);
        let f: Vec<f64> = spectral::grid(32, TAU).iter().map(|x| x.cos()).collect();
        let e = DnoExpansion::new(3, LayerSpec::lower(h).unwrap()).unwrap();
        let out = dno_apply(&e, &g, &f).unwrap();
        for (o, v) in out.iter().zip(&f) {
            assert!((o - h.tanh() * v).abs() < 1e-14);
        }
    }

    #[test]
    fn constants_are_annihilated() {
        let g = GraphInterface::from_fn(32, |x| 0.2 * x.cos()).unwrap();
        for layer in [LayerSpec::lower(1.0).unwrap(), LayerSpec::upper(f64::INFINITY).unwrap()] {
            let e = DnoExpansion::new(4, layer).unwrap();
            let out = dno_apply(&e, &g, &[1.5; 32]).unwrap();
            assert!(spectral::sup_norm(&out) < 1e-13);
        }
    }

    #[test]
    fn first_order_term_matches_closed_form() {
        // G_1 f = −G_0(η G_0 f) − ∂_x(η ∂_x f). For η = a cos x, f = cos x in
        // deep water the two pieces are −a cos 2x and +a cos 2x.
        let a = 0.1;
        let n = 32;
        let g = GraphInterface::from_fn(n, |x| a * x.cos()).unwrap();
        let f: Vec<f64> = spectral::grid(n, TAU).iter().map(|x| x.cos()).collect();
        let e = DnoExpansion::new(1, LayerSpec::lower(f64::INFINITY).unwrap()).unwrap();
        let terms = e.terms(&g, &f).unwrap();
        assert!(spectral::sup_norm(&terms[1]) < 1e-14);

        // Finite depth H: G_1 cos x = a(1 − tanh H · tanh 2H) cos 2x.
        let h = 0.8;
        let e = DnoExpansion::new(1, LayerSpec::lower(h).unwrap()).unwrap();
        let terms = e.terms(&g, &f).unwrap();
        let amp = a * (1.0 - h.tanh() * (2.0 * h).tanh());
        for (x, v) in spectral::grid(n, TAU).iter().zip(&terms[1]) {
            assert!((v - amp * (2.0 * x).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn order_is_bounded() {
        assert!(DnoExpansion::new(MAX_ORDER + 1, LayerSpec::lower(1.0).unwrap()).is_err());
    }
}
