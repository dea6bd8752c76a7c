use std::f64::consts::TAU;

use num_complex::Complex64;

use super::graph::{GraphInterface, TAIL_THRESHOLD};
use crate::error::{Error, Result};
use crate::spectral;

/// Largest tolerated deviation of `|γ_s|` from one.
pub const ARC_LENGTH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Counter-clockwise loops, or open curves traversed towards increasing x.
    Positive,
    Negative,
}

/// Closed curve in `T × R` sampled at uniform arc length.
///
/// `alpha` carries its secular part: `α(s + L) = α(s) + 2π·winding`.
/// Closed loops that do not wrap around the torus have winding 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCurve {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    length: f64,
    winding: i32,
}

impl ArcCurve {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, length: f64, winding: i32) -> Result<Self> {
        let curve = Self::new_unchecked(alpha, beta, length, winding)?;
        let defect = curve.speed_defect();
        if defect > ARC_LENGTH_TOL {
            return Err(Error::InvalidInput(format!(
                "curve is not parametrized by arc length: max ||γ_s| - 1| = {defect:.3e}"
            )));
        }
        Ok(curve)
    }

    fn new_unchecked(alpha: Vec<f64>, beta: Vec<f64>, length: f64, winding: i32) -> Result<Self> {
        if alpha.len() != beta.len() {
            return Err(Error::GridMismatch {
                left: alpha.len(),
                right: beta.len(),
            });
        }
        if alpha.len() < 4 {
            return Err(Error::InvalidInput("curve needs at least 4 nodes".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidInput(format!("curve length must be positive, got {length}")));
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("curve samples must be finite".into()));
        }
        Ok(Self {
            alpha,
            beta,
            length,
            winding,
        })
    }

    /// Resample a curve given at `n_in` uniform parameter values `t ∈ [0, 2π)`
    /// onto `n_out` uniform arc-length nodes.
    ///
    /// The input `alpha_t` includes the secular part `winding·t`. The
    /// parameter is recovered per node by Newton iteration on the spectrally
    /// integrated arc length.
    pub fn reparametrize(
        alpha_t: &[f64],
        beta_t: &[f64],
        winding: i32,
        n_out: usize,
    ) -> Result<Self> {
        let n_in = alpha_t.len();
        if beta_t.len() != n_in {
            return Err(Error::GridMismatch {
                left: n_in,
                right: beta_t.len(),
            });
        }
        let w = winding as f64;
        let t = spectral::grid(n_in, TAU);
        let periodic: Vec<f64> = alpha_t.iter().zip(&t).map(|(a, t)| a - w * t).collect();
        let ca = spectral::fft(&periodic);
        let cb = spectral::fft(beta_t);
        let da = spectral::ifft(&spectral::apply_symbol_coeffs(&ca, TAU, |k| Complex64::new(0.0, k)));
        let db = spectral::ifft(&spectral::apply_symbol_coeffs(&cb, TAU, |k| Complex64::new(0.0, k)));
        let speed: Vec<f64> = da.iter().zip(&db).map(|(a, b)| (a + w).hypot(*b)).collect();
        if speed.iter().any(|v| *v <= 0.0) {
            return Err(Error::Degenerate("curve parametrization has vanishing speed".into()));
        }
        let tail = spectral::tail_ratio(&speed);
        if tail > 1e-10 {
            return Err(Error::RefinementNeeded {
                what: "curve speed",
                tail,
                threshold: 1e-10,
            });
        }
        let cs = spectral::fft(&speed);
        let mean_speed = cs[0].re;
        let length = TAU * mean_speed;
        // Antiderivative of the zero-mean part of the speed.
        let anti: Vec<Complex64> = cs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = spectral::wavenumber(i, n_in);
                if k == 0 || spectral::is_nyquist(i, n_in) {
                    Complex64::new(0.0, 0.0)
                } else {
                    c / Complex64::new(0.0, k as f64)
                }
            })
            .collect();
        let arc = |t: f64| mean_speed * t + spectral::eval_at(&anti, TAU, t) - anti_at_zero(&anti);
        let mut alpha = Vec::with_capacity(n_out);
        let mut beta = Vec::with_capacity(n_out);
        for j in 0..n_out {
            let target = j as f64 * length / n_out as f64;
            let mut tj = target / mean_speed;
            for _ in 0..60 {
                let step = (arc(tj) - target) / spectral::eval_at(&cs, TAU, tj);
                tj -= step;
                if step.abs() < 1e-13 {
                    break;
                }
            }
            alpha.push(w * tj + spectral::eval_at(&ca, TAU, tj));
            beta.push(spectral::eval_at(&cb, TAU, tj));
        }
        Self::new(alpha, beta, length, winding)
    }

    /// Circle of radius `radius` centred at `(x0, y0)`, starting at its
    /// rightmost point.
    pub fn circle(x0: f64, y0: f64, radius: f64, n: usize, orientation: Orientation) -> Result<Self> {
        let sign = match orientation {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        };
        let theta = spectral::grid(n, TAU);
        let alpha = theta.iter().map(|t| x0 + radius * t.cos()).collect();
        let beta = theta.iter().map(|t| y0 + sign * radius * t.sin()).collect();
        Self::new(alpha, beta, TAU * radius, 0)
    }

    /// Horizontal line `y = y0` traversed towards increasing x.
    pub fn flat(n: usize, y0: f64) -> Result<Self> {
        Self::new(spectral::grid(n, TAU), vec![y0; n], TAU, 1)
    }

    /// Arc-length parametrization of a one-dimensional graph interface.
    pub fn from_graph(graph: &GraphInterface, n_out: usize) -> Result<Self> {
        let n = graph.require_1d()?;
        Self::reparametrize(&spectral::grid(n, TAU), graph.samples(), 1, n_out)
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn winding(&self) -> i32 {
        self.winding
    }

    pub fn ds(&self) -> f64 {
        self.length / self.n() as f64
    }

    pub fn s_grid(&self) -> Vec<f64> {
        spectral::grid(self.n(), self.length)
    }

    fn secular_slope(&self) -> f64 {
        TAU * self.winding as f64 / self.length
    }

    fn alpha_periodic(&self) -> Vec<f64> {
        let c = self.secular_slope();
        self.alpha
            .iter()
            .zip(self.s_grid())
            .map(|(a, s)| a - c * s)
            .collect()
    }

    /// `(α_s, β_s)` at the nodes.
    pub fn tangent(&self) -> (Vec<f64>, Vec<f64>) {
        let c = self.secular_slope();
        let da = spectral::derivative(&self.alpha_periodic(), self.length)
            .into_iter()
            .map(|v| v + c)
            .collect();
        (da, spectral::derivative(&self.beta, self.length))
    }

    /// Unit normal `(−β_s, α_s)`.
    pub fn normal(&self) -> (Vec<f64>, Vec<f64>) {
        let (da, db) = self.tangent();
        (db.into_iter().map(|v| -v).collect(), da)
    }

    pub fn speed_defect(&self) -> f64 {
        let (da, db) = self.tangent();
        da.iter()
            .zip(&db)
            .fold(0.0_f64, |m, (a, b)| m.max((a.hypot(*b) - 1.0).abs()))
    }

    pub fn tail_ratio(&self) -> f64 {
        spectral::tail_ratio(&self.alpha_periodic()).max(spectral::tail_ratio(&self.beta))
    }

    /// `κ = α_ss β_s − β_ss α_s`, the curvature with `τ_s = −κ n`.
    pub fn curvature(&self) -> Result<Vec<f64>> {
        let tail = self.tail_ratio();
        if tail > TAIL_THRESHOLD {
            return Err(Error::RefinementNeeded {
                what: "curve samples",
                tail,
                threshold: TAIL_THRESHOLD,
            });
        }
        let (da, db) = self.tangent();
        let dda = spectral::second_derivative(&self.alpha_periodic(), self.length);
        let ddb = spectral::second_derivative(&self.beta, self.length);
        Ok((0..self.n())
            .map(|j| dda[j] * db[j] - ddb[j] * da[j])
            .collect())
    }

    pub fn curvature_inf(&self) -> Result<f64> {
        Ok(spectral::sup_norm(&self.curvature()?))
    }

    /// Point `γ(s)` for arbitrary `s`, by trigonometric interpolation.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let ca = spectral::fft(&self.alpha_periodic());
        let cb = spectral::fft(&self.beta);
        self.eval_with(&ca, &cb, s)
    }

    fn eval_with(&self, ca: &[Complex64], cb: &[Complex64], s: f64) -> (f64, f64) {
        (
            self.secular_slope() * s + spectral::eval_at(ca, self.length, s),
            spectral::eval_at(cb, self.length, s),
        )
    }

    pub fn orientation(&self) -> Orientation {
        let signed = if self.winding != 0 {
            self.winding as f64
        } else {
            // ∮ α dβ is the enclosed area for counter-clockwise loops.
            let (_, db) = self.tangent();
            spectral::integrate(
                &self.alpha.iter().zip(&db).map(|(a, b)| a * b).collect::<Vec<_>>(),
                self.length,
            )
        };
        if signed >= 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }

    /// Same point set traversed backwards, `s ↦ L − s`.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        let pick = |v: &[f64]| (0..n).map(|j| v[(n - j) % n]).collect::<Vec<_>>();
        let mut alpha = pick(&self.alpha);
        // Node 0 keeps its position; the secular part must still decrease.
        if self.winding != 0 {
            let shift = TAU * self.winding as f64;
            for a in alpha.iter_mut().skip(1) {
                *a -= shift;
            }
        }
        Self {
            alpha,
            beta: pick(&self.beta),
            length: self.length,
            winding: -self.winding,
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            alpha: self.alpha.iter().map(|a| a + dx).collect(),
            beta: self.beta.iter().map(|b| b + dy).collect(),
            length: self.length,
            winding: self.winding,
        }
    }

    pub fn beta_range(&self) -> (f64, f64) {
        self.beta
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &b| (lo.min(b), hi.max(b)))
    }
}

fn anti_at_zero(anti: &[Complex64]) -> f64 {
    spectral::eval_at(anti, TAU, 0.0)
}

/// Sharp chord-arc constant and the parameter pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordArc {
    pub c0: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Horizontal offset reduced to `[−π, π]`.
pub fn torus_dx(dx: f64) -> f64 {
    dx - TAU * (dx / TAU).round()
}

fn chord(p: (f64, f64), q: (f64, f64)) -> f64 {
    torus_dx(p.0 - q.0).hypot(p.1 - q.1)
}

fn arc_distance(s1: f64, s2: f64, length: f64) -> f64 {
    let d = (s1 - s2).rem_euclid(length);
    d.min(length - d)
}

/// Chord-arc ratio minimized over the given nodes only.
pub fn chord_arc_of_nodes(points: &[(f64, f64)], params: &[f64], length: f64) -> Result<ChordArc> {
    if points.len() != params.len() {
        return Err(Error::GridMismatch {
            left: points.len(),
            right: params.len(),
        });
    }
    let mut best = ChordArc {
        c0: f64::INFINITY,
        s1: 0.0,
        s2: 0.0,
    };
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let arc = arc_distance(params[i], params[j], length);
            if arc == 0.0 {
                continue;
            }
            let ratio = chord(points[i], points[j]) / arc;
            if ratio < best.c0 {
                best = ChordArc {
                    c0: ratio,
                    s1: params[i],
                    s2: params[j],
                };
            }
        }
    }
    finish(best)
}

fn finish(mut best: ChordArc) -> Result<ChordArc> {
    if !(best.c0 > 4.0 * f64::EPSILON) {
        return Err(Error::SelfIntersection {
            c0: best.c0.max(0.0),
            s1: best.s1,
            s2: best.s2,
        });
    }
    best.c0 = best.c0.min(1.0);
    Ok(best)
}

/// Sharp chord-arc constant of a curve: all node pairs, then golden-section
/// refinement of the minimizing pair between neighbouring nodes.
pub fn chord_arc_constant(curve: &ArcCurve) -> Result<ChordArc> {
    let points: Vec<(f64, f64)> = curve.alpha.iter().copied().zip(curve.beta.iter().copied()).collect();
    let params = curve.s_grid();
    let discrete = chord_arc_of_nodes(&points, &params, curve.length)?;
    if discrete.c0 >= 1.0 {
        return Ok(discrete);
    }
    let ca = spectral::fft(&curve.alpha_periodic());
    let cb = spectral::fft(&curve.beta);
    let ratio = |s1: f64, s2: f64| {
        let arc = arc_distance(s1, s2, curve.length);
        if arc < 1e-9 * curve.length {
            return 1.0;
        }
        chord(curve.eval_with(&ca, &cb, s1), curve.eval_with(&ca, &cb, s2)) / arc
    };
    let h = curve.ds();
    let (mut s1, mut s2) = newton_min(&ratio, discrete.s1, discrete.s2, h, curve.length);
    // At arc separation L/2 the periodic arc distance has a kink; a minimum
    // sitting on that ridge is found by sliding the antipodal pair.
    let half = 0.5 * curve.length;
    if (arc_distance(discrete.s1, discrete.s2, curve.length) - half).abs() < 2.0 * h {
        let m = golden_min(|m| ratio(m, m + half), discrete.s1 - 2.0 * h, discrete.s1 + 2.0 * h);
        if ratio(m, m + half) < ratio(s1, s2) {
            (s1, s2) = (m, m + half);
        }
    }
    let refined = ratio(s1, s2);
    let best = if refined < discrete.c0 {
        ChordArc {
            c0: refined,
            s1: s1.rem_euclid(curve.length),
            s2: s2.rem_euclid(curve.length),
        }
    } else {
        discrete
    };
    finish(best)
}

/// Damped Newton descent from a node pair, with central-difference
/// derivatives of the smooth interpolant; steps are capped at one node
/// spacing and accepted only when they decrease `f`.
fn newton_min(f: &impl Fn(f64, f64) -> f64, mut x: f64, mut y: f64, h: f64, length: f64) -> (f64, f64) {
    let d = 1e-3 * h;
    let mut fx = f(x, y);
    for _ in 0..50 {
        let (fxp, fxm) = (f(x + d, y), f(x - d, y));
        let (fyp, fym) = (f(x, y + d), f(x, y - d));
        let gx = (fxp - fxm) / (2.0 * d);
        let gy = (fyp - fym) / (2.0 * d);
        let hxx = (fxp - 2.0 * fx + fxm) / (d * d);
        let hyy = (fyp - 2.0 * fx + fym) / (d * d);
        let hxy = (f(x + d, y + d) - f(x + d, y - d) - f(x - d, y + d) + f(x - d, y - d)) / (4.0 * d * d);
        let det = hxx * hyy - hxy * hxy;
        let (mut px, mut py) = if hxx > 0.0 && det > 0.0 {
            (-(hyy * gx - hxy * gy) / det, -(hxx * gy - hxy * gx) / det)
        } else {
            let g = gx.hypot(gy).max(f64::MIN_POSITIVE);
            (-h * gx / g, -h * gy / g)
        };
        let norm = px.hypot(py);
        if norm > h {
            px *= h / norm;
            py *= h / norm;
        }
        let mut accepted = false;
        for _ in 0..30 {
            let trial = f(x + px, y + py);
            if trial < fx {
                (x, y, fx) = (x + px, y + py, trial);
                accepted = true;
                break;
            }
            px *= 0.5;
            py *= 0.5;
        }
        if !accepted || px.hypot(py) < 1e-12 * length {
            break;
        }
    }
    (x, y)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-12 * (1.0 + a.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `min(c0/(N0(‖κ‖∞+1)), d0)`; `d0 = +∞` when neither boundary is present.
pub fn epsilon_from_parts(c0: f64, kappa_inf: f64, d0: f64, n0: f64) -> Result<f64> {
    if d0.is_nan() || d0 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "boundary distance d0 must be positive, got {d0}"
        )));
    }
    if !(n0 > 0.0) {
        return Err(Error::InvalidInput(format!("N0 must be positive, got {n0}")));
    }
    Ok((c0 / (n0 * (kappa_inf + 1.0))).min(d0))
}

pub fn epsilon_of_state(curve: &ArcCurve, d0: f64, n0: f64) -> Result<f64> {
    if d0.is_nan() || d0 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "boundary distance d0 must be positive, got {d0}"
        )));
    }
    let c0 = chord_arc_constant(curve)?.c0;
    epsilon_from_parts(c0, curve.curvature_inf()?, d0, n0)
}

/// Result of comparing `L·ε` with `2π(H⁺+H⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthBound {
    pub length: f64,
    pub epsilon: f64,
    pub bound: f64,
    pub slack: f64,
}

impl LengthBound {
    pub fn holds(&self) -> bool {
        self.slack >= 0.0
    }
}

/// Evaluate `L·ε ≤ 2π(H⁺+H⁻)` for a curve inside the strip
/// `−H⁺ < y < H⁻`, with `d0` its distance to the walls.
pub fn length_curvature_bound(curve: &ArcCurve, h_plus: f64, h_minus: f64, n0: f64) -> Result<LengthBound> {
    if !(h_plus.is_finite() && h_minus.is_finite()) {
        return Err(Error::InvalidInput("length-curvature bound needs finite depths".into()));
    }
    let (lo, hi) = curve.beta_range();
    let d0 = (lo + h_plus).min(h_minus - hi);
    if d0 <= 0.0 {
        return Err(Error::DepthMargin {
            clearance: d0,
            required: 0.0,
        });
    }
    let epsilon = epsilon_of_state(curve, d0, n0)?;
    let bound = TAU * (h_plus + h_minus);
    Ok(LengthBound {
        length: curve.length,
        epsilon,
        bound,
        slack: bound - curve.length * epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_curvature_points_inward() {
        let r = 0.7;
        let c = ArcCurve::circle(0.0, 0.0, r, 64, Orientation::Positive).unwrap();
        for k in c.curvature().unwrap() {
            assert!((k + 1.0 / r).abs() < 1e-12);
        }
        let (nx, ny) = c.normal();
        // At s = 0 the curve sits at (r, 0); the normal points to the centre.
        assert!((nx[0] + 1.0).abs() < 1e-12 && ny[0].abs() < 1e-12);
    }

    #[test]
    fn orientation_detection() {
        let c = ArcCurve::circle(0.0, 0.0, 0.5, 32, Orientation::Positive).unwrap();
        assert_eq!(c.orientation(), Orientation::Positive);
        assert_eq!(c.reversed().orientation(), Orientation::Negative);
        let f = ArcCurve::flat(32, 0.0).unwrap();
        assert_eq!(f.reversed().orientation(), Orientation::Negative);
    }

    #[test]
    fn reversed_flat_curve_is_still_arc_length() {
        let f = ArcCurve::flat(32, 0.3).unwrap().reversed();
        assert!(f.speed_defect() < 1e-12);
        assert!((f.alpha()[1] - (f.alpha()[0] - f.ds())).abs() < 1e-12);
    }

    #[test]
    fn reparametrized_graph_has_unit_speed() {
        let g = GraphInterface::from_fn(128, |x| 0.4 * x.cos()).unwrap();
        let c = ArcCurve::from_graph(&g, 128).unwrap();
        assert!(c.speed_defect() < 1e-10);
        assert!(c.length() > TAU);
    }

    #[test]
    fn epsilon_arithmetic() {
        assert!((epsilon_from_parts(0.5, 1.0, 0.1, 100.0).unwrap() - 0.0025).abs() < 1e-15);
        let f = ArcCurve::flat(32, 0.0).unwrap();
        assert!((epsilon_of_state(&f, f64::INFINITY, 100.0).unwrap() - 0.01).abs() < 1e-15);
        assert!(epsilon_of_state(&f, 0.0, 100.0).is_err());
    }
}
