//! Splitting `ψ = ρ̲⁺φ⁺ − ρ̲⁻φ⁻` into per-layer traces whose normal
//! derivatives match on the interface.

use std::f64::consts::TAU;

use crate::dynamics::state::{Traces, WaveState};
use crate::energetics::PhysicalParams;
use crate::error::{Error, Result};
use crate::harmonic::{flat_symbol, DnoExpansion};
use crate::spectral;

pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const TRACE_MAX_ITERATIONS: usize = 50;
/// Tail ratio tolerated by the dynamics before a state counts as unresolved.
pub const DYNAMICS_TAIL_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSolver {
    pub order: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub tail_threshold: f64,
}

impl TraceSolver {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            tolerance: TRACE_TOLERANCE,
            max_iterations: TRACE_MAX_ITERATIONS,
            tail_threshold: DYNAMICS_TAIL_THRESHOLD,
        }
    }

    /// Solve `(ρ̲⁻G⁺ + ρ̲⁺G⁻)u = b` for the trace of the denser side by a
    /// Richardson iteration preconditioned with the flat symbol. Working with
    /// the denser side keeps the back-substitution free of small divisors.
    pub fn solve(&self, state: &WaveState, params: &PhysicalParams) -> Result<Traces> {
        params.validate()?;
        let n = state.n_modes();
        let eta = &state.eta;
        let lower = DnoExpansion::new(self.order, params.lower_layer())?
            .with_tail_threshold(self.tail_threshold)
            .prepare(eta)?;
        let upper = DnoExpansion::new(self.order, params.upper_layer())?
            .with_tail_threshold(self.tail_threshold)
            .prepare(eta)?;
        let (rp, rm) = (params.rho_bar_plus(), params.rho_bar_minus());
        let solve_plus = rm >= rp;
        let psi = &state.psi;

        let zero = || Traces {
            phi_plus: vec![0.0; n],
            phi_minus: vec![0.0; n],
            normal_velocity: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        };
        if spectral::sup_norm(psi) == 0.0 {
            return Ok(zero());
        }
        // Only the oscillating part of ψ enters the operator; its mean is
        // carried by the back-substitution.
        let psi_mean = spectral::mean(psi);
        let psi_osc: Vec<f64> = psi.iter().map(|v| v - psi_mean).collect();
        if spectral::sup_norm(&psi_osc) == 0.0 {
            let mut t = zero();
            if solve_plus {
                t.phi_minus = vec![-psi_mean / rm; n];
            } else {
                t.phi_plus = vec![psi_mean / rp; n];
            }
            return Ok(t);
        }

        let b: Vec<f64> = if solve_plus {
            upper.apply(&psi_osc)?
        } else {
            lower.apply(&psi_osc)?.iter().map(|v| -v).collect()
        };
        let scale = spectral::sup_norm(&b);
        let (hp, hm) = (params.h_plus, params.h_minus);
        let precondition = |r: &[f64]| {
            spectral::apply_real_symbol(r, TAU, |k| {
                let s = rm * flat_symbol(k, hp) + rp * flat_symbol(k, hm);
                if s == 0.0 {
                    0.0
                } else {
                    1.0 / s
                }
            })
        };

        let mut u = precondition(&b);
        let mut history = Vec::new();
        for it in 0..=self.max_iterations {
            let gp = lower.apply(&u)?;
            let gm = upper.apply(&u)?;
            let r: Vec<f64> = (0..n).map(|j| b[j] - rm * gp[j] - rp * gm[j]).collect();
            let res = if scale > 0.0 { spectral::sup_norm(&r) / scale } else { 0.0 };
            history.push(res);
            if res <= self.tolerance {
                let (phi_plus, phi_minus, normal_velocity) = if solve_plus {
                    let phi_minus = (0..n).map(|j| (rp * u[j] - psi[j]) / rm).collect();
                    (u, phi_minus, gp)
                } else {
                    let phi_plus = (0..n).map(|j| (psi[j] + rm * u[j]) / rp).collect();
                    (phi_plus, u, gm.iter().map(|v| -v).collect())
                };
                return Ok(Traces {
                    phi_plus,
                    phi_minus,
                    normal_velocity,
                    iterations: it,
                    residual: res,
                });
            }
            if !res.is_finite() {
                break;
            }
            let du = precondition(&r);
            for (a, d) in u.iter_mut().zip(du) {
                *a += d;
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
            trace: history,
        })
    }
}

/// Per-layer traces of `state` with the default solver settings.
pub fn recover_traces(state: &WaveState, params: &PhysicalParams, order: usize) -> Result<Traces> {
    TraceSolver::new(order).solve(state, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GraphInterface;
    use crate::harmonic::dno_apply;

    fn cosine(n: usize, k: f64) -> Vec<f64> {
        spectral::grid(n, TAU).iter().map(|x| (k * x).cos()).collect()
    }

    #[test]
    fn zero_psi_gives_zero_traces() {
        let eta = GraphInterface::from_fn(32, |x| 0.1 * x.cos()).unwrap();
        let s = WaveState::new(0.0, eta, vec![0.0; 32]).unwrap();
        let p = PhysicalParams::new(1.0, 2.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let t = recover_traces(&s, &p, 3).unwrap();
        assert!(t.phi_plus.iter().chain(&t.phi_minus).all(|v| *v == 0.0));
    }

    #[test]
    fn one_phase_reduction() {
        let n = 32;
        let eta = GraphInterface::from_fn(n, |x| 0.05 * x.cos()).unwrap();
        let psi: Vec<f64> = spectral::grid(n, TAU).iter().map(|x| x.sin() + 0.3).collect();
        let s = WaveState::new(0.0, eta, psi.clone()).unwrap();
        let p = PhysicalParams::new(1.0, 0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let t = recover_traces(&s, &p, 3).unwrap();
        for (a, b) in t.phi_plus.iter().zip(&psi) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn flat_equal_densities_split_antisymmetrically() {
        let n = 16;
        let s = WaveState::new(0.0, GraphInterface::flat(n), cosine(n, 1.0)).unwrap();
        let p = PhysicalParams::new(1.0, 1.0, 1.0, 0.0, f64::INFINITY, f64::INFINITY).unwrap();
        let t = recover_traces(&s, &p, 3).unwrap();
        for ((a, b), c) in t.phi_plus.iter().zip(&t.phi_minus).zip(cosine(n, 1.0)) {
            assert!((a - c).abs() < 1e-14 && (b + c).abs() < 1e-14);
        }
    }

    #[test]
    fn curved_interface_matches_normal_derivatives() {
        let n = 64;
        let eta = GraphInterface::from_fn(n, |x| 0.1 * x.cos() + 0.03 * (2.0 * x).sin()).unwrap();
        let psi: Vec<f64> = spectral::grid(n, TAU).iter().map(|x| (x + 0.4).cos()).collect();
        for (rp, rm) in [(1.0, 2.0), (3.0, 1.0)] {
            let p = PhysicalParams::new(rp, rm, 1.0, 0.0, 1.0, 2.0).unwrap();
            let s = WaveState::new(0.0, eta.clone(), psi.clone()).unwrap();
            let t = recover_traces(&s, &p, 3).unwrap();
            assert!(t.iterations > 1);
            let lower = DnoExpansion::new(3, p.lower_layer()).unwrap();
            let upper = DnoExpansion::new(3, p.upper_layer()).unwrap();
            let gp = dno_apply(&lower, &eta, &t.phi_plus).unwrap();
            let gm = dno_apply(&upper, &eta, &t.phi_minus).unwrap();
            for j in 0..n {
                assert!((gp[j] + gm[j]).abs() < 1e-11);
                let back = p.rho_bar_plus() * t.phi_plus[j] - p.rho_bar_minus() * t.phi_minus[j];
                assert!((back - psi[j]).abs() < 1e-13);
            }
        }
    }
}
