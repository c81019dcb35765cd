//! Harmonic-oscillator eigenstates and the 1D coherent state.

use super::hydrogenic::factorial;
use crate::numerics::{Cx, Scalar};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `(ω/π)^{1/4} (2ⁿ n!)^{−1/2} Hₙ(√ω x) e^{−ωx²/2}` (no time factor).
pub fn hermite_function<T: Scalar>(n: u32, omega: f64, x: T) -> T {
    let xi = x * omega.sqrt();
    let mut h_prev = T::cst(1.0);
    let mut h = xi * 2.0;
    if n == 0 {
        h = h_prev;
    } else {
        for k in 1..n {
            let next = xi * h * 2.0 - h_prev * (2.0 * k as f64);
            h_prev = h;
            h = next;
        }
    }
    let norm = (omega / PI).powf(0.25) / (2f64.powi(n as i32) * factorial(n)).sqrt();
    h * norm * (xi * xi * -0.5).exp()
}

#[derive(Clone, Debug)]
pub struct Oscillator1d {
    pub n: u32,
    pub omega: f64,
    pub energy: f64,
}

impl Oscillator1d {
    pub fn new(n: u32, omega: f64) -> Self {
        Oscillator1d {
            n,
            omega,
            energy: (n as f64 + 0.5) * omega,
        }
    }

    pub fn psi<T: Scalar>(&self, x: [T; 3], t: T) -> Cx<T> {
        Cx::expi(t * -self.energy).scale(hermite_function(self.n, self.omega, x[0]))
    }
}

#[derive(Clone, Debug)]
pub struct Oscillator3d {
    pub n: [u32; 3],
    pub omega: f64,
    pub energy: f64,
}

impl Oscillator3d {
    pub fn new(n: [u32; 3], omega: f64) -> Self {
        Oscillator3d {
            n,
            omega,
            energy: (n.iter().sum::<u32>() as f64 + 1.5) * omega,
        }
    }

    pub fn psi<T: Scalar>(&self, x: [T; 3], t: T) -> Cx<T> {
        let amp = hermite_function(self.n[0], self.omega, x[0])
            * hermite_function(self.n[1], self.omega, x[1])
            * hermite_function(self.n[2], self.omega, x[2]);
        Cx::expi(t * -self.energy).scale(amp)
    }
}

/// Glauber state of the 1D oscillator, exact for all `t`:
/// `ψ = (ω/π)^{1/4} exp(−ωx²/2 + √(2ω) α(t) x − α(t)²/2 − |α|²/2 − iωt/2)`,
/// `α(t) = α e^{−iωt}`.
#[derive(Clone, Debug)]
pub struct Coherent1d {
    pub alpha: Complex64,
    pub omega: f64,
}

impl Coherent1d {
    pub fn psi<T: Scalar>(&self, x: [T; 3], t: T) -> Cx<T> {
        let w = self.omega;
        let at = Cx::expi(t * -w).scale_c64(self.alpha);
        let lin = at.scale(x[0] * (2.0 * w).sqrt());
        let quad = (at * at).scale(T::cst(-0.5));
        let gauss = x[0] * x[0] * (-0.5 * w) - 0.5 * self.alpha.norm_sqr() + 0.25 * (w / PI).ln();
        let expo = lin + quad + Cx::new(gauss, t * (-0.5 * w));
        expo.exp()
    }

    /// Centre of the packet, `√(2/ω) Re α(t)`.
    pub fn mean_position(&self, t: f64) -> f64 {
        (2.0 / self.omega).sqrt() * (self.alpha * Complex64::from_polar(1.0, -self.omega * t)).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_at_origin() {
        let v = hermite_function(0, 1.0, 0.0);
        assert!((v - PI.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn hermite_low_orders() {
        let x: f64 = 0.73;
        let g = (-x * x / 2.0).exp() * PI.powf(-0.25);
        let h1 = hermite_function(1, 1.0, x);
        assert!((h1 - g * 2.0 * x / 2f64.sqrt()).abs() < 1e-15);
        let h4 = hermite_function(4, 1.0, x);
        let p4 = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        assert!((h4 - g * p4 / (16.0 * 24.0f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn coherent_with_zero_alpha_is_ground_state() {
        let c = Coherent1d {
            alpha: Complex64::new(0.0, 0.0),
            omega: 1.3,
        };
        let g = Oscillator1d::new(0, 1.3);
        for (x, t) in [(0.2, 0.0), (-1.0, 0.7), (2.0, 3.0)] {
            let a = c.psi([x, 0.0, 0.0], t).to_c64();
            let b = g.psi([x, 0.0, 0.0], t).to_c64();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_density_is_displaced_gaussian() {
        let c = Coherent1d {
            alpha: Complex64::new(1.0, 0.5),
            omega: 1.0,
        };
        let t = 0.9;
        let x0 = c.mean_position(t);
        for x in [-1.0, 0.0, 0.4, 2.2] {
            let rho = c.psi([x, 0.0, 0.0], t).to_c64().norm_sqr();
            let want = (-(x - x0) * (x - x0)).exp() / PI.sqrt();
            assert!((rho - want).abs() < 1e-14);
        }
    }
}
